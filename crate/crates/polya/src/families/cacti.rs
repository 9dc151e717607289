//! Polygon blocks of cacti graphs.
//!
//! A rooted block is a path of `k` slots (an edge for `k = 1`, a polygon on
//! `k + 1` vertices otherwise) seen up to reversal. A symmetric block is a whole
//! polygon carrying a rotation or a reflection.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::One;
use rand::RngCore;

use crate::grammar::Terminal;
use crate::sampler::dist::{bernoulli, categorical, coprime, geom};
use crate::sampler::{CollKind, CoreDraw};
use crate::zindex::numtheory::phi;
use crate::zindex::{CycleIndex, Monomial, PointMode, Q};
use crate::{Error, Result};

/// Longest cycle length looked at when summing over rotations.
const MAX_ORDER: u32 = 1 << 16;

fn half() -> Q {
    Q::new(BigInt::one(), BigInt::from(2))
}

fn qi(n: u64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// `(Z_B', Z̄_Bsym, Z̄_B'°)` truncated at `trunc`.
pub fn cacti_b_series(trunc: usize) -> (CycleIndex, CycleIndex, CycleIndex) {
    let zp = rooted_series(trunc);
    let zs = symmetric_series(trunc);
    let zpp = zp.delta_point(1).expect("unpointed series");
    (zp, zs, zpp)
}

fn rooted_series(trunc: usize) -> CycleIndex {
    let n = trunc as u32;
    let mut z = CycleIndex::zero(trunc, false);
    for k in 1..=n {
        z.insert(Monomial::from_pairs(&[(1, k)], None), half());
        // reversal of k slots
        let m = if k % 2 == 0 {
            Monomial::from_pairs(&[(2, k / 2)], None)
        } else {
            Monomial::from_pairs(&[(1, 1), (2, k / 2)], None)
        };
        z.insert(m, half());
    }
    z
}

fn symmetric_series(trunc: usize) -> CycleIndex {
    let n = trunc as u32;
    let mut z = CycleIndex::zero(trunc, true);
    for r in 2..=n {
        let c = Q::new(BigInt::from(phi(r as u64)), BigInt::from(2));
        for j in 1..=n / r {
            z.insert(Monomial::from_pairs(&[(r, j - 1)], Some(r)), c.clone());
        }
    }
    // t2 (1 + s1)^2 / (2 (1 - s2)^2)
    for c in 0..=n / 2 {
        let w = Q::new(BigInt::from(c + 1), BigInt::from(2));
        for (f, mult) in [(0u32, 1u64), (1, 2), (2, 1)] {
            let m = Monomial::from_pairs(&[(1, f), (2, c)], Some(2));
            z.insert(m, &w * qi(mult));
        }
    }
    z
}

fn sum_rotations(s: &dyn Fn(u32) -> f64, t: &dyn Fn(u32) -> f64, mut f: impl FnMut(u32, f64)) {
    for r in 2..=MAX_ORDER {
        let tr = t(r);
        if tr == 0.0 && s(r) == 0.0 {
            break;
        }
        f(r, 0.5 * phi(r as u64) as f64 * tr / (1.0 - s(r)));
    }
}

/// Rooted polygon block `B'`.
#[derive(Clone, Debug, Default)]
pub struct CactiRooted;

/// Symmetrically cycle-pointed polygon block.
#[derive(Clone, Debug, Default)]
pub struct CactiSymmetric;

impl CactiRooted {
    fn circle_parts(s1: f64, s2: f64, t1: f64, t2: f64) -> [f64; 4] {
        [
            0.5 * t1 / ((1.0 - s1) * (1.0 - s1)),
            0.5 * t1 / (1.0 - s2),
            t2 / ((1.0 - s2) * (1.0 - s2)),
            t2 * s1 / ((1.0 - s2) * (1.0 - s2)),
        ]
    }
}

fn reversal(k: u32) -> Vec<Vec<u32>> {
    let mut cycles = Vec::new();
    for i in 0..k / 2 {
        cycles.push(vec![i, k - 1 - i]);
    }
    if k % 2 == 1 {
        cycles.push(vec![k / 2]);
    }
    cycles
}

fn identity(k: u32) -> Vec<Vec<u32>> {
    (0..k).map(|i| vec![i]).collect()
}

fn marked(kind: CollKind, k: u32, cycles: Vec<Vec<u32>>, root: u32) -> CoreDraw {
    CoreDraw::collection(kind, k as usize, cycles).with_root(root)
}

impl Terminal for CactiRooted {
    fn name(&self) -> &str {
        "Bp"
    }

    fn pointed(&self) -> bool {
        false
    }

    fn base_series(&self, trunc: usize) -> CycleIndex {
        rooted_series(trunc)
    }

    fn eval(&self, pointing: Option<PointMode>, s: &dyn Fn(u32) -> f64, t: &dyn Fn(u32) -> f64) -> f64 {
        let (s1, s2) = (s(1), s(2));
        match pointing {
            None => 0.5 * s1 / (1.0 - s1) + 0.5 * (s1 + s2) / (1.0 - s2),
            Some(PointMode::Circle) => Self::circle_parts(s1, s2, t(1), t(2)).iter().sum(),
            Some(PointMode::Symm) => Self::circle_parts(s1, s2, 0.0, t(2)).iter().sum(),
        }
    }

    fn samplable(&self) -> bool {
        true
    }

    fn sample(
        &self,
        pointing: Option<PointMode>,
        b: &dyn Fn(u32) -> f64,
        q: &dyn Fn(u32) -> f64,
        rng: &mut dyn RngCore,
    ) -> Result<CoreDraw> {
        let (b1, b2) = (b(1), b(2));
        let kind = CollKind::RootedPolygon;
        match pointing {
            None => {
                let w = [0.5 * b1 / (1.0 - b1), 0.5 * b1 / (1.0 - b2), 0.5 * b2 / (1.0 - b2)];
                Ok(match categorical(&w, rng)? {
                    0 => {
                        let k = 1 + geom(b1, rng)? as u32;
                        CoreDraw::collection(kind, k as usize, identity(k))
                    }
                    1 => {
                        let k = 2 * geom(b2, rng)? as u32 + 1;
                        CoreDraw::collection(kind, k as usize, reversal(k))
                    }
                    _ => {
                        let k = 2 * (1 + geom(b2, rng)? as u32);
                        CoreDraw::collection(kind, k as usize, reversal(k))
                    }
                })
            }
            Some(mode) => {
                let t1 = if mode == PointMode::Circle { q(1) } else { 0.0 };
                let w = Self::circle_parts(b1, b2, t1, q(2));
                Ok(match categorical(&w, rng)? {
                    0 => {
                        let p = geom(b1, rng)? as u32;
                        let k = p + 1 + geom(b1, rng)? as u32;
                        marked(kind, k, identity(k), p)
                    }
                    1 => {
                        let j = geom(b2, rng)? as u32;
                        let k = 2 * j + 1;
                        marked(kind, k, reversal(k), j)
                    }
                    i => {
                        let p = geom(b2, rng)? as u32;
                        let j = p + 1 + geom(b2, rng)? as u32;
                        let k = 2 * j + (i == 3) as u32;
                        let root = if bernoulli(0.5, rng) { p } else { k - 1 - p };
                        marked(kind, k, reversal(k), root)
                    }
                })
            }
        }
    }
}

/// Rotation by `step` on `0..n`.
fn rotation(n: u32, step: u32) -> Vec<Vec<u32>> {
    let perm: Vec<u32> = (0..n).map(|i| (i + step) % n).collect();
    CoreDraw::cycles_of(&perm)
}

/// Reflection `i -> (c - i) mod n`.
fn reflection(n: u32, c: u32) -> Vec<Vec<u32>> {
    let perm: Vec<u32> = (0..n).map(|i| (c + n - i) % n).collect();
    CoreDraw::cycles_of(&perm)
}

impl Terminal for CactiSymmetric {
    fn name(&self) -> &str {
        "Bsym"
    }

    fn pointed(&self) -> bool {
        true
    }

    fn base_series(&self, trunc: usize) -> CycleIndex {
        symmetric_series(trunc)
    }

    fn eval(&self, _pointing: Option<PointMode>, s: &dyn Fn(u32) -> f64, t: &dyn Fn(u32) -> f64) -> f64 {
        let mut v = 0.0;
        sum_rotations(s, t, |_, w| v += w);
        let (s1, s2) = (s(1), s(2));
        v + t(2) * (1.0 + s1) * (1.0 + s1) / (2.0 * (1.0 - s2) * (1.0 - s2))
    }

    fn samplable(&self) -> bool {
        true
    }

    fn sample(
        &self,
        pointing: Option<PointMode>,
        b: &dyn Fn(u32) -> f64,
        q: &dyn Fn(u32) -> f64,
        rng: &mut dyn RngCore,
    ) -> Result<CoreDraw> {
        if pointing.is_some() {
            return Err(Error::Sort(String::from("Bsym is already pointed")));
        }
        let (b1, b2, q2) = (b(1), b(2), q(2));
        let d = (1.0 - b2) * (1.0 - b2);
        let mut w = vec![0.5 * q2 / d, q2 * b1 / d, 0.5 * q2 * b1 * b1 / d];
        let mut orders = Vec::new();
        sum_rotations(b, q, |r, x| {
            orders.push(r);
            w.push(x);
        });
        let kind = CollKind::Polygon;
        let i = categorical(&w, rng)?;
        if i >= 3 {
            let r = orders[i - 3];
            let j = 1 + geom(b(r), rng)? as u32;
            let n = r * j;
            let step = j * coprime(r as u64, rng) as u32;
            return Ok(marked(kind, n, rotation(n, step), 0));
        }
        // c pairs, the p-th one marked
        let p = geom(b2, rng)? as u32;
        let c = p + 1 + geom(b2, rng)? as u32;
        let (n, cycles, root) = match i {
            0 => (2 * c, reflection(2 * c, 2 * c - 1), p),
            1 => (2 * c + 1, reflection(2 * c + 1, 0), p + 1),
            _ => (2 * c + 2, reflection(2 * c + 2, 0), p + 1),
        };
        Ok(marked(kind, n, cycles, root))
    }
}
