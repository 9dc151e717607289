//! Blocks of outerplanar graphs: dissections of a polygon, up to the dihedral group.
//!
//! Everything is expressed through `F`, the series of plane trees with no vertex
//! of degree two counted by leaves, `F = x + F^2 / (1 - F)`.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::grammar::Terminal;
use crate::zindex::numtheory::phi;
use crate::zindex::{CycleIndex, Monomial, PointMode, Q};

const MAX_ORDER: u32 = 1 << 16;

type Series = Vec<BigInt>;

fn mul(a: &Series, b: &Series, n: usize) -> Series {
    let mut out = vec![BigInt::zero(); n + 1];
    for (i, x) in a.iter().enumerate().take(n + 1) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(n + 1 - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// `1 / (1 - a)` for `a(0) = 0`.
fn inv_one_minus(a: &Series, n: usize) -> Series {
    let mut out = vec![BigInt::zero(); n + 1];
    out[0] = BigInt::one();
    for k in 1..=n {
        let mut c = BigInt::zero();
        for i in 1..=k.min(a.len() - 1) {
            c += &a[i] * &out[k - i];
        }
        out[k] = c;
    }
    out
}

fn deriv(a: &Series, n: usize) -> Series {
    (0..=n).map(|k| a.get(k + 1).map_or_else(BigInt::zero, |c| c * BigInt::from(k + 1))).collect()
}

fn shift(a: &Series, by: usize, n: usize) -> Series {
    (0..=n).map(|k| if k >= by { a.get(k - by).cloned().unwrap_or_default() } else { BigInt::zero() }).collect()
}

/// Coefficients of `F` up to `x^n`, from `(1 + x) F = x + 2 F^2`.
pub fn f_coeffs(n: usize) -> Series {
    let mut f = vec![BigInt::zero(); n + 1];
    for k in 1..=n {
        let mut c = if k == 1 { BigInt::one() } else { BigInt::zero() };
        c -= &f[k - 1];
        let mut sq = BigInt::zero();
        for i in 1..k {
            sq += &f[i] * &f[k - i];
        }
        f[k] = c + sq * 2;
    }
    f
}

/// Exact `F, G, P, Q, R, S` up to `x^n`.
pub struct Aux {
    pub f: Series,
    pub g: Series,
    pub p: Series,
    pub q: Series,
    pub r: Series,
    pub s: Series,
}

pub fn aux_series(n: usize) -> Aux {
    let m = n + 2;
    let f = f_coeffs(m);
    let fp = deriv(&f, m);
    let g = mul(&fp, &inv_one_minus(&f, m), m);
    // P = (F / x) / (1 - 2F)
    let u: Series = (0..=m).map(|k| f.get(k + 1).cloned().unwrap_or_default()).collect();
    let two_f: Series = f.iter().map(|c| c * 2).collect();
    let p = mul(&u, &inv_one_minus(&two_f, m), m);
    let q = deriv(&p, m);
    let r = deriv(&shift(&p, 1, m), m);
    let s = deriv(&shift(&p, 2, m), m);
    let cut = |v: Series| v.into_iter().take(n + 1).collect::<Series>();
    Aux { f: cut(f), g: cut(g), p: cut(p), q: cut(q), r: cut(r), s: cut(s) }
}

fn half_of(c: &BigInt) -> Q {
    Q::new(c.clone(), BigInt::from(2))
}

/// `(Z_B', Z̄_Bsym, Z̄_B'°)` truncated at `trunc`.
pub fn outerplanar_b_series(trunc: usize) -> (CycleIndex, CycleIndex, CycleIndex) {
    let zp = rooted_series(trunc);
    let zs = symmetric_series(trunc);
    let zpp = zp.delta_point(1).expect("unpointed series");
    (zp, zs, zpp)
}

fn rooted_series(trunc: usize) -> CycleIndex {
    let a = aux_series(trunc);
    let mut z = CycleIndex::zero(trunc, false);
    for (k, c) in a.f.iter().enumerate() {
        z.insert(Monomial::from_pairs(&[(1, k as u32)], None), half_of(c));
    }
    for (m, c) in a.p.iter().enumerate() {
        let m = m as u32;
        z.insert(Monomial::from_pairs(&[(1, 1), (2, m)], None), half_of(c));
        z.insert(Monomial::from_pairs(&[(2, m + 1)], None), half_of(c));
    }
    z
}

fn symmetric_series(trunc: usize) -> CycleIndex {
    let a = aux_series(trunc);
    let n = trunc as u32;
    let mut z = CycleIndex::zero(trunc, true);
    for r in 2..=n {
        let w = Q::new(BigInt::from(phi(r as u64)), BigInt::from(2));
        for (m, c) in a.g.iter().enumerate().take((n / r) as usize) {
            let c = Q::from_integer(c.clone()) * &w;
            z.insert(Monomial::from_pairs(&[(r, m as u32)], Some(r)), c);
        }
    }
    // t2/2 (1 + s1^2 Q(s2) + 2 s1 R(s2) + S(s2))
    let one = BigInt::one();
    z.insert(Monomial::from_pairs(&[], Some(2)), half_of(&one));
    for m in 0..=(n / 2) as usize {
        let m32 = m as u32;
        z.insert(Monomial::from_pairs(&[(1, 2), (2, m32)], Some(2)), half_of(&a.q[m]));
        z.insert(Monomial::from_pairs(&[(1, 1), (2, m32)], Some(2)), Q::from_integer(a.r[m].clone()));
        z.insert(Monomial::from_pairs(&[(2, m32)], Some(2)), half_of(&a.s[m]));
    }
    z
}

/// Floating point values of the auxiliary series at one point.
#[derive(Clone, Copy, Debug)]
struct AuxVal {
    f: f64,
    df: f64,
    g: f64,
    p: f64,
    dp: f64,
}

fn aux_at(x: f64) -> AuxVal {
    let d = (1.0 - x) * (1.0 - x) - 4.0 * x;
    let sd = libm::sqrt(d);
    // u = F / x, the small root of 2 x u^2 - (1 + x) u + 1 = 0
    let u = 2.0 / ((1.0 + x) + sd);
    let f = x * u;
    let du = u * (2.0 * u - 1.0) / sd;
    let den = 1.0 - 2.0 * f;
    let p = u / den;
    let dp = (du + 2.0 * u * u) / (den * den);
    AuxVal { f, df: (1.0 - f) / sd, g: 1.0 / sd, p, dp }
}

/// Rooted dissection block `B'`.
#[derive(Clone, Debug, Default)]
pub struct OuterplanarRooted;

/// Symmetrically cycle-pointed dissection block.
#[derive(Clone, Debug, Default)]
pub struct OuterplanarSymmetric;

impl Terminal for OuterplanarRooted {
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
        let a1 = aux_at(s1);
        let a2 = aux_at(s2);
        let d2 = 0.5 * a2.p + 0.5 * (s1 + s2) * a2.dp;
        match pointing {
            None => 0.5 * (a1.f + (s1 + s2) * a2.p),
            Some(PointMode::Circle) => t(1) * 0.5 * (a1.df + a2.p) + 2.0 * t(2) * d2,
            Some(PointMode::Symm) => 2.0 * t(2) * d2,
        }
    }
}

impl Terminal for OuterplanarSymmetric {
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
        for r in 2..=MAX_ORDER {
            let (sr, tr) = (s(r), t(r));
            if sr == 0.0 && tr == 0.0 {
                break;
            }
            v += 0.5 * phi(r as u64) as f64 * tr * aux_at(sr).g;
        }
        let (s1, s2) = (s(1), s(2));
        let a = aux_at(s2);
        let q = a.dp;
        let r = a.p + s2 * a.dp;
        let sv = 2.0 * s2 * a.p + s2 * s2 * a.dp;
        v + 0.5 * t(2) * (1.0 + s1 * s1 * q + 2.0 * s1 * r + sv)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn ints(v: &[i64]) -> Series {
        v.iter().map(|&c| BigInt::from(c)).collect()
    }

    #[test]
    fn f_small() {
        assert_eq!(f_coeffs(6), ints(&[0, 1, 1, 3, 11, 45, 197]));
    }

    #[test]
    fn float_matches_series() {
        let a = aux_series(60);
        let x = 0.05;
        let ev = |c: &Series| c.iter().rev().fold(0.0, |acc, c| acc * x + c.to_f64().unwrap());
        let v = aux_at(x);
        for (got, want) in [(v.f, ev(&a.f)), (v.g, ev(&a.g)), (v.p, ev(&a.p)), (v.dp, ev(&a.q))] {
            assert!((got - want).abs() < 1e-12 * want.abs().max(1.0), "{} vs {}", got, want);
        }
    }
}
