//! Core symmetries of the basic species, plain and cycle-pointed.
//!
//! Parameters are `b[i - 1] = b_i` and `q[l - 1] = q_l`; a slice ends where the
//! oracle's values stop, and everything past it counts as 0.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::RngCore;

use super::dist::{below, categorical, coprime, geom, loga, pois, pois_ge1, uniform};
use super::structure::{CollKind, CoreDraw, Structure};
use crate::oracle::{at, powi, set_k_values};
use crate::zindex::numtheory::{divisors, phi};
use crate::zindex::{BasicKind, PointMode};
use crate::{Error, Result};

fn zero_weight(what: &str) -> Error {
    Error::Numeric(format!("{} has zero weight at these parameters", what))
}

fn identity(n: usize) -> Vec<Vec<u32>> {
    (0..n as u32).map(|i| vec![i]).collect()
}

/// Cycles of the rotation `i -> i + shift (mod n)`.
fn rotation(n: usize, shift: usize) -> Vec<Vec<u32>> {
    let perm: Vec<u32> = (0..n).map(|i| ((i + shift) % n) as u32).collect();
    CoreDraw::cycles_of(&perm)
}

/// Consecutive slots grouped into cycles of the given lengths.
fn cycles_from_lengths(lengths: &[u32]) -> Vec<Vec<u32>> {
    let mut next = 0u32;
    lengths
        .iter()
        .map(|&l| {
            let c: Vec<u32> = (next..next + l).collect();
            next += l;
            c
        })
        .collect()
}

/// Cycle lengths of a `Set` symmetry: largest index first, then Poisson counts below.
fn set_lengths(b: &[f64], rng: &mut dyn RngCore) -> Result<Vec<u32>> {
    let n = b.len();
    // tail[j] = sum_{i > j} b_i / i
    let mut tail = vec![0.0; n + 1];
    for j in (0..n).rev() {
        tail[j] = tail[j + 1] + b[j] / (j + 1) as f64;
    }
    let u = uniform(rng);
    let Some(big) = (0..=n).find(|&j| libm::exp(-tail[j]) >= u) else {
        return Ok(Vec::new());
    };
    let mut out = Vec::new();
    if big == 0 {
        return Ok(out);
    }
    let top = pois_ge1(b[big - 1] / big as f64, rng)?;
    out.extend(core::iter::repeat_n(big as u32, top as usize));
    for i in (1..big).rev() {
        let m = pois(b[i - 1] / i as f64, rng)?;
        out.extend(core::iter::repeat_n(i as u32, m as usize));
    }
    Ok(out)
}

/// Cycle lengths of a `Set[k]` symmetry, a partition of `k`.
fn set_k_lengths(b: &[f64], k: u32, rng: &mut dyn RngCore) -> Result<Vec<u32>> {
    let h = set_k_values(b, k);
    let mut out = Vec::new();
    let mut j = k as usize;
    while j > 0 {
        let w: Vec<f64> = (1..=j).map(|i| at(b, i as u32) * h[j - i]).collect();
        let i = categorical(&w, rng)? + 1;
        out.push(i as u32);
        j -= i;
    }
    Ok(out)
}

fn set_draw(lengths: Vec<u32>) -> CoreDraw {
    let n = lengths.iter().sum::<u32>() as usize;
    CoreDraw::collection(CollKind::Set, n, cycles_from_lengths(&lengths))
}

/// Core symmetry of an unpointed basic species.
pub fn draw_basic(kind: BasicKind, size: Option<u32>, b: &[f64], rng: &mut dyn RngCore) -> Result<CoreDraw> {
    let b1 = at(b, 1);
    Ok(match (kind, size) {
        (BasicKind::Zero, _) => return Err(zero_weight("ZERO")),
        (BasicKind::One, _) => CoreDraw { structure: Structure::Unit, cycles: Vec::new(), marked: None },
        (BasicKind::X, _) => CoreDraw { structure: Structure::Atom(0), cycles: vec![vec![0]], marked: None },
        (BasicKind::Seq, None) => {
            let k = geom(b1, rng)? as usize;
            CoreDraw::collection(CollKind::Seq, k, identity(k))
        }
        (BasicKind::Seq, Some(k)) => CoreDraw::collection(CollKind::Seq, k as usize, identity(k as usize)),
        (BasicKind::Set, None) => set_draw(set_lengths(b, rng)?),
        (BasicKind::Set, Some(k)) => set_draw(set_k_lengths(b, k, rng)?),
        (BasicKind::Cyc, None) => {
            let w: Vec<f64> = (1..=b.len())
                .map(|r| {
                    let br = b[r - 1];
                    if br > 0.0 {
                        phi(r as u64) as f64 / r as f64 * -libm::log1p(-br)
                    } else {
                        0.0
                    }
                })
                .collect();
            let r = categorical(&w, rng)? + 1;
            let j = loga(b[r - 1], rng)? as usize;
            let shift = j * coprime(r as u64, rng) as usize;
            CoreDraw::collection(CollKind::Cyc, r * j, rotation(r * j, shift))
        }
        (BasicKind::Cyc, Some(0)) => return Err(zero_weight("CYC[0]")),
        (BasicKind::Cyc, Some(k)) => {
            let ds = divisors(k as u64);
            let w: Vec<f64> = ds
                .iter()
                .map(|&r| phi(r) as f64 * powi(at(b, r as u32), k / r as u32))
                .collect();
            let r = ds[categorical(&w, rng)?];
            let shift = (k as u64 / r) * coprime(r, rng);
            CoreDraw::collection(CollKind::Cyc, k as usize, rotation(k as usize, shift as usize))
        }
    })
}

/// Core rooted c-symmetry of a pointed basic species.
pub fn draw_basic_pointed(
    kind: BasicKind,
    mode: PointMode,
    size: Option<u32>,
    b: &[f64],
    q: &[f64],
    rng: &mut dyn RngCore,
) -> Result<CoreDraw> {
    let m = mode.min_len();
    let b1 = at(b, 1);
    Ok(match (kind, size) {
        (BasicKind::Zero, _) | (BasicKind::One, _) => return Err(zero_weight("pointed ONE")),
        (BasicKind::X, _) => {
            if m > 1 {
                return Err(zero_weight("symmetric pointed X"));
            }
            CoreDraw { structure: Structure::Atom(0), cycles: vec![vec![0]], marked: Some((0, 0)) }
        }
        (BasicKind::Seq, _) if m > 1 => return Err(zero_weight("symmetric pointed SEQ")),
        (BasicKind::Seq, None) => {
            let k1 = geom(b1, rng)? as usize;
            let k2 = geom(b1, rng)? as usize;
            let n = k1 + k2 + 1;
            CoreDraw::collection(CollKind::Seq, n, identity(n)).with_root(k1 as u32)
        }
        (BasicKind::Seq, Some(0)) => return Err(zero_weight("pointed SEQ[0]")),
        (BasicKind::Seq, Some(k)) => {
            let root = below(k as u64, rng) as u32;
            CoreDraw::collection(CollKind::Seq, k as usize, identity(k as usize)).with_root(root)
        }
        (BasicKind::Set, None) => {
            let w: Vec<f64> = (1..=q.len()).map(|l| if l as u32 >= m { q[l - 1] } else { 0.0 }).collect();
            let big = categorical(&w, rng)? as u32 + 1;
            let mut lengths = set_lengths(b, rng)?;
            lengths.push(big);
            marked_last(set_draw(lengths), rng)
        }
        (BasicKind::Set, Some(k)) => {
            let h = set_k_values(b, k);
            let w: Vec<f64> = (1..=k)
                .map(|l| if l >= m { at(q, l) * h[(k - l) as usize] } else { 0.0 })
                .collect();
            let l = categorical(&w, rng)? as u32 + 1;
            let mut lengths = set_k_lengths(b, k - l, rng)?;
            lengths.push(l);
            marked_last(set_draw(lengths), rng)
        }
        (BasicKind::Cyc, None) => {
            let mut w = vec![0.0; q.len()];
            for r in (m as usize)..=q.len() {
                let (br, qr) = (at(b, r as u32), q[r - 1]);
                if qr > 0.0 {
                    if br >= 1.0 {
                        return Err(Error::Divergent(format!("CYC parameter b_{} = {}", r, br)));
                    }
                    w[r - 1] = phi(r as u64) as f64 * qr / (1.0 - br);
                }
            }
            let r = categorical(&w, rng)? + 1;
            let j = 1 + geom(at(b, r as u32), rng)? as usize;
            let shift = j * coprime(r as u64, rng) as usize;
            CoreDraw::collection(CollKind::Cyc, r * j, rotation(r * j, shift)).with_root(0)
        }
        (BasicKind::Cyc, Some(k)) => {
            let ds: Vec<u64> = divisors(k as u64).into_iter().filter(|&r| r >= m as u64).collect();
            let w: Vec<f64> = ds
                .iter()
                .map(|&r| {
                    let r32 = r as u32;
                    phi(r) as f64 * at(q, r32) * powi(at(b, r32), k / r32 - 1)
                })
                .collect();
            let r = ds[categorical(&w, rng)?];
            let shift = (k as u64 / r) * coprime(r, rng);
            CoreDraw::collection(CollKind::Cyc, k as usize, rotation(k as usize, shift as usize)).with_root(0)
        }
    })
}

/// Mark the last cycle, rooted at a uniform atom on it.
fn marked_last(mut d: CoreDraw, rng: &mut dyn RngCore) -> CoreDraw {
    let i = d.cycles.len() - 1;
    let c = &d.cycles[i];
    let root = c[below(c.len() as u64, rng) as usize];
    d.marked = Some((i, root));
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::collections::BTreeMap;
    use alloc::string::String;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use crate::zindex::{basic_pointed_series, basic_series};

    fn params(x: f64, n: usize) -> Vec<f64> {
        (1..=n).map(|i| powi(x, i as u32)).collect()
    }

    /// Sorted cycle type, with the marked length appended for pointed draws.
    fn cycle_type(d: &CoreDraw) -> Vec<u32> {
        let mut t: Vec<u32> = d
            .cycles
            .iter()
            .enumerate()
            .filter(|(i, _)| d.marked.map(|m| m.0) != Some(*i))
            .map(|(_, c)| c.len() as u32)
            .collect();
        t.sort_unstable();
        if let Some((i, _)) = d.marked {
            t.push(1000 + d.cycles[i].len() as u32);
        }
        t
    }

    fn check_automorphism(d: &CoreDraw) {
        let s = d.as_symmetry();
        assert!(s.is_automorphism(), "{:?}", d);
        if let Some((i, r)) = d.marked {
            assert!(d.cycles[i].contains(&r));
        }
    }

    /// Exact weights of cycle types at `s_i = x^i`, from the series monomials.
    fn exact_types(z: &crate::zindex::CycleIndex, x: f64) -> BTreeMap<Vec<u32>, f64> {
        let mut out = BTreeMap::new();
        for (mono, c) in z.terms() {
            let mut t = Vec::new();
            let mut deg = 0;
            for &(i, e) in mono.s.iter() {
                for _ in 0..e {
                    t.push(i);
                }
                deg += i * e;
            }
            t.sort_unstable();
            if let Some(l) = mono.t {
                deg += l;
                t.push(1000 + l);
            }
            let c = num_traits::ToPrimitive::to_f64(c).unwrap();
            *out.entry(t).or_insert(0.0) += c * powi(x, deg);
        }
        out
    }

    fn compare(name: &str, exact: BTreeMap<Vec<u32>, f64>, mut draw: impl FnMut() -> CoreDraw) {
        let total: f64 = exact.values().sum();
        let n = 60_000;
        let mut seen: BTreeMap<Vec<u32>, usize> = BTreeMap::new();
        for _ in 0..n {
            let d = draw();
            check_automorphism(&d);
            *seen.entry(cycle_type(&d)).or_insert(0) += 1;
        }
        for (t, w) in &exact {
            let p = w / total;
            let got = *seen.get(t).unwrap_or(&0) as f64 / n as f64;
            let sd = libm::sqrt(p * (1.0 - p) / n as f64);
            assert!((got - p).abs() < 5.0 * sd + 1e-4, "{} {:?}: {} vs {}\n{:?}\n{:?}", name, t, got, p, exact, seen);
        }
    }

    #[test]
    fn unpointed_cycle_types() {
        let x = 0.3;
        let b = params(x, 40);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (kind, size) in [
            (BasicKind::Seq, None),
            (BasicKind::Set, None),
            (BasicKind::Cyc, None),
            (BasicKind::Set, Some(4)),
            (BasicKind::Cyc, Some(4)),
            (BasicKind::Cyc, Some(6)),
        ] {
            // a truncated series only covers small sizes; compare within them
            let z = basic_series(kind, size, 6);
            let exact = exact_types(&z, x);
            let name = format!("{:?}{:?}", kind, size);
            let inside: f64 = exact.values().sum();
            let full = basic_value_full(kind, size, &b);
            let mut draws = 0usize;
            let mut kept = 0usize;
            compare(&name, exact, || loop {
                let d = draw_basic(kind, size, &b, &mut rng).unwrap();
                draws += 1;
                if d.slots() <= 6 {
                    kept += 1;
                    return d;
                }
            });
            let frac = kept as f64 / draws as f64;
            assert!((frac - inside / full).abs() < 0.02, "{}: {} vs {}", name, frac, inside / full);
        }
    }

    fn basic_value_full(kind: BasicKind, size: Option<u32>, b: &[f64]) -> f64 {
        crate::oracle::basic_value(kind, size, b).unwrap().0
    }

    #[test]
    fn pointed_cycle_types() {
        let x = 0.3;
        let b = params(x, 40);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for mode in [PointMode::Circle, PointMode::Symm] {
            for (kind, size) in [
                (BasicKind::Seq, None),
                (BasicKind::Set, None),
                (BasicKind::Cyc, None),
                (BasicKind::Seq, Some(3)),
                (BasicKind::Set, Some(4)),
                (BasicKind::Cyc, Some(4)),
            ] {
                if kind == BasicKind::Seq && mode == PointMode::Symm {
                    continue;
                }
                let z = basic_pointed_series(kind, mode, size, 6).unwrap();
                let name: String = format!("{:?}{:?}{:?}", kind, mode, size);
                compare(&name, exact_types(&z, x), || loop {
                    let d = draw_basic_pointed(kind, mode, size, &b, &b, &mut rng).unwrap();
                    if d.slots() <= 6 {
                        return d;
                    }
                });
            }
        }
    }

    #[test]
    fn symmetric_set_marks_long_cycle() {
        let b = params(0.4, 30);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..2000 {
            let d = draw_basic_pointed(BasicKind::Set, PointMode::Symm, None, &b, &b, &mut rng).unwrap();
            let (i, _) = d.marked.unwrap();
            assert!(d.cycles[i].len() >= 2);
        }
    }

    #[test]
    fn cyc4_divisor_law() {
        // P(r) = phi(r) s_r^(4/r) / sum; with s_i = x^i every divisor has x^4,
        // so the law is 1/4, 1/4, 1/2 whatever x is
        let b = params(0.01, 8);
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let mut by_order = [0usize; 5];
        let n = 40_000;
        for _ in 0..n {
            let d = draw_basic(BasicKind::Cyc, Some(4), &b, &mut rng).unwrap();
            by_order[d.cycles[0].len()] += 1;
        }
        for (r, p) in [(1, 0.25), (2, 0.25), (4, 0.5)] {
            let got = by_order[r] as f64 / n as f64;
            assert!((got - p).abs() < 0.01, "r={}: {}", r, got);
        }
    }
}
