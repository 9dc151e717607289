//! Closed forms for the basic species and their pointed versions.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::One;

use super::numtheory::{divisors, phi};
use super::{CycleIndex, Monomial, Q};
use crate::Result;

/// Basic species. `Seq`, `Set` and `Cyc` take an optional exact size.
///
/// `Cyc` is the species of nonempty cycles, so `Cyc[0]` is the zero series.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BasicKind {
    Zero,
    One,
    X,
    Seq,
    Set,
    Cyc,
}

impl BasicKind {
    pub fn takes_size(self) -> bool {
        matches!(self, BasicKind::Seq | BasicKind::Set | BasicKind::Cyc)
    }

    pub fn name(self) -> &'static str {
        match self {
            BasicKind::Zero => "ZERO",
            BasicKind::One => "ONE",
            BasicKind::X => "X",
            BasicKind::Seq => "SEQ",
            BasicKind::Set => "SET",
            BasicKind::Cyc => "CYC",
        }
    }
}

/// How a basic species is cycle-pointed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PointMode {
    /// Any cycle may be marked.
    Circle,
    /// Only cycles of length at least 2 may be marked.
    Symm,
}

impl PointMode {
    pub fn min_len(self) -> u32 {
        match self {
            PointMode::Circle => 1,
            PointMode::Symm => 2,
        }
    }
}

fn rat(a: u64, b: u64) -> Q {
    Q::new(BigInt::from(a), BigInt::from(b))
}

/// Cycle index sum of a basic species, truncated at `trunc`.
///
/// `size` is ignored for `Zero`, `One` and `X`.
pub fn basic_series(kind: BasicKind, size: Option<u32>, trunc: usize) -> CycleIndex {
    let mut z = CycleIndex::zero(trunc, false);
    match (kind, size) {
        (BasicKind::Zero, _) => {}
        (BasicKind::One, _) => z.insert(Monomial::one(), Q::one()),
        (BasicKind::X, _) => z.insert(Monomial::s(1), Q::one()),
        (BasicKind::Seq, None) => {
            for k in 0..=trunc as u32 {
                z.insert(Monomial::s_pow(1, k), Q::one());
            }
        }
        (BasicKind::Seq, Some(k)) => z.insert(Monomial::s_pow(1, k), Q::one()),
        (BasicKind::Set, None) => {
            for k in 0..=trunc as u32 {
                add_set_k(&mut z, k);
            }
        }
        (BasicKind::Set, Some(k)) => add_set_k(&mut z, k),
        (BasicKind::Cyc, None) => {
            // Σ_k φ(k)/k Σ_j s_k^j / j
            for k in 1..=trunc as u32 {
                for j in 1..=(trunc as u32 / k) {
                    z.insert(Monomial::s_pow(k, j), rat(phi(k as u64), (k * j) as u64));
                }
            }
        }
        (BasicKind::Cyc, Some(k)) => {
            if k >= 1 {
                for r in divisors(k as u64) {
                    z.insert(Monomial::s_pow(r as u32, k / r as u32), rat(phi(r), k as u64));
                }
            }
        }
    }
    z
}

/// Pointed cycle index sum of a basic species (`delta_point` of [`basic_series`]).
pub fn basic_pointed_series(
    kind: BasicKind,
    mode: PointMode,
    size: Option<u32>,
    trunc: usize,
) -> Result<CycleIndex> {
    basic_series(kind, size, trunc).delta_point(mode.min_len())
}

/// `Σ_{partitions of k} Π s_i^{m_i} / (i^{m_i} m_i!)`.
fn add_set_k(z: &mut CycleIndex, k: u32) {
    if k as usize > z.trunc() {
        return;
    }
    let mut parts: Vec<(u32, u32)> = Vec::new();
    partitions(k, k, &mut parts, &mut |p| {
        let mut denom = BigInt::one();
        for &(i, m) in p {
            for j in 1..=m {
                denom *= BigInt::from(i) * BigInt::from(j);
            }
        }
        z.insert(Monomial::from_pairs(p, None), Q::new(BigInt::one(), denom));
    });
}

/// Enumerate partitions of `n` with parts `<= max`, as `(part, multiplicity)` lists.
fn partitions(n: u32, max: u32, acc: &mut Vec<(u32, u32)>, f: &mut dyn FnMut(&[(u32, u32)])) {
    if n == 0 {
        f(acc);
        return;
    }
    let top = core::cmp::min(n, max);
    for part in (1..=top).rev() {
        for m in 1..=(n / part) {
            acc.push((part, m));
            partitions(n - part * m, part - 1, acc, f);
            acc.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(a: i64, b: i64) -> Q {
        Q::new(BigInt::from(a), BigInt::from(b))
    }

    #[test]
    fn set2_and_doubling() {
        let s = basic_series(BasicKind::Set, Some(2), 6);
        assert_eq!(s.coeff(&Monomial::s_pow(1, 2)), r(1, 2));
        assert_eq!(s.coeff(&Monomial::s(2)), r(1, 2));
        let d = s.add(&s).unwrap();
        assert_eq!(d.coeff(&Monomial::s_pow(1, 2)), r(1, 1));
        assert_eq!(d.coeff(&Monomial::s(2)), r(1, 1));
        assert_eq!(d.len(), 2);
    }

    #[test]
    fn set4_closed_form() {
        let s = basic_series(BasicKind::Set, Some(4), 4);
        let m = |p: &[(u32, u32)]| Monomial::from_pairs(p, None);
        assert_eq!(s.coeff(&m(&[(1, 4)])), r(1, 24));
        assert_eq!(s.coeff(&m(&[(1, 2), (2, 1)])), r(6, 24));
        assert_eq!(s.coeff(&m(&[(1, 1), (3, 1)])), r(8, 24));
        assert_eq!(s.coeff(&m(&[(2, 2)])), r(3, 24));
        assert_eq!(s.coeff(&m(&[(4, 1)])), r(6, 24));
        assert_eq!(s.len(), 5);
    }

    #[test]
    fn cyc4_closed_form() {
        let c = basic_series(BasicKind::Cyc, Some(4), 4);
        assert_eq!(c.coeff(&Monomial::s_pow(1, 4)), r(1, 4));
        assert_eq!(c.coeff(&Monomial::s_pow(2, 2)), r(1, 4));
        assert_eq!(c.coeff(&Monomial::s(4)), r(2, 4));
        assert!(basic_series(BasicKind::Cyc, Some(0), 4).is_zero());
    }

    #[test]
    fn set_is_exp_of_power_sums() {
        let n = 9;
        let mut g = CycleIndex::zero(n, false);
        for k in 1..=n as u32 {
            g.insert(Monomial::s(k), r(1, k as i64));
        }
        assert_eq!(CycleIndex::exp(&g).unwrap(), basic_series(BasicKind::Set, None, n));
    }

    #[test]
    fn cyc_is_sum_of_cyc_k() {
        let n = 10;
        let mut acc = CycleIndex::zero(n, false);
        for k in 1..=n as u32 {
            acc = acc.add(&basic_series(BasicKind::Cyc, Some(k), n)).unwrap();
        }
        assert_eq!(acc, basic_series(BasicKind::Cyc, None, n));
    }

    #[test]
    fn seq_is_geometric() {
        let n = 7;
        let s1 = CycleIndex::s(1, n);
        assert_eq!(CycleIndex::inv_one_minus(&s1).unwrap(), basic_series(BasicKind::Seq, None, n));
    }

    #[test]
    fn pointed_seq_ogs() {
        let p = basic_pointed_series(BasicKind::Seq, PointMode::Circle, None, 5).unwrap();
        let want: Vec<BigInt> = (0..=5).map(BigInt::from).collect();
        assert_eq!(p.to_ogs().unwrap().coeffs, want);
    }

    #[test]
    fn symm_set_marks_long_cycles_only() {
        let p = basic_pointed_series(BasicKind::Set, PointMode::Symm, None, 8).unwrap();
        assert!(p.terms().all(|(m, _)| m.t.unwrap() >= 2));
    }
}
