//! Truncated cycle index series.
//!
//! A [`CycleIndex`] is a finite sum of monomials `c * s_1^{e_1} s_2^{e_2} ... [t_l]`
//! with exact rational coefficients, truncated at a maximal weighted degree where
//! `s_i` and `t_l` have weights `i` and `l`. Pointed series carry exactly one `t`
//! factor per monomial; unpointed series carry none. Both share one representation
//! and the pointed flag is checked at runtime.

mod basic;
pub mod numtheory;

pub use basic::{basic_pointed_series, basic_series, BasicKind, PointMode};

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

/// Exact rational coefficient.
pub type Q = BigRational;

/// Exponent signature of one term: sparse `s_i^{e_i}` plus an optional `t_l`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial {
    /// `(i, e_i)` pairs sorted by `i`, all `e_i >= 1`.
    pub s: Vec<(u32, u32)>,
    pub t: Option<u32>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn s(i: u32) -> Self {
        Monomial::s_pow(i, 1)
    }

    pub fn s_pow(i: u32, e: u32) -> Self {
        assert!(i >= 1);
        if e == 0 {
            return Monomial::one();
        }
        Monomial { s: vec![(i, e)], t: None }
    }

    pub fn t(l: u32) -> Self {
        assert!(l >= 1);
        Monomial { s: Vec::new(), t: Some(l) }
    }

    /// Build from arbitrary `(i, e)` pairs; zero exponents are dropped and repeats merged.
    pub fn from_pairs(pairs: &[(u32, u32)], t: Option<u32>) -> Self {
        let mut map: BTreeMap<u32, u32> = BTreeMap::new();
        for &(i, e) in pairs {
            assert!(i >= 1);
            if e > 0 {
                *map.entry(i).or_insert(0) += e;
            }
        }
        Monomial { s: map.into_iter().collect(), t }
    }

    pub fn weight(&self) -> usize {
        let w: u64 = self.s.iter().map(|&(i, e)| i as u64 * e as u64).sum();
        (w + self.t.unwrap_or(0) as u64) as usize
    }

    pub fn exponent(&self, i: u32) -> u32 {
        self.s.iter().find(|p| p.0 == i).map_or(0, |p| p.1)
    }

    pub fn is_pointed(&self) -> bool {
        self.t.is_some()
    }

    /// Product of two monomials, `None` if both carry a `t` factor.
    pub fn mul(&self, other: &Monomial) -> Option<Monomial> {
        let t = match (self.t, other.t) {
            (Some(_), Some(_)) => return None,
            (a, b) => a.or(b),
        };
        let mut s = Vec::with_capacity(self.s.len() + other.s.len());
        let (mut a, mut b) = (0, 0);
        while a < self.s.len() && b < other.s.len() {
            let (ia, ea) = self.s[a];
            let (ib, eb) = other.s[b];
            if ia == ib {
                s.push((ia, ea + eb));
                a += 1;
                b += 1;
            } else if ia < ib {
                s.push((ia, ea));
                a += 1;
            } else {
                s.push((ib, eb));
                b += 1;
            }
        }
        s.extend_from_slice(&self.s[a..]);
        s.extend_from_slice(&other.s[b..]);
        Some(Monomial { s, t })
    }

    /// Multiply every variable index by `k`.
    pub fn scale_index(&self, k: u32) -> Monomial {
        Monomial {
            s: self.s.iter().map(|&(i, e)| (i * k, e)).collect(),
            t: self.t.map(|l| l * k),
        }
    }

    fn render(&self, out: &mut String) {
        let mut first = true;
        for &(i, e) in &self.s {
            if !first {
                out.push(' ');
            }
            first = false;
            if e == 1 {
                let _ = write!(out, "s{}", i);
            } else {
                let _ = write!(out, "s{}^{}", i, e);
            }
        }
        if let Some(l) = self.t {
            if !first {
                out.push(' ');
            }
            first = false;
            let _ = write!(out, "t{}", l);
        }
        if first {
            out.push('1');
        }
    }
}

type Grade = BTreeMap<Monomial, Q>;

/// A truncated (pointed or unpointed) cycle index series.
///
/// Terms are bucketed by weighted degree, which keeps truncated products and the
/// grade-by-grade exp/log recurrences cheap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleIndex {
    trunc: usize,
    pointed: bool,
    grades: Vec<Grade>,
}

/// Unpointed cycle index sum `Z_A`.
pub type CycleIndexSeries = CycleIndex;
/// Pointed cycle index sum `Z̄_P`.
pub type PointedCycleIndexSeries = CycleIndex;

fn add_into(g: &mut Grade, m: Monomial, c: Q) {
    if c.is_zero() {
        return;
    }
    use alloc::collections::btree_map::Entry;
    match g.entry(m) {
        Entry::Vacant(v) => {
            v.insert(c);
        }
        Entry::Occupied(mut o) => {
            *o.get_mut() += c;
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

fn grade_mul_into(out: &mut Grade, a: &Grade, b: &Grade, scale: &Q) {
    for (ma, ca) in a {
        for (mb, cb) in b {
            if let Some(m) = ma.mul(mb) {
                add_into(out, m, ca * cb * scale);
            }
        }
    }
}

fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

fn check_trunc(a: &CycleIndex, b: &CycleIndex) -> Result<()> {
    if a.trunc != b.trunc {
        return Err(Error::Usage(format!(
            "truncation mismatch: {} vs {}",
            a.trunc, b.trunc
        )));
    }
    Ok(())
}

impl CycleIndex {
    pub fn zero(trunc: usize, pointed: bool) -> Self {
        CycleIndex { trunc, pointed, grades: vec![Grade::new(); trunc + 1] }
    }

    pub fn one(trunc: usize) -> Self {
        Self::monomial(Monomial::one(), Q::one(), trunc)
    }

    pub fn s(i: u32, trunc: usize) -> Self {
        Self::monomial(Monomial::s(i), Q::one(), trunc)
    }

    pub fn t(l: u32, trunc: usize) -> Self {
        Self::monomial(Monomial::t(l), Q::one(), trunc)
    }

    /// Single-term series; dropped if its weight exceeds `trunc`.
    pub fn monomial(m: Monomial, c: Q, trunc: usize) -> Self {
        let mut z = Self::zero(trunc, m.is_pointed());
        z.insert(m, c);
        z
    }

    /// Build a series from terms, summing repeated monomials.
    pub fn from_terms<I>(trunc: usize, pointed: bool, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Monomial, Q)>,
    {
        let mut z = Self::zero(trunc, pointed);
        for (m, c) in terms {
            if m.is_pointed() != pointed {
                return Err(Error::Usage(String::from(
                    "term pointedness does not match series kind",
                )));
            }
            z.insert(m, c);
        }
        Ok(z)
    }

    /// Add `c * m` in place, ignoring terms above the truncation.
    pub fn insert(&mut self, m: Monomial, c: Q) {
        debug_assert_eq!(m.is_pointed(), self.pointed);
        let w = m.weight();
        if w <= self.trunc {
            add_into(&mut self.grades[w], m, c);
        }
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    pub fn is_pointed(&self) -> bool {
        self.pointed
    }

    pub fn is_zero(&self) -> bool {
        self.grades.iter().all(|g| g.is_empty())
    }

    pub fn len(&self) -> usize {
        self.grades.iter().map(|g| g.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    /// All terms, ordered by weight and then by monomial.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Q)> {
        self.grades.iter().flat_map(|g| g.iter())
    }

    /// Terms of weighted degree exactly `w`.
    pub fn grade(&self, w: usize) -> impl Iterator<Item = (&Monomial, &Q)> {
        self.grades.get(w).into_iter().flat_map(|g| g.iter())
    }

    pub fn coeff(&self, m: &Monomial) -> Q {
        self.grades
            .get(m.weight())
            .and_then(|g| g.get(m))
            .cloned()
            .unwrap_or_else(Q::zero)
    }

    pub fn constant_term(&self) -> Q {
        self.coeff(&Monomial::one())
    }

    /// Same series with a different truncation (terms above the new one are dropped).
    pub fn retrunc(&self, trunc: usize) -> Self {
        let mut grades = self.grades.clone();
        grades.resize(trunc + 1, Grade::new());
        CycleIndex { trunc, pointed: self.pointed, grades }
    }

    /// Homogeneous component of weight `w`.
    pub fn component(&self, w: usize) -> Self {
        let mut z = Self::zero(self.trunc, self.pointed);
        if w <= self.trunc {
            z.grades[w] = self.grades[w].clone();
        }
        z
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_trunc(self, other)?;
        if self.pointed != other.pointed {
            return Err(Error::Usage(String::from(
                "cannot add a pointed and an unpointed series",
            )));
        }
        let mut z = self.clone();
        for (w, g) in other.grades.iter().enumerate() {
            for (m, c) in g {
                add_into(&mut z.grades[w], m.clone(), c.clone());
            }
        }
        Ok(z)
    }

    pub fn neg(&self) -> Self {
        self.scale(&(-Q::one()))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Q) -> Self {
        let mut z = Self::zero(self.trunc, self.pointed);
        if c.is_zero() {
            return z;
        }
        for (w, g) in self.grades.iter().enumerate() {
            z.grades[w] = g.iter().map(|(m, v)| (m.clone(), v * c)).collect();
        }
        z
    }

    /// Truncated product. At most one operand may be pointed.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        check_trunc(self, other)?;
        if self.pointed && other.pointed {
            return Err(Error::Usage(String::from(
                "product of two pointed series would carry two t factors",
            )));
        }
        let n = self.trunc;
        let mut z = Self::zero(n, self.pointed || other.pointed);
        let one = Q::one();
        for wa in 0..=n {
            if self.grades[wa].is_empty() {
                continue;
            }
            for wb in 0..=(n - wa) {
                if other.grades[wb].is_empty() {
                    continue;
                }
                let mut out = core::mem::take(&mut z.grades[wa + wb]);
                grade_mul_into(&mut out, &self.grades[wa], &other.grades[wb], &one);
                z.grades[wa + wb] = out;
            }
        }
        Ok(z)
    }

    pub fn pow(&self, e: u32) -> Result<Self> {
        let mut acc = Self::one(self.trunc);
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    fn require_unpointed(&self, what: &str) -> Result<()> {
        if self.pointed {
            return Err(Error::Usage(format!("{} needs an unpointed series", what)));
        }
        Ok(())
    }

    fn require_no_constant(&self, what: &str) -> Result<()> {
        if !self.grades[0].is_empty() {
            return Err(Error::Inadmissible(format!(
                "{}: argument has a nonzero constant term",
                what
            )));
        }
        Ok(())
    }

    /// `exp(g)` for `g` with zero constant term, via `w F_w = sum_j j g_j F_{w-j}`.
    pub fn exp(g: &Self) -> Result<Self> {
        g.require_unpointed("exp")?;
        g.require_no_constant("exp")?;
        let n = g.trunc;
        let mut f = Self::one(n);
        for w in 1..=n {
            let mut acc = Grade::new();
            for j in 1..=w {
                if g.grades[j].is_empty() || f.grades[w - j].is_empty() {
                    continue;
                }
                let s = q(j as i64) / q(w as i64);
                grade_mul_into(&mut acc, &g.grades[j], &f.grades[w - j], &s);
            }
            f.grades[w] = acc;
        }
        Ok(f)
    }

    /// `1/(1-u)` for `u` with zero constant term.
    pub fn inv_one_minus(u: &Self) -> Result<Self> {
        u.require_unpointed("inv_one_minus")?;
        u.require_no_constant("inv_one_minus")?;
        let n = u.trunc;
        let mut f = Self::one(n);
        let one = Q::one();
        for w in 1..=n {
            let mut acc = Grade::new();
            for j in 1..=w {
                grade_mul_into(&mut acc, &u.grades[j], &f.grades[w - j], &one);
            }
            f.grades[w] = acc;
        }
        Ok(f)
    }

    /// `log(1/(1-u))` for `u` with zero constant term.
    pub fn log_inv_one_minus(u: &Self) -> Result<Self> {
        let inv = Self::inv_one_minus(u)?;
        let n = u.trunc;
        let mut l = Self::zero(n, false);
        for w in 1..=n {
            let mut acc = Grade::new();
            for j in 1..=w {
                let s = q(j as i64) / q(w as i64);
                grade_mul_into(&mut acc, &u.grades[j], &inv.grades[w - j], &s);
            }
            l.grades[w] = acc;
        }
        Ok(l)
    }

    /// Replace every `s_i` by `s_{ik}` and `t_l` by `t_{lk}`.
    pub fn scale_index(&self, k: u32) -> Self {
        assert!(k >= 1);
        let mut z = Self::zero(self.trunc, self.pointed);
        for (w, g) in self.grades.iter().enumerate() {
            if w * k as usize > self.trunc {
                break;
            }
            for (m, c) in g {
                z.grades[w * k as usize].insert(m.scale_index(k), c.clone());
            }
        }
        z
    }

    /// `Σ_{l >= min_len} l t_l ∂f/∂s_l`. `min_len = 2` gives the symmetric pointing.
    pub fn delta_point(&self, min_len: u32) -> Result<Self> {
        self.require_unpointed("delta_point")?;
        let mut z = Self::zero(self.trunc, true);
        for (w, g) in self.grades.iter().enumerate() {
            for (m, c) in g {
                for (pos, &(i, e)) in m.s.iter().enumerate() {
                    if i < min_len {
                        continue;
                    }
                    let mut s = m.s.clone();
                    if e == 1 {
                        s.remove(pos);
                    } else {
                        s[pos].1 -= 1;
                    }
                    let dm = Monomial { s, t: Some(i) };
                    add_into(&mut z.grades[w], dm, c * q(i as i64 * e as i64));
                }
            }
        }
        Ok(z)
    }

    /// Plethystic composition `f ∘ g`: `s_k ← g(s_k, s_2k, ...)`.
    pub fn plethysm(&self, g: &Self) -> Result<Self> {
        self.require_unpointed("plethysm")?;
        self.compose(g, None)
    }

    /// Pointed plethystic composition `f̄ ⊚ g`: additionally `t_k ← h̄_k` with `h̄ = Δg`.
    pub fn pointed_plethysm(&self, g: &Self) -> Result<Self> {
        if !self.pointed {
            return Err(Error::Usage(String::from(
                "pointed_plethysm needs a pointed outer series",
            )));
        }
        let h = g.delta_point(1)?;
        self.compose(g, Some(&h))
    }

    fn compose(&self, g: &Self, h: Option<&Self>) -> Result<Self> {
        check_trunc(self, g)?;
        g.require_unpointed("substitution argument")?;
        g.require_no_constant("plethysm")?;
        let n = self.trunc;
        let mut powers: BTreeMap<(u32, u32), Self> = BTreeMap::new();
        let mut out = Self::zero(n, self.pointed);
        for (m, c) in self.terms() {
            let mut term = Self::monomial(Monomial::one(), c.clone(), n);
            for &(i, e) in &m.s {
                let p = power_of(&mut powers, g, i, e)?;
                term = term.mul(p)?;
                if term.is_zero() {
                    break;
                }
            }
            if let (Some(l), Some(h)) = (m.t, h) {
                if !term.is_zero() {
                    term = term.mul(&h.scale_index(l))?;
                }
            }
            if !term.is_zero() {
                out = out.add(&term)?;
            }
        }
        Ok(out)
    }

    /// Substitute `t_l := s_l`, turning a pointed series into an unpointed one.
    pub fn specialize_t(&self) -> Self {
        if !self.pointed {
            return self.clone();
        }
        let mut z = Self::zero(self.trunc, false);
        for (w, g) in self.grades.iter().enumerate() {
            for (m, c) in g {
                let l = m.t.expect("pointed term without t");
                let mut pairs = m.s.clone();
                pairs.push((l, 1));
                add_into(&mut z.grades[w], Monomial::from_pairs(&pairs, None), c.clone());
            }
        }
        z
    }

    /// `d/du Z(u s_1, u^2 s_2, ...)` at `u = 1`: each term times its weight.
    pub fn weight_derivative(&self) -> Self {
        let mut z = self.clone();
        for (w, g) in z.grades.iter_mut().enumerate() {
            let f = q(w as i64);
            *g = core::mem::take(g)
                .into_iter()
                .filter(|_| w > 0)
                .map(|(m, c)| (m, c * &f))
                .collect();
        }
        z
    }

    /// Rational coefficients of the series at `s_i = t_i = x^i`.
    pub fn specialize(&self) -> Vec<Q> {
        self.grades
            .iter()
            .map(|g| g.values().fold(Q::zero(), |a, c| a + c))
            .collect()
    }

    /// The ordinary generating series. Errors if a coefficient is not an integer.
    pub fn to_ogs(&self) -> Result<Ogs> {
        let mut coeffs = Vec::with_capacity(self.trunc + 1);
        for (n, c) in self.specialize().into_iter().enumerate() {
            if !c.is_integer() {
                return Err(Error::Internal(format!(
                    "non-integral OGS coefficient {} at degree {}",
                    c, n
                )));
            }
            coeffs.push(c.to_integer());
        }
        Ok(Ogs { coeffs })
    }

    /// Floating point evaluation with `s_i = s(i)` and `t_l = t(l)`.
    pub fn eval_f64(&self, s: &dyn Fn(u32) -> f64, t: &dyn Fn(u32) -> f64) -> f64 {
        let mut total = 0.0;
        for (m, c) in self.terms() {
            let mut v = c.to_f64().unwrap_or(f64::NAN);
            for &(i, e) in &m.s {
                v *= libm::pow(s(i), e as f64);
            }
            if let Some(l) = m.t {
                v *= t(l);
            }
            total += v;
        }
        total
    }

    /// Sorted text lines `coeff * s1^a s2^b [t_l]`, one per term.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (m, c) in self.terms() {
            let _ = write!(out, "{} * ", c);
            m.render(&mut out);
            out.push('\n');
        }
        out
    }

    /// Largest absolute value of a numerator or denominator, as a rough size gauge.
    pub fn height(&self) -> BigInt {
        self.terms()
            .map(|(_, c)| core::cmp::max(c.numer().abs(), c.denom().abs()))
            .max()
            .unwrap_or_else(BigInt::zero)
    }
}

fn power_of<'a>(
    cache: &'a mut BTreeMap<(u32, u32), CycleIndex>,
    g: &CycleIndex,
    i: u32,
    e: u32,
) -> Result<&'a CycleIndex> {
    if !cache.contains_key(&(i, e)) {
        let p = if e == 1 {
            g.scale_index(i)
        } else {
            let prev = power_of(cache, g, i, e - 1)?.clone();
            let base = power_of(cache, g, i, 1)?.clone();
            prev.mul(&base)?
        };
        cache.insert((i, e), p);
    }
    Ok(&cache[&(i, e)])
}

/// Ordinary generating series `Σ a_n x^n`, truncated at `coeffs.len() - 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ogs {
    pub coeffs: Vec<BigInt>,
}

impl Ogs {
    pub fn trunc(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeff(&self, n: usize) -> Option<&BigInt> {
        self.coeffs.get(n)
    }

    /// Divide coefficient `n` by `n` (`n >= 1`); the constant term passes through.
    pub fn unpoint(&self) -> Result<Ogs> {
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for (n, c) in self.coeffs.iter().enumerate() {
            if n == 0 {
                coeffs.push(c.clone());
                continue;
            }
            let d = BigInt::from(n);
            if !(c % &d).is_zero() {
                return Err(Error::Internal(format!(
                    "pointed coefficient {} at size {} is not divisible by {}",
                    c, n, n
                )));
            }
            coeffs.push(c / d);
        }
        Ok(Ogs { coeffs })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(a: i64, b: i64) -> Q {
        Q::new(BigInt::from(a), BigInt::from(b))
    }

    #[test]
    fn add_doubles() {
        let s1 = CycleIndex::s(1, 4);
        let two = s1.add(&s1).unwrap();
        assert_eq!(two.coeff(&Monomial::s(1)), r(2, 1));
        assert_eq!(two.len(), 1);
    }

    #[test]
    fn add_mismatched_trunc_is_usage() {
        let a = CycleIndex::s(1, 4);
        let b = CycleIndex::s(1, 5);
        assert!(matches!(a.add(&b), Err(Error::Usage(_))));
    }

    #[test]
    fn pointed_times_pointed_rejected() {
        let a = CycleIndex::t(1, 4);
        assert!(matches!(a.mul(&a), Err(Error::Usage(_))));
    }

    #[test]
    fn two_atoms() {
        let x = CycleIndex::s(1, 5);
        let xx = x.mul(&x).unwrap();
        assert_eq!(xx.to_ogs().unwrap().coeffs, [0, 0, 1, 0, 0, 0].map(BigInt::from));
    }

    #[test]
    fn product_truncates() {
        let x = CycleIndex::s(3, 5);
        assert!(x.mul(&x).unwrap().is_zero());
    }

    #[test]
    fn pointed_distributes() {
        let t2 = CycleIndex::t(2, 6);
        let set2 = basic_series(BasicKind::Set, Some(2), 6);
        let p = t2.mul(&set2).unwrap();
        assert!(p.is_pointed());
        assert_eq!(p.coeff(&Monomial::from_pairs(&[(1, 2)], Some(2))), r(1, 2));
        assert_eq!(p.coeff(&Monomial::from_pairs(&[(2, 1)], Some(2))), r(1, 2));
    }

    #[test]
    fn relabel_s2() {
        let g = CycleIndex::s(1, 8).add(&CycleIndex::s(1, 8).mul(&CycleIndex::s(2, 8)).unwrap()).unwrap();
        let s2 = CycleIndex::s(2, 8);
        let c = s2.plethysm(&g).unwrap();
        let want = CycleIndex::s(2, 8).add(&CycleIndex::s(2, 8).mul(&CycleIndex::s(4, 8)).unwrap()).unwrap();
        assert_eq!(c, want);
    }

    #[test]
    fn plethysm_needs_zero_constant() {
        let f = CycleIndex::s(1, 4);
        let g = CycleIndex::one(4);
        assert!(matches!(f.plethysm(&g), Err(Error::Inadmissible(_))));
    }

    #[test]
    fn t1_osub_g() {
        let n = 6;
        let g = basic_series(BasicKind::Cyc, Some(3), n).add(&CycleIndex::s(1, n)).unwrap();
        let t1 = CycleIndex::t(1, n);
        assert_eq!(t1.pointed_plethysm(&g).unwrap(), g.delta_point(1).unwrap());
    }

    #[test]
    fn t2_osub_s1() {
        let t2 = CycleIndex::t(2, 5);
        let s1 = CycleIndex::s(1, 5);
        assert_eq!(t2.pointed_plethysm(&s1).unwrap(), t2);
    }

    #[test]
    fn delta_examples() {
        let n = 6;
        assert_eq!(CycleIndex::s(1, n).delta_point(1).unwrap(), CycleIndex::t(1, n));
        let set2 = basic_series(BasicKind::Set, Some(2), n);
        let d1 = set2.delta_point(1).unwrap();
        let want = CycleIndex::monomial(Monomial::from_pairs(&[(1, 1)], Some(1)), Q::one(), n)
            .add(&CycleIndex::t(2, n))
            .unwrap();
        assert_eq!(d1, want);
        assert_eq!(set2.delta_point(2).unwrap(), CycleIndex::t(2, n));
    }

    #[test]
    fn exp_log_inverse() {
        let n = 8;
        let u = CycleIndex::s(1, n).add(&CycleIndex::s(2, n).scale(&r(3, 2))).unwrap();
        let l = CycleIndex::log_inv_one_minus(&u).unwrap();
        let e = CycleIndex::exp(&l).unwrap();
        assert_eq!(e, CycleIndex::inv_one_minus(&u).unwrap());
    }

    #[test]
    fn cyc4_is_one_structure() {
        let c4 = basic_series(BasicKind::Cyc, Some(4), 6);
        assert_eq!(c4.to_ogs().unwrap().coeffs, [0, 0, 0, 0, 1, 0, 0].map(BigInt::from));
    }

    #[test]
    fn dump_format() {
        let set2 = basic_series(BasicKind::Set, Some(2), 4);
        assert_eq!(set2.dump(), "1/2 * s1^2\n1/2 * s2\n");
        let p = CycleIndex::one(2).add(&CycleIndex::s(1, 2)).unwrap();
        assert_eq!(p.dump(), "1 * 1\n1 * s1\n");
    }

    #[test]
    fn unpoint_divides() {
        let o = Ogs { coeffs: [1, 1, 2, 6, 12].map(BigInt::from).to_vec() };
        assert_eq!(o.unpoint().unwrap().coeffs, [1, 1, 1, 2, 3].map(BigInt::from));
        let bad = Ogs { coeffs: [0, 1, 3].map(BigInt::from).to_vec() };
        assert!(matches!(bad.unpoint(), Err(Error::Internal(_))));
    }

    #[test]
    fn eval_matches_closed_form() {
        let n = 40;
        let seq = basic_series(BasicKind::Seq, None, n);
        let x = 0.3;
        let v = seq.eval_f64(&|i| libm::pow(x, i as f64), &|_| 0.0);
        assert!((v - 1.0 / (1.0 - x)).abs() < 1e-12);
    }
}
