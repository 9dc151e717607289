//! Floating point values of the basic species' series.
//!
//! Parameters come as slices with `b[i - 1] = b_i`; indices past the end read as 0.

use alloc::format;
use alloc::vec;

use crate::zindex::numtheory::{divisors, phi};
use crate::zindex::{BasicKind, PointMode};
use crate::{Error, Result};

pub(crate) fn at(b: &[f64], i: u32) -> f64 {
    b.get(i as usize - 1).copied().unwrap_or(0.0)
}

pub(crate) fn powi(x: f64, n: u32) -> f64 {
    let (mut acc, mut base, mut e) = (1.0, x, n);
    while e > 0 {
        if e & 1 == 1 {
            acc *= base;
        }
        base *= base;
        e >>= 1;
    }
    acc
}

fn below_one(v: f64, what: &str) -> Result<()> {
    if v < 1.0 {
        Ok(())
    } else {
        Err(Error::Divergent(format!("{} needs a parameter below 1, got {}", what, v)))
    }
}

/// `h_0..=h_k` for `Set[j]`: `h_j = (1/j) sum_{i=1..j} b_i h_{j-i}`.
pub(crate) fn set_k_values(b: &[f64], k: u32) -> alloc::vec::Vec<f64> {
    let mut h = vec![0.0; k as usize + 1];
    h[0] = 1.0;
    for j in 1..=k as usize {
        let mut acc = 0.0;
        for i in 1..=j {
            acc += at(b, i as u32) * h[j - i];
        }
        h[j] = acc / j as f64;
    }
    h
}

pub(crate) fn set_exponent(b: &[f64]) -> f64 {
    b.iter().enumerate().map(|(i, v)| v / (i + 1) as f64).sum()
}

/// Value and partial derivative in `b_1` of an unpointed basic series.
pub fn basic_value(kind: BasicKind, size: Option<u32>, b: &[f64]) -> Result<(f64, f64)> {
    let b1 = at(b, 1);
    Ok(match (kind, size) {
        (BasicKind::Zero, _) => (0.0, 0.0),
        (BasicKind::One, _) => (1.0, 0.0),
        (BasicKind::X, _) => (b1, 1.0),
        (BasicKind::Seq, None) => {
            below_one(b1, "SEQ")?;
            let g = 1.0 / (1.0 - b1);
            (g, g * g)
        }
        (BasicKind::Seq, Some(k)) => {
            (powi(b1, k), if k == 0 { 0.0 } else { k as f64 * powi(b1, k - 1) })
        }
        (BasicKind::Set, None) => {
            let e = libm::exp(set_exponent(b));
            (e, e)
        }
        (BasicKind::Set, Some(k)) => {
            let h = set_k_values(b, k);
            (h[k as usize], if k == 0 { 0.0 } else { h[k as usize - 1] })
        }
        (BasicKind::Cyc, None) => {
            let mut acc = 0.0;
            for (i, &v) in b.iter().enumerate() {
                if v == 0.0 {
                    continue;
                }
                below_one(v, "CYC")?;
                let r = i as u64 + 1;
                acc += phi(r) as f64 / r as f64 * -libm::log1p(-v);
            }
            (acc, if b1 > 0.0 { 1.0 / (1.0 - b1) } else { 1.0 })
        }
        (BasicKind::Cyc, Some(0)) => (0.0, 0.0),
        (BasicKind::Cyc, Some(k)) => {
            let mut acc = 0.0;
            for r in divisors(k as u64) {
                acc += phi(r) as f64 * powi(at(b, r as u32), k / r as u32);
            }
            (acc / k as f64, powi(b1, k - 1))
        }
    })
}

/// Value of a pointed basic series at `s_i = b_i`, `t_l = q_l`.
pub fn basic_pointed_value(
    kind: BasicKind,
    mode: PointMode,
    size: Option<u32>,
    b: &[f64],
    q: &[f64],
) -> Result<f64> {
    let m = mode.min_len();
    let b1 = at(b, 1);
    let q1 = at(q, 1);
    Ok(match (kind, size) {
        (BasicKind::Zero, _) | (BasicKind::One, _) => 0.0,
        (BasicKind::X, _) => {
            if m == 1 {
                q1
            } else {
                0.0
            }
        }
        (BasicKind::Seq, None) => {
            if m > 1 {
                return Ok(0.0);
            }
            below_one(b1, "SEQ")?;
            q1 / ((1.0 - b1) * (1.0 - b1))
        }
        (BasicKind::Seq, Some(k)) => {
            if m > 1 || k == 0 {
                0.0
            } else {
                k as f64 * q1 * powi(b1, k - 1)
            }
        }
        (BasicKind::Set, None) => {
            let tail: f64 = q.iter().skip(m as usize - 1).sum();
            libm::exp(set_exponent(b)) * tail
        }
        (BasicKind::Set, Some(k)) => {
            let h = set_k_values(b, k);
            (m..=k).map(|l| at(q, l) * h[(k - l) as usize]).sum()
        }
        (BasicKind::Cyc, None) => {
            let mut acc = 0.0;
            for r in m as usize..=q.len() {
                let (br, qr) = (at(b, r as u32), at(q, r as u32));
                if qr == 0.0 {
                    continue;
                }
                below_one(br, "CYC")?;
                acc += phi(r as u64) as f64 * qr / (1.0 - br);
            }
            acc
        }
        (BasicKind::Cyc, Some(k)) => {
            let mut acc = 0.0;
            for r in divisors(k as u64) {
                if r < m as u64 {
                    continue;
                }
                let r32 = r as u32;
                acc += phi(r) as f64 * at(q, r32) * powi(at(b, r32), k / r32 - 1);
            }
            acc
        }
    })
}
