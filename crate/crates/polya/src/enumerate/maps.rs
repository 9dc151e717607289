//! Unrooted 2-connected maps counted by edges.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::zindex::numtheory::{divisors, phi};
use crate::{Error, Result};

/// `s_n` (rooted), `u_n` (reflection-type contribution) and `t_n` (unrooted).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapCounts {
    pub s: BigInt,
    pub u: BigInt,
    pub t: BigInt,
}

fn fact(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |a, k| a * BigInt::from(k))
}

/// Rooted 2-connected maps with `n` edges: `2 (3n-3)! / (n! (2n-1)!)`.
fn s_closed(n: u64) -> BigInt {
    BigInt::from(2) * fact(3 * n - 3) / (fact(n) * fact(2 * n - 1))
}

/// Closed-form counts for `n >= 1` edges.
///
/// `2n t_n = s_n + u_n + (1/2) sum_{k | n, k < n} phi(n/k) (9k^2 - 9k + 2) s_k`.
pub fn map_2conn_counts(n: u64) -> Result<MapCounts> {
    if n == 0 {
        return Err(Error::Usage("map counts need n >= 1".into()));
    }
    let s = s_closed(n);
    let u = if n % 2 == 1 {
        BigInt::from(n * (n + 1) / 2) * s_closed((n + 1) / 2)
    } else {
        BigInt::from((3 * n - 4) * n) * s_closed(n / 2) / BigInt::from(8)
    };
    // twice the bracket, so the 1/2 in front of the sum stays integral
    let mut twice = BigInt::from(2) * (&s + &u);
    for k in divisors(n) {
        if k == n {
            continue;
        }
        // [y^k] G = (9k^2 - 9k + 2) s_k / 2; the printed closed form has +1 here,
        // which already fails integrality at n = 2
        twice += BigInt::from(phi(n / k)) * BigInt::from(9 * k * k - 9 * k + 2) * s_closed(k);
    }
    let den = BigInt::from(4 * n);
    let (t, r) = twice.div_rem(&den);
    if !r.is_zero() {
        return Err(Error::Internal(format!("t_{} is not an integer", n)));
    }
    Ok(MapCounts { s, u, t })
}

// ─── series path ───

type Series = Vec<BigInt>;

fn mul(a: &Series, b: &Series, n: usize) -> Series {
    let mut c = vec![BigInt::zero(); n + 1];
    for (i, x) in a.iter().enumerate().take(n + 1) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(n + 1 - i) {
            c[i + j] += x * y;
        }
    }
    c
}

/// `1 / (1 - a)` for `a(0) = 0`.
fn geom(a: &Series, n: usize) -> Series {
    let mut q = vec![BigInt::zero(); n + 1];
    q[0] = BigInt::one();
    for d in 1..=n {
        let mut acc = BigInt::zero();
        for j in 1..=d {
            acc += &a[j] * &q[d - j];
        }
        q[d] = acc;
    }
    q
}

fn lin(a: &Series, ca: i64, c0: i64) -> Series {
    let mut r: Series = a.iter().map(|x| x * BigInt::from(ca)).collect();
    r[0] += BigInt::from(c0);
    r
}

/// `η̄ = y / (1 - η̄)^2`, up to degree `n`.
fn eta_bar(n: usize) -> Series {
    let mut e = vec![BigInt::zero(); n + 1];
    for _ in 0..=n {
        let g = geom(&e, n);
        let g2 = mul(&g, &g, n);
        let mut next = vec![BigInt::zero(); n + 1];
        for i in 0..n {
            next[i + 1] = g2[i].clone();
        }
        if next == e {
            break;
        }
        e = next;
    }
    e
}

/// `t_1..t_n` obtained from coefficient extraction on the series `S̄, G, P, Q`.
pub fn map_2conn_via_series(n: usize) -> Result<Vec<BigInt>> {
    let e = eta_bar(n);
    let sbar = mul(&e, &lin(&e, -3, 2), n);
    let inv = geom(&lin(&e, 3, 0), n);
    let g = mul(&lin(&e, 2, 0), &inv, n);
    let p = mul(&mul(&e, &lin(&e, -1, 3), n), &inv, n);
    let q = lin(&inv, 2, 0);
    let mut out = Vec::with_capacity(n);
    for k in 1..=n {
        let u = if k % 2 == 0 {
            &p[k / 2] - &g[k / 2]
        } else {
            q[(k - 1) / 2].clone()
        };
        let mut acc = &sbar[k] + u;
        for d in divisors(k as u64) {
            let d = d as usize;
            if d == k {
                continue;
            }
            acc += BigInt::from(phi((k / d) as u64)) * &g[d];
        }
        let den = BigInt::from(2 * k);
        let (t, r) = acc.div_rem(&den);
        if !r.is_zero() {
            return Err(Error::Internal(format!("series path: 2n t_n not divisible at n={}", k)));
        }
        out.push(t);
    }
    Ok(out)
}
