use alloc::format;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::zindex::numtheory::{divisors, phi};
use crate::zindex::Q;
use crate::{Error, Result};

/// `C(n, k)`, zero outside `0 <= k <= n`.
pub fn binomial(n: i64, k: i64) -> BigInt {
    if k < 0 || n < 0 || k > n {
        return BigInt::zero();
    }
    let k = core::cmp::min(k, n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

fn rat(a: BigInt, b: i64) -> Q {
    Q::new(a, BigInt::from(b))
}

fn integral(v: Q, what: &str) -> Result<BigInt> {
    if !v.is_integer() {
        return Err(Error::Internal(format!("{} is not an integer: {}", what, v)));
    }
    Ok(v.to_integer())
}

/// Number of unlabeled plane trees with `n + 1` vertices.
pub fn plane_tree_count(n: u64) -> Result<BigInt> {
    if n == 0 {
        return Err(Error::Usage("plane_tree_count needs n >= 1".into()));
    }
    let ni = n as i64;
    let mut acc = rat(binomial(2 * ni, ni), 2 * ni);
    let mut inner = Q::zero();
    for k in divisors(n) {
        if k == n {
            continue;
        }
        inner += rat(binomial(2 * k as i64, k as i64) * BigInt::from(phi(n / k)), 1);
    }
    acc += inner * rat(BigInt::from(ni + 1), 2 * ni);
    if n % 2 == 1 {
        let h = (ni - 1) / 2;
        acc += rat(binomial(2 * h, h), 1);
    }
    integral(acc / rat(BigInt::from(ni + 1), 1), "plane tree count")
}

/// Number of d-regular plane trees with `n` internal nodes.
pub fn d_regular_plane_tree_count(n: u64, d: u64) -> Result<BigInt> {
    if d < 3 {
        return Err(Error::Usage("d-regular plane trees need d >= 3".into()));
    }
    let (ni, di) = (n as i64, d as i64);
    let m = ni * (di - 2) + 2;
    let mut acc = rat(binomial(ni + m - 2, ni), m - 1);
    if m % 2 == 0 && ((m - 2) / 2) % (di - 2) == 0 {
        let np = (m - 2) / (2 * (di - 2));
        acc += rat(binomial(np + m / 2 - 1, np), 1);
    }
    for r in divisors(d) {
        let r = r as i64;
        if r == 1 || m % r != 0 || (m - di) % r != 0 {
            continue;
        }
        let q = (m - di) / r;
        if q < 0 || q % (di - 2) != 0 {
            continue;
        }
        let nr = q / (di - 2);
        acc += rat(binomial(nr + m / r - 1, nr) * BigInt::from(phi(r as u64)), 1);
    }
    integral(acc / rat(BigInt::from(m), 1), "d-regular plane tree count")
}
