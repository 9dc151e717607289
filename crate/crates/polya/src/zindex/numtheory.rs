//! Small number-theoretic helpers shared by the series code and the samplers.

use alloc::vec::Vec;

/// Euler's totient.
pub fn phi(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut n = n;
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

/// Divisors of `n` in increasing order. `divisors(0)` is empty.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn totient_small() {
        let want = [0, 1, 1, 2, 2, 4, 2, 6, 4, 6, 4, 10, 4];
        for (n, &w) in want.iter().enumerate() {
            assert_eq!(phi(n as u64), w, "phi({})", n);
        }
    }

    #[test]
    fn divisor_sum_of_phi_is_identity() {
        for n in 1..200u64 {
            let s: u64 = divisors(n).iter().map(|&d| phi(d)).sum();
            assert_eq!(s, n);
        }
    }

    #[test]
    fn divisors_sorted() {
        assert_eq!(divisors(12), [1, 2, 3, 4, 6, 12]);
        assert_eq!(divisors(1), [1]);
        assert_eq!(divisors(49), [1, 7, 49]);
    }
}
