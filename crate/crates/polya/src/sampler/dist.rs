//! Integer laws used by the basic samplers. All draws are by inversion.

use alloc::format;

use rand::{Rng, RngCore};

use crate::zindex::numtheory::gcd;
use crate::{Error, Result};

/// Tail mass below which a CDF walk stops.
const TAIL: f64 = 1.0 / 9007199254740992.0;

pub fn uniform(rng: &mut dyn RngCore) -> f64 {
    rng.random::<f64>()
}

pub fn bernoulli(p: f64, rng: &mut dyn RngCore) -> bool {
    uniform(rng) < p
}

/// Uniform integer in `0..n`.
pub fn below(n: u64, rng: &mut dyn RngCore) -> u64 {
    rng.random_range(0..n)
}

fn admissible(p: f64, what: &str) -> Result<()> {
    if (0.0..1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::Divergent(format!("{} parameter {} is outside [0, 1)", what, p)))
    }
}

/// `P(k) = p^k (1 - p)` for `k >= 0`.
pub fn geom(p: f64, rng: &mut dyn RngCore) -> Result<u64> {
    admissible(p, "Geom")?;
    if p == 0.0 {
        return Ok(0);
    }
    // 1 - u lies in (0, 1]
    let u = 1.0 - uniform(rng);
    let k = libm::floor(libm::log(u) / libm::log(p));
    Ok(if k >= u64::MAX as f64 { u64::MAX } else { k as u64 })
}

fn walk(mut pk: f64, start: u64, next: impl Fn(f64, u64) -> f64, u: f64, total: f64) -> u64 {
    let mut acc = pk;
    let mut k = start;
    while acc < u * total && total - acc > TAIL * total {
        pk = next(pk, k);
        k += 1;
        acc += pk;
    }
    k
}

/// Poisson law of mean `lambda`.
pub fn pois(lambda: f64, rng: &mut dyn RngCore) -> Result<u64> {
    if !(lambda >= 0.0 && lambda < 700.0) {
        return Err(Error::Numeric(format!("Poisson parameter {} out of range", lambda)));
    }
    if lambda == 0.0 {
        return Ok(0);
    }
    let u = uniform(rng);
    Ok(walk(libm::exp(-lambda), 0, |p, k| p * lambda / (k + 1) as f64, u, 1.0))
}

/// Poisson law conditioned on `k >= 1`.
pub fn pois_ge1(lambda: f64, rng: &mut dyn RngCore) -> Result<u64> {
    if !(lambda > 0.0 && lambda < 700.0) {
        return Err(Error::Numeric(format!("Poisson parameter {} out of range", lambda)));
    }
    let total = -libm::expm1(-lambda);
    let u = uniform(rng);
    Ok(walk(lambda * libm::exp(-lambda), 1, |p, k| p * lambda / (k + 1) as f64, u, total))
}

/// `P(k) = lambda^k / (k log(1/(1 - lambda)))` for `k >= 1`.
pub fn loga(lambda: f64, rng: &mut dyn RngCore) -> Result<u64> {
    admissible(lambda, "Loga")?;
    if lambda == 0.0 {
        return Ok(1);
    }
    let total = -libm::log1p(-lambda);
    let u = uniform(rng);
    Ok(walk(lambda, 1, |p, k| p * lambda * k as f64 / (k + 1) as f64, u, total))
}

/// Index drawn with probability proportional to `w[i]`.
pub fn categorical(w: &[f64], rng: &mut dyn RngCore) -> Result<usize> {
    let total: f64 = w.iter().sum();
    if !(total > 0.0 && total.is_finite()) {
        return Err(Error::Numeric(format!("categorical weights sum to {}", total)));
    }
    let u = uniform(rng) * total;
    let mut acc = 0.0;
    let mut last = 0;
    for (i, &x) in w.iter().enumerate() {
        if x > 0.0 {
            acc += x;
            last = i;
            if u < acc {
                return Ok(i);
            }
        }
    }
    Ok(last)
}

/// Uniform residue in `0..r` coprime to `r` (0 when `r = 1`).
pub fn coprime(r: u64, rng: &mut dyn RngCore) -> u64 {
    if r == 1 {
        return 0;
    }
    loop {
        let b = below(r, rng);
        if gcd(b, r) == 1 {
            return b;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn mean(n: usize, mut f: impl FnMut() -> u64) -> f64 {
        (0..n).map(|_| f() as f64).sum::<f64>() / n as f64
    }

    #[test]
    fn geom_zero_is_empty() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!((0..100).all(|_| geom(0.0, &mut rng).unwrap() == 0));
        assert!(geom(1.0, &mut rng).is_err());
    }

    #[test]
    fn means() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let m = mean(200_000, || geom(0.5, &mut rng).unwrap());
        assert!((m - 1.0).abs() < 0.02, "{}", m);
        let m = mean(200_000, || pois(1.0, &mut rng).unwrap());
        assert!((m - 1.0).abs() < 0.01, "{}", m);
        let l: f64 = 0.6;
        let want = l / (1.0 - libm::exp(-l));
        let m = mean(200_000, || pois_ge1(l, &mut rng).unwrap());
        assert!((m - want).abs() < 0.01, "{} vs {}", m, want);
        let want = l / ((1.0 - l) * -libm::log1p(-l));
        let m = mean(200_000, || loga(l, &mut rng).unwrap());
        assert!((m - want).abs() < 0.02, "{} vs {}", m, want);
    }

    #[test]
    fn loga_near_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!((0..1000).all(|_| loga(1e-12, &mut rng).unwrap() == 1));
    }

    #[test]
    fn coprime_residues() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let b = coprime(12, &mut rng);
            assert!([1, 5, 7, 11].contains(&b));
        }
        assert_eq!(coprime(1, &mut rng), 0);
    }

    #[test]
    fn categorical_skips_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        assert!((0..1000).all(|_| categorical(&[0.0, 1.0, 0.0], &mut rng).unwrap() == 1));
    }
}
