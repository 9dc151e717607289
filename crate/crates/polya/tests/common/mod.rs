#![allow(dead_code)]

use polya::grammar::{parse, validate, TerminalSet, Validated};
use statrs::distribution::{ChiSquared, ContinuousCDF};

pub fn grammar(src: &str) -> Validated {
    validate(&parse(src).unwrap(), &TerminalSet::new()).unwrap()
}

pub const FREE_TREES: &str = "Fo = point(X) star Fp + Fsym
Fp = SET(R)
R = X * Fp
Fsym = sympoint(SET[2]) osub R + sympoint(SET) osub R star X
Ro = point(X) star Fp + point(SET) osub R star X
pointing Ro of R
root Fo";

/// Chi-square p-value of observed counts against expected probabilities.
/// Bins with expected count below 5 are pooled into one.
pub fn chi_square_p(observed: &[usize], probs: &[f64]) -> f64 {
    let n: usize = observed.iter().sum();
    let total: f64 = probs.iter().sum();
    let (mut stat, mut dof) = (0.0, 0usize);
    let (mut pool_o, mut pool_e) = (0.0, 0.0);
    for (o, p) in observed.iter().zip(probs) {
        let e = p / total * n as f64;
        if e < 5.0 {
            pool_o += *o as f64;
            pool_e += e;
        } else {
            stat += (*o as f64 - e).powi(2) / e;
            dof += 1;
        }
    }
    if pool_e > 0.0 {
        stat += (pool_o - pool_e).powi(2) / pool_e.max(1e-12);
        dof += 1;
    }
    if dof <= 1 {
        return 1.0;
    }
    1.0 - ChiSquared::new((dof - 1) as f64).unwrap().cdf(stat)
}
