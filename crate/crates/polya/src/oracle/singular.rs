use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{eval_system, eval_unpointed, DEFAULT_PRECISION_BITS};
use crate::grammar::{Sort, Validated};
use crate::{Error, Result};

/// Dominant singularity of a grammar's unpointed system.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Singularity {
    pub rho: f64,
    /// Set when the system still converges at `1 - 1e-9`; `rho` is then 1.
    pub at_one: bool,
}

/// `A(x) ~ A0 - a sqrt(1 - x/rho)` near `rho`.
#[derive(Clone, Debug, PartialEq)]
pub struct SingularFit {
    pub rho: f64,
    pub a0: f64,
    pub a: f64,
    pub c: f64,
    /// Largest absolute residual of the least-squares fit.
    pub residual: f64,
    pub warning: Option<String>,
}

const TOL: f64 = 1e-12;
const EDGE: f64 = 1.0 - 1e-9;
const RESIDUAL_LIMIT: f64 = 1e-6;

fn converges(g: &Validated, x: f64) -> bool {
    eval_unpointed(g, x, DEFAULT_PRECISION_BITS).is_ok()
}

/// Radius of convergence by bisection on where the oracle converges.
pub fn find_singularity(g: &Validated) -> Result<Singularity> {
    if converges(g, EDGE) {
        return Ok(Singularity { rho: 1.0, at_one: true });
    }
    let (mut lo, mut hi) = (0.0, EDGE);
    while hi - lo > TOL {
        let mid = 0.5 * (lo + hi);
        if converges(g, mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if lo == 0.0 {
        return Err(Error::Divergent("the system diverges at every positive point".into()));
    }
    Ok(Singularity { rho: lo, at_one: false })
}

fn var_at(g: &Validated, var: usize, x: f64) -> Result<f64> {
    let t = if g.sorts[var] == Sort::Pointed {
        eval_system(g, x, DEFAULT_PRECISION_BITS)?
    } else {
        eval_unpointed(g, x, DEFAULT_PRECISION_BITS)?
    };
    let v = t.var_value(var, 1);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Divergent(format!("{} is infinite at {}", g.vars[var], x)))
    }
}

/// Least-squares fit on `1, d^(1/2), d, d^(3/2)` at `x = rho (1 - d)`,
/// `d` from `1e-2` down to `1e-6`.
pub fn fit_singular_constants(g: &Validated, var: usize, rho: f64) -> Result<SingularFit> {
    const POINTS: usize = 25;
    let mut rows: Vec<[f64; 4]> = Vec::with_capacity(POINTS);
    let mut ys = Vec::with_capacity(POINTS);
    for i in 0..POINTS {
        let d = libm::pow(10.0, -2.0 - 4.0 * i as f64 / (POINTS - 1) as f64);
        let s = libm::sqrt(d);
        rows.push([1.0, s, d, d * s]);
        ys.push(var_at(g, var, rho * (1.0 - d))?);
    }
    let mut ata = [[0.0; 4]; 4];
    let mut aty = [0.0; 4];
    for (r, y) in rows.iter().zip(&ys) {
        for i in 0..4 {
            aty[i] += r[i] * y;
            for j in 0..4 {
                ata[i][j] += r[i] * r[j];
            }
        }
    }
    let a: Vec<Vec<f64>> = ata.iter().map(|r| r.to_vec()).collect();
    let coef = super::solve_linear(a, aty.to_vec())
        .ok_or_else(|| Error::Numeric("singular fit: normal equations are singular".into()))?;
    let residual = rows
        .iter()
        .zip(&ys)
        .map(|(r, y)| libm::fabs(y - (0..4).map(|i| coef[i] * r[i]).sum::<f64>()))
        .fold(0.0, f64::max);
    let a = -coef[1];
    let mut warning = None;
    if residual > RESIDUAL_LIMIT * libm::fabs(coef[0]).max(1.0) {
        warning = Some(format!("fit residual {:.3e} is large; singularity may not be of square-root type", residual));
    } else if !(a > 0.0) {
        warning = Some(format!("square-root amplitude {:.3e} is not positive", a));
    }
    Ok(SingularFit {
        rho,
        a0: coef[0],
        a,
        c: a / (2.0 * libm::sqrt(core::f64::consts::PI)),
        residual,
        warning,
    })
}
