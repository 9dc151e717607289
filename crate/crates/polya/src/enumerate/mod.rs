//! Coefficient tables for validated grammars and closed-form counters.

mod cis;
mod closed;
mod maps;
pub(crate) mod online;

pub use cis::{eval_rhs_cis, solve_cis};
pub use closed::{binomial, d_regular_plane_tree_count, plane_tree_count};
pub use maps::{map_2conn_counts, map_2conn_via_series, MapCounts};

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigInt;

use crate::grammar::Validated;
use crate::zindex::Ogs;
use crate::{Error, Result};

/// Ordinary generating series of every variable of a grammar, up to `trunc`.
#[derive(Clone, Debug)]
pub struct SolvedSystem {
    pub trunc: usize,
    pub vars: Vec<String>,
    pub ogs: Vec<Ogs>,
}

impl SolvedSystem {
    pub fn series(&self, var: &str) -> Result<&Ogs> {
        let i = self
            .vars
            .iter()
            .position(|v| v == var)
            .ok_or_else(|| Error::Usage(format!("no variable named {}", var)))?;
        Ok(&self.ogs[i])
    }

    /// `[x^n]` of a variable's OGS.
    pub fn count(&self, var: &str, n: usize) -> Result<BigInt> {
        if n > self.trunc {
            return Err(Error::Usage(format!(
                "size {} exceeds the truncation {}",
                n, self.trunc
            )));
        }
        Ok(self.series(var)?.coeffs[n].clone())
    }
}

/// Coefficients of all variables up to degree `trunc`.
///
/// Substitution cores are always basic species or terminals, so no variable ever
/// needs its full cycle index sum and the whole system is solved on ordinary
/// generating series.
pub fn solve(g: &Validated, trunc: usize) -> Result<SolvedSystem> {
    let prog = online::Program::compile(g, trunc)?;
    let table = online::run(&prog, &g.vars, trunc)?;
    let ogs = prog
        .var_rhs
        .iter()
        .map(|&r| Ogs { coeffs: table[r].clone() })
        .collect();
    Ok(SolvedSystem { trunc, vars: g.vars.clone(), ogs })
}
