//! Full cycle index sums of grammar variables, by Kleene iteration.
//!
//! Much slower than the coefficient solver; used for small truncations to check
//! residuals and cross-check the coefficient tables.

use alloc::format;
use alloc::vec::Vec;

use crate::grammar::{Core, NodeId, NodeKind, Validated};
use crate::zindex::{basic_pointed_series, basic_series, CycleIndex, PointMode};
use crate::{Error, Result};

fn core_series(g: &Validated, c: &Core, n: usize) -> Result<CycleIndex> {
    match c {
        Core::Basic(b) => match b.pointing {
            None => Ok(basic_series(b.kind, b.size, n)),
            Some(m) => basic_pointed_series(b.kind, m, b.size, n),
        },
        Core::Terminal { name, point } => {
            let mode = if *point { Some(PointMode::Circle) } else { None };
            g.terminal(name)?.series(mode, n)
        }
    }
}

fn apply(g: &Validated, c: &Core, arg: &CycleIndex) -> Result<CycleIndex> {
    let z = core_series(g, c, arg.trunc())?;
    if z.is_pointed() {
        z.pointed_plethysm(arg)
    } else {
        z.plethysm(arg)
    }
}

fn expr(g: &Validated, id: NodeId, vals: &[CycleIndex], n: usize) -> Result<CycleIndex> {
    let x = CycleIndex::s(1, n);
    Ok(match &g.grammar.nodes[id].kind {
        NodeKind::Ref(name) => match g.var(name) {
            Some(i) => vals[i].clone(),
            None => apply(g, &Core::Terminal { name: name.clone(), point: false }, &x)?,
        },
        NodeKind::Basic(b) => apply(g, &Core::Basic(*b), &x)?,
        NodeKind::PointTerminal(name) => {
            apply(g, &Core::Terminal { name: name.clone(), point: true }, &x)?
        }
        NodeKind::Sum(a, b) => expr(g, *a, vals, n)?.add(&expr(g, *b, vals, n)?)?,
        NodeKind::Prod(a, b) | NodeKind::PProd(a, b) => {
            expr(g, *a, vals, n)?.mul(&expr(g, *b, vals, n)?)?
        }
        NodeKind::Subst(c, a) | NodeKind::PSubst(c, a) => apply(g, c, &expr(g, *a, vals, n)?)?,
    })
}

/// Right-hand sides of all equations evaluated at the given variable series.
pub fn eval_rhs_cis(g: &Validated, vals: &[CycleIndex]) -> Result<Vec<CycleIndex>> {
    let n = vals.first().map_or(0, |v| v.trunc());
    g.rhs.iter().map(|&r| expr(g, r, vals, n)).collect()
}

/// Cycle index sums of all variables up to weighted degree `trunc`.
pub fn solve_cis(g: &Validated, trunc: usize) -> Result<Vec<CycleIndex>> {
    let m = g.vars.len();
    let mut vals: Vec<CycleIndex> = g
        .sorts
        .iter()
        .map(|s| CycleIndex::zero(trunc, *s == crate::grammar::Sort::Pointed))
        .collect();
    let max_rounds = 2 * m * (trunc + 1) + 2;
    for _ in 0..max_rounds {
        let next = eval_rhs_cis(g, &vals)?;
        if next == vals {
            return Ok(vals);
        }
        vals = next;
    }
    Err(Error::Internal(format!(
        "cycle index iteration did not converge in {} rounds",
        max_rounds
    )))
}
