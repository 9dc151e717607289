//! Floating point evaluation of grammar series at `x, x^2, ..., x^k`.
//!
//! Level `L` of a table holds every node's value at `s_i = x^(L i)` (and
//! `t_l = x^(L l)` for pointed nodes). Levels are solved from `k_max` down to 1;
//! anything past `k_max` is below `2^-bits` and read as the node's constant term.
//!
//! At each level the unpointed variables are found by Newton's method started at
//! zero, which increases monotonically to the smallest fixed point when one exists.
//! Pointed variables enter their equations linearly and are solved exactly per
//! strongly connected component.

mod basic;
mod singular;

pub use basic::{basic_pointed_value, basic_value};
pub use singular::{find_singularity, fit_singular_constants, Singularity, SingularFit};

pub(crate) use basic::{at, powi, set_k_values};

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::grammar::{BasicSpec, Core, NodeId, NodeKind, Sort, Validated};
use crate::zindex::PointMode;
use crate::{Error, Result};

pub const DEFAULT_PRECISION_BITS: u32 = 64;

/// Cap on the number of levels, reached only for `x` very close to 1.
pub const MAX_LEVELS: usize = 4096;

const MAX_NEWTON: usize = 400;
const BLOWUP: f64 = 1e12;

/// Argument of a substitution: a node, or `X` for bare basics and terminals.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Arg {
    X,
    Node(NodeId),
}

/// Oracle values for one grammar at one point.
#[derive(Clone, Debug)]
pub struct EvalTable {
    pub x: f64,
    pub k_max: usize,
    pub precision_bits: u32,
    /// `vals[L - 1][node]`.
    vals: Vec<Vec<f64>>,
    /// D-values `y A'(y)` at `y = x^L` of unpointed nodes; NaN where unavailable.
    dvals: Vec<Vec<f64>>,
    /// `vdvals[L - 1][var]`: D-value of an unpointed variable, NaN if unavailable.
    vdvals: Vec<Vec<f64>>,
    /// Constant terms, used past `k_max`.
    consts: Vec<f64>,
    rhs: Vec<NodeId>,
}

impl EvalTable {
    fn level_index(&self, level: usize) -> Option<usize> {
        if level >= 1 && level <= self.k_max {
            Some(level - 1)
        } else {
            None
        }
    }

    /// Value of a node at level `level >= 1`.
    pub fn value(&self, node: NodeId, level: usize) -> f64 {
        match self.level_index(level) {
            Some(i) => self.vals[i][node],
            None => self.consts[node],
        }
    }

    /// `y A'(y)` at `y = x^level` for an unpointed node.
    pub fn dvalue(&self, node: NodeId, level: usize) -> f64 {
        match self.level_index(level) {
            Some(i) => self.dvals[i][node],
            None => 0.0,
        }
    }

    pub fn arg_value(&self, arg: Arg, level: usize) -> f64 {
        match arg {
            Arg::X => x_pow(self.x, level, self.k_max),
            Arg::Node(n) => self.value(n, level),
        }
    }

    pub fn arg_dvalue(&self, arg: Arg, level: usize) -> f64 {
        match arg {
            Arg::X => x_pow(self.x, level, self.k_max),
            Arg::Node(n) => self.dvalue(n, level),
        }
    }

    /// Core parameters `b_i`, `q_i` for a substitution at `level`, `i = 1..=k_max/level`.
    pub fn core_params(&self, arg: Arg, level: usize) -> (Vec<f64>, Vec<f64>) {
        let n = self.k_max / level.max(1);
        let b = (1..=n).map(|i| self.arg_value(arg, level * i)).collect();
        let q = (1..=n).map(|i| self.arg_dvalue(arg, level * i)).collect();
        (b, q)
    }

    /// Value of a variable at level `level`.
    pub fn var_value(&self, var: usize, level: usize) -> f64 {
        self.value(self.rhs[var], level)
    }

    /// `y V'(y)` at `y = x^level` for an unpointed variable with a declared pointing
    /// or one that needed finite differences.
    pub fn var_dvalue(&self, var: usize, level: usize) -> f64 {
        match self.level_index(level) {
            Some(i) => self.vdvals[i][var],
            None => 0.0,
        }
    }

    /// Values of a variable at levels `1..=k_max`.
    pub fn var_values(&self, var: usize) -> Vec<f64> {
        (1..=self.k_max).map(|l| self.var_value(var, l)).collect()
    }

    /// Every stored value finite and nonnegative, and nonincreasing in the level.
    pub fn check_invariants(&self) -> Result<()> {
        for (v, &r) in self.rhs.iter().enumerate() {
            let mut prev = f64::INFINITY;
            for l in 1..=self.k_max {
                let y = self.value(r, l);
                if !(y.is_finite() && y >= 0.0) {
                    return Err(Error::Numeric(format!("variable {} level {}: {}", v, l, y)));
                }
                if y > prev * (1.0 + 1e-12) {
                    return Err(Error::Numeric(format!(
                        "variable {} increases from level {} to {}",
                        v,
                        l - 1,
                        l
                    )));
                }
                prev = y;
            }
        }
        Ok(())
    }
}

fn x_pow(x: f64, level: usize, k_max: usize) -> f64 {
    if level > k_max {
        0.0
    } else {
        powi(x, level as u32)
    }
}

/// Number of levels for `bits` of precision at `x`.
pub fn levels_for(x: f64, bits: u32) -> usize {
    if x <= 0.0 {
        return 0;
    }
    let l = -libm::log2(x);
    if l <= 0.0 {
        return MAX_LEVELS;
    }
    let k = libm::ceil(bits as f64 / l);
    if k >= MAX_LEVELS as f64 {
        MAX_LEVELS
    } else {
        (k as usize).max(1)
    }
}

#[derive(Clone, Debug)]
struct Dual {
    v: f64,
    d: Vec<f64>,
}

impl Dual {
    fn c(v: f64) -> Dual {
        Dual { v, d: Vec::new() }
    }

    fn add(&self, o: &Dual) -> Dual {
        let n = self.d.len().max(o.d.len());
        let d = (0..n)
            .map(|i| self.d.get(i).unwrap_or(&0.0) + o.d.get(i).unwrap_or(&0.0))
            .collect();
        Dual { v: self.v + o.v, d }
    }

    fn mul(&self, o: &Dual) -> Dual {
        let n = self.d.len().max(o.d.len());
        let d = (0..n)
            .map(|i| self.d.get(i).unwrap_or(&0.0) * o.v + self.v * o.d.get(i).unwrap_or(&0.0))
            .collect();
        Dual { v: self.v * o.v, d }
    }

    /// `f(self)` given `f` and `f'` at `self.v`.
    fn chain(&self, f: f64, df: f64) -> Dual {
        Dual { v: f, d: self.d.iter().map(|g| g * df).collect() }
    }
}

/// Where an evaluation happens: a stored level, or the constant-term pass.
#[derive(Clone, Copy)]
enum Lv {
    At(usize),
    Const,
}

struct Builder<'a> {
    g: &'a Validated,
    x: f64,
    k: usize,
    bits: u32,
    vals: Vec<Vec<f64>>,
    dvals: Vec<Vec<f64>>,
    consts: Vec<f64>,
    /// Finite-difference D-values of unpointed variables without a declared pointing.
    fd: Vec<Vec<f64>>,
    vdvals: Vec<Vec<f64>>,
    with_pointed: bool,
}

fn pointed_core(core: &Core) -> Core {
    match core {
        Core::Basic(b) => Core::Basic(BasicSpec { pointing: Some(PointMode::Circle), ..*b }),
        Core::Terminal { name, .. } => Core::Terminal { name: name.clone(), point: true },
    }
}

impl<'a> Builder<'a> {
    fn y(&self, lv: Lv) -> f64 {
        match lv {
            Lv::At(l) => powi(self.x, l as u32),
            Lv::Const => 0.0,
        }
    }

    fn stored(&self, node: NodeId, level: usize) -> f64 {
        if level <= self.k {
            self.vals[level - 1][node]
        } else {
            self.consts[node]
        }
    }

    fn stored_d(&self, node: NodeId, level: usize) -> f64 {
        if level <= self.k {
            self.dvals[level - 1][node]
        } else {
            0.0
        }
    }

    /// `b_i` for `i >= 2` from higher levels (0 in the constant pass).
    fn higher(&self, arg: Arg, lv: Lv, d: bool) -> Vec<f64> {
        match lv {
            Lv::Const => Vec::new(),
            Lv::At(l) => (2..=self.k / l)
                .map(|i| match arg {
                    Arg::X => powi(self.x, (l * i) as u32),
                    Arg::Node(n) if d => self.stored_d(n, l * i),
                    Arg::Node(n) => self.stored(n, l * i),
                })
                .collect(),
        }
    }

    fn params(&self, arg: Arg, lv: Lv, first: f64, d: bool) -> Vec<f64> {
        let mut b = vec![first];
        b.extend(self.higher(arg, lv, d));
        b
    }

    fn core_value(&self, core: &Core, b: &[f64]) -> Result<(f64, f64)> {
        match core {
            Core::Basic(s) => basic_value(s.kind, s.size, b),
            Core::Terminal { name, .. } => {
                let t = self.g.terminal(name)?;
                let f = |b1: f64| {
                    let s = |i: u32| if i == 1 { b1 } else { at(b, i) };
                    t.eval(None, &s, &|_| 0.0)
                };
                let b1 = at(b, 1);
                let v = f(b1);
                let h = 1e-7 * b1.max(1e-3);
                let d = if b1 > h { (f(b1 + h) - f(b1 - h)) / (2.0 * h) } else { (f(b1 + h) - v) / h };
                Ok((v, d))
            }
        }
    }

    fn core_pointed_value(&self, core: &Core, b: &[f64], q: &[f64]) -> Result<f64> {
        match core {
            Core::Basic(s) => match s.pointing {
                Some(m) => basic_pointed_value(s.kind, m, s.size, b, q),
                None => Err(Error::Internal("unpointed core in a pointed position".into())),
            },
            Core::Terminal { name, point } => {
                let t = self.g.terminal(name)?;
                let mode = if *point { Some(PointMode::Circle) } else { None };
                Ok(t.eval(mode, &|i| at(b, i), &|l| at(q, l)))
            }
        }
    }

    fn check(v: f64, what: &str) -> Result<f64> {
        if v.is_nan() {
            Err(Error::Numeric(format!("NaN in {}", what)))
        } else if !(v.is_finite() && v.abs() < BLOWUP) {
            Err(Error::Divergent(format!("{} is not finite", what)))
        } else {
            Ok(v)
        }
    }

    fn eval_u(&self, id: NodeId, lv: Lv, cur: &[Dual]) -> Result<Dual> {
        let g = &self.g.grammar;
        match &g.nodes[id].kind {
            NodeKind::Ref(n) => match self.g.var(n) {
                Some(v) => Ok(cur[v].clone()),
                None => self.core_dual(
                    &Core::Terminal { name: n.clone(), point: false },
                    Arg::X,
                    lv,
                    Dual::c(self.y(lv)),
                ),
            },
            NodeKind::Basic(b) => self.core_dual(&Core::Basic(*b), Arg::X, lv, Dual::c(self.y(lv))),
            NodeKind::Sum(a, b) => Ok(self.eval_u(*a, lv, cur)?.add(&self.eval_u(*b, lv, cur)?)),
            NodeKind::Prod(a, b) => Ok(self.eval_u(*a, lv, cur)?.mul(&self.eval_u(*b, lv, cur)?)),
            NodeKind::Subst(c, a) => {
                let b1 = self.eval_u(*a, lv, cur)?;
                self.core_dual(c, Arg::Node(*a), lv, b1)
            }
            _ => Err(Error::Internal("pointed node in unpointed evaluation".into())),
        }
    }

    fn core_dual(&self, core: &Core, arg: Arg, lv: Lv, b1: Dual) -> Result<Dual> {
        let b = self.params(arg, lv, b1.v, false);
        let (v, dv) = self.core_value(core, &b)?;
        Self::check(v, "substitution")?;
        Ok(b1.chain(v, dv))
    }

    /// Value of a pointed node given the pointed unknowns `p` (indexed by variable).
    fn eval_p(&self, id: NodeId, lv: Lv, uv: &[f64], p: &[f64]) -> Result<f64> {
        let g = &self.g.grammar;
        match &g.nodes[id].kind {
            NodeKind::Ref(n) => match self.g.var(n) {
                Some(v) => Ok(p[v]),
                None => self.core_p(&Core::Terminal { name: n.clone(), point: false }, Arg::X, lv, uv, p),
            },
            NodeKind::PointTerminal(n) => {
                self.core_p(&Core::Terminal { name: n.clone(), point: true }, Arg::X, lv, uv, p)
            }
            NodeKind::Basic(b) => self.core_p(&Core::Basic(*b), Arg::X, lv, uv, p),
            NodeKind::Sum(a, b) => Ok(self.eval_p(*a, lv, uv, p)? + self.eval_p(*b, lv, uv, p)?),
            NodeKind::PProd(a, b) => Ok(self.eval_p(*a, lv, uv, p)? * uv[*b]),
            NodeKind::PSubst(c, a) => self.core_p(c, Arg::Node(*a), lv, uv, p),
            _ => Err(Error::Internal("unpointed node in pointed evaluation".into())),
        }
    }

    fn core_p(&self, core: &Core, arg: Arg, lv: Lv, uv: &[f64], p: &[f64]) -> Result<f64> {
        let (b1, q1) = match arg {
            Arg::X => (self.y(lv), self.y(lv)),
            Arg::Node(a) => (uv[a], self.eval_d(a, lv, uv, p)?),
        };
        let b = self.params(arg, lv, b1, false);
        let q = self.params(arg, lv, q1, true);
        self.core_pointed_value(core, &b, &q)
    }

    /// D-value of an unpointed node.
    fn eval_d(&self, id: NodeId, lv: Lv, uv: &[f64], p: &[f64]) -> Result<f64> {
        let g = &self.g.grammar;
        match &g.nodes[id].kind {
            NodeKind::Ref(n) => match self.g.var(n) {
                Some(v) => match self.g.pointed_version[v] {
                    Some(pv) => Ok(p[pv]),
                    None => match lv {
                        Lv::Const => Ok(0.0),
                        Lv::At(l) => {
                            let d = self.fd[l - 1][v];
                            if d.is_nan() {
                                Err(Error::Internal(format!("no derivative values for {}", n)))
                            } else {
                                Ok(d)
                            }
                        }
                    },
                },
                None => self.core_p(&Core::Terminal { name: n.clone(), point: true }, Arg::X, lv, uv, p),
            },
            NodeKind::Basic(b) => self.core_p(&pointed_core(&Core::Basic(*b)), Arg::X, lv, uv, p),
            NodeKind::Sum(a, b) => Ok(self.eval_d(*a, lv, uv, p)? + self.eval_d(*b, lv, uv, p)?),
            NodeKind::Prod(a, b) => Ok(self.eval_d(*a, lv, uv, p)? * uv[*b]
                + uv[*a] * self.eval_d(*b, lv, uv, p)?),
            NodeKind::Subst(c, a) => self.core_p(&pointed_core(c), Arg::Node(*a), lv, uv, p),
            _ => Err(Error::Internal("pointed node in derivative evaluation".into())),
        }
    }

    fn unpointed_vars(&self) -> Vec<usize> {
        (0..self.g.vars.len()).filter(|&v| self.g.sorts[v] == Sort::Unpointed).collect()
    }

    fn pointed_vars(&self) -> Vec<usize> {
        (0..self.g.vars.len()).filter(|&v| self.g.sorts[v] == Sort::Pointed).collect()
    }

    /// Newton iteration for the unpointed variables at one level.
    fn solve_unpointed(&self, lv: Lv) -> Result<Vec<f64>> {
        let m = self.g.vars.len();
        let us = self.unpointed_vars();
        let n = us.len();
        let mut v = vec![0.0; m];
        let tol = libm::ldexp(1.0, -(self.bits as i32)).max(1e-15);
        let mut prev_step = f64::INFINITY;
        for _ in 0..MAX_NEWTON {
            let mut cur = vec![Dual::c(0.0); m];
            for (j, &u) in us.iter().enumerate() {
                let mut d = vec![0.0; n];
                d[j] = 1.0;
                cur[u] = Dual { v: v[u], d };
            }
            let mut f = Vec::with_capacity(n);
            for &u in &us {
                let r = self.eval_u(self.g.rhs[u], lv, &cur)?;
                Self::check(r.v, &self.g.vars[u])?;
                f.push(r);
            }
            let mut a = vec![vec![0.0; n]; n];
            let mut r = vec![0.0; n];
            for i in 0..n {
                r[i] = f[i].v - v[us[i]];
                for j in 0..n {
                    let jac = f[i].d.get(j).copied().unwrap_or(0.0);
                    a[i][j] = if i == j { 1.0 - jac } else { -jac };
                }
            }
            let inv = invert(&a).ok_or_else(|| {
                Error::Divergent("Jacobian became singular; the point is past the singularity".into())
            })?;
            let scale = inv.iter().flatten().fold(0.0f64, |s, x| s.max(x.abs()));
            if inv.iter().flatten().any(|&x| x < -1e-9 * scale.max(1.0)) {
                return Err(Error::Divergent(
                    "iteration left the monotone region; the point is past the singularity".into(),
                ));
            }
            let mut done = true;
            let mut max_step = 0.0f64;
            for i in 0..n {
                let step: f64 = (0..n).map(|j| inv[i][j] * r[j]).sum();
                let u = us[i];
                if step < -1e-9 * (v[u].abs() + 1e-300) && step.abs() > tol {
                    return Err(Error::Divergent("decreasing Newton step".into()));
                }
                let next = v[u] + step;
                let rel = step.abs() / next.abs().max(1e-300);
                max_step = max_step.max(rel);
                if rel > tol {
                    done = false;
                }
                v[u] = Self::check(next, &self.g.vars[u])?;
            }
            // near the singularity the Jacobian is ill-conditioned and roundoff
            // keeps the step above `tol`; stop once it no longer shrinks
            if done || (max_step < 1e-10 && max_step > 0.5 * prev_step) {
                return Ok(v);
            }
            prev_step = max_step;
        }
        Err(Error::Divergent(format!("no convergence within {} Newton steps", MAX_NEWTON)))
    }

    /// Unpointed node values at a level given the solved variables.
    fn unpointed_node_values(&self, lv: Lv, v: &[f64]) -> Result<Vec<f64>> {
        let cur: Vec<Dual> = v.iter().map(|&x| Dual::c(x)).collect();
        let mut out = vec![f64::NAN; self.g.grammar.nodes.len()];
        for (id, s) in self.g.node_sorts.iter().enumerate() {
            if *s == Sort::Unpointed {
                out[id] = self.eval_u(id, lv, &cur)?.v;
            }
        }
        Ok(out)
    }

    /// Pointed variables at a level, component by component.
    fn solve_pointed(&self, lv: Lv, uv: &[f64]) -> Result<Vec<f64>> {
        let m = self.g.vars.len();
        let ps = self.pointed_vars();
        let n = ps.len();
        let mut p = vec![0.0; m];
        if n == 0 {
            return Ok(p);
        }
        let eval_all = |p: &[f64]| -> Result<Vec<f64>> {
            ps.iter().map(|&v| self.eval_p(self.g.rhs[v], lv, uv, p)).collect()
        };
        let c = eval_all(&p)?;
        let mut mat = vec![vec![0.0; n]; n];
        for j in 0..n {
            let mut e = vec![0.0; m];
            e[ps[j]] = 1.0;
            let f = eval_all(&e)?;
            for i in 0..n {
                mat[i][j] = f[i] - c[i];
            }
        }
        for comp in sccs(&mat) {
            let mut rhs: Vec<f64> = comp.iter().map(|&i| c[i]).collect();
            let mut blocked = false;
            for (ri, &i) in comp.iter().enumerate() {
                for j in 0..n {
                    if !comp.contains(&j) && mat[i][j] != 0.0 {
                        let pj = p[ps[j]];
                        if !pj.is_finite() {
                            blocked = true;
                        }
                        rhs[ri] += mat[i][j] * pj;
                    }
                }
            }
            let sol = if blocked {
                None
            } else {
                let a: Vec<Vec<f64>> = comp
                    .iter()
                    .map(|&i| {
                        comp.iter()
                            .map(|&j| if i == j { 1.0 - mat[i][j] } else { -mat[i][j] })
                            .collect()
                    })
                    .collect();
                solve_linear(a, rhs).filter(|s| {
                    s.iter().all(|x| x.is_finite() && *x >= -1e-12 * (1.0 + x.abs()))
                })
            };
            for (ri, &i) in comp.iter().enumerate() {
                p[ps[i]] = match &sol {
                    Some(s) => s[ri].max(0.0),
                    None => f64::INFINITY,
                };
            }
        }
        Ok(p)
    }

    fn build_level(&mut self, lv: Lv) -> Result<()> {
        let v = self.solve_unpointed(lv)?;
        let uv = self.unpointed_node_values(lv, &v)?;
        let nn = self.g.grammar.nodes.len();
        let mut vals = uv.clone();
        let mut dv = vec![f64::NAN; nn];
        if self.with_pointed {
            let p = self.solve_pointed(lv, &uv)?;
            if let Lv::At(l) = lv {
                for v in self.unpointed_vars() {
                    self.vdvals[l - 1][v] = match self.g.pointed_version[v] {
                        Some(pv) => p[pv],
                        None => self.fd[l - 1][v],
                    };
                }
            }
            for id in 0..nn {
                match self.g.node_sorts[id] {
                    Sort::Pointed => vals[id] = self.eval_p(id, lv, &uv, &p).unwrap_or(f64::NAN),
                    Sort::Unpointed => dv[id] = self.eval_d(id, lv, &uv, &p).unwrap_or(f64::NAN),
                }
            }
        }
        match lv {
            Lv::Const => self.consts = vals,
            Lv::At(l) => {
                self.vals[l - 1] = vals;
                self.dvals[l - 1] = dv;
            }
        }
        Ok(())
    }
}

fn invert(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[piv][col].abs() < 1e-14 {
            return None;
        }
        m.swap(col, piv);
        let d = m[col][col];
        for x in m[col].iter_mut() {
            *x /= d;
        }
        for r in 0..n {
            if r != col {
                let f = m[r][col];
                if f != 0.0 {
                    for c in 0..2 * n {
                        let t = m[col][c];
                        m[r][c] -= f * t;
                    }
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

fn solve_linear(a: Vec<Vec<f64>>, b: Vec<f64>) -> Option<Vec<f64>> {
    let inv = invert(&a)?;
    Some(inv.iter().map(|row| row.iter().zip(&b).map(|(x, y)| x * y).sum()).collect())
}

/// Strongly connected components of the graph `i -> j` iff `m[i][j] != 0`,
/// dependencies first.
fn sccs(m: &[Vec<f64>]) -> Vec<Vec<usize>> {
    struct T<'a> {
        m: &'a [Vec<f64>],
        index: Vec<Option<usize>>,
        low: Vec<usize>,
        on: Vec<bool>,
        stack: Vec<usize>,
        next: usize,
        out: Vec<Vec<usize>>,
    }
    fn visit(t: &mut T, v: usize) {
        t.index[v] = Some(t.next);
        t.low[v] = t.next;
        t.next += 1;
        t.stack.push(v);
        t.on[v] = true;
        for w in 0..t.m.len() {
            if t.m[v][w] == 0.0 {
                continue;
            }
            match t.index[w] {
                None => {
                    visit(t, w);
                    t.low[v] = t.low[v].min(t.low[w]);
                }
                Some(iw) if t.on[w] => t.low[v] = t.low[v].min(iw),
                _ => {}
            }
        }
        if Some(t.low[v]) == t.index[v] {
            let mut comp = Vec::new();
            while let Some(w) = t.stack.pop() {
                t.on[w] = false;
                comp.push(w);
                if w == v {
                    break;
                }
            }
            comp.sort_unstable();
            t.out.push(comp);
        }
    }
    let n = m.len();
    let mut t = T {
        m,
        index: vec![None; n],
        low: vec![0; n],
        on: vec![false; n],
        stack: Vec::new(),
        next: 0,
        out: Vec::new(),
    };
    for v in 0..n {
        if t.index[v].is_none() {
            visit(&mut t, v);
        }
    }
    t.out
}

/// Unpointed variables that need finite-difference D-values: those reached from a
/// pointed substitution's argument without a declared pointed version.
fn fd_vars(g: &Validated) -> Vec<bool> {
    let mut need = vec![false; g.vars.len()];
    let mut seen = vec![false; g.grammar.nodes.len()];
    let mut stack: Vec<NodeId> = g
        .grammar
        .nodes
        .iter()
        .filter_map(|n| match &n.kind {
            NodeKind::PSubst(_, a) => Some(*a),
            _ => None,
        })
        .collect();
    while let Some(id) = stack.pop() {
        if core::mem::replace(&mut seen[id], true) {
            continue;
        }
        match &g.grammar.nodes[id].kind {
            NodeKind::Ref(n) => {
                if let Some(v) = g.var(n) {
                    if g.pointed_version[v].is_none() {
                        need[v] = true;
                    }
                }
            }
            NodeKind::Sum(a, b) | NodeKind::Prod(a, b) => {
                stack.push(*a);
                stack.push(*b);
            }
            NodeKind::Subst(_, a) => stack.push(*a),
            _ => {}
        }
    }
    need
}

fn unpointed_only(g: &Validated, x: f64, bits: u32) -> Result<EvalTable> {
    build(g, x, bits, false)
}

fn build(g: &Validated, x: f64, bits: u32, with_pointed: bool) -> Result<EvalTable> {
    if !(0.0..1.0).contains(&x) {
        return Err(Error::Divergent(format!("evaluation point {} is outside [0, 1)", x)));
    }
    let k = levels_for(x, bits);
    let nn = g.grammar.nodes.len();
    let m = g.vars.len();
    let mut b = Builder {
        g,
        x,
        k,
        bits,
        vals: vec![vec![f64::NAN; nn]; k],
        dvals: vec![vec![f64::NAN; nn]; k],
        consts: vec![0.0; nn],
        fd: vec![vec![f64::NAN; m]; k],
        vdvals: vec![vec![f64::NAN; m]; k],
        with_pointed,
    };
    b.build_level(Lv::Const)?;
    let need = if with_pointed { fd_vars(g) } else { vec![false; m] };
    for l in (1..=k).rev() {
        if need.iter().any(|&n| n) {
            let y = powi(x, l as u32);
            for v in (0..m).filter(|&v| need[v]) {
                b.fd[l - 1][v] = fd_derivative(g, v, y, bits)?;
            }
        }
        b.build_level(Lv::At(l))?;
    }
    Ok(EvalTable {
        x,
        k_max: k,
        precision_bits: bits,
        vals: b.vals,
        dvals: b.dvals,
        vdvals: b.vdvals,
        consts: b.consts,
        rhs: g.rhs.clone(),
    })
}

/// `y A'(y)` by finite differences of full re-solves.
fn fd_derivative(g: &Validated, var: usize, y: f64, bits: u32) -> Result<f64> {
    if y == 0.0 {
        return Ok(0.0);
    }
    let h = libm::ldexp(1.0, -(bits as i32) / 3);
    let val = |t: f64| -> Result<f64> { Ok(unpointed_only(g, t, bits)?.var_value(var, 1)) };
    match val(y * (1.0 + h)) {
        Ok(up) => Ok((up - val(y * (1.0 - h))?) / (2.0 * h)),
        Err(_) => {
            let (a0, a1, a2) = (val(y)?, val(y * (1.0 - h))?, val(y * (1.0 - 2.0 * h))?);
            Ok((3.0 * a0 - 4.0 * a1 + a2) / (2.0 * h))
        }
    }
}

/// Oracle table for all variables at `x`.
pub fn eval_system(g: &Validated, x: f64, precision_bits: u32) -> Result<EvalTable> {
    build(g, x, precision_bits, true)
}

/// Values of the unpointed variables only; cheaper, used for singularity search.
pub fn eval_unpointed(g: &Validated, x: f64, precision_bits: u32) -> Result<EvalTable> {
    unpointed_only(g, x, precision_bits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::{parse, validate, TerminalSet};

    fn grammar(src: &str) -> Validated {
        validate(&parse(src).unwrap(), &TerminalSet::new()).unwrap()
    }

    #[test]
    fn binary_trees_at_quarter() {
        let g = grammar("T = X + T * T");
        let t = eval_system(&g, 0.25, 64).unwrap();
        assert!((t.var_value(0, 1) - 0.5).abs() < 1e-6);
        let t = eval_system(&g, 0.2, 64).unwrap();
        let want = (1.0 - libm::sqrt(1.0 - 0.8)) / 2.0;
        assert!((t.var_value(0, 1) - want).abs() < 1e-14);
        assert!(eval_system(&g, 0.26, 64).is_err());
    }

    #[test]
    fn zero_gives_constants() {
        let g = grammar("A = SEQ(X * A) ");
        let t = eval_system(&g, 0.0, 64).unwrap();
        assert_eq!(t.k_max, 0);
        assert_eq!(t.var_value(0, 1), 1.0);
    }

    #[test]
    fn rooted_trees_match_series() {
        let g = grammar("R = X * SET(R)");
        let sys = crate::enumerate::solve(&g, 60).unwrap();
        let x = 0.2;
        let t = eval_system(&g, x, 64).unwrap();
        t.check_invariants().unwrap();
        let mut acc = 0.0;
        for n in (0..=60).rev() {
            acc = acc * x + num_traits::ToPrimitive::to_f64(&sys.ogs[0].coeffs[n]).unwrap();
        }
        assert!((t.var_value(0, 1) - acc).abs() < 1e-12 * acc);
    }

    #[test]
    fn pointed_values_are_derivatives() {
        let src = "Fo = point(X) star Fp + Fsym\nFp = SET(R)\nR = X * Fp\n\
                   Fsym = sympoint(SET[2]) osub R + sympoint(SET) osub R star X\n\
                   Ro = point(X) star Fp + point(SET) osub R star X\npointing Ro of R\nroot Fo";
        let g = grammar(src);
        let sys = crate::enumerate::solve(&g, 80).unwrap();
        let x = 0.25;
        let t = eval_system(&g, x, 64).unwrap();
        for var in ["Fo", "Ro", "R"] {
            let v = g.var(var).unwrap();
            let mut acc = 0.0;
            for n in (0..=80).rev() {
                acc = acc * x + num_traits::ToPrimitive::to_f64(&sys.ogs[v].coeffs[n]).unwrap();
            }
            let got = t.var_value(v, 1);
            assert!((got - acc).abs() < 1e-10 * acc, "{}: {} vs {}", var, got, acc);
        }
    }

    #[test]
    fn finite_difference_path_matches_pointed_path() {
        let with = "Fo = point(X) star Fp + Fsym\nFp = SET(R)\nR = X * Fp\n\
                    Fsym = sympoint(SET[2]) osub R + sympoint(SET) osub R star X\n\
                    Ro = point(X) star Fp + point(SET) osub R star X\npointing Ro of R\nroot Fo";
        let without = "Fo = point(X) star Fp + Fsym\nFp = SET(R)\nR = X * Fp\n\
                       Fsym = sympoint(SET[2]) osub R + sympoint(SET) osub R star X\nroot Fo";
        let (a, b) = (grammar(with), grammar(without));
        let ta = eval_system(&a, 0.3, 64).unwrap();
        let tb = eval_system(&b, 0.3, 64).unwrap();
        let (fa, fb) = (ta.var_value(0, 1), tb.var_value(0, 1));
        assert!((fa - fb).abs() < 1e-6 * fa, "{} vs {}", fa, fb);
        let (ra, rb) = (a.var("R").unwrap(), b.var("R").unwrap());
        for l in 1..=4 {
            let d1 = ta.var_dvalue(ra, l);
            let d2 = tb.var_dvalue(rb, l);
            assert!((d1 - d2).abs() < 1e-6 * d1, "level {}: {} vs {}", l, d1, d2);
        }
    }

    #[test]
    fn levels_cover_precision() {
        assert_eq!(levels_for(0.5, 64), 64);
        assert_eq!(levels_for(0.25, 64), 32);
        assert_eq!(levels_for(0.0, 64), 0);
    }
}
