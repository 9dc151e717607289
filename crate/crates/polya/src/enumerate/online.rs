//! Degree-by-degree coefficient solver.
//!
//! The grammar is compiled into a DAG of series operations on ordinary generating
//! series. Coefficients are produced one degree at a time; within a degree the
//! contributions that only involve lower degrees are computed once and the rest is
//! iterated until the variables' degree-`d` coefficients stop changing.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::grammar::{BasicSpec, Core, NodeId, NodeKind, Validated};
use crate::zindex::numtheory::{divisors, phi};
use crate::zindex::{basic_series, BasicKind, CycleIndex, PointMode};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) enum Op {
    Const(Vec<BigInt>),
    Var(usize),
    Add(Vec<usize>),
    Mul(usize, usize),
    /// `A(x^k)`.
    Scale(u32, usize),
    /// `x A'(x)`.
    Deriv(usize),
    /// `1/(1 - A)`.
    Geometric(usize),
    /// `Σ_{l >= min} F(x^l)`.
    IndexSum(usize, u32),
    /// `Σ_{l >= min} φ(l) F(x^l)`.
    TotientSum(usize, u32),
    /// `E` with `x E' = S E` and `E(0) = 1`.
    ExpLog(usize),
    /// `a_n / n`.
    DivIndex(usize),
    /// `Σ w_i A_i / den`.
    LinComb(Vec<(BigInt, usize)>, BigInt),
    /// Substitution argument; must have zero constant term.
    Guard(usize),
}

pub(crate) struct Program {
    pub ops: Vec<Op>,
    pub var_rhs: Vec<usize>,
    memo: BTreeMap<Op, usize>,
    trunc: usize,
}

impl Program {
    fn push(&mut self, op: Op) -> usize {
        if let Some(&i) = self.memo.get(&op) {
            return i;
        }
        self.ops.push(op.clone());
        let i = self.ops.len() - 1;
        self.memo.insert(op, i);
        i
    }

    fn x(&mut self) -> usize {
        self.push(Op::Const(vec![BigInt::zero(), BigInt::one()]))
    }

    fn zero(&mut self) -> usize {
        self.push(Op::Const(Vec::new()))
    }

    fn mul(&mut self, a: usize, b: usize) -> usize {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        self.push(Op::Mul(a, b))
    }

    fn scale(&mut self, k: u32, a: usize) -> usize {
        if k == 1 {
            a
        } else {
            self.push(Op::Scale(k, a))
        }
    }

    fn set_of(&mut self, a: usize) -> usize {
        let d = self.push(Op::Deriv(a));
        let s = self.push(Op::IndexSum(d, 1));
        self.push(Op::ExpLog(s))
    }

    /// `Σ c_m m(A)` over the terms of `z`, with `s_i -> A(x^i)` and `t_l -> (xA')(x^l)`.
    fn lincomb(&mut self, z: &CycleIndex, a: usize) -> usize {
        let mut den = BigInt::one();
        for (_, c) in z.terms() {
            den = den.lcm(c.denom());
        }
        let da = self.push(Op::Deriv(a));
        let mut terms = Vec::new();
        for (m, c) in z.terms() {
            let w = c.numer() * (&den / c.denom());
            let mut factors = Vec::new();
            for &(i, e) in &m.s {
                let f = self.scale(i, a);
                for _ in 0..e {
                    factors.push(f);
                }
            }
            if let Some(l) = m.t {
                factors.push(self.scale(l, da));
            }
            let node = match factors.split_first() {
                None => self.push(Op::Const(vec![BigInt::one()])),
                Some((&first, rest)) => rest.iter().fold(first, |acc, &f| self.push(Op::Mul(acc, f))),
            };
            terms.push((w, node));
        }
        if terms.is_empty() {
            return self.zero();
        }
        self.push(Op::LinComb(terms, den))
    }

    fn basic_core(&mut self, b: &BasicSpec, a: usize) -> usize {
        let n = self.trunc;
        match (b.pointing, b.kind, b.size) {
            (_, BasicKind::Zero, _) => self.zero(),
            (None, BasicKind::One, _) => self.push(Op::Const(vec![BigInt::one()])),
            (Some(_), BasicKind::One, _) => self.zero(),
            (None, BasicKind::X, _) => a,
            (Some(PointMode::Circle), BasicKind::X, _) => self.push(Op::Deriv(a)),
            (Some(PointMode::Symm), BasicKind::X, _) => self.zero(),
            (None, BasicKind::Seq, None) => self.push(Op::Geometric(a)),
            (None, BasicKind::Set, None) => self.set_of(a),
            (None, BasicKind::Cyc, None) => {
                let d = self.push(Op::Deriv(a));
                let q = self.push(Op::Geometric(a));
                let dq = self.mul(d, q);
                let t = self.push(Op::TotientSum(dq, 1));
                self.push(Op::DivIndex(t))
            }
            (Some(PointMode::Circle), BasicKind::Seq, None) => {
                let d = self.push(Op::Deriv(a));
                let q = self.push(Op::Geometric(a));
                let q2 = self.mul(q, q);
                self.mul(d, q2)
            }
            (Some(PointMode::Symm), BasicKind::Seq, None) => self.zero(),
            (Some(p), BasicKind::Set, None) => {
                let d = self.push(Op::Deriv(a));
                let t = self.push(Op::IndexSum(d, p.min_len()));
                let s = self.set_of(a);
                self.mul(t, s)
            }
            (Some(p), BasicKind::Cyc, None) => {
                let d = self.push(Op::Deriv(a));
                let q = self.push(Op::Geometric(a));
                let dq = self.mul(d, q);
                self.push(Op::TotientSum(dq, p.min_len()))
            }
            (p, kind, Some(k)) => {
                let z = basic_series(kind, Some(k), n);
                let z = match p {
                    None => z,
                    Some(m) => z.delta_point(m.min_len()).expect("unpointed basic"),
                };
                self.lincomb(&z, a)
            }
        }
    }

    fn core(&mut self, v: &Validated, c: &Core, arg: usize) -> Result<usize> {
        let a = self.push(Op::Guard(arg));
        match c {
            Core::Basic(b) => Ok(self.basic_core(b, a)),
            Core::Terminal { name, point } => {
                let t = v.terminal(name)?;
                let mode = if *point { Some(PointMode::Circle) } else { None };
                let z = t.series(mode, self.trunc)?;
                Ok(self.lincomb(&z, a))
            }
        }
    }

    fn node(&mut self, v: &Validated, id: NodeId) -> Result<usize> {
        let g = &v.grammar;
        Ok(match &g.nodes[id].kind {
            NodeKind::Ref(name) => match v.var(name) {
                Some(i) => self.push(Op::Var(i)),
                None => {
                    let x = self.x();
                    self.core(v, &Core::Terminal { name: name.clone(), point: false }, x)?
                }
            },
            NodeKind::Basic(b) => {
                let x = self.x();
                self.core(v, &Core::Basic(*b), x)?
            }
            NodeKind::PointTerminal(name) => {
                let x = self.x();
                self.core(v, &Core::Terminal { name: name.clone(), point: true }, x)?
            }
            NodeKind::Sum(a, b) => {
                let a = self.node(v, *a)?;
                let b = self.node(v, *b)?;
                self.push(Op::Add(vec![a, b]))
            }
            NodeKind::Prod(a, b) | NodeKind::PProd(a, b) => {
                let a = self.node(v, *a)?;
                let b = self.node(v, *b)?;
                self.mul(a, b)
            }
            NodeKind::Subst(c, arg) | NodeKind::PSubst(c, arg) => {
                let a = self.node(v, *arg)?;
                self.core(v, c, a)?
            }
        })
    }

    pub fn compile(v: &Validated, trunc: usize) -> Result<Program> {
        let mut p = Program { ops: Vec::new(), var_rhs: Vec::new(), memo: BTreeMap::new(), trunc };
        for &rhs in &v.rhs {
            let r = p.node(v, rhs)?;
            p.var_rhs.push(r);
        }
        Ok(p)
    }
}

fn exact_div(a: BigInt, d: &BigInt, what: &str) -> Result<BigInt> {
    let (q, r) = a.div_rem(d);
    if !r.is_zero() {
        return Err(Error::Internal(format!("{}: {} is not divisible by {}", what, a, d)));
    }
    Ok(q)
}

/// Run the program up to degree `trunc`. Returns the coefficient table of every op.
pub(crate) fn run(p: &Program, vars: &[alloc::string::String], trunc: usize) -> Result<Vec<Vec<BigInt>>> {
    let n_ops = p.ops.len();
    let m = p.var_rhs.len();
    let mut c: Vec<Vec<BigInt>> = vec![Vec::with_capacity(trunc + 1); n_ops];
    let mut guess: Vec<Vec<BigInt>> = vec![Vec::with_capacity(trunc + 1); m];
    let mut fixed: Vec<BigInt> = vec![BigInt::zero(); n_ops];
    let max_rounds = 2 * m + 2;
    for d in 0..=trunc {
        for (i, op) in p.ops.iter().enumerate() {
            fixed[i] = fixed_part(op, i, &c, d);
        }
        for g in guess.iter_mut() {
            g.push(BigInt::zero());
        }
        for cc in c.iter_mut() {
            cc.push(BigInt::zero());
        }
        let mut stable = false;
        for _ in 0..max_rounds {
            for (i, op) in p.ops.iter().enumerate() {
                let val = full_value(op, &c, &guess, &fixed[i], d)?;
                c[i][d] = val;
            }
            let mut same = true;
            for v in 0..m {
                let new = &c[p.var_rhs[v]][d];
                if *new != guess[v][d] {
                    same = false;
                    guess[v][d] = new.clone();
                }
            }
            if same {
                stable = true;
                break;
            }
        }
        if !stable {
            let bad = (0..m)
                .find(|&v| c[p.var_rhs[v]][d] != guess[v][d])
                .map_or("?", |v| vars[v].as_str());
            return Err(Error::NotWellFounded(format!(
                "coefficient of x^{} in {} does not stabilize",
                d, bad
            )));
        }
    }
    Ok(c)
}

fn get(c: &[Vec<BigInt>], i: usize, k: usize) -> &BigInt {
    &c[i][k]
}

/// Contribution from degrees strictly below `d`.
fn fixed_part(op: &Op, me: usize, c: &[Vec<BigInt>], d: usize) -> BigInt {
    let mut acc = BigInt::zero();
    match op {
        Op::Mul(a, b) => {
            for j in 1..d {
                let x = get(c, *a, j);
                if x.is_zero() {
                    continue;
                }
                acc += x * get(c, *b, d - j);
            }
        }
        Op::Scale(k, a) => {
            let k = *k as usize;
            if d % k == 0 && d > 0 {
                acc = get(c, *a, d / k).clone();
            }
        }
        Op::Geometric(a) | Op::ExpLog(a) => {
            // Σ_{j=1}^{d-1} a_j X_{d-j}, X being this op
            for j in 1..d {
                let x = get(c, *a, j);
                if x.is_zero() {
                    continue;
                }
                acc += x * get(c, me, d - j);
            }
        }
        Op::IndexSum(f, min) | Op::TotientSum(f, min) => {
            if d > 0 {
                for l in divisors(d as u64) {
                    if l < 2 || (l as u32) < *min {
                        continue;
                    }
                    let w = if matches!(op, Op::TotientSum(..)) { phi(l) } else { 1 };
                    acc += get(c, *f, d / l as usize) * BigInt::from(w);
                }
            }
        }
        _ => {}
    }
    acc
}

fn full_value(
    op: &Op,
    c: &[Vec<BigInt>],
    guess: &[Vec<BigInt>],
    fixed: &BigInt,
    d: usize,
) -> Result<BigInt> {
    Ok(match op {
        Op::Const(v) => v.get(d).cloned().unwrap_or_else(BigInt::zero),
        Op::Var(v) => guess[*v][d].clone(),
        Op::Add(xs) => xs.iter().map(|&x| get(c, x, d)).sum(),
        Op::Mul(a, b) => {
            if d == 0 {
                get(c, *a, 0) * get(c, *b, 0)
            } else {
                fixed + get(c, *a, 0) * get(c, *b, d) + get(c, *a, d) * get(c, *b, 0)
            }
        }
        Op::Scale(k, a) => {
            if d == 0 {
                get(c, *a, 0).clone()
            } else if *k == 1 {
                get(c, *a, d).clone()
            } else {
                fixed.clone()
            }
        }
        Op::Deriv(a) => get(c, *a, d) * BigInt::from(d),
        Op::Guard(a) => {
            let v = get(c, *a, d);
            if d == 0 && !v.is_zero() {
                return Err(Error::Inadmissible(alloc::string::String::from(
                    "a substitution argument contains structures of size 0",
                )));
            }
            v.clone()
        }
        Op::Geometric(a) | Op::ExpLog(a) => {
            // X_d = Σ_{j=1}^{d} a_j X_{d-j}, divided by d for ExpLog; X_0 = 1
            if d == 0 {
                if matches!(op, Op::Geometric(_)) && !get(c, *a, 0).is_zero() {
                    return Err(Error::Inadmissible(alloc::string::String::from(
                        "sequence argument has a nonzero constant term",
                    )));
                }
                BigInt::one()
            } else if matches!(op, Op::Geometric(_)) {
                fixed + get(c, *a, d)
            } else {
                exact_div(fixed + get(c, *a, d), &BigInt::from(d), "set coefficient")?
            }
        }
        Op::IndexSum(f, min) | Op::TotientSum(f, min) => {
            if d == 0 {
                BigInt::zero()
            } else if *min <= 1 {
                fixed + get(c, *f, d)
            } else {
                fixed.clone()
            }
        }
        Op::DivIndex(a) => {
            let v = get(c, *a, d);
            if d == 0 {
                if !v.is_zero() {
                    return Err(Error::Internal(alloc::string::String::from(
                        "cycle series with nonzero constant term",
                    )));
                }
                BigInt::zero()
            } else {
                exact_div(v.clone(), &BigInt::from(d), "cycle coefficient")?
            }
        }
        Op::LinComb(terms, den) => {
            let mut acc = BigInt::zero();
            for (w, x) in terms {
                let v = get(c, *x, d);
                if !v.is_zero() {
                    acc += w * v;
                }
            }
            exact_div(acc, den, "core coefficient")?
        }
    })
}
