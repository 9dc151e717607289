//! Grammar interpreter: Boltzmann draws driven by an oracle table.
//!
//! `draw` samples an unpointed node, `pdraw` a pointed one, and `dpdraw` the
//! circle-pointed version of an unpointed node (needed inside pointed
//! substitutions). All three work at a level `L`, meaning parameters `x^L`.

use alloc::boxed::Box;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::RngCore;

use super::basic::{draw_basic, draw_basic_pointed};
use super::dist::bernoulli;
use super::structure::{
    compose_cycles, distribute_labels, distribute_labels_rooted, CoreDraw, RootedCSymmetry, Structure, Symmetry,
};
use crate::grammar::{BasicSpec, Core, NodeId, NodeKind, Sort, Validated};
use crate::oracle::{at, Arg, EvalTable};
use crate::zindex::{BasicKind, PointMode};
use crate::{Error, Result};

/// Output of a sampler run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sample {
    Plain(Symmetry),
    Pointed(RootedCSymmetry),
}

impl Sample {
    pub fn size(&self) -> usize {
        self.symmetry().size()
    }

    pub fn symmetry(&self) -> &Symmetry {
        match self {
            Sample::Plain(s) => s,
            Sample::Pointed(p) => &p.symmetry,
        }
    }

    pub fn structure(&self) -> &Structure {
        &self.symmetry().structure
    }

    /// Automorphism check, plus marked-cycle membership for pointed samples.
    pub fn is_valid(&self) -> bool {
        match self {
            Sample::Plain(s) => s.is_automorphism(),
            Sample::Pointed(p) => p.is_valid(),
        }
    }

    pub fn marked_cycle(&self) -> Option<&[u32]> {
        match self {
            Sample::Plain(_) => None,
            Sample::Pointed(p) => Some(p.marked_cycle()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SampleOptions {
    /// Relabel atoms by a uniform bijection onto `0..n` at the end.
    pub labeled: bool,
}

impl Default for SampleOptions {
    fn default() -> Self {
        SampleOptions { labeled: true }
    }
}

enum Fail {
    TooBig,
    E(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Fail {
        Fail::E(e)
    }
}

type R<T> = core::result::Result<T, Fail>;

struct Engine<'a> {
    g: &'a Validated,
    t: &'a EvalTable,
    rng: &'a mut dyn RngCore,
    next: u32,
    limit: usize,
}

fn pointed_core(core: &Core) -> Core {
    match core {
        Core::Basic(b) => Core::Basic(BasicSpec { pointing: Some(PointMode::Circle), ..*b }),
        Core::Terminal { name, .. } => Core::Terminal { name: name.clone(), point: true },
    }
}

fn is_plain_x(b: &BasicSpec) -> bool {
    b.kind == BasicKind::X && b.size.is_none()
}

fn no_weight(what: &str) -> Fail {
    Fail::E(Error::Numeric(format!("{}: branch weights are not usable", what)))
}

impl<'a> Engine<'a> {
    fn alloc(&mut self, n: usize) -> R<u32> {
        let start = self.next;
        let end = start as usize + n;
        if end > self.limit {
            return Err(Fail::TooBig);
        }
        self.next = end as u32;
        Ok(start)
    }

    fn atom(&mut self) -> R<Symmetry> {
        let a = self.alloc(1)?;
        Ok(Symmetry { structure: Structure::Atom(a), cycles: vec![vec![a]] })
    }

    fn choose(&mut self, wa: f64, wb: f64, what: &str) -> R<bool> {
        let total = wa + wb;
        if !(total > 0.0) || total.is_nan() || wa.is_nan() || wb.is_nan() {
            return Err(no_weight(what));
        }
        if wa.is_infinite() || wb.is_infinite() {
            return Err(Fail::E(Error::Divergent(format!("{}: infinite branch weight", what))));
        }
        Ok(bernoulli(wa / total, self.rng))
    }

    fn params(&self, arg: Arg, level: usize) -> (Vec<f64>, Vec<f64>) {
        self.t.core_params(arg, level)
    }

    fn core_draw(&mut self, core: &Core, b: &[f64], q: &[f64]) -> R<CoreDraw> {
        Ok(match core {
            Core::Basic(s) => match s.pointing {
                None => draw_basic(s.kind, s.size, b, self.rng)?,
                Some(m) => draw_basic_pointed(s.kind, m, s.size, b, q, self.rng)?,
            },
            Core::Terminal { name, point } => {
                let t = self.g.terminal(name)?.clone();
                let mode = if *point { Some(PointMode::Circle) } else { None };
                t.sample(mode, &|i| at(b, i), &|l| at(q, l), self.rng)?
            }
        })
    }

    /// `k` copies of a symmetry whose atoms are `start..self.next`, and the
    /// composed cycles (in the order of `s.cycles`).
    fn replicate(&mut self, s: Symmetry, start: u32, k: usize) -> R<(Vec<Structure>, Vec<Vec<u32>>)> {
        if k == 1 {
            return Ok((vec![s.structure], s.cycles));
        }
        let size = self.next - start;
        let mut bases = vec![start];
        for _ in 1..k {
            bases.push(self.alloc(size as usize)?);
        }
        let mut copies = Vec::with_capacity(k);
        for &base in &bases[1..] {
            let mut c = s.structure.clone();
            c.map_atoms(&|a| a - start + base);
            copies.push(c);
        }
        copies.insert(0, s.structure);
        let cycles = s
            .cycles
            .iter()
            .map(|cyc| {
                let per: Vec<Vec<u32>> =
                    bases.iter().map(|&base| cyc.iter().map(|&a| a - start + base).collect()).collect();
                compose_cycles(cyc.len(), &per)
            })
            .collect();
        Ok((copies, cycles))
    }

    fn draw_arg(&mut self, arg: Arg, level: usize) -> R<Symmetry> {
        match arg {
            Arg::X => self.atom(),
            Arg::Node(n) => self.draw(n, level),
        }
    }

    fn dpdraw_arg(&mut self, arg: Arg, level: usize) -> R<RootedCSymmetry> {
        match arg {
            Arg::X => {
                let s = self.atom()?;
                let root = s.cycles[0][0];
                Ok(RootedCSymmetry { symmetry: s, marked: 0, root })
            }
            Arg::Node(n) => self.dpdraw(n, level),
        }
    }

    fn subst(&mut self, core: &Core, arg: Arg, level: usize) -> R<Symmetry> {
        let (b, q) = self.params(arg, level);
        let cd = self.core_draw(core, &b, &q)?;
        self.fill(cd, arg, level, None).map(|(s, _)| s)
    }

    fn psubst(&mut self, core: &Core, arg: Arg, level: usize) -> R<RootedCSymmetry> {
        let (b, q) = self.params(arg, level);
        let cd = self.core_draw(core, &b, &q)?;
        let Some((mi, root)) = cd.marked else {
            return Err(Fail::E(Error::Internal("pointed core without a marked cycle".into())));
        };
        let (s, mark) = self.fill(cd, arg, level, Some((mi, root)))?;
        let (marked, root) = mark.ok_or(Fail::E(Error::Internal("marked cycle lost".into())))?;
        Ok(RootedCSymmetry { symmetry: s, marked, root })
    }

    /// Substitute argument draws into the core's slots, cycle by cycle.
    fn fill(
        &mut self,
        cd: CoreDraw,
        arg: Arg,
        level: usize,
        mark: Option<(usize, u32)>,
    ) -> R<(Symmetry, Option<(usize, u32)>)> {
        let mut parts: Vec<Option<Structure>> = vec![None; cd.slots()];
        let mut cycles = Vec::new();
        let mut out_mark = None;
        for (ci, cyc) in cd.cycles.iter().enumerate() {
            let k = cyc.len();
            let start = self.next;
            match mark {
                Some((mi, root)) if mi == ci => {
                    let r = cyc.iter().position(|&x| x == root).unwrap_or(0);
                    let cyc: Vec<u32> = cyc[r..].iter().chain(&cyc[..r]).copied().collect();
                    let p = self.dpdraw_arg(arg, level * k)?;
                    let (copies, composed) = self.replicate(p.symmetry, start, k)?;
                    for (slot, c) in cyc.iter().zip(copies) {
                        parts[*slot as usize] = Some(c);
                    }
                    let (joined, _, off) = join(core::mem::take(&mut cycles), composed);
                    cycles = joined;
                    out_mark = Some((off + p.marked, p.root));
                }
                _ => {
                    let s = self.draw_arg(arg, level * k)?;
                    let (copies, composed) = self.replicate(s, start, k)?;
                    for (slot, c) in cyc.iter().zip(copies) {
                        parts[*slot as usize] = Some(c);
                    }
                    let (joined, off, _) = join(core::mem::take(&mut cycles), composed);
                    cycles = joined;
                    if let Some((m, _)) = &mut out_mark {
                        *m += off;
                    }
                }
            }
        }
        let parts = parts
            .into_iter()
            .map(|p| p.ok_or(Fail::E(Error::Internal("core slot outside every cycle".into()))))
            .collect::<R<Vec<_>>>()?;
        let structure = match (&cd.structure, parts.len()) {
            (Structure::Atom(0), 1) => parts.into_iter().next().unwrap_or(Structure::Unit),
            _ => Structure::Substituted { core: Box::new(cd.structure), parts },
        };
        Ok((Symmetry { structure, cycles }, out_mark))
    }

    fn draw(&mut self, id: NodeId, level: usize) -> R<Symmetry> {
        let g = self.g;
        match &g.grammar.nodes[id].kind {
            NodeKind::Ref(n) => match g.var(n) {
                Some(v) => {
                    let s = self.draw(g.rhs[v], level)?;
                    Ok(Symmetry { structure: Structure::Var(v as u32, Box::new(s.structure)), cycles: s.cycles })
                }
                None => self.subst(&Core::Terminal { name: n.clone(), point: false }, Arg::X, level),
            },
            NodeKind::Basic(b) if is_plain_x(b) => self.atom(),
            NodeKind::Basic(b) => self.subst(&Core::Basic(*b), Arg::X, level),
            NodeKind::Sum(a, b) => {
                let left = self.choose(self.t.value(*a, level), self.t.value(*b, level), "sum")?;
                let (tag, n) = if left { (0, *a) } else { (1, *b) };
                let s = self.draw(n, level)?;
                Ok(Symmetry { structure: Structure::Tagged(tag, Box::new(s.structure)), cycles: s.cycles })
            }
            NodeKind::Prod(a, b) => {
                let sa = self.draw(*a, level)?;
                let sb = self.draw(*b, level)?;
                Ok(pair(sa, sb))
            }
            NodeKind::Subst(c, a) => self.subst(c, Arg::Node(*a), level),
            _ => Err(Fail::E(Error::Internal("pointed node in an unpointed draw".into()))),
        }
    }

    fn pdraw(&mut self, id: NodeId, level: usize) -> R<RootedCSymmetry> {
        let g = self.g;
        match &g.grammar.nodes[id].kind {
            NodeKind::Ref(n) => match g.var(n) {
                Some(v) => Ok(wrap_var(v, self.pdraw(g.rhs[v], level)?)),
                None => self.psubst(&Core::Terminal { name: n.clone(), point: false }, Arg::X, level),
            },
            NodeKind::PointTerminal(n) => {
                self.psubst(&Core::Terminal { name: n.clone(), point: true }, Arg::X, level)
            }
            NodeKind::Basic(b) => self.psubst(&Core::Basic(*b), Arg::X, level),
            NodeKind::Sum(a, b) => {
                let left = self.choose(self.t.value(*a, level), self.t.value(*b, level), "pointed sum")?;
                let (tag, n) = if left { (0, *a) } else { (1, *b) };
                let p = self.pdraw(n, level)?;
                Ok(tagged(tag, p))
            }
            NodeKind::PProd(a, b) => {
                let pa = self.pdraw(*a, level)?;
                let sb = self.draw(*b, level)?;
                Ok(ppair_left(pa, sb))
            }
            NodeKind::PSubst(c, a) => self.psubst(c, Arg::Node(*a), level),
            _ => Err(Fail::E(Error::Internal("unpointed node in a pointed draw".into()))),
        }
    }

    fn dpdraw(&mut self, id: NodeId, level: usize) -> R<RootedCSymmetry> {
        let g = self.g;
        match &g.grammar.nodes[id].kind {
            NodeKind::Ref(n) => match g.var(n) {
                Some(v) => match g.pointed_version[v] {
                    Some(pv) => Ok(wrap_var(pv, self.pdraw(g.rhs[pv], level)?)),
                    None => Err(Fail::E(Error::Unsupported(format!(
                        "sampling needs the pointed version of {}; declare it with 'pointing'",
                        n
                    )))),
                },
                None => self.psubst(&Core::Terminal { name: n.clone(), point: true }, Arg::X, level),
            },
            NodeKind::Basic(b) if is_plain_x(b) => self.dpdraw_arg(Arg::X, level),
            NodeKind::Basic(b) => self.psubst(&pointed_core(&Core::Basic(*b)), Arg::X, level),
            NodeKind::Sum(a, b) => {
                let left = self.choose(self.t.dvalue(*a, level), self.t.dvalue(*b, level), "derived sum")?;
                let (tag, n) = if left { (0, *a) } else { (1, *b) };
                let p = self.dpdraw(n, level)?;
                Ok(tagged(tag, p))
            }
            NodeKind::Prod(a, b) => {
                let (va, vb) = (self.t.value(*a, level), self.t.value(*b, level));
                let (da, db) = (self.t.dvalue(*a, level), self.t.dvalue(*b, level));
                if self.choose(da * vb, va * db, "derived product")? {
                    let pa = self.dpdraw(*a, level)?;
                    let sb = self.draw(*b, level)?;
                    Ok(ppair_left(pa, sb))
                } else {
                    let sa = self.draw(*a, level)?;
                    let pb = self.dpdraw(*b, level)?;
                    let (symmetry, _, off) = pair_at(sa, pb.symmetry);
                    Ok(RootedCSymmetry { symmetry, marked: off + pb.marked, root: pb.root })
                }
            }
            NodeKind::Subst(c, a) => self.psubst(&pointed_core(c), Arg::Node(*a), level),
            _ => Err(Fail::E(Error::Internal("pointed node in a derived draw".into()))),
        }
    }
}

/// Concatenation of two cycle lists, the shorter appended to the longer so that
/// nested draws stay linear overall. Returns the offsets of `a` and `b`.
fn join(mut a: Vec<Vec<u32>>, mut b: Vec<Vec<u32>>) -> (Vec<Vec<u32>>, usize, usize) {
    if a.len() >= b.len() {
        let off = a.len();
        a.append(&mut b);
        (a, 0, off)
    } else {
        let off = b.len();
        b.append(&mut a);
        (b, off, 0)
    }
}

fn pair_at(a: Symmetry, b: Symmetry) -> (Symmetry, usize, usize) {
    let (cycles, oa, ob) = join(a.cycles, b.cycles);
    let structure = Structure::Pair(Box::new(a.structure), Box::new(b.structure));
    (Symmetry { structure, cycles }, oa, ob)
}

fn pair(a: Symmetry, b: Symmetry) -> Symmetry {
    pair_at(a, b).0
}

fn ppair_left(a: RootedCSymmetry, b: Symmetry) -> RootedCSymmetry {
    let (symmetry, off, _) = pair_at(a.symmetry, b);
    RootedCSymmetry { symmetry, marked: off + a.marked, root: a.root }
}

fn tagged(tag: u8, p: RootedCSymmetry) -> RootedCSymmetry {
    let s = p.symmetry;
    RootedCSymmetry {
        symmetry: Symmetry { structure: Structure::Tagged(tag, Box::new(s.structure)), cycles: s.cycles },
        marked: p.marked,
        root: p.root,
    }
}

fn wrap_var(v: usize, p: RootedCSymmetry) -> RootedCSymmetry {
    let s = p.symmetry;
    RootedCSymmetry {
        symmetry: Symmetry { structure: Structure::Var(v as u32, Box::new(s.structure)), cycles: s.cycles },
        marked: p.marked,
        root: p.root,
    }
}

/// One run, aborted (`Ok(None)`) as soon as more than `limit` atoms exist.
pub fn sample_bounded(
    g: &Validated,
    t: &EvalTable,
    var: usize,
    limit: usize,
    opts: &SampleOptions,
    rng: &mut dyn RngCore,
) -> Result<Option<Sample>> {
    let mut e = Engine { g, t, rng, next: 0, limit };
    let out = if g.sorts[var] == Sort::Pointed {
        e.pdraw(g.rhs[var], 1).map(|p| Sample::Pointed(wrap_var(var, p)))
    } else {
        e.draw(g.rhs[var], 1).map(|s| {
            Sample::Plain(Symmetry { structure: Structure::Var(var as u32, Box::new(s.structure)), cycles: s.cycles })
        })
    };
    let mut s = match out {
        Ok(s) => s,
        Err(Fail::TooBig) => return Ok(None),
        Err(Fail::E(err)) => return Err(err),
    };
    if opts.labeled {
        let rng = e.rng;
        match &mut s {
            Sample::Plain(p) => distribute_labels(p, rng),
            Sample::Pointed(p) => distribute_labels_rooted(p, rng),
        }
    }
    Ok(Some(s))
}

/// Free Boltzmann sample of `var` at the table's point.
pub fn sample_boltzmann(
    g: &Validated,
    t: &EvalTable,
    var: usize,
    opts: &SampleOptions,
    rng: &mut dyn RngCore,
) -> Result<Sample> {
    sample_bounded(g, t, var, u32::MAX as usize, opts, rng)?
        .ok_or_else(|| Error::Numeric("sample exceeded the atom id range".into()))
}

/// Accepted sizes of a targeted run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Target {
    Exact(usize),
    /// Sizes within `n (1 - eps) ..= n (1 + eps)`.
    Approx { n: usize, eps: f64 },
}

impl Target {
    pub fn range(&self) -> (usize, usize) {
        match *self {
            Target::Exact(n) => (n, n),
            Target::Approx { n, eps } => {
                let lo = libm::ceil(n as f64 * (1.0 - eps)).max(0.0) as usize;
                let hi = libm::floor(n as f64 * (1.0 + eps)) as usize;
                (lo, hi)
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct Targeted {
    pub sample: Sample,
    pub attempts: u64,
}

/// Largest target for which the exact counts are checked before sampling.
pub const COUNT_CHECK_LIMIT: usize = 600;

/// Rejection sampling with early abort until the size falls in the target range.
///
/// `sizes_possible` tells whether any structure has a size in the range; when it is
/// `None` and the range ends below [`COUNT_CHECK_LIMIT`], the counts are computed here.
pub fn sample_targeted(
    g: &Validated,
    t: &EvalTable,
    var: usize,
    target: Target,
    max_attempts: u64,
    opts: &SampleOptions,
    rng: &mut dyn RngCore,
) -> Result<Targeted> {
    let (lo, hi) = target.range();
    if lo > hi {
        return Err(Error::ImpossibleTarget(format!("empty size range {}..={}", lo, hi)));
    }
    if hi <= COUNT_CHECK_LIMIT {
        let sys = crate::enumerate::solve(g, hi)?;
        let any = (lo..=hi).any(|n| !num_traits::Zero::is_zero(&sys.ogs[var].coeffs[n]));
        if !any {
            return Err(Error::ImpossibleTarget(format!(
                "{} has no structures of size in {}..={}",
                g.vars[var], lo, hi
            )));
        }
    }
    for attempts in 1..=max_attempts {
        if let Some(s) = sample_bounded(g, t, var, hi, opts, rng)? {
            if s.size() >= lo {
                return Ok(Targeted { sample: s, attempts });
            }
        }
    }
    Err(Error::Numeric(format!("no sample in {}..={} after {} attempts", lo, hi, max_attempts)))
}
