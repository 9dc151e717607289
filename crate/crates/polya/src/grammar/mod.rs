//! Specification language for recursive and cycle-pointed recursive species.
//!
//! A specification is a list of lines:
//!
//! ```text
//! # rooted nonplane trees
//! R = X * SET(R)
//! root R
//! ```
//!
//! Other directives are `terminal NAME [pointed]`, which declares an externally
//! supplied species, and `pointing VP of V`, which records that the pointed variable
//! `VP` specifies the cycle-pointed version of `V`.
//!
//! Operators, loosest first: `+`; then `*` and `star` (left associative); then
//! `o` and `osub` (substitution, right associative, the left side must be a basic
//! species or a terminal). Primaries are `X`, `ONE`, `ZERO`, `SEQ`, `SET`, `CYC`
//! with an optional `[k]`, `SET(arg)` as sugar for `SET o arg`, `point(E)` and
//! `sympoint(E)` for pointed basics or terminals, variable names and parenthesized
//! expressions.

mod parse;
mod print;
mod validate;

pub use parse::parse;
pub use print::print;
pub use validate::{validate, Validated};

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use rand::RngCore;

use crate::sampler::CoreDraw;
use crate::zindex::{BasicKind, CycleIndex, PointMode};
use crate::{Error, Result};

/// Index of a node in [`SpeciesGrammar::nodes`].
pub type NodeId = usize;

/// 1-based line and column of a token.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Span {
    pub line: usize,
    pub col: usize,
}

/// A basic species with an optional size constraint and pointing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct BasicSpec {
    pub kind: BasicKind,
    pub size: Option<u32>,
    pub pointing: Option<PointMode>,
}

/// Left side of a substitution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Core {
    Basic(BasicSpec),
    /// A declared terminal; `point` applies the circle pointing to an unpointed one.
    Terminal { name: String, point: bool },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NodeKind {
    /// Variable reference, or a terminal used bare (meaning `T o X`).
    Ref(String),
    /// Basic species used bare (meaning `B o X`).
    Basic(BasicSpec),
    /// `point(T)` used bare.
    PointTerminal(String),
    Sum(NodeId, NodeId),
    Prod(NodeId, NodeId),
    /// Pointed product `a star b`, `a` pointed and `b` unpointed.
    PProd(NodeId, NodeId),
    Subst(Core, NodeId),
    /// Pointed substitution `core osub arg` with a pointed core.
    PSubst(Core, NodeId),
}

#[derive(Clone, Debug)]
pub struct Node {
    pub kind: NodeKind,
    pub span: Span,
}

#[derive(Clone, Debug)]
pub struct Equation {
    pub var: String,
    pub rhs: NodeId,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TerminalDecl {
    pub name: String,
    pub pointed: bool,
}

/// Parsed (not yet validated) specification.
#[derive(Clone, Debug, Default)]
pub struct SpeciesGrammar {
    pub nodes: Vec<Node>,
    pub equations: Vec<Equation>,
    pub terminals: Vec<TerminalDecl>,
    /// `(pointed variable, origin variable)` pairs.
    pub pointings: Vec<(String, String)>,
    pub root: Option<String>,
}

impl SpeciesGrammar {
    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn push(&mut self, kind: NodeKind, span: Span) -> NodeId {
        self.nodes.push(Node { kind, span });
        self.nodes.len() - 1
    }

    /// Root variable: the `root` directive, else the first equation.
    pub fn root_var(&self) -> Option<&str> {
        self.root
            .as_deref()
            .or_else(|| self.equations.first().map(|e| e.var.as_str()))
    }

    /// Structural equality of the two ASTs, ignoring spans and node numbering.
    pub fn same_shape(&self, other: &SpeciesGrammar) -> bool {
        if self.terminals != other.terminals
            || self.pointings != other.pointings
            || self.root_var() != other.root_var()
            || self.equations.len() != other.equations.len()
        {
            return false;
        }
        self.equations.iter().zip(&other.equations).all(|(a, b)| {
            a.var == b.var && node_eq(self, a.rhs, other, b.rhs)
        })
    }
}

fn node_eq(g: &SpeciesGrammar, a: NodeId, h: &SpeciesGrammar, b: NodeId) -> bool {
    use NodeKind::*;
    match (&g.nodes[a].kind, &h.nodes[b].kind) {
        (Ref(x), Ref(y)) | (PointTerminal(x), PointTerminal(y)) => x == y,
        (Basic(x), Basic(y)) => x == y,
        (Sum(a1, a2), Sum(b1, b2))
        | (Prod(a1, a2), Prod(b1, b2))
        | (PProd(a1, a2), PProd(b1, b2)) => node_eq(g, *a1, h, *b1) && node_eq(g, *a2, h, *b2),
        (Subst(c1, a1), Subst(c2, b1)) | (PSubst(c1, a1), PSubst(c2, b1)) => {
            c1 == c2 && node_eq(g, *a1, h, *b1)
        }
        _ => false,
    }
}

/// An externally supplied species used as a substitution core.
///
/// `pointing` is `None` for the species' own series (pointed or not, per
/// [`Terminal::pointed`]) and `Some(mode)` for the pointing of an unpointed terminal.
pub trait Terminal: Send + Sync {
    fn name(&self) -> &str;

    /// Whether the declared species itself is cycle-pointed.
    fn pointed(&self) -> bool;

    /// Cycle index series truncated at `trunc`.
    fn series(&self, pointing: Option<PointMode>, trunc: usize) -> Result<CycleIndex> {
        let z = self.base_series(trunc);
        match pointing {
            None => Ok(z),
            Some(m) if !self.pointed() => z.delta_point(m.min_len()),
            Some(_) => Err(Error::Sort(alloc::format!(
                "terminal {} is already pointed",
                self.name()
            ))),
        }
    }

    /// Cycle index series of the declared species.
    fn base_series(&self, trunc: usize) -> CycleIndex;

    /// Value at `s_i = s(i)`, `t_l = t(l)`.
    fn eval(&self, pointing: Option<PointMode>, s: &dyn Fn(u32) -> f64, t: &dyn Fn(u32) -> f64) -> f64;

    fn samplable(&self) -> bool {
        false
    }

    /// Draw a core symmetry with weights given by the series at `s_i = b(i)`, `t_l = q(l)`.
    fn sample(
        &self,
        pointing: Option<PointMode>,
        b: &dyn Fn(u32) -> f64,
        q: &dyn Fn(u32) -> f64,
        rng: &mut dyn RngCore,
    ) -> Result<CoreDraw> {
        let _ = (pointing, b, q, rng);
        Err(Error::Unsupported(alloc::format!(
            "terminal {} has no sampler",
            self.name()
        )))
    }
}

/// Terminal implementations keyed by name.
pub type TerminalSet = alloc::collections::BTreeMap<String, Arc<dyn Terminal>>;

/// Sort of a variable or expression.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sort {
    Unpointed,
    Pointed,
}
