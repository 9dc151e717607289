use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::{Core, NodeId, NodeKind, Sort, SpeciesGrammar, TerminalSet};
use crate::{Error, Result};

/// Probe degree for the well-foundedness check.
pub const PROBE_DEGREE: usize = 20;

/// A grammar that passed sort, admissibility and well-foundedness checks.
#[derive(Clone)]
pub struct Validated {
    pub grammar: SpeciesGrammar,
    /// Variable names in equation order; a variable's index is its id.
    pub vars: Vec<String>,
    pub sorts: Vec<Sort>,
    pub rhs: Vec<NodeId>,
    pub root: usize,
    /// For each pointed variable, the declared unpointed origin.
    pub origin: Vec<Option<usize>>,
    /// For each unpointed variable, the declared pointed version.
    pub pointed_version: Vec<Option<usize>>,
    /// Sort of every node of the arena.
    pub node_sorts: Vec<Sort>,
    pub terminals: TerminalSet,
}

impl core::fmt::Debug for Validated {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("Validated")
            .field("vars", &self.vars)
            .field("sorts", &self.sorts)
            .field("root", &self.root)
            .finish()
    }
}

impl Validated {
    pub fn var(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn var_or_err(&self, name: &str) -> Result<usize> {
        self.var(name)
            .ok_or_else(|| Error::Usage(format!("no variable named {}", name)))
    }

    pub fn root_name(&self) -> &str {
        &self.vars[self.root]
    }

    pub fn terminal(&self, name: &str) -> Result<&alloc::sync::Arc<dyn super::Terminal>> {
        self.terminals
            .get(name)
            .ok_or_else(|| Error::Sort(format!("terminal {} has no implementation", name)))
    }
}

fn at(g: &SpeciesGrammar, id: NodeId) -> String {
    let s = g.nodes[id].span;
    format!("{}:{}", s.line, s.col)
}

struct Ctx<'a> {
    g: &'a SpeciesGrammar,
    var_ids: BTreeMap<&'a str, usize>,
    term_pointed: BTreeMap<&'a str, bool>,
}

impl<'a> Ctx<'a> {
    /// Best-effort sort, `None` when it depends on a variable of unknown sort.
    fn infer(&self, id: NodeId, vs: &[Option<Sort>]) -> Option<Sort> {
        use NodeKind::*;
        match &self.g.nodes[id].kind {
            Ref(n) => match self.var_ids.get(n.as_str()) {
                Some(&v) => vs[v],
                None => self.term_pointed.get(n.as_str()).map(|&p| sort_of(p)),
            },
            Basic(b) => Some(sort_of(b.pointing.is_some())),
            PointTerminal(_) | PProd(..) | PSubst(..) => Some(Sort::Pointed),
            Prod(..) | Subst(..) => Some(Sort::Unpointed),
            Sum(a, b) => self.infer(*a, vs).or_else(|| self.infer(*b, vs)),
        }
    }

    fn check(&self, id: NodeId, vs: &[Sort], out: &mut [Sort]) -> Result<Sort> {
        use NodeKind::*;
        let g = self.g;
        let s = match &g.nodes[id].kind {
            Ref(n) => match self.var_ids.get(n.as_str()) {
                Some(&v) => vs[v],
                None => match self.term_pointed.get(n.as_str()) {
                    Some(&p) => sort_of(p),
                    None => {
                        return Err(Error::Sort(format!("{}: unknown name {}", at(g, id), n)))
                    }
                },
            },
            Basic(b) => sort_of(b.pointing.is_some()),
            PointTerminal(n) => {
                self.core_sort(&Core::Terminal { name: n.clone(), point: true }, id)?;
                Sort::Pointed
            }
            Sum(a, b) => {
                let sa = self.check(*a, vs, out)?;
                let sb = self.check(*b, vs, out)?;
                if sa != sb {
                    return Err(Error::Sort(format!(
                        "{}: sum of a pointed and an unpointed expression",
                        at(g, id)
                    )));
                }
                sa
            }
            Prod(a, b) => {
                let sa = self.check(*a, vs, out)?;
                let sb = self.check(*b, vs, out)?;
                if sa != Sort::Unpointed || sb != Sort::Unpointed {
                    return Err(Error::Sort(format!(
                        "{}: '*' needs unpointed operands (use 'star' with the pointed side on the left)",
                        at(g, id)
                    )));
                }
                Sort::Unpointed
            }
            PProd(a, b) => {
                let sa = self.check(*a, vs, out)?;
                let sb = self.check(*b, vs, out)?;
                if sa != Sort::Pointed || sb != Sort::Unpointed {
                    return Err(Error::Sort(format!(
                        "{}: 'star' needs a pointed left operand and an unpointed right operand",
                        at(g, id)
                    )));
                }
                Sort::Pointed
            }
            Subst(c, a) | PSubst(c, a) => {
                let pointed_op = matches!(g.nodes[id].kind, PSubst(..));
                let cs = self.core_sort(c, id)?;
                if (cs == Sort::Pointed) != pointed_op {
                    return Err(Error::Sort(format!(
                        "{}: {} needs a{} core",
                        at(g, id),
                        if pointed_op { "'osub'" } else { "'o'" },
                        if pointed_op { " pointed" } else { "n unpointed" }
                    )));
                }
                if self.check(*a, vs, out)? != Sort::Unpointed {
                    return Err(Error::Sort(format!(
                        "{}: substitution argument must be unpointed",
                        at(g, id)
                    )));
                }
                cs
            }
        };
        out[id] = s;
        Ok(s)
    }

    fn core_sort(&self, c: &Core, id: NodeId) -> Result<Sort> {
        match c {
            Core::Basic(b) => Ok(sort_of(b.pointing.is_some())),
            Core::Terminal { name, point } => {
                if self.var_ids.contains_key(name.as_str()) {
                    return Err(Error::Sort(format!(
                        "{}: {} is a variable; substitution cores must be basic species or terminals",
                        at(self.g, id),
                        name
                    )));
                }
                match self.term_pointed.get(name.as_str()) {
                    None => Err(Error::Sort(format!(
                        "{}: unknown terminal {}",
                        at(self.g, id),
                        name
                    ))),
                    Some(true) if *point => Err(Error::Sort(format!(
                        "{}: terminal {} is already pointed",
                        at(self.g, id),
                        name
                    ))),
                    Some(&p) => Ok(sort_of(p || *point)),
                }
            }
        }
    }
}

fn sort_of(pointed: bool) -> Sort {
    if pointed {
        Sort::Pointed
    } else {
        Sort::Unpointed
    }
}

/// Check a parsed grammar and bind its terminals.
///
/// Sorts are inferred and checked, substitution arguments must have no structure of
/// size 0, and coefficients must stabilize up to [`PROBE_DEGREE`].
pub fn validate(g: &SpeciesGrammar, impls: &TerminalSet) -> Result<Validated> {
    let mut var_ids = BTreeMap::new();
    for (i, e) in g.equations.iter().enumerate() {
        if var_ids.insert(e.var.as_str(), i).is_some() {
            return Err(Error::Sort(format!(
                "{}:{}: second equation for {}",
                e.span.line, e.span.col, e.var
            )));
        }
    }
    let mut term_pointed = BTreeMap::new();
    let mut terminals = TerminalSet::new();
    for t in &g.terminals {
        if var_ids.contains_key(t.name.as_str()) {
            return Err(Error::Sort(format!("{} is both a terminal and a variable", t.name)));
        }
        let imp = impls
            .get(&t.name)
            .ok_or_else(|| Error::Sort(format!("terminal {} has no implementation", t.name)))?;
        if imp.pointed() != t.pointed {
            return Err(Error::Sort(format!(
                "terminal {} declared {}pointed but its implementation is {}pointed",
                t.name,
                if t.pointed { "" } else { "un" },
                if imp.pointed() { "" } else { "un" }
            )));
        }
        term_pointed.insert(t.name.as_str(), t.pointed);
        terminals.insert(t.name.clone(), imp.clone());
    }
    let ctx = Ctx { g, var_ids, term_pointed };

    for e in &g.equations {
        if let NodeKind::Ref(n) = &g.nodes[e.rhs].kind {
            if ctx.var_ids.contains_key(n.as_str()) {
                return Err(Error::Sort(format!(
                    "{}:{}: degenerate equation {} = {} (a right-hand side needs a constructor)",
                    e.span.line, e.span.col, e.var, n
                )));
            }
        }
    }

    let m = g.equations.len();
    let mut vs: Vec<Option<Sort>> = vec![None; m];
    loop {
        let mut changed = false;
        for (i, e) in g.equations.iter().enumerate() {
            if vs[i].is_none() {
                if let Some(s) = ctx.infer(e.rhs, &vs) {
                    vs[i] = Some(s);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let mut sorts = Vec::with_capacity(m);
    for (i, s) in vs.iter().enumerate() {
        match s {
            Some(s) => sorts.push(*s),
            None => {
                return Err(Error::Sort(format!(
                    "cannot infer the sort of {}",
                    g.equations[i].var
                )))
            }
        }
    }
    let mut node_sorts = vec![Sort::Unpointed; g.nodes.len()];
    for (i, e) in g.equations.iter().enumerate() {
        let s = ctx.check(e.rhs, &sorts, &mut node_sorts)?;
        if s != sorts[i] {
            return Err(Error::Sort(format!("inconsistent sort for {}", e.var)));
        }
    }

    let mut origin = vec![None; m];
    let mut pointed_version = vec![None; m];
    for (p, o) in &g.pointings {
        let pi = *ctx
            .var_ids
            .get(p.as_str())
            .ok_or_else(|| Error::Sort(format!("pointing: unknown variable {}", p)))?;
        let oi = *ctx
            .var_ids
            .get(o.as_str())
            .ok_or_else(|| Error::Sort(format!("pointing: unknown variable {}", o)))?;
        if sorts[pi] != Sort::Pointed || sorts[oi] != Sort::Unpointed {
            return Err(Error::Sort(format!(
                "pointing {} of {}: the first must be pointed and the second unpointed",
                p, o
            )));
        }
        if origin[pi].is_some() || pointed_version[oi].is_some() {
            return Err(Error::Sort(format!("pointing {} of {} declared twice", p, o)));
        }
        origin[pi] = Some(oi);
        pointed_version[oi] = Some(pi);
    }

    let root_name = g.root_var().unwrap_or_default();
    let root = *ctx
        .var_ids
        .get(root_name)
        .ok_or_else(|| Error::Sort(format!("root {} is not a variable", root_name)))?;

    let v = Validated {
        grammar: g.clone(),
        vars: g.equations.iter().map(|e| e.var.clone()).collect(),
        sorts,
        rhs: g.equations.iter().map(|e| e.rhs).collect(),
        root,
        origin,
        pointed_version,
        node_sorts,
        terminals,
    };
    crate::enumerate::solve(&v, PROBE_DEGREE)?;
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    fn check(src: &str) -> Result<Validated> {
        validate(&parse(src)?, &TerminalSet::new())
    }

    #[test]
    fn rooted_trees_valid() {
        let v = check("R = X * SET(R)").unwrap();
        assert_eq!(v.sorts, [Sort::Unpointed]);
    }

    #[test]
    fn set_of_itself_inadmissible() {
        assert!(matches!(check("A = SET(A)"), Err(Error::Inadmissible(_))));
    }

    #[test]
    fn alias_is_degenerate() {
        assert!(matches!(check("A = A"), Err(Error::Sort(_))));
    }

    #[test]
    fn free_tree_grammar_valid() {
        let v = check(
            "Fo = point(X) star Fp + Fsym\nFp = SET(R)\nR = X * Fp\nFsym = sympoint(SET[2]) osub R + sympoint(SET) osub R star X\nroot Fo",
        )
        .unwrap();
        assert_eq!(v.root_name(), "Fo");
        assert_eq!(v.sorts[0], Sort::Pointed);
        assert_eq!(v.sorts[3], Sort::Pointed);
    }

    #[test]
    fn sort_violations() {
        assert!(matches!(check("A = point(X) * X"), Err(Error::Sort(_))));
        assert!(matches!(check("A = X star X"), Err(Error::Sort(_))));
        assert!(matches!(check("A = point(X) + X"), Err(Error::Sort(_))));
        assert!(matches!(check("A = SET o point(X)"), Err(Error::Sort(_))));
        assert!(matches!(check("A = point(SET) o X"), Err(Error::Sort(_))));
        assert!(matches!(check("A = SET osub X"), Err(Error::Sort(_))));
        assert!(matches!(check("A = X + B"), Err(Error::Sort(_))));
        assert!(matches!(check("B = X * X\nA = B o X"), Err(Error::Sort(_))));
    }

    #[test]
    fn unbounded_recursion_rejected() {
        assert!(matches!(check("A = X + A"), Err(Error::NotWellFounded(_))));
        assert!(matches!(check("A = X + A * ONE"), Err(Error::NotWellFounded(_))));
        assert!(matches!(check("A = ONE + A"), Err(Error::NotWellFounded(_))));
    }

    #[test]
    fn seq_with_constant_argument_inadmissible() {
        assert!(matches!(check("A = X * SEQ(B)\nB = ONE + X"), Err(Error::Inadmissible(_))));
    }
}
