use alloc::format;
use alloc::string::String;
use core::fmt::Write as _;

use super::{BasicSpec, Core, NodeId, NodeKind, SpeciesGrammar};
use crate::zindex::PointMode;

fn basic(b: &BasicSpec) -> String {
    let mut s = String::from(b.kind.name());
    if let Some(k) = b.size {
        let _ = write!(s, "[{}]", k);
    }
    match b.pointing {
        None => s,
        Some(PointMode::Circle) => format!("point({})", s),
        Some(PointMode::Symm) => format!("sympoint({})", s),
    }
}

fn core(c: &Core) -> String {
    match c {
        Core::Basic(b) => basic(b),
        Core::Terminal { name, point: false } => name.clone(),
        Core::Terminal { name, point: true } => format!("point({})", name),
    }
}

// Binding levels: 0 sum, 1 product, 2 substitution, 3 primary.
fn level(k: &NodeKind) -> u8 {
    match k {
        NodeKind::Sum(..) => 0,
        NodeKind::Prod(..) | NodeKind::PProd(..) => 1,
        NodeKind::Subst(..) | NodeKind::PSubst(..) => 2,
        _ => 3,
    }
}

fn expr(g: &SpeciesGrammar, id: NodeId, min: u8, out: &mut String) {
    let k = &g.nodes[id].kind;
    let paren = level(k) < min;
    if paren {
        out.push('(');
    }
    match k {
        NodeKind::Ref(n) => out.push_str(n),
        NodeKind::Basic(b) => out.push_str(&basic(b)),
        NodeKind::PointTerminal(n) => {
            let _ = write!(out, "point({})", n);
        }
        NodeKind::Sum(a, b) => {
            expr(g, *a, 0, out);
            out.push_str(" + ");
            expr(g, *b, 1, out);
        }
        NodeKind::Prod(a, b) | NodeKind::PProd(a, b) => {
            expr(g, *a, 1, out);
            out.push_str(if matches!(k, NodeKind::Prod(..)) { " * " } else { " star " });
            expr(g, *b, 2, out);
        }
        NodeKind::Subst(c, a) | NodeKind::PSubst(c, a) => {
            out.push_str(&core(c));
            out.push_str(if matches!(k, NodeKind::Subst(..)) { " o " } else { " osub " });
            expr(g, *a, 2, out);
        }
    }
    if paren {
        out.push(')');
    }
}

/// Render a grammar in the concrete syntax accepted by [`super::parse`].
pub fn print(g: &SpeciesGrammar) -> String {
    let mut out = String::new();
    for t in &g.terminals {
        let _ = writeln!(out, "terminal {}{}", t.name, if t.pointed { " pointed" } else { "" });
    }
    for (p, o) in &g.pointings {
        let _ = writeln!(out, "pointing {} of {}", p, o);
    }
    for e in &g.equations {
        let _ = write!(out, "{} = ", e.var);
        expr(g, e.rhs, 0, &mut out);
        out.push('\n');
    }
    if let Some(r) = &g.root {
        let _ = writeln!(out, "root {}", r);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    #[test]
    fn round_trip_examples() {
        for src in [
            "R = X * SET(R)",
            "T = X + T * T",
            "A = X + (A + A) * (X * A)",
            "Fo = point(X) star Fp + Fsym\nFp = SET(R)\nR = X * Fp\nFsym = sympoint(SET[2]) osub R + sympoint(SET) osub R star X\nroot Fo",
            "terminal B\nterminal S pointed\nA = B o (X * SET(A)) + S osub A\nP = point(B) osub A star (A + X)",
            "A = SET[3] o CYC o SEQ[2] o X",
        ] {
            let g = parse(src).unwrap();
            let printed = print(&g);
            let h = parse(&printed).unwrap();
            assert!(g.same_shape(&h), "{}\n---\n{}", src, printed);
        }
    }
}
