//! Built-in grammars for trees, plane trees, cacti and outerplanar graphs.
//!
//! Every unrooted family is given by a cycle-pointed grammar whose root counts
//! `n` times the number of unlabeled structures of size `n`; [`FamilySpec::counts`]
//! divides that back out.

mod cacti;
mod canonical;
mod outerplanar;

pub use cacti::{cacti_b_series, CactiRooted, CactiSymmetric};
pub use canonical::{
    cactus_code, dihedral_min, plane_tree_code, rooted_code, shuffle_presentation, skeleton, Skeleton,
};
pub use outerplanar::{aux_series, f_coeffs, outerplanar_b_series, Aux, OuterplanarRooted, OuterplanarSymmetric};

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;

use num_bigint::BigInt;

use crate::enumerate::solve;
use crate::grammar::{parse, validate, Sort, TerminalSet, Validated};
use crate::sampler::Structure;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FamilyKind {
    RootedTrees,
    FreeTrees,
    OmegaTrees(BTreeSet<u32>),
    PlaneTrees,
    OmegaPlaneTrees(BTreeSet<u32>),
    DRegularPlaneTrees(u32),
    Cacti,
    Outerplanar,
}

/// What the size of a structure counts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SizeUnit {
    Vertices,
    Leaves,
}

/// A built-in family: its grammar plus what is known about it.
#[derive(Clone, Debug)]
pub struct FamilySpec {
    pub name: String,
    pub kind: FamilyKind,
    pub source: String,
    pub grammar: Validated,
    pub samplable: bool,
    pub unit: SizeUnit,
    /// Type of the dominant singularity of the counting series.
    pub singularity: &'static str,
}

/// Names accepted by [`family`], with their parameter syntax.
pub const FAMILY_NAMES: [&str; 8] = [
    "rooted_trees",
    "free_trees",
    "omega_trees(OMEGA)",
    "plane_trees",
    "omega_plane_trees(OMEGA)",
    "d_regular_plane_trees(D)",
    "cacti",
    "outerplanar",
];

const SQRT: &str = "square-root";
const POWER_3_2: &str = "square-root (n^{-5/2} unrooted)";

fn check_omega(omega: &BTreeSet<u32>) -> Result<()> {
    if !omega.contains(&1) {
        return Err(Error::Usage(String::from("the degree set must contain 1")));
    }
    if omega.contains(&0) {
        return Err(Error::Usage(String::from("degrees must be positive")));
    }
    Ok(())
}

fn sum(terms: impl IntoIterator<Item = String>) -> String {
    let v: Vec<String> = terms.into_iter().collect();
    if v.is_empty() { String::from("ZERO") } else { v.join(" + ") }
}

fn fixed(op: &str, k: u32, arg: &str) -> String {
    if k == 0 { String::from("ONE") } else { format!("{}[{}]({})", op, k, arg) }
}

pub fn rooted_trees_source() -> String {
    String::from("R = X * SET(R)\nroot R\n")
}

pub fn free_trees_source() -> String {
    String::from(
        "Fo = point(X) star Fp + Fsym\n\
         Fp = SET(R)\n\
         R = X * Fp\n\
         Fsym = sympoint(SET[2]) osub R + sympoint(SET) osub R star X\n\
         Ro = point(X) star Fp + point(SET) osub R star X\n\
         pointing Ro of R\n\
         root Fo\n",
    )
}

pub fn omega_trees_source(omega: &BTreeSet<u32>) -> Result<String> {
    check_omega(omega)?;
    let big = || omega.iter().copied().filter(|&k| k >= 2);
    let fp = sum(omega.iter().map(|&k| fixed("SET", k, "R")));
    let rc = sum(omega.iter().map(|&k| fixed("SET", k - 1, "R")));
    let mut fsym = vec_of("sympoint(SET[2]) osub R");
    fsym.extend(big().map(|k| format!("sympoint(SET[{}]) osub R star X", k)));
    let mut ro = vec_of("point(X) star Rc");
    ro.extend(big().map(|k| format!("point(SET[{}]) osub R star X", k - 1)));
    Ok(format!(
        "Fo = point(X) star Fp + Fsym\nFp = {}\nR = X * Rc\nRc = {}\nFsym = {}\nRo = {}\npointing Ro of R\nroot Fo\n",
        fp,
        rc,
        sum(fsym),
        sum(ro)
    ))
}

fn vec_of(s: &str) -> Vec<String> {
    alloc::vec![s.to_string()]
}

pub fn plane_trees_source() -> String {
    String::from(
        "Eo = point(X) star Ep + Esym\n\
         Ep = ONE + CYC(A)\n\
         A = X * SEQ(A)\n\
         Esym = sympoint(SET[2]) osub A + sympoint(CYC) osub A star X\n\
         Ao = point(X) star SEQ(A) + point(SEQ) osub A star X\n\
         pointing Ao of A\n\
         root Eo\n",
    )
}

pub fn omega_plane_trees_source(omega: &BTreeSet<u32>) -> Result<String> {
    check_omega(omega)?;
    let big = || omega.iter().copied().filter(|&k| k >= 2);
    let ep = sum(omega.iter().map(|&k| fixed("CYC", k, "A")));
    let as_ = sum(omega.iter().map(|&k| fixed("SEQ", k - 1, "A")));
    let mut esym = vec_of("sympoint(SET[2]) osub A");
    esym.extend(big().map(|k| format!("sympoint(CYC[{}]) osub A star X", k)));
    let mut ao = vec_of("point(X) star As");
    ao.extend(big().map(|k| format!("point(SEQ[{}]) osub A star X", k - 1)));
    Ok(format!(
        "Eo = point(X) star Ep + Esym\nEp = {}\nA = X * As\nAs = {}\nEsym = {}\nAo = {}\npointing Ao of A\nroot Eo\n",
        ep,
        as_,
        sum(esym),
        sum(ao)
    ))
}

/// Plane trees whose internal vertices all have degree `d`, counted by leaves.
pub fn d_regular_plane_trees_source(d: u32) -> Result<String> {
    if d < 3 {
        return Err(Error::Usage(format!("d-regular plane trees need d >= 3, got {}", d)));
    }
    Ok(format!(
        "Eo = point(X) star A + sympoint(SET[2]) osub A + sympoint(CYC[{d}]) osub A\n\
         A = X + SEQ[{e}](A)\n\
         Ao = point(X) + point(SEQ[{e}]) osub A\n\
         pointing Ao of A\n\
         root Eo\n",
        d = d,
        e = d - 1
    ))
}

/// Connected graphs whose blocks are given by the terminals `Bp` (rooted) and
/// `Bsym` (symmetrically cycle-pointed).
pub fn block_graphs_source() -> String {
    String::from(
        "terminal Bp\n\
         terminal Bsym pointed\n\
         Go = point(X) star Gp + Gsym\n\
         Gp = SET(K)\n\
         K = Bp o H\n\
         H = X * Gp\n\
         Gsym = Bsym osub H + sympoint(SET) osub K star X\n\
         Ho = point(X) star Gp + point(SET) osub K star X\n\
         Ko = point(Bp) osub H\n\
         pointing Ho of H\n\
         pointing Ko of K\n\
         root Go\n",
    )
}

pub fn cacti_terminals() -> TerminalSet {
    let mut t = TerminalSet::new();
    t.insert(String::from("Bp"), Arc::new(CactiRooted) as _);
    t.insert(String::from("Bsym"), Arc::new(CactiSymmetric) as _);
    t
}

pub fn outerplanar_terminals() -> TerminalSet {
    let mut t = TerminalSet::new();
    t.insert(String::from("Bp"), Arc::new(OuterplanarRooted) as _);
    t.insert(String::from("Bsym"), Arc::new(OuterplanarSymmetric) as _);
    t
}

/// Parse `{1,3}`, `1,3` or `1 3` into a degree set.
pub fn parse_omega(s: &str) -> Result<BTreeSet<u32>> {
    let inner = s.trim().trim_start_matches('{').trim_end_matches('}');
    let mut out = BTreeSet::new();
    for tok in inner.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()) {
        let k = tok.parse::<u32>().map_err(|_| Error::Usage(format!("bad degree '{}'", tok)))?;
        out.insert(k);
    }
    if out.is_empty() {
        return Err(Error::Usage(String::from("empty degree set")));
    }
    Ok(out)
}

fn omega_name(omega: &BTreeSet<u32>) -> String {
    let v: Vec<String> = omega.iter().map(|k| k.to_string()).collect();
    format!("{{{}}}", v.join(","))
}

/// Look up a family by name: `free_trees`, `omega_trees({1,3})`,
/// `d_regular_plane_trees(3)` and so on.
pub fn family(name: &str) -> Result<FamilySpec> {
    let name = name.trim();
    let (base, arg) = match name.find('(') {
        Some(i) if name.ends_with(')') => (&name[..i], Some(&name[i + 1..name.len() - 1])),
        Some(_) => return Err(Error::Usage(format!("unbalanced parameter in '{}'", name))),
        None => (name, None),
    };
    fn need<'a>(a: Option<&'a str>, base: &str) -> Result<&'a str> {
        a.ok_or_else(|| Error::Usage(format!("family {} needs a parameter", base)))
    }
    let none = |a: Option<&str>| match a {
        Some(_) => Err(Error::Usage(format!("family {} takes no parameter", base))),
        None => Ok(()),
    };
    let (kind, source, terminals) = match base {
        "rooted_trees" => {
            none(arg)?;
            (FamilyKind::RootedTrees, rooted_trees_source(), TerminalSet::new())
        }
        "free_trees" => {
            none(arg)?;
            (FamilyKind::FreeTrees, free_trees_source(), TerminalSet::new())
        }
        "omega_trees" => {
            let om = parse_omega(need(arg, base)?)?;
            let src = omega_trees_source(&om)?;
            (FamilyKind::OmegaTrees(om), src, TerminalSet::new())
        }
        "plane_trees" => {
            none(arg)?;
            (FamilyKind::PlaneTrees, plane_trees_source(), TerminalSet::new())
        }
        "omega_plane_trees" => {
            let om = parse_omega(need(arg, base)?)?;
            let src = omega_plane_trees_source(&om)?;
            (FamilyKind::OmegaPlaneTrees(om), src, TerminalSet::new())
        }
        "d_regular_plane_trees" => {
            let a = need(arg, base)?;
            let d = a.trim().parse::<u32>().map_err(|_| Error::Usage(format!("bad degree '{}'", a)))?;
            (FamilyKind::DRegularPlaneTrees(d), d_regular_plane_trees_source(d)?, TerminalSet::new())
        }
        "cacti" => {
            none(arg)?;
            (FamilyKind::Cacti, block_graphs_source(), cacti_terminals())
        }
        "outerplanar" => {
            none(arg)?;
            (FamilyKind::Outerplanar, block_graphs_source(), outerplanar_terminals())
        }
        _ => return Err(Error::Usage(format!("unknown family '{}'", name))),
    };
    let grammar = validate(&parse(&source)?, &terminals)?;
    let display = match &kind {
        FamilyKind::OmegaTrees(om) => format!("omega_trees({})", omega_name(om)),
        FamilyKind::OmegaPlaneTrees(om) => format!("omega_plane_trees({})", omega_name(om)),
        FamilyKind::DRegularPlaneTrees(d) => format!("d_regular_plane_trees({})", d),
        _ => String::from(base),
    };
    let samplable = kind != FamilyKind::Outerplanar;
    let unit = if matches!(kind, FamilyKind::DRegularPlaneTrees(_)) { SizeUnit::Leaves } else { SizeUnit::Vertices };
    let singularity = if kind == FamilyKind::RootedTrees { SQRT } else { POWER_3_2 };
    Ok(FamilySpec { name: display, kind, source, grammar, samplable, unit, singularity })
}

/// Every parameter-free family plus one representative of each parametrised one.
pub fn registry() -> Vec<FamilySpec> {
    [
        "rooted_trees",
        "free_trees",
        "omega_trees({1,3})",
        "plane_trees",
        "omega_plane_trees({1,3})",
        "d_regular_plane_trees(3)",
        "cacti",
        "outerplanar",
    ]
    .iter()
    .map(|n| family(n).expect("built-in family"))
    .collect()
}

impl FamilySpec {
    pub fn root(&self) -> usize {
        self.grammar.root
    }

    /// Whether the root variable is cycle-pointed (and so counts `n a_n`).
    pub fn pointed_root(&self) -> bool {
        self.grammar.sorts[self.grammar.root] == Sort::Pointed
    }

    /// Unlabeled counts `a_0..a_trunc` by size.
    pub fn counts(&self, trunc: usize) -> Result<Vec<BigInt>> {
        let sys = solve(&self.grammar, trunc)?;
        let ogs = &sys.ogs[self.grammar.root];
        Ok(if self.pointed_root() { ogs.unpoint()?.coeffs } else { ogs.coeffs.clone() })
    }

    pub fn count(&self, n: usize) -> Result<BigInt> {
        Ok(self.counts(n)?.swap_remove(n))
    }

    /// Size of a structure with `k` internal vertices, when it is determined by `k`.
    pub fn size_for_internal(&self, k: usize) -> Option<usize> {
        match &self.kind {
            FamilyKind::DRegularPlaneTrees(d) => Some(k * (*d as usize - 2) + 2),
            FamilyKind::OmegaTrees(om) | FamilyKind::OmegaPlaneTrees(om) if om.len() == 2 => {
                let d = *om.iter().max()? as usize;
                Some(k * (d - 1) + 2)
            }
            _ => None,
        }
    }

    fn implicit_vertices(&self) -> Vec<u32> {
        match self.kind {
            FamilyKind::DRegularPlaneTrees(_) => ["A", "Ao"]
                .iter()
                .filter_map(|n| self.grammar.var(n))
                .map(|i| i as u32)
                .collect(),
            _ => Vec::new(),
        }
    }

    /// Graph read back from a sampled structure.
    pub fn skeleton(&self, s: &Structure) -> Result<Skeleton> {
        skeleton(s, &self.implicit_vertices())
    }

    /// A string equal for two samples iff they are isomorphic.
    pub fn canonical_form(&self, s: &Structure) -> Result<String> {
        let sk = self.skeleton(s)?;
        match self.kind {
            FamilyKind::RootedTrees => {
                let r = sk.root.ok_or_else(|| Error::Usage(String::from("rooted tree without a root")))?;
                Ok(rooted_code(&sk, r))
            }
            FamilyKind::FreeTrees | FamilyKind::OmegaTrees(_) | FamilyKind::Cacti => Ok(cactus_code(&sk)),
            FamilyKind::PlaneTrees | FamilyKind::OmegaPlaneTrees(_) | FamilyKind::DRegularPlaneTrees(_) => {
                plane_tree_code(&sk)
            }
            FamilyKind::Outerplanar => Err(Error::Unsupported(String::from(
                "outerplanar structures are not sampled, so they have no canonical form",
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn counts(name: &str, n: usize) -> Vec<u64> {
        family(name).unwrap().counts(n).unwrap().iter().map(|c| c.to_u64().unwrap()).collect()
    }

    #[test]
    fn tree_counts() {
        assert_eq!(counts("rooted_trees", 8), [0, 1, 1, 2, 4, 9, 20, 48, 115]);
        assert_eq!(counts("free_trees", 10), [0, 1, 1, 1, 2, 3, 6, 11, 23, 47, 106]);
    }

    #[test]
    fn graph_counts() {
        assert_eq!(&counts("cacti", 7)[1..], [1, 1, 2, 4, 9, 23, 63]);
        assert_eq!(&counts("outerplanar", 7)[1..], [1, 1, 2, 5, 13, 46, 172]);
    }

    #[test]
    fn omega_needs_one() {
        assert!(matches!(family("omega_trees({2,3})"), Err(Error::Usage(_))));
        assert!(family("omega_trees({1,3})").is_ok());
    }
}
