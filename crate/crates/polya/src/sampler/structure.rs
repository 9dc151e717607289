//! Structure terms, symmetries and rooted c-symmetries.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use rand::seq::SliceRandom;
use rand::RngCore;

/// Ordering discipline of a collection's children.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CollKind {
    /// Linear order.
    Seq,
    /// No order.
    Set,
    /// Cyclic order up to rotation.
    Cyc,
    /// Cyclic order up to rotation and reflection.
    Polygon,
    /// Linear order up to reversal.
    RootedPolygon,
}

impl CollKind {
    pub fn name(self) -> &'static str {
        match self {
            CollKind::Seq => "seq",
            CollKind::Set => "set",
            CollKind::Cyc => "cyc",
            CollKind::Polygon => "polygon",
            CollKind::RootedPolygon => "rooted_polygon",
        }
    }
}

/// A structure term. Atom ids are global within one sample.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Structure {
    Atom(u32),
    Unit,
    /// Branch of a sum; 0 is the left operand.
    Tagged(u8, Box<Structure>),
    Pair(Box<Structure>, Box<Structure>),
    Collection(CollKind, Vec<Structure>),
    /// `core` holds slot atoms `0..parts.len()`; slot `i` is replaced by `parts[i]`.
    Substituted { core: Box<Structure>, parts: Vec<Structure> },
    /// Derivation of a grammar variable (index into the grammar's variables).
    Var(u32, Box<Structure>),
}

impl Structure {
    /// Number of atoms, counting substituted parts instead of core slots.
    pub fn size(&self) -> usize {
        let mut n = 0;
        self.for_each_atom(&mut |_| n += 1);
        n
    }

    /// Visit every atom (core slots excluded) in term order.
    pub fn for_each_atom(&self, f: &mut dyn FnMut(u32)) {
        match self {
            Structure::Atom(a) => f(*a),
            Structure::Unit => {}
            Structure::Tagged(_, c) | Structure::Var(_, c) => c.for_each_atom(f),
            Structure::Pair(a, b) => {
                a.for_each_atom(f);
                b.for_each_atom(f);
            }
            Structure::Collection(_, cs) => cs.iter().for_each(|c| c.for_each_atom(f)),
            Structure::Substituted { parts, .. } => parts.iter().for_each(|c| c.for_each_atom(f)),
        }
    }

    pub fn atoms(&self) -> Vec<u32> {
        let mut v = Vec::new();
        self.for_each_atom(&mut |a| v.push(a));
        v
    }

    /// Rename atoms through `f`; core slots are left alone.
    pub fn map_atoms(&mut self, f: &dyn Fn(u32) -> u32) {
        match self {
            Structure::Atom(a) => *a = f(*a),
            Structure::Unit => {}
            Structure::Tagged(_, c) | Structure::Var(_, c) => c.map_atoms(f),
            Structure::Pair(a, b) => {
                a.map_atoms(f);
                b.map_atoms(f);
            }
            Structure::Collection(_, cs) => cs.iter_mut().for_each(|c| c.map_atoms(f)),
            Structure::Substituted { parts, .. } => parts.iter_mut().for_each(|c| c.map_atoms(f)),
        }
    }

    /// Canonical encoding of the labeled structure with atoms renamed by `f`.
    ///
    /// Two terms encode equally iff they are the same labeled structure, so
    /// `encode(σ) == encode(id)` decides whether `σ` is an automorphism.
    pub fn encode(&self, f: &dyn Fn(u32) -> u32) -> String {
        enc(self, None, f)
    }

    /// Substitutions inlined: every core slot replaced by its part.
    pub fn inlined(&self) -> Structure {
        inline(self, None)
    }

    /// Nested JSON-like rendering used by the CLI.
    pub fn render(&self) -> String {
        let mut out = String::new();
        render(&self.inlined(), &mut out);
        out
    }
}

fn enc(s: &Structure, parts: Option<&[Structure]>, f: &dyn Fn(u32) -> u32) -> String {
    match s {
        Structure::Atom(a) => match parts {
            Some(p) => enc(&p[*a as usize], None, f),
            None => format!("a{}", f(*a)),
        },
        Structure::Unit => "1".into(),
        Structure::Tagged(t, c) => format!("T{}({})", t, enc(c, parts, f)),
        Structure::Var(v, c) => format!("V{}({})", v, enc(c, parts, f)),
        Structure::Pair(a, b) => format!("P({},{})", enc(a, parts, f), enc(b, parts, f)),
        Structure::Collection(k, cs) => {
            let items: Vec<String> = cs.iter().map(|c| enc(c, parts, f)).collect();
            let tag = match k {
                CollKind::Seq => 'Q',
                CollKind::Set => 'S',
                CollKind::Cyc => 'C',
                CollKind::Polygon => 'G',
                CollKind::RootedPolygon => 'R',
            };
            format!("{}[{}]", tag, normal_order(*k, items).join(","))
        }
        Structure::Substituted { core, parts: p } => enc(core, Some(p), f),
    }
}

/// Children reordered to the representative of their equivalence class.
pub(crate) fn normal_order<T: Ord + Clone>(kind: CollKind, mut items: Vec<T>) -> Vec<T> {
    match kind {
        CollKind::Seq => items,
        CollKind::Set => {
            items.sort();
            items
        }
        CollKind::Cyc => min_rotation(&items),
        CollKind::Polygon => {
            let a = min_rotation(&items);
            items.reverse();
            let b = min_rotation(&items);
            core::cmp::min(a, b)
        }
        CollKind::RootedPolygon => {
            let mut r = items.clone();
            r.reverse();
            core::cmp::min(items, r)
        }
    }
}

pub(crate) fn min_rotation<T: Ord + Clone>(items: &[T]) -> Vec<T> {
    let n = items.len();
    let mut best: Option<Vec<T>> = None;
    for r in 0..n {
        let cand: Vec<T> = items[r..].iter().chain(&items[..r]).cloned().collect();
        if best.as_ref().is_none_or(|b| cand < *b) {
            best = Some(cand);
        }
    }
    best.unwrap_or_default()
}

fn inline(s: &Structure, parts: Option<&[Structure]>) -> Structure {
    match s {
        Structure::Atom(a) => match parts {
            Some(p) => inline(&p[*a as usize], None),
            None => Structure::Atom(*a),
        },
        Structure::Unit => Structure::Unit,
        Structure::Tagged(t, c) => Structure::Tagged(*t, Box::new(inline(c, parts))),
        Structure::Var(v, c) => Structure::Var(*v, Box::new(inline(c, parts))),
        Structure::Pair(a, b) => {
            Structure::Pair(Box::new(inline(a, parts)), Box::new(inline(b, parts)))
        }
        Structure::Collection(k, cs) => {
            Structure::Collection(*k, cs.iter().map(|c| inline(c, parts)).collect())
        }
        Structure::Substituted { core, parts: p } => inline(core, Some(p)),
    }
}

fn render(s: &Structure, out: &mut String) {
    match s {
        Structure::Atom(a) => {
            let _ = write!(out, "{}", a);
        }
        Structure::Unit => out.push_str("[]"),
        Structure::Tagged(t, c) => {
            let _ = write!(out, "{{\"tag\":{},\"of\":", t);
            render(c, out);
            out.push('}');
        }
        Structure::Var(_, c) => render(c, out),
        Structure::Pair(a, b) => {
            out.push('[');
            render(a, out);
            out.push(',');
            render(b, out);
            out.push(']');
        }
        Structure::Collection(k, cs) => {
            let _ = write!(out, "{{\"{}\":[", k.name());
            for (i, c) in cs.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                render(c, out);
            }
            out.push_str("]}");
        }
        Structure::Substituted { .. } => render(&s.inlined(), out),
    }
}

/// A structure together with an automorphism given by its atom cycles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Symmetry {
    pub structure: Structure,
    /// Each cycle lists atoms so that the successor of `c[i]` is `c[i + 1]`.
    pub cycles: Vec<Vec<u32>>,
}

/// A symmetry with a marked cycle and a root atom on it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootedCSymmetry {
    pub symmetry: Symmetry,
    pub marked: usize,
    pub root: u32,
}

impl Symmetry {
    pub fn size(&self) -> usize {
        self.structure.size()
    }

    /// The automorphism as a map from atom to image.
    pub fn permutation(&self) -> BTreeMap<u32, u32> {
        let mut m = BTreeMap::new();
        for c in &self.cycles {
            for (i, &a) in c.iter().enumerate() {
                m.insert(a, c[(i + 1) % c.len()]);
            }
        }
        m
    }

    /// Whether the cycles partition the atoms of the structure.
    pub fn cycles_partition_atoms(&self) -> bool {
        let mut atoms = self.structure.atoms();
        let mut cyc: Vec<u32> = self.cycles.iter().flatten().copied().collect();
        atoms.sort_unstable();
        cyc.sort_unstable();
        atoms == cyc
    }

    /// Transport the structure along the permutation and compare.
    pub fn is_automorphism(&self) -> bool {
        if !self.cycles_partition_atoms() {
            return false;
        }
        let p = self.permutation();
        let moved = self.structure.encode(&|a| p[&a]);
        moved == self.structure.encode(&|a| a)
    }

    /// Atom ids are exactly `0..n`.
    pub fn labels_complete(&self) -> bool {
        let mut atoms = self.structure.atoms();
        atoms.sort_unstable();
        atoms.iter().enumerate().all(|(i, &a)| a as usize == i)
    }

    /// Rename atoms through `f` in both the structure and the cycles.
    pub fn relabel(&mut self, f: &dyn Fn(u32) -> u32) {
        self.structure.map_atoms(f);
        for c in &mut self.cycles {
            for a in c.iter_mut() {
                *a = f(*a);
            }
        }
    }
}

impl RootedCSymmetry {
    pub fn marked_cycle(&self) -> &[u32] {
        &self.symmetry.cycles[self.marked]
    }

    /// Automorphism valid, marked cycle is one of its cycles and holds the root.
    pub fn is_valid(&self) -> bool {
        self.marked < self.symmetry.cycles.len()
            && self.marked_cycle().contains(&self.root)
            && self.symmetry.is_automorphism()
    }

    pub fn relabel(&mut self, f: &dyn Fn(u32) -> u32) {
        self.symmetry.relabel(f);
        self.root = f(self.root);
    }

    /// Forget the marked cycle.
    pub fn unpoint(self) -> Symmetry {
        self.symmetry
    }
}

/// Uniformly random bijection from the atoms onto `0..n`.
pub fn label_permutation(atoms: &[u32], rng: &mut dyn RngCore) -> BTreeMap<u32, u32> {
    let mut targets: Vec<u32> = (0..atoms.len() as u32).collect();
    targets.shuffle(rng);
    atoms.iter().copied().zip(targets).collect()
}

/// Relabel a symmetry by a uniform random bijection onto `0..n`.
pub fn distribute_labels(s: &mut Symmetry, rng: &mut dyn RngCore) {
    let p = label_permutation(&s.structure.atoms(), rng);
    s.relabel(&|a| p[&a]);
}

/// Same as [`distribute_labels`] for rooted c-symmetries.
pub fn distribute_labels_rooted(s: &mut RootedCSymmetry, rng: &mut dyn RngCore) {
    let p = label_permutation(&s.symmetry.structure.atoms(), rng);
    s.relabel(&|a| p[&a]);
}

/// Merge `k` replicas of a cycle into one cycle of length `len * k`.
///
/// `copies[i][j]` is atom `cycle[j]` in replica `i`. The successor of an atom in
/// replica `i < k - 1` is the same atom in replica `i + 1`; from the last replica
/// the successor is the next atom of the cycle in replica 0.
pub fn compose_cycles(cycle_len: usize, copies: &[Vec<u32>]) -> Vec<u32> {
    let k = copies.len();
    let mut out = Vec::with_capacity(cycle_len * k);
    for j in 0..cycle_len {
        for c in copies {
            out.push(c[j]);
        }
    }
    out
}

/// Core symmetry drawn by a basic or terminal sampler, atoms are slots `0..k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoreDraw {
    pub structure: Structure,
    pub cycles: Vec<Vec<u32>>,
    /// Marked cycle index and root slot, for pointed cores.
    pub marked: Option<(usize, u32)>,
}

impl CoreDraw {
    pub fn slots(&self) -> usize {
        self.cycles.iter().map(|c| c.len()).sum()
    }

    /// Slots `0..n` in a collection, with the given cycles.
    pub fn collection(kind: CollKind, n: usize, cycles: Vec<Vec<u32>>) -> CoreDraw {
        let items = (0..n as u32).map(Structure::Atom).collect();
        CoreDraw { structure: Structure::Collection(kind, items), cycles, marked: None }
    }

    /// Cycles of the permutation `i -> perm[i]`.
    pub fn cycles_of(perm: &[u32]) -> Vec<Vec<u32>> {
        let mut seen = alloc::vec![false; perm.len()];
        let mut out = Vec::new();
        for s in 0..perm.len() {
            if seen[s] {
                continue;
            }
            let mut c = Vec::new();
            let mut i = s;
            while !seen[i] {
                seen[i] = true;
                c.push(i as u32);
                i = perm[i] as usize;
            }
            out.push(c);
        }
        out
    }

    /// Mark the cycle containing `root`.
    pub fn with_root(mut self, root: u32) -> CoreDraw {
        let idx = self.cycles.iter().position(|c| c.contains(&root));
        self.marked = idx.map(|i| (i, root));
        self
    }

    /// The core as a symmetry on its slots, for checking basic samplers.
    pub fn as_symmetry(&self) -> Symmetry {
        Symmetry { structure: self.structure.clone(), cycles: self.cycles.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn atoms(v: &[u32]) -> Vec<Structure> {
        v.iter().map(|&a| Structure::Atom(a)).collect()
    }

    #[test]
    fn compose_small() {
        let c = compose_cycles(2, &[vec![1, 2], vec![11, 12]]);
        assert_eq!(c, vec![1, 11, 2, 12]);
        let c = compose_cycles(1, &[vec![1], vec![2], vec![3]]);
        assert_eq!(c, vec![1, 2, 3]);
    }

    #[test]
    fn cyc_rotation_is_automorphism() {
        let s = Symmetry {
            structure: Structure::Collection(CollKind::Cyc, atoms(&[0, 1, 2, 3])),
            cycles: vec![vec![0, 2], vec![1, 3]],
        };
        assert!(s.is_automorphism());
        let bad = Symmetry {
            structure: Structure::Collection(CollKind::Cyc, atoms(&[0, 1, 2, 3])),
            cycles: vec![vec![0, 1], vec![2], vec![3]],
        };
        assert!(!bad.is_automorphism());
    }

    #[test]
    fn seq_only_identity() {
        let s = Symmetry {
            structure: Structure::Collection(CollKind::Seq, atoms(&[0, 1])),
            cycles: vec![vec![0, 1]],
        };
        assert!(!s.is_automorphism());
        let r = Symmetry {
            structure: Structure::Collection(CollKind::RootedPolygon, atoms(&[0, 1])),
            cycles: vec![vec![0, 1]],
        };
        assert!(r.is_automorphism());
    }

    #[test]
    fn polygon_reflection() {
        let s = Symmetry {
            structure: Structure::Collection(CollKind::Polygon, atoms(&[0, 1, 2, 3, 4])),
            cycles: vec![vec![0], vec![1, 4], vec![2, 3]],
        };
        assert!(s.is_automorphism());
        let c = Symmetry {
            structure: Structure::Collection(CollKind::Cyc, atoms(&[0, 1, 2, 3, 4])),
            cycles: vec![vec![0], vec![1, 4], vec![2, 3]],
        };
        assert!(!c.is_automorphism());
    }

    #[test]
    fn substituted_inlines() {
        let core = Structure::Collection(CollKind::Set, atoms(&[0, 1]));
        let parts = vec![
            Structure::Pair(Box::new(Structure::Atom(5)), Box::new(Structure::Atom(6))),
            Structure::Pair(Box::new(Structure::Atom(7)), Box::new(Structure::Atom(8))),
        ];
        let s = Symmetry {
            structure: Structure::Substituted { core: Box::new(core), parts },
            cycles: vec![vec![5, 7], vec![6, 8]],
        };
        assert!(s.is_automorphism());
        assert_eq!(s.size(), 4);
    }

    #[test]
    fn cycles_of_perm() {
        assert_eq!(CoreDraw::cycles_of(&[1, 0, 2]), vec![vec![0, 1], vec![2]]);
    }
}
