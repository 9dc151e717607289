//! Isomorphism-class codes for sampled trees and cacti.
//!
//! A structure term is first read back as a graph: grammar variables that own an
//! atom (or are listed as implicit vertices) become vertices, polygon
//! collections become cycle blocks, and every other parent/child link is an
//! edge. Codes are then computed on the block tree, or on the rotation system
//! for plane trees.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::sampler::{CollKind, Structure};
use crate::{Error, Result};

type V = usize;

/// A graph read from a structure term.
#[derive(Clone, Debug, Default)]
pub struct Skeleton {
    /// Neighbours of each vertex in the order they were met: parent first, then
    /// children in term order.
    pub rot: Vec<Vec<V>>,
    /// Cycle blocks in cyclic order; an edge is a block of two.
    pub blocks: Vec<Vec<V>>,
    /// Vertex of the outermost variable, when it has one.
    pub root: Option<V>,
    /// Atom carried by each vertex; `None` for implicit vertices.
    pub atom: Vec<Option<u32>>,
}

impl Skeleton {
    pub fn vertices(&self) -> usize {
        self.rot.len()
    }

    pub fn edges(&self) -> usize {
        self.blocks.iter().map(|b| if b.len() == 2 { 1 } else { b.len() }).sum()
    }

    pub fn is_tree(&self) -> bool {
        self.blocks.iter().all(|b| b.len() == 2) && self.edges() + 1 == self.vertices()
    }

    /// Whether the graph is connected and each block is a simple cycle or an
    /// edge sharing at most one vertex with the rest along the block tree.
    pub fn is_cactus(&self) -> bool {
        let n = self.vertices();
        if n == 0 {
            return false;
        }
        // block tree has n + blocks nodes and sum(block sizes) edges
        let inc: usize = self.blocks.iter().map(|b| b.len()).sum();
        if inc != n + self.blocks.len() - 1 {
            return false;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        let members = self.memberships();
        while let Some(v) = stack.pop() {
            for &b in &members[v] {
                for &w in &self.blocks[b] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        seen.iter().all(|&s| s)
    }

    fn memberships(&self) -> Vec<Vec<usize>> {
        let mut m = vec![Vec::new(); self.vertices()];
        for (i, b) in self.blocks.iter().enumerate() {
            for &v in b {
                m[v].push(i);
            }
        }
        m
    }
}

struct Reader<'a> {
    implicit: &'a [u32],
    sk: Skeleton,
}

fn own_atom(s: &Structure) -> Option<u32> {
    match s {
        Structure::Atom(a) => Some(*a),
        Structure::Unit | Structure::Var(..) => None,
        Structure::Tagged(_, c) => own_atom(c),
        Structure::Pair(a, b) => own_atom(a).or_else(|| own_atom(b)),
        Structure::Collection(_, cs) => cs.iter().find_map(own_atom),
        Structure::Substituted { .. } => None,
    }
}

impl Reader<'_> {
    fn vertex(&mut self, atom: Option<u32>) -> V {
        self.sk.rot.push(Vec::new());
        self.sk.atom.push(atom);
        self.sk.rot.len() - 1
    }

    fn link(&mut self, p: V, w: V) {
        self.sk.rot[w].push(p);
        self.sk.rot[p].push(w);
        self.sk.blocks.push(vec![p, w]);
    }

    /// Walks `s` below vertex `cur`; returns the first vertex created at this level.
    fn walk(&mut self, s: &Structure, cur: Option<V>) -> Result<Option<V>> {
        Ok(match s {
            Structure::Atom(_) | Structure::Unit => None,
            Structure::Tagged(_, c) => self.walk(c, cur)?,
            Structure::Pair(a, b) => {
                let x = self.walk(a, cur)?;
                let y = self.walk(b, cur)?;
                x.or(y)
            }
            Structure::Var(v, body) => {
                let atom = own_atom(body);
                if atom.is_some() || self.implicit.contains(v) {
                    let w = self.vertex(atom);
                    if let Some(p) = cur {
                        self.link(p, w);
                    }
                    self.walk(body, Some(w))?;
                    Some(w)
                } else {
                    self.walk(body, cur)?
                }
            }
            Structure::Collection(kind, items) => match kind {
                CollKind::RootedPolygon | CollKind::Polygon => {
                    let mut block: Vec<V> = Vec::new();
                    if *kind == CollKind::RootedPolygon {
                        block.push(cur.ok_or_else(|| malformed("rooted block without a parent vertex"))?);
                    }
                    for it in items {
                        let w = self.walk(it, None)?.ok_or_else(|| malformed("block slot without a vertex"))?;
                        block.push(w);
                    }
                    if block.len() < 2 {
                        return Err(malformed("block with fewer than two vertices"));
                    }
                    let first = block[usize::from(*kind == CollKind::RootedPolygon)];
                    self.sk.blocks.push(block);
                    Some(first)
                }
                _ if cur.is_none() && *kind == CollKind::Set && items.len() == 2 => {
                    // the two halves of a central edge
                    let a = self.walk(&items[0], None)?.ok_or_else(|| malformed("edge end without a vertex"))?;
                    self.walk(&items[1], Some(a))?;
                    Some(a)
                }
                _ if cur.is_none() && !items.is_empty() => {
                    let c = self.vertex(None);
                    for it in items {
                        self.walk(it, Some(c))?;
                    }
                    Some(c)
                }
                _ => {
                    let mut first = None;
                    for it in items {
                        let w = self.walk(it, cur)?;
                        first = first.or(w);
                    }
                    first
                }
            },
            Structure::Substituted { .. } => return self.walk(&s.inlined(), cur),
        })
    }
}

fn malformed(msg: &str) -> Error {
    Error::Usage(format!("malformed structure: {}", msg))
}

/// Read the graph of a structure. Variables in `implicit` are vertices even
/// when they carry no atom.
pub fn skeleton(s: &Structure, implicit: &[u32]) -> Result<Skeleton> {
    let s = s.inlined();
    let mut r = Reader { implicit, sk: Skeleton::default() };
    let root = r.walk(&s, None)?;
    r.sk.root = root;
    if r.sk.rot.is_empty() {
        return Err(malformed("no vertices"));
    }
    Ok(r.sk)
}

struct BlockTree<'a> {
    sk: &'a Skeleton,
    members: Vec<Vec<usize>>,
}

impl BlockTree<'_> {
    fn vertex_code(&self, v: V, from: Option<usize>) -> String {
        let mut kids: Vec<String> =
            self.members[v].iter().filter(|&&b| Some(b) != from).map(|&b| self.block_code(b, v)).collect();
        kids.sort_unstable();
        let mut out = String::from("(");
        kids.iter().for_each(|k| out.push_str(k));
        out.push(')');
        out
    }

    fn block_code(&self, b: usize, from: V) -> String {
        let cyc = &self.sk.blocks[b];
        let i = cyc.iter().position(|&v| v == from).expect("vertex in block");
        let n = cyc.len();
        let fwd: Vec<String> = (1..n).map(|k| self.vertex_code(cyc[(i + k) % n], Some(b))).collect();
        let mut bwd = fwd.clone();
        bwd.reverse();
        let best = if bwd < fwd { bwd } else { fwd };
        format!("[{}]", best.concat())
    }

    fn center_block_code(&self, b: usize) -> String {
        let cyc = &self.sk.blocks[b];
        let codes: Vec<String> = cyc.iter().map(|&v| self.vertex_code(v, Some(b))).collect();
        format!("B[{}]", dihedral_min(&codes).concat())
    }

    /// Centre of the block tree: node ids `< n` are vertices, the rest blocks.
    fn centers(&self) -> Vec<usize> {
        let n = self.sk.vertices();
        let total = n + self.sk.blocks.len();
        let mut deg = vec![0usize; total];
        for v in 0..n {
            deg[v] = self.members[v].len();
        }
        for (b, cyc) in self.sk.blocks.iter().enumerate() {
            deg[n + b] = cyc.len();
        }
        let mut layer: Vec<usize> = (0..total).filter(|&i| deg[i] <= 1).collect();
        let mut left = total;
        let mut removed = vec![false; total];
        while left > 2 {
            let mut next = Vec::new();
            for &i in &layer {
                removed[i] = true;
                left -= 1;
                let nbrs: Vec<usize> = if i < n {
                    self.members[i].iter().map(|&b| n + b).collect()
                } else {
                    self.sk.blocks[i - n].clone()
                };
                for j in nbrs {
                    if !removed[j] {
                        deg[j] -= 1;
                        if deg[j] == 1 {
                            next.push(j);
                        }
                    }
                }
            }
            layer = next;
        }
        (0..total).filter(|&i| !removed[i]).collect()
    }
}

/// Lexicographically least rotation or reflection of a cyclic sequence.
pub fn dihedral_min(codes: &[String]) -> Vec<String> {
    let n = codes.len();
    let mut best: Option<Vec<String>> = None;
    for dir in 0..2 {
        for s in 0..n {
            let cand: Vec<String> = (0..n)
                .map(|k| {
                    let i = if dir == 0 { (s + k) % n } else { (s + n - k) % n };
                    codes[i].clone()
                })
                .collect();
            if best.as_ref().is_none_or(|b| cand < *b) {
                best = Some(cand);
            }
        }
    }
    best.unwrap_or_default()
}

fn rotation_min(codes: &[String]) -> Vec<String> {
    let n = codes.len();
    (0..n)
        .map(|s| (0..n).map(|k| codes[(s + k) % n].clone()).collect::<Vec<_>>())
        .min()
        .unwrap_or_default()
}

/// Code of the graph up to isomorphism, via the block tree.
pub fn cactus_code(sk: &Skeleton) -> String {
    let bt = BlockTree { sk, members: sk.memberships() };
    let n = sk.vertices();
    bt.centers()
        .into_iter()
        .map(|c| if c < n { format!("V{}", bt.vertex_code(c, None)) } else { bt.center_block_code(c - n) })
        .min()
        .unwrap_or_default()
}

/// Code of the graph up to isomorphisms fixing `root`.
pub fn rooted_code(sk: &Skeleton, root: V) -> String {
    let bt = BlockTree { sk, members: sk.memberships() };
    bt.vertex_code(root, None)
}

fn plane_code(sk: &Skeleton, v: V, from: V) -> String {
    let r = &sk.rot[v];
    let i = r.iter().position(|&w| w == from).expect("parent in rotation");
    let mut out = String::from("(");
    for k in 1..r.len() {
        out.push_str(&plane_code(sk, r[(i + k) % r.len()], v));
    }
    out.push(')');
    out
}

/// Code of a plane tree up to orientation-preserving homeomorphism.
pub fn plane_tree_code(sk: &Skeleton) -> Result<String> {
    if !sk.is_tree() {
        return Err(malformed("plane code of a non-tree"));
    }
    let bt = BlockTree { sk, members: sk.memberships() };
    let n = sk.vertices();
    let centers = bt.centers();
    match centers.as_slice() {
        [c] if *c < n => {
            let codes: Vec<String> = sk.rot[*c].iter().map(|&w| plane_code(sk, w, *c)).collect();
            Ok(format!("V{}", rotation_min(&codes).concat()))
        }
        [c] => {
            let (a, b) = (sk.blocks[c - n][0], sk.blocks[c - n][1]);
            let x = format!("{}{}", plane_code(sk, a, b), plane_code(sk, b, a));
            let y = format!("{}{}", plane_code(sk, b, a), plane_code(sk, a, b));
            Ok(format!("E{}", x.min(y)))
        }
        _ => Err(Error::Internal(String::from("block tree without a unique centre"))),
    }
}

/// Map used by tests: atom-relabel and reshuffle every unordered or cyclic
/// collection, keeping the isomorphism class.
pub fn shuffle_presentation(s: &Structure, perm: &BTreeMap<u32, u32>, rng: &mut dyn rand::RngCore) -> Structure {
    use rand::seq::SliceRandom;
    use rand::Rng;
    let mut out = s.inlined();
    out.map_atoms(&|a| perm.get(&a).copied().unwrap_or(a));
    fn go(s: &mut Structure, rng: &mut dyn rand::RngCore) {
        match s {
            Structure::Tagged(_, c) | Structure::Var(_, c) => go(c, rng),
            Structure::Pair(a, b) => {
                go(a, rng);
                go(b, rng);
            }
            Structure::Collection(kind, items) => {
                items.iter_mut().for_each(|c| go(c, rng));
                let n = items.len();
                match kind {
                    CollKind::Set => items.shuffle(rng),
                    CollKind::Cyc if n > 0 => items.rotate_left(rng.random_range(0..n)),
                    CollKind::Polygon if n > 0 => {
                        items.rotate_left(rng.random_range(0..n));
                        if rng.random::<bool>() {
                            items.reverse();
                        }
                    }
                    CollKind::RootedPolygon if rng.random::<bool>() => items.reverse(),
                    _ => {}
                }
            }
            _ => {}
        }
    }
    go(&mut out, rng);
    out
}
