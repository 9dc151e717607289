//! Exhaustive counters used as oracles for the grammar counts.
//!
//! Nothing here touches the grammar machinery: trees come from Prüfer codes or
//! Dyck words, graphs from subsets of edge orbits counted with Burnside's lemma.

use std::collections::{BTreeSet, HashMap, HashSet};

/// Interns sorted child-id lists so rooted shapes become small integers.
#[derive(Default)]
struct Interner {
    ids: HashMap<Vec<u32>, u32>,
}

impl Interner {
    fn id(&mut self, mut kids: Vec<u32>) -> u32 {
        kids.sort_unstable();
        let next = self.ids.len() as u32;
        *self.ids.entry(kids).or_insert(next)
    }
}

fn rooted_id(adj: &[Vec<usize>], v: usize, parent: usize, it: &mut Interner) -> u32 {
    let kids: Vec<u32> = adj[v].iter().filter(|&&w| w != parent).map(|&w| rooted_id(adj, w, v, it)).collect();
    it.id(kids)
}

fn centres(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let mut deg: Vec<usize> = adj.iter().map(|a| a.len()).collect();
    let mut gone = vec![false; n];
    let mut layer: Vec<usize> = (0..n).filter(|&v| deg[v] <= 1).collect();
    let mut left = n;
    while left > 2 {
        let mut next = Vec::new();
        for &v in &layer {
            gone[v] = true;
            left -= 1;
            for &w in &adj[v] {
                if !gone[w] {
                    deg[w] -= 1;
                    if deg[w] == 1 {
                        next.push(w);
                    }
                }
            }
        }
        layer = next;
    }
    (0..n).filter(|&v| !gone[v]).collect()
}

/// `(tag, a, b)`: a vertex centre with shape `a`, or an edge centre with halves `a <= b`.
fn free_id(adj: &[Vec<usize>], it: &mut Interner) -> (u8, u32, u32) {
    match centres(adj).as_slice() {
        [c] => (0, rooted_id(adj, *c, usize::MAX, it), 0),
        [a, b] => {
            let x = rooted_id(adj, *a, *b, it);
            let y = rooted_id(adj, *b, *a, it);
            (1, x.min(y), x.max(y))
        }
        _ => unreachable!("a tree has one or two centres"),
    }
}

fn prufer_adj(code: &[usize], n: usize) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    if n == 1 {
        return adj;
    }
    let mut deg = vec![1usize; n];
    code.iter().for_each(|&c| deg[c] += 1);
    let add = |a: usize, b: usize, adj: &mut Vec<Vec<usize>>| {
        adj[a].push(b);
        adj[b].push(a);
    };
    for &c in code {
        let leaf = (0..n).find(|&v| deg[v] == 1).expect("leaf");
        add(leaf, c, &mut adj);
        deg[leaf] -= 1;
        deg[c] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&v| deg[v] == 1).collect();
    add(rest[0], rest[1], &mut adj);
    adj
}

/// One adjacency list per isomorphism class of free trees on `n` vertices,
/// found by decoding all `n^(n-2)` Prüfer codes.
pub fn free_tree_classes(n: usize) -> Vec<Vec<Vec<usize>>> {
    assert!(n >= 1);
    let mut it = Interner::default();
    let mut seen = HashSet::new();
    let mut reps = Vec::new();
    let len = n.saturating_sub(2);
    let mut code = vec![0usize; len];
    loop {
        let adj = prufer_adj(&code, n);
        if seen.insert(free_id(&adj, &mut it)) {
            reps.push(adj);
        }
        // odometer over 0..n
        let mut i = 0;
        while i < len {
            code[i] += 1;
            if code[i] < n {
                break;
            }
            code[i] = 0;
            i += 1;
        }
        if i == len {
            break;
        }
    }
    reps
}

pub fn free_tree_count(n: usize) -> u64 {
    if n == 0 { 0 } else { free_tree_classes(n).len() as u64 }
}

/// Rooted trees on `n` vertices: every free class rooted at every vertex.
pub fn rooted_tree_count(n: usize) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut it = Interner::default();
    let mut seen = HashSet::new();
    for adj in free_tree_classes(n) {
        for v in 0..n {
            seen.insert(rooted_id(&adj, v, usize::MAX, &mut it));
        }
    }
    seen.len() as u64
}

fn dart_code(rot: &[Vec<usize>], v: usize, from: usize, out: &mut Vec<u8>) {
    out.push(b'(');
    let r = &rot[v];
    let i = r.iter().position(|&w| w == from).expect("dart");
    for k in 1..r.len() {
        dart_code(rot, r[(i + k) % r.len()], v, out);
    }
    out.push(b')');
}

/// Least code over all darts of a rotation system.
fn plane_class(rot: &[Vec<usize>]) -> Vec<u8> {
    if rot.len() == 1 {
        return b"()".to_vec();
    }
    let mut best: Option<Vec<u8>> = None;
    for (u, r) in rot.iter().enumerate() {
        for &v in r {
            let mut c = Vec::new();
            dart_code(rot, v, u, &mut c);
            dart_code(rot, u, v, &mut c);
            if best.as_ref().is_none_or(|b| c < *b) {
                best = Some(c);
            }
        }
    }
    best.expect("a dart")
}

fn dyck_words(pairs: usize) -> Vec<Vec<bool>> {
    fn go(open: usize, close: usize, cur: &mut Vec<bool>, out: &mut Vec<Vec<bool>>) {
        if open == 0 && close == 0 {
            out.push(cur.clone());
            return;
        }
        if open > 0 {
            cur.push(true);
            go(open - 1, close + 1, cur, out);
            cur.pop();
        }
        if close > 0 {
            cur.push(false);
            go(open, close - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(pairs, 0, &mut Vec::new(), &mut out);
    out
}

/// Plane trees on `n` vertices up to rotation, from all ordered rooted trees.
pub fn plane_tree_count(n: usize) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut seen = BTreeSet::new();
    for w in dyck_words(n - 1) {
        let mut rot: Vec<Vec<usize>> = vec![Vec::new()];
        let mut stack = vec![0usize];
        for up in w {
            if up {
                let p = *stack.last().expect("parent");
                let v = rot.len();
                rot.push(vec![p]);
                rot[p].push(v);
                stack.push(v);
            } else {
                stack.pop();
            }
        }
        seen.insert(plane_class(&rot));
    }
    seen.len() as u64
}

/// Small simple graph as adjacency bitmasks.
#[derive(Clone, Copy)]
struct Graph {
    n: usize,
    adj: [u16; 12],
}

impl Graph {
    fn from_edges(n: usize, mask: u64, pairs: &[(usize, usize)]) -> Graph {
        let mut adj = [0u16; 12];
        for (i, &(a, b)) in pairs.iter().enumerate() {
            if mask >> i & 1 == 1 {
                adj[a] |= 1 << b;
                adj[b] |= 1 << a;
            }
        }
        Graph { n, adj }
    }

    fn connected(&self) -> bool {
        let full: u16 = if self.n == 16 { u16::MAX } else { (1 << self.n) - 1 };
        let mut seen: u16 = 1;
        let mut frontier: u16 = 1;
        while frontier != 0 {
            let mut next = 0;
            for v in 0..self.n {
                if frontier >> v & 1 == 1 {
                    next |= self.adj[v];
                }
            }
            frontier = next & !seen;
            seen |= next;
        }
        seen == full
    }

    /// Blocks as (vertex mask, edge list).
    fn blocks(&self) -> Vec<(u16, Vec<(usize, usize)>)> {
        struct St<'a> {
            g: &'a Graph,
            disc: Vec<usize>,
            low: Vec<usize>,
            time: usize,
            stack: Vec<(usize, usize)>,
            out: Vec<(u16, Vec<(usize, usize)>)>,
        }
        fn dfs(s: &mut St, v: usize, parent: usize) {
            s.time += 1;
            s.disc[v] = s.time;
            s.low[v] = s.time;
            for w in 0..s.g.n {
                if s.g.adj[v] >> w & 1 == 0 || w == parent {
                    continue;
                }
                if s.disc[w] == 0 {
                    s.stack.push((v, w));
                    dfs(s, w, v);
                    s.low[v] = s.low[v].min(s.low[w]);
                    if s.low[w] >= s.disc[v] {
                        let mut edges = Vec::new();
                        let mut mask = 0u16;
                        while let Some(e) = s.stack.pop() {
                            mask |= 1 << e.0 | 1 << e.1;
                            edges.push(e);
                            if e == (v, w) {
                                break;
                            }
                        }
                        s.out.push((mask, edges));
                    }
                } else if s.disc[w] < s.disc[v] {
                    s.stack.push((v, w));
                    s.low[v] = s.low[v].min(s.disc[w]);
                }
            }
        }
        let mut s = St {
            g: self,
            disc: vec![0; self.n],
            low: vec![0; self.n],
            time: 0,
            stack: Vec::new(),
            out: Vec::new(),
        };
        dfs(&mut s, 0, usize::MAX);
        s.out
    }

    fn is_cactus(&self) -> bool {
        self.connected()
            && self.blocks().iter().all(|(mask, edges)| {
                let v = mask.count_ones() as usize;
                edges.len() == 1 || edges.len() == v
            })
    }

    fn is_outerplanar(&self) -> bool {
        self.connected()
            && self.blocks().iter().all(|(mask, edges)| {
                let v = mask.count_ones() as usize;
                v <= 2 || (edges.len() <= 2 * v - 3 && outer_cycle(self, *mask, edges))
            })
    }
}

/// Whether a 2-connected block has a Hamiltonian cycle with pairwise
/// non-crossing chords.
fn outer_cycle(g: &Graph, mask: u16, edges: &[(usize, usize)]) -> bool {
    let verts: Vec<usize> = (0..g.n).filter(|&v| mask >> v & 1 == 1).collect();
    let k = verts.len();
    let mut pos = vec![usize::MAX; g.n];
    let mut order = vec![verts[0]];
    pos[verts[0]] = 0;
    fn go(g: &Graph, mask: u16, k: usize, order: &mut Vec<usize>, pos: &mut Vec<usize>, edges: &[(usize, usize)]) -> bool {
        let last = *order.last().expect("start");
        if order.len() == k {
            if g.adj[last] >> order[0] & 1 == 0 {
                return false;
            }
            let chords: Vec<(usize, usize)> = edges
                .iter()
                .map(|&(a, b)| (pos[a].min(pos[b]), pos[a].max(pos[b])))
                .filter(|&(a, b)| b - a != 1 && !(a == 0 && b == k - 1))
                .collect();
            return chords.iter().enumerate().all(|(i, &(a, b))| {
                chords[i + 1..].iter().all(|&(c, d)| !(a < c && c < b && b < d) && !(c < a && a < d && d < b))
            });
        }
        for w in 0..g.n {
            if mask >> w & 1 == 1 && g.adj[last] >> w & 1 == 1 && pos[w] == usize::MAX {
                pos[w] = order.len();
                order.push(w);
                if go(g, mask, k, order, pos, edges) {
                    return true;
                }
                order.pop();
                pos[w] = usize::MAX;
            }
        }
        false
    }
    go(g, mask, k, &mut order, &mut pos, edges)
}

fn partitions(n: usize, max: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in (1..=n.min(max)).rev() {
        for mut rest in partitions(n - first, first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// Number of unlabeled graphs on `n <= 8` vertices with property `keep`, by
/// Burnside: average over cycle types of the graphs fixed by one permutation.
fn orbit_count(n: usize, keep: impl Fn(&Graph) -> bool) -> u64 {
    assert!((1..=8).contains(&n));
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    let index: HashMap<(usize, usize), usize> = pairs.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let mut total: u128 = 0;
    for lambda in partitions(n, n) {
        let mut perm = vec![0usize; n];
        let mut start = 0;
        for &len in &lambda {
            for i in 0..len {
                perm[start + i] = start + (i + 1) % len;
            }
            start += len;
        }
        // orbits of σ on vertex pairs, as edge masks
        let mut done = vec![false; pairs.len()];
        let mut orbits: Vec<u64> = Vec::new();
        for i in 0..pairs.len() {
            if done[i] {
                continue;
            }
            let mut m = 0u64;
            let mut j = i;
            while !done[j] {
                done[j] = true;
                m |= 1 << j;
                let (a, b) = pairs[j];
                let (x, y) = (perm[a], perm[b]);
                j = index[&(x.min(y), x.max(y))];
            }
            orbits.push(m);
        }
        let mut fixed: u128 = 0;
        for sel in 0u64..(1 << orbits.len()) {
            let mask = (0..orbits.len()).filter(|&o| sel >> o & 1 == 1).fold(0, |m, o| m | orbits[o]);
            if keep(&Graph::from_edges(n, mask, &pairs)) {
                fixed += 1;
            }
        }
        // number of permutations of this type: n! / z_λ
        let mut z: u128 = 1;
        let mut counts: HashMap<usize, usize> = HashMap::new();
        for &len in &lambda {
            *counts.entry(len).or_default() += 1;
        }
        for (&len, &m) in &counts {
            z *= (len as u128).pow(m as u32) * factorial(m);
        }
        total += fixed * (factorial(n) / z);
    }
    let q = total / factorial(n);
    assert_eq!(q * factorial(n), total, "Burnside sum not divisible");
    q as u64
}

pub fn cacti_count(n: usize) -> u64 {
    orbit_count(n, Graph::is_cactus)
}

pub fn outerplanar_count(n: usize) -> u64 {
    orbit_count(n, Graph::is_outerplanar)
}

pub fn connected_graph_count(n: usize) -> u64 {
    orbit_count(n, Graph::connected)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_trees() {
        let free: Vec<u64> = (1..=7).map(free_tree_count).collect();
        assert_eq!(free, [1, 1, 1, 2, 3, 6, 11]);
        let rooted: Vec<u64> = (1..=6).map(rooted_tree_count).collect();
        assert_eq!(rooted, [1, 1, 2, 4, 9, 20]);
    }

    #[test]
    fn small_plane_trees() {
        // A002995 shifted: plane trees by vertices
        let got: Vec<u64> = (1..=7).map(plane_tree_count).collect();
        assert_eq!(got, [1, 1, 1, 2, 3, 6, 14]);
    }

    #[test]
    fn connected_graphs() {
        let got: Vec<u64> = (1..=5).map(connected_graph_count).collect();
        assert_eq!(got, [1, 1, 2, 6, 21]);
    }

    #[test]
    fn small_graph_families() {
        let c: Vec<u64> = (1..=5).map(cacti_count).collect();
        assert_eq!(c, [1, 1, 2, 4, 9]);
        let o: Vec<u64> = (1..=5).map(outerplanar_count).collect();
        assert_eq!(o, [1, 1, 2, 5, 13]);
    }
}
