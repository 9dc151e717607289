mod common;

use std::collections::BTreeMap;

use common::chi_square_p;
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use polya::enumerate::{d_regular_plane_tree_count, plane_tree_count, solve};
use polya::families::{
    cacti_b_series, cactus_code, f_coeffs, family, outerplanar_b_series, shuffle_presentation, FamilyKind,
    FamilySpec, Skeleton,
};
use polya::grammar::Terminal;
use polya::oracle::{eval_system, find_singularity};
use polya::sampler::{label_permutation, sample_boltzmann, sample_targeted, Sample, SampleOptions, Target};
use polya::zindex::{CycleIndex, Monomial, PointMode, Q};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn u64s(v: &[BigInt]) -> Vec<u64> {
    v.iter().map(|c| c.to_u64().unwrap()).collect()
}

#[test]
fn plane_tree_counts_match_closed_form() {
    let f = family("plane_trees").unwrap();
    let c = f.counts(13).unwrap();
    // e_n counts trees with n + 1 vertices
    for n in 1..=12 {
        assert_eq!(c[n + 1], plane_tree_count(n as u64).unwrap(), "n = {}", n);
    }
}

#[test]
fn d_regular_counts_match_closed_form() {
    for d in [3u32, 4] {
        let f = family(&format!("d_regular_plane_trees({})", d)).unwrap();
        let top = f.size_for_internal(8).unwrap();
        let c = f.counts(top).unwrap();
        for k in 0..=8usize {
            let m = f.size_for_internal(k).unwrap();
            assert_eq!(c[m], d_regular_plane_tree_count(k as u64, d as u64).unwrap(), "d = {} k = {}", d, k);
        }
        // sizes off the lattice are empty
        let stride = (d - 2) as usize;
        if stride > 1 {
            assert!(c[3].is_zero());
        }
    }
}

#[test]
fn trivalent_by_internal_nodes() {
    let f = family("omega_trees({1,3})").unwrap();
    let want = [1u64, 1, 1, 1, 2, 2, 4, 6, 11, 18, 37, 66, 135, 265, 552, 1132];
    let c = f.counts(f.size_for_internal(want.len() - 1).unwrap()).unwrap();
    let got: Vec<u64> = (0..want.len()).map(|k| c[f.size_for_internal(k).unwrap()].to_u64().unwrap()).collect();
    assert_eq!(got, want);
    // odd vertex counts are impossible
    assert!(c.iter().skip(1).step_by(2).all(|x| x.is_zero()));
}

#[test]
fn unbiased_pointing_up_to_50() {
    for name in ["free_trees", "plane_trees", "cacti", "omega_trees({1,2,4})"] {
        let f = family(name).unwrap();
        let sys = solve(&f.grammar, 50).unwrap();
        let pointed = &sys.ogs[f.root()].coeffs;
        let plain = f.counts(50).unwrap();
        for n in 1..=50 {
            assert_eq!(pointed[n], &plain[n] * BigInt::from(n), "{} n = {}", name, n);
        }
    }
}

#[test]
fn cacti_block_series() {
    let (zp, zs, zpp) = cacti_b_series(12);
    assert_eq!(zp.coeff(&Monomial::s(1)), Q::one());
    assert_eq!(zs.coeff(&Monomial::t(2)), Q::one());
    // pointed rooted block from its closed form:
    // t1/2 (1-s1)^-2 + t1/2 (1-s2)^-1 + t2 (1+s1) (1-s2)^-2
    let mut want = CycleIndex::zero(12, true);
    let h = Q::new(BigInt::one(), BigInt::from(2));
    for k in 0..12u32 {
        want.insert(Monomial::from_pairs(&[(1, k)], Some(1)), &h * Q::from_integer(BigInt::from(k + 1)));
        want.insert(Monomial::from_pairs(&[(2, k)], Some(1)), h.clone());
        for f in 0..2 {
            want.insert(Monomial::from_pairs(&[(1, f), (2, k)], Some(2)), Q::from_integer(BigInt::from(k + 1)));
        }
    }
    assert_eq!(zpp, want);
}

#[test]
fn outerplanar_block_series() {
    let f = f_coeffs(7);
    assert_eq!(u64s(&f), [0, 1, 1, 3, 11, 45, 197, 903]);
    let (zp, zs, zpp) = outerplanar_b_series(10);
    assert_eq!(zp.coeff(&Monomial::s(1)), Q::one());
    assert_eq!(zs.coeff(&Monomial::t(2)), Q::one());
    assert_eq!(zpp, zp.delta_point(1).unwrap());
    // a triangle has two rooted forms: identity and the flip
    assert_eq!(zp.coeff(&Monomial::s_pow(1, 2)), Q::new(BigInt::one(), BigInt::from(2)));
    assert_eq!(zp.coeff(&Monomial::s(2)), Q::new(BigInt::one(), BigInt::from(2)));
}

fn check_eval(t: &dyn Terminal, trunc: usize, pointing: Option<PointMode>) {
    let z = t.series(pointing, trunc).unwrap();
    for x in [0.02, 0.05, 0.08] {
        let s = |i: u32| f64::powi(x, i as i32);
        let tt = |l: u32| 0.7 * f64::powi(x, l as i32);
        let got = t.eval(pointing, &s, &tt);
        let want = z.eval_f64(&s, &tt);
        assert!((got - want).abs() < 1e-9 * want.abs().max(1e-300), "{} {:?} at {}: {} vs {}", t.name(), pointing, x, got, want);
    }
}

#[test]
fn block_terminals_evaluate_like_their_series() {
    for name in ["cacti", "outerplanar"] {
        let f = family(name).unwrap();
        let bp = f.grammar.terminal("Bp").unwrap();
        let bs = f.grammar.terminal("Bsym").unwrap();
        check_eval(bp.as_ref(), 40, None);
        check_eval(bp.as_ref(), 40, Some(PointMode::Circle));
        check_eval(bp.as_ref(), 40, Some(PointMode::Symm));
        check_eval(bs.as_ref(), 40, None);
    }
}

#[test]
fn free_tree_pointing_identity() {
    // x f'(x) = x r'(x) (1 - r(x)) + x^2 r'(x^2)
    let f = family("free_trees").unwrap();
    let g = &f.grammar;
    let rho = find_singularity(g).unwrap().rho;
    let (fo, r, ro) = (g.var("Fo").unwrap(), g.var("R").unwrap(), g.var("Ro").unwrap());
    for i in 1..=20 {
        let x = rho * i as f64 / 21.0;
        let t = eval_system(g, x, 64).unwrap();
        let lhs = t.var_value(fo, 1);
        let rhs = t.var_value(ro, 1) * (1.0 - t.var_value(r, 1)) + t.var_value(ro, 2);
        assert!((lhs - rhs).abs() < 1e-10 * lhs.abs().max(1.0), "x = {}: {} vs {}", x, lhs, rhs);
    }
}

fn draw(f: &FamilySpec, x: f64, n: usize, seed: u64) -> Vec<Sample> {
    let t = eval_system(&f.grammar, x, 64).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| sample_boltzmann(&f.grammar, &t, f.root(), &SampleOptions::default(), &mut rng).unwrap()).collect()
}

fn degrees(sk: &Skeleton) -> Vec<usize> {
    sk.rot.iter().map(|r| r.len()).collect()
}

fn vertex_of_atom(sk: &Skeleton) -> BTreeMap<u32, usize> {
    sk.atom.iter().enumerate().filter_map(|(v, a)| a.map(|a| (a, v))).collect()
}

#[test]
fn samples_have_the_family_shape() {
    for (name, scale) in [
        ("rooted_trees", 0.99),
        ("free_trees", 0.99),
        ("omega_trees({1,3})", 0.99),
        ("omega_trees({1,2,4})", 0.99),
        ("plane_trees", 0.99),
        ("omega_plane_trees({1,3})", 0.99),
        ("d_regular_plane_trees(3)", 0.99),
        ("d_regular_plane_trees(4)", 0.99),
        ("cacti", 0.99),
    ] {
        let f = family(name).unwrap();
        let rho = find_singularity(&f.grammar).unwrap().rho;
        for s in draw(&f, rho * scale, 1000, 11) {
            assert!(s.is_valid(), "{}: {:?}", name, s);
            let sk = f.skeleton(s.structure()).unwrap();
            let atoms = sk.atom.iter().filter(|a| a.is_some()).count();
            assert_eq!(atoms, s.size(), "{}", name);
            match &f.kind {
                FamilyKind::Cacti => assert!(sk.is_cactus(), "{}", name),
                _ => assert!(sk.is_tree(), "{}: {:?}", name, sk),
            }
            let deg = degrees(&sk);
            match &f.kind {
                FamilyKind::OmegaTrees(om) | FamilyKind::OmegaPlaneTrees(om) => {
                    assert!(deg.iter().all(|d| om.contains(&(*d as u32))), "{}: {:?}", name, deg)
                }
                FamilyKind::DRegularPlaneTrees(d) => {
                    for (v, dv) in deg.iter().enumerate() {
                        let want = if sk.atom[v].is_some() { 1 } else { *d as usize };
                        assert!(*dv == want || sk.vertices() <= 2, "{}: {:?}", name, deg);
                    }
                }
                _ => {}
            }
        }
    }
}

/// Middle of the path between two tree vertices: `(a, a)` for a vertex, `(a, b)`
/// with `a < b` for an edge.
fn middle(sk: &Skeleton, a: usize, b: usize) -> (usize, usize) {
    let n = sk.vertices();
    let mut prev = vec![usize::MAX; n];
    let mut queue = std::collections::VecDeque::from([a]);
    prev[a] = a;
    while let Some(v) = queue.pop_front() {
        for &w in &sk.rot[v] {
            if prev[w] == usize::MAX {
                prev[w] = v;
                queue.push_back(w);
            }
        }
    }
    let mut path = vec![b];
    while *path.last().unwrap() != a {
        path.push(prev[*path.last().unwrap()]);
    }
    let k = path.len();
    if k % 2 == 1 {
        (path[k / 2], path[k / 2])
    } else {
        let (x, y) = (path[k / 2 - 1], path[k / 2]);
        (x.min(y), x.max(y))
    }
}

#[test]
fn symmetric_free_trees_share_a_centre() {
    let f = family("free_trees").unwrap();
    let rho = find_singularity(&f.grammar).unwrap().rho;
    let mut symmetric = 0;
    for s in draw(&f, rho * 0.999, 10_000, 12) {
        let Sample::Pointed(p) = &s else { panic!("unpointed free tree") };
        let cyc = p.marked_cycle();
        if cyc.len() < 2 {
            continue;
        }
        symmetric += 1;
        let sk = f.skeleton(s.structure()).unwrap();
        let at = vertex_of_atom(&sk);
        let mids: Vec<(usize, usize)> =
            (0..cyc.len()).map(|i| middle(&sk, at[&cyc[i]], at[&cyc[(i + 1) % cyc.len()]])).collect();
        assert!(mids.iter().all(|m| *m == mids[0]), "{:?}", mids);
        // across an edge the cycle alternates between the two halves
        let (a, b) = mids[0];
        assert!(a == b || cyc.len() % 2 == 0, "{:?} {:?}", cyc, mids[0]);
    }
    assert!(symmetric > 100);
}

#[test]
fn canonical_form_ignores_presentation() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for name in ["rooted_trees", "free_trees", "plane_trees", "d_regular_plane_trees(3)", "cacti"] {
        let f = family(name).unwrap();
        let rho = find_singularity(&f.grammar).unwrap().rho;
        for s in draw(&f, rho * 0.99, 300, 14) {
            let base = f.canonical_form(s.structure()).unwrap();
            let atoms = s.structure().atoms();
            for _ in 0..20 {
                let perm = label_permutation(&atoms, &mut rng);
                let other = shuffle_presentation(s.structure(), &perm, &mut rng);
                assert_eq!(f.canonical_form(&other).unwrap(), base, "{}", name);
            }
        }
    }
}

fn tree_skeleton(n: usize, edges: &[(usize, usize)]) -> Skeleton {
    let mut sk = Skeleton { rot: vec![Vec::new(); n], atom: (0..n as u32).map(Some).collect(), ..Default::default() };
    for &(a, b) in edges {
        sk.rot[a].push(b);
        sk.rot[b].push(a);
        sk.blocks.push(vec![a, b]);
    }
    sk
}

/// Edges of the labeled tree with Prüfer code `code` on `code.len() + 2` vertices.
fn prufer_edges(code: &[usize]) -> Vec<(usize, usize)> {
    let n = code.len() + 2;
    let mut deg = vec![1; n];
    code.iter().for_each(|&c| deg[c] += 1);
    let mut edges = Vec::new();
    for &c in code {
        let leaf = (0..n).find(|&v| deg[v] == 1).unwrap();
        edges.push((leaf, c));
        deg[leaf] -= 1;
        deg[c] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&v| deg[v] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges
}

#[test]
fn labeled_trees_on_four_vertices() {
    let mut classes = std::collections::BTreeSet::new();
    let mut labeled = 0;
    for a in 0..4 {
        for b in 0..4 {
            classes.insert(cactus_code(&tree_skeleton(4, &prufer_edges(&[a, b]))));
            labeled += 1;
        }
    }
    assert_eq!(labeled, 16);
    assert_eq!(classes.len(), 2);
}

fn uniformity(name: &str, n: usize, classes: usize, draws: usize, seed: u64) {
    let f = family(name).unwrap();
    assert_eq!(f.count(n).unwrap(), BigInt::from(classes));
    let rho = find_singularity(&f.grammar).unwrap().rho;
    let t = eval_system(&f.grammar, rho, 64).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hist: BTreeMap<String, usize> = BTreeMap::new();
    for _ in 0..draws {
        let out =
            sample_targeted(&f.grammar, &t, f.root(), Target::Exact(n), 10_000_000, &SampleOptions::default(), &mut rng)
                .unwrap();
        *hist.entry(f.canonical_form(out.sample.structure()).unwrap()).or_default() += 1;
    }
    assert_eq!(hist.len(), classes, "{}: classes seen {:?}", name, hist);
    let obs: Vec<usize> = hist.values().copied().collect();
    let p = chi_square_p(&obs, &vec![1.0; classes]);
    assert!(p > 0.001, "{}: p = {} {:?}", name, p, obs);
}

#[test]
fn free_trees_of_size_8_are_uniform() {
    uniformity("free_trees", 8, 23, 50_000, 21);
}

#[test]
fn plane_trees_of_size_7_are_uniform() {
    let n = family("plane_trees").unwrap().count(7).unwrap().to_usize().unwrap();
    uniformity("plane_trees", 7, n, 50_000, 22);
}

#[test]
fn cacti_of_size_6_are_uniform() {
    uniformity("cacti", 6, 23, 50_000, 23);
}
