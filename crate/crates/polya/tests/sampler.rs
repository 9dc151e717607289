mod common;

use common::{chi_square_p, grammar, FREE_TREES};
use num_traits::ToPrimitive;
use polya::enumerate::solve;
use polya::oracle::eval_system;
use polya::sampler::{sample_boltzmann, sample_targeted, Sample, SampleOptions, Target};
use polya::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn sizes(src: &str, x: f64, draws: usize, max: usize, seed: u64) -> Vec<usize> {
    let g = grammar(src);
    let t = eval_system(&g, x, 64).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hist = vec![0; max + 2];
    for _ in 0..draws {
        let s = sample_boltzmann(&g, &t, g.root, &SampleOptions::default(), &mut rng).unwrap();
        hist[s.size().min(max + 1)] += 1;
    }
    hist
}

#[test]
fn sequence_sizes_are_geometric() {
    let hist = sizes("A = SEQ(X)", 0.5, 100_000, 15, 1);
    let probs: Vec<f64> = (0..=16)
        .map(|n| if n <= 15 { 0.5f64.powi(n as i32) * 0.5 } else { 0.5f64.powi(16) })
        .collect();
    let p = chi_square_p(&hist, &probs);
    assert!(p > 0.001, "p = {}", p);
}

#[test]
fn rooted_tree_sizes_follow_counts() {
    let x = 0.3;
    let src = "R = X * SET(R)";
    let sys = solve(&grammar(src), 10).unwrap();
    let hist = sizes(src, x, 100_000, 10, 2);
    let t = eval_system(&grammar(src), x, 64).unwrap();
    let total = t.var_value(0, 1);
    let mut probs: Vec<f64> = (0..=10)
        .map(|n| sys.ogs[0].coeffs[n].to_f64().unwrap() * x.powi(n as i32) / total)
        .collect();
    probs.push(1.0 - probs.iter().sum::<f64>());
    let p = chi_square_p(&hist, &probs);
    assert!(p > 0.001, "p = {}", p);
}

#[test]
fn binary_tree_mean_size() {
    let x = 0.25 - 1e-4;
    let hist = sizes("T = X + T * T", x, 100_000, 1_000_000, 3);
    let n: usize = hist.iter().sum();
    let mean = hist.iter().enumerate().map(|(k, c)| k as f64 * *c as f64).sum::<f64>() / n as f64;
    // x T'(x) / T(x) with T = (1 - sqrt(1 - 4x)) / 2
    let r = (1.0 - 4.0 * x).sqrt();
    let tval = (1.0 - r) / 2.0;
    let want = x * (1.0 / r) / tval;
    assert!((mean - want).abs() < 0.05 * want, "{} vs {}", mean, want);
}

#[test]
fn free_tree_samples_are_valid() {
    let g = grammar(FREE_TREES);
    let t = eval_system(&g, 0.3, 64).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..10_000 {
        let s = sample_boltzmann(&g, &t, g.root, &SampleOptions::default(), &mut rng).unwrap();
        assert!(s.is_valid(), "{:?}", s);
        assert!(s.symmetry().labels_complete());
        assert!(matches!(s, Sample::Pointed(_)));
    }
}

#[test]
fn set_of_atoms_cycle_types() {
    // SET(X) at s_i = x^i: the size-n cycle types have the weights of Z_Set
    let g = grammar("A = SET(X)");
    let x = 0.5;
    let t = eval_system(&g, x, 64).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let types: Vec<Vec<usize>> = vec![
        vec![],
        vec![1],
        vec![1, 1],
        vec![2],
        vec![1, 1, 1],
        vec![1, 2],
        vec![3],
    ];
    // 1/(prod i^m_i m_i!) x^n
    let w = [1.0, 0.5, 0.125, 0.125, 1.0 / 48.0, 0.0625, 0.125 / 3.0];
    let mut hist = vec![0usize; types.len()];
    for _ in 0..100_000 {
        let s = sample_boltzmann(&g, &t, 0, &SampleOptions::default(), &mut rng).unwrap();
        let mut ty: Vec<usize> = s.symmetry().cycles.iter().map(|c| c.len()).collect();
        ty.sort_unstable();
        if let Some(i) = types.iter().position(|t| *t == ty) {
            hist[i] += 1;
        }
    }
    let p = chi_square_p(&hist, &w);
    assert!(p > 0.001, "p = {} {:?}", p, hist);
}

#[test]
fn targeted_exact_size() {
    let g = grammar(FREE_TREES);
    let rho = polya::oracle::find_singularity(&g).unwrap().rho;
    let t = eval_system(&g, rho, 64).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..200 {
        let out = sample_targeted(&g, &t, g.root, Target::Exact(8), 1_000_000, &SampleOptions::default(), &mut rng)
            .unwrap();
        assert_eq!(out.sample.size(), 8);
        assert!(out.sample.is_valid());
    }
}

#[test]
fn targeted_impossible_size() {
    // X * SEQ(X * X) only has odd sizes
    let g = grammar("A = X * SEQ(X * X)");
    let t = eval_system(&g, 0.5, 64).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let err = sample_targeted(&g, &t, 0, Target::Exact(4), 10, &SampleOptions::default(), &mut rng).unwrap_err();
    assert!(matches!(err, Error::ImpossibleTarget(_)), "{:?}", err);
}

#[test]
fn fixed_seed_is_deterministic() {
    let g = grammar(FREE_TREES);
    let t = eval_system(&g, 0.33, 64).unwrap();
    let run = |seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..50)
            .map(|_| sample_boltzmann(&g, &t, g.root, &SampleOptions::default(), &mut rng).unwrap())
            .collect::<Vec<_>>()
    };
    assert_eq!(run(9), run(9));
}
