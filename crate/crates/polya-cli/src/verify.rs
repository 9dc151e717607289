//! The acceptance suites. Each criterion returns a pass flag and a one-line detail.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use polya::enumerate::{d_regular_plane_tree_count, map_2conn_counts, map_2conn_via_series, plane_tree_count, solve};
use polya::families::{family, FamilySpec};
use polya::oracle::{eval_system, find_singularity, fit_singular_constants};
use polya::sampler::{sample_boltzmann, sample_targeted, Sample, SampleOptions, Target};
use polya::zindex::{CycleIndex, Monomial, Q};
use polya::{Error, Result};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::brute;

#[derive(Clone, Debug)]
pub struct Outcome {
    pub id: u32,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl Outcome {
    pub fn line(&self) -> String {
        format!(
            "{} [{:>2}] {} ({:.2}s): {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed.as_secs_f64(),
            self.detail
        )
    }
}

type Check = fn() -> Result<(bool, String)>;

pub const CRITERIA: [(u32, &str, Check); 11] = [
    (1, "cacti counts", cacti_counts),
    (2, "outerplanar counts", outerplanar_counts),
    (3, "trivalent trees by internal nodes", trivalent),
    (4, "free trees vs brute force and unbiased pointing", free_trees_brute),
    (5, "plane and d-regular plane tree formulas", plane_formulas),
    (6, "2-connected map formulas", maps),
    (7, "singularity constants", singularity_constants),
    (8, "sampler soundness", sampler_soundness),
    (9, "uniformity and size law", uniformity),
    (10, "series identities", series_identities),
    (11, "approximate-size scaling", scaling),
];

pub fn run_one(id: u32) -> Option<Outcome> {
    let &(id, name, f) = CRITERIA.iter().find(|c| c.0 == id)?;
    let start = Instant::now();
    let (pass, detail) = match f() {
        Ok(r) => r,
        Err(e) => (false, format!("error: {}", e)),
    };
    Some(Outcome { id, name, pass, detail, elapsed: start.elapsed() })
}

/// Runs the chosen criteria on up to `jobs` threads, in id order.
pub fn run(ids: &[u32], jobs: usize) -> Vec<Outcome> {
    let jobs = jobs.max(1);
    let mut out: Vec<Outcome> = Vec::new();
    for chunk in ids.chunks(jobs) {
        let done: Vec<Outcome> = std::thread::scope(|s| {
            let hs: Vec<_> = chunk
                .iter()
                .map(|&id| {
                    std::thread::Builder::new()
                        .stack_size(crate::STACK)
                        .spawn_scoped(s, move || run_one(id))
                        .expect("spawn")
                })
                .collect();
            hs.into_iter().filter_map(|h| h.join().expect("suite thread")).collect()
        });
        out.extend(done);
    }
    out
}

fn counts_u64(f: &FamilySpec, n: usize) -> Result<Vec<u64>> {
    f.counts(n)?
        .iter()
        .map(|c| c.to_u64().ok_or_else(|| Error::Internal("count overflow".into())))
        .collect()
}

fn timed<T>(f: impl FnOnce() -> Result<T>) -> Result<(T, f64)> {
    let t = Instant::now();
    let v = f()?;
    Ok((v, t.elapsed().as_secs_f64()))
}

fn graph_counts(name: &str, want: [u64; 7], limit: f64) -> Result<(bool, String)> {
    let f = family(name)?;
    let (c, secs) = timed(|| f.counts(30))?;
    let got: Vec<u64> = c[1..=7].iter().map(|x| x.to_u64().unwrap_or(u64::MAX)).collect();
    let ok = got == want && secs < limit;
    Ok((ok, format!("n=1..7 {:?}, trunc 30 in {:.3}s (limit {}s)", got, secs, limit)))
}

fn cacti_counts() -> Result<(bool, String)> {
    graph_counts("cacti", [1, 1, 2, 4, 9, 23, 63], 1.0)
}

fn outerplanar_counts() -> Result<(bool, String)> {
    graph_counts("outerplanar", [1, 1, 2, 5, 13, 46, 172], 5.0)
}

fn trivalent() -> Result<(bool, String)> {
    let want = [1u64, 1, 1, 1, 2, 2, 4, 6, 11, 18, 37, 66, 135, 265, 552, 1132];
    let f = family("omega_trees({1,3})")?;
    let top = f.size_for_internal(want.len() - 1).expect("trivalent reindexing");
    let c = counts_u64(&f, top)?;
    let got: Vec<u64> = (0..want.len()).map(|k| c[f.size_for_internal(k).expect("size")]).collect();
    Ok((got == want, format!("{:?}", got)))
}

fn free_trees_brute() -> Result<(bool, String)> {
    let f = family("free_trees")?;
    let c = counts_u64(&f, 9)?;
    let brute: Vec<u64> = (1..=9).map(brute::free_tree_count).collect();
    let grammar = c[1..].to_vec();
    let sys = solve(&f.grammar, 50)?;
    let pointed = &sys.ogs[f.root()].coeffs;
    let plain = f.counts(50)?;
    let bad = (1..=50).filter(|&n| pointed[n] != &plain[n] * BigInt::from(n)).count();
    Ok((
        grammar == brute && bad == 0,
        format!("grammar {:?}, Prüfer {:?}, pointing mismatches for n<=50: {}", grammar, brute, bad),
    ))
}

fn plane_formulas() -> Result<(bool, String)> {
    let f = family("plane_trees")?;
    let c = f.counts(13)?;
    let mut bad = Vec::new();
    for n in 1..=12usize {
        if c[n + 1] != plane_tree_count(n as u64)? {
            bad.push(format!("e_{}", n));
        }
    }
    for d in [3u32, 4] {
        let f = family(&format!("d_regular_plane_trees({})", d))?;
        let top = f.size_for_internal(8).expect("d-regular reindexing");
        let c = f.counts(top)?;
        for k in 0..=8usize {
            if c[f.size_for_internal(k).expect("size")] != d_regular_plane_tree_count(k as u64, d as u64)? {
                bad.push(format!("d={} n={}", d, k));
            }
        }
    }
    Ok((bad.is_empty(), if bad.is_empty() { "all agree".into() } else { format!("mismatches: {:?}", bad) }))
}

fn maps() -> Result<(bool, String)> {
    let mut ok = true;
    for n in 1..=30 {
        // map_2conn_counts errors when t_n is not an integer
        ok &= map_2conn_counts(n).is_ok();
    }
    let via = map_2conn_via_series(20)?;
    let agree = (1..=20u64).all(|n| map_2conn_counts(n).map(|m| m.t == via[n as usize - 1]).unwrap_or(false));
    let t1 = map_2conn_counts(1)?.t;
    let pass = ok && agree && t1 == BigInt::from(2);
    Ok((pass, format!("integral n<=30: {}, closed = series n<=20: {}, t_1 = {}", ok, agree, t1)))
}

fn singularity_constants() -> Result<(bool, String)> {
    let start = Instant::now();
    let r = family("rooted_trees")?;
    let rho = find_singularity(&r.grammar)?.rho;
    let fit = fit_singular_constants(&r.grammar, r.root(), rho)?;
    let c = fit.c;
    let f = family("free_trees")?;
    let n = 500;
    let fn_ = f.count(n)?.to_f64().unwrap_or(f64::INFINITY);
    let asym = 2.0 * std::f64::consts::PI * c.powi(3) * (n as f64).powf(-2.5) * rho.powi(-(n as i32));
    let ratio = fn_ / asym;
    let secs = start.elapsed().as_secs_f64();
    let pass = (rho - 0.33832).abs() <= 1e-4 && (c - 0.43922).abs() <= 0.01 * 0.43922 && (0.95..=1.05).contains(&ratio) && secs < 30.0;
    Ok((pass, format!("rho = {:.6}, c = {:.5}, F_500 ratio = {:.4}, {:.1}s", rho, c, ratio, secs)))
}

fn sampler_soundness() -> Result<(bool, String)> {
    let mut parts = Vec::new();
    let mut pass = true;
    for (i, name) in ["rooted_trees", "free_trees", "plane_trees", "cacti"].iter().enumerate() {
        let f = family(name)?;
        let rho = find_singularity(&f.grammar)?.rho;
        let t = eval_system(&f.grammar, 0.99 * rho, 64)?;
        let mut rng = ChaCha8Rng::seed_from_u64(800 + i as u64);
        let mut fails = 0;
        for _ in 0..10_000 {
            let s = sample_boltzmann(&f.grammar, &t, f.root(), &SampleOptions::default(), &mut rng)?;
            let labels = s.symmetry().labels_complete();
            let marked = match &s {
                Sample::Pointed(p) => p.symmetry.cycles_partition_atoms() && p.symmetry.cycles.iter().any(|c| c == p.marked_cycle()),
                Sample::Plain(_) => true,
            };
            if !(s.is_valid() && labels && marked) {
                fails += 1;
            }
        }
        pass &= fails == 0;
        parts.push(format!("{} {} failures", name, fails));
    }
    Ok((pass, parts.join(", ")))
}

/// Chi-square p-value; bins expected below 5 are pooled.
pub fn chi_square_p(observed: &[usize], probs: &[f64]) -> f64 {
    let n: usize = observed.iter().sum();
    let total: f64 = probs.iter().sum();
    let (mut stat, mut dof) = (0.0, 0usize);
    let (mut pool_o, mut pool_e) = (0.0, 0.0);
    for (o, p) in observed.iter().zip(probs) {
        let e = p / total * n as f64;
        if e < 5.0 {
            pool_o += *o as f64;
            pool_e += e;
        } else {
            stat += (*o as f64 - e).powi(2) / e;
            dof += 1;
        }
    }
    if pool_e > 0.0 {
        stat += (pool_o - pool_e).powi(2) / pool_e.max(1e-12);
        dof += 1;
    }
    if dof <= 1 {
        return 1.0;
    }
    let chi = ChiSquared::new((dof - 1) as f64).expect("dof");
    1.0 - chi.cdf(stat)
}

fn class_uniformity(name: &str, n: usize, seed: u64) -> Result<(f64, usize, usize)> {
    let f = family(name)?;
    let classes = f.count(n)?.to_usize().unwrap_or(0);
    let rho = find_singularity(&f.grammar)?.rho;
    let t = eval_system(&f.grammar, rho, 64)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hist: BTreeMap<String, usize> = BTreeMap::new();
    for _ in 0..50_000 {
        let out = sample_targeted(&f.grammar, &t, f.root(), Target::Exact(n), 10_000_000, &SampleOptions::default(), &mut rng)?;
        *hist.entry(f.canonical_form(out.sample.structure())?).or_default() += 1;
    }
    let obs: Vec<usize> = hist.values().copied().collect();
    Ok((chi_square_p(&obs, &vec![1.0; obs.len()]), hist.len(), classes))
}

fn size_law(name: &str, x: f64, seed: u64) -> Result<f64> {
    let f = family(name)?;
    let t = eval_system(&f.grammar, x, 64)?;
    let sys = solve(&f.grammar, 10)?;
    let total = t.var_value(f.root(), 1);
    let mut probs: Vec<f64> =
        (0..=10).map(|n| sys.ogs[f.root()].coeffs[n].to_f64().unwrap_or(0.0) * x.powi(n as i32) / total).collect();
    probs.push((1.0 - probs.iter().sum::<f64>()).max(0.0));
    let mut hist = vec![0usize; 12];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..100_000 {
        let s = sample_boltzmann(&f.grammar, &t, f.root(), &SampleOptions::default(), &mut rng)?;
        hist[s.size().min(11)] += 1;
    }
    Ok(chi_square_p(&hist, &probs))
}

fn uniformity() -> Result<(bool, String)> {
    let mut pass = true;
    let mut parts = Vec::new();
    for (i, (name, n)) in [("free_trees", 8), ("cacti", 6), ("plane_trees", 7)].iter().enumerate() {
        let (p, seen, classes) = class_uniformity(name, *n, 900 + i as u64)?;
        pass &= p > 0.001 && seen == classes;
        parts.push(format!("{} n={} {}/{} classes p={:.3}", name, n, seen, classes, p));
    }
    for (i, name) in ["rooted_trees", "free_trees"].iter().enumerate() {
        let p = size_law(name, 0.3, 950 + i as u64)?;
        pass &= p > 0.001;
        parts.push(format!("{} size law p={:.3}", name, p));
    }
    Ok((pass, parts.join("; ")))
}

fn random_series(rng: &mut dyn RngCore, trunc: usize, constant: bool) -> CycleIndex {
    let mut z = CycleIndex::zero(trunc, false);
    let terms = rng.random_range(1..6);
    for _ in 0..terms {
        let mut pairs = Vec::new();
        let mut w = 0;
        let want = rng.random_range(if constant { 0 } else { 1 }..=trunc.min(6));
        while w < want {
            let i = rng.random_range(1..=3u32.min((want - w) as u32));
            pairs.push((i, 1));
            w += i as usize;
        }
        let c = Q::new(BigInt::from(rng.random_range(-5i64..=5)), BigInt::from(rng.random_range(1i64..=4)));
        z.insert(Monomial::from_pairs(&pairs, None), c);
    }
    z
}

/// `Δ(f∘g) = (Δf)⊚g`, `Δ(fg) = Δf g + f Δg` and `Δ(f+g) = Δf + Δg`.
pub fn series_identities_with(seed: u64, cases: usize) -> Result<(usize, usize, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut chain, mut leibniz, mut additive) = (0, 0, 0);
    for _ in 0..cases {
        let trunc = rng.random_range(1..=12);
        let f = random_series(&mut rng, trunc, true);
        let g = random_series(&mut rng, trunc, false);
        let d = |z: &CycleIndex| z.delta_point(1);
        if d(&f.plethysm(&g)?)? == d(&f)?.pointed_plethysm(&g)? {
            chain += 1;
        }
        if d(&f.mul(&g)?)? == d(&f)?.mul(&g)?.add(&f.mul(&d(&g)?)?)? {
            leibniz += 1;
        }
        if d(&f.add(&g)?)? == d(&f)?.add(&d(&g)?)? {
            additive += 1;
        }
    }
    Ok((chain, leibniz, additive))
}

fn series_identities() -> Result<(bool, String)> {
    let (a, b, c) = series_identities_with(1010, 50)?;
    Ok((a == 50 && b == 50 && c == 50, format!("chain {}/50, Leibniz {}/50, additivity {}/50", a, b, c)))
}

fn approx_time(f: &FamilySpec, t: &polya::oracle::EvalTable, n: usize, reps: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = Instant::now();
    for _ in 0..reps {
        let out = sample_targeted(
            &f.grammar,
            t,
            f.root(),
            Target::Approx { n, eps: 0.1 },
            u64::MAX,
            &SampleOptions { labeled: false },
            &mut rng,
        )?;
        let s = out.sample.size();
        if !(s as f64 >= 0.9 * n as f64 && s as f64 <= 1.1 * n as f64) {
            return Err(Error::Internal(format!("size {} outside the window around {}", s, n)));
        }
    }
    Ok(start.elapsed().as_secs_f64() / reps as f64)
}

fn scaling() -> Result<(bool, String)> {
    let f = family("free_trees")?;
    let rho = find_singularity(&f.grammar)?.rho;
    let t = eval_system(&f.grammar, rho, 64)?;
    let t3 = approx_time(&f, &t, 1_000, 400, 1101)?;
    let t4 = approx_time(&f, &t, 10_000, 80, 1102)?;
    let start = Instant::now();
    let t5 = approx_time(&f, &t, 100_000, 10, 1103)?;
    let one = start.elapsed().as_secs_f64() / 10.0;
    // growth per decade within a factor 2 of linear
    let (r1, r2) = (t4 / t3, t5 / t4);
    let pass = r1 <= 20.0 && r2 <= 20.0 && one < 60.0;
    Ok((
        pass,
        format!(
            "mean time per sample {:.2e}s / {:.2e}s / {:.2e}s, decade ratios {:.1} and {:.1} (limit 20)",
            t3, t4, t5, r1, r2
        ),
    ))
}

pub fn all_ids() -> Vec<u32> {
    CRITERIA.iter().map(|c| c.0).collect()
}

/// Extra check outside the numbered criteria: graph families against Burnside counts.
pub fn brute_graphs(max: usize) -> Result<(bool, String)> {
    let c = counts_u64(&family("cacti")?, max)?;
    let o = counts_u64(&family("outerplanar")?, max)?;
    let bc: Vec<u64> = (1..=max).map(brute::cacti_count).collect();
    let bo: Vec<u64> = (1..=max).map(brute::outerplanar_count).collect();
    let pass = c[1..] == bc[..] && o[1..] == bo[..];
    Ok((pass, format!("cacti {:?} vs {:?}; outerplanar {:?} vs {:?}", &c[1..], bc, &o[1..], bo)))
}
