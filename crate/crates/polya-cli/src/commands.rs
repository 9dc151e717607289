//! Argument parsing and the command implementations.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use polya::enumerate::solve;
use polya::families::{cacti_terminals, family, outerplanar_terminals, registry, FamilySpec, SizeUnit};
use polya::grammar::{parse, validate, Sort, TerminalSet, Validated};
use polya::oracle::{eval_system, find_singularity, fit_singular_constants, EvalTable};
use polya::sampler::{sample_bounded, sample_targeted, Sample, SampleOptions, Target};
use polya::{Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::verify;

/// Evaluation point used when the series still converges at 1.
const EDGE: f64 = 1.0 - 1e-9;

#[derive(Parser, Debug)]
#[command(name = "polya", version, about = "Count and sample unlabeled combinatorial structures")]
pub struct Cli {
    /// Output format for tables and reports.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

/// A built-in family name or a path to a `.spec` file.
#[derive(Args, Debug, Clone)]
pub struct Source {
    /// Family, e.g. `cacti`, `omega_trees({1,3})`, or a `.spec` file.
    pub input: String,
    /// Block series bound to terminals declared in a `.spec` file.
    #[arg(long, value_enum)]
    pub blocks: Option<Blocks>,
    /// Variable to use instead of the root.
    #[arg(long)]
    pub var: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Blocks {
    Cacti,
    Outerplanar,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum By {
    Size,
    InternalNodes,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Number of unlabeled structures of size n.
    Count {
        #[command(flatten)]
        src: Source,
        n: usize,
        #[arg(long, value_enum, default_value_t = By::Size)]
        by: By,
    },
    /// Coefficients of every variable up to a degree.
    Coeffs {
        #[command(flatten)]
        src: Source,
        #[arg(long, env = crate::TRUNC_ENV, default_value_t = 20)]
        upto: usize,
    },
    /// Random structures as JSON lines.
    Sample(SampleArgs),
    /// Generating function values at x, x^2, ...
    Gf {
        #[command(flatten)]
        src: Source,
        #[arg(long)]
        at: f64,
        #[arg(long, default_value_t = 64)]
        bits: u32,
    },
    /// Radius of convergence and square-root fit constants.
    Singularity {
        #[command(flatten)]
        src: Source,
    },
    /// List the built-in families.
    Families,
    /// Parse and validate a specification.
    Check {
        #[command(flatten)]
        src: Source,
    },
    /// Run acceptance criteria: `all`, a number 1..11, or `brute`.
    Verify {
        #[arg(default_value = "all")]
        suites: Vec<String>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

#[derive(Args, Debug)]
pub struct SampleArgs {
    #[command(flatten)]
    pub src: Source,
    /// Target size; without it each run is a free Boltzmann draw.
    #[arg(long)]
    pub size: Option<usize>,
    /// Accept only the exact size (the default when --size is given).
    #[arg(long, conflicts_with = "eps")]
    pub exact: bool,
    /// Accept sizes within a factor 1 +- eps of --size.
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Keep the sampler's atom ids instead of a uniform relabelling.
    #[arg(long)]
    pub unlabeled: bool,
    /// Boltzmann parameter; defaults to the singularity.
    #[arg(long)]
    pub x: Option<f64>,
    /// Rejection attempts per targeted sample.
    #[arg(long, default_value_t = 100_000_000)]
    pub attempts: u64,
    /// Free draws larger than this are rejected and redrawn.
    #[arg(long, default_value_t = 1_000_000)]
    pub max_size: usize,
}

/// A loaded input: a built-in family or a validated file.
pub struct Input {
    pub name: String,
    pub family: Option<FamilySpec>,
    pub grammar: Validated,
}

impl Input {
    pub fn load(src: &Source) -> Result<Input> {
        let path = Path::new(&src.input);
        if src.input.ends_with(".spec") || path.is_file() {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Usage(format!("cannot read {}: {}", src.input, e)))?;
            let terms = match src.blocks {
                None => TerminalSet::new(),
                Some(Blocks::Cacti) => cacti_terminals(),
                Some(Blocks::Outerplanar) => outerplanar_terminals(),
            };
            let grammar = validate(&parse(&text)?, &terms)?;
            return Ok(Input { name: src.input.clone(), family: None, grammar });
        }
        if src.blocks.is_some() {
            return Err(Error::Usage("--blocks only applies to .spec files".into()));
        }
        let f = family(&src.input)?;
        Ok(Input { name: f.name.clone(), grammar: f.grammar.clone(), family: Some(f) })
    }

    fn var(&self, src: &Source) -> Result<usize> {
        match &src.var {
            Some(v) => self.grammar.var_or_err(v),
            None => Ok(self.grammar.root),
        }
    }

    fn counts(&self, var: usize, trunc: usize) -> Result<Vec<BigInt>> {
        let ogs = &solve(&self.grammar, trunc)?.ogs[var];
        Ok(if self.grammar.sorts[var] == Sort::Pointed { ogs.unpoint()?.coeffs } else { ogs.coeffs.clone() })
    }
}

/// Parses `argv` (program name first) and runs the command on a large-stack thread.
pub fn run(argv: &[String], out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { crate::EXIT_USAGE } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    std::thread::scope(|s| {
        std::thread::Builder::new()
            .stack_size(crate::STACK)
            .spawn_scoped(s, move || execute(&cli, out, err))
            .expect("spawn")
            .join()
            .unwrap_or(crate::EXIT_INTERNAL)
    })
}

fn execute(cli: &Cli, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> i32 {
    let r = match &cli.command {
        Command::Verify { suites, jobs } => return verify_cmd(suites, *jobs, cli.format, out, err),
        Command::Count { src, n, by } => count(src, *n, *by, out),
        Command::Coeffs { src, upto } => coeffs(src, *upto, cli.format, out),
        Command::Sample(a) => sample(a, out),
        Command::Gf { src, at, bits } => gf(src, *at, *bits, cli.format, out),
        Command::Singularity { src } => singularity(src, cli.format, out),
        Command::Families => families(cli.format, out),
        Command::Check { src } => check(src, cli.format, out),
    };
    match r {
        Ok(()) => 0,
        Err(e) => {
            if cli.format == Format::Json {
                let _ = writeln!(err, "{}", serde_json::json!({"error": e.kind(), "message": e.to_string()}));
            } else {
                let _ = writeln!(err, "polya: {}", e);
            }
            crate::exit_code(&e)
        }
    }
}

fn io(e: std::io::Error) -> Error {
    Error::Internal(format!("write failed: {}", e))
}

fn count(src: &Source, n: usize, by: By, out: &mut dyn Write) -> Result<()> {
    let input = Input::load(src)?;
    let var = input.var(src)?;
    let size = match by {
        By::Size => n,
        By::InternalNodes => input
            .family
            .as_ref()
            .and_then(|f| f.size_for_internal(n))
            .ok_or_else(|| Error::Usage(format!("{} has no internal-node indexing", input.name)))?,
    };
    let c = input.counts(var, size)?;
    writeln!(out, "{}", c[size]).map_err(io)
}

fn coeffs(src: &Source, upto: usize, format: Format, out: &mut dyn Write) -> Result<()> {
    let input = Input::load(src)?;
    let g = &input.grammar;
    let sys = solve(g, upto)?;
    let vars: Vec<usize> = match &src.var {
        Some(v) => vec![g.var_or_err(v)?],
        None => (0..g.vars.len()).collect(),
    };
    let mut s = String::new();
    match format {
        Format::Text => {
            // pointed columns hold the raw pointed counts n a_n
            let _ = write!(s, "n");
            for &v in &vars {
                let _ = write!(s, "\t{}", g.vars[v]);
            }
            s.push('\n');
            for n in 0..=upto {
                let _ = write!(s, "{}", n);
                for &v in &vars {
                    let _ = write!(s, "\t{}", sys.ogs[v].coeffs[n]);
                }
                s.push('\n');
            }
        }
        Format::Json => {
            let _ = write!(s, "{{\"upto\":{},\"root\":{},\"coeffs\":{{", upto, serde_json::json!(g.root_name()));
            for (i, &v) in vars.iter().enumerate() {
                let list: Vec<String> = sys.ogs[v].coeffs.iter().map(|c| c.to_string()).collect();
                let sep = if i > 0 { "," } else { "" };
                let _ = write!(s, "{}{}:[{}]", sep, serde_json::json!(g.vars[v]), list.join(","));
            }
            s.push_str("}}\n");
        }
    }
    out.write_all(s.as_bytes()).map_err(io)
}

/// Default Boltzmann parameter: the singularity, or just below 1.
fn default_x(g: &Validated) -> Result<f64> {
    let s = find_singularity(g)?;
    Ok(if s.at_one { EDGE } else { s.rho })
}

fn sample_line(name: &str, s: &Sample, attempts: Option<u64>) -> String {
    let st = s.structure();
    let labels = serde_json::to_string(&st.atoms()).expect("labels");
    // the structure is emitted verbatim: deep trees exceed serde_json's nesting limit
    let mut line = format!(
        "{{\"size\":{},\"family\":{},\"structure\":{},\"labels\":{}",
        s.size(),
        serde_json::json!(name),
        st.render(),
        labels
    );
    if let Some(c) = s.marked_cycle() {
        let _ = write!(line, ",\"marked_cycle\":{}", serde_json::to_string(c).expect("cycle"));
    }
    if let Some(a) = attempts {
        let _ = write!(line, ",\"attempts\":{}", a);
    }
    line.push('}');
    line
}

fn sample(a: &SampleArgs, out: &mut dyn Write) -> Result<()> {
    let input = Input::load(&a.src)?;
    if let Some(f) = &input.family {
        if !f.samplable {
            return Err(Error::Unsupported(format!(
                "{} is available for counting only; sampling it needs dissection-based samplers",
                f.name
            )));
        }
    }
    let g = &input.grammar;
    let var = input.var(&a.src)?;
    let target = match (a.size, a.eps) {
        (None, Some(_)) => return Err(Error::Usage("--eps needs --size".into())),
        (None, None) if a.exact => return Err(Error::Usage("--exact needs --size".into())),
        (None, None) => None,
        (Some(n), Some(eps)) if eps > 0.0 && eps < 1.0 => Some(Target::Approx { n, eps }),
        (Some(_), Some(eps)) => return Err(Error::Usage(format!("--eps must lie in (0, 1), got {}", eps))),
        (Some(n), None) => Some(Target::Exact(n)),
    };
    let x = match a.x {
        Some(x) if x > 0.0 && x < 1.0 => x,
        Some(x) => return Err(Error::Usage(format!("--x must lie in (0, 1), got {}", x))),
        None => default_x(g)?,
    };
    let table = eval_system(g, x, polya::oracle::DEFAULT_PRECISION_BITS)?;
    let opts = SampleOptions { labeled: !a.unlabeled };
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    for _ in 0..a.count {
        let line = match target {
            Some(t) => {
                let r = sample_targeted(g, &table, var, t, a.attempts, &opts, &mut rng)?;
                sample_line(&input.name, &r.sample, Some(r.attempts))
            }
            None => {
                let s = free_draw(g, &table, var, a.max_size, a.attempts, &opts, &mut rng)?;
                sample_line(&input.name, &s, None)
            }
        };
        writeln!(out, "{}", line).map_err(io)?;
    }
    Ok(())
}

fn free_draw(
    g: &Validated,
    t: &EvalTable,
    var: usize,
    max_size: usize,
    attempts: u64,
    opts: &SampleOptions,
    rng: &mut ChaCha8Rng,
) -> Result<Sample> {
    for _ in 0..attempts {
        if let Some(s) = sample_bounded(g, t, var, max_size, opts, rng)? {
            return Ok(s);
        }
    }
    Err(Error::Numeric(format!("every draw exceeded --max-size {}", max_size)))
}

fn gf(src: &Source, at: f64, bits: u32, format: Format, out: &mut dyn Write) -> Result<()> {
    let input = Input::load(src)?;
    let g = &input.grammar;
    let t = eval_system(g, at, bits)?;
    let vars: Vec<usize> = match &src.var {
        Some(v) => vec![g.var_or_err(v)?],
        None => (0..g.vars.len()).collect(),
    };
    let s = match format {
        Format::Json => {
            let mut m = serde_json::Map::new();
            for &v in &vars {
                let d: Vec<serde_json::Value> = (1..=t.k_max).map(|l| finite(t.var_dvalue(v, l))).collect();
                m.insert(
                    g.vars[v].clone(),
                    serde_json::json!({"values": t.var_values(v), "dvalues": d}),
                );
            }
            let doc = serde_json::json!({"x": t.x, "k_max": t.k_max, "precision_bits": t.precision_bits, "vars": m});
            format!("{}\n", doc)
        }
        Format::Text => {
            let mut s = format!("x = {}, k_max = {}, precision_bits = {}\n", t.x, t.k_max, t.precision_bits);
            for &v in &vars {
                let vals: Vec<String> = t.var_values(v).iter().map(|x| format!("{:.12e}", x)).collect();
                let _ = writeln!(s, "{}\t{}", g.vars[v], vals.join(" "));
            }
            s
        }
    };
    out.write_all(s.as_bytes()).map_err(io)
}

fn finite(x: f64) -> serde_json::Value {
    if x.is_finite() {
        serde_json::json!(x)
    } else {
        serde_json::Value::Null
    }
}

fn singularity(src: &Source, format: Format, out: &mut dyn Write) -> Result<()> {
    let input = Input::load(src)?;
    let g = &input.grammar;
    let var = input.var(src)?;
    let sing = find_singularity(g)?;
    if sing.at_one {
        let s = match format {
            Format::Json => format!("{}\n", serde_json::json!({"rho": 1.0, "at_one": true})),
            Format::Text => "rho = 1 (series converge up to 1; no square-root fit)\n".to_string(),
        };
        return out.write_all(s.as_bytes()).map_err(io);
    }
    let fit = fit_singular_constants(g, var, sing.rho)?;
    let s = match format {
        Format::Json => format!(
            "{}\n",
            serde_json::json!({
                "var": g.vars[var], "rho": fit.rho, "a0": fit.a0, "a": fit.a, "c": fit.c,
                "residual": fit.residual, "warning": fit.warning,
            })
        ),
        Format::Text => {
            let mut s = format!(
                "var = {}\nrho = {:.12}\na0 = {:.12}\na = {:.12}\nc = {:.12}\nresidual = {:.3e}\n",
                g.vars[var], fit.rho, fit.a0, fit.a, fit.c, fit.residual
            );
            if let Some(w) = &fit.warning {
                let _ = writeln!(s, "warning: {}", w);
            }
            s
        }
    };
    out.write_all(s.as_bytes()).map_err(io)
}

fn families(format: Format, out: &mut dyn Write) -> Result<()> {
    let mut s = String::new();
    for (pattern, f) in polya::families::FAMILY_NAMES.iter().zip(registry()) {
        let unit = match f.unit {
            SizeUnit::Vertices => "vertices",
            SizeUnit::Leaves => "leaves",
        };
        match format {
            Format::Json => {
                let _ = writeln!(
                    s,
                    "{}",
                    serde_json::json!({
                        "name": pattern, "example": f.name, "samplable": f.samplable,
                        "size": unit, "singularity": f.singularity,
                    })
                );
            }
            Format::Text => {
                let tag = if f.samplable { "" } else { " (counting only)" };
                let _ = writeln!(s, "{:<26} size = {}, {}{}", pattern, unit, f.singularity, tag);
            }
        }
    }
    out.write_all(s.as_bytes()).map_err(io)
}

fn check(src: &Source, format: Format, out: &mut dyn Write) -> Result<()> {
    let input = Input::load(src)?;
    let g = &input.grammar;
    let sorts: Vec<&str> = g
        .sorts
        .iter()
        .map(|s| if *s == Sort::Pointed { "pointed" } else { "unpointed" })
        .collect();
    let s = match format {
        Format::Json => {
            let vars: Vec<serde_json::Value> = g
                .vars
                .iter()
                .zip(&sorts)
                .map(|(v, s)| serde_json::json!({"name": v, "sort": s}))
                .collect();
            format!("{}\n", serde_json::json!({"ok": true, "root": g.root_name(), "vars": vars}))
        }
        Format::Text => {
            let mut s = format!("ok: {} variables, root {}\n", g.vars.len(), g.root_name());
            for (v, sort) in g.vars.iter().zip(&sorts) {
                let _ = writeln!(s, "  {} : {}", v, sort);
            }
            s
        }
    };
    out.write_all(s.as_bytes()).map_err(io)
}

fn verify_cmd(suites: &[String], jobs: usize, format: Format, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let mut ids = Vec::new();
    let mut brute = false;
    for s in suites {
        match s.as_str() {
            "all" => ids.extend(verify::all_ids()),
            "brute" => brute = true,
            other => match other.parse::<u32>() {
                Ok(i) if verify::CRITERIA.iter().any(|c| c.0 == i) => ids.push(i),
                _ => {
                    let _ = writeln!(err, "polya: unknown suite {} (expected all, brute or 1..11)", other);
                    return crate::EXIT_USAGE;
                }
            },
        }
    }
    ids.sort_unstable();
    ids.dedup();
    let mut ok = true;
    for o in verify::run(&ids, jobs) {
        ok &= o.pass;
        let line = match format {
            Format::Json => serde_json::json!({
                "id": o.id, "name": o.name, "pass": o.pass, "detail": o.detail,
                "seconds": o.elapsed.as_secs_f64(),
            })
            .to_string(),
            Format::Text => o.line(),
        };
        let _ = writeln!(out, "{}", line);
    }
    if brute {
        let (pass, detail) = verify::brute_graphs(7).unwrap_or_else(|e| (false, format!("error: {}", e)));
        ok &= pass;
        let _ = writeln!(out, "{} [brute] graph families vs Burnside: {}", if pass { "PASS" } else { "FAIL" }, detail);
    }
    if ok {
        0
    } else {
        crate::EXIT_INTERNAL
    }
}
