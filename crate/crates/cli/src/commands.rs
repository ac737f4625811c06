use std::fmt;
use std::hash::{BuildHasher, Hasher};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};

use nmutp::harness::{
    self, fmt_sig, CaseSummary, ExperimentConfig, NdjsonWriter, PrecisionConfig, QuartetSource, RunSpec,
};
use nmutp::nmutp::{find_example, CaseStudy};
use nmutp::sampling::{sample_state_with, HaarMethod, RngStream, SamplingOptions, SimplexMethod, SlotKind};

use crate::{parse, CaseArgs, Command, Common};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Numeric(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Io(m) | CliError::Numeric(m) => f.write_str(m),
        }
    }
}

impl From<nmutp::Error> for CliError {
    fn from(e: nmutp::Error) -> Self {
        match e {
            nmutp::Error::Io(_) | nmutp::Error::Json(_) => CliError::Io(e.to_string()),
            nmutp::Error::NoConvergence { .. } => CliError::Numeric(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn usage(m: String) -> CliError {
    CliError::Usage(m)
}

#[derive(Serialize)]
struct Document<'a, C: Serialize, R: Serialize> {
    command: &'a str,
    seed: u64,
    config: C,
    #[serde(skip_serializing_if = "Option::is_none")]
    runtime_seconds: Option<f64>,
    results: R,
}

struct Ctx<'a> {
    common: &'a Common,
    started: Instant,
}

impl Ctx<'_> {
    fn path(&self, name: &str) -> PathBuf {
        self.common.out.join(name)
    }

    fn write_doc<C: Serialize, R: Serialize>(
        &self,
        name: &str,
        command: &str,
        seed: u64,
        config: C,
        results: R,
    ) -> Result<PathBuf> {
        let doc = Document {
            command,
            seed,
            config,
            runtime_seconds: (!self.common.no_runtime).then(|| self.started.elapsed().as_secs_f64()),
            results,
        };
        let p = self.path(name);
        harness::write_json(&p, &doc)?;
        Ok(p)
    }

    /// `base`, overlaid with the config file's top-level keys, then the
    /// global flags. Prints a generated seed when none was given.
    fn config(&self, base: ExperimentConfig) -> Result<ExperimentConfig> {
        let mut value = serde_json::to_value(&base).expect("config serializes");
        let mut seed_given = self.common.seed.is_some();
        if let Some(path) = &self.common.config {
            let text =
                std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
            let file: Value =
                serde_json::from_str(&text).map_err(|e| usage(format!("config {}: {e}", path.display())))?;
            let Value::Object(entries) = file else {
                return Err(usage(format!("config {} must be a JSON object", path.display())));
            };
            seed_given |= entries.contains_key("seed");
            for (k, v) in entries {
                value[k] = v;
            }
        }
        let mut cfg: ExperimentConfig = serde_json::from_value(value).map_err(|e| usage(format!("config: {e}")))?;
        if let Some(s) = self.common.seed {
            cfg.seed = s;
        } else if !seed_given {
            cfg.seed = std::collections::hash_map::RandomState::new().build_hasher().finish();
            eprintln!("seed: {}", cfg.seed);
        }
        if let Some(n) = self.common.streams {
            cfg.n_streams = n;
        }
        Ok(cfg)
    }
}

fn default_config() -> ExperimentConfig {
    ExperimentConfig { n_streams: default_streams(), ..Default::default() }
}

fn default_streams() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

fn log_config(cfg: &ExperimentConfig) {
    log::info!("config {}", serde_json::to_string(cfg).expect("config serializes"));
}

fn apply_case(cfg: &mut ExperimentConfig, args: &CaseArgs) -> Result<()> {
    if let Some(row) = args.row {
        cfg.case = CaseStudy::table1(row)?;
    } else if let Some(s) = &args.slots {
        cfg.case = CaseStudy::new(parse::slots::<4>(s).map_err(usage)?, args.dim.unwrap_or(2))?;
    }
    Ok(())
}

fn sampling(spectrum: Option<&str>, haar: Option<&str>, base: SamplingOptions) -> Result<SamplingOptions> {
    Ok(SamplingOptions {
        simplex: spectrum.map(str::parse::<SimplexMethod>).transpose()?.unwrap_or(base.simplex),
        haar: haar.map(str::parse::<HaarMethod>).transpose()?.unwrap_or(base.haar),
    })
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| fmt_sig(v, 6)).unwrap_or_else(|| "-".into())
}

fn print_cases(rows: &[(String, CaseSummary)]) {
    println!("{:<5} {:<22} {:>10} {:>10} {:>10} {:>10} {:>10}", "row", "case", "n", "percent", "<G>", "dG", "G_max");
    for (row, c) in rows {
        println!(
            "{:<5} {:<22} {:>10} {:>10} {:>10} {:>10} {:>10}",
            row,
            c.case,
            c.n_total,
            fmt_sig(c.percentage, 6),
            opt(c.g_mean),
            opt(c.g_std),
            opt(c.g_max)
        );
    }
}

fn wrote(p: &Path) {
    log::info!("wrote {}", p.display());
}

pub fn run(command: Command, common: &Common) -> Result<ExitCode> {
    let ctx = Ctx { common, started: Instant::now() };
    match command {
        Command::Table1 { rows, n } => table1(&ctx, &rows, n),
        Command::Sweep { dims, n, reps, spectrum, haar } => sweep(&ctx, dims.as_deref(), n, reps, spectrum, haar),
        Command::Hist { pair, dim, n, bins } => hist(&ctx, &pair, dim, n, bins),
        Command::Strength { case, n, limit } => strength(&ctx, &case, n, limit),
        Command::Scan { case, n } => scan(&ctx, &case, n),
        Command::Validate { n_qubit, n_qudit, d_max, tolerance } => validate(&ctx, n_qubit, n_qudit, d_max, tolerance),
        Command::FindExample { case, target, tol, max_draws } => find(&ctx, &case, &target, tol, max_draws),
        Command::Sample { kind, dim, count, spectrum, haar } => sample(&ctx, &kind, dim, count, spectrum, haar),
    }
}

fn table1(ctx: &Ctx, rows: &str, n: Option<u64>) -> Result<ExitCode> {
    let rows = parse::rows(rows).map_err(usage)?;
    let mut cfg = ctx.config(default_config())?;
    if let Some(n) = n {
        cfg.n_quartets = n;
    }
    cfg.validate()?;
    log_config(&cfg);
    let mut results = Vec::new();
    for row in rows {
        let case = CaseStudy::table1(row)?;
        log::info!("row {row} {case}: {} quartets", cfg.n_quartets);
        let spec = RunSpec { source: QuartetSource::Case(case, cfg.sampling), ..RunSpec::from_config(&cfg) };
        results.push((row.to_string(), spec.summarize()?));
    }
    let cases: Vec<CaseSummary> = results.iter().map(|(_, c)| c.clone()).collect();
    let csv = ctx.path("table1.csv");
    harness::write_cases_csv(&csv, &cases, cfg.seed)?;
    wrote(&csv);
    let rows_json: Vec<Value> =
        results.iter().map(|(r, c)| json!({ "row": r.parse::<usize>().unwrap_or(0), "summary": c })).collect();
    wrote(&ctx.write_doc("table1.json", "table1", cfg.seed, &cfg, rows_json)?);
    print_cases(&results);
    Ok(ExitCode::SUCCESS)
}

fn sweep(
    ctx: &Ctx,
    dims: Option<&str>,
    n: Option<u64>,
    reps: Option<u16>,
    spectrum: Option<String>,
    haar: Option<String>,
) -> Result<ExitCode> {
    let dims = dims.map(parse::dims).transpose().map_err(usage)?;
    let base = ExperimentConfig { n_streams: default_streams(), ..ExperimentConfig::sweep(vec![2, 3, 4, 5, 6], 3, 0) };
    let mut cfg = ctx.config(base)?;
    if let Some(dims) = dims {
        cfg.dims = dims;
    }
    if let Some(n) = n {
        cfg.n_quartets = n;
        cfg.quartets_by_dim.clear();
    } else {
        for &d in &cfg.dims {
            cfg.quartets_by_dim.entry(d).or_insert_with(|| harness::default_sweep_quartets(d));
        }
    }
    if let Some(r) = reps {
        cfg.n_repetitions = r;
    }
    cfg.sampling = sampling(spectrum.as_deref(), haar.as_deref(), cfg.sampling)?;
    cfg.validate()?;
    log_config(&cfg);
    let points = harness::run_dimension_sweep(&cfg)?;
    let csv = ctx.path("sweep.csv");
    harness::write_sweep_csv(&csv, &points, cfg.seed)?;
    wrote(&csv);
    wrote(&ctx.write_doc("sweep.json", "sweep", cfg.seed, &cfg, &points)?);
    println!("{:<4} {:>9} {:>10} {:>10} {:>10}  <G> per repetition", "d", "n", "min %", "mean %", "max %");
    for p in &points {
        let gs: Vec<String> = p.g_mean_per_rep.iter().map(|g| opt(*g)).collect();
        println!(
            "{:<4} {:>9} {:>10} {:>10} {:>10}  {}",
            p.d,
            p.n_quartets,
            fmt_sig(100.0 * p.fraction_min, 6),
            fmt_sig(100.0 * p.fraction_mean, 6),
            fmt_sig(100.0 * p.fraction_max, 6),
            gs.join(" ")
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn hist(ctx: &Ctx, pair: &str, dim: usize, n: Option<u64>, bins: Option<usize>) -> Result<ExitCode> {
    let pair = parse::slots::<2>(pair).map_err(usage)?;
    let mut cfg = ctx.config(default_config())?;
    if let Some(n) = n {
        cfg.n_quartets = n;
    }
    if let Some(b) = bins {
        cfg.histogram_bins = b;
    }
    cfg.validate()?;
    let echo = json!({
        "pair": pair, "d": dim, "n_pairs": cfg.n_quartets, "histogram_bins": cfg.histogram_bins,
        "seed": cfg.seed, "n_streams": cfg.n_streams,
    });
    log::info!("config {echo}");
    let h = harness::run_td_histogram(pair, dim, cfg.n_quartets, cfg.histogram_bins, cfg.seed, cfg.n_streams)?;
    let stem = format!("hist_{}-{}_d{dim}", pair[0].label(), pair[1].label());
    let csv = ctx.path(&format!("{stem}.csv"));
    harness::write_histogram_csv(&csv, &h.histogram)?;
    wrote(&csv);
    wrote(&ctx.write_doc(&format!("{stem}.json"), "hist", cfg.seed, &echo, &h)?);
    println!("pairs {}  mean TD {} ± {}", h.n_pairs, fmt_sig(h.mean, 6), fmt_sig(h.std_err, 2));
    Ok(ExitCode::SUCCESS)
}

fn strength(ctx: &Ctx, case: &CaseArgs, n: Option<u64>, limit: Option<usize>) -> Result<ExitCode> {
    let mut cfg = ctx.config(default_config())?;
    apply_case(&mut cfg, case)?;
    if let Some(n) = n {
        cfg.n_quartets = n;
    }
    cfg.validate()?;
    log_config(&cfg);
    let out = harness::emit_strength_samples(&cfg, Some(limit.unwrap_or(5000)))?;
    let csv = ctx.path("strength.csv");
    harness::write_strength_csv(&csv, &out.samples)?;
    wrote(&csv);
    let results = json!({ "summary": out.summary, "band": out.band });
    wrote(&ctx.write_doc("strength.json", "strength", cfg.seed, &cfg, results)?);
    print_cases(&[("-".into(), out.summary.clone())]);
    match out.band {
        Some(b) => println!(
            "band [{}, {}] holds {} of {} samples",
            fmt_sig(b.lo, 6),
            fmt_sig(b.hi, 6),
            fmt_sig(b.fraction_in_band, 6),
            b.n_samples
        ),
        None => println!("no flagged quartets"),
    }
    Ok(ExitCode::SUCCESS)
}

fn scan(ctx: &Ctx, case: &CaseArgs, n: Option<u64>) -> Result<ExitCode> {
    let mut cfg = ctx.config(default_config())?;
    apply_case(&mut cfg, case)?;
    if let Some(n) = n {
        cfg.n_quartets = n;
    }
    cfg.validate()?;
    log_config(&cfg);
    let path = ctx.path("scan.ndjson");
    let mut w = NdjsonWriter::create(&path)?;
    let summary = RunSpec::from_config(&cfg).records(|r| w.write(r))?;
    w.finish()?;
    wrote(&path);
    wrote(&ctx.write_doc("scan.json", "scan", cfg.seed, &cfg, &summary)?);
    print_cases(&[("-".into(), summary)]);
    Ok(ExitCode::SUCCESS)
}

fn validate(ctx: &Ctx, n_qubit: u64, n_qudit: u64, d_max: usize, tolerance: f64) -> Result<ExitCode> {
    let base = ctx.config(default_config())?;
    let cfg = PrecisionConfig {
        n_qubit_pairs: n_qubit,
        n_qudit_pairs: n_qudit,
        d_max,
        seed: base.seed,
        n_streams: base.n_streams,
        tolerance,
    };
    log::info!("config {}", serde_json::to_string(&cfg).expect("config serializes"));
    let report = harness::run_precision_validation(&cfg)?;
    wrote(&ctx.write_doc("validate.json", "validate", cfg.seed, cfg, &report)?);
    println!("{:<10} {:>3} {:>8}  worst |numeric - analytic|", "class", "d", "pairs");
    for c in &report.classes {
        println!("{:<10} {:>3} {:>8}  {:.3e}", c.class, c.d, c.n_pairs, c.worst_error);
    }
    if report.pass {
        println!("all within {:e}", report.tolerance);
        Ok(ExitCode::SUCCESS)
    } else {
        println!("worst error {:.3e} exceeds {:e}", report.worst_error, report.tolerance);
        Ok(ExitCode::from(1))
    }
}

fn find(ctx: &Ctx, case: &CaseArgs, target: &str, tol: f64, max_draws: u64) -> Result<ExitCode> {
    let target = parse::target(target).map_err(usage)?;
    let mut cfg = ctx.config(default_config())?;
    apply_case(&mut cfg, case)?;
    cfg.validate()?;
    let echo = json!({ "case": cfg.case, "target": target, "tol": tol, "max_draws": max_draws, "seed": cfg.seed });
    log::info!("config {echo}");
    let mut s = RngStream::new(cfg.seed, 0);
    let Some(found) = find_example(&cfg.case, target, tol, &mut s, max_draws, &cfg.tolerances)? else {
        wrote(&ctx.write_doc("find_example.json", "find-example", cfg.seed, &echo, Value::Null)?);
        println!("no match within {max_draws} draws");
        return Ok(ExitCode::from(1));
    };
    let names = ["rho", "zeta", "xi", "eta"];
    let mut states = Vec::new();
    println!("match at draw {} ({})", found.draw, cfg.case);
    for (name, x) in names.iter().zip(found.quartet.states()) {
        if x.dim() == 2 {
            let b = x.bloch_vector()?;
            println!("  {name:<5} r={} theta={} phi={}", fmt_sig(b.norm, 6), fmt_sig(b.theta, 6), fmt_sig(b.phi, 6));
            states.push(json!({ "state": name, "r": b.norm, "theta": b.theta, "phi": b.phi }));
        } else {
            println!("  {name:<5} purity={}", fmt_sig(x.purity(), 6));
            states.push(json!({ "state": name, "purity": x.purity() }));
        }
    }
    let m = found.metrics;
    println!(
        "  d1={} d2={} dt1={} dt2={} G={}",
        fmt_sig(m.d1, 6),
        fmt_sig(m.d2, 6),
        fmt_sig(m.dt1, 6),
        fmt_sig(m.dt2, 6),
        opt(m.g)
    );
    let results = json!({ "draw": found.draw, "metrics": m, "states": states });
    wrote(&ctx.write_doc("find_example.json", "find-example", cfg.seed, &echo, results)?);
    Ok(ExitCode::SUCCESS)
}

fn sample(
    ctx: &Ctx,
    kind: &str,
    dim: usize,
    count: u64,
    spectrum: Option<String>,
    haar: Option<String>,
) -> Result<ExitCode> {
    let kind: SlotKind = kind.parse()?;
    kind.validate_dim(dim)?;
    let cfg = ctx.config(default_config())?;
    let opts = sampling(spectrum.as_deref(), haar.as_deref(), cfg.sampling)?;
    let mut s = RngStream::new(cfg.seed, 0);
    let path = ctx.path("samples.ndjson");
    let mut lines = String::new();
    for index in 0..count {
        let x = sample_state_with::<f64>(kind, dim, &opts, &mut s)?;
        let m = x.matrix();
        let re: Vec<Vec<f64>> = (0..dim).map(|i| (0..dim).map(|j| m[(i, j)].re).collect()).collect();
        let im: Vec<Vec<f64>> = (0..dim).map(|i| (0..dim).map(|j| m[(i, j)].im).collect()).collect();
        let mut rec = json!({ "index": index, "kind": kind, "d": dim, "purity": x.purity(), "re": re, "im": im });
        let mut line = format!("{index:>4}  purity {}", fmt_sig(x.purity(), 6));
        if dim == 2 {
            let b = x.bloch_cartesian()?;
            rec["bloch"] = json!(b);
            line += &format!("  bloch ({}, {}, {})", fmt_sig(b[0], 6), fmt_sig(b[1], 6), fmt_sig(b[2], 6));
        }
        println!("{line}");
        lines += &serde_json::to_string(&rec).expect("record serializes");
        lines.push('\n');
    }
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    }
    std::fs::write(&path, lines).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    wrote(&path);
    Ok(ExitCode::SUCCESS)
}
