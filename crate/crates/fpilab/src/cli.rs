//! Command-line surface: `eval`, `verify`, `sweep`, `converge`, `catalog`.
//!
//! Every flag can also be supplied through `--config <file>` (plain
//! `key = value` lines, `#` comments, keys equal to the flag names); explicit
//! flags override file keys. Exit codes: 0 ok, 2 usage or violated
//! hypothesis, 3 numerical failure, 4 invalid report rows.

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::lattice::catalog::{parse_func, standard_catalog, CatalogFn};
use crate::lattice::{io::save_field, make_grid, Cube, LatticeGrid};
use crate::maximal::{maximal_function, riesz_potential, MaximalInput, MaximalSpec, MaximalVariant};
use crate::seminorm::{
    gagliardo_seminorm, marcinkiewicz_quasinorm, poincare_oscillation, product_kernel_samples,
    sobolev_seminorm,
};
use crate::verify::{
    alpha_delta_p, check_hypotheses, convergence_study, convergence_to_csv, fmt_real,
    reports_to_csv, sort_rows, summarize, verify_inequality, InequalityId, InequalityReport,
    VerifyParams,
};
use crate::weights::{
    a1_constant, ap_constant, parse_atoms, parse_weight, Atom, MeasureSpec, WeightSpec,
};

#[derive(Parser)]
#[command(name = "fpilab", version, about = "Numerical laboratory for weighted fractional Poincaré–Sobolev inequalities")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate one quantity: gagliardo, sobolev, oscillation, marcinkiewicz,
    /// a1, ap, maximal, riesz, alpha
    Eval {
        quantity: String,
        #[command(flatten)]
        args: RawArgs,
    },
    /// Verify inequalities: one CSV report row per admissible combination
    Verify {
        #[command(flatten)]
        args: RawArgs,
    },
    /// Parameter sweep with per-id summary lines
    Sweep {
        #[command(flatten)]
        args: RawArgs,
    },
    /// Grid-convergence study over an ascending resolution list
    Converge {
        #[command(flatten)]
        args: RawArgs,
    },
    /// List the function and weight catalogs
    Catalog,
}

#[derive(Args, Default, Clone)]
struct RawArgs {
    /// Plain-text config file; flags override its keys
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output path (stdout when absent)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (results are byte-identical for any count)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for the deterministic pair subsampling
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Suppress warnings
    #[arg(long, global = true)]
    quiet: bool,
    /// Dimension 1..=3
    #[arg(long)]
    dim: Option<usize>,
    /// Cells per axis; a comma list for `converge`
    #[arg(long)]
    grid: Option<String>,
    /// Inequality ids, comma-separated
    #[arg(long)]
    id: Option<String>,
    /// Integrability exponents p, comma-separated
    #[arg(long)]
    p: Option<String>,
    /// Smoothness orders delta (alpha for the maximal/Riesz ids)
    #[arg(long)]
    delta: Option<String>,
    /// Weight specs, `;`-separated
    #[arg(long)]
    weight: Option<String>,
    /// Function ids, `;`-separated (plain names may use commas)
    #[arg(long)]
    func: Option<String>,
    /// Atom list `x1,..:m;...`
    #[arg(long)]
    atoms: Option<String>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    /// Near-diagonal subdivision depth for the Gagliardo sum
    #[arg(long = "diagonal-depth")]
    diagonal_depth: Option<usize>,
    /// Fractional order for `eval maximal` / `eval riesz`
    #[arg(long)]
    alpha: Option<f64>,
    /// Maximal variant: centered, noncentered, local, weighted
    #[arg(long)]
    variant: Option<String>,
    /// Evaluation point for `eval riesz` (snapped to the nearest node)
    #[arg(long)]
    point: Option<String>,
    /// Weak-quasinorm exponent for `eval marcinkiewicz`
    #[arg(long)]
    q: Option<f64>,
    /// Normalize the weak quasinorm by the total measure
    #[arg(long)]
    normalized: Option<bool>,
    /// Cube corner (defaults to the origin)
    #[arg(long)]
    corner: Option<String>,
    /// Cube side (defaults to 1)
    #[arg(long)]
    side: Option<f64>,
}

/// Fully resolved run configuration.
struct RunConfig {
    out: Option<PathBuf>,
    threads: Option<usize>,
    seed: u64,
    quiet: bool,
    dim: usize,
    grids: Vec<usize>,
    ids: Vec<InequalityId>,
    ps: Vec<f64>,
    deltas: Vec<f64>,
    weights: Vec<WeightSpec>,
    funcs: Vec<CatalogFn>,
    atoms: Vec<Atom>,
    eta: Option<f64>,
    r: f64,
    beta: Option<f64>,
    diagonal_depth: usize,
    alpha: f64,
    variant: String,
    point: Vec<f64>,
    q_exp: f64,
    normalized: bool,
    corner: Vec<f64>,
    side: f64,
}

impl RunConfig {
    fn verify_params(&self) -> VerifyParams {
        VerifyParams {
            eta: self.eta,
            r: self.r,
            beta: self.beta,
            diagonal_depth: self.diagonal_depth,
            seed: self.seed,
            max_pairs: 100_000_000,
        }
    }

    fn cube(&self) -> Result<Cube> {
        let mut corner = self.corner.clone();
        if corner.is_empty() {
            corner = vec![0.0; self.dim];
        }
        if corner.len() != self.dim {
            return Err(Error::Parse(format!(
                "corner has {} coordinates for dimension {}",
                corner.len(),
                self.dim
            )));
        }
        Cube::new(&corner, self.side)
    }

    fn grid(&self) -> Result<LatticeGrid> {
        make_grid(self.cube()?, self.grids[0])
    }
}

fn load_config_file(path: &PathBuf) -> Result<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path)?;
    let mut out = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("config line {}: expected `key = value`", no + 1)))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

fn parse_list<T: FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<T>().map_err(|_| Error::Parse(format!("bad {what} entry `{t}`"))))
        .collect()
}

/// Spec lists are `;`-separated; pieces without `:`/`(` may also be split on
/// commas, so `gauss,oscillatory` and `power:a=0.5,center=0,0` both parse.
fn split_spec_list(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    for piece in s.split(';') {
        let piece = piece.trim();
        if piece.is_empty() {
            continue;
        }
        if piece.contains(':') || piece.contains('(') {
            out.push(piece.to_string());
        } else {
            out.extend(piece.split(',').map(|t| t.trim().to_string()).filter(|t| !t.is_empty()));
        }
    }
    out
}

fn resolve(args: &RawArgs) -> Result<RunConfig> {
    // Overlay order: defaults, then config file, then explicit flags.
    let mut merged = args.clone();
    if let Some(path) = &args.config {
        for (k, v) in load_config_file(path)? {
            apply_config_key(&mut merged, args, &k, &v)?;
        }
    }
    let dim = merged.dim.unwrap_or(1);
    if !(1..=3).contains(&dim) {
        return Err(Error::Parse(format!("dimension {dim} not in 1..=3")));
    }
    let grids: Vec<usize> = match &merged.grid {
        Some(g) => parse_list(g, "grid")?,
        None => vec![32],
    };
    if grids.is_empty() {
        return Err(Error::Parse("empty grid list".into()));
    }
    let ids = match &merged.id {
        Some(s) => s
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(InequalityId::from_str)
            .collect::<Result<Vec<_>>>()?,
        None => Vec::new(),
    };
    let ps = match &merged.p {
        Some(s) => parse_list(s, "p")?,
        None => vec![2.0],
    };
    let deltas = match &merged.delta {
        Some(s) => parse_list(s, "delta")?,
        None => vec![0.5],
    };
    let weights = match &merged.weight {
        Some(s) => split_spec_list(s)
            .iter()
            .map(|w| parse_weight(w))
            .collect::<Result<Vec<_>>>()?,
        None => vec![WeightSpec::Constant { c: 1.0 }],
    };
    let funcs = match &merged.func {
        Some(s) => split_spec_list(s)
            .iter()
            .map(|f| parse_func(f))
            .collect::<Result<Vec<_>>>()?,
        None => vec![CatalogFn::Gauss { sigma: 0.2 }],
    };
    let atoms = match &merged.atoms {
        Some(s) => parse_atoms(s.strip_prefix("atoms=").unwrap_or(s))?,
        None => Vec::new(),
    };
    let point = match &merged.point {
        Some(s) => parse_list(s, "point")?,
        None => Vec::new(),
    };
    let corner = match &merged.corner {
        Some(s) => parse_list(s, "corner")?,
        None => Vec::new(),
    };
    Ok(RunConfig {
        out: merged.out.clone(),
        threads: merged.threads,
        seed: merged.seed.unwrap_or(0),
        quiet: merged.quiet,
        dim,
        grids,
        ids,
        ps,
        deltas,
        weights,
        funcs,
        atoms,
        eta: merged.eta,
        r: merged.r.unwrap_or(1.0),
        beta: merged.beta,
        diagonal_depth: merged.diagonal_depth.unwrap_or(0),
        alpha: merged.alpha.unwrap_or(0.0),
        variant: merged.variant.clone().unwrap_or_else(|| "noncentered".to_string()),
        point,
        q_exp: merged.q.unwrap_or(1.0),
        normalized: merged.normalized.unwrap_or(false),
        corner,
        side: merged.side.unwrap_or(1.0),
    })
}

/// Config keys mirror the flag names; a key is applied only when the flag was
/// not given explicitly.
fn apply_config_key(merged: &mut RawArgs, explicit: &RawArgs, key: &str, value: &str) -> Result<()> {
    let bad_num = || Error::Parse(format!("config key `{key}`: bad value `{value}`"));
    match key {
        "out" if explicit.out.is_none() => merged.out = Some(PathBuf::from(value)),
        "threads" if explicit.threads.is_none() => {
            merged.threads = Some(value.parse().map_err(|_| bad_num())?)
        }
        "seed" if explicit.seed.is_none() => merged.seed = Some(value.parse().map_err(|_| bad_num())?),
        "quiet" if !explicit.quiet => merged.quiet = value.parse().map_err(|_| bad_num())?,
        "dim" if explicit.dim.is_none() => merged.dim = Some(value.parse().map_err(|_| bad_num())?),
        "grid" if explicit.grid.is_none() => merged.grid = Some(value.to_string()),
        "id" if explicit.id.is_none() => merged.id = Some(value.to_string()),
        "p" if explicit.p.is_none() => merged.p = Some(value.to_string()),
        "delta" if explicit.delta.is_none() => merged.delta = Some(value.to_string()),
        "weight" if explicit.weight.is_none() => merged.weight = Some(value.to_string()),
        "func" if explicit.func.is_none() => merged.func = Some(value.to_string()),
        "atoms" if explicit.atoms.is_none() => merged.atoms = Some(value.to_string()),
        "eta" if explicit.eta.is_none() => merged.eta = Some(value.parse().map_err(|_| bad_num())?),
        "r" if explicit.r.is_none() => merged.r = Some(value.parse().map_err(|_| bad_num())?),
        "beta" if explicit.beta.is_none() => merged.beta = Some(value.parse().map_err(|_| bad_num())?),
        "diagonal-depth" if explicit.diagonal_depth.is_none() => {
            merged.diagonal_depth = Some(value.parse().map_err(|_| bad_num())?)
        }
        "alpha" if explicit.alpha.is_none() => {
            merged.alpha = Some(value.parse().map_err(|_| bad_num())?)
        }
        "variant" if explicit.variant.is_none() => merged.variant = Some(value.to_string()),
        "point" if explicit.point.is_none() => merged.point = Some(value.to_string()),
        "q" if explicit.q.is_none() => merged.q = Some(value.parse().map_err(|_| bad_num())?),
        "normalized" if explicit.normalized.is_none() => {
            merged.normalized = Some(value.parse().map_err(|_| bad_num())?)
        }
        "corner" if explicit.corner.is_none() => merged.corner = Some(value.to_string()),
        "side" if explicit.side.is_none() => merged.side = Some(value.parse().map_err(|_| bad_num())?),
        _ if matches!(
            key,
            "out" | "threads"
                | "seed"
                | "quiet"
                | "dim"
                | "grid"
                | "id"
                | "p"
                | "delta"
                | "weight"
                | "func"
                | "atoms"
                | "eta"
                | "r"
                | "beta"
                | "diagonal-depth"
                | "alpha"
                | "variant"
                | "point"
                | "q"
                | "normalized"
                | "corner"
                | "side"
        ) => {} // flag given explicitly, config ignored
        _ => return Err(Error::Parse(format!("unknown config key `{key}`"))),
    }
    Ok(())
}

fn emit(out: &Option<PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, content).map_err(Error::from),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn first_measure(cfg: &RunConfig) -> Result<MeasureSpec> {
    MeasureSpec::new(Some(cfg.weights[0].clone()), cfg.atoms.clone())
}

fn cmd_eval(quantity: &str, cfg: &RunConfig) -> Result<()> {
    let value = match quantity {
        "alpha" => alpha_delta_p(cfg.deltas[0], cfg.ps[0]),
        "gagliardo" => {
            let grid = cfg.grid()?;
            let u = cfg.funcs[0].sample(&grid)?;
            gagliardo_seminorm(
                &u,
                cfg.ps[0],
                cfg.deltas[0],
                &first_measure(cfg)?,
                grid.cube(),
                cfg.diagonal_depth,
            )?
        }
        "sobolev" => {
            let grid = cfg.grid()?;
            let u = cfg.funcs[0].sample(&grid)?;
            sobolev_seminorm(&u, cfg.ps[0], &cfg.weights[0].normalize(cfg.dim)?, grid.cube())?
        }
        "oscillation" => {
            let grid = cfg.grid()?;
            let u = cfg.funcs[0].sample(&grid)?;
            poincare_oscillation(&u, grid.cube())?
        }
        "marcinkiewicz" => {
            let grid = cfg.grid()?;
            let u = cfg.funcs[0].sample(&grid)?;
            let set = product_kernel_samples(
                &u,
                cfg.deltas[0],
                &cfg.weights[0].normalize(cfg.dim)?,
                grid.cube(),
                100_000_000,
                cfg.seed,
            )?;
            marcinkiewicz_quasinorm(&set.samples, cfg.q_exp, cfg.normalized)?
        }
        "a1" => a1_constant(&cfg.weights[0], &cfg.grid()?)?.constant,
        "ap" => ap_constant(&cfg.weights[0], cfg.ps[0], &cfg.grid()?)?.constant,
        "maximal" => {
            let grid = cfg.grid()?;
            let variant = match cfg.variant.as_str() {
                "centered" => MaximalVariant::Centered,
                "noncentered" => MaximalVariant::Noncentered,
                "local" => MaximalVariant::Local(*grid.cube()),
                "weighted" => MaximalVariant::WeightedCentered(cfg.weights[0].normalize(cfg.dim)?),
                other => return Err(Error::Parse(format!("unknown maximal variant `{other}`"))),
            };
            let input = if matches!(variant, MaximalVariant::WeightedCentered(_)) {
                MaximalInput::Field(cfg.funcs[0].sample(&grid)?)
            } else {
                MaximalInput::Measure(first_measure(cfg)?)
            };
            let spec = MaximalSpec::new(variant, cfg.alpha, input);
            let field = maximal_function(&spec, &grid)?;
            let max = field.values().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            if let Some(path) = &cfg.out {
                save_field(&field, path)?;
            }
            println!("{}", fmt_real(max));
            return Ok(());
        }
        "riesz" => {
            let grid = cfg.grid()?;
            if cfg.point.len() != cfg.dim {
                return Err(Error::Parse("riesz needs --point with one coordinate per axis".into()));
            }
            let node = grid.nearest_node(&cfg.point);
            let alpha = if cfg.alpha > 0.0 { cfg.alpha } else { 0.5 };
            riesz_potential(&first_measure(cfg)?, alpha, node, &grid, grid.cube())?
        }
        other => return Err(Error::Parse(format!("unknown quantity `{other}`"))),
    };
    println!("{}", fmt_real(value));
    if let Some(path) = &cfg.out {
        std::fs::write(path, format!("quantity,value\n{quantity},{}\n", fmt_real(value)))?;
    }
    Ok(())
}

/// Build the report rows for a verify/sweep invocation. When nothing is
/// admissible the first hypothesis failure is surfaced.
fn run_rows(cfg: &RunConfig, grids: &[usize]) -> Result<Vec<InequalityReport>> {
    if cfg.ids.is_empty() {
        return Err(Error::Parse("no inequality id given (use --id)".into()));
    }
    let params = cfg.verify_params();
    let mut combos = Vec::new();
    let mut first_err: Option<Error> = None;
    for &res in grids {
        for &id in &cfg.ids {
            for &delta in &cfg.deltas {
                for &p in &cfg.ps {
                    for w in &cfg.weights {
                        for f in &cfg.funcs {
                            match check_hypotheses(id, cfg.dim, p, delta) {
                                Ok(()) => combos.push((res, id, delta, p, w.clone(), f.clone())),
                                Err(e) => {
                                    log::info!("skipped: {e}");
                                    if first_err.is_none() {
                                        first_err = Some(e);
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    if combos.is_empty() {
        return Err(first_err.unwrap_or(Error::NothingToSweep));
    }
    use rayon::prelude::*;
    let cube = cfg.cube()?;
    let rows: Result<Vec<InequalityReport>> = combos
        .par_iter()
        .map(|(res, id, delta, p, w, f)| {
            let grid = make_grid(cube, *res)?;
            verify_inequality(*id, f, w, &cfg.atoms, *p, *delta, &params, &grid)
        })
        .collect();
    let mut rows = rows?;
    sort_rows(&mut rows);
    Ok(rows)
}

/// Exit code 4 marker for invalid rows.
struct InvalidRows;

fn cmd_verify(cfg: &RunConfig) -> Result<std::result::Result<(), InvalidRows>> {
    let rows = run_rows(cfg, &cfg.grids[..1])?;
    let any_invalid = rows.iter().any(|r| !r.is_valid());
    emit(&cfg.out, &reports_to_csv(&rows, &[]))?;
    Ok(if any_invalid { Err(InvalidRows) } else { Ok(()) })
}

fn cmd_sweep(cfg: &RunConfig) -> Result<std::result::Result<(), InvalidRows>> {
    let rows = run_rows(cfg, &cfg.grids)?;
    let any_invalid = rows.iter().any(|r| !r.is_valid());
    let summaries = summarize(&rows);
    emit(&cfg.out, &reports_to_csv(&rows, &summaries))?;
    Ok(if any_invalid { Err(InvalidRows) } else { Ok(()) })
}

fn cmd_converge(cfg: &RunConfig) -> Result<()> {
    if cfg.ids.len() != 1 {
        return Err(Error::Parse("converge needs exactly one --id".into()));
    }
    let table = convergence_study(
        cfg.ids[0],
        &cfg.funcs[0],
        &cfg.weights[0],
        &cfg.atoms,
        cfg.ps[0],
        cfg.deltas[0],
        &cfg.verify_params(),
        cfg.cube()?,
        &cfg.grids,
    )?;
    emit(&cfg.out, &convergence_to_csv(&table))
}

fn cmd_catalog() {
    println!("functions (defaults shown; parameters via `name:key=value`):");
    for f in standard_catalog() {
        println!("  {}", f.id());
    }
    println!("  scale:c=<v>*(<func>)");
    println!("weights:");
    println!("  constant:c=<v>");
    println!("  power:a=<v>,center=<c1,..>");
    println!("  step:axis=<i>,t=<v>,lo=<v>,hi=<v>");
    println!("  prod:(<spec>)*(<spec>)");
    println!("atoms: atoms=<x1,..:m>;<...>");
    println!("inequality ids:");
    for id in crate::verify::ALL_IDS {
        println!("  {id}");
    }
}

fn dispatch(cli: Cli) -> i32 {
    let (args, work): (RawArgs, Box<dyn FnOnce(&RunConfig) -> i32 + Send>) = match cli.cmd {
        Cmd::Catalog => {
            cmd_catalog();
            return 0;
        }
        Cmd::Eval { quantity, args } => (
            args,
            Box::new(move |cfg| match cmd_eval(&quantity, cfg) {
                Ok(()) => 0,
                Err(e) => report_error(e),
            }),
        ),
        Cmd::Verify { args } => (
            args,
            Box::new(|cfg| match cmd_verify(cfg) {
                Ok(Ok(())) => 0,
                Ok(Err(InvalidRows)) => 4,
                Err(e) => report_error(e),
            }),
        ),
        Cmd::Sweep { args } => (
            args,
            Box::new(|cfg| match cmd_sweep(cfg) {
                Ok(Ok(())) => 0,
                Ok(Err(InvalidRows)) => 4,
                Err(e) => report_error(e),
            }),
        ),
        Cmd::Converge { args } => (
            args,
            Box::new(|cfg| match cmd_converge(cfg) {
                Ok(()) => 0,
                Err(e) => report_error(e),
            }),
        ),
    };
    let cfg = match resolve(&args) {
        Ok(cfg) => cfg,
        Err(e) => return report_error(e),
    };
    init_logging(cfg.quiet);
    match cfg.threads {
        Some(t) => {
            let pool = match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
                Ok(p) => p,
                Err(e) => {
                    eprintln!("fpilab: cannot build thread pool: {e}");
                    return 3;
                }
            };
            pool.install(|| work(&cfg))
        }
        None => work(&cfg),
    }
}

fn report_error(e: Error) -> i32 {
    eprintln!("fpilab: {e}");
    if e.is_usage() {
        2
    } else {
        3
    }
}

fn init_logging(quiet: bool) {
    let mut builder = env_logger::Builder::from_default_env();
    if quiet {
        builder.filter_level(log::LevelFilter::Off);
    }
    builder.try_init().ok();
}

/// Entry point used by the binary; returns the process exit code.
pub fn run() -> i32 {
    match Cli::try_parse() {
        Ok(cli) => dispatch(cli),
        Err(e) => {
            // clap prints help/version on stdout with success status.
            let code = if e.use_stderr() { 2 } else { 0 };
            e.print().ok();
            code
        }
    }
}
