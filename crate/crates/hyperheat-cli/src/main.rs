//! `hyperheat`: evaluate heat kernels on hyperbolic and radially symmetric
//! spaces, sweep them over radius grids, compare the small-time expansions
//! against Gruet's formula, and run validation suites.
//!
//! Exit codes: 0 success, 1 validation failure, 2 usage, 3 numerical
//! failure, 4 I/O failure.

mod config;
mod csvfmt;
mod suites;
mod svg;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use config::{load_config, resolve_seed, ConfigDefaults, DEFAULT_PATHS};
use csvfmt::fmt_sig;
use hyperheat::bessel::GridKind;
use hyperheat::expansions::{small_time_kernel, straight_line_path, unbiased_path};
use hyperheat::kernels::closed::{gruet, heat_kernel_h3, heat_kernel_mckean};
use hyperheat::kernels::mc::{
    heat_kernel_mc, heat_kernel_mc_at_origin, radial_sym_kernel_mc, McConfig,
};
use hyperheat::kernels::{KernelError, KernelValue, Method};
use hyperheat::profiles::{builtin_profile, BuiltinProfile};
use hyperheat::specfun::QuadratureSpec;
use hyperheat::{expansions, Dimension};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numerical(String),
    Io(String),
    ChecksFailed,
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::ChecksFailed => 1,
            CliError::Usage(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<KernelError> for CliError {
    fn from(e: KernelError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<expansions::ExpansionError> for CliError {
    fn from(e: expansions::ExpansionError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "hyperheat",
    about = "Heat kernels on hyperbolic and radially symmetric spaces",
    version
)]
struct Cli {
    /// Config file with key=value defaults for paths/steps/seed
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one kernel value; prints "method,n,T,r,value,stderr"
    Eval(EvalArgs),
    /// Evaluate methods over a radius grid and write a CSV
    Sweep(SweepArgs),
    /// Compare small-time expansions against Gruet over a radius grid
    Compare(CompareArgs),
    /// Run a named validation suite
    Validate(ValidateArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GridArg {
    Uniform,
    Geometric,
}

impl From<GridArg> for GridKind {
    fn from(g: GridArg) -> Self {
        match g {
            GridArg::Uniform => GridKind::Uniform,
            GridArg::Geometric => GridKind::Geometric,
        }
    }
}

#[derive(Args, Clone)]
struct McFlags {
    /// Monte Carlo path count
    #[arg(long)]
    paths: Option<u64>,
    /// Time steps per path (default: 200 per unit time)
    #[arg(long)]
    steps: Option<usize>,
    /// RNG seed (falls back to config file, then HYPERHEAT_SEED)
    #[arg(long)]
    seed: Option<u64>,
    /// Time grid spacing
    #[arg(long, value_enum, default_value_t = GridArg::Uniform)]
    grid: GridArg,
    /// Antithetic variates (negates the Gaussian increments pairwise)
    #[arg(long)]
    antithetic: bool,
}

impl McFlags {
    fn build(&self, t_end: f64, defaults: &ConfigDefaults) -> McConfig {
        let mut cfg = McConfig::new(
            self.paths.or(defaults.paths).unwrap_or(DEFAULT_PATHS),
            self.steps
                .or(defaults.steps)
                .unwrap_or_else(|| McConfig::default_steps(t_end)),
            resolve_seed(self.seed, defaults),
        );
        cfg.grid_kind = self.grid.into();
        cfg.antithetic = self.antithetic;
        cfg
    }
}

#[derive(Args)]
struct EvalArgs {
    /// Dimension n >= 2
    #[arg(long)]
    n: u32,
    /// Time horizon
    #[arg(long = "T")]
    t: f64,
    /// Geodesic distance
    #[arg(long)]
    r: f64,
    /// exact3 | mckean | gruet | mc_bridge | series | small_time
    #[arg(long)]
    method: String,
    /// Radial profile for mc_bridge/small_time: euclidean | hyperbolic | scaled:k
    #[arg(long)]
    profile: Option<String>,
    #[command(flatten)]
    mc: McFlags,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    n: u32,
    #[arg(long = "T")]
    t: f64,
    #[arg(long = "r-min")]
    r_min: f64,
    #[arg(long = "r-max")]
    r_max: f64,
    /// Number of grid points (inclusive endpoints)
    #[arg(long, default_value_t = 101)]
    points: usize,
    /// Comma-separated list of methods
    #[arg(long, value_delimiter = ',')]
    methods: Vec<String>,
    /// Output CSV path
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    profile: Option<String>,
    #[command(flatten)]
    mc: McFlags,
}

#[derive(Args)]
struct CompareArgs {
    /// Dimension; when omitted, runs n in {2, 4, 5, 6} with suffixed files
    #[arg(long)]
    n: Option<u32>,
    #[arg(long = "T", default_value_t = 1.0)]
    t: f64,
    #[arg(long = "r-min", default_value_t = 0.1)]
    r_min: f64,
    #[arg(long = "r-max", default_value_t = 5.0)]
    r_max: f64,
    #[arg(long, default_value_t = 100)]
    points: usize,
    /// Output CSV path
    #[arg(long)]
    out: PathBuf,
    /// Optional SVG chart path
    #[arg(long)]
    svg: Option<PathBuf>,
    #[command(flatten)]
    mc: McFlags,
}

#[derive(Args)]
struct ValidateArgs {
    /// normalization | consistency | order | bessel
    #[arg(long)]
    suite: String,
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let defaults = match cli.config.as_deref().map(load_config).transpose() {
        Ok(d) => d.unwrap_or_default(),
        Err(e) => return fail(e),
    };
    let result = match cli.command {
        Command::Eval(args) => cmd_eval(&args, &defaults),
        Command::Sweep(args) => cmd_sweep(&args, &defaults),
        Command::Compare(args) => cmd_compare(&args, &defaults),
        Command::Validate(args) => cmd_validate(&args, &defaults),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(e),
    }
}

fn fail(e: CliError) -> ExitCode {
    match &e {
        CliError::Usage(msg) => eprintln!("usage error: {msg}"),
        CliError::Numerical(msg) => eprintln!("numerical failure: {msg}"),
        CliError::Io(msg) => eprintln!("io error: {msg}"),
        CliError::ChecksFailed => {}
    }
    ExitCode::from(e.code())
}

fn parse_dimension(n: u32) -> Result<Dimension, CliError> {
    Dimension::new(n).map_err(|e| CliError::Usage(e.to_string()))
}

fn parse_method(s: &str) -> Result<Method, CliError> {
    s.parse().map_err(CliError::Usage)
}

fn parse_profile(s: &str) -> Result<BuiltinProfile, CliError> {
    if s == "euclidean" {
        return Ok(BuiltinProfile::Euclidean);
    }
    if s == "hyperbolic" {
        return Ok(BuiltinProfile::Hyperbolic);
    }
    if let Some(k) = s.strip_prefix("scaled:") {
        let k: f64 = k
            .parse()
            .map_err(|e| CliError::Usage(format!("bad scale in profile '{s}': {e}")))?;
        return Ok(BuiltinProfile::ScaledHyperbolic(k));
    }
    Err(CliError::Usage(format!(
        "unknown profile '{s}' (euclidean | hyperbolic | scaled:k)"
    )))
}

/// Evaluates one method at `(n, T, r)`. The optional profile reroutes the
/// stochastic and small-time methods through the radially symmetric
/// representation.
fn evaluate(
    method: Method,
    n: Dimension,
    t: f64,
    r: f64,
    profile: Option<&BuiltinProfile>,
    cfg: &McConfig,
) -> Result<KernelValue, CliError> {
    if !(t > 0.0) {
        return Err(CliError::Usage(format!("T must be positive, got {t}")));
    }
    if !(r >= 0.0) {
        return Err(CliError::Usage(format!("r must be nonnegative, got {r}")));
    }
    let resolved_profile = profile
        .map(|p| builtin_profile(*p).map_err(|e| CliError::Usage(e.to_string())))
        .transpose()?;
    match method {
        Method::Exact3 => {
            if n.get() != 3 {
                return Err(CliError::Usage(format!(
                    "method exact3 requires --n 3, got {n}"
                )));
            }
            Ok(heat_kernel_h3(t, r)?)
        }
        Method::Mckean => {
            if n.get() != 2 {
                return Err(CliError::Usage(format!(
                    "method mckean requires --n 2, got {n}"
                )));
            }
            Ok(heat_kernel_mckean(t, r, &QuadratureSpec::default_gl())?)
        }
        Method::Gruet => Ok(gruet(n, t, r, &QuadratureSpec::default_oscillatory())?),
        Method::McBridge => match &resolved_profile {
            Some(p) => {
                if r == 0.0 {
                    return Err(CliError::Usage(
                        "radial mc_bridge needs r > 0".to_string(),
                    ));
                }
                Ok(radial_sym_kernel_mc(p, n, t, r, cfg)?)
            }
            None if r == 0.0 => Ok(heat_kernel_mc_at_origin(n, t, cfg)?),
            None => Ok(heat_kernel_mc(n, t, r, cfg)?),
        },
        Method::SmallTime => {
            if r == 0.0 {
                return Err(CliError::Usage("small_time needs r > 0".to_string()));
            }
            match &resolved_profile {
                Some(p) => Ok(expansions::radial_sym_small_time(p, n, t, r)?),
                None => {
                    let path = expansion_path(n, t, r, cfg.steps)?;
                    Ok(small_time_kernel(n, t, r, &path)?)
                }
            }
        }
        Method::Series => {
            if resolved_profile.is_some() {
                return Err(CliError::Usage(
                    "series is not available for radial profiles".to_string(),
                ));
            }
            if r == 0.0 {
                return Err(CliError::Usage("series needs r > 0".to_string()));
            }
            let path = expansion_path(n, t, r, cfg.steps)?;
            Ok(expansions::series_kernel(n, t, r, 4, &path, cfg)?)
        }
    }
}

/// Unbiased deterministic path, except at n = 3 where g vanishes and any
/// path yields the same kernel; the straight line keeps the type total.
fn expansion_path(
    n: Dimension,
    t: f64,
    r: f64,
    steps: usize,
) -> Result<expansions::DeterministicPath, CliError> {
    let grid = hyperheat::bessel::time_grid(GridKind::Uniform, t, steps);
    if n.get() == 3 {
        Ok(straight_line_path(t, r, &grid))
    } else {
        Ok(unbiased_path(n, t, r, &grid)?)
    }
}

fn cmd_eval(args: &EvalArgs, defaults: &ConfigDefaults) -> Result<(), CliError> {
    let n = parse_dimension(args.n)?;
    let method = parse_method(&args.method)?;
    let profile = args.profile.as_deref().map(parse_profile).transpose()?;
    let cfg = args.mc.build(args.t, defaults);
    let out = evaluate(method, n, args.t, args.r, profile.as_ref(), &cfg)?;
    println!(
        "{},{},{},{},{},{}",
        method,
        n,
        fmt_sig(args.t),
        fmt_sig(args.r),
        fmt_sig(out.value),
        out.stderr.map(fmt_sig).unwrap_or_default()
    );
    Ok(())
}

fn radius_grid(r_min: f64, r_max: f64, points: usize) -> Result<Vec<f64>, CliError> {
    if !(r_min >= 0.0) || !(r_max > r_min) {
        return Err(CliError::Usage(format!(
            "need 0 <= r-min < r-max, got [{r_min}, {r_max}]"
        )));
    }
    if points < 2 {
        return Err(CliError::Usage("need at least 2 grid points".to_string()));
    }
    let h = (r_max - r_min) / (points - 1) as f64;
    Ok((0..points)
        .map(|i| {
            if i + 1 == points {
                r_max
            } else {
                r_min + h * i as f64
            }
        })
        .collect())
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

fn cmd_sweep(args: &SweepArgs, defaults: &ConfigDefaults) -> Result<(), CliError> {
    let n = parse_dimension(args.n)?;
    if args.methods.is_empty() {
        return Err(CliError::Usage("need at least one --methods entry".to_string()));
    }
    let methods = args
        .methods
        .iter()
        .map(|m| parse_method(m))
        .collect::<Result<Vec<_>, _>>()?;
    let profile = args.profile.as_deref().map(parse_profile).transpose()?;
    let cfg = args.mc.build(args.t, defaults);
    let grid = radius_grid(args.r_min, args.r_max, args.points)?;

    let mut csv = String::from("r,method,value,stderr\n");
    for &r in &grid {
        for &method in &methods {
            let out = evaluate(method, n, args.t, r, profile.as_ref(), &cfg)?;
            csv.push_str(&format!(
                "{},{},{},{}\n",
                fmt_sig(r),
                method,
                fmt_sig(out.value),
                out.stderr.map(fmt_sig).unwrap_or_default()
            ));
        }
    }
    write_file(&args.out, &csv)
}

fn suffixed(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    let ext = path.extension().and_then(|s| s.to_str());
    let name = match ext {
        Some(ext) => format!("{stem}{suffix}.{ext}"),
        None => format!("{stem}{suffix}"),
    };
    path.with_file_name(name)
}

fn cmd_compare(args: &CompareArgs, defaults: &ConfigDefaults) -> Result<(), CliError> {
    let dims: Vec<u32> = match args.n {
        Some(n) => vec![n],
        None => vec![2, 4, 5, 6],
    };
    let multi = dims.len() > 1;
    for &nv in &dims {
        let n = parse_dimension(nv)?;
        let cfg = args.mc.build(args.t, defaults);
        let grid = radius_grid(args.r_min, args.r_max, args.points)?;

        let mut rows = Vec::with_capacity(grid.len());
        for &r in &grid {
            let g = gruet(n, args.t, r, &QuadratureSpec::default_oscillatory())?.value;
            let straight = small_time_kernel(
                n,
                args.t,
                r,
                &straight_line_path(
                    args.t,
                    r,
                    &hyperheat::bessel::time_grid(GridKind::Uniform, args.t, cfg.steps),
                ),
            )?
            .value;
            let unbiased = small_time_kernel(n, args.t, r, &expansion_path(n, args.t, r, cfg.steps)?)?.value;
            rows.push((r, g, straight, unbiased));
        }

        let mut csv = String::from("r,gruet,small_time_straight,small_time_unbiased\n");
        for (r, g, s, u) in &rows {
            csv.push_str(&format!(
                "{},{},{},{}\n",
                fmt_sig(*r),
                fmt_sig(*g),
                fmt_sig(*s),
                fmt_sig(*u)
            ));
        }
        let out_path = if multi {
            suffixed(&args.out, &format!("_n{nv}"))
        } else {
            args.out.clone()
        };
        write_file(&out_path, &csv)?;

        if let Some(svg_path) = &args.svg {
            // kernels decay through orders of magnitude; chart log10(p)
            let series = [
                ("gruet", "red"),
                ("small_time_straight", "green"),
                ("small_time_unbiased", "blue"),
            ];
            let columns: [Vec<(f64, f64)>; 3] = [
                rows.iter().map(|(r, g, _, _)| (*r, g.log10())).collect(),
                rows.iter().map(|(r, _, s, _)| (*r, s.log10())).collect(),
                rows.iter().map(|(r, _, _, u)| (*r, u.log10())).collect(),
            ];
            let chart: Vec<svg::Series<'_>> = series
                .iter()
                .zip(columns.iter())
                .map(|((name, color), points)| svg::Series {
                    name,
                    color,
                    points: points.clone(),
                })
                .collect();
            let rendered = svg::render_line_chart(
                &chart,
                "geodesic distance r",
                &format!("log10 p(T={}, r), n={nv}", args.t),
            );
            let svg_out = if multi {
                suffixed(svg_path, &format!("_n{nv}"))
            } else {
                svg_path.clone()
            };
            write_file(&svg_out, &rendered)?;
        }
    }
    Ok(())
}

fn cmd_validate(args: &ValidateArgs, defaults: &ConfigDefaults) -> Result<(), CliError> {
    let seed = resolve_seed(args.seed, defaults);
    let checks = suites::run_suite(&args.suite, seed).ok_or_else(|| {
        CliError::Usage(format!(
            "unknown suite '{}' (normalization | consistency | order | bessel)",
            args.suite
        ))
    })?;
    let mut all_pass = true;
    for c in &checks {
        all_pass &= c.pass;
        println!(
            "{} | observed {} | bound {} | {}",
            c.name,
            fmt_sig(c.observed),
            fmt_sig(c.bound),
            if c.pass { "pass" } else { "FAIL" }
        );
    }
    if all_pass {
        println!("suite {}: all {} checks passed", args.suite, checks.len());
        Ok(())
    } else {
        println!("suite {}: FAILURES present", args.suite);
        Err(CliError::ChecksFailed)
    }
}
