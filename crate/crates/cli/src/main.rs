//! `halfspace`: evaluate kernels and solutions, tabulate expansions and run
//! the verification suites.

mod data;
mod output;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use halfspace::expansions::{divergence_demo, exp_example_coefficient, growth_onset, AsymptoticExpansion};
use halfspace::geometry::{BoundaryPoint, Direction, HalfSpacePoint};
use halfspace::kernels::{kernel_bound_first, KernelParams};
use halfspace::quadrature::{self, BoundaryData, Estimate, Problem, QuadratureSpec};
use halfspace::report::{Status, Tally};
use halfspace::verification::{self, DEFAULT_SEED};

use data::{parse_list, DataParams};
use output::{write_reports, Cell, Format, Table};

const EXIT_FAIL: u8 = 1;
const EXIT_INCONCLUSIVE: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(name = "halfspace", version, about = "Modified Poisson integrals on the half space", args_override_self = true)]
struct Cli {
    /// Seed for sampled checks.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Worker threads (0: one per core).
    #[arg(long, global = true, env = "HALFSPACE_JOBS", default_value_t = 0)]
    jobs: usize,
    /// File of `key=value` lines, one per long option; command-line flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output format (default: csv for eval/expand, json for verify).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the table here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a kernel or a solution operator on a grid of points.
    #[command(allow_negative_numbers = true)]
    Eval(EvalArgs),
    /// Tabulate expansion coefficients, partial sums and remainders.
    #[command(allow_negative_numbers = true)]
    Expand(ExpandArgs),
    /// Run a verification suite and emit one report per check.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KernelChoice {
    /// `K`.
    #[value(name = "K")]
    K,
    /// `K_M`, first kind.
    #[value(name = "KM")]
    Km,
    /// `K̃_M`, second kind.
    #[value(name = "KMtilde")]
    KmTilde,
    /// The majorant of `|K_M|`.
    #[value(name = "bound")]
    Bound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SolutionChoice {
    #[value(name = "D")]
    D,
    #[value(name = "N")]
    N,
    #[value(name = "DM")]
    Dm,
    #[value(name = "NM")]
    Nm,
    #[value(name = "u")]
    U,
    #[value(name = "v")]
    V,
    #[value(name = "F")]
    F,
    #[value(name = "Ftilde")]
    FTilde,
}

#[derive(Args, Debug, Clone)]
struct GridArgs {
    /// Dimension of the half space.
    #[arg(long, default_value_t = 3)]
    n: usize,
    /// Radii `|x|` of the grid, comma separated.
    #[arg(long, default_value = "1")]
    r: String,
    /// Polar angles θ of the grid, comma separated; points lie in the ê₁–ê_n half plane.
    #[arg(long, default_value = "0")]
    theta: String,
    /// Explicit Cartesian points (repeatable); replaces the r×θ grid.
    #[arg(long = "point")]
    points: Vec<String>,
}

#[derive(Args, Debug, Clone)]
struct QuadArgs {
    /// Absolute quadrature tolerance.
    #[arg(long, default_value_t = 1e-10)]
    abs_tol: f64,
    /// Relative quadrature tolerance.
    #[arg(long, default_value_t = 1e-10)]
    rel_tol: f64,
    /// Radius beyond which the boundary integral is mapped to a finite interval.
    #[arg(long)]
    truncation_radius: Option<f64>,
}

impl QuadArgs {
    fn spec(&self) -> Result<QuadratureSpec, String> {
        let mut spec = QuadratureSpec::default().with_tolerances(self.abs_tol, self.rel_tol);
        if let Some(r) = self.truncation_radius {
            spec = spec.with_truncation_radius(r);
        }
        spec.validate().map_err(|e| e.to_string())?;
        Ok(spec)
    }
}

#[derive(Args, Debug, Clone)]
struct DataArgs {
    /// Built-in boundary data.
    #[arg(long)]
    data: Option<String>,
    /// Data parameter `key=value` (repeatable), e.g. `center=2.5,1`.
    #[arg(long = "data-param")]
    data_params: Vec<String>,
}

#[derive(Args, Debug)]
struct EvalArgs {
    /// Kernel to evaluate at `--yp`.
    #[arg(long, value_enum, conflicts_with = "solution")]
    kernel: Option<KernelChoice>,
    /// Solution operator applied to `--data`.
    #[arg(long, value_enum)]
    solution: Option<SolutionChoice>,
    /// Kernel exponent λ (kernels and F, F̃).
    #[arg(long)]
    lambda: Option<f64>,
    /// Modification order.
    #[arg(long = "M", default_value_t = 0)]
    m: u32,
    /// Boundary point y' for kernel evaluation, comma separated.
    #[arg(long)]
    yp: Option<String>,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    quad: QuadArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProblemChoice {
    Dirichlet,
    Neumann,
}

#[derive(Args, Debug)]
struct ExpandArgs {
    /// Boundary value problem whose expansion is tabulated.
    #[arg(long, value_enum, default_value = "neumann")]
    problem: ProblemChoice,
    /// Expansion order M: coefficients `m < M` and remainders of order M.
    #[arg(long = "M", default_value_t = 4)]
    m: u32,
    /// Emit the divergence table `|r^{-(2k+n-2)} Y_{2k}|` of the exp example instead.
    #[arg(long)]
    divergence: bool,
    /// Largest k of the divergence table.
    #[arg(long, default_value_t = 40)]
    k_max: u32,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    quad: QuadArgs,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// gegenbauer, kernels, harmonicity, boundary, prop31, prop32, growth, sharpness, expansion or all.
    suite: String,
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let argv = match with_config(argv) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if cli.jobs > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_FAIL)
        }
    }
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

fn usage<T>(msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure::Usage(msg.into()))
}

/// Inserts `--key value` pairs from `--config FILE` right after the
/// subcommand so explicit flags, which come later, override them.
fn with_config(argv: Vec<String>) -> Result<Vec<String>, String> {
    let pos = argv.iter().position(|a| a == "--config" || a.starts_with("--config="));
    let Some(pos) = pos else { return Ok(argv) };
    let path = match argv[pos].strip_prefix("--config=") {
        Some(p) => p.to_string(),
        None => argv.get(pos + 1).cloned().ok_or("--config needs a file")?,
    };
    let text = std::fs::read_to_string(&path).map_err(|e| format!("reading {path}: {e}"))?;
    let mut extra = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("{path}:{}: expected key=value", i + 1))?;
        let (k, v) = (k.trim(), v.trim());
        match v {
            "true" => extra.push(format!("--{k}")),
            "false" => {}
            _ => extra.push(format!("--{k}={v}")),
        }
    }
    let sub = argv
        .iter()
        .position(|a| matches!(a.as_str(), "eval" | "expand" | "verify"))
        .ok_or("no subcommand given")?;
    let mut out = argv[..=sub].to_vec();
    out.extend(extra);
    out.extend_from_slice(&argv[sub + 1..]);
    Ok(out)
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    let (format, code, sink): (Format, u8, Box<dyn FnOnce(&mut dyn Write, Format) -> io::Result<()>>) = match &cli.command {
        Command::Eval(a) => {
            let t = cmd_eval(a)?;
            (cli.format.unwrap_or(Format::Csv), 0, Box::new(move |w, f| t.write(f, w)))
        }
        Command::Expand(a) => {
            let t = cmd_expand(a)?;
            (cli.format.unwrap_or(Format::Csv), 0, Box::new(move |w, f| t.write(f, w)))
        }
        Command::Verify(a) => {
            let reports = match verification::run_suite(&a.suite, cli.seed) {
                Ok(r) => r,
                Err(e) => return usage(e.to_string()),
            };
            let tally = Tally::of(&reports);
            eprintln!("{} passed, {} failed, {} inconclusive", tally.pass, tally.fail, tally.inconclusive);
            for r in reports.iter().filter(|r| r.status != Status::Pass) {
                eprintln!("  {}", r.summary_line());
            }
            let code = if tally.fail > 0 {
                EXIT_FAIL
            } else if tally.inconclusive > 0 {
                EXIT_INCONCLUSIVE
            } else {
                0
            };
            (cli.format.unwrap_or(Format::Json), code, Box::new(move |w, f| write_reports(&reports, f, w)))
        }
    };
    // Output is only written once everything has been computed.
    match &cli.output {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            sink(&mut w, format)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            sink(&mut w, format)?;
            w.flush()?;
        }
    }
    Ok(code)
}

fn grid_points(g: &GridArgs) -> Result<Vec<HalfSpacePoint>, Failure> {
    if !(2..=5).contains(&g.n) {
        return usage(format!("--n must lie in 2..=5, got {}", g.n));
    }
    if !g.points.is_empty() {
        return g
            .points
            .iter()
            .map(|p| {
                let v = parse_list(p).map_err(Failure::Usage)?;
                if v.len() != g.n {
                    return usage(format!("point '{p}' needs {} coordinates", g.n));
                }
                HalfSpacePoint::from_cartesian(&v).map_err(|e| Failure::Usage(e.to_string()))
            })
            .collect();
    }
    let radii = parse_list(&g.r).map_err(|e| Failure::Usage(format!("--r: {e}")))?;
    let thetas = parse_list(&g.theta).map_err(|e| Failure::Usage(format!("--theta: {e}")))?;
    let mut out = Vec::new();
    for &r in &radii {
        for &t in &thetas {
            out.push(HalfSpacePoint::on_first_axis(g.n, r, t).map_err(|e| Failure::Usage(e.to_string()))?);
        }
    }
    Ok(out)
}

fn load_data(d: &DataArgs, n: usize, lambda: f64, m: u32) -> Result<BoundaryData, Failure> {
    let name = d.data.as_deref().ok_or_else(|| Failure::Usage("--data is required".into()))?;
    let params = DataParams::parse(&d.data_params).map_err(Failure::Usage)?;
    data::build(name, &params, n - 1, lambda, m).map_err(Failure::Usage)
}

fn positive_lambda(lambda: Option<f64>) -> Result<f64, Failure> {
    match lambda {
        Some(l) if l > 0.0 && l.is_finite() => Ok(l),
        Some(l) => usage(format!("--lambda must be positive, got {l}")),
        None => usage("--lambda is required"),
    }
}

fn cmd_eval(a: &EvalArgs) -> Result<Table, Failure> {
    let points = grid_points(&a.grid)?;
    let spec = a.quad.spec().map_err(Failure::Usage)?;
    let coords = |x: &HalfSpacePoint| -> Vec<Cell> {
        vec![x.r().into(), x.theta().into(), Cell::Text(format_point(&x.to_cartesian()))]
    };
    if let Some(kernel) = a.kernel {
        let lambda = positive_lambda(a.lambda)?;
        let params = match kernel {
            KernelChoice::KmTilde => KernelParams::second(lambda, a.m),
            KernelChoice::K => KernelParams::first(lambda, 0),
            _ => KernelParams::first(lambda, a.m),
        }
        .map_err(|e| Failure::Usage(e.to_string()))?;
        let yp = parse_list(a.yp.as_deref().ok_or_else(|| Failure::Usage("--yp is required for kernels".into()))?)
            .map_err(Failure::Usage)?;
        let yp = BoundaryPoint::new(yp).map_err(|e| Failure::Usage(e.to_string()))?;
        let mut t = Table::new(&["r", "theta", "x", "value"]);
        for x in &points {
            let v = match kernel {
                KernelChoice::Bound => kernel_bound_first(&params, x, &yp),
                _ => params.eval(x, &yp),
            }
            .map_err(|e| Failure::Runtime(e.to_string()))?;
            let mut row = coords(x);
            row.push(v.into());
            t.push(row);
        }
        return Ok(t);
    }
    let Some(sol) = a.solution else {
        return usage("one of --kernel or --solution is required");
    };
    let lambda = match sol {
        SolutionChoice::F | SolutionChoice::FTilde => positive_lambda(a.lambda)?,
        SolutionChoice::D | SolutionChoice::Dm | SolutionChoice::U => 0.5 * a.grid.n as f64,
        _ => 0.5 * (a.grid.n as f64 - 2.0),
    };
    let f = load_data(&a.data, a.grid.n, lambda, a.m)?;
    let mut t = Table::new(&["r", "theta", "x", "value", "error"]);
    for x in &points {
        let e: Estimate = match sol {
            SolutionChoice::D => quadrature::dirichlet_d(&f, x, &spec),
            SolutionChoice::N => quadrature::neumann_n(&f, x, &spec),
            SolutionChoice::Dm => quadrature::dirichlet_dm(a.m, &f, x, &spec),
            SolutionChoice::Nm => quadrature::neumann_nm(a.m, &f, x, &spec),
            SolutionChoice::U => quadrature::solution_u(&f, a.m, x, &spec),
            SolutionChoice::V => quadrature::solution_v(&f, a.m, x, &spec),
            SolutionChoice::F => KernelParams::first(lambda, a.m).and_then(|p| quadrature::integral_f(&p, &f, x, &spec)),
            SolutionChoice::FTilde => {
                KernelParams::second(lambda, a.m).and_then(|p| quadrature::integral_f_second(&p, &f, x, &spec))
            }
        }
        .map_err(|e| match e {
            halfspace::error::Error::Domain(_) | halfspace::error::Error::Unsupported(_) => Failure::Usage(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        })?;
        let mut row = coords(x);
        row.push(e.value.into());
        row.push(e.error.into());
        t.push(row);
    }
    Ok(t)
}

fn format_point(x: &[f64]) -> String {
    x.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

fn cmd_expand(a: &ExpandArgs) -> Result<Table, Failure> {
    let n = a.grid.n;
    if a.divergence {
        let radii = parse_list(&a.grid.r).map_err(Failure::Usage)?;
        let thetas = parse_list(&a.grid.theta).map_err(Failure::Usage)?;
        let mut t = Table::new(&["r", "theta", "k", "ln_magnitude", "magnitude", "onset"]);
        for &r in &radii {
            for &th in &thetas {
                let terms = divergence_demo(n, r, th, a.k_max).map_err(|e| Failure::Usage(e.to_string()))?;
                let onset = growth_onset(&terms, 5);
                for term in &terms {
                    t.push(vec![
                        r.into(),
                        th.into(),
                        term.k.into(),
                        term.ln_magnitude.into(),
                        term.magnitude.into(),
                        Cell::Bool(onset == Some(term.k)),
                    ]);
                }
            }
        }
        return Ok(t);
    }
    let spec = a.quad.spec().map_err(Failure::Usage)?;
    let problem = match a.problem {
        ProblemChoice::Dirichlet => Problem::Dirichlet,
        ProblemChoice::Neumann => Problem::Neumann,
    };
    let f = load_data(&a.data, n, 0.5 * n as f64, a.m)?;
    let exp_example = a.data.data.as_deref() == Some("exp_decay") && problem == Problem::Neumann && n >= 3;
    let expansion = AsymptoticExpansion::new(problem, f, a.m, spec).map_err(|e| Failure::Usage(e.to_string()))?;
    let points = grid_points(&a.grid)?;
    let mut t = Table::new(&[
        "kind",
        "m",
        "r",
        "theta",
        "value",
        "error",
        "closed_form",
        "partial_sum",
        "direct",
        "remainder",
        "modified_remainder",
    ]);
    let runtime = |e: halfspace::error::Error| Failure::Runtime(e.to_string());
    let mut seen: Vec<f64> = Vec::new();
    for x in &points {
        let th = x.theta();
        if !seen.contains(&th) {
            seen.push(th);
            let dir: Direction = x.direction();
            for j in 0..a.m {
                let c = expansion.coefficient(j, &dir).map_err(runtime)?;
                let closed = if exp_example {
                    exp_example_coefficient(n, j, th).map(Cell::Num).unwrap_or(Cell::Empty)
                } else {
                    Cell::Empty
                };
                t.push(vec![
                    "coefficient".into(),
                    j.into(),
                    Cell::Empty,
                    th.into(),
                    c.value.into(),
                    c.error.into(),
                    closed,
                    Cell::Empty,
                    Cell::Empty,
                    Cell::Empty,
                    Cell::Empty,
                ]);
            }
        }
        let e = expansion.evaluate(x).map_err(runtime)?;
        t.push(vec![
            "evaluation".into(),
            a.m.into(),
            x.r().into(),
            th.into(),
            Cell::Empty,
            Cell::Empty,
            Cell::Empty,
            e.partial_sum.value.into(),
            e.direct.value.into(),
            e.remainder.value.into(),
            e.modified_remainder.value.into(),
        ]);
    }
    Ok(t)
}
