//! `amoeba`: amoebas, complement components and branch expansions from the
//! command line.
//!
//! Exit codes: 0 success, 2 parse or configuration error, 3 a numerical
//! check failed (output is still written), 4 a pipeline stage failed.

mod expansion;
mod svg;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use amoeba_core::amoeba::{Amoeba, AmoebaConfig, CellKind};
use amoeba_core::lattice::LatticeVector;
use amoeba_core::laurent::{discriminant_y, infer_variables, parse_polynomial, PolynomialJson};
use amoeba_core::monodromy::{monodromy, Fiber};
use amoeba_core::pipeline::{locate_component, solve, SolveConfig, SupportMode};
use amoeba_core::polyhedra::{dual_cone, recession_cone_of_order, sigma_p, subdivide_regular_2d};
use amoeba_core::puiseux::{check_support, check_support_translated, held_out_samples, verify_residual};
use amoeba_core::RationalPolynomial;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use expansion::{parse_expansions, ExpansionJson};

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

fn config_error(message: impl std::fmt::Display) -> Failure {
    Failure { code: 2, message: message.to_string() }
}

fn stage_error(message: impl std::fmt::Display) -> Failure {
    Failure { code: 4, message: message.to_string() }
}

type Outcome = Result<(), Failure>;

#[derive(Parser)]
#[command(name = "amoeba", version, about = "Amoebas, complement components and Puiseux expansions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Raster the amoeba of a polynomial and list its complement components.
    Amoeba(AmoebaArgs),
    /// Discriminant of F with respect to its last variable.
    Discriminant(InputArgs),
    /// Support and recession cones of a component order.
    Cones(ConesArgs),
    /// Loop permutations of the fiber roots over a component.
    Monodromy(MonodromyArgs),
    /// Expansions of every branch of F = 0 over a component.
    Solve(SolveArgs),
    /// Recheck residual and support of a saved expansion.
    Verify(VerifyArgs),
}

#[derive(Args, Clone)]
struct InputArgs {
    /// File holding the polynomial.
    #[arg(short = 'f', long = "poly", conflicts_with = "expr")]
    poly: Option<PathBuf>,
    /// The polynomial itself.
    #[arg(short = 'e', long)]
    expr: Option<String>,
    /// Comma-separated variable order; the last one is the fiber variable.
    /// Defaults to the names in the polynomial, sorted.
    #[arg(long, value_delimiter = ',')]
    vars: Option<Vec<String>>,
}

#[derive(Args)]
struct AmoebaArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Log-space box, `a:b,c:d`.
    #[arg(long = "box", default_value = "-5:5,-5:5", allow_hyphen_values = true)]
    bounds: String,
    #[arg(long, default_value_t = 200)]
    res: usize,
    /// Angle samples per axis for membership.
    #[arg(long, default_value_t = 64)]
    angles: usize,
    /// Membership tolerance; defaults to twice the cell width.
    #[arg(long)]
    tol_membership: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// SVG output path.
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
    /// Component table path (stdout when absent).
    #[arg(long)]
    table: Option<PathBuf>,
}

#[derive(Args)]
struct ConesArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Lattice point of the Newton polytope, `i,j`.
    #[arg(long)]
    component: String,
}

#[derive(Args)]
struct MonodromyArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    component: Option<String>,
    #[arg(long, default_value_t = 256)]
    steps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SupportCheck {
    /// Support must lie in the cone itself.
    Literal,
    /// Support must lie in the cone translated to the least-weight exponent.
    Translated,
}

impl From<SupportCheck> for SupportMode {
    fn from(s: SupportCheck) -> Self {
        match s {
            SupportCheck::Literal => SupportMode::Literal,
            SupportCheck::Translated => SupportMode::Translated,
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Order of the component, `i,j`; optional when the discriminant is a monomial.
    #[arg(long)]
    component: Option<String>,
    /// Bound on the weight of retained exponents.
    #[arg(long, default_value_t = 20)]
    weight: i64,
    /// Grid points per axis for coefficient extraction.
    #[arg(long, default_value_t = 128)]
    grid: usize,
    /// Steps per monodromy loop.
    #[arg(long, default_value_t = 256)]
    steps: usize,
    /// Angle samples per axis when locating non-vertex components.
    #[arg(long, default_value_t = 64)]
    angles: usize,
    /// Search box for non-vertex components, `a:b,c:d`.
    #[arg(long = "box", allow_hyphen_values = true)]
    bounds: Option<String>,
    /// Search raster resolution for non-vertex components.
    #[arg(long, default_value_t = 100)]
    res: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-8)]
    tol_support: f64,
    #[arg(long, default_value_t = 1e-6)]
    tol_residual: f64,
    #[arg(long, default_value_t = 1e-10)]
    tol_drop: f64,
    #[arg(long, default_value_t = 1e-9)]
    tol_resolve: f64,
    #[arg(long, default_value_t = 1e-10)]
    tol_alias: f64,
    #[arg(long, value_enum, default_value_t = SupportCheck::Translated)]
    support_check: SupportCheck,
    /// Emit every sheet instead of one per orbit.
    #[arg(long)]
    all_sheets: bool,
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Expansion JSON written by `solve`.
    expansion: PathBuf,
    /// File holding F.
    poly: PathBuf,
    #[arg(long, value_delimiter = ',')]
    vars: Option<Vec<String>>,
    #[arg(long, default_value_t = 1e-8)]
    tol_support: f64,
    #[arg(long, default_value_t = 1e-6)]
    tol_residual: f64,
    #[arg(long, value_enum, default_value_t = SupportCheck::Translated)]
    support_check: SupportCheck,
    #[arg(long, default_value_t = 32)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| config_error(format!("{}: {e}", path.display())))
}

fn write_or_print(path: Option<&Path>, text: &str) -> Outcome {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| config_error(format!("{}: {e}", p.display()))),
        None => {
            emit(text);
            Ok(())
        }
    }
}

/// Writes a line to stdout; a closed pipe (e.g. `| head`) is not an error.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    if let Err(e) = writeln!(out, "{text}") {
        if e.kind() != std::io::ErrorKind::BrokenPipe {
            log::warn!("stdout: {e}");
        }
    }
}

fn load(input: &InputArgs) -> Result<(RationalPolynomial, Vec<String>), Failure> {
    let text = match (&input.poly, &input.expr) {
        (Some(p), _) => read(p)?,
        (None, Some(e)) => e.clone(),
        (None, None) => return Err(config_error("give the polynomial with -f FILE or -e TEXT")),
    };
    parse(&text, input.vars.clone())
}

fn parse(text: &str, vars: Option<Vec<String>>) -> Result<(RationalPolynomial, Vec<String>), Failure> {
    let vars = vars.unwrap_or_else(|| infer_variables(text));
    let f = parse_polynomial(text.trim(), &vars).map_err(config_error)?;
    Ok((f, vars))
}

fn parse_order(text: &str) -> Result<LatticeVector, Failure> {
    text.split(',')
        .map(|s| s.trim().parse::<i64>().map_err(|e| config_error(format!("order `{text}`: {e}"))))
        .collect::<Result<Vec<_>, _>>()
        .map(LatticeVector)
}

fn parse_box(text: &str) -> Result<Vec<(f64, f64)>, Failure> {
    text.split(',')
        .map(|part| {
            let (a, b) = part.split_once(':').ok_or_else(|| config_error(format!("box side `{part}` is not a:b")))?;
            let lo: f64 = a.trim().parse().map_err(|e| config_error(format!("box `{part}`: {e}")))?;
            let hi: f64 = b.trim().parse().map_err(|e| config_error(format!("box `{part}`: {e}")))?;
            if !(lo < hi) {
                return Err(config_error(format!("box side `{part}` is empty")));
            }
            Ok((lo, hi))
        })
        .collect()
}

/// Number of base variables; the last variable is the fiber.
fn base_dim(f: &RationalPolynomial) -> Result<usize, Failure> {
    f.nvars().checked_sub(1).filter(|&n| n > 0).ok_or_else(|| config_error("need a fiber variable and at least one more"))
}

fn positive(name: &str, v: usize) -> Outcome {
    if v == 0 {
        return Err(config_error(format!("--{name} must be positive")));
    }
    Ok(())
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn cmd_amoeba(a: AmoebaArgs) -> Outcome {
    positive("res", a.res)?;
    positive("angles", a.angles)?;
    let (f, _) = load(&a.input)?;
    let bounds = parse_box(&a.bounds)?;
    if bounds.len() != f.nvars() {
        return Err(config_error(format!("box has {} sides for {} variables", bounds.len(), f.nvars())));
    }
    let config = AmoebaConfig { angle_resolution: a.angles, seed: a.seed, ..AmoebaConfig::default() };
    let amoeba = Amoeba::new(&f, config).map_err(config_error)?;
    if amoeba.is_empty() {
        log::warn!("empty amoeba: the polynomial is a monomial");
    }
    let raster = amoeba.raster(&bounds, a.res, a.tol_membership).map_err(stage_error)?;
    let components = amoeba.components(&raster).map_err(stage_error)?;
    log::info!(
        "{} amoeba cells, {} unresolved, {} label conflicts",
        raster.count(CellKind::Amoeba),
        raster.count(CellKind::Unknown),
        raster.label_conflicts()
    );
    if let Some(path) = &a.output {
        if raster.dim() != 2 {
            return Err(config_error("SVG output needs two variables"));
        }
        fs::write(path, svg::render(&raster, &components)).map_err(|e| config_error(format!("{}: {e}", path.display())))?;
    }
    write_or_print(a.table.as_deref(), &to_json(&components))
}

fn cmd_discriminant(input: InputArgs) -> Outcome {
    let (f, vars) = load(&input)?;
    let n = base_dim(&f)?;
    let delta = discriminant_y(&f, n).map_err(stage_error)?;
    let base = vars[..n].to_vec();
    let out = json!({
        "text": delta.to_text(&base),
        "polynomial": PolynomialJson::from_polynomial(&delta, &base),
    });
    write_or_print(None, &to_json(&out))
}

fn cmd_cones(a: ConesArgs) -> Outcome {
    let (f, _) = load(&a.input)?;
    let p = parse_order(&a.component)?;
    let np = f.newton_polytope().map_err(config_error)?;
    let sigma = sigma_p(&np, &p).map_err(config_error)?;
    let rec = recession_cone_of_order(&np, &p).map_err(config_error)?;
    let dual = dual_cone(&sigma).map_err(stage_error)?;
    let regular = if sigma.dim() == 2 && sigma.is_strongly_convex() && !sigma.is_zero() {
        Some(subdivide_regular_2d(&sigma).map_err(stage_error)?)
    } else {
        None
    };
    let out = json!({
        "order": p,
        "vertex": np.is_vertex(&p),
        "support_cone": sigma,
        "dual_support_cone": dual,
        "recession_cone": rec,
        "regular_subdivision": regular,
    });
    write_or_print(None, &to_json(&out))
}

fn component_order(text: Option<&str>) -> Result<Option<LatticeVector>, Failure> {
    text.map(parse_order).transpose()
}

fn cmd_monodromy(a: MonodromyArgs) -> Outcome {
    positive("steps", a.steps)?;
    let (f, _) = load(&a.input)?;
    let order = component_order(a.component.as_deref())?;
    let n = base_dim(&f)?;
    let mut config = SolveConfig::default();
    config.amoeba.seed = a.seed;
    config.monodromy.steps = a.steps;
    let delta = discriminant_y(&f, n).map_err(stage_error)?;
    let site = locate_component(&delta, order.as_ref(), &config).map_err(stage_error)?;
    let fiber = Fiber::new(&f).map_err(stage_error)?;
    let m = monodromy(&fiber, &site.representative, &vec![0.0; n], &config.monodromy).map_err(stage_error)?;
    let out = json!({
        "order": site.order,
        "basepoint": site.representative,
        "permutations": m.permutations,
        "orbits": m.orbits,
        "d": m.d_per_orbit,
        "winding_orders": m.winding_orders,
    });
    write_or_print(a.output.as_deref(), &to_json(&out))
}

fn cmd_solve(a: SolveArgs) -> Outcome {
    positive("grid", a.grid)?;
    positive("steps", a.steps)?;
    positive("angles", a.angles)?;
    positive("res", a.res)?;
    let (f, vars) = load(&a.input)?;
    base_dim(&f)?;
    let order = component_order(a.component.as_deref())?;
    let mut config = SolveConfig { all_sheets: a.all_sheets, ..SolveConfig::default() };
    config.amoeba.seed = a.seed;
    config.amoeba.angle_resolution = a.angles;
    config.monodromy.steps = a.steps;
    config.extraction.grid = a.grid;
    config.extraction.max_weight = a.weight;
    config.extraction.drop_tol = a.tol_drop;
    config.extraction.resolve_tol = a.tol_resolve;
    config.extraction.alias_tol = a.tol_alias;
    config.support_tol = a.tol_support;
    config.residual_tol = a.tol_residual;
    config.search_resolution = a.res;
    if let Some(b) = &a.bounds {
        config.search_box = parse_box(b)?;
    }
    let report = solve(&f, order.as_ref(), &config).map_err(stage_error)?;
    let branches: Vec<ExpansionJson> = report.branches.iter().map(|b| ExpansionJson::from_branch(&report, b, &vars)).collect();
    let text = if branches.len() == 1 { to_json(&branches[0]) } else { to_json(&branches) };
    write_or_print(a.output.as_deref(), &text)?;

    let mode = SupportMode::from(a.support_check);
    let mut problems = Vec::new();
    if !report.extraction_passed {
        problems.push("extraction checks (seam closure or aliasing) failed at every basepoint".to_string());
    }
    if !report.support_passed(mode) {
        problems.push(format!("support leaks outside the cone ({} check)", mode_name(a.support_check)));
    }
    if !report.residual_passed(a.tol_residual) {
        problems.push(format!("residual above {:.1e}", a.tol_residual));
    }
    if problems.is_empty() {
        Ok(())
    } else {
        Err(Failure { code: 3, message: problems.join("; ") })
    }
}

fn mode_name(s: SupportCheck) -> &'static str {
    match s {
        SupportCheck::Literal => "literal",
        SupportCheck::Translated => "translated",
    }
}

fn cmd_verify(a: VerifyArgs) -> Outcome {
    positive("samples", a.samples)?;
    let saved = parse_expansions(&read(&a.expansion)?).map_err(|e| config_error(format!("{}: {e}", a.expansion.display())))?;
    if saved.is_empty() {
        return Err(config_error("no expansions in the file"));
    }
    let vars = a.vars.clone().or_else(|| Some(saved[0].vars.clone()));
    let (f, _) = parse(&read(&a.poly)?, vars)?;
    let fiber = Fiber::new(&f).map_err(config_error)?;
    let mut failed = false;
    for (k, s) in saved.iter().enumerate() {
        let e = s.to_expansion().map_err(config_error)?;
        if e.support_cone.dim() != fiber.base_dim() {
            return Err(config_error(format!("expansion {k} has {} base variables, F has {}", e.support_cone.dim(), fiber.base_dim())));
        }
        let support = match a.support_check {
            SupportCheck::Literal => check_support(&e, a.tol_support),
            SupportCheck::Translated => check_support_translated(&e, a.tol_support),
        };
        let depth = SolveConfig::default().residual_depth;
        let samples = held_out_samples(&e, depth, a.samples, a.seed ^ k as u64);
        let residual = verify_residual(&fiber, &e, &samples);
        let residual_ok = residual.max_relative <= a.tol_residual;
        emit(&format!(
            "expansion {k} (branch {}, sheet {}, d = {}): support {} (leak {:.2e}, {} check), residual {} ({:.2e})",
            s.branch_id,
            s.sheet,
            s.d,
            if support.passed { "PASS" } else { "FAIL" },
            support.max_outside,
            mode_name(a.support_check),
            if residual_ok { "PASS" } else { "FAIL" },
            residual.max_relative
        ));
        failed |= !support.passed || !residual_ok;
    }
    if failed {
        Err(Failure { code: 3, message: "verification failed".into() })
    } else {
        Ok(())
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let outcome = match cli.command {
        Command::Amoeba(a) => cmd_amoeba(a),
        Command::Discriminant(a) => cmd_discriminant(a),
        Command::Cones(a) => cmd_cones(a),
        Command::Monodromy(a) => cmd_monodromy(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
