//! End-to-end solver: discriminant, component, monodromy, extraction, checks.

use serde::Serialize;
use thiserror::Error;

use crate::amoeba::{default_schedule, unit_direction, Amoeba, AmoebaConfig, LogPoint};
use crate::lattice::LatticeVector;
use crate::laurent::discriminant_y;
use crate::monodromy::{monodromy, Fiber, MonodromyConfig, MonodromyResult};
use crate::polyhedra::{recession_cone_of_order, sigma_p, Cone};
use crate::puiseux::{
    check_support, check_support_translated, extract_expansion, grading_for, held_out_samples, track_grid,
    verify_residual, ExtractRequest, ExtractionConfig, ExtractionGrid, PuiseuxExpansion, ResidualReport, SupportReport,
};
use crate::RationalPolynomial;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Discriminant,
    Amoeba,
    Representative,
    Monodromy,
    Extraction,
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Stage::Discriminant => "discriminant",
            Stage::Amoeba => "amoeba",
            Stage::Representative => "representative",
            Stage::Monodromy => "monodromy",
            Stage::Extraction => "extraction",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error)]
#[error("[{stage}] {message}")]
pub struct SolveError {
    pub stage: Stage,
    pub message: String,
}

fn stage<E: std::fmt::Display>(stage: Stage) -> impl Fn(E) -> SolveError {
    move |e| SolveError { stage, message: e.to_string() }
}

#[derive(Clone, Debug)]
pub struct SolveConfig {
    pub amoeba: AmoebaConfig,
    pub monodromy: MonodromyConfig,
    pub extraction: ExtractionConfig,
    /// Ray parameters tried when searching a vertex representative.
    pub schedule: Vec<f64>,
    /// Offsets along the recession direction tried for the extraction basepoint.
    pub depths: Vec<f64>,
    pub support_tol: f64,
    pub residual_tol: f64,
    /// Held-out samples sit this much deeper (in `log |x|`) than the grid;
    /// the default puts them at a modulus ratio of 0.8.
    pub residual_depth: f64,
    pub residual_samples: usize,
    /// Raster used to locate non-vertex components.
    pub search_box: Vec<(f64, f64)>,
    pub search_resolution: usize,
    /// Report every sheet of each orbit rather than one per orbit.
    pub all_sheets: bool,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            amoeba: AmoebaConfig::default(),
            monodromy: MonodromyConfig::default(),
            extraction: ExtractionConfig::default(),
            schedule: default_schedule(),
            depths: vec![0.0, 0.1, 0.2, 0.4, 0.8, 1.6, 3.2, 6.4],
            support_tol: 1e-8,
            residual_tol: 1e-6,
            residual_depth: 1.25f64.ln(),
            residual_samples: 32,
            search_box: vec![],
            search_resolution: 100,
            all_sheets: false,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BranchReport {
    pub expansion: PuiseuxExpansion,
    pub support: SupportReport,
    pub support_translated: SupportReport,
    pub residual: ResidualReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveReport {
    pub order: LatticeVector,
    /// `sigma_p` of the discriminant's Newton polytope at the order.
    pub literal_support_cone: Cone,
    /// Cone used for grading and support tests.
    pub support_cone: Cone,
    /// The discriminant is a monomial and the nonnegative orthant replaces `{0}`.
    pub literal_cone_degenerate: bool,
    pub representative: LogPoint,
    pub basepoint: LogPoint,
    pub monodromy: MonodromyResult,
    pub extraction_passed: bool,
    pub branches: Vec<BranchReport>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SupportMode {
    Literal,
    Translated,
}

impl SolveReport {
    pub fn residual_passed(&self, tol: f64) -> bool {
        self.branches.iter().all(|b| b.residual.max_relative <= tol)
    }

    pub fn support_passed(&self, mode: SupportMode) -> bool {
        self.branches.iter().all(|b| match mode {
            SupportMode::Literal => b.support.passed,
            SupportMode::Translated => b.support_translated.passed,
        })
    }
}

/// Where a complement component of the discriminant amoeba sits.
pub struct ComponentSite {
    pub order: LatticeVector,
    pub literal_cone: Cone,
    pub effective_cone: Cone,
    pub degenerate: bool,
    pub representative: LogPoint,
    /// Unit interior direction of the recession cone.
    pub direction: Vec<f64>,
    amoeba: Option<Amoeba>,
}

/// Finds a representative of the component of order `order` in the
/// complement of the amoeba of `delta`. The order may be omitted when
/// `delta` is a monomial.
pub fn locate_component(
    delta: &RationalPolynomial,
    order: Option<&LatticeVector>,
    config: &SolveConfig,
) -> Result<ComponentSite, SolveError> {
    let n = delta.nvars();
    let np = delta.newton_polytope().map_err(stage(Stage::Amoeba))?;
    if delta.is_monomial() {
        let p = np.vertices()[0].clone();
        if let Some(o) = order {
            if *o != p {
                return Err(SolveError { stage: Stage::Representative, message: format!("the only component has order {p}, not {o}") });
            }
        }
        let literal = sigma_p(&np, &p).map_err(stage(Stage::Amoeba))?;
        let effective = Cone::orthant(n);
        let direction = unit_direction(&effective.negate());
        return Ok(ComponentSite {
            order: p,
            literal_cone: literal,
            effective_cone: effective,
            degenerate: true,
            representative: vec![0.0; n],
            direction,
            amoeba: None,
        });
    }
    let p = order
        .cloned()
        .ok_or_else(|| SolveError { stage: Stage::Representative, message: "a component order is required".into() })?;
    if p.dim() != n {
        return Err(SolveError { stage: Stage::Representative, message: format!("order {p} has wrong dimension") });
    }
    let amoeba = Amoeba::new(delta, config.amoeba.clone()).map_err(stage(Stage::Amoeba))?;
    let literal = sigma_p(&np, &p).map_err(stage(Stage::Amoeba))?;
    let rec = recession_cone_of_order(&np, &p).map_err(stage(Stage::Amoeba))?;
    let representative = if np.is_vertex(&p) {
        amoeba.representative_for_vertex(&p, &config.schedule).map_err(stage(Stage::Representative))?
    } else {
        let bounds = if config.search_box.len() == n { config.search_box.clone() } else { vec![(-6.0, 6.0); n] };
        let raster = amoeba.raster(&bounds, config.search_resolution, None).map_err(stage(Stage::Amoeba))?;
        let comps = amoeba.components(&raster).map_err(stage(Stage::Amoeba))?;
        comps
            .into_iter()
            .find(|c| c.order == p)
            .map(|c| c.representative)
            .ok_or_else(|| SolveError { stage: Stage::Representative, message: format!("no component of order {p} found in the search box") })?
    };
    let direction = unit_direction(&rec);
    Ok(ComponentSite {
        order: p,
        effective_cone: literal.clone(),
        literal_cone: literal,
        degenerate: false,
        representative,
        direction,
        amoeba: Some(amoeba),
    })
}

struct Attempt {
    basepoint: LogPoint,
    monodromy: MonodromyResult,
    expansions: Vec<PuiseuxExpansion>,
    passed: bool,
}

fn attempt(
    fiber: &Fiber,
    x: &[f64],
    loc: &ComponentSite,
    weight: &LatticeVector,
    config: &SolveConfig,
) -> Result<Attempt, SolveError> {
    let n = x.len();
    let mono = monodromy(fiber, x, &vec![0.0; n], &config.monodromy).map_err(stage(Stage::Monodromy))?;
    let mut grids: Vec<ExtractionGrid> = Vec::new();
    let mut expansions = Vec::new();
    let mut passed = true;
    for (branch_id, orbit) in mono.orbits.iter().enumerate() {
        let d = orbit.len();
        if !grids.iter().any(|g| g.d == d) {
            let t: Vec<f64> = x.iter().map(|v| v / d as f64).collect();
            grids.push(track_grid(fiber, &t, d, &config.extraction).map_err(stage(Stage::Extraction))?);
        }
        let grid = grids.iter().find(|g| g.d == d).expect("grid for d");
        let sheets: Vec<usize> = if config.all_sheets { orbit.clone() } else { vec![orbit[0]] };
        for sheet in sheets {
            let req = ExtractRequest { grid, sheet, branch_id, support_cone: &loc.effective_cone, component_order: &loc.order, weight };
            let e = extract_expansion(&req, &config.extraction).map_err(stage(Stage::Extraction))?;
            passed &= e.diagnostics.passes(&config.extraction);
            expansions.push(e);
        }
    }
    Ok(Attempt { basepoint: x.to_vec(), monodromy: mono, expansions, passed })
}

/// Expansions of every branch of `F = 0` (fiber variable last) over the
/// complement component of the discriminant amoeba with the given order.
pub fn solve(f: &RationalPolynomial, order: Option<&LatticeVector>, config: &SolveConfig) -> Result<SolveReport, SolveError> {
    let n = f.nvars().checked_sub(1).filter(|&n| n > 0).ok_or_else(|| SolveError {
        stage: Stage::Discriminant,
        message: "need at least one base variable and the fiber variable".into(),
    })?;
    let delta = discriminant_y(f, n).map_err(stage(Stage::Discriminant))?;
    if delta.is_zero() {
        return Err(SolveError { stage: Stage::Discriminant, message: "discriminant vanishes identically (repeated factor)".into() });
    }
    let loc = locate_component(&delta, order, config)?;
    let fiber = Fiber::new(f).map_err(stage(Stage::Monodromy))?;
    let weight = grading_for(&loc.effective_cone);

    let moving = loc.direction.iter().any(|&c| c != 0.0);
    let depths: Vec<f64> = if moving { config.depths.clone() } else { vec![0.0] };
    let mut best: Option<Attempt> = None;
    let mut last_err: Option<SolveError> = None;
    for depth in depths {
        let x: Vec<f64> = loc.representative.iter().zip(&loc.direction).map(|(r, c)| r + depth * c).collect();
        if let Some(a) = &loc.amoeba {
            match a.order_at(&x, config.amoeba.seed) {
                Ok(o) if o == loc.order => {}
                _ => continue,
            }
        }
        match attempt(&fiber, &x, &loc, &weight, config) {
            Ok(at) => {
                let done = at.passed;
                log::debug!("depth {depth}: extraction checks {}", if done { "passed" } else { "failed" });
                best = Some(at);
                if done {
                    break;
                }
            }
            Err(e) => {
                log::debug!("depth {depth}: {e}");
                last_err = Some(e);
            }
        }
    }
    let at = best.ok_or_else(|| {
        last_err.unwrap_or(SolveError { stage: Stage::Representative, message: "no basepoint in the component".into() })
    })?;

    let branches = at
        .expansions
        .into_iter()
        .enumerate()
        .map(|(i, expansion)| {
            let samples = held_out_samples(&expansion, config.residual_depth, config.residual_samples, config.amoeba.seed ^ i as u64);
            BranchReport {
                support: check_support(&expansion, config.support_tol),
                support_translated: check_support_translated(&expansion, config.support_tol),
                residual: verify_residual(&fiber, &expansion, &samples),
                expansion,
            }
        })
        .collect();
    Ok(SolveReport {
        order: loc.order,
        literal_support_cone: loc.literal_cone,
        support_cone: loc.effective_cone,
        literal_cone_degenerate: loc.degenerate,
        representative: loc.representative,
        basepoint: at.basepoint,
        monodromy: at.monodromy,
        extraction_passed: at.passed,
        branches,
    })
}
