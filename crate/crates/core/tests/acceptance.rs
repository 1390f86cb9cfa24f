//! Acceptance checks, one PASS/FAIL line each. Exits nonzero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use amoeba_core::amoeba::{log_modulus, region_counts, torus_point, Amoeba, AmoebaConfig};
use amoeba_core::lattice::{LatticeVector, RationalVector};
use amoeba_core::laurent::{parse_polynomial, MonomialMap};
use amoeba_core::monodromy::compose;
use amoeba_core::pipeline::{solve, SolveConfig, SolveReport};
use amoeba_core::polyhedra::{dual_cone, is_regular, subdivide_regular_2d, Cone};
use amoeba_core::puiseux::oracle::{binomial_oracle, OracleVariant};
use amoeba_core::puiseux::PuiseuxExpansion;
use amoeba_core::RationalPolynomial;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const LINE: &str = "x + y - 1";
const CUBIC: &str = "50*x^3+83*x^2*y+24*x*y^2+y^3+392*x^2+414*x*y+50*y^2-28*x+59*y-100";
const SQUARE_ROOT: &str = "z^2 - x - y + 1";

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn vars(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn poly(text: &str, names: &[&str]) -> RationalPolynomial {
    parse_polynomial(text, &vars(names)).expect("test polynomial parses")
}

fn cone(gens: &[[i64; 2]]) -> Cone {
    Cone::new(2, gens.iter().map(|g| LatticeVector::from(*g)).collect()).unwrap()
}

fn c64(q: &Complex<BigRational>) -> Complex<f64> {
    Complex::new(q.re.to_f64().unwrap(), q.im.to_f64().unwrap())
}

/// The three runs of the square-root example, solved once and shared.
struct SquareRootRuns {
    phi: Vec<(OracleVariant, Result<SolveReport, String>, Duration)>,
}

impl SquareRootRuns {
    fn new() -> Self {
        let f = poly(SQUARE_ROOT, &["x", "y", "z"]);
        let config = SolveConfig { all_sheets: true, ..SolveConfig::default() };
        let phi = [([1, 0], OracleVariant::LargeX), ([0, 1], OracleVariant::LargeY), ([0, 0], OracleVariant::Origin)]
            .into_iter()
            .map(|(order, variant)| {
                let start = Instant::now();
                let r = solve(&f, Some(&LatticeVector::from(order)), &config).map_err(|e| e.to_string());
                (variant, r, start.elapsed())
            })
            .collect();
        SquareRootRuns { phi }
    }
}

fn name(v: OracleVariant) -> &'static str {
    match v {
        OracleVariant::LargeX => "phi1",
        OracleVariant::LargeY => "phi2",
        OracleVariant::Origin => "phi3",
    }
}

/// Largest `|a_I|` with `I / d` outside `c`, relative to the largest `|a_I|`.
fn leak(e: &PuiseuxExpansion, c: &Cone) -> f64 {
    let d = e.d as i64;
    let outside = e
        .coefficients
        .iter()
        .filter(|(i, _)| {
            let x = RationalVector(i.0.iter().map(|&k| BigRational::new(k.into(), d.into())).collect());
            !c.contains(&x)
        })
        .map(|(_, a)| a.norm())
        .fold(0.0, f64::max);
    outside / e.max_abs()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let a = Amoeba::new(&poly(LINE, &["x", "y"]), AmoebaConfig::default()).unwrap();
    let raster = a.raster(&[(-5.0, 5.0), (-5.0, 5.0)], 200, None).unwrap();
    let comps = a.components(&raster).unwrap();
    let elapsed = start.elapsed();
    let orders: Vec<LatticeVector> = comps.iter().map(|c| c.order.clone()).collect();
    let regions = region_counts(&raster);
    let want = [[0, 0], [1, 0], [0, 1]].map(LatticeVector::from);
    let ok = orders.len() == 3
        && want.iter().all(|w| orders.contains(w))
        && regions.values().all(|&n| n == 1)
        && elapsed < Duration::from_secs(30);
    outcome(ok, format!("orders {:?}, regions per order {:?}, {:.2?} at 200x200", orders.iter().map(|o| o.to_string()).collect::<Vec<_>>(), regions.values().collect::<Vec<_>>(), elapsed))
}

fn criterion_2() -> Outcome {
    let a = Amoeba::new(&poly(CUBIC, &["x", "y"]), AmoebaConfig::default()).unwrap();
    let raster = a.raster(&[(-6.0, 8.0), (-6.0, 8.0)], 200, None).unwrap();
    let orders: Vec<LatticeVector> = a.components(&raster).unwrap().into_iter().map(|c| c.order).collect();
    let vertices = [[0, 0], [3, 0], [0, 3]].map(LatticeVector::from);
    let ok = vertices.iter().all(|v| orders.contains(v)) && orders.len() <= 10;
    outcome(ok, format!("{} distinct orders: {:?}", orders.len(), orders.iter().map(|o| o.to_string()).collect::<Vec<_>>()))
}

fn criterion_3(runs: &SquareRootRuns) -> Outcome {
    let stated = [
        cone(&[[-1, 0], [-1, 1]]),
        cone(&[[0, -1], [1, -1]]),
        Cone::orthant(2),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for ((variant, run, elapsed), c) in runs.phi.iter().zip(&stated) {
        match run {
            Ok(r) => {
                let worst = r.branches.iter().map(|b| leak(&b.expansion, c)).fold(0.0, f64::max);
                let translated = r.branches.iter().all(|b| b.support_translated.passed);
                let pass = worst <= 1e-8 && *elapsed < Duration::from_secs(60) && r.support_cone.same_set(c);
                ok &= pass;
                let apex = r.branches[0].support_translated.apex.as_ref().map(|a| a.to_string()).unwrap_or_default();
                parts.push(format!(
                    "{} leak {:.2e} (G={}, weight<={}, {:.2?}; apex-translated {} at t-exponent {})",
                    name(*variant),
                    worst,
                    r.branches[0].expansion.grid,
                    r.branches[0].expansion.max_weight,
                    elapsed,
                    if translated { "contained" } else { "leaks" },
                    apex
                ));
            }
            Err(e) => {
                ok = false;
                parts.push(format!("{}: {e}", name(*variant)));
            }
        }
    }
    outcome(ok, parts.join("; "))
}

fn criterion_4(runs: &SquareRootRuns) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (variant, run, _) in &runs.phi {
        let Ok(r) = run else {
            ok = false;
            parts.push(format!("{}: no expansion", name(*variant)));
            continue;
        };
        let oracle = binomial_oracle(20, 20, *variant);
        let lead = c64(&oracle[0].coeff);
        let d = r.branches[0].expansion.d as i64;
        let lead_exp = oracle[0].t_exp(d);
        let Some(branch) = r.branches.iter().find(|b| {
            b.expansion.coefficients.get(&lead_exp).is_some_and(|a| (a - lead).norm() < 1e-3)
        }) else {
            ok = false;
            parts.push(format!("{}: no sheet with leading coefficient {lead}", name(*variant)));
            continue;
        };
        let e = &branch.expansion;
        let (mut worst, mut compared, mut missing) = (0.0f64, 0usize, 0usize);
        for term in &oracle {
            let i = term.t_exp(d);
            if e.weight.dot(&i) > e.max_weight {
                continue;
            }
            let want = c64(&term.coeff);
            match e.coefficients.get(&i) {
                Some(got) => {
                    compared += 1;
                    worst = worst.max((got - want).norm() / want.norm());
                }
                None => missing += 1,
            }
        }
        let pass = worst <= 1e-6 && missing == 0 && compared > 0;
        ok &= pass;
        parts.push(format!("{} {compared} coefficients, max relative error {worst:.2e}, {missing} missing", name(*variant)));
    }
    outcome(ok, parts.join("; "))
}

fn commute(perms: &[Vec<usize>]) -> bool {
    perms.iter().enumerate().all(|(i, a)| perms[i + 1..].iter().all(|b| compose(a, b) == compose(b, a)))
}

fn criterion_5(runs: &SquareRootRuns, qo: &Result<SolveReport, String>) -> Outcome {
    let sizes = |r: &SolveReport| {
        let mut s: Vec<usize> = r.monodromy.orbits.iter().map(|o| o.len()).collect();
        s.sort();
        s
    };
    let mut ok = true;
    let mut parts = Vec::new();
    for (variant, run, _) in &runs.phi {
        match run {
            Ok(r) => {
                let want: Vec<usize> = match variant {
                    OracleVariant::Origin => vec![1, 1],
                    _ => vec![2],
                };
                let pass = sizes(r) == want && commute(&r.monodromy.permutations);
                ok &= pass;
                parts.push(format!("{} orbit sizes {:?} permutations {:?}", name(*variant), sizes(r), r.monodromy.permutations));
            }
            Err(e) => {
                ok = false;
                parts.push(format!("{}: {e}", name(*variant)));
            }
        }
    }
    if let Ok(r) = qo {
        ok &= commute(&r.monodromy.permutations);
    }
    outcome(ok, parts.join("; "))
}

fn criterion_6(qo: &Result<SolveReport, String>) -> Outcome {
    let r = match qo {
        Ok(r) => r,
        Err(e) => return outcome(false, e.clone()),
    };
    let orthant = Cone::orthant(2);
    let target = LatticeVector::from([1, 1]);
    let mut ok = r.monodromy.orbits.len() == 1 && r.monodromy.orbits[0].len() == 2;
    let mut signs = Vec::new();
    let mut worst_residual = 0.0f64;
    for b in &r.branches {
        let e = &b.expansion;
        let exact = e.coefficients.len() == 1
            && e.coefficients.get(&target).is_some_and(|a| (a.norm() - 1.0).abs() < 1e-12 && a.im.abs() < 1e-12);
        ok &= exact && leak(e, &orthant) == 0.0 && b.residual.max_relative <= 1e-12 && e.d == 2;
        worst_residual = worst_residual.max(b.residual.max_relative);
        signs.push(e.coefficients.get(&target).map(|a| a.re.signum()).unwrap_or(0.0));
    }
    signs.sort_by(f64::total_cmp);
    ok &= signs == [-1.0, 1.0];
    outcome(ok, format!("d = {}, leading signs {signs:?}, max residual {worst_residual:.2e}", r.branches.first().map_or(0, |b| b.expansion.d)))
}

fn criterion_7() -> Outcome {
    let cases = [(LINE, 3.0), (CUBIC, 6.0), ("x^2*y + x*y^2 + 1 - 5*x*y", 4.0)];
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    let mut ok = true;
    for (text, half) in cases {
        let a = Amoeba::new(&poly(text, &["x", "y"]), AmoebaConfig::default()).unwrap();
        let mut found = 0;
        while found < 20 {
            let x = vec![rng.gen_range(-half..half), rng.gen_range(-half..half)];
            if a.is_in_amoeba(&x, 64, 0.05).unwrap() {
                continue;
            }
            let Ok(order) = a.order_at(&x, rng.gen()) else { continue };
            let integral = a.order_integral_raw(&x, 128).unwrap();
            for (v, o) in integral.iter().zip(&order.0) {
                worst = worst.max((v - *o as f64).abs());
            }
            found += 1;
        }
    }
    ok &= worst < 0.25;
    outcome(ok, format!("60 points on 3 polynomials, max |integral - order| = {worst:.2e}"))
}

fn random_cone(rng: &mut ChaCha8Rng, n: usize) -> Cone {
    let k = rng.gen_range(1..=6);
    let gens = (0..k)
        .map(|_| LatticeVector((0..n).map(|_| rng.gen_range(-4..=4)).collect()))
        .filter(|g| !g.is_zero())
        .collect();
    Cone::new(n, gens).unwrap()
}

fn box_points(n: usize) -> Vec<LatticeVector> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out.into_iter().flat_map(|p: Vec<i64>| (-10..=10).map(move |v| [p.clone(), vec![v]].concat())).collect();
    }
    out.into_iter().map(LatticeVector).collect()
}

/// A random unimodular matrix and its inverse, from elementary operations.
fn random_unimodular(rng: &mut ChaCha8Rng, n: usize) -> (Vec<Vec<i64>>, Vec<Vec<i64>>) {
    let mut m: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect();
    let mut inv = m.clone();
    for _ in 0..rng.gen_range(1..6) {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if i == j {
            // negate column i of m, row i of inv
            for r in 0..n {
                m[r][i] = -m[r][i];
            }
            for c in 0..n {
                inv[i][c] = -inv[i][c];
            }
            continue;
        }
        let k = rng.gen_range(-2..=2);
        // m <- m (I + k e_i e_j^T); inv <- (I - k e_i e_j^T) inv
        for r in 0..n {
            m[r][j] += k * m[r][i];
        }
        for c in 0..n {
            inv[i][c] -= k * inv[j][c];
        }
    }
    (m, inv)
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut dual_mismatch = 0usize;
    for t in 0..100 {
        let n = if t % 2 == 0 { 2 } else { 3 };
        let c = random_cone(&mut rng, n);
        let d = dual_cone(&c).unwrap();
        for u in box_points(n) {
            let brute = c.generators().iter().all(|g| g.dot(&u) >= 0);
            dual_mismatch += (brute != d.contains_lattice(&u)) as usize;
        }
    }
    let mut transpose_mismatch = 0usize;
    for t in 0..50 {
        let n = if t % 2 == 0 { 2 } else { 3 };
        let (m, inv) = random_unimodular(&mut rng, n);
        let cols = |a: &Vec<Vec<i64>>| (0..n).map(|j| LatticeVector((0..n).map(|i| a[i][j]).collect())).collect();
        let rows = |a: &Vec<Vec<i64>>| (0..n).map(|i| LatticeVector(a[i].clone())).collect();
        let lhs = dual_cone(&Cone::new(n, cols(&m)).unwrap()).unwrap();
        let rhs = Cone::new(n, rows(&inv)).unwrap();
        for u in box_points(n) {
            transpose_mismatch += (lhs.contains_lattice(&u) != rhs.contains_lattice(&u)) as usize;
        }
    }
    let mut irregular = 0usize;
    let mut cover_mismatch = 0usize;
    let mut cones = 0usize;
    while cones < 20 {
        let a = LatticeVector((0..2).map(|_| rng.gen_range(-9..=9)).collect());
        let b = LatticeVector((0..2).map(|_| rng.gen_range(-9..=9)).collect());
        if a.0[0] * b.0[1] - a.0[1] * b.0[0] == 0 {
            continue;
        }
        cones += 1;
        let c = Cone::new(2, vec![a, b]).unwrap();
        let pieces = subdivide_regular_2d(&c).unwrap();
        irregular += pieces.iter().filter(|p| !is_regular(p)).count();
        for _ in 0..500 {
            let x = RationalVector::from_ratios(&[(rng.gen_range(-500..=500), rng.gen_range(1..=50)), (rng.gen_range(-500..=500), rng.gen_range(1..=50))]);
            let inside = c.contains(&x);
            let covered = pieces.iter().any(|p| p.contains(&x));
            cover_mismatch += (inside != covered) as usize;
        }
    }
    let ok = dual_mismatch == 0 && transpose_mismatch == 0 && irregular == 0 && cover_mismatch == 0;
    outcome(
        ok,
        format!(
            "dual vs brute force: {dual_mismatch} mismatches over 100 cones; dual of unimodular columns vs inverse-transpose: {transpose_mismatch} mismatches over 50 matrices; subdivisions: {irregular} irregular pieces, {cover_mismatch} coverage mismatches over 10000 points"
        ),
    )
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut violations = 0usize;
    let mut samples = 0usize;
    for t in 0..25 {
        let n = if t % 2 == 0 { 2 } else { 3 };
        let (m, _) = random_unimodular(&mut rng, n);
        let map = MonomialMap::new(m).unwrap();
        let sigma = random_cone(&mut rng, n);
        let p: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let image = Cone::new(
            n,
            sigma
                .generators()
                .iter()
                .map(|g| LatticeVector(map.transpose_apply(&g.to_f64()).iter().map(|v| v.round() as i64).collect()))
                .collect(),
        )
        .unwrap();
        let zero = vec![0.0; n];
        let q = log_modulus(&map.apply(&torus_point(&p, &zero)));
        let scale = 1.0 + p.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        for _ in 0..40 {
            let mut x = p.clone();
            for g in sigma.generators() {
                let s = rng.gen_range(0.0..1.5);
                for (xi, gi) in x.iter_mut().zip(&g.0) {
                    *xi += s * *gi as f64;
                }
            }
            let theta: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)).collect();
            let y = log_modulus(&map.apply(&torus_point(&x, &theta)));
            for g in sigma.generators() {
                let dir = map.transpose_apply(&g.to_f64());
                for step in 0..=5 {
                    let shifted: Vec<f64> = y.iter().zip(&q).zip(&dir).map(|((a, b), c)| a - b + step as f64 * c).collect();
                    samples += 1;
                    violations += (image.min_slack(&shifted) < -1e-9 * scale * 10.0) as usize;
                }
            }
        }
    }
    outcome(violations == 0, format!("{violations} violations over {samples} samples from 25 random triples"))
}

fn main() -> ExitCode {
    let runs = SquareRootRuns::new();
    let qo = solve(&poly("y^2 - x1*x2", &["x1", "x2", "y"]), None, &SolveConfig { all_sheets: true, ..SolveConfig::default() })
        .map_err(|e| e.to_string());
    let results = [
        ("1", criterion_1()),
        ("2", criterion_2()),
        ("3", criterion_3(&runs)),
        ("4", criterion_4(&runs)),
        ("5", criterion_5(&runs, &qo)),
        ("6", criterion_6(&qo)),
        ("7", criterion_7()),
        ("8", criterion_8()),
        ("9", criterion_9()),
    ];
    let mut failed = 0;
    for (id, o) in &results {
        println!("{} criterion {id}: {}", if o.passed { "PASS" } else { "FAIL" }, o.detail);
        failed += (!o.passed) as usize;
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
