//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use std::process::ExitCode;
use std::time::Instant;

use jensen_gap::algebra::{
    apply_function, apply_function_contour, is_nonneg, order_leq_within, real_power, ContourSpec, HermitianElement,
    SpectralInterval,
};
use jensen_gap::bounds::{
    all_chains, chain_integral_mean, chain_slater, chain_theta_reverse, chain_variance, ChainParams, ChainStatus,
    InstanceSpec,
};
use jensen_gap::functional::{sample_functional_with, FamilyTag, StateFunctional};
use jensen_gap::harness::{random_unitary, run_campaign, CampaignConfig, WindowPolicy};
use jensen_gap::matrix::CMatrix;
use jensen_gap::registry::{delta, discrete_jensen_bounds, theta, theta_sup, ConvexFunctionSpec, DEFAULT_SELECTORS};
use jensen_gap::tol;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn functions() -> Vec<ConvexFunctionSpec> {
    DEFAULT_SELECTORS.iter().map(|s| s.parse().unwrap()).collect()
}

fn random_window(f: &ConvexFunctionSpec, rng: &mut ChaCha8Rng) -> SpectralInterval {
    if f.domain().0.is_finite() {
        let m: f64 = rng.random_range(0.2..2.0);
        SpectralInterval::new(m, m * rng.random_range(1.1..10.0)).unwrap()
    } else {
        let m: f64 = rng.random_range(-3.0..2.0);
        SpectralInterval::new(m, m + rng.random_range(0.1..4.0)).unwrap()
    }
}

fn random_positive(dim: usize, lo: f64, hi: f64, rng: &mut ChaCha8Rng) -> HermitianElement {
    let values: Vec<f64> = (0..dim).map(|_| rng.random_range(lo..hi)).collect();
    HermitianElement::from_spectrum(&random_unitary(dim, rng), &values)
}

fn random_gram(dim: usize, rng: &mut ChaCha8Rng) -> HermitianElement {
    let x = CMatrix::from_fn(dim, |_, _| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    HermitianElement::gram(&x)
}

fn inequality_suite() -> Outcome {
    let cfg = CampaignConfig {
        seed: 42,
        trials: 10_000,
        dims: vec![1, 2, 4, 8],
        functions: DEFAULT_SELECTORS.iter().map(|s| s.to_string()).collect(),
        functionals: FamilyTag::ALL.to_vec(),
        window_policy: WindowPolicy::Margin,
        tolerance: Some(1e-9),
    };
    let start = Instant::now();
    let report = run_campaign(&cfg).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let violated = report.violation_count();
    let pass = violated == 0 && report.counts_conserved() && secs < 600.0;
    let mut detail = format!(
        "{} instances x {} chains, {violated} violated, {:.1}s of a 600s budget",
        report.instances,
        report.chains.len(),
        secs
    );
    for v in report.violations.iter().take(5) {
        detail.push_str(&format!("\n      {} trial {}: {:?}", v.theorem, v.trial, v.chain.values));
    }
    outcome(pass, detail)
}

fn equality_cases() -> Outcome {
    let inst = InstanceSpec::new(
        HermitianElement::from_real_diagonal(&[1.0, 3.0]),
        StateFunctional::NormalizedTrace,
        "pow:2".parse().unwrap(),
        SpectralInterval::new(1.0, 3.0).unwrap(),
    )
    .unwrap();
    let close = |got: &[f64], want: &[f64]| got.len() == want.len() && got.iter().zip(want).all(|(a, b)| (a - b).abs() <= 1e-12);
    let variance = chain_variance(&inst).unwrap().values;
    let theta_third = chain_theta_reverse(&inst).unwrap().values[2];
    let slater = chain_slater(&inst).unwrap()[0].values.clone();
    let secant = chain_integral_mean(&inst).unwrap()[0].values.clone();
    let checks = [
        close(&variance, &[0.0, 1.0, 1.0, 1.0]),
        close(&[theta_third], &[1.0]),
        close(&slater, &[1.25; 3]),
        close(&secant, &[2.0 / 3.0; 3]),
    ];
    outcome(
        checks.iter().all(|&c| c),
        format!("variance {variance:?}, theta third term {theta_third}, slater {slater:?}, secant integral mean {secant:?}"),
    )
}

/// Chain values for `c = [x]` from the scalar formulas, without the
/// library's centered forms. Terms involving `sup Θ` take it from the
/// registry.
fn scalar_chains(f: &ConvexFunctionSpec, x: f64, w: &SpectralInterval, p: &ChainParams) -> Vec<(&'static str, Option<Vec<f64>>)> {
    let (m, big_m) = (w.m(), w.M());
    let width = big_m - m;
    let mid = 0.5 * (m + big_m);
    let (k, big_k) = {
        let (a, b) = (f.d2f(m), f.d2f(big_m));
        (a.min(b), a.max(b))
    };
    let span = f.df(big_m) - f.df(m);
    let quarter = 0.25 * width;
    let sup = theta_sup(f, w);
    let mut out = Vec::new();

    let e = p.mccarthy_exponent;
    let mccarthy = if x <= 0.0 { None } else { Some(vec![x.powf(e), x.powf(e)]) };
    out.push(("mccarthy", mccarthy));
    out.push(("gradient_reverse", Some(vec![0.0, 0.0, 0.0, 0.0, quarter * span])));
    let weight = (big_m - x) * (x - m) / width;
    out.push((
        "theta_reverse",
        Some(vec![0.0, 0.0, weight * sup, (quarter * sup).min(weight * span), quarter * span]),
    ));
    let naive_theta = (f.f(big_m) - f.f(x)) / (big_m - x) - (f.f(x) - f.f(m)) / (x - m);
    out.push(("theta_pointwise", Some(vec![0.0, 0.0, quarter * naive_theta, quarter * sup, quarter * span])));
    out.push((
        "lah_ribaric",
        Some(vec![f.f(x), (f.f(big_m) * (x - m) + f.f(m) * (big_m - x)) / width]),
    ));
    let defect = (f.f(m) + f.f(big_m)) / 2.0 - f.f(mid);
    out.push((
        "midpoint_reverse",
        Some(vec![0.0, 0.0, (1.0 + 2.0 * (x - mid).abs() / width) * defect, 2.0 * defect]),
    ));
    let taylor = |t: f64| {
        let q = (x - t) * (x - t);
        vec![0.5 * big_k * q, f.f(x) - f.df(t) * (x - t) - f.f(t), 0.5 * k * q]
    };
    let gradient = |t: f64| {
        let q = (x - t) * (x - t);
        vec![0.5 * big_k * q, x * f.df(x) - t * f.df(x) + f.f(t) - f.f(x), 0.5 * k * q]
    };
    out.push(("taylor_twosided", Some(taylor(p.taylor_point))));
    out.push(("taylor_gradient", Some(gradient(p.taylor_point))));
    out.push(("jensen_curvature", Some(vec![0.0, 0.0, 0.0])));
    out.push(("midpoint_curvature", Some(taylor(mid))));
    out.push(("midpoint_curvature_gradient", Some(gradient(mid))));
    let slater = if f.df(x).abs() > tol::POS { Some(vec![0.0, 0.0, 0.0]) } else { None };
    out.push(("slater", slater.clone()));
    out.push(("slater_tangent", slater));
    let antiderivative = |t: f64| -> f64 {
        match f.selector().as_str() {
            "inv" => t.ln(),
            "neglog" => t - t * t.ln(),
            "tlogt" => t * t * (2.0 * t.ln() - 1.0) / 4.0,
            "exp:1" => t.exp(),
            "negroot:0.5" => -t.powf(1.5) / 1.5,
            s => {
                let p: f64 = s.trim_start_matches("pow:").parse().unwrap();
                t.powf(p + 1.0) / (p + 1.0)
            }
        }
    };
    let mean = (antiderivative(big_m) - antiderivative(m)) / width;
    let wt = width * width / 12.0 + (x - mid) * (x - mid);
    out.push((
        "integral_mean_secant",
        Some(vec![
            0.25 * big_k * wt,
            0.5 * (f.f(x) + ((big_m - x) * f.f(big_m) + (x - m) * f.f(m)) / width) - mean,
            0.25 * k * wt,
        ]),
    ));
    out.push((
        "integral_mean_tangent",
        Some(vec![0.5 * big_k * wt, mean - f.f(x) - mid * f.df(x) + x * f.df(x), 0.5 * k * wt]),
    ));
    out.push(("variance", Some(vec![0.0, 0.0, (big_m - x) * (x - m), 0.25 * width * width])));
    out
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let contour_fns: [(&str, fn(f64) -> f64, fn(Complex64) -> Complex64); 4] = [
        ("sqrt", f64::sqrt, |z| z.sqrt()),
        ("square", |t| t * t, |z| z * z),
        ("inverse", |t| 1.0 / t, |z| z.inv()),
        ("log", f64::ln, |z| z.ln()),
    ];
    let window = SpectralInterval::new(0.25, 5.0).unwrap();
    let contour = ContourSpec::enclosing(&window, 64).unwrap();
    let mut worst_contour = 0.0f64;
    for _ in 0..100 {
        let dim = rng.random_range(1..=6);
        let c = random_positive(dim, 0.25, 5.0, &mut rng);
        for (_, real, complex) in &contour_fns {
            let a = apply_function(&c, real, &window).unwrap();
            let b = apply_function_contour(&c, complex, &contour).unwrap();
            worst_contour = worst_contour.max(a.matrix().max_abs_diff(b.matrix()));
        }
    }

    // The oracle's quadrature and naive differences carry rounding of the
    // operands, so the comparison is relative to their magnitude.
    let mut worst_scalar = 0.0f64;
    let mut mismatches = Vec::new();
    let fs = functions();
    for trial in 0..1000 {
        let f = fs[trial % fs.len()];
        let w = random_window(&f, &mut rng);
        let x = rng.random_range(w.m()..=w.M());
        let family = FamilyTag::ALL[trial % 4];
        let psi = sample_functional_with(1, family, &mut rng).unwrap();
        let inst = InstanceSpec::new(HermitianElement::from_real_diagonal(&[x]), psi, f, w).unwrap();
        let params = ChainParams {
            taylor_point: rng.random_range(w.m()..=w.M()),
            ..ChainParams::defaults_for(&inst)
        };
        let scale = [f.f(w.m()), f.f(w.M()), f.f(x), w.M() * f.df(w.M()), w.m() * f.df(w.m())]
            .iter()
            .fold(1.0f64, |a, v| a.max(v.abs()));
        let chains = all_chains(&inst, &params);
        for (id, expected) in scalar_chains(&f, x, &w, &params) {
            let chain = chains.iter().find(|c| c.theorem_id == id).unwrap();
            match (&chain.status, expected) {
                (ChainStatus::ConditionNotMet(_), None) => {}
                (ChainStatus::ConditionNotMet(why), Some(_)) if id.starts_with("theta") && why.contains("not inside") => {}
                (ChainStatus::ConditionNotMet(why), Some(_)) => mismatches.push(format!("{id}: unexpected {why}")),
                (_, None) => mismatches.push(format!("{id}: expected a failed condition")),
                (_, Some(v)) => {
                    let diff = chain.values.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                    let rel = diff / scale;
                    worst_scalar = worst_scalar.max(rel);
                    if rel > 1e-12 || chain.values.len() != v.len() {
                        mismatches.push(format!("{id} {f} x={x}: {:?} vs {v:?}", chain.values));
                    }
                }
            }
        }
    }
    let pass = worst_contour <= 1e-6 && mismatches.is_empty();
    let mut detail = format!(
        "contour vs eigen max diff {worst_contour:.2e} on 100 instances x 4 functions; dim 1 vs scalar max rel diff {worst_scalar:.2e} on 1000 instances"
    );
    for m in mismatches.iter().take(5) {
        detail.push_str(&format!("\n      {m}"));
    }
    outcome(pass, detail)
}

fn structural_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let fs = functions();
    let mut worst_identity = 0.0f64;
    let mut evaluations = 0;
    for f in &fs {
        for _ in 0..125 {
            let w = random_window(f, &mut rng);
            for i in 1..=100 {
                let t = w.m() + w.width() * i as f64 / 101.0;
                let d = delta(f, t, &w).unwrap();
                let th = theta(f, t, &w).unwrap();
                let rhs = (w.M() - t) * (t - w.m()) / w.width() * th;
                worst_identity = worst_identity.max((d - rhs).abs() / d.abs().max(1.0));
                evaluations += 1;
            }
        }
    }
    let mut sup_ok = true;
    for f in &fs {
        for _ in 0..100 {
            let w = random_window(f, &mut rng);
            let span = f.df(w.M()) - f.df(w.m());
            sup_ok &= theta_sup(f, &w) <= span + 1e-9 * span.abs().max(1.0);
        }
    }
    let mut bracket_ok = true;
    for p in [1.5, 2.0, 3.0, 5.0] {
        let f: ConvexFunctionSpec = format!("pow:{p}").parse().unwrap();
        for _ in 0..20 {
            let w = random_window(&f, &mut rng);
            let (k, big_k) = f.curvature_bounds(&w);
            for i in 0..=1000 {
                let t = if i == 1000 { w.M() } else { w.m() + w.width() * i as f64 / 1000.0 };
                let v = f.d2f(t);
                let slack = 1e-12 * v.abs().max(1.0);
                bracket_ok &= k <= v + slack && v <= big_k + slack;
            }
        }
    }
    outcome(
        worst_identity <= 1e-9 && sup_ok && bracket_ok,
        format!(
            "identity max rel err {worst_identity:.2e} over {evaluations} grid points; sup bound {}; curvature bracket {}",
            if sup_ok { "holds" } else { "fails" },
            if bracket_ok { "holds" } else { "fails" }
        ),
    )
}

fn algebra_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut shirali_ford = 0;
    for _ in 0..1000 {
        let dim = rng.random_range(1..=8);
        if is_nonneg(&random_gram(dim, &mut rng)) {
            shirali_ford += 1;
        }
    }
    let mut loewner_heinz = 0;
    for _ in 0..1000 {
        let dim = rng.random_range(1..=6);
        let b = random_positive(dim, 0.05, 3.0, &mut rng);
        let a = b.add(&random_gram(dim, &mut rng).scale(0.5));
        let ok = [0.25, 0.5, 0.75].iter().all(|&p| {
            order_leq_within(&real_power(&b, p).unwrap(), &real_power(&a, p).unwrap(), tol::ORDER)
        });
        if ok {
            loewner_heinz += 1;
        }
    }
    let mut power_laws = 0;
    for _ in 0..1000 {
        let dim = rng.random_range(1..=6);
        let a = random_positive(dim, 0.2, 5.0, &mut rng);
        let alpha = rng.random_range(-2.0..2.0);
        let beta = rng.random_range(-2.0..2.0);
        let product = real_power(&a, alpha).unwrap().product(&real_power(&a, beta).unwrap());
        let sum = real_power(&a, alpha + beta).unwrap();
        let law_ix = product.max_abs_diff(sum.matrix()) <= tol::spec_scaled(sum.matrix().max_abs());
        let inverse = real_power(&a, alpha).unwrap().matrix().solve(&CMatrix::identity(dim)).unwrap();
        let neg = real_power(&a, -alpha).unwrap();
        let law_x = inverse.max_abs_diff(neg.matrix()) <= tol::spec_scaled(neg.matrix().max_abs());
        if law_ix && law_x {
            power_laws += 1;
        }
    }
    outcome(
        shirali_ford == 1000 && loewner_heinz == 1000 && power_laws == 1000,
        format!("Shirali-Ford {shirali_ford}/1000, Loewner-Heinz {loewner_heinz}/1000, power laws {power_laws}/1000"),
    )
}

fn discrete_jensen() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut failures = 0;
    let mut total = 0;
    for f in functions() {
        for _ in 0..10_000 {
            let w = random_window(&f, &mut rng);
            let n = rng.random_range(1..=10);
            let points: Vec<f64> = (0..n).map(|_| rng.random_range(w.m()..=w.M())).collect();
            let weights: Vec<f64> = (0..n).map(|_| rng.random_range(0.01..1.0)).collect();
            let b = discrete_jensen_bounds(&f, &points, &weights).unwrap();
            // brute force: normalized weights, means, and the two gaps
            let total_w: f64 = weights.iter().sum();
            let p: Vec<f64> = weights.iter().map(|x| x / total_w).collect();
            let nf = n as f64;
            let uniform = points.iter().map(|&x| f.f(x)).sum::<f64>() / nf - f.f(points.iter().sum::<f64>() / nf);
            let wmean: f64 = p.iter().zip(&points).map(|(a, x)| a * x).sum();
            let weighted = p.iter().zip(&points).map(|(a, &x)| a * f.f(x)).sum::<f64>() - f.f(wmean);
            let pmin = p.iter().copied().fold(f64::INFINITY, f64::min);
            let pmax = p.iter().copied().fold(0.0, f64::max);
            let slack = tol::ORDER * points.iter().map(|&x| f.f(x).abs()).fold(1.0, f64::max);
            let ordered = nf * pmin * uniform <= weighted + slack && weighted <= nf * pmax * uniform + slack;
            let agrees = (b.middle - weighted).abs() <= slack && b.is_ordered();
            if !(ordered && agrees) {
                failures += 1;
            }
            total += 1;
        }
    }
    outcome(failures == 0, format!("{} of {total} instances ordered", total - failures))
}

fn determinism() -> Outcome {
    let cfg = CampaignConfig::default();
    let a = run_campaign(&cfg).unwrap().to_json_without_wall_time().unwrap();
    let b = run_campaign(&cfg).unwrap().to_json_without_wall_time().unwrap();
    outcome(a == b, format!("default campaign reports of {} bytes, identical: {}", a.len(), a == b))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("1 inequality suite", inequality_suite),
        ("2 equality cases", equality_cases),
        ("3 oracle equivalence", oracle_equivalence),
        ("4 structural identities", structural_identities),
        ("5 algebra properties", algebra_properties),
        ("6 discrete Jensen", discrete_jensen),
        ("7 determinism", determinism),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let o = run();
        if !o.pass {
            failed += 1;
        }
        println!("{} criterion {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("acceptance: {} of 7 criteria passed", 7 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
