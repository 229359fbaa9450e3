//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use bandlab::ensemble::{sample_band_matrix_indexed, BandEnsembleSpec, DiagonalShift, EntryDistribution};
use bandlab::experiments::{
    run_curves, run_flow, run_gaps, run_locallaw, run_que, run_selfconsistent, run_uncertainty, write_run, Command,
    CurvesConfig, FlowConfig, GapsConfig, LocalLawConfig, RunOutput, SelfConsistentConfig, UncertaintyConfig,
};
use bandlab::que::QueConfig;
use bandlab::reduction::{block_split, Reducer};
use bandlab::spectral::{eigh, generalized_green, resolvent_dense, ward_residual};
use bandlab::stats::{bulk_window, mean};
use bandlab::Result;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CURVES_TOL: f64 = 1e-8;
const CURVES_BUDGET: Duration = Duration::from_secs(5);
const SCHUR_TOL: f64 = 1e-8;
const SCHUR_BUDGET: Duration = Duration::from_secs(30);
const SLOPE_REL_TOL: f64 = 1e-4;
const SLOPE_FD_STEP: f64 = 1e-6;
const SLOPE_ASYMPTOTE_REL: f64 = 0.25;
const GAPS_MARGIN: f64 = 0.02;
const GAPS_BUDGET: Duration = Duration::from_secs(30 * 60);
const WARD_REL_TOL: f64 = 1e-10;
const SELF_CONSISTENT_TOL: f64 = 1e-10;
const GREEN_C: f64 = 10.0;
const RIGIDITY_C: f64 = 10.0;
const POLICY_C: f64 = 20.0;
const POLICY_EPS: f64 = 0.1;
const Q_TRACE_WINDOW: f64 = 0.05;
const UNCERTAINTY_MU: f64 = 0.05;
const FLOW_KS: f64 = 0.02;
const FLOW_SIGMAS: f64 = 5.0;

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: impl Into<String>) -> Result<Verdict> {
    Ok(Verdict { passed, detail: detail.into() })
}

fn kind_rows<'a>(out: &'a RunOutput, kind: &'a str) -> impl Iterator<Item = &'a bandlab::report::SampleRecord> + 'a {
    out.report.per_sample.iter().filter(move |r| r.values.get("kind").and_then(|v| v.as_str()) == Some(kind))
}

fn max_of(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(f64::NEG_INFINITY, f64::max)
}

fn criterion_curves() -> Result<Verdict> {
    let start = Instant::now();
    let cfg = CurvesConfig { w: 3, p: 2, dist: EntryDistribution::Gaussian, e_steps: 400, tol: CURVES_TOL, ..Default::default() };
    let out = run_curves(&cfg)?;
    let elapsed = start.elapsed();
    let worst = max_of(out.report.column("value").into_iter());
    let extras = &out.report.summary.extras;
    verdict(
        out.passed() && elapsed < CURVES_BUDGET,
        format!(
            "N=12 W=3: {} eigenvalues matched, max |crossing - lambda| = {worst:.2e} (tol {CURVES_TOL:.0e}), excluded {}, dropped grid points {}, {:.2?}",
            out.report.per_sample.len(),
            extras["excluded_near_sigma_d"],
            extras["dropped_grid_points"],
            elapsed
        ),
    )
}

fn criterion_schur() -> Result<Verdict> {
    let start = Instant::now();
    let spec = BandEnsembleSpec::new(16, 2, EntryDistribution::Gaussian, 2)?;
    let n = spec.n;
    let mut rng = ChaCha8Rng::seed_from_u64(0xc2);
    let mut worst = 0.0f64;
    for s in 0..50 {
        let h = sample_band_matrix_indexed::<f64>(&spec, s)?;
        let g = DiagonalShift::new((0..n).map(|_| rng.random_range(-0.5..0.5)).collect())?;
        let dec = block_split(&h, 16, 0)?;
        let red = Reducer::new(&dec, &g)?;
        for _ in 0..10 {
            let mut e: f64 = rng.random_range(-2.0..2.0);
            while red.is_singular(e) {
                e += 1e-6;
            }
            let z = Complex::new(rng.random_range(-2.0..2.0), rng.random_range(0.01..1.0));
            let q = red.qmatrix(e)?;
            let lhs = resolvent_dense(&q, z)?;
            let rhs = generalized_green(&h, &g, 16, z, Complex::new(e, 0.0))?.top_block();
            worst = worst.max(lhs.max_abs_diff_c(&rhs));
        }
    }
    let elapsed = start.elapsed();
    verdict(worst <= SCHUR_TOL && elapsed < SCHUR_BUDGET, format!("500 (z, e) at N=64 W=16: max entry diff {worst:.2e} (tol {SCHUR_TOL:.0e}), {elapsed:.2?}"))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs())
}

fn criterion_slope() -> Result<Verdict> {
    // Three slope formulas on 100 bulk triples at N=128.
    let spec = BandEnsembleSpec::new(32, 2, EntryDistribution::Gaussian, 3)?;
    let (n, w) = (spec.n, 32);
    let mut rng = ChaCha8Rng::seed_from_u64(0xc3);
    let mut worst = 0.0f64;
    let mut triples = 0;
    for s in 0..10 {
        let h = sample_band_matrix_indexed::<f64>(&spec, s)?;
        let dec = block_split(&h, w, 0)?;
        let red = Reducer::new(&dec, &DiagonalShift::zero(n))?;
        while triples < 10 * (s as usize + 1) {
            let e: f64 = rng.random_range(-1.0..1.0);
            let ok = red.nearest_delta(e).is_some_and(|(_, d)| d > 1e-3);
            if !ok {
                continue;
            }
            let labels = red.labels_at(e);
            let k = rng.random_range(labels.clone());
            let (c, _, r) = red.curve_point(e, k)?;
            let resolvent = -r;
            let fd = (red.curve_value(e + SLOPE_FD_STEP, k)? - red.curve_value(e - SLOPE_FD_STEP, k)?) / (2.0 * SLOPE_FD_STEP);
            // C_k(e) = c is an eigenvalue of H with the lower block shifted by e - c.
            let hg = bandlab::ensemble::apply_diagonal_shift(&h, &DiagonalShift::lower_block(n, w, e - c))?;
            let sp = eigh(&hg)?;
            let j = (0..n).min_by(|&a, &b| (sp.values[a] - c).abs().total_cmp(&(sp.values[b] - c).abs())).expect("nonempty");
            let mass: f64 = sp.vector(j)[..w].iter().map(|x| x * x).sum();
            let from_mass = 1.0 - 1.0 / mass;
            worst = worst.max(rel(resolvent, fd)).max(rel(resolvent, from_mass)).max(rel(fd, from_mass));
            triples += 1;
        }
    }
    let local_ok = worst <= SLOPE_REL_TOL;

    // Bulk-averaged slope at the eigenvalues of H, N=512, p=2.
    let spec = BandEnsembleSpec::new(128, 2, EntryDistribution::Gaussian, 3)?;
    let window = bulk_window(spec.n, 0.1)?;
    let mut means = Vec::new();
    for s in 0..50 {
        let sp = eigh(&sample_band_matrix_indexed::<f64>(&spec, s)?)?;
        let slopes: Vec<f64> = window
            .clone()
            .map(|k| {
                let mass: f64 = sp.vector(k)[..128].iter().map(|x| x * x).sum();
                1.0 - 1.0 / mass
            })
            .collect();
        means.push(mean(&slopes));
    }
    let avg = mean(&means);
    let target = 1.0 - 2.0 * 2.0;
    let asym_ok = ((avg - target) / target).abs() <= SLOPE_ASYMPTOTE_REL;
    verdict(
        local_ok && asym_ok,
        format!(
            "{triples} triples at N=128: max relative disagreement {worst:.2e} (tol {SLOPE_REL_TOL:.0e}); bulk mean slope at N=512 over 50 samples {avg:.4} vs {target} (within {SLOPE_ASYMPTOTE_REL})"
        ),
    )
}

fn criterion_gaps() -> Result<Verdict> {
    let start = Instant::now();
    let cfg = GapsConfig { ws: vec![128], p: 2, dist: EntryDistribution::Rademacher, n_samples: 100, kappa: 0.1, ks_margin: GAPS_MARGIN, ..Default::default() };
    let out = run_gaps(&cfg)?;
    let elapsed = start.elapsed();
    let r = &out.report.per_sample[0];
    let (ks, base) = (r.get_f64("ks_band_goe").unwrap_or(f64::NAN), r.get_f64("ks_goe_goe").unwrap_or(f64::NAN));
    verdict(
        out.passed() && elapsed < GAPS_BUDGET,
        format!("N=512 Rademacher vs GOE, 100 samples each: KS {ks:.4} <= baseline {base:.4} + {GAPS_MARGIN}, {elapsed:.2?}"),
    )
}

fn criterion_que() -> Result<Verdict> {
    let cfg = QueConfig::default();
    let out = run_que(&cfg)?;
    let m = out.report.column("mean_abs_stat");
    let f = out.report.column("mean_flatness");
    let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(" > ");
    verdict(out.passed(), format!("N = 128, 256, 512: mean |stat| {}; block-mass deviation {}", fmt(&m), fmt(&f)))
}

fn criterion_ward() -> Result<Verdict> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xc6);
    let mut worst = 0.0f64;
    for s in 0..100u64 {
        let w = [2, 4, 8, 16][s as usize % 4];
        let spec = BandEnsembleSpec::new(w, 2 + s as usize % 3, EntryDistribution::Gaussian, 6)?;
        let h = sample_band_matrix_indexed::<f64>(&spec, s)?;
        let z = Complex::new(rng.random_range(-2.5..2.5), 10f64.powf(rng.random_range(-3.0..0.5)));
        let g = resolvent_dense(&h, z)?;
        worst = worst.max(ward_residual(&g, z)? / g.hs_norm_sqr());
    }
    verdict(worst <= WARD_REL_TOL, format!("100 resolvents: max relative residual {worst:.2e} (tol {WARD_REL_TOL:.0e})"))
}

fn criterion_self_consistent() -> Result<Verdict> {
    let cfg = SelfConsistentConfig { exact_tol: SELF_CONSISTENT_TOL, green_c: GREEN_C, ..Default::default() };
    let out = run_selfconsistent(&cfg)?;
    let exact = max_of(kind_rows(&out, "unperturbed").filter_map(|r| r.get_f64("value")));
    let pert = max_of(kind_rows(&out, "perturbed").filter_map(|r| r.get_f64("value")));
    let green = max_of(kind_rows(&out, "green_agreement").filter_map(|r| r.get_f64("value")));
    let bound = GREEN_C * (512f64 * 512f64.powf(-0.5)).powf(-0.5);
    verdict(
        out.passed(),
        format!(
            "{} grid points: max |M - m| {exact:.2e}; perturbed residual {pert:.2e}; max |G_ii - M_i| {green:.3} (bound {bound:.3})",
            kind_rows(&out, "unperturbed").count()
        ),
    )
}

fn criteria_local(out: &RunOutput) -> (Result<Verdict>, Result<Verdict>) {
    let bound = RIGIDITY_C * 512f64.ln();
    let band = max_of(kind_rows(out, "rigidity_band").filter_map(|r| r.get_f64("value")));
    let goe = max_of(kind_rows(out, "rigidity_goe").filter_map(|r| r.get_f64("value")));
    let rig_ok = kind_rows(out, "rigidity_band").chain(kind_rows(out, "rigidity_goe")).all(|r| r.passed);
    let rig = verdict(rig_ok, format!("N=512, 20 samples: max bulk scaled deviation band {band:.3}, GOE {goe:.3} (bound {bound:.3})"));

    let policy = POLICY_C * 512f64.powf(POLICY_EPS);
    let entry = max_of(kind_rows(out, "h_local_law").filter_map(|r| r.get_f64("entry_ratio")));
    let trace = max_of(kind_rows(out, "h_local_law").filter_map(|r| r.get_f64("trace_ratio")));
    let q_im: Vec<f64> = kind_rows(out, "q_local_law").filter_map(|r| r.get_f64("im_trace")).collect();
    let q_lo = q_im.iter().copied().fold(f64::INFINITY, f64::min);
    let q_hi = max_of(q_im.iter().copied());
    let law_ok = kind_rows(out, "h_local_law").chain(kind_rows(out, "q_local_law")).all(|r| r.passed)
        && q_lo >= Q_TRACE_WINDOW
        && q_hi <= 1.0 / Q_TRACE_WINDOW;
    let floor = kind_rows(out, "q_spacing_floor").all(|r| r.passed);
    let law = verdict(
        law_ok,
        format!(
            "H at eta=N^-1/2: entry {entry:.3}, trace {trace:.3} (bound {policy:.2}); Q Im-trace in [{q_lo:.3}, {q_hi:.3}] (window [{Q_TRACE_WINDOW}, {}]); spacing floor clean: {floor}",
            1.0 / Q_TRACE_WINDOW
        ),
    );
    (rig, law)
}

fn criterion_uncertainty() -> Result<Verdict> {
    let cfg = UncertaintyConfig { w: 64, p: 2, mu: UNCERTAINTY_MU, n_samples: 50, ..Default::default() };
    let out = run_uncertainty(&cfg)?;
    let band: Vec<_> = kind_rows(&out, "band").collect();
    let worst_mass = band.iter().filter_map(|r| r.get_f64("worst_mass")).fold(f64::INFINITY, f64::min);
    let worst_quad = band.iter().filter_map(|r| r.get_f64("quad_margin")).fold(f64::INFINITY, f64::min);
    let ex = &out.report.summary.extras;
    verdict(
        out.passed(),
        format!(
            "N=256, {} (sample, e) checks: min mass {worst_mass:.3} (mu^2 = {:.4}), min quadratic margin {worst_quad:.3}; controls fail: vector {}, quadratic {}",
            band.len(),
            UNCERTAINTY_MU * UNCERTAINTY_MU,
            ex["require_vector_control_fails"],
            ex["require_quadratic_control_fails"]
        ),
    )
}

fn criterion_flow() -> Result<Verdict> {
    let cfg = FlowConfig { dt: 1e-4, n_paths: 10_000, ks_threshold: FLOW_KS, var_sigmas: FLOW_SIGMAS, var_times: vec![0.1, 1.0, 10.0], ..Default::default() };
    let out = run_flow(&cfg)?;
    let ks = kind_rows(&out, "ks_em_vs_exact_law").filter_map(|r| r.get_f64("value")).next().unwrap_or(f64::NAN);
    let devs: Vec<String> = kind_rows(&out, "variance_preservation")
        .map(|r| format!("t={}: {:.1} se", r.get_f64("t").unwrap_or(f64::NAN), r.get_f64("value").unwrap_or(f64::NAN) / r.get_f64("bound").unwrap_or(f64::NAN) * FLOW_SIGMAS))
        .collect();
    verdict(out.passed(), format!("KS {ks:.4} (< {FLOW_KS}); variance deviation {}", devs.join(", ")))
}

/// Byte comparison of two output directories, ignoring manifest timings.
fn compare_dirs(a: &std::path::Path, b: &std::path::Path) -> Result<Vec<String>> {
    let mut diffs = Vec::new();
    let mut names: Vec<_> = std::fs::read_dir(a)?.map(|e| e.map(|e| e.file_name())).collect::<std::io::Result<_>>()?;
    names.sort();
    for name in names {
        let (x, y) = (std::fs::read(a.join(&name))?, std::fs::read(b.join(&name))?);
        let same = if name == "manifest.json" {
            let strip = |v: &[u8]| -> Result<serde_json::Value> {
                let mut j: serde_json::Value = serde_json::from_slice(v)?;
                j.as_object_mut().map(|o| o.remove("timings_ms"));
                Ok(j)
            };
            strip(&x)? == strip(&y)?
        } else {
            x == y
        };
        if !same {
            diffs.push(name.to_string_lossy().into_owned());
        }
    }
    Ok(diffs)
}

fn criterion_determinism() -> Result<Verdict> {
    let small: [(Command, &str); 7] = [
        (Command::Curves, "{}"),
        (Command::Gaps, r#"{"ws": [16], "n_samples": 5}"#),
        (Command::Que, r#"{"ws": [8, 16], "n_samples": 4}"#),
        (Command::LocalLaw, r#"{"w": 32, "n_samples": 2}"#),
        (Command::Uncertainty, r#"{"w": 16, "n_samples": 3}"#),
        (Command::Flow, r#"{"n_paths": 200, "var_paths": 200, "var_times": [0.1, 0.5]}"#),
        (Command::SelfConsistent, r#"{"w": 16, "green_samples": 1}"#),
    ];
    let root = tempfile::tempdir()?;
    let mut files = 0;
    let mut bad = Vec::new();
    for (cmd, text) in small {
        let dirs = [root.path().join(format!("{}_a", cmd.name())), root.path().join(format!("{}_b", cmd.name()))];
        for d in &dirs {
            let (config, out) = bandlab::experiments::run_command(cmd, Some(text), &[])?;
            write_run(d, cmd, &config, &out, 0.0)?;
            bandlab::experiments::verify_manifest(d)?;
        }
        files += std::fs::read_dir(&dirs[0])?.count();
        bad.extend(compare_dirs(&dirs[0], &dirs[1])?.into_iter().map(|f| format!("{}/{f}", cmd.name())));
    }
    verdict(bad.is_empty(), format!("7 commands run twice, {files} files compared, mismatches: {bad:?}"))
}

fn main() -> ExitCode {
    let local = run_locallaw(&LocalLawConfig {
        w: 128,
        n_samples: 20,
        rigidity_c: RIGIDITY_C,
        q_c: Q_TRACE_WINDOW,
        policy: bandlab::stats::DominationPolicy { c: POLICY_C, eps: POLICY_EPS },
        ..Default::default()
    });
    let (rig, law) = match &local {
        Ok(out) => criteria_local(out),
        Err(e) => (verdict(false, format!("error: {e}")), verdict(false, format!("error: {e}"))),
    };
    let mut results: Vec<(usize, &str, Result<Verdict>)> = vec![
        (1, "curve family crossings", criterion_curves()),
        (2, "schur complement identity", criterion_schur()),
        (3, "slope consistency", criterion_slope()),
        (4, "gap universality", criterion_gaps()),
        (5, "que decay", criterion_que()),
        (6, "ward identity", criterion_ward()),
        (7, "self-consistent equation", criterion_self_consistent()),
        (8, "rigidity", rig),
        (9, "local laws", law),
        (10, "uncertainty principle", criterion_uncertainty()),
        (11, "flow laws", criterion_flow()),
        (12, "determinism", criterion_determinism()),
    ];
    results.sort_by_key(|r| r.0);
    let mut failures = 0;
    for (i, name, r) in results {
        let (ok, detail) = match r {
            Ok(v) => (v.passed, v.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        failures += usize::from(!ok);
        println!("criterion {i:2} {name:<28} {} | {detail}", if ok { "PASS" } else { "FAIL" });
    }
    println!("acceptance: {} of 12 criteria passed", 12 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
