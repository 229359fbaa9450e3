//! Experiment runners behind the command-line driver.
//!
//! Every runner is a pure function of its config: it returns the emitted files
//! as bytes together with a [`DiagnosticsReport`]. Files reach disk only via
//! [`write_run`], which also writes the manifest.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::ensemble::{
    apply_diagonal_shift, sample_band_matrix_indexed, BandEnsembleSpec, DiagonalShift, EntryDistribution,
};
use crate::error::{invalid, Error, Result};
use crate::flows::{
    dbm_evolve, gaussian_divisible, max_stable_dt, ou_euler_path, ou_euler_step, ou_exact_step, ou_law, sample_goe,
    FlowState,
};
use crate::io::{matrix_bytes, SvgPlot, Table};
use crate::linalg::Matrix;
use crate::que::{que_ensemble_test, slope_bound_report, uncertainty_check, uncertainty_quadratic_margin, uncertainty_vector_check, QueConfig};
use crate::reduction::{block_split, curve_family, linspace, Reducer};
use crate::report::{DiagnosticsReport, SampleRecord};
use crate::rng::{Domain, StreamKey};
use crate::spectral::{eigvalsh, generalized_green};
use crate::stats::{
    bulk_window, gap_cdf_distance, ks_one_sample, ks_two_sample, level_repulsion_curve, local_law_residual,
    normalized_gaps, q_local_law_residual, rigidity_profile, solve_self_consistent_m, spacing_floor_violations,
    variance, DominationPolicy, GapSample, SolverOptions,
};

/// A named output file.
#[derive(Clone, Debug, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl Artifact {
    pub fn new(name: &str, bytes: Vec<u8>) -> Self {
        Self { name: name.to_owned(), bytes }
    }
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub artifacts: Vec<Artifact>,
    pub report: DiagnosticsReport,
}

impl RunOutput {
    fn new(report: DiagnosticsReport, mut artifacts: Vec<Artifact>) -> Result<Self> {
        artifacts.push(Artifact::new("report.json", report.to_json()?.into_bytes()));
        Ok(Self { artifacts, report })
    }

    pub fn passed(&self) -> bool {
        self.report.passed()
    }

    pub fn artifact(&self, name: &str) -> Option<&Artifact> {
        self.artifacts.iter().find(|a| a.name == name)
    }
}

/// Rectangular grid of spectral parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexGrid {
    pub re_min: f64,
    pub re_max: f64,
    pub re_steps: usize,
    pub im_values: Vec<f64>,
}

impl ComplexGrid {
    pub fn points(&self) -> Vec<Complex<f64>> {
        let res = linspace(self.re_min, self.re_max, self.re_steps);
        self.im_values.iter().flat_map(|&im| res.iter().map(move |&re| Complex::new(re, im))).collect()
    }
}

fn band_spec(w: usize, p: usize, dist: EntryDistribution, seed: u64) -> Result<BandEnsembleSpec> {
    BandEnsembleSpec::new(w, p, dist, seed)
}

fn nonzero(name: &str, v: usize) -> Result<()> {
    if v == 0 {
        return Err(Error::Config(format!("{name} must be positive")));
    }
    Ok(())
}

/// Move `e` off `σ(D)` when it lies within the singular tolerance.
fn admissible_energy(red: &Reducer<f64>, e: f64) -> f64 {
    let mut e = e;
    while red.is_singular(e) {
        e += 1e-7;
    }
    e
}

// ---------------------------------------------------------------- curves

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CurvesConfig {
    pub seed: u64,
    pub w: usize,
    pub p: usize,
    pub dist: EntryDistribution,
    pub sample: u64,
    pub offset: usize,
    pub e_min: f64,
    pub e_max: f64,
    pub e_steps: usize,
    /// Diagonal shift in original coordinates; empty means zero.
    pub g: Vec<f64>,
    pub tol: f64,
}

impl Default for CurvesConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            w: 3,
            p: 2,
            dist: EntryDistribution::Gaussian,
            sample: 0,
            offset: 0,
            e_min: -3.0,
            e_max: 3.0,
            e_steps: 400,
            g: Vec::new(),
            tol: 1e-8,
        }
    }
}

/// Curve family, diagonal crossings and their comparison with the spectrum of `H^g`.
pub fn run_curves(cfg: &CurvesConfig) -> Result<RunOutput> {
    if cfg.e_steps == 0 {
        return Err(Error::Config("empty energy grid (e_steps = 0)".into()));
    }
    if !(cfg.e_min < cfg.e_max) {
        return Err(Error::Config("e_min must be below e_max".into()));
    }
    let spec = band_spec(cfg.w, cfg.p, cfg.dist, cfg.seed)?;
    let n = spec.n;
    let h = sample_band_matrix_indexed::<f64>(&spec, cfg.sample)?;
    let g = if cfg.g.is_empty() { DiagonalShift::zero(n) } else { DiagonalShift::new(cfg.g.clone())? };
    let dec = block_split(&h, cfg.w, cfg.offset)?;
    let g_block = dec.rotate_shift(&g)?;
    let red = Reducer::new(&dec, &g_block)?;
    let grid = linspace(cfg.e_min, cfg.e_max, cfg.e_steps);
    let fam = curve_family(&red, &grid)?;
    let crossings = fam.crossings(&red)?;
    let lambda = eigvalsh(&apply_diagonal_shift(&h, &g)?)?;

    let mut rep = DiagnosticsReport::new("curves")
        .param("n", n)
        .param("w", cfg.w)
        .param("seed", cfg.seed)
        .param("e_steps", cfg.e_steps)
        .param("tol", cfg.tol);
    let labels_ok = fam.values.iter().all(|v| v.len() == cfg.w);
    rep.require("require_w_labels_per_point", labels_ok);
    rep.extra("dropped_grid_points", fam.dropped.len());
    rep.extra("crossings", crossings.len());
    let mut excluded = 0usize;
    let mut matched = vec![false; crossings.len()];
    for (j, &l) in lambda.iter().enumerate() {
        if red.nearest_delta(l).is_some_and(|(_, d)| d <= cfg.tol) {
            excluded += 1;
            continue;
        }
        let best = crossings
            .iter()
            .enumerate()
            .map(|(i, c)| (i, (c.e - l).abs()))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        let (err, label) = match best {
            Some((i, d)) => {
                matched[i] = true;
                (d, crossings[i].k as i64)
            }
            None => (f64::INFINITY, -1),
        };
        let rec = if err.is_finite() {
            SampleRecord::upper_bound(j as u64, err, cfg.tol)
        } else {
            SampleRecord::new(j as u64, false, None)
        };
        rep.push(rec.with("lambda", l).with("label", label));
    }
    let stray = crossings
        .iter()
        .zip(&matched)
        .filter(|(c, m)| !**m && !lambda.iter().any(|l| (l - c.e).abs() <= cfg.tol))
        .count();
    rep.extra("excluded_near_sigma_d", excluded);
    rep.require("require_no_stray_crossings", stray == 0);

    let mut curves = Table::new(&["e", "k", "value"]);
    for (e, k, v) in fam.long_rows() {
        curves.push(vec![e.into(), k.into(), v.into()]);
    }
    let mut sigma = Table::new(&["index", "delta"]);
    for (i, &d) in fam.sigma_d.iter().enumerate() {
        sigma.push(vec![i.into(), d.into()]);
    }
    let mut cross = Table::new(&["k", "e", "lambda_k"]);
    for c in &crossings {
        cross.push(vec![c.k.into(), c.e.into(), lambda[c.k].into()]);
    }
    let mut plot = SvgPlot::new((cfg.e_min, cfg.e_max), (cfg.e_min, cfg.e_max));
    plot.diagonal();
    plot.x_ticks(&fam.sigma_d, "#888");
    for k in fam.labels() {
        plot.polyline(&fam.curve(k), SvgPlot::color(k));
    }
    for c in &crossings {
        plot.point(c.e, c.e, "black");
    }
    let svg = plot.render(&format!("curves C_k(e), N = {n}, W = {}", cfg.w));
    RunOutput::new(
        rep,
        vec![
            Artifact::new("curves.csv", curves.to_bytes()?),
            Artifact::new("sigma_d.csv", sigma.to_bytes()?),
            Artifact::new("crossings.csv", cross.to_bytes()?),
            Artifact::new("curves.svg", svg.into_bytes()),
        ],
    )
}

// ---------------------------------------------------------------- gaps

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GapsConfig {
    pub seed: u64,
    pub ws: Vec<usize>,
    pub p: usize,
    pub dist: EntryDistribution,
    pub n_samples: usize,
    pub kappa: f64,
    /// Allowed excess of the band-vs-GOE distance over the GOE-vs-GOE baseline.
    pub ks_margin: f64,
    pub x_grid: Vec<f64>,
}

impl Default for GapsConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            ws: vec![128],
            p: 2,
            dist: EntryDistribution::Rademacher,
            n_samples: 100,
            kappa: 0.1,
            ks_margin: 0.02,
            x_grid: vec![0.1, 0.2, 0.5],
        }
    }
}

/// Pooled bulk gaps of `n_samples` matrices produced by `sample`.
fn pooled_gaps(
    n: usize,
    kappa: f64,
    source: &str,
    samples: impl Iterator<Item = u64>,
    mut sample: impl FnMut(u64) -> Result<Matrix<f64>>,
    table: &mut Table,
) -> Result<GapSample> {
    let window = bulk_window(n, kappa)?;
    let mut pooled = GapSample::empty(source, window.clone());
    for s in samples {
        let lam = eigvalsh(&sample(s)?)?;
        let g = normalized_gaps(&lam, window.clone(), source)?;
        for (k, x) in g.k.iter().zip(&g.gaps) {
            table.push(vec![n.into(), s.into(), (*k).into(), (*x).into(), source.into()]);
        }
        pooled.extend(&g);
    }
    Ok(pooled)
}

/// Band vs GOE gap statistics with a GOE-vs-GOE baseline per ladder level.
pub fn run_gaps(cfg: &GapsConfig) -> Result<RunOutput> {
    nonzero("n_samples", cfg.n_samples)?;
    if cfg.ws.is_empty() {
        return Err(Error::Config("empty ladder ws".into()));
    }
    let mut rep = DiagnosticsReport::new("gaps")
        .param("ws", cfg.ws.clone())
        .param("p", cfg.p)
        .param("dist", cfg.dist.to_string())
        .param("n_samples", cfg.n_samples)
        .param("kappa", cfg.kappa)
        .param("ks_margin", cfg.ks_margin)
        .param("seed", cfg.seed);
    let header = ["n", "sample", "k", "gap", "source"];
    let mut band_t = Table::new(&header);
    let mut goe_t = Table::new(&header);
    let mut hist = Table::new(&["n", "bin_lo", "bin_hi", "band_density", "goe_density"]);
    let ns = cfg.n_samples as u64;
    for &w in &cfg.ws {
        let spec = band_spec(w, cfg.p, cfg.dist, cfg.seed)?;
        let n = spec.n;
        let band = pooled_gaps(n, cfg.kappa, "band", 0..ns, |s| sample_band_matrix_indexed(&spec, s), &mut band_t)?;
        let goe_a = pooled_gaps(n, cfg.kappa, "goe_a", 0..ns, |s| sample_goe(n, cfg.seed, s), &mut goe_t)?;
        let goe_b = pooled_gaps(n, cfg.kappa, "goe_b", ns..2 * ns, |s| sample_goe(n, cfg.seed, s), &mut goe_t)?;
        let ks = gap_cdf_distance(&band, &goe_a)?;
        let baseline = gap_cdf_distance(&goe_b, &goe_a)?;
        let threshold = baseline + cfg.ks_margin;
        let rep_band = level_repulsion_curve(&band, &cfg.x_grid)?;
        let rep_goe = level_repulsion_curve(&goe_a, &cfg.x_grid)?;
        let slope = |r: &DiagnosticsReport| r.summary.extras.get("loglog_slope").cloned().unwrap_or(Value::Null);
        rep.push(
            SampleRecord::upper_bound(n as u64, ks, threshold)
                .with("n", n)
                .with("ks_band_goe", ks)
                .with("ks_goe_goe", baseline)
                .with("n_gaps", band.len())
                .with("repulsion_slope_band", slope(&rep_band))
                .with("repulsion_slope_goe", slope(&rep_goe))
                .with("repulsion_p_band", rep_band.column("p"))
                .with("repulsion_p_goe", rep_goe.column("p")),
        );
        let bins = 40;
        let width = 0.1;
        for b in 0..bins {
            let (lo, hi) = (b as f64 * width, (b + 1) as f64 * width);
            let dens = |g: &GapSample| g.gaps.iter().filter(|&&x| x >= lo && x < hi).count() as f64 / (g.len() as f64 * width);
            hist.push(vec![n.into(), lo.into(), hi.into(), dens(&band).into(), dens(&goe_a).into()]);
        }
    }
    RunOutput::new(
        rep,
        vec![
            Artifact::new("gaps_band.csv", band_t.to_bytes()?),
            Artifact::new("gaps_goe.csv", goe_t.to_bytes()?),
            Artifact::new("gap_hist.csv", hist.to_bytes()?),
        ],
    )
}

// ---------------------------------------------------------------- que

/// QUE ladder with a per-level CSV of the decay curve.
pub fn run_que(cfg: &QueConfig) -> Result<RunOutput> {
    if cfg.n_samples == 0 {
        return Err(Error::Config("n_samples must be positive".into()));
    }
    let rep = que_ensemble_test(cfg)?;
    let mut t = Table::new(&["n", "w", "mean_abs_stat", "mean_flatness"]);
    for r in &rep.per_sample {
        t.push(vec![
            (r.get_f64("n").unwrap_or(0.0) as usize).into(),
            (r.get_f64("w").unwrap_or(0.0) as usize).into(),
            r.get_f64("mean_abs_stat").unwrap_or(f64::NAN).into(),
            r.get_f64("mean_flatness").unwrap_or(f64::NAN).into(),
        ]);
    }
    RunOutput::new(rep, vec![Artifact::new("que_decay.csv", t.to_bytes()?)])
}

// ---------------------------------------------------------------- local laws

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LocalLawConfig {
    pub seed: u64,
    pub w: usize,
    pub p: usize,
    pub dist: EntryDistribution,
    pub n_samples: usize,
    pub omega: f64,
    pub policy: DominationPolicy,
    /// Energies for the local law of `H`; `η = N^{−1/2}` unless `etas` is nonempty.
    pub energies: Vec<f64>,
    pub etas: Vec<f64>,
    /// Reference energy for `Q_e`.
    pub q_energy: f64,
    /// Trace window constant `c`.
    pub q_c: f64,
    /// Gaussian-divisible weight; `None` means `N^{−1/2}`.
    pub q_weight: Option<f64>,
    pub kappa: f64,
    /// Rigidity bound is `rigidity_c · log N`.
    pub rigidity_c: f64,
}

impl Default for LocalLawConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            w: 128,
            p: 2,
            dist: EntryDistribution::Gaussian,
            n_samples: 20,
            omega: 0.2,
            policy: DominationPolicy::default(),
            energies: vec![-1.0, 0.0, 0.5],
            etas: Vec::new(),
            q_energy: 0.0,
            q_c: 0.05,
            q_weight: None,
            kappa: 0.1,
            rigidity_c: 10.0,
        }
    }
}

/// Local laws for `H` and `Q_e`, the spacing floor of `Q_e`, and rigidity of band and GOE spectra.
pub fn run_locallaw(cfg: &LocalLawConfig) -> Result<RunOutput> {
    nonzero("n_samples", cfg.n_samples)?;
    let spec = band_spec(cfg.w, cfg.p, cfg.dist, cfg.seed)?;
    let gauss = spec.with_dist(EntryDistribution::Gaussian).with_seed(cfg.seed ^ 0x5eed_0001);
    let n = spec.n;
    let nf = n as f64;
    let etas = if cfg.etas.is_empty() { vec![nf.powf(-0.5)] } else { cfg.etas.clone() };
    let h_grid: Vec<Complex<f64>> = etas.iter().flat_map(|&eta| cfg.energies.iter().map(move |&e| Complex::new(e, eta))).collect();
    let q = cfg.q_weight.unwrap_or(nf.powf(-0.5));
    let radius = nf.powf(-cfg.omega);
    let q_etas: Vec<f64> = (0..5).map(|i| nf.powf(-1.0 + cfg.omega) * nf.powf((1.0 - cfg.omega) * i as f64 / 4.0)).collect();
    let rig_bound = cfg.rigidity_c * nf.ln();

    let mut rep = DiagnosticsReport::new("locallaw")
        .param("n", n)
        .param("w", cfg.w)
        .param("n_samples", cfg.n_samples)
        .param("omega", cfg.omega)
        .param("policy_c", cfg.policy.c)
        .param("policy_eps", cfg.policy.eps)
        .param("q_weight", q)
        .param("q_c", cfg.q_c)
        .param("rigidity_bound", rig_bound)
        .param("seed", cfg.seed);
    let mut rows = Table::new(&["sample", "kind", "e", "eta", "entry_ratio", "trace_ratio"]);
    let mut idx = 0u64;
    let mut push = |rep: &mut DiagnosticsReport, rec: SampleRecord| {
        rep.push(SampleRecord { sample: idx, ..rec });
        idx += 1;
    };
    for s in 0..cfg.n_samples as u64 {
        let h = sample_band_matrix_indexed::<f64>(&spec, s)?;
        let hl = local_law_residual(&h, cfg.w, &h_grid, cfg.omega, cfg.policy)?;
        for r in hl.per_sample {
            rows.push(vec![
                s.into(),
                "h".into(),
                r.get_f64("e").unwrap_or(f64::NAN).into(),
                r.get_f64("eta").unwrap_or(f64::NAN).into(),
                r.get_f64("entry_ratio").unwrap_or(f64::NAN).into(),
                r.get_f64("trace_ratio").unwrap_or(f64::NAN).into(),
            ]);
            push(&mut rep, r.with("kind", "h_local_law").with("matrix_sample", s));
        }

        let h1 = sample_band_matrix_indexed::<f64>(&gauss, s)?;
        let hq = gaussian_divisible(&h1, &h, q)?;
        let dec = block_split(&hq, cfg.w, 0)?;
        let red = Reducer::new(&dec, &DiagonalShift::zero(n))?;
        let e = admissible_energy(&red, cfg.q_energy);
        let q_grid: Vec<Complex<f64>> = q_etas
            .iter()
            .flat_map(|&eta| [-1.0, -0.5, 0.0, 0.5, 1.0].map(|f| Complex::new(e + f * radius, eta)))
            .collect();
        let ql = q_local_law_residual(&red, e, &q_grid, cfg.omega, cfg.q_c, cfg.policy)?;
        for r in ql.per_sample {
            rows.push(vec![
                s.into(),
                "q".into(),
                r.get_f64("e").unwrap_or(f64::NAN).into(),
                r.get_f64("eta").unwrap_or(f64::NAN).into(),
                r.get_f64("entry_ratio").unwrap_or(f64::NAN).into(),
                r.get_f64("im_trace").unwrap_or(f64::NAN).into(),
            ]);
            push(&mut rep, r.with("kind", "q_local_law").with("matrix_sample", s));
        }
        let xi = red.xi(e)?;
        let viol = spacing_floor_violations(&xi, n, cfg.omega).len();
        push(&mut rep, SampleRecord::new(0, viol == 0, None).with("kind", "q_spacing_floor").with("violations", viol).with("matrix_sample", s));

        let lam = eigvalsh(&h)?;
        let rig = rigidity_profile(&lam, cfg.kappa, rig_bound)?;
        let worst = rig.summary.extras.get("max_bulk").and_then(Value::as_f64).unwrap_or(f64::INFINITY);
        push(&mut rep, SampleRecord::upper_bound(0, worst, rig_bound).with("kind", "rigidity_band").with("matrix_sample", s));
        let goe = sample_goe::<f64>(n, cfg.seed, s)?;
        let rig = rigidity_profile(&eigvalsh(&goe)?, cfg.kappa, rig_bound)?;
        let worst = rig.summary.extras.get("max_bulk").and_then(Value::as_f64).unwrap_or(f64::INFINITY);
        push(&mut rep, SampleRecord::upper_bound(0, worst, rig_bound).with("kind", "rigidity_goe").with("matrix_sample", s));
    }
    RunOutput::new(rep, vec![Artifact::new("residuals.csv", rows.to_bytes()?)])
}

// ---------------------------------------------------------------- uncertainty

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UncertaintyConfig {
    pub seed: u64,
    pub w: usize,
    pub p: usize,
    pub dist: EntryDistribution,
    pub n_samples: usize,
    pub mu: f64,
    pub energies: Vec<f64>,
    /// Samples on which the slope bound is checked over `slope_grid` energies.
    pub slope_samples: usize,
    pub slope_grid: usize,
    pub k_bound: f64,
}

impl Default for UncertaintyConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            w: 64,
            p: 2,
            dist: EntryDistribution::Gaussian,
            n_samples: 50,
            mu: 0.05,
            energies: vec![-0.5, 0.0, 0.5],
            slope_samples: 1,
            slope_grid: 100,
            k_bound: 10.0,
        }
    }
}

/// `H` whose `D` block is diagonal with an eigenvector supported off the first
/// `W` coordinates at eigenvalue `0.4` (a violation of the uncertainty principle).
pub fn engineered_vector_violation() -> Matrix<f64> {
    let mut h = Matrix::from_diagonal(&[0.1, -0.2, -1.0, 1.0, 0.4, 2.0, -2.0, 3.0]);
    h[(0, 2)] = 0.3;
    h[(2, 0)] = 0.3;
    h
}

/// `D` eigenvalues `0.5 ± 0.01` with identical coupling to `A`: `BᵀRB` cancels at `e = 0.5`.
pub fn engineered_quadratic_violation() -> Matrix<f64> {
    let mut h = Matrix::from_diagonal(&[0.0, 0.0, 0.49, 0.51, 3.0, -3.0, 4.0, -4.0]);
    for r in [2, 3] {
        h[(0, r)] = 0.5;
        h[(r, 0)] = 0.5;
    }
    h
}

/// Uncertainty-principle checks on band samples plus engineered negative controls.
pub fn run_uncertainty(cfg: &UncertaintyConfig) -> Result<RunOutput> {
    nonzero("n_samples", cfg.n_samples)?;
    let spec = band_spec(cfg.w, cfg.p, cfg.dist, cfg.seed)?;
    let n = spec.n;
    let mut rep = DiagnosticsReport::new("uncertainty")
        .param("n", n)
        .param("w", cfg.w)
        .param("mu", cfg.mu)
        .param("n_samples", cfg.n_samples)
        .param("energies", cfg.energies.clone())
        .param("seed", cfg.seed);
    let mut t = Table::new(&["sample", "e", "n_tested", "worst_mass", "worst_single_mass", "quad_margin", "passed"]);
    let mut idx = 0u64;
    for s in 0..cfg.n_samples as u64 {
        let h = sample_band_matrix_indexed::<f64>(&spec, s)?;
        let dec = block_split(&h, cfg.w, 0)?;
        let red = Reducer::new(&dec, &DiagonalShift::zero(n))?;
        for &e0 in &cfg.energies {
            let e = admissible_energy(&red, e0);
            let c = uncertainty_check(&red, e, cfg.mu)?;
            let wm = c.worst_mass.unwrap_or(f64::NAN);
            let margin = c.worst_mass.map_or(f64::INFINITY, |m| m - cfg.mu * cfg.mu).min(c.quad_margin.unwrap_or(0.0));
            t.push(vec![
                s.into(),
                e.into(),
                c.n_tested.into(),
                wm.into(),
                c.worst_single_mass.unwrap_or(f64::NAN).into(),
                c.quad_margin.unwrap_or(f64::NAN).into(),
                c.passed().into(),
            ]);
            rep.push(
                SampleRecord::new(idx, c.passed(), Some(margin))
                    .with("kind", "band")
                    .with("matrix_sample", s)
                    .with("e", e)
                    .with("vacuous", c.vacuous())
                    .with("worst_mass", c.worst_mass.map_or(Value::Null, Value::from))
                    .with("quad_margin", c.quad_margin.map_or(Value::Null, Value::from)),
            );
            idx += 1;
        }
        if (s as usize) < cfg.slope_samples {
            let grid = linspace(-1.0, 1.0, cfg.slope_grid);
            let sb = slope_bound_report(&red, &grid, cfg.k_bound, cfg.mu)?;
            let ok = sb.passed();
            rep.push(
                SampleRecord::new(idx, ok, sb.summary.worst_margin)
                    .with("kind", "slope_bound")
                    .with("matrix_sample", s)
                    .with("checked", sb.per_sample.len()),
            );
            idx += 1;
        }
    }
    // Negative controls must fail.
    let dec = block_split(&engineered_vector_violation(), 2, 0)?;
    let red = Reducer::new(&dec, &DiagonalShift::zero(8))?;
    let v = uncertainty_vector_check(&red, 0.4, cfg.mu)?;
    rep.require("require_vector_control_fails", !v.vector_passed());
    let dec = block_split(&engineered_quadratic_violation(), 2, 0)?;
    let red = Reducer::new(&dec, &DiagonalShift::zero(8))?;
    let qm = uncertainty_quadratic_margin(&red, 0.5, cfg.mu)?;
    rep.require("require_quadratic_control_fails", qm < 0.0);
    rep.extra("control_vector_worst_mass", v.worst_mass.unwrap_or(f64::NAN));
    rep.extra("control_quad_margin", qm);
    RunOutput::new(rep, vec![Artifact::new("uncertainty.csv", t.to_bytes()?)])
}

// ---------------------------------------------------------------- flow

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FlowConfig {
    pub seed: u64,
    pub w: usize,
    pub p: usize,
    pub dt: f64,
    pub t_final: f64,
    pub n_paths: usize,
    /// Starting value of the tracked entry; `None` means `2√s`.
    pub h0: Option<f64>,
    pub ks_threshold: f64,
    pub var_times: Vec<f64>,
    pub var_dt: f64,
    pub var_paths: usize,
    /// Standard-error multiple allowed for the variance check.
    pub var_sigmas: f64,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            w: 2,
            p: 2,
            dt: 1e-4,
            t_final: 0.5,
            n_paths: 10_000,
            h0: None,
            ks_threshold: 0.02,
            var_times: vec![0.1, 1.0, 10.0],
            var_dt: 1e-3,
            var_paths: 10_000,
            var_sigmas: 5.0,
        }
    }
}

/// Single-entry Euler–Maruyama paths against the exact OU law, variance
/// preservation along the flow, and one full-matrix endpoint.
pub fn run_flow(cfg: &FlowConfig) -> Result<RunOutput> {
    nonzero("n_paths", cfg.n_paths)?;
    nonzero("var_paths", cfg.var_paths)?;
    let spec = band_spec(cfg.w, cfg.p, EntryDistribution::Gaussian, cfg.seed)?;
    let bound = max_stable_dt(&spec);
    for (name, dt) in [("dt", cfg.dt), ("var_dt", cfg.var_dt)] {
        if !(dt > 0.0 && dt <= bound) {
            return Err(Error::Precondition(format!("{name} = {dt} violates the stability bound dt <= 0.1*N*min s_ij = {bound}")));
        }
    }
    if !(cfg.t_final > 0.0) || cfg.var_times.iter().any(|&t| !(t > 0.0)) {
        return Err(Error::Config("flow times must be positive".into()));
    }
    let n = spec.n as f64;
    let s = 1.0 / spec.bandwidth() as f64;
    let h0 = cfg.h0.unwrap_or(2.0 * s.sqrt());
    let steps = (cfg.t_final / cfg.dt).round() as usize;
    let key = StreamKey::new(cfg.seed);

    let em: Vec<f64> = (0..cfg.n_paths as u64)
        .map(|p| ou_euler_path(h0, n, s, cfg.dt, steps, &mut key.stream(Domain::FlowNoise, p, 0, 1)))
        .collect();
    let exact: Vec<f64> = (0..cfg.n_paths as u64)
        .map(|p| {
            let xi: f64 = key.stream(Domain::OuNoise, p, 0, 1).sample(StandardNormal);
            ou_exact_step(h0, n, s, cfg.t_final, xi)
        })
        .collect();
    let (mean, sd) = ou_law(h0, n, s, cfg.t_final);
    let law = Normal::new(mean, sd).map_err(|e| invalid(e.to_string()))?;
    let ks_law = ks_one_sample(&em, |x| law.cdf(x))?;
    let ks_draws = ks_two_sample(&em, &exact)?;

    let mut rep = DiagnosticsReport::new("flow")
        .param("n", spec.n)
        .param("w", cfg.w)
        .param("dt", cfg.dt)
        .param("t_final", cfg.t_final)
        .param("n_paths", cfg.n_paths)
        .param("h0", h0)
        .param("seed", cfg.seed);
    rep.push(
        SampleRecord::upper_bound(0, ks_law, cfg.ks_threshold)
            .with("kind", "ks_em_vs_exact_law")
            .with("ks_em_vs_exact_draws", ks_draws),
    );

    // Variance preservation from the stationary law.
    let mut times = cfg.var_times.clone();
    times.sort_by(f64::total_cmp);
    let mut x: Vec<f64> = (0..cfg.var_paths as u64)
        .map(|p| {
            let z: f64 = key.stream(Domain::Auxiliary, p, 0, 1).sample(StandardNormal);
            z * s.sqrt()
        })
        .collect();
    let mut rngs: Vec<_> = (0..cfg.var_paths as u64).map(|p| key.stream(Domain::FlowNoise, p, 1, 2)).collect();
    let mut t_now = 0.0;
    let se = s * (2.0 / (cfg.var_paths as f64 - 1.0)).sqrt();
    let mut var_rows = Table::new(&["t", "variance", "s", "standard_error"]);
    for (i, &t) in times.iter().enumerate() {
        let k = ((t - t_now) / cfg.var_dt).round() as usize;
        for (xi, rng) in x.iter_mut().zip(rngs.iter_mut()) {
            for _ in 0..k {
                let z: f64 = rng.sample(StandardNormal);
                *xi = ou_euler_step(*xi, n, s, cfg.var_dt, z);
            }
        }
        t_now += k as f64 * cfg.var_dt;
        let v = variance(&x);
        let dev = (v - s).abs();
        var_rows.push(vec![t_now.into(), v.into(), s.into(), se.into()]);
        rep.push(
            SampleRecord::upper_bound(1 + i as u64, dev, cfg.var_sigmas * se)
                .with("kind", "variance_preservation")
                .with("t", t_now)
                .with("variance", v),
        );
    }

    let hm = sample_band_matrix_indexed::<f64>(&spec, 0)?;
    let end = dbm_evolve(&FlowState::new(spec.clone(), hm)?, cfg.dt, steps, cfg.seed)?;
    let mut samples = Table::new(&["path", "em", "exact"]);
    for (i, (a, b)) in em.iter().zip(&exact).enumerate() {
        samples.push(vec![i.into(), (*a).into(), (*b).into()]);
    }
    RunOutput::new(
        rep,
        vec![
            Artifact::new("flow_samples.csv", samples.to_bytes()?),
            Artifact::new("variance.csv", var_rows.to_bytes()?),
            Artifact::new("endpoint.bin", matrix_bytes(&end.h, cfg.w, end.t)?),
        ],
    )
}

// ---------------------------------------------------------------- self-consistent equation

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SelfConsistentConfig {
    pub seed: u64,
    pub w: usize,
    pub p: usize,
    pub grid: ComplexGrid,
    /// `z′ − z` for the perturbed runs and the Green-function comparison.
    pub zprime_offset: f64,
    /// Perturbed runs use `g_i` uniform in `[−g_scale, g_scale]`.
    pub g_scale: f64,
    pub exact_tol: f64,
    pub green_samples: usize,
    pub green_energies: Vec<f64>,
    /// Agreement bound is `green_c · (Nη)^{−1/2}` at `η = N^{−1/2}`.
    pub green_c: f64,
}

impl Default for SelfConsistentConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            w: 128,
            p: 2,
            grid: ComplexGrid {
                re_min: -1.5,
                re_max: 1.5,
                re_steps: 10,
                im_values: vec![0.02, 0.05, 0.1, 0.2, 0.3, 0.5, 0.7, 1.0, 1.5, 2.0],
            },
            zprime_offset: 0.01,
            g_scale: 1e-3,
            exact_tol: 1e-10,
            green_samples: 2,
            green_energies: vec![0.3],
            green_c: 10.0,
        }
    }
}

/// Self-consistent vector equation: unperturbed exactness, perturbed
/// convergence, and agreement with diagonal entries of `G(z, z′)`.
pub fn run_selfconsistent(cfg: &SelfConsistentConfig) -> Result<RunOutput> {
    let spec = band_spec(cfg.w, cfg.p, EntryDistribution::Gaussian, cfg.seed)?;
    let n = spec.n;
    let profile = spec.profile::<f64>()?;
    let opts = SolverOptions::default();
    let zero = DiagonalShift::zero(n);
    let key = StreamKey::new(cfg.seed);
    let g_pert = DiagonalShift::new(
        (0..n).map(|i| cfg.g_scale * (2.0 * key.stream(Domain::Auxiliary, 0, i, 0).random::<f64>() - 1.0)).collect(),
    )?;
    let mut rep = DiagnosticsReport::new("selfconsistent")
        .param("n", n)
        .param("w", cfg.w)
        .param("zprime_offset", cfg.zprime_offset)
        .param("g_scale", cfg.g_scale)
        .param("seed", cfg.seed);
    let mut t = Table::new(&["re", "im", "case", "iterations", "residual", "max_dev_from_m"]);
    let mut idx = 0u64;
    for z in cfg.grid.points() {
        let sol = solve_self_consistent_m(&profile, &zero, cfg.w, z, z, opts)?;
        t.push(vec![z.re.into(), z.im.into(), "exact".into(), sol.iterations.into(), sol.residual.into(), sol.band_deviation.into()]);
        rep.push(
            SampleRecord::upper_bound(idx, sol.band_deviation, cfg.exact_tol)
                .with("kind", "unperturbed")
                .with("re", z.re)
                .with("im", z.im),
        );
        idx += 1;
        let zp = z + cfg.zprime_offset;
        let rec = match solve_self_consistent_m(&profile, &g_pert, cfg.w, z, zp, opts) {
            Ok(sol) => {
                t.push(vec![z.re.into(), z.im.into(), "perturbed".into(), sol.iterations.into(), sol.residual.into(), sol.band_deviation.into()]);
                SampleRecord::upper_bound(idx, sol.residual, opts.tol).with("band_deviation", sol.band_deviation)
            }
            Err(e) => SampleRecord::new(idx, false, None).with("error", e.to_string()),
        };
        rep.push(rec.with("kind", "perturbed").with("re", z.re).with("im", z.im));
        idx += 1;
    }
    let eta = (n as f64).powf(-0.5);
    let bound = cfg.green_c * (n as f64 * eta).powf(-0.5);
    for s in 0..cfg.green_samples as u64 {
        let h = sample_band_matrix_indexed::<f64>(&spec, s)?;
        for &e in &cfg.green_energies {
            let z = Complex::new(e, eta);
            let zp = z + cfg.zprime_offset;
            let sol = solve_self_consistent_m(&profile, &zero, cfg.w, z, zp, opts)?;
            let g = generalized_green(&h, &zero, cfg.w, z, zp)?;
            let dev = (0..n).map(|i| (g.g[(i, i)] - sol.m[i]).norm()).fold(0.0f64, f64::max);
            rep.push(SampleRecord::upper_bound(idx, dev, bound).with("kind", "green_agreement").with("matrix_sample", s).with("e", e));
            idx += 1;
        }
    }
    RunOutput::new(rep, vec![Artifact::new("selfconsistent.csv", t.to_bytes()?)])
}

// ---------------------------------------------------------------- driver

/// Subcommands of the driver.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Curves,
    Gaps,
    Que,
    LocalLaw,
    Uncertainty,
    Flow,
    SelfConsistent,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::Curves,
        Command::Gaps,
        Command::Que,
        Command::LocalLaw,
        Command::Uncertainty,
        Command::Flow,
        Command::SelfConsistent,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Curves => "curves",
            Command::Gaps => "gaps",
            Command::Que => "que",
            Command::LocalLaw => "locallaw",
            Command::Uncertainty => "uncertainty",
            Command::Flow => "flow",
            Command::SelfConsistent => "selfconsistent",
        }
    }
}

/// Parse a config document, apply top-level overrides, and fill defaults.
pub fn parse_config<C: DeserializeOwned + Serialize + Default>(text: Option<&str>, overrides: &[(String, Value)]) -> Result<C> {
    let mut doc = match text {
        Some(t) => serde_json::from_str::<Value>(t).map_err(|e| Error::Config(format!("malformed JSON: {e}")))?,
        None => serde_json::to_value(C::default())?,
    };
    let obj = doc.as_object_mut().ok_or_else(|| Error::Config("config must be a JSON object".into()))?;
    for (k, v) in overrides {
        obj.insert(k.clone(), v.clone());
    }
    serde_json::from_value(doc).map_err(|e| Error::Config(format!("invalid config: {e}")))
}

fn execute<C>(text: Option<&str>, overrides: &[(String, Value)], run: impl Fn(&C) -> Result<RunOutput>) -> Result<(String, RunOutput)>
where
    C: DeserializeOwned + Serialize + Default,
{
    let cfg: C = parse_config(text, overrides)?;
    let canonical = crate::report::to_json_pretty(&cfg)?;
    Ok((canonical, run(&cfg)?))
}

/// Run a command on a config document; returns the canonical config and outputs.
pub fn run_command(cmd: Command, text: Option<&str>, overrides: &[(String, Value)]) -> Result<(String, RunOutput)> {
    match cmd {
        Command::Curves => execute(text, overrides, run_curves),
        Command::Gaps => execute(text, overrides, run_gaps),
        Command::Que => execute(text, overrides, run_que),
        Command::LocalLaw => execute(text, overrides, run_locallaw),
        Command::Uncertainty => execute(text, overrides, run_uncertainty),
        Command::Flow => execute(text, overrides, run_flow),
        Command::SelfConsistent => execute(text, overrides, run_selfconsistent),
    }
}

/// Run summary written next to the outputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub artifact_version: String,
    pub config_sha256: String,
    /// SHA-256 of every emitted file, keyed by file name.
    pub outputs: BTreeMap<String, String>,
    pub timings_ms: BTreeMap<String, f64>,
    pub passed: bool,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf> {
    let path = dir.join(name);
    let tmp = dir.join(format!(".{name}.tmp"));
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, &path)?;
    Ok(path)
}

/// Write all artifacts, the canonical config and finally the manifest into `dir`.
pub fn write_run(dir: &Path, cmd: Command, config: &str, out: &RunOutput, elapsed_ms: f64) -> Result<RunManifest> {
    fs::create_dir_all(dir)?;
    let mut outputs = BTreeMap::new();
    let mut all = out.artifacts.clone();
    all.push(Artifact::new("config.json", config.as_bytes().to_vec()));
    for a in &all {
        write_atomic(dir, &a.name, &a.bytes)?;
        outputs.insert(a.name.clone(), sha256_hex(&a.bytes));
    }
    let manifest = RunManifest {
        command: cmd.name().to_owned(),
        artifact_version: env!("CARGO_PKG_VERSION").to_owned(),
        config_sha256: sha256_hex(config.as_bytes()),
        outputs,
        timings_ms: BTreeMap::from([("total".to_owned(), elapsed_ms)]),
        passed: out.passed(),
    };
    write_atomic(dir, "manifest.json", crate::report::to_json_pretty(&manifest)?.as_bytes())?;
    Ok(manifest)
}

/// Recompute checksums of the files listed in `dir/manifest.json`.
pub fn verify_manifest(dir: &Path) -> Result<RunManifest> {
    let manifest: RunManifest = serde_json::from_slice(&fs::read(dir.join("manifest.json"))?)?;
    for (name, sum) in &manifest.outputs {
        let actual = sha256_hex(&fs::read(dir.join(name))?);
        if &actual != sum {
            return Err(Error::Format(format!("checksum mismatch for {name}")));
        }
    }
    Ok(manifest)
}

/// Run and persist in one step, timing the run.
pub fn run_and_write(cmd: Command, text: Option<&str>, overrides: &[(String, Value)], dir: &Path) -> Result<(RunManifest, RunOutput)> {
    let start = Instant::now();
    let (config, out) = run_command(cmd, text, overrides)?;
    let ms = start.elapsed().as_secs_f64() * 1e3;
    let manifest = write_run(dir, cmd, &config, &out, ms)?;
    Ok((manifest, out))
}
