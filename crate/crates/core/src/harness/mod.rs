//! Experiment orchestration: fits empirical decay exponents from kernel-norm
//! and simulation time series, compares them against the closed-form rate
//! calculator, and aggregates pass/fail reports.
//!
//! Kernel-norm checks are two-sided (the kernel rates are attained);
//! simulation checks are one-sided (theorem rates are upper bounds for
//! arbitrary admissible data), requiring the measured slope to stay below
//! predicted + tolerance.

pub mod config;

use crate::evolution::{self, ChannelSpec, FieldState, NormSeries, Nonlinearity, StepControls};
use crate::grid::GridSpec;
use crate::radial::{self, QuadratureConfig, RadialError};
use crate::rates::{self, RateQuery, TheoremCase};
use crate::symbols::{multiplier, ModelParams, MultiplierKind};
use rayon::prelude::*;
use std::time::Instant;
use thiserror::Error;

pub use config::parse_experiment;

/// Environment variable capping worker parallelism for `run_verification`.
pub const WORKERS_ENV: &str = "SEVOLAB_WORKERS";

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("fewer than 3 samples inside the fit window")]
    InsufficientSamples,
    #[error("non-positive value in a log-log fit at t = {0}")]
    NonpositiveValue(f64),
    #[error("series is missing channel `{0}`")]
    MissingChannel(String),
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Radial(#[from] RadialError),
    #[error(transparent)]
    Rates(#[from] rates::RatesError),
    #[error(transparent)]
    Evolution(#[from] evolution::EvolutionError),
    #[error(transparent)]
    Grid(#[from] crate::grid::GridError),
}

/// Least-squares line through `(log t, log value)` on a window.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct DecayFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub window: (f64, f64),
    pub samples: usize,
}

/// Fit the power-law exponent of a positive time series on `window`.
pub fn fit_exponent(series: &[(f64, f64)], window: (f64, f64)) -> Result<DecayFit, HarnessError> {
    let pts: Vec<(f64, f64)> = series
        .iter()
        .copied()
        .filter(|&(t, _)| t >= window.0 && t <= window.1)
        .collect();
    if pts.len() < 3 {
        return Err(HarnessError::InsufficientSamples);
    }
    for &(t, v) in &pts {
        if !(v > 0.0) || !(t > 0.0) {
            return Err(HarnessError::NonpositiveValue(t));
        }
    }
    let n = pts.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(t, v) in &pts {
        let x = t.ln();
        let y = v.ln();
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let denom = n * sxx - sx * sx;
    if denom == 0.0 {
        return Err(HarnessError::InsufficientSamples);
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let mean_y = sy / n;
    let ss_tot: f64 = pts
        .iter()
        .map(|&(_, v)| {
            let d = v.ln() - mean_y;
            d * d
        })
        .sum();
    let ss_res: f64 = pts
        .iter()
        .map(|&(t, v)| {
            let r = v.ln() - (slope * t.ln() + intercept);
            r * r
        })
        .sum();
    // zero variance means a constant series: the zero-slope line is exact
    let r_squared = if ss_tot > 0.0 {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    } else {
        1.0
    };
    Ok(DecayFit {
        slope,
        intercept,
        r_squared,
        window,
        samples: pts.len(),
    })
}

/// Norm channels recorded for a theorem query, keyed like the exponent map
/// of [`rates::solution_decay_exponents`].
pub fn channels_for_query(query: &RateQuery) -> Vec<(String, ChannelSpec)> {
    let q = query.q;
    let mut out = vec![(
        "u".to_string(),
        ChannelSpec {
            s: 0.0,
            time_derivative: false,
            q,
        },
    )];
    if query.s > 0.0 {
        out.push((
            "riesz_u".to_string(),
            ChannelSpec {
                s: query.s,
                time_derivative: false,
                q,
            },
        ));
    }
    match query.case {
        TheoremCase::T1 => {}
        TheoremCase::T2 | TheoremCase::T4 => {
            out.push((
                "ut".to_string(),
                ChannelSpec {
                    s: 0.0,
                    time_derivative: true,
                    q,
                },
            ));
        }
        TheoremCase::T3 => {
            out.push((
                "ut".to_string(),
                ChannelSpec {
                    s: 0.0,
                    time_derivative: true,
                    q,
                },
            ));
            out.push((
                "riesz_ut".to_string(),
                ChannelSpec {
                    s: query.s - 2.0 * query.params.sigma2,
                    time_derivative: true,
                    q,
                },
            ));
        }
    }
    out
}

/// Supremum over recorded times of the decay-weighted channel sum
/// `sum_i (1+tau)^{-e_i} channel_i(tau)`, with the exponents of the query's
/// theorem case. `horizon` restricts the supremum to `tau <= horizon`.
pub fn weighted_sup_norm(
    series: &NormSeries,
    query: &RateQuery,
    horizon: f64,
) -> Result<f64, HarnessError> {
    let exponents = rates::solution_decay_exponents(query)?;
    let channels = channels_for_query(query);
    let mut columns = Vec::with_capacity(channels.len());
    for (key, spec) in &channels {
        let label = spec.label();
        let c = series
            .channel_labels
            .iter()
            .position(|l| *l == label)
            .ok_or(HarnessError::MissingChannel(label))?;
        columns.push((c, exponents[key]));
    }
    let mut sup: f64 = 0.0;
    for (i, &t) in series.times.iter().enumerate() {
        if t > horizon {
            continue;
        }
        let total: f64 = columns
            .iter()
            .map(|&(c, e)| (1.0 + t).powf(-e) * series.values[i][c])
            .sum();
        sup = sup.max(total);
    }
    Ok(sup)
}

/// Norm of the data space: `||u0||_{H^s_q} + ||u0||_{L^m} + ||u1||_{H^l_q} +
/// ||u1||_{L^m}` with the velocity smoothness `l = [s - sigma + sigma2]^+`.
pub fn data_space_norm(state: &FieldState, query: &RateQuery) -> Result<f64, HarnessError> {
    let l = rates::velocity_smoothness(
        &query.params,
        query.s,
        rates::VelocitySmoothness::DataSpace,
    );
    let g = &state.grid;
    Ok(crate::grid::sobolev_norm_grid(&state.u, query.s, query.q, g)?
        + crate::grid::lq_norm_grid(&state.u, query.m, g)?
        + crate::grid::sobolev_norm_grid(&state.ut, l, query.q, g)?
        + crate::grid::lq_norm_grid(&state.ut, query.m, g)?)
}

/// Initial data profile of a simulation experiment.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub enum DataProfile {
    Gaussian {
        amplitude: f64,
        width: f64,
        velocity_amplitude: f64,
    },
    BandLimited {
        amplitude: f64,
        cutoff: f64,
        seed: u64,
    },
}

impl DataProfile {
    pub fn build(&self, grid: GridSpec) -> FieldState {
        match *self {
            DataProfile::Gaussian {
                amplitude,
                width,
                velocity_amplitude,
            } => FieldState::gaussian(grid, amplitude, width, velocity_amplitude),
            DataProfile::BandLimited {
                amplitude,
                cutoff,
                seed,
            } => FieldState::band_limited(grid, amplitude, cutoff, seed),
        }
    }
}

/// Which channel's slope a simulation experiment fits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum FitTarget {
    U,
    RieszU,
    Ut,
    RieszUt,
}

impl FitTarget {
    fn key(&self) -> &'static str {
        match self {
            FitTarget::U => "u",
            FitTarget::RieszU => "riesz_u",
            FitTarget::Ut => "ut",
            FitTarget::RieszUt => "riesz_ut",
        }
    }
}

#[derive(Debug, Clone)]
pub enum ExperimentKind {
    /// L^r norm decay of one kernel multiplier, fitted on a time window that
    /// must lie entirely inside (0, 1] (small-time branch) or [1, inf)
    /// (large-time branch).
    KernelNorm {
        multiplier: MultiplierKind,
        r: f64,
        s: f64,
        window: (f64, f64),
        points: usize,
    },
    /// Linear or semilinear evolution on a periodic grid with decay-rate and
    /// weighted-norm checks against the query's theorem case.
    Simulation {
        grid: GridSpec,
        data: DataProfile,
        nl: Nonlinearity,
        controls: StepControls,
        horizon: f64,
        samples: usize,
        first_sample: f64,
        fit_window: (f64, f64),
        fit_target: FitTarget,
    },
    /// Pure admissibility arithmetic.
    RatesCheck { expect_feasible: bool },
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub name: String,
    pub params: ModelParams,
    pub query: Option<RateQuery>,
    pub kind: ExperimentKind,
    pub slope_tolerance: f64,
}

/// Outcome of one experiment. Wall-clock runtime is kept out of the
/// serialized form so reports stay byte-identical across reruns.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ExperimentResult {
    pub name: String,
    pub kind: String,
    pub pass: bool,
    pub one_sided: bool,
    pub predicted_exponent: Option<f64>,
    pub fitted: Option<DecayFit>,
    pub feasible: Option<bool>,
    pub violations: Vec<String>,
    pub blowup_time: Option<f64>,
    pub ring_ratio_max: Option<f64>,
    pub weighted_sup: Option<f64>,
    pub weighted_sup_half_horizon: Option<f64>,
    pub data_norm: Option<f64>,
    pub detail: String,
    pub error: Option<String>,
    #[serde(skip)]
    pub series_csv: Option<String>,
    #[serde(skip)]
    pub runtime_ms: u128,
}

impl ExperimentResult {
    fn empty(name: &str, kind: &str) -> Self {
        Self {
            name: name.to_string(),
            kind: kind.to_string(),
            pass: false,
            one_sided: false,
            predicted_exponent: None,
            fitted: None,
            feasible: None,
            violations: Vec::new(),
            blowup_time: None,
            ring_ratio_max: None,
            weighted_sup: None,
            weighted_sup_half_horizon: None,
            data_norm: None,
            detail: String::new(),
            error: None,
            series_csv: None,
            runtime_ms: 0,
        }
    }
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct Report {
    pub experiments: Vec<ExperimentResult>,
    pub total: usize,
    pub passed: usize,
    pub all_pass: bool,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Log-spaced samples across `[lo, hi]`, endpoints included.
pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && count >= 2);
    (0..count)
        .map(|i| lo * (hi / lo).powf(i as f64 / (count - 1) as f64))
        .collect()
}

/// L^r norm of the physical-space kernel of `|xi|^s Khat(t, .)` at one time.
pub fn kernel_norm_at(
    params: &ModelParams,
    kind: MultiplierKind,
    r: f64,
    s: f64,
    t: f64,
) -> Result<f64, HarnessError> {
    let p = *params;
    let symbol = move |rho: f64| multiplier(&p, kind, rho, t);
    // spatial scales: the slow-mode spread and the damping-crossover width
    let slow = 2.0 * (params.sigma - params.sigma1);
    let fast = 2.0 * (params.sigma - params.sigma2);
    let (scale_lo, mut scale_hi) = if t >= 1.0 {
        let cross = if params.sigma1 > 0.1 {
            t.powf(1.0 / (2.0 * params.sigma1))
        } else {
            1.0
        };
        (t.powf(1.0 / slow), cross.max(t.powf(1.0 / slow)))
    } else {
        (t.powf(1.0 / fast), 1.0)
    };
    let cfg = QuadratureConfig {
        tolerance: 1e-8,
        max_panels: 2_000_000,
    };
    // grow the x-range until the tail extrapolation in the norm accepts it
    for _ in 0..3 {
        let radii = radial::log_radii(1e-3 * scale_lo.min(1.0), 30.0 * scale_hi, 48);
        let profile = radial::inverse_radial_fourier(&symbol, params.n, s, &radii, &cfg)?;
        match radial::radial_lq_norm(&profile, r, 0.05) {
            Ok(norm) => return Ok(norm),
            Err(RadialError::TailNotConverged(_)) => {
                scale_hi *= 10.0;
            }
            Err(e) => return Err(e.into()),
        }
    }
    let radii = radial::log_radii(1e-3 * scale_lo.min(1.0), 30.0 * scale_hi, 48);
    let profile = radial::inverse_radial_fourier(&symbol, params.n, s, &radii, &cfg)?;
    Ok(radial::radial_lq_norm(&profile, r, 0.05)?)
}

fn run_kernel_norm(cfg: &ExperimentConfig) -> Result<ExperimentResult, HarnessError> {
    let ExperimentKind::KernelNorm {
        multiplier: kind,
        r,
        s,
        window,
        points,
    } = cfg.kind
    else {
        unreachable!()
    };
    if !(window.0 > 0.0 && window.0 < window.1) {
        return Err(HarnessError::Config(format!(
            "kernel window ({}, {}) must be positive and increasing",
            window.0, window.1
        )));
    }
    let mut result = ExperimentResult::empty(&cfg.name, "kernel_norm");
    let (small_t, large_t) = rates::kernel_norm_exponents(&cfg.params, kind, r, s);
    let predicted = if window.1 <= 1.0 + 1e-12 {
        small_t
    } else if window.0 >= 1.0 - 1e-12 {
        large_t
    } else {
        return Err(HarnessError::Config(format!(
            "kernel window ({}, {}) straddles t = 1",
            window.0, window.1
        )));
    };

    let ts = log_spaced(window.0, window.1, points.max(3));
    let series: Result<Vec<(f64, f64)>, HarnessError> = ts
        .par_iter()
        .map(|&t| Ok((t, kernel_norm_at(&cfg.params, kind, r, s, t)?)))
        .collect();
    let series = series?;
    let fit = fit_exponent(&series, window)?;

    let mut csv = String::from("t,norm\n");
    for (t, v) in &series {
        csv.push_str(&format!("{t:.16e},{v:.16e}\n"));
    }

    result.predicted_exponent = Some(predicted);
    result.pass = (fit.slope - predicted).abs() <= cfg.slope_tolerance && fit.r_squared >= 0.98;
    result.detail = format!(
        "{} L^{} s={} fitted {:.4} vs predicted {:.4} (two-sided +/-{}, R^2 {:.5})",
        kind.label(),
        if r.is_infinite() { "inf".into() } else { format!("{r}") },
        s,
        fit.slope,
        predicted,
        cfg.slope_tolerance,
        fit.r_squared
    );
    result.fitted = Some(fit);
    result.series_csv = Some(csv);
    Ok(result)
}

fn run_simulation(cfg: &ExperimentConfig) -> Result<ExperimentResult, HarnessError> {
    let ExperimentKind::Simulation {
        grid,
        data,
        nl,
        controls,
        horizon,
        samples,
        first_sample,
        fit_window,
        fit_target,
    } = cfg.kind
    else {
        unreachable!()
    };
    let query = cfg
        .query
        .as_ref()
        .ok_or_else(|| HarnessError::Config("simulation experiments need query.*".into()))?;
    if !(first_sample > 0.0 && first_sample < horizon) {
        return Err(HarnessError::Config(format!(
            "run.start = {first_sample} must lie in (0, horizon = {horizon})"
        )));
    }
    let mut result = ExperimentResult::empty(&cfg.name, "simulation");
    result.one_sided = true;

    let initial = data.build(grid);
    let mut controls = controls;
    if controls.blowup_threshold <= 0.0 {
        controls.blowup_threshold = 1e6 * initial.max_abs_u().max(1e-12);
    }
    let channels = channels_for_query(query);
    let specs: Vec<ChannelSpec> = channels.iter().map(|(_, s)| *s).collect();
    let sample_times = log_spaced(first_sample, horizon, samples.max(4));
    let series = evolution::evolve(
        &initial,
        horizon,
        &sample_times,
        &cfg.params,
        &nl,
        &controls,
        &specs,
    )?;

    let exponents = rates::solution_decay_exponents(query)?;
    let key = fit_target.key();
    let predicted = *exponents
        .get(key)
        .ok_or_else(|| HarnessError::MissingChannel(key.to_string()))?;
    let label = channels
        .iter()
        .find(|(k, _)| k == key)
        .map(|(_, s)| s.label())
        .ok_or_else(|| HarnessError::MissingChannel(key.to_string()))?;
    let col = series
        .channel(&label)
        .ok_or_else(|| HarnessError::MissingChannel(label.clone()))?;
    let fit = fit_exponent(&col, fit_window)?;

    let sup_full = weighted_sup_norm(&series, query, horizon)?;
    let sup_half = weighted_sup_norm(&series, query, horizon / 2.0)?;
    let sup_stable = if sup_full > 0.0 {
        (sup_full - sup_half).abs() <= 0.10 * sup_full
    } else {
        true
    };

    result.predicted_exponent = Some(predicted);
    result.blowup_time = series.blowup_time;
    result.ring_ratio_max = Some(series.ring_ratio_max);
    result.weighted_sup = Some(sup_full);
    result.weighted_sup_half_horizon = Some(sup_half);
    result.data_norm = Some(data_space_norm(&initial, query)?);
    result.pass = series.blowup_time.is_none()
        && fit.slope <= predicted + cfg.slope_tolerance
        && sup_stable;
    result.detail = format!(
        "channel {key} fitted {:.4} vs bound {:.4} (one-sided +{}), X-sup {:.6e} vs half-horizon {:.6e}, blowup {:?}",
        fit.slope, predicted, cfg.slope_tolerance, sup_full, sup_half, series.blowup_time
    );
    result.fitted = Some(fit);
    result.series_csv = Some(series.to_csv());
    Ok(result)
}

fn run_rates_check(cfg: &ExperimentConfig) -> Result<ExperimentResult, HarnessError> {
    let ExperimentKind::RatesCheck { expect_feasible } = cfg.kind else {
        unreachable!()
    };
    let query = cfg
        .query
        .as_ref()
        .ok_or_else(|| HarnessError::Config("rates checks need query.*".into()))?;
    let mut result = ExperimentResult::empty(&cfg.name, "rates_check");
    let report = rates::admissible_exponents(query)?;
    result.feasible = Some(report.feasible);
    result.violations = report.violations.clone();
    result.pass = report.feasible == expect_feasible;
    result.detail = format!(
        "feasible = {} (expected {}), p interval [{}, {}], violations: [{}]",
        report.feasible,
        expect_feasible,
        report.p_interval.lo,
        report.p_interval.hi,
        report.violations.join(", ")
    );
    Ok(result)
}

/// Execute one experiment, never panicking the batch.
pub fn run_experiment(cfg: &ExperimentConfig) -> ExperimentResult {
    let started = Instant::now();
    let kind_name = match cfg.kind {
        ExperimentKind::KernelNorm { .. } => "kernel_norm",
        ExperimentKind::Simulation { .. } => "simulation",
        ExperimentKind::RatesCheck { .. } => "rates_check",
    };
    let outcome = match cfg.kind {
        ExperimentKind::KernelNorm { .. } => run_kernel_norm(cfg),
        ExperimentKind::Simulation { .. } => run_simulation(cfg),
        ExperimentKind::RatesCheck { .. } => run_rates_check(cfg),
    };
    let mut result = outcome.unwrap_or_else(|e| {
        let mut r = ExperimentResult::empty(&cfg.name, kind_name);
        r.error = Some(e.to_string());
        r.detail = format!("failed: {e}");
        r
    });
    result.runtime_ms = started.elapsed().as_millis();
    result
}

/// Run every experiment (concurrently, capped by `SEVOLAB_WORKERS`) and
/// assemble the report. Deterministic given identical configs and seeds.
pub fn run_verification(configs: &[ExperimentConfig]) -> Report {
    let run_all = || -> Vec<ExperimentResult> {
        configs.par_iter().map(run_experiment).collect()
    };
    let experiments = match std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        Some(workers) if workers >= 1 => rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map(|pool| pool.install(run_all))
            .unwrap_or_else(|_| run_all()),
        _ => run_all(),
    };
    let passed = experiments.iter().filter(|e| e.pass).count();
    Report {
        total: experiments.len(),
        passed,
        all_pass: passed == experiments.len(),
        experiments,
    }
}

/// The reference verification suite: kernel decay at the reference
/// parameters, a linear and a semilinear torus run in the admissible regime,
/// and feasibility spot checks.
pub fn bundled_suite() -> Vec<ExperimentConfig> {
    let ref1 = crate::symbols::reference_params(1);
    let sim_params = ModelParams::new(1.2, 0.55, 0.65, 1.0, 1.0, 1).unwrap();
    let sim_query = RateQuery {
        params: sim_params,
        m: 1.0,
        q: 2.0,
        s: 2.0 * sim_params.sigma2,
        p: 3.0,
        a: 0.0,
        case: TheoremCase::T2,
    };
    let feasible_params = ModelParams::new(1.2, 0.55, 0.65, 1.0, 1.0, 2).unwrap();
    vec![
        ExperimentConfig {
            name: "kernel-k1-l1-large-t".into(),
            params: ref1,
            query: None,
            kind: ExperimentKind::KernelNorm {
                multiplier: MultiplierKind::K1,
                r: 1.0,
                s: 0.0,
                window: (10.0, 1e3),
                points: 7,
            },
            slope_tolerance: 0.05,
        },
        ExperimentConfig {
            name: "kernel-k0-linf-large-t".into(),
            params: ref1,
            query: None,
            kind: ExperimentKind::KernelNorm {
                multiplier: MultiplierKind::K0,
                r: f64::INFINITY,
                s: 0.0,
                window: (10.0, 1e3),
                points: 7,
            },
            slope_tolerance: 0.05,
        },
        ExperimentConfig {
            name: "linear-decay-n1".into(),
            params: sim_params,
            query: Some(sim_query),
            kind: ExperimentKind::Simulation {
                grid: GridSpec::new(1, 512, 120.0).unwrap(),
                data: DataProfile::Gaussian {
                    amplitude: 1e-2,
                    width: 2.0,
                    velocity_amplitude: 0.0,
                },
                nl: Nonlinearity {
                    p: 3.0,
                    a: 0.0,
                    coefficient: 0.0,
                },
                controls: StepControls {
                    h: 0.5,
                    corrector_iterations: 2,
                    dealias_fraction: 2.0 / 3.0,
                    blowup_threshold: 0.0,
                },
                horizon: 40.0,
                samples: 28,
                first_sample: 0.5,
                fit_window: (4.0, 40.0),
                fit_target: FitTarget::U,
            },
            slope_tolerance: 0.05,
        },
        ExperimentConfig {
            name: "semilinear-decay-n1".into(),
            params: sim_params,
            query: Some(sim_query),
            kind: ExperimentKind::Simulation {
                grid: GridSpec::new(1, 512, 120.0).unwrap(),
                data: DataProfile::Gaussian {
                    amplitude: 1e-2,
                    width: 2.0,
                    velocity_amplitude: 0.0,
                },
                nl: Nonlinearity {
                    p: 3.0,
                    a: 0.0,
                    coefficient: 1.0,
                },
                controls: StepControls {
                    h: 0.25,
                    corrector_iterations: 2,
                    dealias_fraction: 2.0 / 3.0,
                    blowup_threshold: 0.0,
                },
                horizon: 40.0,
                samples: 28,
                first_sample: 0.5,
                fit_window: (4.0, 40.0),
                fit_target: FitTarget::U,
            },
            slope_tolerance: 0.05,
        },
        ExperimentConfig {
            name: "rates-feasible-t2".into(),
            params: feasible_params,
            query: Some(RateQuery {
                params: feasible_params,
                m: 1.0,
                q: 2.0,
                s: 2.0 * feasible_params.sigma2,
                p: 5.0,
                a: 0.0,
                case: TheoremCase::T2,
            }),
            kind: ExperimentKind::RatesCheck {
                expect_feasible: true,
            },
            slope_tolerance: 0.05,
        },
        ExperimentConfig {
            name: "rates-infeasible-low-dimension".into(),
            params: crate::symbols::reference_params(2),
            query: Some(RateQuery {
                params: crate::symbols::reference_params(2),
                m: 1.0,
                q: 2.0,
                s: 0.5,
                p: 3.0,
                a: 0.0,
                case: TheoremCase::T1,
            }),
            kind: ExperimentKind::RatesCheck {
                expect_feasible: false,
            },
            slope_tolerance: 0.05,
        },
    ]
}
