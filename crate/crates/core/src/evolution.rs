//! Exact linear propagation by the kernel multipliers and Duhamel-based
//! semilinear time stepping.
//!
//! The linear flow is advanced mode-by-mode with the exact propagator
//! matrix, so there is no time-discretization error and composition is a
//! semigroup. The semilinear problem uses an exponential predictor-corrector
//! discretization of the Duhamel formula
//!
//! ```text
//! u(t+h) = K0(h)*u(t) + K1(h)*u_t(t) + int_0^h K1(h-tau)*N(u(t+tau)) dtau
//! ```
//!
//! with a left-endpoint rectangle as predictor and trapezoid correctors
//! re-evaluating the integrand at the predicted endpoint (local error
//! O(h^2)).

use crate::grid::{
    self, apply_radial_symbol, forward_real, inverse_to_real, GridError, GridSpec,
};
use crate::symbols::{multiplier_set, ModelParams};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EvolutionError {
    #[error("blow-up detected at t = {t}")]
    BlowUp { t: f64 },
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("invalid evolution setup: {0}")]
    Invalid(String),
}

/// Displacement/velocity pair sampled on a periodic grid.
#[derive(Debug, Clone)]
pub struct FieldState {
    pub grid: GridSpec,
    pub u: Vec<f64>,
    pub ut: Vec<f64>,
    pub time: f64,
}

impl FieldState {
    pub fn zero(grid: GridSpec) -> Self {
        Self {
            u: vec![0.0; grid.len()],
            ut: vec![0.0; grid.len()],
            grid,
            time: 0.0,
        }
    }

    /// Radial Gaussian data `amplitude * exp(-|x|^2 / (2 width^2))` placed on
    /// u, ut or both.
    pub fn gaussian(grid: GridSpec, amplitude: f64, width: f64, velocity_amplitude: f64) -> Self {
        let mut state = Self::zero(grid);
        for flat in 0..grid.len() {
            let idx = grid.axis_indices(flat);
            let mut r2 = 0.0;
            for &i in idx.iter().take(grid.n as usize) {
                let x = grid.coordinate(i);
                r2 += x * x;
            }
            let bump = (-r2 / (2.0 * width * width)).exp();
            state.u[flat] = amplitude * bump;
            state.ut[flat] = velocity_amplitude * bump;
        }
        state
    }

    /// Band-limited random bump: seeded Gaussian spectral coefficients on
    /// `|xi| <= cutoff`, normalized to the requested amplitude in L^inf.
    pub fn band_limited(grid: GridSpec, amplitude: f64, cutoff: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut spec = vec![Complex64::new(0.0, 0.0); grid.len()];
        for (flat, v) in spec.iter_mut().enumerate() {
            let rho = grid.frequency_radius(flat);
            if rho > 0.0 && rho <= cutoff {
                *v = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
        // Hermitian symmetrization via Re(ifft) keeps the field real
        let mut u = inverse_to_real(&spec, &grid).expect("conforming shape");
        let max = u.iter().fold(0.0f64, |m, &v| m.max(v.abs())).max(1e-300);
        for v in &mut u {
            *v *= amplitude / max;
        }
        let mut state = Self::zero(grid);
        state.u = u;
        state
    }

    pub fn is_finite(&self) -> bool {
        self.u.iter().chain(&self.ut).all(|v| v.is_finite())
    }

    pub fn max_abs_u(&self) -> f64 {
        self.u.iter().fold(0.0f64, |m, &v| m.max(v.abs()))
    }

    /// L2 mass on the sentinel ring (all points within two cells of the
    /// torus seam), used to monitor wrap-around of the kernel tails.
    pub fn ring_l2(&self) -> f64 {
        let n = self.grid.points_per_axis;
        let on_ring = |flat: usize| {
            let idx = self.grid.axis_indices(flat);
            (0..self.grid.n as usize).any(|a| idx[a] <= 1 || idx[a] >= n - 2)
        };
        let cell = self.grid.spacing().powi(self.grid.n as i32);
        let sum: f64 = (0..self.grid.len())
            .filter(|&f| on_ring(f))
            .map(|f| self.u[f] * self.u[f])
            .sum();
        (sum * cell).sqrt()
    }
}

/// Power nonlinearity `coefficient * | |D|^a u |^p`; `a = 0` reproduces
/// `|u|^p` and `coefficient = 0` disables the source term.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Nonlinearity {
    pub p: f64,
    pub a: f64,
    pub coefficient: f64,
}

impl Nonlinearity {
    pub fn validate(&self, params: &ModelParams) -> Result<(), EvolutionError> {
        if !(self.p > 1.0) {
            return Err(EvolutionError::Invalid(format!("p = {} must be > 1", self.p)));
        }
        if self.a < 0.0 || self.coefficient < 0.0 {
            return Err(EvolutionError::Invalid(
                "a and coefficient must be non-negative".into(),
            ));
        }
        if self.a > 0.0 && self.a >= params.sigma - params.sigma2 {
            return Err(EvolutionError::Invalid(format!(
                "a = {} must stay below sigma - sigma2 = {}",
                self.a,
                params.sigma - params.sigma2
            )));
        }
        Ok(())
    }

    pub fn disabled() -> Self {
        Self {
            p: 2.0,
            a: 0.0,
            coefficient: 0.0,
        }
    }
}

/// Time-stepping controls.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct StepControls {
    pub h: f64,
    pub corrector_iterations: u32,
    /// Fraction of the per-axis mode range kept by the anti-alias filter.
    pub dealias_fraction: f64,
    /// Absolute L^inf bound beyond which the run is declared blown up.
    pub blowup_threshold: f64,
}

impl StepControls {
    pub fn validate(&self) -> Result<(), EvolutionError> {
        if !(self.h > 0.0) {
            return Err(EvolutionError::Invalid("step h must be > 0".into()));
        }
        if self.corrector_iterations < 1 {
            return Err(EvolutionError::Invalid(
                "corrector iterations must be >= 1".into(),
            ));
        }
        if !(self.dealias_fraction > 0.0 && self.dealias_fraction <= 1.0) {
            return Err(EvolutionError::Invalid(
                "dealias fraction must lie in (0, 1]".into(),
            ));
        }
        if !(self.blowup_threshold > 0.0) {
            return Err(EvolutionError::Invalid("blow-up threshold must be > 0".into()));
        }
        Ok(())
    }

    /// Threshold defaulting to 1e6 times the initial amplitude.
    pub fn for_initial(h: f64, initial: &FieldState) -> Self {
        Self {
            h,
            corrector_iterations: 2,
            dealias_fraction: 2.0 / 3.0,
            blowup_threshold: 1e6 * initial.max_abs_u().max(1e-12),
        }
    }
}

/// Exact mode propagator over a fixed time increment, cached per frequency.
pub struct Propagator {
    dt: f64,
    k0: Vec<f64>,
    k1: Vec<f64>,
    dt_k0: Vec<f64>,
    dt_k1: Vec<f64>,
}

impl Propagator {
    pub fn new(params: &ModelParams, grid: &GridSpec, dt: f64) -> Self {
        let len = grid.len();
        let mut k0 = vec![0.0; len];
        let mut k1 = vec![0.0; len];
        let mut dt_k0 = vec![0.0; len];
        let mut dt_k1 = vec![0.0; len];
        for flat in 0..len {
            let set = multiplier_set(params, grid.frequency_radius(flat), dt);
            k0[flat] = set.k0;
            k1[flat] = set.k1;
            dt_k0[flat] = set.dt_k0;
            dt_k1[flat] = set.dt_k1;
        }
        Self {
            dt,
            k0,
            k1,
            dt_k0,
            dt_k1,
        }
    }

    /// Advance spectra in place by the cached increment.
    fn apply(&self, u_hat: &mut [Complex64], ut_hat: &mut [Complex64]) {
        for i in 0..u_hat.len() {
            let u = u_hat[i];
            let ut = ut_hat[i];
            u_hat[i] = u * self.k0[i] + ut * self.k1[i];
            ut_hat[i] = u * self.dt_k0[i] + ut * self.dt_k1[i];
        }
    }
}

/// Propagate the homogeneous flow exactly to `t_target`.
pub fn linear_propagate(
    state: &FieldState,
    t_target: f64,
    params: &ModelParams,
) -> Result<FieldState, EvolutionError> {
    if t_target < state.time {
        return Err(EvolutionError::Invalid(format!(
            "t_target = {t_target} precedes state time {}",
            state.time
        )));
    }
    let grid = state.grid;
    let mut u_hat = forward_real(&state.u, &grid)?;
    let mut ut_hat = forward_real(&state.ut, &grid)?;
    Propagator::new(params, &grid, t_target - state.time).apply(&mut u_hat, &mut ut_hat);
    Ok(FieldState {
        u: inverse_to_real(&u_hat, &grid)?,
        ut: inverse_to_real(&ut_hat, &grid)?,
        grid,
        time: t_target,
    })
}

/// Zero every spectral coefficient whose per-axis index lies in the top
/// `1 - fraction` of the symmetric range.
fn dealias(spec: &mut [Complex64], grid: &GridSpec, fraction: f64) {
    if fraction >= 1.0 {
        return;
    }
    let half = grid.points_per_axis as isize / 2;
    let keep = (fraction * half as f64).floor() as isize;
    let n = grid.points_per_axis;
    for (flat, v) in spec.iter_mut().enumerate() {
        let mut rest = flat;
        for _ in 0..grid.n {
            let k = rest % n;
            rest /= n;
            let signed = if k < n / 2 {
                k as isize
            } else {
                k as isize - n as isize
            };
            if signed.abs() > keep {
                *v = Complex64::new(0.0, 0.0);
                break;
            }
        }
    }
}

/// `|v|^p` via `exp(p ln |v|)`, with tiny magnitudes clamped to zero so sign
/// changes cannot produce non-finite values.
fn abs_power(v: f64, p: f64) -> f64 {
    let a = v.abs();
    if a < 1e-300 {
        0.0
    } else {
        (p * a.ln()).exp()
    }
}

/// Dealiased spectrum of the nonlinearity evaluated at the given displacement
/// spectrum.
fn nonlinearity_spectrum(
    u_hat: &[Complex64],
    grid: &GridSpec,
    nl: &Nonlinearity,
    fraction: f64,
) -> Result<Vec<Complex64>, EvolutionError> {
    let mut work = u_hat.to_vec();
    dealias(&mut work, grid, fraction);
    if nl.a > 0.0 {
        apply_radial_symbol(&mut work, grid, |rho| {
            if rho > 0.0 {
                rho.powf(nl.a)
            } else {
                0.0
            }
        })?;
    }
    let phys = inverse_to_real(&work, grid)?;
    let nl_phys: Vec<f64> = phys
        .iter()
        .map(|&v| nl.coefficient * abs_power(v, nl.p))
        .collect();
    let mut n_hat = forward_real(&nl_phys, grid)?;
    dealias(&mut n_hat, grid, fraction);
    Ok(n_hat)
}

fn check_blowup(state: &FieldState, threshold: f64) -> Result<(), EvolutionError> {
    if !state.is_finite() || state.max_abs_u() > threshold {
        return Err(EvolutionError::BlowUp { t: state.time });
    }
    Ok(())
}

/// One exponential predictor-corrector step of size `controls.h`.
pub fn semilinear_step(
    state: &FieldState,
    controls: &StepControls,
    params: &ModelParams,
    nl: &Nonlinearity,
) -> Result<FieldState, EvolutionError> {
    controls.validate()?;
    nl.validate(params)?;
    let prop = Propagator::new(params, &state.grid, controls.h);
    semilinear_step_with(state, controls, nl, &prop)
}

/// Stepping core reusing a cached propagator (the per-step multiplier build
/// dominates otherwise).
fn semilinear_step_with(
    state: &FieldState,
    controls: &StepControls,
    nl: &Nonlinearity,
    prop: &Propagator,
) -> Result<FieldState, EvolutionError> {
    let grid = state.grid;
    let h = prop.dt;
    check_blowup(state, controls.blowup_threshold)?;

    let mut u_hat = forward_real(&state.u, &grid)?;
    let mut ut_hat = forward_real(&state.ut, &grid)?;

    if nl.coefficient == 0.0 {
        prop.apply(&mut u_hat, &mut ut_hat);
        let next = FieldState {
            u: inverse_to_real(&u_hat, &grid)?,
            ut: inverse_to_real(&ut_hat, &grid)?,
            grid,
            time: state.time + h,
        };
        check_blowup(&next, controls.blowup_threshold)?;
        return Ok(next);
    }

    let n0_hat = nonlinearity_spectrum(&u_hat, &grid, nl, controls.dealias_fraction)?;

    // linear part of the step
    let (lin_u, lin_ut) = {
        let mut a = u_hat.clone();
        let mut b = ut_hat.clone();
        prop.apply(&mut a, &mut b);
        (a, b)
    };

    // predictor: left-endpoint rectangle of the Duhamel integral
    let mut pred_u: Vec<Complex64> = (0..grid.len())
        .map(|i| lin_u[i] + n0_hat[i] * (h * prop.k1[i]))
        .collect();
    let mut pred_ut: Vec<Complex64> = (0..grid.len())
        .map(|i| lin_ut[i] + n0_hat[i] * (h * prop.dt_k1[i]))
        .collect();

    // correctors: trapezoid with the predicted endpoint; K1(0) = 0 and
    // dtK1(0) = 1 fix the endpoint weights
    for _ in 0..controls.corrector_iterations {
        let n1_hat = nonlinearity_spectrum(&pred_u, &grid, nl, controls.dealias_fraction)?;
        for i in 0..grid.len() {
            pred_u[i] = lin_u[i] + n0_hat[i] * (0.5 * h * prop.k1[i]);
            pred_ut[i] =
                lin_ut[i] + n0_hat[i] * (0.5 * h * prop.dt_k1[i]) + n1_hat[i] * (0.5 * h);
        }
    }

    let next = FieldState {
        u: inverse_to_real(&pred_u, &grid)?,
        ut: inverse_to_real(&pred_ut, &grid)?,
        grid,
        time: state.time + h,
    };
    check_blowup(&next, controls.blowup_threshold)?;
    Ok(next)
}

/// One recorded norm channel: `|D|^s` of u or u_t, measured in L^q.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ChannelSpec {
    pub s: f64,
    pub time_derivative: bool,
    pub q: f64,
}

impl ChannelSpec {
    pub fn u_lq(q: f64) -> Self {
        Self {
            s: 0.0,
            time_derivative: false,
            q,
        }
    }

    pub fn label(&self) -> String {
        // float Display is shortest-roundtrip, so labels stay compact
        let base = if self.time_derivative { "ut" } else { "u" };
        let deriv = if self.s != 0.0 {
            format!("_D{}", self.s)
        } else {
            String::new()
        };
        let q = if self.q.is_infinite() {
            "inf".to_string()
        } else {
            format!("{}", self.q)
        };
        format!("{base}{deriv}_L{q}")
    }

    pub fn measure(&self, state: &FieldState) -> Result<f64, GridError> {
        let field = if self.time_derivative { &state.ut } else { &state.u };
        if self.s == 0.0 {
            grid::lq_norm_grid(field, self.q, &state.grid)
        } else {
            let deriv = grid::riesz_apply(field, self.s, &state.grid)?;
            grid::lq_norm_grid(&deriv, self.q, &state.grid)
        }
    }
}


/// Time series of the recorded norm channels, truncated and flagged when the
/// run blew up.
#[derive(Debug, Clone, serde::Serialize)]
pub struct NormSeries {
    pub times: Vec<f64>,
    pub channel_labels: Vec<String>,
    /// `values[i][c]`: channel `c` at `times[i]`.
    pub values: Vec<Vec<f64>>,
    pub blowup_time: Option<f64>,
    /// max over samples of ring L2 relative to the initial total L2.
    pub ring_ratio_max: f64,
}

impl NormSeries {
    pub fn channel(&self, label: &str) -> Option<Vec<(f64, f64)>> {
        let c = self.channel_labels.iter().position(|l| l == label)?;
        Some(
            self.times
                .iter()
                .zip(&self.values)
                .map(|(&t, row)| (t, row[c]))
                .collect(),
        )
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t");
        for label in &self.channel_labels {
            out.push(',');
            out.push_str(label);
        }
        out.push('\n');
        for (t, row) in self.times.iter().zip(&self.values) {
            out.push_str(&format!("{t:.16e}"));
            for v in row {
                out.push_str(&format!(",{v:.16e}"));
            }
            out.push('\n');
        }
        out
    }
}

/// March the semilinear flow and record every requested channel at each
/// sample time. A blow-up truncates the series at the last finite sample and
/// sets the flag instead of failing.
pub fn evolve(
    initial: &FieldState,
    horizon: f64,
    sample_times: &[f64],
    params: &ModelParams,
    nl: &Nonlinearity,
    controls: &StepControls,
    channels: &[ChannelSpec],
) -> Result<NormSeries, EvolutionError> {
    controls.validate()?;
    nl.validate(params)?;
    if !sample_times.windows(2).all(|w| w[0] < w[1]) {
        return Err(EvolutionError::Invalid(
            "sample times must be strictly ascending".into(),
        ));
    }
    if let (Some(&first), Some(&last)) = (sample_times.first(), sample_times.last()) {
        if first < initial.time || last > horizon {
            return Err(EvolutionError::Invalid(format!(
                "sample times must lie in [{}, {horizon}]",
                initial.time
            )));
        }
    }

    let initial_l2 = grid::lq_norm_grid(&initial.u, 2.0, &initial.grid)?.max(1e-300);
    let mut series = NormSeries {
        times: Vec::new(),
        channel_labels: channels.iter().map(|c| c.label()).collect(),
        values: Vec::new(),
        blowup_time: None,
        ring_ratio_max: 0.0,
    };

    let mut state = initial.clone();
    let mut prop_cache: Option<Propagator> = None;
    for &target in sample_times {
        let mut blew_up = false;
        while state.time < target - 1e-12 * target.max(1.0) {
            let remaining = target - state.time;
            let dt = controls.h.min(remaining);
            let reuse = prop_cache
                .as_ref()
                .map(|p| (p.dt - dt).abs() <= 1e-15 * dt)
                .unwrap_or(false);
            if !reuse {
                prop_cache = Some(Propagator::new(params, &state.grid, dt));
            }
            match semilinear_step_with(&state, controls, nl, prop_cache.as_ref().unwrap()) {
                Ok(next) => state = next,
                Err(EvolutionError::BlowUp { t }) => {
                    series.blowup_time = Some(t);
                    blew_up = true;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        if blew_up {
            break;
        }
        let mut row = Vec::with_capacity(channels.len());
        for c in channels {
            row.push(c.measure(&state)?);
        }
        series.times.push(state.time);
        series.values.push(row);
        series.ring_ratio_max = series.ring_ratio_max.max(state.ring_l2() / initial_l2);
    }
    Ok(series)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::reference_params;

    fn small_grid() -> GridSpec {
        GridSpec::new(1, 128, 20.0).unwrap()
    }

    #[test]
    fn channel_labels_are_unambiguous() {
        assert_eq!(ChannelSpec::u_lq(2.0).label(), "u_L2");
        assert_eq!(ChannelSpec::u_lq(10.0).label(), "u_L10");
        assert_eq!(ChannelSpec::u_lq(f64::INFINITY).label(), "u_Linf");
        let riesz = ChannelSpec {
            s: 1.3,
            time_derivative: false,
            q: 2.0,
        };
        assert_eq!(riesz.label(), "u_D1.3_L2");
        let ut = ChannelSpec {
            s: 0.0,
            time_derivative: true,
            q: 1.0,
        };
        assert_eq!(ut.label(), "ut_L1");
    }

    #[test]
    fn zero_time_step_is_identity() {
        let p = reference_params(1);
        let state = FieldState::gaussian(small_grid(), 1.0, 2.0, 0.5);
        let out = linear_propagate(&state, state.time, &p).unwrap();
        let err = state
            .u
            .iter()
            .zip(&out.u)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        assert!(err <= 1e-12);
    }

    #[test]
    fn semigroup_composition() {
        let p = reference_params(1);
        let state = FieldState::band_limited(small_grid(), 1.0, 2.0, 99);
        let direct = linear_propagate(&state, 3.0, &p).unwrap();
        let half = linear_propagate(&state, 1.2, &p).unwrap();
        let composed = linear_propagate(&half, 3.0, &p).unwrap();
        for (a, b) in direct.u.iter().zip(&composed.u).chain(direct.ut.iter().zip(&composed.ut)) {
            assert!((a - b).abs() <= 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn single_mode_matches_ode_oracle() {
        // u0 = cos(xi0 x), u1 = 0: every sample follows the scalar mode ODE
        let p = reference_params(1);
        let grid = GridSpec::new(1, 64, std::f64::consts::PI).unwrap();
        let xi0 = 2.0;
        let mut state = FieldState::zero(grid);
        for i in 0..grid.len() {
            state.u[i] = (xi0 * grid.coordinate(i)).cos();
        }
        // RK4 on w'' + b w' + c w = 0
        let b = p.damping(xi0);
        let c = p.elastic(xi0);
        let (mut w, mut v) = (1.0f64, 0.0f64);
        let h = 5e-4;
        let f = |w: f64, v: f64| (v, -b * v - c * w);
        let mut max_err = 0.0f64;
        for step in 1..=20_000 {
            let (k1w, k1v) = f(w, v);
            let (k2w, k2v) = f(w + 0.5 * h * k1w, v + 0.5 * h * k1v);
            let (k3w, k3v) = f(w + 0.5 * h * k2w, v + 0.5 * h * k2v);
            let (k4w, k4v) = f(w + h * k3w, v + h * k3v);
            w += h / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
            v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
            if step % 2000 == 0 {
                let t = h * step as f64;
                let out = linear_propagate(&state, t, &p).unwrap();
                // peak sample sits at x = 0 in this even mode
                let i0 = grid.len() / 2;
                max_err = max_err.max((out.u[i0] - w).abs());
                max_err = max_err.max((out.ut[i0] - v).abs());
            }
        }
        assert!(max_err <= 1e-8, "ode mismatch {max_err}");
    }

    #[test]
    fn coefficient_zero_matches_linear() {
        let p = reference_params(1);
        let state = FieldState::gaussian(small_grid(), 0.3, 1.5, 0.1);
        let controls = StepControls {
            h: 0.25,
            corrector_iterations: 2,
            dealias_fraction: 2.0 / 3.0,
            blowup_threshold: 1e9,
        };
        let stepped = semilinear_step(&state, &controls, &p, &Nonlinearity::disabled()).unwrap();
        let exact = linear_propagate(&state, 0.25, &p).unwrap();
        for (a, b) in stepped.u.iter().zip(&exact.u) {
            assert!((a - b).abs() <= 1e-10);
        }
        for (a, b) in stepped.ut.iter().zip(&exact.ut) {
            assert!((a - b).abs() <= 1e-10);
        }
    }

    #[test]
    fn second_order_self_convergence() {
        let p = reference_params(1);
        let nl = Nonlinearity {
            p: 2.0,
            a: 0.0,
            coefficient: 1.0,
        };
        let state = FieldState::gaussian(small_grid(), 0.5, 2.0, 0.0);
        let run = |h: f64| -> Vec<f64> {
            let controls = StepControls {
                h,
                corrector_iterations: 2,
                dealias_fraction: 2.0 / 3.0,
                blowup_threshold: 1e9,
            };
            let mut s = state.clone();
            let prop = Propagator::new(&p, &s.grid, h);
            while s.time < 1.0 - 1e-12 {
                s = semilinear_step_with(&s, &controls, &nl, &prop).unwrap();
            }
            s.u
        };
        let h0 = 0.1;
        let reference = run(h0 / 8.0);
        let err = |sol: &[f64]| -> f64 {
            sol.iter()
                .zip(&reference)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
        };
        let e1 = err(&run(h0));
        let e2 = err(&run(h0 / 2.0));
        let ratio = e1 / e2;
        assert!(
            (3.2..=4.8).contains(&ratio),
            "convergence ratio {ratio} outside second-order window"
        );
    }

    #[test]
    fn blowup_flagged_and_series_truncated() {
        let p = reference_params(1);
        let nl = Nonlinearity {
            p: 3.0,
            a: 0.0,
            coefficient: 50.0,
        };
        let state = FieldState::gaussian(small_grid(), 2.0, 2.0, 0.0);
        let controls = StepControls {
            h: 0.05,
            corrector_iterations: 1,
            dealias_fraction: 2.0 / 3.0,
            blowup_threshold: 10.0,
        };
        let samples: Vec<f64> = (1..=40).map(|i| 0.25 * i as f64).collect();
        let series = evolve(
            &state,
            10.0,
            &samples,
            &p,
            &nl,
            &controls,
            &[ChannelSpec::u_lq(2.0)],
        )
        .unwrap();
        assert!(series.blowup_time.is_some());
        assert!(series.times.len() < samples.len());
        assert!(series.values.iter().all(|row| row[0].is_finite()));
    }

    #[test]
    fn zero_data_stays_zero() {
        let p = reference_params(1);
        let state = FieldState::zero(small_grid());
        let controls = StepControls::for_initial(0.5, &state);
        let series = evolve(
            &state,
            2.0,
            &[1.0, 2.0],
            &p,
            &Nonlinearity::disabled(),
            &controls,
            &[ChannelSpec::u_lq(2.0), ChannelSpec::u_lq(f64::INFINITY)],
        )
        .unwrap();
        assert!(series
            .values
            .iter()
            .all(|row| row.iter().all(|&v| v == 0.0)));
    }

    #[test]
    fn riesz_weighted_nonlinearity_steps_and_validates() {
        let p = reference_params(1); // sigma - sigma2 = 0.5
        let grid = small_grid();
        let state = FieldState::gaussian(grid, 0.1, 2.0, 0.0);
        let controls = StepControls::for_initial(0.1, &state);
        let nl = Nonlinearity {
            p: 2.0,
            a: 0.3,
            coefficient: 1.0,
        };
        let next = semilinear_step(&state, &controls, &p, &nl).unwrap();
        assert!(next.is_finite());
        // the |D|^a weight changes the source: result differs from a = 0
        let next0 = semilinear_step(
            &state,
            &controls,
            &p,
            &Nonlinearity { a: 0.0, ..nl },
        )
        .unwrap();
        let gap = next
            .u
            .iter()
            .zip(&next0.u)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0f64, f64::max);
        assert!(gap > 1e-12);
        // a at or above sigma - sigma2 is rejected
        let bad = Nonlinearity {
            a: 0.5,
            ..nl
        };
        assert!(matches!(
            semilinear_step(&state, &controls, &p, &bad),
            Err(EvolutionError::Invalid(_))
        ));
    }

    #[test]
    fn three_dimensional_evolution_smoke() {
        let p = reference_params(3);
        let grid = GridSpec::new(3, 16, 10.0).unwrap();
        let state = FieldState::gaussian(grid, 0.1, 1.5, 0.05);
        let nl = Nonlinearity {
            p: 2.0,
            a: 0.0,
            coefficient: 1.0,
        };
        let controls = StepControls::for_initial(0.25, &state);
        let series = evolve(
            &state,
            1.0,
            &[0.5, 1.0],
            &p,
            &nl,
            &controls,
            &[ChannelSpec::u_lq(2.0), ChannelSpec::u_lq(f64::INFINITY)],
        )
        .unwrap();
        assert!(series.blowup_time.is_none());
        assert!(series.values.iter().flatten().all(|v| v.is_finite()));
        // dissipative start: the sup norm must not grow from tiny data
        assert!(series.values[1][1] <= 0.1 * 1.5);
    }

    #[test]
    fn plancherel_l2_oracle() {
        // linear run, u1 = 0: L2 channel equals the spectral sum of
        // |K0hat(t, rho_k) u0hat_k|^2 at each sample
        let p = reference_params(1);
        let grid = small_grid();
        let state = FieldState::gaussian(grid, 1.0, 1.5, 0.0);
        let controls = StepControls::for_initial(0.5, &state);
        let samples = [0.5, 1.0, 2.0, 4.0];
        let series = evolve(
            &state,
            4.0,
            &samples,
            &p,
            &Nonlinearity::disabled(),
            &controls,
            &[ChannelSpec::u_lq(2.0)],
        )
        .unwrap();
        let u0_hat = forward_real(&state.u, &grid).unwrap();
        let cell = grid.spacing();
        for (i, &t) in samples.iter().enumerate() {
            let spectral: f64 = u0_hat
                .iter()
                .enumerate()
                .map(|(flat, v)| {
                    let k0 = multiplier_set(&p, grid.frequency_radius(flat), t).k0;
                    (v * k0).norm_sqr()
                })
                .sum::<f64>();
            let expect = (spectral * cell).sqrt();
            let got = series.values[i][0];
            assert!(
                (got - expect).abs() <= 1e-8 * expect,
                "t={t}: {got} vs {expect}"
            );
        }
    }

    #[test]
    fn data_scaling_is_linear_at_tiny_amplitude() {
        let p = reference_params(1);
        let nl = Nonlinearity {
            p: 2.0,
            a: 0.0,
            coefficient: 1.0,
        };
        let norm_at_1 = |eps: f64| -> f64 {
            let state = FieldState::gaussian(small_grid(), eps, 1.5, 0.0);
            let controls = StepControls {
                h: 0.05,
                corrector_iterations: 2,
                dealias_fraction: 2.0 / 3.0,
                blowup_threshold: 1e9,
            };
            let series = evolve(
                &state,
                1.0,
                &[1.0],
                &p,
                &nl,
                &controls,
                &[ChannelSpec::u_lq(2.0)],
            )
            .unwrap();
            series.values[0][0]
        };
        let ratio = norm_at_1(2e-4) / norm_at_1(1e-4);
        assert!(
            (1.0..=4.0).contains(&ratio) && (ratio - 2.0).abs() < 0.1,
            "doubling ratio {ratio}"
        );
    }

    #[test]
    fn dealias_difference_vanishes_on_refinement() {
        let p = reference_params(1);
        let nl = Nonlinearity {
            p: 3.0,
            a: 0.0,
            coefficient: 1.0,
        };
        let gap = |pts: usize| -> f64 {
            let grid = GridSpec::new(1, pts, 20.0).unwrap();
            let state = FieldState::gaussian(grid, 0.2, 2.0, 0.0);
            let run = |fraction: f64| -> Vec<f64> {
                let controls = StepControls {
                    h: 0.1,
                    corrector_iterations: 2,
                    dealias_fraction: fraction,
                    blowup_threshold: 1e9,
                };
                let mut s = state.clone();
                let prop = Propagator::new(&p, &grid, 0.1);
                while s.time < 1.0 - 1e-12 {
                    s = semilinear_step_with(&s, &controls, &nl, &prop).unwrap();
                }
                s.u
            };
            let on = run(2.0 / 3.0);
            let off = run(1.0);
            on.iter()
                .zip(&off)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max)
        };
        let fine = gap(1024);
        assert!(fine <= 1e-6, "dealias on/off gap {fine} on the fine grid");
        assert!(fine <= gap(512) + 1e-12);
    }

    #[test]
    fn frequency_shell_norm_consistency() {
        // single-mode data: every channel is the multiplier magnitude times
        // the data norm
        let p = reference_params(1);
        let grid = GridSpec::new(1, 64, std::f64::consts::PI).unwrap();
        let xi0 = 3.0;
        let mut state = FieldState::zero(grid);
        for i in 0..grid.len() {
            state.u[i] = (xi0 * grid.coordinate(i)).cos();
        }
        let t = 1.7;
        let out = linear_propagate(&state, t, &p).unwrap();
        let set = multiplier_set(&p, xi0, t);
        for &q in &[1.0, 2.0, f64::INFINITY] {
            let before = grid::lq_norm_grid(&state.u, q, &grid).unwrap();
            let after = grid::lq_norm_grid(&out.u, q, &grid).unwrap();
            assert!(
                (after - set.k0.abs() * before).abs() <= 1e-8 * before,
                "q={q}"
            );
        }
    }
}
