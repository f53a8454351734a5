//! Characteristic roots, frequency-regime classification, smooth cutoffs and
//! the four kernel Fourier multipliers of the double-damped flow.
//!
//! Every mode `|xi| = rho` of the linear equation obeys the scalar ODE
//! `w'' + (mu1 rho^{2 sigma1} + mu2 rho^{2 sigma2}) w' + rho^{2 sigma} w = 0`,
//! whose roots decide between exponential (real) and oscillatory-damped
//! (complex) mode behaviour. The multipliers `K0hat`/`K1hat` propagate initial
//! displacement/velocity, and their time derivatives propagate the velocity
//! channel.

use num_complex::Complex64;
use thiserror::Error;

/// Relative root-separation below which the confluent (double-root) limit
/// formulas are used instead of dividing by `lambda1 - lambda2`.
pub const DEGENERATE_REL_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Error, PartialEq)]
pub enum SymbolsError {
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),
    #[error("discriminant is not eventually positive as rho -> {0}")]
    NoRealRootTail(&'static str),
    #[error("invalid cutoff spec: {0}")]
    InvalidCutoff(String),
}

/// Exponents and damping coefficients of the model, plus the space dimension.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ModelParams {
    pub sigma: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub n: u32,
}

impl ModelParams {
    pub fn new(
        sigma: f64,
        sigma1: f64,
        sigma2: f64,
        mu1: f64,
        mu2: f64,
        n: u32,
    ) -> Result<Self, SymbolsError> {
        let p = Self {
            sigma,
            sigma1,
            sigma2,
            mu1,
            mu2,
            n,
        };
        p.validate()?;
        Ok(p)
    }

    /// Main setting: strict interior exponents. Boundary values
    /// (`sigma1 = 0` or `sigma2 = sigma`) are admitted but flagged by
    /// [`ModelParams::is_boundary_case`].
    pub fn validate(&self) -> Result<(), SymbolsError> {
        let err = |m: String| Err(SymbolsError::InvalidParams(m));
        if !(self.sigma >= 1.0) {
            return err(format!("sigma = {} must be >= 1", self.sigma));
        }
        if !(0.0 <= self.sigma1 && self.sigma1 < self.sigma / 2.0) {
            return err(format!(
                "sigma1 = {} must lie in [0, sigma/2 = {})",
                self.sigma1,
                self.sigma / 2.0
            ));
        }
        if !(self.sigma / 2.0 < self.sigma2 && self.sigma2 <= self.sigma) {
            return err(format!(
                "sigma2 = {} must lie in (sigma/2 = {}, sigma = {}]",
                self.sigma2,
                self.sigma / 2.0,
                self.sigma
            ));
        }
        if !(self.mu1 > 0.0) || !(self.mu2 > 0.0) {
            return err(format!("mu1 = {}, mu2 = {} must be > 0", self.mu1, self.mu2));
        }
        if self.n < 1 {
            return err("dimension n must be >= 1".into());
        }
        Ok(())
    }

    pub fn is_boundary_case(&self) -> bool {
        self.sigma1 == 0.0 || self.sigma2 == self.sigma
    }

    /// Damping symbol `b(rho) = mu1 rho^{2 sigma1} + mu2 rho^{2 sigma2}`.
    pub fn damping(&self, rho: f64) -> f64 {
        self.mu1 * rho.powf(2.0 * self.sigma1) + self.mu2 * rho.powf(2.0 * self.sigma2)
    }

    /// Elastic symbol `c(rho) = rho^{2 sigma}`.
    pub fn elastic(&self, rho: f64) -> f64 {
        rho.powf(2.0 * self.sigma)
    }
}

/// Sign of the root discriminant at a radial frequency.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum RootRegime {
    RealDistinct,
    ComplexPair,
    Degenerate,
}

/// The two characteristic roots at one radial frequency. `lambda1` is the
/// "+" branch: the root of larger real part in the real regime, i.e. the
/// slowly decaying mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharRoots {
    pub lambda1: Complex64,
    pub lambda2: Complex64,
    pub regime: RootRegime,
}

impl CharRoots {
    pub fn separation(&self) -> f64 {
        (self.lambda1 - self.lambda2).norm()
    }

    fn is_confluent(&self) -> bool {
        let scale = self.lambda1.norm().max(self.lambda2.norm()).max(1.0);
        self.separation() < DEGENERATE_REL_THRESHOLD * scale
    }
}

/// `(mu1 rho^{2 sigma1} + mu2 rho^{2 sigma2})^2 - 4 rho^{2 sigma}`; positive
/// iff the roots are real and distinct, negative iff they form a conjugate
/// pair.
pub fn discriminant(params: &ModelParams, rho: f64) -> f64 {
    debug_assert!(rho >= 0.0);
    let b = params.damping(rho);
    b * b - 4.0 * params.elastic(rho)
}

/// Both roots of `lambda^2 + b(rho) lambda + c(rho) = 0`.
///
/// The larger-magnitude root is computed directly and the other through the
/// product identity `lambda1 lambda2 = c`, so no cancellation occurs when
/// `c << b^2`. The regime tag uses a relative tolerance band around zero
/// discriminant.
pub fn characteristic_roots(params: &ModelParams, rho: f64) -> CharRoots {
    let b = params.damping(rho);
    let c = params.elastic(rho);
    if b == 0.0 && c == 0.0 {
        return CharRoots {
            lambda1: Complex64::new(0.0, 0.0),
            lambda2: Complex64::new(0.0, 0.0),
            regime: RootRegime::Degenerate,
        };
    }
    let disc = b * b - 4.0 * c;
    // classification band relative to the coefficient scale
    let band = 1e-14 * (b * b).max(4.0 * c);
    if disc > band {
        // b > 0 here, so the "-" root has the larger magnitude
        let lam2 = 0.5 * (-b - disc.sqrt());
        let lam1 = c / lam2;
        CharRoots {
            lambda1: Complex64::new(lam1, 0.0),
            lambda2: Complex64::new(lam2, 0.0),
            regime: RootRegime::RealDistinct,
        }
    } else if disc < -band {
        let re = -0.5 * b;
        let im = 0.5 * (-disc).sqrt();
        CharRoots {
            lambda1: Complex64::new(re, im),
            lambda2: Complex64::new(re, -im),
            regime: RootRegime::ComplexPair,
        }
    } else {
        let lam = -0.5 * b;
        CharRoots {
            lambda1: Complex64::new(lam, 0.0),
            lambda2: Complex64::new(lam, 0.0),
            regime: RootRegime::Degenerate,
        }
    }
}

const EPS_STAR_CAP: f64 = 0.5;
const SCAN_POINTS_PER_DECADE: usize = 512;
const SCAN_RHO_MIN: f64 = 1e-9;
const SCAN_RHO_MAX: f64 = 1e9;

/// Largest `eps <= 1/2` such that the discriminant stays positive on
/// `(0, eps] U [1/eps, oo)`, located by a log-scale scan at 512 points per
/// decade plus bisection to 1e-12 relative on each sign change.
///
/// The asymptotics force real roots at both frequency extremes whenever the
/// exponent ordering is valid, so a missing positive tail signals invalid
/// parameters.
pub fn epsilon_star(params: &ModelParams) -> Result<f64, SymbolsError> {
    let d = |rho: f64| discriminant(params, rho);

    if d(SCAN_RHO_MIN) <= 0.0 {
        return Err(SymbolsError::NoRealRootTail("0"));
    }
    if d(SCAN_RHO_MAX) <= 0.0 {
        return Err(SymbolsError::NoRealRootTail("infinity"));
    }

    let step = 10f64.powf(1.0 / SCAN_POINTS_PER_DECADE as f64);

    // low side: walk up from SCAN_RHO_MIN to the cap looking for a sign change
    let mut low = EPS_STAR_CAP;
    let mut rho = SCAN_RHO_MIN;
    while rho < EPS_STAR_CAP {
        let next = (rho * step).min(EPS_STAR_CAP);
        if d(next) <= 0.0 {
            low = bisect_boundary(&d, rho, next);
            break;
        }
        rho = next;
    }

    // high side: walk down from SCAN_RHO_MAX to 1/cap
    let mut high = EPS_STAR_CAP;
    let inv_cap = 1.0 / EPS_STAR_CAP;
    let mut rho = SCAN_RHO_MAX;
    while rho > inv_cap {
        let next = (rho / step).max(inv_cap);
        if d(next) <= 0.0 {
            high = 1.0 / bisect_boundary(&d, rho, next);
            break;
        }
        rho = next;
    }

    Ok(low.min(high))
}

/// Bisect `[a, b]` with `d(a) > 0 >= d(b)` down to 1e-12 relative width and
/// return the last strictly positive endpoint.
fn bisect_boundary(d: &dyn Fn(f64) -> f64, mut pos: f64, mut nonpos: f64) -> f64 {
    debug_assert!(d(pos) > 0.0 && d(nonpos) <= 0.0);
    while (pos - nonpos).abs() > 1e-12 * pos.abs().max(nonpos.abs()) {
        let mid = 0.5 * (pos + nonpos);
        if d(mid) > 0.0 {
            pos = mid;
        } else {
            nonpos = mid;
        }
    }
    pos
}

/// Smooth partition of unity over the radial frequency axis: `chi_low = 1`
/// below `eps_star/2` and 0 above `eps_star`, `chi_high = 1` above
/// `2/eps_star` and 0 below `1/eps_star`, `chi_mid` the complement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffSpec {
    pub eps_star: f64,
}

impl CutoffSpec {
    pub fn new(eps_star: f64) -> Result<Self, SymbolsError> {
        if !(eps_star > 0.0 && eps_star <= 0.5) {
            return Err(SymbolsError::InvalidCutoff(format!(
                "eps_star = {eps_star} must lie in (0, 1/2]"
            )));
        }
        Ok(Self { eps_star })
    }

    pub fn for_params(params: &ModelParams) -> Result<Self, SymbolsError> {
        Self::new(epsilon_star(params)?)
    }
}

/// C-infinity step: 0 for x <= 0, 1 for x >= 1, built from exp(-1/x).
fn smoothstep(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / x).exp();
        let b = (-1.0 / (1.0 - x)).exp();
        a / (a + b)
    }
}

/// `(chi_low, chi_mid, chi_high)` at radial frequency `rho`. The weights lie
/// in [0, 1] and sum to one for every `rho >= 0`.
pub fn cutoff_weights(spec: &CutoffSpec, rho: f64) -> (f64, f64, f64) {
    let e = spec.eps_star;
    let low = 1.0 - smoothstep((rho - e / 2.0) / (e / 2.0));
    let high = smoothstep((rho - 1.0 / e) * e);
    (low, 1.0 - low - high, high)
}

/// The four propagator symbols of the mode ODE.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum MultiplierKind {
    /// Propagates initial displacement: `K0hat(0) = 1`, `dt K0hat(0) = 0`.
    K0,
    /// Propagates initial velocity: `K1hat(0) = 0`, `dt K1hat(0) = 1`.
    K1,
    /// `dt K0hat = -rho^{2 sigma} K1hat`.
    DtK0,
    /// `dt K1hat = K0hat - b(rho) K1hat`.
    DtK1,
}

impl MultiplierKind {
    pub fn label(&self) -> &'static str {
        match self {
            MultiplierKind::K0 => "K0",
            MultiplierKind::K1 => "K1",
            MultiplierKind::DtK0 => "dtK0",
            MultiplierKind::DtK1 => "dtK1",
        }
    }
}

/// All four multipliers at once; cheaper than four separate calls when a
/// propagation step needs the full 2x2 mode matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultiplierSet {
    pub k0: f64,
    pub k1: f64,
    pub dt_k0: f64,
    pub dt_k1: f64,
}

/// Evaluate the kernel multipliers at `(t, rho)`.
///
/// All four symbols are real for every regime (conjugate symmetry in the
/// complex regime), so this returns `f64` directly; [`multiplier`] wraps the
/// value as a complex number for the public operation signature.
///
/// The evaluation is cancellation-free: real-regime differences of
/// exponentials go through `exp_m1`, the complex regime uses the explicit
/// `e^{alpha t} (cos, sin)` forms, and near-confluent roots switch to the
/// double-root limits.
pub fn multiplier_set(params: &ModelParams, rho: f64, t: f64) -> MultiplierSet {
    debug_assert!(rho >= 0.0 && t >= 0.0);
    let roots = characteristic_roots(params, rho);
    let c = params.elastic(rho);
    let b = params.damping(rho);

    let (k0, k1) = if roots.regime == RootRegime::ComplexPair {
        let alpha = roots.lambda1.re;
        let beta = roots.lambda1.im;
        let ea = (alpha * t).exp();
        let (s, co) = (beta * t).sin_cos();
        (ea * (co - alpha * s / beta), ea * s / beta)
    } else if roots.regime == RootRegime::Degenerate || roots.is_confluent() {
        let lam = 0.5 * (roots.lambda1.re + roots.lambda2.re);
        let e = (lam * t).exp();
        (e * (1.0 - lam * t), t * e)
    } else {
        let lam1 = roots.lambda1.re;
        let lam2 = roots.lambda2.re;
        let delta = lam1 - lam2; // > 0
        let e1 = (lam1 * t).exp();
        let em1 = (-delta * t).exp_m1(); // e^{-delta t} - 1, no cancellation
        (e1 * (delta + lam1 * em1) / delta, e1 * (-em1) / delta)
    };

    MultiplierSet {
        k0,
        k1,
        dt_k0: -c * k1,
        dt_k1: k0 - b * k1,
    }
}

/// Single multiplier value; see [`multiplier_set`].
pub fn multiplier(params: &ModelParams, kind: MultiplierKind, rho: f64, t: f64) -> Complex64 {
    let set = multiplier_set(params, rho, t);
    let v = match kind {
        MultiplierKind::K0 => set.k0,
        MultiplierKind::K1 => set.k1,
        MultiplierKind::DtK0 => set.dt_k0,
        MultiplierKind::DtK1 => set.dt_k1,
    };
    Complex64::new(v, 0.0)
}

/// Reference parameter set used throughout the verification experiments.
pub fn reference_params(n: u32) -> ModelParams {
    ModelParams::new(2.0, 0.5, 1.5, 1.0, 1.0, n).expect("reference parameters are valid")
}
