//! Radial (Hankel-type) inverse Fourier transforms of multiplier symbols and
//! L^r norms of the resulting kernels.
//!
//! A radial symbol `m(|xi|)` in dimension n transforms to the radial profile
//!
//! ```text
//! K(x) = int_0^inf m(rho) rho^{n-1} Jtilde_{n/2-1}(rho |x|) drho
//! ```
//!
//! in the unitary convention, which makes the Gaussian `e^{-rho^2/2}` a fixed
//! point. The oscillation of the Bessel kernel is handled by splitting panels
//! at half-periods and applying 16-point Gauss-Legendre per panel; the
//! `e^{Re lambda1 t}` envelope of the kernel symbols keeps the truncated tail
//! below tolerance.

pub mod bessel;

use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;
use thiserror::Error;

pub use bessel::{bessel_j, bessel_j_tilde, lemma_b1_alpha, BesselError};

#[derive(Debug, Error, PartialEq)]
pub enum RadialError {
    #[error("quadrature config invalid: {0}")]
    InvalidConfig(String),
    #[error("truncation tail not converged within the panel budget: {0}")]
    TailNotConverged(String),
    #[error("radial profile invalid: {0}")]
    InvalidProfile(String),
    #[error(transparent)]
    Bessel(#[from] BesselError),
}

/// A kernel sampled on an ascending log-spaced radial grid.
#[derive(Debug, Clone)]
pub struct RadialProfile {
    pub dimension: u32,
    pub radii: Vec<f64>,
    pub values: Vec<Complex64>,
}

impl RadialProfile {
    pub fn validate(&self) -> Result<(), RadialError> {
        if self.radii.len() != self.values.len() || self.radii.is_empty() {
            return Err(RadialError::InvalidProfile(
                "radii/values length mismatch or empty".into(),
            ));
        }
        if !self.radii.windows(2).all(|w| w[0] < w[1] && w[0] > 0.0) {
            return Err(RadialError::InvalidProfile(
                "radii must be strictly increasing and positive".into(),
            ));
        }
        if !self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
            return Err(RadialError::InvalidProfile("non-finite value".into()));
        }
        Ok(())
    }

    /// Largest relative imaginary residue; real symmetric multipliers keep
    /// this below ~1e-8.
    pub fn imag_residue(&self) -> f64 {
        let scale = self
            .values
            .iter()
            .map(|v| v.norm())
            .fold(0.0f64, f64::max)
            .max(1e-300);
        self.values.iter().map(|v| v.im.abs()).fold(0.0f64, f64::max) / scale
    }
}

/// Log-spaced radii covering `[lo, hi]` at `per_decade` samples per decade.
pub fn log_radii(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && per_decade >= 2);
    let decades = (hi / lo).log10();
    let count = (decades * per_decade as f64).ceil() as usize + 1;
    let step = decades / (count - 1) as f64;
    (0..count).map(|i| lo * 10f64.powf(step * i as f64)).collect()
}

#[derive(Debug, Clone, Copy)]
pub struct QuadratureConfig {
    /// Per-point error target, in (0, 1e-3].
    pub tolerance: f64,
    /// Budget of Gauss-Legendre panels per profile point, >= 64.
    pub max_panels: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-9,
            max_panels: 400_000,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<(), RadialError> {
        if !(self.tolerance > 0.0 && self.tolerance <= 1e-3) {
            return Err(RadialError::InvalidConfig(format!(
                "tolerance = {} outside (0, 1e-3]",
                self.tolerance
            )));
        }
        if self.max_panels < 64 {
            return Err(RadialError::InvalidConfig(format!(
                "max_panels = {} < 64",
                self.max_panels
            )));
        }
        Ok(())
    }
}

// 16-point Gauss-Legendre nodes/weights on [-1, 1].
const GL_NODES: [f64; 16] = [
    -0.9894009349916499,
    -0.9445750230732326,
    -0.8656312023878318,
    -0.755404408355003,
    -0.6178762444026438,
    -0.45801677765722737,
    -0.2816035507792589,
    -0.09501250983763744,
    0.09501250983763744,
    0.2816035507792589,
    0.45801677765722737,
    0.6178762444026438,
    0.755404408355003,
    0.8656312023878318,
    0.9445750230732326,
    0.9894009349916499,
];
const GL_WEIGHTS: [f64; 16] = [
    0.027152459411754094,
    0.06225352393864789,
    0.09515851168249278,
    0.1246289712555339,
    0.14959598881657673,
    0.16915651939500254,
    0.18260341504492358,
    0.1894506104550685,
    0.1894506104550685,
    0.18260341504492358,
    0.16915651939500254,
    0.14959598881657673,
    0.1246289712555339,
    0.09515851168249278,
    0.06225352393864789,
    0.027152459411754094,
];
const GL8_NODES: [f64; 8] = [
    -0.9602898564975363,
    -0.7966664774136267,
    -0.525532409916329,
    -0.1834346424956498,
    0.1834346424956498,
    0.525532409916329,
    0.7966664774136267,
    0.9602898564975363,
];
const GL8_WEIGHTS: [f64; 8] = [
    0.10122853629037626,
    0.22238103445337448,
    0.31370664587788727,
    0.362683783378362,
    0.362683783378362,
    0.31370664587788727,
    0.22238103445337448,
    0.10122853629037626,
];

/// Radial Bessel factor `Jtilde_{n/2-1}(z)` with closed-form fast paths for
/// the odd dimensions used most.
fn radial_bessel(n: u32, z: f64) -> f64 {
    match n {
        1 => (2.0 / PI).sqrt() * z.cos(),
        3 => {
            if z.abs() < 1e-8 {
                (2.0 / PI).sqrt() * (1.0 - z * z / 6.0)
            } else {
                (2.0 / PI).sqrt() * z.sin() / z
            }
        }
        _ => bessel_j_tilde(n as f64 / 2.0 - 1.0, z).expect("order n/2-1 >= -1/2"),
    }
}

struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    err: f64,
}

fn integrate_panel(f: &dyn Fn(f64) -> Complex64, a: f64, b: f64) -> (Complex64, f64) {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut v16 = Complex64::new(0.0, 0.0);
    for i in 0..16 {
        v16 += f(mid + half * GL_NODES[i]) * GL_WEIGHTS[i];
    }
    v16 *= half;
    let mut v8 = Complex64::new(0.0, 0.0);
    for i in 0..8 {
        v8 += f(mid + half * GL8_NODES[i]) * GL8_WEIGHTS[i];
    }
    v8 *= half;
    (v16, (v16 - v8).norm())
}

/// Adaptive panel integration of an oscillatory integrand over [0, rmax]:
/// log-spaced cells subdivided to the half-period `pi/x`, refined where the
/// embedded GL8/GL16 error estimate concentrates.
fn oscillatory_integral(
    f: &dyn Fn(f64) -> Complex64,
    rmax: f64,
    x: f64,
    cfg: &QuadratureConfig,
) -> Result<Complex64, RadialError> {
    const KNOTS_PER_DECADE: usize = 16;
    const LOG_DECADES: f64 = 8.0;
    let mut knots: Vec<f64> = vec![0.0];
    let lo = rmax * 10f64.powf(-LOG_DECADES);
    let count = (LOG_DECADES * KNOTS_PER_DECADE as f64) as usize;
    for i in 0..=count {
        knots.push(lo * 10f64.powf(i as f64 / KNOTS_PER_DECADE as f64));
    }

    // half-period subdivision
    let mut panels: Vec<Panel> = Vec::new();
    let mut budget = cfg.max_panels as i64;
    for w in knots.windows(2) {
        let (a, b) = (w[0], w[1]);
        let nsub = if x > 0.0 {
            ((b - a) * x / PI).ceil().max(1.0) as i64
        } else {
            1
        };
        budget -= nsub;
        if budget < 0 {
            return Err(RadialError::TailNotConverged(format!(
                "oscillation at x = {x} needs more than {} panels",
                cfg.max_panels
            )));
        }
        for i in 0..nsub {
            let pa = a + (b - a) * i as f64 / nsub as f64;
            let pb = a + (b - a) * (i + 1) as f64 / nsub as f64;
            let (value, err) = integrate_panel(f, pa, pb);
            panels.push(Panel { a: pa, b: pb, value, err });
        }
    }

    // refinement passes on the worst panels
    for _ in 0..3 {
        let total: Complex64 = panels.iter().map(|p| p.value).sum();
        let err: f64 = panels.iter().map(|p| p.err).sum();
        if err <= cfg.tolerance * total.norm().max(1.0) {
            return Ok(total);
        }
        let threshold = err / panels.len() as f64;
        let mut next: Vec<Panel> = Vec::with_capacity(panels.len() * 2);
        for p in panels {
            if p.err > threshold && budget >= 4 {
                budget -= 4;
                for i in 0..4 {
                    let pa = p.a + (p.b - p.a) * i as f64 / 4.0;
                    let pb = p.a + (p.b - p.a) * (i + 1) as f64 / 4.0;
                    let (value, err) = integrate_panel(f, pa, pb);
                    next.push(Panel { a: pa, b: pb, value, err });
                }
            } else {
                next.push(p);
            }
        }
        panels = next;
    }

    let total: Complex64 = panels.iter().map(|p| p.value).sum();
    let err: f64 = panels.iter().map(|p| p.err).sum();
    if err <= cfg.tolerance * total.norm().max(1.0) {
        Ok(total)
    } else {
        Err(RadialError::TailNotConverged(format!(
            "panel error {err:.3e} above tolerance at x = {x}"
        )))
    }
}

/// Truncation radius: last probe where the envelope `|m(rho)| rho^{s+n-1}`
/// exceeds 1e-15 of its maximum, with a half-decade margin. `None` for an
/// identically vanishing symbol.
fn envelope_rmax(
    symbol: &dyn Fn(f64) -> Complex64,
    n: u32,
    s_weight: f64,
) -> Result<Option<f64>, RadialError> {
    let pow = s_weight + n as f64 - 1.0;
    let mut gmax = 0.0f64;
    let mut last = f64::NAN;
    const PROBES: usize = 1600;
    for i in 0..=PROBES {
        let rho = 10f64.powf(-9.0 + 16.0 * i as f64 / PROBES as f64);
        let g = symbol(rho).norm() * rho.powf(pow);
        if !g.is_finite() {
            return Err(RadialError::InvalidProfile(format!(
                "symbol envelope non-finite at rho = {rho}"
            )));
        }
        gmax = gmax.max(g);
        if g > 1e-15 * gmax.max(1e-300) {
            last = rho;
        }
    }
    if gmax == 0.0 {
        return Ok(None);
    }
    let tail_probe = symbol(last * 3.0).norm() * (last * 3.0).powf(pow);
    if !(tail_probe <= 1e-12 * gmax) {
        return Err(RadialError::TailNotConverged(format!(
            "symbol envelope has not decayed by rho = {:.3e}",
            last * 3.0
        )));
    }
    Ok(Some(last * 1.5))
}

/// Inverse radial Fourier transform of `rho -> m(rho) rho^{s_weight}` in
/// dimension n, sampled at the given radii.
///
/// Unitary convention: the Gaussian `e^{-rho^2/2}` maps to `e^{-|x|^2/2}`.
/// At `x = 0` the value reduces to the non-oscillatory moment
/// `int m(rho) rho^{s+n-1} drho / (2^{n/2-1} Gamma(n/2))`.
pub fn inverse_radial_fourier(
    symbol: &(dyn Fn(f64) -> Complex64 + Sync),
    n: u32,
    s_weight: f64,
    radii: &[f64],
    cfg: &QuadratureConfig,
) -> Result<RadialProfile, RadialError> {
    cfg.validate()?;
    if n < 1 {
        return Err(RadialError::InvalidConfig("dimension must be >= 1".into()));
    }
    let Some(rmax) = envelope_rmax(symbol, n, s_weight)? else {
        let profile = RadialProfile {
            dimension: n,
            radii: radii.to_vec(),
            values: vec![Complex64::new(0.0, 0.0); radii.len()],
        };
        profile.validate()?;
        return Ok(profile);
    };
    let pow = s_weight + n as f64 - 1.0;

    let values: Result<Vec<Complex64>, RadialError> = radii
        .par_iter()
        .map(|&x| {
            let integrand =
                move |rho: f64| symbol(rho) * rho.powf(pow) * radial_bessel(n, rho * x);
            oscillatory_integral(&integrand, rmax, x, cfg)
        })
        .collect();

    let profile = RadialProfile {
        dimension: n,
        radii: radii.to_vec(),
        values: values?,
    };
    profile.validate()?;
    Ok(profile)
}

/// Surface area of the unit (n-1)-sphere, `2 pi^{n/2} / Gamma(n/2)`.
pub fn sphere_area(n: u32) -> f64 {
    match n {
        1 => 2.0,
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        _ => {
            // Gamma(n/2) by recursion from Gamma(1) or Gamma(1/2)
            let mut g;
            let mut z;
            if n % 2 == 0 {
                g = 1.0;
                z = 1.0;
            } else {
                g = PI.sqrt();
                z = 0.5;
            }
            while z < n as f64 / 2.0 - 0.25 {
                g *= z;
                z += 1.0;
            }
            2.0 * PI.powf(n as f64 / 2.0) / g
        }
    }
}

/// `L^q` norm of a radial kernel: head-corrected composite Simpson of
/// `|K|^q r^{n-1}` on the log grid, times the sphere area, to the power 1/q.
/// `q = f64::INFINITY` returns the maximum modulus.
///
/// The integrand tail beyond the last radius is extrapolated from the final
/// decade's log-log slope; the norm fails with `TailNotConverged` when that
/// estimate exceeds `tail_tol` of the total.
pub fn radial_lq_norm(profile: &RadialProfile, q: f64, tail_tol: f64) -> Result<f64, RadialError> {
    profile.validate()?;
    if q.is_infinite() {
        return Ok(profile.values.iter().map(|v| v.norm()).fold(0.0, f64::max));
    }
    if !(q >= 1.0) {
        return Err(RadialError::InvalidConfig(format!("q = {q} below 1")));
    }
    if profile.radii.len() < 8 {
        return Err(RadialError::InvalidProfile(
            "norm quadrature needs at least 8 radii".into(),
        ));
    }
    let n = profile.dimension as f64;
    let r = &profile.radii;
    let g: Vec<f64> = r
        .iter()
        .zip(&profile.values)
        .map(|(&ri, v)| v.norm().powf(q) * ri.powf(n)) // extra r from du = dr/r
        .collect();

    // composite Simpson in u = ln r (uniform log spacing assumed)
    let du = (r[1] / r[0]).ln();
    let mut integral = 0.0;
    let mut i = 0;
    while i + 2 < g.len() {
        integral += du / 3.0 * (g[i] + 4.0 * g[i + 1] + g[i + 2]);
        i += 2;
    }
    if i + 1 < g.len() {
        integral += du / 2.0 * (g[i] + g[i + 1]);
    }

    // head: |K| ~ const on [0, r0]
    let head = profile.values[0].norm().powf(q) * r[0].powf(n) / n;
    integral += head;

    // tail estimate from the closing decade's power-law slope
    let tail = {
        let last = g.len() - 1;
        let mut j = last;
        while j > 0 && r[j] > r[last] / 10.0 {
            j -= 1;
        }
        if g[last] < 1e-290 {
            0.0 // endpoint already at underflow: no tail
        } else {
            let slope = (g[last] / g[j].max(1e-300)).ln() / (r[last] / r[j]).ln();
            if slope < -0.05 {
                g[last] / (-slope)
            } else {
                f64::INFINITY
            }
        }
    };
    if !(tail <= tail_tol * integral) {
        return Err(RadialError::TailNotConverged(format!(
            "estimated tail {tail:.3e} vs integral {integral:.3e}"
        )));
    }
    integral += tail;

    Ok((sphere_area(profile.dimension) * integral).powf(1.0 / q))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian_symbol(rho: f64) -> Complex64 {
        Complex64::new((-rho * rho / 2.0).exp(), 0.0)
    }

    #[test]
    fn gaussian_self_transform_n1_n3() {
        let cfg = QuadratureConfig::default();
        for &n in &[1u32, 3] {
            let radii = vec![1e-3, 0.5, 1.0, 1.5, 2.0];
            let prof = inverse_radial_fourier(&gaussian_symbol, n, 0.0, &radii, &cfg).unwrap();
            for (i, &x) in radii.iter().enumerate() {
                let exact = (-x * x / 2.0).exp();
                assert!(
                    (prof.values[i].re - exact).abs() <= 1e-6,
                    "n={n}, x={x}: {} vs {exact}",
                    prof.values[i].re
                );
            }
            assert!(prof.imag_residue() <= 1e-8);
        }
    }

    #[test]
    fn gaussian_self_transform_even_and_higher_dimensions() {
        // n = 2 exercises the integer-order Bessel path, n = 5 the
        // half-integer recurrence
        let cfg = QuadratureConfig::default();
        for &n in &[2u32, 5] {
            let radii = vec![0.5, 1.0, 2.0];
            let prof = inverse_radial_fourier(&gaussian_symbol, n, 0.0, &radii, &cfg).unwrap();
            for (i, &x) in radii.iter().enumerate() {
                let exact = (-x * x / 2.0).exp();
                assert!(
                    (prof.values[i].re - exact).abs() <= 1e-6,
                    "n={n}, x={x}: {} vs {exact}",
                    prof.values[i].re
                );
            }
        }
    }

    #[test]
    fn origin_value_matches_direct_moment() {
        // x = 0: value = int m rho^{n-1} / (2^{n/2-1} Gamma(n/2));
        // n = 1: sqrt(2/pi) * int m drho with int e^{-r^2/2} = sqrt(pi/2)
        let cfg = QuadratureConfig::default();
        let prof = inverse_radial_fourier(&gaussian_symbol, 1, 0.0, &[1e-9], &cfg).unwrap();
        let exact = (2.0 / PI).sqrt() * (PI / 2.0).sqrt();
        assert!((prof.values[0].re - exact).abs() < 1e-9);
    }

    #[test]
    fn gaussian_l1_and_l2_norms() {
        let cfg = QuadratureConfig::default();
        let radii = log_radii(1e-3, 12.0, 256);
        let prof = inverse_radial_fourier(&gaussian_symbol, 1, 0.0, &radii, &cfg).unwrap();
        // L1(R) of e^{-x^2/2} = sqrt(2 pi)
        let l1 = radial_lq_norm(&prof, 1.0, 1e-6).unwrap();
        assert!(
            (l1 - (2.0 * PI).sqrt()).abs() <= 1e-6,
            "l1 = {l1} vs {}",
            (2.0 * PI).sqrt()
        );
        // L2^2 = sqrt(pi)
        let l2 = radial_lq_norm(&prof, 2.0, 1e-6).unwrap();
        assert!((l2 - PI.sqrt().sqrt()).abs() <= 1e-6);
        // Linf = 1 at the origin-most sample
        let linf = radial_lq_norm(&prof, f64::INFINITY, 1e-6).unwrap();
        assert!((linf - 1.0).abs() < 1e-5);
    }

    #[test]
    fn zero_profile_norm_is_zero() {
        let radii = log_radii(1e-3, 10.0, 32);
        let prof = RadialProfile {
            dimension: 1,
            radii: radii.clone(),
            values: vec![Complex64::new(0.0, 0.0); radii.len()],
        };
        for &q in &[1.0, 2.0, f64::INFINITY] {
            assert_eq!(radial_lq_norm(&prof, q, 1e-6).unwrap(), 0.0);
        }
    }

    #[test]
    fn undecayed_tail_rejected() {
        let radii = log_radii(1e-3, 10.0, 32);
        let prof = RadialProfile {
            dimension: 1,
            radii: radii.clone(),
            values: vec![Complex64::new(1.0, 0.0); radii.len()],
        };
        assert!(matches!(
            radial_lq_norm(&prof, 1.0, 1e-6),
            Err(RadialError::TailNotConverged(_))
        ));
    }

    #[test]
    fn k1_symbol_at_t0_transforms_to_zero() {
        // K1hat(0, .) = 0 identically, so the profile is identically zero
        let p = crate::symbols::reference_params(1);
        let sym = move |rho: f64| {
            crate::symbols::multiplier(&p, crate::symbols::MultiplierKind::K1, rho, 0.0)
        };
        let prof =
            inverse_radial_fourier(&sym, 1, 0.0, &[0.5, 1.0], &QuadratureConfig::default())
                .unwrap();
        assert!(prof.values.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn k1_kernel_origin_matches_direct_quadrature() {
        // reference parameters, t = 4: profile at x ~ 0 equals the direct
        // non-oscillatory moment sqrt(2/pi) int K1hat(4, rho) drho
        let p = crate::symbols::reference_params(1);
        let sym = move |rho: f64| {
            crate::symbols::multiplier(&p, crate::symbols::MultiplierKind::K1, rho, 4.0)
        };
        let cfg = QuadratureConfig::default();
        let prof = inverse_radial_fourier(&sym, 1, 0.0, &[1e-9], &cfg).unwrap();
        let direct = bessel::adaptive_simpson(
            &|rho: f64| sym(rho).re,
            0.0,
            40.0, // e^{lambda1 t} support: lambda1 = -rho for rho > 1
            1e-12,
        );
        let expected = (2.0 / PI).sqrt() * direct;
        assert!(
            (prof.values[0].re - expected).abs() <= 1e-6 * expected.abs(),
            "{} vs {expected}",
            prof.values[0].re
        );
    }

    #[test]
    fn config_validation() {
        assert!(QuadratureConfig { tolerance: 0.0, max_panels: 100 }.validate().is_err());
        assert!(QuadratureConfig { tolerance: 1e-2, max_panels: 100 }.validate().is_err());
        assert!(QuadratureConfig { tolerance: 1e-6, max_panels: 10 }.validate().is_err());
        assert!(QuadratureConfig { tolerance: 1e-6, max_panels: 64 }.validate().is_ok());
    }
}
