//! Uniform periodic sampling grids in 1, 2 and 3 dimensions with unitary
//! discrete Fourier transforms, Riesz and Bessel-potential multipliers, and
//! grid L^q norms.
//!
//! The torus `[-L, L)^n` stands in for whole space; decay experiments keep
//! the simulated horizon short enough that the field never reaches the
//! boundary at a significant level (see the sentinel-ring monitor in the
//! evolution module).

use num_complex::Complex64;
use rustfft::FftPlanner;
use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GridError {
    #[error("invalid grid: {0}")]
    InvalidSpec(String),
    #[error("field shape {got} does not conform to grid size {want}")]
    ShapeMismatch { got: usize, want: usize },
}

/// Uniform periodic grid on `[-L, L)^n` with a power-of-two point count per
/// axis. Frequencies are the symmetric set `pi k / L`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GridSpec {
    pub n: u32,
    pub points_per_axis: usize,
    pub half_length: f64,
}

impl GridSpec {
    pub fn new(n: u32, points_per_axis: usize, half_length: f64) -> Result<Self, GridError> {
        if !(1..=3).contains(&n) {
            return Err(GridError::InvalidSpec(format!("n = {n} not in 1..=3")));
        }
        if points_per_axis < 16 || !points_per_axis.is_power_of_two() {
            return Err(GridError::InvalidSpec(format!(
                "points_per_axis = {points_per_axis} must be a power of two >= 16"
            )));
        }
        if !(half_length > 0.0) {
            return Err(GridError::InvalidSpec("half_length must be > 0".into()));
        }
        Ok(Self {
            n,
            points_per_axis,
            half_length,
        })
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_length / self.points_per_axis as f64
    }

    pub fn len(&self) -> usize {
        self.points_per_axis.pow(self.n)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Physical coordinate of index `i` along one axis.
    pub fn coordinate(&self, i: usize) -> f64 {
        -self.half_length + self.spacing() * i as f64
    }

    /// Signed frequency of DFT index `k` along one axis (standard ordering:
    /// `0, 1, ..., N/2-1, -N/2, ..., -1`, scaled by `pi / L`).
    pub fn frequency(&self, k: usize) -> f64 {
        let n = self.points_per_axis;
        let signed = if k < n / 2 {
            k as isize
        } else {
            k as isize - n as isize
        };
        PI * signed as f64 / self.half_length
    }

    /// Radial frequency `|xi|` at a flat spectral index.
    pub fn frequency_radius(&self, flat: usize) -> f64 {
        let mut rest = flat;
        let mut sum = 0.0;
        for _ in 0..self.n {
            let k = rest % self.points_per_axis;
            rest /= self.points_per_axis;
            let f = self.frequency(k);
            sum += f * f;
        }
        sum.sqrt()
    }

    /// Decompose a flat physical index into per-axis indices (first axis
    /// fastest).
    pub fn axis_indices(&self, flat: usize) -> [usize; 3] {
        let mut rest = flat;
        let mut out = [0usize; 3];
        for item in out.iter_mut().take(self.n as usize) {
            *item = rest % self.points_per_axis;
            rest /= self.points_per_axis;
        }
        out
    }

    fn check_len(&self, len: usize) -> Result<(), GridError> {
        if len != self.len() {
            return Err(GridError::ShapeMismatch {
                got: len,
                want: self.len(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(len: usize, direction: Direction) -> Arc<dyn rustfft::Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        match direction {
            Direction::Forward => p.plan_fft_forward(len),
            Direction::Inverse => p.plan_fft_inverse(len),
        }
    })
}

/// Unitary n-dimensional DFT in place: forward followed by inverse is the
/// identity, and the l2 norm of the data is preserved.
pub fn transform(
    data: &mut [Complex64],
    direction: Direction,
    grid: &GridSpec,
) -> Result<(), GridError> {
    grid.check_len(data.len())?;
    let n = grid.points_per_axis;
    let fft = plan(n, direction);
    let mut lane = vec![Complex64::new(0.0, 0.0); n];
    for axis in 0..grid.n as usize {
        let stride = n.pow(axis as u32);
        let lanes = data.len() / n;
        for lane_idx in 0..lanes {
            // base index of this lane: split the complement index around the axis
            let inner = lane_idx % stride;
            let outer = lane_idx / stride;
            let base = outer * stride * n + inner;
            for (j, item) in lane.iter_mut().enumerate() {
                *item = data[base + j * stride];
            }
            fft.process(&mut lane);
            let scale = 1.0 / (n as f64).sqrt();
            for (j, item) in lane.iter().enumerate() {
                data[base + j * stride] = item * scale;
            }
        }
    }
    Ok(())
}

/// Forward transform of real samples into a fresh spectral buffer.
pub fn forward_real(samples: &[f64], grid: &GridSpec) -> Result<Vec<Complex64>, GridError> {
    grid.check_len(samples.len())?;
    let mut buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    transform(&mut buf, Direction::Forward, grid)?;
    Ok(buf)
}

/// Inverse transform, discarding the (roundoff-level) imaginary part.
pub fn inverse_to_real(spectrum: &[Complex64], grid: &GridSpec) -> Result<Vec<f64>, GridError> {
    grid.check_len(spectrum.len())?;
    let mut buf = spectrum.to_vec();
    transform(&mut buf, Direction::Inverse, grid)?;
    Ok(buf.iter().map(|v| v.re).collect())
}

/// Multiply a spectrum in place by a radial symbol `|xi| -> g(|xi|)`.
pub fn apply_radial_symbol(
    spectrum: &mut [Complex64],
    grid: &GridSpec,
    g: impl Fn(f64) -> f64,
) -> Result<(), GridError> {
    grid.check_len(spectrum.len())?;
    for (flat, v) in spectrum.iter_mut().enumerate() {
        *v *= g(grid.frequency_radius(flat));
    }
    Ok(())
}

/// Riesz operator `|D|^s`: multiply the spectrum by `|xi|^s` and invert.
/// The zero mode is annihilated for `s > 0` (removable symbol value) and
/// `|D|^0` is the identity.
pub fn riesz_apply(field: &[f64], s: f64, grid: &GridSpec) -> Result<Vec<f64>, GridError> {
    if s == 0.0 {
        grid.check_len(field.len())?;
        return Ok(field.to_vec());
    }
    let mut spec = forward_real(field, grid)?;
    apply_radial_symbol(&mut spec, grid, |rho| if rho > 0.0 { rho.powf(s) } else { 0.0 })?;
    inverse_to_real(&spec, grid)
}

/// Bessel-potential operator `<D>^s` with symbol `(1 + |xi|^2)^{s/2}`.
pub fn bessel_potential_apply(field: &[f64], s: f64, grid: &GridSpec) -> Result<Vec<f64>, GridError> {
    if s == 0.0 {
        grid.check_len(field.len())?;
        return Ok(field.to_vec());
    }
    let mut spec = forward_real(field, grid)?;
    apply_radial_symbol(&mut spec, grid, |rho| (1.0 + rho * rho).powf(s / 2.0))?;
    inverse_to_real(&spec, grid)
}

/// Riemann-sum L^q norm `(sum |u|^q h^n)^{1/q}`; maximum for `q = inf`.
pub fn lq_norm_grid(field: &[f64], q: f64, grid: &GridSpec) -> Result<f64, GridError> {
    grid.check_len(field.len())?;
    if q.is_infinite() {
        return Ok(field.iter().fold(0.0f64, |m, &v| m.max(v.abs())));
    }
    assert!(q >= 1.0, "q = {q} below 1");
    let cell = grid.spacing().powi(grid.n as i32);
    if q == 2.0 {
        return Ok((field.iter().map(|&v| v * v).sum::<f64>() * cell).sqrt());
    }
    if q == 1.0 {
        return Ok(field.iter().map(|&v| v.abs()).sum::<f64>() * cell);
    }
    Ok((field.iter().map(|&v| v.abs().powf(q)).sum::<f64>() * cell).powf(1.0 / q))
}

/// Sobolev `H^s_q` norm `||<D>^s u||_{L^q}`.
pub fn sobolev_norm_grid(field: &[f64], s: f64, q: f64, grid: &GridSpec) -> Result<f64, GridError> {
    lq_norm_grid(&bessel_potential_apply(field, s, grid)?, q, grid)
}

/// Write field samples as CSV (`coordinate(s), u, ut`), 17 significant
/// digits.
pub fn field_to_csv(u: &[f64], ut: &[f64], grid: &GridSpec) -> Result<String, GridError> {
    grid.check_len(u.len())?;
    grid.check_len(ut.len())?;
    let mut out = String::new();
    let coords = ["x", "y", "z"];
    let header: Vec<&str> = coords[..grid.n as usize]
        .iter()
        .copied()
        .chain(["u", "ut"])
        .collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for flat in 0..grid.len() {
        let idx = grid.axis_indices(flat);
        for &i in idx.iter().take(grid.n as usize) {
            out.push_str(&format!("{:.16e},", grid.coordinate(i)));
        }
        out.push_str(&format!("{:.16e},{:.16e}\n", u[flat], ut[flat]));
    }
    Ok(out)
}
