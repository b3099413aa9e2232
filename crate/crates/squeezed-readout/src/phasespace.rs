//! Gaussian phase-space picture of the integrated output mode Â = τ^{-1/2} ∫ a_out dt.
//!
//! Quadratures are X = (Â + Â†)/2 and Y = (Â − Â†)/2i measured relative to the homodyne angle,
//! so X is the measured quadrature and M = 2√(κτ)(X cos φ + Y sin φ) at relative angle φ.

use rayon::prelude::*;

use crate::error::{ReadoutError, Result};
use crate::readout::QubitState;
use crate::scalar::{c, Real};
use crate::scheme::SchemeEvaluation;

/// Mean (⟨X⟩, ⟨Y⟩) and symmetric covariance D of the integrated output mode.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianState2D<T> {
    pub mean: (T, T),
    pub cov: [[T; 2]; 2],
}

impl<T: Real> GaussianState2D<T> {
    pub fn new(mean: (T, T), cov: [[T; 2]; 2]) -> Result<Self> {
        let scale = cov[0][0].abs().max(cov[1][1].abs());
        if (cov[0][1] - cov[1][0]).abs() > c::<T>(1e-12) * scale {
            return Err(ReadoutError::IndefiniteCovariance("covariance is not symmetric".into()));
        }
        let s = Self { mean, cov };
        if !(cov[0][0] > T::zero()) || !(s.det() > T::zero()) {
            return Err(ReadoutError::IndefiniteCovariance(format!(
                "Dxx = {:e}, det D = {:e}",
                cov[0][0].to_f64().unwrap_or(f64::NAN),
                s.det().to_f64().unwrap_or(f64::NAN)
            )));
        }
        Ok(s)
    }

    pub fn vacuum() -> Self {
        let q = c::<T>(0.25);
        Self { mean: (T::zero(), T::zero()), cov: [[q, T::zero()], [T::zero(), q]] }
    }

    pub fn det(&self) -> T {
        self.cov[0][0] * self.cov[1][1] - self.cov[0][1] * self.cov[1][0]
    }

    /// Eigenvalues (minor, major).
    pub fn principal_variances(&self) -> (T, T) {
        let [[a, b], [_, d]] = self.cov;
        let m = (a + d) * c(0.5);
        let h = (((a - d) * c(0.5)).powi(2) + b * b).sqrt();
        (m - h, m + h)
    }

    /// W(X, Y) = exp(−½ GᵀD⁻¹G) / (2π √det D).
    pub fn wigner(&self, x: T, y: T) -> T {
        let det = self.det();
        let (gx, gy) = (x - self.mean.0, y - self.mean.1);
        let [[a, b], [_, d]] = self.cov;
        let q = (d * gx * gx - c::<T>(2.0) * b * gx * gy + a * gy * gy) / det;
        (-q * c(0.5)).exp() / (c::<T>(2.0) * T::PI() * det.sqrt())
    }
}

/// Orientation and size of the noise ellipse.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EllipseDiagnostics<T> {
    /// Angle of the minor axis from the measured quadrature, in [−π/2, π/2].
    pub theta_n: T,
    /// Noise at the measured quadrature over κτ, i.e. 4 Dxx.
    pub xi2_n: T,
    /// 10 log₁₀ of the minor-axis variance over the vacuum value 1/4.
    pub xi2_db: T,
}

pub fn ellipse<T: Real>(state: &GaussianState2D<T>) -> EllipseDiagnostics<T> {
    let [[a, b], [_, d]] = state.cov;
    let (lmin, _) = state.principal_variances();
    let quarter = c::<T>(0.25);
    let tie = c::<T>(1e-14) * (a.abs() + d.abs());
    let theta_n = if b.abs() <= tie && (a - d).abs() <= tie {
        T::zero()
    } else {
        // major axis at ½ atan2(2b, a − d); the minor axis is perpendicular
        let mut t = c::<T>(0.5) * (c::<T>(2.0) * b).atan2(a - d) + T::FRAC_PI_2();
        if t > T::FRAC_PI_2() {
            t = t - T::PI();
        }
        t
    };
    EllipseDiagnostics { theta_n, xi2_n: c::<T>(4.0) * a, xi2_db: c::<T>(10.0) * (lmin / quarter).log10() }
}

/// Reconstruction from the measured-quadrature mean, its conjugate, and the noise at relative
/// angles 0, π/4 and π/2.
pub fn reconstruct_state<T: Real>(eval: &SchemeEvaluation<T>, state: QubitState) -> Result<GaussianState2D<T>> {
    let q = T::FRAC_PI_4();
    reconstruct_with_angles(eval, state, [T::zero(), q, c::<T>(2.0) * q])
}

/// Reconstruction from noise at three relative probe angles (distinct modulo π).
pub fn reconstruct_with_angles<T: Real>(eval: &SchemeEvaluation<T>, state: QubitState, angles: [T; 3]) -> Result<GaussianState2D<T>> {
    let kt = eval.kappa_tau();
    let phi_h = eval.params().phi_h();
    let scale = c::<T>(2.0) * kt.sqrt();
    let mean = (
        eval.signal_at(state, phi_h)? / scale,
        eval.signal_at(state, phi_h + T::FRAC_PI_2())? / scale,
    );
    let mut rows = [[T::zero(); 3]; 3];
    let mut rhs = [T::zero(); 3];
    for (k, &a) in angles.iter().enumerate() {
        let (s, co) = a.sin_cos();
        rows[k] = [co * co, c::<T>(2.0) * co * s, s * s];
        rhs[k] = eval.noise_at(state, phi_h + a)? / (c::<T>(4.0) * kt);
    }
    let [dxx, dxy, dyy] = solve3(rows, rhs)?;
    GaussianState2D::new(mean, [[dxx, dxy], [dxy, dyy]])
}

#[allow(clippy::needless_range_loop)]
fn solve3<T: Real>(mut a: [[T; 3]; 3], mut b: [T; 3]) -> Result<[T; 3]> {
    for col in 0..3 {
        let piv = (col..3)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap_or(std::cmp::Ordering::Equal))
            .unwrap_or(col);
        if a[piv][col].abs() < c(1e-12) {
            return Err(ReadoutError::invalid("angles", "probe angles must be distinct modulo pi"));
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] = a[row][k] - f * a[col][k];
            }
            b[row] = b[row] - f * b[col];
        }
    }
    let mut x = [T::zero(); 3];
    for row in (0..3).rev() {
        let mut acc = b[row];
        for k in row + 1..3 {
            acc = acc - a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Ok(x)
}

/// Wigner function sampled on a regular grid; `values` is row-major with y outer, x inner.
#[derive(Clone, Debug, PartialEq)]
pub struct WignerGrid<T> {
    pub xs: Vec<T>,
    pub ys: Vec<T>,
    pub values: Vec<T>,
}

impl<T: Real> WignerGrid<T> {
    pub fn at(&self, ix: usize, iy: usize) -> T {
        self.values[iy * self.xs.len() + ix]
    }

    /// Riemann sum Σ W ΔX ΔY.
    pub fn integral(&self) -> T {
        let dx = (self.xs[self.xs.len() - 1] - self.xs[0]) / c::<T>((self.xs.len() - 1) as f64);
        let dy = (self.ys[self.ys.len() - 1] - self.ys[0]) / c::<T>((self.ys.len() - 1) as f64);
        self.values.iter().fold(T::zero(), |s, &v| s + v) * dx * dy
    }
}

pub const MIN_RESOLUTION: usize = 16;

pub fn wigner_grid<T: Real>(state: &GaussianState2D<T>, x_range: (T, T), y_range: (T, T), resolution: usize) -> Result<WignerGrid<T>> {
    if resolution < MIN_RESOLUTION {
        return Err(ReadoutError::invalid("resolution", format!("must be at least {MIN_RESOLUTION}")));
    }
    let finite = [x_range.0, x_range.1, y_range.0, y_range.1].iter().all(|v| v.is_finite());
    if !finite || !(x_range.1 > x_range.0) || !(y_range.1 > y_range.0) {
        return Err(ReadoutError::invalid("window", "ranges must be finite and increasing"));
    }
    if !(state.det() > T::zero()) {
        return Err(ReadoutError::SingularCovariance);
    }
    let axis = |(lo, hi): (T, T)| -> Vec<T> {
        (0..resolution).map(|k| lo + (hi - lo) * c::<T>(k as f64 / (resolution - 1) as f64)).collect()
    };
    let xs = axis(x_range);
    let ys = axis(y_range);
    let values = ys
        .par_iter()
        .flat_map_iter(|&y| xs.iter().map(move |&x| state.wigner(x, y)))
        .collect();
    Ok(WignerGrid { xs, ys, values })
}

/// Window of ±`sigmas` standard deviations around the mean in each quadrature.
pub fn window<T: Real>(state: &GaussianState2D<T>, sigmas: T) -> ((T, T), (T, T)) {
    let sx = state.cov[0][0].sqrt() * sigmas;
    let sy = state.cov[1][1].sqrt() * sigmas;
    ((state.mean.0 - sx, state.mean.0 + sx), (state.mean.1 - sy, state.mean.1 + sy))
}
