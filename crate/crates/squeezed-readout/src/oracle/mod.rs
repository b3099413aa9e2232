//! Brute-force moments of the integrated homodyne record from the linear Langevin dynamics.
//!
//! The interval [0, τ] is cut into K bins, the white-noise input of each bin is replaced by a
//! single Gaussian mode and the cavity is propagated exactly across a bin with the 2×2 matrix
//! exponential of the drift. M is then a linear form over the initial cavity mode and the K bin
//! modes; its mean and symmetrised variance follow exactly. The error is O(Δt²), removed to
//! leading order by Richardson extrapolation over K and 2K.

pub mod linalg;

use num_complex::Complex;

use crate::combined::{input_noise_budget, resolve_combined};
use crate::error::{ReadoutError, Result};
use crate::ics::ics_stability;
use crate::readout::{QubitState, ReadoutParams};
use crate::scalar::{c, Real};
use crate::scheme::SchemeConfig;

use linalg::{apply, dot, eigenvalues, expm, gauss_legendre, row_apply, Mat2, Row2};

/// Linear cavity dynamics x' = A x − √κ ξ with x = (a, a†), plus the output map to the lab frame.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearReadoutSystem<T> {
    pub drift: Mat2<T>,
    /// Constant coherent input ⟨ξ⟩ in the working frame.
    pub input_mean: Complex<T>,
    pub n_in: T,
    pub m_in: Complex<T>,
    pub init_mean: Complex<T>,
    /// ⟨a†a⟩ at t = 0.
    pub init_n: T,
    /// ⟨aa⟩ at t = 0.
    pub init_m: Complex<T>,
    /// Lab-frame output a_out = u b_out + v b_out†.
    pub output_u: Complex<T>,
    pub output_v: Complex<T>,
    pub homodyne_angle: T,
    pub kappa: T,
    pub tau: T,
}

impl<T: Real> LinearReadoutSystem<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.kappa > T::zero()) || !(self.tau > T::zero()) {
            return Err(ReadoutError::invalid("kappa", "kappa and tau must be positive"));
        }
        let (l1, l2) = eigenvalues(&self.drift);
        let slack = c::<T>(1e-12) * self.kappa;
        if l1.re > slack || l2.re > slack {
            return Err(ReadoutError::Unstable(format!(
                "drift eigenvalue with positive real part ({:e})",
                l1.re.max(l2.re).to_f64().unwrap_or(f64::NAN)
            )));
        }
        let tol = c::<T>(1e-9) * (T::one() + self.n_in);
        if !(self.n_in >= T::zero()) || self.m_in.norm() > (self.n_in * (self.n_in + T::one())).sqrt() + tol {
            return Err(ReadoutError::invalid("m_in", "requires |M_in|^2 <= N_in (N_in + 1)"));
        }
        let sympl = self.output_u.norm_sqr() - self.output_v.norm_sqr();
        if (sympl - T::one()).abs() > c(1e-9) {
            return Err(ReadoutError::invalid("output_transform", "requires |u|^2 - |v|^2 = 1"));
        }
        Ok(())
    }

    /// Homodyne row c with Z_out = c b_out + c* b_out†.
    fn homodyne_row(&self) -> Row2<T> {
        let w = Complex::from_polar(T::one(), -self.homodyne_angle) * self.output_u
            + Complex::from_polar(T::one(), self.homodyne_angle) * self.output_v.conj();
        [w, w.conj()]
    }

    /// Largest oscillation rate in the drift, used for the default bin count.
    pub fn max_rate(&self) -> T {
        self.drift[0][0].im.abs().max(self.drift[1][1].im.abs()) + self.drift[0][1].norm().max(self.drift[1][0].norm())
    }

    /// max(4096, ⌈64(|ω| + κ)τ⌉).
    pub fn default_steps(&self) -> usize {
        let k = (c::<T>(64.0) * (self.max_rate() + self.kappa) * self.tau).ceil().to_usize().unwrap_or(usize::MAX);
        k.max(4096)
    }
}

/// Builds the working-frame system for one qubit state of a scheme.
pub fn build_system<T: Real>(scheme: &SchemeConfig<T>, params: &ReadoutParams<T>, state: QubitState) -> Result<LinearReadoutSystem<T>> {
    let kappa = params.kappa();
    let half_k = kappa * c(0.5);
    let sigma: T = state.sigma();
    let i = Complex::<T>::i();
    let zero = Complex::new(T::zero(), T::zero());
    let one = Complex::new(T::one(), T::zero());
    let tone = Complex::from_polar(params.alpha_in(), params.phi_in());
    let diag = |w: T| -> Mat2<T> { [[Complex::new(-half_k, -w), zero], [zero, Complex::new(-half_k, w)]] };
    let base = LinearReadoutSystem {
        drift: diag(sigma * params.chi()),
        input_mean: tone,
        n_in: T::zero(),
        m_in: zero,
        init_mean: zero,
        init_n: T::zero(),
        init_m: zero,
        output_u: one,
        output_v: zero,
        homodyne_angle: params.phi_h(),
        kappa,
        tau: params.tau(),
    };
    let sys = match scheme {
        SchemeConfig::Standard => base,
        SchemeConfig::Ies(cfg) => {
            let r = cfg.r();
            let n = r.sinh().powi(2);
            let m = Complex::from_polar(c::<T>(0.5) * (c::<T>(2.0) * r).sinh(), cfg.varphi());
            LinearReadoutSystem { n_in: n, m_in: m, init_n: n, init_m: m, ..base }
        }
        SchemeConfig::Ics(cfg) => {
            let s = ics_stability(params, cfg);
            if !s.is_stable() {
                return Err(ReadoutError::Unstable(s.reason().unwrap_or_default().into()));
            }
            let om = cfg.omega_2ph();
            let th = cfg.theta();
            let two = c::<T>(2.0);
            let mut drift = diag(sigma * params.chi());
            drift[0][1] = -i * Complex::from_polar(two * om, th);
            drift[1][0] = i * Complex::from_polar(two * om, -th);
            let den = kappa * kappa - c::<T>(16.0) * om * om;
            let init_n = c::<T>(8.0) * om * om / den;
            let init_m = -i * Complex::from_polar(two * kappa * om / den, th);
            LinearReadoutSystem { drift, init_n, init_m, ..base }
        }
        SchemeConfig::Combined(cfg) => {
            let res = resolve_combined(params, cfg)?;
            let rc = res.r_c;
            let (n, m) = input_noise_budget(rc, cfg.r, cfg.theta, res.varphi);
            let beta_in = tone * rc.cosh() + Complex::from_polar(rc.sinh(), cfg.theta) * tone.conj();
            LinearReadoutSystem {
                drift: diag(res.disp.omega(state)),
                input_mean: beta_in,
                n_in: n.max(T::zero()),
                m_in: m,
                output_u: Complex::from(rc.cosh()),
                output_v: -Complex::from_polar(rc.sinh(), cfg.theta),
                ..base
            }
        }
    };
    sys.validate()?;
    Ok(sys)
}

/// Per-bin propagator Φ = e^{AΔt}, J = ∫₀^Δt e^{As} ds and K₂ = ∫₀^Δt (Δt − u) e^{Au} du.
struct BinMaps<T> {
    phi: Mat2<T>,
    j: Mat2<T>,
    k2: Mat2<T>,
}

const GL_NODES: usize = 16;

fn bin_maps<T: Real>(a: &Mat2<T>, dt: T) -> BinMaps<T> {
    let mut j = linalg::zero();
    let mut k2 = linalg::zero();
    let half = dt * c(0.5);
    for (x, w) in gauss_legendre(GL_NODES) {
        let u = half * (c::<T>(x) + T::one());
        let e = expm(a, u);
        j = linalg::add(&j, &linalg::scale(&e, Complex::from(half * c(w))));
        k2 = linalg::add(&k2, &linalg::scale(&e, Complex::from(half * c::<T>(w) * (dt - u))));
    }
    BinMaps { phi: expm(a, dt), j, k2 }
}

/// Coefficients of the functional √κ∫₀^τ (w·x_out) dt on the initial mode and on each bin mode.
/// The bin coefficients are streamed to `on_bin` from the last bin backwards.
fn backward_pass<T: Real>(sys: &LinearReadoutSystem<T>, maps: &BinMaps<T>, w: &Row2<T>, steps: usize, mut on_bin: impl FnMut(Row2<T>)) -> Row2<T> {
    let kappa = sys.kappa;
    let dt = sys.tau / c::<T>(steps as f64);
    let sk = kappa.sqrt();
    let sdt = dt.sqrt();
    let direct = [w[0] * (sk * sdt), w[1] * (sk * sdt)];
    let wk2 = row_apply(w, &maps.k2);
    let wj = row_apply(w, &maps.j);
    let k32 = kappa * sk / sdt;
    let mut rho: Row2<T> = [Complex::from(T::zero()); 2];
    for _ in 0..steps {
        let rj = row_apply(&rho, &maps.j);
        let g = [
            direct[0] - wk2[0] * k32 - rj[0] * (sk / sdt),
            direct[1] - wk2[1] * k32 - rj[1] * (sk / sdt),
        ];
        on_bin(g);
        let rp = row_apply(&rho, &maps.phi);
        rho = [wj[0] * kappa + rp[0], wj[1] * kappa + rp[1]];
    }
    rho
}

fn symmetrised<T: Real>(l: &Row2<T>, n: T, m: Complex<T>) -> T {
    (l[0] * l[0] * m + l[1] * l[1] * m.conj() + l[0] * l[1] * c::<T>(2.0) * (n + c(0.5))).re
}

/// Mean and variance of M at a fixed number of bins.
pub fn oracle_raw<T: Real>(sys: &LinearReadoutSystem<T>, steps: usize) -> (T, T) {
    let kappa = sys.kappa;
    let dt = sys.tau / c::<T>(steps as f64);
    let maps = bin_maps(&sys.drift, dt);
    let row = sys.homodyne_row();
    let sk = kappa.sqrt();
    let xi = [sys.input_mean, sys.input_mean.conj()];
    let j_xi = apply(&maps.j, &xi);
    let k2_xi = apply(&maps.k2, &xi);
    let direct = dot(&row, &xi) * dt;
    let mut x = [sys.init_mean, sys.init_mean.conj()];
    let mut mean = Complex::from(T::zero());
    for _ in 0..steps {
        let jx = apply(&maps.j, &x);
        let integ = [jx[0] - k2_xi[0] * sk, jx[1] - k2_xi[1] * sk];
        mean = mean + (direct + dot(&row, &integ) * sk) * sk;
        let px = apply(&maps.phi, &x);
        x = [px[0] - j_xi[0] * sk, px[1] - j_xi[1] * sk];
    }
    let mut var = T::zero();
    let init = backward_pass(sys, &maps, &row, steps, |g| var = var + symmetrised(&g, sys.n_in, sys.m_in));
    var = var + symmetrised(&init, sys.init_n, sys.init_m);
    (mean.re, var)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleResult<T> {
    /// Values at the finer resolution 2K.
    pub mean_m: T,
    pub var_m: T,
    /// Finer bin count 2K.
    pub steps: usize,
    /// (4 f(2K) − f(K)) / 3 for the mean and the variance.
    pub richardson: (T, T),
    /// |f(2K) − f(K)| for the mean and the variance.
    pub residual: (T, T),
}

pub const MIN_STEPS: usize = 64;
pub const MAX_STEPS: usize = 1 << 17;

/// Evaluates at K and 2K bins and extrapolates.
pub fn oracle_moments<T: Real>(sys: &LinearReadoutSystem<T>, steps: usize) -> Result<OracleResult<T>> {
    if steps < MIN_STEPS {
        return Err(ReadoutError::invalid("steps", format!("must be at least {MIN_STEPS}")));
    }
    sys.validate()?;
    let (m1, v1) = oracle_raw(sys, steps);
    let (m2, v2) = oracle_raw(sys, 2 * steps);
    let three = c::<T>(3.0);
    let four = c::<T>(4.0);
    Ok(OracleResult {
        mean_m: m2,
        var_m: v2,
        steps: 2 * steps,
        richardson: ((four * m2 - m1) / three, (four * v2 - v1) / three),
        residual: ((m2 - m1).abs(), (v2 - v1).abs()),
    })
}

/// Doubles K from the default until the raw K/2K relative change is below `tol`.
///
/// Fails with non-convergence if the change still exceeds 10·tol at K = 2¹⁷.
pub fn oracle_to_tolerance<T: Real>(sys: &LinearReadoutSystem<T>, tol: T) -> Result<OracleResult<T>> {
    let mut k = sys.default_steps().min(MAX_STEPS);
    loop {
        let res = oracle_moments(sys, k)?;
        let scale_m = res.mean_m.abs().max(c(1e-12));
        let change = (res.residual.0 / scale_m).max(res.residual.1 / res.var_m.abs().max(c(1e-300)));
        if change <= tol {
            return Ok(res);
        }
        if k >= MAX_STEPS {
            if change <= tol * c(10.0) {
                return Ok(res);
            }
            return Err(ReadoutError::NonConvergence { steps: res.steps, change: change.to_f64().unwrap_or(f64::NAN) });
        }
        k *= 2;
    }
}

/// [Â, Â†] for Â = τ^{-1/2} ∫₀^τ a_out dt, extrapolated from K and 2K bins.
pub fn commutator_check<T: Real>(sys: &LinearReadoutSystem<T>, steps: usize) -> T {
    let (a, b) = (commutator_raw(sys, steps), commutator_raw(sys, 2 * steps));
    (c::<T>(4.0) * b - a) / c::<T>(3.0)
}

fn commutator_raw<T: Real>(sys: &LinearReadoutSystem<T>, steps: usize) -> T {
    let dt = sys.tau / c::<T>(steps as f64);
    let maps = bin_maps(&sys.drift, dt);
    let s = T::one() / (sys.kappa * sys.tau).sqrt();
    let row = [sys.output_u * s, sys.output_v * s];
    let mut total = T::zero();
    let init = backward_pass(sys, &maps, &row, steps, |g| total = total + g[0].norm_sqr() - g[1].norm_sqr());
    total + init[0].norm_sqr() - init[1].norm_sqr()
}

/// Per-state Richardson-extrapolated moments of a scheme.
pub fn scheme_oracle<T: Real>(scheme: &SchemeConfig<T>, params: &ReadoutParams<T>, steps: Option<usize>) -> Result<[OracleResult<T>; 2]> {
    let run = |s: QubitState| -> Result<OracleResult<T>> {
        let sys = build_system(scheme, params, s)?;
        oracle_moments(&sys, steps.unwrap_or_else(|| sys.default_steps()))
    };
    Ok([run(QubitState::Up)?, run(QubitState::Down)?])
}
