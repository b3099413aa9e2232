//! Simultaneous injected and intracavity squeezing.
//!
//! The two-photon drive is diagonalised by a Bogoliubov mode β of frequency ω_sq whose
//! dispersive coupling χ_sq grows exponentially with the squeezing. Matching the injected
//! squeezing to the Bogoliubov transformation (r_c = r, θ − φ = π) removes the thermal and
//! two-photon noise seen by β.

use num_complex::Complex;

use crate::error::{ReadoutError, Result};
use crate::optimize::bisect;
use crate::readout::{psi_from_rate, MeasurementMoments, QubitState, ReadoutParams};
use crate::scalar::{c, wrap_angle, Real};

/// Bogoliubov diagonalisation of a two-photon-driven cavity detuned by Δ_c from half the pump.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BogoliubovFrame<T> {
    pub delta_c: T,
    pub omega_2ph: T,
    pub r_c: T,
    pub omega_sq: T,
    pub theta: T,
}

impl<T: Real> BogoliubovFrame<T> {
    pub fn new(delta_c: T, omega_2ph: T, theta: T) -> Result<Self> {
        if !(omega_2ph >= T::zero()) {
            return Err(ReadoutError::invalid("omega_2ph", "must be non-negative"));
        }
        let two_omega = c::<T>(2.0) * omega_2ph;
        if !(delta_c > two_omega) {
            return Err(ReadoutError::invalid("delta_c", "requires delta_c > 2*omega_2ph"));
        }
        Ok(Self {
            delta_c,
            omega_2ph,
            r_c: c::<T>(0.5) * (two_omega / delta_c).atanh(),
            omega_sq: (delta_c * delta_c - two_omega * two_omega).sqrt(),
            theta: wrap_angle(theta),
        })
    }

    /// Frame with prescribed r_c and ω_sq: Δ_c = ω_sq cosh 2r_c, Ω = ½ω_sq sinh 2r_c.
    pub fn from_squeezing(r_c: T, omega_sq: T, theta: T) -> Result<Self> {
        if !(r_c >= T::zero()) || !(omega_sq > T::zero()) {
            return Err(ReadoutError::invalid("r_c", "requires r_c >= 0 and omega_sq > 0"));
        }
        let two_r = c::<T>(2.0) * r_c;
        Self::new(omega_sq * two_r.cosh(), omega_sq * two_r.sinh() * c(0.5), theta)
    }
}

/// χ_sq = χ[cosh r + sinh²r / (cosh r + 2ω_sq ε/g)] with χ = gε.
pub fn chi_sq<T: Real>(g: T, r: T, omega_sq: T, epsilon: T) -> Result<T> {
    if !epsilon.is_finite() {
        return Err(ReadoutError::Resonance);
    }
    let chi = g * epsilon;
    let ch = r.cosh();
    Ok(chi * (ch + r.sinh().powi(2) / (ch + c::<T>(2.0) * omega_sq * epsilon / g)))
}

/// The same coupling written through the qubit detuning: g²[cosh²r/(Δ_q − ω_sq) + sinh²r/(Δ_q + ω_sq)].
pub fn chi_sq_from_detuning<T: Real>(g: T, r: T, delta_q: T, omega_sq: T) -> Result<T> {
    if delta_q == omega_sq {
        return Err(ReadoutError::Resonance);
    }
    Ok(g * g * (r.cosh().powi(2) / (delta_q - omega_sq) + r.sinh().powi(2) / (delta_q + omega_sq)))
}

/// Dispersive quantities of the Bogoliubov mode, derived from the bare χ, ε, ω_sq and r.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DispersiveParams<T> {
    pub g: T,
    pub delta_q: T,
    pub epsilon: T,
    pub chi: T,
    pub chi_sq: T,
    pub psi_sq: T,
    pub omega_sq: T,
    pub omega_up: T,
    pub omega_down: T,
    pub psi_up: T,
    pub psi_down: T,
}

/// n_c = 1/(4ε²), evaluated as (1/2ε)² so that ε = 1/20 gives exactly 100.
pub fn critical_photons<T: Real>(epsilon: T) -> T {
    (T::one() / (c::<T>(2.0) * epsilon)).powi(2)
}

/// ε above which the dispersive approximation is doubtful.
pub const EPSILON_WARNING: f64 = 0.25;

impl<T: Real> DispersiveParams<T> {
    pub fn derive(chi: T, epsilon: T, omega_sq: T, r: T, kappa: T) -> Result<Self> {
        if !(epsilon > T::zero()) {
            return Err(ReadoutError::invalid("epsilon", "must be positive"));
        }
        if !(omega_sq > T::zero()) {
            return Err(ReadoutError::invalid("omega_sq", "must be positive"));
        }
        if !(chi > T::zero()) {
            return Err(ReadoutError::invalid("chi", "must be positive for the combined scheme"));
        }
        let g = chi / epsilon;
        let delta_q = omega_sq + g * r.cosh() / epsilon;
        let chi_sq = chi_sq(g, r, omega_sq, epsilon)?;
        let omega_up = omega_sq + chi_sq;
        let omega_down = omega_sq - chi_sq;
        Ok(Self {
            g,
            delta_q,
            epsilon,
            chi,
            chi_sq,
            psi_sq: psi_from_rate(chi_sq, kappa),
            omega_sq,
            omega_up,
            omega_down,
            psi_up: psi_from_rate(omega_up, kappa),
            psi_down: psi_from_rate(omega_down, kappa),
        })
    }

    pub fn epsilon_warning(&self) -> bool {
        self.epsilon > c(EPSILON_WARNING)
    }

    /// Critical photon number n_c = 1/(4ε²).
    pub fn critical_photons(&self) -> T {
        critical_photons(self.epsilon)
    }

    pub fn omega(&self, state: QubitState) -> T {
        match state {
            QubitState::Up => self.omega_up,
            QubitState::Down => self.omega_down,
        }
    }

    pub fn psi(&self, state: QubitState) -> T {
        match state {
            QubitState::Up => self.psi_up,
            QubitState::Down => self.psi_down,
        }
    }
}

/// Thermal occupation 𝒩 and two-photon correlation ℳ of the input seen by the β mode.
pub fn input_noise_budget<T: Real>(r_c: T, r: T, theta: T, varphi: T) -> (T, Complex<T>) {
    let half = c::<T>(0.5);
    let two = c::<T>(2.0);
    let (chc2, shc2) = (r_c.cosh().powi(2), r_c.sinh().powi(2));
    let (ch2, sh2) = (r.cosh().powi(2), r.sinh().powi(2));
    let (s2c, s2) = ((two * r_c).sinh(), (two * r).sinh());
    let n = chc2 * sh2 + shc2 * ch2 + half * (theta - varphi).cos() * s2c * s2;
    let m = (Complex::from_polar(chc2 * s2, varphi)
        + Complex::from_polar(s2c * sh2, theta)
        + Complex::from_polar(s2c * ch2, theta)
        + Complex::from_polar(shc2 * s2, two * theta - varphi))
        * half;
    (n, m)
}

/// Matched noise κτ[cosh 2r − cos(2φ_h − θ) sinh 2r], the same for both qubit states.
pub fn combined_noise<T: Real>(params: &ReadoutParams<T>, r: T, theta: T) -> T {
    let two_r = c::<T>(2.0) * r;
    params.kappa_tau() * (two_r.cosh() - (c::<T>(2.0) * params.phi_h() - theta).cos() * two_r.sinh())
}

fn require_tone_phase<T: Real>(params: &ReadoutParams<T>, theta: T) -> Result<()> {
    if wrap_angle(c::<T>(2.0) * params.phi_in() - theta).abs() > c(1e-9) {
        return Err(ReadoutError::invalid("phi_in", "the combined scheme requires 2*phi_in = theta"));
    }
    Ok(())
}

/// Parameters with φ_in = φ_h = θ/2: tone on the amplified quadrature, homodyne on the squeezed one.
pub fn aligned_params<T: Real>(params: &ReadoutParams<T>, theta: T) -> Result<ReadoutParams<T>> {
    let half = wrap_angle(theta) * c(0.5);
    params.with_phi_in(half)?.with_phi_h(half)
}

/// ⟨M⟩ for one qubit state; requires 2φ_in = θ.
pub fn combined_signal<T: Real>(
    params: &ReadoutParams<T>,
    disp: &DispersiveParams<T>,
    r: T,
    theta: T,
    state: QubitState,
) -> Result<T> {
    require_tone_phase(params, theta)?;
    let kt = params.kappa_tau();
    let (two, four) = (c::<T>(2.0), c::<T>(4.0));
    let psi = disp.psi(state);
    let wt = disp.omega(state) * params.tau();
    let plus = two * psi + params.phi_h() - params.phi_in();
    let minus = two * psi - params.phi_h() - params.phi_in();
    let (ch, sh) = (r.cosh(), r.sinh());
    let steady = (two - kt + two * (two * psi).cos()) * (plus.cos() * ch - (minus + theta).cos() * sh);
    let transient = four
        * (-kt / two).exp()
        * psi.cos().powi(2)
        * ((plus + wt).cos() * ch - (minus + theta + wt).cos() * sh);
    Ok(two * params.alpha_in() * r.exp() / params.kappa().sqrt() * (steady - transient))
}

fn parallel_raw<T: Real>(params: &ReadoutParams<T>, omega_up: T, omega_down: T) -> T {
    let kappa = params.kappa();
    let kt = params.kappa_tau();
    let tau = params.tau();
    let two = c::<T>(2.0);
    let (pp, pm) = (psi_from_rate(omega_up, kappa), psi_from_rate(omega_down, kappa));
    let (wp, wm) = (omega_up * tau, omega_down * tau);
    let steady = (two - kt + two * (two * pm).cos() + two * (two * pp).cos()) * ((two * pm).cos() - (two * pp).cos());
    let transient = (-kt / two).exp()
        * (wm.cos() + two * (two * pm + wm).cos() + (c::<T>(4.0) * pm + wm).cos()
            - c::<T>(4.0) * pp.cos().powi(2) * (two * pp + wp).cos());
    two * params.alpha_in() / kappa.sqrt() * (steady - transient)
}

fn perp_raw<T: Real>(params: &ReadoutParams<T>, omega_up: T, omega_down: T, r: T) -> T {
    let kappa = params.kappa();
    let kt = params.kappa_tau();
    let tau = params.tau();
    let two = c::<T>(2.0);
    let (pp, pm) = (psi_from_rate(omega_up, kappa), psi_from_rate(omega_down, kappa));
    let (wp, wm) = (omega_up * tau, omega_down * tau);
    let steady = (two - kt + two * (two * pm).cos()) * (two * pm).sin() - (two - kt + two * (two * pp).cos()) * (two * pp).sin();
    let transient = (-kt / two).exp()
        * (wm.sin() + two * (two * pm + wm).sin() + (c::<T>(4.0) * pm + wm).sin()
            - c::<T>(4.0) * pp.cos().powi(2) * (two * pp + wp).sin());
    two * params.alpha_in() * (two * r).exp() / kappa.sqrt() * (steady - transient)
}

/// Separation along the homodyne (squeezed) quadrature and along the antisqueezed one.
pub fn separation_components<T: Real>(params: &ReadoutParams<T>, disp: &DispersiveParams<T>, r: T) -> (T, T) {
    separation_components_at(params, disp.omega_up, disp.omega_down, r)
}

/// [`separation_components`] for explicitly given state-dependent frequencies ω_±1.
pub fn separation_components_at<T: Real>(params: &ReadoutParams<T>, omega_up: T, omega_down: T, r: T) -> (T, T) {
    (
        parallel_raw(params, omega_up, omega_down).abs(),
        perp_raw(params, omega_up, omega_down, r).abs(),
    )
}

/// Long-time root of the perpendicular separation, ω = (κ/2) sec ψ_sq(ω), by fixed-point iteration.
fn long_time_omega<T: Real>(kappa: T, chi: T, epsilon: T, r: T) -> Result<T> {
    let mut w = kappa * c(0.5);
    for _ in 0..200 {
        let cs = chi_sq(chi / epsilon, r, w, epsilon)?;
        let next = kappa * c::<T>(0.5) * (T::one() + (c::<T>(2.0) * cs / kappa).powi(2)).sqrt();
        if (next - w).abs() <= c::<T>(1e-14) * next {
            return Ok(next);
        }
        w = next;
    }
    Ok(w)
}

const SCAN_POINTS: usize = 4096;

/// ω_sq at which the perpendicular separation vanishes.
///
/// Scans a geometric grid from just below the long-time value (κ/2)sec ψ_sq up to
/// max(10, 5/κτ)·κ, takes the first sign change and bisects it to floating-point resolution.
pub fn solve_omega_sq<T: Real>(params: &ReadoutParams<T>, chi: T, epsilon: T, r: T) -> Result<T> {
    let kappa = params.kappa();
    let lo = long_time_omega(kappa, chi, epsilon, r)? * c(0.99);
    let hi = kappa * c::<T>(10.0).max(c::<T>(5.0) / params.kappa_tau());
    let hi = hi.max(lo * c(2.0));
    let perp = |w: T| -> T {
        match DispersiveParams::derive(chi, epsilon, w, r, kappa) {
            Ok(d) => perp_raw(params, d.omega_up, d.omega_down, r),
            Err(_) => T::nan(),
        }
    };
    let ratio = (hi / lo).ln() / c::<T>((SCAN_POINTS - 1) as f64);
    let mut a = lo;
    let mut fa = perp(a);
    for k in 1..SCAN_POINTS {
        let b = lo * (ratio * c::<T>(k as f64)).exp();
        let fb = perp(b);
        if fa == T::zero() {
            return Ok(a);
        }
        if fa * fb < T::zero() {
            return bisect(perp, a, b, T::zero());
        }
        a = b;
        fa = fb;
    }
    Err(ReadoutError::NoBracket {
        lo: (lo / kappa).to_f64().unwrap_or(f64::NAN),
        hi: (hi / kappa).to_f64().unwrap_or(f64::NAN),
    })
}

/// ⟨β†β⟩(t) for a β-vacuum start with |⟨β_in⟩| = α_in e^r.
pub fn beta_photon_number<T: Real>(
    params: &ReadoutParams<T>,
    disp: &DispersiveParams<T>,
    r: T,
    state: QubitState,
    t: T,
) -> T {
    let kappa = params.kappa();
    let amp2 = (params.alpha_in() * r.exp()).powi(2);
    c::<T>(4.0) * amp2 / kappa
        * disp.psi(state).cos().powi(2)
        * (T::one() + (-kappa * t).exp()
            - c::<T>(2.0) * (-kappa * t * c(0.5)).exp() * (disp.omega(state) * t).cos())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TimeLimit {
    Short,
    Long,
}

/// Limiting SNR relative to the unsqueezed readout: 0.81 e^{2r} for κτ → 0 and
/// (sin ψ_sq / sin 2ψ) e^r for κτ → ∞.
pub fn asymptotic_snr<T: Real>(
    limit: TimeLimit,
    params: &ReadoutParams<T>,
    disp: &DispersiveParams<T>,
    r: T,
    snr_std: T,
) -> T {
    match limit {
        TimeLimit::Short => c::<T>(0.81) * (c::<T>(2.0) * r).exp() * snr_std,
        TimeLimit::Long => {
            let psi = psi_from_rate(params.chi(), params.kappa());
            disp.psi_sq.sin() / (c::<T>(2.0) * psi).sin() * r.exp() * snr_std
        }
    }
}

/// Input statistics of the β mode when the injected squeezing misses the matching conditions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MismatchParams<T> {
    pub delta_r: T,
    pub delta_p: T,
    pub n_thermal: T,
    pub m_corr: Complex<T>,
    pub r0: T,
    pub phi0: T,
}

impl<T: Real> MismatchParams<T> {
    /// r_c = r + δ_r and φ = θ − π − δ_p.
    pub fn new(r: T, theta: T, delta_r: T, delta_p: T) -> Self {
        let r_c = r + delta_r;
        let varphi = theta - T::PI() - delta_p;
        let (n, m) = input_noise_budget(r_c, r, theta, varphi);
        let n = n.max(T::zero());
        Self { delta_r, delta_p, n_thermal: n, m_corr: m, r0: n.sqrt().asinh(), phi0: m.arg() }
    }
}

/// Reading of the hyperbolic-looking cos(θ − φ) factor in the R₁ term.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum R1Form {
    /// Angle cosine; agrees with the Gaussian oracle.
    #[default]
    Cos,
    /// Hyperbolic cosine of the phase difference, kept for comparison only.
    Cosh,
}

/// Noise R₀ + R₁ + R₂ with mismatched injected squeezing, at 2φ_h = θ.
#[allow(clippy::too_many_arguments)]
pub fn mismatch_noise<T: Real>(
    params: &ReadoutParams<T>,
    disp: &DispersiveParams<T>,
    r: T,
    r_c: T,
    theta: T,
    varphi: T,
    state: QubitState,
    form: R1Form,
) -> Result<T> {
    if wrap_angle(c::<T>(2.0) * params.phi_h() - theta).abs() > c(1e-9) {
        return Err(ReadoutError::invalid("phi_h", "mismatch noise is defined at 2*phi_h = theta"));
    }
    let kt = params.kappa_tau();
    let (one, two) = (T::one(), c::<T>(2.0));
    let psi = disp.psi(state);
    let wt = disp.omega(state) * params.tau();
    let (n, m) = input_noise_budget(r_c, r, theta, varphi);
    let r0 = n.max(T::zero()).sqrt().asinh();
    let phi0 = m.arg();
    let r_zero = kt * ((two * r).cosh() + (varphi - theta).cos() * (two * r).sinh());
    let h = match form {
        R1Form::Cos => (theta - varphi).cos(),
        R1Form::Cosh => (theta - varphi).cosh(),
    };
    let e1 = (-kt).exp();
    let e2 = (-kt / two).exp();
    // e^{−κτ/2}[cosh(κτ/2) − cos ωτ] without overflow
    let window = (one + e1) / two - e2 * wt.cos();
    let r_one = c::<T>(8.0) * (-two * r_c).exp() * psi.cos().powi(2) * window
        * (one - (two * r_c).cosh() * (two * r).cosh() - h * (two * r_c).sinh() * (two * r).sinh());
    let vt = |k: f64| c::<T>(k) * psi + theta - phi0;
    let r_two = (-two * r_c).exp()
        * (two * r0).sinh()
        * psi.cos()
        * ((one - two * kt) * vt(1.0).cos() - two * (one - kt) * vt(3.0).cos() - c::<T>(3.0) * vt(5.0).cos()
            + c::<T>(8.0) * e2 * psi.cos() * (vt(4.0) + wt).cos()
            - c::<T>(4.0) * e1 * psi.cos().powi(2) * (vt(3.0) + two * wt).cos());
    Ok(r_zero + r_one + r_two)
}

/// Combined-scheme configuration. φ = θ − π − δ_p and r_c = r + δ_r, so zero mismatch is matched.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CombinedConfig<T> {
    pub r: T,
    pub theta: T,
    pub epsilon: T,
    /// `None` solves for the ω_sq that zeroes the perpendicular separation.
    pub omega_sq: Option<T>,
    pub delta_r: T,
    pub delta_p: T,
}

impl<T: Real> CombinedConfig<T> {
    pub fn matched(r: T, theta: T) -> Self {
        Self { r, theta: wrap_angle(theta), epsilon: c(0.05), omega_sq: None, delta_r: T::zero(), delta_p: T::zero() }
    }

    pub fn with_epsilon(mut self, epsilon: T) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_omega_sq(mut self, omega_sq: T) -> Self {
        self.omega_sq = Some(omega_sq);
        self
    }

    pub fn with_mismatch(mut self, delta_r: T, delta_p: T) -> Self {
        self.delta_r = delta_r;
        self.delta_p = delta_p;
        self
    }

    pub fn is_matched(&self) -> bool {
        self.delta_r == T::zero() && self.delta_p == T::zero()
    }

    pub fn r_c(&self) -> T {
        self.r + self.delta_r
    }

    pub fn varphi(&self) -> T {
        wrap_angle(self.theta - T::PI() - self.delta_p)
    }

    fn validate(&self) -> Result<()> {
        if !(self.r >= T::zero()) || !self.r.is_finite() {
            return Err(ReadoutError::invalid("r", "must be finite and non-negative"));
        }
        if !(self.r_c() >= T::zero()) {
            return Err(ReadoutError::invalid("delta_r", "r + delta_r must be non-negative"));
        }
        if !(self.epsilon > T::zero()) {
            return Err(ReadoutError::invalid("epsilon", "must be positive"));
        }
        Ok(())
    }
}

/// Derived quantities of a combined-scheme evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResolvedCombined<T> {
    pub disp: DispersiveParams<T>,
    pub r_c: T,
    pub varphi: T,
}

/// Fixes ω_sq (solving if needed) and the Bogoliubov-mode couplings, using r_c throughout.
pub fn resolve_combined<T: Real>(params: &ReadoutParams<T>, cfg: &CombinedConfig<T>) -> Result<ResolvedCombined<T>> {
    cfg.validate()?;
    let r_c = cfg.r_c();
    let omega_sq = match cfg.omega_sq {
        Some(w) => w,
        None => solve_omega_sq(params, params.chi(), cfg.epsilon, r_c)?,
    };
    let disp = DispersiveParams::derive(params.chi(), cfg.epsilon, omega_sq, r_c, params.kappa())?;
    Ok(ResolvedCombined { disp, r_c, varphi: cfg.varphi() })
}

pub fn combined_moments<T: Real>(params: &ReadoutParams<T>, cfg: &CombinedConfig<T>) -> Result<MeasurementMoments<T>> {
    let res = resolve_combined(params, cfg)?;
    combined_moments_resolved(params, cfg, &res)
}

pub fn combined_moments_resolved<T: Real>(
    params: &ReadoutParams<T>,
    cfg: &CombinedConfig<T>,
    res: &ResolvedCombined<T>,
) -> Result<MeasurementMoments<T>> {
    let signal = |s| combined_signal(params, &res.disp, res.r_c, cfg.theta, s);
    let noise = |s| {
        if cfg.is_matched() {
            Ok(combined_noise(params, cfg.r, cfg.theta))
        } else {
            mismatch_noise(params, &res.disp, cfg.r, res.r_c, cfg.theta, res.varphi, s, R1Form::Cos)
        }
    };
    Ok(MeasurementMoments {
        signal_up: signal(QubitState::Up)?,
        signal_down: signal(QubitState::Down)?,
        noise_up: noise(QubitState::Up)?,
        noise_down: noise(QubitState::Down)?,
    })
}
