//! Readout with intracavity squeezing generated by a two-photon drive.
//!
//! The closed forms depend on λ = √(χ² − 4Ω²), which is imaginary for χ < 2Ω. They are
//! evaluated in complex arithmetic and projected onto the real axis; every expression
//! is even in λ, so the branch of the square root is irrelevant.

use num_complex::Complex;

use crate::error::{ReadoutError, Result};
use crate::readout::{psi_from_rate, MeasurementMoments, QubitState, ReadoutParams};
use crate::scalar::{c, wrap_angle, Real};

type C<T> = Complex<T>;

/// Two-photon drive: amplitude Ω (rate units) and phase θ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IcsConfig<T> {
    omega_2ph: T,
    theta: T,
}

impl<T: Real> IcsConfig<T> {
    pub fn new(omega_2ph: T, theta: T) -> Result<Self> {
        if !(omega_2ph >= T::zero()) || !omega_2ph.is_finite() {
            return Err(ReadoutError::invalid("omega_2ph", "must be finite and non-negative"));
        }
        if !theta.is_finite() {
            return Err(ReadoutError::invalid("theta", "must be finite"));
        }
        Ok(Self { omega_2ph, theta: wrap_angle(theta) })
    }

    /// Drive amplitude producing output squeezing r, see [`omega_from_r`].
    pub fn from_squeezing(kappa: T, r: T, theta: T) -> Result<Self> {
        Self::new(omega_from_r(kappa, r), theta)
    }

    pub fn omega_2ph(&self) -> T {
        self.omega_2ph
    }
    pub fn theta(&self) -> T {
        self.theta
    }
}

/// λ = √(χ² − 4Ω²), principal branch.
pub fn ics_lambda<T: Real>(chi: T, omega_2ph: T) -> C<T> {
    let d = chi * chi - c::<T>(4.0) * omega_2ph * omega_2ph;
    if d >= T::zero() {
        C::new(d.sqrt(), T::zero())
    } else {
        C::new(T::zero(), (-d).sqrt())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IcsStability {
    /// λ real, or imaginary with |λ| < κ/2.
    pub mean_field_stable: bool,
    /// 4Ω < κ, so the steady-state correlations 8Ω²/(κ² − 16Ω²) are finite.
    pub steady_state: bool,
}

impl IcsStability {
    pub fn is_stable(&self) -> bool {
        self.mean_field_stable && self.steady_state
    }

    pub fn reason(&self) -> Option<&'static str> {
        if !self.mean_field_stable {
            Some("|lambda| >= kappa/2 with imaginary lambda: the mean field grows")
        } else if !self.steady_state {
            Some("4*omega_2ph >= kappa: no steady state for the cavity correlations")
        } else {
            None
        }
    }
}

pub fn ics_stability<T: Real>(params: &ReadoutParams<T>, cfg: &IcsConfig<T>) -> IcsStability {
    let lam = ics_lambda(params.chi(), cfg.omega_2ph);
    let kappa = params.kappa();
    IcsStability {
        mean_field_stable: lam.im == T::zero() || lam.im < kappa * c(0.5),
        steady_state: c::<T>(4.0) * cfg.omega_2ph < kappa,
    }
}

fn require_mean_field<T: Real>(params: &ReadoutParams<T>, cfg: &IcsConfig<T>) -> Result<()> {
    let s = ics_stability(params, cfg);
    if s.mean_field_stable {
        Ok(())
    } else {
        Err(ReadoutError::Unstable(s.reason().unwrap_or_default().into()))
    }
}

fn require_steady_state<T: Real>(params: &ReadoutParams<T>, cfg: &IcsConfig<T>) -> Result<()> {
    require_mean_field(params, cfg)?;
    if ics_stability(params, cfg).steady_state {
        Ok(())
    } else {
        Err(ReadoutError::SteadyStateUndefined(
            "4*omega_2ph >= kappa: 8*omega^2/(kappa^2 - 16*omega^2) diverges".into(),
        ))
    }
}

/// r = ln[(κ + 4Ω)/(κ − 4Ω)], the squeezing degree of the output field.
pub fn ics_squeeze_param<T: Real>(kappa: T, omega_2ph: T) -> Result<T> {
    let four_omega = c::<T>(4.0) * omega_2ph;
    if !(omega_2ph >= T::zero()) || four_omega >= kappa {
        return Err(ReadoutError::invalid("omega_2ph", "requires 0 <= 4*omega_2ph < kappa"));
    }
    Ok(((kappa + four_omega) / (kappa - four_omega)).ln())
}

/// Inverse of [`ics_squeeze_param`]: Ω = (κ/4) tanh(r/2).
pub fn omega_from_r<T: Real>(kappa: T, r: T) -> T {
    kappa * c(0.25) * (r * c(0.5)).tanh()
}

/// Below this |λ|/κ the closed forms are evaluated on both sides of λ² = 0 and averaged.
const LAMBDA_FLOOR: f64 = 1e-3;

fn even_in_lambda<T: Real>(lam: C<T>, kappa: T, f: impl Fn(C<T>) -> C<T>) -> C<T> {
    let floor = kappa * c(LAMBDA_FLOOR);
    if lam.norm() >= floor {
        f(lam)
    } else {
        (f(C::new(floor, T::zero())) + f(C::new(T::zero(), floor))) * c::<T>(0.5)
    }
}

fn real_part<T: Real>(z: C<T>) -> T {
    debug_assert!(
        z.im.abs() <= c::<T>(1e-9) * T::one().max(z.re.abs()),
        "imaginary residue {:e} on {:e}",
        z.im,
        z.re
    );
    z.re
}

fn psi_c<T: Real>(lam: C<T>, kappa: T) -> C<T> {
    (lam * (c::<T>(2.0) / kappa)).atan()
}

fn cot<T: Real>(z: C<T>) -> C<T> {
    z.tan().inv()
}

fn re<T: Real>(x: T) -> C<T> {
    C::from(x)
}

/// ⟨a(t)⟩ starting from ⟨a(0)⟩ = 0.
pub fn ics_mean_field<T: Real>(
    params: &ReadoutParams<T>,
    cfg: &IcsConfig<T>,
    state: QubitState,
    t: T,
) -> Result<C<T>> {
    require_mean_field(params, cfg)?;
    let lam = ics_lambda(params.chi(), cfg.omega_2ph);
    let kappa = params.kappa();
    let coef = MeanFieldCoefficients::new(params, cfg, state, lam);
    let decay = (-kappa * t * c(0.5)).exp();
    let lt = lam * t;
    let sin_over = if lt.norm() < c(1e-4) {
        re(t) * (C::from(T::one()) - lt * lt / c::<T>(6.0))
    } else {
        lt.sin() / lam
    };
    Ok(coef.prefactor * (coef.constant + (coef.sine * sin_over + coef.cosine * lt.cos()) * decay))
}

/// Coefficients of ⟨a(t)⟩ = P[C₀ + e^{−κt/2}(S sin(λt)/λ + C_c cos(λt))].
struct MeanFieldCoefficients<T> {
    prefactor: C<T>,
    constant: C<T>,
    sine: C<T>,
    cosine: C<T>,
}

impl<T: Real> MeanFieldCoefficients<T> {
    fn new(params: &ReadoutParams<T>, cfg: &IcsConfig<T>, state: QubitState, lam: C<T>) -> Self {
        let kappa = params.kappa();
        let sc = state.sigma::<T>() * params.chi();
        let omega = cfg.omega_2ph;
        let i = C::<T>::i();
        let two = c::<T>(2.0);
        let e_in = C::from_polar(T::one(), params.phi_in());
        let e_pump = C::from_polar(T::one(), cfg.theta - params.phi_in());
        let lam2 = lam * lam;
        let prefactor = re(two * kappa.sqrt() * params.alpha_in()) / (lam2 * c::<T>(4.0) + kappa * kappa);
        let detuned = C::new(kappa, -two * sc);
        let constant = i * e_pump * (c::<T>(4.0) * omega) - detuned * e_in;
        let sine = -((lam2 * two + i * (kappa * sc)) * e_in + i * e_pump * (two * omega * kappa));
        Self { prefactor, constant, sine, cosine: -constant }
    }
}

/// ⟨M⟩ for one qubit state from the time-integrated mean field.
pub fn ics_signal<T: Real>(params: &ReadoutParams<T>, cfg: &IcsConfig<T>, state: QubitState) -> Result<T> {
    require_mean_field(params, cfg)?;
    let kappa = params.kappa();
    let tau = params.tau();
    let a = kappa * c(0.5);
    let i = C::<T>::i();
    let lam0 = ics_lambda(params.chi(), cfg.omega_2ph);
    // E(μ) = ∫₀^τ e^{(μ−a)t} dt
    let e = |mu: C<T>| {
        let s = mu - a;
        ((s * tau).exp() - T::one()) / s
    };
    let cavity = even_in_lambda(lam0, kappa, |lam| {
        let coef = MeanFieldCoefficients::new(params, cfg, state, lam);
        let (ep, em) = (e(i * lam), e(-i * lam));
        let int_cos = (ep + em) * c::<T>(0.5);
        let int_sin_over = (ep - em) / (i * lam * c::<T>(2.0));
        coef.prefactor * (coef.constant * tau + coef.sine * int_sin_over + coef.cosine * int_cos)
    });
    let direct = C::from_polar(params.alpha_in() * tau, params.phi_in());
    let integral = direct + cavity * kappa.sqrt();
    let rotated = C::from_polar(T::one(), -params.phi_h()) * integral;
    Ok(c::<T>(2.0) * kappa.sqrt() * rotated.re)
}

/// ⟨M⟩↑ − ⟨M⟩↓ in closed form with tan ψ = 2λ/κ.
pub fn ics_signal_separation<T: Real>(params: &ReadoutParams<T>, cfg: &IcsConfig<T>) -> Result<T> {
    require_mean_field(params, cfg)?;
    let kappa = params.kappa();
    let kt = params.kappa_tau();
    let tau = params.tau();
    let lam0 = ics_lambda(params.chi(), cfg.omega_2ph);
    let four = c::<T>(4.0);
    let two = c::<T>(2.0);
    let z = even_in_lambda(lam0, kappa, |lam| {
        let p = psi_c(lam, kappa);
        let cos2 = p.cos().powi(2);
        // 4cos²ψ/sin2ψ = κ/λ
        let ratio = (p * two + lam * tau).sin() * kappa / lam;
        cos2 * (re(kt) - cos2 * four + ratio * (-kt / two).exp())
    });
    let pre = c::<T>(16.0) * params.chi() / kappa * params.alpha_in() / kappa.sqrt()
        * (params.phi_h() - params.phi_in()).sin();
    Ok(pre * real_part(z))
}

/// The three τ-dependent noise coefficients G₀, G_s, G_c.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseTerms<T> {
    pub g0: T,
    pub gs: T,
    pub gc: T,
}

pub fn ics_noise_terms<T: Real>(params: &ReadoutParams<T>, cfg: &IcsConfig<T>) -> Result<NoiseTerms<T>> {
    require_steady_state(params, cfg)?;
    let kappa = params.kappa();
    let kt = params.kappa_tau();
    let tau = params.tau();
    let r = ics_squeeze_param(kappa, cfg.omega_2ph)?;
    let lam0 = ics_lambda(params.chi(), cfg.omega_2ph);
    let (half, two, three, four) = (c::<T>(0.5), c::<T>(2.0), c::<T>(3.0), c::<T>(4.0));
    let th2 = (r * half).tanh();
    let ch = r.cosh();
    let (sh_h, ch_h) = ((r * half).sinh(), (r * half).cosh());
    let e1 = (-kt).exp();
    let e2 = (-kt * half).exp();
    let one = C::from(T::one());

    let g0 = even_in_lambda(lam0, kappa, |lam| {
        let p = psi_c(lam, kappa);
        let lt = lam * tau;
        let (cp2, c2p, c4p) = (p.cos().powi(2), (p * two).cos(), (p * four).cos());
        let ct = cot(p);
        (c2p * c::<T>(8.0) + c4p * two + c::<T>(5.0) - ch) * (kt * half * th2 * th2) + kt * half * (T::one() + ch)
            - cp2 * two * (c4p * three + c2p * (c::<T>(9.0) - two * ch) + c::<T>(5.0) - three * ch) * (th2 * th2)
            - (one * two - (p * two + lt * two).cos() - (p * four + lt * two).cos()) * (c2p - ch) * ct * ct
                * (e1 * th2 * th2)
            - cp2 * (e2 * c::<T>(8.0) * th2 * th2)
                * ((lt.cos() - ct * (p * four + lt).sin()) * (ch_h * ch_h)
                    + cp2 * ct * (p * two + lt).sin() * (four * sh_h * sh_h))
    });
    let gs = even_in_lambda(lam0, kappa, |lam| {
        let p = psi_c(lam, kappa);
        let lt = lam * tau;
        let (cp, c2p, c4p) = (p.cos(), (p * two).cos(), (p * four).cos());
        let ct = cot(p);
        cp * cp * two * th2 * (c2p * (two * kt + two * ch - three) - c4p * three + (ch - T::one()))
            - cp * ct * (p * three + lt * two).sin() * (c2p - ch) * (two * e1 * th2)
            - cp * ct * (e2 * four) * ((p * three + lt).sin() * r.sinh() - cp * (p * four + lt).sin() * (two * th2))
    });
    let gc = even_in_lambda(lam0, kappa, |lam| {
        let p = psi_c(lam, kappa);
        let lt = lam * tau;
        let (cp, c2p) = (p.cos(), (p * two).cos());
        let cp2 = cp * cp;
        let ct = cot(p);
        let c3 = cp * (p * three + lt * two).cos();
        cp2 * cp2 * (c8::<T>() * th2) * (c2p * c::<T>(6.0) + (three - two * kt - two * ch))
            - cp2 * cp2 * ct * (c::<T>(16.0) * e2)
                * ((p * four + lt).sin() / cp2 * (sh_h * ch_h) - (p * two + lt).sin() * (four * th2 * sh_h * sh_h))
            + cp2 * (c8::<T>() * e1 * sh_h) * (c3 * ch_h - (one - c3) * ct * ct * (sh_h * th2))
    });
    Ok(NoiseTerms { g0: real_part(g0), gs: real_part(gs), gc: real_part(gc) })
}

fn c8<T: Real>() -> T {
    c(8.0)
}

/// ⟨M_N²⟩ = G₀ − sin(2φ_h − θ) G_s + (σχ/κ) cos(2φ_h − θ) G_c.
pub fn ics_noise<T: Real>(params: &ReadoutParams<T>, cfg: &IcsConfig<T>, state: QubitState) -> Result<T> {
    let g = ics_noise_terms(params, cfg)?;
    let phase = c::<T>(2.0) * params.phi_h() - cfg.theta;
    Ok(g.g0 - phase.sin() * g.gs + state.sigma::<T>() * params.chi() / params.kappa() * phase.cos() * g.gc)
}

/// Vacuum (drive-independent) part of ⟨a†a⟩(t) for a cavity starting in its steady state.
fn vacuum_photons<T: Real>(params: &ReadoutParams<T>, cfg: &IcsConfig<T>, t: T) -> Result<T> {
    let kappa = params.kappa();
    let r = ics_squeeze_param(kappa, cfg.omega_2ph)?;
    let th2 = (r * c(0.5)).tanh();
    let lam0 = ics_lambda(params.chi(), cfg.omega_2ph);
    let two = c::<T>(2.0);
    let z = even_in_lambda(lam0, kappa, |lam| {
        let p = psi_c(lam, kappa);
        let lt = lam * t;
        let q0 = (re(two) - (lt * two).cos() - (p * two + lt * two).cos()) * ((p * two).cos() - r.cosh())
            / p.sin().powi(2);
        (p.cos().powi(2) * c::<T>(4.0) - q0 * (-kappa * t).exp()) * (th2 * th2 / c::<T>(8.0))
    });
    Ok(real_part(z))
}

/// ⟨a†a⟩(t) = |⟨a(t)⟩|² plus the steady-state vacuum contribution.
pub fn ics_photon_number<T: Real>(
    params: &ReadoutParams<T>,
    cfg: &IcsConfig<T>,
    state: QubitState,
    t: T,
) -> Result<T> {
    require_steady_state(params, cfg)?;
    let mean = ics_mean_field(params, cfg, state, t)?;
    Ok(mean.norm_sqr() + vacuum_photons(params, cfg, t)?)
}

/// Closed-form ⟨a†a⟩(t) valid when θ − 2φ_in = π/2, where the coherent part is the
/// same for both qubit states.
pub fn ics_photon_number_locked_phase<T: Real>(params: &ReadoutParams<T>, cfg: &IcsConfig<T>, t: T) -> Result<T> {
    require_steady_state(params, cfg)?;
    let kappa = params.kappa();
    let r = ics_squeeze_param(kappa, cfg.omega_2ph)?;
    let th2 = (r * c(0.5)).tanh();
    let lam0 = ics_lambda(params.chi(), cfg.omega_2ph);
    let two = c::<T>(2.0);
    let e1 = (-kappa * t).exp();
    let e2 = (-kappa * t * c(0.5)).exp();
    let q1 = even_in_lambda(lam0, kappa, |lam| {
        let p = psi_c(lam, kappa);
        let lt = lam * t;
        let ct = cot(p);
        let osc = re(T::one() + e1) - lt.cos() * (two * e2);
        let mixed = ((p * two).sin() - (p * two + lt).sin() * (two * e2) + (p * two + lt * two).sin() * e1) * ct * th2;
        let sq = p.cos() - ct * (p + lt).sin() * e2;
        p.cos().powi(2) * c::<T>(4.0) * (osc + mixed + sq * sq * (two * th2 * th2))
    });
    let amp2 = params.alpha_in().powi(2) / kappa;
    Ok(vacuum_photons(params, cfg, t)? + amp2 * real_part(q1))
}

pub fn ics_moments<T: Real>(params: &ReadoutParams<T>, cfg: &IcsConfig<T>) -> Result<MeasurementMoments<T>> {
    Ok(MeasurementMoments {
        signal_up: ics_signal(params, cfg, QubitState::Up)?,
        signal_down: ics_signal(params, cfg, QubitState::Down)?,
        noise_up: ics_noise(params, cfg, QubitState::Up)?,
        noise_down: ics_noise(params, cfg, QubitState::Down)?,
    })
}

/// tan ψ = 2λ/κ for real λ, reported by the optimal-SNR sweeps.
pub fn ics_psi<T: Real>(params: &ReadoutParams<T>, cfg: &IcsConfig<T>) -> Option<T> {
    let lam = ics_lambda(params.chi(), cfg.omega_2ph);
    (lam.im == T::zero()).then(|| psi_from_rate(lam.re, params.kappa()))
}
