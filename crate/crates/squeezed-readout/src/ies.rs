//! Readout with a squeezed vacuum injected into the cavity input port.

use num_complex::Complex;

use crate::error::{ReadoutError, Result};
use crate::readout::{psi_from_rate, MeasurementMoments, QubitState, ReadoutParams};
use crate::scalar::{c, wrap_angle, Real};

/// Injected squeezed vacuum: squeezing parameter r and reference phase φ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IesConfig<T> {
    r: T,
    varphi: T,
}

impl<T: Real> IesConfig<T> {
    pub fn new(r: T, varphi: T) -> Result<Self> {
        if !(r >= T::zero()) || !r.is_finite() {
            return Err(ReadoutError::invalid("r", "must be finite and non-negative"));
        }
        if !varphi.is_finite() {
            return Err(ReadoutError::invalid("varphi", "must be finite"));
        }
        Ok(Self { r, varphi: wrap_angle(varphi) })
    }

    pub fn vacuum() -> Self {
        Self { r: T::zero(), varphi: T::zero() }
    }

    /// Reference phase placing the homodyne quadrature on the phase φ − 2φ_h = `offset`.
    pub fn with_phase_offset(r: T, phi_h: T, offset: T) -> Result<Self> {
        Self::new(r, offset + c::<T>(2.0) * phi_h)
    }

    pub fn r(&self) -> T {
        self.r
    }
    pub fn varphi(&self) -> T {
        self.varphi
    }
}

/// ⟨M⟩ for one qubit state, from the time-integrated coherent cavity response.
///
/// Does not depend on the injected squeezing.
pub fn ies_signal<T: Real>(params: &ReadoutParams<T>, state: QubitState) -> T {
    let kappa = params.kappa();
    let tau = params.tau();
    let i = Complex::<T>::i();
    let z = Complex::new(state.sigma::<T>() * params.chi(), -kappa * c(0.5));
    let transient = (Complex::<T>::from(T::one()) - (-i * z * tau).exp()) / (i * z);
    let integral = (Complex::from(tau) + i * kappa / z * (Complex::from(tau) - transient))
        * Complex::from_polar(params.alpha_in(), params.phi_in());
    let rotated = Complex::from_polar(T::one(), -params.phi_h()) * integral;
    c::<T>(2.0) * kappa.sqrt() * rotated.re
}

/// ⟨M⟩↑ − ⟨M⟩↓ in closed form, written without the 1/sin 2ψ factor so χ = 0 is regular.
pub fn ies_signal_separation<T: Real>(params: &ReadoutParams<T>) -> T {
    let kappa = params.kappa();
    let kt = params.kappa_tau();
    let psi = psi_from_rate(params.chi(), kappa);
    let two = c::<T>(2.0);
    let four = c::<T>(4.0);
    let cos2 = psi.cos().powi(2);
    let bracket = (two * psi).sin() * (kt - four * cos2)
        + four * cos2 * (two * psi + params.chi() * params.tau()).sin() * (-kt / two).exp();
    four * params.alpha_in() / kappa.sqrt() * (params.phi_h() - params.phi_in()).sin() * bracket
}

/// ⟨M_N²⟩ for one qubit state with the cavity starting in its squeezed steady state.
pub fn ies_noise<T: Real>(params: &ReadoutParams<T>, cfg: &IesConfig<T>, state: QubitState) -> T {
    let kt = params.kappa_tau();
    let sigma = state.sigma::<T>();
    let p = sigma * psi_from_rate(params.chi(), params.kappa());
    let phase = params.phi_h() * c(2.0) - cfg.varphi;
    let shift = sigma * params.chi() * params.tau();
    let (two, three, four) = (c::<T>(2.0), c::<T>(3.0), c::<T>(4.0));
    let sin2p = (two * p).sin();
    let bracket = three * phase.cos()
        - (three - two * kt) * (four * p + phase).cos()
        + c::<T>(6.0) * sin2p * (four * p + phase).sin()
        - c::<T>(16.0) * (-kt / two).exp() * p.cos() * sin2p * (three * p + phase + shift).sin()
        + four * (-kt).exp() * p.cos() * sin2p * (three * p + phase + two * shift).sin();
    let two_r = two * cfg.r;
    kt * two_r.cosh() + c::<T>(0.5) * bracket * two_r.sinh()
}

/// F(τ) such that the noise summed over both states is 2κτ[cosh 2r + cos(φ − 2φ_h) sinh 2r F(τ)].
pub fn ies_noise_shape<T: Real>(params: &ReadoutParams<T>) -> T {
    let kt = params.kappa_tau();
    let psi = psi_from_rate(params.chi(), params.kappa());
    let ct = params.chi() * params.tau();
    let (two, three, four) = (c::<T>(2.0), c::<T>(3.0), c::<T>(4.0));
    let body = three + three * (two * psi).cos() - (three - two * kt) * (four * psi).cos()
        - three * (c::<T>(6.0) * psi).cos()
        + four
            * psi.cos()
            * (two * psi).sin()
            * ((-kt).exp() * (three * psi + two * ct).sin()
                - four * (-kt / two).exp() * (three * psi + ct).sin());
    body / (two * kt)
}

/// Intracavity photon number ⟨a†a⟩ at time t.
pub fn ies_photon_number<T: Real>(params: &ReadoutParams<T>, cfg: &IesConfig<T>, t: T) -> T {
    let kappa = params.kappa();
    let psi = psi_from_rate(params.chi(), kappa);
    let two = c::<T>(2.0);
    let coherent = c::<T>(4.0) * params.alpha_in().powi(2) / kappa
        * psi.cos().powi(2)
        * (T::one() + (-kappa * t).exp() - two * (params.chi() * t).cos() * (-kappa * t / two).exp());
    cfg.r.sinh().powi(2) + coherent
}

pub fn ies_moments<T: Real>(params: &ReadoutParams<T>, cfg: &IesConfig<T>) -> MeasurementMoments<T> {
    MeasurementMoments {
        signal_up: ies_signal(params, QubitState::Up),
        signal_down: ies_signal(params, QubitState::Down),
        noise_up: ies_noise(params, cfg, QubitState::Up),
        noise_down: ies_noise(params, cfg, QubitState::Down),
    }
}
