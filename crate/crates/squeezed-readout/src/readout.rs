//! Parameters, qubit states and the SNR/fidelity arithmetic common to all schemes.

use crate::error::{ReadoutError, Result};
use crate::ies::{ies_moments, IesConfig};
use crate::scalar::{c, wrap_angle, Real};

/// Cavity, drive and measurement scalars shared by every readout scheme.
///
/// Angles are reduced to (−π, π] on construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReadoutParams<T> {
    kappa: T,
    chi: T,
    alpha_in: T,
    phi_in: T,
    phi_h: T,
    tau: T,
}

fn check_finite<T: Real>(name: &'static str, x: T) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(ReadoutError::invalid(name, "must be finite"))
    }
}

impl<T: Real> ReadoutParams<T> {
    pub fn new(kappa: T, chi: T, alpha_in: T, phi_in: T, phi_h: T, tau: T) -> Result<Self> {
        for (name, x) in [
            ("kappa", kappa),
            ("chi", chi),
            ("alpha_in", alpha_in),
            ("phi_in", phi_in),
            ("phi_h", phi_h),
            ("tau", tau),
        ] {
            check_finite(name, x)?;
        }
        if kappa <= T::zero() {
            return Err(ReadoutError::invalid("kappa", "must be positive"));
        }
        if tau <= T::zero() {
            return Err(ReadoutError::invalid("tau", "must be positive"));
        }
        if alpha_in < T::zero() {
            return Err(ReadoutError::invalid("alpha_in", "must be non-negative"));
        }
        Ok(Self {
            kappa,
            chi,
            alpha_in,
            phi_in: wrap_angle(phi_in),
            phi_h: wrap_angle(phi_h),
            tau,
        })
    }

    /// κ = 1, χ = κ/2, α_in = √κ, φ_in = 0, φ_h = π/2 and the given κτ.
    pub fn reference(kappa_tau: T) -> Result<Self> {
        Self::new(T::one(), c(0.5), T::one(), T::zero(), T::FRAC_PI_2(), kappa_tau)
    }

    pub fn kappa(&self) -> T {
        self.kappa
    }
    pub fn chi(&self) -> T {
        self.chi
    }
    pub fn alpha_in(&self) -> T {
        self.alpha_in
    }
    pub fn phi_in(&self) -> T {
        self.phi_in
    }
    pub fn phi_h(&self) -> T {
        self.phi_h
    }
    pub fn tau(&self) -> T {
        self.tau
    }
    pub fn kappa_tau(&self) -> T {
        self.kappa * self.tau
    }

    pub fn with_chi(self, chi: T) -> Result<Self> {
        Self::new(self.kappa, chi, self.alpha_in, self.phi_in, self.phi_h, self.tau)
    }
    pub fn with_alpha_in(self, alpha_in: T) -> Result<Self> {
        Self::new(self.kappa, self.chi, alpha_in, self.phi_in, self.phi_h, self.tau)
    }
    pub fn with_phi_in(self, phi_in: T) -> Result<Self> {
        Self::new(self.kappa, self.chi, self.alpha_in, phi_in, self.phi_h, self.tau)
    }
    pub fn with_phi_h(self, phi_h: T) -> Result<Self> {
        Self::new(self.kappa, self.chi, self.alpha_in, self.phi_in, phi_h, self.tau)
    }
    pub fn with_tau(self, tau: T) -> Result<Self> {
        Self::new(self.kappa, self.chi, self.alpha_in, self.phi_in, self.phi_h, tau)
    }
    pub fn with_kappa_tau(self, kappa_tau: T) -> Result<Self> {
        self.with_tau(kappa_tau / self.kappa)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum QubitState {
    Up,
    Down,
}

impl QubitState {
    pub const BOTH: [QubitState; 2] = [QubitState::Up, QubitState::Down];

    /// σ = +1 for the excited state, −1 for the ground state.
    pub fn sigma<T: Real>(self) -> T {
        match self {
            QubitState::Up => T::one(),
            QubitState::Down => -T::one(),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            QubitState::Up => "up",
            QubitState::Down => "down",
        }
    }
}

/// Per-state mean ⟨M⟩ and variance ⟨M_N²⟩ of the integrated homodyne record.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasurementMoments<T> {
    pub signal_up: T,
    pub signal_down: T,
    pub noise_up: T,
    pub noise_down: T,
}

impl<T: Real> MeasurementMoments<T> {
    pub fn signal(&self, state: QubitState) -> T {
        match state {
            QubitState::Up => self.signal_up,
            QubitState::Down => self.signal_down,
        }
    }

    pub fn noise(&self, state: QubitState) -> T {
        match state {
            QubitState::Up => self.noise_up,
            QubitState::Down => self.noise_down,
        }
    }

    pub fn separation(&self) -> T {
        (self.signal_up - self.signal_down).abs()
    }

    pub fn noise_sum(&self) -> T {
        self.noise_up + self.noise_down
    }

    pub fn summary(&self) -> Result<ReadoutSummary<T>> {
        let snr = snr(self)?;
        let (fidelity, error) = fidelity_and_error(snr);
        Ok(ReadoutSummary {
            separation: self.separation(),
            noise_sum: self.noise_sum(),
            snr,
            fidelity,
            error,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReadoutSummary<T> {
    pub separation: T,
    pub noise_sum: T,
    pub snr: T,
    pub fidelity: T,
    pub error: T,
}

/// tan ψ = 2x/κ.
pub fn psi_from_rate<T: Real>(x: T, kappa: T) -> T {
    (c::<T>(2.0) * x / kappa).atan()
}

/// |⟨M⟩↑ − ⟨M⟩↓| / √(⟨M_N²⟩↑ + ⟨M_N²⟩↓).
pub fn snr<T: Real>(m: &MeasurementMoments<T>) -> Result<T> {
    let total = m.noise_sum();
    if !(total > T::zero()) {
        return Err(ReadoutError::DegenerateNoise(total.to_f64().unwrap_or(f64::NAN)));
    }
    Ok(m.separation() / total.sqrt())
}

/// Returns (F, δ) with F = ½[1 + erf(SNR/2)] and δ = 1 − F.
///
/// δ is evaluated through erfc so it keeps full relative precision for large SNR.
pub fn fidelity_and_error<T: Real>(snr: T) -> (T, T) {
    let half = c::<T>(0.5);
    let x = snr * half;
    (half * (T::one() + x.erf()), half * x.erfc())
}

/// Tone amplitude α_in/√κ that brings the scheme to `target_snr`.
///
/// `eval` computes the SNR of a parameter set; it is called once with α_in = √κ.
/// The SNR is linear in α_in because the signal is and the noise does not depend on it.
pub fn required_tone_amplitude<T, F>(params: &ReadoutParams<T>, target_snr: T, eval: F) -> Result<T>
where
    T: Real,
    F: Fn(&ReadoutParams<T>) -> Result<T>,
{
    if !(target_snr >= T::zero()) {
        return Err(ReadoutError::invalid("target_snr", "must be non-negative"));
    }
    if target_snr == T::zero() {
        return Ok(T::zero());
    }
    let unit = params.with_alpha_in(params.kappa().sqrt())?;
    let s = eval(&unit)?;
    if !(s > T::zero()) {
        return Err(ReadoutError::ZeroSignal);
    }
    Ok(target_snr / s)
}

/// Readout without squeezing: vacuum input, both noises equal κτ.
pub fn standard_readout_moments<T: Real>(params: &ReadoutParams<T>) -> MeasurementMoments<T> {
    ies_moments(params, &IesConfig::vacuum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn params_validate_and_wrap() {
        assert!(ReadoutParams::new(0.0, 0.5, 1.0, 0.0, 0.0, 1.0).is_err());
        assert!(ReadoutParams::new(1.0, 0.5, 1.0, 0.0, 0.0, 0.0).is_err());
        assert!(ReadoutParams::new(1.0, 0.5, -1.0, 0.0, 0.0, 1.0).is_err());
        assert!(ReadoutParams::new(1.0, f64::NAN, 1.0, 0.0, 0.0, 1.0).is_err());
        let p = ReadoutParams::new(1.0, 0.5, 1.0, 7.0, -4.0, 1.0).unwrap();
        assert!((p.phi_in() - (7.0 - 2.0 * std::f64::consts::PI)).abs() < 1e-12);
        assert!((p.phi_h() - (-4.0 + 2.0 * std::f64::consts::PI)).abs() < 1e-12);
    }

    #[test]
    fn psi_examples() {
        assert_eq!(psi_from_rate(0.0, 1.0), 0.0);
        assert!((psi_from_rate(0.5, 1.0) - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
        assert!((psi_from_rate(-0.5, 1.0) + std::f64::consts::FRAC_PI_4).abs() < 1e-15);
    }

    #[test]
    fn snr_examples() {
        let m = MeasurementMoments::<f64> { signal_up: 1.0, signal_down: -1.0, noise_up: 2.0, noise_down: 2.0 };
        assert!((snr(&m).unwrap() - 1.0).abs() < 1e-15);
        let m = MeasurementMoments { signal_up: 0.3, signal_down: 0.3, noise_up: 2.0, noise_down: 1.0 };
        assert_eq!(snr(&m).unwrap(), 0.0);
        let m = MeasurementMoments { signal_up: 0.3, signal_down: 0.1, noise_up: 0.0, noise_down: 0.0 };
        assert!(matches!(snr(&m), Err(ReadoutError::DegenerateNoise(_))));
    }

    #[test]
    fn fidelity_examples() {
        assert_eq!(fidelity_and_error(0.0), (0.5, 0.5));
        let (_, e) = fidelity_and_error(5.5f64);
        assert!((e - 5.031_096_105_981_84e-5).abs() < 1e-15);
        let (_, e) = fidelity_and_error(0.18f64);
        assert!((e - 0.45).abs() < 0.005);
    }

    #[test]
    fn standard_noise_is_kappa_tau() {
        let p = ReadoutParams::new(2.0, 0.3, 1.5, 0.2, 1.1, 0.7).unwrap();
        let m = standard_readout_moments(&p);
        assert_eq!(m.noise_up, p.kappa_tau());
        assert_eq!(m.noise_down, p.kappa_tau());
        let m0 = standard_readout_moments(&p.with_chi(0.0).unwrap());
        assert!(m0.separation() < 1e-14);
    }

    #[test]
    fn tone_amplitude_zero_target_and_zero_signal() {
        let p = ReadoutParams::reference(1.0).unwrap();
        let eval = |q: &ReadoutParams<f64>| standard_readout_moments(q).summary().map(|s| s.snr);
        assert_eq!(required_tone_amplitude(&p, 0.0, eval).unwrap(), 0.0);
        let flat = p.with_chi(0.0).unwrap();
        assert_eq!(required_tone_amplitude(&flat, 1.0, eval), Err(ReadoutError::ZeroSignal));
    }

    proptest! {
        #[test]
        fn snr_scale_invariant(s1 in -5.0f64..5.0, s2 in -5.0f64..5.0, n1 in 0.01f64..5.0,
                               n2 in 0.01f64..5.0, k in 0.01f64..100.0) {
            let m = MeasurementMoments { signal_up: s1, signal_down: s2, noise_up: n1, noise_down: n2 };
            let ms = MeasurementMoments { signal_up: k * s1, signal_down: k * s2,
                                          noise_up: k * k * n1, noise_down: k * k * n2 };
            let a = snr(&m).unwrap();
            let b = snr(&ms).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * a.max(1e-300));
        }

        #[test]
        fn fidelity_monotone(a in 0.0f64..20.0, d in 0.0f64..5.0) {
            let (f1, e1) = fidelity_and_error(a);
            let (f2, _) = fidelity_and_error(a + d);
            prop_assert!(f2 >= f1);
            prop_assert!((f1 + e1 - 1.0).abs() < 1e-15);
            prop_assert!((0.5..=1.0).contains(&f1));
        }

        #[test]
        fn psi_odd_and_increasing(x in -10.0f64..10.0, d in 1e-6f64..1.0, kappa in 0.1f64..10.0) {
            prop_assert_eq!(psi_from_rate(-x, kappa), -psi_from_rate(x, kappa));
            prop_assert!(psi_from_rate(x + d, kappa) > psi_from_rate(x, kappa));
        }

        #[test]
        fn tone_amplitude_round_trip(kt in 0.05f64..10.0, chi in 0.05f64..2.0, target in 0.1f64..10.0) {
            let p = ReadoutParams::reference(kt).unwrap().with_chi(chi).unwrap();
            let eval = |q: &ReadoutParams<f64>| standard_readout_moments(q).summary().map(|s| s.snr);
            let a = required_tone_amplitude(&p, target, eval).unwrap();
            let s = eval(&p.with_alpha_in(a * p.kappa().sqrt()).unwrap()).unwrap();
            prop_assert!((s / target - 1.0).abs() < 1e-9);
        }
    }
}
