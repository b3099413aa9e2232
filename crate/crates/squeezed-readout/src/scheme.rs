//! Scheme selection and per-angle evaluation shared by the oracle, phase-space and CLI layers.

use crate::combined::{
    beta_photon_number, combined_moments_resolved, combined_noise, combined_signal, resolve_combined, CombinedConfig,
    ResolvedCombined,
};
use crate::error::{ReadoutError, Result};
use crate::ics::{ics_noise, ics_photon_number, ics_signal, IcsConfig};
use crate::ies::{ies_moments, ies_noise, ies_photon_number, ies_signal, IesConfig};
use crate::readout::{MeasurementMoments, QubitState, ReadoutParams};
use crate::scalar::{c, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SchemeKind {
    Standard,
    Ies,
    Ics,
    Combined,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 4] = [SchemeKind::Standard, SchemeKind::Ies, SchemeKind::Ics, SchemeKind::Combined];

    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::Standard => "standard",
            SchemeKind::Ies => "ies",
            SchemeKind::Ics => "ics",
            SchemeKind::Combined => "combined",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SchemeConfig<T> {
    Standard,
    Ies(IesConfig<T>),
    Ics(IcsConfig<T>),
    Combined(CombinedConfig<T>),
}

impl<T: Real> SchemeConfig<T> {
    pub fn kind(&self) -> SchemeKind {
        match self {
            SchemeConfig::Standard => SchemeKind::Standard,
            SchemeConfig::Ies(_) => SchemeKind::Ies,
            SchemeConfig::Ics(_) => SchemeKind::Ics,
            SchemeConfig::Combined(_) => SchemeKind::Combined,
        }
    }

    pub fn moments(&self, params: &ReadoutParams<T>) -> Result<MeasurementMoments<T>> {
        match self {
            SchemeConfig::Standard => Ok(ies_moments(params, &IesConfig::vacuum())),
            SchemeConfig::Ies(cfg) => Ok(ies_moments(params, cfg)),
            SchemeConfig::Ics(cfg) => crate::ics::ics_moments(params, cfg),
            SchemeConfig::Combined(cfg) => crate::combined::combined_moments(params, cfg),
        }
    }
}

/// A scheme bound to its parameters, with the combined-scheme ω_sq resolved once.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SchemeEvaluation<T> {
    params: ReadoutParams<T>,
    scheme: SchemeConfig<T>,
    resolved: Option<ResolvedCombined<T>>,
}

impl<T: Real> SchemeEvaluation<T> {
    pub fn new(params: ReadoutParams<T>, scheme: SchemeConfig<T>) -> Result<Self> {
        let resolved = match &scheme {
            SchemeConfig::Combined(cfg) => Some(resolve_combined(&params, cfg)?),
            SchemeConfig::Ics(cfg) => {
                let s = crate::ics::ics_stability(&params, cfg);
                if !s.is_stable() {
                    return Err(ReadoutError::Unstable(s.reason().unwrap_or_default().into()));
                }
                None
            }
            _ => None,
        };
        Ok(Self { params, scheme, resolved })
    }

    pub fn params(&self) -> &ReadoutParams<T> {
        &self.params
    }

    pub fn scheme(&self) -> &SchemeConfig<T> {
        &self.scheme
    }

    pub fn resolved(&self) -> Option<&ResolvedCombined<T>> {
        self.resolved.as_ref()
    }

    pub fn kappa_tau(&self) -> T {
        self.params.kappa_tau()
    }

    pub fn moments(&self) -> Result<MeasurementMoments<T>> {
        match (&self.scheme, &self.resolved) {
            (SchemeConfig::Combined(cfg), Some(res)) => combined_moments_resolved(&self.params, cfg, res),
            (scheme, _) => scheme.moments(&self.params),
        }
    }

    /// ⟨M⟩ with the homodyne angle replaced by `phi_h`.
    pub fn signal_at(&self, state: QubitState, phi_h: T) -> Result<T> {
        let p = self.params.with_phi_h(phi_h)?;
        match (&self.scheme, &self.resolved) {
            (SchemeConfig::Standard | SchemeConfig::Ies(_), _) => Ok(ies_signal(&p, state)),
            (SchemeConfig::Ics(cfg), _) => ics_signal(&p, cfg, state),
            (SchemeConfig::Combined(cfg), Some(res)) => combined_signal(&p, &res.disp, res.r_c, cfg.theta, state),
            (SchemeConfig::Combined(_), None) => unreachable!("combined evaluations are resolved on construction"),
        }
    }

    /// ⟨M_N²⟩ with the homodyne angle replaced by `phi_h`.
    pub fn noise_at(&self, state: QubitState, phi_h: T) -> Result<T> {
        let p = self.params.with_phi_h(phi_h)?;
        match &self.scheme {
            SchemeConfig::Standard => Ok(ies_noise(&p, &IesConfig::vacuum(), state)),
            SchemeConfig::Ies(cfg) => Ok(ies_noise(&p, cfg, state)),
            SchemeConfig::Ics(cfg) => ics_noise(&p, cfg, state),
            SchemeConfig::Combined(cfg) => {
                if !cfg.is_matched() {
                    return Err(ReadoutError::invalid(
                        "phi_h",
                        "mismatched noise is only available at the squeezed angle 2*phi_h = theta",
                    ));
                }
                Ok(combined_noise(&p, cfg.r, cfg.theta))
            }
        }
    }

    /// Cavity photon number at time t (the β mode for the combined scheme).
    pub fn photon_number(&self, state: QubitState, t: T) -> Result<T> {
        match (&self.scheme, &self.resolved) {
            (SchemeConfig::Standard, _) => Ok(ies_photon_number(&self.params, &IesConfig::vacuum(), t)),
            (SchemeConfig::Ies(cfg), _) => Ok(ies_photon_number(&self.params, cfg, t)),
            (SchemeConfig::Ics(cfg), _) => ics_photon_number(&self.params, cfg, state, t),
            (SchemeConfig::Combined(_), Some(res)) => Ok(beta_photon_number(&self.params, &res.disp, res.r_c, state, t)),
            (SchemeConfig::Combined(_), None) => unreachable!("combined evaluations are resolved on construction"),
        }
    }

    /// Largest photon number over both states and `samples` + 1 equally spaced times in [0, τ].
    pub fn max_photon_number(&self, samples: usize) -> Result<T> {
        let samples = samples.max(1);
        let mut best = T::zero();
        for k in 0..=samples {
            let t = self.params.tau() * c::<T>(k as f64 / samples as f64);
            for s in QubitState::BOTH {
                best = best.max(self.photon_number(s, t)?);
            }
        }
        Ok(best)
    }
}
