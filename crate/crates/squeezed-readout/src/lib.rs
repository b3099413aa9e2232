//! Signal-to-noise analysis of dispersive qubit readout with squeezed light.
//!
//! Closed forms for injected squeezing ([`ies`]), intracavity squeezing ([`ics`]) and their
//! combination ([`combined`]) are generic over the scalar type; the aliases below fix `f64`.
//! [`oracle`] recomputes the same moments from the linear Langevin dynamics without using the
//! closed forms, [`optimize`] searches parameter space, and [`phasespace`] builds the Gaussian
//! picture of the integrated output mode.
//!
//! ```
//! use squeezed_readout::combined::aligned_params;
//! use squeezed_readout::{snr, CombinedConfig, ReadoutParams, SchemeConfig, SchemeEvaluation};
//!
//! let p = aligned_params(&ReadoutParams::reference(1.0)?, 0.0)?;
//! let cfg = CombinedConfig::matched(10f64.ln(), 0.0);
//! let ev = SchemeEvaluation::new(p, SchemeConfig::Combined(cfg))?;
//! assert!((snr(&ev.moments()?)? - 5.549).abs() < 1e-3);
//! # Ok::<(), squeezed_readout::ReadoutError>(())
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod combined;
pub mod error;
pub mod ics;
pub mod ies;
pub mod optimize;
pub mod oracle;
pub mod phasespace;
pub mod readout;
pub mod scalar;
pub mod scheme;

pub use error::{ReadoutError, Result};
pub use readout::{fidelity_and_error, psi_from_rate, snr, QubitState};
pub use scalar::Real;
pub use scheme::SchemeKind;

pub type ReadoutParams = readout::ReadoutParams<f64>;
pub type MeasurementMoments = readout::MeasurementMoments<f64>;
pub type ReadoutSummary = readout::ReadoutSummary<f64>;
pub type IesConfig = ies::IesConfig<f64>;
pub type IcsConfig = ics::IcsConfig<f64>;
pub type CombinedConfig = combined::CombinedConfig<f64>;
pub type DispersiveParams = combined::DispersiveParams<f64>;
pub type BogoliubovFrame = combined::BogoliubovFrame<f64>;
pub type MismatchParams = combined::MismatchParams<f64>;
pub type SchemeConfig = scheme::SchemeConfig<f64>;
pub type SchemeEvaluation = scheme::SchemeEvaluation<f64>;
pub type LinearReadoutSystem = oracle::LinearReadoutSystem<f64>;
pub type OracleResult = oracle::OracleResult<f64>;
pub type OptimumReport = optimize::OptimumReport<f64>;
pub type SnrBounds = optimize::SnrBounds<f64>;
pub type GaussianState2D = phasespace::GaussianState2D<f64>;
pub type EllipseDiagnostics = phasespace::EllipseDiagnostics<f64>;
pub type WignerGrid = phasespace::WignerGrid<f64>;
