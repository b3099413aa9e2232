//! Random scheme draws and analytic-versus-oracle comparison shared by the integration tests.
#![allow(dead_code)]

use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::TestRunner;
use squeezed_readout::combined::{aligned_params, mismatch_noise, resolve_combined, R1Form};
use squeezed_readout::oracle::scheme_oracle;
use squeezed_readout::readout::psi_from_rate;
use squeezed_readout::{CombinedConfig, IcsConfig, IesConfig, MeasurementMoments, QubitState, ReadoutParams, SchemeConfig};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug)]
pub struct Draw {
    pub params: ReadoutParams,
    pub scheme: SchemeConfig,
}

fn base() -> impl Strategy<Value = (f64, f64, f64, f64, f64)> {
    (0.05f64..10.0, 0.2f64..2.0, -PI..PI, -PI..PI, 0.0f64..3.0)
}

pub fn standard_draw() -> impl Strategy<Value = Draw> {
    (base(), -2.0f64..2.0).prop_map(|((kt, alpha, phi_in, phi_h, _), chi)| Draw {
        params: ReadoutParams::new(1.0, chi, alpha, phi_in, phi_h, kt).unwrap(),
        scheme: SchemeConfig::Standard,
    })
}

pub fn ies_draw() -> impl Strategy<Value = Draw> {
    (base(), -2.0f64..2.0, 0.0f64..1.5, -PI..PI).prop_map(|((kt, alpha, phi_in, phi_h, _), chi, r, varphi)| Draw {
        params: ReadoutParams::new(1.0, chi, alpha, phi_in, phi_h, kt).unwrap(),
        scheme: SchemeConfig::Ies(IesConfig::new(r, varphi).unwrap()),
    })
}

pub fn ics_draw() -> impl Strategy<Value = Draw> {
    (base(), 0.0f64..2.0, 0.0f64..0.24, -PI..PI).prop_map(|((kt, alpha, phi_in, phi_h, _), chi, omega, theta)| Draw {
        params: ReadoutParams::new(1.0, chi, alpha, phi_in, phi_h, kt).unwrap(),
        scheme: SchemeConfig::Ics(IcsConfig::new(omega, theta).unwrap()),
    })
}

/// Half the draws are matched with a free homodyne angle; the rest are mismatched at 2φ_h = θ.
/// A quarter solve for ω_sq instead of fixing it.
pub fn combined_draw() -> impl Strategy<Value = Draw> {
    (
        (0.1f64..5.0, 0.2f64..2.0, 0.05f64..1.0, 0.02f64..0.2),
        (0.0f64..2.3, -PI..PI, 1.0f64..10.0, any::<bool>()),
        (any::<bool>(), -0.1f64..0.1, -0.2f64..0.2, -PI..PI),
    )
        .prop_map(|((kt, alpha, chi, eps), (r, theta, w, solve), (matched, dr, dp, phi_h))| {
            let p = ReadoutParams::new(1.0, chi, alpha, 0.0, 0.0, kt).unwrap();
            let p = aligned_params(&p, theta).unwrap();
            let mut cfg = CombinedConfig::matched(r, theta).with_epsilon(eps);
            if !solve {
                cfg = cfg.with_omega_sq(w);
            }
            let p = if matched { p.with_phi_h(phi_h).unwrap() } else { p };
            if !matched {
                cfg = cfg.with_mismatch(dr, dp);
            }
            Draw { params: p, scheme: SchemeConfig::Combined(cfg) }
        })
}

/// `n` deterministic samples of a strategy.
pub fn samples<S: Strategy>(strategy: S, n: usize) -> Vec<S::Value> {
    let mut runner = TestRunner::deterministic();
    (0..n).map(|_| strategy.new_tree(&mut runner).expect("strategy").current()).collect()
}

/// Largest of |analytic − oracle| / max(1e-3 |oracle|, 1e-6) over both states and both moments.
/// Values ≤ 1 are within tolerance.
pub fn deviation(draw: &Draw, analytic: &MeasurementMoments) -> f64 {
    let orc = scheme_oracle(&draw.scheme, &draw.params, None).expect("oracle");
    let mut worst = 0.0f64;
    for (k, s) in QubitState::BOTH.into_iter().enumerate() {
        let (om, ov) = orc[k].richardson;
        for (a, o) in [(analytic.signal(s), om), (analytic.noise(s), ov)] {
            worst = worst.max((a - o).abs() / (1e-3 * o.abs()).max(1e-6));
        }
    }
    worst
}

pub fn analytic(draw: &Draw) -> MeasurementMoments {
    draw.scheme.moments(&draw.params).expect("analytic moments")
}

/// Injected-squeezing noise with the shift σχτ replaced by χτ in the transient terms.
pub fn ies_noise_unsigned_shift(p: &ReadoutParams, cfg: &IesConfig, state: QubitState) -> f64 {
    let kt = p.kappa_tau();
    let sg = state.sigma::<f64>();
    let q = sg * psi_from_rate(p.chi(), p.kappa());
    let phase = 2.0 * p.phi_h() - cfg.varphi();
    let shift = p.chi() * p.tau();
    let s2 = (2.0 * q).sin();
    let bracket = 3.0 * phase.cos() - (3.0 - 2.0 * kt) * (4.0 * q + phase).cos() + 6.0 * s2 * (4.0 * q + phase).sin()
        - 16.0 * (-kt / 2.0).exp() * q.cos() * s2 * (3.0 * q + phase + shift).sin()
        + 4.0 * (-kt).exp() * q.cos() * s2 * (3.0 * q + phase + 2.0 * shift).sin();
    kt * (2.0 * cfg.r()).cosh() + 0.5 * bracket * (2.0 * cfg.r()).sinh()
}

/// Moments of a combined draw with the hyperbolic reading of the R₁ factor.
pub fn combined_with_cosh_r1(draw: &Draw) -> MeasurementMoments {
    let SchemeConfig::Combined(cfg) = draw.scheme else { panic!("combined draw expected") };
    let mut m = analytic(draw);
    if cfg.is_matched() {
        return m;
    }
    let res = resolve_combined(&draw.params, &cfg).unwrap();
    let noise = |s| mismatch_noise(&draw.params, &res.disp, cfg.r, res.r_c, cfg.theta, res.varphi, s, R1Form::Cosh).unwrap();
    m.noise_up = noise(QubitState::Up);
    m.noise_down = noise(QubitState::Down);
    m
}
