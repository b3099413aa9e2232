//! One PASS/FAIL line per acceptance criterion; exits non-zero if any criterion fails.

mod common;

use std::f64::consts::{LN_10, PI};
use std::time::Instant;

use common::*;
use squeezed_readout::combined::{
    aligned_params, asymptotic_snr, combined_moments, combined_noise, critical_photons, resolve_combined,
    separation_components_at, TimeLimit,
};
use squeezed_readout::ics::ics_photon_number;
use squeezed_readout::ies::{ies_noise, ies_photon_number};
use squeezed_readout::optimize::{maximize_snr, OptimizedScheme};
use squeezed_readout::phasespace::{ellipse, reconstruct_state, reconstruct_with_angles, wigner_grid, window};
use squeezed_readout::readout::{required_tone_amplitude, standard_readout_moments};
use squeezed_readout::{
    fidelity_and_error, snr, CombinedConfig, IcsConfig, IesConfig, QubitState, ReadoutParams, SchemeConfig,
    SchemeEvaluation, SnrBounds,
};

type Outcome = (bool, String);

fn within(x: f64, target: f64, tol: f64) -> bool {
    (x - target).abs() <= tol
}

fn reference(kt: f64) -> ReadoutParams {
    ReadoutParams::reference(kt).unwrap()
}

fn snr_std(kt: f64) -> f64 {
    snr(&standard_readout_moments(&reference(kt))).unwrap()
}

fn combined_snr(kt: f64, cfg: &CombinedConfig) -> f64 {
    let p = aligned_params(&reference(kt), cfg.theta).unwrap();
    snr(&combined_moments(&p, cfg).unwrap()).unwrap()
}

fn headline() -> CombinedConfig {
    CombinedConfig::matched(LN_10, 0.0)
}

fn criterion_1() -> Outcome {
    let mut worst = 0.0f64;
    for r in [0.0, 0.5, LN_10] {
        for kt in [0.1, 1.0, 10.0] {
            for theta in [0.0, 0.9, -2.4] {
                let p = aligned_params(&reference(kt), theta).unwrap();
                let n = combined_noise(&p, r, theta);
                worst = worst.max((n / (kt * (-2.0 * r).exp()) - 1.0).abs());
            }
        }
    }
    (worst <= 1e-12, format!("max relative deviation {worst:.3e}"))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let comb = combined_snr(1.0, &headline());
    let std = snr_std(1.0);
    let ies = maximize_snr(OptimizedScheme::Ies, 1.0, &SnrBounds::fixed_chi(0.5)).unwrap().best_snr;
    let ics = maximize_snr(OptimizedScheme::Ics, 1.0, &SnrBounds::fixed_chi(0.5)).unwrap().best_snr;
    let secs = start.elapsed().as_secs_f64();
    let ok = within(comb, 5.5, 0.2) && within(std, 0.18, 0.02) && within(ies, 0.29, 0.02) && within(ics, 0.21, 0.02) && secs < 10.0;
    (ok, format!("combined {comb:.4}, standard {std:.4}, IES-opt {ies:.4}, ICS-opt {ics:.4}, {secs:.2} s"))
}

fn criterion_3() -> Outcome {
    let (_, e_comb) = fidelity_and_error(combined_snr(1.0, &headline()));
    let (_, e55) = fidelity_and_error(5.5);
    let ies = maximize_snr(OptimizedScheme::Ies, 1.0, &SnrBounds::fixed_chi(0.5)).unwrap().best_snr;
    let ics = maximize_snr(OptimizedScheme::Ics, 1.0, &SnrBounds::fixed_chi(0.5)).unwrap().best_snr;
    let base: Vec<f64> = [snr_std(1.0), ies, ics].iter().map(|&s| fidelity_and_error(s).1).collect();
    let ok = (3e-5..=6e-5).contains(&e55) && base.iter().all(|e| (0.40..=0.47).contains(e));
    (
        ok,
        format!(
            "error(5.5) {e55:.3e} (combined point {e_comb:.3e}); standard/IES/ICS {:.3}/{:.3}/{:.3}",
            base[0], base[1], base[2]
        ),
    )
}

fn criterion_4() -> Outcome {
    let cfg = headline();
    let r = cfg.r;
    let short_kt = 1e-3;
    let long_kt = 1e3;
    let ps = aligned_params(&reference(short_kt), 0.0).unwrap();
    let pl = aligned_params(&reference(long_kt), 0.0).unwrap();
    let rs = resolve_combined(&ps, &cfg).unwrap();
    let rl = resolve_combined(&pl, &cfg).unwrap();
    let short_ratio = combined_snr(short_kt, &cfg) / snr_std(short_kt);
    let short_target = asymptotic_snr(TimeLimit::Short, &ps, &rs.disp, r, 1.0);
    let long_ratio = combined_snr(long_kt, &cfg) / snr_std(long_kt);
    let long_target = asymptotic_snr(TimeLimit::Long, &pl, &rl.disp, r, 1.0);
    let w_short = rs.disp.omega_sq * ps.tau();
    let w_long_target = 0.5 / rl.disp.psi_sq.cos();
    let checks = [
        (short_ratio / short_target - 1.0).abs() <= 0.05,
        (long_ratio / long_target - 1.0).abs() <= 0.05,
        (w_short / 2.58 - 1.0).abs() <= 0.01,
        (rl.disp.omega_sq / w_long_target - 1.0).abs() <= 0.01,
    ];
    let mark = |b: bool| if b { "ok" } else { "miss" };
    (
        checks.iter().all(|&b| b),
        format!(
            "short SNR/SNR_std {short_ratio:.2} vs {short_target:.2} [{}]; long {long_ratio:.3} vs {long_target:.3} [{}]; \
             short omega_sq*tau {w_short:.4} vs 2.58 [{}]; long omega_sq {:.4} vs {w_long_target:.4} [{}]",
            mark(checks[0]),
            mark(checks[1]),
            mark(checks[2]),
            rl.disp.omega_sq,
            mark(checks[3])
        ),
    )
}

fn tone_and_photons(params: ReadoutParams, scheme: SchemeConfig) -> (f64, f64) {
    let alpha = required_tone_amplitude(&params, 1.0, |p| snr(&scheme.moments(p)?)).unwrap();
    let lit = params.with_alpha_in(alpha * params.kappa().sqrt()).unwrap();
    let ev = SchemeEvaluation::new(lit, scheme).unwrap();
    (alpha, ev.max_photon_number(1000).unwrap())
}

fn criterion_5() -> Outcome {
    let kt = 0.2;
    let cfg = headline();
    let (a_c, n_c) = tone_and_photons(aligned_params(&reference(kt), 0.0).unwrap(), SchemeConfig::Combined(cfg));
    let ies = maximize_snr(OptimizedScheme::Ies, kt, &SnrBounds::fixed_chi(0.5)).unwrap();
    let (a_e, n_e) = tone_and_photons(ies.params, ies.scheme);
    let ics = maximize_snr(OptimizedScheme::Ics, kt, &SnrBounds::fixed_chi(0.5)).unwrap();
    let (a_i, n_i) = tone_and_photons(ics.params, ics.scheme);
    let ncrit = critical_photons(cfg.epsilon);
    let ok = within(a_c, 3.5, 0.2)
        && within(n_c, 29.0, 2.0)
        && within(a_e, 52.0, 3.0)
        && within(n_e, 107.0, 8.0)
        && within(a_i, 239.0, 15.0)
        && within(n_i, 2238.0, 150.0)
        && ncrit == 100.0;
    (
        ok,
        format!(
            "combined alpha {a_c:.3} n {n_c:.2}; IES alpha {a_e:.2} n {n_e:.1}; ICS alpha {a_i:.1} n {n_i:.0}; n_c {ncrit}"
        ),
    )
}

fn criterion_6() -> Outcome {
    let kt = 1.0;
    let base = headline();
    let ratio = combined_snr(kt, &base.with_mismatch(0.1, 0.1)) / (LN_10.exp() * snr_std(kt));
    let matched = combined_snr(kt, &base);
    let mut gaps = Vec::new();
    for d in [1e-2, 1e-4, 1e-6, 1e-8] {
        gaps.push((combined_snr(kt, &base.with_mismatch(d, d)) - matched).abs() / matched);
    }
    let p = aligned_params(&reference(kt), 0.0).unwrap();
    let m = combined_moments(&p, &base.with_mismatch(1e-8, 1e-8)).unwrap();
    let noise_gap = (m.noise_up / (kt * (-2.0 * LN_10).exp()) - 1.0).abs();
    let monotone = gaps.windows(2).all(|w| w[1] <= w[0]);
    let ok = within(ratio, 0.72, 0.04) && monotone && gaps[3] < 1e-6 && noise_gap < 1e-6;
    (
        ok,
        format!(
            "SNR/(e^r SNR_std) {ratio:.4}; relative SNR gap at delta 1e-2..1e-8: {:.1e} {:.1e} {:.1e} {:.1e}; noise gap {noise_gap:.1e}",
            gaps[0], gaps[1], gaps[2], gaps[3]
        ),
    )
}

fn criterion_7() -> Outcome {
    let p = aligned_params(&reference(1.0), 0.0).unwrap();
    let (par, perp) = separation_components_at(&p, 6.5 / 2.0, 4.5 / 2.0, 0.0);
    let ok = within(par, 0.47, 0.02) && within(perp, 1.1, 0.05);
    (ok, format!("parallel {par:.4} (expected 0.47), perpendicular {perp:.4} (expected 1.1), units alpha_in/sqrt(kappa)"))
}

fn criterion_8() -> Outcome {
    let r = 1.0;
    let mut parts = Vec::new();
    let mut ok = true;
    for kt in [1e-3, 1e3] {
        let p = reference(kt);
        let total = [0.0, PI]
            .iter()
            .map(|&offset| {
                let cfg = IesConfig::with_phase_offset(r, p.phi_h(), offset).unwrap();
                ies_noise(&p, &cfg, QubitState::Up) + ies_noise(&p, &cfg, QubitState::Down)
            })
            .fold(f64::INFINITY, f64::min);
        let rel = total / (2.0 * kt * (-2.0 * r).exp());
        ok &= (rel - 1.0).abs() <= 0.02;
        parts.push(format!("kappa_tau {kt:e}: ratio {rel:.4}"));
    }
    (ok, parts.join("; "))
}

fn criterion_9() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for kt in [50.0, 100.0, 1000.0] {
        let opt = maximize_snr(OptimizedScheme::Ics, kt, &SnrBounds::standard()).unwrap();
        let ev = SchemeEvaluation::new(opt.params, opt.scheme).unwrap();
        let db: Vec<f64> = QubitState::BOTH
            .iter()
            .map(|&s| ellipse(&reconstruct_state(&ev, s).unwrap()).xi2_db)
            .collect();
        ok &= db.iter().all(|d| within(-d, 1.27, 0.05));
        parts.push(format!("kappa_tau {kt}: {:.3}/{:.3} dB", db[0], db[1]));
    }
    (ok, parts.join("; "))
}

fn criterion_10() -> Outcome {
    let mut worst = Vec::new();
    let mut ok = true;
    for (name, draws) in [
        ("standard", samples(standard_draw(), 50)),
        ("ies", samples(ies_draw(), 50)),
        ("ics", samples(ics_draw(), 50)),
        ("combined", samples(combined_draw(), 50)),
    ] {
        let w = draws.iter().map(|d| deviation(d, &analytic(d))).fold(0.0, f64::max);
        ok &= w <= 1.0;
        worst.push(format!("{name} {w:.2e}"));
    }
    let ies = samples(ies_draw(), 50);
    let control_ies = ies.iter().any(|d| {
        let SchemeConfig::Ies(cfg) = d.scheme else { unreachable!() };
        let mut m = analytic(d);
        m.noise_up = ies_noise_unsigned_shift(&d.params, &cfg, QubitState::Up);
        m.noise_down = ies_noise_unsigned_shift(&d.params, &cfg, QubitState::Down);
        deviation(d, &m) > 1.0
    });
    let comb = samples(combined_draw(), 50);
    let control_r1 = comb
        .iter()
        .filter(|d| matches!(d.scheme, SchemeConfig::Combined(c) if !c.is_matched()))
        .all(|d| deviation(d, &combined_with_cosh_r1(d)) > 1.0);
    ok &= control_ies && control_r1;
    (
        ok,
        format!(
            "worst normalised deviation {}; controls rejected: unsigned shift {control_ies}, cosh R1 {control_r1}",
            worst.join(", ")
        ),
    )
}

fn criterion_11() -> Outcome {
    let mut draws = samples(standard_draw(), 20);
    draws.extend(samples(ies_draw(), 50));
    draws.extend(samples(ics_draw(), 50));
    draws.extend(
        samples(combined_draw(), 50)
            .into_iter()
            .filter(|d| matches!(d.scheme, SchemeConfig::Combined(c) if c.is_matched())),
    );
    let (mut min_det, mut angle_gap, mut norm_gap, mut comb_gap) = (f64::INFINITY, 0.0f64, 0.0f64, 0.0f64);
    for d in &draws {
        let ev = SchemeEvaluation::new(d.params, d.scheme).unwrap();
        let states: Vec<_> = QubitState::BOTH.iter().map(|&s| reconstruct_state(&ev, s).unwrap()).collect();
        for (k, &s) in QubitState::BOTH.iter().enumerate() {
            let a = states[k];
            min_det = min_det.min(16.0 * a.det());
            let b = reconstruct_with_angles(&ev, s, [PI / 6.0, PI / 3.0, PI / 2.0]).unwrap();
            for i in 0..2 {
                for j in 0..2 {
                    angle_gap = angle_gap.max((a.cov[i][j] - b.cov[i][j]).abs() / (1.0 + a.cov[i][j].abs()));
                }
            }
            let (wx, wy) = window(&a, 6.0);
            // two grid points per conditional standard deviation along each axis
            let tilt = (a.cov[0][0] * a.cov[1][1] / a.det()).sqrt();
            let res = ((24.0 * tilt).ceil() as usize + 1).max(121);
            norm_gap = norm_gap.max((wigner_grid(&a, wx, wy, res).unwrap().integral() - 1.0).abs());
        }
        if matches!(d.scheme, SchemeConfig::Combined(_)) {
            for i in 0..2 {
                for j in 0..2 {
                    comb_gap = comb_gap.max((states[0].cov[i][j] - states[1].cov[i][j]).abs());
                }
            }
        }
    }
    let opt = maximize_snr(OptimizedScheme::Ies, 1.0, &SnrBounds::fixed_chi(0.5)).unwrap();
    let ev = SchemeEvaluation::new(opt.params, opt.scheme).unwrap();
    let up = ellipse(&reconstruct_state(&ev, QubitState::Up).unwrap()).theta_n;
    let down = ellipse(&reconstruct_state(&ev, QubitState::Down).unwrap()).theta_n;
    let ok = min_det >= 1.0 - 1e-9
        && angle_gap <= 1e-9
        && norm_gap <= 1e-6
        && comb_gap <= 1e-12
        && (up + down).abs() <= 1e-6
        && up.abs() > 1e-3;
    (
        ok,
        format!(
            "{} draws: min 16 det D {min_det:.6}, angle-set gap {angle_gap:.1e}, Wigner norm gap {norm_gap:.1e}, \
             combined D state gap {comb_gap:.1e}; IES optimum theta_N {up:.6}/{down:.6}",
            draws.len()
        ),
    )
}

fn criterion_12() -> Outcome {
    let mut worst = 0.0f64;
    let gap = |a: f64, b: f64| (a - b).abs() / b.abs().max(1.0);
    for d in samples(standard_draw(), 30) {
        let p = d.params;
        let std = standard_readout_moments(&p);
        let ies = SchemeConfig::Ies(IesConfig::new(0.0, 0.7).unwrap()).moments(&p).unwrap();
        let ics_cfg = IcsConfig::new(0.0, -1.3).unwrap();
        let ics = SchemeConfig::Ics(ics_cfg).moments(&p).unwrap();
        for s in QubitState::BOTH {
            for (a, b) in [(ies.signal(s), std.signal(s)), (ics.signal(s), std.signal(s)), (ies.noise(s), std.noise(s)), (ics.noise(s), std.noise(s))] {
                worst = worst.max(gap(a, b));
            }
            for t in [0.0, 0.3 * p.tau(), p.tau()] {
                let n_std = ies_photon_number(&p, &IesConfig::new(0.0, 0.0).unwrap(), t);
                worst = worst.max(gap(ics_photon_number(&p, &ics_cfg, s, t).unwrap(), n_std));
            }
        }
    }
    (worst <= 1e-10, format!("max relative gap {worst:.2e} over signals, noises and photon numbers"))
}

fn main() {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 12] = [
        ("matched-noise law", criterion_1),
        ("headline SNRs", criterion_2),
        ("error magnitudes", criterion_3),
        ("asymptotics", criterion_4),
        ("tone amplitude and photon numbers", criterion_5),
        ("mismatch robustness", criterion_6),
        ("perpendicular/parallel worked example", criterion_7),
        ("injected-squeezing noise limits", criterion_8),
        ("intracavity long-time squeezing degree", criterion_9),
        ("oracle equivalence", criterion_10),
        ("phase-space properties", criterion_11),
        ("reduction identities", criterion_12),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let (ok, detail) = f();
        if !ok {
            failed += 1;
        }
        println!("criterion {:>2} {:<40} {}  {}", k + 1, name, if ok { "PASS" } else { "FAIL" }, detail);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
