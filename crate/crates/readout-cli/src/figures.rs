//! Figure data sets, with the reference parameter set as defaults.

use std::f64::consts::LN_10;
use std::path::PathBuf;

use rayon::prelude::*;
use squeezed_readout::combined::{aligned_params, chi_sq, critical_photons, resolve_combined};
use squeezed_readout::optimize::{maximize_snr, OptimizedScheme};
use squeezed_readout::phasespace::{ellipse, reconstruct_state};
use squeezed_readout::readout::{required_tone_amplitude, standard_readout_moments};
use squeezed_readout::{
    fidelity_and_error, snr, CombinedConfig, OptimumReport, QubitState, ReadoutParams, SchemeConfig, SchemeEvaluation,
    SnrBounds,
};

use crate::commands::{wigner_tables, write_wigner, WignerPreset};
use crate::error::{CliError, CliResult};
use crate::output::{line_script, script_path, table_script, write_file, Cell, Table};

pub const FIGURES: &[&str] = &[
    "fig2a", "fig2b", "fig2c", "fig3a", "fig3b", "fig4a", "fig4b", "figS1", "figS2", "figS3", "figS4", "figS5",
];

const R: f64 = LN_10;
const EPSILON: f64 = 0.05;
const CHI: f64 = 0.5;
const MISMATCH_P: [f64; 3] = [0.1, 0.05, 0.01];
const MISMATCH_R: [f64; 2] = [0.1, 0.01];
const PHOTON_SAMPLES: usize = 1000;

#[derive(Clone, Debug)]
pub struct FigureOptions {
    pub out_dir: PathBuf,
    pub points: usize,
    pub kt_min: f64,
    pub kt_max: f64,
    pub resolution: usize,
    pub gnuplot: bool,
}

impl FigureOptions {
    fn kappa_taus(&self) -> CliResult<Vec<f64>> {
        if !(self.kt_min > 0.0 && self.kt_max > self.kt_min) || self.points < 2 {
            return Err(CliError::config("need 0 < kt-min < kt-max and at least 2 points"));
        }
        let (a, b) = (self.kt_min.ln(), self.kt_max.ln());
        Ok((0..self.points).map(|k| (a + (b - a) * k as f64 / (self.points - 1) as f64).exp()).collect())
    }
}

fn rows<F>(xs: &[f64], f: F) -> CliResult<Vec<Vec<Cell>>>
where
    F: Fn(f64) -> CliResult<Vec<Cell>> + Sync,
{
    xs.par_iter().map(|&x| f(x)).collect()
}

fn table(header: &[&str], rows: Vec<Vec<Cell>>) -> Table {
    let mut t = Table::new(header.iter().copied());
    for r in rows {
        t.push(r);
    }
    t
}

fn reference(kt: f64) -> CliResult<ReadoutParams> {
    Ok(ReadoutParams::reference(kt)?)
}

fn snr_std(kt: f64) -> CliResult<f64> {
    Ok(snr(&standard_readout_moments(&reference(kt)?))?)
}

fn combined(kt: f64, cfg: CombinedConfig) -> CliResult<SchemeEvaluation> {
    let p = aligned_params(&reference(kt)?, cfg.theta)?;
    Ok(SchemeEvaluation::new(p, SchemeConfig::Combined(cfg))?)
}

fn headline() -> CombinedConfig {
    CombinedConfig::matched(R, 0.0).with_epsilon(EPSILON)
}

fn optimum(kind: OptimizedScheme, kt: f64, free_coupling: bool) -> CliResult<OptimumReport> {
    let bounds = if free_coupling { SnrBounds::standard() } else { SnrBounds::fixed_chi(CHI) };
    Ok(maximize_snr(kind, kt, &bounds)?)
}

fn eval_snr(ev: &SchemeEvaluation) -> CliResult<f64> {
    Ok(snr(&ev.moments()?)?)
}

/// (α_in/√κ at SNR = 1, max photon number at that α_in).
fn tone_and_photons(params: ReadoutParams, scheme: SchemeConfig) -> CliResult<(f64, f64)> {
    let alpha = required_tone_amplitude(&params, 1.0, |p| snr(&scheme.moments(p)?))?;
    let lit = params.with_alpha_in(alpha * params.kappa().sqrt())?;
    let n = SchemeEvaluation::new(lit, scheme)?.max_photon_number(PHOTON_SAMPLES)?;
    Ok((alpha, n))
}

fn references(kt: f64) -> CliResult<[Cell; 3]> {
    let s = snr_std(kt)?;
    Ok([s.into(), (R.exp() * s).into(), ((2.0 * R).exp() * s).into()])
}

struct Written(Vec<PathBuf>);

impl Written {
    fn csv(&mut self, opts: &FigureOptions, name: &str, t: &Table, log_x: bool, log_y: bool) -> CliResult<()> {
        let path = opts.out_dir.join(format!("{name}.csv"));
        write_file(&path, &t.to_csv())?;
        if opts.gnuplot {
            write_file(&script_path(&path), &table_script(&path, t, log_x, log_y))?;
            self.0.push(script_path(&path));
        }
        self.0.push(path);
        Ok(())
    }

    /// Like `csv`, but plots only the named columns.
    fn csv_cols(&mut self, opts: &FigureOptions, name: &str, t: &Table, cols: &[&str], log_y: bool) -> CliResult<()> {
        let path = opts.out_dir.join(format!("{name}.csv"));
        write_file(&path, &t.to_csv())?;
        if opts.gnuplot {
            let ys: Vec<usize> = cols.iter().filter_map(|c| t.header.iter().position(|h| h == c)).collect();
            write_file(&script_path(&path), &line_script(&path, &t.header, 0, &ys, true, log_y))?;
            self.0.push(script_path(&path));
        }
        self.0.push(path);
        Ok(())
    }

    fn wigner(&mut self, opts: &FigureOptions, name: &str, preset: WignerPreset) -> CliResult<()> {
        let evals = preset.evaluations()?;
        let out = wigner_tables(&evals, &QubitState::BOTH, 4.0, opts.resolution)?;
        let prefix = opts.out_dir.join(name);
        write_wigner(&prefix, &out, opts.gnuplot)?;
        for suffix in ["_grid.csv", "_ellipse.csv"] {
            self.0.push(crate::commands::suffixed(&prefix, suffix));
        }
        if opts.gnuplot {
            self.0.push(script_path(&crate::commands::suffixed(&prefix, "_grid.csv")));
        }
        Ok(())
    }
}

pub fn run_figure(name: &str, opts: &FigureOptions) -> CliResult<Vec<PathBuf>> {
    let mut w = Written(Vec::new());
    match name {
        "fig2a" => fig2a(opts, &mut w)?,
        "fig2b" => {
            let t = table(
                &["kappa_tau", "snr_combined", "snr_ies_opt", "snr_ics_opt", "snr_std", "er_snr_std", "e2r_snr_std"],
                rows(&opts.kappa_taus()?, |kt| {
                    let mut row = vec![
                        kt.into(),
                        eval_snr(&combined(kt, headline())?)?.into(),
                        optimum(OptimizedScheme::Ies, kt, false)?.best_snr.into(),
                        optimum(OptimizedScheme::Ics, kt, false)?.best_snr.into(),
                    ];
                    row.extend(references(kt)?);
                    Ok(row)
                })?,
            );
            w.csv(opts, name, &t, true, true)?;
        }
        "fig2c" => {
            let err = |s: f64| Cell::Num(fidelity_and_error(s).1);
            let t = table(
                &["kappa_tau", "error_combined", "error_ies_opt", "error_ics_opt", "error_std"],
                rows(&opts.kappa_taus()?, |kt| {
                    Ok(vec![
                        kt.into(),
                        err(eval_snr(&combined(kt, headline())?)?),
                        err(optimum(OptimizedScheme::Ies, kt, false)?.best_snr),
                        err(optimum(OptimizedScheme::Ics, kt, false)?.best_snr),
                        err(snr_std(kt)?),
                    ])
                })?,
            );
            w.csv(opts, name, &t, true, true)?;
        }
        "fig3a" | "fig3b" => {
            let data = rows(&opts.kappa_taus()?, |kt| {
                let comb = combined(kt, headline())?;
                let ies = optimum(OptimizedScheme::Ies, kt, false)?;
                let ics = optimum(OptimizedScheme::Ics, kt, false)?;
                let points = [
                    tone_and_photons(*comb.params(), *comb.scheme())?,
                    tone_and_photons(ies.params, ies.scheme)?,
                    tone_and_photons(ics.params, ics.scheme)?,
                    tone_and_photons(reference(kt)?, SchemeConfig::Standard)?,
                ];
                let mut row = vec![Cell::Num(kt)];
                if name == "fig3a" {
                    row.extend(points.iter().map(|p| Cell::Num(p.0)));
                } else {
                    row.extend(points.iter().map(|p| Cell::Num(p.1)));
                    row.push(critical_photons(EPSILON).into());
                }
                Ok(row)
            })?;
            let header: &[&str] = if name == "fig3a" {
                &["kappa_tau", "alpha_combined", "alpha_ies_opt", "alpha_ics_opt", "alpha_std"]
            } else {
                &["kappa_tau", "n_combined", "n_ies_opt", "n_ics_opt", "n_std", "n_c"]
            };
            w.csv(opts, name, &table(header, data), true, true)?;
        }
        "fig4a" => {
            let mut header = vec!["kappa_tau".to_string()];
            for dr in MISMATCH_R {
                for dp in MISMATCH_P {
                    header.push(format!("snr_dr{dr}_dp{dp}"));
                }
            }
            header.extend(["snr_std", "er_snr_std", "e2r_snr_std"].map(String::from));
            let data = rows(&opts.kappa_taus()?, |kt| {
                let mut row = vec![Cell::Num(kt)];
                for dr in MISMATCH_R {
                    for dp in MISMATCH_P {
                        row.push(eval_snr(&combined(kt, headline().with_mismatch(dr, dp))?)?.into());
                    }
                }
                row.extend(references(kt)?);
                Ok(row)
            })?;
            let mut t = Table::new(header);
            for r in data {
                t.push(r);
            }
            w.csv(opts, name, &t, true, true)?;
        }
        "fig4b" => {
            let deltas: Vec<f64> = (0..opts.points.max(2)).map(|k| 0.2 * k as f64 / (opts.points.max(2) - 1) as f64).collect();
            let refs = references(1.0)?;
            let t = table(
                &["delta", "snr_vs_delta_p_dr0.1", "snr_vs_delta_r_dp0.05", "snr_std", "er_snr_std", "e2r_snr_std"],
                rows(&deltas, |d| {
                    let mut row = vec![
                        d.into(),
                        eval_snr(&combined(1.0, headline().with_mismatch(0.1, d))?)?.into(),
                        eval_snr(&combined(1.0, headline().with_mismatch(d, 0.05))?)?.into(),
                    ];
                    row.extend(refs.iter().cloned());
                    Ok(row)
                })?,
            );
            w.csv(opts, name, &t, false, true)?;
        }
        "figS1" | "figS3" => {
            let kind = if name == "figS1" { OptimizedScheme::Ies } else { OptimizedScheme::Ics };
            let tag = if name == "figS1" { "ies" } else { "ics" };
            let data = rows(&opts.kappa_taus()?, |kt| {
                let opt = optimum(kind, kt, true)?;
                Ok(vec![
                    kt.into(),
                    opt.best_snr.into(),
                    snr_std(kt)?.into(),
                    opt.get("psi").into(),
                    (2.0 * CHI).atan().into(),
                    opt.get("r").into(),
                    opt.get("exp_r").into(),
                ])
            })?;
            let snr_col = format!("snr_{tag}_opt");
            let psi_col = format!("psi_{tag}_opt");
            let r_col = format!("r_{tag}_opt");
            let header = ["kappa_tau", &snr_col, "snr_std", &psi_col, "psi_std", &r_col, "exp_r_opt"];
            w.csv_cols(opts, name, &table(&header, data), &[snr_col.as_str(), "snr_std"], true)?;
        }
        "figS2" | "figS4" => {
            let kind = if name == "figS2" { OptimizedScheme::Ies } else { OptimizedScheme::Ics };
            let data = rows(&opts.kappa_taus()?, |kt| {
                let opt = optimum(kind, kt, true)?;
                let ev = SchemeEvaluation::new(opt.params, opt.scheme)?;
                let up = ellipse(&reconstruct_state(&ev, QubitState::Up)?);
                let down = ellipse(&reconstruct_state(&ev, QubitState::Down)?);
                Ok(vec![
                    kt.into(),
                    up.theta_n.into(),
                    down.theta_n.into(),
                    up.xi2_n.into(),
                    down.xi2_n.into(),
                    up.xi2_db.into(),
                    down.xi2_db.into(),
                ])
            })?;
            let header = ["kappa_tau", "theta_n_up", "theta_n_down", "xi2_n_up", "xi2_n_down", "xi2_db_up", "xi2_db_down"];
            w.csv(opts, name, &table(&header, data), true, false)?;
            let preset = if name == "figS2" { WignerPreset::FigS2 } else { WignerPreset::FigS4 };
            w.wigner(opts, name, preset)?;
        }
        "figS5" => w.wigner(opts, name, WignerPreset::FigS5)?,
        other => {
            return Err(CliError::config(format!("unknown figure `{other}` (one of {})", FIGURES.join(", "))));
        }
    }
    Ok(w.0)
}

fn fig2a(opts: &FigureOptions, w: &mut Written) -> CliResult<()> {
    let n = opts.points.max(2);
    let omegas: Vec<f64> = (0..n).map(|k| 10f64.powf(-1.0 + 5.0 * k as f64 / (n - 1) as f64)).collect();
    let t = table(
        &["omega_sq_over_kappa", "enhancement_eps_0.1", "enhancement_eps_0.05"],
        rows(&omegas, |om| {
            let e = |eps: f64| -> CliResult<Cell> { Ok((chi_sq(CHI / eps, R, om, eps)? / CHI).into()) };
            Ok(vec![om.into(), e(0.1)?, e(0.05)?])
        })?,
    );
    w.csv(opts, "fig2a", &t, true, false)?;
    let inset = table(
        &["kappa_tau", "omega_sq_over_kappa", "omega_sq_tau"],
        rows(&opts.kappa_taus()?, |kt| {
            let p = aligned_params(&reference(kt)?, 0.0)?;
            let res = resolve_combined(&p, &headline())?;
            Ok(vec![kt.into(), res.disp.omega_sq.into(), (res.disp.omega_sq * p.tau()).into()])
        })?,
    );
    w.csv(opts, "fig2a_inset", &inset, true, true)
}
