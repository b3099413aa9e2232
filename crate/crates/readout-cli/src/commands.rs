use std::path::{Path, PathBuf};

use rayon::prelude::*;
use squeezed_readout::ics::ics_psi;
use squeezed_readout::optimize::{maximize_snr, OptimizedScheme};
use squeezed_readout::oracle::{build_system, oracle_moments, oracle_to_tolerance};
use squeezed_readout::phasespace::{ellipse, reconstruct_state, wigner_grid, window};
use squeezed_readout::{
    psi_from_rate, snr, CombinedConfig, GaussianState2D, QubitState, ReadoutParams, SchemeConfig,
    SchemeEvaluation, SchemeKind, SnrBounds,
};

use crate::config::{ConfigMap, RunConfig, Sweep};
use crate::error::{CliError, CliResult};
use crate::output::{emit, fmt_num, grid_script, line_script, script_path, write_file, Cell, Table};

pub const RECORD_COLUMNS: &[&str] = &[
    "scheme",
    "kappa_tau",
    "signal_up",
    "signal_down",
    "noise_up",
    "noise_down",
    "separation",
    "noise_sum",
    "snr",
    "fidelity",
    "error",
    "psi_up",
    "psi_down",
    "chi_sq_over_kappa",
    "omega_sq_over_kappa",
    "photons_up_tau",
    "photons_down_tau",
    "max_photons",
];

const PHOTON_SAMPLES: usize = 1000;

/// One output record: moments, summary and the resolved derived parameters.
pub fn evaluate(cfg: &RunConfig) -> CliResult<Vec<Cell>> {
    let ev = SchemeEvaluation::new(cfg.params, cfg.scheme)?;
    let p = ev.params();
    let m = ev.moments()?;
    let s = m.summary()?;
    let kappa = p.kappa();
    let (psi_up, psi_down, chi_sq, omega_sq) = match (&cfg.scheme, ev.resolved()) {
        (SchemeConfig::Combined(_), Some(res)) => {
            if res.disp.epsilon_warning() {
                eprintln!("warning: epsilon = {} exceeds the dispersive-regime guide value", res.disp.epsilon);
            }
            (
                Some(res.disp.psi(QubitState::Up)),
                Some(res.disp.psi(QubitState::Down)),
                Some(res.disp.chi_sq / kappa),
                Some(res.disp.omega_sq / kappa),
            )
        }
        (SchemeConfig::Ics(ics), _) => {
            let psi = ics_psi(p, ics);
            (psi, psi, None, None)
        }
        _ => {
            let psi = psi_from_rate(p.chi(), kappa);
            (Some(psi), Some(psi), None, None)
        }
    };
    Ok(vec![
        cfg.scheme.kind().name().into(),
        p.kappa_tau().into(),
        m.signal_up.into(),
        m.signal_down.into(),
        m.noise_up.into(),
        m.noise_down.into(),
        s.separation.into(),
        s.noise_sum.into(),
        s.snr.into(),
        s.fidelity.into(),
        s.error.into(),
        psi_up.into(),
        psi_down.into(),
        chi_sq.into(),
        omega_sq.into(),
        ev.photon_number(QubitState::Up, p.tau())?.into(),
        ev.photon_number(QubitState::Down, p.tau())?.into(),
        ev.max_photon_number(PHOTON_SAMPLES)?.into(),
    ])
}

pub fn cmd_snr(map: &ConfigMap) -> CliResult<()> {
    let cfg = RunConfig::from_map(map)?;
    let mut t = Table::new(RECORD_COLUMNS.iter().copied());
    t.push(evaluate(&cfg)?);
    emit(cfg.output.as_deref(), &t.to_csv())
}

pub fn cmd_sweep(map: &ConfigMap, gnuplot: bool) -> CliResult<()> {
    let sweep = Sweep::from_map(map)?.ok_or_else(|| CliError::config("sweep needs sweep.variable"))?;
    let output = RunConfig::from_map(map)?.output;
    // a swept variable that is already a record column (kappa_tau) is not repeated
    let lead = !RECORD_COLUMNS.contains(&sweep.column().as_str());
    let rows: Vec<CliResult<Vec<Cell>>> = sweep
        .values
        .par_iter()
        .map(|&v| {
            let mut point = map.clone();
            point.insert(&sweep.variable, &format!("{v:e}"))?;
            let mut row = if lead { vec![Cell::Num(v)] } else { Vec::new() };
            row.extend(evaluate(&RunConfig::from_map(&point)?)?);
            Ok(row)
        })
        .collect();
    let mut header: Vec<String> = RECORD_COLUMNS.iter().map(|s| s.to_string()).collect();
    if lead {
        header.insert(0, sweep.column());
    }
    let mut t = Table::new(header);
    for r in rows {
        t.push(r?);
    }
    emit(output.as_deref(), &t.to_csv())?;
    if gnuplot {
        let path = output.ok_or_else(|| CliError::config("--gnuplot needs an output path"))?;
        let v = &sweep.values;
        let log_x = v[0] > 0.0 && v.len() > 2 && ((v[1] / v[0]) - (v[2] / v[1])).abs() < 1e-9 * (v[1] / v[0]);
        let col = |name: &str| t.header.iter().position(|h| h == name).unwrap();
        let script = line_script(&path, &t.header, col(&sweep.column()), &[col("snr")], log_x, true);
        write_file(&script_path(&path), &script)?;
    }
    Ok(())
}

/// |a − o| / max(|a|, 1e-3): at the 1e-3 threshold this accepts 1e-3 relative or 1e-6 absolute.
fn deviation(analytic: f64, oracle: f64) -> f64 {
    (analytic - oracle).abs() / analytic.abs().max(1e-3)
}

pub const ORACLE_TOLERANCE: f64 = 1e-3;

pub fn cmd_oracle_check(map: &ConfigMap, steps: Option<usize>, perturb_noise: f64) -> CliResult<()> {
    let cfg = RunConfig::from_map(map)?;
    let ev = SchemeEvaluation::new(cfg.params, cfg.scheme)?;
    let scheme = match (cfg.scheme, ev.resolved()) {
        // pin ω_sq so that the oracle sees the same effective frequency
        (SchemeConfig::Combined(c), Some(res)) => SchemeConfig::Combined(c.with_omega_sq(res.disp.omega_sq)),
        (s, _) => s,
    };
    let mut m = ev.moments()?;
    m.noise_up *= 1.0 + perturb_noise;
    m.noise_down *= 1.0 + perturb_noise;
    let mut oracle = Vec::new();
    for s in QubitState::BOTH {
        let sys = build_system(&scheme, ev.params(), s)?;
        oracle.push(match steps {
            Some(k) => oracle_moments(&sys, k)?,
            None => oracle_to_tolerance(&sys, 1e-7)?,
        });
    }
    let mut t = Table::new(["quantity", "state", "analytic", "oracle", "rel_deviation", "residual", "steps"]);
    let mut worst: f64 = 0.0;
    for (k, s) in QubitState::BOTH.iter().enumerate() {
        let o = &oracle[k];
        for (name, a, b, res) in [
            ("mean", m.signal(*s), o.richardson.0, o.residual.0),
            ("variance", m.noise(*s), o.richardson.1, o.residual.1),
        ] {
            let d = deviation(a, b);
            worst = worst.max(d / ORACLE_TOLERANCE);
            t.push(vec![name.into(), s.label().into(), a.into(), b.into(), d.into(), res.into(), (o.steps as f64).into()]);
        }
    }
    let a_snr = snr(&m)?;
    let o_snr = (oracle[0].richardson.0 - oracle[1].richardson.0).abs()
        / (oracle[0].richardson.1 + oracle[1].richardson.1).sqrt();
    let d = deviation(a_snr, o_snr);
    worst = worst.max(d / ORACLE_TOLERANCE);
    t.push(vec!["snr".into(), "both".into(), a_snr.into(), o_snr.into(), d.into(), Cell::Empty, Cell::Empty]);
    emit(cfg.output.as_deref(), &t.to_csv())?;
    if worst >= 1.0 {
        return Err(CliError::OracleMismatch(format!(
            "largest deviation is {} times the {ORACLE_TOLERANCE:e} threshold",
            fmt_num(worst)
        )));
    }
    Ok(())
}

pub fn parse_list(s: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .map(|v| crate::config::parse_number(v).ok_or_else(|| CliError::config(format!("`{v}` is not a number"))))
        .collect()
}

pub fn cmd_mismatch(map: &ConfigMap, delta_p: &[f64], delta_r: &[f64], gnuplot: bool) -> CliResult<()> {
    let base = RunConfig::with_scheme(map, SchemeKind::Combined)?;
    let SchemeConfig::Combined(matched) = base.scheme else { unreachable!() };
    let matched = CombinedConfig { delta_r: 0.0, delta_p: 0.0, ..matched };
    let p = base.params;
    let snr_matched = snr(&SchemeConfig::Combined(matched).moments(&p)?)?;
    let snr_std = snr(&SchemeConfig::Standard.moments(&p.with_phi_in(0.0)?.with_phi_h(std::f64::consts::FRAC_PI_2)?)?)?;
    let floor = p.kappa_tau() * (-2.0 * matched.r).exp();
    let points: Vec<(f64, f64)> = delta_r.iter().flat_map(|&dr| delta_p.iter().map(move |&dp| (dr, dp))).collect();
    let rows: Vec<CliResult<Vec<Cell>>> = points
        .par_iter()
        .map(|&(dr, dp)| {
            let m = SchemeConfig::Combined(matched.with_mismatch(dr, dp)).moments(&p)?;
            let s = snr(&m)?;
            Ok(vec![
                dr.into(),
                dp.into(),
                m.noise_up.into(),
                m.noise_down.into(),
                (m.noise_up / floor).into(),
                s.into(),
                (s / snr_matched).into(),
                (s / (matched.r.exp() * snr_std)).into(),
            ])
        })
        .collect();
    let mut t = Table::new([
        "delta_r",
        "delta_p",
        "noise_up",
        "noise_down",
        "noise_up_over_matched",
        "snr",
        "snr_over_matched",
        "snr_over_er_snr_std",
    ]);
    for r in rows {
        t.push(r?);
    }
    emit(base.output.as_deref(), &t.to_csv())?;
    if gnuplot {
        let path = base.output.ok_or_else(|| CliError::config("--gnuplot needs an output path"))?;
        let script = line_script(&path, &t.header, 1, &[5], false, true);
        write_file(&script_path(&path), &script)?;
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WignerPreset {
    Vacuum,
    FigS2,
    FigS4,
    FigS5,
}

impl WignerPreset {
    pub fn parse(s: &str) -> CliResult<Self> {
        match s {
            "vacuum" => Ok(Self::Vacuum),
            "figS2" => Ok(Self::FigS2),
            "figS4" => Ok(Self::FigS4),
            "figS5" => Ok(Self::FigS5),
            _ => Err(CliError::config(format!("unknown preset `{s}` (vacuum|figS2|figS4|figS5)"))),
        }
    }

    pub const KAPPA_TAUS: [f64; 3] = [1.0, 2.0, 5.0];

    /// Scheme evaluations for each preset κτ.
    pub fn evaluations(self) -> CliResult<Vec<SchemeEvaluation>> {
        Self::KAPPA_TAUS
            .iter()
            .map(|&kt| -> CliResult<SchemeEvaluation> {
                Ok(match self {
                    Self::Vacuum => {
                        let p = ReadoutParams::reference(kt)?.with_alpha_in(0.0)?;
                        SchemeEvaluation::new(p, SchemeConfig::Standard)?
                    }
                    Self::FigS2 | Self::FigS4 => {
                        let kind = if self == Self::FigS2 { OptimizedScheme::Ies } else { OptimizedScheme::Ics };
                        let opt = maximize_snr(kind, kt, &SnrBounds::standard())?;
                        SchemeEvaluation::new(opt.params, opt.scheme)?
                    }
                    Self::FigS5 => {
                        let p = squeezed_readout::combined::aligned_params(&ReadoutParams::reference(kt)?, 0.0)?;
                        SchemeEvaluation::new(p, SchemeConfig::Combined(CombinedConfig::matched(1.0, 0.0)))?
                    }
                })
            })
            .collect()
    }
}

pub struct WignerOutput {
    pub grid: Table,
    pub ellipses: Table,
    pub panels: Vec<(f64, &'static str)>,
}

/// Grids for both qubit states of each evaluation on one shared window per evaluation.
pub fn wigner_tables(evals: &[SchemeEvaluation], states: &[QubitState], sigmas: f64, resolution: usize) -> CliResult<WignerOutput> {
    let mut grid = Table::new(["kappa_tau", "state", "x", "y", "w"]);
    let mut ellipses = Table::new([
        "kappa_tau", "state", "mean_x", "mean_y", "dxx", "dxy", "dyy", "theta_n", "xi2_n", "xi2_db",
    ]);
    let mut panels = Vec::new();
    for ev in evals {
        let kt = ev.kappa_tau();
        let gs: Vec<GaussianState2D> = states.iter().map(|&s| reconstruct_state(ev, s)).collect::<Result<_, _>>()?;
        let (mut xr, mut yr) = window(&gs[0], sigmas);
        for g in &gs[1..] {
            let (x, y) = window(g, sigmas);
            xr = (xr.0.min(x.0), xr.1.max(x.1));
            yr = (yr.0.min(y.0), yr.1.max(y.1));
        }
        for (g, s) in gs.iter().zip(states) {
            let e = ellipse(g);
            ellipses.push(vec![
                kt.into(),
                s.label().into(),
                g.mean.0.into(),
                g.mean.1.into(),
                g.cov[0][0].into(),
                g.cov[0][1].into(),
                g.cov[1][1].into(),
                e.theta_n.into(),
                e.xi2_n.into(),
                e.xi2_db.into(),
            ]);
            let w = wigner_grid(g, xr, yr, resolution)?;
            for (iy, &y) in w.ys.iter().enumerate() {
                for (ix, &x) in w.xs.iter().enumerate() {
                    grid.push(vec![kt.into(), s.label().into(), x.into(), y.into(), w.at(ix, iy).into()]);
                }
            }
            panels.push((kt, s.label()));
        }
    }
    Ok(WignerOutput { grid, ellipses, panels })
}

pub struct WignerArgs<'a> {
    pub preset: Option<&'a str>,
    pub states: Vec<QubitState>,
    pub sigmas: f64,
    pub resolution: usize,
    pub prefix: PathBuf,
    pub gnuplot: bool,
}

pub fn cmd_wigner(map: &ConfigMap, args: &WignerArgs) -> CliResult<()> {
    let evals = match args.preset {
        Some(p) => WignerPreset::parse(p)?.evaluations()?,
        None => {
            let cfg = RunConfig::from_map(map)?;
            vec![SchemeEvaluation::new(cfg.params, cfg.scheme)?]
        }
    };
    let out = wigner_tables(&evals, &args.states, args.sigmas, args.resolution)?;
    write_wigner(&args.prefix, &out, args.gnuplot)
}

pub fn write_wigner(prefix: &Path, out: &WignerOutput, gnuplot: bool) -> CliResult<()> {
    let grid_path = suffixed(prefix, "_grid.csv");
    write_file(&grid_path, &out.grid.to_csv())?;
    write_file(&suffixed(prefix, "_ellipse.csv"), &out.ellipses.to_csv())?;
    if gnuplot {
        write_file(&script_path(&grid_path), &grid_script(&grid_path, &out.panels))?;
    }
    Ok(())
}

pub fn suffixed(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}
