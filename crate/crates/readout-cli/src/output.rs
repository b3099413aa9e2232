//! CSV tables with fixed 12-significant-digit formatting, and gnuplot scripts.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{CliError, CliResult};

/// `%.12g`-style formatting, independent of locale.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let (mant, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..12).contains(&exp) {
        let fixed = format!("{x:.*}", (11 - exp) as usize);
        trim_zeros(&fixed).to_string()
    } else {
        format!("{}e{}{:02}", trim_zeros(mant), if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => fmt_num(*x),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Num)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self { header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.iter().map(Cell::render).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        out
    }
}

pub fn write_file(path: &Path, content: &str) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    }
    fs::write(path, content).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Writes to `path`, or to stdout when no path is given.
pub fn emit(path: Option<&Path>, content: &str) -> CliResult<()> {
    match path {
        Some(p) => write_file(p, content),
        None => std::io::stdout()
            .write_all(content.as_bytes())
            .map_err(|e| CliError::Io(format!("stdout: {e}"))),
    }
}

pub fn script_path(data: &Path) -> PathBuf {
    data.with_extension("gp")
}

fn file_name(data: &Path) -> String {
    data.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default()
}

/// Curves `ys` against column `x` (0-based column indices) of a CSV table.
pub fn line_script(data: &Path, header: &[String], x: usize, ys: &[usize], log_x: bool, log_y: bool) -> String {
    let name = file_name(data);
    let stem = data.file_stem().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    s.push_str(&format!("set xlabel '{}'\n", header[x].replace('_', "\\_")));
    if log_x {
        s.push_str("set logscale x\n");
    }
    if log_y {
        s.push_str("set logscale y\n");
    }
    s.push_str("set terminal pngcairo size 900,600\n");
    s.push_str(&format!("set output '{stem}.png'\n"));
    let curves: Vec<String> = ys
        .iter()
        .map(|&y| format!("'{name}' using {}:{} with lines title '{}'", x + 1, y + 1, header[y].replace('_', "\\_")))
        .collect();
    s.push_str(&format!("plot {}\n", curves.join(", \\\n     ")));
    s
}

/// All numeric columns after the first against the first.
pub fn table_script(data: &Path, table: &Table, log_x: bool, log_y: bool) -> String {
    let numeric: Vec<usize> = (1..table.header.len())
        .filter(|&j| table.rows.iter().all(|r| !matches!(r[j], Cell::Text(_))))
        .collect();
    line_script(data, &table.header, 0, &numeric, log_x, log_y)
}

/// Heat maps of a long-format grid with columns `kappa_tau,state,x,y,w`, one panel per (κτ, state).
pub fn grid_script(data: &Path, panels: &[(f64, &str)]) -> String {
    let name = file_name(data);
    let stem = data.file_stem().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let cols = panels.len().clamp(1, 2);
    let rows = panels.len().div_ceil(cols).max(1);
    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    s.push_str("set view map\nset size ratio -1\nunset key\n");
    s.push_str("set xlabel 'x'\nset ylabel 'y'\n");
    s.push_str(&format!("set terminal pngcairo size {},{}\n", 500 * cols, 450 * rows));
    s.push_str(&format!("set output '{stem}.png'\n"));
    s.push_str(&format!("set multiplot layout {rows},{cols}\n"));
    for (kt, state) in panels {
        let kt = fmt_num(*kt);
        s.push_str(&format!("set title 'kappa tau = {kt}, {state}'\n"));
        s.push_str(&format!(
            "splot '{name}' every ::1 using 3:4:(($1=={kt} && strcol(2) eq '{state}') ? $5 : NaN) with image\n"
        ));
    }
    s.push_str("unset multiplot\n");
    s
}
