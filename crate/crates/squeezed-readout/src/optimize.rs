//! Bracketed root finding and box-constrained maximisation of the readout SNR.

use rayon::prelude::*;

use crate::error::{ReadoutError, Result};
use crate::ics::IcsConfig;
use crate::ies::IesConfig;
use crate::readout::{snr, ReadoutParams};
use crate::scalar::{c, Real};
use crate::scheme::SchemeConfig;

/// Bisection on a sign-changing bracket. Stops once the bracket is narrower than `tol`
/// (never below the floating-point resolution) and returns the probed point with the smallest |f|.
pub fn bisect<T: Real, F: Fn(T) -> T>(f: F, lo: T, hi: T, tol: T) -> Result<T> {
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == T::zero() {
        return Ok(a);
    }
    if fb == T::zero() {
        return Ok(b);
    }
    if !(fa * fb < T::zero()) {
        return Err(ReadoutError::InvalidBracket {
            flo: fa.to_f64().unwrap_or(f64::NAN),
            fhi: fb.to_f64().unwrap_or(f64::NAN),
        });
    }
    let tol = tol.max(T::epsilon() * a.abs().max(b.abs()));
    let cap = ((b - a) / tol).log2().ceil().to_usize().unwrap_or(0) + 2;
    for _ in 0..cap {
        if b - a <= tol {
            break;
        }
        let m = a + (b - a) * c(0.5);
        let fm = f(m);
        if fm == T::zero() {
            return Ok(m);
        }
        if (fm < T::zero()) == (fa < T::zero()) {
            a = m;
            fa = fm;
        } else {
            b = m;
            fb = fm;
        }
    }
    let m = a + (b - a) * c(0.5);
    let fm = f(m);
    let best = [(a, fa), (b, fb), (m, fm)]
        .into_iter()
        .fold((m, fm), |acc, p| if p.1.abs() < acc.1.abs() { p } else { acc });
    Ok(best.0)
}

/// Golden-section maximisation of a unimodal function on `[lo, hi]`.
/// Returns (argmax, max, evaluations, converged).
pub fn golden_section_max<T: Real, F: FnMut(T) -> T>(mut f: F, lo: T, hi: T, tol: T, max_iter: usize) -> (T, T, usize, bool) {
    let inv_phi = (c::<T>(5.0).sqrt() - T::one()) * c(0.5);
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    let mut evals = 2;
    let mut converged = false;
    for _ in 0..max_iter {
        if b - a <= tol {
            converged = true;
            break;
        }
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
        evals += 1;
    }
    if f1 >= f2 {
        (x1, f1, evals, converged)
    } else {
        (x2, f2, evals, converged)
    }
}

/// Result of [`maximize_box`].
#[derive(Clone, Debug, PartialEq)]
pub struct BoxOptimum<T> {
    pub x: Vec<T>,
    pub value: T,
    pub grid_best: T,
    pub evaluations: usize,
    pub converged: bool,
}

pub const GRID_POINTS: usize = 64;
pub const REFINE_TOL: f64 = 1e-6;
pub const MAX_CYCLES: usize = 5000;

fn lex_less<T: Real>(a: &[T], b: &[T]) -> bool {
    for (x, y) in a.iter().zip(b) {
        if x < y {
            return true;
        }
        if x > y {
            return false;
        }
    }
    false
}

/// Grid search followed by coordinate-wise golden-section refinement within one grid cell.
///
/// Non-finite objective values count as infeasible. Ties are broken towards the lexicographically
/// smallest point in the declared coordinate order.
pub fn maximize_box<T, F>(f: F, lower: &[T], upper: &[T], grid_points: usize) -> Result<BoxOptimum<T>>
where
    T: Real,
    F: Fn(&[T]) -> T + Sync,
{
    let dims = lower.len();
    if dims == 0 || upper.len() != dims || grid_points < 2 {
        return Err(ReadoutError::invalid("bounds", "need matching non-empty bounds and at least 2 grid points"));
    }
    if lower.iter().zip(upper).any(|(l, u)| !(l <= u) || !l.is_finite() || !u.is_finite()) {
        return Err(ReadoutError::invalid("bounds", "each lower bound must be finite and not above its upper bound"));
    }
    let axis_points: Vec<usize> = lower.iter().zip(upper).map(|(l, u)| if l == u { 1 } else { grid_points }).collect();
    let node = |d: usize, k: usize| -> T {
        if axis_points[d] == 1 {
            lower[d]
        } else {
            lower[d] + (upper[d] - lower[d]) * c::<T>(k as f64 / (axis_points[d] - 1) as f64)
        }
    };
    let total: usize = axis_points.iter().product();
    let samples: Vec<(Vec<T>, T)> = (0..total)
        .into_par_iter()
        .map(|mut idx| {
            let mut x = vec![T::zero(); dims];
            for d in (0..dims).rev() {
                x[d] = node(d, idx % axis_points[d]);
                idx /= axis_points[d];
            }
            let v = f(&x);
            (x, if v.is_finite() { v } else { T::neg_infinity() })
        })
        .collect();
    let mut best = samples[0].clone();
    for s in &samples[1..] {
        if s.1 > best.1 || (s.1 == best.1 && lex_less(&s.0, &best.0)) {
            best = s.clone();
        }
    }
    let grid_best = best.1;
    let mut evaluations = total;
    if grid_best == T::neg_infinity() {
        return Ok(BoxOptimum { x: best.0, value: grid_best, grid_best, evaluations, converged: false });
    }
    let cell: Vec<T> = (0..dims)
        .map(|d| if axis_points[d] == 1 { T::zero() } else { (upper[d] - lower[d]) / c::<T>((axis_points[d] - 1) as f64) })
        .collect();
    let (mut x, mut value) = best;
    let tol = c::<T>(REFINE_TOL);
    let mut converged = false;
    for _ in 0..MAX_CYCLES {
        let mut moved = T::zero();
        for d in 0..dims {
            if cell[d] == T::zero() {
                continue;
            }
            let lo = (x[d] - cell[d]).max(lower[d]);
            let hi = (x[d] + cell[d]).min(upper[d]);
            let mut probe = x.clone();
            let (xd, vd, n, _) = golden_section_max(
                |t| {
                    probe[d] = t;
                    let v = f(&probe);
                    if v.is_finite() { v } else { T::neg_infinity() }
                },
                lo,
                hi,
                tol,
                MAX_CYCLES,
            );
            evaluations += n;
            if vd > value {
                moved = moved.max((xd - x[d]).abs());
                x[d] = xd;
                value = vd;
            }
        }
        if moved <= tol {
            converged = true;
            break;
        }
    }
    Ok(BoxOptimum { x, value, grid_best, evaluations, converged })
}

/// Coupling coordinate for the SNR search.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CouplingAxis<T> {
    /// ψ with tan ψ = 2χ/κ (IES) or 2λ/κ (ICS).
    Psi(T, T),
    /// χ/κ directly.
    Chi(T, T),
}

/// Treatment of the squeezing phase.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum PhaseSearch {
    /// φ − 2φ_h ∈ {0, π} for IES; 2φ_h − θ ∈ {±π/2} for ICS.
    #[default]
    Extremal,
    /// Additional continuous phase coordinate over (−π, π].
    Continuous,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SnrBounds<T> {
    pub coupling: CouplingAxis<T>,
    pub r: (T, T),
    pub phase: PhaseSearch,
    pub grid_points: usize,
}

impl<T: Real> SnrBounds<T> {
    /// ψ ∈ [0, π/2) and 1 ≤ e^r ≤ 10.
    pub fn standard() -> Self {
        Self {
            coupling: CouplingAxis::Psi(T::zero(), T::FRAC_PI_2() - c(1e-6)),
            r: (T::zero(), c::<T>(10.0).ln()),
            phase: PhaseSearch::Extremal,
            grid_points: GRID_POINTS,
        }
    }

    /// χ fixed at κ/2 with r free in 1 ≤ e^r ≤ 10.
    pub fn fixed_chi(chi_over_kappa: T) -> Self {
        Self { coupling: CouplingAxis::Chi(chi_over_kappa, chi_over_kappa), ..Self::standard() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OptimizedScheme {
    Ies,
    Ics,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimumReport<T> {
    pub best_snr: T,
    pub argmax: Vec<(&'static str, T)>,
    pub evaluations: usize,
    pub converged: bool,
    /// Parameters (κ = 1, α_in = 1, φ_in = 0, φ_h = π/2) and scheme at the optimum.
    pub params: ReadoutParams<T>,
    pub scheme: SchemeConfig<T>,
}

impl<T: Real> OptimumReport<T> {
    pub fn get(&self, name: &str) -> Option<T> {
        self.argmax.iter().find(|(n, _)| *n == name).map(|(_, v)| *v)
    }
}

struct Candidate<T> {
    params: ReadoutParams<T>,
    scheme: SchemeConfig<T>,
    argmax: Vec<(&'static str, T)>,
}

fn candidate<T: Real>(kind: OptimizedScheme, kt: T, coupling: &CouplingAxis<T>, r: T, coord: T, phase: T) -> Result<Candidate<T>> {
    let (kappa, half) = (T::one(), c::<T>(0.5));
    let phi_h = T::FRAC_PI_2();
    match kind {
        OptimizedScheme::Ies => {
            let chi = match coupling {
                CouplingAxis::Psi(..) => coord.tan() * half,
                CouplingAxis::Chi(..) => coord,
            };
            let params = ReadoutParams::new(kappa, chi, T::one(), T::zero(), phi_h, kt)?;
            let cfg = IesConfig::with_phase_offset(r, phi_h, phase)?;
            Ok(Candidate {
                params,
                scheme: SchemeConfig::Ies(cfg),
                argmax: vec![
                    ("psi", (c::<T>(2.0) * chi).atan()),
                    ("chi_over_kappa", chi),
                    ("r", r),
                    ("exp_r", r.exp()),
                    ("phase_offset", phase),
                ],
            })
        }
        OptimizedScheme::Ics => {
            let omega = crate::ics::omega_from_r(kappa, r);
            let (chi, lambda) = match coupling {
                CouplingAxis::Psi(..) => {
                    let lambda = coord.tan() * half;
                    ((lambda * lambda + c::<T>(4.0) * omega * omega).sqrt(), lambda)
                }
                CouplingAxis::Chi(..) => {
                    let l2 = coord * coord - c::<T>(4.0) * omega * omega;
                    (coord, if l2 >= T::zero() { l2.sqrt() } else { -(-l2).sqrt() })
                }
            };
            let params = ReadoutParams::new(kappa, chi, T::one(), T::zero(), phi_h, kt)?;
            let theta = c::<T>(2.0) * phi_h - phase;
            let cfg = IcsConfig::new(omega, theta)?;
            Ok(Candidate {
                params,
                scheme: SchemeConfig::Ics(cfg),
                argmax: vec![
                    ("psi", (c::<T>(2.0) * lambda).atan()),
                    ("chi_over_kappa", chi),
                    ("lambda_over_kappa", lambda),
                    ("omega_over_kappa", omega),
                    ("r", r),
                    ("exp_r", r.exp()),
                    ("phase_offset", phase),
                ],
            })
        }
    }
}

fn objective<T: Real>(kind: OptimizedScheme, kt: T, coupling: &CouplingAxis<T>, r: T, coord: T, phase: T) -> T {
    candidate(kind, kt, coupling, r, coord, phase)
        .and_then(|cand| cand.scheme.moments(&cand.params))
        .and_then(|m| snr(&m))
        .unwrap_or(T::neg_infinity())
}

/// Maximises the SNR at κ = 1, α_in/√κ = 1 over the coupling, the squeezing and the phase.
///
/// Coordinates are searched in the order (r, coupling, phase) so ties resolve to the smallest r,
/// then the smallest coupling.
pub fn maximize_snr<T: Real>(kind: OptimizedScheme, kappa_tau: T, bounds: &SnrBounds<T>) -> Result<OptimumReport<T>> {
    if !(kappa_tau > T::zero()) {
        return Err(ReadoutError::invalid("kappa_tau", "must be positive"));
    }
    let (clo, chi_hi) = match bounds.coupling {
        CouplingAxis::Psi(a, b) | CouplingAxis::Chi(a, b) => (a, b),
    };
    let extremal: Vec<T> = match kind {
        OptimizedScheme::Ies => vec![T::zero(), T::PI()],
        OptimizedScheme::Ics => vec![-T::FRAC_PI_2(), T::FRAC_PI_2()],
    };
    let coupling = bounds.coupling;
    let mut best: Option<(BoxOptimum<T>, T)> = None;
    let mut evaluations = 0;
    match bounds.phase {
        PhaseSearch::Extremal => {
            for &phase in &extremal {
                let opt = maximize_box(
                    |x: &[T]| objective(kind, kappa_tau, &coupling, x[0], x[1], phase),
                    &[bounds.r.0, clo],
                    &[bounds.r.1, chi_hi],
                    bounds.grid_points,
                )?;
                evaluations += opt.evaluations;
                if best.as_ref().is_none_or(|(b, _)| opt.value > b.value) {
                    best = Some((opt, phase));
                }
            }
        }
        PhaseSearch::Continuous => {
            let opt = maximize_box(
                |x: &[T]| objective(kind, kappa_tau, &coupling, x[0], x[1], x[2]),
                &[bounds.r.0, clo, -T::PI()],
                &[bounds.r.1, chi_hi, T::PI()],
                bounds.grid_points,
            )?;
            evaluations += opt.evaluations;
            let phase = opt.x[2];
            best = Some((opt, phase));
        }
    }
    let (opt, phase) = best.expect("at least one phase setting is searched");
    if opt.value == T::neg_infinity() {
        return Err(ReadoutError::Unstable("no feasible point inside the search box".into()));
    }
    let cand = candidate(kind, kappa_tau, &coupling, opt.x[0], opt.x[1], phase)?;
    Ok(OptimumReport {
        best_snr: opt.value,
        argmax: cand.argmax,
        evaluations,
        converged: opt.converged,
        params: cand.params,
        scheme: cand.scheme,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn bisect_examples() {
        assert!((bisect(|x: f64| x - 1.0, 0.0, 2.0, 1e-12).unwrap() - 1.0).abs() < 1e-12);
        assert!((bisect(f64::cos, 1.0, 2.0, 1e-12).unwrap() - FRAC_PI_2).abs() < 1e-12);
        assert!(matches!(bisect(|x: f64| x * x + 1.0, -1.0, 1.0, 1e-9), Err(ReadoutError::InvalidBracket { .. })));
    }

    #[test]
    fn bisect_residual_shrinks_with_tol() {
        let f = |x: f64| x.powi(3) - 2.0;
        let mut last = f64::INFINITY;
        for k in 2..12 {
            let x = bisect(f, 0.0, 3.0, 10f64.powi(-k)).unwrap();
            assert!(f(x).abs() <= last);
            last = f(x).abs();
        }
    }

    #[test]
    fn parabola_vertex() {
        let opt = maximize_box(
            |x: &[f64]| -(x[0] - 0.3137).powi(2) - 2.0 * (x[1] + 0.771).powi(2),
            &[-1.0, -1.0],
            &[1.0, 1.0],
            64,
        )
        .unwrap();
        assert!((opt.x[0] - 0.3137).abs() < 1e-6 && (opt.x[1] + 0.771).abs() < 1e-6);
        assert!(opt.converged && opt.value >= opt.grid_best);
    }

    #[test]
    fn tie_break_smallest() {
        let opt = maximize_box(|_: &[f64]| 1.0, &[0.0, 0.0], &[1.0, 1.0], 8).unwrap();
        assert_eq!(opt.x, vec![0.0, 0.0]);
    }

    #[test]
    fn headline_optima() {
        let ies = maximize_snr(OptimizedScheme::Ies, 1.0f64, &SnrBounds::fixed_chi(0.5)).unwrap();
        assert!((ies.best_snr - 0.2946).abs() < 1e-3, "{}", ies.best_snr);
        let ics = maximize_snr(OptimizedScheme::Ics, 1.0f64, &SnrBounds::fixed_chi(0.5)).unwrap();
        assert!((ics.best_snr - 0.208).abs() < 2e-3, "{}", ics.best_snr);
        let again = maximize_snr(OptimizedScheme::Ics, 1.0, &SnrBounds::fixed_chi(0.5)).unwrap();
        assert_eq!(ics, again);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn never_below_grid(kt in 0.1f64..20.0) {
            let b = SnrBounds { grid_points: 16, ..SnrBounds::standard() };
            for kind in [OptimizedScheme::Ies, OptimizedScheme::Ics] {
                let rep = maximize_snr(kind, kt, &b).unwrap();
                let r = rep.get("r").unwrap();
                prop_assert!(rep.best_snr > 0.0 && (0.0..=10f64.ln() + 1e-12).contains(&r));
            }
        }
    }
}
