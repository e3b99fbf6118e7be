//! Fixed points of continuous self-maps of closed intervals.
//!
//! Picard iteration tracks the observed step contraction and, when every step
//! shrank by at least a factor `a < 1`, attaches the geometric tail bound
//! `a^n |x1 - x0| / (1 - a)`. Picard alone diverges on steep but rotative maps
//! (`x -> -2.5 x + 7`), so [`solve`] scans for a sign change of `f(x) - x`
//! first and falls back to bisection whenever an orbit brackets a root.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::uniform;
use crate::maps::MapSpec;

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 1_000_000;
/// Half-width of the first scan window on unbounded domains.
pub const SCAN_WINDOW: f64 = 1e6;
/// The window grows tenfold up to this half-width.
pub const SCAN_MAX_WINDOW: f64 = 1e12;
pub const SCAN_SAMPLES: usize = 8192;
/// Consecutive non-contracting steps after which Picard gives up.
const STALL_STEPS: usize = 64;
/// Bisection on doubles cannot usefully run longer than this.
const MAX_BISECTIONS: usize = 2200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Picard,
    Bisection,
    /// Picard until an orbit bracketed a root, then bisection.
    Hybrid,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    /// Largest observed ratio of consecutive steps.
    pub a: f64,
    /// `|f(x0) - x0|`.
    pub d1: f64,
    /// `a^n d1 / (1 - a)` at the returned iterate `x_n`.
    pub tail_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPointResult {
    pub x_star: f64,
    pub residual: f64,
    pub iterations: usize,
    pub method: Method,
    pub certificate: Option<Certificate>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub window: f64,
    pub max_window: f64,
    pub samples: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            window: SCAN_WINDOW,
            max_window: SCAN_MAX_WINDOW,
            samples: SCAN_SAMPLES,
        }
    }
}

impl SolveOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }
}

/// `a^n d1 / (1 - a)`: once every step contracts by `a`, no later iterate
/// moves further than this from `x_n`.
pub fn tail_bound(a: f64, n: usize, d1: f64) -> Result<f64> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::InvalidRate(a));
    }
    if !(d1 >= 0.0) {
        return Err(Error::InvalidParameters(format!("initial gap must be >= 0, got {d1}")));
    }
    let pow = if n <= i32::MAX as usize { a.powi(n as i32) } else { 0.0 };
    Ok(pow * d1 / (1.0 - a))
}

/// `(|f(x) - x| <= tol, |f(x) - x|)`.
pub fn verify_fixed_point(m: &MapSpec, x: f64, tol: f64) -> Result<(bool, f64)> {
    let residual = (m.eval(x)? - x).abs();
    Ok((residual <= tol, residual))
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameters(format!("tolerance must be > 0, got {tol}")));
    }
    Ok(())
}

enum PicardOutcome {
    Converged(FixedPointResult, Vec<f64>),
    /// `f(x) - x` changed sign between two consecutive iterates.
    Bracket { lo: f64, hi: f64, iterations: usize },
}

fn picard_core(m: &MapSpec, x0: f64, tol: f64, max_iter: usize, detect_brackets: bool) -> Result<PicardOutcome> {
    check_tol(tol)?;
    m.domain().check(x0)?;
    let mut orbit = vec![x0];
    let mut x = x0;
    let mut prev_step: Option<f64> = None;
    let mut a_max: f64 = 0.0;
    let mut stalled = 0;

    for k in 0..max_iter {
        let fx = m.eval(x)?;
        let step = fx - x;
        if !fx.is_finite() {
            break;
        }
        orbit.push(fx);

        if let Some(prev) = prev_step {
            if detect_brackets && step != 0.0 && prev.signum() != step.signum() {
                let before = orbit[orbit.len() - 3];
                return Ok(PicardOutcome::Bracket {
                    lo: before.min(x),
                    hi: before.max(x),
                    iterations: k + 1,
                });
            }
            let ratio = step.abs() / prev.abs();
            a_max = a_max.max(ratio);
            stalled = if ratio >= 1.0 { stalled + 1 } else { 0 };
        }

        // |x_{k+1} - x_k| = |f(x_k) - x_k| is both the step and the residual at x_k
        if step.abs() <= tol * x.abs().max(1.0) && step.abs() <= tol {
            let iterations = k + 1;
            let d1 = (orbit[1] - orbit[0]).abs();
            let certificate = (a_max > 0.0 && a_max < 1.0).then(|| Certificate {
                a: a_max,
                d1,
                tail_bound: tail_bound(a_max, k, d1).expect("rate checked"),
            });
            let result = FixedPointResult {
                x_star: x,
                residual: step.abs(),
                iterations,
                method: Method::Picard,
                certificate,
            };
            return Ok(PicardOutcome::Converged(result, orbit));
        }
        if stalled >= STALL_STEPS {
            return Err(Error::NoConvergence {
                iterations: k + 1,
                last_step: step.abs(),
            });
        }
        prev_step = Some(step);
        x = fx;
    }
    let last_step = match orbit.len() {
        0 | 1 => f64::NAN,
        n => (orbit[n - 1] - orbit[n - 2]).abs(),
    };
    Err(Error::NoConvergence {
        iterations: orbit.len() - 1,
        last_step,
    })
}

/// Plain Picard iteration `x_{k+1} = f(x_k)` from `x0`.
pub fn picard_solve(m: &MapSpec, x0: f64, tol: f64, max_iter: usize) -> Result<FixedPointResult> {
    picard_trace(m, x0, tol, max_iter).map(|(r, _)| r)
}

/// [`picard_solve`] plus the recorded orbit `x0, x1, ...`.
pub fn picard_trace(m: &MapSpec, x0: f64, tol: f64, max_iter: usize) -> Result<(FixedPointResult, Vec<f64>)> {
    match picard_core(m, x0, tol, max_iter, false)? {
        PicardOutcome::Converged(r, orbit) => Ok((r, orbit)),
        PicardOutcome::Bracket { .. } => unreachable!("bracket detection is off"),
    }
}

struct Bisection {
    x: f64,
    residual: f64,
    iterations: usize,
    bracket: (f64, f64),
}

/// Bisection on `g(x) = f(x) - x`. Runs until the bracket is no wider than
/// `tol` and the better endpoint has residual at most `tol`, or until the
/// bracket cannot be split in floating point.
fn bisect(m: &MapSpec, lo: f64, hi: f64, tol: f64) -> Result<Bisection> {
    check_tol(tol)?;
    let (mut lo, mut hi) = (lo.min(hi), lo.max(hi));
    let g = |x: f64| m.eval(x).map(|y| y - x);
    let mut g_lo = g(lo)?;
    let mut g_hi = g(hi)?;
    for (x, gx) in [(lo, g_lo), (hi, g_hi)] {
        if gx == 0.0 {
            return Ok(Bisection { x, residual: 0.0, iterations: 0, bracket: (lo, hi) });
        }
    }
    if g_lo.signum() == g_hi.signum() || g_lo.is_nan() || g_hi.is_nan() {
        return Err(Error::NoSignChange { lo, hi });
    }
    let mut iterations = 0;
    while iterations < MAX_BISECTIONS {
        if hi - lo <= tol && g_lo.abs().min(g_hi.abs()) <= tol {
            break;
        }
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        let g_mid = g(mid)?;
        iterations += 1;
        if g_mid == 0.0 {
            return Ok(Bisection { x: mid, residual: 0.0, iterations, bracket: (mid, mid) });
        }
        if g_mid.signum() == g_lo.signum() {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
            g_hi = g_mid;
        }
    }
    let (x, residual) = if g_lo.abs() <= g_hi.abs() { (lo, g_lo.abs()) } else { (hi, g_hi.abs()) };
    Ok(Bisection { x, residual, iterations, bracket: (lo, hi) })
}

/// Bisection on `f(x) - x` over `[lo, hi]`.
pub fn bisection_solve(m: &MapSpec, lo: f64, hi: f64, tol: f64) -> Result<FixedPointResult> {
    let b = bisect(m, lo, hi, tol)?;
    if b.residual > tol {
        return Err(Error::NoConvergence {
            iterations: b.iterations,
            last_step: b.bracket.1 - b.bracket.0,
        });
    }
    Ok(FixedPointResult {
        x_star: b.x,
        residual: b.residual,
        iterations: b.iterations,
        method: Method::Bisection,
        certificate: None,
    })
}

/// Finds a fixed point of a continuous map with default options.
pub fn solve(m: &MapSpec, tol: f64) -> Result<FixedPointResult> {
    solve_with(m, &SolveOptions::with_tol(tol))
}

/// Scan, then Picard with bracket detection, widening the window on
/// unbounded domains. Seeds are tried in a fixed order: domain center,
/// window endpoints, then 0.
pub fn solve_with(m: &MapSpec, opts: &SolveOptions) -> Result<FixedPointResult> {
    if !m.is_continuous() {
        return Err(Error::WrongPointKind);
    }
    check_tol(opts.tol)?;
    let domain = m.domain();
    let center = domain.finite_center();
    if m.eval(center)? == center {
        return Ok(FixedPointResult {
            x_star: center,
            residual: 0.0,
            iterations: 1,
            method: Method::Picard,
            certificate: None,
        });
    }

    let mut window = opts.window;
    loop {
        let (lo, hi) = scan_range(m, window);

        if let Some(r) = scan_and_bisect(m, lo, hi, opts)? {
            return Ok(r);
        }

        let mut seeds = vec![center, lo, hi];
        if domain.contains(0.0) {
            seeds.push(0.0);
        }
        let mut seen = Vec::new();
        for seed in seeds {
            if seen.contains(&seed) {
                continue;
            }
            seen.push(seed);
            match picard_core(m, seed, opts.tol, opts.max_iter, true) {
                Ok(PicardOutcome::Converged(r, _)) => return Ok(r),
                Ok(PicardOutcome::Bracket { lo, hi, iterations }) => {
                    if let Ok(b) = bisect(m, lo, hi, opts.tol) {
                        if b.residual <= opts.tol {
                            return Ok(FixedPointResult {
                                x_star: b.x,
                                residual: b.residual,
                                iterations: iterations + b.iterations,
                                method: Method::Hybrid,
                                certificate: None,
                            });
                        }
                    }
                }
                Err(Error::NoConvergence { .. }) => {}
                Err(e) => return Err(e),
            }
        }

        let covers_domain = domain.lo() >= lo && domain.hi() <= hi;
        if covers_domain || window >= opts.max_window {
            return Err(Error::NotFound);
        }
        window *= 10.0;
    }
}

/// The part of the domain examined at a given window half-width.
fn scan_range(m: &MapSpec, window: f64) -> (f64, f64) {
    let d = m.domain();
    d.clip(window).unwrap_or_else(|| {
        if d.lo().is_finite() {
            (d.lo(), d.lo() + 2.0 * window)
        } else {
            (d.hi() - 2.0 * window, d.hi())
        }
    })
}

fn scan_and_bisect(m: &MapSpec, lo: f64, hi: f64, opts: &SolveOptions) -> Result<Option<FixedPointResult>> {
    let xs = uniform(lo, hi, opts.samples.max(2));
    let mut prev: Option<(f64, f64)> = None;
    for x in xs {
        let gx = m.eval(x)? - x;
        if gx == 0.0 {
            return Ok(Some(FixedPointResult {
                x_star: x,
                residual: 0.0,
                iterations: 0,
                method: Method::Bisection,
                certificate: None,
            }));
        }
        if let Some((px, pg)) = prev {
            if pg.signum() != gx.signum() && !pg.is_nan() && !gx.is_nan() {
                if let Ok(b) = bisect(m, px, x, opts.tol) {
                    if b.residual <= opts.tol {
                        return Ok(Some(FixedPointResult {
                            x_star: b.x,
                            residual: b.residual,
                            iterations: b.iterations,
                            method: Method::Bisection,
                            certificate: None,
                        }));
                    }
                }
            }
        }
        prev = Some((x, gx));
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn f_map() -> MapSpec {
        MapSpec::three_segment(1.0, 6.0, 12.0, 13.0).unwrap()
    }

    #[test]
    fn picard_examples() {
        let a = MapSpec::affine(0.5, 1.0).unwrap();
        let r = picard_solve(&a, 0.0, 1e-10, DEFAULT_MAX_ITER).unwrap();
        assert_relative_eq!(r.x_star, 2.0, epsilon = 1e-9);
        assert!(r.residual <= 1e-10);
        let cert = r.certificate.unwrap();
        assert_relative_eq!(cert.a, 0.5, max_relative = 1e-6);
        assert_eq!(cert.d1, 1.0);

        // 50 -> 6 -> 1 -> 1
        let (r, orbit) = picard_trace(&f_map(), 50.0, 1e-10, DEFAULT_MAX_ITER).unwrap();
        assert_eq!(r.x_star, 1.0);
        assert_eq!(r.residual, 0.0);
        assert!(r.iterations <= 3);
        assert_eq!(orbit, vec![50.0, 6.0, 1.0, 1.0]);

        let steep = MapSpec::affine(-2.0, 0.0).unwrap();
        assert!(matches!(
            picard_solve(&steep, 1.0, 1e-10, DEFAULT_MAX_ITER),
            Err(Error::NoConvergence { .. })
        ));
    }

    #[test]
    fn picard_rejects_bad_input() {
        let a = MapSpec::affine(0.5, 1.0).unwrap();
        assert!(picard_solve(&a, 0.0, 0.0, 10).is_err());
        let bounded = a.with_domain(crate::ClosedInterval::new(0.0, 4.0).unwrap()).unwrap();
        assert!(matches!(picard_solve(&bounded, 5.0, 1e-10, 10), Err(Error::OutOfDomain { .. })));
    }

    #[test]
    fn bisection_examples() {
        let r = bisection_solve(&MapSpec::affine(-2.0, 0.0).unwrap(), -1.0, 1.0, 1e-10).unwrap();
        assert!(r.x_star.abs() <= 1e-10);
        let r = bisection_solve(&f_map(), 0.0, 2.0, 1e-10).unwrap();
        assert_relative_eq!(r.x_star, 1.0, epsilon = 1e-10);
        assert_eq!(
            bisection_solve(&MapSpec::affine(0.5, 1.0).unwrap(), 3.0, 4.0, 1e-10).unwrap_err(),
            Error::NoSignChange { lo: 3.0, hi: 4.0 }
        );
    }

    #[test]
    fn bisection_halves_the_bracket() {
        let m = MapSpec::affine(-0.3, 1.7).unwrap();
        for tol in [1e-2, 1e-6, 1e-10] {
            let b = bisect(&m, -10.0, 10.0, tol).unwrap();
            let width = b.bracket.1 - b.bracket.0;
            assert!(width <= 20.0 / 2f64.powi(b.iterations as i32), "tol {tol}");
        }
    }

    #[test]
    fn solve_examples() {
        let r = solve(&MapSpec::three_segment(1.0, 2.0, 4.0, 4.1).unwrap(), DEFAULT_TOL).unwrap();
        assert_relative_eq!(r.x_star, 1.0, epsilon = 1e-10);

        // 2-rotative but Picard-divergent
        let r = solve(&MapSpec::affine(-2.5, 7.0).unwrap(), DEFAULT_TOL).unwrap();
        assert_relative_eq!(r.x_star, 2.0, epsilon = 1e-10);
        assert!(r.residual <= DEFAULT_TOL);

        let r = solve(&MapSpec::affine(1.0, 0.0).unwrap(), DEFAULT_TOL).unwrap();
        assert_eq!(r.residual, 0.0);
        assert_eq!(r.x_star, 0.0);
    }

    #[test]
    fn solve_on_bounded_and_half_lines() {
        let m = MapSpec::affine(-0.5, 3.0)
            .unwrap()
            .with_domain(crate::ClosedInterval::new(0.0, 3.0).unwrap())
            .unwrap();
        assert_relative_eq!(solve(&m, 1e-10).unwrap().x_star, 2.0, epsilon = 1e-9);

        let m = MapSpec::affine(0.5, 5e6)
            .unwrap()
            .with_domain(crate::ClosedInterval::new(2e6, f64::INFINITY).unwrap())
            .unwrap();
        let r = solve(&m, 1e-6).unwrap();
        assert_relative_eq!(r.x_star, 1e7, max_relative = 1e-12);
    }

    #[test]
    fn solve_uses_hybrid_when_scan_misses() {
        // a fixed point far outside the first window, only reachable by orbit
        let m = MapSpec::affine(-1.5, 5e7).unwrap();
        let opts = SolveOptions { max_window: 1e6, ..SolveOptions::default() };
        let r = solve_with(&m, &opts).unwrap();
        assert_eq!(r.method, Method::Hybrid);
        assert_relative_eq!(r.x_star, 2e7, max_relative = 1e-12);
    }

    #[test]
    fn solve_reports_not_found_for_translations() {
        let m = MapSpec::affine(1.0, 1.0).unwrap();
        assert_eq!(solve(&m, 1e-10).unwrap_err(), Error::NotFound);
        let q = MapSpec::q_indicator(1.0, 2.0f64.sqrt()).unwrap();
        assert_eq!(solve(&q, 1e-10).unwrap_err(), Error::WrongPointKind);
    }

    #[test]
    fn tail_bound_examples() {
        assert_eq!(tail_bound(0.5, 3, 1.0).unwrap(), 0.25);
        assert_relative_eq!(tail_bound(0.9, 0, 2.0).unwrap(), 20.0, max_relative = 1e-12);
        assert!(tail_bound(0.5, 200, 1.0).unwrap() < 1e-59);
        assert_eq!(tail_bound(1.0, 3, 1.0).unwrap_err(), Error::InvalidRate(1.0));
        assert_eq!(tail_bound(0.0, 3, 1.0).unwrap_err(), Error::InvalidRate(0.0));
    }

    #[test]
    fn verify_examples() {
        let f = f_map();
        assert_eq!(verify_fixed_point(&f, 1.0, 1e-10).unwrap(), (true, 0.0));
        let (ok, res) = verify_fixed_point(&f, 1.1, 1e-10).unwrap();
        assert!(!ok);
        assert_relative_eq!(res, 0.1, max_relative = 1e-12);
        assert!(verify_fixed_point(&MapSpec::affine(0.5, 1.0).unwrap(), 2.0, 1e-10).unwrap().0);
    }
}
