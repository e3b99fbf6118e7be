//! Deciding and estimating `n`-rotativity, and Lipschitz constants.
//!
//! The exact decisions cover the affine, three-segment and q-indicator
//! families. Anything else gets a grid estimate of
//! `sup |f^n(x) - x| / |f(x) - x|`, which is only a lower bound on the true
//! supremum, so numeric verdicts are three-valued.

use num_complex::Complex64;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{self, Param};
use crate::grid::Grid;
use crate::json::{ext_real, opt_ext_real};
use crate::maps::{MapKind, MapSpec, Point, QIndicatorMap, ThreeSegmentMap};

/// Below this, `|f(x) - x|` counts as zero and the ratio is undefined.
pub const EPS_DENOM: f64 = 1e-12;
/// Distance from `n` a grid estimate must keep to certify a verdict.
pub const DEFAULT_MARGIN: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Yes,
    No,
    Unknown,
}

impl Decision {
    fn from_bool(b: bool) -> Self {
        if b {
            Decision::Yes
        } else {
            Decision::No
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecisionSource {
    Analytic,
    Numeric,
}

/// Exact result for one of the closed-form families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticRotativity {
    pub family: String,
    pub rotative: bool,
    /// Supremum of the ratio over non-fixed points (0 when every point is fixed).
    #[serde(with = "ext_real")]
    pub exact_sup: f64,
    /// Whether some point attains `exact_sup`.
    pub attained: bool,
    /// A valid rotativity constant `a < n`, when one exists.
    #[serde(with = "opt_ext_real", default)]
    pub constant: Option<f64>,
    /// A point realizing the supremum, or violating rotativity.
    pub witness: Option<Point>,
    /// Three-segment only: the b1-side bound `1 + (c2 - c1) / (b1 - c2)`.
    #[serde(with = "opt_ext_real", default)]
    pub b1_bound: Option<f64>,
    /// Three-segment only: whether `b1 > (n c2 - c1) / (n - 1)`.
    pub b1_threshold_test: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RotativityReport {
    pub n: usize,
    #[serde(with = "ext_real")]
    pub estimated_sup: f64,
    pub decision: Decision,
    pub decision_source: DecisionSource,
    pub numeric_decision: Decision,
    pub margin: f64,
    pub grid_points: usize,
    pub analytic: Option<AnalyticRotativity>,
    /// Grid point where the estimated ratio is largest.
    pub witness: Option<Point>,
}

impl RotativityReport {
    /// `yes` from either source.
    pub fn is_rotative(&self) -> bool {
        self.decision == Decision::Yes
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LipschitzReport {
    pub estimated_k: f64,
    pub analytic_k: Option<f64>,
    /// Adjacent grid pair realizing `estimated_k`.
    pub witness: (f64, f64),
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidParameters(format!("rotativity needs n >= 2, got {n}")));
    }
    Ok(())
}

/// `|f^n(x) - x| / |f(x) - x|`, or `None` at (numerically) fixed points.
pub fn rotativity_ratio(m: &MapSpec, x: Point, n: usize) -> Result<Option<f64>> {
    check_n(n)?;
    let fx = m.eval_point(x)?;
    let denom = (fx.value() - x.value()).abs();
    if !(denom >= EPS_DENOM) {
        return Ok(None);
    }
    let fnx = m.iterate(fx, n - 1)?;
    let ratio = (fnx.value() - x.value()).abs() / denom;
    Ok((!ratio.is_nan()).then_some(ratio))
}

/// Grid estimate of the rotativity constant, with the exact answer filled in
/// for the closed-form families. The decision prefers the exact answer.
pub fn estimate_rotativity_constant(m: &MapSpec, n: usize, grid: &Grid) -> Result<RotativityReport> {
    estimate_with_margin(m, n, grid, DEFAULT_MARGIN)
}

pub fn estimate_with_margin(m: &MapSpec, n: usize, grid: &Grid, margin: f64) -> Result<RotativityReport> {
    check_n(n)?;
    let xs = grid.points(m)?;
    let candidates: Vec<Point> = match m.kind() {
        MapKind::QIndicator(_) => xs
            .iter()
            .flat_map(|&x| [Point::Rational(x), Point::Irrational(x)])
            .collect(),
        _ => xs.iter().map(|&x| Point::Real(x)).collect(),
    };

    // (ratio, index); the max-reduction breaks ties on the smaller index so
    // the result does not depend on how rayon splits the work.
    let best = candidates
        .par_iter()
        .enumerate()
        .map(|(i, p)| rotativity_ratio(m, *p, n).map(|r| r.map(|r| (r, i))))
        .try_reduce_with(|a, b| Ok(pick_max(a, b)))
        .transpose()?
        .flatten();

    let (estimated_sup, witness) = match best {
        Some((r, i)) => (r, Some(candidates[i])),
        None => (0.0, None),
    };
    let numeric_decision = numeric_verdict(estimated_sup, n, margin);
    let analytic = analytic_rotativity(m, n)?;
    let (decision, decision_source) = match &analytic {
        Some(a) => (Decision::from_bool(a.rotative), DecisionSource::Analytic),
        None => (numeric_decision, DecisionSource::Numeric),
    };
    Ok(RotativityReport {
        n,
        estimated_sup,
        decision,
        decision_source,
        numeric_decision,
        margin,
        grid_points: candidates.len(),
        analytic,
        witness,
    })
}

fn pick_max(a: Option<(f64, usize)>, b: Option<(f64, usize)>) -> Option<(f64, usize)> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(a), Some(b)) => {
            if a.0 > b.0 || (a.0 == b.0 && a.1 < b.1) {
                Some(a)
            } else {
                Some(b)
            }
        }
    }
}

/// Three-valued verdict from a grid supremum.
pub fn numeric_verdict(estimated_sup: f64, n: usize, margin: f64) -> Decision {
    let n = n as f64;
    if estimated_sup <= n - margin {
        Decision::Yes
    } else if estimated_sup >= n + margin {
        Decision::No
    } else {
        Decision::Unknown
    }
}

/// Exact rotativity for the closed-form families; `None` for polylines.
pub fn analytic_rotativity(m: &MapSpec, n: usize) -> Result<Option<AnalyticRotativity>> {
    check_n(n)?;
    Ok(match m.kind() {
        MapKind::Affine(a) => {
            let crit = affine_rotativity_criterion(Complex64::new(a.c(), 0.0), a.x0(), n)?;
            let identity = a.c() == 1.0 && a.x0() == 0.0;
            Some(AnalyticRotativity {
                family: "affine".into(),
                rotative: crit.rotative,
                exact_sup: crit.sup,
                // constant in x; only an all-fixed map has nothing to attain it
                attained: !identity,
                constant: crit.rotative.then_some(crit.sup),
                witness: None,
                b1_bound: None,
                b1_threshold_test: None,
            })
        }
        MapKind::ThreeSegment(t) => {
            let sup = three_segment_sup_ratio_exact(t);
            let rotative = sup < BigRational::from_integer(n.into());
            let sup = exact::to_f64(&sup);
            Some(AnalyticRotativity {
                family: "three_segment".into(),
                rotative,
                exact_sup: sup,
                attained: true,
                constant: rotative.then_some(sup),
                witness: Some(Point::Real(t.b2())),
                b1_bound: Some(exact::to_f64(&b1_bound_exact(t))),
                b1_threshold_test: Some(b1_threshold_test(t, n)),
            })
        }
        MapKind::QIndicator(q) => {
            let v = qindicator_rotativity(q, n)?;
            Some(AnalyticRotativity {
                family: "q_indicator".into(),
                rotative: v.rotative,
                exact_sup: if v.rotative { 1.0 } else { f64::INFINITY },
                attained: v.rotative,
                constant: v.constant,
                witness: v.witness,
                b1_bound: None,
                b1_threshold_test: None,
            })
        }
        MapKind::Polyline(_) => None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineCriterion {
    pub rotative: bool,
    /// `|(c^n - 1) / (c - 1)|`, or the `c = 1` convention (`n` if `x0 != 0`, else 0).
    pub sup: f64,
}

/// Exact rotativity of `x -> c x + x0` for real or complex `c`.
///
/// `f^n(x) - x = (1 + c + ... + c^(n-1)) (f(x) - x)`, so the ratio is the same
/// at every non-fixed point.
pub fn affine_rotativity_criterion(c: Complex64, x0: f64, n: usize) -> Result<AffineCriterion> {
    check_n(n)?;
    if c == Complex64::new(1.0, 0.0) {
        return Ok(if x0 == 0.0 {
            AffineCriterion { rotative: true, sup: 0.0 }
        } else {
            AffineCriterion { rotative: false, sup: n as f64 }
        });
    }
    let sup = geometric_sum(c, n).norm();
    Ok(AffineCriterion {
        rotative: sup < n as f64,
        sup,
    })
}

/// `1 + c + ... + c^(n-1)` by Horner's rule.
fn geometric_sum(c: Complex64, n: usize) -> Complex64 {
    (0..n).fold(Complex64::new(0.0, 0.0), |s, _| s * c + 1.0)
}

/// Real `c` interval `(lo, 1)` on which `x -> c x + x0` is `n`-rotative.
///
/// For `|c| < 1` (and `c = -1`) the geometric sum is below `n`; for `c < -1`
/// it grows with `|c|`, so the lower end is found by bisection.
pub fn affine_rotative_interval(n: usize) -> Result<(f64, f64)> {
    check_n(n)?;
    let excess = |c: f64| geometric_sum(Complex64::new(c, 0.0), n).norm() - n as f64;
    let (mut inside, mut outside) = (-1.0, -(n as f64) - 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (inside + outside);
        if mid == inside || mid == outside {
            break;
        }
        if excess(mid) < 0.0 {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    // report the root itself when bisection lands on it exactly
    let lo = if excess(outside) == 0.0 { outside } else { 0.5 * (inside + outside) };
    Ok((lo, 1.0))
}

/// Sufficient test for `n`-rotativity of a three-segment map:
/// `b1 > (n c2 - c1) / (n - 1)`, strict, in exact arithmetic.
///
/// Every ratio is below `1 + (c2 - c1) / (x - c2)` for `x > b1`, so passing
/// the test yields a constant below `n`. Failing it does not rule
/// rotativity out; [`analytic_rotativity`] has the exact decision, whose
/// threshold is the same expression compared against `b2`.
pub fn pwl_rotativity_criterion(
    c1: impl Into<Param>,
    c2: impl Into<Param>,
    b1: impl Into<Param>,
    b2: impl Into<Param>,
    n: usize,
) -> Result<bool> {
    check_n(n)?;
    let t = ThreeSegmentMap::new(c1, c2, b1, b2)?;
    Ok(b1_threshold_test(&t, n))
}

fn b1_threshold_test(t: &ThreeSegmentMap, n: usize) -> bool {
    let [c1, c2, b1, _] = t.exact_params();
    let n = BigRational::from_integer(n.into());
    let one = BigRational::from_integer(1.into());
    *b1 > (&n * c2 - c1) / (&n - one)
}

/// `1 + (c2 - c1) / (b1 - c2)`: the limit of the upper bound
/// `1 + (c2 - c1) / (x - c2)` as `x -> b1+`.
///
/// Every ratio of the map lies strictly below this value, so it is a valid
/// rotativity constant whenever it is below `n`. The ratio itself peaks at
/// `x = b2` with the smaller value [`three_segment_sup_ratio`].
pub fn pwl_exact_sup_ratio(
    c1: impl Into<Param>,
    c2: impl Into<Param>,
    b1: impl Into<Param>,
    b2: impl Into<Param>,
) -> Result<f64> {
    pwl_exact_sup_ratio_rational(c1, c2, b1, b2).map(|q| exact::to_f64(&q))
}

/// [`pwl_exact_sup_ratio`] in exact rational arithmetic.
pub fn pwl_exact_sup_ratio_rational(
    c1: impl Into<Param>,
    c2: impl Into<Param>,
    b1: impl Into<Param>,
    b2: impl Into<Param>,
) -> Result<BigRational> {
    let t = ThreeSegmentMap::new(c1, c2, b1, b2)?;
    Ok(b1_bound_exact(&t))
}

fn b1_bound_exact(t: &ThreeSegmentMap) -> BigRational {
    let [c1, c2, b1, _] = t.exact_params();
    BigRational::from_integer(1.into()) + (c2 - c1) / (b1 - c2)
}

/// Supremum of `|f^n(x) - x| / |f(x) - x|` over non-fixed points of a
/// three-segment map, for any `n >= 2`: `(b2 - c1) / (b2 - c2)`, attained at `b2`.
///
/// For `x <= b1` the ratio is 1. For `x >= b2` it is `(x - c1) / (x - c2)`,
/// decreasing in `x`. On `(b1, b2)` it is `(x - c1) / (x - f(x))`, increasing
/// since its derivative has the sign of `slope * (b1 - c1) > 0`.
pub fn three_segment_sup_ratio(t: &ThreeSegmentMap) -> f64 {
    exact::to_f64(&three_segment_sup_ratio_exact(t))
}

pub fn three_segment_sup_ratio_exact(t: &ThreeSegmentMap) -> BigRational {
    let [c1, c2, _, b2] = t.exact_params();
    (b2 - c1) / (b2 - c2)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QIndicatorVerdict {
    pub rotative: bool,
    pub constant: Option<f64>,
    /// For even `n`: the irrational point `(n b - c) / (n - 1)`.
    pub witness: Option<Point>,
    /// The ratio at the witness, exactly `n`.
    pub witness_ratio: Option<f64>,
}

/// Odd `n`: `f^n = f` pointwise, so the map is `(n, 1)`-rotative.
/// Even `n`: the witness has ratio exactly `n`, so no constant below `n` works.
pub fn qindicator_rotativity(q: &QIndicatorMap, n: usize) -> Result<QIndicatorVerdict> {
    check_n(n)?;
    if n % 2 == 1 {
        return Ok(QIndicatorVerdict {
            rotative: true,
            constant: Some(1.0),
            witness: None,
            witness_ratio: None,
        });
    }
    let m = n as f64;
    let x = (m * q.b() - q.c()) / (m - 1.0);
    Ok(QIndicatorVerdict {
        rotative: false,
        constant: None,
        witness: Some(Point::Irrational(x)),
        witness_ratio: Some(m),
    })
}

/// Largest difference quotient over adjacent grid points, with the exact
/// constant for affine, three-segment and polyline maps.
pub fn lipschitz_estimate(m: &MapSpec, grid: &Grid) -> Result<LipschitzReport> {
    if !m.is_continuous() {
        return Err(Error::WrongPointKind);
    }
    let xs = grid.points(m)?;
    if xs.len() < 2 {
        return Err(Error::EmptyDomain);
    }
    let ys = xs.iter().map(|&x| m.eval(x)).collect::<Result<Vec<_>>>()?;
    let (k, i) = (0..xs.len() - 1)
        .map(|i| (((ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i])).abs(), i))
        .fold((0.0, 0), |best, cur| if cur.0 > best.0 { cur } else { best });
    let analytic_k = match m.kind() {
        MapKind::Affine(a) => Some(a.c().abs()),
        MapKind::ThreeSegment(t) => Some(t.slope()),
        MapKind::Polyline(p) => Some(p.max_abs_slope()),
        MapKind::QIndicator(_) => None,
    };
    Ok(LipschitzReport {
        estimated_k: k,
        analytic_k,
        witness: (xs[i], xs[i + 1]),
    })
}
