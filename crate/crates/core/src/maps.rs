//! Self-maps of closed real intervals: representation, evaluation and iteration.

use num_rational::BigRational;
use num_bigint::Sign;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{self, Param};
use crate::interval::ClosedInterval;

/// `x -> c*x + x0`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineMap {
    c: Param,
    x0: Param,
}

impl AffineMap {
    pub fn new(c: impl Into<Param>, x0: impl Into<Param>) -> Self {
        Self {
            c: c.into(),
            x0: x0.into(),
        }
    }

    pub fn c(&self) -> f64 {
        self.c.value()
    }

    pub fn x0(&self) -> f64 {
        self.x0.value()
    }

    pub fn c_param(&self) -> &Param {
        &self.c
    }

    pub fn x0_param(&self) -> &Param {
        &self.x0
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.c() * x + self.x0()
    }

    /// The unique fixed point `x0 / (1 - c)` when `c != 1`.
    pub fn fixed_point(&self) -> Option<f64> {
        (self.c() != 1.0).then(|| self.x0() / (1.0 - self.c()))
    }
}

/// Constant `c1` up to `b1`, linear up to `b2`, constant `c2` afterwards.
///
/// Requires `c1 < c2 < b1 < b2`; the only fixed point is `c1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThreeSegmentMap {
    c1: Param,
    c2: Param,
    b1: Param,
    b2: Param,
    slope: f64,
}

impl ThreeSegmentMap {
    pub fn new(
        c1: impl Into<Param>,
        c2: impl Into<Param>,
        b1: impl Into<Param>,
        b2: impl Into<Param>,
    ) -> Result<Self> {
        let (c1, c2, b1, b2) = (c1.into(), c2.into(), b1.into(), b2.into());
        if !(c1.exact() < c2.exact() && c2.exact() < b1.exact() && b1.exact() < b2.exact()) {
            return Err(Error::InvalidParameters(format!(
                "three-segment map needs c1 < c2 < b1 < b2, got {c1:?}, {c2:?}, {b1:?}, {b2:?}"
            )));
        }
        let slope = exact::to_f64(&((c2.exact() - c1.exact()) / (b2.exact() - b1.exact())));
        Ok(Self {
            c1,
            c2,
            b1,
            b2,
            slope,
        })
    }

    pub fn c1(&self) -> f64 {
        self.c1.value()
    }
    pub fn c2(&self) -> f64 {
        self.c2.value()
    }
    pub fn b1(&self) -> f64 {
        self.b1.value()
    }
    pub fn b2(&self) -> f64 {
        self.b2.value()
    }

    /// Exact parameters `(c1, c2, b1, b2)`.
    pub fn exact_params(&self) -> [&BigRational; 4] {
        [
            self.c1.exact(),
            self.c2.exact(),
            self.b1.exact(),
            self.b2.exact(),
        ]
    }

    /// Slope of the middle piece, `(c2 - c1) / (b2 - b1)`.
    pub fn slope(&self) -> f64 {
        self.slope
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x <= self.b1() {
            self.c1()
        } else if x >= self.b2() {
            self.c2()
        } else {
            self.slope * (x - self.b1()) + self.c1()
        }
    }

    fn eval_exact(&self, x: &BigRational) -> BigRational {
        let [c1, c2, b1, b2] = self.exact_params();
        if x <= b1 {
            c1.clone()
        } else if x >= b2 {
            c2.clone()
        } else {
            (c2 - c1) / (b2 - b1) * (x - b1) + c1
        }
    }
}

/// Continuous piecewise-linear map through strictly increasing breakpoints,
/// held constant left of the first and right of the last one.
#[derive(Debug, Clone, PartialEq)]
pub struct PolylineMap {
    points: Vec<(f64, f64)>,
}

impl PolylineMap {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidParameters("polyline needs at least one breakpoint".into()));
        }
        if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(Error::InvalidParameters("polyline breakpoints must be finite".into()));
        }
        if let Some(w) = points.windows(2).find(|w| w[0].0 >= w[1].0) {
            return Err(Error::InvalidParameters(format!(
                "polyline x-coordinates must be strictly increasing ({} then {})",
                w[0].0, w[1].0
            )));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn eval(&self, x: f64) -> f64 {
        let pts = &self.points;
        let first = pts[0];
        let last = pts[pts.len() - 1];
        if x <= first.0 {
            return first.1;
        }
        if x >= last.0 {
            return last.1;
        }
        // first index with breakpoint x > query; 1..len by the guards above
        let i = pts.partition_point(|p| p.0 <= x);
        let (x0, y0) = pts[i - 1];
        let (x1, y1) = pts[i];
        if x == x0 {
            return y0;
        }
        y0 + (y1 - y0) * ((x - x0) / (x1 - x0))
    }

    /// Largest absolute segment slope (0 for a single breakpoint).
    pub fn max_abs_slope(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| ((w[1].1 - w[0].1) / (w[1].0 - w[0].0)).abs())
            .fold(0.0, f64::max)
    }
}

/// `c` on rational points and `b` on irrational ones.
///
/// Rationality is carried by the point's tag, never inferred from a double.
#[derive(Debug, Clone, PartialEq)]
pub struct QIndicatorMap {
    b: f64,
    c: f64,
}

impl QIndicatorMap {
    pub fn new(b: f64, c: f64) -> Result<Self> {
        if !b.is_finite() || !c.is_finite() || b == c {
            return Err(Error::InvalidParameters(format!(
                "q-indicator needs finite, distinct b and c (got {b}, {c})"
            )));
        }
        Ok(Self { b, c })
    }

    /// The rational value.
    pub fn b(&self) -> f64 {
        self.b
    }

    /// The irrational value.
    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn eval(&self, p: Point) -> Point {
        match p {
            // b is rational, c irrational
            Point::Rational(_) => Point::Irrational(self.c),
            Point::Irrational(_) | Point::Real(_) => Point::Rational(self.b),
        }
    }
}

/// A point handed to a map. Plain reals for continuous maps, class-tagged
/// values for [`QIndicatorMap`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", content = "value", rename_all = "snake_case")]
pub enum Point {
    Real(f64),
    Rational(f64),
    Irrational(f64),
}

impl Point {
    pub fn value(self) -> f64 {
        match self {
            Point::Real(v) | Point::Rational(v) | Point::Irrational(v) => v,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MapKind {
    Affine(AffineMap),
    ThreeSegment(ThreeSegmentMap),
    Polyline(PolylineMap),
    QIndicator(QIndicatorMap),
}

/// A validated self-map of a closed interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MapFile", into = "MapFile")]
pub struct MapSpec {
    kind: MapKind,
    domain: ClosedInterval,
}

impl MapSpec {
    /// Builds and validates a map on `domain`.
    pub fn new(kind: MapKind, domain: ClosedInterval) -> Result<Self> {
        validate(Self { kind, domain })
    }

    pub fn affine(c: f64, x0: f64) -> Result<Self> {
        Self::new(MapKind::Affine(AffineMap::new(Param::from_f64(c)?, Param::from_f64(x0)?)), ClosedInterval::REAL_LINE)
    }

    pub fn three_segment(c1: f64, c2: f64, b1: f64, b2: f64) -> Result<Self> {
        let [c1, c2, b1, b2] = [c1, c2, b1, b2].map(Param::from_f64);
        Self::new(
            MapKind::ThreeSegment(ThreeSegmentMap::new(c1?, c2?, b1?, b2?)?),
            ClosedInterval::REAL_LINE,
        )
    }

    pub fn polyline(points: Vec<(f64, f64)>) -> Result<Self> {
        Self::new(MapKind::Polyline(PolylineMap::new(points)?), ClosedInterval::REAL_LINE)
    }

    pub fn q_indicator(b: f64, c: f64) -> Result<Self> {
        Self::new(MapKind::QIndicator(QIndicatorMap::new(b, c)?), ClosedInterval::REAL_LINE)
    }

    /// The same map restricted to another domain (revalidated).
    pub fn with_domain(self, domain: ClosedInterval) -> Result<Self> {
        Self::new(self.kind, domain)
    }

    pub fn kind(&self) -> &MapKind {
        &self.kind
    }

    pub fn domain(&self) -> ClosedInterval {
        self.domain
    }

    pub fn family(&self) -> &'static str {
        match self.kind {
            MapKind::Affine(_) => "affine",
            MapKind::ThreeSegment(_) => "three_segment",
            MapKind::Polyline(_) => "polyline",
            MapKind::QIndicator(_) => "q_indicator",
        }
    }

    pub fn is_continuous(&self) -> bool {
        !matches!(self.kind, MapKind::QIndicator(_))
    }

    /// `f(x)` for continuous maps.
    pub fn eval(&self, x: f64) -> Result<f64> {
        self.domain.check(x)?;
        Ok(match &self.kind {
            MapKind::Affine(m) => m.eval(x),
            MapKind::ThreeSegment(m) => m.eval(x),
            MapKind::Polyline(m) => m.eval(x),
            MapKind::QIndicator(_) => return Err(Error::WrongPointKind),
        })
    }

    /// `f(p)` for any map. Real maps ignore the tag and return [`Point::Real`].
    pub fn eval_point(&self, p: Point) -> Result<Point> {
        match &self.kind {
            MapKind::QIndicator(m) => {
                if let Point::Real(_) = p {
                    return Err(Error::WrongPointKind);
                }
                self.domain.check(p.value())?;
                Ok(m.eval(p))
            }
            _ => self.eval(p.value()).map(Point::Real),
        }
    }

    /// `[x, f(x), ..., f^n(x)]`.
    pub fn orbit(&self, start: Point, n: usize) -> Result<Vec<Point>> {
        let mut out = Vec::with_capacity(n + 1);
        let mut p = start;
        self.domain.check(p.value())?;
        out.push(p);
        for _ in 0..n {
            p = self.eval_point(p)?;
            out.push(p);
        }
        Ok(out)
    }

    /// Real-valued orbit of a continuous map.
    pub fn orbit_real(&self, x: f64, n: usize) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(n + 1);
        let mut y = x;
        self.domain.check(y)?;
        out.push(y);
        for _ in 0..n {
            y = self.eval(y)?;
            out.push(y);
        }
        Ok(out)
    }

    /// `f^n(p)`.
    pub fn iterate(&self, p: Point, n: usize) -> Result<Point> {
        let mut q = p;
        for _ in 0..n {
            q = self.eval_point(q)?;
        }
        Ok(q)
    }
}

/// Checks the family invariants and that the map sends its domain into itself.
pub fn validate(m: MapSpec) -> Result<MapSpec> {
    let d = m.domain;
    let (img_lo, img_hi) = match &m.kind {
        MapKind::Affine(a) => {
            if !a.c().is_finite() || !a.x0().is_finite() {
                return Err(Error::InvalidParameters("affine parameters must be finite".into()));
            }
            check_affine_image(a, d)?;
            return Ok(m);
        }
        MapKind::ThreeSegment(t) => {
            // nondecreasing: image is [f(lo), f(hi)]
            let at = |x: f64| -> Result<BigRational> {
                if x == f64::NEG_INFINITY {
                    Ok(t.c1.exact().clone())
                } else if x == f64::INFINITY {
                    Ok(t.c2.exact().clone())
                } else {
                    Ok(t.eval_exact(&exact_of(x)?))
                }
            };
            let (lo, hi) = (at(d.lo())?, at(d.hi())?);
            check_exact_image(&lo, &hi, d)?;
            return Ok(m);
        }
        MapKind::Polyline(p) => {
            let pts = p.points();
            let limit = |x: f64| -> f64 {
                if x == f64::NEG_INFINITY {
                    pts[0].1
                } else if x == f64::INFINITY {
                    pts[pts.len() - 1].1
                } else {
                    p.eval(x)
                }
            };
            let inside = pts.iter().filter(|(x, _)| d.contains(*x)).map(|(_, y)| *y);
            let values: Vec<f64> = [limit(d.lo()), limit(d.hi())].into_iter().chain(inside).collect();
            let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            (lo, hi)
        }
        // Both values must lie in the domain; the tag decides which one is hit.
        MapKind::QIndicator(q) => (q.b().min(q.c()), q.b().max(q.c())),
    };
    if d.contains(img_lo) && d.contains(img_hi) {
        Ok(m)
    } else {
        Err(Error::NotSelfMap {
            img_lo,
            img_hi,
            lo: d.lo(),
            hi: d.hi(),
        })
    }
}

fn exact_of(x: f64) -> Result<BigRational> {
    exact::from_f64(x).ok_or_else(|| Error::InvalidParameters(format!("non-finite value {x}")))
}

fn check_exact_image(lo: &BigRational, hi: &BigRational, d: ClosedInterval) -> Result<()> {
    let above_lo = |v: &BigRational| d.lo() == f64::NEG_INFINITY || exact_of(d.lo()).map(|l| *v >= l).unwrap_or(false);
    let below_hi = |v: &BigRational| d.hi() == f64::INFINITY || exact_of(d.hi()).map(|h| *v <= h).unwrap_or(false);
    if above_lo(lo) && below_hi(hi) {
        Ok(())
    } else {
        Err(Error::NotSelfMap {
            img_lo: exact::to_f64(lo),
            img_hi: exact::to_f64(hi),
            lo: d.lo(),
            hi: d.hi(),
        })
    }
}

/// Self-map check for an affine map, decided in exact arithmetic; infinite
/// endpoints go through the sign of `c`.
fn check_affine_image(a: &AffineMap, d: ClosedInterval) -> Result<()> {
    let c = a.c_param().exact();
    let x0 = a.x0_param().exact();
    let c_sign = exact::sign_of(c);
    // None encodes an infinite image endpoint, with its sign alongside.
    let at = |x: f64| -> (Option<BigRational>, f64) {
        if x.is_finite() {
            (Some(c * exact::from_f64(x).expect("finite endpoint") + x0), 0.0)
        } else if c_sign == Sign::NoSign {
            (Some(x0.clone()), 0.0)
        } else if c_sign == Sign::Minus {
            (None, -x.signum())
        } else {
            (None, x.signum())
        }
    };
    let ends = [at(d.lo()), at(d.hi())];
    let inside = |(v, s): &(Option<BigRational>, f64)| -> Result<bool> {
        Ok(match v {
            None => (*s < 0.0 && d.lo() == f64::NEG_INFINITY) || (*s > 0.0 && d.hi() == f64::INFINITY),
            Some(v) => {
                (d.lo() == f64::NEG_INFINITY || *v >= exact_of(d.lo())?)
                    && (d.hi() == f64::INFINITY || *v <= exact_of(d.hi())?)
            }
        })
    };
    if inside(&ends[0])? && inside(&ends[1])? {
        return Ok(());
    }
    let approx = |(v, s): &(Option<BigRational>, f64)| v.as_ref().map(exact::to_f64).unwrap_or(s * f64::INFINITY);
    let (e0, e1) = (approx(&ends[0]), approx(&ends[1]));
    Err(Error::NotSelfMap {
        img_lo: e0.min(e1),
        img_hi: e0.max(e1),
        lo: d.lo(),
        hi: d.hi(),
    })
}

/// On-disk form of a [`MapSpec`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MapFile {
    Affine {
        c: Param,
        x0: Param,
        #[serde(default)]
        domain: ClosedInterval,
    },
    ThreeSegment {
        c1: Param,
        c2: Param,
        b1: Param,
        b2: Param,
        #[serde(default)]
        domain: ClosedInterval,
    },
    Polyline {
        points: Vec<(Param, Param)>,
        #[serde(default)]
        domain: ClosedInterval,
    },
    QIndicator {
        b: Param,
        c: Param,
        #[serde(default)]
        domain: ClosedInterval,
    },
}

impl MapFile {
    /// Family invariants only; the self-map check happens in [`MapSpec::new`].
    pub fn into_parts(self) -> Result<(MapKind, ClosedInterval)> {
        Ok(match self {
            MapFile::Affine { c, x0, domain } => (MapKind::Affine(AffineMap::new(c, x0)), domain),
            MapFile::ThreeSegment { c1, c2, b1, b2, domain } => {
                (MapKind::ThreeSegment(ThreeSegmentMap::new(c1, c2, b1, b2)?), domain)
            }
            MapFile::Polyline { points, domain } => {
                let pts = points.into_iter().map(|(x, y)| (x.value(), y.value())).collect();
                (MapKind::Polyline(PolylineMap::new(pts)?), domain)
            }
            MapFile::QIndicator { b, c, domain } => {
                (MapKind::QIndicator(QIndicatorMap::new(b.value(), c.value())?), domain)
            }
        })
    }
}

impl TryFrom<MapFile> for MapSpec {
    type Error = Error;

    fn try_from(f: MapFile) -> Result<Self> {
        let (kind, domain) = f.into_parts()?;
        MapSpec::new(kind, domain)
    }
}

impl From<MapSpec> for MapFile {
    fn from(m: MapSpec) -> Self {
        let domain = m.domain;
        match m.kind {
            MapKind::Affine(a) => MapFile::Affine { c: a.c, x0: a.x0, domain },
            MapKind::ThreeSegment(t) => MapFile::ThreeSegment {
                c1: t.c1,
                c2: t.c2,
                b1: t.b1,
                b2: t.b2,
                domain,
            },
            MapKind::Polyline(p) => MapFile::Polyline {
                points: p.points.into_iter().map(|(x, y)| (Param::from(x), Param::from(y))).collect(),
                domain,
            },
            MapKind::QIndicator(q) => MapFile::QIndicator {
                b: Param::from(q.b),
                c: Param::from(q.c),
                domain,
            },
        }
    }
}
