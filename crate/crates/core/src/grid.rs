//! Sampling plans for grid estimates over possibly unbounded domains.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maps::{MapKind, MapSpec};

/// Uniform points over the central window.
pub const DEFAULT_UNIFORM_POINTS: usize = 4001;
/// Half-width of the central window on unbounded domains.
pub const DEFAULT_WINDOW: f64 = 100.0;
/// Log-spaced points on each unbounded side, out to [`DEFAULT_FAR`].
pub const DEFAULT_LOG_POINTS: usize = 200;
pub const DEFAULT_FAR: f64 = 1e6;
/// Points clustered just above `b1` for three-segment maps.
pub const DEFAULT_CLUSTER_POINTS: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Grid {
    /// The map-aware default plan.
    Default,
    Uniform { lo: f64, hi: f64, count: usize },
    Points(Vec<f64>),
}

impl Grid {
    /// Sorted, deduplicated sample points inside the map's domain.
    pub fn points(&self, m: &MapSpec) -> Result<Vec<f64>> {
        let domain = m.domain();
        let mut pts = match self {
            Grid::Default => default_points(m),
            Grid::Uniform { lo, hi, count } => {
                if *count == 0 || !(lo <= hi) {
                    return Err(Error::EmptyDomain);
                }
                let pts = uniform(*lo, *hi, *count);
                for &x in &pts {
                    domain.check(x)?;
                }
                pts
            }
            Grid::Points(v) => {
                for &x in v {
                    domain.check(x)?;
                }
                v.clone()
            }
        };
        pts.retain(|x| x.is_finite() && domain.contains(*x));
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        if pts.is_empty() {
            return Err(Error::EmptyDomain);
        }
        Ok(pts)
    }
}

pub fn uniform(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => vec![],
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / (count - 1) as f64;
            (0..count)
                .map(|k| if k == count - 1 { hi } else { lo + step * k as f64 })
                .collect()
        }
    }
}

/// `count` magnitudes from `from` to `to`, geometrically spaced, endpoints included.
pub fn log_spaced(from: f64, to: f64, count: usize) -> Vec<f64> {
    if count < 2 {
        return vec![from; count];
    }
    let (a, b) = (from.ln(), to.ln());
    (0..count)
        .map(|k| match k {
            0 => from,
            k if k == count - 1 => to,
            k => (a + (b - a) * k as f64 / (count - 1) as f64).exp(),
        })
        .collect()
}

fn default_points(m: &MapSpec) -> Vec<f64> {
    let d = m.domain();
    let mut pts = Vec::new();
    if d.is_bounded() {
        pts.extend(uniform(d.lo(), d.hi(), DEFAULT_UNIFORM_POINTS));
    } else {
        let (lo, hi) = d.clip(DEFAULT_WINDOW).unwrap_or_else(|| {
            // half-line lying entirely outside the central window
            if d.lo().is_finite() {
                (d.lo(), d.lo() + 2.0 * DEFAULT_WINDOW)
            } else {
                (d.hi() - 2.0 * DEFAULT_WINDOW, d.hi())
            }
        });
        pts.extend(uniform(lo, hi, DEFAULT_UNIFORM_POINTS));
        let far = log_spaced(DEFAULT_WINDOW, DEFAULT_FAR, DEFAULT_LOG_POINTS);
        pts.extend(far.iter().copied());
        pts.extend(far.iter().map(|x| -x));
        for end in [d.lo(), d.hi()] {
            if end.is_finite() {
                pts.push(end);
            }
        }
    }
    match m.kind() {
        MapKind::ThreeSegment(t) => {
            // the ratio's supremum sits on (b1, b2]
            let width = t.b2() - t.b1();
            pts.extend((1..=DEFAULT_CLUSTER_POINTS).map(|k| {
                if k == DEFAULT_CLUSTER_POINTS {
                    t.b2()
                } else {
                    let frac = 10f64.powf(-6.0 * (1.0 - k as f64 / DEFAULT_CLUSTER_POINTS as f64));
                    t.b1() + width * frac
                }
            }));
            pts.extend([t.b1(), t.c1(), t.c2()]);
        }
        MapKind::Polyline(p) => pts.extend(p.points().iter().map(|(x, _)| *x)),
        _ => {}
    }
    pts
}
