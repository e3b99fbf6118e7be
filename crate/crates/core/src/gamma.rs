//! Known bounds on `gamma(X, n, a)`, the smallest Lipschitz constant at which
//! an `(n, a)`-rotative self-map of a closed convex subset of `X` can be
//! fixed-point free.
//!
//! Bounds stated for every Banach space also hold for Hilbert spaces, the
//! real line and `C[0, 1]`; Hilbert-space bounds also hold on the real line.
//! Every applicable bound is returned and callers combine them (the best
//! lower bound is the max).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::json::{ext_real, fmt_g17};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SpaceKind {
    RealLine,
    BanachGeneric,
    Hilbert,
    C01,
}

impl SpaceKind {
    pub const ALL: [SpaceKind; 4] = [
        SpaceKind::RealLine,
        SpaceKind::BanachGeneric,
        SpaceKind::Hilbert,
        SpaceKind::C01,
    ];

    fn is_hilbert(self) -> bool {
        matches!(self, SpaceKind::Hilbert | SpaceKind::RealLine)
    }
}

impl fmt::Display for SpaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpaceKind::RealLine => "REAL_LINE",
            SpaceKind::BanachGeneric => "BANACH_GENERIC",
            SpaceKind::Hilbert => "HILBERT",
            SpaceKind::C01 => "C01",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Lower,
    Upper,
    Exact,
}

/// Which published result a bound comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundSource {
    /// `n = 2`: 2; `n > 2`: `((-1 + sqrt(n(n-1) - 1/(n-1))) / (n-2))^(1/(n-1))`, at `a = 0`.
    PeriodicLower,
    /// `n = 2`: max of two closed forms in `a`.
    TwoRotativeLower,
    /// Hilbert, `n = 2`, `a = 0`: `sqrt(pi^2 - 3)`.
    HilbertPiLower,
    /// Hilbert, `n = 2`: `sqrt(5 / (a^2 + 1))`.
    HilbertAffineLower,
    /// `C[0, 1]`, `n = 2`, `a in (1, 2)`: `1 / (a - 1)`.
    ContinuousFunctionsUpper,
    /// Tabulated Banach-space constants for `n = 3..=6`, `a = 0`.
    BanachTable,
    /// Tabulated Hilbert-space constants for `n = 3..=6`, `a = 0`.
    HilbertTable,
    /// Continuous 2-rotative maps on closed intervals always have fixed points.
    RealLineExistence,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundValue {
    #[serde(with = "ext_real")]
    pub value: f64,
    pub kind: BoundKind,
    pub source: BoundSource,
}

/// Banach-space lower bounds at `a = 0`, indexed by `n - 3`.
pub const BANACH_TABLE: [f64; 4] = [1.3821, 1.2524, 1.1777, 1.1329];
/// Hilbert-space lower bounds at `a = 0`, indexed by `n - 3`.
pub const HILBERT_TABLE: [f64; 4] = [1.5549, 1.3267, 1.2152, 1.1562];

fn check_query(n: usize, a: f64) -> Result<()> {
    if n < 2 || !(a >= 0.0 && a < n as f64) {
        return Err(Error::InvalidParameters(format!(
            "gamma(X, n, a) needs n >= 2 and 0 <= a < n, got n = {n}, a = {a}"
        )));
    }
    Ok(())
}

/// The general-`n` lower bound at `a = 0`.
pub fn periodic_lower(n: usize) -> f64 {
    if n == 2 {
        return 2.0;
    }
    let nf = n as f64;
    let radicand = nf * (nf - 1.0) - 1.0 / (nf - 1.0);
    ((-1.0 + radicand.sqrt()) / (nf - 2.0)).powf(1.0 / (nf - 1.0))
}

/// The `n = 2` lower bound valid for `a in [0, 2)`.
pub fn two_rotative_lower(a: f64) -> f64 {
    let first = 0.5 * (2.0 - a + ((2.0 - a).powi(2) + a * a).sqrt());
    let s = a * a + 4.0;
    let second = (s + (s * s - 64.0 * a + 64.0).sqrt()) / 8.0;
    first.max(second)
}

pub fn hilbert_pi_lower() -> f64 {
    (std::f64::consts::PI.powi(2) - 3.0).sqrt()
}

pub fn hilbert_affine_lower(a: f64) -> f64 {
    (5.0 / (a * a + 1.0)).sqrt()
}

pub fn continuous_functions_upper(a: f64) -> f64 {
    1.0 / (a - 1.0)
}

/// All known lower (and exact) bounds for `gamma(space, n, a)`.
pub fn known_gamma_lower_bound(space: SpaceKind, n: usize, a: f64) -> Result<Vec<BoundValue>> {
    check_query(n, a)?;
    let lower = |value, source| BoundValue {
        value,
        kind: BoundKind::Lower,
        source,
    };
    let mut out = Vec::new();
    if space == SpaceKind::RealLine && n == 2 {
        out.push(BoundValue {
            value: f64::INFINITY,
            kind: BoundKind::Exact,
            source: BoundSource::RealLineExistence,
        });
    }
    if a == 0.0 {
        out.push(lower(periodic_lower(n), BoundSource::PeriodicLower));
    }
    if n == 2 {
        out.push(lower(two_rotative_lower(a), BoundSource::TwoRotativeLower));
    }
    if space.is_hilbert() && n == 2 {
        if a == 0.0 {
            out.push(lower(hilbert_pi_lower(), BoundSource::HilbertPiLower));
        }
        out.push(lower(hilbert_affine_lower(a), BoundSource::HilbertAffineLower));
    }
    if a == 0.0 && (3..=6).contains(&n) {
        out.push(lower(BANACH_TABLE[n - 3], BoundSource::BanachTable));
        if space.is_hilbert() {
            out.push(lower(HILBERT_TABLE[n - 3], BoundSource::HilbertTable));
        }
    }
    if out.is_empty() {
        return Err(Error::NotApplicable(format!("no lower bound known for {space}, n = {n}, a = {a}")));
    }
    Ok(out)
}

/// Known upper bounds; only `C[0, 1]` with `n = 2`, `a in (1, 2)`.
pub fn known_gamma_upper_bound(space: SpaceKind, n: usize, a: f64) -> Result<Vec<BoundValue>> {
    check_query(n, a)?;
    if space == SpaceKind::C01 && n == 2 && a > 1.0 && a < 2.0 {
        return Ok(vec![BoundValue {
            value: continuous_functions_upper(a),
            kind: BoundKind::Upper,
            source: BoundSource::ContinuousFunctionsUpper,
        }]);
    }
    Err(Error::NotApplicable(format!("no upper bound known for {space}, n = {n}, a = {a}")))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub space: SpaceKind,
    pub n: usize,
    pub a: f64,
    #[serde(flatten)]
    pub bound: BoundValue,
}

/// Every applicable bound for each space, `n` and `a`; invalid `(n, a)`
/// pairs are skipped.
pub fn bounds_table(ns: &[usize], a_samples: &[f64]) -> Vec<BoundRow> {
    let mut rows = Vec::new();
    for &space in &SpaceKind::ALL {
        for &n in ns {
            for &a in a_samples {
                let lower = known_gamma_lower_bound(space, n, a).unwrap_or_default();
                let upper = known_gamma_upper_bound(space, n, a).unwrap_or_default();
                rows.extend(lower.into_iter().chain(upper).map(|bound| BoundRow { space, n, a, bound }));
            }
        }
    }
    rows
}

/// Aligned plain-text rendering of [`bounds_table`] rows.
pub fn render_table(rows: &[BoundRow]) -> String {
    let header = ["space", "n", "a", "kind", "value", "source"];
    let body: Vec<[String; 6]> = rows
        .iter()
        .map(|r| {
            [
                r.space.to_string(),
                r.n.to_string(),
                fmt_g17(r.a),
                serde_plain(&r.bound.kind),
                fmt_bound(r.bound.value),
                serde_plain(&r.bound.source),
            ]
        })
        .collect();
    let mut widths = header.map(str::len);
    for row in &body {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let line = |cells: &[String]| {
        cells
            .iter()
            .zip(widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    let mut out = line(&header.map(String::from));
    out.push('\n');
    for row in &body {
        out.push_str(&line(row));
        out.push('\n');
    }
    out
}

fn fmt_bound(v: f64) -> String {
    if v.is_infinite() {
        "inf".into()
    } else {
        format!("{v:.6}")
    }
}

fn serde_plain<T: Serialize>(v: &T) -> String {
    match serde_json::to_value(v) {
        Ok(serde_json::Value::String(s)) => s,
        other => format!("{other:?}"),
    }
}
