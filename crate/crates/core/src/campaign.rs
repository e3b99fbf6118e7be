//! Seeded property campaigns: existence of fixed points for certified
//! rotative maps, the steep 2-rotative construction, and sup/inf duality of
//! monotone thresholds on finite grids.

use std::time::{Duration, Instant};

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fixed_point::{self, FixedPointResult, Method};
use crate::grid::Grid;
use crate::json::ext_real;
use crate::maps::{MapKind, MapSpec};
use crate::rotativity::{self, Decision, LipschitzReport, RotativityReport};

/// Relative shrink applied to certified parameter intervals.
pub const GENERATOR_MARGIN: f64 = 0.01;
/// Rejection-sampling cap for polylines.
pub const POLYLINE_ATTEMPTS: usize = 1000;
pub const POLYLINE_MAX_POINTS: usize = 12;
pub const POLYLINE_BOX: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Affine,
    ThreeSegment,
    Polyline,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Affine, Family::ThreeSegment, Family::Polyline];

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "affine" => Ok(Family::Affine),
            "three_segment" => Ok(Family::ThreeSegment),
            "polyline" => Ok(Family::Polyline),
            other => Err(Error::Parse(format!("unknown family {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub seed: u64,
    pub trials: usize,
    /// Sampling weights, in the order of [`Family::ALL`].
    pub weights: [f64; 3],
    pub n: usize,
    pub tol: f64,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            trials: 1000,
            weights: [1.0, 1.0, 1.0],
            n: 2,
            tol: fixed_point::DEFAULT_TOL,
        }
    }
}

impl CampaignConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidParameters("a campaign needs at least one trial".into()));
        }
        if self.weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) || self.weights.iter().all(|w| *w == 0.0) {
            return Err(Error::InvalidParameters(format!(
                "family weights must be nonnegative and not all zero, got {:?}",
                self.weights
            )));
        }
        if self.n < 2 {
            return Err(Error::InvalidParameters(format!("n must be >= 2, got {}", self.n)));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParameters(format!("tolerance must be > 0, got {}", self.tol)));
        }
        Ok(())
    }
}

/// The RNG for one trial: stream `trial` of the campaign seed.
pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

/// Draws a map from `family` that is certified `n`-rotative: by the exact
/// criterion for affine and three-segment maps, by a numeric `yes` for polylines.
pub fn generate_rotative_map<R: Rng>(rng: &mut R, family: Family, n: usize) -> Result<MapSpec> {
    match family {
        Family::Affine => {
            let (lo, hi) = rotativity::affine_rotative_interval(n)?;
            let shrink = 1.0 - GENERATOR_MARGIN;
            let c = rng.gen_range(lo * shrink..hi * shrink);
            let x0 = rng.gen_range(-100.0..=100.0);
            MapSpec::affine(c, x0)
        }
        Family::ThreeSegment => {
            let nf = n as f64;
            let c1 = rng.gen_range(-50.0..=50.0);
            let c2 = c1 + rng.gen_range(0.1..=20.0);
            let threshold = (nf * c2 - c1) / (nf - 1.0);
            // (1.01 t, 10 t] for t >= 1; shifted by the same absolute amounts below
            let scale = threshold.abs().max(1.0);
            let b1 = rng.gen_range(threshold + GENERATOR_MARGIN * scale..=threshold + 9.0 * scale);
            let b2 = b1 + 10f64.powf(rng.gen_range(-3.0..=1.0));
            MapSpec::three_segment(c1, c2, b1, b2)
        }
        Family::Polyline => {
            for _ in 0..POLYLINE_ATTEMPTS {
                let m = random_polyline(rng)?;
                let report = rotativity::estimate_rotativity_constant(&m, n, &Grid::Default)?;
                if report.numeric_decision == Decision::Yes {
                    return Ok(m);
                }
            }
            Err(Error::GenerationExhausted {
                attempts: POLYLINE_ATTEMPTS,
            })
        }
    }
}

fn random_polyline<R: Rng>(rng: &mut R) -> Result<MapSpec> {
    let count = rng.gen_range(2..=POLYLINE_MAX_POINTS);
    let mut xs: Vec<f64> = (0..count).map(|_| rng.gen_range(-POLYLINE_BOX..=POLYLINE_BOX)).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let max_slope = [0.5, 0.9, 1.5, 3.0][rng.gen_range(0..4)];
    let mut y = rng.gen_range(-POLYLINE_BOX..=POLYLINE_BOX);
    let mut points = Vec::with_capacity(xs.len());
    for (i, &x) in xs.iter().enumerate() {
        if i > 0 {
            let slope = rng.gen_range(-max_slope..=max_slope);
            y = (y + slope * (x - xs[i - 1])).clamp(-POLYLINE_BOX, POLYLINE_BOX);
        }
        points.push((x, y));
    }
    MapSpec::polyline(points)
}

/// Re-checks what the generator certified.
pub fn is_certified(m: &MapSpec, n: usize) -> Result<bool> {
    Ok(match m.kind() {
        MapKind::Affine(_) | MapKind::ThreeSegment(_) => {
            let a = rotativity::analytic_rotativity(m, n)?.expect("closed-form family");
            let b1_test = a.b1_threshold_test.unwrap_or(true);
            a.rotative && b1_test
        }
        MapKind::Polyline(_) => {
            rotativity::estimate_rotativity_constant(m, n, &Grid::Default)?.numeric_decision == Decision::Yes
        }
        MapKind::QIndicator(_) => false,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub family: Family,
    pub solved: bool,
    pub x_star: Option<f64>,
    pub residual: Option<f64>,
    pub method: Option<Method>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialFailure {
    pub trial: usize,
    pub seed: u64,
    pub family: Family,
    /// The map, when generation got that far.
    pub map: Option<MapSpec>,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignReport {
    pub config: CampaignConfig,
    /// Only `n = 2` campaigns check a theorem; others are exploratory.
    pub exploratory: bool,
    pub trials: usize,
    pub successes: usize,
    pub failures: Vec<TrialFailure>,
    pub max_residual: f64,
    pub records: Vec<TrialRecord>,
    /// Not serialized, so reports for equal configs are byte-identical.
    #[serde(skip)]
    pub wall_time: Duration,
}

/// Generates `cfg.trials` certified maps and solves each. Failures are data.
pub fn run_existence_campaign(cfg: &CampaignConfig) -> Result<CampaignReport> {
    cfg.validate()?;
    let start = Instant::now();
    let chooser = WeightedIndex::new(cfg.weights).map_err(|e| Error::InvalidParameters(e.to_string()))?;

    let outcomes: Vec<(TrialRecord, Option<TrialFailure>)> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| run_trial(cfg, &chooser, trial))
        .collect();

    let mut records = Vec::with_capacity(cfg.trials);
    let mut failures = Vec::new();
    for (record, failure) in outcomes {
        records.push(record);
        failures.extend(failure);
    }
    let successes = records.iter().filter(|r| r.solved).count();
    let max_residual = records.iter().filter_map(|r| r.residual).fold(0.0, f64::max);
    Ok(CampaignReport {
        config: cfg.clone(),
        exploratory: cfg.n != 2,
        trials: cfg.trials,
        successes,
        failures,
        max_residual,
        records,
        wall_time: start.elapsed(),
    })
}

fn run_trial(cfg: &CampaignConfig, chooser: &WeightedIndex<f64>, trial: usize) -> (TrialRecord, Option<TrialFailure>) {
    let mut rng = trial_rng(cfg.seed, trial);
    let family = Family::ALL[chooser.sample(&mut rng)];
    let mut record = TrialRecord {
        trial,
        family,
        solved: false,
        x_star: None,
        residual: None,
        method: None,
    };
    let fail = |map: Option<MapSpec>, error: String| TrialFailure {
        trial,
        seed: cfg.seed,
        family,
        map,
        error,
    };

    let map = match generate_rotative_map(&mut rng, family, cfg.n) {
        Ok(m) => m,
        Err(e) => return (record, Some(fail(None, e.to_string()))),
    };
    match is_certified(&map, cfg.n) {
        Ok(true) => {}
        Ok(false) => return (record, Some(fail(Some(map), "generated map failed its re-certification".into()))),
        Err(e) => return (record, Some(fail(Some(map), e.to_string()))),
    }
    match fixed_point::solve(&map, cfg.tol) {
        Ok(FixedPointResult {
            x_star,
            residual,
            method,
            ..
        }) if residual <= cfg.tol => {
            record.solved = true;
            record.x_star = Some(x_star);
            record.residual = Some(residual);
            record.method = Some(method);
            (record, None)
        }
        Ok(r) => {
            record.residual = Some(r.residual);
            (record, Some(fail(Some(map), format!("residual {} above tolerance", r.residual))))
        }
        Err(e) => (record, Some(fail(Some(map), e.to_string()))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteepConstruction {
    pub map: MapSpec,
    pub lipschitz: LipschitzReport,
    pub rotativity: RotativityReport,
}

/// A 2-rotative map with Lipschitz constant exactly `m` and fixed point 1:
/// the three-segment map `(1, 2, 4, 4 + 1/m)`.
pub fn construct_steep_2rotative(m: f64) -> Result<SteepConstruction> {
    if !(m > 0.0) || !m.is_finite() {
        return Err(Error::InvalidParameters(format!("steepness must be a positive finite number, got {m}")));
    }
    let map = MapSpec::three_segment(1.0, 2.0, 4.0, 4.0 + 1.0 / m)?;
    let lipschitz = rotativity::lipschitz_estimate(&map, &Grid::Default)?;
    let rotativity = rotativity::estimate_rotativity_constant(&map, 2, &Grid::Default)?;
    Ok(SteepConstruction {
        map,
        lipschitz,
        rotativity,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Duality {
    /// Largest grid value where the predicate holds (`-inf` if none).
    #[serde(with = "ext_real")]
    pub sup_a: f64,
    /// Smallest grid value where it fails (`+inf` if none).
    #[serde(with = "ext_real")]
    pub inf_b: f64,
    #[serde(with = "ext_real")]
    pub gap: f64,
}

/// Splits an increasing grid by a predicate that is true up to some point
/// and false afterwards.
pub fn threshold_duality<P: Fn(f64) -> bool>(predicate: P, grid: &[f64]) -> Result<Duality> {
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParameters("grid must be strictly increasing".into()));
    }
    let mut first_false: Option<usize> = None;
    for (i, &k) in grid.iter().enumerate() {
        match (predicate(k), first_false) {
            (false, None) => first_false = Some(i),
            (true, Some(_)) => return Err(Error::NotMonotone { index: i }),
            _ => {}
        }
    }
    let (sup_a, inf_b) = match first_false {
        None => (grid.last().copied().unwrap_or(f64::NEG_INFINITY), f64::INFINITY),
        Some(0) => (f64::NEG_INFINITY, grid[0]),
        Some(i) => (grid[i - 1], grid[i]),
    };
    Ok(Duality {
        sup_a,
        inf_b,
        gap: inf_b - sup_a,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn affine_generator_respects_shrunk_interval() {
        let mut rng = trial_rng(7, 0);
        for _ in 0..500 {
            let m = generate_rotative_map(&mut rng, Family::Affine, 2).unwrap();
            let MapKind::Affine(a) = m.kind() else { panic!() };
            assert!(a.c() > -2.97 - 1e-12 && a.c() < 0.99, "{}", a.c());
            assert!(is_certified(&m, 2).unwrap());
        }
    }

    #[test]
    fn three_segment_generator_clears_threshold() {
        let mut rng = trial_rng(11, 3);
        for n in [2, 3, 7] {
            for _ in 0..200 {
                let m = generate_rotative_map(&mut rng, Family::ThreeSegment, n).unwrap();
                let MapKind::ThreeSegment(t) = m.kind() else { panic!() };
                let threshold = (n as f64 * t.c2() - t.c1()) / (n as f64 - 1.0);
                assert!(t.b1() > threshold);
                assert!(is_certified(&m, n).unwrap());
            }
        }
        // with c1 = 1, c2 = 2 at n = 2 the threshold is 3
        assert!(rotativity::pwl_rotativity_criterion(1.0, 2.0, 3.031, 4.0, 2).unwrap());
    }

    #[test]
    fn polyline_generator_is_numerically_certified() {
        let mut rng = trial_rng(5, 1);
        for _ in 0..20 {
            let m = generate_rotative_map(&mut rng, Family::Polyline, 2).unwrap();
            let r = rotativity::estimate_rotativity_constant(&m, 2, &Grid::Default).unwrap();
            assert!(r.estimated_sup <= 2.0 - rotativity::DEFAULT_MARGIN);
        }
    }

    #[test]
    fn generation_is_deterministic() {
        for family in Family::ALL {
            let a = generate_rotative_map(&mut trial_rng(99, 4), family, 2).unwrap();
            let b = generate_rotative_map(&mut trial_rng(99, 4), family, 2).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn config_validation() {
        let bad = [
            CampaignConfig { trials: 0, ..Default::default() },
            CampaignConfig { weights: [0.0; 3], ..Default::default() },
            CampaignConfig { weights: [-1.0, 1.0, 1.0], ..Default::default() },
            CampaignConfig { n: 1, ..Default::default() },
        ];
        for cfg in bad {
            assert!(run_existence_campaign(&cfg).is_err(), "{cfg:?}");
        }
    }

    #[test]
    fn single_trial_campaign() {
        let cfg = CampaignConfig { trials: 1, ..Default::default() };
        let r = run_existence_campaign(&cfg).unwrap();
        assert_eq!(r.records.len(), 1);
        assert_eq!(r.successes + r.failures.len(), 1);
    }

    #[test]
    fn affine_campaign_matches_closed_form() {
        let cfg = CampaignConfig {
            trials: 100,
            weights: [1.0, 0.0, 0.0],
            seed: 3,
            ..Default::default()
        };
        let r = run_existence_campaign(&cfg).unwrap();
        assert_eq!(r.successes, 100);
        for rec in &r.records {
            let mut rng = trial_rng(cfg.seed, rec.trial);
            let family = Family::ALL[WeightedIndex::new(cfg.weights).unwrap().sample(&mut rng)];
            let m = generate_rotative_map(&mut rng, family, 2).unwrap();
            let MapKind::Affine(a) = m.kind() else { panic!() };
            let expected = a.x0() / (1.0 - a.c());
            assert!((rec.x_star.unwrap() - expected).abs() <= 1e-8 * expected.abs().max(1.0));
        }
    }

    #[test]
    fn steep_construction() {
        for m in [2.0, 10.0, 100.0, 1000.0] {
            let s = construct_steep_2rotative(m).unwrap();
            assert_relative_eq!(s.lipschitz.estimated_k, m, max_relative = 1e-6);
            assert_relative_eq!(s.lipschitz.analytic_k.unwrap(), m, max_relative = 1e-12);
            assert!(s.rotativity.is_rotative());
            assert!(s.rotativity.estimated_sup <= 1.5 + 1e-9);
            assert_eq!(s.rotativity.analytic.as_ref().unwrap().b1_bound, Some(1.5));
        }
        assert!(construct_steep_2rotative(0.0).is_err());
        assert!(construct_steep_2rotative(-1.0).is_err());
    }

    #[test]
    fn duality_examples() {
        let grid: Vec<f64> = (0..=6).map(|k| k as f64 * 0.5).collect();
        let d = threshold_duality(|k| k <= 1.5, &grid).unwrap();
        assert_eq!((d.sup_a, d.inf_b, d.gap), (1.5, 2.0, 0.5));
        let d = threshold_duality(|_| true, &grid).unwrap();
        assert_eq!(d.inf_b, f64::INFINITY);
        assert_eq!(d.sup_a, 3.0);
        let d = threshold_duality(|_| false, &grid).unwrap();
        assert_eq!(d.sup_a, f64::NEG_INFINITY);
        assert_eq!(d.inf_b, 0.0);
        assert_eq!(
            threshold_duality(|k| !(1.0..=2.0).contains(&k), &grid).unwrap_err(),
            Error::NotMonotone { index: 5 }
        );
        assert!(threshold_duality(|_| true, &[1.0, 1.0]).is_err());
    }
}
