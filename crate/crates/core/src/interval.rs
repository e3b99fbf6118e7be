use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::json::parse_ext_real;

/// A nonempty closed interval of the real line. Endpoints may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedInterval {
    lo: f64,
    hi: f64,
}

impl ClosedInterval {
    pub const REAL_LINE: ClosedInterval = ClosedInterval {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };

    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo == f64::INFINITY || hi == f64::NEG_INFINITY || lo > hi {
            return Err(Error::InvalidParameters(format!(
                "[{lo}, {hi}] is not a nonempty closed interval"
            )));
        }
        Ok(Self { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn check(&self, x: f64) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::OutOfDomain {
                x,
                lo: self.lo,
                hi: self.hi,
            })
        }
    }

    /// Intersection with `[-radius, radius]`, or `None` when they are disjoint.
    pub fn clip(&self, radius: f64) -> Option<(f64, f64)> {
        let lo = self.lo.max(-radius);
        let hi = self.hi.min(radius);
        (lo <= hi).then_some((lo, hi))
    }

    /// A finite representative point: the midpoint when bounded, otherwise
    /// the finite endpoint (or 0 on the whole line).
    pub fn finite_center(&self) -> f64 {
        match (self.lo.is_finite(), self.hi.is_finite()) {
            (true, true) => self.lo + (self.hi - self.lo) / 2.0,
            (true, false) => self.lo,
            (false, true) => self.hi,
            (false, false) => 0.0,
        }
    }
}

impl Default for ClosedInterval {
    fn default() -> Self {
        Self::REAL_LINE
    }
}

fn endpoint(v: f64) -> serde_json::Value {
    if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        v.into()
    }
}

impl Serialize for ClosedInterval {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [endpoint(self.lo), endpoint(self.hi)].serialize(s)
    }
}

impl<'de> Deserialize<'de> for ClosedInterval {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = <[serde_json::Value; 2]>::deserialize(d)?;
        let lo = parse_ext_real(&raw[0]).map_err(D::Error::custom)?;
        let hi = parse_ext_real(&raw[1]).map_err(D::Error::custom)?;
        ClosedInterval::new(lo, hi).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_and_degenerate_infinite() {
        assert!(ClosedInterval::new(2.0, 1.0).is_err());
        assert!(ClosedInterval::new(f64::INFINITY, f64::INFINITY).is_err());
        assert!(ClosedInterval::new(f64::NAN, 0.0).is_err());
        assert!(ClosedInterval::new(3.0, 3.0).is_ok());
    }

    #[test]
    fn contains_is_closed() {
        let i = ClosedInterval::new(-1.0, 1.0).unwrap();
        assert!(i.contains(-1.0) && i.contains(1.0) && i.contains(0.0));
        assert!(!i.contains(1.0000001));
        assert!(ClosedInterval::REAL_LINE.contains(-1e300));
    }

    #[test]
    fn json_uses_inf_strings() {
        let i: ClosedInterval = serde_json::from_str(r#"["-inf", 5]"#).unwrap();
        assert_eq!(i.lo(), f64::NEG_INFINITY);
        assert_eq!(i.hi(), 5.0);
        assert_eq!(serde_json::to_string(&i).unwrap(), r#"["-inf",5.0]"#);
        assert!(serde_json::from_str::<ClosedInterval>(r#"[3, 1]"#).is_err());
    }

    #[test]
    fn clip_and_center() {
        let half = ClosedInterval::new(10.0, f64::INFINITY).unwrap();
        assert_eq!(half.clip(1e6), Some((10.0, 1e6)));
        assert_eq!(half.clip(5.0), None);
        assert_eq!(half.finite_center(), 10.0);
        assert_eq!(ClosedInterval::REAL_LINE.finite_center(), 0.0);
    }
}
