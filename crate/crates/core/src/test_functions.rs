//! Benchmark fields: Franke's function and its unit-jump piecewise variant.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Franke's four-term exponential benchmark on the unit square.
pub fn franke(x: f64, y: f64) -> f64 {
    let a = 9.0 * x;
    let b = 9.0 * y;
    0.75 * (-((a - 2.0).powi(2) + (b - 2.0).powi(2)) / 4.0).exp()
        + 0.75 * (-(a + 1.0).powi(2) / 49.0 - (b + 1.0) / 10.0).exp()
        + 0.5 * (-((a - 7.0).powi(2) + (b - 3.0).powi(2)) / 4.0).exp()
        - 0.2 * (-(a - 4.0).powi(2) - (b - 7.0).powi(2)).exp()
}

/// Discontinuity curves `Gamma = {gamma = 0}` splitting the unit square.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Geometry {
    /// `gamma = 1 - x - y`.
    Line,
    /// `gamma = 0.25^2 - x^2 - y^2`.
    Circle,
    /// The square `[0.5, 1]^2` is the positive region.
    Square,
}

impl Geometry {
    pub const ALL: [Geometry; 3] = [Geometry::Line, Geometry::Circle, Geometry::Square];

    /// Signed level-set value. `Square` returns `+1` inside, `-1` outside.
    pub fn gamma(self, x: f64, y: f64) -> f64 {
        match self {
            Geometry::Line => 1.0 - x - y,
            Geometry::Circle => 0.0625 - x * x - y * y,
            Geometry::Square => {
                if x >= 0.5 && y >= 0.5 {
                    1.0
                } else {
                    -1.0
                }
            }
        }
    }

    /// Membership in the closed region `{gamma >= 0}`.
    pub fn in_positive(self, x: f64, y: f64) -> bool {
        self.gamma(x, y) >= 0.0
    }

    /// Euclidean distance from `(x, y)` to the part of `Gamma` inside the
    /// unit square.
    pub fn distance(self, x: f64, y: f64) -> f64 {
        match self {
            Geometry::Line => (1.0 - x - y).abs() / std::f64::consts::SQRT_2,
            Geometry::Circle => ((x * x + y * y).sqrt() - 0.25).abs(),
            Geometry::Square => {
                // Inner edges {x = 0.5, 0.5 <= y <= 1} and {y = 0.5, 0.5 <= x <= 1};
                // the outer edges coincide with the domain boundary.
                let vertical = segment_distance(x, y, 0.5, 1.0);
                let horizontal = segment_distance(y, x, 0.5, 1.0);
                vertical.min(horizontal)
            }
        }
    }
}

/// Distance from `(u, v)` to the segment `{u = 0.5, lo <= v <= hi}`.
fn segment_distance(u: f64, v: f64, lo: f64, hi: f64) -> f64 {
    let dv = if v < lo {
        lo - v
    } else if v > hi {
        v - hi
    } else {
        0.0
    };
    (u - 0.5).hypot(dv)
}

impl fmt::Display for Geometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Geometry::Line => "line",
            Geometry::Circle => "circle",
            Geometry::Square => "square",
        })
    }
}

impl FromStr for Geometry {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "line" => Ok(Geometry::Line),
            "circle" => Ok(Geometry::Circle),
            "square" => Ok(Geometry::Square),
            other => Err(Error::invalid(format!("unknown geometry `{other}`"))),
        }
    }
}

/// `1 + franke` on the positive region, `franke` elsewhere.
pub fn piecewise_tilde_f(geometry: Geometry, x: f64, y: f64) -> f64 {
    let f = franke(x, y);
    if geometry.in_positive(x, y) {
        1.0 + f
    } else {
        f
    }
}

/// Sampled field used by experiments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TestField {
    Franke,
    Piecewise { geometry: Geometry },
    Constant { value: f64 },
}

impl TestField {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match *self {
            TestField::Franke => franke(x, y),
            TestField::Piecewise { geometry } => piecewise_tilde_f(geometry, x, y),
            TestField::Constant { value } => value,
        }
    }

    pub fn geometry(&self) -> Option<Geometry> {
        match *self {
            TestField::Piecewise { geometry } => Some(geometry),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Term-by-term evaluation with a compensated sum, written independently
    /// of `franke`.
    fn franke_oracle(x: f64, y: f64) -> f64 {
        let terms = [
            0.75 * f64::exp(-(81.0 * (x - 2.0 / 9.0).powi(2) + 81.0 * (y - 2.0 / 9.0).powi(2)) / 4.0),
            0.75 * f64::exp(-81.0 * (x + 1.0 / 9.0).powi(2) / 49.0 - (9.0 * y + 1.0) / 10.0),
            0.5 * f64::exp(-(81.0 * (x - 7.0 / 9.0).powi(2) + 81.0 * (y - 1.0 / 3.0).powi(2)) / 4.0),
            -0.2 * f64::exp(-81.0 * (x - 4.0 / 9.0).powi(2) - 81.0 * (y - 7.0 / 9.0).powi(2)),
        ];
        let (mut sum, mut comp) = (0.0f64, 0.0f64);
        for t in terms {
            let y = t - comp;
            let s = sum + y;
            comp = (s - sum) - y;
            sum = s;
        }
        sum
    }

    #[test]
    fn franke_at_origin() {
        assert!((franke(0.0, 0.0) - 0.76641).abs() < 1e-4);
        assert!((franke(0.0, 0.0) - franke_oracle(0.0, 0.0)).abs() < 1e-14);
    }

    #[test]
    fn franke_matches_oracle() {
        // Reference from an mpmath evaluation at 50 digits.
        let reference = 0.325_762_089_280_684_1;
        assert!((franke(0.5, 0.5) - reference).abs() < 1e-14);
        assert!((franke_oracle(0.5, 0.5) - reference).abs() < 1e-14);
        for &(x, y) in &[(0.1, 0.9), (0.33, 0.71), (1.0, 1.0), (0.8, 0.2)] {
            assert!((franke(x, y) - franke_oracle(x, y)).abs() < 1e-14);
        }
        assert_ne!(franke(0.0, 0.0), franke(1.0, 1.0));
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(Geometry::Line.gamma(0.5, 0.5), 0.0);
        assert!(Geometry::Line.in_positive(0.5, 0.5));
        assert_eq!(Geometry::Circle.gamma(0.0, 0.0), 0.0625);
        assert!(Geometry::Circle.in_positive(0.0, 0.0));
        assert!(Geometry::Square.in_positive(0.75, 0.75));
        assert!(!Geometry::Square.in_positive(0.25, 0.75));
        assert!(Geometry::Square.in_positive(0.5, 0.5));
    }

    #[test]
    fn piecewise_examples() {
        assert_eq!(piecewise_tilde_f(Geometry::Line, 0.2, 0.2), 1.0 + franke(0.2, 0.2));
        assert_eq!(piecewise_tilde_f(Geometry::Circle, 0.9, 0.9), franke(0.9, 0.9));
    }

    #[test]
    fn distances() {
        assert!((Geometry::Line.distance(0.0, 0.0) - 1.0 / 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(Geometry::Circle.distance(0.0, 0.0), 0.25);
        assert_eq!(Geometry::Square.distance(0.75, 0.75), 0.25);
        assert_eq!(Geometry::Square.distance(0.25, 0.75), 0.25);
        assert!((Geometry::Square.distance(0.25, 0.25) - 0.25 * 2f64.sqrt()).abs() < 1e-15);
        assert!((Geometry::Square.distance(0.9, 0.95) - 0.4).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn jump_is_zero_or_one(x in 0.0f64..=1.0, y in 0.0f64..=1.0) {
            for g in Geometry::ALL {
                let d = piecewise_tilde_f(g, x, y) - franke(x, y);
                prop_assert!(d == 0.0 || (d - 1.0).abs() <= 4.0 * f64::EPSILON);
                prop_assert_eq!(d != 0.0, g.in_positive(x, y));
            }
        }

        #[test]
        fn gamma_sign_matches_distance_side(x in 0.0f64..=1.0, y in 0.0f64..=1.0) {
            for g in [Geometry::Line, Geometry::Circle] {
                let d = g.distance(x, y);
                prop_assert!(d >= 0.0);
                if g.in_positive(x, y) {
                    prop_assert!(g.gamma(x, y) >= 0.0);
                }
                if d == 0.0 {
                    prop_assert!(g.gamma(x, y).abs() < 1e-12);
                }
            }
        }
    }
}
