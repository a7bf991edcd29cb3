//! Feasibility checks for a tuning of the steering law.
//!
//! Every check returns a [`FeasibilityReport`]: a list of named inequalities
//! with their two sides and slack, plus the derived quantities the inequalities
//! were built from.

mod limits;
mod radial;
mod zone;

use std::fmt::{self, Write as _};

use serde::Serialize;

use crate::error::{Error, Result};

pub use limits::{check_pointwise_necessary, check_tuning_limits, semistrip_bound, FieldBounds};
pub use radial::{
    advection_parameters, necessary_radial, radial_turn_demand, simplified_radial_bound,
    sufficient_radial, sup_radial_turn_demand, AdvectionBounds, AdvectionDerived, ProfileKnowledge,
    RadialBounds, SUP_GRID_POINTS,
};
pub use zone::{
    check_initial_discs, rotation_of_gradient, scan_zone, DiscCheckOptions, GradientRotation,
    ZoneGrid, ZoneScan, SCAN_NAMES,
};

/// Slab `d_minus <= D <= d_plus` in which the field bounds are required.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OperationalZone {
    pub d_minus: f64,
    pub d_plus: f64,
}

impl OperationalZone {
    /// Either end may be infinite.
    pub fn new(d_minus: f64, d_plus: f64) -> Result<Self> {
        if d_minus.is_nan() || d_plus.is_nan() || d_minus > d_plus {
            return Err(Error::InvalidParameter(format!(
                "operational zone [{d_minus}, {d_plus}] is empty"
            )));
        }
        Ok(Self { d_minus, d_plus })
    }

    pub fn contains(&self, d: f64) -> bool {
        self.d_minus <= d && d <= self.d_plus
    }
}

/// Comparison a margin asserts between its left-hand side and its bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Less,
    LessEq,
    Greater,
    GreaterEq,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Less => "<",
            Relation::LessEq => "<=",
            Relation::Greater => ">",
            Relation::GreaterEq => ">=",
        }
    }

    fn is_strict(self) -> bool {
        matches!(self, Relation::Less | Relation::Greater)
    }
}

/// One inequality `lhs <relation> bound`. `slack` is positive when it holds
/// with room to spare.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Margin {
    pub key: String,
    pub lhs: f64,
    pub relation: Relation,
    pub bound: f64,
    pub slack: f64,
}

impl Margin {
    pub fn new(key: impl Into<String>, lhs: f64, relation: Relation, bound: f64) -> Self {
        let slack = match relation {
            Relation::Less | Relation::LessEq => bound - lhs,
            Relation::Greater | Relation::GreaterEq => lhs - bound,
        };
        // inf - inf: both sides unbounded in the same direction.
        let slack = if slack.is_nan() && !lhs.is_nan() && !bound.is_nan() {
            if relation.is_strict() {
                f64::NEG_INFINITY
            } else {
                0.0
            }
        } else {
            slack
        };
        Self {
            key: key.into(),
            lhs,
            relation,
            bound,
            slack,
        }
    }

    /// Strict relations fail at zero slack; NaN never holds.
    pub fn holds(&self) -> bool {
        if self.relation.is_strict() {
            self.slack > 0.0
        } else {
            self.slack >= 0.0
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Derived {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeasibilityReport {
    pub satisfied: bool,
    pub margins: Vec<Margin>,
    pub derived: Vec<Derived>,
    pub notes: Vec<String>,
}

impl Default for FeasibilityReport {
    fn default() -> Self {
        Self::new()
    }
}

impl FeasibilityReport {
    pub fn new() -> Self {
        Self {
            satisfied: true,
            margins: Vec::new(),
            derived: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn push(&mut self, margin: Margin) -> &mut Self {
        self.satisfied &= margin.holds();
        self.margins.push(margin);
        self
    }

    pub fn check(&mut self, key: &str, lhs: f64, relation: Relation, bound: f64) -> &mut Self {
        self.push(Margin::new(key, lhs, relation, bound))
    }

    pub fn derive(&mut self, name: &str, value: f64) -> &mut Self {
        self.derived.push(Derived {
            name: name.to_string(),
            value,
        });
        self
    }

    pub fn note(&mut self, text: impl Into<String>) -> &mut Self {
        self.notes.push(text.into());
        self
    }

    /// Appends another report, prefixing its keys with `scope.` when `scope` is non-empty.
    pub fn absorb(&mut self, scope: &str, other: FeasibilityReport) -> &mut Self {
        let name = |k: String| {
            if scope.is_empty() {
                k
            } else {
                format!("{scope}.{k}")
            }
        };
        for mut m in other.margins {
            m.key = name(m.key);
            self.push(m);
        }
        for mut d in other.derived {
            d.name = name(d.name);
            self.derived.push(d);
        }
        for n in other.notes {
            self.notes.push(if scope.is_empty() {
                n
            } else {
                format!("[{scope}] {n}")
            });
        }
        self
    }

    pub fn margin(&self, key: &str) -> Option<&Margin> {
        self.margins.iter().find(|m| m.key == key)
    }

    pub fn derived_value(&self, name: &str) -> Option<f64> {
        self.derived
            .iter()
            .find(|d| d.name == name)
            .map(|d| d.value)
    }

    /// Keys of the margins that do not hold.
    pub fn violations(&self) -> Vec<&str> {
        self.margins
            .iter()
            .filter(|m| !m.holds())
            .map(|m| m.key.as_str())
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// One line per margin (`key lhs rel bound slack status`), then the derived values and notes.
impl fmt::Display for FeasibilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        writeln!(
            out,
            "feasible: {}",
            if self.satisfied { "yes" } else { "no" }
        )?;
        for m in &self.margins {
            writeln!(
                out,
                "margin {} lhs={:.9e} {} bound={:.9e} slack={:.3e} {}",
                m.key,
                m.lhs,
                m.relation.symbol(),
                m.bound,
                m.slack,
                if m.holds() { "ok" } else { "VIOLATED" }
            )?;
        }
        for d in &self.derived {
            writeln!(out, "derived {} = {:.9e}", d.name, d.value)?;
        }
        for n in &self.notes {
            writeln!(out, "note {n}")?;
        }
        f.write_str(&out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strict_margin_fails_at_equality() {
        let m = Margin::new("x", 1.0, Relation::Less, 1.0);
        assert_eq!(m.slack, 0.0);
        assert!(!m.holds());
        assert!(Margin::new("x", 1.0, Relation::LessEq, 1.0).holds());
        assert!(Margin::new("x", 2.0, Relation::Greater, 1.0).holds());
        assert!(!Margin::new("x", f64::NAN, Relation::GreaterEq, 1.0).holds());
        assert!(!Margin::new("x", f64::INFINITY, Relation::Less, f64::INFINITY).holds());
    }

    #[test]
    fn report_aggregates_and_serializes() {
        let mut r = FeasibilityReport::new();
        r.check("a", 0.5, Relation::Less, 1.0)
            .derive("mu_star", 0.1);
        assert!(r.satisfied);
        let mut other = FeasibilityReport::new();
        other.check("b", 2.0, Relation::LessEq, 1.0).note("tight");
        r.absorb("sub", other);
        assert!(!r.satisfied);
        assert_eq!(r.violations(), vec!["sub.b"]);
        assert_eq!(r.margin("sub.b").unwrap().slack, -1.0);
        assert_eq!(r.derived_value("mu_star"), Some(0.1));
        let text = r.to_string();
        assert!(text.contains("margin sub.b"));
        assert!(text.contains("VIOLATED"));
        let json: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(json["satisfied"], false);
        assert_eq!(json["margins"][1]["relation"], "less_eq");
    }

    #[test]
    fn zone_ordering() {
        assert!(OperationalZone::new(1.0, 0.0).is_err());
        let z = OperationalZone::new(-1.0, f64::INFINITY).unwrap();
        assert!(z.contains(1e300));
        assert!(!z.contains(-2.0));
    }
}
