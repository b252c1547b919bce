//! Space-time lattice geometry: configuration, points, embedding and causal order.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;

/// One failed constraint, named by field.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstraintViolation {
    pub field: String,
    pub constraint: String,
}

impl fmt::Display for ConstraintViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.constraint)
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
#[error("invalid configuration: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
pub struct ConfigError(pub Vec<ConstraintViolation>);

impl ConfigError {
    pub fn single(field: &str, constraint: impl Into<String>) -> Self {
        ConfigError(vec![ConstraintViolation {
            field: field.to_string(),
            constraint: constraint.into(),
        }])
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum LatticeError {
    #[error("point {0} lies outside the lattice extent {1}")]
    OutsideExtent(String, i64),
    #[error("point has {got} spatial indices, lattice has {expected} dimensions")]
    DimensionMismatch { expected: usize, got: usize },
}

/// Lattice spacing, extent and physical scales, in natural units.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeConfig {
    pub dt: f64,
    pub dx: f64,
    pub dims: usize,
    /// Per-axis half-width in sites: indices run over `-extent..=extent`.
    pub extent: i64,
    #[serde(default = "one")]
    pub hbar: f64,
    #[serde(default = "one")]
    pub mass: f64,
    /// Largest spatial angular frequency the represented states may carry.
    /// Absent means "whatever the lattice resolves", i.e. `π/dx`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub band_limit: Option<f64>,
}

fn one() -> f64 {
    1.0
}

impl Default for LatticeConfig {
    /// The desk configuration used by the free-particle scenarios.
    fn default() -> Self {
        LatticeConfig {
            dt: 0.05,
            dx: 0.1,
            dims: 1,
            extent: 400,
            hbar: 1.0,
            mass: 1.0,
            band_limit: None,
        }
    }
}

impl LatticeConfig {
    /// Checks the structural invariants and the Nyquist condition.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let mut bad = Vec::new();
        let mut need = |ok: bool, field: &str, what: &str| {
            if !ok {
                bad.push(ConstraintViolation {
                    field: field.to_string(),
                    constraint: what.to_string(),
                });
            }
        };
        need(self.dt.is_finite() && self.dt > 0.0, "lattice.dt", "must be > 0");
        need(self.dx.is_finite() && self.dx > 0.0, "lattice.dx", "must be > 0");
        need(self.dims == 1 || self.dims == 2, "lattice.dims", "must be 1 or 2");
        need(self.extent >= 1, "lattice.extent", "must be >= 1");
        need(self.hbar.is_finite() && self.hbar > 0.0, "lattice.hbar", "must be > 0");
        need(self.mass.is_finite() && self.mass > 0.0, "lattice.mass", "must be > 0");
        if let Some(w) = self.band_limit {
            need(w.is_finite() && w > 0.0, "lattice.band_limit", "must be > 0");
            need(
                self.dx <= PI / w * (1.0 + 1e-12),
                "lattice.dx",
                &format!("Nyquist: dx must be <= pi/band_limit = {:.6}", PI / w),
            );
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(ConfigError(bad))
        }
    }

    /// Characteristic length of the short-time kernel, `sqrt(2πħ dt / m)`.
    pub fn kernel_length(&self) -> f64 {
        (2.0 * PI * self.hbar * self.dt / self.mass).sqrt()
    }

    /// The discrete Fresnel sum only tracks the integral when the kernel
    /// oscillation is resolved: `dx <= kernel_length / 4`.
    pub fn check_discretization(&self) -> Result<(), ConfigError> {
        let limit = self.kernel_length() / 4.0;
        if self.dx <= limit * (1.0 + 1e-12) {
            Ok(())
        } else {
            Err(ConfigError::single(
                "lattice.dx",
                format!("discretization: dx must be <= sqrt(2*pi*hbar*dt/m)/4 = {limit:.6}"),
            ))
        }
    }

    pub fn band_limit(&self) -> f64 {
        self.band_limit.unwrap_or(PI / self.dx)
    }

    /// Number of sites along one axis.
    pub fn sites_per_axis(&self) -> usize {
        (2 * self.extent + 1) as usize
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        x.len() == self.dims && x.iter().all(|&k| k.abs() <= self.extent)
    }
}

/// A lattice site at a time index.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticePoint {
    pub t: i64,
    pub x: Vec<i64>,
}

impl LatticePoint {
    pub fn new(t: i64, x: Vec<i64>) -> Self {
        LatticePoint { t, x }
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(t={}, x={:?})", self.t, self.x)
    }
}

/// Real coordinates of a lattice point.
#[derive(Clone, Debug, PartialEq)]
pub struct Coordinates {
    pub t: f64,
    pub x: Vec<f64>,
}

pub fn embed(point: &LatticePoint, config: &LatticeConfig) -> Result<Coordinates, LatticeError> {
    if point.x.len() != config.dims {
        return Err(LatticeError::DimensionMismatch {
            expected: config.dims,
            got: point.x.len(),
        });
    }
    if !config.contains(&point.x) {
        return Err(LatticeError::OutsideExtent(point.to_string(), config.extent));
    }
    Ok(Coordinates {
        t: point.t as f64 * config.dt,
        x: point.x.iter().map(|&k| k as f64 * config.dx).collect(),
    })
}

/// Space is an antichain; only time orders events.
pub fn causal_leq(p: &LatticePoint, q: &LatticePoint) -> bool {
    p.t <= q.t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embed_scales_indices() {
        let cfg = LatticeConfig::default();
        let c = embed(&LatticePoint::new(0, vec![0]), &cfg).unwrap();
        assert_eq!((c.t, c.x.clone()), (0.0, vec![0.0]));
        let c = embed(&LatticePoint::new(2, vec![-3]), &cfg).unwrap();
        assert!((c.t - 0.10).abs() < 1e-15 && (c.x[0] + 0.30).abs() < 1e-15);

        let unit = LatticeConfig { dt: 1.0, dx: 1.0, dims: 2, extent: 5, ..cfg };
        let c = embed(&LatticePoint::new(1, vec![1, 2]), &unit).unwrap();
        assert_eq!((c.t, c.x), (1.0, vec![1.0, 2.0]));
    }

    #[test]
    fn embed_rejects_points_outside() {
        let cfg = LatticeConfig { extent: 3, ..Default::default() };
        assert!(matches!(
            embed(&LatticePoint::new(0, vec![4]), &cfg),
            Err(LatticeError::OutsideExtent(..))
        ));
        assert!(matches!(
            embed(&LatticePoint::new(0, vec![1, 1]), &cfg),
            Err(LatticeError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn causal_order_uses_time_only() {
        let p = LatticePoint::new(0, vec![5]);
        let q = LatticePoint::new(1, vec![-5]);
        assert!(causal_leq(&p, &q));
        assert!(!causal_leq(&LatticePoint::new(1, vec![0]), &LatticePoint::new(0, vec![0])));
        assert!(causal_leq(&p, &p));
    }

    #[test]
    fn validation_names_fields() {
        let mut cfg = LatticeConfig::default();
        assert!(cfg.validate().is_ok());
        assert!(cfg.check_discretization().is_ok());
        cfg.band_limit = Some(40.0);
        let err = cfg.validate().unwrap_err();
        assert_eq!(err.0[0].field, "lattice.dx");
        assert!(err.0[0].constraint.contains("Nyquist"));
        cfg.band_limit = None;
        cfg.dx = 0.2;
        assert!(cfg.check_discretization().is_err());
        cfg.dt = -1.0;
        assert!(cfg.validate().is_err());
    }
}
