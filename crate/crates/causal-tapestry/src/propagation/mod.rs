//! Straight-line actions, the short-time kernel, and the token game that
//! generates each new slice from the previous one.

mod game;
mod kernel;
mod process;

pub use game::{GameOptions, RealityGame, Round, RoundDiagnostics, Run, Strategy};
pub use kernel::{band_limited_kernel, AxisKernel, KernelModel, Window};
pub use process::{Combination, InitialState, ProcessSpec, Subprocess};

use crate::lattice::{ConfigError, LatticeConfig, LatticeError, LatticePoint};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

#[derive(Debug, thiserror::Error)]
pub enum PropagationError {
    #[error("points at t={from} and t={to} are not on adjacent slices")]
    NonAdjacent { from: i64, to: i64 },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Invalid(String),
}

/// Potential energy as a function of position.
#[derive(Clone)]
pub enum Potential {
    Free,
    Constant(f64),
    Custom(Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>),
}

impl Potential {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Potential::Free => 0.0,
            Potential::Constant(c) => *c,
            Potential::Custom(f) => f(x),
        }
    }

    pub fn is_free(&self) -> bool {
        matches!(self, Potential::Free)
    }

    /// `"free"` or `"constant:<value>"`.
    pub fn parse(text: &str) -> Result<Potential, String> {
        let text = text.trim();
        if text == "free" {
            return Ok(Potential::Free);
        }
        if let Some(v) = text.strip_prefix("constant:") {
            return v
                .trim()
                .parse::<f64>()
                .ok()
                .filter(|c| c.is_finite())
                .map(Potential::Constant)
                .ok_or_else(|| format!("bad constant potential value {v:?}"));
        }
        Err(format!("unknown potential {text:?}; expected \"free\" or \"constant:<c>\""))
    }
}

impl fmt::Debug for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Potential::Free => write!(f, "free"),
            Potential::Constant(c) => write!(f, "constant:{c}"),
            Potential::Custom(_) => write!(f, "custom"),
        }
    }
}

/// `L = m v²/2 − V(x)`.
#[derive(Clone, Debug)]
pub struct Lagrangian {
    pub mass: f64,
    pub potential: Potential,
}

impl Lagrangian {
    pub fn free(mass: f64) -> Self {
        Lagrangian { mass, potential: Potential::Free }
    }
}

fn coords(p: &LatticePoint, config: &LatticeConfig) -> Result<Vec<f64>, PropagationError> {
    Ok(crate::lattice::embed(p, config)?.x)
}

/// Action along the straight segment between sites on adjacent slices, with
/// the potential averaged over the two endpoints:
/// `m|Δx|²/(2dt) − dt (V(from) + V(to))/2`.
pub fn straight_line_action(
    lagrangian: &Lagrangian,
    from: &LatticePoint,
    to: &LatticePoint,
    config: &LatticeConfig,
) -> Result<f64, PropagationError> {
    if to.t != from.t + 1 {
        return Err(PropagationError::NonAdjacent { from: from.t, to: to.t });
    }
    let a = coords(from, config)?;
    let b = coords(to, config)?;
    let dist2: f64 = a.iter().zip(&b).map(|(p, q)| (q - p) * (q - p)).sum();
    let v = lagrangian.potential.eval(&a) + lagrangian.potential.eval(&b);
    Ok(lagrangian.mass * dist2 / (2.0 * config.dt) - config.dt * v / 2.0)
}

/// Principal square root of `2πiħ dt / m`.
pub fn feynman_hibbs_a(config: &LatticeConfig) -> Complex64 {
    Complex64::new(0.0, 2.0 * PI * config.hbar * config.dt / config.mass).sqrt()
}

/// Straight-line token `(dx/A)^d e^{iS/ħ} θ` for one source-target pair.
pub fn step_amplitude(
    lagrangian: &Lagrangian,
    from: &LatticePoint,
    to: &LatticePoint,
    theta_from: Complex64,
    config: &LatticeConfig,
) -> Result<Complex64, PropagationError> {
    let s = straight_line_action(lagrangian, from, to, config)?;
    let norm = (config.dx / feynman_hibbs_a(config)).powi(config.dims as i32);
    Ok(norm * Complex64::from_polar(1.0, s / config.hbar) * theta_from)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(dt: f64, dx: f64, mass: f64) -> LatticeConfig {
        LatticeConfig { dt, dx, dims: 1, extent: 50, hbar: 1.0, mass, band_limit: None }
    }

    fn pt(t: i64, x: i64) -> LatticePoint {
        LatticePoint::new(t, vec![x])
    }

    #[test]
    fn actions() {
        let c = cfg(1.0, 1.0, 1.0);
        let l = Lagrangian::free(1.0);
        assert_eq!(straight_line_action(&l, &pt(0, 0), &pt(1, 2), &c).unwrap(), 2.0);
        assert_eq!(straight_line_action(&l, &pt(0, 3), &pt(1, 3), &c).unwrap(), 0.0);
        let c = cfg(0.5, 1.0, 1.0);
        let l = Lagrangian { mass: 1.0, potential: Potential::Constant(3.0) };
        assert!((straight_line_action(&l, &pt(0, 0), &pt(1, 1), &c).unwrap() + 0.5).abs() < 1e-15);
        assert!(matches!(
            straight_line_action(&l, &pt(0, 0), &pt(2, 1), &c),
            Err(PropagationError::NonAdjacent { .. })
        ));
    }

    #[test]
    fn normalization_constant() {
        let a = feynman_hibbs_a(&cfg(1.0, 1.0, 1.0));
        let expect = Complex64::from_polar((2.0 * PI).sqrt(), PI / 4.0);
        assert!((a - expect).norm() < 1e-14);
        let a2 = feynman_hibbs_a(&cfg(1.0, 1.0, 2.0));
        assert!((a2 - Complex64::new(0.0, PI).sqrt()).norm() < 1e-14);
        for &(dt, m) in &[(0.05, 1.0), (0.3, 2.5), (1.7, 0.4)] {
            let c = cfg(dt, 0.1, m);
            assert!((feynman_hibbs_a(&c).norm_sqr() - 2.0 * PI * dt / m).abs() < 1e-13);
        }
    }

    #[test]
    fn step_amplitudes() {
        let c = cfg(0.05, 0.1, 1.0);
        let l = Lagrangian::free(1.0);
        let a = feynman_hibbs_a(&c);
        let one = Complex64::new(1.0, 0.0);
        assert!((step_amplitude(&l, &pt(0, 0), &pt(1, 0), one, &c).unwrap() - 0.1 / a).norm() < 1e-15);
        assert_eq!(step_amplitude(&l, &pt(0, 0), &pt(1, 4), Complex64::new(0.0, 0.0), &c).unwrap().norm(), 0.0);
        // Fresnel kernel m(Δx)²/(2ħ dt) = 0.09/0.1 = 0.9.
        let got = step_amplitude(&l, &pt(0, 0), &pt(1, 3), one, &c).unwrap();
        let kernel = (1.0 / (2.0 * PI * Complex64::new(0.0, 1.0) * 0.05).sqrt()) * Complex64::new(0.0, 0.09 / 0.1).exp();
        assert!((got - 0.1 * kernel).norm() < 1e-14);
        assert!((got - (0.1 / a) * Complex64::from_polar(1.0, 0.9)).norm() < 1e-14);
    }

    #[test]
    fn potential_parsing() {
        assert!(Potential::parse("free").unwrap().is_free());
        assert!(matches!(Potential::parse("constant:2.5"), Ok(Potential::Constant(c)) if c == 2.5));
        assert!(Potential::parse("harmonic").is_err());
        assert!(Potential::parse("constant:x").is_err());
    }
}
