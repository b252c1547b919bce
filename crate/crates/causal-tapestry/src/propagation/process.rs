//! Processes: weighted subprocesses, each with an initial state to sample.

use crate::lattice::LatticeConfig;
use crate::tapestry::SiteLayout;
use num_complex::Complex64;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

/// A state that can be evaluated at any position.
#[derive(Clone)]
pub enum InitialState {
    /// Product over axes of `(2πσ²)^{-1/4} exp(−(x−x0)²/(4σ²) + i k0 (x−x0))`.
    Gaussian { sigma: Vec<f64>, x0: Vec<f64>, k0: Vec<f64> },
    Custom(Arc<dyn Fn(&[f64]) -> Complex64 + Send + Sync>),
}

impl InitialState {
    pub fn gaussian_1d(sigma: f64, x0: f64, k0: f64) -> Self {
        InitialState::Gaussian { sigma: vec![sigma], x0: vec![x0], k0: vec![k0] }
    }

    pub fn eval(&self, x: &[f64]) -> Complex64 {
        match self {
            InitialState::Gaussian { sigma, x0, k0 } => {
                let mut v = Complex64::new(1.0, 0.0);
                for (i, &xi) in x.iter().enumerate() {
                    let d = xi - x0[i];
                    let s = sigma[i];
                    let norm = (2.0 * PI * s * s).powf(-0.25);
                    v *= norm * Complex64::new(-d * d / (4.0 * s * s), k0[i] * d).exp();
                }
                v
            }
            InitialState::Custom(f) => f(x),
        }
    }

    /// Parses `gaussian:{sigma,x0,k0}`; 2-D states give one brace group per
    /// axis separated by `;`. Braces are optional.
    pub fn parse(text: &str, dims: usize) -> Result<Self, String> {
        let body = text
            .trim()
            .strip_prefix("gaussian:")
            .ok_or_else(|| format!("unknown initial state {text:?}; expected gaussian:{{sigma,x0,k0}}"))?;
        let groups: Vec<&str> = body.split(';').collect();
        if groups.len() != dims {
            return Err(format!("initial state has {} axis groups, lattice has {dims} dimensions", groups.len()));
        }
        let (mut sigma, mut x0, mut k0) = (Vec::new(), Vec::new(), Vec::new());
        for g in groups {
            let g = g.trim().trim_start_matches('{').trim_end_matches('}');
            let nums: Result<Vec<f64>, _> = g.split(',').map(|s| s.trim().parse::<f64>()).collect();
            let nums = nums.map_err(|_| format!("bad gaussian parameters {g:?}"))?;
            if nums.len() != 3 || nums.iter().any(|v| !v.is_finite()) {
                return Err(format!("gaussian needs three finite numbers sigma,x0,k0; got {g:?}"));
            }
            if nums[0] <= 0.0 {
                return Err("gaussian sigma must be > 0".into());
            }
            sigma.push(nums[0]);
            x0.push(nums[1]);
            k0.push(nums[2]);
        }
        Ok(InitialState::Gaussian { sigma, x0, k0 })
    }
}

impl fmt::Debug for InitialState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialState::Gaussian { sigma, x0, k0 } => write!(f, "gaussian(sigma={sigma:?}, x0={x0:?}, k0={k0:?})"),
            InitialState::Custom(_) => write!(f, "custom"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Subprocess {
    pub weight: Complex64,
    pub initial: InitialState,
    pub tag: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Combination {
    Single,
    /// Subprocesses never share a site; each lives on its own sublattice.
    ExclusiveSum,
}

#[derive(Clone, Debug)]
pub struct ProcessSpec {
    pub subprocesses: Vec<Subprocess>,
    pub combination: Combination,
}

impl ProcessSpec {
    pub fn single(initial: InitialState, tag: u32) -> Self {
        ProcessSpec {
            subprocesses: vec![Subprocess { weight: Complex64::new(1.0, 0.0), initial, tag }],
            combination: Combination::Single,
        }
    }

    pub fn validate(&self, config: &LatticeConfig) -> Result<(), String> {
        if self.subprocesses.is_empty() {
            return Err("process needs at least one subprocess".into());
        }
        let mut tags: Vec<u32> = self.subprocesses.iter().map(|s| s.tag).collect();
        tags.sort_unstable();
        tags.dedup();
        if tags.len() != self.subprocesses.len() {
            return Err("subprocess tags must be distinct".into());
        }
        if let InitialState::Gaussian { sigma, .. } = &self.subprocesses[0].initial {
            if sigma.len() != config.dims {
                return Err(format!("initial state has {} axes, lattice has {}", sigma.len(), config.dims));
            }
        }
        match self.combination {
            Combination::Single => {
                if self.subprocesses.len() != 1 {
                    return Err("a single process has exactly one subprocess".into());
                }
            }
            Combination::ExclusiveSum => {
                let total: f64 = self.subprocesses.iter().map(|s| s.weight.norm_sqr()).sum();
                if (total - 1.0).abs() > 1e-12 {
                    return Err(format!("exclusive sum weights must satisfy sum |w|^2 = 1, got {total}"));
                }
                if let Some(w) = config.band_limit {
                    let h = config.dx * self.subprocesses.len() as f64;
                    if h > PI / w * (1.0 + 1e-12) {
                        return Err(format!("sublattice spacing {h} breaks the Nyquist condition for band limit {w}"));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn layout(&self) -> SiteLayout {
        match self.combination {
            Combination::Single => SiteLayout::Full,
            Combination::ExclusiveSum => SiteLayout::Interleaved { tags: self.subprocesses.iter().map(|s| s.tag).collect() },
        }
    }

    /// The combined initial wave `Σ w_i ψ_i(x)`.
    pub fn combined(&self, x: &[f64]) -> Complex64 {
        self.subprocesses.iter().map(|s| s.weight * s.initial.eval(x)).sum()
    }
}
