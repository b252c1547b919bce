//! Measurement in three stages: a change of basis to the detector's
//! eigenfunctions, a stochastic coupling of the particle process to one
//! detector basin, and the transition of the process to an interactive
//! one in which only the coupled component keeps playing.

use crate::interp::{sinc, InterpolatedWave};
use crate::propagation::{Combination, InitialState, ProcessSpec, Subprocess};
use crate::tapestry::{CausalTapestry, Informon};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MeasurementError {
    #[error("detector: {0}")]
    Detector(String),
    #[error("site {0:?} lies outside the detector")]
    OutsideDetector(Vec<f64>),
    #[error("no basin with index {0}")]
    NoBasin(usize),
    #[error("basis leaves a relative residual of {0:.3e}")]
    NotSpanned(f64),
    #[error("cannot {action} from phase {from}")]
    Contract { action: &'static str, from: Phase },
}

/// One readout cell: the box `lo ≤ x < hi`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Basin {
    pub key: u32,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Basin {
    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter().zip(self.lo.iter().zip(&self.hi)).all(|(v, (a, b))| *a <= *v && *v < *b)
    }

    pub fn centre(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(a, b)| 0.5 * (a + b)).collect()
    }

    fn overlaps(&self, other: &Basin) -> bool {
        self.lo.iter().zip(&self.hi).zip(other.lo.iter().zip(&other.hi)).all(|((a0, a1), (b0, b1))| a0 < b1 && b0 < a1)
    }
}

/// Local coupling operator applied to the density.
#[derive(Clone, Default)]
pub enum CouplingOperator {
    #[default]
    Identity,
    Local(Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>),
}

impl CouplingOperator {
    fn eval(&self, x: &[f64]) -> f64 {
        match self {
            CouplingOperator::Identity => 1.0,
            CouplingOperator::Local(f) => f(x),
        }
    }
}

impl fmt::Debug for CouplingOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CouplingOperator::Identity => write!(f, "identity"),
            CouplingOperator::Local(_) => write!(f, "local"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Detector {
    pub basins: Vec<Basin>,
    pub operator: CouplingOperator,
}

impl Detector {
    /// Basins must share a dimension and be non-empty boxes; they must be
    /// disjoint unless `allow_overlap`.
    pub fn new(basins: Vec<Basin>, allow_overlap: bool) -> Result<Self, MeasurementError> {
        let dims = basins.first().map(|b| b.lo.len()).ok_or_else(|| MeasurementError::Detector("no basins".into()))?;
        for b in &basins {
            if b.lo.len() != dims || b.hi.len() != dims {
                return Err(MeasurementError::Detector(format!("basin {} has the wrong dimension", b.key)));
            }
            if b.lo.iter().zip(&b.hi).any(|(a, c)| !(a < c)) {
                return Err(MeasurementError::Detector(format!("basin {} is empty", b.key)));
            }
        }
        if !allow_overlap {
            for (i, a) in basins.iter().enumerate() {
                if let Some(b) = basins[i + 1..].iter().find(|b| a.overlaps(b)) {
                    return Err(MeasurementError::Detector(format!("basins {} and {} overlap", a.key, b.key)));
                }
            }
        }
        Ok(Detector { basins, operator: CouplingOperator::Identity })
    }

    /// `cells` equal basins covering `[lo, hi)`, keyed 0, 1, ...
    pub fn uniform_line(lo: f64, hi: f64, cells: usize) -> Self {
        let w = (hi - lo) / cells as f64;
        let basins = (0..cells)
            .map(|i| Basin { key: i as u32, lo: vec![lo + i as f64 * w], hi: vec![if i + 1 == cells { hi } else { lo + (i + 1) as f64 * w }] })
            .collect();
        Detector { basins, operator: CouplingOperator::Identity }
    }

    pub fn with_operator(mut self, operator: CouplingOperator) -> Self {
        self.operator = operator;
        self
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.basins.iter().any(|b| b.contains(x))
    }

    pub fn edges_1d(&self) -> Vec<f64> {
        let mut e: Vec<f64> = self.basins.iter().map(|b| b.lo[0]).collect();
        e.push(self.basins.last().map_or(0.0, |b| b.hi[0]));
        e
    }
}

/// `∫ f` over each basin by tensor Simpson with `points` panels per axis.
pub fn cell_integrals(detector: &Detector, f: impl Fn(&[f64]) -> f64 + Sync, points: usize) -> Vec<f64> {
    let n = (points.max(2) + 1) & !1;
    let weight = |j: usize| if j == 0 || j == n { 1.0 } else if j % 2 == 1 { 4.0 } else { 2.0 };
    detector
        .basins
        .par_iter()
        .map(|b| {
            let d = b.lo.len();
            let h: Vec<f64> = b.lo.iter().zip(&b.hi).map(|(a, c)| (c - a) / n as f64).collect();
            let mut acc = 0.0;
            let mut x = vec![0.0; d];
            for flat in 0..(n + 1).pow(d as u32) {
                let mut rem = flat;
                let mut w = 1.0;
                for k in 0..d {
                    let j = rem % (n + 1);
                    rem /= n + 1;
                    x[k] = b.lo[k] + j as f64 * h[k];
                    w *= weight(j) * h[k] / 3.0;
                }
                acc += w * f(&x);
            }
            acc
        })
        .collect()
}

/// `∫ |ψ|²` over all space, exactly: sinc translates of one band are
/// orthogonal, and across bands `∫ sinc·sinc = min(h) sinc(πd/max(h))`.
pub fn wave_norm(wave: &InterpolatedWave) -> f64 {
    let comps = wave.components();
    let mut total = Complex64::new(0.0, 0.0);
    for a in comps {
        for b in comps {
            for (p, u) in a.samples() {
                for (r, v) in b.samples() {
                    let mut k = 1.0;
                    for axis in 0..p.len() {
                        let (ha, hb) = (a.spacing[axis], b.spacing[axis]);
                        k *= ha.min(hb) * sinc(PI * (p[axis] - r[axis]) / ha.max(hb));
                    }
                    total += u.conj() * v * k;
                }
            }
        }
    }
    total.re
}

/// Coupling probability of every basin: `∫_B φ* V φ`, rescaled so the basins
/// together carry the wave's probability mass inside the detector.
pub fn coupling_probabilities(detector: &Detector, wave: &InterpolatedWave, points: usize) -> Vec<f64> {
    let norm = wave_norm(wave);
    let density = |x: &[f64]| wave.eval(x).norm_sqr();
    let mass = cell_integrals(detector, density, points);
    let raw = match detector.operator {
        CouplingOperator::Identity => mass.clone(),
        _ => cell_integrals(detector, |x| detector.operator.eval(x) * density(x), points),
    };
    normalize_coupling(&raw, mass.iter().sum::<f64>() / norm)
}

/// Rescales raw basin integrals to sum to `mass_in_region`.
pub fn normalize_coupling(raw: &[f64], mass_in_region: f64) -> Vec<f64> {
    let s: f64 = raw.iter().sum();
    if s <= 0.0 {
        return vec![0.0; raw.len()];
    }
    raw.iter().map(|r| r / s * mass_in_region.min(1.0)).collect()
}

/// The coupling probability of the basin holding an informon's site.
pub fn coupling_probability(
    informon: &Informon,
    dx: f64,
    basin: usize,
    detector: &Detector,
    wave: &InterpolatedWave,
    points: usize,
) -> Result<f64, MeasurementError> {
    let site: Vec<f64> = informon.point.x.iter().map(|&k| k as f64 * dx).collect();
    if !detector.contains(&site) {
        return Err(MeasurementError::OutsideDetector(site));
    }
    if basin >= detector.basins.len() {
        return Err(MeasurementError::NoBasin(basin));
    }
    Ok(coupling_probabilities(detector, wave, points)[basin])
}

/// One round of play: returns the basin coupled to, or `None` with the
/// residual probability `1 − Σp`.
pub fn attempt_coupling(probabilities: &[f64], rng: &mut impl Rng) -> Option<usize> {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, p) in probabilities.iter().enumerate() {
        acc += p;
        if u < acc {
            return Some(i);
        }
    }
    None
}

/// Rounds are repeated until coupling or `max_rounds`; after `k` failed
/// rounds the survival probability is `Π(1 − x_k)`.
pub fn couple(probabilities: &[f64], max_rounds: usize, rng: &mut impl Rng) -> (Option<usize>, usize) {
    for round in 1..=max_rounds {
        if let Some(b) = attempt_coupling(probabilities, rng) {
            return (Some(b), round);
        }
    }
    (None, max_rounds)
}

pub fn survival(per_round: &[f64]) -> f64 {
    per_round.iter().map(|x| 1.0 - x).product()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Phase {
    FreeProduct,
    InformationalCoupling,
    /// Bound to the basin with this key.
    Interactive(u32),
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Phase::FreeProduct => write!(f, "free product"),
            Phase::InformationalCoupling => write!(f, "informational coupling"),
            Phase::Interactive(y) => write!(f, "interactive({y})"),
        }
    }
}

/// Where one particle–detector encounter stands.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProcessState {
    pub phase: Phase,
    /// Subprocess tag generating the particle, once bound.
    pub basis_tag: Option<u32>,
}

impl Default for ProcessState {
    fn default() -> Self {
        ProcessState { phase: Phase::FreeProduct, basis_tag: None }
    }
}

impl ProcessState {
    /// The detector's basis takes over the description; starts an encounter.
    pub fn begin_coupling(&self) -> ProcessState {
        ProcessState { phase: Phase::InformationalCoupling, basis_tag: self.basis_tag }
    }

    /// Binds to basin `y`, whose subprocess carries tag `y`.
    pub fn transition(&self, y: u32) -> Result<ProcessState, MeasurementError> {
        match self.phase {
            Phase::InformationalCoupling => Ok(ProcessState { phase: Phase::Interactive(y), basis_tag: Some(y) }),
            Phase::Interactive(z) if z == y => Ok(self.clone()),
            from => Err(MeasurementError::Contract { action: "transition", from }),
        }
    }

    /// Whether informons with `tag` may still be extended by play.
    pub fn extendable(&self, tag: Option<u32>) -> bool {
        match self.phase {
            Phase::Interactive(y) => tag == Some(y),
            _ => true,
        }
    }

    /// The slice with inert informons removed; priors are kept for content.
    pub fn live_slice(&self, t: &CausalTapestry) -> CausalTapestry {
        let informons = t.informons.iter().filter(|n| self.extendable(n.tag)).cloned().collect();
        CausalTapestry::new(t.config.clone(), t.slice_t, informons, t.priors.clone()).with_layout(t.layout.clone())
    }
}

/// Uniform grid on `[lo, hi]` for 1-D overlap integrals.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadrature {
    pub lo: f64,
    pub hi: f64,
    pub panels: usize,
}

impl Quadrature {
    fn nodes(&self) -> Vec<(f64, f64)> {
        let n = (self.panels.max(2) + 1) & !1;
        let h = (self.hi - self.lo) / n as f64;
        (0..=n)
            .map(|j| {
                let w = if j == 0 || j == n { 1.0 } else if j % 2 == 1 { 4.0 } else { 2.0 };
                (self.lo + j as f64 * h, w * h / 3.0)
            })
            .collect()
    }

    pub fn inner(&self, f: impl Fn(f64) -> Complex64, g: impl Fn(f64) -> Complex64) -> Complex64 {
        self.nodes().into_iter().map(|(x, w)| w * f(x).conj() * g(x)).sum()
    }
}

/// Re-expresses a 1-D process over `basis` with `w'_j = ⟨b_j, Ψ⟩`.
/// Fails when the basis misses more than `tolerance` of the wave (relative L²).
pub fn basis_change(
    process: &ProcessSpec,
    basis: &[InitialState],
    quad: &Quadrature,
    tolerance: f64,
) -> Result<ProcessSpec, MeasurementError> {
    let psi = |x: f64| process.combined(&[x]);
    let weights: Vec<Complex64> = basis.iter().map(|b| quad.inner(|x| b.eval(&[x]), psi)).collect();
    let rebuilt = |x: f64| -> Complex64 { basis.iter().zip(&weights).map(|(b, w)| w * b.eval(&[x])).sum() };
    let diff = quad.inner(|x| psi(x) - rebuilt(x), |x| psi(x) - rebuilt(x)).re.max(0.0).sqrt();
    let size = quad.inner(psi, psi).re.sqrt();
    let residual = if size > 0.0 { diff / size } else { diff };
    if residual > tolerance {
        return Err(MeasurementError::NotSpanned(residual));
    }
    let subprocesses = basis
        .iter()
        .zip(&weights)
        .enumerate()
        .map(|(j, (b, &w))| Subprocess { weight: w, initial: b.clone(), tag: j as u32 })
        .collect::<Vec<_>>();
    let combination = if subprocesses.len() == 1 { Combination::Single } else { Combination::ExclusiveSum };
    Ok(ProcessSpec { subprocesses, combination })
}

/// Relative L² distance between the waves of two processes.
pub fn process_distance(a: &ProcessSpec, b: &ProcessSpec, quad: &Quadrature) -> f64 {
    let d = |x: f64| a.combined(&[x]) - b.combined(&[x]);
    let size = quad.inner(|x| a.combined(&[x]), |x| a.combined(&[x])).re.sqrt();
    quad.inner(d, d).re.max(0.0).sqrt() / size
}

/// Coupling to the eigenbasis components of `weights`, with an optional
/// error matrix `error[j][y]` (rows sum to one; identity by default).
pub fn eigenbasis_probabilities(weights: &[Complex64], error: Option<&[Vec<f64>]>) -> Vec<f64> {
    let born: Vec<f64> = weights.iter().map(|w| w.norm_sqr()).collect();
    match error {
        None => born,
        Some(e) => (0..weights.len()).map(|y| born.iter().enumerate().map(|(j, p)| p * e[j][y]).sum()).collect(),
    }
}

/// Weights once bound to component `y`.
pub fn collapse(n: usize, y: usize) -> Vec<Complex64> {
    (0..n).map(|j| Complex64::new(if j == y { 1.0 } else { 0.0 }, 0.0)).collect()
}

/// One JSON line per trial.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRecord {
    pub seed: u64,
    pub trial: u64,
    pub basin: Option<u32>,
    pub n_rounds: usize,
    pub position: Option<Vec<f64>>,
}

/// Generator for trial `trial` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Independent trials against fixed basin probabilities; the same seed
/// gives the same records in the same order.
pub fn run_trials(detector: &Detector, probabilities: &[f64], trials: u64, seed: u64, max_rounds: usize) -> Vec<TrialRecord> {
    (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(seed, trial);
            let (b, n_rounds) = couple(probabilities, max_rounds, &mut rng);
            let basin = b.map(|i| &detector.basins[i]);
            TrialRecord { seed, trial, basin: basin.map(|b| b.key), n_rounds, position: basin.map(|b| b.centre()) }
        })
        .collect()
}

/// Basin counts (by position in the detector) over coupled trials.
pub fn histogram(detector: &Detector, records: &[TrialRecord]) -> Vec<u64> {
    let mut h = vec![0u64; detector.basins.len()];
    for r in records {
        if let Some(k) = r.basin {
            if let Some(i) = detector.basins.iter().position(|b| b.key == k) {
                h[i] += 1;
            }
        }
    }
    h
}

pub fn to_json_lines(records: &[TrialRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("trial records serialize"));
        out.push('\n');
    }
    out
}
