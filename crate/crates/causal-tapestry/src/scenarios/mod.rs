//! End-to-end runs driven by a JSON configuration, and the demo records.

mod demo;
mod free;
mod two_slit;

pub use demo::{interp_record, run_demo, DemoCheck, DemoRecord, DEMOS};
pub use free::{run_free_particle, run_superposition};
pub use two_slit::{contrast, run_two_slit, spectral_spacing};

use crate::lattice::{ConfigError, ConstraintViolation, LatticeConfig};
use crate::measurement::MeasurementError;
use crate::oracle::GaussianTerm;
use crate::propagation::{
    Combination, InitialState, Lagrangian, Potential, ProcessSpec, PropagationError, Strategy, Subprocess,
};
use crate::tapestry::{interpret_state, validate, CausalTapestry, SiteLayout, ValidationMode};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Propagation(#[from] PropagationError),
    #[error(transparent)]
    Measurement(#[from] MeasurementError),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    FreeParticle,
    Superposition,
    TwoSlit,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LagrangianConfig {
    pub mass: f64,
    #[serde(default = "free_potential")]
    pub potential: String,
}

fn free_potential() -> String {
    "free".into()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubprocessConfig {
    pub w_re: f64,
    #[serde(default)]
    pub w_im: f64,
    pub psi: String,
    pub tag: u32,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CombinationConfig {
    #[default]
    Single,
    ExclusiveSum,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProcessConfig {
    pub subprocesses: Vec<SubprocessConfig>,
    #[serde(default)]
    pub combination: CombinationConfig,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyKind {
    #[default]
    Exhaustive,
    Stochastic,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategyConfig {
    pub kind: StrategyKind,
    #[serde(default)]
    pub n_plays: Option<usize>,
    /// Falls back to the scenario seed.
    #[serde(default)]
    pub seed: Option<u64>,
}

/// `cells` equal basins across `[lo, hi)` on the transverse axis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorConfig {
    pub lo: f64,
    pub hi: f64,
    #[serde(default = "default_cells")]
    pub cells: usize,
    #[serde(default = "default_rounds")]
    pub max_rounds: usize,
}

fn default_cells() -> usize {
    64
}

fn default_rounds() -> usize {
    1000
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Openings {
    #[default]
    Both,
    Upper,
    Lower,
}

/// Slit plane at `x = a`, detector plane at `x = b`, slits `[c, d]` and
/// `[−d, −c]` on the transverse axis. The source is the process's centre.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlitGeometry {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    #[serde(default)]
    pub open: Openings,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: ScenarioKind,
    pub lattice: LatticeConfig,
    /// Defaults to a free particle of the lattice mass.
    #[serde(default)]
    pub lagrangian: Option<LagrangianConfig>,
    pub process: ProcessConfig,
    #[serde(default)]
    pub strategy: StrategyConfig,
    /// Rounds to play; the two-slit run derives its own from the geometry.
    #[serde(default)]
    pub steps: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub trials: u64,
    #[serde(default)]
    pub detector: Option<DetectorConfig>,
    #[serde(default)]
    pub geometry: Option<SlitGeometry>,
    /// Also run at half dt and half dx and compare the final errors.
    #[serde(default)]
    pub convergence_check: bool,
    /// Output directory.
    #[serde(default)]
    pub output: Option<String>,
    #[serde(default)]
    pub format: Format,
}

/// A configuration whose parts have all been checked and built.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub lagrangian: Lagrangian,
    pub process: ProcessSpec,
    pub strategy: Strategy,
}

fn violation(field: &str, constraint: impl Into<String>) -> ConstraintViolation {
    ConstraintViolation { field: field.to_string(), constraint: constraint.into() }
}

/// Reads and checks a scenario file.
pub fn parse_config(path: &Path) -> Result<Scenario, ScenarioError> {
    let text = std::fs::read_to_string(path)?;
    Ok(parse_config_str(&text)?)
}

pub fn parse_config_str(text: &str) -> Result<Scenario, ConfigError> {
    let config: ScenarioConfig = serde_json::from_str(text).map_err(|e| ConfigError::single("document", e.to_string()))?;
    config.resolve()
}

impl ScenarioConfig {
    /// Every violated constraint, or the built scenario.
    pub fn resolve(&self) -> Result<Scenario, ConfigError> {
        let mut bad: Vec<ConstraintViolation> = Vec::new();
        let lattice_ok = match self.lattice.validate() {
            Ok(()) => true,
            Err(ConfigError(v)) => {
                bad.extend(v);
                false
            }
        };
        if lattice_ok {
            if let Err(ConfigError(v)) = self.lattice.check_discretization() {
                bad.extend(v);
            }
        }

        let lagrangian = match &self.lagrangian {
            None => Some(Lagrangian::free(self.lattice.mass)),
            Some(l) => match Potential::parse(&l.potential) {
                Ok(potential) => {
                    if !(l.mass > 0.0) || (l.mass - self.lattice.mass).abs() > 1e-12 * self.lattice.mass {
                        bad.push(violation("lagrangian.mass", "must be > 0 and equal lattice.mass"));
                    }
                    Some(Lagrangian { mass: l.mass, potential })
                }
                Err(e) => {
                    bad.push(violation("lagrangian.potential", e));
                    None
                }
            },
        };

        let mut subprocesses = Vec::new();
        for (i, s) in self.process.subprocesses.iter().enumerate() {
            if !(s.w_re.is_finite() && s.w_im.is_finite()) {
                bad.push(violation(&format!("process.subprocesses[{i}].w"), "must be finite"));
            }
            match InitialState::parse(&s.psi, self.lattice.dims) {
                Ok(initial) => subprocesses.push(Subprocess { weight: Complex64::new(s.w_re, s.w_im), initial, tag: s.tag }),
                Err(e) => bad.push(violation(&format!("process.subprocesses[{i}].psi"), e)),
            }
        }
        let combination = match self.process.combination {
            CombinationConfig::Single => Combination::Single,
            CombinationConfig::ExclusiveSum => Combination::ExclusiveSum,
        };
        let process = ProcessSpec { subprocesses, combination };
        if process.subprocesses.len() == self.process.subprocesses.len() && lattice_ok {
            if let Err(e) = process.validate(&self.lattice) {
                bad.push(violation("process", e));
            }
        }

        let strategy = match self.strategy.kind {
            StrategyKind::Exhaustive => Strategy::Exhaustive,
            StrategyKind::Stochastic => {
                let n_plays = self.strategy.n_plays.unwrap_or(0);
                if n_plays == 0 {
                    bad.push(violation("strategy.n_plays", "stochastic play needs n_plays > 0"));
                }
                let seed = self.strategy.seed.or(self.seed);
                if seed.is_none() {
                    bad.push(violation("strategy.seed", "stochastic play needs a seed"));
                }
                Strategy::Stochastic { n_plays, seed: seed.unwrap_or(0) }
            }
        };
        if self.trials > 0 && self.seed.is_none() {
            bad.push(violation("seed", "measurement trials need a seed"));
        }
        if let Some(d) = &self.detector {
            if !(d.lo < d.hi) || d.cells == 0 || d.max_rounds == 0 {
                bad.push(violation("detector", "needs lo < hi, cells >= 1 and max_rounds >= 1"));
            }
        }

        let n = self.process.subprocesses.len();
        match self.scenario {
            ScenarioKind::FreeParticle => {
                if self.process.combination != CombinationConfig::Single {
                    bad.push(violation("process.combination", "a free-particle run takes a single process"));
                }
                if self.steps.is_none() {
                    bad.push(violation("steps", "required"));
                }
            }
            ScenarioKind::Superposition => {
                if self.process.combination != CombinationConfig::ExclusiveSum || n < 2 {
                    bad.push(violation("process", "a superposition run takes an exclusive_sum of at least two subprocesses"));
                }
                if self.steps.is_none() {
                    bad.push(violation("steps", "required"));
                }
            }
            ScenarioKind::TwoSlit => self.check_two_slit(&process, &mut bad),
        }

        if !bad.is_empty() {
            return Err(ConfigError(bad));
        }
        Ok(Scenario { config: self.clone(), lagrangian: lagrangian.expect("checked above"), process, strategy })
    }

    fn check_two_slit(&self, process: &ProcessSpec, bad: &mut Vec<ConstraintViolation>) {
        if self.lattice.dims != 2 {
            bad.push(violation("lattice.dims", "a two-slit run needs a 2-D lattice"));
        }
        if self.process.subprocesses.len() != 1 {
            bad.push(violation("process", "a two-slit run takes a single process"));
        }
        if let Some(l) = &self.lagrangian {
            if l.potential.trim() != "free" {
                bad.push(violation("lagrangian.potential", "a two-slit run is free between the planes"));
            }
        }
        let Some(g) = &self.geometry else {
            bad.push(violation("geometry", "required for a two-slit run"));
            return;
        };
        if !(0.0 < g.a && g.a < g.b) {
            bad.push(violation("geometry", "needs 0 < a < b"));
        }
        if !(0.0 < g.c && g.c < g.d) {
            bad.push(violation("geometry", "needs 0 < c < d"));
        }
        let reach = self.lattice.extent as f64 * self.lattice.dx;
        if g.d > reach || g.b > reach {
            bad.push(violation("geometry", format!("slits and detector plane must lie within the lattice half-width {reach}")));
        }
        if let Some(Subprocess { initial: InitialState::Gaussian { x0, k0, .. }, .. }) = process.subprocesses.first() {
            if x0.len() == 2 {
                if !(k0[0] > 0.0 && x0[0] < g.a) {
                    bad.push(violation("process", "the source must sit before the slit plane and move towards it (k0 > 0)"));
                }
                if x0[1] != 0.0 || k0[1] != 0.0 {
                    bad.push(violation("process", "the transverse packet must be centred at rest (x0 = k0 = 0 on axis 1)"));
                }
            }
        }
        if let Some(d) = &self.detector {
            if d.lo < -reach || d.hi > reach {
                bad.push(violation("detector", format!("must lie within the lattice half-width {reach}")));
            }
        }
        if let (Ok(plan), Some(steps)) = (two_slit::Plan::new(self, process), self.steps) {
            if steps != plan.n1 + plan.n2 {
                bad.push(violation("steps", format!("geometry implies {} rounds", plan.n1 + plan.n2)));
            }
        }
    }
}

/// A finished run: a JSON report plus named output files.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioResult {
    pub report: serde_json::Value,
    pub files: Vec<(String, String)>,
}

impl ScenarioResult {
    pub fn report_json(&self) -> String {
        serde_json::to_string_pretty(&self.report).expect("reports serialize") + "\n"
    }

    /// Writes `report.json` and every file into `dir`.
    pub fn write(&self, dir: &Path) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("report.json"), self.report_json())?;
        for (name, body) in &self.files {
            std::fs::write(dir.join(name), body)?;
        }
        Ok(())
    }
}

/// Dispatches on the scenario kind.
pub fn run(s: &Scenario) -> Result<ScenarioResult, ScenarioError> {
    match s.config.scenario {
        ScenarioKind::FreeParticle => run_free_particle(s),
        ScenarioKind::Superposition => run_superposition(s),
        ScenarioKind::TwoSlit => run_two_slit(s),
    }
}

/// Every site index tuple of a lattice, in row-major order.
pub(crate) fn lattice_sites(cfg: &LatticeConfig) -> Vec<Vec<i64>> {
    let mut sites: Vec<Vec<i64>> = vec![Vec::new()];
    for _ in 0..cfg.dims {
        sites = sites
            .into_iter()
            .flat_map(|p| {
                (-cfg.extent..=cfg.extent).map(move |k| {
                    let mut q = p.clone();
                    q.push(k);
                    q
                })
            })
            .collect();
    }
    sites
}

/// The interpreted wave at every lattice site.
pub(crate) fn site_values(t: &CausalTapestry, sites: &[Vec<i64>]) -> Vec<Complex64> {
    let dx = t.config.dx;
    if t.layout == SiteLayout::Full {
        let mut by_site = std::collections::HashMap::with_capacity(t.informons.len());
        for n in &t.informons {
            by_site.insert(n.point.x.as_slice(), n.theta);
        }
        return sites.iter().map(|x| by_site.get(x.as_slice()).copied().unwrap_or_default()).collect();
    }
    let wave = interpret_state(t);
    sites
        .par_iter()
        .map(|x| {
            let z: Vec<f64> = x.iter().map(|&k| k as f64 * dx).collect();
            wave.eval(&z)
        })
        .collect()
}

/// Gaussian terms of a process, for the analytic oracle.
pub(crate) fn gaussian_terms(process: &ProcessSpec) -> Vec<GaussianTerm> {
    process
        .subprocesses
        .iter()
        .filter_map(|s| match &s.initial {
            InitialState::Gaussian { sigma, x0, k0 } => {
                Some(GaussianTerm { weight: s.weight, sigma: sigma.clone(), x0: x0.clone(), k0: k0.clone() })
            }
            InitialState::Custom(_) => None,
        })
        .collect()
}

/// Number of violations over every slice of a run.
pub(crate) fn count_violations(slices: &[CausalTapestry]) -> usize {
    slices.par_iter().map(|t| validate(t, ValidationMode::Lenient).len()).sum()
}

/// `sqrt(Σ|a − b|² / Σ|b|²)`.
pub(crate) fn relative_l2(a: &[Complex64], b: &[Complex64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    (num / den).sqrt()
}

/// Rows `step,t,<axes>,re,im,abs2` as CSV or a JSON array.
pub(crate) struct WaveTable {
    axes: Vec<&'static str>,
    rows: Vec<(usize, f64, Vec<f64>, Complex64)>,
}

impl WaveTable {
    pub(crate) fn new(dims: usize) -> Self {
        WaveTable::with_axes(if dims == 1 { &["x"] } else { &["x", "y"] })
    }

    pub(crate) fn with_axes(axes: &[&'static str]) -> Self {
        WaveTable { axes: axes.to_vec(), rows: Vec::new() }
    }

    pub(crate) fn push_step(&mut self, step: usize, t: f64, positions: &[Vec<f64>], values: &[Complex64]) {
        for (x, v) in positions.iter().zip(values) {
            self.rows.push((step, t, x.clone(), *v));
        }
    }

    pub(crate) fn render(&self, format: Format) -> String {
        let axes = &self.axes;
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                let mut header = vec!["step", "t"];
                header.extend_from_slice(axes);
                header.extend_from_slice(&["re", "im", "abs2"]);
                w.write_record(&header).expect("in-memory csv");
                for (step, t, x, v) in &self.rows {
                    let mut rec = vec![step.to_string(), t.to_string()];
                    rec.extend(x.iter().map(|c| c.to_string()));
                    rec.extend([v.re.to_string(), v.im.to_string(), v.norm_sqr().to_string()]);
                    w.write_record(&rec).expect("in-memory csv");
                }
                String::from_utf8(w.into_inner().expect("in-memory csv")).expect("csv is utf-8")
            }
            Format::Json => {
                let rows: Vec<serde_json::Value> = self
                    .rows
                    .iter()
                    .map(|(step, t, x, v)| {
                        let mut m = serde_json::Map::new();
                        m.insert("step".into(), (*step).into());
                        m.insert("t".into(), (*t).into());
                        for (name, c) in axes.iter().zip(x) {
                            m.insert((*name).into(), (*c).into());
                        }
                        m.insert("re".into(), v.re.into());
                        m.insert("im".into(), v.im.into());
                        m.insert("abs2".into(), v.norm_sqr().into());
                        serde_json::Value::Object(m)
                    })
                    .collect();
                serde_json::to_string(&rows).expect("wave rows serialize") + "\n"
            }
        }
    }
}

pub(crate) fn extension(format: Format) -> &'static str {
    match format {
        Format::Csv => "csv",
        Format::Json => "json",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "scenario": "free_particle",
        "lattice": {"dt": 0.05, "dx": 0.1, "dims": 1, "extent": 400},
        "process": {"subprocesses": [{"w_re": 1, "psi": "gaussian:{1,0,0}", "tag": 0}]},
        "steps": 20
    }"#;

    #[test]
    fn minimal_config_parses() {
        let s = parse_config_str(MINIMAL).unwrap();
        assert_eq!(s.strategy, Strategy::Exhaustive);
        assert_eq!(s.config.steps, Some(20));
    }

    #[test]
    fn coarse_dx_is_named() {
        let text = MINIMAL.replace("\"dx\": 0.1", "\"dx\": 0.2");
        let err = parse_config_str(&text).unwrap_err();
        assert!(err.0.iter().any(|v| v.field == "lattice.dx" && v.constraint.contains("discretization")), "{err}");
    }

    #[test]
    fn unknown_fields_are_refused() {
        let text = MINIMAL.replace("\"steps\": 20", "\"steps\": 20, \"foo\": 1");
        let err = parse_config_str(&text).unwrap_err();
        assert!(err.to_string().contains("unknown field `foo`"), "{err}");
        let nested = MINIMAL.replace("\"extent\": 400", "\"extent\": 400, \"bar\": 2");
        assert!(parse_config_str(&nested).is_err());
    }

    #[test]
    fn stochastic_runs_need_a_seed() {
        let text = MINIMAL.replace("\"steps\": 20", "\"steps\": 20, \"strategy\": {\"kind\": \"stochastic\", \"n_plays\": 100}");
        let err = parse_config_str(&text).unwrap_err();
        assert!(err.0.iter().any(|v| v.field == "strategy.seed"));
        let seeded = text.replace("\"n_plays\": 100", "\"n_plays\": 100, \"seed\": 4");
        assert_eq!(parse_config_str(&seeded).unwrap().strategy, Strategy::Stochastic { n_plays: 100, seed: 4 });
    }

    #[test]
    fn violations_are_collected() {
        let text = r#"{
            "scenario": "superposition",
            "lattice": {"dt": -1, "dx": 0.1, "dims": 1, "extent": 400},
            "process": {"subprocesses": [{"w_re": 1, "psi": "gaussian:{1,0,0}", "tag": 0}]}
        }"#;
        let err = parse_config_str(text).unwrap_err();
        let fields: Vec<&str> = err.0.iter().map(|v| v.field.as_str()).collect();
        assert!(fields.contains(&"lattice.dt") && fields.contains(&"process") && fields.contains(&"steps"), "{fields:?}");
    }
}
