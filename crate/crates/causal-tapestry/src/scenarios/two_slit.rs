//! Two slits in the paraxial picture: the packet's longitudinal motion is
//! free and carries it from the source to the slit plane in `t1` and on to
//! the detector plane in `t2`. The transverse wave is played on its own
//! lattice axis, masked to the open slits at `t1`, and played on for `t2`.

use super::{
    count_violations, extension, lattice_sites, site_values, Openings, Scenario, ScenarioConfig, ScenarioError,
    ScenarioResult, WaveTable,
};
use crate::lattice::{ConfigError, LatticeConfig};
use crate::measurement::{coupling_probabilities, histogram, run_trials, to_json_lines, Detector};
use crate::oracle::{total_variation, TwoSlitOracle};
use crate::propagation::{GameOptions, InitialState, Lagrangian, ProcessSpec, RealityGame, Strategy};
use crate::tapestry::{interpret_state, CausalTapestry, IdAllocator, InformonId};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;
use std::collections::HashMap;
use std::f64::consts::PI;

/// Times, step counts and the transverse set-up implied by a configuration.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub(crate) struct Plan {
    pub speed: f64,
    pub n1: usize,
    pub n2: usize,
    pub t1: f64,
    pub t2: f64,
    pub sigma: f64,
    pub upper: (f64, f64),
    pub lower: (f64, f64),
    pub open: Openings,
    /// Expected fringe spacing on the detector, `2πħ t2 / (m (c + d))`.
    pub fringe: f64,
}

impl Plan {
    pub(crate) fn new(cfg: &ScenarioConfig, process: &ProcessSpec) -> Result<Plan, String> {
        let g = cfg.geometry.as_ref().ok_or("geometry missing")?;
        let Some(InitialState::Gaussian { sigma, x0, k0 }) = process.subprocesses.first().map(|s| &s.initial) else {
            return Err("two-slit runs need a Gaussian source".into());
        };
        if sigma.len() != 2 {
            return Err("two-slit runs need a 2-D source".into());
        }
        let lat = &cfg.lattice;
        let speed = lat.hbar * k0[0] / lat.mass;
        let n1 = ((g.a - x0[0]) / (speed * lat.dt)).round();
        let n2 = ((g.b - g.a) / (speed * lat.dt)).round();
        if !(n1 >= 1.0 && n2 >= 1.0) {
            return Err("geometry leaves no rounds between planes".into());
        }
        let (n1, n2) = (n1 as usize, n2 as usize);
        let t2 = n2 as f64 * lat.dt;
        Ok(Plan {
            speed,
            n1,
            n2,
            t1: n1 as f64 * lat.dt,
            t2,
            sigma: sigma[1],
            upper: (g.c, g.d),
            lower: (-g.d, -g.c),
            open: g.open,
            fringe: 2.0 * PI * lat.hbar * t2 / (lat.mass * (g.c + g.d)),
        })
    }

    fn slits(&self, open: Openings) -> Vec<(f64, f64)> {
        match open {
            Openings::Both => vec![self.upper, self.lower],
            Openings::Upper => vec![self.upper],
            Openings::Lower => vec![self.lower],
        }
    }
}

fn inside(y: f64, slits: &[(f64, f64)]) -> bool {
    slits.iter().any(|&(a, b)| a <= y && y <= b)
}

/// The slice with every informon outside the open slits removed.
fn mask(t: &CausalTapestry, slits: &[(f64, f64)]) -> CausalTapestry {
    let dx = t.config.dx;
    let kept = t.informons.iter().filter(|n| inside(n.point.x[0] as f64 * dx, slits)).cloned().collect();
    CausalTapestry::new(t.config.clone(), t.slice_t, kept, t.priors.clone()).with_layout(t.layout.clone())
}

fn play(game: &RealityGame, from: CausalTapestry, rounds: usize, first_round: u64, strategy: Strategy, ids: &mut IdAllocator) -> Result<Vec<CausalTapestry>, ScenarioError> {
    let mut out = vec![from];
    for k in 0..rounds {
        let next = game.play_round(out.last().unwrap(), strategy, first_round + k as u64, ids)?.tapestry;
        out.push(next);
    }
    Ok(out)
}

/// `2|Σ p e^{2πiy/Δ}| / Σ p` over cell centres: the visibility of fringes of
/// spacing `Δ`.
pub fn contrast(p: &[f64], edges: &[f64], spacing: f64) -> f64 {
    let s: Complex64 = p
        .iter()
        .zip(edges.windows(2))
        .map(|(v, e)| *v * Complex64::from_polar(1.0, 2.0 * PI * 0.5 * (e[0] + e[1]) / spacing))
        .sum();
    2.0 * s.norm() / p.iter().sum::<f64>()
}

/// The spacing in `[lo, hi]` (on a grid of `points`) with the largest contrast.
pub fn spectral_spacing(p: &[f64], edges: &[f64], lo: f64, hi: f64, points: usize) -> f64 {
    (0..points)
        .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
        .map(|d| (d, contrast(p, edges, d)))
        .fold((lo, f64::MIN), |best, x| if x.1 > best.1 { x } else { best })
        .0
}

fn normalized(p: &[f64]) -> Vec<f64> {
    let s: f64 = p.iter().sum();
    p.iter().map(|v| v / s).collect()
}

/// Detection histogram over the detector cells compared with the direct
/// Fresnel double integral, plus per-slit partial waves and histories.
pub fn run_two_slit(s: &Scenario) -> Result<ScenarioResult, ScenarioError> {
    let cfg = &s.config;
    let plan = Plan::new(cfg, &s.process).map_err(|e| ConfigError::single("geometry", e))?;
    let lat = LatticeConfig { dims: 1, ..cfg.lattice.clone() };
    let reach = lat.extent as f64 * lat.dx;
    let detector = match &cfg.detector {
        Some(d) => Detector::uniform_line(d.lo, d.hi, d.cells),
        None => Detector::uniform_line(-reach, reach, 64),
    };
    let max_rounds = cfg.detector.as_ref().map_or(1000, |d| d.max_rounds);
    let edges = detector.edges_1d();

    let transverse = ProcessSpec::single(InitialState::gaussian_1d(plan.sigma, 0.0, 0.0), 0);
    let game = RealityGame::new(lat.clone(), Lagrangian::free(lat.mass), transverse, GameOptions::default())?;
    let mut ids = IdAllocator::default();
    let start = game.initial_tapestry(&mut ids);
    let approach = play(&game, start, plan.n1, 0, s.strategy, &mut ids)?;
    let at_slits = approach.last().unwrap();
    let open = plan.slits(plan.open);
    let masked = mask(at_slits, &open);

    let partial_ids = ids.clone();
    let beyond = play(&game, masked.clone(), plan.n2, plan.n1 as u64, s.strategy, &mut ids)?;
    let last = beyond.last().unwrap();

    // Which slits each informon's content reaches back to.
    let dx = lat.dx;
    let mut reaches: HashMap<InformonId, (bool, bool)> = HashMap::new();
    for n in &masked.informons {
        let y = n.point.x[0] as f64 * dx;
        reaches.insert(n.id, (inside(y, &[plan.upper]), inside(y, &[plan.lower])));
    }
    for t in &beyond[1..] {
        for n in &t.informons {
            let flags = n.content.iter().filter_map(|c| reaches.get(c)).fold((false, false), |a, b| (a.0 || b.0, a.1 || b.1));
            reaches.insert(n.id, flags);
        }
    }
    let mut histories = [0usize; 3];
    for n in &last.informons {
        match reaches[&n.id] {
            (true, false) => histories[0] += 1,
            (false, true) => histories[1] += 1,
            (true, true) => histories[2] += 1,
            (false, false) => {}
        }
    }

    // Per-slit partial waves by playing each slit alone.
    let sites = lattice_sites(&lat);
    let ys: Vec<Vec<f64>> = sites.iter().map(|x| vec![x[0] as f64 * dx]).collect();
    let final_values = site_values(last, &sites);
    let mut partial_values = Vec::new();
    for (name, which) in [("upper", Openings::Upper), ("lower", Openings::Lower)] {
        let slits = plan.slits(which);
        if !open.iter().any(|o| slits.contains(o)) {
            continue;
        }
        let mut ids = partial_ids.clone();
        let run = play(&game, mask(at_slits, &slits), plan.n2, plan.n1 as u64, s.strategy, &mut ids)?;
        partial_values.push((name, site_values(run.last().unwrap(), &sites)));
    }
    let linearity = if partial_values.len() == 2 {
        final_values
            .iter()
            .enumerate()
            .map(|(i, v)| (v - partial_values[0].1[i] - partial_values[1].1[i]).norm())
            .fold(0.0, f64::max)
    } else {
        0.0
    };

    let mass = |t: &CausalTapestry| t.informons.iter().map(|n| n.theta.norm_sqr()).sum::<f64>() * dx;
    let wave = interpret_state(last);
    let probabilities = coupling_probabilities(&detector, &wave, 32);
    let lattice_p = normalized(&probabilities);
    let oracle = TwoSlitOracle { sigma: plan.sigma, t1: plan.t1, t2: plan.t2, slits: open.clone(), hbar: lat.hbar, mass: lat.mass };
    let oracle_p = oracle.cell_probabilities(&edges);

    let seed = cfg.seed.unwrap_or(0);
    let records = run_trials(&detector, &probabilities, cfg.trials, seed, max_rounds);
    let counts = histogram(&detector, &records);
    let coupled: u64 = counts.iter().sum();
    let freq: Vec<f64> = if coupled > 0 { counts.iter().map(|&c| c as f64 / coupled as f64).collect() } else { vec![0.0; counts.len()] };
    let (lo, hi) = (plan.fringe / 2.0, plan.fringe * 2.0);

    let mut all = approach.clone();
    all.push(masked.clone());
    all.extend(beyond.iter().skip(1).cloned());
    let violations = count_violations(&all);

    let mut report = json!({
        "scenario": "two_slit",
        "plan": plan,
        "detector": {"lo": edges[0], "hi": edges[edges.len() - 1], "cells": counts.len(), "max_rounds": max_rounds},
        "mass_at_slit_plane": mass(at_slits),
        "mass_through_slits": mass(&masked),
        "detector_coverage": probabilities.iter().sum::<f64>(),
        "lattice_tv": total_variation(&lattice_p, &oracle_p),
        "lattice_contrast": contrast(&lattice_p, &edges, plan.fringe),
        "oracle_contrast": contrast(&oracle_p, &edges, plan.fringe),
        "oracle_spacing": spectral_spacing(&oracle_p, &edges, lo, hi, 601),
        "histories": {"upper_only": histories[0], "lower_only": histories[1], "both": histories[2]},
        "linearity_residual": linearity,
        "validation_violations": violations,
        "trials": cfg.trials,
        "coupled": coupled,
    });
    if coupled > 0 {
        report["histogram_tv"] = json!(total_variation(&freq, &oracle_p));
        report["histogram_contrast"] = json!(contrast(&freq, &edges, plan.fringe));
        report["histogram_spacing"] = json!(spectral_spacing(&freq, &edges, lo, hi, 601));
        let rounds: usize = records.iter().filter(|r| r.basin.is_some()).map(|r| r.n_rounds).sum();
        report["mean_rounds"] = json!(rounds as f64 / coupled as f64);
    }

    let mut hist = String::from("cell,lo,hi,count,frequency,lattice_p,oracle_p\n");
    for i in 0..counts.len() {
        hist.push_str(&format!("{i},{},{},{},{},{},{}\n", edges[i], edges[i + 1], counts[i], freq[i], lattice_p[i], oracle_p[i]));
    }
    let mut partial = String::from("y,re,im");
    for (name, _) in &partial_values {
        partial.push_str(&format!(",{name}_re,{name}_im"));
    }
    partial.push('\n');
    for (i, y) in ys.iter().enumerate() {
        partial.push_str(&format!("{},{},{}", y[0], final_values[i].re, final_values[i].im));
        for (_, v) in &partial_values {
            partial.push_str(&format!(",{},{}", v[i].re, v[i].im));
        }
        partial.push('\n');
    }
    let mut table = WaveTable::with_axes(&["y"]);
    for (k, t) in all.iter().enumerate() {
        table.push_step(k, t.slice_t as f64 * lat.dt, &ys, &site_values(t, &sites));
    }
    let files = vec![
        (format!("wave.{}", extension(cfg.format)), table.render(cfg.format)),
        ("histogram.csv".into(), hist),
        ("partial_waves.csv".into(), partial),
        ("detections.jsonl".into(), to_json_lines(&records)),
    ];
    Ok(ScenarioResult { report, files })
}
