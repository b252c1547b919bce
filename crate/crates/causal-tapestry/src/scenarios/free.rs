use super::{
    count_violations, extension, gaussian_terms, lattice_sites, relative_l2, site_values, Scenario, ScenarioError,
    ScenarioResult, WaveTable,
};
use crate::lattice::LatticeConfig;
use crate::oracle::{free_superposition, GaussianTerm};
use crate::propagation::{Combination, GameOptions, Potential, ProcessSpec, RealityGame, Run};
use crate::tapestry::{interpret_tag, TapestryDocument};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepError {
    pub step: usize,
    pub t: f64,
    /// Relative L² error of the amplitude.
    pub l2_error: f64,
    /// Relative L² error of `|ψ|²`.
    pub density_error: f64,
    pub norm: f64,
    pub norm_drift: f64,
}

struct Evolution {
    run: Run,
    sites: Vec<Vec<i64>>,
    positions: Vec<Vec<f64>>,
    values: Vec<Vec<Complex64>>,
    errors: Vec<StepError>,
    violations: usize,
}

fn analytic(terms: &[GaussianTerm], potential: &Potential, positions: &[Vec<f64>], t: f64, cfg: &LatticeConfig) -> Vec<Complex64> {
    // A constant potential only turns the phase.
    let phase = Complex64::from_polar(1.0, -potential.eval(&vec![0.0; cfg.dims]) * t / cfg.hbar);
    positions.par_iter().map(|x| phase * free_superposition(x, t, terms, cfg.hbar, cfg.mass)).collect()
}

fn evolve(s: &Scenario, cfg: &LatticeConfig, process: &ProcessSpec, steps: usize) -> Result<Evolution, ScenarioError> {
    let game = RealityGame::new(cfg.clone(), s.lagrangian.clone(), process.clone(), GameOptions::default())?;
    let run = game.propagate(steps, s.strategy)?;
    let sites = lattice_sites(cfg);
    let positions: Vec<Vec<f64>> = sites.iter().map(|x| x.iter().map(|&k| k as f64 * cfg.dx).collect()).collect();
    let terms = gaussian_terms(process);
    let cell = cfg.dx.powi(cfg.dims as i32);
    let mut values = Vec::with_capacity(steps + 1);
    let mut errors = Vec::with_capacity(steps + 1);
    let mut norm0 = 0.0;
    for (step, t) in run.tapestries.iter().enumerate() {
        let time = step as f64 * cfg.dt;
        let got = site_values(t, &sites);
        let want = analytic(&terms, &s.lagrangian.potential, &positions, time, cfg);
        let dens_got: Vec<Complex64> = got.iter().map(|v| Complex64::new(v.norm_sqr(), 0.0)).collect();
        let dens_want: Vec<Complex64> = want.iter().map(|v| Complex64::new(v.norm_sqr(), 0.0)).collect();
        let norm: f64 = got.iter().map(|v| v.norm_sqr()).sum::<f64>() * cell;
        if step == 0 {
            norm0 = norm;
        }
        errors.push(StepError {
            step,
            t: time,
            l2_error: relative_l2(&got, &want),
            density_error: relative_l2(&dens_got, &dens_want),
            norm,
            norm_drift: (norm / norm0 - 1.0).abs(),
        });
        values.push(got);
    }
    let violations = count_violations(&run.tapestries);
    Ok(Evolution { run, sites, positions, values, errors, violations })
}

fn wave_file(s: &Scenario, cfg: &LatticeConfig, ev: &Evolution) -> (String, String) {
    let mut table = WaveTable::new(cfg.dims);
    for (step, v) in ev.values.iter().enumerate() {
        table.push_step(step, step as f64 * cfg.dt, &ev.positions, v);
    }
    (format!("wave.{}", extension(s.config.format)), table.render(s.config.format))
}

fn first_round_file(ev: &Evolution) -> Option<(String, String)> {
    let t = ev.run.tapestries.get(1)?;
    Some(("tapestry_step1.json".into(), TapestryDocument::from_tapestry(t, true).to_json() + "\n"))
}

/// Half dt and half dx over the same span and duration.
fn refined(cfg: &LatticeConfig) -> LatticeConfig {
    LatticeConfig { dt: cfg.dt / 2.0, dx: cfg.dx / 2.0, extent: cfg.extent * 2, ..cfg.clone() }
}

fn final_error(ev: &Evolution) -> f64 {
    ev.errors.last().map_or(0.0, |e| e.l2_error)
}

fn summary(ev: &Evolution) -> serde_json::Value {
    let max_drift = ev.errors.iter().map(|e| e.norm_drift).fold(0.0, f64::max);
    json!({
        "final_l2_error": final_error(ev),
        "final_density_error": ev.errors.last().map_or(0.0, |e| e.density_error),
        "max_norm_drift": max_drift,
        "informons": ev.run.tapestries.iter().map(|t| t.len()).sum::<usize>(),
        "validation_violations": ev.violations,
        "diagnostics": ev.run.diagnostics,
        "steps": ev.errors,
    })
}

fn convergence(s: &Scenario, process: &ProcessSpec, steps: usize, coarse: f64) -> Result<serde_json::Value, ScenarioError> {
    let fine_cfg = refined(&s.config.lattice);
    let fine = evolve(s, &fine_cfg, process, steps * 2)?;
    let fine_error = final_error(&fine);
    Ok(json!({"dt": fine_cfg.dt, "dx": fine_cfg.dx, "coarse_error": coarse, "fine_error": fine_error, "improved": fine_error < coarse}))
}

/// Single free (or constant-potential) packet against the spreading Gaussian.
pub fn run_free_particle(s: &Scenario) -> Result<ScenarioResult, ScenarioError> {
    if s.process.combination != Combination::Single {
        return Err(crate::lattice::ConfigError::single("process.combination", "a free-particle run takes a single process").into());
    }
    let steps = s.config.steps.unwrap_or(0);
    let cfg = &s.config.lattice;
    let ev = evolve(s, cfg, &s.process, steps)?;
    let mut report = summary(&ev);
    report["scenario"] = json!("free_particle");
    if s.config.convergence_check {
        report["convergence"] = convergence(s, &s.process, steps, final_error(&ev))?;
    }
    let mut files = vec![wave_file(s, cfg, &ev)];
    files.extend(first_round_file(&ev));
    Ok(ScenarioResult { report, files })
}

/// Weighted subprocesses on interleaved sublattices, with per-tag partial
/// waves. Zero-weight subprocesses never play; a lone survivor runs alone.
pub fn run_superposition(s: &Scenario) -> Result<ScenarioResult, ScenarioError> {
    let live: Vec<_> = s.process.subprocesses.iter().filter(|p| p.weight.norm_sqr() > 0.0).cloned().collect();
    let process = if live.len() == 1 {
        ProcessSpec { subprocesses: live, combination: Combination::Single }
    } else {
        ProcessSpec { subprocesses: live, combination: Combination::ExclusiveSum }
    };
    let steps = s.config.steps.unwrap_or(0);
    let cfg = &s.config.lattice;
    let ev = evolve(s, cfg, &process, steps)?;

    let tags: Vec<u32> = process.subprocesses.iter().map(|p| p.tag).collect();
    let untagged = ev
        .run
        .tapestries
        .iter()
        .flat_map(|t| &t.informons)
        .filter(|n| !n.tag.is_some_and(|g| tags.contains(&g)))
        .count();
    let n = tags.len();
    let design: Vec<f64> = (0..n).map(|r| ev.sites.iter().filter(|x| x[0].rem_euclid(n as i64) as usize == r).count() as f64 / ev.sites.len() as f64).collect();
    let mut fraction_deviation = 0.0f64;
    for t in &ev.run.tapestries {
        if t.is_empty() {
            continue;
        }
        for (r, tag) in tags.iter().enumerate() {
            let share = t.informons.iter().filter(|i| i.tag == Some(*tag)).count() as f64 / t.len() as f64;
            fraction_deviation = fraction_deviation.max((share - design[r]).abs());
        }
    }

    let last = ev.run.tapestries.last().expect("a run holds its initial slice");
    let time = steps as f64 * cfg.dt;
    let mut partials = Vec::new();
    let mut table = String::from("tag,x,re,im,abs2\n");
    for p in &process.subprocesses {
        let part = interpret_tag(last, p.tag);
        let got: Vec<Complex64> = ev.positions.par_iter().map(|x| part.eval(x)).collect();
        let single = ProcessSpec { subprocesses: vec![p.clone()], combination: Combination::Single };
        let want = analytic(&gaussian_terms(&single), &s.lagrangian.potential, &ev.positions, time, cfg);
        partials.push(json!({"tag": p.tag, "l2_error": relative_l2(&got, &want)}));
        for (x, v) in ev.positions.iter().zip(&got) {
            let coords: Vec<String> = x.iter().map(|c| c.to_string()).collect();
            table.push_str(&format!("{},{},{},{},{}\n", p.tag, coords.join(","), v.re, v.im, v.norm_sqr()));
        }
    }

    let mut report = summary(&ev);
    report["scenario"] = json!("superposition");
    report["untagged_informons"] = json!(untagged);
    report["design_fractions"] = json!(design);
    report["max_fraction_deviation"] = json!(fraction_deviation);
    report["partials"] = json!(partials);
    if s.config.convergence_check {
        report["convergence"] = convergence(s, &process, steps, final_error(&ev))?;
    }
    let mut files = vec![wave_file(s, cfg, &ev), ("partials.csv".into(), table)];
    files.extend(first_round_file(&ev));
    Ok(ScenarioResult { report, files })
}

#[cfg(test)]
mod tests {
    use super::super::parse_config_str;
    use super::*;

    fn config(steps: usize, extent: i64) -> String {
        format!(
            r#"{{"scenario": "free_particle",
                "lattice": {{"dt": 0.05, "dx": 0.1, "dims": 1, "extent": {extent}}},
                "process": {{"subprocesses": [{{"w_re": 1, "psi": "gaussian:{{1,0,1}}", "tag": 0}}]}},
                "steps": {steps}}}"#
        )
    }

    #[test]
    fn zero_steps_is_exact() {
        let s = parse_config_str(&config(0, 200)).unwrap();
        let r = run_free_particle(&s).unwrap();
        assert!(r.report["final_l2_error"].as_f64().unwrap() < 1e-15);
        assert_eq!(r.report["validation_violations"], 0);
    }

    #[test]
    fn short_run_tracks_the_packet() {
        let s = parse_config_str(&config(4, 200)).unwrap();
        let r = run_free_particle(&s).unwrap();
        assert!(r.report["final_l2_error"].as_f64().unwrap() < 0.02, "{}", r.report["final_l2_error"]);
        assert!(r.report["max_norm_drift"].as_f64().unwrap() < 0.01);
        assert_eq!(r.report["validation_violations"], 0);
        let wave = &r.files[0];
        assert_eq!(wave.0, "wave.csv");
        assert!(wave.1.starts_with("step,t,x,re,im,abs2\n"));
        assert_eq!(wave.1.lines().count(), 1 + 5 * 401);
    }

    #[test]
    fn lone_weight_matches_free_run() {
        let free = parse_config_str(&config(3, 150)).unwrap();
        let sup = config(3, 150)
            .replace("free_particle", "superposition")
            .replace(
                r#"[{"w_re": 1, "psi": "gaussian:{1,0,1}", "tag": 0}]"#,
                r#"[{"w_re": 1, "psi": "gaussian:{1,0,1}", "tag": 0}, {"w_re": 0, "psi": "gaussian:{1,0,-1}", "tag": 1}], "combination": "exclusive_sum""#,
            );
        let sup = parse_config_str(&sup).unwrap();
        let a = run_free_particle(&free).unwrap();
        let b = run_superposition(&sup).unwrap();
        assert_eq!(a.files[0], b.files[0]);
    }
}
