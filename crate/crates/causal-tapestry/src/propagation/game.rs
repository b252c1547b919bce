//! The token game: every play pairs a prior informon with a target site on
//! the next slice and leaves an amplitude token and a content token there.
//! At the end of the round each occupied site is exchanged for one informon.

use super::kernel::{AxisKernel, KernelModel, Window};
use super::process::ProcessSpec;
use super::{Lagrangian, PropagationError};
use crate::lattice::{LatticeConfig, LatticePoint};
use crate::tapestry::{CausalTapestry, IdAllocator, Informon, InformonId, Priors, SiteLayout};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

/// How many of the available plays are made in a round.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// Every (prior informon, target site) pair within kernel reach.
    Exhaustive,
    /// `n_plays` pairs drawn uniformly without replacement; amplitudes are
    /// rescaled by `available / n_plays`.
    Stochastic { n_plays: usize, seed: u64 },
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct GameOptions {
    pub model: KernelModel,
    /// Overrides the model's default window.
    pub window: Option<Window>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RoundDiagnostics {
    /// Size of the exhaustive play set.
    pub available: usize,
    /// Plays actually made.
    pub plays: usize,
    /// Plays refused because the target site belongs to another subprocess.
    pub rejected: usize,
    /// Informons created.
    pub informons: usize,
}

#[derive(Clone, Debug)]
pub struct Round {
    pub tapestry: CausalTapestry,
    pub diagnostics: RoundDiagnostics,
}

#[derive(Clone, Debug)]
pub struct Run {
    /// Slice `k` sits at time index `k`.
    pub tapestries: Vec<CausalTapestry>,
    pub diagnostics: Vec<RoundDiagnostics>,
}

/// A process played out on a lattice under a Lagrangian.
#[derive(Clone, Debug)]
pub struct RealityGame {
    config: LatticeConfig,
    lagrangian: Lagrangian,
    process: ProcessSpec,
    layout: SiteLayout,
    /// Site step between neighbouring samples of one subprocess, per axis.
    stride: Vec<i64>,
    kernels: Vec<AxisKernel>,
}

struct SiteResult {
    amplitude: Complex64,
    content: Vec<InformonId>,
    tag: Option<u32>,
    rejected: usize,
}

impl RealityGame {
    pub fn new(
        config: LatticeConfig,
        lagrangian: Lagrangian,
        process: ProcessSpec,
        options: GameOptions,
    ) -> Result<Self, PropagationError> {
        config.validate()?;
        process.validate(&config).map_err(PropagationError::Invalid)?;
        if !(lagrangian.mass > 0.0) {
            return Err(PropagationError::Invalid("lagrangian mass must be > 0".into()));
        }
        if (lagrangian.mass - config.mass).abs() > 1e-12 * config.mass {
            return Err(PropagationError::Invalid(format!(
                "lagrangian mass {} differs from lattice mass {}",
                lagrangian.mass, config.mass
            )));
        }
        let layout = process.layout();
        let mut stride = vec![1i64; config.dims];
        if let SiteLayout::Interleaved { tags } = &layout {
            stride[0] = tags.len() as i64;
        }
        let kernels = stride
            .iter()
            .map(|&s| {
                let diameter = (2 * config.extent / s) as usize;
                AxisKernel::new(options.model, config.dt, s as f64 * config.dx, config.hbar, lagrangian.mass, options.window, diameter)
            })
            .collect();
        Ok(RealityGame { config, lagrangian, process, layout, stride, kernels })
    }

    pub fn config(&self) -> &LatticeConfig {
        &self.config
    }

    pub fn process(&self) -> &ProcessSpec {
        &self.process
    }

    pub fn layout(&self) -> &SiteLayout {
        &self.layout
    }

    pub fn kernels(&self) -> &[AxisKernel] {
        &self.kernels
    }

    fn side(&self) -> i64 {
        2 * self.config.extent + 1
    }

    fn site_count(&self) -> usize {
        (self.side() as usize).pow(self.config.dims as u32)
    }

    fn flat(&self, x: &[i64]) -> usize {
        let e = self.config.extent;
        x.iter().fold(0usize, |acc, &k| acc * self.side() as usize + (k + e) as usize)
    }

    fn unflat(&self, mut flat: usize) -> Vec<i64> {
        let side = self.side() as usize;
        let mut x = vec![0; self.config.dims];
        for axis in (0..self.config.dims).rev() {
            x[axis] = (flat % side) as i64 - self.config.extent;
            flat /= side;
        }
        x
    }

    fn position(&self, x: &[i64]) -> Vec<f64> {
        x.iter().map(|&k| k as f64 * self.config.dx).collect()
    }

    /// Slice 0: every site of each subprocess's sublattice carries `w_i ψ_i(x)`.
    pub fn initial_tapestry(&self, ids: &mut IdAllocator) -> CausalTapestry {
        let mut informons = Vec::new();
        for flat in 0..self.site_count() {
            let x = self.unflat(flat);
            let sub = match self.layout.owner(&x) {
                Some(tag) => self.process.subprocesses.iter().find(|s| s.tag == tag).expect("layout tags come from the process"),
                None => &self.process.subprocesses[0],
            };
            let theta = sub.weight * sub.initial.eval(&self.position(&x));
            informons.push(Informon::new(ids.next_id(), LatticePoint::new(0, x), theta, Some(sub.tag), Vec::new()));
        }
        CausalTapestry::new(self.config.clone(), 0, informons, Priors::new()).with_layout(self.layout.clone())
    }

    fn potential_phase(&self, from: &[i64], to: &[i64]) -> Complex64 {
        if self.lagrangian.potential.is_free() {
            return Complex64::new(1.0, 0.0);
        }
        let v = self.lagrangian.potential.eval(&self.position(from)) + self.lagrangian.potential.eval(&self.position(to));
        Complex64::from_polar(1.0, -self.config.dt * v / (2.0 * self.config.hbar))
    }

    fn token(&self, source: &Informon, target: &[i64], offset: &[i64]) -> Complex64 {
        let mut f = source.theta;
        for (k, &d) in self.kernels.iter().zip(offset) {
            f *= k.tap(d);
        }
        f * self.potential_phase(&source.point.x, target)
    }

    /// Offsets (in sublattice steps) from a target back to its sources, in
    /// lexicographic order; each axis runs over `-r..=r`.
    fn offset_box(&self) -> Vec<Vec<i64>> {
        let mut boxes: Vec<Vec<i64>> = vec![Vec::new()];
        for k in &self.kernels {
            let r = k.radius() as i64;
            boxes = boxes
                .into_iter()
                .flat_map(|prefix| {
                    (-r..=r).map(move |d| {
                        let mut p = prefix.clone();
                        p.push(d);
                        p
                    })
                })
                .collect();
        }
        boxes
    }

    fn source_index(&self, current: &CausalTapestry) -> Result<Vec<Option<u32>>, PropagationError> {
        let mut index = vec![None; self.site_count()];
        for (i, n) in current.informons.iter().enumerate() {
            if !self.config.contains(&n.point.x) {
                return Err(PropagationError::Invalid(format!("informon {} lies outside the lattice", n.id)));
            }
            index[self.flat(&n.point.x)] = Some(i as u32);
        }
        Ok(index)
    }

    /// Settles one site from its tokens, given as (offset, source) in
    /// offset order. Tokens whose tag differs from the site's tag are refused.
    fn settle(&self, current: &CausalTapestry, target: &[i64], tokens: &[(&[i64], u32)]) -> Option<SiteResult> {
        if tokens.is_empty() {
            return None;
        }
        let src = |s: u32| &current.informons[s as usize];
        let site_tag = match self.layout.owner(target) {
            Some(tag) => Some(tag),
            None => tokens.iter().map(|&(_, s)| src(s)).min_by_key(|n| n.id).and_then(|n| n.tag),
        };
        let mut amplitude = Complex64::new(0.0, 0.0);
        let mut content = Vec::new();
        let mut rejected = 0;
        for &(offset, s) in tokens {
            let n = src(s);
            if n.tag != site_tag {
                rejected += 1;
                continue;
            }
            amplitude += self.token(n, target, offset);
            content.push(n.id);
        }
        content.sort_unstable();
        Some(SiteResult { amplitude, content, tag: site_tag, rejected })
    }

    fn source_of(&self, target: &[i64], offset: &[i64]) -> Option<Vec<i64>> {
        let x: Vec<i64> = target.iter().zip(offset).zip(&self.stride).map(|((&y, &d), &s)| y - d * s).collect();
        if self.config.contains(&x) {
            Some(x)
        } else {
            None
        }
    }

    /// Plays one round and returns the next slice.
    pub fn play_round(
        &self,
        current: &CausalTapestry,
        strategy: Strategy,
        round: u64,
        ids: &mut IdAllocator,
    ) -> Result<Round, PropagationError> {
        if current.config != self.config {
            return Err(PropagationError::Invalid("tapestry lattice differs from the game lattice".into()));
        }
        let index = self.source_index(current)?;
        let offsets = self.offset_box();
        let available = self.count_available(current, &offsets);

        let (results, scale, plays): (Vec<(usize, SiteResult)>, f64, usize) = match strategy {
            Strategy::Exhaustive => {
                let results: Vec<(usize, SiteResult)> = (0..self.site_count())
                    .into_par_iter()
                    .filter_map(|flat| {
                        let target = self.unflat(flat);
                        let tokens: Vec<(&[i64], u32)> = offsets
                            .iter()
                            .filter_map(|d| {
                                let x = self.source_of(&target, d)?;
                                index[self.flat(&x)].map(|s| (d.as_slice(), s))
                            })
                            .collect();
                        self.settle(current, &target, &tokens).map(|r| (flat, r))
                    })
                    .collect();
                (results, 1.0, available)
            }
            Strategy::Stochastic { n_plays, seed } => {
                let n = n_plays.min(available);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(round);
                let mut picks = if n == 0 { Vec::new() } else { rand::seq::index::sample(&mut rng, available, n).into_vec() };
                picks.sort_unstable();
                let mut by_target: std::collections::BTreeMap<usize, Vec<(usize, u32)>> = Default::default();
                let per_source = self.plays_per_source(current, &offsets);
                let mut starts = Vec::with_capacity(per_source.len());
                let mut acc = 0usize;
                for (_, list) in &per_source {
                    starts.push(acc);
                    acc += list.len();
                }
                for p in picks {
                    let s = starts.partition_point(|&st| st <= p) - 1;
                    let (src, list) = &per_source[s];
                    let (target_flat, offset_idx) = list[p - starts[s]];
                    by_target.entry(target_flat).or_default().push((offset_idx, *src));
                }
                let results: Vec<(usize, SiteResult)> = by_target
                    .into_par_iter()
                    .filter_map(|(flat, mut toks)| {
                        toks.sort_unstable();
                        let target = self.unflat(flat);
                        let tokens: Vec<(&[i64], u32)> = toks.iter().map(|&(d, s)| (offsets[d].as_slice(), s)).collect();
                        self.settle(current, &target, &tokens).map(|r| (flat, r))
                    })
                    .collect();
                let scale = if n == 0 { 1.0 } else { available as f64 / n as f64 };
                (results, scale, n)
            }
        };

        let mut informons = Vec::with_capacity(results.len());
        let mut rejected = 0;
        for (flat, r) in results {
            rejected += r.rejected;
            if r.content.is_empty() {
                continue;
            }
            let x = self.unflat(flat);
            informons.push(Informon {
                id: ids.next_id(),
                point: LatticePoint::new(current.slice_t + 1, x),
                theta: r.amplitude * scale,
                tag: r.tag,
                content: r.content,
            });
        }
        let diagnostics = RoundDiagnostics { available, plays, rejected, informons: informons.len() };
        let tapestry = CausalTapestry::new(self.config.clone(), current.slice_t + 1, informons, current.priors_for_next())
            .with_layout(current.layout.clone());
        Ok(Round { tapestry, diagnostics })
    }

    fn count_available(&self, current: &CausalTapestry, offsets: &[Vec<i64>]) -> usize {
        current
            .informons
            .iter()
            .map(|n| offsets.iter().filter(|d| self.target_of(&n.point.x, d).is_some()).count())
            .sum()
    }

    fn target_of(&self, source: &[i64], offset: &[i64]) -> Option<Vec<i64>> {
        let y: Vec<i64> = source.iter().zip(offset).zip(&self.stride).map(|((&x, &d), &s)| x + d * s).collect();
        if self.config.contains(&y) {
            Some(y)
        } else {
            None
        }
    }

    /// Canonical enumeration of the play set: sources in slice order, each
    /// with its in-lattice targets as (target site, offset index).
    fn plays_per_source(&self, current: &CausalTapestry, offsets: &[Vec<i64>]) -> Vec<(u32, Vec<(usize, usize)>)> {
        current
            .informons
            .iter()
            .enumerate()
            .map(|(i, n)| {
                let list = offsets
                    .iter()
                    .enumerate()
                    .filter_map(|(j, d)| self.target_of(&n.point.x, d).map(|y| (self.flat(&y), j)))
                    .collect();
                (i as u32, list)
            })
            .collect()
    }

    /// Initial slice followed by `steps` rounds.
    pub fn propagate(&self, steps: usize, strategy: Strategy) -> Result<Run, PropagationError> {
        let mut ids = IdAllocator::default();
        let mut tapestries = vec![self.initial_tapestry(&mut ids)];
        let mut diagnostics = Vec::with_capacity(steps);
        for k in 0..steps {
            let round = self.play_round(tapestries.last().unwrap(), strategy, k as u64, &mut ids)?;
            diagnostics.push(round.diagnostics);
            tapestries.push(round.tapestry);
        }
        Ok(Run { tapestries, diagnostics })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propagation::{feynman_hibbs_a, InitialState, Potential};
    use crate::tapestry::{interpret_state, validate, ValidationMode};

    fn small() -> LatticeConfig {
        LatticeConfig { extent: 60, ..Default::default() }
    }

    fn game(cfg: LatticeConfig, model: KernelModel) -> RealityGame {
        let proc = ProcessSpec::single(InitialState::gaussian_1d(1.0, 0.0, 0.0), 0);
        RealityGame::new(cfg.clone(), Lagrangian::free(cfg.mass), proc, GameOptions { model, window: None }).unwrap()
    }

    #[test]
    fn empty_slice_gives_empty_slice() {
        let g = game(small(), KernelModel::BandLimited);
        let empty = CausalTapestry::empty(small(), 0);
        let r = g.play_round(&empty, Strategy::Exhaustive, 0, &mut IdAllocator::default()).unwrap();
        assert!(r.tapestry.is_empty());
        assert_eq!(r.tapestry.slice_t, 1);
    }

    #[test]
    fn single_source_straight_line_tokens() {
        let cfg = small();
        let g = RealityGame::new(
            cfg.clone(),
            Lagrangian::free(1.0),
            ProcessSpec::single(InitialState::gaussian_1d(1.0, 0.0, 0.0), 0),
            GameOptions { model: KernelModel::StraightLine, window: Some(Window::Hard { radius: 1e9 }) },
        )
        .unwrap();
        let src = Informon::new(InformonId(0), LatticePoint::new(0, vec![0]), Complex64::new(1.0, 0.0), Some(0), vec![]);
        let cur = CausalTapestry::new(cfg.clone(), 0, vec![src], Priors::new());
        let r = g.play_round(&cur, Strategy::Exhaustive, 0, &mut IdAllocator::starting_at(1)).unwrap();
        assert_eq!(r.tapestry.len(), cfg.sites_per_axis());
        let a = feynman_hibbs_a(&cfg);
        for n in &r.tapestry.informons {
            let y = n.point.x[0] as f64 * cfg.dx;
            let expect = (cfg.dx / a) * Complex64::from_polar(1.0, y * y / (2.0 * cfg.dt));
            assert!((n.theta - expect).norm() < 1e-14);
            assert_eq!(n.content, vec![InformonId(0)]);
        }
    }

    #[test]
    fn one_round_keeps_unit_mass_and_validates() {
        let cfg = small();
        let g = game(cfg.clone(), KernelModel::BandLimited);
        let run = g.propagate(1, Strategy::Exhaustive).unwrap();
        let mass: f64 = run.tapestries[1].informons.iter().map(|n| n.theta.norm_sqr() * cfg.dx).sum();
        assert!((mass - 1.0).abs() < 0.01, "{mass}");
        for t in &run.tapestries {
            assert!(validate(t, ValidationMode::Strict).is_empty());
        }
    }

    #[test]
    fn exhaustive_is_deterministic_and_full_sampling_matches() {
        let cfg = LatticeConfig { extent: 40, ..Default::default() };
        let g = game(cfg, KernelModel::BandLimited);
        let a = g.propagate(2, Strategy::Exhaustive).unwrap();
        let b = g.propagate(2, Strategy::Exhaustive).unwrap();
        let c = g.propagate(2, Strategy::Stochastic { n_plays: usize::MAX, seed: 3 }).unwrap();
        for k in 0..3 {
            assert_eq!(a.tapestries[k].informons, b.tapestries[k].informons);
            assert_eq!(a.tapestries[k].informons, c.tapestries[k].informons);
        }
    }

    #[test]
    fn stochastic_rounds_are_seeded() {
        let cfg = LatticeConfig { extent: 40, ..Default::default() };
        let g = game(cfg, KernelModel::BandLimited);
        let s = Strategy::Stochastic { n_plays: 2000, seed: 11 };
        let a = g.propagate(2, s).unwrap();
        let b = g.propagate(2, s).unwrap();
        assert_eq!(a.tapestries[2].informons, b.tapestries[2].informons);
        assert_eq!(a.diagnostics[0].plays, 2000);
        let other = g.propagate(2, Strategy::Stochastic { n_plays: 2000, seed: 12 }).unwrap();
        assert_ne!(a.tapestries[2].informons, other.tapestries[2].informons);
        for t in &a.tapestries {
            assert!(validate(t, ValidationMode::Strict).is_empty());
        }
    }

    #[test]
    fn foreign_tags_are_rejected() {
        let cfg = LatticeConfig { extent: 30, ..Default::default() };
        let w = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let proc = ProcessSpec {
            subprocesses: vec![
                crate::propagation::Subprocess { weight: w, initial: InitialState::gaussian_1d(1.0, 0.0, 1.0), tag: 0 },
                crate::propagation::Subprocess { weight: w, initial: InitialState::gaussian_1d(1.0, 0.0, -1.0), tag: 1 },
            ],
            combination: crate::propagation::Combination::ExclusiveSum,
        };
        let g = RealityGame::new(cfg.clone(), Lagrangian::free(1.0), proc, GameOptions::default()).unwrap();
        let mut ids = IdAllocator::default();
        let mut t0 = g.initial_tapestry(&mut ids);
        assert!(t0.informons.iter().all(|n| n.tag == t0.layout.owner(&n.point.x)));
        let r = g.play_round(&t0, Strategy::Exhaustive, 0, &mut ids).unwrap();
        assert_eq!(r.diagnostics.rejected, 0);
        assert!(r.tapestry.informons.iter().all(|n| n.tag == t0.layout.owner(&n.point.x)));
        // A source sitting on the other subprocess's sublattice has every play refused.
        t0.informons[10].tag = Some(1 - t0.informons[10].tag.unwrap());
        let r = g.play_round(&t0, Strategy::Exhaustive, 0, &mut ids).unwrap();
        assert!(r.diagnostics.rejected > 0);
        assert!(r.tapestry.informons.iter().all(|n| !n.content.contains(&t0.informons[10].id)));
    }

    #[test]
    fn constant_potential_is_a_global_phase() {
        let cfg = LatticeConfig { extent: 60, ..Default::default() };
        let free = game(cfg.clone(), KernelModel::BandLimited);
        let proc = ProcessSpec::single(InitialState::gaussian_1d(1.0, 0.0, 0.0), 0);
        let lag = Lagrangian { mass: 1.0, potential: Potential::Constant(2.0) };
        let shifted = RealityGame::new(cfg.clone(), lag, proc, GameOptions::default()).unwrap();
        let a = free.propagate(1, Strategy::Exhaustive).unwrap();
        let b = shifted.propagate(1, Strategy::Exhaustive).unwrap();
        let phase = Complex64::from_polar(1.0, -cfg.dt * 2.0);
        let wa = interpret_state(&a.tapestries[1]);
        let wb = interpret_state(&b.tapestries[1]);
        for z in [-0.33, 0.0, 0.71] {
            assert!((wa.eval(&[z]) * phase - wb.eval(&[z])).norm() < 1e-13);
        }
    }

    #[test]
    fn mismatched_masses_are_refused() {
        let cfg = small();
        let proc = ProcessSpec::single(InitialState::gaussian_1d(1.0, 0.0, 0.0), 0);
        assert!(RealityGame::new(cfg, Lagrangian::free(2.0), proc, GameOptions::default()).is_err());
    }
}
