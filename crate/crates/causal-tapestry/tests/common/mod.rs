//! Random tapestry generators shared by the property and acceptance tests.

use causal_tapestry::lattice::{LatticeConfig, LatticePoint};
use causal_tapestry::tapestry::{CausalTapestry, Informon, InformonId, Priors};
use num_complex::Complex64;
use proptest::collection::vec;
use proptest::prelude::*;

const POOL: u64 = 45;

pub fn small_lattice() -> LatticeConfig {
    LatticeConfig { extent: 3, ..LatticeConfig::default() }
}

/// Content reference: usually one of the prior ids, sometimes any id at all.
fn pick(prior_ids: &[u64], (known, i): (bool, u64)) -> InformonId {
    if known && !prior_ids.is_empty() {
        InformonId(prior_ids[i as usize % prior_ids.len()])
    } else {
        InformonId(i % POOL)
    }
}

type Ref = (bool, u64);
type PriorSpec = (i64, i64, u8, Vec<Ref>);
type SliceSpec = (u8, u64, bool, i64, u8, bool, Vec<Ref>);

fn refs() -> impl Strategy<Value = Vec<Ref>> {
    vec((prop::bool::weighted(0.9), 0..POOL), 0..4)
}

fn build(ids: Vec<u64>, priors: Vec<PriorSpec>, slice: Vec<SliceSpec>) -> CausalTapestry {
    let prior_ids: Vec<u64> = ids[..priors.len()].to_vec();
    let prior_informons: Vec<Informon> = priors
        .into_iter()
        .zip(&prior_ids)
        .map(|((t, x, th, content), &id)| {
            let content = content.into_iter().map(|r| pick(&prior_ids, r)).collect();
            Informon::new(InformonId(id), LatticePoint::new(t, vec![x]), Complex64::new(th as f64, 0.0), Some(0), content)
        })
        .collect();
    let informons: Vec<Informon> = slice
        .into_iter()
        .map(|(kind, id, on_slice, x, th, tagged, content)| {
            // A few slice entries repeat a prior verbatim.
            if kind == 0 && !prior_informons.is_empty() {
                return prior_informons[id as usize % prior_informons.len()].clone();
            }
            let id = if kind == 1 { InformonId(prior_ids.first().copied().unwrap_or(id)) } else { InformonId(id % POOL) };
            let content = content.into_iter().map(|r| pick(&prior_ids, r)).collect();
            let t = if on_slice { 2 } else { 1 };
            Informon::new(id, LatticePoint::new(t, vec![x]), Complex64::new(th as f64, 0.0), tagged.then_some(0), content)
        })
        .collect();
    CausalTapestry::new(small_lattice(), 2, informons, Priors::from_informons(prior_informons))
}

/// Arbitrary ids, sites and contents: mostly inconsistent.
fn messy() -> impl Strategy<Value = CausalTapestry> {
    (0usize..25, 0usize..25).prop_flat_map(|(np, ns)| {
        let ids = Just((0..POOL).collect::<Vec<u64>>()).prop_shuffle();
        let priors = vec((0i64..2, -4i64..=4, 0u8..3, refs()), np);
        let slice = vec((0u8..12, 0..POOL, prop::bool::weighted(0.95), -4i64..=4, 0u8..3, any::<bool>(), refs()), ns);
        (ids, priors, slice).prop_map(|(ids, p, s)| build(ids, p, s))
    })
}

/// Layered slices on distinct sites, each taking content from the slice
/// before, then at most one mutation.
fn tidy() -> impl Strategy<Value = CausalTapestry> {
    let sites = || Just((-3i64..=3).collect::<Vec<_>>()).prop_shuffle();
    (sites(), sites(), sites(), 1usize..8, 1usize..8, 0usize..8, vec(vec(0usize..8, 0..4), 8), vec(vec(0usize..8, 0..4), 8), 0u8..16, 0usize..8)
        .prop_map(|(s0, s1, s2, n0, n1, n2, c1, c2, mutation, which)| {
            let (n0, n1, n2) = (n0.min(7), n1.min(7), n2.min(7));
            let mut next = 0u64;
            let mut layer = |t: i64, sites: &[i64], n: usize, below: &[InformonId], contents: &[Vec<usize>]| -> Vec<Informon> {
                (0..n)
                    .map(|i| {
                        let content = if below.is_empty() { vec![] } else { contents[i].iter().map(|&j| below[j % below.len()]).collect() };
                        next += 1;
                        Informon::new(InformonId(next), LatticePoint::new(t, vec![sites[i]]), Complex64::new(1.0 + i as f64, 0.0), Some(0), content)
                    })
                    .collect()
            };
            let l0 = layer(0, &s0, n0, &[], &c1);
            let l0_ids: Vec<InformonId> = l0.iter().map(|n| n.id).collect();
            let l1 = layer(1, &s1, n1, &l0_ids, &c1);
            let l1_ids: Vec<InformonId> = l1.iter().map(|n| n.id).collect();
            let mut l2 = layer(2, &s2, n2, &l1_ids, &c2);
            if let Some(n) = l2.get_mut(which % n2.max(1)) {
                match mutation {
                    0 => n.content.push(n.id),
                    1 => n.content.push(InformonId(999)),
                    2 => n.point.t = 1,
                    3 => n.point.x = vec![9],
                    4 => n.id = l0_ids[0],
                    5 => n.content = vec![l0_ids[0]],
                    _ => {}
                }
                n.content.sort_unstable();
            }
            let mut priors = l0;
            priors.extend(l1);
            CausalTapestry::new(small_lattice(), 2, l2, Priors::from_informons(priors))
        })
}

pub fn tapestries() -> impl Strategy<Value = CausalTapestry> {
    prop_oneof![messy(), tidy()]
}
