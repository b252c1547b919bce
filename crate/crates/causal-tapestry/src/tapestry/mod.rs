//! Informons, causal tapestries and the prior union they rest on.

mod graph;
mod io;
mod validate;

pub use graph::{content_graph, covering_graph, ContentGraph, CoverNode, CoveringGraph};
pub use io::{TapestryDocument, InformonRecord};
pub use validate::{validate, Rule, ValidationMode, Violation};

use crate::interp::{InterpolatedWave, WaveComponent};
use crate::lattice::{LatticeConfig, LatticePoint};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct InformonId(pub u64);

impl fmt::Display for InformonId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Monotone identifier source; one per run.
#[derive(Clone, Debug, Default)]
pub struct IdAllocator {
    next: u64,
}

impl IdAllocator {
    pub fn starting_at(next: u64) -> Self {
        IdAllocator { next }
    }

    pub fn next_id(&mut self) -> InformonId {
        let id = InformonId(self.next);
        self.next += 1;
        id
    }
}

/// One actual occasion: identifier, lattice site, amplitude, subprocess tag
/// and the set of prior informons whose information it carries.
#[derive(Clone, Debug, PartialEq)]
pub struct Informon {
    pub id: InformonId,
    pub point: LatticePoint,
    pub theta: Complex64,
    pub tag: Option<u32>,
    /// Sorted, without repeats.
    pub content: Vec<InformonId>,
}

impl Informon {
    pub fn new(
        id: InformonId,
        point: LatticePoint,
        theta: Complex64,
        tag: Option<u32>,
        mut content: Vec<InformonId>,
    ) -> Self {
        content.sort_unstable();
        content.dedup();
        Informon { id, point, theta, tag, content }
    }

    pub fn has_in_content(&self, id: InformonId) -> bool {
        self.content.binary_search(&id).is_ok()
    }

    /// Same interpretation: site, amplitude (bitwise) and tag.
    pub fn same_interpretation(&self, other: &Informon) -> bool {
        self.point == other.point
            && self.theta.re.to_bits() == other.theta.re.to_bits()
            && self.theta.im.to_bits() == other.theta.im.to_bits()
            && self.tag == other.tag
    }
}

/// Append-only union of earlier slices. Cloning is cheap: slices are shared.
#[derive(Clone, Debug, Default)]
pub struct Priors {
    slices: Vec<Arc<Vec<Informon>>>,
}

impl Priors {
    pub fn new() -> Self {
        Priors::default()
    }

    /// Builds priors from loose informons, grouped by time index.
    pub fn from_informons(informons: Vec<Informon>) -> Self {
        let mut by_t: BTreeMap<i64, Vec<Informon>> = BTreeMap::new();
        for n in informons {
            by_t.entry(n.point.t).or_default().push(n);
        }
        let mut p = Priors::new();
        for (_, slice) in by_t {
            p = p.extended(slice);
        }
        p
    }

    pub fn extended(&self, slice: Vec<Informon>) -> Priors {
        let mut slice = slice;
        slice.sort_by_key(|n| n.id);
        let mut slices = self.slices.clone();
        slices.push(Arc::new(slice));
        Priors { slices }
    }

    pub fn find(&self, id: InformonId) -> Option<&Informon> {
        for s in self.slices.iter().rev() {
            match (s.first(), s.last()) {
                (Some(lo), Some(hi)) if lo.id <= id && id <= hi.id => {
                    if let Ok(i) = s.binary_search_by_key(&id, |n| n.id) {
                        return Some(&s[i]);
                    }
                }
                _ => {}
            }
        }
        None
    }

    pub fn iter(&self) -> impl Iterator<Item = &Informon> {
        self.slices.iter().flat_map(|s| s.iter())
    }

    pub fn len(&self) -> usize {
        self.slices.iter().map(|s| s.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn slice_count(&self) -> usize {
        self.slices.len()
    }
}

/// How subprocess tags share the lattice.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum SiteLayout {
    /// Every site may carry any tag; interpolation uses the full lattice spacing.
    #[default]
    Full,
    /// Sites with first index `≡ r (mod tags.len())` belong to `tags[r]`;
    /// each tag is interpolated on its own sublattice.
    Interleaved { tags: Vec<u32> },
}

impl SiteLayout {
    /// Tag owning a site, if the layout assigns one.
    pub fn owner(&self, x: &[i64]) -> Option<u32> {
        match self {
            SiteLayout::Full => None,
            SiteLayout::Interleaved { tags } => {
                let n = tags.len() as i64;
                Some(tags[x[0].rem_euclid(n) as usize])
            }
        }
    }

    /// Sample spacing used to interpolate a tag's informons.
    pub fn spacing(&self, config: &LatticeConfig) -> Vec<f64> {
        let mut s = vec![config.dx; config.dims];
        if let SiteLayout::Interleaved { tags } = self {
            s[0] *= tags.len() as f64;
        }
        s
    }
}

/// One space-like slice of informons plus the union of everything before it.
#[derive(Clone, Debug)]
pub struct CausalTapestry {
    pub config: LatticeConfig,
    pub slice_t: i64,
    pub informons: Vec<Informon>,
    pub priors: Priors,
    pub layout: SiteLayout,
}

impl CausalTapestry {
    pub fn new(config: LatticeConfig, slice_t: i64, informons: Vec<Informon>, priors: Priors) -> Self {
        CausalTapestry { config, slice_t, informons, priors, layout: SiteLayout::Full }
    }

    pub fn with_layout(mut self, layout: SiteLayout) -> Self {
        self.layout = layout;
        self
    }

    pub fn empty(config: LatticeConfig, slice_t: i64) -> Self {
        CausalTapestry::new(config, slice_t, Vec::new(), Priors::new())
    }

    /// Priors for the slice that follows this one.
    pub fn priors_for_next(&self) -> Priors {
        self.priors.extended(self.informons.clone())
    }

    pub fn len(&self) -> usize {
        self.informons.len()
    }

    pub fn is_empty(&self) -> bool {
        self.informons.is_empty()
    }

    /// Looks an id up in the slice, then in the priors.
    pub fn resolve(&self, id: InformonId) -> Option<&Informon> {
        self.informons.iter().find(|n| n.id == id).or_else(|| self.priors.find(id))
    }
}

/// Interprets the slice as a wave: each informon contributes its amplitude
/// times a product of sincs centred on its site, one component per tag.
pub fn interpret_state(tapestry: &CausalTapestry) -> InterpolatedWave {
    let cfg = &tapestry.config;
    let spacing = tapestry.layout.spacing(cfg);
    let mut by_tag: BTreeMap<Option<u32>, WaveComponent> = BTreeMap::new();
    let mut pos = vec![0.0; cfg.dims];
    for n in &tapestry.informons {
        for (p, &k) in pos.iter_mut().zip(&n.point.x) {
            *p = k as f64 * cfg.dx;
        }
        by_tag
            .entry(n.tag)
            .or_insert_with(|| WaveComponent::new(n.tag, spacing.clone()))
            .push(&pos, n.theta);
    }
    InterpolatedWave::new(by_tag.into_values().collect())
}

/// Partial wave of the informons carrying `tag`.
pub fn interpret_tag(tapestry: &CausalTapestry, tag: u32) -> InterpolatedWave {
    interpret_state(tapestry).with_tag(tag)
}
