//! Consistency conditions for a causal tapestry.

use super::{CausalTapestry, Informon, InformonId};
use crate::lattice::LatticePoint;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

/// Which condition a violation breaks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Rule {
    /// Numbered consistency condition, 1 through 8.
    Axiom(u8),
    /// An informon of the slice sits at a different time index.
    SpaceLikeSlice,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::Axiom(k) => write!(f, "axiom {k}"),
            Rule::SpaceLikeSlice => write!(f, "space-like slice"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Violation {
    pub rule: Rule,
    pub ids: Vec<InformonId>,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ids: Vec<String> = self.ids.iter().map(|i| i.to_string()).collect();
        write!(f, "{} [{}]: {}", self.rule, ids.join(", "), self.detail)
    }
}

/// Condition 7 is only checked in strict mode.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ValidationMode {
    #[default]
    Lenient,
    Strict,
}

/// Checks conditions 1–6 and 8 (and 7 in strict mode) plus the slice rule.
/// An empty result means the tapestry is consistent.
pub fn validate(tapestry: &CausalTapestry, mode: ValidationMode) -> Vec<Violation> {
    let mut out = Vec::new();
    let slice = &tapestry.informons;
    let priors = &tapestry.priors;
    let mut push = |rule: Rule, ids: Vec<InformonId>, detail: String| out.push(Violation { rule, ids, detail });

    for n in slice {
        if n.point.t != tapestry.slice_t {
            push(
                Rule::SpaceLikeSlice,
                vec![n.id],
                format!("time index {} differs from slice {}", n.point.t, tapestry.slice_t),
            );
        }
    }

    // 1: content resolves into the prior union.
    for n in slice {
        for &c in &n.content {
            if c != n.id && priors.find(c).is_none() {
                push(Rule::Axiom(1), vec![n.id, c], format!("content member {c} is not a prior informon"));
            }
        }
    }

    // 2: the union of all contents, with the order inherited from the
    // priors' own contents, is acyclic.
    let union: BTreeSet<InformonId> = slice.iter().flat_map(|n| n.content.iter().copied()).collect();
    if let Some(cycle) = cyclic_part(&union, |id| priors.find(id)) {
        push(Rule::Axiom(2), cycle, "union of contents contains a directed cycle".into());
    }

    // 3: one identifier, one interpretation and content.
    let mut by_id: BTreeMap<InformonId, Vec<&Informon>> = BTreeMap::new();
    for n in slice {
        by_id.entry(n.id).or_default().push(n);
    }
    for (id, group) in &by_id {
        let first = group[0];
        if group[1..].iter().any(|m| !m.same_interpretation(first) || m.content != first.content) {
            push(Rule::Axiom(3), vec![*id], "identifier carries different interpretations or contents".into());
        }
        if let Some(p) = priors.find(*id) {
            if !p.same_interpretation(first) || p.content != first.content {
                push(Rule::Axiom(3), vec![*id], "identifier already used by a different prior informon".into());
            }
        }
    }

    // 4: one interpretation and content, one identifier.
    let mut by_body: HashMap<BodyKey<'_>, BTreeSet<InformonId>> = HashMap::new();
    for n in slice {
        by_body.entry(BodyKey::of(n)).or_default().insert(n.id);
    }
    let mut dup_bodies: Vec<Vec<InformonId>> =
        by_body.into_values().filter(|s| s.len() > 1).map(|s| s.into_iter().collect()).collect();
    dup_bodies.sort();
    for ids in dup_bodies {
        push(Rule::Axiom(4), ids, "distinct identifiers share interpretation and content".into());
    }

    // 5: no informon contains itself.
    for n in slice {
        if n.has_in_content(n.id) {
            push(Rule::Axiom(5), vec![n.id], "informon lies in its own content".into());
        }
    }

    // 6: slice members never appear in one another's content.
    let slice_ids: HashSet<InformonId> = slice.iter().map(|n| n.id).collect();
    for n in slice {
        for &c in &n.content {
            if c != n.id && slice_ids.contains(&c) {
                push(Rule::Axiom(6), vec![c, n.id], format!("slice informon {c} is in the content of {}", n.id));
            }
        }
    }

    // 7 (strict): for every slice informon with content H and every member
    // of H with content G, H meets G in nothing or in all of G.
    if mode == ValidationMode::Strict {
        for n in slice {
            for &g_id in &n.content {
                if let Some(g) = priors.find(g_id) {
                    let shared = g.content.iter().filter(|m| n.has_in_content(**m)).count();
                    if shared > 0 && shared < g.content.len() {
                        push(
                            Rule::Axiom(7),
                            vec![n.id, g_id],
                            format!("content of {} holds {shared} of {} members of the content of {g_id}", n.id, g.content.len()),
                        );
                    }
                }
            }
        }
    }

    // 8: the embedding of priors and slice is injective and order preserving.
    let cfg = &tapestry.config;
    let mut seen: HashMap<&LatticePoint, InformonId> = HashMap::new();
    let mut all_ids: HashMap<InformonId, &Informon> = HashMap::new();
    for n in priors.iter().chain(slice.iter()) {
        all_ids.entry(n.id).or_insert(n);
        if !cfg.contains(&n.point.x) {
            push(Rule::Axiom(8), vec![n.id], format!("site {} is outside the lattice", n.point));
        }
        match seen.get(&n.point) {
            Some(&other) if other != n.id => {
                push(Rule::Axiom(8), vec![other, n.id], format!("two informons embed at {}", n.point));
            }
            Some(_) => {}
            None => {
                seen.insert(&n.point, n.id);
            }
        }
    }
    for n in priors.iter().chain(slice.iter()) {
        for c in &n.content {
            if let Some(m) = all_ids.get(c) {
                if m.point.t >= n.point.t && *c != n.id {
                    push(
                        Rule::Axiom(8),
                        vec![*c, n.id],
                        format!("content member {c} does not embed strictly earlier than {}", n.id),
                    );
                }
            }
        }
    }

    out.sort();
    out.dedup();
    out
}

#[derive(PartialEq, Eq, Hash)]
struct BodyKey<'a> {
    point: &'a LatticePoint,
    re: u64,
    im: u64,
    tag: Option<u32>,
    content: &'a [InformonId],
}

impl<'a> BodyKey<'a> {
    fn of(n: &'a Informon) -> Self {
        BodyKey { point: &n.point, re: n.theta.re.to_bits(), im: n.theta.im.to_bits(), tag: n.tag, content: &n.content }
    }
}

/// Vertices left after peeling sources off the graph on `vertices` with
/// edges `a → b` whenever `a` is in the content of `b`. `None` when acyclic.
pub(crate) fn cyclic_part<'a>(
    vertices: &BTreeSet<InformonId>,
    lookup: impl Fn(InformonId) -> Option<&'a Informon>,
) -> Option<Vec<InformonId>> {
    let mut indegree: BTreeMap<InformonId, usize> = vertices.iter().map(|&v| (v, 0)).collect();
    let mut succ: BTreeMap<InformonId, Vec<InformonId>> = BTreeMap::new();
    for &b in vertices {
        if let Some(n) = lookup(b) {
            for &a in &n.content {
                if vertices.contains(&a) {
                    succ.entry(a).or_default().push(b);
                    *indegree.get_mut(&b).unwrap() += 1;
                }
            }
        }
    }
    let mut ready: Vec<InformonId> = indegree.iter().filter(|(_, &d)| d == 0).map(|(&v, _)| v).collect();
    while let Some(v) = ready.pop() {
        indegree.remove(&v);
        for w in succ.get(&v).into_iter().flatten() {
            let d = indegree.get_mut(w).unwrap();
            *d -= 1;
            if *d == 0 {
                ready.push(*w);
            }
        }
    }
    if indegree.is_empty() {
        None
    } else {
        Some(indegree.into_keys().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::LatticeConfig;
    use crate::tapestry::Priors;
    use num_complex::Complex64;

    fn inf(id: u64, t: i64, x: i64, content: &[u64]) -> Informon {
        Informon::new(
            InformonId(id),
            LatticePoint::new(t, vec![x]),
            Complex64::new(1.0, 0.0),
            None,
            content.iter().map(|&c| InformonId(c)).collect(),
        )
    }

    fn rules(v: &[Violation]) -> Vec<Rule> {
        let mut r: Vec<Rule> = v.iter().map(|v| v.rule).collect();
        r.dedup();
        r
    }

    #[test]
    fn empty_tapestry_is_consistent() {
        let t = CausalTapestry::empty(LatticeConfig::default(), 0);
        assert!(validate(&t, ValidationMode::Strict).is_empty());
    }

    #[test]
    fn self_content_is_axiom_five() {
        let t = CausalTapestry::new(LatticeConfig::default(), 0, vec![inf(3, 0, 0, &[3])], Priors::new());
        let v = validate(&t, ValidationMode::Lenient);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].rule, Rule::Axiom(5));
        assert_eq!(v[0].ids, vec![InformonId(3)]);
    }

    #[test]
    fn repeated_id_is_axiom_three() {
        let t = CausalTapestry::new(LatticeConfig::default(), 0, vec![inf(1, 0, 0, &[]), inf(1, 0, 4, &[])], Priors::new());
        let v = validate(&t, ValidationMode::Lenient);
        assert_eq!(rules(&v), vec![Rule::Axiom(3)]);
        assert_eq!(v[0].ids, vec![InformonId(1)]);
    }

    #[test]
    fn chain_of_slices_is_consistent() {
        let priors = Priors::new().extended(vec![inf(0, 0, 0, &[]), inf(1, 0, 1, &[])]).extended(vec![inf(2, 1, 0, &[0, 1])]);
        let t = CausalTapestry::new(LatticeConfig::default(), 2, vec![inf(3, 2, 0, &[2]), inf(4, 2, 1, &[2])], priors);
        assert!(validate(&t, ValidationMode::Strict).is_empty());
    }

    #[test]
    fn unresolved_and_same_slice_content() {
        let t = CausalTapestry::new(LatticeConfig::default(), 0, vec![inf(1, 0, 0, &[9]), inf(2, 0, 1, &[1])], Priors::new());
        let r = rules(&validate(&t, ValidationMode::Lenient));
        assert!(r.contains(&Rule::Axiom(1)));
        assert!(r.contains(&Rule::Axiom(6)));
        assert!(r.contains(&Rule::Axiom(8)));
    }

    #[test]
    fn strict_mode_checks_partial_overlap() {
        let priors = Priors::new()
            .extended(vec![inf(0, 0, 0, &[]), inf(1, 0, 1, &[])])
            .extended(vec![inf(2, 1, 0, &[0, 1])]);
        let t = CausalTapestry::new(LatticeConfig::default(), 2, vec![inf(3, 2, 0, &[0, 2])], priors);
        assert!(validate(&t, ValidationMode::Lenient).is_empty());
        assert_eq!(rules(&validate(&t, ValidationMode::Strict)), vec![Rule::Axiom(7)]);
    }

    #[test]
    fn off_slice_and_shared_site() {
        let t = CausalTapestry::new(
            LatticeConfig::default(),
            0,
            vec![inf(1, 1, 3, &[]), inf(2, 0, 0, &[]), inf(3, 0, 0, &[])],
            Priors::new(),
        );
        let r = rules(&validate(&t, ValidationMode::Lenient));
        assert_eq!(r, vec![Rule::Axiom(4), Rule::Axiom(8), Rule::SpaceLikeSlice]);
    }
}
