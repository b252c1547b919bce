//! Each consistency condition checked directly over pairs and triples of
//! informons. Slow and obvious on purpose.
//!
//! Prior identifiers are assumed distinct; where an id appears in both the
//! priors and the slice, the prior one is the one meant by content lists.

use crate::tapestry::{CausalTapestry, Informon, InformonId, Rule};
use std::collections::BTreeSet;

fn same_body(a: &Informon, b: &Informon) -> bool {
    a.point == b.point
        && a.theta.re.to_bits() == b.theta.re.to_bits()
        && a.theta.im.to_bits() == b.theta.im.to_bits()
        && a.tag == b.tag
        && a.content == b.content
}

fn contains(n: &Informon, id: InformonId) -> bool {
    n.content.contains(&id)
}

/// The set of conditions broken by the tapestry.
pub fn broken_rules(t: &CausalTapestry, strict: bool) -> BTreeSet<Rule> {
    let slice: Vec<&Informon> = t.informons.iter().collect();
    let priors: Vec<&Informon> = t.priors.iter().collect();
    let prior = |id: InformonId| priors.iter().copied().find(|p| p.id == id);
    let mut out = BTreeSet::new();

    if slice.iter().any(|n| n.point.t != t.slice_t) {
        out.insert(Rule::SpaceLikeSlice);
    }

    for n in &slice {
        for &c in &n.content {
            if c != n.id && prior(c).is_none() {
                out.insert(Rule::Axiom(1));
            }
        }
    }

    // Reachability over the union of contents, by repeated relaxation.
    let union: Vec<InformonId> = {
        let s: BTreeSet<InformonId> = slice.iter().flat_map(|n| n.content.iter().copied()).collect();
        s.into_iter().collect()
    };
    let k = union.len();
    let mut reach = vec![vec![false; k]; k];
    for (bi, &b) in union.iter().enumerate() {
        if let Some(pb) = prior(b) {
            for (ai, &a) in union.iter().enumerate() {
                if contains(pb, a) {
                    reach[ai][bi] = true;
                }
            }
        }
    }
    for m in 0..k {
        for i in 0..k {
            if reach[i][m] {
                for j in 0..k {
                    if reach[m][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
    }
    if (0..k).any(|i| reach[i][i]) {
        out.insert(Rule::Axiom(2));
    }

    for (i, a) in slice.iter().enumerate() {
        for b in &slice[i + 1..] {
            if a.id == b.id && !same_body(a, b) {
                out.insert(Rule::Axiom(3));
            }
            if a.id != b.id && same_body(a, b) {
                out.insert(Rule::Axiom(4));
            }
        }
        if let Some(p) = prior(a.id) {
            if !same_body(a, p) {
                out.insert(Rule::Axiom(3));
            }
        }
        if contains(a, a.id) {
            out.insert(Rule::Axiom(5));
        }
    }

    for a in &slice {
        for b in &slice {
            if a.id != b.id && contains(b, a.id) {
                out.insert(Rule::Axiom(6));
            }
        }
    }

    if strict {
        for n in &slice {
            for &gid in &n.content {
                if let Some(g) = prior(gid) {
                    let inside = g.content.iter().filter(|&&m| contains(n, m)).count();
                    if inside != 0 && inside != g.content.len() {
                        out.insert(Rule::Axiom(7));
                    }
                }
            }
        }
    }

    let all: Vec<&Informon> = priors.iter().chain(slice.iter()).copied().collect();
    let first = |id: InformonId| all.iter().copied().find(|n| n.id == id);
    for (i, a) in all.iter().enumerate() {
        if !t.config.contains(&a.point.x) {
            out.insert(Rule::Axiom(8));
        }
        for b in &all[i + 1..] {
            if a.id != b.id && a.point == b.point {
                out.insert(Rule::Axiom(8));
            }
        }
        for &c in &a.content {
            if c != a.id {
                if let Some(m) = first(c) {
                    if m.point.t >= a.point.t {
                        out.insert(Rule::Axiom(8));
                    }
                }
            }
        }
    }
    out
}
