//! JSON form of a tapestry.

use super::{CausalTapestry, Informon, InformonId, Priors, SiteLayout};
use crate::lattice::{LatticeConfig, LatticePoint};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InformonRecord {
    pub id: u64,
    pub t: i64,
    pub x: Vec<i64>,
    pub theta: [f64; 2],
    #[serde(default)]
    pub tag: Option<u32>,
    #[serde(default)]
    pub content: Vec<u64>,
}

impl From<&Informon> for InformonRecord {
    fn from(n: &Informon) -> Self {
        InformonRecord {
            id: n.id.0,
            t: n.point.t,
            x: n.point.x.clone(),
            theta: [n.theta.re, n.theta.im],
            tag: n.tag,
            content: n.content.iter().map(|c| c.0).collect(),
        }
    }
}

impl From<&InformonRecord> for Informon {
    fn from(r: &InformonRecord) -> Self {
        Informon::new(
            InformonId(r.id),
            LatticePoint::new(r.t, r.x.clone()),
            Complex64::new(r.theta[0], r.theta[1]),
            r.tag,
            r.content.iter().map(|&c| InformonId(c)).collect(),
        )
    }
}

fn is_full(layout: &SiteLayout) -> bool {
    *layout == SiteLayout::Full
}

/// `{config, slice_t, informons[, priors, layout]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TapestryDocument {
    pub config: LatticeConfig,
    pub slice_t: i64,
    pub informons: Vec<InformonRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub priors: Vec<InformonRecord>,
    #[serde(default, skip_serializing_if = "is_full")]
    pub layout: SiteLayout,
}

impl TapestryDocument {
    pub fn from_tapestry(t: &CausalTapestry, include_priors: bool) -> Self {
        TapestryDocument {
            config: t.config.clone(),
            slice_t: t.slice_t,
            informons: t.informons.iter().map(InformonRecord::from).collect(),
            priors: if include_priors { t.priors.iter().map(InformonRecord::from).collect() } else { Vec::new() },
            layout: t.layout.clone(),
        }
    }

    pub fn into_tapestry(&self) -> CausalTapestry {
        let priors = Priors::from_informons(self.priors.iter().map(Informon::from).collect());
        CausalTapestry::new(self.config.clone(), self.slice_t, self.informons.iter().map(Informon::from).collect(), priors)
            .with_layout(self.layout.clone())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("tapestry documents always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let cfg = LatticeConfig::default();
        let priors = Priors::new().extended(vec![Informon::new(
            InformonId(0),
            LatticePoint::new(0, vec![0]),
            Complex64::new(0.1, 1e-300),
            Some(2),
            vec![],
        )]);
        let t = CausalTapestry::new(
            cfg,
            1,
            vec![Informon::new(InformonId(1), LatticePoint::new(1, vec![-7]), Complex64::new(std::f64::consts::PI, -2.5e-17), Some(2), vec![InformonId(0)])],
            priors,
        )
        .with_layout(SiteLayout::Interleaved { tags: vec![2, 3] });
        let doc = TapestryDocument::from_tapestry(&t, true);
        let back = TapestryDocument::from_json(&doc.to_json()).unwrap();
        assert_eq!(back, doc);
        let t2 = back.into_tapestry();
        assert_eq!(t2.informons, t.informons);
        assert_eq!(t2.priors.iter().cloned().collect::<Vec<_>>(), t.priors.iter().cloned().collect::<Vec<_>>());
        assert_eq!(t2.layout, t.layout);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = r#"{"config":{"dt":0.05,"dx":0.1,"dims":1,"extent":4},"slice_t":0,"informons":[],"foo":1}"#;
        assert!(TapestryDocument::from_json(text).is_err());
        let ok = r#"{"config":{"dt":0.05,"dx":0.1,"dims":1,"extent":4},"slice_t":0,"informons":[]}"#;
        assert!(TapestryDocument::from_json(ok).is_ok());
    }
}
