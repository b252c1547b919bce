//! Exact probability toys where classical additivity or the law of total
//! probability fails: block-arrangement path trees, mixtures, the LEGO box,
//! a Bell-type inequality game, the interference form of total probability
//! and region-restricted superposition weights.

use crate::interp::InterpolatedWave;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use std::fmt;

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// The four arrangements of a 2×2 block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BlockState {
    A,
    B,
    C,
    D,
}

impl BlockState {
    pub const ALL: [BlockState; 4] = [BlockState::A, BlockState::B, BlockState::C, BlockState::D];

    pub fn index(self) -> usize {
        self as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Transform {
    /// a↔b, c↔d
    Alpha,
    /// a↔c, b↔d
    Beta,
    /// a↔d, b↔c
    Gamma,
}

pub fn apply_transform(t: Transform, s: BlockState) -> BlockState {
    use BlockState::*;
    match (t, s) {
        (Transform::Alpha, A) => B,
        (Transform::Alpha, B) => A,
        (Transform::Alpha, C) => D,
        (Transform::Alpha, D) => C,
        (Transform::Beta, A) => C,
        (Transform::Beta, C) => A,
        (Transform::Beta, B) => D,
        (Transform::Beta, D) => B,
        (Transform::Gamma, A) => D,
        (Transform::Gamma, D) => A,
        (Transform::Gamma, B) => C,
        (Transform::Gamma, C) => B,
    }
}

/// Exact weights over (a, b, c, d). Not required to sum to one.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalDist(pub [BigRational; 4]);

impl RationalDist {
    pub fn zero() -> Self {
        RationalDist(std::array::from_fn(|_| BigRational::zero()))
    }

    pub fn point(s: BlockState) -> Self {
        let mut d = Self::zero();
        d.0[s.index()] = BigRational::one();
        d
    }

    /// From `(numerator, denominator)` pairs.
    pub fn from_ratios(r: [(i64, i64); 4]) -> Self {
        RationalDist(r.map(|(n, d)| q(n, d)))
    }

    pub fn total(&self) -> BigRational {
        self.0.iter().cloned().sum()
    }

    pub fn scaled(&self, w: &BigRational) -> Self {
        RationalDist(std::array::from_fn(|i| &self.0[i] * w))
    }

    pub fn plus(&self, other: &Self) -> Self {
        RationalDist(std::array::from_fn(|i| &self.0[i] + &other.0[i]))
    }

    pub fn strings(&self) -> [String; 4] {
        std::array::from_fn(|i| self.0[i].to_string())
    }
}

impl fmt::Display for RationalDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.strings().join(", "))
    }
}

/// Distribution after `depth` plays from `start`, each play applying one of
/// `generators`. Unweighted, every path counts equally; `weights` (one per
/// generator) multiply along each path instead.
pub fn level_distribution(
    generators: &[Transform],
    start: BlockState,
    depth: usize,
    weights: Option<&[BigRational]>,
) -> RationalDist {
    let n = generators.len();
    let uniform = if n == 0 { BigRational::zero() } else { q(1, n as i64) };
    let w = |i: usize| weights.map_or_else(|| uniform.clone(), |ws| ws[i].clone());
    let mut dist = RationalDist::point(start);
    for _ in 0..depth {
        let mut next = RationalDist::zero();
        for s in BlockState::ALL {
            let p = &dist.0[s.index()];
            if p.is_zero() {
                continue;
            }
            for (i, &t) in generators.iter().enumerate() {
                next.0[apply_transform(t, s).index()] += p * w(i);
            }
        }
        dist = next;
    }
    dist
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MixtureComparison {
    pub mixture: RationalDist,
    pub equal: bool,
}

/// `w1·d1 + w2·d2`, compared exactly with `actual`.
pub fn mixture_compare(
    w1: &BigRational,
    d1: &RationalDist,
    w2: &BigRational,
    d2: &RationalDist,
    actual: &RationalDist,
) -> MixtureComparison {
    let mixture = d1.scaled(w1).plus(&d2.scaled(w2));
    let equal = &mixture == actual;
    MixtureComparison { mixture, equal }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LegoResult {
    pub p0: BigRational,
    pub p1: BigRational,
    pub p2: BigRational,
    pub total: BigRational,
    /// The correction that restores a total of one.
    pub interaction: BigRational,
}

/// Four equally likely plate arrangements: empty, the 1×1 block, the 2×2
/// block, or the two coupled. Dial 0 lights on an empty plate; dial 1
/// whenever the 1×1 block is present; dial 2 whenever the 2×2 block is.
pub fn lego_demo() -> LegoResult {
    // (has 1×1, has 2×2)
    let arrangements = [(false, false), (true, false), (false, true), (true, true)];
    let quarter = q(1, arrangements.len() as i64);
    let mut p = [BigRational::zero(), BigRational::zero(), BigRational::zero()];
    for &(small, big) in &arrangements {
        let lit = [!small && !big, small, big];
        for (k, on) in lit.iter().enumerate() {
            if *on {
                p[k] += &quarter;
            }
        }
    }
    let [p0, p1, p2] = p;
    let total = &p0 + &p1 + &p2;
    let interaction = BigRational::one() - &total;
    LegoResult { p0, p1, p2, total, interaction }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BellResult {
    pub e_ab: BigRational,
    pub e_ad: BigRational,
    pub e_db: BigRational,
    /// `1 + E(d,b)`
    pub lhs: BigRational,
    /// `|E(a,d) − E(a,b)|`
    pub rhs: BigRational,
    pub violated: bool,
}

/// Measured value attached to each arrangement.
pub fn block_value(s: BlockState) -> BigRational {
    match s {
        BlockState::A => q(1, 1),
        BlockState::B => q(1, 2),
        BlockState::C => q(-1, 2),
        BlockState::D => q(-1, 1),
    }
}

/// Correlation of two blocks prepared in `x` and `y`, each then played
/// through one of the two-move games αα or γγ (equally likely) before being
/// read out.
pub fn bell_correlation(x: BlockState, y: BlockState) -> BigRational {
    let games = [[Transform::Alpha, Transform::Alpha], [Transform::Gamma, Transform::Gamma]];
    let mut sum = BigRational::zero();
    let mut count = 0i64;
    for gx in &games {
        for gy in &games {
            let fx = gx.iter().fold(x, |s, &t| apply_transform(t, s));
            let fy = gy.iter().fold(y, |s, &t| apply_transform(t, s));
            sum += block_value(fx) * block_value(fy);
            count += 1;
        }
    }
    sum / BigRational::from_integer(BigInt::from(count))
}

/// Checks `1 + E(d,b) ≥ |E(a,d) − E(a,b)|`.
pub fn bell_toy() -> BellResult {
    use BlockState::*;
    let e_ab = bell_correlation(A, B);
    let e_ad = bell_correlation(A, D);
    let e_db = bell_correlation(D, B);
    let lhs = BigRational::one() + &e_db;
    let rhs = (&e_ad - &e_ab).abs();
    let violated = lhs < rhs;
    BellResult { e_ab, e_ad, e_db, lhs, rhs, violated }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TotalProbability {
    pub kolmogorov: f64,
    pub quantum: f64,
}

/// `P(b) = Σ p(a_i) p(b|a_i)` and the same plus `2cosθ √(p(a1)p(b|a1)p(a2)p(b|a2))`.
pub fn quantum_total_probability(pa1: f64, pb_a1: f64, pa2: f64, pb_a2: f64, theta: f64) -> TotalProbability {
    let kolmogorov = pa1 * pb_a1 + pa2 * pb_a2;
    // cos(FRAC_PI_2) is 6e-17, not 0; the interference term vanishes there.
    let interference = if theta == std::f64::consts::FRAC_PI_2 {
        0.0
    } else {
        2.0 * theta.cos() * (pa1 * pb_a1 * pa2 * pb_a2).sqrt()
    };
    TotalProbability { kolmogorov, quantum: kolmogorov + interference }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegionWeights {
    /// `Re Σ_i w_i* w_j ∫_R ψ_i* ψ_j` for each j.
    pub p: Vec<f64>,
    pub total: f64,
}

/// Per-outcome weights of `Σ w_i ψ_i` restricted to `region`, by composite
/// Simpson quadrature with `panels` panels (rounded up to even).
pub fn region_weights(
    eigenfunctions: &[InterpolatedWave],
    w: &[Complex64],
    region: (f64, f64),
    panels: usize,
) -> RegionWeights {
    let n = eigenfunctions.len();
    let panels = (panels.max(2) + 1) & !1;
    let (a, b) = region;
    let h = (b - a) / panels as f64;
    let mut overlap = vec![Complex64::new(0.0, 0.0); n * n];
    for k in 0..=panels {
        let x = a + k as f64 * h;
        let c = if k == 0 || k == panels {
            1.0
        } else if k % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let vals: Vec<Complex64> = eigenfunctions.iter().map(|f| f.eval(&[x])).collect();
        for i in 0..n {
            for j in 0..n {
                overlap[i * n + j] += c * vals[i].conj() * vals[j];
            }
        }
    }
    let p: Vec<f64> = (0..n)
        .map(|j| (0..n).map(|i| (w[i].conj() * w[j] * overlap[i * n + j] * (h / 3.0)).re).sum())
        .collect();
    let total = p.iter().sum();
    RegionWeights { p, total }
}
