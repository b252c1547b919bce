//! Reference answers computed without the engine: closed-form free
//! evolution, direct quadrature of the continuum kernel, brute-force path
//! enumeration and brute-force axiom checks. Nothing here calls into
//! `propagation`, `measurement` or `scenarios`.

pub mod axioms;

use num_complex::Complex64;
use std::f64::consts::PI;

/// Free Gaussian packet `ψ(x, t)` with initial width `sigma0`, centre `x0`
/// and wave number `k0`, normalized to one.
pub fn free_gaussian(x: f64, t: f64, sigma0: f64, x0: f64, k0: f64, hbar: f64, mass: f64) -> Complex64 {
    let a = Complex64::new(1.0, hbar * t / (2.0 * mass * sigma0 * sigma0));
    let shift = x - x0 - hbar * k0 * t / mass;
    let expo = -shift * shift / (4.0 * sigma0 * sigma0 * a)
        + Complex64::new(0.0, k0 * (x - x0) - hbar * k0 * k0 * t / (2.0 * mass));
    (2.0 * PI * sigma0 * sigma0).powf(-0.25) / a.sqrt() * expo.exp()
}

/// `σ(t) = σ0 √(1 + (ħt/(2mσ0²))²)`.
pub fn spreading_width(sigma0: f64, t: f64, hbar: f64, mass: f64) -> f64 {
    let r = hbar * t / (2.0 * mass * sigma0 * sigma0);
    sigma0 * (1.0 + r * r).sqrt()
}

/// Continuum free propagator `√(m/(2πiħt)) e^{imu²/(2ħt)}`.
pub fn fresnel_kernel(u: f64, t: f64, hbar: f64, mass: f64) -> Complex64 {
    let norm = Complex64::new(0.0, 2.0 * PI * hbar * t / mass).sqrt().inv();
    norm * Complex64::from_polar(1.0, mass * u * u / (2.0 * hbar * t))
}

/// Composite Simpson over `[a, b]` with at least `panels` panels.
pub fn simpson<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, panels: usize) -> Complex64 {
    let n = (panels.max(2) + 1) & !1;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for j in 1..n {
        acc += f(a + j as f64 * h) * if j % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * (h / 3.0)
}

/// `∫_lo^hi K(y − x, t) f(x) dx` with the panel width chosen so the kernel
/// phase moves by at most 0.05 rad per panel.
pub fn fresnel_apply(f: impl Fn(f64) -> Complex64, y: f64, t: f64, hbar: f64, mass: f64, lo: f64, hi: f64) -> Complex64 {
    let reach = (y - lo).abs().max((y - hi).abs()).max(1e-9);
    let width = 0.05 * hbar * t / (mass * reach);
    let panels = (((hi - lo) / width).ceil() as usize).max(2000);
    simpson(|x| fresnel_kernel(y - x, t, hbar, mass) * f(x), lo, hi, panels)
}

/// One term `w Π_axis ψ(x_axis)` of a Gaussian superposition.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianTerm {
    pub weight: Complex64,
    pub sigma: Vec<f64>,
    pub x0: Vec<f64>,
    pub k0: Vec<f64>,
}

/// `Σ w Π_axis ψ_free` at time `t`.
pub fn free_superposition(x: &[f64], t: f64, terms: &[GaussianTerm], hbar: f64, mass: f64) -> Complex64 {
    terms
        .iter()
        .map(|g| {
            x.iter().enumerate().fold(g.weight, |acc, (i, &xi)| acc * free_gaussian(xi, t, g.sigma[i], g.x0[i], g.k0[i], hbar, mass))
        })
        .sum()
}

/// Transverse two-slit arrangement in the paraxial picture: a Gaussian of
/// width `sigma` centred on the axis travels for `t1` to the slit plane,
/// only the slit intervals pass, and the rest travels for `t2`.
#[derive(Clone, Debug)]
pub struct TwoSlitOracle {
    pub sigma: f64,
    pub t1: f64,
    pub t2: f64,
    pub slits: Vec<(f64, f64)>,
    pub hbar: f64,
    pub mass: f64,
}

impl TwoSlitOracle {
    /// Wave just past the slit plane, on `points` nodes per slit.
    fn at_slits(&self, points: usize) -> Vec<(f64, f64, Complex64)> {
        let (s, hb, m) = (self.sigma, self.hbar, self.mass);
        let src = |x: f64| free_gaussian(x, 0.0, s, 0.0, 0.0, hb, m);
        let (lo, hi) = (-12.0 * s, 12.0 * s);
        let mut out = Vec::new();
        for &(a, b) in &self.slits {
            let n = (points.max(2) + 1) & !1;
            let h = (b - a) / n as f64;
            for j in 0..=n {
                let y = a + j as f64 * h;
                let w = h / 3.0 * if j == 0 || j == n { 1.0 } else if j % 2 == 1 { 4.0 } else { 2.0 };
                out.push((y, w, fresnel_apply(src, y, self.t1, hb, m, lo, hi)));
            }
        }
        out
    }

    /// Amplitude on the detector plane at each of `ys`.
    pub fn detector_amplitude(&self, ys: &[f64], points_per_slit: usize) -> Vec<Complex64> {
        let mid = self.at_slits(points_per_slit);
        ys.iter()
            .map(|&y| mid.iter().map(|&(yp, w, v)| w * fresnel_kernel(y - yp, self.t2, self.hbar, self.mass) * v).sum())
            .collect()
    }

    /// Detection probabilities of cells `[edges[i], edges[i+1]]`, normalized
    /// to sum to one.
    pub fn cell_probabilities(&self, edges: &[f64]) -> Vec<f64> {
        let sub = 16usize;
        let mut ys = Vec::new();
        for w in edges.windows(2) {
            for j in 0..=sub {
                ys.push(w[0] + (w[1] - w[0]) * j as f64 / sub as f64);
            }
        }
        let amp = self.detector_amplitude(&ys, 700);
        let mut cells: Vec<f64> = amp
            .chunks(sub + 1)
            .zip(edges.windows(2))
            .map(|(a, w)| {
                let h = (w[1] - w[0]) / sub as f64;
                let dens: Vec<f64> = a.iter().map(|z| z.norm_sqr()).collect();
                let mut acc = dens[0] + dens[sub];
                for (j, d) in dens.iter().enumerate().take(sub).skip(1) {
                    acc += d * if j % 2 == 1 { 4.0 } else { 2.0 };
                }
                acc * h / 3.0
            })
            .collect();
        let total: f64 = cells.iter().sum();
        for c in &mut cells {
            *c /= total;
        }
        cells
    }
}

/// Distribution over four block states after every one of the `n^depth`
/// generator sequences, counted one path at a time. `perms[g][s]` is the
/// state reached from `s` under generator `g`.
pub fn path_count_distribution(perms: &[[usize; 4]], start: usize, depth: u32) -> ([u64; 4], u64) {
    let n = perms.len() as u64;
    let total = n.pow(depth);
    let mut counts = [0u64; 4];
    for path in 0..total {
        let mut code = path;
        let mut s = start;
        for _ in 0..depth {
            s = perms[(code % n) as usize][s];
            code /= n;
        }
        counts[s] += 1;
    }
    (counts, total)
}

/// Total variation distance between two distributions on the same cells.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_matches_quadrature_of_kernel() {
        let (t, hb, m) = (0.7, 1.0, 1.0);
        let f = |x: f64| free_gaussian(x, 0.0, 1.0, 0.5, 1.5, hb, m);
        for &y in &[-1.0, 0.3, 2.2] {
            let q = fresnel_apply(f, y, t, hb, m, -12.0, 13.0);
            let exact = free_gaussian(y, t, 1.0, 0.5, 1.5, hb, m);
            assert!((q - exact).norm() < 1e-9, "{y}: {q} vs {exact}");
        }
    }

    #[test]
    fn width_grows() {
        assert_eq!(spreading_width(1.0, 0.0, 1.0, 1.0), 1.0);
        assert!((spreading_width(1.0, 2.0, 1.0, 1.0) - 2f64.sqrt()).abs() < 1e-15);
        let dx = 0.01;
        let norm: f64 = (-3000..=3000).map(|k| free_gaussian(k as f64 * dx, 3.0, 1.0, 0.0, 2.0, 1.0, 1.0).norm_sqr() * dx).sum();
        assert!((norm - 1.0).abs() < 1e-10);
    }

    #[test]
    fn path_counts() {
        let alpha = [1, 0, 3, 2];
        let beta = [2, 3, 0, 1];
        let (c, n) = path_count_distribution(&[alpha, beta], 0, 2);
        assert_eq!((c, n), ([2, 0, 0, 2], 4));
    }

    #[test]
    fn single_slit_pair_is_symmetric() {
        let o = TwoSlitOracle { sigma: 2.0, t1: 8.0, t2: 6.0, slits: vec![(2.125, 3.875), (-3.875, -2.125)], hbar: 1.0, mass: 1.0 };
        let edges: Vec<f64> = (0..=16).map(|i| -20.0 + 2.5 * i as f64).collect();
        let p = o.cell_probabilities(&edges);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for i in 0..8 {
            assert!((p[i] - p[15 - i]).abs() < 1e-9);
        }
    }
}
