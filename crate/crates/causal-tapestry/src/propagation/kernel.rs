//! Per-axis tables of single-step token factors.
//!
//! The straight-line token `(h/A) e^{i m u²/(2ħ dt)}` oscillates faster than
//! the lattice can resolve once `|u|` passes `πħ dt/(m h)`; summed over a
//! lattice it aliases into spurious copies of the wave. The default model
//! uses the same free kernel restricted to the lattice band `|k| ≤ π/h`,
//! which is the exact one-step propagator for band-limited samples, and
//! tapers it smoothly to zero at a finite radius.

use num_complex::Complex64;
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum KernelModel {
    /// Free kernel projected onto the lattice band.
    #[default]
    BandLimited,
    /// Raw straight-line token, truncated by its window.
    StraightLine,
}

/// Radial cutoff applied to token factors, in length units.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Window {
    /// 1 up to `flat`, C∞ fall-off to 0 at `cutoff`.
    Smooth { flat: f64, cutoff: f64 },
    /// 1 up to and including `radius`, 0 beyond.
    Hard { radius: f64 },
}

impl Window {
    pub fn weight(&self, u: f64) -> f64 {
        let a = u.abs();
        match *self {
            Window::Hard { radius } => {
                if a <= radius * (1.0 + 1e-12) {
                    1.0
                } else {
                    0.0
                }
            }
            Window::Smooth { flat, cutoff } => {
                if a <= flat {
                    1.0
                } else if a >= cutoff {
                    0.0
                } else {
                    let s = (a - flat) / (cutoff - flat);
                    let g = |z: f64| if z > 0.0 { (-1.0 / z).exp() } else { 0.0 };
                    g(1.0 - s) / (g(1.0 - s) + g(s))
                }
            }
        }
    }

    pub fn reach(&self) -> f64 {
        match *self {
            Window::Hard { radius } => radius,
            Window::Smooth { cutoff, .. } => cutoff,
        }
    }
}

/// `(1/2π) ∫_{-π/h}^{π/h} e^{iku − iħk²dt/(2m)} dk`, by composite Simpson.
pub fn band_limited_kernel(u: f64, dt: f64, spacing: f64, hbar: f64, mass: f64) -> Complex64 {
    let beta = hbar * dt / (2.0 * mass);
    let band = PI / spacing;
    // The integrand is even in k; integrate cos(ku) e^{-iβk²} over [0, band].
    let max_rate = u.abs() + 2.0 * beta * band;
    let panels = (((band * max_rate) / 0.01).ceil() as usize).max(512);
    let panels = panels + panels % 2;
    let step = band / panels as f64;
    let f = |k: f64| Complex64::from_polar((k * u).cos(), -beta * k * k);
    let mut acc = f(0.0) + f(band);
    for j in 1..panels {
        let w = if j % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(j as f64 * step);
    }
    acc * (step / 3.0) / PI
}

/// Token factors along one axis, indexed by site offset.
#[derive(Clone, Debug, PartialEq)]
pub struct AxisKernel {
    pub spacing: f64,
    pub window: Window,
    radius: usize,
    taps: Vec<Complex64>,
}

impl AxisKernel {
    /// Default window for a model at the given spacing.
    pub fn default_window(model: KernelModel, dt: f64, spacing: f64, hbar: f64, mass: f64) -> Window {
        match model {
            KernelModel::BandLimited => {
                let nyquist_radius = PI * hbar * dt / (mass * spacing);
                let cutoff = (3.0 * nyquist_radius).max(48.0 * spacing);
                Window::Smooth { flat: 2.0 * cutoff / 3.0, cutoff }
            }
            KernelModel::StraightLine => {
                let kernel_length = (2.0 * PI * hbar * dt / mass).sqrt();
                Window::Hard { radius: 8.0 * kernel_length }
            }
        }
    }

    /// Offsets beyond `max_offset` are never needed (the lattice diameter).
    pub fn new(
        model: KernelModel,
        dt: f64,
        spacing: f64,
        hbar: f64,
        mass: f64,
        window: Option<Window>,
        max_offset: usize,
    ) -> Self {
        let window = window.unwrap_or_else(|| Self::default_window(model, dt, spacing, hbar, mass));
        let reach = (window.reach() / spacing * (1.0 + 1e-12)).floor();
        let radius = if reach >= max_offset as f64 { max_offset } else { reach as usize };
        let a = Complex64::new(0.0, 2.0 * PI * hbar * dt / mass).sqrt();
        let taps = (-(radius as i64)..=radius as i64)
            .map(|d| {
                let u = d as f64 * spacing;
                let w = window.weight(u);
                if w == 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                let raw = match model {
                    KernelModel::BandLimited => spacing * band_limited_kernel(u, dt, spacing, hbar, mass),
                    KernelModel::StraightLine => (spacing / a) * Complex64::from_polar(1.0, mass * u * u / (2.0 * hbar * dt)),
                };
                raw * w
            })
            .collect();
        AxisKernel { spacing, window, radius, taps }
    }

    /// Largest offset with a (possibly) nonzero factor.
    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn tap(&self, offset: i64) -> Complex64 {
        let i = offset + self.radius as i64;
        if i < 0 || i as usize >= self.taps.len() {
            Complex64::new(0.0, 0.0)
        } else {
            self.taps[i as usize]
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn windows() {
        let w = Window::Smooth { flat: 1.0, cutoff: 2.0 };
        assert_eq!(w.weight(0.5), 1.0);
        assert_eq!(w.weight(-2.5), 0.0);
        assert!((w.weight(1.5) - 0.5).abs() < 1e-15);
        assert!(w.weight(1.2) > w.weight(1.8));
        let h = Window::Hard { radius: 1.0 };
        assert_eq!((h.weight(1.0), h.weight(1.01)), (1.0, 0.0));
    }

    #[test]
    fn wide_band_kernel_approaches_fresnel() {
        // With the band far beyond the stationary point the projection is
        // the plain free kernel, up to an oscillating endpoint term.
        let (dt, hbar, mass) = (0.05, 1.0, 1.0);
        let u = 0.3;
        let fresnel = Complex64::new(0.0, mass * u * u / (2.0 * hbar * dt)).exp()
            / Complex64::new(0.0, 2.0 * PI * hbar * dt / mass).sqrt();
        let bl = band_limited_kernel(u, dt, 0.005, hbar, mass);
        assert!((bl - fresnel).norm() / fresnel.norm() < 0.02, "{bl} vs {fresnel}");
    }

    #[test]
    fn zero_time_limit_is_sinc() {
        // As dt → 0 the projected kernel tends to sin(πu/h)/(πu).
        let h = 0.1;
        for &u in &[0.0, 0.05, 0.1, 0.37] {
            let got = band_limited_kernel(u, 1e-9, h, 1.0, 1.0);
            let sinc = if u == 0.0 { 1.0 / h } else { (PI * u / h).sin() / (PI * u) };
            assert!((got.re - sinc).abs() < 1e-6 && got.im.abs() < 1e-5, "u={u}: {got}");
        }
    }

    #[test]
    fn taps_conserve_mass_of_constant() {
        // A flat plane wave at k = 0 is unchanged by one step.
        let k = AxisKernel::new(KernelModel::BandLimited, 0.05, 0.1, 1.0, 1.0, None, 1000);
        let total: Complex64 = (-(k.radius() as i64)..=k.radius() as i64).map(|d| k.tap(d)).sum();
        assert!((total - Complex64::new(1.0, 0.0)).norm() < 1e-3, "{total}");
        assert_eq!(k.radius(), 48);
    }

    #[test]
    fn straight_line_taps_match_formula() {
        let k = AxisKernel::new(KernelModel::StraightLine, 0.05, 0.1, 1.0, 1.0, None, 1000);
        let a = Complex64::new(0.0, 2.0 * PI * 0.05).sqrt();
        let expect = (0.1 / a) * Complex64::from_polar(1.0, 0.9);
        assert!((k.tap(3) - expect).norm() < 1e-14);
        assert_eq!(k.radius(), (8.0 * (2.0 * PI * 0.05f64).sqrt() / 0.1).floor() as usize);
    }
}
