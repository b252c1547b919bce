//! Cardinal-series (sinc) reconstruction in one and several dimensions,
//! truncation-error estimates, and the interpolated wave built from samples.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::io::{Read, Write};

/// CODATA 2018 Planck time in seconds.
pub const PLANCK_TIME: f64 = 5.391247e-44;
/// CODATA 2018 Planck length in metres.
pub const PLANCK_LENGTH: f64 = 1.616255e-35;

#[derive(Debug, thiserror::Error)]
pub enum InterpError {
    #[error("expected a point with {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("{0}")]
    Domain(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

/// `sin(x)/x`, equal to 1 at the origin.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        // Taylor series; the next term is below f64 resolution here.
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Uniform samples `f(n/2W)` for `n` in a finite window.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleSet1D {
    /// Band limit `W`; the sample spacing is `1/(2W)`.
    pub w: f64,
    /// Index of the first sample.
    pub first: i64,
    pub values: Vec<Complex64>,
}

impl SampleSet1D {
    pub fn new(w: f64, first: i64, values: Vec<Complex64>) -> Self {
        assert!(w > 0.0, "band limit must be positive");
        SampleSet1D { w, first, values }
    }

    /// Samples `f` on the symmetric window `-n..=n`.
    pub fn sample(w: f64, n: i64, f: impl Fn(f64) -> Complex64) -> Self {
        let values = (-n..=n).map(|k| f(k as f64 / (2.0 * w))).collect();
        SampleSet1D::new(w, -n, values)
    }

    pub fn spacing(&self) -> f64 {
        1.0 / (2.0 * self.w)
    }

    pub fn indices(&self) -> impl Iterator<Item = i64> + '_ {
        (0..self.values.len() as i64).map(move |i| self.first + i)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), InterpError> {
        let mut wr = csv::Writer::from_writer(out);
        wr.write_record(["n", "re", "im"])?;
        for (n, v) in self.indices().zip(&self.values) {
            wr.serialize((n, v.re, v.im))?;
        }
        wr.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    /// Reads `n,re,im` rows. Indices must be consecutive.
    pub fn read_csv<R: Read>(w: f64, input: R) -> Result<Self, InterpError> {
        let mut rd = csv::Reader::from_reader(input);
        let mut rows: Vec<(i64, f64, f64)> = Vec::new();
        for rec in rd.deserialize() {
            rows.push(rec?);
        }
        rows.sort_by_key(|r| r.0);
        let first = rows.first().map_or(0, |r| r.0);
        for (i, r) in rows.iter().enumerate() {
            if r.0 != first + i as i64 {
                return Err(InterpError::Domain(format!("sample index {} is not consecutive", r.0)));
            }
        }
        let values = rows.iter().map(|r| Complex64::new(r.1, r.2)).collect();
        Ok(SampleSet1D::new(w, first, values))
    }
}

/// Cardinal series over the sample window.
pub fn wsk_reconstruct(s: &SampleSet1D, t: f64) -> Complex64 {
    let u = 2.0 * s.w * t;
    s.indices()
        .zip(&s.values)
        .map(|(n, v)| v * sinc(PI * (u - n as f64)))
        .sum()
}

/// Samples on a rectangular grid at positions `π k_i / σ_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleGrid {
    pub sigma: Vec<f64>,
    /// First index along each axis.
    pub first: Vec<i64>,
    pub shape: Vec<usize>,
    /// Row-major, last axis fastest.
    pub values: Vec<Complex64>,
}

impl SampleGrid {
    pub fn new(sigma: Vec<f64>, first: Vec<i64>, shape: Vec<usize>, values: Vec<Complex64>) -> Self {
        assert!(sigma.iter().all(|&s| s > 0.0), "band limits must be positive");
        assert_eq!(sigma.len(), first.len());
        assert_eq!(sigma.len(), shape.len());
        assert_eq!(shape.iter().product::<usize>(), values.len());
        SampleGrid { sigma, first, shape, values }
    }

    /// Samples `f` on the symmetric window `-n..=n` along every axis.
    pub fn sample(sigma: Vec<f64>, n: i64, f: impl Fn(&[f64]) -> Complex64) -> Self {
        let dims = sigma.len();
        let side = (2 * n + 1) as usize;
        let shape = vec![side; dims];
        let total = side.pow(dims as u32);
        let mut values = Vec::with_capacity(total);
        let mut z = vec![0.0; dims];
        for flat in 0..total {
            let mut rem = flat;
            for axis in (0..dims).rev() {
                let k = (rem % side) as i64 - n;
                rem /= side;
                z[axis] = PI * k as f64 / sigma[axis];
            }
            values.push(f(&z));
        }
        SampleGrid::new(sigma, vec![-n; dims], shape, values)
    }

    pub fn dims(&self) -> usize {
        self.sigma.len()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), InterpError> {
        let mut wr = csv::Writer::from_writer(out);
        let mut header: Vec<String> = (1..=self.dims()).map(|i| format!("k{i}")).collect();
        header.push("re".into());
        header.push("im".into());
        wr.write_record(&header)?;
        for (flat, v) in self.values.iter().enumerate() {
            let mut rec: Vec<String> = self.index_of(flat).iter().map(|k| k.to_string()).collect();
            rec.push(format!("{:?}", v.re));
            rec.push(format!("{:?}", v.im));
            wr.write_record(&rec)?;
        }
        wr.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    /// Reads `k1,..,kd,re,im` rows covering a full rectangle.
    pub fn read_csv<R: Read>(sigma: Vec<f64>, input: R) -> Result<Self, InterpError> {
        let dims = sigma.len();
        let mut rd = csv::Reader::from_reader(input);
        let mut rows: Vec<(Vec<i64>, Complex64)> = Vec::new();
        for rec in rd.records() {
            let rec = rec?;
            if rec.len() != dims + 2 {
                return Err(InterpError::DimensionMismatch { expected: dims + 2, got: rec.len() });
            }
            let parse_err = |s: &str| InterpError::Domain(format!("bad number {s:?}"));
            let mut k = Vec::with_capacity(dims);
            for i in 0..dims {
                k.push(rec[i].trim().parse::<i64>().map_err(|_| parse_err(&rec[i]))?);
            }
            let re = rec[dims].trim().parse::<f64>().map_err(|_| parse_err(&rec[dims]))?;
            let im = rec[dims + 1].trim().parse::<f64>().map_err(|_| parse_err(&rec[dims + 1]))?;
            rows.push((k, Complex64::new(re, im)));
        }
        let mut first = vec![i64::MAX; dims];
        let mut last = vec![i64::MIN; dims];
        for (k, _) in &rows {
            for i in 0..dims {
                first[i] = first[i].min(k[i]);
                last[i] = last[i].max(k[i]);
            }
        }
        if rows.is_empty() {
            return Ok(SampleGrid::new(sigma, vec![0; dims], vec![0; dims], Vec::new()));
        }
        let shape: Vec<usize> = (0..dims).map(|i| (last[i] - first[i] + 1) as usize).collect();
        let total: usize = shape.iter().product();
        if total != rows.len() {
            return Err(InterpError::Domain("grid rows do not cover a full rectangle".into()));
        }
        let mut values = vec![Complex64::new(0.0, 0.0); total];
        for (k, v) in rows {
            let mut flat = 0usize;
            for i in 0..dims {
                flat = flat * shape[i] + (k[i] - first[i]) as usize;
            }
            values[flat] = v;
        }
        Ok(SampleGrid::new(sigma, first, shape, values))
    }

    fn index_of(&self, mut flat: usize) -> Vec<i64> {
        let mut k = vec![0; self.dims()];
        for axis in (0..self.dims()).rev() {
            k[axis] = self.first[axis] + (flat % self.shape[axis]) as i64;
            flat /= self.shape[axis];
        }
        k
    }
}

/// Product-sinc series over the grid window.
pub fn parzen_reconstruct(g: &SampleGrid, z: &[f64]) -> Result<Complex64, InterpError> {
    if z.len() != g.dims() {
        return Err(InterpError::DimensionMismatch { expected: g.dims(), got: z.len() });
    }
    let factors: Vec<Vec<f64>> = (0..g.dims())
        .map(|i| {
            (0..g.shape[i])
                .map(|j| sinc(g.sigma[i] * z[i] - PI * (g.first[i] + j as i64) as f64))
                .collect()
        })
        .collect();
    let mut total = Complex64::new(0.0, 0.0);
    for (flat, v) in g.values.iter().enumerate() {
        let mut rem = flat;
        let mut weight = 1.0;
        for axis in (0..g.dims()).rev() {
            weight *= factors[axis][rem % g.shape[axis]];
            rem /= g.shape[axis];
        }
        total += v * weight;
    }
    Ok(total)
}

/// Truncation-error estimate for sampling interval `delta_t` over `[-T, T]`:
/// `(√2/π) E |sin(πt/Δt)| sqrt(TΔt / (T² − t²))`.
pub fn truncation_error_bound(energy: f64, big_t: f64, delta_t: f64, t: f64) -> Result<f64, InterpError> {
    if !(delta_t > 0.0) {
        return Err(InterpError::Domain("sampling interval must be positive".into()));
    }
    if t.abs() >= big_t {
        return Err(InterpError::Domain(format!("|t| = {} must be below T = {big_t}", t.abs())));
    }
    let shape = (big_t * delta_t / (big_t * big_t - t * t)).sqrt();
    Ok(2f64.sqrt() / PI * energy * (PI * t / delta_t).sin().abs() * shape)
}

/// `|f(t) − Σ_{|n|≤N} f(n/2W) sinc(π(2Wt − n))|`.
pub fn empirical_truncation_error(f: impl Fn(f64) -> Complex64, w: f64, n: i64, t: f64) -> f64 {
    assert!(n >= 1, "window radius must be at least 1");
    let s = SampleSet1D::sample(w, n, &f);
    (f(t) - wsk_reconstruct(&s, t)).norm()
}

/// Truncation-error magnitude for sampling at spacings `t_p`, `l_p` over an
/// observation of duration `T` and spatial size `L` (3 spatial axes):
/// `t_p l_p³ / (π⁴ T L³)`.
pub fn yao_thomas_magnitude(t_p: f64, l_p: f64, big_t: f64, big_l: f64) -> f64 {
    t_p * l_p.powi(3) / (PI.powi(4) * big_t * big_l.powi(3))
}

/// Partial sum for a function supported on `[a, b]`, sampled at `kπ/m`.
pub fn compact_support_sum(f: impl Fn(f64) -> f64, a: f64, b: f64, m: f64, t: f64) -> f64 {
    let k_lo = (a * m / PI).ceil() as i64;
    let k_hi = (b * m / PI).ceil() as i64;
    (k_lo..k_hi)
        .map(|k| {
            let tk = k as f64 * PI / m;
            f(tk) * sinc(m * (t - tk))
        })
        .sum()
}

/// Samples of one subprocess (or of the whole state) interpolated with a
/// product-sinc kernel whose width matches the sample spacing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WaveComponent {
    pub tag: Option<u32>,
    /// Sample spacing per axis.
    pub spacing: Vec<f64>,
    /// Sample coordinates, `spacing.len()` numbers per sample.
    positions: Vec<f64>,
    values: Vec<Complex64>,
}

impl WaveComponent {
    pub fn new(tag: Option<u32>, spacing: Vec<f64>) -> Self {
        WaveComponent { tag, spacing, positions: Vec::new(), values: Vec::new() }
    }

    pub fn push(&mut self, position: &[f64], value: Complex64) {
        assert_eq!(position.len(), self.spacing.len());
        self.positions.extend_from_slice(position);
        self.values.push(value);
    }

    pub fn dims(&self) -> usize {
        self.spacing.len()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn samples(&self) -> impl Iterator<Item = (&[f64], Complex64)> {
        self.positions.chunks(self.dims().max(1)).zip(self.values.iter().copied())
    }

    pub fn eval(&self, z: &[f64]) -> Complex64 {
        let d = self.dims();
        let mut total = Complex64::new(0.0, 0.0);
        for (i, v) in self.values.iter().enumerate() {
            if v.re == 0.0 && v.im == 0.0 {
                continue;
            }
            let mut w = 1.0;
            for k in 0..d {
                w *= sinc(PI * (z[k] - self.positions[i * d + k]) / self.spacing[k]);
            }
            total += v * w;
        }
        total
    }
}

/// A wave evaluated anywhere as a sum of sinc-interpolated sample sets.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct InterpolatedWave {
    components: Vec<WaveComponent>,
}

impl InterpolatedWave {
    pub fn new(components: Vec<WaveComponent>) -> Self {
        InterpolatedWave { components }
    }

    /// One component built from `(position, value)` samples.
    pub fn from_samples<'a>(
        spacing: Vec<f64>,
        samples: impl IntoIterator<Item = (&'a [f64], Complex64)>,
    ) -> Self {
        let mut c = WaveComponent::new(None, spacing);
        for (p, v) in samples {
            c.push(p, v);
        }
        InterpolatedWave { components: vec![c] }
    }

    /// Samples a function on a uniform grid `k·spacing`, `|k| ≤ n` per axis.
    pub fn sample_fn(spacing: Vec<f64>, n: i64, f: impl Fn(&[f64]) -> Complex64) -> Self {
        let dims = spacing.len();
        let mut c = WaveComponent::new(None, spacing.clone());
        let side = (2 * n + 1) as usize;
        let mut z = vec![0.0; dims];
        for flat in 0..side.pow(dims as u32) {
            let mut rem = flat;
            for axis in (0..dims).rev() {
                z[axis] = ((rem % side) as i64 - n) as f64 * spacing[axis];
                rem /= side;
            }
            c.push(&z, f(&z));
        }
        InterpolatedWave { components: vec![c] }
    }

    pub fn components(&self) -> &[WaveComponent] {
        &self.components
    }

    pub fn dims(&self) -> usize {
        self.components.first().map_or(0, |c| c.dims())
    }

    pub fn eval(&self, z: &[f64]) -> Complex64 {
        self.components.iter().map(|c| c.eval(z)).sum()
    }

    /// The partial wave carried by one subprocess tag.
    pub fn with_tag(&self, tag: u32) -> InterpolatedWave {
        InterpolatedWave {
            components: self.components.iter().filter(|c| c.tag == Some(tag)).cloned().collect(),
        }
    }

    pub fn tags(&self) -> Vec<u32> {
        let mut t: Vec<u32> = self.components.iter().filter_map(|c| c.tag).collect();
        t.sort_unstable();
        t.dedup();
        t
    }

    /// Scales every sample.
    pub fn scaled(&self, factor: Complex64) -> InterpolatedWave {
        let mut out = self.clone();
        for c in &mut out.components {
            for v in &mut c.values {
                *v *= factor;
            }
        }
        out
    }

    /// Sum of two waves (components are concatenated).
    pub fn plus(&self, other: &InterpolatedWave) -> InterpolatedWave {
        let mut components = self.components.clone();
        components.extend(other.components.iter().cloned());
        InterpolatedWave { components }
    }

    pub fn sample_count(&self) -> usize {
        self.components.iter().map(|c| c.len()).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn gaussian(t: f64) -> Complex64 {
        c((-t * t / 2.0).exp() / PI.powf(0.25))
    }

    #[test]
    fn sinc_values() {
        assert_eq!(sinc(0.0), 1.0);
        assert!(sinc(PI).abs() < 1e-15);
        assert!((sinc(PI / 2.0) - 2.0 / PI).abs() < 1e-15);
        assert!((sinc(1e-9) - 1.0).abs() < 1e-16);
    }

    #[test]
    fn wsk_cardinal_and_zero_crossing() {
        let w = 3.0;
        let mut vals = vec![c(0.0); 9];
        vals[4] = c(2.0);
        let s = SampleSet1D::new(w, -4, vals);
        assert_eq!(wsk_reconstruct(&s, 0.0), c(2.0));
        assert!(wsk_reconstruct(&s, 1.0 / (2.0 * w)).norm() < 1e-15);
    }

    #[test]
    fn wsk_gaussian_accuracy() {
        let s = SampleSet1D::sample(4.0, 64, gaussian);
        let mut worst: f64 = 0.0;
        for i in 0..=800 {
            let t = -4.0 + 8.0 * i as f64 / 800.0;
            worst = worst.max((wsk_reconstruct(&s, t) - gaussian(t)).norm());
        }
        assert!(worst < 1e-6, "sup error {worst}");
    }

    #[test]
    fn parzen_single_sample_and_separability() {
        let g = SampleGrid::new(vec![PI, PI], vec![0, 0], vec![1, 1], vec![c(1.0)]);
        assert_eq!(parzen_reconstruct(&g, &[0.0, 0.0]).unwrap(), c(1.0));
        assert!(parzen_reconstruct(&g, &[0.0]).is_err());

        let (sx, sy) = (4.0 * PI, 3.0 * PI);
        let fx = |x: f64| gaussian(x) * Complex64::new(0.0, 0.7 * x).exp();
        let fy = |y: f64| gaussian(1.3 * y);
        let grid = SampleGrid::sample(vec![sx, sy], 12, |z| fx(z[0]) * fy(z[1]));
        let sxs = SampleSet1D::sample(sx / (2.0 * PI), 12, fx);
        let sys = SampleSet1D::sample(sy / (2.0 * PI), 12, fy);
        for &(x, y) in &[(0.1, 0.2), (-0.37, 0.9), (1.4, -1.1), (0.0, 0.0)] {
            let joint = parzen_reconstruct(&grid, &[x, y]).unwrap();
            let prod = wsk_reconstruct(&sxs, x) * wsk_reconstruct(&sys, y);
            assert!((joint - prod).norm() < 1e-12);
        }
    }

    #[test]
    fn parzen_gaussian_mid_cell() {
        let sigma = vec![4.0 * PI, 4.0 * PI];
        let f = |z: &[f64]| c((-(z[0] * z[0] + z[1] * z[1]) / 2.0).exp() / PI.sqrt());
        let g = SampleGrid::sample(sigma, 40, f);
        let mut worst: f64 = 0.0;
        for i in -6..6 {
            for j in -6..6 {
                let z = [(i as f64 + 0.5) * 0.25, (j as f64 + 0.5) * 0.25];
                worst = worst.max((parzen_reconstruct(&g, &z).unwrap() - f(&z)).norm());
            }
        }
        assert!(worst < 1e-6, "mid-cell error {worst}");
    }

    #[test]
    fn truncation_bound_formula() {
        assert_eq!(truncation_error_bound(1.0, 10.0, 0.25, 0.0).unwrap(), 0.0);
        let b1 = truncation_error_bound(1.0, 10.0, 0.25, 1.1).unwrap();
        let b2 = truncation_error_bound(2.0, 10.0, 0.25, 1.1).unwrap();
        assert!((b2 - 2.0 * b1).abs() < 1e-15);
        let direct = 2f64.sqrt() / PI * (PI * 1.1 / 0.25).sin().abs() * (10.0 * 0.25 / (100.0 - 1.21f64)).sqrt();
        assert!((b1 - direct).abs() < 1e-15);
        assert!(truncation_error_bound(1.0, 1.0, 0.25, 1.0).is_err());
        assert!(truncation_error_bound(1.0, 1.0, 0.0, 0.5).is_err());
    }

    #[test]
    fn empirical_error_is_small_for_inside_signals() {
        let w = 2.0;
        let single = |t: f64| c(sinc(PI * (2.0 * w * t - 3.0)));
        assert!(empirical_truncation_error(single, w, 8, 0.37) < 1e-14);

        let mut last = f64::INFINITY;
        for n in [8, 16, 32, 64] {
            let e = empirical_truncation_error(gaussian, 4.0, n, 0.3);
            assert!(e <= last + 1e-12);
            last = e;
        }
    }

    #[test]
    fn yao_thomas_direct_arithmetic() {
        let v = yao_thomas_magnitude(PLANCK_TIME, PLANCK_LENGTH, 1.0, 1.0);
        let direct = 5.391247e-44 * 1.616255e-35f64.powi(3) / PI.powi(4);
        assert!((v / direct - 1.0).abs() < 1e-12);
        assert!(v > 2.0e-150 && v < 2.5e-150);
    }

    #[test]
    fn compact_support_converges() {
        let trapezoid = |t: f64| {
            let a = t.abs();
            if a <= 1.0 {
                1.0
            } else if a < 2.0 {
                2.0 - a
            } else {
                0.0
            }
        };
        let probes = [-1.7, -0.4, 0.3, 1.25, 1.9];
        let err = |m: f64| {
            probes
                .iter()
                .map(|&t| (compact_support_sum(trapezoid, -2.0, 2.0, m, t) - trapezoid(t)).abs())
                .fold(0.0, f64::max)
        };
        let (e1, e2, e3) = (err(8.0), err(32.0), err(128.0));
        assert!(e2 < e1 && e3 < e2, "{e1} {e2} {e3}");
    }

    #[test]
    fn csv_round_trips() {
        let s = SampleSet1D::sample(2.0, 3, |t| Complex64::new(t, -t * 0.1));
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8_lossy(&buf).starts_with("n,re,im"));
        assert_eq!(SampleSet1D::read_csv(2.0, &buf[..]).unwrap(), s);

        let g = SampleGrid::sample(vec![PI, 2.0 * PI], 2, |z| Complex64::new(z[0], z[1]));
        let mut buf = Vec::new();
        g.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8_lossy(&buf).starts_with("k1,k2,re,im"));
        assert_eq!(SampleGrid::read_csv(vec![PI, 2.0 * PI], &buf[..]).unwrap(), g);
    }

    #[test]
    fn wave_cardinality_and_tags() {
        let mut a = WaveComponent::new(Some(0), vec![0.2]);
        a.push(&[0.0], c(1.0));
        a.push(&[0.2], c(2.0));
        let mut b = WaveComponent::new(Some(1), vec![0.2]);
        b.push(&[0.1], c(5.0));
        let w = InterpolatedWave::new(vec![a, b]);
        assert_eq!(w.with_tag(0).eval(&[0.2]), c(2.0));
        assert_eq!(w.with_tag(1).eval(&[0.1]), c(5.0));
        assert_eq!(w.tags(), vec![0, 1]);
        assert_eq!(w.sample_count(), 3);
    }
}
