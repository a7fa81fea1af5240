//! Process-level checks: spectral density, covariance by quadrature, sample
//! paths from the spectral representation, scaling and time-reversal tests,
//! and the complex Gamma function.

use std::collections::BTreeMap;
use std::io::Write;

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matfun::{mat_power, to_rows, ComplexMatrix, RealMatrix};
use crate::params::SpectralParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureConfig {
    /// End of the oscillatory region; beyond it only the non-oscillating
    /// part of the kernel is integrated.
    pub x_max: f64,
    /// Panels per region on each side of `singularity_split`.
    pub panels: usize,
    pub nodes_per_panel: usize,
    pub singularity_split: f64,
    /// Rescale so that `tr Γ(1,1) = n`.
    pub normalize: bool,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self { x_max: 1e4, panels: 40, nodes_per_panel: 32, singularity_split: 1.0, normalize: false }
    }
}

impl QuadratureConfig {
    /// Coarser grid used for Monte Carlo synthesis.
    pub fn monte_carlo() -> Self {
        Self { x_max: 1e3, nodes_per_panel: 16, ..Self::default() }
    }

    pub fn check(&self) -> Result<()> {
        if !(self.singularity_split > 0.0 && self.x_max > self.singularity_split && self.x_max.is_finite()) {
            return Err(Error::Domain(format!(
                "need x_max > singularity_split > 0, got {} and {}",
                self.x_max, self.singularity_split
            )));
        }
        if self.panels == 0 || self.nodes_per_panel == 0 {
            return Err(Error::Domain("panels and nodes_per_panel must be at least 1".into()));
        }
        Ok(())
    }
}

/// `F(x) = x₊^{−D}A + x₋^{−D}Ā`.
fn spectral_factor(p: &SpectralParams, x: f64) -> Result<ComplexMatrix> {
    if x == 0.0 || !x.is_finite() {
        return Err(Error::Domain(format!("spectral density needs finite nonzero x, got {x}")));
    }
    let g = mat_power(&(-&p.d), x.abs())?;
    let a = if x > 0.0 { p.a.clone() } else { p.a.conj() };
    Ok(a.left_real(&g))
}

/// `F(x)F(x)*`, Hermitian positive semidefinite.
pub fn spectral_density(p: &SpectralParams, x: f64) -> Result<ComplexMatrix> {
    let f = spectral_factor(p, x)?;
    Ok(f.mul(&f.adjoint()))
}

/// `e^{iθ} − 1` without cancellation.
fn expm1i(theta: f64) -> (f64, f64) {
    let s = (0.5 * theta).sin();
    (-2.0 * s * s, theta.sin())
}

/// Gauss–Legendre rule on `[−1, 1]`.
fn gl_rule(k: usize) -> Vec<(f64, f64)> {
    if k == 1 {
        return vec![(0.0, 2.0)];
    }
    GaussLegendre::new(k).map(|g| g.as_node_weight_pairs().to_vec()).unwrap_or_else(|_| vec![(0.0, 2.0)])
}

/// Nodes on `[a, b]` in the variable `u = ln x`, weights include `dx = x du`.
fn log_panels(a: f64, b: f64, count: usize, rule: &[(f64, f64)], out: &mut Vec<(f64, f64)>) {
    let (la, lb) = (a.ln(), b.ln());
    let h = (lb - la) / count as f64;
    for i in 0..count {
        let (u0, u1) = (la + h * i as f64, la + h * (i + 1) as f64);
        for &(z, w) in rule {
            let x = (0.5 * ((u1 - u0) * z + u1 + u0)).exp();
            out.push((x, 0.5 * (u1 - u0) * w * x));
        }
    }
}

/// Log-spaced panels on `[a, b]`, each split into equal pieces of width at
/// most `24/ω` so no piece spans more than about four periods.
fn oscillatory_panels(a: f64, b: f64, count: usize, omega: f64, rule: &[(f64, f64)], out: &mut Vec<(f64, f64)>) {
    let r = (b / a).powf(1.0 / count as f64);
    let mut lo = a;
    for i in 0..count {
        let hi = if i + 1 == count { b } else { lo * r };
        let pieces = ((omega * (hi - lo) / 24.0).ceil() as usize).max(1);
        let h = (hi - lo) / pieces as f64;
        for j in 0..pieces {
            let (x0, x1) = (lo + h * j as f64, lo + h * (j + 1) as f64);
            for &(z, w) in rule {
                out.push((0.5 * ((x1 - x0) * z + x1 + x0), 0.5 * (x1 - x0) * w));
            }
        }
        lo = hi;
    }
}

/// Quadrature nodes and densities for `x > 0`, together with the mirrored
/// densities at `−x`.
#[derive(Debug, Clone)]
pub struct CovarianceEngine {
    pub n: usize,
    /// Largest `|t|` the oscillatory grid resolves.
    pub t_max: f64,
    pub scale: f64,
    main: Vec<(f64, f64)>,
    tail: Vec<(f64, f64)>,
    /// `F(x)` at the main nodes, used by the simulator.
    factors: Vec<ComplexMatrix>,
    pos: Vec<ComplexMatrix>,
    neg: Vec<ComplexMatrix>,
    tail_sum: Vec<RealMatrix>,
}

#[derive(Debug, Clone)]
pub struct CovarianceValue {
    pub gamma: RealMatrix,
    /// `‖Im Γ‖ / ‖Re Γ‖` before discarding the imaginary part.
    pub imag_residue: f64,
    pub warning: Option<String>,
}

/// Relative imaginary residue above which a covariance value is flagged.
pub const IMAG_RESIDUE_WARN: f64 = 1e-8;

impl CovarianceEngine {
    pub fn new(p: &SpectralParams, q: QuadratureConfig, t_max: f64) -> Result<Self> {
        q.check()?;
        if !p.in_domain {
            return Err(Error::Domain(format!(
                "covariance needs eigenvalues of D with real part in (-1/2, 1/2), got {:?}",
                p.d_eig_re
            )));
        }
        let t_max = t_max.abs().max(1.0);
        let d_max = p.d_eig_re.last().copied().unwrap_or(0.0);
        let d_min = p.d_eig_re.first().copied().unwrap_or(0.0);
        let rule = gl_rule(q.nodes_per_panel);
        let split = q.singularity_split;

        // the integrand behaves like x^{-2 d_max} near zero
        let x_lo = (10f64.powf(-7.0 / (1.0 - 2.0 * d_max))).max(1e-60).min(split * 1e-3);
        let mut main = Vec::new();
        log_panels(x_lo, split, q.panels, &rule, &mut main);
        oscillatory_panels(split, q.x_max, q.panels, 2.0 * t_max, &rule, &mut main);

        // and like x^{-2-2 d_min} at infinity
        let x_far = (q.x_max * 10f64.powf(9.0 / (1.0 + 2.0 * d_min))).min(1e150);
        let decades = ((x_far / q.x_max).log10().ceil() as usize).max(1);
        let mut tail = Vec::new();
        log_panels(q.x_max, x_far, decades, &rule, &mut tail);

        let factors: Vec<ComplexMatrix> =
            main.par_iter().map(|&(x, _)| spectral_factor(p, x)).collect::<Result<_>>()?;
        let pos: Vec<ComplexMatrix> = factors.par_iter().map(|f| f.mul(&f.adjoint())).collect();
        let neg: Vec<ComplexMatrix> =
            main.par_iter().map(|&(x, _)| spectral_density(p, -x)).collect::<Result<_>>()?;
        let tail_sum: Vec<RealMatrix> = tail
            .par_iter()
            .map(|&(x, _)| Ok(spectral_density(p, x)?.re + spectral_density(p, -x)?.re))
            .collect::<Result<_>>()?;

        let mut e = Self { n: p.n, t_max, scale: 1.0, main, tail, factors, pos, neg, tail_sum };
        if q.normalize {
            let g = e.evaluate(1.0, 1.0)?.gamma;
            let tr = g.trace();
            if !(tr > 0.0) {
                return Err(Error::Numeric(format!("cannot normalize: tr Γ(1,1) = {tr:e}")));
            }
            e.scale = p.n as f64 / tr;
        }
        Ok(e)
    }

    pub fn node_count(&self) -> usize {
        self.main.len() + self.tail.len()
    }

    /// `Γ(t,s) = ∫ (e^{itx}−1)(e^{−isx}−1)/x² · density(x) dx`.
    pub fn evaluate(&self, t: f64, s: f64) -> Result<CovarianceValue> {
        let n = self.n;
        if t == 0.0 || s == 0.0 {
            return Ok(CovarianceValue { gamma: RealMatrix::zeros(n, n), imag_residue: 0.0, warning: None });
        }
        if t.abs() > self.t_max * (1.0 + 1e-12) || s.abs() > self.t_max * (1.0 + 1e-12) {
            return Err(Error::Precondition(format!(
                "time {} outside the resolved range |t| <= {}",
                t.abs().max(s.abs()),
                self.t_max
            )));
        }
        let mut re = RealMatrix::zeros(n, n);
        let mut im = RealMatrix::zeros(n, n);
        for (k, &(x, w)) in self.main.iter().enumerate() {
            let (ar, ai) = expm1i(t * x);
            let (br, bi) = expm1i(s * x);
            // (e^{itx}−1)·conj(e^{isx}−1)/x², and its conjugate at −x
            let c = w / (x * x);
            let kr = (ar * br + ai * bi) * c;
            let ki = (ai * br - ar * bi) * c;
            let (fp, fm) = (&self.pos[k], &self.neg[k]);
            re += (&fp.re + &fm.re) * kr - (&fp.im - &fm.im) * ki;
            im += (&fp.im + &fm.im) * kr + (&fp.re - &fm.re) * ki;
        }
        let c0 = if t == s { 2.0 } else { 1.0 };
        for (k, &(x, w)) in self.tail.iter().enumerate() {
            re += &self.tail_sum[k] * (c0 * w / (x * x));
        }
        re *= self.scale;
        im *= self.scale;
        let imag_residue = im.norm() / re.norm().max(f64::MIN_POSITIVE);
        let warning = (imag_residue > IMAG_RESIDUE_WARN)
            .then(|| format!("covariance at ({t}, {s}) has relative imaginary residue {imag_residue:e}"));
        Ok(CovarianceValue { gamma: re, imag_residue, warning })
    }

    pub fn gamma(&self, t: f64, s: f64) -> Result<RealMatrix> {
        Ok(self.evaluate(t, s)?.gamma)
    }
}

pub fn covariance(p: &SpectralParams, t: f64, s: f64, q: QuadratureConfig) -> Result<RealMatrix> {
    CovarianceEngine::new(p, q, t.abs().max(s.abs()))?.gamma(t, s)
}

#[derive(Debug, Clone)]
pub struct CovarianceGrid {
    pub times: Vec<f64>,
    pub values: BTreeMap<(usize, usize), RealMatrix>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CovarianceGridJson {
    pub times: Vec<f64>,
    pub gamma: BTreeMap<String, Vec<Vec<f64>>>,
}

impl CovarianceGrid {
    pub fn compute(engine: &CovarianceEngine, times: &[f64]) -> Result<Self> {
        let pairs: Vec<(usize, usize)> =
            (0..times.len()).flat_map(|i| (0..times.len()).map(move |j| (i, j))).collect();
        let vals: Vec<RealMatrix> =
            pairs.par_iter().map(|&(i, j)| engine.gamma(times[i], times[j])).collect::<Result<_>>()?;
        Ok(Self { times: times.to_vec(), values: pairs.into_iter().zip(vals).collect() })
    }

    /// Stacked `(n·T) × (n·T)` matrix with blocks `Γ(tᵢ, tⱼ)`.
    pub fn block_matrix(&self) -> RealMatrix {
        let t = self.times.len();
        let n = self.values.values().next().map_or(0, |m| m.nrows());
        let mut out = RealMatrix::zeros(n * t, n * t);
        for (&(i, j), m) in &self.values {
            out.view_mut((i * n, j * n), (n, n)).copy_from(m);
        }
        out
    }

    pub fn to_json(&self) -> CovarianceGridJson {
        CovarianceGridJson {
            times: self.times.clone(),
            gamma: self.values.iter().map(|(&(i, j), m)| (format!("{i},{j}"), to_rows(m))).collect(),
        }
    }
}

pub fn covariance_grid(p: &SpectralParams, times: &[f64], q: QuadratureConfig) -> Result<CovarianceGrid> {
    let t_max = times.iter().fold(0.0f64, |a, t| a.max(t.abs()));
    CovarianceGrid::compute(&CovarianceEngine::new(p, q, t_max)?, times)
}

/// Largest relative error of `Γ(ct, cs)` against `c^H Γ(t,s) (c^H)ᵀ` over
/// the grid pairs with nonzero covariance.
pub fn oss_check(p: &SpectralParams, c_scale: f64, t_grid: &[f64], q: QuadratureConfig) -> Result<f64> {
    if !(c_scale > 0.0) || !c_scale.is_finite() {
        return Err(Error::Domain(format!("scale c = {c_scale} must be positive")));
    }
    let t_max = t_grid.iter().fold(0.0f64, |a, t| a.max(t.abs())) * c_scale.max(1.0);
    let engine = CovarianceEngine::new(p, q, t_max)?;
    let ch = mat_power(&p.h(), c_scale)?;
    let pairs: Vec<(f64, f64)> = t_grid.iter().flat_map(|&t| t_grid.iter().map(move |&s| (t, s))).collect();
    let errs: Vec<f64> = pairs
        .par_iter()
        .map(|&(t, s)| {
            let rhs = &ch * engine.gamma(t, s)? * ch.transpose();
            let lhs = engine.gamma(c_scale * t, c_scale * s)?;
            let nrm = rhs.norm();
            Ok(if nrm == 0.0 { lhs.norm() } else { (lhs - rhs).norm() / nrm })
        })
        .collect::<Result<_>>()?;
    Ok(errs.into_iter().fold(0.0, f64::max))
}

#[derive(Debug, Clone)]
pub struct SamplePaths {
    pub times: Vec<f64>,
    /// `paths[path][time][component]`.
    pub paths: Vec<Vec<Vec<f64>>>,
    pub seed: u64,
}

impl SamplePaths {
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let n = self.paths.first().and_then(|p| p.first()).map_or(0, |v| v.len());
        write!(w, "path,t")?;
        for c in 1..=n {
            write!(w, ",component_{c}")?;
        }
        writeln!(w)?;
        for (k, path) in self.paths.iter().enumerate() {
            for (t, v) in self.times.iter().zip(path) {
                write!(w, "{k},{t}")?;
                for x in v {
                    write!(w, ",{x}")?;
                }
                writeln!(w)?;
            }
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("CSV is ASCII")
    }

    /// Sample mean of `B(tᵢ)B(tⱼ)ᵀ`; the process has mean zero.
    pub fn empirical_covariance(&self, i: usize, j: usize) -> RealMatrix {
        let n = self.paths.first().map_or(0, |p| p[i].len());
        let mut out = RealMatrix::zeros(n, n);
        for path in &self.paths {
            for a in 0..n {
                for b in 0..n {
                    out[(a, b)] += path[i][a] * path[j][b];
                }
            }
        }
        out / self.paths.len().max(1) as f64
    }
}

/// Sample paths of the discretized spectral integral over the positive main
/// quadrature nodes. Path `k` draws from its own ChaCha stream `k`.
pub fn simulate(p: &SpectralParams, times: &[f64], n_paths: usize, seed: u64, q: QuadratureConfig) -> Result<SamplePaths> {
    if times.iter().any(|t| !t.is_finite() || *t < 0.0) || times.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Domain("times must be finite, nonnegative and sorted".into()));
    }
    let t_max = times.last().copied().unwrap_or(1.0);
    let engine = CovarianceEngine::new(p, q, t_max)?;
    simulate_with(&engine, times, n_paths, seed)
}

pub fn simulate_with(engine: &CovarianceEngine, times: &[f64], n_paths: usize, seed: u64) -> Result<SamplePaths> {
    let n = engine.n;
    let amp = 2.0 * engine.scale.sqrt();
    // 2√w·F(x), and (e^{itx}−1)/(ix) per time and node
    let factors: Vec<ComplexMatrix> = engine
        .main
        .iter()
        .zip(&engine.factors)
        .map(|(&(_, w), f)| ComplexMatrix { re: &f.re * (amp * w.sqrt()), im: &f.im * (amp * w.sqrt()) })
        .collect();
    for &t in times {
        if t > engine.t_max * (1.0 + 1e-12) {
            return Err(Error::Precondition(format!("time {t} outside the resolved range")));
        }
    }
    let phase: Vec<Vec<(f64, f64)>> = times
        .iter()
        .map(|&t| {
            engine
                .main
                .iter()
                .map(|&(x, _)| {
                    let (er, ei) = expm1i(t * x);
                    (ei / x, -er / x)
                })
                .collect()
        })
        .collect();
    let half = std::f64::consts::FRAC_1_SQRT_2;
    let paths: Vec<Vec<Vec<f64>>> = (0..n_paths)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let mut out = vec![vec![0.0; n]; times.len()];
            let mut zr = vec![0.0; n];
            let mut zi = vec![0.0; n];
            for (node, f) in factors.iter().enumerate() {
                for c in 0..n {
                    zr[c] = rng.sample::<f64, _>(StandardNormal) * half;
                    zi[c] = rng.sample::<f64, _>(StandardNormal) * half;
                }
                for a in 0..n {
                    let mut vr = 0.0;
                    let mut vi = 0.0;
                    for c in 0..n {
                        vr += f.re[(a, c)] * zr[c] - f.im[(a, c)] * zi[c];
                        vi += f.re[(a, c)] * zi[c] + f.im[(a, c)] * zr[c];
                    }
                    for (j, row) in out.iter_mut().enumerate() {
                        let (gr, gi) = phase[j][node];
                        row[a] += gr * vr - gi * vi;
                    }
                }
            }
            out
        })
        .collect();
    Ok(SamplePaths { times: times.to_vec(), paths, seed })
}

/// `‖Im(AA*)‖ ≤ tol·(1 + ‖Re(AA*)‖)`.
pub fn is_time_reversible(p: &SpectralParams, tol: f64) -> bool {
    p.im_aa().norm() <= tol * (1.0 + p.re_aa().norm())
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Lanczos approximation, reflected for `Re z < ½`.
pub fn complex_gamma(z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain(format!("Gamma of non-finite {z}")));
    }
    if z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0 {
        return Err(Error::Domain(format!("Gamma has a pole at {}", z.re)));
    }
    if z.re < 0.5 {
        let pi = std::f64::consts::PI;
        let s = (z * pi).sin();
        return Ok(Complex64::from(pi) / (s * complex_gamma(Complex64::new(1.0, 0.0) - z)?));
    }
    let z = z - 1.0;
    let mut x = Complex64::from(LANCZOS[0]);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    Ok((2.0 * std::f64::consts::PI).sqrt() * t.powc(z + 0.5) * (-t).exp() * x)
}

/// `|Γ(d+ic+1)|²·(2cos(β−πd) + 2cosh(πc))`.
pub fn time_domain_f(d_val: f64, c_val: f64, beta: f64) -> Result<f64> {
    let pi = std::f64::consts::PI;
    if !(beta > 0.0 && beta < 2.0 * pi) || beta == pi {
        return Err(Error::Domain(format!("beta = {beta} must lie in (0, 2π) without π")));
    }
    if !(d_val > -0.5 && d_val < 0.5) || d_val == 0.0 {
        return Err(Error::Domain(format!("d = {d_val} must lie in (-1/2, 1/2) without 0")));
    }
    if !c_val.is_finite() {
        return Err(Error::Domain("c must be finite".into()));
    }
    let g = complex_gamma(Complex64::new(d_val + 1.0, c_val))?;
    Ok(g.norm_sqr() * (2.0 * (beta - pi * d_val).cos() + 2.0 * (pi * c_val).cosh()))
}
