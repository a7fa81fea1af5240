//! Spectral parametrization `(D, A)`: validation, the conjugacy `W`, the
//! reduced exponent `M = W⁻¹DW`, and the `Π_x`, `Π^(m)`, `Π_I` families.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matfun::{
    from_rows, identity, logm_principal, mat_power, skew_part, sym_eig, ComplexMatrix, RealMatrix, SymEig,
};
use crate::tol::ToleranceConfig;

#[derive(Debug, Clone, Copy)]
pub struct ValidationFlags {
    pub require_full_rank: bool,
    /// Reject `D` with an eigenvalue real part outside `(−½, ½)`.
    pub require_domain: bool,
}

impl Default for ValidationFlags {
    fn default() -> Self {
        Self { require_full_rank: true, require_domain: false }
    }
}

#[derive(Debug, Clone)]
pub struct SpectralParams {
    pub n: usize,
    pub d: RealMatrix,
    pub a: ComplexMatrix,
    pub tol: ToleranceConfig,
    pub full_rank: bool,
    pub in_domain: bool,
    /// Extreme eigenvalues of `Re(AA*)`.
    pub re_aa_min: f64,
    pub re_aa_max: f64,
    /// Real parts of the eigenvalues of `D`, ascending.
    pub d_eig_re: Vec<f64>,
}

impl SpectralParams {
    /// `Re(AA*) = A₁A₁ᵀ + A₂A₂ᵀ`.
    pub fn re_aa(&self) -> RealMatrix {
        let (a1, a2) = (&self.a.re, &self.a.im);
        a1 * a1.transpose() + a2 * a2.transpose()
    }

    /// `Im(AA*) = A₂A₁ᵀ − A₁A₂ᵀ`.
    pub fn im_aa(&self) -> RealMatrix {
        let (a1, a2) = (&self.a.re, &self.a.im);
        a2 * a1.transpose() - a1 * a2.transpose()
    }

    pub fn aa_star(&self) -> ComplexMatrix {
        ComplexMatrix { re: self.re_aa(), im: self.im_aa() }
    }

    /// `H = D + ½I`.
    pub fn h(&self) -> RealMatrix {
        &self.d + identity(self.n) * 0.5
    }

    /// Reparametrize by `(QDQᵀ, QA)`.
    pub fn conjugated(&self, q: &RealMatrix) -> Result<SpectralParams> {
        let d = q * &self.d * q.transpose();
        let a = self.a.left_real(q);
        validate(
            d,
            a,
            ValidationFlags { require_full_rank: self.full_rank, require_domain: false },
            self.tol,
        )
    }
}

pub fn validate(d: RealMatrix, a: ComplexMatrix, flags: ValidationFlags, tol: ToleranceConfig) -> Result<SpectralParams> {
    let n = d.nrows();
    if !d.is_square() || a.shape() != (n, n) {
        return Err(Error::Shape(format!("D is {:?}, A is {:?}", d.shape(), a.shape())));
    }
    if !d.iter().chain(a.re.iter()).chain(a.im.iter()).all(|v| v.is_finite()) {
        return Err(Error::Validation("non-finite parameter entry".into()));
    }
    let (a1, a2) = (&a.re, &a.im);
    let re = a1 * a1.transpose() + a2 * a2.transpose();
    let e = sym_eig(&re, &tol)?;
    let re_aa_max = e.eigenvalues[0];
    let re_aa_min = e.eigenvalues[n - 1];
    let full_rank = re_aa_max > 0.0 && re_aa_min > tol.rank * re_aa_max;
    if flags.require_full_rank && !full_rank {
        return Err(Error::Validation(format!(
            "Re(AA*) is not full rank: smallest eigenvalue {re_aa_min:e}, largest {re_aa_max:e}"
        )));
    }
    let mut d_eig_re: Vec<f64> = d.complex_eigenvalues().iter().map(|z| z.re).collect();
    d_eig_re.sort_by(f64::total_cmp);
    let in_domain = d_eig_re.iter().all(|&r| r > -0.5 && r < 0.5);
    if flags.require_domain && !in_domain {
        return Err(Error::Validation(format!(
            "eigenvalues of D must have real part in (-1/2, 1/2), got {d_eig_re:?}"
        )));
    }
    Ok(SpectralParams { n, d, a, tol, full_rank, in_domain, re_aa_min, re_aa_max, d_eig_re })
}

#[derive(Debug, Clone)]
pub struct DerivedParams {
    pub re_aa: RealMatrix,
    pub im_aa: RealMatrix,
    pub w: RealMatrix,
    pub w_inv: RealMatrix,
    pub m: RealMatrix,
}

impl DerivedParams {
    /// `W O W⁻¹`: maps an O-side element to the parameter side.
    pub fn to_params_side(&self, o: &RealMatrix) -> RealMatrix {
        &self.w * o * &self.w_inv
    }
}

pub fn derive(p: &SpectralParams) -> Result<DerivedParams> {
    if !p.full_rank {
        return Err(Error::Precondition("derive requires full-rank Re(AA*)".into()));
    }
    let re_aa = p.re_aa();
    let im_aa = skew_part(&p.im_aa());
    let e = sym_eig(&re_aa, &p.tol)?;
    if e.eigenvalues.iter().any(|&l| l <= 0.0) {
        return Err(Error::Domain("Re(AA*) is not positive definite".into()));
    }
    let v = e.eigenvectors.clone();
    let w = SymEig { eigenvalues: e.eigenvalues.iter().map(|l| l.sqrt()).collect(), eigenvectors: v.clone() }
        .reconstruct();
    let w_inv =
        SymEig { eigenvalues: e.eigenvalues.iter().map(|l| 1.0 / l.sqrt()).collect(), eigenvectors: v }.reconstruct();
    let w = (&w + w.transpose()) * 0.5;
    let w_inv = (&w_inv + w_inv.transpose()) * 0.5;
    let m = &w_inv * &p.d * &w;
    Ok(DerivedParams { re_aa, im_aa, w, w_inv, m })
}

/// `Π_x = x^{−M} (x^{−M})ᵀ`.
pub fn pi_x(d: &DerivedParams, x: f64) -> Result<RealMatrix> {
    let g = mat_power(&(-&d.m), x)?;
    Ok(&g * g.transpose())
}

/// `‖log Π_x + ln x·(M+Mᵀ) − ½ln²x·[M,Mᵀ]‖` with `Π_x = x^{−M}x^{−Mᵀ}`,
/// the remainder after the second-order BCH terms. It is `O(|ln x|³)`.
pub fn bch_remainder(m: &RealMatrix, x: f64, tol: &ToleranceConfig) -> Result<f64> {
    let g = mat_power(&(-m), x)?;
    let log = logm_principal(&(&g * g.transpose()), tol)?;
    let l = x.ln();
    let mt = m.transpose();
    let comm = m * &mt - &mt * m;
    Ok((log + (m + &mt) * l - comm * (0.5 * l * l)).norm())
}

fn binomial(m: usize, k: usize) -> f64 {
    let k = k.min(m - k);
    (0..k).fold(1.0, |acc, i| acc * (m - i) as f64 / (i + 1) as f64)
}

fn pi_m_of(m_mat: &RealMatrix, m: usize) -> RealMatrix {
    let n = m_mat.nrows();
    let mt = m_mat.transpose();
    let mut pw = vec![identity(n)];
    let mut pwt = vec![identity(n)];
    for k in 1..=m {
        pw.push(&pw[k - 1] * m_mat);
        pwt.push(&pwt[k - 1] * &mt);
    }
    let mut s = RealMatrix::zeros(n, n);
    for k in 0..=m {
        s += &pw[k] * &pwt[m - k] * binomial(m, k);
    }
    (&s + s.transpose()) * 0.5
}

/// `Π^(m) = Σ_k C(m,k) M^k (Mᵀ)^{m−k}`.
pub fn pi_m(d: &DerivedParams, m: usize) -> Result<RealMatrix> {
    if m < 1 {
        return Err(Error::Domain("pi_m needs m >= 1".into()));
    }
    Ok(pi_m_of(&d.m, m))
}

/// `Π_I = W⁻¹ Im(AA*) W⁻¹`.
pub fn pi_i(d: &DerivedParams) -> RealMatrix {
    skew_part(&(&d.w_inv * &d.im_aa * &d.w_inv))
}

#[derive(Debug, Clone, Copy)]
pub struct PiFamilyConfig {
    /// Number of sample points in the first round (even).
    pub samples: usize,
    /// Highest `m` in the first round; defaults to `n(n+1)`.
    pub m_max: Option<usize>,
    pub max_rounds: usize,
}

impl Default for PiFamilyConfig {
    fn default() -> Self {
        Self { samples: 10, m_max: None, max_rounds: 4 }
    }
}

#[derive(Debug, Clone)]
pub struct PiFamily {
    pub sample_points: Vec<f64>,
    pub pi_x_values: Vec<RealMatrix>,
    pub pi_m_values: Vec<RealMatrix>,
    pub pi_i: RealMatrix,
    pub span_basis: Vec<RealMatrix>,
    pub stable: bool,
    pub warnings: Vec<String>,
}

/// `e^{±u}` for `u = ¼, ½, ¾, 1, …`; always contains `e^{±1}`.
pub fn sample_points(q: usize) -> Vec<f64> {
    let half = (q / 2).max(4);
    (1..=half).flat_map(|j| {
        let u = 0.25 * j as f64;
        [(-u).exp(), u.exp()]
    })
    .collect()
}

/// Modified Gram–Schmidt in the Frobenius inner product. Candidates are
/// normalized first; a residual below `cut` is treated as dependent.
pub fn frobenius_span(candidates: &[RealMatrix], cut: f64) -> Vec<RealMatrix> {
    let mut basis: Vec<RealMatrix> = Vec::new();
    for c in candidates {
        let nrm = c.norm();
        if !(nrm > 0.0) || !nrm.is_finite() {
            continue;
        }
        let mut r = c / nrm;
        for _ in 0..2 {
            for b in &basis {
                let dot = b.dot(&r);
                r -= b * dot;
            }
        }
        let rn = r.norm();
        if rn > cut {
            basis.push(r / rn);
        }
    }
    basis
}

pub fn build_pi_family(d: &DerivedParams, cfg: PiFamilyConfig, tol: &ToleranceConfig) -> Result<PiFamily> {
    let n = d.m.nrows();
    let cap = n * (n + 1) / 2;
    let m0 = cfg.m_max.unwrap_or(n * (n + 1)).max(1);
    let q0 = cfg.samples.max(2);
    let mscale = d.m.norm();
    let m_hat = if mscale > 0.0 { &d.m / mscale } else { d.m.clone() };

    let mut prev: Option<usize> = None;
    let mut span = Vec::new();
    let mut stable = false;
    let mut sample_pts = Vec::new();
    for round in 0..cfg.max_rounds.max(1) {
        let q = q0 << round;
        let mm = m0 << round;
        let pts = sample_points(q);
        let mut cands = Vec::with_capacity(pts.len() + mm);
        for &x in &pts {
            cands.push(pi_x(d, x)? - identity(n));
        }
        for m in 1..=mm {
            cands.push(pi_m_of(&m_hat, m));
        }
        span = frobenius_span(&cands, tol.null);
        if round == 0 {
            sample_pts = pts;
        }
        if span.len() >= cap || prev == Some(span.len()) {
            stable = true;
            break;
        }
        prev = Some(span.len());
    }
    let mut warnings = Vec::new();
    if !stable {
        warnings.push(format!("span of the Pi family did not stabilize (dimension {})", span.len()));
    }
    let pi_x_values = sample_pts.iter().map(|&x| pi_x(d, x)).collect::<Result<Vec<_>>>()?;
    let pi_m_values = (1..=m0).map(|m| pi_m_of(&d.m, m)).collect();
    Ok(PiFamily { sample_points: sample_pts, pi_x_values, pi_m_values, pi_i: pi_i(d), span_basis: span, stable, warnings })
}

/// Parameter document as read from JSON.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParamsDoc {
    pub n: usize,
    #[serde(rename = "D")]
    pub d: Vec<Vec<f64>>,
    #[serde(rename = "A_re")]
    pub a_re: Vec<Vec<f64>>,
    #[serde(rename = "A_im", default, skip_serializing_if = "Option::is_none")]
    pub a_im: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<ToleranceConfig>,
}

impl ParamsDoc {
    pub fn from_json(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn build(&self, flags: ValidationFlags) -> Result<SpectralParams> {
        let d = from_rows(&self.d).map_err(|e| Error::Validation(format!("D: {e}")))?;
        let a_re = from_rows(&self.a_re).map_err(|e| Error::Validation(format!("A_re: {e}")))?;
        let a_im = match &self.a_im {
            Some(r) => from_rows(r).map_err(|e| Error::Validation(format!("A_im: {e}")))?,
            None => RealMatrix::zeros(a_re.nrows(), a_re.ncols()),
        };
        for (name, m) in [("D", &d), ("A_re", &a_re), ("A_im", &a_im)] {
            if m.shape() != (self.n, self.n) {
                return Err(Error::Validation(format!("{name} is {:?}, expected n = {}", m.shape(), self.n)));
            }
        }
        let a = ComplexMatrix::new(a_re, a_im)?;
        validate(d, a, flags, self.tolerances.unwrap_or_default())
    }
}
