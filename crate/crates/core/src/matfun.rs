//! Dense matrix primitives: exponential, SPD logarithm, real powers,
//! sorted symmetric eigendecomposition, square roots and norms.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::tol::ToleranceConfig;

pub type RealMatrix = DMatrix<f64>;

/// A complex matrix stored as separate real and imaginary parts.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    pub re: RealMatrix,
    pub im: RealMatrix,
}

impl ComplexMatrix {
    pub fn new(re: RealMatrix, im: RealMatrix) -> Result<Self> {
        if re.shape() != im.shape() {
            return Err(Error::Shape(format!(
                "real part {:?} and imaginary part {:?} differ",
                re.shape(),
                im.shape()
            )));
        }
        if !re.iter().chain(im.iter()).all(|v| v.is_finite()) {
            return Err(Error::Domain("non-finite entry".into()));
        }
        Ok(Self { re, im })
    }

    pub fn from_real(re: RealMatrix) -> Self {
        let im = RealMatrix::zeros(re.nrows(), re.ncols());
        Self { re, im }
    }

    pub fn shape(&self) -> (usize, usize) {
        self.re.shape()
    }

    pub fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: -&self.im }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self { re: self.re.transpose(), im: -self.im.transpose() }
    }

    pub fn mul(&self, other: &ComplexMatrix) -> Self {
        Self {
            re: &self.re * &other.re - &self.im * &other.im,
            im: &self.re * &other.im + &self.im * &other.re,
        }
    }

    /// `R · self` for real `R`.
    pub fn left_real(&self, r: &RealMatrix) -> Self {
        Self { re: r * &self.re, im: r * &self.im }
    }

    /// `self · R` for real `R`.
    pub fn right_real(&self, r: &RealMatrix) -> Self {
        Self { re: &self.re * r, im: &self.im * r }
    }

    pub fn sub(&self, other: &ComplexMatrix) -> Self {
        Self { re: &self.re - &other.re, im: &self.im - &other.im }
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        (self.re.norm_squared() + self.im.norm_squared()).sqrt()
    }
}

/// Eigendecomposition of a symmetric matrix, eigenvalues nonincreasing.
#[derive(Debug, Clone)]
pub struct SymEig {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: RealMatrix,
}

impl SymEig {
    pub fn reconstruct(&self) -> RealMatrix {
        let lam = DMatrix::from_diagonal(&DVector::from_vec(self.eigenvalues.clone()));
        &self.eigenvectors * lam * self.eigenvectors.transpose()
    }
}

fn require_square(m: &RealMatrix, what: &str) -> Result<usize> {
    if !m.is_square() {
        return Err(Error::Shape(format!("{what}: expected square, got {:?}", m.shape())));
    }
    Ok(m.nrows())
}

pub fn identity(n: usize) -> RealMatrix {
    RealMatrix::identity(n, n)
}

/// Build a matrix from rows; rows must have equal length.
pub fn from_rows(rows: &[Vec<f64>]) -> Result<RealMatrix> {
    let nr = rows.len();
    let nc = rows.first().map_or(0, |r| r.len());
    if nr == 0 || nc == 0 {
        return Err(Error::Shape("empty matrix".into()));
    }
    if rows.iter().any(|r| r.len() != nc) {
        return Err(Error::Shape("ragged rows".into()));
    }
    let m = RealMatrix::from_fn(nr, nc, |i, j| rows[i][j]);
    if !m.iter().all(|v| v.is_finite()) {
        return Err(Error::Domain("non-finite entry".into()));
    }
    Ok(m)
}

pub fn to_rows(m: &RealMatrix) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

fn norm1(m: &RealMatrix) -> f64 {
    m.column_iter().map(|c| c.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
}

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

/// Matrix exponential by scaling and squaring with the degree-13 Padé approximant.
pub fn expm(m: &RealMatrix) -> Result<RealMatrix> {
    let n = require_square(m, "expm")?;
    let nrm = norm1(m);
    if !nrm.is_finite() {
        return Err(Error::Numeric("expm: non-finite input".into()));
    }
    let s = if nrm > THETA13 { (nrm / THETA13).log2().ceil() as i32 } else { 0 };
    if s > 1000 {
        return Err(Error::Numeric(format!("expm: norm {nrm:e} too large")));
    }
    let a = m * 0.5f64.powi(s);
    let b = &PADE13;
    let id = identity(n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let u_inner = &a6 * (&a6 * b[13] + &a4 * b[11] + &a2 * b[9])
        + &a6 * b[7]
        + &a4 * b[5]
        + &a2 * b[3]
        + &id * b[1];
    let u = &a * u_inner;
    let v = &a6 * (&a6 * b[12] + &a4 * b[10] + &a2 * b[8])
        + &a6 * b[6]
        + &a4 * b[4]
        + &a2 * b[2]
        + &id * b[0];
    let p = &v + &u;
    let q = &v - &u;
    let mut r = q
        .lu()
        .solve(&p)
        .ok_or_else(|| Error::Numeric("expm: singular Padé denominator".into()))?;
    for _ in 0..s {
        r = &r * &r;
    }
    if !r.iter().all(|v| v.is_finite()) {
        return Err(Error::Numeric("expm: overflow".into()));
    }
    Ok(r)
}

/// `x^M = exp(M ln x)`.
pub fn mat_power(m: &RealMatrix, x: f64) -> Result<RealMatrix> {
    require_square(m, "mat_power")?;
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("mat_power: x = {x} must be positive")));
    }
    if x == 1.0 {
        return Ok(identity(m.nrows()));
    }
    expm(&(m * x.ln()))
}

/// Symmetric eigendecomposition, eigenvalues nonincreasing, each
/// eigenvector's first non-negligible component made positive.
pub fn sym_eig(p: &RealMatrix, tol: &ToleranceConfig) -> Result<SymEig> {
    require_square(p, "sym_eig")?;
    let scale = p.norm();
    let asym = (p - p.transpose()).norm();
    if asym > tol.sym * scale.max(f64::MIN_POSITIVE) && asym > 0.0 {
        return Err(Error::Domain(format!("sym_eig: asymmetry {asym:e} exceeds tolerance")));
    }
    let sym = (p + p.transpose()) * 0.5;
    let n = sym.nrows();
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut q = RealMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        let mut col = eig.eigenvectors.column(i).into_owned();
        if let Some(first) = col.iter().find(|v| v.abs() > 1e-8) {
            if *first < 0.0 {
                col = -col;
            }
        }
        q.set_column(k, &col);
    }
    Ok(SymEig { eigenvalues, eigenvectors: q })
}

/// Principal logarithm of a symmetric positive definite matrix.
pub fn logm_principal(p: &RealMatrix, tol: &ToleranceConfig) -> Result<RealMatrix> {
    let e = sym_eig(p, tol)?;
    if let Some(bad) = e.eigenvalues.iter().find(|&&l| l <= 0.0) {
        return Err(Error::Domain(format!("logm_principal: eigenvalue {bad:e} is not positive")));
    }
    let logs: Vec<f64> = e.eigenvalues.iter().map(|l| l.ln()).collect();
    let r = SymEig { eigenvalues: logs, eigenvectors: e.eigenvectors }.reconstruct();
    Ok(symmetrize(&r))
}

/// Square root of a symmetric positive semidefinite matrix.
pub fn psd_sqrt(p: &RealMatrix, tol: &ToleranceConfig) -> Result<RealMatrix> {
    let e = sym_eig(p, tol)?;
    let scale = e.eigenvalues.iter().fold(0.0f64, |a, l| a.max(l.abs()));
    let min = e.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    if min < -tol.eig * scale {
        return Err(Error::Domain(format!("psd_sqrt: eigenvalue {min:e} is negative")));
    }
    let roots: Vec<f64> = e.eigenvalues.iter().map(|l| l.max(0.0).sqrt()).collect();
    let r = SymEig { eigenvalues: roots, eigenvectors: e.eigenvectors }.reconstruct();
    Ok(symmetrize(&r))
}

pub fn commutator(a: &RealMatrix, b: &RealMatrix) -> Result<RealMatrix> {
    if a.shape() != b.shape() || !a.is_square() {
        return Err(Error::Shape(format!("commutator: {:?} vs {:?}", a.shape(), b.shape())));
    }
    Ok(a * b - b * a)
}

/// Largest singular value.
pub fn spectral_norm(a: &RealMatrix) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.clone().svd(false, false).singular_values.max()
}

pub fn symmetrize(a: &RealMatrix) -> RealMatrix {
    (a + a.transpose()) * 0.5
}

pub fn skew_part(a: &RealMatrix) -> RealMatrix {
    (a - a.transpose()) * 0.5
}

/// `‖OᵀO − I‖_F`.
pub fn orthogonality_defect(o: &RealMatrix) -> f64 {
    (o.transpose() * o - identity(o.ncols())).norm()
}

/// Haar-distributed orthogonal matrix (QR of a Gaussian matrix, signs fixed by `R`'s diagonal).
pub fn random_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> RealMatrix {
    let g = RealMatrix::from_fn(n, n, |_, _| rng.sample(StandardNormal));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            let c = -q.column(j);
            q.set_column(j, &c);
        }
    }
    q
}

/// Rotation in the plane by angle `theta`, `[[c, −s], [s, c]]`.
pub fn rotation2(theta: f64) -> RealMatrix {
    let (s, c) = theta.sin_cos();
    RealMatrix::from_row_slice(2, 2, &[c, -s, s, c])
}

/// `J = [[0, 1], [−1, 0]]`.
pub fn j2() -> RealMatrix {
    RealMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0])
}

/// Embed `b` in the top-left corner of an `n × n` zero matrix.
pub fn embed(b: &RealMatrix, n: usize) -> RealMatrix {
    let mut out = RealMatrix::zeros(n, n);
    out.view_mut((0, 0), b.shape()).copy_from(b);
    out
}
