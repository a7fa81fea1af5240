//! Commutativity machinery: orthogonal centralizers of symmetric and skew
//! matrices, commutant Lie algebras in `so(n)`, and invariant-subspace tests.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matfun::{identity, random_orthogonal, spectral_norm, sym_eig, RealMatrix};
use crate::tol::ToleranceConfig;

/// `G(Π) = Q · diag(O(k₁), …, O(k_u)) · Qᵀ` for symmetric `Π`.
#[derive(Debug, Clone)]
pub struct OrthogonalCentralizer {
    pub eigenbasis: RealMatrix,
    pub partition: Vec<usize>,
    pub cluster_values: Vec<f64>,
    /// Set when some spectral gap sits within a factor 2 of the clustering threshold.
    pub ambiguous: bool,
}

impl OrthogonalCentralizer {
    pub fn lie_dimension(&self) -> usize {
        self.partition.iter().map(|k| k * (k - 1) / 2).sum()
    }

    pub fn is_simple(&self) -> bool {
        self.partition.iter().all(|&k| k == 1)
    }

    /// Columns of the eigenbasis belonging to cluster `c`.
    pub fn cluster_columns(&self, c: usize) -> std::ops::Range<usize> {
        let start: usize = self.partition[..c].iter().sum();
        start..start + self.partition[c]
    }
}

/// Canonical form `Qᵀ Π_I Q = diag(θ₁J, …, θ_rJ, 0_z)`.
#[derive(Debug, Clone)]
pub struct SkewCentralizer {
    pub basis_change: RealMatrix,
    pub rotation_block_count: usize,
    pub zero_block_size: usize,
    pub angles: Vec<f64>,
}

/// Frobenius-orthonormal skew-symmetric matrices.
#[derive(Debug, Clone, Default)]
pub struct SkewBasis {
    pub elements: Vec<RealMatrix>,
    /// Set when a singular value sits within a factor 2 of the nullspace cut.
    pub ambiguous: bool,
}

impl SkewBasis {
    pub fn dim(&self) -> usize {
        self.elements.len()
    }
}

fn same_square(a: &RealMatrix, b: &RealMatrix) -> Result<()> {
    if a.shape() != b.shape() || !a.is_square() {
        return Err(Error::Shape(format!("{:?} vs {:?}", a.shape(), b.shape())));
    }
    Ok(())
}

/// `‖AB − BA‖ ≤ tol·(1 + ‖A‖‖B‖)`.
pub fn commutes(a: &RealMatrix, b: &RealMatrix, tol: f64) -> Result<bool> {
    same_square(a, b)?;
    let c = (a * b - b * a).norm();
    Ok(c <= tol * (1.0 + a.norm() * b.norm()))
}

pub fn centralizer_structure(pi: &RealMatrix, tol: &ToleranceConfig) -> Result<OrthogonalCentralizer> {
    let e = sym_eig(pi, tol)?;
    let n = e.eigenvalues.len();
    let scale = e.eigenvalues.iter().fold(1.0f64, |a, l| a.max(l.abs()));
    let delta = tol.cluster * scale;
    let mut partition = Vec::new();
    let mut cluster_values = Vec::new();
    let mut ambiguous = false;
    let mut start = 0;
    for i in 1..=n {
        let split = if i == n {
            true
        } else {
            let gap = e.eigenvalues[i - 1] - e.eigenvalues[i];
            if gap > delta / 2.0 && gap < 2.0 * delta {
                ambiguous = true;
            }
            gap > delta
        };
        if split {
            partition.push(i - start);
            cluster_values.push(e.eigenvalues[start..i].iter().sum::<f64>() / (i - start) as f64);
            start = i;
        }
    }
    Ok(OrthogonalCentralizer { eigenbasis: e.eigenvectors, partition, cluster_values, ambiguous })
}

/// Sign matrices in bit order: bit `k` of the index flips column `k`.
/// Index 0 is `I`, the last index is `−I`.
pub fn sign_matrices(frame: &RealMatrix) -> Vec<RealMatrix> {
    let n = frame.ncols();
    (0..1usize << n)
        .map(|mask| {
            let mut f = frame.clone();
            for k in 0..n {
                if mask >> k & 1 == 1 {
                    let c = -f.column(k);
                    f.set_column(k, &c);
                }
            }
            f * frame.transpose()
        })
        .collect()
}

pub fn sign_elements(c: &OrthogonalCentralizer) -> Result<Vec<RealMatrix>> {
    if !c.is_simple() {
        return Err(Error::Precondition(format!(
            "sign_elements needs a simple spectrum, partition {:?}",
            c.partition
        )));
    }
    let n = c.eigenbasis.ncols();
    if n > 12 {
        return Err(Error::Capacity(format!("2^{n} sign matrices")));
    }
    Ok(sign_matrices(&c.eigenbasis))
}

pub fn skew_centralizer_structure(pi_i: &RealMatrix, tol: &ToleranceConfig) -> Result<SkewCentralizer> {
    if !pi_i.is_square() {
        return Err(Error::Shape(format!("{:?}", pi_i.shape())));
    }
    let n = pi_i.nrows();
    let scale = pi_i.norm();
    let defect = (pi_i + pi_i.transpose()).norm();
    if defect > tol.sym * scale.max(f64::MIN_POSITIVE) && defect > 0.0 {
        return Err(Error::Domain(format!("skew_centralizer_structure: not skew ({defect:e})")));
    }
    let l = (pi_i - pi_i.transpose()) * 0.5;
    // −L² = LᵀL is symmetric PSD with eigenvalues θ² in pairs.
    let e = sym_eig(&(l.transpose() * &l), tol)?;
    let cut = (tol.null * spectral_norm(&l)).max(f64::MIN_POSITIVE);
    let mut cols: Vec<nalgebra::DVector<f64>> = Vec::new();
    let mut angles = Vec::new();
    let project_out = |v: &nalgebra::DVector<f64>, cols: &[nalgebra::DVector<f64>]| {
        let mut w = v.clone();
        for _ in 0..2 {
            for c in cols {
                w -= c * c.dot(&w);
            }
        }
        w
    };
    for k in 0..n {
        let theta = e.eigenvalues[k].max(0.0).sqrt();
        if theta <= cut {
            break;
        }
        let u = project_out(&e.eigenvectors.column(k).into_owned(), &cols);
        if u.norm() < 0.5 {
            continue;
        }
        let q1 = u.normalize();
        let q2 = project_out(&(-(&l * &q1) / theta), &cols).normalize();
        angles.push(q1.dot(&(&l * &q2)));
        cols.push(q1);
        cols.push(q2);
    }
    let rotation_block_count = angles.len();
    for k in 0..n {
        if cols.len() == n {
            break;
        }
        let u = project_out(&e.eigenvectors.column(k).into_owned(), &cols);
        if u.norm() > 0.5 {
            cols.push(u.normalize());
        }
    }
    let basis_change = RealMatrix::from_columns(&cols);
    Ok(SkewCentralizer {
        basis_change,
        rotation_block_count,
        zero_block_size: n - 2 * rotation_block_count,
        angles,
    })
}

/// Orthonormal basis `{E_ab}` of `so(n)`, `E_ab = (e_a e_bᵀ − e_b e_aᵀ)/√2`, `a < b`.
pub fn so_basis(n: usize) -> Vec<RealMatrix> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let mut e = RealMatrix::zeros(n, n);
            e[(a, b)] = s;
            e[(b, a)] = -s;
            out.push(e);
        }
    }
    out
}

/// Right-singular vectors of `m` whose singular values fall below `rel · σ_max`,
/// plus a flag for singular values close to the cut.
pub(crate) fn nullspace(m: &RealMatrix, rel: f64) -> (Vec<nalgebra::DVector<f64>>, bool) {
    let cols = m.ncols();
    if cols == 0 {
        return (Vec::new(), false);
    }
    // Pad with zero rows so the SVD returns a full set of right vectors.
    let work = if m.nrows() < cols {
        let mut p = RealMatrix::zeros(cols, cols);
        p.view_mut((0, 0), m.shape()).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = work.svd(false, true);
    let vt = svd.v_t.expect("v_t requested");
    let smax = svd.singular_values.max();
    let cut = rel * smax;
    let ambiguous = svd.singular_values.iter().any(|&s| s > cut / 2.0 && s < cut * 2.0);
    let null = (0..cols)
        .filter(|&k| smax == 0.0 || svd.singular_values[k] < cut)
        .map(|k| vt.row(k).transpose())
        .collect();
    (null, ambiguous)
}

/// `{X ∈ so(n) : XΠ = ΠX for every Π in family}`.
///
/// Each member is scaled to unit Frobenius norm first; exactly-zero members
/// impose nothing.
pub fn commutant_skew_basis(family: &[RealMatrix], tol: &ToleranceConfig) -> Result<SkewBasis> {
    let first = family.first().ok_or_else(|| Error::Shape("empty family".into()))?;
    let n = first.nrows();
    for f in family {
        same_square(first, f)?;
    }
    let basis = so_basis(n);
    let k = basis.len();
    let members: Vec<RealMatrix> =
        family.iter().filter(|f| f.norm() > 0.0).map(|f| f / f.norm()).collect();
    if members.is_empty() || k == 0 {
        return Ok(SkewBasis { elements: basis, ambiguous: false });
    }
    let mut a = RealMatrix::zeros(n * n * members.len(), k);
    for (c, e) in basis.iter().enumerate() {
        for (m, p) in members.iter().enumerate() {
            let comm = e * p - p * e;
            for (r, v) in comm.iter().enumerate() {
                a[(m * n * n + r, c)] = *v;
            }
        }
    }
    let (null, ambiguous) = nullspace(&a, tol.null);
    let elements = null
        .into_iter()
        .map(|v| basis.iter().zip(v.iter()).fold(RealMatrix::zeros(n, n), |acc, (e, c)| acc + e * *c))
        .collect();
    Ok(SkewBasis { elements, ambiguous })
}

/// `{X ∈ M(n,ℝ) : XΠ = ΠX for every Π in family}` (full matrix algebra).
pub fn commutant_full_dimension(family: &[RealMatrix], tol: &ToleranceConfig) -> Result<usize> {
    let first = family.first().ok_or_else(|| Error::Shape("empty family".into()))?;
    let n = first.nrows();
    let mut a = RealMatrix::zeros(n * n * family.len(), n * n);
    for (m, p) in family.iter().enumerate() {
        same_square(first, p)?;
        let p = p / p.norm().max(f64::MIN_POSITIVE);
        for c in 0..n * n {
            let mut e = RealMatrix::zeros(n, n);
            e[c] = 1.0;
            let comm = &e * &p - &p * &e;
            for (r, v) in comm.iter().enumerate() {
                a[(m * n * n + r, c)] = *v;
            }
        }
    }
    Ok(nullspace(&a, tol.null).0.len())
}

/// True iff span(V) is invariant under `L`: `‖(I − P)LP‖ ≤ tol·(1 + ‖L‖)`.
pub fn is_invariant_subspace(l: &RealMatrix, v: &[nalgebra::DVector<f64>], tol: f64) -> Result<bool> {
    let n = l.nrows();
    if v.is_empty() {
        return Ok(true);
    }
    let vm = RealMatrix::from_columns(v);
    if vm.nrows() != n {
        return Err(Error::Shape("vector length differs from matrix size".into()));
    }
    if (vm.transpose() * &vm - identity(v.len())).norm() > 1e-10 {
        return Err(Error::Domain("vectors are not orthonormal".into()));
    }
    let p = &vm * vm.transpose();
    let resid = (identity(n) - &p) * l * &p;
    Ok(resid.norm() <= tol * (1.0 + l.norm()))
}

/// True iff `L` leaves invariant the span of some proper nonempty subset of
/// the columns of `basis`. Decided by connectivity of the support graph of `OᵀLO`.
pub fn in_l_invar(l: &RealMatrix, basis: &RealMatrix, delta_graph: f64) -> bool {
    let n = l.nrows();
    if n < 2 {
        return false;
    }
    let t = basis.transpose() * l * basis;
    let cut = delta_graph * spectral_norm(l);
    let mut seen = vec![false; n];
    let mut stack = vec![0usize];
    seen[0] = true;
    while let Some(i) = stack.pop() {
        for j in 0..n {
            if !seen[j] && (t[(i, j)].abs() > cut || t[(j, i)].abs() > cut) {
                seen[j] = true;
                stack.push(j);
            }
        }
    }
    seen.iter().any(|s| !s)
}

/// Tests whether `Γ` commutes with the reflections `diag(−1,…,1,…,−1)`
/// conjugated by `trials` random orthogonal matrices (the identity first).
pub fn centralizes_rotation_group(gamma: &RealMatrix, trials: usize, tol: f64, seed: u64) -> bool {
    let n = gamma.nrows();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gens: Vec<RealMatrix> = (0..n)
        .map(|k| {
            let mut g = -identity(n);
            g[(k, k)] = 1.0;
            g
        })
        .collect();
    for t in 0..=trials {
        let q = if t == 0 { identity(n) } else { random_orthogonal(n, &mut rng) };
        for g in &gens {
            let c = &q * g * q.transpose();
            if !commutes(gamma, &c, tol).unwrap_or(false) {
                return false;
            }
        }
    }
    true
}

/// One Jordan block `λI_p + N_p` (ones on the subdiagonal).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JordanBlock {
    pub eigenvalue: f64,
    pub size: usize,
}

pub fn jordan_matrix(blocks: &[JordanBlock]) -> RealMatrix {
    let n: usize = blocks.iter().map(|b| b.size).sum();
    let mut j = RealMatrix::zeros(n, n);
    let mut off = 0;
    for b in blocks {
        for i in 0..b.size {
            j[(off + i, off + i)] = b.eigenvalue;
            if i > 0 {
                j[(off + i, off + i - 1)] = 1.0;
            }
        }
        off += b.size;
    }
    j
}

/// Checks that `X` has the block pattern of a solution of `J X = X J`:
/// zero blocks between distinct eigenvalues, and regular lower-triangular
/// Toeplitz blocks (`(T, 0)` or `(0; T)`) between equal ones.
/// Operates on supplied Jordan data only; no Jordan form is computed.
pub fn validate_jordan_centralizer(blocks: &[JordanBlock], x: &RealMatrix, tol: f64) -> bool {
    let n: usize = blocks.iter().map(|b| b.size).sum();
    if x.shape() != (n, n) {
        return false;
    }
    let offs: Vec<usize> = blocks
        .iter()
        .scan(0, |acc, b| {
            let o = *acc;
            *acc += b.size;
            Some(o)
        })
        .collect();
    let scale = tol * (1.0 + x.norm());
    for (a, ba) in blocks.iter().enumerate() {
        for (b, bb) in blocks.iter().enumerate() {
            let blk = x.view((offs[a], offs[b]), (ba.size, bb.size));
            if ba.eigenvalue != bb.eigenvalue {
                if blk.iter().any(|v| v.abs() > scale) {
                    return false;
                }
                continue;
            }
            let (p, q) = (ba.size, bb.size);
            let m = p.min(q);
            // Location of the m×m Toeplitz part inside the p×q block.
            let (r0, c0) = if p <= q { (0, 0) } else { (p - q, 0) };
            for i in 0..p {
                for j in 0..q {
                    let v = blk[(i, j)];
                    let inside = i >= r0 && i < r0 + m && j >= c0 && j < c0 + m;
                    if !inside {
                        if v.abs() > scale {
                            return false;
                        }
                        continue;
                    }
                    let (ti, tj) = (i - r0, j - c0);
                    if tj > ti {
                        if v.abs() > scale {
                            return false;
                        }
                    } else if (v - blk[(r0 + ti - tj, c0)]).abs() > scale {
                        return false;
                    }
                }
            }
        }
    }
    true
}
