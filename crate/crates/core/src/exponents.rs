//! Tangent spaces, exponent sets `H + T(G_H)`, commuting exponents, and the
//! check that one spectral parameter `A` serves every exponent.

use nalgebra::DVector;
use serde::Serialize;

use crate::error::Result;
use crate::matfun::{identity, mat_power, to_rows, RealMatrix};
use crate::params::SpectralParams;
use crate::symmetry::{GroupType, SymmetryClassification};

#[derive(Debug, Clone)]
pub struct ExponentSet {
    pub base_exponent: RealMatrix,
    pub tangent_basis: Vec<RealMatrix>,
    pub unique: bool,
}

#[derive(Debug, Clone)]
pub struct CommutingExponent {
    pub h0: RealMatrix,
    pub residual: f64,
    /// Residual above `1e-8·(1 + ‖H₀‖)`.
    pub flagged: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExponentReport {
    #[serde(rename = "H")]
    pub h: Vec<Vec<f64>>,
    pub tangent_basis: Vec<Vec<Vec<f64>>>,
    pub unique: bool,
    #[serde(rename = "H0")]
    pub h0: Vec<Vec<f64>>,
    #[serde(rename = "H0_residual")]
    pub h0_residual: f64,
}

/// `e_a e_bᵀ − e_b e_aᵀ` in the frame `f`.
fn plane_generator(f: &RealMatrix, a: usize, b: usize) -> RealMatrix {
    let u = f.column(a);
    let v = f.column(b);
    u * v.transpose() - v * u.transpose()
}

fn frame_about(p: &DVector<f64>) -> RealMatrix {
    let p = p.normalize();
    let k = (0..3).min_by(|&i, &j| p[i].abs().total_cmp(&p[j].abs())).unwrap_or(0);
    let mut e = DVector::zeros(3);
    e[k] = 1.0;
    let q1 = (&e - &p * p.dot(&e)).normalize();
    let q2 = DVector::from_vec(vec![
        p[1] * q1[2] - p[2] * q1[1],
        p[2] * q1[0] - p[0] * q1[2],
        p[0] * q1[1] - p[1] * q1[0],
    ]);
    RealMatrix::from_columns(&[q1, q2, p])
}

/// Tangent space `T(G_H)` on the parameter side, `W · L · W⁻¹` with `L` skew.
pub fn tangent_space(c: &SymmetryClassification) -> Vec<RealMatrix> {
    let n = c.conjugacy_w.nrows();
    let conj = |l: RealMatrix| &c.conjugacy_w * l * &c.w_inv;
    let full = |n: usize| {
        let id = identity(n);
        let mut out = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                out.push(conj(plane_generator(&id, a, b)));
            }
        }
        out
    };
    match &c.group_type {
        GroupType::Minimal | GroupType::Trivial { .. } | GroupType::T3a | GroupType::T3b { .. } | GroupType::T3c { .. } => {
            Vec::new()
        }
        GroupType::Rotational | GroupType::Maximal | GroupType::T3e => full(n),
        GroupType::T3d { p1, p2, p3 } => {
            let f = RealMatrix::from_columns(&[p1.clone(), p2.clone(), p3.clone()]);
            vec![conj(plane_generator(&f, 0, 1))]
        }
        GroupType::T3f { p } => vec![conj(plane_generator(&frame_about(p), 0, 1))],
        GroupType::General { .. } => c.lie_basis.iter().map(|l| conj(l.clone())).collect(),
    }
}

pub fn exponent_set(p: &SpectralParams, c: &SymmetryClassification) -> ExponentSet {
    let tangent_basis = tangent_space(c);
    ExponentSet { base_exponent: p.h(), unique: tangent_basis.is_empty(), tangent_basis }
}

/// Least-squares `H₀ = H + Δ`, `Δ ∈ T(G_H)`, minimizing `Σ_C ‖H₀C − CH₀‖²`
/// over the finite elements and tangent generators `C`.
pub fn commuting_exponent(p: &SpectralParams, c: &SymmetryClassification) -> CommutingExponent {
    let h = p.h();
    let tangent = tangent_space(c);
    let mut gens = c.elements_params_side();
    gens.extend(tangent.iter().cloned());
    let n = p.n;
    let k = tangent.len();
    let rows = gens.len() * n * n;
    let mut a = RealMatrix::zeros(rows, k.max(1));
    let mut b = DVector::zeros(rows);
    for (g, cm) in gens.iter().enumerate() {
        let base = &h * cm - cm * &h;
        for (r, v) in base.iter().enumerate() {
            b[g * n * n + r] = -v;
        }
        for (j, dlt) in tangent.iter().enumerate() {
            let col = dlt * cm - cm * dlt;
            for (r, v) in col.iter().enumerate() {
                a[(g * n * n + r, j)] = *v;
            }
        }
    }
    let mut h0 = h.clone();
    if k > 0 {
        if let Ok(coef) = a.svd(true, true).solve(&b, 1e-12) {
            for (j, dlt) in tangent.iter().enumerate() {
                h0 += dlt * coef[j];
            }
        }
    }
    let residual = gens.iter().map(|cm| (&h0 * cm - cm * &h0).norm()).fold(0.0, f64::max);
    let flagged = residual > 1e-8 * (1.0 + h0.norm());
    CommutingExponent { h0, residual, flagged }
}

pub fn exponent_report(p: &SpectralParams, c: &SymmetryClassification) -> ExponentReport {
    let e = exponent_set(p, c);
    let h0 = commuting_exponent(p, c);
    ExponentReport {
        h: to_rows(&e.base_exponent),
        tangent_basis: e.tangent_basis.iter().map(to_rows).collect(),
        unique: e.unique,
        h0: to_rows(&h0.h0),
        h0_residual: h0.residual,
    }
}

/// Default grid of steps along each tangent direction.
pub const T_GRID: [f64; 4] = [-1.0, -0.5, 0.5, 1.0];

/// Largest relative change of `x^{−(D+tΔ)} AA* x^{−(D+tΔ)*}` against
/// `x^{−D} AA* x^{−D*}` over tangent generators `Δ`, steps `t` and points `x`.
/// Returns 0 when the tangent space is trivial.
pub fn density_invariance_check(
    p: &SpectralParams,
    c: &SymmetryClassification,
    t_grid: &[f64],
    xs: &[f64],
) -> Result<f64> {
    let tangent = tangent_space(c);
    let aa = p.aa_star();
    let mut worst = 0.0f64;
    for &x in xs {
        let g0 = mat_power(&(-&p.d), x)?;
        let f0 = aa.left_real(&g0).right_real(&g0.transpose());
        for dlt in &tangent {
            for &t in t_grid {
                let g = mat_power(&(-(&p.d + dlt * t)), x)?;
                let f = aa.left_real(&g).right_real(&g.transpose());
                worst = worst.max(f.sub(&f0).norm() / f0.norm());
            }
        }
    }
    Ok(worst)
}
