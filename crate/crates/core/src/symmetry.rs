//! Symmetry-group computation.
//!
//! Every decision is taken on the W-conjugated problem, where the group is a
//! closed subgroup of `O(n)`: `G_H = W (∩ₓ G(Π_x) ∩ G(Π_I)) W⁻¹`. Candidate
//! elements are always checked against the spectral-density relation before
//! they are reported.

use nalgebra::{DVector, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::commutant::{
    centralizer_structure, commutant_skew_basis, in_l_invar, sign_matrices, skew_centralizer_structure, so_basis,
};
use crate::error::{Error, Result};
use crate::matfun::{expm, identity, j2, mat_power, spectral_norm, sym_eig, to_rows, ComplexMatrix, RealMatrix};
use crate::params::{DerivedParams, PiFamily, SpectralParams};
use crate::tol::ToleranceConfig;

const PROBE_SEED: u64 = 0x0f_b3;
const TANGENT_STEPS: [f64; 4] = [-1.0, -0.1, 0.1, 1.0];

#[derive(Debug, Clone, PartialEq)]
pub enum GroupType {
    Minimal,
    Trivial { p1: DVector<f64>, p2: DVector<f64> },
    Rotational,
    Maximal,
    T3a,
    T3b { p: DVector<f64> },
    T3c { p1: DVector<f64>, p2: DVector<f64>, p3: DVector<f64> },
    T3d { p1: DVector<f64>, p2: DVector<f64>, p3: DVector<f64> },
    T3e,
    T3f { p: DVector<f64> },
    General { lie_dim: usize, verified_elements: usize },
}

impl GroupType {
    pub fn tag(&self) -> &'static str {
        match self {
            GroupType::Minimal => "Minimal",
            GroupType::Trivial { .. } => "Trivial",
            GroupType::Rotational => "Rotational",
            GroupType::Maximal => "Maximal",
            GroupType::T3a => "T3a",
            GroupType::T3b { .. } => "T3b",
            GroupType::T3c { .. } => "T3c",
            GroupType::T3d { .. } => "T3d",
            GroupType::T3e => "T3e",
            GroupType::T3f { .. } => "T3f",
            GroupType::General { .. } => "General",
        }
    }

    pub fn axes(&self) -> Vec<DVector<f64>> {
        match self {
            GroupType::Trivial { p1, p2 } => vec![p1.clone(), p2.clone()],
            GroupType::T3b { p } | GroupType::T3f { p } => vec![p.clone()],
            GroupType::T3c { p1, p2, p3 } | GroupType::T3d { p1, p2, p3 } => vec![p1.clone(), p2.clone(), p3.clone()],
            _ => Vec::new(),
        }
    }

    /// True for the minimal types `{±I}`.
    pub fn is_minimal(&self) -> bool {
        matches!(self, GroupType::Minimal | GroupType::T3a)
    }
}

#[derive(Debug, Clone)]
pub struct SymmetryClassification {
    pub group_type: GroupType,
    pub conjugacy_w: RealMatrix,
    pub w_inv: RealMatrix,
    pub lie_dimension: usize,
    /// Skew generators of the Lie algebra on the W-conjugated side.
    pub lie_basis: Vec<RealMatrix>,
    /// Orthogonal representatives on the W-conjugated side.
    pub finite_elements: Vec<RealMatrix>,
    pub diagnostics: Vec<String>,
    pub ambiguous: bool,
}

impl SymmetryClassification {
    /// `W O W⁻¹` for each finite element.
    pub fn elements_params_side(&self) -> Vec<RealMatrix> {
        self.finite_elements.iter().map(|o| &self.conjugacy_w * o * &self.w_inv).collect()
    }

    pub fn report(&self) -> ClassificationReport {
        ClassificationReport {
            group_type: self.group_type.tag().to_string(),
            lie_dimension: self.lie_dimension,
            axes: self.group_type.axes().iter().map(|v| v.iter().cloned().collect()).collect(),
            finite_elements: self.finite_elements.iter().map(to_rows).collect(),
            conjugacy_w: to_rows(&self.conjugacy_w),
            diagnostics: self.diagnostics.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassificationReport {
    pub group_type: String,
    pub lie_dimension: usize,
    pub axes: Vec<Vec<f64>>,
    pub finite_elements: Vec<Vec<Vec<f64>>>,
    #[serde(rename = "conjugacy_W")]
    pub conjugacy_w: Vec<Vec<f64>>,
    pub diagnostics: Vec<String>,
}

/// Spectral densities `x^{−D} AA* x^{−Dᵀ}` cached at the verification points.
pub struct Verifier {
    densities: Vec<ComplexMatrix>,
    tol: f64,
}

impl Verifier {
    pub fn new(p: &SpectralParams, sample_points: &[f64], tol: f64) -> Result<Self> {
        let aa = p.aa_star();
        let mut densities = vec![aa.clone()];
        for &x in sample_points {
            let g = mat_power(&(-&p.d), x)?;
            densities.push(aa.left_real(&g).right_real(&g.transpose()));
        }
        Ok(Self { densities, tol })
    }

    /// Parameter-side test `C f(x) Cᵀ = f(x)`.
    pub fn check(&self, c: &RealMatrix) -> bool {
        self.densities.iter().all(|f| {
            let g = f.left_real(c).right_real(&c.transpose());
            g.sub(f).norm() <= self.tol * f.norm()
        })
    }

    /// O-side test for `W O W⁻¹`.
    pub fn check_o(&self, d: &DerivedParams, o: &RealMatrix) -> bool {
        self.check(&d.to_params_side(o))
    }
}

/// `C x^{−D} AA* x^{−D*} C* = x^{−D} AA* x^{−D*}` at `x = 1` and every sample point.
pub fn is_symmetry_element(c: &RealMatrix, p: &SpectralParams, sample_points: &[f64], tol: f64) -> Result<bool> {
    if c.shape() != (p.n, p.n) {
        return Err(Error::Shape(format!("candidate is {:?}", c.shape())));
    }
    Ok(Verifier::new(p, sample_points, tol)?.check(c))
}

#[derive(Debug, Clone, Copy)]
pub struct MaximalTest {
    pub is_maximal: bool,
    pub d_value: Option<f64>,
    pub residual: f64,
}

/// Maximal type iff `Im(AA*) = 0` and `−(D − dI)Re(AA*) = Re(AA*)(Dᵀ − dI)` for some real `d`.
pub fn maximal_test(p: &SpectralParams, tol: f64) -> MaximalTest {
    let re = p.re_aa();
    let im = p.im_aa();
    let lhs = &p.d * &re + &re * p.d.transpose();
    // least squares for 2d·Re = D Re + Re Dᵀ
    let d_value = lhs.dot(&re) / (2.0 * re.dot(&re));
    let residual = (&lhs - &re * (2.0 * d_value)).norm();
    let im_ok = im.norm() <= tol * re.norm();
    let eq_ok = residual <= tol * re.norm() * (1.0 + p.d.norm());
    let is_maximal = im_ok && eq_ok;
    MaximalTest { is_maximal, d_value: eq_ok.then_some(d_value), residual }
}

#[derive(Debug, Clone, Copy)]
pub struct MinimalTest {
    pub in_m: bool,
    pub s_gap: f64,
    pub l_block_connected: bool,
}

/// Sufficient test for the minimal type: `S = (M+Mᵀ)/2` has a simple spectrum
/// and `L = (M−Mᵀ)/2` leaves no proper span of eigenvectors of `S` invariant.
pub fn minimal_test(d: &DerivedParams, tol: &ToleranceConfig) -> MinimalTest {
    let s = (&d.m + d.m.transpose()) * 0.5;
    let l = (&d.m - d.m.transpose()) * 0.5;
    let e = match sym_eig(&s, tol) {
        Ok(e) => e,
        Err(_) => return MinimalTest { in_m: false, s_gap: 0.0, l_block_connected: false },
    };
    let s_gap = e.eigenvalues.windows(2).map(|w| w[0] - w[1]).fold(f64::INFINITY, f64::min);
    let scale = e.eigenvalues.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    let distinct = s_gap > tol.cluster * scale;
    // roundoff in OᵀLO scales with ‖M‖, so the edge cut must too
    let (ln, mn) = (spectral_norm(&l), spectral_norm(&d.m));
    let delta = if ln > 0.0 { tol.graph * (mn / ln).max(1.0) } else { f64::INFINITY };
    let l_block_connected = ln > 0.0 && !in_l_invar(&l, &e.eigenvectors, delta);
    MinimalTest { in_m: distinct && l_block_connected, s_gap, l_block_connected }
}

fn is_scalar(b: &RealMatrix, tol: f64) -> bool {
    let n = b.nrows();
    let t = b.trace() / n as f64;
    (b - identity(n) * t).norm() <= tol * b.norm().max(1e-300)
}

/// First non-negligible component positive.
fn canonical_sign(v: DVector<f64>) -> DVector<f64> {
    match v.iter().find(|x| x.abs() > 1e-8) {
        Some(&x) if x < 0.0 => -v,
        _ => v,
    }
}

fn push_unique(list: &mut Vec<RealMatrix>, m: RealMatrix) {
    if !list.iter().any(|o| (o - &m).norm() < 1e-9) {
        list.push(m);
    }
}

struct Ctx<'a> {
    p: &'a SpectralParams,
    d: &'a DerivedParams,
    fam: &'a PiFamily,
    tol: ToleranceConfig,
    verifier: Verifier,
    diagnostics: Vec<String>,
    ambiguous: bool,
}

impl<'a> Ctx<'a> {
    fn new(p: &'a SpectralParams, d: &'a DerivedParams, fam: &'a PiFamily, tol: ToleranceConfig) -> Result<Self> {
        let verifier = Verifier::new(p, &fam.sample_points, tol.verify)?;
        let mut diagnostics = fam.warnings.clone();
        let ambiguous = !fam.stable;
        if !fam.stable {
            diagnostics.push("span stabilization failed; classification may be incomplete".into());
        }
        Ok(Self { p, d, fam, tol, verifier, diagnostics, ambiguous })
    }

    fn pi_i_nonzero(&self) -> bool {
        // Π₁ = I, so Π_I is measured against unit scale.
        self.fam.pi_i.norm() > self.tol.sym * (self.p.n as f64).sqrt()
    }

    /// Symmetric members that determine `∩ₓ G(Π_x)`.
    fn symmetric_family(&self) -> Vec<RealMatrix> {
        self.fam.span_basis.clone()
    }

    fn lie_algebra(&mut self) -> Result<Vec<RealMatrix>> {
        let n = self.p.n;
        let mut fam = self.symmetric_family();
        if self.pi_i_nonzero() {
            fam.push(self.fam.pi_i.clone());
        }
        if fam.is_empty() {
            fam.push(identity(n));
        }
        let b = commutant_skew_basis(&fam, &self.tol)?;
        if b.ambiguous {
            self.ambiguous = true;
            self.diagnostics.push("a singular value of the commutation map lies near the nullspace cut".into());
        }
        Ok(b.elements)
    }

    fn ok(&self, o: &RealMatrix) -> bool {
        self.verifier.check_o(self.d, o)
    }

    fn finish(mut self, group_type: GroupType, lie_basis: Vec<RealMatrix>, finite: Vec<RealMatrix>) -> SymmetryClassification {
        let n = self.p.n;
        let mut finite_elements = Vec::new();
        for o in [identity(n), -identity(n)].into_iter().chain(finite) {
            push_unique(&mut finite_elements, o);
        }
        let mut group_type = group_type;
        let mut lie_basis = lie_basis;
        let bad_elem = finite_elements.iter().any(|o| !self.ok(o));
        let bad_gen = lie_basis.iter().any(|l| {
            TANGENT_STEPS.iter().any(|t| expm(&(l * *t)).map(|e| !self.ok(&e)).unwrap_or(true))
        });
        if bad_elem || bad_gen {
            self.diagnostics.push(format!(
                "candidate {} failed verification against the spectral density; downgraded",
                group_type.tag()
            ));
            self.ambiguous = true;
            finite_elements.retain(|o| self.ok(o));
            lie_basis.clear();
            group_type = match n {
                2 => GroupType::Minimal,
                3 => GroupType::T3a,
                _ => GroupType::General { lie_dim: 0, verified_elements: finite_elements.len() },
            };
            finite_elements.retain(|o| (o - identity(n)).norm() < 1e-9 || (o + identity(n)).norm() < 1e-9);
        }
        if let GroupType::General { verified_elements, .. } = &mut group_type {
            *verified_elements = finite_elements.len();
        }
        SymmetryClassification {
            group_type,
            conjugacy_w: self.d.w.clone(),
            w_inv: self.d.w_inv.clone(),
            lie_dimension: lie_basis.len(),
            lie_basis,
            finite_elements,
            diagnostics: self.diagnostics,
            ambiguous: self.ambiguous,
        }
    }
}

/// Classification for `n = 2`: Minimal, Trivial, Rotational or Maximal.
pub fn classify2(p: &SpectralParams, d: &DerivedParams, fam: &PiFamily) -> Result<SymmetryClassification> {
    classify2_with(p, d, fam, p.tol)
}

fn classify2_with(p: &SpectralParams, d: &DerivedParams, fam: &PiFamily, tol: ToleranceConfig) -> Result<SymmetryClassification> {
    if p.n != 2 {
        return Err(Error::Precondition(format!("classify2 needs n = 2, got {}", p.n)));
    }
    let mut ctx = Ctx::new(p, d, fam, tol)?;
    let lie = ctx.lie_algebra()?;
    if minimal_test(d, &tol).in_m {
        return Ok(ctx.finish(GroupType::Minimal, Vec::new(), Vec::new()));
    }
    let gen = vec![j2() * std::f64::consts::FRAC_1_SQRT_2];
    let span = ctx.symmetric_family();
    let nonscalar = span.iter().find(|b| !is_scalar(b, tol.sym));
    let pi_i_nonzero = ctx.pi_i_nonzero();
    let result = match nonscalar {
        None if !pi_i_nonzero => {
            let refl = RealMatrix::from_diagonal(&DVector::from_vec(vec![1.0, -1.0]));
            (GroupType::Maximal, gen, vec![refl])
        }
        None => (GroupType::Rotational, gen, Vec::new()),
        Some(b) => {
            let frame = sym_eig(b, &tol)?.eigenvectors;
            let diagonal = span.iter().all(|s| {
                let t = frame.transpose() * s * &frame;
                t[(0, 1)].abs() <= tol.sym.max(tol.null) * s.norm()
            });
            if diagonal && !pi_i_nonzero {
                let p1 = canonical_sign(frame.column(0).into_owned());
                let p2 = canonical_sign(frame.column(1).into_owned());
                (GroupType::Trivial { p1, p2 }, Vec::new(), sign_matrices(&frame))
            } else {
                (GroupType::Minimal, Vec::new(), Vec::new())
            }
        }
    };
    if result.1.len() != lie.len() {
        ctx.diagnostics.push(format!(
            "commutant dimension {} disagrees with the {} decision",
            lie.len(),
            result.0.tag()
        ));
        ctx.ambiguous = true;
    }
    Ok(ctx.finish(result.0, result.1, result.2))
}

/// `Rot_π(q) = 2qqᵀ − I`.
pub fn rot_pi(q: &DVector<f64>) -> RealMatrix {
    let q = q.normalize();
    &q * q.transpose() * 2.0 - identity(q.len())
}

/// `Ref₀(p) = I − 2ppᵀ`.
pub fn ref0(p: &DVector<f64>) -> RealMatrix {
    -rot_pi(p)
}

/// Axis of a nonzero element of `so(3)`.
fn axis_of_skew(k: &RealMatrix) -> DVector<f64> {
    canonical_sign(DVector::from_vec(vec![k[(2, 1)], k[(0, 2)], k[(1, 0)]]).normalize())
}

fn cross(a: &DVector<f64>, b: &DVector<f64>) -> DVector<f64> {
    let a3 = Vector3::new(a[0], a[1], a[2]);
    let b3 = Vector3::new(b[0], b[1], b[2]);
    let c = a3.cross(&b3);
    DVector::from_vec(vec![c[0], c[1], c[2]])
}

fn parallel(a: &DVector<f64>, b: &DVector<f64>) -> bool {
    a.dot(b).abs() > 1.0 - 1e-9
}

fn push_axis(list: &mut Vec<DVector<f64>>, v: DVector<f64>) {
    let v = canonical_sign(v.normalize());
    if !list.iter().any(|a| parallel(a, &v)) {
        list.push(v);
    }
}

fn same_frame(f: &RealMatrix, g: &RealMatrix) -> bool {
    (0..3).all(|i| (0..3).any(|j| parallel(&f.column(i).into_owned(), &g.column(j).into_owned())))
}

/// Random unit vectors orthogonal to `p`, from a fixed seed.
fn probe_vectors(p: &DVector<f64>, count: usize) -> Vec<DVector<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(PROBE_SEED);
    let mut out = Vec::new();
    while out.len() < count {
        let g = DVector::from_fn(p.len(), |_, _| rng.sample::<f64, _>(StandardNormal));
        let q = &g - p * p.dot(&g);
        if q.norm() > 0.1 {
            out.push(q.normalize());
        }
    }
    out
}

/// Classification for `n = 3`: types T3a–T3f.
pub fn classify3(p: &SpectralParams, d: &DerivedParams, fam: &PiFamily) -> Result<SymmetryClassification> {
    classify3_with(p, d, fam, p.tol)
}

fn classify3_with(p: &SpectralParams, d: &DerivedParams, fam: &PiFamily, tol: ToleranceConfig) -> Result<SymmetryClassification> {
    if p.n != 3 {
        return Err(Error::Precondition(format!("classify3 needs n = 3, got {}", p.n)));
    }
    let mut ctx = Ctx::new(p, d, fam, tol)?;
    let lie = ctx.lie_algebra()?;
    if minimal_test(d, &tol).in_m {
        if !lie.is_empty() {
            ctx.diagnostics.push("minimal certificate disagrees with the commutant dimension".into());
            ctx.ambiguous = true;
        }
        return Ok(ctx.finish(GroupType::T3a, Vec::new(), Vec::new()));
    }
    match lie.len() {
        3 => Ok(ctx.finish(GroupType::T3e, so_basis(3), Vec::new())),
        1 => {
            let axis = axis_of_skew(&lie[0]);
            let generator = skew_about(&axis);
            let probes = probe_vectors(&axis, 3);
            let passed: Vec<bool> = probes.iter().map(|q| ctx.ok(&rot_pi(q))).collect();
            let all = passed.iter().all(|&b| b);
            let none = passed.iter().all(|&b| !b);
            let base = vec![ref0(&axis), rot_pi(&axis)];
            if all {
                let p1 = probes[0].clone();
                let p2 = cross(&axis, &p1);
                let mut elems = base;
                elems.push(rot_pi(&p1));
                elems.push(ref0(&p1));
                Ok(ctx.finish(GroupType::T3d { p1, p2, p3: axis }, vec![generator], elems))
            } else {
                if !none {
                    ctx.diagnostics.push("Rot_pi probes disagree; reporting the smaller group".into());
                    ctx.ambiguous = true;
                }
                Ok(ctx.finish(GroupType::T3f { p: axis }, vec![generator], base))
            }
        }
        0 => classify3_finite(ctx),
        k => {
            ctx.diagnostics.push(format!("commutant dimension {k} is not a subalgebra dimension of so(3)"));
            ctx.ambiguous = true;
            Ok(ctx.finish(GroupType::General { lie_dim: k, verified_elements: 0 }, lie, Vec::new()))
        }
    }
}

/// Unit generator of rotations about `p`.
fn skew_about(p: &DVector<f64>) -> RealMatrix {
    let p = p.normalize();
    let k = RealMatrix::from_row_slice(3, 3, &[0.0, -p[2], p[1], p[2], 0.0, -p[0], -p[1], p[0], 0.0]);
    k * std::f64::consts::FRAC_1_SQRT_2
}

fn classify3_finite(mut ctx: Ctx<'_>) -> Result<SymmetryClassification> {
    let tol = ctx.tol;
    let mut frames: Vec<RealMatrix> = Vec::new();
    let mut axes: Vec<DVector<f64>> = Vec::new();
    let members: Vec<&RealMatrix> = ctx
        .fam
        .pi_x_values
        .iter()
        .chain(ctx.fam.span_basis.iter())
        .chain(ctx.fam.pi_m_values.iter())
        .collect();
    for m in members {
        let c = centralizer_structure(m, &tol)?;
        if c.ambiguous {
            ctx.ambiguous = true;
            ctx.diagnostics.push(format!("near-degenerate spectrum, cluster values {:?}", c.cluster_values));
        }
        if c.is_simple() {
            if !frames.iter().any(|f| same_frame(f, &c.eigenbasis)) {
                frames.push(c.eigenbasis.clone());
            }
        } else if c.partition.len() == 2 {
            let single = if c.partition[0] == 1 { 0 } else { 1 };
            let col = c.cluster_columns(single).start;
            push_axis(&mut axes, c.eigenbasis.column(col).into_owned());
        }
    }
    if ctx.pi_i_nonzero() {
        let s = skew_centralizer_structure(&ctx.fam.pi_i, &tol)?;
        if s.zero_block_size == 1 {
            push_axis(&mut axes, s.basis_change.column(2).into_owned());
        }
    }
    for i in 0..axes.len() {
        for j in 0..axes.len() {
            if i == j {
                continue;
            }
            let (r, s) = (&axes[i], &axes[j]);
            let q = cross(r, s).normalize();
            let f = RealMatrix::from_columns(&[q.clone(), cross(r, &q), r.clone()]);
            if !frames.iter().any(|g| same_frame(g, &f)) {
                frames.push(f);
            }
        }
    }
    let mut best: Option<(RealMatrix, Vec<usize>)> = None;
    for f in &frames {
        let signs = sign_matrices(f);
        let survivors: Vec<usize> = (0..8).filter(|&k| ctx.ok(&signs[k])).collect();
        if best.as_ref().map_or(true, |(_, b)| survivors.len() > b.len()) {
            best = Some((f.clone(), survivors));
        }
    }
    let Some((frame, survivors)) = best else {
        ctx.diagnostics.push("no candidate frame found; reporting {±I}".into());
        return Ok(ctx.finish(GroupType::T3a, Vec::new(), Vec::new()));
    };
    let signs = sign_matrices(&frame);
    let col = |k: usize| canonical_sign(frame.column(k).into_owned());
    let elems: Vec<RealMatrix> = survivors.iter().map(|&k| signs[k].clone()).collect();
    match survivors.len() {
        8 => Ok(ctx.finish(GroupType::T3c { p1: col(0), p2: col(1), p3: col(2) }, Vec::new(), elems)),
        4 => {
            // the survivor flipping exactly one column is Ref₀(p)
            let single = survivors.iter().find(|&&k| (k as u32).count_ones() == 1);
            match single {
                Some(&k) => {
                    let p = col(k.trailing_zeros() as usize);
                    Ok(ctx.finish(GroupType::T3b { p }, Vec::new(), elems))
                }
                None => {
                    ctx.diagnostics.push("four survivors without a reflection".into());
                    ctx.ambiguous = true;
                    Ok(ctx.finish(GroupType::T3a, Vec::new(), Vec::new()))
                }
            }
        }
        2 => Ok(ctx.finish(GroupType::T3a, Vec::new(), Vec::new())),
        k => {
            ctx.diagnostics.push(format!("{k} sign matrices survived, expected 2, 4 or 8"));
            ctx.ambiguous = true;
            Ok(ctx.finish(GroupType::T3a, Vec::new(), Vec::new()))
        }
    }
}

/// Lie dimension plus verified sign-matrix candidates; exact types for `n ≤ 3`.
pub fn classify_general(p: &SpectralParams, d: &DerivedParams, fam: &PiFamily) -> Result<SymmetryClassification> {
    classify_general_with(p, d, fam, p.tol)
}

fn classify_general_with(p: &SpectralParams, d: &DerivedParams, fam: &PiFamily, tol: ToleranceConfig) -> Result<SymmetryClassification> {
    match p.n {
        2 => return classify2_with(p, d, fam, tol),
        3 => return classify3_with(p, d, fam, tol),
        n if n < 2 => return Err(Error::Precondition("classification needs n >= 2".into())),
        _ => {}
    }
    let mut ctx = Ctx::new(p, d, fam, tol)?;
    let lie = ctx.lie_algebra()?;
    let mut elems = Vec::new();
    if p.n <= 12 {
        for m in fam.pi_x_values.iter() {
            let c = centralizer_structure(m, &tol)?;
            if c.ambiguous {
                ctx.ambiguous = true;
                ctx.diagnostics.push("near-degenerate spectrum in a sampled Pi_x".into());
            }
            if !c.is_simple() {
                continue;
            }
            for s in sign_matrices(&c.eigenbasis) {
                if !elems.iter().any(|o: &RealMatrix| (o - &s).norm() < 1e-9) && ctx.ok(&s) {
                    elems.push(s);
                }
            }
        }
    } else {
        ctx.diagnostics.push("sign-matrix enumeration skipped for n > 12".into());
    }
    let lie_dim = lie.len();
    Ok(ctx.finish(GroupType::General { lie_dim, verified_elements: 0 }, lie, elems))
}

/// Full classification with a dual report when a threshold decision is borderline:
/// the problem is re-run with the clustering and nullspace cuts scaled by 4
/// in each direction and any disagreement is recorded.
pub fn classify(p: &SpectralParams, d: &DerivedParams, fam: &PiFamily) -> Result<SymmetryClassification> {
    let mut c = classify_general_with(p, d, fam, p.tol)?;
    if c.ambiguous {
        let scaled = |f: f64| ToleranceConfig { cluster: p.tol.cluster * f, null: p.tol.null * f, ..p.tol };
        let merge = classify_general_with(p, d, fam, scaled(4.0))?;
        let split = classify_general_with(p, d, fam, scaled(0.25))?;
        c.diagnostics.push(format!(
            "dual report: merge hypothesis gives {}, split hypothesis gives {}",
            merge.group_type.tag(),
            split.group_type.tag()
        ));
    }
    Ok(c)
}

#[derive(Debug, Clone)]
pub struct Analysis {
    pub derived: DerivedParams,
    pub family: PiFamily,
    pub classification: SymmetryClassification,
}

/// `derive`, `build_pi_family` and `classify` with default settings.
pub fn analyze(p: &SpectralParams) -> Result<Analysis> {
    let derived = crate::params::derive(p)?;
    let family = crate::params::build_pi_family(&derived, crate::params::PiFamilyConfig::default(), &p.tol)?;
    let classification = classify(p, &derived, &family)?;
    Ok(Analysis { derived, family, classification })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{build_pi_family, derive, validate, PiFamilyConfig, ValidationFlags};

    fn diag(v: &[f64]) -> RealMatrix {
        RealMatrix::from_diagonal(&DVector::from_vec(v.to_vec()))
    }

    fn run(d: RealMatrix, a_re: RealMatrix, a_im: RealMatrix) -> SymmetryClassification {
        let p = validate(d, ComplexMatrix::new(a_re, a_im).unwrap(), ValidationFlags::default(), ToleranceConfig::default())
            .unwrap();
        let dp = derive(&p).unwrap();
        let fam = build_pi_family(&dp, PiFamilyConfig::default(), &p.tol).unwrap();
        classify(&p, &dp, &fam).unwrap()
    }

    fn real(d: RealMatrix, a: RealMatrix) -> SymmetryClassification {
        let n = d.nrows();
        run(d, a, RealMatrix::zeros(n, n))
    }

    #[test]
    fn is_symmetry_element_examples() {
        let p = validate(diag(&[0.2, 0.4]), ComplexMatrix::from_real(identity(2)), ValidationFlags::default(), ToleranceConfig::default()).unwrap();
        let xs = crate::params::sample_points(10);
        assert!(is_symmetry_element(&identity(2), &p, &xs, 1e-8).unwrap());
        assert!(is_symmetry_element(&-identity(2), &p, &xs, 1e-8).unwrap());
        assert!(is_symmetry_element(&diag(&[1.0, -1.0]), &p, &xs, 1e-8).unwrap());
        assert!(!is_symmetry_element(&crate::matfun::rotation2(std::f64::consts::FRAC_PI_4), &p, &xs, 1e-8).unwrap());
    }

    #[test]
    fn maximal_test_examples() {
        let p = validate(identity(3) * 0.3, ComplexMatrix::from_real(identity(3)), ValidationFlags::default(), ToleranceConfig::default()).unwrap();
        let m = maximal_test(&p, 1e-10);
        assert!(m.is_maximal);
        assert!((m.d_value.unwrap() - 0.3).abs() < 1e-12 && m.residual < 1e-10);
        let p = validate(diag(&[0.2, 0.4]), ComplexMatrix::from_real(identity(2)), ValidationFlags::default(), ToleranceConfig::default()).unwrap();
        assert!(!maximal_test(&p, 1e-10).is_maximal);
    }

    #[test]
    fn minimal_test_examples() {
        let tol = ToleranceConfig::default();
        let mk = |l: RealMatrix| {
            let p = validate(diag(&[0.1, 0.2, 0.3]) + l, ComplexMatrix::from_real(identity(3)), ValidationFlags::default(), tol)
                .unwrap();
            minimal_test(&derive(&p).unwrap(), &tol)
        };
        let dense = RealMatrix::from_row_slice(3, 3, &[0.0, 0.05, 0.05, -0.05, 0.0, 0.05, -0.05, -0.05, 0.0]);
        assert!(mk(dense).in_m);
        let a = RealMatrix::from_row_slice(3, 3, &[0.0, 0.05, 0.0, -0.05, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert!(!mk(a).in_m);
        assert!(!mk(RealMatrix::zeros(3, 3)).in_m);
    }

    #[test]
    fn classify2_examples() {
        let c = real(diag(&[0.2, 0.4]), identity(2));
        assert_eq!(c.group_type.tag(), "Trivial");
        assert_eq!(c.finite_elements.len(), 4);

        let c = real(identity(2) * 0.3, identity(2));
        assert_eq!(c.group_type.tag(), "Maximal");
        assert_eq!(c.lie_dimension, 1);

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let r = crate::matfun::rotation2(std::f64::consts::FRAC_PI_3);
        let c = run(identity(2) * 0.3, r * s, identity(2) * s);
        assert_eq!(c.group_type.tag(), "Rotational");

        let m = diag(&[0.1, 0.3]) + j2() * 0.2;
        let c = real(m, identity(2));
        assert_eq!(c.group_type.tag(), "Minimal");
        assert_eq!(c.finite_elements.len(), 2);
    }

    #[test]
    fn classify3_examples() {
        let c = real(diag(&[0.1, 0.2, 0.35]), diag(&[1.0, 2.0, 1.5]));
        assert_eq!(c.group_type.tag(), "T3c");
        assert_eq!(c.finite_elements.len(), 8);

        let c = real(diag(&[0.2, 0.2, 0.35]), diag(&[1.0, 1.5, 2.0]));
        assert_eq!(c.group_type.tag(), "T3d", "{:?}", c.diagnostics);

        let jd = RealMatrix::from_row_slice(3, 3, &[0.1, 0.0, 0.0, 1.0, 0.1, 0.0, 0.0, 0.0, 0.1]);
        let c = real(jd, identity(3));
        match &c.group_type {
            GroupType::T3b { p } => assert!((p - DVector::from_vec(vec![0.0, 0.0, 1.0])).norm() < 1e-8),
            other => panic!("{other:?}"),
        }

        let c = real(identity(3) * 0.3, identity(3));
        assert_eq!(c.group_type.tag(), "T3e");
        assert_eq!(c.lie_dimension, 3);
    }

    #[test]
    fn classify_general_examples() {
        let c = real(identity(4) * 0.2, identity(4));
        assert_eq!(c.lie_dimension, 6);
        let c = real(diag(&[0.1, 0.2, 0.3, 0.4]), identity(4));
        assert_eq!(c.lie_dimension, 0);
        assert_eq!(c.finite_elements.len(), 16);
    }
}
