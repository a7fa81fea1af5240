//! Built-in reproduction suite behind `ofbm verify-paper`.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{apply_tol, fixture, FIXTURES};
use crate::commutant::{commutant_skew_basis, in_l_invar};
use crate::error::{Error, Result};
use crate::exponents::{density_invariance_check, exponent_set};
use crate::matfun::{identity, j2, random_orthogonal, spectral_norm, ComplexMatrix, RealMatrix};
use crate::params::{bch_remainder, pi_x, validate, ParamsDoc, SpectralParams, ValidationFlags};
use crate::process::{
    complex_gamma, covariance, oss_check, simulate, time_domain_f, CovarianceEngine, QuadratureConfig,
};
use crate::symmetry::{analyze, maximal_test, minimal_test, GroupType};
use crate::tol::ToleranceConfig;

pub struct Criterion {
    pub id: usize,
    pub name: &'static str,
}

pub const CRITERIA: [Criterion; 15] = [
    Criterion { id: 1, name: "example 5.2 is Trivial with the four sign elements" },
    Criterion { id: 2, name: "example 5.1 is Rotational, exponents H + W so(2) W^-1" },
    Criterion { id: 3, name: "single-parameter OFBM is Maximal (n=2) and T3e (n=3)" },
    Criterion { id: 4, name: "example 5.3 is T3b about e3, Pi_x closed form" },
    Criterion { id: 5, name: "examples 5.4/5.5/5.6 are T3c/T3d/T3f" },
    Criterion { id: 6, name: "minimal-type certificate and forbidden block forms" },
    Criterion { id: 7, name: "commutant dimensions" },
    Criterion { id: 8, name: "BCH remainder is third order" },
    Criterion { id: 9, name: "operator self-similarity of the covariance" },
    Criterion { id: 10, name: "FBM covariance oracle" },
    Criterion { id: 11, name: "spectral density is exponent independent" },
    Criterion { id: 12, name: "time-domain parameter depends on c; complex Gamma" },
    Criterion { id: 13, name: "group type is invariant under orthogonal conjugation" },
    Criterion { id: 14, name: "Monte Carlo variance and reproducible CSV" },
    Criterion { id: 15, name: "invariant-subspace graph test matches enumeration" },
];

#[derive(Debug, Clone)]
pub struct Outcome {
    pub id: usize,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

type Check = (bool, String);

fn load(name: &str, tol: Option<f64>) -> Result<SpectralParams> {
    let text = fixture(name).ok_or_else(|| Error::Validation(format!("no fixture {name}")))?;
    let mut doc = ParamsDoc::from_json(text).map_err(|e| Error::Validation(e.to_string()))?;
    doc.tolerances = Some(apply_tol(doc.tolerances.unwrap_or_default(), tol));
    doc.build(ValidationFlags::default())
}

fn params(d: RealMatrix, a: RealMatrix, tol: Option<f64>) -> Result<SpectralParams> {
    validate(d, ComplexMatrix::from_real(a), ValidationFlags::default(), apply_tol(ToleranceConfig::default(), tol))
}

fn diag(v: &[f64]) -> RealMatrix {
    RealMatrix::from_diagonal(&DVector::from_vec(v.to_vec()))
}

fn same_set(got: &[RealMatrix], want: &[RealMatrix], tol: f64) -> bool {
    got.len() == want.len()
        && want.iter().all(|w| got.iter().any(|g| (g - w).norm() < tol))
        && got.iter().all(|g| want.iter().any(|w| (g - w).norm() < tol))
}

fn axis_err(p: &DVector<f64>, e: &DVector<f64>) -> f64 {
    (p - e).norm().min((p + e).norm())
}

fn e(n: usize, k: usize) -> DVector<f64> {
    let mut v = DVector::zeros(n);
    v[k] = 1.0;
    v
}

fn c1(tol: Option<f64>) -> Result<Check> {
    let c = analyze(&load("example_5_2", tol)?)?.classification;
    let want = [identity(2), -identity(2), diag(&[1.0, -1.0]), diag(&[-1.0, 1.0])];
    let ok = c.group_type.tag() == "Trivial" && same_set(&c.elements_params_side(), &want, 1e-8);
    Ok((ok, format!("type {}, {} elements", c.group_type.tag(), c.finite_elements.len())))
}

fn c2(tol: Option<f64>) -> Result<Check> {
    let p = load("example_5_1", tol)?;
    let a = analyze(&p)?;
    let c = &a.classification;
    let e = exponent_set(&p, c);
    let wjw = &a.derived.w * j2() * &a.derived.w_inv;
    let aligned = e.tangent_basis.len() == 1
        && (e.tangent_basis[0].dot(&wjw).abs() / (e.tangent_basis[0].norm() * wjw.norm()) - 1.0).abs() < 1e-10;
    let ok = c.group_type.tag() == "Rotational" && c.lie_dimension == 1 && aligned && !e.unique;
    Ok((ok, format!("type {}, lie_dim {}, tangent dim {}", c.group_type.tag(), c.lie_dimension, e.tangent_basis.len())))
}

fn c3(tol: Option<f64>) -> Result<Check> {
    let p2 = params(identity(2) * 0.3, identity(2), tol)?;
    let p3 = params(identity(3) * 0.3, identity(3), tol)?;
    let t2 = analyze(&p2)?.classification.group_type.tag();
    let t3 = analyze(&p3)?.classification.group_type.tag();
    let m = maximal_test(&p2, 1e-10);
    let d_ok = m.d_value.is_some_and(|d| (d - 0.3).abs() < 1e-10);
    let ok = t2 == "Maximal" && t3 == "T3e" && m.is_maximal && d_ok && m.residual < 1e-10;
    Ok((ok, format!("n=2 {t2}, n=3 {t3}, d {:?}, residual {:.1e}", m.d_value, m.residual)))
}

fn c4(tol: Option<f64>) -> Result<Check> {
    let a = analyze(&load("example_5_3", tol)?)?;
    let c = &a.classification;
    let axis = match &c.group_type {
        GroupType::T3b { p } => axis_err(p, &e(3, 2)),
        _ => f64::INFINITY,
    };
    let d = 0.1;
    let mut pi_err = 0.0f64;
    for x in [(-1.0f64).exp(), 1.0f64.exp()] {
        let l = x.ln();
        let want = RealMatrix::from_row_slice(3, 3, &[1.0, -l, 0.0, -l, l * l + 1.0, 0.0, 0.0, 0.0, 1.0])
            * x.powf(-2.0 * d);
        pi_err = pi_err.max((pi_x(&a.derived, x)? - want).norm());
    }
    let ok = c.group_type.tag() == "T3b" && axis < 1e-8 && pi_err < 1e-10;
    Ok((ok, format!("type {}, axis error {axis:.1e}, Pi_x error {pi_err:.1e}", c.group_type.tag())))
}

fn c5(tol: Option<f64>) -> Result<Check> {
    let c4 = analyze(&load("example_5_4", tol)?)?.classification;
    let signs: Vec<RealMatrix> = (0..8)
        .map(|m: usize| diag(&[0, 1, 2].map(|k| if m >> k & 1 == 1 { -1.0 } else { 1.0 })))
        .collect();
    let ok4 = c4.group_type.tag() == "T3c" && same_set(&c4.elements_params_side(), &signs, 1e-8);
    let c5 = analyze(&load("example_5_5", tol)?)?.classification;
    let ax5 = match &c5.group_type {
        GroupType::T3d { p3, .. } => axis_err(p3, &e(3, 2)),
        _ => f64::INFINITY,
    };
    let c6 = analyze(&load("example_5_6", tol)?)?.classification;
    let ok = ok4 && ax5 < 1e-8 && c6.group_type.tag() == "T3f";
    Ok((
        ok,
        format!(
            "5.4 {} ({} elements), 5.5 {} (axis error {ax5:.1e}), 5.6 {}",
            c4.group_type.tag(),
            c4.finite_elements.len(),
            c5.group_type.tag(),
            c6.group_type.tag()
        ),
    ))
}

fn c6(tol: Option<f64>) -> Result<Check> {
    let s = diag(&[0.1, 0.2, 0.3]);
    let l = RealMatrix::from_row_slice(3, 3, &[0.0, 0.05, 0.05, -0.05, 0.0, 0.05, -0.05, -0.05, 0.0]);
    let p = params(&s + &l, identity(3), tol)?;
    let a = analyze(&p)?;
    let mt = minimal_test(&a.derived, &p.tol);
    let tag = a.classification.group_type.tag();
    let mut forbidden_ok = true;
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let mut f = RealMatrix::zeros(3, 3);
        f[(i, j)] = 0.05;
        f[(j, i)] = -0.05;
        let q = params(&s + f, identity(3), tol)?;
        let d = crate::params::derive(&q)?;
        forbidden_ok &= !minimal_test(&d, &q.tol).in_m;
    }
    let ok = mt.in_m && tag == "T3a" && forbidden_ok;
    Ok((ok, format!("in_M {}, type {tag}, forbidden forms rejected {forbidden_ok}", mt.in_m)))
}

fn c7(tol: Option<f64>) -> Result<Check> {
    let t = apply_tol(ToleranceConfig::default(), tol);
    let mut dims = Vec::new();
    let mut ok = true;
    for n in 2..=5 {
        let d = commutant_skew_basis(&[identity(n)], &t)?.dim();
        ok &= d == n * (n - 1) / 2;
        dims.push(d);
    }
    let simple = commutant_skew_basis(&[diag(&[1.0, 2.0, 3.0])], &t)?.dim();
    let pair = commutant_skew_basis(&[diag(&[1.0, 1.0, 3.0])], &t)?.dim();
    ok &= simple == 0 && pair == 1;
    Ok((ok, format!("so(n) dims {dims:?}, simple {simple}, repeated pair {pair}")))
}

fn c8(seed: u64) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t = ToleranceConfig::default();
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let g = RealMatrix::from_fn(3, 3, |_, _| rng.sample::<f64, _>(StandardNormal));
        let m = &g * (rng.random_range(0.2..1.0) / spectral_norm(&g));
        let mut ratios = Vec::new();
        for k in 1..=4 {
            for sign in [-1.0, 1.0] {
                let x = 1.0 + sign * 10f64.powi(-k);
                ratios.push(bch_remainder(&m, x, &t)? / x.ln().abs().powi(3));
            }
        }
        let hi = ratios.iter().cloned().fold(0.0, f64::max);
        let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        worst = worst.max(hi / lo);
    }
    Ok((worst < 10.0, format!("largest max/min ratio {worst:.3}")))
}

const GRID: [f64; 5] = [0.2, 0.4, 0.6, 0.8, 1.0];

fn c9() -> Result<Check> {
    let mut worst = 0.0f64;
    for (name, _) in FIXTURES {
        let p = load(name, None)?;
        for c in [0.5, 2.0] {
            worst = worst.max(oss_check(&p, c, &GRID, QuadratureConfig::default())?);
        }
    }
    Ok((worst < 1e-4, format!("max relative error {worst:.2e}")))
}

fn c10() -> Result<Check> {
    let h = 0.7;
    let p = params(identity(2) * (h - 0.5), identity(2), None)?;
    let e = CovarianceEngine::new(&p, QuadratureConfig { normalize: true, ..Default::default() }, 1.0)?;
    let mut worst = 0.0f64;
    for &t in &GRID {
        for &s in &GRID {
            let want = 0.5 * (t.powf(2.0 * h) + s.powf(2.0 * h) - (t - s).abs().powf(2.0 * h));
            worst = worst.max((e.gamma(t, s)? - identity(2) * want).norm() / (want * 2f64.sqrt()));
        }
    }
    Ok((worst < 1e-4, format!("max relative error {worst:.2e}")))
}

fn c11(tol: Option<f64>) -> Result<Check> {
    let mut worst = 0.0f64;
    let mut dims = Vec::new();
    for name in ["example_5_1", "example_6_1", "example_2_1"] {
        let p = load(name, tol)?;
        let a = analyze(&p)?;
        dims.push(a.classification.lie_dimension);
        let v = density_invariance_check(&p, &a.classification, &[-1.0, -0.5, 0.5, 1.0], &a.family.sample_points)?;
        worst = worst.max(v);
    }
    let ok = worst < 1e-9 && dims.iter().all(|&d| d > 0);
    Ok((ok, format!("max relative difference {worst:.2e}, tangent dims {dims:?}")))
}

fn c12() -> Result<Check> {
    let b = std::f64::consts::FRAC_PI_3;
    let diff = (time_domain_f(0.2, 0.5, b)? - time_domain_f(0.2, 1.0, b)?).abs();
    let mut gerr = 0.0f64;
    for c in [0.25, 1.0, 2.0] {
        let pc = std::f64::consts::PI * c;
        gerr = gerr.max((complex_gamma(Complex64::new(1.0, c))?.norm_sqr() * pc.sinh() / pc - 1.0).abs());
    }
    Ok((diff > 0.1 && gerr < 1e-10, format!("|f(0.5) - f(1)| = {diff:.4}, Gamma identity error {gerr:.1e}")))
}

fn c13(tol: Option<f64>, seed: u64) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bad = Vec::new();
    for (name, _) in FIXTURES {
        let p = load(name, tol)?;
        let tag = analyze(&p)?.classification.group_type.tag();
        for _ in 0..20 {
            let q = random_orthogonal(p.n, &mut rng);
            let got = analyze(&p.conjugated(&q)?)?.classification.group_type.tag();
            if got != tag {
                bad.push(format!("{name}: {tag} -> {got}"));
            }
        }
    }
    Ok((bad.is_empty(), if bad.is_empty() { "160 conjugations agree".into() } else { bad.join("; ") }))
}

fn c14(seed: u64) -> Result<Check> {
    let p = load("example_2_1", None)?;
    let times = [0.0, 0.5, 1.0];
    let q = QuadratureConfig::monte_carlo();
    let a = simulate(&p, &times, 20_000, seed, q)?;
    let want = covariance(&p, 1.0, 1.0, QuadratureConfig::default())?;
    let got = a.empirical_covariance(2, 2);
    let rel = (0..2).map(|k| (got[(k, k)] / want[(k, k)] - 1.0).abs()).fold(0.0, f64::max);
    let again = simulate(&p, &times, 20_000, seed, q)?;
    let same = a.to_csv() == again.to_csv();
    Ok((rel < 0.05 && same, format!("Var(B(1)) relative error {rel:.4}, CSV reproducible {same}")))
}

/// Exhaustive check over proper subsets of the basis columns.
fn invariant_by_enumeration(l: &RealMatrix, basis: &RealMatrix, delta: f64) -> bool {
    let n = l.nrows();
    let t = basis.transpose() * l * basis;
    let cut = delta * spectral_norm(l);
    (1..(1usize << n) - 1).any(|mask| {
        (0..n).filter(|i| mask >> i & 1 == 1).all(|i| (0..n).filter(|j| mask >> j & 1 == 0).all(|j| t[(j, i)].abs() <= cut))
    })
}

pub fn random_structured_skew<R: Rng>(n: usize, rng: &mut R) -> RealMatrix {
    let groups = rng.random_range(1..=n);
    let blocks: Vec<usize> = (0..n).map(|_| rng.random_range(0..groups)).collect();
    let zero_p = rng.random_range(0.0..0.6);
    let mut k = RealMatrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            if blocks[i] == blocks[j] && rng.random::<f64>() >= zero_p {
                let v: f64 = rng.sample(StandardNormal);
                k[(i, j)] = v;
                k[(j, i)] = -v;
            }
        }
    }
    k
}

fn c15(seed: u64) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut disagree = 0;
    let mut invariant = 0;
    for n in 3..=6 {
        for _ in 0..200 {
            let basis = random_orthogonal(n, &mut rng);
            let l = &basis * random_structured_skew(n, &mut rng) * basis.transpose();
            let graph = in_l_invar(&l, &basis, 1e-9);
            invariant += graph as usize;
            disagree += (graph != invariant_by_enumeration(&l, &basis, 1e-9)) as usize;
        }
    }
    Ok((disagree == 0, format!("{disagree} disagreements over 800 matrices ({invariant} invariant)")))
}

pub fn run_one(id: usize, tol: Option<f64>, seed: u64) -> Result<Check> {
    match id {
        1 => c1(tol),
        2 => c2(tol),
        3 => c3(tol),
        4 => c4(tol),
        5 => c5(tol),
        6 => c6(tol),
        7 => c7(tol),
        8 => c8(seed),
        9 => c9(),
        10 => c10(),
        11 => c11(tol),
        12 => c12(),
        13 => c13(tol, seed),
        14 => c14(seed),
        15 => c15(seed),
        _ => Err(Error::Domain(format!("no criterion {id}"))),
    }
}

pub fn run_all(tol: Option<f64>, seed: u64) -> Vec<Outcome> {
    CRITERIA
        .iter()
        .map(|c| {
            let (pass, detail) = run_one(c.id, tol, seed).unwrap_or_else(|e| (false, format!("error: {e}")));
            Outcome { id: c.id, name: c.name, pass, detail }
        })
        .collect()
}
