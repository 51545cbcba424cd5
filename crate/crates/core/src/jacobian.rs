//! Jacobian of the Chevalley map: exact factorization of its determinant
//! into the reflecting linear forms, minors, and the rank structure on the
//! strata of the closed chamber.

use nalgebra::DMatrix;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{poly_det, PolyMatrix, Scalar, ScalarMatrix, SparsePoly, MAX_EXACT_DET};
use crate::coxeter::{sample_stratum, CoxeterType, RootSystem, Stratum};
use crate::error::{Error, Result};
use crate::invariants::{basic_invariants_with, BuildOptions, DOrdering, InvariantBasis};
use crate::rng::{gaussian_vec, stream_rng};

/// Relative singular-value threshold of [`numeric_rank`].
pub const RANK_REL_TOL: f64 = 1e-8;

/// `J[i][j] = ∂pᵢ/∂xⱼ`, exact.
pub fn jacobian_matrix(basis: &InvariantBasis) -> PolyMatrix {
    let rows = basis.polys().iter().map(|p| p.gradient()).collect();
    PolyMatrix::from_rows(rows).expect("gradients share the variable count")
}

/// Outcome of [`verify_det_factorization`].
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Factorization {
    #[serde(rename = "type")]
    pub ty: CoxeterType,
    /// True when `c` was obtained in exact arithmetic: either `det J − c·∏λ_τ`
    /// was expanded and found to be zero, or the exact ratio was the same at
    /// every sampled rational point (`samples > 0`).
    pub exact: bool,
    /// The exact constant, as text, on the exact path.
    pub c_exact: Option<String>,
    pub c: f64,
    /// Degree of `det J`; equals the number of reflections.
    pub degree: usize,
    /// Largest relative deviation of `det J(x)/∏λ_τ(x)` from `c` on the
    /// numeric path (zero on the exact path).
    pub max_rel_dev: f64,
    pub samples: usize,
}

/// Checks `det J_P = c·∏λ_τ` with `c ≠ 0`.
///
/// Exact whenever the product of the linear forms is exact and the size is
/// at most [`MAX_EXACT_DET`]; otherwise the ratio is sampled at 100 random
/// regular points and must be constant to relative error `1e-8`.
pub fn verify_det_factorization(basis: &InvariantBasis, rs: &RootSystem) -> Result<Factorization> {
    let ty = basis.coxeter_type();
    let exact_ok = basis.dim() <= MAX_EXACT_DET && ty != CoxeterType::H4;
    match rs.lambda_product_exact() {
        Some(prod) if exact_ok => {
            let det = poly_det(&jacobian_matrix(basis))?;
            let Some((m, lead)) = det.leading_term() else {
                return Err(Error::Verification(format!("det J vanishes identically for {ty}")));
            };
            let plead = prod.coeff(&m.0);
            let c = lead.checked_div(&plead).ok_or_else(|| {
                Error::Verification(format!("det J and ∏λ have different leading terms for {ty}"))
            })?;
            let rest = &det - &prod.scale(&c);
            if !rest.is_zero() {
                return Err(Error::Verification(format!(
                    "det J − c·∏λ leaves {} terms for {ty}",
                    rest.len()
                )));
            }
            Ok(Factorization {
                ty,
                exact: true,
                c_exact: Some(c.to_string()),
                c: c.to_f64(),
                degree: det.degree().unwrap_or(0) as usize,
                max_rel_dev: 0.0,
                samples: 0,
            })
        }
        _ if rs.is_exact() => verify_det_factorization_sampled_exact(basis, rs, 20, 0),
        _ => verify_det_factorization_numeric(basis, rs, 100, 0),
    }
}

/// Ratio `det J(x)/∏λ_τ(x)` in exact arithmetic at seeded rational points;
/// every ratio must equal the first.
pub fn verify_det_factorization_sampled_exact(
    basis: &InvariantBasis,
    rs: &RootSystem,
    samples: usize,
    seed: u64,
) -> Result<Factorization> {
    let ty = basis.coxeter_type();
    let n = basis.dim();
    let lambdas: Vec<SparsePoly> = (0..rs.len())
        .map(|t| rs.lambda_poly(t))
        .collect::<Option<_>>()
        .ok_or_else(|| Error::Capability(format!("{ty} has no exact roots")))?;
    let grads: Vec<Vec<SparsePoly>> = basis.polys().iter().map(|p| p.gradient()).collect();
    let mut rng = stream_rng(seed, crate::rng::stream_id("det-ratio-exact", 0));
    let mut c: Option<Scalar> = None;
    let mut done = 0;
    while done < samples {
        let x: Vec<Scalar> = (0..n)
            .map(|_| Scalar::from_frac(rng.random_range(-40..=40), rng.random_range(1..=13)))
            .collect();
        let mut prod = Scalar::one();
        for l in &lambdas {
            prod *= &l.eval_exact(&x)?;
        }
        if prod.is_zero() {
            continue;
        }
        let rows = grads
            .iter()
            .map(|g| g.iter().map(|gi| gi.eval_exact(&x)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let det = ScalarMatrix::from_rows(rows)?.det().expect("square");
        let ratio = &det / &prod;
        match &c {
            None if ratio.is_zero() => {
                return Err(Error::Verification(format!("det J vanishes at a regular point of {ty}")))
            }
            None => c = Some(ratio),
            Some(c0) if *c0 != ratio => {
                return Err(Error::Verification(format!(
                    "det J / ∏λ takes two values for {ty}: {c0} and {ratio}"
                )))
            }
            Some(_) => {}
        }
        done += 1;
    }
    let c = c.expect("at least one sample");
    Ok(Factorization {
        ty,
        exact: true,
        c_exact: Some(c.to_string()),
        c: c.to_f64(),
        degree: basis.degrees().iter().map(|&k| k as usize - 1).sum(),
        max_rel_dev: 0.0,
        samples,
    })
}

/// Sampled version of [`verify_det_factorization`].
pub fn verify_det_factorization_numeric(
    basis: &InvariantBasis,
    rs: &RootSystem,
    samples: usize,
    seed: u64,
) -> Result<Factorization> {
    let ty = basis.coxeter_type();
    let n = basis.dim();
    let num = basis.numeric();
    let mut rng = stream_rng(seed, crate::rng::stream_id("det-ratio", 0));
    let mut ratios = Vec::with_capacity(samples);
    while ratios.len() < samples {
        let x = unit(gaussian_vec(&mut rng, n));
        let lam: Vec<f64> = (0..rs.len()).map(|t| rs.lambda(t, &x)).collect();
        if lam.iter().any(|l| l.abs() < 1e-2) {
            continue;
        }
        let det = num.jacobian(&x, n).determinant();
        ratios.push(det / lam.iter().product::<f64>());
    }
    let c = ratios[0];
    if c == 0.0 || !c.is_finite() {
        return Err(Error::Verification(format!("det J / ∏λ is {c} for {ty}")));
    }
    let max_rel_dev = ratios
        .iter()
        .map(|r| ((r - c) / c).abs())
        .fold(0.0, f64::max);
    if max_rel_dev > 1e-8 {
        return Err(Error::Verification(format!(
            "det J / ∏λ is not constant for {ty} (relative spread {max_rel_dev:e})"
        )));
    }
    let degree = basis.degrees().iter().map(|&k| k as usize - 1).sum();
    Ok(Factorization {
        ty,
        exact: false,
        c_exact: None,
        c,
        degree,
        max_rel_dev,
        samples,
    })
}

/// Row and column index sets of a square minor.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinorSpec {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

impl MinorSpec {
    pub fn new(rows: Vec<usize>, cols: Vec<usize>) -> Result<Self> {
        if rows.len() != cols.len() || rows.is_empty() {
            return Err(Error::Usage(format!(
                "minor needs equal nonempty row and column sets, got {} and {}",
                rows.len(),
                cols.len()
            )));
        }
        Ok(MinorSpec { rows, cols })
    }

    fn check(&self, jm: &PolyMatrix) -> Result<()> {
        if self.rows.iter().any(|&r| r >= jm.rows()) || self.cols.iter().any(|&c| c >= jm.cols()) {
            return Err(Error::Usage("minor index out of range".into()));
        }
        Ok(())
    }
}

/// Determinant of the selected submatrix of `jm` at `x`.
pub fn minor_eval(jm: &PolyMatrix, m: &MinorSpec, x: &[f64]) -> Result<f64> {
    m.check(jm)?;
    let k = m.rows.len();
    let mut a = DMatrix::zeros(k, k);
    for (i, &r) in m.rows.iter().enumerate() {
        for (j, &c) in m.cols.iter().enumerate() {
            a[(i, j)] = jm.get(r, c).eval_f64(x)?;
        }
    }
    Ok(a.determinant())
}

/// Number of singular values above `RANK_REL_TOL` times the largest.
pub fn numeric_rank(m: &DMatrix<f64>) -> usize {
    numeric_rank_rel(m, RANK_REL_TOL)
}

/// Number of singular values above `rel` times the largest.
pub fn numeric_rank_rel(m: &DMatrix<f64>, rel: f64) -> usize {
    let sv = m.clone().singular_values();
    let top = sv.iter().cloned().fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel * top).count()
}

/// All `k`-element subsets of `0..n`, in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Rank evidence on one stratum.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct StratumRankReport {
    pub stratum: String,
    pub samples: usize,
    pub k: usize,
    /// Largest `|(k+1)×(k+1) minor|` on rows `1..k+1` over all samples.
    pub max_bordering_minor: f64,
    /// Smallest over samples of the largest `|k×k minor|` on rows `1..k`.
    pub min_max_k_minor: f64,
    /// Numeric rank of the full Jacobian at each sample.
    pub ranks: Vec<usize>,
    pub pass: bool,
    /// First violating sample, when there is one.
    pub witness: Option<Vec<f64>>,
}

/// A Jacobian row whose norm is below this fraction of
/// [`gradient_magnitude`](crate::invariants::NumericBasis::gradient_magnitude)
/// is rounding noise and is set to zero.
pub const ROW_NOISE: f64 = 1e-10;

/// The Jacobian at `x` with every nonzero row scaled to unit length, which
/// makes minors invariant under `x ↦ tx` and bounded by 1 (Hadamard).
pub fn normalized_jacobian(basis: &InvariantBasis, x: &[f64]) -> DMatrix<f64> {
    let n = basis.dim();
    let mut j = basis.numeric().jacobian(x, n);
    for (i, mut row) in j.row_iter_mut().enumerate() {
        let floor = ROW_NOISE * basis.numeric().gradient_magnitude(i, x);
        let r = row.norm();
        if r > floor {
            row /= r;
        } else {
            row.fill(0.0);
        }
    }
    j
}

struct SampleEval {
    max_k_minor: f64,
    max_bordering: f64,
    rank: usize,
}

fn eval_sample(
    j: &DMatrix<f64>,
    k: usize,
    k_cols: &[Vec<usize>],
    b_cols: &[Vec<usize>],
    rank_tol: f64,
) -> SampleEval {
    let minor = |rows: usize, cols: &[usize]| -> f64 {
        DMatrix::from_fn(rows, rows, |a, b| j[(a, cols[b])]).determinant().abs()
    };
    let max_k_minor = k_cols.iter().map(|c| minor(k, c)).fold(0.0, f64::max);
    let max_bordering = b_cols.iter().map(|c| minor(k + 1, c)).fold(0.0, f64::max);
    SampleEval {
        max_k_minor,
        max_bordering,
        rank: numeric_rank_rel(j, rank_tol),
    }
}

/// Checks, at `samples` seeded points of `s` scaled to the unit sphere:
/// some `k×k` minor on rows `1..k` exceeds `tol`, every `(k+1)×(k+1)` minor
/// on rows `1..k+1` is at most `tol`, and the Jacobian has rank `k`.
pub fn verify_statement_33(
    basis: &InvariantBasis,
    s: &Stratum,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<StratumRankReport> {
    verify_statement_33_with(basis, s, samples, seed, tol, RANK_REL_TOL)
}

/// [`verify_statement_33`] with the relative singular-value threshold of the
/// rank test given explicitly.
pub fn verify_statement_33_with(
    basis: &InvariantBasis,
    s: &Stratum,
    samples: usize,
    seed: u64,
    tol: f64,
    rank_tol: f64,
) -> Result<StratumRankReport> {
    let n = basis.dim();
    let k = s.dim;
    if k == 0 || s.ambient_dim != n {
        return Err(Error::Usage(format!(
            "stratum {} must have positive dimension in ℝ^{n}",
            s.id
        )));
    }
    let pts: Vec<Vec<f64>> = sample_stratum(s, samples, 1.0, seed)?
        .into_iter()
        .map(unit)
        .collect();
    let k_cols = combinations(n, k);
    let b_cols = if k < n { combinations(n, k + 1) } else { Vec::new() };
    let evals: Vec<SampleEval> = pts
        .par_iter()
        .map(|x| eval_sample(&normalized_jacobian(basis, x), k, &k_cols, &b_cols, rank_tol))
        .collect();
    let ok = |e: &SampleEval| e.max_k_minor > tol && e.max_bordering <= tol && e.rank == k;
    let witness = pts
        .iter()
        .zip(&evals)
        .find(|(_, e)| !ok(e))
        .map(|(x, _)| x.clone());
    Ok(StratumRankReport {
        stratum: s.id.clone(),
        samples: pts.len(),
        k,
        max_bordering_minor: evals.iter().map(|e| e.max_bordering).fold(0.0, f64::max),
        min_max_k_minor: evals.iter().map(|e| e.max_k_minor).fold(f64::INFINITY, f64::min),
        ranks: evals.iter().map(|e| e.rank).collect(),
        pass: witness.is_none(),
        witness,
    })
}

/// [`verify_statement_33`] on every stratum of positive dimension.
pub fn verify_statement_33_all(
    basis: &InvariantBasis,
    strata: &[Stratum],
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<Vec<StratumRankReport>> {
    strata
        .iter()
        .filter(|s| s.dim >= 1)
        .map(|s| verify_statement_33(basis, s, samples, seed, tol))
        .collect()
}

/// Statement check over every stratum, each stratum under the first
/// admissible order of the basic invariants that passes there (the requested
/// order when none does). For `D(n)` the orders are the placements of
/// `x₁⋯xₙ` in [`DOrdering`], and cached bases are ignored; other types have
/// the single basis.
pub fn verify_statement_33_orderings(
    t: CoxeterType,
    strata: &[Stratum],
    opts: &BuildOptions,
    samples: usize,
    seed: u64,
    tol: f64,
    rank_tol: f64,
) -> Result<Vec<(DOrdering, StratumRankReport)>> {
    let faces: Vec<&Stratum> = strata.iter().filter(|s| s.dim >= 1).collect();
    let run = |b: &InvariantBasis, s: &Stratum| verify_statement_33_with(b, s, samples, seed, tol, rank_tol);
    if !matches!(t, CoxeterType::D(_)) {
        let b = basic_invariants_with(t, opts)?;
        return faces.iter().map(|s| Ok((opts.d_order, run(&b, s)?))).collect();
    }
    let mut order = vec![opts.d_order];
    for o in [DOrdering::ProductLast, DOrdering::ProductFirst, DOrdering::ProductAtEnd] {
        if !order.contains(&o) {
            order.push(o);
        }
    }
    let bases = order
        .iter()
        .map(|&o| {
            let b = basic_invariants_with(
                t,
                &BuildOptions {
                    cache_dir: None,
                    d_order: o,
                    ..opts.clone()
                },
            )?;
            Ok((o, b))
        })
        .collect::<Result<Vec<_>>>()?;
    faces
        .iter()
        .map(|s| {
            let mut first = None;
            for (o, b) in &bases {
                let r = run(b, s)?;
                if r.pass {
                    return Ok((*o, r));
                }
                first.get_or_insert((*o, r));
            }
            Ok(first.expect("at least one ordering"))
        })
        .collect()
}

fn unit(mut x: Vec<f64>) -> Vec<f64> {
    let nx = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if nx > 0.0 {
        x.iter_mut().for_each(|v| *v /= nx);
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coxeter::{build_root_system, enumerate_strata};
    use crate::invariants::{basic_invariants_with, BuildOptions};

    fn setup(t: CoxeterType) -> (InvariantBasis, RootSystem) {
        (
            basic_invariants_with(t, &BuildOptions::default()).unwrap(),
            build_root_system(t).unwrap(),
        )
    }

    #[test]
    fn b2_jacobian_and_constant() {
        let (b, rs) = setup(CoxeterType::B(2));
        let j = jacobian_matrix(&b);
        assert_eq!(j.get(1, 0).to_string(), "2*x1*x2^2");
        let f = verify_det_factorization(&b, &rs).unwrap();
        assert!(f.exact);
        assert_eq!(f.c, 4.0);
        assert_eq!(f.degree, 4);
    }

    #[test]
    fn minors_of_b2() {
        let (b, _) = setup(CoxeterType::B(2));
        let j = jacobian_matrix(&b);
        let m = MinorSpec::new(vec![0], vec![0]).unwrap();
        assert_eq!(minor_eval(&j, &m, &[1.0, 0.0]).unwrap(), 2.0);
        let full = MinorSpec::new(vec![0, 1], vec![0, 1]).unwrap();
        assert_eq!(minor_eval(&j, &full, &[1.0, 1.0]).unwrap(), 0.0);
        assert!(MinorSpec::new(vec![0, 1], vec![0]).is_err());
        let oob = MinorSpec::new(vec![2], vec![0]).unwrap();
        assert!(minor_eval(&j, &oob, &[1.0, 1.0]).is_err());
    }

    #[test]
    fn b2_strata_pass() {
        let (b, rs) = setup(CoxeterType::B(2));
        for s in enumerate_strata(&rs).iter().filter(|s| s.dim > 0) {
            let r = verify_statement_33(&b, s, 20, 1, 1e-9).unwrap();
            assert!(r.pass, "{r:?}");
        }
    }

    #[test]
    fn numeric_factorization_for_non_exact_dihedral() {
        let (b, rs) = setup(CoxeterType::I2(7));
        let f = verify_det_factorization(&b, &rs).unwrap();
        assert!(!f.exact);
        assert!(f.max_rel_dev <= 1e-8);
    }

    #[test]
    fn combination_counts() {
        assert_eq!(combinations(6, 3).len(), 20);
        assert_eq!(combinations(4, 4), vec![vec![0, 1, 2, 3]]);
    }
}
