use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::coxeter::{sample_stratum, Stratum};
use crate::error::{Error, Result};
use crate::invariants::InvariantBasis;
use crate::probe::Anomaly;

/// Scales at which the homogeneity law of the lift is checked.
pub const SCALING_STEPS: [f64; 2] = [1e-3, 1e-6];

/// Ratio of extreme singular values below which the lift system is singular.
const SINGULAR_RCOND: f64 = 1e-12;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct LiftSample {
    pub x: Vec<f64>,
    /// `P_k(x)`.
    pub image: Vec<f64>,
    /// `∂p_{k+1}/∂p_j` for `j = 1..k`, along the stratum image.
    pub gradient: Vec<f64>,
    /// `σ_min/σ_max` of the `k × k` system with unit columns.
    pub rcond: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ScalingCheck {
    pub t: f64,
    /// Largest deviation of `g_j(tx)/t^{d_{k+1}−d_j}` from `g_j(x)`, relative
    /// to `max_j |g_j(x)|` at unit `|x|`.
    pub max_rel_dev: f64,
    /// Largest `|g(tx)|` seen.
    pub sup_norm: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct LiftReport {
    pub stratum: String,
    pub k: usize,
    pub samples: Vec<LiftSample>,
    /// Largest `|g|` over the samples and their rescalings.
    pub sup_norm: f64,
    pub scaling: Vec<ScalingCheck>,
    pub anomalies: Vec<Anomaly>,
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Solves `Σ_j g_j ⟨∇p_j, b_i⟩ = ⟨∇p_{k+1}, b_i⟩` over an orthonormal basis
/// `b` of the stratum. Returns `(g, rcond)`.
fn lift_at(basis: &InvariantBasis, s: &Stratum, x: &[f64]) -> (Option<Vec<f64>>, f64) {
    let k = s.dim;
    let j = basis.numeric().jacobian(x, k + 1);
    let b = DMatrix::from_fn(basis.dim(), k, |r, c| s.basis[c][r]);
    let t = &j * &b;
    let mut a = t.rows(0, k).transpose();
    let rhs: DVector<f64> = t.row(k).transpose();
    let scales: Vec<f64> = a.column_iter().map(|c| c.norm()).collect();
    if scales.contains(&0.0) {
        return (None, 0.0);
    }
    for (mut c, &w) in a.column_iter_mut().zip(&scales) {
        c /= w;
    }
    let sv = a.clone().singular_values();
    let rcond = sv.min() / sv.max();
    if rcond <= SINGULAR_RCOND {
        return (None, rcond);
    }
    let g = a
        .lu()
        .solve(&rhs)
        .map(|g| g.iter().zip(&scales).map(|(v, w)| v / w).collect());
    (g, rcond)
}

/// Derivatives of `p_{k+1}` along the image of a `k`-dimensional stratum,
/// in the coordinates `p₁, …, p_k`, at seeded samples of radius `≤ a`.
/// Each sample is also rescaled by [`SCALING_STEPS`] to check boundedness
/// and the homogeneity law as `|x| → 0`.
pub fn lift_derivatives(
    basis: &InvariantBasis,
    s: &Stratum,
    samples: usize,
    a: f64,
    seed: u64,
) -> Result<LiftReport> {
    let n = basis.dim();
    let k = s.dim;
    if k == 0 || k >= n {
        return Err(Error::Usage(format!(
            "lift needs a stratum of dimension 1..{n}, {} has {k}",
            s.id
        )));
    }
    let degrees = basis.degrees();
    let num = basis.numeric();
    let mut out = Vec::new();
    let mut anomalies = Vec::new();
    let mut scaling: Vec<ScalingCheck> = SCALING_STEPS
        .iter()
        .map(|&t| ScalingCheck {
            t,
            max_rel_dev: 0.0,
            sup_norm: 0.0,
        })
        .collect();
    let mut sup: f64 = 0.0;
    for x in sample_stratum(s, samples, a, seed)? {
        let (g, rcond) = lift_at(basis, s, &x);
        let Some(g) = g else {
            anomalies.push(Anomaly {
                kind: "singular-lift".into(),
                x: x.clone(),
                detail: format!("lift system on {} has rcond {rcond:e}", s.id),
            });
            continue;
        };
        sup = sup.max(inf_norm(&g));
        let r: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let u: Vec<f64> = x.iter().map(|v| v / r).collect();
        if let (Some(gu), _) = lift_at(basis, s, &u) {
            let scale = inf_norm(&gu).max(f64::MIN_POSITIVE);
            for chk in scaling.iter_mut() {
                let xt: Vec<f64> = u.iter().map(|v| v * chk.t).collect();
                match lift_at(basis, s, &xt) {
                    (Some(gt), _) => {
                        chk.sup_norm = chk.sup_norm.max(inf_norm(&gt));
                        let dev = gt
                            .iter()
                            .zip(&gu)
                            .enumerate()
                            .map(|(j, (a, b))| {
                                let e = degrees[k] as i32 - degrees[j] as i32;
                                (a / chk.t.powi(e) - b).abs() / scale
                            })
                            .fold(0.0, f64::max);
                        chk.max_rel_dev = chk.max_rel_dev.max(dev);
                    }
                    (None, rc) => anomalies.push(Anomaly {
                        kind: "singular-lift".into(),
                        x: xt,
                        detail: format!("lift system on {} has rcond {rc:e}", s.id),
                    }),
                }
            }
        }
        out.push(LiftSample {
            image: num.eval(&x, k),
            x,
            gradient: g,
            rcond,
        });
    }
    for chk in &scaling {
        sup = sup.max(chk.sup_norm);
    }
    Ok(LiftReport {
        stratum: s.id.clone(),
        k,
        samples: out,
        sup_norm: sup,
        scaling,
        anomalies,
    })
}
