use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::mesh::ChamberMesh;
use crate::coxeter::{sample_stratum, CoxeterType, RootSystem, Stratum};
use crate::error::{Error, Result};
use crate::invariants::InvariantBasis;
use crate::probe::{fiber_scale, refine_value_interval, regular_target, sample_fiber, FIBER_TOL};

/// Slack, relative to `max(1, |value|)`, for a mesh point to count as
/// inside the envelopes.
pub const CONTAINMENT_TOL: f64 = 1e-8;

const FACE_STARTS: usize = 6;
const MAX_ITER: usize = 100;
const POLISH_STARTS: usize = 8;

/// One cell of the grid over the bounding box of `P_k(mesh)`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct EnvelopeCell {
    pub index: Vec<usize>,
    pub center: Vec<f64>,
    /// Mesh points whose `P_k` image falls in the cell.
    pub count: usize,
    /// Range of `p_{k+1}` over those points.
    pub mesh_min: Option<f64>,
    pub mesh_max: Option<f64>,
    /// `p_{k+1}^min` and `p_{k+1}^max` at the center; `None` outside `Π_k′`.
    pub min: Option<f64>,
    pub max: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Envelope {
    #[serde(rename = "type")]
    pub ty: CoxeterType,
    pub k: usize,
    pub bins: usize,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// `max − min` of `p_{k+1}` over the mesh.
    pub value_range: f64,
    pub cells: Vec<EnvelopeCell>,
    /// Finite-difference Lipschitz constants between neighbouring cells.
    pub lipschitz_min: f64,
    pub lipschitz_max: f64,
    pub points: usize,
    /// Mesh points outside `[p_{k+1}^min, p_{k+1}^max]` at their own `P_k`.
    pub violations: usize,
    pub worst_excess: f64,
    /// Mesh points where no stratum point of the fiber was found.
    pub unresolved: usize,
    /// Cells with no mesh point although their center lies in `Π_k′`.
    pub empty_cells: usize,
}

/// Newton on the span of a face for `P_k = m`, from `coords0`; the result is
/// folded into `C̄`.
fn solve_on_face(
    basis: &InvariantBasis,
    rs: &RootSystem,
    s: &Stratum,
    target: &[f64],
    coords0: Vec<f64>,
) -> Option<Vec<f64>> {
    let k = target.len();
    let num = basis.numeric();
    let b = DMatrix::from_fn(basis.dim(), s.dim, |r, c| s.basis[c][r]);
    let w: Vec<f64> = target.iter().map(|m| 1.0 / m.abs().max(1.0)).collect();
    let res = |x: &[f64]| -> DVector<f64> {
        let v = num.eval(x, k);
        DVector::from_iterator(k, v.iter().zip(target).zip(&w).map(|((p, m), w)| (p - m) * w))
    };
    let mut c = coords0;
    let mut x = s.point(&c);
    let mut r = res(&x);
    for _ in 0..MAX_ITER {
        if r.amax() <= FIBER_TOL {
            break;
        }
        let mut j = num.jacobian(&x, k) * &b;
        for i in 0..k {
            j.row_mut(i).scale_mut(w[i]);
        }
        let step = j.svd(true, true).solve(&r, 1e-14).ok()?;
        let r0 = r.norm();
        let mut t = 1.0;
        loop {
            let trial: Vec<f64> = c.iter().zip(step.iter()).map(|(a, d)| a - t * d).collect();
            let xt = s.point(&trial);
            let rt = res(&xt);
            if rt.norm() < r0 || t < 1e-4 {
                c = trial;
                x = xt;
                r = rt;
                break;
            }
            t *= 0.5;
        }
        if c.iter().any(|v| !v.is_finite()) {
            return None;
        }
    }
    (r.amax() <= FIBER_TOL).then(|| rs.fold_into_chamber(&x))
}

/// Faces of dimension `k`: where the extremes of `p_{k+1}` on a fiber of
/// `P_k` sit.
pub fn envelope_faces(strata: &[Stratum], k: usize) -> Vec<Stratum> {
    strata.iter().filter(|s| s.dim == k).cloned().collect()
}

fn face_starts(basis: &InvariantBasis, faces: &[Stratum], target: &[f64]) -> Vec<Vec<Vec<f64>>> {
    let r = fiber_scale(basis, target).unwrap_or(1.0);
    faces
        .iter()
        .map(|s| {
            let mut v = vec![s.coordinates(&s.interior_point()).iter().map(|c| c * r).collect()];
            if let Ok(pts) = sample_stratum(s, FACE_STARTS - 1, 1.0, 0) {
                for p in pts {
                    let np = p.iter().map(|q| q * q).sum::<f64>().sqrt().max(1e-300);
                    v.push(s.coordinates(&p).iter().map(|c| c * r / np).collect());
                }
            }
            v
        })
        .collect()
}

/// `(p_{k+1}^min, p_{k+1}^max)` at `mᵏ`: extremes of `p_{k+1}` over the
/// points of the fiber lying on `k`-dimensional faces. `None` when no such
/// point is found.
pub fn envelope_at(
    basis: &InvariantBasis,
    rs: &RootSystem,
    faces: &[Stratum],
    target: &[f64],
) -> Option<(f64, f64)> {
    let k = target.len();
    let num = basis.numeric();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (s, starts) in faces.iter().zip(face_starts(basis, faces, target)) {
        for c0 in starts {
            if let Some(x) = solve_on_face(basis, rs, s, target, c0) {
                let v = num.value(k, &x);
                lo = lo.min(v);
                hi = hi.max(v);
                break;
            }
        }
    }
    (lo <= hi).then_some((lo, hi))
}

fn cell_of(m: &[f64], lower: &[f64], width: &[f64], bins: usize) -> Vec<usize> {
    m.iter()
        .zip(lower)
        .zip(width)
        .map(|((v, l), w)| {
            if *w > 0.0 {
                (((v - l) / w).floor().max(0.0) as usize).min(bins - 1)
            } else {
                0
            }
        })
        .collect()
}

fn flat(index: &[usize], bins: usize) -> usize {
    index.iter().rev().fold(0, |acc, &i| acc * bins + i)
}

fn unflat(mut f: usize, k: usize, bins: usize) -> Vec<usize> {
    (0..k)
        .map(|_| {
            let i = f % bins;
            f /= bins;
            i
        })
        .collect()
}

/// Min/max envelopes of `p_{k+1}` over a `bins^k` grid covering
/// `P_k(mesh)`, their Lipschitz constants, and the check that every mesh
/// point lies between them.
pub fn envelope_functions(
    basis: &InvariantBasis,
    rs: &RootSystem,
    strata: &[Stratum],
    mesh: &ChamberMesh,
    k: usize,
    bins: usize,
) -> Result<Envelope> {
    let n = basis.dim();
    if k == 0 || k >= n || bins == 0 {
        return Err(Error::Usage(format!(
            "envelopes need 1 ≤ k < {n} and at least one bin (k = {k}, bins = {bins})"
        )));
    }
    let faces = envelope_faces(strata, k);
    let num = basis.numeric();
    let data: Vec<(Vec<f64>, f64)> = mesh
        .vertices
        .par_iter()
        .map(|x| (num.eval(x, k), num.value(k, x)))
        .collect();
    let mut lower = vec![f64::INFINITY; k];
    let mut upper = vec![f64::NEG_INFINITY; k];
    for (m, _) in &data {
        for i in 0..k {
            lower[i] = lower[i].min(m[i]);
            upper[i] = upper[i].max(m[i]);
        }
    }
    let width: Vec<f64> = lower.iter().zip(&upper).map(|(l, u)| (u - l) / bins as f64).collect();

    let ncells = bins.pow(k as u32);
    let mut count = vec![0usize; ncells];
    let mut mmin = vec![f64::INFINITY; ncells];
    let mut mmax = vec![f64::NEG_INFINITY; ncells];
    for (m, v) in &data {
        let f = flat(&cell_of(m, &lower, &width, bins), bins);
        count[f] += 1;
        mmin[f] = mmin[f].min(*v);
        mmax[f] = mmax[f].max(*v);
    }

    let cells: Vec<EnvelopeCell> = (0..ncells)
        .into_par_iter()
        .map(|f| {
            let index = unflat(f, k, bins);
            let center: Vec<f64> = (0..k)
                .map(|i| lower[i] + (index[i] as f64 + 0.5) * width[i])
                .collect();
            let env = envelope_at(basis, rs, &faces, &center);
            let has = count[f] > 0;
            EnvelopeCell {
                index,
                center,
                count: count[f],
                mesh_min: has.then_some(mmin[f]),
                mesh_max: has.then_some(mmax[f]),
                min: env.map(|e| e.0),
                max: env.map(|e| e.1),
            }
        })
        .collect();

    let mut lip_min: f64 = 0.0;
    let mut lip_max: f64 = 0.0;
    for c in &cells {
        for i in 0..k {
            if c.index[i] + 1 >= bins || width[i] <= 0.0 {
                continue;
            }
            let mut nb = c.index.clone();
            nb[i] += 1;
            let d = &cells[flat(&nb, bins)];
            if let (Some(a), Some(b)) = (c.min, d.min) {
                lip_min = lip_min.max((b - a).abs() / width[i]);
            }
            if let (Some(a), Some(b)) = (c.max, d.max) {
                lip_max = lip_max.max((b - a).abs() / width[i]);
            }
        }
    }

    let checks: Vec<Option<f64>> = data
        .par_iter()
        .map(|(m, v)| {
            envelope_at(basis, rs, &faces, m).map(|(lo, hi)| {
                let tol = CONTAINMENT_TOL * v.abs().max(1.0);
                (lo - v - tol).max(v - hi - tol).max(0.0)
            })
        })
        .collect();
    let unresolved = checks.iter().filter(|c| c.is_none()).count();
    let excess: Vec<f64> = checks.into_iter().flatten().collect();
    let violations = excess.iter().filter(|&&e| e > 0.0).count();
    let worst_excess = excess.iter().copied().fold(0.0, f64::max);
    let empty_cells = cells.iter().filter(|c| c.count == 0 && c.min.is_some()).count();
    let (vlo, vhi) = data
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), (_, v)| (a.min(*v), b.max(*v)));

    Ok(Envelope {
        ty: basis.coxeter_type(),
        k,
        bins,
        lower,
        upper,
        value_range: vhi - vlo,
        cells,
        lipschitz_min: lip_min,
        lipschitz_max: lip_max,
        points: data.len(),
        violations,
        worst_excess,
        unresolved,
        empty_cells,
    })
}

/// Envelope values against the sampled range of `p_{k+1}` on one fiber.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FiberAgreement {
    pub target: Vec<f64>,
    pub sampled: (f64, f64),
    pub envelope: Option<(f64, f64)>,
    /// Largest endpoint difference (infinite without an envelope value).
    pub deviation: f64,
    /// `hi − lo` of the envelope at this target.
    pub fiber_range: f64,
}

/// Compares [`envelope_at`] with the range of `p_{k+1}` over a fiber sample
/// of `count` points, its extremes polished by the Lagrange system, at
/// `targets` seeded regular values.
pub fn envelope_fiber_agreement(
    basis: &InvariantBasis,
    rs: &RootSystem,
    strata: &[Stratum],
    k: usize,
    targets: usize,
    count: usize,
    seed: u64,
) -> Result<Vec<FiberAgreement>> {
    let faces = envelope_faces(strata, k);
    let mut out = Vec::with_capacity(targets);
    for i in 0..targets as u64 {
        let (_, m) = regular_target(basis, rs, k, seed, i);
        let fs = sample_fiber(basis, rs, k, &m, count, seed.wrapping_add(i))?;
        let iv = refine_value_interval(&fs, basis, POLISH_STARTS)?;
        let env = envelope_at(basis, rs, &faces, &m);
        let (deviation, fiber_range) = match env {
            Some((lo, hi)) => ((iv.lo - lo).abs().max((iv.hi - hi).abs()), hi - lo),
            None => (f64::INFINITY, 0.0),
        };
        out.push(FiberAgreement {
            target: m,
            sampled: (iv.lo, iv.hi),
            envelope: env,
            deviation,
            fiber_range,
        });
    }
    Ok(out)
}
