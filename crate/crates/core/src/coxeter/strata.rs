use rand::Rng;
use serde::{Deserialize, Serialize};

use super::roots::{dot, norm, RootSystem};
use crate::error::{Error, Result};
use crate::rng::{gaussian_vec, stream_rng};

/// Tolerance for deciding that a unit root is orthogonal to a stratum.
const ISOTROPY_TOL: f64 = 1e-9;

/// A face of the closed fundamental chamber: the points of `C̄` on which
/// exactly the listed walls vanish.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Stratum {
    pub id: String,
    pub ambient_dim: usize,
    /// Zero-based indices of the simple roots cutting out the face.
    pub walls: Vec<usize>,
    pub dim: usize,
    /// Orthonormal basis of the linear span of the face.
    pub basis: Vec<Vec<f64>>,
    /// Positive roots vanishing on the span: the isotropy reflections.
    pub isotropy: Vec<usize>,
    /// Extreme rays of the face (coweights of the walls not in `walls`).
    rays: Vec<Vec<f64>>,
    /// Fixed line of a reducible realization, spanned in both directions.
    line: Option<Vec<f64>>,
}

impl Stratum {
    /// A point of the relative interior, scaled to unit length (the origin
    /// for the zero-dimensional stratum).
    pub fn interior_point(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.ambient_dim];
        for r in &self.rays {
            for (xi, ri) in x.iter_mut().zip(r) {
                *xi += ri;
            }
        }
        if let Some(l) = &self.line {
            for (xi, li) in x.iter_mut().zip(l) {
                *xi += 0.5 * li;
            }
        }
        let nx = norm(&x);
        if nx > 0.0 {
            x.iter_mut().for_each(|v| *v /= nx);
        }
        x
    }

    /// Coordinates of `x` in the stratum basis.
    pub fn coordinates(&self, x: &[f64]) -> Vec<f64> {
        self.basis.iter().map(|b| dot(b, x)).collect()
    }

    /// The point with the given basis coordinates.
    pub fn point(&self, coords: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.ambient_dim];
        for (c, b) in coords.iter().zip(&self.basis) {
            for (xi, bi) in x.iter_mut().zip(b) {
                *xi += c * bi;
            }
        }
        x
    }
}

/// Isotropy reflections of a stratum; see [`Stratum::isotropy`].
pub fn isotropy_reflections(s: &Stratum) -> Vec<usize> {
    s.isotropy.clone()
}

fn stratum_id(rs: &RootSystem, walls: &[usize]) -> String {
    let w: Vec<String> = walls.iter().map(|i| (i + 1).to_string()).collect();
    format!("{}:walls{{{}}}", rs.coxeter_type(), w.join(","))
}

/// Orthonormal basis of the orthogonal complement of `normals`.
fn complement_basis(normals: &[&[f64]], n: usize) -> Vec<Vec<f64>> {
    let mut q: Vec<Vec<f64>> = Vec::new();
    let orth = |mut v: Vec<f64>, q: &mut Vec<Vec<f64>>| -> Option<Vec<f64>> {
        for _ in 0..2 {
            for u in q.iter() {
                let c = dot(u, &v);
                for (vi, ui) in v.iter_mut().zip(u) {
                    *vi -= c * ui;
                }
            }
        }
        let nv = norm(&v);
        (nv > 1e-8).then(|| v.iter().map(|x| x / nv).collect())
    };
    for a in normals {
        if let Some(u) = orth(a.to_vec(), &mut q) {
            q.push(u);
        }
    }
    let walls = q.len();
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        if let Some(u) = orth(e, &mut q) {
            q.push(u);
        }
    }
    q.split_off(walls)
}

/// Decides whether the face cut out by `walls` has nonempty relative
/// interior: random points of the span are tested against the remaining
/// sign conditions, with a least-squares solve as fallback.
fn face_is_feasible(rs: &RootSystem, walls: &[usize], basis: &[Vec<f64>], seed_stream: u64) -> bool {
    let others: Vec<usize> = (0..rs.rank()).filter(|i| !walls.contains(i)).collect();
    if others.is_empty() {
        return true;
    }
    let mut rng = stream_rng(0x5151, seed_stream);
    for _ in 0..1000 {
        let c = gaussian_vec(&mut rng, basis.len());
        let mut x = vec![0.0; rs.dim()];
        for (ci, b) in c.iter().zip(basis) {
            for (xi, bi) in x.iter_mut().zip(b) {
                *xi += ci * bi;
            }
        }
        let scale = norm(&x).max(1e-300);
        if others
            .iter()
            .all(|&j| dot(rs.simple_root(j), &x) > 1e-9 * scale)
        {
            return true;
        }
    }
    // Least squares: ⟨x, αᵢ⟩ = 0 on walls and 1 elsewhere.
    let m = rs.rank();
    let a = nalgebra::DMatrix::from_fn(m, rs.dim(), |i, j| rs.simple_root(i)[j]);
    let b = nalgebra::DVector::from_fn(m, |i, _| if walls.contains(&i) { 0.0 } else { 1.0 });
    match a.clone().svd(true, true).solve(&b, 1e-12) {
        Ok(x) => (&a * &x - &b).norm() < 1e-9,
        Err(_) => false,
    }
}

/// All faces of the closed chamber, ordered by number of walls and then
/// lexicographically (the open chamber comes first).
pub fn enumerate_strata(rs: &RootSystem) -> Vec<Stratum> {
    let r = rs.rank();
    let n = rs.dim();
    let mut masks: Vec<u32> = (0..1u32 << r).collect();
    masks.sort_by_key(|m| (m.count_ones(), (0..r).filter(|i| m & (1 << i) != 0).collect::<Vec<_>>()));
    let mut out = Vec::new();
    for mask in masks {
        let walls: Vec<usize> = (0..r).filter(|i| mask & (1 << i) != 0).collect();
        let normals: Vec<&[f64]> = walls.iter().map(|&i| rs.simple_root(i)).collect();
        let basis = complement_basis(&normals, n);
        if basis.len() != n - walls.len() {
            continue;
        }
        if !face_is_feasible(rs, &walls, &basis, mask as u64) {
            continue;
        }
        let isotropy = (0..rs.len())
            .filter(|&t| basis.iter().all(|b| dot(rs.root(t), b).abs() <= ISOTROPY_TOL))
            .collect();
        let rays = (0..r)
            .filter(|i| !walls.contains(i))
            .map(|i| rs.coweight(i).to_vec())
            .collect();
        out.push(Stratum {
            id: stratum_id(rs, &walls),
            ambient_dim: n,
            dim: basis.len(),
            walls,
            basis,
            isotropy,
            rays,
            line: rs.invariant_line().map(<[f64]>::to_vec),
        });
    }
    out
}

/// Seeded points of the relative interior of `s` inside the ball of radius
/// `a`. The zero-dimensional stratum yields the origin once.
pub fn sample_stratum(s: &Stratum, count: usize, a: f64, seed: u64) -> Result<Vec<Vec<f64>>> {
    let n = s.ambient_dim;
    if s.dim == 0 {
        return Ok(vec![vec![0.0; n]]);
    }
    if s.rays.is_empty() && s.line.is_none() {
        return Err(Error::Capability(format!("stratum {} has no interior", s.id)));
    }
    let mut rng = stream_rng(seed, crate::rng::stream_id(&s.id, 0));
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mut x = vec![0.0; n];
        for r in &s.rays {
            let c: f64 = 0.25 + rng.random::<f64>();
            for (xi, ri) in x.iter_mut().zip(r) {
                *xi += c * ri;
            }
        }
        if let Some(l) = &s.line {
            let cone = norm(&x).max(1.0);
            let t: f64 = gaussian_vec(&mut rng, 1)[0] * cone;
            for (xi, li) in x.iter_mut().zip(l) {
                *xi += t * li;
            }
        }
        let nx = norm(&x);
        if nx < 1e-12 {
            continue;
        }
        let u: f64 = rng.random::<f64>();
        let radius = a * (1.0 - u).powf(1.0 / s.dim as f64);
        if radius <= 0.0 {
            continue;
        }
        // Re-project onto the span to remove rounding in the rays.
        let coords: Vec<f64> = s.basis.iter().map(|b| dot(b, &x) * radius / nx).collect();
        out.push(s.point(&coords));
    }
    Ok(out)
}

/// The stratum containing `x ∈ C̄`: among strata whose isotropy forms all
/// vanish at `x` to `rel_tol·|x|`, the one of smallest dimension.
pub fn locate_stratum<'a>(
    rs: &RootSystem,
    strata: &'a [Stratum],
    x: &[f64],
    rel_tol: f64,
) -> Option<&'a Stratum> {
    let thr = rel_tol * norm(x).max(1e-300);
    strata
        .iter()
        .filter(|s| s.isotropy.iter().all(|&t| rs.lambda(t, x).abs() <= thr))
        .min_by_key(|s| s.dim)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coxeter::{build_root_system, CoxeterType};

    fn root_as_ints(rs: &RootSystem, t: usize) -> Vec<i64> {
        rs.root_exact(t).unwrap().iter().map(|s| s.to_f64() as i64).collect()
    }

    #[test]
    fn b2_strata() {
        let rs = build_root_system(CoxeterType::B(2)).unwrap();
        let strata = enumerate_strata(&rs);
        let dims: Vec<usize> = strata.iter().map(|s| s.dim).collect();
        assert_eq!(dims, vec![2, 1, 1, 0]);
        // Origin isotropy is every root.
        assert_eq!(strata[3].isotropy.len(), 4);
        // Wall x1 = x2 has isotropy {e1 − e2}.
        let diag = strata
            .iter()
            .find(|s| s.dim == 1 && (s.basis[0][0] - s.basis[0][1]).abs() < 1e-12)
            .unwrap();
        assert_eq!(diag.isotropy.len(), 1);
        assert_eq!(root_as_ints(&rs, diag.isotropy[0]), vec![1, -1]);
    }

    #[test]
    fn b3_isotropy_of_a_b2_face() {
        let rs = build_root_system(CoxeterType::B(3)).unwrap();
        let strata = enumerate_strata(&rs);
        assert_eq!(strata.len(), 8);
        // Face x2 = x3 = 0: walls e2 − e3 and e3.
        let face = strata
            .iter()
            .find(|s| s.dim == 1 && s.basis[0][0].abs() > 1.0 - 1e-12)
            .unwrap();
        let mut iso: Vec<Vec<i64>> = face.isotropy.iter().map(|&t| root_as_ints(&rs, t)).collect();
        iso.sort();
        assert_eq!(iso, vec![vec![0, 0, 1], vec![0, 1, -1], vec![0, 1, 0], vec![0, 1, 1]]);
        assert!(face.isotropy.len() >= 3 - face.dim);
    }

    #[test]
    fn stratum_samples() {
        let rs = build_root_system(CoxeterType::B(2)).unwrap();
        let strata = enumerate_strata(&rs);
        let axis = strata
            .iter()
            .find(|s| s.dim == 1 && s.basis[0][1].abs() < 1e-12)
            .unwrap();
        let pts = sample_stratum(axis, 50, 2.0, 9).unwrap();
        for p in &pts {
            assert!(p[1].abs() < 1e-12 && p[0] > 0.0 && p[0] <= 2.0);
        }
        assert_eq!(pts, sample_stratum(axis, 50, 2.0, 9).unwrap());
        assert_ne!(pts, sample_stratum(axis, 50, 2.0, 10).unwrap());
        let origin = strata.iter().find(|s| s.dim == 0).unwrap();
        assert_eq!(sample_stratum(origin, 10, 1.0, 1).unwrap(), vec![vec![0.0, 0.0]]);
    }

    #[test]
    fn newton_strata_keep_the_fixed_line() {
        let rs = build_root_system(CoxeterType::A(3)).unwrap();
        let strata = enumerate_strata(&rs);
        assert_eq!(strata.len(), 4);
        assert_eq!(strata.iter().map(|s| s.dim).min(), Some(1));
        let line = strata.iter().find(|s| s.dim == 1).unwrap();
        for p in sample_stratum(line, 20, 1.0, 3).unwrap() {
            assert!((p[0] - p[1]).abs() < 1e-12 && (p[1] - p[2]).abs() < 1e-12);
        }
    }
}
