//! Numerical exploration of the fibers `P_k⁻¹(mᵏ) ∩ C̄`: projection onto a
//! fiber, sampling, connectivity, Lagrange critical points of `p_{k+1}` and
//! the range of `p_{k+1}` over a fiber.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use petgraph::unionfind::UnionFind;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coxeter::{locate_stratum, CoxeterType, RootSystem, Stratum};
use crate::error::{Error, Result};
use crate::invariants::InvariantBasis;
use crate::jacobian::{combinations, normalized_jacobian};
use crate::rng::{gaussian_vec, stream_id, stream_rng};

/// Residual tolerance of [`solve_fiber_point`], relative to `max(1, |mᵢ|)`.
pub const FIBER_TOL: f64 = 1e-12;
/// Points closer than this are merged.
pub const DEDUP_RADIUS: f64 = 1e-6;
/// Lagrange residual accepted for a critical point.
pub const LAGRANGE_TOL: f64 = 1e-9;
/// Projected-Hessian eigenvalues closer to zero than this are degenerate.
pub const HESSIAN_GAP: f64 = 1e-6;
/// Isotropy forms must vanish to this multiple of `|x|` for a critical
/// point to be placed on a stratum.
pub const STRATUM_REL_TOL: f64 = 1e-7;

const MAX_ITER: usize = 100;

/// Seeded points of a fiber, folded into the closed chamber.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FiberSample {
    #[serde(rename = "type")]
    pub ty: CoxeterType,
    pub k: usize,
    pub target: Vec<f64>,
    /// Multistart projections first, then continuation points.
    pub points: Vec<Vec<f64>>,
    /// How many leading entries of `points` are multistart projections.
    pub starts: usize,
    pub seed: u64,
    /// Projections attempted and projections that failed to converge.
    pub attempts: usize,
    pub failures: usize,
}

impl FiberSample {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn check_k(basis: &InvariantBasis, k: usize, target: &[f64]) -> Result<()> {
    let n = basis.dim();
    if k == 0 || k > n || target.len() != k {
        return Err(Error::Usage(format!(
            "fiber needs 1 ≤ k ≤ {n} and a target of length k (k = {k}, target length {})",
            target.len()
        )));
    }
    Ok(())
}

/// Length scale of a fiber: `√m₁` when `p₁ = |x|²`; for the symmetric-group
/// realization (`p₁ = Σxᵢ`, `p₂ = Σxᵢ²`) the radius `√(m₂ − m₁²/n)` of the
/// sphere cut out by the first two invariants.
pub fn fiber_scale(basis: &InvariantBasis, target: &[f64]) -> Option<f64> {
    let ty = basis.coxeter_type();
    if ty.is_newton() {
        let n = basis.dim() as f64;
        let r2 = target.get(1).map(|m2| m2 - target[0] * target[0] / n)?;
        (r2 > 0.0).then(|| r2.sqrt())
    } else {
        (target[0] > 0.0).then(|| target[0].sqrt())
    }
}

/// Fibers that must be empty because `m₁ ≤ 0` (or `m₂ ≤ m₁²/n` for the
/// symmetric group).
fn trivially_empty(basis: &InvariantBasis, target: &[f64]) -> bool {
    if basis.coxeter_type().is_newton() {
        target.len() >= 2 && fiber_scale(basis, target).is_none()
    } else {
        target[0] <= 0.0
    }
}

fn residual(basis: &InvariantBasis, x: &[f64], target: &[f64]) -> DVector<f64> {
    let v = basis.numeric().eval(x, target.len());
    DVector::from_iterator(
        target.len(),
        v.iter().zip(target).map(|(p, m)| (p - m) / m.abs().max(1.0)),
    )
}

/// Gauss–Newton with minimum-norm steps on `P_k(x) = mᵏ`, then folded into
/// `C̄`. Fails with a convergence error after 100 iterations.
pub fn solve_fiber_point(
    basis: &InvariantBasis,
    rs: &RootSystem,
    k: usize,
    target: &[f64],
    x0: &[f64],
) -> Result<Vec<f64>> {
    solve_fiber_point_with(basis, rs, k, target, x0, FIBER_TOL)
}

/// [`solve_fiber_point`] with residual tolerance `tol` (relative to
/// `max(1, |mᵢ|)`).
pub fn solve_fiber_point_with(
    basis: &InvariantBasis,
    rs: &RootSystem,
    k: usize,
    target: &[f64],
    x0: &[f64],
    tol: f64,
) -> Result<Vec<f64>> {
    check_k(basis, k, target)?;
    if trivially_empty(basis, target) {
        return Err(Error::Usage(format!("target {target:?} has an empty fiber")));
    }
    let num = basis.numeric();
    let w = DVector::from_iterator(k, target.iter().map(|m| 1.0 / m.abs().max(1.0)));
    let mut x = x0.to_vec();
    let mut r = residual(basis, &x, target);
    for _ in 0..MAX_ITER {
        if r.amax() <= tol {
            return Ok(rs.fold_into_chamber(&x));
        }
        let mut j = num.jacobian(&x, k);
        for i in 0..k {
            j.row_mut(i).scale_mut(w[i]);
        }
        let step = j
            .svd(true, true)
            .solve(&r, 1e-14)
            .map_err(|e| Error::Convergence(e.to_string()))?;
        let mut t = 1.0;
        let r0 = r.norm();
        loop {
            let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(a, b)| a - t * b).collect();
            let rt = residual(basis, &trial, target);
            if rt.norm() < r0 || t < 1e-4 {
                x = trial;
                r = rt;
                break;
            }
            t *= 0.5;
        }
        if x.iter().any(|v| !v.is_finite()) {
            break;
        }
    }
    if r.amax() <= tol {
        return Ok(rs.fold_into_chamber(&x));
    }
    Err(Error::Convergence(format!(
        "fiber projection stalled at residual {:e}",
        r.amax()
    )))
}

/// A random starting point at the fiber's scale.
fn start_point<R: Rng>(basis: &InvariantBasis, target: &[f64], rng: &mut R) -> Vec<f64> {
    let n = basis.dim();
    let g = gaussian_vec(rng, n);
    if basis.coxeter_type().is_newton() {
        let r = fiber_scale(basis, target).unwrap_or(1.0);
        let c = target[0] / n as f64;
        let mean = g.iter().sum::<f64>() / n as f64;
        let centered: Vec<f64> = g.iter().map(|v| v - mean).collect();
        let s = r / norm(&centered).max(1e-300);
        centered.iter().map(|v| c + v * s).collect()
    } else {
        let s = target[0].max(0.0).sqrt() / norm(&g).max(1e-300);
        g.iter().map(|v| v * s).collect()
    }
}

/// Orthonormal basis of `ker J_k(x)` (columns).
fn tangent_basis(basis: &InvariantBasis, x: &[f64], k: usize) -> DMatrix<f64> {
    let n = basis.dim();
    let j = basis.numeric().jacobian(x, k);
    null_space(&j, n)
}

fn null_space(j: &DMatrix<f64>, n: usize) -> DMatrix<f64> {
    let jt_j = j.transpose() * j;
    let eig = SymmetricEigen::new(jt_j);
    let top = eig.eigenvalues.amax().max(1e-300);
    let cols: Vec<DVector<f64>> = (0..n)
        .filter(|&i| eig.eigenvalues[i] <= 1e-10 * top)
        .map(|i| eig.eigenvectors.column(i).into_owned())
        .collect();
    if cols.is_empty() {
        DMatrix::zeros(n, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// Fiber points from `⌈N/2⌉` seeded projections, each continued by one
/// tangential step of length `0.01·scale` and re-projection, keeping at most
/// `N` distinct points. An empty result is a legitimate outcome.
pub fn sample_fiber(
    basis: &InvariantBasis,
    rs: &RootSystem,
    k: usize,
    target: &[f64],
    count: usize,
    seed: u64,
) -> Result<FiberSample> {
    sample_fiber_with(basis, rs, k, target, count, seed, FIBER_TOL)
}

/// [`sample_fiber`] with projection tolerance `tol`.
pub fn sample_fiber_with(
    basis: &InvariantBasis,
    rs: &RootSystem,
    k: usize,
    target: &[f64],
    count: usize,
    seed: u64,
    tol: f64,
) -> Result<FiberSample> {
    check_k(basis, k, target)?;
    if k >= basis.dim() {
        return Err(Error::Usage("fiber sampling needs k < n".into()));
    }
    let mut fs = FiberSample {
        ty: basis.coxeter_type(),
        k,
        target: target.to_vec(),
        points: Vec::new(),
        starts: 0,
        seed,
        attempts: 0,
        failures: 0,
    };
    if trivially_empty(basis, target) {
        return Ok(fs);
    }
    let scale = fiber_scale(basis, target).unwrap_or(1.0);
    let step = 0.01 * scale;
    let walk = 1;
    let starts = count.div_ceil(walk + 1).max(1);
    let label = format!("fiber:{}:{k}", basis.coxeter_type());
    let runs: Vec<(Vec<Vec<f64>>, usize, usize)> = (0..starts)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, stream_id(&label, i as u64));
            let mut pts = Vec::new();
            let (mut att, mut fail) = (0, 0);
            let x0 = start_point(basis, target, &mut rng);
            att += 1;
            let Ok(mut x) = solve_fiber_point_with(basis, rs, k, target, &x0, tol) else {
                return (pts, att, fail + 1);
            };
            pts.push(x.clone());
            for _ in 0..walk {
                let t = tangent_basis(basis, &x, k);
                if t.ncols() == 0 {
                    break;
                }
                let c = DVector::from_vec(gaussian_vec(&mut rng, t.ncols()));
                let d = &t * c.normalize();
                let y: Vec<f64> = x.iter().zip(d.iter()).map(|(a, b)| a + step * b).collect();
                att += 1;
                match solve_fiber_point_with(basis, rs, k, target, &y, tol) {
                    Ok(z) => {
                        pts.push(z.clone());
                        x = z;
                    }
                    Err(_) => fail += 1,
                }
            }
            (pts, att, fail)
        })
        .collect();
    let mut walked = Vec::new();
    for (pts, att, fail) in runs {
        fs.attempts += att;
        fs.failures += fail;
        let mut it = pts.into_iter();
        if let Some(p) = it.next() {
            push_distinct(&mut fs.points, p);
        }
        walked.extend(it);
    }
    fs.starts = fs.points.len();
    for p in walked {
        if fs.points.len() >= count {
            break;
        }
        push_distinct(&mut fs.points, p);
    }
    fs.points.truncate(count);
    fs.starts = fs.starts.min(count);
    Ok(fs)
}

fn push_distinct(points: &mut Vec<Vec<f64>>, p: Vec<f64>) {
    if !points.iter().any(|q| dist2(q, &p) < DEDUP_RADIUS * DEDUP_RADIUS) {
        points.push(p);
    }
}

/// Three times the largest nearest-neighbour gap among the multistart
/// points of a sample.
pub fn connectivity_radius(fs: &FiberSample) -> f64 {
    3.0 * max_nearest_gap(&fs.points[..fs.starts])
}

/// Largest distance from a sample point to its nearest neighbour.
pub fn max_nearest_gap(points: &[Vec<f64>]) -> f64 {
    points
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            points
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, q)| dist2(p, q))
                .fold(f64::INFINITY, f64::min)
        })
        .filter(|d| d.is_finite())
        .map(f64::sqrt)
        .reduce(|| 0.0, f64::max)
}

/// Connected components of the graph joining points at distance `≤ r`.
pub fn fiber_connectivity(fs: &FiberSample, r: f64) -> usize {
    components(&fs.points, r)
}

pub fn components(points: &[Vec<f64>], r: f64) -> usize {
    let n = points.len();
    let r2 = r * r;
    let edges: Vec<(usize, usize)> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            (i + 1..n)
                .filter(move |&j| dist2(&points[i], &points[j]) <= r2)
                .map(move |j| (i, j))
        })
        .collect();
    let mut uf = UnionFind::new(n);
    for (a, b) in edges {
        uf.union(a, b);
    }
    let mut labels = uf.into_labeling();
    labels.sort_unstable();
    labels.dedup();
    labels.len()
}

/// Range of `p_{k+1}` over a fiber sample.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ValueInterval {
    pub lo: f64,
    pub hi: f64,
    /// Largest gap between consecutive sorted values over `hi − lo`
    /// (zero when `hi = lo`).
    pub max_gap: f64,
    pub count: usize,
}

pub fn fiber_value_interval(fs: &FiberSample, basis: &InvariantBasis) -> Result<ValueInterval> {
    if fs.points.is_empty() {
        return Err(Error::Usage("value interval of an empty fiber sample".into()));
    }
    if fs.k >= basis.dim() {
        return Err(Error::Usage("value interval needs k < n".into()));
    }
    let num = basis.numeric();
    let mut v: Vec<f64> = fs.points.iter().map(|x| num.value(fs.k, x)).collect();
    v.sort_by(f64::total_cmp);
    let (lo, hi) = (v[0], v[v.len() - 1]);
    let gap = v.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    let max_gap = if hi > lo { gap / (hi - lo) } else { 0.0 };
    Ok(ValueInterval {
        lo,
        hi,
        max_gap,
        count: v.len(),
    })
}

/// Widens a sampled interval by running the Lagrange system from the
/// `starts` lowest and highest samples; a converged point lies on the fiber,
/// so its value can only move an endpoint outward.
pub fn refine_value_interval(
    fs: &FiberSample,
    basis: &InvariantBasis,
    starts: usize,
) -> Result<ValueInterval> {
    let mut iv = fiber_value_interval(fs, basis)?;
    let num = basis.numeric();
    let mut order: Vec<(f64, usize)> = fs
        .points
        .iter()
        .enumerate()
        .map(|(i, x)| (num.value(fs.k, x), i))
        .collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0));
    let m = starts.min(order.len());
    let picks: Vec<usize> = order[..m]
        .iter()
        .chain(&order[order.len() - m..])
        .map(|&(_, i)| i)
        .collect();
    let found: Vec<f64> = picks
        .par_iter()
        .filter_map(|&i| lagrange_newton(basis, &fs.points[i], &fs.target))
        .map(|(x, _, _)| num.value(fs.k, &x))
        .collect();
    for v in found {
        iv.lo = iv.lo.min(v);
        iv.hi = iv.hi.max(v);
    }
    Ok(iv)
}

/// `mᵏ = P_k(x*)` for a seeded `x*` in the unit ball with
/// `min_τ λ_τ(x*) ≥ 0.05·|x*|`; returns `(x*, mᵏ)`.
pub fn regular_target(
    basis: &InvariantBasis,
    rs: &RootSystem,
    k: usize,
    seed: u64,
    index: u64,
) -> (Vec<f64>, Vec<f64>) {
    let n = basis.dim();
    let mut rng = stream_rng(seed, stream_id(&format!("target:{}:{k}", rs.coxeter_type()), index));
    loop {
        let g = gaussian_vec(&mut rng, n);
        let ng = norm(&g);
        if ng < 1e-12 {
            continue;
        }
        let u: f64 = rng.random();
        let r = u.powf(1.0 / n as f64).max(0.05);
        let x = rs.fold_into_chamber(&g.iter().map(|v| v * r / ng).collect::<Vec<_>>());
        if rs.min_lambda(&x) >= 0.05 * norm(&x) {
            let m = basis.numeric().eval(&x, k);
            return (x, m);
        }
    }
}

/// A solution of the Lagrange system for `p_{k+1}` on a fiber.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CriticalPoint {
    pub x: Vec<f64>,
    pub multipliers: Vec<f64>,
    pub value: f64,
    pub stratum: String,
    pub stratum_dim: usize,
    /// Eigenvalues of the Hessian of the Lagrange function on `ker J_k`.
    pub hessian_eigenvalues: Vec<f64>,
    /// Per irreducible isotropy component, the common sign of the Hessian
    /// restricted to it (`0` when the block is indefinite or degenerate).
    pub block_signs: Vec<i8>,
    pub residual: f64,
    /// Largest `|(k+1)×(k+1)|` minor on rows `1..k+1` (normalized rows).
    pub max_bordering_minor: f64,
}

/// A would-be counterexample, kept with its witness.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Anomaly {
    pub kind: String,
    pub x: Vec<f64>,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CriticalReport {
    #[serde(rename = "type")]
    pub ty: CoxeterType,
    pub k: usize,
    pub target: Vec<f64>,
    /// Sorted by value, then lexicographically by point.
    pub points: Vec<CriticalPoint>,
    pub anomalies: Vec<Anomaly>,
    pub starts: usize,
    pub converged: usize,
}

fn lagrange_residual(basis: &InvariantBasis, x: &[f64], mu: &[f64], target: &[f64]) -> DVector<f64> {
    let n = basis.dim();
    let k = target.len();
    let num = basis.numeric();
    let j = num.jacobian(x, k + 1);
    let mut f = DVector::zeros(n + k);
    for c in 0..n {
        let mut v = j[(k, c)];
        for (i, m) in mu.iter().enumerate() {
            v -= m * j[(i, c)];
        }
        f[c] = v;
    }
    let p = num.eval(x, k);
    for i in 0..k {
        f[n + i] = p[i] - target[i];
    }
    f
}

fn lagrange_hessian(basis: &InvariantBasis, x: &[f64], mu: &[f64]) -> DMatrix<f64> {
    let num = basis.numeric();
    let k = mu.len();
    let mut h = num.hessian(k, x);
    for (i, m) in mu.iter().enumerate() {
        h -= num.hessian(i, x) * *m;
    }
    h
}

fn least_squares_mu(basis: &InvariantBasis, x: &[f64], k: usize) -> Vec<f64> {
    let j = basis.numeric().jacobian(x, k + 1);
    let a = j.rows(0, k).transpose();
    let b = j.row(k).transpose();
    a.svd(true, true)
        .solve(&b, 1e-14)
        .map(|v| v.iter().cloned().collect())
        .unwrap_or_else(|_| vec![0.0; k])
}

/// Newton with backtracking on the square system
/// `{P_k(x) = mᵏ, ∇p_{k+1} = Σ μⱼ∇pⱼ}`.
fn lagrange_newton(
    basis: &InvariantBasis,
    x0: &[f64],
    target: &[f64],
) -> Option<(Vec<f64>, Vec<f64>, f64)> {
    let n = basis.dim();
    let k = target.len();
    let num = basis.numeric();
    let mut x = x0.to_vec();
    let mut mu = least_squares_mu(basis, &x, k);
    let mut f = lagrange_residual(basis, &x, &mu, target);
    for _ in 0..MAX_ITER {
        if f.amax() <= 1e-13 {
            break;
        }
        let j = num.jacobian(&x, k);
        let h = lagrange_hessian(basis, &x, &mu);
        let mut a = DMatrix::zeros(n + k, n + k);
        a.view_mut((0, 0), (n, n)).copy_from(&h);
        a.view_mut((0, n), (n, k)).copy_from(&(-j.transpose()));
        a.view_mut((n, 0), (k, n)).copy_from(&j);
        let step = a.svd(true, true).solve(&f, 1e-14).ok()?;
        let f0 = f.norm();
        let mut t = 1.0;
        loop {
            let xt: Vec<f64> = (0..n).map(|i| x[i] - t * step[i]).collect();
            let mt: Vec<f64> = (0..k).map(|i| mu[i] - t * step[n + i]).collect();
            let ft = lagrange_residual(basis, &xt, &mt, target);
            if ft.norm() < f0 || t < 1e-4 {
                x = xt;
                mu = mt;
                f = ft;
                break;
            }
            t *= 0.5;
        }
        if x.iter().any(|v| !v.is_finite()) {
            return None;
        }
    }
    let res = f.amax();
    (res <= LAGRANGE_TOL).then_some((x, mu, res))
}

/// Splits the isotropy roots into mutually orthogonal irreducible
/// components and returns an orthonormal basis (columns) of each span.
pub fn isotropy_blocks(rs: &RootSystem, isotropy: &[usize]) -> Vec<DMatrix<f64>> {
    let m = isotropy.len();
    let mut uf = UnionFind::new(m);
    for a in 0..m {
        for b in a + 1..m {
            let d: f64 = rs
                .root(isotropy[a])
                .iter()
                .zip(rs.root(isotropy[b]))
                .map(|(u, v)| u * v)
                .sum();
            if d.abs() > 1e-9 {
                uf.union(a, b);
            }
        }
    }
    let labels = uf.into_labeling();
    let mut groups: Vec<usize> = labels.clone();
    groups.sort_unstable();
    groups.dedup();
    groups
        .iter()
        .map(|&g| {
            let roots: Vec<DVector<f64>> = (0..m)
                .filter(|&i| labels[i] == g)
                .map(|i| DVector::from_column_slice(rs.root(isotropy[i])))
                .collect();
            orthonormal_span(&roots)
        })
        .collect()
}

fn orthonormal_span(vs: &[DVector<f64>]) -> DMatrix<f64> {
    let mut out: Vec<DVector<f64>> = Vec::new();
    for v in vs {
        let mut w = v.clone();
        for u in &out {
            let c = u.dot(&w);
            w -= u * c;
        }
        let nw = w.norm();
        if nw > 1e-9 {
            out.push(w / nw);
        }
    }
    DMatrix::from_columns(&out)
}

fn sign_of(eigs: &[f64]) -> i8 {
    if eigs.iter().all(|&e| e >= HESSIAN_GAP) {
        1
    } else if eigs.iter().all(|&e| e <= -HESSIAN_GAP) {
        -1
    } else {
        0
    }
}

/// Multistart Newton solves of the Lagrange system for `p_{k+1}` on
/// `P_k⁻¹(mᵏ)`. Each solution is folded into `C̄`, deduplicated and
/// classified; solutions off the `k`-strata, with a degenerate projected
/// Hessian or with an indefinite isotropy block are reported as anomalies.
pub fn critical_points(
    basis: &InvariantBasis,
    rs: &RootSystem,
    strata: &[Stratum],
    k: usize,
    target: &[f64],
    multistarts: usize,
    seed: u64,
) -> Result<CriticalReport> {
    check_k(basis, k, target)?;
    let n = basis.dim();
    if k >= n {
        return Err(Error::Usage("critical points need k < n".into()));
    }
    let mut report = CriticalReport {
        ty: basis.coxeter_type(),
        k,
        target: target.to_vec(),
        points: Vec::new(),
        anomalies: Vec::new(),
        starts: multistarts,
        converged: 0,
    };
    if trivially_empty(basis, target) {
        return Ok(report);
    }
    let label = format!("critical:{}:{k}", basis.coxeter_type());
    let sols: Vec<Option<(Vec<f64>, Vec<f64>, f64)>> = (0..multistarts)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, stream_id(&label, i as u64));
            let x0 = start_point(basis, target, &mut rng);
            let x1 = solve_fiber_point(basis, rs, k, target, &x0).ok()?;
            lagrange_newton(basis, &x1, target)
        })
        .collect();
    let num = basis.numeric();
    let b_cols = combinations(n, k + 1);
    for (x, mu, res) in sols.into_iter().flatten() {
        report.converged += 1;
        let x = rs.fold_into_chamber(&x);
        if report.points.iter().any(|p| dist2(&p.x, &x) < DEDUP_RADIUS * DEDUP_RADIUS) {
            continue;
        }
        let Some(s) = locate_stratum(rs, strata, &x, STRATUM_REL_TOL) else {
            report.anomalies.push(Anomaly {
                kind: "no-stratum".into(),
                x: x.clone(),
                detail: "critical point outside the closed chamber".into(),
            });
            continue;
        };
        let h = lagrange_hessian(basis, &x, &mu);
        let t = tangent_basis(basis, &x, k);
        let ph = t.transpose() * &h * &t;
        let mut eigs: Vec<f64> = SymmetricEigen::new(ph).eigenvalues.iter().cloned().collect();
        eigs.sort_by(f64::total_cmp);
        let block_signs: Vec<i8> = isotropy_blocks(rs, &s.isotropy)
            .iter()
            .map(|b| {
                let hb = b.transpose() * &h * b;
                sign_of(SymmetricEigen::new(hb).eigenvalues.as_slice())
            })
            .collect();
        let jn = normalized_jacobian(basis, &x);
        let max_bordering_minor = b_cols
            .iter()
            .map(|c| DMatrix::from_fn(k + 1, k + 1, |a, b| jn[(a, c[b])]).determinant().abs())
            .fold(0.0, f64::max);
        let cp = CriticalPoint {
            value: num.value(k, &x),
            x: x.clone(),
            multipliers: mu,
            stratum: s.id.clone(),
            stratum_dim: s.dim,
            hessian_eigenvalues: eigs.clone(),
            block_signs: block_signs.clone(),
            residual: res,
            max_bordering_minor,
        };
        if s.dim != k {
            report.anomalies.push(Anomaly {
                kind: "stratum-dimension".into(),
                x: x.clone(),
                detail: format!("critical point on {} of dimension {} ≠ k = {k}", s.id, s.dim),
            });
        }
        if eigs.iter().any(|e| e.abs() < HESSIAN_GAP) {
            report.anomalies.push(Anomaly {
                kind: "degenerate-hessian".into(),
                x: x.clone(),
                detail: format!("projected Hessian eigenvalues {eigs:?}"),
            });
        }
        if block_signs.contains(&0) {
            report.anomalies.push(Anomaly {
                kind: "indefinite-block".into(),
                x: x.clone(),
                detail: format!("isotropy block signs {block_signs:?}"),
            });
        }
        report.points.push(cp);
    }
    report.points.sort_by(|a, b| {
        a.value
            .total_cmp(&b.value)
            .then_with(|| a.x.partial_cmp(&b.x).unwrap_or(std::cmp::Ordering::Equal))
    });
    Ok(report)
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
    fn b2_projections() {
        let (b, rs) = setup(CoxeterType::B(2));
        let x = solve_fiber_point(&b, &rs, 1, &[1.0], &[0.9, 0.1]).unwrap();
        assert!((norm(&x) - 1.0).abs() < 1e-12);
        assert!(rs.chamber_contains(&x, 1e-12));
        let y = solve_fiber_point(&b, &rs, 2, &[1.0, 0.25], &[0.8, 0.5]).unwrap();
        let h = 0.5f64.sqrt();
        assert!((y[0] - h).abs() < 1e-6 && (y[1] - h).abs() < 1e-6, "{y:?}");
    }

    #[test]
    fn b2_empty_and_deterministic() {
        let (b, rs) = setup(CoxeterType::B(2));
        assert!(sample_fiber(&b, &rs, 1, &[-1.0], 50, 1).unwrap().is_empty());
        let a = sample_fiber(&b, &rs, 1, &[1.0], 200, 3).unwrap();
        let c = sample_fiber(&b, &rs, 1, &[1.0], 200, 3).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&c).unwrap());
    }

    #[test]
    fn b2_arc_is_connected_and_spans_range() {
        let (b, rs) = setup(CoxeterType::B(2));
        let fs = sample_fiber(&b, &rs, 1, &[1.0], 400, 5).unwrap();
        let r = connectivity_radius(&fs);
        assert_eq!(fiber_connectivity(&fs, r), 1);
        let iv = fiber_value_interval(&fs, &b).unwrap();
        assert!(iv.lo < 1e-4 && (iv.hi - 0.25).abs() < 1e-4, "{iv:?}");
    }

    #[test]
    fn two_clusters() {
        let pts = vec![vec![0.0, 0.0], vec![0.1, 0.0], vec![5.0, 5.0], vec![5.1, 5.0]];
        assert_eq!(components(&pts, 0.2), 2);
        assert_eq!(components(&pts[..1], 0.2), 1);
    }

    #[test]
    fn b2_critical_points() {
        let (b, rs) = setup(CoxeterType::B(2));
        let strata = enumerate_strata(&rs);
        let rep = critical_points(&b, &rs, &strata, 1, &[1.0], 16, 1).unwrap();
        assert!(rep.anomalies.is_empty(), "{:?}", rep.anomalies);
        assert_eq!(rep.points.len(), 2);
        assert!(rep.points[0].value.abs() < 1e-8);
        assert!((rep.points[1].value - 0.25).abs() < 1e-8);
        assert!((rep.points[1].multipliers[0] - 0.5).abs() < 1e-8);
        assert!(rep.points.iter().all(|p| p.stratum_dim == 1));
    }
}
