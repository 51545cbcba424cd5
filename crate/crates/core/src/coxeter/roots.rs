use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::types::CoxeterType;
use crate::algebra::{Scalar, ScalarMatrix, SparsePoly};
use crate::error::{Error, Result};

/// Positive roots of a supported type, with reflections and linear forms.
///
/// Float data is always present and uses unit roots. Exact data over
/// ℚ(√5) is present whenever the realization allows it (every type except
/// the dihedral groups `I2(p)` with `p ≠ 4`); exact roots are not
/// normalized, since `λ_τ` is only defined up to a nonzero constant.
#[derive(Clone, Debug)]
pub struct RootSystem {
    ty: CoxeterType,
    dim: usize,
    positive: Vec<Vec<f64>>,
    positive_exact: Option<Vec<Vec<Scalar>>>,
    /// Indices into `positive`, in wall order.
    simple: Vec<usize>,
    reflections: Vec<DMatrix<f64>>,
    reflections_exact: Option<Vec<ScalarMatrix>>,
    /// Unit vector spanning the fixed line of the Newton realization.
    invariant_line: Option<Vec<f64>>,
    /// Rows are the fundamental coweights dual to the simple roots.
    coweights: Vec<Vec<f64>>,
}

impl RootSystem {
    pub fn coxeter_type(&self) -> CoxeterType {
        self.ty
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of positive roots, i.e. of reflections.
    pub fn len(&self) -> usize {
        self.positive.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positive.is_empty()
    }

    pub fn is_exact(&self) -> bool {
        self.positive_exact.is_some()
    }

    /// Reducible realization: the group fixes a line pointwise.
    pub fn is_reducible(&self) -> bool {
        self.invariant_line.is_some()
    }

    pub fn invariant_line(&self) -> Option<&[f64]> {
        self.invariant_line.as_deref()
    }

    /// Unit positive root `τ`.
    pub fn root(&self, tau: usize) -> &[f64] {
        &self.positive[tau]
    }

    pub fn roots(&self) -> &[Vec<f64>] {
        &self.positive
    }

    pub fn root_exact(&self, tau: usize) -> Option<&[Scalar]> {
        self.positive_exact.as_ref().map(|r| r[tau].as_slice())
    }

    /// Indices of the simple roots among the positive roots.
    pub fn simple_indices(&self) -> &[usize] {
        &self.simple
    }

    pub fn simple_root(&self, i: usize) -> &[f64] {
        &self.positive[self.simple[i]]
    }

    pub fn rank(&self) -> usize {
        self.simple.len()
    }

    pub fn coweight(&self, i: usize) -> &[f64] {
        &self.coweights[i]
    }

    pub fn reflection(&self, tau: usize) -> &DMatrix<f64> {
        &self.reflections[tau]
    }

    pub fn reflection_exact(&self, tau: usize) -> Option<&ScalarMatrix> {
        self.reflections_exact.as_ref().map(|r| &r[tau])
    }

    /// Exact simple reflections, when the realization is exact.
    pub fn simple_reflections_exact(&self) -> Option<Vec<ScalarMatrix>> {
        let all = self.reflections_exact.as_ref()?;
        Some(self.simple.iter().map(|&i| all[i].clone()).collect())
    }

    pub fn simple_reflections(&self) -> Vec<DMatrix<f64>> {
        self.simple.iter().map(|&i| self.reflections[i].clone()).collect()
    }

    /// Linear form `λ_τ(x) = ⟨α_τ, x⟩` evaluated with the unit root.
    pub fn lambda(&self, tau: usize, x: &[f64]) -> f64 {
        dot(&self.positive[tau], x)
    }

    /// Exact linear form `λ_τ` as a degree-one polynomial.
    pub fn lambda_poly(&self, tau: usize) -> Option<SparsePoly> {
        self.positive_exact
            .as_ref()
            .map(|r| SparsePoly::linear(&r[tau]))
    }

    /// Exact product `∏_τ λ_τ` over all positive roots.
    ///
    /// For dihedral groups whose roots are not exact, roots at angles `θ`
    /// and `π − θ` are paired: `(x sin θ − y cos θ)(x sin θ + y cos θ) =
    /// x² sin²θ − y² cos²θ`, which is exact whenever `cos(2π/p) ∈ ℚ(√5)`.
    /// The pairing reproduces the product of the unit float roots.
    pub fn lambda_product_exact(&self) -> Option<SparsePoly> {
        if let Some(roots) = &self.positive_exact {
            let mut acc = SparsePoly::one(self.dim);
            for r in roots {
                acc = &acc * &SparsePoly::linear(r);
            }
            return Some(acc);
        }
        let CoxeterType::I2(p) = self.ty else {
            return None;
        };
        let c = cos_two_pi_over(p)?;
        let x = SparsePoly::var(2, 0);
        let y = SparsePoly::var(2, 1);
        let mut acc = y.clone();
        if p % 2 == 0 {
            acc = &acc * &x;
        }
        let half = Scalar::from_frac(1, 2);
        for j in 1..=(p - 1) / 2 {
            let cos2 = chebyshev(j, &c);
            let cos_sq = &(&Scalar::one() + &cos2) * &half;
            let sin_sq = &(&Scalar::one() - &cos2) * &half;
            let pair = &(&x * &x).scale(&sin_sq) - &(&y * &y).scale(&cos_sq);
            acc = &acc * &pair;
        }
        Some(acc)
    }

    /// True iff `⟨x, αᵢ⟩ ≥ −tol` for every unit simple root.
    pub fn chamber_contains(&self, x: &[f64], tol: f64) -> bool {
        self.simple.iter().all(|&i| dot(&self.positive[i], x) >= -tol)
    }

    /// Reflects `x` into the closed fundamental chamber.
    pub fn fold_into_chamber(&self, x: &[f64]) -> Vec<f64> {
        let mut y = x.to_vec();
        let scale = norm(x).max(1e-300);
        for _ in 0..10_000 {
            let worst = self
                .simple
                .iter()
                .map(|&i| (i, dot(&self.positive[i], &y)))
                .min_by(|a, b| a.1.total_cmp(&b.1));
            match worst {
                Some((i, v)) if v < -1e-15 * scale => {
                    let r = &self.positive[i];
                    for (yk, rk) in y.iter_mut().zip(r) {
                        *yk -= 2.0 * v * rk;
                    }
                }
                _ => break,
            }
        }
        y
    }

    /// A point in the open chamber, normalized to unit length.
    pub fn chamber_point(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.dim];
        for w in &self.coweights {
            for (xi, wi) in x.iter_mut().zip(w) {
                *xi += wi;
            }
        }
        if let Some(line) = &self.invariant_line {
            for (xi, li) in x.iter_mut().zip(line) {
                *xi += 0.5 * li;
            }
        }
        let n = norm(&x);
        x.iter().map(|v| v / n).collect()
    }

    /// Minimum of `λ_τ(x)` over all positive roots.
    pub fn min_lambda(&self, x: &[f64]) -> f64 {
        (0..self.len())
            .map(|t| self.lambda(t, x))
            .fold(f64::INFINITY, f64::min)
    }

    /// JSON-friendly dump of the root data.
    pub fn dump(&self) -> RootSystemDump {
        RootSystemDump {
            ty: self.ty,
            dim: self.dim,
            reducible: self.is_reducible(),
            degrees: self.ty.degrees(),
            simple: self.simple.clone(),
            positive_roots: self.positive.clone(),
            positive_roots_exact: self.positive_exact.as_ref().map(|rs| {
                rs.iter()
                    .map(|r| r.iter().map(|s| s.to_string()).collect())
                    .collect()
            }),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RootSystemDump {
    #[serde(rename = "type")]
    pub ty: CoxeterType,
    pub dim: usize,
    pub reducible: bool,
    pub degrees: Vec<u32>,
    pub simple: Vec<usize>,
    pub positive_roots: Vec<Vec<f64>>,
    pub positive_roots_exact: Option<Vec<Vec<String>>>,
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `cos(2π/p)` when it lies in ℚ(√5).
fn cos_two_pi_over(p: u32) -> Option<Scalar> {
    let q = |a, b| Scalar::from_frac(a, b);
    let quarter_sqrt5 = &Scalar::sqrt5() * &q(1, 4);
    match p {
        3 => Some(q(-1, 2)),
        4 => Some(Scalar::zero()),
        5 => Some(&quarter_sqrt5 - &q(1, 4)),
        6 => Some(q(1, 2)),
        10 => Some(&quarter_sqrt5 + &q(1, 4)),
        _ => None,
    }
}

/// `T_j(c)`: `cos(jθ)` from `c = cos θ`.
fn chebyshev(j: u32, c: &Scalar) -> Scalar {
    let two = Scalar::from_int(2);
    let (mut prev, mut cur) = (Scalar::one(), c.clone());
    if j == 0 {
        return prev;
    }
    for _ in 1..j {
        let next = &(&(&two * c) * &cur) - &prev;
        prev = cur;
        cur = next;
    }
    cur
}

fn e(n: usize, i: usize) -> Vec<Scalar> {
    (0..n)
        .map(|k| if k == i { Scalar::one() } else { Scalar::zero() })
        .collect()
}

fn combo(n: usize, terms: &[(usize, i64)]) -> Vec<Scalar> {
    let mut v = vec![Scalar::zero(); n];
    for &(i, s) in terms {
        v[i] = &v[i] + &Scalar::from_int(s);
    }
    v
}

/// Roots in generation order for the exact realizations, before sign
/// selection and deduplication.
fn exact_root_candidates(t: CoxeterType) -> Vec<Vec<Scalar>> {
    let n = t.dim();
    let mut out = Vec::new();
    let pairs = |plus: bool, out: &mut Vec<Vec<Scalar>>| {
        for i in 0..n {
            for j in i + 1..n {
                out.push(combo(n, &[(i, 1), (j, if plus { 1 } else { -1 })]));
            }
        }
    };
    match t {
        CoxeterType::A(1) => out.push(e(1, 0)),
        CoxeterType::A(_) => pairs(false, &mut out),
        CoxeterType::B(_) => {
            pairs(false, &mut out);
            out.extend((0..n).map(|i| e(n, i)));
            pairs(true, &mut out);
        }
        CoxeterType::D(_) => {
            pairs(false, &mut out);
            pairs(true, &mut out);
        }
        CoxeterType::F4 => {
            pairs(false, &mut out);
            out.extend((0..n).map(|i| e(n, i)));
            pairs(true, &mut out);
            let half = Scalar::from_frac(1, 2);
            for signs in 0..8u32 {
                let mut v = vec![half.clone()];
                for k in 0..3 {
                    v.push(if signs & (1 << k) != 0 { -&half } else { half.clone() });
                }
                out.push(v);
            }
        }
        CoxeterType::I2(4) => {
            out.push(combo(2, &[(1, 1)]));
            out.push(combo(2, &[(0, 1), (1, -1)]));
            out.push(combo(2, &[(0, 1)]));
            out.push(combo(2, &[(0, 1), (1, 1)]));
        }
        CoxeterType::H3 | CoxeterType::H4 => {
            out.extend((0..n).map(|i| e(n, i)));
            let half = Scalar::from_frac(1, 2);
            let phi = &Scalar::phi() * &half;
            let one = half.clone();
            let inv_phi = &(&Scalar::phi() - &Scalar::one()) * &half;
            let base = [phi, one, inv_phi];
            if t == CoxeterType::H4 {
                for signs in 0..16u32 {
                    out.push(
                        (0..4)
                            .map(|k| if signs & (1 << k) != 0 { -&half } else { half.clone() })
                            .collect(),
                    );
                }
                for perm in even_permutations_of_4() {
                    // Slot perm[k] receives (φ, 1, φ⁻¹, 0)[k].
                    for signs in 0..8u32 {
                        let mut v = vec![Scalar::zero(); 4];
                        for k in 0..3 {
                            let s = if signs & (1 << k) != 0 { -&base[k] } else { base[k].clone() };
                            v[perm[k]] = s;
                        }
                        out.push(v);
                    }
                }
            } else {
                // Cyclic shifts of (φ⁻¹, 1, φ)/2; the other chirality is not closed.
                let base = [base[2].clone(), base[1].clone(), base[0].clone()];
                for shift in 0..3 {
                    for signs in 0..8u32 {
                        let mut v = vec![Scalar::zero(); 3];
                        for k in 0..3 {
                            let s = if signs & (1 << k) != 0 { -&base[k] } else { base[k].clone() };
                            v[(k + shift) % 3] = s;
                        }
                        out.push(v);
                    }
                }
            }
        }
        CoxeterType::I2(_) => unreachable!("dihedral roots are built in floating point"),
    }
    out
}

fn even_permutations_of_4() -> Vec<[usize; 4]> {
    let mut out = Vec::new();
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    let distinct = (0..4).all(|i| (i + 1..4).all(|j| p[i] != p[j]));
                    if !distinct {
                        continue;
                    }
                    let inversions = (0..4)
                        .flat_map(|i| (i + 1..4).map(move |j| (i, j)))
                        .filter(|&(i, j)| p[i] > p[j])
                        .count();
                    if inversions % 2 == 0 {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

/// Generic vector defining the positive system: positive roots pair
/// strictly positively with it.
fn generic_direction(t: CoxeterType) -> Vec<f64> {
    match t {
        CoxeterType::A(_) | CoxeterType::B(_) | CoxeterType::D(_) => {
            let n = t.dim();
            (0..n).map(|i| (n - i) as f64).collect()
        }
        CoxeterType::F4 => vec![8.0, 4.0, 2.0, 1.0],
        CoxeterType::H3 => vec![1.0, 0.37, 0.113],
        CoxeterType::H4 => vec![1.0, 0.37, 0.113, 0.0291],
        CoxeterType::I2(p) => {
            let a = PI / (2.0 * p as f64);
            vec![a.cos(), a.sin()]
        }
    }
}

fn unit(v: &[f64]) -> Vec<f64> {
    let n = norm(v);
    v.iter().map(|x| x / n).collect()
}

fn reflection_f64(r: &[f64]) -> DMatrix<f64> {
    let n = r.len();
    let v = DVector::from_column_slice(r);
    DMatrix::identity(n, n) - (&v * v.transpose()) * (2.0 / v.dot(&v))
}

fn reflection_exact(r: &[Scalar]) -> ScalarMatrix {
    let n = r.len();
    let mut rr = Scalar::zero();
    for c in r {
        rr += &(c * c);
    }
    let f = &Scalar::from_int(2) / &rr;
    let mut m = ScalarMatrix::identity(n);
    for i in 0..n {
        for j in 0..n {
            if r[i].is_zero() || r[j].is_zero() {
                continue;
            }
            let v = m.get(i, j) - &(&(&f * &r[i]) * &r[j]);
            m.set(i, j, v);
        }
    }
    m
}

/// Builds the positive roots, simple roots, reflections and coweights.
pub fn build_root_system(t: CoxeterType) -> Result<RootSystem> {
    let t = t.checked()?;
    let n = t.dim();
    let v = generic_direction(t);

    let (positive_exact, positive): (Option<Vec<Vec<Scalar>>>, Vec<Vec<f64>>) = match t {
        CoxeterType::I2(p) if p != 4 => {
            let roots = (0..p)
                .map(|j| {
                    let th = PI * j as f64 / p as f64;
                    if j == 0 {
                        vec![0.0, 1.0]
                    } else {
                        vec![th.sin(), -th.cos()]
                    }
                })
                .collect();
            (None, roots)
        }
        _ => {
            let mut exact = Vec::new();
            for r in exact_root_candidates(t) {
                let rf: Vec<f64> = r.iter().map(Scalar::to_f64).collect();
                let s = dot(&rf, &v);
                if s.abs() < 1e-6 * norm(&rf) {
                    return Err(Error::Verification(format!(
                        "direction used to select positive roots of {t} is not generic"
                    )));
                }
                let r: Vec<Scalar> = if s > 0.0 { r } else { r.iter().map(|c| -c).collect() };
                if !exact.contains(&r) {
                    exact.push(r);
                }
            }
            let floats = exact
                .iter()
                .map(|r| unit(&r.iter().map(Scalar::to_f64).collect::<Vec<_>>()))
                .collect();
            (Some(exact), floats)
        }
    };

    let reflections: Vec<DMatrix<f64>> = positive.iter().map(|r| reflection_f64(r)).collect();
    let reflections_exact = positive_exact
        .as_ref()
        .map(|rs| rs.iter().map(|r| reflection_exact(r)).collect::<Vec<_>>());

    // A positive root is simple iff its reflection makes exactly one
    // positive root negative (length-one elements are simple reflections).
    let mut simple = Vec::new();
    for (i, s) in reflections.iter().enumerate() {
        let negated = positive
            .iter()
            .filter(|b| {
                let img = s * DVector::from_column_slice(b);
                img.as_slice().iter().zip(&v).map(|(a, b)| a * b).sum::<f64>() < 0.0
            })
            .count();
        if negated == 1 {
            simple.push(i);
        }
    }
    let expected_rank = if t.is_newton() { n - 1 } else { n };
    if simple.len() != expected_rank {
        return Err(Error::Verification(format!(
            "{t}: found {} simple roots, expected {expected_rank}",
            simple.len()
        )));
    }

    let invariant_line = t.is_newton().then(|| vec![1.0 / (n as f64).sqrt(); n]);

    // Coweights: rows of the pseudo-inverse of the simple-root matrix.
    let a = DMatrix::from_fn(simple.len(), n, |i, j| positive[simple[i]][j]);
    let pinv = a
        .clone()
        .pseudo_inverse(1e-12)
        .map_err(|e| Error::Verification(format!("coweights of {t}: {e}")))?;
    let coweights = (0..simple.len())
        .map(|i| pinv.column(i).iter().copied().collect())
        .collect();

    Ok(RootSystem {
        ty: t,
        dim: n,
        positive,
        positive_exact,
        simple,
        reflections,
        reflections_exact,
        invariant_line,
        coweights,
    })
}
