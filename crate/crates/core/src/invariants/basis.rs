use nalgebra::DMatrix;

use crate::algebra::{power_table, FloatPoly, SparsePoly};
use crate::coxeter::CoxeterType;
use crate::error::{Error, Result};

/// Basic invariants of a group, in degree order, with a floating-point copy
/// of the polynomials and their first and second derivatives.
#[derive(Clone, Debug)]
pub struct InvariantBasis {
    ty: CoxeterType,
    degrees: Vec<u32>,
    polys: Vec<SparsePoly>,
    num: NumericBasis,
}

impl InvariantBasis {
    /// Checks that the polynomials are homogeneous and that their degrees,
    /// in some order, are the type's degree table.
    pub fn new(ty: CoxeterType, polys: Vec<SparsePoly>) -> Result<Self> {
        let n = ty.dim();
        if polys.len() != n {
            return Err(Error::Usage(format!(
                "{ty} needs {n} invariants, got {}",
                polys.len()
            )));
        }
        let mut degrees = Vec::with_capacity(n);
        for (i, p) in polys.iter().enumerate() {
            match p.degree() {
                Some(k) if k > 0 && p.nvars() == n && p.is_homogeneous() => degrees.push(k),
                _ => {
                    return Err(Error::Usage(format!(
                        "invariant {} of {ty} must be homogeneous of positive degree in {n} variables",
                        i + 1
                    )))
                }
            }
        }
        let mut sorted = degrees.clone();
        sorted.sort_unstable();
        if sorted != ty.degrees() {
            return Err(Error::Usage(format!(
                "degrees {degrees:?} do not match the table {:?} of {ty}",
                ty.degrees()
            )));
        }
        let num = NumericBasis::new(&polys);
        Ok(InvariantBasis {
            ty,
            degrees,
            polys,
            num,
        })
    }

    /// No degree or homogeneity checks.
    #[cfg(test)]
    pub(crate) fn unchecked(ty: CoxeterType, polys: Vec<SparsePoly>) -> Self {
        let num = NumericBasis::new(&polys);
        InvariantBasis {
            ty,
            degrees: ty.degrees(),
            polys,
            num,
        }
    }

    pub fn coxeter_type(&self) -> CoxeterType {
        self.ty
    }

    /// Degrees in row order.
    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn polys(&self) -> &[SparsePoly] {
        &self.polys
    }

    pub fn poly(&self, i: usize) -> &SparsePoly {
        &self.polys[i]
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.ty.dim()
    }

    pub fn numeric(&self) -> &NumericBasis {
        &self.num
    }

    /// Same type, different polynomials (used to build perturbed bases in
    /// tests and alternative orderings).
    pub fn with_polys(&self, polys: Vec<SparsePoly>) -> Result<Self> {
        InvariantBasis::new(self.ty, polys)
    }
}

/// `P_k(x) = (p₁(x), …, p_k(x))`.
pub fn chevalley_eval(basis: &InvariantBasis, x: &[f64], k: usize) -> Result<Vec<f64>> {
    let n = basis.dim();
    if x.len() != n {
        return Err(Error::Usage(format!("point of length {} for {n} variables", x.len())));
    }
    if k == 0 || k > n {
        return Err(Error::Usage(format!("truncation k = {k} outside 1..={n}")));
    }
    Ok(basis.num.eval(x, k))
}

/// Floating-point invariants with precomputed gradients and Hessians.
#[derive(Clone, Debug)]
pub struct NumericBasis {
    n: usize,
    max_deg: Vec<u32>,
    p: Vec<FloatPoly>,
    grad: Vec<Vec<FloatPoly>>,
    grad_abs: Vec<Vec<FloatPoly>>,
    hess: Vec<Vec<Vec<FloatPoly>>>,
}

impl NumericBasis {
    pub fn new(polys: &[SparsePoly]) -> Self {
        let n = polys.first().map_or(0, |p| p.nvars());
        let p: Vec<FloatPoly> = polys.iter().map(|q| q.to_float()).collect();
        let grad: Vec<Vec<FloatPoly>> = p
            .iter()
            .map(|q| (0..n).map(|j| q.diff(j)).collect())
            .collect();
        let grad_abs = grad
            .iter()
            .map(|g| g.iter().map(|gj| gj.abs()).collect())
            .collect();
        let hess = grad
            .iter()
            .map(|g| {
                g.iter()
                    .map(|gj| (0..n).map(|l| gj.diff(l)).collect())
                    .collect()
            })
            .collect();
        let mut max_deg = vec![0u32; n];
        for q in &p {
            for (d, &e) in max_deg.iter_mut().zip(q.max_degrees()) {
                *d = (*d).max(e);
            }
        }
        NumericBasis {
            n,
            max_deg,
            p,
            grad,
            grad_abs,
            hess,
        }
    }

    fn table(&self, x: &[f64]) -> Vec<Vec<f64>> {
        power_table(x, &self.max_deg)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// `(p₁(x), …, p_k(x))`.
    pub fn eval(&self, x: &[f64], k: usize) -> Vec<f64> {
        let pw = self.table(x);
        self.p[..k].iter().map(|q| q.eval_with(&pw)).collect()
    }

    /// `p_i(x)`, zero-based.
    pub fn value(&self, i: usize, x: &[f64]) -> f64 {
        self.p[i].eval_with(&self.table(x))
    }

    /// `∇p_i(x)`, zero-based.
    pub fn gradient(&self, i: usize, x: &[f64]) -> Vec<f64> {
        let pw = self.table(x);
        self.grad[i].iter().map(|g| g.eval_with(&pw)).collect()
    }

    /// Euclidean norm of `∇p_i` computed with absolute coefficients at `|x|`:
    /// the size of the summands behind each entry of the gradient.
    pub fn gradient_magnitude(&self, i: usize, x: &[f64]) -> f64 {
        let ax: Vec<f64> = x.iter().map(|v| v.abs()).collect();
        let pw = self.table(&ax);
        self.grad_abs[i]
            .iter()
            .map(|g| g.eval_with(&pw).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Rows `∇p₁, …, ∇p_k` at `x`, as a `k × n` matrix.
    pub fn jacobian(&self, x: &[f64], k: usize) -> DMatrix<f64> {
        let pw = self.table(x);
        DMatrix::from_fn(k, self.n, |i, j| self.grad[i][j].eval_with(&pw))
    }

    /// Hessian of `p_i` at `x`, zero-based.
    pub fn hessian(&self, i: usize, x: &[f64]) -> DMatrix<f64> {
        let pw = self.table(x);
        DMatrix::from_fn(self.n, self.n, |a, b| self.hess[i][a][b].eval_with(&pw))
    }
}
