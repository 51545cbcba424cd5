use std::collections::HashMap;

use super::matrix::ScalarMatrix;
use super::poly::{Monomial, SparsePoly};
use super::scalar::Scalar;
use crate::error::{Error, Result};

/// Group average `(1/|G|)·Σ_w m∘w` of the monomial `x^exponents`.
///
/// `m∘w` only depends on the rows of `w` indexed by variables that occur in
/// the monomial, so elements sharing those rows are expanded once and
/// weighted by their multiplicity. For a pure power `xⱼᵏ` this reduces to a
/// power sum over the orbit of the j-th row.
pub fn reynolds_average(exponents: &[u32], group: &[ScalarMatrix]) -> Result<SparsePoly> {
    if group.is_empty() {
        return Err(Error::Usage("Reynolds average over an empty group".into()));
    }
    let n = exponents.len();
    if group.iter().any(|g| g.rows() != n || g.cols() != n) {
        return Err(Error::Usage(format!(
            "group matrices must be {n}x{n} for a monomial in {n} variables"
        )));
    }
    let used: Vec<usize> = (0..n).filter(|&j| exponents[j] > 0).collect();
    let mut classes: HashMap<Vec<&[Scalar]>, i64> = HashMap::new();
    for g in group {
        let key: Vec<&[Scalar]> = used.iter().map(|&j| g.row(j)).collect();
        *classes.entry(key).or_insert(0) += 1;
    }
    // Deterministic summation order.
    let mut classes: Vec<(Vec<&[Scalar]>, i64)> = classes.into_iter().collect();
    classes.sort_by(|a, b| format!("{:?}", a.0).cmp(&format!("{:?}", b.0)));

    let mut acc = SparsePoly::zero(n);
    for (rows, mult) in classes {
        let mut t = SparsePoly::constant(n, Scalar::from_int(mult));
        for (row, &j) in rows.iter().zip(&used) {
            t = &t * &SparsePoly::linear(row).pow(exponents[j]);
        }
        acc = &acc + &t;
    }
    Ok(acc.scale(&Scalar::from_frac(1, group.len() as i64)))
}

/// Returns true iff `p∘w == p` exactly for every matrix given.
pub fn is_invariant(p: &SparsePoly, generators: &[ScalarMatrix]) -> Result<bool> {
    for g in generators {
        if p.linear_substitute(g)? != *p {
            return Ok(false);
        }
    }
    Ok(true)
}

#[allow(dead_code)]
pub(crate) fn monomial(exponents: &[u32]) -> SparsePoly {
    SparsePoly::term(Monomial(exponents.to_vec()), Scalar::one())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn signed_permutations_2d() -> Vec<ScalarMatrix> {
        let mut out = Vec::new();
        for swap in [false, true] {
            for s0 in [1, -1] {
                for s1 in [1, -1] {
                    let mut m = ScalarMatrix::zeros(2, 2);
                    let (c0, c1) = if swap { (1, 0) } else { (0, 1) };
                    m.set(0, c0, Scalar::from_int(s0));
                    m.set(1, c1, Scalar::from_int(s1));
                    out.push(m);
                }
            }
        }
        out
    }

    #[test]
    fn b2_average_of_x1_squared() {
        let g = signed_permutations_2d();
        assert_eq!(g.len(), 8);
        let avg = reynolds_average(&[2, 0], &g).unwrap();
        let expected = (&monomial(&[2, 0]) + &monomial(&[0, 2])).scale(&Scalar::from_frac(1, 2));
        assert_eq!(avg, expected);
        // x1·x2 averages to zero under sign changes.
        assert!(reynolds_average(&[1, 1], &g).unwrap().is_zero());
    }

    #[test]
    fn trivial_group_fixes_monomial() {
        let id = vec![ScalarMatrix::identity(3)];
        assert_eq!(reynolds_average(&[1, 2, 3], &id).unwrap(), monomial(&[1, 2, 3]));
    }

    #[test]
    fn empty_group_is_usage_error() {
        assert!(matches!(reynolds_average(&[1], &[]), Err(Error::Usage(_))));
    }
}
