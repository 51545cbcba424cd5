use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::basis::InvariantBasis;
use super::store::{load_basis_file, write_basis_file};
use crate::algebra::{
    monomials_of_degree, reynolds_average, Scalar, ScalarMatrix, SparsePoly,
};
use crate::coxeter::{build_root_system, generate_group, CoxeterType, RootSystem};
use crate::error::{Error, Result};
use crate::rng::{gaussian_vec, stream_rng};

/// Row position of the invariant `x₁⋯xₙ` of `D(n)`.
///
/// The first two keep degree order and only differ when `n` is even, where
/// `x₁⋯xₙ` ties with the elementary symmetric function of degree `n`.
/// `ProductAtEnd` puts it after every elementary symmetric function.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DOrdering {
    #[default]
    ProductLast,
    ProductFirst,
    ProductAtEnd,
}

/// Cache and data locations plus the `D(n)` tie order.
#[derive(Clone, Debug)]
pub struct BuildOptions {
    /// Directory of cached bases, one `<type>.json` per type. A cached file
    /// takes precedence over every other source; Reynolds bases are written
    /// back to it.
    pub cache_dir: Option<PathBuf>,
    /// Directory holding the shipped `H4.json`.
    pub data_dir: PathBuf,
    pub d_order: DOrdering,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            cache_dir: None,
            data_dir: PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/data")),
            d_order: DOrdering::default(),
        }
    }
}

impl BuildOptions {
    /// Defaults overridden by `CHEVALLEY_CACHE_DIR` and `CHEVALLEY_DATA_DIR`.
    pub fn from_env() -> Self {
        let mut o = BuildOptions::default();
        if let Some(d) = std::env::var_os("CHEVALLEY_CACHE_DIR") {
            o.cache_dir = Some(PathBuf::from(d));
        }
        if let Some(d) = std::env::var_os("CHEVALLEY_DATA_DIR") {
            o.data_dir = PathBuf::from(d);
        }
        o
    }
}

/// Basic invariants with options taken from the environment.
pub fn basic_invariants(t: CoxeterType) -> Result<InvariantBasis> {
    basic_invariants_with(t, &BuildOptions::from_env())
}

pub fn basic_invariants_with(t: CoxeterType, opts: &BuildOptions) -> Result<InvariantBasis> {
    let t = t.checked()?;
    let path = opts.cache_dir.as_ref().map(|d| d.join(format!("{t}.json")));
    if let Some(p) = path.as_ref().filter(|p| p.exists()) {
        return load_basis_file(p, t);
    }
    if let Some(polys) = closed_form(t, opts.d_order) {
        return InvariantBasis::new(t, polys);
    }
    match t {
        CoxeterType::H4 => {
            let path = opts.data_dir.join("H4.json");
            if !path.exists() {
                return Err(Error::Capability(format!(
                    "H4 invariants need the data file {}",
                    path.display()
                )));
            }
            load_basis_file(&path, t)
        }
        _ => {
            let rs = build_root_system(t)?;
            let group = generate_group(&rs, t.order())?;
            let basis = InvariantBasis::new(t, reynolds_basis(&rs, &group)?)?;
            if let Some(p) = &path {
                write_basis_file(p, &basis)?;
            }
            Ok(basis)
        }
    }
}

/// Closed-form invariants for `A`, `B`, `D` and `I2`; `None` for the
/// exceptional types.
pub fn closed_form(t: CoxeterType, d_order: DOrdering) -> Option<Vec<SparsePoly>> {
    let n = t.dim();
    let x = |i: usize| SparsePoly::var(n, i);
    match t {
        CoxeterType::A(1) => Some(vec![&x(0) * &x(0)]),
        CoxeterType::A(_) => Some(
            (1..=n as u32)
                .map(|k| (0..n).fold(SparsePoly::zero(n), |acc, i| &acc + &x(i).pow(k)))
                .collect(),
        ),
        CoxeterType::B(_) => Some(elementary_in_squares(n)[1..].to_vec()),
        CoxeterType::D(_) => {
            let e = elementary_in_squares(n);
            let mut polys: Vec<SparsePoly> = e[1..n].to_vec();
            let prod = (0..n).fold(SparsePoly::one(n), |acc, i| &acc * &x(i));
            let at = match d_order {
                DOrdering::ProductLast => n / 2,
                DOrdering::ProductFirst => (n - 1) / 2,
                DOrdering::ProductAtEnd => n - 1,
            };
            polys.insert(at, prod);
            Some(polys)
        }
        CoxeterType::I2(p) => {
            let mut terms = Vec::new();
            let mut binom: i64 = 1;
            for j in 0..=p {
                if j % 2 == 0 {
                    let sign = if j % 4 == 0 { 1 } else { -1 };
                    terms.push((vec![p - j, j], Scalar::from_int(sign * binom)));
                }
                binom = binom * (p - j) as i64 / (j + 1) as i64;
            }
            let circle = &(&x(0) * &x(0)) + &(&x(1) * &x(1));
            let re = SparsePoly::from_terms(2, terms).expect("two-variable terms");
            Some(vec![circle, re])
        }
        CoxeterType::H3 | CoxeterType::H4 | CoxeterType::F4 => None,
    }
}

/// `e₀, …, eₙ` evaluated at `(x₁², …, xₙ²)`.
fn elementary_in_squares(n: usize) -> Vec<SparsePoly> {
    let mut e = vec![SparsePoly::zero(n); n + 1];
    e[0] = SparsePoly::one(n);
    for i in 0..n {
        let sq = SparsePoly::var(n, i).pow(2);
        for j in (1..=i + 1).rev() {
            e[j] = &e[j] + &(&e[j - 1] * &sq);
        }
    }
    e
}

/// Reynolds construction: for each degree, the first monomial in graded-lex
/// order (from `xₙᵈ` up) whose average is nonzero and independent of the
/// invariants already chosen. Invariants of degree above 2 are replaced by
/// their harmonic parts; each result is scaled to leading coefficient 1.
pub fn reynolds_basis(rs: &RootSystem, group: &[ScalarMatrix]) -> Result<Vec<SparsePoly>> {
    let n = rs.dim();
    let mut out: Vec<SparsePoly> = Vec::with_capacity(n);
    for &d in &rs.coxeter_type().degrees() {
        let mut found = None;
        for m in monomials_of_degree(n, d) {
            let mut avg = reynolds_average(&m.0, group)?;
            if d > 2 {
                avg = avg.harmonic_part()?;
            }
            if avg.is_zero() {
                continue;
            }
            let mut trial = out.clone();
            trial.push(avg.clone());
            if jacobian_rank_exact(&trial)? == trial.len() {
                let lead = avg.leading_term().expect("nonzero").1.clone();
                let inv = lead.inverse().expect("nonzero leading coefficient");
                found = Some(avg.scale(&inv));
                break;
            }
        }
        out.push(found.ok_or_else(|| {
            Error::Verification(format!(
                "no independent invariant of degree {d} for {}",
                rs.coxeter_type()
            ))
        })?);
    }
    Ok(out)
}

/// Largest rank of the Jacobian rows over two fixed rational points.
fn jacobian_rank_exact(polys: &[SparsePoly]) -> Result<usize> {
    const A: [(i64, i64); 6] = [(1, 1), (3, 7), (2, 11), (5, 17), (7, 23), (11, 29)];
    const B: [(i64, i64); 6] = [(2, 3), (-5, 13), (1, 19), (4, 31), (-3, 37), (6, 41)];
    let n = polys[0].nvars();
    let grads: Vec<Vec<SparsePoly>> = polys.iter().map(|p| p.gradient()).collect();
    let mut best = 0;
    for pts in [&A, &B] {
        let x: Vec<Scalar> = pts[..n].iter().map(|&(p, q)| Scalar::from_frac(p, q)).collect();
        let rows = grads
            .iter()
            .map(|g| g.iter().map(|gi| gi.eval_exact(&x)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        best = best.max(ScalarMatrix::from_rows(rows)?.rank());
        if best == polys.len() {
            break;
        }
    }
    Ok(best)
}

/// True iff every basis polynomial is fixed exactly by every matrix.
pub fn verify_invariance(basis: &InvariantBasis, generators: &[ScalarMatrix]) -> Result<bool> {
    for p in basis.polys() {
        for g in generators {
            if p.linear_substitute(g)? != *p {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Largest `|pᵢ(sx) − pᵢ(x)|` over unit points `x` and simple reflections
/// `s`, relative to the coefficient 1-norm of `pᵢ`.
pub fn verify_invariance_f64(
    basis: &InvariantBasis,
    rs: &RootSystem,
    samples: usize,
    seed: u64,
) -> f64 {
    let n = basis.dim();
    let num = basis.numeric();
    let scales: Vec<f64> = basis.polys().iter().map(|p| p.coeff_l1_norm()).collect();
    let gens = rs.simple_reflections();
    let mut rng = stream_rng(seed, crate::rng::stream_id("invariance", 0));
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let mut x = gaussian_vec(&mut rng, n);
        let nx = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        x.iter_mut().for_each(|v| *v /= nx);
        let px = num.eval(&x, n);
        for g in &gens {
            let y: Vec<f64> = (0..n)
                .map(|i| (0..n).map(|j| g[(i, j)] * x[j]).sum())
                .collect();
            let py = num.eval(&y, n);
            for i in 0..n {
                worst = worst.max((py[i] - px[i]).abs() / scales[i]);
            }
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariants::chevalley_eval;

    #[test]
    fn g2_closed_form() {
        let b = basic_invariants_with(CoxeterType::I2(6), &BuildOptions::default()).unwrap();
        assert_eq!(b.poly(1).to_string(), "x1^6 - 15*x1^4*x2^2 + 15*x1^2*x2^4 - x2^6");
    }

    #[test]
    fn b2_closed_form_and_eval() {
        let b = basic_invariants_with(CoxeterType::B(2), &BuildOptions::default()).unwrap();
        assert_eq!(b.poly(0).to_string(), "x1^2 + x2^2");
        assert_eq!(b.poly(1).to_string(), "x1^2*x2^2");
        assert_eq!(chevalley_eval(&b, &[1.0, 1.0], 2).unwrap(), vec![2.0, 1.0]);
        assert_eq!(chevalley_eval(&b, &[0.0, 0.0], 2).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn d4_orderings_differ_only_in_tie() {
        let last = closed_form(CoxeterType::D(4), DOrdering::ProductLast).unwrap();
        let first = closed_form(CoxeterType::D(4), DOrdering::ProductFirst).unwrap();
        assert_eq!(last[1], first[2]);
        assert_eq!(last[2], first[1]);
        assert_eq!(last[2].to_string(), "x1*x2*x3*x4");
        let d5 = closed_form(CoxeterType::D(5), DOrdering::ProductLast).unwrap();
        let degs: Vec<u32> = d5.iter().map(|p| p.degree().unwrap()).collect();
        assert_eq!(degs, vec![2, 4, 5, 6, 8]);
    }

    #[test]
    fn h3_reynolds_basis_is_invariant() {
        let b = basic_invariants_with(CoxeterType::H3, &BuildOptions::default()).unwrap();
        assert_eq!(b.poly(0).to_string(), "x1^2 + x2^2 + x3^2");
        let rs = build_root_system(CoxeterType::H3).unwrap();
        let gens = rs.simple_reflections_exact().unwrap();
        assert!(verify_invariance(&b, &gens).unwrap());
        assert!(verify_invariance_f64(&b, &rs, 20, 1) < 1e-12);
    }

    #[test]
    fn perturbed_basis_is_not_invariant() {
        let b = basic_invariants_with(CoxeterType::B(2), &BuildOptions::default()).unwrap();
        let rs = build_root_system(CoxeterType::B(2)).unwrap();
        let gens = rs.simple_reflections_exact().unwrap();
        assert!(verify_invariance(&b, &gens).unwrap());
        let bump = SparsePoly::var(2, 0);
        let bad = InvariantBasis::unchecked(b.coxeter_type(), vec![b.poly(0).clone(), b.poly(1) + &bump]);
        assert!(!verify_invariance(&bad, &gens).unwrap());
    }
}
