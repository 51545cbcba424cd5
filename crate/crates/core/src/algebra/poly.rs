//! Sparse multivariate polynomials over ℚ(√5).

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::matrix::ScalarMatrix;
use super::scalar::{format_rational, parse_rational, Scalar};
use crate::error::{Error, Result};

/// Exponent vector ordered graded-lexicographically: total degree first,
/// then lexicographic with `x₁` most significant.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All exponent vectors of total degree `d` in `nvars` variables, in
/// ascending graded-lex order.
pub fn monomials_of_degree(nvars: usize, d: u32) -> Vec<Monomial> {
    fn rec(nvars: usize, left: u32, prefix: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if prefix.len() + 1 == nvars {
            prefix.push(left);
            out.push(Monomial(prefix.clone()));
            prefix.pop();
            return;
        }
        for e in 0..=left {
            prefix.push(e);
            rec(nvars, left - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if nvars == 0 {
        if d == 0 {
            out.push(Monomial(vec![]));
        }
        return out;
    }
    rec(nvars, d, &mut Vec::with_capacity(nvars), &mut out);
    out.sort();
    out
}

/// A polynomial in `nvars` variables with no zero coefficients stored.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SparsePoly {
    nvars: usize,
    terms: BTreeMap<Monomial, Scalar>,
}

impl SparsePoly {
    pub fn zero(nvars: usize) -> Self {
        SparsePoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Scalar) -> Self {
        Self::term(Monomial::one(nvars), c)
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Scalar::one())
    }

    /// The coordinate function `xᵢ` (zero-based index).
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::term(Monomial(e), Scalar::one())
    }

    pub fn term(m: Monomial, c: Scalar) -> Self {
        let nvars = m.0.len();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        SparsePoly { nvars, terms }
    }

    /// The linear form `Σ cᵢ xᵢ`.
    pub fn linear(coeffs: &[Scalar]) -> Self {
        let n = coeffs.len();
        let mut p = SparsePoly::zero(n);
        for (i, c) in coeffs.iter().enumerate() {
            if !c.is_zero() {
                let mut e = vec![0; n];
                e[i] = 1;
                p.terms.insert(Monomial(e), c.clone());
            }
        }
        p
    }

    /// Builds from arbitrary `(exponents, coefficient)` pairs, merging
    /// repeated exponents and dropping zeros.
    pub fn from_terms(
        nvars: usize,
        terms: impl IntoIterator<Item = (Vec<u32>, Scalar)>,
    ) -> Result<Self> {
        let mut p = SparsePoly::zero(nvars);
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(Error::Usage(format!(
                    "exponent vector of length {} in a polynomial of {nvars} variables",
                    e.len()
                )));
            }
            p.add_term(Monomial(e), &c);
        }
        Ok(p)
    }

    fn add_term(&mut self, m: Monomial, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical (descending graded-lex) order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter().rev()
    }

    pub fn coeff(&self, e: &[u32]) -> Scalar {
        self.terms
            .get(&Monomial(e.to_vec()))
            .cloned()
            .unwrap_or_default()
    }

    /// Greatest term in graded-lex order.
    pub fn leading_term(&self) -> Option<(&Monomial, &Scalar)> {
        self.terms.iter().next_back()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.leading_term().map(|(m, _)| m.degree())
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(Monomial::degree);
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    /// True iff every coefficient lies in ℚ.
    pub fn is_rational(&self) -> bool {
        self.terms.values().all(Scalar::is_rational)
    }

    fn check_same(&self, other: &SparsePoly) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::Usage(format!(
                "polynomials in {} and {} variables",
                self.nvars, other.nvars
            )));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &SparsePoly) -> Result<SparsePoly> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &SparsePoly) -> Result<SparsePoly> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), &-c);
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &SparsePoly) -> Result<SparsePoly> {
        self.check_same(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(SparsePoly::zero(self.nvars));
        }
        let mut acc: HashMap<Monomial, Scalar> =
            HashMap::with_capacity(self.len() * other.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let prod = ca * cb;
                acc.entry(ma.mul(mb))
                    .and_modify(|c| *c += &prod)
                    .or_insert(prod);
            }
        }
        Ok(SparsePoly {
            nvars: self.nvars,
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        })
    }

    pub fn scale(&self, c: &Scalar) -> SparsePoly {
        if c.is_zero() {
            return SparsePoly::zero(self.nvars);
        }
        SparsePoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> SparsePoly {
        let mut acc = SparsePoly::one(self.nvars);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Partial derivative with respect to `xᵢ` (zero-based).
    pub fn diff(&self, i: usize) -> Result<SparsePoly> {
        if i >= self.nvars {
            return Err(Error::Usage(format!(
                "variable index {i} out of range for {} variables",
                self.nvars
            )));
        }
        let mut out = SparsePoly::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2.0[i] -= 1;
            out.terms.insert(m2, c * &Scalar::from_int(e as i64));
        }
        Ok(out)
    }

    pub fn gradient(&self) -> Vec<SparsePoly> {
        (0..self.nvars)
            .map(|i| self.diff(i).expect("index in range"))
            .collect()
    }

    /// `Δp = Σᵢ ∂²p/∂xᵢ²`.
    pub fn laplacian(&self) -> SparsePoly {
        let mut out = SparsePoly::zero(self.nvars);
        for (m, c) in &self.terms {
            for (i, &e) in m.0.iter().enumerate() {
                if e >= 2 {
                    let mut mm = m.clone();
                    mm.0[i] -= 2;
                    out.add_term(mm, &(c * &Scalar::from_int((e * (e - 1)) as i64)));
                }
            }
        }
        out
    }

    /// Harmonic part of a homogeneous polynomial of degree `d`:
    /// `Σⱼ (−1)ʲ |x|²ʲ Δʲp / (2ʲ j! ∏ᵢ₌₁ʲ (n + 2d − 2i − 2))`.
    ///
    /// It differs from `p` by a multiple of `|x|²` and is fixed by every
    /// orthogonal substitution that fixes `p`.
    pub fn harmonic_part(&self) -> Result<SparsePoly> {
        let Some(d) = self.degree() else {
            return Ok(self.clone());
        };
        if !self.is_homogeneous() {
            return Err(Error::Usage("harmonic part of a non-homogeneous polynomial".into()));
        }
        let n = self.nvars as i64;
        let r2 = (0..self.nvars).fold(SparsePoly::zero(self.nvars), |acc, i| {
            &acc + &SparsePoly::var(self.nvars, i).pow(2)
        });
        let mut out = self.clone();
        let mut lap = self.clone();
        let mut r2j = SparsePoly::one(self.nvars);
        let mut denom = Scalar::one();
        for j in 1..=(d / 2) as i64 {
            lap = lap.laplacian();
            if lap.is_zero() {
                break;
            }
            r2j = &r2j * &r2;
            denom = &denom * &Scalar::from_int(2 * j * (n + 2 * d as i64 - 2 * j - 2));
            let sign = if j % 2 == 0 { 1 } else { -1 };
            let coeff = &Scalar::from_int(sign) / &denom;
            out = &out + &(&r2j * &lap).scale(&coeff);
        }
        Ok(out)
    }

    pub fn eval_exact(&self, x: &[Scalar]) -> Result<Scalar> {
        self.check_len(x.len())?;
        let maxdeg = self.max_var_degrees();
        let powers: Vec<Vec<Scalar>> = x
            .iter()
            .zip(&maxdeg)
            .map(|(xi, &d)| {
                let mut v = Vec::with_capacity(d as usize + 1);
                v.push(Scalar::one());
                for k in 1..=d as usize {
                    let next = &v[k - 1] * xi;
                    v.push(next);
                }
                v
            })
            .collect();
        let mut acc = Scalar::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t = &t * &powers[i][e as usize];
                }
            }
            acc += &t;
        }
        Ok(acc)
    }

    /// Floating-point evaluation as a plain sum of monomials.
    pub fn eval_f64(&self, x: &[f64]) -> Result<f64> {
        self.check_len(x.len())?;
        Ok(self.to_float().eval(x))
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.nvars {
            return Err(Error::Usage(format!(
                "point of dimension {len} for a polynomial in {} variables",
                self.nvars
            )));
        }
        Ok(())
    }

    fn max_var_degrees(&self) -> Vec<u32> {
        let mut d = vec![0; self.nvars];
        for m in self.terms.keys() {
            for (di, &e) in d.iter_mut().zip(&m.0) {
                *di = (*di).max(e);
            }
        }
        d
    }

    /// The composition `x ↦ p(Mx)`: each `xⱼ` is replaced by `Σₗ Mⱼₗ xₗ`.
    pub fn linear_substitute(&self, m: &ScalarMatrix) -> Result<SparsePoly> {
        if m.rows() != self.nvars || m.cols() != self.nvars {
            return Err(Error::Usage(format!(
                "substitution matrix {}x{} for a polynomial in {} variables",
                m.rows(),
                m.cols(),
                self.nvars
            )));
        }
        let forms: Vec<SparsePoly> = (0..self.nvars)
            .map(|j| SparsePoly::linear(m.row(j)))
            .collect();
        Ok(self.compose_linear(&forms))
    }

    /// Substitutes `xⱼ ← forms[j]`; all forms must share this polynomial's
    /// variable count.
    pub(crate) fn compose_linear(&self, forms: &[SparsePoly]) -> SparsePoly {
        let mut cache: HashMap<(usize, u32), SparsePoly> = HashMap::new();
        let mut out = SparsePoly::zero(self.nvars);
        for (m, c) in &self.terms {
            let mut t = SparsePoly::constant(self.nvars, c.clone());
            for (j, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let pw = cache
                    .entry((j, e))
                    .or_insert_with(|| forms[j].pow(e))
                    .clone();
                t = &t * &pw;
            }
            for (mm, cc) in t.terms {
                out.add_term(mm, &cc);
            }
        }
        out
    }

    pub fn to_float(&self) -> FloatPoly {
        FloatPoly::new(
            self.nvars,
            self.terms
                .iter()
                .map(|(m, c)| (m.0.clone(), c.to_f64()))
                .collect(),
        )
    }

    /// Sum of absolute coefficient values, evaluated in floating point.
    pub fn coeff_l1_norm(&self) -> f64 {
        self.terms.values().map(|c| c.to_f64().abs()).sum()
    }
}

/// Applies a binary operation after checking variable counts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolyOp {
    Add,
    Sub,
    Mul,
}

pub fn poly_arith(p: &SparsePoly, q: &SparsePoly, op: PolyOp) -> Result<SparsePoly> {
    match op {
        PolyOp::Add => p.checked_add(q),
        PolyOp::Sub => p.checked_sub(q),
        PolyOp::Mul => p.checked_mul(q),
    }
}

macro_rules! poly_binop {
    ($tr:ident, $m:ident, $checked:ident) => {
        /// Panics if the operands have different variable counts; use the
        /// `checked_*` method when that is not guaranteed.
        impl<'a> std::ops::$tr<&'a SparsePoly> for &'a SparsePoly {
            type Output = SparsePoly;
            fn $m(self, rhs: &SparsePoly) -> SparsePoly {
                self.$checked(rhs).expect("mismatched variable counts")
            }
        }
    };
}
poly_binop!(Add, add, checked_add);
poly_binop!(Sub, sub, checked_sub);
poly_binop!(Mul, mul, checked_mul);

impl std::ops::Neg for &SparsePoly {
    type Output = SparsePoly;
    fn neg(self) -> SparsePoly {
        self.scale(&Scalar::from_int(-1))
    }
}

impl fmt::Debug for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (idx, (m, c)) in self.terms().enumerate() {
            let negative = c.is_rational() && c.signum() < 0;
            let c = if negative { -c } else { c.clone() };
            match (idx, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let vars: Vec<String> = m
                .0
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| match e {
                    1 => format!("x{}", i + 1),
                    _ => format!("x{}^{e}", i + 1),
                })
                .collect();
            if vars.is_empty() {
                write!(f, "{c}")?;
            } else if c.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{c}*{}", vars.join("*"))?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct WireTerm {
    e: Vec<u32>,
    a: String,
    b: String,
}

#[derive(Serialize, Deserialize)]
struct WirePoly {
    nvars: usize,
    terms: Vec<WireTerm>,
}

impl Serialize for SparsePoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        WirePoly {
            nvars: self.nvars,
            terms: self
                .terms()
                .map(|(m, c)| WireTerm {
                    e: m.0.clone(),
                    a: format_rational(c.rational_part()),
                    b: format_rational(c.sqrt5_part()),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SparsePoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let w = WirePoly::deserialize(d)?;
        let mut terms = Vec::with_capacity(w.terms.len());
        for t in w.terms {
            let a = parse_rational(&t.a).map_err(D::Error::custom)?;
            let b = parse_rational(&t.b).map_err(D::Error::custom)?;
            terms.push((t.e, Scalar::new(a, b)));
        }
        SparsePoly::from_terms(w.nvars, terms).map_err(D::Error::custom)
    }
}

/// A polynomial with `f64` coefficients, evaluated as a sum of monomials
/// over a per-call table of variable powers.
#[derive(Clone, Debug)]
pub struct FloatPoly {
    nvars: usize,
    max_deg: Vec<u32>,
    terms: Vec<(Vec<u32>, f64)>,
}

impl FloatPoly {
    pub fn new(nvars: usize, terms: Vec<(Vec<u32>, f64)>) -> Self {
        let mut max_deg = vec![0; nvars];
        for (e, _) in &terms {
            for (d, &k) in max_deg.iter_mut().zip(e) {
                *d = (*d).max(k);
            }
        }
        FloatPoly {
            nvars,
            max_deg,
            terms,
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.nvars);
        let pw = power_table(x, &self.max_deg);
        self.eval_with(&pw)
    }

    pub(crate) fn eval_with(&self, pw: &[Vec<f64>]) -> f64 {
        let mut acc = 0.0;
        for (e, c) in &self.terms {
            let mut t = *c;
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t *= pw[i][k as usize];
                }
            }
            acc += t;
        }
        acc
    }

    pub fn diff(&self, i: usize) -> FloatPoly {
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| e[i] > 0)
            .map(|(e, c)| {
                let mut e2 = e.clone();
                e2[i] -= 1;
                (e2, c * e[i] as f64)
            })
            .collect();
        FloatPoly::new(self.nvars, terms)
    }

    /// Same monomials with absolute coefficients. Evaluated at `|x|` it
    /// bounds the magnitude of the summands, and so the rounding error.
    pub fn abs(&self) -> FloatPoly {
        let terms = self.terms.iter().map(|(e, c)| (e.clone(), c.abs())).collect();
        FloatPoly::new(self.nvars, terms)
    }

    pub(crate) fn max_degrees(&self) -> &[u32] {
        &self.max_deg
    }
}

pub(crate) fn power_table(x: &[f64], max_deg: &[u32]) -> Vec<Vec<f64>> {
    x.iter()
        .zip(max_deg)
        .map(|(&xi, &d)| {
            let mut v = Vec::with_capacity(d as usize + 1);
            v.push(1.0);
            for k in 1..=d as usize {
                v.push(v[k - 1] * xi);
            }
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(n: usize, i: usize) -> SparsePoly {
        SparsePoly::var(n, i)
    }

    #[test]
    fn harmonic_part_is_harmonic() {
        let p = x(3, 0).pow(4);
        let h = p.harmonic_part().unwrap();
        assert!(h.laplacian().is_zero());
        let q = x(2, 0).pow(2);
        assert_eq!(q.harmonic_part().unwrap().to_string(), "1/2*x1^2 - 1/2*x2^2");
    }

    #[test]
    fn difference_of_squares() {
        let (x1, x2) = (x(2, 0), x(2, 1));
        let p = &(&x1 + &x2) * &(&x1 - &x2);
        let expected = &(&x1 * &x1) - &(&x2 * &x2);
        assert_eq!(p, expected);
    }

    #[test]
    fn adding_zero_is_identity() {
        let p = &x(3, 0) * &x(3, 2);
        assert_eq!(&p + &SparsePoly::zero(3), p);
    }

    #[test]
    fn mismatched_nvars_is_usage_error() {
        let err = poly_arith(&x(2, 0), &x(3, 0), PolyOp::Mul).unwrap_err();
        assert!(matches!(err, Error::Usage(_)));
    }

    #[test]
    fn canonical_order_is_descending_grlex() {
        let p = SparsePoly::from_terms(
            2,
            vec![
                (vec![0, 1], Scalar::one()),
                (vec![2, 0], Scalar::one()),
                (vec![1, 1], Scalar::one()),
                (vec![0, 3], Scalar::one()),
            ],
        )
        .unwrap();
        let order: Vec<Vec<u32>> = p.terms().map(|(m, _)| m.0.clone()).collect();
        assert_eq!(order, vec![vec![0, 3], vec![2, 0], vec![1, 1], vec![0, 1]]);
    }

    #[test]
    fn derivative_examples() {
        let p = &(&x(2, 0) * &x(2, 0)) * &x(2, 1);
        assert_eq!(
            p.diff(0).unwrap(),
            (&x(2, 0) * &x(2, 1)).scale(&Scalar::from_int(2))
        );
        assert!(x(2, 0).pow(3).diff(1).unwrap().is_zero());
        assert!(matches!(p.diff(2), Err(Error::Usage(_))));
    }

    #[test]
    fn evaluation_examples() {
        let p = &x(2, 0).pow(2) + &x(2, 1).pow(2);
        assert_eq!(p.eval_f64(&[3.0, 4.0]).unwrap(), 25.0);
        assert_eq!(
            p.eval_exact(&[Scalar::from_int(3), Scalar::from_int(4)]).unwrap(),
            Scalar::from_int(25)
        );
        let c = &p + &SparsePoly::constant(2, Scalar::from_int(7));
        assert_eq!(c.eval_f64(&[0.0, 0.0]).unwrap(), 7.0);
        assert!(matches!(p.eval_f64(&[1.0]), Err(Error::Usage(_))));
        // φ² = (3 + √5)/2
        let sq = x(1, 0).pow(2).eval_exact(&[Scalar::phi()]).unwrap();
        let expected = &(&Scalar::from_int(3) + &Scalar::sqrt5()) / &Scalar::from_int(2);
        assert_eq!(sq, expected);
    }

    #[test]
    fn monomials_enumerated_in_order() {
        let ms = monomials_of_degree(3, 2);
        assert_eq!(ms.len(), 6);
        assert_eq!(ms[0].0, vec![0, 0, 2]);
        assert_eq!(ms[5].0, vec![2, 0, 0]);
        assert!(ms.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn json_shape() {
        let p = (&x(2, 0) + &SparsePoly::constant(2, Scalar::phi())).scale(&Scalar::from_frac(1, 3));
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(
            s,
            r#"{"nvars":2,"terms":[{"e":[1,0],"a":"1/3","b":"0/1"},{"e":[0,0],"a":"1/6","b":"1/6"}]}"#
        );
        let back: SparsePoly = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
    }
}
