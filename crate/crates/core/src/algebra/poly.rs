use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use super::{AlgebraError, PolyMatrix, Rational};

/// Exponent vector of a monomial, ordered graded-lexicographically: first by
/// total degree, then lexicographically with `u1` most significant.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn one(n_vars: usize) -> Self {
        Monomial(vec![0; n_vars])
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
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

/// Sparse multivariate polynomial over the rationals in `u1..uN`.
///
/// Terms are kept in a map keyed by [`Monomial`]; zero coefficients are never
/// stored, so structural equality is mathematical equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    n_vars: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero(n_vars: usize) -> Self {
        Poly {
            n_vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(n_vars: usize) -> Self {
        Self::constant(n_vars, Rational::one())
    }

    pub fn constant(n_vars: usize, value: Rational) -> Self {
        Self::monomial(n_vars, value, Monomial::one(n_vars))
    }

    /// The coordinate function of variable `index` (0-based).
    pub fn var(n_vars: usize, index: usize) -> Self {
        assert!(index < n_vars, "variable {index} out of range");
        let mut e = vec![0; n_vars];
        e[index] = 1;
        Self::monomial(n_vars, Rational::one(), Monomial(e))
    }

    pub fn monomial(n_vars: usize, coeff: Rational, monomial: Monomial) -> Self {
        assert_eq!(monomial.0.len(), n_vars);
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(monomial, coeff);
        }
        Poly { n_vars, terms }
    }

    /// Builds a polynomial from `(coefficient, exponents)` pairs, combining
    /// repeated monomials.
    pub fn from_terms<I>(n_vars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Rational, Vec<u32>)>,
    {
        let mut p = Poly::zero(n_vars);
        for (c, e) in terms {
            assert_eq!(e.len(), n_vars);
            p.add_term(Monomial(e), c);
        }
        p
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn nterms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending graded-lexicographic order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, exponents: &[u32]) -> Rational {
        self.terms
            .get(&Monomial(exponents.to_vec()))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(Monomial::degree)
    }

    pub fn is_constant(&self) -> bool {
        self.total_degree().unwrap_or(0) == 0
    }

    /// Value at the origin.
    pub fn constant_term(&self) -> Rational {
        self.terms
            .get(&Monomial::one(self.n_vars))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    fn check_vars(&self, other: &Poly) -> Result<(), AlgebraError> {
        if self.n_vars != other.n_vars {
            return Err(AlgebraError::VarMismatch {
                left: self.n_vars,
                right: other.n_vars,
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Poly) -> Result<Poly, AlgebraError> {
        self.check_vars(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Poly) -> Result<Poly, AlgebraError> {
        self.check_vars(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Poly) -> Result<Poly, AlgebraError> {
        self.check_vars(other)?;
        let mut acc: BTreeMap<Monomial, Rational> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = ma.mul(mb);
                let c = ca * cb;
                match acc.get_mut(&m) {
                    Some(v) => *v += c,
                    None => {
                        acc.insert(m, c);
                    }
                }
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Ok(Poly {
            n_vars: self.n_vars,
            terms: acc,
        })
    }

    pub fn scale(&self, factor: &Rational) -> Poly {
        if factor.is_zero() {
            return Poly::zero(self.n_vars);
        }
        Poly {
            n_vars: self.n_vars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c * factor))
                .collect(),
        }
    }

    pub fn pow(&self, exponent: u32) -> Poly {
        let mut result = Poly::one(self.n_vars);
        let mut base = self.clone();
        let mut e = exponent;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Formal partial derivative with respect to variable `var` (0-based).
    pub fn try_partial(&self, var: usize) -> Result<Poly, AlgebraError> {
        if var >= self.n_vars {
            return Err(AlgebraError::IndexOutOfRange {
                index: var,
                n_vars: self.n_vars,
            });
        }
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.0[var];
            if e == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            exps[var] -= 1;
            terms.insert(Monomial(exps), c * Rational::from_integer(BigInt::from(e)));
        }
        Ok(Poly {
            n_vars: self.n_vars,
            terms,
        })
    }

    /// Panicking form of [`Poly::try_partial`] for internal index loops.
    pub fn partial(&self, var: usize) -> Poly {
        self.try_partial(var).expect("derivative index in range")
    }

    pub fn gradient(&self) -> Vec<Poly> {
        (0..self.n_vars).map(|i| self.partial(i)).collect()
    }

    /// Second-derivative matrix over the first `n` variables.
    pub fn hessian_in(&self, n: usize) -> PolyMatrix {
        let grad: Vec<Poly> = (0..n).map(|i| self.partial(i)).collect();
        PolyMatrix::from_fn(n, n, self.n_vars, |i, j| {
            if j < i {
                // filled from the upper triangle below
                Poly::zero(self.n_vars)
            } else {
                grad[i].partial(j)
            }
        })
        .symmetrized_from_upper()
    }

    pub fn hessian(&self) -> PolyMatrix {
        self.hessian_in(self.n_vars)
    }

    pub fn evaluate(&self, point: &[Rational]) -> Result<Rational, AlgebraError> {
        if point.len() != self.n_vars {
            return Err(AlgebraError::LengthMismatch {
                expected: self.n_vars,
                got: point.len(),
            });
        }
        let mut total = Rational::zero();
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for (x, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    v *= num_traits::pow(x.clone(), e as usize);
                }
            }
            total += v;
        }
        Ok(total)
    }

    /// Copy living in `n_vars` variables, the existing ones kept first.
    pub fn extend_vars(&self, n_vars: usize) -> Poly {
        assert!(n_vars >= self.n_vars);
        Poly {
            n_vars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let mut e = m.0.clone();
                    e.resize(n_vars, 0);
                    (Monomial(e), c.clone())
                })
                .collect(),
        }
    }

    /// Drops every term of total degree `<= max_degree`. Potentials are
    /// compared modulo quadratics, ψ-functions modulo affine terms.
    pub fn strip_low_degree(&self, max_degree: u32) -> Poly {
        Poly {
            n_vars: self.n_vars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() > max_degree)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// True if every term contains each of the listed variables.
    pub fn divisible_by_vars(&self, vars: &[usize]) -> bool {
        self.terms
            .keys()
            .all(|m| vars.iter().all(|&v| m.0[v] > 0))
    }

    pub fn to_float(&self) -> FloatPoly {
        FloatPoly {
            n_vars: self.n_vars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.0.clone(), c.to_f64().unwrap_or(f64::NAN)))
                .collect(),
        }
    }

    /// Homotopy step shared by the one-form integrator: adds
    /// `coeff / (deg + 1) * u^(m + e_var)` for each term.
    pub(crate) fn homotopy_add_into(&self, var: usize, out: &mut Poly) {
        for (m, c) in &self.terms {
            let d = m.degree();
            let mut e = m.0.clone();
            e[var] += 1;
            out.add_term(Monomial(e), c / Rational::from_integer(BigInt::from(d + 1)));
        }
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::exprlang::format_polynomial(self))
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly[{}]({})", self.n_vars, self)
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.checked_add(rhs).expect("n_vars mismatch in add")
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self.checked_sub(rhs).expect("n_vars mismatch in sub")
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.checked_mul(rhs).expect("n_vars mismatch in mul")
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(mut self, rhs: Poly) -> Poly {
        self += &rhs;
        self
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(mut self, rhs: Poly) -> Poly {
        self -= &rhs;
        self
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

impl AddAssign<&Poly> for Poly {
    fn add_assign(&mut self, rhs: &Poly) {
        assert_eq!(self.n_vars, rhs.n_vars, "n_vars mismatch in add");
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl SubAssign<&Poly> for Poly {
    fn sub_assign(&mut self, rhs: &Poly) {
        assert_eq!(self.n_vars, rhs.n_vars, "n_vars mismatch in sub");
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c.clone());
        }
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            n_vars: self.n_vars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

/// Double-precision evaluation copy of a [`Poly`].
#[derive(Clone, Debug)]
pub struct FloatPoly {
    n_vars: usize,
    terms: Vec<(Vec<u32>, f64)>,
}

impl FloatPoly {
    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, point: &[f64]) -> f64 {
        debug_assert_eq!(point.len(), self.n_vars);
        let mut total = 0.0;
        for (e, c) in &self.terms {
            let mut v = *c;
            for (x, &k) in point.iter().zip(e) {
                if k > 0 {
                    v *= x.powi(k as i32);
                }
            }
            total += v;
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{int, rat};

    fn u(n: usize, i: usize) -> Poly {
        Poly::var(n, i)
    }

    #[test]
    fn square_of_variable() {
        let x = u(3, 0);
        let sq = &x * &x;
        assert_eq!(sq.coefficient(&[2, 0, 0]), int(1));
        assert_eq!(sq.nterms(), 1);
    }

    #[test]
    fn expansion_of_h1_squared() {
        // (u1 u3 + 1/2 u2^2)^2 = u1^2 u3^2 + u1 u2^2 u3 + 1/4 u2^4
        let h = &(&u(3, 0) * &u(3, 2)) + &(&u(3, 1) * &u(3, 1)).scale(&rat(1, 2));
        let sq = h.pow(2);
        assert_eq!(sq.coefficient(&[2, 0, 2]), int(1));
        assert_eq!(sq.coefficient(&[0, 4, 0]), rat(1, 4));
        assert_eq!(sq.coefficient(&[1, 2, 1]), int(1));
        assert_eq!(sq.nterms(), 3);
    }

    #[test]
    fn additive_identity() {
        let p = &u(2, 0) + &Poly::constant(2, int(7));
        assert_eq!(&p + &Poly::zero(2), p);
    }

    #[test]
    fn mismatched_vars_rejected() {
        let err = u(2, 0).checked_add(&u(3, 0)).unwrap_err();
        assert_eq!(err, AlgebraError::VarMismatch { left: 2, right: 3 });
    }

    #[test]
    fn derivatives() {
        // d/du3 of 1/2 u1^2 u3
        let p = Poly::from_terms(3, [(rat(1, 2), vec![2, 0, 1])]);
        assert_eq!(p.partial(2), Poly::from_terms(3, [(rat(1, 2), vec![2, 0, 0])]));
        // f = 1/4 u2^2 u3^2 + 1/60 u3^5: f_333 = u3^2
        let f = Poly::from_terms(3, [(rat(1, 4), vec![0, 2, 2]), (rat(1, 60), vec![0, 0, 5])]);
        assert_eq!(f.partial(2).partial(2).partial(2), Poly::from_terms(3, [(int(1), vec![0, 0, 2])]));
        // polynomial in u2, u3 only
        assert!(f.partial(0).is_zero());
        assert!(f.try_partial(3).is_err());
    }

    #[test]
    fn evaluation() {
        let h = &(&u(3, 0) * &u(3, 2)) + &(&u(3, 1) * &u(3, 1)).scale(&rat(1, 2));
        assert_eq!(h.evaluate(&[int(1), int(2), int(3)]).unwrap(), int(5));
        let p = &h + &Poly::constant(3, rat(-2, 3));
        assert_eq!(p.evaluate(&[int(0), int(0), int(0)]).unwrap(), rat(-2, 3));
        assert_eq!(Poly::zero(3).evaluate(&[int(4), int(5), int(6)]).unwrap(), int(0));
        assert!(h.evaluate(&[int(1)]).is_err());
    }

    #[test]
    fn grlex_order() {
        let a = Monomial::new(vec![1, 0, 1]);
        let b = Monomial::new(vec![0, 2, 0]);
        let c = Monomial::new(vec![3, 0, 0]);
        assert!(a > b);
        assert!(c > a);
    }

    #[test]
    fn strip_and_divisibility() {
        let p = Poly::from_terms(2, [(int(1), vec![0, 0]), (int(2), vec![1, 0]), (int(3), vec![1, 1])]);
        assert_eq!(p.strip_low_degree(1), Poly::from_terms(2, [(int(3), vec![1, 1])]));
        assert!(p.strip_low_degree(1).divisible_by_vars(&[0, 1]));
        assert!(!p.divisible_by_vars(&[0]));
    }
}
