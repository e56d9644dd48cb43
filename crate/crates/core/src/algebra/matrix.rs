use std::fmt;

use num_traits::{One, ToPrimitive, Zero};

use super::linalg::{inertia, invert};
use super::{AlgebraError, Poly, Rational};

/// Sylvester inertia of a nondegenerate symmetric form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Signature {
    pub positive: usize,
    pub negative: usize,
}

impl Signature {
    pub fn sum(self, other: Signature) -> Signature {
        Signature {
            positive: self.positive + other.positive,
            negative: self.negative + other.negative,
        }
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.positive, self.negative)
    }
}

/// Constant, symmetric, invertible rational matrix with its exact inverse
/// cached. Used for η and μ in either index position.
#[derive(Clone, PartialEq, Eq)]
pub struct ConstSymMatrix {
    entries: Vec<Vec<Rational>>,
    inverse: Vec<Vec<Rational>>,
}

impl ConstSymMatrix {
    pub fn new(entries: Vec<Vec<Rational>>) -> Result<Self, AlgebraError> {
        let n = entries.len();
        if n == 0 {
            return Err(AlgebraError::Shape("empty matrix".into()));
        }
        for row in &entries {
            if row.len() != n {
                return Err(AlgebraError::Shape(format!(
                    "row of length {} in a {n}x{n} matrix",
                    row.len()
                )));
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if entries[i][j] != entries[j][i] {
                    return Err(AlgebraError::NotSymmetric { row: i, col: j });
                }
            }
        }
        let inverse = invert(&entries).ok_or(AlgebraError::Singular)?;
        Ok(ConstSymMatrix { entries, inverse })
    }

    pub fn from_ints(rows: &[&[i64]]) -> Result<Self, AlgebraError> {
        Self::new(
            rows.iter()
                .map(|r| r.iter().map(|&v| super::int(v)).collect())
                .collect(),
        )
    }

    pub fn identity(n: usize) -> Self {
        let e: Vec<Vec<Rational>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { Rational::one() } else { Rational::zero() })
                    .collect()
            })
            .collect();
        ConstSymMatrix {
            entries: e.clone(),
            inverse: e,
        }
    }

    /// Ones on the antidiagonal; its own inverse.
    pub fn antidiagonal(n: usize) -> Self {
        let e: Vec<Vec<Rational>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i + j + 1 == n { Rational::one() } else { Rational::zero() })
                    .collect()
            })
            .collect();
        ConstSymMatrix {
            entries: e.clone(),
            inverse: e,
        }
    }

    pub fn diagonal(values: &[Rational]) -> Result<Self, AlgebraError> {
        let n = values.len();
        Self::new(
            (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| if i == j { values[i].clone() } else { Rational::zero() })
                        .collect()
                })
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i][j]
    }

    /// Entry of the inverse matrix.
    pub fn inv(&self, i: usize, j: usize) -> &Rational {
        &self.inverse[i][j]
    }

    pub fn entries(&self) -> &[Vec<Rational>] {
        &self.entries
    }

    /// The exact inverse, as a matrix in its own right.
    pub fn inverse(&self) -> ConstSymMatrix {
        ConstSymMatrix {
            entries: self.inverse.clone(),
            inverse: self.entries.clone(),
        }
    }

    pub fn scaled(&self, factor: &Rational) -> Result<ConstSymMatrix, AlgebraError> {
        if factor.is_zero() {
            return Err(AlgebraError::Singular);
        }
        let inv_factor = factor.recip();
        Ok(ConstSymMatrix {
            entries: scale_rows(&self.entries, factor),
            inverse: scale_rows(&self.inverse, &inv_factor),
        })
    }

    pub fn signature(&self) -> Signature {
        let (positive, negative, zero) = inertia(&self.entries);
        debug_assert_eq!(zero, 0);
        Signature { positive, negative }
    }

    /// Block-diagonal direct sum `diag(self, other)`.
    pub fn direct_sum(&self, other: &ConstSymMatrix) -> ConstSymMatrix {
        ConstSymMatrix {
            entries: block_diag(&self.entries, &other.entries),
            inverse: block_diag(&self.inverse, &other.inverse),
        }
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        to_f64(&self.entries)
    }

    pub fn inverse_f64(&self) -> Vec<Vec<f64>> {
        to_f64(&self.inverse)
    }

    /// `sum_ij a_ij u^i u^j / 2` in `n_vars` variables.
    pub fn half_quadratic_form(&self, n_vars: usize) -> Poly {
        let n = self.dim();
        let mut p = Poly::zero(n_vars);
        let half = super::rat(1, 2);
        for i in 0..n {
            for j in 0..n {
                if !self.entries[i][j].is_zero() {
                    let t = &Poly::var(n_vars, i) * &Poly::var(n_vars, j);
                    p += &t.scale(&(&self.entries[i][j] * &half));
                }
            }
        }
        p
    }
}

impl fmt::Debug for ConstSymMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .entries
            .iter()
            .map(|r| r.iter().map(ToString::to_string).collect::<Vec<_>>().join(", "))
            .collect();
        write!(f, "[[{}]]", rows.join("], ["))
    }
}

fn scale_rows(m: &[Vec<Rational>], f: &Rational) -> Vec<Vec<Rational>> {
    m.iter().map(|r| r.iter().map(|v| v * f).collect()).collect()
}

fn block_diag(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let (n, m) = (a.len(), b.len());
    let mut out = vec![vec![Rational::zero(); n + m]; n + m];
    for i in 0..n {
        out[i][..n].clone_from_slice(&a[i]);
    }
    for i in 0..m {
        out[n + i][n..].clone_from_slice(&b[i]);
    }
    out
}

fn to_f64(m: &[Vec<Rational>]) -> Vec<Vec<f64>> {
    m.iter()
        .map(|r| r.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect())
        .collect()
}

/// Dense matrix of polynomials sharing one variable count.
#[derive(Clone, PartialEq, Eq)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    n_vars: usize,
    data: Vec<Poly>,
}

impl PolyMatrix {
    pub fn zeros(rows: usize, cols: usize, n_vars: usize) -> Self {
        PolyMatrix {
            rows,
            cols,
            n_vars,
            data: vec![Poly::zero(n_vars); rows * cols],
        }
    }

    pub fn identity(n: usize, n_vars: usize) -> Self {
        Self::from_fn(n, n, n_vars, |i, j| {
            if i == j {
                Poly::one(n_vars)
            } else {
                Poly::zero(n_vars)
            }
        })
    }

    pub fn from_fn(rows: usize, cols: usize, n_vars: usize, mut f: impl FnMut(usize, usize) -> Poly) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let p = f(i, j);
                assert_eq!(p.n_vars(), n_vars, "entry ({i}, {j}) has wrong n_vars");
                data.push(p);
            }
        }
        PolyMatrix {
            rows,
            cols,
            n_vars,
            data,
        }
    }

    pub fn from_rows(rows: Vec<Vec<Poly>>) -> Result<Self, AlgebraError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if r == 0 || c == 0 {
            return Err(AlgebraError::Shape("empty polynomial matrix".into()));
        }
        let n_vars = rows[0][0].n_vars();
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(AlgebraError::Shape("ragged polynomial matrix".into()));
            }
            for p in row {
                if p.n_vars() != n_vars {
                    return Err(AlgebraError::VarMismatch {
                        left: n_vars,
                        right: p.n_vars(),
                    });
                }
                data.push(p);
            }
        }
        Ok(PolyMatrix {
            rows: r,
            cols: c,
            n_vars,
            data,
        })
    }

    pub fn from_const(m: &[Vec<Rational>], n_vars: usize) -> Self {
        let rows = m.len();
        let cols = m.first().map_or(0, Vec::len);
        Self::from_fn(rows, cols, n_vars, |i, j| Poly::constant(n_vars, m[i][j].clone()))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn get(&self, i: usize, j: usize) -> &Poly {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: Poly) {
        assert_eq!(p.n_vars(), self.n_vars);
        self.data[i * self.cols + j] = p;
    }

    pub fn entries(&self) -> &[Poly] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Poly] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Poly>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub(crate) fn symmetrized_from_upper(mut self) -> Self {
        for i in 0..self.rows {
            for j in 0..i {
                let p = self.get(j, i).clone();
                self.set(i, j, p);
            }
        }
        self
    }

    pub fn transpose(&self) -> PolyMatrix {
        Self::from_fn(self.cols, self.rows, self.n_vars, |i, j| self.get(j, i).clone())
    }

    pub fn checked_mul(&self, other: &PolyMatrix) -> Result<PolyMatrix, AlgebraError> {
        if self.cols != other.rows {
            return Err(AlgebraError::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        if self.n_vars != other.n_vars {
            return Err(AlgebraError::VarMismatch {
                left: self.n_vars,
                right: other.n_vars,
            });
        }
        Ok(Self::from_fn(self.rows, other.cols, self.n_vars, |i, j| {
            let mut acc = Poly::zero(self.n_vars);
            for k in 0..self.cols {
                let (a, b) = (self.get(i, k), other.get(k, j));
                if !a.is_zero() && !b.is_zero() {
                    acc += &(a * b);
                }
            }
            acc
        }))
    }

    pub fn mul(&self, other: &PolyMatrix) -> PolyMatrix {
        self.checked_mul(other).expect("matrix shapes agree")
    }

    /// `c · self` for a constant rational matrix `c` on the left.
    pub fn const_left_mul(&self, c: &[Vec<Rational>]) -> PolyMatrix {
        assert_eq!(c.first().map_or(0, Vec::len), self.rows);
        Self::from_fn(c.len(), self.cols, self.n_vars, |i, j| {
            let mut acc = Poly::zero(self.n_vars);
            for (k, ck) in c[i].iter().enumerate() {
                if !ck.is_zero() {
                    acc += &self.get(k, j).scale(ck);
                }
            }
            acc
        })
    }

    pub fn add(&self, other: &PolyMatrix) -> PolyMatrix {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &PolyMatrix) -> PolyMatrix {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &PolyMatrix, f: impl Fn(&Poly, &Poly) -> Poly) -> PolyMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        PolyMatrix {
            rows: self.rows,
            cols: self.cols,
            n_vars: self.n_vars,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn scale(&self, factor: &Rational) -> PolyMatrix {
        self.map(|p| p.scale(factor))
    }

    pub fn map(&self, f: impl Fn(&Poly) -> Poly) -> PolyMatrix {
        let data: Vec<Poly> = self.data.iter().map(f).collect();
        let n_vars = data.first().map_or(self.n_vars, Poly::n_vars);
        PolyMatrix {
            rows: self.rows,
            cols: self.cols,
            n_vars,
            data,
        }
    }

    /// `self·other − other·self`.
    pub fn commutator(&self, other: &PolyMatrix) -> PolyMatrix {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn partial(&self, var: usize) -> PolyMatrix {
        self.map(|p| p.partial(var))
    }

    pub fn extend_vars(&self, n_vars: usize) -> PolyMatrix {
        self.map(|p| p.extend_vars(n_vars))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Poly::is_zero)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }
}

impl fmt::Debug for PolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "PolyMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{int, rat};

    #[test]
    fn inverse_examples() {
        let a = ConstSymMatrix::antidiagonal(3);
        assert_eq!(a.inverse(), a);
        let i = ConstSymMatrix::identity(4);
        assert_eq!(i.inverse(), i);
        let m = ConstSymMatrix::from_ints(&[&[2, 1], &[1, 1]]).unwrap();
        let expect = ConstSymMatrix::from_ints(&[&[1, -1], &[-1, 2]]).unwrap();
        assert_eq!(m.inverse().entries(), expect.entries());
    }

    #[test]
    fn rejects_singular_and_asymmetric() {
        assert_eq!(
            ConstSymMatrix::from_ints(&[&[1, 1], &[1, 1]]).unwrap_err(),
            AlgebraError::Singular
        );
        assert_eq!(
            ConstSymMatrix::from_ints(&[&[1, 2], &[0, 1]]).unwrap_err(),
            AlgebraError::NotSymmetric { row: 0, col: 1 }
        );
    }

    #[test]
    fn signatures() {
        assert_eq!(
            ConstSymMatrix::identity(5).signature(),
            Signature { positive: 5, negative: 0 }
        );
        let d = ConstSymMatrix::diagonal(&[int(1), int(-1)]).unwrap();
        assert_eq!(d.signature(), Signature { positive: 1, negative: 1 });
        assert_eq!(
            ConstSymMatrix::antidiagonal(3).signature(),
            Signature { positive: 2, negative: 1 }
        );
    }

    #[test]
    fn scaled_keeps_inverse_exact() {
        let a = ConstSymMatrix::antidiagonal(3).scaled(&rat(-1, 2)).unwrap();
        let check = ConstSymMatrix::new(a.entries().to_vec()).unwrap();
        assert_eq!(check.inverse().entries(), a.inverse().entries());
    }

    #[test]
    fn commutator_of_commuting_matrices() {
        let x = Poly::var(2, 0);
        let a = PolyMatrix::from_rows(vec![
            vec![x.clone(), Poly::zero(2)],
            vec![Poly::zero(2), x.clone()],
        ])
        .unwrap();
        let b = PolyMatrix::from_rows(vec![
            vec![Poly::one(2), Poly::var(2, 1)],
            vec![Poly::zero(2), Poly::one(2)],
        ])
        .unwrap();
        assert!(a.commutator(&b).is_zero());
        assert!(!b.commutator(&b.transpose()).is_zero());
    }
}
