//! Frobenius algebras from a potential: structure constants, the WDVV
//! residual, the algebra axioms and unit detection.

use num_traits::{One, Zero};

use crate::algebra::{solve, AlgebraError, ConstSymMatrix, Monomial, Poly, PolyTensor, Rational};

/// A potential `Φ` in `N` flat coordinates together with the covariant metric
/// `η_ij`. Third derivatives are computed once at construction.
#[derive(Clone, Debug)]
pub struct Potential {
    eta: ConstSymMatrix,
    phi: Poly,
    phi3: PolyTensor,
}

impl Potential {
    pub fn new(eta: ConstSymMatrix, phi: Poly) -> Result<Self, AlgebraError> {
        if phi.n_vars() != eta.dim() {
            return Err(AlgebraError::VarMismatch {
                left: eta.dim(),
                right: phi.n_vars(),
            });
        }
        let n = eta.dim();
        let phi3 = third_derivatives(&phi, n);
        Ok(Potential { eta, phi, phi3 })
    }

    /// `Φ = ½(u1)²u3 + ½u1(u2)² + f(u2, u3)` with antidiagonal `η`.
    pub fn with_deformation(f: &Poly) -> Result<Self, AlgebraError> {
        if f.n_vars() != 3 {
            return Err(AlgebraError::VarMismatch {
                left: 3,
                right: f.n_vars(),
            });
        }
        Self::new(ConstSymMatrix::antidiagonal(3), cubic_part() + f.clone())
    }

    pub fn n(&self) -> usize {
        self.eta.dim()
    }

    pub fn eta(&self) -> &ConstSymMatrix {
        &self.eta
    }

    pub fn phi(&self) -> &Poly {
        &self.phi
    }

    /// `Φ_ijk`.
    pub fn phi3(&self, i: usize, j: usize, k: usize) -> &Poly {
        self.phi3.get(&[i, j, k])
    }

    pub fn third_derivatives(&self) -> &PolyTensor {
        &self.phi3
    }

    /// `Φ` with its affine and quadratic part removed; two potentials with the
    /// same normalization have identical third derivatives.
    pub fn normalized_phi(&self) -> Poly {
        self.phi.strip_low_degree(2)
    }
}

/// `½(u1)²u3 + ½u1(u2)²`, the part of the three-dimensional potentials that
/// makes `e_1` the unit.
pub fn cubic_part() -> Poly {
    let u = |i| Poly::var(3, i);
    let half = crate::algebra::rat(1, 2);
    (&(&u(0) * &u(0)) * &u(2)).scale(&half) + (&(&u(1) * &u(1)) * &u(0)).scale(&half)
}

fn third_derivatives(phi: &Poly, n: usize) -> PolyTensor {
    let first: Vec<Poly> = (0..n).map(|i| phi.partial(i)).collect();
    let second: Vec<Vec<Poly>> = first
        .iter()
        .map(|d| (0..n).map(|j| d.partial(j)).collect())
        .collect();
    PolyTensor::from_fn(&[n, n, n], |idx| {
        let mut s = [idx[0], idx[1], idx[2]];
        s.sort_unstable();
        second[s[0]][s[1]].partial(s[2])
    })
}

/// `c^k_ij = η^{ks} Φ_sij`, indexed `[k, i, j]`.
pub fn structure_constants(p: &Potential) -> PolyTensor {
    let n = p.n();
    PolyTensor::from_fn(&[n, n, n], |idx| {
        let (k, i, j) = (idx[0], idx[1], idx[2]);
        let mut acc = Poly::zero(n);
        for s in 0..n {
            let e = p.eta.inv(k, s);
            if !e.is_zero() {
                acc += &p.phi3(s, i, j).scale(e);
            }
        }
        acc
    })
}

/// Entry `(i, j, m, n)` is `Σ_kl Φ_ijk η^{kl} Φ_lmn − Φ_imk η^{kl} Φ_ljn`.
pub fn wdvv_residual(p: &Potential) -> PolyTensor {
    let n = p.n();
    let c = structure_constants(p);
    let products = PolyTensor::from_fn(&[n, n, n, n], |idx| {
        let (i, j, m, q) = (idx[0], idx[1], idx[2], idx[3]);
        let mut acc = Poly::zero(n);
        for l in 0..n {
            let (a, b) = (c.get(&[l, i, j]), p.phi3(l, m, q));
            if !a.is_zero() && !b.is_zero() {
                acc += &(a * b);
            }
        }
        acc
    });
    PolyTensor::from_fn(&[n, n, n, n], |idx| {
        let (i, j, m, q) = (idx[0], idx[1], idx[2], idx[3]);
        products.get(&[i, j, m, q]) - products.get(&[i, m, j, q])
    })
}

/// Outcome of checking the algebra axioms on a potential.
#[derive(Clone, Debug)]
pub struct FrobeniusReport {
    /// `η_sk c^s_ij = Φ_ijk`, so the form is invariant.
    pub invariance: bool,
    /// `c^k_ij = c^k_ji`.
    pub commutativity: bool,
    /// `∂_l A_ijk` totally symmetric.
    pub potentiality: bool,
    /// Associativity, i.e. the WDVV residual vanishes.
    pub associativity: bool,
    pub wdvv: PolyTensor,
}

impl FrobeniusReport {
    pub fn passes(&self) -> bool {
        self.invariance && self.commutativity && self.potentiality && self.associativity
    }
}

pub fn verify_frobenius_conditions(p: &Potential) -> FrobeniusReport {
    let n = p.n();
    let c = structure_constants(p);
    let mut invariance = true;
    let mut commutativity = true;
    let mut potentiality = true;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut lowered = Poly::zero(n);
                for s in 0..n {
                    lowered += &c.get(&[s, i, j]).scale(p.eta.get(s, k));
                }
                invariance &= &lowered == p.phi3(i, j, k);
                commutativity &= c.get(&[k, i, j]) == c.get(&[k, j, i]);
                for l in 0..n {
                    let base = p.phi3(i, j, k).partial(l);
                    potentiality &= base == p.phi3(l, j, k).partial(i)
                        && base == p.phi3(i, l, k).partial(j)
                        && base == p.phi3(i, j, l).partial(k);
                }
            }
        }
    }
    let wdvv = wdvv_residual(p);
    FrobeniusReport {
        invariance,
        commutativity,
        potentiality,
        associativity: wdvv.is_zero(),
        wdvv,
    }
}

/// Constant vector `e` with `c^k_ij e^i = δ^k_j` identically in `u`, or
/// `None` when no constant unit exists.
pub fn find_unit(p: &Potential) -> Option<Vec<Rational>> {
    let n = p.n();
    let c = structure_constants(p);
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    let one = Monomial::one(n);
    for k in 0..n {
        for j in 0..n {
            let mut monomials: Vec<&Monomial> = (0..n)
                .flat_map(|i| c.get(&[k, i, j]).terms().map(|(m, _)| m))
                .collect();
            monomials.push(&one);
            monomials.sort();
            monomials.dedup();
            for m in monomials {
                rows.push(
                    (0..n)
                        .map(|i| c.get(&[k, i, j]).coefficient(m.exponents()))
                        .collect::<Vec<_>>(),
                );
                rhs.push(if k == j && m == &one {
                    Rational::one()
                } else {
                    Rational::zero()
                });
            }
        }
    }
    solve(&rows, &rhs)
}

/// Third derivatives `(f_222, f_223, f_233)` of a deformation `f(u2, u3)`,
/// usually written `a, b, c`.
pub fn dubrovin_abc(f: &Poly) -> (Poly, Poly, Poly) {
    let f22 = f.partial(1).partial(1);
    let f23 = f.partial(1).partial(2);
    (f22.partial(1), f22.partial(2), f23.partial(2))
}

/// `f_333 − f_223² + f_222 f_233`; zero exactly when the three-dimensional
/// potential built from `f` satisfies WDVV.
pub fn dubrovin_residual(f: &Poly) -> Poly {
    let (a, b, c) = dubrovin_abc(f);
    let f333 = f.partial(2).partial(2).partial(2);
    &(&f333 - &(&b * &b)) + &(&a * &c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::int;
    use crate::exprlang::parse_polynomial;

    fn sol1() -> Potential {
        let f = parse_polynomial("1/4*u2^2*u3^2 + 1/60*u3^5", 3).unwrap();
        Potential::with_deformation(&f).unwrap()
    }

    #[test]
    fn unit_is_first_basis_vector() {
        let p = Potential::with_deformation(&Poly::zero(3)).unwrap();
        let c = structure_constants(&p);
        for j in 0..3 {
            for k in 0..3 {
                let expect = if j == k { Poly::one(3) } else { Poly::zero(3) };
                assert_eq!(c.get(&[k, 0, j]), &expect);
            }
        }
        assert_eq!(find_unit(&sol1()).unwrap(), vec![int(1), int(0), int(0)]);
    }

    #[test]
    fn structure_constant_of_sol1() {
        assert_eq!(structure_constants(&sol1()).get(&[2, 1, 1]), &Poly::one(3));
    }

    #[test]
    fn quadratic_potential_is_trivial() {
        let phi = parse_polynomial("u1^2 + 3*u2*u3 - u1", 3).unwrap();
        let p = Potential::new(ConstSymMatrix::antidiagonal(3), phi).unwrap();
        assert!(structure_constants(&p).is_zero());
        assert!(wdvv_residual(&p).is_zero());
        assert!(find_unit(&p).is_none());
    }

    #[test]
    fn wdvv_detects_perturbation() {
        assert!(wdvv_residual(&sol1()).is_zero());
        let f = parse_polynomial("1/4*u2^2*u3^2 + 1/30*u3^5", 3).unwrap();
        let p = Potential::with_deformation(&f).unwrap();
        assert!(!wdvv_residual(&p).is_zero());
        assert!(!dubrovin_residual(&f).is_zero());
    }

    #[test]
    fn one_dimensional_units() {
        // Φ_111 = 1, so the algebra is the field itself with unit 1.
        let phi = parse_polynomial("1/6*u1^3", 1).unwrap();
        let p = Potential::new(ConstSymMatrix::identity(1), phi).unwrap();
        assert_eq!(find_unit(&p).unwrap(), vec![int(1)]);
        // Φ_111 = u1 has no constant inverse.
        let phi = parse_polynomial("1/24*u1^4", 1).unwrap();
        let p = Potential::new(ConstSymMatrix::identity(1), phi).unwrap();
        assert!(find_unit(&p).is_none());
    }
}
