//! Nonlocal Hamiltonian operators of hydrodynamic type
//!
//! ```text
//! P^ij = g^ij d/dx + b^ij_k u^k_x + Σ μ^mn (w_m)^i_k u^k_x (d/dx)^-1 (w_n)^j_s u^s_x
//! ```
//!
//! represented by their coefficients only. Affinors are stored as matrices
//! with the upper index as row: `w.get(i, j) = w^i_j`.

use num_traits::Zero;
use thiserror::Error;

use crate::algebra::{
    integrate_exact_two_form, AlgebraError, ConstSymMatrix, Poly, PolyMatrix, PolyTensor,
};
use crate::submanifold::PsiSystem;

/// Operator with constant metric and `b = 0`: contravariant `η^ij`, `μ^mn`
/// and the affinors `w_n`.
#[derive(Clone, Debug)]
pub struct FlatHamOp {
    eta: ConstSymMatrix,
    mu: ConstSymMatrix,
    affinors: Vec<PolyMatrix>,
}

impl FlatHamOp {
    /// `eta` and `mu` are contravariant here.
    pub fn new(eta: ConstSymMatrix, mu: ConstSymMatrix, affinors: Vec<PolyMatrix>) -> Result<Self, AlgebraError> {
        check_affinors(eta.dim(), mu.dim(), &affinors)?;
        Ok(FlatHamOp { eta, mu, affinors })
    }

    pub fn n(&self) -> usize {
        self.eta.dim()
    }

    pub fn eta(&self) -> &ConstSymMatrix {
        &self.eta
    }

    pub fn mu(&self) -> &ConstSymMatrix {
        &self.mu
    }

    pub fn affinors(&self) -> &[PolyMatrix] {
        &self.affinors
    }

    /// The same operator with `g = η` and `b = 0`.
    pub fn to_general(&self) -> GeneralHamOpData {
        let n = self.n();
        GeneralHamOpData {
            g: PolyMatrix::from_const(self.eta.entries(), n),
            b: PolyTensor::from_fn(&[n, n, n], |_| Poly::zero(n)),
            mu: self.mu.clone(),
            affinors: self.affinors.clone(),
        }
    }
}

fn check_affinors(n: usize, l: usize, affinors: &[PolyMatrix]) -> Result<(), AlgebraError> {
    if affinors.len() != l {
        return Err(AlgebraError::LengthMismatch {
            expected: l,
            got: affinors.len(),
        });
    }
    for w in affinors {
        if w.rows() != n || w.cols() != n {
            return Err(AlgebraError::Shape(format!(
                "affinor is {}x{}, expected {n}x{n}",
                w.rows(),
                w.cols()
            )));
        }
        if w.n_vars() != n {
            return Err(AlgebraError::VarMismatch {
                left: n,
                right: w.n_vars(),
            });
        }
    }
    Ok(())
}

/// Coefficients of a general operator: metric `g^ij(u)`, `b^ij_k(u)` indexed
/// `[i, j, k]`, contravariant `μ^mn` and affinors.
#[derive(Clone, Debug)]
pub struct GeneralHamOpData {
    g: PolyMatrix,
    b: PolyTensor,
    mu: ConstSymMatrix,
    affinors: Vec<PolyMatrix>,
}

impl GeneralHamOpData {
    pub fn new(
        g: PolyMatrix,
        b: PolyTensor,
        mu: ConstSymMatrix,
        affinors: Vec<PolyMatrix>,
    ) -> Result<Self, AlgebraError> {
        let n = g.rows();
        if g.cols() != n || g.n_vars() != n {
            return Err(AlgebraError::Shape(format!(
                "metric must be {n}x{n} in {n} variables"
            )));
        }
        if b.shape() != [n, n, n] || b.entries().iter().any(|p| p.n_vars() != n) {
            return Err(AlgebraError::Shape(format!("b must be {n}x{n}x{n}")));
        }
        check_affinors(n, mu.dim(), &affinors)?;
        Ok(GeneralHamOpData { g, b, mu, affinors })
    }

    pub fn n(&self) -> usize {
        self.g.rows()
    }
}

/// One of the Hamiltonian relations with its residual tensor.
#[derive(Clone, Debug)]
pub struct Relation {
    pub name: &'static str,
    pub residual: PolyTensor,
}

impl Relation {
    pub fn passes(&self) -> bool {
        self.residual.is_zero()
    }
}

/// The seven coefficient relations in order, followed by the two sides of the
/// curvature relation on their own (`metric-curvature`, the curvature of `g`,
/// and `affinor-curvature`). Index layouts:
///
/// | relation               | indices     |
/// |------------------------|-------------|
/// | `metric-symmetric`     | `[i,j]`     |
/// | `metric-compatible`    | `[i,j,k]`   |
/// | `torsion-free`         | `[i,j,k]`   |
/// | `affinor-self-adjoint` | `[n,i,j]`   |
/// | `affinors-commute`     | `[n,m,i,j]` |
/// | `affinor-codazzi`      | `[n,i,j,k]` |
/// | `curvature` and sides  | `[i,j,k,r]` |
pub fn check_relations(d: &GeneralHamOpData) -> Vec<Relation> {
    let n = d.n();
    let l = d.affinors.len();
    let g = |i: usize, j: usize| d.g.get(i, j);
    let b = |i: usize, j: usize, k: usize| d.b.get(&[i, j, k]);
    let w = &d.affinors;
    let zero = || Poly::zero(n);
    let sum = |range: usize, f: &dyn Fn(usize) -> Poly| {
        let mut acc = zero();
        for s in 0..range {
            acc += &f(s);
        }
        acc
    };

    let symmetric = PolyTensor::from_fn(&[n, n], |x| g(x[0], x[1]) - g(x[1], x[0]));
    let compatible = PolyTensor::from_fn(&[n, n, n], |x| {
        let (i, j, k) = (x[0], x[1], x[2]);
        &(&g(i, j).partial(k) - b(i, j, k)) - b(j, i, k)
    });
    let torsion = PolyTensor::from_fn(&[n, n, n], |x| {
        let (i, j, k) = (x[0], x[1], x[2]);
        sum(n, &|s| &(g(i, s) * b(j, k, s)) - &(g(j, s) * b(i, k, s)))
    });
    let self_adjoint = PolyTensor::from_fn(&[l, n, n], |x| {
        let (m, i, j) = (x[0], x[1], x[2]);
        sum(n, &|s| &(g(i, s) * w[m].get(j, s)) - &(g(j, s) * w[m].get(i, s)))
    });
    let products: Vec<Vec<PolyMatrix>> = (0..l)
        .map(|a| (0..l).map(|c| w[a].mul(&w[c])).collect())
        .collect();
    let commute = PolyTensor::from_fn(&[l, l, n, n], |x| {
        products[x[0]][x[1]].get(x[2], x[3]) - products[x[1]][x[0]].get(x[2], x[3])
    });
    // half_codazzi[m][i,j,k] = g^is g^jr ∂_s w^k_r − g^jr b^ik_s w^s_r
    let half_codazzi: Vec<PolyTensor> = w
        .iter()
        .map(|wm| {
            PolyTensor::from_fn(&[n, n, n], |x| {
                let (i, j, k) = (x[0], x[1], x[2]);
                sum(n, &|s| {
                    sum(n, &|r| {
                        let t1 = &(g(i, s) * g(j, r)) * &wm.get(k, r).partial(s);
                        let t2 = &(g(j, r) * b(i, k, s)) * wm.get(s, r);
                        &t1 - &t2
                    })
                })
            })
        })
        .collect();
    let codazzi = PolyTensor::from_fn(&[l, n, n, n], |x| {
        let h = &half_codazzi[x[0]];
        h.get(&[x[1], x[2], x[3]]) - h.get(&[x[2], x[1], x[3]])
    });
    let curv_lhs = PolyTensor::from_fn(&[n, n, n, n], |x| {
        let (i, j, k, r) = (x[0], x[1], x[2], x[3]);
        sum(n, &|s| {
            let curl = &b(j, k, s).partial(r) - &b(j, k, r).partial(s);
            let quad = &(b(i, j, s) * b(s, k, r)) - &(b(i, k, s) * b(s, j, r));
            &(g(i, s) * &curl) + &quad
        })
    });
    // raised[n] = Σ_m μ^mn w_m
    let raised: Vec<PolyMatrix> = (0..l)
        .map(|c| {
            let mut acc = PolyMatrix::zeros(n, n, n);
            for a in 0..l {
                let mu = d.mu.get(a, c);
                if !mu.is_zero() {
                    acc = acc.add(&w[a].scale(mu));
                }
            }
            acc
        })
        .collect();
    // t[j,r,k,s] = Σ_n raised_n^j_r w_n^k_s
    let t = PolyTensor::from_fn(&[n, n, n, n], |x| {
        sum(l, &|c| raised[c].get(x[0], x[1]) * w[c].get(x[2], x[3]))
    });
    let curv_rhs = PolyTensor::from_fn(&[n, n, n, n], |x| {
        let (i, j, k, r) = (x[0], x[1], x[2], x[3]);
        sum(n, &|s| g(i, s) * &(t.get(&[j, r, k, s]) - t.get(&[j, s, k, r])))
    });
    let curv = PolyTensor::from_fn(&[n, n, n, n], |x| curv_lhs.get(x) - curv_rhs.get(x));
    vec![
        Relation { name: "metric-symmetric", residual: symmetric },
        Relation { name: "metric-compatible", residual: compatible },
        Relation { name: "torsion-free", residual: torsion },
        Relation { name: "affinor-self-adjoint", residual: self_adjoint },
        Relation { name: "affinors-commute", residual: commute },
        Relation { name: "affinor-codazzi", residual: codazzi },
        Relation { name: "curvature", residual: curv },
        Relation { name: "metric-curvature", residual: curv_lhs },
        Relation { name: "affinor-curvature", residual: curv_rhs },
    ]
}

/// Whether the seven relations all hold.
pub fn is_hamiltonian(relations: &[Relation]) -> bool {
    relations
        .iter()
        .filter(|r| !r.name.ends_with("-curvature"))
        .all(Relation::passes)
}

/// `w_n = η^{-1} Hess(ψ_n)`, with `μ^mn` inverted from the system's `μ_mn`.
pub fn affinors_from_psi(s: &PsiSystem) -> FlatHamOp {
    FlatHamOp {
        eta: s.eta().inverse(),
        mu: s.mu().inverse(),
        affinors: s.mixed_forms(),
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NotExact {
    /// `∂_s (w_n)^k_r` is not symmetric in `(r, s)`.
    #[error("affinor {affinor} has non-symmetric derivatives at k={k}, r={r}, s={s}: {residual}")]
    Curl {
        affinor: usize,
        k: usize,
        r: usize,
        s: usize,
        residual: Poly,
    },
    /// `η_is (w_n)^s_j` is not symmetric.
    #[error("affinor {affinor} is not self-adjoint at i={i}, j={j}: {residual}")]
    Symmetry {
        affinor: usize,
        i: usize,
        j: usize,
        residual: Poly,
    },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Recovers `ψ_n` with `η^{-1} Hess(ψ_n) = w_n`, normalized to vanish with
/// its gradient at the origin.
pub fn psi_from_affinors(h: &FlatHamOp) -> Result<PsiSystem, NotExact> {
    let n = h.n();
    let eta_lower = h.eta.inverse();
    let mut psi = Vec::with_capacity(h.affinors.len());
    for (a, w) in h.affinors.iter().enumerate() {
        for k in 0..n {
            for r in 0..n {
                for s in r + 1..n {
                    let residual = &w.get(k, r).partial(s) - &w.get(k, s).partial(r);
                    if !residual.is_zero() {
                        return Err(NotExact::Curl {
                            affinor: a,
                            k,
                            r,
                            s,
                            residual,
                        });
                    }
                }
            }
        }
        let x = w.const_left_mul(eta_lower.entries());
        for i in 0..n {
            for j in i + 1..n {
                let residual = x.get(i, j) - x.get(j, i);
                if !residual.is_zero() {
                    return Err(NotExact::Symmetry {
                        affinor: a,
                        i,
                        j,
                        residual,
                    });
                }
            }
        }
        psi.push(integrate_exact_two_form(&x)?);
    }
    Ok(PsiSystem::new(eta_lower, h.mu.inverse(), psi)?)
}

/// Outcome of the flat-metric pencil criterion.
#[derive(Clone, Debug)]
pub struct PencilReport {
    pub relations: Vec<Relation>,
}

impl PencilReport {
    /// Every relation holds and both sides of the curvature relation vanish
    /// separately.
    pub fn passes(&self) -> bool {
        self.relations
            .iter()
            .filter(|r| r.name != "curvature")
            .all(Relation::passes)
    }
}

pub fn pencil_check(h: &FlatHamOp) -> PencilReport {
    PencilReport {
        relations: check_relations(&h.to_general()),
    }
}

/// The system `u^i_t = A^i_j(u) u^j_x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HydroFlow {
    pub a: PolyMatrix,
}

impl HydroFlow {
    pub fn new(a: PolyMatrix) -> Result<Self, AlgebraError> {
        if !a.is_square() || a.n_vars() != a.rows() {
            return Err(AlgebraError::Shape(format!(
                "flow matrix must be NxN in N variables, got {}x{} in {}",
                a.rows(),
                a.cols(),
                a.n_vars()
            )));
        }
        Ok(HydroFlow { a })
    }

    pub fn n(&self) -> usize {
        self.a.rows()
    }

    /// Velocity `A(u) u_x` as polynomials in the jet variables
    /// `(u, u_x, u_xx)`, `3N` in total.
    pub fn jet_velocity(&self) -> Vec<Poly> {
        let n = self.n();
        (0..n)
            .map(|i| {
                let mut acc = Poly::zero(3 * n);
                for j in 0..n {
                    let e = self.a.get(i, j);
                    if !e.is_zero() {
                        acc += &(&e.extend_vars(3 * n) * &Poly::var(3 * n, n + j));
                    }
                }
                acc
            })
            .collect()
    }
}

/// `u^i_t = (w_n)^i_j u^j_x` for each affinor.
pub fn structural_flows(h: &FlatHamOp) -> Vec<HydroFlow> {
    h.affinors
        .iter()
        .map(|w| HydroFlow { a: w.clone() })
        .collect()
}

/// Total `x`-derivative of a jet polynomial of order at most one.
fn total_x_derivative(f: &Poly, n: usize) -> Poly {
    let mut acc = Poly::zero(3 * n);
    for j in 0..n {
        acc += &(&f.partial(j) * &Poly::var(3 * n, n + j));
        acc += &(&f.partial(n + j) * &Poly::var(3 * n, 2 * n + j));
    }
    acc
}

/// Derivative of a first-order jet polynomial `f` along the evolution with
/// velocity `v`.
fn evolution_derivative(f: &Poly, v: &[Poly], dv_x: &[Poly], n: usize) -> Poly {
    let mut acc = Poly::zero(3 * n);
    for i in 0..n {
        let fu = f.partial(i);
        if !fu.is_zero() {
            acc += &(&fu * &v[i]);
        }
        let fx = f.partial(n + i);
        if !fx.is_zero() {
            acc += &(&fx * &dv_x[i]);
        }
    }
    acc
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("flows act on {left} and {right} components")]
pub struct DimensionMismatch {
    pub left: usize,
    pub right: usize,
}

/// `∂_{t_B} u_{t_A} − ∂_{t_A} u_{t_B}` per component, as polynomials in the
/// jet variables `(u, u_x, u_xx)`.
pub fn flows_commute_residual(a: &HydroFlow, b: &HydroFlow) -> Result<PolyTensor, DimensionMismatch> {
    let n = a.n();
    if b.n() != n {
        return Err(DimensionMismatch { left: n, right: b.n() });
    }
    let va = a.jet_velocity();
    let vb = b.jet_velocity();
    let dva: Vec<Poly> = va.iter().map(|v| total_x_derivative(v, n)).collect();
    let dvb: Vec<Poly> = vb.iter().map(|v| total_x_derivative(v, n)).collect();
    Ok(PolyTensor::from_fn(&[n], |x| {
        let i = x[0];
        &evolution_derivative(&va[i], &vb, &dvb, n) - &evolution_derivative(&vb[i], &va, &dva, n)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::int;
    use crate::exprlang::parse_polynomial;
    use crate::frobenius::Potential;
    use crate::submanifold::reduce_potential;

    fn p3(s: &str) -> Poly {
        parse_polynomial(s, 3).unwrap()
    }

    fn sol1_op() -> FlatHamOp {
        let f = p3("1/4*u2^2*u3^2 + 1/60*u3^5");
        let s = reduce_potential(&Potential::with_deformation(&f).unwrap(), &int(1)).unwrap();
        affinors_from_psi(&s)
    }

    fn matrix(rows: [[&str; 3]; 3]) -> PolyMatrix {
        PolyMatrix::from_rows(rows.iter().map(|r| r.iter().map(|e| p3(e)).collect()).collect()).unwrap()
    }

    #[test]
    fn sol1_affinors() {
        let h = sol1_op();
        assert_eq!(h.affinors()[0], PolyMatrix::identity(3, 3));
        assert_eq!(h.affinors()[1], matrix([["0", "u3", "u2"], ["1", "0", "u3"], ["0", "1", "0"]]));
        assert_eq!(h.affinors()[2], matrix([["0", "u2", "u3^2"], ["0", "u3", "u2"], ["1", "0", "0"]]));
    }

    #[test]
    fn sol1_operator_is_hamiltonian_pencil() {
        let h = sol1_op();
        assert!(is_hamiltonian(&check_relations(&h.to_general())));
        assert!(pencil_check(&h).passes());
    }

    fn failing(h: &FlatHamOp) -> Vec<&'static str> {
        check_relations(&h.to_general())
            .iter()
            .filter(|r| !r.passes())
            .map(|r| r.name)
            .collect()
    }

    #[test]
    fn broken_affinors_fail_relations() {
        let h = sol1_op();
        // With η antidiagonal, η^2 = 1 and w^T η = X η η is still symmetric,
        // so transposing keeps self-adjointness and breaks commutativity instead.
        let mut w = h.affinors().to_vec();
        w[1] = w[1].transpose();
        let bad = FlatHamOp::new(h.eta().clone(), h.mu().clone(), w).unwrap();
        assert_eq!(failing(&bad), ["affinors-commute", "affinor-codazzi", "curvature", "affinor-curvature"]);

        let mut w = h.affinors().to_vec();
        let shifted = w[1].get(0, 1) + &Poly::one(3);
        w[1].set(0, 1, shifted);
        let bad = FlatHamOp::new(h.eta().clone(), h.mu().clone(), w).unwrap();
        assert!(failing(&bad).contains(&"affinor-self-adjoint"));
    }

    #[test]
    fn psi_round_trip() {
        let h = sol1_op();
        let s = psi_from_affinors(&h).unwrap();
        let f = p3("1/4*u2^2*u3^2 + 1/60*u3^5");
        let p = Potential::with_deformation(&f).unwrap();
        for (a, psi) in s.psi().iter().enumerate() {
            assert_eq!(psi, &p.phi().partial(a).strip_low_degree(1));
        }
    }

    #[test]
    fn structural_flows_commute() {
        let flows = structural_flows(&sol1_op());
        for a in &flows {
            for b in &flows {
                assert!(flows_commute_residual(a, b).unwrap().is_zero());
            }
        }
        let generic = HydroFlow::new(matrix([["u1", "u2", "0"], ["0", "1", "u3"], ["u1", "0", "0"]])).unwrap();
        assert!(!flows_commute_residual(&flows[1], &generic).unwrap().is_zero());
        assert!(flows_commute_residual(&flows[0], &generic).unwrap().is_zero());
    }
}
