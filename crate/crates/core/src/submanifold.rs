//! Flat torsionless submanifolds in flat coordinates: the second forms are
//! Hessians `ω_α = Hess(ψ_α)` and the whole geometry reduces to the Gauss and
//! Ricci equations on the `ψ_α`.

use num_traits::Zero;

use crate::algebra::{AlgebraError, ConstSymMatrix, Poly, PolyMatrix, PolyTensor, Rational};
use crate::frobenius::Potential;

/// `N`-dimensional submanifold data with `L` normal directions: covariant `η`
/// and `μ` (both with cached inverses) and one function `ψ_α` per normal.
#[derive(Clone, Debug)]
pub struct PsiSystem {
    eta: ConstSymMatrix,
    mu: ConstSymMatrix,
    psi: Vec<Poly>,
    omega: Vec<PolyMatrix>,
}

impl PsiSystem {
    pub fn new(eta: ConstSymMatrix, mu: ConstSymMatrix, psi: Vec<Poly>) -> Result<Self, AlgebraError> {
        if psi.len() != mu.dim() {
            return Err(AlgebraError::LengthMismatch {
                expected: mu.dim(),
                got: psi.len(),
            });
        }
        let n = eta.dim();
        if let Some(p) = psi.iter().find(|p| p.n_vars() != n) {
            return Err(AlgebraError::VarMismatch {
                left: n,
                right: p.n_vars(),
            });
        }
        let omega = psi.iter().map(Poly::hessian).collect();
        Ok(PsiSystem { eta, mu, psi, omega })
    }

    pub fn n(&self) -> usize {
        self.eta.dim()
    }

    pub fn l(&self) -> usize {
        self.mu.dim()
    }

    pub fn eta(&self) -> &ConstSymMatrix {
        &self.eta
    }

    pub fn mu(&self) -> &ConstSymMatrix {
        &self.mu
    }

    pub fn psi(&self) -> &[Poly] {
        &self.psi
    }

    /// `ω_α,ij = ∂_i ∂_j ψ_α`.
    pub fn second_forms(&self) -> &[PolyMatrix] {
        &self.omega
    }

    /// Copy with the affine part of every `ψ_α` removed. Affine terms do not
    /// enter any second form.
    pub fn normalized(&self) -> PsiSystem {
        PsiSystem {
            eta: self.eta.clone(),
            mu: self.mu.clone(),
            psi: self.psi.iter().map(|p| p.strip_low_degree(1)).collect(),
            omega: self.omega.clone(),
        }
    }

    /// `Σ_α μ^{αβ} ω_α` for each `β`.
    pub(crate) fn raised_forms(&self) -> Vec<PolyMatrix> {
        let (n, l) = (self.n(), self.l());
        (0..l)
            .map(|b| {
                let mut acc = PolyMatrix::zeros(n, n, n);
                for a in 0..l {
                    let m = self.mu.inv(a, b);
                    if !m.is_zero() {
                        acc = acc.add(&self.omega[a].scale(m));
                    }
                }
                acc
            })
            .collect()
    }

    /// `η^{-1} ω_α`, entry `(j, k)` equal to `η^{ji} ω_α,ik`.
    pub(crate) fn mixed_forms(&self) -> Vec<PolyMatrix> {
        self.omega
            .iter()
            .map(|w| w.const_left_mul(self.eta.inverse().entries()))
            .collect()
    }
}

/// `ψ_α = ∂_α Φ` with `μ^{αβ} = c η^{αβ}`.
pub fn reduce_potential(p: &Potential, c: &Rational) -> Result<PsiSystem, AlgebraError> {
    let mu = p.eta().scaled(&c.recip())?;
    let psi = (0..p.n()).map(|a| p.phi().partial(a)).collect();
    PsiSystem::new(p.eta().clone(), mu, psi)
}

/// Entry `(i, j, k, l)` is `Σ μ^{αβ}(ω_α,ik ω_β,jl − ω_α,il ω_β,jk)`.
pub fn gauss_residual(s: &PsiSystem) -> PolyTensor {
    let n = s.n();
    let raised = s.raised_forms();
    // q[(i,k),(j,l)] = Σ_β ν_β,ik ω_β,jl
    let q = PolyTensor::from_fn(&[n, n, n, n], |idx| {
        let mut acc = Poly::zero(n);
        for (nu, om) in raised.iter().zip(&s.omega) {
            let (a, b) = (nu.get(idx[0], idx[1]), om.get(idx[2], idx[3]));
            if !a.is_zero() && !b.is_zero() {
                acc += &(a * b);
            }
        }
        acc
    });
    PolyTensor::from_fn(&[n, n, n, n], |idx| {
        let (i, j, k, l) = (idx[0], idx[1], idx[2], idx[3]);
        q.get(&[i, k, j, l]) - q.get(&[i, l, j, k])
    })
}

/// Entry `(α, β, k, l)` is `Σ η^{ij}(ω_α,ik ω_β,jl − ω_α,il ω_β,jk)`.
pub fn ricci_residual(s: &PsiSystem) -> PolyTensor {
    let (n, l) = (s.n(), s.l());
    let mixed = s.mixed_forms();
    let products: Vec<Vec<PolyMatrix>> = (0..l)
        .map(|a| (0..l).map(|b| s.omega[a].mul(&mixed[b])).collect())
        .collect();
    PolyTensor::from_fn(&[l, l, n, n], |idx| {
        let m = &products[idx[0]][idx[1]];
        m.get(idx[2], idx[3]) - m.get(idx[3], idx[2])
    })
}

/// `∂_k ω_α,ij = ∂_j ω_α,ik`. Holds for every Hessian; kept as a self-check.
pub fn codazzi_check(s: &PsiSystem) -> bool {
    let n = s.n();
    s.omega.iter().all(|w| {
        (0..n).all(|i| {
            (0..n).all(|j| (0..n).all(|k| w.get(i, j).partial(k) == w.get(i, k).partial(j)))
        })
    })
}

/// Values of the spectral parameters; `None` keeps a parameter symbolic.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LaxParams {
    pub lambda: Option<Rational>,
    pub rho: Option<Rational>,
}

impl LaxParams {
    pub fn symbolic() -> Self {
        Self::default()
    }
}

/// Connection matrices `M_i` of the first-order system `∂_i Y = M_i Y` for
/// `Y = (∂_1 a, …, ∂_N a, b_1, …, b_L)`. Entries are polynomials in
/// `N + 2` variables, the last two being `λ` and `ρ`.
pub fn lax_connection(s: &PsiSystem, params: &LaxParams) -> Vec<PolyMatrix> {
    let (n, l) = (s.n(), s.l());
    let nv = n + 2;
    let param = |value: &Option<Rational>, index: usize| match value {
        Some(v) => Poly::constant(nv, v.clone()),
        None => Poly::var(nv, index),
    };
    let lambda = param(&params.lambda, n);
    let rho = param(&params.rho, n + 1);
    let raised = s.raised_forms();
    let mixed = s.mixed_forms();
    (0..n)
        .map(|i| {
            let mut m = PolyMatrix::zeros(n + l, n + l, nv);
            for j in 0..n {
                for b in 0..l {
                    let e = raised[b].get(i, j);
                    if !e.is_zero() {
                        m.set(j, n + b, &lambda * &e.extend_vars(nv));
                    }
                }
            }
            for a in 0..l {
                for k in 0..n {
                    // Σ_j η^{kj} ω_α,ij = (η^{-1} ω_α)_{k i}
                    let e = mixed[a].get(k, i);
                    if !e.is_zero() {
                        m.set(n + a, k, &rho * &e.extend_vars(nv));
                    }
                }
            }
            m
        })
        .collect()
}

/// Curvature `∂_i M_j − ∂_j M_i − [M_i, M_j]` for each pair `i < j`.
pub fn zero_curvature_residual(s: &PsiSystem, params: &LaxParams) -> Vec<((usize, usize), PolyMatrix)> {
    let m = lax_connection(s, params);
    let n = s.n();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let r = m[j].partial(i).sub(&m[i].partial(j)).sub(&m[i].commutator(&m[j]));
            out.push(((i, j), r));
        }
    }
    out
}
