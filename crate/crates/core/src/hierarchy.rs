//! Bi-Hamiltonian hierarchies of a ψ-system: Legendre densities, the
//! recursion `h_s → F^(s) → h_(s+1)`, locality of Hamiltonian systems and the
//! involution conditions for integrals built from `ψ` or `Φ`.

use num_traits::Zero;
use thiserror::Error;

use crate::algebra::{
    integrate_exact_one_form, integrate_exact_two_form, AlgebraError, Poly, PolyMatrix, PolyTensor,
};
use crate::frobenius::Potential;
use crate::hamop::HydroFlow;
use crate::submanifold::{gauss_residual, ricci_residual, PsiSystem};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HierarchyError {
    #[error("ψ-system does not solve the {equations} equations ({nonzero} nonzero residual entries)")]
    NotASolution { equations: &'static str, nonzero: usize },
    #[error("lift of component {component} failed: {source}")]
    Lift { component: usize, source: AlgebraError },
    #[error("next density failed: {0}")]
    Density(AlgebraError),
}

/// `F_n = u^j ∂_j ψ_n − ψ_n`.
pub fn legendre_f(s: &PsiSystem) -> Vec<Poly> {
    let n = s.n();
    s.psi()
        .iter()
        .map(|psi| {
            let mut acc = -psi.clone();
            for j in 0..n {
                acc += &(&Poly::var(n, j) * &psi.partial(j));
            }
            acc
        })
        .collect()
}

/// Components `Σ_jr ψ_n,jp η^{jr} ∂_r h` (indexed by `p`) of the one-form
/// whose potential is `F_n` for each `n`.
fn lift_forms(s: &PsiSystem, h: &Poly) -> Vec<Vec<Poly>> {
    let n = s.n();
    let grad = h.gradient();
    let eta = s.eta().inverse();
    let raised_grad: Vec<Poly> = (0..n)
        .map(|j| {
            let mut acc = Poly::zero(n);
            for (r, g) in grad.iter().enumerate() {
                let e = eta.get(j, r);
                if !e.is_zero() {
                    acc += &g.scale(e);
                }
            }
            acc
        })
        .collect();
    s.second_forms()
        .iter()
        .map(|w| {
            (0..n)
                .map(|p| {
                    let mut acc = Poly::zero(n);
                    for (j, rg) in raised_grad.iter().enumerate() {
                        let e = w.get(j, p);
                        if !e.is_zero() && !rg.is_zero() {
                            acc += &(e * rg);
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// `F_n^(s)` with `∂_p F_n = ψ_n,jp η^{jr} ∂_r h` and `F_n(0) = 0`.
pub fn lift_density(s: &PsiSystem, h: &Poly) -> Result<Vec<Poly>, HierarchyError> {
    lift_forms(s, h)
        .iter()
        .enumerate()
        .map(|(component, form)| {
            integrate_exact_one_form(form).map_err(|source| HierarchyError::Lift { component, source })
        })
        .collect()
}

/// `Σ_mn μ^{mn} Hess(ψ_m) F_n`.
fn recursion_matrix(s: &PsiSystem, f_lift: &[Poly]) -> PolyMatrix {
    let n = s.n();
    let raised = s.raised_forms();
    let mut acc = PolyMatrix::zeros(n, n, n);
    for (nu, f) in raised.iter().zip(f_lift) {
        if !f.is_zero() {
            acc = acc.add(&nu.map(|e| e * f));
        }
    }
    acc
}

/// `h_(s+1)` with `Hess(h_(s+1)) = Σ_mn μ^{mn} Hess(ψ_m) F_n^(s)`, vanishing
/// with its gradient at the origin.
pub fn next_density(s: &PsiSystem, f_lift: &[Poly]) -> Result<Poly, AlgebraError> {
    if f_lift.len() != s.l() {
        return Err(AlgebraError::LengthMismatch {
            expected: s.l(),
            got: f_lift.len(),
        });
    }
    integrate_exact_two_form(&recursion_matrix(s, f_lift))
}

/// Flow `u^i_t = Σ_mn μ^{mn} η^{ip} F_n ψ_m,pk u^k_x` generated by a lift.
pub fn lifted_flow(s: &PsiSystem, f_lift: &[Poly]) -> HydroFlow {
    let m = recursion_matrix(s, f_lift).const_left_mul(s.eta().inverse().entries());
    HydroFlow { a: m }
}

#[derive(Clone, Debug)]
pub struct HierarchyLevel {
    pub s: usize,
    pub h: Poly,
    pub f_lift: Vec<Poly>,
    pub flow: HydroFlow,
    pub h_next: Poly,
}

/// Levels `1..=depth` starting from `h_1 = ½ η_ij u^i u^j`. Refuses systems
/// that do not solve the Gauss and Ricci equations.
pub fn build_hierarchy(s: &PsiSystem, depth: usize) -> Result<Vec<HierarchyLevel>, HierarchyError> {
    let gauss = gauss_residual(s);
    if !gauss.is_zero() {
        return Err(HierarchyError::NotASolution {
            equations: "Gauss",
            nonzero: gauss.nonzero_count(),
        });
    }
    let ricci = ricci_residual(s);
    if !ricci.is_zero() {
        return Err(HierarchyError::NotASolution {
            equations: "Ricci",
            nonzero: ricci.nonzero_count(),
        });
    }
    let mut h = s.eta().half_quadratic_form(s.n());
    let mut levels = Vec::with_capacity(depth);
    for level in 1..=depth {
        let f_lift = lift_density(s, &h)?;
        let h_next = next_density(s, &f_lift).map_err(HierarchyError::Density)?;
        levels.push(HierarchyLevel {
            s: level,
            flow: lifted_flow(s, &f_lift),
            h: std::mem::replace(&mut h, h_next.clone()),
            f_lift,
            h_next,
        });
    }
    Ok(levels)
}

/// Exact re-check of one level: `∂_p F_n = ψ_n,jp η^{jr} ∂_r h` and
/// `Hess(h_next) = Σ μ^{mn} Hess(ψ_m) F_n`.
pub fn level_identities_hold(s: &PsiSystem, level: &HierarchyLevel) -> (bool, bool) {
    let forms = lift_forms(s, &level.h);
    let gradient_ok = forms
        .iter()
        .zip(&level.f_lift)
        .all(|(form, f)| &f.gradient() == form);
    let hessian_ok = level.h_next.hessian() == recursion_matrix(s, &level.f_lift);
    (gradient_ok, hessian_ok)
}

#[derive(Clone, Debug)]
pub struct LocalityReport {
    pub passes: bool,
    /// Entry `(n, s, p)`: `ψ_n,js η^{jr} h_rp − ψ_n,jp η^{jr} h_rs`.
    pub residual: PolyTensor,
    /// `P_n` with `∂_s P_n = ψ_n,js η^{jr} ∂_r h`.
    pub p_densities: Option<Vec<Poly>>,
    /// `f` with `Hess(f) = Σ μ^{mn} Hess(ψ_m) P_n`.
    pub f_density: Option<Poly>,
}

pub fn check_locality(s: &PsiSystem, h: &Poly) -> LocalityReport {
    let n = s.n();
    let hh = h.hessian();
    let eta = s.eta().inverse();
    let products: Vec<PolyMatrix> = s
        .second_forms()
        .iter()
        .map(|w| w.transpose().mul(&hh.const_left_mul(eta.entries())))
        .collect();
    let residual = PolyTensor::from_fn(&[s.l(), n, n], |x| {
        let m = &products[x[0]];
        m.get(x[1], x[2]) - m.get(x[2], x[1])
    });
    let passes = residual.is_zero();
    let (p_densities, f_density) = if passes {
        let p = lift_density(s, h).ok();
        let f = p.as_ref().and_then(|p| next_density(s, p).ok());
        (p, f)
    } else {
        (None, None)
    };
    LocalityReport {
        passes,
        residual,
        p_densities,
        f_density,
    }
}

/// Closedness residual `∂_l ω_k − ∂_k ω_l`, indexed `[k, l]`.
fn closedness(form: &[Poly]) -> Vec<Vec<Poly>> {
    let n = form.len();
    (0..n)
        .map(|k| (0..n).map(|l| &form[k].partial(l) - &form[l].partial(k)).collect())
        .collect()
}

/// One-form `ψ_n,i η^{ij} ψ_m,jk du^k`, with gradients and Hessians given.
fn bracket_form(grad_n: &[Poly], hess_m: &PolyMatrix, eta_inv: &crate::algebra::ConstSymMatrix) -> Vec<Poly> {
    let n = grad_n.len();
    (0..n)
        .map(|k| {
            let mut acc = Poly::zero(hess_m.n_vars());
            for (i, gi) in grad_n.iter().enumerate() {
                if gi.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let e = eta_inv.get(i, j);
                    let h = hess_m.get(j, k);
                    if !e.is_zero() && !h.is_zero() {
                        acc += &(gi * h).scale(e);
                    }
                }
            }
            acc
        })
        .collect()
}

/// For each pair `(n, m)`, the closedness residual `[n, m, k, l]` of
/// `ψ_n,i η^{ij} ψ_m,jk du^k`. Zero for all pairs iff the Ricci equations hold.
pub fn involution_residual_constant_bracket(s: &PsiSystem) -> PolyTensor {
    let n = s.n();
    let l = s.l();
    let eta = s.eta().inverse();
    let grads: Vec<Vec<Poly>> = s.psi().iter().map(Poly::gradient).collect();
    let closed: Vec<Vec<Vec<Vec<Poly>>>> = (0..l)
        .map(|a| {
            (0..l)
                .map(|b| closedness(&bracket_form(&grads[a], &s.second_forms()[b], &eta)))
                .collect()
        })
        .collect();
    PolyTensor::from_fn(&[l, l, n, n], |x| closed[x[0]][x[1]][x[2]][x[3]].clone())
}

/// Same residual with `ψ_n = ∂_n Φ`; zero for all pairs iff `Φ` solves WDVV.
pub fn involution_wdvv_integrals(p: &Potential) -> PolyTensor {
    let n = p.n();
    let eta = p.eta().inverse();
    let grads: Vec<Vec<Poly>> = (0..n).map(|a| p.phi().partial(a).gradient()).collect();
    let hessians: Vec<PolyMatrix> = (0..n)
        .map(|b| PolyMatrix::from_fn(n, n, n, |j, k| p.phi3(b, j, k).clone()))
        .collect();
    let closed: Vec<Vec<Vec<Vec<Poly>>>> = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| closedness(&bracket_form(&grads[a], &hessians[b], &eta)))
                .collect()
        })
        .collect();
    PolyTensor::from_fn(&[n, n, n, n], |x| closed[x[0]][x[1]][x[2]][x[3]].clone())
}

/// Entry `(n, k, l)`: `Φ_ki η^{ij} Φ_jnl − Φ_li η^{ij} Φ_jnk`.
pub fn check_potential_involution(p: &Potential) -> PolyTensor {
    let n = p.n();
    let eta = p.eta().inverse();
    let second = p.phi().hessian();
    // t[k, n, l] = Σ_ij Φ_ki η^{ij} Φ_jnl
    let t = PolyTensor::from_fn(&[n, n, n], |x| {
        let (k, m, l) = (x[0], x[1], x[2]);
        let mut acc = Poly::zero(n);
        for i in 0..n {
            let a = second.get(k, i);
            if a.is_zero() {
                continue;
            }
            for j in 0..n {
                let e = eta.get(i, j);
                if !e.is_zero() {
                    acc += &(a * p.phi3(j, m, l)).scale(e);
                }
            }
        }
        acc
    });
    PolyTensor::from_fn(&[n, n, n], |x| {
        let (m, k, l) = (x[0], x[1], x[2]);
        t.get(&[k, m, l]) - t.get(&[l, m, k])
    })
}

/// Closedness residual `[n, k, l]` of `Φ_i η^{ij} Φ_njk du^k`, the condition
/// for `∫Φ dx` to commute with each `∫∂_n Φ dx`.
pub fn functional_involution_residual(p: &Potential) -> PolyTensor {
    let n = p.n();
    let eta = p.eta().inverse();
    let grad = p.phi().gradient();
    let closed: Vec<Vec<Vec<Poly>>> = (0..n)
        .map(|m| {
            let hess = PolyMatrix::from_fn(n, n, n, |j, k| p.phi3(m, j, k).clone());
            closedness(&bracket_form(&grad, &hess, &eta))
        })
        .collect();
    PolyTensor::from_fn(&[n, n, n], |x| closed[x[0]][x[1]][x[2]].clone())
}
