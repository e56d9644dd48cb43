//! Exact potentials of closed polynomial forms by the radial homotopy
//! `h(u) = ∫_0^1 Σ_k ω_k(tu) u^k dt`, normalized so that `h(0) = 0`.

use super::{AlgebraError, Poly, PolyMatrix};

fn check_vars(form: &[Poly]) -> Result<usize, AlgebraError> {
    let n = form.len();
    for p in form {
        if p.n_vars() < n {
            return Err(AlgebraError::IndexOutOfRange {
                index: n - 1,
                n_vars: p.n_vars(),
            });
        }
        if p.n_vars() != form[0].n_vars() {
            return Err(AlgebraError::VarMismatch {
                left: form[0].n_vars(),
                right: p.n_vars(),
            });
        }
    }
    Ok(form.first().map_or(0, Poly::n_vars))
}

/// Returns `h` with `dh = Σ_k ω_k du^k`, where the form has one component per
/// leading variable. Fails with the first non-vanishing `∂_i ω_j − ∂_j ω_i`.
pub fn integrate_exact_one_form(form: &[Poly]) -> Result<Poly, AlgebraError> {
    let n_vars = check_vars(form)?;
    let n = form.len();
    for i in 0..n {
        for j in i + 1..n {
            let r = &form[j].partial(i) - &form[i].partial(j);
            if !r.is_zero() {
                return Err(AlgebraError::NotClosed {
                    indices: vec![i, j],
                    residual: Box::new(r),
                });
            }
        }
    }
    let mut h = Poly::zero(n_vars);
    for (k, w) in form.iter().enumerate() {
        w.homotopy_add_into(k, &mut h);
    }
    Ok(h)
}

/// Returns `h` with `Hess(h) = x`, `h(0) = 0` and `∇h(0) = 0`. The matrix must
/// be symmetric and satisfy `∂_k x_ij = ∂_i x_kj`.
pub fn integrate_exact_two_form(x: &PolyMatrix) -> Result<Poly, AlgebraError> {
    if !x.is_square() {
        return Err(AlgebraError::Shape(format!(
            "two-form must be square, got {}x{}",
            x.rows(),
            x.cols()
        )));
    }
    let n = x.rows();
    for i in 0..n {
        for j in i + 1..n {
            let r = x.get(i, j) - x.get(j, i);
            if !r.is_zero() {
                return Err(AlgebraError::NotClosed {
                    indices: vec![i, j],
                    residual: Box::new(r),
                });
            }
        }
    }
    let mut grad = Vec::with_capacity(n);
    for j in 0..n {
        let row = x.row(j);
        grad.push(integrate_exact_one_form(row).map_err(|e| match e {
            AlgebraError::NotClosed { indices, residual } => AlgebraError::NotClosed {
                indices: std::iter::once(j).chain(indices).collect(),
                residual,
            },
            other => other,
        })?);
    }
    integrate_exact_one_form(&grad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;

    fn u(i: usize) -> Poly {
        Poly::var(3, i)
    }

    #[test]
    fn one_form_of_known_gradient() {
        let h = &(&u(0) * &u(2)) + &(&u(1) * &u(1)).scale(&rat(1, 2));
        assert_eq!(integrate_exact_one_form(&h.gradient()).unwrap(), h);
    }

    #[test]
    fn non_closed_reports_indices() {
        let form = vec![u(1), Poly::zero(3), Poly::zero(3)];
        match integrate_exact_one_form(&form) {
            Err(AlgebraError::NotClosed { indices, residual }) => {
                assert_eq!(indices, vec![0, 1]);
                assert_eq!(*residual, -Poly::one(3));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn two_form_drops_affine_part() {
        let h = &(&u(1).pow(2) * &u(2).pow(3)) + &u(0).pow(4);
        let with_affine = &(&h + &u(2)) + &Poly::one(3);
        assert_eq!(integrate_exact_two_form(&with_affine.hessian()).unwrap(), h);
    }
}
