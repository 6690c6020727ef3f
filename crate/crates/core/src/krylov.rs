//! Iterative linear solvers: diagonally preconditioned conjugate gradients
//! for the symmetric case, BiCGStab when cut cells break symmetry.
//!
//! Stopping is on the sup-norm of the true residual, so callers get the
//! contract `sup|A x - b| <= tol_abs` on success. Iteration order is
//! deterministic. The workers take the operator as a closure so that
//! diagonal shifts and subset restrictions reuse the same code.

use crate::error::{CoreError, Result};
use crate::field::ScalarField;
use crate::operator::LaplacianOperator;
use crate::scalar::{real, Real};

const MAX_ITERS: usize = 50_000;

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b.iter()).map(|(x, y)| *x * *y).sum()
}

fn sup<T: Real>(a: &[T]) -> T {
    a.iter().fold(T::zero(), |m, v| m.max(v.abs()))
}

/// Solves `(A + diag(shift)) x = b` to absolute sup-norm tolerance.
pub fn solve_system<T: Real>(
    op: &LaplacianOperator<T>,
    shift: Option<&[T]>,
    b: &[T],
    tol_abs: T,
) -> Result<Vec<T>> {
    let diag: Vec<T> = match shift {
        Some(s) => op.diag().iter().zip(s.iter()).map(|(d, si)| *d + *si).collect(),
        None => op.diag().to_vec(),
    };
    let apply = |x: &[T], y: &mut [T]| op.apply_shifted(shift, x, y);
    let nonneg_shift = shift.map_or(true, |s| s.iter().all(|v| *v >= T::zero()));
    if op.is_symmetric() && nonneg_shift {
        pcg(&apply, &diag, b, tol_abs)
    } else {
        bicgstab(&apply, &diag, b, tol_abs)
    }
}

/// Public linear-solve contract on fields: residual sup-norm bounded by
/// `tol * (1 + sup|rhs|)`.
pub fn solve_linear<T: Real>(
    op: &LaplacianOperator<T>,
    rhs: &ScalarField<T>,
    tol: T,
) -> Result<ScalarField<T>> {
    if rhs.len() != op.n() {
        return Err(CoreError::GridMismatch);
    }
    let tol_abs = tol * (T::one() + rhs.sup_norm());
    let x = solve_system(op, None, rhs.values(), tol_abs)?;
    ScalarField::from_values(op.grid(), x)
}

fn true_residual<T: Real>(
    apply: &impl Fn(&[T], &mut [T]),
    x: &[T],
    b: &[T],
    scratch: &mut [T],
) -> T {
    apply(x, scratch);
    scratch
        .iter()
        .zip(b.iter())
        .fold(T::zero(), |m, (ax, bi)| m.max((*ax - *bi).abs()))
}

/// Preconditioned conjugate gradients for a symmetric positive operator.
pub(crate) fn pcg<T: Real>(
    apply: &impl Fn(&[T], &mut [T]),
    diag: &[T],
    b: &[T],
    tol_abs: T,
) -> Result<Vec<T>> {
    let n = b.len();
    let inv_diag: Vec<T> = diag.iter().map(|d| T::one() / *d).collect();

    let mut x = vec![T::zero(); n];
    let mut r = b.to_vec();
    let mut z: Vec<T> = r.iter().zip(&inv_diag).map(|(ri, di)| *ri * *di).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut q = vec![T::zero(); n];

    for _ in 0..MAX_ITERS {
        if sup(&r) <= tol_abs && true_residual(apply, &x, b, &mut q) <= tol_abs {
            return Ok(x);
        }
        apply(&p, &mut q);
        let pq = dot(&p, &q);
        if pq == T::zero() {
            return Err(CoreError::NoConvergence(MAX_ITERS));
        }
        let alpha = rz / pq;
        for k in 0..n {
            x[k] += alpha * p[k];
            r[k] -= alpha * q[k];
        }
        for k in 0..n {
            z[k] = r[k] * inv_diag[k];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        for k in 0..n {
            p[k] = z[k] + beta * p[k];
        }
        rz = rz_new;
    }
    Err(CoreError::NoConvergence(MAX_ITERS))
}

/// Jacobi-preconditioned BiCGStab for mildly non-symmetric operators.
pub(crate) fn bicgstab<T: Real>(
    apply: &impl Fn(&[T], &mut [T]),
    diag: &[T],
    b: &[T],
    tol_abs: T,
) -> Result<Vec<T>> {
    let n = b.len();
    let inv_diag: Vec<T> = diag.iter().map(|d| T::one() / *d).collect();

    let mut x = vec![T::zero(); n];
    let mut r = b.to_vec();
    let r_hat = r.clone();
    let mut rho = T::one();
    let mut alpha = T::one();
    let mut omega = T::one();
    let mut v = vec![T::zero(); n];
    let mut p = vec![T::zero(); n];
    let mut p_hat = vec![T::zero(); n];
    let mut s = vec![T::zero(); n];
    let mut s_hat = vec![T::zero(); n];
    let mut t = vec![T::zero(); n];
    let mut scratch = vec![T::zero(); n];
    let tiny = real::<T>(1e-300);

    for iter in 0..MAX_ITERS {
        if sup(&r) <= tol_abs && true_residual(apply, &x, b, &mut scratch) <= tol_abs {
            return Ok(x);
        }
        let rho_new = dot(&r_hat, &r);
        if rho_new.abs() < tiny {
            return Err(CoreError::NoConvergence(iter));
        }
        if iter == 0 {
            p.copy_from_slice(&r);
        } else {
            let beta = (rho_new / rho) * (alpha / omega);
            for k in 0..n {
                p[k] = r[k] + beta * (p[k] - omega * v[k]);
            }
        }
        rho = rho_new;
        for k in 0..n {
            p_hat[k] = p[k] * inv_diag[k];
        }
        apply(&p_hat, &mut v);
        let denom = dot(&r_hat, &v);
        if denom.abs() < tiny {
            return Err(CoreError::NoConvergence(iter));
        }
        alpha = rho / denom;
        for k in 0..n {
            s[k] = r[k] - alpha * v[k];
        }
        if sup(&s) <= tol_abs {
            for k in 0..n {
                x[k] += alpha * p_hat[k];
            }
            if true_residual(apply, &x, b, &mut scratch) <= tol_abs {
                return Ok(x);
            }
            r.copy_from_slice(&s);
            continue;
        }
        for k in 0..n {
            s_hat[k] = s[k] * inv_diag[k];
        }
        apply(&s_hat, &mut t);
        let tt = dot(&t, &t);
        if tt.abs() < tiny {
            return Err(CoreError::NoConvergence(iter));
        }
        omega = dot(&t, &s) / tt;
        for k in 0..n {
            x[k] += alpha * p_hat[k] + omega * s_hat[k];
            r[k] = s[k] - omega * t[k];
        }
        if omega.abs() < tiny {
            return Err(CoreError::NoConvergence(iter));
        }
    }
    Err(CoreError::NoConvergence(MAX_ITERS))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::DomainSpec;
    use crate::grid::build_grid;
    use crate::operator::assemble_laplacian;
    use std::sync::Arc;

    fn shared(spec: DomainSpec<f64>, h: f64) -> Arc<crate::grid::Grid<f64>> {
        Arc::new(build_grid(&spec, h).unwrap())
    }

    #[test]
    fn manufactured_biquadratic() {
        let g = shared(DomainSpec::rectangle(-1.0_f64, 1.0, -1.0, 1.0), 0.125);
        let op = assemble_laplacian(&g).unwrap();
        let exact = ScalarField::from_fn(&g, |p| (1.0 - p[0] * p[0]) * (1.0 - p[1] * p[1]));
        let rhs = op.apply_field(&exact).unwrap();
        let x = solve_linear(&op, &rhs, 1e-12).unwrap();
        assert!(x.sup_distance(&exact).unwrap() < 1e-9);
    }

    #[test]
    fn interval_unit_rhs() {
        let g = shared(DomainSpec::interval(-1.0_f64, 1.0), 2.0_f64.powi(-7));
        let op = assemble_laplacian(&g).unwrap();
        let rhs = ScalarField::constant(&g, 1.0);
        let x = solve_linear(&op, &rhs, 1e-12).unwrap();
        for k in 0..g.node_count() {
            let p = g.coords(k)[0];
            assert!((x.get(k) - (1.0 - p * p) / 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn disk_center_value() {
        let h = 2.0_f64.powi(-5);
        let g = shared(DomainSpec::disk([0.0_f64, 0.0], 1.0), h);
        let op = assemble_laplacian(&g).unwrap();
        let rhs = ScalarField::constant(&g, 1.0);
        let x = solve_linear(&op, &rhs, 1e-11).unwrap();
        let center = g.index_of(0, 0).unwrap();
        // exact solution (1 - r^2)/4 has value 1/4 at the center
        assert!((x.get(center) - 0.25).abs() <= 5.0 * h * h);
    }

    #[test]
    fn maximum_principle_nonnegative_rhs() {
        let g = shared(DomainSpec::disk([0.0_f64, 0.0], 1.0), 0.0625);
        let op = assemble_laplacian(&g).unwrap();
        let rhs = ScalarField::from_fn(&g, |p| (3.0 * p[0]).sin().abs() + 0.1);
        let tol = 1e-11;
        let x = solve_linear(&op, &rhs, tol).unwrap();
        assert!(x.min_value() >= -tol);
    }
}
