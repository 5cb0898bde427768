//! Lowest eigenpairs of Hermitian operators given only as a matvec.
//!
//! Restarted Lanczos with full reorthogonalization. Previously found
//! eigenvectors can be deflated so the same routine also yields the gap.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::kernels::inner;

const KRYLOV_MAX: usize = 160;
const MAX_RESTARTS: usize = 60;

#[derive(Debug, Clone)]
pub(crate) struct Eigenpair {
    pub value: f64,
    pub vector: Vec<C64>,
    pub residual: f64,
}

fn project_out(w: &mut [C64], basis: &[Vec<C64>]) {
    for v in basis {
        let p = inner(v, w);
        for (wi, vi) in w.iter_mut().zip(v) {
            *wi -= p * vi;
        }
    }
}

fn normalize(w: &mut [C64]) -> f64 {
    let n = w.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    if n > 0.0 {
        let inv = 1.0 / n;
        w.iter_mut().for_each(|x| *x *= inv);
    }
    n
}

fn smallest_ritz(alpha: &[f64], beta: &[f64]) -> (f64, Vec<f64>) {
    let k = alpha.len();
    let mut t = DMatrix::<f64>::zeros(k, k);
    for i in 0..k {
        t[(i, i)] = alpha[i];
        if i + 1 < k {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let eig = SymmetricEigen::new(t);
    let (idx, val) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, v)| (i, *v))
        .expect("non-empty tridiagonal");
    (val, eig.eigenvectors.column(idx).iter().copied().collect())
}

/// Lowest eigenpair of `op` restricted to the complement of `deflate`.
///
/// `deflate` vectors must be orthonormal. Stops once the true residual
/// `|A x - lambda x|` drops below `tol`.
pub(crate) fn lowest_eigenpair<F>(
    dim: usize,
    op: F,
    deflate: &[Vec<C64>],
    seed: u64,
    tol: f64,
) -> Result<Eigenpair>
where
    F: Fn(&[C64], &mut [C64]),
{
    if dim <= deflate.len() {
        return Err(Error::Numerical("nothing left after deflation".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut start: Vec<C64> = (0..dim)
        .map(|_| C64::new(rng.random::<f64>() - 0.5, 0.0))
        .collect();
    project_out(&mut start, deflate);
    normalize(&mut start);

    let mut best: Option<Eigenpair> = None;
    let mut w = vec![C64::new(0.0, 0.0); dim];
    for _ in 0..MAX_RESTARTS {
        let kmax = KRYLOV_MAX.min(dim - deflate.len());
        let mut basis: Vec<Vec<C64>> = vec![start.clone()];
        let mut alpha = Vec::with_capacity(kmax);
        let mut beta: Vec<f64> = Vec::with_capacity(kmax);
        loop {
            let j = basis.len() - 1;
            op(&basis[j], &mut w);
            let a = inner(&basis[j], &w).re;
            alpha.push(a);
            // two passes of Gram-Schmidt keep the basis orthogonal to machine precision
            project_out(&mut w, deflate);
            project_out(&mut w, &basis);
            project_out(&mut w, deflate);
            project_out(&mut w, &basis);
            let b = normalize(&mut w);
            let done = basis.len() >= kmax || b < 1e-13;
            if !done && alpha.len() % 8 == 0 {
                let (_, y) = smallest_ritz(&alpha, &beta);
                if (b * y[y.len() - 1]).abs() < 0.01 * tol {
                    break;
                }
            }
            if done {
                break;
            }
            beta.push(b);
            basis.push(w.clone());
        }
        let (_, y) = smallest_ritz(&alpha, &beta);
        let mut x = vec![C64::new(0.0, 0.0); dim];
        for (yi, v) in y.iter().zip(&basis) {
            for (xi, vi) in x.iter_mut().zip(v) {
                *xi += vi * *yi;
            }
        }
        project_out(&mut x, deflate);
        normalize(&mut x);
        op(&x, &mut w);
        let value = inner(&x, &w).re;
        let residual = w
            .iter()
            .zip(&x)
            .map(|(hx, xi)| (hx - xi * value).norm_sqr())
            .sum::<f64>()
            .sqrt();
        let pair = Eigenpair {
            value,
            vector: x.clone(),
            residual,
        };
        if residual < tol {
            return Ok(pair);
        }
        if best.as_ref().is_none_or(|b| residual < b.residual) {
            best = Some(pair);
        }
        start = x;
    }
    let best = best.expect("at least one restart");
    Err(Error::Numerical(format!(
        "Lanczos did not converge: residual {:.3e} > {tol:.1e}",
        best.residual
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag_op(d: Vec<f64>) -> impl Fn(&[C64], &mut [C64]) {
        move |x, y| {
            for i in 0..x.len() {
                y[i] = x[i] * d[i];
            }
        }
    }

    #[test]
    fn finds_lowest_of_diagonal() {
        let d: Vec<f64> = (0..300).map(|i| ((i * 37) % 300) as f64 * 0.1 - 3.0).collect();
        let p = lowest_eigenpair(300, diag_op(d), &[], 1, 1e-10).unwrap();
        assert!((p.value + 3.0).abs() < 1e-10);
    }

    #[test]
    fn deflation_exposes_degenerate_partner() {
        let mut d = vec![1.0; 64];
        d[5] = -2.0;
        d[40] = -2.0;
        let op = diag_op(d);
        let p0 = lowest_eigenpair(64, &op, &[], 3, 1e-11).unwrap();
        let p1 = lowest_eigenpair(64, &op, &[p0.vector.clone()], 4, 1e-11).unwrap();
        assert!((p0.value + 2.0).abs() < 1e-10);
        assert!((p1.value + 2.0).abs() < 1e-10);
    }
}
