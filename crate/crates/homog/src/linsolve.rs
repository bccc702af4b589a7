//! Linear solvers for the discrete elliptic systems.
//!
//! One-dimensional stencils give tridiagonal matrices and are solved
//! directly. Two-dimensional systems go through preconditioned conjugate
//! gradients with a Jacobi preconditioner; singular periodic systems pin the
//! constant nullspace by projecting the mean out of every iterate.

/// Solves a tridiagonal system in place of allocations.
///
/// `lower[i]` couples row `i` to `i-1` (lower[0] unused), `upper[i]` couples
/// row `i` to `i+1` (last entry unused).
pub fn thomas(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    assert!(lower.len() == n && upper.len() == n && rhs.len() == n);
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = upper[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let m = diag[i] - lower[i] * c[i - 1];
        c[i] = upper[i] / m;
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / m;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}

#[derive(Debug, Clone)]
pub struct CgOutcome {
    pub x: Vec<f64>,
    /// Relative residual `|b - A x| / |b|` (absolute when `|b| = 0`).
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn subtract_mean(v: &mut [f64]) {
    let m = v.iter().sum::<f64>() / v.len() as f64;
    for x in v.iter_mut() {
        *x -= m;
    }
}

/// Jacobi-preconditioned conjugate gradients.
///
/// `apply` computes `out = A u`. With `pin_mean` the constant nullspace of a
/// singular periodic operator is removed by keeping all iterates mean-free.
pub fn pcg<F>(
    apply: F,
    b: &[f64],
    diag: &[f64],
    tol: f64,
    max_iter: usize,
    pin_mean: bool,
) -> CgOutcome
where
    F: Fn(&[f64], &mut [f64]),
{
    let n = b.len();
    let mut b = b.to_vec();
    if pin_mean {
        subtract_mean(&mut b);
    }
    let b_norm = norm(&b);
    if b_norm == 0.0 {
        return CgOutcome { x: vec![0.0; n], residual: 0.0, iterations: 0, converged: true };
    }
    let mut x = vec![0.0; n];
    let mut r = b.clone();
    let mut z: Vec<f64> = r.iter().zip(diag).map(|(ri, di)| ri / di).collect();
    if pin_mean {
        subtract_mean(&mut z);
    }
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz = dot(&r, &z);
    let mut res = norm(&r) / b_norm;
    let mut it = 0;
    while res > tol && it < max_iter {
        apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            break; // loss of positivity, bail out with the current iterate
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        for i in 0..n {
            z[i] = r[i] / diag[i];
        }
        if pin_mean {
            subtract_mean(&mut z);
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
        res = norm(&r) / b_norm;
        it += 1;
    }
    if pin_mean {
        subtract_mean(&mut x);
    }
    CgOutcome { x, residual: res, iterations: it, converged: res <= tol }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thomas_solves_small_system() {
        // [2 -1 0; -1 2 -1; 0 -1 2] x = [1 0 1] -> x = [1 1 1]
        let lower = vec![0.0, -1.0, -1.0];
        let diag = vec![2.0, 2.0, 2.0];
        let upper = vec![-1.0, -1.0, 0.0];
        let x = thomas(&lower, &diag, &upper, &[1.0, 0.0, 1.0]);
        for v in &x {
            assert!((v - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn pcg_matches_direct_solution() {
        let n = 64;
        let apply = |u: &[f64], out: &mut [f64]| {
            for i in 0..n {
                let left = if i > 0 { u[i - 1] } else { 0.0 };
                let right = if i + 1 < n { u[i + 1] } else { 0.0 };
                out[i] = 2.0 * u[i] - left - right;
            }
        };
        let diag = vec![2.0; n];
        let b: Vec<f64> = (0..n).map(|i| (i as f64 / n as f64).sin()).collect();
        let out = pcg(apply, &b, &diag, 1e-12, 10_000, false);
        assert!(out.converged);
        let mut check = vec![0.0; n];
        apply(&out.x, &mut check);
        let err: f64 = check.iter().zip(&b).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        assert!(err < 1e-10);
    }

    #[test]
    fn pcg_zero_rhs_returns_zero() {
        let out = pcg(|_, o: &mut [f64]| o.fill(0.0), &[0.0; 8], &[1.0; 8], 1e-12, 100, false);
        assert_eq!(out.iterations, 0);
        assert!(out.x.iter().all(|&v| v == 0.0));
    }
}
