//! Small dense helpers shared across modules.

use nalgebra::{DMatrix, DVector};

/// Largest absolute entry.
pub fn max_abs(a: &DMatrix<f64>) -> f64 {
    a.iter().fold(0.0f64, |acc, x| acc.max(x.abs()))
}

pub fn max_abs_vec(a: &DVector<f64>) -> f64 {
    a.iter().fold(0.0f64, |acc, x| acc.max(x.abs()))
}

/// Singular values in descending order.
pub fn singular_values(a: &DMatrix<f64>) -> Vec<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = a.clone().singular_values().iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// Number of singular values above `rel_tol` times the largest one.
pub fn numerical_rank(a: &DMatrix<f64>, rel_tol: f64) -> usize {
    let s = singular_values(a);
    let Some(&top) = s.first() else { return 0 };
    if top == 0.0 {
        return 0;
    }
    s.iter().filter(|&&x| x > rel_tol * top).count()
}

/// Right singular vectors of a square matrix, ordered by increasing singular
/// value, together with those singular values.
pub fn ascending_right_singular(a: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = a.ncols();
    debug_assert_eq!(a.nrows(), n);
    let svd = a.clone().svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]));
    let values = order.iter().map(|&i| svd.singular_values[i]).collect();
    let v = DMatrix::from_fn(n, n, |r, c| vt[(order[c], r)]);
    (values, v)
}

/// Coefficients `c_0..c_n` of `det(A - t I) = sum c_k t^k`, by the
/// Faddeev-LeVerrier recursion.
pub fn char_poly(a: &DMatrix<f64>) -> Vec<f64> {
    let n = a.nrows();
    // monic coefficients of det(tI - A): t^n + b[n-1] t^{n-1} + ... + b[0]
    let mut b = vec![0.0; n + 1];
    b[n] = 1.0;
    let mut mk = DMatrix::<f64>::zeros(n, n);
    let id = DMatrix::<f64>::identity(n, n);
    for k in 1..=n {
        mk = a * &mk + &id * b[n - k + 1];
        let am = a * &mk;
        b[n - k] = -am.trace() / k as f64;
    }
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    b.into_iter().map(|x| sign * x).collect()
}

/// Coefficients `c_0..c_n` of `prod (r_i - t)` for roots closed under
/// conjugation. Imaginary parts of the expansion are dropped.
pub fn poly_from_roots(roots: &[nalgebra::Complex<f64>]) -> Vec<f64> {
    let mut c = vec![nalgebra::Complex::new(1.0, 0.0)];
    for &r in roots {
        // multiply by (r - t)
        let mut next = vec![nalgebra::Complex::new(0.0, 0.0); c.len() + 1];
        for (k, &ck) in c.iter().enumerate() {
            next[k] += ck * r;
            next[k + 1] -= ck;
        }
        c = next;
    }
    c.into_iter().map(|z| z.re).collect()
}

/// Orthonormal basis of the null space of `a` (any shape), by thresholding
/// the eigenvalues of `a^T a` at `rel_tol` times the largest one.
pub fn null_space(a: &DMatrix<f64>, rel_tol: f64) -> DMatrix<f64> {
    let n = a.ncols();
    let ata = a.transpose() * a;
    let eig = ata.symmetric_eigen();
    let top = eig.eigenvalues.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let cols: Vec<usize> = (0..n)
        .filter(|&i| eig.eigenvalues[i] <= rel_tol * top.max(f64::MIN_POSITIVE))
        .collect();
    DMatrix::from_fn(n, cols.len(), |r, c| eig.eigenvectors[(r, cols[c])])
}
