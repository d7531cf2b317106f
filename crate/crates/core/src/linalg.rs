//! Small dense symmetric solves (dimension = number of linear parameters).

use crate::scalar::Scalar;

/// Lower Cholesky factor of the row-major `n x n` matrix `a`, or `None` if a
/// pivot is not positive relative to the diagonal scale.
pub fn cholesky<T: Scalar>(a: &[T], n: usize) -> Option<Vec<T>> {
    let scale = (0..n).map(|i| a[i * n + i].abs()).fold(T::zero(), T::max);
    if scale <= T::zero() {
        return None;
    }
    let floor = scale * T::epsilon() * T::lit(64.0);
    let mut l = vec![T::zero(); n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i * n + j];
            for k in 0..j {
                s = s - l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if s <= floor {
                    return None;
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    Some(l)
}

/// Cholesky with a relative diagonal jitter of `1e-12` retried once when the
/// plain factorization fails. Returns the factor and whether jitter was used.
pub fn cholesky_jittered<T: Scalar>(a: &[T], n: usize) -> Option<(Vec<T>, bool)> {
    if let Some(l) = cholesky(a, n) {
        return Some((l, false));
    }
    let trace = (0..n).map(|i| a[i * n + i]).fold(T::zero(), |x, y| x + y);
    if !(trace > T::zero()) {
        return None;
    }
    let jitter = T::lit(1e-12) * trace / T::lit(n as f64);
    let mut b = a.to_vec();
    for i in 0..n {
        b[i * n + i] = b[i * n + i] + jitter;
    }
    cholesky(&b, n).map(|l| (l, true))
}

/// Solves `L L' x = b`.
pub fn cholesky_solve<T: Scalar>(l: &[T], n: usize, b: &[T]) -> Vec<T> {
    let mut y = b.to_vec();
    for i in 0..n {
        let mut s = y[i];
        for k in 0..i {
            s = s - l[i * n + k] * y[k];
        }
        y[i] = s / l[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in i + 1..n {
            s = s - l[k * n + i] * y[k];
        }
        y[i] = s / l[i * n + i];
    }
    y
}

/// `log det(L L')`.
pub fn cholesky_logdet<T: Scalar>(l: &[T], n: usize) -> T {
    (0..n).fold(T::zero(), |acc, i| acc + l[i * n + i].ln()) * T::lit(2.0)
}

/// Leading `k x k` block of a row-major `n x n` matrix.
pub fn leading_block<T: Scalar>(a: &[T], n: usize, k: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(k * k);
    for i in 0..k {
        out.extend_from_slice(&a[i * n..i * n + k]);
    }
    out
}
