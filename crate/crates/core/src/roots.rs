//! Reciprocal roots of the moving-average polynomial.
//!
//! Coefficients follow `X_t = Z_t + c_1 Z_{t-1} + ... + c_q Z_{t-q}`, so the
//! polynomial factors as `prod_j (1 - r_j B)` and an MA(1) has `c_1 = -theta`.
//! The reciprocal roots `r_j` are the zeros of the monic polynomial
//! `x^q + c_1 x^{q-1} + ... + c_q`.

use std::cmp::Ordering;

use nalgebra::DMatrix;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// An ordered collection of reciprocal roots.
///
/// The order is significant for the residual cascade (the first root is
/// inverted first) but not for the induced coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootSet<T = f64> {
    roots: Vec<Complex<T>>,
}

impl<T: Scalar> RootSet<T> {
    pub fn new(roots: Vec<Complex<T>>) -> Self {
        Self { roots }
    }

    pub fn real(roots: &[T]) -> Self {
        Self {
            roots: roots.iter().map(|&r| Complex::new(r, T::zero())).collect(),
        }
    }

    /// Conjugate pair `modulus * exp(+-i angle)`.
    pub fn conjugate_pair(modulus: T, angle: T) -> Self {
        let z = Complex::from_polar(modulus, angle);
        Self {
            roots: vec![z, z.conj()],
        }
    }

    pub fn roots(&self) -> &[Complex<T>] {
        &self.roots
    }

    pub fn order(&self) -> usize {
        self.roots.len()
    }

    pub fn max_modulus(&self) -> T {
        self.roots
            .iter()
            .map(|r| r.norm())
            .fold(T::zero(), |a, b| a.max(b))
    }

    pub fn is_real(&self) -> bool {
        self.roots.iter().all(|r| is_real_value(*r))
    }

    /// Whether every non-real root has a matching conjugate partner.
    pub fn is_conjugate_closed(&self) -> bool {
        let mut used = vec![false; self.roots.len()];
        for i in 0..self.roots.len() {
            if used[i] || is_real_value(self.roots[i]) {
                continue;
            }
            used[i] = true;
            let target = self.roots[i].conj();
            let partner = (0..self.roots.len()).find(|&j| {
                !used[j] && !is_real_value(self.roots[j]) && close(self.roots[j], target)
            });
            match partner {
                Some(j) => used[j] = true,
                None => return false,
            }
        }
        true
    }

    /// Roots as real numbers, when all of them are real.
    pub fn as_real(&self) -> Option<Vec<T>> {
        if self.is_real() {
            Some(self.roots.iter().map(|r| r.re).collect())
        } else {
            None
        }
    }

    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self {
            roots: perm.iter().map(|&i| self.roots[i]).collect(),
        }
    }

    /// Sorted by (modulus, argument).
    pub fn sorted(mut self) -> Self {
        self.roots.sort_by(|a, b| cmp_root(*a, *b));
        self
    }

    pub fn cast<U: Scalar>(&self) -> RootSet<U> {
        RootSet {
            roots: self
                .roots
                .iter()
                .map(|r| Complex::new(U::lit(r.re.to_f64_lossy()), U::lit(r.im.to_f64_lossy())))
                .collect(),
        }
    }
}

fn imag_tol<T: Scalar>(z: Complex<T>) -> T {
    T::tiny() * (T::one() + z.norm())
}

fn is_real_value<T: Scalar>(z: Complex<T>) -> bool {
    z.im.abs() <= imag_tol(z)
}

fn close<T: Scalar>(a: Complex<T>, b: Complex<T>) -> bool {
    let scale = T::one() + a.norm().max(b.norm());
    (a - b).norm() <= T::lit(1e3) * T::tiny() * scale
}

fn cmp_root<T: Scalar>(a: Complex<T>, b: Complex<T>) -> Ordering {
    let (ma, mb) = (a.norm(), b.norm());
    let tol = T::lit(1e-12) * (T::one() + ma.max(mb));
    if (ma - mb).abs() > tol {
        return ma.partial_cmp(&mb).unwrap_or(Ordering::Equal);
    }
    a.arg().partial_cmp(&b.arg()).unwrap_or(Ordering::Equal)
}

/// Expands `prod_j (1 - r_j B)` and returns `c_1..c_q`.
pub fn coeffs_from_roots<T: Scalar>(roots: &RootSet<T>) -> Result<Vec<T>> {
    if !roots.is_conjugate_closed() {
        return Err(Error::ComplexCoefficients);
    }
    // poly[k] is the coefficient of B^k
    let mut poly = vec![Complex::new(T::one(), T::zero())];
    for &r in roots.roots() {
        let mut next = poly.clone();
        next.push(Complex::new(T::zero(), T::zero()));
        for k in 0..poly.len() {
            next[k + 1] = next[k + 1] - r * poly[k];
        }
        poly = next;
    }
    let scale = roots
        .roots()
        .iter()
        .fold(T::one(), |acc, r| acc * (T::one() + r.norm()));
    let mut out = Vec::with_capacity(roots.order());
    for c in poly.into_iter().skip(1) {
        if c.im.abs() > T::lit(1e-9) * scale {
            return Err(Error::ComplexCoefficients);
        }
        out.push(c.re);
    }
    Ok(out)
}

/// Reciprocal roots of `1 + c_1 B + ... + c_q B^q`, sorted by (modulus, argument).
///
/// Orders one and two use closed forms; higher orders use the eigenvalues of
/// the companion matrix followed by a Newton polish.
pub fn roots_from_coeffs<T: Scalar>(coeffs: &[T]) -> RootSet<T> {
    let q = coeffs.len();
    let roots = match q {
        0 => Vec::new(),
        1 => vec![Complex::new(-coeffs[0], T::zero())],
        2 => quadratic_roots(coeffs[0], coeffs[1]).to_vec(),
        _ => companion_roots(coeffs),
    };
    RootSet::new(roots).sorted()
}

/// Roots of `x^2 + c1 x + c2`.
pub fn quadratic_roots<T: Scalar>(c1: T, c2: T) -> [Complex<T>; 2] {
    let two = T::lit(2.0);
    let disc = c1 * c1 - T::lit(4.0) * c2;
    if disc >= T::zero() {
        let s = disc.sqrt();
        // avoid cancellation: the larger-magnitude root first, the other from the product
        let big = if c1 >= T::zero() {
            (-c1 - s) / two
        } else {
            (-c1 + s) / two
        };
        let small = if big != T::zero() { c2 / big } else { T::zero() };
        [Complex::new(big, T::zero()), Complex::new(small, T::zero())]
    } else {
        let re = -c1 / two;
        let im = (-disc).sqrt() / two;
        [Complex::new(re, im), Complex::new(re, -im)]
    }
}

fn companion_roots<T: Scalar>(coeffs: &[T]) -> Vec<Complex<T>> {
    let q = coeffs.len();
    let mut m = DMatrix::<f64>::zeros(q, q);
    for j in 0..q {
        m[(0, j)] = -coeffs[j].to_f64_lossy();
    }
    for i in 1..q {
        m[(i, i - 1)] = 1.0;
    }
    let eig = m.complex_eigenvalues();
    let c64: Vec<f64> = coeffs.iter().map(|c| c.to_f64_lossy()).collect();
    let mut roots: Vec<Complex<f64>> = eig.iter().map(|&z| polish(&c64, z)).collect();
    enforce_conjugacy(&mut roots);
    roots
        .into_iter()
        .map(|z| Complex::new(T::lit(z.re), T::lit(z.im)))
        .collect()
}

fn eval_monic(coeffs: &[f64], z: Complex<f64>) -> (Complex<f64>, Complex<f64>) {
    let mut p = Complex::new(1.0, 0.0);
    let mut dp = Complex::new(0.0, 0.0);
    for &c in coeffs {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

fn polish(coeffs: &[f64], mut z: Complex<f64>) -> Complex<f64> {
    for _ in 0..3 {
        let (p, dp) = eval_monic(coeffs, z);
        if dp.norm() < 1e-14 {
            break;
        }
        let cand = z - p / dp;
        if eval_monic(coeffs, cand).0.norm() < p.norm() {
            z = cand;
        } else {
            break;
        }
    }
    z
}

fn enforce_conjugacy(roots: &mut [Complex<f64>]) {
    let n = roots.len();
    let mut done = vec![false; n];
    for i in 0..n {
        if done[i] {
            continue;
        }
        let z = roots[i];
        if z.im.abs() <= 1e-14 * (1.0 + z.norm()) {
            roots[i] = Complex::new(z.re, 0.0);
            done[i] = true;
            continue;
        }
        done[i] = true;
        let target = z.conj();
        let partner = (0..n)
            .filter(|&j| !done[j])
            .min_by(|&a, &b| {
                (roots[a] - target)
                    .norm()
                    .partial_cmp(&(roots[b] - target).norm())
                    .unwrap_or(Ordering::Equal)
            });
        if let Some(j) = partner {
            let avg = (z + roots[j].conj()) * 0.5;
            roots[i] = avg;
            roots[j] = avg.conj();
            done[j] = true;
        }
    }
}
