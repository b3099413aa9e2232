//! 2×2 complex matrices, their exponentials, and Gauss–Legendre nodes.

use num_complex::Complex;

use crate::scalar::{c, Real};

pub type Mat2<T> = [[Complex<T>; 2]; 2];
pub type Row2<T> = [Complex<T>; 2];

pub fn zero<T: Real>() -> Mat2<T> {
    [[Complex::new(T::zero(), T::zero()); 2]; 2]
}

pub fn identity<T: Real>() -> Mat2<T> {
    let (o, z) = (Complex::new(T::one(), T::zero()), Complex::new(T::zero(), T::zero()));
    [[o, z], [z, o]]
}

pub fn scale<T: Real>(a: &Mat2<T>, s: Complex<T>) -> Mat2<T> {
    [[a[0][0] * s, a[0][1] * s], [a[1][0] * s, a[1][1] * s]]
}

pub fn add<T: Real>(a: &Mat2<T>, b: &Mat2<T>) -> Mat2<T> {
    [[a[0][0] + b[0][0], a[0][1] + b[0][1]], [a[1][0] + b[1][0], a[1][1] + b[1][1]]]
}

pub fn matmul<T: Real>(a: &Mat2<T>, b: &Mat2<T>) -> Mat2<T> {
    let mut out = zero();
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// A·x for a column vector.
pub fn apply<T: Real>(a: &Mat2<T>, x: &Row2<T>) -> Row2<T> {
    [a[0][0] * x[0] + a[0][1] * x[1], a[1][0] * x[0] + a[1][1] * x[1]]
}

/// x·A for a row vector.
pub fn row_apply<T: Real>(x: &Row2<T>, a: &Mat2<T>) -> Row2<T> {
    [x[0] * a[0][0] + x[1] * a[1][0], x[0] * a[0][1] + x[1] * a[1][1]]
}

pub fn dot<T: Real>(x: &Row2<T>, y: &Row2<T>) -> Complex<T> {
    x[0] * y[0] + x[1] * y[1]
}

/// Eigenvalues m ± δ with m = tr/2 and δ² = ((a − d)/2)² + bc.
pub fn eigenvalues<T: Real>(a: &Mat2<T>) -> (Complex<T>, Complex<T>) {
    let half = c::<T>(0.5);
    let m = (a[0][0] + a[1][1]) * half;
    let d = (((a[0][0] - a[1][1]) * half).powi(2) + a[0][1] * a[1][0]).sqrt();
    (m + d, m - d)
}

/// e^{At} = e^{mt}[cosh(δt) I + t sinhc(δt) (A − mI)], with series near δt = 0.
pub fn expm<T: Real>(a: &Mat2<T>, t: T) -> Mat2<T> {
    let half = c::<T>(0.5);
    let m = (a[0][0] + a[1][1]) * half;
    let d2 = ((a[0][0] - a[1][1]) * half).powi(2) + a[0][1] * a[1][0];
    let z2 = d2 * t * t;
    let (ch, shc) = if z2.norm() < c(1e-6) {
        let z4 = z2 * z2;
        (
            Complex::from(T::one()) + z2 * half + z4 / c::<T>(24.0),
            Complex::from(T::one()) + z2 / c::<T>(6.0) + z4 / c::<T>(120.0),
        )
    } else {
        let z = z2.sqrt();
        (z.cosh(), z.sinh() / z)
    };
    let n = add(a, &scale(&identity(), -m));
    let body = add(&scale(&identity(), ch), &scale(&n, shc * t));
    scale(&body, (m * t).exp())
}

/// Nodes and weights of the n-point Gauss–Legendre rule on [−1, 1].
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let step = p1 / dp;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}
