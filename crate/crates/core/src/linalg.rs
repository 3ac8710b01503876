//! Small dense helpers on `&[T]` vectors of ambient dimension `n`.

use crate::scalar::Real;

#[inline]
pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

#[inline]
pub fn norm_sq<T: Real>(a: &[T]) -> T {
    dot(a, a)
}

#[inline]
pub fn norm<T: Real>(a: &[T]) -> T {
    norm_sq(a).sqrt()
}

pub fn sub<T: Real>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x - y).collect()
}

pub fn add<T: Real>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x + y).collect()
}

pub fn scale<T: Real>(s: T, a: &[T]) -> Vec<T> {
    a.iter().map(|&x| s * x).collect()
}

/// `y += s * x`
#[inline]
pub fn axpy<T: Real>(s: T, x: &[T], y: &mut [T]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi = *yi + s * xi;
    }
}

/// Standard basis vector `e_k` (zero based) of dimension `n`.
pub fn basis<T: Real>(n: usize, k: usize) -> Vec<T> {
    let mut e = vec![T::zero(); n];
    e[k] = T::one();
    e
}

pub fn sup_norm<T: Real>(a: &[T]) -> T {
    a.iter().fold(T::zero(), |m, &x| m.max(x.abs()))
}

/// Symmetric 2x2 matrix `[[a, b], [b, c]]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sym2<T> {
    pub a: T,
    pub b: T,
    pub c: T,
}

impl<T: Real> Sym2<T> {
    pub fn new(a: T, b: T, c: T) -> Self {
        Self { a, b, c }
    }

    pub fn det(&self) -> T {
        self.a * self.c - self.b * self.b
    }

    pub fn trace(&self) -> T {
        self.a + self.c
    }

    /// Principal square root of a positive definite matrix,
    /// `(M + sqrt(det) I) / sqrt(tr + 2 sqrt(det))`.
    pub fn sqrt_spd(&self) -> Self {
        let s = self.det().sqrt();
        let t = (self.trace() + s + s).sqrt();
        Self::new((self.a + s) / t, self.b / t, (self.c + s) / t)
    }

    pub fn inverse(&self) -> Self {
        let d = self.det();
        Self::new(self.c / d, -self.b / d, self.a / d)
    }

    /// `self * m * self`, symmetric whenever `m` is.
    pub fn congruence(&self, m: &Self) -> Self {
        // P = self * m
        let p11 = self.a * m.a + self.b * m.b;
        let p12 = self.a * m.b + self.b * m.c;
        let p21 = self.b * m.a + self.c * m.b;
        let p22 = self.b * m.b + self.c * m.c;
        let a = p11 * self.a + p12 * self.b;
        let c = p21 * self.b + p22 * self.c;
        let b12 = p11 * self.b + p12 * self.c;
        let b21 = p21 * self.a + p22 * self.b;
        Self::new(a, (b12 + b21) / (T::one() + T::one()), c)
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> (T, T) {
        let two = T::one() + T::one();
        let mean = (self.a + self.c) / two;
        let half_gap = (self.a - self.c) / two;
        let r = half_gap.hypot(self.b);
        (mean + r, mean - r)
    }
}
