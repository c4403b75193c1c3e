//! Complex matrices held as separate real and imaginary parts.
//!
//! Real products use the optimised real kernels, which are much faster than
//! generic complex products at register sizes.

use nalgebra::DMatrix;

use crate::operator::{CMatrix, C64};

/// `re + i·im`.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Split {
    pub re: DMatrix<f64>,
    pub im: DMatrix<f64>,
}

impl Split {
    pub fn identity(dim: usize) -> Self {
        Self {
            re: DMatrix::identity(dim, dim),
            im: DMatrix::zeros(dim, dim),
        }
    }

    pub fn from_complex(m: &CMatrix) -> Self {
        Self {
            re: m.map(|z| z.re),
            im: m.map(|z| z.im),
        }
    }

    pub fn to_complex(&self) -> CMatrix {
        self.re.zip_map(&self.im, C64::new)
    }

    /// `self ← lhs · self`.
    pub fn left_mul(&mut self, lhs: &Split) {
        let re = &lhs.re * &self.re - &lhs.im * &self.im;
        let im = &lhs.re * &self.im + &lhs.im * &self.re;
        self.re = re;
        self.im = im;
    }

    /// `self ← (c − i s) · self`.
    fn left_mul_conj_pair(&mut self, c: &DMatrix<f64>, s: &DMatrix<f64>) {
        let re = c * &self.re + s * &self.im;
        let im = c * &self.im - s * &self.re;
        self.re = re;
        self.im = im;
    }

    /// `self ← exp(-i h t) · self` for real symmetric `h`.
    pub fn apply_real_exp(&mut self, h: &DMatrix<f64>, t: f64) {
        if is_diagonal(h) {
            for r in 0..h.nrows() {
                let (s, c) = (h[(r, r)] * t).sin_cos();
                for col in 0..self.re.ncols() {
                    let (a, b) = (self.re[(r, col)], self.im[(r, col)]);
                    self.re[(r, col)] = c * a + s * b;
                    self.im[(r, col)] = c * b - s * a;
                }
            }
        } else {
            let (c, s) = real_symmetric_exp(h, t);
            self.left_mul_conj_pair(&c, &s);
        }
    }
}

fn is_diagonal(m: &DMatrix<f64>) -> bool {
    let n = m.nrows();
    (0..n).all(|c| (0..n).all(|r| r == c || m[(r, c)] == 0.0))
}

fn one_norm(m: &DMatrix<f64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Largest `‖Ht‖₁` evaluated by the series without squaring.
const SERIES_RADIUS: f64 = 0.5;

/// `(C, S)` with `exp(-i h t) = C − i S` for real symmetric `h`.
///
/// Even and odd Taylor parts are evaluated as degree-7 polynomials in
/// `(ht)²` by Paterson–Stockmeyer; the truncation error at the series radius
/// is below `1e-18`. Larger arguments are scaled down and squared back up.
pub(crate) fn real_symmetric_exp(h: &DMatrix<f64>, t: f64) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = h.nrows();
    let norm = one_norm(h) * t.abs();
    let squarings = if norm > SERIES_RADIUS {
        (norm / SERIES_RADIUS).log2().ceil() as u32
    } else {
        0
    };
    let x = h * (t / 2f64.powi(squarings as i32));
    let p = &x * &x;
    let p2 = &p * &p;
    let p3 = &p2 * &p;
    let id = DMatrix::<f64>::identity(n, n);

    // Coefficients of P^m in cos and sin(x)/x: (−1)^m/(2m)! and (−1)^m/(2m+1)!.
    let mut cos_c = [0.0; 8];
    let mut sin_c = [0.0; 8];
    let mut fact = 1.0;
    for k in 0..16u32 {
        if k > 0 {
            fact *= f64::from(k);
        }
        let m = (k / 2) as usize;
        let sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            cos_c[m] = sign / fact;
        } else {
            sin_c[m] = sign / fact;
        }
    }
    let poly = |a: &[f64; 8]| {
        let block = |k: usize| {
            let mut b = &id * a[k] + &p * a[k + 1];
            if k + 2 < 8 {
                b += &p2 * a[k + 2];
            }
            b
        };
        // a0..a2 + P³(a3..a5 + P³(a6, a7))
        let inner = block(3) + &p3 * block(6);
        block(0) + &p3 * inner
    };
    let mut c = poly(&cos_c);
    let mut s = &x * poly(&sin_c);
    for _ in 0..squarings {
        let c2 = &c * &c - &s * &s;
        let s2 = &c * &s + &s * &c;
        c = c2;
        s = s2;
    }
    (c, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::expm_hermitian;

    fn sym(n: usize, seed: u64) -> DMatrix<f64> {
        let mut state = seed;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let m = DMatrix::from_fn(n, n, |_, _| next());
        &m + m.transpose()
    }

    #[test]
    fn series_matches_spectral_exponential() {
        for (seed, t) in [(1, 0.05), (2, 0.3), (3, 2.0), (4, 40.0)] {
            let h = sym(8, seed);
            let (c, s) = real_symmetric_exp(&h, t);
            let got = c.zip_map(&s, |a, b| C64::new(a, -b));
            let want = expm_hermitian(&h.map(|x| C64::new(x, 0.0)), t);
            let err = (got - want).iter().fold(0.0f64, |a, z| a.max(z.norm()));
            assert!(err < 1e-12, "t = {t}: {err}");
        }
    }

    #[test]
    fn split_products_match_complex_products() {
        let a = sym(4, 5).map(|x| C64::new(x, 0.3 * x));
        let b = sym(4, 6).map(|x| C64::new(-x, 0.7));
        let mut s = Split::from_complex(&b);
        s.left_mul(&Split::from_complex(&a));
        let err = (s.to_complex() - &a * &b).iter().fold(0.0f64, |m, z| m.max(z.norm()));
        assert!(err < 1e-14);

        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, -2.0, 0.5, 3.0]));
        let mut s = Split::from_complex(&b);
        s.apply_real_exp(&d, 0.7);
        let want = expm_hermitian(&d.map(|x| C64::new(x, 0.0)), 0.7) * &b;
        let err = (s.to_complex() - want).iter().fold(0.0f64, |m, z| m.max(z.norm()));
        assert!(err < 1e-14);
    }
}
