//! Scalar polynomials and their roots.
//!
//! Roots are eigenvalues of a balanced companion matrix, computed by
//! single-shift complex QR iteration on the (already Hessenberg) companion
//! form, then polished by guarded Newton steps on the original coefficients.

use serde::{Deserialize, Serialize};

use super::matrix::C64;
use crate::error::{Error, Result};

/// Polynomial with complex coefficients in ascending power order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarPolynomial {
    coefficients: Vec<C64>,
}

impl ScalarPolynomial {
    /// `coefficients[i]` multiplies `λ^i`; grade is `coefficients.len() - 1`.
    pub fn new(coefficients: Vec<C64>) -> Self {
        assert!(!coefficients.is_empty(), "a polynomial needs at least one coefficient");
        Self { coefficients }
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[C64]) -> Self {
        let mut c = vec![C64::new(1.0, 0.0)];
        for &r in roots {
            let mut next = vec![C64::new(0.0, 0.0); c.len() + 1];
            for (i, &a) in c.iter().enumerate() {
                next[i + 1] += a;
                next[i] -= a * r;
            }
            c = next;
        }
        Self::new(c)
    }

    pub fn coefficients(&self) -> &[C64] {
        &self.coefficients
    }

    pub fn grade(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// Index of the highest nonzero coefficient, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coefficients.iter().rposition(|z| z.norm() != 0.0)
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.coefficients
            .iter()
            .rev()
            .fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Value and first derivative by Horner's scheme.
    pub fn eval_with_derivative(&self, z: C64) -> (C64, C64) {
        let mut p = C64::new(0.0, 0.0);
        let mut dp = C64::new(0.0, 0.0);
        for &c in self.coefficients.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    pub fn norm(&self) -> f64 {
        self.coefficients.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Coefficient list reversed (`λ^grade p(1/λ)`).
    pub fn reversed(&self) -> Self {
        Self::new(self.coefficients.iter().rev().copied().collect())
    }
}

/// All `deg(p)` roots of `p`, trailing zero coefficients returned as exact zero roots.
pub fn poly_roots(p: &ScalarPolynomial) -> Result<Vec<C64>> {
    let c = p.coefficients();
    if c.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidInput("polynomial has non-finite coefficients".into()));
    }
    let Some(deg) = p.degree() else {
        return Err(Error::InvalidInput("the zero polynomial has no well-defined roots".into()));
    };
    let low = c.iter().position(|z| z.norm() != 0.0).unwrap_or(0);
    let mut roots = vec![C64::new(0.0, 0.0); low];
    let core = &c[low..=deg];
    let d = core.len() - 1;
    if d == 0 {
        return Ok(roots);
    }

    // λ = s μ with s chosen so the constant and leading terms balance.
    let s = (core[0].norm() / core[d].norm()).powf(1.0 / d as f64);
    let s = if s.is_finite() && s > 0.0 { s } else { 1.0 };
    let lead = core[d] * s.powi(d as i32);
    let monic: Vec<C64> = core
        .iter()
        .enumerate()
        .map(|(i, &a)| a * s.powi(i as i32) / lead)
        .collect();

    let mut h = companion(&monic);
    balance(&mut h, d);
    let mu = hessenberg_eigenvalues(&mut h, d)?;

    let trimmed = ScalarPolynomial::new(core.to_vec());
    for m in mu {
        roots.push(polish(&trimmed, m * s));
    }
    Ok(roots)
}

/// Frobenius companion matrix of a monic polynomial, stored row-major d×d.
fn companion(monic: &[C64]) -> Vec<C64> {
    let d = monic.len() - 1;
    let mut h = vec![C64::new(0.0, 0.0); d * d];
    for i in 1..d {
        h[i * d + i - 1] = C64::new(1.0, 0.0);
    }
    for i in 0..d {
        h[i * d + d - 1] = -monic[i];
    }
    h
}

/// Parlett–Reinsch diagonal balancing by powers of two.
fn balance(h: &mut [C64], n: usize) {
    const RADIX: f64 = 2.0;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 0..n {
                if j != i {
                    c += h[j * n + i].l1_norm();
                    r += h[i * n + j].l1_norm();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let total = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= RADIX * RADIX;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= RADIX * RADIX;
            }
            if (c + r) / f < 0.95 * total {
                done = false;
                let inv = 1.0 / f;
                for j in 0..n {
                    h[i * n + j] *= inv;
                }
                for j in 0..n {
                    h[j * n + i] *= f;
                }
            }
        }
    }
}

/// Eigenvalues of an upper Hessenberg matrix by explicit single-shift QR.
fn hessenberg_eigenvalues(h: &mut [C64], n: usize) -> Result<Vec<C64>> {
    let zero = C64::new(0.0, 0.0);
    let at = |i: usize, j: usize| i * n + j;
    let mut eig = Vec::with_capacity(n);
    let mut hi = n as isize - 1;
    let mut iter = 0usize;
    let mut rots: Vec<(C64, C64)> = Vec::with_capacity(n);
    while hi >= 0 {
        let hu = hi as usize;
        if hu == 0 {
            eig.push(h[at(0, 0)]);
            break;
        }
        // Find the start of the unreduced block ending at `hu`.
        let mut lo = hu;
        while lo > 0 {
            let sub = h[at(lo, lo - 1)].l1_norm();
            let diag = h[at(lo - 1, lo - 1)].l1_norm() + h[at(lo, lo)].l1_norm();
            if sub <= f64::EPSILON * diag || sub < f64::MIN_POSITIVE {
                h[at(lo, lo - 1)] = zero;
                break;
            }
            lo -= 1;
        }
        if lo == hu {
            eig.push(h[at(hu, hu)]);
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        if iter > 60 * n.max(10) {
            return Err(Error::NumericalFailure("QR iteration on the companion matrix did not converge".into()));
        }

        let a = h[at(hu - 1, hu - 1)];
        let b = h[at(hu - 1, hu)];
        let c = h[at(hu, hu - 1)];
        let d = h[at(hu, hu)];
        let shift = if iter % 11 == 10 {
            // exceptional shift
            d + C64::new(0.75 * c.norm(), 0.4 * c.norm())
        } else {
            let half_tr = (a + d) * 0.5;
            let disc = ((a - d) * 0.5 * (a - d) * 0.5 + b * c).sqrt();
            let e1 = half_tr + disc;
            let e2 = half_tr - disc;
            if (e1 - d).norm() <= (e2 - d).norm() {
                e1
            } else {
                e2
            }
        };

        for i in lo..=hu {
            h[at(i, i)] -= shift;
        }
        rots.clear();
        for j in lo..hu {
            let x = h[at(j, j)];
            let y = h[at(j + 1, j)];
            let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
            let (cs, sn) = if r == 0.0 {
                (C64::new(1.0, 0.0), zero)
            } else {
                (x / r, y / r)
            };
            for col in j..=hu {
                let u = h[at(j, col)];
                let v = h[at(j + 1, col)];
                h[at(j, col)] = cs.conj() * u + sn.conj() * v;
                h[at(j + 1, col)] = -sn * u + cs * v;
            }
            rots.push((cs, sn));
        }
        for (off, &(cs, sn)) in rots.iter().enumerate() {
            let j = lo + off;
            for row in lo..=(j + 1).min(hu) {
                let u = h[at(row, j)];
                let v = h[at(row, j + 1)];
                h[at(row, j)] = u * cs + v * sn;
                h[at(row, j + 1)] = -u * sn.conj() + v * cs.conj();
            }
        }
        for i in lo..=hu {
            h[at(i, i)] += shift;
        }
    }
    Ok(eig)
}

/// Newton steps on `p`, each accepted only if it decreases |p|.
fn polish(p: &ScalarPolynomial, mut z: C64) -> C64 {
    let (mut val, _) = p.eval_with_derivative(z);
    for _ in 0..8 {
        let (_, dp) = p.eval_with_derivative(z);
        if dp.norm() == 0.0 || val.norm() == 0.0 {
            break;
        }
        let cand = z - val / dp;
        let cv = p.eval(cand);
        if cv.norm() < val.norm() {
            z = cand;
            val = cv;
        } else {
            break;
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sorted(mut v: Vec<C64>) -> Vec<C64> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    #[test]
    fn quadratic_real_roots() {
        let p = ScalarPolynomial::new(vec![c(2.0, 0.0), c(-3.0, 0.0), c(1.0, 0.0)]);
        let r = sorted(poly_roots(&p).unwrap());
        assert!((r[0] - c(1.0, 0.0)).norm() < 1e-14);
        assert!((r[1] - c(2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn quadratic_imaginary_roots() {
        let p = ScalarPolynomial::new(vec![c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let r = sorted(poly_roots(&p).unwrap());
        assert!((r[0] - c(0.0, -1.0)).norm() < 1e-14);
        assert!((r[1] - c(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn degree_eight_integer_roots() {
        let want: Vec<C64> = (1..=8).map(|k| c(k as f64, 0.0)).collect();
        let p = ScalarPolynomial::from_roots(&want);
        let got = sorted(poly_roots(&p).unwrap());
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).norm() < 1e-8, "{g} vs {w}");
        }
    }

    #[test]
    fn leading_and_trailing_zeros() {
        // 0 + 0 λ + 2 λ² - 2 λ³ + 0 λ⁴ : roots {0, 0, 1}
        let p = ScalarPolynomial::new(vec![c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0), c(-2.0, 0.0), c(0.0, 0.0)]);
        let r = sorted(poly_roots(&p).unwrap());
        assert_eq!(r.len(), 3);
        assert_eq!(r[0], c(0.0, 0.0));
        assert_eq!(r[1], c(0.0, 0.0));
        assert!((r[2] - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn constant_has_no_roots() {
        let p = ScalarPolynomial::new(vec![c(3.0, 0.0), c(0.0, 0.0)]);
        assert!(poly_roots(&p).unwrap().is_empty());
    }

    #[test]
    fn zero_polynomial_is_rejected() {
        let p = ScalarPolynomial::new(vec![c(0.0, 0.0); 3]);
        assert!(matches!(poly_roots(&p), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn widely_scaled_roots() {
        let want = [c(1e-6, 2e-6), c(1e-6, -2e-6), c(3e5, 0.0)];
        let p = ScalarPolynomial::from_roots(&want);
        let got = poly_roots(&p).unwrap();
        for w in want {
            let best = got.iter().map(|g| (g - w).norm() / w.norm()).fold(f64::INFINITY, f64::min);
            assert!(best < 1e-9, "{w}: {best}");
        }
    }
}
