//! 2×2 complex matrix realizations of SL(2,ℂ): the Iwasawa factorization
//! `G = UB`, the Gauss factorization `G ≐ N⁻TN`, and a matrix-level oracle for
//! the tilde coordinates of a chain.
//!
//! Nothing here uses the closed-form coordinate recursion in [`crate::coords`];
//! the oracle threads positive diagonal parts through explicit factorizations.

use num_complex::Complex64;
use rand::Rng;

use crate::chain::ChainSpec;
use crate::error::{Error, Result};

/// Determinant tolerance for [`Mat2::new`].
pub const UNIMODULAR_TOL: f64 = 1e-12;

/// Threshold below which the upper-left entry counts as zero in [`gauss`].
pub const AT_INFINITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl Mat2 {
    /// Matrix `(a, b; c, d)` with `|ad − bc − 1| ≤ 1e-12`.
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        let m = Self { a, b, c, d };
        let det = m.det();
        if (det - 1.0).norm() > UNIMODULAR_TOL {
            return Err(Error::NotUnimodular(format!("{det}")));
        }
        Ok(m)
    }

    /// Scales an invertible matrix by `det^{-1/2}`.
    pub fn renormalized(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        let det = a * d - b * c;
        if det.norm() < 1e-300 {
            return Err(Error::NotUnimodular(format!("{det}")));
        }
        let s = det.sqrt().inv();
        Ok(Self { a: a * s, b: b * s, c: c * s, d: d * s })
    }

    pub fn identity() -> Self {
        Self::raw(1.0.into(), 0.0.into(), 0.0.into(), 1.0.into())
    }

    /// The representative `(0, −1; 1, 0)` of the reflection `s`.
    pub fn reflection() -> Self {
        Self::raw(0.0.into(), (-1.0).into(), 1.0.into(), 0.0.into())
    }

    /// `e^{z E_{−α}} = (1, 0; z, 1)`.
    pub fn lower(z: Complex64) -> Self {
        Self::raw(1.0.into(), 0.0.into(), z, 1.0.into())
    }

    /// `e^{z E_α} = (1, z; 0, 1)`.
    pub fn upper(z: Complex64) -> Self {
        Self::raw(1.0.into(), z, 0.0.into(), 1.0.into())
    }

    /// `diag(t, 1/t)`.
    pub fn diag(t: Complex64) -> Self {
        Self::raw(t, 0.0.into(), 0.0.into(), t.inv())
    }

    fn raw(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Self { a, b, c, d }
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn adjoint(&self) -> Self {
        Self::raw(self.a.conj(), self.c.conj(), self.b.conj(), self.d.conj())
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::raw(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }

    /// Entrywise max-norm of `self − o`.
    pub fn dist(&self, o: &Self) -> f64 {
        [self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d]
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Random unimodular matrix with entries of order `scale`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, scale: f64) -> Self {
        loop {
            let mut z = || Complex64::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale));
            let (a, b, c, d) = (z(), z(), z(), z());
            if (a * d - b * c).norm() > 1e-3 * scale * scale {
                return Self::renormalized(a, b, c, d).expect("checked invertible");
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IwasawaParts {
    /// Special unitary factor.
    pub u: Mat2,
    /// Positive T-component `t` of `diag(t, 1/t)`.
    pub t: f64,
    /// Upper unipotent parameter.
    pub n: Complex64,
}

impl IwasawaParts {
    pub fn reconstruct(&self) -> Mat2 {
        self.u.mul(&Mat2::diag(self.t.into())).mul(&Mat2::upper(self.n))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussParts {
    /// Lower unipotent parameter (the N⁻ component).
    pub v: Complex64,
    /// T-component `t` of `diag(t, 1/t)`.
    pub t: Complex64,
    pub n: Complex64,
}

impl GaussParts {
    pub fn reconstruct(&self) -> Mat2 {
        Mat2::lower(self.v).mul(&Mat2::diag(self.t)).mul(&Mat2::upper(self.n))
    }
}

/// `g = u · diag(t, 1/t) · (1, n; 0, 1)` with `u ∈ SU(2)` and `t > 0`, by
/// Gram–Schmidt on the columns of `g`.
pub fn iwasawa(g: &Mat2) -> IwasawaParts {
    let t = (g.a.norm_sqr() + g.c.norm_sqr()).sqrt();
    let (p, q) = (g.a / t, g.c / t);
    let u = Mat2::raw(p, -q.conj(), q, p.conj());
    // b = u* g is upper triangular with diagonal (t, 1/t)
    let b12 = p.conj() * g.b + q.conj() * g.d;
    IwasawaParts { u, t, n: b12 / t }
}

/// `g = (1, 0; v, 1) · diag(t, 1/t) · (1, n; 0, 1)`, defined off `g·B = ξ_∞`.
pub fn gauss(g: &Mat2) -> Result<GaussParts> {
    if g.a.norm() < AT_INFINITY_TOL {
        return Err(Error::AtInfinity);
    }
    Ok(GaussParts { v: g.c / g.a, t: g.a, n: g.b / g.a })
}

/// Distance between the Iwasawa T-component of `diag(a, 1/a)·e^{z E_{−α}}` and
/// the prediction `a·(1 + (a^{−2}|z|)²)^{1/2}`.
pub fn iwasawa_t_residual(a: f64, z: Complex64) -> f64 {
    let g = Mat2::diag(a.into()).mul(&Mat2::lower(z));
    let computed = iwasawa(&g).t;
    let r = z.norm() / (a * a);
    let predicted = a * (1.0 + r * r).sqrt();
    (computed - predicted).abs()
}

/// Tilde coordinates `z̃` of the chain point with affine coordinates `z`,
/// computed by walking the stages from the outermost (index ℓ) inwards.
///
/// At each stage the positive diagonal parts produced so far act on the next
/// unipotent factor through the twist integers, `diag(s, 1/s)` with
/// `s = ∏_{k>j} t_k^{c_kj/2}`; the stage's own T-component is what Iwasawa
/// returns beyond `s`, and `z̃_j` is read off the Gauss N⁻ component.
pub fn chain_tilde_oracle(spec: &ChainSpec, z: &[Complex64]) -> Result<Vec<Complex64>> {
    let ell = spec.ell();
    if z.len() != ell {
        return Err(Error::DimensionMismatch { expected: ell, got: z.len() });
    }
    let mut own_t = vec![1.0f64; ell];
    let mut z_tilde = vec![Complex64::new(0.0, 0.0); ell];
    for j in (0..ell).rev() {
        let log_s: f64 = (j + 1..ell).map(|k| 0.5 * spec.c(k, j) * own_t[k].ln()).sum();
        let s = log_s.exp();
        let g = Mat2::diag(s.into()).mul(&Mat2::lower(-z[j]));
        let v = gauss(&g)?.v;
        z_tilde[j] = -v;
        own_t[j] = iwasawa(&g).t / s;
    }
    Ok(z_tilde)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn iwasawa_identity() {
        let p = iwasawa(&Mat2::identity());
        assert!(p.u.dist(&Mat2::identity()) < 1e-15);
        assert_eq!(p.t, 1.0);
        assert!(p.n.norm() < 1e-15);
    }

    #[test]
    fn iwasawa_lower_unipotent() {
        let p = iwasawa(&Mat2::lower(c(1.0, 0.0)));
        assert!((p.t - 2f64.sqrt()).abs() < 1e-12);
        assert!((p.t - 1.41421356).abs() < 1e-8);
        assert!(p.reconstruct().dist(&Mat2::lower(c(1.0, 0.0))) < 1e-12);
    }

    #[test]
    fn iwasawa_positive_diagonal() {
        let p = iwasawa(&Mat2::diag(c(3.0, 0.0)));
        assert!(p.u.dist(&Mat2::identity()) < 1e-15);
        assert!((p.t - 3.0).abs() < 1e-15);
        assert!(p.n.norm() < 1e-15);
    }

    #[test]
    fn gauss_cases() {
        let p = gauss(&Mat2::identity()).unwrap();
        assert_eq!((p.v, p.t, p.n), (c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)));
        let z = c(0.3, -1.2);
        let p = gauss(&Mat2::lower(z)).unwrap();
        assert_eq!(p.v, z);
        assert_eq!(p.t, c(1.0, 0.0));
        assert_eq!(gauss(&Mat2::reflection()), Err(Error::AtInfinity));
        assert!(Error::AtInfinity.to_string().contains("ξ_∞"));
    }

    #[test]
    fn factorization_residuals() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let g = Mat2::random(&mut rng, 2.0);
            assert!((g.det() - 1.0).norm() < UNIMODULAR_TOL);
            let p = iwasawa(&g);
            assert!(p.t > 0.0);
            assert!(p.reconstruct().dist(&g) <= 1e-10);
            assert!(p.u.adjoint().mul(&p.u).dist(&Mat2::identity()) <= 1e-10);
            assert!((p.u.det() - 1.0).norm() <= 1e-10);
            let q = gauss(&g).unwrap();
            assert!(q.reconstruct().dist(&g) <= 1e-10);
        }
    }

    #[test]
    fn unimodular_check() {
        assert!(Mat2::new(c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)).is_err());
        assert!(Mat2::new(c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.5, 0.0)).is_ok());
        let m = Mat2::renormalized(c(2.0, 1.0), c(1.0, 0.0), c(0.0, 3.0), c(1.0, -1.0)).unwrap();
        assert!((m.det() - 1.0).norm() < 1e-14);
    }

    #[test]
    fn iwasawa_t_examples() {
        assert_eq!(iwasawa_t_residual(1.0, c(0.0, 0.0)), 0.0);
        for r in [0.1, 1.0, 3.7] {
            assert!(iwasawa_t_residual(1.0, c(r, 0.0)) < 1e-10);
            let t = iwasawa(&Mat2::lower(c(r, 0.0))).t;
            assert!((t - (1.0 + r * r).sqrt()).abs() < 1e-12);
        }
        assert!(iwasawa_t_residual(2.0, c(1.0, 1.0)) < 1e-10);
    }

    #[test]
    fn oracle_small_chains() {
        let z = [c(0.4, 1.1)];
        let spec = ChainSpec::product(vec![2]).unwrap();
        let zt = chain_tilde_oracle(&spec, &z).unwrap();
        assert!((zt[0] - z[0]).norm() < 1e-14);

        let z = [c(1.0, 0.5), c(-0.3, 2.0)];
        let spec = ChainSpec::product(vec![2, 2]).unwrap();
        let zt = chain_tilde_oracle(&spec, &z).unwrap();
        assert!((zt[0] - z[0]).norm() < 1e-14 && (zt[1] - z[1]).norm() < 1e-14);

        let spec = ChainSpec::new(vec![3, 5], [(2, 1, 1)]).unwrap();
        let zt = chain_tilde_oracle(&spec, &[c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!((zt[0].norm() - 0.5f64.sqrt()).abs() < 1e-12);
        assert!((zt[0].norm() - 0.70710678).abs() < 1e-8);
        assert!((zt[1] - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn oracle_preserves_phases() {
        let spec = ChainSpec::new(vec![1, 2, 3], [(2, 1, 2), (3, 1, -1), (3, 2, 3)]).unwrap();
        let z = [Complex64::from_polar(0.7, 0.3), Complex64::from_polar(2.0, -2.1), Complex64::from_polar(0.1, 1.0)];
        let zt = chain_tilde_oracle(&spec, &z).unwrap();
        for (a, b) in z.iter().zip(&zt) {
            assert!((a.arg() - b.arg()).abs() < 1e-12);
        }
    }

    #[test]
    fn oracle_dimension_check() {
        let spec = ChainSpec::product(vec![1, 1]).unwrap();
        assert!(matches!(chain_tilde_oracle(&spec, &[c(1.0, 0.0)]), Err(Error::DimensionMismatch { .. })));
    }
}
