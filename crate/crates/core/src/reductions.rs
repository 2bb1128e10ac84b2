//! Translation (`ξ = α·x`) and rotation (`r = Σ εᵢxᵢ²`) ansätze.
//!
//! Under either ansatz the Schouten endomorphism has one eigenvalue `θ` of
//! multiplicity `n−1` and one simple eigenvalue `μ`, so
//! `σ_k = C(n−1,k)·θᵏ + C(n−1,k−1)·θ^{k−1}μ` and the soliton equation
//! collapses to two ODEs: the potential equation `f'' + 2f'φ'/φ = 0` (`r1`)
//! and a curvature equation (`r2`).

use std::sync::Arc;

use num::rational::Ratio;
use num::{BigInt, BigRational, Zero};

use crate::error::{Error, Result};
use crate::field::{Profile, ScalarField, Signature, SolitonSpec};

fn factorial(n: usize) -> i64 {
    (1..=n as i64).product()
}

fn check_nk(n: usize, k: usize) {
    assert!(
        n >= 2 && (1..=n).contains(&k),
        "need 1 <= k <= n, n >= 2 (n={n}, k={k})"
    );
}

/// `b_{n,k} = (n−1)!/(k!(n−k)!) · (−1)^{k−1} · 2^{1−k}` as an exact rational.
pub fn b_nk_exact(n: usize, k: usize) -> Ratio<i64> {
    check_nk(n, k);
    let sign = if k % 2 == 1 { 1 } else { -1 };
    Ratio::new(
        sign * factorial(n - 1),
        factorial(k) * factorial(n - k) * (1i64 << (k - 1)),
    )
}

pub fn b_nk(n: usize, k: usize) -> f64 {
    let r = b_nk_exact(n, k);
    *r.numer() as f64 / *r.denom() as f64
}

/// `c_{n,k} = (n−1)!/(k!(n−k)!) · 2^{k−1}` as an exact rational.
pub fn c_nk_exact(n: usize, k: usize) -> Ratio<i64> {
    check_nk(n, k);
    Ratio::new(factorial(n - 1) * (1i64 << (k - 1)), factorial(k) * factorial(n - k))
}

pub fn c_nk(n: usize, k: usize) -> f64 {
    let r = c_nk_exact(n, k);
    *r.numer() as f64 / *r.denom() as f64
}

/// `σ_k` of a spectrum `{θ (×(n−1)), μ}`:
/// `(n−1)!/(k!(n−k)!) · [(n−k)θ + kμ] · θ^{k−1}`.
pub fn binomial_sigma_k(theta: f64, mu: f64, n: usize, k: usize) -> f64 {
    check_nk(n, k);
    let c = factorial(n - 1) as f64 / (factorial(k) as f64 * factorial(n - k) as f64);
    c * ((n - k) as f64 * theta + k as f64 * mu) * theta.powi(k as i32 - 1)
}

/// Residuals of the two reduced ODEs at one abscissa.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReducedResidual {
    /// Potential equation `f'' + 2f'φ'/φ`.
    pub r1: f64,
    /// Curvature equation (left side minus `λ`).
    pub r2: f64,
}

impl ReducedResidual {
    pub fn max_abs(&self) -> f64 {
        self.r1.abs().max(self.r2.abs())
    }
}

// ---------------------------------------------------------------------------
// Translation ansatz
// ---------------------------------------------------------------------------

/// Profiles `φ(ξ)`, `f(ξ)` composed with `ξ = α₁x₁ + ⋯ + αₙxₙ`.
#[derive(Clone)]
pub struct TranslationAnsatz {
    alpha: Vec<f64>,
    sig: Signature,
    alpha_norm2: f64,
    lightlike: bool,
    pub phi: Arc<dyn Profile>,
    pub f: Arc<dyn Profile>,
}

impl std::fmt::Debug for TranslationAnsatz {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TranslationAnsatz")
            .field("alpha", &self.alpha)
            .field("sig", &self.sig)
            .field("alpha_norm2", &self.alpha_norm2)
            .field("lightlike", &self.lightlike)
            .finish()
    }
}

/// `Σ εᵢαᵢ² == 0`, decided in exact rational arithmetic on the binary values
/// of the entries.
pub fn is_lightlike(alpha: &[f64], sig: &Signature) -> bool {
    let mut acc = BigRational::zero();
    for (i, a) in alpha.iter().enumerate() {
        let q = BigRational::from_float(*a).expect("finite alpha entry");
        let sq = &q * &q;
        if sig.eps(i) > 0.0 {
            acc += sq;
        } else {
            acc -= sq;
        }
    }
    acc == BigRational::from_integer(BigInt::zero())
}

impl TranslationAnsatz {
    pub fn new(alpha: Vec<f64>, sig: Signature, phi: Arc<dyn Profile>, f: Arc<dyn Profile>) -> Result<Self> {
        if alpha.len() != sig.dim() {
            return Err(Error::input(format!(
                "alpha has {} entries, signature {}",
                alpha.len(),
                sig.dim()
            )));
        }
        if alpha.iter().any(|a| !a.is_finite()) {
            return Err(Error::input("alpha entries must be finite"));
        }
        if alpha.iter().all(|&a| a == 0.0) {
            return Err(Error::input("alpha must be a non-zero vector"));
        }
        let lightlike = is_lightlike(&alpha, &sig);
        let alpha_norm2 = if lightlike { 0.0 } else { sig.quad(&alpha) };
        Ok(TranslationAnsatz {
            alpha,
            sig,
            alpha_norm2,
            lightlike,
            phi,
            f,
        })
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    /// Signed norm `‖α‖²_ε = Σ εᵢαᵢ²` (exactly zero when light-like).
    pub fn alpha_norm2(&self) -> f64 {
        self.alpha_norm2
    }

    pub fn is_lightlike(&self) -> bool {
        self.lightlike
    }

    pub fn xi(&self, x: &[f64]) -> f64 {
        self.alpha.iter().zip(x).map(|(a, b)| a * b).sum()
    }

    pub fn phi_field(&self) -> ScalarField {
        ScalarField::translation(&self.alpha, self.phi.clone()).positive()
    }

    pub fn f_field(&self) -> ScalarField {
        ScalarField::translation(&self.alpha, self.f.clone())
    }

    pub fn soliton_spec(&self, k: usize, lambda: f64) -> Result<SolitonSpec> {
        SolitonSpec::new(k, lambda, self.sig.clone(), self.phi_field(), self.f_field())
    }
}

/// Eigenvalues of the Schouten endomorphism under the translation ansatz:
/// `θ = −½φ'²‖α‖²` (multiplicity `n−1`) and `μ = (φφ'' − ½φ'²)‖α‖²`.
pub fn translation_eigenpair(phi: f64, d1: f64, d2: f64, alpha_norm2: f64) -> (f64, f64) {
    let theta = -0.5 * d1 * d1 * alpha_norm2;
    let mu = (phi * d2 - 0.5 * d1 * d1) * alpha_norm2;
    (theta, mu)
}

/// `σ_k = b_{n,k}·[kφφ'' − (n/2)φ'²]·φ'^{2(k−1)}·‖α‖^{2k}`.
pub fn translation_sigma_k(phi: f64, d1: f64, d2: f64, alpha_norm2: f64, n: usize, k: usize) -> f64 {
    let bracket = k as f64 * phi * d2 - 0.5 * n as f64 * d1 * d1;
    b_nk(n, k) * bracket * d1.powi(2 * (k as i32 - 1)) * alpha_norm2.powi(k as i32)
}

fn positive_phi(v: f64, at: &str, t: f64) -> Result<()> {
    if v > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("phi({at} = {t}) = {v} is not positive")))
    }
}

/// Residuals of the translation-reduced system at `ξ`:
/// `r1 = f'' + 2f'φ'/φ`,
/// `r2 = σ_k + φφ'f'‖α‖²/(2(n−1)) − λ`.
pub fn translation_residuals(a: &TranslationAnsatz, k: usize, lambda: f64, xi: f64) -> Result<ReducedResidual> {
    let n = a.sig.dim();
    let p = a.phi.eval(xi)?;
    positive_phi(p.v, "xi", xi)?;
    let f = a.f.eval(xi)?;
    let r1 = f.d2 + 2.0 * f.d1 * p.d1 / p.v;
    let an2 = a.alpha_norm2;
    let r2 =
        translation_sigma_k(p.v, p.d1, p.d2, an2, n, k) + p.v * p.d1 * f.d1 * an2 / (2.0 * (n as f64 - 1.0)) - lambda;
    Ok(ReducedResidual { r1, r2 })
}

// ---------------------------------------------------------------------------
// Rotation ansatz
// ---------------------------------------------------------------------------

/// Profiles `φ(r)`, `f(r)` composed with `r = Σ εᵢxᵢ²`, on an open interval.
#[derive(Clone)]
pub struct RotationAnsatz {
    sig: Signature,
    interval: (f64, f64),
    pub phi: Arc<dyn Profile>,
    pub f: Arc<dyn Profile>,
}

impl std::fmt::Debug for RotationAnsatz {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RotationAnsatz")
            .field("sig", &self.sig)
            .field("interval", &self.interval)
            .finish()
    }
}

impl RotationAnsatz {
    pub fn new(sig: Signature, interval: (f64, f64), phi: Arc<dyn Profile>, f: Arc<dyn Profile>) -> Result<Self> {
        if interval.0.is_nan() || interval.1.is_nan() || interval.0 >= interval.1 {
            return Err(Error::input(format!("empty interval {interval:?}")));
        }
        Ok(RotationAnsatz { sig, interval, phi, f })
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn interval(&self) -> (f64, f64) {
        self.interval
    }

    pub fn r(&self, x: &[f64]) -> f64 {
        self.sig.quad(x)
    }

    pub fn phi_field(&self) -> ScalarField {
        ScalarField::rotation(&self.sig, self.phi.clone()).positive()
    }

    pub fn f_field(&self) -> ScalarField {
        ScalarField::rotation(&self.sig, self.f.clone())
    }

    pub fn soliton_spec(&self, k: usize, lambda: f64) -> Result<SolitonSpec> {
        SolitonSpec::new(k, lambda, self.sig.clone(), self.phi_field(), self.f_field())
    }
}

/// Eigenvalues under the rotation ansatz: `θ = 2(φφ' − rφ'²)` (multiplicity
/// `n−1`) and `μ = 4rφφ'' + θ`.
pub fn rotation_eigenpair(phi: f64, d1: f64, d2: f64, r: f64) -> (f64, f64) {
    let theta = 2.0 * (phi * d1 - r * d1 * d1);
    (theta, 4.0 * r * phi * d2 + theta)
}

/// `σ_k = c_{n,k}·[φφ' − rφ'²]^{k−1}·[2nφφ' − 2nrφ'² + 4krφφ'']`.
pub fn rotation_sigma_k(phi: f64, d1: f64, d2: f64, r: f64, n: usize, k: usize) -> f64 {
    let nf = n as f64;
    let base = phi * d1 - r * d1 * d1;
    let last = 2.0 * nf * phi * d1 - 2.0 * nf * r * d1 * d1 + 4.0 * k as f64 * r * phi * d2;
    c_nk(n, k) * base.powi(k as i32 - 1) * last
}

/// Residuals of the rotation-reduced system at `r`:
/// `r1 = f'' + 2f'φ'/φ`,
/// `r2 = σ_k − φ²f'/(n−1) + 2rf'φ'φ/(n−1) − λ`.
pub fn rotation_residuals(a: &RotationAnsatz, k: usize, lambda: f64, r: f64) -> Result<ReducedResidual> {
    let n = a.sig.dim();
    let p = a.phi.eval(r)?;
    positive_phi(p.v, "r", r)?;
    let f = a.f.eval(r)?;
    let nm1 = n as f64 - 1.0;
    let r1 = f.d2 + 2.0 * f.d1 * p.d1 / p.v;
    let r2 = rotation_sigma_k(p.v, p.d1, p.d2, r, n, k) - p.v * p.v * f.d1 / nm1 + 2.0 * r * f.d1 * p.d1 * p.v / nm1
        - lambda;
    Ok(ReducedResidual { r1, r2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::AnalyticProfile;
    use crate::jet::{Jet1, Real};
    use approx::assert_relative_eq;

    #[test]
    fn b_and_c_constants() {
        assert_eq!(b_nk_exact(4, 1), Ratio::from_integer(1));
        assert_eq!(b_nk_exact(4, 2), Ratio::new(-3, 4));
        assert_eq!(b_nk_exact(6, 3), Ratio::new(5, 6));
        for n in 2..=8 {
            assert_eq!(c_nk_exact(n, 1), Ratio::from_integer(1));
        }
        assert_eq!(c_nk_exact(4, 2), Ratio::from_integer(3));
        for n in 2..=8 {
            for k in 1..=n {
                let b = b_nk_exact(n, k);
                let abs_b = if b < Ratio::from_integer(0) { -b } else { b };
                assert_eq!(c_nk_exact(n, k), abs_b * Ratio::from_integer(4i64.pow(k as u32 - 1)));
            }
        }
    }

    #[test]
    fn translation_eigenpair_cases() {
        assert_eq!(translation_eigenpair(2.0, 0.0, 3.0, 1.0).0, 0.0);
        let (t, m) = translation_eigenpair(2.0, 0.0, 0.0, 1.0);
        assert_eq!((t, m), (-0.0, 0.0));
        assert_eq!(translation_eigenpair(2.0, 1.5, 3.0, 0.0), (-0.0, 0.0));
        assert_eq!(translation_eigenpair(1.0, 1.0, 0.0, 1.0), (-0.5, -0.5));
    }

    #[test]
    fn translation_sigma_simple_values() {
        // φ' ≡ 0 (so φ'' = 0 as well) kills every σ_k; a pointwise zero of φ'
        // only kills k ≥ 2, since σ₁ = μ = φφ''‖α‖² there.
        for k in 1..=4 {
            assert_eq!(translation_sigma_k(1.3, 0.0, 0.0, 1.0, 4, k), 0.0);
        }
        for k in 2..=4 {
            assert_eq!(translation_sigma_k(1.3, 0.0, 2.0, 1.0, 4, k), 0.0);
        }
        assert_relative_eq!(translation_sigma_k(1.3, 0.0, 2.0, 1.0, 4, 1), 2.6);
        assert_relative_eq!(translation_sigma_k(0.7, 1.0, 0.0, 1.0, 3, 1), -1.5);
        assert_eq!(translation_sigma_k(0.7, 1.0, 0.3, 0.0, 3, 2), 0.0);
    }

    #[test]
    fn rotation_sigma_simple_values() {
        for k in 1..=5 {
            assert_eq!(rotation_sigma_k(2.0, 0.0, 0.0, 0.7, 5, k), 0.0);
            // φ = c₀ r
            let c0 = 1.7;
            let r = 0.9;
            assert!(rotation_sigma_k(c0 * r, c0, 0.0, r, 5, k).abs() < 1e-13);
        }
        // φ = √(1+r), k = 1 → n − r(n+2)/(2(1+r))
        let n = 4;
        let r: f64 = 0.6;
        let p = (Jet1::var(r) + 1.0).sqrt();
        let want = n as f64 - r * (n as f64 + 2.0) / (2.0 * (1.0 + r));
        assert_relative_eq!(rotation_sigma_k(p.v, p.d1, p.d2, r, n, 1), want, max_relative = 1e-14);
    }

    #[test]
    fn lightlike_is_decided_exactly() {
        let lor = Signature::new(vec![-1, 1, 1]).unwrap();
        assert!(is_lightlike(&[1.0, 1.0, 0.0], &lor));
        assert!(is_lightlike(&[0.1, 0.1, 0.0], &lor));
        assert!(!is_lightlike(&[0.1, 0.1, 1e-300], &lor));
        // 0.3² ≠ 0.1² + 0.2² in binary floating point … and exactly as well.
        assert!(!is_lightlike(&[0.3, 0.1, 0.2], &lor));
    }

    #[test]
    fn constant_phi_translation_member() {
        // φ ≡ b, f = cξ + d gives (r1, r2) = (0, −λ).
        let sig = Signature::euclidean(3);
        let c = 0.8;
        let a = TranslationAnsatz::new(
            vec![1.0, 0.0, 0.0],
            sig,
            AnalyticProfile::constant(2.5).shared(),
            AnalyticProfile::new(move |t| t * c + 1.0).shared(),
        )
        .unwrap();
        for lambda in [0.0, 0.3] {
            let r = translation_residuals(&a, 2, lambda, 0.4).unwrap();
            assert_eq!(r.r1, 0.0);
            assert_eq!(r.r2, -lambda);
        }
    }

    #[test]
    fn rejects_zero_alpha_and_bad_phi() {
        let sig = Signature::euclidean(2);
        let p = AnalyticProfile::new(|t| t).shared();
        assert!(TranslationAnsatz::new(vec![0.0, 0.0], sig.clone(), p.clone(), p.clone()).is_err());
        let a = TranslationAnsatz::new(vec![1.0, 0.0], sig.clone(), p.clone(), p.clone()).unwrap();
        assert!(matches!(translation_residuals(&a, 1, 0.0, -1.0), Err(Error::Domain(_))));
        assert!(RotationAnsatz::new(sig, (1.0, 1.0), p.clone(), p).is_err());
    }

    #[test]
    fn light_like_collapse_forces_r2_minus_lambda() {
        let lor = Signature::new(vec![-1, 1, 1, 1]).unwrap();
        let phi = AnalyticProfile::new(|t| (t * 0.4).exp() + t.sin() * 0.2 + 1.0).shared();
        let f = AnalyticProfile::new(|t| t.cos() * t).shared();
        let a = TranslationAnsatz::new(vec![2.0, 2.0, 0.0, 0.0], lor, phi, f).unwrap();
        assert!(a.is_lightlike());
        for k in 1..=4 {
            for xi in [-1.0, 0.2, 1.7] {
                assert_eq!(translation_residuals(&a, k, 0.9, xi).unwrap().r2, -0.9);
            }
        }
    }
}
