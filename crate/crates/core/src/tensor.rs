//! Pointwise curvature of conformally flat metrics `ḡ = δ/φ²`.
//!
//! All quantities are assembled from the second-order jet of `φ` (and `f`),
//! using the closed conformal-change formulas for the Levi-Civita connection,
//! Ricci tensor, scalar curvature and Schouten tensor. The Schouten tensor is
//! taken in its reduced form `A = ∇²φ/φ − |∇φ|² δ/(2φ²)`, which carries no
//! `1/(n−2)` factor and therefore also covers `n = 2`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::field::{ScalarField, Signature, SolitonSpec};
use crate::jet::{Jet, Real};

/// Christoffel symbols `Γᵏᵢⱼ` stored as `data[(k·n + i)·n + j]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Christoffel {
    n: usize,
    data: Vec<f64>,
}

impl Christoffel {
    pub fn dim(&self) -> usize {
        self.n
    }

    /// `Γᵏᵢⱼ`.
    #[inline]
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.data[(k * self.n + i) * self.n + j]
    }
}

/// Curvature quantities of `ḡ` at one point.
#[derive(Clone, Debug)]
pub struct CurvaturePack {
    pub ricci: DMatrix<f64>,
    pub scalar: f64,
    /// Schouten tensor `A_ḡ` with both indices down.
    pub schouten: DMatrix<f64>,
    /// `ḡ⁻¹A_ḡ`, first index raised.
    pub endo: DMatrix<f64>,
    /// `σ₁ … σₙ` of `endo`.
    pub sigma: Vec<f64>,
}

fn check_dims(phi: &ScalarField, sig: &Signature, x: &[f64]) -> Result<()> {
    if phi.dim() != sig.dim() || x.len() != sig.dim() {
        return Err(Error::input(format!(
            "dimension mismatch: signature {}, field {}, point {}",
            sig.dim(),
            phi.dim(),
            x.len()
        )));
    }
    Ok(())
}

/// Evaluate `φ` at `x`, enforcing positivity regardless of the field's flag.
pub(crate) fn conformal_jet(phi: &ScalarField, sig: &Signature, x: &[f64]) -> Result<Jet> {
    check_dims(phi, sig, x)?;
    let j = phi.jet(x)?;
    if j.value() <= 0.0 {
        return Err(Error::domain(format!(
            "conformal factor {} is not positive at {x:?}",
            j.value()
        )));
    }
    Ok(j)
}

/// `Δ_δ φ = Σ εᵢ φ_{xᵢxᵢ}` and `|∇_δ φ|² = Σ εᵢ φ_{xᵢ}²`.
fn flat_laplacian_and_grad2(p: &Jet, sig: &Signature) -> (f64, f64) {
    let n = sig.dim();
    let lap = (0..n).map(|i| sig.eps(i) * p.dd(i, i)).sum();
    let g2 = (0..n).map(|i| sig.eps(i) * p.d(i) * p.d(i)).sum();
    (lap, g2)
}

pub(crate) fn christoffel_from_jet(p: &Jet, sig: &Signature) -> Christoffel {
    let n = sig.dim();
    let phi = p.value();
    let mut data = vec![0.0; n * n * n];
    let idx = |k: usize, i: usize, j: usize| (k * n + i) * n + j;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                // Γⁱᵢᵢ = −φ_{xᵢ}/φ and Γᵏᵢᵢ = εᵢ ε_k φ_{x_k}/φ for k ≠ i.
                for k in 0..n {
                    data[idx(k, i, i)] = if k == i {
                        -p.d(i) / phi
                    } else {
                        sig.eps(i) * sig.eps(k) * p.d(k) / phi
                    };
                }
            } else {
                // Γⁱᵢⱼ = −φ_{xⱼ}/φ, Γʲᵢⱼ = −φ_{xᵢ}/φ, zero for distinct i, j, k.
                data[idx(i, i, j)] = -p.d(j) / phi;
                data[idx(j, i, j)] = -p.d(i) / phi;
            }
        }
    }
    Christoffel { n, data }
}

/// Christoffel symbols of `δ/φ²` at `x`.
pub fn conformal_christoffel(phi: &ScalarField, sig: &Signature, x: &[f64]) -> Result<Christoffel> {
    let p = conformal_jet(phi, sig, x)?;
    Ok(christoffel_from_jet(&p, sig))
}

pub(crate) fn hessian_from_jets(fj: &Jet, p: &Jet, sig: &Signature) -> DMatrix<f64> {
    let n = sig.dim();
    let phi = p.value();
    let cross: f64 = (0..n).map(|k| sig.eps(k) * p.d(k) * fj.d(k)).sum::<f64>() / phi;
    let mut h = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let mut v = fj.dd(i, j) + (p.d(i) * fj.d(j) + p.d(j) * fj.d(i)) / phi;
            if i == j {
                v -= sig.eps(i) * cross;
            }
            h[(i, j)] = v;
            h[(j, i)] = v;
        }
    }
    h
}

/// Hessian of `f` with respect to `δ/φ²`.
pub fn hessian_conformal(f: &ScalarField, phi: &ScalarField, sig: &Signature, x: &[f64]) -> Result<DMatrix<f64>> {
    if f.dim() != sig.dim() {
        return Err(Error::input(format!(
            "potential has dimension {}, signature {}",
            f.dim(),
            sig.dim()
        )));
    }
    let p = conformal_jet(phi, sig, x)?;
    let fj = f.jet(x)?;
    Ok(hessian_from_jets(&fj, &p, sig))
}

pub(crate) fn ricci_from_jet(p: &Jet, sig: &Signature) -> DMatrix<f64> {
    let n = sig.dim();
    let phi = p.value();
    let (lap, g2) = flat_laplacian_and_grad2(p, sig);
    let diag = phi * lap - (n as f64 - 1.0) * g2;
    let mut ric = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let mut v = (n as f64 - 2.0) * phi * p.dd(i, j);
            if i == j {
                v += diag * sig.eps(i);
            }
            v /= phi * phi;
            ric[(i, j)] = v;
            ric[(j, i)] = v;
        }
    }
    ric
}

/// Ricci tensor of `δ/φ²`.
pub fn ricci_conformal(phi: &ScalarField, sig: &Signature, x: &[f64]) -> Result<DMatrix<f64>> {
    let p = conformal_jet(phi, sig, x)?;
    Ok(ricci_from_jet(&p, sig))
}

pub(crate) fn scalar_from_jet(p: &Jet, sig: &Signature) -> f64 {
    let n = sig.dim() as f64;
    let (lap, g2) = flat_laplacian_and_grad2(p, sig);
    (n - 1.0) * (2.0 * p.value() * lap - n * g2)
}

/// Scalar curvature `(n−1)(2φΔφ − n|∇φ|²)`.
pub fn scalar_conformal(phi: &ScalarField, sig: &Signature, x: &[f64]) -> Result<f64> {
    let p = conformal_jet(phi, sig, x)?;
    Ok(scalar_from_jet(&p, sig))
}

pub(crate) fn schouten_from_jet(p: &Jet, sig: &Signature) -> DMatrix<f64> {
    let n = sig.dim();
    let phi = p.value();
    let (_, g2) = flat_laplacian_and_grad2(p, sig);
    let mut a = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let mut v = p.dd(i, j) / phi;
            if i == j {
                v -= g2 * sig.eps(i) / (2.0 * phi * phi);
            }
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
    a
}

pub(crate) fn endo_from_jet(p: &Jet, sig: &Signature) -> DMatrix<f64> {
    let n = sig.dim();
    let phi = p.value();
    let (_, g2) = flat_laplacian_and_grad2(p, sig);
    DMatrix::from_fn(n, n, |i, j| {
        let mut v = sig.eps(i) * phi * p.dd(i, j);
        if i == j {
            v -= 0.5 * g2;
        }
        v
    })
}

/// The Schouten endomorphism `ḡ⁻¹A_ḡ` with `ḡ^{ij} = φ² εᵢ δ^{ij}`, i.e.
/// entries `εᵢ φ φ_{xᵢxⱼ} − ½|∇φ|² δᵢⱼ`.
pub fn schouten_endomorphism(phi: &ScalarField, sig: &Signature, x: &[f64]) -> Result<DMatrix<f64>> {
    let p = conformal_jet(phi, sig, x)?;
    Ok(endo_from_jet(&p, sig))
}

/// Elementary symmetric functions `σ₁ … σₙ` of the spectrum of `endo`.
///
/// Computed from the power traces `pⱼ = tr(endoʲ)` through Newton's
/// identities `k·σₖ = Σᵢ (−1)^{i−1} σ_{k−i} pᵢ`, so no eigenvalues are
/// formed. The result is real even when the spectrum is complex, as happens
/// for Schouten endomorphisms in indefinite signature.
pub fn sigma_all(endo: &DMatrix<f64>) -> Vec<f64> {
    let n = endo.nrows();
    assert_eq!(n, endo.ncols(), "sigma_all needs a square matrix");
    let mut traces = Vec::with_capacity(n);
    let mut power = endo.clone();
    for j in 0..n {
        if j > 0 {
            power = &power * endo;
        }
        traces.push((0..n).map(|i| power[(i, i)]).sum::<f64>());
    }
    let mut e = vec![1.0; n + 1];
    for k in 1..=n {
        let mut acc = 0.0;
        for i in 1..=k {
            let term = e[k - i] * traces[i - 1];
            if i % 2 == 1 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        e[k] = acc / k as f64;
    }
    e.split_off(1)
}

pub(crate) fn pack_from_jet(p: &Jet, sig: &Signature) -> CurvaturePack {
    let endo = endo_from_jet(p, sig);
    CurvaturePack {
        ricci: ricci_from_jet(p, sig),
        scalar: scalar_from_jet(p, sig),
        schouten: schouten_from_jet(p, sig),
        sigma: sigma_all(&endo),
        endo,
    }
}

pub fn curvature_pack(phi: &ScalarField, sig: &Signature, x: &[f64]) -> Result<CurvaturePack> {
    let p = conformal_jet(phi, sig, x)?;
    Ok(pack_from_jet(&p, sig))
}

/// `∇²_ḡ f − 2(n−1)(σ_k − λ) ḡ` at `x`; vanishes iff the soliton equation
/// holds there.
pub fn soliton_residual(spec: &SolitonSpec, x: &[f64]) -> Result<DMatrix<f64>> {
    let sig = &spec.signature;
    let p = conformal_jet(&spec.phi, sig, x)?;
    let fj = spec.f.jet(x)?;
    let mut res = hessian_from_jets(&fj, &p, sig);
    let sigma_k = sigma_all(&endo_from_jet(&p, sig))[spec.k - 1];
    let coef = 2.0 * (spec.n as f64 - 1.0) * (sigma_k - spec.lambda) / (p.value() * p.value());
    for i in 0..spec.n {
        res[(i, i)] -= coef * sig.eps(i);
    }
    Ok(res)
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0f64, |a, v| a.max(v.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{AnalyticProfile, ScalarField};
    use crate::jet::Jet1;
    use approx::assert_relative_eq;
    use nalgebra::DMatrix;
    use std::sync::Arc;

    fn exp_x1(n: usize) -> ScalarField {
        ScalarField::new(n, |x| x[0].exp()).positive()
    }

    #[test]
    fn flat_metric_has_vanishing_connection_and_curvature() {
        let sig = Signature::new(vec![-1, 1, 1]).unwrap();
        let one = ScalarField::constant(3, 1.0);
        let x = [0.3, -0.2, 1.1];
        let g = conformal_christoffel(&one, &sig, &x).unwrap();
        assert!((0..27).all(|t| g.data[t] == 0.0));
        assert_eq!(max_abs(&ricci_conformal(&one, &sig, &x).unwrap()), 0.0);
        assert_eq!(scalar_conformal(&one, &sig, &x).unwrap(), 0.0);
        assert_eq!(max_abs(&schouten_endomorphism(&one, &sig, &x).unwrap()), 0.0);
    }

    #[test]
    fn christoffel_for_exponential_factor_euclidean() {
        let sig = Signature::euclidean(2);
        let g = conformal_christoffel(&exp_x1(2), &sig, &[0.0, 0.0]).unwrap();
        // Indices are zero-based: Γ¹₁₁ → get(0,0,0).
        assert_eq!(g.get(0, 0, 0), -1.0);
        assert_eq!(g.get(0, 1, 1), 1.0);
        assert_eq!(g.get(1, 0, 1), -1.0);
        assert_eq!(g.get(1, 1, 0), -1.0);
        assert_eq!(g.get(1, 0, 0), 0.0);
        assert_eq!(g.get(1, 1, 1), 0.0);
        assert_eq!(g.get(0, 0, 1), 0.0);
    }

    #[test]
    fn christoffel_sign_flips_with_lorentz_signature() {
        let sig = Signature::new(vec![-1, 1]).unwrap();
        let g = conformal_christoffel(&exp_x1(2), &sig, &[0.0, 0.0]).unwrap();
        assert_eq!(g.get(0, 1, 1), -1.0);
        assert_eq!(g.get(0, 0, 0), -1.0);
    }

    #[test]
    fn christoffel_rejects_nonpositive_factor() {
        let sig = Signature::euclidean(2);
        let phi = ScalarField::new(2, |x| x[0]);
        assert!(matches!(
            conformal_christoffel(&phi, &sig, &[-0.5, 0.0]),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn flat_hessian_cases() {
        let sig = Signature::euclidean(3);
        let f = ScalarField::new(3, |x| x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
        let h = hessian_conformal(&f, &ScalarField::constant(3, 1.0), &sig, &[0.4, 1.0, -2.0]).unwrap();
        assert_eq!(h, DMatrix::identity(3, 3) * 2.0);

        let g = ScalarField::new(3, |x| (x[0] * x[1]).sin() + x[2].exp());
        let x = [0.2, 0.7, -0.1];
        let flat = hessian_conformal(&g, &ScalarField::constant(3, 1.0), &sig, &x).unwrap();
        let scaled = hessian_conformal(&g, &ScalarField::constant(3, 3.5), &sig, &x).unwrap();
        assert_eq!(flat, scaled);

        let lambda = 0.7;
        let gauss = ScalarField::new(3, move |x| (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) * (lambda / 2.0));
        let h = hessian_conformal(&gauss, &ScalarField::constant(3, 1.0), &sig, &x).unwrap();
        assert!(max_abs(&(h - DMatrix::identity(3, 3) * lambda)) < 1e-15);
    }

    #[test]
    fn hessian_dimension_mismatch_is_input_error() {
        let sig = Signature::euclidean(3);
        let f = ScalarField::constant(2, 0.0);
        assert!(matches!(
            hessian_conformal(&f, &ScalarField::constant(3, 1.0), &sig, &[0.0; 3]),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn scalar_curvature_of_cigar_factor_at_origin() {
        // φ = √(1+r), n = 2: at x = 0, φ = 1, ∇φ = 0, φ_{xᵢxᵢ} = 1, so
        // scal = (n−1)(2·1·2 − 0) = 4.
        let sig = Signature::euclidean(2);
        let p = AnalyticProfile::new(|r: Jet1| (r + 1.0).sqrt()).shared();
        let phi = ScalarField::rotation(&sig, p);
        assert_relative_eq!(
            scalar_conformal(&phi, &sig, &[0.0, 0.0]).unwrap(),
            4.0,
            max_relative = 1e-15
        );
    }

    #[test]
    fn sigma_all_basic_identities() {
        assert_eq!(sigma_all(&DMatrix::zeros(4, 4)), vec![0.0; 4]);
        let (t, m) = (0.7, -1.3);
        let s = sigma_all(&DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![t, t, m])));
        assert_relative_eq!(s[0], 2.0 * t + m, max_relative = 1e-15);
        assert_relative_eq!(s[1], t * t + 2.0 * t * m, max_relative = 1e-14);
        assert_relative_eq!(s[2], t * t * m, max_relative = 1e-14);
    }

    #[test]
    fn sigma_all_binomial_form_for_repeated_eigenvalue() {
        let (t, m) = (0.45, 2.1);
        for n in 2..=6 {
            let mut d = vec![t; n - 1];
            d.push(m);
            let s = sigma_all(&DMatrix::from_diagonal(&nalgebra::DVector::from_vec(d)));
            for k in 1..=n {
                let c = binom(n - 1, k) * (t.powi(k as i32)) + binom(n - 1, k - 1) * t.powi(k as i32 - 1) * m;
                // (n−1)!/(k!(n−k)!)·[(n−k)θ + kμ]·θ^{k−1}
                let closed =
                    fact(n - 1) / (fact(k) * fact(n - k)) * ((n - k) as f64 * t + k as f64 * m) * t.powi(k as i32 - 1);
                assert_relative_eq!(s[k - 1], closed, max_relative = 1e-12);
                assert_relative_eq!(c, closed, max_relative = 1e-12);
            }
        }
    }

    fn fact(n: usize) -> f64 {
        (1..=n).map(|v| v as f64).product()
    }

    fn binom(n: usize, k: usize) -> f64 {
        if k > n {
            0.0
        } else {
            fact(n) / (fact(k) * fact(n - k))
        }
    }

    #[test]
    fn schouten_from_definition_agrees_with_reduced_form() {
        // For n ≥ 3 the textbook definition (Ric − scal ḡ/(2(n−1)))/(n−2)
        // must agree with the reduced expression.
        let sig = Signature::new(vec![1, -1, 1, 1]).unwrap();
        let phi = ScalarField::new(4, |x| (x[0] * 0.3 + x[1] * x[2] * 0.2 + x[3] * x[3] * 0.1).exp()).positive();
        let x = [0.2, -0.4, 0.9, 0.5];
        let pack = curvature_pack(&phi, &sig, &x).unwrap();
        let p = phi.value(&x).unwrap();
        let n = 4.0;
        for i in 0..4 {
            for j in 0..4 {
                let g = if i == j { sig.eps(i) / (p * p) } else { 0.0 };
                let a = (pack.ricci[(i, j)] - pack.scalar * g / (2.0 * (n - 1.0))) / (n - 2.0);
                assert_relative_eq!(a, pack.schouten[(i, j)], epsilon = 1e-13, max_relative = 1e-12);
                // endo = ḡ⁻¹ A with ḡ^{ii} = φ² εᵢ
                assert_relative_eq!(
                    pack.endo[(i, j)],
                    p * p * sig.eps(i) * pack.schouten[(i, j)],
                    epsilon = 1e-13,
                    max_relative = 1e-12
                );
            }
        }
        let trace: f64 = (0..4).map(|i| pack.endo[(i, i)]).sum();
        assert_eq!(pack.sigma[0], trace);
    }

    #[test]
    fn rotation_endomorphism_matches_closed_form() {
        // (ḡ⁻¹A)ᵢⱼ = 4 εⱼ φ φ'' xᵢ xⱼ + 2(φφ' − r φ'²) δᵢⱼ
        let sig = Signature::new(vec![-1, 1, 1]).unwrap();
        let prof = AnalyticProfile::new(|r: Jet1| (r * 0.3).exp() + r * r * 0.1 + 1.5);
        let phi = ScalarField::rotation(&sig, Arc::new(prof.clone()));
        let x = [0.3, 0.8, -0.5];
        let r = sig.quad(&x);
        let p = crate::field::Profile::eval(&prof, r).unwrap();
        let endo = schouten_endomorphism(&phi, &sig, &x).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let mut want = 4.0 * sig.eps(j) * p.v * p.d2 * x[i] * x[j];
                if i == j {
                    want += 2.0 * (p.v * p.d1 - r * p.d1 * p.d1);
                }
                assert_relative_eq!(endo[(i, j)], want, epsilon = 1e-14, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn translation_endomorphism_matches_transposed_closed_form() {
        // The translation display εⱼ φφ'' αᵢαⱼ − ½φ'²‖α‖² δᵢⱼ is the transpose of
        // the row-raised endomorphism computed here.
        let sig = Signature::new(vec![-1, 1, 1]).unwrap();
        let alpha = [0.7, -1.2, 0.4];
        let an2 = sig.quad(&alpha);
        let prof = AnalyticProfile::new(|t: Jet1| (t * 0.5).exp() + 1.0);
        let phi = ScalarField::translation(&alpha, Arc::new(prof.clone()));
        let x = [0.1, 0.2, -0.3];
        let xi: f64 = alpha.iter().zip(&x).map(|(a, b)| a * b).sum();
        let p = crate::field::Profile::eval(&prof, xi).unwrap();
        let endo = schouten_endomorphism(&phi, &sig, &x).unwrap();
        let t = endo.transpose();
        for i in 0..3 {
            for j in 0..3 {
                let mut want = sig.eps(j) * p.v * p.d2 * alpha[i] * alpha[j];
                if i == j {
                    want -= 0.5 * p.d1 * p.d1 * an2;
                }
                assert_relative_eq!(t[(i, j)], want, epsilon = 1e-14, max_relative = 1e-12);
            }
        }
    }
}
