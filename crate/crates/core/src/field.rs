//! Signatures, scalar fields on ℝⁿ and one-dimensional ansatz profiles.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::jet::{Jet, Jet1, Real, MAX_DIM};

/// Diagonal ±1 pattern ε of the flat background metric `δ = Σ εᵢ dxᵢ²`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Signature(Vec<i8>);

impl Signature {
    pub fn new(eps: Vec<i8>) -> Result<Self> {
        if eps.len() < 2 {
            return Err(Error::input(format!(
                "signature needs at least 2 entries, got {}",
                eps.len()
            )));
        }
        if eps.len() > MAX_DIM {
            return Err(Error::input(format!(
                "signature length {} exceeds supported dimension {MAX_DIM}",
                eps.len()
            )));
        }
        if let Some((i, e)) = eps.iter().enumerate().find(|(_, e)| !matches!(e, 1 | -1)) {
            return Err(Error::input(format!("signature[{i}]: expected +1 or -1, got {e}")));
        }
        Ok(Signature(eps))
    }

    pub fn euclidean(n: usize) -> Self {
        Signature::new(vec![1; n]).expect("valid euclidean signature")
    }

    /// `ε₁ = −1`, all other entries `+1`.
    pub fn lorentzian(n: usize) -> Self {
        let mut e = vec![1; n];
        e[0] = -1;
        Signature::new(e).expect("valid lorentzian signature")
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn eps(&self, i: usize) -> f64 {
        self.0[i] as f64
    }

    pub fn entries(&self) -> &[i8] {
        &self.0
    }

    pub fn is_riemannian(&self) -> bool {
        self.0.iter().all(|&e| e == 1)
    }

    pub fn is_lorentzian(&self) -> bool {
        self.0.iter().filter(|&&e| e == -1).count() == 1
    }

    /// `Σ εᵢ aᵢ bᵢ`.
    pub fn dot(&self, a: &[f64], b: &[f64]) -> f64 {
        (0..self.dim()).map(|i| self.eps(i) * a[i] * b[i]).sum()
    }

    /// `Σ εᵢ xᵢ²`; for a point this is the rotational invariant `r`.
    pub fn quad(&self, x: &[f64]) -> f64 {
        self.dot(x, x)
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|e| format!("{e:+}")).collect();
        write!(f, "({})", s.join(","))
    }
}

type FieldFn = dyn Fn(&[Jet]) -> Result<Jet> + Send + Sync;

/// A smooth function on (an open subset of) ℝⁿ, evaluated to second order.
#[derive(Clone)]
pub struct ScalarField {
    dim: usize,
    eval: Arc<FieldFn>,
    positive: bool,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField")
            .field("dim", &self.dim)
            .field("positive", &self.positive)
            .finish()
    }
}

impl ScalarField {
    pub fn new<F>(dim: usize, f: F) -> Self
    where
        F: Fn(&[Jet]) -> Jet + Send + Sync + 'static,
    {
        Self::try_new(dim, move |x| Ok(f(x)))
    }

    pub fn try_new<F>(dim: usize, f: F) -> Self
    where
        F: Fn(&[Jet]) -> Result<Jet> + Send + Sync + 'static,
    {
        assert!((1..=MAX_DIM).contains(&dim), "field dimension {dim} unsupported");
        ScalarField {
            dim,
            eval: Arc::new(f),
            positive: false,
        }
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        ScalarField::new(dim, move |_| Jet::constant(c))
    }

    /// Require the field to be strictly positive wherever it is evaluated.
    pub fn positive(mut self) -> Self {
        self.positive = true;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn requires_positive(&self) -> bool {
        self.positive
    }

    pub fn jet(&self, x: &[f64]) -> Result<Jet> {
        if x.len() != self.dim {
            return Err(Error::input(format!(
                "point has {} coordinates, field expects {}",
                x.len(),
                self.dim
            )));
        }
        let j = (self.eval)(&Jet::seed(x))?;
        if !j.is_finite() {
            return Err(Error::domain(format!("field not finite at {x:?}")));
        }
        if self.positive && j.value() <= 0.0 {
            return Err(Error::domain(format!(
                "conformal factor {} is not positive at {x:?}",
                j.value()
            )));
        }
        Ok(j)
    }

    pub fn value(&self, x: &[f64]) -> Result<f64> {
        self.jet(x).map(|j| j.value())
    }

    /// `x ↦ profile(α·x)`.
    pub fn translation(alpha: &[f64], profile: Arc<dyn Profile>) -> Self {
        let alpha = alpha.to_vec();
        ScalarField::try_new(alpha.len(), move |x| {
            let mut xi = Jet::constant(0.0);
            for (a, xj) in alpha.iter().zip(x) {
                xi += *xj * *a;
            }
            let p = profile.eval(xi.value())?;
            Ok(xi.chain(p.v, p.d1, p.d2))
        })
    }

    /// `x ↦ profile(Σ εᵢ xᵢ²)`.
    pub fn rotation(sig: &Signature, profile: Arc<dyn Profile>) -> Self {
        let sig = sig.clone();
        ScalarField::try_new(sig.dim(), move |x| {
            let mut r = Jet::constant(0.0);
            for (i, xi) in x.iter().enumerate() {
                r += *xi * *xi * sig.eps(i);
            }
            let p = profile.eval(r.value())?;
            Ok(r.chain(p.v, p.d1, p.d2))
        })
    }
}

/// A function of one variable with first and second derivatives.
pub trait Profile: Send + Sync {
    fn eval(&self, t: f64) -> Result<Jet1>;
}

type ProfileFn = dyn Fn(Jet1) -> Jet1 + Send + Sync;

/// A closed-form profile written against [`Jet1`].
#[derive(Clone)]
pub struct AnalyticProfile {
    f: Arc<ProfileFn>,
}

impl AnalyticProfile {
    pub fn new<F>(f: F) -> Self
    where
        F: Fn(Jet1) -> Jet1 + Send + Sync + 'static,
    {
        AnalyticProfile { f: Arc::new(f) }
    }

    pub fn constant(c: f64) -> Self {
        AnalyticProfile::new(move |_| Jet1::cst(c))
    }

    pub fn shared(self) -> Arc<dyn Profile> {
        Arc::new(self)
    }
}

impl Profile for AnalyticProfile {
    fn eval(&self, t: f64) -> Result<Jet1> {
        let j = (self.f)(Jet1::var(t));
        if j.is_finite() {
            Ok(j)
        } else {
            Err(Error::domain(format!("profile not finite at {t}")))
        }
    }
}

/// One candidate gradient k-Yamabe soliton `(ℝⁿ, δ/φ², f, λ)`.
#[derive(Clone, Debug)]
pub struct SolitonSpec {
    pub n: usize,
    pub k: usize,
    pub lambda: f64,
    pub signature: Signature,
    pub phi: ScalarField,
    pub f: ScalarField,
}

impl SolitonSpec {
    pub fn new(k: usize, lambda: f64, signature: Signature, phi: ScalarField, f: ScalarField) -> Result<Self> {
        let n = signature.dim();
        if phi.dim() != n || f.dim() != n {
            return Err(Error::input(format!(
                "dimension mismatch: signature {n}, phi {}, f {}",
                phi.dim(),
                f.dim()
            )));
        }
        if k == 0 || k > n {
            return Err(Error::input(format!("k = {k} must satisfy 1 <= k <= n = {n}")));
        }
        if !lambda.is_finite() {
            return Err(Error::input("lambda must be finite"));
        }
        Ok(SolitonSpec {
            n,
            k,
            lambda,
            signature,
            phi: phi.positive(),
            f,
        })
    }
}
