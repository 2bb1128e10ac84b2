//! Solution families and the example catalog.
//!
//! Translation families with `φ′ ≠ 0` are implicit: their profiles are
//! [`ImplicitRelation`]s inverted by [`crate::quadrature`]. Rotation families
//! and the catalog examples are closed form. Where a sign or normalisation of
//! the potential is ambiguous, builders evaluate every variant against the
//! soliton equation and record which one vanishes in a [`SignVariant`].

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{AnalyticProfile, Profile, ScalarField, Signature, SolitonSpec};
use crate::jet::{Jet1, Real};
use crate::quadrature::{integrate, ImplicitProfile, ImplicitRelation, QuadOptions};
use crate::reductions::{
    b_nk, rotation_residuals, translation_residuals, ReducedResidual, RotationAnsatz, TranslationAnsatz,
};
use crate::sampling::{sample_points, SampleBox};
use crate::tensor::{max_abs, soliton_residual};

/// Residual bound for a member to count as a solution.
pub const RESIDUAL_TOL: f64 = 1e-8;

/// Points closer than this to a singular set of an ansatz are not sampled.
pub const SINGULAR_MARGIN: f64 = 1e-3;

const VARIANT_PROBES: usize = 8;

/// Potential `f(t) = d + ∫_{t₀}^{t} c/φ²`, the general solution of
/// `f″ + 2f′φ′/φ = 0`.
#[derive(Clone)]
pub struct PotentialProfile {
    phi: Arc<dyn Profile>,
    interval: (f64, f64),
    base: f64,
    c: f64,
    d: f64,
}

impl PotentialProfile {
    pub fn new(phi: Arc<dyn Profile>, interval: (f64, f64), base: f64, c: f64, d: f64) -> Result<Self> {
        let (a, b) = interval;
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::input(format!(
                "interval [{a}, {b}] must be finite and non-empty"
            )));
        }
        if !(a <= base && base <= b) {
            return Err(Error::input(format!("base point {base} outside [{a}, {b}]")));
        }
        for i in 0..=256 {
            let t = if i == 256 { b } else { a + (b - a) * i as f64 / 256.0 };
            let v = phi.eval(t)?.v;
            if !(v > 0.0) {
                return Err(Error::domain(format!("phi({t}) = {v} vanishes on the interval")));
            }
        }
        Ok(PotentialProfile {
            phi,
            interval,
            base,
            c,
            d,
        })
    }
}

/// [`PotentialProfile`] based at the left end of `interval`.
pub fn potential_from_phi(phi: Arc<dyn Profile>, interval: (f64, f64), c: f64, d: f64) -> Result<PotentialProfile> {
    PotentialProfile::new(phi, interval, interval.0, c, d)
}

impl Profile for PotentialProfile {
    fn eval(&self, t: f64) -> Result<Jet1> {
        let (a, b) = self.interval;
        if !(a <= t && t <= b) {
            return Err(Error::OutOfRange {
                what: "t",
                value: t,
                lo: a,
                hi: b,
            });
        }
        let p = self.phi.eval(t)?;
        if self.c == 0.0 {
            return Ok(Jet1::new(self.d, 0.0, 0.0));
        }
        let c = self.c;
        let phi = &self.phi;
        let integral = integrate(
            |s| phi.eval(s).map(|q| c / (q.v * q.v)).unwrap_or(f64::NAN),
            self.base,
            t,
            &QuadOptions::tight(),
        )?;
        Ok(Jet1::new(
            self.d + integral,
            c / (p.v * p.v),
            -2.0 * c * p.d1 / (p.v * p.v * p.v),
        ))
    }
}

/// Potential `f = d + ∫ c/φ² dξ` for an implicit profile, integrated in the
/// `φ` variable so that no inversions are needed; `f = d` where `φ = φ₀`.
#[derive(Clone, Debug)]
pub struct ImplicitPotential {
    rel: ImplicitRelation,
    c: f64,
    d: f64,
}

impl ImplicitPotential {
    pub fn new(rel: ImplicitRelation, c: f64, d: f64) -> Self {
        ImplicitPotential { rel, c, d }
    }
}

impl Profile for ImplicitPotential {
    fn eval(&self, t: f64) -> Result<Jet1> {
        let phi = self.rel.invert(t)?;
        let (d1, _) = self.rel.derivatives(phi);
        let c = self.c;
        let value = if c == 0.0 {
            self.d
        } else {
            let rel = &self.rel;
            let s = rel.slope();
            self.d
                + integrate(
                    |q| c * rel.integrand(q) / (s * q * q),
                    rel.phi0(),
                    phi,
                    &QuadOptions::tight(),
                )?
        };
        Ok(Jet1::new(value, c / (phi * phi), -2.0 * c * d1 / (phi * phi * phi)))
    }
}

/// The constant `p = c/(2(n−1)k·b_{n,k})·((2k−n)/(2k))^{2(k−1)}`.
pub fn p_constant(n: usize, k: usize, c: f64) -> f64 {
    let (nf, kf) = (n as f64, k as f64);
    c / (2.0 * (nf - 1.0) * kf * b_nk(n, k)) * ((2.0 * kf - nf) / (2.0 * kf)).powi(2 * (k as i32 - 1))
}

fn check_nk(n: usize, k: usize) -> Result<()> {
    if !(2..=crate::jet::MAX_DIM).contains(&n) {
        return Err(Error::input(format!("n = {n} must lie in 2..={}", crate::jet::MAX_DIM)));
    }
    if k == 0 || k > n {
        return Err(Error::input(format!("k = {k} must satisfy 1 <= k <= n = {n}")));
    }
    Ok(())
}

fn check_alpha_sign(s: f64) -> Result<()> {
    if s == 1.0 || s == -1.0 {
        Ok(())
    } else {
        Err(Error::input(format!("alpha_sign = {s}: expected +1 or -1")))
    }
}

fn check_finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::input(format!("{name} = {v} must be finite")))
    }
}

/// Steady translation family for `n ≠ 2k` and `φ′ ≠ 0`.
///
/// With `v = φ^{(2k−n)/(2k)}` the curvature equation integrates to
/// `∫_{φ₀}^{φ} dφ / (φ^{n/2k}·[Q·φ^{−(2nk−n+2k)/(2k)} + c₁]^{1/(2k−1)}) = 2k/(2k−n)·ξ + c₂`
/// with `Q = (n−2k)p(1−2k)/(2nk−n+2k)`. The odd root is real for negative
/// bases. `alpha_sign = ‖α‖²` (±1); for time-like `α` and even `k` the
/// constant `c` enters as `c·(−1)^{k−1}`. The attached ODE residual is
/// `[φφ″ − (n/2k)φ′²]φ′^{2(k−1)} + c/(2k·b_{n,k}(n−1))·φ′/φ`.
pub fn family_translation_n_ne_2k(
    n: usize,
    k: usize,
    c: f64,
    c1: f64,
    c2: f64,
    phi0: f64,
    alpha_sign: f64,
) -> Result<ImplicitRelation> {
    check_nk(n, k)?;
    if n == 2 * k {
        return Err(Error::input(format!("n = {n} equals 2k; use the n = 2k family")));
    }
    check_alpha_sign(alpha_sign)?;
    for (name, v) in [("c", c), ("c1", c1), ("c2", c2), ("phi0", phi0)] {
        check_finite(name, v)?;
    }
    let (nf, kf) = (n as f64, k as f64);
    let c_eff = c * alpha_sign.powi(k as i32 - 1);
    let p = p_constant(n, k, c_eff);
    let q = (nf - 2.0 * kf) * p * (1.0 - 2.0 * kf) / (2.0 * nf * kf - nf + 2.0 * kf);
    let e = -(2.0 * nf * kf - nf + 2.0 * kf) / (2.0 * kf);
    let root = 2 * k as u32 - 1;
    let lead = nf / (2.0 * kf);
    let integrand = move |phi: Jet1| (phi.powf(lead) * (phi.powf(e) * q + c1).odd_root(root)).recip();
    let coef = c_eff / (2.0 * kf * b_nk(n, k) * (nf - 1.0));
    let ode =
        move |phi: f64, d1: f64, d2: f64| (phi * d2 - lead * d1 * d1) * d1.powi(2 * (k as i32 - 1)) + coef * d1 / phi;
    ImplicitRelation::new(integrand, phi0, 2.0 * kf / (2.0 * kf - nf), c2, ode)
}

/// Steady translation family for `n = 2k` and `φ′ ≠ 0`:
/// `∫_{φ₀}^{φ} dφ / (c/(b_{n,k}n²φ) + c₁φ^{n−1})^{1/(n−1)} = ξ + c₂`, with ODE
/// residual `[φφ″ − φ′²]φ′^{n−2} + φ′/φ·c/(b_{n,k}n(n−1))`.
pub fn family_translation_n_eq_2k(
    n: usize,
    c: f64,
    c1: f64,
    c2: f64,
    phi0: f64,
    alpha_sign: f64,
) -> Result<ImplicitRelation> {
    if !n.is_multiple_of(2) || n < 2 {
        return Err(Error::input(format!("n = {n} must be even")));
    }
    let k = n / 2;
    check_nk(n, k)?;
    check_alpha_sign(alpha_sign)?;
    for (name, v) in [("c", c), ("c1", c1), ("c2", c2), ("phi0", phi0)] {
        check_finite(name, v)?;
    }
    if c == 0.0 && c1 == 0.0 {
        return Err(Error::input("c = c1 = 0 leaves a zero integrand denominator"));
    }
    let nf = n as f64;
    let b = b_nk(n, k);
    let c_eff = c * alpha_sign.powi(k as i32 - 1);
    let a = c_eff / (b * nf * nf);
    let root = n as u32 - 1;
    let integrand = move |phi: Jet1| (phi.recip() * a + phi.powi(n as i32 - 1) * c1).odd_root(root).recip();
    let coef = c_eff / (b * nf * (nf - 1.0));
    let ode = move |phi: f64, d1: f64, d2: f64| (phi * d2 - d1 * d1) * d1.powi(n as i32 - 2) + d1 / phi * coef;
    ImplicitRelation::new(integrand, phi0, 1.0, c2, ode)
}

/// Offset `c₂` for which the `c = 0`, `c₁ = 1` member of the `n ≠ 2k` family
/// is `φ^{(2k−n)/(2k)} = ξ + a`.
pub fn closed_form_offset_n_ne_2k(n: usize, k: usize, a: f64, phi0: f64) -> f64 {
    let m = (2.0 * k as f64 - n as f64) / (2.0 * k as f64);
    (a - phi0.powf(m)) / m
}

/// Offset `c₂` for which the `c₁ = 0`, `c = b_{n,k}n²` member of the `n = 2k`
/// family is `φ = ((n/(n−1))ξ + c₄)^{(n−1)/n}`.
pub fn closed_form_offset_n_eq_2k(n: usize, c4: f64, phi0: f64) -> f64 {
    let nf = n as f64;
    (nf - 1.0) / nf * (c4 - phi0.powf(nf / (nf - 1.0)))
}

/// Which potential sign or normalisation was written and which one solves
/// the soliton equation.
#[derive(Clone, Debug, PartialEq)]
pub struct SignVariant {
    pub written: String,
    pub used: String,
    /// Max-abs soliton residual of the written variant on probe points.
    pub written_residual: f64,
    pub used_residual: f64,
}

impl SignVariant {
    pub fn written_holds(&self) -> bool {
        self.written == self.used
    }
}

/// Symmetry reduction a member is built from.
#[derive(Clone, Debug)]
pub enum Ansatz {
    Translation(TranslationAnsatz),
    Rotation(RotationAnsatz),
}

impl Ansatz {
    /// `ξ(x)` or `r(x)`.
    pub fn coordinate(&self, x: &[f64]) -> f64 {
        match self {
            Ansatz::Translation(a) => a.xi(x),
            Ansatz::Rotation(a) => a.r(x),
        }
    }

    pub fn residuals(&self, k: usize, lambda: f64, t: f64) -> Result<ReducedResidual> {
        match self {
            Ansatz::Translation(a) => translation_residuals(a, k, lambda, t),
            Ansatz::Rotation(a) => rotation_residuals(a, k, lambda, t),
        }
    }

    pub fn phi(&self) -> Arc<dyn Profile> {
        match self {
            Ansatz::Translation(a) => a.phi.clone(),
            Ansatz::Rotation(a) => a.phi.clone(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Ansatz::Translation(_) => "translation",
            Ansatz::Rotation(_) => "rotation",
        }
    }
}

type Admissible = dyn Fn(&[f64]) -> bool + Send + Sync;

/// A fully specified solution: the soliton data, its reduction, and where
/// to sample it.
#[derive(Clone)]
pub struct FamilyMember {
    pub description: String,
    pub spec: SolitonSpec,
    pub ansatz: Ansatz,
    /// Interval of the ansatz coordinate used for reduced-residual grids.
    pub domain: (f64, f64),
    pub sample_box: SampleBox,
    /// The metric is defined on all of ℝⁿ (no semi-space or puncture).
    pub whole_space: bool,
    pub relation: Option<ImplicitRelation>,
    pub sign_variant: Option<SignVariant>,
    pub constants: Vec<(String, f64)>,
    admissible: Arc<Admissible>,
}

impl fmt::Debug for FamilyMember {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FamilyMember")
            .field("description", &self.description)
            .field("ansatz", &self.ansatz.kind())
            .field("domain", &self.domain)
            .field("whole_space", &self.whole_space)
            .field("sign_variant", &self.sign_variant)
            .finish()
    }
}

impl FamilyMember {
    pub fn n(&self) -> usize {
        self.spec.n
    }

    pub fn k(&self) -> usize {
        self.spec.k
    }

    pub fn lambda(&self) -> f64 {
        self.spec.lambda
    }

    /// Whether `x` avoids the singular sets of the member.
    pub fn admissible(&self, x: &[f64]) -> bool {
        (self.admissible)(x) && self.spec.phi.value(x).map(|p| p > 1e-12).unwrap_or(false)
    }

    /// Member built from an arbitrary ansatz; points are admissible when the
    /// ansatz coordinate lies in `domain`.
    pub fn from_ansatz(
        description: impl Into<String>,
        ansatz: Ansatz,
        k: usize,
        lambda: f64,
        domain: (f64, f64),
        sample_box: SampleBox,
    ) -> Result<Self> {
        let spec = spec_of(&ansatz, k, lambda)?;
        if !(domain.0 < domain.1) {
            return Err(Error::input(format!("domain ({}, {}) is empty", domain.0, domain.1)));
        }
        let coord = ansatz.clone();
        let member = FamilyMember {
            description: description.into(),
            spec,
            ansatz,
            domain,
            sample_box: SampleBox::cube(1, 1.0),
            whole_space: false,
            relation: None,
            sign_variant: None,
            constants: vec![],
            admissible: Arc::new(move |x: &[f64]| {
                let t = coord.coordinate(x);
                domain.0 <= t && t <= domain.1
            }),
        };
        member.with_sample_box(sample_box)
    }

    pub fn with_sample_box(mut self, b: SampleBox) -> Result<Self> {
        if b.dim() != self.n() {
            return Err(Error::input(format!(
                "sample box has dimension {}, member {}",
                b.dim(),
                self.n()
            )));
        }
        self.sample_box = b;
        Ok(self)
    }

    pub fn sample(&self, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
        sample_points(&self.sample_box, count, seed, |x| self.admissible(x))
    }

    /// Max-abs soliton residual over `points`.
    pub fn max_soliton_residual(&self, points: &[Vec<f64>]) -> Result<f64> {
        max_residual(&self.spec, points)
    }

    /// Max reduced residual over `grid` uniform points of the domain.
    pub fn max_reduced_residual(&self, grid: usize) -> Result<f64> {
        let (a, b) = self.domain;
        let grid = grid.max(2);
        let vals: Result<Vec<f64>> = (0..grid)
            .into_par_iter()
            .map(|i| {
                let t = if i + 1 == grid {
                    b
                } else {
                    a + (b - a) * i as f64 / (grid - 1) as f64
                };
                self.ansatz
                    .residuals(self.spec.k, self.spec.lambda, t)
                    .map(|r| r.max_abs())
            })
            .collect();
        Ok(vals?.into_iter().fold(0.0, f64::max))
    }
}

fn max_residual(spec: &SolitonSpec, points: &[Vec<f64>]) -> Result<f64> {
    let vals: Result<Vec<f64>> = points
        .par_iter()
        .map(|x| soliton_residual(spec, x).map(|m| max_abs(&m)))
        .collect();
    Ok(vals?.into_iter().fold(0.0, f64::max))
}

struct Candidate {
    label: String,
    ansatz: Ansatz,
}

// Picks the first candidate whose soliton residual vanishes on probe points;
// candidate 0 is the written form.
fn select_variant(
    k: usize,
    lambda: f64,
    candidates: Vec<Candidate>,
    probes: &[Vec<f64>],
) -> Result<(Ansatz, SignVariant)> {
    let mut residuals = Vec::with_capacity(candidates.len());
    for cand in &candidates {
        let spec = spec_of(&cand.ansatz, k, lambda)?;
        residuals.push(max_residual(&spec, probes)?);
    }
    let used = residuals.iter().position(|r| *r <= RESIDUAL_TOL).ok_or_else(|| {
        Error::domain(format!(
            "no potential variant solves the soliton equation (residuals {residuals:?})"
        ))
    })?;
    let variant = SignVariant {
        written: candidates[0].label.clone(),
        used: candidates[used].label.clone(),
        written_residual: residuals[0],
        used_residual: residuals[used],
    };
    let ansatz = candidates.into_iter().nth(used).expect("index in range").ansatz;
    Ok((ansatz, variant))
}

fn spec_of(ansatz: &Ansatz, k: usize, lambda: f64) -> Result<SolitonSpec> {
    match ansatz {
        Ansatz::Translation(a) => a.soliton_spec(k, lambda),
        Ansatz::Rotation(a) => a.soliton_spec(k, lambda),
    }
}

fn probes(b: &SampleBox, adm: &Admissible, phi: &ScalarField) -> Result<Vec<Vec<f64>>> {
    sample_points(b, VARIANT_PROBES, 0, |x| {
        adm(x) && phi.value(x).map(|p| p > 1e-12).unwrap_or(false)
    })
}

fn axis(sig: &Signature, eps: f64) -> Result<Vec<f64>> {
    let i = (0..sig.dim())
        .find(|&i| sig.eps(i) == eps)
        .ok_or_else(|| Error::input(format!("signature {sig} has no entry {eps:+}")))?;
    let mut a = vec![0.0; sig.dim()];
    a[i] = 1.0;
    Ok(a)
}

fn anywhere() -> Arc<Admissible> {
    Arc::new(|_: &[f64]| true)
}

/// Case of the null-curvature rotational classification.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NullCase {
    /// `φ ≡ c₂`, `f` linear in `r`.
    Gaussian,
    /// `φ = c₀r`, `f = A/r + c₁`.
    LinearPhi,
}

/// Rotationally invariant solitons with vanishing `σ₁, …, σₙ`.
///
/// `constant` is `c₂` for [`NullCase::Gaussian`] and `c₀` for
/// [`NullCase::LinearPhi`]; `c1` is the additive constant of `f`. The
/// written potential and its negation are both tried.
pub fn family_rotation_null_curvature(
    sig: &Signature,
    k: usize,
    lambda: f64,
    case: NullCase,
    constant: f64,
    c1: f64,
) -> Result<FamilyMember> {
    let n = sig.dim();
    check_nk(n, k)?;
    check_finite("lambda", lambda)?;
    check_finite("c1", c1)?;
    if !(constant.is_finite() && constant > 0.0) {
        let name = if case == NullCase::Gaussian { "c2" } else { "c0" };
        return Err(Error::input(format!("{name} = {constant} must be positive")));
    }
    let nm1 = n as f64 - 1.0;
    let b = SampleBox::cube(n, 2.0);
    let (phi, interval, adm, written, whole): (AnalyticProfile, _, Arc<Admissible>, f64, bool) = match case {
        NullCase::Gaussian => (
            AnalyticProfile::constant(constant),
            (f64::NEG_INFINITY, f64::INFINITY),
            anywhere(),
            nm1 * lambda / (constant * constant),
            true,
        ),
        NullCase::LinearPhi => {
            let s = sig.clone();
            (
                AnalyticProfile::new(move |r| r * constant),
                (0.0, f64::INFINITY),
                Arc::new(move |x: &[f64]| s.quad(x) >= 1e-2),
                -nm1 * lambda / (constant * constant),
                false,
            )
        }
    };
    let phi = phi.shared();
    let mut candidates = Vec::new();
    for (label, coef) in [("written", written), ("negated", -written)] {
        let f = match case {
            NullCase::Gaussian => AnalyticProfile::new(move |r| r * coef + c1),
            NullCase::LinearPhi => AnalyticProfile::new(move |r| r.recip() * coef + c1),
        };
        let label = match case {
            NullCase::Gaussian => format!("{label}: f = {coef:e}*r + c1"),
            NullCase::LinearPhi => format!("{label}: f = {coef:e}/r + c1"),
        };
        candidates.push(Candidate {
            label,
            ansatz: Ansatz::Rotation(RotationAnsatz::new(sig.clone(), interval, phi.clone(), f.shared())?),
        });
    }
    let phi_field = ScalarField::rotation(sig, phi).positive();
    let pts = probes(&b, adm.as_ref(), &phi_field)?;
    let (ansatz, variant) = select_variant(k, lambda, candidates, &pts)?;
    let spec = spec_of(&ansatz, k, lambda)?;
    let (description, constants) = match case {
        NullCase::Gaussian => (
            "rotational null-curvature soliton, constant conformal factor".to_string(),
            vec![("c2".to_string(), constant), ("c1".to_string(), c1)],
        ),
        NullCase::LinearPhi => (
            "rotational null-curvature soliton, conformal factor c0*r".to_string(),
            vec![("c0".to_string(), constant), ("c1".to_string(), c1)],
        ),
    };
    Ok(FamilyMember {
        description,
        spec,
        ansatz,
        domain: (0.1, 10.0),
        sample_box: b,
        whole_space: whole,
        relation: None,
        sign_variant: Some(variant),
        constants,
        admissible: adm,
    })
}

/// Steady translation member with constant `φ ≡ b` and `f = cξ + d`.
pub fn family_translation_phi_const(sig: &Signature, k: usize, b: f64, c: f64, d: f64) -> Result<FamilyMember> {
    let n = sig.dim();
    check_nk(n, k)?;
    if !(b.is_finite() && b > 0.0) {
        return Err(Error::input(format!("b = {b} must be positive")));
    }
    check_finite("c", c)?;
    check_finite("d", d)?;
    let alpha = axis(sig, 1.0).or_else(|_| axis(sig, -1.0))?;
    let phi = AnalyticProfile::constant(b).shared();
    let f = AnalyticProfile::new(move |t| t * c + d).shared();
    let a = TranslationAnsatz::new(alpha, sig.clone(), phi, f)?;
    Ok(FamilyMember {
        description: "translation soliton with constant conformal factor".into(),
        spec: a.soliton_spec(k, 0.0)?,
        ansatz: Ansatz::Translation(a),
        domain: (-3.0, 3.0),
        sample_box: SampleBox::cube(n, 2.0),
        whole_space: true,
        relation: None,
        sign_variant: None,
        constants: vec![("b".into(), b), ("c".into(), c), ("d".into(), d)],
        admissible: anywhere(),
    })
}

/// Light-like steady member: `α = e₁ + e₂` with `ε₁ = −ε₂`,
/// `φ = 1/(1+ξ^{2θ})` and `f = d + ∫_{ξ₀}^{ξ} c/φ²` by quadrature from the
/// left end of `domain`.
pub fn family_lightlike_steady(
    sig: &Signature,
    k: usize,
    theta: u32,
    c: f64,
    d: f64,
    domain: (f64, f64),
) -> Result<FamilyMember> {
    let n = sig.dim();
    check_nk(n, k)?;
    let alpha = lightlike_alpha(sig)?;
    if theta == 0 {
        return Err(Error::input("theta must be a positive integer"));
    }
    check_finite("c", c)?;
    check_finite("d", d)?;
    let phi = lightlike_bump_phi(theta).shared();
    let f: Arc<dyn Profile> = Arc::new(potential_from_phi(phi.clone(), domain, c, d)?);
    let a = TranslationAnsatz::new(alpha.clone(), sig.clone(), phi, f)?;
    let box_ = xi_box(n, &alpha, domain);
    let al = alpha.clone();
    let (lo, hi) = domain;
    Ok(FamilyMember {
        description: "light-like steady translation soliton, potential by quadrature".into(),
        spec: a.soliton_spec(k, 0.0)?,
        ansatz: Ansatz::Translation(a),
        domain,
        sample_box: box_,
        whole_space: true,
        relation: None,
        sign_variant: None,
        constants: vec![("theta".into(), theta as f64), ("c".into(), c), ("d".into(), d)],
        admissible: Arc::new(move |x: &[f64]| {
            let xi: f64 = al.iter().zip(x).map(|(a, b)| a * b).sum();
            lo <= xi && xi <= hi
        }),
    })
}

fn lightlike_alpha(sig: &Signature) -> Result<Vec<f64>> {
    if sig.eps(0) != -sig.eps(1) {
        return Err(Error::input(format!(
            "signature {sig}: light-like alpha = e1 + e2 needs eps1 = -eps2"
        )));
    }
    let mut a = vec![0.0; sig.dim()];
    a[0] = 1.0;
    a[1] = 1.0;
    Ok(a)
}

// Box whose projection on α covers `domain`; α must be e_i or e₁ + e₂.
fn xi_box(n: usize, alpha: &[f64], domain: (f64, f64)) -> SampleBox {
    let mut lo = vec![-1.0; n];
    let mut hi = vec![1.0; n];
    let nz: Vec<usize> = (0..n).filter(|&i| alpha[i] != 0.0).collect();
    if nz.len() == 1 {
        let i = nz[0];
        lo[i] = domain.0 / alpha[i];
        hi[i] = domain.1 / alpha[i];
        if lo[i] > hi[i] {
            std::mem::swap(&mut lo[i], &mut hi[i]);
        }
    } else {
        let h = 0.5 * domain.0.abs().max(domain.1.abs());
        for &i in &nz {
            lo[i] = -h;
            hi[i] = h;
        }
    }
    SampleBox::new(lo, hi).expect("valid box")
}

fn lightlike_bump_phi(theta: u32) -> AnalyticProfile {
    let m = 2 * theta as i32;
    AnalyticProfile::new(move |t| (t.powi(m) + 1.0).recip())
}

/// Implicit translation member of the `n ≠ 2k` or `n = 2k` family, lifted
/// along the first axis with `ε = alpha_sign`.
#[allow(clippy::too_many_arguments)]
pub fn family_translation_implicit(
    sig: &Signature,
    k: usize,
    c: f64,
    c1: f64,
    c2: f64,
    d: f64,
    phi0: f64,
    alpha_sign: f64,
) -> Result<FamilyMember> {
    let n = sig.dim();
    check_nk(n, k)?;
    let rel = if n == 2 * k {
        family_translation_n_eq_2k(n, c, c1, c2, phi0, alpha_sign)?
    } else {
        family_translation_n_ne_2k(n, k, c, c1, c2, phi0, alpha_sign)?
    };
    let alpha = axis(sig, alpha_sign)?;
    let domain = default_xi_range(&rel)?;
    let phi: Arc<dyn Profile> = Arc::new(ImplicitProfile::new(rel.clone()));
    let f: Arc<dyn Profile> = Arc::new(ImplicitPotential::new(rel.clone(), c, d));
    let a = TranslationAnsatz::new(alpha.clone(), sig.clone(), phi, f)?;
    let al = alpha.clone();
    let description = if n == 2 * k {
        "steady translation soliton, n = 2k, implicit profile"
    } else {
        "steady translation soliton, n != 2k, implicit profile"
    };
    Ok(FamilyMember {
        description: description.into(),
        spec: a.soliton_spec(k, 0.0)?,
        ansatz: Ansatz::Translation(a),
        domain,
        sample_box: xi_box(n, &alpha, domain),
        whole_space: false,
        relation: Some(rel),
        sign_variant: None,
        constants: vec![
            ("c".into(), c),
            ("c1".into(), c1),
            ("c2".into(), c2),
            ("d".into(), d),
            ("phi0".into(), phi0),
            ("alpha_sign".into(), alpha_sign),
        ],
        admissible: Arc::new(move |x: &[f64]| {
            let xi: f64 = al.iter().zip(x).map(|(a, b)| a * b).sum();
            domain.0 <= xi && xi <= domain.1
        }),
    })
}

/// `ξ` interval on which the profile runs over `[φ₀/2, 2φ₀]`, shrunk to stay
/// inside the bracket.
pub fn default_xi_range(rel: &ImplicitRelation) -> Result<(f64, f64)> {
    let p0 = rel.phi0();
    let (lo, hi) = rel.bracket();
    let a = (0.5 * p0).max(lo + 0.1 * (p0 - lo));
    let b = (2.0 * p0).min(hi - 0.1 * (hi - p0));
    rel.xi_interval_for(a, b)
}

/// Identifiers of the example catalog.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CatalogId {
    Ex21,
    Ex22,
    Ex23,
    Ex24,
    Ex25,
    Ex26,
}

impl CatalogId {
    pub const ALL: [CatalogId; 6] = [
        CatalogId::Ex21,
        CatalogId::Ex22,
        CatalogId::Ex23,
        CatalogId::Ex24,
        CatalogId::Ex25,
        CatalogId::Ex26,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            CatalogId::Ex21 => "EX21",
            CatalogId::Ex22 => "EX22",
            CatalogId::Ex23 => "EX23",
            CatalogId::Ex24 => "EX24_GAUSSIAN",
            CatalogId::Ex25 => "EX25_LINEAR",
            CatalogId::Ex26 => "EX26_CIGARLIKE",
        }
    }

    pub fn summary(&self) -> &'static str {
        match self {
            CatalogId::Ex21 => "Lorentzian light-like steady soliton, phi = 1/(1+xi^(2 theta))",
            CatalogId::Ex22 => "steady soliton on a semi-space, phi^((2k-n)/2k) = xi + c1",
            CatalogId::Ex23 => "steady soliton on a semi-space, n = 2k, phi = (n xi/(n-1) + c4)^((n-1)/n)",
            CatalogId::Ex24 => "Gaussian soliton, flat metric with quadratic potential",
            CatalogId::Ex25 => "Riemannian soliton on R^n minus 0, phi = c0 r, k != 1",
            CatalogId::Ex26 => "Riemannian cigar-like soliton, phi = sqrt(1+r), k = 1",
        }
    }

    /// Parameters each entry reads.
    pub fn parameters(&self) -> &'static [&'static str] {
        match self {
            CatalogId::Ex21 => &["n", "k", "theta", "c"],
            CatalogId::Ex22 => &["n", "k", "c0", "c1", "signature"],
            CatalogId::Ex23 => &["n", "c3", "c4", "signature"],
            CatalogId::Ex24 => &["n", "k", "lambda", "c1", "signature"],
            CatalogId::Ex25 => &["n", "k", "lambda", "c0", "c1"],
            CatalogId::Ex26 => &["n", "c0"],
        }
    }
}

impl fmt::Display for CatalogId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CatalogId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let u = s.to_ascii_uppercase();
        CatalogId::ALL
            .into_iter()
            .find(|id| id.as_str() == u || id.as_str().split('_').next() == Some(u.as_str()))
            .ok_or_else(|| {
                Error::input(format!(
                    "unknown catalog id {s:?}; expected one of EX21, EX22, EX23, EX24_GAUSSIAN, EX25_LINEAR, EX26_CIGARLIKE"
                ))
            })
    }
}

/// Optional parameters of a catalog entry; unset values take defaults.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CatalogParams {
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub lambda: Option<f64>,
    pub signature: Option<Signature>,
    pub theta: Option<u32>,
    pub c: Option<f64>,
    pub c0: Option<f64>,
    pub c1: Option<f64>,
    pub c3: Option<f64>,
    pub c4: Option<f64>,
}

/// One catalog example.
#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub id: CatalogId,
    pub member: FamilyMember,
    pub expected_lambda: f64,
    /// Admissible `k`, inclusive.
    pub k_range: (usize, usize),
}

fn fixed_lambda(id: CatalogId, given: Option<f64>, value: f64) -> Result<f64> {
    match given {
        Some(l) if (l - value).abs() > 1e-15 * value.abs().max(1.0) => {
            Err(Error::input(format!("lambda = {l}: {id} has soliton constant {value}")))
        }
        _ => Ok(value),
    }
}

fn riemannian_only(id: CatalogId, sig: Option<&Signature>) -> Result<()> {
    match sig {
        Some(s) if !s.is_riemannian() => Err(Error::input(format!("signature {s}: {id} is Riemannian"))),
        _ => Ok(()),
    }
}

fn resolve_sig(n: usize, given: Option<&Signature>, default: Signature) -> Result<Signature> {
    match given {
        Some(s) if s.dim() != n => Err(Error::input(format!("signature has {} entries but n = {n}", s.dim()))),
        Some(s) => Ok(s.clone()),
        None => Ok(default),
    }
}

/// Build a catalog entry and check it against the soliton equation on probe
/// points of its sample box.
pub fn catalog(id: CatalogId, params: &CatalogParams) -> Result<CatalogEntry> {
    let n = params
        .n
        .or_else(|| params.signature.as_ref().map(|s| s.dim()))
        .unwrap_or(if id == CatalogId::Ex23 { 4 } else { 3 });
    if !(2..=crate::jet::MAX_DIM).contains(&n) {
        return Err(Error::input(format!("n = {n} must lie in 2..={}", crate::jet::MAX_DIM)));
    }
    let sig_in = params.signature.as_ref();
    let entry = match id {
        CatalogId::Ex21 => {
            let sig = resolve_sig(n, sig_in, Signature::lorentzian(n))?;
            let k = params.k.unwrap_or(1);
            check_nk(n, k)?;
            let lambda = fixed_lambda(id, params.lambda, 0.0)?;
            let theta = params.theta.unwrap_or(1);
            if theta == 0 {
                return Err(Error::input("theta must be a positive integer"));
            }
            let c = params.c.unwrap_or(1.0);
            check_finite("c", c)?;
            let alpha = lightlike_alpha(&sig)?;
            let th = theta as i32;
            let f = AnalyticProfile::new(move |t| {
                t * c
                    + t.powi(2 * th + 1) * (2.0 * c / (2 * th + 1) as f64)
                    + t.powi(4 * th + 1) * (c / (4 * th + 1) as f64)
            });
            let written = Candidate {
                label: "f = c xi + 2c xi^(2t+1)/(2t+1) + c xi^(4t+1)/(4t+1)".into(),
                ansatz: Ansatz::Translation(TranslationAnsatz::new(
                    alpha.clone(),
                    sig.clone(),
                    lightlike_bump_phi(theta).shared(),
                    f.shared(),
                )?),
            };
            let neg = AnalyticProfile::new(move |t| {
                -(t * c
                    + t.powi(2 * th + 1) * (2.0 * c / (2 * th + 1) as f64)
                    + t.powi(4 * th + 1) * (c / (4 * th + 1) as f64))
            });
            let negated = Candidate {
                label: "f negated".into(),
                ansatz: Ansatz::Translation(TranslationAnsatz::new(
                    alpha.clone(),
                    sig.clone(),
                    lightlike_bump_phi(theta).shared(),
                    neg.shared(),
                )?),
            };
            let b = SampleBox::cube(n, 1.5);
            let phi = ScalarField::translation(&alpha, lightlike_bump_phi(theta).shared());
            let adm = anywhere();
            let pts = probes(&b, adm.as_ref(), &phi)?;
            let (ansatz, variant) = select_variant(k, lambda, vec![written, negated], &pts)?;
            CatalogEntry {
                id,
                member: FamilyMember {
                    description: id.summary().into(),
                    spec: spec_of(&ansatz, k, lambda)?,
                    ansatz,
                    domain: (-3.0, 3.0),
                    sample_box: b,
                    whole_space: true,
                    relation: None,
                    sign_variant: Some(variant),
                    constants: vec![("theta".into(), theta as f64), ("c".into(), c)],
                    admissible: adm,
                },
                expected_lambda: 0.0,
                k_range: (1, n),
            }
        }
        CatalogId::Ex22 => {
            let sig = resolve_sig(n, sig_in, Signature::euclidean(n))?;
            let k = params.k.unwrap_or(if n == 2 { 2 } else { 1 });
            check_nk(n, k)?;
            if n == 2 * k {
                return Err(Error::input(format!("{id} needs n != 2k (n = {n}, k = {k})")));
            }
            let lambda = fixed_lambda(id, params.lambda, 0.0)?;
            let c1 = params.c1.unwrap_or(0.0);
            let c0 = params.c0.unwrap_or(0.0);
            check_finite("c1", c1)?;
            check_finite("c0", c0)?;
            let alpha = axis(&sig, 1.0)?;
            let m = 2.0 * k as f64 / (2.0 * k as f64 - n as f64);
            let phi = AnalyticProfile::new(move |t| (t + c1).powf(m)).shared();
            let f = AnalyticProfile::constant(c0).shared();
            semi_space_entry(
                id,
                &sig,
                k,
                lambda,
                alpha,
                phi,
                f,
                c1,
                1.0,
                vec![("c0".into(), c0), ("c1".into(), c1)],
                (1, n),
            )?
        }
        CatalogId::Ex23 => {
            let sig = resolve_sig(n, sig_in, Signature::euclidean(n))?;
            if !n.is_multiple_of(2) || n < 4 {
                return Err(Error::input(format!("{id} needs an even n >= 4, got {n}")));
            }
            let k = n / 2;
            if let Some(kk) = params.k {
                if kk != k {
                    return Err(Error::input(format!("{id} fixes k = n/2 = {k}, got {kk}")));
                }
            }
            let lambda = fixed_lambda(id, params.lambda, 0.0)?;
            let c3 = params.c3.unwrap_or(0.0);
            let c4 = params.c4.unwrap_or(0.0);
            check_finite("c3", c3)?;
            check_finite("c4", c4)?;
            let nf = n as f64;
            let c = b_nk(n, k) * nf * nf;
            let s = nf / (nf - 1.0);
            let alpha = axis(&sig, 1.0)?;
            let phi = AnalyticProfile::new(move |t| (t * s + c4).powf((nf - 1.0) / nf)).shared();
            let f =
                AnalyticProfile::new(move |t| (t * s + c4).powf(2.0 / nf - 1.0) * (-c * (nf - 1.0) / (nf - 2.0)) + c3)
                    .shared();
            // The semi-space is s·ξ + c₄ > 0.
            semi_space_entry(
                id,
                &sig,
                k,
                lambda,
                alpha,
                phi,
                f,
                c4 / s,
                s,
                vec![("c3".into(), c3), ("c4".into(), c4)],
                (k, k),
            )?
        }
        CatalogId::Ex24 => {
            let sig = resolve_sig(n, sig_in, Signature::euclidean(n))?;
            let k = params.k.unwrap_or(1);
            check_nk(n, k)?;
            let lambda = params.lambda.unwrap_or(1.0);
            check_finite("lambda", lambda)?;
            let c1 = params.c1.unwrap_or(0.0);
            check_finite("c1", c1)?;
            let nm1 = n as f64 - 1.0;
            let mut candidates = Vec::new();
            for (label, coef) in [
                ("written: f = (lambda/2)|x|^2 + c1", 0.5 * lambda),
                ("f = -(lambda/2)|x|^2 + c1", -0.5 * lambda),
                ("f = (n-1)lambda|x|^2 + c1", nm1 * lambda),
                ("f = -(n-1)lambda|x|^2 + c1", -nm1 * lambda),
            ] {
                candidates.push(Candidate {
                    label: label.into(),
                    ansatz: Ansatz::Rotation(RotationAnsatz::new(
                        sig.clone(),
                        (f64::NEG_INFINITY, f64::INFINITY),
                        AnalyticProfile::constant(1.0).shared(),
                        AnalyticProfile::new(move |r| r * coef + c1).shared(),
                    )?),
                });
            }
            let b = SampleBox::cube(n, 2.0);
            let adm = anywhere();
            let pts = probes(&b, adm.as_ref(), &ScalarField::constant(n, 1.0))?;
            let (ansatz, variant) = select_variant(k, lambda, candidates, &pts)?;
            CatalogEntry {
                id,
                member: FamilyMember {
                    description: id.summary().into(),
                    spec: spec_of(&ansatz, k, lambda)?,
                    ansatz,
                    domain: (0.1, 10.0),
                    sample_box: b,
                    whole_space: true,
                    relation: None,
                    sign_variant: Some(variant),
                    constants: vec![("c1".into(), c1)],
                    admissible: adm,
                },
                expected_lambda: lambda,
                k_range: (1, n),
            }
        }
        CatalogId::Ex25 => {
            riemannian_only(id, sig_in)?;
            let sig = resolve_sig(n, sig_in, Signature::euclidean(n))?;
            let k = params.k.unwrap_or(2);
            check_nk(n, k)?;
            if k == 1 {
                return Err(Error::input(format!("{id} needs k != 1")));
            }
            let lambda = params.lambda.unwrap_or(1.0);
            let c0 = params.c0.unwrap_or(1.0);
            let c1 = params.c1.unwrap_or(0.0);
            let member = family_rotation_null_curvature(&sig, k, lambda, NullCase::LinearPhi, c0, c1)?;
            CatalogEntry {
                id,
                member: FamilyMember {
                    description: id.summary().into(),
                    ..member
                },
                expected_lambda: lambda,
                k_range: (2, n),
            }
        }
        CatalogId::Ex26 => {
            riemannian_only(id, sig_in)?;
            let sig = resolve_sig(n, sig_in, Signature::euclidean(n))?;
            if let Some(k) = params.k {
                if k != 1 {
                    return Err(Error::input(format!("{id} fixes k = 1, got {k}")));
                }
            }
            let nf = n as f64;
            let lambda = fixed_lambda(id, params.lambda, (nf - 2.0) / 2.0)?;
            let c0 = params.c0.unwrap_or(0.0);
            check_finite("c0", c0)?;
            let amp = (nf - 1.0) * (nf + 2.0) / 2.0;
            let mut candidates = Vec::new();
            for (label, a) in [
                ("written: f = (n-1)(n+2)/2 log(1+r) + c0", amp),
                ("f = -(n-1)(n+2)/2 log(1+r) + c0", -amp),
            ] {
                candidates.push(Candidate {
                    label: label.into(),
                    ansatz: Ansatz::Rotation(RotationAnsatz::new(
                        sig.clone(),
                        (-1.0, f64::INFINITY),
                        AnalyticProfile::new(|r| (r + 1.0).sqrt()).shared(),
                        AnalyticProfile::new(move |r| (r + 1.0).ln() * a + c0).shared(),
                    )?),
                });
            }
            let b = SampleBox::cube(n, 2.0);
            let adm = anywhere();
            let phi = ScalarField::rotation(&sig, AnalyticProfile::new(|r| (r + 1.0).sqrt()).shared());
            let pts = probes(&b, adm.as_ref(), &phi)?;
            let (ansatz, variant) = select_variant(1, lambda, candidates, &pts)?;
            CatalogEntry {
                id,
                member: FamilyMember {
                    description: id.summary().into(),
                    spec: spec_of(&ansatz, 1, lambda)?,
                    ansatz,
                    domain: (0.0, 10.0),
                    sample_box: b,
                    whole_space: true,
                    relation: None,
                    sign_variant: Some(variant),
                    constants: vec![("c0".into(), c0)],
                    admissible: adm,
                },
                expected_lambda: lambda,
                k_range: (1, 1),
            }
        }
    };
    Ok(entry)
}

// Closed-form steady member on the semi-space `scale·(ξ + shift) > 0`.
#[allow(clippy::too_many_arguments)]
fn semi_space_entry(
    id: CatalogId,
    sig: &Signature,
    k: usize,
    lambda: f64,
    alpha: Vec<f64>,
    phi: Arc<dyn Profile>,
    f: Arc<dyn Profile>,
    shift: f64,
    scale: f64,
    constants: Vec<(String, f64)>,
    k_range: (usize, usize),
) -> Result<CatalogEntry> {
    let n = sig.dim();
    // Base s = scale·(ξ + shift) sampled in [1/2, 2].
    let domain = (0.5 / scale - shift, 2.0 / scale - shift);
    let b = xi_box(n, &alpha, domain);
    let al = alpha.clone();
    let adm: Arc<Admissible> = Arc::new(move |x: &[f64]| {
        let xi: f64 = al.iter().zip(x).map(|(a, b)| a * b).sum();
        scale * (xi + shift) > SINGULAR_MARGIN
    });
    let a = TranslationAnsatz::new(alpha, sig.clone(), phi, f)?;
    let ansatz = Ansatz::Translation(a);
    let spec = spec_of(&ansatz, k, lambda)?;
    let pts = probes(&b, adm.as_ref(), &spec.phi)?;
    let r = max_residual(&spec, &pts)?;
    if r > RESIDUAL_TOL {
        return Err(Error::domain(format!("{id} residual {r:e} exceeds {RESIDUAL_TOL:e}")));
    }
    Ok(CatalogEntry {
        id,
        member: FamilyMember {
            description: id.summary().into(),
            spec,
            ansatz,
            domain,
            sample_box: b,
            whole_space: false,
            relation: None,
            sign_variant: Some(SignVariant {
                written: "as written".into(),
                used: "as written".into(),
                written_residual: r,
                used_residual: r,
            }),
            constants,
            admissible: adm,
        },
        expected_lambda: lambda,
        k_range,
    })
}

/// Family selector used by front-ends.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyTag {
    LightlikeSteady,
    TranslationPhiConst,
    TranslationNNe2k,
    TranslationNEq2k,
    RotationGaussian,
    RotationLinearPhi,
    Catalog,
}

impl FamilyTag {
    pub const ALL: [FamilyTag; 7] = [
        FamilyTag::LightlikeSteady,
        FamilyTag::TranslationPhiConst,
        FamilyTag::TranslationNNe2k,
        FamilyTag::TranslationNEq2k,
        FamilyTag::RotationGaussian,
        FamilyTag::RotationLinearPhi,
        FamilyTag::Catalog,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            FamilyTag::LightlikeSteady => "LIGHTLIKE_STEADY",
            FamilyTag::TranslationPhiConst => "TRANSLATION_PHI_CONST",
            FamilyTag::TranslationNNe2k => "TRANSLATION_N_NE_2K",
            FamilyTag::TranslationNEq2k => "TRANSLATION_N_EQ_2K",
            FamilyTag::RotationGaussian => "ROTATION_GAUSSIAN",
            FamilyTag::RotationLinearPhi => "ROTATION_LINEAR_PHI",
            FamilyTag::Catalog => "CATALOG",
        }
    }
}

impl fmt::Display for FamilyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FamilyTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FamilyTag::ALL
            .into_iter()
            .find(|t| t.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::input(format!("unknown family tag {s:?}")))
    }
}
