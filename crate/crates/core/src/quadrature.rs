//! Implicit solutions `∫_{φ₀}^{φ} g = s·ξ + c` realised numerically.
//!
//! [`integrate`] is an adaptive Gauss–Kronrod (10/21) scheme, [`brent`] a
//! bracketed root finder. An [`ImplicitRelation`] combines them to evaluate
//! the antiderivative and invert it, and [`build_profile`] tabulates the
//! inverted profile and certifies it against the governing ODE.

use std::fmt;
use std::io::{Read, Write};
use std::sync::Arc;

use nalgebra::SMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::Profile;
use crate::jet::{Jet1, Real};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_1,
    0.973_906_528_517_171_7,
    0.930_157_491_355_708_2,
    0.865_063_366_688_984_5,
    0.780_817_726_586_416_9,
    0.679_409_568_299_024_4,
    0.562_757_134_668_604_7,
    0.433_395_394_129_247_2,
    0.294_392_862_701_460_2,
    0.148_874_338_981_631_2,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874,
    0.032_558_162_307_964_73,
    0.054_755_896_574_351_996,
    0.075_039_674_810_919_95,
    0.093_125_454_583_697_6,
    0.109_387_158_802_297_64,
    0.123_491_976_262_065_85,
    0.134_709_217_311_473_33,
    0.142_775_938_577_060_08,
    0.147_739_104_901_338_49,
    0.149_445_554_002_916_9,
];

// Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 5] = [
    0.066_671_344_308_688_14,
    0.149_451_349_150_580_6,
    0.219_086_362_515_982_04,
    0.269_266_719_309_996_36,
    0.295_524_224_714_752_87,
];

/// Smallest grid accepted by [`build_profile`].
pub const MIN_GRID: usize = 33;

/// Default certification threshold for tabulated profiles.
pub const CERT_TOL: f64 = 1e-6;

const SCAN_DECADES: f64 = 10.0;
const SCAN_STEPS_PER_DECADE: f64 = 8.0;
const INVERT_RTOL: f64 = 1e-15;

/// Stopping rules for [`integrate`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Bisection depth at which a panel is declared non-integrable.
    pub max_depth: u32,
    pub max_panels: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            abs_tol: 1e-10,
            rel_tol: 1e-12,
            max_depth: 60,
            max_panels: 20_000,
        }
    }
}

impl QuadOptions {
    /// Tolerances near machine precision.
    pub fn tight() -> Self {
        QuadOptions {
            abs_tol: 1e-15,
            rel_tol: 1e-14,
            ..Default::default()
        }
    }
}

#[derive(Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    val: f64,
    err: f64,
    floor: f64,
    depth: u32,
}

fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, depth: u32) -> Result<Panel> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = WGK[10] * fc;
    let mut gauss = 0.0;
    let mut abs = WGK[10] * fc.abs();
    for j in 0..10 {
        let dx = h * XGK[j];
        let (f1, f2) = (f(c - dx), f(c + dx));
        if !(f1.is_finite() && f2.is_finite()) {
            return Err(Error::Quadrature(format!(
                "integrand not finite near {} on [{a}, {b}]",
                if f1.is_finite() { c + dx } else { c - dx }
            )));
        }
        kron += WGK[j] * (f1 + f2);
        abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    if !fc.is_finite() {
        return Err(Error::Quadrature(format!("integrand not finite at {c}")));
    }
    Ok(Panel {
        a,
        b,
        val: kron * h,
        err: ((kron - gauss) * h).abs(),
        floor: 50.0 * f64::EPSILON * abs * h.abs(),
        depth,
    })
}

/// Adaptive Gauss–Kronrod quadrature of `f` over `[a, b]`.
///
/// The panel with the largest error estimate is bisected until the summed
/// estimate meets `max(abs_tol, rel_tol·|I|)` or the rounding floor. A panel
/// that needs splitting beyond `max_depth` signals a non-integrable endpoint.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: &QuadOptions) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::input(format!("integration limits [{a}, {b}] not finite")));
    }
    if a == b {
        return Ok(0.0);
    }
    let mut panels = vec![gk21(&f, a, b, 0)?];
    loop {
        let (val, err, floor) = panels
            .iter()
            .fold((0.0, 0.0, 0.0), |(v, e, r), p| (v + p.val, e + p.err, r + p.floor));
        if err <= opts.abs_tol.max(opts.rel_tol * val.abs()).max(floor) {
            return Ok(val);
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.err.total_cmp(&y.1.err))
            .expect("non-empty panel list");
        let p = panels.swap_remove(worst);
        if p.depth >= opts.max_depth || panels.len() + 2 > opts.max_panels {
            return Err(Error::Quadrature(format!(
                "no convergence on [{a}, {b}]: panel [{}, {}] at depth {} still has error {:.3e}",
                p.a, p.b, p.depth, p.err
            )));
        }
        let m = 0.5 * (p.a + p.b);
        panels.push(gk21(&f, p.a, m, p.depth + 1)?);
        panels.push(gk21(&f, m, p.b, p.depth + 1)?);
    }
}

/// Brent's method on a sign-changing bracket `[a, b]` with known `f(a)`, `f(b)`.
///
/// Stops when the bracket is narrower than `2ε|x| + rtol·|x|`.
pub fn brent<F>(mut f: F, a: f64, b: f64, fa: f64, fb: f64, rtol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Root(format!("no sign change on [{a}, {b}]: f = {fa:e}, {fb:e}")));
    }
    let (mut a, mut b, mut fa, mut fb) = (a, b, fa, fb);
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..300 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * rtol * b.abs();
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b)?;
    }
    Err(Error::Root(format!("no convergence near {b}")))
}

/// Integrand of an implicit relation, written against [`Jet1`] so that its
/// derivative is available for exact profile derivatives.
pub type Integrand = dyn Fn(Jet1) -> Jet1 + Send + Sync;

/// Residual of the second-order ODE the inverted profile must satisfy, as a
/// function of `(φ, φ′, φ″)`.
pub type OdeResidual = dyn Fn(f64, f64, f64) -> f64 + Send + Sync;

/// `∫_{φ₀}^{φ} g(s) ds = slope·ξ + offset` on a bracket where `g` is finite
/// and single-signed.
#[derive(Clone)]
pub struct ImplicitRelation {
    integrand: Arc<Integrand>,
    ode: Arc<OdeResidual>,
    phi0: f64,
    slope: f64,
    offset: f64,
    bracket: (f64, f64),
    sign: f64,
}

impl fmt::Debug for ImplicitRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ImplicitRelation")
            .field("phi0", &self.phi0)
            .field("slope", &self.slope)
            .field("offset", &self.offset)
            .field("bracket", &self.bracket)
            .finish()
    }
}

/// Maximal interval around `phi0` on which `g` is finite, nonzero and keeps
/// the sign of `g(phi0)`, found by a log-spaced scan refined by bisection.
///
/// Ends that are never reached stop at `phi0·10^{±10}`.
pub fn discover_bracket<G: Fn(f64) -> f64>(g: G, phi0: f64) -> Result<(f64, f64)> {
    if !(phi0.is_finite() && phi0 > 0.0) {
        return Err(Error::input(format!("base point phi0 = {phi0} must be positive")));
    }
    let g0 = g(phi0);
    if !(g0.is_finite() && g0 != 0.0) {
        return Err(Error::domain(format!(
            "integrand is {g0} at the base point phi0 = {phi0}"
        )));
    }
    let s = g0.signum();
    let ok = |p: f64| {
        let v = g(p);
        p > 0.0 && v.is_finite() && v != 0.0 && v.signum() == s
    };
    let step = 10f64.powf(1.0 / SCAN_STEPS_PER_DECADE);
    let n = (SCAN_DECADES * SCAN_STEPS_PER_DECADE) as i32;
    let edge = |dir: f64| {
        let mut good = phi0;
        for j in 1..=n {
            let cand = phi0 * step.powf(dir * j as f64);
            if !ok(cand) {
                let mut bad = cand;
                for _ in 0..200 {
                    let mid = 0.5 * (good + bad);
                    if mid == good || mid == bad {
                        break;
                    }
                    if ok(mid) {
                        good = mid;
                    } else {
                        bad = mid;
                    }
                }
                return bad;
            }
            good = cand;
        }
        good
    };
    Ok((edge(-1.0), edge(1.0)))
}

impl ImplicitRelation {
    pub fn new<G, R>(integrand: G, phi0: f64, slope: f64, offset: f64, ode: R) -> Result<Self>
    where
        G: Fn(Jet1) -> Jet1 + Send + Sync + 'static,
        R: Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
    {
        if !(slope.is_finite() && slope != 0.0 && offset.is_finite()) {
            return Err(Error::input(format!(
                "right side {slope}·xi + {offset} must have a finite nonzero slope"
            )));
        }
        let bracket = discover_bracket(|p| integrand(Jet1::cst(p)).v, phi0)?;
        let sign = integrand(Jet1::cst(phi0)).v.signum();
        Ok(ImplicitRelation {
            integrand: Arc::new(integrand),
            ode: Arc::new(ode),
            phi0,
            slope,
            offset,
            bracket,
            sign,
        })
    }

    pub fn phi0(&self) -> f64 {
        self.phi0
    }

    pub fn slope(&self) -> f64 {
        self.slope
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Open interval of admissible `φ`.
    pub fn bracket(&self) -> (f64, f64) {
        self.bracket
    }

    pub fn integrand(&self, phi: f64) -> f64 {
        (self.integrand)(Jet1::cst(phi)).v
    }

    pub fn integrand_jet(&self, phi: f64) -> Jet1 {
        (self.integrand)(Jet1::var(phi))
    }

    pub fn rhs(&self, xi: f64) -> f64 {
        self.slope * xi + self.offset
    }

    /// The `ξ` at which `φ = φ₀`.
    pub fn base_xi(&self) -> f64 {
        -self.offset / self.slope
    }

    pub fn ode_residual(&self, phi: f64, d1: f64, d2: f64) -> f64 {
        (self.ode)(phi, d1, d2)
    }

    fn inside(&self, phi: f64) -> bool {
        self.bracket.0 < phi && phi < self.bracket.1
    }

    /// `∫_{φ₀}^{φ} g`.
    pub fn antiderivative(&self, phi: f64) -> Result<f64> {
        if !self.inside(phi) {
            return Err(Error::OutOfRange {
                what: "phi",
                value: phi,
                lo: self.bracket.0,
                hi: self.bracket.1,
            });
        }
        integrate(|p| self.integrand(p), self.phi0, phi, &QuadOptions::tight())
    }

    fn end_value(&self, end: f64) -> f64 {
        let dir = (end - self.phi0).signum();
        integrate(|p| self.integrand(p), self.phi0, end, &QuadOptions::default())
            .unwrap_or(dir * self.sign * f64::INFINITY)
    }

    /// Range of the antiderivative over the bracket (possibly infinite).
    pub fn antiderivative_range(&self) -> (f64, f64) {
        let a = self.end_value(self.bracket.0);
        let b = self.end_value(self.bracket.1);
        (a.min(b), a.max(b))
    }

    /// Interval of `ξ` for which [`invert`](Self::invert) succeeds.
    pub fn admissible_xi_interval(&self) -> (f64, f64) {
        let (lo, hi) = self.antiderivative_range();
        let a = (lo - self.offset) / self.slope;
        let b = (hi - self.offset) / self.slope;
        (a.min(b), a.max(b))
    }

    /// The `ξ` interval on which `φ` runs between two admissible values.
    pub fn xi_interval_for(&self, phi_a: f64, phi_b: f64) -> Result<(f64, f64)> {
        let a = (self.antiderivative(phi_a)? - self.offset) / self.slope;
        let b = (self.antiderivative(phi_b)? - self.offset) / self.slope;
        Ok((a.min(b), a.max(b)))
    }

    fn out_of_range(&self, xi: f64) -> Error {
        let (lo, hi) = self.admissible_xi_interval();
        Error::OutOfRange {
            what: "xi",
            value: xi,
            lo,
            hi,
        }
    }

    /// Solve `∫_{φ₀}^{φ} g = slope·ξ + offset` for `φ`.
    pub fn invert(&self, xi: f64) -> Result<f64> {
        if !xi.is_finite() {
            return Err(Error::input(format!("xi = {xi} is not finite")));
        }
        let y = self.rhs(xi);
        if y == 0.0 {
            return Ok(self.phi0);
        }
        let up = y * self.sign > 0.0;
        let end = if up { self.bracket.1 } else { self.bracket.0 };
        let opts = QuadOptions::tight();
        let g = |p: f64| self.integrand(p);
        let (mut a, mut fa) = (self.phi0, -y);
        for _ in 0..400 {
            let cand = if up { 2.0 * a } else { 0.5 * a };
            let b = if (up && cand < end) || (!up && cand > end) {
                cand
            } else {
                a + 0.5 * (end - a)
            };
            if b == a || ((end - b) / end).abs() < 1e-13 {
                break;
            }
            let Ok(seg) = integrate(g, a, b, &opts) else {
                break;
            };
            let fb = fa + seg;
            if fb == 0.0 {
                return Ok(b);
            }
            if fb.signum() != fa.signum() {
                let a0 = a;
                let fa0 = fa;
                return brent(|p| Ok(fa0 + integrate(g, a0, p, &opts)?), a, b, fa, fb, INVERT_RTOL);
            }
            a = b;
            fa = fb;
        }
        Err(self.out_of_range(xi))
    }

    /// `(φ′, φ″)` at a point where the profile takes the value `phi`, from
    /// differentiating the relation.
    pub fn derivatives(&self, phi: f64) -> (f64, f64) {
        let g = self.integrand_jet(phi);
        let d1 = self.slope / g.v;
        let d2 = -self.slope * self.slope * g.d1 / (g.v * g.v * g.v);
        (d1, d2)
    }
}

/// The inverted profile `ξ ↦ φ(ξ)` with derivatives from the relation.
#[derive(Clone, Debug)]
pub struct ImplicitProfile {
    rel: ImplicitRelation,
}

impl ImplicitProfile {
    pub fn new(rel: ImplicitRelation) -> Self {
        ImplicitProfile { rel }
    }

    pub fn relation(&self) -> &ImplicitRelation {
        &self.rel
    }
}

impl Profile for ImplicitProfile {
    fn eval(&self, t: f64) -> Result<Jet1> {
        let phi = self.rel.invert(t)?;
        let (d1, d2) = self.rel.derivatives(phi);
        Ok(Jet1::new(phi, d1, d2))
    }
}

const HALF: usize = 4;
const WIDTH: usize = 2 * HALF + 1;

type Fit = SMatrix<f64, WIDTH, WIDTH>;

// Interpolating polynomial through offsets −4..=4, as a map from samples to
// monomial coefficients.
fn stencil_fit() -> Fit {
    let v = Fit::from_fn(|i, j| (i as f64 - HALF as f64).powi(j as i32));
    v.try_inverse().expect("Vandermonde matrix is invertible")
}

fn derivative_stride(n: usize) -> usize {
    ((n - 1) / 128).max(1)
}

fn eval_poly(coef: &[f64; WIDTH], u: f64, h: f64) -> (f64, f64, f64) {
    let mut v = 0.0;
    let mut d1 = 0.0;
    let mut d2 = 0.0;
    for m in (0..WIDTH).rev() {
        let mf = m as f64;
        v = v * u + coef[m];
        if m >= 1 {
            d1 = d1 * u + mf * coef[m];
        }
        if m >= 2 {
            d2 = d2 * u + mf * (mf - 1.0) * coef[m];
        }
    }
    (v, d1 / h, d2 / (h * h))
}

/// `φ` tabulated on a uniform `ξ` grid, with derivatives from local degree-8
/// interpolants and the ODE residual at each node.
#[derive(Clone, Debug, PartialEq)]
pub struct ProfileTable {
    pub xi: Vec<f64>,
    pub phi: Vec<f64>,
    pub dphi: Vec<f64>,
    pub ddphi: Vec<f64>,
    pub residual: Vec<f64>,
    /// `max |residual|` over the grid.
    pub certified_residual: f64,
    pub tolerance: f64,
    /// Whether `certified_residual ≤ tolerance`.
    pub certified: bool,
}

impl ProfileTable {
    // `ext` holds `phi` at the nodes plus `lead` ghost nodes before them and
    // any number after them; stencils use ghosts where available and stride
    // over fine grids so their spacing stays at least range/128.
    fn from_values(xi: Vec<f64>, ext: &[f64], lead: usize) -> Result<Self> {
        let n = xi.len();
        if n < MIN_GRID {
            return Err(Error::input(format!("grid size {n} below minimum {MIN_GRID}")));
        }
        let h = (xi[n - 1] - xi[0]) / (n - 1) as f64;
        let stride = derivative_stride(n);
        let fit = stencil_fit();
        let m = ext.len();
        let mut dphi = vec![0.0; n];
        let mut ddphi = vec![0.0; n];
        let mut y = [0.0; WIDTH];
        for i in 0..n {
            let k = i + lead;
            let s = k.saturating_sub(HALF * stride).min(m - 1 - 2 * HALF * stride);
            for (j, yj) in y.iter_mut().enumerate() {
                *yj = ext[s + j * stride];
            }
            let coef = Self::coefficients(&fit, &y);
            let u = (k - s) as f64 / stride as f64 - HALF as f64;
            let (_, d1, d2) = eval_poly(&coef, u, h * stride as f64);
            dphi[i] = d1;
            ddphi[i] = d2;
        }
        Ok(ProfileTable {
            xi,
            phi: ext[lead..lead + n].to_vec(),
            dphi,
            ddphi,
            residual: vec![0.0; n],
            certified_residual: 0.0,
            tolerance: CERT_TOL,
            certified: true,
        })
    }

    fn coefficients(fit: &Fit, y: &[f64]) -> [f64; WIDTH] {
        let mut c = [0.0; WIDTH];
        for (m, cm) in c.iter_mut().enumerate() {
            *cm = (0..WIDTH).map(|j| fit[(m, j)] * y[j]).sum();
        }
        c
    }

    fn certify(&mut self, residual: Vec<f64>, tolerance: f64) {
        self.certified_residual = residual.iter().fold(0.0, |m: f64, r| m.max(r.abs()));
        if residual.iter().any(|r| !r.is_finite()) {
            self.certified_residual = f64::INFINITY;
        }
        self.residual = residual;
        self.tolerance = tolerance;
        self.certified = self.certified_residual <= tolerance;
    }

    /// Tabulate a profile with exact derivatives on `grid` uniform points of
    /// `range`; `residual` is evaluated at every node and certified against
    /// `tolerance`.
    pub fn tabulate<R>(
        profile: &dyn Profile,
        range: (f64, f64),
        grid: usize,
        tolerance: f64,
        residual: R,
    ) -> Result<Self>
    where
        R: Fn(f64) -> Result<f64> + Sync,
    {
        let (a, b) = range;
        if grid < MIN_GRID {
            return Err(Error::input(format!("grid size {grid} below minimum {MIN_GRID}")));
        }
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::input(format!("range [{a}, {b}] is empty or not finite")));
        }
        let h = (b - a) / (grid - 1) as f64;
        let xi: Vec<f64> = (0..grid)
            .map(|i| if i + 1 == grid { b } else { a + i as f64 * h })
            .collect();
        let jets: Result<Vec<Jet1>> = xi.iter().map(|&x| profile.eval(x)).collect();
        let jets = jets?;
        let res: Result<Vec<f64>> = xi.par_iter().map(|&x| residual(x)).collect();
        let mut t = ProfileTable {
            phi: jets.iter().map(|j| j.v).collect(),
            dphi: jets.iter().map(|j| j.d1).collect(),
            ddphi: jets.iter().map(|j| j.d2).collect(),
            xi,
            residual: vec![],
            certified_residual: 0.0,
            tolerance,
            certified: true,
        };
        t.certify(res?, tolerance);
        Ok(t)
    }

    pub fn len(&self) -> usize {
        self.xi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xi.is_empty()
    }

    pub fn step(&self) -> f64 {
        (self.xi[self.len() - 1] - self.xi[0]) / (self.len() - 1) as f64
    }

    /// `max |∫_{φ₀}^{φᵢ} g − (slope·ξᵢ + offset)|` over the grid.
    pub fn round_trip_error(&self, rel: &ImplicitRelation) -> Result<f64> {
        let errs: Result<Vec<f64>> = self
            .xi
            .par_iter()
            .zip(&self.phi)
            .map(|(&x, &p)| Ok((rel.antiderivative(p)? - rel.rhs(x)).abs()))
            .collect();
        Ok(errs?.into_iter().fold(0.0, f64::max))
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let io = |e: csv::Error| Error::input(format!("writing profile table: {e}"));
        out.write_record(["xi", "phi", "dphi", "ddphi", "residual"])
            .map_err(io)?;
        for i in 0..self.len() {
            let row = [self.xi[i], self.phi[i], self.dphi[i], self.ddphi[i], self.residual[i]];
            out.write_record(row.iter().map(|v| format!("{v:.16e}"))).map_err(io)?;
        }
        out.flush()
            .map_err(|e| Error::input(format!("writing profile table: {e}")))
    }

    /// Read a table written by [`write_csv`](Self::write_csv); derivatives
    /// and residuals are taken from the file.
    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(r);
        let mut cols: [Vec<f64>; 5] = Default::default();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::input(format!("profile table: {e}")))?;
            if rec.len() != 5 {
                return Err(Error::input(format!(
                    "profile table row {}: expected 5 columns, got {}",
                    line + 1,
                    rec.len()
                )));
            }
            for (c, field) in cols.iter_mut().zip(rec.iter()) {
                let v: f64 = field
                    .trim()
                    .parse()
                    .map_err(|_| Error::input(format!("profile table row {}: bad number {field:?}", line + 1)))?;
                c.push(v);
            }
        }
        let [xi, phi, dphi, ddphi, residual] = cols;
        let n = xi.len();
        if n < MIN_GRID {
            return Err(Error::input(format!("profile table has {n} rows, minimum {MIN_GRID}")));
        }
        let h = (xi[n - 1] - xi[0]) / (n - 1) as f64;
        if !(h > 0.0)
            || xi
                .windows(2)
                .any(|w| ((w[1] - w[0]) - h).abs() > 1e-9 * h.abs().max(1.0))
        {
            return Err(Error::input("profile table xi column is not a uniform increasing grid"));
        }
        if let Some(i) = phi.iter().position(|p| !(*p > 0.0)) {
            return Err(Error::input(format!(
                "profile table row {}: phi must be positive",
                i + 1
            )));
        }
        let mut t = ProfileTable {
            xi,
            phi,
            dphi,
            ddphi,
            residual: vec![],
            certified_residual: 0.0,
            tolerance: CERT_TOL,
            certified: true,
        };
        t.certify(residual, CERT_TOL);
        Ok(t)
    }
}

impl Profile for ProfileTable {
    /// Local degree-8 interpolation of the tabulated values.
    fn eval(&self, t: f64) -> Result<Jet1> {
        let n = self.len();
        let (a, b) = (self.xi[0], self.xi[n - 1]);
        if !(a <= t && t <= b) {
            return Err(Error::OutOfRange {
                what: "xi",
                value: t,
                lo: a,
                hi: b,
            });
        }
        let h = self.step();
        let i = ((t - a) / h).round() as usize;
        let s = i.saturating_sub(HALF).min(n - WIDTH);
        let coef = Self::coefficients(&stencil_fit(), &self.phi[s..s + WIDTH]);
        let (v, d1, d2) = eval_poly(&coef, (t - self.xi[s + HALF]) / h, h);
        Ok(Jet1::new(v, d1, d2))
    }
}

/// Tabulate the inverse of `rel` on `grid` uniform points of `[a, b]` and
/// certify it against the relation's ODE with tolerance [`CERT_TOL`].
pub fn build_profile(rel: &ImplicitRelation, range: (f64, f64), grid: usize) -> Result<ProfileTable> {
    let (a, b) = range;
    if grid < MIN_GRID {
        return Err(Error::input(format!("grid size {grid} below minimum {MIN_GRID}")));
    }
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::input(format!("xi range [{a}, {b}] is empty or not finite")));
    }
    let h = (b - a) / (grid - 1) as f64;
    let xi: Vec<f64> = (0..grid)
        .map(|i| if i + 1 == grid { b } else { a + i as f64 * h })
        .collect();
    let phi: Result<Vec<f64>> = xi.par_iter().map(|&x| rel.invert(x)).collect();
    let phi = phi?;
    if let Some(i) = phi.iter().position(|p| !(*p > 0.0)) {
        return Err(Error::domain(format!("phi({}) = {} is not positive", xi[i], phi[i])));
    }
    let ghost = |x: f64| rel.invert(x).ok().filter(|p| *p > 0.0);
    let g = HALF * derivative_stride(grid);
    let before: Vec<f64> = (1..=g).map_while(|j| ghost(a - j as f64 * h)).collect();
    let after: Vec<f64> = (1..=g).map_while(|j| ghost(b + j as f64 * h)).collect();
    let lead = before.len();
    let ext: Vec<f64> = before.into_iter().rev().chain(phi).chain(after).collect();
    let mut t = ProfileTable::from_values(xi, &ext, lead)?;
    let residual = (0..t.len())
        .map(|i| rel.ode_residual(t.phi[i], t.dphi[i], t.ddphi[i]))
        .collect();
    t.certify(residual, CERT_TOL);
    Ok(t)
}
