//! Geodesics of conformally flat metrics `δ_ε/φ²` and completeness probes.
//!
//! With `γ = (x₁, …, xₙ)` and `v = γ′` the geodesic equations read
//! `x_l″ = (1/φ)[2(φ∘γ)′v_l − ε_l φ_{x_l} Σ εᵢvᵢ²]`.

use std::fmt;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{ScalarField, Signature};
use crate::jet::Real;
use crate::sampling::{sample_points, SampleBox};

#[derive(Clone, Debug, PartialEq)]
pub struct GeodesicState {
    pub t: f64,
    pub x: Vec<f64>,
    pub v: Vec<f64>,
}

impl GeodesicState {
    pub fn new(t: f64, x: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if x.len() != v.len() || x.is_empty() {
            return Err(Error::input(format!(
                "position has {} and velocity {} components",
                x.len(),
                v.len()
            )));
        }
        if !t.is_finite() || x.iter().chain(&v).any(|c| !c.is_finite()) {
            return Err(Error::input("geodesic state has non-finite entries"));
        }
        Ok(GeodesicState { t, x, v })
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    /// The same point with velocity reversed and time reset to zero.
    pub fn reversed(&self) -> Self {
        GeodesicState {
            t: 0.0,
            x: self.x.clone(),
            v: self.v.iter().map(|c| -c).collect(),
        }
    }
}

/// `(x′, v′)` at a state. Fails with a domain error where `φ ≤ 0` or `φ`
/// cannot be evaluated.
pub fn geodesic_rhs(phi: &ScalarField, sig: &Signature, s: &GeodesicState) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut acc = vec![0.0; s.dim()];
    accel(phi, sig, &s.x, &s.v, &mut acc)?;
    Ok((s.v.clone(), acc))
}

fn accel(phi: &ScalarField, sig: &Signature, x: &[f64], v: &[f64], out: &mut [f64]) -> Result<()> {
    let j = phi.jet(x).map_err(as_domain)?;
    let p = j.value();
    if !(p > 0.0) {
        return Err(Error::domain(format!("conformal factor {p} is not positive at {x:?}")));
    }
    let dphi: f64 = (0..x.len()).map(|i| j.d(i) * v[i]).sum();
    let q = sig.quad(v);
    for l in 0..x.len() {
        out[l] = (2.0 * dphi * v[l] - sig.eps(l) * j.d(l) * q) / p;
    }
    Ok(())
}

fn as_domain(e: Error) -> Error {
    match e {
        Error::Domain(_) => e,
        other => Error::domain(other.to_string()),
    }
}

/// `g(v, v) = Σ εᵢvᵢ² / φ²`.
pub fn speed(phi: &ScalarField, sig: &Signature, x: &[f64], v: &[f64]) -> Result<f64> {
    let p = phi.value(x)?;
    Ok(sig.quad(v) / (p * p))
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntegratorOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Max-norm of `x` or `v` treated as blow-up.
    pub blow_up: f64,
    /// Steps below `step_floor·max(1, |t|)` count as collapse.
    pub step_floor: f64,
    /// Number of uniform sampling intervals on `[0, t_max]`.
    pub samples: usize,
    /// Budget of attempted steps; exhausting it is reported as step collapse.
    pub max_steps: usize,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        IntegratorOptions {
            rtol: 1e-9,
            atol: 1e-12,
            blow_up: 1e8,
            step_floor: 1e-14,
            samples: 1000,
            max_steps: 20_000_000,
        }
    }
}

impl IntegratorOptions {
    pub fn with_tol(mut self, rtol: f64) -> Self {
        self.rtol = rtol;
        self.atol = (rtol * 1e-3).min(self.atol);
        self
    }

    fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if !ok(self.rtol) || !ok(self.atol) || self.rtol >= 1.0 {
            return Err(Error::input(format!(
                "tolerances rtol = {}, atol = {} must be positive and rtol below 1",
                self.rtol, self.atol
            )));
        }
        if !ok(self.blow_up) || !ok(self.step_floor) {
            return Err(Error::input("blow-up threshold and step floor must be positive"));
        }
        if self.samples == 0 || self.max_steps == 0 {
            return Err(Error::input("samples and max_steps must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    ReachedTmax,
    BlowUp,
    StepCollapse,
    LeftDomain,
}

impl Termination {
    pub fn as_str(&self) -> &'static str {
        match self {
            Termination::ReachedTmax => "reached_tmax",
            Termination::BlowUp => "blow_up",
            Termination::StepCollapse => "step_collapse",
            Termination::LeftDomain => "left_domain",
        }
    }
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Sampled geodesic. Sample times are strictly increasing; when integration
/// stops early the last sample is the final accepted state.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub states: Vec<GeodesicState>,
    /// `g(v, v)` at each sample.
    pub speed: Vec<f64>,
    pub termination: Termination,
    pub t_max: f64,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

impl Trajectory {
    pub fn last(&self) -> &GeodesicState {
        self.states.last().expect("trajectory has the initial state")
    }

    /// `max |g(v,v)(t) − g(v,v)(0)|` relative to `max(|g(v,v)|, |v|²_δ/φ²)`
    /// at the start, so null geodesics are measured on the Euclidean scale.
    pub fn speed_drift(&self, phi: &ScalarField) -> Result<f64> {
        let s0 = &self.states[0];
        let p = phi.value(&s0.x)?;
        let euclid: f64 = s0.v.iter().map(|c| c * c).sum::<f64>() / (p * p);
        let scale = self.speed[0].abs().max(euclid);
        let dev = self.speed.iter().map(|s| (s - self.speed[0]).abs()).fold(0.0, f64::max);
        Ok(if scale > 0.0 { dev / scale } else { dev })
    }

    /// CSV with columns `t, x1..xn, v1..vn, speed` and, when given, one
    /// column per invariant.
    pub fn write_csv<W: Write>(&self, w: W, invariants: Option<&InvariantLog>) -> Result<()> {
        let n = self.states[0].dim();
        let mut out = csv::Writer::from_writer(w);
        let io = |e: csv::Error| Error::input(format!("writing trajectory: {e}"));
        let mut header = vec!["t".to_string()];
        header.extend((1..=n).map(|i| format!("x{i}")));
        header.extend((1..=n).map(|i| format!("v{i}")));
        header.push("speed".into());
        if let Some(inv) = invariants {
            header.extend(inv.names.iter().cloned());
        }
        out.write_record(&header).map_err(io)?;
        for (i, s) in self.states.iter().enumerate() {
            let mut row = vec![s.t];
            row.extend(&s.x);
            row.extend(&s.v);
            row.push(self.speed[i]);
            if let Some(inv) = invariants {
                row.extend(&inv.values[i]);
            }
            out.write_record(row.iter().map(|v| format!("{v:.16e}"))).map_err(io)?;
        }
        out.flush()
            .map_err(|e| Error::input(format!("writing trajectory: {e}")))
    }
}

// Dormand–Prince 5(4).
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

struct Stepper<'a> {
    phi: &'a ScalarField,
    sig: &'a Signature,
    n: usize,
    k: [Vec<f64>; 7],
    tmp: Vec<f64>,
    acc: Vec<f64>,
}

impl<'a> Stepper<'a> {
    fn new(phi: &'a ScalarField, sig: &'a Signature, n: usize) -> Self {
        Stepper {
            phi,
            sig,
            n,
            k: Default::default(),
            tmp: vec![0.0; 2 * n],
            acc: vec![0.0; n],
        }
    }

    // y = (x, v) stacked.
    fn rhs(&mut self, y: &[f64], out: &mut Vec<f64>) -> Result<()> {
        let n = self.n;
        accel(self.phi, self.sig, &y[..n], &y[n..], &mut self.acc)?;
        out.clear();
        out.extend_from_slice(&y[n..]);
        out.extend_from_slice(&self.acc);
        Ok(())
    }

    // One trial step from (y, k₀ = f(y)); returns the new state, its
    // derivative (FSAL) and the scaled error norm.
    fn step(&mut self, y: &[f64], h: f64, opts: &IntegratorOptions) -> Result<(Vec<f64>, Vec<f64>, f64)> {
        let m = y.len();
        for s in 1..7 {
            self.tmp.clear();
            for (i, yi) in y.iter().enumerate() {
                let mut acc = *yi;
                for (j, a) in A[s][..s].iter().enumerate() {
                    acc += h * a * self.k[j][i];
                }
                self.tmp.push(acc);
            }
            let tmp = std::mem::take(&mut self.tmp);
            let mut ks = std::mem::take(&mut self.k[s]);
            let r = self.rhs(&tmp, &mut ks);
            self.tmp = tmp;
            self.k[s] = ks;
            r?;
        }
        let y_new = self.tmp.clone();
        let mut err = 0.0;
        for i in 0..m {
            let e: f64 = (0..7).map(|j| E[j] * self.k[j][i]).sum::<f64>() * h;
            let sc = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
            err += (e / sc).powi(2);
        }
        Ok((y_new, self.k[6].clone(), (err / m as f64).sqrt()))
    }
}

/// Integrate the geodesic through `init` on `[init.t, init.t + t_max]` with
/// an adaptive Dormand–Prince 5(4) pair, sampling `opts.samples + 1` states.
pub fn integrate(
    phi: &ScalarField,
    sig: &Signature,
    init: &GeodesicState,
    t_max: f64,
    opts: &IntegratorOptions,
) -> Result<Trajectory> {
    opts.validate()?;
    let n = init.dim();
    if sig.dim() != n || phi.dim() != n {
        return Err(Error::input(format!(
            "state dimension {n}, signature {}, field {}",
            sig.dim(),
            phi.dim()
        )));
    }
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(Error::input(format!("t_max = {t_max} must be positive")));
    }
    let mut y: Vec<f64> = init.x.iter().chain(&init.v).copied().collect();
    let mut st = Stepper::new(phi, sig, n);
    let mut k0 = Vec::with_capacity(2 * n);
    st.rhs(&y, &mut k0)?;
    let t0 = init.t;
    let mut t = 0.0;
    let mut states = vec![init.clone()];
    let mut speed_log = vec![speed(phi, sig, &init.x, &init.v)?];
    let dt_sample = t_max / opts.samples as f64;
    let mut next_sample = 1usize;
    let mut h = initial_step(&y, &k0, opts).min(dt_sample);
    let (mut accepted, mut rejected) = (0usize, 0usize);
    let termination = loop {
        if accepted + rejected >= opts.max_steps {
            break Termination::StepCollapse;
        }
        let target = if next_sample == opts.samples {
            t_max
        } else {
            next_sample as f64 * dt_sample
        };
        let clipped = 1.01 * h >= target - t;
        let step = if clipped { target - t } else { h };
        if step < opts.step_floor * (t0 + t).abs().max(1.0) {
            break Termination::StepCollapse;
        }
        st.k[0].clone_from(&k0);
        match st.step(&y, step, opts) {
            Ok((y_new, k_new, err)) if err <= 1.0 => {
                accepted += 1;
                t = if clipped { target } else { t + step };
                y = y_new;
                k0 = k_new;
                let fac = if err == 0.0 {
                    5.0
                } else {
                    (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                };
                if !clipped || fac < 1.0 {
                    h = step * fac;
                }
                if y.iter().any(|c| !c.is_finite() || c.abs() > opts.blow_up) {
                    push_state(&mut states, &mut speed_log, phi, sig, t0 + t, &y, n);
                    break Termination::BlowUp;
                }
                if clipped {
                    push_state(&mut states, &mut speed_log, phi, sig, t0 + t, &y, n);
                    if next_sample == opts.samples {
                        break Termination::ReachedTmax;
                    }
                    next_sample += 1;
                }
            }
            Ok((_, _, err)) => {
                rejected += 1;
                h = step
                    * if err.is_finite() {
                        (0.9 * err.powf(-0.2)).clamp(0.2, 1.0)
                    } else {
                        0.2
                    };
            }
            Err(Error::Domain(_)) => {
                rejected += 1;
                h = 0.25 * step;
                if h < opts.step_floor * (t0 + t).abs().max(1.0) {
                    if states.last().map(|s| s.t) != Some(t0 + t) {
                        push_state(&mut states, &mut speed_log, phi, sig, t0 + t, &y, n);
                    }
                    break Termination::LeftDomain;
                }
            }
            Err(e) => return Err(e),
        }
    };
    if termination != Termination::ReachedTmax && states.last().map(|s| s.t) != Some(t0 + t) {
        push_state(&mut states, &mut speed_log, phi, sig, t0 + t, &y, n);
    }
    Ok(Trajectory {
        states,
        speed: speed_log,
        termination,
        t_max,
        accepted_steps: accepted,
        rejected_steps: rejected,
    })
}

fn push_state(
    states: &mut Vec<GeodesicState>,
    speed_log: &mut Vec<f64>,
    phi: &ScalarField,
    sig: &Signature,
    t: f64,
    y: &[f64],
    n: usize,
) {
    let (x, v) = (y[..n].to_vec(), y[n..].to_vec());
    speed_log.push(speed(phi, sig, &x, &v).unwrap_or(f64::NAN));
    states.push(GeodesicState { t, x, v });
}

fn initial_step(y: &[f64], f: &[f64], opts: &IntegratorOptions) -> f64 {
    let sc = |i: usize| opts.atol + opts.rtol * y[i].abs();
    let d0 = (0..y.len()).map(|i| (y[i] / sc(i)).powi(2)).sum::<f64>().sqrt();
    let d1 = (0..y.len()).map(|i| (f[i] / sc(i)).powi(2)).sum::<f64>().sqrt();
    if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        (0.01 * d0 / d1).clamp(1e-10, 1.0)
    }
}

/// Named first integrals sampled along a trajectory.
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantLog {
    pub names: Vec<String>,
    /// One row per trajectory sample.
    pub values: Vec<Vec<f64>>,
}

impl InvariantLog {
    /// `max_t max_l |I_l(t) − I_l(0)| / max_l |I_l(0)|`, or the absolute
    /// deviation when every initial value vanishes.
    pub fn max_drift(&self) -> f64 {
        let first = &self.values[0];
        let scale = first.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
        let dev = self
            .values
            .iter()
            .flat_map(|row| row.iter().zip(first).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if scale > 0.0 {
            dev / scale
        } else {
            dev
        }
    }
}

/// The light-like example metric `φ = 1/(1+ξ^{2θ})`, `ξ = x₁ + x₂`, on
/// `ℝⁿ` with `ε₁ = −1`.
pub fn lightlike_bump_field(n: usize, theta: u32) -> ScalarField {
    let m = 2 * theta as i32;
    ScalarField::new(n, move |x| {
        let xi = x[0] + x[1];
        (xi.powi(m) + 1.0).recip()
    })
    .positive()
}

/// `J_l = v_l(1+ξ^{2θ})²` for `l ≥ 3` and `K = ξ′(1+ξ^{2θ})²` along `traj`.
pub fn lightlike_bump_invariants(traj: &Trajectory, theta: u32) -> InvariantLog {
    let n = traj.states[0].dim();
    let mut names: Vec<String> = (3..=n).map(|l| format!("J{l}")).collect();
    names.push("K".into());
    let values = traj
        .states
        .iter()
        .map(|s| {
            let xi = s.x[0] + s.x[1];
            let w = (1.0 + xi.powi(2 * theta as i32)).powi(2);
            let mut row: Vec<f64> = s.v[2..].iter().map(|v| v * w).collect();
            row.push((s.v[0] + s.v[1]) * w);
            row
        })
        .collect();
    InvariantLog { names, values }
}

/// Accelerations `(x₁″, x₂″)` of the reduced first-order system in terms of
/// `ξ`, `K` and `Σ_{l≥3} J_l²`.
pub fn lightlike_bump_reduced_rhs(theta: u32, xi: f64, k1: f64, c_sq: f64) -> (f64, f64) {
    let t = theta as i32;
    let p = 2.0 * theta as f64 * xi.powi(2 * t - 1) / (1.0 + xi.powi(2 * t)).powi(5);
    (-p * (k1 * k1 + c_sq), -p * (k1 * k1 - c_sq))
}

/// Random initial conditions: positions from `bbox` accepted by `admissible`,
/// velocities uniform on the Euclidean unit sphere.
pub fn random_initial_conditions<F>(
    bbox: &SampleBox,
    count: usize,
    seed: u64,
    admissible: F,
) -> Result<Vec<GeodesicState>>
where
    F: Fn(&[f64]) -> bool,
{
    let xs = sample_points(bbox, count, seed, admissible)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    xs.into_iter()
        .map(|x| {
            let v = loop {
                let v: Vec<f64> = (0..x.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let r = v.iter().map(|c| c * c).sum::<f64>().sqrt();
                if (0.1..=1.0).contains(&r) {
                    break v.into_iter().map(|c| c / r).collect();
                }
            };
            GeodesicState::new(0.0, x, v)
        })
        .collect()
}

/// Result of the bounded-conformal-factor sufficient condition.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundCheck {
    /// `sup φ` over nested boxes scaled by 1, 10, 100, 1000.
    pub sup_by_scale: Vec<f64>,
    pub inf: f64,
    /// Estimate of `L = sup φ`.
    pub l_estimate: f64,
    pub bounded: bool,
    pub riemannian: bool,
    pub whole_space: bool,
    /// Riemannian, defined on all of ℝⁿ, and `0 < φ ≤ L`.
    pub fires: bool,
}

pub const BOUND_SCALES: [f64; 4] = [1.0, 10.0, 100.0, 1000.0];
const BOUND_POINTS: usize = 512;

/// Estimate `sup φ` on growing boxes. `φ` counts as bounded when the
/// estimate grows by less than a factor 2 over the sequence and stays
/// positive; evaluation failures count as unbounded.
pub fn bound_check(phi: &ScalarField, sig: &Signature, bbox: &SampleBox, whole_space: bool, seed: u64) -> BoundCheck {
    let mut sups = Vec::with_capacity(BOUND_SCALES.len());
    let mut inf = f64::INFINITY;
    let mut failed = false;
    for s in BOUND_SCALES {
        let b = bbox.scaled(s);
        let pts = sample_points(&b, BOUND_POINTS, seed, |_| true).unwrap_or_default();
        let mut sup = 0.0f64;
        for x in &pts {
            match phi.value(x) {
                Ok(p) if p.is_finite() => {
                    sup = sup.max(p.abs());
                    inf = inf.min(p);
                }
                _ => failed = true,
            }
        }
        sups.push(sup);
    }
    let l = sups.iter().copied().fold(0.0, f64::max);
    let bounded = !failed && inf > 0.0 && l < 2.0 * sups[0];
    let riemannian = sig.is_riemannian();
    BoundCheck {
        sup_by_scale: sups,
        inf,
        l_estimate: l,
        bounded,
        riemannian,
        whole_space,
        fires: bounded && riemannian && whole_space,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// Forward and backward integration reached `t_max`.
    CompleteUpToTmax,
    /// Some direction stopped early; the geodesic may be incomplete.
    InconclusiveIncompleteCandidate,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::CompleteUpToTmax => "complete_up_to_t_max",
            Verdict::InconclusiveIncompleteCandidate => "inconclusive_incomplete_candidate",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Aggregate {
    /// The bounded-conformal-factor sufficient condition holds.
    Complete,
    CompleteUpToTmax,
    Inconclusive,
}

impl Aggregate {
    pub fn as_str(&self) -> &'static str {
        match self {
            Aggregate::Complete => "complete",
            Aggregate::CompleteUpToTmax => "complete_up_to_t_max",
            Aggregate::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Debug)]
pub struct ProbeResult {
    pub init: GeodesicState,
    pub forward: Termination,
    pub backward: Termination,
    pub forward_time: f64,
    pub backward_time: f64,
    pub speed_drift: f64,
    pub verdict: Verdict,
}

#[derive(Clone, Debug)]
pub struct CompletenessReport {
    pub t_max: f64,
    pub results: Vec<ProbeResult>,
    pub bound: BoundCheck,
    pub aggregate: Aggregate,
}

/// Integrate each initial condition forward and backward to `t_max` in
/// parallel and combine with the [`bound_check`] gate.
#[allow(clippy::too_many_arguments)]
pub fn completeness_probe(
    phi: &ScalarField,
    sig: &Signature,
    inits: &[GeodesicState],
    t_max: f64,
    opts: &IntegratorOptions,
    bbox: &SampleBox,
    whole_space: bool,
    seed: u64,
) -> Result<CompletenessReport> {
    let opts = IntegratorOptions {
        samples: opts.samples.min(16),
        ..opts.clone()
    };
    let results: Result<Vec<ProbeResult>> = inits
        .par_iter()
        .map(|init| {
            let fw = integrate(phi, sig, init, t_max, &opts)?;
            let bw = integrate(phi, sig, &init.reversed(), t_max, &opts)?;
            let verdict = if fw.termination == Termination::ReachedTmax && bw.termination == Termination::ReachedTmax {
                Verdict::CompleteUpToTmax
            } else {
                Verdict::InconclusiveIncompleteCandidate
            };
            let drift = fw.speed_drift(phi)?.max(bw.speed_drift(phi)?);
            Ok(ProbeResult {
                init: init.clone(),
                forward: fw.termination,
                backward: bw.termination,
                forward_time: fw.last().t - init.t,
                backward_time: bw.last().t,
                speed_drift: drift,
                verdict,
            })
        })
        .collect();
    let results = results?;
    let bound = bound_check(phi, sig, bbox, whole_space, seed);
    let all = results.iter().all(|r| r.verdict == Verdict::CompleteUpToTmax);
    let aggregate = if bound.fires {
        Aggregate::Complete
    } else if all {
        Aggregate::CompleteUpToTmax
    } else {
        Aggregate::Inconclusive
    };
    Ok(CompletenessReport {
        t_max,
        results,
        bound,
        aggregate,
    })
}
