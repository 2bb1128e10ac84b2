//! Subcommand implementations. Each returns a JSON report, a pass flag and
//! any auxiliary files.

use rayon::prelude::*;
use yamabe_core::families::{Ansatz, CatalogId, CatalogParams, FamilyMember, SignVariant, RESIDUAL_TOL};
use yamabe_core::geodesic::{
    completeness_probe, integrate, lightlike_bump_invariants, random_initial_conditions, CompletenessReport,
    GeodesicState,
};
use yamabe_core::quadrature::{build_profile, ProfileTable, CERT_TOL};
use yamabe_core::reductions::{rotation_sigma_k, translation_sigma_k};
use yamabe_core::sampling::DEFAULT_POINTS;
use yamabe_core::tensor::{curvature_pack, max_abs, schouten_endomorphism, sigma_all};

use crate::error::CliError;
use crate::json::Json;
use crate::problem::{Problem, ProblemSpec};

type Res<T> = std::result::Result<T, CliError>;

pub const DEFAULT_GRID: usize = 257;
pub const ROUND_TRIP_TOL: f64 = 1e-9;
pub const REDUCTION_TOL: f64 = 1e-9;
pub const DEFAULT_PROBE_COUNT: usize = 20;
pub const DEFAULT_PROBE_TMAX: f64 = 100.0;

#[derive(Clone, Copy, Debug, Default)]
pub struct Options {
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub points: Option<usize>,
}

pub struct Outcome {
    pub report: Json,
    pub pass: bool,
    /// Named files written next to the report when an output directory is
    /// given.
    pub files: Vec<(String, Vec<u8>)>,
}

impl Outcome {
    fn report(report: Json, pass: bool) -> Self {
        Outcome {
            report,
            pass,
            files: vec![],
        }
    }
}

fn seed(spec: &ProblemSpec, opts: &Options) -> u64 {
    opts.seed.or(spec.seed).unwrap_or(0)
}

fn header(command: &str, p: &Problem) -> Json {
    let m = &p.member;
    Json::obj()
        .with("command", command)
        .with("problem", p.label.as_str())
        .with("description", m.description.as_str())
        .with("ansatz", m.ansatz.kind())
        .with("n", m.n())
        .with("k", m.k())
        .with("lambda", m.lambda())
        .with(
            "signature",
            m.spec
                .signature
                .entries()
                .iter()
                .map(|e| *e as i64)
                .collect::<Vec<i64>>(),
        )
}

fn constants(m: &FamilyMember) -> Json {
    Json::Obj(m.constants.iter().map(|(k, v)| (k.clone(), Json::Num(*v))).collect())
}

fn variant(v: Option<&SignVariant>) -> Json {
    v.map_or(Json::Null, |v| {
        Json::obj()
            .with("written", v.written.as_str())
            .with("used", v.used.as_str())
            .with("written_residual", v.written_residual)
            .with("used_residual", v.used_residual)
            .with("written_holds", v.written_holds())
    })
}

fn positive(name: &str, v: f64) -> Res<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::input(format!("{name} = {v} must be positive")))
    }
}

pub fn verify(spec: &ProblemSpec, opts: &Options) -> Res<Outcome> {
    let p = spec.problem()?;
    let m = &p.member;
    let tol = positive("tol", opts.tol.unwrap_or(RESIDUAL_TOL))?;
    let count = opts.points.unwrap_or(DEFAULT_POINTS);
    let seed = seed(spec, opts);
    let pts = m.sample(count, seed).map_err(CliError::run)?;
    let residual = m.max_soliton_residual(&pts).map_err(CliError::run)?;
    let reduced = m.max_reduced_residual(DEFAULT_GRID).map_err(CliError::run)?;
    let pass = residual <= tol;
    let report = header("verify", &p)
        .with("points", pts.len())
        .with("seed", seed)
        .with("max_residual", residual)
        .with("reduced_grid", DEFAULT_GRID)
        .with("max_reduced_residual", reduced)
        .with("domain", m.domain)
        .with("tolerance", tol)
        .with("pass", pass)
        .with("sign_variant_used", variant(m.sign_variant.as_ref()))
        .with("constants", constants(m));
    Ok(Outcome::report(report, pass))
}

pub fn curvature(spec: &ProblemSpec, opts: &Options) -> Res<Outcome> {
    let p = spec.problem()?;
    let m = &p.member;
    let seed = seed(spec, opts);
    let pts = m.sample(opts.points.unwrap_or(8), seed).map_err(CliError::run)?;
    let rows: Res<Vec<Json>> = pts
        .par_iter()
        .map(|x| {
            let phi = m.spec.phi.value(x).map_err(CliError::run)?;
            let c = curvature_pack(&m.spec.phi, &m.spec.signature, x).map_err(CliError::run)?;
            Ok(Json::obj()
                .with("x", x.as_slice())
                .with("phi", phi)
                .with("scalar", c.scalar)
                .with("sigma", c.sigma.as_slice())
                .with("max_ricci", max_abs(&c.ricci))
                .with("max_schouten", max_abs(&c.schouten)))
        })
        .collect();
    let report = header("curvature", &p).with("seed", seed).with("points", rows?);
    Ok(Outcome::report(report, true))
}

fn reduced_sigma(m: &FamilyMember, x: &[f64]) -> yamabe_core::Result<f64> {
    let (n, k) = (m.n(), m.k());
    let t = m.ansatz.coordinate(x);
    let j = m.ansatz.phi().eval(t)?;
    Ok(match &m.ansatz {
        Ansatz::Translation(a) => translation_sigma_k(j.v, j.d1, j.d2, a.alpha_norm2(), n, k),
        Ansatz::Rotation(_) => rotation_sigma_k(j.v, j.d1, j.d2, t, n, k),
    })
}

pub fn reduce(spec: &ProblemSpec, opts: &Options) -> Res<Outcome> {
    let p = spec.problem()?;
    let m = &p.member;
    let tol = positive("tol", opts.tol.unwrap_or(RESIDUAL_TOL))?;
    let grid = opts.points.unwrap_or(DEFAULT_GRID).max(2);
    let (a, b) = m.domain;
    let res: Res<Vec<(f64, f64)>> = (0..grid)
        .into_par_iter()
        .map(|i| {
            let t = if i + 1 == grid {
                b
            } else {
                a + (b - a) * i as f64 / (grid - 1) as f64
            };
            let r = m.ansatz.residuals(m.k(), m.lambda(), t).map_err(CliError::run)?;
            Ok((r.r1.abs(), r.r2.abs()))
        })
        .collect();
    let res = res?;
    let r1 = res.iter().map(|r| r.0).fold(0.0, f64::max);
    let r2 = res.iter().map(|r| r.1).fold(0.0, f64::max);
    let seed = seed(spec, opts);
    let pts = m.sample(DEFAULT_POINTS, seed).map_err(CliError::run)?;
    let devs: Res<Vec<f64>> = pts
        .par_iter()
        .map(|x| {
            let endo = schouten_endomorphism(&m.spec.phi, &m.spec.signature, x).map_err(CliError::run)?;
            let full = sigma_all(&endo)[m.k() - 1];
            let red = reduced_sigma(m, x).map_err(CliError::run)?;
            let scale = full
                .abs()
                .max(red.abs())
                .max(endo.amax().powi(m.k() as i32))
                .max(1e-300);
            Ok((full - red).abs() / scale)
        })
        .collect();
    let dev = devs?.into_iter().fold(0.0, f64::max);
    let pass = r1.max(r2) <= tol && dev <= REDUCTION_TOL;
    let report = header("reduce", &p)
        .with("domain", m.domain)
        .with("grid", grid)
        .with("max_r1", r1)
        .with("max_r2", r2)
        .with("tolerance", tol)
        .with("sigma_points", pts.len())
        .with("sigma_relative_deviation", dev)
        .with("sigma_tolerance", REDUCTION_TOL)
        .with("pass", pass);
    Ok(Outcome::report(report, pass))
}

fn table_csv(t: &ProfileTable) -> Res<Vec<u8>> {
    let mut buf = Vec::new();
    t.write_csv(&mut buf).map_err(CliError::run)?;
    Ok(buf)
}

fn tabulate(p: &Problem, grid: usize) -> Res<(ProfileTable, Option<f64>)> {
    let m = &p.member;
    match &m.relation {
        Some(rel) => {
            let t = build_profile(rel, m.domain, grid).map_err(CliError::run)?;
            let rt = t.round_trip_error(rel).map_err(CliError::run)?;
            Ok((t, Some(rt)))
        }
        None => {
            let phi = m.ansatz.phi();
            let t = ProfileTable::tabulate(phi.as_ref(), m.domain, grid, CERT_TOL, |t| {
                m.ansatz.residuals(m.k(), m.lambda(), t).map(|r| r.max_abs())
            })
            .map_err(CliError::run)?;
            Ok((t, None))
        }
    }
}

pub fn family(spec: &ProblemSpec, opts: &Options) -> Res<Outcome> {
    if spec.family.is_none() {
        return Err(CliError::input("family command needs a family section"));
    }
    let p = spec.problem()?;
    let m = &p.member;
    let grid = opts.points.or(p.grid).unwrap_or(DEFAULT_GRID);
    let (table, round_trip) = tabulate(&p, grid)?;
    let seed = seed(spec, opts);
    let pts = m.sample(DEFAULT_POINTS, seed).map_err(CliError::run)?;
    let residual = m.max_soliton_residual(&pts).map_err(CliError::run)?;
    let tol = positive("tol", opts.tol.unwrap_or(RESIDUAL_TOL))?;
    let pass = table.certified && round_trip.is_none_or(|r| r <= ROUND_TRIP_TOL) && residual <= tol;
    let report = header("family", &p)
        .with("domain", m.domain)
        .with("grid", table.len())
        .with("certified_residual", table.certified_residual)
        .with("certification_tolerance", table.tolerance)
        .with("certified", table.certified)
        .with("round_trip_error", round_trip)
        .with("soliton_points", pts.len())
        .with("soliton_residual", residual)
        .with("tolerance", tol)
        .with("whole_space", m.whole_space)
        .with("constants", constants(m))
        .with("sign_variant_used", variant(m.sign_variant.as_ref()))
        .with("pass", pass);
    Ok(Outcome {
        files: vec![("profile.csv".into(), table_csv(&table)?)],
        report,
        pass,
    })
}

pub fn solve_implicit(spec: &ProblemSpec, opts: &Options) -> Res<Outcome> {
    let p = spec.problem()?;
    let m = &p.member;
    let rel = m
        .relation
        .as_ref()
        .ok_or_else(|| CliError::input(format!("{} has no implicit relation", p.label)))?;
    let grid = opts.points.or(p.grid).unwrap_or(DEFAULT_GRID);
    let (table, round_trip) = tabulate(&p, grid)?;
    let rt = round_trip.expect("implicit member");
    let pass = table.certified && rt <= ROUND_TRIP_TOL;
    let report = header("solve-implicit", &p)
        .with("phi0", rel.phi0())
        .with("slope", rel.slope())
        .with("offset", rel.offset())
        .with("phi_bracket", rel.bracket())
        .with("admissible_xi", rel.admissible_xi_interval())
        .with("xi_range", m.domain)
        .with("grid", table.len())
        .with("certified_residual", table.certified_residual)
        .with("certification_tolerance", table.tolerance)
        .with("certified", table.certified)
        .with("round_trip_error", rt)
        .with("round_trip_tolerance", ROUND_TRIP_TOL)
        .with("constants", constants(m))
        .with("pass", pass);
    Ok(Outcome {
        files: vec![("profile.csv".into(), table_csv(&table)?)],
        report,
        pass,
    })
}

fn bump_direction(m: &FamilyMember) -> bool {
    match &m.ansatz {
        Ansatz::Translation(a) => a
            .alpha()
            .iter()
            .enumerate()
            .all(|(i, c)| *c == if i < 2 { 1.0 } else { 0.0 }),
        Ansatz::Rotation(_) => false,
    }
}

pub fn geodesic(spec: &ProblemSpec, opts: &Options) -> Res<Outcome> {
    let g = spec
        .geodesic
        .as_ref()
        .ok_or_else(|| CliError::input("geodesic command needs a geodesic section"))?;
    let p = spec.problem()?;
    let m = &p.member;
    let init = g.init.state()?;
    if !m.admissible(&init.x) {
        return Err(CliError::input("geodesic.init.x lies outside the admissible region"));
    }
    let tol = opts.tol.or(g.tol);
    if let Some(t) = tol {
        positive("tol", t)?;
    }
    let o = ProblemSpec::geodesic_options(tol, g.samples);
    let traj = integrate(&m.spec.phi, &m.spec.signature, &init, g.t_max, &o).map_err(CliError::run)?;
    let theta = m.constants.iter().find(|(k, _)| k == "theta").map(|(_, v)| *v as u32);
    let invariants = match (p.catalog, theta) {
        (Some(CatalogId::Ex21), Some(th)) if bump_direction(m) => Some(lightlike_bump_invariants(&traj, th)),
        _ => None,
    };
    let mut csv = Vec::new();
    traj.write_csv(&mut csv, invariants.as_ref()).map_err(CliError::run)?;
    let last = traj.last();
    let drift = traj.speed_drift(&m.spec.phi).map_err(CliError::run)?;
    let report = header("geodesic", &p)
        .with("t_max", g.t_max)
        .with("rtol", o.rtol)
        .with("atol", o.atol)
        .with("termination", traj.termination.as_str())
        .with("t_end", last.t)
        .with("x_end", last.x.as_slice())
        .with("v_end", last.v.as_slice())
        .with("samples", traj.states.len())
        .with("accepted_steps", traj.accepted_steps)
        .with("rejected_steps", traj.rejected_steps)
        .with("speed_drift", drift)
        .with(
            "invariants",
            invariants.as_ref().map_or(Json::Null, |inv| {
                Json::obj()
                    .with("names", inv.names.iter().map(|s| s.as_str()).collect::<Vec<&str>>())
                    .with("max_drift", inv.max_drift())
            }),
        );
    Ok(Outcome {
        files: vec![("trajectory.csv".into(), csv)],
        report,
        pass: true,
    })
}

fn state_json(s: &GeodesicState) -> Json {
    Json::obj().with("x", s.x.as_slice()).with("v", s.v.as_slice())
}

fn probe_json(r: &CompletenessReport) -> Json {
    let b = &r.bound;
    Json::obj()
        .with("t_max", r.t_max)
        .with("aggregate", r.aggregate.as_str())
        .with(
            "bound_check",
            Json::obj()
                .with("sup_by_scale", b.sup_by_scale.as_slice())
                .with("inf", b.inf)
                .with("l_estimate", b.l_estimate)
                .with("bounded", b.bounded)
                .with("riemannian", b.riemannian)
                .with("whole_space", b.whole_space)
                .with("fires", b.fires),
        )
        .with(
            "results",
            r.results
                .iter()
                .map(|p| {
                    Json::obj()
                        .with("init", state_json(&p.init))
                        .with("forward", p.forward.as_str())
                        .with("backward", p.backward.as_str())
                        .with("forward_time", p.forward_time)
                        .with("backward_time", p.backward_time)
                        .with("speed_drift", p.speed_drift)
                        .with("verdict", p.verdict.as_str())
                })
                .collect::<Vec<Json>>(),
        )
}

pub fn probe(spec: &ProblemSpec, opts: &Options) -> Res<Outcome> {
    let p = spec.problem()?;
    let m = &p.member;
    let ps = spec.probe.as_ref();
    let seed = seed(spec, opts);
    let inits = match ps.and_then(|s| s.inits.as_ref()) {
        Some(list) => {
            let states: Res<Vec<GeodesicState>> = list.iter().map(|i| i.state()).collect();
            let states = states?;
            if let Some(i) = states.iter().position(|s| !m.admissible(&s.x)) {
                return Err(CliError::input(format!(
                    "probe.inits[{i}].x lies outside the admissible region"
                )));
            }
            states
        }
        None => {
            let count = opts.points.or(ps.and_then(|s| s.count)).unwrap_or(DEFAULT_PROBE_COUNT);
            random_initial_conditions(&m.sample_box, count, seed, |x| m.admissible(x)).map_err(CliError::run)?
        }
    };
    let t_max = ps.and_then(|s| s.t_max).unwrap_or(DEFAULT_PROBE_TMAX);
    let tol = opts.tol.or(ps.and_then(|s| s.tol));
    if let Some(t) = tol {
        positive("tol", t)?;
    }
    let o = ProblemSpec::geodesic_options(tol, None);
    let r = completeness_probe(
        &m.spec.phi,
        &m.spec.signature,
        &inits,
        t_max,
        &o,
        &m.sample_box,
        m.whole_space,
        seed,
    )
    .map_err(CliError::run)?;
    let mut report = header("probe", &p).with("seed", seed);
    if let Json::Obj(fields) = probe_json(&r) {
        for (k, v) in fields {
            report = report.with(&k, v);
        }
    }
    Ok(Outcome::report(report, true))
}

pub fn catalog_list() -> Res<Outcome> {
    let entries: Res<Vec<Json>> = CatalogId::ALL
        .into_iter()
        .map(|id| {
            let e = yamabe_core::families::catalog(id, &CatalogParams::default()).map_err(CliError::run)?;
            Ok(Json::obj()
                .with("id", id.as_str())
                .with("summary", id.summary())
                .with("ansatz", e.member.ansatz.kind())
                .with("parameters", id.parameters().to_vec())
                .with("default_n", e.member.n())
                .with("default_k", e.member.k())
                .with("k_range", vec![e.k_range.0, e.k_range.1])
                .with("lambda", e.expected_lambda)
                .with("whole_space", e.member.whole_space))
        })
        .collect();
    Ok(Outcome::report(Json::obj().with("catalog", entries?), true))
}
