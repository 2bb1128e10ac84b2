//! Problem specification files and construction of the member they describe.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Deserialize;
use yamabe_core::families::{
    catalog, family_lightlike_steady, family_rotation_null_curvature, family_translation_implicit,
    family_translation_phi_const, Ansatz, CatalogId, CatalogParams, FamilyMember, FamilyTag, NullCase,
    PotentialProfile,
};
use yamabe_core::geodesic::{GeodesicState, IntegratorOptions};
use yamabe_core::quadrature::ProfileTable;
use yamabe_core::reductions::{RotationAnsatz, TranslationAnsatz};
use yamabe_core::sampling::SampleBox;
use yamabe_core::{Profile, Signature, MAX_DIM};

use crate::error::CliError;

type Res<T> = std::result::Result<T, CliError>;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub n: usize,
    #[serde(default)]
    pub k: Option<usize>,
    #[serde(default)]
    pub lambda: Option<f64>,
    pub signature: Vec<f64>,
    #[serde(default)]
    pub ansatz: Option<AnsatzSpec>,
    #[serde(default)]
    pub family: Option<FamilySpec>,
    #[serde(default)]
    pub geodesic: Option<GeodesicSpec>,
    #[serde(default)]
    pub probe: Option<ProbeSpec>,
    #[serde(default)]
    pub sample_box: Option<BoxSpec>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(skip)]
    base_dir: PathBuf,
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum AnsatzKind {
    Translation,
    Rotation,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnsatzSpec {
    #[serde(rename = "type")]
    pub kind: AnsatzKind,
    #[serde(default)]
    pub alpha: Option<Vec<f64>>,
    /// Catalog id or path to a profile table.
    pub profile: String,
    #[serde(default)]
    pub potential: Option<PotentialSpec>,
}

/// `f = d + c∫φ⁻²`.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSpec {
    #[serde(default)]
    pub c: f64,
    #[serde(default)]
    pub d: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub tag: String,
    #[serde(default)]
    pub params: FamilyParams,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyParams {
    pub id: Option<String>,
    pub theta: Option<u32>,
    pub b: Option<f64>,
    pub c: Option<f64>,
    pub d: Option<f64>,
    pub c0: Option<f64>,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub c3: Option<f64>,
    pub c4: Option<f64>,
    pub phi0: Option<f64>,
    pub alpha_sign: Option<f64>,
    pub domain: Option<(f64, f64)>,
    pub grid: Option<usize>,
}

impl FamilyParams {
    fn given(&self) -> Vec<&'static str> {
        let mut v = Vec::new();
        let mut push = |name, set: bool| {
            if set {
                v.push(name)
            }
        };
        push("id", self.id.is_some());
        push("theta", self.theta.is_some());
        push("b", self.b.is_some());
        push("c", self.c.is_some());
        push("d", self.d.is_some());
        push("c0", self.c0.is_some());
        push("c1", self.c1.is_some());
        push("c2", self.c2.is_some());
        push("c3", self.c3.is_some());
        push("c4", self.c4.is_some());
        push("phi0", self.phi0.is_some());
        push("alpha_sign", self.alpha_sign.is_some());
        push("domain", self.domain.is_some());
        push("grid", self.grid.is_some());
        v
    }
}

fn allowed_params(tag: FamilyTag) -> &'static [&'static str] {
    match tag {
        FamilyTag::LightlikeSteady => &["theta", "c", "d", "domain", "grid"],
        FamilyTag::TranslationPhiConst => &["b", "c", "d", "grid"],
        FamilyTag::TranslationNNe2k | FamilyTag::TranslationNEq2k => {
            &["c", "c1", "c2", "d", "phi0", "alpha_sign", "domain", "grid"]
        }
        FamilyTag::RotationGaussian => &["c1", "c2", "grid"],
        FamilyTag::RotationLinearPhi => &["c0", "c1", "grid"],
        FamilyTag::Catalog => &["id", "theta", "c", "c0", "c1", "c3", "c4", "grid"],
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitSpec {
    pub x: Vec<f64>,
    pub v: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeodesicSpec {
    pub init: InitSpec,
    pub t_max: f64,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub samples: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSpec {
    #[serde(default)]
    pub t_max: Option<f64>,
    #[serde(default)]
    pub count: Option<usize>,
    #[serde(default)]
    pub inits: Option<Vec<InitSpec>>,
    #[serde(default)]
    pub tol: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxSpec {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

/// What a spec resolves to.
pub struct Problem {
    pub member: FamilyMember,
    /// Family tag, catalog id or table path.
    pub label: String,
    pub catalog: Option<CatalogId>,
    /// Tabulation grid requested in the family parameters.
    pub grid: Option<usize>,
}

impl ProblemSpec {
    pub fn load(path: &Path) -> Res<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        let mut spec = Self::parse(&text).map_err(|e| match e {
            CliError::Input(m) => CliError::Input(format!("{}: {m}", path.display())),
            other => other,
        })?;
        spec.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(spec)
    }

    pub fn parse(text: &str) -> Res<Self> {
        let spec: ProblemSpec = serde_json::from_str(text).map_err(|e| CliError::input(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Res<()> {
        let n = self.n;
        if !(2..=MAX_DIM).contains(&n) {
            return Err(CliError::input(format!("n = {n} must lie in 2..={MAX_DIM}")));
        }
        if self.signature.len() != n {
            return Err(CliError::input(format!(
                "signature: expected {n} entries, got {}",
                self.signature.len()
            )));
        }
        for (i, e) in self.signature.iter().enumerate() {
            if *e != 1.0 && *e != -1.0 {
                return Err(CliError::input(format!(
                    "signature[{i}] = {e}: entries must be +1 or -1"
                )));
            }
        }
        if let Some(k) = self.k {
            if !(1..=n).contains(&k) {
                return Err(CliError::input(format!("k = {k} must lie in 1..={n}")));
            }
        }
        if let Some(l) = self.lambda {
            if !l.is_finite() {
                return Err(CliError::input("lambda must be finite"));
            }
        }
        if self.ansatz.is_some() && self.family.is_some() {
            return Err(CliError::input("ansatz and family are mutually exclusive"));
        }
        if let Some(b) = &self.sample_box {
            if b.lo.len() != n || b.hi.len() != n {
                return Err(CliError::input(format!("sample_box: lo and hi need {n} entries")));
            }
        }
        if let Some(g) = &self.geodesic {
            check_init("geodesic.init", &g.init, n)?;
            if !(g.t_max.is_finite() && g.t_max > 0.0) {
                return Err(CliError::input(format!(
                    "geodesic.t_max = {} must be positive",
                    g.t_max
                )));
            }
        }
        if let Some(p) = &self.probe {
            for (i, init) in p.inits.iter().flatten().enumerate() {
                check_init(&format!("probe.inits[{i}]"), init, n)?;
            }
            if let Some(t) = p.t_max {
                if !(t.is_finite() && t > 0.0) {
                    return Err(CliError::input(format!("probe.t_max = {t} must be positive")));
                }
            }
        }
        Ok(())
    }

    pub fn signature(&self) -> Signature {
        Signature::new(self.signature.iter().map(|e| *e as i8).collect()).expect("validated signature")
    }

    pub fn sample_box(&self) -> Res<Option<SampleBox>> {
        self.sample_box
            .as_ref()
            .map(|b| SampleBox::new(b.lo.clone(), b.hi.clone()).map_err(CliError::setup))
            .transpose()
    }

    /// Resolve the family or ansatz into a member.
    pub fn problem(&self) -> Res<Problem> {
        let mut p = match (&self.family, &self.ansatz) {
            (Some(f), None) => self.family_problem(f)?,
            (None, Some(a)) => self.ansatz_problem(a)?,
            _ => return Err(CliError::input("spec needs a family or an ansatz")),
        };
        if let Some(b) = self.sample_box()? {
            p.member = p.member.with_sample_box(b).map_err(CliError::setup)?;
        }
        Ok(p)
    }

    fn steady(&self, tag: FamilyTag) -> Res<f64> {
        match self.lambda {
            Some(l) if l != 0.0 => Err(CliError::input(format!(
                "lambda = {l}: {tag} members are steady (lambda = 0)"
            ))),
            _ => Ok(0.0),
        }
    }

    fn family_problem(&self, f: &FamilySpec) -> Res<Problem> {
        let tag: FamilyTag = f.tag.parse().map_err(CliError::setup)?;
        let p = &f.params;
        let allowed = allowed_params(tag);
        if let Some(bad) = p.given().into_iter().find(|g| !allowed.contains(g)) {
            return Err(CliError::input(format!(
                "family.params.{bad} is not used by {tag} (accepted: {})",
                allowed.join(", ")
            )));
        }
        let sig = self.signature();
        let n = self.n;
        let k = self.k.unwrap_or(1);
        let mut catalog_id = None;
        let mut label = tag.as_str().to_string();
        let member = match tag {
            FamilyTag::LightlikeSteady => {
                self.steady(tag)?;
                family_lightlike_steady(
                    &sig,
                    k,
                    p.theta.unwrap_or(1),
                    p.c.unwrap_or(1.0),
                    p.d.unwrap_or(0.0),
                    p.domain.unwrap_or((-1.5, 1.5)),
                )
            }
            FamilyTag::TranslationPhiConst => {
                self.steady(tag)?;
                family_translation_phi_const(&sig, k, p.b.unwrap_or(1.0), p.c.unwrap_or(0.0), p.d.unwrap_or(0.0))
            }
            FamilyTag::TranslationNNe2k | FamilyTag::TranslationNEq2k => {
                self.steady(tag)?;
                let k = if tag == FamilyTag::TranslationNEq2k {
                    if !n.is_multiple_of(2) {
                        return Err(CliError::input(format!("{tag} needs even n, got {n}")));
                    }
                    match self.k {
                        Some(k) if 2 * k != n => {
                            return Err(CliError::input(format!("{tag} needs k = n/2, got k = {k}")))
                        }
                        _ => n / 2,
                    }
                } else {
                    if n == 2 * k {
                        return Err(CliError::input(format!("{tag} needs n != 2k (n = {n}, k = {k})")));
                    }
                    k
                };
                family_translation_implicit(
                    &sig,
                    k,
                    p.c.unwrap_or(1.0),
                    p.c1.unwrap_or(1.0),
                    p.c2.unwrap_or(0.0),
                    p.d.unwrap_or(0.0),
                    p.phi0.unwrap_or(1.0),
                    p.alpha_sign.unwrap_or(1.0),
                )
                .and_then(|mut m| {
                    if let Some(dom) = p.domain {
                        let rel = m.relation.as_ref().expect("implicit member has a relation");
                        let (lo, hi) = rel.admissible_xi_interval();
                        if !(lo < dom.0 && dom.0 < dom.1 && dom.1 < hi) {
                            return Err(yamabe_core::Error::input(format!(
                                "family.params.domain ({}, {}) must lie inside ({lo}, {hi})",
                                dom.0, dom.1
                            )));
                        }
                        m.domain = dom;
                    }
                    Ok(m)
                })
            }
            FamilyTag::RotationGaussian => family_rotation_null_curvature(
                &sig,
                k,
                self.lambda.unwrap_or(0.0),
                NullCase::Gaussian,
                p.c2.unwrap_or(1.0),
                p.c1.unwrap_or(0.0),
            ),
            FamilyTag::RotationLinearPhi => family_rotation_null_curvature(
                &sig,
                k,
                self.lambda.unwrap_or(0.0),
                NullCase::LinearPhi,
                p.c0.unwrap_or(1.0),
                p.c1.unwrap_or(0.0),
            ),
            FamilyTag::Catalog => {
                let id: CatalogId =
                    p.id.as_deref()
                        .ok_or_else(|| CliError::input("family.params.id is required for CATALOG"))?
                        .parse()
                        .map_err(CliError::setup)?;
                catalog_id = Some(id);
                label = id.as_str().to_string();
                catalog(
                    id,
                    &CatalogParams {
                        n: Some(n),
                        k: self.k,
                        lambda: self.lambda,
                        signature: Some(sig),
                        theta: p.theta,
                        c: p.c,
                        c0: p.c0,
                        c1: p.c1,
                        c3: p.c3,
                        c4: p.c4,
                    },
                )
                .map(|e| e.member)
            }
        }
        .map_err(CliError::setup)?;
        Ok(Problem {
            member,
            label,
            catalog: catalog_id,
            grid: p.grid,
        })
    }

    fn ansatz_problem(&self, a: &AnsatzSpec) -> Res<Problem> {
        if let Ok(id) = a.profile.parse::<CatalogId>() {
            if a.alpha.is_some() || a.potential.is_some() {
                return Err(CliError::input(format!(
                    "ansatz: catalog profile {id} fixes alpha and the potential"
                )));
            }
            let e = catalog(
                id,
                &CatalogParams {
                    n: Some(self.n),
                    k: self.k,
                    lambda: self.lambda,
                    signature: Some(self.signature()),
                    ..Default::default()
                },
            )
            .map_err(CliError::setup)?;
            let kind = match e.member.ansatz {
                Ansatz::Translation(_) => AnsatzKind::Translation,
                Ansatz::Rotation(_) => AnsatzKind::Rotation,
            };
            if kind != a.kind {
                return Err(CliError::input(format!(
                    "ansatz.type: {id} is a {} solution",
                    e.member.ansatz.kind()
                )));
            }
            return Ok(Problem {
                member: e.member,
                label: id.as_str().into(),
                catalog: Some(id),
                grid: None,
            });
        }
        let path = self.base_dir.join(&a.profile);
        let file =
            fs::File::open(&path).map_err(|e| CliError::input(format!("ansatz.profile {}: {e}", path.display())))?;
        let table = ProfileTable::read_csv(file).map_err(CliError::setup)?;
        let range = (table.xi[0], table.xi[table.len() - 1]);
        let phi: Arc<dyn Profile> = Arc::new(table);
        let pot = a.potential.as_ref().map_or((0.0, 0.0), |p| (p.c, p.d));
        let f = PotentialProfile::new(phi.clone(), range, range.0, pot.0, pot.1).map_err(CliError::setup)?;
        let f: Arc<dyn Profile> = Arc::new(f);
        let sig = self.signature();
        let n = self.n;
        let (ansatz, bbox) = match a.kind {
            AnsatzKind::Translation => {
                let alpha = a
                    .alpha
                    .clone()
                    .ok_or_else(|| CliError::input("ansatz.alpha is required for a translation profile"))?;
                if alpha.len() != n {
                    return Err(CliError::input(format!(
                        "ansatz.alpha: expected {n} entries, got {}",
                        alpha.len()
                    )));
                }
                let t = TranslationAnsatz::new(alpha.clone(), sig, phi, f).map_err(CliError::setup)?;
                (Ansatz::Translation(t), translation_box(&alpha, range))
            }
            AnsatzKind::Rotation => {
                if a.alpha.is_some() {
                    return Err(CliError::input("ansatz.alpha is only used by translation profiles"));
                }
                let t = RotationAnsatz::new(sig, range, phi, f).map_err(CliError::setup)?;
                let h = (range.0.abs().max(range.1.abs()) / n as f64).sqrt();
                (Ansatz::Rotation(t), SampleBox::cube(n, h))
            }
        };
        let member = FamilyMember::from_ansatz(
            format!("tabulated {} profile", a.kind_str()),
            ansatz,
            self.k.unwrap_or(1),
            self.lambda.unwrap_or(0.0),
            range,
            bbox,
        )
        .map_err(CliError::setup)?;
        Ok(Problem {
            member,
            label: a.profile.clone(),
            catalog: None,
            grid: None,
        })
    }

    pub fn geodesic_options(tol: Option<f64>, samples: Option<usize>) -> IntegratorOptions {
        let mut o = IntegratorOptions::default();
        if let Some(t) = tol {
            o = o.with_tol(t);
        }
        if let Some(s) = samples {
            o.samples = s;
        }
        o
    }
}

impl AnsatzSpec {
    fn kind_str(&self) -> &'static str {
        match self.kind {
            AnsatzKind::Translation => "translation",
            AnsatzKind::Rotation => "rotation",
        }
    }
}

impl InitSpec {
    pub fn state(&self) -> Res<GeodesicState> {
        GeodesicState::new(0.0, self.x.clone(), self.v.clone()).map_err(CliError::setup)
    }
}

fn check_init(field: &str, init: &InitSpec, n: usize) -> Res<()> {
    if init.x.len() != n || init.v.len() != n {
        return Err(CliError::input(format!("{field}: x and v need {n} entries")));
    }
    if init.x.iter().chain(&init.v).any(|c| !c.is_finite()) {
        return Err(CliError::input(format!("{field}: entries must be finite")));
    }
    Ok(())
}

// Cube centred where ξ is mid-range, small enough that ξ stays inside.
fn translation_box(alpha: &[f64], range: (f64, f64)) -> SampleBox {
    let n = alpha.len();
    let j = (0..n)
        .max_by(|&a, &b| alpha[a].abs().total_cmp(&alpha[b].abs()))
        .expect("nonempty alpha");
    let mid = 0.5 * (range.0 + range.1);
    let mut centre = vec![0.0; n];
    centre[j] = mid / alpha[j];
    let l1: f64 = alpha.iter().map(|a| a.abs()).sum();
    let w = 0.45 * (range.1 - range.0) / l1;
    SampleBox::new(
        centre.iter().map(|c| c - w).collect(),
        centre.iter().map(|c| c + w).collect(),
    )
    .expect("valid box")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn err(text: &str) -> String {
        match ProblemSpec::parse(text) {
            Err(CliError::Input(m)) => m,
            other => panic!("expected input error, got {:?}", other.map(|_| ())),
        }
    }

    #[test]
    fn malformed_signature_names_the_field() {
        let m = err(r#"{"n": 2, "k": 1, "lambda": 0, "signature": [0, 1]}"#);
        assert!(m.contains("signature[0]"), "{m}");
        let m = err(r#"{"n": 3, "signature": [1, 1]}"#);
        assert!(m.contains("signature"), "{m}");
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let m = err(r#"{"n": 2, "signature": [1, 1], "colour": 3}"#);
        assert!(m.contains("colour"), "{m}");
        let m = err(r#"{"n": 2, "signature": [1, 1], "family": {"tag": "CATALOG", "params": {"zeta": 1}}}"#);
        assert!(m.contains("zeta"), "{m}");
    }

    #[test]
    fn family_params_must_belong_to_the_tag() {
        let s = ProblemSpec::parse(
            r#"{"n": 3, "signature": [1, 1, 1], "family": {"tag": "ROTATION_GAUSSIAN", "params": {"theta": 2}}}"#,
        )
        .unwrap();
        match s.problem() {
            Err(CliError::Input(m)) => assert!(m.contains("theta"), "{m}"),
            _ => panic!("expected input error"),
        }
    }

    #[test]
    fn steady_families_reject_nonzero_lambda() {
        let s = ProblemSpec::parse(
            r#"{"n": 3, "lambda": 1, "signature": [1, 1, 1], "family": {"tag": "TRANSLATION_PHI_CONST"}}"#,
        )
        .unwrap();
        assert!(matches!(s.problem(), Err(CliError::Input(_))));
    }

    #[test]
    fn catalog_profile_must_match_the_ansatz_type() {
        let s = ProblemSpec::parse(
            r#"{"n": 3, "signature": [1, 1, 1], "ansatz": {"type": "translation", "profile": "EX26"}}"#,
        )
        .unwrap();
        assert!(matches!(s.problem(), Err(CliError::Input(_))));
        let s = ProblemSpec::parse(
            r#"{"n": 3, "signature": [1, 1, 1], "ansatz": {"type": "rotation", "profile": "EX26"}}"#,
        )
        .unwrap();
        assert_eq!(s.problem().ok().unwrap().catalog, Some(CatalogId::Ex26));
    }

    #[test]
    fn translation_box_keeps_xi_in_range() {
        let b = translation_box(&[0.5, -2.0, 1.0], (1.0, 3.0));
        for corner in 0..8 {
            let x: Vec<f64> = (0..3)
                .map(|i| if corner >> i & 1 == 1 { b.hi[i] } else { b.lo[i] })
                .collect();
            let xi = 0.5 * x[0] - 2.0 * x[1] + x[2];
            assert!((1.0..=3.0).contains(&xi), "{xi}");
        }
    }
}
