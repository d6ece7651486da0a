//! Batch verification runs and machine-readable reports.
//!
//! Three run modes share one configuration type:
//!
//! * `run_check` samples a single catalog map and grades it against its
//!   declared expectations,
//! * `run_sweep` grades a parameter grid (the projection family over
//!   `(m, l)`, or the fibration family over `eps`),
//! * `run_tables` compares the computed connection and curvature tables of
//!   the model spaces against their closed forms.
//!
//! Reports serialize to JSON with every float printed as `{:.16e}` (17
//! significant digits), so a report round-trips exactly and two runs with
//! the same configuration and seed produce byte-identical output. Wall time
//! is kept out of the serialized report for the same reason; it rides on
//! `RunOutcome` for the caller to log.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::connection::{gamma_values, structure_values};
use crate::curvature::{ricci_frame, riemann_frame};
use crate::error::{GeoError, Result};
use crate::invariants::{
    base_gauss_curvature, curvature_identity_report, data_values, harmonic_system_report,
    NATURAL_FRAME_TOL,
};
use crate::real::DIM;
use crate::spaces::{
    bcv_space, berger_space, classify_bcv, hopf_spec, projection_spec, with_params, BcvParams,
    BergerParams, SpaceDescriptor, BERGER_SURVEY, CLASSIFICATION_SURVEY,
};
use crate::submersion::{harmonic_verdict, SpecParams, SubmersionSpec, SUBMERSION_TOL};

/// Version tag stamped into every report.
pub const SCHEMA_VERSION: u32 = 1;

pub const DEFAULT_POINTS: usize = 200;

/// Default sampling seed ("GEO3" as big-endian ASCII).
pub const DEFAULT_SEED: u64 = 0x4745_4F33;

/// Largest spread tolerated when an entry declares its base curvature
/// constant.
pub const KN_SPREAD_LIMIT: f64 = 1e-6;

/// A residual system counts as satisfied when its worst residual stays
/// below this.
pub const RC0_TOL: f64 = 1e-8;

/// Bound on `|sigma^2 - eps^2|` for the squashed-sphere fibration.
pub const SIGMA_SQ_TOL: f64 = 1e-9;

const DEFAULT_SWEEP_M: [f64; 5] = [-1.0, -0.25, 0.0, 0.25, 1.0];
const DEFAULT_SWEEP_L: [f64; 3] = [0.0, 1.0, 2.0];

const CHECK_CSV_HEADER: &str = "index,x0,x1,x2,x3,kappa_max,kn,rc_max,rc0_max,bracket,energy_dev";
const SWEEP_CSV_HEADER: &str =
    "cell,m,l,eps,index,x0,x1,x2,x3,kappa_max,kn,rc_max,rc0_max,bracket,energy_dev";
const TABLES_CSV_HEADER: &str = "space,m,l,eps,index,structure,gamma,riemann,ricci";

/// Formats a float with 17 significant digits, enough to reproduce the bits.
pub fn sci(x: f64) -> String {
    format!("{x:.16e}")
}

/// An `f64` that serializes as a raw 17-digit JSON number and compares by
/// value after a round trip. Non-finite values serialize as `null`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SciF64(pub f64);

impl Serialize for SciF64 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            let raw = serde_json::value::RawValue::from_string(sci(self.0))
                .map_err(serde::ser::Error::custom)?;
            raw.serialize(s)
        } else {
            s.serialize_none()
        }
    }
}

impl<'de> Deserialize<'de> for SciF64 {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Option::<f64>::deserialize(d)?;
        Ok(SciF64(v.unwrap_or(f64::NAN)))
    }
}

mod sci_fmt {
    use super::SciF64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        SciF64(*v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(SciF64::deserialize(d)?.0)
    }
}

mod sci_opt {
    use super::SciF64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(x) => SciF64(*x).serialize(s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        Ok(Option::<SciF64>::deserialize(d)?.map(|x| x.0))
    }
}

mod sci_vec {
    use super::SciF64;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|&x| SciF64(x)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        Ok(Vec::<SciF64>::deserialize(d)?
            .into_iter()
            .map(|x| x.0)
            .collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

impl std::str::FromStr for OutputFormat {
    type Err = GeoError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(GeoError::InvalidConfig(format!(
                "unknown output format `{other}` (expected json or csv)"
            ))),
        }
    }
}

impl std::fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OutputFormat::Json => write!(f, "json"),
            OutputFormat::Csv => write!(f, "csv"),
        }
    }
}

/// Tolerances a run grades against. Each one must be positive and finite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Worst tension scalar still counted as harmonic.
    #[serde(with = "sci_fmt")]
    pub harmonic: f64,
    /// Bound on the seven curvature identities and on `|K^N - expected|`.
    #[serde(with = "sci_fmt")]
    pub identity: f64,
    /// Bound on the closed-form table comparisons.
    #[serde(with = "sci_fmt")]
    pub curvature: f64,
    /// Relative bound on the finite-difference cross-check.
    #[serde(with = "sci_fmt")]
    pub oracle: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            harmonic: 1e-8,
            identity: 1e-7,
            curvature: 1e-9,
            oracle: 1e-5,
        }
    }
}

/// One run request: what to verify, where, and how strictly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Catalog map id, for `run_check`.
    pub map: Option<String>,
    /// Space family selector (`all`, `bcv`, `berger`), for `run_tables`.
    pub space: Option<String>,
    #[serde(with = "sci_vec")]
    pub m: Vec<f64>,
    #[serde(with = "sci_vec")]
    pub l: Vec<f64>,
    #[serde(with = "sci_vec")]
    pub eps: Vec<f64>,
    pub points: usize,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub format: OutputFormat,
    pub out: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            map: None,
            space: None,
            m: Vec::new(),
            l: Vec::new(),
            eps: Vec::new(),
            points: DEFAULT_POINTS,
            seed: DEFAULT_SEED,
            tolerances: Tolerances::default(),
            format: OutputFormat::Json,
            out: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.points == 0 {
            return Err(GeoError::InvalidConfig(
                "point count must be at least 1".into(),
            ));
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("harmonic", t.harmonic),
            ("identity", t.identity),
            ("curvature", t.curvature),
            ("oracle", t.oracle),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(GeoError::InvalidConfig(format!(
                    "tolerance `{name}` must be positive and finite, got {v}"
                )));
            }
        }
        for (name, list) in [("m", &self.m), ("l", &self.l), ("eps", &self.eps)] {
            if list.iter().any(|v| !v.is_finite()) {
                return Err(GeoError::InvalidConfig(format!(
                    "parameter list `{name}` contains a non-finite value"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerdictSummary {
    pub harmonic: bool,
    pub expected: Option<bool>,
    #[serde(with = "sci_fmt")]
    pub max_kappa: f64,
    #[serde(with = "sci_fmt")]
    pub tol: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KnSummary {
    #[serde(with = "sci_fmt")]
    pub mean: f64,
    /// `max - min` over the sample.
    #[serde(with = "sci_fmt")]
    pub spread: f64,
    #[serde(with = "sci_fmt")]
    pub min: f64,
    #[serde(with = "sci_fmt")]
    pub max: f64,
    pub constant_declared: bool,
    #[serde(with = "sci_opt")]
    pub expected: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RcSummary {
    #[serde(with = "sci_fmt")]
    pub max: f64,
    /// Worst residual of each of the seven identities over the sample.
    #[serde(with = "sci_vec")]
    pub per_identity: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rc0Summary {
    #[serde(with = "sci_fmt")]
    pub max: f64,
    pub holds: bool,
    pub expected: Option<bool>,
}

/// Structural residuals of the submersion itself, maxima over the sample.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructureResiduals {
    #[serde(with = "sci_fmt")]
    pub orthonormality: f64,
    #[serde(with = "sci_fmt")]
    pub kernel_leak: f64,
    #[serde(with = "sci_fmt")]
    pub isometry: f64,
    /// Bracket-shape residual of the natural frame.
    #[serde(with = "sci_fmt")]
    pub bracket: f64,
    /// `| |tau|^2 - (k1^2 + k2^2) |`.
    #[serde(with = "sci_fmt")]
    pub tension_identity: f64,
    /// `|energy density - 1|`.
    #[serde(with = "sci_fmt")]
    pub energy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualSummary {
    pub rc: RcSummary,
    pub rc0: Rc0Summary,
    pub submersion: StructureResiduals,
}

/// One graded acceptance rule.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RuleOutcome {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub schema: u32,
    pub kind: String,
    /// Resolved catalog id.
    pub id: String,
    /// Model-geometry label for the parametric family, when it applies.
    pub classification: Option<String>,
    pub config: RunConfig,
    pub verdict: VerdictSummary,
    pub kn: KnSummary,
    pub residuals: ResidualSummary,
    pub rules: Vec<RuleOutcome>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    #[serde(with = "sci_opt")]
    pub m: Option<f64>,
    #[serde(with = "sci_opt")]
    pub l: Option<f64>,
    #[serde(with = "sci_opt")]
    pub eps: Option<f64>,
    pub classification: Option<String>,
    pub harmonic: bool,
    #[serde(with = "sci_fmt")]
    pub max_kappa: f64,
    #[serde(with = "sci_fmt")]
    pub kn_mean: f64,
    #[serde(with = "sci_fmt")]
    pub kn_spread: f64,
    /// Worst `|K^N - expected|` over the sample.
    #[serde(with = "sci_fmt")]
    pub kn_dev: f64,
    #[serde(with = "sci_fmt")]
    pub rc_max: f64,
    #[serde(with = "sci_fmt")]
    pub rc0_max: f64,
    /// Worst `|sigma^2 - eps^2|`; only for the fibration family.
    #[serde(with = "sci_opt")]
    pub sigma_sq_dev: Option<f64>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub schema: u32,
    pub kind: String,
    pub config: RunConfig,
    pub cells: Vec<SweepCell>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableCell {
    pub space: String,
    #[serde(with = "sci_opt")]
    pub m: Option<f64>,
    #[serde(with = "sci_opt")]
    pub l: Option<f64>,
    #[serde(with = "sci_opt")]
    pub eps: Option<f64>,
    #[serde(with = "sci_fmt")]
    pub structure_max: f64,
    #[serde(with = "sci_fmt")]
    pub gamma_max: f64,
    #[serde(with = "sci_fmt")]
    pub riemann_max: f64,
    #[serde(with = "sci_fmt")]
    pub ricci_max: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TablesReport {
    pub schema: u32,
    pub kind: String,
    pub config: RunConfig,
    pub cells: Vec<TableCell>,
    pub pass: bool,
}

// A handful of reports exist per process, so the variant size gap is moot.
#[allow(clippy::large_enum_variant)]
#[derive(Clone, Debug, PartialEq)]
pub enum ReportBody {
    Check(CheckReport),
    Sweep(SweepReport),
    Tables(TablesReport),
}

impl ReportBody {
    pub fn pass(&self) -> bool {
        match self {
            ReportBody::Check(r) => r.pass,
            ReportBody::Sweep(r) => r.pass,
            ReportBody::Tables(r) => r.pass,
        }
    }

    pub fn config(&self) -> &RunConfig {
        match self {
            ReportBody::Check(r) => &r.config,
            ReportBody::Sweep(r) => &r.config,
            ReportBody::Tables(r) => &r.config,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let text = match self {
            ReportBody::Check(r) => serde_json::to_string_pretty(r),
            ReportBody::Sweep(r) => serde_json::to_string_pretty(r),
            ReportBody::Tables(r) => serde_json::to_string_pretty(r),
        }
        .map_err(|e| GeoError::Unsupported(format!("report serialization failed: {e}")))?;
        Ok(text + "\n")
    }
}

/// Parses a JSON report emitted by `to_json`, dispatching on its `kind`.
pub fn parse_report(text: &str) -> Result<ReportBody> {
    #[derive(Deserialize)]
    struct Probe {
        schema: u32,
        kind: String,
    }
    let bad = |e: serde_json::Error| GeoError::InvalidConfig(format!("report does not parse: {e}"));
    let probe: Probe = serde_json::from_str(text).map_err(bad)?;
    if probe.schema != SCHEMA_VERSION {
        return Err(GeoError::InvalidConfig(format!(
            "unsupported report schema {} (expected {SCHEMA_VERSION})",
            probe.schema
        )));
    }
    match probe.kind.as_str() {
        "check" => Ok(ReportBody::Check(serde_json::from_str(text).map_err(bad)?)),
        "sweep" => Ok(ReportBody::Sweep(serde_json::from_str(text).map_err(bad)?)),
        "tables" => Ok(ReportBody::Tables(serde_json::from_str(text).map_err(bad)?)),
        other => Err(GeoError::InvalidConfig(format!(
            "unknown report kind `{other}`"
        ))),
    }
}

/// A finished run: the serializable report plus per-point CSV rows and the
/// wall time, which deliberately stays out of the report bytes.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub body: ReportBody,
    csv_header: &'static str,
    csv_rows: Vec<String>,
    pub wall_ms: f64,
}

impl RunOutcome {
    pub fn pass(&self) -> bool {
        self.body.pass()
    }

    pub fn to_json(&self) -> Result<String> {
        self.body.to_json()
    }

    /// One row per sampled point, plus a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.csv_rows.len() + 1));
        out.push_str(self.csv_header);
        out.push('\n');
        for row in &self.csv_rows {
            out.push_str(row);
            out.push('\n');
        }
        out
    }
}

/// Renders a run in the format its configuration asked for.
pub fn emit_report(outcome: &RunOutcome) -> Result<String> {
    match outcome.body.config().format {
        OutputFormat::Json => outcome.to_json(),
        OutputFormat::Csv => Ok(outcome.to_csv()),
    }
}

struct PointRow {
    index: usize,
    coords: [f64; DIM],
    kappa: f64,
    kn: f64,
    rc: f64,
    rc0: f64,
    bracket: f64,
    energy_dev: f64,
}

impl PointRow {
    fn csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.index,
            sci(self.coords[0]),
            sci(self.coords[1]),
            sci(self.coords[2]),
            sci(self.coords[3]),
            sci(self.kappa),
            sci(self.kn),
            sci(self.rc),
            sci(self.rc0),
            sci(self.bracket),
            sci(self.energy_dev),
        )
    }
}

struct SampleStats {
    kappa_max: f64,
    kn_mean: f64,
    kn_min: f64,
    kn_max: f64,
    kn_dev: Option<f64>,
    rc_per: [f64; 7],
    rc_max: f64,
    rc0_max: f64,
    structure: StructureResiduals,
    sigma_sq_dev: Option<f64>,
    rows: Vec<PointRow>,
}

/// Samples a spec and accumulates every residual the reports care about.
/// Structural failures (not a submersion, frame not natural, degenerate
/// metric) surface as errors rather than numbers.
fn sample_spec(spec: &SubmersionSpec, points: usize, seed: u64) -> Result<SampleStats> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts = spec.sample(&mut rng, points);

    let mut kappa_max = 0.0f64;
    let mut kn_sum = 0.0f64;
    let mut kn_min = f64::INFINITY;
    let mut kn_max = f64::NEG_INFINITY;
    let mut kn_dev: Option<f64> = None;
    let mut rc_per = [0.0f64; 7];
    let mut rc0_max = 0.0f64;
    let mut structure = StructureResiduals {
        orthonormality: 0.0,
        kernel_leak: 0.0,
        isometry: 0.0,
        bracket: 0.0,
        tension_identity: 0.0,
        energy: 0.0,
    };
    let mut sigma_sq_dev: Option<f64> = None;
    let mut rows = Vec::with_capacity(pts.len());

    for (index, p) in pts.iter().enumerate() {
        let v = spec.validate(p, SUBMERSION_TOL)?;
        let data = data_values(spec.frame(), p)?;
        let tension = spec.tension(p)?;
        let kn = base_gauss_curvature(spec.frame(), p)?;
        let idr = curvature_identity_report(spec.frame(), p)?;
        let hsr = harmonic_system_report(spec.frame(), p)?;
        let energy_dev = (spec.energy_density(p)? - 1.0).abs();

        kappa_max = kappa_max.max(tension.max_kappa);
        kn_sum += kn;
        kn_min = kn_min.min(kn);
        kn_max = kn_max.max(kn);
        if let Some(k0) = spec.expected_kn() {
            let d = (kn - k0).abs();
            kn_dev = Some(kn_dev.unwrap_or(0.0).max(d));
        }
        let res = idr.residuals();
        for (slot, r) in rc_per.iter_mut().zip(res) {
            *slot = slot.max(r);
        }
        rc0_max = rc0_max.max(hsr.max_residual());
        structure.orthonormality = structure.orthonormality.max(v.orthonormality_defect);
        structure.kernel_leak = structure.kernel_leak.max(v.kernel_leak);
        structure.isometry = structure.isometry.max(v.isometry_defect);
        structure.bracket = structure.bracket.max(data.residual());
        structure.tension_identity = structure.tension_identity.max(tension.identity_defect);
        structure.energy = structure.energy.max(energy_dev);
        if let SpecParams::Berger { eps } = spec.params() {
            let d = (data.sigma * data.sigma - eps * eps).abs();
            sigma_sq_dev = Some(sigma_sq_dev.unwrap_or(0.0).max(d));
        }

        rows.push(PointRow {
            index,
            coords: *p.coords(),
            kappa: tension.max_kappa,
            kn,
            rc: idr.max_residual(),
            rc0: hsr.max_residual(),
            bracket: data.residual(),
            energy_dev,
        });
    }

    let rc_max = rc_per.iter().fold(0.0f64, |m, &q| m.max(q));
    Ok(SampleStats {
        kappa_max,
        kn_mean: kn_sum / pts.len() as f64,
        kn_min,
        kn_max,
        kn_dev,
        rc_per,
        rc_max,
        rc0_max,
        structure,
        sigma_sq_dev,
        rows,
    })
}

fn rule(name: &str, pass: bool, detail: String) -> RuleOutcome {
    RuleOutcome {
        name: name.into(),
        pass,
        detail,
    }
}

fn classification_label(params: SpecParams) -> Option<String> {
    match params {
        SpecParams::Bcv { m, l } => Some(classify_bcv(m, l).to_string()),
        _ => None,
    }
}

/// Verifies one catalog map at one parameter value.
///
/// Requires `config.map`; accepts at most one value per parameter list. An
/// indeterminate harmonicity verdict surfaces as `GeoError::Inconclusive`.
pub fn run_check(config: &RunConfig) -> Result<RunOutcome> {
    let t0 = Instant::now();
    config.validate()?;
    if config.space.is_some() {
        return Err(GeoError::InvalidConfig(
            "check grades a map; use --map, not --space".into(),
        ));
    }
    let id = config
        .map
        .as_deref()
        .ok_or_else(|| GeoError::InvalidConfig("check needs a map id".into()))?;
    for (name, list) in [("m", &config.m), ("l", &config.l), ("eps", &config.eps)] {
        if list.len() > 1 {
            return Err(GeoError::InvalidConfig(format!(
                "check takes at most one `{name}` value, got {}",
                list.len()
            )));
        }
    }
    let spec = with_params(
        id,
        config.m.first().copied(),
        config.l.first().copied(),
        config.eps.first().copied(),
    )?;

    let stats = sample_spec(&spec, config.points, config.seed)?;
    let verdict = harmonic_verdict(stats.kappa_max, config.tolerances.harmonic)?;

    let mut rules = Vec::new();
    rules.push(rule(
        "submersion-structure",
        stats
            .structure
            .orthonormality
            .max(stats.structure.kernel_leak)
            .max(stats.structure.isometry)
            <= SUBMERSION_TOL,
        format!(
            "orthonormality {:.3e}, kernel leak {:.3e}, isometry {:.3e} (tol {SUBMERSION_TOL:.0e})",
            stats.structure.orthonormality, stats.structure.kernel_leak, stats.structure.isometry
        ),
    ));
    rules.push(rule(
        "frame-brackets",
        stats.structure.bracket <= NATURAL_FRAME_TOL,
        format!(
            "bracket-shape residual {:.3e} (tol {NATURAL_FRAME_TOL:.0e})",
            stats.structure.bracket
        ),
    ));
    rules.push(rule(
        "energy-density",
        stats.structure.energy <= SUBMERSION_TOL,
        format!("max |e - 1| = {:.3e}", stats.structure.energy),
    ));
    rules.push(rule(
        "tension-identity",
        stats.structure.tension_identity <= SUBMERSION_TOL,
        format!(
            "| |tau|^2 - kappa^2 | = {:.3e}",
            stats.structure.tension_identity
        ),
    ));
    let verdict_pass = spec
        .expected_harmonic()
        .map_or(true, |want| want == verdict.is_harmonic());
    rules.push(rule(
        "harmonic-verdict",
        verdict_pass,
        match spec.expected_harmonic() {
            Some(want) => format!(
                "{verdict} with max |kappa| = {:.3e}; catalog expects {}",
                stats.kappa_max,
                if want { "harmonic" } else { "non-harmonic" }
            ),
            None => format!("{verdict}; no expectation declared"),
        },
    ));
    if spec.kn_constant() {
        let spread = stats.kn_max - stats.kn_min;
        rules.push(rule(
            "kn-spread",
            spread <= KN_SPREAD_LIMIT,
            format!("base curvature spread {spread:.3e} (limit {KN_SPREAD_LIMIT:.0e})"),
        ));
    }
    if let (Some(k0), Some(dev)) = (spec.expected_kn(), stats.kn_dev) {
        rules.push(rule(
            "kn-value",
            dev <= config.tolerances.identity,
            format!(
                "max |K^N - ({k0})| = {dev:.3e} (tol {:.0e})",
                config.tolerances.identity
            ),
        ));
    }
    rules.push(rule(
        "curvature-identities",
        stats.rc_max <= config.tolerances.identity,
        format!(
            "worst of the seven residuals {:.3e} (tol {:.0e})",
            stats.rc_max, config.tolerances.identity
        ),
    ));
    let rc0_holds = stats.rc0_max <= RC0_TOL;
    if let Some(want) = spec.rc0_expected() {
        rules.push(rule(
            "harmonic-residual-system",
            rc0_holds == want,
            format!(
                "max residual {:.3e}, system {}; catalog expects it to {}",
                stats.rc0_max,
                if rc0_holds { "holds" } else { "fails" },
                if want { "hold" } else { "fail" }
            ),
        ));
    }
    let pass = rules.iter().all(|r| r.pass);

    let report = CheckReport {
        schema: SCHEMA_VERSION,
        kind: "check".into(),
        id: spec.id().to_string(),
        classification: classification_label(spec.params()),
        config: config.clone(),
        verdict: VerdictSummary {
            harmonic: verdict.is_harmonic(),
            expected: spec.expected_harmonic(),
            max_kappa: stats.kappa_max,
            tol: config.tolerances.harmonic,
        },
        kn: KnSummary {
            mean: stats.kn_mean,
            spread: stats.kn_max - stats.kn_min,
            min: stats.kn_min,
            max: stats.kn_max,
            constant_declared: spec.kn_constant(),
            expected: spec.expected_kn(),
        },
        residuals: ResidualSummary {
            rc: RcSummary {
                max: stats.rc_max,
                per_identity: stats.rc_per.to_vec(),
            },
            rc0: Rc0Summary {
                max: stats.rc0_max,
                holds: rc0_holds,
                expected: spec.rc0_expected(),
            },
            submersion: stats.structure.clone(),
        },
        rules,
        pass,
    };

    Ok(RunOutcome {
        body: ReportBody::Check(report),
        csv_header: CHECK_CSV_HEADER,
        csv_rows: stats.rows.iter().map(PointRow::csv).collect(),
        wall_ms: t0.elapsed().as_secs_f64() * 1e3,
    })
}

fn sweep_cell(
    spec: &SubmersionSpec,
    m: Option<f64>,
    l: Option<f64>,
    eps: Option<f64>,
    cell: usize,
    config: &RunConfig,
    rows: &mut Vec<String>,
) -> Result<SweepCell> {
    // Every cell restarts from the same seed so cells are comparable and
    // insensitive to grid order.
    let stats = sample_spec(spec, config.points, config.seed)?;
    let verdict = harmonic_verdict(stats.kappa_max, config.tolerances.harmonic)?;

    let kn_dev = stats.kn_dev.unwrap_or(0.0);
    let kn_spread = stats.kn_max - stats.kn_min;
    let rc0_holds = stats.rc0_max <= RC0_TOL;
    let mut pass = spec
        .expected_harmonic()
        .map_or(true, |want| want == verdict.is_harmonic());
    pass = pass && kn_dev <= config.tolerances.identity;
    pass = pass && (!spec.kn_constant() || kn_spread <= KN_SPREAD_LIMIT);
    pass = pass && stats.rc_max <= config.tolerances.identity;
    pass = pass && spec.rc0_expected().map_or(true, |want| want == rc0_holds);
    if let Some(dev) = stats.sigma_sq_dev {
        pass = pass && dev <= SIGMA_SQ_TOL;
    }

    let prefix = format!(
        "{cell},{},{},{}",
        m.map(sci).unwrap_or_default(),
        l.map(sci).unwrap_or_default(),
        eps.map(sci).unwrap_or_default()
    );
    for row in &stats.rows {
        rows.push(format!("{prefix},{}", row.csv()));
    }

    Ok(SweepCell {
        m,
        l,
        eps,
        classification: classification_label(spec.params()),
        harmonic: verdict.is_harmonic(),
        max_kappa: stats.kappa_max,
        kn_mean: stats.kn_mean,
        kn_spread,
        kn_dev,
        rc_max: stats.rc_max,
        rc0_max: stats.rc0_max,
        sigma_sq_dev: stats.sigma_sq_dev,
        pass,
    })
}

/// Grades a parameter grid: `(m, l)` cells of the projection family, or
/// `eps` cells of the fibration family. Absent ranges fall back to the
/// default grid; mixing the two families is a configuration error.
pub fn run_sweep(config: &RunConfig) -> Result<RunOutcome> {
    let t0 = Instant::now();
    config.validate()?;
    if config.map.is_some() || config.space.is_some() {
        return Err(GeoError::InvalidConfig(
            "sweep picks its own maps; drop --map/--space".into(),
        ));
    }
    let berger = !config.eps.is_empty();
    if berger && (!config.m.is_empty() || !config.l.is_empty()) {
        return Err(GeoError::InvalidConfig(
            "sweep ranges are either --m/--l or --eps, not both".into(),
        ));
    }

    let mut cells = Vec::new();
    let mut rows = Vec::new();
    if berger {
        for (i, &e) in config.eps.iter().enumerate() {
            let spec = hopf_spec(BergerParams::new(e)?)?;
            cells.push(sweep_cell(
                &spec,
                None,
                None,
                Some(e),
                i,
                config,
                &mut rows,
            )?);
        }
    } else {
        let ms: &[f64] = if config.m.is_empty() {
            &DEFAULT_SWEEP_M
        } else {
            &config.m
        };
        let ls: &[f64] = if config.l.is_empty() {
            &DEFAULT_SWEEP_L
        } else {
            &config.l
        };
        let mut cell = 0;
        for &m in ms {
            for &l in ls {
                let spec = projection_spec(BcvParams::new(m, l)?)?;
                cells.push(sweep_cell(
                    &spec,
                    Some(m),
                    Some(l),
                    None,
                    cell,
                    config,
                    &mut rows,
                )?);
                cell += 1;
            }
        }
    }

    let pass = cells.iter().all(|c| c.pass);
    let report = SweepReport {
        schema: SCHEMA_VERSION,
        kind: "sweep".into(),
        config: config.clone(),
        cells,
        pass,
    };
    Ok(RunOutcome {
        body: ReportBody::Sweep(report),
        csv_header: SWEEP_CSV_HEADER,
        csv_rows: rows,
        wall_ms: t0.elapsed().as_secs_f64() * 1e3,
    })
}

fn table_cell(
    space: &SpaceDescriptor,
    m: Option<f64>,
    l: Option<f64>,
    eps: Option<f64>,
    config: &RunConfig,
    rows: &mut Vec<String>,
) -> Result<TableCell> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let pts = space.chart().sample(&mut rng, config.points);
    let riemann_expected = space.expected_riemann();
    let ricci_expected = space.expected_ricci();

    let mut structure_max = 0.0f64;
    let mut gamma_max = 0.0f64;
    let mut riemann_max = 0.0f64;
    let mut ricci_max = 0.0f64;
    for (index, p) in pts.iter().enumerate() {
        let c = structure_values(space.frame(), p)?;
        let ce = space.expected_structure_at(p);
        let ga = gamma_values(space.frame(), p)?;
        let ge = space.expected_gamma_at(p);
        let mut sdev = 0.0f64;
        let mut gdev = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    sdev = sdev.max((c[i][j][k] - ce[i][j][k]).abs());
                    gdev = gdev.max((ga[i][j][k] - ge[i][j][k]).abs());
                }
            }
        }
        let rt = riemann_frame(space.frame(), p)?;
        let mut rdev = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for q in 0..3 {
                        rdev = rdev.max((rt.get(i, j, k, q) - riemann_expected[i][j][k][q]).abs());
                    }
                }
            }
        }
        let ric = ricci_frame(space.frame(), p)?;
        let mut ricdev = 0.0f64;
        for a in 0..3 {
            for b in 0..3 {
                ricdev = ricdev.max((ric[a][b] - ricci_expected[a][b]).abs());
            }
        }

        structure_max = structure_max.max(sdev);
        gamma_max = gamma_max.max(gdev);
        riemann_max = riemann_max.max(rdev);
        ricci_max = ricci_max.max(ricdev);
        rows.push(format!(
            "{},{},{},{},{index},{},{},{},{}",
            space.id(),
            m.map(sci).unwrap_or_default(),
            l.map(sci).unwrap_or_default(),
            eps.map(sci).unwrap_or_default(),
            sci(sdev),
            sci(gdev),
            sci(rdev),
            sci(ricdev),
        ));
    }

    let tol = config.tolerances.curvature;
    let pass = structure_max <= tol && gamma_max <= tol && riemann_max <= tol && ricci_max <= tol;
    Ok(TableCell {
        space: space.id().to_string(),
        m,
        l,
        eps,
        structure_max,
        gamma_max,
        riemann_max,
        ricci_max,
        pass,
    })
}

/// Compares computed structure functions, connection coefficients, Riemann
/// components, and Ricci tensors of the model spaces against their closed
/// forms, over the survey grid or over explicit parameter lists.
pub fn run_tables(config: &RunConfig) -> Result<RunOutcome> {
    let t0 = Instant::now();
    config.validate()?;
    if config.map.is_some() {
        return Err(GeoError::InvalidConfig(
            "tables grades spaces; use --space, not --map".into(),
        ));
    }
    let which = config.space.as_deref().unwrap_or("all");
    let (do_bcv, do_berger) = match which {
        "all" => (true, true),
        "bcv" => (true, false),
        "berger" => (false, true),
        other => return Err(GeoError::UnknownId(other.to_string())),
    };
    if !do_bcv && (!config.m.is_empty() || !config.l.is_empty()) {
        return Err(GeoError::InvalidConfig(
            "--m/--l only apply to the bcv family".into(),
        ));
    }
    if !do_berger && !config.eps.is_empty() {
        return Err(GeoError::InvalidConfig(
            "--eps only applies to the berger family".into(),
        ));
    }

    let mut cells = Vec::new();
    let mut rows = Vec::new();
    if do_bcv {
        let pairs: Vec<(f64, f64)> = match (config.m.is_empty(), config.l.is_empty()) {
            (true, true) => CLASSIFICATION_SURVEY.to_vec(),
            (false, false) => {
                let mut v = Vec::new();
                for &m in &config.m {
                    for &l in &config.l {
                        v.push((m, l));
                    }
                }
                v
            }
            _ => {
                return Err(GeoError::InvalidConfig(
                    "tables needs both --m and --l, or neither".into(),
                ))
            }
        };
        for (m, l) in pairs {
            let space = bcv_space(BcvParams::new(m, l)?)?;
            cells.push(table_cell(
                &space,
                Some(m),
                Some(l),
                None,
                config,
                &mut rows,
            )?);
        }
    }
    if do_berger {
        let eps_list: Vec<f64> = if config.eps.is_empty() {
            BERGER_SURVEY.to_vec()
        } else {
            config.eps.clone()
        };
        for e in eps_list {
            let space = berger_space(BergerParams::new(e)?)?;
            cells.push(table_cell(&space, None, None, Some(e), config, &mut rows)?);
        }
    }

    let pass = cells.iter().all(|c| c.pass);
    let report = TablesReport {
        schema: SCHEMA_VERSION,
        kind: "tables".into(),
        config: config.clone(),
        cells,
        pass,
    };
    Ok(RunOutcome {
        body: ReportBody::Tables(report),
        csv_header: TABLES_CSV_HEADER,
        csv_rows: rows,
        wall_ms: t0.elapsed().as_secs_f64() * 1e3,
    })
}
