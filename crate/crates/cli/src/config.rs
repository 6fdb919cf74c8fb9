//! Experiment configuration: schema, defaults and diagnostics.

use std::fmt;
use std::path::PathBuf;

use nctorus_core::spectral::{linear_grid, t_min, T_MAX};
use nctorus_core::stochastic::{step_at, PhaseConvention};
use nctorus_core::{GaugeConfig, Mode, SymbolMode, TorusElement};
use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Spectrum,
    HeatTrace,
    VolumeInvariance,
    Dixmier,
    Flow,
    Moments,
    Euclidean,
    CurvatureForm,
    FullReport,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Spectrum => "spectrum",
            Kind::HeatTrace => "heat-trace",
            Kind::VolumeInvariance => "volume-invariance",
            Kind::Dixmier => "dixmier",
            Kind::Flow => "flow",
            Kind::Moments => "moments",
            Kind::Euclidean => "euclidean",
            Kind::CurvatureForm => "curvature-form",
            Kind::FullReport => "full-report",
        }
    }

    fn fits_heat_trace(self) -> bool {
        matches!(self, Kind::HeatTrace | Kind::VolumeInvariance | Kind::FullReport)
    }

    fn needs_hermitian(self) -> bool {
        matches!(self, Kind::Spectrum | Kind::HeatTrace | Kind::VolumeInvariance | Kind::Dixmier | Kind::FullReport)
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McConfig {
    #[serde(default = "McConfig::default_paths")]
    pub n_paths: usize,
    #[serde(default = "McConfig::default_dt")]
    pub dt: f64,
    #[serde(default = "McConfig::default_steps")]
    pub steps: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub phase_convention: PhaseConvention,
    #[serde(default = "McConfig::default_modes")]
    pub modes: Vec<Mode>,
    #[serde(default = "McConfig::default_times")]
    pub times: Vec<f64>,
}

impl McConfig {
    fn default_paths() -> usize {
        100_000
    }
    fn default_dt() -> f64 {
        1e-3
    }
    fn default_steps() -> usize {
        1000
    }
    fn default_modes() -> Vec<Mode> {
        vec![(1, 0), (1, 1), (2, 1)]
    }
    fn default_times() -> Vec<f64> {
        vec![0.1, 0.5, 1.0]
    }
}

impl Default for McConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all fields have defaults")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MomentsConfig {
    #[serde(default = "MomentsConfig::default_lambda")]
    pub lambda: f64,
    #[serde(default = "MomentsConfig::default_orders")]
    pub orders: Vec<usize>,
    #[serde(default = "MomentsConfig::default_times")]
    pub times: Vec<f64>,
}

impl MomentsConfig {
    fn default_lambda() -> f64 {
        -1.0
    }
    fn default_orders() -> Vec<usize> {
        vec![1, 2]
    }
    fn default_times() -> Vec<f64> {
        vec![0.25, 0.5, 1.0]
    }
}

impl Default for MomentsConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all fields have defaults")
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestFunction {
    #[default]
    Gaussian,
    Bump,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EuclideanConfig {
    /// `(G_1, G_2)` pairs.
    #[serde(default = "EuclideanConfig::default_pairs")]
    pub gauge_pairs: Vec<[f64; 2]>,
    #[serde(default = "EuclideanConfig::default_times")]
    pub times: Vec<f64>,
    #[serde(default)]
    pub test_function: TestFunction,
}

impl EuclideanConfig {
    fn default_pairs() -> Vec<[f64; 2]> {
        vec![[0.0, 0.0], [0.1, 0.2]]
    }
    fn default_times() -> Vec<f64> {
        vec![0.25, 0.5, 1.0]
    }
}

impl Default for EuclideanConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all fields have defaults")
    }
}

/// Coefficient list `[n1, n2, re, im]`; `theta` defaults to the gauge angle.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawElement {
    #[serde(default)]
    theta: Option<f64>,
    coeffs: Vec<(i64, i64, f64, f64)>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGauge {
    theta: f64,
    #[serde(default)]
    psi: [[i64; 2]; 2],
    #[serde(default)]
    beta: [f64; 2],
    #[serde(default = "default_metric")]
    metric: [[f64; 2]; 2],
    #[serde(default)]
    symbol_mode: SymbolMode,
}

fn default_metric() -> [[f64; 2]; 2] {
    [[-0.5, 0.0], [0.0, -0.5]]
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDixmier {
    #[serde(default)]
    elements: Option<Vec<RawElement>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub kind: Kind,
    pub gauge: GaugeConfig,
    /// `(r1, r2)`; kinds that need a perturbation fall back to
    /// [`standard_perturbation`].
    pub perturbation: Option<[TorusElement; 2]>,
    #[serde(rename = "window_N")]
    pub window_n: usize,
    pub t_grid: Vec<f64>,
    pub mc: McConfig,
    pub moments: MomentsConfig,
    pub euclidean: EuclideanConfig,
    pub dixmier_elements: Vec<TorusElement>,
    #[serde(skip)]
    pub output_dir: Option<PathBuf>,
    #[serde(skip)]
    pub record_wall_time: bool,
}

/// `r1 = 0.3 (X + X^*)`, `r2 = 0`.
pub fn standard_perturbation(theta: f64) -> [TorusElement; 2] {
    let x = TorusElement::x(theta);
    [x.add(&x.adjoint()).expect("same theta").scale(Complex64::new(0.3, 0.0)), TorusElement::zero(theta)]
}

/// `1` and `(X + X^*) / 2`.
pub fn default_dixmier_elements(theta: f64) -> Vec<TorusElement> {
    let x = TorusElement::x(theta);
    vec![TorusElement::one(theta), x.add(&x.adjoint()).expect("same theta").scale(Complex64::new(0.5, 0.0))]
}

/// Heat-fit grid used when `t_grid` is absent: 17 points ending at `T_MAX`.
pub fn default_t_grid(window_n: usize) -> Vec<f64> {
    linear_grid(t_min(window_n).clamp(0.02, 0.05), T_MAX, 17)
}

impl ExperimentConfig {
    /// Perturbation in effect for this run.
    pub fn perturbation_or_standard(&self) -> [TorusElement; 2] {
        self.perturbation.clone().unwrap_or_else(|| standard_perturbation(self.gauge.theta))
    }

    /// SHA-256 of the normalized config, excluding output location and timing.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }

    /// First twelve hex digits of [`ExperimentConfig::hash`].
    pub fn short_hash(&self) -> String {
        self.hash()[..12].to_string()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub field: String,
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        match self.line {
            Some(l) => write!(f, "{sev}: line {l}: {}: {}", self.field, self.message),
            None => write!(f, "{sev}: {}: {}", self.field, self.message),
        }
    }
}

/// Outcome of parsing: the config is present iff no diagnostic is an error.
#[derive(Debug)]
pub struct Parsed {
    pub config: Option<ExperimentConfig>,
    pub diagnostics: Vec<Diagnostic>,
}

impl Parsed {
    pub fn errors(&self) -> impl Iterator<Item = &Diagnostic> {
        self.diagnostics.iter().filter(|d| d.severity == Severity::Error)
    }

    pub fn has_errors(&self) -> bool {
        self.errors().next().is_some()
    }
}

const KNOWN_FIELDS: [&str; 12] = [
    "kind",
    "gauge",
    "perturbation",
    "window_N",
    "t_grid",
    "mc",
    "moments",
    "euclidean",
    "dixmier",
    "output_dir",
    "record_wall_time",
    "description",
];

/// 1-based line of the key at the end of a dotted path, searched in order.
fn line_of(src: &str, path: &str) -> Option<usize> {
    let mut from = 0;
    for seg in path.split('.') {
        let pat = format!("\"{seg}\"");
        let mut found = None;
        let mut start = from;
        while let Some(off) = src[start..].find(&pat) {
            let pos = start + off;
            let rest = src[pos + pat.len()..].trim_start();
            if rest.starts_with(':') {
                found = Some(pos);
                break;
            }
            start = pos + pat.len();
        }
        from = found?;
    }
    Some(src[..from].matches('\n').count() + 1)
}

struct Collector<'a> {
    src: &'a str,
    out: Vec<Diagnostic>,
}

impl Collector<'_> {
    fn push(&mut self, severity: Severity, field: &str, message: impl Into<String>) {
        self.out.push(Diagnostic {
            severity,
            field: field.to_string(),
            line: line_of(self.src, field),
            message: message.into(),
        });
    }

    fn error(&mut self, field: &str, message: impl Into<String>) {
        self.push(Severity::Error, field, message);
    }

    fn warn(&mut self, field: &str, message: impl Into<String>) {
        self.push(Severity::Warning, field, message);
    }

    fn take<T: DeserializeOwned>(&mut self, obj: &Map<String, Value>, key: &str) -> Option<T> {
        let v = obj.get(key)?;
        match serde_json::from_value(v.clone()) {
            Ok(t) => Some(t),
            Err(e) => {
                self.error(key, e.to_string());
                None
            }
        }
    }

    fn element(&mut self, field: &str, raw: RawElement, theta: f64) -> Option<TorusElement> {
        let mut ok = true;
        if let Some(t) = raw.theta {
            if t != theta {
                self.error(field, format!("theta {t} differs from gauge.theta {theta}"));
                ok = false;
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        for &(a, b, re, im) in &raw.coeffs {
            if !seen.insert((a, b)) {
                self.error(field, format!("duplicate mode ({a}, {b})"));
                ok = false;
            }
            if !re.is_finite() || !im.is_finite() {
                self.error(field, format!("non-finite coefficient at ({a}, {b})"));
                ok = false;
            }
        }
        ok.then(|| {
            TorusElement::from_terms(theta, raw.coeffs.into_iter().map(|(a, b, re, im)| ((a, b), Complex64::new(re, im))))
        })
    }

    fn positive_increasing(&mut self, field: &str, ts: &[f64]) -> bool {
        if ts.is_empty() {
            self.error(field, "must not be empty");
            return false;
        }
        if ts.iter().any(|&t| !(t.is_finite() && t > 0.0)) {
            self.error(field, "entries must be finite and positive");
            return false;
        }
        if ts.windows(2).any(|p| p[1] <= p[0]) {
            self.error(field, "must be strictly increasing");
            return false;
        }
        true
    }
}

/// Schema and invariant check of a JSON config; never executes anything.
pub fn parse_config(src: &str) -> Parsed {
    let mut c = Collector { src, out: Vec::new() };
    let value: Value = match serde_json::from_str(src) {
        Ok(v) => v,
        Err(e) => {
            c.out.push(Diagnostic {
                severity: Severity::Error,
                field: "<document>".into(),
                line: Some(e.line()),
                message: format!("invalid JSON: {e}"),
            });
            return Parsed { config: None, diagnostics: c.out };
        }
    };
    let Value::Object(obj) = value else {
        c.error("<document>", "top level must be a JSON object");
        return Parsed { config: None, diagnostics: c.out };
    };
    for key in obj.keys() {
        if !KNOWN_FIELDS.contains(&key.as_str()) {
            c.error(key, format!("unknown field, expected one of {}", KNOWN_FIELDS.join(", ")));
        }
    }
    for key in ["kind", "gauge", "window_N"] {
        if !obj.contains_key(key) {
            c.out.push(Diagnostic {
                severity: Severity::Error,
                field: key.into(),
                line: None,
                message: "missing required field".into(),
            });
        }
    }

    let kind: Option<Kind> = c.take(&obj, "kind");
    let gauge = c.take::<RawGauge>(&obj, "gauge").map(|g| GaugeConfig {
        theta: g.theta,
        psi: g.psi,
        beta: g.beta,
        metric: g.metric,
        symbol_mode: g.symbol_mode,
    });
    if let Some(g) = &gauge {
        for problem in g.diagnostics() {
            let (field, msg) = problem.split_once(": ").unwrap_or(("gauge", &problem));
            c.error(field, msg);
        }
    }
    let theta = gauge.as_ref().map(|g| g.theta).unwrap_or(0.0);

    let window_n: Option<i64> = c.take(&obj, "window_N");
    if let Some(n) = window_n {
        if !(4..=64).contains(&n) {
            c.error("window_N", format!("must lie in [4, 64], got {n}"));
        }
    }

    let perturbation = match c.take::<Option<[RawElement; 2]>>(&obj, "perturbation").flatten() {
        Some([r1, r2]) => {
            let a = c.element("perturbation", r1, theta);
            let b = c.element("perturbation", r2, theta);
            match (a, b) {
                (Some(a), Some(b)) => {
                    if gauge.as_ref().is_some_and(|g| g.symbol_mode == SymbolMode::Hermitian) {
                        for (j, r) in [(1, &a), (2, &b)] {
                            if !r.is_self_adjoint(1e-12) {
                                c.error("perturbation", format!("r{j} must be self-adjoint in hermitian mode"));
                            }
                        }
                    }
                    Some([a, b])
                }
                _ => None,
            }
        }
        None => None,
    };

    let n_ok = window_n.filter(|n| (4..=64).contains(n)).map(|n| n as usize);
    let t_grid: Option<Vec<f64>> = match obj.get("t_grid") {
        Some(_) => c.take(&obj, "t_grid"),
        None => n_ok.map(default_t_grid),
    };
    if let (Some(ts), Some(n), Some(k)) = (&t_grid, n_ok, kind) {
        if c.positive_increasing("t_grid", ts) && k.fits_heat_trace() {
            let lo = t_min(n);
            let below = ts.iter().filter(|&&t| t < lo * (1.0 - 1e-12)).count();
            let above = ts.iter().filter(|&&t| t > T_MAX * (1.0 + 1e-12)).count();
            if below > 0 {
                c.warn(
                    "t_grid",
                    format!(
                        "{below} point(s) below t_min(N) = 46/N^2 = {lo:.6} for N = {n}, where truncation \
                         error exceeds 1e-10; they are excluded from the fit"
                    ),
                );
            }
            if above > 0 {
                c.warn("t_grid", format!("{above} point(s) above T_MAX = {T_MAX}; they are excluded from the fit"));
            }
            if ts.len() - below - above < 4 {
                c.error("t_grid", format!("needs at least 4 points inside [t_min(N), T_MAX] = [{lo:.6}, {T_MAX}]"));
            }
        }
    }

    let mc: Option<McConfig> = if obj.contains_key("mc") { c.take(&obj, "mc") } else { Some(McConfig::default()) };
    if let Some(mc) = &mc {
        if mc.n_paths < 2 {
            c.error("mc.n_paths", "must be at least 2");
        }
        if !(mc.dt.is_finite() && mc.dt > 0.0) {
            c.error("mc.dt", "must be finite and positive");
        } else if mc.steps == 0 {
            c.error("mc.steps", "must be positive");
        } else if c.positive_increasing("mc.times", &mc.times) {
            for &t in &mc.times {
                if let Err(e) = step_at(mc.dt, mc.steps, t) {
                    c.error("mc.times", e.to_string());
                }
            }
        }
        if mc.modes.is_empty() {
            c.error("mc.modes", "must not be empty");
        }
    }

    let moments: Option<MomentsConfig> =
        if obj.contains_key("moments") { c.take(&obj, "moments") } else { Some(MomentsConfig::default()) };
    if let Some(m) = &moments {
        if !(m.lambda.is_finite() && m.lambda < 0.0) {
            c.error("moments.lambda", format!("must be finite and negative, got {}", m.lambda));
        }
        if m.orders.is_empty() || m.orders.iter().any(|&o| !(1..=8).contains(&o)) {
            c.error("moments.orders", "entries must lie in [1, 8]");
        }
        c.positive_increasing("moments.times", &m.times);
    }

    let euclidean: Option<EuclideanConfig> =
        if obj.contains_key("euclidean") { c.take(&obj, "euclidean") } else { Some(EuclideanConfig::default()) };
    if let Some(e) = &euclidean {
        if e.gauge_pairs.is_empty() || e.gauge_pairs.iter().flatten().any(|g| !g.is_finite()) {
            c.error("euclidean.gauge_pairs", "must be a non-empty list of finite pairs");
        }
        c.positive_increasing("euclidean.times", &e.times);
    }

    let dixmier_elements = match c.take::<RawDixmier>(&obj, "dixmier") {
        Some(RawDixmier { elements: Some(raw) }) => {
            let els: Vec<Option<TorusElement>> =
                raw.into_iter().map(|r| c.element("dixmier.elements", r, theta)).collect();
            if els.is_empty() {
                c.error("dixmier.elements", "must not be empty");
            }
            els.into_iter().collect::<Option<Vec<_>>>()
        }
        Some(RawDixmier { elements: None }) => Some(default_dixmier_elements(theta)),
        None if obj.contains_key("dixmier") => None,
        None => Some(default_dixmier_elements(theta)),
    };

    let output_dir: Option<PathBuf> = c.take(&obj, "output_dir");
    let record_wall_time: bool = c.take(&obj, "record_wall_time").unwrap_or(false);
    let _: Option<String> = c.take(&obj, "description");

    if let (Some(k), Some(g)) = (kind, &gauge) {
        if k.needs_hermitian() && g.symbol_mode != SymbolMode::Hermitian {
            c.error("gauge.symbol_mode", format!("kind {k} needs hermitian symbol mode"));
        }
    }

    let config = match (kind, gauge, n_ok, t_grid, mc, moments, euclidean, dixmier_elements) {
        (Some(kind), Some(gauge), Some(window_n), Some(t_grid), Some(mc), Some(moments), Some(euclidean), Some(dx))
            if !c.out.iter().any(|d| d.severity == Severity::Error) =>
        {
            Some(ExperimentConfig {
                kind,
                gauge,
                perturbation,
                window_n,
                t_grid,
                mc,
                moments,
                euclidean,
                dixmier_elements: dx,
                output_dir,
                record_wall_time,
            })
        }
        _ => None,
    };
    c.out.sort_by(|a, b| b.severity.cmp(&a.severity).then(a.line.cmp(&b.line)));
    Parsed { config, diagnostics: c.out }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = r#"{
  "kind": "spectrum",
  "gauge": {"theta": 0.3},
  "window_N": 8
}"#;

    #[test]
    fn well_formed_config_has_no_diagnostics() {
        let p = parse_config(GOOD);
        assert!(p.diagnostics.is_empty(), "{:?}", p.diagnostics);
        let cfg = p.config.unwrap();
        assert_eq!(cfg.window_n, 8);
        assert_eq!(cfg.mc, McConfig::default());
        assert_eq!(cfg.dixmier_elements.len(), 2);
    }

    #[test]
    fn syntax_error_reports_line() {
        let p = parse_config("{\n  \"kind\": \"spectrum\",\n  oops\n}");
        assert!(p.config.is_none());
        assert_eq!(p.diagnostics.len(), 1);
        assert_eq!(p.diagnostics[0].line, Some(3));
    }

    #[test]
    fn psi_violation_names_the_field() {
        let src = "{\n\"kind\": \"spectrum\",\n\"gauge\": {\"theta\": 0.3,\n \"psi\": [[0, 1], [1, 0]]},\n\"window_N\": 8\n}";
        let p = parse_config(src);
        let errs: Vec<_> = p.errors().collect();
        assert_eq!(errs.len(), 1, "{errs:?}");
        assert_eq!(errs[0].field, "gauge.psi");
        assert_eq!(errs[0].line, Some(4));
    }

    #[test]
    fn every_violation_is_listed() {
        let src = r#"{"kind": "heat-trace", "gauge": {"theta": 1.2}, "window_N": 100, "bogus": 1,
                      "mc": {"n_paths": 1}}"#;
        let p = parse_config(src);
        let fields: Vec<_> = p.errors().map(|d| d.field.as_str()).collect();
        for f in ["gauge.theta", "window_N", "bogus", "mc.n_paths"] {
            assert!(fields.contains(&f), "{fields:?}");
        }
    }

    #[test]
    fn grid_below_t_min_warns() {
        let src = r#"{"kind": "heat-trace", "gauge": {"theta": 0.3}, "window_N": 48,
                      "t_grid": [0.005, 0.02, 0.04, 0.06, 0.08, 0.1]}"#;
        let p = parse_config(src);
        assert!(!p.has_errors(), "{:?}", p.diagnostics);
        assert_eq!(p.diagnostics.len(), 1);
        assert_eq!(p.diagnostics[0].severity, Severity::Warning);
        assert!(p.diagnostics[0].message.contains("46/N^2"));
    }

    #[test]
    fn non_increasing_grid_is_an_error() {
        let src = r#"{"kind": "heat-trace", "gauge": {"theta": 0.3}, "window_N": 48, "t_grid": [0.05, 0.04]}"#;
        assert!(parse_config(src).has_errors());
    }

    #[test]
    fn non_self_adjoint_perturbation_is_rejected() {
        let src = r#"{"kind": "spectrum", "gauge": {"theta": 0.3}, "window_N": 8,
                      "perturbation": [{"coeffs": [[1, 0, 1.0, 0.0]]}, {"coeffs": []}]}"#;
        let p = parse_config(src);
        assert!(p.errors().any(|d| d.field == "perturbation" && d.message.contains("self-adjoint")));
    }

    #[test]
    fn literal_mode_is_rejected_for_spectral_kinds() {
        let src = r#"{"kind": "spectrum", "gauge": {"theta": 0.3, "symbol_mode": "literal"}, "window_N": 8}"#;
        assert!(parse_config(src).has_errors());
        let src = r#"{"kind": "curvature-form", "gauge": {"theta": 0.3, "symbol_mode": "literal"}, "window_N": 8}"#;
        assert!(!parse_config(src).has_errors());
    }

    #[test]
    fn hash_ignores_output_location() {
        let a = parse_config(GOOD).config.unwrap();
        let mut b = a.clone();
        b.output_dir = Some("elsewhere".into());
        b.record_wall_time = true;
        assert_eq!(a.hash(), b.hash());
        b.window_n = 9;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.short_hash().len(), 12);
    }

    #[test]
    fn line_lookup_follows_nesting() {
        let src = "{\n\"theta\": 1,\n\"gauge\": {\n  \"theta\": 2}}";
        assert_eq!(line_of(src, "theta"), Some(2));
        assert_eq!(line_of(src, "gauge.theta"), Some(4));
        assert_eq!(line_of(src, "missing"), None);
    }
}
