//! Uniform gauge field data and the scalar symbols of the unperturbed
//! magnetic Laplacian on monomials.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{Direction, Mode};
use crate::error::{invalid, Error, Result};

/// Which reading of the gauge-shifted symbols to use.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SymbolMode {
    /// Formulas exactly as printed, with imaginary shift `2 pi i G_j`.
    Literal,
    /// Real shift `2 pi G_j`; yields self-adjoint, nonpositive operators.
    #[default]
    Hermitian,
}

fn default_metric() -> [[f64; 2]; 2] {
    [[-0.5, 0.0], [0.0, -0.5]]
}

/// Gauge configuration: deformation angle, field matrix, offsets and metric.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GaugeConfigRepr", into = "GaugeConfigRepr")]
pub struct GaugeConfig {
    pub theta: f64,
    pub psi: [[i64; 2]; 2],
    pub beta: [f64; 2],
    pub metric: [[f64; 2]; 2],
    pub symbol_mode: SymbolMode,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GaugeConfigRepr {
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

impl TryFrom<GaugeConfigRepr> for GaugeConfig {
    type Error = Error;

    fn try_from(r: GaugeConfigRepr) -> Result<Self> {
        let cfg = GaugeConfig {
            theta: r.theta,
            psi: r.psi,
            beta: r.beta,
            metric: r.metric,
            symbol_mode: r.symbol_mode,
        };
        let problems = cfg.diagnostics();
        if problems.is_empty() {
            Ok(cfg)
        } else {
            Err(invalid(problems.join("; ")))
        }
    }
}

impl From<GaugeConfig> for GaugeConfigRepr {
    fn from(c: GaugeConfig) -> Self {
        GaugeConfigRepr { theta: c.theta, psi: c.psi, beta: c.beta, metric: c.metric, symbol_mode: c.symbol_mode }
    }
}

impl GaugeConfig {
    /// Gauge off, default metric, hermitian mode.
    pub fn new(theta: f64) -> Self {
        GaugeConfig {
            theta,
            psi: [[0, 0], [0, 0]],
            beta: [0.0, 0.0],
            metric: default_metric(),
            symbol_mode: SymbolMode::Hermitian,
        }
    }

    pub fn with_beta(mut self, beta: [f64; 2]) -> Self {
        self.beta = beta;
        self
    }

    /// Sets `psi_12 = p`, `psi_21 = -p`.
    pub fn with_field(mut self, p: i64) -> Self {
        self.psi = [[0, p], [-p, 0]];
        self
    }

    pub fn with_metric(mut self, metric: [[f64; 2]; 2]) -> Self {
        self.metric = metric;
        self
    }

    pub fn with_mode(mut self, mode: SymbolMode) -> Self {
        self.symbol_mode = mode;
        self
    }

    /// Every violated invariant, named by field.
    pub fn diagnostics(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !(0.0..1.0).contains(&self.theta) {
            out.push(format!("gauge.theta: must lie in [0, 1), got {}", self.theta));
        }
        let p = self.psi;
        if p[0][0] != 0 || p[1][1] != 0 || p[0][1] != -p[1][0] {
            out.push(format!("gauge.psi: must be antisymmetric, got {p:?}"));
        }
        if self.beta.iter().any(|b| !b.is_finite()) {
            out.push("gauge.beta: entries must be finite".into());
        }
        let g = self.metric;
        if g.iter().flatten().any(|v| !v.is_finite()) {
            out.push("gauge.metric: entries must be finite".into());
        } else if self.symbol_mode == SymbolMode::Hermitian {
            if g[0][1] != g[1][0] {
                out.push("gauge.metric: must be symmetric in hermitian mode".into());
            }
            let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
            if !(g[0][0] < 0.0 && g[1][1] < 0.0 && det > 0.0) {
                out.push("gauge.metric: must be negative definite in hermitian mode".into());
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let problems = self.diagnostics();
        if problems.is_empty() {
            Ok(())
        } else {
            Err(invalid(problems.join("; ")))
        }
    }

    /// `g^{jk}`.
    pub fn g(&self, j: Direction, k: Direction) -> f64 {
        self.metric[j.index()][k.index()]
    }

    /// `psi_{jk}`.
    pub fn psi(&self, j: Direction, k: Direction) -> i64 {
        self.psi[j.index()][k.index()]
    }

    pub fn is_gauge_off(&self) -> bool {
        self.beta == [0.0, 0.0] && self.psi == [[0, 0], [0, 0]]
    }
}

/// `G_k`, evaluated at the reference point, i.e. the constant offset `beta_k`.
pub fn gauge_component(cfg: &GaugeConfig, k: Direction) -> f64 {
    cfg.beta[k.index()]
}

/// Constant subtracted from `d_j` in the minimal coupling: `2 pi G_j`
/// (hermitian) or `2 pi i G_j` (literal).
pub fn gauge_shift(cfg: &GaugeConfig, j: Direction) -> Complex64 {
    let g = 2.0 * PI * gauge_component(cfg, j);
    match cfg.symbol_mode {
        SymbolMode::Hermitian => Complex64::new(g, 0.0),
        SymbolMode::Literal => Complex64::new(0.0, g),
    }
}

/// `eta(n) = sum_j (pi i G_j n_j + 2 pi^2 G_j^2)
///         + sum_{j != k} g^{jk} (n_j - 2 pi i G_j)(n_k - 2 pi i G_k)`.
pub fn eta_symbol(cfg: &GaugeConfig, n: Mode) -> Complex64 {
    let i = Complex64::i();
    let mut eta = Complex64::new(0.0, 0.0);
    for j in Direction::BOTH {
        let gj = gauge_component(cfg, j);
        eta += i * PI * gj * j.component(n) as f64 + 2.0 * PI * PI * gj * gj;
    }
    for j in Direction::BOTH {
        let k = j.other();
        let aj = j.component(n) as f64 - 2.0 * PI * i * gauge_component(cfg, j);
        let ak = k.component(n) as f64 - 2.0 * PI * i * gauge_component(cfg, k);
        eta += cfg.g(j, k) * aj * ak;
    }
    eta
}

/// `sum_{j != k} g^{jk} pi i psi_{jk}`; vanishes for a symmetric metric.
pub fn gamma_constant(cfg: &GaugeConfig) -> Complex64 {
    Direction::BOTH
        .iter()
        .map(|&j| {
            let k = j.other();
            Complex64::new(0.0, PI * cfg.g(j, k) * cfg.psi(j, k) as f64)
        })
        .sum()
}

/// Symbol of `L_0` on monomial `n`.
///
/// Literal: `(n1^2 + n2^2)/2` as in the eigenvalue formula.
/// Hermitian: `sum_j g^{jj} n_j^2`.
pub fn l0_symbol(cfg: &GaugeConfig, n: Mode) -> Complex64 {
    match cfg.symbol_mode {
        SymbolMode::Literal => Complex64::new(0.5 * (n.0 * n.0 + n.1 * n.1) as f64, 0.0),
        SymbolMode::Hermitian => Complex64::new(
            Direction::BOTH.iter().map(|&j| cfg.g(j, j) * (j.component(n) as f64).powi(2)).sum(),
            0.0,
        ),
    }
}

/// Symbol of `L^m_0` on monomial `n`.
pub fn l0m_symbol(cfg: &GaugeConfig, n: Mode) -> Complex64 {
    match cfg.symbol_mode {
        SymbolMode::Literal => l0_symbol(cfg, n) + eta_symbol(cfg, n) - gamma_constant(cfg),
        SymbolMode::Hermitian => {
            let mut s = 0.0;
            for j in Direction::BOTH {
                for k in Direction::BOTH {
                    let aj = j.component(n) as f64 - 2.0 * PI * gauge_component(cfg, j);
                    let ak = k.component(n) as f64 - 2.0 * PI * gauge_component(cfg, k);
                    s += cfg.g(j, k) * aj * ak;
                }
            }
            Complex64::new(s, 0.0)
        }
    }
}

/// Symbol of `T^0 = L^m_0 - L_0` on monomial `n`.
pub fn t0_symbol(cfg: &GaugeConfig, n: Mode) -> Complex64 {
    match cfg.symbol_mode {
        SymbolMode::Literal => eta_symbol(cfg, n) - gamma_constant(cfg),
        SymbolMode::Hermitian => {
            let mut s = 0.0;
            for j in Direction::BOTH {
                let gj = 2.0 * PI * gauge_component(cfg, j);
                let nj = j.component(n) as f64;
                s += cfg.g(j, j) * (gj * gj - 2.0 * nj * gj);
                let k = j.other();
                let ak = k.component(n) as f64 - 2.0 * PI * gauge_component(cfg, k);
                s += cfg.g(j, k) * (nj - gj) * ak;
            }
            Complex64::new(s, 0.0)
        }
    }
}

/// Symbol value of `L^m_0` at one mode.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MagneticSymbol {
    pub mode: Mode,
    pub value: Complex64,
    pub symbol_mode: SymbolMode,
}

pub fn magnetic_symbol(cfg: &GaugeConfig, n: Mode) -> MagneticSymbol {
    MagneticSymbol { mode: n, value: l0m_symbol(cfg, n), symbol_mode: cfg.symbol_mode }
}
