//! Scenario configuration (JSON).

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use qubit_feedback::{
    AngleBranch, BlochState3, CMat2, ControlSchedule, ControlValue, FeedbackSpec, PlanarModel, PlanarState,
    RawFeedbackParams, SystemParams,
};

use crate::error::{config_err, CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ParamsConfig {
    Rates { gamma_down: f64, gamma_up: f64 },
    Bath { n_bar: f64, kappa: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum FeedbackConfig {
    Identity,
    Beta(f64),
    Raw { f1: f64, f2: f64, g: f64 },
    /// Row-major `[ee, eg, ge, gg]`, each `[re, im]`.
    Unitary([[f64; 2]; 4]),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ControlConfig {
    /// `[u1, u2]`.
    Constant([f64; 2]),
    Schedule { initial: [f64; 2], switches: Vec<(f64, [f64; 2])> },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub from: f64,
    pub to: f64,
    pub n: usize,
}

impl Axis {
    pub fn points(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.from];
        }
        (0..self.n)
            .map(|k| {
                if k + 1 == self.n {
                    self.to
                } else {
                    self.from + (self.to - self.from) * k as f64 / (self.n - 1) as f64
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StationaryConfig {
    pub u1: Axis,
    pub u2: Axis,
}

impl Default for StationaryConfig {
    fn default() -> Self {
        Self { u1: Axis { from: -2.0, to: 2.0, n: 41 }, u2: Axis { from: 0.0, to: 0.0, n: 1 } }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LocusConfig {
    pub x2_range: (f64, f64),
    pub x3_range: (f64, f64),
    pub n: usize,
}

impl Default for LocusConfig {
    fn default() -> Self {
        Self { x2_range: (-1.0, 1.0), x3_range: (-1.0, 1.0), n: 101 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchConfig {
    #[default]
    Principal,
    Unwrapped,
}

impl From<BranchConfig> for AngleBranch {
    fn from(b: BranchConfig) -> Self {
        match b {
            BranchConfig::Principal => AngleBranch::Principal,
            BranchConfig::Unwrapped => AngleBranch::Unwrapped,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum AdjointInit {
    /// Unit vector perpendicular to `v(0)` with `sign Φ(0) = u`.
    Perpendicular,
    /// The same `(p2, p3)` for both controls.
    Given([f64; 2]),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SwitchingConfig {
    pub branch: BranchConfig,
    pub adjoint: AdjointInit,
}

impl Default for SwitchingConfig {
    fn default() -> Self {
        Self { branch: BranchConfig::Principal, adjoint: AdjointInit::Perpendicular }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CheckConfig {
    pub samples: usize,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self { samples: 1000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub params: ParamsConfig,
    pub feedback: FeedbackConfig,
    pub control: ControlConfig,
    /// `[x2, x3]` or `[x1, x2, x3]`.
    pub initial_state: Vec<f64>,
    pub t_end: f64,
    pub dt: f64,
    pub stationary: StationaryConfig,
    pub locus: LocusConfig,
    pub switching: SwitchingConfig,
    pub check: CheckConfig,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            params: ParamsConfig::Rates { gamma_down: 0.4, gamma_up: 0.3 },
            feedback: FeedbackConfig::Identity,
            control: ControlConfig::Constant([1.0, 0.0]),
            initial_state: vec![0.0, 1.0],
            t_end: 10.0,
            dt: 1e-3,
            stationary: StationaryConfig::default(),
            locus: LocusConfig::default(),
            switching: SwitchingConfig::default(),
            check: CheckConfig::default(),
        }
    }
}

/// Validated, ready-to-use scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub params: SystemParams<f64>,
    pub feedback: FeedbackSpecOrRaw,
}

/// Raw `(f1, f2, g)` configs carry no unitary.
#[derive(Debug, Clone)]
pub enum FeedbackSpecOrRaw {
    Unitary(FeedbackSpec<f64>),
    Raw(RawFeedbackParams<f64>),
}

impl FeedbackSpecOrRaw {
    pub fn raw(&self) -> RawFeedbackParams<f64> {
        match self {
            FeedbackSpecOrRaw::Unitary(u) => u.raw(),
            FeedbackSpecOrRaw::Raw(r) => *r,
        }
    }

    pub fn unitary(&self) -> Option<&FeedbackSpec<f64>> {
        match self {
            FeedbackSpecOrRaw::Unitary(u) => Some(u),
            FeedbackSpecOrRaw::Raw(_) => None,
        }
    }
}

fn finite(name: &str, v: f64) -> CliResult<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Config(format!("{name} must be finite")))
    }
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(config_err)
    }

    pub fn validate(self) -> CliResult<Scenario> {
        let params = match self.params {
            ParamsConfig::Rates { gamma_down, gamma_up } => SystemParams::new(gamma_down, gamma_up),
            ParamsConfig::Bath { n_bar, kappa } => SystemParams::from_bath(n_bar, kappa),
        }
        .map_err(config_err)?;
        let feedback = match &self.feedback {
            FeedbackConfig::Identity => FeedbackSpecOrRaw::Unitary(FeedbackSpec::identity()),
            FeedbackConfig::Beta(b) => FeedbackSpecOrRaw::Unitary(FeedbackSpec::from_beta(finite("beta", *b)?)),
            FeedbackConfig::Raw { f1, f2, g } => {
                FeedbackSpecOrRaw::Raw(RawFeedbackParams::new(*f1, *f2, *g).map_err(config_err)?)
            }
            FeedbackConfig::Unitary(m) => {
                let z = |k: usize| Complex64::new(m[k][0], m[k][1]);
                FeedbackSpecOrRaw::Unitary(FeedbackSpec::new(CMat2::new(z(0), z(1), z(2), z(3))).map_err(config_err)?)
            }
        };
        finite("t_end", self.t_end)?;
        finite("dt", self.dt)?;
        if !(self.t_end > 0.0) || !(self.dt > 0.0) || self.dt > self.t_end {
            return Err(CliError::Config("need 0 < dt <= t_end".into()));
        }
        if !matches!(self.initial_state.len(), 2 | 3) || self.initial_state.iter().any(|v| !v.is_finite()) {
            return Err(CliError::Config("initial_state must hold 2 or 3 finite numbers".into()));
        }
        if self.initial_state.iter().map(|v| v * v).sum::<f64>() > 1.0 + 1e-9 {
            return Err(CliError::Config("initial_state lies outside the Bloch ball".into()));
        }
        self.schedule()?;
        for a in [self.stationary.u1, self.stationary.u2] {
            if a.n == 0 || !a.from.is_finite() || !a.to.is_finite() {
                return Err(CliError::Config("stationary axes need n >= 1 and finite ends".into()));
            }
        }
        qubit_feedback::GridSpec::new(self.locus.x2_range, self.locus.x3_range, self.locus.n, self.locus.n)
            .map_err(config_err)?;
        if self.locus.n < 16 {
            return Err(CliError::Config("locus grid needs n >= 16".into()));
        }
        if self.check.samples == 0 {
            return Err(CliError::Config("check.samples must be positive".into()));
        }
        if let AdjointInit::Given([a, b]) = self.switching.adjoint {
            qubit_feedback::AdjointState::new(finite("adjoint", a)?, finite("adjoint", b)?).map_err(config_err)?;
        }
        Ok(Scenario { config: self, params, feedback })
    }

    pub fn schedule(&self) -> CliResult<ControlSchedule<f64>> {
        let cv = |u: [f64; 2]| -> CliResult<ControlValue<f64>> {
            Ok(ControlValue::new(finite("control", u[0])?, finite("control", u[1])?))
        };
        match &self.control {
            ControlConfig::Constant(u) => Ok(ControlSchedule::constant(cv(*u)?)),
            ControlConfig::Schedule { initial, switches } => {
                let sw = switches
                    .iter()
                    .map(|(t, u)| Ok((finite("switch time", *t)?, cv(*u)?)))
                    .collect::<CliResult<Vec<_>>>()?;
                ControlSchedule::piecewise(cv(*initial)?, sw).map_err(config_err)
            }
        }
    }
}

impl Scenario {
    /// Planar model, if the feedback keeps `x1 = 0` invariant.
    pub fn planar_model(&self) -> Option<PlanarModel<f64>> {
        PlanarModel::new(self.params, &self.feedback.raw()).ok()
    }

    /// Whether a trajectory run can stay in the `x1 = 0` plane.
    pub fn is_planar_run(&self) -> CliResult<bool> {
        let schedule = self.config.schedule()?;
        let real_controls = schedule.segments(0.0, self.config.t_end).iter().all(|(_, _, u)| u.u2 == 0.0);
        let x1_zero = self.config.initial_state.len() == 2 || self.config.initial_state[0] == 0.0;
        Ok(real_controls && x1_zero && self.planar_model().is_some())
    }

    pub fn initial_planar(&self) -> PlanarState<f64> {
        let s = &self.config.initial_state;
        let n = s.len();
        PlanarState::new(s[n - 2], s[n - 1])
    }

    pub fn initial_bloch(&self) -> BlochState3<f64> {
        let s = &self.config.initial_state;
        match s.len() {
            3 => BlochState3::new(s[0], s[1], s[2]),
            _ => BlochState3::new(0.0, s[0], s[1]),
        }
    }
}
