//! Scenario documents: the raw serde schema and its validated form.

use std::fmt;
use std::path::PathBuf;

use potent_core::linalg::{Hermitian, Operator, StateVector, C64};
use potent_core::meters::QubitMeter;
use potent_core::pps::PrePostSelection;
use potent_core::timemachine::{SuperpositionSpec, TimeTranslationSpec};
use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::presets;

/// Amplitude lists whose norm is further than this from one are reported.
pub const NORMALIZATION_WARN: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    WeakValue,
    ModularValue,
    PotentValues,
    PotentOperator,
    Completeness,
    PointerShift,
    Conditional,
    TimeMachine,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 8] = [
        Self::WeakValue,
        Self::ModularValue,
        Self::PotentValues,
        Self::PotentOperator,
        Self::Completeness,
        Self::PointerShift,
        Self::Conditional,
        Self::TimeMachine,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::WeakValue => "weak-value",
            Self::ModularValue => "modular-value",
            Self::PotentValues => "potent-values",
            Self::PotentOperator => "potent-operator",
            Self::Completeness => "completeness",
            Self::PointerShift => "pointer-shift",
            Self::Conditional => "conditional",
            Self::TimeMachine => "time-machine",
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// A complex number written either as a real scalar or as `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Amp {
    Real(f64),
    Complex([f64; 2]),
}

impl Amp {
    pub fn value(self) -> C64 {
        match self {
            Amp::Real(x) => C64::new(x, 0.0),
            Amp::Complex([re, im]) => C64::new(re, im),
        }
    }
}

/// A state given by preset name or amplitude list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RawState {
    Preset(String),
    Amplitudes(Vec<Amp>),
}

/// An observable given by preset name or row-major matrix literal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RawObservable {
    Preset(String),
    Matrix(Vec<Vec<Amp>>),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawRange {
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

/// Coupling strengths: a list, or `steps` evenly spaced points from `start` to `stop`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RawCouplings {
    List(Vec<f64>),
    Range(RawRange),
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSelection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi: Option<RawState>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<RawState>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum RawMeter {
    /// Qubit meter `α|0⟩ + β|1⟩` coupled through `exp(−i·g·A⊗|1⟩⟨1|)`.
    Qubit {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        alpha: Option<Amp>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        beta: Option<Amp>,
    },
    /// Gaussian pointer on a periodic grid coupled through `exp(−i·g·A⊗P)`.
    Gaussian {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        grid_size: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        x_min: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        x_max: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sigma: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        x0: Option<f64>,
    },
    /// Explicit apparatus state, coupled through `exp(−i·g·A⊗B)` when `observable` is given.
    State {
        amplitudes: RawState,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        observable: Option<RawObservable>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConditional {
    pub system_dim: usize,
    pub apparatus_dim: usize,
    pub instances: usize,
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawTimeMachine {
    pub coefficients: Vec<Amp>,
    pub durations: Vec<f64>,
    pub hamiltonian: RawObservable,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSweep {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seeds: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigmas: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawOutput {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

/// The document as written, before validation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct RawConfig {
    pub kind: ScenarioKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<RawCouplings>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observable: Option<RawObservable>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub selection: Option<RawSelection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meter: Option<RawMeter>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conditional: Option<RawConditional>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_machine: Option<RawTimeMachine>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<RawSweep>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<RawOutput>,
}

impl RawConfig {
    pub fn to_toml(&self) -> Result<String, ConfigError> {
        toml::to_string(self).map_err(|e| ConfigError::Syntax(e.to_string()))
    }
}

/// Gaussian pointer parameters; unset fields take the standard pointer's values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianSpec {
    pub grid_size: usize,
    pub x_min: f64,
    pub x_max: f64,
    pub sigma: f64,
    pub x0: f64,
}

impl Default for GaussianSpec {
    fn default() -> Self {
        Self {
            grid_size: 512,
            x_min: -12.0,
            x_max: 12.0,
            sigma: 1.0,
            x0: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MeterSpec {
    Qubit(QubitMeter),
    Gaussian(GaussianSpec),
    State {
        state: StateVector,
        observable: Option<Operator>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionalSpec {
    pub system_dim: usize,
    pub apparatus_dim: usize,
    pub instances: usize,
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub seeds: Vec<u64>,
    pub sigmas: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OutputSpec {
    pub format: Option<Format>,
    pub path: Option<PathBuf>,
}

/// A validated scenario: all dimensions consistent, states normalized.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub kind: ScenarioKind,
    pub name: String,
    pub seed: u64,
    pub couplings: Vec<f64>,
    pub observable: Option<Operator>,
    pub selection: Option<PrePostSelection>,
    pub meter: Option<MeterSpec>,
    pub conditional: Option<ConditionalSpec>,
    pub time_machine: Option<TimeTranslationSpec>,
    pub sweep: Option<SweepSpec>,
    pub output: OutputSpec,
    /// Non-fatal notes raised during validation, such as renormalized states.
    pub warnings: Vec<String>,
}

/// One point of a run: a seed, an optional pointer width and a coupling strength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanPoint {
    pub seed: u64,
    pub sigma: Option<f64>,
    pub g: Option<f64>,
}

impl ScenarioConfig {
    /// Points in execution order: sweep seeds, then widths, then couplings.
    pub fn plan(&self) -> Vec<PlanPoint> {
        let (seeds, sigmas) = match &self.sweep {
            Some(s) => (s.seeds.clone(), s.sigmas.iter().copied().map(Some).collect()),
            None => (vec![self.seed], vec![None]),
        };
        let gs: Vec<Option<f64>> = if self.couplings.is_empty() {
            vec![None]
        } else {
            self.couplings.iter().copied().map(Some).collect()
        };
        let mut out = Vec::new();
        for &seed in &seeds {
            for &sigma in &sigmas {
                for &g in &gs {
                    out.push(PlanPoint { seed, sigma, g });
                }
            }
        }
        out
    }

    /// Copy of this config fixed to one sweep point, with the sweep removed.
    pub fn at_sweep_point(&self, seed: u64, sigma: Option<f64>) -> Self {
        let mut cfg = self.clone();
        cfg.seed = seed;
        cfg.sweep = None;
        if let (Some(s), Some(MeterSpec::Gaussian(g))) = (sigma, cfg.meter.as_mut()) {
            g.sigma = s;
        }
        cfg
    }
}

/// Parses and validates a TOML scenario document.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))?;
    validate(&raw)
}

struct Validator {
    kind: ScenarioKind,
    warnings: Vec<String>,
}

impl Validator {
    fn state(&mut self, key: &str, raw: &RawState) -> Result<StateVector, ConfigError> {
        let amps: Vec<C64> = match raw {
            RawState::Preset(name) => {
                return presets::state(name).ok_or_else(|| ConfigError::invalid(key, format!("unknown state preset `{name}`")))
            }
            RawState::Amplitudes(a) => a.iter().map(|x| x.value()).collect(),
        };
        self.normalize(key, amps)
    }

    fn normalize(&mut self, key: &str, amps: Vec<C64>) -> Result<StateVector, ConfigError> {
        if let Some(bad) = amps.iter().find(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(ConfigError::invalid(key, format!("amplitude {bad} is not finite")));
        }
        let v = StateVector::new(amps).map_err(|e| ConfigError::invalid(key, e))?;
        let norm = v.norm();
        if (norm - 1.0).abs() > NORMALIZATION_WARN {
            self.warnings.push(format!("{key}: norm {norm} rescaled to 1"));
        }
        v.unit().map_err(|e| ConfigError::invalid(key, e))
    }

    fn observable(&mut self, key: &str, raw: &RawObservable) -> Result<Operator, ConfigError> {
        let op = match raw {
            RawObservable::Preset(name) => presets::observable(name)
                .ok_or_else(|| ConfigError::invalid(key, format!("unknown observable preset `{name}`")))?,
            RawObservable::Matrix(rows) => {
                let n = rows.len();
                if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
                    return Err(ConfigError::invalid(
                        key,
                        format!("row {i} has {} entries, matrix has {n} rows", r.len()),
                    ));
                }
                let rows: Vec<Vec<C64>> = rows.iter().map(|r| r.iter().map(|x| x.value()).collect()).collect();
                Operator::from_rows(&rows).map_err(|e| ConfigError::invalid(key, e))?
            }
        };
        Hermitian::new(op.clone()).map_err(|e| ConfigError::invalid(key, e))?;
        Ok(op)
    }

    fn require<'a, T>(&self, key: &'static str, v: &'a Option<T>) -> Result<&'a T, ConfigError> {
        v.as_ref().ok_or(ConfigError::Missing {
            key,
            kind: self.kind.name(),
        })
    }

    fn forbid<T>(&self, key: &'static str, v: &Option<T>) -> Result<(), ConfigError> {
        match v {
            Some(_) => Err(ConfigError::Unused {
                key,
                kind: self.kind.name(),
            }),
            None => Ok(()),
        }
    }
}

fn same_dim(left_key: &str, left: usize, right_key: &str, right: usize) -> Result<(), ConfigError> {
    if left != right {
        return Err(ConfigError::Dimension {
            left_key: left_key.into(),
            left,
            right_key: right_key.into(),
            right,
        });
    }
    Ok(())
}

fn couplings(raw: &RawCouplings) -> Result<Vec<f64>, ConfigError> {
    let gs = match raw {
        RawCouplings::List(v) => v.clone(),
        RawCouplings::Range(r) => {
            if r.steps == 0 {
                return Err(ConfigError::invalid("g.steps", "must be at least 1"));
            }
            if r.steps == 1 {
                vec![r.start]
            } else {
                let h = (r.stop - r.start) / (r.steps - 1) as f64;
                (0..r.steps).map(|i| r.start + h * i as f64).collect()
            }
        }
    };
    if gs.is_empty() {
        return Err(ConfigError::invalid("g", "needs at least one value"));
    }
    if let Some(g) = gs.iter().find(|g| !g.is_finite()) {
        return Err(ConfigError::invalid("g", format!("{g} is not finite")));
    }
    Ok(gs)
}

fn selection(v: &mut Validator, raw: &RawSelection) -> Result<PrePostSelection, ConfigError> {
    let (psi, phi) = match (&raw.preset, &raw.psi, &raw.phi) {
        (Some(name), None, None) => presets::selection(name)
            .ok_or_else(|| ConfigError::invalid("selection.preset", format!("unknown selection preset `{name}`")))?,
        (None, Some(psi), Some(phi)) => (v.state("selection.psi", psi)?, v.state("selection.phi", phi)?),
        (Some(_), _, _) => {
            return Err(ConfigError::invalid(
                "selection",
                "give either `preset` or both `psi` and `phi`",
            ))
        }
        (None, _, _) => return Err(ConfigError::invalid("selection", "both `psi` and `phi` are required")),
    };
    same_dim("selection.psi", psi.dim(), "selection.phi", phi.dim())?;
    PrePostSelection::new(psi, phi).map_err(|e| ConfigError::invalid("selection", e))
}

fn meter(v: &mut Validator, raw: &RawMeter) -> Result<MeterSpec, ConfigError> {
    Ok(match raw {
        RawMeter::Qubit { alpha, beta } => {
            let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            let amps = vec![alpha.map_or(h, Amp::value), beta.map_or(h, Amp::value)];
            let s = v.normalize("meter.alpha/beta", amps)?;
            let a = s.amplitudes();
            MeterSpec::Qubit(QubitMeter::new(a[0], a[1]).map_err(|e| ConfigError::invalid("meter", e))?)
        }
        RawMeter::Gaussian {
            grid_size,
            x_min,
            x_max,
            sigma,
            x0,
        } => {
            let d = GaussianSpec::default();
            MeterSpec::Gaussian(GaussianSpec {
                grid_size: grid_size.unwrap_or(d.grid_size),
                x_min: x_min.unwrap_or(d.x_min),
                x_max: x_max.unwrap_or(d.x_max),
                sigma: sigma.unwrap_or(d.sigma),
                x0: x0.unwrap_or(d.x0),
            })
        }
        RawMeter::State { amplitudes, observable } => {
            let state = v.state("meter.amplitudes", amplitudes)?;
            let observable = match observable {
                Some(o) => {
                    let op = v.observable("meter.observable", o)?;
                    same_dim("meter.amplitudes", state.dim(), "meter.observable", op.dim())?;
                    Some(op)
                }
                None => None,
            };
            MeterSpec::State { state, observable }
        }
    })
}

fn meter_kind(m: &RawMeter) -> &'static str {
    match m {
        RawMeter::Qubit { .. } => "qubit",
        RawMeter::Gaussian { .. } => "gaussian",
        RawMeter::State { .. } => "state",
    }
}

fn check_meter_kind(kind: ScenarioKind, m: &RawMeter, allowed: &[&str]) -> Result<(), ConfigError> {
    let k = meter_kind(m);
    if !allowed.contains(&k) {
        return Err(ConfigError::invalid(
            "meter.kind",
            format!("{kind} accepts {} meters, got `{k}`", allowed.join(" or ")),
        ));
    }
    Ok(())
}

/// Validates a raw document into a runnable scenario.
pub fn validate(raw: &RawConfig) -> Result<ScenarioConfig, ConfigError> {
    use ScenarioKind::*;
    let kind = raw.kind;
    let mut v = Validator {
        kind,
        warnings: Vec::new(),
    };

    let mut cfg = ScenarioConfig {
        kind,
        name: raw.name.clone().unwrap_or_else(|| kind.name().to_string()),
        seed: raw.seed.unwrap_or(0),
        couplings: Vec::new(),
        observable: None,
        selection: None,
        meter: None,
        conditional: None,
        time_machine: None,
        sweep: None,
        output: raw
            .output
            .as_ref()
            .map(|o| OutputSpec {
                format: o.format,
                path: o.path.clone(),
            })
            .unwrap_or_default(),
        warnings: Vec::new(),
    };

    match kind {
        WeakValue | ModularValue | PotentValues | PotentOperator | Completeness | PointerShift => {
            cfg.couplings = couplings(v.require("g", &raw.g)?)?;
            let raw_sel = v.require("selection", &raw.selection)?;
            let sel = selection(&mut v, raw_sel)?;
            let a = v.observable("observable", v.require("observable", &raw.observable)?)?;
            same_dim("selection.psi", sel.system_dim(), "observable", a.dim())?;
            v.forbid("conditional", &raw.conditional)?;
            v.forbid("time-machine", &raw.time_machine)?;
            match kind {
                ModularValue => v.forbid("meter", &raw.meter)?,
                WeakValue | PointerShift => {
                    if let Some(m) = &raw.meter {
                        check_meter_kind(kind, m, &["gaussian"])?;
                    }
                    cfg.meter = Some(match &raw.meter {
                        Some(m) => meter(&mut v, m)?,
                        None => MeterSpec::Gaussian(GaussianSpec::default()),
                    });
                }
                _ => {
                    let m = v.require("meter", &raw.meter)?;
                    check_meter_kind(kind, m, &["qubit", "state"])?;
                    let spec = meter(&mut v, m)?;
                    if let MeterSpec::State { observable: None, .. } = spec {
                        return Err(ConfigError::invalid(
                            "meter.observable",
                            format!("required for a state meter in {kind}"),
                        ));
                    }
                    cfg.meter = Some(spec);
                }
            }
            cfg.selection = Some(sel);
            cfg.observable = Some(a);
        }
        Conditional => {
            v.forbid("g", &raw.g)?;
            v.forbid("observable", &raw.observable)?;
            v.forbid("meter", &raw.meter)?;
            v.forbid("time-machine", &raw.time_machine)?;
            let c = *v.require("conditional", &raw.conditional)?;
            for (key, d) in [("conditional.system_dim", c.system_dim), ("conditional.apparatus_dim", c.apparatus_dim)] {
                if d == 0 {
                    return Err(ConfigError::invalid(key, "must be positive"));
                }
            }
            if c.instances == 0 {
                return Err(ConfigError::invalid("conditional.instances", "must be positive"));
            }
            if !c.lambda.is_finite() {
                return Err(ConfigError::invalid("conditional.lambda", "must be finite"));
            }
            if let Some(s) = &raw.selection {
                let sel = selection(&mut v, s)?;
                same_dim("selection.psi", sel.system_dim(), "conditional.system_dim", c.system_dim)?;
                cfg.selection = Some(sel);
            }
            cfg.conditional = Some(ConditionalSpec {
                system_dim: c.system_dim,
                apparatus_dim: c.apparatus_dim,
                instances: c.instances,
                lambda: c.lambda,
            });
        }
        TimeMachine => {
            v.forbid("g", &raw.g)?;
            v.forbid("observable", &raw.observable)?;
            v.forbid("selection", &raw.selection)?;
            v.forbid("conditional", &raw.conditional)?;
            let tm = v.require("time-machine", &raw.time_machine)?;
            let h = v.observable("time-machine.hamiltonian", &tm.hamiltonian)?;
            same_dim(
                "time-machine.coefficients",
                tm.coefficients.len(),
                "time-machine.durations",
                tm.durations.len(),
            )?;
            let coeffs = SuperpositionSpec::new(tm.coefficients.iter().map(|a| a.value()).collect())
                .map_err(|e| ConfigError::invalid("time-machine.coefficients", e))?;
            let spec = TimeTranslationSpec::new(tm.durations.clone(), coeffs, h.clone())
                .map_err(|e| ConfigError::invalid("time-machine", e))?;
            let m = v.require("meter", &raw.meter)?;
            check_meter_kind(kind, m, &["state"])?;
            let spec_m = meter(&mut v, m)?;
            if let MeterSpec::State { state, observable } = &spec_m {
                if observable.is_some() {
                    return Err(ConfigError::Unused {
                        key: "meter.observable",
                        kind: kind.name(),
                    });
                }
                same_dim("meter.amplitudes", state.dim(), "time-machine.hamiltonian", h.dim())?;
            }
            cfg.meter = Some(spec_m);
            cfg.time_machine = Some(spec);
        }
    }

    if let Some(s) = &raw.sweep {
        let seeds = s.seeds.clone().unwrap_or_else(|| vec![cfg.seed]);
        if seeds.is_empty() {
            return Err(ConfigError::invalid("sweep.seeds", "needs at least one value"));
        }
        let sigmas = match &s.sigmas {
            Some(list) => {
                if !matches!(cfg.meter, Some(MeterSpec::Gaussian(_))) {
                    return Err(ConfigError::invalid("sweep.sigmas", "needs a gaussian meter"));
                }
                if list.is_empty() {
                    return Err(ConfigError::invalid("sweep.sigmas", "needs at least one value"));
                }
                if let Some(x) = list.iter().find(|x| !x.is_finite() || **x <= 0.0) {
                    return Err(ConfigError::invalid("sweep.sigmas", format!("{x} is not a positive width")));
                }
                list.iter().copied().map(Some).collect::<Vec<_>>()
            }
            None => vec![None],
        };
        cfg.sweep = Some(SweepSpec {
            seeds,
            sigmas: sigmas.into_iter().flatten().collect(),
        });
    }

    cfg.warnings = v.warnings;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
kind = "weak-value"
g = [0.1]
observable = "sigma_z"

[selection]
psi = [0.8660254037844386, 0.5]
phi = [0.8660254037844386, -0.5]
"#;

    #[test]
    fn minimal_weak_value_config_is_valid() {
        let cfg = parse_config(MINIMAL).unwrap();
        assert_eq!(cfg.kind, ScenarioKind::WeakValue);
        assert_eq!(cfg.selection.unwrap().system_dim(), 2);
        assert!(cfg.warnings.is_empty());
        assert_eq!(cfg.meter, Some(MeterSpec::Gaussian(GaussianSpec::default())));
    }

    #[test]
    fn dimension_error_names_both_keys() {
        let text = r#"
kind = "weak-value"
g = [0.1]
observable = "sigma_z"
[selection]
psi = [1, 0, 0]
phi = [1, 1, 0]
"#;
        let err = parse_config(text).unwrap_err();
        match &err {
            ConfigError::Dimension { left_key, right_key, .. } => {
                assert_eq!(left_key, "selection.psi");
                assert_eq!(right_key, "observable");
            }
            other => panic!("{other:?}"),
        }
        let msg = err.to_string();
        assert!(msg.contains("selection.psi") && msg.contains("observable"));
    }

    #[test]
    fn three_couplings_give_three_points() {
        let text = MINIMAL.replace("g = [0.1]", "g = [0.2, 0.1, 0.05]");
        let plan = parse_config(&text).unwrap().plan();
        let gs: Vec<f64> = plan.iter().map(|p| p.g.unwrap()).collect();
        assert_eq!(gs, vec![0.2, 0.1, 0.05]);
    }

    #[test]
    fn range_is_inclusive() {
        let text = MINIMAL.replace("g = [0.1]", "g = { start = 0.0, stop = 1.0, steps = 5 }");
        let cfg = parse_config(&text).unwrap();
        assert_eq!(cfg.couplings, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = parse_config(&format!("{MINIMAL}\nfoo = 1\n")).unwrap_err();
        assert!(matches!(err, ConfigError::Syntax(_)), "{err:?}");
        let err = parse_config(&MINIMAL.replace("[selection]", "[selection]\nchi = [1, 0]")).unwrap_err();
        assert!(err.to_string().contains("chi"), "{err}");
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        let err = parse_config("kind = \"weak-value\"\ng = [0.1,\n").unwrap_err();
        assert!(err.to_string().contains("line"), "{err}");
    }

    #[test]
    fn unnormalized_amplitudes_warn_and_rescale() {
        let text = MINIMAL.replace("psi = [0.8660254037844386, 0.5]", "psi = [3, 4]");
        let cfg = parse_config(&text).unwrap();
        assert_eq!(cfg.warnings.len(), 1);
        assert!(cfg.warnings[0].contains("selection.psi"));
        let psi = cfg.selection.unwrap().psi().clone();
        assert!((psi.amplitudes()[0].re - 0.6).abs() < 1e-15);
    }

    #[test]
    fn tiny_normalization_error_is_silent() {
        let text = MINIMAL.replace("psi = [0.8660254037844386, 0.5]", "psi = [0.8660254, 0.5]");
        let cfg = parse_config(&text).unwrap();
        assert!(cfg.warnings.is_empty());
        assert!(cfg.selection.unwrap().psi().is_normalized());
    }

    #[test]
    fn complex_amplitudes_and_matrix_literals() {
        let text = r#"
kind = "modular-value"
g = [0.3]
observable = [[1, [0, -1]], [[0, 1], -1]]
[selection]
psi = [[0.6, 0], [0, 0.8]]
phi = "plus"
"#;
        let cfg = parse_config(text).unwrap();
        let a = cfg.observable.unwrap();
        assert_eq!(a.entry(0, 1), C64::new(0.0, -1.0));
        assert_eq!(cfg.selection.unwrap().psi().amplitudes()[1], C64::new(0.0, 0.8));
    }

    #[test]
    fn non_hermitian_observable_is_rejected() {
        let text = MINIMAL.replace("observable = \"sigma_z\"", "observable = [[0, 1], [0, 0]]");
        let err = parse_config(&text).unwrap_err();
        assert!(err.to_string().starts_with("observable"), "{err}");
    }

    #[test]
    fn orthogonal_selection_is_rejected() {
        let text = MINIMAL.replace("phi = [0.8660254037844386, -0.5]", "phi = [-0.5, 0.8660254037844386]");
        assert!(parse_config(&text).is_err());
    }

    #[test]
    fn non_finite_sweep_values_are_rejected() {
        let text = MINIMAL.replace("g = [0.1]", "g = [0.1, nan]");
        assert!(parse_config(&text).is_err());
    }

    #[test]
    fn kind_specific_sections() {
        let text = format!("{MINIMAL}\n[conditional]\nsystem_dim = 2\napparatus_dim = 2\ninstances = 1\nlambda = 1.0\n");
        assert!(matches!(parse_config(&text).unwrap_err(), ConfigError::Unused { key: "conditional", .. }));
        let text = MINIMAL.replace("kind = \"weak-value\"", "kind = \"potent-values\"");
        assert!(matches!(parse_config(&text).unwrap_err(), ConfigError::Missing { key: "meter", .. }));
    }

    #[test]
    fn sweep_expands_seeds_and_widths() {
        let text = format!("{MINIMAL}\n[sweep]\nseeds = [1, 2]\nsigmas = [1.0, 1.5]\n");
        let plan = parse_config(&text).unwrap().plan();
        assert_eq!(plan.len(), 4);
        assert_eq!((plan[1].seed, plan[1].sigma), (1, Some(1.5)));
        assert_eq!((plan[2].seed, plan[2].sigma), (2, Some(1.0)));
    }

    #[test]
    fn time_machine_dimensions_checked() {
        let text = r#"
kind = "time-machine"
[time-machine]
coefficients = [2, -1]
durations = [1, 2]
hamiltonian = "sigma_z"
[meter]
kind = "state"
amplitudes = [1, 0, 0]
"#;
        let err = parse_config(text).unwrap_err();
        assert!(err.to_string().contains("meter.amplitudes"), "{err}");
        assert!(err.to_string().contains("time-machine.hamiltonian"), "{err}");
    }
}
