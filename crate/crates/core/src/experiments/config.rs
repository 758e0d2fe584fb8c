//! Flat `key = value` rendering of an experiment, and overrides read back
//! from the same format.

use std::collections::BTreeMap;
use std::str::FromStr;

use thiserror::Error;

use super::catalog::ExperimentSpec;
use crate::engine::{ConfigError, Dynamics, Phase, Schedule, SimConfig};

#[derive(Debug, Error, PartialEq)]
pub enum ConfigFileError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: invalid value `{value}` for `{key}`")]
    BadValue { line: usize, key: String, value: String },
    #[error("phase {0} needs both start and end")]
    IncompletePhase(usize),
    #[error(transparent)]
    Invalid(#[from] ConfigError),
}

const DYNAMICS_KEYS: [&str; 8] = ["p_ppc", "p_cpc", "p_plc", "p_clc", "delta_phi_max", "p_mu_c", "m", "p_profile_switch"];

fn dynamics_field<'a>(d: &'a mut Dynamics, key: &str) -> Option<&'a mut f64> {
    Some(match key {
        "p_ppc" => &mut d.p_ppc,
        "p_cpc" => &mut d.p_cpc,
        "p_plc" => &mut d.p_plc,
        "p_clc" => &mut d.p_clc,
        "delta_phi_max" => &mut d.delta_phi_max,
        "p_mu_c" => &mut d.p_mu_c,
        "m" => &mut d.m,
        "p_profile_switch" => &mut d.p_profile_switch,
        _ => return None,
    })
}

fn dynamics_value(d: &Dynamics, key: &str) -> f64 {
    let mut copy = *d;
    *dynamics_field(&mut copy, key).expect("known key")
}

/// A mutable view of one scalar setting.
enum Slot<'a> {
    F(&'a mut f64),
    U(&'a mut usize),
    R(&'a mut u32),
    L(&'a mut u64),
    B(&'a mut bool),
}

impl Slot<'_> {
    fn render(&self) -> String {
        match self {
            Slot::F(v) => v.to_string(),
            Slot::U(v) => v.to_string(),
            Slot::R(v) => v.to_string(),
            Slot::L(v) => v.to_string(),
            Slot::B(v) => v.to_string(),
        }
    }

    fn assign(self, value: &str) -> bool {
        fn put<T: FromStr>(slot: &mut T, value: &str) -> bool {
            value.parse().map(|v| *slot = v).is_ok()
        }
        match self {
            Slot::F(v) => put(v, value) && v.is_finite(),
            Slot::U(v) => put(v, value),
            Slot::R(v) => put(v, value),
            Slot::L(v) => put(v, value),
            Slot::B(v) => put(v, value),
        }
    }
}

const SCALAR_KEYS: [&str; 37] = [
    "rounds",
    "radius_of_operation",
    "degradation_slope",
    "counts.good",
    "counts.ordinary",
    "counts.intermittent",
    "counts.bad",
    "counts.fire",
    "counts.ca",
    "counts.adaptable",
    "fire.h",
    "fire.lambda",
    "fire.n_bf",
    "fire.n_rl",
    "fire.w_i",
    "fire.w_r",
    "fire.w_w",
    "fire.w_c",
    "fire.gamma_i",
    "fire.gamma_r",
    "fire.gamma_w",
    "fire.gamma_c",
    "fire.p_explore",
    "ca.threshold",
    "ca.alpha",
    "ca.beta",
    "ca.initial_weight",
    "dqn.window",
    "dqn.epsilon",
    "dqn.l2_lambda",
    "dqn.alpha_dqn",
    "dqn.sgd_rate",
    "dqn.gamma",
    "dqn.memory",
    "dqn.minibatch",
    "dqn.target_sync_every",
    "dqn.input_sigmoid",
];

fn slot<'a>(cfg: &'a mut SimConfig, key: &str) -> Option<Slot<'a>> {
    use Slot::*;
    let env = &mut cfg.env;
    Some(match key {
        "rounds" => R(&mut env.rounds),
        "radius_of_operation" => F(&mut env.radius_of_operation),
        "degradation_slope" => F(&mut env.degradation_slope),
        "counts.good" => U(&mut env.counts.good),
        "counts.ordinary" => U(&mut env.counts.ordinary),
        "counts.intermittent" => U(&mut env.counts.intermittent),
        "counts.bad" => U(&mut env.counts.bad),
        "counts.fire" => U(&mut env.counts.fire),
        "counts.ca" => U(&mut env.counts.ca),
        "counts.adaptable" => U(&mut env.counts.adaptable),
        "fire.h" => U(&mut cfg.fire.h),
        "fire.lambda" => F(&mut cfg.fire.lambda),
        "fire.n_bf" => U(&mut cfg.fire.n_bf),
        "fire.n_rl" => U(&mut cfg.fire.n_rl),
        "fire.w_i" => F(&mut cfg.fire.w_i),
        "fire.w_r" => F(&mut cfg.fire.w_r),
        "fire.w_w" => F(&mut cfg.fire.w_w),
        "fire.w_c" => F(&mut cfg.fire.w_c),
        "fire.gamma_i" => F(&mut cfg.fire.gamma_i),
        "fire.gamma_r" => F(&mut cfg.fire.gamma_r),
        "fire.gamma_w" => F(&mut cfg.fire.gamma_w),
        "fire.gamma_c" => F(&mut cfg.fire.gamma_c),
        "fire.p_explore" => F(&mut cfg.fire.p_explore),
        "ca.threshold" => F(&mut cfg.ca.threshold),
        "ca.alpha" => F(&mut cfg.ca.alpha),
        "ca.beta" => F(&mut cfg.ca.beta),
        "ca.initial_weight" => F(&mut cfg.ca.initial_weight),
        "dqn.window" => U(&mut cfg.dqn.window),
        "dqn.epsilon" => F(&mut cfg.dqn.epsilon),
        "dqn.l2_lambda" => F(&mut cfg.dqn.l2_lambda),
        "dqn.alpha_dqn" => F(&mut cfg.dqn.alpha_dqn),
        "dqn.sgd_rate" => F(&mut cfg.dqn.sgd_rate),
        "dqn.gamma" => F(&mut cfg.dqn.gamma),
        "dqn.memory" => U(&mut cfg.dqn.memory),
        "dqn.minibatch" => U(&mut cfg.dqn.minibatch),
        "dqn.target_sync_every" => L(&mut cfg.dqn.target_sync_every),
        "dqn.input_sigmoid" => B(&mut cfg.dqn.input_sigmoid),
        _ => return None,
    })
}

pub fn dump(spec: &ExperimentSpec) -> String {
    let mut cfg = spec.config.clone();
    let mut out = String::new();
    out.push_str(&format!("# experiment {}: {}\n", spec.id, spec.summary));
    out.push_str(&format!("experiment = {}\n", spec.id));
    out.push_str(&format!("runs = {}\n", spec.nisr));
    for key in SCALAR_KEYS {
        let v = slot(&mut cfg, key).expect("listed key").render();
        out.push_str(&format!("{key} = {v}\n"));
    }
    match &spec.config.env.schedule {
        None => {
            for key in DYNAMICS_KEYS {
                out.push_str(&format!("dynamics.{key} = {}\n", dynamics_value(&spec.config.env.dynamics, key)));
            }
        }
        Some(s) => {
            for (i, p) in s.phases.iter().enumerate() {
                let n = i + 1;
                out.push_str(&format!("phase.{n}.start = {}\n", p.start));
                out.push_str(&format!("phase.{n}.end = {}\n", p.end));
                for key in DYNAMICS_KEYS {
                    out.push_str(&format!("phase.{n}.{key} = {}\n", dynamics_value(&p.dynamics, key)));
                }
            }
        }
    }
    out
}

#[derive(Default)]
struct PhaseDraft {
    start: Option<u32>,
    end: Option<u32>,
    dynamics: Dynamics,
}

/// Applies overrides in `text` on top of `spec`. Any `phase.*` key replaces
/// the schedule with the phases given in the file.
pub fn apply_overrides(spec: &mut ExperimentSpec, text: &str) -> Result<(), ConfigFileError> {
    let mut phases: BTreeMap<usize, PhaseDraft> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or(ConfigFileError::Syntax { line })?;
        let (key, value) = (key.trim(), value.trim());
        let bad = || ConfigFileError::BadValue {
            line,
            key: key.to_string(),
            value: value.to_string(),
        };
        let unknown = || ConfigFileError::UnknownKey {
            line,
            key: key.to_string(),
        };
        if key == "experiment" {
            continue;
        }
        if key == "runs" {
            spec.nisr = value.parse().map_err(|_| bad())?;
            continue;
        }
        if let Some(rest) = key.strip_prefix("dynamics.") {
            let f = dynamics_field(&mut spec.config.env.dynamics, rest).ok_or_else(unknown)?;
            *f = value.parse().map_err(|_| bad())?;
            continue;
        }
        if let Some(rest) = key.strip_prefix("phase.") {
            let (n, field) = rest.split_once('.').ok_or_else(unknown)?;
            let n: usize = n.parse().map_err(|_| unknown())?;
            let draft = phases.entry(n).or_default();
            match field {
                "start" => draft.start = Some(value.parse().map_err(|_| bad())?),
                "end" => draft.end = Some(value.parse().map_err(|_| bad())?),
                other => {
                    let f = dynamics_field(&mut draft.dynamics, other).ok_or_else(unknown)?;
                    *f = value.parse().map_err(|_| bad())?;
                }
            }
            continue;
        }
        let s = slot(&mut spec.config, key).ok_or_else(unknown)?;
        if !s.assign(value) {
            return Err(bad());
        }
    }
    if !phases.is_empty() {
        let mut list = Vec::new();
        for (n, d) in phases {
            match (d.start, d.end) {
                (Some(start), Some(end)) => list.push(Phase {
                    start,
                    end,
                    dynamics: d.dynamics,
                }),
                _ => return Err(ConfigFileError::IncompletePhase(n)),
            }
        }
        spec.config.env.schedule = Some(Schedule::new(list)?);
    }
    spec.config.env.validate()?;
    Ok(())
}
