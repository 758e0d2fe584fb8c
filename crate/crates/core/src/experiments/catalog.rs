use std::f64::consts::PI;
use std::ops::RangeInclusive;

use thiserror::Error;

use crate::engine::{Dynamics, Phase, Schedule, SimConfig};

pub const EXPERIMENT_IDS: RangeInclusive<u32> = 1..=18;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown experiment {0}; valid ids are 1..=18")]
pub struct UnknownExperiment(pub u32);

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub id: u32,
    pub summary: String,
    pub config: SimConfig,
    /// Independent simulation runs.
    pub nisr: u32,
}

const MOVE_ANGLE: f64 = PI / 20.0;

fn ppc(p: f64) -> Dynamics {
    Dynamics { p_ppc: p, ..Dynamics::default() }
}

fn cpc(p: f64) -> Dynamics {
    Dynamics { p_cpc: p, ..Dynamics::default() }
}

fn mixed(p_ppc: f64, p_cpc: f64) -> Dynamics {
    Dynamics { p_ppc, p_cpc, ..Dynamics::default() }
}

fn drift(mut d: Dynamics) -> Dynamics {
    d.p_mu_c = 0.10;
    d.m = 1.0;
    d
}

fn consumers_move(mut d: Dynamics) -> Dynamics {
    d.p_clc = 0.10;
    d.delta_phi_max = MOVE_ANGLE;
    d
}

fn providers_move(mut d: Dynamics) -> Dynamics {
    d.p_plc = 0.10;
    d.delta_phi_max = MOVE_ANGLE;
    d
}

/// The phased schedule of the final experiment.
pub fn phased_schedule() -> Schedule {
    let rows = [
        (1, 200, mixed(0.02, 0.05)),
        (201, 250, ppc(0.02)),
        (251, 300, ppc(0.05)),
        (301, 350, ppc(0.10)),
        (351, 400, cpc(0.02)),
        (401, 450, cpc(0.05)),
        (451, 500, cpc(0.10)),
    ];
    Schedule {
        phases: rows
            .into_iter()
            .map(|(start, end, dynamics)| Phase { start, end, dynamics })
            .collect(),
    }
}

fn describe(d: &Dynamics) -> String {
    let mut parts = Vec::new();
    let pct = |v: f64| format!("{}%", (v * 100.0).round());
    if d.p_ppc > 0.0 {
        parts.push(format!("PPC {}", pct(d.p_ppc)));
    }
    if d.p_cpc > 0.0 {
        parts.push(format!("CPC {}", pct(d.p_cpc)));
    }
    if d.p_clc > 0.0 {
        parts.push(format!("CLC {}", pct(d.p_clc)));
    }
    if d.p_plc > 0.0 {
        parts.push(format!("PLC {}", pct(d.p_plc)));
    }
    if d.p_clc > 0.0 || d.p_plc > 0.0 {
        parts.push("dphi pi/20".to_string());
    }
    if d.p_mu_c > 0.0 {
        parts.push(format!("drift {} M={}", pct(d.p_mu_c), d.m));
    }
    if d.p_profile_switch > 0.0 {
        parts.push(format!("profile switch {}", pct(d.p_profile_switch)));
    }
    if parts.is_empty() {
        "static".to_string()
    } else {
        parts.join(", ")
    }
}

pub fn experiment_config(id: u32) -> Result<ExperimentSpec, UnknownExperiment> {
    let base = Dynamics::default();
    let (dynamics, nisr) = match id {
        1 => (base, 30),
        2 => (ppc(0.02), 30),
        3 => (ppc(0.05), 10),
        4 => (ppc(0.10), 10),
        5 => (cpc(0.02), 10),
        6 => (cpc(0.05), 30),
        7 => (cpc(0.10), 10),
        8 => (drift(base), 30),
        9 => (
            Dynamics {
                p_profile_switch: 0.02,
                ..base
            },
            30,
        ),
        10 => (consumers_move(base), 30),
        11 => (providers_move(base), 30),
        12 => (mixed(0.02, 0.05), 10),
        // the prose says both populations change by up to 10%
        13 => (mixed(0.10, 0.10), 12),
        14 => (consumers_move(mixed(0.02, 0.05)), 10),
        15 => (providers_move(consumers_move(mixed(0.02, 0.05))), 10),
        16 => (drift(providers_move(consumers_move(mixed(0.02, 0.05)))), 10),
        17 => {
            let mut d = drift(providers_move(consumers_move(mixed(0.02, 0.05))));
            d.p_profile_switch = 0.02;
            (d, 30)
        }
        18 => (base, 10),
        _ => return Err(UnknownExperiment(id)),
    };
    let mut config = SimConfig::default();
    config.env.dynamics = dynamics;
    if id == 7 || id == 13 {
        config.env.rounds = 1000;
    }
    let summary = if id == 18 {
        config.env.schedule = Some(phased_schedule());
        "phased schedule of population changes".to_string()
    } else {
        describe(&dynamics)
    };
    Ok(ExperimentSpec { id, summary, config, nisr })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn total_on_valid_ids() {
        for id in EXPERIMENT_IDS {
            let s = experiment_config(id).unwrap();
            assert_eq!(s.id, id);
            s.config.env.validate().unwrap();
            assert_eq!(s, experiment_config(id).unwrap());
        }
        assert_eq!(experiment_config(0), Err(UnknownExperiment(0)));
        assert_eq!(experiment_config(19), Err(UnknownExperiment(19)));
    }

    #[test]
    fn run_counts() {
        let nisr: Vec<u32> = EXPERIMENT_IDS.map(|i| experiment_config(i).unwrap().nisr).collect();
        assert_eq!(nisr, [30, 30, 10, 10, 10, 30, 10, 30, 30, 30, 30, 10, 12, 10, 10, 10, 30, 10]);
    }

    #[test]
    fn rounds() {
        for id in EXPERIMENT_IDS {
            let r = experiment_config(id).unwrap().config.env.rounds;
            assert_eq!(r, if id == 7 || id == 13 { 1000 } else { 500 }, "experiment {id}");
        }
    }

    #[test]
    fn static_and_combined_settings() {
        assert!(experiment_config(1).unwrap().config.env.dynamics.is_static());
        let d = experiment_config(4).unwrap().config.env.dynamics;
        assert_eq!(d, ppc(0.10));
        let d = experiment_config(16).unwrap().config.env.dynamics;
        assert_eq!(
            d,
            Dynamics {
                p_ppc: 0.02,
                p_cpc: 0.05,
                p_clc: 0.10,
                p_plc: 0.10,
                delta_phi_max: PI / 20.0,
                p_mu_c: 0.10,
                m: 1.0,
                p_profile_switch: 0.0,
            }
        );
        assert_eq!(experiment_config(17).unwrap().config.env.dynamics.p_profile_switch, 0.02);
        assert_eq!(experiment_config(13).unwrap().config.env.dynamics, mixed(0.10, 0.10));
    }

    #[test]
    fn phased_rounds() {
        let cfg = experiment_config(18).unwrap().config;
        let s = cfg.env.schedule.as_ref().unwrap();
        s.validate().unwrap();
        assert_eq!(cfg.env.dynamics_at(100), mixed(0.02, 0.05));
        assert_eq!(cfg.env.dynamics_at(275), ppc(0.05));
        assert_eq!(cfg.env.dynamics_at(325), ppc(0.10));
        assert_eq!(cfg.env.dynamics_at(475), cpc(0.10));
        assert_eq!(cfg.env.dynamics_at(501), Dynamics::default());
    }
}
