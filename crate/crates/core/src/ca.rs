//! The CA trust model (push). Trust lives on the trustee: each provider keeps
//! a connection weight per requested performance level and volunteers only
//! when that weight reaches the threshold.

use rand::Rng;

use crate::population::{PerformanceLevel, Provider};
use crate::AgentId;

#[derive(Debug, Clone, PartialEq)]
pub struct CaParams {
    pub threshold: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Weight given to a connection the first time a level is requested.
    pub initial_weight: f64,
}

impl Default for CaParams {
    fn default() -> Self {
        CaParams {
            threshold: 0.5,
            alpha: 0.1,
            beta: 0.1,
            initial_weight: 0.5,
        }
    }
}

/// One weight per performance level, created on first request.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConnectionWeights {
    weights: [Option<f64>; 5],
}

impl ConnectionWeights {
    pub fn get(&self, level: PerformanceLevel) -> Option<f64> {
        self.weights[level.index()]
    }

    pub fn get_or_init(&mut self, level: PerformanceLevel, initial: f64) -> f64 {
        *self.weights[level.index()].get_or_insert(initial.clamp(0.0, 1.0))
    }

    pub fn set(&mut self, level: PerformanceLevel, w: f64) {
        self.weights[level.index()] = Some(w.clamp(0.0, 1.0));
    }

    pub fn iter(&self) -> impl Iterator<Item = (PerformanceLevel, f64)> + '_ {
        PerformanceLevel::ALL
            .into_iter()
            .filter_map(|l| self.get(l).map(|w| (l, w)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RequestMessage {
    pub requester: AgentId,
    pub level: PerformanceLevel,
    pub round: u32,
}

/// Strengthening after a successful task: `min(1, w + α(1 − w))`.
pub fn update_weight_success(w: f64, alpha: f64) -> f64 {
    (w + alpha * (1.0 - w)).min(1.0)
}

/// Weakening after a failed task: `max(0, w − β(1 − w))`.
pub fn update_weight_failure(w: f64, beta: f64) -> f64 {
    (w - beta * (1.0 - w)).max(0.0)
}

/// Whether the trustee takes on a task at `level`. A missing connection is
/// created at the initial weight first.
pub fn decide_execute(weights: &mut ConnectionWeights, level: PerformanceLevel, params: &CaParams) -> bool {
    weights.get_or_init(level, params.initial_weight) >= params.threshold
}

/// Levels requested in order; WORST is never requested.
pub const STAGES: [PerformanceLevel; 4] = [
    PerformanceLevel::Perfect,
    PerformanceLevel::Good,
    PerformanceLevel::Ok,
    PerformanceLevel::Bad,
];

#[derive(Debug, Clone)]
pub struct PushRequest {
    pub consumer: AgentId,
    /// Indices into the provider slice, of providers within range.
    pub nearby: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Assignment {
    pub consumer: AgentId,
    /// Provider index and the level it agreed to serve, or `None` if no
    /// provider volunteered at any stage.
    pub served_by: Option<(usize, PerformanceLevel)>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AllocationOutcome {
    pub assignments: Vec<Assignment>,
    /// Broadcast stages actually run.
    pub stages: usize,
}

/// Runs the staged broadcast. Each unserved consumer broadcasts at the
/// current level to its nearby providers; every receiver stores the request
/// and decides; one volunteer per consumer is drawn uniformly. Consumers left
/// over after the BAD stage stay unserved.
pub fn staged_allocation<R: Rng + ?Sized>(
    requests: &[PushRequest],
    providers: &mut [Provider],
    round: u32,
    params: &CaParams,
    rng: &mut R,
) -> AllocationOutcome {
    let mut served: Vec<Option<(usize, PerformanceLevel)>> = vec![None; requests.len()];
    let mut stages = 0;
    let mut volunteers: Vec<usize> = Vec::new();
    for level in STAGES {
        if served.iter().all(Option::is_some) {
            break;
        }
        stages += 1;
        for (req, slot) in requests.iter().zip(served.iter_mut()) {
            if slot.is_some() {
                continue;
            }
            volunteers.clear();
            for &pi in &req.nearby {
                let p = &mut providers[pi];
                p.inbox.push(RequestMessage {
                    requester: req.consumer,
                    level,
                    round,
                });
                if decide_execute(&mut p.ca_connections, level, params) {
                    volunteers.push(pi);
                }
            }
            if volunteers.is_empty() {
                continue;
            }
            volunteers.sort_unstable_by_key(|&pi| providers[pi].id);
            let pick = volunteers[rng.random_range(0..volunteers.len())];
            *slot = Some((pick, level));
        }
    }
    AllocationOutcome {
        assignments: requests
            .iter()
            .zip(served)
            .map(|(r, s)| Assignment {
                consumer: r.consumer,
                served_by: s,
            })
            .collect(),
        stages,
    }
}

/// Trustee-side update after delivering a task at `level`. Success means the
/// delivered utility met the requested level. Returns whether it succeeded.
pub fn settle_task(weights: &mut ConnectionWeights, level: PerformanceLevel, delivered_ug: f64, params: &CaParams) -> bool {
    let w = weights.get_or_init(level, params.initial_weight);
    let success = delivered_ug >= level.utility();
    let next = if success {
        update_weight_success(w, params.alpha)
    } else {
        update_weight_failure(w, params.beta)
    };
    weights.set(level, next);
    success
}
