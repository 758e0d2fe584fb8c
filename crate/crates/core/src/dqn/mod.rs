//! Deep Q-learning for the push/pull decision: online and target networks,
//! a small replay memory and an ε-greedy policy.

mod network;

use std::collections::VecDeque;

use rand::seq::index;
use rand::Rng;
use thiserror::Error;

pub use network::{minibatch_gradient, minibatch_loss, sigmoid, QNetwork, Sample, Trace, HIDDEN, INPUTS, OUTPUTS, PARAM_COUNT};

use crate::features::FeatureVector;
use crate::Mode;

#[derive(Debug, Clone, PartialEq)]
pub struct Hyperparams {
    /// Window width for the averaged features.
    pub window: usize,
    pub epsilon: f64,
    pub l2_lambda: f64,
    /// Blending rate inside the TD target.
    pub alpha_dqn: f64,
    /// Gradient step size.
    pub sgd_rate: f64,
    pub gamma: f64,
    pub memory: usize,
    pub minibatch: usize,
    pub target_sync_every: u64,
    pub input_sigmoid: bool,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams {
            window: 10,
            epsilon: 0.05,
            l2_lambda: 0.01,
            alpha_dqn: 0.3,
            sgd_rate: 0.15,
            gamma: 0.95,
            memory: 50,
            minibatch: 5,
            target_sync_every: 5,
            input_sigmoid: true,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum DqnError {
    #[error("training diverged after {steps} steps: {what} is not finite")]
    Diverged { steps: u64, what: &'static str },
}

/// Output neuron 0 is push, neuron 1 is pull.
pub fn action_index(mode: Mode) -> usize {
    match mode {
        Mode::Push => 0,
        Mode::Pull => 1,
    }
}

pub fn action_from_index(i: usize) -> Mode {
    if i == 0 {
        Mode::Push
    } else {
        Mode::Pull
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Experience {
    pub state: FeatureVector,
    pub action: Mode,
    pub reward: f64,
    pub next_state: FeatureVector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplayMemory {
    capacity: usize,
    items: VecDeque<Experience>,
}

impl ReplayMemory {
    pub fn new(capacity: usize) -> Self {
        ReplayMemory {
            capacity: capacity.max(1),
            items: VecDeque::with_capacity(capacity.max(1)),
        }
    }

    pub fn remember(&mut self, exp: Experience) {
        if self.items.len() == self.capacity {
            self.items.pop_front();
        }
        self.items.push_back(exp);
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn get(&self, i: usize) -> Option<&Experience> {
        self.items.get(i)
    }
}

/// ε-greedy over the two Q-values; ties are broken uniformly.
pub fn select_action<R: Rng + ?Sized>(q: [f64; 2], epsilon: f64, rng: &mut R) -> Mode {
    if epsilon > 0.0 && rng.random::<f64>() < epsilon {
        return action_from_index(rng.random_range(0..2));
    }
    if q[0] > q[1] {
        Mode::Push
    } else if q[1] > q[0] {
        Mode::Pull
    } else {
        action_from_index(rng.random_range(0..2))
    }
}

pub fn sync_target(online: &QNetwork, target: &mut QNetwork) {
    target.clone_from(online);
}

/// One minibatch update of `online`. Does nothing until the memory holds a
/// full minibatch. Returns whether an update happened.
pub fn train_step<R: Rng + ?Sized>(
    online: &mut QNetwork,
    target: &QNetwork,
    memory: &ReplayMemory,
    hp: &Hyperparams,
    rng: &mut R,
) -> Result<bool, DqnError> {
    if memory.len() < hp.minibatch || hp.minibatch == 0 {
        return Ok(false);
    }
    let picks = index::sample(rng, memory.len(), hp.minibatch);
    let batch: Vec<Sample> = picks
        .iter()
        .map(|i| {
            let e = memory.get(i).expect("sampled index in range");
            let a = action_index(e.action);
            let q = online.forward(&e.state.0)[a];
            let next = target.forward(&e.next_state.0);
            let td = e.reward + hp.gamma * next[0].max(next[1]) - q;
            Sample {
                state: e.state.0,
                action: a,
                target: q + hp.alpha_dqn * td,
            }
        })
        .collect();
    let grad = minibatch_gradient(online, &batch, hp.l2_lambda);
    online.apply_gradient(&grad, hp.sgd_rate);
    Ok(true)
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Pending {
    state: FeatureVector,
    action: Mode,
    reward: Option<f64>,
}

/// Per-consumer learner owning both networks and the replay memory.
#[derive(Debug, Clone, PartialEq)]
pub struct Learner {
    pub online: QNetwork,
    pub target: QNetwork,
    pub memory: ReplayMemory,
    pub hp: Hyperparams,
    /// Effective train steps so far.
    pub train_steps: u64,
    pending: Option<Pending>,
}

impl Learner {
    pub fn new<R: Rng + ?Sized>(hp: Hyperparams, rng: &mut R) -> Self {
        let online = QNetwork::random(hp.input_sigmoid, rng);
        Learner::with_network(hp, online)
    }

    pub fn with_network(hp: Hyperparams, online: QNetwork) -> Self {
        Learner {
            target: online.clone(),
            online,
            memory: ReplayMemory::new(hp.memory),
            hp,
            train_steps: 0,
            pending: None,
        }
    }

    /// Called at each decision point with the freshly observed state. Picks
    /// the next action with the current online network, then closes the
    /// previous transition (if its reward is known) and trains once.
    pub fn step<R: Rng + ?Sized>(&mut self, state: FeatureVector, rng: &mut R) -> Result<Mode, DqnError> {
        let action = select_action(self.online.forward(&state.0), self.hp.epsilon, rng);
        if let Some(Pending { state: s, action: a, reward: Some(r) }) = self.pending.take() {
            self.memory.remember(Experience {
                state: s,
                action: a,
                reward: r,
                next_state: state,
            });
            self.train(rng)?;
        }
        self.pending = Some(Pending {
            state,
            action,
            reward: None,
        });
        Ok(action)
    }

    /// Reward for the action chosen at the last decision point.
    pub fn reward(&mut self, r: f64) {
        if let Some(p) = self.pending.as_mut() {
            p.reward = Some(r);
        }
    }

    pub fn train<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<(), DqnError> {
        if train_step(&mut self.online, &self.target, &self.memory, &self.hp, rng)? {
            self.train_steps += 1;
            if !self.online.is_finite() {
                return Err(DqnError::Diverged {
                    steps: self.train_steps,
                    what: "online network parameter",
                });
            }
            if self.hp.target_sync_every > 0 && self.train_steps.is_multiple_of(self.hp.target_sync_every) {
                sync_target(&self.online, &mut self.target);
            }
        }
        Ok(())
    }
}
