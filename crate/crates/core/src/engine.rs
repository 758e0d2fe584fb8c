//! The round loop.
//!
//! Each round: consumers wake up according to their activity level; pull-mode
//! consumers (FIRE and adaptable consumers choosing pull) assess and select a
//! provider; push-mode consumers (CA and adaptable consumers choosing push)
//! go through the staged broadcast; every served interaction is rated. At the
//! end of the round the environment changes in a fixed order: consumer churn,
//! provider churn, consumer moves, provider moves, performance drift, profile
//! switches.

use std::collections::{BTreeSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::ca::{self, CaParams, PushRequest};
use crate::dqn::{DqnError, Hyperparams, Learner, QNetwork};
use crate::features::FeatureError;
use crate::fire::{self, FireParams, Rating, RoleTable, TrustAssessment, WitnessNetwork};
use crate::population::{
    self, Consumer, PerformanceLevel, Provider, ProviderKind, DEFAULT_DEGRADATION_SLOPE, UG_MAX, UG_MIN,
};
use crate::world::{self, DEFAULT_RADIUS_OF_OPERATION};
use crate::{AgentId, Group, Mode};

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("{name} = {value} is outside [0, 1]")]
    Probability { name: &'static str, value: f64 },
    #[error("{0} must be positive")]
    NonPositive(&'static str),
    #[error("schedule phase {start}-{end} is empty or reversed")]
    BadPhase { start: u32, end: u32 },
    #[error("schedule phases {0} and {1} overlap or are out of order")]
    Overlap(usize, usize),
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("consumer {consumer} in round {round}: {source}")]
    Learner {
        consumer: AgentId,
        round: u32,
        #[source]
        source: DqnError,
    },
    #[error("consumer {consumer} in round {round}: {source}")]
    Features {
        consumer: AgentId,
        round: u32,
        #[source]
        source: FeatureError,
    },
}

/// Environment change rates. All zero means a static world.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Dynamics {
    pub p_ppc: f64,
    pub p_cpc: f64,
    pub p_plc: f64,
    pub p_clc: f64,
    pub delta_phi_max: f64,
    pub p_mu_c: f64,
    pub m: f64,
    pub p_profile_switch: f64,
}

impl Dynamics {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let probs = [
            ("p_ppc", self.p_ppc),
            ("p_cpc", self.p_cpc),
            ("p_plc", self.p_plc),
            ("p_clc", self.p_clc),
            ("p_mu_c", self.p_mu_c),
            ("p_profile_switch", self.p_profile_switch),
        ];
        for (name, value) in probs {
            if !(0.0..=1.0).contains(&value) {
                return Err(ConfigError::Probability { name, value });
            }
        }
        if self.delta_phi_max < 0.0 || self.m < 0.0 {
            return Err(ConfigError::NonPositive("delta_phi_max and m"));
        }
        Ok(())
    }

    pub fn is_static(&self) -> bool {
        *self == Dynamics::default()
    }
}

/// Rounds `start..=end` (1-based, inclusive) use `dynamics`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Phase {
    pub start: u32,
    pub end: u32,
    pub dynamics: Dynamics,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Schedule {
    pub phases: Vec<Phase>,
}

impl Schedule {
    pub fn new(phases: Vec<Phase>) -> Result<Self, ConfigError> {
        let s = Schedule { phases };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        for (i, p) in self.phases.iter().enumerate() {
            if p.start == 0 || p.end < p.start {
                return Err(ConfigError::BadPhase { start: p.start, end: p.end });
            }
            p.dynamics.validate()?;
            if i > 0 && self.phases[i - 1].end >= p.start {
                return Err(ConfigError::Overlap(i - 1, i));
            }
        }
        Ok(())
    }

    /// Dynamics in effect in `round`; rounds outside every phase are static.
    pub fn dynamics_at(&self, round: u32) -> Dynamics {
        self.phases
            .iter()
            .find(|p| (p.start..=p.end).contains(&round))
            .map(|p| p.dynamics)
            .unwrap_or_default()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PopulationCounts {
    pub good: usize,
    pub ordinary: usize,
    pub intermittent: usize,
    pub bad: usize,
    pub fire: usize,
    pub ca: usize,
    pub adaptable: usize,
}

impl Default for PopulationCounts {
    fn default() -> Self {
        PopulationCounts {
            good: 10,
            ordinary: 40,
            intermittent: 5,
            bad: 45,
            fire: 167,
            ca: 167,
            adaptable: 166,
        }
    }
}

impl PopulationCounts {
    pub fn providers(&self) -> usize {
        self.good + self.ordinary + self.intermittent + self.bad
    }

    pub fn consumers(&self) -> usize {
        self.fire + self.ca + self.adaptable
    }

    pub fn of_kind(&self, kind: ProviderKind) -> usize {
        match kind {
            ProviderKind::Good => self.good,
            ProviderKind::Ordinary => self.ordinary,
            ProviderKind::Intermittent => self.intermittent,
            ProviderKind::Bad => self.bad,
        }
    }

    pub fn of_group(&self, group: Group) -> usize {
        match group {
            Group::Fire => self.fire,
            Group::Ca => self.ca,
            Group::Adaptable => self.adaptable,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnvironmentConfig {
    pub rounds: u32,
    pub counts: PopulationCounts,
    /// Used every round when no schedule is set.
    pub dynamics: Dynamics,
    pub schedule: Option<Schedule>,
    pub radius_of_operation: f64,
    pub degradation_slope: f64,
}

impl Default for EnvironmentConfig {
    fn default() -> Self {
        EnvironmentConfig {
            rounds: 500,
            counts: PopulationCounts::default(),
            dynamics: Dynamics::default(),
            schedule: None,
            radius_of_operation: DEFAULT_RADIUS_OF_OPERATION,
            degradation_slope: DEFAULT_DEGRADATION_SLOPE,
        }
    }
}

impl EnvironmentConfig {
    pub fn dynamics_at(&self, round: u32) -> Dynamics {
        match &self.schedule {
            Some(s) => s.dynamics_at(round),
            None => self.dynamics,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.rounds == 0 {
            return Err(ConfigError::NonPositive("rounds"));
        }
        if self.counts.providers() == 0 || self.counts.consumers() == 0 {
            return Err(ConfigError::NonPositive("population counts"));
        }
        if self.radius_of_operation <= 0.0 {
            return Err(ConfigError::NonPositive("radius_of_operation"));
        }
        self.dynamics.validate()?;
        if let Some(s) = &self.schedule {
            s.validate()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SimConfig {
    pub env: EnvironmentConfig,
    pub fire: FireParams,
    pub ca: CaParams,
    pub dqn: Hyperparams,
    pub roles: RoleTable,
    /// Test hook: every consumer's activity level is replaced by this value.
    pub activity_override: Option<f64>,
    /// Test hook: adaptable consumers start from this network instead of a
    /// random one.
    pub initial_network: Option<QNetwork>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteractionRecord {
    pub run: u32,
    pub round: u32,
    pub consumer: AgentId,
    pub group: Group,
    /// 1-based count of the consumer's served interactions. An unserved
    /// request carries the index the next served interaction will get.
    pub interaction_index: u64,
    pub model_used: Mode,
    pub ug: f64,
    pub served: bool,
}

/// Population make-up at the end of a round.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Census {
    pub round: u32,
    pub providers_by_kind: [usize; 4],
    pub consumers_by_group: [usize; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunLog {
    pub run: u32,
    pub seed: u64,
    pub records: Vec<InteractionRecord>,
    pub census: Vec<Census>,
}

/// Per-round neighbourhoods.
struct Neighbors {
    /// Provider indices within each consumer's radius, ascending.
    providers: Vec<Vec<usize>>,
    /// Consumer acquaintances of each consumer.
    acquaintances: Vec<Vec<AgentId>>,
    /// Consumer position by identity; identities are small and dense.
    consumer_index: Vec<usize>,
    provider_index: Vec<usize>,
    /// Bit `c` of row `p` is set when consumer `c` holds a rating for
    /// provider `p` at the start of the round.
    raters: Vec<u64>,
    /// Row `c` is the acquaintance set of consumer `c`, same layout.
    acquainted: Vec<u64>,
    words: usize,
}

impl Neighbors {
    fn build(consumers: &[Consumer], providers: &[Provider]) -> Self {
        let cpos: Vec<[f64; 3]> = consumers.iter().map(|c| c.coord.to_cartesian()).collect();
        let ppos: Vec<[f64; 3]> = providers.iter().map(|p| p.coord.to_cartesian()).collect();
        let near_p = consumers
            .iter()
            .zip(&cpos)
            .map(|(c, cp)| {
                ppos.iter()
                    .enumerate()
                    .filter(|(_, pp)| world::cartesian_distance(cp, pp) <= c.r_o)
                    .map(|(i, _)| i)
                    .collect()
            })
            .collect();
        let mut acquaintances = vec![Vec::new(); consumers.len()];
        for i in 0..consumers.len() {
            for j in (i + 1)..consumers.len() {
                let d = world::cartesian_distance(&cpos[i], &cpos[j]);
                if d <= consumers[i].r_o {
                    acquaintances[i].push(consumers[j].id);
                }
                if d <= consumers[j].r_o {
                    acquaintances[j].push(consumers[i].id);
                }
            }
        }
        // restore index order for the lower-index half pushed late
        for a in acquaintances.iter_mut() {
            a.sort_unstable();
        }
        let max_id = consumers.iter().map(|c| c.id.0 as usize).max().unwrap_or(0);
        let mut consumer_index = vec![usize::MAX; max_id + 1];
        for (i, c) in consumers.iter().enumerate() {
            consumer_index[c.id.0 as usize] = i;
        }
        let max_id = providers.iter().map(|p| p.id.0 as usize).max().unwrap_or(0);
        let mut provider_index = vec![usize::MAX; max_id + 1];
        for (i, p) in providers.iter().enumerate() {
            provider_index[p.id.0 as usize] = i;
        }
        let words = consumers.len().div_ceil(64);
        let mut raters = vec![0u64; words * providers.len()];
        for (ci, c) in consumers.iter().enumerate() {
            for pid in c.rating_db.providers() {
                if let Some(&pi) = provider_index.get(pid.0 as usize).filter(|&&i| i != usize::MAX) {
                    raters[pi * words + ci / 64] |= 1 << (ci % 64);
                }
            }
        }
        let mut acquainted = vec![0u64; words * consumers.len()];
        for (ci, a) in acquaintances.iter().enumerate() {
            for id in a {
                let j = consumer_index[id.0 as usize];
                acquainted[ci * words + j / 64] |= 1 << (j % 64);
            }
        }
        Neighbors {
            providers: near_p,
            acquaintances,
            consumer_index,
            provider_index,
            raters,
            acquainted,
            words,
        }
    }
}

impl Neighbors {
    fn position(&self, id: AgentId) -> Option<usize> {
        self.consumer_index.get(id.0 as usize).copied().filter(|&i| i != usize::MAX)
    }

    fn provider_row(&self, provider: AgentId) -> Option<&[u64]> {
        let pi = *self.provider_index.get(provider.0 as usize)?;
        (pi != usize::MAX).then(|| &self.raters[pi * self.words..(pi + 1) * self.words])
    }
}

struct RoundNetwork<'a> {
    neighbors: &'a Neighbors,
    consumers: &'a [Consumer],
}

impl WitnessNetwork for RoundNetwork<'_> {
    fn acquaintances(&self, consumer: AgentId) -> &[AgentId] {
        match self.neighbors.position(consumer) {
            Some(i) => &self.neighbors.acquaintances[i],
            None => &[],
        }
    }

    fn ratings_for(&self, witness: AgentId, provider: AgentId) -> Option<&VecDeque<Rating>> {
        let i = self.neighbors.position(witness)?;
        self.consumers[i].rating_db.ratings_for(provider)
    }

    fn referral_pool(&self, consumer: AgentId, provider: AgentId, visited: &BTreeSet<AgentId>) -> Vec<AgentId> {
        let nb = self.neighbors;
        let Some(ci) = nb.position(consumer) else {
            return Vec::new();
        };
        let w = nb.words;
        let mut fresh = nb.acquainted[ci * w..(ci + 1) * w].to_vec();
        for v in visited {
            if let Some(j) = nb.position(*v) {
                fresh[j / 64] &= !(1 << (j % 64));
            }
        }
        if let Some(row) = nb.provider_row(provider) {
            if fresh.iter().zip(row).any(|(f, r)| f & r != 0) {
                for (f, r) in fresh.iter_mut().zip(row) {
                    *f &= r;
                }
            }
        }
        let count: u32 = fresh.iter().map(|b| b.count_ones()).sum();
        let mut out = Vec::with_capacity(count as usize);
        for (k, mut bits) in fresh.into_iter().enumerate() {
            while bits != 0 {
                let j = k * 64 + bits.trailing_zeros() as usize;
                out.push(self.consumers[j].id);
                bits &= bits - 1;
            }
        }
        out
    }
}

enum Decision {
    Pull(Option<fire::Choice>),
    Push,
}

pub struct Simulation {
    pub config: SimConfig,
    pub run: u32,
    pub seed: u64,
    round: u32,
    next_id: u64,
    pub providers: Vec<Provider>,
    pub consumers: Vec<Consumer>,
    rng: ChaCha8Rng,
}

impl Simulation {
    pub fn new(config: SimConfig, seed: u64, run: u32) -> Result<Self, SimError> {
        config.env.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut next_id = 0u64;
        let counts = config.env.counts;
        let r_o = config.env.radius_of_operation;
        let mut providers = Vec::with_capacity(counts.providers());
        for kind in [ProviderKind::Good, ProviderKind::Ordinary, ProviderKind::Intermittent, ProviderKind::Bad] {
            for _ in 0..counts.of_kind(kind) {
                next_id += 1;
                providers.push(population::spawn_provider(AgentId(next_id), kind, r_o, config.fire.h, &mut rng));
            }
        }
        let mut sim = Simulation {
            config,
            run,
            seed,
            round: 0,
            next_id,
            providers,
            consumers: Vec::with_capacity(counts.consumers()),
            rng,
        };
        for group in Group::ALL {
            for _ in 0..counts.of_group(group) {
                let c = sim.new_consumer(group);
                sim.consumers.push(c);
            }
        }
        Ok(sim)
    }

    pub fn round(&self) -> u32 {
        self.round
    }

    fn fresh_id(&mut self) -> AgentId {
        self.next_id += 1;
        AgentId(self.next_id)
    }

    fn new_consumer(&mut self, group: Group) -> Consumer {
        let id = self.fresh_id();
        let cfg = &self.config;
        let mut c = population::spawn_consumer(id, group, cfg.env.radius_of_operation, cfg.fire.h, &cfg.dqn, &mut self.rng);
        if let (Some(net), Some(_)) = (&cfg.initial_network, &c.learner) {
            c.learner = Some(Learner::with_network(cfg.dqn.clone(), net.clone()));
        }
        c
    }

    pub fn census(&self) -> Census {
        let mut providers_by_kind = [0; 4];
        for p in &self.providers {
            providers_by_kind[p.profile.kind as usize] += 1;
        }
        let mut consumers_by_group = [0; 3];
        for c in &self.consumers {
            consumers_by_group[c.group as usize] += 1;
        }
        Census {
            round: self.round,
            providers_by_kind,
            consumers_by_group,
        }
    }

    /// Advances one round and returns its interaction records.
    pub fn run_round(&mut self) -> Result<Vec<InteractionRecord>, SimError> {
        self.round += 1;
        let now = self.round;
        for p in &mut self.providers {
            p.inbox.clear();
        }
        let neighbors = Neighbors::build(&self.consumers, &self.providers);

        let active: Vec<usize> = (0..self.consumers.len())
            .filter(|&i| {
                let a = self.config.activity_override.unwrap_or(self.consumers[i].activity);
                a > 0.0 && self.rng.random_bool(a.min(1.0))
            })
            .collect();

        // Trust assessments for every consumer that needs one, against the
        // start-of-round state.
        let mut assessments: Vec<Option<TrustAssessment>> = Vec::with_capacity(active.len());
        {
            let network = RoundNetwork {
                neighbors: &neighbors,
                consumers: &self.consumers,
            };
            for &ci in &active {
                let c = &self.consumers[ci];
                if c.group == Group::Ca {
                    assessments.push(None);
                    continue;
                }
                let nearby: Vec<&Provider> = neighbors.providers[ci].iter().map(|&pi| &self.providers[pi]).collect();
                assessments.push(Some(fire::assess_providers(
                    c.id,
                    &c.rating_db,
                    &nearby,
                    &network,
                    &self.config.roles,
                    now,
                    &self.config.fire,
                    &mut self.rng,
                )));
            }
        }

        let mut decisions = Vec::with_capacity(active.len());
        for (&ci, assessment) in active.iter().zip(&assessments) {
            let c = &mut self.consumers[ci];
            let mode = match c.group {
                Group::Fire => Mode::Pull,
                Group::Ca => Mode::Push,
                Group::Adaptable => {
                    let a = assessment.as_ref().expect("adaptable consumers are assessed");
                    let state = c
                        .observation
                        .observe(&c.coord, &c.rating_db, a)
                        .map_err(|source| SimError::Features { consumer: c.id, round: now, source })?;
                    let learner = c.learner.as_mut().expect("adaptable consumers own a learner");
                    learner
                        .step(state, &mut self.rng)
                        .map_err(|source| SimError::Learner { consumer: c.id, round: now, source })?
                }
            };
            decisions.push(match mode {
                Mode::Pull => {
                    let a = assessment.as_ref().expect("pull consumers are assessed");
                    Decision::Pull(fire::choose_provider(a, self.config.fire.p_explore, &mut self.rng))
                }
                Mode::Push => Decision::Push,
            });
        }

        let mut records = Vec::with_capacity(active.len());
        let mut push_requests = Vec::new();
        for (&ci, decision) in active.iter().zip(&decisions) {
            match decision {
                Decision::Pull(Some(choice)) => {
                    let pi = self.provider_index(choice.provider);
                    let ug = self.serve(ci, pi, now);
                    if let Some(t) = choice.trust {
                        if self.consumers[ci].group == Group::Adaptable {
                            self.consumers[ci].observation.record_performance(t, ug);
                        }
                    }
                    records.push(self.finish(ci, Mode::Pull, Some(ug)));
                }
                Decision::Pull(None) => records.push(self.finish(ci, Mode::Pull, None)),
                Decision::Push => push_requests.push((
                    ci,
                    PushRequest {
                        consumer: self.consumers[ci].id,
                        nearby: neighbors.providers[ci].clone(),
                    },
                )),
            }
        }

        let requests: Vec<PushRequest> = push_requests.iter().map(|(_, r)| r.clone()).collect();
        let outcome = ca::staged_allocation(&requests, &mut self.providers, now, &self.config.ca, &mut self.rng);
        for ((ci, _), assignment) in push_requests.iter().zip(&outcome.assignments) {
            match assignment.served_by {
                Some((pi, level)) => {
                    let ug = self.serve(*ci, pi, now);
                    self.settle(pi, level, ug);
                    records.push(self.finish(*ci, Mode::Push, Some(ug)));
                }
                None => records.push(self.finish(*ci, Mode::Push, None)),
            }
        }

        self.end_of_round(now);
        Ok(records)
    }

    fn provider_index(&self, id: AgentId) -> usize {
        self.providers
            .iter()
            .position(|p| p.id == id)
            .expect("chosen provider exists this round")
    }

    /// Delivers one service and records ratings on both sides.
    fn serve(&mut self, ci: usize, pi: usize, now: u32) -> f64 {
        let p = &self.providers[pi];
        let raw = population::raw_performance(&p.profile, &mut self.rng);
        let dist = world::distance(&self.consumers[ci].coord, &p.coord);
        let ug = population::delivered_quality(raw, dist, p.r_o, self.config.env.degradation_slope);
        let c = &mut self.consumers[ci];
        let p = &mut self.providers[pi];
        fire::record_interaction(&mut c.rating_db, &mut p.certified_store, c.id, p.id, ug, now);
        ug
    }

    fn settle(&mut self, pi: usize, level: PerformanceLevel, ug: f64) {
        ca::settle_task(&mut self.providers[pi].ca_connections, level, ug, &self.config.ca);
    }

    fn finish(&mut self, ci: usize, mode: Mode, ug: Option<f64>) -> InteractionRecord {
        let c = &mut self.consumers[ci];
        if let Some(l) = c.learner.as_mut() {
            l.reward(ug.unwrap_or(0.0));
        }
        if ug.is_some() {
            c.interactions += 1;
        }
        debug_assert!(ug.is_none_or(|u| (UG_MIN..=UG_MAX).contains(&u)));
        InteractionRecord {
            run: self.run,
            round: self.round,
            consumer: c.id,
            group: c.group,
            interaction_index: if ug.is_some() { c.interactions } else { c.interactions + 1 },
            model_used: mode,
            ug: ug.unwrap_or(0.0),
            served: ug.is_some(),
        }
    }

    fn end_of_round(&mut self, now: u32) {
        let d = self.config.env.dynamics_at(now);
        let n_consumers = self.consumers.len();
        let n_providers = self.providers.len();

        if d.p_cpc > 0.0 {
            let mut consumers = std::mem::take(&mut self.consumers);
            let mut newcomers = Vec::new();
            let replaced = population::churn(&mut consumers, d.p_cpc, &mut self.rng, |old, _| {
                newcomers.push(old.group);
                old.clone()
            });
            for (i, group) in replaced.into_iter().zip(newcomers) {
                consumers[i] = self.new_consumer(group);
            }
            self.consumers = consumers;
        }

        if d.p_ppc > 0.0 {
            let mut providers = std::mem::take(&mut self.providers);
            let mut kinds = Vec::new();
            let replaced = population::churn(&mut providers, d.p_ppc, &mut self.rng, |old, _| {
                kinds.push(old.profile.kind);
                old.clone()
            });
            let r_o = self.config.env.radius_of_operation;
            let churned = !replaced.is_empty();
            for (i, kind) in replaced.into_iter().zip(kinds) {
                let id = self.fresh_id();
                providers[i] = population::spawn_provider(id, kind, r_o, self.config.fire.h, &mut self.rng);
            }
            self.providers = providers;
            if churned {
                let live: std::collections::HashSet<AgentId> = self.providers.iter().map(|p| p.id).collect();
                for c in &mut self.consumers {
                    c.rating_db.retain_providers(|id| live.contains(&id));
                }
            }
        }

        if d.p_clc > 0.0 {
            for c in &mut self.consumers {
                if self.rng.random_bool(d.p_clc) {
                    c.coord = world::perturb_location(&c.coord, d.delta_phi_max, &mut self.rng);
                }
            }
        }
        if d.p_plc > 0.0 {
            for p in &mut self.providers {
                if self.rng.random_bool(d.p_plc) {
                    p.coord = world::perturb_location(&p.coord, d.delta_phi_max, &mut self.rng);
                }
            }
        }
        if d.p_mu_c > 0.0 {
            for p in &mut self.providers {
                population::drift_performance(p, d.p_mu_c, d.m, &mut self.rng);
            }
        }
        if d.p_profile_switch > 0.0 {
            for p in &mut self.providers {
                population::switch_profile(p, d.p_profile_switch, &mut self.rng);
            }
        }

        assert_eq!(self.consumers.len(), n_consumers, "consumer count changed");
        assert_eq!(self.providers.len(), n_providers, "provider count changed");
    }
}

/// Builds the initial populations and runs every round.
pub fn run_simulation(config: &SimConfig, seed: u64, run: u32) -> Result<RunLog, SimError> {
    let mut sim = Simulation::new(config.clone(), seed, run)?;
    let rounds = sim.config.env.rounds;
    let mut records = Vec::new();
    let mut census = Vec::with_capacity(rounds as usize);
    for _ in 0..rounds {
        records.extend(sim.run_round()?);
        census.push(sim.census());
    }
    Ok(RunLog {
        run,
        seed,
        records,
        census,
    })
}
