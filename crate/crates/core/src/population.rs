//! Providers, consumers and the population-level dynamics applied to them:
//! churn, performance drift and profile switching.

use rand::seq::index;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::ca::{ConnectionWeights, RequestMessage};
use crate::dqn::{Hyperparams, Learner};
use crate::features::ObservationCache;
use crate::fire::{CertifiedStore, LocalRatingDb};
use crate::world::{self, PolarCoord};
use crate::{AgentId, Group};

/// Utility gain is always reported inside this interval.
pub const UG_MIN: f64 = -10.0;
pub const UG_MAX: f64 = 10.0;

/// Default loss of quality per world unit a consumer sits outside the
/// provider's radius of operation.
pub const DEFAULT_DEGRADATION_SLOPE: f64 = 5.0;

pub const ACTIVITY_RANGE: (f64, f64) = (0.25, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PerformanceLevel {
    Perfect,
    Good,
    Ok,
    Bad,
    Worst,
}

impl PerformanceLevel {
    pub const ALL: [PerformanceLevel; 5] = [
        PerformanceLevel::Perfect,
        PerformanceLevel::Good,
        PerformanceLevel::Ok,
        PerformanceLevel::Bad,
        PerformanceLevel::Worst,
    ];

    pub fn utility(self) -> f64 {
        match self {
            PerformanceLevel::Perfect => 10.0,
            PerformanceLevel::Good => 5.0,
            PerformanceLevel::Ok => 0.0,
            PerformanceLevel::Bad => -5.0,
            PerformanceLevel::Worst => -10.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PerformanceLevel::Perfect => "PERFECT",
            PerformanceLevel::Good => "GOOD",
            PerformanceLevel::Ok => "OK",
            PerformanceLevel::Bad => "BAD",
            PerformanceLevel::Worst => "WORST",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// The next lower level, or `None` below WORST.
    pub fn lower(self) -> Option<PerformanceLevel> {
        PerformanceLevel::ALL.get(self.index() + 1).copied()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ProviderKind {
    Good,
    Ordinary,
    Bad,
    Intermittent,
}

impl ProviderKind {
    pub const ALL: [ProviderKind; 4] = [
        ProviderKind::Good,
        ProviderKind::Ordinary,
        ProviderKind::Bad,
        ProviderKind::Intermittent,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProviderKind::Good => "good",
            ProviderKind::Ordinary => "ordinary",
            ProviderKind::Bad => "bad",
            ProviderKind::Intermittent => "intermittent",
        }
    }

    /// Range of the mean performance and the standard deviation, for the
    /// normally distributed kinds.
    pub fn mean_range(self) -> Option<((f64, f64), f64)> {
        use PerformanceLevel as L;
        match self {
            ProviderKind::Good => Some(((L::Good.utility(), L::Perfect.utility()), 1.0)),
            ProviderKind::Ordinary => Some(((L::Ok.utility(), L::Good.utility()), 2.0)),
            ProviderKind::Bad => Some(((L::Worst.utility(), L::Ok.utility()), 2.0)),
            ProviderKind::Intermittent => None,
        }
    }
}

/// How a provider's raw performance is drawn.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Performance {
    Normal { mean: f64, std_dev: f64 },
    /// Intermittent providers: uniform between PL_BAD and PL_GOOD.
    Uniform { low: f64, high: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProviderProfile {
    pub kind: ProviderKind,
    pub performance: Performance,
}

impl ProviderProfile {
    pub fn draw<R: Rng + ?Sized>(kind: ProviderKind, rng: &mut R) -> Self {
        let performance = match kind.mean_range() {
            Some(((lo, hi), std_dev)) => Performance::Normal {
                mean: rng.random_range(lo..=hi),
                std_dev,
            },
            None => Performance::Uniform {
                low: PerformanceLevel::Bad.utility(),
                high: PerformanceLevel::Good.utility(),
            },
        };
        ProviderProfile { kind, performance }
    }

    /// Mean performance `mu_p`; `None` for intermittent providers.
    pub fn mu_p(&self) -> Option<f64> {
        match self.performance {
            Performance::Normal { mean, .. } => Some(mean),
            Performance::Uniform { .. } => None,
        }
    }

    pub fn sigma_p(&self) -> Option<f64> {
        match self.performance {
            Performance::Normal { std_dev, .. } => Some(std_dev),
            Performance::Uniform { .. } => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Provider {
    pub id: AgentId,
    pub coord: PolarCoord,
    pub r_o: f64,
    pub profile: ProviderProfile,
    pub certified_store: CertifiedStore,
    pub ca_connections: ConnectionWeights,
    /// Requests received during the current round.
    pub inbox: Vec<RequestMessage>,
}

pub fn spawn_provider<R: Rng + ?Sized>(
    id: AgentId,
    kind: ProviderKind,
    r_o: f64,
    certified_capacity: usize,
    rng: &mut R,
) -> Provider {
    let profile = ProviderProfile::draw(kind, rng);
    Provider {
        id,
        coord: world::place_uniform(rng),
        r_o,
        profile,
        certified_store: CertifiedStore::new(certified_capacity),
        ca_connections: ConnectionWeights::default(),
        inbox: Vec::new(),
    }
}

/// One unclamped performance draw.
pub fn raw_performance<R: Rng + ?Sized>(profile: &ProviderProfile, rng: &mut R) -> f64 {
    match profile.performance {
        Performance::Normal { mean, std_dev } => {
            if std_dev <= 0.0 {
                return mean;
            }
            Normal::new(mean, std_dev)
                .expect("finite standard deviation")
                .sample(rng)
        }
        Performance::Uniform { low, high } => rng.random_range(low..=high),
    }
}

/// Quality the consumer actually receives. Inside the provider's radius of
/// operation nothing is lost; outside, quality falls linearly with the excess
/// distance. The result is clamped into `[UG_MIN, UG_MAX]`.
pub fn delivered_quality(raw: f64, dist: f64, provider_r_o: f64, slope: f64) -> f64 {
    let excess = (dist - provider_r_o).max(0.0);
    (raw - slope * excess).clamp(UG_MIN, UG_MAX)
}

#[derive(Debug, Clone)]
pub struct Consumer {
    pub id: AgentId,
    pub coord: PolarCoord,
    pub r_o: f64,
    pub activity: f64,
    pub group: Group,
    pub rating_db: LocalRatingDb,
    pub learner: Option<Learner>,
    pub observation: ObservationCache,
    /// Number of served interactions so far.
    pub interactions: u64,
}

pub fn spawn_consumer<R: Rng + ?Sized>(
    id: AgentId,
    group: Group,
    r_o: f64,
    rating_capacity: usize,
    hp: &Hyperparams,
    rng: &mut R,
) -> Consumer {
    let coord = world::place_uniform(rng);
    let activity = rng.random_range(ACTIVITY_RANGE.0..=ACTIVITY_RANGE.1);
    let learner = match group {
        Group::Adaptable => Some(Learner::new(hp.clone(), rng)),
        _ => None,
    };
    Consumer {
        id,
        coord,
        r_o,
        activity,
        group,
        rating_db: LocalRatingDb::new(rating_capacity),
        learner,
        observation: ObservationCache::new(hp.window, rating_capacity),
        interactions: 0,
    }
}

/// Replaces a random number of agents, at most `floor(p_limit * N)`, with
/// newcomers built by `replace` from the agent they stand in for. Returns the
/// replaced positions in ascending order.
pub fn churn<T, R, F>(agents: &mut [T], p_limit: f64, rng: &mut R, mut replace: F) -> Vec<usize>
where
    R: Rng + ?Sized,
    F: FnMut(&T, &mut R) -> T,
{
    let n = agents.len();
    let limit = ((p_limit.clamp(0.0, 1.0) * n as f64) + 1e-9).floor() as usize;
    if limit == 0 {
        return Vec::new();
    }
    let k = rng.random_range(0..=limit.min(n));
    let mut picked = index::sample(rng, n, k).into_vec();
    picked.sort_unstable();
    for &i in &picked {
        agents[i] = replace(&agents[i], rng);
    }
    picked
}

/// Shifts `mu_p` by a uniform amount in `[-m, m]` with probability `p_mu_c`,
/// clamped to the utility range. Intermittent providers are unaffected.
pub fn drift_performance<R: Rng + ?Sized>(p: &mut Provider, p_mu_c: f64, m: f64, rng: &mut R) {
    if p_mu_c <= 0.0 || m <= 0.0 {
        return;
    }
    if let Performance::Normal { mean, .. } = &mut p.profile.performance {
        if rng.random_bool(p_mu_c.min(1.0)) {
            let delta = rng.random_range(-m..=m);
            *mean = (*mean + delta).clamp(UG_MIN, UG_MAX);
        }
    }
}

/// With probability `p_switch` the provider adopts one of the other three
/// profiles and redraws its performance parameters. Identity, trust stores
/// and CA connections persist.
pub fn switch_profile<R: Rng + ?Sized>(p: &mut Provider, p_switch: f64, rng: &mut R) -> bool {
    if p_switch <= 0.0 || !rng.random_bool(p_switch.min(1.0)) {
        return false;
    }
    let others: Vec<ProviderKind> = ProviderKind::ALL
        .into_iter()
        .filter(|k| *k != p.profile.kind)
        .collect();
    let kind = others[rng.random_range(0..others.len())];
    p.profile = ProviderProfile::draw(kind, rng);
    true
}
