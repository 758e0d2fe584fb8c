//! State features for the adaptable consumer, computed only from what the
//! consumer can observe locally: its nearby providers, its own rating
//! database, the outcome of its FIRE evaluations, and its own location.

use std::collections::{BTreeSet, VecDeque};

use thiserror::Error;

use crate::fire::{LocalRatingDb, TrustAssessment};
use crate::world::PolarCoord;
use crate::AgentId;

pub const FEATURE_COUNT: usize = 9;

pub const FEATURE_NAMES: [&str; FEATURE_COUNT] = [
    "ProvidersPopulationDirectChangeEstimate",
    "MeanProvidersPopulationDirectChangeEstimate",
    "ProvidersPopulationIndirectChangeEstimate",
    "MeanProvidersPopulationIndirectChangeEstimate",
    "NewcomerEstimate",
    "ConsumersPopulationIndirectChangeEstimate",
    "MeanConsumersPopulationIndirectChangeEstimate",
    "ProvidersPerformanceChangeEstimate",
    "ConsumersLocationChangeEstimate",
];

/// Largest possible |trust·10 − actual| with both sides in [−10, 10].
pub const PERFORMANCE_CHANGE_MAX: f64 = 20.0;

#[derive(Debug, Error, PartialEq)]
pub enum FeatureError {
    #[error("provider {0} is partitioned but not nearby")]
    NotNearby(AgentId),
    #[error("provider {0} is both without trust value and certified-only")]
    Overlap(AgentId),
    #[error("consumer {0} reported silent but was never queried")]
    NotQueried(AgentId),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureVector(pub [f64; FEATURE_COUNT]);

impl FeatureVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Fixed-capacity FIFO.
#[derive(Debug, Clone, PartialEq)]
pub struct RollingWindow<T> {
    capacity: usize,
    items: VecDeque<T>,
}

impl<T> RollingWindow<T> {
    pub fn new(capacity: usize) -> Self {
        RollingWindow {
            capacity: capacity.max(1),
            items: VecDeque::with_capacity(capacity.max(1)),
        }
    }

    pub fn push(&mut self, item: T) {
        if self.items.len() == self.capacity {
            self.items.pop_front();
        }
        self.items.push_back(item);
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.items.iter()
    }
}

/// Share of nearby providers that were not nearby last time. With no
/// previous observation, every nearby provider counts as new.
pub fn providers_direct_change(nearby_t: &BTreeSet<AgentId>, nearby_prev: Option<&BTreeSet<AgentId>>) -> f64 {
    if nearby_t.is_empty() {
        return 0.0;
    }
    let new = match nearby_prev {
        Some(prev) => nearby_t.difference(prev).count(),
        None => nearby_t.len(),
    };
    new as f64 / nearby_t.len() as f64
}

/// Share of nearby providers whose trust is unknown or rests only on
/// certified ratings.
pub fn providers_indirect_change(
    no_trust_value: &BTreeSet<AgentId>,
    cr_only: &BTreeSet<AgentId>,
    nearby_t: &BTreeSet<AgentId>,
) -> Result<f64, FeatureError> {
    for p in no_trust_value.iter().chain(cr_only) {
        if !nearby_t.contains(p) {
            return Err(FeatureError::NotNearby(*p));
        }
    }
    if let Some(p) = no_trust_value.intersection(cr_only).next() {
        return Err(FeatureError::Overlap(*p));
    }
    if nearby_t.is_empty() {
        return Ok(0.0);
    }
    Ok((no_trust_value.len() + cr_only.len()) as f64 / nearby_t.len() as f64)
}

/// 1 when the consumer holds no rating for any nearby provider.
pub fn newcomer_estimate(db: &LocalRatingDb, nearby_t: &BTreeSet<AgentId>) -> f64 {
    if nearby_t.iter().any(|p| db.has_rating_for(*p)) {
        0.0
    } else {
        1.0
    }
}

/// Share of queried witnesses that returned no ratings for any query.
pub fn consumers_indirect_change(queried: &BTreeSet<AgentId>, returned_nothing: &BTreeSet<AgentId>) -> Result<f64, FeatureError> {
    if let Some(c) = returned_nothing.difference(queried).next() {
        return Err(FeatureError::NotQueried(*c));
    }
    if queried.is_empty() {
        return Ok(0.0);
    }
    Ok(returned_nothing.len() as f64 / queried.len() as f64)
}

/// Mean of |trust·10 − actual| over recorded (trust, actual UG) pairs.
pub fn providers_performance_change<'a, I: IntoIterator<Item = &'a (f64, f64)>>(pairs: I) -> f64 {
    let (mut n, mut sum) = (0usize, 0.0);
    for (trust, actual) in pairs {
        sum += (trust * 10.0 - actual).abs();
        n += 1;
    }
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

/// 1 if any polar coordinate differs from the previous observation.
pub fn consumers_location_change(coord_t: &PolarCoord, coord_prev: Option<&PolarCoord>) -> f64 {
    match coord_prev {
        Some(p) if p.r != coord_t.r || p.phi != coord_t.phi || p.theta != coord_t.theta => 1.0,
        _ => 0.0,
    }
}

pub fn windowed_mean(window: &RollingWindow<f64>) -> f64 {
    if window.is_empty() {
        0.0
    } else {
        window.iter().sum::<f64>() / window.len() as f64
    }
}

/// The nine raw values, before normalization.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RawFeatures {
    pub direct_change: f64,
    pub mean_direct_change: f64,
    pub indirect_change: f64,
    pub mean_indirect_change: f64,
    pub newcomer: f64,
    pub consumers_change: f64,
    pub mean_consumers_change: f64,
    /// In UG units, `[0, 20]`.
    pub performance_change: f64,
    pub location_change: f64,
}

pub fn assemble_state(raw: &RawFeatures) -> FeatureVector {
    let v = [
        raw.direct_change,
        raw.mean_direct_change,
        raw.indirect_change,
        raw.mean_indirect_change,
        raw.newcomer,
        raw.consumers_change,
        raw.mean_consumers_change,
        raw.performance_change / PERFORMANCE_CHANGE_MAX,
        raw.location_change,
    ];
    FeatureVector(v.map(|x| if x.is_nan() { 0.0 } else { x.clamp(0.0, 1.0) }))
}

/// Per-consumer bookkeeping between observations.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationCache {
    pub prev_nearby_providers: Option<BTreeSet<AgentId>>,
    pub prev_coord: Option<PolarCoord>,
    pub direct_window: RollingWindow<f64>,
    pub indirect_window: RollingWindow<f64>,
    pub consumers_window: RollingWindow<f64>,
    /// (trust at selection, delivered UG) for recent pull interactions.
    pub perf_pairs: RollingWindow<(f64, f64)>,
}

impl ObservationCache {
    pub fn new(window: usize, perf_pairs: usize) -> Self {
        ObservationCache {
            prev_nearby_providers: None,
            prev_coord: None,
            direct_window: RollingWindow::new(window),
            indirect_window: RollingWindow::new(window),
            consumers_window: RollingWindow::new(window),
            perf_pairs: RollingWindow::new(perf_pairs),
        }
    }

    /// Computes this observation's features and advances the windows.
    pub fn observe(
        &mut self,
        coord: &PolarCoord,
        db: &LocalRatingDb,
        assessment: &TrustAssessment,
    ) -> Result<FeatureVector, FeatureError> {
        let nearby: BTreeSet<AgentId> = assessment.nearby().collect();
        let no_trust: BTreeSet<AgentId> = assessment.no_trust_value().into_iter().collect();
        let cr_only: BTreeSet<AgentId> = assessment.certified_only().into_iter().collect();
        let queried: BTreeSet<AgentId> = assessment.witnesses.keys().copied().collect();
        let silent: BTreeSet<AgentId> = assessment
            .witnesses
            .iter()
            .filter(|(_, responded)| !**responded)
            .map(|(c, _)| *c)
            .collect();

        let direct = providers_direct_change(&nearby, self.prev_nearby_providers.as_ref());
        let indirect = providers_indirect_change(&no_trust, &cr_only, &nearby)?;
        let consumers = consumers_indirect_change(&queried, &silent)?;
        self.direct_window.push(direct);
        self.indirect_window.push(indirect);
        self.consumers_window.push(consumers);

        let raw = RawFeatures {
            direct_change: direct,
            mean_direct_change: windowed_mean(&self.direct_window),
            indirect_change: indirect,
            mean_indirect_change: windowed_mean(&self.indirect_window),
            newcomer: newcomer_estimate(db, &nearby),
            consumers_change: consumers,
            mean_consumers_change: windowed_mean(&self.consumers_window),
            performance_change: providers_performance_change(self.perf_pairs.iter()),
            location_change: consumers_location_change(coord, self.prev_coord.as_ref()),
        };
        self.prev_nearby_providers = Some(nearby);
        self.prev_coord = Some(*coord);
        Ok(assemble_state(&raw))
    }

    pub fn record_performance(&mut self, trust: f64, actual_ug: f64) {
        self.perf_pairs.push((trust, actual_ug));
    }
}
