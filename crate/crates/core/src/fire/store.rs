use std::collections::{BTreeMap, VecDeque};

use crate::AgentId;

/// A consumer's rating of one interaction, normalized to `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rating {
    pub consumer: AgentId,
    pub provider: AgentId,
    pub round: u32,
    pub value: f64,
}

impl Rating {
    /// Builds a rating from a utility gain in `[-10, 10]`.
    pub fn from_ug(consumer: AgentId, provider: AgentId, round: u32, ug: f64) -> Self {
        Rating {
            consumer,
            provider,
            round,
            value: (ug / 10.0).clamp(-1.0, 1.0),
        }
    }
}

/// Per-provider histories of a consumer's own ratings. Only the most recent
/// `capacity` ratings per provider are kept.
#[derive(Debug, Clone)]
pub struct LocalRatingDb {
    capacity: usize,
    by_provider: BTreeMap<AgentId, VecDeque<Rating>>,
}

impl LocalRatingDb {
    pub fn new(capacity: usize) -> Self {
        LocalRatingDb {
            capacity,
            by_provider: BTreeMap::new(),
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn insert(&mut self, rating: Rating) {
        let q = self.by_provider.entry(rating.provider).or_default();
        q.push_back(rating);
        while q.len() > self.capacity {
            q.pop_front();
        }
    }

    pub fn ratings_for(&self, provider: AgentId) -> Option<&VecDeque<Rating>> {
        self.by_provider.get(&provider).filter(|q| !q.is_empty())
    }

    pub fn has_rating_for(&self, provider: AgentId) -> bool {
        self.ratings_for(provider).is_some()
    }

    /// Providers with at least one rating, ascending.
    pub fn providers(&self) -> impl Iterator<Item = AgentId> + '_ {
        self.by_provider.iter().filter(|(_, q)| !q.is_empty()).map(|(id, _)| *id)
    }

    pub fn is_empty(&self) -> bool {
        self.by_provider.values().all(|q| q.is_empty())
    }

    pub fn len(&self) -> usize {
        self.by_provider.values().map(VecDeque::len).sum()
    }

    /// Drops histories for providers that no longer exist.
    pub fn retain_providers<F: FnMut(AgentId) -> bool>(&mut self, mut keep: F) {
        self.by_provider.retain(|id, _| keep(*id));
    }
}

/// Certified ratings held by a provider: only its best `capacity` ratings.
#[derive(Debug, Clone, Default)]
pub struct CertifiedStore {
    capacity: usize,
    ratings: Vec<Rating>,
}

impl CertifiedStore {
    pub fn new(capacity: usize) -> Self {
        CertifiedStore {
            capacity,
            ratings: Vec::with_capacity(capacity + 1),
        }
    }

    /// Offers a rating; it is kept only if it beats the current worst when
    /// the store is full. Returns whether the store changed.
    pub fn offer(&mut self, rating: Rating) -> bool {
        if self.capacity == 0 {
            return false;
        }
        if self.ratings.len() < self.capacity {
            self.ratings.push(rating);
            return true;
        }
        let (worst_idx, worst) = self
            .ratings
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.value.total_cmp(&b.1.value).then(a.1.round.cmp(&b.1.round)))
            .map(|(i, r)| (i, r.value))
            .expect("full store is non-empty");
        if rating.value > worst {
            self.ratings[worst_idx] = rating;
            true
        } else {
            false
        }
    }

    pub fn ratings(&self) -> &[Rating] {
        &self.ratings
    }

    pub fn is_empty(&self) -> bool {
        self.ratings.is_empty()
    }

    pub fn len(&self) -> usize {
        self.ratings.len()
    }
}
