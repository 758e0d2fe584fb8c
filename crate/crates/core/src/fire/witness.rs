//! Referral-chain search for witness ratings.

use std::collections::{BTreeSet, VecDeque};

use rand::seq::index;
use rand::Rng;

use super::{component_trust, ComponentResult, FireParams, Rating};
use crate::AgentId;

/// What the evaluator can reach: each consumer's acquaintances and the local
/// rating histories they are willing to return.
pub trait WitnessNetwork {
    fn acquaintances(&self, consumer: AgentId) -> &[AgentId];
    fn ratings_for(&self, witness: AgentId, provider: AgentId) -> Option<&VecDeque<Rating>>;

    /// Unvisited acquaintances of `consumer` worth asking about `provider`:
    /// those holding a rating for it if any do, otherwise all of them.
    fn referral_pool(&self, consumer: AgentId, provider: AgentId, visited: &BTreeSet<AgentId>) -> Vec<AgentId> {
        let fresh: Vec<AgentId> = self
            .acquaintances(consumer)
            .iter()
            .copied()
            .filter(|c| !visited.contains(c))
            .collect();
        let holders: Vec<AgentId> = fresh
            .iter()
            .copied()
            .filter(|c| self.ratings_for(*c, provider).is_some())
            .collect();
        if holders.is_empty() {
            fresh
        } else {
            holders
        }
    }
}

/// Outcome of one witness-reputation evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessReport {
    pub result: ComponentResult,
    /// The evaluator's own acquaintances queried directly, with whether each
    /// returned any rating.
    pub first_hop: Vec<(AgentId, bool)>,
    /// Every consumer queried, at any depth.
    pub queried: usize,
    /// Deepest hop reached (1 = the evaluator's acquaintances).
    pub depth: usize,
}

pub fn witness_reputation<N, R>(
    evaluator: AgentId,
    provider: AgentId,
    network: &N,
    now: u32,
    params: &FireParams,
    rng: &mut R,
) -> WitnessReport
where
    N: WitnessNetwork + ?Sized,
    R: Rng + ?Sized,
{
    let mut visited = BTreeSet::new();
    visited.insert(evaluator);
    let mut frontier = pick_witnesses(evaluator, provider, network, &visited, params.n_bf, rng);
    let mut collected: Vec<Rating> = Vec::new();
    let mut first_hop = Vec::new();
    let mut queried = 0;
    let mut depth = 0;

    while !frontier.is_empty() && depth < params.n_rl {
        depth += 1;
        let mut next = Vec::new();
        for w in frontier {
            if !visited.insert(w) {
                continue;
            }
            queried += 1;
            let found = network.ratings_for(w, provider);
            let responded = found.is_some();
            if depth == 1 {
                first_hop.push((w, responded));
            }
            match found {
                Some(rs) => collected.extend(rs.iter().filter(|r| r.consumer != evaluator)),
                None => {
                    // referrals to the witness's own acquaintances
                    let refs = pick_witnesses(w, provider, network, &visited, params.n_bf, rng);
                    next.extend(refs);
                }
            }
        }
        next.sort_unstable();
        next.dedup();
        frontier = next;
    }

    let result = component_trust(collected.iter(), now, params.lambda, params.gamma_w);
    WitnessReport {
        result,
        first_hop,
        queried,
        depth,
    }
}

/// Up to `n` unvisited acquaintances of `consumer`, preferring those holding a rating for the
/// target provider.
fn pick_witnesses<N, R>(
    consumer: AgentId,
    provider: AgentId,
    network: &N,
    visited: &BTreeSet<AgentId>,
    n: usize,
    rng: &mut R,
) -> Vec<AgentId>
where
    N: WitnessNetwork + ?Sized,
    R: Rng + ?Sized,
{
    let pool = network.referral_pool(consumer, provider, visited);
    if pool.len() <= n {
        return pool;
    }
    let mut picked: Vec<usize> = index::sample(rng, pool.len(), n).into_vec();
    picked.sort_unstable();
    picked.into_iter().map(|i| pool[i]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fire::LocalRatingDb;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeMap;

    #[derive(Default)]
    struct Net {
        acq: BTreeMap<AgentId, Vec<AgentId>>,
        dbs: BTreeMap<AgentId, LocalRatingDb>,
    }

    impl WitnessNetwork for Net {
        fn acquaintances(&self, c: AgentId) -> &[AgentId] {
            self.acq.get(&c).map(Vec::as_slice).unwrap_or(&[])
        }
        fn ratings_for(&self, w: AgentId, p: AgentId) -> Option<&VecDeque<Rating>> {
            self.dbs.get(&w).and_then(|db| db.ratings_for(p))
        }
    }

    const PROVIDER: AgentId = AgentId(1000);

    fn rate(net: &mut Net, who: u64, value: f64) {
        net.dbs
            .entry(AgentId(who))
            .or_insert_with(|| LocalRatingDb::new(10))
            .insert(Rating { consumer: AgentId(who), provider: PROVIDER, round: 1, value });
    }

    #[test]
    fn no_acquaintances_unavailable() {
        let net = Net::default();
        let rep = witness_reputation(AgentId(0), PROVIDER, &net, 1, &FireParams::default(), &mut ChaCha8Rng::seed_from_u64(0));
        assert!(!rep.result.available);
        assert_eq!(rep.queried, 0);
    }

    #[test]
    fn newcomer_witnesses_return_nothing() {
        let mut net = Net::default();
        net.acq.insert(AgentId(0), vec![AgentId(1), AgentId(2), AgentId(3)]);
        let rep = witness_reputation(AgentId(0), PROVIDER, &net, 1, &FireParams::default(), &mut ChaCha8Rng::seed_from_u64(0));
        assert!(!rep.result.available);
        assert_eq!(rep.first_hop.len(), 2);
        assert!(rep.first_hop.iter().all(|(_, ok)| !ok));
    }

    #[test]
    fn prefers_holders() {
        let mut net = Net::default();
        net.acq.insert(AgentId(0), (1..=10).map(AgentId).collect());
        rate(&mut net, 7, 0.6);
        let rep = witness_reputation(AgentId(0), PROVIDER, &net, 1, &FireParams::default(), &mut ChaCha8Rng::seed_from_u64(3));
        assert_eq!(rep.first_hop, vec![(AgentId(7), true)]);
        assert!(rep.result.available);
        assert!((rep.result.trust - 0.6).abs() < 1e-12);
    }

    #[test]
    fn chain_bounded_by_referral_length() {
        // a line 0 -> 1 -> 2 -> ... -> 20, rating only at 20
        let mut net = Net::default();
        for i in 0..20u64 {
            net.acq.insert(AgentId(i), vec![AgentId(i + 1)]);
        }
        rate(&mut net, 20, 1.0);
        let params = FireParams::default();
        let rep = witness_reputation(AgentId(0), PROVIDER, &net, 1, &params, &mut ChaCha8Rng::seed_from_u64(0));
        assert!(rep.depth <= params.n_rl);
        assert_eq!(rep.queried, params.n_rl);
        assert!(!rep.result.available);

        // within reach
        let mut near = Net::default();
        for i in 0..4u64 {
            near.acq.insert(AgentId(i), vec![AgentId(i + 1)]);
        }
        rate(&mut near, 4, -0.5);
        let rep = witness_reputation(AgentId(0), PROVIDER, &near, 1, &params, &mut ChaCha8Rng::seed_from_u64(0));
        assert_eq!(rep.depth, 4);
        assert!((rep.result.trust + 0.5).abs() < 1e-12);
    }

    #[test]
    fn cycles_terminate() {
        let mut net = Net::default();
        for i in 0..6u64 {
            net.acq.insert(AgentId(i), vec![AgentId((i + 1) % 6), AgentId((i + 5) % 6)]);
        }
        let rep = witness_reputation(AgentId(0), PROVIDER, &net, 1, &FireParams::default(), &mut ChaCha8Rng::seed_from_u64(0));
        assert!(rep.queried <= 5);
    }
}
