//! The FIRE trust model (pull): interaction trust, witness reputation,
//! role-based trust and certified reputation, combined by reliability-weighted
//! means, and the provider selection built on top of them.

mod store;
mod witness;

use std::collections::BTreeMap;

use rand::Rng;

pub use store::{CertifiedStore, LocalRatingDb, Rating};
pub use witness::{witness_reputation, WitnessNetwork, WitnessReport};

use crate::population::Provider;
use crate::AgentId;

#[derive(Debug, Clone, PartialEq)]
pub struct FireParams {
    /// Local rating history size, also the certified store size.
    pub h: usize,
    pub lambda: f64,
    pub n_bf: usize,
    pub n_rl: usize,
    pub w_i: f64,
    pub w_r: f64,
    pub w_w: f64,
    pub w_c: f64,
    pub gamma_i: f64,
    pub gamma_r: f64,
    pub gamma_w: f64,
    pub gamma_c: f64,
    /// Probability of trying an unknown provider when one is nearby.
    pub p_explore: f64,
}

impl Default for FireParams {
    fn default() -> Self {
        let ln_half = 0.5f64.ln();
        FireParams {
            h: 10,
            lambda: -(5.0 / ln_half),
            n_bf: 2,
            n_rl: 5,
            w_i: 2.0,
            w_r: 2.0,
            w_w: 1.0,
            w_c: 0.5,
            gamma_i: -ln_half,
            gamma_r: -ln_half,
            gamma_w: -ln_half,
            gamma_c: -ln_half,
            p_explore: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComponentResult {
    pub trust: f64,
    pub reliability: f64,
    pub available: bool,
}

impl ComponentResult {
    pub const UNAVAILABLE: ComponentResult = ComponentResult {
        trust: 0.0,
        reliability: 0.0,
        available: false,
    };

    pub fn new(trust: f64, reliability: f64) -> Self {
        ComponentResult {
            trust,
            reliability,
            available: true,
        }
    }
}

pub fn recency_weight(delta_t: f64, lambda: f64) -> f64 {
    (-delta_t.max(0.0) / lambda).exp()
}

/// Recency-weighted mean of rating values, with the product of rating
/// reliability (how much weighted evidence there is) and deviation
/// reliability (how consistent it is).
pub fn component_trust<'a, I>(ratings: I, now: u32, lambda: f64, gamma: f64) -> ComponentResult
where
    I: IntoIterator<Item = &'a Rating>,
    I::IntoIter: Clone,
{
    let it = ratings.into_iter();
    let weight = |r: &Rating| recency_weight(now.saturating_sub(r.round) as f64, lambda);
    let (mut sum_w, mut sum_wv) = (0.0, 0.0);
    for r in it.clone() {
        let w = weight(r);
        sum_w += w;
        sum_wv += w * r.value;
    }
    if sum_w <= 0.0 {
        return ComponentResult::UNAVAILABLE;
    }
    let trust = sum_wv / sum_w;
    let dev: f64 = it.map(|r| weight(r) * (r.value - trust).abs()).sum::<f64>() / sum_w;
    let rho_r = 1.0 - (-gamma * sum_w).exp();
    let rho_d = (1.0 - dev / 2.0).clamp(0.0, 1.0);
    ComponentResult::new(trust, rho_r * rho_d)
}

pub fn interaction_trust(db: &LocalRatingDb, provider: AgentId, now: u32, params: &FireParams) -> ComponentResult {
    match db.ratings_for(provider) {
        Some(q) => component_trust(q.iter(), now, params.lambda, params.gamma_i),
        None => ComponentResult::UNAVAILABLE,
    }
}

pub fn certified_reputation(store: &CertifiedStore, now: u32, params: &FireParams) -> ComponentResult {
    component_trust(store.ratings().iter(), now, params.lambda, params.gamma_c)
}

/// Role rules mapping a provider to a fixed trust value and reliability.
/// No rules exist in the standard testbed.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RoleTable {
    rules: BTreeMap<AgentId, (f64, f64)>,
}

impl RoleTable {
    pub fn insert(&mut self, provider: AgentId, trust: f64, reliability: f64) {
        self.rules.insert(provider, (trust, reliability));
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }
}

pub fn role_based_trust(roles: &RoleTable, _evaluator: AgentId, provider: AgentId) -> ComponentResult {
    match roles.rules.get(&provider) {
        Some(&(t, r)) => ComponentResult::new(t, r),
        None => ComponentResult::UNAVAILABLE,
    }
}

/// Component slots, in the order interaction, role, witness, certified.
pub const IT: usize = 0;
pub const RT: usize = 1;
pub const WR: usize = 2;
pub const CR: usize = 3;

pub fn overall_trust(components: &[ComponentResult; 4], params: &FireParams) -> ComponentResult {
    let coeffs = [params.w_i, params.w_r, params.w_w, params.w_c];
    let (mut num, mut den, mut w_sum) = (0.0, 0.0, 0.0);
    for (c, w) in components.iter().zip(coeffs) {
        if !c.available {
            continue;
        }
        num += w * c.reliability * c.trust;
        den += w * c.reliability;
        w_sum += w;
    }
    if den <= 0.0 || w_sum <= 0.0 {
        return ComponentResult::UNAVAILABLE;
    }
    ComponentResult::new(num / den, den / w_sum)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProviderAssessment {
    pub provider: AgentId,
    pub components: [ComponentResult; 4],
    pub overall: ComponentResult,
}

impl ProviderAssessment {
    /// Trust determined by certified ratings alone.
    pub fn certified_only(&self) -> bool {
        self.overall.available
            && self.components[CR].available
            && !self.components[IT].available
            && !self.components[RT].available
            && !self.components[WR].available
    }
}

/// FIRE evaluation of every nearby provider, plus the witness-query
/// bookkeeping the adaptable consumer's features consume.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrustAssessment {
    pub entries: Vec<ProviderAssessment>,
    /// Direct witness queries made this round across all providers:
    /// acquaintance and whether it returned ratings for any query.
    pub witnesses: BTreeMap<AgentId, bool>,
}

impl TrustAssessment {
    pub fn nearby(&self) -> impl Iterator<Item = AgentId> + '_ {
        self.entries.iter().map(|e| e.provider)
    }

    pub fn has_trust_value(&self) -> Vec<AgentId> {
        self.entries.iter().filter(|e| e.overall.available).map(|e| e.provider).collect()
    }

    pub fn no_trust_value(&self) -> Vec<AgentId> {
        self.entries.iter().filter(|e| !e.overall.available).map(|e| e.provider).collect()
    }

    pub fn certified_only(&self) -> Vec<AgentId> {
        self.entries.iter().filter(|e| e.certified_only()).map(|e| e.provider).collect()
    }

    pub fn trust_of(&self, provider: AgentId) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| e.provider == provider)
            .filter(|e| e.overall.available)
            .map(|e| e.overall.trust)
    }
}

/// Steps 1 and 2 of provider selection: evaluate and partition.
#[allow(clippy::too_many_arguments)]
pub fn assess_providers<N, R>(
    evaluator: AgentId,
    db: &LocalRatingDb,
    nearby: &[&Provider],
    network: &N,
    roles: &RoleTable,
    now: u32,
    params: &FireParams,
    rng: &mut R,
) -> TrustAssessment
where
    N: WitnessNetwork + ?Sized,
    R: Rng + ?Sized,
{
    let mut out = TrustAssessment::default();
    for p in nearby {
        let it = interaction_trust(db, p.id, now, params);
        let rt = role_based_trust(roles, evaluator, p.id);
        let wr = witness_reputation(evaluator, p.id, network, now, params, rng);
        for (w, responded) in &wr.first_hop {
            *out.witnesses.entry(*w).or_insert(false) |= *responded;
        }
        let cr = certified_reputation(&p.certified_store, now, params);
        let components = [it, rt, wr.result, cr];
        out.entries.push(ProviderAssessment {
            provider: p.id,
            components,
            overall: overall_trust(&components, params),
        });
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Choice {
    pub provider: AgentId,
    /// Overall trust at selection time, if the provider had one.
    pub trust: Option<f64>,
    pub explored: bool,
}

/// Steps 3 and 4: explore an unknown provider with probability `p_explore`,
/// otherwise take the most trusted one (ties broken uniformly).
pub fn choose_provider<R: Rng + ?Sized>(assessment: &TrustAssessment, p_explore: f64, rng: &mut R) -> Option<Choice> {
    let unknown = assessment.no_trust_value();
    let known: Vec<&ProviderAssessment> = assessment.entries.iter().filter(|e| e.overall.available).collect();
    let explore = !unknown.is_empty() && (known.is_empty() || (p_explore > 0.0 && rng.random_bool(p_explore.min(1.0))));
    if explore {
        let provider = unknown[rng.random_range(0..unknown.len())];
        return Some(Choice {
            provider,
            trust: None,
            explored: true,
        });
    }
    let best = known.iter().map(|e| e.overall.trust).fold(f64::NEG_INFINITY, f64::max);
    let top: Vec<&&ProviderAssessment> = known.iter().filter(|e| e.overall.trust == best).collect();
    if top.is_empty() {
        return None;
    }
    let pick = if top.len() == 1 { top[0] } else { top[rng.random_range(0..top.len())] };
    Some(Choice {
        provider: pick.provider,
        trust: Some(pick.overall.trust),
        explored: false,
    })
}

/// Full four-step selection. Returns the choice along with the assessment,
/// whose partition feeds the provider-population features.
#[allow(clippy::too_many_arguments)]
pub fn select_provider<N, R>(
    evaluator: AgentId,
    db: &LocalRatingDb,
    nearby: &[&Provider],
    network: &N,
    roles: &RoleTable,
    now: u32,
    params: &FireParams,
    rng: &mut R,
) -> (Option<Choice>, TrustAssessment)
where
    N: WitnessNetwork + ?Sized,
    R: Rng + ?Sized,
{
    let assessment = assess_providers(evaluator, db, nearby, network, roles, now, params, rng);
    let choice = choose_provider(&assessment, params.p_explore, rng);
    (choice, assessment)
}

/// Stores the consumer's rating and offers a certified copy to the provider.
pub fn record_interaction(db: &mut LocalRatingDb, store: &mut CertifiedStore, consumer: AgentId, provider: AgentId, ug: f64, round: u32) -> Rating {
    let rating = Rating::from_ug(consumer, provider, round, ug);
    db.insert(rating);
    store.offer(rating);
    rating
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rating(round: u32, value: f64) -> Rating {
        Rating {
            consumer: AgentId(1),
            provider: AgentId(2),
            round,
            value,
        }
    }

    #[test]
    fn recency_half_life() {
        let p = FireParams::default();
        assert_eq!(recency_weight(0.0, p.lambda), 1.0);
        assert!((recency_weight(5.0, p.lambda) - 0.5).abs() < 1e-12);
        assert!((recency_weight(10.0, p.lambda) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn single_rating_closed_form() {
        let p = FireParams::default();
        let r = [rating(4, 1.0)];
        let c = component_trust(r.iter(), 4, p.lambda, p.gamma_i);
        assert!(c.available);
        assert!((c.trust - 1.0).abs() < 1e-12);
        assert!((c.reliability - 0.5).abs() < 1e-12);
    }

    #[test]
    fn opposite_ratings() {
        let p = FireParams::default();
        let r = [rating(3, 1.0), rating(3, -1.0)];
        let c = component_trust(r.iter(), 3, p.lambda, p.gamma_i);
        assert!(c.trust.abs() < 1e-12);
        // rho_r = 1 - 0.5^2, rho_d = 0.5
        assert!((c.reliability - 0.75 * 0.5).abs() < 1e-12);
    }

    #[test]
    fn equal_ratings_have_no_deviation() {
        let p = FireParams::default();
        let r: Vec<Rating> = (0..5).map(|t| rating(t, -0.3)).collect();
        let c = component_trust(r.iter(), 6, p.lambda, p.gamma_w);
        assert!((c.trust + 0.3).abs() < 1e-12);
        let sum_w: f64 = (0..5).map(|t| recency_weight((6 - t) as f64, p.lambda)).sum();
        assert!((c.reliability - (1.0 - (-p.gamma_w * sum_w).exp())).abs() < 1e-12);
    }

    #[test]
    fn empty_components_unavailable() {
        let p = FireParams::default();
        assert!(!component_trust(std::iter::empty(), 1, p.lambda, p.gamma_i).available);
        assert!(!interaction_trust(&LocalRatingDb::new(10), AgentId(3), 1, &p).available);
        assert!(!certified_reputation(&CertifiedStore::new(10), 1, &p).available);
        assert!(!role_based_trust(&RoleTable::default(), AgentId(1), AgentId(2)).available);
    }

    #[test]
    fn interaction_trust_uses_db_contents() {
        let p = FireParams::default();
        let mut db = LocalRatingDb::new(10);
        for t in 0..15 {
            db.insert(rating(t, if t < 5 { -1.0 } else { 0.5 }));
        }
        let it = interaction_trust(&db, AgentId(2), 15, &p);
        let direct = component_trust(db.ratings_for(AgentId(2)).unwrap().iter(), 15, p.lambda, p.gamma_i);
        assert_eq!(it, direct);
        // the five -1.0 ratings were evicted
        assert!((it.trust - 0.5).abs() < 1e-12);
    }

    #[test]
    fn overall_passthrough_and_mix() {
        let p = FireParams::default();
        let u = ComponentResult::UNAVAILABLE;
        let only_it = overall_trust(&[ComponentResult::new(0.8, 0.5), u, u, u], &p);
        assert!((only_it.trust - 0.8).abs() < 1e-12);
        assert!(!overall_trust(&[u; 4], &p).available);
        let mix = overall_trust(&[ComponentResult::new(1.0, 1.0), u, u, ComponentResult::new(0.0, 1.0)], &p);
        assert!((mix.trust - 0.8).abs() < 1e-12);
        let zero_rel = overall_trust(&[ComponentResult::new(0.3, 0.0), u, u, u], &p);
        assert!(!zero_rel.available);
    }

    #[test]
    fn role_rule_flows_into_overall() {
        let p = FireParams::default();
        let mut roles = RoleTable::default();
        roles.insert(AgentId(2), -0.4, 1.0);
        let rt = role_based_trust(&roles, AgentId(1), AgentId(2));
        let u = ComponentResult::UNAVAILABLE;
        let comps = [ComponentResult::new(0.6, 1.0), rt, u, u];
        let o = overall_trust(&comps, &p);
        // (2*0.6 + 2*(-0.4)) / 4
        assert!((o.trust - 0.1).abs() < 1e-12);
    }

    fn assessment(entries: &[(u64, Option<f64>)]) -> TrustAssessment {
        TrustAssessment {
            entries: entries
                .iter()
                .map(|&(id, t)| {
                    let overall = t.map(|t| ComponentResult::new(t, 0.5)).unwrap_or(ComponentResult::UNAVAILABLE);
                    ProviderAssessment {
                        provider: AgentId(id),
                        components: [overall, ComponentResult::UNAVAILABLE, ComponentResult::UNAVAILABLE, ComponentResult::UNAVAILABLE],
                        overall,
                    }
                })
                .collect(),
            witnesses: BTreeMap::new(),
        }
    }

    #[test]
    fn choose_edge_cases() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
        assert_eq!(choose_provider(&assessment(&[]), 0.1, &mut rng), None);
        let a = assessment(&[(1, Some(0.2)), (2, Some(0.9))]);
        assert_eq!(choose_provider(&a, 0.0, &mut rng).unwrap().provider, AgentId(2));
        let b = assessment(&[(1, Some(0.2)), (2, None), (3, None)]);
        for _ in 0..50 {
            let c = choose_provider(&b, 1.0, &mut rng).unwrap();
            assert!(c.explored);
            assert!(c.provider == AgentId(2) || c.provider == AgentId(3));
        }
    }

    #[test]
    fn record_normalizes_and_offers() {
        let mut db = LocalRatingDb::new(10);
        let mut store = CertifiedStore::new(10);
        let r = record_interaction(&mut db, &mut store, AgentId(1), AgentId(2), 7.0, 3);
        assert!((r.value - 0.7).abs() < 1e-15);
        assert_eq!(db.len(), 1);
        assert_eq!(store.len(), 1);
    }

    proptest! {
        #[test]
        fn trust_within_rating_range(vals in prop::collection::vec((-1.0f64..=1.0, 0u32..30), 1..20), now in 30u32..60) {
            let rs: Vec<Rating> = vals.iter().map(|&(v, t)| rating(t, v)).collect();
            let p = FireParams::default();
            let c = component_trust(rs.iter(), now, p.lambda, p.gamma_i);
            let lo = vals.iter().map(|v| v.0).fold(f64::INFINITY, f64::min);
            let hi = vals.iter().map(|v| v.0).fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(c.trust >= lo - 1e-12 && c.trust <= hi + 1e-12);
            prop_assert!((0.0..=1.0).contains(&c.reliability));
        }

        #[test]
        fn recency_monotone(a in 0.0f64..100.0, b in 0.0f64..100.0) {
            let l = FireParams::default().lambda;
            let (near, far) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(recency_weight(far, l) <= recency_weight(near, l));
        }

        #[test]
        fn overall_matches_weighted_mean(
            comps in prop::collection::vec((any::<bool>(), -1.0f64..=1.0, 0.0f64..=1.0), 4)
        ) {
            let p = FireParams::default();
            let arr: [ComponentResult; 4] = std::array::from_fn(|i| {
                let (avail, t, r) = comps[i];
                if avail { ComponentResult::new(t, r) } else { ComponentResult::UNAVAILABLE }
            });
            let w = [p.w_i, p.w_r, p.w_w, p.w_c];
            let mut num = 0.0;
            let mut den = 0.0;
            for i in 0..4 {
                if arr[i].available {
                    num += w[i] * arr[i].reliability * arr[i].trust;
                    den += w[i] * arr[i].reliability;
                }
            }
            let o = overall_trust(&arr, &p);
            if den > 0.0 {
                prop_assert!(o.available);
                prop_assert!((o.trust - num / den).abs() < 1e-12);
            } else {
                prop_assert!(!o.available);
            }
        }

        #[test]
        fn argmax_invariant_under_monotone_map(ts in prop::collection::vec(-1.0f64..=1.0, 1..10), seed in 0u64..1000) {
            use rand::SeedableRng;
            let base: Vec<(u64, Option<f64>)> = ts.iter().enumerate().map(|(i, t)| (i as u64, Some(*t))).collect();
            let mapped: Vec<(u64, Option<f64>)> = ts.iter().enumerate().map(|(i, t)| (i as u64, Some((3.0 * t).exp()))).collect();
            let a = choose_provider(&assessment(&base), 0.0, &mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let b = choose_provider(&assessment(&mapped), 0.0, &mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            prop_assert_eq!(a.map(|c| c.provider), b.map(|c| c.provider));
        }
    }
}
