//! Geometry of the spherical world.
//!
//! Agents live inside the solid ball of radius [`WORLD_RADIUS`]. Locations are
//! kept in canonical polar form (`phi` in `[0, 2π)`, `theta` in `[0, π]`) and
//! distances are straight-line distances between the Cartesian images.

use std::f64::consts::{PI, TAU};

use rand::Rng;

use crate::AgentId;

pub const WORLD_RADIUS: f64 = 1.0;

/// Default radius of operation for every agent.
pub const DEFAULT_RADIUS_OF_OPERATION: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarCoord {
    pub r: f64,
    pub phi: f64,
    pub theta: f64,
}

impl PolarCoord {
    /// Builds a coordinate and brings the angles into canonical ranges.
    pub fn new(r: f64, phi: f64, theta: f64) -> Self {
        let mut c = PolarCoord {
            r: r.clamp(0.0, WORLD_RADIUS),
            phi,
            theta,
        };
        c.normalize();
        c
    }

    pub fn to_cartesian(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [self.r * st * cp, self.r * st * sp, self.r * ct]
    }

    /// Reflects theta at the poles (flipping phi by π) and wraps phi.
    fn normalize(&mut self) {
        let mut theta = self.theta.rem_euclid(TAU);
        let mut phi = self.phi;
        if theta > PI {
            theta = TAU - theta;
            phi += PI;
        }
        self.theta = theta;
        self.phi = phi.rem_euclid(TAU);
        // rem_euclid can round up to exactly TAU for tiny negative inputs
        if self.phi >= TAU {
            self.phi = 0.0;
        }
    }
}

/// Volume-uniform point in the ball.
pub fn place_uniform<R: Rng + ?Sized>(rng: &mut R) -> PolarCoord {
    let r = WORLD_RADIUS * rng.random::<f64>().cbrt();
    let phi = rng.random::<f64>() * TAU;
    let theta = (1.0 - 2.0 * rng.random::<f64>()).clamp(-1.0, 1.0).acos();
    PolarCoord::new(r, phi, theta)
}

pub fn distance(a: &PolarCoord, b: &PolarCoord) -> f64 {
    cartesian_distance(&a.to_cartesian(), &b.to_cartesian())
}

pub fn cartesian_distance(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    (dx * dx + dy * dy + dz * dz).sqrt()
}

/// Adds independent angular deltas drawn from `[-delta_phi_max, +delta_phi_max]`
/// to `phi` and `theta`. The radial distance never changes.
pub fn perturb_location<R: Rng + ?Sized>(
    c: &PolarCoord,
    delta_phi_max: f64,
    rng: &mut R,
) -> PolarCoord {
    if delta_phi_max <= 0.0 {
        return *c;
    }
    let d_phi = rng.random_range(-delta_phi_max..=delta_phi_max);
    let d_theta = rng.random_range(-delta_phi_max..=delta_phi_max);
    let mut out = PolarCoord {
        r: c.r,
        phi: c.phi + d_phi,
        theta: c.theta + d_theta,
    };
    out.normalize();
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct Neighborhood {
    pub center: AgentId,
    pub radius: f64,
    pub members: Vec<AgentId>,
}

/// All agents other than `center` within `r_o` of it, in input order.
///
/// `center` must appear in `all_agents`; if it does not, the result is empty.
pub fn neighborhood(center: AgentId, all_agents: &[(AgentId, PolarCoord)], r_o: f64) -> Neighborhood {
    let members = match all_agents.iter().find(|(id, _)| *id == center) {
        Some((_, c)) => {
            let origin = c.to_cartesian();
            all_agents
                .iter()
                .filter(|(id, _)| *id != center)
                .filter(|(_, p)| cartesian_distance(&origin, &p.to_cartesian()) <= r_o)
                .map(|(id, _)| *id)
                .collect()
        }
        None => Vec::new(),
    };
    Neighborhood {
        center,
        radius: r_o,
        members,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn canonical(c: &PolarCoord) -> bool {
        (0.0..=1.0).contains(&c.r) && (0.0..TAU).contains(&c.phi) && (0.0..=PI).contains(&c.theta)
    }

    #[test]
    fn uniform_radius_mean_is_three_quarters() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 100_000;
        let mut sum = 0.0;
        for _ in 0..n {
            let c = place_uniform(&mut rng);
            assert!(canonical(&c));
            sum += c.r;
        }
        assert!((sum / n as f64 - 0.75).abs() < 0.01);
    }

    #[test]
    fn placement_is_seeded() {
        let a = place_uniform(&mut ChaCha8Rng::seed_from_u64(5));
        let b = place_uniform(&mut ChaCha8Rng::seed_from_u64(5));
        assert_eq!(a, b);
    }

    #[test]
    fn antipodal_equator_points() {
        let a = PolarCoord::new(1.0, 0.0, PI / 2.0);
        let b = PolarCoord::new(1.0, PI, PI / 2.0);
        assert!((distance(&a, &b) - 2.0).abs() < 1e-12);
        assert_eq!(distance(&a, &a), 0.0);
    }

    #[test]
    fn zero_perturbation_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let c = PolarCoord::new(0.4, 1.0, 2.0);
        assert_eq!(perturb_location(&c, 0.0, &mut rng), c);
    }

    #[test]
    fn perturbation_bounded_and_radius_fixed() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let max = PI / 20.0;
        for _ in 0..10_000 {
            let c = place_uniform(&mut rng);
            let p = perturb_location(&c, max, &mut rng);
            assert_eq!(p.r, c.r);
            assert!(canonical(&p));
            assert!((p.theta - c.theta).abs() <= max + 1e-12);
        }
    }

    #[test]
    fn theta_reflects_through_pole() {
        let c = PolarCoord::new(0.5, 0.25, -0.1);
        assert!((c.theta - 0.1).abs() < 1e-12);
        assert!((c.phi - (0.25 + PI)).abs() < 1e-12);
        let d = PolarCoord::new(0.5, 4.0, PI + 0.2);
        assert!((d.theta - (PI - 0.2)).abs() < 1e-12);
        assert!((d.phi - (4.0 + PI - TAU)).abs() < 1e-12);
    }

    fn population(seed: u64, n: usize) -> Vec<(AgentId, PolarCoord)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|i| (AgentId(i as u64), place_uniform(&mut rng))).collect()
    }

    #[test]
    fn tiny_and_diameter_radii() {
        let agents = population(3, 50);
        assert!(neighborhood(AgentId(0), &agents, 1e-12).members.is_empty());
        assert_eq!(neighborhood(AgentId(0), &agents, 2.0).members.len(), 49);
    }

    #[test]
    fn neighborhood_matches_brute_force() {
        for seed in 0..20 {
            let agents = population(seed, 200);
            let center = AgentId(seed % 200);
            let hood = neighborhood(center, &agents, 0.5);
            let own = agents.iter().find(|(id, _)| *id == center).unwrap().1;
            let mut expected = Vec::new();
            for (id, c) in &agents {
                if *id != center && distance(&own, c) <= 0.5 {
                    expected.push(*id);
                }
            }
            assert_eq!(hood.members, expected);
        }
    }

    fn coord() -> impl Strategy<Value = PolarCoord> {
        (0.0f64..=1.0, 0.0f64..TAU, 0.0f64..=PI).prop_map(|(r, p, t)| PolarCoord::new(r, p, t))
    }

    proptest! {
        #[test]
        fn distance_is_a_metric(a in coord(), b in coord(), c in coord()) {
            let ab = distance(&a, &b);
            prop_assert!(ab >= 0.0);
            prop_assert!((ab - distance(&b, &a)).abs() < 1e-12);
            prop_assert!(distance(&a, &c) <= ab + distance(&b, &c) + 1e-12);
            prop_assert!(ab <= 2.0 + 1e-12);
        }
    }
}
