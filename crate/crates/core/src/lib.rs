//! Multi-agent trust simulator.
//!
//! Consumers obtain a single service from providers scattered in a spherical
//! world. Three consumer groups compete: FIRE consumers pick providers from
//! trust evaluations (pull), CA consumers broadcast staged requests and let
//! providers volunteer (push), and adaptable consumers learn with a small
//! deep Q-network which of the two to use each time they need the service.

pub mod ca;
pub mod dqn;
pub mod engine;
pub mod experiments;
pub mod features;
pub mod fire;
pub mod population;
pub mod world;

use std::fmt;

/// Identity of an agent. Identities are never reused within a run; agents
/// replaced by churn come back with a fresh identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AgentId(pub u64);

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Consumer group, fixed for the lifetime of a consumer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Group {
    Fire,
    Ca,
    Adaptable,
}

impl Group {
    pub const ALL: [Group; 3] = [Group::Fire, Group::Ca, Group::Adaptable];

    pub fn name(self) -> &'static str {
        match self {
            Group::Fire => "FIRE",
            Group::Ca => "CA",
            Group::Adaptable => "Adaptable",
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Which trust mechanism served a request.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mode {
    /// Consumer-side selection (FIRE).
    Pull,
    /// Provider-side volunteering (CA).
    Push,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Pull => "pull",
            Mode::Push => "push",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}
