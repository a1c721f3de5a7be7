//! Certified progression witnesses and finite-horizon avoidance checks.

pub mod ap;
pub mod gp;
pub mod membership;
pub mod spot;

pub use ap::{find_ap, replay_ap, ApWitness};
pub use gp::{find_gp, gp_tail_bound, replay_gp, GpWitness};
pub use membership::{cantor_membership, cantor_membership_bracket, Membership};
pub use spot::{spot_check_avoidance, spot_check_enclosed, Family, SpotReport};
