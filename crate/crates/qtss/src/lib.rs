//! Desk-scale simulator for a verifiable (t, n) threshold quantum secret
//! sharing protocol over a single d-level quantum system.
//!
//! The classical layer is Shamir's scheme over GF(d); the quantum layer is a
//! single qudit walked along a line of participants, each applying one
//! diagonal unitary built from its share component. A check value bound by
//! S1 = S2 * N mod d lets every participant verify the recovered secrets
//! and catch cheating or eavesdropping.
//!
//! Modules:
//! - [`gf`]: exact arithmetic in GF(d)
//! - [`sss`]: share dealing, components, and the additive-component interface
//! - [`qudit`]: MUB vectors, cyclic unitaries, Born-rule measurement
//! - [`protocol`]: the sequential session end to end
//! - [`adversary`]: attack strategies, Monte Carlo and exhaustive rates
//! - [`properties`]: named property checks used by the CLI and tests

pub mod adversary;
pub mod gf;
pub mod properties;
pub mod protocol;
pub mod qudit;
pub mod sss;
