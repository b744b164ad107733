//! Multi-photon absorption statistics of single-mode light.
//!
//! The crate evaluates normally ordered coherence functions
//! `G^(m) = <(a†)^m a^m>` of photon-number distributions, builds the usual
//! single-mode states (coherent, thermal, squeezed vacuum, Fock, coin
//! states and their classical mixtures), and maximizes `G^(m)` over all
//! distributions with a fixed mean photon number inside a truncated Fock
//! space.
//!
//! Modules:
//! - [`fock`]: pure states, photon-number distributions, falling factorials.
//! - [`zoo`]: state constructors and the declarative [`zoo::StateSpec`].
//! - [`coherence`]: `G^(m)`, upper bounds, enhancement ratios, line shape.
//! - [`optimizer`]: exact two-support vertex enumeration and a random-search
//!   lower bound.
//! - [`cli`]: JSON sweep configs, CSV/SVG output and subcommand handlers.

pub mod cli;
pub mod coherence;
mod error;
pub mod fock;
pub mod optimizer;
pub mod zoo;

pub use error::{Error, Result};
