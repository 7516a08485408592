//! Omega-regular objectives over finite probabilistic models.
//!
//! The crate covers the whole pipeline without touching the file system:
//! PRISM-subset and HOA front-ends, acceptance normalization to max-odd
//! parity, limit-deterministic Büchi construction and minimization with a
//! simulation-based GFM certificate, product construction, exact parity
//! solving for MDPs and turn-based stochastic games, and tabular learners
//! driven by pluggable reward schemes.
//!
//! It is `no_std` and only needs an allocator.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod automaton;
pub mod check;
pub mod graph;
pub mod model;
pub mod parity;
pub mod prism;
pub mod product;
pub mod rl;
pub mod sldba;

pub use automaton::{AcceptanceKind, Automaton, Edge, Guard};
pub use check::{ChainValue, ValueVector};
pub use model::{Label, Model, ModelKind, Player, Strategy};
pub use product::Product;
