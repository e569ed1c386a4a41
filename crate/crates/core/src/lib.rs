//! Exact verification of the Heyde symmetry condition on finite abelian
//! groups, together with the countable discrete dual-group models on which
//! the condition admits non-Haar-shift solutions.
//!
//! Everything in this crate is exact: probability masses are arbitrary
//! precision rationals, character values live in cyclotomic fields with a
//! canonical representation, and every verdict is an equality of canonical
//! forms. There is no floating point anywhere.
//!
//! The crate is organised around five building blocks:
//!
//! * [`group`]: finite abelian groups as products of prime-power cyclic
//!   groups, with subgroups, annihilators, homomorphisms and adjoints;
//! * [`cyclotomic`]: exact arithmetic in the `N`-th cyclotomic field;
//! * [`distribution`]: exact probability distributions and their Fourier
//!   transforms;
//! * [`heyde`]: the symmetry condition itself: two independent checkers,
//!   the Haar-shift conclusion, counterexample generators and searches;
//! * [`dual_models`]: countable discrete dual groups with closed-form
//!   rational characteristic functions, verified level by level.
//!
//! [`wire`] holds the JSON/text formats shared with the command-line tool.

pub mod cyclotomic;
pub mod distribution;
pub mod dual_models;
pub mod error;
pub mod group;
pub mod heyde;
pub mod rational;
pub mod wire;

pub use error::Error;
pub use rational::Rational;
