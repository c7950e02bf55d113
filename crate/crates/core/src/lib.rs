//! Exact arithmetic for lattice-point sums and p-adic integration.
//!
//! The crate has three layers. The bottom layer is exact rational and
//! p-adic arithmetic: big rationals with a sawtooth helper
//! ([`rational`]), Bernoulli/Euler machinery and formal power series
//! ([`bernoulli`], [`series`]), capped-precision p-adic numbers
//! ([`padic`]), and a cyclotomic extension ring for root-of-unity
//! twists ([`cyclo`]).
//!
//! The middle layer evaluates the objects of interest: Dedekind,
//! Apostol, and Hardy sums with their trigonometric-series partial
//! sums ([`classical`]); bosonic, q-deformed, and alternating
//! integrals over the p-adic integers, both by literal truncated
//! summation and in closed form ([`integrals`]); and twisted
//! q-Bernoulli numbers and polynomials built from their generating
//! function ([`twisted`]).
//!
//! The top layer cross-checks everything: named verification suites
//! that re-derive each family of identities from independent routes
//! ([`verify`]), and audit reports that evaluate both sides of each
//! claimed identity and record how closely they match without
//! assuming the answer ([`audit`]).
//!
//! All computation is exact or carries an explicit precision bound;
//! nothing in the library rounds silently.

pub mod audit;
pub mod bernoulli;
pub mod classical;
pub mod cyclo;
pub mod error;
pub mod integrals;
pub mod padic;
pub mod rational;
pub mod series;
pub mod twisted;
pub mod verify;

pub use error::{Error, Result};
