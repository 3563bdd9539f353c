//! Periodic points of degree-`d` covering maps of the open annulus.
//!
//! The toolkit makes a small piece of annulus dynamics computational:
//!
//! - [`cover`] — universal-cover arithmetic: lifts, deck translations, and
//!   the shift identity for iterated lifts.
//! - [`maps`] — a gallery of concrete covering maps: the model map `z^d`,
//!   skew products over it, Denjoy-based constructions with wandering
//!   intervals, an expanding-Cantor-set example, a degree(-2) map with a
//!   missing Nielsen class, and an exact rationally-independent
//!   translation table over a basis of square roots of primes.
//! - [`semiconj`] — the canonical semiconjugacy `H` onto the model map,
//!   with a-posteriori tail bounds, rotation values, and a rational
//!   rotation detector.
//! - [`nielsen`] — Nielsen classes of periodic points via integer lift
//!   translations, exact class counts by divisor inversion, lift surveys,
//!   and completeness verdicts.
//! - [`search`] — periodic-orbit enumeration for circle bases and skew
//!   products, invariant-set probes, and no-fixed-point certificates.
//! - [`raster`] — raster sets on the annulus, flood fill from the ends,
//!   filled-set membership, and attractor refinement.
//!
//! The `annulus` binary exposes the same operations as a CLI; see the
//! crate README for usage.

pub mod cli;
pub mod coord;
pub mod cover;
pub mod maps;
pub mod nielsen;
pub mod numeric;
pub mod raster;
pub mod search;
pub mod semiconj;

pub use coord::Coord;
pub use cover::{AnnulusPoint, CirclePoint, Degree, LiftPoint, LiftedMap};
