//! Verification kernel for poset-indexed gluing of structured data.
//!
//! Everything in here is exact, finite and deterministic: posets are stored
//! as closed relation bitsets, rings as explicit operation tables, and every
//! "check" operation returns a report instead of silently trusting a theorem.
//! The crate is `no_std` (alloc only); IO and file formats live in the
//! companion CLI crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod caps;
pub mod cdata;
pub mod corpus;
pub mod cylinder;
pub mod descent;
pub mod homotopy;
pub mod intmat;
pub mod kernel;
pub mod poset;
pub mod ring;
pub mod rng;
pub mod schematic;

/// Conventions that are fixed project-wide and echoed into every report.
///
/// Transitions of a lax datum go from the stalk over the larger index down
/// to the smaller one, and a 2-cell `f <= g` requires the comorphisms to
/// agree after restricting along the target: `f#_x = g#_x . G_{f(x) g(x)}`.
pub mod convention {
    pub const TRANSITION_DIRECTION: &str = "transition X_pq maps fiber(q) to fiber(p) for p <= q";
    pub const TWO_CELL_READING: &str = "f <= g iff |f| <= |g| pointwise and f#_x = g#_x . G_{f(x)g(x)}";
    pub const QC_ISO_CRITERION: &str = "qc-iso = induced spectrum map bijective with isomorphic local rings";
}
