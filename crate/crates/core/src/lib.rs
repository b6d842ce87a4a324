//! Zero-time and Poincaré discontinuity mappings near order-4 grazing
//! points of impacting hybrid systems.
//!
//! The crate is `no_std` (it needs `alloc`). IO, the command line and the
//! sweep file formats live in the `grazing-maps` companion crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod dmaps;
pub mod fit;
pub mod flow;
pub mod grazing;
pub mod jet;
pub mod lie;
pub mod perturb;
pub mod sysdsl;
pub mod systems;
