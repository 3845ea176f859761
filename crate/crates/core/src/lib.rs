//! Search tools for quadratic permutation polynomial (QPP) interleavers used
//! by the LTE turbo code.
//!
//! The crate is `no_std` (it needs `alloc`) and is organized bottom-up:
//!
//!  - [`qpp`]: QPP evaluation, validity, spread factor, nonlinearity degrees,
//!    LPP reducibility, class enumeration and spectrum-equivalence grouping.
//!  - [`codec`]: the 8-state LTE constituent encoder and the terminated turbo
//!    encoder (rate `L / (3L + 12)`).
//!  - [`spectrum`]: exact truncated distance spectra by branch-and-bound over
//!    the trellis, with an event hook that can abort the computation, plus a
//!    brute-force oracle for short blocks.
//!  - [`tub`]: truncated union bounds on BER and FER over independent Rayleigh
//!    fading, and the optimistic-update abort predicate.
//!  - [`search`]: pruned search of an interleaver class for minimum TUB(FER).
//!  - [`sim`]: Monte-Carlo FER estimation with iterative Log-MAP decoding.
//!  - [`defaults`]: per-length SNR, number of spectrum terms and the LTE
//!    polynomial.
//!
//! Everything here is free of IO; threads, files and the command line live
//! in the companion `qppsearch` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod codec;
pub mod defaults;
pub mod qpp;
pub mod search;
pub mod sim;
pub mod spectrum;
pub mod tub;

mod error;

pub use error::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;
