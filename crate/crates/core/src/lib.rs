//! Zero-bit pseudorandom error-correcting codes.
//!
//! Four constructions share the [`prc::ZeroBitScheme`] interface:
//!
//! * [`warmup`]: PRF-tagged blocks, robust only to vanishing error rates.
//! * [`hyperloop`]: Goldreich's PRG over a hypergraph with planted hyperloops.
//! * [`weakxor`]: sparse-secret LPN over a matrix with a noisy planted XOR.
//! * [`ssr`]: sparse parities over a random header, secure against
//!   space-bounded distinguishers.
//!
//! [`prc::Amplified`] turns any of them (after measuring its decoding
//! advantage) into a scheme that decodes corrupted codewords and rejects
//! unrelated strings with high probability. [`channels`] models the
//! corruption, and [`watermark`] embeds codewords into a toy binary
//! language model.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bits;
pub mod channels;
pub mod error;
pub mod gf2;
pub mod hyperloop;
pub mod prc;
pub mod rng;
pub mod sampling;
pub mod ssr;
pub mod stats;
pub mod warmup;
pub mod watermark;
pub mod weakxor;

pub use bits::BitString;
pub use error::Error;
pub use prc::{Amplified, AmplifiedKey, Verdict, ZeroBitScheme};
pub use rng::{RngStream, StreamRng};
