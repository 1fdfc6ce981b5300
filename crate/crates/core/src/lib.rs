//! Rateless Kite codes and their serial concatenation with Reed–Solomon
//! outer codes, plus the analysis stack used to design and evaluate them:
//! ensemble weight enumerators, ML-decoding union/list bounds, Gaussian-
//! approximation density evolution, and greedy p-sequence design.
//!
//! A Kite code is a systematic prefix rateless LDPC code: parity bit `w_t` is
//! the running mod-2 accumulation of Bernoulli(p_t)-sampled sums of the `k`
//! information bits, where the p-sequence is partitioned into nine parameters
//! `q_9..q_1` keyed to target decoding-rate windows. The code instance is
//! fully determined by `(k, seed, q-parameters)`; see [`kite::KiteCodeSpec`].

pub mod bounds;
pub mod bp;
pub mod channel;
pub mod concat;
pub mod de;
pub mod design;
pub mod error;
pub mod galois;
pub mod kite;
pub mod math;
pub mod prng;
pub mod reed_solomon;
pub mod rs_analysis;
pub mod wef;

pub use error::{Error, Result};
