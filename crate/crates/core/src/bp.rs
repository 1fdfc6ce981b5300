//! Iterative sum-product decoding on the Kite normal graph.
//!
//! Flooding schedule with tanh-rule check updates; messages clamped at
//! |LLR| ≤ 30. Supports pinning known bits (the RS feedback path): a pinned
//! position's outgoing messages are held saturated at the clamp bound and
//! its hard decision is fixed.

use crate::error::{Error, Result};
use crate::kite::ParityRealization;

/// Message magnitude clamp.
pub const LLR_CLAMP: f64 = 30.0;

/// Channel log-likelihood ratios, sign convention `log P(bit=0)/P(bit=1)`.
#[derive(Debug, Clone)]
pub struct LlrFrame {
    pub llrs: Vec<f64>,
}

/// `llr_t = 2 y_t / σ²` for BPSK over AWGN.
pub fn init_llr(y: &[f64], sigma2: f64) -> Result<LlrFrame> {
    if sigma2 <= 0.0 {
        return Err(Error::InvalidParameter(format!("noise variance {sigma2} must be positive")));
    }
    Ok(LlrFrame { llrs: y.iter().map(|&v| 2.0 * v / sigma2).collect() })
}

/// Bits fixed to known values throughout decoding.
#[derive(Debug, Clone)]
pub struct PinnedBits {
    flags: Vec<i8>, // -1 free, 0/1 pinned value
}

impl PinnedBits {
    pub fn none(n: usize) -> Self {
        PinnedBits { flags: vec![-1; n] }
    }

    pub fn pin(&mut self, idx: usize, bit: u8) {
        self.flags[idx] = bit as i8;
    }

    pub fn get(&self, idx: usize) -> Option<u8> {
        if self.flags[idx] < 0 {
            None
        } else {
            Some(self.flags[idx] as u8)
        }
    }

    pub fn count(&self) -> usize {
        self.flags.iter().filter(|&&f| f >= 0).count()
    }
}

#[derive(Debug, Clone)]
pub struct DecodeOutcome {
    /// True iff the hard decision satisfies every parity check.
    pub success: bool,
    /// Iterations actually used (1-based; `max_iters` when unsuccessful).
    pub iterations: u32,
    pub hard_bits: Vec<u8>,
    pub posterior_llrs: Vec<f64>,
}

/// Sum-product decoding of a length-n prefix realization.
///
/// Stops at the first iteration whose hard decision satisfies all checks.
/// `known` pins positions to fixed values (saturated messages).
pub fn sp_decode(
    real: &ParityRealization,
    frame: &LlrFrame,
    max_iters: u32,
    known: Option<&PinnedBits>,
) -> Result<DecodeOutcome> {
    let n = real.n();
    let k = real.k();
    let r = real.r();
    if frame.llrs.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: frame.llrs.len() });
    }
    if let Some(p) = known {
        if p.flags.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: p.flags.len() });
        }
    }

    // CSR edge layout: per check, its variable neighbours
    let mut check_start = Vec::with_capacity(r + 1);
    let mut edge_var: Vec<u32> = Vec::new();
    check_start.push(0u32);
    for (t, row) in real.rows().iter().enumerate() {
        edge_var.extend_from_slice(row);
        if t > 0 {
            edge_var.push((k + t - 1) as u32);
        }
        edge_var.push((k + t) as u32);
        check_start.push(edge_var.len() as u32);
    }
    let ne = edge_var.len();

    let clamp = |x: f64| x.clamp(-LLR_CLAMP, LLR_CLAMP);
    let pin_llr = |idx: usize| -> Option<f64> {
        known.and_then(|p| p.get(idx)).map(|b| if b == 0 { LLR_CLAMP } else { -LLR_CLAMP })
    };

    let channel: Vec<f64> = (0..n)
        .map(|i| pin_llr(i).unwrap_or_else(|| clamp(frame.llrs[i])))
        .collect();

    let mut vtc: Vec<f64> = edge_var.iter().map(|&v| channel[v as usize]).collect();
    let mut ctv = vec![0.0f64; ne];
    let mut tanh_buf = vec![0.0f64; ne];
    let mut posterior = channel.clone();
    let mut hard: Vec<u8> = posterior.iter().map(|&l| u8::from(l < 0.0)).collect();

    let mut iterations = 0;
    let mut success = false;
    for iter in 1..=max_iters {
        iterations = iter;
        // check pass: forward-backward exclusion products of tanh(m/2)
        for t in 0..r {
            let s = check_start[t] as usize;
            let e = check_start[t + 1] as usize;
            for i in s..e {
                tanh_buf[i] = (vtc[i] * 0.5).tanh();
            }
            let deg = e - s;
            if deg == 1 {
                // single-neighbour check asserts its variable equals zero
                ctv[s] = LLR_CLAMP;
                continue;
            }
            // forward products in ctv as scratch
            let mut acc = 1.0;
            for i in s..e {
                ctv[i] = acc;
                acc *= tanh_buf[i];
            }
            let mut back = 1.0;
            for i in (s..e).rev() {
                let prod = ctv[i] * back;
                back *= tanh_buf[i];
                ctv[i] = clamp(2.0 * prod.atanh());
            }
        }
        // variable pass
        posterior.copy_from_slice(&channel);
        for (i, &v) in edge_var.iter().enumerate() {
            posterior[v as usize] += ctv[i];
        }
        for (i, &v) in edge_var.iter().enumerate() {
            let vi = v as usize;
            vtc[i] = match pin_llr(vi) {
                Some(l) => l,
                None => clamp(posterior[vi] - ctv[i]),
            };
        }
        for (i, &l) in posterior.iter().enumerate() {
            hard[i] = match known.and_then(|p| p.get(i)) {
                Some(b) => b,
                None => u8::from(l < 0.0),
            };
        }
        if real.syndrome(&hard)?.iter().all(|&s| s == 0) {
            success = true;
            break;
        }
    }
    if max_iters == 0 {
        // degenerate call: report the channel hard decision
        success = real.syndrome(&hard)?.iter().all(|&s| s == 0);
    }
    // pinned posteriors report the saturated value
    for i in 0..n {
        if let Some(l) = pin_llr(i) {
            posterior[i] = l;
        }
    }
    debug_assert_eq!(success, real.syndrome(&hard)?.iter().all(|&s| s == 0));
    Ok(DecodeOutcome { success, iterations, hard_bits: hard, posterior_llrs: posterior })
}
