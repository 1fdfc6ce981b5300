//! Ensemble input–redundancy weight enumerating functions of Kite prefix
//! codes, via the probability-weighted two-state trellis recursion.
//!
//! For an input of weight ℓ the parity sequence is a Markov chain whose
//! flip probability at time t is `p_t^{(ℓ)}`; a forward recursion over the
//! polynomial ring (coefficients indexed by parity weight j, log domain)
//! yields the conditional enumerator `A^{(ℓ)}(Z)`. Binomial aggregation over
//! ℓ gives the ensemble coefficients `A_{i,j}` and the spectra `S_d`
//! (codeword counts) and `S'_d` (information-weight-fraction weighted).

use crate::error::{Error, Result};
use crate::kite::PSequence;
use crate::math::{ln_binomial, log_add, log_sum_exp};
use rayon::prelude::*;

/// Flip probabilities `p_t^{(ℓ)}` for t = 0..r-1, by the recursion
/// `p^{(ℓ)} = p^{(ℓ-1)}(1-p) + (1-p^{(ℓ-1)})p` from `p^{(0)} = 0`.
pub fn succ_prob_profile(ell: usize, pseq: &PSequence, k: usize, r: usize) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(r);
    for t in 0..r as u64 {
        let p = pseq.p_at(t, k as u64)?;
        let mut pl = 0.0;
        for _ in 0..ell {
            pl = pl * (1.0 - p) + (1.0 - pl) * p;
        }
        out.push(pl);
    }
    Ok(out)
}

/// Conditional parity-weight enumerator for input weight ℓ.
#[derive(Debug, Clone)]
pub struct CondWef {
    pub ell: usize,
    /// `log A^{(ℓ)}_j` for j = 0..=depth; `-inf` encodes a zero coefficient.
    pub log_coeffs: Vec<f64>,
}

/// Forward trellis recursion for `A^{(ℓ)}(Z)`, truncated at degree `depth`.
/// Coefficients up to `depth` are exact regardless of the truncation.
pub fn cond_wef(ell: usize, pseq: &PSequence, k: usize, r: usize, depth: usize) -> Result<CondWef> {
    let jmax = depth.min(r);
    let profile = succ_prob_profile(ell, pseq, k, r)?;
    let neg = f64::NEG_INFINITY;
    // alpha_t(Z; state) with state = last parity bit
    let mut a0 = vec![neg; jmax + 1];
    let mut a1 = vec![neg; jmax + 1];
    let mut b0 = vec![neg; jmax + 1];
    let mut b1 = vec![neg; jmax + 1];
    a0[0] = 0.0;
    for (t, &p) in profile.iter().enumerate() {
        let (lp, l1p) = if p > 0.0 { (p.ln(), (-p).ln_1p()) } else { (neg, 0.0) };
        let hi = jmax.min(t + 1);
        b0[..=hi].fill(neg);
        b1[..=hi].fill(neg);
        for j in 0..=hi {
            b0[j] = log_add(l1p + a0[j], lp + a1[j]);
            if j >= 1 {
                b1[j] = log_add(lp + a0[j - 1], l1p + a1[j - 1]);
            }
        }
        std::mem::swap(&mut a0, &mut b0);
        std::mem::swap(&mut a1, &mut b1);
    }
    let log_coeffs = (0..=jmax).map(|j| log_add(a0[j], a1[j])).collect();
    Ok(CondWef { ell, log_coeffs })
}

/// Ensemble spectra up to total weight `depth`.
#[derive(Debug, Clone)]
pub struct WefTable {
    k: usize,
    r: usize,
    depth: usize,
    /// log A_{i,j} = ln C(k,i) + log A^{(i)}_j, rows i = 0..=min(k,depth)
    log_a: Vec<Vec<f64>>,
    log_s: Vec<f64>,
    log_s_prime: Vec<f64>,
}

/// Computes the ensemble table by aggregating `C(k,ℓ)·A^{(ℓ)}_j`.
pub fn ensemble_wef(k: usize, pseq: &PSequence, r: usize, depth: usize) -> Result<WefTable> {
    if depth > k + r {
        return Err(Error::InvalidParameter(format!(
            "depth {depth} exceeds block length {}",
            k + r
        )));
    }
    let lmax = depth.min(k);
    let log_a: Vec<Vec<f64>> = (0..=lmax)
        .into_par_iter()
        .map(|ell| {
            let cw = cond_wef(ell, pseq, k, r, depth - ell)?;
            let lc = ln_binomial(k as u64, ell as u64);
            Ok(cw.log_coeffs.iter().map(|&v| v + lc).collect())
        })
        .collect::<Result<_>>()?;
    let mut log_s = vec![f64::NEG_INFINITY; depth + 1];
    let mut log_s_prime = vec![f64::NEG_INFINITY; depth + 1];
    let mut terms: Vec<f64> = Vec::new();
    let mut terms_p: Vec<f64> = Vec::new();
    for d in 0..=depth {
        terms.clear();
        terms_p.clear();
        for i in d.saturating_sub(r)..=d.min(lmax) {
            let j = d - i;
            if j < log_a[i].len() {
                let v = log_a[i][j];
                terms.push(v);
                if i > 0 {
                    terms_p.push(v + (i as f64 / k as f64).ln());
                }
            }
        }
        log_s[d] = log_sum_exp(&terms);
        log_s_prime[d] = log_sum_exp(&terms_p);
    }
    Ok(WefTable { k, r, depth, log_a, log_s, log_s_prime })
}

impl WefTable {
    pub fn k(&self) -> usize {
        self.k
    }
    pub fn r(&self) -> usize {
        self.r
    }
    pub fn n(&self) -> usize {
        self.k + self.r
    }
    /// Truncation weight D: spectra are exact for d ≤ D.
    pub fn depth(&self) -> usize {
        self.depth
    }
    /// log S_d, d = 0..=depth.
    pub fn log_s(&self) -> &[f64] {
        &self.log_s
    }
    /// log S'_d, d = 0..=depth.
    pub fn log_s_prime(&self) -> &[f64] {
        &self.log_s_prime
    }
    /// log A_{i,j} for i + j ≤ depth.
    pub fn log_a(&self, i: usize, j: usize) -> f64 {
        if i + j <= self.depth && i < self.log_a.len() && j < self.log_a[i].len() {
            self.log_a[i][j]
        } else {
            f64::NEG_INFINITY
        }
    }
}
