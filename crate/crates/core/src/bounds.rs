//! ML-decoding performance bounds on ensemble Kite codes: the Divsalar
//! simple bound per weight class, its union form, and the refined
//! list-region bound that splits error events by a Hamming sphere of radius
//! d* around the hard-decision word (adding a BSC tail with crossover
//! `Q(1/σ)`), optimized over d*.
//!
//! Everything is evaluated in the log domain; the public functions return
//! linear probabilities clipped at 1.

use crate::error::{Error, Result};
use crate::math::{ln_binomial, ln_q, log_add, log_sum_exp};
use crate::wef::WefTable;

/// Selects the spectrum: `S_d` bounds frame error probability, `S'_d`
/// (information-weight fraction) bounds bit error probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundMode {
    Frame,
    Bit,
}

/// Parameters of one refined-bound evaluation.
#[derive(Debug, Clone, Copy)]
pub struct BoundConfig {
    pub n: usize,
    pub sigma2: f64,
    pub d_star: usize,
    pub mode: BoundMode,
}

/// Log of the per-weight-class Divsalar term
/// `min{ e^{-nE(δ,β,γ)}, S_d · Q(√(2dγ)) }`.
///
/// The exponential branch applies only where it is defined (0 < δ < 1 and
/// positive spectral exponent r_n); elsewhere the union term stands alone.
pub fn divsalar_term(d: usize, log_s_d: f64, n: usize, sigma2: f64) -> f64 {
    if log_s_d == f64::NEG_INFINITY || d == 0 {
        return f64::NEG_INFINITY;
    }
    let gamma = 1.0 / (2.0 * sigma2);
    let delta = d as f64 / n as f64;
    let log_union = log_s_d + ln_q((2.0 * d as f64 * gamma).sqrt());
    let rn = log_s_d / n as f64;
    if delta >= 1.0 || rn <= 0.0 {
        return log_union;
    }
    let ratio = (1.0 - delta) / delta;
    let omega = -(-2.0 * rn).exp_m1(); // 1 - e^{-2 rn}
    let beta = (gamma * ratio * 2.0 / omega + ratio * ratio * ((1.0 + gamma).powi(2) - 1.0))
        .sqrt()
        - ratio * (1.0 + gamma);
    let e = -rn + 0.5 * (beta + (1.0 - beta) * (2.0 * rn).exp()).ln()
        + beta * gamma * delta / (1.0 - (1.0 - beta) * delta);
    let log_exp_term = -(n as f64) * e;
    log_exp_term.min(log_union)
}

fn spectrum(wef: &WefTable, mode: BoundMode) -> &[f64] {
    match mode {
        BoundMode::Frame => wef.log_s(),
        BoundMode::Bit => wef.log_s_prime(),
    }
}

/// Union-Divsalar bound Σ_d min{·,·}, requiring the full spectrum D = n.
pub fn union_divsalar_bound(wef: &WefTable, sigma2: f64, mode: BoundMode) -> Result<f64> {
    let n = wef.n();
    if wef.depth() < n {
        return Err(Error::SpectrumDepth { needed: n, available: wef.depth() });
    }
    let ls = spectrum(wef, mode);
    let terms: Vec<f64> = (1..=n).map(|d| divsalar_term(d, ls[d], n, sigma2)).collect();
    Ok(log_sum_exp(&terms).min(0.0).exp())
}

/// Exact log-domain binomial tail Σ_{t>d*} C(n,t) p^t (1-p)^{n-t} with
/// p = Q(1/σ).
pub fn bsc_tail(n: usize, d_star: usize, sigma2: f64) -> f64 {
    let p = crate::math::q_func(1.0 / sigma2.sqrt());
    let (lp, l1p) = (p.ln(), (-p).ln_1p());
    let terms: Vec<f64> = ((d_star + 1)..=n)
        .map(|t| ln_binomial(n as u64, t as u64) + t as f64 * lp + (n - t) as f64 * l1p)
        .collect();
    log_sum_exp(&terms).min(0.0).exp()
}

/// Refined bound: Divsalar terms for d ≤ 2d* plus the BSC tail beyond d*.
pub fn refined_bound(wef: &WefTable, cfg: &BoundConfig) -> Result<f64> {
    if wef.depth() < (2 * cfg.d_star).min(wef.n()) {
        return Err(Error::SpectrumDepth { needed: 2 * cfg.d_star, available: wef.depth() });
    }
    let n = cfg.n;
    let ls = spectrum(wef, cfg.mode);
    let dmax = (2 * cfg.d_star).min(n);
    let terms: Vec<f64> = (1..=dmax).map(|d| divsalar_term(d, ls[d], n, cfg.sigma2)).collect();
    let log_head = log_sum_exp(&terms);
    let tail = bsc_tail(n, cfg.d_star, cfg.sigma2);
    Ok(log_add(log_head, tail.ln()).min(0.0).exp())
}

/// The refined bound minimized over all feasible list radii d* ≤ D/2,
/// together with the minimizing d*.
pub fn optimized_bound(
    wef: &WefTable,
    sigma2: f64,
    mode: BoundMode,
) -> Result<(f64, usize)> {
    let n = wef.n();
    let depth = wef.depth();
    let ls = spectrum(wef, mode);
    let dmax = depth.min(n);
    // prefix log-sums of the per-d Divsalar terms
    let mut prefix = vec![f64::NEG_INFINITY; dmax + 1];
    let mut acc = f64::NEG_INFINITY;
    for d in 1..=dmax {
        acc = log_add(acc, divsalar_term(d, ls[d], n, sigma2));
        prefix[d] = acc;
    }
    prefix[0] = f64::NEG_INFINITY;
    // suffix log-sums of the BSC pmf
    let p = crate::math::q_func(1.0 / sigma2.sqrt());
    let (lp, l1p) = (p.ln(), (-p).ln_1p());
    let mut suffix = vec![f64::NEG_INFINITY; n + 2];
    for t in (0..=n).rev() {
        let term = ln_binomial(n as u64, t as u64) + t as f64 * lp + (n - t) as f64 * l1p;
        suffix[t] = log_add(suffix[t + 1], term);
    }
    let mut best = f64::INFINITY;
    let mut best_d = 0;
    for d_star in 0..=(depth / 2) {
        let head = prefix[(2 * d_star).min(dmax)];
        let v = log_add(head, suffix[(d_star + 1).min(n + 1)]);
        if v < best {
            best = v;
            best_d = d_star;
        }
    }
    Ok((best.min(0.0).exp(), best_d))
}
