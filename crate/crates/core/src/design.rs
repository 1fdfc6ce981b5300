//! Greedy q-parameter design: nine sequential one-dimensional searches from
//! q_9 down to q_1, each optimizing the current prefix code with the
//! higher-rate parameters held fixed. The objective is either the
//! density-evolution threshold (fast, deterministic, the default) or the
//! simulated SNR reaching a target BER (ordinal comparison).

use crate::channel::{simulate_ber, ChannelConfig};
use crate::de::{de_threshold, edges_from_nodes, kite_rate_dists, DeParams, NodeDegreeDists};
use crate::de::combine_dists;
use crate::error::{Error, Result};
use crate::kite::{KiteCodeSpec, PSequence};

/// How design_step scores a candidate q.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DesignCriterion {
    /// Minimize the GA-DE threshold of the prefix ensemble.
    DeThreshold,
    /// Minimize the simulated SNR (bisected to 0.1 dB) at which the sampled
    /// code reaches the target BER.
    SimulationOrdinal,
}

#[derive(Debug, Clone)]
pub struct DesignConfig {
    pub k: usize,
    pub criterion: DesignCriterion,
    /// Target BER for both criteria.
    pub target_ber: f64,
    /// Golden-search relative width tolerance in q.
    pub tol_rel: f64,
    pub de_params: DeParams,
    /// Simulation budget per probe point (ordinal criterion only).
    pub sim_min_errors: u64,
    pub sim_max_frames: u64,
    pub bp_iters: u32,
    pub seed: u64,
}

impl DesignConfig {
    pub fn new(k: usize) -> Self {
        DesignConfig {
            k,
            criterion: DesignCriterion::DeThreshold,
            target_ber: 1e-4,
            tol_rel: 0.02,
            de_params: DeParams::default(),
            sim_min_errors: 100,
            sim_max_frames: 200_000,
            bp_iters: 50,
            seed: 1,
        }
    }
}

/// One probed candidate and its objective value.
#[derive(Debug, Clone, Copy)]
pub struct ProbeRecord {
    pub ell: u32,
    pub q: f64,
    pub objective: f64,
}

/// Golden-section minimization of a unimodal objective on [lo, hi] to the
/// given absolute interval width. Deterministic; for non-unimodal objectives
/// this is a local minimizer. Returns the minimizer and every probe made.
pub fn golden_search(
    mut f: impl FnMut(f64) -> f64,
    lo: f64,
    hi: f64,
    tol: f64,
) -> (f64, Vec<(f64, f64)>) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut probes = Vec::new();
    let mut a = lo;
    let mut b = hi;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    probes.push((x1, f1));
    let mut f2 = f(x2);
    probes.push((x2, f2));
    while b - a > tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
            probes.push((x1, f1));
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
            probes.push((x2, f2));
        }
    }
    let x = if f1 <= f2 { x1 } else { x2 };
    (x, probes)
}

/// Search interval for q_ell given the already-fixed higher-rate parameters:
/// q_9 in [1/k, 0.05]; below, q_ell in [1/(10k), q_{ell+1}].
fn search_bounds(ell: u32, fixed: &[f64], k: usize) -> (f64, f64) {
    if ell == 9 {
        (1.0 / k as f64, 0.05)
    } else {
        (1.0 / (10.0 * k as f64), *fixed.last().expect("higher q fixed"))
    }
}

fn fill_pseq(fixed: &[f64], q_ell: f64) -> PSequence {
    // windows below the current one are irrelevant to the prefix objective;
    // fill them with the candidate value to keep the sequence valid
    let mut q = [q_ell; 9];
    q[..fixed.len()].copy_from_slice(fixed);
    PSequence::new(q).expect("candidates stay in (0,1)")
}

fn de_objective(ell: u32, fixed: &[f64], q_ell: f64, cfg: &DesignConfig) -> Result<f64> {
    let pseq = fill_pseq(fixed, q_ell);
    let nd: NodeDegreeDists = if ell == 9 {
        kite_rate_dists(cfg.k, &pseq, 9)?
    } else {
        let upper = kite_rate_dists(cfg.k, &pseq, ell + 1)?;
        let r_ell = (10 * cfg.k) / ell as usize - cfg.k;
        combine_dists(&upper, q_ell, r_ell - upper.rows())
    };
    if nd.rows() == 0 {
        // degenerate window: no parity rows yet, q_ell is irrelevant
        return Ok(f64::INFINITY);
    }
    let ed = edges_from_nodes(&nd)?;
    de_threshold(&nd, &ed, &cfg.de_params)
}

/// Simulated SNR (dB, 0.1 resolution) at which the sampled code first meets
/// the target BER; +inf if not reached within the probe range.
fn sim_objective(ell: u32, fixed: &[f64], q_ell: f64, cfg: &DesignConfig) -> Result<f64> {
    let pseq = fill_pseq(fixed, q_ell);
    let spec = KiteCodeSpec::new(cfg.k, cfg.seed, pseq)?;
    let n = (10 * cfg.k) / ell as usize;
    let meets = |snr_db: f64| -> Result<bool> {
        let rep = simulate_ber(
            &spec,
            n,
            &ChannelConfig::from_snr_db(snr_db),
            cfg.bp_iters,
            cfg.sim_min_errors,
            cfg.sim_max_frames,
            cfg.seed,
        )?;
        Ok(rep.ber <= cfg.target_ber)
    };
    let (mut lo, mut hi) = (-6.0f64, 12.0f64);
    if !meets(hi)? {
        return Ok(f64::INFINITY);
    }
    while hi - lo > 0.1 {
        let mid = 0.5 * (lo + hi);
        if meets(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Selects q_ell with the higher-rate parameters fixed.
pub fn design_step(
    ell: u32,
    fixed: &[f64],
    cfg: &DesignConfig,
) -> Result<(f64, Vec<ProbeRecord>)> {
    if fixed.len() != (9 - ell) as usize {
        return Err(Error::InvalidParameter(format!(
            "design_step ell={ell} expects {} fixed parameters, got {}",
            9 - ell,
            fixed.len()
        )));
    }
    let (lo, hi) = search_bounds(ell, fixed, cfg.k);
    let mut failures: Option<Error> = None;
    let objective = |q: f64| -> f64 {
        let r = match cfg.criterion {
            DesignCriterion::DeThreshold => de_objective(ell, fixed, q, cfg),
            DesignCriterion::SimulationOrdinal => sim_objective(ell, fixed, q, cfg),
        };
        match r {
            Ok(v) => v,
            Err(e) => {
                failures.get_or_insert(e);
                f64::INFINITY
            }
        }
    };
    let tol = cfg.tol_rel * hi;
    let (q, probes) = golden_search(objective, lo, hi, tol);
    if let Some(e) = failures {
        return Err(e);
    }
    Ok((q, probes.into_iter().map(|(q, objective)| ProbeRecord { ell, q, objective }).collect()))
}

#[derive(Debug, Clone)]
pub struct DesignOutcome {
    pub pseq: PSequence,
    pub probes: Vec<ProbeRecord>,
    /// Soft sanity check: the designed q-values are non-increasing from q_9
    /// to q_1 in published designs. A violation is reported, not fatal.
    pub monotone: bool,
}

/// Runs the nine sequential design steps and emits the full p-sequence with
/// the probe log.
pub fn greedy_design(cfg: &DesignConfig) -> Result<DesignOutcome> {
    let mut fixed: Vec<f64> = Vec::with_capacity(9);
    let mut probes = Vec::new();
    for ell in (1..=9u32).rev() {
        let (q, step_probes) = design_step(ell, &fixed, cfg)?;
        probes.extend(step_probes);
        fixed.push(q);
    }
    let monotone = fixed.windows(2).all(|w| w[0] >= w[1]);
    let mut q = [0.0; 9];
    q.copy_from_slice(&fixed);
    Ok(DesignOutcome { pseq: PSequence::new(q)?, probes, monotone })
}
