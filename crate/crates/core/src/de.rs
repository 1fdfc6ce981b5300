//! Gaussian-approximation density evolution for Kite ensembles.
//!
//! The normal graph has information variable nodes (A), parity variable
//! nodes (B, the dual-diagonal chain) and check nodes (C). Message means are
//! tracked through the transform `φ(x) = E[tanh(Y/2)]`, `Y ~ N(x, 2x)`,
//! with `φ(0) = 0`. A-node degrees (w.r.t. H_v) follow `Λ`, C-node left
//! degrees follow `R`; the B-chain is deterministic, so only those two
//! families carry distributions. Margin effects of the B/C chain are
//! ignored.
//!
//! φ has no closed form; it is evaluated by Gauss–Hermite quadrature, cached
//! on a monotone log-spaced table with shape-preserving cubic interpolation,
//! and inverted by bisection on the interpolant (so the round trip
//! `φ(φ⁻¹(y)) = y` holds to 1e-9 by construction).

use crate::error::{Error, Result};
use crate::kite::PSequence;
use crate::math::{gauss_hermite, ln_binomial, q_func};
use std::sync::OnceLock;

/// Node-perspective degree distributions of one prefix ensemble.
#[derive(Debug, Clone)]
pub struct NodeDegreeDists {
    /// Λ_0..Λ_r: fraction of A-nodes of H_v-degree i.
    pub lambda_nodes: Vec<f64>,
    /// R_0..R_k: fraction of C-nodes of left degree i.
    pub r_nodes: Vec<f64>,
    pub k: usize,
}

impl NodeDegreeDists {
    /// Number of parity rows r implied by the Λ support.
    pub fn rows(&self) -> usize {
        self.lambda_nodes.len() - 1
    }

    /// Zero-row ensemble, the identity for [`combine_dists`].
    pub fn empty(k: usize) -> Self {
        NodeDegreeDists { lambda_nodes: vec![1.0], r_nodes: vec![0.0; k + 1], k }
    }
}

/// Edge-perspective distributions: `λ_i ∝ iΛ_i`, `ρ_i ∝ iR_i`.
#[derive(Debug, Clone)]
pub struct EdgeDegreeDists {
    pub lambda: Vec<f64>,
    pub rho: Vec<f64>,
}

fn binom_pmf(n: usize, p: f64) -> Vec<f64> {
    let (lp, l1p) = (p.ln(), (-p).ln_1p());
    let mut v: Vec<f64> = (0..=n)
        .map(|i| (ln_binomial(n as u64, i as u64) + i as f64 * lp + (n - i) as f64 * l1p).exp())
        .collect();
    let total: f64 = v.iter().sum();
    for x in &mut v {
        *x /= total;
    }
    v
}

/// Fresh-window distributions: Λ over `rows` at parameter q, R over k.
pub fn binomial_node_dists(q: f64, rows: usize, k: usize) -> Result<NodeDegreeDists> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::InvalidParameter(format!("q = {q} outside (0,1)")));
    }
    Ok(NodeDegreeDists { lambda_nodes: binom_pmf(rows, q), r_nodes: binom_pmf(k, q), k })
}

/// Extends an ensemble by `delta` rows at parameter `q_ell`: Λ convolves
/// with Binomial(delta, q_ell); R is the row-count-weighted mixture.
pub fn combine_dists(upper: &NodeDegreeDists, q_ell: f64, delta: usize) -> NodeDegreeDists {
    if delta == 0 {
        return upper.clone();
    }
    let add = binom_pmf(delta, q_ell);
    let mut lambda = vec![0.0; upper.lambda_nodes.len() + delta];
    for (i, &a) in upper.lambda_nodes.iter().enumerate() {
        if a == 0.0 {
            continue;
        }
        for (j, &b) in add.iter().enumerate() {
            lambda[i + j] += a * b;
        }
    }
    let r_old = upper.rows() as f64;
    let r_new = r_old + delta as f64;
    let fresh = binom_pmf(upper.k, q_ell);
    let r_nodes = upper
        .r_nodes
        .iter()
        .zip(&fresh)
        .map(|(&a, &b)| (r_old * a + delta as f64 * b) / r_new)
        .collect();
    NodeDegreeDists { lambda_nodes: lambda, r_nodes, k: upper.k }
}

/// Distributions of the rate-`ell`/10 prefix of a Kite ensemble, built by
/// folding the windows q_9 down to q_ell.
pub fn kite_rate_dists(k: usize, pseq: &PSequence, ell: u32) -> Result<NodeDegreeDists> {
    if !(1..=9).contains(&ell) {
        return Err(Error::InvalidParameter(format!("rate index {ell} outside 1..=9")));
    }
    let mut nd = NodeDegreeDists::empty(k);
    for j in (ell..=9).rev() {
        let r_j = (10 * k) / j as usize - k;
        let delta = r_j - nd.rows();
        nd = combine_dists(&nd, pseq.q(j), delta);
    }
    Ok(nd)
}

/// Size-biased (edge-perspective) distributions.
pub fn edges_from_nodes(nd: &NodeDegreeDists) -> Result<EdgeDegreeDists> {
    let size_bias = |node: &[f64]| -> Result<Vec<f64>> {
        let mean: f64 = node.iter().enumerate().map(|(i, &v)| i as f64 * v).sum();
        if mean <= 0.0 {
            return Err(Error::InvalidParameter("degree distribution has zero mean".into()));
        }
        Ok(node.iter().enumerate().map(|(i, &v)| i as f64 * v / mean).collect())
    };
    Ok(EdgeDegreeDists { lambda: size_bias(&nd.lambda_nodes)?, rho: size_bias(&nd.r_nodes)? })
}

// --- phi transform ---------------------------------------------------------

const PHI_KNOTS: usize = 8192;
const PHI_X_MIN: f64 = 1e-10;
// beyond this, 1 - phi(x) falls under f64 resolution near 1.0
const PHI_X_MAX: f64 = 130.0;

/// Direct Gauss–Hermite evaluation of φ (256 nodes; worst-case error
/// ~1e-9 near x ≈ 20, far better elsewhere). Used to build the cached
/// table and as the test oracle.
pub fn phi_exact(x: f64) -> f64 {
    assert!(x >= 0.0, "phi domain is x >= 0");
    if x == 0.0 {
        return 0.0;
    }
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    let (nodes, weights) = RULE.get_or_init(|| gauss_hermite(256));
    let s = 2.0 * x.sqrt();
    let inv_sqrt_pi = 1.0 / std::f64::consts::PI.sqrt();
    if x < 10.0 {
        let mut acc = 0.0;
        for (&t, &w) in nodes.iter().zip(weights) {
            acc += w * ((x + s * t) * 0.5).tanh();
        }
        acc * inv_sqrt_pi
    } else {
        // complement form avoids cancellation: 1 - tanh(y/2) = 2/(1+e^y)
        let mut comp = 0.0;
        for (&t, &w) in nodes.iter().zip(weights) {
            let y = x + s * t;
            let c = if y > 0.0 {
                let e = (-y).exp();
                2.0 * e / (1.0 + e)
            } else {
                2.0 / (1.0 + y.exp())
            };
            comp += w * c;
        }
        1.0 - comp * inv_sqrt_pi
    }
}

struct PhiTable {
    ln_x: Vec<f64>,
    y: Vec<f64>,
    slope: Vec<f64>, // dy/d(ln x), shape-preserving
}

impl PhiTable {
    fn build() -> Self {
        let lo = PHI_X_MIN.ln();
        let hi = PHI_X_MAX.ln();
        let ln_x: Vec<f64> =
            (0..PHI_KNOTS).map(|i| lo + (hi - lo) * i as f64 / (PHI_KNOTS - 1) as f64).collect();
        let y: Vec<f64> = ln_x.iter().map(|&l| phi_exact(l.exp())).collect();
        // Fritsch–Carlson monotone cubic slopes
        let n = ln_x.len();
        let h: Vec<f64> = (0..n - 1).map(|i| ln_x[i + 1] - ln_x[i]).collect();
        let d: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
        let mut slope = vec![0.0; n];
        slope[0] = d[0];
        slope[n - 1] = d[n - 2];
        for i in 1..n - 1 {
            if d[i - 1] * d[i] <= 0.0 {
                slope[i] = 0.0;
            } else {
                let w1 = 2.0 * h[i] + h[i - 1];
                let w2 = h[i] + 2.0 * h[i - 1];
                slope[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
            }
        }
        PhiTable { ln_x, y, slope }
    }

    fn instance() -> &'static PhiTable {
        static TABLE: OnceLock<PhiTable> = OnceLock::new();
        TABLE.get_or_init(PhiTable::build)
    }

    /// Hermite cubic on interval `i` at parameter `s = lx - ln_x[i]`.
    #[inline]
    fn eval_interval(&self, i: usize, lx: f64) -> f64 {
        let h = self.ln_x[i + 1] - self.ln_x[i];
        let t = (lx - self.ln_x[i]) / h;
        let (y0, y1, m0, m1) = (self.y[i], self.y[i + 1], self.slope[i] * h, self.slope[i + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        y0 * (2.0 * t3 - 3.0 * t2 + 1.0)
            + m0 * (t3 - 2.0 * t2 + t)
            + y1 * (-2.0 * t3 + 3.0 * t2)
            + m1 * (t3 - t2)
    }

    fn eval(&self, x: f64) -> f64 {
        if x <= PHI_X_MIN {
            // phi is essentially linear at the origin: phi(x) ≈ phi(xmin)·x/xmin
            return self.y[0] * (x / PHI_X_MIN);
        }
        if x >= PHI_X_MAX {
            return self.y[PHI_KNOTS - 1];
        }
        let lx = x.ln();
        let step = (self.ln_x[PHI_KNOTS - 1] - self.ln_x[0]) / (PHI_KNOTS - 1) as f64;
        let mut i = (((lx - self.ln_x[0]) / step) as usize).min(PHI_KNOTS - 2);
        if lx < self.ln_x[i] {
            i -= 1;
        } else if lx > self.ln_x[i + 1] {
            i += 1;
        }
        self.eval_interval(i, lx).clamp(0.0, 1.0)
    }

    fn invert(&self, yv: f64) -> f64 {
        if yv <= 0.0 {
            return 0.0;
        }
        let ymax = self.y[PHI_KNOTS - 1];
        if yv >= ymax {
            return PHI_X_MAX;
        }
        if yv <= self.y[0] {
            return PHI_X_MIN * (yv / self.y[0]);
        }
        // locate the knot interval (y is strictly increasing)
        let i = match self.y.binary_search_by(|probe| probe.partial_cmp(&yv).unwrap()) {
            Ok(exact) => return self.ln_x[exact].exp(),
            Err(ins) => ins - 1,
        };
        // bisection on the cubic within the interval
        let (mut lo, mut hi) = (self.ln_x[i], self.ln_x[i + 1]);
        for _ in 0..64 {
            let mid = 0.5 * (lo + hi);
            let f = self.eval_interval(i, mid);
            if (f - yv).abs() < 1e-13 {
                return mid.exp();
            }
            if f < yv {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (0.5 * (lo + hi)).exp()
    }
}

/// The transform `E[tanh(Y/2)]`, `Y ~ N(x, 2x)`; `φ(0) = 0`. Tabulated.
pub fn phi(x: f64) -> f64 {
    assert!(x >= 0.0, "phi domain is x >= 0");
    if x == 0.0 {
        return 0.0;
    }
    PhiTable::instance().eval(x)
}

/// Inverse of [`phi`] on [0, 1). Errors on y ≥ 1.
pub fn phi_inv(y: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&y) {
        return Err(Error::InvalidParameter(format!("phi_inv argument {y} outside [0,1)")));
    }
    Ok(PhiTable::instance().invert(y))
}

// --- density evolution -----------------------------------------------------

/// Stopping parameters of one density-evolution run.
///
/// `max_iters` defaults to 50, mirroring the decoder's preset iteration cap;
/// published thresholds track a finite-iteration decoder, and the low-rate
/// thresholds drift visibly if the recursion is allowed thousands of
/// iterations.
#[derive(Debug, Clone, Copy)]
pub struct DeParams {
    pub target_ber: f64,
    pub delta_b: f64,
    pub max_iters: u32,
}

impl Default for DeParams {
    fn default() -> Self {
        DeParams { target_ber: 1e-4, delta_b: 1e-10, max_iters: 50 }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct DeResult {
    /// Final ε′ (information-bit error estimate).
    pub ber: f64,
    pub iterations: u32,
    /// True iff ε′ reached the target.
    pub converged: bool,
}

const SUPPORT_EPS: f64 = 1e-15;

fn support(v: &[f64], from: usize) -> Vec<(usize, f64)> {
    v.iter().enumerate().skip(from).filter(|(_, &w)| w > SUPPORT_EPS).map(|(i, &w)| (i, w)).collect()
}

/// One density-evolution run at noise level `sigma2`.
///
/// Four update steps per iteration: A→C means (affine in degree), the B→C
/// chain message, C→A means through φ⁻¹ with the squared B-message factor,
/// C→B means with the degree-j exponent (j = 0 passes the B message through),
/// then the decision BER ε′ = Σ Λ_i ε_i.
pub fn de_ga_run(
    nd: &NodeDegreeDists,
    ed: &EdgeDegreeDists,
    sigma2: f64,
    params: &DeParams,
) -> Result<DeResult> {
    if sigma2 <= 0.0 {
        return Err(Error::InvalidParameter("sigma2 must be positive".into()));
    }
    let mu0 = 2.0 / sigma2;
    let sup_lam = support(&ed.lambda, 1);
    let sup_rho = support(&ed.rho, 1);
    let sup_rn = support(&nd.r_nodes, 0);
    let sup_ln = support(&nd.lambda_nodes, 0);
    if sup_lam.is_empty() || sup_rho.is_empty() {
        return Err(Error::InvalidParameter("empty edge-degree support".into()));
    }

    let mut eps = q_func((mu0 / 2.0).sqrt());
    let mut mu_ca = 0.0f64;
    let mut mu_cb = 0.0f64;
    let mut iterations = 0;
    for it in 1..=params.max_iters {
        iterations = it;
        // Step 3.1 + the edge-average of phi over A->C messages
        let mut s = 0.0;
        for &(i, w) in &sup_lam {
            s += w * phi(mu0 + (i as f64 - 1.0) * mu_ca);
        }
        // Step 3.2
        let mu_bc = mu0 + mu_cb;
        let pb = phi(mu_bc);
        let (ln_pb, ln_s) = (pb.ln(), s.ln());
        // Step 3.3a: C -> A (over edge-perspective left degrees)
        let mut new_ca = 0.0;
        for &(j, w) in &sup_rho {
            let arg = (2.0 * ln_pb + (j as f64 - 1.0) * ln_s).exp();
            new_ca += w * phi_inv(arg.min(1.0 - f64::EPSILON))?;
        }
        // Step 3.3b: C -> B (node perspective, j = 0 included)
        let mut new_cb = 0.0;
        for &(j, w) in &sup_rn {
            let arg = (ln_pb + j as f64 * ln_s).exp();
            new_cb += w * phi_inv(arg.min(1.0 - f64::EPSILON))?;
        }
        mu_ca = new_ca;
        mu_cb = new_cb;
        // Step 3.4: decisions over A-node degrees
        let mut eps_next = 0.0;
        for &(i, w) in &sup_ln {
            let mu_i = mu0 + i as f64 * mu_ca;
            eps_next += w * q_func((mu_i / 2.0).sqrt());
        }
        if eps_next <= params.target_ber {
            return Ok(DeResult { ber: eps_next, iterations, converged: true });
        }
        if (eps - eps_next).abs() <= params.delta_b {
            return Ok(DeResult { ber: eps_next, iterations, converged: false });
        }
        eps = eps_next;
    }
    Ok(DeResult { ber: eps, iterations, converged: false })
}

/// Minimal SNR (dB, resolution 0.01) in [-10, 12] at which the recursion
/// reaches the target BER; +∞ when it never does.
pub fn de_threshold(nd: &NodeDegreeDists, ed: &EdgeDegreeDists, params: &DeParams) -> Result<f64> {
    let converges = |snr_db: f64| -> Result<bool> {
        let sigma2 = 10f64.powf(-snr_db / 10.0);
        Ok(de_ga_run(nd, ed, sigma2, params)?.converged)
    };
    let (mut lo, mut hi) = (-10.0f64, 12.0f64);
    if !converges(hi)? {
        return Ok(f64::INFINITY);
    }
    if converges(lo)? {
        return Ok(lo);
    }
    while hi - lo > 0.01 {
        let mid = 0.5 * (lo + hi);
        if converges(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}
