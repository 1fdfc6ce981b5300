//! Closed-form outer-code analysis over the memoryless q-ary symmetric
//! channel: symbol error parameters, bounded-distance decoding error
//! probability, the exact MDS weight distribution, miscorrection
//! probability, and the 1/t_max! worst-case cap.
//!
//! The alternating sum in the weight distribution cancels catastrophically
//! in floating point at N ≈ 1000, so it is evaluated in exact big integers;
//! the channel sums then run in the log domain seeded by exact `ln A_d`.

use crate::error::{Error, Result};
use crate::math::{ln_binomial, log_sum_exp};
use num_bigint::{BigInt, BigUint, Sign};

/// Per-symbol error parameters of the q-ary symmetric channel induced by an
/// inner bit error probability `P_b` on m-bit symbols.
#[derive(Debug, Clone, Copy)]
pub struct QscParams {
    pub p_b: f64,
    pub m: u32,
    /// P(E = 0) = (1 - P_b)^m
    pub p_c: f64,
    /// P(E = α) = (1 - P_c)/(q - 1) for each nonzero α
    pub p_e: f64,
}

/// Eq-level contract: `p_c + (q-1)·p_e = 1`.
pub fn qsc_params(p_b: f64, m: u32) -> Result<QscParams> {
    if !(0.0..=1.0).contains(&p_b) {
        return Err(Error::InvalidParameter(format!("P_b = {p_b} outside [0,1]")));
    }
    let q = (1u64 << m) as f64;
    let p_c = (1.0 - p_b).powi(m as i32);
    Ok(QscParams { p_b, m, p_c, p_e: (1.0 - p_c) / (q - 1.0) })
}

/// Decoding error probability of bounded-distance decoding: the binomial
/// tail beyond t_max symbol errors, with `(q-1)^t P_e^t` folded into
/// `(1-P_c)^t` for stability.
pub fn p_err(n: usize, k: usize, m: u32, p_b: f64) -> Result<f64> {
    let qsc = qsc_params(p_b, m)?;
    let t_max = (n - k) / 2;
    if qsc.p_c == 1.0 {
        return Ok(0.0);
    }
    let ln_ps = (-qsc.p_c).ln_1p(); // ln(1 - P_c)
    let ln_pc = m as f64 * (-p_b).ln_1p();
    let terms: Vec<f64> = ((t_max + 1)..=n)
        .map(|t| ln_binomial(n as u64, t as u64) + t as f64 * ln_ps + (n - t) as f64 * ln_pc)
        .collect();
    Ok(log_sum_exp(&terms).min(0.0).exp())
}

fn big_binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::ZERO;
    }
    let k = k.min(n - k);
    let mut acc = BigUint::from(1u32);
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// Natural log of a big integer via its top bits; exact to f64 rounding.
pub fn ln_biguint(a: &BigUint) -> f64 {
    if a == &BigUint::ZERO {
        return f64::NEG_INFINITY;
    }
    let bits = a.bits();
    if bits <= 53 {
        let v: u64 = a.try_into().ok().map(|x: u64| x).unwrap_or(u64::MAX);
        (v as f64).ln()
    } else {
        let shift = bits - 53;
        let top: u64 = (a >> shift).try_into().expect("53 bits fit");
        (top as f64).ln() + shift as f64 * std::f64::consts::LN_2
    }
}

/// Exact weight distribution A_0..A_N of an MDS code with the given
/// parameters: `A_d = C(N,d)(q-1) Σ_i (-1)^i C(d-1,i) q^{d-d_min-i}`.
pub fn rs_weight_distribution(n: usize, k: usize, q: u64) -> Vec<BigUint> {
    let d_min = n - k + 1;
    let big_q = BigInt::from(q);
    let mut out = vec![BigUint::ZERO; n + 1];
    out[0] = BigUint::from(1u32);
    for d in d_min..=n {
        let mut inner = BigInt::ZERO;
        let mut q_pow = big_q.pow((d - d_min) as u32);
        for i in 0..=(d - d_min) {
            let c = BigInt::from_biguint(Sign::Plus, big_binomial((d - 1) as u64, i as u64));
            if i % 2 == 0 {
                inner += &c * &q_pow;
            } else {
                inner -= &c * &q_pow;
            }
            if i < d - d_min {
                q_pow /= &big_q;
            }
        }
        let total = BigInt::from_biguint(Sign::Plus, big_binomial(n as u64, d as u64))
            * BigInt::from(q - 1)
            * inner;
        let (sign, mag) = total.into_parts();
        assert_ne!(sign, Sign::Minus, "MDS weight count must be nonnegative");
        out[d] = mag;
    }
    out
}

/// Miscorrection probability of bounded-distance decoding: the sum over
/// wrong codewords at distance d and channel patterns (i matching symbol
/// flips on the codeword support, j mismatching flips on the support, h
/// flips off the support) with total weight beyond t_max landing within
/// t_max of the wrong codeword.
pub fn p_mis(n: usize, k: usize, m: u32, p_b: f64) -> Result<f64> {
    let qsc = qsc_params(p_b, m)?;
    if qsc.p_e == 0.0 {
        return Ok(0.0);
    }
    let q = 1u64 << m;
    let t_max = (n - k) / 2;
    let d_min = n - k + 1;
    let ln_a: Vec<f64> = rs_weight_distribution(n, k, q).iter().map(ln_biguint).collect();
    let ln_pe = qsc.p_e.ln();
    let ln_pc = qsc.p_c.ln();
    let ln_q2 = ((q - 2) as f64).ln();
    let ln_q1 = ((q - 1) as f64).ln();
    let mut terms = Vec::new();
    for d in d_min..=n {
        if ln_a[d] == f64::NEG_INFINITY {
            continue;
        }
        // d - i + h <= t_max forces i >= d - t_max and bounds h
        for i in d.saturating_sub(t_max)..=d {
            let h_cap = t_max + i - d; // from d - i + h <= t_max
            for h in 0..=h_cap.min(n - d) {
                for j in 0..=(d - i) {
                    let w = i + j + h;
                    if w <= t_max {
                        continue;
                    }
                    terms.push(
                        ln_a[d]
                            + ln_binomial(d as u64, i as u64)
                            + ln_binomial((d - i) as u64, j as u64)
                            + ln_binomial((n - d) as u64, h as u64)
                            + j as f64 * ln_q2
                            + h as f64 * ln_q1
                            + w as f64 * ln_pe
                            + (n - w) as f64 * ln_pc,
                    );
                }
            }
        }
    }
    Ok(log_sum_exp(&terms).min(0.0).exp())
}

/// The worst-case miscorrection cap 1/t_max!.
pub fn mceliece_swanson_cap(t_max: u32) -> f64 {
    if t_max <= 20 {
        // exact integer factorial, correctly rounded reciprocal
        1.0 / (1..=t_max as u64).product::<u64>().max(1) as f64
    } else {
        (-statrs::function::gamma::ln_gamma(t_max as f64 + 1.0)).exp()
    }
}

/// log10 of the cap, usable where the linear value underflows.
pub fn mceliece_swanson_log10(t_max: u32) -> f64 {
    -statrs::function::gamma::ln_gamma(t_max as f64 + 1.0) / std::f64::consts::LN_10
}
