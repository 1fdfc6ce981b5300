//! Systematic Reed–Solomon codes over GF(2^m): encoder, Berlekamp–Massey
//! bounded-distance decoder (BM + Chien + Forney), and generalized-RS
//! scrambling.
//!
//! Conventions: a codeword `c = (c_0, …, c_{N-1})` is the polynomial
//! `c(x) = Σ c_i x^{N-1-i}`; the message occupies the first `K` positions.
//! The generator is narrow-sense, `g(x) = Π_{i=1..N-K} (x - α^i)`, so a word
//! is a codeword iff its syndromes at α¹..α^{N-K} vanish. Lengths `N < 2^m-1`
//! are plain shortened codes (the high-order virtual positions are zero and
//! error locators are confined to the transmitted positions).

use crate::error::{Error, Result};
use crate::galois::{GfElem, GfField};
use crate::prng;

/// Outcome of bounded-distance decoding. `Failure` is a value, not an error:
/// it is the decoder's declaration that no codeword lies within radius t_max.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BmOutcome {
    Success(Vec<GfElem>),
    Failure,
}

/// A systematic RS code of length `n` and dimension `k` over GF(2^m).
#[derive(Debug, Clone)]
pub struct RsCode {
    field: GfField,
    n: usize,
    k: usize,
    /// generator coefficients, low degree first; monic of degree n-k
    gen_poly: Vec<GfElem>,
}

impl RsCode {
    pub fn new(field: GfField, n: usize, k: usize) -> Result<Self> {
        let q = field.size();
        if !(k < n && n <= q - 1) {
            return Err(Error::InvalidParameter(format!(
                "RS parameters need K < N <= 2^m - 1, got N={n}, K={k}, q={q}"
            )));
        }
        let mut gen_poly: Vec<GfElem> = vec![1];
        for i in 1..=(n - k) as i64 {
            let root = field.alpha_pow(i);
            let mut next = vec![0; gen_poly.len() + 1];
            for (j, &c) in gen_poly.iter().enumerate() {
                next[j] ^= field.mul(c, root);
                next[j + 1] ^= c;
            }
            gen_poly = next;
        }
        Ok(RsCode { field, n, k, gen_poly })
    }

    pub fn field(&self) -> &GfField {
        &self.field
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn k(&self) -> usize {
        self.k
    }
    /// ⌊(N−K)/2⌋, the guaranteed correction radius.
    pub fn t_max(&self) -> usize {
        (self.n - self.k) / 2
    }
    pub fn d_min(&self) -> usize {
        self.n - self.k + 1
    }
    pub fn gen_poly(&self) -> &[GfElem] {
        &self.gen_poly
    }

    /// Systematic encoding: output is `msg ‖ parity` where the parity is the
    /// remainder of `m(x)·x^{N-K}` modulo the generator.
    pub fn encode(&self, msg: &[GfElem]) -> Result<Vec<GfElem>> {
        if msg.len() != self.k {
            return Err(Error::LengthMismatch { expected: self.k, got: msg.len() });
        }
        let nk = self.n - self.k;
        let f = &self.field;
        let mut cw = Vec::with_capacity(self.n);
        cw.extend_from_slice(msg);
        cw.resize(self.n, 0);
        // long division, high-order coefficients first (positions 0..k)
        let mut rem = cw.clone();
        for i in 0..self.k {
            let coef = rem[i];
            if coef != 0 {
                for j in 0..=nk {
                    // gen_poly is low->high; align its degree-(nk-j) term
                    rem[i + j] ^= f.mul(coef, self.gen_poly[nk - j]);
                }
            }
        }
        cw[self.k..].copy_from_slice(&rem[self.k..]);
        Ok(cw)
    }

    /// True iff the word's syndromes at α¹..α^{N-K} all vanish.
    pub fn is_codeword(&self, word: &[GfElem]) -> bool {
        word.len() == self.n && self.syndromes(word).iter().all(|&s| s == 0)
    }

    fn syndromes(&self, word: &[GfElem]) -> Vec<GfElem> {
        let f = &self.field;
        let nk = self.n - self.k;
        (1..=nk as i64)
            .map(|j| {
                // Horner over c(x) = sum word[i] x^{n-1-i} evaluated at alpha^j
                let aj = f.alpha_pow(j);
                word.iter().fold(0u16, |acc, &c| f.mul(acc, aj) ^ c)
            })
            .collect()
    }

    /// Berlekamp–Massey bounded-distance decoding.
    ///
    /// Returns `Success(c)` iff a codeword `c` with `d(rcv, c) ≤ t_max`
    /// exists (possibly a miscorrection when the true error weight exceeds
    /// t_max); `Failure` otherwise. A returned word is always a codeword.
    pub fn bm_decode(&self, rcv: &[GfElem]) -> Result<BmOutcome> {
        if rcv.len() != self.n {
            return Err(Error::LengthMismatch { expected: self.n, got: rcv.len() });
        }
        let f = &self.field;
        let nk = self.n - self.k;
        let t_max = self.t_max();
        let synd = self.syndromes(rcv);
        if synd.iter().all(|&s| s == 0) {
            return Ok(BmOutcome::Success(rcv.to_vec()));
        }

        // Berlekamp–Massey: error locator lambda(x), low degree first
        let mut lambda: Vec<GfElem> = vec![1];
        let mut prev: Vec<GfElem> = vec![1];
        let mut l = 0usize;
        let mut m = 1usize;
        let mut b: GfElem = 1;
        for i in 0..nk {
            let mut d: GfElem = synd[i];
            for j in 1..=l.min(lambda.len() - 1) {
                d ^= f.mul(lambda[j], synd[i - j]);
            }
            if d == 0 {
                m += 1;
            } else if 2 * l <= i {
                let t = lambda.clone();
                let scale = f.div(d, b)?;
                if lambda.len() < prev.len() + m {
                    lambda.resize(prev.len() + m, 0);
                }
                for (j, &p) in prev.iter().enumerate() {
                    lambda[j + m] ^= f.mul(scale, p);
                }
                l = i + 1 - l;
                prev = t;
                b = d;
                m = 1;
            } else {
                let scale = f.div(d, b)?;
                if lambda.len() < prev.len() + m {
                    lambda.resize(prev.len() + m, 0);
                }
                for (j, &p) in prev.iter().enumerate() {
                    lambda[j + m] ^= f.mul(scale, p);
                }
                m += 1;
            }
        }
        while lambda.last() == Some(&0) {
            lambda.pop();
        }
        let deg = lambda.len() - 1;
        if deg != l || deg == 0 || deg > t_max {
            return Ok(BmOutcome::Failure);
        }

        // Chien search over transmitted positions: position i has locator
        // X = alpha^{n-1-i}; i is in error iff lambda(X^{-1}) = 0.
        let mut err_pos: Vec<usize> = Vec::with_capacity(deg);
        for i in 0..self.n {
            let e = (self.n - 1 - i) as i64;
            let x_inv = f.alpha_pow(-e);
            let mut acc: GfElem = 0;
            for &c in lambda.iter().rev() {
                acc = f.mul(acc, x_inv) ^ c;
            }
            if acc == 0 {
                err_pos.push(i);
            }
        }
        if err_pos.len() != deg {
            return Ok(BmOutcome::Failure);
        }

        // Forney: omega(x) = S(x) * lambda(x) mod x^{nk}
        let mut omega = vec![0u16; nk];
        for (i, &s) in synd.iter().enumerate() {
            if s == 0 {
                continue;
            }
            for (j, &c) in lambda.iter().enumerate() {
                if i + j < nk {
                    omega[i + j] ^= f.mul(s, c);
                }
            }
        }
        // lambda'(x): formal derivative keeps odd-degree terms
        let mut corrected = rcv.to_vec();
        for &i in &err_pos {
            let e = (self.n - 1 - i) as i64;
            let x_inv = f.alpha_pow(-e);
            let mut om: GfElem = 0;
            for &c in omega.iter().rev() {
                om = f.mul(om, x_inv) ^ c;
            }
            let mut dl: GfElem = 0;
            for (j, &c) in lambda.iter().enumerate().skip(1).step_by(2) {
                // derivative term j*c x^{j-1}; char 2 keeps odd j with coeff c
                let _ = j;
                dl ^= f.mul(c, f.pow(x_inv, (j - 1) as u64));
            }
            if dl == 0 {
                return Ok(BmOutcome::Failure);
            }
            let magnitude = f.div(om, dl)?;
            if magnitude == 0 {
                return Ok(BmOutcome::Failure);
            }
            corrected[i] ^= magnitude;
        }
        if self.syndromes(&corrected).iter().all(|&s| s == 0) {
            Ok(BmOutcome::Success(corrected))
        } else {
            Ok(BmOutcome::Failure)
        }
    }
}

/// Position-wise nonzero multipliers turning the outer code into a random
/// generalized-RS code, which makes the post-inner-decoder channel symmetric
/// over the alphabet.
#[derive(Debug, Clone)]
pub struct GrsScrambler {
    multipliers: Vec<GfElem>,
    inverses: Vec<GfElem>,
}

impl GrsScrambler {
    /// Samples one nonzero factor per coded-symbol position.
    pub fn sample(field: &GfField, len: usize, seed: u64) -> Self {
        let s = prng::substream(seed, prng::DOMAIN_GRS);
        let qm1 = (field.size() - 1) as u64;
        let multipliers: Vec<GfElem> =
            (0..len).map(|i| (1 + prng::draw_u64(s, i as u64) % qm1) as GfElem).collect();
        let inverses = multipliers.iter().map(|&a| field.inv(a).expect("nonzero")).collect();
        GrsScrambler { multipliers, inverses }
    }

    /// All-ones scrambler (identity), for plain-RS operation.
    pub fn identity(len: usize) -> Self {
        GrsScrambler { multipliers: vec![1; len], inverses: vec![1; len] }
    }

    /// Builds a scrambler from explicit nonzero multipliers.
    pub fn from_multipliers(field: &GfField, multipliers: Vec<GfElem>) -> Result<Self> {
        let inverses =
            multipliers.iter().map(|&a| field.inv(a)).collect::<Result<Vec<GfElem>>>()?;
        Ok(GrsScrambler { multipliers, inverses })
    }

    pub fn len(&self) -> usize {
        self.multipliers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.multipliers.is_empty()
    }

    pub fn multipliers(&self) -> &[GfElem] {
        &self.multipliers
    }

    pub fn scramble(&self, field: &GfField, cw: &[GfElem]) -> Result<Vec<GfElem>> {
        if cw.len() != self.multipliers.len() {
            return Err(Error::LengthMismatch { expected: self.multipliers.len(), got: cw.len() });
        }
        Ok(cw.iter().zip(&self.multipliers).map(|(&c, &a)| field.mul(c, a)).collect())
    }

    pub fn descramble(&self, field: &GfField, cw: &[GfElem]) -> Result<Vec<GfElem>> {
        if cw.len() != self.inverses.len() {
            return Err(Error::LengthMismatch { expected: self.inverses.len(), got: cw.len() });
        }
        Ok(cw.iter().zip(&self.inverses).map(|(&c, &a)| field.mul(c, a)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rs73() -> RsCode {
        RsCode::new(GfField::new(3).unwrap(), 7, 3).unwrap()
    }

    /// Independent oracle: remainder of m(x)·x^{n-k} by schoolbook division.
    fn division_parity(code: &RsCode, msg: &[GfElem]) -> Vec<GfElem> {
        let f = code.field();
        let g_hi: Vec<GfElem> = code.gen_poly().iter().rev().copied().collect();
        let mut dividend = msg.to_vec();
        dividend.resize(code.n(), 0);
        for i in 0..code.k() {
            let c = dividend[i];
            if c != 0 {
                for (j, &gc) in g_hi.iter().enumerate() {
                    dividend[i + j] ^= f.mul(c, gc);
                }
            }
        }
        dividend.split_off(code.k())
    }

    #[test]
    fn gen_poly_rs73() {
        // g(x) = prod_{i=1..4}(x - a^i) = x^4 + 3x^3 + x^2 + 2x + 3 under x^3+x+1
        assert_eq!(rs73().gen_poly(), &[3, 2, 1, 3, 1]);
    }

    #[test]
    fn encode_zero_and_known_parity() {
        let code = rs73();
        assert_eq!(code.encode(&[0, 0, 0]).unwrap(), vec![0; 7]);
        let cw = code.encode(&[1, 2, 3]).unwrap();
        assert_eq!(cw, vec![1, 2, 3, 0, 0, 1, 3]);
        assert!(code.is_codeword(&cw));
        assert_eq!(&cw[3..], &division_parity(&code, &[1, 2, 3])[..]);
        assert!(code.encode(&[1, 2]).is_err());
    }

    #[test]
    fn zero_error_roundtrip() {
        let code = rs73();
        for s in 0..20u64 {
            let msg: Vec<GfElem> =
                (0..3).map(|i| (prng::draw_u64(s, i) % 8) as GfElem).collect();
            let cw = code.encode(&msg).unwrap();
            assert_eq!(code.bm_decode(&cw).unwrap(), BmOutcome::Success(cw.clone()));
        }
    }

    #[test]
    fn all_single_errors_corrected_rs73() {
        let code = rs73();
        for mval in 0..512u16 {
            let msg = [mval & 7, (mval >> 3) & 7, (mval >> 6) & 7];
            let cw = code.encode(&msg).unwrap();
            for pos in 0..7 {
                for e in 1..8u16 {
                    let mut rcv = cw.clone();
                    rcv[pos] ^= e;
                    match code.bm_decode(&rcv).unwrap() {
                        BmOutcome::Success(out) => assert_eq!(out, cw),
                        BmOutcome::Failure => panic!("single error not corrected"),
                    }
                }
            }
        }
    }

    #[test]
    fn weight_three_outcomes_are_codewords_or_failure() {
        // beyond t_max=2 the decoder may fail or miscorrect; a miscorrection
        // must still be a valid codeword within radius t_max of the input
        let code = rs73();
        let cw = code.encode(&[5, 1, 4]).unwrap();
        let mut mis = 0u32;
        let mut fails = 0u32;
        for i in 0..7 {
            for j in (i + 1)..7 {
                for l in (j + 1)..7 {
                    let mut rcv = cw.clone();
                    rcv[i] ^= 3;
                    rcv[j] ^= 6;
                    rcv[l] ^= 1;
                    match code.bm_decode(&rcv).unwrap() {
                        BmOutcome::Success(out) => {
                            assert!(code.is_codeword(&out));
                            let d = out.iter().zip(&rcv).filter(|(a, b)| a != b).count();
                            assert!(d <= code.t_max());
                            mis += 1;
                        }
                        BmOutcome::Failure => fails += 1,
                    }
                }
            }
        }
        assert!(mis + fails == 35);
        assert!(fails > 0);
    }

    #[test]
    fn bounded_distance_random_trials() {
        // random codewords, random error patterns of weight <= t_max
        for (m, n, k, trials) in [(3u32, 7usize, 3usize, 10_000u32), (4, 15, 11, 10_000), (8, 255, 223, 10_000)]
        {
            let code = RsCode::new(GfField::new(m).unwrap(), n, k).unwrap();
            let q = code.field().size() as u64;
            let mut idx = 0u64;
            let seed = prng::substream(2024, m as u64);
            let mut draw = move || {
                let v = prng::draw_u64(seed, idx);
                idx += 1;
                v
            };
            for _ in 0..trials {
                let msg: Vec<GfElem> = (0..k).map(|_| (draw() % q) as GfElem).collect();
                let cw = code.encode(&msg).unwrap();
                let w = (draw() % (code.t_max() as u64 + 1)) as usize;
                let mut rcv = cw.clone();
                let mut touched = vec![false; n];
                let mut placed = 0;
                while placed < w {
                    let pos = (draw() % n as u64) as usize;
                    if touched[pos] {
                        continue;
                    }
                    touched[pos] = true;
                    rcv[pos] ^= (1 + draw() % (q - 1)) as GfElem;
                    placed += 1;
                }
                match code.bm_decode(&rcv).unwrap() {
                    BmOutcome::Success(out) => assert_eq!(out, cw),
                    BmOutcome::Failure => panic!("weight-{w} pattern not corrected in [{n},{k}]"),
                }
            }
        }
    }

    #[test]
    fn shortened_code_roundtrip() {
        // [12, 8] shortened from GF(16): same machinery, fewer positions
        let code = RsCode::new(GfField::new(4).unwrap(), 12, 8).unwrap();
        let msg: Vec<GfElem> = (0..8).map(|i| (i * 3 % 16) as GfElem).collect();
        let cw = code.encode(&msg).unwrap();
        assert!(code.is_codeword(&cw));
        let mut rcv = cw.clone();
        rcv[0] ^= 9;
        rcv[11] ^= 2;
        assert_eq!(code.bm_decode(&rcv).unwrap(), BmOutcome::Success(cw));
    }

    #[test]
    fn scrambler_roundtrip_and_known_value() {
        let f = GfField::new(3).unwrap();
        let id = GrsScrambler::identity(7);
        let cw = vec![1, 2, 3, 4, 5, 6, 7];
        assert_eq!(id.scramble(&f, &cw).unwrap(), cw);

        let s = GrsScrambler::sample(&f, 7, 99);
        let scr = s.scramble(&f, &cw).unwrap();
        assert_eq!(s.descramble(&f, &scr).unwrap(), cw);
        for (i, (&a, &c)) in s.multipliers().iter().zip(&cw).enumerate() {
            assert_eq!(scr[i], f.mul(c, a));
            assert_ne!(a, 0);
        }
        // single-position check against the gf_mul table: 3 * 2 = 6
        assert_eq!(f.mul(3, 2), 6);
    }

    #[test]
    fn scrambling_preserves_error_positions() {
        // descramble(scramble(c) + e) differs from c exactly where e is nonzero
        let f = GfField::new(4).unwrap();
        let code = RsCode::new(GfField::new(4).unwrap(), 15, 11).unwrap();
        let s = GrsScrambler::sample(&f, 15, 7);
        let msg: Vec<GfElem> = (0..11).map(|i| (i & 15) as GfElem).collect();
        let cw = code.encode(&msg).unwrap();
        let scr = s.scramble(&f, &cw).unwrap();
        for trial in 0..50u64 {
            let mut noisy = scr.clone();
            let mut errpos = vec![];
            for p in 0..15usize {
                if prng::draw_unit(trial, p as u64) < 0.2 {
                    noisy[p] ^= (1 + prng::draw_u64(trial, 100 + p as u64) % 15) as GfElem;
                    errpos.push(p);
                }
            }
            let back = s.descramble(&f, &noisy).unwrap();
            let diff: Vec<usize> =
                (0..15).filter(|&p| back[p] != cw[p]).collect();
            assert_eq!(diff, errpos);
        }
    }
}
