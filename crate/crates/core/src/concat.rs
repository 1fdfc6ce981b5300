//! The RS-Kite serially concatenated codec.
//!
//! Encoding: the data stream is split into ℓ RS messages, RS-encoded,
//! optionally GRS-scrambled, serialized to bits (codeword-major,
//! symbol-major, most-significant bit first — fixed here since the stages
//! share no interleaver) and fed to the inner Kite code, whose dimension is
//! exactly `ℓ·m·N`.
//!
//! Decoding is the incremental-redundancy loop with feedback: inner BP at
//! the current prefix length with every already-decoded RS codeword pinned
//! as known bits, then a BM sweep over the undecoded codewords; redundancy
//! grows by Δ_r only on sweeps that decode nothing new.

use crate::bp::{self, PinnedBits};
use crate::channel::{biawgn_capacity, ChannelConfig, ChannelStream};
use crate::error::{Error, Result};
use crate::galois::GfElem;
use crate::kite::{KiteCodeSpec, ParityRealization, PSequence};
use crate::prng;
use crate::reed_solomon::{BmOutcome, GrsScrambler, RsCode};
use rayon::prelude::*;

/// MSB-first bit unpacking of m-bit symbols.
pub fn bits_to_symbols(bits: &[u8], m: u32) -> Vec<GfElem> {
    assert_eq!(bits.len() % m as usize, 0);
    bits.chunks(m as usize)
        .map(|chunk| chunk.iter().fold(0u16, |acc, &b| (acc << 1) | b as u16))
        .collect()
}

/// MSB-first bit packing of m-bit symbols.
pub fn symbols_to_bits(syms: &[GfElem], m: u32) -> Vec<u8> {
    let mut out = Vec::with_capacity(syms.len() * m as usize);
    for &s in syms {
        for bit in (0..m).rev() {
            out.push(((s >> bit) & 1) as u8);
        }
    }
    out
}

/// Parameters of one RS-Kite code: outer code, codeword count ℓ, inner Kite
/// spec with k = ℓ·m·N, and the incremental-redundancy loop settings.
#[derive(Debug, Clone)]
pub struct ConcatSpec {
    rs: RsCode,
    ell: usize,
    kite: KiteCodeSpec,
    /// Per-codeword scramblers (identity when scrambling is disabled).
    scramblers: Vec<GrsScrambler>,
    /// Initial redundancy r_0.
    pub r0: usize,
    /// Redundancy increment Δ_r.
    pub delta_r: usize,
    /// Inner BP iteration cap J.
    pub bp_iters: u32,
    /// Maximum total parity T.
    pub max_parity: usize,
}

impl ConcatSpec {
    /// Builds the concatenated code. Defaults: `r_0 = ⌈k/0.95⌉ - k`
    /// (starting near the highest designed rate), `Δ_r = ⌈k/100⌉` (about 1%
    /// overhead per step), `J = 50`, `T = 9k` (the rate-0.1 design floor).
    pub fn new(
        rs: RsCode,
        ell: usize,
        seed: u64,
        pseq: PSequence,
        scramble: bool,
    ) -> Result<Self> {
        if ell == 0 {
            return Err(Error::InvalidParameter("ell must be >= 1".into()));
        }
        let m = rs.field().m();
        let k = ell * m as usize * rs.n();
        let kite = KiteCodeSpec::new(k, seed, pseq)?;
        let grs_stream = prng::substream(seed, prng::DOMAIN_GRS);
        let qm1 = (rs.field().size() - 1) as u64;
        let scramblers = (0..ell)
            .map(|i| {
                if scramble {
                    let mult: Vec<GfElem> = (0..rs.n())
                        .map(|j| {
                            (1 + prng::draw_u64(grs_stream, (i * rs.n() + j) as u64) % qm1)
                                as GfElem
                        })
                        .collect();
                    GrsScrambler::from_multipliers(rs.field(), mult)
                } else {
                    Ok(GrsScrambler::identity(rs.n()))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ConcatSpec {
            rs,
            ell,
            kite,
            scramblers,
            // ceil(k/0.95) - k and ceil(k/100)
            r0: (20 * k).div_ceil(19) - k,
            delta_r: k.div_ceil(100),
            bp_iters: 50,
            max_parity: 9 * k,
        })
    }

    pub fn rs(&self) -> &RsCode {
        &self.rs
    }
    pub fn ell(&self) -> usize {
        self.ell
    }
    pub fn kite(&self) -> &KiteCodeSpec {
        &self.kite
    }
    /// Data payload in bits: ℓ·m·K.
    pub fn data_len(&self) -> usize {
        self.ell * self.rs.field().m() as usize * self.rs.k()
    }
    /// Inner information length in bits: ℓ·m·N.
    pub fn inner_k(&self) -> usize {
        self.kite.k
    }

    /// Serialized (scrambled) RS codewords: the inner encoder input, equal
    /// to the systematic part of the coded stream.
    pub fn inner_input(&self, u: &[u8]) -> Result<Vec<u8>> {
        if u.len() != self.data_len() {
            return Err(Error::LengthMismatch { expected: self.data_len(), got: u.len() });
        }
        let m = self.rs.field().m();
        let mk = m as usize * self.rs.k();
        let mut v = Vec::with_capacity(self.inner_k());
        for (i, chunk) in u.chunks(mk).enumerate() {
            let msg = bits_to_symbols(chunk, m);
            let cw = self.rs.encode(&msg)?;
            let scrambled = self.scramblers[i].scramble(self.rs.field(), &cw)?;
            v.extend(symbols_to_bits(&scrambled, m));
        }
        Ok(v)
    }

    /// Full coded prefix: systematic part followed by `parity_total` inner
    /// parity bits.
    pub fn encode(&self, u: &[u8], parity_total: usize) -> Result<Vec<u8>> {
        let v = self.inner_input(u)?;
        self.kite.encode_prefix(&v, self.inner_k() + parity_total)
    }

    /// Step 2.2: one BM sweep over the not-yet-decoded codewords, reading
    /// the inner decoder's systematic hard bits. Returns the newly decoded
    /// indices; γ flags never revert.
    pub fn bm_sweep(
        &self,
        hard_info: &[u8],
        gamma: &mut [bool],
        decoded: &mut [Option<Vec<GfElem>>],
    ) -> Result<Vec<usize>> {
        if hard_info.len() != self.inner_k() {
            return Err(Error::LengthMismatch { expected: self.inner_k(), got: hard_info.len() });
        }
        let m = self.rs.field().m();
        let mn = m as usize * self.rs.n();
        let mut newly = Vec::new();
        for i in 0..self.ell {
            if gamma[i] {
                continue;
            }
            let syms = bits_to_symbols(&hard_info[i * mn..(i + 1) * mn], m);
            let rcv = self.scramblers[i].descramble(self.rs.field(), &syms)?;
            if let BmOutcome::Success(cw) = self.rs.bm_decode(&rcv)? {
                debug_assert!(self.rs.is_codeword(&cw));
                decoded[i] = Some(cw);
                gamma[i] = true;
                newly.push(i);
            }
        }
        Ok(newly)
    }

    /// Pinned inner positions derived from the decoded codewords (their
    /// scrambled serialized bits).
    fn pins(&self, decoded: &[Option<Vec<GfElem>>], n: usize) -> Result<PinnedBits> {
        let m = self.rs.field().m();
        let mn = m as usize * self.rs.n();
        let mut pins = PinnedBits::none(n);
        for (i, cw) in decoded.iter().enumerate() {
            if let Some(cw) = cw {
                let scrambled = self.scramblers[i].scramble(self.rs.field(), cw)?;
                for (j, &b) in symbols_to_bits(&scrambled, m).iter().enumerate() {
                    pins.pin(i * mn + j, b);
                }
            }
        }
        Ok(pins)
    }

    fn assemble(&self, decoded: &[Option<Vec<GfElem>>]) -> Vec<u8> {
        let mut u = Vec::with_capacity(self.data_len());
        for cw in decoded {
            let cw = cw.as_ref().expect("all gamma set");
            u.extend(symbols_to_bits(&cw[..self.rs.k()], self.rs.field().m()));
        }
        u
    }
}

/// Anything that can serve a growing noisy prefix.
pub trait PrefixSource {
    fn y_prefix(&mut self, n: usize) -> Result<&[f64]>;
}

impl PrefixSource for ChannelStream {
    fn y_prefix(&mut self, n: usize) -> Result<&[f64]> {
        ChannelStream::y_prefix(self, n)
    }
}

/// Fixed received vector, for constructed decoding scenarios.
pub struct VecSource(pub Vec<f64>);

impl PrefixSource for VecSource {
    fn y_prefix(&mut self, n: usize) -> Result<&[f64]> {
        if n > self.0.len() {
            return Err(Error::InvalidParameter(format!(
                "prefix source exhausted at n = {n} (have {})",
                self.0.len()
            )));
        }
        Ok(&self.0[..n])
    }
}

/// One pass of the incremental-redundancy loop.
#[derive(Debug, Clone)]
pub struct AttemptRecord {
    pub n: usize,
    pub inner_iterations: u32,
    pub inner_success: bool,
    pub new_decodes: Vec<usize>,
    /// True iff the sweep decoded nothing new (redundancy will grow).
    pub delta: bool,
}

#[derive(Debug, Clone, Default)]
pub struct SessionLog {
    pub attempts: Vec<AttemptRecord>,
}

#[derive(Debug, Clone)]
pub enum ConcatOutcome {
    Decoded { data: Vec<u8>, n: usize, rate: f64, log: SessionLog },
    Exhausted { log: SessionLog },
}

/// Incremental-redundancy decoding with feedback of decoded RS codewords.
pub fn decode_session(
    spec: &ConcatSpec,
    source: &mut dyn PrefixSource,
    cfg: &ChannelConfig,
) -> Result<ConcatOutcome> {
    let k = spec.inner_k();
    let mut gamma = vec![false; spec.ell()];
    let mut decoded: Vec<Option<Vec<GfElem>>> = vec![None; spec.ell()];
    let mut real = ParityRealization::build(spec.kite(), k)?;
    let mut log = SessionLog::default();
    let mut n = k + spec.r0;
    while n <= k + spec.max_parity {
        real.extend_to(spec.kite(), n)?;
        let y = source.y_prefix(n)?;
        let frame = bp::init_llr(y, cfg.sigma2())?;
        let pins = spec.pins(&decoded, n)?;
        let out = bp::sp_decode(&real, &frame, spec.bp_iters, Some(&pins))?;
        let newly = spec.bm_sweep(&out.hard_bits[..k], &mut gamma, &mut decoded)?;
        let delta = newly.is_empty();
        log.attempts.push(AttemptRecord {
            n,
            inner_iterations: out.iterations,
            inner_success: out.success,
            new_decodes: newly,
            delta,
        });
        if gamma.iter().all(|&g| g) {
            let data = spec.assemble(&decoded);
            let rate = k as f64 / n as f64;
            return Ok(ConcatOutcome::Decoded { data, n, rate, log });
        }
        if delta {
            n += spec.delta_r;
        }
    }
    Ok(ConcatOutcome::Exhausted { log })
}

/// Simulates one frame end to end: random data, AWGN transmission of the
/// potentially infinite coded stream, session decoding.
#[derive(Debug, Clone)]
pub struct FrameResult {
    pub outcome: ConcatOutcome,
    /// True iff the session decoded and returned exactly the transmitted data.
    pub correct: bool,
}

pub fn run_frame(spec: &ConcatSpec, cfg: &ChannelConfig, seed: u64, frame: u64) -> Result<FrameResult> {
    let mseed = prng::frame_seed(prng::substream(seed, prng::DOMAIN_MSG), frame);
    let nseed = prng::frame_seed(prng::substream(seed, prng::DOMAIN_NOISE), frame);
    let u: Vec<u8> =
        (0..spec.data_len() as u64).map(|i| (prng::draw_u64(mseed, i) & 1) as u8).collect();
    let v = spec.inner_input(&u)?;
    let mut stream = ChannelStream::new(spec.kite(), &v, cfg, nseed)?;
    let outcome = decode_session(spec, &mut stream, cfg)?;
    let correct = matches!(&outcome, ConcatOutcome::Decoded { data, .. } if data == &u);
    Ok(FrameResult { outcome, correct })
}

#[derive(Debug, Clone)]
pub struct RateReport {
    pub snr_db: f64,
    pub frames: u64,
    pub decoded: u64,
    pub exhausted: u64,
    pub undetected_errors: u64,
    /// Mean k/n over decoded frames.
    pub mean_rate: f64,
    pub rates: Vec<f64>,
    pub capacity: f64,
    /// capacity − mean decoding rate, bits per BPSK use.
    pub gap: f64,
}

/// Runs independent frames and reports the decoding-rate statistics.
pub fn measure_decoding_rate(
    spec: &ConcatSpec,
    cfg: &ChannelConfig,
    frames: u64,
    seed: u64,
) -> Result<RateReport> {
    let results: Vec<FrameResult> = (0..frames)
        .into_par_iter()
        .map(|f| run_frame(spec, cfg, seed, f))
        .collect::<Result<_>>()?;
    let mut rates = Vec::new();
    let mut exhausted = 0;
    let mut undetected = 0;
    for r in &results {
        match &r.outcome {
            ConcatOutcome::Decoded { rate, .. } => {
                rates.push(*rate);
                if !r.correct {
                    undetected += 1;
                }
            }
            ConcatOutcome::Exhausted { .. } => exhausted += 1,
        }
    }
    let mean_rate = if rates.is_empty() { 0.0 } else { rates.iter().sum::<f64>() / rates.len() as f64 };
    let capacity = biawgn_capacity(cfg.snr_db());
    Ok(RateReport {
        snr_db: cfg.snr_db(),
        frames,
        decoded: rates.len() as u64,
        exhausted,
        undetected_errors: undetected,
        mean_rate,
        rates,
        capacity,
        gap: capacity - mean_rate,
    })
}
