//! Monte-Carlo frame error rates over independent Rayleigh fading with
//! iterative Log-MAP decoding.
//!
//! BPSK maps bit `b` to `x = 1 - 2b`. Each received sample is `y = a·x + n`
//! with Rayleigh amplitude `a` (`E[a²] = 1`) known at the receiver and
//! `n ~ N(0, σ²)`, `σ² = 1 / (2·R_c·SNR)` where `SNR` is `Eb/N0`. Channel
//! LLRs are `ln P(b=0)/P(b=1) = 2·a·y/σ²`.
//!
//! Every frame draws from its own generator seeded from
//! `(rng_seed, point index, frame index)`, so results do not depend on how
//! frames are distributed over workers.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::codec::{termination_input, turbo_encode, code_rate, MEMORY, STATES, TAIL_BITS_PER_ENCODER, TRELLIS};
use crate::qpp::Permutation;
use crate::{Error, Result};

pub const DEFAULT_MAX_ITERATIONS: u32 = 8;
pub const DEFAULT_LLR_STOP_THRESHOLD: f64 = 10.0;
pub const DEFAULT_MIN_ERROR_FRAMES: u64 = 100;
pub const DEFAULT_MAX_FRAMES: u64 = 1_000_000;

const NEG_INF: f64 = f64::NEG_INFINITY;

/// `ln(e^a + e^b)`.
#[inline]
pub fn max_star(a: f64, b: f64) -> f64 {
    if a == NEG_INF {
        return b;
    }
    if b == NEG_INF {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    let gap = hi - lo;
    // ln(1 + e^-40) is below 2^-57.
    if gap > 40.0 {
        return hi;
    }
    hi + libm::log1p(libm::exp(-gap))
}

pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Seed of the generator for one frame.
pub fn frame_seed(seed: u64, point: usize, frame: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(seed) ^ point as u64) ^ frame)
}

pub fn frame_rng(seed: u64, point: usize, frame: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(frame_seed(seed, point, frame))
}

/// Noise variance per real dimension for unit-energy BPSK.
pub fn noise_variance(snr_db: f64, rate: f64) -> f64 {
    1.0 / (2.0 * rate * libm::pow(10.0, snr_db / 10.0))
}

/// Rayleigh amplitude with `E[a²] = 1`.
pub fn rayleigh_amplitude<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let e: f64 = rng.sample(Exp1);
    libm::sqrt(e)
}

/// BPSK over independent Rayleigh fading with perfect channel knowledge.
/// Returns one LLR per bit.
pub fn channel_pass<R: Rng + ?Sized>(bits: &[u8], snr_db: f64, rate: f64, rng: &mut R) -> Vec<f64> {
    let sigma2 = noise_variance(snr_db, rate);
    let sigma = libm::sqrt(sigma2);
    bits.iter()
        .map(|&b| {
            let x = 1.0 - 2.0 * (b & 1) as f64;
            let a = rayleigh_amplitude(rng);
            let n: f64 = rng.sample(StandardNormal);
            let y = a * x + sigma * n;
            2.0 * a * y / sigma2
        })
        .collect()
}

/// Noise-free LLRs of magnitude `magnitude`.
pub fn noiseless_llrs(bits: &[u8], magnitude: f64) -> Vec<f64> {
    bits.iter()
        .map(|&b| if b & 1 == 0 { magnitude } else { -magnitude })
        .collect()
}

/// Inputs of one constituent decoder; `systematic` and `parity` include the
/// three tail steps, `apriori` covers the information bits only.
pub struct ConstituentInput<'a> {
    pub systematic: &'a [f64],
    pub parity: &'a [f64],
    pub apriori: &'a [f64],
}

/// Log-MAP (BCJR with exact `max*`) over the terminated 8-state trellis.
/// Writes a-posteriori LLRs of the information bits into `out`.
#[derive(Debug, Clone, Default)]
pub struct Bcjr {
    alpha: Vec<[f64; STATES]>,
    beta: Vec<[f64; STATES]>,
}

impl Bcjr {
    pub fn run(&mut self, input: &ConstituentInput<'_>, out: &mut [f64]) {
        let info_len = input.apriori.len();
        let steps = info_len + MEMORY;
        debug_assert_eq!(input.systematic.len(), steps);
        debug_assert_eq!(input.parity.len(), steps);
        self.alpha.clear();
        self.alpha.resize(steps + 1, [NEG_INF; STATES]);
        self.beta.clear();
        self.beta.resize(steps + 1, [NEG_INF; STATES]);
        self.alpha[0][0] = 0.0;
        self.beta[steps][0] = 0.0;

        // Branch metric ½·(x_u·(L_s + L_a) + x_p·L_p).
        let gamma = |t: usize, u: u8, parity: u8| {
            let la = if t < info_len { input.apriori[t] } else { 0.0 };
            let xu = 1.0 - 2.0 * u as f64;
            let xp = 1.0 - 2.0 * parity as f64;
            0.5 * (xu * (input.systematic[t] + la) + xp * input.parity[t])
        };
        let inputs = |t: usize, s: usize| -> (u8, u8) {
            if t < info_len {
                (0, 1)
            } else {
                let u = termination_input(s as u8);
                (u, u)
            }
        };

        for t in 0..steps {
            let mut next = [NEG_INF; STATES];
            for (s, row) in TRELLIS.iter().enumerate() {
                let a = self.alpha[t][s];
                if a == NEG_INF {
                    continue;
                }
                let (lo, hi) = inputs(t, s);
                for u in lo..=hi {
                    let b = row[u as usize];
                    let n = b.next as usize;
                    next[n] = max_star(next[n], a + gamma(t, u, b.parity));
                }
            }
            self.alpha[t + 1] = next;
        }
        for t in (0..steps).rev() {
            let mut cur = [NEG_INF; STATES];
            for (s, c) in cur.iter_mut().enumerate() {
                let (lo, hi) = inputs(t, s);
                for u in lo..=hi {
                    let b = TRELLIS[s][u as usize];
                    let v = self.beta[t + 1][b.next as usize];
                    if v != NEG_INF {
                        *c = max_star(*c, v + gamma(t, u, b.parity));
                    }
                }
            }
            self.beta[t] = cur;
        }
        for (t, o) in out.iter_mut().enumerate().take(info_len) {
            let mut num = [NEG_INF; 2];
            for (s, row) in TRELLIS.iter().enumerate() {
                let a = self.alpha[t][s];
                if a == NEG_INF {
                    continue;
                }
                for u in 0..2u8 {
                    let b = row[u as usize];
                    let m = a + gamma(t, u, b.parity) + self.beta[t + 1][b.next as usize];
                    num[u as usize] = max_star(num[u as usize], m);
                }
            }
            *o = num[0] - num[1];
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decoded {
    pub bits: Vec<u8>,
    /// Final a-posteriori LLRs of the information bits.
    pub llrs: Vec<f64>,
    pub iterations: u32,
}

/// Iterative turbo decoder for the layout of
/// [`TurboCodeword::to_bits`](crate::codec::TurboCodeword::to_bits).
#[derive(Debug, Clone)]
pub struct TurboDecoder {
    perm: Vec<usize>,
    max_iterations: u32,
    stop_threshold: f64,
    bcjr: Bcjr,
}

impl TurboDecoder {
    pub fn new(perm: &Permutation, max_iterations: u32, stop_threshold: f64) -> Self {
        Self {
            perm: perm.as_slice().to_vec(),
            max_iterations: max_iterations.max(1),
            stop_threshold,
            bcjr: Bcjr::default(),
        }
    }

    pub fn decode(&mut self, channel: &[f64]) -> Result<Decoded> {
        let l = self.perm.len();
        let n = 3 * l + 2 * TAIL_BITS_PER_ENCODER;
        if channel.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                actual: channel.len(),
            });
        }
        let (sys, rest) = channel.split_at(l);
        let (p1, rest) = rest.split_at(l);
        let (p2, tail) = rest.split_at(l);

        let mut sys1 = Vec::with_capacity(l + MEMORY);
        let mut par1 = Vec::with_capacity(l + MEMORY);
        sys1.extend_from_slice(sys);
        par1.extend_from_slice(p1);
        let mut sys2: Vec<f64> = self.perm.iter().map(|&i| sys[i]).collect();
        let mut par2 = Vec::with_capacity(l + MEMORY);
        par2.extend_from_slice(p2);
        for k in 0..MEMORY {
            sys1.push(tail[2 * k]);
            par1.push(tail[2 * k + 1]);
            sys2.push(tail[TAIL_BITS_PER_ENCODER + 2 * k]);
            par2.push(tail[TAIL_BITS_PER_ENCODER + 2 * k + 1]);
        }

        let mut apriori1 = vec![0.0; l];
        let mut apriori2 = vec![0.0; l];
        let mut post1 = vec![0.0; l];
        let mut post2 = vec![0.0; l];
        let mut llrs = vec![0.0; l];
        let mut iterations = 0;
        while iterations < self.max_iterations {
            iterations += 1;
            self.bcjr.run(
                &ConstituentInput {
                    systematic: &sys1,
                    parity: &par1,
                    apriori: &apriori1,
                },
                &mut post1,
            );
            for (x, &i) in self.perm.iter().enumerate() {
                apriori2[x] = post1[i] - sys[i] - apriori1[i];
            }
            self.bcjr.run(
                &ConstituentInput {
                    systematic: &sys2,
                    parity: &par2,
                    apriori: &apriori2,
                },
                &mut post2,
            );
            for (x, &i) in self.perm.iter().enumerate() {
                apriori1[i] = post2[x] - sys2[x] - apriori2[x];
                llrs[i] = post2[x];
            }
            if llrs.iter().all(|v| v.abs() > self.stop_threshold) {
                break;
            }
        }
        let bits = llrs.iter().map(|&v| (v < 0.0) as u8).collect();
        Ok(Decoded {
            bits,
            llrs,
            iterations,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub perm: Permutation,
    pub snr_points_db: Vec<f64>,
    pub max_iterations: u32,
    pub llr_stop_threshold: f64,
    pub min_error_frames: u64,
    pub max_frames: u64,
    pub rng_seed: u64,
}

impl SimConfig {
    pub fn new(perm: Permutation, snr_points_db: Vec<f64>) -> Self {
        Self {
            perm,
            snr_points_db,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            llr_stop_threshold: DEFAULT_LLR_STOP_THRESHOLD,
            min_error_frames: DEFAULT_MIN_ERROR_FRAMES,
            max_frames: DEFAULT_MAX_FRAMES,
            rng_seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.min_error_frames == 0 || self.max_frames == 0 {
            return Err(Error::InvalidArgument("frame counts must be positive"));
        }
        if self.llr_stop_threshold.is_nan() || self.llr_stop_threshold <= 0.0 || self.max_iterations == 0 {
            return Err(Error::InvalidArgument("stop threshold and iteration cap must be positive"));
        }
        if self.perm.is_empty() {
            return Err(Error::InvalidArgument("empty interleaver"));
        }
        if self.snr_points_db.iter().any(|s| !s.is_finite()) {
            return Err(Error::InvalidArgument("snr points must be finite"));
        }
        Ok(())
    }

    pub fn decoder(&self) -> TurboDecoder {
        TurboDecoder::new(&self.perm, self.max_iterations, self.llr_stop_threshold)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameOutcome {
    pub error: bool,
    pub iterations: u32,
}

/// Simulates frame `frame` of SNR point `point`.
pub fn run_frame(config: &SimConfig, decoder: &mut TurboDecoder, point: usize, frame: u64) -> Result<FrameOutcome> {
    let snr_db = *config.snr_points_db.get(point).ok_or(Error::Domain {
        index: point,
        length: config.snr_points_db.len(),
    })?;
    let l = config.perm.len();
    let mut rng = frame_rng(config.rng_seed, point, frame);
    let info: Vec<u8> = (0..l).map(|_| rng.random::<bool>() as u8).collect();
    let codeword = turbo_encode(&info, &config.perm)?;
    let llrs = channel_pass(&codeword.to_bits(), snr_db, code_rate(l).as_f64(), &mut rng);
    let decoded = decoder.decode(&llrs)?;
    Ok(FrameOutcome {
        error: decoded.bits != info,
        iterations: decoded.iterations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FerPoint {
    pub snr_db: f64,
    pub frames_sent: u64,
    pub frames_in_error: u64,
    pub fer: f64,
    pub avg_iterations: f64,
    /// The frame cap was reached before enough errors were seen.
    pub low_confidence: bool,
}

/// Running count for one SNR point. Frames must be pushed in index order.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PointTally {
    pub frames: u64,
    pub errors: u64,
    pub iterations: u64,
}

impl PointTally {
    pub fn is_done(&self, config: &SimConfig) -> bool {
        self.errors >= config.min_error_frames || self.frames >= config.max_frames
    }

    pub fn push(&mut self, outcome: FrameOutcome) {
        self.frames += 1;
        self.errors += outcome.error as u64;
        self.iterations += outcome.iterations as u64;
    }

    pub fn finish(&self, snr_db: f64, config: &SimConfig) -> FerPoint {
        let frames = self.frames.max(1) as f64;
        FerPoint {
            snr_db,
            frames_sent: self.frames,
            frames_in_error: self.errors,
            fer: self.errors as f64 / frames,
            avg_iterations: self.iterations as f64 / frames,
            low_confidence: self.errors < config.min_error_frames,
        }
    }
}

pub fn monte_carlo_fer(config: &SimConfig) -> Result<Vec<FerPoint>> {
    config.validate()?;
    let mut decoder = config.decoder();
    let mut points = Vec::with_capacity(config.snr_points_db.len());
    for (p, &snr_db) in config.snr_points_db.iter().enumerate() {
        let mut tally = PointTally::default();
        while !tally.is_done(config) {
            tally.push(run_frame(config, &mut decoder, p, tally.frames)?);
        }
        points.push(tally.finish(snr_db, config));
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qpp::Qpp;

    #[test]
    fn max_star_is_log_sum_exp() {
        for &(a, b) in &[(0.0, 0.0), (1.5, -2.0), (-30.0, 4.0), (700.0, 699.0)] {
            let direct = if a > 600.0 {
                a + libm::log(1.0 + libm::exp(b - a))
            } else {
                libm::log(libm::exp(a) + libm::exp(b))
            };
            assert!((max_star(a, b) - direct).abs() < 1e-12);
        }
        assert_eq!(max_star(NEG_INF, 3.0), 3.0);
        assert_eq!(max_star(NEG_INF, NEG_INF), NEG_INF);
    }

    #[test]
    fn frame_seeds_differ() {
        assert_ne!(frame_seed(1, 0, 0), frame_seed(1, 0, 1));
        assert_ne!(frame_seed(1, 0, 0), frame_seed(1, 1, 0));
        assert_ne!(frame_seed(1, 0, 0), frame_seed(2, 0, 0));
        assert_eq!(frame_seed(7, 3, 11), frame_seed(7, 3, 11));
    }

    #[test]
    fn noiseless_codewords_decode_in_one_iteration() {
        let perm = Qpp::new(40, 3, 10).permutation().unwrap();
        let mut dec = TurboDecoder::new(&perm, 8, 10.0);
        let mut rng = frame_rng(5, 0, 0);
        for _ in 0..20 {
            let info: Vec<u8> = (0..40).map(|_| rng.random::<bool>() as u8).collect();
            let cw = turbo_encode(&info, &perm).unwrap();
            let out = dec.decode(&noiseless_llrs(&cw.to_bits(), 50.0)).unwrap();
            assert_eq!(out.bits, info);
            assert_eq!(out.iterations, 1);
            assert!(out.llrs.iter().all(|v| v.abs() > 10.0));
        }
    }

    #[test]
    fn high_snr_llr_signs_match_bits() {
        let mut rng = frame_rng(9, 0, 0);
        let bits: Vec<u8> = (0..2000).map(|i| (i % 3 == 0) as u8).collect();
        let llrs = channel_pass(&bits, 80.0, 1.0, &mut rng);
        for (b, l) in bits.iter().zip(&llrs) {
            assert_eq!(*b == 1, *l < 0.0);
        }
    }

    #[test]
    fn decoder_rejects_wrong_length() {
        let perm = Qpp::new(40, 3, 10).permutation().unwrap();
        let mut dec = TurboDecoder::new(&perm, 8, 10.0);
        assert!(matches!(dec.decode(&[0.0; 10]), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn same_seed_same_points() {
        let perm = Qpp::new(40, 3, 10).permutation().unwrap();
        let mut cfg = SimConfig::new(perm, vec![1.0, 2.0]);
        cfg.min_error_frames = 5;
        cfg.max_frames = 200;
        cfg.rng_seed = 42;
        let a = monte_carlo_fer(&cfg).unwrap();
        assert_eq!(a, monte_carlo_fer(&cfg).unwrap());
        assert_eq!(a.len(), 2);
        for p in &a {
            assert!(p.frames_in_error >= 5 || p.low_confidence);
            assert!((0.0..=1.0).contains(&p.fer));
        }
    }

    #[test]
    fn low_confidence_when_capped() {
        let perm = Qpp::new(40, 3, 10).permutation().unwrap();
        let mut cfg = SimConfig::new(perm, vec![30.0]);
        cfg.max_frames = 10;
        let p = monte_carlo_fer(&cfg).unwrap()[0];
        assert_eq!(p.frames_sent, 10);
        assert!(p.low_confidence);
    }
}
