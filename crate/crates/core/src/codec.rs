//! LTE constituent encoder and the terminated rate-1/3 turbo encoder.
//!
//! The constituent code is the 8-state recursive systematic code with
//! feedback `1 + D^2 + D^3` and feedforward `1 + D + D^3` (octal 13/15).
//! The register holds `(s1, s2, s3)` with `s1` the most recent feedback
//! value; state index is `s1 | s2 << 1 | s3 << 2`.

use alloc::vec::Vec;

use crate::qpp::Permutation;
use crate::{Error, Result};

pub const MEMORY: usize = 3;
pub const STATES: usize = 1 << MEMORY;
/// Tail bits per constituent encoder (3 systematic + 3 parity).
pub const TAIL_BITS_PER_ENCODER: usize = 2 * MEMORY;
pub const TAIL_BITS: usize = 2 * TAIL_BITS_PER_ENCODER;

/// One trellis transition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Branch {
    pub next: u8,
    pub parity: u8,
}

/// `(next state, parity bit)` for state `s` and input bit `u`.
#[inline]
pub const fn step(state: u8, input: u8) -> Branch {
    let s1 = state & 1;
    let s2 = (state >> 1) & 1;
    let s3 = (state >> 2) & 1;
    let a = (input ^ s2 ^ s3) & 1;
    let z = a ^ s1 ^ s3;
    Branch {
        next: a | ((state << 1) & 0b110),
        parity: z,
    }
}

/// The input that drives the feedback value to zero; three such steps
/// return any state to zero.
#[inline]
pub const fn termination_input(state: u8) -> u8 {
    ((state >> 1) ^ (state >> 2)) & 1
}

/// Precomputed transitions, indexed `[state][input]`.
pub const TRELLIS: [[Branch; 2]; STATES] = {
    let mut t = [[Branch { next: 0, parity: 0 }; 2]; STATES];
    let mut s = 0;
    while s < STATES {
        t[s][0] = step(s as u8, 0);
        t[s][1] = step(s as u8, 1);
        s += 1;
    }
    t
};

/// Total weight (systematic and parity) of the three termination steps
/// starting from each state.
pub const TAIL_WEIGHT: [u32; STATES] = {
    let mut w = [0u32; STATES];
    let mut s0 = 0;
    while s0 < STATES {
        let mut s = s0 as u8;
        let mut k = 0;
        let mut acc = 0;
        while k < MEMORY {
            let u = termination_input(s);
            let b = step(s, u);
            acc += (u + b.parity) as u32;
            s = b.next;
            k += 1;
        }
        w[s0] = acc;
        s0 += 1;
    }
    w
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RscOutput {
    pub parity: Vec<u8>,
    pub tail_info: [u8; MEMORY],
    pub tail_parity: [u8; MEMORY],
    pub final_state: u8,
}

/// Encodes `info` (bits as 0/1) with one constituent encoder starting from
/// the zero state. With `terminate`, three tail steps return the register
/// to zero; otherwise the tail arrays are zero.
pub fn rsc_encode(info: &[u8], terminate: bool) -> RscOutput {
    let mut state = 0u8;
    let mut parity = Vec::with_capacity(info.len());
    for &u in info {
        let b = step(state, u & 1);
        parity.push(b.parity);
        state = b.next;
    }
    let mut tail_info = [0; MEMORY];
    let mut tail_parity = [0; MEMORY];
    if terminate {
        for k in 0..MEMORY {
            let u = termination_input(state);
            let b = step(state, u);
            tail_info[k] = u;
            tail_parity[k] = b.parity;
            state = b.next;
        }
    }
    RscOutput {
        parity,
        tail_info,
        tail_parity,
        final_state: state,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TurboCodeword {
    pub systematic: Vec<u8>,
    pub parity1: Vec<u8>,
    pub parity2: Vec<u8>,
    /// Encoder 1 tail as `x z x z x z`, then encoder 2 likewise.
    pub tail: [u8; TAIL_BITS],
    pub total_weight: u32,
    pub info_weight: u32,
}

impl TurboCodeword {
    pub fn len(&self) -> usize {
        3 * self.systematic.len() + TAIL_BITS
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Transmission order: systematic, parity 1, parity 2, tail.
    pub fn to_bits(&self) -> Vec<u8> {
        let mut bits = Vec::with_capacity(self.len());
        bits.extend_from_slice(&self.systematic);
        bits.extend_from_slice(&self.parity1);
        bits.extend_from_slice(&self.parity2);
        bits.extend_from_slice(&self.tail);
        bits
    }
}

/// Turbo-encodes `info`; the second encoder reads `info[π(x)]` at step `x`.
/// Both encoders are terminated independently.
pub fn turbo_encode(info: &[u8], perm: &Permutation) -> Result<TurboCodeword> {
    if info.len() != perm.len() {
        return Err(Error::LengthMismatch {
            expected: perm.len(),
            actual: info.len(),
        });
    }
    let systematic: Vec<u8> = info.iter().map(|&b| b & 1).collect();
    let interleaved: Vec<u8> = perm.as_slice().iter().map(|&i| systematic[i]).collect();
    let e1 = rsc_encode(&systematic, true);
    let e2 = rsc_encode(&interleaved, true);

    let mut tail = [0u8; TAIL_BITS];
    for k in 0..MEMORY {
        tail[2 * k] = e1.tail_info[k];
        tail[2 * k + 1] = e1.tail_parity[k];
        tail[TAIL_BITS_PER_ENCODER + 2 * k] = e2.tail_info[k];
        tail[TAIL_BITS_PER_ENCODER + 2 * k + 1] = e2.tail_parity[k];
    }
    let weight = |v: &[u8]| v.iter().map(|&b| b as u32).sum::<u32>();
    let info_weight = weight(&systematic);
    let total_weight = info_weight + weight(&e1.parity) + weight(&e2.parity) + weight(&tail);
    Ok(TurboCodeword {
        systematic,
        parity1: e1.parity,
        parity2: e2.parity,
        tail,
        total_weight,
        info_weight,
    })
}

/// Exact code rate `L / (3L + 12)` as a reduced fraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CodeRate {
    pub numerator: u64,
    pub denominator: u64,
}

impl CodeRate {
    pub fn as_f64(&self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }
}

pub fn code_rate(length: usize) -> CodeRate {
    let n = length as u64;
    let d = 3 * n + TAIL_BITS as u64;
    let g = crate::qpp::gcd(n as usize, d as usize) as u64;
    CodeRate {
        numerator: n / g,
        denominator: d / g,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qpp::Qpp;
    use alloc::vec;

    #[test]
    fn zero_input_terminates_to_zero() {
        let out = rsc_encode(&[0; 20], true);
        assert!(out.parity.iter().all(|&b| b == 0));
        assert_eq!(out.tail_info, [0; 3]);
        assert_eq!(out.tail_parity, [0; 3]);
        assert_eq!(out.final_state, 0);
    }

    #[test]
    fn impulse_response_has_period_seven() {
        let mut info = vec![0u8; 21];
        info[0] = 1;
        let out = rsc_encode(&info, false);
        assert_eq!(&out.parity[..7], &[1, 1, 1, 1, 0, 0, 1]);
        // After the impulse the input is zero, so the output repeats too.
        assert_eq!(&out.parity[8..15], &out.parity[1..8]);
        assert_eq!(&out.parity[15..21], &out.parity[1..7]);
        // Walk the states by hand: they repeat with period 7 and never hit 0.
        let mut s = step(0, 1).next;
        let start = s;
        for k in 1..=7 {
            assert_ne!(s, 0);
            s = step(s, 0).next;
            if k < 7 {
                assert_ne!(s, start);
            }
        }
        assert_eq!(s, start);
    }

    #[test]
    fn termination_reaches_zero() {
        for seed in 0u32..200 {
            let info: Vec<u8> = (0..17).map(|i| ((seed.wrapping_mul(2654435761) >> (i % 31)) & 1) as u8).collect();
            assert_eq!(rsc_encode(&info, true).final_state, 0);
        }
    }

    #[test]
    fn codeword_sizes() {
        let perm = Qpp::new(40, 3, 10).permutation().unwrap();
        let cw = turbo_encode(&[0; 40], &perm).unwrap();
        assert_eq!((cw.total_weight, cw.info_weight), (0, 0));
        assert_eq!(cw.len(), 132);
        assert_eq!(cw.to_bits().len(), 132);
        assert!(matches!(
            turbo_encode(&[0; 39], &perm),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn code_rates() {
        assert_eq!(code_rate(40), CodeRate { numerator: 10, denominator: 33 });
        assert!((code_rate(40).as_f64() - 0.303_030_3).abs() < 1e-6);
        assert!((code_rate(1008).as_f64() - 1008.0 / 3036.0).abs() < 1e-15);
        assert!((code_rate(1 << 20).as_f64() - 1.0 / 3.0).abs() < 1e-5);
    }

    #[test]
    fn tail_weight_table_matches_encoder() {
        for s in 0..STATES as u8 {
            let mut st = s;
            let mut w = 0;
            for _ in 0..3 {
                let u = termination_input(st);
                let b = step(st, u);
                w += (u + b.parity) as u32;
                st = b.next;
            }
            assert_eq!(st, 0);
            assert_eq!(TAIL_WEIGHT[s as usize], w);
        }
    }
}
