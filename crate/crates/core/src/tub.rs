//! Truncated union bounds over independent Rayleigh fading, and the
//! early-abort predicate used by the interleaver search.
//!
//! With `f = 1 / (1 + R_c·SNR)`:
//!
//! ```text
//! TUB(BER) = 0.5 · Σ (w_i / L) · f^d_i
//! TUB(FER) = 0.5 · Σ  N_i      · f^d_i
//! ```
//!
//! where `R_c = L / (3L + 12)` and `SNR = 10^(snr_db / 10)`.

use alloc::vec::Vec;

use crate::codec::code_rate;
use crate::spectrum::{DistanceSpectrum, SpectrumTerm};

/// Per-codeword pairwise factor `1 / (1 + R_c·SNR)`.
pub fn fading_factor(length: usize, snr_db: f64) -> f64 {
    let snr = libm::pow(10.0, snr_db / 10.0);
    1.0 / (1.0 + code_rate(length).as_f64() * snr)
}

pub fn tub_fer_terms(terms: &[SpectrumTerm], length: usize, snr_db: f64) -> f64 {
    let f = fading_factor(length, snr_db);
    0.5 * terms
        .iter()
        .map(|t| t.multiplicity as f64 * libm::pow(f, t.distance as f64))
        .sum::<f64>()
}

pub fn tub_ber_terms(terms: &[SpectrumTerm], length: usize, snr_db: f64) -> f64 {
    let f = fading_factor(length, snr_db);
    0.5 * terms
        .iter()
        .map(|t| t.info_weight as f64 / length as f64 * libm::pow(f, t.distance as f64))
        .sum::<f64>()
}

pub fn tub_fer(spectrum: &DistanceSpectrum, length: usize, snr_db: f64) -> f64 {
    tub_fer_terms(spectrum.terms(), length, snr_db)
}

pub fn tub_ber(spectrum: &DistanceSpectrum, length: usize, snr_db: f64) -> f64 {
    tub_ber_terms(spectrum.terms(), length, snr_db)
}

/// The `M` most favourable ways the working spectrum could still change.
///
/// Hypothetical `j` (for `j = 1..=M`) puts `j` new distances right below
/// `d1`, each with multiplicity 1, and keeps the first `M - j` existing
/// terms. Distances are clamped at 1. A spectrum with fewer than `M` terms
/// keeps only the terms it has. The info weight of a hypothetical term is
/// set to its multiplicity.
pub fn optimistic_updates(spectrum: &DistanceSpectrum) -> Vec<Vec<SpectrumTerm>> {
    let m = spectrum.capacity();
    let terms = spectrum.terms();
    let Some(first) = terms.first() else {
        return Vec::new();
    };
    let d1 = first.distance as i64;
    (1..=m)
        .map(|j| {
            let mut h = Vec::with_capacity(m);
            for k in (1..=j as i64).rev() {
                let d = (d1 - k).max(1) as u32;
                h.push(SpectrumTerm::new(d, 1, 1));
            }
            h.extend(terms.iter().take(m - j).copied());
            h
        })
        .collect()
}

/// Whether no future update of `snapshot` can bring TUB(FER) below
/// `fer_min`: true iff the snapshot's own bound and the bound of every
/// optimistic update are all `>= fer_min`.
pub fn should_abort(snapshot: &DistanceSpectrum, fer_min: f64, length: usize, snr_db: f64) -> bool {
    if !fer_min.is_finite() || snapshot.is_empty() {
        return false;
    }
    if tub_fer(snapshot, length, snr_db) < fer_min {
        return false;
    }
    optimistic_updates(snapshot)
        .iter()
        .all(|h| tub_fer_terms(h, length, snr_db) >= fer_min)
}
