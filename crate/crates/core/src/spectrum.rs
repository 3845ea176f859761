//! Exact truncated distance spectra of the LTE turbo code.
//!
//! [`exact_spectrum`] enumerates every information word whose codeword
//! weight can still enter the first `M` spectrum terms. Words are built from
//! the end of the block toward the beginning: the outermost loop fixes the
//! position of the last nonzero bit, each deeper level adds the next nonzero
//! bit further back. Every node of that tree is itself a codeword (all
//! remaining bits zero), and a subtree is cut when a lower bound on the
//! weight of every word in it exceeds the current `M`-th distance.
//!
//! The bound of a node whose lowest fixed one sits at position `p` is the
//! sum of
//!
//!  - encoder 1: the exact weight of the fixed suffix from each state at
//!    time `p`, plus the cheapest prefix reaching that state, minimized over
//!    states;
//!  - encoder 2: a Viterbi pass over the interleaved sequence in which the
//!    bits coming from positions `< p` are free and the others are fixed.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::codec::{Branch, STATES, TAIL_BITS, TAIL_WEIGHT, TRELLIS};
use crate::qpp::Permutation;
use crate::{Error, Result};

/// Weight ceiling used while fewer than `M` terms are known.
pub const DEFAULT_WEIGHT_CEILING: u32 = 45;

/// Largest block the brute-force oracle accepts.
pub const BRUTE_FORCE_MAX_LENGTH: usize = 20;

/// One line of a distance spectrum: `N` codewords of weight `d` whose
/// information weights sum to `w`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpectrumTerm {
    pub distance: u32,
    pub multiplicity: u64,
    pub info_weight: u64,
}

impl SpectrumTerm {
    pub const fn new(distance: u32, multiplicity: u64, info_weight: u64) -> Self {
        Self {
            distance,
            multiplicity,
            info_weight,
        }
    }
}

impl fmt::Display for SpectrumTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}/{}", self.distance, self.multiplicity, self.info_weight)
    }
}

/// The first `capacity` terms of a spectrum, strictly increasing in
/// distance.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DistanceSpectrum {
    terms: Vec<SpectrumTerm>,
    capacity: usize,
    complete: bool,
}

impl DistanceSpectrum {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity >= 1, "spectrum capacity must be at least 1");
        Self {
            terms: Vec::with_capacity(capacity + 1),
            capacity,
            complete: false,
        }
    }

    /// Builds a spectrum from known terms. Terms must be strictly increasing
    /// in distance, with `1 <= N <= w`, and fit the capacity.
    pub fn from_terms(capacity: usize, terms: Vec<SpectrumTerm>, complete: bool) -> Result<Self> {
        if capacity == 0 {
            return Err(Error::InvalidArgument("spectrum capacity must be at least 1"));
        }
        if terms.len() > capacity {
            return Err(Error::InvalidArgument("more terms than capacity"));
        }
        if terms.windows(2).any(|w| w[0].distance >= w[1].distance) {
            return Err(Error::InvalidArgument("distances must be strictly increasing"));
        }
        if terms
            .iter()
            .any(|t| t.distance == 0 || t.multiplicity == 0 || t.info_weight < t.multiplicity)
        {
            return Err(Error::InvalidArgument("terms need d >= 1 and 1 <= N <= w"));
        }
        Ok(Self {
            terms,
            capacity,
            complete,
        })
    }

    pub fn terms(&self) -> &[SpectrumTerm] {
        &self.terms
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.terms.len() == self.capacity
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn head(&self) -> Option<&SpectrumTerm> {
        self.terms.first()
    }

    /// The largest distance that can still change the spectrum, if the
    /// spectrum already holds `capacity` terms.
    pub fn threshold(&self) -> Option<u32> {
        if self.is_full() {
            self.terms.last().map(|t| t.distance)
        } else {
            None
        }
    }

    /// Tallies one codeword of weight `d` and information weight `w`.
    /// Returns whether the spectrum changed.
    pub fn record_codeword(&mut self, distance: u32, info_weight: u64) -> bool {
        debug_assert!(distance >= 1 && info_weight >= 1);
        match self.terms.binary_search_by_key(&distance, |t| t.distance) {
            Ok(i) => {
                let t = &mut self.terms[i];
                t.multiplicity += 1;
                t.info_weight += info_weight;
                true
            }
            Err(i) => {
                if i >= self.capacity {
                    return false;
                }
                self.terms.insert(i, SpectrumTerm::new(distance, 1, info_weight));
                self.terms.truncate(self.capacity);
                true
            }
        }
    }

    pub(crate) fn mark_complete(&mut self) {
        self.complete = true;
    }
}

impl fmt::Display for DistanceSpectrum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

/// Resource limits for [`exact_spectrum`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Budget {
    /// Codewords heavier than this are never enumerated.
    pub weight_ceiling: u32,
    /// Maximum number of visited search nodes.
    pub node_limit: Option<u64>,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            weight_ceiling: DEFAULT_WEIGHT_CEILING,
            node_limit: None,
        }
    }
}

/// What the event consumer wants the engine to do next.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Control {
    Continue,
    Abort,
}

/// Emitted every time the working spectrum changes.
#[derive(Debug, Clone, Copy)]
pub struct SpectrumEvent<'a> {
    pub snapshot: &'a DistanceSpectrum,
    /// Position of the last nonzero information bit being processed.
    pub stage: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpectrumOutcome {
    Complete(DistanceSpectrum),
    /// The consumer asked to stop; carries the last snapshot.
    Aborted(DistanceSpectrum),
}

impl SpectrumOutcome {
    pub fn spectrum(&self) -> &DistanceSpectrum {
        match self {
            SpectrumOutcome::Complete(s) | SpectrumOutcome::Aborted(s) => s,
        }
    }

    pub fn is_aborted(&self) -> bool {
        matches!(self, SpectrumOutcome::Aborted(_))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpectrumStats {
    pub nodes: u64,
    pub events: u64,
}

const INF: u32 = u32::MAX / 4;

type StateWeights = [u32; STATES];

/// Ways of sharing the systematic weight of still-free bits between the two
/// encoder bounds, in half units charged to encoder 1 (encoder 2 takes the
/// rest). Every split gives a valid bound; the engine uses the largest.
const SPLITS: [u32; 3] = [0, 1, 2];

enum Flow {
    Continue,
    Abort,
}

struct Engine<'a, F> {
    len: usize,
    perm: &'a [usize],
    /// Cheapest encoder-1 weight (half units) reaching each state at time t,
    /// per split; the all-zero prefix is allowed.
    prefix_any: [Vec<StateWeights>; SPLITS.len()],
    /// Same, but the prefix must contain at least one nonzero bit.
    prefix_nonzero: [Vec<StateWeights>; SPLITS.len()],
    chosen: Vec<bool>,
    spectrum: DistanceSpectrum,
    ceiling: u32,
    node_limit: Option<u64>,
    stats: SpectrumStats,
    stage: usize,
    on_update: F,
}

fn prefix_tables(len: usize, sys_cost: u32) -> (Vec<StateWeights>, Vec<StateWeights>) {
    let mut any = vec![[INF; STATES]; len + 1];
    let mut nonzero = vec![[INF; STATES]; len + 1];
    any[0][0] = 0;
    for t in 0..len {
        for s in 0..STATES {
            for u in 0..2u8 {
                let b = TRELLIS[s][u as usize];
                let w = sys_cost * u as u32 + 2 * b.parity as u32;
                let n = b.next as usize;
                let a = any[t][s].saturating_add(w);
                if a < any[t + 1][n] {
                    any[t + 1][n] = a;
                }
                let from = if u == 1 { any[t][s] } else { nonzero[t][s] };
                let nz = from.saturating_add(w);
                if nz < nonzero[t + 1][n] {
                    nonzero[t + 1][n] = nz;
                }
            }
        }
    }
    (any, nonzero)
}

#[inline]
fn half_ceil(x: u32) -> u32 {
    x.div_ceil(2)
}

impl<'a, F> Engine<'a, F>
where
    F: FnMut(&SpectrumEvent<'_>) -> Control,
{
    fn new(perm: &'a Permutation, capacity: usize, budget: &Budget, on_update: F) -> Self {
        let len = perm.len();
        let tables = SPLITS.map(|a| prefix_tables(len, a));
        let [(a0, n0), (a1, n1), (a2, n2)] = tables;
        let max_weight = (3 * len + TAIL_BITS) as u32;
        Self {
            len,
            perm: perm.as_slice(),
            prefix_any: [a0, a1, a2],
            prefix_nonzero: [n0, n1, n2],
            chosen: vec![false; len],
            spectrum: DistanceSpectrum::new(capacity),
            ceiling: budget.weight_ceiling.min(max_weight),
            node_limit: budget.node_limit,
            stats: SpectrumStats::default(),
            stage: len,
            on_update,
        }
    }

    fn threshold(&self) -> u32 {
        self.spectrum.threshold().unwrap_or(self.ceiling)
    }

    /// Lower bounds (half units, one per split) on the encoder-2 weight over
    /// all words that agree with the fixed bits at positions `>= p`: parity
    /// and tail, plus the share of systematic weight of the free bits.
    fn encoder2_bounds(&self, p: usize) -> [u32; SPLITS.len()] {
        let mut cost = [[INF; STATES]; SPLITS.len()];
        for c in cost.iter_mut() {
            c[0] = 0;
        }
        for &i in self.perm {
            let free = i < p;
            let fixed = self.chosen[i] as usize;
            for (k, &a) in SPLITS.iter().enumerate() {
                let sys = 2 - a;
                let cur = &cost[k];
                let mut next = [INF; STATES];
                for s in 0..STATES {
                    let c = cur[s];
                    if c >= INF {
                        continue;
                    }
                    if free {
                        let b0: Branch = TRELLIS[s][0];
                        let v0 = c + 2 * b0.parity as u32;
                        if v0 < next[b0.next as usize] {
                            next[b0.next as usize] = v0;
                        }
                        let b1: Branch = TRELLIS[s][1];
                        let v1 = c + sys + 2 * b1.parity as u32;
                        if v1 < next[b1.next as usize] {
                            next[b1.next as usize] = v1;
                        }
                    } else {
                        let b: Branch = TRELLIS[s][fixed];
                        let v = c + 2 * b.parity as u32;
                        if v < next[b.next as usize] {
                            next[b.next as usize] = v;
                        }
                    }
                }
                cost[k] = next;
            }
        }
        let mut out = [INF; SPLITS.len()];
        for k in 0..SPLITS.len() {
            out[k] = (0..STATES)
                .map(|s| cost[k][s].saturating_add(2 * TAIL_WEIGHT[s]))
                .min()
                .unwrap_or(INF);
        }
        out
    }

    /// Exact encoder-2 parity and tail weight of the current word.
    fn encoder2_weight(&self) -> u32 {
        let mut s = 0u8;
        let mut w = 0u32;
        for &i in self.perm {
            let b = TRELLIS[s as usize][self.chosen[i] as usize];
            w += b.parity as u32;
            s = b.next;
        }
        w + TAIL_WEIGHT[s as usize]
    }

    fn visit_node(&mut self) -> Result<()> {
        self.stats.nodes += 1;
        if let Some(limit) = self.node_limit {
            if self.stats.nodes > limit {
                return Err(Error::BudgetExceeded {
                    nodes: self.stats.nodes,
                    snapshot: self.spectrum.clone(),
                });
            }
        }
        Ok(())
    }

    fn record(&mut self, distance: u32, info_weight: u64) -> Flow {
        if distance > self.threshold() {
            return Flow::Continue;
        }
        if !self.spectrum.record_codeword(distance, info_weight) {
            return Flow::Continue;
        }
        self.stats.events += 1;
        let event = SpectrumEvent {
            snapshot: &self.spectrum,
            stage: self.stage,
        };
        match (self.on_update)(&event) {
            Control::Continue => Flow::Continue,
            Control::Abort => Flow::Abort,
        }
    }

    /// Best bound over all splits for words whose encoder-1 suffix from
    /// time `j` is `suffix` and whose prefix follows `tables`.
    fn subtree_bound(
        tables: &[Vec<StateWeights>; SPLITS.len()],
        j: usize,
        suffix: &StateWeights,
        enc2: &[u32; SPLITS.len()],
    ) -> u32 {
        let mut best = 0;
        for k in 0..SPLITS.len() {
            let row = &tables[k][j];
            let enc1 = (0..STATES)
                .map(|s| row[s].saturating_add(2 * suffix[s]))
                .min()
                .unwrap_or(INF);
            best = best.max(half_ceil(enc1.saturating_add(enc2[k])));
        }
        best
    }

    /// Visits every extension of the current word by ones at positions
    /// below `p`. `suffix[s]` is the encoder-1 weight (systematic, parity
    /// and tail) of bits `p..L` when the register holds `s` at time `p`.
    fn expand(&mut self, p: usize, suffix: &StateWeights, info_weight: u64) -> Result<Flow> {
        // Bit j is counted in the encoder-1 suffix, so its share in the
        // encoder-2 bound is given back.
        let mut enc2 = self.encoder2_bounds(p);
        for (e, a) in enc2.iter_mut().zip(SPLITS) {
            *e = e.saturating_sub(2 - a);
        }
        let enc2_fixed = enc2.iter().copied().max().unwrap_or(0);
        // Suffix weights with zeros at j+1..p.
        let mut zeros = *suffix;
        for j in (0..p).rev() {
            if p == self.len {
                self.stage = j;
            }
            let mut child = [INF; STATES];
            for s in 0..STATES {
                let b = TRELLIS[s][1];
                child[s] = (1 + b.parity as u32).saturating_add(zeros[b.next as usize]);
            }

            if Self::subtree_bound(&self.prefix_any, j, &child, &enc2) <= self.threshold() {
                self.visit_node()?;
                self.chosen[j] = true;
                let w = info_weight + 1;

                let flow = 'child: {
                    if half_ceil((2 * child[0]).saturating_add(enc2_fixed)) <= self.threshold() {
                        let d = child[0] + self.encoder2_weight();
                        if let Flow::Abort = self.record(d, w) {
                            break 'child Flow::Abort;
                        }
                    }
                    if j > 0
                        && Self::subtree_bound(&self.prefix_nonzero, j, &child, &enc2)
                            <= self.threshold()
                    {
                        match self.expand(j, &child, w) {
                            Ok(f) => break 'child f,
                            Err(e) => {
                                self.chosen[j] = false;
                                return Err(e);
                            }
                        }
                    }
                    Flow::Continue
                };
                self.chosen[j] = false;
                if let Flow::Abort = flow {
                    return Ok(Flow::Abort);
                }
            }

            let mut next = [INF; STATES];
            for s in 0..STATES {
                let b = TRELLIS[s][0];
                next[s] = (b.parity as u32).saturating_add(zeros[b.next as usize]);
            }
            zeros = next;
        }
        Ok(Flow::Continue)
    }

    fn run(mut self) -> Result<(SpectrumOutcome, SpectrumStats)> {
        let len = self.len;
        let flow = self.expand(len, &TAIL_WEIGHT, 0)?;
        let stats = self.stats;
        match flow {
            Flow::Abort => Ok((SpectrumOutcome::Aborted(self.spectrum), stats)),
            Flow::Continue => {
                let exhaustive = self.ceiling >= (3 * len + TAIL_BITS) as u32;
                if self.spectrum.is_full() || exhaustive {
                    self.spectrum.mark_complete();
                    Ok((SpectrumOutcome::Complete(self.spectrum), stats))
                } else {
                    Err(Error::BudgetExceeded {
                        nodes: stats.nodes,
                        snapshot: self.spectrum,
                    })
                }
            }
        }
    }
}

/// Computes the first `capacity` terms of the spectrum of the turbo code
/// with interleaver `perm`, calling `on_update` after every change of the
/// working spectrum. Returning [`Control::Abort`] stops the computation.
pub fn exact_spectrum<F>(
    perm: &Permutation,
    capacity: usize,
    budget: &Budget,
    on_update: F,
) -> Result<(SpectrumOutcome, SpectrumStats)>
where
    F: FnMut(&SpectrumEvent<'_>) -> Control,
{
    if capacity == 0 {
        return Err(Error::InvalidArgument("spectrum capacity must be at least 1"));
    }
    if perm.is_empty() {
        return Err(Error::InvalidArgument("empty interleaver"));
    }
    Engine::new(perm, capacity, budget, on_update).run()
}

/// [`exact_spectrum`] without an event hook.
pub fn spectrum_of(perm: &Permutation, capacity: usize, budget: &Budget) -> Result<DistanceSpectrum> {
    match exact_spectrum(perm, capacity, budget, |_| Control::Continue)? {
        (SpectrumOutcome::Complete(s), _) => Ok(s),
        (SpectrumOutcome::Aborted(_), _) => unreachable!("consumer never aborts"),
    }
}

/// Exhaustive oracle: encodes all `2^L - 1` nonzero words with the turbo
/// encoder. Refuses `L > 20`.
pub fn brute_force_spectrum(perm: &Permutation, capacity: usize) -> Result<DistanceSpectrum> {
    let len = perm.len();
    if len > BRUTE_FORCE_MAX_LENGTH {
        return Err(Error::InvalidArgument("brute force is limited to L <= 20"));
    }
    if capacity == 0 || len == 0 {
        return Err(Error::InvalidArgument("need capacity >= 1 and L >= 1"));
    }
    let mut spectrum = DistanceSpectrum::new(capacity);
    let mut info = vec![0u8; len];
    for word in 1u32..(1u32 << len) {
        for (i, b) in info.iter_mut().enumerate() {
            *b = ((word >> i) & 1) as u8;
        }
        let cw = crate::codec::turbo_encode(&info, perm)?;
        spectrum.record_codeword(cw.total_weight, cw.info_weight as u64);
    }
    spectrum.mark_complete();
    Ok(spectrum)
}
