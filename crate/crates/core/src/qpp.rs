//! Quadratic permutation polynomials over `Z_L`.
//!
//! A QPP `π(x) = (q0 + q1·x + q2·x²) mod L` is admitted as an interleaver
//! only if it is a bijection on `{0, .., L-1}`. Validity is decided by
//! evaluating the whole table, which is exact and costs `O(L)`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::{Error, Result};

/// Coefficients of a quadratic polynomial over `Z_L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Qpp {
    pub length: usize,
    pub q0: usize,
    pub q1: usize,
    pub q2: usize,
}

impl Qpp {
    /// A polynomial with `q0 = 0`, the LTE convention. Coefficients are
    /// reduced modulo `length`.
    pub fn new(length: usize, q1: usize, q2: usize) -> Self {
        Self::with_shift(length, 0, q1, q2)
    }

    pub fn with_shift(length: usize, q0: usize, q1: usize, q2: usize) -> Self {
        assert!(length >= 1, "interleaver length must be positive");
        Self {
            length,
            q0: q0 % length,
            q1: q1 % length,
            q2: q2 % length,
        }
    }

    /// Ordering key used for reporting: lowest `q1`, then lowest `q2`.
    pub fn sort_key(&self) -> (usize, usize, usize) {
        (self.q1, self.q2, self.q0)
    }

    #[inline]
    fn eval_unchecked(&self, x: usize) -> usize {
        let l = self.length as u64;
        let x = x as u64;
        let sq = (x * x) % l;
        let v = (self.q0 as u64 + (self.q1 as u64 * x) % l + (self.q2 as u64 * sq) % l) % l;
        v as usize
    }

    pub fn evaluate(&self, x: usize) -> Result<usize> {
        if x >= self.length {
            return Err(Error::Domain {
                index: x,
                length: self.length,
            });
        }
        Ok(self.eval_unchecked(x))
    }

    /// The evaluation table, or the first collision if the map is not a
    /// bijection.
    pub fn permutation(&self) -> Result<Permutation> {
        let l = self.length;
        let mut seen = vec![usize::MAX; l];
        let mut table = Vec::with_capacity(l);
        for x in 0..l {
            let v = self.eval_unchecked(x);
            if seen[v] != usize::MAX {
                return Err(Error::NotAPermutation {
                    first: seen[v],
                    second: x,
                    value: v,
                });
            }
            seen[v] = x;
            table.push(v);
        }
        Ok(Permutation { table })
    }

    pub fn is_permutation(&self) -> bool {
        let l = self.length;
        let mut seen = vec![false; l];
        (0..l).all(|x| {
            let v = self.eval_unchecked(x);
            !core::mem::replace(&mut seen[v], true)
        })
    }

    /// Nonlinearity degree `ζ = L / gcd(2·q2, L)` and refined degree `ζ'`,
    /// the number of distinct values of `q2·x² mod L` for `0 <= x < ζ`.
    pub fn nonlinearity(&self) -> Nonlinearity {
        let l = self.length;
        let zeta = l / gcd((2 * self.q2) % l, l).max(1);
        let mut values: Vec<usize> = (0..zeta)
            .map(|x| ((self.q2 as u64 * ((x as u64 * x as u64) % l as u64)) % l as u64) as usize)
            .collect();
        values.sort_unstable();
        values.dedup();
        Nonlinearity {
            zeta,
            zeta_refined: values.len(),
        }
    }

    /// True when the permutation coincides with the linear permutation
    /// polynomial through `π(0)` and `π(1)`.
    pub fn is_lpp_reducible(&self) -> bool {
        let l = self.length as u64;
        let p0 = self.eval_unchecked(0) as u64;
        let slope = (self.eval_unchecked(1 % self.length) as u64 + l - p0) % l;
        (0..self.length).all(|x| (p0 + slope * x as u64) % l == self.eval_unchecked(x) as u64)
    }
}

impl fmt::Display for Qpp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.q0 != 0 {
            write!(f, "{}+", self.q0)?;
        }
        write!(f, "{}x+{}x^2", self.q1, self.q2)
    }
}

/// Both nonlinearity degrees of a QPP.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Nonlinearity {
    pub zeta: usize,
    pub zeta_refined: usize,
}

/// Spread factor together with the nonlinearity degrees.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpreadMetrics {
    pub d: usize,
    pub zeta: usize,
    pub zeta_refined: usize,
}

impl SpreadMetrics {
    pub fn of(qpp: &Qpp, perm: &Permutation) -> Self {
        let nl = qpp.nonlinearity();
        Self {
            d: perm.spread(),
            zeta: nl.zeta,
            zeta_refined: nl.zeta_refined,
        }
    }
}

/// An explicit bijection on `{0, .., L-1}`. `table[x]` is `π(x)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    table: Vec<usize>,
}

impl Permutation {
    pub fn identity(length: usize) -> Self {
        Self {
            table: (0..length).collect(),
        }
    }

    pub fn from_table(table: Vec<usize>) -> Result<Self> {
        let l = table.len();
        let mut seen = vec![usize::MAX; l];
        for (x, &v) in table.iter().enumerate() {
            if v >= l {
                return Err(Error::Domain {
                    index: v,
                    length: l,
                });
            }
            if seen[v] != usize::MAX {
                return Err(Error::NotAPermutation {
                    first: seen[v],
                    second: x,
                    value: v,
                });
            }
            seen[v] = x;
        }
        Ok(Self { table })
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.table
    }

    #[inline]
    pub fn get(&self, x: usize) -> usize {
        self.table[x]
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.table.len()];
        for (x, &v) in self.table.iter().enumerate() {
            inv[v] = x;
        }
        Self { table: inv }
    }

    /// Spread factor `D`: the minimum over `i != j` of
    /// `|i-j|_L + |π(i)-π(j)|_L`.
    pub fn spread(&self) -> usize {
        let l = self.table.len();
        if l < 2 {
            return 0;
        }
        let mut best = usize::MAX;
        // Pairs at circular offset k contribute at least k, so offsets
        // beyond the current best cannot improve it.
        let mut k = 1;
        while k <= l / 2 && k < best {
            for i in 0..l {
                let j = (i + k) % l;
                let delta = k + lee_offset(l, self.table[i], self.table[j]);
                if delta < best {
                    best = delta;
                }
            }
            k += 1;
        }
        best
    }
}

/// Lee (circular) distance `min((i-j) mod L, (j-i) mod L)`.
#[inline]
pub fn lee_offset(length: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < length && j < length);
    let d = i.abs_diff(j);
    d.min(length - d)
}

pub fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Which QPPs of a given length a search covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ClassKind {
    /// Largest-spread QPPs: only candidates achieving the maximal `D`.
    LargestSpread,
    /// Candidates with `D` equal to the target, restricted to maximal `ζ'`.
    SpreadTargetMaxZeta { d_target: usize },
    /// Every admitted QPP.
    All,
}

impl ClassKind {
    pub fn label(&self) -> &'static str {
        match self {
            ClassKind::LargestSpread => "ls",
            ClassKind::SpreadTargetMaxZeta { .. } => "d-target",
            ClassKind::All => "all",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ClassSelector {
    pub kind: ClassKind,
    pub exclude_lpp_reducible: bool,
    pub include_q0: bool,
}

impl ClassSelector {
    pub fn new(kind: ClassKind) -> Self {
        Self {
            kind,
            exclude_lpp_reducible: true,
            include_q0: false,
        }
    }

    pub fn largest_spread() -> Self {
        Self::new(ClassKind::LargestSpread)
    }

    pub fn spread_target(d_target: usize) -> Self {
        Self::new(ClassKind::SpreadTargetMaxZeta { d_target })
    }

    pub fn all() -> Self {
        Self::new(ClassKind::All)
    }
}

/// Enumerates the QPPs of length `length` selected by `selector`, sorted by
/// `(q1, q2)` (then `q0`). Pure LPPs (`q2 = 0`) are never included.
pub fn enumerate_class(length: usize, selector: &ClassSelector) -> Result<Vec<Qpp>> {
    if length < 2 {
        return Err(Error::InvalidArgument("class enumeration needs length >= 2"));
    }
    let q0_range = if selector.include_q0 { length } else { 1 };
    let mut admitted: Vec<(Qpp, usize)> = Vec::new();
    for q1 in 0..length {
        for q2 in 1..length {
            let base = Qpp::new(length, q1, q2);
            if !base.is_permutation() {
                continue;
            }
            if selector.exclude_lpp_reducible && base.is_lpp_reducible() {
                continue;
            }
            // A shift changes neither validity, reducibility nor D.
            let d = base.permutation()?.spread();
            for q0 in 0..q0_range {
                admitted.push((Qpp::with_shift(length, q0, q1, q2), d));
            }
        }
    }

    let selected: Vec<Qpp> = match selector.kind {
        ClassKind::All => admitted.into_iter().map(|(q, _)| q).collect(),
        ClassKind::LargestSpread => {
            let max_d = admitted.iter().map(|&(_, d)| d).max().unwrap_or(0);
            admitted
                .into_iter()
                .filter(|&(_, d)| d == max_d)
                .map(|(q, _)| q)
                .collect()
        }
        ClassKind::SpreadTargetMaxZeta { d_target } => {
            let at_target: Vec<(Qpp, usize)> = admitted
                .into_iter()
                .filter(|&(_, d)| d == d_target)
                .map(|(q, _)| (q, q.nonlinearity().zeta_refined))
                .collect();
            let max_z = at_target.iter().map(|&(_, z)| z).max().unwrap_or(0);
            at_target
                .into_iter()
                .filter(|&(_, z)| z == max_z)
                .map(|(q, _)| q)
                .collect()
        }
    };

    if selected.is_empty() {
        return Err(Error::EmptyClass);
    }
    let mut selected = selected;
    selected.sort_by_key(|q| q.sort_key());
    Ok(selected)
}

/// QPPs whose permutations are identical or mutually inverse; all members
/// share one distance spectrum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QppGroup {
    pub members: Vec<Qpp>,
    pub representative: Qpp,
    pub permutation: Permutation,
}

impl QppGroup {
    /// Members whose permutation equals the representative's (identical
    /// tables only, not inverses).
    pub fn same_permutation_count(&self) -> usize {
        self.members
            .iter()
            .filter(|q| {
                q.permutation()
                    .map(|p| p == self.permutation)
                    .unwrap_or(false)
            })
            .count()
    }
}

/// Partitions valid candidates into spectrum-equivalence groups: two QPPs
/// share a group iff their permutations are equal or inverse to each other.
/// Groups come out in order of first appearance in `candidates`.
pub fn group_by_spectrum_equivalence(candidates: &[Qpp]) -> Result<Vec<QppGroup>> {
    let mut index_of: BTreeMap<Permutation, usize> = BTreeMap::new();
    let mut members: Vec<Vec<Qpp>> = Vec::new();
    for qpp in candidates {
        if let Some(first) = candidates.first() {
            if first.length != qpp.length {
                return Err(Error::LengthMismatch {
                    expected: first.length,
                    actual: qpp.length,
                });
            }
        }
        let perm = qpp.permutation()?;
        let slot = match index_of.get(&perm) {
            Some(&g) => g,
            None => {
                let g = match index_of.get(&perm.inverse()) {
                    Some(&g) => g,
                    None => {
                        members.push(Vec::new());
                        members.len() - 1
                    }
                };
                index_of.insert(perm, g);
                g
            }
        };
        members[slot].push(*qpp);
    }

    members
        .into_iter()
        .map(|mut m| {
            m.sort_by_key(|q| q.sort_key());
            let representative = m[0];
            let permutation = representative.permutation()?;
            Ok(QppGroup {
                members: m,
                representative,
                permutation,
            })
        })
        .collect()
}
