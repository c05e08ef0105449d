//! Young diagrams and the combinatorics that index every matrix in the crate.
//!
//! A diagram `μ ⊢ N` labels an irreducible representation of the symmetric
//! group `S(N)`. Its irrep dimension `d_μ` is the number of standard tableaux
//! (hook length formula) and its Schur–Weyl multiplicity `m_μ(d)` in
//! `(ℂ^d)^{⊗N}` is the number of semistandard tableaux with entries `≤ d`
//! (hook-content formula). Both are exact big integers.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::{Error, Result};

/// Integer partition with weakly decreasing, strictly positive rows.
///
/// The empty diagram (zero boxes) is valid; its dimension and multiplicity
/// are both 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct YoungDiagram {
    rows: Vec<usize>,
}

impl YoungDiagram {
    pub fn new(rows: Vec<usize>) -> Result<Self> {
        let ok = rows.iter().all(|&r| r > 0) && rows.windows(2).all(|w| w[0] >= w[1]);
        if ok {
            Ok(Self { rows })
        } else {
            Err(Error::InvalidDiagram(rows))
        }
    }

    pub fn empty() -> Self {
        Self { rows: Vec::new() }
    }

    /// The trivial-irrep diagram `(n)`; empty for `n = 0`.
    pub fn single_row(n: usize) -> Self {
        if n == 0 {
            Self::empty()
        } else {
            Self { rows: vec![n] }
        }
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn boxes(&self) -> usize {
        self.rows.iter().sum()
    }

    pub fn height(&self) -> usize {
        self.rows.len()
    }

    /// Length of column `j` (0-based).
    fn column_len(&self, j: usize) -> usize {
        self.rows.iter().take_while(|&&r| r > j).count()
    }

    /// Hook lengths of every cell in row-major order.
    pub fn hook_lengths(&self) -> Vec<usize> {
        let mut hooks = Vec::with_capacity(self.boxes());
        for (i, &row) in self.rows.iter().enumerate() {
            for j in 0..row {
                let arm = row - j - 1;
                let leg = self.column_len(j) - i - 1;
                hooks.push(arm + leg + 1);
            }
        }
        hooks
    }

    /// All diagrams obtained by adding one box, keeping height within `cap`.
    pub fn add_box(&self, cap: HeightCap) -> Vec<YoungDiagram> {
        let mut out = Vec::new();
        for i in 0..=self.rows.len() {
            let fits = i == 0 || i == self.rows.len() || self.rows[i] < self.rows[i - 1];
            if !fits {
                continue;
            }
            let mut rows = self.rows.clone();
            if i == rows.len() {
                rows.push(1);
            } else {
                rows[i] += 1;
            }
            if cap.admits(rows.len()) {
                out.push(YoungDiagram { rows });
            }
        }
        out
    }

    /// All diagrams obtained by removing one box; one per distinct row length.
    pub fn remove_box(&self) -> Vec<YoungDiagram> {
        let mut out = Vec::new();
        for i in 0..self.rows.len() {
            let last_of_its_length = i + 1 == self.rows.len() || self.rows[i + 1] < self.rows[i];
            if !last_of_its_length {
                continue;
            }
            let mut rows = self.rows.clone();
            rows[i] -= 1;
            if rows[i] == 0 {
                rows.pop();
            }
            out.push(YoungDiagram { rows });
        }
        out
    }

    /// Whether `self` can be obtained from `other` by moving one box.
    pub fn box_move_related(&self, other: &YoungDiagram) -> Result<bool> {
        if self.boxes() != other.boxes() {
            return Err(Error::BoxCountMismatch {
                left: self.boxes(),
                right: other.boxes(),
            });
        }
        if self == other {
            return Ok(false);
        }
        let mine = self.remove_box();
        Ok(other.remove_box().iter().any(|a| mine.contains(a)))
    }

    /// `d_μ = N! / ∏ hooks`.
    pub fn irrep_dim(&self) -> BigUint {
        let n = self.boxes();
        let factorial: BigUint = (1..=n).map(BigUint::from).product();
        let hooks: BigUint = self.hook_lengths().into_iter().map(BigUint::from).product();
        factorial / hooks
    }

    /// `m_μ(d) = ∏ (d + c) / ∏ hooks` over cells with content `c = j − i`;
    /// zero when the height exceeds `d`.
    pub fn multiplicity(&self, d: usize) -> BigUint {
        if self.height() > d {
            return BigUint::zero();
        }
        let mut numerator = BigUint::one();
        for (i, &row) in self.rows.iter().enumerate() {
            for j in 0..row {
                numerator *= BigUint::from(d + j - i);
            }
        }
        let hooks: BigUint = self.hook_lengths().into_iter().map(BigUint::from).product();
        debug_assert!((&numerator % &hooks).is_zero());
        numerator / hooks
    }

    /// Conjugate (transposed) diagram.
    pub fn conjugate(&self) -> YoungDiagram {
        let width = self.rows.first().copied().unwrap_or(0);
        YoungDiagram {
            rows: (0..width).map(|j| self.column_len(j)).collect(),
        }
    }
}

impl fmt::Display for YoungDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, r) in self.rows.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{r}")?;
        }
        write!(f, "]")
    }
}

impl FromStr for YoungDiagram {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parse_err = || Error::Parse {
            what: "Young diagram",
            input: s.to_string(),
        };
        let inner = s
            .trim()
            .strip_prefix('[')
            .and_then(|t| t.strip_suffix(']'))
            .ok_or_else(parse_err)?;
        if inner.trim().is_empty() {
            return Ok(YoungDiagram::empty());
        }
        let rows = inner
            .split(',')
            .map(|t| t.trim().parse::<usize>().map_err(|_| parse_err()))
            .collect::<Result<Vec<_>>>()?;
        YoungDiagram::new(rows)
    }
}

impl Serialize for YoungDiagram {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Upper bound on diagram height; `d` for `(ℂ^d)^{⊗N}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct HeightCap(Option<usize>);

impl HeightCap {
    pub const UNBOUNDED: HeightCap = HeightCap(None);

    pub fn at_most(d: usize) -> Self {
        HeightCap(Some(d))
    }

    pub fn admits(self, height: usize) -> bool {
        self.0.is_none_or(|d| height <= d)
    }

    pub fn get(self) -> Option<usize> {
        self.0
    }
}

impl From<usize> for HeightCap {
    fn from(d: usize) -> Self {
        HeightCap::at_most(d)
    }
}

/// All diagrams of `n` boxes with height within the cap, in strongly
/// decreasing lexicographic order starting at `(n)`.
#[derive(Clone, Debug)]
pub struct DiagramBasis {
    boxes: usize,
    cap: HeightCap,
    entries: Vec<YoungDiagram>,
    index: HashMap<YoungDiagram, usize>,
}

impl DiagramBasis {
    pub fn boxes(&self) -> usize {
        self.boxes
    }

    pub fn cap(&self) -> HeightCap {
        self.cap
    }

    pub fn entries(&self) -> &[YoungDiagram] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn position(&self, diagram: &YoungDiagram) -> Option<usize> {
        self.index.get(diagram).copied()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, YoungDiagram> {
        self.entries.iter()
    }
}

impl std::ops::Index<usize> for DiagramBasis {
    type Output = YoungDiagram;

    fn index(&self, i: usize) -> &YoungDiagram {
        &self.entries[i]
    }
}

impl<'a> IntoIterator for &'a DiagramBasis {
    type Item = &'a YoungDiagram;
    type IntoIter = std::slice::Iter<'a, YoungDiagram>;

    fn into_iter(self) -> Self::IntoIter {
        self.entries.iter()
    }
}

/// Enumerate partitions of `n` with height within `cap`.
///
/// `n = 0` yields the single empty diagram.
pub fn enumerate(n: usize, cap: impl Into<HeightCap>) -> DiagramBasis {
    let cap = cap.into();
    let mut entries = Vec::new();
    let mut rows = Vec::new();
    partitions_into(n, n, cap, &mut rows, &mut entries);
    let index = entries
        .iter()
        .enumerate()
        .map(|(i, d)| (d.clone(), i))
        .collect();
    DiagramBasis {
        boxes: n,
        cap,
        entries,
        index,
    }
}

fn partitions_into(
    remaining: usize,
    max_part: usize,
    cap: HeightCap,
    rows: &mut Vec<usize>,
    out: &mut Vec<YoungDiagram>,
) {
    if remaining == 0 {
        out.push(YoungDiagram { rows: rows.clone() });
        return;
    }
    if !cap.admits(rows.len() + 1) {
        return;
    }
    for part in (1..=max_part.min(remaining)).rev() {
        rows.push(part);
        partitions_into(remaining - part, part, cap, rows, out);
        rows.pop();
    }
}

/// Number of partitions of `n` (no height restriction).
pub fn partition_count(n: usize) -> usize {
    let mut p = vec![0usize; n + 1];
    p[0] = 1;
    for part in 1..=n {
        for total in part..=n {
            p[total] += p[total - part];
        }
    }
    p[n]
}

/// Exact `d_μ·m_μ(d)`, the trace of the Young projector `P_μ`.
pub fn projector_trace(mu: &YoungDiagram, d: usize) -> BigUint {
    mu.irrep_dim() * mu.multiplicity(d)
}

/// `m_μ` as `f64`; convenience for floating formulas.
pub fn multiplicity_f64(mu: &YoungDiagram, d: usize) -> f64 {
    crate::numeric::big_to_f64(&mu.multiplicity(d))
}

/// `d_μ` as `f64`.
pub fn irrep_dim_f64(mu: &YoungDiagram) -> f64 {
    crate::numeric::big_to_f64(&mu.irrep_dim())
}
