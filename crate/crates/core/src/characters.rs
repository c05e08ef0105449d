//! Conjugacy classes and irreducible characters of `S(N)`.
//!
//! Characters are evaluated with the Murnaghan–Nakayama rule: strip border
//! strips of the current cycle length, largest cycles first, with sign
//! `(-1)^{leg length}`. Strips are located on the beta-set (first-column hook
//! lengths) of the diagram, where removing a strip of length `ℓ` is moving a
//! bead from `β` to `β − ℓ`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::diagrams::{enumerate, DiagramBasis, HeightCap, YoungDiagram};
use crate::{Error, Result};

/// Cycle type of a permutation: a partition of `N` into cycle lengths.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CycleType {
    /// Cycle lengths, weakly decreasing.
    parts: Vec<usize>,
}

impl CycleType {
    pub fn from_parts(mut parts: Vec<usize>) -> Result<Self> {
        if parts.contains(&0) {
            return Err(Error::InvalidParameter("cycle length 0".into()));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Self { parts })
    }

    pub fn identity(n: usize) -> Self {
        Self { parts: vec![1; n] }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn n(&self) -> usize {
        self.parts.iter().sum()
    }

    /// Multiplicity `ξ_ℓ` of each cycle length present.
    pub fn counts(&self) -> BTreeMap<usize, usize> {
        let mut counts = BTreeMap::new();
        for &p in &self.parts {
            *counts.entry(p).or_insert(0) += 1;
        }
        counts
    }

    pub fn fixed_points(&self) -> usize {
        self.parts.iter().filter(|&&p| p == 1).count()
    }

    /// The class of `S(N−1)` obtained by deleting one fixed point.
    pub fn without_fixed_point(&self) -> Option<CycleType> {
        let pos = self.parts.iter().rposition(|&p| p == 1)?;
        let mut parts = self.parts.clone();
        parts.remove(pos);
        Some(CycleType { parts })
    }

    /// `|C| = N! / ∏ (ℓ^{ξ_ℓ} · ξ_ℓ!)`.
    pub fn class_size(&self) -> BigUint {
        let factorial = |k: usize| -> BigUint { (1..=k).map(BigUint::from).product() };
        let mut centralizer = BigUint::one();
        for (len, count) in self.counts() {
            centralizer *= BigUint::from(len).pow(count as u32) * factorial(count);
        }
        factorial(self.n()) / centralizer
    }
}

impl fmt::Display for CycleType {
    /// `"1^k 2^x ..."`, ascending cycle length.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .counts()
            .into_iter()
            .map(|(len, count)| format!("{len}^{count}"))
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

impl FromStr for CycleType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parse_err = || Error::Parse {
            what: "cycle type",
            input: s.to_string(),
        };
        let mut parts = Vec::new();
        for token in s.split_whitespace() {
            let (len, count) = token.split_once('^').ok_or_else(parse_err)?;
            let len: usize = len.parse().map_err(|_| parse_err())?;
            let count: usize = count.parse().map_err(|_| parse_err())?;
            parts.extend(std::iter::repeat_n(len, count));
        }
        CycleType::from_parts(parts)
    }
}

impl Serialize for CycleType {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// All cycle types of `S(n)`, ordered by fixed-point count descending, then
/// by cycle lengths in decreasing lexicographic order.
pub fn cycle_types(n: usize) -> Vec<CycleType> {
    let mut out: Vec<CycleType> = enumerate(n, HeightCap::UNBOUNDED)
        .iter()
        .map(|p| CycleType {
            parts: p.rows().to_vec(),
        })
        .collect();
    out.sort_by(|a, b| {
        b.fixed_points()
            .cmp(&a.fixed_points())
            .then_with(|| b.parts.cmp(&a.parts))
    });
    out
}

type MemoKey = (Vec<usize>, Vec<usize>);

/// Murnaghan–Nakayama evaluator with a memo keyed by
/// `(diagram rows, remaining cycles)`.
#[derive(Default)]
pub struct CharacterEvaluator {
    memo: HashMap<MemoKey, BigInt>,
}

impl CharacterEvaluator {
    pub fn new() -> Self {
        Self::default()
    }

    /// `χ_μ(C)`.
    pub fn character(&mut self, mu: &YoungDiagram, class: &CycleType) -> Result<BigInt> {
        if mu.boxes() != class.n() {
            return Err(Error::BoxCountMismatch {
                left: mu.boxes(),
                right: class.n(),
            });
        }
        Ok(self.eval(mu.rows(), class.parts()))
    }

    fn eval(&mut self, rows: &[usize], cycles: &[usize]) -> BigInt {
        let Some((&len, rest)) = cycles.split_first() else {
            return BigInt::one();
        };
        let key = (rows.to_vec(), cycles.to_vec());
        if let Some(v) = self.memo.get(&key) {
            return v.clone();
        }
        let mut total = BigInt::zero();
        for (smaller, leg) in remove_border_strips(rows, len) {
            let v = self.eval(&smaller, rest);
            if leg % 2 == 0 {
                total += v;
            } else {
                total -= v;
            }
        }
        self.memo.insert(key, total.clone());
        total
    }
}

/// Every diagram obtained by removing a border strip of length `len`,
/// paired with the strip's leg length (rows spanned minus one).
fn remove_border_strips(rows: &[usize], len: usize) -> Vec<(Vec<usize>, usize)> {
    let h = rows.len();
    let beta: Vec<usize> = rows.iter().enumerate().map(|(i, &r)| r + h - 1 - i).collect();
    let mut out = Vec::new();
    for (i, &b) in beta.iter().enumerate() {
        if b < len {
            continue;
        }
        let target = b - len;
        if beta.contains(&target) {
            continue;
        }
        let leg = beta.iter().filter(|&&x| x > target && x < b).count();
        let mut moved = beta.clone();
        moved[i] = target;
        moved.sort_unstable_by(|a, b| b.cmp(a));
        let mut new_rows: Vec<usize> = moved
            .iter()
            .enumerate()
            .map(|(k, &x)| x - (h - 1 - k))
            .collect();
        while new_rows.last() == Some(&0) {
            new_rows.pop();
        }
        out.push((new_rows, leg));
    }
    out
}

/// `χ_μ(C)` with a fresh memo.
pub fn character(mu: &YoungDiagram, class: &CycleType) -> Result<BigInt> {
    CharacterEvaluator::new().character(mu, class)
}

/// Character of `Ind_{S(N−1)}^{S(N)} φ^α` on class `C`: `k·χ_α(C′)` with `k`
/// the fixed points of `C` and `C′` the class with one fixed point removed.
pub fn induced_character(alpha: &YoungDiagram, class: &CycleType) -> Result<BigInt> {
    if alpha.boxes() + 1 != class.n() {
        return Err(Error::BoxCountMismatch {
            left: alpha.boxes() + 1,
            right: class.n(),
        });
    }
    let k = class.fixed_points();
    match class.without_fixed_point() {
        None => Ok(BigInt::zero()),
        Some(reduced) => Ok(BigInt::from(k) * character(alpha, &reduced)?),
    }
}

/// Full character table `T = (χ_μ(C))`; rows in canonical diagram order,
/// columns per [`cycle_types`].
#[derive(Clone, Debug)]
pub struct CharacterMatrix {
    rows: DiagramBasis,
    cols: Vec<CycleType>,
    entries: Vec<Vec<BigInt>>,
}

impl CharacterMatrix {
    pub fn n(&self) -> usize {
        self.rows.boxes()
    }

    pub fn rows(&self) -> &DiagramBasis {
        &self.rows
    }

    pub fn cols(&self) -> &[CycleType] {
        &self.cols
    }

    pub fn entries(&self) -> &[Vec<BigInt>] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> &BigInt {
        &self.entries[row][col]
    }

    /// Column `T(C)` as a vector over the diagram basis.
    pub fn column(&self, col: usize) -> Vec<BigInt> {
        self.entries.iter().map(|r| r[col].clone()).collect()
    }
}

pub fn character_matrix(n: usize) -> CharacterMatrix {
    let rows = enumerate(n, HeightCap::UNBOUNDED);
    let cols = cycle_types(n);
    let mut eval = CharacterEvaluator::new();
    let entries = rows
        .iter()
        .map(|mu| cols.iter().map(|c| eval.eval(mu.rows(), c.parts())).collect())
        .collect();
    CharacterMatrix { rows, cols, entries }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn yd(rows: &[usize]) -> YoungDiagram {
        YoungDiagram::new(rows.to_vec()).unwrap()
    }

    fn ct(parts: &[usize]) -> CycleType {
        CycleType::from_parts(parts.to_vec()).unwrap()
    }

    fn int(v: i64) -> BigInt {
        BigInt::from(v)
    }

    /// Sign of a permutation from its cycle type: (-1)^{N − #cycles}.
    fn sign(class: &CycleType) -> i64 {
        if (class.n() - class.parts().len()) % 2 == 0 {
            1
        } else {
            -1
        }
    }

    #[test]
    fn cycle_type_examples() {
        let three: Vec<Vec<usize>> = cycle_types(3).iter().map(|c| c.parts().to_vec()).collect();
        assert_eq!(three, vec![vec![1, 1, 1], vec![2, 1], vec![3]]);
        assert_eq!(cycle_types(4).len(), 5);
        assert_eq!(cycle_types(1), vec![ct(&[1])]);
        for n in 1..=8 {
            let cs = cycle_types(n);
            for w in cs.windows(2) {
                assert!(w[0].fixed_points() >= w[1].fixed_points());
            }
        }
    }

    #[test]
    fn cycle_type_text_form() {
        let c = ct(&[2, 1, 1]);
        assert_eq!(c.to_string(), "1^2 2^1");
        assert_eq!("1^2 2^1".parse::<CycleType>().unwrap(), c);
        assert_eq!(c.fixed_points(), 2);
        assert_eq!(c.counts().get(&2), Some(&1));
    }

    #[test]
    fn class_sizes_sum_to_factorial() {
        for n in 1..=9 {
            let total: BigUint = cycle_types(n).iter().map(|c| c.class_size()).sum();
            let fact: BigUint = (1..=n).map(BigUint::from).product();
            assert_eq!(total, fact);
        }
        assert_eq!(ct(&[2, 1]).class_size(), BigUint::from(3u32));
    }

    #[test]
    fn character_examples() {
        for c in cycle_types(5) {
            assert_eq!(character(&yd(&[5]), &c).unwrap(), int(1));
        }
        assert_eq!(character(&yd(&[1, 1, 1]), &ct(&[3])).unwrap(), int(1));
        assert_eq!(character(&yd(&[2, 1]), &ct(&[2, 1])).unwrap(), int(0));
        assert!(matches!(
            character(&yd(&[2, 1]), &ct(&[2, 2])),
            Err(Error::BoxCountMismatch { .. })
        ));
    }

    #[test]
    fn sign_representation_matches_permutation_sign() {
        for n in 1..=8 {
            let sign_irrep = YoungDiagram::new(vec![1; n]).unwrap();
            for c in cycle_types(n) {
                assert_eq!(character(&sign_irrep, &c).unwrap(), int(sign(&c)));
            }
        }
    }

    #[test]
    fn character_matrix_examples() {
        let t2 = character_matrix(2);
        assert_eq!(t2.entries(), &[vec![int(1), int(1)], vec![int(1), int(-1)]]);
        let t3 = character_matrix(3);
        assert_eq!(t3.column(0), vec![int(1), int(2), int(1)]);
        assert_eq!(character_matrix(1).entries(), &[vec![int(1)]]);
    }

    #[test]
    fn identity_column_is_dimension_vector() {
        for n in 1..=9 {
            let t = character_matrix(n);
            assert_eq!(t.cols()[0], CycleType::identity(n));
            for (i, mu) in t.rows().iter().enumerate() {
                assert_eq!(t.get(i, 0), &BigInt::from(mu.irrep_dim()));
            }
        }
    }

    #[test]
    fn column_orthogonality() {
        for n in 1..=7 {
            let t = character_matrix(n);
            let fact: BigUint = (1..=n).map(BigUint::from).product();
            for (a, ca) in t.cols().iter().enumerate() {
                for b in 0..t.cols().len() {
                    let dot: BigInt = (0..t.rows().len()).map(|i| t.get(i, a) * t.get(i, b)).sum();
                    let lhs = dot * BigInt::from(ca.class_size());
                    let rhs = if a == b { BigInt::from(fact.clone()) } else { BigInt::zero() };
                    assert_eq!(lhs, rhs, "n={n} a={a} b={b}");
                }
            }
        }
    }

    #[test]
    fn induced_character_examples() {
        assert_eq!(induced_character(&yd(&[1]), &ct(&[1, 1])).unwrap(), int(2));
        assert_eq!(induced_character(&yd(&[2]), &ct(&[3])).unwrap(), int(0));
        assert_eq!(induced_character(&yd(&[1, 1]), &ct(&[2, 1])).unwrap(), int(-1));
        assert!(induced_character(&yd(&[1, 1]), &ct(&[2, 2])).is_err());
    }

    #[test]
    fn induced_character_at_identity() {
        for n in 2..=7 {
            for alpha in enumerate(n - 1, HeightCap::UNBOUNDED).iter() {
                let v = induced_character(alpha, &CycleType::identity(n)).unwrap();
                assert_eq!(v, BigInt::from(n) * BigInt::from(alpha.irrep_dim()));
            }
        }
    }

    #[test]
    fn induced_character_matches_branching() {
        for n in 2..=7 {
            for alpha in enumerate(n - 1, HeightCap::UNBOUNDED).iter() {
                for c in cycle_types(n) {
                    let induced = induced_character(alpha, &c).unwrap();
                    let summed: BigInt = alpha
                        .add_box(HeightCap::UNBOUNDED)
                        .iter()
                        .map(|mu| character(mu, &c).unwrap())
                        .sum();
                    assert_eq!(induced, summed, "alpha={alpha} C={c}");
                }
            }
        }
    }

    #[test]
    fn table_for_n10_is_fast_and_orthogonal_on_first_column() {
        let start = std::time::Instant::now();
        let t = character_matrix(10);
        assert!(start.elapsed().as_secs_f64() < 1.0);
        let dims_sq: BigInt = (0..t.rows().len()).map(|i| t.get(i, 0) * t.get(i, 0)).sum();
        assert_eq!(dims_sq, BigInt::from(3_628_800u64));
    }
}
