//! Teleportation matrix `M_F^d(N)` and the incidence/Gram matrices built from
//! the branching graph of Young diagrams.
//!
//! `M_F^d(N)` is indexed by diagrams `μ ⊢ N` with `h(μ) ≤ d`. Its diagonal
//! holds `n_μ`, the number of diagrams obtained from `μ` by removing a box;
//! off-diagonal entries are 1 exactly when two diagrams differ by moving one
//! box. The incidence matrix `R` records `α → μ` box additions and both
//! Gram products of `R` reproduce teleportation matrices:
//!
//! * `Rᵀ·R = M_F^d(N)`
//! * `R·Rᵀ = J_p + M_F^d(N−1)`, where `J_p` is 1 on the diagonal at rows
//!   `α` that can still grow a new row (`h(α) < d`).

use std::collections::BTreeMap;
use std::fmt;
use std::io;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::diagrams::{enumerate, DiagramBasis, HeightCap, YoungDiagram};
use crate::{Error, Result};

/// Row-compressed integer matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseIntMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<i64>,
}

impl SparseIntMatrix {
    /// Build from `(row, col, value)` triplets; duplicates are summed and
    /// explicit zeros dropped.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, i64)]) -> Self {
        let mut rows: Vec<BTreeMap<usize, i64>> = vec![BTreeMap::new(); nrows];
        for &(i, j, v) in triplets {
            assert!(i < nrows && j < ncols, "triplet ({i},{j}) out of bounds");
            *rows[i].entry(j).or_insert(0) += v;
        }
        let mut row_ptr = Vec::with_capacity(nrows + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for row in rows {
            for (j, v) in row {
                if v != 0 {
                    col_idx.push(j);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Self {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn from_dense(rows: &[Vec<i64>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let triplets: Vec<_> = rows
            .iter()
            .enumerate()
            .flat_map(|(i, r)| {
                assert_eq!(r.len(), ncols, "ragged dense matrix");
                r.iter().enumerate().map(move |(j, &v)| (i, j, v))
            })
            .collect();
        Self::from_triplets(nrows, ncols, &triplets)
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn is_square(&self) -> bool {
        self.nrows == self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Nonzeros of row `i` as `(col, value)`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, i64)> + '_ {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[span.clone()]
            .iter()
            .copied()
            .zip(self.values[span].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.col_idx[span.clone()].binary_search(&j) {
            Ok(k) => self.values[span.start + k],
            Err(_) => 0,
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut out = vec![vec![0; self.ncols]; self.nrows];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in self.row(i) {
                row[j] = v;
            }
        }
        out
    }

    pub fn to_dense_f64(&self) -> Vec<Vec<f64>> {
        self.to_dense()
            .into_iter()
            .map(|r| r.into_iter().map(|v| v as f64).collect())
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let triplets: Vec<_> = (0..self.nrows)
            .flat_map(|i| self.row(i).map(move |(j, v)| (j, i, v)))
            .collect();
        Self::from_triplets(self.ncols, self.nrows, &triplets)
    }

    /// Exact product; panics on dimension mismatch or `i64` overflow.
    pub fn matmul(&self, other: &SparseIntMatrix) -> SparseIntMatrix {
        assert_eq!(self.ncols, other.nrows, "inner dimensions differ");
        let mut triplets = Vec::new();
        for i in 0..self.nrows {
            let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
            for (k, a) in self.row(i) {
                for (j, b) in other.row(k) {
                    let e = acc.entry(j).or_insert(0);
                    *e = e
                        .checked_add(a.checked_mul(b).expect("i64 overflow"))
                        .expect("i64 overflow");
                }
            }
            triplets.extend(acc.into_iter().map(|(j, v)| (i, j, v)));
        }
        Self::from_triplets(self.nrows, other.ncols, &triplets)
    }

    /// `y = A·x` in floating point.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.ncols);
        assert_eq!(y.len(), self.nrows);
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.row(i).map(|(j, v)| v as f64 * x[j]).sum();
        }
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && *self == self.transpose()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|&v| v >= 0)
    }

    /// `max_i Σ_j |a_ij|`.
    pub fn max_row_sum(&self) -> i64 {
        (0..self.nrows)
            .map(|i| self.row(i).map(|(_, v)| v.abs()).sum())
            .max()
            .unwrap_or(0)
    }

    /// `vᵀ·A·v` in exact rational arithmetic.
    pub fn quadratic_form(&self, v: &[BigRational]) -> BigRational {
        assert!(self.is_square() && v.len() == self.nrows);
        let mut total = BigRational::zero();
        for (i, vi) in v.iter().enumerate() {
            for (j, a) in self.row(i) {
                total += vi * &v[j] * BigRational::from_integer(BigInt::from(a));
            }
        }
        total
    }

    /// Exact rank via fraction-free (Bareiss) elimination.
    pub fn rank(&self) -> usize {
        let mut m: Vec<Vec<BigInt>> = self
            .to_dense()
            .into_iter()
            .map(|r| r.into_iter().map(BigInt::from).collect())
            .collect();
        let (nrows, ncols) = (self.nrows, self.ncols);
        let mut rank = 0;
        let mut prev = BigInt::from(1);
        for col in 0..ncols {
            if rank == nrows {
                break;
            }
            let Some(pivot) = (rank..nrows).find(|&r| !m[r][col].is_zero()) else {
                continue;
            };
            m.swap(rank, pivot);
            for r in rank + 1..nrows {
                for c in col + 1..ncols {
                    let num = &m[rank][col] * &m[r][c] - &m[r][col] * &m[rank][c];
                    debug_assert!((&num % &prev).is_zero());
                    m[r][c] = num / &prev;
                }
                m[r][col] = BigInt::zero();
            }
            prev = m[rank][col].clone();
            rank += 1;
        }
        rank
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum MatrixKind {
    MF,
    R,
    G,
    H,
}

impl fmt::Display for MatrixKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            MatrixKind::MF => "MF",
            MatrixKind::R => "R",
            MatrixKind::G => "G",
            MatrixKind::H => "H",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for MatrixKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "MF" => Ok(MatrixKind::MF),
            "R" => Ok(MatrixKind::R),
            "G" => Ok(MatrixKind::G),
            "H" => Ok(MatrixKind::H),
            _ => Err(Error::Parse {
                what: "matrix kind",
                input: s.to_string(),
            }),
        }
    }
}

/// Integer matrix whose rows and columns are labelled by Young diagrams.
#[derive(Clone, Debug)]
pub struct LabeledIntMatrix {
    kind: MatrixKind,
    ports: usize,
    dim: usize,
    row_basis: DiagramBasis,
    col_basis: DiagramBasis,
    matrix: SparseIntMatrix,
}

impl LabeledIntMatrix {
    pub fn kind(&self) -> MatrixKind {
        self.kind
    }

    /// Number of ports `N` the matrix was built for.
    pub fn ports(&self) -> usize {
        self.ports
    }

    /// Local dimension (height cap) `d`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row_basis(&self) -> &DiagramBasis {
        &self.row_basis
    }

    pub fn col_basis(&self) -> &DiagramBasis {
        &self.col_basis
    }

    pub fn matrix(&self) -> &SparseIntMatrix {
        &self.matrix
    }

    pub fn get(&self, row: &YoungDiagram, col: &YoungDiagram) -> Option<i64> {
        let i = self.row_basis.position(row)?;
        let j = self.col_basis.position(col)?;
        Some(self.matrix.get(i, j))
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        self.matrix.to_dense()
    }

    /// CSV with a header row and header column of diagram labels.
    pub fn write_csv<W: io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let header: Vec<String> = std::iter::once(String::new())
            .chain(self.col_basis.iter().map(ToString::to_string))
            .collect();
        w.write_record(&header).map_err(csv_err)?;
        for (i, alpha) in self.row_basis.iter().enumerate() {
            let record: Vec<String> = std::iter::once(alpha.to_string())
                .chain((0..self.matrix.ncols()).map(|j| self.matrix.get(i, j).to_string()))
                .collect();
            w.write_record(&record).map_err(csv_err)?;
        }
        w.flush().map_err(|e| Error::InvalidParameter(format!("write failed: {e}")))?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("CSV is UTF-8")
    }

    /// Parse CSV written by [`write_csv`](Self::write_csv). Labels must match
    /// the canonical bases for `(kind, N, d)`.
    pub fn read_csv<R: io::Read>(kind: MatrixKind, ports: usize, dim: usize, input: R) -> Result<Self> {
        let template = build(kind, ports, dim)?;
        let mut rdr = csv::ReaderBuilder::new().has_headers(false).from_reader(input);
        let mut records = rdr.records();
        let header = records
            .next()
            .ok_or_else(|| Error::InvalidParameter("empty CSV".into()))?
            .map_err(csv_err)?;
        let cols: Vec<YoungDiagram> = header
            .iter()
            .skip(1)
            .map(str::parse)
            .collect::<Result<_>>()?;
        if cols != template.col_basis.entries() {
            return Err(Error::InvalidParameter("CSV column labels do not match basis".into()));
        }
        let mut rows = Vec::new();
        let mut dense = Vec::new();
        for record in records {
            let record = record.map_err(csv_err)?;
            let mut fields = record.iter();
            let label: YoungDiagram = fields.next().unwrap_or("").parse()?;
            rows.push(label);
            let values = fields
                .map(|f| {
                    f.trim().parse::<i64>().map_err(|_| Error::Parse {
                        what: "matrix entry",
                        input: f.to_string(),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            if values.len() != cols.len() {
                return Err(Error::InvalidParameter("ragged CSV row".into()));
            }
            dense.push(values);
        }
        if rows != template.row_basis.entries() {
            return Err(Error::InvalidParameter("CSV row labels do not match basis".into()));
        }
        Ok(LabeledIntMatrix {
            matrix: SparseIntMatrix::from_triplets(
                rows.len(),
                cols.len(),
                &dense
                    .iter()
                    .enumerate()
                    .flat_map(|(i, r)| r.iter().enumerate().map(move |(j, &v)| (i, j, v)))
                    .collect::<Vec<_>>(),
            ),
            ..template
        })
    }

    pub fn to_json_value(&self) -> MatrixJson {
        MatrixJson {
            kind: self.kind,
            n: self.ports,
            d: self.dim,
            basis: self.col_basis.entries().to_vec(),
            row_basis: (self.kind == MatrixKind::R).then(|| self.row_basis.entries().to_vec()),
            entries: self.to_dense(),
        }
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::InvalidParameter(format!("CSV error: {e}"))
}

/// JSON shape `{kind, N, d, basis, entries}`; `row_basis` appears only for
/// the rectangular incidence matrix.
#[derive(Clone, Debug, Serialize)]
pub struct MatrixJson {
    pub kind: MatrixKind,
    #[serde(rename = "N")]
    pub n: usize,
    pub d: usize,
    pub basis: Vec<YoungDiagram>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub row_basis: Option<Vec<YoungDiagram>>,
    pub entries: Vec<Vec<i64>>,
}

/// Build any of the four matrix kinds.
pub fn build(kind: MatrixKind, ports: usize, dim: usize) -> Result<LabeledIntMatrix> {
    match kind {
        MatrixKind::MF => teleportation_matrix(ports, dim),
        MatrixKind::R => incidence_matrix(ports, dim),
        MatrixKind::G => gram_g(ports, dim),
        MatrixKind::H => gram_h(ports, dim),
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 {
        return Err(Error::InvalidParameter("local dimension d must be ≥ 1".into()));
    }
    Ok(())
}

/// `M_F^d(N) = (n_μ δ_{μν} + Δ_{μν})` over diagrams of height `≤ d`.
pub fn teleportation_matrix(ports: usize, dim: usize) -> Result<LabeledIntMatrix> {
    check_dim(dim)?;
    let cap = HeightCap::at_most(dim);
    let basis = enumerate(ports, cap);
    let mut triplets = Vec::new();
    for (i, mu) in basis.iter().enumerate() {
        let parents = mu.remove_box();
        triplets.push((i, i, parents.len() as i64));
        // Two distinct diagrams are one box-move apart iff they share a parent,
        // and then the shared parent is unique.
        let mut neighbours: Vec<usize> = parents
            .iter()
            .flat_map(|alpha| alpha.add_box(cap))
            .filter(|nu| nu != mu)
            .filter_map(|nu| basis.position(&nu))
            .collect();
        neighbours.sort_unstable();
        neighbours.dedup();
        triplets.extend(neighbours.into_iter().map(|j| (i, j, 1)));
    }
    let matrix = SparseIntMatrix::from_triplets(basis.len(), basis.len(), &triplets);
    Ok(LabeledIntMatrix {
        kind: MatrixKind::MF,
        ports,
        dim,
        row_basis: basis.clone(),
        col_basis: basis,
        matrix,
    })
}

fn check_ports_for_gram(ports: usize) -> Result<()> {
    if ports < 2 {
        return Err(Error::InvalidParameter("N must be ≥ 2 for R, G and H".into()));
    }
    Ok(())
}

/// `R_N^d`: rows `α ⊢ N−1`, columns `μ ⊢ N`, entry 1 iff `μ` is `α` plus a
/// box (both heights `≤ d`).
pub fn incidence_matrix(ports: usize, dim: usize) -> Result<LabeledIntMatrix> {
    check_ports_for_gram(ports)?;
    check_dim(dim)?;
    let cap = HeightCap::at_most(dim);
    let rows = enumerate(ports - 1, cap);
    let cols = enumerate(ports, cap);
    let triplets: Vec<_> = rows
        .iter()
        .enumerate()
        .flat_map(|(i, alpha)| {
            alpha
                .add_box(cap)
                .into_iter()
                .filter_map(|mu| cols.position(&mu))
                .map(move |j| (i, j, 1))
                .collect::<Vec<_>>()
        })
        .collect();
    let matrix = SparseIntMatrix::from_triplets(rows.len(), cols.len(), &triplets);
    Ok(LabeledIntMatrix {
        kind: MatrixKind::R,
        ports,
        dim,
        row_basis: rows,
        col_basis: cols,
        matrix,
    })
}

/// `G_N^d = Rᵀ·R`.
pub fn gram_g(ports: usize, dim: usize) -> Result<LabeledIntMatrix> {
    let r = incidence_matrix(ports, dim)?;
    let matrix = r.matrix.transpose().matmul(&r.matrix);
    Ok(LabeledIntMatrix {
        kind: MatrixKind::G,
        ports,
        dim,
        row_basis: r.col_basis.clone(),
        col_basis: r.col_basis,
        matrix,
    })
}

/// `H_N^d = R·Rᵀ`.
pub fn gram_h(ports: usize, dim: usize) -> Result<LabeledIntMatrix> {
    let r = incidence_matrix(ports, dim)?;
    let matrix = r.matrix.matmul(&r.matrix.transpose());
    Ok(LabeledIntMatrix {
        kind: MatrixKind::H,
        ports,
        dim,
        row_basis: r.row_basis.clone(),
        col_basis: r.row_basis,
        matrix,
    })
}

/// Diagonal of `J_p` over the `α ⊢ N−1` basis: 1 where `h(α) < d`.
///
/// Those rows of `R` keep the box added as a new row; rows with `h(α) = d`
/// lose it, so only the former gain 1 over `n_α` on the diagonal of `H`.
pub fn j_p_diagonal(ports: usize, dim: usize) -> Result<Vec<i64>> {
    check_ports_for_gram(ports)?;
    check_dim(dim)?;
    Ok(enumerate(ports - 1, dim)
        .iter()
        .map(|alpha| i64::from(alpha.height() < dim))
        .collect())
}

/// `H_N^d − M_F^d(N−1) − J_p`; the zero matrix when the recursion holds.
pub fn recursion_defect(ports: usize, dim: usize) -> Result<Vec<Vec<i64>>> {
    let h = gram_h(ports, dim)?.to_dense();
    let m = teleportation_matrix(ports - 1, dim)?.to_dense();
    let jp = j_p_diagonal(ports, dim)?;
    Ok(h.iter()
        .zip(&m)
        .enumerate()
        .map(|(i, (hr, mr))| {
            hr.iter()
                .zip(mr)
                .enumerate()
                .map(|(j, (a, b))| a - b - if i == j { jp[i] } else { 0 })
                .collect()
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct StructureReport {
    pub irreducible: bool,
    pub primitive: bool,
    pub centrosymmetric: bool,
    pub positive_diagonal: bool,
    pub max_row_sum: i64,
}

/// Irreducibility, primitivity, centrosymmetry and `‖·‖₁` of a square
/// non-negative matrix.
///
/// Irreducible: every `(i, j)` has `(A^q)_{ij} > 0` for some `q ≥ 1`,
/// i.e. `j` is reachable from `i` by a walk of positive length. Primitive is
/// reported as irreducible with a positive diagonal.
pub fn structure_report(m: &SparseIntMatrix) -> StructureReport {
    assert!(m.is_square(), "structure report needs a square matrix");
    let n = m.nrows();
    let irreducible = n > 0 && (0..n).all(|start| reachable_in_positive_steps(m, start).iter().all(|&r| r));
    let positive_diagonal = (0..n).all(|i| m.get(i, i) > 0);
    let centrosymmetric = (0..n).all(|i| m.row(i).all(|(j, v)| m.get(n - 1 - i, n - 1 - j) == v))
        && (0..n).all(|i| m.row(n - 1 - i).all(|(j, v)| m.get(i, n - 1 - j) == v));
    StructureReport {
        irreducible,
        primitive: irreducible && positive_diagonal,
        centrosymmetric,
        positive_diagonal,
        max_row_sum: m.max_row_sum(),
    }
}

fn reachable_in_positive_steps(m: &SparseIntMatrix, start: usize) -> Vec<bool> {
    let mut seen = vec![false; m.nrows()];
    let mut stack: Vec<usize> = m.row(start).filter(|&(_, v)| v > 0).map(|(j, _)| j).collect();
    while let Some(k) = stack.pop() {
        if seen[k] {
            continue;
        }
        seen[k] = true;
        stack.extend(m.row(k).filter(|&(j, v)| v > 0 && !seen[j]).map(|(j, _)| j));
    }
    seen
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn teleportation_matrix_examples() {
        let m = teleportation_matrix(2, 2).unwrap();
        assert_eq!(m.to_dense(), vec![vec![1, 1], vec![1, 1]]);
        let m = teleportation_matrix(3, 2).unwrap();
        assert_eq!(m.to_dense(), vec![vec![1, 1], vec![1, 2]]);
        let m = teleportation_matrix(4, 4).unwrap();
        assert!(m.matrix().max_row_sum() <= 16);
        assert_eq!(teleportation_matrix(1, 2).unwrap().to_dense(), vec![vec![1]]);
        assert!(teleportation_matrix(3, 0).is_err());
    }

    #[test]
    fn full_teleportation_matrix_for_four_ports() {
        // basis (4),(3,1),(2,2),(2,1,1),(1^4)
        let m = teleportation_matrix(4, 4).unwrap();
        assert_eq!(
            m.to_dense(),
            vec![
                vec![1, 1, 0, 0, 0],
                vec![1, 2, 1, 1, 0],
                vec![0, 1, 1, 1, 0],
                vec![0, 1, 1, 2, 1],
                vec![0, 0, 0, 1, 1],
            ]
        );
    }

    #[test]
    fn off_diagonal_matches_box_move_relation() {
        for n in 2..=7 {
            for d in 1..=n {
                let m = teleportation_matrix(n, d).unwrap();
                let b = m.row_basis();
                for (i, mu) in b.iter().enumerate() {
                    assert_eq!(m.matrix().get(i, i), mu.remove_box().len() as i64);
                    for (j, nu) in b.iter().enumerate() {
                        if i != j {
                            let want = i64::from(mu.box_move_related(nu).unwrap());
                            assert_eq!(m.matrix().get(i, j), want);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn truncation_is_principal_submatrix() {
        let full = teleportation_matrix(6, 6).unwrap();
        for d in 1..6 {
            let sub = teleportation_matrix(6, d).unwrap();
            for (i, mu) in sub.row_basis().iter().enumerate() {
                for (j, nu) in sub.col_basis().iter().enumerate() {
                    assert_eq!(Some(sub.matrix().get(i, j)), full.get(mu, nu));
                }
                assert!(full.row_basis().position(mu).is_some());
            }
        }
        let big = teleportation_matrix(6, 10).unwrap();
        assert_eq!(big.to_dense(), full.to_dense());
    }

    #[test]
    fn incidence_examples() {
        assert_eq!(
            incidence_matrix(4, 4).unwrap().to_dense(),
            vec![vec![1, 1, 0, 0, 0], vec![0, 1, 1, 1, 0], vec![0, 0, 0, 1, 1]]
        );
        assert_eq!(incidence_matrix(2, 2).unwrap().to_dense(), vec![vec![1, 1]]);
        assert_eq!(incidence_matrix(3, 2).unwrap().to_dense(), vec![vec![1, 1], vec![0, 1]]);
        assert!(incidence_matrix(1, 2).is_err());
    }

    #[test]
    fn gram_examples() {
        let g = gram_g(4, 4).unwrap();
        assert_eq!(g.to_dense(), teleportation_matrix(4, 4).unwrap().to_dense());
        for n in 2..=7 {
            let h = gram_h(n, n).unwrap().to_dense();
            let m = teleportation_matrix(n - 1, n).unwrap().to_dense();
            for i in 0..h.len() {
                for j in 0..h.len() {
                    assert_eq!(h[i][j], m[i][j] + i64::from(i == j));
                }
            }
        }
        // H(4,2) = [[2,1],[1,2]] = J_1 + [[1,1],[1,2]]
        assert_eq!(gram_h(4, 2).unwrap().to_dense(), vec![vec![2, 1], vec![1, 2]]);
        assert_eq!(j_p_diagonal(4, 2).unwrap(), vec![1, 0]);
    }

    #[test]
    fn recursion_defect_vanishes() {
        for (n, d) in [(4, 4), (5, 2), (2, 2), (7, 3), (8, 5)] {
            let defect = recursion_defect(n, d).unwrap();
            assert!(defect.iter().flatten().all(|&v| v == 0), "n={n} d={d}: {defect:?}");
        }
    }

    #[test]
    fn incidence_has_full_row_rank() {
        for n in 2..=8 {
            for d in 2..=n {
                let r = incidence_matrix(n, d).unwrap();
                assert_eq!(r.matrix().rank(), r.matrix().nrows(), "n={n} d={d}");
            }
        }
    }

    #[test]
    fn rank_of_known_matrices() {
        let m = SparseIntMatrix::from_dense(&[vec![1, 2], vec![2, 4]]);
        assert_eq!(m.rank(), 1);
        let m = SparseIntMatrix::from_dense(&[vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, 0]]);
        assert_eq!(m.rank(), 2);
    }

    #[test]
    fn structure_examples() {
        let m = teleportation_matrix(4, 4).unwrap();
        let s = structure_report(m.matrix());
        assert!(s.irreducible && s.primitive);
        assert!(structure_report(teleportation_matrix(5, 5).unwrap().matrix()).centrosymmetric);
        for n in 2..=8 {
            for d in 2..=4 {
                let s = structure_report(teleportation_matrix(n, d).unwrap().matrix());
                assert!(s.max_row_sum <= (d * d) as i64, "n={n} d={d}");
                assert!(s.irreducible && s.primitive);
            }
        }
    }

    #[test]
    fn full_matrices_are_centrosymmetric_up_to_five_ports() {
        for n in 1..=5 {
            let s = structure_report(teleportation_matrix(n, n).unwrap().matrix());
            assert!(s.centrosymmetric, "n={n}");
        }
        // From six boxes on, reversing the lexicographic order is no longer
        // conjugation, so the flip symmetry breaks.
        for n in 6..=9 {
            let s = structure_report(teleportation_matrix(n, n).unwrap().matrix());
            assert!(!s.centrosymmetric, "n={n}");
        }
    }

    #[test]
    fn full_matrices_are_conjugation_invariant() {
        for n in 1..=9 {
            let m = teleportation_matrix(n, n).unwrap();
            for mu in m.row_basis().iter() {
                for nu in m.col_basis().iter() {
                    assert_eq!(m.get(mu, nu), m.get(&mu.conjugate(), &nu.conjugate()));
                }
            }
        }
    }

    #[test]
    fn structure_detects_reducible_and_imprimitive() {
        let block = SparseIntMatrix::from_dense(&[vec![1, 0], vec![0, 1]]);
        let s = structure_report(&block);
        assert!(!s.irreducible && !s.primitive);
        let cycle = SparseIntMatrix::from_dense(&[vec![0, 1], vec![1, 0]]);
        let s = structure_report(&cycle);
        assert!(s.irreducible && !s.primitive && s.centrosymmetric);
        let upper = SparseIntMatrix::from_dense(&[vec![1, 1], vec![0, 1]]);
        assert!(!structure_report(&upper).centrosymmetric);
    }

    #[test]
    fn quadratic_form_exact() {
        let m = teleportation_matrix(3, 3).unwrap();
        let v: Vec<BigRational> = [1, -2, 3]
            .iter()
            .map(|&x| BigRational::from_integer(BigInt::from(x)))
            .collect();
        // [[1,1,0],[1,2,1],[0,1,1]] → 1 + 8 + 9 + 2(−2 − 6) = 2
        assert_eq!(m.matrix().quadratic_form(&v), BigRational::from_integer(BigInt::from(2)));
    }

    #[test]
    fn csv_round_trip_and_labels() {
        let m = teleportation_matrix(4, 4).unwrap();
        let text = m.to_csv_string();
        assert!(text.starts_with(",[4],\"[3,1]\",\"[2,2]\",\"[2,1,1]\",\"[1,1,1,1]\"\n"));
        let back = LabeledIntMatrix::read_csv(MatrixKind::MF, 4, 4, text.as_bytes()).unwrap();
        assert_eq!(back.to_dense(), m.to_dense());
        let r = incidence_matrix(4, 4).unwrap();
        let back = LabeledIntMatrix::read_csv(MatrixKind::R, 4, 4, r.to_csv_string().as_bytes()).unwrap();
        assert_eq!(back.to_dense(), r.to_dense());
        assert!(LabeledIntMatrix::read_csv(MatrixKind::MF, 4, 3, text.as_bytes()).is_err());
    }
}
