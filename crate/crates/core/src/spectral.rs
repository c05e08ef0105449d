//! Spectral radius and Perron eigenvector of `M_F^d(N)`.
//!
//! Three routes:
//!
//! * `d ≥ N`: the radius is exactly `N` and the Perron vector is the vector
//!   of irrep dimensions `d_μ`.
//! * `d = 2`: the matrix is tridiagonal and its eigenvalues are
//!   `4·cos²(kπ/(N+2))`.
//! * otherwise: sum-normalised power iteration from the uniform vector,
//!   stopping when successive normalisers differ by less than `tol`.
//!
//! All eigenvalues refer to the integer matrix; division by `d²` happens in
//! [`crate::protocol`].

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_bigint::BigInt;
use serde::Serialize;

use crate::characters::{character_matrix, cycle_types};
use crate::diagrams::{irrep_dim_f64, YoungDiagram};
use crate::numeric::pairwise_sum;
use crate::telemat::{structure_report, teleportation_matrix, LabeledIntMatrix, SparseIntMatrix};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectralMethod {
    ClosedDgeN,
    ClosedD2,
    Power,
}

impl SpectralMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            SpectralMethod::ClosedDgeN => "closed_dgeN",
            SpectralMethod::ClosedD2 => "closed_d2",
            SpectralMethod::Power => "power",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectralResult {
    pub radius: f64,
    /// Diagram labels of `perron`; empty for unlabelled matrices.
    pub basis: Vec<YoungDiagram>,
    /// Positive eigenvector normalised to unit sum.
    pub perron: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
    #[serde(serialize_with = "serialize_method")]
    pub method: SpectralMethod,
}

fn serialize_method<S: serde::Serializer>(m: &SpectralMethod, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(m.as_str())
}

#[derive(Clone, Copy, Debug)]
pub struct PowerConfig {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PowerConfig {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 1_000_000,
        }
    }
}

/// Power iteration on a labelled teleportation-type matrix.
pub fn power_iteration(m: &LabeledIntMatrix, config: PowerConfig) -> Result<SpectralResult> {
    let mut result = power_iteration_raw(m.matrix(), config)?;
    result.basis = m.row_basis().entries().to_vec();
    Ok(result)
}

/// `v^{m+1} = A·w^m`, `w^{m+1} = v^{m+1} / Σ_j v_j^{m+1}` from
/// `w⁰ = (1/n, …, 1/n)`; the radius estimate is `Σ_j v_j`.
///
/// Rejects inputs that are not non-negative, square and primitive.
pub fn power_iteration_raw(a: &SparseIntMatrix, config: PowerConfig) -> Result<SpectralResult> {
    if !(config.tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tol must be > 0, got {}", config.tol)));
    }
    if !a.is_square() || a.nrows() == 0 {
        return Err(Error::InvalidParameter("power iteration needs a non-empty square matrix".into()));
    }
    if !a.is_nonnegative() {
        return Err(Error::InvalidParameter("power iteration needs a non-negative matrix".into()));
    }
    let report = structure_report(a);
    if !report.primitive {
        return Err(Error::NotPrimitive {
            irreducible: report.irreducible,
            positive_diagonal: report.positive_diagonal,
        });
    }
    let n = a.nrows();
    if n == 1 {
        return Ok(SpectralResult {
            radius: a.get(0, 0) as f64,
            basis: Vec::new(),
            perron: vec![1.0],
            iterations: 1,
            residual: 0.0,
            method: SpectralMethod::Power,
        });
    }

    let mut w = vec![1.0 / n as f64; n];
    let mut v = vec![0.0; n];
    let mut previous: Option<f64> = None;
    let mut residual = f64::INFINITY;
    for iteration in 1..=config.max_iter {
        a.matvec(&w, &mut v);
        let s = pairwise_sum(&v);
        for (wi, vi) in w.iter_mut().zip(&v) {
            *wi = vi / s;
        }
        if let Some(p) = previous {
            residual = (s - p).abs();
            if residual < config.tol {
                return Ok(SpectralResult {
                    radius: s,
                    basis: Vec::new(),
                    perron: w,
                    iterations: iteration,
                    residual,
                    method: SpectralMethod::Power,
                });
            }
        }
        previous = Some(s);
    }
    Err(Error::NotConverged {
        iterations: config.max_iter,
        residual,
        last_radius: previous.unwrap_or(f64::NAN),
        last_vector: w,
    })
}

/// Radius `N`, Perron vector `d_μ / Σ_ν d_ν`; valid only when every irrep of
/// `S(N)` is present (`d ≥ N`).
pub fn closed_form_full(ports: usize, dim: usize) -> Result<SpectralResult> {
    if dim < ports {
        return Err(Error::InvalidParameter(format!(
            "closed form needs d ≥ N, got N={ports} d={dim}"
        )));
    }
    let basis = crate::diagrams::enumerate(ports, dim);
    let dims: Vec<f64> = basis.iter().map(irrep_dim_f64).collect();
    let total = pairwise_sum(&dims);
    Ok(SpectralResult {
        radius: ports as f64,
        basis: basis.entries().to_vec(),
        perron: dims.iter().map(|x| x / total).collect(),
        iterations: 0,
        residual: 0.0,
        method: SpectralMethod::ClosedDgeN,
    })
}

/// All eigenvalues of the integer matrix `M_F²(N)`, descending:
/// `4·cos²(kπ/(N+2))` for `k = 1..=⌊N/2⌋+1`.
pub fn closed_form_d2(ports: usize) -> Vec<f64> {
    let t = ports / 2 + 1;
    (1..=t)
        .map(|k| {
            let c = (k as f64 * PI / (ports as f64 + 2.0)).cos();
            4.0 * c * c
        })
        .collect()
}

/// Spectral radius and Perron vector of `M_F^d(N)` by the cheapest valid
/// route.
pub fn spectral_radius(ports: usize, dim: usize, config: PowerConfig) -> Result<SpectralResult> {
    if ports == 0 || dim == 0 {
        return Err(Error::InvalidParameter("need N ≥ 1 and d ≥ 1".into()));
    }
    if dim >= ports {
        return closed_form_full(ports, dim);
    }
    let m = teleportation_matrix(ports, dim)?;
    let mut result = power_iteration(&m, config)?;
    if dim == 2 {
        // The radius is known exactly; the eigenvector still comes from the
        // iteration.
        result.radius = closed_form_d2(ports)[0];
        result.method = SpectralMethod::ClosedD2;
    }
    Ok(result)
}

/// Verify `M_F·T(C) = k·T(C)` exactly for every class `C` with `k` fixed
/// points, and return `{k → number of classes with k fixed points}`.
///
/// Also asserts the spectrum is `{0, 1, …, N−2, N}`.
pub fn spectrum_via_characters(ports: usize) -> Result<BTreeMap<usize, usize>> {
    if ports == 0 {
        return Err(Error::InvalidParameter("N must be ≥ 1".into()));
    }
    let m = teleportation_matrix(ports, ports)?;
    let t = character_matrix(ports);
    debug_assert_eq!(t.rows().entries(), m.row_basis().entries());
    let mut spectrum = BTreeMap::new();
    for (c, class) in t.cols().iter().enumerate() {
        let k = class.fixed_points();
        let column = t.column(c);
        for i in 0..column.len() {
            let lhs: BigInt = m.matrix().row(i).map(|(j, a)| BigInt::from(a) * &column[j]).sum();
            let rhs = BigInt::from(k) * &column[i];
            if lhs != rhs {
                return Err(Error::IdentityFailed(format!(
                    "M_F·T(C) ≠ k·T(C) for N={ports}, C={class}, row {i}: {lhs} vs {rhs}"
                )));
            }
        }
        *spectrum.entry(k).or_insert(0) += 1;
    }
    let expected: Vec<usize> = if ports == 1 {
        vec![1]
    } else {
        (0..=ports - 2).chain(std::iter::once(ports)).collect()
    };
    let got: Vec<usize> = spectrum.keys().copied().collect();
    if got != expected {
        return Err(Error::IdentityFailed(format!(
            "spectrum of M_F({ports}) is {got:?}, expected {expected:?}"
        )));
    }
    Ok(spectrum)
}

/// Number of cycle types of `S(N)` with exactly `k` fixed points.
pub fn classes_with_fixed_points(ports: usize, k: usize) -> usize {
    cycle_types(ports).iter().filter(|c| c.fixed_points() == k).count()
}

/// Eigen-decomposition of a real symmetric matrix.
#[derive(Clone, Debug)]
pub struct SymmetricEigen {
    /// Eigenvalues, descending.
    pub values: Vec<f64>,
    /// `vectors[k]` is the unit eigenvector for `values[k]`.
    pub vectors: Vec<Vec<f64>>,
    pub sweeps: usize,
}

const JACOBI_TOL: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi eigensolver; stops when the off-diagonal Frobenius norm
/// drops below `1e-12·max(1, ‖A‖_F)`.
pub fn symmetric_eigen(matrix: &[Vec<f64>]) -> SymmetricEigen {
    let n = matrix.len();
    let mut a: Vec<Vec<f64>> = matrix.to_vec();
    for row in &a {
        assert_eq!(row.len(), n, "matrix must be square");
    }
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let frob = a.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
    let threshold = JACOBI_TOL * frob.max(1.0);

    let mut sweeps = 0;
    while sweeps < JACOBI_MAX_SWEEPS {
        let off = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum::<f64>()
            .sqrt();
        if off <= threshold {
            break;
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for row in a.iter_mut() {
                    let (akp, akq) = (row[p], row[q]);
                    row[p] = c * akp - s * akq;
                    row[q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let (vkp, vkq) = (row[p], row[q]);
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j][j].total_cmp(&a[i][i]));
    SymmetricEigen {
        values: order.iter().map(|&k| a[k][k]).collect(),
        vectors: order.iter().map(|&k| v.iter().map(|row| row[k]).collect()).collect(),
        sweeps,
    }
}
