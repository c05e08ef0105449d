//! Deterministic port-based teleportation: operator eigenvalues, fidelities
//! and the coefficients of the optimal measurement and resource state.
//!
//! Diagrams with zero multiplicity (height above `d`) never enter a sum.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use crate::diagrams::{enumerate, HeightCap, YoungDiagram};
use crate::numeric::{big_ratio, pairwise_sum};
use crate::spectral::{spectral_radius, PowerConfig, SpectralMethod};
use crate::{Error, Result};

/// Eigenvalue of `η` on the block `F_μ(α)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProtocolEigen {
    pub alpha: YoungDiagram,
    pub mu: YoungDiagram,
    #[serde(serialize_with = "serialize_ratio")]
    pub gamma: BigRational,
    /// `γ / d^N`, the eigenvalue of `ρ`.
    pub lambda: f64,
}

fn serialize_ratio<S: serde::Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

impl ProtocolEigen {
    pub fn gamma_f64(&self) -> f64 {
        ratio_to_f64(&self.gamma)
    }
}

fn ratio_to_f64(r: &BigRational) -> f64 {
    let (n, d) = (r.numer(), r.denom());
    let mag = big_ratio(n.magnitude(), d.magnitude());
    if (n.sign() == num_bigint::Sign::Minus) ^ (d.sign() == num_bigint::Sign::Minus) {
        -mag
    } else {
        mag
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Resource {
    Optimal,
    SqrtEntangled,
    LowerBound,
}

#[derive(Clone, Debug, Serialize)]
pub struct FidelityReport {
    #[serde(rename = "N")]
    pub ports: usize,
    pub d: usize,
    pub resource: Resource,
    pub fidelity: f64,
    pub method: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
}

/// Optimal measurement and resource-state data for given `(N, d)`.
#[derive(Clone, Debug, Serialize)]
pub struct OptimalSolution {
    #[serde(rename = "N")]
    pub ports: usize,
    pub d: usize,
    pub radius: f64,
    pub method: String,
    /// Diagrams `μ ⊢ N` with `m_μ > 0`, indexing `v`, `o_coeffs` and `c_coeffs`.
    pub basis: Vec<YoungDiagram>,
    /// Perron vector of `M_F^d(N)` with unit Euclidean norm.
    pub v: Vec<f64>,
    /// `p_μ(α)`: coefficient of `F_μ(α)` in `Π`.
    pub p_coeffs: Vec<PCoeff>,
    /// Coefficient of `P_μ` in `O_A`.
    pub o_coeffs: Vec<f64>,
    /// Coefficient of `P_μ` in `X_A`.
    pub c_coeffs: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PCoeff {
    pub alpha: YoungDiagram,
    pub mu: YoungDiagram,
    pub p: f64,
}

fn check_ports_dim(ports: usize, dim: usize, min_dim: usize) -> Result<()> {
    if ports == 0 {
        return Err(Error::InvalidParameter("N must be ≥ 1".into()));
    }
    if dim < min_dim {
        return Err(Error::InvalidParameter(format!("d must be ≥ {min_dim}, got {dim}")));
    }
    Ok(())
}

fn pow_big(d: usize, n: usize) -> BigUint {
    BigUint::from(d).pow(n as u32)
}

/// Pairs `(α ⊢ N−1, μ ⊢ N)` with `μ = α + □` and both multiplicities nonzero,
/// grouped by `α` in canonical order.
fn admissible_blocks(ports: usize, dim: usize) -> Vec<(YoungDiagram, Vec<YoungDiagram>)> {
    let cap = HeightCap::at_most(dim);
    enumerate(ports - 1, cap)
        .iter()
        .map(|alpha| {
            let mut children = alpha.add_box(cap);
            children.sort_by(|a, b| b.cmp(a));
            (alpha.clone(), children)
        })
        .collect()
}

/// `γ_μ(α) = N·m_μ·d_α / (m_α·d_μ)` and `λ = γ/d^N` for every admissible pair.
pub fn protocol_eigenvalues(ports: usize, dim: usize) -> Result<Vec<ProtocolEigen>> {
    check_ports_dim(ports, dim, 1)?;
    let d_n = pow_big(dim, ports);
    let mut out = Vec::new();
    for (alpha, children) in admissible_blocks(ports, dim) {
        let (m_a, d_a) = (alpha.multiplicity(dim), alpha.irrep_dim());
        for mu in children {
            let num = BigUint::from(ports) * mu.multiplicity(dim) * &d_a;
            let den = &m_a * mu.irrep_dim();
            let lambda = big_ratio(&num, &(&den * &d_n));
            let gamma = BigRational::new(BigInt::from(num), BigInt::from(den));
            out.push(ProtocolEigen {
                alpha: alpha.clone(),
                mu,
                gamma,
                lambda,
            });
        }
    }
    Ok(out)
}

/// `F_opt = r(M_F^d(N)) / d²`.
pub fn optimal_fidelity(ports: usize, dim: usize, config: PowerConfig) -> Result<FidelityReport> {
    check_ports_dim(ports, dim, 2)?;
    let spec = spectral_radius(ports, dim, config)?;
    Ok(FidelityReport {
        ports,
        d: dim,
        resource: Resource::Optimal,
        fidelity: spec.radius / (dim * dim) as f64,
        method: spec.method.as_str().to_string(),
        radius: Some(spec.radius),
        iterations: Some(spec.iterations),
    })
}

/// Perron vector and the coefficients of `Π`, `O_A` and `X_A`.
pub fn optimal_solution(ports: usize, dim: usize, config: PowerConfig) -> Result<OptimalSolution> {
    check_ports_dim(ports, dim, 2)?;
    let spec = spectral_radius(ports, dim, config)?;
    let norm = spec.perron.iter().map(|x| x * x).sum::<f64>().sqrt();
    let v: Vec<f64> = spec.perron.iter().map(|x| x / norm).collect();
    let d_n = pow_big(dim, ports);
    let index: BTreeMap<&YoungDiagram, usize> = spec.basis.iter().enumerate().map(|(i, m)| (m, i)).collect();

    let mut o_coeffs = Vec::with_capacity(v.len());
    let mut c_coeffs = Vec::with_capacity(v.len());
    for (mu, &vm) in spec.basis.iter().zip(&v) {
        // d^N / (d_μ m_μ)
        let scale = big_ratio(&d_n, &(mu.irrep_dim() * mu.multiplicity(dim)));
        o_coeffs.push(vm * scale.sqrt());
        c_coeffs.push(vm * vm * scale);
    }

    let sqrt_n = (ports as f64).sqrt();
    let mut p_coeffs = Vec::new();
    for (alpha, children) in admissible_blocks(ports, dim) {
        let alpha_ratio = big_ratio(&alpha.multiplicity(dim), &alpha.irrep_dim()).sqrt();
        for mu in children {
            let vm = v[index[&mu]];
            let p = big_ratio(&d_n, &mu.multiplicity(dim)) * alpha_ratio * vm / sqrt_n;
            p_coeffs.push(PCoeff {
                alpha: alpha.clone(),
                mu,
                p,
            });
        }
    }

    Ok(OptimalSolution {
        ports,
        d: dim,
        radius: spec.radius,
        method: spec.method.as_str().to_string(),
        basis: spec.basis,
        v,
        p_coeffs,
        o_coeffs,
        c_coeffs,
    })
}

/// Fidelity with a maximally entangled resource and the square-root
/// measurement: `d^{-(N+2)}·Σ_α (Σ_{μ∈α} √(d_μ m_μ))²`.
pub fn sqrt_measurement_fidelity(ports: usize, dim: usize) -> Result<FidelityReport> {
    check_ports_dim(ports, dim, 2)?;
    let d_n = pow_big(dim, ports);
    let terms: Vec<f64> = admissible_blocks(ports, dim)
        .into_iter()
        .map(|(_, children)| {
            let roots: Vec<f64> = children
                .iter()
                .map(|mu| big_ratio(&(mu.irrep_dim() * mu.multiplicity(dim)), &d_n).sqrt())
                .collect();
            let s = pairwise_sum(&roots);
            s * s
        })
        .collect();
    Ok(FidelityReport {
        ports,
        d: dim,
        resource: Resource::SqrtEntangled,
        fidelity: pairwise_sum(&terms) / (dim * dim) as f64,
        method: "sqrt_measurement".into(),
        radius: None,
        iterations: None,
    })
}

/// Fidelity of the measurement family
/// `Π_a = Σ_α z(α)·ρ(α)^{-1/y(α)}·σ_a(α)·ρ(α)^{-1/y(α)}`.
pub fn general_povm_fidelity(
    ports: usize,
    dim: usize,
    z: impl Fn(&YoungDiagram) -> f64,
    y: impl Fn(&YoungDiagram) -> f64,
) -> Result<f64> {
    check_ports_dim(ports, dim, 2)?;
    let eigen = protocol_eigenvalues(ports, dim)?;
    let mut by_alpha: BTreeMap<&YoungDiagram, Vec<&ProtocolEigen>> = BTreeMap::new();
    for e in &eigen {
        by_alpha.entry(&e.alpha).or_default().push(e);
    }
    let mut terms = Vec::with_capacity(by_alpha.len());
    for (alpha, block) in by_alpha.iter().rev() {
        let (za, ya) = (z(alpha), y(alpha));
        if !(za >= 0.0) || !za.is_finite() {
            return Err(Error::InvalidParameter(format!("z({alpha}) must be ≥ 0, got {za}")));
        }
        if ya == 0.0 || !ya.is_finite() {
            return Err(Error::InvalidParameter(format!("y({alpha}) must be nonzero, got {ya}")));
        }
        let m_a = alpha.multiplicity(dim);
        let mut c_parts = Vec::with_capacity(block.len());
        let mut tr_parts = Vec::with_capacity(block.len());
        for e in block {
            let (e1, e2) = (-1.0 / ya, 1.0 - 1.0 / ya);
            if e.lambda == 0.0 && (e1 < 0.0 || e2 < 0.0) {
                return Err(Error::Domain(format!(
                    "λ_{}({}) is zero under a negative power",
                    e.mu, e.alpha
                )));
            }
            c_parts.push(e.lambda.powf(e1) * big_ratio(&e.mu.multiplicity(dim), &m_a));
            // d_μ·m_α / d^N, folding the prefactor in to stay in range
            let weight = big_ratio(&(e.mu.irrep_dim() * &m_a), &pow_big(dim, ports));
            tr_parts.push(e.lambda.powf(e2) * weight);
        }
        let c = pairwise_sum(&c_parts) / dim as f64;
        terms.push(za * c * pairwise_sum(&tr_parts));
    }
    Ok(pairwise_sum(&terms) / dim as f64)
}

/// `N / (d² + N − 1)`.
pub fn lower_bound_fidelity(ports: usize, dim: usize) -> Result<FidelityReport> {
    check_ports_dim(ports, dim, 2)?;
    let f = BigRational::new(BigInt::from(ports), BigInt::from(dim * dim + ports - 1));
    Ok(FidelityReport {
        ports,
        d: dim,
        resource: Resource::LowerBound,
        fidelity: ratio_to_f64(&f),
        method: "closed_form".into(),
        radius: None,
        iterations: None,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    #[serde(rename = "N")]
    pub ports: usize,
    pub d: usize,
    pub f_lower: Option<f64>,
    pub f_sqrt_ent: Option<f64>,
    pub f_opt: Option<f64>,
    pub method: Option<String>,
    pub radius: Option<f64>,
    pub iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl SweepRow {
    pub fn is_ok(&self) -> bool {
        self.error.is_none()
    }
}

fn sweep_cell(ports: usize, dim: usize, config: PowerConfig) -> SweepRow {
    let mut row = SweepRow {
        ports,
        d: dim,
        f_lower: None,
        f_sqrt_ent: None,
        f_opt: None,
        method: None,
        radius: None,
        iterations: None,
        error: None,
    };
    let mut errors = Vec::new();
    match lower_bound_fidelity(ports, dim) {
        Ok(r) => row.f_lower = Some(r.fidelity),
        Err(e) => errors.push(e.to_string()),
    }
    match sqrt_measurement_fidelity(ports, dim) {
        Ok(r) => row.f_sqrt_ent = Some(r.fidelity),
        Err(e) => errors.push(e.to_string()),
    }
    match optimal_fidelity(ports, dim, config) {
        Ok(r) => {
            row.f_opt = Some(r.fidelity);
            row.method = Some(r.method);
            row.radius = r.radius;
            row.iterations = r.iterations;
        }
        Err(e) => errors.push(e.to_string()),
    }
    if !errors.is_empty() {
        errors.dedup();
        row.error = Some(errors.join("; "));
    }
    row
}

/// Fidelity table over a grid of `(N, d)`, ordered by `N` then by position
/// in `dims`. A failing cell is reported in its row and does not stop the
/// sweep. `workers = None` uses the global thread pool.
pub fn sweep(
    ports: RangeInclusive<usize>,
    dims: &[usize],
    config: PowerConfig,
    workers: Option<usize>,
) -> Result<Vec<SweepRow>> {
    if ports.is_empty() || dims.is_empty() {
        return Err(Error::InvalidParameter("sweep needs a non-empty N range and d list".into()));
    }
    let cells: Vec<(usize, usize)> = ports.flat_map(|n| dims.iter().map(move |&d| (n, d))).collect();
    let run = || -> Vec<SweepRow> {
        cells
            .par_iter()
            .map(|&(n, d)| sweep_cell(n, d, config))
            .collect()
    };
    match workers {
        Some(0) => Err(Error::InvalidParameter("workers must be ≥ 1".into())),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
            Ok(pool.install(run))
        }
        None => Ok(run()),
    }
}

/// Method label the dispatcher would use, without computing anything.
pub fn method_for(ports: usize, dim: usize) -> SpectralMethod {
    if dim >= ports {
        SpectralMethod::ClosedDgeN
    } else if dim == 2 {
        SpectralMethod::ClosedD2
    } else {
        SpectralMethod::Power
    }
}
