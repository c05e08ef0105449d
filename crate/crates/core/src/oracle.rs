//! Brute-force dense verification at small `(N, d)`.
//!
//! Everything here is built from scratch in the computational basis of
//! `(ℂ^d)^{⊗k}`: permutation operators, Young projectors, the PBT operator
//! `η`, its eigenprojectors `F_μ(α)`, the optimal measurement and the dual
//! witness. Each closed-form claim of [`crate::protocol`] is then checked by
//! direct linear algebra.
//!
//! Basis index convention: the first tensor factor is the most significant
//! digit. Subsystems are numbered from 1 in the public API, with subsystem
//! `n = N + 1` the receiver's port partner.

use std::collections::{BTreeMap, HashMap};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::characters::{CharacterEvaluator, CycleType};
use crate::checks::{CheckResult, VerifyReport};
use crate::diagrams::{enumerate, irrep_dim_f64, multiplicity_f64, HeightCap, YoungDiagram};
use crate::numeric::bigint_to_f64;
use crate::protocol::{optimal_solution, protocol_eigenvalues, sqrt_measurement_fidelity, ProtocolEigen};
use crate::spectral::{symmetric_eigen, PowerConfig};
use crate::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Environment variable overriding [`OracleConfig::cap`].
pub const CAP_ENV: &str = "PBT_ORACLE_CAP";
pub const DEFAULT_CAP: usize = 1024;

/// Eigenvalues below this are treated as zero when inverting `ρ`.
const PSEUDO_INVERSE_CUTOFF: f64 = 1e-10;
const RANK_CUTOFF: f64 = 1e-8;

#[derive(Clone, Copy, Debug)]
pub struct OracleConfig {
    /// Largest Hilbert-space dimension `d^k` the oracle will materialise.
    pub cap: usize,
    pub power: PowerConfig,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            cap: DEFAULT_CAP,
            power: PowerConfig::default(),
        }
    }
}

impl OracleConfig {
    /// Default configuration with the cap taken from `PBT_ORACLE_CAP` if set.
    pub fn from_env() -> Result<Self> {
        let mut config = Self::default();
        if let Ok(raw) = std::env::var(CAP_ENV) {
            config.cap = raw.trim().parse().map_err(|_| Error::Parse {
                what: "oracle cap",
                input: raw.clone(),
            })?;
        }
        Ok(config)
    }

    fn check(&self, d: usize, systems: usize) -> Result<usize> {
        let dim = checked_pow(d, systems).filter(|&x| x <= self.cap);
        dim.ok_or(Error::CapExceeded {
            dim: checked_pow(d, systems).unwrap_or(usize::MAX),
            cap: self.cap,
        })
    }
}

fn checked_pow(d: usize, k: usize) -> Option<usize> {
    d.checked_pow(u32::try_from(k).ok()?)
}

/// Operator on `k` qudits of local dimension `d`.
#[derive(Clone, Debug)]
pub struct DenseOperator {
    d: usize,
    systems: usize,
    matrix: CMatrix,
}

impl DenseOperator {
    pub fn new(d: usize, systems: usize, matrix: CMatrix) -> Result<Self> {
        let dim = checked_pow(d, systems).ok_or_else(|| Error::InvalidParameter("dimension overflow".into()))?;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::InvalidParameter(format!(
                "matrix is {}×{}, expected {dim}×{dim} for {systems} systems of dimension {d}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self { d, systems, matrix })
    }

    pub fn identity(d: usize, systems: usize) -> Self {
        let dim = d.pow(systems as u32);
        Self {
            d,
            systems,
            matrix: CMatrix::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn local_dim(&self) -> usize {
        self.d
    }

    pub fn systems(&self) -> usize {
        self.systems
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    /// `max |A − A†|` entrywise.
    pub fn hermiticity_residual(&self) -> f64 {
        max_abs(&(&self.matrix - self.matrix.adjoint()))
    }

    pub fn partial_transpose_last(&self) -> Self {
        Self {
            d: self.d,
            systems: self.systems,
            matrix: partial_transpose_last(&self.matrix, self.d),
        }
    }

    pub fn partial_trace_last(&self) -> Self {
        Self {
            d: self.d,
            systems: self.systems - 1,
            matrix: partial_trace_last(&self.matrix, self.d),
        }
    }

    /// `self ⊗ other`.
    pub fn tensor(&self, other: &DenseOperator) -> Self {
        assert_eq!(self.d, other.d, "local dimensions differ");
        Self {
            d: self.d,
            systems: self.systems + other.systems,
            matrix: self.matrix.kronecker(&other.matrix),
        }
    }

    /// Eigenvalues of a Hermitian operator, descending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }
}

/// `max_{ij} |A_ij|`.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn real_embedding(m: &CMatrix) -> Vec<Vec<f64>> {
    // [[Re, −Im], [Im, Re]] is symmetric iff m is Hermitian; each eigenvalue
    // of m appears twice.
    let n = m.nrows();
    let mut out = vec![vec![0.0; 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            let z = m[(i, j)];
            out[i][j] = z.re;
            out[i + n][j + n] = z.re;
            out[i][j + n] = -z.im;
            out[i + n][j] = z.im;
        }
    }
    out
}

pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let e = symmetric_eigen(&real_embedding(m));
    e.values.chunks(2).map(|pair| 0.5 * (pair[0] + pair[1])).collect()
}

/// `f(A)` for Hermitian `A` through its spectral decomposition.
pub fn hermitian_function(m: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let n = m.nrows();
    let e = symmetric_eigen(&real_embedding(m));
    let mut acc = vec![vec![0.0; 2 * n]; 2 * n];
    for (value, vector) in e.values.iter().zip(&e.vectors) {
        let fv = f(*value);
        if fv == 0.0 {
            continue;
        }
        for i in 0..2 * n {
            let vi = fv * vector[i];
            if vi == 0.0 {
                continue;
            }
            for (j, a) in acc[i].iter_mut().enumerate() {
                *a += vi * vector[j];
            }
        }
    }
    CMatrix::from_fn(n, n, |i, j| Complex64::new(acc[i][j], acc[i + n][j]))
}

fn partial_transpose_last(m: &CMatrix, d: usize) -> CMatrix {
    let n = m.nrows();
    CMatrix::from_fn(n, n, |r, c| {
        let (x, i) = (r / d, r % d);
        let (y, j) = (c / d, c % d);
        m[(x * d + j, y * d + i)]
    })
}

fn partial_trace_last(m: &CMatrix, d: usize) -> CMatrix {
    let n = m.nrows() / d;
    CMatrix::from_fn(n, n, |x, y| (0..d).map(|i| m[(x * d + i, y * d + i)]).sum())
}

/// Validate a permutation given as 0-based images.
fn check_permutation(sigma: &[usize]) -> Result<()> {
    let mut seen = vec![false; sigma.len()];
    for &s in sigma {
        if s >= sigma.len() || std::mem::replace(&mut seen[s], true) {
            return Err(Error::InvalidParameter(format!("{sigma:?} is not a permutation")));
        }
    }
    Ok(())
}

/// `map[c] = r` with `V(σ)|c⟩ = |r⟩`: the content of slot `l` moves to
/// slot `σ(l)`.
fn permutation_index_map(sigma: &[usize], d: usize) -> Vec<usize> {
    let k = sigma.len();
    let dim = d.pow(k as u32);
    let mut weights = vec![1usize; k];
    for j in (0..k.saturating_sub(1)).rev() {
        weights[j] = weights[j + 1] * d;
    }
    (0..dim)
        .map(|c| {
            let mut r = 0;
            for l in 0..k {
                let digit = (c / weights[l]) % d;
                r += digit * weights[sigma[l]];
            }
            r
        })
        .collect()
}

/// `V(σ)` on `k = σ.len()` systems; `σ` is given by 0-based images,
/// `sigma[l] = σ(l)`.
pub fn permutation_operator(sigma: &[usize], d: usize, config: &OracleConfig) -> Result<DenseOperator> {
    check_permutation(sigma)?;
    let dim = config.check(d, sigma.len())?;
    let map = permutation_index_map(sigma, d);
    let mut m = CMatrix::zeros(dim, dim);
    for (c, &r) in map.iter().enumerate() {
        m[(r, c)] = Complex64::new(1.0, 0.0);
    }
    DenseOperator::new(d, sigma.len(), m)
}

/// Transposition of subsystems `a` and `b` (1-based) on `k` systems.
pub fn transposition(k: usize, a: usize, b: usize) -> Vec<usize> {
    let mut sigma: Vec<usize> = (0..k).collect();
    sigma.swap(a - 1, b - 1);
    sigma
}

/// `V A V†` for a permutation operator given by its index map.
fn conjugate_by_permutation(m: &CMatrix, map: &[usize]) -> CMatrix {
    let n = m.nrows();
    let mut out = CMatrix::zeros(n, n);
    for c in 0..n {
        for r in 0..n {
            out[(map[r], map[c])] = m[(r, c)];
        }
    }
    out
}

fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..n).collect();
    heap_permute(n, &mut current, &mut out);
    out
}

fn heap_permute(k: usize, a: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if k <= 1 {
        out.push(a.clone());
        return;
    }
    for i in 0..k - 1 {
        heap_permute(k - 1, a, out);
        if k % 2 == 0 {
            a.swap(i, k - 1);
        } else {
            a.swap(0, k - 1);
        }
    }
    heap_permute(k - 1, a, out);
}

fn cycle_type_of(sigma: &[usize]) -> CycleType {
    let mut seen = vec![false; sigma.len()];
    let mut parts = Vec::new();
    for start in 0..sigma.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = sigma[i];
            len += 1;
        }
        parts.push(len);
    }
    CycleType::from_parts(parts).expect("cycle lengths form a partition")
}

/// `P_μ = (d_μ/N!)·Σ_σ χ^μ(σ⁻¹)·V(σ)` for several diagrams of the same size
/// in one pass over `S(N)`.
pub fn young_projectors(diagrams: &[YoungDiagram], d: usize, config: &OracleConfig) -> Result<Vec<DenseOperator>> {
    let Some(first) = diagrams.first() else {
        return Ok(Vec::new());
    };
    let n = first.boxes();
    if let Some(bad) = diagrams.iter().find(|m| m.boxes() != n) {
        return Err(Error::BoxCountMismatch {
            left: n,
            right: bad.boxes(),
        });
    }
    let dim = config.check(d, n)?;
    let factorial: f64 = (1..=n).map(|k| k as f64).product();
    let prefactors: Vec<f64> = diagrams.iter().map(|m| irrep_dim_f64(m) / factorial).collect();
    let mut evaluator = CharacterEvaluator::new();
    let mut chars: HashMap<CycleType, Vec<f64>> = HashMap::new();
    let mut acc = vec![vec![0.0f64; dim * dim]; diagrams.len()];

    for sigma in all_permutations(n) {
        let class = cycle_type_of(&sigma);
        if !chars.contains_key(&class) {
            let values = diagrams
                .iter()
                .map(|m| evaluator.character(m, &class).map(|x| bigint_to_f64(&x)))
                .collect::<Result<Vec<_>>>()?;
            chars.insert(class.clone(), values);
        }
        let values = &chars[&class];
        let map = permutation_index_map(&sigma, d);
        for (k, buf) in acc.iter_mut().enumerate() {
            let w = prefactors[k] * values[k];
            if w == 0.0 {
                continue;
            }
            for (c, &r) in map.iter().enumerate() {
                buf[r * dim + c] += w;
            }
        }
    }
    acc.into_iter()
        .map(|buf| {
            let m = CMatrix::from_fn(dim, dim, |r, c| Complex64::new(buf[r * dim + c], 0.0));
            DenseOperator::new(d, n, m)
        })
        .collect()
}

pub fn young_projector(mu: &YoungDiagram, d: usize, config: &OracleConfig) -> Result<DenseOperator> {
    Ok(young_projectors(std::slice::from_ref(mu), d, config)?.remove(0))
}

/// `Ṽ⁺` on `(N, n)` tensored with identity elsewhere, i.e. `V^{t_n}(a, n)`
/// built directly by partial transposition of the swap.
fn swap_partial_transpose(a: usize, systems: usize, d: usize, config: &OracleConfig) -> Result<CMatrix> {
    let v = permutation_operator(&transposition(systems, a, systems), d, config)?;
    Ok(v.partial_transpose_last().into_matrix())
}

/// `η = Σ_{a=1}^{N} V^{t_n}(a, n)` on `N + 1` systems.
pub fn eta_operator(ports: usize, d: usize, config: &OracleConfig) -> Result<DenseOperator> {
    check_ports(ports, d)?;
    let n = ports + 1;
    let dim = config.check(d, n)?;
    let mut eta = CMatrix::zeros(dim, dim);
    for a in 1..=ports {
        eta += swap_partial_transpose(a, n, d, config)?;
    }
    DenseOperator::new(d, n, eta)
}

fn check_ports(ports: usize, d: usize) -> Result<()> {
    if ports == 0 || d == 0 {
        return Err(Error::InvalidParameter("need N ≥ 1 and d ≥ 1".into()));
    }
    Ok(())
}

/// `F_μ(α)` as a standalone operator.
pub fn f_projector(alpha: &YoungDiagram, mu: &YoungDiagram, d: usize, config: &OracleConfig) -> Result<DenseOperator> {
    let ports = mu.boxes();
    if alpha.boxes() + 1 != ports || !alpha.add_box(HeightCap::UNBOUNDED).contains(mu) {
        return Err(Error::InvalidParameter(format!("{mu} is not {alpha} plus one box")));
    }
    if alpha.height() > d || mu.height() > d {
        return Err(Error::InvalidParameter(format!(
            "{alpha} → {mu} has zero multiplicity for d={d}"
        )));
    }
    let oracle = Oracle::new(ports, d, config)?;
    let k = oracle
        .blocks
        .iter()
        .position(|b| &b.alpha == alpha && &b.mu == mu)
        .expect("admissible pair present");
    DenseOperator::new(d, ports + 1, oracle.blocks[k].f.clone())
}

/// One `F_μ(α)` block together with its eigenvalue data.
#[derive(Clone, Debug)]
struct Block {
    alpha: YoungDiagram,
    mu: YoungDiagram,
    gamma: f64,
    f: CMatrix,
}

/// All dense operators for one `(N, d)`, built once and shared by the checks.
#[derive(Clone, Debug)]
pub struct Oracle {
    ports: usize,
    d: usize,
    config: OracleConfig,
    eigen: Vec<ProtocolEigen>,
    /// `P_μ` on `N` systems, for `μ` with `m_μ > 0`.
    p_mu: BTreeMap<YoungDiagram, CMatrix>,
    /// `P_α` on `N − 1` systems, for `α` with `m_α > 0`.
    p_alpha: BTreeMap<YoungDiagram, CMatrix>,
    /// `η(α) = Σ_a V(a,N)(P_α ⊗ P̃⁺)V(a,N)` on `N + 1` systems.
    eta_alpha: BTreeMap<YoungDiagram, CMatrix>,
    blocks: Vec<Block>,
    sigma: Vec<CMatrix>,
    eta: CMatrix,
}

#[derive(Clone, Debug)]
pub enum PovmSpec {
    /// `Π̃_a = ρ^{-1/2} σ_a ρ^{-1/2}` with a pseudo-inverse square root.
    SqrtMeasurement,
    /// `Π_a = Π σ_a Π` with `Π` from the optimal coefficients.
    Optimal,
    /// `Π_a = Π σ_a Π` with `Π = Σ p_μ(α) F_μ(α)`; keys are `(α, μ)`.
    Coefficients(BTreeMap<(YoungDiagram, YoungDiagram), f64>),
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct PrimalCheck {
    pub min_eig: f64,
    pub trace_xa: f64,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct DualCheck {
    pub min_slack: f64,
    pub objective: f64,
}

impl Oracle {
    pub fn new(ports: usize, d: usize, config: &OracleConfig) -> Result<Self> {
        check_ports(ports, d)?;
        if d < 2 {
            return Err(Error::InvalidParameter("oracle needs d ≥ 2".into()));
        }
        let n = ports + 1;
        let dim = config.check(d, n)?;
        let eigen = protocol_eigenvalues(ports, d)?;

        let cap = HeightCap::at_most(d);
        let mus: Vec<YoungDiagram> = enumerate(ports, cap).entries().to_vec();
        let alphas: Vec<YoungDiagram> = enumerate(ports - 1, cap).entries().to_vec();
        let p_mu: BTreeMap<_, _> = mus
            .iter()
            .cloned()
            .zip(young_projectors(&mus, d, config)?.into_iter().map(DenseOperator::into_matrix))
            .collect();
        let p_alpha: BTreeMap<_, _> = alphas
            .iter()
            .cloned()
            .zip(young_projectors(&alphas, d, config)?.into_iter().map(DenseOperator::into_matrix))
            .collect();

        // P̃⁺ on the last two systems
        let mut p_plus = CMatrix::zeros(d * d, d * d);
        for i in 0..d {
            for j in 0..d {
                p_plus[(i * d + i, j * d + j)] = Complex64::new(1.0, 0.0);
            }
        }
        let maps: Vec<Vec<usize>> = (1..=ports)
            .map(|a| permutation_index_map(&transposition(n, a, ports), d))
            .collect();
        let eta_alpha: BTreeMap<_, _> = p_alpha
            .iter()
            .map(|(alpha, pa)| {
                let base = pa.kronecker(&p_plus);
                let mut sum = CMatrix::zeros(dim, dim);
                for map in &maps {
                    sum += conjugate_by_permutation(&base, map);
                }
                (alpha.clone(), sum)
            })
            .collect();

        let id_d = CMatrix::identity(d, d);
        let lifted: BTreeMap<&YoungDiagram, CMatrix> = p_mu.iter().map(|(m, p)| (m, p.kronecker(&id_d))).collect();
        let blocks = eigen
            .iter()
            .map(|e| {
                let pm = &lifted[&e.mu];
                let gamma = e.gamma_f64();
                let f = pm * &eta_alpha[&e.alpha] * pm / Complex64::new(gamma, 0.0);
                Block {
                    alpha: e.alpha.clone(),
                    mu: e.mu.clone(),
                    gamma,
                    f,
                }
            })
            .collect();

        let scale = Complex64::new((d as f64).powi(ports as i32).recip(), 0.0);
        let raw: Vec<CMatrix> = (1..=ports)
            .map(|a| swap_partial_transpose(a, n, d, config))
            .collect::<Result<_>>()?;
        let eta = raw.iter().fold(CMatrix::zeros(dim, dim), |acc, m| acc + m);
        let sigma = raw.into_iter().map(|m| m * scale).collect();

        Ok(Self {
            ports,
            d,
            config: *config,
            eigen,
            p_mu,
            p_alpha,
            eta_alpha,
            blocks,
            sigma,
            eta,
        })
    }

    pub fn ports(&self) -> usize {
        self.ports
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn eta(&self) -> DenseOperator {
        DenseOperator::new(self.d, self.ports + 1, self.eta.clone()).expect("shape")
    }

    /// `σ_a` for `a = 1..=N`.
    pub fn sigma(&self, a: usize) -> DenseOperator {
        DenseOperator::new(self.d, self.ports + 1, self.sigma[a - 1].clone()).expect("shape")
    }

    pub fn young_projector(&self, mu: &YoungDiagram) -> Option<DenseOperator> {
        let (m, systems) = match (self.p_mu.get(mu), self.p_alpha.get(mu)) {
            (Some(m), _) => (m, self.ports),
            (None, Some(m)) => (m, self.ports - 1),
            (None, None) => return None,
        };
        Some(DenseOperator::new(self.d, systems, m.clone()).expect("shape"))
    }

    pub fn f_projector(&self, alpha: &YoungDiagram, mu: &YoungDiagram) -> Option<DenseOperator> {
        self.blocks
            .iter()
            .find(|b| &b.alpha == alpha && &b.mu == mu)
            .map(|b| DenseOperator::new(self.d, self.ports + 1, b.f.clone()).expect("shape"))
    }

    fn d_pow(&self, k: usize) -> f64 {
        (self.d as f64).powi(k as i32)
    }

    fn full_dim(&self) -> usize {
        self.eta.nrows()
    }

    fn lift(&self, m: &CMatrix) -> CMatrix {
        m.kronecker(&CMatrix::identity(self.d, self.d))
    }

    /// `Π = Σ p_μ(α) F_μ(α)`.
    fn pi_from_coefficients(&self, p: &BTreeMap<(YoungDiagram, YoungDiagram), f64>) -> Result<CMatrix> {
        let dim = self.full_dim();
        let mut pi = CMatrix::zeros(dim, dim);
        for ((alpha, mu), &coeff) in p {
            let block = self
                .blocks
                .iter()
                .find(|b| &b.alpha == alpha && &b.mu == mu)
                .ok_or_else(|| Error::InvalidParameter(format!("no block F_{mu}({alpha})")))?;
            pi += &block.f * Complex64::new(coeff, 0.0);
        }
        Ok(pi)
    }

    fn optimal_coefficients(&self) -> Result<BTreeMap<(YoungDiagram, YoungDiagram), f64>> {
        let sol = optimal_solution(self.ports, self.d, self.config.power)?;
        Ok(sol.p_coeffs.into_iter().map(|c| ((c.alpha, c.mu), c.p)).collect())
    }

    /// POVM elements `Π_a`, `a = 1..=N`.
    pub fn povm(&self, spec: &PovmSpec) -> Result<Vec<CMatrix>> {
        let sandwich = |left: &CMatrix| -> Vec<CMatrix> { self.sigma.iter().map(|s| left * s * left).collect() };
        Ok(match spec {
            PovmSpec::SqrtMeasurement => {
                let rho = &self.eta * Complex64::new(self.d_pow(self.ports).recip(), 0.0);
                let root = hermitian_function(&rho, |x| {
                    if x > PSEUDO_INVERSE_CUTOFF {
                        x.sqrt().recip()
                    } else {
                        0.0
                    }
                });
                sandwich(&root)
            }
            PovmSpec::Optimal => sandwich(&self.pi_from_coefficients(&self.optimal_coefficients()?)?),
            PovmSpec::Coefficients(p) => sandwich(&self.pi_from_coefficients(p)?),
        })
    }

    /// `(1/d²)·Σ_a tr[Π_a σ_a]`.
    pub fn direct_fidelity(&self, spec: &PovmSpec) -> Result<f64> {
        let povm = self.povm(spec)?;
        let total: f64 = povm.iter().zip(&self.sigma).map(|(p, s)| (p * s).trace().re).sum();
        Ok(total / (self.d * self.d) as f64)
    }

    fn optimal_x_a(&self) -> Result<CMatrix> {
        let sol = optimal_solution(self.ports, self.d, self.config.power)?;
        let dim = self.d.pow(self.ports as u32);
        let mut x = CMatrix::zeros(dim, dim);
        for (mu, c) in sol.basis.iter().zip(&sol.c_coeffs) {
            x += &self.p_mu[mu] * Complex64::new(*c, 0.0);
        }
        Ok(x)
    }

    /// Smallest eigenvalue of `X_A ⊗ 1 − Σ_a Π_a` and `tr X_A`.
    pub fn primal_constraint_check(&self) -> Result<PrimalCheck> {
        let x = self.optimal_x_a()?;
        let povm = self.povm(&PovmSpec::Optimal)?;
        let mut slack = self.lift(&x);
        for p in &povm {
            slack -= p;
        }
        let min_eig = hermitian_eigenvalues(&slack).last().copied().unwrap_or(0.0);
        Ok(PrimalCheck {
            min_eig,
            trace_xa: x.trace().re,
        })
    }

    /// Dual witness `Ω` with `t_μ(α) = t_μ` the Perron vector.
    pub fn dual_witness(&self) -> Result<CMatrix> {
        let sol = optimal_solution(self.ports, self.d, self.config.power)?;
        let t: BTreeMap<&YoungDiagram, f64> = sol.basis.iter().zip(&sol.v).map(|(m, v)| (m, *v)).collect();
        let mut by_alpha: BTreeMap<&YoungDiagram, f64> = BTreeMap::new();
        for b in &self.blocks {
            *by_alpha.entry(&b.alpha).or_insert(0.0) += t[&b.mu];
        }
        let dn = self.d_pow(self.ports);
        let dim = self.full_dim();
        let mut omega = CMatrix::zeros(dim, dim);
        for b in &self.blocks {
            let t_mu = t[&b.mu];
            if t_mu <= 0.0 {
                return Err(Error::Domain(format!("Perron entry for {} is not positive", b.mu)));
            }
            let coeff = by_alpha[&b.alpha] * multiplicity_f64(&b.mu, self.d)
                / (dn * multiplicity_f64(&b.alpha, self.d) * t_mu);
            omega += &b.f * Complex64::new(coeff, 0.0);
        }
        Ok(omega)
    }

    /// `min_a λ_min(Ω − σ_a)` and `d^{N−2}·‖tr_n Ω‖_∞`.
    pub fn dual_witness_check(&self) -> Result<DualCheck> {
        let omega = self.dual_witness()?;
        let mut min_slack = f64::INFINITY;
        for s in &self.sigma {
            let e = hermitian_eigenvalues(&(&omega - s));
            min_slack = min_slack.min(e.last().copied().unwrap_or(0.0));
        }
        let reduced = partial_trace_last(&omega, self.d);
        let norm = hermitian_eigenvalues(&reduced)
            .iter()
            .map(|x| x.abs())
            .fold(0.0, f64::max);
        let objective = (self.d as f64).powi(self.ports as i32 - 2) * norm;
        Ok(DualCheck { min_slack, objective })
    }

    /// Expected spectrum of `η`: `γ_μ(α)` with multiplicity `d_μ·m_α`,
    /// padded with zeros, descending.
    fn expected_eta_spectrum(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self
            .eigen
            .iter()
            .flat_map(|e| {
                let mult = (irrep_dim_f64(&e.mu) * multiplicity_f64(&e.alpha, self.d)).round() as usize;
                std::iter::repeat_n(e.gamma_f64(), mult)
            })
            .collect();
        v.resize(self.full_dim().max(v.len()), 0.0);
        v.sort_by(|a, b| b.total_cmp(a));
        v
    }

    /// Run every check and collect residuals.
    pub fn verify(&self) -> Result<VerifyReport> {
        let mut checks = Vec::new();
        let dim = self.full_dim();
        let expected_fid = crate::spectral::spectral_radius(self.ports, self.d, self.config.power)?.radius
            / (self.d * self.d) as f64;

        // partial transpose: involution, trace preserving
        let mut pt = 0.0f64;
        for s in &self.sigma {
            let once = partial_transpose_last(s, self.d);
            let twice = partial_transpose_last(&once, self.d);
            pt = pt.max(max_abs(&(&twice - s))).max((once.trace() - s.trace()).norm());
        }
        checks.push(CheckResult::new("partial_transpose", pt, 1e-12));

        // Young projectors
        let mut young = 0.0f64;
        for (systems, family) in [(self.ports, &self.p_mu), (self.ports - 1, &self.p_alpha)] {
            let sdim = self.d.pow(systems as u32);
            let mut total = CMatrix::zeros(sdim, sdim);
            let generators: Vec<Vec<usize>> = (1..systems)
                .map(|a| permutation_index_map(&transposition(systems, a, a + 1), self.d))
                .collect();
            for (mu, p) in family {
                young = young
                    .max(max_abs(&(p * p - p)))
                    .max(max_abs(&(p - p.adjoint())))
                    .max((p.trace().re - irrep_dim_f64(mu) * multiplicity_f64(mu, self.d)).abs());
                for map in &generators {
                    young = young.max(max_abs(&(conjugate_by_permutation(p, map) - p)));
                }
                total += p;
            }
            young = young.max(max_abs(&(total - CMatrix::identity(sdim, sdim))));
        }
        checks.push(CheckResult::new("young_projectors", young, 1e-10));

        // η = Σ_α η(α), Hermitian, spectrum and rank
        let mut eta_sum = CMatrix::zeros(dim, dim);
        for m in self.eta_alpha.values() {
            eta_sum += m;
        }
        let decomposition = max_abs(&(&eta_sum - &self.eta)).max(max_abs(&(&self.eta - self.eta.adjoint())));
        checks.push(CheckResult::new("eta_alpha_decomposition", decomposition, 1e-10));

        let spectrum = hermitian_eigenvalues(&self.eta);
        let expected = self.expected_eta_spectrum();
        let spec_residual = if expected.len() == spectrum.len() {
            spectrum.iter().zip(&expected).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
        } else {
            f64::INFINITY
        };
        checks.push(CheckResult::new("eta_spectrum", spec_residual, 1e-8));
        let rank = spectrum.iter().filter(|&&x| x > RANK_CUTOFF).count();
        let expected_rank = expected.iter().filter(|&&x| x > 0.0).count();
        checks.push(CheckResult::new("eta_rank", rank.abs_diff(expected_rank) as f64, 0.0));
        let psd = spectrum.last().map_or(0.0, |&x| (-x).max(0.0));
        checks.push(CheckResult::new("eta_psd", psd, 1e-10));
        let tr = (self.eta.trace().re - self.ports as f64 * self.d_pow(self.ports)).abs();
        checks.push(CheckResult::new("eta_trace", tr, 1e-9));

        // F projectors: idempotent, Hermitian, orthogonal, trace, eigen-relation
        let mut fres = 0.0f64;
        let mut recon = self.eta.clone();
        for (i, b) in self.blocks.iter().enumerate() {
            let ff = &b.f * &b.f;
            fres = fres
                .max(max_abs(&(&ff - &b.f)))
                .max(max_abs(&(&b.f - b.f.adjoint())))
                .max((b.f.trace().re - irrep_dim_f64(&b.mu) * multiplicity_f64(&b.alpha, self.d)).abs());
            let ef = &self.eta * &b.f;
            fres = fres.max(max_abs(&(ef - &b.f * Complex64::new(b.gamma, 0.0))));
            for other in &self.blocks[i + 1..] {
                fres = fres.max(max_abs(&(&b.f * &other.f)));
            }
            recon -= &b.f * Complex64::new(b.gamma, 0.0);
        }
        checks.push(CheckResult::new("f_projectors", fres, 1e-10));
        checks.push(CheckResult::new("eta_reconstruction", recon.norm(), 1e-9));

        checks.push(CheckResult::new("fact_f1", self.fact_f1_residual(), 1e-10));

        let sqrt_direct = self.direct_fidelity(&PovmSpec::SqrtMeasurement)?;
        let sqrt_formula = sqrt_measurement_fidelity(self.ports, self.d)?.fidelity;
        checks.push(CheckResult::new("sqrt_measurement_fidelity", (sqrt_direct - sqrt_formula).abs(), 1e-8));

        let primal = self.direct_fidelity(&PovmSpec::Optimal)?;
        checks.push(CheckResult::new("primal_value", (primal - expected_fid).abs(), 1e-8));
        let pc = self.primal_constraint_check()?;
        checks.push(CheckResult::new("primal_min_eig", (-pc.min_eig).max(0.0), 1e-8));
        checks.push(CheckResult::new("primal_trace_xa", (pc.trace_xa - self.d_pow(self.ports)).abs(), 1e-8));

        let dc = self.dual_witness_check()?;
        checks.push(CheckResult::new("dual_min_slack", (-dc.min_slack).max(0.0), 1e-8));
        checks.push(CheckResult::new("dual_objective", (dc.objective - expected_fid).abs(), 1e-8));

        Ok(VerifyReport::new(self.ports, self.d, checks))
    }

    /// Basis-free form of the inner-product identity for `F_μ(α)`:
    /// `P_β (1 ⊗ ⟨Φ⁺|) F_μ(α) (1 ⊗ |Φ⁺⟩) P_β = δ_{αβ}·m_μ/(d·m_α)·P_α`.
    pub fn fact_f1_residual(&self) -> f64 {
        let d = self.d;
        let small = d.pow(self.ports as u32 - 1);
        // (1 ⊗ |Φ⁺⟩) as a (d^{N+1} × d^{N−1}) isometry
        let mut embed = CMatrix::zeros(self.full_dim(), small);
        let amp = Complex64::new((d as f64).sqrt().recip(), 0.0);
        for x in 0..small {
            for i in 0..d {
                embed[((x * d + i) * d + i, x)] = amp;
            }
        }
        let mut worst = 0.0f64;
        for b in &self.blocks {
            let reduced = embed.adjoint() * &b.f * &embed;
            for (beta, pb) in &self.p_alpha {
                let lhs = pb * &reduced * pb;
                let scale = if beta == &b.alpha {
                    multiplicity_f64(&b.mu, d) / (d as f64 * multiplicity_f64(&b.alpha, d))
                } else {
                    0.0
                };
                worst = worst.max(max_abs(&(lhs - pb * Complex64::new(scale, 0.0))));
            }
        }
        worst
    }
}

/// Fidelity from a dense construction of the chosen measurement.
pub fn direct_fidelity(ports: usize, d: usize, spec: &PovmSpec, config: &OracleConfig) -> Result<f64> {
    Oracle::new(ports, d, config)?.direct_fidelity(spec)
}

pub fn primal_constraint_check(ports: usize, d: usize, config: &OracleConfig) -> Result<PrimalCheck> {
    Oracle::new(ports, d, config)?.primal_constraint_check()
}

pub fn dual_witness_check(ports: usize, d: usize, config: &OracleConfig) -> Result<DualCheck> {
    Oracle::new(ports, d, config)?.dual_witness_check()
}

pub fn verify(ports: usize, d: usize, config: &OracleConfig) -> Result<VerifyReport> {
    Oracle::new(ports, d, config)?.verify()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cfg() -> OracleConfig {
        OracleConfig::default()
    }

    fn yd(rows: &[usize]) -> YoungDiagram {
        YoungDiagram::new(rows.to_vec()).unwrap()
    }

    fn re(m: &CMatrix) -> Vec<Vec<f64>> {
        (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)].re).collect()).collect()
    }

    #[test]
    fn permutation_operator_examples() {
        let id = permutation_operator(&[0, 1, 2], 2, &cfg()).unwrap();
        assert_eq!(id.matrix(), &CMatrix::identity(8, 8));

        let swap = permutation_operator(&[1, 0], 2, &cfg()).unwrap();
        let want = vec![
            vec![1.0, 0.0, 0.0, 0.0],
            vec![0.0, 0.0, 1.0, 0.0],
            vec![0.0, 1.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0, 1.0],
        ];
        assert_eq!(re(swap.matrix()), want);

        // (1 2 3) = (1 2)(2 3)
        let cyc = permutation_operator(&[1, 2, 0], 2, &cfg()).unwrap();
        let a = permutation_operator(&transposition(3, 1, 2), 2, &cfg()).unwrap();
        let b = permutation_operator(&transposition(3, 2, 3), 2, &cfg()).unwrap();
        assert_eq!(cyc.matrix(), &(a.matrix() * b.matrix()));
    }

    #[test]
    fn permutation_operator_is_a_homomorphism() {
        let perms = all_permutations(3);
        assert_eq!(perms.len(), 6);
        for s in &perms {
            for t in &perms {
                let st: Vec<usize> = (0..3).map(|i| s[t[i]]).collect();
                let lhs = permutation_operator(s, 3, &cfg()).unwrap().into_matrix()
                    * permutation_operator(t, 3, &cfg()).unwrap().into_matrix();
                assert_eq!(lhs, permutation_operator(&st, 3, &cfg()).unwrap().into_matrix());
            }
        }
    }

    #[test]
    fn cap_and_validation() {
        let small = OracleConfig { cap: 8, ..cfg() };
        assert!(matches!(
            permutation_operator(&[0, 1, 2, 3], 2, &small),
            Err(Error::CapExceeded { dim: 16, cap: 8 })
        ));
        assert!(permutation_operator(&[0, 0], 2, &cfg()).is_err());
        assert!(matches!(Oracle::new(4, 2, &small), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn young_projector_examples() {
        let sym = young_projector(&yd(&[2]), 2, &cfg()).unwrap();
        assert!((sym.trace().re - 3.0).abs() < 1e-12);
        let anti = young_projector(&yd(&[1, 1]), 2, &cfg()).unwrap();
        assert!((anti.trace().re - 1.0).abs() < 1e-12);
        let singlet = [0.0, 0.5f64.sqrt(), -(0.5f64.sqrt()), 0.0];
        for i in 0..4 {
            for j in 0..4 {
                assert!((anti.matrix()[(i, j)].re - singlet[i] * singlet[j]).abs() < 1e-12);
            }
        }
        let all = enumerate(3, HeightCap::UNBOUNDED);
        let ps = young_projectors(all.entries(), 2, &cfg()).unwrap();
        let total = ps.iter().fold(CMatrix::zeros(8, 8), |acc, p| acc + p.matrix());
        assert!(max_abs(&(total - CMatrix::identity(8, 8))) < 1e-12);
        // (1,1,1) does not fit in two dimensions
        assert!(max_abs(ps[2].matrix()) < 1e-12);
    }

    #[test]
    fn eta_examples() {
        let eta = eta_operator(2, 2, &cfg()).unwrap();
        assert_eq!(eta.dim(), 8);
        assert!((eta.trace().re - 8.0).abs() < 1e-12);
        let e = eta.eigenvalues();
        let want = [3.0, 3.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0];
        for (a, b) in e.iter().zip(want) {
            assert!((a - b).abs() < 1e-9, "{e:?}");
        }
        let e1 = eta_operator(1, 2, &cfg()).unwrap().eigenvalues();
        assert!((e1[0] - 2.0).abs() < 1e-10 && e1[1..].iter().all(|x| x.abs() < 1e-10));
    }

    #[test]
    fn f_projector_example() {
        let f = f_projector(&yd(&[1]), &yd(&[2]), 2, &cfg()).unwrap();
        assert!((f.trace().re - 2.0).abs() < 1e-10);
        let eta = eta_operator(2, 2, &cfg()).unwrap();
        let ef = eta.matrix() * f.matrix();
        assert!(max_abs(&(ef - f.matrix() * Complex64::new(3.0, 0.0))) < 1e-10);
        assert!(f_projector(&yd(&[1, 1]), &yd(&[1, 1, 1]), 2, &cfg()).is_err());
    }

    #[test]
    fn direct_fidelities() {
        let o = Oracle::new(2, 2, &cfg()).unwrap();
        let sq = o.direct_fidelity(&PovmSpec::SqrtMeasurement).unwrap();
        assert!((sq - (3f64.sqrt() + 1.0).powi(2) / 16.0).abs() < 1e-8);
        assert!((o.direct_fidelity(&PovmSpec::Optimal).unwrap() - 0.5).abs() < 1e-8);
        let c = (PI / 5.0).cos();
        let f = direct_fidelity(3, 2, &PovmSpec::Optimal, &cfg()).unwrap();
        assert!((f - c * c).abs() < 1e-8);
    }

    #[test]
    fn coefficient_family_matches_general_formula() {
        // p_μ(α) = √z(α)·λ_μ(α)^{-1/y(α)}
        let (n, d) = (3, 3);
        let o = Oracle::new(n, d, &cfg()).unwrap();
        let z = |a: &YoungDiagram| 1.0 + a.rows()[0] as f64;
        let y = |a: &YoungDiagram| if a.height() == 1 { 3.0 } else { -1.5 };
        let p = protocol_eigenvalues(n, d)
            .unwrap()
            .into_iter()
            .map(|e| {
                let v = z(&e.alpha).sqrt() * e.lambda.powf(-1.0 / y(&e.alpha));
                ((e.alpha, e.mu), v)
            })
            .collect();
        let direct = o.direct_fidelity(&PovmSpec::Coefficients(p)).unwrap();
        let formula = crate::protocol::general_povm_fidelity(n, d, z, y).unwrap();
        assert!((direct - formula).abs() < 1e-9, "{direct} vs {formula}");
    }

    #[test]
    fn primal_and_dual_examples() {
        let p = primal_constraint_check(2, 2, &cfg()).unwrap();
        assert!(p.min_eig >= -1e-8 && (p.trace_xa - 4.0).abs() < 1e-8);
        let p = primal_constraint_check(3, 2, &cfg()).unwrap();
        assert!(p.min_eig >= -1e-8 && (p.trace_xa - 8.0).abs() < 1e-8);
        assert!((primal_constraint_check(3, 3, &cfg()).unwrap().trace_xa - 27.0).abs() < 1e-8);

        let dch = dual_witness_check(2, 2, &cfg()).unwrap();
        assert!((dch.objective - 0.5).abs() < 1e-8 && dch.min_slack >= -1e-8);
        let c = (PI / 5.0).cos();
        assert!((dual_witness_check(3, 2, &cfg()).unwrap().objective - c * c).abs() < 1e-8);
        assert!((dual_witness_check(3, 3, &cfg()).unwrap().objective - 1.0 / 3.0).abs() < 1e-8);
    }

    #[test]
    fn full_verification_small_cases() {
        for (n, d) in [(1, 2), (2, 2), (3, 2), (2, 3)] {
            let r = verify(n, d, &cfg()).unwrap();
            for c in &r.checks {
                assert!(c.pass, "N={n} d={d}: {} residual {}", c.name, c.residual);
            }
            assert!(r.pass);
        }
    }

    #[test]
    fn hermitian_function_on_complex_input() {
        let i = Complex64::new(0.0, 1.0);
        let one = Complex64::new(1.0, 0.0);
        // σ_y has eigenvalues ±1; σ_y² = 1
        let sy = CMatrix::from_row_slice(2, 2, &[Complex64::new(0.0, 0.0), -i, i, Complex64::new(0.0, 0.0)]);
        let e = hermitian_eigenvalues(&sy);
        assert!((e[0] - 1.0).abs() < 1e-12 && (e[1] + 1.0).abs() < 1e-12);
        let sq = hermitian_function(&sy, |x| x * x);
        assert!(max_abs(&(sq - CMatrix::identity(2, 2) * one)) < 1e-12);
        let abs = hermitian_function(&sy, f64::abs);
        assert!(max_abs(&(abs - CMatrix::identity(2, 2))) < 1e-12);
    }

    #[test]
    fn partial_operations() {
        let s = permutation_operator(&[1, 0], 3, &cfg()).unwrap();
        let t = s.partial_transpose_last();
        assert!((t.trace() - s.trace()).norm() < 1e-12);
        assert_eq!(t.partial_transpose_last().matrix(), s.matrix());
        // tr_2 SWAP = 1
        assert!(max_abs(&(s.partial_trace_last().into_matrix() - CMatrix::identity(3, 3))) < 1e-12);
        let id = DenseOperator::identity(2, 1);
        assert_eq!(id.tensor(&id).dim(), 4);
    }
}
