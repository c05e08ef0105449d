//! Named residual checks and the algebraic (non-dense) verification suite.

use serde::Serialize;

use crate::diagrams::{irrep_dim_f64, multiplicity_f64};
use crate::protocol::{
    general_povm_fidelity, lower_bound_fidelity, optimal_fidelity, optimal_solution, protocol_eigenvalues,
    sqrt_measurement_fidelity,
};
use crate::spectral::{closed_form_d2, power_iteration, spectrum_via_characters, PowerConfig};
use crate::telemat::{gram_g, recursion_defect, teleportation_matrix};
use crate::Result;

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckResult {
    pub fn new(name: &str, residual: f64, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            residual,
            tolerance,
            pass: residual.is_finite() && residual <= tolerance,
        }
    }

    fn exact(name: &str, ok: bool) -> Self {
        Self::new(name, if ok { 0.0 } else { 1.0 }, 0.0)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    #[serde(rename = "N")]
    pub ports: usize,
    pub d: usize,
    pub checks: Vec<CheckResult>,
    pub pass: bool,
}

impl VerifyReport {
    pub fn new(ports: usize, d: usize, checks: Vec<CheckResult>) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        Self { ports, d, checks, pass }
    }
}

/// Exact matrix identities, spectral agreement and the closed-form
/// relations between the protocol quantities at one `(N, d)`.
pub fn verify_identities(ports: usize, d: usize, config: PowerConfig) -> Result<VerifyReport> {
    let mut checks = Vec::new();
    let m = teleportation_matrix(ports, d)?;

    if d >= ports {
        checks.push(CheckResult::exact("character_spectrum", spectrum_via_characters(ports).is_ok()));
    }
    if ports >= 2 {
        checks.push(CheckResult::exact("gram_g_equals_mf", gram_g(ports, d)?.to_dense() == m.to_dense()));
        let defect = recursion_defect(ports, d)?;
        checks.push(CheckResult::exact("h_recursion", defect.iter().flatten().all(|&x| x == 0)));
    }

    let power = power_iteration(&m, config)?;
    if d >= ports {
        checks.push(CheckResult::new("power_vs_closed_form", (power.radius - ports as f64).abs(), 1e-9));
    } else if d == 2 {
        checks.push(CheckResult::new("power_vs_closed_form", (power.radius - closed_form_d2(ports)[0]).abs(), 1e-9));
    }

    let sol = optimal_solution(ports, d, config)?;
    let dn = (d as f64).powi(ports as i32);
    let mut sdp = (sol.v.iter().map(|x| x * x).sum::<f64>() - 1.0).abs();
    let tr_x: f64 = sol
        .basis
        .iter()
        .zip(&sol.c_coeffs)
        .map(|(mu, c)| c * irrep_dim_f64(mu) * multiplicity_f64(mu, d))
        .sum();
    sdp = sdp.max((tr_x / dn - 1.0).abs());
    for (e, p) in protocol_eigenvalues(ports, d)?.iter().zip(&sol.p_coeffs) {
        let k = sol.basis.iter().position(|mu| mu == &e.mu).expect("μ in basis");
        sdp = sdp.max((p.p * p.p * e.lambda / sol.c_coeffs[k] - 1.0).abs());
    }
    checks.push(CheckResult::new("sdp_identities", sdp, 1e-10));

    let f_opt = optimal_fidelity(ports, d, config)?.fidelity;
    let mut ff2 = 0.0;
    let mut current: Option<&crate::diagrams::YoungDiagram> = None;
    let mut block = 0.0;
    let eig = protocol_eigenvalues(ports, d)?;
    for e in &eig {
        if current != Some(&e.alpha) {
            ff2 += block * block;
            block = 0.0;
            current = Some(&e.alpha);
        }
        block += sol.v[sol.basis.iter().position(|mu| mu == &e.mu).expect("μ in basis")];
    }
    ff2 += block * block;
    checks.push(CheckResult::new("ff2_identity", (ff2 / (d * d) as f64 - f_opt).abs(), 1e-10));

    let f_sqrt = sqrt_measurement_fidelity(ports, d)?.fidelity;
    let f_general = general_povm_fidelity(ports, d, |_| 1.0, |_| 2.0)?;
    checks.push(CheckResult::new("sqrt_measurement_family", (f_sqrt - f_general).abs(), 1e-12));

    let f_low = lower_bound_fidelity(ports, d)?.fidelity;
    let order = [f_low - f_sqrt, f_sqrt - f_opt, f_opt - 1.0].into_iter().fold(0.0, f64::max);
    checks.push(CheckResult::new("fidelity_ordering", order, 1e-10));

    Ok(VerifyReport::new(ports, d, checks))
}
