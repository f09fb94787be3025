use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Phase-matching configuration of the down-converted waves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseMatching {
    /// Signal and idler share one envelope at 2λ₀.
    TypeIDegenerate,
    /// Orthogonally polarized signal (ordinary) and idler (extraordinary).
    #[serde(rename = "type-ii")]
    TypeII,
}

/// Wave index: 0 = pump, 1 = signal, 2 = idler.
pub type Wave = usize;

/// Linear dispersion and nonlinear coupling of the crystal, expanded around the carriers.
#[derive(Debug, Clone, PartialEq)]
pub struct CrystalParams {
    pub phase_matching: PhaseMatching,
    pub l_c: f64,
    /// Vacuum wavelengths λ₀, λ₁, λ₂.
    pub lambda: [f64; 3],
    /// Refractive indices n₀, n₁, n₂.
    pub n: [f64; 3],
    /// Inverse group velocities k′_j.
    pub kp: [f64; 3],
    /// Group-velocity dispersion k″_j.
    pub kpp: [f64; 3],
    pub rho_0: f64,
    pub rho_2: f64,
    /// Collinear mismatch Δ₀ = k₁ + k₂ − k₀.
    pub delta_0: f64,
    pub sigma: f64,
}

/// Result of a paraxial evaluation that may carry a validity warning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Checked<T> {
    pub value: T,
    pub paraxial_warning: bool,
}

pub const DEFAULT_PARAXIAL_RATIO: f64 = 0.2;

impl CrystalParams {
    pub fn k(&self, j: Wave) -> f64 {
        2.0 * PI * self.n[j] / self.lambda[j]
    }

    pub fn rho(&self, j: Wave) -> f64 {
        match j {
            0 => self.rho_0,
            2 => self.rho_2,
            _ => 0.0,
        }
    }

    /// Reduced wave number 2k₁k₂/(k₁+k₂).
    pub fn k_bar(&self) -> f64 {
        let (k1, k2) = (self.k(1), self.k(2));
        2.0 * k1 * k2 / (k1 + k2)
    }

    /// Number of down-converted envelopes carried by a field lattice.
    pub fn envelope_count(&self) -> usize {
        match self.phase_matching {
            PhaseMatching::TypeIDegenerate => 1,
            PhaseMatching::TypeII => 2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Param(m.to_string()));
        if !(self.l_c > 0.0) {
            return bad("crystal length l_c must be positive");
        }
        if self.lambda.iter().any(|l| !(*l > 0.0)) || self.n.iter().any(|n| !(*n > 0.0)) {
            return bad("wavelengths and refractive indices must be positive");
        }
        let e = 1.0 / self.lambda[1] + 1.0 / self.lambda[2] - 1.0 / self.lambda[0];
        if e.abs() > 1e-12 / self.lambda[0] {
            return bad("carrier energy conservation 1/λ₁ + 1/λ₂ = 1/λ₀ violated");
        }
        if self.phase_matching == PhaseMatching::TypeIDegenerate {
            let deg = |l: f64| (l - 2.0 * self.lambda[0]).abs() <= 1e-12 * l;
            if !deg(self.lambda[1]) || !deg(self.lambda[2]) {
                return bad("type I degenerate mode requires λ₁ = λ₂ = 2λ₀");
            }
            if self.rho_2 != 0.0 {
                return bad("type I degenerate mode requires ρ₂ = 0");
            }
            if self.kp[1] != self.kp[2] || self.kpp[1] != self.kpp[2] || self.n[1] != self.n[2] {
                return bad("type I degenerate mode requires identical signal/idler dispersion");
            }
        }
        let mismatch = self.k(1) + self.k(2) - self.k(0) - self.delta_0;
        if mismatch.abs() > 1e-9 * self.k(0) {
            return bad("Δ₀ inconsistent with k₁ + k₂ − k₀");
        }
        if !self.sigma.is_finite() || self.sigma < 0.0 {
            return bad("coupling σ must be finite and non-negative");
        }
        Ok(())
    }

    /// Phase detuning δ_j(q, Ω) of wave j.
    pub fn detuning(&self, j: Wave, qx: f64, qy: f64, omega: f64) -> f64 {
        self.kp[j] * omega + 0.5 * self.kpp[j] * omega * omega + self.rho(j) * qy
            - (qx * qx + qy * qy) / (2.0 * self.k(j))
    }

    /// Mismatch Δ(q,Ω) = Δ₀ + δ₁(q,Ω) + δ₂(−q,−Ω), in 1/m.
    pub fn mismatch(&self, qx: f64, qy: f64, omega: f64) -> f64 {
        self.delta_0 + self.detuning(1, qx, qy, omega) + self.detuning(2, -qx, -qy, -omega)
    }

    /// Dimensionless Δ(q,Ω)·l_c in the bandwidth form
    /// Δ₀l_c + sign[k′₁−k′₂]Ω/Ω₀′ + Ω²/Ω₀″² − ρ₂q_y l_c − q²/q₀².
    pub fn phase_mismatch(&self, qx: f64, qy: f64, omega: f64) -> Checked<f64> {
        self.phase_mismatch_with_ratio(qx, qy, omega, DEFAULT_PARAXIAL_RATIO)
    }

    pub fn phase_mismatch_with_ratio(&self, qx: f64, qy: f64, omega: f64, ratio: f64) -> Checked<f64> {
        let l = self.l_c;
        let q2 = qx * qx + qy * qy;
        let q0_sq = self.k_bar() / l;
        let inv_omega0p = (self.kp[1] - self.kp[2]) * l;
        let inv_omega0pp_sq = 0.5 * (self.kpp[1] + self.kpp[2]) * l;
        let value = self.delta_0 * l + inv_omega0p * omega + inv_omega0pp_sq * omega * omega
            - self.rho_2 * qy * l
            - q2 / q0_sq;
        let q = q2.sqrt();
        let paraxial_warning = q > ratio * self.k(1).min(self.k(2));
        Checked { value, paraxial_warning }
    }
}

/// Serializable crystal description. Δ₀ is given either directly as Δ₀l_c or
/// through the ring radius q_R/q₀; n₀ is then fixed by Δ₀ = k₁ + k₂ − k₀.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrystalConfig {
    pub name: Option<String>,
    pub phase_matching: PhaseMatching,
    pub l_c: f64,
    pub lambda_0: f64,
    pub lambda_1: f64,
    pub n_1: f64,
    pub n_2: f64,
    /// [k′₀, k′₁, k′₂] in s/m.
    pub kp: [f64; 3],
    /// [k″₀, k″₁, k″₂] in s²/m.
    pub kpp: [f64; 3],
    #[serde(default)]
    pub rho_0: f64,
    #[serde(default)]
    pub rho_2: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta0_lc: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ring_radius_over_q0: Option<f64>,
    #[serde(default = "unit")]
    pub sigma: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

fn unit() -> f64 {
    1.0
}

impl CrystalConfig {
    pub fn build(&self) -> Result<CrystalParams> {
        let lambda = match self.phase_matching {
            PhaseMatching::TypeIDegenerate => [self.lambda_0, 2.0 * self.lambda_0, 2.0 * self.lambda_0],
            PhaseMatching::TypeII => {
                [self.lambda_0, self.lambda_1, 1.0 / (1.0 / self.lambda_0 - 1.0 / self.lambda_1)]
            }
        };
        if !(self.l_c > 0.0) {
            return Err(Error::Param("crystal length l_c must be positive".into()));
        }
        let k1 = 2.0 * PI * self.n_1 / lambda[1];
        let k2 = 2.0 * PI * self.n_2 / lambda[2];
        let k_bar = 2.0 * k1 * k2 / (k1 + k2);
        let q_c = 0.5 * k_bar * self.rho_2;
        let delta_0 = match (self.delta0_lc, self.ring_radius_over_q0) {
            (Some(d), None) => d / self.l_c,
            (None, Some(r)) => {
                let q0_sq = k_bar / self.l_c;
                (r * r * q0_sq - q_c * q_c) / k_bar
            }
            _ => {
                return Err(Error::Param(
                    "exactly one of delta0_lc or ring_radius_over_q0 must be given".into(),
                ))
            }
        };
        let k0 = k1 + k2 - delta_0;
        let n_0 = k0 * self.lambda_0 / (2.0 * PI);
        let c = CrystalParams {
            phase_matching: self.phase_matching,
            l_c: self.l_c,
            lambda,
            n: [n_0, self.n_1, self.n_2],
            kp: self.kp,
            kpp: self.kpp,
            rho_0: self.rho_0,
            rho_2: self.rho_2,
            delta_0,
            sigma: self.sigma,
        };
        c.validate()?;
        Ok(c)
    }
}
