//! Physical parameters, couplings and effective `n`-atom energies.
//!
//! Energies are joules internally; `*_hz` accessors give `E/h`.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Planck constant, J·s (`2πħ`).
pub const PLANCK: f64 = 2.0 * PI * HBAR;
/// Unified atomic mass unit, kg.
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;

/// `|ξ|` above which second-order perturbation theory is flagged.
pub const XI_VALIDITY_LIMIT: f64 = 0.2;
/// `n ξ` above which the single-mode picture is flagged.
pub const N_XI_VALIDITY_LIMIT: f64 = 0.5;
/// Relative size of `1/a_eff` below which the effective-range formula is at a pole.
pub const POLE_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Species {
    pub name: &'static str,
    /// Mass in atomic mass units.
    pub mass_u: f64,
    /// Zero-energy s-wave scattering length, m.
    pub a_scat: f64,
    /// Effective range (van der Waals length scale), m.
    pub r_e: f64,
}

impl Species {
    pub fn mass_kg(&self) -> f64 {
        self.mass_u * ATOMIC_MASS_UNIT
    }
}

pub const SPECIES: &[Species] = &[Species {
    name: "Rb87",
    mass_u: 86.909_180,
    a_scat: 5.3e-9,
    r_e: 8.0e-9,
}];

pub fn species(name: &str) -> Result<&'static Species> {
    SPECIES
        .iter()
        .find(|s| s.name.eq_ignore_ascii_case(name))
        .ok_or_else(|| Error::UnknownSpecies(name.to_string()))
}

pub fn hz_to_joules(f: f64) -> f64 {
    f * PLANCK
}

pub fn joules_to_hz(e: f64) -> f64 {
    e / PLANCK
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// kg
    pub atom_mass: f64,
    /// m, may be negative
    pub a_scat: f64,
    /// Trap angular frequency, rad/s.
    pub omega: f64,
    /// Effective range, m.
    pub r_e: f64,
    /// Intrinsic three-body energy, J.
    pub u3_intrinsic: f64,
}

impl PhysicalParams {
    pub fn new(atom_mass: f64, a_scat: f64, omega: f64) -> Result<Self> {
        if !(atom_mass > 0.0 && atom_mass.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "atom mass must be positive, got {atom_mass}"
            )));
        }
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "trap frequency must be positive, got {omega}"
            )));
        }
        if !a_scat.is_finite() {
            return Err(Error::InvalidParameter(
                "scattering length must be finite".into(),
            ));
        }
        Ok(Self {
            atom_mass,
            a_scat,
            omega,
            r_e: 0.0,
            u3_intrinsic: 0.0,
        })
    }

    /// Registry species with its default scattering length unless overridden.
    pub fn for_species(name: &str, omega: f64, a_scat: Option<f64>) -> Result<Self> {
        let sp = species(name)?;
        Ok(Self::new(sp.mass_kg(), a_scat.unwrap_or(sp.a_scat), omega)?
            .with_effective_range(sp.r_e))
    }

    pub fn with_effective_range(mut self, r_e: f64) -> Self {
        self.r_e = r_e;
        self
    }

    pub fn with_u3_intrinsic(mut self, u3: f64) -> Self {
        self.u3_intrinsic = u3;
        self
    }

    /// Oscillator length `√(ħ/(m ω))`.
    pub fn sigma(&self) -> f64 {
        (HBAR / (self.atom_mass * self.omega)).sqrt()
    }

    pub fn hbar_omega(&self) -> f64 {
        HBAR * self.omega
    }

    /// Copy with `a_scat` replaced by the effective scattering length at the
    /// ground-level wavevector `k = 1/σ`.
    pub fn with_effective_scattering_length(self) -> Result<Self> {
        if self.a_scat == 0.0 {
            return Ok(self);
        }
        let k = 1.0 / self.sigma();
        Ok(Self {
            a_scat: effective_scattering_length(self.a_scat, self.r_e, k)?,
            ..self
        })
    }
}

/// Out-of-range warnings; none of them stop a computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ValidityWarning {
    LargeCoupling { xi: f64 },
    ManyAtoms { n: f64, xi: f64 },
}

impl fmt::Display for ValidityWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidityWarning::LargeCoupling { xi } => write!(
                f,
                "|xi| = {:.4} exceeds {XI_VALIDITY_LIMIT}; second-order results are unreliable",
                xi.abs()
            ),
            ValidityWarning::ManyAtoms { n, xi } => write!(
                f,
                "n*xi = {:.4} exceeds {N_XI_VALIDITY_LIMIT} (n = {n}, xi = {xi:.4}); single-mode picture is unreliable",
                (n * xi).abs()
            ),
        }
    }
}

/// Dimensionless and energy couplings of the effective on-site Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingSet {
    pub xi: f64,
    /// `Ũ₂`, J
    pub u2: f64,
    /// `Ũ₃`, J
    pub u3: f64,
    /// J
    pub hbar_omega: f64,
}

impl CouplingSet {
    /// `Ũ₂ = ξ ħω`, `Ũ₃ = U₃ − β ξ² ħω`.
    pub fn from_xi(xi: f64, hbar_omega: f64, beta: f64, u3_intrinsic: f64) -> Self {
        Self {
            xi,
            u2: xi * hbar_omega,
            u3: u3_intrinsic - beta * xi * xi * hbar_omega,
            hbar_omega,
        }
    }

    /// Replaces `Ũ₃` outright.
    pub fn with_u3(mut self, u3: f64) -> Self {
        self.u3 = u3;
        self
    }

    pub fn u2_hz(&self) -> f64 {
        joules_to_hz(self.u2)
    }

    pub fn u3_hz(&self) -> f64 {
        joules_to_hz(self.u3)
    }

    pub fn hbar_omega_hz(&self) -> f64 {
        joules_to_hz(self.hbar_omega)
    }

    /// Two-body revival period `h/|Ũ₂|`; `None` without two-body interaction.
    pub fn t2(&self) -> Option<f64> {
        (self.u2 != 0.0).then(|| PLANCK / self.u2.abs())
    }

    /// Three-body revival period `h/|Ũ₃|`.
    pub fn t3(&self) -> Option<f64> {
        (self.u3 != 0.0).then(|| PLANCK / self.u3.abs())
    }

    /// Validity checks for occupations up to `n`.
    pub fn warnings(&self, n: f64) -> Vec<ValidityWarning> {
        let mut out = Vec::new();
        if self.xi.abs() > XI_VALIDITY_LIMIT {
            out.push(ValidityWarning::LargeCoupling { xi: self.xi });
        }
        if (n * self.xi).abs() > N_XI_VALIDITY_LIMIT {
            out.push(ValidityWarning::ManyAtoms { n, xi: self.xi });
        }
        out
    }
}

/// `ξ = √(2/π) a/σ` and the couplings that follow from it.
pub fn derive_couplings(p: &PhysicalParams, beta: f64) -> CouplingSet {
    let xi = (2.0 / PI).sqrt() * p.a_scat / p.sigma();
    CouplingSet::from_xi(xi, p.hbar_omega(), beta, p.u3_intrinsic)
}

/// `Ẽ(n) = Ũ₂ n(n−1)/2 + Ũ₃ n(n−1)(n−2)/6`.
pub fn interaction_energy(n: u32, c: &CouplingSet) -> f64 {
    let n = n as f64;
    c.u2 * n * (n - 1.0) / 2.0 + c.u3 * n * (n - 1.0) * (n - 2.0) / 6.0
}

/// `Ẽ(n+1) − Ẽ(n) = n Ũ₂ + n(n−1) Ũ₃/2`.
pub fn energy_gap(n: u32, c: &CouplingSet) -> f64 {
    let n = n as f64;
    n * c.u2 + n * (n - 1.0) * c.u3 / 2.0
}

/// `a_eff = 1/(1/a − r_e k²/2)`.
pub fn effective_scattering_length(a_scat: f64, r_e: f64, k: f64) -> Result<f64> {
    if a_scat == 0.0 || !a_scat.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "effective scattering length needs a finite nonzero a_scat, got {a_scat}"
        )));
    }
    let inverse = 1.0 / a_scat - 0.5 * r_e * k * k;
    if inverse.abs() < POLE_TOLERANCE * (1.0 / a_scat).abs() {
        return Err(Error::NearPole {
            inverse_length: inverse,
        });
    }
    Ok(1.0 / inverse)
}
