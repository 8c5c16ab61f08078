//! Cutoff-regularized second-order energy shifts and their renormalization.
//!
//! Energies of intermediate states are measured in units of `ħω`. The bare
//! coupling `u2` and `hbar_omega` may be given in any common energy unit
//! (joules, or `E/h` in hertz); shifts come back in that same unit.
//!
//! The second-order shift of `n` ground-level atoms splits into
//!
//! * a two-body channel `−Ũ₂² S₂(Λ)/ħω · n(n−1)/2`, where `S₂` sums
//!   `K²_{μν}/E_{μν}` over all ordered pairs with `0 < E_μ + E_ν ≤ Λ` and grows
//!   like `Λ^{1/2}`; the counter-term `A = Ũ₂² S₂/ħω` cancels it;
//! * a three-body channel `−6 Ũ₂² S₃(Λ)/ħω · n(n−1)(n−2)/6`, where `S₃` sums
//!   `K²_{μ0}/E_μ` over `0 < E_μ ≤ Λ` and converges.
//!
//! `β = 6 S₃` is the induced three-body coefficient, `δU₃ = −β ξ² ħω`.

use serde::{Deserialize, Serialize};

use crate::oscillator::{k1d_squared, modes_by_shell, MatrixElementTable, Mode};
use crate::summation::KahanSum;
use crate::{Error, Result};

/// Channel sums and derived coefficients at one cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationSummary {
    /// `Λ` in units of `ħω`.
    pub cutoff: u32,
    /// `S₃ = Σ_{0<E_μ≤Λ} K²_{μ0}/E_μ`.
    pub s3: f64,
    /// `6 S₃`.
    pub beta: f64,
    /// Counter-term in units of `Ũ₂²/ħω`.
    pub counterterm: f64,
    /// `S₂ = Σ_{μ,ν} K²_{μν}/E_{μν}` over ordered pairs, `0 < E_{μν} ≤ Λ`.
    pub raw_two_body_sum: f64,
}

impl PerturbationSummary {
    pub fn compute(cutoff: u32) -> Result<Self> {
        check_cutoff(cutoff)?;
        let s3 = three_body_channel_sum(cutoff)?;
        let s2 = two_body_channel_sum(cutoff)?;
        Ok(Self {
            cutoff,
            s3,
            beta: 6.0 * s3,
            // δU₂ = −Ũ₂² S₂ + A = 0
            counterterm: s2,
            raw_two_body_sum: s2,
        })
    }
}

fn check_cutoff(cutoff: u32) -> Result<()> {
    if cutoff < 1 {
        return Err(Error::InvalidCutoff { cutoff, min: 1 });
    }
    Ok(())
}

/// `|⟨μν| a†_μ a†_ν a₀ a₀ |n⟩|²` for a canonical pair `μ ≥ ν`, `(μ,ν) ≠ (0,0)`.
fn squared_transition(mu: Mode, nu: Mode, n: u32) -> f64 {
    let n = n as f64;
    let pair = n * (n - 1.0);
    if nu.is_ground() {
        // one atom excited, one stimulated back into the ground level
        pair * (n - 1.0)
    } else if mu == nu {
        2.0 * pair
    } else {
        pair
    }
}

/// Multiplicity of the pair in the interaction: both orderings of the
/// creation operators contribute when the modes differ.
fn pair_weight(mu: Mode, nu: Mode) -> f64 {
    if mu == nu {
        1.0
    } else {
        4.0
    }
}

fn raw_shift_with_table(table: &MatrixElementTable, n: u32, u2: f64, hbar_omega: f64) -> f64 {
    let mut acc = KahanSum::new();
    for e in table.entries() {
        let energy = e.energy_quanta();
        if energy == 0 {
            continue;
        }
        acc.add(
            pair_weight(e.mu, e.nu) * e.k * e.k * squared_transition(e.mu, e.nu, n) / energy as f64,
        );
    }
    -(u2 * u2 / (4.0 * hbar_omega)) * acc.value()
}

/// Bare second-order shift of `n` ground-level atoms, summed pair by pair over
/// intermediate states `a†_μ a†_ν a₀ a₀|n⟩` with `0 < E_μ + E_ν ≤ Λ`.
///
/// The cost grows like `Λ⁶`; for large cutoffs use the channel sums.
pub fn raw_second_order_shift(n: u32, cutoff: u32, u2: f64, hbar_omega: f64) -> Result<f64> {
    check_cutoff(cutoff)?;
    let table = MatrixElementTable::build(cutoff);
    Ok(raw_shift_with_table(&table, n, u2, hbar_omega))
}

/// Counter-term `A` that makes the renormalized two-atom shift vanish.
///
/// Adding `A·n(n−1)/2` to [`raw_second_order_shift`] removes the whole
/// two-body channel for every `n`.
pub fn counterterm(cutoff: u32, u2: f64, hbar_omega: f64) -> Result<f64> {
    Ok(-raw_second_order_shift(2, cutoff, u2, hbar_omega)?)
}

/// Renormalized second-order shift: bare shift plus `A·n(n−1)/2`.
pub fn renormalized_second_order_shift(
    n: u32,
    cutoff: u32,
    u2: f64,
    hbar_omega: f64,
) -> Result<f64> {
    check_cutoff(cutoff)?;
    let table = MatrixElementTable::build(cutoff);
    let a = -raw_shift_with_table(&table, 2, u2, hbar_omega);
    let pairs = n as f64 * (n as f64 - 1.0) / 2.0;
    Ok(raw_shift_with_table(&table, n, u2, hbar_omega) + a * pairs)
}

/// Cumulative `S₃` after each shell: entry `e` includes all modes up to
/// `E_μ = e`, so entry 0 is zero.
pub fn three_body_channel_partials(cutoff: u32) -> Result<Vec<f64>> {
    check_cutoff(cutoff)?;
    let mut acc = KahanSum::new();
    let mut partials = Vec::with_capacity(cutoff as usize + 1);
    for (energy, shell) in modes_by_shell(cutoff).iter().enumerate() {
        if energy > 0 {
            for mu in shell {
                let k2 = k1d_squared(mu.x, 0) * k1d_squared(mu.y, 0) * k1d_squared(mu.z, 0);
                acc.add(k2 / energy as f64);
            }
        }
        partials.push(acc.value());
    }
    Ok(partials)
}

/// `S₃(Λ) = Σ_{0<E_μ≤Λ} K²_{μ0}/E_μ`.
pub fn three_body_channel_sum(cutoff: u32) -> Result<f64> {
    Ok(*three_body_channel_partials(cutoff)?
        .last()
        .expect("at least one shell"))
}

/// Per-axis pair weight `w(s) = Σ_{a+b=s} K²_{ab}` for one axis.
fn axis_pair_weights(max_quanta: u32) -> Vec<f64> {
    (0..=max_quanta)
        .map(|s| {
            let mut acc = KahanSum::new();
            for a in 0..=s {
                acc.add(k1d_squared(a, s - a));
            }
            acc.value()
        })
        .collect()
}

/// `S₂(Λ)` over ordered mode pairs, factorized per axis.
///
/// `K²_{μν}` is a product of per-axis factors, so summing over all pairs with a
/// given per-axis quanta split `(s_x, s_y, s_z)` gives `w(s_x) w(s_y) w(s_z)`;
/// only the `O(Λ³)` splits remain to be enumerated, shell by shell.
pub fn two_body_channel_sum(cutoff: u32) -> Result<f64> {
    check_cutoff(cutoff)?;
    let w = axis_pair_weights(cutoff);
    let mut acc = KahanSum::new();
    for energy in 1..=cutoff {
        let mut shell = KahanSum::new();
        for sx in (0..=energy).step_by(2) {
            for sy in (0..=(energy - sx)).step_by(2) {
                let sz = energy - sx - sy;
                if sz % 2 == 1 {
                    continue;
                }
                shell.add(w[sx as usize] * w[sy as usize] * w[sz as usize]);
            }
        }
        acc.add(shell.value() / energy as f64);
    }
    Ok(acc.value())
}

/// `S₂(Λ)` by explicit enumeration of ordered mode pairs.
///
/// Independent of [`two_body_channel_sum`]; cost grows like `Λ⁶`.
pub fn two_body_channel_sum_by_pairs(cutoff: u32) -> Result<f64> {
    check_cutoff(cutoff)?;
    let table = MatrixElementTable::build(cutoff);
    let mut acc = KahanSum::new();
    for e in table.entries() {
        let energy = e.energy_quanta();
        if energy == 0 {
            continue;
        }
        let orderings = if e.mu == e.nu { 1.0 } else { 2.0 };
        acc.add(orderings * e.k * e.k / energy as f64);
    }
    Ok(acc.value())
}

/// Induced three-body energy `δU₃ = −6 u2² S₃(Λ)/ħω`.
pub fn delta_u3(cutoff: u32, u2: f64, hbar_omega: f64) -> Result<f64> {
    Ok(-6.0 * u2 * u2 / hbar_omega * three_body_channel_sum(cutoff)?)
}

/// `β(Λ) = 6 S₃(Λ)`, so that `δU₃/ħω = −β ξ²`.
pub fn beta(cutoff: u32) -> Result<f64> {
    Ok(6.0 * three_body_channel_sum(cutoff)?)
}

/// `β(Λ)` after each shell up to `cutoff` (entry `e` is `β(e)`).
pub fn beta_partials(cutoff: u32) -> Result<Vec<f64>> {
    Ok(three_body_channel_partials(cutoff)?
        .into_iter()
        .map(|s| 6.0 * s)
        .collect())
}

/// `Λ → ∞` limit of `β` for the isotropic harmonic well:
/// `4√3 − 6 + 6 ln(4/(2+√3))`.
pub fn beta_closed_form() -> f64 {
    let r3 = 3f64.sqrt();
    4.0 * r3 - 6.0 + 6.0 * (4.0 / (2.0 + r3)).ln()
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::TooFewPoints {
            got: points.len(),
            need: 2,
        });
    }
    if points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0)) {
        return Err(Error::InvalidParameter(
            "log-log fit needs positive abscissae and ordinates".into(),
        ));
    }
    let n = points.len() as f64;
    let (lx, ly): (Vec<f64>, Vec<f64>) = points.iter().map(|&(x, y)| (x.ln(), y.ln())).unzip();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}

/// Fitted exponent `p` in `S₂(Λ) ∝ Λ^p` over the given cutoffs.
///
/// Needs at least four distinct cutoffs, each at least 2 (below that the
/// two-body channel is empty).
pub fn divergence_exponent(cutoffs: &[u32]) -> Result<f64> {
    let mut distinct = cutoffs.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 4 {
        return Err(Error::TooFewPoints {
            got: distinct.len(),
            need: 4,
        });
    }
    if let Some(&c) = distinct.iter().find(|&&c| c < 2) {
        return Err(Error::InvalidCutoff { cutoff: c, min: 2 });
    }
    let points = distinct
        .iter()
        .map(|&c| Ok((c as f64, two_body_channel_sum(c)?)))
        .collect::<Result<Vec<_>>>()?;
    log_log_slope(&points)
}
