//! Brute-force diagonalization of `Ĥ₀ + Ĥ₂` in a truncated bosonic Fock space.
//!
//! This is an oracle for the perturbative sums, not a production solver. The
//! basis holds every `n`-atom configuration whose total vibrational energy is
//! at most `Λ`, restricted to the even-parity sector of the all-ground state
//! (the interaction conserves per-axis parity). Under this truncation the
//! second-order intermediate states are exactly those of the cutoff-regulated
//! perturbation sum, so the perturbative prediction and the eigenvalue differ
//! only at third order in `ξ`.
//!
//! The interaction uses the bare coupling `u2 = ξ ħω`, no counter-term, and
//! the full four-index `K_{μνγδ}`. Energies are in units of `ħω`.

use std::collections::HashMap;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::oscillator::{enumerate_modes, overlap_1d, Mode};
use crate::{Error, Result};

/// Default ceiling on the Fock-space dimension.
pub const DEFAULT_MAX_DIMENSION: usize = 2500;

/// Largest `|ξ|` the oracle accepts.
pub const MAX_XI: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdSolution {
    /// Eigenvalue in units of `ħω`.
    pub energy: f64,
    /// `|⟨n,0,…|ψ⟩|²` for the selected eigenvector.
    pub ground_overlap: f64,
    pub dimension: usize,
}

/// Occupation basis: each state is a non-decreasing list of mode indices.
struct FockBasis {
    cutoff: u32,
    modes: Vec<Mode>,
    states: Vec<Vec<u16>>,
    index: HashMap<Vec<u16>, usize>,
}

impl FockBasis {
    fn build(n_atoms: u32, cutoff: u32) -> Self {
        let modes = enumerate_modes(cutoff);
        let mut states = Vec::new();
        let mut current = Vec::with_capacity(n_atoms as usize);
        Self::extend(
            &modes,
            n_atoms as usize,
            cutoff,
            0,
            [0; 3],
            &mut current,
            &mut states,
        );
        let index = states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        Self {
            cutoff,
            modes,
            states,
            index,
        }
    }

    fn extend(
        modes: &[Mode],
        remaining: usize,
        budget: u32,
        start: usize,
        parity: [u32; 3],
        current: &mut Vec<u16>,
        out: &mut Vec<Vec<u16>>,
    ) {
        if remaining == 0 {
            if parity.iter().all(|p| p % 2 == 0) {
                out.push(current.clone());
            }
            return;
        }
        for (i, m) in modes.iter().enumerate().skip(start) {
            let e = m.energy_quanta();
            if e > budget {
                continue;
            }
            current.push(i as u16);
            let axes = m.axes();
            let next_parity = [
                parity[0] + axes[0],
                parity[1] + axes[1],
                parity[2] + axes[2],
            ];
            Self::extend(
                modes,
                remaining - 1,
                budget - e,
                i,
                next_parity,
                current,
                out,
            );
            current.pop();
        }
    }

    fn energy(&self, state: &[u16]) -> u32 {
        state
            .iter()
            .map(|&i| self.modes[i as usize].energy_quanta())
            .sum()
    }
}

/// Removes one atom from mode `m`; returns `√n_m` or `None` if empty.
fn annihilate(state: &mut Vec<u16>, m: u16) -> Option<f64> {
    let count = state.iter().filter(|&&s| s == m).count();
    let pos = state.iter().position(|&s| s == m)?;
    state.remove(pos);
    Some((count as f64).sqrt())
}

/// Adds one atom to mode `m`; returns `√(n_m + 1)`.
fn create(state: &mut Vec<u16>, m: u16) -> f64 {
    let count = state.iter().filter(|&&s| s == m).count();
    let pos = state.partition_point(|&s| s <= m);
    state.insert(pos, m);
    ((count + 1) as f64).sqrt()
}

struct OverlapCache {
    axis: HashMap<[u32; 4], f64>,
}

impl OverlapCache {
    fn k(&mut self, modes: [Mode; 4]) -> f64 {
        let mut value = 1.0;
        for d in 0..3 {
            let mut key = modes.map(|m| m.axes()[d]);
            key.sort_unstable();
            let v = *self.axis.entry(key).or_insert_with(|| overlap_1d(key));
            if v == 0.0 {
                return 0.0;
            }
            value *= v;
        }
        value
    }
}

fn build_hamiltonian(basis: &FockBasis, xi: f64) -> DMatrix<f64> {
    let dim = basis.states.len();
    let n_modes = basis.modes.len() as u16;
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    let mut cache = OverlapCache {
        axis: HashMap::new(),
    };

    for (col, state) in basis.states.iter().enumerate() {
        h[(col, col)] += basis.energy(state) as f64;

        let mut occupied = state.clone();
        occupied.dedup();
        for &lambda in &occupied {
            for &sigma in &occupied {
                // a_σ a_λ
                let mut rest = state.clone();
                let Some(amp_l) = annihilate(&mut rest, lambda) else {
                    continue;
                };
                let Some(amp_s) = annihilate(&mut rest, sigma) else {
                    continue;
                };
                let rest_energy = basis.energy(&rest);
                let budget = basis.cutoff - rest_energy;
                for mu in 0..n_modes {
                    let e_mu = basis.modes[mu as usize].energy_quanta();
                    if e_mu > budget {
                        continue;
                    }
                    for nu in 0..n_modes {
                        let e_nu = basis.modes[nu as usize].energy_quanta();
                        if e_mu + e_nu > budget {
                            continue;
                        }
                        let k = cache.k([
                            basis.modes[mu as usize],
                            basis.modes[nu as usize],
                            basis.modes[sigma as usize],
                            basis.modes[lambda as usize],
                        ]);
                        if k == 0.0 {
                            continue;
                        }
                        // a†_μ a†_ν
                        let mut target = rest.clone();
                        let amp_n = create(&mut target, nu);
                        let amp_m = create(&mut target, mu);
                        let row = basis.index[&target];
                        h[(row, col)] += 0.5 * xi * k * amp_l * amp_s * amp_n * amp_m;
                    }
                }
            }
        }
    }
    h
}

/// Eigenvalue of the `n_atoms`-atom multimode Hamiltonian that continues the
/// all-ground configuration, with the default dimension bound.
pub fn exact_diag_oracle(n_atoms: u32, cutoff: u32, xi: f64) -> Result<EdSolution> {
    exact_diag_with_bound(n_atoms, cutoff, xi, DEFAULT_MAX_DIMENSION)
}

/// As [`exact_diag_oracle`] with an explicit dimension ceiling.
///
/// Picks the eigenvector with the largest overlap on `|n, 0, …⟩` rather than
/// the global minimum, which may belong to another branch.
pub fn exact_diag_with_bound(
    n_atoms: u32,
    cutoff: u32,
    xi: f64,
    max_dimension: usize,
) -> Result<EdSolution> {
    if n_atoms == 0 {
        return Err(Error::InvalidParameter("need at least one atom".into()));
    }
    if !(xi > 0.0 && xi <= MAX_XI) {
        return Err(Error::InvalidParameter(format!(
            "xi = {xi} outside the oracle range (0, {MAX_XI}]"
        )));
    }
    if crate::oscillator::mode_count(cutoff) > u16::MAX as usize {
        return Err(Error::InvalidParameter(format!(
            "cutoff {cutoff} has too many modes"
        )));
    }
    let basis = FockBasis::build(n_atoms, cutoff);
    let dimension = basis.states.len();
    if dimension > max_dimension {
        return Err(Error::DimensionTooLarge {
            dimension,
            bound: max_dimension,
        });
    }
    let h = build_hamiltonian(&basis, xi);
    let ground = basis.index[&vec![0u16; n_atoms as usize]];
    let eig = SymmetricEigen::new(h);
    let (best, overlap) = (0..dimension)
        .map(|j| (j, eig.eigenvectors[(ground, j)].powi(2)))
        .fold((0, f64::NEG_INFINITY), |acc, cur| {
            if cur.1 > acc.1 {
                cur
            } else {
                acc
            }
        });
    Ok(EdSolution {
        energy: eig.eigenvalues[best],
        ground_overlap: overlap,
        dimension,
    })
}
