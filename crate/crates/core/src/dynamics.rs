//! Collapse and revival of on-site coherent states.
//!
//! A coherent state `|α⟩` with `|α|² = n̄` evolves under the effective
//! Hamiltonian, each number component picking up the phase `Ẽ(n) t/ħ`. The
//! fringe visibility is `V(t) = |⟨a⟩|²/n̄ = |A(t)|²` with
//!
//! ```text
//! A(t) = e^{−n̄} Σ_n n̄ⁿ/n! · exp(−i [Ẽ(n+1) − Ẽ(n)] t/ħ)
//! ```
//!
//! For an inhomogeneous lattice the per-site amplitudes are averaged before
//! taking the modulus.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::model::{energy_gap, interaction_energy, CouplingSet, HBAR};
use crate::summation::KahanSum;
use crate::{Error, Result};

/// Smallest `n_max ≥ 1` whose Poisson tail `P(N > n_max)` is at most `tail_tol`.
pub fn truncation_bound(nbar: f64, tail_tol: f64) -> usize {
    if nbar <= 0.0 {
        return 1;
    }
    // Terms out to well past the mode, summed from the far end for accuracy.
    let ln_nbar = nbar.ln();
    let mut ln_p = -nbar;
    let mut terms = vec![ln_p.exp()];
    let mut k = 0usize;
    loop {
        k += 1;
        ln_p += ln_nbar - (k as f64).ln();
        terms.push(ln_p.exp());
        if k as f64 > nbar && ln_p < -745.0 {
            break;
        }
    }
    let mut tail = KahanSum::new();
    let mut tails = vec![0.0; terms.len() + 1];
    for (i, &p) in terms.iter().enumerate().rev() {
        tail.add(p);
        tails[i] = tail.value();
    }
    // tails[i] = P(N ≥ i); want P(N > n) = tails[n + 1] ≤ tol
    (0..terms.len())
        .find(|&n| tails[n + 1] <= tail_tol)
        .unwrap_or(terms.len() - 1)
        .max(1)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherentStateSpec {
    /// Mean occupation `|α|²`.
    pub nbar: f64,
    /// Highest number state kept.
    pub n_max: usize,
    /// Poisson mass allowed beyond `n_max`.
    pub tail_tol: f64,
}

impl CoherentStateSpec {
    pub fn new(nbar: f64, tail_tol: f64) -> Result<Self> {
        if !(nbar >= 0.0 && nbar.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "nbar must be non-negative, got {nbar}"
            )));
        }
        if !(tail_tol > 0.0 && tail_tol < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "tail tolerance must lie in (0, 1), got {tail_tol}"
            )));
        }
        Ok(Self {
            nbar,
            n_max: truncation_bound(nbar, tail_tol),
            tail_tol,
        })
    }

    /// `e^{−n̄} n̄ⁿ/n!` for `n = 0..=n_max`.
    pub fn poisson_weights(&self) -> Vec<f64> {
        if self.nbar == 0.0 {
            let mut w = vec![0.0; self.n_max + 1];
            w[0] = 1.0;
            return w;
        }
        let ln_nbar = self.nbar.ln();
        let mut ln_p = -self.nbar;
        (0..=self.n_max)
            .map(|n| {
                if n > 0 {
                    ln_p += ln_nbar - (n as f64).ln();
                }
                ln_p.exp()
            })
            .collect()
    }
}

fn phase_sum(weights: &[f64], t: f64, mut rate: impl FnMut(u32) -> f64) -> Complex64 {
    let mut re = KahanSum::new();
    let mut im = KahanSum::new();
    for (n, &w) in weights.iter().enumerate() {
        let (s, c) = (rate(n as u32) * t / HBAR).sin_cos();
        re.add(w * c);
        im.add(-w * s);
    }
    Complex64::new(re.value(), im.value())
}

/// `A(t)`, normalized so that `⟨a⟩ = α A(t)`.
pub fn amplitude(t: f64, spec: &CoherentStateSpec, c: &CouplingSet) -> Complex64 {
    amplitude_with_weights(t, &spec.poisson_weights(), c)
}

fn amplitude_with_weights(t: f64, weights: &[f64], c: &CouplingSet) -> Complex64 {
    phase_sum(weights, t, |n| energy_gap(n, c))
}

/// `A(t)` with the phase rate taken as `Ẽ(n+1) − Ẽ(n)` from the effective energies.
pub fn amplitude_from_energies(t: f64, spec: &CoherentStateSpec, c: &CouplingSet) -> Complex64 {
    phase_sum(&spec.poisson_weights(), t, |n| {
        interaction_energy(n + 1, c) - interaction_energy(n, c)
    })
}

/// `V(t) = |A(t)|²`.
pub fn visibility(t: f64, spec: &CoherentStateSpec, c: &CouplingSet) -> f64 {
    amplitude(t, spec, c).norm_sqr()
}

/// Two-body-only visibility `exp(−2n̄[1 − cos(Ũ₂ t/ħ)])`.
pub fn visibility_closed_form(t: f64, nbar: f64, u2: f64) -> f64 {
    (-2.0 * nbar * (1.0 - (u2 * t / HBAR).cos())).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    /// `Ũ₂,i = Ũ₂ (1 − ε (2 r_i/D)²)`.
    #[default]
    Parabolic,
}

/// Spherical cloud of lattice sites with a smooth depression of `Ũ₂` toward
/// the edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeEnvelope {
    pub diameter_sites: u32,
    /// Fractional depression of `Ũ₂` at the sphere edge.
    pub eps: f64,
    pub profile: Profile,
    /// Scale `Ũ₃` with the square of the local `Ũ₂`.
    pub scale_u3: bool,
}

impl Default for LatticeEnvelope {
    fn default() -> Self {
        Self {
            diameter_sites: 60,
            eps: 0.05,
            profile: Profile::Parabolic,
            scale_u3: true,
        }
    }
}

impl LatticeEnvelope {
    pub fn with_eps(eps: f64) -> Self {
        Self {
            eps,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.diameter_sites < 1 {
            return Err(Error::InvalidParameter(
                "envelope diameter must be at least one site".into(),
            ));
        }
        if !(0.0..1.0).contains(&self.eps) {
            return Err(Error::InvalidParameter(format!(
                "envelope depression must lie in [0, 1), got {}",
                self.eps
            )));
        }
        Ok(())
    }

    /// Integer points `(i, j, k)` with `|r| ≤ D/2`.
    pub fn sites(&self) -> Vec<[i32; 3]> {
        let d = self.diameter_sites as i64;
        let r = d / 2 + 1;
        let mut out = Vec::new();
        for i in -r..=r {
            for j in -r..=r {
                for k in -r..=r {
                    if 4 * (i * i + j * j + k * k) <= d * d {
                        out.push([i as i32, j as i32, k as i32]);
                    }
                }
            }
        }
        out
    }

    /// Site count per squared radius.
    pub fn shells(&self) -> BTreeMap<u64, usize> {
        let mut shells = BTreeMap::new();
        for [i, j, k] in self.sites() {
            let r2 = (i as i64 * i as i64 + j as i64 * j as i64 + k as i64 * k as i64) as u64;
            *shells.entry(r2).or_insert(0) += 1;
        }
        shells
    }

    /// Couplings at squared distance `r2` (in lattice units) from the centre.
    pub fn local_couplings(&self, r2: u64, c: &CouplingSet) -> CouplingSet {
        let d = self.diameter_sites as f64;
        let factor = match self.profile {
            Profile::Parabolic => 1.0 - self.eps * 4.0 * r2 as f64 / (d * d),
        };
        let u2 = c.u2 * factor;
        let u3 = if self.scale_u3 && c.u2 != 0.0 {
            let ratio = u2 / c.u2;
            c.u3 * ratio * ratio
        } else {
            c.u3
        };
        CouplingSet { u2, u3, ..*c }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct SiteGroup {
    couplings: CouplingSet,
    weight: f64,
}

/// Weighted set of distinct local couplings over which amplitudes are averaged.
///
/// Sites with bit-identical couplings are merged, so a flat envelope collapses
/// to a single group of weight exactly one.
#[derive(Debug, Clone)]
pub struct SiteAverage {
    groups: Vec<SiteGroup>,
    sites: usize,
}

impl SiteAverage {
    /// One entry per radial shell, weighted by the shell's site count.
    pub fn compressed(env: &LatticeEnvelope, c: &CouplingSet) -> Result<Self> {
        env.validate()?;
        let shells = env.shells();
        let total: usize = shells.values().sum();
        Ok(Self::from_counts(
            shells
                .iter()
                .map(|(&r2, &count)| (env.local_couplings(r2, c), count)),
            total,
        ))
    }

    /// One entry per lattice site, before any merging.
    pub fn per_site(env: &LatticeEnvelope, c: &CouplingSet) -> Result<Self> {
        env.validate()?;
        let sites = env.sites();
        let total = sites.len();
        let groups = sites
            .iter()
            .map(|&[i, j, k]| {
                let r2 = (i as i64 * i as i64 + j as i64 * j as i64 + k as i64 * k as i64) as u64;
                SiteGroup {
                    couplings: env.local_couplings(r2, c),
                    weight: 1.0 / total as f64,
                }
            })
            .collect();
        Ok(Self {
            groups,
            sites: total,
        })
    }

    fn from_counts(items: impl Iterator<Item = (CouplingSet, usize)>, total: usize) -> Self {
        let mut merged: Vec<(CouplingSet, usize)> = Vec::new();
        let mut index: BTreeMap<(u64, u64), usize> = BTreeMap::new();
        for (c, count) in items {
            let key = (c.u2.to_bits(), c.u3.to_bits());
            match index.get(&key) {
                Some(&i) => merged[i].1 += count,
                None => {
                    index.insert(key, merged.len());
                    merged.push((c, count));
                }
            }
        }
        let groups = merged
            .into_iter()
            .map(|(couplings, count)| SiteGroup {
                couplings,
                weight: count as f64 / total as f64,
            })
            .collect();
        Self {
            groups,
            sites: total,
        }
    }

    pub fn site_count(&self) -> usize {
        self.sites
    }

    pub fn group_count(&self) -> usize {
        self.groups.len()
    }

    /// `M⁻¹ Σ_i A_i(t)`.
    pub fn amplitude(&self, t: f64, spec: &CoherentStateSpec) -> Complex64 {
        self.amplitude_with_weights(t, &spec.poisson_weights())
    }

    fn amplitude_with_weights(&self, t: f64, weights: &[f64]) -> Complex64 {
        let mut re = KahanSum::new();
        let mut im = KahanSum::new();
        for g in &self.groups {
            let a = amplitude_with_weights(t, weights, &g.couplings);
            re.add(g.weight * a.re);
            im.add(g.weight * a.im);
        }
        Complex64::new(re.value(), im.value())
    }

    pub fn visibility(&self, t: f64, spec: &CoherentStateSpec) -> f64 {
        self.amplitude(t, spec).norm_sqr()
    }
}

/// Lattice-averaged visibility `|M⁻¹ Σ_i A_i(t)|²`.
pub fn averaged_visibility(
    t: f64,
    env: &LatticeEnvelope,
    spec: &CoherentStateSpec,
    c: &CouplingSet,
) -> Result<f64> {
    Ok(SiteAverage::compressed(env, c)?.visibility(t, spec))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VisibilityTrace {
    /// s
    pub times: Vec<f64>,
    /// Homogeneous-lattice visibility.
    pub visibility: Vec<f64>,
    /// Two-body-only closed form, when requested.
    pub closed_form: Option<Vec<f64>>,
    /// Lattice-averaged visibility, when an envelope is given.
    pub averaged: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct TraceOptions {
    pub closed_form: bool,
    pub envelope: Option<LatticeEnvelope>,
}

/// `n` evenly spaced times from 0 to `t_max` inclusive.
pub fn uniform_grid(t_max: f64, steps: usize) -> Result<Vec<f64>> {
    if steps < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 grid points, got {steps}"
        )));
    }
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "t_max must be positive, got {t_max}"
        )));
    }
    let last = (steps - 1) as f64;
    Ok((0..steps).map(|i| t_max * i as f64 / last).collect())
}

fn check_grid(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if let Some(&t) = times.iter().find(|t| !(**t >= 0.0 && t.is_finite())) {
        return Err(Error::InvalidParameter(format!(
            "times must be finite and non-negative, got {t}"
        )));
    }
    if let Some(i) = times.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::NonMonotoneGrid { index: i + 1 });
    }
    Ok(())
}

/// Visibility on a strictly increasing time grid.
pub fn trace(
    times: &[f64],
    spec: &CoherentStateSpec,
    c: &CouplingSet,
    options: TraceOptions,
) -> Result<VisibilityTrace> {
    check_grid(times)?;
    let weights = spec.poisson_weights();
    let visibility = times
        .par_iter()
        .map(|&t| amplitude_with_weights(t, &weights, c).norm_sqr())
        .collect();
    let closed_form = options.closed_form.then(|| {
        times
            .iter()
            .map(|&t| visibility_closed_form(t, spec.nbar, c.u2))
            .collect()
    });
    let averaged = match options.envelope {
        Some(env) => {
            let avg = SiteAverage::compressed(&env, c)?;
            Some(
                times
                    .par_iter()
                    .map(|&t| avg.amplitude_with_weights(t, &weights).norm_sqr())
                    .collect(),
            )
        }
        None => None,
    };
    Ok(VisibilityTrace {
        times: times.to_vec(),
        visibility,
        closed_form,
        averaged,
    })
}

/// Local maxima after the first sample, as `(t, V)`.
///
/// The last sample counts when it is not below its predecessor; plateaus
/// report their first point.
pub fn revival_peaks(times: &[f64], values: &[f64]) -> Vec<(f64, f64)> {
    let n = values.len().min(times.len());
    let mut out = Vec::new();
    for i in 1..n {
        let rising = values[i] > values[i - 1];
        let not_falling_after = i + 1 == n || values[i] >= values[i + 1];
        if rising && not_falling_after {
            out.push((times[i], values[i]));
        }
    }
    out
}

/// Height of the `k`-th revival, `k = 1..=count`: the largest sample within
/// `[(k − ½)T, (k + ½)T)`. Windows not covered by the grid are omitted.
pub fn windowed_peak_heights(times: &[f64], values: &[f64], period: f64, count: usize) -> Vec<f64> {
    let t_end = times.last().copied().unwrap_or(0.0);
    (1..=count)
        .take_while(|&k| (k as f64 + 0.5) * period <= t_end * (1.0 + 1e-12))
        .map(|k| {
            let lo = (k as f64 - 0.5) * period;
            let hi = (k as f64 + 0.5) * period;
            times
                .iter()
                .zip(values)
                .filter(|(&t, _)| t >= lo && t < hi)
                .map(|(_, &v)| v)
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect()
}
