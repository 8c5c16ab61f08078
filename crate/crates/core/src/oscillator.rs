//! Vibrational modes of an isotropic 3D harmonic well and the dimensionless
//! four-wavefunction overlaps `K`.
//!
//! `K_{μνγδ} = (2π)^{3/2} σ³ ∫ φ_μ φ_ν φ_γ φ_δ d³r` factorizes into a product of
//! per-axis factors `√(2π) σ ∫ φ_a φ_b φ_c φ_d dx`. In oscillator units the
//! oscillator length `σ` drops out, and `K` for the all-ground configuration
//! is exactly one.
//!
//! Three independent routes compute the per-axis factor:
//!
//! * [`k1d`]: the two-excited-index slice `K_{mn00}`, which reduces to
//!   `(−1)^{(m−n)/2} (m+n−1)!! / (2^{(m+n)/2} √(m! n!))`. Exact integer
//!   arithmetic is used up to index 10 and log-Gamma above that.
//! * [`overlap_1d`]: any four indices, by expanding the Hermite product and
//!   integrating it term by term against `exp(−2u²)` (Gaussian moments).
//! * [`k1d_quadrature`]: Gauss–Hermite quadrature of the same integral.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::GaussHermite;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Largest per-axis index handled with exact integer factorials in [`k1d`].
const EXACT_INDEX_LIMIT: u32 = 10;

/// A 3D vibrational level `(μx, μy, μz)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Mode {
    pub x: u32,
    pub y: u32,
    pub z: u32,
}

impl Mode {
    pub const GROUND: Mode = Mode { x: 0, y: 0, z: 0 };

    pub const fn new(x: u32, y: u32, z: u32) -> Self {
        Self { x, y, z }
    }

    /// Single-particle energy in units of `ħω`, with the ground level at zero.
    pub const fn energy_quanta(&self) -> u32 {
        self.x + self.y + self.z
    }

    pub const fn axes(&self) -> [u32; 3] {
        [self.x, self.y, self.z]
    }

    pub const fn is_ground(&self) -> bool {
        self.energy_quanta() == 0
    }
}

impl From<[u32; 3]> for Mode {
    fn from(a: [u32; 3]) -> Self {
        Mode::new(a[0], a[1], a[2])
    }
}

/// All modes with `μx + μy + μz ≤ cutoff`, in lexicographic `(x, y, z)` order.
///
/// The count is `C(cutoff + 3, 3)`.
pub fn enumerate_modes(cutoff: u32) -> Vec<Mode> {
    let mut modes = Vec::with_capacity(mode_count(cutoff));
    for x in 0..=cutoff {
        for y in 0..=(cutoff - x) {
            for z in 0..=(cutoff - x - y) {
                modes.push(Mode::new(x, y, z));
            }
        }
    }
    modes
}

/// `C(cutoff + 3, 3)`.
pub fn mode_count(cutoff: u32) -> usize {
    let c = cutoff as usize;
    (c + 1) * (c + 2) * (c + 3) / 6
}

/// Modes grouped by energy shell: entry `e` lists the modes with
/// `energy_quanta() == e` in canonical order.
pub fn modes_by_shell(cutoff: u32) -> Vec<Vec<Mode>> {
    let mut shells = vec![Vec::new(); cutoff as usize + 1];
    for m in enumerate_modes(cutoff) {
        shells[m.energy_quanta() as usize].push(m);
    }
    shells
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn factorial_u128(n: u32) -> u128 {
    (1..=n as u128).product()
}

/// `(n)!!` with `(−1)!! = 0!! = 1`.
fn double_factorial_u128(n: i64) -> u128 {
    let mut acc = 1u128;
    let mut k = n;
    while k > 1 {
        acc *= k as u128;
        k -= 2;
    }
    acc
}

fn ln_factorial(n: u32) -> f64 {
    libm::lgamma(n as f64 + 1.0)
}

/// `K_{mn00}²` for one axis: `((s−1)!!)² / (2^s m! n!)` with `s = m + n`.
///
/// Evaluated as a reduced integer fraction up to index 10, so shell sums over
/// low modes are exact rationals up to one final rounding.
pub fn k1d_squared(m: u32, n: u32) -> f64 {
    let s = m + n;
    if s % 2 == 1 {
        return 0.0;
    }
    if m.max(n) <= EXACT_INDEX_LIMIT {
        let df = double_factorial_u128(s as i64 - 1);
        let num = df * df;
        let den = (1u128 << s) * factorial_u128(m) * factorial_u128(n);
        let g = gcd(num, den);
        (num / g) as f64 / (den / g) as f64
    } else {
        (2.0 * ln_k1d_magnitude(m, n)).exp()
    }
}

/// `ln |K_{mn00}|` via `(s−1)!!/2^{s/2} = Γ((s+1)/2)/√π`.
fn ln_k1d_magnitude(m: u32, n: u32) -> f64 {
    let s = m + n;
    libm::lgamma((s as f64 + 1.0) / 2.0) - 0.5 * PI.ln() - 0.5 * (ln_factorial(m) + ln_factorial(n))
}

/// Per-axis factor `K_{mn00}` in closed form.
///
/// Vanishes when `m + n` is odd and is symmetric in its arguments.
pub fn k1d(m: u32, n: u32) -> f64 {
    let s = m + n;
    if s % 2 == 1 {
        return 0.0;
    }
    let sign = if ((m as i64 - n as i64) / 2).rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    };
    let magnitude = if m.max(n) <= EXACT_INDEX_LIMIT {
        k1d_squared(m, n).sqrt()
    } else {
        ln_k1d_magnitude(m, n).exp()
    };
    sign * magnitude
}

/// Coefficients (ascending powers) of the physicists' Hermite polynomial `H_n`.
fn hermite_coefficients(n: u32) -> Vec<i128> {
    let mut prev = vec![1i128];
    if n == 0 {
        return prev;
    }
    let mut cur = vec![0i128, 2];
    for k in 1..n {
        // H_{k+1} = 2u H_k − 2k H_{k−1}
        let mut next = vec![0i128; cur.len() + 1];
        for (i, &c) in cur.iter().enumerate() {
            next[i + 1] += 2 * c;
        }
        for (i, &c) in prev.iter().enumerate() {
            next[i] -= 2 * k as i128 * c;
        }
        prev = cur;
        cur = next;
    }
    cur
}

fn poly_mul_checked(a: &[i128], b: &[i128]) -> Option<Vec<i128>> {
    let mut out = vec![0i128; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = out[i + j].checked_add(x.checked_mul(y)?)?;
        }
    }
    Some(out)
}

/// Exact `Σ_j c_{2j} (2j−1)!! 4^{J−j}` where `J` is half the degree.
fn gaussian_moment_sum_exact(coeffs: &[i128]) -> Option<i128> {
    let half_degree = (coeffs.len() - 1) / 2;
    let mut acc = 0i128;
    for j in 0..=half_degree {
        let c = coeffs[2 * j];
        if c == 0 {
            continue;
        }
        let df = i128::try_from(double_factorial_u128(2 * j as i64 - 1)).ok()?;
        let pow4 = 1i128.checked_shl(2 * (half_degree - j) as u32)?;
        acc = acc.checked_add(c.checked_mul(df)?.checked_mul(pow4)?)?;
    }
    Some(acc)
}

/// General per-axis factor `√(2π) σ ∫ φ_a φ_b φ_c φ_d dx`, by Gaussian moments
/// of the expanded Hermite product.
///
/// Independent of [`k1d`]; `overlap_1d([m, n, 0, 0]) == k1d(m, n)` up to
/// rounding.
pub fn overlap_1d(indices: [u32; 4]) -> f64 {
    let degree: u32 = indices.iter().sum();
    if degree % 2 == 1 {
        return 0.0;
    }
    let polys: Vec<Vec<i128>> = indices.iter().map(|&i| hermite_coefficients(i)).collect();
    // Normalization 1/√(Π 2^i i!) in log space.
    let ln_norm: f64 = indices
        .iter()
        .map(|&i| i as f64 * std::f64::consts::LN_2 + ln_factorial(i))
        .sum::<f64>()
        * 0.5;

    let exact = polys
        .iter()
        .skip(1)
        .try_fold(polys[0].clone(), |acc, p| poly_mul_checked(&acc, p))
        .and_then(|product| gaussian_moment_sum_exact(&product));
    match exact {
        Some(s) => {
            let half = (degree / 2) as i32;
            s as f64 * 4f64.powi(-half) * (-ln_norm).exp()
        }
        // Integer expansion overflows; the normalized recurrence stays stable.
        None => overlap_1d_quadrature(indices),
    }
}

/// Normalized Hermite polynomial part `(2^k k! √π)^{-1/2} H_k(u)` for `k = 0..=n`.
fn normalized_hermite(n: u32, u: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n as usize + 1);
    out.push(PI.powf(-0.25));
    if n >= 1 {
        out.push(2f64.sqrt() * u * out[0]);
    }
    for k in 1..n as usize {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * u * out[k] - (kf / (kf + 1.0)).sqrt() * out[k - 1];
        out.push(next);
    }
    out
}

fn overlap_1d_quadrature(indices: [u32; 4]) -> f64 {
    let degree: u32 = indices.iter().sum();
    let nodes = (degree as usize / 2 + 2).max(2);
    let rule = GaussHermite::new(NonZeroUsize::new(nodes).expect("nodes >= 2"));
    let top = *indices.iter().max().expect("four indices");
    // √(2π) ∫ Π ψ̃_i(u) e^{−2u²} du with v = √2 u
    PI.sqrt()
        * rule.integrate(|v| {
            let psi = normalized_hermite(top, v / 2f64.sqrt());
            indices.iter().map(|&i| psi[i as usize]).product::<f64>()
        })
}

/// Quadrature oracle for [`k1d`].
///
/// All Gaussians are absorbed into one weight `exp(−v²)` with `v = √2 u`, so
/// the integrand is a polynomial of degree `m + n`; the rule is exact once
/// `2·nodes − 1 ≥ m + n`.
pub fn k1d_quadrature(m: u32, n: u32, nodes: usize) -> Result<f64> {
    if nodes < 2 {
        return Err(Error::QuadratureNodes(nodes));
    }
    let rule = GaussHermite::new(NonZeroUsize::new(nodes).expect("nodes >= 2"));
    let top = m.max(n);
    Ok(rule.integrate(|v| {
        let psi = normalized_hermite(top, v / 2f64.sqrt());
        psi[m as usize] * psi[n as usize]
    }))
}

/// `K_{μν00} = Π_d k1d(μ_d, ν_d)`.
pub fn k3d(mu: Mode, nu: Mode) -> f64 {
    k1d(mu.x, nu.x) * k1d(mu.y, nu.y) * k1d(mu.z, nu.z)
}

/// `K_{μνγδ}` for four arbitrary modes.
pub fn k3d_general(modes: [Mode; 4]) -> f64 {
    (0..3)
        .map(|d| overlap_1d(modes.map(|m| m.axes()[d])))
        .product()
}

/// Per-axis parity selection: every axis carries an even number of quanta.
pub fn parity_allowed(mu: Mode, nu: Mode) -> bool {
    (mu.x + nu.x).is_multiple_of(2)
        && (mu.y + nu.y).is_multiple_of(2)
        && (mu.z + nu.z).is_multiple_of(2)
}

/// One nonzero `K_{μν00}` with `μ ≥ ν` in canonical order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairElement {
    pub mu: Mode,
    pub nu: Mode,
    pub k: f64,
}

impl PairElement {
    /// `E_μ + E_ν` in units of `ħω`.
    pub fn energy_quanta(&self) -> u32 {
        self.mu.energy_quanta() + self.nu.energy_quanta()
    }
}

/// The slice `K_{μν00}` for every parity-allowed pair with `E_μ + E_ν ≤ cutoff`.
///
/// Entries are stored once per unordered pair, sorted by pair energy and then
/// canonically, which is the order every downstream sum follows.
#[derive(Debug, Clone)]
pub struct MatrixElementTable {
    cutoff: u32,
    entries: Vec<PairElement>,
    index: HashMap<(Mode, Mode), usize>,
}

impl MatrixElementTable {
    pub fn build(cutoff: u32) -> Self {
        let shells = modes_by_shell(cutoff);
        let mut entries = Vec::new();
        for pair_energy in 0..=cutoff {
            for e_mu in (pair_energy.div_ceil(2))..=pair_energy {
                let e_nu = pair_energy - e_mu;
                for &mu in &shells[e_mu as usize] {
                    for &nu in &shells[e_nu as usize] {
                        if e_mu == e_nu && nu > mu {
                            continue;
                        }
                        if !parity_allowed(mu, nu) {
                            continue;
                        }
                        let k = k3d(mu, nu);
                        if k != 0.0 {
                            entries.push(PairElement { mu, nu, k });
                        }
                    }
                }
            }
        }
        let index = entries
            .iter()
            .enumerate()
            .map(|(i, e)| ((e.mu, e.nu), i))
            .collect();
        Self {
            cutoff,
            entries,
            index,
        }
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn entries(&self) -> &[PairElement] {
        &self.entries
    }

    /// `K_{μν00}`, zero for pairs outside the cutoff or forbidden by parity.
    pub fn get(&self, mu: Mode, nu: Mode) -> f64 {
        let (a, b) = if mu.energy_quanta() > nu.energy_quanta()
            || (mu.energy_quanta() == nu.energy_quanta() && mu >= nu)
        {
            (mu, nu)
        } else {
            (nu, mu)
        };
        self.index.get(&(a, b)).map_or(0.0, |&i| self.entries[i].k)
    }
}
