//! The Weyl group of sl(n,C) as the symmetric group permuting diagonal
//! entries: orbits `W.H0`, stabilizer sizes, critical values `<H, wH0>` and
//! the general-position test.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::liealg::{CartanElement, FormConfig};
use crate::linalg::random_regular_real;

/// Largest n for which orbits are enumerated exhaustively.
pub const MAX_ENUMERATION_N: usize = 8;
/// Orbit points closer than this (entrywise max) are identified.
pub const DEDUP_TOL: f64 = 1e-10;
/// Minimal separation of critical values for general position.
pub const GENERAL_POSITION_GAP: f64 = 1e-3;
const MAX_GP_ATTEMPTS: usize = 1000;

/// A permutation `w` of `{0, ..., n-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    mapping: Vec<usize>,
}

impl Permutation {
    pub fn new(mapping: Vec<usize>) -> Result<Self> {
        let n = mapping.len();
        let mut seen = vec![false; n];
        for &k in &mapping {
            if k >= n || std::mem::replace(&mut seen[k], true) {
                return Err(Error::InvalidInput(format!(
                    "{mapping:?} is not a permutation"
                )));
            }
        }
        Ok(Self { mapping })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            mapping: (0..n).collect(),
        }
    }

    pub fn mapping(&self) -> &[usize] {
        &self.mapping
    }

    /// `(w.H)_i = H_{w(i)}`.
    pub fn act(&self, h: &CartanElement) -> CartanElement {
        h.permuted(&self.mapping)
    }

    /// All `n!` permutations in lexicographic order.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut current: Vec<usize> = (0..n).collect();
        loop {
            out.push(Permutation {
                mapping: current.clone(),
            });
            // next lexicographic permutation
            let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| current[i] < current[i + 1])
            else {
                break;
            };
            let j = (i + 1..n).rev().find(|&j| current[j] > current[i]).unwrap();
            current.swap(i, j);
            current[i + 1..].reverse();
        }
        out
    }
}

pub fn factorial(n: usize) -> usize {
    (1..=n).product()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeylOrbitRecord {
    pub base: CartanElement,
    pub points: Vec<CartanElement>,
    pub orbit_size: usize,
    pub stabilizer_size: usize,
}

impl WeylOrbitRecord {
    pub fn n(&self) -> usize {
        self.base.n()
    }

    /// Index of the orbit point within `tol` (entrywise) of `h`.
    pub fn position(&self, h: &CartanElement, tol: f64) -> Option<usize> {
        if h.n() != self.n() {
            return None;
        }
        self.points.iter().position(|p| p.max_distance(h) < tol)
    }

    /// Smallest Frobenius distance between distinct orbit points.
    pub fn min_point_separation(&self) -> Option<f64> {
        let mut best: Option<f64> = None;
        for (a, p) in self.points.iter().enumerate() {
            for q in &self.points[a + 1..] {
                let d = p.to_element().distance(&q.to_element());
                best = Some(best.map_or(d, |b: f64| b.min(d)));
            }
        }
        best
    }
}

/// Enumerates `W.H0` and deduplicates points within `dedup_tol`.
pub fn weyl_orbit(h0: &CartanElement, dedup_tol: f64) -> Result<WeylOrbitRecord> {
    let n = h0.n();
    if n > MAX_ENUMERATION_N {
        return Err(Error::OrbitTooLarge(n));
    }
    let mut points: Vec<CartanElement> = Vec::new();
    for w in Permutation::all(n) {
        let p = w.act(h0);
        if !points.iter().any(|q| q.max_distance(&p) < dedup_tol) {
            points.push(p);
        }
    }
    let total = factorial(n);
    let stabilizer_size = Permutation::all(n)
        .iter()
        .filter(|w| w.act(h0).max_distance(h0) < dedup_tol)
        .count();
    debug_assert_eq!(points.len() * stabilizer_size, total);
    Ok(WeylOrbitRecord {
        base: h0.clone(),
        orbit_size: points.len(),
        stabilizer_size,
        points,
    })
}

/// `<H, wH0> = c sum_i H_i (wH0)_i`.
pub fn pairing_value(h: &CartanElement, p: &CartanElement, cfg: FormConfig) -> Complex64 {
    h.diag().iter().zip(p.diag()).map(|(a, b)| a * b).sum::<Complex64>() * cfg.c()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalValue {
    pub point: CartanElement,
    #[serde(with = "crate::serial::complex")]
    pub value: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralPositionReport {
    pub critical_values: Vec<CriticalValue>,
    pub is_general_position: bool,
    /// `f64::INFINITY` is never stored: a single value gives gap `None`.
    pub min_pairwise_gap: Option<f64>,
    /// Orbit indices of the closest pair when not in general position.
    pub offending_pair: Option<(usize, usize)>,
}

impl GeneralPositionReport {
    pub fn values(&self) -> Vec<Complex64> {
        self.critical_values.iter().map(|cv| cv.value).collect()
    }
}

/// Critical values over the orbit and the general-position verdict at the
/// default gap [`GENERAL_POSITION_GAP`].
pub fn critical_values(
    h: &CartanElement,
    orbit: &WeylOrbitRecord,
    cfg: FormConfig,
) -> Result<GeneralPositionReport> {
    critical_values_with_gap(h, orbit, cfg, GENERAL_POSITION_GAP)
}

pub fn critical_values_with_gap(
    h: &CartanElement,
    orbit: &WeylOrbitRecord,
    cfg: FormConfig,
    gap: f64,
) -> Result<GeneralPositionReport> {
    if h.n() != orbit.n() {
        return Err(Error::DimensionMismatch {
            left: h.n(),
            right: orbit.n(),
        });
    }
    let critical_values: Vec<CriticalValue> = orbit
        .points
        .iter()
        .map(|p| CriticalValue {
            point: p.clone(),
            value: pairing_value(h, p, cfg),
        })
        .collect();
    let mut closest: Option<(f64, usize, usize)> = None;
    for a in 0..critical_values.len() {
        for b in a + 1..critical_values.len() {
            let d = (critical_values[a].value - critical_values[b].value).norm();
            if closest.is_none_or(|(best, _, _)| d < best) {
                closest = Some((d, a, b));
            }
        }
    }
    let is_general_position = closest.is_none_or(|(d, _, _)| d > gap);
    Ok(GeneralPositionReport {
        critical_values,
        is_general_position,
        min_pairwise_gap: closest.map(|(d, _, _)| d),
        offending_pair: closest
            .filter(|_| !is_general_position)
            .map(|(_, a, b)| (a, b)),
    })
}

/// Rejection-samples a real regular H whose critical values over `W.H0`
/// are pairwise separated by at least [`GENERAL_POSITION_GAP`].
pub fn suggest_general_position(h0: &CartanElement, seed: u64) -> Result<CartanElement> {
    let orbit = weyl_orbit(h0, DEDUP_TOL)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_GP_ATTEMPTS {
        let h = random_regular_real(h0.n(), 1e-3, &mut rng);
        if critical_values(&h, &orbit, FormConfig::default())?.is_general_position {
            return Ok(h);
        }
    }
    Err(Error::GeneralPositionSearchFailed(MAX_GP_ATTEMPTS))
}
