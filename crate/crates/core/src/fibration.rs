//! The height function `f_H(x) = <H, x>` on an adjoint orbit `O(H0)`:
//! evaluation, differential, critical points, tangent spaces and the
//! Hessian nondegeneracy certificate at each singularity.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::liealg::{
    br, herm, pairing, regularity_violation, AlgebraElement, CartanElement, FormConfig, RANK_TOL,
    STRUCTURAL_TOL,
};
use crate::linalg::{
    charpoly_drift, column_space, columns_of, conjugate_by_exp, element_from_vector,
    kernel_of_functional, random_element, realified_basis, singular_values,
};
use crate::weyl::{weyl_orbit, GeneralPositionReport, WeylOrbitRecord, DEDUP_TOL};

/// Orbit membership tolerance on characteristic polynomial drift.
pub const MEMBERSHIP_TOL: f64 = 1e-8;
/// Relative singular-value threshold for Hessian nondegeneracy.
pub const HESSIAN_REL_TOL: f64 = 1e-8;

/// A point of `O(H0)` with its eigenvalue-conservation certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitPoint {
    pub x: AlgebraElement,
    pub charpoly_drift: f64,
}

impl OrbitPoint {
    /// Records the drift of `x` against `h0` without judging it.
    pub fn measure(x: AlgebraElement, h0: &CartanElement) -> Self {
        let charpoly_drift = charpoly_drift(&x, h0);
        Self { x, charpoly_drift }
    }

    pub fn certify(x: AlgebraElement, h0: &CartanElement, tol: f64) -> Result<Self> {
        let p = Self::measure(x, h0);
        if !(p.charpoly_drift < tol) {
            return Err(Error::NotInOrbit {
                drift: p.charpoly_drift,
            });
        }
        Ok(p)
    }

    /// A diagonal point, exactly on its own orbit.
    pub fn from_cartan(h: &CartanElement) -> Self {
        Self {
            x: h.to_element(),
            charpoly_drift: 0.0,
        }
    }

    pub fn n(&self) -> usize {
        self.x.n()
    }
}

/// `x = exp(A) H0 exp(-A)`.
pub fn sample_orbit_point(h0: &CartanElement, a: &AlgebraElement) -> Result<OrbitPoint> {
    let x = conjugate_by_exp(a, &h0.to_element())?;
    OrbitPoint::certify(x, h0, MEMBERSHIP_TOL)
}

/// `f_H(x) = c sum_i H_i x_ii`.
pub fn height(x: &OrbitPoint, h: &CartanElement, cfg: FormConfig) -> Complex64 {
    height_of(&x.x, h, cfg)
}

pub(crate) fn height_of(x: &AlgebraElement, h: &CartanElement, cfg: FormConfig) -> Complex64 {
    h.diag()
        .iter()
        .enumerate()
        .map(|(i, hi)| hi * x.entry(i, i))
        .sum::<Complex64>()
        * cfg.c()
}

fn check_dims(x: &AlgebraElement, h: &CartanElement) -> Result<()> {
    if x.n() != h.n() {
        return Err(Error::DimensionMismatch {
            left: x.n(),
            right: h.n(),
        });
    }
    Ok(())
}

/// Threshold below which `|[x,H]|` counts as zero.
pub fn singular_tolerance(x: &AlgebraElement, h: &CartanElement) -> f64 {
    STRUCTURAL_TOL * (1.0 + x.frobenius_norm() * h.max_abs_entry())
}

/// `(df_H)_x(V) = <H, V>` for `V` tangent at `x`.
pub fn differential(
    x: &OrbitPoint,
    v: &AlgebraElement,
    h: &CartanElement,
    cfg: FormConfig,
) -> Result<Complex64> {
    check_dims(&x.x, h)?;
    x.x.check_same_dim(v)?;
    let residual = tangent_basis(x).relative_residual(v);
    if residual > 1e-8 {
        return Err(Error::NotTangent { residual });
    }
    Ok(height_of(v, h, cfg))
}

/// Critical points of `f_H` on `O(H0)`: the Weyl orbit `W.H0` (H regular).
pub fn critical_points(h: &CartanElement, h0: &CartanElement) -> Result<Vec<CartanElement>> {
    if h.n() != h0.n() {
        return Err(Error::DimensionMismatch {
            left: h.n(),
            right: h0.n(),
        });
    }
    let tol = STRUCTURAL_TOL * (1.0 + h.max_abs_entry());
    if let Some((i, j)) = regularity_violation(h, tol) {
        return Err(Error::NotRegular { i, j, tol });
    }
    Ok(weyl_orbit(h0, DEDUP_TOL)?.points)
}

/// A complex basis of a tangent space, orthonormal for the Frobenius
/// Hermitian product.
#[derive(Debug, Clone)]
pub struct TangentBasis {
    pub base_point: OrbitPoint,
    pub vectors: Vec<AlgebraElement>,
    pub complex_dim: usize,
}

impl TangentBasis {
    /// `{v_1, i v_1, ...}`, of length `2 complex_dim`.
    pub fn realified(&self) -> Vec<AlgebraElement> {
        realified_basis(&self.vectors)
    }

    /// Orthogonal projection onto the span.
    pub fn project(&self, v: &AlgebraElement) -> AlgebraElement {
        let unit = FormConfig::default();
        let mut acc = AlgebraElement::zeros(v.n());
        for b in &self.vectors {
            acc = &acc + &b.scale(herm(v, b, unit));
        }
        acc
    }

    /// `|v - P v| / max(1, |v|)`.
    pub fn relative_residual(&self, v: &AlgebraElement) -> f64 {
        (v - &self.project(v)).frobenius_norm() / v.frobenius_norm().max(1.0)
    }
}

/// `T_x O(H0) = Im ad(x)`, from the numerical column space of `ad(x)`
/// applied to the elementary matrices.
pub fn tangent_basis(x: &OrbitPoint) -> TangentBasis {
    let n = x.n();
    let images: Vec<AlgebraElement> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| {
            let mut e = DMatrix::zeros(n, n);
            e[(i, j)] = Complex64::new(1.0, 0.0);
            br(&x.x, &AlgebraElement::from_matrix_unchecked(e))
        })
        .collect();
    let vectors: Vec<AlgebraElement> = column_space(&columns_of(&images, n), RANK_TOL)
        .iter()
        .map(|v| element_from_vector(v, n))
        .collect();
    TangentBasis {
        base_point: x.clone(),
        complex_dim: vectors.len(),
        vectors,
    }
}

fn check_regular_point(x: &OrbitPoint, h: &CartanElement) -> Result<()> {
    check_dims(&x.x, h)?;
    let norm = br(&x.x, &h.to_element()).frobenius_norm();
    if norm <= singular_tolerance(&x.x, h) {
        return Err(Error::SingularPoint { norm });
    }
    Ok(())
}

/// Tangent space of the level set of `f_H` through a regular point:
/// `ker(df_H) ∩ Im ad(x)`.
pub fn fibre_tangent_basis(x: &OrbitPoint, h: &CartanElement, cfg: FormConfig) -> Result<TangentBasis> {
    check_regular_point(x, h)?;
    let full = tangent_basis(x);
    let coeffs: Vec<Complex64> = full.vectors.iter().map(|v| height_of(v, h, cfg)).collect();
    let vectors: Vec<AlgebraElement> = kernel_of_functional(&coeffs)
        .iter()
        .map(|u| {
            let mut acc = AlgebraElement::zeros(x.n());
            for (uk, vk) in u.iter().zip(&full.vectors) {
                acc = &acc + &vk.scale(*uk);
            }
            acc
        })
        .collect();
    Ok(TangentBasis {
        base_point: x.clone(),
        complex_dim: vectors.len(),
        vectors,
    })
}

/// Nondegeneracy certificate of the Hessian `(A,B) -> <[x0,[H,B]], A>`
/// on `Im ad(x0)`, realified as its real part over `{v_k, i v_k}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HessianCertificate {
    pub singularity: CartanElement,
    pub gram: Vec<Vec<f64>>,
    /// `None` when the tangent space is zero-dimensional.
    pub min_singular_value: Option<f64>,
    pub max_singular_value: Option<f64>,
    pub asymmetry: f64,
    pub nondegenerate: bool,
}

impl HessianCertificate {
    pub fn real_dim(&self) -> usize {
        self.gram.len()
    }
}

pub fn hessian_certificate(
    x0: &AlgebraElement,
    h: &CartanElement,
    cfg: FormConfig,
) -> Result<HessianCertificate> {
    check_dims(x0, h)?;
    let he = h.to_element();
    let norm = br(x0, &he).frobenius_norm();
    if norm > singular_tolerance(x0, h) {
        return Err(Error::NotCritical { norm });
    }
    let point = OrbitPoint {
        x: x0.clone(),
        charpoly_drift: 0.0,
    };
    let basis = tangent_basis(&point).realified();
    let k = basis.len();
    // columns [x0,[H,u_b]] once, then pair with every u_a
    let images: Vec<AlgebraElement> = basis.iter().map(|b| br(x0, &br(&he, b))).collect();
    let gram = DMatrix::from_fn(k, k, |a, b| pairing(&images[b], &basis[a], cfg).re);
    let asymmetry = (&gram - gram.transpose()).abs().max();
    let sv = singular_values(&gram);
    let (min_sv, max_sv) = (sv.last().copied(), sv.first().copied());
    let nondegenerate = match (min_sv, max_sv) {
        (Some(lo), Some(hi)) => hi > 0.0 && lo > HESSIAN_REL_TOL * hi,
        _ => true,
    };
    Ok(HessianCertificate {
        singularity: CartanElement::from_diag_unchecked(x0.diagonal()),
        gram: (0..k).map(|a| gram.row(a).iter().copied().collect()).collect(),
        min_singular_value: min_sv,
        max_singular_value: max_sv,
        asymmetry,
        nondegenerate,
    })
}

/// Middle Betti numbers predicted for regular and singular fibres from the
/// number `k` of singularities: `(k - 1, k - 2)`, clamped at zero.
pub fn predicted_betti(k: usize) -> (usize, usize) {
    (k.saturating_sub(1), k.saturating_sub(2))
}

/// Random point of `O(H0)` at which `f_H` is regular, with
/// `|[x,H]| >= min_bracket`. Gives up after 1000 draws.
pub fn random_regular_point<R: Rng>(
    h0: &CartanElement,
    h: &CartanElement,
    min_bracket: f64,
    rng: &mut R,
) -> Option<OrbitPoint> {
    let he = h.to_element();
    for _ in 0..1000 {
        let a = random_element(h0.n(), 0.6, rng);
        let Ok(p) = sample_orbit_point(h0, &a) else {
            continue;
        };
        if br(&p.x, &he).frobenius_norm() >= min_bracket {
            return Some(p);
        }
    }
    None
}

/// Outcome of the singularity analysis of `f_H` on `O(H0)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FibrationAnalysis {
    pub h: CartanElement,
    pub h0: CartanElement,
    pub cfg: FormConfig,
    pub orbit: WeylOrbitRecord,
    pub gp: GeneralPositionReport,
    pub hessians: Vec<HessianCertificate>,
    pub betti_regular: usize,
    pub betti_singular: usize,
}

impl FibrationAnalysis {
    pub fn all_nondegenerate(&self) -> bool {
        self.hessians.iter().all(|c| c.nondegenerate)
    }
}

/// Orbit, critical values, Hessian certificates and Betti predictions.
pub fn analyze_fibration(
    h: &CartanElement,
    h0: &CartanElement,
    cfg: FormConfig,
) -> Result<FibrationAnalysis> {
    let points = critical_points(h, h0)?;
    let orbit = weyl_orbit(h0, DEDUP_TOL)?;
    let gp = crate::weyl::critical_values(h, &orbit, cfg)?;
    let hessians = points
        .iter()
        .map(|p| hessian_certificate(&p.to_element(), h, cfg))
        .collect::<Result<Vec<_>>>()?;
    let (betti_regular, betti_singular) = predicted_betti(orbit.orbit_size);
    Ok(FibrationAnalysis {
        h: h.clone(),
        h0: h0.clone(),
        cfg,
        orbit,
        gp,
        hessians,
        betti_regular,
        betti_singular,
    })
}
