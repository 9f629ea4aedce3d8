//! Symplectic certificates for `Omega = Im H_tau`.
//!
//! Regular fibres and the affine pieces `wH0 + n+(wH0)` of singular fibres
//! are complex subspaces, so `Omega` restricts nondegenerately to them. The
//! KKS form `<x,[A,B]>` does not: `[x,H]` is a null direction inside every
//! fibre. The flag `O(H0) ∩ i.su(n)` (H0 real) and, for sl(2), the sphere
//! `x^2 + y^2 + z^2 = 1` are Lagrangian for `Omega`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fibration::{fibre_tangent_basis, tangent_basis, OrbitPoint};
use crate::liealg::{
    br, herm, pairing, roots, AlgebraElement, CartanElement, FormConfig, Root, RANK_TOL,
};
use crate::linalg::{
    columns_of, conjugate_by_exp, gram, random_anti_hermitian, real_rank, realified_basis,
    singular_values,
};

/// Relative singular-value threshold for `Omega`-nondegeneracy.
pub const OMEGA_REL_TOL: f64 = 1e-10;
/// Default tolerance on `max |Omega|` for Lagrangian verdicts.
pub const LAGRANGIAN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymplecticVerdict {
    pub point: OrbitPoint,
    /// Real dimension of the subspace.
    pub subspace_dim: usize,
    /// `None` for the zero subspace.
    pub gram_min_sv: Option<f64>,
    pub antisymmetry: f64,
    pub nondegenerate: bool,
}

fn omega_verdict(point: OrbitPoint, complex_basis: &[AlgebraElement], cfg: FormConfig) -> SymplecticVerdict {
    let basis = realified_basis(complex_basis);
    let g = gram(&basis, |a, b| herm(a, b, cfg).im);
    let antisymmetry = (&g + g.transpose()).abs().max();
    let sv = singular_values(&g);
    let (lo, hi) = (sv.last().copied(), sv.first().copied());
    let nondegenerate = match (lo, hi) {
        (Some(lo), Some(hi)) => hi > 0.0 && lo > OMEGA_REL_TOL * hi,
        _ => true,
    };
    SymplecticVerdict {
        point,
        subspace_dim: basis.len(),
        gram_min_sv: lo,
        antisymmetry,
        nondegenerate,
    }
}

/// `Omega` restricted to the tangent space of the regular fibre through `x`.
pub fn omega_fibre_verdict(x: &OrbitPoint, h: &CartanElement, cfg: FormConfig) -> Result<SymplecticVerdict> {
    let fb = fibre_tangent_basis(x, h, cfg)?;
    Ok(omega_verdict(x.clone(), &fb.vectors, cfg))
}

/// `alpha(w) > 0`, ordering complex values lexicographically by
/// `(re, im)` so that exactly one of `alpha`, `-alpha` is positive whenever
/// `alpha(w) != 0`.
pub fn is_positive_on(root: &Root, w: &CartanElement) -> bool {
    let z = root.evaluate(w);
    let tol = 1e-12 * (1.0 + w.max_abs_entry());
    z.re > tol || (z.re.abs() <= tol && z.im > tol)
}

/// `Pi(w) = {alpha : alpha(w) > 0}`, spanning `n+(w)`.
pub fn positive_roots(w: &CartanElement) -> Vec<Root> {
    roots(w.n()).into_iter().filter(|r| is_positive_on(r, w)).collect()
}

/// `Omega` on `n+(wH0)`, the direction space of the affine piece
/// `wH0 + n+(wH0)` of the singular fibre through `wH0`.
pub fn omega_affine_piece_verdict(
    w_h0: &CartanElement,
    h: &CartanElement,
    cfg: FormConfig,
) -> Result<SymplecticVerdict> {
    if w_h0.n() != h.n() {
        return Err(Error::DimensionMismatch {
            left: w_h0.n(),
            right: h.n(),
        });
    }
    let n = w_h0.n();
    let basis: Vec<AlgebraElement> = positive_roots(w_h0).iter().map(|r| r.root_vector(n)).collect();
    Ok(omega_verdict(OrbitPoint::from_cartan(w_h0), &basis, cfg))
}

/// The Kirillov-Kostant-Souriau pairing `omega_x([x,A],[x,B]) = <x,[A,B]>`.
pub fn kks_form(x: &OrbitPoint, a: &AlgebraElement, b: &AlgebraElement, cfg: FormConfig) -> Result<Complex64> {
    x.x.check_same_dim(a)?;
    a.check_same_dim(b)?;
    Ok(pairing(&x.x, &br(a, b), cfg))
}

/// Least-squares preimage `A` with `[x, A] = v`.
fn ad_preimage(x: &AlgebraElement, v: &AlgebraElement) -> AlgebraElement {
    let n = x.n();
    let images: Vec<AlgebraElement> = (0..n * n)
        .map(|k| {
            let mut e = DMatrix::zeros(n, n);
            e[(k / n, k % n)] = Complex64::new(1.0, 0.0);
            br(x, &AlgebraElement::from_matrix_unchecked(e))
        })
        .collect();
    let ad = columns_of(&images, n);
    let rhs = columns_of(std::slice::from_ref(v), n);
    let svd = ad.svd(true, true);
    let smax = svd.singular_values.max();
    let sol = svd
        .solve(&rhs, RANK_TOL * smax)
        .expect("U and V were computed");
    // the preimage may carry a multiple of the identity; drop it
    let mut m = DMatrix::from_fn(n, n, |i, j| sol[(i * n + j, 0)]);
    let shift = m.trace() / n as f64;
    for i in 0..n {
        m[(i, i)] -= shift;
    }
    AlgebraElement::from_matrix_unchecked(m)
}

/// `max_k |<x,[H,A_k]>|` over a fibre-tangent basis `{[x, A_k]}`: the KKS
/// pairing of `[x,H]` with the fibre, which vanishes identically.
pub fn kks_degeneracy_witness(x: &OrbitPoint, h: &CartanElement, cfg: FormConfig) -> Result<f64> {
    let fb = fibre_tangent_basis(x, h, cfg)?;
    let he = h.to_element();
    Ok(fb
        .vectors
        .iter()
        .map(|v| {
            let a = ad_preimage(&x.x, v);
            pairing(&x.x, &br(&he, &a), cfg).norm()
        })
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LagrangianVerdict {
    pub description: String,
    pub sample_count: usize,
    pub max_abs_omega: f64,
    /// Real dimension of the submanifold and of the ambient orbit.
    pub submanifold_dim: usize,
    pub ambient_dim: usize,
    pub dimension_check: bool,
    pub tolerance: f64,
    pub is_lagrangian_numerically: bool,
}

impl LagrangianVerdict {
    pub(crate) fn new(
        description: String,
        sample_count: usize,
        max_abs_omega: f64,
        submanifold_dim: usize,
        ambient_dim: usize,
        tolerance: f64,
    ) -> Self {
        let dimension_check = 2 * submanifold_dim == ambient_dim;
        Self {
            description,
            sample_count,
            max_abs_omega,
            submanifold_dim,
            ambient_dim,
            dimension_check,
            tolerance,
            is_lagrangian_numerically: max_abs_omega < tolerance && dimension_check,
        }
    }
}

/// Basis of su(n): `E_ij - E_ji`, `i(E_ij + E_ji)` (i < j) and
/// `i(E_kk - E_{k+1,k+1})`.
pub fn su_basis(n: usize) -> Vec<AlgebraElement> {
    let mut basis = Vec::with_capacity(n * n - 1);
    for i in 0..n {
        for j in i + 1..n {
            let e = AlgebraElement::elementary(n, i, j);
            let f = AlgebraElement::elementary(n, j, i);
            basis.push(&e - &f);
            basis.push((&e + &f).times_i());
        }
    }
    for k in 0..n - 1 {
        let mut d = vec![Complex64::new(0.0, 0.0); n];
        d[k] = Complex64::new(0.0, 1.0);
        d[k + 1] = Complex64::new(0.0, -1.0);
        basis.push(CartanElement::from_diag_unchecked(d).to_element());
    }
    basis
}

/// Max `|Omega([S,B_a],[S,B_b])|` over an su(n) basis, with the real rank of
/// `{[S,B_a]}` and the real dimension of `T_S O`.
fn flag_tangent_data(s: &AlgebraElement, cfg: FormConfig) -> (f64, usize, usize) {
    let tangents: Vec<AlgebraElement> = su_basis(s.n()).iter().map(|b| br(s, b)).collect();
    let mut worst: f64 = 0.0;
    for a in &tangents {
        for b in &tangents {
            worst = worst.max(herm(a, b, cfg).im.abs());
        }
    }
    let flag_dim = real_rank(&tangents, RANK_TOL);
    let orbit_dim = 2 * tangent_basis(&OrbitPoint { x: s.clone(), charpoly_drift: 0.0 }).complex_dim;
    (worst, flag_dim, orbit_dim)
}

/// Samples `S = exp(A) H0 exp(-A)`, `A` in su(n), and evaluates `Omega` on
/// pairs of tangent vectors `[S,B]`, `B` in su(n).
pub fn lagrangian_verdict_flag(
    h0: &CartanElement,
    samples: usize,
    seed: u64,
    cfg: FormConfig,
) -> Result<LagrangianVerdict> {
    lagrangian_verdict_flag_with_tol(h0, samples, seed, cfg, LAGRANGIAN_TOL)
}

pub fn lagrangian_verdict_flag_with_tol(
    h0: &CartanElement,
    samples: usize,
    seed: u64,
    cfg: FormConfig,
    tol: f64,
) -> Result<LagrangianVerdict> {
    if let Some((index, z)) = h0.diag().iter().enumerate().find(|(_, z)| z.im != 0.0) {
        return Err(Error::NotReal { index, imag: z.im });
    }
    let n = h0.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    let mut dims = (0, 0);
    let mut dims_consistent = true;
    let expected_flag_dim = roots(n).iter().filter(|r| r.evaluate(h0).norm() > 1e-12).count();
    for k in 0..samples {
        let a = random_anti_hermitian(n, 1.0, &mut rng);
        let s = conjugate_by_exp(&a, &h0.to_element())?;
        let (w, flag_dim, orbit_dim) = flag_tangent_data(&s, cfg);
        worst = worst.max(w);
        if k == 0 {
            dims = (flag_dim, orbit_dim);
        }
        dims_consistent &= (flag_dim, orbit_dim) == dims && flag_dim == expected_flag_dim;
    }
    let mut verdict = LagrangianVerdict::new(
        format!("flag O(H0) ∩ i.su({n}) for H0 = {h0}"),
        samples,
        worst,
        dims.0,
        dims.1,
        tol,
    );
    verdict.dimension_check &= dims_consistent;
    verdict.is_lagrangian_numerically &= dims_consistent;
    Ok(verdict)
}

/// The Hermitian traceless matrix `(r, -p + iq; -p - iq, -r)`.
pub fn sphere_matrix(r: f64, p: f64, q: f64) -> AlgebraElement {
    AlgebraElement::sl2(
        Complex64::new(r, 0.0),
        Complex64::new(-p, q),
        Complex64::new(-p, -q),
    )
}

/// Samples the sphere `r^2 + p^2 + q^2 = 1` inside `O(diag(1,-1))` and
/// evaluates `Omega` on tangent pairs `[S,A]`, `A` in su(2).
pub fn lagrangian_verdict_thimble_sphere(samples: usize, seed: u64, cfg: FormConfig) -> LagrangianVerdict {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    let mut dims = (2, 4);
    let mut points = vec![sphere_matrix(1.0, 0.0, 0.0)];
    while points.len() < samples {
        let v: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..=1.0));
        let len = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if len > 1e-3 && len <= 1.0 {
            points.push(sphere_matrix(v[0] / len, v[1] / len, v[2] / len));
        }
    }
    points.truncate(samples);
    for s in &points {
        let (w, flag_dim, orbit_dim) = flag_tangent_data(s, cfg);
        worst = worst.max(w);
        if (flag_dim, orbit_dim) != (2, 4) {
            dims = (flag_dim, orbit_dim);
        }
    }
    LagrangianVerdict::new(
        "sphere x^2 + y^2 + z^2 = 1 in O(diag(1,-1))".into(),
        points.len(),
        worst,
        dims.0,
        dims.1,
        LAGRANGIAN_TOL,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fibration::random_regular_point;
    use crate::liealg::bracket;

    fn reals(v: &[f64]) -> CartanElement {
        CartanElement::from_reals(v).unwrap()
    }

    fn sl2_fibre_point(b: f64) -> OrbitPoint {
        let x = AlgebraElement::sl2(
            Complex64::new(0.0, 0.0),
            Complex64::new(b, 0.0),
            Complex64::new(1.0 / b, 0.0),
        );
        OrbitPoint::certify(x, &reals(&[1.0, -1.0]), 1e-12).unwrap()
    }

    #[test]
    fn sl2_fibre_is_symplectic() {
        let h = reals(&[1.0, -1.0]);
        let v = omega_fibre_verdict(&sl2_fibre_point(2.0), &h, FormConfig::default()).unwrap();
        assert_eq!(v.subspace_dim, 2);
        assert!(v.nondegenerate);
        assert!(v.antisymmetry < 1e-12);
        // orthonormal complex basis: Omega restricts to the standard form
        assert!((v.gram_min_sv.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sl3_fibres_are_symplectic() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let h0 = reals(&[1.0, 0.0, -1.0]);
        let h = reals(&[1.5, 0.25, -1.75]);
        for _ in 0..50 {
            let x = random_regular_point(&h0, &h, 1e-2, &mut rng).unwrap();
            let v = omega_fibre_verdict(&x, &h, FormConfig::default()).unwrap();
            assert!(v.nondegenerate);
            assert_eq!(v.subspace_dim, 10);
        }
    }

    #[test]
    fn positive_roots_of_sl2_points() {
        assert_eq!(positive_roots(&reals(&[1.0, -1.0])), vec![Root::new(0, 1)]);
        assert_eq!(positive_roots(&reals(&[-1.0, 1.0])), vec![Root::new(1, 0)]);
        assert_eq!(positive_roots(&reals(&[1.0, 0.0, -1.0])).len(), 3);
        assert_eq!(positive_roots(&reals(&[1.0, 1.0, -2.0])).len(), 2);
        let w = CartanElement::new(vec![
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, -1.0),
        ])
        .unwrap();
        assert_eq!(positive_roots(&w), vec![Root::new(0, 1)]);
    }

    #[test]
    fn affine_pieces_are_symplectic() {
        let h = reals(&[1.0, -1.0]);
        for w in [reals(&[1.0, -1.0]), reals(&[-1.0, 1.0])] {
            let v = omega_affine_piece_verdict(&w, &h, FormConfig::default()).unwrap();
            assert_eq!(v.subspace_dim, 2);
            assert!(v.nondegenerate);
        }
        let h = reals(&[2.0, 0.5, -0.5, -2.0]);
        let v = omega_affine_piece_verdict(&h, &h, FormConfig::default()).unwrap();
        assert_eq!(v.subspace_dim, 2 * 6);
        assert!(v.nondegenerate);
    }

    #[test]
    fn kks_examples() {
        let cfg = FormConfig::default();
        let h0 = reals(&[1.0, -1.0]);
        let x = OrbitPoint::from_cartan(&h0);
        let e12 = AlgebraElement::elementary(2, 0, 1);
        let e21 = AlgebraElement::elementary(2, 1, 0);
        assert_eq!(kks_form(&x, &e12, &e12, cfg).unwrap(), Complex64::new(0.0, 0.0));
        assert_eq!(kks_form(&x, &e12, &e21, cfg).unwrap(), Complex64::new(2.0, 0.0));
        let a = e12.scale(Complex64::new(0.3, 0.7));
        let b = e21.scale(Complex64::new(-1.1, 0.2));
        let ab = kks_form(&x, &a, &b, cfg).unwrap();
        let ba = kks_form(&x, &b, &a, cfg).unwrap();
        assert!((ab + ba).norm() < 1e-15);
    }

    #[test]
    fn kks_pairing_with_fibre_direction_vanishes() {
        // for [x, A] tangent to the fibre, <x, [H, A]> = 0
        let cfg = FormConfig::default();
        let h = reals(&[1.0, -1.0]);
        let x = sl2_fibre_point(0.5);
        let fb = fibre_tangent_basis(&x, &h, cfg).unwrap();
        let a = ad_preimage(&x.x, &fb.vectors[0]);
        assert!(bracket(&x.x, &a).unwrap().distance(&fb.vectors[0]) < 1e-12);
        assert!(kks_form(&x, &h.to_element(), &a, cfg).unwrap().norm() < 1e-12);
    }

    #[test]
    fn kks_witness_sl2() {
        let h = reals(&[1.0, -1.0]);
        for b in [0.3, 1.0, 2.0, -1.7] {
            let x = sl2_fibre_point(b);
            assert!(kks_degeneracy_witness(&x, &h, FormConfig::default()).unwrap() < 1e-10);
            assert!(bracket(&x.x, &h.to_element()).unwrap().frobenius_norm() > 0.0);
        }
    }

    #[test]
    fn flag_is_lagrangian() {
        let v = lagrangian_verdict_flag(&reals(&[1.0, -1.0]), 50, 1, FormConfig::default()).unwrap();
        assert!(v.is_lagrangian_numerically, "{v:?}");
        assert_eq!((v.submanifold_dim, v.ambient_dim), (2, 4));
        let v = lagrangian_verdict_flag(&reals(&[1.0, 0.0, -1.0]), 20, 2, FormConfig::default()).unwrap();
        assert!(v.is_lagrangian_numerically, "{v:?}");
        assert_eq!((v.submanifold_dim, v.ambient_dim), (6, 12));
        let v = lagrangian_verdict_flag(&reals(&[1.0, 1.0, -2.0]), 10, 3, FormConfig::default()).unwrap();
        assert!(v.is_lagrangian_numerically, "{v:?}");
        assert_eq!((v.submanifold_dim, v.ambient_dim), (4, 8));
    }

    #[test]
    fn flag_requires_real_h0() {
        let h0 = CartanElement::new(vec![Complex64::new(1.0, 1.0), Complex64::new(-1.0, -1.0)]).unwrap();
        assert!(matches!(
            lagrangian_verdict_flag(&h0, 5, 0, FormConfig::default()),
            Err(Error::NotReal { .. })
        ));
    }

    #[test]
    fn sphere_is_lagrangian() {
        let v = lagrangian_verdict_thimble_sphere(50, 9, FormConfig::default());
        assert!(v.is_lagrangian_numerically, "{v:?}");
        assert_eq!(v.sample_count, 50);
        // at the pole every tangent pairing is tiny
        let pole = sphere_matrix(1.0, 0.0, 0.0);
        let (w, _, _) = flag_tangent_data(&pole, FormConfig::default());
        assert!(w < 1e-12);
    }

    #[test]
    fn sphere_points_lie_on_the_orbit() {
        let s = sphere_matrix(0.6, 0.0, 0.8);
        let cp = crate::linalg::charpoly(s.matrix());
        assert!((cp[0] + 1.0).norm() < 1e-15);
    }
}
