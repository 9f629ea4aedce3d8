//! The sl(2) laboratory on the surface `x^2 + yz = 1`.
//!
//! A point `(x, y, z)` stands for the matrix `(x, y; z, -x)` in the orbit of
//! `diag(1,-1)`, and `f = 2x` is the height function for `H = diag(1,-1)`
//! with `c = 1`. Critical values are `+2` and `-2`, the regular fibre over
//! `lambda` is the cylinder `yz = 1 - lambda^2/4`, and the two thimbles are
//! swept by the circles `alpha_lambda(t)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::liealg::{herm, AlgebraElement, FormConfig};
use crate::symplectic::LagrangianVerdict;

/// Tolerance for the surface equation and singular-fibre membership.
pub const SURFACE_TOL: f64 = 1e-10;
/// Finite-difference step for thimble tangents.
pub const THIMBLE_FD_STEP: f64 = 1e-5;
/// Bound on `|Omega|` over the thimble grid.
pub const THIMBLE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfacePoint {
    #[serde(with = "crate::serial::complex")]
    pub x: Complex64,
    #[serde(with = "crate::serial::complex")]
    pub y: Complex64,
    #[serde(with = "crate::serial::complex")]
    pub z: Complex64,
}

impl SurfacePoint {
    pub fn new(x: Complex64, y: Complex64, z: Complex64) -> Self {
        Self { x, y, z }
    }

    pub fn real(x: f64, y: f64, z: f64) -> Self {
        Self::new(x.into(), y.into(), z.into())
    }

    /// `|x^2 + yz - 1|`.
    pub fn surface_residual(&self) -> f64 {
        (self.x * self.x + self.y * self.z - 1.0).norm()
    }

    pub fn on_surface(&self) -> bool {
        self.surface_residual() < SURFACE_TOL
    }

    pub fn to_matrix(&self) -> AlgebraElement {
        AlgebraElement::sl2(self.x, self.y, self.z)
    }

    /// `f = 2x`.
    pub fn height(&self) -> Complex64 {
        self.x * 2.0
    }

    pub fn distance(&self, other: &SurfacePoint) -> f64 {
        ((self.x - other.x).norm_sqr() + (self.y - other.y).norm_sqr() + (self.z - other.z).norm_sqr())
            .sqrt()
    }
}

/// One of the two critical values `+2` and `-2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CriticalSide {
    Plus,
    Minus,
}

impl CriticalSide {
    pub fn sign(self) -> f64 {
        match self {
            CriticalSide::Plus => 1.0,
            CriticalSide::Minus => -1.0,
        }
    }

    pub fn value(self) -> f64 {
        2.0 * self.sign()
    }

    pub fn from_value(v: f64) -> Result<Self> {
        if v == 2.0 {
            Ok(CriticalSide::Plus)
        } else if v == -2.0 {
            Ok(CriticalSide::Minus)
        } else {
            Err(Error::InvalidInput(format!("critical value must be 2 or -2, got {v}")))
        }
    }
}

/// Points `(lambda/2, b, (1 - lambda^2/4)/b)` of the fibre over `lambda`.
pub fn fibre_points(lambda: Complex64, b_samples: &[Complex64]) -> Result<Vec<SurfacePoint>> {
    let rhs = Complex64::new(1.0, 0.0) - lambda * lambda / 4.0;
    b_samples
        .iter()
        .map(|&b| {
            if b == Complex64::new(0.0, 0.0) {
                return Err(Error::ZeroFibreParameter);
            }
            Ok(SurfacePoint::new(lambda / 2.0, b, rhs / b))
        })
        .collect()
}

/// Piece of a singular fibre `{x = +-1, yz = 0}` containing a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FibreBranch {
    /// `w + n+(w)`: the y-axis over `+2`, the z-axis over `-2`.
    NPlus,
    /// `w + n-(w)`.
    NMinus,
    /// The critical point itself, where both pieces meet.
    Crossing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Membership {
    pub member: bool,
    pub branch: Option<FibreBranch>,
}

pub fn singular_fibre_membership(p: &SurfacePoint, which: CriticalSide) -> Membership {
    let member = (p.x - which.sign()).norm() < SURFACE_TOL && (p.y * p.z).norm() < SURFACE_TOL;
    if !member {
        return Membership { member, branch: None };
    }
    let (ny, nz) = (p.y.norm(), p.z.norm());
    let branch = if ny < SURFACE_TOL && nz < SURFACE_TOL {
        FibreBranch::Crossing
    } else {
        // the nonzero coordinate names the axis
        let on_y_axis = nz <= ny;
        match (which, on_y_axis) {
            (CriticalSide::Plus, true) | (CriticalSide::Minus, false) => FibreBranch::NPlus,
            _ => FibreBranch::NMinus,
        }
    };
    Membership {
        member,
        branch: Some(branch),
    }
}

fn circle_radius(lambda: f64) -> f64 {
    (1.0 - lambda * lambda / 4.0).max(0.0).sqrt()
}

/// `alpha_lambda(t) = (lambda/2, e^{it} r, e^{-it} r)` with `r = sqrt(1 - lambda^2/4)`.
pub fn thimble_point(lambda: f64, t: f64) -> SurfacePoint {
    if lambda.abs() >= 2.0 {
        return SurfacePoint::real(lambda.signum(), 0.0, 0.0);
    }
    let r = circle_radius(lambda);
    let e = Complex64::from_polar(1.0, t);
    SurfacePoint::new((lambda / 2.0).into(), e * r, e.conj() * r)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Thimble {
    pub critical_value: f64,
    /// `lambda` values from the base value `0` to the critical value.
    pub path: Vec<f64>,
    /// `circles[k]` samples `alpha_{path[k]}` at equally spaced `t`.
    pub circles: Vec<Vec<SurfacePoint>>,
}

impl Thimble {
    pub fn new(which: CriticalSide, path_samples: usize, circle_samples: usize) -> Self {
        let steps = path_samples.max(2) - 1;
        let path: Vec<f64> = (0..=steps)
            .map(|k| which.value() * k as f64 / steps as f64)
            .collect();
        let circles = path
            .iter()
            .map(|&lambda| {
                (0..circle_samples)
                    .map(|j| thimble_point(lambda, 2.0 * PI * j as f64 / circle_samples as f64))
                    .collect()
            })
            .collect();
        Self {
            critical_value: which.value(),
            path,
            circles,
        }
    }

    /// Largest radius of each stored circle.
    pub fn radii(&self) -> Vec<f64> {
        self.circles
            .iter()
            .map(|c| c.iter().map(|p| p.y.norm()).fold(0.0, f64::max))
            .collect()
    }
}

fn tangent(a: &SurfacePoint, b: &SurfacePoint, h: f64) -> AlgebraElement {
    (&b.to_matrix() - &a.to_matrix()).scale_real(1.0 / (2.0 * h))
}

/// `Omega(d/dlambda, d/dt)` on the thimble over `which`, by central finite
/// differences on a `grid x grid` lattice of `(lambda, t)`. The lattice
/// stops short of the critical value, where the disc is not smooth in these
/// coordinates.
pub fn thimble_lagrangian_check(which: CriticalSide, grid: usize, cfg: FormConfig) -> LagrangianVerdict {
    thimble_lagrangian_check_with(which, grid, THIMBLE_FD_STEP, THIMBLE_TOL, cfg)
}

pub fn thimble_lagrangian_check_with(
    which: CriticalSide,
    grid: usize,
    fd_step: f64,
    tol: f64,
    cfg: FormConfig,
) -> LagrangianVerdict {
    let h = fd_step;
    let mut worst: f64 = 0.0;
    for a in 0..grid {
        let lambda = which.value() * a as f64 / grid as f64;
        for b in 0..grid {
            let t = 2.0 * PI * b as f64 / grid as f64;
            let d_lambda = tangent(&thimble_point(lambda - h, t), &thimble_point(lambda + h, t), h);
            let d_t = tangent(&thimble_point(lambda, t - h), &thimble_point(lambda, t + h), h);
            worst = worst.max(herm(&d_lambda, &d_t, cfg).im.abs());
        }
    }
    LagrangianVerdict::new(
        format!("thimble over {}", which.value()),
        grid * grid,
        worst,
        2,
        4,
        tol,
    )
}

/// A transverse intersection of the zero section with the graph of `eps dg`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntersectionPoint {
    pub theta: f64,
    pub morse_index: usize,
    /// `1 - morse_index`.
    pub degree: i32,
}

fn check_morse_count(count: usize) -> Result<()> {
    if count < 2 || count % 2 == 1 {
        return Err(Error::OddMorseCount(count));
    }
    Ok(())
}

/// Intersections of `L_0` (zero section of `T*S^1`) with `L_1`, the graph of
/// `eps dg` for `g = cos(m theta)`, `m = count / 2`. Located by sign changes
/// of `eps g'` on a fine grid and refined by bisection.
pub fn perturbed_intersections(count: usize, eps: f64) -> Result<Vec<IntersectionPoint>> {
    check_morse_count(count)?;
    if !(eps.is_finite() && eps != 0.0) {
        return Err(Error::InvalidInput(format!("perturbation size must be nonzero, got {eps}")));
    }
    let m = (count / 2) as f64;
    let section = |theta: f64| -eps * m * (m * theta).sin();
    let samples = 64 * count;
    let dtheta = 2.0 * PI / samples as f64;
    // offset the grid so no sample lands on a zero
    let at = |k: usize| (k as f64 + 0.5) * dtheta;
    let mut points = Vec::new();
    for k in 0..samples {
        let (mut lo, mut hi) = (at(k), at(k) + dtheta);
        if section(lo).signum() == section(hi).signum() {
            continue;
        }
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if section(mid).signum() == section(lo).signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let theta = (0.5 * (lo + hi)).rem_euclid(2.0 * PI);
        // g'' = -m^2 cos(m theta): minima have index 0
        let second = -m * m * (m * theta).cos();
        let morse_index = usize::from(second < 0.0);
        points.push(IntersectionPoint {
            theta,
            morse_index,
            degree: 1 - morse_index as i32,
        });
    }
    points.sort_by(|a, b| a.theta.total_cmp(&b.theta));
    Ok(points)
}

/// Number of intersections of the two vanishing cycles after the Morse
/// perturbation with `count` critical points.
pub fn vanishing_cycle_intersections(count: usize) -> Result<usize> {
    Ok(perturbed_intersections(count, 1e-1)?.len())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FsObject {
    pub name: String,
    pub degree: i32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomRank {
    pub source: usize,
    pub target: usize,
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductDescriptor {
    pub name: String,
    pub provenance: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FsCategoryReport {
    pub objects: Vec<FsObject>,
    pub hom_ranks: Vec<HomRank>,
    pub products_nontrivial: Vec<ProductDescriptor>,
    /// Intersection count of the perturbed vanishing cycles.
    pub computed_intersections: usize,
    pub intersection_degrees: Vec<i32>,
    pub consistent: bool,
}

impl FsCategoryReport {
    pub fn hom_rank(&self, source: usize, target: usize) -> Option<usize> {
        self.hom_ranks
            .iter()
            .find(|h| h.source == source && h.target == target)
            .map(|h| h.rank)
    }

    pub fn degrees(&self) -> Vec<i32> {
        self.objects.iter().map(|o| o.degree).collect()
    }
}

/// The directed category of the two vanishing cycles `L_0`, `L_1`.
pub fn fs_report() -> FsCategoryReport {
    let points = perturbed_intersections(2, 1e-1).expect("2 is a valid Morse count");
    let computed = points.len();
    let mut intersection_degrees: Vec<i32> = points.iter().map(|p| p.degree).collect();
    intersection_degrees.sort_unstable();
    let hom_ranks = vec![
        HomRank { source: 0, target: 0, rank: 1 },
        HomRank { source: 0, target: 1, rank: computed },
        HomRank { source: 1, target: 0, rank: 0 },
        HomRank { source: 1, target: 1, rank: 1 },
    ];
    let products_nontrivial = ["m_2(·, id)", "m_2(id, ·)"]
        .into_iter()
        .map(|name| ProductDescriptor {
            name: name.into(),
            provenance: "asserted".into(),
        })
        .collect();
    let objects = vec![
        FsObject { name: "L_0".into(), degree: 0 },
        FsObject { name: "L_1".into(), degree: 1 },
    ];
    let consistent = computed == 2 && intersection_degrees == [0, 1];
    FsCategoryReport {
        objects,
        hom_ranks,
        products_nontrivial,
        computed_intersections: computed,
        intersection_degrees,
        consistent,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fibration::{height, OrbitPoint};
    use crate::liealg::CartanElement;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn fibre_point_examples() {
        let p = fibre_points(c(0.0), &[c(1.0), c(2.0)]).unwrap();
        assert_eq!(p[0], SurfacePoint::real(0.0, 1.0, 1.0));
        assert_eq!(p[1], SurfacePoint::real(0.0, 2.0, 0.5));
        let q = fibre_points(c(1.0), &[c(1.0)]).unwrap();
        assert_eq!(q[0], SurfacePoint::real(0.5, 1.0, 0.75));
        assert!(p.iter().chain(&q).all(SurfacePoint::on_surface));
        assert!(matches!(fibre_points(c(0.0), &[c(0.0)]), Err(Error::ZeroFibreParameter)));
    }

    #[test]
    fn height_agrees_with_matrix_pairing() {
        let h = CartanElement::from_reals(&[1.0, -1.0]).unwrap();
        let lambda = Complex64::new(0.7, -0.3);
        for p in fibre_points(lambda, &[c(1.0), Complex64::new(0.2, 3.0)]).unwrap() {
            let x = OrbitPoint::measure(p.to_matrix(), &h);
            assert!(x.charpoly_drift < 1e-12);
            let f = height(&x, &h, FormConfig::default());
            assert!((f - p.height()).norm() < 1e-12);
            assert!((f - lambda).norm() < 1e-12);
        }
    }

    #[test]
    fn membership_examples() {
        let m = singular_fibre_membership(&SurfacePoint::real(1.0, 5.0, 0.0), CriticalSide::Plus);
        assert_eq!(m, Membership { member: true, branch: Some(FibreBranch::NPlus) });
        let m = singular_fibre_membership(&SurfacePoint::real(1.0, 0.0, 5.0), CriticalSide::Plus);
        assert_eq!(m.branch, Some(FibreBranch::NMinus));
        let m = singular_fibre_membership(&SurfacePoint::real(1.0, 1.0, 1.0), CriticalSide::Plus);
        assert!(!m.member);
        let m = singular_fibre_membership(&SurfacePoint::real(-1.0, 0.0, 5.0), CriticalSide::Minus);
        assert_eq!(m.branch, Some(FibreBranch::NPlus));
        let m = singular_fibre_membership(&SurfacePoint::real(1.0, 0.0, 0.0), CriticalSide::Plus);
        assert_eq!(m.branch, Some(FibreBranch::Crossing));
        let m = singular_fibre_membership(&SurfacePoint::real(1.0, 0.0, 0.0), CriticalSide::Minus);
        assert!(!m.member);
    }

    #[test]
    fn thimble_point_examples() {
        assert_eq!(thimble_point(2.0, 0.4), SurfacePoint::real(1.0, 0.0, 0.0));
        assert_eq!(thimble_point(-2.0, 1.3), SurfacePoint::real(-1.0, 0.0, 0.0));
        assert_eq!(thimble_point(0.0, 0.0), SurfacePoint::real(0.0, 1.0, 1.0));
        assert!(thimble_point(0.0, PI).distance(&SurfacePoint::real(0.0, -1.0, -1.0)) < 1e-15);
        let p = thimble_point(1.2, 0.9);
        assert!(p.on_surface());
        assert!(p.distance(&thimble_point(1.2, 0.9 + 2.0 * PI)) < 1e-14);
    }

    #[test]
    fn thimble_radii_shrink() {
        let th = Thimble::new(CriticalSide::Minus, 11, 16);
        assert_eq!(th.path.first(), Some(&0.0));
        assert_eq!(th.path.last(), Some(&-2.0));
        let radii = th.radii();
        assert!(radii.windows(2).all(|w| w[1] < w[0]));
        assert_eq!(*radii.last().unwrap(), 0.0);
        for (lambda, circle) in th.path.iter().zip(&th.circles) {
            for p in circle {
                assert!(p.on_surface());
                assert!((p.height() - lambda).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn thimbles_are_lagrangian() {
        for side in [CriticalSide::Plus, CriticalSide::Minus] {
            let v = thimble_lagrangian_check(side, 20, FormConfig::default());
            assert!(v.is_lagrangian_numerically, "{v:?}");
        }
        let p = thimble_point(0.5, 0.3);
        let q = thimble_point(0.5, 0.3 + 1e-5);
        let d = tangent(&p, &q, 0.5e-5);
        assert_eq!(herm(&d, &d, FormConfig::default()).im, 0.0);
    }

    #[test]
    fn intersections_count_critical_points() {
        let pts = perturbed_intersections(2, 1e-1).unwrap();
        assert_eq!(pts.len(), 2);
        assert!(pts[0].theta.abs() < 1e-12 || (pts[0].theta - 2.0 * PI).abs() < 1e-12 || (pts[0].theta - PI).abs() < 1e-12);
        let mut degrees: Vec<i32> = pts.iter().map(|p| p.degree).collect();
        degrees.sort_unstable();
        assert_eq!(degrees, vec![0, 1]);
        assert_eq!(vanishing_cycle_intersections(4).unwrap(), 4);
        assert_eq!(vanishing_cycle_intersections(10).unwrap(), 10);
        assert_eq!(perturbed_intersections(2, 1e-3).unwrap().len(), 2);
        assert!(matches!(vanishing_cycle_intersections(3), Err(Error::OddMorseCount(3))));
        assert!(vanishing_cycle_intersections(0).is_err());
    }

    #[test]
    fn fs_report_matches_intersections() {
        let r = fs_report();
        assert_eq!(r.hom_rank(0, 1), Some(2));
        assert_eq!(r.hom_rank(1, 0), Some(0));
        assert_eq!(r.hom_rank(0, 0), Some(1));
        assert_eq!(r.hom_rank(1, 1), Some(1));
        assert_eq!(r.degrees(), vec![0, 1]);
        assert_eq!(r.computed_intersections, vanishing_cycle_intersections(2).unwrap());
        assert!(r.consistent);
        let json = serde_json::to_string(&r).unwrap();
        assert_eq!(serde_json::from_str::<FsCategoryReport>(&json).unwrap(), r);
    }
}
