//! Invariant suites run by `orbitfib verify`.
//!
//! Every check records a measured quantity against a bound. Upper-bound
//! checks (errors, residuals, drifts) take their tolerance from the global
//! override when one is given; lower-bound checks (singular values) keep
//! their own.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fibration::{
    differential, hessian_certificate, predicted_betti, random_regular_point, OrbitPoint,
};
use crate::liealg::{
    bracket, herm_norm, hermitian_form, killing_via_ad, tau, trace_form, CartanElement, FormConfig,
};
use crate::linalg::{random_element, random_regular_real};
use crate::report::membership_cases;
use crate::sl2::{
    fibre_points, fs_report, singular_fibre_membership, thimble_lagrangian_check_with,
    thimble_point, vanishing_cycle_intersections, CriticalSide, SurfacePoint, THIMBLE_FD_STEP,
};
use crate::symplectic::{
    kks_degeneracy_witness, lagrangian_verdict_flag_with_tol, omega_affine_piece_verdict,
    omega_fibre_verdict, LagrangianVerdict,
};
use crate::transport::{z_field, z_field_raw, Transport};
use crate::weyl::{factorial, weyl_orbit, DEDUP_TOL};

pub const SUITES: [&str; 10] = [
    "forms",
    "weyl",
    "hessian",
    "transport",
    "symplectic",
    "kks",
    "lagrangian",
    "sl2",
    "fs",
    "betti",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    /// Passes when `measured < tolerance`.
    Below,
    /// Passes when `measured > tolerance`.
    Above,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub suite: String,
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    pub bound: Bound,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub tolerance_override: Option<f64>,
    pub checks: Vec<CheckOutcome>,
    pub pass: bool,
}

struct Recorder<'a> {
    suite: &'a str,
    tol_override: Option<f64>,
    out: Vec<CheckOutcome>,
}

impl Recorder<'_> {
    fn below(&mut self, name: &str, measured: f64, tolerance: f64) {
        let tolerance = self.tol_override.unwrap_or(tolerance);
        self.push(name, measured, tolerance, Bound::Below, measured < tolerance);
    }

    fn above(&mut self, name: &str, measured: f64, tolerance: f64) {
        self.push(name, measured, tolerance, Bound::Above, measured > tolerance);
    }

    /// An exact check, recorded as a `0/1` mismatch indicator.
    fn exact(&mut self, name: &str, ok: bool) {
        let measured = if ok { 0.0 } else { 1.0 };
        self.push(name, measured, 0.5, Bound::Below, ok);
    }

    fn push(&mut self, name: &str, measured: f64, tolerance: f64, bound: Bound, pass: bool) {
        self.out.push(CheckOutcome {
            suite: self.suite.into(),
            name: name.into(),
            measured,
            tolerance,
            bound,
            pass: pass && measured.is_finite(),
        });
    }

    fn lagrangian(&mut self, name: &str, v: &LagrangianVerdict) {
        self.below(&format!("{name}: max |Omega|"), v.max_abs_omega, v.tolerance);
        self.exact(&format!("{name}: dimension is half the orbit"), v.dimension_check);
    }
}

fn reals(v: &[f64]) -> CartanElement {
    CartanElement::from_reals(v).expect("fixed traceless diagonal")
}

fn suite_forms(r: &mut Recorder, seed: u64) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = FormConfig::default();
    let (mut inv, mut kill, mut pos, mut iso, mut sym): (f64, f64, f64, f64, f64) =
        (0.0, 0.0, f64::INFINITY, 0.0, 0.0);
    for n in 2..=4 {
        for _ in 0..10 {
            let x = random_element(n, 1.0, &mut rng);
            let y = random_element(n, 1.0, &mut rng);
            let z = random_element(n, 1.0, &mut rng);
            let lhs = trace_form(&bracket(&x, &y)?, &z, cfg)? + trace_form(&y, &bracket(&x, &z)?, cfg)?;
            inv = inv.max(lhs.norm());
            let k = killing_via_ad(&x, &y)?;
            let t = trace_form(&x, &y, FormConfig::killing(n))?;
            kill = kill.max((k - t).norm() / (1.0 + k.norm()));
            pos = pos.min(herm_norm(&x, cfg) / x.frobenius_norm());
            let a = hermitian_form(&tau(&x), &tau(&y), cfg)?;
            let b = hermitian_form(&x, &y, cfg)?;
            iso = iso.max((a - b.conj()).norm());
            let c = hermitian_form(&y, &x, cfg)?;
            sym = sym.max((b - c.conj()).norm());
        }
    }
    r.below("ad-invariance of the trace form", inv, 1e-12);
    r.below("Killing form equals 2n tr", kill, 1e-12);
    r.above("H_tau positive definite (|x|_tau / |x|_F)", pos, 0.5);
    r.below("tau is an antiunitary isometry", iso, 1e-12);
    r.below("H_tau is Hermitian", sym, 1e-12);
    Ok(())
}

fn suite_weyl(r: &mut Recorder) -> Result<()> {
    for (h0, expected) in [
        (reals(&[1.0, -1.0]), 2),
        (reals(&[1.0, 0.0, -1.0]), 6),
        (reals(&[1.0, 1.0, -2.0]), 3),
        (reals(&[2.0, 1.0, -1.0, -2.0]), 24),
        (reals(&[1.0, 1.0, -1.0, -1.0]), 6),
    ] {
        let orbit = weyl_orbit(&h0, DEDUP_TOL)?;
        r.exact(
            &format!("|W.H0| = {expected} for H0 = {h0}"),
            orbit.orbit_size == expected && orbit.orbit_size * orbit.stabilizer_size == factorial(h0.n()),
        );
    }
    Ok(())
}

fn suite_hessian(r: &mut Recorder, seed: u64) -> Result<()> {
    let h = reals(&[1.0, -1.0]);
    let cert = hessian_certificate(&h.to_element(), &h, FormConfig::default())?;
    r.below(
        "sl(2) canonical min singular value equals 4",
        (cert.min_singular_value.unwrap_or(0.0) - 4.0).abs(),
        1e-9,
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::INFINITY;
    for k in 0..20 {
        let n = 2 + k % 2;
        let h = random_regular_real(n, 0.1, &mut rng);
        let h0 = random_regular_real(n, 0.1, &mut rng);
        for p in weyl_orbit(&h0, DEDUP_TOL)?.points {
            let cert = hessian_certificate(&p.to_element(), &h, FormConfig::default())?;
            worst = worst.min(cert.min_singular_value.unwrap_or(0.0));
        }
    }
    r.above("random regular pairs: min singular value", worst, 1e-8);
    Ok(())
}

fn suite_transport(r: &mut Recorder, seed: u64) -> Result<()> {
    let cfg = FormConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for n in [2, 3] {
        let h0 = random_regular_real(n, 0.2, &mut rng);
        let h = random_regular_real(n, 0.2, &mut rng);
        for _ in 0..20 {
            let x = random_regular_point(&h0, &h, 1e-2, &mut rng)
                .ok_or_else(|| Error::InvalidInput("no regular point found".into()))?;
            let df = differential(&x, &z_field(&x, &h, cfg)?, &h, cfg)?;
            worst = worst.max((df - 1.0).norm());
        }
    }
    r.below("df_H(Z) = 1 at random regular points", worst, 1e-10);
    let h = reals(&[1.0, -1.0]);
    let x = OrbitPoint::certify(
        crate::liealg::AlgebraElement::sl2(0.0.into(), 1.0.into(), 1.0.into()),
        &h,
        1e-12,
    )?;
    let raw = crate::fibration::height(&OrbitPoint::measure(z_field_raw(&x, &h, cfg)?, &h), &h, cfg);
    r.below("raw field at antidiag(1,1): df = -1", (raw + 1.0).norm(), 1e-12);
    let t = Transport::with_defaults(&h, &h, cfg)?;
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let samples = t.sample_fibre(zero, 3, seed)?;
    let there = t.transport_trajectories(&samples, zero, one)?;
    let (mut miss, mut drift): (f64, f64) = (0.0, 0.0);
    for traj in &there {
        let last = traj.last().expect("nonempty trajectory");
        miss = miss.max((last.f_value - one).norm());
        drift = drift.max(traj.iter().map(|s| s.charpoly_drift).fold(0.0, f64::max));
    }
    r.below("transport 0 -> 1: |f - 1|", miss, 1e-6);
    r.below("transport 0 -> 1: characteristic polynomial drift", drift, 1e-6);
    let ends: Vec<OrbitPoint> = there.iter().map(|tr| tr.last().unwrap().point.clone()).collect();
    let back = t.transport_fibre(&ends, one, zero)?;
    let round = samples
        .iter()
        .zip(&back)
        .map(|(a, b)| a.x.distance(&b.x))
        .fold(0.0, f64::max);
    r.below("transport round trip", round, 1e-5);
    Ok(())
}

fn sample_points(h0: &CartanElement, h: &CartanElement, count: usize, seed: u64) -> Result<Vec<OrbitPoint>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            random_regular_point(h0, h, 1e-2, &mut rng)
                .ok_or_else(|| Error::InvalidInput("no regular point found".into()))
        })
        .collect()
}

fn configurations() -> Vec<(CartanElement, CartanElement)> {
    vec![
        (reals(&[1.0, -1.0]), reals(&[1.0, -1.0])),
        (reals(&[1.0, 0.0, -1.0]), reals(&[1.5, 0.25, -1.75])),
        (reals(&[1.0, 1.0, -2.0]), reals(&[0.5, 0.2, -0.7])),
    ]
}

fn suite_symplectic(r: &mut Recorder, seed: u64) -> Result<()> {
    let cfg = FormConfig::default();
    for (h0, h) in configurations() {
        let mut ratio = f64::INFINITY;
        let mut antisym: f64 = 0.0;
        for x in sample_points(&h0, &h, 15, seed)? {
            let v = omega_fibre_verdict(&x, &h, cfg)?;
            ratio = ratio.min(v.gram_min_sv.unwrap_or(0.0));
            antisym = antisym.max(v.antisymmetry);
        }
        r.above(&format!("Omega on fibres, H0 = {h0}: min singular value"), ratio, 1e-10);
        r.below(&format!("Omega on fibres, H0 = {h0}: antisymmetry"), antisym, 1e-12);
        let mut piece_min = f64::INFINITY;
        for w in weyl_orbit(&h0, DEDUP_TOL)?.points {
            let v = omega_affine_piece_verdict(&w, &h, cfg)?;
            piece_min = piece_min.min(v.gram_min_sv.unwrap_or(0.0));
        }
        r.above(&format!("Omega on n+(wH0), H0 = {h0}: min singular value"), piece_min, 1e-10);
    }
    Ok(())
}

fn suite_kks(r: &mut Recorder, seed: u64) -> Result<()> {
    let cfg = FormConfig::default();
    for (h0, h) in configurations() {
        let mut worst: f64 = 0.0;
        for x in sample_points(&h0, &h, 15, seed)? {
            worst = worst.max(kks_degeneracy_witness(&x, &h, cfg)?);
        }
        r.below(&format!("KKS witness, H0 = {h0}"), worst, 1e-9);
    }
    Ok(())
}

fn suite_lagrangian(r: &mut Recorder, seed: u64) -> Result<()> {
    let cfg = FormConfig::default();
    let tol = r.tol_override.unwrap_or(crate::symplectic::LAGRANGIAN_TOL);
    for h0 in [reals(&[1.0, -1.0]), reals(&[1.0, 0.0, -1.0])] {
        let v = lagrangian_verdict_flag_with_tol(&h0, 50, seed, cfg, tol)?;
        r.lagrangian(&format!("flag of {h0}"), &v);
    }
    let mut v = crate::symplectic::lagrangian_verdict_thimble_sphere(50, seed, cfg);
    v.tolerance = tol;
    r.lagrangian("sphere x^2+y^2+z^2=1", &v);
    Ok(())
}

fn suite_sl2(r: &mut Recorder) -> Result<()> {
    let cfg = FormConfig::default();
    let bs = [Complex64::new(1.0, 0.0), Complex64::new(-2.0, 0.5), Complex64::new(0.0, 3.0)];
    let mut residual: f64 = 0.0;
    for lambda in [0.0, 1.0, -1.5] {
        for p in fibre_points(lambda.into(), &bs)? {
            residual = residual.max(p.surface_residual());
        }
        for k in 0..16 {
            residual = residual.max(thimble_point(lambda, k as f64 * 0.4).surface_residual());
        }
    }
    r.below("surface equation on fibre and thimble points", residual, 1e-10);
    r.exact(
        "thimble endpoints are (+-1, 0, 0)",
        thimble_point(2.0, 0.7) == SurfacePoint::real(1.0, 0.0, 0.0)
            && thimble_point(-2.0, 0.7) == SurfacePoint::real(-1.0, 0.0, 0.0),
    );
    r.exact(
        "singular fibre membership {x = +-1, yz = 0}",
        membership_cases().iter().all(|(p, side, expected)| {
            let m = singular_fibre_membership(p, *side);
            m.member == expected.is_some() && m.branch == *expected
        }),
    );
    for side in [CriticalSide::Plus, CriticalSide::Minus] {
        let v = thimble_lagrangian_check_with(side, 20, THIMBLE_FD_STEP, crate::sl2::THIMBLE_TOL, cfg);
        r.below(&format!("thimble over {}: max |Omega|", side.value()), v.max_abs_omega, v.tolerance);
    }
    Ok(())
}

fn suite_fs(r: &mut Recorder) -> Result<()> {
    let fs = fs_report();
    let expected = [((0, 1), 2), ((0, 0), 1), ((1, 1), 1), ((1, 0), 0)];
    r.exact(
        "Hom ranks {(0,1): 2, (0,0): 1, (1,1): 1, (1,0): 0}",
        expected.iter().all(|&((i, j), k)| fs.hom_rank(i, j) == Some(k)),
    );
    r.exact("degrees (0, 1)", fs.degrees() == [0, 1]);
    r.exact(
        "rank Hom(L_0, L_1) equals the intersection count",
        fs.hom_rank(0, 1) == Some(vanishing_cycle_intersections(2)?),
    );
    Ok(())
}

fn suite_betti(r: &mut Recorder) -> Result<()> {
    for (h0, k) in [
        (reals(&[1.0, -1.0]), 2),
        (reals(&[1.0, 0.0, -1.0]), 6),
        (reals(&[1.0, 1.0, -2.0]), 3),
    ] {
        let size = weyl_orbit(&h0, DEDUP_TOL)?.orbit_size;
        r.exact(
            &format!("predicted middle Betti numbers for H0 = {h0}"),
            size == k && predicted_betti(size) == (k - 1, k - 2),
        );
    }
    r.exact("sl(2): cylinder b1 = 1, singular fibre contractible", predicted_betti(2) == (1, 0));
    Ok(())
}

/// Runs the named suites (all when `suites` is empty).
pub fn run_suites(suites: &[String], tol_override: Option<f64>, seed: u64) -> Result<VerifyReport> {
    if let Some(bad) = suites.iter().find(|s| !SUITES.contains(&s.as_str())) {
        return Err(Error::InvalidInput(format!(
            "unknown suite {bad:?}; expected one of {}",
            SUITES.join(", ")
        )));
    }
    if let Some(t) = tol_override {
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::InvalidInput(format!("tolerance must be positive, got {t}")));
        }
    }
    let mut checks = Vec::new();
    for &suite in SUITES.iter() {
        if !suites.is_empty() && !suites.iter().any(|s| s == suite) {
            continue;
        }
        let mut r = Recorder {
            suite,
            tol_override,
            out: Vec::new(),
        };
        match suite {
            "forms" => suite_forms(&mut r, seed)?,
            "weyl" => suite_weyl(&mut r)?,
            "hessian" => suite_hessian(&mut r, seed)?,
            "transport" => suite_transport(&mut r, seed)?,
            "symplectic" => suite_symplectic(&mut r, seed)?,
            "kks" => suite_kks(&mut r, seed)?,
            "lagrangian" => suite_lagrangian(&mut r, seed)?,
            "sl2" => suite_sl2(&mut r)?,
            "fs" => suite_fs(&mut r)?,
            "betti" => suite_betti(&mut r)?,
            _ => unreachable!("suite names validated above"),
        }
        checks.extend(r.out);
    }
    let pass = checks.iter().all(|c| c.pass);
    Ok(VerifyReport {
        seed,
        tolerance_override: tol_override,
        checks,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_suites_pass() {
        let report = run_suites(&[], None, 0).unwrap();
        let failed: Vec<_> = report.checks.iter().filter(|c| !c.pass).collect();
        assert!(failed.is_empty(), "{failed:#?}");
        let suites: std::collections::BTreeSet<&str> =
            report.checks.iter().map(|c| c.suite.as_str()).collect();
        assert_eq!(suites.len(), SUITES.len());
    }

    #[test]
    fn single_suite() {
        let report = run_suites(&["sl2".into()], None, 0).unwrap();
        assert!(report.pass);
        assert!(report.checks.iter().all(|c| c.suite == "sl2"));
    }

    #[test]
    fn tampered_tolerance_fails() {
        let report = run_suites(&["forms".into(), "sl2".into()], Some(1e-20), 0).unwrap();
        assert!(!report.pass);
    }

    #[test]
    fn rejects_unknown_suite() {
        assert!(run_suites(&["nope".into()], None, 0).is_err());
        assert!(run_suites(&[], Some(-1.0), 0).is_err());
    }
}
