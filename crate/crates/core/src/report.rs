//! End-to-end analysis of one `(H0, H)` configuration and the JSON report
//! it produces, plus the fibre-transport run used by the command line.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fibration::{
    height_of, hessian_certificate, predicted_betti, random_regular_point, HessianCertificate,
    OrbitPoint,
};
use crate::liealg::{regularity_violation, AlgebraElement, CartanElement, FormConfig, Root, STRUCTURAL_TOL};
use crate::linalg::conjugate_by_exp;
use crate::sl2::{
    fibre_points, fs_report, singular_fibre_membership, thimble_lagrangian_check, thimble_point,
    CriticalSide, FibreBranch, FsCategoryReport, SurfacePoint,
};
use crate::symplectic::{
    kks_degeneracy_witness, lagrangian_verdict_flag, lagrangian_verdict_thimble_sphere,
    omega_affine_piece_verdict, omega_fibre_verdict, positive_roots, LagrangianVerdict,
    SymplecticVerdict,
};
use crate::transport::{FlowConfig, TrajectoryRecord, Transport};
use crate::weyl::{critical_values, pairing_value, weyl_orbit, CriticalValue, DEDUP_TOL, MAX_ENUMERATION_N};

/// Names accepted in [`AnalysisRequest::checks`].
pub const CHECK_NAMES: [&str; 6] = ["hessian", "symplectic", "kks", "lagrangian", "singular_fibres", "sl2"];
/// Default number of random points per sampled check.
pub const DEFAULT_SAMPLES: usize = 10;
/// Upper bound on samples per check.
pub const MAX_SAMPLES: usize = 1000;
/// Base tolerance of the KKS witness, scaled by `max(1, |x| |H|)`.
pub const KKS_TOL: f64 = 1e-9;
/// Random points drawn on each affine piece.
pub const AFFINE_PIECE_SAMPLES: usize = 20;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct FlowOverrides {
    pub step: Option<f64>,
    pub epsilon: Option<f64>,
}

impl FlowOverrides {
    pub fn apply(&self, base: FlowConfig) -> FlowConfig {
        FlowConfig {
            step: self.step.unwrap_or(base.step),
            epsilon: self.epsilon.unwrap_or(base.epsilon),
            ..base
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisRequest {
    pub n: usize,
    #[serde(with = "crate::serial::complex_vec")]
    pub h0_diag: Vec<Complex64>,
    pub h_diag: Vec<f64>,
    pub form_constant: f64,
    pub seed: u64,
    pub samples: usize,
    pub flow: FlowOverrides,
    pub checks: Vec<String>,
}

/// The validated pieces of a request.
#[derive(Debug, Clone, PartialEq)]
pub struct Validated {
    pub h0: CartanElement,
    pub h: CartanElement,
    pub cfg: FormConfig,
}

impl AnalysisRequest {
    /// Request with every check enabled and default settings.
    pub fn new(h0_diag: Vec<Complex64>, h_diag: Vec<f64>) -> Self {
        Self {
            n: h0_diag.len(),
            h0_diag,
            h_diag,
            form_constant: 1.0,
            seed: 0,
            samples: DEFAULT_SAMPLES,
            flow: FlowOverrides::default(),
            checks: CHECK_NAMES.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn from_reals(h0: &[f64], h: &[f64]) -> Self {
        Self::new(h0.iter().map(|&v| Complex64::new(v, 0.0)).collect(), h.to_vec())
    }

    pub fn check_enabled(&self, name: &str) -> bool {
        self.checks.iter().any(|c| c == name)
    }

    pub fn validate(&self) -> Result<Validated> {
        if self.n < 2 {
            return Err(Error::InvalidDimension(self.n));
        }
        if self.n > MAX_ENUMERATION_N {
            return Err(Error::OrbitTooLarge(self.n));
        }
        for len in [self.h0_diag.len(), self.h_diag.len()] {
            if len != self.n {
                return Err(Error::DimensionMismatch { left: self.n, right: len });
            }
        }
        if self.h0_diag.iter().any(|z| !(z.re.is_finite() && z.im.is_finite()))
            || self.h_diag.iter().any(|v| !v.is_finite())
        {
            return Err(Error::InvalidInput("diagonal entries must be finite".into()));
        }
        // regularity first: a repeated entry is the more useful diagnosis
        let raw_h = CartanElement::from_diag_unchecked(self.h_diag.iter().map(|&v| v.into()).collect());
        let tol = STRUCTURAL_TOL * (1.0 + raw_h.max_abs_entry());
        if let Some((i, j)) = regularity_violation(&raw_h, tol) {
            return Err(Error::NotRegular { i, j, tol });
        }
        let h0 = CartanElement::new(self.h0_diag.clone())?;
        let h = CartanElement::from_reals(&self.h_diag)?;
        let cfg = FormConfig::new(self.form_constant)?;
        if self.samples == 0 || self.samples > MAX_SAMPLES {
            return Err(Error::InvalidInput(format!(
                "samples must lie in 1..={MAX_SAMPLES}, got {}",
                self.samples
            )));
        }
        if let Some(bad) = self.checks.iter().find(|c| !CHECK_NAMES.contains(&c.as_str())) {
            return Err(Error::InvalidInput(format!(
                "unknown check {bad:?}; expected one of {}",
                CHECK_NAMES.join(", ")
            )));
        }
        self.flow.apply(FlowConfig::default()).validate()?;
        Ok(Validated { h0, h, cfg })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitSection {
    pub points: Vec<CartanElement>,
    pub orbit_size: usize,
    pub stabilizer_size: usize,
    pub weyl_order: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralPositionSection {
    pub is_general_position: bool,
    pub min_pairwise_gap: Option<f64>,
    pub offending_pair: Option<(usize, usize)>,
}

/// Structure of the singular fibre through `w` near `w`: the affine piece
/// `w + n+(w)` and its checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularFibreReport {
    pub w_point: CartanElement,
    #[serde(with = "crate::serial::complex")]
    pub critical_value: Complex64,
    pub nplus_basis: Vec<Root>,
    /// Complex dimension of `w + n+(w)`.
    pub affine_piece_dim: usize,
    /// Complex dimension of the singular fibre.
    pub fibre_dim: usize,
    pub bundle_piece_note: String,
    /// `max |f_H(w + X) - <H,w>|` over random `X` in `n+(w)`.
    pub height_residual: f64,
    /// Largest component of `exp(N) w exp(-N) - w` outside `n+(w)`.
    pub conjugation_residual: f64,
    pub omega: SymplecticVerdict,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymplecticSection {
    pub fibre_samples: usize,
    pub fibre_min_gram_sv: Option<f64>,
    pub fibre_max_antisymmetry: f64,
    pub fibre_all_nondegenerate: bool,
    pub affine_pieces: Vec<SingularFibreReport>,
    /// Present when `H0` is real.
    pub lagrangian_flag: Option<LagrangianVerdict>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KksSection {
    pub samples: usize,
    pub max_witness: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MiddleBetti {
    pub regular: usize,
    pub singular: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BettiSection {
    pub k: usize,
    pub predicted_middle_betti: MiddleBetti,
    pub status: String,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sl2Section {
    pub max_surface_residual: f64,
    pub thimble_endpoints_exact: bool,
    pub membership_ok: bool,
    pub thimbles: Vec<LagrangianVerdict>,
    pub sphere: LagrangianVerdict,
    pub fs: FsCategoryReport,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub request: AnalysisRequest,
    pub orbit: OrbitSection,
    pub critical_values: Vec<CriticalValue>,
    pub general_position: GeneralPositionSection,
    pub hessians: Vec<HessianCertificate>,
    pub symplectic: Option<SymplecticSection>,
    pub kks_witness: Option<KksSection>,
    pub betti: BettiSection,
    pub sl2: Option<Sl2Section>,
    pub failures: Vec<String>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report fields are serializable")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("malformed report: {e}")))
    }
}

fn random_complex<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0))
}

fn random_in_span<R: Rng>(roots: &[Root], n: usize, rng: &mut R) -> AlgebraElement {
    roots
        .iter()
        .fold(AlgebraElement::zeros(n), |acc, r| &acc + &r.root_vector(n).scale(random_complex(rng)))
}

/// Largest entry of `x` outside the root spaces in `roots`.
fn outside_span(x: &AlgebraElement, roots: &[Root]) -> f64 {
    let n = x.n();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i == j || !roots.contains(&Root::new(i, j)) {
                worst = worst.max(x.entry(i, j).norm());
            }
        }
    }
    worst
}

/// Affine piece `w + n+(w)` of the singular fibre through `w`.
pub fn singular_fibre_report(w: &CartanElement, req: &AnalysisRequest) -> Result<SingularFibreReport> {
    let v = req.validate()?;
    let orbit = weyl_orbit(&v.h0, DEDUP_TOL)?;
    if orbit.position(w, 1e-10).is_none() {
        return Err(Error::NotInWeylOrbit(w.to_string()));
    }
    singular_fibre_report_for(w, &v, orbit_complex_dim(&v.h0), req.seed)
}

/// Complex dimension of `O(H0)`: the number of roots not vanishing on `H0`.
pub fn orbit_complex_dim(h0: &CartanElement) -> usize {
    crate::liealg::roots(h0.n())
        .iter()
        .filter(|r| r.evaluate(h0).norm() > 1e-12 * (1.0 + h0.max_abs_entry()))
        .count()
}

fn singular_fibre_report_for(
    w: &CartanElement,
    v: &Validated,
    orbit_dim: usize,
    seed: u64,
) -> Result<SingularFibreReport> {
    let n = w.n();
    let nplus = positive_roots(w);
    let critical_value = pairing_value(&v.h, w, v.cfg);
    let we = w.to_element();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut height_residual: f64 = 0.0;
    let mut conjugation_residual: f64 = 0.0;
    for _ in 0..AFFINE_PIECE_SAMPLES {
        let x = random_in_span(&nplus, n, &mut rng);
        let f = height_of(&(&we + &x), &v.h, v.cfg);
        height_residual = height_residual.max((f - critical_value).norm());
        let nil = random_in_span(&nplus, n, &mut rng);
        let moved = conjugate_by_exp(&nil, &we)?;
        conjugation_residual = conjugation_residual.max(outside_span(&(&moved - &we), &nplus));
    }
    let omega = omega_affine_piece_verdict(w, &v.h, v.cfg)?;
    let scale = 1e-9 * (1.0 + w.max_abs_entry()) * (1.0 + v.h.max_abs_entry()) * v.cfg.c();
    let pass = omega.nondegenerate && height_residual < scale && conjugation_residual < scale;
    let fibre_dim = orbit_dim.saturating_sub(1);
    Ok(SingularFibreReport {
        w_point: w.clone(),
        critical_value,
        affine_piece_dim: nplus.len(),
        nplus_basis: nplus,
        fibre_dim,
        bundle_piece_note: format!(
            "the rest of the singular fibre is an affine subbundle of real codimension 2 \
             (complex fibre dimension {}) over the flag F_H0 minus W.H0; reported structurally, not constructed",
            fibre_dim.saturating_sub(orbit_dim / 2)
        ),
        height_residual,
        conjugation_residual,
        omega,
        pass,
    })
}

fn is_sl2_standard(h0: &CartanElement) -> bool {
    h0.n() == 2 && (h0.get(0) - 1.0).norm().min((h0.get(0) + 1.0).norm()) < 1e-12
}

/// The sl(2) laboratory checks bundled for the report.
pub fn sl2_section(cfg: FormConfig, seed: u64, samples: usize) -> Sl2Section {
    let bs = [
        Complex64::new(1.0, 0.0),
        Complex64::new(2.0, 0.0),
        Complex64::new(-0.5, 1.5),
        Complex64::new(0.0, -3.0),
    ];
    let mut points: Vec<SurfacePoint> = Vec::new();
    for lambda in [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.3, -1.2)] {
        points.extend(fibre_points(lambda, &bs).expect("nonzero fibre parameters"));
    }
    for k in 0..=20 {
        let lambda = -2.0 + 0.2 * k as f64;
        for j in 0..8 {
            points.push(thimble_point(lambda, j as f64 * 0.8));
        }
    }
    let max_surface_residual = points.iter().map(SurfacePoint::surface_residual).fold(0.0, f64::max);
    let thimble_endpoints_exact = [0.0, 1.0, 2.5]
        .iter()
        .all(|&t| thimble_point(2.0, t) == SurfacePoint::real(1.0, 0.0, 0.0)
            && thimble_point(-2.0, t) == SurfacePoint::real(-1.0, 0.0, 0.0));
    let membership_ok = membership_cases().iter().all(|(p, side, expected)| {
        let m = singular_fibre_membership(p, *side);
        m.member == expected.is_some() && m.branch == *expected
    });
    let thimbles: Vec<LagrangianVerdict> = [CriticalSide::Plus, CriticalSide::Minus]
        .into_iter()
        .map(|s| thimble_lagrangian_check(s, 20, cfg))
        .collect();
    let sphere = lagrangian_verdict_thimble_sphere(samples.max(2), seed, cfg);
    let fs = fs_report();
    let fs_ok = fs.consistent
        && fs.hom_rank(0, 1) == Some(2)
        && fs.hom_rank(1, 0) == Some(0)
        && fs.hom_rank(0, 0) == Some(1)
        && fs.hom_rank(1, 1) == Some(1)
        && fs.degrees() == [0, 1];
    let pass = max_surface_residual < 1e-10
        && thimble_endpoints_exact
        && membership_ok
        && thimbles.iter().all(|t| t.is_lagrangian_numerically)
        && sphere.is_lagrangian_numerically
        && fs_ok;
    Sl2Section {
        max_surface_residual,
        thimble_endpoints_exact,
        membership_ok,
        thimbles,
        sphere,
        fs,
        pass,
    }
}

/// Exact inputs with their expected singular-fibre branch.
pub fn membership_cases() -> Vec<(SurfacePoint, CriticalSide, Option<FibreBranch>)> {
    use CriticalSide::{Minus, Plus};
    use FibreBranch::{Crossing, NMinus, NPlus};
    vec![
        (SurfacePoint::real(1.0, 5.0, 0.0), Plus, Some(NPlus)),
        (SurfacePoint::real(1.0, 0.0, 5.0), Plus, Some(NMinus)),
        (SurfacePoint::real(1.0, 0.0, 0.0), Plus, Some(Crossing)),
        (SurfacePoint::real(1.0, 1.0, 1.0), Plus, None),
        (SurfacePoint::real(0.0, 1.0, 1.0), Plus, None),
        (SurfacePoint::real(-1.0, 0.0, -2.0), Minus, Some(NPlus)),
        (SurfacePoint::real(-1.0, 3.0, 0.0), Minus, Some(NMinus)),
        (SurfacePoint::real(-1.0, 0.0, 0.0), Minus, Some(Crossing)),
        (SurfacePoint::real(1.0, 5.0, 0.0), Minus, None),
    ]
}

fn betti_section(n: usize, k: usize) -> BettiSection {
    let (regular, singular) = predicted_betti(k);
    let (status, note) = match (n, k) {
        (2, 2) => (
            "verified",
            "regular fibres are cylinders C minus a point (b1 = 1); the singular fibre is two complex lines meeting in a point (contractible)",
        ),
        (_, 1) => ("degenerate", "the orbit is a single point and f_H has no regular fibres"),
        _ => ("predicted, unverified", "middle Betti numbers k - 1 (regular) and k - 2 (singular) from the singularity count"),
    };
    BettiSection {
        k,
        predicted_middle_betti: MiddleBetti { regular, singular },
        status: status.into(),
        note: note.into(),
    }
}

/// Runs every enabled check on the request and assembles the report.
pub fn analyze(req: &AnalysisRequest) -> Result<Report> {
    let v = req.validate()?;
    let mut failures = Vec::new();
    let orbit = weyl_orbit(&v.h0, DEDUP_TOL)?;
    let gp = critical_values(&v.h, &orbit, v.cfg)?;
    let orbit_dim = orbit_complex_dim(&v.h0);

    let mut hessians = Vec::new();
    if req.check_enabled("hessian") {
        for p in &orbit.points {
            let cert = hessian_certificate(&p.to_element(), &v.h, v.cfg)?;
            if !cert.nondegenerate {
                failures.push(format!("hessian: degenerate at {p}"));
            }
            hessians.push(cert);
        }
    }

    // regular sample points shared by the sampled checks
    let want_samples = req.check_enabled("symplectic") || req.check_enabled("kks");
    let mut regular_points: Vec<OrbitPoint> = Vec::new();
    if want_samples && orbit_dim > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(req.seed);
        for _ in 0..req.samples {
            match random_regular_point(&v.h0, &v.h, 1e-2, &mut rng) {
                Some(p) => regular_points.push(p),
                None => {
                    failures.push("sampling: no regular orbit point found".into());
                    break;
                }
            }
        }
    }

    let symplectic = if req.check_enabled("symplectic") {
        let mut min_sv: Option<f64> = None;
        let mut max_antisym: f64 = 0.0;
        let mut all_nondegenerate = true;
        for p in &regular_points {
            let verdict = omega_fibre_verdict(p, &v.h, v.cfg)?;
            if let Some(s) = verdict.gram_min_sv {
                min_sv = Some(min_sv.map_or(s, |m| m.min(s)));
            }
            max_antisym = max_antisym.max(verdict.antisymmetry);
            all_nondegenerate &= verdict.nondegenerate;
        }
        if !all_nondegenerate {
            failures.push("symplectic: Omega degenerate on a regular fibre".into());
        }
        let mut affine_pieces = Vec::new();
        if req.check_enabled("singular_fibres") {
            for (k, w) in orbit.points.iter().enumerate() {
                let piece = singular_fibre_report_for(w, &v, orbit_dim, req.seed.wrapping_add(k as u64))?;
                if !piece.pass {
                    failures.push(format!("singular_fibres: affine piece through {w} failed"));
                }
                affine_pieces.push(piece);
            }
        }
        let lagrangian_flag = if req.check_enabled("lagrangian") && v.h0.is_real(0.0) {
            let verdict = lagrangian_verdict_flag(&v.h0, req.samples, req.seed, v.cfg)?;
            if !verdict.is_lagrangian_numerically {
                failures.push(format!("lagrangian: {} not Lagrangian", verdict.description));
            }
            Some(verdict)
        } else {
            None
        };
        Some(SymplecticSection {
            fibre_samples: regular_points.len(),
            fibre_min_gram_sv: min_sv,
            fibre_max_antisymmetry: max_antisym,
            fibre_all_nondegenerate: all_nondegenerate,
            affine_pieces,
            lagrangian_flag,
        })
    } else {
        None
    };

    let kks_witness = if req.check_enabled("kks") {
        let mut max_witness: f64 = 0.0;
        let mut scale: f64 = 1.0;
        for p in &regular_points {
            max_witness = max_witness.max(kks_degeneracy_witness(p, &v.h, v.cfg)?);
            scale = scale.max(p.x.frobenius_norm() * v.h.max_abs_entry() * v.cfg.c());
        }
        let tolerance = KKS_TOL * scale;
        let pass = max_witness < tolerance;
        if !pass {
            failures.push(format!("kks: witness {max_witness:.3e} exceeds {tolerance:.3e}"));
        }
        Some(KksSection {
            samples: regular_points.len(),
            max_witness,
            tolerance,
            pass,
        })
    } else {
        None
    };

    let betti = betti_section(v.h0.n(), orbit.orbit_size);
    let sl2 = if req.check_enabled("sl2") && is_sl2_standard(&v.h0) {
        let section = sl2_section(v.cfg, req.seed, req.samples);
        if !section.pass {
            failures.push("sl2: laboratory checks failed".into());
        }
        Some(section)
    } else {
        None
    };

    Ok(Report {
        request: req.clone(),
        orbit: OrbitSection {
            points: orbit.points.clone(),
            orbit_size: orbit.orbit_size,
            stabilizer_size: orbit.stabilizer_size,
            weyl_order: crate::weyl::factorial(v.h0.n()),
        },
        critical_values: gp.critical_values.clone(),
        general_position: GeneralPositionSection {
            is_general_position: gp.is_general_position,
            min_pairwise_gap: gp.min_pairwise_gap,
            offending_pair: gp.offending_pair,
        },
        hessians,
        symplectic,
        kks_witness,
        betti,
        sl2,
        failures,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransportSummary {
    #[serde(with = "crate::serial::complex")]
    pub from: Complex64,
    #[serde(with = "crate::serial::complex")]
    pub to: Complex64,
    pub samples: usize,
    pub completed: usize,
    pub step: f64,
    pub epsilon: f64,
    /// `max |f(x_final) - to|` over completed samples.
    pub max_target_error: f64,
    pub max_f_drift: f64,
    pub max_charpoly_drift: f64,
    pub aborted: Vec<String>,
    pub pass: bool,
}

/// Samples `samples` points on `f^{-1}(from)` and carries each to
/// `f^{-1}(to)`. A segment too close to a critical value is an input error;
/// an aborted flow is recorded in the summary and fails it.
pub fn run_transport(
    req: &AnalysisRequest,
    from: Complex64,
    to: Complex64,
    samples: usize,
) -> Result<(Vec<TrajectoryRecord>, TransportSummary)> {
    let v = req.validate()?;
    if samples == 0 || samples > MAX_SAMPLES {
        return Err(Error::InvalidInput(format!(
            "samples must lie in 1..={MAX_SAMPLES}, got {samples}"
        )));
    }
    if !(from.re.is_finite() && from.im.is_finite() && to.re.is_finite() && to.im.is_finite()) {
        return Err(Error::InvalidInput("transport endpoints must be finite".into()));
    }
    let orbit = weyl_orbit(&v.h0, DEDUP_TOL)?;
    if orbit_complex_dim(&v.h0) == 0 {
        return Err(Error::InvalidInput("the orbit of H0 = 0 is a point; nothing to transport".into()));
    }
    let flow = req.flow.apply(FlowConfig::for_orbit(&orbit));
    let transport = Transport::new(&v.h, &v.h0, v.cfg, flow)?;
    transport.check_segment(from, to)?;
    let start = transport.sample_fibre(from, samples, req.seed)?;
    let mut records = Vec::new();
    let mut summary = TransportSummary {
        from,
        to,
        samples,
        completed: 0,
        step: flow.step,
        epsilon: flow.epsilon,
        max_target_error: 0.0,
        max_f_drift: 0.0,
        max_charpoly_drift: 0.0,
        aborted: Vec::new(),
        pass: true,
    };
    for (k, x) in start.iter().enumerate() {
        let traj = match transport.transport_trajectories(std::slice::from_ref(x), from, to) {
            Ok(mut t) => {
                let traj = t.pop().expect("one sample in, one trajectory out");
                let last = traj.last().expect("nonempty trajectory");
                summary.completed += 1;
                summary.max_target_error = summary.max_target_error.max((last.f_value - to).norm());
                traj
            }
            Err(Error::FlowAborted { reason, partial }) => {
                summary.aborted.push(format!("sample {k}: {reason}"));
                partial
            }
            Err(e) => return Err(e),
        };
        for s in &traj {
            summary.max_f_drift = summary.max_f_drift.max(s.f_drift);
            summary.max_charpoly_drift = summary.max_charpoly_drift.max(s.charpoly_drift);
            records.push(TrajectoryRecord::from_state(k, s));
        }
    }
    summary.pass = summary.aborted.is_empty()
        && summary.max_target_error < flow.max_f_drift
        && summary.max_f_drift < flow.max_f_drift
        && summary.max_charpoly_drift < flow.max_charpoly_drift;
    Ok((records, summary))
}
