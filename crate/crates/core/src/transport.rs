//! Transport of regular fibres along the transversal field
//! `Z(x) = [x, [tau x, H]] / |[x,H]|^2`.
//!
//! Because `df_H(Z)` comes out as `-1` under the conventions of
//! [`crate::liealg`], the flow uses the normalized field `u / df_H(u)` with
//! `u = [x, [tau x, H]]`; both fields are exposed. The flow of
//! `e^{i theta} Z` moves `f_H` along the straight segment
//! `f(x_0) + t e^{i theta}`, which is what carries one regular fibre onto
//! another.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{AbortReason, Error, Result};
use crate::fibration::{height_of, random_regular_point, singular_tolerance, OrbitPoint};
use crate::liealg::{br, herm, tau, AlgebraElement, CartanElement, FormConfig};
use crate::linalg::{random_element, random_regular_real, singular_values};
use crate::weyl::{weyl_orbit, WeylOrbitRecord, DEDUP_TOL};

/// Smallest admissible safety radius.
pub const MIN_EPSILON: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowConfig {
    /// RK4 step size.
    pub step: f64,
    /// Safety radius around the singular points `W.H0`.
    pub epsilon: f64,
    pub max_f_drift: f64,
    pub max_charpoly_drift: f64,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self {
            step: 1e-3,
            epsilon: MIN_EPSILON,
            max_f_drift: 1e-6,
            max_charpoly_drift: 1e-6,
        }
    }
}

impl FlowConfig {
    /// Defaults with `epsilon` a quarter of the smallest distance between
    /// distinct orbit points, floored at [`MIN_EPSILON`].
    pub fn for_orbit(orbit: &WeylOrbitRecord) -> Self {
        let epsilon = orbit
            .min_point_separation()
            .map_or(MIN_EPSILON, |d| (0.25 * d).max(MIN_EPSILON));
        Self {
            epsilon,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !(positive(self.step)
            && positive(self.epsilon)
            && positive(self.max_f_drift)
            && positive(self.max_charpoly_drift))
        {
            return Err(Error::InvalidInput(format!(
                "flow configuration needs positive finite values, got {self:?}"
            )));
        }
        Ok(())
    }
}

/// One accepted step of a flow line.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    pub point: OrbitPoint,
    pub t: f64,
    pub theta: f64,
    pub f_value: Complex64,
    pub f_drift: f64,
    pub charpoly_drift: f64,
}

/// JSON-lines record of a trajectory step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub sample: usize,
    pub t: f64,
    pub theta: f64,
    /// Row-major entries as `[re, im]` pairs.
    pub point: Vec<[f64; 2]>,
    pub f_re: f64,
    pub f_im: f64,
    pub f_drift: f64,
    pub charpoly_drift: f64,
}

impl TrajectoryRecord {
    pub fn from_state(sample: usize, s: &FlowState) -> Self {
        Self {
            sample,
            t: s.t,
            theta: s.theta,
            point: s.point.x.to_row_major().iter().map(|z| [z.re, z.im]).collect(),
            f_re: s.f_value.re,
            f_im: s.f_value.im,
            f_drift: s.f_drift,
            charpoly_drift: s.charpoly_drift,
        }
    }
}

/// `[x, [tau x, H]]`.
fn numerator(x: &AlgebraElement, he: &AlgebraElement) -> AlgebraElement {
    br(x, &br(&tau(x), he))
}

fn raw_field(x: &AlgebraElement, h: &CartanElement, cfg: FormConfig) -> Result<AlgebraElement> {
    let he = h.to_element();
    let xh = br(x, &he);
    let norm_sq = herm(&xh, &xh, cfg).re;
    if xh.frobenius_norm() <= singular_tolerance(x, h) {
        return Err(Error::SingularPoint {
            norm: xh.frobenius_norm(),
        });
    }
    Ok(numerator(x, &he).scale_real(1.0 / norm_sq))
}

/// `Z(x) = [x,[tau x,H]] / |[x,H]|^2`, with `|.|` the `H_tau` norm.
pub fn z_field_raw(x: &OrbitPoint, h: &CartanElement, cfg: FormConfig) -> Result<AlgebraElement> {
    raw_field(&x.x, h, cfg)
}

fn normalized_field(x: &AlgebraElement, h: &CartanElement, cfg: FormConfig) -> Result<AlgebraElement> {
    let he = h.to_element();
    if br(x, &he).frobenius_norm() <= singular_tolerance(x, h) {
        return Err(Error::SingularPoint {
            norm: br(x, &he).frobenius_norm(),
        });
    }
    let u = numerator(x, &he);
    let df = height_of(&u, h, cfg);
    if df.norm() < 1e-14 {
        return Err(Error::SingularPoint { norm: df.norm() });
    }
    Ok(u.scale(df.inv()))
}

/// `u / df_H(u)` with `u = [x,[tau x,H]]`, so that `df_H(Z) = 1`.
pub fn z_field(x: &OrbitPoint, h: &CartanElement, cfg: FormConfig) -> Result<AlgebraElement> {
    normalized_field(&x.x, h, cfg)
}

/// Flow and fibre-transport context for one `(H, H0)` pair.
#[derive(Debug, Clone)]
pub struct Transport {
    pub h: CartanElement,
    pub h0: CartanElement,
    pub forms: FormConfig,
    pub flow: FlowConfig,
    singular_points: Vec<AlgebraElement>,
    critical_values: Vec<Complex64>,
}

impl Transport {
    pub fn new(h: &CartanElement, h0: &CartanElement, forms: FormConfig, flow: FlowConfig) -> Result<Self> {
        if h.n() != h0.n() {
            return Err(Error::DimensionMismatch {
                left: h.n(),
                right: h0.n(),
            });
        }
        flow.validate()?;
        let orbit = weyl_orbit(h0, DEDUP_TOL)?;
        let critical_values = orbit
            .points
            .iter()
            .map(|p| crate::weyl::pairing_value(h, p, forms))
            .collect();
        Ok(Self {
            h: h.clone(),
            h0: h0.clone(),
            forms,
            flow,
            singular_points: orbit.points.iter().map(CartanElement::to_element).collect(),
            critical_values,
        })
    }

    /// Context with [`FlowConfig::for_orbit`] defaults.
    pub fn with_defaults(h: &CartanElement, h0: &CartanElement, forms: FormConfig) -> Result<Self> {
        let flow = FlowConfig::for_orbit(&weyl_orbit(h0, DEDUP_TOL)?);
        Self::new(h, h0, forms, flow)
    }

    pub fn critical_values(&self) -> &[Complex64] {
        &self.critical_values
    }

    pub fn distance_to_singular_set(&self, x: &AlgebraElement) -> f64 {
        self.singular_points
            .iter()
            .map(|p| p.distance(x))
            .fold(f64::INFINITY, f64::min)
    }

    fn state(&self, x: AlgebraElement, t: f64, theta: f64, f_start: Complex64) -> FlowState {
        let point = OrbitPoint::measure(x, &self.h0);
        let f_value = height_of(&point.x, &self.h, self.forms);
        let f_drift = (f_value - (f_start + Complex64::from_polar(t, theta))).norm();
        let charpoly_drift = point.charpoly_drift;
        FlowState {
            point,
            t,
            theta,
            f_value,
            f_drift,
            charpoly_drift,
        }
    }

    fn check_state(&self, s: &FlowState) -> Option<AbortReason> {
        let distance = self.distance_to_singular_set(&s.point.x);
        if distance <= self.flow.epsilon {
            return Some(AbortReason::NearSingularity {
                distance,
                epsilon: self.flow.epsilon,
            });
        }
        if !(s.f_drift < self.flow.max_f_drift) {
            return Some(AbortReason::HeightDrift {
                drift: s.f_drift,
                budget: self.flow.max_f_drift,
            });
        }
        if !(s.charpoly_drift < self.flow.max_charpoly_drift) {
            return Some(AbortReason::OrbitDrift {
                drift: s.charpoly_drift,
                budget: self.flow.max_charpoly_drift,
            });
        }
        None
    }

    fn rk4_step(&self, x: &AlgebraElement, dt: f64, dir: Complex64) -> Result<AlgebraElement> {
        let field = |y: &AlgebraElement| normalized_field(y, &self.h, self.forms).map(|z| z.scale(dir));
        let k1 = field(x)?;
        let k2 = field(&(x + &k1.scale_real(0.5 * dt)))?;
        let k3 = field(&(x + &k2.scale_real(0.5 * dt)))?;
        let k4 = field(&(x + &k3.scale_real(dt)))?;
        let incr = &(&k1 + &k2.scale_real(2.0)) + &(&k3.scale_real(2.0) + &k4);
        Ok(x + &incr.scale_real(dt / 6.0))
    }

    /// Integrates `x' = e^{i theta} Z(x)` from `x0` up to time `t_final`
    /// with fixed-step RK4, checking the safety radius and both drift
    /// budgets after every step. Returns every accepted state, starting with
    /// `x0` at `t = 0`; on abort the partial trajectory travels inside
    /// [`Error::FlowAborted`].
    pub fn flow(&self, x0: &OrbitPoint, theta: f64, t_final: f64) -> Result<Vec<FlowState>> {
        if x0.n() != self.h.n() {
            return Err(Error::DimensionMismatch {
                left: x0.n(),
                right: self.h.n(),
            });
        }
        if !(t_final.is_finite() && t_final >= 0.0 && theta.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "flow needs finite theta and T >= 0, got theta = {theta}, T = {t_final}"
            )));
        }
        normalized_field(&x0.x, &self.h, self.forms)?;
        let f_start = height_of(&x0.x, &self.h, self.forms);
        let first = self.state(x0.x.clone(), 0.0, theta, f_start);
        let mut states = vec![first];
        if let Some(reason) = self.check_state(&states[0]) {
            return Err(Error::FlowAborted {
                reason,
                partial: states,
            });
        }
        let steps = (t_final / self.flow.step).ceil() as usize;
        if steps == 0 {
            return Ok(states);
        }
        let dt = t_final / steps as f64;
        let dir = Complex64::from_polar(1.0, theta);
        let mut x = x0.x.clone();
        for k in 1..=steps {
            x = match self.rk4_step(&x, dt, dir) {
                Ok(next) => next,
                Err(_) => {
                    return Err(Error::FlowAborted {
                        reason: AbortReason::FieldUndefined,
                        partial: states,
                    })
                }
            };
            let s = self.state(x.clone(), k as f64 * dt, theta, f_start);
            if let Some(reason) = self.check_state(&s) {
                return Err(Error::FlowAborted {
                    reason,
                    partial: states,
                });
            }
            states.push(s);
        }
        Ok(states)
    }

    /// Fails when the segment `[from, to]` comes within `epsilon` of a
    /// critical value.
    pub fn check_segment(&self, from: Complex64, to: Complex64) -> Result<()> {
        let margin = self.flow.epsilon;
        for &cv in &self.critical_values {
            let distance = point_segment_distance(cv, from, to);
            if distance <= margin {
                return Err(Error::SegmentNearCritical {
                    from,
                    to,
                    critical_value: cv,
                    distance,
                    margin,
                });
            }
        }
        Ok(())
    }

    /// Full trajectories carrying each sample from `f = from` to `f = to`.
    pub fn transport_trajectories(
        &self,
        samples: &[OrbitPoint],
        from: Complex64,
        to: Complex64,
    ) -> Result<Vec<Vec<FlowState>>> {
        self.check_segment(from, to)?;
        let delta = to - from;
        let (t_final, theta) = (delta.norm(), if delta.norm() > 0.0 { delta.arg() } else { 0.0 });
        samples
            .iter()
            .map(|x| {
                let f = height_of(&x.x, &self.h, self.forms);
                if (f - from).norm() >= self.flow.max_f_drift {
                    return Err(Error::InvalidInput(format!(
                        "sample has f = {f}, not on the fibre over {from}"
                    )));
                }
                let traj = self.flow(x, theta, t_final)?;
                let last = traj.last().expect("flow returns the initial state");
                let miss = (last.f_value - to).norm();
                if !(miss < self.flow.max_f_drift) {
                    return Err(Error::FlowAborted {
                        reason: AbortReason::HeightDrift {
                            drift: miss,
                            budget: self.flow.max_f_drift,
                        },
                        partial: traj,
                    });
                }
                Ok(traj)
            })
            .collect()
    }

    /// Carries points of `f^{-1}(from)` to `f^{-1}(to)` along the segment.
    pub fn transport_fibre(
        &self,
        samples: &[OrbitPoint],
        from: Complex64,
        to: Complex64,
    ) -> Result<Vec<OrbitPoint>> {
        Ok(self
            .transport_trajectories(samples, from, to)?
            .into_iter()
            .map(|mut traj| traj.pop().expect("nonempty trajectory").point)
            .collect())
    }

    /// Random points on `f^{-1}(value)`: random orbit points carried to the
    /// fibre by the flow. Candidates whose segment or flow fails are skipped.
    pub fn sample_fibre(&self, value: Complex64, count: usize, seed: u64) -> Result<Vec<OrbitPoint>> {
        self.check_segment(value, value)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(count);
        let mut attempts = 0;
        while out.len() < count {
            attempts += 1;
            if attempts > 50 * count.max(1) {
                return Err(Error::InvalidInput(format!(
                    "could not sample {count} points on the fibre over {value}"
                )));
            }
            let Some(x) = random_regular_point(&self.h0, &self.h, 1e-2, &mut rng) else {
                continue;
            };
            if self.distance_to_singular_set(&x.x) <= self.flow.epsilon {
                continue;
            }
            let f = height_of(&x.x, &self.h, self.forms);
            if let Ok(mut pts) = self.transport_fibre(std::slice::from_ref(&x), f, value) {
                out.push(pts.pop().expect("one sample in, one out"));
            }
        }
        Ok(out)
    }
}

fn point_segment_distance(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let len_sq = ab.norm_sqr();
    if len_sq == 0.0 {
        return (p - a).norm();
    }
    let s = ((p - a) * ab.conj()).re / len_sq;
    (p - (a + ab * s.clamp(0.0, 1.0))).norm()
}

/// Sampled estimate of the bracket constant `M` with
/// `|[X,Y]| <= M |X| |Y|` (Frobenius norm).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BracketBoundEstimate {
    pub m: f64,
    pub trials: usize,
}

impl BracketBoundEstimate {
    /// `2M(|ad H| + M|H|) |x| / |[x,H]|^2`, the bound on `|dZ_x|`.
    pub fn bound_at(&self, x: &AlgebraElement, h: &CartanElement) -> f64 {
        let ad_norm = ad_operator_norm(h);
        let h_norm = h.to_element().frobenius_norm();
        let xh = br(x, &h.to_element()).frobenius_norm();
        2.0 * self.m * (ad_norm + self.m * h_norm) * x.frobenius_norm() / (xh * xh)
    }
}

/// Operator norm of `ad(H)` for diagonal `H`: `max |H_i - H_j|`.
pub fn ad_operator_norm(h: &CartanElement) -> f64 {
    let d = h.diag();
    let mut best: f64 = 0.0;
    for a in d {
        for b in d {
            best = best.max((a - b).norm());
        }
    }
    best
}

/// `max |[X,Y]| / (|X| |Y|)` over random pairs in sl(n).
pub fn estimate_bracket_constant(n: usize, trials: usize, seed: u64) -> Result<BracketBoundEstimate> {
    if n < 2 {
        return Err(Error::InvalidDimension(n));
    }
    if trials == 0 {
        return Err(Error::InvalidInput("need at least one trial".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m: f64 = 0.0;
    for _ in 0..trials {
        let x = random_element(n, 1.0, &mut rng);
        let y = random_element(n, 1.0, &mut rng);
        let denom = x.frobenius_norm() * y.frobenius_norm();
        if denom > 0.0 {
            m = m.max(br(&x, &y).frobenius_norm() / denom);
        }
    }
    Ok(BracketBoundEstimate { m, trials })
}

/// Orthonormal real basis of sl(n) (Frobenius inner product).
fn real_orthonormal_basis(n: usize) -> Vec<AlgebraElement> {
    let mut basis = Vec::with_capacity(2 * (n * n - 1));
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let e = AlgebraElement::elementary(n, i, j);
                basis.push(e.times_i());
                basis.push(e);
            }
        }
    }
    // diag(1,...,1,-k,0,...)/sqrt(k(k+1)), k = 1..n-1
    for k in 1..n {
        let norm = ((k * (k + 1)) as f64).sqrt();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..k {
            m[(i, i)] = Complex64::new(1.0 / norm, 0.0);
        }
        m[(k, k)] = Complex64::new(-(k as f64) / norm, 0.0);
        let d = AlgebraElement::from_matrix_unchecked(m);
        basis.push(d.times_i());
        basis.push(d);
    }
    basis
}

/// Operator norm of the real Jacobian of the raw field at `x`, by central
/// differences with step `fd_step` (Frobenius norm, `c = 1`).
pub fn z_jacobian_norm(x: &AlgebraElement, h: &CartanElement, fd_step: f64) -> Result<f64> {
    let unit = FormConfig::default();
    let basis = real_orthonormal_basis(x.n());
    let rows = 2 * x.n() * x.n();
    let mut jac = DMatrix::<f64>::zeros(rows, basis.len());
    for (col, e) in basis.iter().enumerate() {
        let plus = raw_field(&(x + &e.scale_real(fd_step)), h, unit)?;
        let minus = raw_field(&(x - &e.scale_real(fd_step)), h, unit)?;
        let diff = (&plus - &minus).scale_real(0.5 / fd_step).realify();
        for (row, v) in diff.into_iter().enumerate() {
            jac[(row, col)] = v;
        }
    }
    Ok(singular_values(&jac).first().copied().unwrap_or(0.0))
}

/// Numeric Jacobian norm next to the analytic bound at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JacobianSample {
    pub numeric: f64,
    pub bound: f64,
}

/// Compares `|dZ_x|` with [`BracketBoundEstimate::bound_at`] at `count`
/// random points of `sl(n)` off the Cartan subalgebra, for a random
/// regular real `H`.
pub fn check_jacobian_bound(
    estimate: &BracketBoundEstimate,
    n: usize,
    count: usize,
    seed: u64,
    fd_step: f64,
) -> Result<Vec<JacobianSample>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = random_regular_real(n, 0.1, &mut rng);
    let he = h.to_element();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let x = random_element(n, rng.random_range(0.5..2.0), &mut rng);
        if br(&x, &he).frobenius_norm() < 0.1 {
            continue;
        }
        out.push(JacobianSample {
            numeric: z_jacobian_norm(&x, &h, fd_step)?,
            bound: estimate.bound_at(&x, &h),
        });
    }
    Ok(out)
}
