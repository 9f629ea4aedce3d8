//! Dense linear-algebra helpers on small matrices: matrix exponential,
//! characteristic polynomials, numerical column spaces and realified Gram
//! matrices.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::liealg::{AlgebraElement, CartanElement};

/// Largest Frobenius norm accepted by [`expm`].
pub const EXP_NORM_LIMIT: f64 = 20.0;

/// `exp(A)` by scaling and squaring with a Pade approximant.
pub fn expm(a: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    let norm = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if !norm.is_finite() || norm > EXP_NORM_LIMIT {
        return Err(Error::ExponentialOverflow { norm });
    }
    Ok(a.clone().exp())
}

/// `Ad(exp(A)) X = exp(A) X exp(-A)`.
pub fn conjugate_by_exp(a: &AlgebraElement, x: &AlgebraElement) -> Result<AlgebraElement> {
    a.check_same_dim(x)?;
    let g = expm(a.matrix())?;
    let g_inv = expm(&(-a.matrix()))?;
    Ok(AlgebraElement::from_matrix_unchecked(&g * x.matrix() * g_inv))
}

/// Coefficients `[c_0, ..., c_{n-1}]` of the monic characteristic
/// polynomial `lambda^n + c_{n-1} lambda^{n-1} + ... + c_0`
/// (Faddeev-LeVerrier recursion).
pub fn charpoly(m: &DMatrix<Complex64>) -> Vec<Complex64> {
    let n = m.nrows();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
    let identity = DMatrix::<Complex64>::identity(n, n);
    let mut mk = DMatrix::<Complex64>::zeros(n, n);
    let mut prev = Complex64::new(1.0, 0.0);
    for k in 1..=n {
        mk = m * &mk + &identity * prev;
        let ck = -(m * &mk).trace() / k as f64;
        coeffs[n - k] = ck;
        prev = ck;
    }
    coeffs
}

/// Max deviation of characteristic polynomial coefficients of `x` from
/// those of the diagonal `h0`.
pub fn charpoly_drift(x: &AlgebraElement, h0: &CartanElement) -> f64 {
    let target = charpoly(h0.to_element().matrix());
    charpoly(x.matrix())
        .iter()
        .zip(&target)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
}

/// Singular values of a real matrix, sorted descending.
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut sv: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Orthonormal (Hermitian inner product) basis of the column space of `m`,
/// keeping singular directions above `rel_tol * sigma_max`.
pub fn column_space(m: &DMatrix<Complex64>, rel_tol: f64) -> Vec<DVector<Complex64>> {
    if m.is_empty() {
        return Vec::new();
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("requested U");
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    if smax == 0.0 {
        return Vec::new();
    }
    let mut keep: Vec<(usize, f64)> = svd
        .singular_values
        .iter()
        .copied()
        .enumerate()
        .filter(|&(_, s)| s > rel_tol * smax)
        .collect();
    keep.sort_by(|a, b| b.1.total_cmp(&a.1));
    keep.into_iter().map(|(k, _)| u.column(k).into_owned()).collect()
}

/// Vectorizes elements (row-major) as the columns of an `n^2 x k` matrix.
pub fn columns_of(elements: &[AlgebraElement], n: usize) -> DMatrix<Complex64> {
    let mut m = DMatrix::zeros(n * n, elements.len());
    for (col, e) in elements.iter().enumerate() {
        for (row, z) in e.to_row_major().into_iter().enumerate() {
            m[(row, col)] = z;
        }
    }
    m
}

pub fn element_from_vector(v: &DVector<Complex64>, n: usize) -> AlgebraElement {
    AlgebraElement::from_matrix_unchecked(DMatrix::from_fn(n, n, |i, j| v[i * n + j]))
}

/// Real rank of a family of elements viewed in `R^{2n^2}`.
pub fn real_rank(elements: &[AlgebraElement], rel_tol: f64) -> usize {
    if elements.is_empty() {
        return 0;
    }
    let n = elements[0].n();
    let cols: Vec<Vec<f64>> = elements.iter().map(AlgebraElement::realify).collect();
    let m = DMatrix::from_fn(2 * n * n, elements.len(), |r, c| cols[c][r]);
    let sv = singular_values(&m);
    let smax = sv.first().copied().unwrap_or(0.0);
    sv.iter().filter(|&&s| smax > 0.0 && s > rel_tol * smax).count()
}

/// Realified basis `{v_1, i v_1, v_2, i v_2, ...}` of a complex span.
pub fn realified_basis(vectors: &[AlgebraElement]) -> Vec<AlgebraElement> {
    vectors.iter().flat_map(|v| [v.clone(), v.times_i()]).collect()
}

/// Gram matrix `G[a][b] = form(u_a, u_b)` of a real-valued form.
pub fn gram<F>(basis: &[AlgebraElement], form: F) -> DMatrix<f64>
where
    F: Fn(&AlgebraElement, &AlgebraElement) -> f64,
{
    let k = basis.len();
    DMatrix::from_fn(k, k, |a, b| form(&basis[a], &basis[b]))
}

/// Orthonormal basis of `{u in C^m : sum_k a_k u_k = 0}`.
pub fn kernel_of_functional(a: &[Complex64]) -> Vec<DVector<Complex64>> {
    let m = a.len();
    let norm = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let mut basis: Vec<DVector<Complex64>> = Vec::with_capacity(m);
    if norm > 0.0 {
        // sum a_k u_k = <u, conj(a)> in the Hermitian inner product
        basis.push(DVector::from_iterator(m, a.iter().map(|z| z.conj() / norm)));
    }
    let mut kernel = Vec::with_capacity(m.saturating_sub(1));
    for k in 0..m {
        let mut v = DVector::<Complex64>::zeros(m);
        v[k] = Complex64::new(1.0, 0.0);
        // two passes of Gram-Schmidt for stability
        for _ in 0..2 {
            for b in &basis {
                let proj = b.dotc(&v);
                v -= b * proj;
            }
        }
        let len = v.norm();
        if len > 1e-6 {
            v /= Complex64::new(len, 0.0);
            basis.push(v.clone());
            kernel.push(v);
        }
        if kernel.len() + usize::from(norm > 0.0) == m {
            break;
        }
    }
    kernel
}

fn uniform_c<R: Rng>(rng: &mut R, scale: f64) -> Complex64 {
    Complex64::new(
        rng.random_range(-scale..=scale),
        rng.random_range(-scale..=scale),
    )
}

/// Random traceless element with entries uniform in the box of half-width `scale`.
pub fn random_element<R: Rng>(n: usize, scale: f64, rng: &mut R) -> AlgebraElement {
    let mut m = DMatrix::from_fn(n, n, |_, _| uniform_c(rng, scale));
    let shift = m.trace() / n as f64;
    for i in 0..n {
        m[(i, i)] -= shift;
    }
    AlgebraElement::from_matrix_unchecked(m)
}

/// Random element of su(n) (anti-Hermitian, traceless).
pub fn random_anti_hermitian<R: Rng>(n: usize, scale: f64, rng: &mut R) -> AlgebraElement {
    let r = random_element(n, scale, rng);
    let m = (r.matrix() - r.matrix().adjoint()) * Complex64::new(0.5, 0.0);
    AlgebraElement::from_matrix_unchecked(m)
}

/// Random real traceless diagonal whose entries are separated by more
/// than `min_gap`.
pub fn random_regular_real<R: Rng>(n: usize, min_gap: f64, rng: &mut R) -> CartanElement {
    loop {
        let mut d: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..=2.0)).collect();
        let mean = d.iter().sum::<f64>() / n as f64;
        d.iter_mut().for_each(|v| *v -= mean);
        let h = CartanElement::from_diag_unchecked(
            d.into_iter().map(|v| Complex64::new(v, 0.0)).collect(),
        );
        if crate::liealg::is_regular(&h, min_gap) {
            return h;
        }
    }
}

/// Random complex traceless diagonal with entries separated by `min_gap`.
pub fn random_regular_complex<R: Rng>(n: usize, min_gap: f64, rng: &mut R) -> CartanElement {
    loop {
        let mut d: Vec<Complex64> = (0..n).map(|_| uniform_c(rng, 2.0)).collect();
        let mean: Complex64 = d.iter().sum::<Complex64>() / n as f64;
        d.iter_mut().for_each(|v| *v -= mean);
        let h = CartanElement::from_diag_unchecked(d);
        if crate::liealg::is_regular(&h, min_gap) {
            return h;
        }
    }
}
