//! Matrix realization of sl(n,C).
//!
//! Elements are traceless complex n x n matrices. The module carries the
//! bilinear trace form `<X,Y> = c tr(XY)`, the Cartan-Killing form computed
//! from explicit adjoint matrices, the conjugation `tau(Z) = -conj(Z)^T`
//! fixing su(n), the Hermitian form `H_tau(X,Y) = -<X, tau Y>` and its
//! imaginary part `Omega`, together with the roots `alpha_ij` of the
//! diagonal Cartan subalgebra.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Default structural tolerance (scaled by `1 + max|entry|`).
pub const STRUCTURAL_TOL: f64 = 1e-9;
/// Default relative threshold for rank and singular-value decisions.
pub const RANK_TOL: f64 = 1e-8;

fn max_abs<'a>(values: impl IntoIterator<Item = &'a Complex64>) -> f64 {
    values.into_iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// A traceless complex n x n matrix, n >= 2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "Vec<Vec<crate::serial::C64>>",
    into = "Vec<Vec<crate::serial::C64>>"
)]
pub struct AlgebraElement {
    m: DMatrix<Complex64>,
}

impl AlgebraElement {
    /// Wraps a matrix after checking squareness, `n >= 2` and
    /// `|tr| <= 1e-12 (1 + max|entry|)`.
    pub fn from_matrix(m: DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        if m.nrows() < 2 {
            return Err(Error::InvalidDimension(m.nrows()));
        }
        let trace = m.trace();
        if trace.norm() > 1e-12 * (1.0 + max_abs(m.iter())) {
            return Err(Error::NotTraceless { trace });
        }
        Ok(Self { m })
    }

    /// Skips the trace check; used for results of operations that are
    /// traceless by construction (brackets, conjugations, sums).
    pub(crate) fn from_matrix_unchecked(m: DMatrix<Complex64>) -> Self {
        debug_assert!(m.nrows() == m.ncols());
        Self { m }
    }

    /// Builds an element from row-major rows.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::NotSquare {
                rows: n,
                cols: rows.first().map_or(0, Vec::len),
            });
        }
        Self::from_matrix(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    /// Real 2x2 convenience constructor `(a, b; c, -a)`.
    pub fn sl2(a: Complex64, b: Complex64, c: Complex64) -> Self {
        Self::from_matrix_unchecked(DMatrix::from_row_slice(2, 2, &[a, b, c, -a]))
    }

    pub fn zeros(n: usize) -> Self {
        Self::from_matrix_unchecked(DMatrix::zeros(n, n))
    }

    /// The elementary matrix `E_ij` (0-based indices, `i != j`).
    pub fn elementary(n: usize, i: usize, j: usize) -> Self {
        assert!(i != j && i < n && j < n, "E_ij needs distinct in-range indices");
        let mut m = DMatrix::zeros(n, n);
        m[(i, j)] = ONE;
        Self::from_matrix_unchecked(m)
    }

    pub fn n(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.m
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.m[(i, j)]
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.n()).map(|i| self.m[(i, i)]).collect()
    }

    pub fn max_abs_entry(&self) -> f64 {
        max_abs(self.m.iter())
    }

    /// Frobenius norm, which is the `H_tau` norm for `c = 1`.
    pub fn frobenius_norm(&self) -> f64 {
        self.m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::from_matrix_unchecked(self.m.map(|z| z * s))
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self::from_matrix_unchecked(self.m.map(|z| z * s))
    }

    /// Multiplication by the imaginary unit (the complex structure J).
    pub fn times_i(&self) -> Self {
        self.scale(Complex64::i())
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.max_abs_entry() <= tol
    }

    /// Distance in the Frobenius norm.
    pub fn distance(&self, other: &Self) -> f64 {
        (self - other).frobenius_norm()
    }

    /// Row-major flattening.
    pub fn to_row_major(&self) -> Vec<Complex64> {
        let n = self.n();
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| self.m[(i, j)])
            .collect()
    }

    /// Real coordinates `(re, im)` of the row-major entries, length `2 n^2`.
    pub fn realify(&self) -> Vec<f64> {
        self.to_row_major()
            .into_iter()
            .flat_map(|z| [z.re, z.im])
            .collect()
    }

    pub(crate) fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.n() != other.n() {
            return Err(Error::DimensionMismatch {
                left: self.n(),
                right: other.n(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.n();
        write!(f, "[")?;
        for i in 0..n {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..n {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.m[(i, j)])?;
            }
        }
        write!(f, "]")
    }
}

impl Add for &AlgebraElement {
    type Output = AlgebraElement;
    fn add(self, rhs: &AlgebraElement) -> AlgebraElement {
        assert_eq!(self.n(), rhs.n(), "dimension mismatch in addition");
        AlgebraElement::from_matrix_unchecked(&self.m + &rhs.m)
    }
}

impl Add for AlgebraElement {
    type Output = AlgebraElement;
    fn add(self, rhs: AlgebraElement) -> AlgebraElement {
        &self + &rhs
    }
}

impl Sub for &AlgebraElement {
    type Output = AlgebraElement;
    fn sub(self, rhs: &AlgebraElement) -> AlgebraElement {
        assert_eq!(self.n(), rhs.n(), "dimension mismatch in subtraction");
        AlgebraElement::from_matrix_unchecked(&self.m - &rhs.m)
    }
}

impl Sub for AlgebraElement {
    type Output = AlgebraElement;
    fn sub(self, rhs: AlgebraElement) -> AlgebraElement {
        &self - &rhs
    }
}

impl Neg for &AlgebraElement {
    type Output = AlgebraElement;
    fn neg(self) -> AlgebraElement {
        AlgebraElement::from_matrix_unchecked(-&self.m)
    }
}

impl Mul<&AlgebraElement> for Complex64 {
    type Output = AlgebraElement;
    fn mul(self, rhs: &AlgebraElement) -> AlgebraElement {
        rhs.scale(self)
    }
}

impl Mul<&AlgebraElement> for f64 {
    type Output = AlgebraElement;
    fn mul(self, rhs: &AlgebraElement) -> AlgebraElement {
        rhs.scale_real(self)
    }
}

/// A traceless diagonal, stored as its n entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<crate::serial::C64>", into = "Vec<crate::serial::C64>")]
pub struct CartanElement {
    diag: Vec<Complex64>,
}

impl CartanElement {
    /// Checks `n >= 2` and `|sum| <= 1e-12 (1 + max|entry|)`.
    pub fn new(diag: Vec<Complex64>) -> Result<Self> {
        if diag.len() < 2 {
            return Err(Error::InvalidDimension(diag.len()));
        }
        let trace: Complex64 = diag.iter().sum();
        if trace.norm() > 1e-12 * (1.0 + max_abs(diag.iter())) {
            return Err(Error::NotTraceless { trace });
        }
        Ok(Self { diag })
    }

    pub fn from_reals(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub(crate) fn from_diag_unchecked(diag: Vec<Complex64>) -> Self {
        Self { diag }
    }

    pub fn zero(n: usize) -> Self {
        Self { diag: vec![ZERO; n] }
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[Complex64] {
        &self.diag
    }

    pub fn get(&self, i: usize) -> Complex64 {
        self.diag[i]
    }

    /// Membership in h_R: all entries real within `tol`.
    pub fn is_real(&self, tol: f64) -> bool {
        self.diag.iter().all(|z| z.im.abs() <= tol)
    }

    pub fn max_abs_entry(&self) -> f64 {
        max_abs(self.diag.iter())
    }

    pub fn to_element(&self) -> AlgebraElement {
        AlgebraElement::from_matrix_unchecked(DMatrix::from_diagonal(
            &nalgebra::DVector::from_vec(self.diag.clone()),
        ))
    }

    /// Entrywise max distance.
    pub fn max_distance(&self, other: &Self) -> f64 {
        self.diag
            .iter()
            .zip(&other.diag)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Applies `w`: the result has entry `diag[w(i)]` at position `i`.
    pub fn permuted(&self, mapping: &[usize]) -> Self {
        Self {
            diag: mapping.iter().map(|&k| self.diag[k]).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self {
            diag: self.diag.iter().map(|z| z * s).collect(),
        }
    }
}

impl fmt::Display for CartanElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "diag(")?;
        for (k, z) in self.diag.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", crate::serial::format_complex(*z))?;
        }
        write!(f, ")")
    }
}

/// The root `alpha_ij(diag(a)) = a_i - a_j` with root vector `E_ij`.
/// Indices are 0-based; `Display` prints them 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Root {
    pub i: usize,
    pub j: usize,
}

impl Root {
    pub fn new(i: usize, j: usize) -> Self {
        assert!(i != j, "a root needs distinct indices");
        Self { i, j }
    }

    pub fn evaluate(&self, h: &CartanElement) -> Complex64 {
        h.get(self.i) - h.get(self.j)
    }

    pub fn root_vector(&self, n: usize) -> AlgebraElement {
        AlgebraElement::elementary(n, self.i, self.j)
    }

    pub fn negative(&self) -> Self {
        Self { i: self.j, j: self.i }
    }
}

impl fmt::Display for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "alpha_{}{}", self.i + 1, self.j + 1)
    }
}

/// Scaling constant of the trace form `<X,Y> = c tr(XY)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FormConfig {
    c: f64,
}

impl FormConfig {
    pub fn new(c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::InvalidFormConstant(c));
        }
        Ok(Self { c })
    }

    /// The Cartan-Killing normalization `c = 2n`.
    pub fn killing(n: usize) -> Self {
        Self { c: 2.0 * n as f64 }
    }

    pub fn c(&self) -> f64 {
        self.c
    }
}

impl Default for FormConfig {
    fn default() -> Self {
        Self { c: 1.0 }
    }
}

/// `[X, Y] = XY - YX`.
pub fn bracket(x: &AlgebraElement, y: &AlgebraElement) -> Result<AlgebraElement> {
    x.check_same_dim(y)?;
    Ok(AlgebraElement::from_matrix_unchecked(
        &x.m * &y.m - &y.m * &x.m,
    ))
}

/// Bracket for operands already known to share a dimension.
pub(crate) fn br(x: &AlgebraElement, y: &AlgebraElement) -> AlgebraElement {
    AlgebraElement::from_matrix_unchecked(&x.m * &y.m - &y.m * &x.m)
}

fn tr_product(x: &AlgebraElement, y: &AlgebraElement) -> Complex64 {
    let n = x.n();
    let mut acc = ZERO;
    for i in 0..n {
        for j in 0..n {
            acc += x.m[(i, j)] * y.m[(j, i)];
        }
    }
    acc
}

/// `<X, Y> = c tr(XY)`.
pub fn trace_form(x: &AlgebraElement, y: &AlgebraElement, cfg: FormConfig) -> Result<Complex64> {
    x.check_same_dim(y)?;
    Ok(tr_product(x, y) * cfg.c)
}

pub(crate) fn pairing(x: &AlgebraElement, y: &AlgebraElement, cfg: FormConfig) -> Complex64 {
    tr_product(x, y) * cfg.c
}

/// Standard basis of sl(n): `E_ij` for `i != j` followed by
/// `E_kk - E_{k+1,k+1}`.
pub fn sl_basis(n: usize) -> Vec<AlgebraElement> {
    let mut basis: Vec<AlgebraElement> = roots(n).iter().map(|r| r.root_vector(n)).collect();
    for k in 0..n - 1 {
        let mut d = vec![ZERO; n];
        d[k] = ONE;
        d[k + 1] = -ONE;
        basis.push(CartanElement::from_diag_unchecked(d).to_element());
    }
    basis
}

/// Coordinates of a traceless matrix in `sl_basis(n)`.
fn sl_coordinates(x: &AlgebraElement) -> Vec<Complex64> {
    let n = x.n();
    let mut coords: Vec<Complex64> = roots(n).iter().map(|r| x.m[(r.i, r.j)]).collect();
    // d_1 = a_1, d_k = a_k - a_{k-1}  =>  a_k = d_1 + ... + d_k
    let mut partial = ZERO;
    for k in 0..n - 1 {
        partial += x.m[(k, k)];
        coords.push(partial);
    }
    coords
}

/// Matrix of `ad(X)` acting on sl(n) in the basis `sl_basis(n)`.
pub fn ad_matrix(x: &AlgebraElement) -> DMatrix<Complex64> {
    let basis = sl_basis(x.n());
    let dim = basis.len();
    let mut ad = DMatrix::zeros(dim, dim);
    for (col, b) in basis.iter().enumerate() {
        let image = sl_coordinates(&br(x, b));
        for (row, v) in image.into_iter().enumerate() {
            ad[(row, col)] = v;
        }
    }
    ad
}

/// The Cartan-Killing form `tr(ad X ad Y)`, from explicit adjoint matrices.
pub fn killing_via_ad(x: &AlgebraElement, y: &AlgebraElement) -> Result<Complex64> {
    x.check_same_dim(y)?;
    Ok((ad_matrix(x) * ad_matrix(y)).trace())
}

/// `tau(Z) = -conj(Z)^T`.
pub fn tau(z: &AlgebraElement) -> AlgebraElement {
    AlgebraElement::from_matrix_unchecked(-z.m.adjoint())
}

/// `H_tau(X, Y) = -<X, tau Y>`.
pub fn hermitian_form(x: &AlgebraElement, y: &AlgebraElement, cfg: FormConfig) -> Result<Complex64> {
    x.check_same_dim(y)?;
    Ok(-pairing(x, &tau(y), cfg))
}

pub(crate) fn herm(x: &AlgebraElement, y: &AlgebraElement, cfg: FormConfig) -> Complex64 {
    let mut acc = ZERO;
    for (a, b) in x.m.iter().zip(y.m.iter()) {
        acc += a * b.conj();
    }
    acc * cfg.c
}

/// Norm induced by `H_tau`.
pub fn herm_norm(x: &AlgebraElement, cfg: FormConfig) -> f64 {
    x.frobenius_norm() * cfg.c.sqrt()
}

/// `Omega = Im H_tau`.
pub fn omega(x: &AlgebraElement, y: &AlgebraElement, cfg: FormConfig) -> Result<f64> {
    Ok(hermitian_form(x, y, cfg)?.im)
}

/// True iff every root is nonzero on `h`, i.e. all pairwise differences of
/// the diagonal exceed `tol` in modulus.
pub fn is_regular(h: &CartanElement, tol: f64) -> bool {
    regularity_violation(h, tol).is_none()
}

/// First pair of (0-based) indices whose entries coincide within `tol`.
pub fn regularity_violation(h: &CartanElement, tol: f64) -> Option<(usize, usize)> {
    let n = h.n();
    (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .find(|&(i, j)| (h.get(i) - h.get(j)).norm() <= tol)
}

/// All `n(n-1)` roots `alpha_ij`, `i != j`, in row-major order.
pub fn roots(n: usize) -> Vec<Root> {
    (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| Root { i, j }))
        .collect()
}

/// Projection onto the sum of root spaces (zeroes the diagonal).
pub fn offdiag_projection(x: &AlgebraElement) -> AlgebraElement {
    let mut m = x.m.clone();
    for i in 0..x.n() {
        m[(i, i)] = ZERO;
    }
    AlgebraElement::from_matrix_unchecked(m)
}
