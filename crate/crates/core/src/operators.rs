//! Small dense complex matrices and state vectors.
//!
//! Everything in this crate lives in 3 (single qutrit) or 6 (qutrit ⊗ spin)
//! dimensions, so operators are plain dense matrices. Exponentials of
//! Hermitian generators go through an eigendecomposition, which keeps the
//! propagators unitary to machine precision.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
pub use num_complex::Complex64 as C64;

use crate::{Error, Result};

pub(crate) const I: C64 = C64 { re: 0.0, im: 1.0 };
pub(crate) const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub(crate) const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Dense square complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator(DMatrix<C64>);

/// Dense complex column vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket(DVector<C64>);

impl Operator {
    pub fn zeros(dim: usize) -> Self {
        Self(DMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    /// Builds an operator from row-major entries.
    pub fn from_rows(dim: usize, entries: &[C64]) -> Result<Self> {
        if dim < 2 || entries.len() != dim * dim {
            return Err(Error::InvalidArgument(format!(
                "expected {} entries for a {dim}x{dim} operator, got {}",
                dim * dim,
                entries.len()
            )));
        }
        Ok(Self(DMatrix::from_row_slice(dim, dim, entries)))
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        Self(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d: Vec<C64> = diag.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::from_diagonal(&d)
    }

    /// |a⟩⟨b|
    pub fn outer(a: &Ket, b: &Ket) -> Self {
        Self(&a.0 * b.0.adjoint())
    }

    /// Matrix unit |i⟩⟨j|.
    pub fn unit(dim: usize, i: usize, j: usize) -> Self {
        let mut m = DMatrix::zeros(dim, dim);
        m[(i, j)] = ONE;
        Self(m)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, value: C64) {
        self.0[(i, j)] = value;
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self(&self.0 * factor)
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn apply(&self, ket: &Ket) -> Ket {
        Ket(&self.0 * &ket.0)
    }

    /// ⟨a|A|b⟩
    pub fn matrix_element(&self, a: &Ket, b: &Ket) -> C64 {
        a.0.dotc(&(&self.0 * &b.0))
    }

    /// Commutator AB − BA.
    pub fn commutator(&self, other: &Self) -> Self {
        Self(&self.0 * &other.0 - &other.0 * &self.0)
    }

    /// Row-major copy of the entries.
    pub fn to_row_major(&self) -> Vec<C64> {
        let n = self.dim();
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                out.push(self.0[(i, j)]);
            }
        }
        out
    }

    /// Copies the sub-block with the given row/column indices.
    pub fn submatrix(&self, indices: &[usize]) -> Self {
        let n = indices.len();
        Self(DMatrix::from_fn(n, n, |i, j| {
            self.0[(indices[i], indices[j])]
        }))
    }

    /// Hermitian within `tol` relative to ‖A‖_F.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        let diff = (&self.0 - self.0.adjoint())
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt();
        diff <= tol * self.frobenius_norm().max(f64::MIN_POSITIVE)
            || diff == 0.0
    }

    /// ‖A†A − I‖_F ≤ tol.
    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() <= tol
    }

    pub fn unitarity_defect(&self) -> f64 {
        let n = self.dim();
        Operator(self.0.adjoint() * &self.0 - DMatrix::<C64>::identity(n, n)).frobenius_norm()
    }

    /// Largest eigenvalue magnitude of a Hermitian operator.
    pub fn spectral_radius_hermitian(&self) -> f64 {
        let h = self.hermitian_part();
        h.0.symmetric_eigen()
            .eigenvalues
            .iter()
            .fold(0.0, |m: f64, v| m.max(v.abs()))
    }

    /// Eigenvalues of a Hermitian operator in ascending order.
    pub fn eigenvalues_hermitian(&self) -> Vec<f64> {
        let mut values: Vec<f64> = self
            .hermitian_part()
            .0
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .collect();
        values.sort_by(f64::total_cmp);
        values
    }

    fn hermitian_part(&self) -> Self {
        Self((&self.0 + self.0.adjoint()) * C64::new(0.5, 0.0))
    }

    /// Kronecker product self ⊗ other.
    pub fn kron(&self, other: &Self) -> Self {
        Self(self.0.kronecker(&other.0))
    }
}

impl<'a> Mul<&'a Operator> for &'a Operator {
    type Output = Operator;
    fn mul(self, rhs: &'a Operator) -> Operator {
        Operator(&self.0 * &rhs.0)
    }
}

impl Mul for Operator {
    type Output = Operator;
    fn mul(self, rhs: Operator) -> Operator {
        Operator(self.0 * rhs.0)
    }
}

impl<'a> Add<&'a Operator> for &'a Operator {
    type Output = Operator;
    fn add(self, rhs: &'a Operator) -> Operator {
        Operator(&self.0 + &rhs.0)
    }
}

impl Add for Operator {
    type Output = Operator;
    fn add(self, rhs: Operator) -> Operator {
        Operator(self.0 + rhs.0)
    }
}

impl<'a> Sub<&'a Operator> for &'a Operator {
    type Output = Operator;
    fn sub(self, rhs: &'a Operator) -> Operator {
        Operator(&self.0 - &rhs.0)
    }
}

impl Sub for Operator {
    type Output = Operator;
    fn sub(self, rhs: Operator) -> Operator {
        Operator(self.0 - rhs.0)
    }
}

impl Neg for Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        Operator(-self.0)
    }
}

impl Ket {
    pub fn new(amplitudes: &[C64]) -> Self {
        Self(DVector::from_column_slice(amplitudes))
    }

    pub fn from_real(amplitudes: &[f64]) -> Self {
        Self(DVector::from_iterator(
            amplitudes.len(),
            amplitudes.iter().map(|&x| C64::new(x, 0.0)),
        ))
    }

    /// Computational basis vector |i⟩.
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = DVector::zeros(dim);
        v[i] = ONE;
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn amplitude(&self, i: usize) -> C64 {
        self.0[i]
    }

    pub fn amplitudes(&self) -> &[C64] {
        self.0.as_slice()
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &Ket) -> C64 {
        self.0.dotc(&other.0)
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self(&self.0 * factor)
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm() - 1.0).abs() <= tol
    }

    pub fn normalized(&self) -> Self {
        Self(&self.0 / C64::new(self.norm(), 0.0))
    }
}

impl Add for Ket {
    type Output = Ket;
    fn add(self, rhs: Ket) -> Ket {
        Ket(self.0 + rhs.0)
    }
}

impl Sub for Ket {
    type Output = Ket;
    fn sub(self, rhs: Ket) -> Ket {
        Ket(self.0 - rhs.0)
    }
}

/// Eigendecomposition of a Hermitian generator, reusable for many times t.
#[derive(Debug, Clone)]
pub struct SpectralPropagator {
    vectors: DMatrix<C64>,
    values: Vec<f64>,
}

impl SpectralPropagator {
    pub fn new(h: &Operator, hermiticity_tol: f64) -> Result<Self> {
        if !h.is_hermitian(hermiticity_tol) {
            return Err(Error::InvalidOperator(
                "generator is not Hermitian".to_string(),
            ));
        }
        let eig = h.hermitian_part().0.symmetric_eigen();
        Ok(Self {
            vectors: eig.eigenvectors,
            values: eig.eigenvalues.iter().copied().collect(),
        })
    }

    /// e^{−iHt}
    pub fn at(&self, t: f64) -> Result<Operator> {
        if !t.is_finite() {
            return Err(Error::InvalidArgument(format!("non-finite time {t}")));
        }
        let phases: Vec<C64> = self
            .values
            .iter()
            .map(|&lambda| C64::from_polar(1.0, -lambda * t))
            .collect();
        let d = DMatrix::from_diagonal(&DVector::from_column_slice(&phases));
        Ok(Operator(&self.vectors * d * self.vectors.adjoint()))
    }
}

/// e^{−iHt} for Hermitian `h`, via its eigendecomposition.
pub fn expm_hermitian(h: &Operator, t: f64) -> Result<Operator> {
    if !t.is_finite() {
        return Err(Error::InvalidArgument(format!("non-finite time {t}")));
    }
    SpectralPropagator::new(h, crate::Tolerances::default().hermiticity)?.at(t)
}

fn check_dims(a: &Operator, b: &Operator) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::InvalidArgument(format!(
            "dimension mismatch: {} vs {}",
            a.dim(),
            b.dim()
        )));
    }
    Ok(())
}

/// ‖A − B‖_F
pub fn frobenius_distance(a: &Operator, b: &Operator) -> Result<f64> {
    check_dims(a, b)?;
    Ok((a - b).frobenius_norm())
}

/// min_χ ‖A − e^{iχ}B‖_F, attained at χ = arg tr(B†A).
pub fn global_phase_distance(a: &Operator, b: &Operator) -> Result<f64> {
    check_dims(a, b)?;
    let overlap = (&b.adjoint() * a).trace();
    let chi = if overlap.norm() > 0.0 { overlap.arg() } else { 0.0 };
    Ok((a - &b.scale(C64::from_polar(1.0, chi))).frobenius_norm())
}

/// Wraps an angle into [0, 2π).
pub fn wrap_angle(x: f64) -> f64 {
    let r = x.rem_euclid(std::f64::consts::TAU);
    if r >= std::f64::consts::TAU {
        0.0
    } else {
        r
    }
}

/// Signed difference a − b wrapped into (−π, π].
pub fn angle_difference(a: f64, b: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let d = (a - b).rem_euclid(TAU);
    if d > PI {
        d - TAU
    } else {
        d
    }
}
