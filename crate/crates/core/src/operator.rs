//! Dense Hermitian operators of small dimension.
//!
//! Every value of [`HermitianOperator`] is Hermitian by construction: the
//! checked constructor rejects matrices whose anti-Hermitian part exceeds
//! [`tol::HERMITICITY`] (relative Frobenius norm) and symmetrizes the rest.
//! Spectral functions (trace norm, positive part, square roots, support
//! projectors) all go through [`HermitianOperator::eigendecompose`].
//!
//! Qubit operators additionally have the Bloch form `X = c·1 + r·σ`, see
//! [`BlochOperator`].

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector, SymmetricEigen, Vector3};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tol;

pub type C64 = Complex64;

/// Pauli matrix `σ_index` for `index` in `1..=3`.
pub fn pauli(index: usize) -> DMatrix<C64> {
    let z = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    match index {
        1 => DMatrix::from_row_slice(2, 2, &[z, one, one, z]),
        2 => DMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        3 => DMatrix::from_row_slice(2, 2, &[one, z, z, -one]),
        _ => panic!("Pauli index must be 1, 2 or 3, got {index}"),
    }
}

/// Sign class of a Hermitian operator's spectrum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    /// All eigenvalues ≥ 0 (the zero operator counts as positive).
    Positive,
    /// All eigenvalues ≤ 0.
    Negative,
    Indefinite,
}

impl Sign {
    /// Classifies a spectrum with extreme eigenvalues `min ≤ max`, allowing
    /// violations of [`tol::SIGN`] relative to the spectral norm.
    pub fn classify(min: f64, max: f64) -> Self {
        let slack = tol::SIGN * min.abs().max(max.abs());
        if min >= -slack {
            Sign::Positive
        } else if max <= slack {
            Sign::Negative
        } else {
            Sign::Indefinite
        }
    }

    pub fn is_definite(self) -> bool {
        self != Sign::Indefinite
    }

    /// `+1` for positive, `−1` for negative operators.
    pub fn factor(self) -> Option<f64> {
        match self {
            Sign::Positive => Some(1.0),
            Sign::Negative => Some(-1.0),
            Sign::Indefinite => None,
        }
    }
}

/// A Hermitian operator on a Hilbert space of dimension `1..=16`.
#[derive(Clone, PartialEq)]
pub struct HermitianOperator {
    m: DMatrix<C64>,
}

impl fmt::Debug for HermitianOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HermitianOperator{}", self.m)
    }
}

/// Eigenvalues sorted in descending order with matching orthonormal
/// eigenvectors stored as columns.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: DMatrix<C64>,
}

impl Spectrum {
    /// Largest absolute eigenvalue.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// Eigenvalues with `|λ|` at or below this value count as zero.
    pub fn rank_threshold(&self) -> f64 {
        tol::RANK * self.max_abs()
    }

    pub fn min(&self) -> f64 {
        *self.values.last().expect("spectrum of a dim >= 1 operator")
    }

    pub fn max(&self) -> f64 {
        self.values[0]
    }

    /// Rebuilds `Σ f(λ_i) |v_i⟩⟨v_i|`.
    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> HermitianOperator {
        let n = self.values.len();
        let mut out = DMatrix::<C64>::zeros(n, n);
        for (k, &lambda) in self.values.iter().enumerate() {
            let w = f(lambda);
            if w == 0.0 {
                continue;
            }
            let v = self.vectors.column(k);
            out += (v * v.adjoint()) * C64::new(w, 0.0);
        }
        HermitianOperator::from_raw(out)
    }
}

impl HermitianOperator {
    /// Checks squareness, dimension and Hermiticity, then symmetrizes.
    pub fn new(m: DMatrix<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::SizeMismatch(format!(
                "matrix is {}x{}, expected square",
                m.nrows(),
                m.ncols()
            )));
        }
        let dim = m.nrows();
        if dim == 0 || dim > tol::MAX_DIM {
            return Err(Error::UnsupportedDimension(dim));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Parse("matrix has non-finite entries".into()));
        }
        let norm = m.norm();
        let residual = (&m - m.adjoint()).norm();
        let relative = if norm > 0.0 { residual / norm } else { 0.0 };
        if relative > tol::HERMITICITY {
            return Err(Error::NonHermitianInput { residual: relative });
        }
        Ok(Self::from_raw(m))
    }

    /// Symmetrizes without checking. Used for products that are Hermitian
    /// up to rounding.
    pub(crate) fn from_raw(m: DMatrix<C64>) -> Self {
        let adj = m.adjoint();
        Self {
            m: (m + adj) * C64::new(0.5, 0.0),
        }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d = DVector::from_iterator(diag.len(), diag.iter().map(|&x| C64::new(x, 0.0)));
        Self {
            m: DMatrix::from_diagonal(&d),
        }
    }

    /// Real symmetric matrix from row-major entries.
    pub fn from_real_rows(dim: usize, rows: &[f64]) -> Result<Self> {
        let entries: Vec<C64> = rows.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::new(DMatrix::from_row_slice(dim, dim, &entries))
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            m: DMatrix::identity(dim, dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            m: DMatrix::zeros(dim, dim),
        }
    }

    /// Rank-one projector onto the normalized `v`.
    pub fn projector(v: &DVector<C64>) -> Self {
        let n = v.norm();
        let u = v / C64::new(n, 0.0);
        Self::from_raw(&u * u.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.m
    }

    pub fn trace(&self) -> f64 {
        self.m.trace().re
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.m.norm()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            m: &self.m * C64::new(s, 0.0),
        }
    }

    /// `Tr[self · other]`.
    pub fn trace_product(&self, other: &HermitianOperator) -> f64 {
        self.m
            .iter()
            .zip(other.m.transpose().iter())
            .map(|(a, b)| (a * b).re)
            .sum()
    }

    /// `M · self · M†`.
    pub fn conjugate_by(&self, m: &DMatrix<C64>) -> Self {
        Self::from_raw(m * &self.m * m.adjoint())
    }

    /// `self · inner · self`.
    pub fn sandwich(&self, inner: &HermitianOperator) -> Self {
        Self::from_raw(&self.m * &inner.m * &self.m)
    }

    /// Frobenius norm of `[self, other]`.
    pub fn commutator_norm(&self, other: &HermitianOperator) -> f64 {
        (&self.m * &other.m - &other.m * &self.m).norm()
    }

    pub fn commutes_with(&self, other: &HermitianOperator) -> bool {
        self.commutator_norm(other) <= tol::COMMUTE * self.frobenius_norm() * other.frobenius_norm()
    }

    /// Frobenius distance to `other`.
    pub fn distance(&self, other: &HermitianOperator) -> f64 {
        (&self.m - &other.m).norm()
    }

    /// Eigenvalues (descending) and orthonormal eigenvectors.
    pub fn eigendecompose(&self) -> Spectrum {
        let eig = SymmetricEigen::new(self.m.clone());
        let n = self.dim();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let mut vectors = DMatrix::<C64>::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            vectors.set_column(dst, &eig.eigenvectors.column(src));
        }
        Spectrum { values, vectors }
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.eigendecompose().values
    }

    /// `Tr|X|`, the sum of absolute eigenvalues.
    pub fn trace_norm(&self) -> f64 {
        self.eigendecompose().values.iter().map(|v| v.abs()).sum()
    }

    /// `X₊ = (X + |X|)/2`.
    pub fn positive_part(&self) -> Self {
        let s = self.eigendecompose();
        let thr = s.rank_threshold();
        s.map(|l| if l > thr { l } else { 0.0 })
    }

    /// `|X| = X₊ + (−X)₊`.
    pub fn abs(&self) -> Self {
        let s = self.eigendecompose();
        let thr = s.rank_threshold();
        s.map(|l| if l.abs() > thr { l.abs() } else { 0.0 })
    }

    /// Projector onto the span of eigenvectors with non-negligible eigenvalue.
    pub fn support_projector(&self) -> Self {
        let s = self.eigendecompose();
        let thr = s.rank_threshold();
        s.map(|l| if l.abs() > thr { 1.0 } else { 0.0 })
    }

    /// Projector onto the eigenvectors with positive eigenvalue.
    pub fn positive_support_projector(&self) -> Self {
        let s = self.eigendecompose();
        let thr = s.rank_threshold();
        s.map(|l| if l > thr { 1.0 } else { 0.0 })
    }

    /// Projector onto the eigenvectors with negative eigenvalue.
    pub fn negative_support_projector(&self) -> Self {
        let s = self.eigendecompose();
        let thr = s.rank_threshold();
        s.map(|l| if l < -thr { 1.0 } else { 0.0 })
    }

    fn psd_spectrum(&self) -> Result<Spectrum> {
        let s = self.eigendecompose();
        if s.min() < -tol::PSD {
            return Err(Error::NotPsd {
                min_eigenvalue: s.min(),
            });
        }
        Ok(s)
    }

    pub fn sign(&self) -> Sign {
        let s = self.eigendecompose();
        Sign::classify(s.min(), s.max())
    }

    pub fn check_psd(&self) -> Result<()> {
        self.psd_spectrum().map(|_| ())
    }

    /// Checks `0 ≤ X ≤ 1` within [`tol::PSD`].
    pub fn check_effect(&self) -> Result<()> {
        let s = self.psd_spectrum()?;
        if s.max() > 1.0 + tol::PSD {
            return Err(Error::NotSubIdentity {
                max_eigenvalue: s.max(),
            });
        }
        Ok(())
    }

    /// `√X` for positive semidefinite `X`; small negative eigenvalues are
    /// clamped to zero.
    pub fn sqrt(&self) -> Result<Self> {
        let s = self.psd_spectrum()?;
        Ok(s.map(|l| l.max(0.0).sqrt()))
    }

    /// `X^{-1/2}` on the support of `X`, zero on its kernel.
    pub fn pseudo_inverse_sqrt(&self) -> Result<Self> {
        let s = self.psd_spectrum()?;
        let thr = s.rank_threshold();
        Ok(s.map(|l| if l > thr { 1.0 / l.sqrt() } else { 0.0 }))
    }

    /// `1 − X`.
    pub fn complement(&self) -> Self {
        &Self::identity(self.dim()) - self
    }

    pub fn to_bloch(&self) -> Result<BlochOperator> {
        BlochOperator::from_operator(self)
    }
}

impl Add for &HermitianOperator {
    type Output = HermitianOperator;
    fn add(self, rhs: &HermitianOperator) -> HermitianOperator {
        HermitianOperator {
            m: &self.m + &rhs.m,
        }
    }
}

impl Add for HermitianOperator {
    type Output = HermitianOperator;
    fn add(self, rhs: HermitianOperator) -> HermitianOperator {
        HermitianOperator { m: self.m + rhs.m }
    }
}

impl Sub for &HermitianOperator {
    type Output = HermitianOperator;
    fn sub(self, rhs: &HermitianOperator) -> HermitianOperator {
        HermitianOperator {
            m: &self.m - &rhs.m,
        }
    }
}

impl Sub for HermitianOperator {
    type Output = HermitianOperator;
    fn sub(self, rhs: HermitianOperator) -> HermitianOperator {
        HermitianOperator { m: self.m - rhs.m }
    }
}

impl Neg for &HermitianOperator {
    type Output = HermitianOperator;
    fn neg(self) -> HermitianOperator {
        HermitianOperator { m: -&self.m }
    }
}

impl Neg for HermitianOperator {
    type Output = HermitianOperator;
    fn neg(self) -> HermitianOperator {
        HermitianOperator { m: -self.m }
    }
}

impl Mul<f64> for &HermitianOperator {
    type Output = HermitianOperator;
    fn mul(self, rhs: f64) -> HermitianOperator {
        self.scale(rhs)
    }
}

impl Mul<f64> for HermitianOperator {
    type Output = HermitianOperator;
    fn mul(self, rhs: f64) -> HermitianOperator {
        self.scale(rhs)
    }
}

/// Qubit Hermitian operator `c·1₂ + r·σ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochOperator {
    pub c: f64,
    pub r: Vector3<f64>,
}

impl BlochOperator {
    pub fn new(c: f64, r: [f64; 3]) -> Self {
        Self {
            c,
            r: Vector3::from(r),
        }
    }

    pub fn zero() -> Self {
        Self::new(0.0, [0.0; 3])
    }

    /// Density matrix `(1 + v·σ)/2`.
    pub fn state(v: [f64; 3]) -> Self {
        let r = Vector3::from(v) * 0.5;
        Self { c: 0.5, r }
    }

    pub fn from_operator(x: &HermitianOperator) -> Result<Self> {
        if x.dim() != 2 {
            return Err(Error::WrongDimension {
                expected: 2,
                found: x.dim(),
            });
        }
        let m = x.matrix();
        Ok(Self {
            c: 0.5 * (m[(0, 0)].re + m[(1, 1)].re),
            r: Vector3::new(
                m[(0, 1)].re,
                -m[(0, 1)].im,
                0.5 * (m[(0, 0)].re - m[(1, 1)].re),
            ),
        })
    }

    pub fn to_operator(&self) -> HermitianOperator {
        let (c, r) = (self.c, self.r);
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(c + r.z, 0.0),
                C64::new(r.x, -r.y),
                C64::new(r.x, r.y),
                C64::new(c - r.z, 0.0),
            ],
        );
        HermitianOperator { m }
    }

    /// `|r|`.
    pub fn radius(&self) -> f64 {
        self.r.norm()
    }

    /// `(c + |r|, c − |r|)`.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let r = self.radius();
        (self.c + r, self.c - r)
    }

    pub fn trace(&self) -> f64 {
        2.0 * self.c
    }

    /// Sum of absolute eigenvalues, `2·max(|c|, |r|)`.
    pub fn trace_norm(&self) -> f64 {
        2.0 * self.c.abs().max(self.radius())
    }

    pub fn sign(&self) -> Sign {
        let (hi, lo) = self.eigenvalues();
        Sign::classify(lo, hi)
    }

    pub fn is_zero(&self) -> bool {
        self.c == 0.0 && self.r == Vector3::zeros()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            c: self.c * s,
            r: self.r * s,
        }
    }
}

impl Add for BlochOperator {
    type Output = BlochOperator;
    fn add(self, rhs: BlochOperator) -> BlochOperator {
        BlochOperator {
            c: self.c + rhs.c,
            r: self.r + rhs.r,
        }
    }
}

impl Sub for BlochOperator {
    type Output = BlochOperator;
    fn sub(self, rhs: BlochOperator) -> BlochOperator {
        BlochOperator {
            c: self.c - rhs.c,
            r: self.r - rhs.r,
        }
    }
}

impl Neg for BlochOperator {
    type Output = BlochOperator;
    fn neg(self) -> BlochOperator {
        BlochOperator {
            c: -self.c,
            r: -self.r,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn hermitian_from(dim: usize, raw: &[f64]) -> HermitianOperator {
        let mut m = DMatrix::<C64>::zeros(dim, dim);
        let mut k = 0;
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = c(raw[k], raw[k + 1]);
                k += 2;
            }
        }
        HermitianOperator::from_raw(m)
    }

    fn psd_from(dim: usize, rank: usize, raw: &[f64]) -> HermitianOperator {
        let mut g = DMatrix::<C64>::zeros(dim, rank);
        let mut k = 0;
        for i in 0..dim {
            for j in 0..rank {
                g[(i, j)] = c(raw[k], raw[k + 1]);
                k += 2;
            }
        }
        HermitianOperator::from_raw(&g * g.adjoint())
    }

    #[test]
    fn eigenvalues_of_pauli_z_and_identity() {
        let z = HermitianOperator::new(pauli(3)).unwrap();
        let e = z.eigenvalues();
        assert_abs_diff_eq!(e[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e[1], -1.0, epsilon = 1e-14);
        let e = HermitianOperator::identity(3).eigenvalues();
        for v in e {
            assert_abs_diff_eq!(v, 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn eigenvalues_of_hadamard_like() {
        // (σ1 + σ3)/√2 has characteristic polynomial λ² − 1.
        let h = HermitianOperator::new((pauli(1) + pauli(3)) * c(1.0 / 2f64.sqrt(), 0.0)).unwrap();
        let s = h.eigendecompose();
        assert_abs_diff_eq!(s.values[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.values[1], -1.0, epsilon = 1e-14);
        let gram = s.vectors.adjoint() * &s.vectors;
        assert!((gram - DMatrix::<C64>::identity(2, 2)).norm() < 1e-12);
        let rebuilt = s.map(|l| l);
        assert!(rebuilt.distance(&h) < 1e-12);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m =
            DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(
            HermitianOperator::new(m),
            Err(Error::NonHermitianInput { .. })
        ));
        let m = DMatrix::<C64>::zeros(2, 3);
        assert!(matches!(
            HermitianOperator::new(m),
            Err(Error::SizeMismatch(_))
        ));
        let m = DMatrix::<C64>::identity(17, 17);
        assert!(matches!(
            HermitianOperator::new(m),
            Err(Error::UnsupportedDimension(17))
        ));
    }

    #[test]
    fn trace_norm_examples() {
        let z = HermitianOperator::new(pauli(3)).unwrap();
        assert_abs_diff_eq!(z.trace_norm(), 2.0, epsilon = 1e-14);
        assert_eq!(HermitianOperator::zeros(3).trace_norm(), 0.0);
        let d = HermitianOperator::from_real_diagonal(&[3.0, -1.0, 0.5]);
        assert_abs_diff_eq!(d.trace_norm(), 4.5, epsilon = 1e-14);
    }

    #[test]
    fn positive_part_examples() {
        let z = HermitianOperator::new(pauli(3)).unwrap();
        assert!(
            z.positive_part()
                .distance(&HermitianOperator::from_real_diagonal(&[1.0, 0.0]))
                < 1e-14
        );
        let p = HermitianOperator::from_real_diagonal(&[0.3, 0.7]);
        assert!(p.positive_part().distance(&p) < 1e-14);
        let d = HermitianOperator::from_real_diagonal(&[2.0, -3.0]);
        assert!(
            d.positive_part()
                .distance(&HermitianOperator::from_real_diagonal(&[2.0, 0.0]))
                < 1e-14
        );
    }

    #[test]
    fn pseudo_inverse_sqrt_examples() {
        let id = HermitianOperator::identity(3);
        assert!(id.pseudo_inverse_sqrt().unwrap().distance(&id) < 1e-14);
        let d = HermitianOperator::from_real_diagonal(&[4.0, 0.0]);
        let expected = HermitianOperator::from_real_diagonal(&[0.5, 0.0]);
        assert!(d.pseudo_inverse_sqrt().unwrap().distance(&expected) < 1e-14);
        let neg = HermitianOperator::from_real_diagonal(&[1.0, -0.1]);
        assert!(matches!(
            neg.pseudo_inverse_sqrt(),
            Err(Error::NotPsd { .. })
        ));
    }

    #[test]
    fn pseudo_inverse_sqrt_rank_two_in_dim_three() {
        let raw: Vec<f64> = (0..12)
            .map(|k| ((k * 7 + 3) % 11) as f64 / 5.0 - 1.0)
            .collect();
        let x = psd_from(3, 2, &raw);
        let w = x.pseudo_inverse_sqrt().unwrap();
        let proj = w.sandwich(&x);
        // Oracle: projector built from the two eigenvectors with largest eigenvalue.
        let s = x.eigendecompose();
        let mut p = DMatrix::<C64>::zeros(3, 3);
        for k in 0..2 {
            let v = s.vectors.column(k);
            p += v * v.adjoint();
        }
        assert!((proj.matrix() - &p).norm() < 1e-10);
        assert_abs_diff_eq!(proj.trace(), 2.0, epsilon = 1e-10);
    }

    #[test]
    fn support_projector_examples() {
        let d = HermitianOperator::from_real_diagonal(&[5.0, 0.0]);
        assert!(
            d.support_projector()
                .distance(&HermitianOperator::from_real_diagonal(&[1.0, 0.0]))
                < 1e-14
        );
        let f = HermitianOperator::from_real_diagonal(&[2.0, -1.0, 0.5]);
        assert!(
            f.support_projector()
                .distance(&HermitianOperator::identity(3))
                < 1e-14
        );
        let raw: Vec<f64> = (0..16)
            .map(|k| ((k * 5 + 1) % 9) as f64 / 4.0 - 1.0)
            .collect();
        let x = psd_from(4, 2, &raw);
        let p = x.support_projector();
        assert_abs_diff_eq!(p.trace(), 2.0, epsilon = 1e-10);
        assert!(p.sandwich(&HermitianOperator::identity(4)).distance(&p) < 1e-10);
    }

    #[test]
    fn sqrt_examples() {
        let p = HermitianOperator::from_real_diagonal(&[1.0, 0.0, 1.0]);
        assert!(p.sqrt().unwrap().distance(&p) < 1e-14);
        let four = HermitianOperator::identity(2).scale(4.0);
        assert!(
            four.sqrt()
                .unwrap()
                .distance(&HermitianOperator::identity(2).scale(2.0))
                < 1e-14
        );
        let neg = HermitianOperator::from_real_diagonal(&[-1.0]);
        assert!(matches!(neg.sqrt(), Err(Error::NotPsd { .. })));
    }

    #[test]
    fn bloch_examples() {
        let b = HermitianOperator::identity(2).to_bloch().unwrap();
        assert_eq!(b, BlochOperator::new(1.0, [0.0; 3]));
        let ket0 = HermitianOperator::from_real_diagonal(&[1.0, 0.0])
            .to_bloch()
            .unwrap();
        assert_eq!(ket0, BlochOperator::new(0.5, [0.0, 0.0, 0.5]));
        let x = HermitianOperator::new(pauli(1) + pauli(2) * c(2.0, 0.0)).unwrap();
        assert_eq!(
            x.to_bloch().unwrap(),
            BlochOperator::new(0.0, [1.0, 2.0, 0.0])
        );
        assert!(matches!(
            HermitianOperator::identity(3).to_bloch(),
            Err(Error::WrongDimension {
                expected: 2,
                found: 3
            })
        ));
    }

    #[test]
    fn bloch_eigenvalues() {
        let b = BlochOperator::new(0.3, [0.1, -0.4, 0.2]);
        let (hi, lo) = b.eigenvalues();
        let e = b.to_operator().eigenvalues();
        assert_abs_diff_eq!(hi, e[0], epsilon = 1e-14);
        assert_abs_diff_eq!(lo, e[1], epsilon = 1e-14);
        assert_abs_diff_eq!(
            b.trace_norm(),
            b.to_operator().trace_norm(),
            epsilon = 1e-14
        );
    }

    fn vec_op(v: [f64; 3]) -> DMatrix<C64> {
        pauli(1) * c(v[0], 0.0) + pauli(2) * c(v[1], 0.0) + pauli(3) * c(v[2], 0.0)
    }

    proptest! {
        #[test]
        fn trace_norm_splits_into_positive_parts(raw in prop::collection::vec(-1.0f64..1.0, 18)) {
            let x = hermitian_from(3, &raw);
            let split = x.positive_part().trace() + (-&x).positive_part().trace();
            prop_assert!((x.trace_norm() - split).abs() < 1e-10);
            prop_assert!(x.trace_norm() >= x.trace().abs() - 1e-12);
            let back = &x.positive_part() - &(-&x).positive_part();
            prop_assert!(back.distance(&x) < 1e-10);
        }

        #[test]
        fn sqrt_squares_back(raw in prop::collection::vec(-1.0f64..1.0, 32), rank in 1usize..=4) {
            let x = psd_from(4, rank, &raw[..8 * rank]);
            let r = x.sqrt().unwrap();
            prop_assert!(r.check_psd().is_ok());
            let sq = HermitianOperator::from_raw(r.matrix() * r.matrix());
            prop_assert!(sq.distance(&x) < 1e-10);
        }


        #[test]
        fn pauli_product_identity(a in prop::array::uniform3(-1.0f64..1.0), b in prop::array::uniform3(-1.0f64..1.0)) {
            let lhs = vec_op(a) * vec_op(b);
            let va = Vector3::from(a);
            let vb = Vector3::from(b);
            let cross = va.cross(&vb);
            let rhs = DMatrix::<C64>::identity(2, 2) * c(va.dot(&vb), 0.0)
                + vec_op([cross.x, cross.y, cross.z]) * c(0.0, 1.0);
            prop_assert!((lhs - rhs).norm() < 1e-12);
        }
    }
    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn bloch_round_trip(raw in prop::collection::vec(-2.0f64..2.0, 8)) {
            let x = hermitian_from(2, &raw);
            let back = x.to_bloch().unwrap().to_operator();
            prop_assert!(back.distance(&x) < 1e-12);
        }
    }
}
