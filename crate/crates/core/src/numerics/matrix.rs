//! Dense square complex matrices indexed by basis labels.
//!
//! Truncated operators live on a finite label window. Row/column index `i`
//! corresponds to the basis label `i + label_offset`, so for the 2d model with
//! labels `m ∈ [−M, M]` the offset is `−M`.

use std::fmt;
use std::ops::{Index, IndexMut};

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::NumericsError;

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    label_offset: i64,
    entries: Vec<Complex64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix(dim={}, label_offset={})", self.dim, self.label_offset)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| {
                    let z = self[(i, j)];
                    format!("{:+.4e}{:+.4e}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl ComplexMatrix {
    pub fn zeros(dim: usize, label_offset: i64) -> Result<Self, NumericsError> {
        if dim == 0 {
            return Err(NumericsError::EmptyMatrix);
        }
        Ok(Self {
            dim,
            label_offset,
            entries: vec![Complex64::new(0.0, 0.0); dim * dim],
        })
    }

    pub fn identity(dim: usize, label_offset: i64) -> Result<Self, NumericsError> {
        let mut m = Self::zeros(dim, label_offset)?;
        for i in 0..dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        Ok(m)
    }

    /// Diagonal matrix with the given entries.
    pub fn from_diagonal(diag: &[Complex64], label_offset: i64) -> Result<Self, NumericsError> {
        let mut m = Self::zeros(diag.len(), label_offset)?;
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        Ok(m)
    }

    /// Builds a matrix from row-major entries; `entries.len()` must equal `dim²`.
    pub fn from_row_major(
        dim: usize,
        label_offset: i64,
        entries: Vec<Complex64>,
    ) -> Result<Self, NumericsError> {
        if dim == 0 {
            return Err(NumericsError::EmptyMatrix);
        }
        if entries.len() != dim * dim {
            return Err(NumericsError::EntryCount {
                dim,
                found: entries.len(),
            });
        }
        Ok(Self {
            dim,
            label_offset,
            entries,
        })
    }

    pub fn from_fn(
        dim: usize,
        label_offset: i64,
        mut f: impl FnMut(usize, usize) -> Complex64,
    ) -> Result<Self, NumericsError> {
        let mut m = Self::zeros(dim, label_offset)?;
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = f(i, j);
            }
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label_offset(&self) -> i64 {
        self.label_offset
    }

    /// Basis label attached to row/column `index`.
    pub fn label(&self, index: usize) -> i64 {
        index as i64 + self.label_offset
    }

    /// Row index of a basis label, if it falls inside the window.
    pub fn index_of(&self, label: i64) -> Option<usize> {
        let i = label - self.label_offset;
        (0..self.dim as i64).contains(&i).then_some(i as usize)
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.entries[i * self.dim..(i + 1) * self.dim]
    }

    fn check_compatible(&self, other: &Self) -> Result<(), NumericsError> {
        if self.dim != other.dim || self.label_offset != other.label_offset {
            return Err(NumericsError::DimMismatch {
                left: (self.dim, self.label_offset),
                right: (other.dim, other.label_offset),
            });
        }
        Ok(())
    }

    pub fn matmul(&self, other: &Self) -> Result<Self, NumericsError> {
        self.check_compatible(other)?;
        let n = self.dim;
        let mut out = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            let out_row = &mut out[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.entries[i * n + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let b_row = &other.entries[k * n..(k + 1) * n];
                for (o, b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        Ok(Self {
            dim: n,
            label_offset: self.label_offset,
            entries: out,
        })
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                entries[j * n + i] = self.entries[i * n + j].conj();
            }
        }
        Self {
            dim: n,
            label_offset: self.label_offset,
            entries,
        }
    }

    /// `AB − BA`.
    pub fn commutator(&self, other: &Self) -> Result<Self, NumericsError> {
        let ab = self.matmul(other)?;
        let ba = other.matmul(self)?;
        ab.sub(&ba)
    }

    pub fn add(&self, other: &Self) -> Result<Self, NumericsError> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, NumericsError> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(
        &self,
        other: &Self,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Self, NumericsError> {
        self.check_compatible(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(Self {
            dim: self.dim,
            label_offset: self.label_offset,
            entries,
        })
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            dim: self.dim,
            label_offset: self.label_offset,
            entries: self.entries.iter().map(|&z| z * c).collect(),
        }
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(Complex64::new(c, 0.0))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entry magnitude of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64, NumericsError> {
        Ok(self.sub(other)?.max_abs())
    }

    /// Frobenius norm of the central block, dropping `margin` rows and
    /// columns at each end of the label window.
    pub fn interior_norm(&self, margin: usize) -> Result<f64, NumericsError> {
        let range = self.interior_range(margin)?;
        let mut acc = 0.0;
        for i in range.clone() {
            for j in range.clone() {
                acc += self[(i, j)].norm_sqr();
            }
        }
        Ok(acc.sqrt())
    }

    /// Largest entry magnitude within the central block.
    pub fn interior_max_abs(&self, margin: usize) -> Result<f64, NumericsError> {
        let range = self.interior_range(margin)?;
        let mut acc: f64 = 0.0;
        for i in range.clone() {
            for j in range.clone() {
                acc = acc.max(self[(i, j)].norm());
            }
        }
        Ok(acc)
    }

    /// Index range kept by [`Self::interior_norm`].
    pub fn interior_range(&self, margin: usize) -> Result<std::ops::Range<usize>, NumericsError> {
        if 2 * margin >= self.dim {
            return Err(NumericsError::MarginTooLarge {
                margin,
                dim: self.dim,
            });
        }
        Ok(margin..self.dim - margin)
    }

    /// Largest distance `|i − j|` over entries with magnitude above `tol`.
    pub fn bandwidth(&self, tol: f64) -> usize {
        let n = self.dim;
        let mut width = 0;
        for i in 0..n {
            for j in 0..n {
                if self.entries[i * n + j].norm() > tol {
                    width = width.max(i.abs_diff(j));
                }
            }
        }
        width
    }

    /// Largest entry magnitude strictly outside the band `|i − j| ≤ width`.
    pub fn max_abs_outside_band(&self, width: usize) -> f64 {
        let n = self.dim;
        let mut acc: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i.abs_diff(j) > width {
                    acc = acc.max(self.entries[i * n + j].norm());
                }
            }
        }
        acc
    }

    /// `max |A − A†|` entrywise.
    pub fn self_adjoint_defect(&self) -> f64 {
        let n = self.dim;
        let mut acc: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                let d = self.entries[i * n + j] - self.entries[j * n + i].conj();
                acc = acc.max(d.norm());
            }
        }
        acc
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.dim).map(|i| self[(i, i)]).collect()
    }

    /// Eigenvalues of the Hermitian part `(A + A†)/2`, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let n = self.dim;
        let h = DMatrix::from_fn(n, n, |i, j| {
            (self.entries[i * n + j] + self.entries[j * n + i].conj()) * 0.5
        });
        let mut values: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
        values.sort_by(|a, b| a.total_cmp(b));
        values
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        assert!(i < self.dim && j < self.dim, "index ({i}, {j}) out of range");
        &self.entries[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        assert!(i < self.dim && j < self.dim, "index ({i}, {j}) out of range");
        &mut self.entries[i * self.dim + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn shift(dim: usize, offset: i64) -> ComplexMatrix {
        ComplexMatrix::from_fn(dim, offset, |i, j| {
            if j + 1 == i {
                c(1.0, 0.0)
            } else {
                c(0.0, 0.0)
            }
        })
        .unwrap()
    }

    fn labels_diag(dim: usize, offset: i64) -> ComplexMatrix {
        let d: Vec<_> = (0..dim).map(|i| c(i as f64 + offset as f64, 0.0)).collect();
        ComplexMatrix::from_diagonal(&d, offset).unwrap()
    }

    #[test]
    fn self_commutator_vanishes() {
        let a = ComplexMatrix::from_fn(4, 0, |i, j| c(i as f64 - 0.3 * j as f64, (i * j) as f64))
            .unwrap();
        assert_eq!(a.commutator(&a).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn label_diagonal_commutes_shift_to_itself() {
        // [diag(m), S]_{m+1,m} = ((m+1) − m)·1
        let d = labels_diag(7, -3);
        let s = shift(7, -3);
        let comm = d.commutator(&s).unwrap();
        assert_eq!(comm.sub(&s).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn adjoint_of_shift_is_subdiagonal() {
        let s = shift(5, 0);
        let sd = s.adjoint();
        for i in 0..5 {
            for j in 0..5 {
                let expect = if i + 1 == j { 1.0 } else { 0.0 };
                assert_eq!(sd[(i, j)], c(expect, 0.0));
            }
        }
    }

    #[test]
    fn interior_norm_examples() {
        let z = ComplexMatrix::zeros(6, 0).unwrap();
        assert_eq!(z.interior_norm(2).unwrap(), 0.0);
        let id = ComplexMatrix::identity(5, 0).unwrap();
        assert!((id.interior_norm(1).unwrap() - 3f64.sqrt()).abs() < 1e-15);
        let s = shift(5, 0);
        assert!((s.interior_norm(1).unwrap() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn interior_margin_too_large() {
        let id = ComplexMatrix::identity(5, 0).unwrap();
        assert!(matches!(
            id.interior_norm(3),
            Err(NumericsError::MarginTooLarge { .. })
        ));
        assert!(id.interior_norm(2).is_ok());
    }

    #[test]
    fn mismatched_dims_are_rejected() {
        let a = ComplexMatrix::identity(3, 0).unwrap();
        let b = ComplexMatrix::identity(4, 0).unwrap();
        let c_off = ComplexMatrix::identity(3, -1).unwrap();
        assert!(matches!(a.matmul(&b), Err(NumericsError::DimMismatch { .. })));
        assert!(matches!(a.commutator(&c_off), Err(NumericsError::DimMismatch { .. })));
    }

    #[test]
    fn empty_matrix_rejected() {
        assert!(matches!(ComplexMatrix::zeros(0, 0), Err(NumericsError::EmptyMatrix)));
        assert!(matches!(
            ComplexMatrix::from_row_major(2, 0, vec![c(0.0, 0.0); 3]),
            Err(NumericsError::EntryCount { .. })
        ));
    }

    #[test]
    fn labels_map_to_indices() {
        let m = ComplexMatrix::zeros(5, -2).unwrap();
        assert_eq!(m.label(0), -2);
        assert_eq!(m.index_of(2), Some(4));
        assert_eq!(m.index_of(3), None);
    }

    #[test]
    fn hermitian_spectrum_of_pauli_y() {
        let y = ComplexMatrix::from_row_major(2, 0, vec![c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)])
            .unwrap();
        let ev = y.hermitian_eigenvalues();
        assert!((ev[0] + 1.0).abs() < 1e-14 && (ev[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn bandwidth_of_tridiagonal() {
        let s = shift(6, 0);
        let t = s.add(&s.adjoint()).unwrap();
        assert_eq!(t.bandwidth(1e-14), 1);
        assert_eq!(t.max_abs_outside_band(1), 0.0);
        assert_eq!(t.max_abs_outside_band(0), 1.0);
    }

    fn matrix_strategy(dim: usize) -> impl Strategy<Value = ComplexMatrix> {
        proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim * dim).prop_map(move |v| {
            ComplexMatrix::from_row_major(dim, 0, v.into_iter().map(|(a, b)| c(a, b)).collect())
                .unwrap()
        })
    }

    fn triple() -> impl Strategy<Value = (ComplexMatrix, ComplexMatrix, ComplexMatrix)> {
        (1usize..=16).prop_flat_map(|d| (matrix_strategy(d), matrix_strategy(d), matrix_strategy(d)))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn adjoint_is_involutive((a, _, _) in triple()) {
            prop_assert_eq!(a.adjoint().adjoint(), a);
        }

        #[test]
        fn adjoint_reverses_products((a, b, _) in triple()) {
            let lhs = a.matmul(&b).unwrap().adjoint();
            let rhs = b.adjoint().matmul(&a.adjoint()).unwrap();
            prop_assert!(lhs.max_abs_diff(&rhs).unwrap() <= 1e-14 * a.dim() as f64);
        }

        #[test]
        fn commutator_is_antisymmetric((a, b, _) in triple()) {
            let sum = a.commutator(&b).unwrap().add(&b.commutator(&a).unwrap()).unwrap();
            prop_assert_eq!(sum.max_abs(), 0.0);
        }

        #[test]
        fn jacobi_identity((a, b, c3) in triple()) {
            let t1 = a.commutator(&b.commutator(&c3).unwrap()).unwrap();
            let t2 = b.commutator(&c3.commutator(&a).unwrap()).unwrap();
            let t3 = c3.commutator(&a.commutator(&b).unwrap()).unwrap();
            let sum = t1.add(&t2).unwrap().add(&t3).unwrap();
            prop_assert!(sum.max_abs() <= 1e-12 * (a.dim() * a.dim()) as f64);
        }
    }
}
