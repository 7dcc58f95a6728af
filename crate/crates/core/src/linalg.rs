//! Complex vector helpers shared by every module.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CVector = DVector<C64>;
pub type CMatrix = DMatrix<C64>;

pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `⟨u, v⟩ = Σ u_i · conj(v_i)`.
#[inline]
pub fn inner(u: &CVector, v: &CVector) -> C64 {
    v.dotc(u)
}

pub fn cvec(values: &[C64]) -> CVector {
    CVector::from_column_slice(values)
}

pub fn real_vec(values: &[f64]) -> CVector {
    CVector::from_iterator(values.len(), values.iter().map(|&x| C64::new(x, 0.0)))
}

pub fn basis(q: usize, i: usize) -> CVector {
    let mut e = CVector::zeros(q);
    e[i] = C64::new(1.0, 0.0);
    e
}

pub fn is_finite(v: &CVector) -> bool {
    v.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn max_abs(v: &CVector) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Symmetrized copy, `(M + M^*)/2`.
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Largest entry of `M - M^*` in modulus.
pub fn hermitian_defect(m: &CMatrix) -> f64 {
    (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Eigenvalues of a Hermitian matrix, sorted in decreasing order.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let eig = nalgebra::SymmetricEigen::new(hermitian_part(m));
    let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    values.sort_by(|a, b| b.total_cmp(a));
    values
}

pub fn smallest_singular_value(m: &CMatrix) -> f64 {
    if m.nrows() == 0 {
        return f64::INFINITY;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// A unitary matrix sending `e_1` to the unit vector `a`.
pub fn unitary_from_e1(a: &CVector) -> CMatrix {
    let q = a.len();
    let e1 = basis(q, 0);
    let theta = a[0].arg();
    let phase = C64::from_polar(1.0, theta);
    let x = e1 * phase;
    let v = &x - a;
    let vv = v.norm_squared();
    if vv < 1e-28 {
        return CMatrix::identity(q, q) * phase;
    }
    let h = CMatrix::identity(q, q) - (&v * v.adjoint()) * C64::new(2.0 / vv, 0.0);
    h * phase
}

/// Serde adapter writing a vector as `[[re, im], ...]`.
pub mod vector_serde {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use super::{CVector, C64};

    pub fn serialize<S: Serializer>(v: &CVector, s: S) -> Result<S::Ok, S::Error> {
        v.as_slice().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<CVector, D::Error> {
        Ok(CVector::from_vec(Vec::<C64>::deserialize(d)?))
    }

    pub mod option {
        use serde::{Deserialize, Deserializer, Serialize, Serializer};

        use super::super::{CVector, C64};

        pub fn serialize<S: Serializer>(v: &Option<CVector>, s: S) -> Result<S::Ok, S::Error> {
            v.as_ref().map(|v| v.as_slice()).serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<CVector>, D::Error> {
            Ok(Option::<Vec<C64>>::deserialize(d)?.map(CVector::from_vec))
        }
    }
}
