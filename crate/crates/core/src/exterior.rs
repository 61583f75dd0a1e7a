//! Graded exterior algebra `Λ^k (R^n)*` for `n <= 12`.
//!
//! A [`MultiVector`] of degree `k` stores one coefficient per basis monomial
//! `e^{i1} ∧ ... ∧ e^{ik}` with `i1 < ... < ik`. Monomials are encoded as
//! bitmasks and stored densely in colexicographic order, which is the numeric
//! order of the masks; the rank of a monomial therefore does not depend on
//! the ambient dimension.
//!
//! Indices are 0-based throughout the Rust API. The JSON form (see
//! [`crate::json`]) uses 1-based indices.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::linalg::{inertia, LinearMap, Matrix};
use crate::scalar::Field;

pub const MAX_DIM: usize = 12;

type Mask = u16;

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

fn rank_of_mask(mask: Mask) -> usize {
    let mut rank = 0;
    let mut seen = 0;
    for pos in 0..MAX_DIM {
        if mask & (1 << pos) != 0 {
            seen += 1;
            rank += binomial(pos, seen);
        }
    }
    rank
}

/// All masks with `k` bits set below bit `n`, in increasing order.
fn masks(n: usize, k: usize) -> &'static [Mask] {
    static TABLE: OnceLock<Vec<Vec<Mask>>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        (0..=MAX_DIM)
            .map(|k| (0..(1u32 << MAX_DIM)).filter(|m| m.count_ones() as usize == k).map(|m| m as Mask).collect())
            .collect()
    });
    // colex order: masks below bit n form a prefix
    &table[k][..binomial(n, k)]
}

fn mask_indices(mask: Mask) -> Vec<usize> {
    (0..MAX_DIM).filter(|&i| mask & (1 << i) != 0).collect()
}

/// Sign of the permutation that sorts the concatenation `a ++ b` of two
/// disjoint sorted index sets.
fn shuffle_sign(a: Mask, b: Mask) -> bool {
    let mut inversions = 0u32;
    for j in mask_indices(b) {
        inversions += (a >> (j + 1)).count_ones();
    }
    inversions % 2 == 1
}

#[derive(Clone, PartialEq)]
pub struct MultiVector<T> {
    dim: usize,
    degree: usize,
    coeffs: Vec<T>,
}

impl<T: Field> MultiVector<T> {
    pub fn zero(dim: usize, degree: usize) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::UnsupportedDimension(dim));
        }
        if degree > dim {
            return Err(Error::DegreeOverflow { degree, dim });
        }
        Ok(MultiVector { dim, degree, coeffs: vec![T::zero(); binomial(dim, degree)] })
    }

    /// The coordinate 1-form `e^i`.
    pub fn basis(dim: usize, i: usize) -> Self {
        Self::monomial(dim, &[i], T::one()).expect("basis index out of range")
    }

    /// `c · e^{i1} ∧ ... ∧ e^{ik}` for any (not necessarily sorted) tuple;
    /// the sign of the sorting permutation is absorbed, repeated indices give
    /// the zero form.
    pub fn monomial(dim: usize, idx: &[usize], c: T) -> Result<Self> {
        let mut out = Self::zero(dim, idx.len())?;
        out.add_term(idx, c)?;
        Ok(out)
    }

    pub fn from_terms(dim: usize, degree: usize, terms: &[(Vec<usize>, T)]) -> Result<Self> {
        let mut out = Self::zero(dim, degree)?;
        for (idx, c) in terms {
            if idx.len() != degree {
                return Err(Error::BadIndex(idx.clone()));
            }
            out.add_term(idx, c.clone())?;
        }
        Ok(out)
    }

    /// 1-form with the given components.
    pub fn one_form(components: &[T]) -> Result<Self> {
        let mut out = Self::zero(components.len(), 1)?;
        out.coeffs.clone_from_slice(components);
        Ok(out)
    }

    fn add_term(&mut self, idx: &[usize], c: T) -> Result<()> {
        if idx.iter().any(|&i| i >= self.dim) {
            return Err(Error::BadIndex(idx.to_vec()));
        }
        let mut sorted = idx.to_vec();
        let mut negate = false;
        // bubble sort; tuples are at most 12 long
        for i in 0..sorted.len() {
            for j in 0..sorted.len() - 1 - i {
                if sorted[j] > sorted[j + 1] {
                    sorted.swap(j, j + 1);
                    negate = !negate;
                }
            }
        }
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Ok(());
        }
        let mask = sorted.iter().fold(0 as Mask, |m, &i| m | (1 << i));
        let slot = &mut self.coeffs[rank_of_mask(mask)];
        *slot = if negate { slot.clone() - c } else { slot.clone() + c };
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Coefficient on the sorted monomial `idx`. Unsorted tuples are read
    /// with the sign of their sorting permutation.
    pub fn coeff(&self, idx: &[usize]) -> T {
        let probe = Self::monomial(self.dim, idx, T::one());
        match probe {
            Ok(p) if p.degree == self.degree => {
                let (pos, sign) = p
                    .coeffs
                    .iter()
                    .enumerate()
                    .find(|(_, c)| !c.is_zero())
                    .map(|(i, c)| (i, c.clone()))
                    .unwrap_or((0, T::zero()));
                sign * self.coeffs[pos].clone()
            }
            _ => T::zero(),
        }
    }

    /// Nonzero terms as (sorted 0-based indices, coefficient).
    pub fn terms(&self) -> Vec<(Vec<usize>, T)> {
        masks(self.dim, self.degree)
            .iter()
            .copied()
            .zip(&self.coeffs)
            .filter(|(_, c)| !c.is_zero())
            .map(|(m, c)| (mask_indices(m), c.clone()))
            .collect()
    }

    /// Dense coefficient vector in colex monomial order.
    pub fn coefficients(&self) -> &[T] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(Field::magnitude).fold(0.0, f64::max)
    }

    pub fn scale(&self, s: &T) -> Self {
        self.map(|c| c.clone() * s.clone())
    }

    pub fn map<U: Field>(&self, f: impl Fn(&T) -> U) -> MultiVector<U> {
        MultiVector { dim: self.dim, degree: self.degree, coeffs: self.coeffs.iter().map(f).collect() }
    }

    pub fn to_f64(&self) -> MultiVector<f64> {
        self.map(|c| c.to_f64())
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: other.dim });
        }
        if self.degree != other.degree {
            return Err(Error::DimensionMismatch { expected: self.degree, got: other.degree });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Self {
        MultiVector {
            dim: self.dim,
            degree: self.degree,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| f(a.clone(), b.clone())).collect(),
        }
    }

    /// Exterior product.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: other.dim });
        }
        let degree = self.degree + other.degree;
        if degree > self.dim {
            return Err(Error::DegreeOverflow { degree, dim: self.dim });
        }
        let mut out = Self::zero(self.dim, degree)?;
        let left = masks(self.dim, self.degree);
        let right = masks(self.dim, other.degree);
        for (ma, ca) in left.iter().zip(&self.coeffs) {
            if ca.is_zero() {
                continue;
            }
            for (mb, cb) in right.iter().zip(&other.coeffs) {
                if cb.is_zero() || ma & mb != 0 {
                    continue;
                }
                let term = ca.clone() * cb.clone();
                let slot = &mut out.coeffs[rank_of_mask(ma | mb)];
                *slot = if shuffle_sign(*ma, *mb) { slot.clone() - term } else { slot.clone() + term };
            }
        }
        Ok(out)
    }

    /// Fully antisymmetric evaluation on `degree` vectors (components in the
    /// dual basis).
    pub fn evaluate(&self, vectors: &[Vec<T>]) -> Result<T> {
        if vectors.len() != self.degree {
            return Err(Error::Arity { expected: self.degree, got: vectors.len() });
        }
        if let Some(v) = vectors.iter().find(|v| v.len() != self.dim) {
            return Err(Error::DimensionMismatch { expected: self.dim, got: v.len() });
        }
        let k = self.degree;
        let mut total = T::zero();
        for (m, c) in masks(self.dim, k).iter().copied().zip(&self.coeffs) {
            if c.is_zero() {
                continue;
            }
            let rows = mask_indices(m);
            let minor = Matrix::from_fn(k, k, |r, s| vectors[s][rows[r]].clone());
            total = total + c.clone() * minor.determinant();
        }
        Ok(total)
    }

    /// Interior product `ι_v self`, i.e. `self(v, ·, ..., ·)`.
    pub fn contract(&self, v: &[T]) -> Result<Self> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: v.len() });
        }
        if self.degree == 0 {
            return Err(Error::Arity { expected: 1, got: 0 });
        }
        let mut out = Self::zero(self.dim, self.degree - 1)?;
        for (m, c) in masks(self.dim, self.degree).iter().copied().zip(&self.coeffs) {
            if c.is_zero() {
                continue;
            }
            for (pos, i) in mask_indices(m).into_iter().enumerate() {
                if v[i].is_zero() {
                    continue;
                }
                let term = c.clone() * v[i].clone();
                let slot = &mut out.coeffs[rank_of_mask(m & !(1 << i))];
                *slot = if pos % 2 == 1 { slot.clone() - term } else { slot.clone() + term };
            }
        }
        Ok(out)
    }

    /// Pullback by `a : R^m -> R^n` (an `n × m` matrix) where `n = self.dim`.
    pub fn pullback(&self, a: &LinearMap<T>) -> Result<Self> {
        if a.rows() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: a.rows() });
        }
        let m = a.cols();
        let k = self.degree;
        let mut out = Self::zero(m, k)?;
        let targets = masks(m, k);
        for (mi, c) in masks(self.dim, k).iter().copied().zip(&self.coeffs) {
            if c.is_zero() {
                continue;
            }
            let rows = mask_indices(mi);
            for (slot, &mj) in out.coeffs.iter_mut().zip(targets) {
                let cols = mask_indices(mj);
                let minor = Matrix::from_fn(k, k, |r, s| a[(rows[r], cols[s])].clone());
                *slot = slot.clone() + c.clone() * minor.determinant();
            }
        }
        Ok(out)
    }
}

impl<T: Field> Add for &MultiVector<T> {
    type Output = MultiVector<T>;
    fn add(self, rhs: &MultiVector<T>) -> MultiVector<T> {
        self.checked_add(rhs).expect("shape mismatch in MultiVector addition")
    }
}

impl<T: Field> Sub for &MultiVector<T> {
    type Output = MultiVector<T>;
    fn sub(self, rhs: &MultiVector<T>) -> MultiVector<T> {
        self.checked_sub(rhs).expect("shape mismatch in MultiVector subtraction")
    }
}

impl<T: Field> Neg for &MultiVector<T> {
    type Output = MultiVector<T>;
    fn neg(self) -> MultiVector<T> {
        self.map(|c| -c.clone())
    }
}

impl<T: Field + fmt::Display> fmt::Display for MultiVector<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.terms();
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (idx, c)) in terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            let mono: Vec<String> = idx.iter().map(|i| format!("e{}", i + 1)).collect();
            write!(f, "({c})·{}", mono.join("∧"))?;
        }
        Ok(())
    }
}

impl<T: fmt::Debug> fmt::Debug for MultiVector<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MultiVector")
            .field("dim", &self.dim)
            .field("degree", &self.degree)
            .field("coeffs", &self.coeffs)
            .finish()
    }
}

/// `ε = c · e^1 ∧ e^2 ∧ e^3 ∧ e^4` with `c != 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct VolumeForm<T> {
    coefficient: T,
}

impl<T: Field> VolumeForm<T> {
    pub fn new(coefficient: T) -> Result<Self> {
        if coefficient.is_zero() {
            return Err(Error::ZeroVolume);
        }
        Ok(VolumeForm { coefficient })
    }

    pub fn standard() -> Self {
        VolumeForm { coefficient: T::one() }
    }

    pub fn coefficient(&self) -> &T {
        &self.coefficient
    }

    pub fn negated(&self) -> Self {
        VolumeForm { coefficient: -self.coefficient.clone() }
    }

    pub fn from_form(form: &MultiVector<T>) -> Result<Self> {
        if form.dim() != 4 || form.degree() != 4 {
            return Err(Error::DimensionMismatch { expected: 4, got: form.degree() });
        }
        Self::new(form.coeff(&[0, 1, 2, 3]))
    }

    pub fn as_form(&self) -> MultiVector<T> {
        MultiVector::monomial(4, &[0, 1, 2, 3], self.coefficient.clone()).expect("dim 4")
    }

    pub fn to_f64(&self) -> VolumeForm<f64> {
        VolumeForm { coefficient: self.coefficient.to_f64() }
    }
}

impl<T: Field> Default for VolumeForm<T> {
    fn default() -> Self {
        Self::standard()
    }
}

/// The unique scalar with `ω ∧ φ = ⟨ω, φ⟩ ε`.
pub fn conformal_pairing<T: Field>(
    omega: &MultiVector<T>,
    phi: &MultiVector<T>,
    eps: &VolumeForm<T>,
) -> Result<T> {
    for f in [omega, phi] {
        if f.dim() != 4 {
            return Err(Error::DimensionMismatch { expected: 4, got: f.dim() });
        }
        if f.degree() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: f.degree() });
        }
    }
    if eps.coefficient.is_zero() {
        return Err(Error::ZeroVolume);
    }
    let top = omega.wedge(phi)?;
    Ok(top.coeff(&[0, 1, 2, 3]) / eps.coefficient.clone())
}

/// Standard basis `e^{ij}` of `Λ²(R^4)*` in colex order:
/// e12, e13, e23, e14, e24, e34.
pub fn two_form_basis<T: Field>() -> Vec<MultiVector<T>> {
    masks(4, 2)
        .iter()
        .copied()
        .map(|m| MultiVector::monomial(4, &mask_indices(m), T::one()).expect("dim 4"))
        .collect()
}

pub fn pairing_gram<T: Field>(eps: &VolumeForm<T>) -> Matrix<T> {
    let basis = two_form_basis::<T>();
    Matrix::from_fn(6, 6, |i, j| {
        conformal_pairing(&basis[i], &basis[j], eps).expect("well-formed basis")
    })
}

/// Signature `(p, q)` of the wedge pairing on `Λ²(R^4)*`.
pub fn pairing_signature<T: Field>(eps: &VolumeForm<T>, tol: f64) -> (usize, usize) {
    inertia(&pairing_gram(eps), tol)
}
