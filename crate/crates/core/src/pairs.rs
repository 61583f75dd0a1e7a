//! Pairs of 2-forms on an oriented 4-space.
//!
//! A pair `(ω, φ)` is elliptic when `⟨ω,ω⟩⟨φ,φ⟩ > ⟨ω,φ⟩²` for the wedge
//! pairing; equivalently every nonzero combination `λ₁ω + λ₂φ` is
//! symplectic. Orthogonal elliptic pairs have a normal form
//! `ω = e¹∧e³ − e²∧e⁴`, `φ = κ(e¹∧e⁴ + e²∧e³)` with `κ > 0` an
//! `Sp(ω)`-invariant.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exterior::{conformal_pairing, MultiVector, VolumeForm};
use crate::json::num17;
use crate::linalg::{LinearMap, Matrix};
use crate::scalar::Field;

fn wedge2<T: Field>(i: usize, j: usize) -> MultiVector<T> {
    MultiVector::monomial(4, &[i, j], T::one()).expect("dim 4")
}

/// `ω₀ = e¹∧e³ − e²∧e⁴ = Re(dz¹∧dz²)`.
pub fn standard_omega<T: Field>() -> MultiVector<T> {
    &wedge2(0, 2) - &wedge2(1, 3)
}

/// `φ₀ = e¹∧e⁴ + e²∧e³ = Im(dz¹∧dz²)`.
pub fn standard_phi<T: Field>() -> MultiVector<T> {
    &wedge2(0, 3) + &wedge2(1, 2)
}

fn check_two_form<T: Field>(f: &MultiVector<T>) -> Result<()> {
    if f.dim() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, got: f.dim() });
    }
    if f.degree() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: f.degree() });
    }
    Ok(())
}

pub fn is_symplectic<T: Field>(omega: &MultiVector<T>, eps: &VolumeForm<T>, tol: f64) -> Result<bool> {
    check_two_form(omega)?;
    Ok(!conformal_pairing(omega, omega, eps)?.is_zero_within(tol))
}

/// Gram matrix `[[⟨ω,ω⟩, ⟨ω,φ⟩], [⟨ω,φ⟩, ⟨φ,φ⟩]]`.
pub fn gram<T: Field>(omega: &MultiVector<T>, phi: &MultiVector<T>, eps: &VolumeForm<T>) -> Result<[[T; 2]; 2]> {
    check_two_form(omega)?;
    check_two_form(phi)?;
    let ww = conformal_pairing(omega, omega, eps)?;
    let wf = conformal_pairing(omega, phi, eps)?;
    let ff = conformal_pairing(phi, phi, eps)?;
    Ok([[ww, wf.clone()], [wf, ff]])
}

pub fn is_elliptic<T: Field>(
    omega: &MultiVector<T>,
    phi: &MultiVector<T>,
    eps: &VolumeForm<T>,
    tol: f64,
) -> Result<bool> {
    let [[ww, wf], [_, ff]] = gram(omega, phi, eps)?;
    Ok((ww * ff - wf.clone() * wf).sign_within(tol) > 0)
}

/// `φ − (⟨ω,φ⟩/⟨ω,ω⟩) ω`.
pub fn orthogonalize<T: Field>(
    omega: &MultiVector<T>,
    phi: &MultiVector<T>,
    eps: &VolumeForm<T>,
    tol: f64,
) -> Result<MultiVector<T>> {
    let [[ww, wf], _] = gram(omega, phi, eps)?;
    if ww.is_zero_within(tol) {
        return Err(Error::NotSymplectic);
    }
    phi.checked_sub(&omega.scale(&(wf / ww)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct EllipticPair<T> {
    omega: MultiVector<T>,
    phi: MultiVector<T>,
    eps: VolumeForm<T>,
}

impl<T: Field> EllipticPair<T> {
    pub fn new(omega: MultiVector<T>, phi: MultiVector<T>, eps: VolumeForm<T>, tol: f64) -> Result<Self> {
        if !is_elliptic(&omega, &phi, &eps, tol)? {
            return Err(Error::NotElliptic);
        }
        Ok(EllipticPair { omega, phi, eps })
    }

    pub fn omega(&self) -> &MultiVector<T> {
        &self.omega
    }

    pub fn phi(&self) -> &MultiVector<T> {
        &self.phi
    }

    pub fn epsilon(&self) -> &VolumeForm<T> {
        &self.eps
    }

    pub fn gram(&self) -> [[T; 2]; 2] {
        gram(&self.omega, &self.phi, &self.eps).expect("validated at construction")
    }

    /// The pair with `φ` replaced by its component orthogonal to `ω`.
    pub fn orthogonalized(&self, tol: f64) -> Result<Self> {
        let phi = orthogonalize(&self.omega, &self.phi, &self.eps, tol)?;
        Ok(EllipticPair { omega: self.omega.clone(), phi, eps: self.eps.clone() })
    }

    pub fn is_orthogonal(&self, tol: f64) -> bool {
        self.gram()[0][1].is_zero_within(tol)
    }

    /// Pair pulled back by `a` (a 4×4 map).
    pub fn pullback(&self, a: &LinearMap<T>, tol: f64) -> Result<Self> {
        if a.rows() != 4 || a.cols() != 4 {
            return Err(Error::DimensionMismatch { expected: 4, got: a.cols() });
        }
        Self::new(self.omega.pullback(a)?, self.phi.pullback(a)?, self.eps.clone(), tol)
    }

    pub fn to_f64(&self) -> EllipticPair<f64> {
        EllipticPair { omega: self.omega.to_f64(), phi: self.phi.to_f64(), eps: self.eps.to_f64() }
    }

    /// `κ² = ⟨φ,φ⟩/⟨ω,ω⟩`, exact on exact inputs.
    pub fn kappa_squared(&self, tol: f64) -> Result<T> {
        let [[ww, wf], [_, ff]] = self.gram();
        if !wf.is_zero_within(tol * ww.magnitude().max(1.0)) {
            return Err(Error::NotOrthogonal(wf.to_f64()));
        }
        Ok(ff / ww)
    }
}

/// `κ = sqrt(⟨φ,φ⟩/⟨ω,ω⟩)` for an orthogonal elliptic pair.
pub fn kappa_invariant<T: Field>(pair: &EllipticPair<T>, tol: f64) -> Result<f64> {
    Ok(pair.kappa_squared(tol)?.to_f64().sqrt())
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormalForm {
    /// Rows are the coframe `e¹..e⁴` in input coordinates.
    pub basis: Matrix<f64>,
    pub kappa: f64,
    /// True when `⟨ω,ω⟩ < 0` for the supplied ε, so the coframe is
    /// positively oriented for `−ε` instead.
    pub epsilon_flipped: bool,
}

impl NormalForm {
    /// Largest coefficient deviation between the pair and the pullback of
    /// the model pair `(ω₀, κφ₀)` through `basis`.
    pub fn reconstruction_residual<T: Field>(&self, pair: &EllipticPair<T>) -> f64 {
        let omega = standard_omega::<f64>().pullback(&self.basis).expect("4x4");
        let phi = standard_phi::<f64>().scale(&self.kappa).pullback(&self.basis).expect("4x4");
        let p = pair.to_f64();
        (&omega - p.omega()).max_abs().max((&phi - p.phi()).max_abs())
    }

    pub fn to_json(&self) -> Value {
        let basis: Vec<Vec<Value>> =
            self.basis.to_rows().into_iter().map(|r| r.into_iter().map(num17).collect()).collect();
        json!({"kappa": num17(self.kappa), "basis": basis, "epsilon_flipped": self.epsilon_flipped})
    }
}

/// Matrix `M_ij = f(e_i, e_j)` of a 2-form.
pub fn form_matrix<T: Field>(f: &MultiVector<T>) -> Matrix<T> {
    let n = f.dim();
    Matrix::from_fn(n, n, |i, j| f.coeff(&[i, j]))
}

/// Normal-form coframe of an orthogonal elliptic pair.
///
/// With `A` defined by `φ(u,v) = ω(Au,v)` one has `A² = −κ²`, and
/// `J = −A/κ` satisfies `ω(Ju,Jv) = −ω(u,v)`. Taking `e₂ = Je₁`,
/// `e₄ = Je₃` and `e₃` from `ω(e₁,e₃) = 1`, `ω(e₂,e₃) = 0` leaves every
/// other pairing fixed. The condition `φ(e₁,e₃) = 0` is not imposed
/// separately: `φ(e₁,·) = −κ ω(e₂,·)`, so it is the second one again.
pub fn normal_form<T: Field>(pair: &EllipticPair<T>, tol: f64) -> Result<NormalForm> {
    let p = pair.to_f64();
    let [[ww, wf], [_, ff]] = p.gram();
    let scale = ww.abs().max(ff.abs()).max(1.0);
    if wf.abs() > tol * scale {
        return Err(Error::NotOrthogonal(wf));
    }
    let epsilon_flipped = ww < 0.0;
    let kappa = (ff / ww).sqrt();
    if !(kappa > 0.0) {
        return Err(Error::NotElliptic);
    }

    let w = form_matrix(p.omega());
    let f = form_matrix(p.phi());
    let a = w.inverse(tol)?.mul(&f);
    let a2 = a.mul(&a).add(&Matrix::identity(4).scale(&(kappa * kappa)));
    if a2.max_abs() > tol * (kappa * kappa).max(1.0) * 1e3 {
        return Err(Error::Internal(format!("A² + κ² residual {:e}", a2.max_abs())));
    }
    let j = a.scale(&(-1.0 / kappa));

    let unit = |i: usize| -> Vec<f64> { (0..4).map(|k| if k == i { 1.0 } else { 0.0 }).collect() };
    let e1 = (0..4)
        .map(unit)
        .find(|e| a.apply(e).iter().any(|x| x.abs() > tol))
        .ok_or(Error::NotSymplectic)?;
    let e2 = j.apply(&e1);
    let row = |m: &Matrix<f64>, v: &[f64]| m.transpose().apply(v);
    let conditions = Matrix::from_rows(vec![row(&w, &e1), row(&w, &e2)]);
    let e3 = conditions.solve_min_norm(&[1.0, 0.0], tol)?;
    let e4 = j.apply(&e3);

    let frame = Matrix::from_columns(&[e1, e2, e3, e4]);
    let w_frame = frame.transpose().mul(&w).mul(&frame);
    let f_frame = frame.transpose().mul(&f).mul(&frame);
    let near = |x: f64, v: f64| (x - v).abs() <= tol * 1e3 * scale;
    let identities = near(w_frame[(0, 1)], 0.0)
        && near(w_frame[(2, 3)], 0.0)
        && near(w_frame[(1, 3)], -1.0)
        && near(f_frame[(0, 2)], 0.0)
        && near(f_frame[(0, 3)], kappa);
    if !identities {
        return Err(Error::Internal("normal-form frame identities failed".into()));
    }
    let basis = frame.inverse(tol)?;
    Ok(NormalForm { basis, kappa, epsilon_flipped })
}

#[derive(Clone, Debug, PartialEq)]
pub struct PulledBackPair<T> {
    pub beta1: MultiVector<T>,
    pub beta2: MultiVector<T>,
    pub independent: bool,
}

/// Pull `(ω, φ)` back along an injective `a : R³ → R⁴` and test linear
/// independence of the results.
pub fn pullback_pair_independent<T: Field>(
    omega: &MultiVector<T>,
    phi: &MultiVector<T>,
    a: &LinearMap<T>,
    tol: f64,
) -> Result<PulledBackPair<T>> {
    check_two_form(omega)?;
    check_two_form(phi)?;
    if a.rows() != 4 || a.cols() != 3 {
        return Err(Error::DimensionMismatch { expected: 3, got: a.cols() });
    }
    if a.rank(tol) < 3 {
        return Err(Error::NotInjective);
    }
    let beta1 = omega.pullback(a)?;
    let beta2 = phi.pullback(a)?;
    let rank = Matrix::from_rows(vec![beta1.coefficients().to_vec(), beta2.coefficients().to_vec()]).rank(tol);
    Ok(PulledBackPair { beta1, beta2, independent: rank == 2 })
}
