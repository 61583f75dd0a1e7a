//! Complex structures on `R^4`, their oriented planes `Λ_J ⊂ Λ²(R^4)*`,
//! splittings `Λ_J = L₁ ⊕ L₂` and the degree invariant.
//!
//! `GL⁺(4)` acts on complex structures by `J ↦ A⁻¹JA` and on 2-forms by
//! pullback; `J ↦ Λ_J` intertwines the two actions.

use crate::error::{Error, Result};
use crate::exterior::{conformal_pairing, MultiVector, VolumeForm};
use crate::linalg::{LinearMap, Matrix};
use crate::pairs::{gram, normal_form, orthogonalize, standard_omega, standard_phi, EllipticPair};
use crate::scalar::Field;

/// The model complex structure: `J₀e₁ = e₂`, `J₀e₃ = e₄`, i.e.
/// multiplication by `i` for `z¹ = x¹ + ix²`, `z² = x³ + ix⁴`.
pub fn standard_j<T: Field>() -> Matrix<T> {
    let (o, z) = (T::one(), T::zero());
    Matrix::from_rows(vec![
        vec![z.clone(), -o.clone(), z.clone(), z.clone()],
        vec![o.clone(), z.clone(), z.clone(), z.clone()],
        vec![z.clone(), z.clone(), z.clone(), -o.clone()],
        vec![z.clone(), z.clone(), o, z],
    ])
}

/// `(2,0)`-form data of `J` from the covectors `e^a`, `e^b`: with
/// `μ = λ∘J`, the form `ζ = λ − iμ` is of type `(1,0)`, and
/// `α = ζ_a ∧ ζ_b` has `Re α = λ_a∧λ_b − μ_a∧μ_b`,
/// `Im α = −(λ_a∧μ_b + μ_a∧λ_b)`.
pub fn plane_from_covectors<T: Field>(j: &Matrix<T>, a: usize, b: usize) -> Result<(MultiVector<T>, MultiVector<T>)> {
    if j.rows() != 4 || j.cols() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, got: j.rows() });
    }
    let la = MultiVector::basis(4, a);
    let lb = MultiVector::basis(4, b);
    let ma = MultiVector::one_form(&j.row(a))?;
    let mb = MultiVector::one_form(&j.row(b))?;
    let re = la.wedge(&lb)?.checked_sub(&ma.wedge(&mb)?)?;
    let im = -&la.wedge(&mb)?.checked_add(&ma.wedge(&lb)?)?;
    Ok((re, im))
}

fn raw_plane<T: Field>(j: &Matrix<T>, tol: f64) -> Result<(MultiVector<T>, MultiVector<T>)> {
    for a in 0..4 {
        for b in a + 1..4 {
            let (re, im) = plane_from_covectors(j, a, b)?;
            if re.max_abs() > tol || im.max_abs() > tol {
                return Ok((re, im));
            }
        }
    }
    Err(Error::NotComplexStructure(f64::NAN))
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrientedPositivePlane<T> {
    omega: MultiVector<T>,
    phi: MultiVector<T>,
    eps: VolumeForm<T>,
}

impl<T: Field> OrientedPositivePlane<T> {
    /// The ordered pair `(ω, φ)` is the orientation.
    pub fn new(omega: MultiVector<T>, phi: MultiVector<T>, eps: VolumeForm<T>, tol: f64) -> Result<Self> {
        let [[ww, wf], [_, ff]] = gram(&omega, &phi, &eps)?;
        let det = ww.clone() * ff - wf.clone() * wf;
        if ww.sign_within(tol) <= 0 || det.sign_within(tol) <= 0 {
            return Err(Error::IndefiniteSpan);
        }
        Ok(OrientedPositivePlane { omega, phi, eps })
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

    pub fn pullback(&self, a: &LinearMap<T>, tol: f64) -> Result<Self> {
        Self::new(self.omega.pullback(a)?, self.phi.pullback(a)?, self.eps.clone(), tol)
    }

    pub fn to_f64(&self) -> OrientedPositivePlane<f64> {
        OrientedPositivePlane { omega: self.omega.to_f64(), phi: self.phi.to_f64(), eps: self.eps.to_f64() }
    }

    /// Coordinates of `other`'s basis in this basis, or `None` when the
    /// spans differ.
    pub fn coordinates_of(&self, other: &Self, tol: f64) -> Option<[[T; 2]; 2]> {
        let basis = [&self.omega, &self.phi];
        let g = Matrix::from_fn(2, 2, |i, k| conformal_pairing(basis[i], basis[k], &self.eps).expect("dim 4"));
        let ginv = g.inverse(tol).ok()?;
        let mut out: [[T; 2]; 2] = [[T::zero(), T::zero()], [T::zero(), T::zero()]];
        for (col, target) in [&other.omega, &other.phi].into_iter().enumerate() {
            let rhs: Vec<T> = basis.iter().map(|b| conformal_pairing(b, target, &self.eps).expect("dim 4")).collect();
            let c = ginv.apply(&rhs);
            let recon = self.omega.scale(&c[0]).checked_add(&self.phi.scale(&c[1])).ok()?;
            let residual = recon.checked_sub(target).ok()?;
            let scale = target.max_abs().max(1.0);
            if residual.coefficients().iter().any(|x| !x.is_zero_within(tol * scale)) {
                return None;
            }
            out[0][col] = c[0].clone();
            out[1][col] = c[1].clone();
        }
        Some(out)
    }

    /// Same span and same orientation.
    pub fn same_oriented_plane(&self, other: &Self, tol: f64) -> bool {
        match self.coordinates_of(other, tol) {
            Some([[a, b], [c, d]]) => (a * d - b * c).sign_within(tol) > 0,
            None => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexStructure<T> {
    j: Matrix<T>,
    eps: VolumeForm<T>,
}

impl<T: Field> ComplexStructure<T> {
    /// Checks `J² = −Id` and compatibility with the orientation of `eps`.
    pub fn new(j: Matrix<T>, eps: VolumeForm<T>, tol: f64) -> Result<Self> {
        if j.rows() != 4 || j.cols() != 4 {
            return Err(Error::DimensionMismatch { expected: 4, got: j.rows() });
        }
        let residual = j.mul(&j).add(&Matrix::identity(4));
        if !residual.to_rows().iter().flatten().all(|x| x.is_zero_within(tol)) {
            return Err(Error::NotComplexStructure(residual.max_abs()));
        }
        // orientation compatible iff the wedge pairing is positive on Λ_J
        let (re, _) = raw_plane(&j, tol)?;
        if conformal_pairing(&re, &re, &eps)?.sign_within(tol) <= 0 {
            return Err(Error::OrientationIncompatible);
        }
        Ok(ComplexStructure { j, eps })
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.j
    }

    pub fn epsilon(&self) -> &VolumeForm<T> {
        &self.eps
    }

    /// `A⁻¹JA`.
    pub fn act(&self, a: &LinearMap<T>, tol: f64) -> Result<Self> {
        let inv = a.inverse(tol)?;
        Self::new(inv.mul(&self.j).mul(a), self.eps.clone(), tol)
    }
}

/// `Λ_J` spanned by `(Re α, Im α)` for a `(2,0)`-form `α`.
pub fn plane_of<T: Field>(j: &ComplexStructure<T>, tol: f64) -> Result<OrientedPositivePlane<T>> {
    let (re, im) = raw_plane(&j.j, tol)?;
    OrientedPositivePlane::new(re, im, j.eps.clone(), tol)
}

/// Inverse of [`plane_of`]: orthonormalize the plane's basis for the wedge
/// pairing, take its normal-form coframe (κ = 1) and write down `J₀` there.
pub fn j_of_plane<T: Field>(p: &OrientedPositivePlane<T>, tol: f64) -> Result<ComplexStructure<f64>> {
    let p = p.to_f64();
    let phi = orthogonalize(p.omega(), p.phi(), p.epsilon(), tol)?;
    let ww = conformal_pairing(p.omega(), p.omega(), p.epsilon())?;
    let ff = conformal_pairing(&phi, &phi, p.epsilon())?;
    let phi = phi.scale(&(ww / ff).sqrt());
    let pair = EllipticPair::new(p.omega().clone(), phi, p.epsilon().clone(), tol)?;
    let nf = normal_form(&pair, tol)?;
    let b = &nf.basis;
    let j = b.inverse(tol)?.mul(&standard_j()).mul(b);
    ComplexStructure::new(j, p.epsilon().clone(), tol)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Splitting<T> {
    l1: MultiVector<T>,
    l2: MultiVector<T>,
    eps: VolumeForm<T>,
    epsilon_flipped: bool,
}

impl<T: Field> Splitting<T> {
    /// Lines are given by generators. A negative-definite span is accepted
    /// by flipping `eps`, which is recorded.
    pub fn new(l1: MultiVector<T>, l2: MultiVector<T>, eps: VolumeForm<T>, tol: f64) -> Result<Self> {
        let [[ww, wf], [_, ff]] = gram(&l1, &l2, &eps)?;
        let det = ww.clone() * ff - wf.clone() * wf;
        if det.sign_within(tol) <= 0 {
            return Err(Error::IndefiniteSpan);
        }
        let (eps, epsilon_flipped) = if ww.sign_within(tol) < 0 { (eps.negated(), true) } else { (eps, false) };
        Ok(Splitting { l1, l2, eps, epsilon_flipped })
    }

    pub fn l1(&self) -> &MultiVector<T> {
        &self.l1
    }

    pub fn l2(&self) -> &MultiVector<T> {
        &self.l2
    }

    pub fn epsilon(&self) -> &VolumeForm<T> {
        &self.eps
    }

    pub fn epsilon_flipped(&self) -> bool {
        self.epsilon_flipped
    }

    pub fn plane(&self, tol: f64) -> Result<OrientedPositivePlane<T>> {
        OrientedPositivePlane::new(self.l1.clone(), self.l2.clone(), self.eps.clone(), tol)
    }

    /// The complex structure `J` with `Λ_J = L₁ ⊕ L₂`, oriented by `(L₁, L₂)`.
    pub fn complex_structure(&self, tol: f64) -> Result<ComplexStructure<f64>> {
        j_of_plane(&self.plane(tol)?, tol)
    }

    pub fn to_f64(&self) -> Splitting<f64> {
        Splitting {
            l1: self.l1.to_f64(),
            l2: self.l2.to_f64(),
            eps: self.eps.to_f64(),
            epsilon_flipped: self.epsilon_flipped,
        }
    }

    /// True when both lines agree with `other`'s (in order).
    pub fn same_lines(&self, other: &Self, tol: f64) -> bool {
        same_line(&self.l1, &other.l1, tol) && same_line(&self.l2, &other.l2, tol)
    }
}

pub fn same_line<T: Field>(a: &MultiVector<T>, b: &MultiVector<T>, tol: f64) -> bool {
    if a.dim() != b.dim() || a.degree() != b.degree() || a.is_zero() || b.is_zero() {
        return false;
    }
    let scale = a.max_abs().max(b.max_abs()).max(1.0);
    Matrix::from_rows(vec![a.coefficients().to_vec(), b.coefficients().to_vec()]).rank(tol * scale) == 1
}

/// `degree² = ⟨ω,ω′⟩² / (⟨ω,ω⟩⟨ω′,ω′⟩ − ⟨ω,ω′⟩²)`; exact on exact inputs
/// and independent of generator scaling.
pub fn degree_squared<T: Field>(s: &Splitting<T>, tol: f64) -> Result<T> {
    let [[ww, wf], [_, ff]] = gram(&s.l1, &s.l2, &s.eps)?;
    let den = ww * ff - wf.clone() * wf.clone();
    if den.sign_within(tol) <= 0 {
        return Err(Error::IndefiniteSpan);
    }
    Ok(wf.clone() * wf / den)
}

pub fn degree<T: Field>(s: &Splitting<T>, tol: f64) -> Result<f64> {
    Ok(degree_squared(s, tol)?.to_f64().sqrt())
}

/// `S_α = ({ω₀}, {αω₀ + φ₀})` with the standard volume form.
pub fn canonical_model<T: Field>(alpha: T, tol: f64) -> Result<Splitting<T>> {
    if alpha.sign_within(tol) < 0 {
        return Err(Error::NegativeDegree);
    }
    let omega = standard_omega::<T>();
    let l2 = omega.scale(&alpha).checked_add(&standard_phi())?;
    Splitting::new(omega, l2, VolumeForm::standard(), tol)
}

/// Degrees classify splittings up to complex-linear equivalence. Exact
/// inputs are compared through `degree²` without rounding.
pub fn equivalent<T: Field>(s1: &Splitting<T>, s2: &Splitting<T>, tol: f64) -> Result<bool> {
    let d1 = degree_squared(s1, tol)?;
    let d2 = degree_squared(s2, tol)?;
    if d1.is_exact() && d2.is_exact() {
        return Ok(d1 == d2);
    }
    Ok((d1.to_f64().sqrt() - d2.to_f64().sqrt()).abs() <= tol)
}

/// Pulls both generator lines back by `a`, which must have `det a > 0`.
pub fn act<T: Field>(a: &LinearMap<T>, s: &Splitting<T>, tol: f64) -> Result<Splitting<T>> {
    if a.rows() != 4 || a.cols() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, got: a.cols() });
    }
    if a.determinant().sign_within(tol) <= 0 {
        return Err(Error::NotOrientationPreserving);
    }
    let out = Splitting::new(s.l1.pullback(a)?, s.l2.pullback(a)?, s.eps.clone(), tol)?;
    Ok(Splitting { epsilon_flipped: s.epsilon_flipped, ..out })
}

/// A map `B` with `B*(S_α) = s` (line by line), `α = degree(s)`.
pub fn equivalence_witness<T: Field>(s: &Splitting<T>, tol: f64) -> Result<(f64, Matrix<f64>)> {
    let s = s.to_f64();
    let eps = s.epsilon();
    let omega = s.l1();
    let ww = conformal_pairing(omega, omega, eps)?;
    let wf = conformal_pairing(omega, s.l2(), eps)?;
    // flip the generator of L₂ so that its ω-component is nonnegative
    let l2 = if wf < 0.0 { -s.l2() } else { s.l2().clone() };
    let phi = orthogonalize(omega, &l2, eps, tol)?;
    let ff = conformal_pairing(&phi, &phi, eps)?;
    let phi = phi.scale(&(ww / ff).sqrt());
    let pair = EllipticPair::new(omega.clone(), phi, eps.clone(), tol)?;
    let nf = normal_form(&pair, tol)?;
    Ok((degree(&s, tol)?, nf.basis))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat, Rational};

    type Q = Rational;
    const TOL: f64 = 1e-9;

    fn j0() -> ComplexStructure<Q> {
        ComplexStructure::new(standard_j(), VolumeForm::standard(), TOL).unwrap()
    }

    #[test]
    fn plane_of_standard_j() {
        let p = plane_of(&j0(), TOL).unwrap();
        assert_eq!(p.omega(), &standard_omega::<Q>());
        assert_eq!(p.phi(), &standard_phi::<Q>());
    }

    #[test]
    fn covector_choice_does_not_matter() {
        let j = j0();
        let a = plane_from_covectors(j.matrix(), 0, 2).unwrap();
        let b = plane_from_covectors(j.matrix(), 1, 3).unwrap();
        let pa = OrientedPositivePlane::new(a.0, a.1, VolumeForm::standard(), TOL).unwrap();
        let pb = OrientedPositivePlane::new(b.0, b.1, VolumeForm::standard(), TOL).unwrap();
        assert!(pa.same_oriented_plane(&pb, 0.0));
        // (0,1) spans a complex line: α vanishes there
        let c = plane_from_covectors(j.matrix(), 0, 1).unwrap();
        assert!(c.0.is_zero() && c.1.is_zero());
    }

    #[test]
    fn negated_j_reverses_plane_orientation() {
        let minus = ComplexStructure::new(standard_j::<Q>().scale(&int(-1)), VolumeForm::standard(), TOL).unwrap();
        let p = plane_of(&minus, TOL).unwrap();
        let p0 = plane_of(&j0(), TOL).unwrap();
        assert!(p.coordinates_of(&p0, 0.0).is_some());
        assert!(!p.same_oriented_plane(&p0, 0.0));
    }

    #[test]
    fn orientation_reversing_j_is_rejected() {
        // J e1 = e2, J e3 = -e4
        let mut j = standard_j::<Q>();
        j[(2, 3)] = int(1);
        j[(3, 2)] = int(-1);
        assert_eq!(ComplexStructure::new(j, VolumeForm::standard(), TOL), Err(Error::OrientationIncompatible));
        let not_j = Matrix::<Q>::identity(4);
        assert!(matches!(
            ComplexStructure::new(not_j, VolumeForm::standard(), TOL),
            Err(Error::NotComplexStructure(_))
        ));
    }

    #[test]
    fn j_of_standard_plane() {
        let p = OrientedPositivePlane::new(standard_omega::<Q>(), standard_phi(), VolumeForm::standard(), TOL).unwrap();
        let j = j_of_plane(&p, TOL).unwrap();
        assert!(j.matrix().sub(&standard_j()).max_abs() < 1e-12);
    }

    #[test]
    fn reversed_plane_round_trip() {
        let p = OrientedPositivePlane::new(standard_phi::<Q>(), standard_omega(), VolumeForm::standard(), TOL).unwrap();
        let j = j_of_plane(&p, TOL).unwrap();
        let back = plane_of(&j, TOL).unwrap();
        assert!(back.same_oriented_plane(&p.to_f64(), 1e-9));
    }

    #[test]
    fn model_degrees() {
        for (a, expect) in [(rat(0, 1), rat(0, 1)), (rat(1, 2), rat(1, 4)), (int(2), int(4)), (int(10), int(100))] {
            let s = canonical_model(a, TOL).unwrap();
            assert_eq!(degree_squared(&s, TOL).unwrap(), expect);
        }
        let s = canonical_model(3.25_f64, TOL).unwrap();
        assert!((degree(&s, TOL).unwrap() - 3.25).abs() < 1e-12);
        assert_eq!(canonical_model(int(-1), TOL), Err(Error::NegativeDegree));
    }

    #[test]
    fn model_zero_is_orthogonal_pair() {
        let s = canonical_model(int(0), TOL).unwrap();
        assert_eq!(s.l1(), &standard_omega::<Q>());
        assert_eq!(s.l2(), &standard_phi::<Q>());
        let one = canonical_model(int(1), TOL).unwrap();
        assert_eq!(one.l2(), &(&standard_omega::<Q>() + &standard_phi()));
    }

    #[test]
    fn degree_ignores_generator_scaling() {
        let s = canonical_model(int(2), TOL).unwrap();
        let scaled = Splitting::new(s.l1().scale(&int(-3)), s.l2().scale(&rat(5, 7)), VolumeForm::standard(), TOL).unwrap();
        assert_eq!(degree_squared(&scaled, TOL).unwrap(), int(4));
        let eps7 = Splitting::new(s.l1().clone(), s.l2().clone(), VolumeForm::new(int(7)).unwrap(), TOL).unwrap();
        assert_eq!(degree_squared(&eps7, TOL).unwrap(), int(4));
    }

    #[test]
    fn equivalence_by_degree() {
        let s0 = canonical_model(int(0), TOL).unwrap();
        let s1 = canonical_model(int(1), TOL).unwrap();
        assert!(!equivalent(&s0, &s1, TOL).unwrap());
        assert!(equivalent(&s1, &s1, TOL).unwrap());
    }

    #[test]
    fn act_rejects_orientation_reversal() {
        let mut flip = Matrix::<Q>::identity(4);
        flip[(0, 0)] = int(-1);
        let s = canonical_model(int(1), TOL).unwrap();
        assert_eq!(act(&flip, &s, TOL), Err(Error::NotOrientationPreserving));
        assert_eq!(act(&Matrix::identity(4), &s, TOL).unwrap(), s);
    }

    #[test]
    fn indefinite_span_is_rejected() {
        let e12 = MultiVector::<Q>::monomial(4, &[0, 1], int(1)).unwrap();
        let e34 = MultiVector::<Q>::monomial(4, &[2, 3], int(1)).unwrap();
        assert_eq!(Splitting::new(e12, e34, VolumeForm::standard(), TOL), Err(Error::IndefiniteSpan));
    }

    #[test]
    fn negative_definite_span_flips_epsilon() {
        let s = Splitting::new(standard_omega::<Q>(), standard_phi(), VolumeForm::new(int(-1)).unwrap(), TOL).unwrap();
        assert!(s.epsilon_flipped());
        assert_eq!(s.epsilon(), &VolumeForm::standard());
    }

    #[test]
    fn witness_maps_model_onto_splitting() {
        let s = canonical_model(int(2), TOL).unwrap();
        let (alpha, b) = equivalence_witness(&s, TOL).unwrap();
        assert!((alpha - 2.0).abs() < 1e-12);
        let model = canonical_model(alpha, TOL).unwrap();
        assert!(act(&b, &model, TOL).unwrap().same_lines(&s.to_f64(), 1e-9));
    }
}
