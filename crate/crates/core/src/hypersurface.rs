//! Hypersurfaces of `R⁴ ≅ C²` given by rational parametrizations
//! `u : R³ → R⁴`, and the structures they inherit from the splitting
//! `({ω₀}, {φ₀})` of the standard complex structure:
//!
//! * the pulled-back pair `β₁ = u*ω₀`, `β₂ = u*φ₀`, written `β = b·⋆dx`
//!   with `⋆dx = (dx²∧dx³, dx³∧dx¹, dx¹∧dx²)`;
//! * adapted coframes `(η₁, η₂, η₃)` with `β₁ = η₂∧η₁`, `β₂ = η₂∧η₃`;
//! * the line fields `P₁ = {η₁,η₂}^⊥ ∥ b₁`, `P₂ = {η₂,η₃}^⊥ ∥ b₂`;
//! * the contact condition on `D = P₁ ⊕ P₂ = ker((b₁×b₂)·dx)`;
//! * the CR structure `D = T ∩ J₀T`, `I = J₀|_D`.
//!
//! Maps are `numerators / denominator` with polynomial numerators and a
//! common polynomial denominator `q` (1 for polynomial maps). Every
//! derivative is formal, so all predicates are exact at rational points.
//! Pulled-back forms are stored with the factor `q⁴` cleared; the factor is
//! positive wherever the map is defined and does not affect line fields or
//! the contact condition.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::json::{num17, rational_from_value, rational_value};
use crate::linalg::{cross, dot, Matrix};
use crate::poly::{self, Exponent, Poly, PolyVec};
use crate::scalar::{int, Field, Rational};
use crate::splitting::standard_j;

pub type Point = [Rational; 3];

#[derive(Clone, Debug, PartialEq)]
pub struct PolyMap {
    numerators: [Poly; 4],
    denominator: Poly,
}

impl PolyMap {
    pub fn new(components: [Poly; 4]) -> Self {
        PolyMap { numerators: components, denominator: Poly::one() }
    }

    pub fn rational(numerators: [Poly; 4], denominator: Poly) -> Result<Self> {
        if denominator.is_zero() {
            return Err(Error::Parse("zero denominator".into()));
        }
        Ok(PolyMap { numerators, denominator })
    }

    pub fn numerators(&self) -> &[Poly; 4] {
        &self.numerators
    }

    pub fn denominator(&self) -> &Poly {
        &self.denominator
    }

    /// `A ∘ u` for a linear map `A` of `R⁴`.
    pub fn compose_linear(&self, a: &Matrix<Rational>) -> Self {
        let numerators = std::array::from_fn(|i| {
            (0..4).fold(Poly::zero(), |acc, k| &acc + &self.numerators[k].scale(&a[(i, k)]))
        });
        PolyMap { numerators, denominator: self.denominator.clone() }
    }

    /// `u + c`.
    pub fn translate(&self, c: &[Rational; 4]) -> Self {
        let numerators =
            std::array::from_fn(|i| &self.numerators[i] + &self.denominator.scale(&c[i]));
        PolyMap { numerators, denominator: self.denominator.clone() }
    }

    fn denominator_at(&self, x: &Point) -> Result<Rational> {
        let q = self.denominator.eval(x);
        if q == int(0) {
            return Err(Error::Degenerate("map undefined at point".into()));
        }
        Ok(q)
    }

    pub fn eval(&self, x: &Point) -> Result<[Rational; 4]> {
        let q = self.denominator_at(x)?;
        Ok(std::array::from_fn(|i| self.numerators[i].eval(x) / q.clone()))
    }

    /// `q²∇u^i = q∇p^i − p^i∇q`, polynomial.
    fn cleared_gradients(&self) -> [PolyVec; 4] {
        let q = &self.denominator;
        let gq = q.gradient();
        std::array::from_fn(|i| {
            let p = &self.numerators[i];
            let gp = p.gradient();
            std::array::from_fn(|k| &(q * &gp[k]) - &(p * &gq[k]))
        })
    }

    /// Exact Jacobian (4×3) at a point.
    pub fn jacobian_at(&self, x: &Point) -> Result<Matrix<Rational>> {
        let q = self.denominator_at(x)?;
        let q2 = q.clone() * q;
        let grads = self.cleared_gradients();
        Ok(Matrix::from_fn(4, 3, |i, k| grads[i][k].eval(x) / q2.clone()))
    }
}

/// A 2-form on `R³` with polynomial coefficients on `dx¹∧dx²`, `dx¹∧dx³`,
/// `dx²∧dx³`, divided by a polynomial weight (the cleared factor).
#[derive(Clone, Debug, PartialEq)]
pub struct PolyForm3 {
    c12: Poly,
    c13: Poly,
    c23: Poly,
    weight: Poly,
}

impl PolyForm3 {
    pub fn new(c12: Poly, c13: Poly, c23: Poly) -> Self {
        PolyForm3 { c12, c13, c23, weight: Poly::one() }
    }

    /// `b·⋆dx`.
    pub fn from_star(b: PolyVec) -> Self {
        let [b1, b2, b3] = b;
        PolyForm3 { c12: b3, c13: -&b2, c23: b1, weight: Poly::one() }
    }

    pub fn weight(&self) -> &Poly {
        &self.weight
    }

    /// Coefficients as a dimension-3 2-form at a point, weight included.
    pub fn at(&self, x: &Point) -> Result<crate::exterior::MultiVector<Rational>> {
        let w = self.weight.eval(x);
        if w == int(0) {
            return Err(Error::Degenerate("form undefined at point".into()));
        }
        crate::exterior::MultiVector::from_terms(
            3,
            2,
            &[
                (vec![0, 1], self.c12.eval(x) / w.clone()),
                (vec![0, 2], self.c13.eval(x) / w.clone()),
                (vec![1, 2], self.c23.eval(x) / w),
            ],
        )
    }
}

/// `b` with `β = b·⋆dx` (weight not applied).
pub fn star_coefficients(beta: &PolyForm3) -> PolyVec {
    [beta.c23.clone(), -&beta.c13, beta.c12.clone()]
}

fn star_at(beta: &PolyForm3, x: &Point) -> Result<[Rational; 3]> {
    let w = beta.weight.eval(x);
    if w == int(0) {
        return Err(Error::Degenerate("form undefined at point".into()));
    }
    let b = poly::eval_vec(&star_coefficients(beta), x);
    Ok(b.map(|c| c / w.clone()))
}

/// `du^i ∧ du^k` with the weight cleared.
fn wedge_of_differentials(g: &[PolyVec; 4], i: usize, k: usize) -> [Poly; 3] {
    let minor = |a: usize, b: usize| &(&g[i][a] * &g[k][b]) - &(&g[i][b] * &g[k][a]);
    [minor(0, 1), minor(0, 2), minor(1, 2)]
}

/// `(u*ω₀, u*φ₀)` with `ω₀ = dx¹∧dx³ − dx²∧dx⁴`, `φ₀ = dx¹∧dx⁴ + dx²∧dx³`.
pub fn pullback_splitting(u: &PolyMap) -> (PolyForm3, PolyForm3) {
    let g = u.cleared_gradients();
    let weight = u.denominator.pow(4);
    let combine = |a: [Poly; 3], b: [Poly; 3], sign: i64| {
        let s = int(sign);
        let [a12, a13, a23] = a;
        let [b12, b13, b23] = b;
        PolyForm3 {
            c12: &a12 + &b12.scale(&s),
            c13: &a13 + &b13.scale(&s),
            c23: &a23 + &b23.scale(&s),
            weight: weight.clone(),
        }
    };
    let beta1 = combine(wedge_of_differentials(&g, 0, 2), wedge_of_differentials(&g, 1, 3), -1);
    let beta2 = combine(wedge_of_differentials(&g, 0, 3), wedge_of_differentials(&g, 1, 2), 1);
    (beta1, beta2)
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdaptedCoframe {
    /// `eta[k]` holds the components of `η_{k+1}` in the basis `dx`.
    pub eta: [[f64; 3]; 3],
}

impl AdaptedCoframe {
    /// `max |β₁ − η₂∧η₁|, |β₂ − η₂∧η₃|` over the `⋆dx` components.
    pub fn reconstruction_residual(&self, b1: &[f64; 3], b2: &[f64; 3]) -> f64 {
        let [e1, e2, e3] = &self.eta;
        let r1 = cross(e2, e1);
        let r2 = cross(e2, e3);
        (0..3)
            .map(|i| (r1[i] - b1[i]).abs().max((r2[i] - b2[i]).abs()))
            .fold(0.0, f64::max)
    }

    /// Coefficient of `η₁∧η₂∧η₃` on `dx¹∧dx²∧dx³`.
    pub fn volume(&self) -> f64 {
        Matrix::from_rows(self.eta.iter().map(|r| r.to_vec()).collect()).determinant()
    }
}

/// `e = b₁×b₂/|b₁×b₂|`, `η₁ = (b₁×e)·dx`, `η₂ = e·dx`, `η₃ = (b₂×e)·dx`.
pub fn adapted_coframe_from_b(b1: &[f64; 3], b2: &[f64; 3], tol: f64) -> Result<AdaptedCoframe> {
    let n = cross(b1, b2);
    let norm = dot(&n, &n).sqrt();
    if norm <= tol {
        return Err(Error::Degenerate("β₁, β₂ dependent".into()));
    }
    let e = n.map(|c| c / norm);
    Ok(AdaptedCoframe { eta: [cross(b1, &e), e, cross(b2, &e)] })
}

pub fn adapted_coframe_at(beta1: &PolyForm3, beta2: &PolyForm3, x: &Point, tol: f64) -> Result<AdaptedCoframe> {
    let b1 = star_at(beta1, x)?;
    let b2 = star_at(beta2, x)?;
    if cross(&b1, &b2).iter().all(|c| *c == int(0)) {
        return Err(Error::Degenerate("β₁, β₂ dependent".into()));
    }
    adapted_coframe_from_b(&b1.map(|c| c.to_f64()), &b2.map(|c| c.to_f64()), tol)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PathGeometrySample {
    pub point: Point,
    pub p1: [Rational; 3],
    pub p2: [Rational; 3],
    pub contact: bool,
}

/// `P₁ ∥ b₁`, `P₂ ∥ b₂`: `η₁` and `η₂` both annihilate `b₁` because
/// `(b₁×e)·b₁ = 0` and `e·b₁ = 0`; likewise for `b₂`.
pub fn line_fields_at(beta1: &PolyForm3, beta2: &PolyForm3, x: &Point) -> Result<PathGeometrySample> {
    let p1 = star_at(beta1, x)?;
    let p2 = star_at(beta2, x)?;
    if cross(&p1, &p2).iter().all(|c| *c == int(0)) {
        return Err(Error::Degenerate("β₁, β₂ dependent".into()));
    }
    let contact = is_nondegenerate_at(beta1, beta2, x)?;
    Ok(PathGeometrySample { point: x.clone(), p1, p2, contact })
}

/// `μ ∧ dμ ≠ 0` at `x` for `μ = (b₁×b₂)·dx`; `μ ∧ dμ = (m·curl m) dx¹²³`.
pub fn contact_density(beta1: &PolyForm3, beta2: &PolyForm3) -> Poly {
    let m = poly::cross(&star_coefficients(beta1), &star_coefficients(beta2));
    poly::dot(&m, &poly::curl(&m))
}

pub fn is_nondegenerate_at(beta1: &PolyForm3, beta2: &PolyForm3, x: &Point) -> Result<bool> {
    let m = poly::cross(&star_coefficients(beta1), &star_coefficients(beta2));
    if poly::eval_vec(&m, x).iter().all(|c| *c == int(0)) {
        return Err(Error::Degenerate("β₁, β₂ dependent".into()));
    }
    Ok(contact_density(beta1, beta2).eval(x) != int(0))
}

#[derive(Clone, Debug, PartialEq)]
pub struct CRSample {
    pub point: Point,
    /// Basis of `D` pulled back to parameter space.
    pub d: [[Rational; 3]; 2],
    /// `I` in the basis `d`: `J₀ du(d_k) = du(Σ_l i[l][k] d_l)`.
    pub i: [[Rational; 2]; 2],
}

impl CRSample {
    pub fn i_squared_residual(&self) -> f64 {
        let m = Matrix::from_rows(self.i.iter().map(|r| r.to_vec()).collect());
        m.mul(&m).add(&Matrix::identity(2)).max_abs()
    }
}

fn coordinates_in(basis: &[Vec<Rational>], v: &[Rational]) -> Option<Vec<Rational>> {
    let b = Matrix::from_columns(basis);
    let bt = b.transpose();
    let c = bt.mul(&b).solve(&bt.apply(v), 0.0).ok()?;
    (b.apply(&c) == v).then_some(c)
}

fn to3(v: &[Rational]) -> [Rational; 3] {
    [v[0].clone(), v[1].clone(), v[2].clone()]
}

/// `D = T ∩ J₀T` and `I = J₀|_D`, with `T = du(R³)`.
pub fn cr_structure_at(u: &PolyMap, x: &Point) -> Result<CRSample> {
    let jac = u.jacobian_at(x)?;
    let rank = jac.rank(0.0);
    if rank < 3 {
        return Err(Error::RankDrop(rank));
    }
    let j_jac = standard_j::<Rational>().mul(&jac);
    // (a, b) with du(a) = J₀ du(b)
    let stacked = Matrix::from_fn(4, 6, |r, c| if c < 3 { jac[(r, c)].clone() } else { -j_jac[(r, c - 3)].clone() });
    let kernel = stacked.kernel(0.0);
    if kernel.len() != 2 {
        return Err(Error::ComplexTangent(kernel.len()));
    }
    let d: Vec<Vec<Rational>> = kernel.iter().map(|k| k[..3].to_vec()).collect();
    let mut i = [[int(0), int(0)], [int(0), int(0)]];
    for (col, dk) in d.iter().enumerate() {
        let image = j_jac.apply(dk);
        // J₀ du(d_k) = du(w) for a unique w ∈ span(d)
        let w = jac
            .transpose()
            .mul(&jac)
            .solve(&jac.transpose().apply(&image), 0.0)?;
        if jac.apply(&w) != image {
            return Err(Error::Internal("J₀ does not preserve D".into()));
        }
        let c = coordinates_in(&d, &w).ok_or_else(|| Error::Internal("I(D) ⊄ D".into()))?;
        i[0][col] = c[0].clone();
        i[1][col] = c[1].clone();
    }
    Ok(CRSample { point: x.clone(), d: [to3(&d[0]), to3(&d[1])], i })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Compatibility {
    pub compatible: bool,
    /// Sine of the angle between `J₀ du(P₁)` and `du(P₂)`.
    pub angle_residual: f64,
}

/// Checks `D = P₁ ⊕ P₂` and `I(P₁) = P₂` at a nondegenerate point.
pub fn compatibility_check(u: &PolyMap, x: &Point) -> Result<Compatibility> {
    let (beta1, beta2) = pullback_splitting(u);
    let sample = line_fields_at(&beta1, &beta2, x)?;
    if !sample.contact {
        return Err(Error::Degenerate("path geometry is not contact at point".into()));
    }
    let cr = cr_structure_at(u, x)?;
    let jac = u.jacobian_at(x)?;
    let w1 = jac.apply(&sample.p1);
    let w2 = jac.apply(&sample.p2);
    let jw1 = standard_j::<Rational>().apply(&w1);

    let parallel = Matrix::from_rows(vec![jw1.clone(), w2.clone()]).rank(0.0) == 1;
    let d: Vec<Vec<Rational>> = cr.d.iter().map(|v| v.to_vec()).collect();
    let in_d = coordinates_in(&d, &sample.p1).is_some() && coordinates_in(&d, &sample.p2).is_some();

    let a: Vec<f64> = jw1.iter().map(Field::to_f64).collect();
    let b: Vec<f64> = w2.iter().map(Field::to_f64).collect();
    let (aa, bb, ab) = (dot(&a, &a), dot(&b, &b), dot(&a, &b));
    let angle_residual = ((aa * bb - ab * ab).max(0.0)).sqrt() / (aa.sqrt() * bb.sqrt());
    Ok(Compatibility { compatible: parallel && in_d, angle_residual })
}

fn rationals_json(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(rational_value).collect())
}

/// Per-point report. Degenerate points are recorded, not fatal.
pub fn point_record(u: &PolyMap, x: &Point, tol: f64) -> Value {
    let mut rec = json!({ "point": rationals_json(x) });
    let (beta1, beta2) = pullback_splitting(u);
    let mut errors = Vec::new();
    match (star_at(&beta1, x), star_at(&beta2, x)) {
        (Ok(b1), Ok(b2)) => {
            rec["beta1"] = rationals_json(&b1);
            rec["beta2"] = rationals_json(&b2);
        }
        (Err(e), _) | (_, Err(e)) => errors.push(e.to_string()),
    }
    match adapted_coframe_at(&beta1, &beta2, x, tol) {
        Ok(cf) => {
            rec["coframe"] = Value::Array(
                cf.eta.iter().map(|r| Value::Array(r.iter().copied().map(num17).collect())).collect(),
            )
        }
        Err(e) => errors.push(format!("coframe: {e}")),
    }
    match line_fields_at(&beta1, &beta2, x) {
        Ok(s) => {
            rec["P1"] = rationals_json(&s.p1);
            rec["P2"] = rationals_json(&s.p2);
            rec["contact"] = Value::Bool(s.contact);
        }
        Err(e) => {
            rec["contact"] = Value::Null;
            errors.push(format!("path geometry: {e}"));
        }
    }
    match cr_structure_at(u, x) {
        Ok(cr) => {
            rec["cr"] = json!({
                "D": cr.d.iter().map(|v| rationals_json(v)).collect::<Vec<_>>(),
                "I": cr.i.iter().map(|r| rationals_json(r)).collect::<Vec<_>>(),
            })
        }
        Err(e) => errors.push(format!("cr: {e}")),
    }
    match compatibility_check(u, x) {
        Ok(c) => {
            rec["compatible"] = Value::Bool(c.compatible);
            rec["angle_residual"] = num17(c.angle_residual);
        }
        Err(e) => {
            rec["compatible"] = Value::Null;
            errors.push(format!("compatibility: {e}"));
        }
    }
    if !errors.is_empty() {
        rec["errors"] = json!(errors);
    }
    rec
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    exp: Exponent,
    c: Value,
}

#[derive(Serialize, Deserialize)]
struct PolyMapRepr {
    vars: Vec<String>,
    components: Vec<Vec<TermRepr>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    denominator: Option<Vec<TermRepr>>,
}

fn poly_from_repr(terms: Vec<TermRepr>) -> Result<Poly> {
    let mut out = Vec::with_capacity(terms.len());
    for t in terms {
        out.push((t.exp, rational_from_value(&t.c)?));
    }
    Ok(Poly::from_terms(out))
}

fn poly_to_repr(p: &Poly) -> Vec<TermRepr> {
    p.terms().map(|(e, c)| TermRepr { exp: *e, c: rational_value(c) }).collect()
}

impl PolyMap {
    pub fn from_json(v: &Value) -> Result<Self> {
        let repr: PolyMapRepr = serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        if repr.vars.len() != 3 {
            return Err(Error::DimensionMismatch { expected: 3, got: repr.vars.len() });
        }
        if repr.components.len() != 4 {
            return Err(Error::DimensionMismatch { expected: 4, got: repr.components.len() });
        }
        let mut comps = Vec::with_capacity(4);
        for c in repr.components {
            comps.push(poly_from_repr(c)?);
        }
        let numerators: [Poly; 4] = comps.try_into().expect("length checked");
        match repr.denominator {
            Some(d) => PolyMap::rational(numerators, poly_from_repr(d)?),
            None => Ok(PolyMap::new(numerators)),
        }
    }

    pub fn to_json(&self) -> Value {
        let repr = PolyMapRepr {
            vars: vec!["x1".into(), "x2".into(), "x3".into()],
            components: self.numerators.iter().map(poly_to_repr).collect(),
            denominator: (self.denominator != Poly::one()).then(|| poly_to_repr(&self.denominator)),
        };
        serde_json::to_value(repr).expect("serializable")
    }
}

pub fn point_from_json(v: &Value) -> Result<Point> {
    let arr = v.as_array().ok_or_else(|| Error::Parse(format!("expected point array, got {v}")))?;
    if arr.len() != 3 {
        return Err(Error::DimensionMismatch { expected: 3, got: arr.len() });
    }
    Ok([rational_from_value(&arr[0])?, rational_from_value(&arr[1])?, rational_from_value(&arr[2])?])
}

/// Seeded rational points `p/q` with `1 ≤ q ≤ 16` and `|p/q| ≤ 5`.
pub fn random_points(n: usize, seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || {
        let q: i64 = rng.gen_range(1..=16);
        let p: i64 = rng.gen_range(-5 * q..=5 * q);
        Rational::new(p.into(), q.into())
    };
    (0..n).map(|_| [draw(), draw(), draw()]).collect()
}

/// Standard examples.
pub mod fixtures {
    use super::*;

    /// `(t, w₁, w₂) ↦ (w₁, w₂, t, w₁² + w₂²)`, i.e.
    /// `z¹ = w₁ + iw₂`, `z² = t + i|z¹|²`.
    pub fn heisenberg() -> PolyMap {
        let (t, w1, w2) = (Poly::var(0), Poly::var(1), Poly::var(2));
        let r2 = &(&w1 * &w1) + &(&w2 * &w2);
        PolyMap::new([w1, w2, t, r2])
    }

    /// `x ↦ (x¹, x², x³, 0)`, a Levi-flat hyperplane.
    pub fn affine_plane() -> PolyMap {
        PolyMap::new([Poly::var(0), Poly::var(1), Poly::var(2), Poly::zero()])
    }

    /// Inverse stereographic chart of the unit sphere `S³`:
    /// `x ↦ (2x, |x|² − 1) / (|x|² + 1)`.
    pub fn sphere_chart() -> PolyMap {
        let r2 = (0..3).fold(Poly::zero(), |acc, i| &acc + &Poly::var(i).pow(2));
        let two = int(2);
        PolyMap::rational(
            [Poly::var(0).scale(&two), Poly::var(1).scale(&two), Poly::var(2).scale(&two), &r2 - &Poly::one()],
            &r2 + &Poly::one(),
        )
        .expect("nonzero denominator")
    }
}
