//! Pointwise Cartan test for the ideal `(χ₁, χ₂)` on `N = B × R⁴`, where
//! `B` carries the Cartan connection `θ` of a path geometry and
//!
//! ```text
//! χ₁ = θ²₀∧θ¹₀ − ω₀,   χ₂ = θ²₀∧θ²₁ − φ₀,   ζ = θ¹₀∧θ²₀∧θ²₁.
//! ```
//!
//! Everything happens in `T_qN ≅ R¹²` with the coframe
//! `(θ⁰₀, θ⁰₁, θ⁰₂, θ¹₀, θ¹₁, θ¹₂, θ²₀, θ²₁, dx¹, dx², dx³, dx⁴)`;
//! `θ²₂ = −θ⁰₀ − θ¹₁` is eliminated. Exterior derivatives at `q` come from
//! the structure equations `dθ = Θ − θ∧θ`. All arithmetic is exact.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exterior::MultiVector;
use crate::json::rational_value;
use crate::linalg::{rank_of, Matrix};
use crate::scalar::{int, Rational};

pub const DIM: usize = 12;
/// `dim G₃(T_qN)` fiber: `3 · (12 − 3)`.
pub const GRASSMANNIAN_FIBER: usize = 27;

/// A basis slot of `T_qN*`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Component {
    Theta(usize, usize),
    Dx(usize),
}

/// Index map between components and slots.
pub struct ModelCoframe;

const THETA_SLOTS: [(usize, usize); 8] = [(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2), (2, 0), (2, 1)];

impl ModelCoframe {
    /// Slot of `θ^i_j` (`None` for the eliminated `θ²₂`) or `dx^{l+1}`.
    pub fn slot(c: Component) -> Option<usize> {
        match c {
            Component::Theta(i, j) => THETA_SLOTS.iter().position(|&p| p == (i, j)),
            Component::Dx(l) if l < 4 => Some(8 + l),
            Component::Dx(_) => None,
        }
    }

    pub fn component(slot: usize) -> Option<Component> {
        match slot {
            0..=7 => Some(Component::Theta(THETA_SLOTS[slot].0, THETA_SLOTS[slot].1)),
            8..=11 => Some(Component::Dx(slot - 8)),
            _ => None,
        }
    }

    /// The 1-form `θ^i_j`, with `θ²₂ = −θ⁰₀ − θ¹₁`.
    pub fn theta(i: usize, j: usize) -> MultiVector<Rational> {
        match Self::slot(Component::Theta(i, j)) {
            Some(s) => MultiVector::basis(DIM, s),
            None => {
                assert!((i, j) == (2, 2), "θ index out of range");
                -&(&Self::theta(0, 0) + &Self::theta(1, 1))
            }
        }
    }

    /// `dx^{l+1}`.
    pub fn dx(l: usize) -> MultiVector<Rational> {
        MultiVector::basis(DIM, 8 + l)
    }

    /// A tangent vector `Σ c · (T^i_j or ∂_{x^l})`.
    pub fn vector(terms: &[(Component, i64)]) -> Vec<Rational> {
        let mut v = vec![int(0); DIM];
        for &(c, k) in terms {
            let s = Self::slot(c).expect("valid component");
            v[s] = v[s].clone() + int(k);
        }
        v
    }
}

/// Values of the curvature functions `𝒲₁, 𝒲₂, ℱ₁, ℱ₂` at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureSample {
    pub w1: Rational,
    pub w2: Rational,
    pub f1: Rational,
    pub f2: Rational,
}

impl CurvatureSample {
    pub fn new(w1: Rational, w2: Rational, f1: Rational, f2: Rational) -> Self {
        CurvatureSample { w1, w2, f1, f2 }
    }

    pub fn zero() -> Self {
        CurvatureSample::new(int(0), int(0), int(0), int(0))
    }
}

fn wedge(a: &MultiVector<Rational>, b: &MultiVector<Rational>) -> MultiVector<Rational> {
    a.wedge(b).expect("degrees fit in dimension 12")
}

fn zero_form(degree: usize) -> MultiVector<Rational> {
    MultiVector::zero(DIM, degree).expect("valid degree")
}

/// `Θ^i_j`: only the entries above the diagonal in the first two rows are
/// nonzero.
pub fn curvature(i: usize, j: usize, k: &CurvatureSample) -> MultiVector<Rational> {
    let t = ModelCoframe::theta;
    match (i, j) {
        (0, 1) => wedge(&t(1, 0), &t(2, 0)).scale(&k.w1),
        (0, 2) => wedge(&(&t(1, 0).scale(&k.w2) + &t(2, 1).scale(&k.f2)), &t(2, 0)),
        (1, 2) => wedge(&t(2, 1), &t(2, 0)).scale(&k.f1),
        _ => zero_form(2),
    }
}

/// `dθ^i_j = Θ^i_j − Σ_k θ^i_k∧θ^k_j` at `q`.
pub fn structure_d(i: usize, j: usize, k: &CurvatureSample) -> MultiVector<Rational> {
    let t = ModelCoframe::theta;
    (0..3).fold(curvature(i, j, k), |acc, m| &acc - &wedge(&t(i, m), &t(m, j)))
}

pub fn omega0() -> MultiVector<Rational> {
    let dx = ModelCoframe::dx;
    &wedge(&dx(0), &dx(2)) - &wedge(&dx(1), &dx(3))
}

pub fn phi0() -> MultiVector<Rational> {
    let dx = ModelCoframe::dx;
    &wedge(&dx(0), &dx(3)) + &wedge(&dx(1), &dx(2))
}

/// Generators of the ideal at `q` and their exterior derivatives.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstantIdeal {
    pub chi: Vec<MultiVector<Rational>>,
    pub dchi: Vec<MultiVector<Rational>>,
}

impl ConstantIdeal {
    /// The same ideal with generator `index` removed.
    pub fn without(&self, index: usize) -> Self {
        let mut out = self.clone();
        out.chi.remove(index);
        out.dchi.remove(index);
        out
    }

    /// `dχ_i` followed by `χ_i∧ζ^k`, `k = 1, 2, 3`.
    pub fn three_form_conditions(&self) -> Vec<MultiVector<Rational>> {
        let mut out = self.dchi.clone();
        for chi in &self.chi {
            out.extend(zeta_factors().iter().map(|z| wedge(chi, z)));
        }
        out
    }
}

pub fn ideal_at(k: &CurvatureSample) -> ConstantIdeal {
    let t = ModelCoframe::theta;
    let (t10, t20, t21) = (t(1, 0), t(2, 0), t(2, 1));
    let (d10, d20, d21) = (structure_d(1, 0, k), structure_d(2, 0, k), structure_d(2, 1, k));
    let chi1 = &wedge(&t20, &t10) - &omega0();
    let chi2 = &wedge(&t20, &t21) - &phi0();
    // dω₀ = dφ₀ = 0
    let dchi1 = &wedge(&d20, &t10) - &wedge(&t20, &d10);
    let dchi2 = &wedge(&d20, &t21) - &wedge(&t20, &d21);
    ConstantIdeal { chi: vec![chi1, chi2], dchi: vec![dchi1, dchi2] }
}

/// `(ζ¹, ζ², ζ³) = (θ¹₀, θ²₀, θ²₁)`.
pub fn zeta_factors() -> [MultiVector<Rational>; 3] {
    let t = ModelCoframe::theta;
    [t(1, 0), t(2, 0), t(2, 1)]
}

pub fn zeta() -> MultiVector<Rational> {
    let [a, b, c] = zeta_factors();
    wedge(&wedge(&a, &b), &c)
}

/// The flag `E¹ ⊂ E² ⊂ E³` spanned by `v₁`, `v₂`, `v₃`.
#[derive(Clone, Debug, PartialEq)]
pub struct Flag {
    pub v: [Vec<Rational>; 3],
}

impl Flag {
    pub fn new(v: [Vec<Rational>; 3]) -> Result<Self> {
        if rank_of(&v, 0.0) < 3 {
            return Err(Error::DependentVectors);
        }
        Ok(Flag { v })
    }

    /// `v₁ = T¹₀+T²₀+T²₁+∂x⁴`, `v₂ = T⁰₀+T¹₀−T²₁+∂x¹+∂x²`, `v₃ = T¹₁−T²₁+∂x¹`.
    pub fn standard() -> Self {
        use Component::{Dx, Theta};
        let vec = ModelCoframe::vector;
        Flag {
            v: [
                vec(&[(Theta(1, 0), 1), (Theta(2, 0), 1), (Theta(2, 1), 1), (Dx(3), 1)]),
                vec(&[(Theta(0, 0), 1), (Theta(1, 0), 1), (Theta(2, 1), -1), (Dx(0), 1), (Dx(1), 1)]),
                vec(&[(Theta(1, 1), 1), (Theta(2, 1), -1), (Dx(0), 1)]),
            ],
        }
    }

    /// `E^k`.
    pub fn level(&self, k: usize) -> &[Vec<Rational>] {
        &self.v[..k]
    }
}

fn eval(form: &MultiVector<Rational>, vectors: &[&Vec<Rational>]) -> Rational {
    let owned: Vec<Vec<Rational>> = vectors.iter().map(|v| (*v).clone()).collect();
    form.evaluate(&owned).expect("arity and dimension match")
}

fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |a| (a + 1..n).map(move |b| (a, b)))
}

fn triples(n: usize) -> impl Iterator<Item = (usize, usize, usize)> {
    (0..n).flat_map(move |a| (a + 1..n).flat_map(move |b| (b + 1..n).map(move |c| (a, b, c))))
}

/// `χ_i` vanish on all pairs and `dχ_i` on all triples of `e`.
pub fn is_integral_element(e: &[Vec<Rational>], ideal: &ConstantIdeal) -> Result<bool> {
    if e.iter().any(|v| v.len() != DIM) {
        return Err(Error::DimensionMismatch { expected: DIM, got: e.iter().map(Vec::len).find(|&l| l != DIM).unwrap_or(0) });
    }
    if rank_of(e, 0.0) < e.len() {
        return Err(Error::DependentVectors);
    }
    let two = pairs(e.len()).all(|(a, b)| ideal.chi.iter().all(|c| eval(c, &[&e[a], &e[b]]).is_zero()));
    let three = triples(e.len())
        .all(|(a, b, c)| ideal.dchi.iter().all(|d| eval(d, &[&e[a], &e[b], &e[c]]).is_zero()));
    Ok(two && three)
}

/// Rows of the polar equations `χ_i(w, ·)`, `dχ_i(w₁, w₂, ·)` for `w ∈ e`.
fn polar_equations(e: &[Vec<Rational>], ideal: &ConstantIdeal) -> Vec<Vec<Rational>> {
    let mut rows = Vec::new();
    for w in e {
        for chi in &ideal.chi {
            rows.push(chi.contract(w).expect("dimension 12").coefficients().to_vec());
        }
    }
    for (a, b) in pairs(e.len()) {
        for d in &ideal.dchi {
            let form = d.contract(&e[a]).and_then(|f| f.contract(&e[b])).expect("dimension 12");
            rows.push(form.coefficients().to_vec());
        }
    }
    rows
}

/// Exact basis of the polar space `H(e)`.
pub fn polar_space(e: &[Vec<Rational>], ideal: &ConstantIdeal) -> Result<Vec<Vec<Rational>>> {
    if !is_integral_element(e, ideal)? {
        return Err(Error::NotIntegral);
    }
    let rows = polar_equations(e, ideal);
    if rows.is_empty() {
        return Ok((0..DIM).map(|i| ModelCoframe::vector(&[(ModelCoframe::component(i).unwrap(), 1)])).collect());
    }
    Ok(Matrix::from_rows(rows).kernel(0.0))
}

fn polar_codim(e: &[Vec<Rational>], ideal: &ConstantIdeal) -> Result<usize> {
    Ok(DIM - polar_space(e, ideal)?.len())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Characters {
    pub s: [usize; 4],
    /// `c₀ + c₁ + c₂`.
    pub codim_bound: usize,
    pub codim_actual: usize,
    pub involutive: bool,
}

/// Polar codimensions `c₀, c₁, c₂` along the flag.
pub fn polar_codims(flag: &Flag, ideal: &ConstantIdeal) -> Result<[usize; 3]> {
    Ok([polar_codim(flag.level(0), ideal)?, polar_codim(flag.level(1), ideal)?, polar_codim(flag.level(2), ideal)?])
}

pub fn characters(flag: &Flag, ideal: &ConstantIdeal) -> Result<Characters> {
    if !is_integral_element(flag.level(3), ideal)? {
        return Err(Error::NotIntegral);
    }
    let [c0, c1, c2] = polar_codims(flag, ideal)?;
    let s3 = (DIM - 3)
        .checked_sub(c2)
        .ok_or_else(|| Error::Internal(format!("polar codimension {c2} exceeds 9")))?;
    let codim_bound = c0 + c1 + c2;
    let codim_actual = codim_at(flag, ideal)?.rank;
    Ok(Characters { s: [c0, c1 - c0, c2 - c1, s3], codim_bound, codim_actual, involutive: codim_actual == codim_bound })
}

/// Unit vectors completing `e` to a basis of `T_qN`, scanned in slot order.
pub fn complement(e: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let mut basis: Vec<Vec<Rational>> = e.to_vec();
    let mut out = Vec::new();
    for i in 0..DIM {
        let mut u = vec![int(0); DIM];
        u[i] = int(1);
        basis.push(u.clone());
        if rank_of(&basis, 0.0) == basis.len() {
            out.push(u);
        } else {
            basis.pop();
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodimReport {
    /// Rank of the linearized conditions at `p = 0`.
    pub rank: usize,
    /// Dimension of the first-order solution space in the chart.
    pub free_parameters: usize,
}

/// Linearization of `Ψ(w₁, w₂, w₃) = 0` for each condition `Ψ` in the chart
/// `w_a = v_a + Σ_μ p_a^μ u_μ` at `p = 0`. Column `(a, μ)` holds `Ψ` with
/// `v_a` replaced by `u_μ`, read off from the 1-form that remains after
/// contracting `Ψ` with the other two vectors.
pub fn linearized_conditions(e: &[Vec<Rational>], conditions: &[MultiVector<Rational>]) -> Matrix<Rational> {
    assert_eq!(e.len(), 3, "linearization is at a 3-plane");
    let u = complement(e);
    let mut rows = Vec::with_capacity(conditions.len());
    for psi in conditions {
        let contract = |x: &Vec<Rational>, y: &Vec<Rational>| {
            psi.contract(x).and_then(|f| f.contract(y)).expect("dimension 12")
        };
        // Ψ(u, v₂, v₃) = Ψ(v₂, v₃, u), Ψ(v₁, u, v₃) = −Ψ(v₁, v₃, u)
        let slots = [contract(&e[1], &e[2]), -&contract(&e[0], &e[2]), contract(&e[0], &e[1])];
        let mut row = Vec::with_capacity(3 * u.len());
        for one_form in &slots {
            row.extend(u.iter().map(|mu| one_form.evaluate(std::slice::from_ref(mu)).expect("dimension 12")));
        }
        rows.push(row);
    }
    Matrix::from_rows(rows)
}

pub fn codim_of_conditions(e: &[Vec<Rational>], conditions: &[MultiVector<Rational>]) -> CodimReport {
    let rank = linearized_conditions(e, conditions).rank(0.0);
    CodimReport { rank, free_parameters: GRASSMANNIAN_FIBER - rank }
}

/// Codimension of `V³ ∩ G₃(TN, ζ)` at `E³`. Since the conditions are
/// polynomial in the chart, full rank of the linearization makes the
/// solution set a smooth submanifold of that codimension near `E³`.
pub fn codim_at(flag: &Flag, ideal: &ConstantIdeal) -> Result<CodimReport> {
    let e3 = flag.level(3);
    if !independence_check(&flag.v) {
        return Err(Error::IndependenceFails);
    }
    if !is_integral_element(e3, ideal)? {
        return Err(Error::NotIntegral);
    }
    let conditions = ideal.three_form_conditions();
    let report = codim_of_conditions(e3, &conditions);
    if report.rank == conditions.len() {
        // The conditions hold identically at p = 0 by integrality.
        let at_origin = conditions.iter().all(|c| eval(c, &[&e3[0], &e3[1], &e3[2]]).is_zero());
        if !at_origin {
            return Err(Error::Internal("conditions do not vanish at E³".into()));
        }
    }
    Ok(report)
}

/// `ζ(v₁, v₂, v₃) ≠ 0`.
pub fn independence_check(e: &[Vec<Rational>; 3]) -> bool {
    !eval(&zeta(), &[&e[0], &e[1], &e[2]]).is_zero()
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampleRecord {
    pub sample: CurvatureSample,
    pub integral: bool,
    pub zeta_nonzero: bool,
    pub characters: Option<Characters>,
    pub error: Option<String>,
}

impl SampleRecord {
    pub fn passed(&self) -> bool {
        self.integral
            && self.zeta_nonzero
            && self
                .characters
                .as_ref()
                .is_some_and(|c| c.s == EXPECTED_CHARACTERS && c.codim_actual == EXPECTED_CODIM && c.involutive)
    }

    pub fn to_json(&self) -> Value {
        let k = &self.sample;
        let mut v = json!({
            "W1": rational_value(&k.w1),
            "W2": rational_value(&k.w2),
            "F1": rational_value(&k.f1),
            "F2": rational_value(&k.f2),
            "integral": self.integral,
            "zeta_nonzero": self.zeta_nonzero,
        });
        match &self.characters {
            Some(c) => {
                v["characters"] = json!(c.s);
                v["codim"] = json!(c.codim_actual);
                v["codim_bound"] = json!(c.codim_bound);
                v["involutive"] = json!(c.involutive);
            }
            None => {
                v["characters"] = Value::Null;
                v["codim"] = Value::Null;
                v["involutive"] = json!(false);
            }
        }
        if let Some(e) = &self.error {
            v["error"] = json!(e);
        }
        v
    }
}

pub const EXPECTED_CHARACTERS: [usize; 4] = [0, 2, 4, 3];
pub const EXPECTED_CODIM: usize = 8;

#[derive(Clone, Debug, PartialEq, Default)]
pub struct InvolutivityReport {
    pub records: Vec<SampleRecord>,
}

impl InvolutivityReport {
    pub fn all_pass(&self) -> bool {
        self.records.iter().all(SampleRecord::passed)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "all_pass": self.all_pass(),
            "samples": self.records.iter().map(SampleRecord::to_json).collect::<Vec<_>>(),
        })
    }
}

/// Runs the full check for one curvature sample against a given ideal.
pub fn verify_sample(sample: &CurvatureSample, flag: &Flag, ideal: &ConstantIdeal) -> SampleRecord {
    let zeta_nonzero = independence_check(&flag.v);
    let (integral, error) = match is_integral_element(flag.level(3), ideal) {
        Ok(b) => (b, None),
        Err(e) => (false, Some(e.to_string())),
    };
    let (characters, error) = match (integral, error) {
        (true, None) => match characters(flag, ideal) {
            Ok(c) => (Some(c), None),
            Err(e) => (None, Some(e.to_string())),
        },
        (_, e) => (None, e.or_else(|| Some(Error::NotIntegral.to_string()))),
    };
    SampleRecord { sample: sample.clone(), integral, zeta_nonzero, characters, error }
}

pub fn verify_involutivity(samples: &[CurvatureSample]) -> InvolutivityReport {
    let flag = Flag::standard();
    InvolutivityReport { records: samples.iter().map(|k| verify_sample(k, &flag, &ideal_at(k))).collect() }
}

/// Seeded rationals `p/q` with `1 ≤ q ≤ 64`, uniform in `[−10, 10]` for
/// each denominator.
pub fn random_samples(n: usize, seed: u64) -> Vec<CurvatureSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || {
        let q: i64 = rng.gen_range(1..=64);
        let p: i64 = rng.gen_range(-10 * q..=10 * q);
        Rational::new(p.into(), q.into())
    };
    (0..n).map(|_| CurvatureSample::new(draw(), draw(), draw(), draw())).collect()
}
