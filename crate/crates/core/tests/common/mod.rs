#![allow(dead_code)]

use num_traits::Zero;
use pathgeom::eds::{Component, ModelCoframe, CurvatureSample};
use pathgeom::pairs::{standard_omega, standard_phi};
use pathgeom::scalar::{int, rat, Rational};
use pathgeom::{Matrix, MultiVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn small_rational(r: &mut ChaCha8Rng, bound: i64) -> Rational {
    let q: i64 = r.gen_range(1..=6);
    rat(r.gen_range(-bound * q..=bound * q), q)
}

/// Integer 4×4 matrix with positive determinant.
pub fn gl_plus(r: &mut ChaCha8Rng) -> Matrix<Rational> {
    loop {
        let mut m = Matrix::from_fn(4, 4, |_, _| int(r.gen_range(-3..=3)));
        let det = m.determinant();
        if det.is_zero() {
            continue;
        }
        if det < int(0) {
            m = Matrix::from_fn(4, 4, |i, j| if i == 0 { -m[(i, j)].clone() } else { m[(i, j)].clone() });
        }
        return m;
    }
}

/// Integer 4×3 matrix of rank 3.
pub fn injective_4x3(r: &mut ChaCha8Rng) -> Matrix<Rational> {
    loop {
        let m = Matrix::from_fn(4, 3, |_, _| int(r.gen_range(-3..=3)));
        if m.rank(0.0) == 3 {
            return m;
        }
    }
}

pub fn random_two_form(r: &mut ChaCha8Rng, bound: i64) -> MultiVector<Rational> {
    let mut terms = Vec::new();
    for i in 0..4 {
        for j in i + 1..4 {
            terms.push((vec![i, j], int(r.gen_range(-bound..=bound))));
        }
    }
    MultiVector::from_terms(4, 2, &terms).unwrap()
}

/// `⟨ω, φ⟩` for the standard volume form, written out from the six
/// complementary index pairs.
pub fn oracle_pairing(w: &MultiVector<Rational>, f: &MultiVector<Rational>) -> Rational {
    let c = |m: &MultiVector<Rational>, i: usize, j: usize| m.coeff(&[i - 1, j - 1]);
    c(w, 1, 2) * c(f, 3, 4) - c(w, 1, 3) * c(f, 2, 4) + c(w, 1, 4) * c(f, 2, 3) + c(w, 2, 3) * c(f, 1, 4)
        - c(w, 2, 4) * c(f, 1, 3)
        + c(w, 3, 4) * c(f, 1, 2)
}

pub fn oracle_pairing_f64(w: &MultiVector<f64>, f: &MultiVector<f64>) -> f64 {
    let c = |m: &MultiVector<f64>, i: usize, j: usize| m.coeff(&[i - 1, j - 1]);
    c(w, 1, 2) * c(f, 3, 4) - c(w, 1, 3) * c(f, 2, 4) + c(w, 1, 4) * c(f, 2, 3) + c(w, 2, 3) * c(f, 1, 4)
        - c(w, 2, 4) * c(f, 1, 3)
        + c(w, 3, 4) * c(f, 1, 2)
}

/// Ellipticity as definiteness of the 2×2 Gram matrix.
pub fn oracle_elliptic(w: &MultiVector<Rational>, f: &MultiVector<Rational>) -> bool {
    let (a, b, d) = (oracle_pairing(w, w), oracle_pairing(w, f), oracle_pairing(f, f));
    let definite_pos = a > int(0) && a.clone() * d.clone() - b.clone() * b.clone() > int(0);
    let definite_neg = a < int(0) && a * d - b.clone() * b > int(0);
    definite_pos || definite_neg
}

/// Elliptic pair `A*(ω₀ + c φ₀, a ω₀ + b φ₀)` with `b ≠ c a`.
pub fn elliptic_pair(r: &mut ChaCha8Rng) -> (MultiVector<Rational>, MultiVector<Rational>) {
    let a = gl_plus(r);
    loop {
        let (p, q, s, t) = (small_rational(r, 3), small_rational(r, 3), small_rational(r, 3), small_rational(r, 3));
        if (p.clone() * t.clone() - q.clone() * s.clone()).is_zero() {
            continue;
        }
        let w = &standard_omega::<Rational>().scale(&p) + &standard_phi::<Rational>().scale(&q);
        let f = &standard_omega::<Rational>().scale(&s) + &standard_phi::<Rational>().scale(&t);
        return (w.pullback(&a).unwrap(), f.pullback(&a).unwrap());
    }
}

/// Degree following the existence argument literally: write
/// `ω′ = a ω + φ` with `ω∧φ = 0`, rescale `ω′` so that `φ∧φ = ω∧ω` and
/// `a ≥ 0`; the resulting coefficient is the degree.
pub fn oracle_degree(w: &MultiVector<f64>, w2: &MultiVector<f64>) -> f64 {
    let ww = oracle_pairing_f64(w, w);
    let a = oracle_pairing_f64(w, w2) / ww;
    let phi = w2 - &w.scale(&a);
    assert!(oracle_pairing_f64(w, &phi).abs() <= 1e-9 * ww.abs().max(1.0));
    let scale = (ww / oracle_pairing_f64(&phi, &phi)).sqrt();
    let scale = if a < 0.0 { -scale } else { scale };
    a * scale
}

/// The Cartan connection and curvature evaluated on a tangent vector, as
/// 3×3 matrices.
pub fn theta_matrix(v: &[Rational]) -> [[Rational; 3]; 3] {
    let s = |i, j| ModelCoframe::slot(Component::Theta(i, j)).map(|k| v[k].clone());
    let mut m: [[Rational; 3]; 3] = Default::default();
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] = s(i, j).unwrap_or_else(|| -(v[0].clone() + v[4].clone()));
        }
    }
    m
}

fn th(v: &[Rational], i: usize, j: usize) -> Rational {
    theta_matrix(v)[i][j].clone()
}

fn two(a: (usize, usize), b: (usize, usize), x: &[Rational], y: &[Rational]) -> Rational {
    th(x, a.0, a.1) * th(y, b.0, b.1) - th(y, a.0, a.1) * th(x, b.0, b.1)
}

pub fn curvature_matrix(k: &CurvatureSample, x: &[Rational], y: &[Rational]) -> [[Rational; 3]; 3] {
    let mut m: [[Rational; 3]; 3] = Default::default();
    m[0][1] = k.w1.clone() * two((1, 0), (2, 0), x, y);
    m[0][2] = k.w2.clone() * two((1, 0), (2, 0), x, y) + k.f2.clone() * two((2, 1), (2, 0), x, y);
    m[1][2] = k.f1.clone() * two((2, 1), (2, 0), x, y);
    m
}

/// `dθ(X, Y) = Θ(X, Y) − [θ(X), θ(Y)]`.
pub fn d_theta(k: &CurvatureSample, x: &[Rational], y: &[Rational]) -> [[Rational; 3]; 3] {
    let (a, b) = (theta_matrix(x), theta_matrix(y));
    let c = curvature_matrix(k, x, y);
    let mut out: [[Rational; 3]; 3] = Default::default();
    for i in 0..3 {
        for j in 0..3 {
            let mut commutator = int(0);
            for m in 0..3 {
                commutator += a[i][m].clone() * b[m][j].clone() - b[i][m].clone() * a[m][j].clone();
            }
            out[i][j] = c[i][j].clone() - commutator;
        }
    }
    out
}

fn dx(v: &[Rational], l: usize) -> Rational {
    v[8 + l].clone()
}

fn dx2(a: usize, b: usize, x: &[Rational], y: &[Rational]) -> Rational {
    dx(x, a) * dx(y, b) - dx(y, a) * dx(x, b)
}

/// `χ₁(X, Y)`, `χ₂(X, Y)` from the definitions.
pub fn oracle_chi(x: &[Rational], y: &[Rational]) -> [Rational; 2] {
    let omega0 = dx2(0, 2, x, y) - dx2(1, 3, x, y);
    let phi0 = dx2(0, 3, x, y) + dx2(1, 2, x, y);
    [two((2, 0), (1, 0), x, y) - omega0, two((2, 0), (2, 1), x, y) - phi0]
}

/// `dχ₁ = dθ²₀∧θ¹₀ − θ²₀∧dθ¹₀`, `dχ₂ = dθ²₀∧θ²₁ − θ²₀∧dθ²₁` on `(X, Y, Z)`.
pub fn oracle_d_chi(k: &CurvatureSample, x: &[Rational], y: &[Rational], z: &[Rational]) -> [Rational; 2] {
    // (α∧λ)(X,Y,Z) = α(X,Y)λ(Z) − α(X,Z)λ(Y) + α(Y,Z)λ(X)
    let wedge21 = |alpha: &dyn Fn(&[Rational], &[Rational]) -> Rational, lam: &dyn Fn(&[Rational]) -> Rational| {
        alpha(x, y) * lam(z) - alpha(x, z) * lam(y) + alpha(y, z) * lam(x)
    };
    let d = |i: usize, j: usize| move |p: &[Rational], q: &[Rational]| d_theta(k, p, q)[i][j].clone();
    let t = |i: usize, j: usize| move |p: &[Rational]| th(p, i, j);
    // λ∧α = α∧λ for a 1-form λ and a 2-form α
    let chi1 = wedge21(&d(2, 0), &t(1, 0)) - wedge21(&d(1, 0), &t(2, 0));
    let chi2 = wedge21(&d(2, 0), &t(2, 1)) - wedge21(&d(2, 1), &t(2, 0));
    [chi1, chi2]
}
