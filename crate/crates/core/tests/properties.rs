mod common;

use common::*;
use num_traits::Zero;
use pathgeom::eds::{self, CurvatureSample, Flag, ModelCoframe, DIM};
use pathgeom::hypersurface::{self, adapted_coframe_from_b, pullback_splitting, PolyMap};
use pathgeom::pairs::{self, normal_form, pullback_pair_independent, standard_omega, standard_phi, EllipticPair};
use pathgeom::poly::Poly;
use pathgeom::scalar::{int, Rational};
use pathgeom::splitting::{self, plane_of, ComplexStructure, Splitting};
use pathgeom::{conformal_pairing, Matrix, MultiVector, VolumeForm};
use proptest::prelude::*;

const TOL: f64 = 1e-9;

fn form_from(dim: usize, degree: usize, coeffs: &[i64]) -> MultiVector<Rational> {
    let mut f = MultiVector::<Rational>::zero(dim, degree).unwrap();
    let mut k = 0;
    let mut idx = vec![0usize; degree];
    // fill monomials in lexicographic order, cycling through coeffs
    fn rec(
        f: &mut MultiVector<Rational>,
        idx: &mut Vec<usize>,
        pos: usize,
        start: usize,
        coeffs: &[i64],
        k: &mut usize,
    ) {
        if pos == idx.len() {
            let c = int(coeffs[*k % coeffs.len()]);
            *k += 1;
            *f = &*f + &MultiVector::monomial(f.dim(), idx, c).unwrap();
            return;
        }
        for i in start..f.dim() {
            idx[pos] = i;
            rec(f, idx, pos + 1, i + 1, coeffs, k);
        }
    }
    rec(&mut f, &mut idx, 0, 0, coeffs, &mut k);
    f
}

fn matrix_from(rows: usize, cols: usize, entries: &[i64]) -> Matrix<Rational> {
    Matrix::from_fn(rows, cols, |i, j| int(entries[(i * cols + j) % entries.len()]))
}

fn coeffs() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-4i64..=4, 1..24)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wedge_is_graded_commutative(p in 0usize..=3, q in 0usize..=3, a in coeffs(), b in coeffs()) {
        let (x, y) = (form_from(6, p, &a), form_from(6, q, &b));
        let xy = x.wedge(&y).unwrap();
        let yx = y.wedge(&x).unwrap();
        if (p * q) % 2 == 0 { prop_assert_eq!(xy, yx); } else { prop_assert_eq!(xy, -&yx); }
    }

    #[test]
    fn wedge_is_associative(a in coeffs(), b in coeffs(), c in coeffs()) {
        let (x, y, z) = (form_from(6, 1, &a), form_from(6, 2, &b), form_from(6, 2, &c));
        prop_assert_eq!(x.wedge(&y).unwrap().wedge(&z).unwrap(), x.wedge(&y.wedge(&z).unwrap()).unwrap());
    }

    #[test]
    fn pullback_is_natural(a in coeffs(), b in coeffs(), m in prop::collection::vec(-3i64..=3, 20), n in prop::collection::vec(-3i64..=3, 15)) {
        let (x, y) = (form_from(4, 1, &a), form_from(4, 2, &b));
        let am = matrix_from(4, 5, &m);
        let bm = matrix_from(5, 3, &n);
        prop_assert_eq!(
            x.wedge(&y).unwrap().pullback(&am).unwrap(),
            x.pullback(&am).unwrap().wedge(&y.pullback(&am).unwrap()).unwrap()
        );
        prop_assert_eq!(y.pullback(&am.mul(&bm)).unwrap(), y.pullback(&am).unwrap().pullback(&bm).unwrap());
    }

    #[test]
    fn wedge_of_covectors_evaluates_to_determinant(l in prop::collection::vec(-5i64..=5, 15), v in prop::collection::vec(-5i64..=5, 15)) {
        let covectors: Vec<MultiVector<Rational>> =
            (0..3).map(|i| MultiVector::one_form(&l[5 * i..5 * i + 5].iter().map(|&c| int(c)).collect::<Vec<_>>()).unwrap()).collect();
        let vectors: Vec<Vec<Rational>> = (0..3).map(|i| v[5 * i..5 * i + 5].iter().map(|&c| int(c)).collect()).collect();
        let product = covectors[0].wedge(&covectors[1]).unwrap().wedge(&covectors[2]).unwrap();
        let gram = Matrix::from_fn(3, 3, |i, j| covectors[i].evaluate(&[vectors[j].clone()]).unwrap());
        prop_assert_eq!(product.evaluate(&vectors).unwrap(), gram.determinant());
    }

    #[test]
    fn evaluation_is_alternating(a in coeffs(), v in prop::collection::vec(-5i64..=5, 15)) {
        let f = form_from(5, 3, &a);
        let vs: Vec<Vec<Rational>> = (0..3).map(|i| v[5 * i..5 * i + 5].iter().map(|&c| int(c)).collect()).collect();
        let swapped = vec![vs[1].clone(), vs[0].clone(), vs[2].clone()];
        prop_assert_eq!(f.evaluate(&vs).unwrap(), -f.evaluate(&swapped).unwrap());
        let contracted = f.contract(&vs[0]).unwrap().evaluate(&vs[1..]).unwrap();
        prop_assert_eq!(contracted, f.evaluate(&vs).unwrap());
    }

    #[test]
    fn pairing_matches_oracle(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (w, f) = (random_two_form(&mut r, 5), random_two_form(&mut r, 5));
        prop_assert_eq!(conformal_pairing(&w, &f, &VolumeForm::standard()).unwrap(), oracle_pairing(&w, &f));
        let scaled = VolumeForm::new(int(3)).unwrap();
        prop_assert_eq!(conformal_pairing(&w, &f, &scaled).unwrap() * int(3), oracle_pairing(&w, &f));
    }

    #[test]
    fn ellipticity_matches_gram_oracle(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (w, f) = if seed % 2 == 0 { elliptic_pair(&mut r) } else { (random_two_form(&mut r, 2), random_two_form(&mut r, 2)) };
        prop_assert_eq!(pairs::is_elliptic(&w, &f, &VolumeForm::standard(), 0.0).unwrap(), oracle_elliptic(&w, &f));
    }

    #[test]
    fn kappa_is_invariant(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (w, f) = elliptic_pair(&mut r);
        let pair = EllipticPair::new(w, f, VolumeForm::standard(), 0.0).unwrap().orthogonalized(0.0).unwrap();
        let a = gl_plus(&mut r);
        let moved = pair.pullback(&a, 0.0).unwrap();
        prop_assert_eq!(moved.kappa_squared(0.0).unwrap(), pair.kappa_squared(0.0).unwrap());
        prop_assert!(moved.is_orthogonal(0.0));
    }

    #[test]
    fn normal_form_reconstructs(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (w, f) = elliptic_pair(&mut r);
        let pair = EllipticPair::new(w, f, VolumeForm::standard(), 0.0).unwrap().orthogonalized(0.0).unwrap();
        let nf = normal_form(&pair, TOL).unwrap();
        prop_assert!(nf.reconstruction_residual(&pair) <= 1e-9);
    }

    #[test]
    fn pullbacks_to_three_space_stay_independent(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (w, f) = elliptic_pair(&mut r);
        let a = injective_4x3(&mut r);
        prop_assert!(pullback_pair_independent(&w, &f, &a, 0.0).unwrap().independent);
    }

    #[test]
    fn degree_is_invariant_and_matches_oracle(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (w, f) = elliptic_pair(&mut r);
        let s = Splitting::new(w, f, VolumeForm::standard(), 0.0).unwrap();
        let a = gl_plus(&mut r);
        let moved = splitting::act(&a, &s, 0.0).unwrap();
        prop_assert_eq!(splitting::degree_squared(&moved, 0.0).unwrap(), splitting::degree_squared(&s, 0.0).unwrap());
        let oracle = oracle_degree(&s.l1().to_f64(), &s.l2().to_f64());
        prop_assert!((splitting::degree(&s, 0.0).unwrap() - oracle).abs() <= 1e-9 * oracle.max(1.0));
    }

    #[test]
    fn plane_map_is_equivariant(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = gl_plus(&mut r);
        let b = gl_plus(&mut r);
        let j0 = ComplexStructure::new(splitting::standard_j(), VolumeForm::standard(), 0.0).unwrap();
        let j = j0.act(&a, 0.0).unwrap();
        let lhs = plane_of(&j.act(&b, 0.0).unwrap(), 0.0).unwrap();
        let rhs = plane_of(&j, 0.0).unwrap().pullback(&b, 0.0).unwrap();
        prop_assert!(lhs.same_oriented_plane(&rhs, 0.0));
    }

    #[test]
    fn plane_and_complex_structure_round_trip(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = gl_plus(&mut r);
        let j0 = ComplexStructure::new(splitting::standard_j(), VolumeForm::standard(), 0.0).unwrap();
        let j = j0.act(&a, 0.0).unwrap();
        let back = splitting::j_of_plane(&plane_of(&j, 0.0).unwrap(), TOL).unwrap();
        prop_assert!(back.matrix().sub(&j.matrix().to_f64()).max_abs() <= 1e-9 * j.matrix().max_abs().max(1.0));
    }

    #[test]
    fn adapted_coframe_identities(b in prop::array::uniform6(-10.0f64..10.0)) {
        let (b1, b2) = ([b[0], b[1], b[2]], [b[3], b[4], b[5]]);
        let n = pathgeom::linalg::cross(&b1, &b2);
        prop_assume!(pathgeom::linalg::dot(&n, &n).sqrt() > 1e-6);
        let cf = adapted_coframe_from_b(&b1, &b2, 1e-12).unwrap();
        prop_assert!(cf.reconstruction_residual(&b1, &b2) <= 1e-10);
        prop_assert!(cf.volume().abs() > 0.0);
        // η₁, η₂ annihilate b₁; η₂, η₃ annihilate b₂
        let d = |x: &[f64; 3], y: &[f64; 3]| pathgeom::linalg::dot(x, y);
        prop_assert!(d(&cf.eta[0], &b1).abs() <= 1e-9 && d(&cf.eta[1], &b1).abs() <= 1e-9);
        prop_assert!(d(&cf.eta[1], &b2).abs() <= 1e-9 && d(&cf.eta[2], &b2).abs() <= 1e-9);
    }

    #[test]
    fn polynomial_pullback_matches_jacobian_pullback(c in prop::collection::vec(-3i64..=3, 40), x in prop::array::uniform3(-4i64..=4)) {
        // quadratic components built from the coefficient list
        let monomials: Vec<[u32; 3]> = vec![[1,0,0],[0,1,0],[0,0,1],[2,0,0],[1,1,0],[0,1,1],[1,0,1],[0,0,2],[0,2,0],[0,0,0]];
        let comps: [Poly; 4] = std::array::from_fn(|i| {
            Poly::from_terms(monomials.iter().enumerate().map(|(k, e)| (*e, int(c[(10 * i + k) % c.len()]))))
        });
        let u = PolyMap::new(comps);
        let p = x.map(int);
        let (b1, b2) = pullback_splitting(&u);
        let jac = u.jacobian_at(&p).unwrap();
        prop_assert_eq!(b1.at(&p).unwrap(), standard_omega::<Rational>().pullback(&jac).unwrap());
        prop_assert_eq!(b2.at(&p).unwrap(), standard_phi::<Rational>().pullback(&jac).unwrap());
    }

    #[test]
    fn heisenberg_contact_and_compatible(seed in any::<u64>()) {
        let u = hypersurface::fixtures::heisenberg();
        let (b1, b2) = pullback_splitting(&u);
        for x in hypersurface::random_points(3, seed) {
            prop_assert!(hypersurface::is_nondegenerate_at(&b1, &b2, &x).unwrap());
            let c = hypersurface::compatibility_check(&u, &x).unwrap();
            prop_assert!(c.compatible && c.angle_residual <= 1e-9);
            let cr = hypersurface::cr_structure_at(&u, &x).unwrap();
            prop_assert_eq!(cr.i_squared_residual(), 0.0);
        }
    }

    #[test]
    fn ideal_matches_structure_equation_oracle(seed in any::<u64>(), v in prop::collection::vec(-3i64..=3, 36)) {
        let k = &eds::random_samples(1, seed)[0];
        let ideal = eds::ideal_at(k);
        let vs: Vec<Vec<Rational>> = (0..3).map(|i| v[12 * i..12 * i + 12].iter().map(|&c| int(c)).collect()).collect();
        let chi = oracle_chi(&vs[0], &vs[1]);
        let dchi = oracle_d_chi(k, &vs[0], &vs[1], &vs[2]);
        for i in 0..2 {
            prop_assert_eq!(ideal.chi[i].evaluate(&vs[..2]).unwrap(), chi[i].clone());
            prop_assert_eq!(ideal.dchi[i].evaluate(&vs).unwrap(), dchi[i].clone());
        }
    }

    #[test]
    fn chi_wedge_covector_vanishes_on_integral_elements(l in prop::collection::vec(-5i64..=5, DIM), m in prop::array::uniform2(-3i64..=3)) {
        let ideal = eds::ideal_at(&CurvatureSample::zero());
        let flag = Flag::standard();
        // a different basis of the same integral element E³
        let v = &flag.v;
        let w: Vec<Rational> = (0..DIM).map(|s| v[0][s].clone() + int(m[0]) * v[1][s].clone() + int(m[1]) * v[2][s].clone()).collect();
        let e = vec![w, v[1].clone(), v[2].clone()];
        let lambda = MultiVector::one_form(&l.iter().map(|&c| int(c)).collect::<Vec<_>>()).unwrap();
        for chi in &ideal.chi {
            prop_assert!(chi.wedge(&lambda).unwrap().evaluate(&e).unwrap().is_zero());
        }
    }
}

#[test]
fn polar_spaces_decrease_along_the_flag() {
    let ideal = eds::ideal_at(&CurvatureSample::new(int(2), int(-1), int(5), int(3)));
    let flag = Flag::standard();
    let spaces: Vec<Vec<Vec<Rational>>> = (0..3).map(|k| eds::polar_space(flag.level(k), &ideal).unwrap()).collect();
    for k in 1..3 {
        // every vector of H(E^k) lies in H(E^{k-1})
        let mut stacked = spaces[k - 1].clone();
        let before = pathgeom::linalg::rank_of(&stacked, 0.0);
        stacked.extend(spaces[k].iter().cloned());
        assert_eq!(pathgeom::linalg::rank_of(&stacked, 0.0), before);
        assert!(spaces[k].len() <= spaces[k - 1].len());
    }
    // E^k ⊂ H(E^k)
    for k in 1..3 {
        let mut stacked = spaces[k].clone();
        let before = pathgeom::linalg::rank_of(&stacked, 0.0);
        stacked.extend(flag.level(k).iter().cloned());
        assert_eq!(pathgeom::linalg::rank_of(&stacked, 0.0), before);
    }
}

#[test]
fn three_form_conditions_agree_with_two_form_restrictions() {
    // On ζ-planes, χ∧ζ^k = 0 for all k is equivalent to χ|_E = 0; so the
    // linearized rank of the eight 3-forms equals that of the 2-form
    // restrictions together with dχ.
    let ideal = eds::ideal_at(&CurvatureSample::zero());
    let e3 = Flag::standard().v;
    let u = eds::complement(&e3);
    let mut rows = Vec::new();
    for chi in &ideal.chi {
        for (a, b) in [(0, 1), (0, 2), (1, 2)] {
            rows.push(linearized_row(&e3, &u, |w| chi.evaluate(&[w[a].clone(), w[b].clone()]).unwrap()));
        }
    }
    for d in &ideal.dchi {
        rows.push(linearized_row(&e3, &u, |w| d.evaluate(w).unwrap()));
    }
    let rank = Matrix::from_rows(rows).rank(0.0);
    assert_eq!(rank, eds::codim_of_conditions(&e3, &ideal.three_form_conditions()).rank);
    assert_eq!(rank, 8);
}

#[test]
fn contracted_linearization_matches_substitution() {
    let k = CurvatureSample::new(int(2), int(-1), int(3), int(5));
    let conditions = eds::ideal_at(&k).three_form_conditions();
    let e3 = Flag::standard().v.to_vec();
    let u = eds::complement(&e3);
    let fast = eds::linearized_conditions(&e3, &conditions);
    for (r, psi) in conditions.iter().enumerate() {
        let direct = linearized_row(&e3, &u, |w| psi.evaluate(w).unwrap());
        for (c, entry) in direct.iter().enumerate() {
            assert_eq!(&fast[(r, c)], entry, "condition {r}, column {c}");
        }
    }
}

fn linearized_row(e: &[Vec<Rational>], u: &[Vec<Rational>], f: impl Fn(&[Vec<Rational>]) -> Rational) -> Vec<Rational> {
    let mut row = Vec::new();
    for a in 0..3 {
        for mu in u {
            // derivative along p_a^μ of a multilinear expression
            let mut w = e.to_vec();
            w[a] = mu.clone();
            let mut z = e.to_vec();
            z[a] = vec![int(0); DIM];
            row.push(f(&w) - f(&z));
        }
    }
    row
}

#[test]
fn coframe_index_map_round_trips() {
    for s in 0..DIM {
        let c = ModelCoframe::component(s).unwrap();
        assert_eq!(ModelCoframe::slot(c), Some(s));
    }
}
