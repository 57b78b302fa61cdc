use std::sync::Arc;

use dualbimod::bimodule::{compose, hom_space, tensor, tensor_morphisms, unitor_left, unitor_right, TripleTensor};
use dualbimod::cells::Catalog;
use dualbimod::decompose::{is_isomorphic, shuffled};
use dualbimod::{Bimodule, Field, Label, Morphism, QBimodule, QMorphism, Scalar};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use proptest::sample::select;

fn arc(l: &Label) -> Arc<QBimodule> {
    Arc::new(QBimodule::construct(l))
}

fn catalog(level: usize) -> Vec<Label> {
    Catalog::new(level).unwrap().labels
}

fn labels() -> impl Strategy<Value = Label> {
    let mut all = catalog(3);
    for (k, p, q) in [(1, 2, 1), (2, -1, 1), (2, 3, 2), (3, 5, 1)] {
        all.push(Label::band(k, BigRational::new(BigInt::from(p), BigInt::from(q))).unwrap());
    }
    select(all)
}

fn small_labels() -> impl Strategy<Value = Label> {
    select(catalog(2))
}

/// `Σ c_i h_i` over a hom basis, coefficients in `-2..=2`.
fn combination(m: &Arc<QBimodule>, n: &Arc<QBimodule>, coeffs: &[i64]) -> QMorphism {
    let mut acc = Morphism::zero(m, n);
    for (h, c) in hom_space(m, n).iter().zip(coeffs.iter().cycle()) {
        acc = acc.add(&h.scale(&Scalar::from_i64(*c)));
    }
    acc
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, ..ProptestConfig::default() })]

    #[test]
    fn constructors_have_closed_form_dims(l in labels()) {
        let m = QBimodule::construct(&l);
        let expected = match &l {
            Label::String { shape, valleys } => 2 * valleys + match shape {
                dualbimod::Shape::M => 3,
                dualbimod::Shape::N | dualbimod::Shape::S => 2,
                dualbimod::Shape::W => 1,
            },
            Label::Band { length, .. } => 2 * length,
            Label::ProjInj => 4,
            Label::Regular => 2,
        };
        prop_assert_eq!(m.dim(), expected);
        // the actions square to zero and commute
        let (x, y) = (m.left(), m.right());
        prop_assert!((x * x).is_zero() && (y * y).is_zero());
        prop_assert_eq!(x * y, y * x);
    }

    #[test]
    fn unitors_are_isomorphisms(l in labels()) {
        let m = arc(&l);
        let d = Arc::new(QBimodule::regular());
        let left = unitor_left(&tensor(&d, &m));
        let right = unitor_right(&tensor(&m, &d));
        prop_assert!(left.is_intertwining() && left.is_isomorphism());
        prop_assert!(right.is_intertwining() && right.is_isomorphism());
    }

    #[test]
    fn associator_is_invertible(a in small_labels(), b in small_labels(), c in small_labels()) {
        let t = TripleTensor::new(&arc(&a), &arc(&b), &arc(&c));
        let alpha = t.associator();
        prop_assert!(alpha.is_intertwining());
        prop_assert!(alpha.is_isomorphism());
    }

    #[test]
    fn tensor_is_functorial(
        a in small_labels(), b in small_labels(), a2 in small_labels(), b2 in small_labels(),
        coeffs in proptest::collection::vec(-2i64..=2, 1..6),
    ) {
        let (a, b, a2, b2) = (arc(&a), arc(&b), arc(&a2), arc(&b2));
        let f = combination(&a, &a2, &coeffs);
        let g = combination(&b, &b2, &coeffs);
        let f2 = combination(&a2, &a, &coeffs[1..]);
        let g2 = combination(&b2, &b, &coeffs[1..]);
        let lhs = tensor_morphisms(&compose(&f2, &f), &compose(&g2, &g));
        let rhs = compose(&tensor_morphisms(&f2, &g2), &tensor_morphisms(&f, &g));
        prop_assert_eq!(lhs.matrix(), rhs.matrix());
        prop_assert!(lhs.is_intertwining());
    }

    #[test]
    fn hom_dimension_is_basis_independent(a in labels(), b in labels(), s in 0u64..1000, t in 0u64..1000) {
        let (m, n) = (arc(&a), arc(&b));
        let basis = hom_space(&m, &n);
        prop_assert!(basis.iter().all(Morphism::is_intertwining));
        let m2 = Arc::new(shuffled(&m, s));
        let n2 = Arc::new(shuffled(&n, t));
        let moved = hom_space(&m2, &n2);
        prop_assert!(moved.iter().all(Morphism::is_intertwining));
        prop_assert_eq!(basis.len(), moved.len());
    }

    #[test]
    fn dual_is_an_involution(l in labels(), s in 0u64..1000) {
        let m = Arc::new(shuffled(&QBimodule::construct(&l), s));
        let dd = Arc::new(m.dual().dual());
        prop_assert!(is_isomorphic(&dd, &m).is_some());
    }

    #[test]
    fn json_is_exact(l in labels(), s in 0u64..1000) {
        let m = shuffled(&QBimodule::construct(&l), s);
        let text = serde_json::to_string(&m.to_json()).unwrap();
        let back = Bimodule::<Scalar>::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        prop_assert_eq!(back, m);
    }
}

#[test]
fn left_homs_into_d_of_left_projectives_are_duals() {
    for k in 0..=4 {
        let s = QBimodule::construct(&Label::s(k));
        let (h, _) = s.hom_left_regular();
        assert!(is_isomorphic(&Arc::new(h), &Arc::new(s.dual())).is_some(), "S:{k}");
    }
}
