use std::sync::Arc;

use dualbimod::bimodule::compose;
use dualbimod::cells::Catalog;
use dualbimod::decompose::{decompose, peel, shuffled, summand_test, DecompositionResult};
use dualbimod::{Label, Mat, Morphism, QBimodule, Scalar};
use proptest::prelude::*;
use proptest::sample::select;

fn catalog() -> Vec<Label> {
    Catalog::new(3).unwrap().labels
}

fn sum(labels: &[Label]) -> QBimodule {
    QBimodule::direct_sum_all(labels.iter().map(QBimodule::construct).collect::<Vec<_>>().iter())
}

fn witnesses_hold(m: &Arc<QBimodule>, d: &DecompositionResult<Scalar>) -> bool {
    let each = d
        .summands
        .iter()
        .all(|s| compose(&s.projection, &s.injection).is_identity() && s.injection.is_intertwining() && s.projection.is_intertwining());
    let total = d
        .summands
        .iter()
        .map(|s| compose(&s.injection, &s.projection))
        .fold(Morphism::zero(m, m), |acc, e| acc.add(&e));
    each && (!d.is_complete() || total.is_isomorphism())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn single_labels_round_trip(l in select(catalog()), seed in 0u64..10_000) {
        let m = Arc::new(shuffled(&QBimodule::construct(&l), seed));
        let d = decompose(&m);
        prop_assert_eq!(d.labels(), vec![l]);
        prop_assert!(d.is_complete());
        prop_assert!(witnesses_hold(&m, &d));
    }

    #[test]
    fn decomposition_is_additive(a in select(catalog()), b in select(catalog()), seed in 0u64..10_000) {
        let da = decompose(&Arc::new(QBimodule::construct(&a))).labels();
        let db = decompose(&Arc::new(QBimodule::construct(&b))).labels();
        let ab = Arc::new(shuffled(&sum(&[a, b]), seed));
        let d = decompose(&ab);
        let mut union = [da, db].concat();
        union.sort();
        prop_assert_eq!(d.labels(), union);
        prop_assert!(witnesses_hold(&ab, &d));
    }

    #[test]
    fn peeling_shrinks_by_the_summand(parts in proptest::collection::vec(select(catalog()), 1..4), seed in 0u64..10_000) {
        let m = Arc::new(shuffled(&sum(&parts), seed));
        let c = Arc::new(QBimodule::construct(&parts[0]));
        let p = peel(&c, &m).unwrap();
        prop_assert_eq!(p.complement.dim() + c.dim(), m.dim());
        prop_assert!(compose(&p.projection, &p.injection).is_identity());
        prop_assert!(compose(&p.complement_projection, &p.complement_injection).is_identity());
        prop_assert!(compose(&p.projection, &p.complement_injection).is_zero());
        let mut rest = decompose(&p.complement).labels();
        rest.push(parts[0].clone());
        rest.sort();
        let mut want = parts.clone();
        want.sort();
        prop_assert_eq!(rest, want);
    }
}

/// Fifty fixed pairs, as a deterministic complement to the property above.
#[test]
fn additivity_on_fixed_pairs() {
    let cat = catalog();
    for i in 0..50 {
        let (a, b) = (&cat[(7 * i) % cat.len()], &cat[(11 * i + 3) % cat.len()]);
        let d = decompose(&Arc::new(shuffled(&sum(&[a.clone(), b.clone()]), i as u64)));
        let mut want = vec![a.clone(), b.clone()];
        want.sort();
        assert_eq!(d.labels(), want, "{a} + {b}");
    }
}

/// Idempotents `e = e²` of `End(X)` solved for entrywise: `X = W:0 ⊕ S:0`,
/// with `End(X)` written out by hand. `W:0` is the simple; `S:0` is
/// `k[x]` acted on by the left only, basis `[1, x]`.
#[test]
fn hand_written_idempotents_split_w0_plus_s0() {
    let x = Arc::new(sum(&[Label::w(0), Label::s(0)]));
    assert_eq!(x.dim(), 3);
    // projection onto the W:0 coordinate, and onto the S:0 block
    let e_w = Mat::<Scalar>::from_i64(&[&[1, 0, 0], &[0, 0, 0], &[0, 0, 0]]);
    let e_s = Mat::<Scalar>::from_i64(&[&[0, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
    for e in [&e_w, &e_s] {
        let m = Morphism::new(x.clone(), x.clone(), e.clone()).unwrap();
        assert!(compose(&m, &m) == m);
    }
    assert!(summand_test(&Arc::new(QBimodule::construct(&Label::w(0))), &x));
    assert!(summand_test(&Arc::new(QBimodule::construct(&Label::s(0))), &x));
    assert!(!summand_test(&Arc::new(QBimodule::construct(&Label::n(0))), &x));
}
