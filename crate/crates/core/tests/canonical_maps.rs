use std::sync::Arc;

use dualbimod::bimodule::hom_space;
use dualbimod::canonical::{
    check_good, coduflo_cell, duflo_cell, homs_mod_simple, iota, phi, pi, psi, split, Side,
};
use dualbimod::{Label, QBimodule, Scalar};

fn arc(l: &Label) -> Arc<QBimodule> {
    Arc::new(QBimodule::construct(l))
}

#[test]
fn canonical_maps_intertwine() {
    for k in 0..=4 {
        assert!(phi::<Scalar>(k).is_intertwining());
        assert!(psi::<Scalar>(k).is_intertwining());
        for l in 0..=k {
            assert!(iota::<Scalar>(l, k).is_intertwining());
            assert!(pi::<Scalar>(k, l).is_intertwining());
        }
    }
}

#[test]
fn exactly_one_map_modulo_the_simple() {
    let d = Arc::new(QBimodule::regular());
    for k in 0..=4 {
        assert_eq!(homs_mod_simple(&arc(&Label::m(k)), &d), 1, "M:{k}");
    }
    // W:0 is the simple itself, so everything into it factors through it
    assert_eq!(homs_mod_simple(&d, &arc(&Label::w(0))), 0);
    for k in 1..=4 {
        assert_eq!(homs_mod_simple(&d, &arc(&Label::w(k))), 1, "W:{k}");
    }
}

#[test]
fn maps_from_n_are_never_good() {
    let d = Arc::new(QBimodule::regular());
    for k in 1..=3 {
        for h in hom_space(&arc(&Label::n(k)), &d) {
            assert!(!check_good(&h, &duflo_cell(k)), "N:{k}");
        }
    }
}

#[test]
fn cells_used_for_goodness() {
    assert_eq!(duflo_cell(2), vec![Label::n(2), Label::m(2)]);
    assert_eq!(coduflo_cell(2), vec![Label::w(2), Label::s(2)]);
}

#[test]
fn split_certificates_verify() {
    let m = arc(&Label::m(1));
    let id = dualbimod::Morphism::identity(&m);
    for side in [Side::Left, Side::Right] {
        let cert = split(&id, side).unwrap();
        assert!(cert.verify());
    }
    // φ_1 is onto D, so it has a section only if D is a summand of M:1; it is not
    assert!(split(&phi::<Scalar>(1), Side::Right).is_none());
}
