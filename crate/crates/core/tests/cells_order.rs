use dualbimod::cells::{compute_cells, mult_table, Catalog, CellStructure, MultTable, MAX_LEVEL};
use dualbimod::Label;

/// `a ≤ b` in the preorder generated by `b ↦ summands of h ⊗ b` (left) or
/// `b ⊗ h` (right), computed by a plain fixpoint on label sets.
fn reachable(table: &MultTable, from: &Label, left: bool) -> Vec<Label> {
    let labels = &table.catalog.labels;
    let mut seen = vec![from.clone()];
    let mut i = 0;
    while i < seen.len() {
        let f = seen[i].clone();
        for h in labels {
            let e = if left { table.get(h, &f) } else { table.get(&f, h) }.unwrap();
            for g in &e.summands {
                if !seen.contains(g) {
                    seen.push(g.clone());
                }
            }
        }
        i += 1;
    }
    seen
}

fn same_cell(cells: &[Vec<Label>], a: &Label, b: &Label) -> bool {
    cells.iter().any(|c| c.contains(a) && c.contains(b))
}

fn j_leq(cs: &CellStructure, a: &Label, b: &Label) -> bool {
    cs.two_sided_leq[cs.cell_of(a).unwrap()][cs.cell_of(b).unwrap()]
}

#[test]
fn closure_and_bookkeeping_up_to_the_cap() {
    for level in 1..=MAX_LEVEL {
        let table = mult_table(&Catalog::new(level).unwrap()).expect("closed");
        for a in &table.catalog.labels {
            for b in &table.catalog.labels {
                let e = table.get(a, b).unwrap();
                assert_eq!(e.residual_dim, 0);
                assert_eq!(e.summands.iter().map(Label::dim).sum::<usize>(), e.dim, "{a} ⊗ {b}");
                assert_eq!(e.dim, a.dim() * b.dim() - tensor_relations(a, b), "{a} ⊗ {b}");
            }
        }
    }
}

/// `dim(A ⊗_D B) = dim A · dim B − rank(R_A ⊗ 1 − 1 ⊗ L_B)`, from the
/// presentation of the tensor product as a cokernel.
fn tensor_relations(a: &Label, b: &Label) -> usize {
    use dualbimod::{Mat, QBimodule, Scalar};
    let (x, y) = (QBimodule::construct(a), QBimodule::construct(b));
    let (p, q) = (x.dim(), y.dim());
    let kron = |u: &Mat<Scalar>, v: &Mat<Scalar>| Mat::from_fn(p * q, p * q, |r, c| u.get(r / q, c / q).clone() * v.get(r % q, c % q).clone());
    let rel = &kron(x.right(), &Mat::identity(q)) - &kron(&Mat::identity(p), y.left());
    rel.rank()
}

#[test]
fn one_sided_orders_refine_the_two_sided_one() {
    let table = mult_table(&Catalog::new(3).unwrap()).unwrap();
    let cs = compute_cells(&table);
    let labels = &table.catalog.labels;
    for a in labels {
        let left = reachable(&table, a, true);
        let right = reachable(&table, a, false);
        for b in labels {
            let l = left.contains(b) && reachable(&table, b, true).contains(a);
            let r = right.contains(b) && reachable(&table, b, false).contains(a);
            assert_eq!(l, same_cell(&cs.left_cells, a, b), "left {a} {b}");
            assert_eq!(r, same_cell(&cs.right_cells, a, b), "right {a} {b}");
            if l || r {
                assert!(same_cell(&cs.two_sided_cells, a, b));
            }
            if left.contains(b) || right.contains(b) {
                // reached from a, so a ≤_J b
                assert!(j_leq(&cs, a, b));
            }
        }
    }
}

#[test]
fn summands_sit_above_both_factors() {
    let table = mult_table(&Catalog::new(3).unwrap()).unwrap();
    let cs = compute_cells(&table);
    for f in &table.catalog.labels {
        for g in &table.catalog.labels {
            for h in &table.get(f, g).unwrap().summands {
                assert!(j_leq(&cs, f, h) && j_leq(&cs, g, h), "{h} in {f} ⊗ {g}");
            }
        }
    }
}
