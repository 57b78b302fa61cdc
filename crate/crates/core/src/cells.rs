//! The finite catalog of indecomposables at a given level, its multiplication
//! table, and the cell structure derived from it.
//!
//! Composition `G ∘ F` of 1-morphisms is the tensor product `G ⊗_D F`. The left
//! preorder relates `F` to every summand of some `H ⊗ F`, the right preorder to
//! every summand of some `F ⊗ H`; summands of products sit higher.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::bimodule::tensor;
use crate::decompose::decompose;
use crate::label::{Label, Shape};
use crate::QBimodule;

/// Largest supported level.
pub const MAX_LEVEL: usize = 4;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CellError {
    #[error("level must be at least 1, got {0}")]
    LevelTooSmall(usize),
    #[error("catalog closure violated: {lhs} ⊗ {rhs} has residual of dim {residual_dim} and summands outside the catalog {outside:?}")]
    ClosureViolated {
        lhs: String,
        rhs: String,
        residual_dim: usize,
        outside: Vec<String>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Catalog {
    pub level: usize,
    pub labels: Vec<Label>,
}

impl Catalog {
    /// `D`, the k-split strings, `M_0`, then `W_j, S_j, N_j, M_j` for `1 ≤ j ≤ m`.
    pub fn new(level: usize) -> Result<Self, CellError> {
        if level == 0 {
            return Err(CellError::LevelTooSmall(level));
        }
        let mut labels = vec![Label::Regular, Label::ProjInj, Label::w(0), Label::s(0), Label::n(0), Label::m(0)];
        for j in 1..=level {
            labels.extend([Label::w(j), Label::s(j), Label::n(j), Label::m(j)]);
        }
        Ok(Catalog { level, labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn index_of(&self, label: &Label) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn contains(&self, label: &Label) -> bool {
        self.index_of(label).is_some()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TableEntry {
    /// Sorted multiset of summands.
    pub summands: Vec<Label>,
    pub dim: usize,
    pub residual_dim: usize,
}

/// Decomposition of `a ⊗ b`, memoised across the process.
pub fn product(a: &Label, b: &Label) -> TableEntry {
    static CACHE: OnceLock<Mutex<HashMap<(Label, Label), TableEntry>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let key = (a.clone(), b.clone());
    if let Some(e) = cache.lock().expect("table cache").get(&key) {
        return e.clone();
    }
    let x = Arc::new(QBimodule::construct(a));
    let y = Arc::new(QBimodule::construct(b));
    let t = tensor(&x, &y).module;
    let d = decompose(&t);
    let entry = TableEntry {
        summands: d.labels(),
        dim: t.dim(),
        residual_dim: d.residual_dim(),
    };
    cache.lock().expect("table cache").insert(key, entry.clone());
    entry
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultTable {
    pub catalog: Catalog,
    /// `entries[i][j]` is `labels[i] ⊗ labels[j]`.
    entries: Vec<Vec<TableEntry>>,
}

impl MultTable {
    pub fn get(&self, a: &Label, b: &Label) -> Option<&TableEntry> {
        let i = self.catalog.index_of(a)?;
        let j = self.catalog.index_of(b)?;
        Some(&self.entries[i][j])
    }

    pub fn entry(&self, i: usize, j: usize) -> &TableEntry {
        &self.entries[i][j]
    }
}

/// Decompose every product of catalog members; pairs are computed in parallel.
pub fn mult_table(catalog: &Catalog) -> Result<MultTable, CellError> {
    let n = catalog.len();
    let flat: Vec<TableEntry> = (0..n * n)
        .into_par_iter()
        .map(|p| product(&catalog.labels[p / n], &catalog.labels[p % n]))
        .collect();
    for (p, e) in flat.iter().enumerate() {
        let outside: Vec<String> = e.summands.iter().filter(|l| !catalog.contains(l)).map(ToString::to_string).collect();
        if e.residual_dim > 0 || !outside.is_empty() {
            return Err(CellError::ClosureViolated {
                lhs: catalog.labels[p / n].to_string(),
                rhs: catalog.labels[p % n].to_string(),
                residual_dim: e.residual_dim,
                outside,
            });
        }
    }
    let mut it = flat.into_iter();
    let entries = (0..n).map(|_| it.by_ref().take(n).collect()).collect();
    Ok(MultTable {
        catalog: catalog.clone(),
        entries,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CellStructure {
    pub labels: Vec<Label>,
    pub left_cells: Vec<Vec<Label>>,
    pub right_cells: Vec<Vec<Label>>,
    /// Sorted from the top of the two-sided order down.
    pub two_sided_cells: Vec<Vec<Label>>,
    /// `two_sided_leq[a][b]`: cell `a` is `≤_J` cell `b`.
    pub two_sided_leq: Vec<Vec<bool>>,
}

/// Reflexive-transitive closure of a relation given as adjacency.
fn closure(mut rel: Vec<Vec<bool>>) -> Vec<Vec<bool>> {
    let n = rel.len();
    for (i, row) in rel.iter_mut().enumerate() {
        row[i] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if rel[i][k] {
                let via = rel[k].clone();
                for (r, v) in rel[i].iter_mut().zip(via) {
                    *r |= v;
                }
            }
        }
    }
    rel
}

/// Equivalence classes of a preorder, in order of first member.
fn classes(leq: &[Vec<bool>]) -> Vec<Vec<usize>> {
    let n = leq.len();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for i in 0..n {
        if seen[i] {
            continue;
        }
        let class: Vec<usize> = (0..n).filter(|&j| leq[i][j] && leq[j][i]).collect();
        for &j in &class {
            seen[j] = true;
        }
        out.push(class);
    }
    out
}

/// Cells from the table; `H` ranges over catalog members.
pub fn compute_cells(table: &MultTable) -> CellStructure {
    let cat = &table.catalog;
    let n = cat.len();
    let mut left = vec![vec![false; n]; n];
    let mut right = vec![vec![false; n]; n];
    for f in 0..n {
        for h in 0..n {
            for g in &table.entry(h, f).summands {
                left[f][cat.index_of(g).expect("closed table")] = true;
            }
            for g in &table.entry(f, h).summands {
                right[f][cat.index_of(g).expect("closed table")] = true;
            }
        }
    }
    let two: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| left[i][j] || right[i][j]).collect()).collect();
    let (left, right, two) = (closure(left), closure(right), closure(two));

    let to_labels = |cs: Vec<Vec<usize>>| -> Vec<Vec<Label>> {
        cs.into_iter().map(|c| c.into_iter().map(|i| cat.labels[i].clone()).collect()).collect()
    };
    let mut j_classes = classes(&two);
    // top first: more cells above means lower
    let above = |c: &Vec<usize>| j_classes_count_above(&two, c);
    j_classes.sort_by_key(|c| (above(c), c[0]));
    let leq = j_classes
        .iter()
        .map(|a| j_classes.iter().map(|b| two[a[0]][b[0]]).collect())
        .collect();
    CellStructure {
        labels: cat.labels.clone(),
        left_cells: to_labels(classes(&left)),
        right_cells: to_labels(classes(&right)),
        two_sided_cells: to_labels(j_classes),
        two_sided_leq: leq,
    }
}

fn j_classes_count_above(two: &[Vec<bool>], class: &[usize]) -> usize {
    let i = class[0];
    (0..two.len()).filter(|&j| two[i][j] && !two[j][i]).count()
}

/// Rows are right cells, columns left cells, within one two-sided cell.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EggBox {
    pub rows: Vec<Vec<Label>>,
    pub columns: Vec<Vec<Label>>,
    pub grid: Vec<Vec<Vec<Label>>>,
}

impl CellStructure {
    pub fn cell_of(&self, label: &Label) -> Option<usize> {
        self.two_sided_cells.iter().position(|c| c.contains(label))
    }

    /// Whether cell `a` is strictly above cell `b`.
    pub fn strictly_greater(&self, a: usize, b: usize) -> bool {
        self.two_sided_leq[b][a] && !self.two_sided_leq[a][b]
    }

    /// Whether the two-sided order is a chain.
    pub fn is_linear(&self) -> bool {
        let n = self.two_sided_cells.len();
        (0..n).all(|a| (0..n).all(|b| self.two_sided_leq[a][b] || self.two_sided_leq[b][a]))
    }

    /// Short name: `Jsplit` (contains `ProjInj`), `J0` (contains `M_0`), `Jk`
    /// (contains `M_k`), `Jid` (contains `D`).
    pub fn name(&self, cell: usize) -> String {
        let c = &self.two_sided_cells[cell];
        if c.contains(&Label::ProjInj) {
            return "Jsplit".into();
        }
        if c.contains(&Label::Regular) {
            return "Jid".into();
        }
        for l in c {
            if let Label::String { shape: Shape::M, valleys } = l {
                return format!("J{valleys}");
            }
        }
        format!("J[{}]", c.iter().map(ToString::to_string).collect::<Vec<_>>().join(","))
    }

    pub fn cell_by_name(&self, name: &str) -> Option<usize> {
        (0..self.two_sided_cells.len()).find(|&c| self.name(c) == name)
    }

    pub fn egg_box(&self, cell: usize) -> EggBox {
        let members = &self.two_sided_cells[cell];
        let within = |cells: &[Vec<Label>]| -> Vec<Vec<Label>> {
            cells.iter().filter(|c| members.contains(&c[0])).cloned().collect()
        };
        let rows = within(&self.right_cells);
        let columns = within(&self.left_cells);
        let grid = rows
            .iter()
            .map(|r| columns.iter().map(|c| r.iter().filter(|l| c.contains(l)).cloned().collect()).collect())
            .collect();
        EggBox { rows, columns, grid }
    }
}

/// Drop every summand lying in a two-sided cell strictly above `cell`.
/// Labels outside the catalog are kept.
pub fn reduce_mod_higher(dec: &[Label], cell: usize, cells: &CellStructure) -> Vec<Label> {
    dec.iter()
        .filter(|l| cells.cell_of(l).is_none_or(|c| !cells.strictly_greater(c, cell)))
        .cloned()
        .collect()
}

/// Whether each two-sided cell contains `F, G, H` with `H` a summand of `F ⊗ G`.
pub fn idempotent_cells(cells: &CellStructure, table: &MultTable) -> Vec<bool> {
    cells
        .two_sided_cells
        .iter()
        .map(|c| {
            c.iter().any(|f| {
                c.iter().any(|g| table.get(f, g).is_some_and(|e| e.summands.iter().any(|h| c.contains(h))))
            })
        })
        .collect()
}

fn join(labels: &[Label]) -> String {
    if labels.is_empty() {
        return "0".into();
    }
    labels.iter().map(ToString::to_string).collect::<Vec<_>>().join(" + ")
}

/// Human-readable table, one product per line.
pub fn table_grid(table: &MultTable) -> String {
    let mut out = String::new();
    for a in &table.catalog.labels {
        for b in &table.catalog.labels {
            let e = table.get(a, b).expect("catalog member");
            let _ = writeln!(out, "{a} ⊗ {b} = {} (dim {})", join(&e.summands), e.dim);
        }
    }
    out
}

/// Cells, order and egg-boxes as text.
pub fn cells_report(cells: &CellStructure, idempotent: &[bool]) -> String {
    let mut out = String::new();
    let chain: Vec<String> = (0..cells.two_sided_cells.len()).map(|c| cells.name(c)).collect();
    let sep = if cells.is_linear() { " > " } else { " , " };
    let _ = writeln!(out, "two-sided order (top first): {}", chain.join(sep));
    for (c, members) in cells.two_sided_cells.iter().enumerate() {
        let _ = writeln!(
            out,
            "{}: {{{}}} {}",
            cells.name(c),
            members.iter().map(ToString::to_string).collect::<Vec<_>>().join(", "),
            if idempotent[c] { "idempotent" } else { "not idempotent" }
        );
        let eb = cells.egg_box(c);
        for row in &eb.grid {
            let cellstr: Vec<String> = row.iter().map(|x| join(x)).collect();
            let _ = writeln!(out, "    | {} |", cellstr.join(" | "));
        }
    }
    let _ = writeln!(out, "note: D forms its own cell at the bottom; no product of other catalog members contains it");
    out
}

/// Hasse diagram of the two-sided order in DOT.
pub fn order_dot(cells: &CellStructure) -> String {
    let n = cells.two_sided_cells.len();
    let mut out = String::from("digraph cells {\n  rankdir=TB;\n");
    for c in 0..n {
        let members: Vec<String> = cells.two_sided_cells[c].iter().map(ToString::to_string).collect();
        let _ = writeln!(out, "  \"{}\" [label=\"{}\\n{}\"];", cells.name(c), cells.name(c), members.join(" "));
    }
    for a in 0..n {
        for b in 0..n {
            // a covers b
            if cells.strictly_greater(a, b) && !(0..n).any(|m| cells.strictly_greater(a, m) && cells.strictly_greater(m, b)) {
                let _ = writeln!(out, "  \"{}\" -> \"{}\";", cells.name(a), cells.name(b));
            }
        }
    }
    out.push_str("}\n");
    out
}

pub fn table_json(table: &MultTable) -> serde_json::Value {
    let mut products = BTreeMap::new();
    for a in &table.catalog.labels {
        for b in &table.catalog.labels {
            let e = table.get(a, b).expect("catalog member");
            products.insert(format!("{a} * {b}"), serde_json::to_value(e).expect("serializable"));
        }
    }
    serde_json::json!({
        "level": table.catalog.level,
        "labels": table.catalog.labels,
        "products": products,
    })
}

pub fn cells_json(cells: &CellStructure, idempotent: &[bool]) -> serde_json::Value {
    let two: Vec<serde_json::Value> = (0..cells.two_sided_cells.len())
        .map(|c| {
            serde_json::json!({
                "name": cells.name(c),
                "members": cells.two_sided_cells[c],
                "idempotent": idempotent[c],
                "egg_box": cells.egg_box(c),
            })
        })
        .collect();
    serde_json::json!({
        "two_sided": two,
        "linear": cells.is_linear(),
        "left_cells": cells.left_cells,
        "right_cells": cells.right_cells,
    })
}

/// Everything derived at one level.
pub struct CellCalculus {
    pub table: MultTable,
    pub cells: CellStructure,
    pub idempotent: Vec<bool>,
}

impl CellCalculus {
    pub fn at_level(level: usize) -> Result<Self, CellError> {
        let table = mult_table(&Catalog::new(level)?)?;
        let cells = compute_cells(&table);
        let idempotent = idempotent_cells(&cells, &table);
        Ok(CellCalculus { table, cells, idempotent })
    }

    /// `reduce_mod_higher(decompose(a ⊗ b), cell)`.
    pub fn reduced_product(&self, a: &Label, b: &Label, cell: usize) -> Vec<Label> {
        reduce_mod_higher(&product(a, b).summands, cell, &self.cells)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_sizes() {
        assert_eq!(Catalog::new(1).unwrap().len(), 10);
        assert_eq!(Catalog::new(3).unwrap().len(), 18);
        assert!(Catalog::new(1).unwrap().contains(&Label::m(0)));
        assert_eq!(Catalog::new(0), Err(CellError::LevelTooSmall(0)));
    }

    #[test]
    fn small_products() {
        for l in Catalog::new(1).unwrap().labels {
            assert_eq!(product(&Label::Regular, &l).summands, vec![l.clone()]);
        }
        assert_eq!(product(&Label::m(0), &Label::m(0)).summands, vec![Label::w(0), Label::ProjInj]);
    }

    #[test]
    fn level_one_cells() {
        let cc = CellCalculus::at_level(1).unwrap();
        let names: Vec<String> = (0..cc.cells.two_sided_cells.len()).map(|c| cc.cells.name(c)).collect();
        assert_eq!(names, vec!["Jsplit", "J0", "J1", "Jid"]);
        assert!(cc.cells.is_linear());
        assert_eq!(cc.idempotent, vec![true, false, true, true]);
        let j1 = cc.cells.cell_by_name("J1").unwrap();
        let eb = cc.cells.egg_box(j1);
        assert_eq!(eb.grid, vec![vec![vec![Label::w(1)], vec![Label::n(1)]], vec![vec![Label::s(1)], vec![Label::m(1)]]]);
        assert_eq!(cc.reduced_product(&Label::w(1), &Label::s(1), j1), vec![Label::w(1)]);
    }

    #[test]
    fn reduce_examples() {
        let cc = CellCalculus::at_level(1).unwrap();
        let j1 = cc.cells.cell_by_name("J1").unwrap();
        assert_eq!(reduce_mod_higher(&[Label::w(1)], j1, &cc.cells), vec![Label::w(1)]);
        let j0 = cc.cells.cell_by_name("J0").unwrap();
        for u in [Label::w(1), Label::s(1), Label::n(1), Label::m(1)] {
            assert_eq!(cc.reduced_product(&u, &Label::m(0), j0), vec![Label::m(0)], "{u}");
        }
    }

    #[test]
    fn dot_output_mentions_every_cell() {
        let cc = CellCalculus::at_level(1).unwrap();
        let dot = order_dot(&cc.cells);
        for name in ["Jsplit", "J0", "J1", "Jid"] {
            assert!(dot.contains(name));
        }
        assert!(dot.contains("\"Jsplit\" -> \"J0\""));
    }
}
