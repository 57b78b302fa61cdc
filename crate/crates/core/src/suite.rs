//! The verification suite behind `dualbimod verify` and the acceptance target.
//!
//! Each check reproduces one computational claim exactly and reports a
//! pass/fail status with a small JSON witness. Checks run one after another in
//! [`CHECK_IDS`] order, so per-check timings mean something; the heavy ones
//! parallelise internally.

use std::collections::BTreeSet;
use std::sync::{Arc, OnceLock};
use std::time::{Duration, Instant};

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::actmat::{self, ActionMatrix, Member};
use crate::bimodule::{compose, hom_space, tensor};
use crate::canonical::{self as can, Side};
use crate::cells::{CellCalculus, Catalog, MAX_LEVEL};
use crate::decompose::{decompose, is_isomorphic, shuffled, summand_test};
use crate::{Bimodule, Field, Label, Mat, QBimodule, Scalar, Shape};

pub const DEFAULT_LEVEL: usize = 3;

/// One id per acceptance criterion, in report order.
pub const CHECK_IDS: [&str; 12] = [
    "m0-square",
    "table",
    "adjoint",
    "cells",
    "actmat-roots",
    "actmat",
    "hom-lemma",
    "factorization",
    "goodness",
    "structures",
    "roundtrip",
    "summand-oracle",
];

pub const ROUNDTRIP_CASES: u64 = 100;
pub const ROUNDTRIP_SEED: u64 = 11;
/// Basis changes for case `i` use seed `ROUNDTRIP_SHUFFLE_BASE + i`.
pub const ROUNDTRIP_SHUFFLE_BASE: u64 = 1000;
pub const ROUNDTRIP_MAX_SUMMANDS: usize = 4;

/// The brute-force search must finish within this budget.
pub const ACTMAT_BUDGET: Duration = Duration::from_secs(10);

pub const ORACLE_MAX_DIM: usize = 4;
/// Sums whose endomorphism algebra is larger are not enumerated (`3^dim` points).
pub const ORACLE_MAX_END_DIM: usize = 10;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SuiteError {
    #[error("level must be between 1 and {MAX_LEVEL}, got {0}")]
    Level(usize),
    #[error("unknown check '{0}'; known checks: {known}", known = CHECK_IDS.join(", "))]
    UnknownCheck(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug)]
pub struct CheckResult {
    pub check: &'static str,
    /// The claim being reproduced, in one line.
    pub claim: &'static str,
    pub status: Status,
    pub detail: String,
    pub witness: Value,
    pub elapsed: Duration,
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub level: usize,
    pub checks: Vec<CheckResult>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status == Status::Pass)
    }

    pub fn failing(&self) -> Vec<&'static str> {
        self.checks.iter().filter(|c| c.status == Status::Fail).map(|c| c.check).collect()
    }

    /// Elapsed times are left out unless asked for, so that reports are
    /// byte-identical across runs.
    pub fn to_json(&self, timings: bool) -> Value {
        let checks: Vec<Value> = self
            .checks
            .iter()
            .map(|c| {
                let mut v = json!({
                    "check": c.check,
                    "claim": c.claim,
                    "status": c.status,
                    "detail": c.detail,
                    "witness": c.witness,
                });
                if timings {
                    v["elapsed_ms"] = json!(c.elapsed.as_millis() as u64);
                }
                v
            })
            .collect();
        json!({ "level": self.level, "passed": self.passed(), "checks": checks })
    }

    pub fn to_text(&self, timings: bool) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let t = if timings { format!(" [{:.2}s]", c.elapsed.as_secs_f64()) } else { String::new() };
            let status = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
            };
            out.push_str(&format!("{status} {}{t}: {}\n      {}\n", c.check, c.claim, c.detail));
        }
        out
    }
}

/// Check ids selected by `--only` patterns: an exact id, or every id with
/// prefix `pattern-`.
pub fn select(only: &[String]) -> Result<Vec<&'static str>, SuiteError> {
    if only.is_empty() {
        return Ok(CHECK_IDS.to_vec());
    }
    let mut chosen = BTreeSet::new();
    for p in only {
        let hits: Vec<usize> = (0..CHECK_IDS.len())
            .filter(|&i| CHECK_IDS[i] == p || CHECK_IDS[i].starts_with(&format!("{p}-")))
            .collect();
        if hits.is_empty() {
            return Err(SuiteError::UnknownCheck(p.clone()));
        }
        chosen.extend(hits);
    }
    Ok(chosen.into_iter().map(|i| CHECK_IDS[i]).collect())
}

pub fn run(level: usize, only: &[String]) -> Result<SuiteReport, SuiteError> {
    if level == 0 || level > MAX_LEVEL {
        return Err(SuiteError::Level(level));
    }
    let ids = select(only)?;
    let ctx = Context { level, calculus: OnceLock::new() };
    let checks = ids.iter().map(|id| run_check(&ctx, id)).collect();
    Ok(SuiteReport { level, checks })
}

struct Context {
    level: usize,
    calculus: OnceLock<Result<CellCalculus, String>>,
}

impl Context {
    fn calculus(&self) -> Result<&CellCalculus, String> {
        self.calculus
            .get_or_init(|| CellCalculus::at_level(self.level).map_err(|e| e.to_string()))
            .as_ref()
            .map_err(Clone::clone)
    }
}

struct Outcome {
    ok: bool,
    detail: String,
    witness: Value,
}

fn outcome(ok: bool, detail: impl Into<String>, witness: Value) -> Outcome {
    Outcome { ok, detail: detail.into(), witness }
}

fn run_check(ctx: &Context, id: &'static str) -> CheckResult {
    let start = Instant::now();
    let (claim, o) = match id {
        "m0-square" => ("M:0 ⊗ M:0 = ProjInj + W:0", m0_square()),
        "table" => ("cell multiplication table modulo higher cells", table(ctx)),
        "adjoint" => ("Hom_D-(S:k, D) has dim 2(k+1) and is isomorphic to N:k", adjoint(ctx.level)),
        "cells" => ("two-sided chain, egg-boxes and idempotent cells", cell_structure(ctx)),
        "actmat-roots" => ("canonical roots of F² = 4F number 1, 5, 2, 1", actmat_roots()),
        "actmat" => ("only the rank-1 and rank-2 quadruple classes survive", actmat_proposition()),
        "hom-lemma" => ("only M:k maps to D and only W:k receives from D, modulo the simple", hom_lemma(ctx.level)),
        "factorization" => ("φ and ψ factor along ι, π and through band maps", factorization(ctx.level)),
        "goodness" => ("φ_k is good on {N:k, M:k} and ψ_k cogood on {W:k, S:k}", goodness(ctx.level)),
        "structures" => ("coalgebra, algebra, comodule and module axioms", structures()),
        "roundtrip" => ("random shuffled sums decompose back to their summands", roundtrip(ctx.level)),
        "summand-oracle" => ("summand test agrees with idempotent enumeration", summand_oracle()),
        _ => unreachable!("ids come from CHECK_IDS"),
    };
    CheckResult {
        check: id,
        claim,
        status: if o.ok { Status::Pass } else { Status::Fail },
        detail: o.detail,
        witness: o.witness,
        elapsed: start.elapsed(),
    }
}

fn arc(label: &Label) -> Arc<QBimodule> {
    Arc::new(QBimodule::construct(label))
}

fn joined(labels: &[Label]) -> String {
    if labels.is_empty() {
        return "0".into();
    }
    labels.iter().map(ToString::to_string).collect::<Vec<_>>().join(" + ")
}

fn m0_square() -> Outcome {
    let m0 = arc(&Label::m(0));
    let t = tensor(&m0, &m0).module;
    let d = decompose(&t);
    let dims: Vec<usize> = d.summands.iter().map(|s| s.module.dim()).collect();
    let ok = d.labels() == vec![Label::w(0), Label::ProjInj] && d.is_complete() && t.dim() == 5 && dims.iter().sum::<usize>() == 5;
    outcome(
        ok,
        format!("dim {} = {} ({}), residual {}", t.dim(), joined(&d.labels()), dims.iter().map(ToString::to_string).collect::<Vec<_>>().join("+"), d.residual_dim()),
        json!({ "dim": t.dim(), "summands": d.labels(), "residual_dim": d.residual_dim() }),
    )
}

fn member_label(x: Member, k: usize) -> Label {
    let shape = match x {
        Member::W => Shape::W,
        Member::S => Shape::S,
        Member::N => Shape::N,
        Member::M => Shape::M,
    };
    Label::string(shape, k)
}

fn table(ctx: &Context) -> Outcome {
    let calc = match ctx.calculus() {
        Ok(c) => c,
        Err(e) => return outcome(false, e, Value::Null),
    };
    let mut checked = 0;
    let mut mismatches = Vec::new();
    for k in 1..=ctx.level {
        let Some(cell) = calc.cells.cell_by_name(&format!("J{k}")) else {
            mismatches.push(json!({ "k": k, "error": "no cell containing M:k" }));
            continue;
        };
        for x in Member::ALL {
            for y in Member::ALL {
                let (a, b) = (member_label(x, k), member_label(y, k));
                let got = calc.reduced_product(&a, &b, cell);
                let want = vec![member_label(x.times(y), k)];
                checked += 1;
                if got != want {
                    mismatches.push(json!({ "lhs": a, "rhs": b, "got": got, "expected": want }));
                }
            }
        }
    }
    outcome(
        mismatches.is_empty(),
        format!("{} of {checked} reduced products match; catalog of {} closed under ⊗", checked - mismatches.len(), calc.table.catalog.len()),
        json!({ "checked": checked, "mismatches": mismatches }),
    )
}

fn adjoint(level: usize) -> Outcome {
    let mut rows = Vec::new();
    let mut ok = true;
    for k in 0..=level {
        let (h, basis) = QBimodule::construct(&Label::s(k)).hom_left_regular();
        let iso = is_isomorphic(&Arc::new(h), &arc(&Label::n(k))).is_some();
        let good = basis.len() == 2 * (k + 1) && iso;
        ok &= good;
        rows.push(json!({ "k": k, "dim": basis.len(), "expected_dim": 2 * (k + 1), "isomorphic_to_N": iso }));
    }
    outcome(ok, format!("k = 0..{level}: dims {}", rows.iter().map(|r| r["dim"].to_string()).collect::<Vec<_>>().join(", ")), Value::Array(rows))
}

fn sorted_sets(sets: &[Vec<Label>]) -> Vec<Vec<Label>> {
    let mut v: Vec<Vec<Label>> = sets
        .iter()
        .map(|s| {
            let mut s = s.clone();
            s.sort();
            s
        })
        .collect();
    v.sort();
    v
}

fn cell_structure(ctx: &Context) -> Outcome {
    let calc = match ctx.calculus() {
        Ok(c) => c,
        Err(e) => return outcome(false, e, Value::Null),
    };
    let cs = &calc.cells;
    let names: Vec<String> = (0..cs.two_sided_cells.len()).map(|c| cs.name(c)).collect();
    let mut expected_names = vec!["Jsplit".to_string(), "J0".to_string()];
    expected_names.extend((1..=ctx.level).map(|k| format!("J{k}")));
    expected_names.push("Jid".into());
    let chain_ok = cs.is_linear() && names == expected_names && (1..names.len()).all(|i| cs.strictly_greater(i - 1, i));

    let mut bad_boxes = Vec::new();
    for k in 1..=ctx.level {
        let Some(c) = cs.cell_by_name(&format!("J{k}")) else { continue };
        let eb = cs.egg_box(c);
        let l = |x: Member| member_label(x, k);
        let left = sorted_sets(&[vec![l(Member::W), l(Member::S)], vec![l(Member::N), l(Member::M)]]);
        let right = sorted_sets(&[vec![l(Member::W), l(Member::N)], vec![l(Member::S), l(Member::M)]]);
        if sorted_sets(&eb.columns) != left || sorted_sets(&eb.rows) != right {
            bad_boxes.push(json!({ "cell": format!("J{k}"), "egg_box": eb }));
        }
    }
    let flags: Vec<(String, bool)> = names.iter().cloned().zip(calc.idempotent.iter().copied()).collect();
    let flags_ok = flags.iter().all(|(n, i)| *i == (n != "J0"));
    outcome(
        chain_ok && bad_boxes.is_empty() && flags_ok,
        format!(
            "{}; egg-boxes {}; non-idempotent: {}",
            names.join(if cs.is_linear() { " > " } else { " , " }),
            if bad_boxes.is_empty() { "match" } else { "differ" },
            flags.iter().filter(|f| !f.1).map(|f| f.0.as_str()).collect::<Vec<_>>().join(", ")
        ),
        json!({ "chain": names, "bad_egg_boxes": bad_boxes, "idempotent": flags }),
    )
}

/// The displayed list, with each member replaced by its canonical form.
fn displayed_orbits() -> Vec<BTreeSet<ActionMatrix>> {
    actmat::displayed_roots().iter().map(|v| v.iter().map(ActionMatrix::canonical).collect()).collect()
}

fn actmat_roots() -> Outcome {
    let expected = [1usize, 5, 2, 1];
    let mut found = Vec::new();
    let mut orbits_match = true;
    let displayed = displayed_orbits();
    for n in 1..=actmat::MAX_SIZE {
        let roots = actmat::enumerate_root_matrices(n).expect("supported size");
        orbits_match &= roots.iter().cloned().collect::<BTreeSet<_>>() == displayed[n - 1];
        found.push(roots.len());
    }
    // displayed matrices that collapse to one orbit
    let mut coincidences = Vec::new();
    for list in actmat::displayed_roots() {
        for i in 0..list.len() {
            for j in i + 1..list.len() {
                if let Some(p) = actmat::permutations(list[i].size()).into_iter().find(|p| list[i].permuted(p) == list[j]) {
                    coincidences.push(json!({ "a": list[i].to_string(), "b": list[j].to_string(), "permutation": p }));
                }
            }
        }
    }
    let ok = found == expected;
    let mut detail = format!("counts {found:?}, expected {expected:?}");
    if !coincidences.is_empty() {
        detail.push_str(&format!(
            "; {} displayed pair(s) are simultaneous row/column permutations of each other, e.g. {} ~ {}",
            coincidences.len(),
            coincidences[0]["a"].as_str().unwrap_or_default(),
            coincidences[0]["b"].as_str().unwrap_or_default()
        ));
    }
    detail.push_str(if orbits_match { "; enumerated orbits equal the displayed list" } else { "; enumerated orbits differ from the displayed list" });
    outcome(ok, detail, json!({ "found": found, "expected": expected, "orbits_match_displayed": orbits_match, "coincident_pairs": coincidences }))
}

fn actmat_proposition() -> Outcome {
    let start = Instant::now();
    let report = match actmat::verify_proposition(actmat::MAX_SIZE) {
        Ok(r) => r,
        Err(e) => return outcome(false, e.to_string(), Value::Null),
    };
    let in_budget = start.elapsed() < ACTMAT_BUDGET;
    let survivors: Vec<String> = report.survivors.iter().map(|q| format!("{q:?}")).collect();
    outcome(
        report.passed() && in_budget,
        format!(
            "{} root matrices searched, {} surviving class(es){}",
            report.searches.len(),
            report.survivors.len(),
            if in_budget { String::new() } else { format!(", over the {}s budget", ACTMAT_BUDGET.as_secs()) }
        ),
        json!({ "survivors": survivors, "searches": report.searches }),
    )
}

fn hom_lemma(level: usize) -> Outcome {
    let reports: Vec<can::HomLemmaReport> = (1..=level).map(can::verify_hom_lemma::<Scalar>).collect();
    let ok = reports.iter().all(can::HomLemmaReport::passed);
    let failing: Vec<usize> = reports.iter().filter(|r| !r.passed()).map(|r| r.k).collect();
    outcome(
        ok,
        format!("k = 1..{level}: {}", if ok { "Hom(M:k, D) and Hom(D, W:k) are 1 modulo the simple, others 0".to_string() } else { format!("fails at k = {failing:?}") }),
        serde_json::to_value(&reports).expect("serializable"),
    )
}

fn factorization(level: usize) -> Outcome {
    let mut chain_failures = Vec::new();
    let mut pairs = 0;
    for k in 0..=level {
        for l in 0..=k {
            pairs += 1;
            if compose(&can::phi::<Scalar>(k), &can::iota(l, k)) != can::phi(l) {
                chain_failures.push(format!("phi {l},{k}"));
            }
            if compose(&can::pi::<Scalar>(k, l), &can::psi(k)) != can::psi(l) {
                chain_failures.push(format!("psi {l},{k}"));
            }
        }
    }
    let mut through_beta = Vec::new();
    let mut literal = Vec::new();
    let mut reverse = Vec::new();
    for n in [2, 3] {
        let (alpha, beta) = match can::band_maps::<Scalar>(n) {
            Ok(m) => m,
            Err(e) => return outcome(false, e.to_string(), Value::Null),
        };
        for k in 0..=level {
            let (phi, psi) = (can::phi::<Scalar>(k), can::psi::<Scalar>(k));
            through_beta.push(can::factors_through(&phi, &beta).is_some_and(|h| compose(&beta, &h) == phi));
            literal.push(can::cofactors_through(&alpha, &psi).is_some_and(|h| compose(&h, &psi) == alpha));
            reverse.push(can::cofactors_through(&psi, &alpha).is_some_and(|g| compose(&g, &alpha) == psi));
        }
    }
    let count = |v: &[bool]| v.iter().filter(|b| **b).count();
    let total = literal.len();
    let ok = chain_failures.is_empty() && count(&through_beta) == total && count(&literal) == total;
    let mut detail = format!(
        "ι/π chains {}/{pairs}; φ_k = β_n∘h {}/{total}; α_n = h∘ψ_k {}/{total}",
        pairs - chain_failures.len() / 2,
        count(&through_beta),
        count(&literal)
    );
    if count(&literal) < total {
        detail.push_str(&format!(
            " (R kills w_1 and L kills the last w, while both are injective on a band's top layer, so h∘ψ_k lands in the radical; the reverse ψ_k = g∘α_n holds {}/{total})",
            count(&reverse)
        ));
    }
    outcome(
        ok,
        detail,
        json!({
            "chain_failures": chain_failures,
            "phi_through_beta": through_beta,
            "alpha_through_psi": literal,
            "psi_through_alpha": reverse,
            "band_lengths": [2, 3],
        }),
    )
}

fn goodness(level: usize) -> Outcome {
    let mut rows = Vec::new();
    let mut ok = true;
    for k in 1..=level {
        let good = can::check_good(&can::phi::<Scalar>(k), &can::duflo_cell(k));
        let cogood = can::check_cogood(&can::psi::<Scalar>(k), &can::coduflo_cell(k));
        ok &= good && cogood;
        rows.push(json!({ "k": k, "good": good, "cogood": cogood }));
    }
    let section = can::duflo_section::<Scalar>(1);
    let section_ok = section.as_ref().is_some_and(|cert| {
        let m = arc(&Label::m(1));
        let basis = can::duflo_summand_basis(&tensor(&m, &m));
        let image = cert.section_or_retraction.matrix();
        cert.verify() && cert.side == Side::Right && image.rank() == 5 && basis.hstack(image).rank() == basis.rank()
    });
    ok &= section_ok;
    outcome(
        ok,
        format!(
            "k = 1..{level}: {}; section of M:1 φ_1 {} the quoted summand",
            if rows.iter().all(|r| r["good"] == true && r["cogood"] == true) { "all good and cogood" } else { "failures present" },
            if section_ok { "spans" } else { "misses" }
        ),
        json!({ "levels": rows, "section_k1": section.map(|c| can::matrix_strings(c.section_or_retraction.matrix())) }),
    )
}

fn structures() -> Outcome {
    let mut rows = Vec::new();
    let mut ok = true;
    let mut record = |name: &str, k: usize, result: Result<Vec<(&'static str, bool)>, String>| {
        let (pass, failed) = match result {
            Ok(axioms) => {
                let failed: Vec<&str> = axioms.iter().filter(|a| !a.1).map(|a| a.0).collect();
                (failed.is_empty(), json!(failed))
            }
            Err(e) => (false, json!(e)),
        };
        ok &= pass;
        rows.push(json!({ "structure": name, "k": k, "pass": pass, "failed": failed }));
    };
    for k in 1..=4 {
        record(
            "coalgebra M:k",
            k,
            can::coalgebra_mk::<Scalar>(k).map_err(|e| e.to_string()).map(|c| {
                let mut a = c.axioms();
                a.push(("matches decomposition", can::delta_matches_decomposition::<Scalar>(k)));
                a
            }),
        );
        record(
            "algebra W:k",
            k,
            can::algebra_wk::<Scalar>(k).map_err(|e| e.to_string()).map(|a| {
                let mut ax = a.axioms();
                ax.push(("matches decomposition", can::mu_matches_decomposition(&a)));
                ax
            }),
        );
    }
    for k in 1..=3 {
        record("comodule N:k", k, can::comodule_nk::<Scalar>(k).map(|c| c.axioms()).map_err(|e| e.to_string()));
        record(
            "module S:k",
            k,
            can::module_sk::<Scalar>(k).map_err(|e| e.to_string()).and_then(|m| {
                let mut ax = m.axioms();
                ax.push(("square", m.square_commutes(k).map_err(|e| e.to_string())?));
                Ok(ax)
            }),
        );
    }
    let failing: Vec<String> = rows.iter().filter(|r| r["pass"] == false).map(|r| format!("{} k={}", r["structure"].as_str().unwrap_or_default(), r["k"])).collect();
    outcome(
        ok,
        if ok { format!("{} structures verified", rows.len()) } else { format!("failing: {}", failing.join(", ")) },
        Value::Array(rows),
    )
}

/// The fixed list of round-trip cases for a catalog.
pub fn roundtrip_cases(catalog: &Catalog) -> Vec<(u64, Vec<Label>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(ROUNDTRIP_SEED);
    (0..ROUNDTRIP_CASES)
        .map(|i| {
            let r = rng.gen_range(1..=ROUNDTRIP_MAX_SUMMANDS);
            let labels = (0..r).map(|_| catalog.labels[rng.gen_range(0..catalog.len())].clone()).collect();
            (ROUNDTRIP_SHUFFLE_BASE + i, labels)
        })
        .collect()
}

fn roundtrip(level: usize) -> Outcome {
    let catalog = Catalog::new(level).expect("level checked");
    let cases = roundtrip_cases(&catalog);
    let failures: Vec<Value> = cases
        .par_iter()
        .filter_map(|(seed, labels)| {
            let parts: Vec<QBimodule> = labels.iter().map(Bimodule::construct).collect();
            let m = Arc::new(shuffled(&Bimodule::direct_sum_all(parts.iter()), *seed));
            let d = decompose(&m);
            let mut want = labels.clone();
            want.sort();
            (d.labels() != want || !d.is_complete()).then(|| json!({ "seed": seed, "expected": want, "got": d.labels(), "residual_dim": d.residual_dim() }))
        })
        .collect();
    let max_dim = cases.iter().map(|(_, l)| l.iter().map(Label::dim).sum::<usize>()).max().unwrap_or(0);
    outcome(
        failures.is_empty(),
        format!("{} of {} sums recovered exactly (largest dim {max_dim})", cases.len() - failures.len(), cases.len()),
        json!({ "cases": cases.len(), "seed": ROUNDTRIP_SEED, "failures": failures }),
    )
}

type R64 = Ratio<i64>;

/// Whether some idempotent of `End(X)` with coefficients in `{-1, 0, 1}` on the
/// hom basis has image isomorphic to `C`.
fn idempotent_with_image(x: &Arc<Bimodule<R64>>, c: &Label, end: &[Mat<R64>]) -> bool {
    let target = arc(c);
    let n = x.dim();
    let mut coeffs = vec![-1i64; end.len()];
    loop {
        let mut e = Mat::<R64>::zeros(n, n);
        for (a, b) in coeffs.iter().zip(end) {
            if *a != 0 {
                e = &e + &b.scale(&R64::from_integer(*a));
            }
        }
        if e.rank() == c.dim() && &e * &e == e {
            let image = e.column_space();
            let as_q = |m: &Mat<R64>| Mat::<Scalar>::from_fn(m.rows(), m.cols(), |i, j| m.get(i, j).to_rational());
            let xq = QBimodule::new(as_q(x.left()), as_q(x.right())).expect("valid bimodule");
            if let Ok(sub) = xq.restrict_to(&as_q(&image)) {
                if is_isomorphic(&Arc::new(sub), &target).is_some() {
                    return true;
                }
            }
        }
        // next point of {-1, 0, 1}^d
        let mut i = 0;
        loop {
            if i == coeffs.len() {
                return false;
            }
            if coeffs[i] < 1 {
                coeffs[i] += 1;
                break;
            }
            coeffs[i] = -1;
            i += 1;
        }
    }
}

/// Multisets of catalog members with total dimension at most `max_dim`.
fn small_sums(labels: &[Label], max_dim: usize) -> Vec<Vec<Label>> {
    fn go(labels: &[Label], from: usize, room: usize, cur: &mut Vec<Label>, out: &mut Vec<Vec<Label>>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        for i in from..labels.len() {
            if labels[i].dim() <= room {
                cur.push(labels[i].clone());
                go(labels, i, room - labels[i].dim(), cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(labels, 0, max_dim, &mut Vec::new(), &mut out);
    out
}

fn summand_oracle() -> Outcome {
    let catalog = Catalog::new(DEFAULT_LEVEL).expect("default level");
    let small: Vec<Label> = catalog.labels.iter().filter(|l| l.dim() <= ORACLE_MAX_DIM).cloned().collect();
    let sums = small_sums(&small, ORACLE_MAX_DIM);
    let results: Vec<(Vec<Label>, Option<Vec<Value>>)> = sums
        .par_iter()
        .map(|parts| {
            let xr = Arc::new(Bimodule::direct_sum_all(parts.iter().map(Bimodule::<R64>::construct).collect::<Vec<_>>().iter()));
            let end: Vec<Mat<R64>> = hom_space(&xr, &xr).into_iter().map(|h| h.matrix().clone()).collect();
            if end.len() > ORACLE_MAX_END_DIM && parts.len() > 1 {
                return (parts.clone(), None);
            }
            let xq = Arc::new(Bimodule::direct_sum_all(parts.iter().map(QBimodule::construct).collect::<Vec<_>>().iter()));
            let disagreements = small
                .iter()
                .filter_map(|c| {
                    let by_trace = summand_test(&arc(c), &xq);
                    let by_idempotent = idempotent_with_image(&xr, c, &end);
                    let truth = parts.contains(c);
                    (by_trace != by_idempotent || by_trace != truth)
                        .then(|| json!({ "sum": parts, "candidate": c, "trace": by_trace, "idempotent": by_idempotent, "truth": truth }))
                })
                .collect();
            (parts.clone(), Some(disagreements))
        })
        .collect();
    let tested = results.iter().filter(|r| r.1.is_some()).count();
    let skipped: Vec<String> = results.iter().filter(|r| r.1.is_none()).map(|r| joined(&r.0)).collect();
    let disagreements: Vec<Value> = results.into_iter().filter_map(|r| r.1).flatten().collect();
    let indecomposables = small.len();
    outcome(
        disagreements.is_empty(),
        format!(
            "{tested} modules of dim ≤ {ORACLE_MAX_DIM} ({indecomposables} indecomposable) × {indecomposables} candidates agree; {} sums with End dim > {ORACLE_MAX_END_DIM} not enumerated",
            skipped.len()
        ),
        json!({ "tested": tested, "skipped": skipped, "disagreements": disagreements }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selection() {
        assert_eq!(select(&["actmat".into()]).unwrap(), vec!["actmat-roots", "actmat"]);
        assert_eq!(select(&["table".into()]).unwrap(), vec!["table"]);
        assert_eq!(select(&[]).unwrap().len(), 12);
        assert!(matches!(select(&["nope".into()]), Err(SuiteError::UnknownCheck(_))));
        assert_eq!(run(5, &[]).unwrap_err(), SuiteError::Level(5));
        assert_eq!(run(0, &[]).unwrap_err(), SuiteError::Level(0));
    }

    #[test]
    fn small_sums_are_bounded_multisets() {
        let labels = vec![Label::w(0), Label::Regular];
        let sums = small_sums(&labels, 2);
        // W0, W0+W0, D
        assert_eq!(sums.len(), 3);
        assert!(sums.iter().all(|s| s.iter().map(Label::dim).sum::<usize>() <= 2));
    }

    #[test]
    fn idempotent_oracle_sees_both_summands() {
        let parts = [Label::w(0), Label::s(0)];
        let x = Arc::new(Bimodule::direct_sum_all(parts.iter().map(Bimodule::<R64>::construct).collect::<Vec<_>>().iter()));
        let end: Vec<Mat<R64>> = hom_space(&x, &x).into_iter().map(|h| h.matrix().clone()).collect();
        assert!(idempotent_with_image(&x, &Label::w(0), &end));
        assert!(idempotent_with_image(&x, &Label::s(0), &end));
        assert!(!idempotent_with_image(&x, &Label::n(0), &end));
    }

    #[test]
    fn single_checks() {
        let r = run(1, &["m0-square".into(), "adjoint".into()]).unwrap();
        assert!(r.passed(), "{}", r.to_text(false));
        assert_eq!(r.checks.iter().map(|c| c.check).collect::<Vec<_>>(), vec!["m0-square", "adjoint"]);
    }
}
