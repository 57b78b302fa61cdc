//! Integer action matrices: roots of `F² = 4F` and the idempotent quadruples
//! `[W] + [S] + [N] + [M] = F` compatible with the cell multiplication table.

use std::collections::BTreeSet;
use std::fmt;

use rayon::prelude::*;
use serde::{Serialize, Serializer};
use thiserror::Error;

/// Upper bound on entries of a root matrix.
///
/// From `(F²)_ii = 4F_ii` with positive entries, `F_ii² + F_ij F_ji ≤ 4F_ii`,
/// so `F_ii ≤ 4` and `F_ij ≤ F_ij F_ji ≤ 4F_ii − F_ii² ≤ 4`.
pub const ENTRY_BOUND: u32 = 4;

pub const MAX_SIZE: usize = 4;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ActmatError {
    #[error("matrix size {0} outside 1..=4")]
    Size(usize),
    #[error("F² ≠ 4F")]
    NotRoot,
}

/// Square matrix of nonnegative integers, row-major.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ActionMatrix {
    n: usize,
    data: Vec<u32>,
}

impl ActionMatrix {
    pub fn new(rows: &[&[u32]]) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "square rows");
        ActionMatrix { n, data: rows.concat() }
    }

    pub fn from_data(n: usize, data: Vec<u32>) -> Self {
        assert_eq!(data.len(), n * n);
        ActionMatrix { n, data }
    }

    pub fn zeros(n: usize) -> Self {
        ActionMatrix { n, data: vec![0; n * n] }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.n + j]
    }

    pub fn data(&self) -> &[u32] {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<u32>> {
        self.data.chunks(self.n).map(<[u32]>::to_vec).collect()
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let n = self.n;
        let mut data = vec![0; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    data[i * n + j] += a * rhs.get(k, j);
                }
            }
        }
        ActionMatrix { n, data }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        ActionMatrix { n: self.n, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }

    pub fn scale(&self, s: u32) -> Self {
        ActionMatrix { n: self.n, data: self.data.iter().map(|a| a * s).collect() }
    }

    pub fn trace(&self) -> u32 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn is_idempotent(&self) -> bool {
        self.mul(self) == *self
    }

    /// Rank over ℚ, via fraction-free elimination in `i64`.
    pub fn rank(&self) -> usize {
        let n = self.n;
        let mut m: Vec<Vec<i64>> = self.rows().into_iter().map(|r| r.into_iter().map(i64::from).collect()).collect();
        let mut rank = 0;
        for col in 0..n {
            let Some(p) = (rank..n).find(|&r| m[r][col] != 0) else { continue };
            m.swap(rank, p);
            for r in rank + 1..n {
                if m[r][col] != 0 {
                    let (a, b) = (m[rank][col], m[r][col]);
                    let pivot = m[rank].clone();
                    for (x, p) in m[r].iter_mut().zip(pivot) {
                        *x = *x * a - p * b;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    pub fn is_root(&self) -> bool {
        self.mul(self) == self.scale(4)
    }

    pub fn zero_columns(&self) -> Vec<usize> {
        (0..self.n).filter(|&j| (0..self.n).all(|i| self.get(i, j) == 0)).collect()
    }

    pub fn row_is_zero(&self, i: usize) -> bool {
        (0..self.n).all(|j| self.get(i, j) == 0)
    }

    /// `P A Pᵀ` for the permutation `i ↦ perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let n = self.n;
        let mut data = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                data[perm[i] * n + perm[j]] = self.get(i, j);
            }
        }
        ActionMatrix { n, data }
    }

    /// Lexicographically least matrix in the orbit under simultaneous
    /// row and column permutations.
    pub fn canonical(&self) -> Self {
        permutations(self.n).iter().map(|p| self.permuted(p)).min().expect("S_n is nonempty")
    }

    pub fn leq(&self, rhs: &Self) -> bool {
        self.data.iter().zip(&rhs.data).all(|(a, b)| a <= b)
    }
}

impl fmt::Debug for ActionMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.rows())
    }
}

impl fmt::Display for ActionMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .rows()
            .iter()
            .map(|r| r.iter().map(u32::to_string).collect::<Vec<_>>().join(","))
            .collect();
        write!(f, "[{}]", rows.join(";"))
    }
}

impl Serialize for ActionMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.rows().serialize(s)
    }
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                go(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Positive integer matrices with `F² = 4F`, one per orbit.
pub fn enumerate_root_matrices(n: usize) -> Result<Vec<ActionMatrix>, ActmatError> {
    enumerate_bounded(n, ENTRY_BOUND)
}

/// As [`enumerate_root_matrices`] with entries in `1..=bound`.
///
/// The diagonal is chosen first; each off-diagonal pair `(F_ij, F_ji)` is then
/// limited by `F_ij F_ji ≤ 4F_ii − F_ii²` from the diagonal equations.
pub fn enumerate_bounded(n: usize, bound: u32) -> Result<Vec<ActionMatrix>, ActmatError> {
    if !(1..=MAX_SIZE).contains(&n) {
        return Err(ActmatError::Size(n));
    }
    let slack = |d: u32| (4 * d).saturating_sub(d * d);
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let mut found = BTreeSet::new();
    let mut diag = vec![1u32; n];
    loop {
        if diag.iter().all(|&d| slack(d) > 0 || n == 1) {
            let mut m = ActionMatrix::zeros(n);
            for (i, &d) in diag.iter().enumerate() {
                m.data[i * n + i] = d;
            }
            fill_pairs(&mut m, &pairs, 0, bound, &slack, &mut found);
        }
        // next diagonal in 1..=bound
        let mut i = 0;
        while i < n && diag[i] == bound {
            diag[i] = 1;
            i += 1;
        }
        if i == n {
            break;
        }
        diag[i] += 1;
    }
    Ok(found.into_iter().collect())
}

fn fill_pairs(
    m: &mut ActionMatrix,
    pairs: &[(usize, usize)],
    at: usize,
    bound: u32,
    slack: &dyn Fn(u32) -> u32,
    found: &mut BTreeSet<ActionMatrix>,
) {
    let n = m.n;
    if at == pairs.len() {
        if m.is_root() {
            found.insert(m.canonical());
        }
        return;
    }
    let (i, j) = pairs[at];
    let cap = slack(m.get(i, i)).min(slack(m.get(j, j)));
    for a in 1..=bound {
        for b in 1..=bound {
            if a * b > cap {
                break;
            }
            m.data[i * n + j] = a;
            m.data[j * n + i] = b;
            fill_pairs(m, pairs, at + 1, bound, slack, found);
        }
    }
}

/// The four members of a cell, in egg-box order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Member {
    W,
    S,
    N,
    M,
}

impl Member {
    pub const ALL: [Member; 4] = [Member::W, Member::S, Member::N, Member::M];

    /// Right cells `{W, N}`, `{S, M}` are the rows of the egg-box.
    fn row(self) -> usize {
        match self {
            Member::W | Member::N => 0,
            Member::S | Member::M => 1,
        }
    }

    /// Left cells `{W, S}`, `{N, M}` are the columns.
    fn column(self) -> usize {
        match self {
            Member::W | Member::S => 0,
            Member::N | Member::M => 1,
        }
    }

    /// `X ∘ Y` modulo strictly greater cells.
    pub fn times(self, rhs: Member) -> Member {
        EGG_BOX[self.row()][rhs.column()]
    }
}

const EGG_BOX: [[Member; 2]; 2] = [[Member::W, Member::N], [Member::S, Member::M]];

/// Action matrices of `W, S, N, M`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Quadruple {
    pub w: ActionMatrix,
    pub s: ActionMatrix,
    pub n: ActionMatrix,
    pub m: ActionMatrix,
}

impl fmt::Debug for Quadruple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "W={} S={} N={} M={}", self.w, self.s, self.n, self.m)
    }
}

impl Quadruple {
    pub fn get(&self, x: Member) -> &ActionMatrix {
        match x {
            Member::W => &self.w,
            Member::S => &self.s,
            Member::N => &self.n,
            Member::M => &self.m,
        }
    }

    pub fn sum(&self) -> ActionMatrix {
        self.w.add(&self.s).add(&self.n).add(&self.m)
    }

    /// All sixteen identities `[X][Y] = [X∘Y]`.
    pub fn satisfies_table(&self) -> bool {
        Member::ALL
            .iter()
            .all(|&x| Member::ALL.iter().all(|&y| self.get(x).mul(self.get(y)) == *self.get(x.times(y))))
    }

    /// A zero column of `[N]` forces the matching row of `[S]` to vanish, and
    /// the other way round.
    pub fn satisfies_zero_transfer(&self) -> bool {
        let transfer = |a: &ActionMatrix, b: &ActionMatrix| a.zero_columns().into_iter().all(|i| b.row_is_zero(i));
        transfer(&self.n, &self.s) && transfer(&self.s, &self.n)
    }

    /// Equalities forced by the table: `W=S ⇔ N=M`, `W=N ⇔ S=M`, and
    /// `W=M` or `S=N` only when all four agree.
    pub fn equalities_consistent(&self) -> bool {
        let all = self.w == self.s && self.s == self.n && self.n == self.m;
        ((self.w == self.s) == (self.n == self.m))
            && ((self.w == self.n) == (self.s == self.m))
            && (!(self.w == self.m || self.s == self.n) || all)
    }

    pub fn permuted(&self, perm: &[usize]) -> Self {
        Quadruple {
            w: self.w.permuted(perm),
            s: self.s.permuted(perm),
            n: self.n.permuted(perm),
            m: self.m.permuted(perm),
        }
    }

    /// Least representative under a common renumbering of the four matrices.
    pub fn canonical(&self) -> Self {
        permutations(self.w.n).iter().map(|p| self.permuted(p)).min().expect("S_n is nonempty")
    }
}

/// Idempotent, trace-1, rank-1 matrices bounded entrywise by `f`.
pub fn idempotent_parts(f: &ActionMatrix) -> Vec<ActionMatrix> {
    let mut out = Vec::new();
    let mut x = ActionMatrix::zeros(f.n);
    fn go(f: &ActionMatrix, x: &mut ActionMatrix, at: usize, out: &mut Vec<ActionMatrix>) {
        if at == x.data.len() {
            if x.trace() == 1 && x.is_idempotent() && x.rank() == 1 {
                out.push(x.clone());
            }
            return;
        }
        let n = x.n;
        let (i, j) = (at / n, at % n);
        for v in 0..=f.data[at] {
            // the diagonal of a trace-1 nonnegative matrix is a unit vector
            if i == j && v > 1 {
                break;
            }
            x.data[at] = v;
            go(f, x, at + 1, out);
        }
        x.data[at] = 0;
    }
    go(f, &mut x, 0, &mut out);
    out
}

/// Counts at each filtering stage for one `F`.
#[derive(Clone, Debug, Serialize)]
pub struct SearchSummary {
    pub f: ActionMatrix,
    pub parts: usize,
    /// Quadruples of parts summing to `F`.
    pub sums: usize,
    pub after_table: usize,
    pub after_zero_transfer: usize,
    pub solutions: Vec<Quadruple>,
    /// Every table-compatible quadruple obeys [`Quadruple::equalities_consistent`].
    pub equalities_consistent: bool,
}

pub fn quadruple_search(f: &ActionMatrix) -> Result<Vec<Quadruple>, ActmatError> {
    Ok(search(f, false)?.solutions)
}

/// Full search with stage counts; `reverse` walks the parts backwards (the
/// result must not depend on it).
pub fn search(f: &ActionMatrix, reverse: bool) -> Result<SearchSummary, ActmatError> {
    if !f.is_root() {
        return Err(ActmatError::NotRoot);
    }
    let mut parts = idempotent_parts(f);
    if reverse {
        parts.reverse();
    }
    let sums: Vec<Quadruple> = parts
        .par_iter()
        .flat_map_iter(|w| {
            let parts = &parts;
            let mut local = Vec::new();
            for s in parts.iter().filter(|s| w.add(s).leq(f)) {
                let ws = w.add(s);
                for n in parts.iter().filter(|n| ws.add(n).leq(f)) {
                    let wsn = ws.add(n);
                    let m = ActionMatrix {
                        n: f.n,
                        data: f.data.iter().zip(&wsn.data).map(|(a, b)| a - b).collect(),
                    };
                    if parts.contains(&m) {
                        local.push(Quadruple { w: w.clone(), s: s.clone(), n: n.clone(), m });
                    }
                }
            }
            local
        })
        .collect();
    let table: Vec<&Quadruple> = sums.iter().filter(|q| q.satisfies_table()).collect();
    let equalities_consistent = table.iter().all(|q| q.equalities_consistent());
    let kept: Vec<&Quadruple> = table.iter().copied().filter(|q| q.satisfies_zero_transfer()).collect();
    let solutions: BTreeSet<Quadruple> = kept.iter().map(|q| q.canonical()).collect();
    Ok(SearchSummary {
        f: f.clone(),
        parts: parts.len(),
        sums: sums.len(),
        after_table: table.len(),
        after_zero_transfer: kept.len(),
        solutions: solutions.into_iter().collect(),
        equalities_consistent,
    })
}

/// The two classes allowed by the classification, canonicalized.
pub fn expected_classes() -> Vec<Quadruple> {
    let one = ActionMatrix::new(&[&[1]]);
    let top = ActionMatrix::new(&[&[1, 1], &[0, 0]]);
    let bottom = ActionMatrix::new(&[&[0, 0], &[1, 1]]);
    let mut v = vec![
        Quadruple { w: one.clone(), s: one.clone(), n: one.clone(), m: one },
        Quadruple { w: top.clone(), s: bottom.clone(), n: top, m: bottom }.canonical(),
    ];
    v.sort();
    v
}

#[derive(Clone, Debug, Serialize)]
pub struct PropositionReport {
    pub n_max: usize,
    pub roots: Vec<Vec<ActionMatrix>>,
    pub searches: Vec<SearchSummary>,
    pub survivors: Vec<Quadruple>,
    pub expected: Vec<Quadruple>,
    pub equalities_consistent: bool,
}

impl PropositionReport {
    pub fn passed(&self) -> bool {
        self.survivors == self.expected && self.equalities_consistent
    }
}

pub fn verify_proposition(n_max: usize) -> Result<PropositionReport, ActmatError> {
    let roots: Vec<Vec<ActionMatrix>> = (1..=n_max).map(enumerate_root_matrices).collect::<Result<_, _>>()?;
    let searches: Vec<SearchSummary> = roots
        .iter()
        .flatten()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|f| search(f, false))
        .collect::<Result<_, _>>()?;
    let survivors: BTreeSet<Quadruple> = searches.iter().flat_map(|s| s.solutions.iter().cloned()).collect();
    Ok(PropositionReport {
        n_max,
        equalities_consistent: searches.iter().all(|s| s.equalities_consistent),
        roots,
        searches,
        survivors: survivors.into_iter().collect(),
        expected: expected_classes(),
    })
}

/// The matrices displayed in the classification, grouped by size.
pub fn displayed_roots() -> Vec<Vec<ActionMatrix>> {
    vec![
        vec![ActionMatrix::new(&[&[4]])],
        vec![
            ActionMatrix::new(&[&[2, 2], &[2, 2]]),
            ActionMatrix::new(&[&[3, 3], &[1, 1]]),
            ActionMatrix::new(&[&[3, 1], &[3, 1]]),
            ActionMatrix::new(&[&[2, 4], &[1, 2]]),
            ActionMatrix::new(&[&[2, 1], &[4, 2]]),
        ],
        vec![
            ActionMatrix::new(&[&[2, 1, 1], &[2, 1, 1], &[2, 1, 1]]),
            ActionMatrix::new(&[&[2, 2, 2], &[1, 1, 1], &[1, 1, 1]]),
        ],
        vec![ActionMatrix::new(&[&[1, 1, 1, 1], &[1, 1, 1, 1], &[1, 1, 1, 1], &[1, 1, 1, 1]])],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Every matrix in `{1..bound}^{n×n}` with `F² = 4F`, no pruning, no orbits.
    fn naive_roots(n: usize, bound: u32) -> BTreeSet<ActionMatrix> {
        let len = n * n;
        let mut data = vec![1u32; len];
        let mut out = BTreeSet::new();
        loop {
            let m = ActionMatrix::from_data(n, data.clone());
            if m.is_root() {
                out.insert(m);
            }
            let mut i = 0;
            while i < len && data[i] == bound {
                data[i] = 1;
                i += 1;
            }
            if i == len {
                return out;
            }
            data[i] += 1;
        }
    }

    fn orbit_union(reps: &[ActionMatrix]) -> BTreeSet<ActionMatrix> {
        reps.iter()
            .flat_map(|r| permutations(r.size()).into_iter().map(move |p| r.permuted(&p)))
            .collect()
    }

    /// `F = u vᵀ` with positive integer vectors and `v·u = 4`.
    fn rank_one_roots(n: usize) -> BTreeSet<ActionMatrix> {
        let vectors: Vec<Vec<u32>> = (0..4u32.pow(n as u32))
            .map(|mut c| {
                (0..n)
                    .map(|_| {
                        let d = c % 4 + 1;
                        c /= 4;
                        d
                    })
                    .collect()
            })
            .collect();
        let mut out = BTreeSet::new();
        for u in &vectors {
            for v in &vectors {
                if u.iter().zip(v).map(|(a, b)| a * b).sum::<u32>() == 4 {
                    let data = (0..n * n).map(|t| u[t / n] * v[t % n]).collect();
                    out.insert(ActionMatrix::from_data(n, data));
                }
            }
        }
        out
    }

    #[test]
    fn root_counts() {
        let counts: Vec<usize> = (1..=4).map(|n| enumerate_root_matrices(n).unwrap().len()).collect();
        // the two displayed 2×2 matrices [[2,4],[1,2]] and [[2,1],[4,2]] are swapped by renumbering
        assert_eq!(counts, vec![1, 4, 2, 1]);
        assert_eq!(enumerate_root_matrices(1).unwrap(), vec![ActionMatrix::new(&[&[4]])]);
        assert_eq!(enumerate_root_matrices(0), Err(ActmatError::Size(0)));
        assert_eq!(enumerate_root_matrices(5), Err(ActmatError::Size(5)));
    }

    #[test]
    fn displayed_list_is_the_orbit_set() {
        for (n, shown) in displayed_roots().iter().enumerate() {
            let canon: BTreeSet<_> = shown.iter().map(ActionMatrix::canonical).collect();
            let found: BTreeSet<_> = enumerate_root_matrices(n + 1).unwrap().into_iter().collect();
            assert_eq!(canon, found);
        }
        let a = ActionMatrix::new(&[&[2, 4], &[1, 2]]);
        assert_eq!(a.permuted(&[1, 0]), ActionMatrix::new(&[&[2, 1], &[4, 2]]));
    }

    #[test]
    fn naive_scan_matches_small_sizes() {
        for n in 1..=3 {
            let reps = enumerate_root_matrices(n).unwrap();
            assert_eq!(naive_roots(n, ENTRY_BOUND), orbit_union(&reps), "n = {n}");
        }
    }

    #[test]
    fn rank_one_oracle_matches() {
        for n in 1..=4 {
            let reps = enumerate_root_matrices(n).unwrap();
            assert_eq!(rank_one_roots(n), orbit_union(&reps), "n = {n}");
        }
    }

    #[test]
    #[ignore = "4^16 matrices; run with --ignored"]
    fn naive_scan_size_four() {
        let reps = enumerate_root_matrices(4).unwrap();
        assert_eq!(naive_roots(4, ENTRY_BOUND), orbit_union(&reps));
    }

    #[test]
    fn entry_bound_is_not_binding() {
        for n in 1..=3 {
            assert_eq!(enumerate_bounded(n, 7).unwrap(), enumerate_root_matrices(n).unwrap());
        }
        assert_eq!(naive_roots(2, 6), orbit_union(&enumerate_root_matrices(2).unwrap()));
    }

    #[test]
    fn egg_box_products() {
        assert_eq!(Member::W.times(Member::S), Member::W);
        assert_eq!(Member::S.times(Member::N), Member::M);
        assert_eq!(Member::N.times(Member::W), Member::W);
        assert_eq!(Member::M.times(Member::W), Member::S);
        for x in Member::ALL {
            assert_eq!(x.times(x), x);
        }
    }

    #[test]
    fn rank_one_solution() {
        let sol = quadruple_search(&ActionMatrix::new(&[&[4]])).unwrap();
        let one = ActionMatrix::new(&[&[1]]);
        assert_eq!(sol, vec![Quadruple { w: one.clone(), s: one.clone(), n: one.clone(), m: one }]);
    }

    #[test]
    fn rank_two_solution() {
        let sol = quadruple_search(&ActionMatrix::new(&[&[2, 2], &[2, 2]])).unwrap();
        let top = ActionMatrix::new(&[&[1, 1], &[0, 0]]);
        let bottom = ActionMatrix::new(&[&[0, 0], &[1, 1]]);
        let expected = Quadruple { w: top.clone(), s: bottom.clone(), n: top, m: bottom };
        assert_eq!(sol, vec![expected.canonical()]);
        for f in [&[[3u32, 3], [1, 1]], &[[3, 1], [3, 1]]] {
            let rows: Vec<&[u32]> = f.iter().map(|r| r.as_slice()).collect();
            assert!(quadruple_search(&ActionMatrix::new(&rows)).unwrap().is_empty());
        }
    }

    #[test]
    fn larger_sizes_have_no_solutions() {
        for n in 3..=4 {
            for f in enumerate_root_matrices(n).unwrap() {
                assert!(quadruple_search(&f).unwrap().is_empty(), "{f}");
            }
        }
    }

    #[test]
    fn proposition() {
        let r = verify_proposition(4).unwrap();
        assert!(r.passed(), "{:?}", r.survivors);
        for s in &r.searches {
            for q in &s.solutions {
                assert!(q.satisfies_table() && q.satisfies_zero_transfer());
                assert_eq!(q.sum().canonical(), s.f.canonical());
            }
        }
    }

    #[test]
    fn order_independent() {
        for n in 1..=4 {
            for f in enumerate_root_matrices(n).unwrap() {
                assert_eq!(search(&f, false).unwrap().solutions, search(&f, true).unwrap().solutions);
            }
        }
    }

    #[test]
    fn not_a_root_is_rejected() {
        assert_eq!(quadruple_search(&ActionMatrix::new(&[&[3]])).err(), Some(ActmatError::NotRoot));
    }

    #[test]
    fn rank_over_rationals() {
        assert_eq!(ActionMatrix::new(&[&[1, 1], &[1, 1]]).rank(), 1);
        assert_eq!(ActionMatrix::new(&[&[1, 0], &[0, 1]]).rank(), 2);
        assert_eq!(ActionMatrix::new(&[&[2, 4, 1], &[1, 2, 0], &[0, 0, 0]]).rank(), 2);
    }
}
