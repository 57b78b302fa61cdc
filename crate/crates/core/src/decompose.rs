//! Krull–Schmidt decomposition into labelled indecomposables.
//!
//! A candidate `C` is a summand of `X` exactly when `id_C` lies in the span of
//! the composites `g ∘ f` with `f: C → X`, `g: X → C`. Because `End(C)` is
//! local, some term of that expansion is itself invertible, which gives the
//! idempotent `f (g f)⁻¹ g` used to split `C` off.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::bimodule::{compose, hom_space, Bimodule, Morphism};
use crate::label::{Label, Shape};
use crate::linalg::{express_in_span, Field, LinearQuotient, Mat};

/// Seed for every pseudo-random choice made while searching for isomorphisms.
pub const ISO_SEED: u64 = 0xD0A1;

/// Upper bound on small-coefficient combinations tried before falling back to
/// the random witness.
const SPIRAL_CAP: usize = 4096;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DecomposeError {
    #[error("{0} is not a direct summand")]
    NotASummand(String),
}

/// Additive numerical invariants of a bimodule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Invariants {
    pub dim: usize,
    pub rank_left: usize,
    pub rank_right: usize,
    /// `dim(im L ∩ im R)`
    pub valleys: usize,
    pub rank_left_right: usize,
    pub top: usize,
    pub socle: usize,
}

impl Invariants {
    pub fn of<F: Field>(m: &Bimodule<F>) -> Self {
        let rank_left = m.rank_left();
        let rank_right = m.rank_right();
        let radical = m.radical_dim();
        Invariants {
            dim: m.dim(),
            rank_left,
            rank_right,
            valleys: rank_left + rank_right - radical,
            rank_left_right: m.rank_left_right(),
            top: m.dim() - radical,
            socle: m.socle_dim(),
        }
    }

    /// Additive quantities that are nonnegative on every bimodule. `im LR` sits
    /// inside `im L ∩ im R` and inside the socle, and `LR` maps the top onto it.
    fn pruning_vector(&self) -> [usize; 10] {
        let lr = self.rank_left_right;
        [
            self.dim,
            self.rank_left,
            self.rank_right,
            self.valleys,
            lr,
            self.top,
            self.socle,
            self.valleys - lr,
            self.top - lr,
            self.socle - lr,
        ]
    }

    /// Whether a module with these invariants could be a summand of one with `other`.
    pub fn fits_in(&self, other: &Invariants) -> bool {
        self.pruning_vector()
            .iter()
            .zip(other.pruning_vector())
            .all(|(a, b)| *a <= b)
    }
}

/// Invariants plus the dimension drops of the chains `Y ↦ L(R⁻¹ Y)` and
/// `Y ↦ R(L⁻¹ Y)` started at the whole space, on `M` and on `M*`.
///
/// The chains are decreasing and compatible with direct sums, so each drop
/// sequence is additive and nonnegative; a string of length `k` shows a drop
/// at depth about `k` in at least one of them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Profile {
    pub invariants: Invariants,
    chains: [Vec<usize>; 4],
}

impl Profile {
    pub fn of<F: Field>(m: &Bimodule<F>) -> Self {
        let dual = m.dual();
        Profile {
            invariants: Invariants::of(m),
            chains: [
                chain_drops(m.left(), m.right()),
                chain_drops(m.right(), m.left()),
                chain_drops(dual.left(), dual.right()),
                chain_drops(dual.right(), dual.left()),
            ],
        }
    }

    /// Profile of a classified indecomposable, memoised.
    pub fn of_label(label: &Label) -> Profile {
        static CACHE: OnceLock<Mutex<HashMap<Label, Profile>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(p) = cache.lock().expect("profile cache").get(label) {
            return p.clone();
        }
        let p = Profile::of(&Bimodule::<BigRational>::construct(label));
        cache.lock().expect("profile cache").insert(label.clone(), p.clone());
        p
    }

    /// The profile of a complement after splitting off `times` copies of a
    /// module with profile `part`.
    fn minus(&self, part: &Profile, times: usize) -> Profile {
        let i = &self.invariants;
        let p = &part.invariants;
        let invariants = Invariants {
            dim: i.dim - times * p.dim,
            rank_left: i.rank_left - times * p.rank_left,
            rank_right: i.rank_right - times * p.rank_right,
            valleys: i.valleys - times * p.valleys,
            rank_left_right: i.rank_left_right - times * p.rank_left_right,
            top: i.top - times * p.top,
            socle: i.socle - times * p.socle,
        };
        let chains = std::array::from_fn(|c| {
            let mut v: Vec<usize> = self.chains[c]
                .iter()
                .enumerate()
                .map(|(d, x)| x - times * part.chains[c].get(d).copied().unwrap_or(0))
                .collect();
            while v.last() == Some(&0) {
                v.pop();
            }
            v
        });
        Profile { invariants, chains }
    }

    pub fn fits_in(&self, other: &Profile) -> bool {
        self.invariants.fits_in(&other.invariants)
            && self.chains.iter().zip(&other.chains).all(|(a, b)| {
                a.iter().enumerate().all(|(i, x)| *x <= b.get(i).copied().unwrap_or(0))
            })
    }
}

/// Drops `dim Y_i − dim Y_{i+1}` for `Y_0 = V`, `Y_{i+1} = a(b⁻¹(Y_i))`, until stable.
fn chain_drops<F: Field>(a: &Mat<F>, b: &Mat<F>) -> Vec<usize> {
    let n = a.rows();
    let mut y = Mat::<F>::identity(n);
    let mut drops = Vec::new();
    loop {
        // v with b v ∈ span(y): kernel of [b | −y]
        let d = y.cols();
        let system = Mat::from_fn(n, n + d, |i, j| if j < n { b.get(i, j).clone() } else { -y.get(i, j - n).clone() });
        let vs: Vec<Vec<F>> = system.kernel_basis().columns().into_iter().map(|k| a.mul_vec(&k[..n])).collect();
        let next = Mat::from_columns(&vs, n).column_space();
        if next.cols() == d {
            break;
        }
        drops.push(d - next.cols());
        y = next;
    }
    drops
}

/// A recognised summand with its split inclusion and projection.
#[derive(Clone)]
pub struct Summand<F> {
    pub label: Label,
    pub module: Arc<Bimodule<F>>,
    pub injection: Morphism<F>,
    pub projection: Morphism<F>,
}

/// The part left over when no candidate splits off any more.
#[derive(Clone)]
pub struct Residual<F> {
    pub module: Arc<Bimodule<F>>,
    pub injection: Morphism<F>,
    pub projection: Morphism<F>,
}

#[derive(Clone)]
pub struct DecompositionResult<F> {
    pub summands: Vec<Summand<F>>,
    pub residual: Option<Residual<F>>,
}

impl<F: Field> std::fmt::Debug for DecompositionResult<F> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let labels: Vec<String> = self.labels().iter().map(|l| l.to_string()).collect();
        write!(f, "Decomposition [{}] residual dim {}", labels.join(" + "), self.residual_dim())
    }
}

impl<F: Field> DecompositionResult<F> {
    /// The summand labels as a sorted multiset.
    pub fn labels(&self) -> Vec<Label> {
        let mut v: Vec<Label> = self.summands.iter().map(|s| s.label.clone()).collect();
        v.sort();
        v
    }

    pub fn residual_dim(&self) -> usize {
        self.residual.as_ref().map_or(0, |r| r.module.dim())
    }

    pub fn is_complete(&self) -> bool {
        self.residual.is_none()
    }
}

/// Result of splitting a summand `C` off `M`.
#[derive(Clone)]
pub struct Peel<F> {
    pub complement: Arc<Bimodule<F>>,
    /// `C → M`
    pub injection: Morphism<F>,
    /// `M → C`, a retraction of `injection`
    pub projection: Morphism<F>,
    pub complement_injection: Morphism<F>,
    pub complement_projection: Morphism<F>,
}

/// Hom bases in both directions together with the trace pairing
/// `form[j][i] = tr(g_j ∘ f_i)`.
///
/// `End(C)` of an indecomposable is local with residue field `k`, so every
/// endomorphism is `c·id + nilpotent` and `tr(φ) = c·dim C`. Hence `g ∘ f` is a
/// unit exactly when its trace is nonzero, and the rank of the pairing is the
/// multiplicity of `C` as a summand.
pub struct TracePairing<F> {
    pub into: Vec<Morphism<F>>,
    pub out_of: Vec<Morphism<F>>,
    pub form: Mat<F>,
}

impl<F: Field> TracePairing<F> {
    pub fn new(c: &Arc<Bimodule<F>>, m: &Arc<Bimodule<F>>) -> Self {
        let into = hom_space(c, m);
        let out_of = if into.is_empty() { Vec::new() } else { hom_space(m, c) };
        // tr(g f) = Σ g[a][b] f[b][a]
        let sparse = |t: &Mat<F>, transpose: bool| -> Vec<(usize, F)> {
            let (r, cols) = (t.rows(), t.cols());
            let mut v = Vec::new();
            for i in 0..r {
                for j in 0..cols {
                    let x = t.get(i, j);
                    if !x.is_zero() {
                        v.push((if transpose { j * r + i } else { i * cols + j }, x.clone()));
                    }
                }
            }
            v.sort_by_key(|e| e.0);
            v
        };
        let fs: Vec<_> = into.iter().map(|f| sparse(f.matrix(), true)).collect();
        let gs: Vec<_> = out_of.iter().map(|g| sparse(g.matrix(), false)).collect();
        let form = Mat::from_fn(gs.len(), fs.len(), |j, i| sparse_dot(&gs[j], &fs[i]));
        TracePairing { into, out_of, form }
    }

    pub fn multiplicity(&self) -> usize {
        self.form.rank()
    }

    /// The first pair `(f_i, g_j)` whose composite is invertible.
    pub fn certificate(&self) -> Option<(Morphism<F>, Morphism<F>)> {
        for j in 0..self.form.rows() {
            for i in 0..self.form.cols() {
                if !self.form.get(j, i).is_zero() {
                    return Some((self.into[i].clone(), self.out_of[j].clone()));
                }
            }
        }
        None
    }
}

fn sparse_dot<F: Field>(a: &[(usize, F)], b: &[(usize, F)]) -> F {
    let (mut i, mut j) = (0, 0);
    let mut acc = F::zero();
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                acc.add_assign_ref(&a[i].1.mul_ref(&b[j].1));
                i += 1;
                j += 1;
            }
        }
    }
    acc
}

/// Maps `f: C → M`, `g: M → C` with `g ∘ f` invertible, if `C` is a summand of `M`.
///
/// `C` must be indecomposable.
pub fn summand_certificate<F: Field>(
    c: &Arc<Bimodule<F>>,
    m: &Arc<Bimodule<F>>,
) -> Option<(Morphism<F>, Morphism<F>)> {
    if c.dim() == 0 || c.dim() > m.dim() {
        return None;
    }
    TracePairing::new(c, m).certificate()
}

/// Whether the indecomposable `C` is isomorphic to a direct summand of `M`.
pub fn summand_test<F: Field>(c: &Arc<Bimodule<F>>, m: &Arc<Bimodule<F>>) -> bool {
    summand_certificate(c, m).is_some()
}

/// The literal criterion: `id_C ∈ span{ g ∘ f }` over all pairs of hom basis elements.
///
/// Quadratic in the hom dimensions; kept as a reference for the trace route.
pub fn summand_test_by_span<F: Field>(c: &Arc<Bimodule<F>>, m: &Arc<Bimodule<F>>) -> bool {
    if c.dim() == 0 {
        return false;
    }
    let fs = hom_space(c, m);
    let gs = hom_space(m, c);
    let products: Vec<Vec<F>> = fs
        .iter()
        .flat_map(|f| gs.iter().map(move |g| (g.matrix() * f.matrix()).entries().to_vec()))
        .collect();
    express_in_span(&products, Mat::<F>::identity(c.dim()).entries()).is_some()
}

/// Split the indecomposable `C` off `M`.
pub fn peel<F: Field>(c: &Arc<Bimodule<F>>, m: &Arc<Bimodule<F>>) -> Result<Peel<F>, DecomposeError> {
    let (f, g) = summand_certificate(c, m).ok_or_else(|| DecomposeError::NotASummand(format!("{}-dim module", c.dim())))?;
    Ok(split_off(m, f.matrix(), g.matrix()).into_peel(c, m))
}

/// Splitting data for `r` copies of `C`: `f` is `dim M × r·dim C`, `g` is its partner.
struct Split<F> {
    f: Mat<F>,
    /// `(g f)⁻¹ g`
    proj: Mat<F>,
    complement: Arc<Bimodule<F>>,
    complement_injection: Mat<F>,
    complement_projection: Mat<F>,
}

impl<F: Field> Split<F> {
    fn into_peel(self, c: &Arc<Bimodule<F>>, m: &Arc<Bimodule<F>>) -> Peel<F> {
        Peel {
            injection: Morphism::new_unchecked(c.clone(), m.clone(), self.f),
            projection: Morphism::new_unchecked(m.clone(), c.clone(), self.proj),
            complement_injection: Morphism::new_unchecked(self.complement.clone(), m.clone(), self.complement_injection),
            complement_projection: Morphism::new_unchecked(m.clone(), self.complement.clone(), self.complement_projection),
            complement: self.complement,
        }
    }
}

fn split_off<F: Field>(m: &Arc<Bimodule<F>>, f: &Mat<F>, g: &Mat<F>) -> Split<F> {
    let u = (g * f).inverse().expect("g∘f invertible");
    let proj = &u * g;
    let e = f * &proj;
    // ker e = ker g, and the free coordinates of its basis are coordinates on it
    let (basis, free) = g.kernel_with_free();
    let complement = Arc::new(m.restrict_by_coords(&basis, &free));
    let complement_projection = (&Mat::identity(m.dim()) - &e).select_rows(&free);
    Split {
        f: f.clone(),
        proj,
        complement,
        complement_injection: basis,
        complement_projection,
    }
}

/// Decompose `M` into indecomposables from the classified families.
///
/// Multiplicities are read off `M` itself: the rank of the trace pairing is the
/// multiplicity of `C` however the rest of `M` decomposes. For each candidate
/// pick `r` maps each way on which the pairing is nondegenerate, and split all
/// of them off at once. The block composite `G ∘ F` is invertible: its
/// diagonal blocks are invertible modulo the radical, and blocks between
/// non-isomorphic indecomposables lie in it. Working on `M` throughout avoids
/// the coefficient growth of successive complements.
pub fn decompose<F: Field>(m: &Arc<Bimodule<F>>) -> DecompositionResult<F> {
    let n = m.dim();
    let mut profile = Profile::of(m.as_ref());
    let mut found: Vec<(Label, Arc<Bimodule<F>>)> = Vec::new();
    let mut f_cols: Vec<Vec<F>> = Vec::new();
    let mut g_blocks: Vec<Mat<F>> = Vec::new();

    // Strings, `ProjInj` and `D` first; the regular part is only worth
    // computing if something is left over after them.
    let mut queue = string_candidates(n, &profile);
    let mut bands_listed = false;
    let mut next = 0;
    while profile.invariants.dim > 0 {
        if next == queue.len() {
            if bands_listed {
                break;
            }
            queue = band_candidates(m.as_ref(), &profile);
            bands_listed = true;
            next = 0;
            continue;
        }
        let label = queue[next].clone();
        next += 1;
        let part = Profile::of_label(&label);
        if !part.fits_in(&profile) {
            continue;
        }
        let c = Arc::new(Bimodule::construct(&label));
        let pairing = TracePairing::new(&c, m);
        if pairing.form.rows() == 0 || pairing.form.cols() == 0 {
            continue;
        }
        let cols = pairing.form.rref().pivots;
        if cols.is_empty() {
            continue;
        }
        let rows = pairing.form.transpose().rref().pivots;
        f_cols.extend(cols.iter().flat_map(|&i| pairing.into[i].matrix().columns()));
        g_blocks.extend(rows.iter().map(|&j| pairing.out_of[j].matrix().clone()));
        found.extend(std::iter::repeat_n((label, c), cols.len()));
        profile = profile.minus(&part, cols.len());
    }
    if found.is_empty() {
        let id = Mat::<F>::identity(n);
        return DecompositionResult {
            summands: Vec::new(),
            residual: (n > 0).then(|| Residual {
                injection: Morphism::new_unchecked(m.clone(), m.clone(), id.clone()),
                projection: Morphism::new_unchecked(m.clone(), m.clone(), id),
                module: m.clone(),
            }),
        };
    }
    let f = Mat::from_columns(&f_cols, n);
    let g = g_blocks.into_iter().reduce(|a, b| a.vstack(&b)).expect("nonempty");
    let split = split_off(m, &f, &g);
    let mut summands = Vec::with_capacity(found.len());
    let mut at = 0;
    for (label, c) in found {
        let block: Vec<usize> = (at..at + c.dim()).collect();
        at += c.dim();
        summands.push(Summand {
            label,
            injection: Morphism::new_unchecked(c.clone(), m.clone(), split.f.select_columns(&block)),
            projection: Morphism::new_unchecked(m.clone(), c.clone(), split.proj.select_rows(&block)),
            module: c,
        });
    }
    let residual = (split.complement.dim() > 0).then(|| Residual {
        injection: Morphism::new_unchecked(split.complement.clone(), m.clone(), split.complement_injection),
        projection: Morphism::new_unchecked(m.clone(), split.complement.clone(), split.complement_projection),
        module: split.complement,
    });
    DecompositionResult { summands, residual }
}

/// Candidate summand labels for `M`, largest first, pruned by invariants.
pub fn candidates<F: Field>(m: &Bimodule<F>) -> Vec<Label> {
    candidates_with(m, &Profile::of(m))
}

fn candidates_with<F: Field>(m: &Bimodule<F>, profile: &Profile) -> Vec<Label> {
    let mut out = string_candidates(m.dim(), profile);
    out.extend(band_candidates(m, profile));
    out.sort_by(|a, b| b.dim().cmp(&a.dim()).then_with(|| a.cmp(b)));
    out.dedup();
    out
}

fn pruned(mut out: Vec<Label>, n: usize, profile: &Profile) -> Vec<Label> {
    out.retain(|l| l.dim() <= n && Profile::of_label(l).fits_in(profile));
    out.sort_by(|a, b| b.dim().cmp(&a.dim()).then_with(|| a.cmp(b)));
    out.dedup();
    out
}

/// Strings, `ProjInj` and `D`.
fn string_candidates(n: usize, profile: &Profile) -> Vec<Label> {
    let inv = profile.invariants;
    let mut out = vec![Label::Regular, Label::ProjInj];
    for k in 0..=inv.valleys - inv.rank_left_right {
        for shape in Shape::ALL {
            out.push(Label::string(shape, k));
        }
    }
    pruned(out, n, profile)
}

/// Bands other than `D`, from the eigenvalues of the regular part.
fn band_candidates<F: Field>(m: &Bimodule<F>, profile: &Profile) -> Vec<Label> {
    let n = m.dim();
    let mut out = Vec::new();
    for (lambda, mult) in band_eigenvalues(m) {
        for len in 1..=mult.min(n / 2) {
            let l = Label::band(len, lambda.clone()).expect("nonzero eigenvalue").canonical();
            if l != Label::Regular {
                out.push(l);
            }
        }
    }
    pruned(out, n, profile)
}

/// The label of `M` if it is isomorphic to a classified indecomposable.
pub fn identify<F: Field>(m: &Arc<Bimodule<F>>) -> Option<Label> {
    if m.dim() == 0 {
        return None;
    }
    let profile = Profile::of(m.as_ref());
    candidates(m.as_ref())
        .into_iter()
        .filter(|l| l.dim() == m.dim() && Profile::of_label(l) == profile)
        .find(|l| is_isomorphic(&Arc::new(Bimodule::construct(l)), m).is_some())
}

/// Outcome of an isomorphism search; `best_rank` is the largest rank seen
/// among the tried homomorphisms and certifies how close the search came.
#[derive(Clone)]
pub struct IsoSearch<F> {
    pub witness: Option<Morphism<F>>,
    pub best_rank: usize,
}

/// An isomorphism `M → N`, if one exists.
pub fn is_isomorphic<F: Field>(m: &Arc<Bimodule<F>>, n: &Arc<Bimodule<F>>) -> Option<Morphism<F>> {
    find_isomorphism(m, n).witness
}

/// Search `Hom(M, N)` for an invertible element.
///
/// Tries basis elements, then random combinations with wide coefficients (a
/// nonzero determinant polynomial of degree `dim M` rarely vanishes there), and
/// when a witness exists and the hom space is small, replaces it by the first
/// invertible combination with coefficients in `±{0..4}`, scanned by growing
/// maximum norm.
pub fn find_isomorphism<F: Field>(m: &Arc<Bimodule<F>>, n: &Arc<Bimodule<F>>) -> IsoSearch<F> {
    let none = |best_rank| IsoSearch {
        witness: None,
        best_rank,
    };
    if m.dim() != n.dim() || Invariants::of(m.as_ref()) != Invariants::of(n.as_ref()) {
        return none(0);
    }
    if m.dim() == 0 {
        return IsoSearch {
            witness: Some(Morphism::new_unchecked(m.clone(), n.clone(), Mat::zeros(0, 0))),
            best_rank: 0,
        };
    }
    let homs = hom_space(m, n);
    let dim = m.dim();
    let mut best = 0;
    for h in &homs {
        let r = h.rank();
        if r == dim {
            return IsoSearch {
                witness: Some(h.clone()),
                best_rank: r,
            };
        }
        best = best.max(r);
    }
    if homs.len() < 2 {
        return none(best);
    }
    let combine = |coeffs: &[i64]| -> Mat<F> {
        let mut t = Mat::zeros(n.dim(), m.dim());
        for (h, &c) in homs.iter().zip(coeffs) {
            if c != 0 {
                t = &t + &h.matrix().scale(&F::from_i64(c));
            }
        }
        t
    };
    let mut rng = ChaCha8Rng::seed_from_u64(ISO_SEED);
    let mut found = None;
    for _ in 0..3 {
        let coeffs: Vec<i64> = (0..homs.len()).map(|_| rng.gen_range(-(1 << 20)..=(1 << 20))).collect();
        let t = combine(&coeffs);
        let r = t.rank();
        best = best.max(r);
        if r == dim {
            found = Some(t);
            break;
        }
    }
    let Some(random) = found else {
        return none(best);
    };
    let small = if homs.len() <= 6 {
        spiral(homs.len(), 4).take(SPIRAL_CAP).map(|c| combine(&c)).find(|t| t.is_invertible())
    } else {
        None
    };
    IsoSearch {
        witness: Some(Morphism::new_unchecked(m.clone(), n.clone(), small.unwrap_or(random))),
        best_rank: dim,
    }
}

/// Coefficient vectors in `{-r..r}^b` by increasing maximum norm `1..=r`, each
/// shell in odometer order over `0, 1, -1, 2, -2, …`.
fn spiral(b: usize, r: i64) -> impl Iterator<Item = Vec<i64>> {
    (1..=r).flat_map(move |shell| {
        let values: Vec<i64> = std::iter::once(0).chain((1..=shell).flat_map(|v| [v, -v])).collect();
        let base = values.len();
        let total = base.pow(b as u32);
        (0..total).filter_map(move |mut idx| {
            let mut c = Vec::with_capacity(b);
            for _ in 0..b {
                c.push(values[idx % base]);
                idx /= base;
            }
            c.iter().any(|x| x.abs() == shell).then_some(c)
        })
    })
}

/// A pseudo-random unimodular integer matrix: a shuffled permutation matrix
/// followed by `3n` elementary row operations with multipliers `±1, ±2`.
/// Its inverse is integral too, so transported structure maps stay integral.
pub fn random_unimodular<F: Field>(n: usize, rng: &mut impl Rng) -> Mat<F> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut p = Mat::from_fn(n, n, |i, j| if perm[i] == j { F::one() } else { F::zero() });
    if n < 2 {
        return p;
    }
    for _ in 0..3 * n {
        let i = rng.gen_range(0..n);
        let j = (i + rng.gen_range(1..n)) % n;
        let c = F::from_i64([-2, -1, 1, 2][rng.gen_range(0..4)]);
        for col in 0..n {
            let x = p.get(j, col).mul_ref(&c);
            if !x.is_zero() {
                let mut y = p.get(i, col).clone();
                y.add_assign_ref(&x);
                p.set(i, col, y);
            }
        }
    }
    p
}

/// `M` transported along a seeded random unimodular change of basis.
pub fn shuffled<F: Field>(m: &Bimodule<F>, seed: u64) -> Bimodule<F> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = random_unimodular(m.dim(), &mut rng);
    m.change_basis(&p).expect("invertible")
}

/// Nonzero rational eigenvalues of the regular part of the pencil `(L, R)`,
/// with algebraic multiplicities. A band `B_k(λ)` contributes `λ` with
/// multiplicity `k`; strings, `ProjInj` and `D` aside from `λ = 1` contribute nothing.
pub fn band_eigenvalues<F: Field>(m: &Bimodule<F>) -> Vec<(BigRational, usize)> {
    let t = regular_part(m);
    if t.rows() == 0 {
        return Vec::new();
    }
    let poly: Vec<BigRational> = char_poly(&t).iter().map(Field::to_rational).collect();
    rational_roots(&poly).into_iter().filter(|(r, _)| !r.is_zero()).collect()
}

/// The map `Lv ↦ Rv` on the largest subspace of `im L` where it can be iterated,
/// modulo its multivalued part.
fn regular_part<F: Field>(m: &Bimodule<F>) -> Mat<F> {
    let n = m.dim();
    let (l, r) = (m.left(), m.right());
    // pairs (Lv, Rv) with Lv ∈ A and Rv ∈ B
    let pairs = |a: &Mat<F>, b: &Mat<F>| -> Vec<Vec<F>> {
        // unknowns (v, α, β): Lv − Aα = 0, Rv − Bβ = 0
        let (da, db) = (a.cols(), b.cols());
        let width = n + da + db;
        let mut rows = Vec::with_capacity(2 * n);
        for i in 0..n {
            let mut row = vec![F::zero(); width];
            row[..n].clone_from_slice(l.row(i));
            for j in 0..da {
                row[n + j] = -a.get(i, j).clone();
            }
            rows.push(row);
            let mut row = vec![F::zero(); width];
            row[..n].clone_from_slice(r.row(i));
            for j in 0..db {
                row[n + da + j] = -b.get(i, j).clone();
            }
            rows.push(row);
        }
        crate::linalg::kernel_of_rows(rows, width)
            .columns()
            .into_iter()
            .map(|k| k[..n].to_vec())
            .collect()
    };

    let mut u = l.column_space();
    loop {
        let vs = pairs(&u, &u);
        let next = Mat::from_columns(&vs.iter().map(|v| l.mul_vec(v)).collect::<Vec<_>>(), n).column_space();
        if next.cols() == u.cols() {
            break;
        }
        u = next;
    }
    if u.cols() == 0 {
        return Mat::zeros(0, 0);
    }
    let zero = Mat::zeros(n, 0);
    let mut z = Mat::from_columns(&pairs(&zero, &u).iter().map(|v| r.mul_vec(v)).collect::<Vec<_>>(), n).column_space();
    loop {
        let grown = Mat::from_columns(&pairs(&z, &u).iter().map(|v| r.mul_vec(v)).collect::<Vec<_>>(), n);
        let next = z.hstack(&grown).column_space();
        if next.cols() == z.cols() {
            break;
        }
        z = next;
    }
    let coords = |w: &[F]| express_in_span(&u.columns(), w).expect("inside U");
    let quo = LinearQuotient::new(z.columns().iter().map(|w| coords(w)).collect(), u.cols());
    let q = quo.dim();
    // particular v with Lv = target and Rv ∈ U
    let system = {
        let mut rows = Vec::with_capacity(2 * n);
        for i in 0..n {
            let mut row = l.row(i).to_vec();
            row.extend(std::iter::repeat_n(F::zero(), u.cols()));
            rows.push(row);
        }
        for i in 0..n {
            let mut row = r.row(i).to_vec();
            row.extend((0..u.cols()).map(|j| -u.get(i, j).clone()));
            rows.push(row);
        }
        Mat::from_rows(rows, n + u.cols())
    };
    let mut t = Mat::zeros(q, q);
    for (s, &k) in quo.kept.iter().enumerate() {
        let target = u.column(k);
        let mut rhs = target;
        rhs.extend(std::iter::repeat_n(F::zero(), n));
        let sol = system.solve(&rhs).expect("sizes match").expect("U is Γ-stable");
        let image = quo.projection.mul_vec(&coords(&r.mul_vec(&sol[..n])));
        for (i, x) in image.into_iter().enumerate() {
            t.set(i, s, x);
        }
    }
    t
}

/// Coefficients of `det(tI − T)`, constant term first (Faddeev–LeVerrier).
pub fn char_poly<F: Field>(t: &Mat<F>) -> Vec<F> {
    let n = t.rows();
    let mut coeffs = vec![F::zero(); n + 1];
    coeffs[n] = F::one();
    let mut mk = Mat::zeros(n, n);
    let id = Mat::identity(n);
    for k in 1..=n {
        mk = &(t * &mk) + &id.scale(&coeffs[n - k + 1]);
        let tm = t * &mk;
        let mut tr = F::zero();
        for i in 0..n {
            tr.add_assign_ref(tm.get(i, i));
        }
        coeffs[n - k] = -(tr * F::from_i64(k as i64).inv());
    }
    coeffs
}

/// Trial division bound when factoring coefficients for the rational root test.
const TRIAL_DIVISION_LIMIT: u64 = 1_000_000;

/// Rational roots with multiplicities of a polynomial given constant term first.
pub fn rational_roots(poly: &[BigRational]) -> Vec<(BigRational, usize)> {
    let mut p: Vec<BigRational> = poly.to_vec();
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    if p.len() <= 1 {
        return Vec::new();
    }
    let mut roots = Vec::new();
    let zeros = p.iter().take_while(|c| c.is_zero()).count();
    if zeros > 0 {
        roots.push((BigRational::zero(), zeros));
        p.drain(..zeros);
    }
    if p.len() <= 1 {
        return roots;
    }
    let denom_lcm = p.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = p.iter().map(|c| (c * BigRational::from_integer(denom_lcm.clone())).to_integer()).collect();
    let numerators = divisors(&ints[0].abs());
    let denominators = divisors(&ints[ints.len() - 1].abs());
    let mut cands: Vec<BigRational> = Vec::new();
    for a in &numerators {
        for b in &denominators {
            let q = BigRational::new(a.clone(), b.clone());
            cands.push(q.clone());
            cands.push(-q);
        }
    }
    cands.sort();
    cands.dedup();
    for r in cands {
        let mut mult = 0;
        let mut cur = p.clone();
        loop {
            let (quot, rem) = synthetic_division(&cur, &r);
            if !rem.is_zero() {
                break;
            }
            mult += 1;
            cur = quot;
        }
        if mult > 0 {
            roots.push((r, mult));
        }
    }
    roots
}

fn synthetic_division(p: &[BigRational], r: &BigRational) -> (Vec<BigRational>, BigRational) {
    let n = p.len();
    if n <= 1 {
        return (Vec::new(), p.first().cloned().unwrap_or_else(BigRational::zero));
    }
    let mut quot = vec![BigRational::zero(); n - 1];
    let mut acc = p[n - 1].clone();
    for i in (0..n - 1).rev() {
        quot[i] = acc.clone();
        acc = &p[i] + &acc * r;
    }
    (quot, acc)
}

/// Positive divisors of `n > 0`; a cofactor left after trial division is treated as prime.
fn divisors(n: &BigInt) -> Vec<BigInt> {
    let mut factors: Vec<(BigInt, u32)> = Vec::new();
    let mut rest = n.clone();
    let mut d = 2u64;
    while d <= TRIAL_DIVISION_LIMIT {
        let bd = BigInt::from(d);
        if &bd * &bd > rest {
            break;
        }
        let mut e = 0;
        while (&rest % &bd).is_zero() {
            rest /= &bd;
            e += 1;
        }
        if e > 0 {
            factors.push((bd, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if rest > BigInt::one() {
        factors.push((rest, 1));
    }
    let mut divs = vec![BigInt::one()];
    for (p, e) in factors {
        let mut next = Vec::with_capacity(divs.len() * (e as usize + 1));
        for dv in &divs {
            let mut pw = BigInt::one();
            for _ in 0..=e {
                next.push(dv * &pw);
                pw *= &p;
            }
        }
        divs = next;
    }
    divs
}

/// Sum over all summands of `injection ∘ projection`; invertible for a complete decomposition.
pub fn reassembly<F: Field>(m: &Arc<Bimodule<F>>, result: &DecompositionResult<F>) -> Mat<F> {
    let mut total = Mat::zeros(m.dim(), m.dim());
    for s in &result.summands {
        total = &total + compose(&s.injection, &s.projection).matrix();
    }
    if let Some(r) = &result.residual {
        total = &total + compose(&r.injection, &r.projection).matrix();
    }
    total
}

/// Small integer sanity helper used in reports: a rational that fits an `i64`.
pub fn small_integer(q: &BigRational) -> Option<i64> {
    q.is_integer().then(|| q.to_integer().to_i64()).flatten()
}
