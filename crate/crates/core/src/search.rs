//! Exhaustive and random searches over families of curves y^2 = f(x).
//!
//! A family is `f = factor * h` where `factor` is a fixed polynomial
//! (default 1) and the cofactor `h` has some coefficients pinned and the
//! rest free. Each candidate goes through:
//!
//! 1. squarefree test (always run, so the squarefree count is total),
//! 2. skipped if singular and `require_smooth` is set,
//! 3. optional rank-one prefilter (only when the target is a = g - 1),
//! 4. Cartier-Manin matrix and rank, then a-number / p-rank filters.
//!
//! Work is cut into shards that do not depend on the thread count, and shard
//! results are merged in shard order, so reports are identical for any
//! number of threads.
//!
//! Exhaustive order: free coefficients form a mixed-radix counter, lowest
//! free index varying fastest; shard `s` fixes the highest free index to the
//! element with index `s`. Random order: shard `s` covers samples
//! `[s * RANDOM_SHARD_SIZE, (s + 1) * RANDOM_SHARD_SIZE)` and draws from
//! ChaCha8 seeded with the search seed on stream `s`; each sample draws one
//! uniform element per free coefficient in ascending index order.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::curve::{cartier_rank, fill_cartier, p_rank_of, Invariants};
use crate::field::{Elem, Field, FieldError};
use crate::linalg::Matrix;
use crate::poly::{
    half_exponent, mul_into, pow_into, pow_trunc_into, squarefree_raw, Poly, PolyError, PolyScratch,
};

/// Default cap on the number of candidates an exhaustive run may visit.
pub const DEFAULT_BUDGET: u64 = 1 << 32;

/// Samples per random-mode shard.
pub const RANDOM_SHARD_SIZE: u64 = 1 << 16;

pub const DEFAULT_COLLECT_LIMIT: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error("invalid search spec: {0}")]
    InvalidSpec(String),
    #[error("exhaustive space of {size} candidates exceeds the budget of {budget}")]
    BudgetExceeded { size: String, budget: u64 },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exhaustive,
    Random { samples: u64, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchSpec {
    pub field: Field,
    /// Degree of the assembled f; odd, 2g + 1.
    pub degree: usize,
    /// Fixed factor of f; `None` means 1.
    pub factor: Option<Poly>,
    /// Pinned cofactor coefficients, by power of x.
    pub fixed: BTreeMap<usize, Elem>,
    /// Varying cofactor coefficients, by power of x.
    pub free: Vec<usize>,
    pub mode: Mode,
    pub target_a: Option<usize>,
    pub target_p_rank: Option<usize>,
    pub require_smooth: bool,
    pub collect_limit: usize,
    pub prefilter: bool,
    pub budget: u64,
}

impl SearchSpec {
    /// Monic f of degree 2g + 1 with zero constant term, every other
    /// coefficient free; exhaustive, smooth curves only, no targets.
    pub fn normalized(field: &Field, genus: usize) -> SearchSpec {
        let degree = 2 * genus + 1;
        SearchSpec {
            field: field.clone(),
            degree,
            factor: None,
            fixed: BTreeMap::from([(0, Elem::ZERO), (degree, Elem::ONE)]),
            free: (1..degree).collect(),
            mode: Mode::Exhaustive,
            target_a: None,
            target_p_rank: None,
            require_smooth: true,
            collect_limit: DEFAULT_COLLECT_LIMIT,
            prefilter: false,
            budget: DEFAULT_BUDGET,
        }
    }

    pub fn genus(&self) -> usize {
        (self.degree - 1) / 2
    }

    pub fn with_target_a(mut self, a: usize) -> Self {
        self.target_a = Some(a);
        self
    }

    pub fn with_target_p_rank(mut self, f: usize) -> Self {
        self.target_p_rank = Some(f);
        self
    }

    pub fn with_random(mut self, samples: u64, seed: u64) -> Self {
        self.mode = Mode::Random { samples, seed };
        self
    }

    pub fn cofactor_degree(&self) -> usize {
        self.degree - self.factor.as_ref().and_then(Poly::degree).unwrap_or(0)
    }

    /// Number of candidates an exhaustive run visits, if it fits in u64.
    pub fn exhaustive_size(&self) -> Option<u64> {
        (self.field.order() as u64).checked_pow(self.free.len() as u32)
    }

    pub fn validate(&self) -> Result<(), SearchError> {
        let bad = |m: String| Err(SearchError::InvalidSpec(m));
        if self.degree < 3 || self.degree.is_multiple_of(2) {
            return bad(format!(
                "degree must be odd and at least 3, got {}",
                self.degree
            ));
        }
        if let Some(factor) = &self.factor {
            if factor.field() != &self.field {
                return Err(FieldError::Mismatch.into());
            }
            match factor.degree() {
                None => return bad("fixed factor is zero".into()),
                Some(d) if d >= self.degree => return bad("fixed factor leaves no cofactor".into()),
                _ => {}
            }
        }
        let top = self.cofactor_degree();
        let mut seen = vec![false; top + 1];
        for &i in self.fixed.keys().chain(self.free.iter()) {
            if i > top {
                return bad(format!(
                    "coefficient index {i} exceeds cofactor degree {top}"
                ));
            }
            if seen[i] {
                return bad(format!("coefficient index {i} is assigned twice"));
            }
            seen[i] = true;
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return bad(format!("coefficient index {i} is neither fixed nor free"));
        }
        if self.free.windows(2).any(|w| w[0] >= w[1]) {
            return bad("free indices must be strictly ascending".into());
        }
        if let Some(&v) = self.fixed.values().find(|v| !self.field.contains(**v)) {
            return bad(format!("fixed value index {} outside the field", v.index()));
        }
        match self.fixed.get(&top) {
            Some(v) if !v.is_zero() => {}
            _ => {
                return bad(format!(
                    "leading coefficient c{top} must be fixed and nonzero"
                ))
            }
        }
        let g = self.genus();
        if self.target_a.is_some_and(|a| a > g) || self.target_p_rank.is_some_and(|f| f > g) {
            return bad(format!("targets must not exceed the genus {g}"));
        }
        if self.mode == Mode::Exhaustive {
            match self.exhaustive_size() {
                Some(n) if n <= self.budget => {}
                Some(n) => {
                    return Err(SearchError::BudgetExceeded {
                        size: n.to_string(),
                        budget: self.budget,
                    })
                }
                None => {
                    return Err(SearchError::BudgetExceeded {
                        size: format!("{}^{}", self.field.order(), self.free.len()),
                        budget: self.budget,
                    })
                }
            }
        }
        Ok(())
    }

    pub fn shard_count(&self) -> u64 {
        match self.mode {
            Mode::Exhaustive if self.free.is_empty() => 1,
            Mode::Exhaustive => self.field.order() as u64,
            Mode::Random { samples, .. } => samples.div_ceil(RANDOM_SHARD_SIZE),
        }
    }

    fn prefilter_active(&self) -> bool {
        self.prefilter && self.genus() >= 2 && self.target_a == Some(self.genus() - 1)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Counts {
    /// Candidates visited.
    pub enumerated: u64,
    /// Candidates with squarefree f.
    pub squarefree: u64,
    /// Considered candidates whose Cartier-Manin matrix has rank exactly one.
    pub rank_matched: u64,
    /// Considered candidates meeting the a-number target (all, without one).
    pub a_matched: u64,
    /// a-matched candidates also meeting the p-rank target: the final matches.
    pub p_rank_matched: u64,
    /// p-rank histogram of the a-matched candidates, indexed by p-rank.
    pub by_p_rank: Vec<u64>,
}

impl Counts {
    fn new(genus: usize) -> Counts {
        Counts {
            by_p_rank: vec![0; genus + 1],
            ..Counts::default()
        }
    }

    fn absorb(&mut self, other: &Counts) {
        self.enumerated += other.enumerated;
        self.squarefree += other.squarefree;
        self.rank_matched += other.rank_matched;
        self.a_matched += other.a_matched;
        self.p_rank_matched += other.p_rank_matched;
        for (a, b) in self.by_p_rank.iter_mut().zip(&other.by_p_rank) {
            *a += b;
        }
    }

    /// The final match count.
    pub fn matched(&self) -> u64 {
        self.p_rank_matched
    }
}

/// A curve from a search: expanded coefficients of f and its invariants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub coeffs: Vec<Elem>,
    pub invariants: Invariants,
}

impl Witness {
    pub fn poly(&self, field: &Field) -> Poly {
        Poly::from_indices(field, self.coeffs.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchReport {
    pub spec: SearchSpec,
    pub counts: Counts,
    pub witnesses: Vec<Witness>,
    pub seed: Option<u64>,
    pub shard_count: u64,
    /// Wall-clock time; the only field that varies between identical runs.
    pub elapsed_ms: Option<u64>,
}

impl SearchReport {
    pub fn matched(&self) -> u64 {
        self.counts.matched()
    }

    pub fn field(&self) -> &Field {
        &self.spec.field
    }

    /// Copy with the timing removed, for byte-level comparisons.
    pub fn without_timing(&self) -> SearchReport {
        SearchReport {
            elapsed_ms: None,
            ..self.clone()
        }
    }
}

/// Runs on the global rayon pool.
pub fn run_search(spec: &SearchSpec) -> Result<SearchReport, SearchError> {
    run_search_with_threads(spec, None)
}

/// Runs on a dedicated pool of `threads` workers (global pool if `None`).
pub fn run_search_with_threads(
    spec: &SearchSpec,
    threads: Option<usize>,
) -> Result<SearchReport, SearchError> {
    spec.validate()?;
    let mut spec = spec.clone();
    spec.free.sort_unstable();
    let start = Instant::now();
    let shards = spec.shard_count();
    let work = || -> Vec<ShardResult> {
        (0..shards)
            .into_par_iter()
            .map(|s| run_shard(&spec, s))
            .collect()
    };
    let results = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| SearchError::InvalidSpec(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    };

    let mut counts = Counts::new(spec.genus());
    let mut witnesses = Vec::new();
    for r in results {
        counts.absorb(&r.counts);
        let room = spec.collect_limit.saturating_sub(witnesses.len());
        witnesses.extend(r.witnesses.into_iter().take(room));
    }
    let seed = match spec.mode {
        Mode::Random { seed, .. } => Some(seed),
        Mode::Exhaustive => None,
    };
    Ok(SearchReport {
        spec,
        counts,
        witnesses,
        seed,
        shard_count: shards,
        elapsed_ms: Some(start.elapsed().as_millis() as u64),
    })
}

struct ShardResult {
    counts: Counts,
    witnesses: Vec<Witness>,
}

fn run_shard(spec: &SearchSpec, shard: u64) -> ShardResult {
    let mut ev = Evaluator::new(spec);
    let q = spec.field.order();
    let n = spec.free.len();
    match spec.mode {
        Mode::Exhaustive => {
            if n == 0 {
                ev.evaluate();
            } else {
                let top = spec.free[n - 1];
                ev.cofactor[top] = Elem(shard as u32);
                let lower = &spec.free[..n - 1];
                for &i in lower {
                    ev.cofactor[i] = Elem::ZERO;
                }
                loop {
                    ev.evaluate();
                    // odometer over the lower free coefficients
                    let mut carry = true;
                    for &i in lower {
                        let next = ev.cofactor[i].0 + 1;
                        if next < q {
                            ev.cofactor[i] = Elem(next);
                            carry = false;
                            break;
                        }
                        ev.cofactor[i] = Elem::ZERO;
                    }
                    if carry {
                        break;
                    }
                }
            }
        }
        Mode::Random { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(shard);
            let begin = shard * RANDOM_SHARD_SIZE;
            let end = samples.min(begin + RANDOM_SHARD_SIZE);
            for _ in begin..end {
                for &i in &spec.free {
                    ev.cofactor[i] = spec.field.random(&mut rng);
                }
                ev.evaluate();
            }
        }
    }
    ShardResult {
        counts: ev.counts,
        witnesses: ev.witnesses,
    }
}

/// Per-shard state: the current cofactor and reusable buffers.
struct Evaluator<'a> {
    spec: &'a SearchSpec,
    field: &'a Field,
    genus: usize,
    half: u64,
    prefilter: bool,
    cofactor: Vec<Elem>,
    f: Vec<Elem>,
    kappa: Vec<Elem>,
    tmp: Vec<Elem>,
    low: Vec<Elem>,
    high: Vec<Elem>,
    reversed: Vec<Elem>,
    matrix: Vec<Elem>,
    scratch: PolyScratch,
    counts: Counts,
    witnesses: Vec<Witness>,
}

impl<'a> Evaluator<'a> {
    fn new(spec: &'a SearchSpec) -> Self {
        let mut cofactor = vec![Elem::ZERO; spec.cofactor_degree() + 1];
        for (&i, &v) in &spec.fixed {
            cofactor[i] = v;
        }
        Evaluator {
            spec,
            field: &spec.field,
            genus: spec.genus(),
            half: half_exponent(&spec.field),
            prefilter: spec.prefilter_active(),
            cofactor,
            f: Vec::new(),
            kappa: Vec::new(),
            tmp: Vec::new(),
            low: Vec::new(),
            high: Vec::new(),
            reversed: Vec::new(),
            matrix: Vec::new(),
            scratch: PolyScratch::default(),
            counts: Counts::new(spec.genus()),
            witnesses: Vec::new(),
        }
    }

    fn evaluate(&mut self) {
        let field = self.field;
        match &self.spec.factor {
            Some(factor) => mul_into(field, factor.coeffs(), &self.cofactor, &mut self.f),
            None => {
                self.f.clear();
                self.f.extend_from_slice(&self.cofactor);
            }
        }
        self.counts.enumerated += 1;
        let smooth = squarefree_raw(field, &self.f, &mut self.scratch);
        if smooth {
            self.counts.squarefree += 1;
        } else if self.spec.require_smooth {
            return;
        }
        if self.prefilter && self.rows_force_rank_two() {
            return;
        }
        pow_into(field, &self.f, self.half, &mut self.kappa, &mut self.tmp);
        let rank = cartier_rank(field, &self.kappa, self.genus, &mut self.matrix);
        if rank == 1 {
            self.counts.rank_matched += 1;
        }
        let a_number = self.genus - rank;
        if self.spec.target_a.is_some_and(|t| t != a_number) {
            return;
        }
        self.counts.a_matched += 1;
        fill_cartier(
            field.characteristic() as usize,
            &self.kappa,
            self.genus,
            &mut self.matrix,
        );
        let rows = self
            .matrix
            .chunks(self.genus)
            .map(<[Elem]>::to_vec)
            .collect();
        let p_rank = p_rank_of(field, &Matrix::from_rows(rows));
        self.counts.by_p_rank[p_rank] += 1;
        if self.spec.target_p_rank.is_some_and(|t| t != p_rank) {
            return;
        }
        self.counts.p_rank_matched += 1;
        if self.witnesses.len() < self.spec.collect_limit {
            self.witnesses.push(Witness {
                coeffs: self.f.clone(),
                invariants: Invariants {
                    genus: self.genus,
                    smooth,
                    rank_a: rank,
                    a_number,
                    p_rank,
                },
            });
        }
    }

    /// True when rows 1 and g of the Cartier-Manin matrix are linearly
    /// independent, which rules out rank one. Only the lowest p and highest
    /// (p+1)/2 coefficients of f^((p-1)/2) are computed.
    fn rows_force_rank_two(&mut self) -> bool {
        let field = self.field;
        let p = field.characteristic() as usize;
        let g = self.genus;
        let m = self.half as usize;

        // row 1: kappa_{p - j}, j = 1..g
        pow_trunc_into(field, &self.f, self.half, p, &mut self.low, &mut self.tmp);
        // row g: kappa_{pg - j} = coefficient (m - g + j) of rev(f)^m
        self.reversed.clear();
        self.reversed.extend(self.f.iter().rev());
        pow_trunc_into(
            field,
            &self.reversed,
            self.half,
            m + 1,
            &mut self.high,
            &mut self.tmp,
        );

        let row1 = |j: usize| -> Elem {
            p.checked_sub(j)
                .and_then(|i| self.low.get(i).copied())
                .unwrap_or(Elem::ZERO)
        };
        let row_g = |j: usize| -> Elem {
            (m + j)
                .checked_sub(g)
                .and_then(|i| self.high.get(i).copied())
                .unwrap_or(Elem::ZERO)
        };
        let Some(pivot) = (1..=g).find(|&j| !row1(j).is_zero()) else {
            return false;
        };
        let (a, b) = (row1(pivot), row_g(pivot));
        (1..=g).any(|l| field.mul(a, row_g(l)) != field.mul(b, row1(l)))
    }
}
