//! From an expansion certificate to a certified linear automaton.
//!
//! Pipeline: [`plan`] picks `k` and `S = S0^k`, the cycle system for
//! `n = #S` is built and augmented with the expansion constant `c`, random
//! local maps are drawn ([`choose_maps`]) and [`verify_inj`] checks the
//! kernel condition on every maximal qualifying family, moving up a ladder
//! of primes when a draw fails.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Instant;

use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::ca::LinearCA;
use crate::error::{Error, Result};
use crate::exact::{int, ln_bounds, LN_TERMS};
use crate::ff::{intersect_kernels, is_prime, FFMatrix, PrimeField};
use crate::group::{next_combination, ElementSet, GroupCtx};
use crate::lemma1::{augment, build, CycleSystem};
use crate::rng::Stream;

pub const DEFAULT_RETRIES: u32 = 8;
pub const DEFAULT_MAX_PRIME: u64 = 97;
/// Largest `k` tried by [`plan`].
pub const MAX_K: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Certified,
    /// Checks this many seeded random maximal families.
    Sampled(u64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SynthesisSpec {
    pub ctx: GroupCtx,
    pub s0: ElementSet,
    pub epsilon: BigRational,
    pub c: BigRational,
    pub p_ladder: Vec<u64>,
    pub max_prime: u64,
    pub seed: u64,
    pub mode: Mode,
    pub retries: u32,
}

impl SynthesisSpec {
    /// `tree5`: `W5`, `S0` = the five generators, `ε = 2`, `c = 3`, ladder `2..13`.
    pub fn preset(name: &str, seed: u64, mode: Mode) -> Result<Self> {
        match name {
            "tree5" => {
                let ctx = GroupCtx::w5();
                let s0 = ctx.generators();
                Ok(Self {
                    ctx,
                    s0,
                    epsilon: int(2),
                    c: int(3),
                    p_ladder: vec![2, 3, 5, 7, 11, 13],
                    max_prime: DEFAULT_MAX_PRIME,
                    seed,
                    mode,
                    retries: DEFAULT_RETRIES,
                })
            }
            "muller" => Err(Error::Unsupported(
                "the Muller automaton is a fixed preset of the automaton engine, not a synthesis target".into(),
            )),
            other => Err(Error::Unsupported(format!("unknown synthesis preset {other:?}"))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.s0.is_empty() {
            return Err(Error::EmptySet("S0"));
        }
        if self.epsilon <= int(0) {
            return Err(Error::OutOfRange("epsilon must be positive".into()));
        }
        if self.c <= int(1) {
            return Err(Error::OutOfRange("c must exceed 1".into()));
        }
        if self.p_ladder.is_empty() {
            return Err(Error::EmptySet("prime ladder"));
        }
        if !self.p_ladder.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::OutOfRange("prime ladder must be strictly ascending".into()));
        }
        for &p in &self.p_ladder {
            if !is_prime(p) {
                return Err(Error::NotPrime(p));
            }
            if p > self.max_prime {
                return Err(Error::OutOfRange(format!("prime {p} exceeds the ladder cap {}", self.max_prime)));
            }
        }
        if self.retries == 0 {
            return Err(Error::OutOfRange("at least one seed per prime".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Plan {
    pub k: usize,
    pub s: ElementSet,
    pub n: usize,
    /// Threshold carried by the certificates: the expansion constant `c`.
    pub theta: BigRational,
}

/// Least `k` with `(1 + ε)^k > 1 + k ln #S0`, decided with rational bounds on
/// the logarithm; a `k` is accepted only when the upper bound already clears it.
pub fn minimal_k(epsilon: &BigRational, s0_len: usize) -> Result<usize> {
    let base = BigRational::one() + epsilon;
    let x = int(s0_len as i64);
    let mut power = BigRational::one();
    for k in 1..=MAX_K {
        power *= &base;
        let kk = int(k as i64);
        let mut terms = LN_TERMS;
        loop {
            let (lo, hi) = ln_bounds(&x, terms)?;
            if power > BigRational::one() + &kk * &hi {
                return Ok(k);
            }
            if power <= BigRational::one() + &kk * &lo || terms >= 16 * LN_TERMS {
                break;
            }
            terms *= 4;
        }
    }
    Err(Error::OutOfRange(format!("no k <= {MAX_K} satisfies the expansion inequality")))
}

pub fn plan(spec: &SynthesisSpec) -> Result<Plan> {
    spec.validate()?;
    let k = minimal_k(&spec.epsilon, spec.s0.len())?;
    let s = spec.ctx.power_set_product(&spec.s0, k)?;
    let n = s.len();
    Ok(Plan { k, s, n, theta: spec.c.clone() })
}

/// Local maps with rows outside `X_s` zero and the other entries drawn from
/// the stream `("synth/choose_maps", seed, [p])`, row-major, map by map.
pub fn choose_maps(sys: &CycleSystem, field: PrimeField, seed: u64) -> Vec<FFMatrix> {
    let m = sys.size_y();
    let mut stream = Stream::new("synth/choose_maps", seed, &[field.p()]);
    (0..sys.n())
        .map(|i| {
            let mut a = FFMatrix::zeros(field, m, m);
            for r in sys.x(i).ones() {
                for x in a.row_mut(r) {
                    *x = stream.below(field.p());
                }
            }
            a
        })
        .collect()
}

/// `Σ_s k n!/t_s >= #Y`.
pub fn qualifies(sys: &CycleSystem, sizes: &[usize]) -> bool {
    let total: u64 = sizes.iter().map(|&t| sys.x_size_for(t)).sum();
    total >= sys.size_y() as u64
}

fn for_each_size_vector(n: usize, mut visit: impl FnMut(&[usize])) {
    let mut t = vec![1usize; n];
    loop {
        visit(&t);
        let mut i = n;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if t[i] < n {
                t[i] += 1;
                for x in &mut t[i + 1..] {
                    *x = 1;
                }
                break;
            }
        }
    }
}

/// Qualifying size vectors none of whose one-step enlargements qualify, in
/// lexicographic order. Qualification is antitone in each `t_s`, so these are
/// exactly the maximal qualifying vectors for the product order.
pub fn maximal_size_vectors(sys: &CycleSystem) -> Vec<Vec<usize>> {
    let n = sys.n();
    let mut out = Vec::new();
    for_each_size_vector(n, |t| {
        if !qualifies(sys, t) {
            return;
        }
        let mut up = t.to_vec();
        for i in 0..n {
            if up[i] < n {
                up[i] += 1;
                let q = qualifies(sys, &up);
                up[i] -= 1;
                if q {
                    return;
                }
            }
        }
        out.push(t.to_vec());
    });
    out
}

/// Checks that greedy enlargement from every qualifying vector ends in the
/// given maximal set.
pub fn maximal_set_is_closed(sys: &CycleSystem, maximal: &[Vec<usize>]) -> bool {
    let n = sys.n();
    let mut ok = true;
    for_each_size_vector(n, |t| {
        if !ok || !qualifies(sys, t) {
            return;
        }
        let mut v = t.to_vec();
        'climb: loop {
            for i in 0..n {
                if v[i] < n {
                    v[i] += 1;
                    if qualifies(sys, &v) {
                        continue 'climb;
                    }
                    v[i] -= 1;
                }
            }
            break;
        }
        ok = maximal.binary_search(&v).is_ok();
    });
    ok
}

/// All `T ∋ s` with `#T = t`, as bitmasks over memory indices, in
/// lexicographic order of the other members.
pub fn subset_choices(n: usize, s: usize, t: usize) -> Vec<u32> {
    let others: Vec<usize> = (0..n).filter(|&j| j != s).collect();
    let k = t - 1;
    let mut idx: Vec<usize> = (0..k).collect();
    let mut out = Vec::new();
    loop {
        out.push(idx.iter().fold(1u32 << s, |m, &i| m | 1 << others[i]));
        if k == 0 || !next_combination(&mut idx, others.len()) {
            return out;
        }
    }
}

fn mask_members(mask: u32) -> impl Iterator<Item = usize> {
    (0..32).filter(move |j| mask >> j & 1 == 1)
}

/// A choice of `T_s` for every memory element, as bitmasks.
pub type Family = Vec<u32>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyDescriptor {
    pub sizes: Vec<usize>,
    pub families: u64,
    /// SHA-256 over the per-coordinate subset lists (little-endian `u32` masks).
    pub choices_digest: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InjCertificate {
    pub n: usize,
    pub k: u64,
    #[serde(rename = "sizeY")]
    pub size_y: usize,
    pub p: u64,
    pub seed: u64,
    pub mode: Mode,
    pub families_checked: u64,
    pub maximal_family_descriptors: Vec<FamilyDescriptor>,
    pub all_kernel_dims_zero: bool,
    pub domination_closed: bool,
    pub probabilistic: bool,
    pub wall_time_ms: u64,
}

impl InjCertificate {
    pub fn is_valid(&self) -> bool {
        self.all_kernel_dims_zero && self.domination_closed
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailingFamily {
    pub sizes: Vec<usize>,
    /// `T_s` as zero-based memory indices, for each `s`.
    pub subsets: Vec<Vec<usize>>,
    pub kernel_dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InjOutcome {
    Certified(InjCertificate),
    Failed(FailingFamily),
}

/// `α_s` restricted to the rows of `X_{s,T}`.
fn restricted_block(sys: &CycleSystem, maps: &[FFMatrix], s: usize, mask: u32) -> FFMatrix {
    let rows: Vec<usize> = sys.x_set(s, mask_members(mask)).ones().collect();
    maps[s].select_rows(&rows)
}

/// Dimension of `⋂_s ker α_{s,T_s}`.
pub fn family_kernel_dim(sys: &CycleSystem, maps: &[FFMatrix], family: &[u32]) -> Result<usize> {
    let blocks: Vec<FFMatrix> =
        family.iter().enumerate().map(|(s, &mask)| restricted_block(sys, maps, s, mask)).collect();
    Ok(intersect_kernels(&blocks)?.len())
}

fn check_maps(sys: &CycleSystem, maps: &[FFMatrix]) -> Result<()> {
    let m = sys.size_y();
    if maps.len() != sys.n() || maps.iter().any(|a| a.rows() != m || a.cols() != m) {
        return Err(Error::Mismatch(format!("expected {} maps of size {m}x{m}", sys.n())));
    }
    if sys.n() > 31 {
        return Err(Error::OutOfRange("memory sets above 31 elements".into()));
    }
    Ok(())
}

struct Search<'a> {
    sys: &'a CycleSystem,
    // Positions of X_{s,T} inside the ascending list of X_s.
    positions: HashMap<(usize, u32), Vec<usize>>,
    checked: u64,
}

impl Search<'_> {
    fn positions(&mut self, s: usize, mask: u32) -> &[usize] {
        let sys = self.sys;
        self.positions.entry((s, mask)).or_insert_with(|| {
            let full: Vec<usize> = sys.x(s).ones().collect();
            let sub = sys.x_set(s, mask_members(mask));
            full.iter().enumerate().filter(|(_, &y)| sub.contains(y)).map(|(i, _)| i).collect()
        })
    }

    /// Depth-first over subset choices, coordinates in `order`. `proj[i]` holds
    /// the rows of `α_{order[i]}` on `X_{order[i]}`, written in coordinates of
    /// the current kernel basis (of dimension `dim`). A child whose kernel is
    /// already trivial accounts for its whole subtree; at the last coordinate
    /// only the rank is needed.
    fn dfs(
        &mut self,
        order: &[usize],
        choices: &[Vec<u32>],
        proj: &[FFMatrix],
        dim: usize,
        family: &mut Family,
    ) -> Option<(Family, usize)> {
        let (&s, rest) = order.split_first()?;
        let (p_s, p_rest) = proj.split_first()?;
        for &mask in &choices[s] {
            family[s] = mask;
            let block = p_s.select_rows(self.positions(s, mask));
            if rest.is_empty() {
                self.checked += 1;
                let rank = block.rank();
                if rank < dim {
                    return Some((family.clone(), dim - rank));
                }
                continue;
            }
            let kernel = block.kernel_basis();
            if kernel.is_empty() {
                self.checked += rest.iter().map(|&t| choices[t].len() as u64).product::<u64>();
                continue;
            }
            let y = FFMatrix::from_vectors(block.field(), dim, &kernel);
            let next: Vec<FFMatrix> = p_rest.iter().map(|p| p.mul_transposed(&y)).collect();
            if let Some(fail) = self.dfs(rest, choices, &next, kernel.len(), family) {
                return Some(fail);
            }
        }
        None
    }
}

fn descriptor(sizes: &[usize], choices: &[Vec<u32>]) -> FamilyDescriptor {
    let mut h = Sha256::new();
    for list in choices {
        h.update((list.len() as u32).to_le_bytes());
        for m in list {
            h.update(m.to_le_bytes());
        }
    }
    FamilyDescriptor {
        sizes: sizes.to_vec(),
        families: choices.iter().map(|c| c.len() as u64).product(),
        choices_digest: hex::encode(h.finalize()),
    }
}

fn failing(family: &[u32], kernel_dim: usize) -> FailingFamily {
    FailingFamily {
        sizes: family.iter().map(|m| m.count_ones() as usize).collect(),
        subsets: family.iter().map(|&m| mask_members(m).collect()).collect(),
        kernel_dim,
    }
}

/// Checks `⋂_s ker α_{s,T_s} = 0`. Certified mode covers every maximal
/// qualifying family, hence every qualifying family; sampled mode checks
/// `count` seeded random maximal families. `extra` families are always
/// checked too. The first failing family in checking order is returned.
pub fn verify_inj(sys: &CycleSystem, maps: &[FFMatrix], mode: Mode, seed: u64, extra: &[Family]) -> Result<InjOutcome> {
    check_maps(sys, maps)?;
    let started = Instant::now();
    let n = sys.n();
    let field = maps[0].field();
    let maximal = maximal_size_vectors(sys);
    let domination_closed = maximal_set_is_closed(sys, &maximal);
    let mut search = Search { sys, positions: HashMap::new(), checked: 0 };
    let mut descriptors = Vec::new();
    for fam in extra {
        if fam.len() != n || fam.iter().enumerate().any(|(s, &m)| m >> s & 1 == 0 || m >> n != 0) {
            return Err(Error::Precondition("extra family must pick T_s containing s".into()));
        }
        let dim = family_kernel_dim(sys, maps, fam)?;
        search.checked += 1;
        if dim != 0 {
            return Ok(InjOutcome::Failed(failing(fam, dim)));
        }
    }
    match mode {
        Mode::Certified => {
            let checked = AtomicU64::new(0);
            let failure = maximal.par_iter().find_map_first(|sizes| {
                let choices: Vec<Vec<u32>> = (0..n).map(|s| subset_choices(n, s, sizes[s])).collect();
                let mut order: Vec<usize> = (0..n).collect();
                order.sort_by_key(|&s| (sizes[s], s));
                let proj: Vec<FFMatrix> =
                    order.iter().map(|&s| maps[s].select_rows(&sys.x(s).ones().collect::<Vec<_>>())).collect();
                let mut local = Search { sys, positions: HashMap::new(), checked: 0 };
                let mut family = vec![0u32; n];
                let found = local.dfs(&order, &choices, &proj, sys.size_y(), &mut family);
                checked.fetch_add(local.checked, Ordering::Relaxed);
                found
            });
            if let Some((fam, dim)) = failure {
                return Ok(InjOutcome::Failed(failing(&fam, dim)));
            }
            search.checked += checked.into_inner();
            for sizes in &maximal {
                let choices: Vec<Vec<u32>> = (0..n).map(|s| subset_choices(n, s, sizes[s])).collect();
                descriptors.push(descriptor(sizes, &choices));
            }
        }
        Mode::Sampled(count) => {
            let mut stream = Stream::new("synth/verify_inj", seed, &[field.p()]);
            for sizes in &maximal {
                let choices: Vec<Vec<u32>> = (0..n).map(|s| subset_choices(n, s, sizes[s])).collect();
                descriptors.push(descriptor(sizes, &choices));
            }
            for _ in 0..count {
                let sizes = &maximal[stream.below(maximal.len() as u64) as usize];
                let fam: Family = (0..n)
                    .map(|s| {
                        let c = subset_choices(n, s, sizes[s]);
                        c[stream.below(c.len() as u64) as usize]
                    })
                    .collect();
                let dim = family_kernel_dim(sys, maps, &fam)?;
                search.checked += 1;
                if dim != 0 {
                    return Ok(InjOutcome::Failed(failing(&fam, dim)));
                }
            }
        }
    }
    Ok(InjOutcome::Certified(InjCertificate {
        n,
        k: sys.k(),
        size_y: sys.size_y(),
        p: field.p(),
        seed,
        mode,
        families_checked: search.checked,
        maximal_family_descriptors: descriptors,
        all_kernel_dims_zero: true,
        domination_closed,
        probabilistic: matches!(mode, Mode::Sampled(_)),
        wall_time_ms: started.elapsed().as_millis() as u64,
    }))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attempt {
    pub p: u64,
    pub seed: u64,
    pub failure: Option<FailingFamily>,
}

#[derive(Clone, Debug)]
pub struct Synthesis {
    pub ca: LinearCA,
    pub certificate: InjCertificate,
    pub plan: Plan,
    pub attempts: Vec<Attempt>,
}

/// Seed used for the `attempt`-th draw at one prime.
pub fn attempt_seed(seed: u64, attempt: u32) -> u64 {
    seed.wrapping_add(attempt as u64)
}

pub fn synthesize(spec: &SynthesisSpec) -> Result<Synthesis> {
    let plan = plan(spec)?;
    let sys = augment(&build(plan.n)?, &spec.c)?;
    let mut attempts = Vec::new();
    for &p in &spec.p_ladder {
        let field = PrimeField::new(p)?;
        for attempt in 0..spec.retries {
            let seed = attempt_seed(spec.seed, attempt);
            let maps = choose_maps(&sys, field, seed);
            match verify_inj(&sys, &maps, spec.mode, seed, &[])? {
                InjOutcome::Certified(certificate) => {
                    attempts.push(Attempt { p, seed, failure: None });
                    let ca = LinearCA::new(spec.ctx.clone(), plan.s.clone(), maps, Some(sys))?;
                    return Ok(Synthesis { ca, certificate, plan, attempts });
                }
                InjOutcome::Failed(f) => attempts.push(Attempt { p, seed, failure: Some(f) }),
            }
        }
    }
    let summary: Vec<String> = spec
        .p_ladder
        .iter()
        .map(|p| format!("p={p}: {} failures", attempts.iter().filter(|a| a.p == *p).count()))
        .collect();
    Err(Error::LadderExhausted(summary.join(", ")))
}
