//! The cycle set system.
//!
//! The ground set `Y` consists of pairs `(sigma, c)` where `sigma` runs over the
//! symmetric group on `n` points (in lexicographic order) and `c` over the
//! cycles of `sigma` (fixed points included, ordered by smallest element).
//! `X_i` collects the pairs whose cycle contains `i`. Then `#Y = sum n!/i` and
//! for every `I` containing `i`, the part of `X_i` outside all other `X_j`,
//! `j in I`, has exactly `n!/#I` elements.
//!
//! [`augment`] replicates the ground set `k` times and appends one point that
//! lies in no `X_i`, choosing `k` so that every family of sets `T_s` with
//! `sum 1/#T_s >= c` has `sum #X_{s,T_s} >= #Y`.

use fixedbitset::FixedBitSet;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{harmonic, int, ln_bounds, LN_TERMS};
use crate::rng::Stream;

pub const MAX_N: usize = 8;

/// Number of `(i, I)` pairs sampled by [`verify_counts`] when `n > 5`.
pub const SAMPLED_PAIRS: usize = 256;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleSystem {
    n: usize,
    k: u64,
    base_size: usize,
    size_y: usize,
    x: Vec<FixedBitSet>,
    extra_point: Option<usize>,
}

pub fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// `sum_{i=1..n} n!/i`, the size of the unreplicated ground set.
pub fn base_size(n: usize) -> u64 {
    (1..=n as u64).map(|i| factorial(n) / i).sum()
}

fn next_permutation(a: &mut [usize]) -> bool {
    let n = a.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

pub fn build(n: usize) -> Result<CycleSystem> {
    if !(1..=MAX_N).contains(&n) {
        return Err(Error::OutOfRange(format!("n = {n} (supported: 1..={MAX_N})")));
    }
    let size = base_size(n) as usize;
    let mut x = vec![FixedBitSet::with_capacity(size); n];
    let mut perm: Vec<usize> = (0..n).collect();
    let mut next = 0usize;
    let mut seen = vec![false; n];
    loop {
        seen.iter_mut().for_each(|s| *s = false);
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                x[i].insert(next);
                i = perm[i];
            }
            next += 1;
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    debug_assert_eq!(next, size);
    Ok(CycleSystem { n, k: 1, base_size: size, size_y: size, x, extra_point: None })
}

impl CycleSystem {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Replication factor.
    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn base_size(&self) -> usize {
        self.base_size
    }

    pub fn size_y(&self) -> usize {
        self.size_y
    }

    pub fn extra_point(&self) -> Option<usize> {
        self.extra_point
    }

    pub fn x(&self, i: usize) -> &FixedBitSet {
        &self.x[i]
    }

    /// `X_i` minus the union of `X_j` for `j in others`, `j != i`.
    pub fn x_set(&self, i: usize, others: impl IntoIterator<Item = usize>) -> FixedBitSet {
        let mut out = self.x[i].clone();
        for j in others {
            if j != i {
                out.difference_with(&self.x[j]);
            }
        }
        out
    }

    /// `#X_{i,I}` for `#I = t`, i.e. `k n! / t`.
    pub fn x_size_for(&self, t: usize) -> u64 {
        assert!((1..=self.n).contains(&t));
        self.k * factorial(self.n) / t as u64
    }

    /// Indices of `X_i`, ascending.
    pub fn x_indices(&self, i: usize) -> Vec<usize> {
        self.x[i].ones().collect()
    }
}

/// Outcome of [`verify_counts`]; `violations` is empty when every check passed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lemma1Report {
    pub n: usize,
    pub k: u64,
    pub size_y: usize,
    pub expected_size_y: usize,
    pub exhaustive: bool,
    pub pairs_checked: usize,
    /// Lower bound on `ln n` used for the inequality check.
    pub ln_lower_bound: String,
    pub violations: Vec<String>,
}

impl Lemma1Report {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the size identities of a system: `#Y`, `#X_i = k n!`, the extra
/// point, `#X_{i,I} = k n!/#I` for every pair (exhaustively when `n <= 5`,
/// on a fixed sample otherwise) and the logarithmic inequality
/// `#X_{i,I} (1 + ln n) #I >= k #Y0`, with `ln n` replaced by a certified
/// rational lower bound.
pub fn verify_counts(sys: &CycleSystem) -> Result<Lemma1Report> {
    let n = sys.n;
    let fact = factorial(n);
    let expected = sys.k as usize * base_size(n) as usize + usize::from(sys.extra_point.is_some());
    let mut violations = Vec::new();
    if sys.size_y != expected {
        violations.push(format!("#Y = {} but expected {expected}", sys.size_y));
    }
    for (i, xi) in sys.x.iter().enumerate() {
        if xi.count_ones(..) as u64 != sys.k * fact {
            violations.push(format!("#X_{} = {} but expected {}", i + 1, xi.count_ones(..), sys.k * fact));
        }
        if let Some(e) = sys.extra_point {
            if xi.contains(e) {
                violations.push(format!("extra point {e} lies in X_{}", i + 1));
            }
        }
    }

    let exhaustive = n <= 5;
    let pairs: Vec<(usize, u32)> = if exhaustive {
        (0..n).flat_map(|i| (0u32..1 << n).filter(move |m| m >> i & 1 == 1).map(move |m| (i, m))).collect()
    } else {
        let mut stream = Stream::new("lemma1/verify", n as u64, &[]);
        (0..SAMPLED_PAIRS)
            .map(|_| {
                let i = stream.below(n as u64) as usize;
                let m = (stream.below(1 << n) as u32) | (1 << i);
                (i, m)
            })
            .collect()
    };

    // Rounded down to 12 decimals, so still a lower bound on ln n.
    let (ln_exact, _) = ln_bounds(&int(n as i64), LN_TERMS)?;
    let scale = int(1_000_000_000_000);
    let ln_lo = (&ln_exact * &scale).floor() / &scale;
    let rhs = int((sys.k * base_size(n)) as i64);
    for &(i, mask) in &pairs {
        let members: Vec<usize> = (0..n).filter(|j| mask >> j & 1 == 1).collect();
        let t = members.len();
        let count = sys.x_set(i, members.iter().copied()).count_ones(..) as u64;
        let want = sys.k * fact / t as u64;
        if count != want {
            violations.push(format!("#X_{{{},{:?}}} = {count} but expected {want}", i + 1, plus_one(&members)));
        }
        let lhs = int(count as i64) * (BigRational::one() + &ln_lo) * int(t as i64);
        if lhs < rhs {
            violations.push(format!("inequality fails at i = {}, I = {:?}", i + 1, plus_one(&members)));
        }
    }

    Ok(Lemma1Report {
        n,
        k: sys.k,
        size_y: sys.size_y,
        expected_size_y: expected,
        exhaustive,
        pairs_checked: pairs.len(),
        ln_lower_bound: ln_lo.to_string(),
        violations,
    })
}

fn plus_one(v: &[usize]) -> Vec<usize> {
    v.iter().map(|x| x + 1).collect()
}

/// Replicates the ground set and appends the extra point.
///
/// Requires `c > H_n`; the replication factor is the least `k` with
/// `k (n! c - #Y0) >= 1`.
pub fn augment(sys: &CycleSystem, c: &BigRational) -> Result<CycleSystem> {
    if sys.k != 1 || sys.extra_point.is_some() {
        return Err(Error::Precondition("augment expects a freshly built system".into()));
    }
    let n = sys.n;
    let h = harmonic(n);
    if *c <= h {
        return Err(Error::AugmentImpossible { n, c: c.to_string(), harmonic: h.to_string() });
    }
    let margin = int(factorial(n) as i64) * c - int(sys.base_size as i64);
    debug_assert!(margin > BigRational::zero());
    let k_big: BigInt = (BigRational::one() / &margin).ceil().to_integer();
    let k = k_big.to_u64().filter(|&k| k >= 1).ok_or_else(|| Error::OutOfRange("replication factor".into()))?;
    let base = sys.base_size;
    let size = (k as usize)
        .checked_mul(base)
        .and_then(|s| s.checked_add(1))
        .ok_or_else(|| Error::CapExceeded("replicated ground set too large".into()))?;
    let x = sys
        .x
        .iter()
        .map(|xi| {
            let mut out = FixedBitSet::with_capacity(size);
            for copy in 0..k as usize {
                for j in xi.ones() {
                    out.insert(copy * base + j);
                }
            }
            out
        })
        .collect();
    Ok(CycleSystem { n, k, base_size: base, size_y: size, x, extra_point: Some(size - 1) })
}

/// Searches `{1..n}^n` for a size vector with `sum 1/t_s >= c` but
/// `sum k n!/t_s < #Y`. Returns the first such vector, if any.
pub fn augment_counterexample(sys: &CycleSystem, c: &BigRational) -> Result<Option<Vec<usize>>> {
    let n = sys.n;
    if n > 6 {
        return Err(Error::CapExceeded(format!("exhaustive size-vector sweep for n = {n}")));
    }
    // Compare sum 1/t against c in integers scaled by lcm(1..n).
    let l = (1..=n as u64).fold(1u64, |a, b| a.lcm(&b));
    let mut t = vec![1usize; n];
    loop {
        let scaled: u64 = t.iter().map(|&ti| l / ti as u64).sum();
        if int(scaled as i64) >= c * int(l as i64) {
            let total: u64 = t.iter().map(|&ti| sys.x_size_for(ti)).sum();
            if (total as usize) < sys.size_y {
                return Ok(Some(t));
            }
        }
        let mut pos = 0;
        loop {
            if pos == n {
                return Ok(None);
            }
            t[pos] += 1;
            if t[pos] <= n {
                break;
            }
            t[pos] = 1;
            pos += 1;
        }
    }
}

/// Serialized form: `X` bitsets as lowercase hex, byte `b` holding ground-set
/// indices `8b..8b+7` with index `8b + j` in bit `j`.
#[derive(Serialize, Deserialize)]
struct CycleSystemRepr {
    n: usize,
    k: u64,
    #[serde(rename = "sizeY")]
    size_y: usize,
    #[serde(rename = "X")]
    x: Vec<String>,
    extra_point: Option<usize>,
}

fn bits_to_hex(b: &FixedBitSet, len: usize) -> String {
    let mut bytes = vec![0u8; len.div_ceil(8)];
    for i in b.ones() {
        bytes[i / 8] |= 1 << (i % 8);
    }
    hex::encode(bytes)
}

impl Serialize for CycleSystem {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        CycleSystemRepr {
            n: self.n,
            k: self.k,
            size_y: self.size_y,
            x: self.x.iter().map(|b| bits_to_hex(b, self.size_y)).collect(),
            extra_point: self.extra_point,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CycleSystem {
    /// Decoding rebuilds the system from `n` and `k` and requires the stored
    /// bitsets to match it exactly.
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = CycleSystemRepr::deserialize(deserializer)?;
        let mut sys = build(repr.n).map_err(D::Error::custom)?;
        if repr.k != 1 || repr.extra_point.is_some() {
            if repr.k == 0 {
                return Err(D::Error::custom("replication factor must be at least 1"));
            }
            let base = sys.base_size;
            let size = repr.k as usize * base + 1;
            if repr.extra_point != Some(size - 1) {
                return Err(D::Error::custom("extra point must be the last index of the replicated ground set"));
            }
            sys.x = sys
                .x
                .iter()
                .map(|xi| {
                    let mut out = FixedBitSet::with_capacity(size);
                    for copy in 0..repr.k as usize {
                        for j in xi.ones() {
                            out.insert(copy * base + j);
                        }
                    }
                    out
                })
                .collect();
            sys.k = repr.k;
            sys.size_y = size;
            sys.extra_point = repr.extra_point;
        }
        if repr.size_y != sys.size_y {
            return Err(D::Error::custom(format!("sizeY {} does not match n = {}, k = {}", repr.size_y, repr.n, repr.k)));
        }
        let expected: Vec<String> = sys.x.iter().map(|b| bits_to_hex(b, sys.size_y)).collect();
        if repr.x != expected {
            return Err(D::Error::custom("X bitsets do not match the cycle system for this n and k"));
        }
        Ok(sys)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;

    /// Independent count of `#Y`: total number of cycles over all permutations,
    /// via unsigned Stirling numbers of the first kind, `sum_j j [n, j]`.
    fn cycle_count_oracle(n: usize) -> u64 {
        let mut s = vec![vec![0u64; n + 1]; n + 1];
        s[0][0] = 1;
        for i in 1..=n {
            for j in 1..=i {
                s[i][j] = s[i - 1][j - 1] + (i as u64 - 1) * s[i - 1][j];
            }
        }
        (1..=n).map(|j| j as u64 * s[n][j]).sum()
    }

    #[test]
    fn ground_set_sizes() {
        assert_eq!(build(3).unwrap().size_y(), 11);
        assert_eq!(build(2).unwrap().size_y(), 3);
        assert_eq!(build(5).unwrap().size_y(), 274);
        for n in 1..=6 {
            let sys = build(n).unwrap();
            assert_eq!(sys.size_y() as u64, cycle_count_oracle(n), "n={n}");
            assert_eq!(sys.size_y() as u64, base_size(n));
        }
        assert!(build(0).is_err());
        assert!(build(9).is_err());
    }

    #[test]
    fn exclusive_parts() {
        let sys = build(3).unwrap();
        assert_eq!(sys.x_set(0, [0, 1]).count_ones(..), 3);
        assert_eq!(sys.x_set(0, [0, 1, 2]).count_ones(..), 2);
    }

    #[test]
    fn single_point_system() {
        let sys = build(1).unwrap();
        assert_eq!(sys.size_y(), 1);
        assert_eq!(sys.x_indices(0), vec![0]);
        assert!(verify_counts(&sys).unwrap().passed());
    }

    #[test]
    fn verify_small_systems() {
        for n in 1..=5 {
            let rep = verify_counts(&build(n).unwrap()).unwrap();
            assert!(rep.passed(), "n={n}: {:?}", rep.violations);
            assert!(rep.exhaustive);
            assert_eq!(rep.pairs_checked, n << (n - 1));
        }
        let rep = verify_counts(&build(6).unwrap()).unwrap();
        assert!(rep.passed() && !rep.exhaustive);
    }

    #[test]
    fn verify_detects_tampering() {
        let mut sys = build(3).unwrap();
        sys.x[1].insert(0);
        assert!(!verify_counts(&sys).unwrap().passed());
    }

    #[test]
    fn augment_examples() {
        let s5 = augment(&build(5).unwrap(), &int(3)).unwrap();
        assert_eq!((s5.k(), s5.size_y(), s5.extra_point()), (1, 275, Some(274)));
        let s2 = augment(&build(2).unwrap(), &int(2)).unwrap();
        assert_eq!((s2.k(), s2.size_y()), (1, 4));
        assert_eq!(s2.x_indices(0).len(), 2);
        assert!(matches!(augment(&build(2).unwrap(), &ratio(3, 2)), Err(Error::AugmentImpossible { .. })));
        assert!(augment(&s2, &int(2)).is_err());
    }

    #[test]
    fn augment_replicates_when_margin_is_small() {
        // n = 3: #Y0 = 11, 3! c - 11 = 1/4 at c = 15/8, so k = 4.
        let sys = augment(&build(3).unwrap(), &ratio(15, 8)).unwrap();
        assert_eq!(sys.k(), 4);
        assert_eq!(sys.size_y(), 45);
        assert!(verify_counts(&sys).unwrap().passed());
    }

    #[test]
    fn augment_guarantee_exhaustive() {
        let cases = [(2, ratio(2, 1)), (2, ratio(8, 5)), (3, ratio(2, 1)), (3, ratio(15, 8)), (4, ratio(5, 2)), (5, int(3)), (5, ratio(23, 10))];
        for (n, c) in cases {
            let sys = augment(&build(n).unwrap(), &c).unwrap();
            assert_eq!(augment_counterexample(&sys, &c).unwrap(), None, "n={n} c={c}");
            assert!(verify_counts(&sys).unwrap().passed());
        }
    }

    #[test]
    fn guarantee_fails_without_replication() {
        // At c = H_3 the bare system is tight; one extra point breaks it.
        let mut sys = build(3).unwrap();
        let c = harmonic(3);
        assert_eq!(augment_counterexample(&sys, &c).unwrap(), None);
        sys.size_y = 12;
        sys.extra_point = Some(11);
        assert_eq!(augment_counterexample(&sys, &c).unwrap(), Some(vec![3, 2, 1]));
    }

    #[test]
    fn serialization_roundtrip() {
        let sys = augment(&build(3).unwrap(), &ratio(15, 8)).unwrap();
        let j = serde_json::to_string(&sys).unwrap();
        assert!(j.contains("\"sizeY\":45"));
        let back: CycleSystem = serde_json::from_str(&j).unwrap();
        assert_eq!(back, sys);
        let tampered = j.replacen("\"k\":4", "\"k\":3", 1);
        assert!(serde_json::from_str::<CycleSystem>(&tampered).is_err());
    }
}
