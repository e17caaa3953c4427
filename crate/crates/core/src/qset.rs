//! The set `Q` of finite products of distinct odd primes, orderings on it,
//! and the signed divisor counts `f(k, h)` and `f(k)`.
//!
//! Every element `q` of `Q` carries the sign `(-1)^n`, where `n` is the
//! number of prime factors of `q`. For a fixed ordering `q_1, q_2, ...` the
//! partial count `f(k, h)` adds the signs of those `q_i` with `i <= h` that
//! divide `k`; its limit `f(k)` is `0` when `k` is a power of two and `-1`
//! otherwise (inclusion-exclusion over the odd prime divisors of `k`).

use std::collections::HashMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_xoshiro::SplitMix64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest value bound accepted by [`enumerate_q`] and the orderings.
pub const ENUMERATION_CAP: u64 = 1 << 40;

/// Identifier of the generator used by [`OrderingStrategy::SeededShuffle`].
/// Recorded in output metadata so shuffled orderings can be reproduced.
pub const SHUFFLE_ALGORITHM: &str = "splitmix64/fisher-yates(rand-0.9)";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QsetError {
    #[error("enumeration bound {bound} exceeds the cap of 2^40")]
    BoundTooLarge { bound: u64 },
    #[error("ordering yields only {available} elements but {requested} were requested; raise the bound")]
    Shortfall { requested: usize, available: usize },
    #[error("{value} is not a product of distinct odd primes: {reason}")]
    NotInQ { value: u64, reason: &'static str },
    #[error("element {0} appears more than once in an explicit ordering")]
    Duplicate(u64),
}

/// Returns the primes in `[2, limit]` in ascending order.
pub fn sieve_primes(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        primes.push(i as u64);
        let mut j = i.saturating_mul(i);
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    primes
}

/// Distinct odd prime factors of `k` by trial division, ascending.
pub fn odd_prime_factors(mut k: u64) -> Vec<u64> {
    let mut out = Vec::new();
    while k.is_multiple_of(2) && k > 0 {
        k /= 2;
    }
    let mut p = 3;
    while p * p <= k {
        if k.is_multiple_of(p) {
            out.push(p);
            while k.is_multiple_of(p) {
                k /= p;
            }
        }
        p += 2;
    }
    if k > 1 {
        out.push(k);
    }
    out
}

/// An element of `Q`: a product of one or more distinct odd primes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OddSquarefree {
    value: u64,
    factors: Vec<u64>,
}

impl OddSquarefree {
    /// Validates and factors `value`.
    pub fn new(value: u64) -> Result<Self, QsetError> {
        if value < 3 {
            return Err(QsetError::NotInQ { value, reason: "smaller than 3" });
        }
        if value.is_multiple_of(2) {
            return Err(QsetError::NotInQ { value, reason: "even" });
        }
        let factors = odd_prime_factors(value);
        if factors.iter().product::<u64>() != value {
            return Err(QsetError::NotInQ { value, reason: "not squarefree" });
        }
        Ok(Self { value, factors })
    }

    /// Builds an element from factors already known to be distinct odd
    /// primes in ascending order.
    pub(crate) fn from_factors_unchecked(factors: Vec<u64>) -> Self {
        debug_assert!(!factors.is_empty());
        let value = factors.iter().product();
        Self { value, factors }
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn sign(&self) -> i8 {
        sgn_of_count(self.factors.len())
    }
}

impl fmt::Display for OddSquarefree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

#[inline]
fn sgn_of_count(n: usize) -> i8 {
    if n.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// `(-1)^n` for `n` the number of prime factors of `q`.
pub fn sgn_q(q: &OddSquarefree) -> i8 {
    q.sign()
}

/// 1 if `q` divides `k`, else 0.
pub fn delta(k: u64, q: &OddSquarefree) -> u8 {
    u8::from(k.is_multiple_of(q.value))
}

/// Smallest-prime-factor table for odd integers, used to list the
/// divisors of `k` that lie in `Q` without scanning an ordering.
#[derive(Debug, Clone)]
pub struct OddFactorTable {
    limit: u64,
    // spf[n / 2] for odd n; 0 marks a prime (or 1)
    spf: Vec<u32>,
}

impl OddFactorTable {
    pub fn new(limit: u64) -> Self {
        let len = (limit / 2 + 1) as usize;
        let mut spf = vec![0u32; len];
        let mut p = 3u64;
        while p * p <= limit {
            if spf[(p / 2) as usize] == 0 {
                let mut m = p * p;
                while m <= limit {
                    let slot = &mut spf[(m / 2) as usize];
                    if *slot == 0 {
                        *slot = p as u32;
                    }
                    m += 2 * p;
                }
            }
            p += 2;
        }
        Self { limit, spf }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Distinct odd prime factors of `k`, ascending. Falls back to trial
    /// division above the table limit.
    pub fn odd_prime_factors(&self, k: u64) -> Vec<u64> {
        let mut m = k >> k.trailing_zeros();
        if m > self.limit {
            return odd_prime_factors(k);
        }
        let mut out = Vec::new();
        while m > 1 {
            let p = match self.spf[(m / 2) as usize] {
                0 => m,
                p => u64::from(p),
            };
            if out.last() != Some(&p) {
                out.push(p);
            }
            m /= p;
        }
        out
    }

    /// Calls `visit(d, sign)` for every divisor `d` of `k` lying in `Q`.
    pub fn for_each_q_divisor(&self, k: u64, mut visit: impl FnMut(u64, i8)) {
        let primes = self.odd_prime_factors(k);
        let n = primes.len();
        for mask in 1u32..(1u32 << n) {
            let mut d = 1u64;
            for (j, p) in primes.iter().enumerate() {
                if mask & (1 << j) != 0 {
                    d *= p;
                }
            }
            visit(d, sgn_of_count(mask.count_ones() as usize));
        }
    }
}

/// All elements of `Q` not exceeding `bound`, in increasing order.
pub fn enumerate_q(bound: u64) -> Result<Vec<OddSquarefree>, QsetError> {
    if bound > ENUMERATION_CAP {
        return Err(QsetError::BoundTooLarge { bound });
    }
    if bound < 3 {
        return Ok(Vec::new());
    }
    let table = OddFactorTable::new(bound);
    let mut out = Vec::new();
    let mut n = 3;
    while n <= bound {
        let factors = table.odd_prime_factors(n);
        if factors.iter().product::<u64>() == n {
            out.push(OddSquarefree::from_factors_unchecked(factors));
        }
        n += 2;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrderingStrategy {
    ByValue,
    ByFactorCountThenValue,
    /// Shuffles the first `prefix_length` elements of the by-value order;
    /// later elements keep their by-value positions.
    SeededShuffle {
        seed: u64,
        prefix_length: usize,
    },
    Explicit(Vec<OddSquarefree>),
}

/// A concrete enumeration order over the elements of `Q` up to `bound_hint`.
///
/// `ByFactorCountThenValue` orders only the bounded set; every other
/// strategy is a prefix of an ordering of all of `Q`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QOrdering {
    pub strategy: OrderingStrategy,
    pub bound_hint: u64,
}

impl QOrdering {
    pub fn by_value(bound: u64) -> Self {
        Self { strategy: OrderingStrategy::ByValue, bound_hint: bound }
    }

    pub fn by_factor_count(bound: u64) -> Self {
        Self { strategy: OrderingStrategy::ByFactorCountThenValue, bound_hint: bound }
    }

    pub fn seeded_shuffle(seed: u64, prefix_length: usize, bound: u64) -> Self {
        Self { strategy: OrderingStrategy::SeededShuffle { seed, prefix_length }, bound_hint: bound }
    }

    pub fn explicit(elements: Vec<OddSquarefree>) -> Self {
        let bound_hint = elements.iter().map(OddSquarefree::value).max().unwrap_or(0);
        Self { strategy: OrderingStrategy::Explicit(elements), bound_hint }
    }

    /// Stable textual descriptor, used as `orderingId` in reports.
    pub fn descriptor(&self) -> String {
        match &self.strategy {
            OrderingStrategy::ByValue => format!("byvalue(bound={})", self.bound_hint),
            OrderingStrategy::ByFactorCountThenValue => {
                format!("byfactorcount(bound={})", self.bound_hint)
            }
            OrderingStrategy::SeededShuffle { seed, prefix_length } => {
                format!("shuffle(seed={seed},prefix={prefix_length},bound={},rng={SHUFFLE_ALGORITHM})", self.bound_hint)
            }
            OrderingStrategy::Explicit(list) => {
                let body: Vec<String> = list.iter().map(|q| q.value.to_string()).collect();
                format!("explicit[{}]", body.join(","))
            }
        }
    }

    /// Materializes the ordering.
    pub fn enumerate(&self) -> Result<OrderedQ, QsetError> {
        let elements = match &self.strategy {
            OrderingStrategy::ByValue => enumerate_q(self.bound_hint)?,
            OrderingStrategy::ByFactorCountThenValue => {
                let mut v = enumerate_q(self.bound_hint)?;
                v.sort_by_key(|q| (q.factors.len(), q.value));
                v
            }
            OrderingStrategy::SeededShuffle { seed, prefix_length } => {
                let mut v = enumerate_q(self.bound_hint)?;
                if *prefix_length > v.len() {
                    return Err(QsetError::Shortfall { requested: *prefix_length, available: v.len() });
                }
                let mut rng = SplitMix64::seed_from_u64(*seed);
                v[..*prefix_length].shuffle(&mut rng);
                v
            }
            OrderingStrategy::Explicit(list) => list.clone(),
        };
        OrderedQ::with_id(self.descriptor(), elements)
    }
}

/// A materialized ordering `q_1, q_2, ...` with an index lookup.
#[derive(Debug, Clone)]
pub struct OrderedQ {
    id: String,
    elements: Vec<OddSquarefree>,
    index: HashMap<u64, usize>,
}

impl OrderedQ {
    pub fn from_elements(elements: Vec<OddSquarefree>) -> Result<Self, QsetError> {
        let id = QOrdering::explicit(elements.clone()).descriptor();
        Self::with_id(id, elements)
    }

    fn with_id(id: String, elements: Vec<OddSquarefree>) -> Result<Self, QsetError> {
        let mut index = HashMap::with_capacity(elements.len());
        for (i, q) in elements.iter().enumerate() {
            if index.insert(q.value, i).is_some() {
                return Err(QsetError::Duplicate(q.value));
            }
        }
        Ok(Self { id, elements, index })
    }

    /// Descriptor of the ordering that produced this sequence.
    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[OddSquarefree] {
        &self.elements
    }

    /// `q_1..q_h`, or a shortfall error when fewer than `h` are available.
    pub fn prefix(&self, h: usize) -> Result<&[OddSquarefree], QsetError> {
        self.elements.get(..h).ok_or(QsetError::Shortfall { requested: h, available: self.elements.len() })
    }

    /// Zero-based position of `value` in the ordering.
    pub fn index_of(&self, value: u64) -> Option<usize> {
        self.index.get(&value).copied()
    }

    pub fn max_value(&self) -> u64 {
        self.elements.iter().map(OddSquarefree::value).max().unwrap_or(0)
    }
}

/// `f(k, h)` straight from the definition: scans `q_1..q_h`.
pub fn f_kh(k: u64, ordering: &OrderedQ, h: usize) -> Result<i64, QsetError> {
    Ok(ordering.prefix(h)?.iter().filter(|q| delta(k, q) == 1).map(|q| i64::from(q.sign())).sum())
}

/// `f(k, h)` by visiting only the divisors of `k` that lie in `Q`.
pub fn f_kh_fast(k: u64, ordering: &OrderedQ, h: usize, table: &OddFactorTable) -> Result<i64, QsetError> {
    ordering.prefix(h)?;
    let mut total = 0i64;
    table.for_each_q_divisor(k, |d, sign| {
        if ordering.index_of(d).is_some_and(|i| i < h) {
            total += i64::from(sign);
        }
    });
    Ok(total)
}

/// True iff `k` is a power of two (including `k = 1`).
pub fn is_gamma(k: u64) -> bool {
    k.is_power_of_two()
}

/// Closed form of `f(k)`: 0 on powers of two, -1 elsewhere.
pub fn f_closed(k: u64) -> i64 {
    if is_gamma(k) {
        0
    } else {
        -1
    }
}

/// `f(k)` by summing `(-1)^|S|` over every nonempty subset `S` of the odd
/// prime divisors of `k`.
pub fn f_bruteforce(k: u64) -> i64 {
    let primes = odd_prime_factors(k);
    let n = primes.len() as u32;
    (1u64..(1u64 << n)).map(|mask| if mask.count_ones() % 2 == 0 { 1 } else { -1 }).sum()
}
