//! Finite abelian groups in invariant-factor form, their characters, and
//! the counting machinery for `N(t, B, P)`: the number of `t`-subsets of a
//! point set `P` whose group sum is `B`.
//!
//! Exact counts come from a dynamic program over (subset size, group
//! element) with big integers. The deviation of that count from its mean
//! `binom(n, t) / N` is bounded through the amplitude
//! `Phi(P) = max |s_chi(P)|` over nontrivial characters, and the
//! combinatorial identities behind that bound (cycle-type counts, their
//! generating function and the signed sieve over `S_t`) are exposed so
//! they can be checked on their own.

use std::collections::HashSet;
use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::bigmath::{binomial, ln_biguint, ln_factorial};
use crate::error::{Error, Result};

/// Declared work budget for the subset-sum table: `n * t * N`.
pub const DP_BUDGET: u128 = 1 << 31;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement(Vec<u64>);

impl GroupElement {
    pub fn new(components: Vec<u64>) -> Self {
        Self(components)
    }

    pub fn components(&self) -> &[u64] {
        &self.0
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u64::to_string).collect();
        write!(f, "{}", parts.join(":"))
    }
}

/// `Z_{d1} x ... x Z_{dk}` with `d1 | d2 | ... | dk`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbelianGroup {
    factors: Vec<u64>,
    order: u64,
}

impl AbelianGroup {
    pub fn new(factors: Vec<u64>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidGroup("no invariant factors".into()));
        }
        if factors.contains(&0) {
            return Err(Error::InvalidGroup("invariant factors must be >= 1".into()));
        }
        if factors.windows(2).any(|w| w[1] % w[0] != 0) {
            return Err(Error::InvalidGroup(format!(
                "{factors:?} is not a divisibility chain"
            )));
        }
        let order = factors
            .iter()
            .try_fold(1u64, |acc, &d| acc.checked_mul(d))
            .ok_or_else(|| Error::InvalidGroup("order overflows".into()))?;
        Ok(Self { factors, order })
    }

    pub fn cyclic(n: u64) -> Result<Self> {
        Self::new(vec![n])
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// The largest invariant factor, which every element order divides.
    pub fn exponent(&self) -> u64 {
        *self.factors.last().expect("nonempty")
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement(vec![0; self.factors.len()])
    }

    pub fn contains(&self, a: &GroupElement) -> bool {
        a.0.len() == self.factors.len() && a.0.iter().zip(&self.factors).all(|(x, d)| x < d)
    }

    pub fn element(&self, components: Vec<u64>) -> Result<GroupElement> {
        let a = GroupElement(components);
        if self.contains(&a) {
            Ok(a)
        } else {
            Err(Error::ElementOutOfRange)
        }
    }

    /// Mixed-radix position of `a`, last component fastest.
    pub fn index_of(&self, a: &GroupElement) -> usize {
        a.0.iter()
            .zip(&self.factors)
            .fold(0u64, |acc, (x, d)| acc * d + x) as usize
    }

    pub fn element_at(&self, mut index: usize) -> GroupElement {
        let mut comps = vec![0; self.factors.len()];
        for (slot, &d) in comps.iter_mut().zip(&self.factors).rev() {
            *slot = index as u64 % d;
            index /= d as usize;
        }
        GroupElement(comps)
    }

    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.order as usize).map(move |i| self.element_at(i))
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        GroupElement(
            a.0.iter()
                .zip(&b.0)
                .zip(&self.factors)
                .map(|((x, y), d)| (x + y) % d)
                .collect(),
        )
    }

    pub fn neg(&self, a: &GroupElement) -> GroupElement {
        GroupElement(
            a.0.iter()
                .zip(&self.factors)
                .map(|(x, d)| (d - x) % d)
                .collect(),
        )
    }

    pub fn sum<'a>(&self, items: impl IntoIterator<Item = &'a GroupElement>) -> GroupElement {
        items
            .into_iter()
            .fold(self.identity(), |acc, a| self.add(&acc, a))
    }

    pub fn characters(&self) -> impl Iterator<Item = Character> + '_ {
        self.elements().map(|e| Character(e.0))
    }

    pub fn trivial_character(&self) -> Character {
        Character(vec![0; self.factors.len()])
    }

    /// Phase of `chi(a)` as an integer numerator over the group exponent.
    fn phase(&self, chi: &Character, a: &GroupElement) -> u64 {
        let l = self.exponent();
        chi.0
            .iter()
            .zip(&a.0)
            .zip(&self.factors)
            .fold(0u64, |acc, ((v, x), d)| {
                (acc + (v * x % d) * (l / d)) % l
            })
    }

    pub fn eval_character(&self, chi: &Character, a: &GroupElement) -> Complex64 {
        let l = self.exponent();
        Complex64::from_polar(1.0, TAU * self.phase(chi, a) as f64 / l as f64)
    }

    /// Multiplicative order of a character in the dual group.
    pub fn character_order(&self, chi: &Character) -> u64 {
        chi.0
            .iter()
            .zip(&self.factors)
            .map(|(v, d)| d / gcd(*v, *d))
            .fold(1, lcm)
    }
}

impl FromStr for AbelianGroup {
    type Err = Error;

    /// `ab:d1,d2,...,dk`.
    fn from_str(s: &str) -> Result<Self> {
        let rest = s
            .trim()
            .strip_prefix("ab:")
            .ok_or_else(|| Error::Parse(format!("group spec must start with ab:, got {s:?}")))?;
        let factors = rest
            .split(',')
            .map(|d| {
                d.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::Parse(format!("bad invariant factor {d:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(factors)
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(|d| format!("Z_{d}")).collect();
        write!(f, "{}", parts.join(" x "))
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// Additive character `a -> exp(2 pi i sum_j v_j a_j / d_j)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Character(Vec<u64>);

impl Character {
    pub fn new(exponents: Vec<u64>) -> Self {
        Self(exponents)
    }

    pub fn exponents(&self) -> &[u64] {
        &self.0
    }

    pub fn is_trivial(&self) -> bool {
        self.0.iter().all(|&v| v == 0)
    }

    /// `chi^k`.
    pub fn pow(&self, group: &AbelianGroup, k: u64) -> Character {
        Character(
            self.0
                .iter()
                .zip(group.factors())
                .map(|(v, d)| v * (k % d) % d)
                .collect(),
        )
    }
}

/// A set of distinct group elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointSet {
    elements: Vec<GroupElement>,
}

impl PointSet {
    pub fn new(group: &AbelianGroup, elements: Vec<GroupElement>) -> Result<Self> {
        let mut seen = HashSet::new();
        for e in &elements {
            if !group.contains(e) {
                return Err(Error::ElementOutOfRange);
            }
            if !seen.insert(e.clone()) {
                return Err(Error::DuplicatePoint);
            }
        }
        Ok(Self { elements })
    }

    pub fn full(group: &AbelianGroup) -> Self {
        Self {
            elements: group.elements().collect(),
        }
    }

    /// The whole group with the given elements removed.
    pub fn full_minus(group: &AbelianGroup, removed: &[GroupElement]) -> Result<Self> {
        let removed: HashSet<&GroupElement> = removed.iter().collect();
        Self::new(
            group,
            group.elements().filter(|e| !removed.contains(e)).collect(),
        )
    }

    pub fn complement(&self, group: &AbelianGroup) -> Self {
        let mine: HashSet<&GroupElement> = self.elements.iter().collect();
        Self {
            elements: group.elements().filter(|e| !mine.contains(e)).collect(),
        }
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// `s_chi(P) = sum_{a in P} chi(a)`.
pub fn char_sum(group: &AbelianGroup, chi: &Character, set: &PointSet) -> Complex64 {
    let l = group.exponent();
    let mut bins = vec![0u64; l as usize];
    for a in set.elements() {
        bins[group.phase(chi, a) as usize] += 1;
    }
    sum_binned(&bins)
}

/// Sums `count * exp(2 pi i k / L)` over phase bins, in bin order.
fn sum_binned(bins: &[u64]) -> Complex64 {
    let l = bins.len() as f64;
    bins.iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(k, &c)| Complex64::from_polar(c as f64, TAU * k as f64 / l))
        .fold(Complex64::new(0.0, 0.0), |acc, z| acc + z)
}

/// `Phi(P)`: the largest modulus of a nontrivial character sum over `P`.
pub fn amplitude(group: &AbelianGroup, set: &PointSet) -> Result<f64> {
    if group.order() < 2 {
        return Err(Error::TrivialGroup);
    }
    Ok(group
        .characters()
        .filter(|chi| !chi.is_trivial())
        .map(|chi| char_sum(group, &chi, set).norm())
        .fold(0.0, f64::max))
}

/// Exact subset-sum counts `N(k, B, P)` for every `k <= t_max` and every
/// `B`, built one element of `P` at a time.
#[derive(Debug, Clone)]
pub struct SubsetSumTable {
    group: AbelianGroup,
    n: usize,
    rows: Vec<Vec<BigUint>>,
}

impl SubsetSumTable {
    pub fn build(group: &AbelianGroup, set: &PointSet, t_max: usize) -> Result<Self> {
        let n = set.len();
        let t_max = t_max.min(n);
        let order = group.order() as usize;
        let work = n as u128 * t_max.max(1) as u128 * order as u128;
        if work > DP_BUDGET {
            return Err(Error::BudgetExceeded(format!(
                "subset-sum table needs n*t*N = {work} > {DP_BUDGET}"
            )));
        }
        let mut rows = vec![vec![BigUint::zero(); order]; t_max + 1];
        rows[0][group.index_of(&group.identity())] = BigUint::one();
        let mut shift = vec![0usize; order];
        for (processed, a) in set.elements().iter().enumerate() {
            for (idx, slot) in shift.iter_mut().enumerate() {
                *slot = group.index_of(&group.add(&group.element_at(idx), a));
            }
            // Descending k so each element is used at most once.
            for k in (1..=t_max.min(processed + 1)).rev() {
                let (lo, hi) = rows.split_at_mut(k);
                let src = &lo[k - 1];
                let dst = &mut hi[0];
                for (idx, value) in src.iter().enumerate() {
                    if !value.is_zero() {
                        dst[shift[idx]] += value;
                    }
                }
            }
        }
        Ok(Self {
            group: group.clone(),
            n,
            rows,
        })
    }

    pub fn t_max(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn count(&self, t: usize, target: &GroupElement) -> BigUint {
        if t > self.t_max() {
            return BigUint::zero();
        }
        self.rows[t][self.group.index_of(target)].clone()
    }

    /// Counts for every target, indexed like [`AbelianGroup::element_at`].
    pub fn counts(&self, t: usize) -> &[BigUint] {
        &self.rows[t]
    }
}

/// `N(t, B, P)`.
pub fn subset_sum_count(
    group: &AbelianGroup,
    set: &PointSet,
    t: usize,
    target: &GroupElement,
) -> Result<BigUint> {
    if !group.contains(target) {
        return Err(Error::ElementOutOfRange);
    }
    if t > set.len() {
        return Ok(BigUint::zero());
    }
    Ok(SubsetSumTable::build(group, set, t)?.count(t, target))
}

/// A cycle type `(c_1, ..., c_t)`: `c_i` cycles of length `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CycleType(Vec<usize>);

impl CycleType {
    pub fn new(counts: Vec<usize>) -> Self {
        Self(counts)
    }

    pub fn counts(&self) -> &[usize] {
        &self.0
    }

    pub fn size(&self) -> usize {
        self.0.iter().enumerate().map(|(i, c)| (i + 1) * c).sum()
    }

    pub fn cycles(&self) -> usize {
        self.0.iter().sum()
    }

    /// `(-1)^(t - number of cycles)`.
    pub fn sign(&self) -> i32 {
        if (self.size() - self.cycles()) % 2 == 0 {
            1
        } else {
            -1
        }
    }
}

/// Every cycle type of `S_t`, i.e. every partition of `t`.
pub fn cycle_types(t: usize) -> Vec<CycleType> {
    fn rec(remaining: usize, max_part: usize, counts: &mut Vec<usize>, out: &mut Vec<CycleType>) {
        if remaining == 0 {
            out.push(CycleType(counts.clone()));
            return;
        }
        for part in (1..=max_part.min(remaining)).rev() {
            counts[part - 1] += 1;
            rec(remaining - part, part, counts, out);
            counts[part - 1] -= 1;
        }
    }
    let mut out = Vec::new();
    let mut counts = vec![0; t];
    rec(t, t, &mut counts, &mut out);
    out
}

fn factorial(n: usize) -> BigUint {
    (1..=n as u64).fold(BigUint::one(), |acc, i| acc * i)
}

/// Number of permutations of the given cycle type:
/// `t! / prod_i (i^{c_i} c_i!)`.
pub fn cycle_type_count(ty: &CycleType, t: usize) -> Result<BigUint> {
    let sum = ty.size();
    if sum != t {
        return Err(Error::InvalidCycleType { sum, t });
    }
    let mut denom = BigUint::one();
    for (i, &c) in ty.counts().iter().enumerate() {
        denom *= BigUint::from((i + 1) as u64).pow(c as u32) * factorial(c);
    }
    Ok(factorial(t) / denom)
}

/// Weight `q_i` attached to cycles of length `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightRule {
    Uniform(u64),
    /// `q_i = q` when `d | i`, else `s`.
    Periodic { d: usize, q: u64, s: u64 },
}

impl WeightRule {
    fn weight(&self, len: usize) -> u64 {
        match *self {
            WeightRule::Uniform(q) => q,
            WeightRule::Periodic { d, q, s } => {
                if len % d == 0 {
                    q
                } else {
                    s
                }
            }
        }
    }
}

/// `C_t(q_1, ..., q_t) = sum over types of N(c) prod_i q_i^{c_i}`.
pub fn cycle_gen_function(t: usize, rule: WeightRule) -> BigUint {
    cycle_types(t)
        .iter()
        .map(|ty| {
            let mut term = cycle_type_count(ty, t).expect("type of size t");
            for (i, &c) in ty.counts().iter().enumerate() {
                term *= BigUint::from(rule.weight(i + 1)).pow(c as u32);
            }
            term
        })
        .sum()
}

/// `x (x - 1) ... (x - t + 1)`, with `(x)_0 = 1`.
pub fn falling_factorial(x: f64, t: u64) -> f64 {
    (0..t).map(|i| x - i as f64).product()
}

fn rising_over_factorial(x: f64, k: u64) -> f64 {
    (0..k).map(|i| (x + i as f64) / (i + 1) as f64).product()
}

/// `binom(x, t) = (x)_t / t!` for real `x`.
pub fn generalized_binomial(x: f64, t: u64) -> f64 {
    (0..t).map(|i| (x - i as f64) / (i + 1) as f64).product()
}

/// Natural log of `binom(x, t)`. `Some(-inf)` when the value is zero and
/// `None` when it is negative.
pub fn ln_generalized_binomial(x: f64, t: u64) -> Option<f64> {
    let mut acc = 0.0;
    let mut negative = false;
    for i in 0..t {
        let factor = x - i as f64;
        if factor == 0.0 {
            return Some(f64::NEG_INFINITY);
        }
        negative ^= factor < 0.0;
        acc += factor.abs().ln();
    }
    if negative {
        None
    } else {
        Some(acc - ln_factorial(t))
    }
}

/// Closed form of the periodic generating function:
/// `t! sum_i binom(a + i - 1, i) binom(s + t - d i - 1, t - d i)` with
/// `a = (q - s) / d`.
pub fn periodic_closed_form(t: usize, d: usize, q: u64, s: u64) -> f64 {
    let a = (q as f64 - s as f64) / d as f64;
    let sum: f64 = (0..=t / d)
        .map(|i| {
            rising_over_factorial(a, i as u64)
                * rising_over_factorial(s as f64, (t - d * i) as u64)
        })
        .sum();
    crate::bigmath::to_f64_saturating(&factorial(t)) * sum
}

/// Upper bound `t! binom(s + t + (q - s)/d - 1, t)`.
pub fn periodic_bound(t: usize, d: usize, q: u64, s: u64) -> f64 {
    let x = s as f64 + t as f64 + (q as f64 - s as f64) / d as f64 - 1.0;
    crate::bigmath::to_f64_saturating(&factorial(t)) * generalized_binomial(x, t as u64)
}

/// `M = max{Phi + t - 1, (n + Phi)/2, (n - Phi)/3 + Phi + t - 1}`.
pub fn li_wan_m(n: usize, t: usize, phi: f64) -> f64 {
    let n = n as f64;
    let t = t as f64;
    (phi + t - 1.0)
        .max((n + phi) / 2.0)
        .max((n - phi) / 3.0 + phi + t - 1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LiWanReport {
    pub target: String,
    pub t: usize,
    /// Exact `N(t, B, P)`.
    #[serde(serialize_with = "serialize_biguint")]
    pub count: BigUint,
    /// `binom(n, t) / N`.
    pub main_term: f64,
    pub deviation: f64,
    pub phi: f64,
    pub m_value: f64,
    /// `binom(M, t)`.
    pub bound: f64,
    pub holds: bool,
}

pub(crate) fn serialize_biguint<S: serde::Serializer>(
    x: &BigUint,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

fn li_wan_report(
    group: &AbelianGroup,
    n: usize,
    t: usize,
    target: &GroupElement,
    count: &BigUint,
    phi: f64,
) -> LiWanReport {
    let order = BigUint::from(group.order());
    let total = binomial(n as u64, t as u64);
    let scaled = count * &order;
    let dev_num = if scaled >= total {
        &scaled - &total
    } else {
        &total - &scaled
    };
    let m_value = li_wan_m(n, t, phi);
    let ln_bound = ln_generalized_binomial(m_value, t as u64).unwrap_or(f64::NEG_INFINITY);
    let ln_dev = ln_biguint(&dev_num) - ln_biguint(&order);
    let holds = dev_num.is_zero() || ln_dev <= ln_bound + 1e-9;
    LiWanReport {
        target: target.to_string(),
        t,
        count: count.clone(),
        main_term: crate::bigmath::ratio_biguint(&total, &order),
        deviation: ln_dev.exp(),
        phi,
        m_value,
        bound: ln_bound.exp(),
        holds,
    }
}

/// Checks `|N(t, B, P) - binom(n, t)/N| <= binom(M, t)` for one target.
pub fn li_wan_bound_check(
    group: &AbelianGroup,
    set: &PointSet,
    t: usize,
    target: &GroupElement,
) -> Result<LiWanReport> {
    let phi = amplitude(group, set)?;
    let count = subset_sum_count(group, set, t, target)?;
    Ok(li_wan_report(group, set.len(), t, target, &count, phi))
}

/// The same check for every target `B`, sharing one table and one
/// amplitude computation.
pub fn li_wan_check_all(
    group: &AbelianGroup,
    set: &PointSet,
    t: usize,
) -> Result<Vec<LiWanReport>> {
    let phi = amplitude(group, set)?;
    let table = SubsetSumTable::build(group, set, t)?;
    Ok(group
        .elements()
        .map(|b| {
            let count = table.count(t, &b);
            li_wan_report(group, set.len(), t, &b, &count, phi)
        })
        .collect())
}

/// Both sides of the sieve identity for `f(x) = prod chi(x_i)` over
/// distinct-coordinate tuples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SieveEval {
    pub direct: Complex64,
    pub sieved: Complex64,
}

pub const SIEVE_MAX_T: usize = 10;
pub const SIEVE_MAX_N: usize = 14;

/// `direct` is `t!` times the sum of `prod chi(a)` over the `t`-subsets of
/// `P` (each subset accounts for its `t!` orderings); `sieved` is
/// `sum_c sign(c) N(c) prod_i s_{chi^i}(P)^{c_i}`.
pub fn sieve_identity_eval(
    group: &AbelianGroup,
    set: &PointSet,
    t: usize,
    chi: &Character,
) -> Result<SieveEval> {
    if t > SIEVE_MAX_T || set.len() > SIEVE_MAX_N {
        return Err(Error::InstanceTooLarge(format!(
            "sieve evaluation needs t <= {SIEVE_MAX_T} and n <= {SIEVE_MAX_N}"
        )));
    }
    let values: Vec<Complex64> = set
        .elements()
        .iter()
        .map(|a| group.eval_character(chi, a))
        .collect();

    fn subsets(values: &[Complex64], start: usize, left: usize, acc: Complex64) -> Complex64 {
        if left == 0 {
            return acc;
        }
        let mut total = Complex64::new(0.0, 0.0);
        for i in start..=values.len() - left {
            total += subsets(values, i + 1, left - 1, acc * values[i]);
        }
        total
    }
    let direct = if t > values.len() {
        Complex64::new(0.0, 0.0)
    } else {
        subsets(&values, 0, t, Complex64::new(1.0, 0.0))
            * factorial(t).to_f64().expect("t <= 10")
    };

    let power_sums: Vec<Complex64> = (1..=t as u64)
        .map(|i| char_sum(group, &chi.pow(group, i), set))
        .collect();
    let sieved = cycle_types(t)
        .iter()
        .map(|ty| {
            let weight = cycle_type_count(ty, t)
                .expect("type of size t")
                .to_f64()
                .expect("t <= 10")
                * ty.sign() as f64;
            ty.counts()
                .iter()
                .zip(&power_sums)
                .fold(Complex64::new(weight, 0.0), |acc, (&c, s)| {
                    acc * s.powu(c as u32)
                })
        })
        .fold(Complex64::new(0.0, 0.0), |acc, z| acc + z);
    Ok(SieveEval { direct, sieved })
}
