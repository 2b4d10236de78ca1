//! Gray-zone proportion measurements, the matching theoretical bounds, and
//! seeded parameter sweeps.
//!
//! A proportion is always taken over `t`-subsets `A` of the players, counting
//! those whose complement is qualified.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use num_bigint::BigUint;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bigmath::{binomial, ln_biguint, ratio_biguint};
use crate::curve::{Curve, CurveSpec, GroupTable, Point};
use crate::error::{Error, Result};
use crate::group::{
    amplitude, char_sum, li_wan_m, ln_generalized_binomial, serialize_biguint, Character,
    PointSet, SubsetSumTable,
};
use crate::scheme::{Oracle, Scheme};

/// Samples per Monte Carlo chunk; each chunk owns one PRNG stream.
pub const MC_CHUNK: u64 = 1024;
pub const MC_SAMPLE_LIMIT: u64 = 100_000_000;
pub const PRNG_NAME: &str = "chacha8";
pub const WILSON_Z: f64 = 1.96;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Exhaustive,
    MonteCarlo,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "exact" => Ok(Mode::Exact),
            "exhaustive" => Ok(Mode::Exhaustive),
            "montecarlo" => Ok(Mode::MonteCarlo),
            other => Err(Error::Parse(format!("unknown mode {other:?}"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Exact => "exact",
            Mode::Exhaustive => "exhaustive",
            Mode::MonteCarlo => "montecarlo",
        })
    }
}

/// Curve family searched per field size when no explicit curve is given.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// First `b >= 1` with `y^2 = x^3 + x + b` nonsingular.
    Elliptic,
    /// First `a >= 1` with `y^2 = x^5 + x + a` squarefree.
    Genus2,
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "ec" | "elliptic" => Ok(Family::Elliptic),
            "hyp2" | "genus2" => Ok(Family::Genus2),
            other => Err(Error::Parse(format!("unknown curve family {other:?}"))),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Elliptic => "ec",
            Family::Genus2 => "hyp2",
        })
    }
}

impl Family {
    pub fn genus(self) -> usize {
        match self {
            Family::Elliptic => 1,
            Family::Genus2 => 2,
        }
    }
}

pub fn select_curve(family: Family, q: u64) -> Result<Curve> {
    let field = crate::field::PrimeField::new(q)?;
    for c in 1..q as i64 {
        let built = match family {
            Family::Elliptic => Curve::elliptic(field, field.element(1), field.element(c)),
            Family::Genus2 => {
                let f = [c, 1, 0, 0, 0, 1].map(|v| field.element(v)).to_vec();
                Curve::hyperelliptic(field, f)
            }
        };
        match built {
            Ok(curve) => return Ok(curve),
            Err(Error::SingularCurve) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::SingularCurve)
}

/// `round(delta * n)` with halves rounded down.
pub fn degree_for(n: usize, delta: f64) -> usize {
    (delta * n as f64 - 0.5).ceil().max(0.0) as usize
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub family: Family,
    pub q_list: Vec<u64>,
    /// Overrides the family search; the q-list is then ignored.
    pub curve: Option<CurveSpec>,
    pub delta: f64,
    /// Values of `m - t`.
    pub offsets: Vec<usize>,
    pub mode: Mode,
    pub samples: u64,
    pub oracle: Oracle,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            family: Family::Elliptic,
            q_list: Vec::new(),
            curve: None,
            delta: 0.5,
            offsets: vec![0, 1],
            mode: Mode::Exact,
            samples: 10_000,
            oracle: Oracle::Kernel,
        }
    }
}

impl ExperimentConfig {
    pub fn genus(&self) -> usize {
        match &self.curve {
            Some(CurveSpec::Elliptic { .. }) => 1,
            Some(CurveSpec::Hyperelliptic { f, .. }) => f.len().saturating_sub(2) / 2,
            None => self.family.genus(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta < 2.0 / 3.0) {
            return Err(Error::Config(format!(
                "delta must lie in (0, 2/3), got {}",
                self.delta
            )));
        }
        if self.samples == 0 {
            return Err(Error::Config("samples must be positive".into()));
        }
        if self.mode == Mode::MonteCarlo && self.samples > MC_SAMPLE_LIMIT {
            return Err(Error::BudgetExceeded(format!(
                "{} samples exceeds the limit of {MC_SAMPLE_LIMIT}",
                self.samples
            )));
        }
        let g = self.genus();
        if let Some(&bad) = self.offsets.iter().find(|&&d| d >= 2 * g) {
            return Err(Error::UnsupportedOffset(bad));
        }
        if self.mode == Mode::Exact && g != 1 {
            return Err(Error::WrongGenus(g));
        }
        if self.oracle == Oracle::Clx && g != 1 && self.mode != Mode::Exact {
            return Err(Error::WrongGenus(g));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProportionEstimate {
    #[serde(serialize_with = "serialize_biguint")]
    pub qualified: BigUint,
    #[serde(serialize_with = "serialize_biguint")]
    pub denominator: BigUint,
    pub p_hat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub exact: bool,
}

impl ProportionEstimate {
    pub fn exact(qualified: BigUint, denominator: BigUint) -> Self {
        let p_hat = ratio_biguint(&qualified, &denominator);
        Self {
            qualified,
            denominator,
            p_hat,
            ci_lo: p_hat,
            ci_hi: p_hat,
            exact: true,
        }
    }

    pub fn sampled(qualified: u64, samples: u64) -> Self {
        let (ci_lo, ci_hi) = wilson_interval(qualified, samples, WILSON_Z);
        Self {
            qualified: qualified.into(),
            denominator: samples.into(),
            p_hat: qualified as f64 / samples as f64,
            ci_lo,
            ci_hi,
            exact: false,
        }
    }
}

/// Wilson score interval for `k` successes in `n` trials.
pub fn wilson_interval(k: u64, n: u64, z: f64) -> (f64, f64) {
    let n = n as f64;
    let p = k as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0).min(p), (center + half).min(1.0).max(p))
}

/// Exact proportion at `t in {m - 1, m}` on an elliptic scheme from the
/// subset-sum table over the dlog images of the players: at `t = m` the
/// qualified `A` are those summing to `O`, at `t = m - 1` those not summing
/// to `-P_0`.
pub fn exact_proportion_elliptic(scheme: &Scheme, t: usize) -> Result<ProportionEstimate> {
    if !scheme.curve().is_elliptic() {
        return Err(Error::WrongGenus(scheme.genus()));
    }
    let m = scheme.m();
    if t != m && t + 1 != m {
        return Err(Error::UnsupportedOffset(m.abs_diff(t)));
    }
    let table = scheme.group_table()?;
    let group = table.group();
    let target = if t == m {
        group.identity()
    } else {
        let neg_p0 = scheme.curve().ec_neg(scheme.p0())?;
        table.element(&neg_p0).expect("curve point has a dlog")
    };
    let set = player_set(scheme, table)?;
    let dp = SubsetSumTable::build(&group, &set, t)?;
    let count = dp.count(t, &target);
    let total = binomial(scheme.n() as u64, t as u64);
    let qualified = if t == m { count } else { &total - count };
    Ok(ProportionEstimate::exact(qualified, total))
}

fn player_set(scheme: &Scheme, table: &GroupTable) -> Result<PointSet> {
    let elements = scheme
        .players()
        .iter()
        .map(|p| table.element(p).ok_or(Error::PointNotOnCurve))
        .collect::<Result<Vec<_>>>()?;
    PointSet::new(&table.group(), elements)
}

/// Exhaustive proportion through `enumerate_access`.
pub fn exhaustive_proportion(scheme: &Scheme, t: usize, oracle: Oracle) -> Result<ProportionEstimate> {
    let counts = scheme.enumerate_access(t, oracle)?;
    Ok(ProportionEstimate::exact(
        counts.qualified.into(),
        counts.total.into(),
    ))
}

/// Calls `f` on `size` uniform `t`-subsets of `0..n` (sorted), drawn by
/// partial Fisher-Yates from stream `chunk` of a ChaCha8 generator seeded
/// with `seed`.
pub fn sample_chunk(
    n: usize,
    t: usize,
    seed: u64,
    chunk: u64,
    size: u64,
    mut f: impl FnMut(&[usize]) -> Result<()>,
) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    let mut pool: Vec<usize> = (0..n).collect();
    let mut picked = Vec::with_capacity(t);
    for _ in 0..size {
        for i in 0..t {
            let j = rng.gen_range(i..n);
            pool.swap(i, j);
        }
        picked.clear();
        picked.extend_from_slice(&pool[..t]);
        picked.sort_unstable();
        f(&picked)?;
    }
    Ok(())
}

fn chunk_sizes(samples: u64) -> impl Iterator<Item = (u64, u64)> {
    let chunks = samples.div_ceil(MC_CHUNK);
    (0..chunks).map(move |c| (c, MC_CHUNK.min(samples - c * MC_CHUNK)))
}

/// Monte Carlo proportion on `workers` threads. Chunks are seeded by
/// `(seed, chunk index)`, so the estimate does not depend on the worker
/// count.
pub fn mc_proportion(
    scheme: &Scheme,
    t: usize,
    samples: u64,
    seed: u64,
    oracle: Oracle,
    workers: usize,
) -> Result<ProportionEstimate> {
    if samples == 0 {
        return Err(Error::Config("samples must be positive".into()));
    }
    if samples > MC_SAMPLE_LIMIT {
        return Err(Error::BudgetExceeded(format!(
            "{samples} samples exceeds the limit of {MC_SAMPLE_LIMIT}"
        )));
    }
    if t > scheme.n() {
        return Err(Error::DimensionMismatch(format!(
            "cannot remove {t} of {} players",
            scheme.n()
        )));
    }
    if oracle == Oracle::Clx && !scheme.curve().is_elliptic() {
        return Err(Error::WrongGenus(scheme.genus()));
    }
    let run_chunk = |&(chunk, size): &(u64, u64)| -> Result<u64> {
        let mut hits = 0u64;
        sample_chunk(scheme.n(), t, seed, chunk, size, |removed| {
            if scheme.qualified_removed(oracle, removed)? {
                hits += 1;
            }
            Ok(())
        })?;
        Ok(hits)
    };
    let chunks: Vec<(u64, u64)> = chunk_sizes(samples).collect();
    let counts: Vec<Result<u64>> = if workers <= 1 {
        chunks.iter().map(run_chunk).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
        pool.install(|| chunks.par_iter().map(run_chunk).collect())
    };
    let mut qualified = 0u64;
    for c in counts {
        qualified += c?;
    }
    Ok(ProportionEstimate::sampled(qualified, samples))
}

/// Agreement of two oracles on the same sampled subsets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PairedComparison {
    pub samples: u64,
    pub disagreements: u64,
    pub qualified_first: u64,
}

pub fn mc_paired(
    scheme: &Scheme,
    t: usize,
    samples: u64,
    seed: u64,
    first: Oracle,
    second: Oracle,
) -> Result<PairedComparison> {
    let mut out = PairedComparison {
        samples,
        disagreements: 0,
        qualified_first: 0,
    };
    for (chunk, size) in chunk_sizes(samples) {
        sample_chunk(scheme.n(), t, seed, chunk, size, |removed| {
            let a = scheme.qualified_removed(first, removed)?;
            let b = scheme.qualified_removed(second, removed)?;
            out.qualified_first += a as u64;
            out.disagreements += (a != b) as u64;
            Ok(())
        })?;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    /// Group order; `None` where only its Weil window is used.
    pub n_group: Option<u64>,
    pub phi: f64,
    pub m_value: f64,
    /// `M / n`.
    pub delta_prime: f64,
    pub main_term: f64,
    pub error_term: f64,
    pub total: f64,
    /// `[(sqrt q - 1)^{2g}, (sqrt q + 1)^{2g}]`.
    pub h_window: Option<(f64, f64)>,
    /// Upper bound on `|W_d|` with `d = m - t`.
    pub w_bound: Option<f64>,
    /// `prod_{i<t} (M - i)/(n - i)`.
    pub star_term: Option<f64>,
}

fn ln_binomial_ratio(m_value: f64, n: usize, t: usize) -> f64 {
    let ln_top = ln_generalized_binomial(m_value, t as u64).unwrap_or(f64::NEG_INFINITY);
    ln_top - ln_biguint(&binomial(n as u64, t as u64))
}

/// `1/N + binom(M, t)/binom(n, t)` with `M` from the sieve bound.
pub fn bound_theorem3(n: usize, t: usize, n_group: u64, phi: f64) -> BoundReport {
    let m_value = li_wan_m(n, t, phi);
    let main_term = 1.0 / n_group as f64;
    let error_term = ln_binomial_ratio(m_value, n, t).exp();
    BoundReport {
        n_group: Some(n_group),
        phi,
        m_value,
        delta_prime: m_value / n as f64,
        main_term,
        error_term,
        total: main_term + error_term,
        h_window: None,
        w_bound: None,
        star_term: None,
    }
}

/// Upper bound on the regime-I proportion (`0 <= m - t < g`) on a genus-`g`
/// curve over `F_q` with `c = |C(F_q)| - n`.
pub fn bound_theorem4(q: u64, g: usize, n: usize, t: usize, m: usize, c: u64) -> Result<BoundReport> {
    let d = m.checked_sub(t).ok_or_else(|| Error::UnsupportedOffset(t - m))?;
    if d >= g {
        return Err(Error::RegimeMismatch { offset: d, genus: g });
    }
    let qf = q as f64;
    let sq = qf.sqrt();
    let gf = g as f64;
    let phi = (2.0 * gf - 2.0) * sq + c as f64;
    let m_value = li_wan_m(n, t, phi);
    let factor = 2.0 * gf * sq / (sq - 1.0) - qf / (qf - 1.0);
    let ln_q_pow = -((g - d) as f64) * qf.ln();
    let h_hi = (sq + 1.0).powf(2.0 * gf);
    let h_lo = (sq - 1.0).powf(2.0 * gf);
    let ln_star = ln_binomial_ratio(m_value, n, t);
    let main_term = (ln_q_pow + factor.ln()).exp();
    let error_term = (2.0 * gf * (sq + 1.0).ln() + ln_q_pow + factor.ln() + ln_star).exp();
    Ok(BoundReport {
        n_group: None,
        phi,
        m_value,
        delta_prime: m_value / n as f64,
        main_term,
        error_term,
        total: main_term + error_term,
        h_window: Some((h_lo, h_hi)),
        w_bound: Some((h_hi.ln() + ln_q_pow).exp()),
        star_term: Some(ln_star.exp()),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HasseReport {
    pub q: u64,
    pub genus: usize,
    pub points: usize,
    pub window: (f64, f64),
    pub count_ok: bool,
    /// `(√q-1)^2 <= #E <= (√q+1)^2`, genus 1 only.
    pub jacobian_window: Option<(f64, f64)>,
    pub jacobian_ok: Option<bool>,
}

impl HasseReport {
    pub fn passed(&self) -> bool {
        self.count_ok && self.jacobian_ok.unwrap_or(true)
    }
}

const BOUND_SLACK: f64 = 1e-9;

pub fn hasse_checks(curve: &Curve, table: Option<&GroupTable>) -> HasseReport {
    let q = curve.field().characteristic();
    let g = curve.genus();
    let sq = (q as f64).sqrt();
    let points = curve.point_count();
    let spread = 2.0 * g as f64 * sq;
    let window = (q as f64 + 1.0 - spread, q as f64 + 1.0 + spread);
    let inside = |x: f64, (lo, hi): (f64, f64)| x >= lo - BOUND_SLACK && x <= hi + BOUND_SLACK;
    let count_ok = inside(points as f64, window);
    let (jacobian_window, jacobian_ok) = if g == 1 {
        let h = table.map_or(points as u64, GroupTable::order) as f64;
        let w = ((sq - 1.0).powi(2), (sq + 1.0).powi(2));
        (Some(w), Some(inside(h, w)))
    } else {
        (None, None)
    };
    HasseReport {
        q,
        genus: g,
        points,
        window,
        count_ok,
        jacobian_window,
        jacobian_ok,
    }
}

/// `sum_{P in points} chi(P - O)` through the dlog table.
pub fn curve_char_sum(
    table: &GroupTable,
    chi: &Character,
    points: &[Point],
) -> Result<Complex64> {
    if chi.is_trivial() {
        return Err(Error::TrivialCharacter);
    }
    let group = table.group();
    let elements = points
        .iter()
        .map(|p| table.element(p).ok_or(Error::PointNotOnCurve))
        .collect::<Result<Vec<_>>>()?;
    let set = PointSet::new(&group, elements)?;
    Ok(char_sum(&group, chi, &set))
}

/// Seed of one sweep row, mixed from the run seed and the row coordinates.
pub fn row_seed(seed: u64, q: u64, genus: usize, offset: usize) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
    mix(mix(mix(seed ^ q) ^ genus as u64) ^ offset as u64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub q: u64,
    pub curve: String,
    pub g: usize,
    pub n: usize,
    pub m: usize,
    pub t: usize,
    pub offset: usize,
    pub mode: Mode,
    pub oracle: Oracle,
    #[serde(serialize_with = "serialize_biguint")]
    pub samples: BigUint,
    #[serde(serialize_with = "serialize_biguint")]
    pub qualified: BigUint,
    pub p_hat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    /// Upper bound for rows expected to vanish, lower bound for rows
    /// expected to approach 1, `None` where no bound applies.
    pub bound: Option<f64>,
}

pub const CSV_HEADER: [&str; 15] = [
    "q", "curve", "g", "n", "m", "t", "offset", "mode", "oracle", "samples", "qualified", "p_hat",
    "ci_lo", "ci_hi", "bound",
];

impl SweepRow {
    fn record(&self) -> Vec<String> {
        vec![
            self.q.to_string(),
            self.curve.clone(),
            self.g.to_string(),
            self.n.to_string(),
            self.m.to_string(),
            self.t.to_string(),
            self.offset.to_string(),
            self.mode.to_string(),
            self.oracle.to_string(),
            self.samples.to_string(),
            self.qualified.to_string(),
            format!("{:.9}", self.p_hat),
            format!("{:.9}", self.ci_lo),
            format!("{:.9}", self.ci_hi),
            self.bound.map_or_else(|| "NA".to_string(), |b| format!("{b:.6e}")),
        ]
    }
}

/// One scheme of a sweep: the curve, its standard player set, and `m`.
pub fn sweep_schemes(config: &ExperimentConfig) -> Result<Vec<Scheme>> {
    let curves = match &config.curve {
        Some(spec) => vec![Curve::from_spec(spec)?],
        None => config
            .q_list
            .iter()
            .map(|&q| select_curve(config.family, q))
            .collect::<Result<Vec<_>>>()?,
    };
    curves
        .into_iter()
        .map(|curve| {
            let n = curve.affine_points().len().saturating_sub(1);
            Scheme::standard(curve, degree_for(n, config.delta))
        })
        .collect()
}

fn row_bound(scheme: &Scheme, t: usize, offset: usize) -> Result<Option<f64>> {
    let g = scheme.genus();
    let n = scheme.n();
    let c = (scheme.curve().point_count() - n) as u64;
    if g == 1 {
        let table = scheme.group_table()?;
        let phi = amplitude(&table.group(), &player_set(scheme, table)?)?;
        let report = bound_theorem3(n, t, table.order(), phi);
        return Ok(Some(if offset == 0 {
            report.total
        } else {
            1.0 - report.total
        }));
    }
    if offset < g {
        let q = scheme.field().characteristic();
        return Ok(Some(bound_theorem4(q, g, n, t, scheme.m(), c)?.total));
    }
    Ok(None)
}

/// Runs every `(curve, offset)` cell of the configuration.
pub fn sweep(config: &ExperimentConfig, seed: u64, workers: usize) -> Result<Vec<SweepRow>> {
    config.validate()?;
    let mut rows = Vec::new();
    for scheme in sweep_schemes(config)? {
        let q = scheme.field().characteristic();
        let g = scheme.genus();
        for &offset in &config.offsets {
            if offset >= 2 * g {
                return Err(Error::UnsupportedOffset(offset));
            }
            let t = scheme
                .m()
                .checked_sub(offset)
                .ok_or(Error::UnsupportedOffset(offset))?;
            let (estimate, oracle) = match config.mode {
                Mode::Exact => (exact_proportion_elliptic(&scheme, t)?, Oracle::Clx),
                Mode::Exhaustive => (exhaustive_proportion(&scheme, t, config.oracle)?, config.oracle),
                Mode::MonteCarlo => (
                    mc_proportion(
                        &scheme,
                        t,
                        config.samples,
                        row_seed(seed, q, g, offset),
                        config.oracle,
                        workers,
                    )?,
                    config.oracle,
                ),
            };
            rows.push(SweepRow {
                q,
                curve: scheme.curve().spec().to_string(),
                g,
                n: scheme.n(),
                m: scheme.m(),
                t,
                offset,
                mode: config.mode,
                oracle,
                samples: estimate.denominator.clone(),
                qualified: estimate.qualified.clone(),
                p_hat: estimate.p_hat,
                ci_lo: estimate.ci_lo,
                ci_hi: estimate.ci_hi,
                bound: row_bound(&scheme, t, offset)?,
            });
        }
    }
    Ok(rows)
}

pub fn csv_metadata(seed: u64) -> String {
    format!(
        "# seed={seed} prng={PRNG_NAME} version={}",
        env!("CARGO_PKG_VERSION")
    )
}

pub fn write_csv<W: Write>(out: W, seed: u64, rows: &[SweepRow]) -> Result<()> {
    let mut out = out;
    writeln!(out, "{}", csv_metadata(seed)).map_err(|e| Error::Config(e.to_string()))?;
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Config(e.to_string());
    w.write_record(CSV_HEADER).map_err(io)?;
    for row in rows {
        w.write_record(row.record()).map_err(io)?;
    }
    w.flush().map_err(|e| Error::Config(e.to_string()))?;
    Ok(())
}

pub fn to_csv_string(seed: u64, rows: &[SweepRow]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(&mut buf, seed, rows)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::AbelianGroup;

    fn e13(m: usize) -> Scheme {
        Scheme::standard(Curve::parse("ec:p=13,a=1,b=1").unwrap(), m).unwrap()
    }

    #[test]
    fn rounding_goes_down_on_ties() {
        assert_eq!(degree_for(99, 0.5), 49);
        assert_eq!(degree_for(100, 0.5), 50);
        assert_eq!(degree_for(101, 0.5), 50);
        assert_eq!(degree_for(10, 0.35), 3);
    }

    #[test]
    fn wilson_examples() {
        let (lo, hi) = wilson_interval(0, 100, WILSON_Z);
        assert_eq!(lo, 0.0);
        assert!((hi - 0.036_995).abs() < 1e-5);
        let (lo, hi) = wilson_interval(50, 100, WILSON_Z);
        assert!((lo - 0.403_832).abs() < 1e-5 && (hi - 0.596_168).abs() < 1e-5);
        let (lo, hi) = wilson_interval(100, 100, WILSON_Z);
        assert_eq!(hi, 1.0);
        assert!(lo < 1.0);
    }

    #[test]
    fn exact_matches_enumeration() {
        for m in [3, 5, 7] {
            let s = e13(m);
            for t in [m - 1, m] {
                let exact = exact_proportion_elliptic(&s, t).unwrap();
                let brute = exhaustive_proportion(&s, t, Oracle::Kernel).unwrap();
                assert_eq!(exact.qualified, brute.qualified, "m={m} t={t}");
                assert_eq!(exact.denominator, brute.denominator);
                assert_eq!(exact.ci_lo, exact.p_hat);
            }
        }
        assert_eq!(
            exact_proportion_elliptic(&e13(5), 2),
            Err(Error::UnsupportedOffset(3))
        );
        let h = Scheme::standard(Curve::parse("hyp:p=13,f=1,1,0,0,0,1").unwrap(), 4).unwrap();
        assert_eq!(exact_proportion_elliptic(&h, 4), Err(Error::WrongGenus(2)));
    }

    #[test]
    fn monte_carlo_contracts() {
        let s = e13(5);
        let a = mc_proportion(&s, 5, 3000, 7, Oracle::Kernel, 1).unwrap();
        let b = mc_proportion(&s, 5, 3000, 7, Oracle::Kernel, 3).unwrap();
        assert_eq!(a, b);
        assert!(a.ci_lo <= a.p_hat && a.p_hat <= a.ci_hi);
        let over = mc_proportion(&s, 6, 500, 1, Oracle::Dual, 1).unwrap();
        assert_eq!(over.p_hat, 0.0);
        let paired = mc_paired(&s, 4, 2000, 3, Oracle::Kernel, Oracle::Dual).unwrap();
        assert_eq!(paired.disagreements, 0);
        let paired = mc_paired(&s, 5, 2000, 3, Oracle::Kernel, Oracle::Clx).unwrap();
        assert_eq!(paired.disagreements, 0);
        assert_eq!(
            mc_proportion(&s, 5, 0, 1, Oracle::Kernel, 1).unwrap_err(),
            Error::Config("samples must be positive".into())
        );
    }

    #[test]
    fn sampling_is_uniform_enough() {
        // Every 2-subset of 0..5 should appear about 1/10 of the time.
        let mut hist = std::collections::HashMap::new();
        sample_chunk(5, 2, 11, 0, 20_000, |a| {
            *hist.entry(a.to_vec()).or_insert(0u32) += 1;
            Ok(())
        })
        .unwrap();
        assert_eq!(hist.len(), 10);
        assert!(hist.values().all(|&c| (1700..2300).contains(&c)));
    }

    #[test]
    fn theorem3_bound_examples() {
        let r = bound_theorem3(10, 1, 7, 0.0);
        assert_eq!(r.m_value, 5.0);
        assert!((r.total - (1.0 / 7.0 + 0.5)).abs() < 1e-12);
        let mut last = f64::INFINITY;
        for n_group in [5, 10, 50, 100] {
            let b = bound_theorem3(40, 10, n_group, 2.0).total;
            assert!(b <= last);
            last = b;
        }
        for m in [3, 5, 7] {
            let s = e13(m);
            let table = s.group_table().unwrap();
            let phi = amplitude(&table.group(), &player_set(&s, table).unwrap()).unwrap();
            let p = exact_proportion_elliptic(&s, m).unwrap().p_hat;
            assert!(p <= bound_theorem3(s.n(), m, table.order(), phi).total);
        }
    }

    #[test]
    fn theorem4_bound_examples() {
        let q = 101u64;
        let sq = (q as f64).sqrt();
        let r = bound_theorem4(q, 1, 98, 49, 49, 2).unwrap();
        let expected = (2.0 * sq / (sq - 1.0) - q as f64 / (q as f64 - 1.0)) / q as f64;
        assert!((r.main_term - expected).abs() < 1e-12);
        assert_eq!(
            bound_theorem4(q, 2, 100, 48, 50, 2),
            Err(Error::RegimeMismatch { offset: 2, genus: 2 })
        );
        let a = bound_theorem4(101, 2, 100, 50, 50, 2).unwrap();
        let b = bound_theorem4(401, 2, 400, 200, 200, 2).unwrap();
        assert!(b.total < a.total);
        assert!(a.main_term >= 0.0 && a.error_term >= 0.0);
        let (lo, hi) = a.h_window.unwrap();
        assert!(lo < hi);
    }

    #[test]
    fn hasse_examples() {
        let e5 = Curve::parse("ec:p=5,a=1,b=1").unwrap();
        let r = hasse_checks(&e5, None);
        assert_eq!(r.points, 9);
        assert!(r.passed());
        let h = Curve::parse("hyp:p=11,f=1,0,0,0,0,1").unwrap();
        let r = hasse_checks(&h, None);
        assert!(r.passed());
        assert!((r.window.0 - (12.0 - 4.0 * 11f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn character_sums_on_curves() {
        let curve = Curve::parse("ec:p=13,a=1,b=1").unwrap();
        let table = curve.group_structure().unwrap();
        let group: AbelianGroup = table.group();
        let all = curve.points();
        let players = &all[2..];
        for chi in group.characters().filter(|c| !c.is_trivial()) {
            assert!(curve_char_sum(&table, &chi, &all).unwrap().norm() < 1e-6);
            assert!(curve_char_sum(&table, &chi, players).unwrap().norm() <= 2.0 + 1e-6);
        }
        assert_eq!(
            curve_char_sum(&table, &group.trivial_character(), &all),
            Err(Error::TrivialCharacter)
        );
    }

    #[test]
    fn curve_search_is_deterministic() {
        assert_eq!(
            select_curve(Family::Elliptic, 101).unwrap().spec().to_string(),
            "ec:p=101,a=1,b=1"
        );
        let h = select_curve(Family::Genus2, 11).unwrap();
        assert_eq!(h.genus(), 2);
    }

    #[test]
    fn sweep_rows_and_determinism() {
        let config = ExperimentConfig {
            q_list: vec![13, 17],
            ..ExperimentConfig::default()
        };
        let rows = sweep(&config, 1, 1).unwrap();
        assert_eq!(rows.len(), 4);
        for row in &rows {
            let scheme = Scheme::standard(Curve::parse(&row.curve).unwrap(), row.m).unwrap();
            assert_eq!(exact_proportion_elliptic(&scheme, row.t).unwrap().p_hat, row.p_hat);
        }
        let mc = ExperimentConfig {
            mode: Mode::MonteCarlo,
            samples: 1500,
            ..config.clone()
        };
        let one = to_csv_string(9, &sweep(&mc, 9, 1).unwrap()).unwrap();
        let four = to_csv_string(9, &sweep(&mc, 9, 4).unwrap()).unwrap();
        assert_eq!(one, four);
        assert!(one.starts_with("# seed=9 prng=chacha8 version="));
        let empty = ExperimentConfig::default();
        let csv = to_csv_string(0, &sweep(&empty, 0, 1).unwrap()).unwrap();
        assert_eq!(csv.lines().count(), 2);
        assert_eq!(csv.lines().nth(1).unwrap(), CSV_HEADER.join(","));
    }

    #[test]
    fn config_validation() {
        let bad = ExperimentConfig {
            delta: 0.7,
            ..ExperimentConfig::default()
        };
        assert!(matches!(bad.validate(), Err(Error::Config(_))));
        let bad = ExperimentConfig {
            offsets: vec![2],
            ..ExperimentConfig::default()
        };
        assert_eq!(bad.validate(), Err(Error::UnsupportedOffset(2)));
        let bad = ExperimentConfig {
            family: Family::Genus2,
            offsets: vec![0],
            ..ExperimentConfig::default()
        };
        assert_eq!(bad.validate(), Err(Error::WrongGenus(2)));
    }
}
