//! Secret sharing from the code pair `C_L(D, mQ)` / `C_Omega(D, mQ)`.
//!
//! Coordinate 0 is the secret position `P_0`; coordinates `1..=n` belong to
//! the players. `C_L` is generated by evaluating the monomial basis of
//! `L(mQ)` at `P_0, ..., P_n`; the share code `C_Omega` is its exact
//! nullspace. A dealt share vector is a random word of `C_Omega` whose
//! coordinate 0 equals the secret.
//!
//! Player subsets are 0-based, sorted index lists. An oracle receives the
//! candidate reconstructing set `S`; `A = players \ S` is the set of
//! players left out.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bigmath::binomial;
use crate::curve::{Curve, GroupTable, MonomialBasis, Point};
use crate::error::{Error, Result};
use crate::field::{Fp, Matrix, PrimeField, Reducer};

/// Largest subset family `enumerate_access` will walk.
pub const EXHAUSTIVE_LIMIT: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Oracle {
    /// Solve for `f in L(G - P_A)` with `f(P_0) != 0`.
    Kernel,
    /// Look for a `C_L` word with `v_0 = 1` supported on `{0} u S`.
    Dual,
    /// Group-sum rule on elliptic curves.
    Clx,
}

impl FromStr for Oracle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "kernel" => Ok(Oracle::Kernel),
            "dual" => Ok(Oracle::Dual),
            "clx" => Ok(Oracle::Clx),
            other => Err(Error::Parse(format!("unknown oracle {other:?}"))),
        }
    }
}

impl fmt::Display for Oracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Oracle::Kernel => "kernel",
            Oracle::Dual => "dual",
            Oracle::Clx => "clx",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Decision {
    Qualified,
    Unqualified,
}

/// Oracle output. For the kernel oracle the witness holds the coefficients
/// of `f` in the `L(mQ)` basis; for the dual oracle it is the `C_L` word
/// itself. The group-sum oracle gives no witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QualifiedVerdict {
    pub decision: Decision,
    pub witness: Option<Vec<Fp>>,
}

impl QualifiedVerdict {
    fn unqualified() -> Self {
        Self {
            decision: Decision::Unqualified,
            witness: None,
        }
    }

    pub fn is_qualified(&self) -> bool {
        self.decision == Decision::Qualified
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Privacy {
    ZeroInformation,
    DeterminesSecret,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShareVector {
    pub secret: Fp,
    pub shares: Vec<Fp>,
}

impl ShareVector {
    pub fn codeword(&self) -> Vec<Fp> {
        let mut c = Vec::with_capacity(self.shares.len() + 1);
        c.push(self.secret);
        c.extend_from_slice(&self.shares);
        c
    }

    /// `secret,s1,...,sn`.
    pub fn to_csv(&self) -> String {
        self.codeword()
            .iter()
            .map(|x| x.value().to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn from_csv(field: PrimeField, line: &str) -> Result<Self> {
        let values = line
            .trim()
            .split(',')
            .map(|v| {
                v.trim()
                    .parse::<i64>()
                    .map(|x| field.element(x))
                    .map_err(|_| Error::Parse(format!("bad share value {v:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let (secret, shares) = values
            .split_first()
            .ok_or_else(|| Error::Parse("empty share line".into()))?;
        Ok(Self {
            secret: *secret,
            shares: shares.to_vec(),
        })
    }
}

/// Parses comma-separated 1-based player indices into a sorted 0-based list.
pub fn parse_subset(s: &str, n: usize) -> Result<Vec<usize>> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    let mut out = s
        .split(',')
        .map(|v| {
            let i: usize = v
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad player index {v:?}")))?;
            if i == 0 || i > n {
                return Err(Error::BadPlayerIndex(i));
            }
            Ok(i - 1)
        })
        .collect::<Result<Vec<_>>>()?;
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

pub fn format_subset(subset: &[usize]) -> String {
    subset
        .iter()
        .map(|i| (i + 1).to_string())
        .collect::<Vec<_>>()
        .join(",")
}

#[derive(Debug)]
pub struct Scheme {
    curve: Curve,
    p0: Point,
    players: Vec<Point>,
    m: usize,
    basis: MonomialBasis,
    /// `l x (n+1)`; column `j` is the basis evaluated at `P_j`.
    gen_l: Matrix,
    /// Transpose of `gen_l`: row `j` is the basis evaluated at `P_j`.
    eval_rows: Matrix,
    /// Canonical nullspace basis of `gen_l`, one word per row.
    omega: Matrix,
    group: OnceLock<Result<GroupTable>>,
}

impl Scheme {
    pub fn build(curve: Curve, p0: Point, players: Vec<Point>, m: usize) -> Result<Self> {
        let n = players.len();
        let g = curve.genus();
        let lo = 2 * g as i64 - 2;
        if (m as i64) <= lo || m + 1 > n {
            return Err(Error::DegreeOutOfRange {
                m,
                lo,
                hi: n.saturating_sub(1),
            });
        }
        let mut all = Vec::with_capacity(n + 1);
        all.push(p0);
        all.extend_from_slice(&players);
        for pt in &all {
            if pt.is_infinity() {
                return Err(Error::EvalAtInfinity);
            }
            if !curve.contains(pt) {
                return Err(Error::PointNotOnCurve);
            }
        }
        let mut sorted = all.clone();
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::DuplicatePoint);
        }

        let basis = curve.rr_basis(m);
        let field = curve.field();
        let rows = all
            .iter()
            .map(|pt| curve.eval_basis(&basis, pt))
            .collect::<Result<Vec<_>>>()?;
        let eval_rows = Matrix::from_rows(field, &rows)?;
        let gen_l = eval_rows.transpose();
        debug_assert_eq!(gen_l.rank(), m + 1 - g);
        let kernel = gen_l.kernel();
        if kernel.iter().all(|w| w[0].is_zero()) {
            return Err(Error::SecretPositionDegenerate);
        }
        let omega = Matrix::from_rows(field, &kernel)?;
        Ok(Self {
            curve,
            p0,
            players,
            m,
            basis,
            gen_l,
            eval_rows,
            omega,
            group: OnceLock::new(),
        })
    }

    /// `P_0` is the lexicographically smallest affine point and every other
    /// affine point is a player.
    pub fn standard(curve: Curve, m: usize) -> Result<Self> {
        let mut affine = curve.affine_points();
        if affine.is_empty() {
            return Err(Error::DegreeOutOfRange { m, lo: 0, hi: 0 });
        }
        let p0 = affine.remove(0);
        Self::build(curve, p0, affine, m)
    }

    pub fn curve(&self) -> &Curve {
        &self.curve
    }

    pub fn field(&self) -> PrimeField {
        self.curve.field()
    }

    pub fn p0(&self) -> &Point {
        &self.p0
    }

    pub fn players(&self) -> &[Point] {
        &self.players
    }

    pub fn n(&self) -> usize {
        self.players.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn genus(&self) -> usize {
        self.curve.genus()
    }

    pub fn basis(&self) -> &MonomialBasis {
        &self.basis
    }

    pub fn generator(&self) -> &Matrix {
        &self.gen_l
    }

    pub fn share_code_basis(&self) -> &Matrix {
        &self.omega
    }

    pub fn dim_c_l(&self) -> usize {
        self.gen_l.rank()
    }

    pub fn dim_c_omega(&self) -> usize {
        self.omega.rows()
    }

    /// Group structure of `E(F_p)`, computed on first use.
    pub fn group_table(&self) -> Result<&GroupTable> {
        self.group
            .get_or_init(|| self.curve.group_structure())
            .as_ref()
            .map_err(Clone::clone)
    }

    fn check_subset(&self, subset: &[usize]) -> Result<()> {
        if let Some(&bad) = subset.iter().find(|&&i| i >= self.n()) {
            return Err(Error::BadPlayerIndex(bad + 1));
        }
        if subset.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Parse("subset must be sorted and duplicate-free".into()));
        }
        Ok(())
    }

    /// Players not in `subset`, in increasing order.
    pub fn complement(&self, subset: &[usize]) -> Vec<usize> {
        let mut mark = vec![false; self.n()];
        for &i in subset {
            mark[i] = true;
        }
        (0..self.n()).filter(|&i| !mark[i]).collect()
    }

    /// Deals `secret`, drawing the random part of the codeword from a
    /// ChaCha8 stream seeded with `seed`.
    pub fn share(&self, secret: Fp, seed: u64) -> Result<ShareVector> {
        let field = self.field();
        if secret.modulus() != field.characteristic() {
            return Err(Error::FieldMismatch {
                left: field.characteristic(),
                right: secret.modulus(),
            });
        }
        let words: Vec<Vec<Fp>> = (0..self.omega.rows()).map(|r| self.omega.row(r)).collect();
        let pivot = words
            .iter()
            .position(|w| !w[0].is_zero())
            .ok_or(Error::SecretPositionDegenerate)?;
        let pivot_word = &words[pivot];
        let scale = pivot_word[0].inv()?;
        let unit: Vec<Fp> = pivot_word.iter().map(|&x| x * scale).collect();

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut codeword: Vec<Fp> = unit.iter().map(|&x| x * secret).collect();
        for (r, w) in words.iter().enumerate() {
            if r == pivot {
                continue;
            }
            // w - w_0 * unit lies in the subcode with c_0 = 0.
            let coeff = field.from_residue(rng.gen_range(0..field.characteristic()));
            let w0 = w[0];
            for (slot, (&x, &u)) in codeword.iter_mut().zip(w.iter().zip(&unit)) {
                *slot += coeff * (x - w0 * u);
            }
        }
        debug_assert!(self.gen_l.mul_vec(&codeword).unwrap().iter().all(Fp::is_zero));
        Ok(ShareVector {
            secret: codeword[0],
            shares: codeword[1..].to_vec(),
        })
    }

    /// Recovers the secret from the shares of `subset` (given in subset
    /// order) using `f in L(G)` with `f(P_0) = 1` that vanishes on the
    /// players outside `subset`.
    pub fn reconstruct(&self, subset: &[usize], shares: &[Fp]) -> Result<Fp> {
        self.check_subset(subset)?;
        if shares.len() != subset.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} shares for {} players",
                shares.len(),
                subset.len()
            )));
        }
        let field = self.field();
        let removed = self.complement(subset);
        let mut rows = vec![0];
        rows.extend(removed.iter().map(|i| i + 1));
        let system = self.eval_rows.select_rows(&rows);
        let mut rhs = vec![field.zero(); rows.len()];
        rhs[0] = field.one();
        let coeffs = match system.solve(&rhs) {
            Ok(c) => c,
            Err(Error::NoSolution) => return Err(Error::NotQualified),
            Err(e) => return Err(e),
        };
        let values = self.eval_rows.mul_vec(&coeffs)?;
        let mut acc = field.zero();
        for (&i, &s) in subset.iter().zip(shares) {
            acc += values[i + 1] * s;
        }
        Ok(-acc)
    }

    pub fn is_qualified_kernel(&self, subset: &[usize]) -> Result<QualifiedVerdict> {
        self.check_subset(subset)?;
        let removed: Vec<usize> = self.complement(subset).iter().map(|i| i + 1).collect();
        let at_removed = self.eval_rows.select_rows(&removed);
        let at_p0 = self.eval_rows.row(0);
        let field = self.field();
        for v in at_removed.kernel() {
            let value = at_p0
                .iter()
                .zip(&v)
                .fold(field.zero(), |acc, (&a, &b)| acc + a * b);
            if !value.is_zero() {
                return Ok(QualifiedVerdict {
                    decision: Decision::Qualified,
                    witness: Some(v),
                });
            }
        }
        Ok(QualifiedVerdict::unqualified())
    }

    pub fn is_qualified_dual(&self, subset: &[usize]) -> Result<QualifiedVerdict> {
        self.check_subset(subset)?;
        let cols: Vec<usize> = subset.iter().map(|i| i + 1).collect();
        let restricted = self.omega.select_columns(&cols);
        let rhs: Vec<Fp> = self.omega.column(0).into_iter().map(|x| -x).collect();
        match restricted.solve(&rhs) {
            Ok(w) => {
                let field = self.field();
                let mut word = vec![field.zero(); self.n() + 1];
                word[0] = field.one();
                for (&c, &x) in cols.iter().zip(&w) {
                    word[c] = x;
                }
                Ok(QualifiedVerdict {
                    decision: Decision::Qualified,
                    witness: Some(word),
                })
            }
            Err(Error::NoSolution) => Ok(QualifiedVerdict::unqualified()),
            Err(e) => Err(e),
        }
    }

    fn elliptic_removed_sum(&self, subset: &[usize]) -> Result<(usize, Point)> {
        if !self.curve.is_elliptic() {
            return Err(Error::WrongGenus(self.genus()));
        }
        self.check_subset(subset)?;
        let removed = self.complement(subset);
        let sum = self
            .curve
            .ec_sum(removed.iter().map(|&i| &self.players[i]))?;
        Ok((removed.len(), sum))
    }

    fn clx_rule(&self, t: usize, sum: &Point) -> Result<bool> {
        let m = self.m;
        Ok(if t + 2 <= m {
            true
        } else if t > m {
            false
        } else if t == m {
            sum.is_infinity()
        } else {
            self.curve.ec_neg(sum)? != self.p0
        })
    }

    /// Group-sum decision for elliptic schemes with `G = mO`.
    ///
    /// With `t = |A|` and `B = -(sum of A)`: `t <= m - 2` is qualified,
    /// `t > m` is not, `t = m` is qualified iff `B = O`, and `t = m - 1` is
    /// qualified iff `B != P_0`.
    pub fn is_qualified_clx(&self, subset: &[usize]) -> Result<QualifiedVerdict> {
        let (t, sum) = self.elliptic_removed_sum(subset)?;
        let qualified = self.clx_rule(t, &sum)?;
        Ok(QualifiedVerdict {
            decision: if qualified {
                Decision::Qualified
            } else {
                Decision::Unqualified
            },
            witness: None,
        })
    }

    /// Minimality test from the elliptic group-sum characterisation, for
    /// `t = |A|` in `{m - 1, m}`: at `t = m` the complement of `A` is a
    /// minimal qualified set iff `B = O`; at `t = m - 1` iff
    /// `B` is not one of `P_0, ..., P_n` or `B` lies in `A`. Other sizes
    /// return `None`.
    pub fn clx_minimal(&self, subset: &[usize]) -> Result<Option<bool>> {
        let (t, sum) = self.elliptic_removed_sum(subset)?;
        let m = self.m;
        if t == m {
            return Ok(Some(sum.is_infinity()));
        }
        if t + 1 != m {
            return Ok(None);
        }
        let b = self.curve.ec_neg(&sum)?;
        if b == self.p0 {
            return Ok(Some(false));
        }
        match self.players.iter().position(|p| *p == b) {
            None => Ok(Some(true)),
            Some(i) => Ok(Some(subset.binary_search(&i).is_err())),
        }
    }

    pub fn is_qualified(&self, oracle: Oracle, subset: &[usize]) -> Result<bool> {
        Ok(match oracle {
            Oracle::Kernel => self.is_qualified_kernel(subset)?,
            Oracle::Dual => self.is_qualified_dual(subset)?,
            Oracle::Clx => self.is_qualified_clx(subset)?,
        }
        .is_qualified())
    }

    /// Decision for the complement of `removed` (sorted 0-based indices).
    /// The kernel oracle runs here as a witness-free rank test, which is
    /// the fast path used by sampling and enumeration.
    pub fn qualified_removed(&self, oracle: Oracle, removed: &[usize]) -> Result<bool> {
        self.check_subset(removed)?;
        match oracle {
            Oracle::Kernel => Ok(self.p0_outside_span(removed)),
            Oracle::Dual => Ok(self.is_qualified_dual(&self.complement(removed))?.is_qualified()),
            Oracle::Clx => {
                if !self.curve.is_elliptic() {
                    return Err(Error::WrongGenus(self.genus()));
                }
                let sum = self
                    .curve
                    .ec_sum(removed.iter().map(|&i| &self.players[i]))?;
                self.clx_rule(removed.len(), &sum)
            }
        }
    }

    /// True iff evaluation at `P_0` is not a combination of the evaluations
    /// at the removed players, i.e. some `f in L(G)` vanishes on them but
    /// not at `P_0`.
    fn p0_outside_span(&self, removed: &[usize]) -> bool {
        let p = self.field().characteristic();
        let red = Reducer::new(p);
        let field = self.field();
        let l = self.eval_rows.cols();
        let t = removed.len();
        let mut a = Vec::with_capacity(t * l);
        for &i in removed {
            a.extend((0..l).map(|c| self.eval_rows.raw(i + 1, c)));
        }
        let mut pivots = Vec::with_capacity(l);
        for c in 0..l {
            let rank = pivots.len();
            if rank == t {
                break;
            }
            let Some(sel) = (rank..t).find(|&r| a[r * l + c] != 0) else {
                continue;
            };
            if sel != rank {
                for k in c..l {
                    a.swap(sel * l + k, rank * l + k);
                }
            }
            let inv = field.inv_raw(a[rank * l + c]).expect("pivot is nonzero");
            for k in c..l {
                a[rank * l + k] = red.reduce(a[rank * l + k] * inv);
            }
            let (top, rest) = a.split_at_mut((rank + 1) * l);
            let pivot_row = &top[rank * l..];
            for row in rest.chunks_exact_mut(l) {
                let factor = row[c];
                if factor == 0 {
                    continue;
                }
                let neg = p - factor;
                for k in c..l {
                    row[k] = red.reduce(row[k] + neg * pivot_row[k]);
                }
            }
            pivots.push(c);
        }
        if pivots.len() == l {
            return false;
        }
        let mut e: Vec<u64> = (0..l).map(|c| self.eval_rows.raw(0, c)).collect();
        for (j, &c) in pivots.iter().enumerate() {
            let factor = e[c];
            if factor == 0 {
                continue;
            }
            let neg = p - factor;
            let row = &a[j * l..(j + 1) * l];
            for k in c..l {
                e[k] = red.reduce(e[k] + neg * row[k]);
            }
        }
        e.iter().any(|&x| x != 0)
    }

    /// Whether the shares of `subset` pin down coordinate 0 of every
    /// share-code word, decided by comparing column ranks.
    pub fn privacy_check(&self, subset: &[usize]) -> Result<Privacy> {
        self.check_subset(subset)?;
        let cols: Vec<usize> = subset.iter().map(|i| i + 1).collect();
        let mut with_secret = cols.clone();
        with_secret.push(0);
        let r_s = self.omega.select_columns(&cols).rank();
        let r_s0 = self.omega.select_columns(&with_secret).rank();
        Ok(if r_s == r_s0 {
            Privacy::DeterminesSecret
        } else {
            Privacy::ZeroInformation
        })
    }

    /// Counts the `t`-subsets `A` whose complement is qualified.
    pub fn enumerate_access(&self, t: usize, oracle: Oracle) -> Result<AccessCount> {
        let n = self.n();
        let total = binomial(n as u64, t as u64);
        let total: u64 = u64::try_from(&total)
            .ok()
            .filter(|&v| v <= EXHAUSTIVE_LIMIT)
            .ok_or_else(|| {
                Error::InstanceTooLarge(format!("binom({n}, {t}) exceeds {EXHAUSTIVE_LIMIT}"))
            })?;
        let mut qualified = 0u64;
        let mut err = None;
        for_each_combination(n, t, |removed| {
            if err.is_some() {
                return;
            }
            match self.qualified_removed(oracle, removed) {
                Ok(true) => qualified += 1,
                Ok(false) => {}
                Err(e) => err = Some(e),
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
        Ok(AccessCount { qualified, total })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AccessCount {
    pub qualified: u64,
    pub total: u64,
}

/// Calls `f` on every `t`-subset of `0..n` in lexicographic order.
pub fn for_each_combination(n: usize, t: usize, mut f: impl FnMut(&[usize])) {
    if t > n {
        return;
    }
    let mut idx: Vec<usize> = (0..t).collect();
    loop {
        f(&idx);
        let mut i = t;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - t {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..t {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;

    fn e13(m: usize) -> Scheme {
        Scheme::standard(Curve::parse("ec:p=13,a=1,b=1").unwrap(), m).unwrap()
    }

    #[test]
    fn combinations_enumerate_everything() {
        for n in 0..8 {
            for t in 0..=n + 1 {
                let mut seen = Vec::new();
                for_each_combination(n, t, |c| seen.push(c.to_vec()));
                assert_eq!(seen.len() as u64, u64::try_from(&binomial(n as u64, t as u64)).unwrap());
                assert!(seen.windows(2).all(|w| w[0] < w[1]));
            }
        }
    }

    #[test]
    fn build_examples() {
        let s = e13(5);
        let n = s.n();
        assert_eq!(s.dim_c_l(), 5);
        assert_eq!(s.dim_c_omega(), n - 5 + 1);
        let curve = Curve::parse("ec:p=13,a=1,b=1").unwrap();
        assert!(matches!(
            Scheme::standard(curve.clone(), 0),
            Err(Error::DegreeOutOfRange { .. })
        ));
        assert!(matches!(
            Scheme::standard(curve.clone(), n),
            Err(Error::DegreeOutOfRange { .. })
        ));
        let mut affine = curve.affine_points();
        let p0 = affine.remove(0);
        let mut players = affine.clone();
        players.push(affine[0]);
        assert_eq!(
            Scheme::build(curve.clone(), p0, players, 5).unwrap_err(),
            Error::DuplicatePoint
        );
        let h = Curve::parse("hyp:p=13,f=1,1,0,0,0,1").unwrap();
        assert!(matches!(
            Scheme::standard(h, 2),
            Err(Error::DegreeOutOfRange { .. })
        ));
    }

    #[test]
    fn share_and_reconstruct() {
        let s = e13(5);
        let f = s.field();
        let all: Vec<usize> = (0..s.n()).collect();
        for secret in 0..13 {
            let sv = s.share(f.element(secret), 42 + secret as u64).unwrap();
            assert_eq!(sv.secret, f.element(secret));
            assert_eq!(s.reconstruct(&all, &sv.shares).unwrap(), sv.secret);
        }
        let a = s.share(f.element(7), 9).unwrap();
        assert_eq!(a, s.share(f.element(7), 9).unwrap());
        assert_ne!(a, s.share(f.element(7), 10).unwrap());
        assert_eq!(ShareVector::from_csv(f, &a.to_csv()).unwrap(), a);

        // Too many players missing: |A| > m.
        let keep: Vec<usize> = (0..s.n() - 6).collect();
        let shares: Vec<Fp> = keep.iter().map(|&i| a.shares[i]).collect();
        assert_eq!(s.reconstruct(&keep, &shares), Err(Error::NotQualified));
        // |A| <= m - 2g always works.
        let keep: Vec<usize> = (3..s.n()).collect();
        let shares: Vec<Fp> = keep.iter().map(|&i| a.shares[i]).collect();
        assert_eq!(s.reconstruct(&keep, &shares).unwrap(), a.secret);
    }

    #[test]
    fn oracle_edge_cases() {
        let s = e13(5);
        let all: Vec<usize> = (0..s.n()).collect();
        for oracle in [Oracle::Kernel, Oracle::Dual, Oracle::Clx] {
            assert!(s.is_qualified(oracle, &all).unwrap());
            assert!(!s.is_qualified(oracle, &[]).unwrap());
        }
        assert_eq!(s.privacy_check(&[]).unwrap(), Privacy::ZeroInformation);
        assert_eq!(s.privacy_check(&all).unwrap(), Privacy::DeterminesSecret);
        assert!(matches!(s.is_qualified_kernel(&[99]), Err(Error::BadPlayerIndex(100))));
        let h = Scheme::standard(Curve::parse("hyp:p=13,f=1,1,0,0,0,1").unwrap(), 4).unwrap();
        assert_eq!(h.is_qualified_clx(&[0]), Err(Error::WrongGenus(2)));
    }

    #[test]
    fn witnesses_are_genuine() {
        let s = e13(5);
        let f = s.field();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut idx: Vec<usize> = (0..s.n()).collect();
        for _ in 0..200 {
            idx.shuffle(&mut rng);
            let k = rng.gen_range(0..=s.n());
            let mut subset = idx[..k].to_vec();
            subset.sort_unstable();
            let kernel = s.is_qualified_kernel(&subset).unwrap();
            let dual = s.is_qualified_dual(&subset).unwrap();
            assert_eq!(kernel.decision, dual.decision);
            if let Some(coeffs) = kernel.witness {
                let values = s.eval_rows.mul_vec(&coeffs).unwrap();
                assert!(!values[0].is_zero());
                for i in s.complement(&subset) {
                    assert!(values[i + 1].is_zero());
                }
            }
            if let Some(word) = dual.witness {
                assert_eq!(word[0], f.one());
                assert!(s.omega.mul_vec(&word).unwrap().iter().all(Fp::is_zero));
                for i in s.complement(&subset) {
                    assert!(word[i + 1].is_zero());
                }
            }
        }
    }

    #[test]
    fn fast_path_matches_oracles() {
        let schemes = [
            e13(5),
            e13(3),
            Scheme::standard(Curve::parse("hyp:p=13,f=1,1,0,0,0,1").unwrap(), 6).unwrap(),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for s in &schemes {
            let mut idx: Vec<usize> = (0..s.n()).collect();
            for _ in 0..300 {
                idx.shuffle(&mut rng);
                let t = rng.gen_range(0..=s.m() + 1).min(s.n());
                let mut removed = idx[..t].to_vec();
                removed.sort_unstable();
                let subset = s.complement(&removed);
                let kernel = s.is_qualified_kernel(&subset).unwrap().is_qualified();
                assert_eq!(s.qualified_removed(Oracle::Kernel, &removed).unwrap(), kernel);
                assert_eq!(s.qualified_removed(Oracle::Dual, &removed).unwrap(), kernel);
                assert_eq!(s.privacy_check(&subset).unwrap() == Privacy::DeterminesSecret, kernel);
                if s.curve().is_elliptic() {
                    assert_eq!(s.qualified_removed(Oracle::Clx, &removed).unwrap(), kernel);
                }
            }
        }
    }

    #[test]
    fn clx_literal_minimality_matches_linear_algebra() {
        let s = e13(5);
        let m = s.m();
        for t in [m - 1, m] {
            for_each_combination(s.n(), t, |removed| {
                let subset = s.complement(removed);
                let qualified = s.is_qualified_kernel(&subset).unwrap().is_qualified();
                let minimal = qualified
                    && subset.iter().all(|&drop| {
                        let smaller: Vec<usize> =
                            subset.iter().copied().filter(|&i| i != drop).collect();
                        !s.is_qualified_kernel(&smaller).unwrap().is_qualified()
                    });
                assert_eq!(s.clx_minimal(&subset).unwrap(), Some(minimal), "A = {removed:?}");
            });
        }
        assert_eq!(s.clx_minimal(&(0..s.n()).collect::<Vec<_>>()).unwrap(), None);
    }

    #[test]
    fn access_counts_at_the_edges() {
        let s = e13(5);
        assert_eq!(s.enumerate_access(0, Oracle::Kernel).unwrap().qualified, 1);
        assert_eq!(s.enumerate_access(6, Oracle::Dual).unwrap().qualified, 0);
        let k = s.enumerate_access(5, Oracle::Kernel).unwrap();
        assert_eq!(k, s.enumerate_access(5, Oracle::Clx).unwrap());
        assert!(k.qualified > 0 && k.qualified < k.total);
    }

    #[test]
    fn subset_parsing() {
        assert_eq!(parse_subset("3,1,2,3", 5).unwrap(), vec![0, 1, 2]);
        assert_eq!(parse_subset("", 5).unwrap(), Vec::<usize>::new());
        assert_eq!(parse_subset("0", 5), Err(Error::BadPlayerIndex(0)));
        assert_eq!(parse_subset("6", 5), Err(Error::BadPlayerIndex(6)));
        assert_eq!(format_subset(&[0, 4]), "1,5");
    }
}
