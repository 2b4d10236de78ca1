//! Prime fields `F_p` and exact dense linear algebra over them.
//!
//! Elements carry their modulus by value, so combining elements of two
//! different fields is detected instead of silently reduced. The operator
//! impls panic on a mismatch; the `try_*` methods report it as
//! [`Error::FieldMismatch`].

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported characteristic.
pub const MAX_CHARACTERISTIC: u64 = 1 << 31;

fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_u64(acc, base, m);
        }
        base = mul_mod_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin, exact for every 64-bit input.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &w in &WITNESSES {
        if n % w == 0 {
            return n == w;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if p < 5 {
            return Err(Error::FieldTooSmall(p));
        }
        if p > MAX_CHARACTERISTIC {
            return Err(Error::FieldTooLarge(p));
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Self { p })
    }

    #[inline]
    pub fn characteristic(&self) -> u64 {
        self.p
    }

    /// Reduces an arbitrary signed integer into the field.
    pub fn element(&self, value: i64) -> Fp {
        Fp {
            value: value.rem_euclid(self.p as i64) as u64,
            p: self.p,
        }
    }

    pub fn zero(&self) -> Fp {
        Fp { value: 0, p: self.p }
    }

    pub fn one(&self) -> Fp {
        Fp { value: 1, p: self.p }
    }

    /// Lifts a residue already known to lie in `[0, p)`.
    #[inline]
    pub fn from_residue(&self, value: u64) -> Fp {
        debug_assert!(value < self.p);
        Fp { value, p: self.p }
    }

    pub fn elements(&self) -> impl Iterator<Item = Fp> + '_ {
        (0..self.p).map(move |value| Fp { value, p: self.p })
    }

    #[inline]
    pub(crate) fn add_raw(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub(crate) fn sub_raw(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub(crate) fn mul_raw(&self, a: u64, b: u64) -> u64 {
        // p <= 2^31 keeps the product below 2^62.
        (a * b) % self.p
    }

    pub(crate) fn inv_raw(&self, a: u64) -> Result<u64> {
        if a == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(pow_mod_u64(a, self.p - 2, self.p))
    }
}

/// Barrett reduction modulo a fixed `p <= 2^31`, for hot elimination loops.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Reducer {
    p: u64,
    m: u64,
}

impl Reducer {
    pub(crate) fn new(p: u64) -> Self {
        Self { p, m: u64::MAX / p }
    }

    #[inline]
    pub(crate) fn reduce(&self, x: u64) -> u64 {
        let q = ((x as u128 * self.m as u128) >> 64) as u64;
        let mut r = x - q * self.p;
        while r >= self.p {
            r -= self.p;
        }
        r
    }
}

impl fmt::Display for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.p)
    }
}

/// An element of `F_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Fp {
    value: u64,
    p: u64,
}

impl Fp {
    #[inline]
    pub fn value(&self) -> u64 {
        self.value
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn field(&self) -> PrimeField {
        PrimeField { p: self.p }
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn check(&self, other: &Fp) -> Result<()> {
        if self.p == other.p {
            Ok(())
        } else {
            Err(Error::FieldMismatch {
                left: self.p,
                right: other.p,
            })
        }
    }

    pub fn try_add(self, other: Fp) -> Result<Fp> {
        self.check(&other)?;
        Ok(Fp {
            value: self.field().add_raw(self.value, other.value),
            p: self.p,
        })
    }

    pub fn try_sub(self, other: Fp) -> Result<Fp> {
        self.check(&other)?;
        Ok(Fp {
            value: self.field().sub_raw(self.value, other.value),
            p: self.p,
        })
    }

    pub fn try_mul(self, other: Fp) -> Result<Fp> {
        self.check(&other)?;
        Ok(Fp {
            value: self.field().mul_raw(self.value, other.value),
            p: self.p,
        })
    }

    pub fn try_div(self, other: Fp) -> Result<Fp> {
        self.try_mul(other.inv()?)
    }

    pub fn inv(self) -> Result<Fp> {
        Ok(Fp {
            value: self.field().inv_raw(self.value)?,
            p: self.p,
        })
    }

    pub fn pow(self, exp: u64) -> Fp {
        Fp {
            value: pow_mod_u64(self.value, exp, self.p),
            p: self.p,
        }
    }

    /// Euler's criterion; zero counts as a square.
    pub fn is_square(&self) -> bool {
        self.value == 0 || self.pow((self.p - 1) / 2).value == 1
    }

    /// Tonelli–Shanks. Returns the root `r` with `r <= p - r`, or `None`
    /// for non-residues.
    pub fn sqrt(&self) -> Option<Fp> {
        if self.value == 0 {
            return Some(*self);
        }
        if !self.is_square() {
            return None;
        }
        let p = self.p;
        let f = self.field();
        let root = if p % 4 == 3 {
            self.pow((p + 1) / 4)
        } else {
            let mut q = p - 1;
            let mut s = 0u32;
            while q % 2 == 0 {
                q /= 2;
                s += 1;
            }
            // Least non-residue, so the computation is deterministic.
            let z = (2..p)
                .map(|v| f.from_residue(v))
                .find(|v| !v.is_square())
                .expect("odd prime has a non-residue");
            let mut m = s;
            let mut c = z.pow(q);
            let mut t = self.pow(q);
            let mut r = self.pow((q + 1) / 2);
            while t.value != 1 {
                let mut i = 0;
                let mut t2 = t;
                while t2.value != 1 {
                    t2 = t2 * t2;
                    i += 1;
                }
                let b = c.pow(1 << (m - i - 1));
                m = i;
                c = b * b;
                t = t * c;
                r = r * b;
            }
            r
        };
        let other = -root;
        Some(if root.value <= other.value { root } else { other })
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for Fp {
    type Output = Fp;
    fn add(self, rhs: Fp) -> Fp {
        self.try_add(rhs).expect("field mismatch")
    }
}

impl Sub for Fp {
    type Output = Fp;
    fn sub(self, rhs: Fp) -> Fp {
        self.try_sub(rhs).expect("field mismatch")
    }
}

impl Mul for Fp {
    type Output = Fp;
    fn mul(self, rhs: Fp) -> Fp {
        self.try_mul(rhs).expect("field mismatch")
    }
}

impl Neg for Fp {
    type Output = Fp;
    fn neg(self) -> Fp {
        Fp {
            value: if self.value == 0 { 0 } else { self.p - self.value },
            p: self.p,
        }
    }
}

impl AddAssign for Fp {
    fn add_assign(&mut self, rhs: Fp) {
        *self = *self + rhs;
    }
}

impl SubAssign for Fp {
    fn sub_assign(&mut self, rhs: Fp) {
        *self = *self - rhs;
    }
}

impl MulAssign for Fp {
    fn mul_assign(&mut self, rhs: Fp) {
        *self = *self * rhs;
    }
}

/// Dense row-major matrix over a single prime field.
///
/// Entries are stored as residues; every accessor re-attaches the field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Echelon {
    pub reduced: Matrix,
    pub pivots: Vec<usize>,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

impl Matrix {
    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        Self {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_rows(field: PrimeField, rows: &[Vec<Fp>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch(format!(
                    "ragged rows: {} vs {}",
                    row.len(),
                    cols
                )));
            }
            for e in row {
                if e.modulus() != field.characteristic() {
                    return Err(Error::FieldMismatch {
                        left: field.characteristic(),
                        right: e.modulus(),
                    });
                }
                data.push(e.value());
            }
        }
        Ok(Self {
            field,
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Builds a matrix from signed integers, reducing each modulo p.
    pub fn from_i64(field: PrimeField, rows: &[Vec<i64>]) -> Result<Self> {
        let rows: Vec<Vec<Fp>> = rows
            .iter()
            .map(|r| r.iter().map(|&v| field.element(v)).collect())
            .collect();
        Self::from_rows(field, &rows)
    }

    pub(crate) fn from_raw(field: PrimeField, rows: usize, cols: usize, data: Vec<u64>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Self {
            field,
            rows,
            cols,
            data,
        }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> Fp {
        self.field.from_residue(self.data[r * self.cols + c])
    }

    pub(crate) fn raw(&self, r: usize, c: usize) -> u64 {
        self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> Vec<Fp> {
        (0..self.cols).map(|c| self.get(r, c)).collect()
    }

    pub fn column(&self, c: usize) -> Vec<Fp> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.data[c * self.rows + r] = self.data[r * self.cols + c];
            }
        }
        out
    }

    /// Sub-matrix made of the given columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(self.rows * cols.len());
        for r in 0..self.rows {
            for &c in cols {
                data.push(self.data[r * self.cols + c]);
            }
        }
        Matrix::from_raw(self.field, self.rows, cols.len(), data)
    }

    pub fn select_rows(&self, rows: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(rows.len() * self.cols);
        for &r in rows {
            data.extend_from_slice(&self.data[r * self.cols..(r + 1) * self.cols]);
        }
        Matrix::from_raw(self.field, rows.len(), self.cols, data)
    }

    pub fn mul_vec(&self, v: &[Fp]) -> Result<Vec<Fp>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        let f = self.field;
        let mut out = Vec::with_capacity(self.rows);
        for r in 0..self.rows {
            let mut acc = 0;
            for (c, x) in v.iter().enumerate() {
                if x.modulus() != f.characteristic() {
                    return Err(Error::FieldMismatch {
                        left: f.characteristic(),
                        right: x.modulus(),
                    });
                }
                acc = f.add_raw(acc, f.mul_raw(self.data[r * self.cols + c], x.value()));
            }
            out.push(f.from_residue(acc));
        }
        Ok(out)
    }

    /// Row vector times matrix.
    pub fn vec_mul(&self, v: &[Fp]) -> Result<Vec<Fp>> {
        self.transpose().mul_vec(v)
    }

    /// Gauss–Jordan elimination choosing, in each column, the first row with
    /// a nonzero entry. The result is the unique reduced row echelon form.
    pub fn echelon(&self) -> Echelon {
        let f = self.field;
        let cols = self.cols;
        let mut a = self.data.clone();
        let mut pivots = Vec::new();
        let mut pr = 0;
        for c in 0..cols {
            if pr == self.rows {
                break;
            }
            let Some(sel) = (pr..self.rows).find(|&r| a[r * cols + c] != 0) else {
                continue;
            };
            if sel != pr {
                for k in 0..cols {
                    a.swap(sel * cols + k, pr * cols + k);
                }
            }
            let inv = f.inv_raw(a[pr * cols + c]).expect("pivot is nonzero");
            for k in c..cols {
                a[pr * cols + k] = f.mul_raw(a[pr * cols + k], inv);
            }
            for r in 0..self.rows {
                if r == pr {
                    continue;
                }
                let factor = a[r * cols + c];
                if factor == 0 {
                    continue;
                }
                for k in c..cols {
                    let sub = f.mul_raw(factor, a[pr * cols + k]);
                    a[r * cols + k] = f.sub_raw(a[r * cols + k], sub);
                }
            }
            pivots.push(c);
            pr += 1;
        }
        Echelon {
            reduced: Matrix::from_raw(f, self.rows, cols, a),
            pivots,
        }
    }

    pub fn rank(&self) -> usize {
        self.echelon().rank()
    }

    /// Canonical nullspace basis: one vector per free column, with a 1 in
    /// that column and zeros in the other free columns.
    pub fn kernel(&self) -> Vec<Vec<Fp>> {
        let f = self.field;
        let ech = self.echelon();
        let mut is_pivot = vec![false; self.cols];
        for &c in &ech.pivots {
            is_pivot[c] = true;
        }
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![f.zero(); self.cols];
            v[free] = f.one();
            for (r, &pc) in ech.pivots.iter().enumerate() {
                v[pc] = -ech.reduced.get(r, free);
            }
            basis.push(v);
        }
        basis
    }

    /// Solves `self * x = b`. Free variables are set to zero.
    pub fn solve(&self, b: &[Fp]) -> Result<Vec<Fp>> {
        if b.len() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "right-hand side of length {} against {} rows",
                b.len(),
                self.rows
            )));
        }
        let f = self.field;
        let aug_cols = self.cols + 1;
        let mut data = Vec::with_capacity(self.rows * aug_cols);
        for r in 0..self.rows {
            data.extend_from_slice(&self.data[r * self.cols..(r + 1) * self.cols]);
            if b[r].modulus() != f.characteristic() {
                return Err(Error::FieldMismatch {
                    left: f.characteristic(),
                    right: b[r].modulus(),
                });
            }
            data.push(b[r].value());
        }
        let ech = Matrix::from_raw(f, self.rows, aug_cols, data).echelon();
        if ech.pivots.last() == Some(&self.cols) {
            return Err(Error::NoSolution);
        }
        let mut x = vec![f.zero(); self.cols];
        for (r, &pc) in ech.pivots.iter().enumerate() {
            x[pc] = ech.reduced.get(r, self.cols);
        }
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    proptest! {
        #[test]
        fn barrett_matches_remainder(p in 5u64..=(1 << 31), x in 0u64..(1 << 63)) {
            prop_assert_eq!(Reducer::new(p).reduce(x), x % p);
        }
    }

    #[test]
    fn primality_checks() {
        assert!(is_prime(5));
        assert!(is_prime(2_147_483_647));
        assert!(!is_prime(1));
        assert!(!is_prime(561));
        assert!(!is_prime(3_215_031_751));
        assert_eq!(PrimeField::new(3), Err(Error::FieldTooSmall(3)));
        assert_eq!(PrimeField::new(15), Err(Error::NotPrime(15)));
        assert!(matches!(
            PrimeField::new(4_294_967_311),
            Err(Error::FieldTooLarge(_))
        ));
    }

    #[test]
    fn arithmetic_examples() {
        let f5 = f(5);
        assert_eq!((f5.element(2) + f5.element(3)).value(), 0);
        assert_eq!(f5.element(2).inv().unwrap().value(), 3);
        let f13 = f(13);
        assert_eq!((f13.element(4) * f13.element(4)).value(), 3);
        assert_eq!(f5.zero().inv(), Err(Error::DivisionByZero));
        assert_eq!(f5.element(3).pow(4).value(), 1);
    }

    #[test]
    fn inverse_matches_exhaustive_search() {
        let f5 = f(5);
        let two = f5.element(2);
        let found: Vec<u64> = f5
            .elements()
            .filter(|x| (*x * two).value() == 1)
            .map(|x| x.value())
            .collect();
        assert_eq!(found, vec![two.inv().unwrap().value()]);
    }

    #[test]
    fn mismatched_fields_are_rejected() {
        let a = f(5).element(1);
        let b = f(7).element(1);
        assert_eq!(
            a.try_add(b),
            Err(Error::FieldMismatch { left: 5, right: 7 })
        );
        assert!(a.try_mul(b).is_err());
    }

    #[test]
    fn sqrt_on_both_residue_classes() {
        for p in [5u64, 13, 17, 41, 101, 113] {
            let fp = f(p);
            for x in fp.elements() {
                match x.sqrt() {
                    Some(r) => assert_eq!(r * r, x),
                    None => assert!(!x.is_square()),
                }
            }
        }
    }

    #[test]
    fn kernel_examples() {
        let f5 = f(5);
        assert!(Matrix::identity(f5, 3).kernel().is_empty());
        assert_eq!(Matrix::zeros(f5, 2, 3).kernel().len(), 3);
        let m = Matrix::from_i64(f5, &[vec![1, 2], vec![2, 4]]).unwrap();
        let k = m.kernel();
        assert_eq!(k, vec![vec![f5.element(3), f5.element(1)]]);
        // Exhaustive cross-check over F_5^2.
        let nonzero_kernel: Vec<(u64, u64)> = (0..5)
            .flat_map(|a| (0..5).map(move |b| (a, b)))
            .filter(|&(a, b)| (a, b) != (0, 0))
            .filter(|&(a, b)| {
                m.mul_vec(&[f5.element(a as i64), f5.element(b as i64)])
                    .unwrap()
                    .iter()
                    .all(Fp::is_zero)
            })
            .collect();
        assert_eq!(nonzero_kernel.len(), 4);
        assert!(nonzero_kernel.contains(&(3, 1)));
    }

    #[test]
    fn solve_examples() {
        let f5 = f(5);
        let b = vec![f5.element(2), f5.element(4), f5.element(1)];
        assert_eq!(Matrix::identity(f5, 3).solve(&b).unwrap(), b);
        let m = Matrix::from_i64(f5, &[vec![1, 1], vec![1, 1]]).unwrap();
        assert_eq!(
            m.solve(&[f5.element(0), f5.element(1)]),
            Err(Error::NoSolution)
        );
        let m = Matrix::from_i64(f5, &[vec![1, 1], vec![0, 1]]).unwrap();
        let x = m.solve(&[f5.element(0), f5.element(1)]).unwrap();
        assert_eq!(x, vec![f5.element(4), f5.element(1)]);
    }

    fn arb_matrix() -> impl Strategy<Value = (u64, usize, usize, Vec<i64>)> {
        (prop::sample::select(vec![5u64, 7, 13, 101]), 1usize..7, 1usize..7).prop_flat_map(
            |(p, r, c)| {
                (
                    Just(p),
                    Just(r),
                    Just(c),
                    // Bias towards zeros so rank-deficient cases are common.
                    prop::collection::vec(prop_oneof![Just(0i64), 0i64..p as i64], r * c),
                )
            },
        )
    }

    proptest! {
        #[test]
        fn rank_nullity((p, _r, c, data) in arb_matrix()) {
            let fp = f(p);
            let rows: Vec<Vec<i64>> = data.chunks(c).map(<[i64]>::to_vec).collect();
            let m = Matrix::from_i64(fp, &rows).unwrap();
            let kernel = m.kernel();
            prop_assert_eq!(m.rank() + kernel.len(), c);
            for v in &kernel {
                prop_assert!(m.mul_vec(v).unwrap().iter().all(Fp::is_zero));
            }
            let km = Matrix::from_rows(fp, &kernel);
            if let Ok(km) = km {
                prop_assert_eq!(km.rank(), kernel.len());
            }
            prop_assert_eq!(m.kernel(), kernel);
        }

        #[test]
        fn solve_reproduces_rhs((p, _r, c, data) in arb_matrix(), x_seed in prop::collection::vec(0i64..1000, 7)) {
            let fp = f(p);
            let rows: Vec<Vec<i64>> = data.chunks(c).map(<[i64]>::to_vec).collect();
            let m = Matrix::from_i64(fp, &rows).unwrap();
            let x0: Vec<Fp> = x_seed[..c].iter().map(|&v| fp.element(v)).collect();
            let b = m.mul_vec(&x0).unwrap();
            let x = m.solve(&b).unwrap();
            prop_assert_eq!(m.mul_vec(&x).unwrap(), b);
        }
    }
}
