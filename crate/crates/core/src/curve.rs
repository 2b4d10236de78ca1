//! Curve models over prime fields.
//!
//! Two models are supported, both with a single point at infinity:
//!
//! * short Weierstrass elliptic curves `y^2 = x^3 + a x + b` (genus 1);
//! * odd-degree hyperelliptic curves `y^2 = f(x)` with `deg f = 2g + 1 >= 5`.
//!
//! The point at infinity plays the role of `Q` throughout, so the
//! Riemann–Roch space `L(mQ)` is spanned by the monomials `x^i y^j` with
//! `j <= 1` and pole order `2i + (2g+1)j <= m`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::field::{Fp, PrimeField};
use crate::group::{AbelianGroup, GroupElement};

/// Textual curve description used on the command line and in configs:
/// `ec:p=<p>,a=<a>,b=<b>` or `hyp:p=<p>,f=<c0>,<c1>,...` (low to high).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CurveSpec {
    Elliptic { p: u64, a: i64, b: i64 },
    Hyperelliptic { p: u64, f: Vec<i64> },
}

fn parse_int<T: FromStr>(s: &str, what: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad {what}: {s:?}")))
}

impl FromStr for CurveSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("ec:") {
            let (mut p, mut a, mut b) = (None, None, None);
            for part in rest.split(',') {
                let (key, value) = part
                    .split_once('=')
                    .ok_or_else(|| Error::Parse(format!("expected key=value, got {part:?}")))?;
                match key.trim() {
                    "p" => p = Some(parse_int(value, "p")?),
                    "a" => a = Some(parse_int(value, "a")?),
                    "b" => b = Some(parse_int(value, "b")?),
                    other => return Err(Error::Parse(format!("unknown key {other:?}"))),
                }
            }
            match (p, a, b) {
                (Some(p), Some(a), Some(b)) => Ok(CurveSpec::Elliptic { p, a, b }),
                _ => Err(Error::Parse("ec spec needs p, a and b".into())),
            }
        } else if let Some(rest) = s.strip_prefix("hyp:") {
            let rest = rest.trim();
            let rest = rest
                .strip_prefix("p=")
                .ok_or_else(|| Error::Parse("hyp spec must start with p=".into()))?;
            let (p, coeffs) = rest
                .split_once(",f=")
                .ok_or_else(|| Error::Parse("hyp spec needs ,f=<coefficients>".into()))?;
            let p = parse_int(p, "p")?;
            let f = coeffs
                .split(',')
                .map(|c| parse_int(c, "coefficient"))
                .collect::<Result<Vec<i64>>>()?;
            Ok(CurveSpec::Hyperelliptic { p, f })
        } else {
            Err(Error::Parse(format!(
                "curve spec must start with ec: or hyp:, got {s:?}"
            )))
        }
    }
}

impl fmt::Display for CurveSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurveSpec::Elliptic { p, a, b } => write!(f, "ec:p={p},a={a},b={b}"),
            CurveSpec::Hyperelliptic { p, f: coeffs } => {
                let cs: Vec<String> = coeffs.iter().map(i64::to_string).collect();
                write!(f, "hyp:p={p},f={}", cs.join(","))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Point {
    Infinity,
    Affine { x: Fp, y: Fp },
}

impl Point {
    pub fn is_infinity(&self) -> bool {
        matches!(self, Point::Infinity)
    }

    pub fn coords(&self) -> Option<(Fp, Fp)> {
        match *self {
            Point::Infinity => None,
            Point::Affine { x, y } => Some((x, y)),
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Infinity => write!(f, "O"),
            Point::Affine { x, y } => write!(f, "({x},{y})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CurveKind {
    Elliptic { a: Fp, b: Fp },
    /// Coefficients of `f`, lowest degree first, leading coefficient nonzero.
    Hyperelliptic { f: Vec<Fp> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Curve {
    field: PrimeField,
    kind: CurveKind,
    genus: usize,
}

// Polynomials as residue vectors, lowest degree first, no trailing zeros.

fn trim(mut v: Vec<u64>) -> Vec<u64> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn poly_rem(field: PrimeField, a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut r = trim(a.to_vec());
    let lead_inv = field
        .inv_raw(*b.last().expect("nonzero divisor"))
        .expect("leading coefficient is nonzero");
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let factor = field.mul_raw(*r.last().unwrap(), lead_inv);
        for (i, &bc) in b.iter().enumerate() {
            let sub = field.mul_raw(factor, bc);
            r[shift + i] = field.sub_raw(r[shift + i], sub);
        }
        r = trim(r);
    }
    r
}

fn poly_gcd_degree(field: PrimeField, a: &[u64], b: &[u64]) -> usize {
    let mut a = trim(a.to_vec());
    let mut b = trim(b.to_vec());
    while !b.is_empty() {
        let r = poly_rem(field, &a, &b);
        a = b;
        b = r;
    }
    a.len().saturating_sub(1)
}

fn is_squarefree(field: PrimeField, f: &[u64]) -> bool {
    let p = field.characteristic();
    let derivative: Vec<u64> = f
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| field.mul_raw(c, i as u64 % p))
        .collect();
    let derivative = trim(derivative);
    if derivative.is_empty() {
        return false;
    }
    poly_gcd_degree(field, f, &derivative) == 0
}

impl Curve {
    pub fn elliptic(field: PrimeField, a: Fp, b: Fp) -> Result<Self> {
        let four = field.element(4);
        let twenty_seven = field.element(27);
        let disc = four * a * a * a + twenty_seven * b * b;
        if disc.is_zero() {
            return Err(Error::SingularCurve);
        }
        Ok(Self {
            field,
            kind: CurveKind::Elliptic { a, b },
            genus: 1,
        })
    }

    pub fn hyperelliptic(field: PrimeField, coeffs: Vec<Fp>) -> Result<Self> {
        let raw = trim(coeffs.iter().map(Fp::value).collect());
        let degree = raw.len().saturating_sub(1);
        if degree < 5 || degree % 2 == 0 {
            return Err(Error::BadDegree(degree));
        }
        if !is_squarefree(field, &raw) {
            return Err(Error::SingularCurve);
        }
        let f = raw.into_iter().map(|v| field.from_residue(v)).collect();
        Ok(Self {
            field,
            kind: CurveKind::Hyperelliptic { f },
            genus: (degree - 1) / 2,
        })
    }

    pub fn from_spec(spec: &CurveSpec) -> Result<Self> {
        match spec {
            CurveSpec::Elliptic { p, a, b } => {
                let field = PrimeField::new(*p)?;
                Self::elliptic(field, field.element(*a), field.element(*b))
            }
            CurveSpec::Hyperelliptic { p, f } => {
                let field = PrimeField::new(*p)?;
                Self::hyperelliptic(field, f.iter().map(|&c| field.element(c)).collect())
            }
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::from_spec(&s.parse()?)
    }

    pub fn spec(&self) -> CurveSpec {
        let p = self.field.characteristic();
        match &self.kind {
            CurveKind::Elliptic { a, b } => CurveSpec::Elliptic {
                p,
                a: a.value() as i64,
                b: b.value() as i64,
            },
            CurveKind::Hyperelliptic { f } => CurveSpec::Hyperelliptic {
                p,
                f: f.iter().map(|c| c.value() as i64).collect(),
            },
        }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn kind(&self) -> &CurveKind {
        &self.kind
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn is_elliptic(&self) -> bool {
        matches!(self.kind, CurveKind::Elliptic { .. })
    }

    /// Right-hand side `f(x)` of `y^2 = f(x)`.
    pub fn rhs(&self, x: Fp) -> Fp {
        match &self.kind {
            CurveKind::Elliptic { a, b } => x * x * x + *a * x + *b,
            CurveKind::Hyperelliptic { f } => f
                .iter()
                .rev()
                .fold(self.field.zero(), |acc, &c| acc * x + c),
        }
    }

    pub fn contains(&self, point: &Point) -> bool {
        match point {
            Point::Infinity => true,
            Point::Affine { x, y } => {
                x.modulus() == self.field.characteristic()
                    && y.modulus() == self.field.characteristic()
                    && *y * *y == self.rhs(*x)
            }
        }
    }

    pub fn affine_point(&self, x: i64, y: i64) -> Result<Point> {
        let pt = Point::Affine {
            x: self.field.element(x),
            y: self.field.element(y),
        };
        if self.contains(&pt) {
            Ok(pt)
        } else {
            Err(Error::PointNotOnCurve)
        }
    }

    /// Affine rational points in `(x, y)` lexicographic order.
    pub fn affine_points(&self) -> Vec<Point> {
        let mut out = Vec::new();
        for x in self.field.elements() {
            if let Some(y) = self.rhs(x).sqrt() {
                out.push(Point::Affine { x, y });
                if !y.is_zero() {
                    out.push(Point::Affine { x, y: -y });
                }
            }
        }
        out.sort();
        out
    }

    /// All rational points: the point at infinity followed by the affine
    /// points in lexicographic order.
    pub fn points(&self) -> Vec<Point> {
        let mut pts = vec![Point::Infinity];
        pts.extend(self.affine_points());
        pts
    }

    pub fn point_count(&self) -> usize {
        1 + self
            .field
            .elements()
            .map(|x| {
                let r = self.rhs(x);
                if r.is_zero() {
                    1
                } else if r.is_square() {
                    2
                } else {
                    0
                }
            })
            .sum::<usize>()
    }

    fn elliptic_a(&self) -> Result<Fp> {
        match self.kind {
            CurveKind::Elliptic { a, .. } => Ok(a),
            CurveKind::Hyperelliptic { .. } => Err(Error::WrongGenus(self.genus)),
        }
    }

    pub fn ec_neg(&self, p: &Point) -> Result<Point> {
        self.elliptic_a()?;
        if !self.contains(p) {
            return Err(Error::PointNotOnCurve);
        }
        Ok(match *p {
            Point::Infinity => Point::Infinity,
            Point::Affine { x, y } => Point::Affine { x, y: -y },
        })
    }

    /// Chord-and-tangent addition with `Infinity` as identity.
    pub fn ec_add(&self, p: &Point, q: &Point) -> Result<Point> {
        let a = self.elliptic_a()?;
        if !self.contains(p) || !self.contains(q) {
            return Err(Error::PointNotOnCurve);
        }
        Ok(self.add_unchecked(a, p, q))
    }

    fn add_unchecked(&self, a: Fp, p: &Point, q: &Point) -> Point {
        let (x1, y1) = match p.coords() {
            None => return *q,
            Some(c) => c,
        };
        let (x2, y2) = match q.coords() {
            None => return *p,
            Some(c) => c,
        };
        let f = self.field;
        let slope = if x1 == x2 {
            if (y1 + y2).is_zero() {
                return Point::Infinity;
            }
            (f.element(3) * x1 * x1 + a)
                .try_div(f.element(2) * y1)
                .expect("y1 is nonzero")
        } else {
            (y2 - y1).try_div(x2 - x1).expect("x1 != x2")
        };
        let x3 = slope * slope - x1 - x2;
        let y3 = slope * (x1 - x3) - y1;
        Point::Affine { x: x3, y: y3 }
    }

    pub fn ec_mul(&self, p: &Point, k: u64) -> Result<Point> {
        let a = self.elliptic_a()?;
        if !self.contains(p) {
            return Err(Error::PointNotOnCurve);
        }
        Ok(self.mul_unchecked(a, p, k))
    }

    fn mul_unchecked(&self, a: Fp, p: &Point, mut k: u64) -> Point {
        let mut acc = Point::Infinity;
        let mut base = *p;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add_unchecked(a, &acc, &base);
            }
            base = self.add_unchecked(a, &base, &base);
            k >>= 1;
        }
        acc
    }

    pub fn ec_sum<'a>(&self, points: impl IntoIterator<Item = &'a Point>) -> Result<Point> {
        let a = self.elliptic_a()?;
        let mut acc = Point::Infinity;
        for p in points {
            if !self.contains(p) {
                return Err(Error::PointNotOnCurve);
            }
            acc = self.add_unchecked(a, &acc, p);
        }
        Ok(acc)
    }

    /// Invariant factors and discrete-log table of `E(F_p)`.
    pub fn group_structure(&self) -> Result<GroupTable> {
        let a = self.elliptic_a()?;
        let points = self.points();
        let n = points.len() as u64;
        let primes = prime_factors(n);
        let order_of = |pt: &Point| {
            let mut ord = n;
            for &l in &primes {
                while ord % l == 0 && self.mul_unchecked(a, pt, ord / l).is_infinity() {
                    ord /= l;
                }
            }
            ord
        };

        // A point of maximal order generates a direct summand Z_{d2}.
        let mut large = Point::Infinity;
        let mut d2 = 1;
        for pt in &points {
            let ord = order_of(pt);
            if ord > d2 {
                d2 = ord;
                large = *pt;
                if d2 == n {
                    break;
                }
            }
        }
        let d1 = n / d2;

        let mut multiples: HashMap<Point, u64> = HashMap::with_capacity(d2 as usize);
        let mut acc = Point::Infinity;
        for k in 0..d2 {
            multiples.insert(acc, k);
            acc = self.add_unchecked(a, &acc, &large);
        }

        // Find a point whose image in E / <large> has order d1, then shift it
        // into a complement of <large>.
        let mut small = Point::Infinity;
        if d1 > 1 {
            for pt in &points {
                let mut acc = *pt;
                let mut j = 1;
                while !multiples.contains_key(&acc) {
                    acc = self.add_unchecked(a, &acc, pt);
                    j += 1;
                }
                if j == d1 {
                    let k = multiples[&acc];
                    debug_assert_eq!(k % d1, 0);
                    let shift = self.mul_unchecked(a, &large, k / d1);
                    let neg_shift = match shift {
                        Point::Infinity => Point::Infinity,
                        Point::Affine { x, y } => Point::Affine { x, y: -y },
                    };
                    small = self.add_unchecked(a, pt, &neg_shift);
                    break;
                }
            }
            debug_assert!(self.mul_unchecked(a, &small, d1).is_infinity());
        }

        let mut dlog = HashMap::with_capacity(n as usize);
        let mut by_coords = Vec::with_capacity(n as usize);
        let mut row = Point::Infinity;
        for u in 0..d1 {
            let mut pt = row;
            for v in 0..d2 {
                dlog.insert(pt, (u, v));
                by_coords.push(pt);
                pt = self.add_unchecked(a, &pt, &large);
            }
            row = self.add_unchecked(a, &row, &small);
        }
        debug_assert_eq!(dlog.len() as u64, n);
        Ok(GroupTable {
            d1,
            d2,
            g1: small,
            g2: large,
            dlog,
            by_coords,
        })
    }

    /// Monomial basis of `L(mQ)`, sorted by pole order at infinity.
    pub fn rr_basis(&self, m: usize) -> MonomialBasis {
        let y_pole = 2 * self.genus + 1;
        let mut terms: Vec<Monomial> = Vec::new();
        for j in 0..=1usize {
            let mut i = 0;
            while 2 * i + y_pole * j <= m {
                terms.push(Monomial { x_exp: i, y_exp: j });
                i += 1;
            }
        }
        terms.sort_by_key(|t| t.pole_order(self.genus));
        MonomialBasis {
            genus: self.genus,
            terms,
        }
    }

    /// Values of the basis functions at an affine point.
    pub fn eval_basis(&self, basis: &MonomialBasis, point: &Point) -> Result<Vec<Fp>> {
        let (x, y) = point.coords().ok_or(Error::EvalAtInfinity)?;
        if !self.contains(point) {
            return Err(Error::PointNotOnCurve);
        }
        let max_i = basis.terms.iter().map(|t| t.x_exp).max().unwrap_or(0);
        let mut powers = Vec::with_capacity(max_i + 1);
        let mut acc = self.field.one();
        for _ in 0..=max_i {
            powers.push(acc);
            acc *= x;
        }
        Ok(basis
            .terms
            .iter()
            .map(|t| {
                if t.y_exp == 1 {
                    powers[t.x_exp] * y
                } else {
                    powers[t.x_exp]
                }
            })
            .collect())
    }
}

impl fmt::Display for Curve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.spec())
    }
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub x_exp: usize,
    pub y_exp: usize,
}

impl Monomial {
    pub fn pole_order(&self, genus: usize) -> usize {
        2 * self.x_exp + (2 * genus + 1) * self.y_exp
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.x_exp, self.y_exp) {
            (0, 0) => write!(f, "1"),
            (0, _) => write!(f, "y"),
            (1, 0) => write!(f, "x"),
            (i, 0) => write!(f, "x^{i}"),
            (1, _) => write!(f, "xy"),
            (i, _) => write!(f, "x^{i}y"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialBasis {
    genus: usize,
    terms: Vec<Monomial>,
}

impl MonomialBasis {
    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn pole_orders(&self) -> Vec<usize> {
        self.terms.iter().map(|t| t.pole_order(self.genus)).collect()
    }
}

/// `E(F_p) = Z_{d1} x Z_{d2}` with `d1 | d2`, generated by `g1` (order `d1`)
/// and `g2` (order `d2`).
#[derive(Debug, Clone)]
pub struct GroupTable {
    pub d1: u64,
    pub d2: u64,
    pub g1: Point,
    pub g2: Point,
    dlog: HashMap<Point, (u64, u64)>,
    by_coords: Vec<Point>,
}

impl GroupTable {
    pub fn order(&self) -> u64 {
        self.d1 * self.d2
    }

    pub fn dlog(&self, p: &Point) -> Option<(u64, u64)> {
        self.dlog.get(p).copied()
    }

    pub fn point(&self, u: u64, v: u64) -> Point {
        self.by_coords[((u % self.d1) * self.d2 + v % self.d2) as usize]
    }

    pub fn group(&self) -> AbelianGroup {
        AbelianGroup::new(vec![self.d1, self.d2]).expect("d1 divides d2")
    }

    pub fn element(&self, p: &Point) -> Option<GroupElement> {
        self.dlog(p).map(|(u, v)| GroupElement::new(vec![u, v]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn e5() -> Curve {
        Curve::parse("ec:p=5,a=1,b=1").unwrap()
    }

    #[test]
    fn spec_round_trip_and_errors() {
        let s: CurveSpec = "hyp:p=7,f=1,0,0,0,0,1".parse().unwrap();
        assert_eq!(s.to_string(), "hyp:p=7,f=1,0,0,0,0,1");
        assert!("ec:p=5,a=1".parse::<CurveSpec>().is_err());
        assert!("weird:p=5".parse::<CurveSpec>().is_err());
        assert!("ec:p=5,a=x,b=1".parse::<CurveSpec>().is_err());
    }

    #[test]
    fn construction_examples() {
        let c = e5();
        assert_eq!(c.genus(), 1);
        assert_eq!(Curve::parse("ec:p=5,a=0,b=0"), Err(Error::SingularCurve));
        let h = Curve::parse("hyp:p=7,f=1,0,0,0,0,1").unwrap();
        assert_eq!(h.genus(), 2);
        assert_eq!(Curve::parse("hyp:p=7,f=1,0,0,0,1"), Err(Error::BadDegree(4)));
        assert_eq!(Curve::parse("hyp:p=7,f=1,0,1"), Err(Error::BadDegree(2)));
        // (x - 1)^2 (x^3 + 1) has a repeated root.
        assert_eq!(
            Curve::parse("hyp:p=7,f=1,-2,1,1,-2,1"),
            Err(Error::SingularCurve)
        );
        assert!(matches!(Curve::parse("ec:p=9,a=1,b=1"), Err(Error::NotPrime(9))));
    }

    /// Independent enumeration: test every (x, y) pair directly.
    fn brute_force_count(c: &Curve) -> usize {
        let f = c.field();
        let mut n = 1;
        for x in f.elements() {
            for y in f.elements() {
                if y * y == c.rhs(x) {
                    n += 1;
                }
            }
        }
        n
    }

    #[test]
    fn enumeration_examples() {
        let c = e5();
        let pts = c.points();
        assert_eq!(pts.len(), 9);
        assert_eq!(pts.iter().filter(|p| p.is_infinity()).count(), 1);
        assert!(pts.iter().all(|p| c.contains(p)));
        assert_eq!(c.point_count(), 9);

        let h = Curve::parse("hyp:p=11,f=1,0,0,0,0,1").unwrap();
        let n = h.points().len();
        assert_eq!(n, brute_force_count(&h));
        let w = 4.0 * 11f64.sqrt();
        assert!((n as f64 - 12.0).abs() <= w);
    }

    #[test]
    fn hasse_window_on_many_curves() {
        for p in [5u64, 7, 11, 13, 17, 23, 29, 31] {
            for b in 1..4 {
                if let Ok(c) = Curve::parse(&format!("ec:p={p},a=1,b={b}")) {
                    let n = c.points().len();
                    assert_eq!(n, brute_force_count(&c));
                    assert!((n as f64 - (p as f64 + 1.0)).abs() <= 2.0 * (p as f64).sqrt());
                }
                if let Ok(c) = Curve::parse(&format!("hyp:p={p},f={b},1,0,0,0,1")) {
                    let n = c.points().len();
                    assert_eq!(n, brute_force_count(&c));
                    assert!((n as f64 - (p as f64 + 1.0)).abs() <= 4.0 * (p as f64).sqrt());
                }
            }
        }
    }

    #[test]
    fn group_law_examples() {
        let c = e5();
        let p = c.affine_point(0, 1).unwrap();
        assert_eq!(c.ec_add(&p, &Point::Infinity).unwrap(), p);
        assert_eq!(c.ec_add(&p, &c.ec_neg(&p).unwrap()).unwrap(), Point::Infinity);
        let doubled = c.ec_add(&p, &p).unwrap();
        assert_eq!(doubled, c.affine_point(4, 2).unwrap());
        assert!(c.contains(&doubled));
        let bogus = Point::Affine {
            x: c.field().element(0),
            y: c.field().element(2),
        };
        assert_eq!(c.ec_add(&p, &bogus), Err(Error::PointNotOnCurve));
        let h = Curve::parse("hyp:p=7,f=1,0,0,0,0,1").unwrap();
        assert_eq!(h.ec_add(&Point::Infinity, &Point::Infinity), Err(Error::WrongGenus(2)));
    }

    #[test]
    fn group_law_axioms() {
        let c = Curve::parse("ec:p=101,a=1,b=3").unwrap();
        let pts = c.points();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let p = pts[rng.gen_range(0..pts.len())];
            let q = pts[rng.gen_range(0..pts.len())];
            let r = pts[rng.gen_range(0..pts.len())];
            let pq = c.ec_add(&p, &q).unwrap();
            assert!(c.contains(&pq));
            assert_eq!(pq, c.ec_add(&q, &p).unwrap());
            assert_eq!(
                c.ec_add(&pq, &r).unwrap(),
                c.ec_add(&p, &c.ec_add(&q, &r).unwrap()).unwrap()
            );
        }
        let n = pts.len() as u64;
        for p in &pts {
            assert_eq!(c.ec_mul(p, n).unwrap(), Point::Infinity);
        }
    }

    /// Exhaustive order computation, independent of `group_structure`.
    fn max_order_brute(c: &Curve) -> u64 {
        c.points()
            .iter()
            .map(|p| {
                let mut acc = *p;
                let mut k = 1;
                while !acc.is_infinity() {
                    acc = c.ec_add(&acc, p).unwrap();
                    k += 1;
                }
                k
            })
            .max()
            .unwrap()
    }

    #[test]
    fn group_structure_examples() {
        let c = e5();
        let t = c.group_structure().unwrap();
        assert_eq!((t.d1, t.d2), (1, 9));
        assert_eq!(max_order_brute(&c), 9);

        // Non-cyclic: y^2 = x^3 - x over F_13 has full 2-torsion.
        let c = Curve::parse("ec:p=13,a=-1,b=0").unwrap();
        let t = c.group_structure().unwrap();
        assert_eq!(t.order() as usize, c.points().len());
        assert!(t.d1 > 1);
        assert_eq!(t.d2 % t.d1, 0);
        assert_eq!(12 % t.d1, 0);
        assert_eq!(max_order_brute(&c), t.d2);
    }

    #[test]
    fn dlog_is_an_isomorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for spec in ["ec:p=13,a=-1,b=0", "ec:p=101,a=1,b=3", "ec:p=37,a=-1,b=0", "ec:p=41,a=3,b=0"] {
            let c = Curve::parse(spec).unwrap();
            let t = c.group_structure().unwrap();
            let pts = c.points();
            assert_eq!(t.order() as usize, pts.len());
            assert_eq!((c.field().characteristic() - 1) % t.d1, 0);
            let mut seen = std::collections::HashSet::new();
            for p in &pts {
                let (u, v) = t.dlog(p).unwrap();
                assert!(u < t.d1 && v < t.d2);
                assert!(seen.insert((u, v)));
                assert_eq!(t.point(u, v), *p);
            }
            for _ in 0..100 {
                let p = pts[rng.gen_range(0..pts.len())];
                let q = pts[rng.gen_range(0..pts.len())];
                let (u1, v1) = t.dlog(&p).unwrap();
                let (u2, v2) = t.dlog(&q).unwrap();
                let s = c.ec_add(&p, &q).unwrap();
                assert_eq!(t.dlog(&s).unwrap(), ((u1 + u2) % t.d1, (v1 + v2) % t.d2));
            }
        }
    }

    #[test]
    fn prime_order_group_is_cyclic() {
        for b in 1..40 {
            if let Ok(c) = Curve::parse(&format!("ec:p=97,a=2,b={b}")) {
                let n = c.points().len() as u64;
                if crate::field::is_prime(n) {
                    let t = c.group_structure().unwrap();
                    assert_eq!((t.d1, t.d2), (1, n));
                }
            }
        }
    }

    #[test]
    fn rr_basis_examples() {
        let c = e5();
        let basis = c.rr_basis(3);
        let names: Vec<String> = basis.terms().iter().map(ToString::to_string).collect();
        assert_eq!(names, ["1", "x", "y"]);
        assert_eq!(basis.pole_orders(), vec![0, 2, 3]);
        assert_eq!(c.rr_basis(0).len(), 1);

        let h = Curve::parse("hyp:p=7,f=1,0,0,0,0,1").unwrap();
        let basis = h.rr_basis(5);
        let names: Vec<String> = basis.terms().iter().map(ToString::to_string).collect();
        assert_eq!(names, ["1", "x", "x^2", "y"]);
        assert_eq!(basis.pole_orders(), vec![0, 2, 4, 5]);
    }

    #[test]
    fn rr_dimension_law() {
        let specs = [
            "ec:p=7,a=1,b=1",
            "hyp:p=7,f=1,0,0,0,0,1",
            "hyp:p=11,f=2,1,0,0,0,0,0,1",
        ];
        for spec in specs {
            let c = Curve::parse(spec).unwrap();
            let g = c.genus();
            for m in 0..=30 {
                let basis = c.rr_basis(m);
                let orders = basis.pole_orders();
                assert!(orders.windows(2).all(|w| w[0] < w[1]));
                assert!(orders.iter().all(|&o| o <= m));
                if m + 1 >= 2 * g {
                    assert_eq!(basis.len(), m + 1 - g, "genus {g}, m {m}");
                }
            }
        }
    }

    #[test]
    fn eval_basis_examples() {
        let c = e5();
        let p = c.affine_point(0, 1).unwrap();
        let one = c.eval_basis(&c.rr_basis(0), &p).unwrap();
        assert_eq!(one, vec![c.field().one()]);
        let vals = c.eval_basis(&c.rr_basis(3), &p).unwrap();
        assert_eq!(vals.iter().map(Fp::value).collect::<Vec<_>>(), vec![1, 0, 1]);
        assert_eq!(
            c.eval_basis(&c.rr_basis(3), &Point::Infinity),
            Err(Error::EvalAtInfinity)
        );

        let h = Curve::parse("hyp:p=7,f=1,0,0,0,0,1").unwrap();
        let f = h.field();
        // f(1) = 2 = 3^2 mod 7.
        let p = h.affine_point(1, 3).unwrap();
        let vals = h.eval_basis(&h.rr_basis(5), &p).unwrap();
        assert_eq!(vals, vec![f.one(), f.one(), f.one(), f.element(3)]);
        assert_eq!(vals[3] * vals[3], h.rhs(f.one()));
    }
}
