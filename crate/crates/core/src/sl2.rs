//! Exact arithmetic in SL₂(ℤ) and its finite quotients SL₂(ℤ/nℤ).
//!
//! Matrices carry arbitrary-precision entries. Words in the generators
//!
//! ```text
//! S = [[0,-1],[1,0]]      T = [[1,1],[0,1]]
//! ```
//!
//! are stored run-length encoded and evaluate by left-to-right
//! multiplication.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeSeq;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Default cap on the number of elements a mod-n closure may produce.
pub const DEFAULT_CLOSURE_CAP: usize = 10_000_000;

/// A 2×2 integer matrix of determinant one.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MatZ2 {
    a: BigInt,
    b: BigInt,
    c: BigInt,
    d: BigInt,
}

impl MatZ2 {
    pub fn new(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Result<Self> {
        let det = &a * &d - &b * &c;
        if !det.is_one() {
            return Err(Error::Determinant(det.to_string()));
        }
        Ok(Self { a, b, c, d })
    }

    /// Builds a matrix from machine integers; fails unless `ad - bc = 1`.
    pub fn from_i64(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        Self::new(a.into(), b.into(), c.into(), d.into())
    }

    fn raw(a: i64, b: i64, c: i64, d: i64) -> Self {
        Self {
            a: a.into(),
            b: b.into(),
            c: c.into(),
            d: d.into(),
        }
    }

    pub fn identity() -> Self {
        Self::raw(1, 0, 0, 1)
    }

    pub fn neg_identity() -> Self {
        Self::raw(-1, 0, 0, -1)
    }

    pub fn s() -> Self {
        Self::raw(0, -1, 1, 0)
    }

    pub fn t() -> Self {
        Self::raw(1, 1, 0, 1)
    }

    /// `[[1, k], [0, 1]]`
    pub fn t_pow(k: i64) -> Self {
        Self::raw(1, k, 0, 1)
    }

    pub fn entries(&self) -> [&BigInt; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    /// Entries as `i64` when all of them fit.
    pub fn to_i64(&self) -> Option<[i64; 4]> {
        Some([
            self.a.to_i64()?,
            self.b.to_i64()?,
            self.c.to_i64()?,
            self.d.to_i64()?,
        ])
    }

    pub fn det(&self) -> BigInt {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn is_identity(&self) -> bool {
        self.a.is_one() && self.b.is_zero() && self.c.is_zero() && self.d.is_one()
    }

    pub fn inverse(&self) -> Self {
        Self {
            a: self.d.clone(),
            b: -&self.b,
            c: -&self.c,
            d: self.a.clone(),
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            a: -&self.a,
            b: -&self.b,
            c: -&self.c,
            d: -&self.d,
        }
    }

    /// `self^k` for any integer `k` (negative powers use the inverse).
    pub fn pow(&self, k: i64) -> Self {
        let mut base = if k < 0 { self.inverse() } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = Self::identity();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// `M ≡ N (mod n)` entrywise.
    pub fn congruent_mod(&self, other: &Self, n: u64) -> bool {
        reduce_mod(self, n) == reduce_mod(other, n)
    }
}

impl Mul for &MatZ2 {
    type Output = MatZ2;

    fn mul(self, rhs: &MatZ2) -> MatZ2 {
        MatZ2 {
            a: &self.a * &rhs.a + &self.b * &rhs.c,
            b: &self.a * &rhs.b + &self.b * &rhs.d,
            c: &self.c * &rhs.a + &self.d * &rhs.c,
            d: &self.c * &rhs.b + &self.d * &rhs.d,
        }
    }
}

impl Mul for MatZ2 {
    type Output = MatZ2;

    fn mul(self, rhs: MatZ2) -> MatZ2 {
        &self * &rhs
    }
}

impl fmt::Display for MatZ2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{},{}],[{},{}]]", self.a, self.b, self.c, self.d)
    }
}

fn serialize_bigint<S: SerializeSeq>(seq: &mut S, x: &BigInt) -> std::result::Result<(), S::Error> {
    match x.to_i64() {
        Some(v) => seq.serialize_element(&v),
        None => seq.serialize_element(&x.to_string()),
    }
}

struct Row<'a>(&'a BigInt, &'a BigInt);

impl Serialize for Row<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(2))?;
        serialize_bigint(&mut seq, self.0)?;
        serialize_bigint(&mut seq, self.1)?;
        seq.end()
    }
}

/// Serializes as `[[a,b],[c,d]]`; entries outside the `i64` range become
/// decimal strings.
impl Serialize for MatZ2 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(2))?;
        seq.serialize_element(&Row(&self.a, &self.b))?;
        seq.serialize_element(&Row(&self.c, &self.d))?;
        seq.end()
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Entry {
    Int(i64),
    Text(String),
}

impl<'de> Deserialize<'de> for MatZ2 {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let rows: [[Entry; 2]; 2] = Deserialize::deserialize(de)?;
        let conv = |e: &Entry| -> std::result::Result<BigInt, D::Error> {
            match e {
                Entry::Int(v) => Ok(BigInt::from(*v)),
                Entry::Text(t) => t.parse().map_err(serde::de::Error::custom),
            }
        };
        MatZ2::new(
            conv(&rows[0][0])?,
            conv(&rows[0][1])?,
            conv(&rows[1][0])?,
            conv(&rows[1][1])?,
        )
        .map_err(serde::de::Error::custom)
    }
}

/// Generator of SL₂(ℤ).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Gen {
    S,
    T,
}

impl Gen {
    pub fn matrix(self) -> MatZ2 {
        match self {
            Gen::S => MatZ2::s(),
            Gen::T => MatZ2::t(),
        }
    }
}

/// A word in `S`, `T` and their inverses, stored as `(generator, exponent)`
/// runs. Adjacent runs of the same generator are merged, so the word is
/// always freely reduced.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct STWord {
    runs: Vec<(Gen, i64)>,
}

impl STWord {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_runs<I: IntoIterator<Item = (Gen, i64)>>(runs: I) -> Self {
        let mut w = Self::new();
        for (g, e) in runs {
            w.push(g, e);
        }
        w
    }

    pub fn gen(g: Gen) -> Self {
        Self::from_runs([(g, 1)])
    }

    /// Appends `g^exp`, merging with the last run when possible.
    pub fn push(&mut self, g: Gen, exp: i64) {
        if exp == 0 {
            return;
        }
        if let Some(last) = self.runs.last_mut() {
            if last.0 == g {
                match last.1.checked_add(exp) {
                    Some(0) => {
                        self.runs.pop();
                    }
                    Some(sum) => last.1 = sum,
                    None => self.runs.push((g, exp)),
                }
                return;
            }
        }
        self.runs.push((g, exp));
    }

    pub fn runs(&self) -> &[(Gen, i64)] {
        &self.runs
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }

    /// Number of letters, counting `T^3` as three.
    pub fn len(&self) -> u64 {
        self.runs.iter().map(|(_, e)| e.unsigned_abs()).sum()
    }

    pub fn inverse(&self) -> Self {
        Self::from_runs(self.runs.iter().rev().map(|&(g, e)| (g, -e)))
    }

    pub fn concat(&self, other: &Self) -> Self {
        let mut w = self.clone();
        for &(g, e) in &other.runs {
            w.push(g, e);
        }
        w
    }

    /// Single letters `(generator, ±1)` from left to right.
    pub fn letters(&self) -> impl Iterator<Item = (Gen, i8)> + '_ {
        self.runs.iter().flat_map(|&(g, e)| {
            let sign = if e > 0 { 1 } else { -1 };
            std::iter::repeat_n((g, sign), e.unsigned_abs() as usize)
        })
    }

    pub fn eval(&self) -> MatZ2 {
        eval_word(self)
    }
}

/// Short runs are spelled out letter by letter, longer ones as `T^k`; the
/// empty word prints as `I`.
impl fmt::Display for STWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.runs.is_empty() {
            return f.write_str("I");
        }
        for &(g, e) in &self.runs {
            let (upper, lower) = match g {
                Gen::S => ('S', 's'),
                Gen::T => ('T', 't'),
            };
            if e.unsigned_abs() > 4 {
                write!(f, "{upper}^{e}")?;
            } else {
                let ch = if e > 0 { upper } else { lower };
                for _ in 0..e.unsigned_abs() {
                    write!(f, "{ch}")?;
                }
            }
        }
        Ok(())
    }
}

/// Parses `S`, `s`, `T`, `t` letters (lowercase = inverse). A letter may be
/// followed by `^k` with a signed integer exponent; whitespace, `.` and `*`
/// are ignored. `I`, `1` or the empty string denote the identity.
impl FromStr for STWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let trimmed = s.trim();
        if trimmed == "I" || trimmed == "1" || trimmed == "id" {
            return Ok(Self::new());
        }
        let chars: Vec<char> = trimmed.chars().collect();
        let mut w = Self::new();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            i += 1;
            let (g, sign) = match c {
                'S' => (Gen::S, 1),
                's' => (Gen::S, -1),
                'T' => (Gen::T, 1),
                't' => (Gen::T, -1),
                ' ' | '.' | '*' => continue,
                other => {
                    return Err(Error::Parse(format!(
                        "unexpected character {other:?} in word {s:?}"
                    )))
                }
            };
            let mut exp: i64 = 1;
            if i < chars.len() && chars[i] == '^' {
                i += 1;
                let start = i;
                if i < chars.len() && (chars[i] == '-' || chars[i] == '+') {
                    i += 1;
                }
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[start..i].iter().collect();
                exp = digits
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad exponent in word {s:?}")))?;
            }
            w.push(g, sign * exp);
        }
        Ok(w)
    }
}

impl Serialize for STWord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for STWord {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(de)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Evaluates a word by left-to-right multiplication.
pub fn eval_word(w: &STWord) -> MatZ2 {
    let s = MatZ2::s();
    let s_inv = s.inverse();
    let mut acc = MatZ2::identity();
    for &(g, e) in w.runs() {
        let factor = match g {
            // S has order four.
            Gen::S => match e.rem_euclid(4) {
                0 => MatZ2::identity(),
                1 => s.clone(),
                2 => MatZ2::neg_identity(),
                _ => s_inv.clone(),
            },
            Gen::T => MatZ2::t_pow(e),
        };
        acc = &acc * &factor;
    }
    acc
}

/// Writes `m` as a word in `S` and `T`.
///
/// Euclidean reduction on the first column: left multiplication by
/// `T^-q` shrinks `a` modulo `c`, then `S^-1` swaps the rows. When `c`
/// vanishes the remainder is `±T^k`, with the sign absorbed as `S^2`.
pub fn decompose_st(m: &MatZ2) -> STWord {
    // Letters L_1..L_r with L_r ... L_1 m = ±T^k.
    let mut applied: Vec<(Gen, BigInt)> = Vec::new();
    let (mut a, mut b, mut c, mut d) = (m.a.clone(), m.b.clone(), m.c.clone(), m.d.clone());
    while !c.is_zero() {
        // q = round(a / c), so that |a - qc| <= |c| / 2.
        let c_abs = c.abs();
        let num: BigInt = &a * 2 + &c_abs;
        let q = num.div_floor(&(&c_abs * 2)) * c.signum();
        if !q.is_zero() {
            a -= &q * &c;
            b -= &q * &d;
            applied.push((Gen::T, -q));
        }
        // S^-1 [[a,b],[c,d]] = [[c,d],[-a,-b]]
        let (na, nb, nc, nd) = (c.clone(), d.clone(), -a, -b);
        a = na;
        b = nb;
        c = nc;
        d = nd;
        applied.push((Gen::S, BigInt::from(-1)));
    }
    // Now [[a,b],[0,d]] with a = d = ±1.
    let mut w = STWord::new();
    for (g, e) in &applied {
        push_big(&mut w, *g, &-e);
    }
    if a.is_negative() {
        // -T^k = S^2 T^-k... keep literal: [[-1,b],[0,-1]] = S^2 · T^{-b}
        w.push(Gen::S, 2);
        push_big(&mut w, Gen::T, &-b);
    } else {
        push_big(&mut w, Gen::T, &b);
    }
    w
}

fn push_big(w: &mut STWord, g: Gen, e: &BigInt) {
    let mut rest = e.clone();
    let chunk = BigInt::from(i64::MAX);
    while rest.abs() > chunk {
        let step = if rest.is_positive() {
            i64::MAX
        } else {
            -i64::MAX
        };
        w.push(g, step);
        rest -= step;
    }
    if let Some(v) = rest.to_i64() {
        w.push(g, v);
    }
}

/// An element of SL₂(ℤ/nℤ), entries in `0..n`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct MatModN {
    n: u64,
    e: [u64; 4],
}

impl MatModN {
    /// Entries are reduced into `0..n`; fails unless the determinant is 1 mod n.
    pub fn new(n: u64, entries: [i64; 4]) -> Result<Self> {
        if n == 0 {
            return Err(Error::Modulus(n));
        }
        let m = n as i128;
        let e = entries.map(|x| (x as i128).rem_euclid(m) as u64);
        let out = Self { n, e };
        if out.det() != 1 % n {
            return Err(Error::Determinant(format!("{} (mod {n})", out.det())));
        }
        Ok(out)
    }

    pub fn identity(n: u64) -> Self {
        Self {
            n,
            e: [1 % n, 0, 0, 1 % n],
        }
    }

    pub fn modulus(&self) -> u64 {
        self.n
    }

    pub fn entries(&self) -> [u64; 4] {
        self.e
    }

    fn det(&self) -> u64 {
        let n = self.n as u128;
        let [a, b, c, d] = self.e.map(|x| x as u128);
        ((a * d % n + n - b * c % n) % n) as u64
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.n)
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        debug_assert_eq!(self.n, rhs.n);
        let n = self.n as u128;
        let [a, b, c, d] = self.e.map(|x| x as u128);
        let [p, q, r, s] = rhs.e.map(|x| x as u128);
        Self {
            n: self.n,
            e: [
                ((a * p + b * r) % n) as u64,
                ((a * q + b * s) % n) as u64,
                ((c * p + d * r) % n) as u64,
                ((c * q + d * s) % n) as u64,
            ],
        }
    }

    pub fn inverse(&self) -> Self {
        let n = self.n;
        let [a, b, c, d] = self.e;
        Self {
            n,
            e: [d, (n - b) % n, (n - c) % n, a],
        }
    }

    pub fn pow(&self, k: u64) -> Self {
        let mut base = *self;
        let mut e = k;
        let mut acc = Self::identity(self.n);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Least `k >= 1` with `self^k = I`.
    pub fn order(&self) -> u64 {
        let mut k = 1;
        let mut acc = *self;
        while !acc.is_identity() {
            acc = acc.mul(self);
            k += 1;
        }
        k
    }
}

impl fmt::Display for MatModN {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.e;
        write!(f, "[[{a},{b}],[{c},{d}]]_{}", self.n)
    }
}

impl Serialize for MatModN {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let [a, b, c, d] = self.e;
        [[a, b], [c, d]].serialize(s)
    }
}

pub fn reduce_mod(m: &MatZ2, n: u64) -> MatModN {
    assert!(n >= 1, "modulus must be positive");
    let modulus = BigInt::from(n);
    let r = |x: &BigInt| x.mod_floor(&modulus).to_u64().expect("residue fits u64");
    MatModN {
        n,
        e: [r(&m.a), r(&m.b), r(&m.c), r(&m.d)],
    }
}

fn check_coprime(factors: &[u64]) -> Result<()> {
    for (i, &p) in factors.iter().enumerate() {
        if p == 0 {
            return Err(Error::Modulus(0));
        }
        for &q in &factors[i + 1..] {
            if p.gcd(&q) != 1 {
                return Err(Error::NotCoprime(p, q));
            }
        }
    }
    Ok(())
}

/// Splits `m` into its residues modulo pairwise coprime factors.
pub fn crt_split(m: &MatZ2, factors: &[u64]) -> Result<Vec<MatModN>> {
    check_coprime(factors)?;
    Ok(factors.iter().map(|&f| reduce_mod(m, f)).collect())
}

/// Splits an element of SL₂(ℤ/nℤ) along a coprime factorisation of `n`.
pub fn crt_split_mod(m: &MatModN, factors: &[u64]) -> Result<Vec<MatModN>> {
    check_coprime(factors)?;
    let product: u64 = factors.iter().product();
    if product != m.n {
        return Err(Error::Parse(format!(
            "factors multiply to {product}, expected {}",
            m.n
        )));
    }
    Ok(factors
        .iter()
        .map(|&f| MatModN {
            n: f,
            e: m.e.map(|x| x % f),
        })
        .collect())
}

/// Inverse of [`crt_split_mod`].
pub fn crt_combine(parts: &[MatModN]) -> Result<MatModN> {
    let factors: Vec<u64> = parts.iter().map(|p| p.n).collect();
    check_coprime(&factors)?;
    let n: u64 = factors.iter().product();
    let mut e = [0u64; 4];
    for (k, slot) in e.iter_mut().enumerate() {
        let mut acc: u128 = 0;
        for part in parts {
            let f = part.n;
            let rest = n / f;
            // rest * inv(rest mod f) is 1 mod f and 0 mod the other factors
            let inv = mod_inverse(rest % f, f).unwrap_or(0);
            acc += part.e[k] as u128 * rest as u128 % n as u128 * inv as u128 % n as u128;
        }
        *slot = (acc % n as u128) as u64;
    }
    Ok(MatModN { n, e })
}

fn mod_inverse(x: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let g = (x as i128).extended_gcd(&(m as i128));
    if g.gcd != 1 {
        return None;
    }
    Some(g.x.rem_euclid(m as i128) as u64)
}

/// Order of `m` in SL₂(ℤ/nℤ).
pub fn element_order_mod(m: &MatZ2, n: u64) -> u64 {
    reduce_mod(m, n).order()
}

/// `|SL₂(ℤ/nℤ)| = n³ ∏_{p | n} (1 - p⁻²)`.
pub fn sl2_order(n: u64) -> u64 {
    let mut order = n * n * n;
    let mut rest = n;
    let mut p = 2;
    while p * p <= rest {
        if rest.is_multiple_of(p) {
            order = order / (p * p) * (p * p - 1);
            while rest.is_multiple_of(p) {
                rest /= p;
            }
        }
        p += 1;
    }
    if rest > 1 {
        order = order / (rest * rest) * (rest * rest - 1);
    }
    order
}

/// A finite subgroup of SL₂(ℤ/nℤ), stored as a hashed element set.
#[derive(Clone, Debug)]
pub struct SubgroupClosure {
    n: u64,
    elements: HashSet<[u64; 4]>,
}

impl SubgroupClosure {
    pub fn modulus(&self) -> u64 {
        self.n
    }

    pub fn size(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, m: &MatModN) -> bool {
        m.n == self.n && self.elements.contains(&m.e)
    }

    pub fn iter(&self) -> impl Iterator<Item = MatModN> + '_ {
        self.elements.iter().map(|&e| MatModN { n: self.n, e })
    }
}

/// Breadth-first closure of `gens` inside SL₂(ℤ/nℤ).
pub fn subgroup_closure_mod(gens: &[MatModN], n: u64, cap: usize) -> Result<SubgroupClosure> {
    if let Some(bad) = gens.iter().find(|g| g.n != n) {
        return Err(Error::Modulus(bad.n));
    }
    let id = MatModN::identity(n);
    let mut elements = HashSet::new();
    elements.insert(id.e);
    let mut queue = VecDeque::from([id]);
    // Right multiplication by generators reaches every product.
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = x.mul(g);
            if elements.insert(y.e) {
                if elements.len() > cap {
                    return Err(Error::ClosureCap(cap));
                }
                queue.push_back(y);
            }
        }
    }
    Ok(SubgroupClosure { n, elements })
}
