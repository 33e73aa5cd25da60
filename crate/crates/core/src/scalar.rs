//! Exact arithmetic in the cyclotomic field `Q(q)`, `q` a primitive `m`-th
//! root of unity.
//!
//! Elements are stored as rational polynomials of degree below `phi(m)`,
//! reduced modulo the `m`-th cyclotomic polynomial. Reducing modulo `x^m - 1`
//! instead would leave zero divisors, so every structure in this crate works
//! over the quotient by `Phi_m`.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Parses `p`, `p/q` or `-p/q` into a reduced rational with positive denominator.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::Parse(format!("`{s}` is not a rational of the form p/q"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let valid_int = |t: &str, allow_sign: bool| {
        let digits = if allow_sign {
            t.strip_prefix('-').or_else(|| t.strip_prefix('+')).unwrap_or(t)
        } else {
            t
        };
        !digits.is_empty() && digits.len() <= 4096 && digits.bytes().all(|b| b.is_ascii_digit())
    };
    if !valid_int(num, true) || !valid_int(den, false) {
        return Err(bad());
    }
    let num = BigInt::from_str(num).map_err(|_| bad())?;
    let den = BigInt::from_str(den).map_err(|_| bad())?;
    if den.is_zero() {
        return Err(Error::Parse(format!("`{s}` has a zero denominator")));
    }
    Ok(Rational::new(num, den))
}

/// `num/den` form, always with an explicit denominator.
pub fn rational_to_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn poly_trim(p: &mut Vec<BigInt>) {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

/// Exact quotient `a / b` for a monic `b` that divides `a`.
fn poly_div_monic(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let db = b.len() - 1;
    let mut rem = a.to_vec();
    if rem.len() < b.len() {
        return Vec::new();
    }
    let mut quot = vec![BigInt::zero(); rem.len() - db];
    for k in (0..quot.len()).rev() {
        let c = rem[k + db].clone();
        if c.is_zero() {
            continue;
        }
        for (i, bi) in b.iter().enumerate() {
            rem[k + i] -= &c * bi;
        }
        quot[k] = c;
    }
    debug_assert!(rem.iter().all(Zero::is_zero));
    poly_trim(&mut quot);
    quot
}

/// The `m`-th cyclotomic polynomial, coefficients in ascending degree.
///
/// Computed as `x^m - 1` divided by `Phi_d` for every proper divisor `d` of `m`.
pub fn cyclotomic_polynomial(m: u32) -> Vec<BigInt> {
    assert!(m >= 1, "cyclotomic_polynomial requires m >= 1");
    let mut p = vec![BigInt::zero(); m as usize + 1];
    p[0] = -BigInt::one();
    p[m as usize] = BigInt::one();
    for d in 1..m {
        if m % d == 0 {
            p = poly_div_monic(&p, &cyclotomic_polynomial(d));
        }
    }
    p
}

/// Euler's totient.
pub fn euler_phi(m: u32) -> u32 {
    (1..=m).filter(|k| k.gcd(&m) == 1).count() as u32
}

/// The field `Q[x]/Phi_m` with precomputed reduction tables.
#[derive(Debug)]
pub struct CycField {
    order: u32,
    degree: usize,
    modulus: Vec<BigInt>,
    /// `x^k mod Phi_m` for `k < 2 * degree - 1`.
    fold: Vec<Vec<BigInt>>,
    /// `q^k` for `k < order`.
    powers: Vec<Vec<Rational>>,
}

/// Fields are determined by their order.
impl PartialEq for CycField {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order
    }
}

impl Eq for CycField {}

fn reduce_step(cur: &mut Vec<BigInt>, modulus: &[BigInt]) {
    // multiply by x, then fold the top coefficient back
    let d = modulus.len() - 1;
    cur.insert(0, BigInt::zero());
    let top = cur.pop().unwrap_or_default();
    if !top.is_zero() {
        for i in 0..d {
            cur[i] -= &top * &modulus[i];
        }
    }
}

impl CycField {
    /// Field containing a primitive `order`-th root of unity.
    pub fn new(order: u32) -> Result<Arc<Self>> {
        if order == 0 {
            return Err(Error::InvalidParameter("root-of-unity order must be >= 1".into()));
        }
        let modulus = cyclotomic_polynomial(order);
        let degree = modulus.len() - 1;
        let table_len = (2 * degree - 1).max(order as usize);
        let mut fold = Vec::with_capacity(table_len);
        let mut cur = vec![BigInt::zero(); degree];
        cur[0] = BigInt::one();
        for _ in 0..table_len {
            fold.push(cur.clone());
            reduce_step(&mut cur, &modulus);
        }
        let powers = fold[..order as usize]
            .iter()
            .map(|v| v.iter().map(|c| Rational::from_integer(c.clone())).collect())
            .collect();
        fold.truncate(2 * degree - 1);
        Ok(Arc::new(CycField { order, degree, modulus, fold, powers }))
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn modulus(&self) -> &[BigInt] {
        &self.modulus
    }

    pub fn zero(self: &Arc<Self>) -> CycScalar {
        CycScalar { field: Arc::clone(self), coeffs: vec![Rational::zero(); self.degree] }
    }

    pub fn one(self: &Arc<Self>) -> CycScalar {
        self.from_rational(Rational::one())
    }

    pub fn from_int(self: &Arc<Self>, v: i64) -> CycScalar {
        self.from_rational(Rational::from_integer(BigInt::from(v)))
    }

    pub fn from_rational(self: &Arc<Self>, r: Rational) -> CycScalar {
        let mut s = self.zero();
        s.coeffs[0] = r;
        s
    }

    /// `q^i`, with `i` reduced modulo the order.
    pub fn q_power(self: &Arc<Self>, i: i64) -> CycScalar {
        let k = i.rem_euclid(self.order as i64) as usize;
        CycScalar { field: Arc::clone(self), coeffs: self.powers[k].clone() }
    }

    /// Builds an element from coefficients of `1, q, q^2, ...`; any length is
    /// accepted and reduced.
    pub fn from_poly(self: &Arc<Self>, poly: &[Rational]) -> CycScalar {
        let mut s = self.zero();
        for (k, c) in poly.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let basis = self.q_power(k as i64);
            for (acc, b) in s.coeffs.iter_mut().zip(&basis.coeffs) {
                if !b.is_zero() {
                    *acc += c * b;
                }
            }
        }
        s
    }
}

/// An element of `Q(q)` in its canonical representative.
#[derive(Clone)]
pub struct CycScalar {
    field: Arc<CycField>,
    coeffs: Vec<Rational>,
}

impl CycScalar {
    pub fn field(&self) -> &Arc<CycField> {
        &self.field
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    /// The rational value when the element lies in `Q`.
    pub fn as_rational(&self) -> Option<&Rational> {
        self.coeffs[1..].iter().all(Zero::is_zero).then(|| &self.coeffs[0])
    }

    fn same_field(&self, other: &CycScalar) {
        assert_eq!(
            self.field.order, other.field.order,
            "mixing scalars from Q(zeta_{}) and Q(zeta_{})",
            self.field.order, other.field.order
        );
    }

    pub fn scale(&self, r: &Rational) -> CycScalar {
        CycScalar { field: Arc::clone(&self.field), coeffs: self.coeffs.iter().map(|c| c * r).collect() }
    }

    fn mul_ref(&self, other: &CycScalar) -> CycScalar {
        self.same_field(other);
        if self.is_one() {
            return other.clone();
        }
        if other.is_one() {
            return self.clone();
        }
        let d = self.field.degree;
        let mut prod = vec![Rational::zero(); 2 * d - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        let mut coeffs: Vec<Rational> = prod[..d].to_vec();
        for (k, c) in prod.iter().enumerate().skip(d) {
            if c.is_zero() {
                continue;
            }
            for (acc, f) in coeffs.iter_mut().zip(&self.field.fold[k]) {
                if !f.is_zero() {
                    *acc += c * Rational::from_integer(f.clone());
                }
            }
        }
        CycScalar { field: Arc::clone(&self.field), coeffs }
    }

    /// Multiplicative inverse via the extended Euclidean algorithm against `Phi_m`.
    pub fn inv(&self) -> Result<CycScalar> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if let Some(r) = self.as_rational() {
            return Ok(self.field.from_rational(r.recip()));
        }
        let modulus: Vec<Rational> =
            self.field.modulus.iter().map(|c| Rational::from_integer(c.clone())).collect();
        let (g, s) = rational_egcd(&self.coeffs, &modulus);
        // g is a nonzero constant because Phi_m is irreducible
        debug_assert_eq!(g.len(), 1);
        let g_inv = g[0].recip();
        let s: Vec<Rational> = s.iter().map(|c| c * &g_inv).collect();
        Ok(self.field.from_poly(&s))
    }

    pub fn checked_div(&self, other: &CycScalar) -> Result<CycScalar> {
        Ok(self * &other.inv()?)
    }

    /// `self^e` for any integer `e` (negative powers need a nonzero base).
    pub fn pow(&self, e: i64) -> Result<CycScalar> {
        let mut base = if e < 0 { self.inv()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = self.field.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        Ok(acc)
    }

    /// JSON form: the coefficient vector as `"num/den"` strings.
    pub fn to_json_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(rational_to_string).collect()
    }

    /// Inverse of [`CycScalar::to_json_strings`]; the length must equal the field degree.
    pub fn from_json_strings(field: &Arc<CycField>, items: &[String]) -> Result<CycScalar> {
        if items.len() != field.degree {
            return Err(Error::Parse(format!(
                "scalar needs {} coefficients, got {}",
                field.degree,
                items.len()
            )));
        }
        let coeffs = items.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>()?;
        Ok(CycScalar { field: Arc::clone(field), coeffs })
    }

    pub fn from_json_value(field: &Arc<CycField>, v: &serde_json::Value) -> Result<CycScalar> {
        let arr = v.as_array().ok_or_else(|| Error::Parse("scalar must be a JSON array".into()))?;
        let items = arr
            .iter()
            .map(|x| {
                x.as_str()
                    .map(str::to_owned)
                    .ok_or_else(|| Error::Parse("scalar coefficients must be strings".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_json_strings(field, &items)
    }
}

fn rat_trim(p: &mut Vec<Rational>) {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

fn rat_divrem(a: &[Rational], b: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let mut rem = a.to_vec();
    rat_trim(&mut rem);
    let mut b = b.to_vec();
    rat_trim(&mut b);
    let db = b.len() - 1;
    if rem.len() < b.len() {
        return (Vec::new(), rem);
    }
    let lead_inv = b[db].recip();
    let mut quot = vec![Rational::zero(); rem.len() - db];
    for k in (0..quot.len()).rev() {
        let c = &rem[k + db] * &lead_inv;
        if c.is_zero() {
            continue;
        }
        for (i, bi) in b.iter().enumerate() {
            rem[k + i] -= &c * bi;
        }
        quot[k] = c;
    }
    rat_trim(&mut rem);
    (quot, rem)
}

fn rat_sub_mul(a: &[Rational], q: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut out = a.to_vec();
    let len = if q.is_empty() || b.is_empty() { 0 } else { q.len() + b.len() - 1 };
    if out.len() < len {
        out.resize(len, Rational::zero());
    }
    for (i, x) in q.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] -= x * y;
        }
    }
    rat_trim(&mut out);
    out
}

/// Returns `(g, s)` with `s * a = g (mod m)`.
fn rational_egcd(a: &[Rational], m: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let mut r0 = m.to_vec();
    let mut r1 = a.to_vec();
    rat_trim(&mut r0);
    rat_trim(&mut r1);
    let mut s0: Vec<Rational> = Vec::new();
    let mut s1: Vec<Rational> = vec![Rational::one()];
    while !r1.is_empty() {
        let (q, r) = rat_divrem(&r0, &r1);
        let s2 = rat_sub_mul(&s0, &q, &s1);
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s2);
    }
    (r0, s0)
}

impl PartialEq for CycScalar {
    fn eq(&self, other: &Self) -> bool {
        self.field.order == other.field.order && self.coeffs == other.coeffs
    }
}

impl Eq for CycScalar {}

impl fmt::Debug for CycScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycScalar({})", self)
    }
}

/// Canonical text form, e.g. `1/2 - q + 3*q^2`.
impl fmt::Display for CycScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            let mono = match k {
                0 => String::new(),
                1 => "q".to_owned(),
                _ => format!("q^{k}"),
            };
            if k == 0 {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                f.write_str(&mono)?;
            } else {
                write!(f, "{mag}*{mono}")?;
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

impl Serialize for CycScalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.coeffs.len()))?;
        for c in &self.coeffs {
            seq.serialize_element(&rational_to_string(c))?;
        }
        seq.end()
    }
}

impl<'a> Add<&'a CycScalar> for &'a CycScalar {
    type Output = CycScalar;
    fn add(self, rhs: &'a CycScalar) -> CycScalar {
        self.same_field(rhs);
        CycScalar {
            field: Arc::clone(&self.field),
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'a> Sub<&'a CycScalar> for &'a CycScalar {
    type Output = CycScalar;
    fn sub(self, rhs: &'a CycScalar) -> CycScalar {
        self.same_field(rhs);
        CycScalar {
            field: Arc::clone(&self.field),
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect(),
        }
    }
}

impl<'a> Mul<&'a CycScalar> for &'a CycScalar {
    type Output = CycScalar;
    fn mul(self, rhs: &'a CycScalar) -> CycScalar {
        self.mul_ref(rhs)
    }
}

impl Neg for &CycScalar {
    type Output = CycScalar;
    fn neg(self) -> CycScalar {
        CycScalar { field: Arc::clone(&self.field), coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Neg for CycScalar {
    type Output = CycScalar;
    fn neg(mut self) -> CycScalar {
        for c in &mut self.coeffs {
            *c = -std::mem::take(c);
        }
        self
    }
}

impl Add for CycScalar {
    type Output = CycScalar;
    fn add(mut self, rhs: CycScalar) -> CycScalar {
        self += &rhs;
        self
    }
}

impl Sub for CycScalar {
    type Output = CycScalar;
    fn sub(mut self, rhs: CycScalar) -> CycScalar {
        self -= &rhs;
        self
    }
}

impl Mul for CycScalar {
    type Output = CycScalar;
    fn mul(self, rhs: CycScalar) -> CycScalar {
        self.mul_ref(&rhs)
    }
}

impl AddAssign<&CycScalar> for CycScalar {
    fn add_assign(&mut self, rhs: &CycScalar) {
        self.same_field(rhs);
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            if !b.is_zero() {
                *a += b;
            }
        }
    }
}

impl SubAssign<&CycScalar> for CycScalar {
    fn sub_assign(&mut self, rhs: &CycScalar) {
        self.same_field(rhs);
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            if !b.is_zero() {
                *a -= b;
            }
        }
    }
}
