//! Finite fields built as towers of polynomial quotients.
//!
//! A [`FieldSpec`] is `F_p`, or `F_p[t]/(g_1)`, or a further quotient of that
//! by another monic irreducible, and so on. Elements are addressed by an
//! integer code: the base-`p` positional value of the flattened ascending
//! coefficient digits. Codes `0` and `1` are the additive and multiplicative
//! identities at every tier, and a code of a subfield is also the code of its
//! image in any extension (constants embed as constant polynomials).
//!
//! Multiplication is defined by the tower's polynomial arithmetic. Because
//! every field handled here is small, construction runs that reference
//! arithmetic once to find a primitive element and fills log/antilog tables;
//! all later operations on codes are table lookups.

mod poly;

pub use poly::{irreducible_cubics, UPoly};

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{bad_input, Error, Result};

/// Largest supported field cardinality.
pub const MAX_ORDER: u32 = 1 << 20;

/// Fields up to this order also get a full addition table.
const ADD_TABLE_LIMIT: u32 = 512;

/// A finite field `F_{p^k}` described by its characteristic and modulus tower.
///
/// Cloning is cheap (shared tables). Two specs are equal when they have the
/// same characteristic and the same tower.
#[derive(Clone)]
pub struct FieldSpec(Arc<Inner>);

struct Inner {
    p: u32,
    tower: Vec<Vec<u32>>,
    base: Option<FieldSpec>,
    order: u32,
    degree: u32,
    exp: Vec<u32>,
    log: Vec<u32>,
    neg: Vec<u32>,
    add: Option<Vec<u32>>,
}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn digit_add(p: u32, degree: u32, mut a: u32, mut b: u32) -> u32 {
    if p == 2 {
        return a ^ b;
    }
    let mut out = 0;
    let mut place = 1;
    for _ in 0..degree {
        out += ((a % p + b % p) % p) * place;
        a /= p;
        b /= p;
        place *= p;
    }
    out
}

fn digit_neg(p: u32, degree: u32, mut a: u32) -> u32 {
    if p == 2 {
        return a;
    }
    let mut out = 0;
    let mut place = 1;
    for _ in 0..degree {
        out += ((p - a % p) % p) * place;
        a /= p;
        place *= p;
    }
    out
}

impl FieldSpec {
    /// The prime field `F_p`.
    pub fn prime(p: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(bad_input(format!("{p} is not prime")));
        }
        if p > MAX_ORDER {
            return Err(Error::SizeGuard(format!("prime {p} exceeds {MAX_ORDER}")));
        }
        Self::build(p, Vec::new(), None, p, 1, |a, b| {
            ((a as u64 * b as u64) % p as u64) as u32
        })
    }

    /// `F_p` followed by the given tower of moduli, each an ascending list of
    /// coefficient codes over the field below it.
    pub fn new(p: u32, tower: &[Vec<u32>]) -> Result<Self> {
        let mut spec = Self::prime(p)?;
        for modulus in tower {
            spec = spec.extend(modulus)?;
        }
        Ok(spec)
    }

    /// The field with `q` elements. Prime powers use the least irreducible
    /// monic modulus of the right degree, ordered by coefficient code.
    pub fn gf(q: u32) -> Result<Self> {
        let (p, k) = prime_power(q).ok_or_else(|| bad_input(format!("{q} is not a prime power")))?;
        let fp = Self::prime(p)?;
        if k == 1 {
            return Ok(fp);
        }
        let modulus = UPoly::monic_of_degree(&fp, k as usize)
            .find(|g| g.is_irreducible())
            .ok_or_else(|| bad_input(format!("no irreducible polynomial of degree {k} over F_{p}")))?;
        fp.extend(modulus.codes())
    }

    /// The quotient `self[x]/(modulus)`. The modulus must be monic,
    /// irreducible over `self`, and of degree at least 2.
    pub fn extend(&self, modulus: &[u32]) -> Result<Self> {
        if modulus.iter().any(|&c| c >= self.order()) {
            return Err(bad_input("modulus coefficient out of range"));
        }
        let g = UPoly::new(self, modulus.to_vec());
        let k = match g.degree() {
            Some(k) if k >= 2 => k,
            _ => return Err(bad_input("modulus must have degree at least 2")),
        };
        if g.codes().len() != modulus.len() || !g.is_monic() {
            return Err(bad_input("modulus must be monic with no trailing zeros"));
        }
        let order = (self.order() as u64).checked_pow(k as u32).unwrap_or(u64::MAX);
        if order > MAX_ORDER as u64 {
            return Err(Error::SizeGuard(format!("field of order {order} exceeds {MAX_ORDER}")));
        }
        if !g.is_irreducible() {
            return Err(bad_input(format!("modulus {g} is reducible")));
        }
        let mut tower = self.0.tower.clone();
        tower.push(modulus.to_vec());
        let base = self.clone();
        let q = self.order();
        let modulus = modulus.to_vec();
        Self::build(
            self.p(),
            tower,
            Some(self.clone()),
            order as u32,
            self.degree() * k as u32,
            move |a, b| tower_mul(&base, &modulus, q, a, b),
        )
    }

    fn build(
        p: u32,
        tower: Vec<Vec<u32>>,
        base: Option<FieldSpec>,
        order: u32,
        degree: u32,
        mul: impl Fn(u32, u32) -> u32,
    ) -> Result<Self> {
        let neg = (0..order).map(|a| digit_neg(p, degree, a)).collect();
        let add = (order <= ADD_TABLE_LIMIT).then(|| {
            let mut t = Vec::with_capacity((order * order) as usize);
            for a in 0..order {
                for b in 0..order {
                    t.push(digit_add(p, degree, a, b));
                }
            }
            t
        });
        let units = (order - 1) as usize;
        let mut exp = vec![0u32; units];
        let mut log = vec![0u32; order as usize];
        let mut found = false;
        for g in 1..order {
            let mut x = 1u32;
            let mut ok = true;
            for i in 0..units {
                if i > 0 && x == 1 {
                    ok = false;
                    break;
                }
                exp[i] = x;
                x = mul(x, g);
            }
            if ok && x == 1 {
                found = true;
                break;
            }
        }
        if !found {
            return Err(bad_input("quotient ring is not a field"));
        }
        for (i, &e) in exp.iter().enumerate() {
            log[e as usize] = i as u32;
        }
        Ok(FieldSpec(Arc::new(Inner { p, tower, base, order, degree, exp, log, neg, add })))
    }

    pub fn p(&self) -> u32 {
        self.0.p
    }

    /// Cardinality of the field.
    pub fn order(&self) -> u32 {
        self.0.order
    }

    /// Degree over the prime field.
    pub fn degree(&self) -> u32 {
        self.0.degree
    }

    pub fn tower(&self) -> &[Vec<u32>] {
        &self.0.tower
    }

    /// The field immediately below this one, absent for `F_p`.
    pub fn base(&self) -> Option<&FieldSpec> {
        self.0.base.as_ref()
    }

    /// Cardinality `q` of the base field; the Frobenius of this field over its
    /// base is `z -> z^q`. For a prime field this is `p`.
    pub fn base_order(&self) -> u32 {
        self.base().map_or(self.p(), |b| b.order())
    }

    /// True when `self` is one of the tiers of `other` (including `other`).
    pub fn is_subfield_of(&self, other: &FieldSpec) -> bool {
        self.p() == other.p()
            && self.tower().len() <= other.tower().len()
            && other.tower()[..self.tower().len()] == *self.tower()
    }

    pub fn elem(&self, code: u32) -> Result<FieldElem> {
        if code >= self.order() {
            return Err(bad_input(format!("code {code} out of range for field of order {}", self.order())));
        }
        Ok(FieldElem { spec: self.clone(), code })
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElem> + '_ {
        (0..self.order()).map(move |c| FieldElem { spec: self.clone(), code: c })
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        match &self.0.add {
            Some(t) => t[(a * self.0.order + b) as usize],
            None => digit_add(self.0.p, self.0.degree, a, b),
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        self.0.neg[a as usize]
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let n = self.0.order - 1;
        let s = self.0.log[a as usize] + self.0.log[b as usize];
        self.0.exp[(if s >= n { s - n } else { s }) as usize]
    }

    #[inline]
    pub fn checked_inv(&self, a: u32) -> Option<u32> {
        if a == 0 {
            return None;
        }
        let n = self.0.order - 1;
        let l = self.0.log[a as usize];
        Some(self.0.exp[((n - l) % n) as usize])
    }

    /// Multiplicative inverse. Panics on zero; use [`Self::checked_inv`] when
    /// the argument may vanish.
    #[inline]
    pub fn inv(&self, a: u32) -> u32 {
        self.checked_inv(a).expect("inverse of zero")
    }

    pub fn div(&self, a: u32, b: u32) -> Option<u32> {
        self.checked_inv(b).map(|ib| self.mul(a, ib))
    }

    pub fn pow(&self, a: u32, e: u64) -> u32 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let n = (self.0.order - 1) as u64;
        let l = self.0.log[a as usize] as u64;
        self.0.exp[((l * (e % n)) % n) as usize]
    }

    /// `a^(q^i)` where `q` is [`Self::base_order`].
    pub fn frobenius(&self, a: u32, i: u32) -> u32 {
        if a == 0 {
            return 0;
        }
        let n = (self.0.order - 1) as u64;
        let mut e = 1u64;
        for _ in 0..i {
            e = e * self.base_order() as u64 % n;
        }
        self.pow(a, e)
    }

    /// Coefficient codes of `a` over the base field (length = top modulus degree).
    pub fn split(&self, a: u32) -> Vec<u32> {
        match self.base() {
            None => vec![a],
            Some(b) => {
                let k = self.tower().last().map_or(1, |m| m.len() - 1);
                let q = b.order();
                let mut a = a;
                (0..k)
                    .map(|_| {
                        let c = a % q;
                        a /= q;
                        c
                    })
                    .collect()
            }
        }
    }

    /// Inverse of [`Self::split`].
    pub fn join(&self, coeffs: &[u32]) -> u32 {
        let q = self.base_order();
        coeffs.iter().rev().fold(0, |acc, &c| acc * q + c)
    }

    /// Code of the class of the top-level indeterminate.
    pub fn generator(&self) -> u32 {
        self.base_order()
    }

    /// A generator of the multiplicative group (the log/exp table base).
    pub fn primitive_element(&self) -> u32 {
        if self.order() == 2 {
            1
        } else {
            self.0.exp[1]
        }
    }

    pub fn label(&self) -> String {
        if self.degree() == 1 {
            format!("F_{}", self.p())
        } else {
            format!("F_{}^{}", self.p(), self.degree())
        }
    }
}

fn tower_mul(base: &FieldSpec, modulus: &[u32], q: u32, a: u32, b: u32) -> u32 {
    let k = modulus.len() - 1;
    let digits = |mut x: u32| -> Vec<u32> {
        (0..k)
            .map(|_| {
                let c = x % q;
                x /= q;
                c
            })
            .collect()
    };
    let (da, db) = (digits(a), digits(b));
    let mut prod = vec![0u32; 2 * k - 1];
    for (i, &x) in da.iter().enumerate() {
        for (j, &y) in db.iter().enumerate() {
            prod[i + j] = base.add(prod[i + j], base.mul(x, y));
        }
    }
    for i in (k..2 * k - 1).rev() {
        let t = prod[i];
        if t != 0 {
            for (j, &g) in modulus[..k].iter().enumerate() {
                prod[i - k + j] = base.sub(prod[i - k + j], base.mul(t, g));
            }
            prod[i] = 0;
        }
    }
    prod[..k].iter().rev().fold(0, |acc, &c| acc * q + c)
}

fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q % d == 0)?;
    let mut n = q;
    let mut k = 0;
    while n % p == 0 {
        n /= p;
        k += 1;
    }
    (n == 1).then_some((p, k))
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.p == other.0.p && self.0.tower == other.0.tower)
    }
}

impl Eq for FieldSpec {}

impl Hash for FieldSpec {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.p.hash(state);
        self.0.tower.hash(state);
    }
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("p", &self.0.p)
            .field("tower", &self.0.tower)
            .finish()
    }
}

#[derive(Serialize, Deserialize)]
struct FieldSpecJson {
    p: u32,
    tower: Vec<Vec<u32>>,
}

impl Serialize for FieldSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FieldSpecJson { p: self.p(), tower: self.tower().to_vec() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FieldSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = FieldSpecJson::deserialize(d)?;
        FieldSpec::new(j.p, &j.tower).map_err(serde::de::Error::custom)
    }
}

/// A field element carrying its field.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldElem {
    spec: FieldSpec,
    code: u32,
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.code, self.spec.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl FieldElem {
    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    pub fn code(&self) -> u32 {
        self.code
    }

    pub fn is_zero(&self) -> bool {
        self.code == 0
    }

    fn same_field(&self, other: &FieldElem) -> Result<()> {
        if self.spec == other.spec {
            Ok(())
        } else {
            Err(Error::SpecMismatch)
        }
    }

    pub fn add(&self, other: &FieldElem) -> Result<FieldElem> {
        ff_arith(self, other, ArithOp::Add)
    }

    pub fn sub(&self, other: &FieldElem) -> Result<FieldElem> {
        ff_arith(self, other, ArithOp::Sub)
    }

    pub fn mul(&self, other: &FieldElem) -> Result<FieldElem> {
        ff_arith(self, other, ArithOp::Mul)
    }

    pub fn div(&self, other: &FieldElem) -> Result<FieldElem> {
        ff_arith(self, other, ArithOp::Div)
    }

    pub fn inv(&self) -> Result<FieldElem> {
        let code = self.spec.checked_inv(self.code).ok_or(Error::DivZero)?;
        Ok(FieldElem { spec: self.spec.clone(), code })
    }

    pub fn pow(&self, e: u64) -> FieldElem {
        FieldElem { spec: self.spec.clone(), code: self.spec.pow(self.code, e) }
    }
}

/// Exact arithmetic on two elements of the same field.
pub fn ff_arith(a: &FieldElem, b: &FieldElem, op: ArithOp) -> Result<FieldElem> {
    a.same_field(b)?;
    let f = &a.spec;
    let code = match op {
        ArithOp::Add => f.add(a.code, b.code),
        ArithOp::Sub => f.sub(a.code, b.code),
        ArithOp::Mul => f.mul(a.code, b.code),
        ArithOp::Div => f.div(a.code, b.code).ok_or(Error::DivZero)?,
    };
    Ok(FieldElem { spec: f.clone(), code })
}

/// `z^(q^i)` with `q` the cardinality of the field directly below `z`'s field.
pub fn frobenius(z: &FieldElem, i: u32) -> FieldElem {
    FieldElem { spec: z.spec.clone(), code: z.spec.frobenius(z.code, i) }
}

/// Constant-coefficient inclusion of `z` into the extension `k`.
pub fn embed(z: &FieldElem, k: &FieldSpec) -> Result<FieldElem> {
    if !z.spec.is_subfield_of(k) {
        return Err(Error::SpecMismatch);
    }
    Ok(FieldElem { spec: k.clone(), code: z.code })
}
