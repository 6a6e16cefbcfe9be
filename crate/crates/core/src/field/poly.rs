use std::fmt;

use serde::{Serialize, Serializer};

use super::FieldSpec;
use crate::error::{Error, Result};

/// Univariate polynomial over a [`FieldSpec`], ascending coefficient codes.
///
/// Trailing zero coefficients are always trimmed, so the zero polynomial has
/// an empty coefficient list and no degree.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct UPoly {
    spec: FieldSpec,
    coeffs: Vec<u32>,
}

impl UPoly {
    pub fn new(spec: &FieldSpec, mut coeffs: Vec<u32>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        UPoly { spec: spec.clone(), coeffs }
    }

    /// Checked constructor for external input: every code must lie in the field.
    pub fn from_codes(spec: &FieldSpec, coeffs: &[u32]) -> Result<Self> {
        if let Some(c) = coeffs.iter().find(|&&c| c >= spec.order()) {
            return Err(Error::BadInput(format!("coefficient code {c} out of range")));
        }
        Ok(Self::new(spec, coeffs.to_vec()))
    }

    pub fn zero(spec: &FieldSpec) -> Self {
        UPoly { spec: spec.clone(), coeffs: Vec::new() }
    }

    pub fn one(spec: &FieldSpec) -> Self {
        UPoly { spec: spec.clone(), coeffs: vec![1] }
    }

    /// `x - root`.
    pub fn linear(spec: &FieldSpec, root: u32) -> Self {
        Self::new(spec, vec![spec.neg(root), 1])
    }

    /// All monic polynomials of the given degree, in coefficient-code order.
    pub fn monic_of_degree(spec: &FieldSpec, degree: usize) -> impl Iterator<Item = UPoly> + '_ {
        let q = spec.order() as u64;
        let count = q.pow(degree as u32);
        (0..count).map(move |mut n| {
            let mut coeffs = Vec::with_capacity(degree + 1);
            for _ in 0..degree {
                coeffs.push((n % q) as u32);
                n /= q;
            }
            coeffs.push(1);
            UPoly { spec: spec.clone(), coeffs }
        })
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    pub fn codes(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> u32 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last() == Some(&1)
    }

    /// Sort key: `sum c_i q^i`.
    pub fn sort_code(&self) -> u128 {
        let q = self.spec.order() as u128;
        self.coeffs.iter().rev().fold(0u128, |acc, &c| acc * q + c as u128)
    }

    fn check(&self, other: &UPoly) -> Result<()> {
        if self.spec == other.spec {
            Ok(())
        } else {
            Err(Error::SpecMismatch)
        }
    }

    pub fn add(&self, other: &UPoly) -> Result<UPoly> {
        self.check(other)?;
        let f = &self.spec;
        let n = self.coeffs.len().max(other.coeffs.len());
        Ok(Self::new(f, (0..n).map(|i| f.add(self.coeff(i), other.coeff(i))).collect()))
    }

    pub fn sub(&self, other: &UPoly) -> Result<UPoly> {
        self.check(other)?;
        let f = &self.spec;
        let n = self.coeffs.len().max(other.coeffs.len());
        Ok(Self::new(f, (0..n).map(|i| f.sub(self.coeff(i), other.coeff(i))).collect()))
    }

    pub fn mul(&self, other: &UPoly) -> Result<UPoly> {
        self.check(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(&self.spec));
        }
        let f = &self.spec;
        let mut out = vec![0u32; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        Ok(Self::new(f, out))
    }

    pub fn scale(&self, c: u32) -> UPoly {
        Self::new(&self.spec, self.coeffs.iter().map(|&a| self.spec.mul(a, c)).collect())
    }

    pub fn div_rem(&self, divisor: &UPoly) -> Result<(UPoly, UPoly)> {
        self.check(divisor)?;
        let f = &self.spec;
        let dd = divisor.degree().ok_or(Error::DivZero)?;
        let lead_inv = f.inv(divisor.coeffs[dd]);
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Self::zero(f), self.clone()));
        }
        let mut quot = vec![0u32; rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let t = f.mul(rem[i], lead_inv);
            if t == 0 {
                continue;
            }
            quot[i - dd] = t;
            for (j, &d) in divisor.coeffs.iter().enumerate() {
                rem[i - dd + j] = f.sub(rem[i - dd + j], f.mul(t, d));
            }
        }
        Ok((Self::new(f, quot), Self::new(f, rem)))
    }

    /// Scales to leading coefficient 1; the zero polynomial is returned as is.
    pub fn monic(&self) -> UPoly {
        match self.coeffs.last() {
            None | Some(1) => self.clone(),
            Some(&l) => self.scale(self.spec.inv(l)),
        }
    }

    /// Monic gcd (zero only if both inputs are zero).
    pub fn gcd(&self, other: &UPoly) -> Result<UPoly> {
        self.check(other)?;
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b)?;
            a = b;
            b = r;
        }
        Ok(a.monic())
    }

    /// Monic least common multiple.
    pub fn lcm(&self, other: &UPoly) -> Result<UPoly> {
        if self.is_zero() || other.is_zero() {
            self.check(other)?;
            return Ok(Self::zero(&self.spec));
        }
        let g = self.gcd(other)?;
        let (q, _) = self.mul(other)?.div_rem(&g)?;
        Ok(q.monic())
    }

    pub fn eval(&self, x: u32) -> u32 {
        let f = &self.spec;
        self.coeffs.iter().rev().fold(0, |acc, &c| f.add(f.mul(acc, x), c))
    }

    pub fn has_root(&self) -> bool {
        (0..self.spec.order()).any(|x| self.eval(x) == 0)
    }

    /// Irreducibility by trial division against every monic polynomial of
    /// degree up to half the degree. Constants and zero are not irreducible.
    pub fn is_irreducible(&self) -> bool {
        let n = match self.degree() {
            Some(n) if n >= 1 => n,
            _ => return false,
        };
        if n <= 3 {
            return n == 1 || !self.has_root();
        }
        for d in 1..=n / 2 {
            for g in Self::monic_of_degree(&self.spec, d) {
                if self.div_rem(&g).map(|(_, r)| r.is_zero()).unwrap_or(false) {
                    return false;
                }
            }
        }
        true
    }
}

impl fmt::Display for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (i, c) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => write!(f, "x")?,
                (1, c) => write!(f, "{c}x")?,
                (i, 1) => write!(f, "x^{i}")?,
                (i, c) => write!(f, "{c}x^{i}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UPoly[{}]({self})", self.spec.label())
    }
}

impl Serialize for UPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coeffs.serialize(s)
    }
}

/// Every monic irreducible cubic over `spec`, sorted by coefficient code.
pub fn irreducible_cubics(spec: &FieldSpec) -> Vec<UPoly> {
    UPoly::monic_of_degree(spec, 3).filter(|m| !m.has_root()).collect()
}
