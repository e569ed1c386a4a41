//! Exact arithmetic in the `N`-th cyclotomic field.
//!
//! A value is a rational polynomial in `z = ζ_N` kept in canonical form: the
//! remainder modulo the `N`-th cyclotomic polynomial, of degree below
//! `φ(N)`. Canonical forms are unique, so equality of values is equality of
//! coefficient vectors. Cyclotomic polynomials are obtained by iterated
//! exact division of `x^N − 1` and cached per modulus; the cache is
//! initialize-once/read-many and safe to share between threads.
//!
//! Values with different moduli combine by embedding both into the field of
//! the least common multiple (`ζ_m = ζ_N^{N/m}` whenever `m | N`).

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Largest field modulus reachable through automatic embedding.
const MODULUS_CAP: u64 = 1 << 20;

type RootTable = Arc<Vec<Vec<Rational>>>;

static PHI_CACHE: OnceLock<Mutex<HashMap<u64, Arc<Vec<BigInt>>>>> = OnceLock::new();
static ROOT_CACHE: OnceLock<Mutex<HashMap<u64, RootTable>>> = OnceLock::new();

/// Monic integer coefficients of the `n`-th cyclotomic polynomial, low
/// degree first.
pub fn cyclotomic_polynomial(n: u64) -> Arc<Vec<BigInt>> {
    assert!(n >= 1, "modulus must be positive");
    let cache = PHI_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().unwrap().get(&n) {
        return p.clone();
    }
    // x^n - 1 divided by phi_d for every proper divisor d of n.
    let mut poly = vec![BigInt::zero(); n as usize + 1];
    poly[0] = -BigInt::one();
    poly[n as usize] = BigInt::one();
    for d in 1..n {
        if n.is_multiple_of(d) {
            let phi_d = cyclotomic_polynomial(d);
            poly = poly_div_exact(&poly, &phi_d);
        }
    }
    let arc = Arc::new(poly);
    cache.lock().unwrap().insert(n, arc.clone());
    arc
}

/// Exact division of integer polynomials; `den` must be monic and divide
/// `num` exactly.
fn poly_div_exact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let dn = num.len() - 1;
    let dd = den.len() - 1;
    assert!(den[dd].is_one(), "divisor must be monic");
    let mut rem: Vec<BigInt> = num.to_vec();
    let mut quot = vec![BigInt::zero(); dn - dd + 1];
    for i in (dd..=dn).rev() {
        let c = std::mem::take(&mut rem[i]);
        if c.is_zero() {
            continue;
        }
        let shift = i - dd;
        for (j, d) in den.iter().enumerate().take(dd) {
            rem[shift + j] -= &c * d;
        }
        quot[shift] = c;
    }
    assert!(rem.iter().all(Zero::is_zero), "division was not exact");
    quot
}

/// Remainder of `coeffs` modulo the monic integer polynomial `phi`,
/// truncated/padded to degree `deg(phi) − 1`.
fn reduce_mod(mut coeffs: Vec<Rational>, phi: &[BigInt]) -> Vec<Rational> {
    let deg = phi.len() - 1;
    while coeffs.len() > deg {
        let i = coeffs.len() - 1;
        let c = coeffs.pop().unwrap();
        if c.is_zero() {
            continue;
        }
        let shift = i - deg;
        for (j, p) in phi.iter().enumerate().take(deg) {
            let delta = &c * Rational::from_integer(p.clone());
            coeffs[shift + j] -= delta;
        }
    }
    coeffs.resize(deg, Rational::zero());
    coeffs
}

fn euler_phi(n: u64) -> usize {
    cyclotomic_polynomial(n).len() - 1
}

/// A canonical element of the `N`-th cyclotomic field.
#[derive(Clone, Debug)]
pub struct CyclotomicValue {
    modulus: u64,
    coeffs: Vec<Rational>,
}

impl CyclotomicValue {
    fn from_raw(modulus: u64, coeffs: Vec<Rational>) -> Self {
        let phi = cyclotomic_polynomial(modulus);
        CyclotomicValue {
            modulus,
            coeffs: reduce_mod(coeffs, &phi),
        }
    }

    pub fn zero(modulus: u64) -> Self {
        CyclotomicValue {
            modulus,
            coeffs: vec![Rational::zero(); euler_phi(modulus)],
        }
    }

    pub fn one(modulus: u64) -> Self {
        Self::from_rational_in(Rational::one(), modulus)
    }

    /// A rational constant, living in the trivial field `Q(ζ_1) = Q`.
    pub fn from_rational(q: Rational) -> Self {
        Self::from_rational_in(q, 1)
    }

    pub fn from_rational_in(q: Rational, modulus: u64) -> Self {
        let mut coeffs = vec![Rational::zero(); euler_phi(modulus)];
        coeffs[0] = q;
        Self::from_raw(modulus, coeffs)
    }

    /// The canonical form of `ζ_modulus^k`. Group exponents are small, so
    /// the full root table is cached per modulus up to a threshold; larger
    /// moduli are reduced directly.
    pub fn root_of_unity(modulus: u64, k: u64) -> Self {
        let k = k % modulus;
        let single = |e: u64| {
            let mut raw = vec![Rational::zero(); e as usize + 1];
            raw[e as usize] = Rational::one();
            Self::from_raw(modulus, raw)
        };
        if modulus > 512 {
            return single(k);
        }
        let cache = ROOT_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let roots = {
            let mut guard = cache.lock().unwrap();
            if let Some(r) = guard.get(&modulus) {
                r.clone()
            } else {
                let all: Vec<Vec<Rational>> = (0..modulus).map(|e| single(e).coeffs).collect();
                let arc: RootTable = Arc::new(all);
                guard.insert(modulus, arc.clone());
                arc
            }
        };
        CyclotomicValue {
            modulus,
            coeffs: roots[k as usize].clone(),
        }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Re-express the value in the field of modulus `to`; `modulus | to`.
    fn embed(&self, to: u64) -> Self {
        if to == self.modulus {
            return self.clone();
        }
        debug_assert_eq!(to % self.modulus, 0);
        let step = (to / self.modulus) as usize;
        let mut raw = vec![Rational::zero(); (self.coeffs.len() - 1) * step + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            raw[k * step] = c.clone();
        }
        Self::from_raw(to, raw)
    }

    fn try_unify(&self, other: &Self) -> Result<(Self, Self)> {
        if self.modulus == other.modulus {
            return Ok((self.clone(), other.clone()));
        }
        let l = self.modulus.lcm(&other.modulus);
        if l > MODULUS_CAP {
            return Err(Error::IncompatibleModuli(self.modulus, other.modulus));
        }
        Ok((self.embed(l), other.embed(l)))
    }

    fn unify(&self, other: &Self) -> (Self, Self) {
        self.try_unify(other)
            .expect("cyclotomic moduli beyond the embedding cap")
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        let (a, b) = self.try_unify(other)?;
        Ok(a.add_same(&b))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        let (a, b) = self.try_unify(other)?;
        Ok(a.mul_same(&b))
    }

    fn add_same(&self, other: &Self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        CyclotomicValue {
            modulus: self.modulus,
            coeffs,
        }
    }

    fn mul_same(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.modulus);
        }
        let mut raw = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                raw[i + j] += a * b;
            }
        }
        Self::from_raw(self.modulus, raw)
    }

    pub fn add(&self, other: &Self) -> Self {
        let (a, b) = self.unify(other);
        a.add_same(&b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        CyclotomicValue {
            modulus: self.modulus,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = self.unify(other);
        a.mul_same(&b)
    }

    pub fn scale(&self, by: &Rational) -> Self {
        CyclotomicValue {
            modulus: self.modulus,
            coeffs: self.coeffs.iter().map(|c| c * by).collect(),
        }
    }

    /// Complex conjugation, `ζ_N ↦ ζ_N^{N−1}`. An involution.
    pub fn conj(&self) -> Self {
        let n = self.modulus;
        let mut raw = vec![Rational::zero(); n as usize];
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let e = ((n - k as u64) % n) as usize;
            raw[e] += c;
        }
        Self::from_raw(n, raw)
    }

    /// `a · conj(a)`; for characteristic-function values this is `|a|²`.
    pub fn abs_squared(&self) -> Self {
        self.mul(&self.conj())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        !self.coeffs.is_empty()
            && self.coeffs[0].is_one()
            && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    /// Fixed by conjugation, i.e. a totally real value.
    pub fn is_real(&self) -> bool {
        *self == self.conj()
    }

    /// The value as a rational constant, when its canonical form is one.
    pub fn as_rational(&self) -> Option<Rational> {
        if self.coeffs[1..].iter().all(Zero::is_zero) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    pub fn expect_rational(&self) -> Result<Rational> {
        self.as_rational().ok_or(Error::NotRational)
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.modulus);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }
}

impl PartialEq for CyclotomicValue {
    fn eq(&self, other: &Self) -> bool {
        if self.modulus == other.modulus {
            return self.coeffs == other.coeffs;
        }
        if let (Some(a), Some(b)) = (self.as_rational(), other.as_rational()) {
            return a == b;
        }
        match self.try_unify(other) {
            Ok((a, b)) => a.coeffs == b.coeffs,
            Err(_) => false,
        }
    }
}

impl Eq for CyclotomicValue {}

impl fmt::Display for CyclotomicValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if first {
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mag = if !first || !c.is_negative() {
                c.abs()
            } else {
                c.clone()
            };
            match k {
                0 => write!(f, "{mag}")?,
                1 => write!(f, "{mag}*z")?,
                _ => write!(f, "{mag}*z^{k}")?,
            }
        }
        write!(f, " (z = zeta_{})", self.modulus)
    }
}
