//! Exact real numbers of the restricted shape this crate needs.
//!
//! Every quantity that reaches a verdict is a finite sum
//! `Σ q · π^k · √r` with rational `q`, small integer `k` and a positive integer
//! radicand `r`. Squared distances and box volumes are plain rationals, distance
//! endpoints are quadratic surds, and ball volumes carry a power of π.
//!
//! Signs are decided exactly whenever at most two distinct radicands appear
//! (the only shape interval endpoints can take). Anything else falls back to
//! certified rational enclosures refined until the sign is separated from
//! zero.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Largest precision (in bits) tried by the enclosure-based sign test.
pub const MAX_SIGN_BITS: u64 = 4096;

const PI_CACHE_BITS: u64 = MAX_SIGN_BITS + 256;

const SMALL_PRIMES: [u32; 25] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
];

pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Nearest-ish `f64` of a big rational. Saturates to ±inf outside the f64 range.
pub fn ratio_to_f64(q: &BigRational) -> f64 {
    if let Some(v) = q.to_f64() {
        return v;
    }
    // Fallback: shift both sides into range.
    let nb = q.numer().bits() as i64;
    let db = q.denom().bits() as i64;
    let shift = nb - db;
    let scaled = if shift > 0 {
        q / BigRational::from_integer(BigInt::one() << (shift as usize))
    } else {
        q * BigRational::from_integer(BigInt::one() << ((-shift) as usize))
    };
    scaled.to_f64().unwrap_or(f64::NAN) * 2f64.powi(shift as i32)
}

pub fn rat_pow(q: &BigRational, exp: u32) -> BigRational {
    let mut out = BigRational::one();
    for _ in 0..exp {
        out *= q;
    }
    out
}

/// `Some(s)` with `s*s == q` if `q` is the square of a rational.
pub fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    if &(&n * &n) == q.numer() && &(&d * &d) == q.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

/// Closed interval with rational endpoints, used as a certified enclosure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatInterval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl RatInterval {
    pub fn point(q: BigRational) -> Self {
        RatInterval {
            lo: q.clone(),
            hi: q,
        }
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        let a = &self.lo * q;
        let b = &self.hi * q;
        if q.is_negative() {
            RatInterval { lo: b, hi: a }
        } else {
            RatInterval { lo: a, hi: b }
        }
    }

    pub fn mul(&self, other: &RatInterval) -> Self {
        let c = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        RatInterval { lo, hi }
    }

    pub fn add(&self, other: &RatInterval) -> Self {
        RatInterval {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
        }
    }

    /// Widen to endpoints on the dyadic grid `2^-bits`.
    pub fn round_outward(&self, bits: u64) -> Self {
        let scale = BigInt::one() << bits as usize;
        let lo = (self.lo.numer() * &scale).div_floor(self.lo.denom());
        let hi_num = self.hi.numer() * &scale;
        let hi = -((-hi_num).div_floor(self.hi.denom()));
        RatInterval {
            lo: BigRational::new(lo, scale.clone()),
            hi: BigRational::new(hi, scale),
        }
    }

    pub fn midpoint_f64(&self) -> f64 {
        ratio_to_f64(&((&self.lo + &self.hi) / int(2)))
    }
}

/// Enclosure of `√n` for an integer `n ≥ 0` with absolute error `≤ 2^-bits`.
fn sqrt_enclosure(n: &BigInt, bits: u64) -> RatInterval {
    let shifted: BigInt = n << (2 * bits as usize);
    let s = shifted.sqrt();
    let den = BigInt::one() << bits as usize;
    let lo = BigRational::new(s.clone(), den.clone());
    if &s * &s == shifted {
        RatInterval::point(lo)
    } else {
        RatInterval {
            lo,
            hi: BigRational::new(s + 1, den),
        }
    }
}

fn arctan_inv_scaled(x: u32, scale: u64) -> (BigInt, u64) {
    let one: BigInt = BigInt::one() << scale as usize;
    let x2 = BigInt::from(x) * BigInt::from(x);
    let mut term = one / BigInt::from(x);
    let mut sum = term.clone();
    let mut k: u64 = 1;
    loop {
        term = &term / &x2;
        if term.is_zero() {
            break;
        }
        let t = &term / BigInt::from(2 * k + 1);
        if k % 2 == 1 {
            sum -= t;
        } else {
            sum += t;
        }
        k += 1;
    }
    (sum, k)
}

fn pi_cache() -> &'static RatInterval {
    static PI: OnceLock<RatInterval> = OnceLock::new();
    PI.get_or_init(|| {
        // Machin: π = 16·atan(1/5) − 4·atan(1/239); each series term is off by < 3 ulp.
        let (a5, t5) = arctan_inv_scaled(5, PI_CACHE_BITS);
        let (a239, t239) = arctan_inv_scaled(239, PI_CACHE_BITS);
        let est = a5 * 16 - a239 * 4;
        let err = BigInt::from(16 * (3 * t5 + 2) + 4 * (3 * t239 + 2));
        let den = BigInt::one() << PI_CACHE_BITS as usize;
        RatInterval {
            lo: BigRational::new(&est - &err, den.clone()),
            hi: BigRational::new(est + err, den),
        }
    })
}

/// Certified enclosure of `π^k` with roughly `bits` bits after the point.
pub fn pi_power_enclosure(k: u32, bits: u64) -> RatInterval {
    // Round the precision up to a multiple of 64 so results can be shared.
    let bits = bits.min(MAX_SIGN_BITS + 64).div_ceil(64) * 64;
    static CACHE: OnceLock<Mutex<HashMap<(u32, u64), RatInterval>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(hit) = cache.lock().unwrap().get(&(k, bits)) {
        return hit.clone();
    }
    let pi = pi_cache().round_outward(bits + 8);
    let mut acc = RatInterval::point(BigRational::one());
    for _ in 0..k {
        acc = acc.mul(&pi).round_outward(bits + 8);
    }
    cache.lock().unwrap().insert((k, bits), acc.clone());
    acc
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct Basis {
    pi_power: u32,
    radicand: BigInt,
}

impl Basis {
    fn rational() -> Self {
        Basis {
            pi_power: 0,
            radicand: BigInt::one(),
        }
    }
}

/// Strip square factors from `r`, returning `(m, r')` with `√r = m·√r'`.
fn reduce_radicand(r: BigInt) -> (BigInt, BigInt) {
    debug_assert!(r.is_positive());
    let mut m = BigInt::one();
    let mut r = r;
    for &p in SMALL_PRIMES.iter() {
        let p2 = BigInt::from(p * p);
        loop {
            let (q, rem) = r.div_rem(&p2);
            if rem.is_zero() {
                r = q;
                m *= p;
            } else {
                break;
            }
        }
    }
    let s = r.sqrt();
    if &s * &s == r {
        (m * s, BigInt::one())
    } else {
        (m, r)
    }
}

/// Exact value `Σ coeff · π^k · √radicand`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ExactReal {
    terms: BTreeMap<Basis, BigRational>,
}

impl ExactReal {
    pub fn zero() -> Self {
        ExactReal::default()
    }

    pub fn from_rational(q: BigRational) -> Self {
        let mut e = ExactReal::zero();
        e.insert(Basis::rational(), q);
        e
    }

    pub fn from_int(n: i64) -> Self {
        ExactReal::from_rational(int(n))
    }

    /// `q · π^k`.
    pub fn pi_multiple(q: BigRational, k: u32) -> Self {
        let mut e = ExactReal::zero();
        e.insert(
            Basis {
                pi_power: k,
                radicand: BigInt::one(),
            },
            q,
        );
        e
    }

    /// Non-negative square root of a non-negative rational.
    pub fn sqrt(q: &BigRational) -> Self {
        assert!(!q.is_negative(), "square root of a negative rational");
        if q.is_zero() {
            return ExactReal::zero();
        }
        if let Some(s) = rational_sqrt(q) {
            return ExactReal::from_rational(s);
        }
        // √(n/d) = √(n·d) / d
        let (m, r) = reduce_radicand(q.numer() * q.denom());
        let coeff = BigRational::new(m, q.denom().clone());
        let mut e = ExactReal::zero();
        e.insert(
            Basis {
                pi_power: 0,
                radicand: r,
            },
            coeff,
        );
        e
    }

    fn insert(&mut self, basis: Basis, q: BigRational) {
        if q.is_zero() {
            return;
        }
        let entry = self
            .terms
            .entry(basis.clone())
            .or_insert_with(BigRational::zero);
        *entry += q;
        if entry.is_zero() {
            self.terms.remove(&basis);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value as a rational, if it has no radical or π part.
    pub fn as_rational(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => self.terms.get(&Basis::rational()).cloned(),
            _ => None,
        }
    }

    pub fn has_pi(&self) -> bool {
        self.terms.keys().any(|b| b.pi_power > 0)
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        if q.is_zero() {
            return ExactReal::zero();
        }
        ExactReal {
            terms: self.terms.iter().map(|(b, c)| (b.clone(), c * q)).collect(),
        }
    }

    pub fn square(&self) -> Self {
        self * self
    }

    /// Certified enclosure; the width shrinks like `2^-bits` times the magnitude
    /// of the largest coefficient.
    pub fn enclose(&self, bits: u64) -> RatInterval {
        let mut acc = RatInterval::point(BigRational::zero());
        for (basis, coeff) in &self.terms {
            let mag = (coeff.numer().bits() as i64 - coeff.denom().bits() as i64).max(0) as u64;
            let prec = bits + mag + 2 * basis.pi_power as u64 + basis.radicand.bits() / 2 + 16;
            let mut term = RatInterval::point(coeff.clone());
            if basis.pi_power > 0 {
                term = term.mul(&pi_power_enclosure(basis.pi_power, prec));
            }
            if !basis.radicand.is_one() {
                term = term.mul(&sqrt_enclosure(&basis.radicand, prec));
            }
            acc = acc.add(&term.round_outward(prec));
        }
        acc
    }

    pub fn to_f64(&self) -> f64 {
        if let Some(q) = self.as_rational() {
            return ratio_to_f64(&q);
        }
        // Without cancellation the plain f64 sum is accurate to a few ulps.
        let same_sign = self.terms.values().all(|c| c.is_positive())
            || self.terms.values().all(|c| c.is_negative());
        if same_sign {
            let sum: f64 = self
                .terms
                .iter()
                .map(|(b, c)| {
                    let root = b.radicand.to_f64().map_or(f64::NAN, f64::sqrt);
                    ratio_to_f64(c) * std::f64::consts::PI.powi(b.pi_power as i32) * root
                })
                .sum();
            if sum.is_finite() && sum != 0.0 {
                return sum;
            }
        }
        self.enclose(80).midpoint_f64()
    }

    /// Sign of the value. `None` only when the value has three or more distinct
    /// irrational parts and no enclosure up to [`MAX_SIGN_BITS`] separates it
    /// from zero.
    pub fn sign(&self) -> Option<Ordering> {
        if self.terms.is_empty() {
            return Some(Ordering::Equal);
        }
        if self.terms.values().all(|c| c.is_positive()) {
            return Some(Ordering::Greater);
        }
        if self.terms.values().all(|c| c.is_negative()) {
            return Some(Ordering::Less);
        }
        if let Some(s) = self.exact_sign() {
            return Some(s);
        }
        let mut bits = 64;
        while bits <= MAX_SIGN_BITS {
            let enc = self.enclose(bits);
            if enc.lo.is_positive() {
                return Some(Ordering::Greater);
            }
            if enc.hi.is_negative() {
                return Some(Ordering::Less);
            }
            bits *= 2;
        }
        None
    }

    /// Closed-form sign for `α + β√p + γ√q` (common π power factored out).
    fn exact_sign(&self) -> Option<Ordering> {
        let power = self.terms.keys().next()?.pi_power;
        if self.terms.keys().any(|b| b.pi_power != power) {
            return None;
        }
        let mut alpha = BigRational::zero();
        let mut radicals: Vec<(BigRational, BigRational)> = Vec::new();
        for (basis, coeff) in &self.terms {
            if basis.radicand.is_one() {
                alpha = coeff.clone();
            } else {
                radicals.push((
                    coeff.clone(),
                    BigRational::from_integer(basis.radicand.clone()),
                ));
            }
        }
        let zero = BigRational::zero();
        match radicals.as_slice() {
            [] => Some(alpha.cmp(&zero)),
            [(b, p)] => Some(sign_surd(&alpha, b, p)),
            [(b, p), (c, q)] => Some(sign_two_surds(&alpha, b, p, c, q)),
            _ => None,
        }
    }

    /// Exact comparison; panics if the sign test is undecided.
    pub fn cmp_exact(&self, other: &ExactReal) -> Ordering {
        self.try_cmp(other)
            .expect("comparison not decided within the enclosure precision cap")
    }

    pub fn try_cmp(&self, other: &ExactReal) -> Option<Ordering> {
        (self - other).sign()
    }

    pub fn max_exact(a: ExactReal, b: ExactReal) -> ExactReal {
        if a.cmp_exact(&b) == Ordering::Less {
            b
        } else {
            a
        }
    }

    pub fn min_exact(a: ExactReal, b: ExactReal) -> ExactReal {
        if a.cmp_exact(&b) == Ordering::Greater {
            b
        } else {
            a
        }
    }
}

fn sign_of(q: &BigRational) -> Ordering {
    q.cmp(&BigRational::zero())
}

/// Sign of `a + b√p` for `p ≥ 0`.
fn sign_surd(a: &BigRational, b: &BigRational, p: &BigRational) -> Ordering {
    if b.is_zero() || p.is_zero() {
        return sign_of(a);
    }
    let sa = sign_of(a);
    let sb = sign_of(b);
    if sa == Ordering::Equal || sa == sb {
        return sb;
    }
    match (a * a).cmp(&(b * b * p)) {
        Ordering::Greater => sa,
        Ordering::Less => sb,
        Ordering::Equal => Ordering::Equal,
    }
}

/// Sign of `(a + b√p) + c√q`, by squaring both parts when they disagree.
fn sign_two_surds(
    a: &BigRational,
    b: &BigRational,
    p: &BigRational,
    c: &BigRational,
    q: &BigRational,
) -> Ordering {
    let su = sign_surd(a, b, p);
    let sv = if q.is_zero() {
        Ordering::Equal
    } else {
        sign_of(c)
    };
    if sv == Ordering::Equal {
        return su;
    }
    if su == Ordering::Equal || su == sv {
        return sv;
    }
    // |u| vs |v|: u² − v² = a² + b²p − c²q + 2ab√p
    let rational = a * a + b * b * p - c * c * q;
    let radical = a * b * int(2);
    match sign_surd(&rational, &radical, p) {
        Ordering::Greater => su,
        Ordering::Less => sv,
        Ordering::Equal => Ordering::Equal,
    }
}

impl From<BigRational> for ExactReal {
    fn from(q: BigRational) -> Self {
        ExactReal::from_rational(q)
    }
}

impl Add<&ExactReal> for &ExactReal {
    type Output = ExactReal;
    fn add(self, rhs: &ExactReal) -> ExactReal {
        let mut out = self.clone();
        for (b, c) in &rhs.terms {
            out.insert(b.clone(), c.clone());
        }
        out
    }
}

impl Add for ExactReal {
    type Output = ExactReal;
    fn add(self, rhs: ExactReal) -> ExactReal {
        &self + &rhs
    }
}

impl Sub<&ExactReal> for &ExactReal {
    type Output = ExactReal;
    fn sub(self, rhs: &ExactReal) -> ExactReal {
        let mut out = self.clone();
        for (b, c) in &rhs.terms {
            out.insert(b.clone(), -c);
        }
        out
    }
}

impl Sub for ExactReal {
    type Output = ExactReal;
    fn sub(self, rhs: ExactReal) -> ExactReal {
        &self - &rhs
    }
}

impl Neg for &ExactReal {
    type Output = ExactReal;
    fn neg(self) -> ExactReal {
        self.scale(&-BigRational::one())
    }
}

impl Neg for ExactReal {
    type Output = ExactReal;
    fn neg(self) -> ExactReal {
        -&self
    }
}

impl Mul<&ExactReal> for &ExactReal {
    type Output = ExactReal;
    fn mul(self, rhs: &ExactReal) -> ExactReal {
        let mut out = ExactReal::zero();
        for (b1, c1) in &self.terms {
            for (b2, c2) in &rhs.terms {
                let mut coeff = c1 * c2;
                let radicand = if b1.radicand == b2.radicand {
                    coeff *= BigRational::from_integer(b1.radicand.clone());
                    BigInt::one()
                } else {
                    let (m, r) = reduce_radicand(&b1.radicand * &b2.radicand);
                    coeff *= BigRational::from_integer(m);
                    r
                };
                out.insert(
                    Basis {
                        pi_power: b1.pi_power + b2.pi_power,
                        radicand,
                    },
                    coeff,
                );
            }
        }
        out
    }
}

impl Mul for ExactReal {
    type Output = ExactReal;
    fn mul(self, rhs: ExactReal) -> ExactReal {
        &self * &rhs
    }
}

impl fmt::Display for ExactReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (basis, coeff)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{coeff}")?;
            if basis.pi_power == 1 {
                write!(f, "*pi")?;
            } else if basis.pi_power > 1 {
                write!(f, "*pi^{}", basis.pi_power)?;
            }
            if !basis.radicand.is_one() {
                write!(f, "*sqrt({})", basis.radicand)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pi_enclosure_contains_known_digits() {
        let enc = pi_power_enclosure(1, 200);
        let known = rat(314_159_265_358_979, 100_000_000_000_000);
        let known_hi = rat(314_159_265_358_980, 100_000_000_000_000);
        assert!(enc.lo > known && enc.hi < known_hi);
        assert!(enc.width() < BigRational::new(BigInt::one(), BigInt::one() << 190));
    }

    #[test]
    fn sqrt_normalizes_square_factors() {
        let a = ExactReal::sqrt(&int(8));
        let b = ExactReal::sqrt(&int(2)).scale(&int(2));
        assert_eq!(a, b);
        assert_eq!(ExactReal::sqrt(&rat(9, 4)).as_rational(), Some(rat(3, 2)));
        let half = ExactReal::sqrt(&rat(1, 2));
        assert_eq!(half.square().as_rational(), Some(rat(1, 2)));
    }

    #[test]
    fn two_radical_signs_are_exact() {
        // √2 + √3 − √(5 + 2√6) = 0 cannot be expressed; use √2 + √8 − √18 = 0 instead.
        let z = ExactReal::sqrt(&int(2)) + ExactReal::sqrt(&int(8)) - ExactReal::sqrt(&int(18));
        assert_eq!(z.sign(), Some(Ordering::Equal));
        // 1 + √2 vs √5.8284... : (1+√2)² = 3 + 2√2
        let lhs = ExactReal::from_int(1) + ExactReal::sqrt(&int(2));
        let rhs = ExactReal::sqrt(&int(6));
        assert_eq!(lhs.cmp_exact(&rhs), Ordering::Less);
        // √3 − √2 vs 1/3: (√3 − √2) ≈ 0.3178
        let d = ExactReal::sqrt(&int(3)) - ExactReal::sqrt(&int(2));
        assert_eq!(
            d.cmp_exact(&ExactReal::from_rational(rat(1, 3))),
            Ordering::Less
        );
        assert_eq!(
            d.cmp_exact(&ExactReal::from_rational(rat(3, 10))),
            Ordering::Greater
        );
    }

    #[test]
    fn enclosure_sign_for_many_radicals() {
        let v = ExactReal::sqrt(&int(2)) + ExactReal::sqrt(&int(3)) + ExactReal::sqrt(&int(5))
            - ExactReal::sqrt(&int(30));
        // 1.4142 + 1.7321 + 2.2361 − 5.4772 = −0.0949
        assert_eq!(v.sign(), Some(Ordering::Less));
        let w = ExactReal::pi_multiple(int(1), 1) - ExactReal::from_rational(rat(355, 113));
        assert_eq!(w.sign(), Some(Ordering::Less));
        let w = ExactReal::pi_multiple(int(1), 1) - ExactReal::from_rational(rat(333, 106));
        assert_eq!(w.sign(), Some(Ordering::Greater));
    }

    #[test]
    fn product_of_radicals_folds() {
        let p = ExactReal::sqrt(&int(6)) * ExactReal::sqrt(&int(3));
        // √18 = 3√2
        assert_eq!(p, ExactReal::sqrt(&int(2)).scale(&int(3)));
        assert!((p.to_f64() - 18f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn huge_rationals_convert_to_f64() {
        let big = BigRational::from_integer(BigInt::from(10).pow(300u32) * 7);
        assert!((ratio_to_f64(&big) / 7e300 - 1.0).abs() < 1e-12);
    }
}
