//! Exact integer utilities shared by every checker in the crate.
//!
//! Everything here works on `num_bigint::BigInt` and never touches floating
//! point. Residues are always canonical, i.e. in `[0, modulus)`.
//!
//! The module also carries the operation cost model: a multiplication of `a`
//! and `b` is *hard* when `|a| >= 10^3`, `|b| >= 10^3` and `|ab| >= 10^10`;
//! an addition or subtraction with a single-digit member is *trivial*;
//! anything else is *easy*.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::decimal;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("binary digits requested for a non-positive integer {0}")]
    NonPositive(BigInt),
    #[error("modulus {0} is smaller than 2")]
    ModulusTooSmall(BigInt),
    #[error("gcd(0, 0) is undefined")]
    GcdOfZeros,
    #[error("isqrt of negative integer {0}")]
    NegativeSqrt(BigInt),
    #[error("trial division requires 2 <= n < 2^64, got {0}")]
    TrialDivisionRange(BigInt),
}

/// Class of a single arithmetic operation under the cost model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpClass {
    Hard,
    Easy,
    Trivial,
}

/// Running count of hard, easy and trivial operations.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct CostTally {
    pub hard: u64,
    pub easy: u64,
    pub trivial: u64,
}

impl CostTally {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn classify_mul(a: &BigInt, b: &BigInt) -> OpClass {
        let thousand = BigInt::from(1_000u32);
        let ten_billion = BigInt::from(10_000_000_000u64);
        if a.abs() >= thousand && b.abs() >= thousand && (a * b).abs() >= ten_billion {
            OpClass::Hard
        } else {
            OpClass::Easy
        }
    }

    pub fn classify_add(a: &BigInt, b: &BigInt) -> OpClass {
        let nine = BigInt::from(9u32);
        if a.abs() <= nine || b.abs() <= nine {
            OpClass::Trivial
        } else {
            OpClass::Easy
        }
    }

    fn record(&mut self, class: OpClass) {
        match class {
            OpClass::Hard => self.hard += 1,
            OpClass::Easy => self.easy += 1,
            OpClass::Trivial => self.trivial += 1,
        }
    }

    /// Multiplies and tallies.
    pub fn mul(&mut self, a: &BigInt, b: &BigInt) -> BigInt {
        self.record(Self::classify_mul(a, b));
        a * b
    }

    /// Adds and tallies.
    pub fn add(&mut self, a: &BigInt, b: &BigInt) -> BigInt {
        self.record(Self::classify_add(a, b));
        a + b
    }

    /// Subtracts and tallies.
    pub fn sub(&mut self, a: &BigInt, b: &BigInt) -> BigInt {
        self.record(Self::classify_add(a, b));
        a - b
    }

    pub fn absorb(&mut self, other: &CostTally) {
        self.hard += other.hard;
        self.easy += other.easy;
        self.trivial += other.trivial;
    }

    pub fn total(&self) -> u64 {
        self.hard + self.easy + self.trivial
    }
}

impl std::ops::Add for CostTally {
    type Output = CostTally;

    fn add(mut self, rhs: CostTally) -> CostTally {
        self.absorb(&rhs);
        self
    }
}

impl std::iter::Sum for CostTally {
    fn sum<I: Iterator<Item = CostTally>>(iter: I) -> CostTally {
        iter.fold(CostTally::default(), |acc, t| acc + t)
    }
}

/// Canonical representative of `a` modulo `m` (`m > 0`).
pub fn reduce(a: &BigInt, m: &BigInt) -> BigInt {
    a.mod_floor(m)
}

/// Binary digits of `n`, most significant first. The leading digit is 1.
pub fn binary_digits(n: &BigInt) -> Result<Vec<u8>, ArithError> {
    if !n.is_positive() {
        return Err(ArithError::NonPositive(n.clone()));
    }
    let bits = n.bits();
    Ok((0..bits).rev().map(|i| u8::from(n.bit(i))).collect())
}

/// Renders a bit list as a string of `0`/`1` characters.
pub fn bits_to_string(bits: &[u8]) -> String {
    bits.iter().map(|b| if *b == 1 { '1' } else { '0' }).collect()
}

/// One step of the square-and-multiply ladder.
///
/// The doubling identity `result = 2 * prefix + bit` rebuilds the exponent
/// from the top; the residue identity is
/// `base^bit * operand^2 = quotient * modulus + residue`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LadderStep {
    /// Power of two this bit stands for.
    pub bit_index: u64,
    pub bit: u8,
    #[serde(with = "decimal")]
    pub prefix: BigInt,
    #[serde(with = "decimal")]
    pub result: BigInt,
    /// The residue being squared (the previous step's residue, 1 at the start).
    #[serde(with = "decimal")]
    pub operand: BigInt,
    #[serde(with = "decimal")]
    pub quotient: BigInt,
    #[serde(with = "decimal")]
    pub residue: BigInt,
}

/// Full transcript of a traced modular exponentiation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LadderTrace {
    #[serde(with = "decimal")]
    pub base: BigInt,
    #[serde(with = "decimal")]
    pub modulus: BigInt,
    pub steps: Vec<LadderStep>,
    #[serde(with = "decimal")]
    pub reconstructed_exponent: BigInt,
    pub reconstructed_binary: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error("step {step}: doubling identity 2*{prefix}+{bit} != {result}")]
    Doubling {
        step: usize,
        prefix: BigInt,
        bit: u8,
        result: BigInt,
    },
    #[error("step {step}: residue identity fails")]
    Residue { step: usize },
    #[error("step {step}: operand does not chain from the previous residue")]
    Chain { step: usize },
    #[error("reconstructed exponent does not match the recorded bits")]
    Exponent,
}

impl LadderTrace {
    /// Final residue (`1 mod modulus` for an empty trace).
    pub fn residue(&self) -> BigInt {
        self.steps
            .last()
            .map(|s| s.residue.clone())
            .unwrap_or_else(|| reduce(&BigInt::one(), &self.modulus))
    }

    /// Re-checks every identity in the transcript from the recorded numbers
    /// alone.
    pub fn check(&self) -> Result<(), TraceError> {
        let base = reduce(&self.base, &self.modulus);
        let mut prefix = BigInt::zero();
        let mut operand = BigInt::one();
        let mut exponent = BigInt::zero();
        let top = self.steps.len() as u64;
        for (r, step) in self.steps.iter().enumerate() {
            if step.prefix != prefix || (&prefix * 2u32 + step.bit) != step.result {
                return Err(TraceError::Doubling {
                    step: r,
                    prefix: step.prefix.clone(),
                    bit: step.bit,
                    result: step.result.clone(),
                });
            }
            if step.operand != operand {
                return Err(TraceError::Chain { step: r });
            }
            let mut lhs = &step.operand * &step.operand;
            if step.bit == 1 {
                lhs *= &base;
            }
            let in_range = !step.residue.is_negative() && step.residue < self.modulus;
            if !in_range || lhs != &step.quotient * &self.modulus + &step.residue {
                return Err(TraceError::Residue { step: r });
            }
            if step.bit_index != top - 1 - r as u64 {
                return Err(TraceError::Exponent);
            }
            if step.bit == 1 {
                exponent.set_bit(step.bit_index, true);
            }
            prefix = step.result.clone();
            operand = step.residue.clone();
        }
        if exponent != self.reconstructed_exponent || prefix != self.reconstructed_exponent {
            return Err(TraceError::Exponent);
        }
        let bits: Vec<u8> = self.steps.iter().map(|s| s.bit).collect();
        if bits_to_string(&bits) != self.reconstructed_binary {
            return Err(TraceError::Exponent);
        }
        Ok(())
    }
}

/// `base^exponent mod modulus` by the left-to-right binary ladder, recording
/// every step.
///
/// Starting from `h = 1`, each bit `g` of the exponent (most significant
/// first) sets `h <- base^g * h^2 mod modulus`. The tally counts the
/// squarings, the multiplications by the base, and the `q * modulus + r`
/// reductions; the doubling bookkeeping is counted as well since a human
/// checker redoes it.
pub fn pow_mod_traced(
    base: &BigInt,
    exponent: &BigInt,
    modulus: &BigInt,
) -> Result<(BigInt, LadderTrace, CostTally), ArithError> {
    if *modulus < BigInt::from(2u32) {
        return Err(ArithError::ModulusTooSmall(modulus.clone()));
    }
    let bits = binary_digits(exponent)?;
    let base_r = reduce(base, modulus);
    let mut tally = CostTally::new();
    let mut steps = Vec::with_capacity(bits.len());
    let mut prefix = BigInt::zero();
    let mut h = BigInt::one();
    let two = BigInt::from(2u32);
    let top = bits.len() as u64;
    for (r, &bit) in bits.iter().enumerate() {
        let doubled = tally.mul(&two, &prefix);
        let result = if bit == 1 {
            tally.add(&doubled, &BigInt::one())
        } else {
            doubled
        };
        let mut value = tally.mul(&h, &h);
        if bit == 1 {
            value = tally.mul(&base_r, &value);
        }
        let (quotient, residue) = value.div_mod_floor(modulus);
        if !quotient.is_zero() {
            let qm = tally.mul(&quotient, modulus);
            tally.add(&qm, &residue);
        }
        steps.push(LadderStep {
            bit_index: top - 1 - r as u64,
            bit,
            prefix: prefix.clone(),
            result: result.clone(),
            operand: h,
            quotient,
            residue: residue.clone(),
        });
        prefix = result;
        h = residue;
    }
    let trace = LadderTrace {
        base: base.clone(),
        modulus: modulus.clone(),
        steps,
        reconstructed_exponent: prefix,
        reconstructed_binary: bits_to_string(&bits),
    };
    Ok((h, trace, tally))
}

/// Extended Euclid: returns `(g, u, v)` with `u*a + v*b = g = gcd(a, b) >= 1`.
///
/// The Bezout identity is re-checked before returning.
pub fn ext_gcd(a: &BigInt, b: &BigInt) -> Result<(BigInt, BigInt, BigInt), ArithError> {
    if a.is_zero() && b.is_zero() {
        return Err(ArithError::GcdOfZeros);
    }
    let (mut old_r, mut r) = (a.clone(), b.clone());
    let (mut old_s, mut s) = (BigInt::one(), BigInt::zero());
    let (mut old_t, mut t) = (BigInt::zero(), BigInt::one());
    while !r.is_zero() {
        let q = old_r.div_floor(&r);
        let next_r = &old_r - &q * &r;
        old_r = std::mem::replace(&mut r, next_r);
        let next_s = &old_s - &q * &s;
        old_s = std::mem::replace(&mut s, next_s);
        let next_t = &old_t - &q * &t;
        old_t = std::mem::replace(&mut t, next_t);
    }
    if old_r.is_negative() {
        old_r = -old_r;
        old_s = -old_s;
        old_t = -old_t;
    }
    assert_eq!(&old_s * a + &old_t * b, old_r, "Bezout identity violated");
    Ok((old_r, old_s, old_t))
}

/// `floor(sqrt(n))` by integer Newton iteration with a final correction.
pub fn isqrt(n: &BigInt) -> Result<BigInt, ArithError> {
    if n.is_negative() {
        return Err(ArithError::NegativeSqrt(n.clone()));
    }
    if n.is_zero() {
        return Ok(BigInt::zero());
    }
    // 2^ceil(bits/2) is always >= sqrt(n), so Newton decreases monotonically.
    let mut x = BigInt::one() << n.bits().div_ceil(2);
    loop {
        let next = (&x + n / &x) >> 1u32;
        if next >= x {
            break;
        }
        x = next;
    }
    while &x * &x > *n {
        x -= 1u32;
    }
    while (&x + 1u32) * (&x + 1u32) <= *n {
        x += 1u32;
    }
    Ok(x)
}

/// `n = quotient * divisor + remainder` with `0 <= remainder < divisor`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DivisionWitness {
    pub divisor: u64,
    pub quotient: u64,
    pub remainder: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrialDivision {
    pub n: u64,
    pub is_prime: bool,
    /// One entry per prime `t <= sqrt(n)` tested, ascending. For a composite
    /// input the list ends at the first divisor found.
    pub witnesses: Vec<DivisionWitness>,
}

/// Primes up to `limit` (inclusive) by the sieve of Eratosthenes.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        primes.push(i as u64);
        let mut j = i * i;
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    primes
}

/// Segmented sieve: calls `visit` on every prime `<= limit` in ascending
/// order until it returns `false`.
fn for_each_prime(limit: u64, mut visit: impl FnMut(u64) -> bool) {
    const SEGMENT: u64 = 1 << 16;
    let small_limit = limit.min(SEGMENT);
    let small = primes_up_to(small_limit);
    for &p in &small {
        if !visit(p) {
            return;
        }
    }
    if limit <= SEGMENT {
        return;
    }
    // limit <= 2^32 here, so the base primes up to 2^16 cover every segment.
    let mut lo = SEGMENT + 1;
    while lo <= limit {
        let hi = (lo + SEGMENT - 1).min(limit);
        let mut composite = vec![false; (hi - lo + 1) as usize];
        for &p in &small {
            if p * p > hi {
                break;
            }
            let mut start = lo.div_ceil(p) * p;
            if start < p * p {
                start = p * p;
            }
            let mut k = start;
            while k <= hi {
                composite[(k - lo) as usize] = true;
                k += p;
            }
        }
        for (off, c) in composite.iter().enumerate() {
            if !*c && !visit(lo + off as u64) {
                return;
            }
        }
        lo = hi + 1;
    }
}

/// Deterministic primality by trial division with every prime `t <= sqrt(n)`.
pub fn trial_division_prime(n: &BigInt) -> Result<TrialDivision, ArithError> {
    let value = match n.to_u64() {
        Some(v) if v >= 2 => v,
        _ => return Err(ArithError::TrialDivisionRange(n.clone())),
    };
    let root = isqrt(n)?.to_u64().expect("sqrt of a u64 fits in u64");
    let mut witnesses = Vec::new();
    let mut is_prime = true;
    for_each_prime(root, |t| {
        let w = DivisionWitness {
            divisor: t,
            quotient: value / t,
            remainder: value % t,
        };
        witnesses.push(w);
        if w.remainder == 0 {
            is_prime = false;
            return false;
        }
        true
    });
    Ok(TrialDivision {
        n: value,
        is_prime,
        witnesses,
    })
}

/// Convenience wrapper for small inputs.
pub fn is_prime_u64(n: u64) -> bool {
    n >= 2
        && trial_division_prime(&BigInt::from(n))
            .map(|t| t.is_prime)
            .unwrap_or(false)
}

/// Number of bits in `|n|` (0 for zero).
pub fn bit_length(n: &BigInt) -> u64 {
    n.bits()
}
