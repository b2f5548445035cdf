//! Split primes, prime-power memberships and valuation bookkeeping for the
//! ideal factorisations of `a_i + sqrt d`.
//!
//! `P_j = (c_j, e_j + sqrt d)` and `a + sqrt d` lies in `P_j^k` exactly when
//! `c_j^k | a - r`, where `r` is the lift of `e_j` to a square root of `d`
//! modulo `c_j^k`. The conjugate `P_j'` uses `a + r`. For the ramified prime
//! over 2 only `k = 1` is used.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{self, CostTally};
use crate::decimal;

/// One row `(c, e, f)` with `c f + e^2 = d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitPrime {
    pub c: BigInt,
    pub e: BigInt,
    pub f: BigInt,
}

/// `P_j^mult` (or its conjugate) inside a relation's factor list.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FactorEntry {
    /// 1-based split-prime index.
    pub j: usize,
    pub conj: bool,
    pub mult: u32,
}

/// `(a + sqrt d)` with exponent `b` and its claimed factorisation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    pub a: BigInt,
    pub b: BigInt,
    pub factors: Vec<FactorEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum IdealCode {
    IdentityFail,
    NotPrime,
    GcdFail,
    EqualsD,
    DuplicatePrime,
    RamifiedPlacement,
    HenselPrecondition,
    DivisibilityFail,
    NormMismatch,
    ValuationMismatch,
    MalformedRelation,
}

impl fmt::Display for IdealCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            IdealCode::IdentityFail => "IDENTITY_FAIL",
            IdealCode::NotPrime => "NOT_PRIME",
            IdealCode::GcdFail => "GCD_FAIL",
            IdealCode::EqualsD => "EQUALS_D",
            IdealCode::DuplicatePrime => "DUPLICATE_PRIME",
            IdealCode::RamifiedPlacement => "RAMIFIED_PLACEMENT",
            IdealCode::HenselPrecondition => "HENSEL_PRECONDITION",
            IdealCode::DivisibilityFail => "DIVISIBILITY_FAIL",
            IdealCode::NormMismatch => "NORM_MISMATCH",
            IdealCode::ValuationMismatch => "VALUATION_MISMATCH",
            IdealCode::MalformedRelation => "MALFORMED_RELATION",
        };
        f.write_str(s)
    }
}

/// Where in the certificate a check failed. Indices are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Location {
    SplitPrime { j: usize },
    Relation { i: usize },
    Factor { i: usize, j: usize, conj: bool, mult: u32 },
    Valuation { j: usize, conj: bool },
    Field { path: String },
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |conj: bool| if conj { "conjugate" } else { "direct" };
        match self {
            Location::SplitPrime { j } => write!(f, "split prime j={j}"),
            Location::Relation { i } => write!(f, "relation i={i}"),
            Location::Factor { i, j, conj, mult } => {
                write!(f, "relation i={i}, factor j={j} ({}) mult={mult}", side(*conj))
            }
            Location::Valuation { j, conj } => write!(f, "valuation j={j} ({})", side(*conj)),
            Location::Field { path } => f.write_str(path),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdealFailure {
    pub code: IdealCode,
    pub location: Location,
    pub detail: String,
}

impl IdealFailure {
    fn new(code: IdealCode, location: Location, detail: impl Into<String>) -> Self {
        Self {
            code,
            location,
            detail: detail.into(),
        }
    }
}

impl fmt::Display for IdealFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}: {}", self.code, self.location, self.detail)
    }
}

/// Checks one table row; `j` is its 1-based index.
pub fn split_prime_check(j: usize, sp: &SplitPrime, d: &BigInt) -> Result<(), IdealFailure> {
    let loc = || Location::SplitPrime { j };
    let lhs = &sp.c * &sp.f + &sp.e * &sp.e;
    if lhs != *d {
        return Err(IdealFailure::new(
            IdealCode::IdentityFail,
            loc(),
            format!("c*f + e^2 = {lhs}, expected {d}"),
        ));
    }
    let prime = sp.c >= BigInt::from(2)
        && sp
            .c
            .to_u64()
            .map(arith::is_prime_u64)
            .unwrap_or(false);
    if !prime {
        return Err(IdealFailure::new(
            IdealCode::NotPrime,
            loc(),
            format!("c = {} is not a prime below 2^64", sp.c),
        ));
    }
    if *d == sp.c {
        return Err(IdealFailure::new(IdealCode::EqualsD, loc(), "c equals d"));
    }
    let gcd_target = if j == 1 { sp.e.clone() } else { &sp.e * 2 };
    let g = sp.c.gcd(&gcd_target);
    if !g.is_one() {
        return Err(IdealFailure::new(
            IdealCode::GcdFail,
            loc(),
            format!("gcd(c, {}) = {g}", if j == 1 { "e" } else { "2e" }),
        ));
    }
    Ok(())
}

/// Table-wide conditions: 2 appears exactly at `j = 1`, all `c` distinct.
pub fn table_structure_check(primes: &[SplitPrime]) -> Vec<IdealFailure> {
    let two = BigInt::from(2);
    let mut out = Vec::new();
    for (idx, sp) in primes.iter().enumerate() {
        let j = idx + 1;
        if (j == 1) != (sp.c == two) {
            out.push(IdealFailure::new(
                IdealCode::RamifiedPlacement,
                Location::SplitPrime { j },
                format!("c = {} at j={j}; 2 must sit exactly at j=1", sp.c),
            ));
        }
        if let Some(prev) = primes[..idx].iter().position(|p| p.c == sp.c) {
            out.push(IdealFailure::new(
                IdealCode::DuplicatePrime,
                Location::SplitPrime { j },
                format!("c = {} repeats j={}", sp.c, prev + 1),
            ));
        }
    }
    out
}

/// The square root of `d` modulo `c^ell` congruent to `e` modulo `c`, in
/// `[0, c^ell)`.
pub fn hensel_root(c: &BigInt, e: &BigInt, ell: u32, d: &BigInt) -> Result<BigInt, IdealFailure> {
    let loc = || Location::Field {
        path: format!("hensel(c={c}, e={e}, ell={ell})"),
    };
    if ell == 0 || *c < BigInt::from(3) || c.is_even() {
        return Err(IdealFailure::new(
            IdealCode::HenselPrecondition,
            loc(),
            "needs an odd prime modulus and ell >= 1",
        ));
    }
    let mut root = e.mod_floor(c);
    if !(&root * &root - d).mod_floor(c).is_zero() {
        return Err(IdealFailure::new(IdealCode::HenselPrecondition, loc(), "e^2 != d mod c"));
    }
    let two_root = &root * 2;
    if !c.gcd(&two_root).is_one() {
        return Err(IdealFailure::new(IdealCode::HenselPrecondition, loc(), "gcd(2e, c) != 1"));
    }
    let mut modulus = c.clone();
    for _ in 1..ell {
        modulus *= c;
        let (g, inv, _) = arith::ext_gcd(&(&root * 2), &modulus)
            .map_err(|err| IdealFailure::new(IdealCode::HenselPrecondition, loc(), err.to_string()))?;
        debug_assert!(g.is_one());
        root = (&root - (&root * &root - d) * inv).mod_floor(&modulus);
    }
    Ok(root)
}

/// `a = quotient * c^mult + sign * root` with `sign = +1` for `P_j` and
/// `-1` for the conjugate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MembershipWitness {
    pub j: usize,
    pub conj: bool,
    pub mult: u32,
    #[serde(with = "decimal")]
    pub root: BigInt,
    #[serde(with = "decimal")]
    pub quotient: BigInt,
}

/// `a + sqrt d` lies in `P^mult` (or the conjugate power).
pub fn membership_check(
    i: usize,
    a: &BigInt,
    j: usize,
    sp: &SplitPrime,
    conj: bool,
    mult: u32,
    d: &BigInt,
) -> Result<MembershipWitness, IdealFailure> {
    let loc = || Location::Factor { i, j, conj, mult };
    let root = if j == 1 {
        if conj || mult != 1 {
            return Err(IdealFailure::new(
                IdealCode::RamifiedPlacement,
                loc(),
                "the prime over 2 only enters with mult 1 and no conjugate",
            ));
        }
        sp.e.mod_floor(&sp.c)
    } else {
        hensel_root(&sp.c, &sp.e, mult, d).map_err(|mut f| {
            f.location = loc();
            f
        })?
    };
    let power = num_traits::pow(sp.c.clone(), mult as usize);
    let shifted = if conj { a + &root } else { a - &root };
    let (quotient, rem) = shifted.div_mod_floor(&power);
    if !rem.is_zero() {
        return Err(IdealFailure::new(
            IdealCode::DivisibilityFail,
            loc(),
            format!("{} does not divide a {} {root}", power, if conj { "+" } else { "-" }),
        ));
    }
    Ok(MembershipWitness {
        j,
        conj,
        mult,
        root,
        quotient,
    })
}

/// `d - a^2` and the product of the claimed prime norms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NormIdentity {
    pub i: usize,
    #[serde(with = "decimal")]
    pub lhs: BigInt,
    #[serde(with = "decimal")]
    pub rhs: BigInt,
}

/// `d - a^2 = prod c_j^mult` over the factor list.
pub fn norm_product_check(
    i: usize,
    rel: &Relation,
    primes: &[SplitPrime],
    d: &BigInt,
    costs: &mut CostTally,
) -> Result<NormIdentity, IdealFailure> {
    let a_sq = costs.mul(&rel.a, &rel.a);
    let lhs = costs.sub(d, &a_sq);
    let mut rhs = BigInt::one();
    for fe in &rel.factors {
        let sp = primes.get(fe.j.wrapping_sub(1)).ok_or_else(|| {
            IdealFailure::new(
                IdealCode::MalformedRelation,
                Location::Relation { i },
                format!("factor index {} outside the table", fe.j),
            )
        })?;
        for _ in 0..fe.mult {
            rhs = costs.mul(&rhs, &sp.c);
        }
    }
    if lhs != rhs {
        return Err(IdealFailure::new(
            IdealCode::NormMismatch,
            Location::Relation { i },
            format!("d - a^2 = {lhs}, product of norms = {rhs}"),
        ));
    }
    Ok(NormIdentity { i, lhs, rhs })
}

/// Shape of one relation: nonempty, strictly increasing indices in `[1, s]`,
/// positive multiplicities and exponent.
pub fn relation_structure_check(i: usize, rel: &Relation, s: usize) -> Result<(), IdealFailure> {
    let bad = |detail: String| IdealFailure::new(IdealCode::MalformedRelation, Location::Relation { i }, detail);
    if rel.factors.is_empty() {
        return Err(bad("empty factor list".into()));
    }
    if !rel.b.is_positive() {
        return Err(bad(format!("exponent b = {} is not positive", rel.b)));
    }
    let mut prev = 0usize;
    for fe in &rel.factors {
        if fe.j == 0 || fe.j > s {
            return Err(bad(format!("factor index {} outside [1, {s}]", fe.j)));
        }
        if fe.j <= prev {
            return Err(bad(format!("factor index {} does not increase", fe.j)));
        }
        if fe.mult == 0 {
            return Err(bad(format!("factor j={} has multiplicity 0", fe.j)));
        }
        prev = fe.j;
    }
    Ok(())
}

/// One valuation equation: `sum b_i * mult_i = expected` for `P_j` (or its
/// conjugate), where `expected` is `d_j`, or `2 d_1` for the ramified prime.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValuationEquation {
    pub j: usize,
    pub conj: bool,
    /// `(i, mult)` for every relation containing the prime on this side.
    pub terms: Vec<(usize, u32)>,
    #[serde(with = "decimal")]
    pub total: BigInt,
    #[serde(with = "decimal")]
    pub expected: BigInt,
}

impl ValuationEquation {
    pub fn holds(&self) -> bool {
        self.total == self.expected
    }
}

/// All `2s - 1` valuation equations, in order `j = 1`, then `(j, direct)`,
/// `(j, conjugate)` for `j = 2..=s`.
pub fn aggregate_valuations(
    relations: &[Relation],
    exponents: &[BigInt],
    costs: &mut CostTally,
) -> Vec<ValuationEquation> {
    let s = exponents.len();
    let sides = std::iter::once((1usize, false))
        .chain((2..=s).flat_map(|j| [(j, false), (j, true)]));
    sides
        .map(|(j, conj)| {
            let mut terms = Vec::new();
            let mut total = BigInt::zero();
            for (idx, rel) in relations.iter().enumerate() {
                for fe in rel.factors.iter().filter(|fe| fe.j == j && fe.conj == conj) {
                    terms.push((idx + 1, fe.mult));
                    let contribution = if fe.mult == 1 {
                        rel.b.clone()
                    } else {
                        costs.mul(&rel.b, &BigInt::from(fe.mult))
                    };
                    total = if total.is_zero() {
                        contribution
                    } else {
                        costs.add(&total, &contribution)
                    };
                }
            }
            let dj = &exponents[j - 1];
            let expected = if j == 1 { costs.mul(&BigInt::from(2), dj) } else { dj.clone() };
            ValuationEquation {
                j,
                conj,
                terms,
                total,
                expected,
            }
        })
        .collect()
}

/// Mismatching equations as failures.
pub fn valuation_failures(equations: &[ValuationEquation]) -> Vec<IdealFailure> {
    equations
        .iter()
        .filter(|eq| !eq.holds())
        .map(|eq| {
            IdealFailure::new(
                IdealCode::ValuationMismatch,
                Location::Valuation { j: eq.j, conj: eq.conj },
                format!("got {}, expected {}", eq.total, eq.expected),
            )
        })
        .collect()
}

/// `d = cofactor * c^ell + root^2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HenselLift {
    pub j: usize,
    pub ell: u32,
    #[serde(with = "decimal")]
    pub root: BigInt,
    #[serde(with = "decimal")]
    pub cofactor: BigInt,
}

/// Lifts for every `(j, ell)` with `ell >= 2` used by some relation,
/// sorted by `(j, ell)`.
pub fn required_lifts(
    relations: &[Relation],
    primes: &[SplitPrime],
    d: &BigInt,
) -> Result<Vec<HenselLift>, IdealFailure> {
    let mut pairs: Vec<(usize, u32)> = relations
        .iter()
        .flat_map(|r| r.factors.iter())
        .filter(|fe| fe.mult >= 2 && fe.j >= 2 && fe.j <= primes.len())
        .map(|fe| (fe.j, fe.mult))
        .collect();
    pairs.sort_unstable();
    pairs.dedup();
    pairs
        .into_iter()
        .map(|(j, ell)| {
            let sp = &primes[j - 1];
            let root = hensel_root(&sp.c, &sp.e, ell, d).map_err(|mut f| {
                f.location = Location::SplitPrime { j };
                f
            })?;
            let power = num_traits::pow(sp.c.clone(), ell as usize);
            let cofactor = (d - &root * &root) / &power;
            Ok(HenselLift { j, ell, root, cofactor })
        })
        .collect()
}
