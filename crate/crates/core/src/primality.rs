//! Pocklington-style primality certificates.
//!
//! A witness for `c` names a fully factored part `a = prod p^k` of `c - 1`
//! and a base `b`. The certificate holds when every `p` is prime, `a^2 > c`,
//! `a | c - 1`, `b^(c-1) = 1 (mod c)` and `gcd(b^((c-1)/p) - 1, c) = 1` for
//! every `p | a`. The gcd condition is either shown by an explicit multiplier
//! identity `multiplier * (residue - 1) = quotient * c + sign` or, when no
//! such identity is supplied, by extended Euclid.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::arith::{self, CostTally, LadderTrace, TrialDivision};
use crate::decimal;

/// `+1` or `-1` on the right-hand side of a coprimality identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum UnitSign {
    #[serde(rename = "1")]
    Plus,
    #[serde(rename = "-1")]
    Minus,
}

impl UnitSign {
    pub fn value(self) -> i32 {
        match self {
            UnitSign::Plus => 1,
            UnitSign::Minus => -1,
        }
    }

    pub fn from_value(v: i64) -> Option<Self> {
        match v {
            1 => Some(UnitSign::Plus),
            -1 => Some(UnitSign::Minus),
            _ => None,
        }
    }
}

/// `multiplier * (b^((c-1)/p) - 1) = quotient * c + sign`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoprimeWitness {
    pub p: u64,
    pub multiplier: BigInt,
    pub quotient: BigInt,
    pub sign: UnitSign,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PocklingtonWitness {
    pub c: BigInt,
    /// `(prime, multiplicity)` pairs whose product is the factored part `a`.
    pub factored_part: Vec<(u64, u32)>,
    pub base: BigInt,
    pub coprime_witnesses: Vec<CoprimeWitness>,
}

impl PocklingtonWitness {
    /// The factored part `a`.
    pub fn factored_value(&self) -> BigInt {
        self.factored_part
            .iter()
            .fold(BigInt::one(), |acc, &(p, k)| acc * num_traits::pow(BigInt::from(p), k as usize))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PocklingtonCode {
    NotPrimeFactor,
    ASquaredTooSmall,
    ANotDivisor,
    FermatFail,
    GcdFail,
    Malformed,
}

impl fmt::Display for PocklingtonCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PocklingtonCode::NotPrimeFactor => "NOT_PRIME_FACTOR",
            PocklingtonCode::ASquaredTooSmall => "A_SQUARED_TOO_SMALL",
            PocklingtonCode::ANotDivisor => "A_NOT_DIVISOR",
            PocklingtonCode::FermatFail => "FERMAT_FAIL",
            PocklingtonCode::GcdFail => "GCD_FAIL",
            PocklingtonCode::Malformed => "MALFORMED",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PocklingtonFailure {
    pub code: PocklingtonCode,
    pub detail: String,
}

impl PocklingtonFailure {
    fn new(code: PocklingtonCode, detail: impl Into<String>) -> Self {
        Self {
            code,
            detail: detail.into(),
        }
    }
}

/// How `gcd(b^((c-1)/p) - 1, c) = 1` was established.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum CoprimeEvidence {
    /// `multiplier * residue_minus_one = quotient * c + sign`.
    Witness {
        #[serde(with = "decimal")]
        multiplier: BigInt,
        #[serde(with = "decimal")]
        quotient: BigInt,
        sign: UnitSign,
        holds: bool,
    },
    /// `u * residue_minus_one + v * c = g`.
    ExtGcd {
        #[serde(with = "decimal")]
        g: BigInt,
        #[serde(with = "decimal")]
        u: BigInt,
        #[serde(with = "decimal")]
        v: BigInt,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoprimeCheck {
    pub p: u64,
    #[serde(with = "decimal")]
    pub exponent: BigInt,
    #[serde(with = "decimal")]
    pub residue: BigInt,
    #[serde(with = "decimal")]
    pub residue_minus_one: BigInt,
    pub evidence: CoprimeEvidence,
    pub trace: LadderTrace,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PocklingtonReport {
    #[serde(with = "decimal")]
    pub c: BigInt,
    #[serde(with = "decimal::opt")]
    pub factored_value: Option<BigInt>,
    /// `(c - 1) / a` when `a | c - 1`.
    #[serde(with = "decimal::opt")]
    pub cofactor: Option<BigInt>,
    pub factor_primality: Vec<TrialDivision>,
    pub fermat: Option<LadderTrace>,
    pub coprime_checks: Vec<CoprimeCheck>,
    pub failure: Option<PocklingtonFailure>,
    pub costs: CostTally,
}

impl PocklingtonReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

/// Checks every hypothesis of the Pocklington criterion, stopping at the
/// first violated one. A pass implies `c` is prime.
pub fn pocklington_verify(w: &PocklingtonWitness) -> PocklingtonReport {
    let mut report = PocklingtonReport {
        c: w.c.clone(),
        factored_value: None,
        cofactor: None,
        factor_primality: Vec::new(),
        fermat: None,
        coprime_checks: Vec::new(),
        failure: None,
        costs: CostTally::new(),
    };
    if let Err(f) = run_checks(w, &mut report) {
        report.failure = Some(f);
    }
    report
}

fn malformed(detail: impl Into<String>) -> PocklingtonFailure {
    PocklingtonFailure::new(PocklingtonCode::Malformed, detail)
}

fn check_shape(w: &PocklingtonWitness) -> Result<(), PocklingtonFailure> {
    if w.c < BigInt::from(3u32) {
        return Err(malformed(format!("c = {} is below 3", w.c)));
    }
    if w.factored_part.is_empty() {
        return Err(malformed("empty factored part"));
    }
    let mut seen = Vec::new();
    for &(p, k) in &w.factored_part {
        if p < 2 || k == 0 {
            return Err(malformed(format!("factor entry ({p}, {k}) is degenerate")));
        }
        if seen.contains(&p) {
            return Err(malformed(format!("factor {p} listed twice")));
        }
        seen.push(p);
    }
    for (i, cw) in w.coprime_witnesses.iter().enumerate() {
        if w.coprime_witnesses[..i].iter().any(|x| x.p == cw.p) {
            return Err(malformed(format!("duplicate coprime witness for {}", cw.p)));
        }
        if !seen.contains(&cw.p) {
            return Err(malformed(format!(
                "coprime witness for {} which is not in the factored part",
                cw.p
            )));
        }
    }
    Ok(())
}

fn run_checks(
    w: &PocklingtonWitness,
    report: &mut PocklingtonReport,
) -> Result<(), PocklingtonFailure> {
    check_shape(w)?;
    let c = &w.c;
    let c_minus_1 = c - 1u32;

    // (i) every listed prime is prime
    for &(p, _) in &w.factored_part {
        let td = arith::trial_division_prime(&BigInt::from(p))
            .map_err(|e| PocklingtonFailure::new(PocklingtonCode::NotPrimeFactor, e.to_string()))?;
        let prime = td.is_prime;
        report.factor_primality.push(td);
        if !prime {
            return Err(PocklingtonFailure::new(
                PocklingtonCode::NotPrimeFactor,
                format!("{p} is composite"),
            ));
        }
    }

    let a = w.factored_value();
    report.factored_value = Some(a.clone());
    if a.is_one() {
        return Err(malformed("factored part equals 1"));
    }

    // (ii) a^2 > c
    let a_sq = report.costs.mul(&a, &a);
    if a_sq <= *c {
        return Err(PocklingtonFailure::new(
            PocklingtonCode::ASquaredTooSmall,
            format!("a^2 = {a_sq} <= c = {c}"),
        ));
    }

    // (iii) a | c - 1
    let (cofactor, rem) = c_minus_1.div_rem(&a);
    if !rem.is_zero() {
        return Err(PocklingtonFailure::new(
            PocklingtonCode::ANotDivisor,
            format!("c - 1 = {cofactor}*a + {rem}"),
        ));
    }
    let check = report.costs.mul(&cofactor, &a);
    report.costs.add(&check, &BigInt::one());
    report.cofactor = Some(cofactor);

    // (iv) b^(c-1) = 1 mod c
    let (fermat, trace, tally) = arith::pow_mod_traced(&w.base, &c_minus_1, c)
        .map_err(|e| malformed(e.to_string()))?;
    report.costs.absorb(&tally);
    report.fermat = Some(trace);
    if !fermat.is_one() {
        return Err(PocklingtonFailure::new(
            PocklingtonCode::FermatFail,
            format!("b^(c-1) = {fermat} (mod c)"),
        ));
    }

    // (v) gcd(b^((c-1)/p) - 1, c) = 1 for every p | a
    for &(p, _) in &w.factored_part {
        let exponent = &c_minus_1 / p;
        let (residue, trace, tally) = arith::pow_mod_traced(&w.base, &exponent, c)
            .map_err(|e| malformed(e.to_string()))?;
        report.costs.absorb(&tally);
        let residue_minus_one = &residue - 1u32;
        let supplied = w.coprime_witnesses.iter().find(|x| x.p == p);
        let (evidence, ok) = match supplied {
            Some(cw) => {
                let lhs = report.costs.mul(&cw.multiplier, &residue_minus_one);
                let qc = report.costs.mul(&cw.quotient, c);
                let rhs = report.costs.add(&qc, &BigInt::from(cw.sign.value()));
                let holds = lhs == rhs;
                (
                    CoprimeEvidence::Witness {
                        multiplier: cw.multiplier.clone(),
                        quotient: cw.quotient.clone(),
                        sign: cw.sign,
                        holds,
                    },
                    holds,
                )
            }
            None => {
                let (g, u, v) = if residue_minus_one.is_zero() {
                    (c.abs(), BigInt::zero(), BigInt::one())
                } else {
                    arith::ext_gcd(&residue_minus_one, c).map_err(|e| malformed(e.to_string()))?
                };
                let ok = g.is_one();
                (CoprimeEvidence::ExtGcd { g, u, v }, ok)
            }
        };
        report.coprime_checks.push(CoprimeCheck {
            p,
            exponent,
            residue,
            residue_minus_one,
            evidence,
            trace,
        });
        if !ok {
            return Err(PocklingtonFailure::new(
                PocklingtonCode::GcdFail,
                format!("coprimality of b^((c-1)/{p}) - 1 and c not established"),
            ));
        }
    }
    Ok(())
}

/// `d mod 4`. The Mordell path needs 3.
pub fn congruence_class_check(d: &BigInt) -> u8 {
    let r = d.mod_floor(&BigInt::from(4u32));
    u8::try_from(r).expect("residue mod 4 fits in u8")
}
