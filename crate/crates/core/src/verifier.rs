//! End-to-end checking of a certificate that `d | y`.
//!
//! Every step runs even after an earlier one fails, so the report lists all
//! findings; the verdict names the first.

use std::fmt::{self, Write as _};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::arith::{self, CostTally, LadderTrace};
use crate::certificate::Certificate;
use crate::decimal;
use crate::ideal::{
    self, HenselLift, IdealFailure, Location, MembershipWitness, NormIdentity, ValuationEquation,
};
use crate::primality::{self, PocklingtonReport};
use crate::quadring::{self, LinearPass, NonrationalCheck, QuadResidue};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Step {
    Congruence,
    Claim1,
    Claim2,
    Claim3,
    Claim4,
    Bounds,
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Step::Congruence => "congruence",
            Step::Claim1 => "claim 1 (primality of d)",
            Step::Claim2 => "claim 2 (ideal factorisation)",
            Step::Claim3 => "claim 3 (membership in the order of conductor d)",
            Step::Claim4 => "claim 4 (non-trivial unit)",
            Step::Bounds => "bounds",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Finding {
    pub step: Step,
    pub code: String,
    pub location: Location,
    pub detail: String,
}

impl Finding {
    fn new(step: Step, code: impl ToString, location: Location, detail: impl Into<String>) -> Self {
        Self {
            step,
            code: code.to_string(),
            location,
            detail: detail.into(),
        }
    }

    fn from_ideal(step: Step, f: IdealFailure) -> Self {
        Self::new(step, f.code, f.location, f.detail)
    }
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} / {} at {}: {}", self.step, self.code, self.location, self.detail)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    DDividesY,
    Failed { step: Step, code: String, location: Location },
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::DDividesY => f.write_str("D_DIVIDES_Y"),
            Verdict::Failed { step, code, location } => {
                write!(f, "FAILED({step} / {code} at {location})")
            }
        }
    }
}

fn field(path: &str) -> Location {
    Location::Field { path: path.to_string() }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CongruenceReport {
    pub d_mod_4: u8,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Claim2Report {
    /// `(j, passed)` per split prime.
    pub split_primes: Vec<(usize, bool)>,
    pub lifts: Vec<HenselLift>,
    /// `(i, witness)` per verified factor.
    pub memberships: Vec<(usize, MembershipWitness)>,
    pub norms: Vec<NormIdentity>,
    pub valuations: Vec<ValuationEquation>,
    pub costs: CostTally,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Claim3Report {
    pub linear_pass: Option<LinearPass>,
    pub full_product: Option<QuadResidue>,
    /// No `c_j` equals `d`, so `d` does not divide the denominator.
    pub d_coprime_to_denominator: bool,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Claim4Report {
    pub check: Option<NonrationalCheck>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundsReport {
    /// `sum b_i * bitlen(|a_i| + isqrt(d) + 1)`.
    #[serde(with = "decimal")]
    pub numerator_bits: BigInt,
    /// `sum d_j * bitlen(c_j)`.
    #[serde(with = "decimal")]
    pub denominator_bits: BigInt,
    #[serde(with = "decimal")]
    pub d: BigInt,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    #[serde(with = "decimal")]
    pub d: BigInt,
    pub congruence: CongruenceReport,
    pub claim1: PocklingtonReport,
    pub claim2: Claim2Report,
    pub claim3: Claim3Report,
    pub claim4: Claim4Report,
    pub bounds: BoundsReport,
    pub assumptions: Vec<String>,
    pub inferences: Vec<String>,
    pub costs: CostTally,
    pub findings: Vec<Finding>,
    pub verdict: Verdict,
}

impl VerificationReport {
    pub fn verified(&self) -> bool {
        self.verdict == Verdict::DDividesY
    }

    pub fn step_passed(&self, step: Step) -> bool {
        !self.findings.iter().any(|f| f.step == step)
    }
}

fn check_congruence(cert: &Certificate, findings: &mut Vec<Finding>) -> CongruenceReport {
    let d_mod_4 = primality::congruence_class_check(&cert.d);
    let passed = d_mod_4 == 3;
    if !passed {
        findings.push(Finding::new(
            Step::Congruence,
            "NOT_3_MOD_4",
            field("d"),
            format!("d = {d_mod_4} mod 4"),
        ));
    }
    CongruenceReport { d_mod_4, passed }
}

fn check_claim1(cert: &Certificate, findings: &mut Vec<Finding>) -> PocklingtonReport {
    if cert.primality.c != cert.d {
        findings.push(Finding::new(
            Step::Claim1,
            "WITNESS_TARGET_MISMATCH",
            field("primality.c"),
            format!("witness certifies {} instead of d", cert.primality.c),
        ));
    }
    let report = primality::pocklington_verify(&cert.primality);
    if let Some(failure) = &report.failure {
        findings.push(Finding::new(
            Step::Claim1,
            failure.code,
            field("primality"),
            failure.detail.clone(),
        ));
    }
    report
}

fn check_claim2(cert: &Certificate, findings: &mut Vec<Finding>) -> Claim2Report {
    let start = findings.len();
    let d = &cert.d;
    let s = cert.split_primes.len();
    let mut costs = CostTally::new();

    let split_primes: Vec<(usize, bool)> = cert
        .split_primes
        .iter()
        .enumerate()
        .map(|(idx, sp)| {
            let j = idx + 1;
            match ideal::split_prime_check(j, sp, d) {
                Ok(()) => (j, true),
                Err(f) => {
                    findings.push(Finding::from_ideal(Step::Claim2, f));
                    (j, false)
                }
            }
        })
        .collect();
    let structure = ideal::table_structure_check(&cert.split_primes);
    let mut usable: Vec<bool> = split_primes.iter().map(|&(_, ok)| ok).collect();
    for f in structure {
        if let Location::SplitPrime { j } = f.location {
            usable[j - 1] = false;
        }
        findings.push(Finding::from_ideal(Step::Claim2, f));
    }
    if cert.denominator_exponents.len() != s {
        findings.push(Finding::new(
            Step::Claim2,
            "MALFORMED_RELATION",
            field("denominator_exponents"),
            format!("{} exponents for {s} split primes", cert.denominator_exponents.len()),
        ));
    }
    if let Some((idx, x)) = cert
        .denominator_exponents
        .iter()
        .enumerate()
        .find(|(_, x)| !x.is_positive())
    {
        findings.push(Finding::new(
            Step::Claim2,
            "MALFORMED_RELATION",
            field(&format!("denominator_exponents[{idx}]")),
            format!("exponent {x} is not positive"),
        ));
    }

    let mut memberships = Vec::new();
    let mut norms = Vec::new();
    let mut well_formed = true;
    for (idx, rel) in cert.relations.iter().enumerate() {
        let i = idx + 1;
        if let Err(f) = ideal::relation_structure_check(i, rel, s) {
            findings.push(Finding::from_ideal(Step::Claim2, f));
            well_formed = false;
            continue;
        }
        for fe in &rel.factors {
            if !usable[fe.j - 1] {
                continue;
            }
            let sp = &cert.split_primes[fe.j - 1];
            match ideal::membership_check(i, &rel.a, fe.j, sp, fe.conj, fe.mult, d) {
                Ok(w) => memberships.push((i, w)),
                Err(f) => findings.push(Finding::from_ideal(Step::Claim2, f)),
            }
        }
        match ideal::norm_product_check(i, rel, &cert.split_primes, d, &mut costs) {
            Ok(n) => norms.push(n),
            Err(f) => findings.push(Finding::from_ideal(Step::Claim2, f)),
        }
    }

    let lifts = match ideal::required_lifts(&cert.relations, &cert.split_primes, d) {
        Ok(l) => l,
        Err(f) => {
            if usable.iter().all(|&u| u) {
                findings.push(Finding::from_ideal(Step::Claim2, f));
            }
            Vec::new()
        }
    };

    let valuations = if well_formed && cert.denominator_exponents.len() == s {
        let eqs = ideal::aggregate_valuations(&cert.relations, &cert.denominator_exponents, &mut costs);
        findings.extend(
            ideal::valuation_failures(&eqs)
                .into_iter()
                .map(|f| Finding::from_ideal(Step::Claim2, f)),
        );
        eqs
    } else {
        Vec::new()
    };

    Claim2Report {
        split_primes,
        lifts,
        memberships,
        norms,
        valuations,
        costs,
        passed: findings.len() == start,
    }
}

fn check_claim3(cert: &Certificate, findings: &mut Vec<Finding>) -> Claim3Report {
    let start = findings.len();
    let pairs = cert.relation_pairs();
    let d = &cert.d;
    let linear_pass = match quadring::claim3_linear_pass(&pairs, d) {
        Ok(pass) => {
            if !pass.result.v.is_zero() {
                findings.push(Finding::new(
                    Step::Claim3,
                    "SQRT_COEFFICIENT_NONZERO",
                    field("linear_pass"),
                    format!("sqrt(d) coefficient is {} mod d", pass.result.v),
                ));
            }
            Some(pass)
        }
        Err(e) => {
            findings.push(Finding::new(Step::Claim3, "MALFORMED", field("relations"), e.to_string()));
            None
        }
    };
    let full_product = match quadring::claim3_full_product(&pairs, d) {
        Ok(z) => {
            if !z.v.is_zero() {
                findings.push(Finding::new(
                    Step::Claim3,
                    "SQRT_COEFFICIENT_NONZERO",
                    field("full_product"),
                    format!("sqrt(d) coefficient of the full product is {} mod d", z.v),
                ));
            }
            Some(z)
        }
        Err(e) => {
            findings.push(Finding::new(Step::Claim3, "MALFORMED", field("relations"), e.to_string()));
            None
        }
    };
    if let (Some(lin), Some(full)) = (&linear_pass, &full_product) {
        if lin.result.v.is_zero() != full.v.is_zero() {
            findings.push(Finding::new(
                Step::Claim3,
                "ROUTE_DISAGREEMENT",
                field("relations"),
                "linear pass and full product disagree on the sqrt(d) coefficient",
            ));
        }
    }
    let d_coprime_to_denominator = cert.split_primes.iter().all(|sp| sp.c != *d);
    if !d_coprime_to_denominator {
        findings.push(Finding::new(
            Step::Claim3,
            "EQUALS_D",
            field("split_primes"),
            "some c_j equals d",
        ));
    }
    Claim3Report {
        linear_pass,
        full_product,
        d_coprime_to_denominator,
        passed: findings.len() == start,
    }
}

fn check_claim4(cert: &Certificate, findings: &mut Vec<Finding>) -> Claim4Report {
    let pairs = cert.relation_pairs();
    match quadring::claim4_nonrational_check(&pairs, &cert.nonunit_modulus, &cert.d) {
        Ok(check) => {
            if !check.nonrational {
                findings.push(Finding::new(
                    Step::Claim4,
                    "RATIONAL_RESIDUE",
                    field("nonunit_modulus"),
                    format!("product is {} mod {}", check.residue.u, check.residue.modulus),
                ));
            }
            Claim4Report {
                passed: check.nonrational,
                check: Some(check),
            }
        }
        Err(e) => {
            findings.push(Finding::new(
                Step::Claim4,
                "MALFORMED",
                field("nonunit_modulus"),
                e.to_string(),
            ));
            Claim4Report {
                check: None,
                passed: false,
            }
        }
    }
}

/// Bit-length bounds showing `eta < 2^d` and `eta^-1 < 2^d`.
pub fn bounds_check(cert: &Certificate) -> BoundsReport {
    let d = &cert.d;
    let root = arith::isqrt(&d.abs()).expect("nonnegative");
    let numerator_bits: BigInt = cert
        .relations
        .iter()
        .map(|r| &r.b * BigInt::from(arith::bit_length(&(r.a.abs() + &root + 1u32))))
        .sum();
    let denominator_bits: BigInt = cert
        .split_primes
        .iter()
        .zip(&cert.denominator_exponents)
        .map(|(sp, dj)| dj * BigInt::from(arith::bit_length(&sp.c)))
        .sum();
    let passed = numerator_bits < *d && denominator_bits < *d;
    BoundsReport {
        numerator_bits,
        denominator_bits,
        d: d.clone(),
        passed,
    }
}

const ASSUMPTIONS: [&str; 2] = [
    "the fundamental unit of Z[sqrt d] satisfies eps >= 1 + sqrt d for d >= 3, so 2^d <= eps^d",
    "Z[sqrt d] is the full ring of integers because d = 3 mod 4 and d is squarefree (prime)",
];

const INFERENCES: [&str; 5] = [
    "claim 2: eta = z / n generates the unit ideal, so eta is a unit",
    "claim 3: z lies in Z + d Z[sqrt d] and d does not divide n, so eta lies in the order of conductor d",
    "claim 4: z is not rational mod the non-unit modulus, so eta != +-1",
    "bounds: eta = eps^k with 0 < |k| < d",
    "d prime and ramified: the index of the order's units divides d and eps^k lies in the order with d not dividing k, so the index is 1 and d | y",
];

/// Runs every check on `cert`.
pub fn verify(cert: &Certificate) -> VerificationReport {
    let mut findings = Vec::new();
    let congruence = check_congruence(cert, &mut findings);

    let ((claim1, f1), ((claim2, f2), ((claim3, f3), (claim4, f4)))) = rayon::join(
        || {
            let mut f = Vec::new();
            (check_claim1(cert, &mut f), f)
        },
        || {
            rayon::join(
                || {
                    let mut f = Vec::new();
                    (check_claim2(cert, &mut f), f)
                },
                || {
                    rayon::join(
                        || {
                            let mut f = Vec::new();
                            (check_claim3(cert, &mut f), f)
                        },
                        || {
                            let mut f = Vec::new();
                            (check_claim4(cert, &mut f), f)
                        },
                    )
                },
            )
        },
    );
    findings.extend(f1);
    findings.extend(f2);
    findings.extend(f3);
    findings.extend(f4);

    let bounds = bounds_check(cert);
    if !bounds.passed {
        findings.push(Finding::new(
            Step::Bounds,
            "BOUND_EXCEEDED",
            field("relations"),
            format!(
                "bit sums {} and {} must both be below d",
                bounds.numerator_bits, bounds.denominator_bits
            ),
        ));
    }

    let verdict = match findings.first() {
        None => Verdict::DDividesY,
        Some(f) => Verdict::Failed {
            step: f.step,
            code: f.code.clone(),
            location: f.location.clone(),
        },
    };
    let mut report = VerificationReport {
        d: cert.d.clone(),
        congruence,
        claim1,
        claim2,
        claim3,
        claim4,
        bounds,
        assumptions: ASSUMPTIONS.iter().map(|s| s.to_string()).collect(),
        inferences: INFERENCES.iter().map(|s| s.to_string()).collect(),
        costs: CostTally::new(),
        findings,
        verdict,
    };
    report.costs = cost_report(&report);
    report
}

/// Operation counts over the ladders, coprimality products, the linear
/// pass, the norm products and the valuation sums.
pub fn cost_report(report: &VerificationReport) -> CostTally {
    let mut total = report.claim1.costs;
    total.absorb(&report.claim2.costs);
    if let Some(pass) = &report.claim3.linear_pass {
        total.absorb(&pass.costs);
    }
    total
}

fn sup(n: &BigInt, d: &BigInt) -> String {
    let (q, r) = n.div_mod_floor(d);
    if q.is_zero() {
        r.to_string()
    } else if r.is_zero() {
        format!("{q}·d")
    } else {
        format!("{q}·d + {r}")
    }
}

/// One ladder in two-column form: `2·8+1=17, 2·256²=131072`.
pub fn render_ladder(trace: &LadderTrace) -> String {
    let mut out = String::new();
    let d = &trace.modulus;
    for step in &trace.steps {
        let left = if step.bit == 1 {
            format!("2·{}+1={}", step.prefix, step.result)
        } else {
            format!("2·{}={}", step.prefix, step.result)
        };
        let base = if step.bit == 1 {
            format!("{}·", arith::reduce(&trace.base, d))
        } else {
            String::new()
        };
        let value = &step.quotient * d + &step.residue;
        let _ = writeln!(out, "  {left}, {base}{}²={}", step.operand, sup(&value, d));
    }
    out
}

fn render_linear_pass(pass: &LinearPass, d: &BigInt) -> String {
    let mut out = String::new();
    for s in &pass.steps {
        let u = &s.u_quotient * d + &s.u_residue;
        let v = &s.v_quotient * d + &s.v_residue;
        let _ = writeln!(
            out,
            "  k={}: u·a={}, v·a+u·b={}",
            s.k,
            sup(&u, d),
            sup(&v, d),
        );
    }
    out
}

fn mark(passed: bool) -> &'static str {
    if passed {
        "pass"
    } else {
        "FAIL"
    }
}

/// Human-readable report.
pub fn render_text(report: &VerificationReport, trace: bool, costs: bool) -> String {
    let mut out = String::new();
    let w = &mut out;
    let _ = writeln!(w, "d = {}", report.d);
    let _ = writeln!(w, "d mod 4 = {}: {}", report.congruence.d_mod_4, mark(report.congruence.passed));

    let c1 = &report.claim1;
    let _ = writeln!(w, "{}: {}", Step::Claim1, mark(report.step_passed(Step::Claim1)));
    if let (Some(a), Some(k)) = (&c1.factored_value, &c1.cofactor) {
        let _ = writeln!(w, "  d = 1 + {k}·{a}");
    }
    if let Some(f) = &c1.fermat {
        let _ = writeln!(w, "  2^(d-1) = {} mod d", f.residue());
    }
    for cc in &c1.coprime_checks {
        let _ = writeln!(w, "  2^((d-1)/{}) = {} mod d", cc.p, cc.residue);
        if let primality::CoprimeEvidence::Witness { multiplier, quotient, sign, holds } = &cc.evidence {
            let s = if sign.value() > 0 { "+" } else { "-" };
            let _ = writeln!(
                w,
                "  {multiplier}·{} = {quotient}·d {s} 1: {}",
                cc.residue_minus_one,
                mark(*holds)
            );
        }
    }

    let c2 = &report.claim2;
    let _ = writeln!(w, "{}: {}", Step::Claim2, mark(report.step_passed(Step::Claim2)));
    let _ = writeln!(
        w,
        "  split primes {}/{}, memberships {}, norm identities {}/{}, valuation equations {}/{}",
        c2.split_primes.iter().filter(|(_, ok)| *ok).count(),
        c2.split_primes.len(),
        c2.memberships.len(),
        c2.norms.len(),
        report_relations(report),
        c2.valuations.iter().filter(|e| e.holds()).count(),
        c2.valuations.len(),
    );

    let c3 = &report.claim3;
    let _ = writeln!(w, "{}: {}", Step::Claim3, mark(report.step_passed(Step::Claim3)));
    if let Some(pass) = &c3.linear_pass {
        let _ = writeln!(
            w,
            "  linear pass: {} + ({})·sqrt(d) mod d",
            pass.result.u,
            pass.result.v
        );
    }
    if let Some(z) = &c3.full_product {
        let _ = writeln!(w, "  full product: {} + ({})·sqrt(d) mod d", z.u, z.v);
    }

    let _ = writeln!(w, "{}: {}", Step::Claim4, mark(report.step_passed(Step::Claim4)));
    if let Some(c) = &report.claim4.check {
        let _ = writeln!(
            w,
            "  z = {} + {}·sqrt(d) mod {}",
            c.residue.u, c.residue.v, c.residue.modulus
        );
    }

    let b = &report.bounds;
    let _ = writeln!(
        w,
        "bounds: {} (numerator bits {}, denominator bits {}, d = {})",
        mark(b.passed),
        b.numerator_bits,
        b.denominator_bits,
        b.d
    );

    for a in &report.assumptions {
        let _ = writeln!(w, "assumption: {a}");
    }
    for i in &report.inferences {
        let _ = writeln!(w, "inference: {i}");
    }
    for f in &report.findings {
        let _ = writeln!(w, "finding: {f}");
    }

    if trace {
        if let Some(f) = &c1.fermat {
            let _ = writeln!(w, "trace 2^(d-1) mod d, exponent {}₂:", f.reconstructed_binary);
            w.push_str(&render_ladder(f));
        }
        for cc in &c1.coprime_checks {
            let _ = writeln!(
                w,
                "trace 2^((d-1)/{}) mod d, exponent {}₂:",
                cc.p, cc.trace.reconstructed_binary
            );
            w.push_str(&render_ladder(&cc.trace));
        }
        for l in &c2.lifts {
            let _ = writeln!(
                w,
                "lift j={} ell={}: d = {}·c_{}^{} + {}²",
                l.j, l.ell, l.cofactor, l.j, l.ell, l.root
            );
        }
        if let Some(pass) = &c3.linear_pass {
            let _ = writeln!(w, "trace linear pass:");
            w.push_str(&render_linear_pass(pass, &report.d));
        }
    }

    let c = &report.costs;
    let _ = writeln!(w, "operations: {} hard, {} easy, {} trivial", c.hard, c.easy, c.trivial);
    if costs {
        let _ = writeln!(w, "  claim 1: {:?}", report.claim1.costs);
        let _ = writeln!(w, "  claim 2: {:?}", report.claim2.costs);
        if let Some(p) = &c3.linear_pass {
            let _ = writeln!(w, "  claim 3: {:?}", p.costs);
        }
    }

    let _ = writeln!(w, "verdict: {}", report.verdict);
    if report.verified() {
        let _ = writeln!(w, "d | y: VERIFIED");
    } else {
        let _ = writeln!(w, "d | y: NOT VERIFIED");
    }
    out
}

fn report_relations(report: &VerificationReport) -> usize {
    report
        .claim3
        .linear_pass
        .as_ref()
        .map(|p| p.steps.len() + 1)
        .unwrap_or(report.claim2.norms.len())
}

/// Structured report; traces are dropped unless requested.
pub fn render_structured(report: &VerificationReport, trace: bool) -> String {
    let mut value = serde_json::to_value(report).expect("report serializes");
    if !trace {
        if let Some(c1) = value.get_mut("claim1") {
            c1["fermat"] = serde_json::Value::Null;
            if let Some(list) = c1["coprime_checks"].as_array_mut() {
                for cc in list {
                    if let Some(obj) = cc.as_object_mut() {
                        obj.remove("trace");
                    }
                }
            }
            if let Some(obj) = c1.as_object_mut() {
                obj.remove("factor_primality");
            }
        }
        if let Some(pass) = value["claim3"]["linear_pass"].as_object_mut() {
            pass.remove("steps");
        }
        if let Some(obj) = value["claim2"].as_object_mut() {
            obj.remove("memberships");
        }
    }
    let mut text = serde_json::to_string_pretty(&value).expect("report serializes");
    text.push('\n');
    text
}
