//! Certificate data model and its JSON encoding.
//!
//! Every integer is written as a decimal string except `format_version` and
//! the coprime-witness `sign`, which are plain JSON numbers.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

use crate::ideal::{FactorEntry, Relation, SplitPrime};
use crate::primality::{CoprimeWitness, PocklingtonWitness, UnitSign};

pub const FORMAT_VERSION: u64 = 1;

const BUNDLED: &str = include_str!("../certs/mordell-39028039587479.json");

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub d: BigInt,
    pub primality: PocklingtonWitness,
    pub split_primes: Vec<SplitPrime>,
    pub denominator_exponents: Vec<BigInt>,
    pub relations: Vec<Relation>,
    pub nonunit_modulus: BigInt,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertificateError {
    #[error("PARSE_ERROR at {path}: {message}")]
    Parse { path: String, message: String },
    #[error("RANGE_ERROR at {path}: {message}")]
    Range { path: String, message: String },
}

impl CertificateError {
    pub fn code(&self) -> &'static str {
        match self {
            CertificateError::Parse { .. } => "PARSE_ERROR",
            CertificateError::Range { .. } => "RANGE_ERROR",
        }
    }

    pub fn path(&self) -> &str {
        match self {
            CertificateError::Parse { path, .. } | CertificateError::Range { path, .. } => path,
        }
    }
}

fn parse_err(path: &str, message: impl Into<String>) -> CertificateError {
    CertificateError::Parse {
        path: path.to_string(),
        message: message.into(),
    }
}

fn range_err(path: &str, message: impl Into<String>) -> CertificateError {
    CertificateError::Range {
        path: path.to_string(),
        message: message.into(),
    }
}

type Result<T> = std::result::Result<T, CertificateError>;

struct Node<'a> {
    value: &'a Value,
    path: String,
}

impl<'a> Node<'a> {
    fn root(value: &'a Value) -> Self {
        Self {
            value,
            path: "$".to_string(),
        }
    }

    fn field(&self, name: &str) -> Result<Node<'a>> {
        let obj = self
            .value
            .as_object()
            .ok_or_else(|| parse_err(&self.path, "expected an object"))?;
        let path = format!("{}.{name}", self.path);
        obj.get(name)
            .map(|value| Node { value, path: path.clone() })
            .ok_or_else(|| parse_err(&path, "missing field"))
    }

    fn items(&self) -> Result<Vec<Node<'a>>> {
        let arr = self
            .value
            .as_array()
            .ok_or_else(|| parse_err(&self.path, "expected an array"))?;
        Ok(arr
            .iter()
            .enumerate()
            .map(|(k, value)| Node {
                value,
                path: format!("{}[{k}]", self.path),
            })
            .collect())
    }

    fn nonempty_items(&self) -> Result<Vec<Node<'a>>> {
        let items = self.items()?;
        if items.is_empty() {
            return Err(range_err(&self.path, "list must not be empty"));
        }
        Ok(items)
    }

    /// Decimal string; bare JSON integers are also accepted.
    fn int(&self) -> Result<BigInt> {
        let text = match self.value {
            Value::String(s) => s.clone(),
            Value::Number(n) if n.is_i64() || n.is_u64() => n.to_string(),
            _ => return Err(parse_err(&self.path, "expected an integer as a decimal string")),
        };
        let digits = text.strip_prefix('-').unwrap_or(&text);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(parse_err(&self.path, format!("{text:?} is not a decimal integer")));
        }
        text.parse()
            .map_err(|_| parse_err(&self.path, format!("{text:?} is not a decimal integer")))
    }

    fn int_at_least(&self, min: i64) -> Result<BigInt> {
        let n = self.int()?;
        if n < BigInt::from(min) {
            return Err(range_err(&self.path, format!("{n} is below {min}")));
        }
        Ok(n)
    }

    fn small<T: TryFrom<u64>>(&self, min: u64) -> Result<T> {
        let n = self.int()?;
        n.to_u64()
            .filter(|v| *v >= min)
            .and_then(|v| T::try_from(v).ok())
            .ok_or_else(|| range_err(&self.path, format!("{n} is outside the supported range")))
    }

    fn boolean(&self) -> Result<bool> {
        self.value
            .as_bool()
            .ok_or_else(|| parse_err(&self.path, "expected a boolean"))
    }
}

fn parse_witness(node: &Node<'_>) -> Result<PocklingtonWitness> {
    let c = node.field("c")?.int_at_least(3)?;
    let factored_part = node
        .field("factored_part")?
        .nonempty_items()?
        .iter()
        .map(|pair| {
            let items = pair.items()?;
            if items.len() != 2 {
                return Err(parse_err(&pair.path, "expected [prime, multiplicity]"));
            }
            Ok((items[0].small::<u64>(2)?, items[1].small::<u32>(1)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let base = node.field("base")?.int()?;
    let coprime_witnesses = match node.field("coprime_witnesses") {
        Ok(list) => list
            .items()?
            .iter()
            .map(|w| {
                let sign_node = w.field("sign")?;
                let sign = sign_node
                    .value
                    .as_i64()
                    .and_then(UnitSign::from_value)
                    .ok_or_else(|| range_err(&sign_node.path, "sign must be 1 or -1"))?;
                Ok(CoprimeWitness {
                    p: w.field("p")?.small::<u64>(2)?,
                    multiplier: w.field("multiplier")?.int()?,
                    quotient: w.field("quotient")?.int()?,
                    sign,
                })
            })
            .collect::<Result<Vec<_>>>()?,
        Err(_) => Vec::new(),
    };
    Ok(PocklingtonWitness {
        c,
        factored_part,
        base,
        coprime_witnesses,
    })
}

fn check_version(root: &Node<'_>) -> Result<()> {
    let v = root.field("format_version")?;
    match v.value.as_u64() {
        Some(FORMAT_VERSION) => Ok(()),
        Some(other) => Err(range_err(&v.path, format!("unsupported format_version {other}"))),
        None => Err(parse_err(&v.path, "expected an integer")),
    }
}

fn load(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| {
        parse_err(&format!("line {}, column {}", e.line(), e.column()), e.to_string())
    })
}

/// Parses and structurally validates a certificate.
pub fn parse(text: &str) -> Result<Certificate> {
    let value = load(text)?;
    let root = Node::root(&value);
    check_version(&root)?;
    let d = root.field("d")?.int_at_least(2)?;
    let primality = parse_witness(&root.field("primality")?)?;

    let split_primes = root
        .field("split_primes")?
        .nonempty_items()?
        .iter()
        .map(|row| {
            Ok(SplitPrime {
                c: row.field("c")?.int()?,
                e: row.field("e")?.int()?,
                f: row.field("f")?.int()?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let s = split_primes.len();

    let exps_node = root.field("denominator_exponents")?;
    let denominator_exponents = exps_node
        .items()?
        .iter()
        .map(|n| n.int_at_least(1))
        .collect::<Result<Vec<_>>>()?;
    if denominator_exponents.len() != s {
        return Err(range_err(
            &exps_node.path,
            format!("{} exponents for {s} split primes", denominator_exponents.len()),
        ));
    }

    let relations = root
        .field("relations")?
        .nonempty_items()?
        .iter()
        .map(|rel| {
            let factors_node = rel.field("factors")?;
            let mut prev = 0usize;
            let factors = factors_node
                .nonempty_items()?
                .iter()
                .map(|fe| {
                    let j_node = fe.field("j")?;
                    let j: usize = j_node.small(1)?;
                    if j > s {
                        return Err(range_err(&j_node.path, format!("index {j} exceeds s = {s}")));
                    }
                    if j <= prev {
                        return Err(range_err(&j_node.path, "factor indices must increase"));
                    }
                    prev = j;
                    Ok(FactorEntry {
                        j,
                        conj: fe.field("conj")?.boolean()?,
                        mult: fe.field("mult")?.small(1)?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Relation {
                a: rel.field("a")?.int()?,
                b: rel.field("b")?.int_at_least(1)?,
                factors,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let nonunit_modulus = root.field("nonunit_modulus")?.int_at_least(2)?;
    Ok(Certificate {
        d,
        primality,
        split_primes,
        denominator_exponents,
        relations,
        nonunit_modulus,
    })
}

/// Parses a standalone primality certificate: the `primality` object of a
/// full certificate plus `format_version`.
pub fn parse_pocklington(text: &str) -> Result<PocklingtonWitness> {
    let value = load(text)?;
    let root = Node::root(&value);
    check_version(&root)?;
    parse_witness(&root)
}

#[derive(Serialize)]
struct WitnessOut {
    p: String,
    multiplier: String,
    quotient: String,
    sign: i32,
}

#[derive(Serialize)]
struct PrimalityOut {
    c: String,
    factored_part: Vec<[String; 2]>,
    base: String,
    coprime_witnesses: Vec<WitnessOut>,
}

#[derive(Serialize)]
struct StandalonePrimalityOut {
    format_version: u64,
    #[serde(flatten)]
    witness: PrimalityOut,
}

#[derive(Serialize)]
struct SplitPrimeOut {
    c: String,
    e: String,
    f: String,
}

#[derive(Serialize)]
struct FactorOut {
    j: String,
    conj: bool,
    mult: String,
}

#[derive(Serialize)]
struct RelationOut {
    a: String,
    b: String,
    factors: Vec<FactorOut>,
}

#[derive(Serialize)]
struct CertificateOut {
    format_version: u64,
    d: String,
    primality: PrimalityOut,
    split_primes: Vec<SplitPrimeOut>,
    denominator_exponents: Vec<String>,
    relations: Vec<RelationOut>,
    nonunit_modulus: String,
}

fn witness_out(w: &PocklingtonWitness) -> PrimalityOut {
    PrimalityOut {
        c: w.c.to_string(),
        factored_part: w
            .factored_part
            .iter()
            .map(|(p, k)| [p.to_string(), k.to_string()])
            .collect(),
        base: w.base.to_string(),
        coprime_witnesses: w
            .coprime_witnesses
            .iter()
            .map(|cw| WitnessOut {
                p: cw.p.to_string(),
                multiplier: cw.multiplier.to_string(),
                quotient: cw.quotient.to_string(),
                sign: cw.sign.value(),
            })
            .collect(),
    }
}

fn to_pretty<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("plain data serializes");
    text.push('\n');
    text
}

/// Canonical text form: two-space indented JSON with a trailing newline.
pub fn serialize(cert: &Certificate) -> String {
    let out = CertificateOut {
        format_version: FORMAT_VERSION,
        d: cert.d.to_string(),
        primality: witness_out(&cert.primality),
        split_primes: cert
            .split_primes
            .iter()
            .map(|sp| SplitPrimeOut {
                c: sp.c.to_string(),
                e: sp.e.to_string(),
                f: sp.f.to_string(),
            })
            .collect(),
        denominator_exponents: cert.denominator_exponents.iter().map(|x| x.to_string()).collect(),
        relations: cert
            .relations
            .iter()
            .map(|r| RelationOut {
                a: r.a.to_string(),
                b: r.b.to_string(),
                factors: r
                    .factors
                    .iter()
                    .map(|fe| FactorOut {
                        j: fe.j.to_string(),
                        conj: fe.conj,
                        mult: fe.mult.to_string(),
                    })
                    .collect(),
            })
            .collect(),
        nonunit_modulus: cert.nonunit_modulus.to_string(),
    };
    to_pretty(&out)
}

pub fn serialize_pocklington(w: &PocklingtonWitness) -> String {
    to_pretty(&StandalonePrimalityOut {
        format_version: FORMAT_VERSION,
        witness: witness_out(w),
    })
}

impl Certificate {
    /// The shipped certificate for `d = 39028039587479`.
    pub fn bundled() -> Self {
        parse(BUNDLED).expect("bundled certificate is valid")
    }

    pub fn bundled_text() -> &'static str {
        BUNDLED
    }

    /// `(a_i, b_i)` pairs in relation order.
    pub fn relation_pairs(&self) -> Vec<(BigInt, BigInt)> {
        self.relations.iter().map(|r| (r.a.clone(), r.b.clone())).collect()
    }
}

/// The smallest shape the format allows: one split prime, one relation.
pub fn toy_certificate() -> Certificate {
    // d = 3 with 2 * 1 + 1^2 = 3 and 3 - (-1)^2 = 2.
    Certificate {
        d: BigInt::from(3),
        primality: PocklingtonWitness {
            c: BigInt::from(3),
            factored_part: vec![(2, 1)],
            base: BigInt::from(2),
            coprime_witnesses: vec![],
        },
        split_primes: vec![SplitPrime {
            c: BigInt::from(2),
            e: BigInt::one(),
            f: BigInt::one(),
        }],
        denominator_exponents: vec![BigInt::one()],
        relations: vec![Relation {
            a: BigInt::from(-1),
            b: BigInt::from(2),
            factors: vec![FactorEntry {
                j: 1,
                conj: false,
                mult: 1,
            }],
        }],
        nonunit_modulus: BigInt::from(2),
    }
}
