//! Symbolic pi-finite p-spaces and their chi-sequences
//! `lambda_X(n) = |[T^n, X]|`.
//!
//! A [`SpaceExpr`] records only what the counts depend on: homotopy group
//! orders for products of Eilenberg-MacLane spaces, a multiplication table
//! for classifying spaces, the parameter `m` for the cup-power fibres, and
//! formal products, coproducts and pushouts. Pushouts are never resolved to
//! an actual space; their sequences and cardinalities are defined additively.

mod cup;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use parking_lot::Mutex;
use serde::Serialize;
use serde_json::{json, Value};

use crate::arith::{self, big, binomial, int, Rational};
use crate::error::{Error, Result};
use crate::expoly::{ExpoPoly, IntValuedPoly};
use crate::groups::{self, Budget, FiniteGroup};
use crate::par::{self, ExecMode};

pub use cup::{
    cup_fiber_chi, cup_fiber_closed_form, s_count_brute, s_count_brute_with, skew_rank_count,
};

/// Finite abelian group given by invariant factors, e.g. `[3, 9]` for
/// `C_3 x C_9`. Only its order enters the counts.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AbelianGroup(Vec<u64>);

impl AbelianGroup {
    pub fn new(factors: Vec<u64>) -> Result<Self> {
        if factors.contains(&0) {
            return Err(Error::Parse("invariant factors must be positive".into()));
        }
        Ok(AbelianGroup(factors))
    }

    pub fn cyclic(m: u64) -> Self {
        AbelianGroup(vec![m])
    }

    pub fn factors(&self) -> &[u64] {
        &self.0
    }

    pub fn order(&self) -> BigInt {
        self.0.iter().map(|&f| BigInt::from(f)).product()
    }

    fn order_u64(&self) -> Option<u64> {
        self.0.iter().try_fold(1u64, |acc, &f| acc.checked_mul(f))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SpaceExpr {
    Point,
    Empty,
    /// `B^deg A`.
    EM { group: AbelianGroup, deg: u32 },
    /// Product of Eilenberg-MacLane spaces `prod_k B^k A_k`; `k = 0` allowed
    /// (a discrete set of `|A_0|` points).
    GEM(Vec<(AbelianGroup, u32)>),
    Classifying(Arc<FiniteGroup>),
    Product(Box<SpaceExpr>, Box<SpaceExpr>),
    Coproduct(Box<SpaceExpr>, Box<SpaceExpr>),
    /// Formal homotopy pushout of `X <- Z -> Y`, written `(X, Y, Z)`.
    Pushout(Box<SpaceExpr>, Box<SpaceExpr>, Box<SpaceExpr>),
    /// Fibre of the cup-power `B^2 C_p -> B^(2m) C_p`; `p` defaults to the
    /// working prime.
    CupFiber2 { m: u32, p: Option<u64> },
}

impl SpaceExpr {
    pub fn em(order: u64, deg: u32) -> Self {
        SpaceExpr::EM {
            group: AbelianGroup::cyclic(order),
            deg,
        }
    }

    pub fn bg(g: FiniteGroup) -> Self {
        SpaceExpr::Classifying(Arc::new(g))
    }

    pub fn product(x: SpaceExpr, y: SpaceExpr) -> Self {
        SpaceExpr::Product(Box::new(x), Box::new(y))
    }

    pub fn coproduct(x: SpaceExpr, y: SpaceExpr) -> Self {
        SpaceExpr::Coproduct(Box::new(x), Box::new(y))
    }

    pub fn pushout(x: SpaceExpr, y: SpaceExpr, z: SpaceExpr) -> Self {
        SpaceExpr::Pushout(Box::new(x), Box::new(y), Box::new(z))
    }

    pub fn cup_fiber(m: u32) -> Self {
        SpaceExpr::CupFiber2 { m, p: None }
    }

    /// Largest degree with possibly nonzero homotopy.
    pub fn truncation_degree(&self) -> u32 {
        match self {
            SpaceExpr::Point | SpaceExpr::Empty => 0,
            SpaceExpr::EM { deg, .. } => *deg,
            SpaceExpr::GEM(fs) => fs.iter().map(|(_, k)| *k).max().unwrap_or(0),
            SpaceExpr::Classifying(_) => 1,
            SpaceExpr::Product(x, y) | SpaceExpr::Coproduct(x, y) => {
                x.truncation_degree().max(y.truncation_degree())
            }
            SpaceExpr::Pushout(x, y, z) => x
                .truncation_degree()
                .max(y.truncation_degree())
                .max(z.truncation_degree()),
            SpaceExpr::CupFiber2 { m, .. } => 2 * m - 1,
        }
    }

    pub fn contains_pushout(&self) -> bool {
        match self {
            SpaceExpr::Pushout(..) => true,
            SpaceExpr::Product(x, y) | SpaceExpr::Coproduct(x, y) => {
                x.contains_pushout() || y.contains_pushout()
            }
            _ => false,
        }
    }

    /// A common multiple of the denominators of the chi-sequence; only
    /// classifying spaces of groups contribute.
    pub fn denominator_bound(&self) -> BigInt {
        match self {
            SpaceExpr::Classifying(g) => BigInt::from(g.order()),
            SpaceExpr::Product(x, y) => x.denominator_bound() * y.denominator_bound(),
            SpaceExpr::Coproduct(x, y) => x.denominator_bound().lcm(&y.denominator_bound()),
            SpaceExpr::Pushout(x, y, z) => x
                .denominator_bound()
                .lcm(&y.denominator_bound())
                .lcm(&z.denominator_bound()),
            _ => BigInt::one(),
        }
    }

    /// `(degree, |pi_degree|)` for every nontrivial homotopy group of a
    /// connected space. Fails for coproducts, pushouts, and data with a
    /// nontrivial `pi_0`.
    pub fn homotopy_orders(&self, p: u64) -> Result<Vec<(u32, BigInt)>> {
        let not_connected = |what: &str| Err(Error::NotConnected(what.to_string()));
        let mut out: Vec<(u32, BigInt)> = Vec::new();
        match self {
            SpaceExpr::Point => {}
            SpaceExpr::Empty => return not_connected("empty space"),
            SpaceExpr::EM { group, deg } => out.push((*deg, group.order())),
            SpaceExpr::GEM(fs) => out.extend(fs.iter().map(|(a, k)| (*k, a.order()))),
            SpaceExpr::Classifying(g) => out.push((1, BigInt::from(g.order()))),
            SpaceExpr::CupFiber2 { m, p: q } => {
                let q = BigInt::from(q.unwrap_or(p));
                out.push((2, q.clone()));
                out.push((2 * m - 1, q));
            }
            SpaceExpr::Product(x, y) => {
                out.extend(x.homotopy_orders(p)?);
                out.extend(y.homotopy_orders(p)?);
            }
            SpaceExpr::Coproduct(..) => return not_connected("coproduct"),
            SpaceExpr::Pushout(..) => return not_connected("formal pushout"),
        }
        if out.iter().any(|(k, o)| *k == 0 && !o.is_one()) {
            return not_connected("nontrivial pi_0");
        }
        out.retain(|(_, o)| !o.is_one());
        Ok(out)
    }

    /// Whether every homotopy group datum is a p-group. Classifying spaces of
    /// other finite groups are accepted but flagged as extended scope.
    pub fn validate_p_small(&self, p: u64) -> ValidationReport {
        let mut report = ValidationReport {
            accepted: true,
            witnesses: Vec::new(),
            extended_scope: Vec::new(),
        };
        self.validate_into(p, &mut report);
        report.accepted = report.witnesses.is_empty();
        report
    }

    fn validate_into(&self, p: u64, report: &mut ValidationReport) {
        let p_group = |order: &BigInt| {
            let mut o = order.clone();
            let p = BigInt::from(p);
            while (&o % &p).is_zero() {
                o /= &p;
            }
            o.is_one()
        };
        match self {
            SpaceExpr::Point | SpaceExpr::Empty => {}
            SpaceExpr::EM { group, deg } => {
                if !p_group(&group.order()) {
                    report
                        .witnesses
                        .push(format!("B^{deg} {} is not a {p}-group", describe_abelian(group)));
                }
            }
            SpaceExpr::GEM(fs) => {
                for (group, deg) in fs {
                    if !p_group(&group.order()) {
                        report.witnesses.push(format!(
                            "B^{deg} {} is not a {p}-group",
                            describe_abelian(group)
                        ));
                    }
                }
            }
            SpaceExpr::Classifying(g) => {
                if !g.is_p_group(p) {
                    report.extended_scope.push(format!(
                        "B{} is not a {p}-group; chi counts p-power-order tuples",
                        g.display_name()
                    ));
                }
            }
            SpaceExpr::CupFiber2 { p: Some(q), .. } if *q != p => report
                .witnesses
                .push(format!("cup-power fibre over C_{q} at working prime {p}")),
            SpaceExpr::CupFiber2 { .. } => {}
            SpaceExpr::Product(x, y) | SpaceExpr::Coproduct(x, y) => {
                x.validate_into(p, report);
                y.validate_into(p, report);
            }
            SpaceExpr::Pushout(x, y, z) => {
                x.validate_into(p, report);
                y.validate_into(p, report);
                z.validate_into(p, report);
            }
        }
    }

    /// Parse the JSON grammar, e.g. `{"EM": {"group": [3, 3], "deg": 2}}`,
    /// `{"BG": "D4"}`, `{"Pushout": [X, Y, Z]}`, `{"CupFiber2": {"m": 2}}`.
    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |msg: &str| Error::Parse(format!("{msg}: {v}"));
        if let Some(s) = v.as_str() {
            return match s {
                "Point" => Ok(SpaceExpr::Point),
                "Empty" => Ok(SpaceExpr::Empty),
                _ => Err(bad("unknown space")),
            };
        }
        let obj = v.as_object().ok_or_else(|| bad("expected an object"))?;
        if obj.len() != 1 {
            return Err(bad("expected exactly one constructor key"));
        }
        let (key, body) = obj.iter().next().expect("one entry");
        let children = |arity: usize| -> Result<Vec<SpaceExpr>> {
            let items = body
                .as_array()
                .ok_or_else(|| bad("expected an array of spaces"))?;
            if items.len() != arity {
                return Err(bad(&format!("{key} takes {arity} spaces")));
            }
            items.iter().map(SpaceExpr::from_json).collect()
        };
        match key.as_str() {
            "Point" => Ok(SpaceExpr::Point),
            "Empty" => Ok(SpaceExpr::Empty),
            "EM" => {
                let (group, deg) = parse_em(body)?;
                if deg == 0 {
                    return Err(bad("EM degree must be at least 1"));
                }
                Ok(SpaceExpr::EM { group, deg })
            }
            "GEM" => {
                let items = body.as_array().ok_or_else(|| bad("GEM takes an array"))?;
                Ok(SpaceExpr::GEM(
                    items.iter().map(parse_em).collect::<Result<_>>()?,
                ))
            }
            "BG" => {
                let g = match body {
                    Value::String(s) => FiniteGroup::from_spec(s)?,
                    other => FiniteGroup::from_json(other)?,
                };
                Ok(SpaceExpr::bg(g))
            }
            "Product" | "Coproduct" => {
                let mut c = children(2)?.into_iter();
                let (x, y) = (c.next().expect("2"), c.next().expect("2"));
                Ok(if key == "Product" {
                    SpaceExpr::product(x, y)
                } else {
                    SpaceExpr::coproduct(x, y)
                })
            }
            "Pushout" => {
                let mut c = children(3)?.into_iter();
                Ok(SpaceExpr::pushout(
                    c.next().expect("3"),
                    c.next().expect("3"),
                    c.next().expect("3"),
                ))
            }
            "CupFiber2" => {
                let m = body
                    .get("m")
                    .and_then(Value::as_u64)
                    .filter(|&m| m >= 1)
                    .ok_or_else(|| bad("CupFiber2 needs m >= 1"))?;
                let p = match body.get("p") {
                    None | Some(Value::Null) => None,
                    Some(q) => Some(q.as_u64().ok_or_else(|| bad("p must be an integer"))?),
                };
                Ok(SpaceExpr::CupFiber2 { m: m as u32, p })
            }
            _ => Err(bad("unknown space constructor")),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text)?;
        SpaceExpr::from_json(&v)
    }

    pub fn to_json(&self) -> Value {
        let em = |g: &AbelianGroup, d: u32| json!({"group": g.factors(), "deg": d});
        match self {
            SpaceExpr::Point => json!("Point"),
            SpaceExpr::Empty => json!("Empty"),
            SpaceExpr::EM { group, deg } => json!({ "EM": em(group, *deg) }),
            SpaceExpr::GEM(fs) => {
                json!({ "GEM": fs.iter().map(|(g, d)| em(g, *d)).collect::<Vec<_>>() })
            }
            SpaceExpr::Classifying(g) => match g.name() {
                Some(name) if FiniteGroup::from_spec(name).is_ok_and(|h| &h == g.as_ref()) => {
                    json!({ "BG": name })
                }
                _ => json!({ "BG": g.to_json() }),
            },
            SpaceExpr::Product(x, y) => json!({"Product": [x.to_json(), y.to_json()]}),
            SpaceExpr::Coproduct(x, y) => json!({"Coproduct": [x.to_json(), y.to_json()]}),
            SpaceExpr::Pushout(x, y, z) => {
                json!({"Pushout": [x.to_json(), y.to_json(), z.to_json()]})
            }
            SpaceExpr::CupFiber2 { m, p: None } => json!({"CupFiber2": {"m": m}}),
            SpaceExpr::CupFiber2 { m, p: Some(p) } => json!({"CupFiber2": {"m": m, "p": p}}),
        }
    }
}

fn parse_em(v: &Value) -> Result<(AbelianGroup, u32)> {
    let bad = || Error::Parse(format!("expected {{\"group\": [...], \"deg\": k}}: {v}"));
    let factors = v
        .get("group")
        .and_then(Value::as_array)
        .ok_or_else(bad)?
        .iter()
        .map(|f| f.as_u64().ok_or_else(bad))
        .collect::<Result<Vec<_>>>()?;
    let deg = v.get("deg").and_then(Value::as_u64).ok_or_else(bad)?;
    Ok((AbelianGroup::new(factors)?, deg as u32))
}

fn describe_abelian(g: &AbelianGroup) -> String {
    let parts: Vec<String> = g.factors().iter().map(|f| format!("C{f}")).collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("x")
    }
}

impl fmt::Display for SpaceExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceExpr::Point => f.write_str("pt"),
            SpaceExpr::Empty => f.write_str("empty"),
            SpaceExpr::EM { group, deg } => write!(f, "B^{deg}{}", describe_abelian(group)),
            SpaceExpr::GEM(fs) => {
                let parts: Vec<String> = fs
                    .iter()
                    .map(|(g, d)| format!("B^{d}{}", describe_abelian(g)))
                    .collect();
                write!(f, "({})", parts.join(" x "))
            }
            SpaceExpr::Classifying(g) => write!(f, "B{}", g.display_name()),
            SpaceExpr::Product(x, y) => write!(f, "({x} x {y})"),
            SpaceExpr::Coproduct(x, y) => write!(f, "({x} + {y})"),
            SpaceExpr::Pushout(x, y, z) => write!(f, "({x} u_{z} {y})"),
            SpaceExpr::CupFiber2 { m, .. } => write!(f, "X_(2,{m})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub accepted: bool,
    pub witnesses: Vec<String>,
    pub extended_scope: Vec<String>,
}

type Generator = Arc<dyn Fn(u32) -> Result<Rational> + Send + Sync>;

#[derive(Clone)]
enum Source {
    ClosedForm(ExpoPoly),
    Lazy(Generator),
    Prefix(Vec<Rational>),
}

/// The sequence `n -> lambda_X(n)` together with the data its continuity
/// bound depends on: truncation degree `d`, working prime `p`, and a common
/// denominator whose l-adic valuation is the allowed slack.
#[derive(Clone)]
pub struct ChiSequence {
    source: Source,
    degree: u32,
    p: u64,
    denominator: BigInt,
}

impl fmt::Debug for ChiSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.source {
            Source::ClosedForm(e) => format!("closed form {e}"),
            Source::Lazy(_) => "lazy".into(),
            Source::Prefix(v) => format!("prefix of length {}", v.len()),
        };
        f.debug_struct("ChiSequence")
            .field("source", &kind)
            .field("degree", &self.degree)
            .field("p", &self.p)
            .finish()
    }
}

impl ChiSequence {
    pub fn closed_form(e: ExpoPoly, degree: u32) -> Self {
        let p = e.base();
        ChiSequence {
            source: Source::ClosedForm(e),
            degree,
            p,
            denominator: BigInt::one(),
        }
    }

    pub fn lazy(
        f: impl Fn(u32) -> Result<Rational> + Send + Sync + 'static,
        degree: u32,
        p: u64,
    ) -> Self {
        ChiSequence {
            source: Source::Lazy(Arc::new(f)),
            degree,
            p,
            denominator: BigInt::one(),
        }
    }

    /// A sequence known only through its first values.
    pub fn from_prefix(values: Vec<Rational>, degree: u32, p: u64) -> Self {
        ChiSequence {
            source: Source::Prefix(values),
            degree,
            p,
            denominator: BigInt::one(),
        }
    }

    pub fn with_denominator(mut self, denominator: BigInt) -> Self {
        self.denominator = denominator;
        self
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn closed(&self) -> Option<&ExpoPoly> {
        match &self.source {
            Source::ClosedForm(e) => Some(e),
            _ => None,
        }
    }

    /// `v_l` of the common denominator.
    pub fn slack(&self, l: u64) -> i64 {
        arith::l_valuation(&big(self.denominator.clone()), l)
            .finite()
            .unwrap_or(0)
    }

    pub fn value(&self, n: u32) -> Result<Rational> {
        match &self.source {
            Source::ClosedForm(e) => Ok(e.eval(n as i64)),
            Source::Lazy(f) => f(n),
            Source::Prefix(v) => v.get(n as usize).cloned().ok_or_else(|| {
                Error::Unsupported(format!("sequence prefix has only {} values", v.len()))
            }),
        }
    }

    /// `x(0..len)`.
    pub fn prefix(&self, len: usize) -> Result<Vec<Rational>> {
        self.prefix_with(len, ExecMode::default())
    }

    pub fn prefix_with(&self, len: usize, mode: ExecMode) -> Result<Vec<Rational>> {
        if let Source::Prefix(v) = &self.source {
            if v.len() < len {
                return Err(Error::Unsupported(format!(
                    "sequence prefix has only {} values, {len} requested",
                    v.len()
                )));
            }
            return Ok(v[..len].to_vec());
        }
        par::map_range(mode, 0..len, |n| self.value(n as u32))
            .into_iter()
            .collect()
    }
}

/// Evaluates spaces at a fixed working prime. Cloning shares the cache of
/// expensive leaf values.
#[derive(Clone)]
pub struct Evaluator {
    p: u64,
    budget: Budget,
    cache: Arc<Mutex<HashMap<(SpaceExpr, u32), Rational>>>,
}

impl fmt::Debug for Evaluator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Evaluator")
            .field("p", &self.p)
            .field("budget", &self.budget)
            .finish()
    }
}

impl Evaluator {
    pub fn new(p: u64) -> Result<Self> {
        arith::ensure_prime(p)?;
        Ok(Evaluator {
            p,
            budget: Budget::default(),
            cache: Arc::default(),
        })
    }

    pub fn with_budget(mut self, budget: Budget) -> Self {
        self.budget = budget;
        self
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn budget(&self) -> &Budget {
        &self.budget
    }

    fn cached(&self, x: &SpaceExpr, n: u32, f: impl FnOnce() -> Result<Rational>) -> Result<Rational> {
        let key = (x.clone(), n);
        if let Some(v) = self.cache.lock().get(&key) {
            return Ok(v.clone());
        }
        let v = f()?;
        self.cache.lock().insert(key, v.clone());
        Ok(v)
    }

    /// `lambda_X(n) = chi_n(X)`, computed from the definitions (group
    /// counting for classifying spaces, the rank-count formula for the
    /// cup-power fibres).
    pub fn chi(&self, x: &SpaceExpr, n: u32) -> Result<Rational> {
        let em = |a: &AbelianGroup, d: u32| -> Rational {
            let e = binomial(n as i64, d as u64);
            let e = u32::try_from(e).expect("EM exponent fits");
            big(num_traits::pow(a.order(), e as usize))
        };
        Ok(match x {
            SpaceExpr::Point => int(1),
            SpaceExpr::Empty => int(0),
            SpaceExpr::EM { group, deg } => em(group, *deg),
            SpaceExpr::GEM(fs) => fs.iter().map(|(a, d)| em(a, *d)).product(),
            SpaceExpr::Classifying(g) => self.cached(x, n, || {
                Ok(big(BigInt::from(groups::chi_bg(g, self.p, n as usize, &self.budget)?)))
            })?,
            SpaceExpr::Product(a, b) => self.chi(a, n)? * self.chi(b, n)?,
            SpaceExpr::Coproduct(a, b) => self.chi(a, n)? + self.chi(b, n)?,
            SpaceExpr::Pushout(a, b, c) => self.chi(a, n)? + self.chi(b, n)? - self.chi(c, n)?,
            SpaceExpr::CupFiber2 { m, p } => self.cached(x, n, || {
                cup_fiber_chi(*m, p.unwrap_or(self.p), n as i64)
            })?,
        })
    }

    pub fn chi_prefix(&self, x: &SpaceExpr, len: usize) -> Result<Vec<Rational>> {
        (0..len as u32).map(|n| self.chi(x, n)).collect()
    }

    /// Closed form of `n -> chi_n(X)` in base `p`; `None` when some
    /// Eilenberg-MacLane factor is not a p-group.
    pub fn closed_form(&self, x: &SpaceExpr) -> Result<Option<ExpoPoly>> {
        let p = self.p;
        let em = |a: &AbelianGroup, d: u32| -> Option<ExpoPoly> {
            let e = arith::log_exact(a.order_u64()?, p)? as i64;
            Some(ExpoPoly::power(p, IntValuedPoly::binom(d as usize).scale(e)))
        };
        let both = |a: &SpaceExpr, b: &SpaceExpr| -> Result<Option<(ExpoPoly, ExpoPoly)>> {
            Ok(match (self.closed_form(a)?, self.closed_form(b)?) {
                (Some(x), Some(y)) => Some((x, y)),
                _ => None,
            })
        };
        Ok(match x {
            SpaceExpr::Point => Some(ExpoPoly::constant(p, int(1))),
            SpaceExpr::Empty => Some(ExpoPoly::zero(p)),
            SpaceExpr::EM { group, deg } => em(group, *deg),
            SpaceExpr::GEM(fs) => {
                let mut acc = Some(ExpoPoly::constant(p, int(1)));
                for (a, d) in fs {
                    acc = match (acc, em(a, *d)) {
                        (Some(acc), Some(t)) => Some(acc.mul(&t)?),
                        _ => None,
                    };
                }
                acc
            }
            SpaceExpr::Classifying(g) => Some(groups::hkr_chi(g, p, &self.budget)?),
            SpaceExpr::Product(a, b) => match both(a, b)? {
                Some((x, y)) => Some(x.mul(&y)?),
                None => None,
            },
            SpaceExpr::Coproduct(a, b) => match both(a, b)? {
                Some((x, y)) => Some(x.add(&y)?),
                None => None,
            },
            SpaceExpr::Pushout(a, b, c) => match (both(a, b)?, self.closed_form(c)?) {
                (Some((x, y)), Some(z)) => Some(x.add(&y)?.sub(&z)?),
                _ => None,
            },
            SpaceExpr::CupFiber2 { m, p: q } => {
                let q = q.unwrap_or(p);
                if q != p {
                    return Ok(None);
                }
                Some(cup_fiber_closed_form(*m, q)?)
            }
        })
    }

    /// The chi-sequence of `X`, as a closed form when one is available.
    pub fn sequence(&self, x: &SpaceExpr) -> Result<ChiSequence> {
        let d = x.truncation_degree();
        let seq = match self.closed_form(x)? {
            Some(e) => ChiSequence::closed_form(e, d),
            None => {
                let ev = self.clone();
                let expr = x.clone();
                ChiSequence::lazy(move |n| ev.chi(&expr, n), d, self.p)
            }
        };
        Ok(seq.with_denominator(x.denominator_bound()))
    }

    /// Homotopy cardinality, extended additively over pushouts. Classifying
    /// spaces use the p-typical cardinality (`1/|G|` for p-groups).
    pub fn cardinality(&self, x: &SpaceExpr) -> Result<Rational> {
        let em = |a: &AbelianGroup, d: u32| -> Rational {
            let o = big(a.order());
            if d.is_multiple_of(2) {
                o
            } else {
                o.recip()
            }
        };
        Ok(match x {
            SpaceExpr::Point => int(1),
            SpaceExpr::Empty => int(0),
            SpaceExpr::EM { group, deg } => em(group, *deg),
            SpaceExpr::GEM(fs) => fs.iter().map(|(a, d)| em(a, *d)).product(),
            SpaceExpr::Classifying(g) => groups::p_typical_cardinality(g, self.p, &self.budget)?,
            SpaceExpr::Product(a, b) => self.cardinality(a)? * self.cardinality(b)?,
            SpaceExpr::Coproduct(a, b) => self.cardinality(a)? + self.cardinality(b)?,
            SpaceExpr::Pushout(a, b, c) => {
                self.cardinality(a)? + self.cardinality(b)? - self.cardinality(c)?
            }
            // pi_2 = pi_(2m-1) = C_p cancel
            SpaceExpr::CupFiber2 { .. } => int(1),
        })
    }
}

/// `|L_old^n X| = prod_m |pi_m X|^(-C(n-1, m-1))` for connected `X`.
pub fn ofun(x: &SpaceExpr, p: u64, n: i64) -> Result<Rational> {
    let mut acc = Rational::one();
    for (m, order) in x.homotopy_orders(p)? {
        let e = binomial(n - 1, m as u64 - 1);
        let e = i64::try_from(e).expect("exponent fits");
        acc *= arith::pow_int(&big(order), -e)?;
    }
    Ok(acc)
}

/// The closed form `p^f(n)` of [`ofun`] for connected p-spaces, with
/// `f(x) = -sum_m log_p|pi_m| C(x-1, m-1)`.
pub fn ofun_exponent(x: &SpaceExpr, p: u64) -> Result<IntValuedPoly> {
    let mut f = IntValuedPoly::zero();
    for (m, order) in x.homotopy_orders(p)? {
        let order = u64::try_from(order).map_err(|_| Error::NotPrimePower(0))?;
        let c = arith::log_exact(order, p).ok_or(Error::NotPrimePower(order))? as i64;
        f = f.sub(&IntValuedPoly::binom(m as usize - 1).shift(-1).scale(c));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{prime_pow, rat};

    fn ev(p: u64) -> Evaluator {
        Evaluator::new(p).unwrap()
    }

    #[test]
    fn em_values() {
        let e = ev(3);
        for d in 1..=4u32 {
            for n in 0..=8u32 {
                let want = prime_pow(3, binomial(n as i64, d as u64).try_into().unwrap());
                assert_eq!(e.chi(&SpaceExpr::em(3, d), n).unwrap(), want);
            }
        }
        let gem = SpaceExpr::GEM(vec![
            (AbelianGroup::cyclic(3), 1),
            (AbelianGroup::new(vec![3, 9]).unwrap(), 2),
        ]);
        // 3^n * 27^C(n,2)
        assert_eq!(e.chi(&gem, 3).unwrap(), int(27 * 27i64.pow(3)));
    }

    #[test]
    fn pushout_of_points_over_bcp() {
        let e = ev(3);
        let x = SpaceExpr::pushout(
            SpaceExpr::Point,
            SpaceExpr::Point,
            SpaceExpr::bg(FiniteGroup::cyclic(3)),
        );
        for n in 0..6 {
            assert_eq!(e.chi(&x, n).unwrap(), int(2) - prime_pow(3, n as i64));
        }
        assert_eq!(e.chi(&x, 0).unwrap(), int(1));
        assert_eq!(e.cardinality(&x).unwrap(), rat(5, 3));
    }

    #[test]
    fn closed_forms_agree_with_direct_values() {
        let e = ev(3);
        let spaces = [
            SpaceExpr::em(9, 2),
            SpaceExpr::bg(FiniteGroup::heisenberg(3)),
            SpaceExpr::bg(FiniteGroup::symmetric(4)),
            SpaceExpr::cup_fiber(2),
            SpaceExpr::product(SpaceExpr::em(3, 1), SpaceExpr::cup_fiber(2)),
            SpaceExpr::coproduct(SpaceExpr::Point, SpaceExpr::em(3, 3)),
        ];
        for x in &spaces {
            let cf = e.closed_form(x).unwrap().expect("closed form");
            for n in 0..5 {
                assert_eq!(cf.eval(n as i64), e.chi(x, n).unwrap(), "{x} n={n}");
            }
        }
        assert!(e.closed_form(&SpaceExpr::em(5, 1)).unwrap().is_none());
    }

    #[test]
    fn cardinality_examples() {
        let e = ev(3);
        assert_eq!(e.cardinality(&SpaceExpr::em(3, 2)).unwrap(), int(3));
        assert_eq!(e.cardinality(&SpaceExpr::cup_fiber(2)).unwrap(), int(1));
        let e2 = ev(2);
        let d4 = SpaceExpr::bg(FiniteGroup::dihedral(4));
        assert_eq!(e2.cardinality(&d4).unwrap(), rat(1, 8));
        assert_eq!(e.cardinality(&SpaceExpr::Empty).unwrap(), int(0));
    }

    #[test]
    fn closed_form_extrapolates_to_cardinality() {
        let e = ev(3);
        let spaces = [
            SpaceExpr::em(3, 1),
            SpaceExpr::em(3, 2),
            SpaceExpr::em(27, 3),
            SpaceExpr::bg(FiniteGroup::heisenberg(3)),
            SpaceExpr::bg(FiniteGroup::symmetric(4)),
            SpaceExpr::cup_fiber(2),
            SpaceExpr::cup_fiber(3),
            SpaceExpr::pushout(
                SpaceExpr::em(3, 2),
                SpaceExpr::Point,
                SpaceExpr::em(3, 1),
            ),
        ];
        for x in &spaces {
            let cf = e.closed_form(x).unwrap().unwrap();
            assert_eq!(cf.extrapolate_minus_one(), e.cardinality(x).unwrap(), "{x}");
        }
    }

    #[test]
    fn ofun_examples() {
        let bg = SpaceExpr::bg(FiniteGroup::cyclic(9));
        for n in 1..6 {
            assert_eq!(ofun(&bg, 3, n).unwrap(), rat(1, 9));
        }
        let x = SpaceExpr::GEM(vec![
            (AbelianGroup::cyclic(3), 1),
            (AbelianGroup::cyclic(9), 2),
            (AbelianGroup::cyclic(3), 3),
        ]);
        let e = ev(3);
        assert_eq!(ofun(&x, 3, 0).unwrap(), e.cardinality(&x).unwrap());
        assert_eq!(ofun(&SpaceExpr::em(3, 2), 3, 2).unwrap(), rat(1, 3));
        assert!(matches!(
            ofun(&SpaceExpr::coproduct(SpaceExpr::Point, SpaceExpr::Point), 3, 1),
            Err(Error::NotConnected(_))
        ));
        let f = ofun_exponent(&x, 3).unwrap();
        for n in -2..6 {
            assert_eq!(prime_pow(3, f.eval_i64(n)), ofun(&x, 3, n).unwrap());
        }
    }

    #[test]
    fn validation_examples() {
        let bad = SpaceExpr::product(SpaceExpr::em(3, 1), SpaceExpr::em(5, 1));
        let r = bad.validate_p_small(3);
        assert!(!r.accepted);
        assert_eq!(r.witnesses.len(), 1);
        assert!(r.witnesses[0].contains("C5"));

        assert!(SpaceExpr::em(9, 2).validate_p_small(3).accepted);

        let s4 = SpaceExpr::bg(FiniteGroup::symmetric(4)).validate_p_small(3);
        assert!(s4.accepted);
        assert_eq!(s4.extended_scope.len(), 1);
    }

    #[test]
    fn truncation_degrees() {
        assert_eq!(SpaceExpr::cup_fiber(2).truncation_degree(), 3);
        assert_eq!(SpaceExpr::Point.truncation_degree(), 0);
        let x = SpaceExpr::pushout(SpaceExpr::em(3, 4), SpaceExpr::Point, SpaceExpr::em(3, 2));
        assert_eq!(x.truncation_degree(), 4);
        assert_eq!(SpaceExpr::bg(FiniteGroup::cyclic(3)).truncation_degree(), 1);
    }

    #[test]
    fn json_grammar() {
        let cases = [
            r#"{"EM": {"group": [3, 3], "deg": 2}}"#,
            r#"{"Pushout": ["Point", "Point", {"BG": "C3"}]}"#,
            r#"{"BG": "D4"}"#,
            r#"{"CupFiber2": {"m": 2}}"#,
            r#"{"GEM": [{"group": [3], "deg": 1}, {"group": [9], "deg": 2}]}"#,
            r#"{"Product": [{"BG": "C3xC3"}, "Empty"]}"#,
        ];
        for text in cases {
            let x = SpaceExpr::parse(text).unwrap();
            assert_eq!(SpaceExpr::from_json(&x.to_json()).unwrap(), x, "{text}");
        }
        let custom = r#"{"BG": {"order": 2, "table": [[0, 1], [1, 0]]}}"#;
        let x = SpaceExpr::parse(custom).unwrap();
        assert_eq!(SpaceExpr::from_json(&x.to_json()).unwrap(), x);

        for bad in [
            r#"{"EM": {"group": [3], "deg": 0}}"#,
            r#"{"Pushout": ["Point", "Point"]}"#,
            r#"{"Nope": 1}"#,
            r#"{"CupFiber2": {"m": 0}}"#,
            r#"{"BG": "Z5"}"#,
            r#"[1]"#,
        ] {
            assert!(SpaceExpr::parse(bad).is_err(), "{bad}");
        }
    }
}
