//! l-adic continuity certificates and extrapolation to `n = -1`.
//!
//! A sequence `x` on the naturals extends continuously to the l-adic integers
//! iff its Mahler coefficients `xbar(n)` tend to zero. For chi-sequences of
//! `d`-truncated p-spaces with `l | p - 1`, `l^floor(n/d)` divides `xbar(n)`,
//! so the value at `-1` is `sum_k (-1)^k xbar(k)`. Its partial sums `S_N`
//! are then within `l^floor((N+1)/d)` of the limit.
//!
//! Everything is exact: valuations of exact rationals, no truncated l-adic
//! numbers. Sequences with denominators (classifying spaces of groups that
//! are not p-groups) carry a slack `v_l(denominator)` that is subtracted
//! from every bound.

use serde::Serialize;

use crate::arith::{self, l_valuation, ratio_vec, Rational, Valuation};
use crate::error::{Error, Result};
use crate::spaces::{ChiSequence, Evaluator, SpaceExpr};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "status")]
pub enum Verdict {
    Pass,
    Fail { first_violation: usize },
}

impl Verdict {
    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }

    fn from_first_violation(i: Option<usize>) -> Self {
        match i {
            None => Verdict::Pass,
            Some(first_violation) => Verdict::Fail { first_violation },
        }
    }
}

/// `floor(n / max(d, 1)) - slack`.
pub fn divisibility_bound(n: usize, d: u32, slack: i64) -> i64 {
    (n / d.max(1) as usize) as i64 - slack
}

fn prime_divides_p_minus_one(l: u64, p: u64) -> Option<String> {
    if (p - 1).is_multiple_of(l) {
        None
    } else {
        Some(format!(
            "l = {l} does not divide p - 1 = {}; valuations are reported but the bound is not guaranteed",
            p - 1
        ))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ContinuityCertificate {
    pub l: u64,
    pub d: u32,
    pub slack: i64,
    pub checked_up_to: usize,
    /// `(n, v_l(xbar(n)))`.
    pub valuations: Vec<(usize, Valuation)>,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

impl ContinuityCertificate {
    pub fn passed(&self) -> bool {
        self.verdict.passed()
    }
}

/// Certificate from an explicit prefix `x(0..=n_max)`.
pub fn certify_prefix(xs: &[Rational], l: u64, d: u32, slack: i64) -> ContinuityCertificate {
    let xbar = arith::inverse_binomial_transform(xs);
    certify_transformed(&xbar, l, d, slack)
}

fn certify_transformed(xbar: &[Rational], l: u64, d: u32, slack: i64) -> ContinuityCertificate {
    let valuations: Vec<(usize, Valuation)> = xbar
        .iter()
        .enumerate()
        .map(|(n, x)| (n, l_valuation(x, l)))
        .collect();
    let first = valuations
        .iter()
        .find(|(n, v)| !v.is_at_least(divisibility_bound(*n, d, slack)))
        .map(|(n, _)| *n);
    ContinuityCertificate {
        l,
        d,
        slack,
        checked_up_to: xbar.len().saturating_sub(1),
        valuations,
        verdict: Verdict::from_first_violation(first),
        warning: None,
    }
}

/// Checks `l^(floor(n/d) - slack) | xbar(n)` for `n <= n_max`.
pub fn certify_continuity(seq: &ChiSequence, l: u64, n_max: usize) -> Result<ContinuityCertificate> {
    arith::ensure_prime(l)?;
    let xs = seq.prefix(n_max + 1)?;
    let mut cert = certify_prefix(&xs, l, seq.degree(), seq.slack(l));
    cert.warning = prime_divides_p_minus_one(l, seq.prime());
    Ok(cert)
}

#[derive(Debug, Clone, Serialize)]
pub struct ExtrapolationReport {
    pub l: u64,
    pub d: u32,
    pub slack: i64,
    /// `S_0..S_N`.
    #[serde(with = "ratio_vec")]
    pub partials: Vec<Rational>,
    /// `floor((N+1)/d) - slack`: the valuation `S_N - limit` is guaranteed
    /// to reach.
    pub guaranteed_error_exponent: i64,
    #[serde(serialize_with = "serialize_opt_ratio")]
    pub target: Option<Rational>,
    /// `v_l(S_n - target)` for each `n`; empty without a target.
    pub target_valuations: Vec<Valuation>,
    pub certificate: ContinuityCertificate,
    pub verdict: Verdict,
}

fn serialize_opt_ratio<S: serde::Serializer>(x: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(x) => s.serialize_str(&arith::format_ratio(x)),
        None => s.serialize_none(),
    }
}

impl ExtrapolationReport {
    pub fn passed(&self) -> bool {
        self.verdict.passed()
    }

    pub fn last_partial(&self) -> &Rational {
        self.partials.last().expect("at least one partial sum")
    }

    /// `{"l", "d", "verdict", "partials", "valuations", ...}`; `valuations`
    /// holds `v_l(S_n - target)` when a target is present and
    /// `v_l(xbar(n))` otherwise.
    pub fn to_json(&self) -> serde_json::Value {
        let valuations = if self.target.is_some() {
            serde_json::to_value(&self.target_valuations)
        } else {
            serde_json::to_value(self.certificate.valuations.iter().map(|(_, v)| v).collect::<Vec<_>>())
        }
        .expect("valuations serialize");
        let mut v = serde_json::to_value(self).expect("report serializes");
        let obj = v.as_object_mut().expect("object");
        obj.insert(
            "verdict".into(),
            serde_json::Value::from(if self.passed() { "pass" } else { "fail" }),
        );
        obj.insert("valuations".into(), valuations);
        v
    }
}

/// Partial sums `S_n = sum_(k<=n) (-1)^k xbar(k)`.
pub fn alternating_partial_sums(xbar: &[Rational]) -> Vec<Rational> {
    let mut acc = Rational::from_integer(0.into());
    xbar.iter()
        .enumerate()
        .map(|(k, x)| {
            if k % 2 == 0 {
                acc += x;
            } else {
                acc -= x;
            }
            acc.clone()
        })
        .collect()
}

/// Extrapolation from an explicit prefix. Passes iff the certificate passes
/// and, with a target, `v_l(S_n - target) >= floor((n+1)/d) - slack` for
/// every `n`.
pub fn extrapolate_prefix(
    xs: &[Rational],
    l: u64,
    d: u32,
    slack: i64,
    target: Option<Rational>,
) -> ExtrapolationReport {
    let xbar = arith::inverse_binomial_transform(xs);
    let certificate = certify_transformed(&xbar, l, d, slack);
    let partials = alternating_partial_sums(&xbar);
    let n_max = partials.len().saturating_sub(1);
    let target_valuations: Vec<Valuation> = match &target {
        Some(t) => partials.iter().map(|s| l_valuation(&(s - t), l)).collect(),
        None => Vec::new(),
    };
    let verdict = match certificate.verdict {
        Verdict::Fail { .. } => certificate.verdict,
        Verdict::Pass => Verdict::from_first_violation(
            target_valuations
                .iter()
                .enumerate()
                .find(|(n, v)| !v.is_at_least(divisibility_bound(n + 1, d, slack)))
                .map(|(n, _)| n),
        ),
    };
    ExtrapolationReport {
        l,
        d,
        slack,
        partials,
        guaranteed_error_exponent: divisibility_bound(n_max + 1, d, slack),
        target,
        target_valuations,
        certificate,
        verdict,
    }
}

pub fn mahler_extrapolate(
    seq: &ChiSequence,
    l: u64,
    n_max: usize,
    target: Option<Rational>,
) -> Result<ExtrapolationReport> {
    arith::ensure_prime(l)?;
    let xs = seq.prefix(n_max + 1)?;
    let mut report = extrapolate_prefix(&xs, l, seq.degree(), seq.slack(l), target);
    report.certificate.warning = prime_divides_p_minus_one(l, seq.prime());
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct LambdaShiftReport {
    pub space: String,
    #[serde(with = "arith::ratio_string")]
    pub cardinality: Rational,
    /// `Lambda(0..=N+1)`: the cardinality followed by `lambda(0..=N)`.
    #[serde(with = "ratio_vec")]
    pub lambda_shifted: Vec<Rational>,
    /// `v_l` of the Mahler coefficients of `Lambda`; informational.
    pub lambda_shifted_valuations: Vec<Valuation>,
    pub extrapolation: ExtrapolationReport,
    pub verdict: Verdict,
}

impl LambdaShiftReport {
    pub fn passed(&self) -> bool {
        self.verdict.passed()
    }
}

/// Extrapolates `lambda_X` to `-1` with target `Lambda_X(0) = |X|`.
pub fn lambda_shift_check(
    ev: &Evaluator,
    x: &SpaceExpr,
    l: u64,
    n_max: usize,
) -> Result<LambdaShiftReport> {
    if x.contains_pushout() {
        return Err(Error::Unsupported(format!(
            "{x} is a formal pushout; the shifted sequence is only defined for genuine spaces"
        )));
    }
    let card = ev.cardinality(x)?;
    let seq = ev.sequence(x)?;
    let extrapolation = mahler_extrapolate(&seq, l, n_max, Some(card.clone()))?;
    let mut shifted = vec![card.clone()];
    shifted.extend(seq.prefix(n_max + 1)?);
    let lambda_shifted_valuations = arith::inverse_binomial_transform(&shifted)
        .iter()
        .map(|v| l_valuation(v, l))
        .collect();
    Ok(LambdaShiftReport {
        space: x.to_string(),
        cardinality: card,
        lambda_shifted: shifted,
        lambda_shifted_valuations,
        verdict: extrapolation.verdict,
        extrapolation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, prime_pow, rat};
    use crate::groups::FiniteGroup;
    use crate::spaces::AbelianGroup;

    fn ev(p: u64) -> Evaluator {
        Evaluator::new(p).unwrap()
    }

    #[test]
    fn bcp_certificate() {
        let e = ev(3);
        let seq = e.sequence(&SpaceExpr::bg(FiniteGroup::cyclic(3))).unwrap();
        let cert = certify_continuity(&seq, 2, 8).unwrap();
        assert!(cert.passed());
        for (n, v) in &cert.valuations {
            assert_eq!(*v, Valuation::Finite(*n as i64));
        }
        assert!(cert.warning.is_none());
    }

    #[test]
    fn em2_certificate_and_extrapolation() {
        let e = ev(3);
        let x = SpaceExpr::em(3, 2);
        let seq = e.sequence(&x).unwrap();
        let cert = certify_continuity(&seq, 2, 8).unwrap();
        assert!(cert.passed());
        let r = mahler_extrapolate(&seq, 2, 12, Some(int(3))).unwrap();
        assert!(r.passed(), "{:?}", r.target_valuations);
        assert_eq!(r.guaranteed_error_exponent, 6);
    }

    #[test]
    fn constant_sequence() {
        let xs = vec![int(5); 10];
        for l in [2, 3, 7] {
            let cert = certify_prefix(&xs, l, 0, 0);
            assert!(cert.passed());
            assert!(cert.valuations[1..].iter().all(|(_, v)| *v == Valuation::Infinite));
        }
        let r = extrapolate_prefix(&xs, 2, 0, 0, Some(int(5)));
        assert!(r.passed());
    }

    #[test]
    fn geometric_partials() {
        let xs: Vec<Rational> = (0..6).map(|n| prime_pow(3, n)).collect();
        let r = extrapolate_prefix(&xs, 2, 1, 0, Some(rat(1, 3)));
        assert_eq!(r.partials[..3], [int(1), int(-1), int(3)]);
        assert_eq!(r.target_valuations[0], Valuation::Finite(1));
        assert_eq!(r.target_valuations[1], Valuation::Finite(2));
        assert!(r.passed());
    }

    #[test]
    fn zero_sequence() {
        let r = extrapolate_prefix(&vec![int(0); 5], 2, 1, 0, Some(int(0)));
        assert!(r.partials.iter().all(|s| *s == int(0)));
        assert!(r.passed());
    }

    #[test]
    fn wrong_target_fails() {
        let xs: Vec<Rational> = (0..10).map(|n| prime_pow(3, n)).collect();
        let r = extrapolate_prefix(&xs, 2, 1, 0, Some(rat(1, 5)));
        assert!(matches!(r.verdict, Verdict::Fail { .. }));
    }

    #[test]
    fn violated_divisibility_is_located() {
        // 2^n has xbar(n) = 1
        let xs: Vec<Rational> = (0..6).map(|n| int(1 << n)).collect();
        let cert = certify_prefix(&xs, 3, 1, 0);
        assert_eq!(cert.verdict, Verdict::Fail { first_violation: 1 });
    }

    #[test]
    fn lambda_shift_examples() {
        let e = ev(3);
        let gem = SpaceExpr::GEM(vec![
            (AbelianGroup::cyclic(3), 1),
            (AbelianGroup::cyclic(3), 2),
        ]);
        for (x, card) in [
            (SpaceExpr::bg(FiniteGroup::cyclic(3)), rat(1, 3)),
            (gem, int(1)),
            (SpaceExpr::cup_fiber(2), int(1)),
            (SpaceExpr::bg(FiniteGroup::heisenberg(3)), rat(1, 27)),
        ] {
            let r = lambda_shift_check(&e, &x, 2, 10).unwrap();
            assert!(r.passed(), "{x}");
            assert_eq!(r.cardinality, card);
            assert_eq!(r.lambda_shifted[0], card);
        }
        let po = SpaceExpr::pushout(SpaceExpr::Point, SpaceExpr::Point, SpaceExpr::em(3, 1));
        assert!(lambda_shift_check(&e, &po, 2, 4).is_err());
    }

    #[test]
    fn non_p_group_uses_slack() {
        let e = ev(7);
        let x = SpaceExpr::bg(FiniteGroup::symmetric(3));
        let seq = e.sequence(&x).unwrap();
        assert_eq!(seq.slack(2), 1);
        assert_eq!(seq.slack(3), 1);
        let card = e.cardinality(&x).unwrap();
        for l in [2, 3] {
            let r = mahler_extrapolate(&seq, l, 10, Some(card.clone())).unwrap();
            assert!(r.passed(), "l={l}");
        }
    }

    #[test]
    fn warns_when_l_does_not_divide_p_minus_one() {
        let e = ev(3);
        let seq = e.sequence(&SpaceExpr::em(3, 1)).unwrap();
        let cert = certify_continuity(&seq, 5, 4).unwrap();
        assert!(cert.warning.is_some());
    }

    #[test]
    fn json_shape() {
        let xs: Vec<Rational> = (0..3).map(|n| prime_pow(3, n)).collect();
        let v = extrapolate_prefix(&xs, 2, 1, 0, Some(rat(1, 3))).to_json();
        assert_eq!(v["l"], 2);
        assert_eq!(v["d"], 1);
        assert_eq!(v["verdict"], "pass");
        assert_eq!(v["partials"], serde_json::json!(["1/1", "-1/1", "3/1"]));
        assert_eq!(v["valuations"], serde_json::json!([1, 2, 3]));
    }
}
