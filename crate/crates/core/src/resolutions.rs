//! Cardinality sequences `x_n = |X_n|` of simplicial resolutions, the
//! Euler characteristics of their skeleta, and l-adic convergence of those
//! skeleta to the cardinality of the realization.
//!
//! `|sk^n X| = sum_(k<=n) (-1)^k xbar_k`, equivalently
//! `sum_(k<=n) (-1)^k C(n+1, k+1) x_k`; both forms are always computed and
//! compared.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::arith::{self, binomial, big, int, l_valuation, prime_pow, ratio_string, Rational, Valuation};
use crate::error::{Error, Result};
use crate::expoly::IntValuedPoly;
use crate::mahler::{divisibility_bound, Verdict};

type Cardinalities = Arc<dyn Fn(usize) -> Rational + Send + Sync>;

/// `n -> |X_n|` with the data of its l-adic continuation: the truncation
/// degree `d` of the bound `floor(n/d)`, the expected value `|X|` at `-1`,
/// the prime `p` of a p-power sequence, and a common denominator.
#[derive(Clone)]
pub struct SimplicialCardinalitySeq {
    pub label: String,
    x: Cardinalities,
    pub d: u32,
    pub target: Rational,
    pub p: Option<u64>,
    pub denominator: BigInt,
}

impl fmt::Debug for SimplicialCardinalitySeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SimplicialCardinalitySeq")
            .field("label", &self.label)
            .field("d", &self.d)
            .field("target", &arith::format_ratio(&self.target))
            .field("p", &self.p)
            .finish()
    }
}

impl SimplicialCardinalitySeq {
    pub fn new(
        label: impl Into<String>,
        x: impl Fn(usize) -> Rational + Send + Sync + 'static,
        d: u32,
        target: Rational,
        p: Option<u64>,
    ) -> Self {
        SimplicialCardinalitySeq {
            label: label.into(),
            x: Arc::new(x),
            d,
            target,
            p,
            denominator: BigInt::one(),
        }
    }

    pub fn with_denominator(mut self, denominator: BigInt) -> Self {
        self.denominator = denominator;
        self
    }

    pub fn x(&self, n: usize) -> Rational {
        (self.x)(n)
    }

    pub fn prefix(&self, len: usize) -> Vec<Rational> {
        (0..len).map(|n| self.x(n)).collect()
    }

    pub fn slack(&self, l: u64) -> i64 {
        l_valuation(&big(self.denominator.clone()), l)
            .finite()
            .unwrap_or(0)
    }
}

fn prime_of(g: u64) -> Option<u64> {
    arith::prime_power(g).map(|(p, _)| p)
}

/// Bar construction of a group of order `g`: `x_n = g^n`, limit `1/g`.
pub fn bar_sequence(g: u64) -> SimplicialCardinalitySeq {
    assert!(g >= 1, "group order must be positive");
    SimplicialCardinalitySeq::new(
        format!("bar({g})"),
        move |n| big(num_traits::pow(BigInt::from(g), n)),
        1,
        arith::rat(1, g as i64),
        prime_of(g),
    )
}

/// Cech nerve of a principal bundle `X -> Y` with group of order `g`:
/// `x_n = |X| g^n`, limit `|X|/g = |Y|`.
pub fn cech_sequence(card_x: Rational, g: u64) -> SimplicialCardinalitySeq {
    assert!(g >= 1, "group order must be positive");
    let denominator = card_x.denom().clone();
    let target = &card_x / int(g as i64);
    let label = format!("cech({}, {g})", arith::format_ratio(&card_x));
    SimplicialCardinalitySeq::new(
        label,
        move |n| &card_x * big(num_traits::pow(BigInt::from(g), n)),
        1,
        target,
        prime_of(g),
    )
    .with_denominator(denominator)
}

/// `d`-fold iterated bar construction: `x_n = g^(n^d)`, limit
/// `g^((-1)^d)`.
pub fn iterated_bar_sequence(g: u64, d: u32) -> SimplicialCardinalitySeq {
    assert!(g >= 1 && d >= 1, "need g >= 1 and d >= 1");
    let target = if d.is_multiple_of(2) {
        int(g as i64)
    } else {
        arith::rat(1, g as i64)
    };
    SimplicialCardinalitySeq::new(
        format!("iterbar({g}, {d})"),
        move |n| big(num_traits::pow(BigInt::from(g), n.pow(d))),
        d,
        target,
        prime_of(g),
    )
}

/// Bar and Wbar resolutions of `BG` for a simplicial p-group `G` given by the
/// orders of its Moore complex.
#[derive(Debug, Clone)]
pub struct SimplicialGroupResolution {
    pub p: Option<u64>,
    /// `log_p |G_n| = sum_k C(n, k) log_p |N_k G|`.
    pub f: IntValuedPoly,
    /// `|G| = p^f(-1) = prod_n |N_n G|^((-1)^n)`.
    pub group_cardinality: Rational,
    pub bar: SimplicialCardinalitySeq,
    pub wbar: SimplicialCardinalitySeq,
}

pub fn simplicial_group_sequences(moore_sizes: &[u64]) -> Result<SimplicialGroupResolution> {
    let mut p: Option<u64> = None;
    let mut logs = Vec::with_capacity(moore_sizes.len());
    for &size in moore_sizes {
        if size == 1 {
            logs.push(0);
            continue;
        }
        let (q, e) = arith::prime_power(size).ok_or(Error::NotPrimePower(size))?;
        match p {
            Some(p0) if p0 != q => return Err(Error::MixedPrimes(p0, q)),
            _ => p = Some(q),
        }
        logs.push(e as i64);
    }
    let f = IntValuedPoly::new(logs.clone());
    let base = p.unwrap_or(2);
    let group_cardinality = prime_pow(base, f.eval_i64(-1));
    let target = group_cardinality.recip();
    let d = f.degree().map_or(1, |k| k as u32 + 1);

    // n f(n)
    let bar_exp = f.mul_x();
    // sum_(j<n) f(j) = sum_k C(n, k+1) log_p |N_k|
    let mut shifted = vec![0];
    shifted.extend(&logs);
    let wbar_exp = IntValuedPoly::new(shifted);

    let label = format!("{moore_sizes:?}");
    let seq = |name: &str, e: IntValuedPoly| {
        SimplicialCardinalitySeq::new(
            format!("{name}{label}"),
            move |n| prime_pow(base, e.eval_i64(n as i64)),
            d,
            target.clone(),
            p,
        )
    };
    Ok(SimplicialGroupResolution {
        p,
        bar: seq("simpgroup-bar", bar_exp),
        wbar: seq("simpgroup-wbar", wbar_exp),
        f,
        group_cardinality,
    })
}

/// `sum_(k<=n) (-1)^k C(n+1, k+1) x_k` for every `n`.
pub fn skeleton_direct(xs: &[Rational]) -> Vec<Rational> {
    (0..xs.len())
        .map(|n| {
            xs[..=n]
                .iter()
                .enumerate()
                .map(|(k, x)| {
                    let c = big(binomial(n as i64 + 1, k as u64 + 1));
                    if k % 2 == 0 {
                        c * x
                    } else {
                        -c * x
                    }
                })
                .sum()
        })
        .collect()
}

/// `|sk^0|..|sk^N|` from the Mahler coefficients; fails if the direct
/// binomial form disagrees anywhere.
pub fn skeleton_cardinalities(xs: &[Rational]) -> Result<Vec<Rational>> {
    let xbar = arith::inverse_binomial_transform(xs);
    let alternating = crate::mahler::alternating_partial_sums(&xbar);
    let direct = skeleton_direct(xs);
    for (n, (a, b)) in alternating.iter().zip(&direct).enumerate() {
        if a != b {
            return Err(Error::SkeletonMismatch {
                n,
                alternating: arith::format_ratio(a),
                direct: arith::format_ratio(b),
            });
        }
    }
    Ok(alternating)
}

#[derive(Debug, Clone, Serialize)]
pub struct SkeletonRow {
    pub n: usize,
    #[serde(with = "ratio_string")]
    pub x: Rational,
    #[serde(with = "ratio_string")]
    pub xbar: Rational,
    #[serde(with = "ratio_string")]
    pub sk: Rational,
    /// `v_l(|sk^n| - |X|)`.
    pub valuation: Valuation,
    pub bound: i64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub label: String,
    pub l: u64,
    pub d: u32,
    pub slack: i64,
    pub burn_in: usize,
    #[serde(with = "ratio_string")]
    pub target: Rational,
    pub rows: Vec<SkeletonRow>,
    /// Valuations never decrease from `burn_in` on. Informational: a late
    /// Mahler coefficient can cancel part of the tail.
    pub monotone: bool,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

impl ConvergenceReport {
    pub fn passed(&self) -> bool {
        self.verdict.passed()
    }
}

/// Passes iff `v_l(|sk^n| - |X|) >= floor((n+1)/d) - slack` for all
/// `n <= N`. Monotonicity from `burn_in` (default `d`) on is recorded
/// separately.
pub fn resolution_convergence(
    seq: &SimplicialCardinalitySeq,
    l: u64,
    n_max: usize,
    burn_in: Option<usize>,
) -> Result<ConvergenceReport> {
    arith::ensure_prime(l)?;
    let xs = seq.prefix(n_max + 1);
    let xbar = arith::inverse_binomial_transform(&xs);
    let sk = skeleton_cardinalities(&xs)?;
    let slack = seq.slack(l);
    let burn_in = burn_in.unwrap_or(seq.d as usize);
    let rows: Vec<SkeletonRow> = (0..=n_max)
        .map(|n| SkeletonRow {
            n,
            x: xs[n].clone(),
            xbar: xbar[n].clone(),
            sk: sk[n].clone(),
            valuation: l_valuation(&(&sk[n] - &seq.target), l),
            bound: divisibility_bound(n + 1, seq.d, slack),
        })
        .collect();
    let monotone = rows
        .windows(2)
        .filter(|w| w[0].n >= burn_in)
        .all(|w| w[0].valuation <= w[1].valuation);
    let verdict = match rows.iter().find(|r| !r.valuation.is_at_least(r.bound)) {
        Some(r) => Verdict::Fail {
            first_violation: r.n,
        },
        None => Verdict::Pass,
    };
    let warning = seq.p.and_then(|p| {
        ((p - 1) % l != 0).then(|| format!("l = {l} does not divide p - 1 = {}", p - 1))
    });
    Ok(ConvergenceReport {
        label: seq.label.clone(),
        l,
        d: seq.d,
        slack,
        burn_in,
        target: seq.target.clone(),
        rows,
        monotone,
        verdict,
        warning,
    })
}

/// Constant simplicial point.
pub fn point_sequence() -> SimplicialCardinalitySeq {
    SimplicialCardinalitySeq::new("point", |_| int(1), 1, int(1), None)
}

/// `sum_(k<=n) (-1)^k (g-1)^k`: alternating count of non-degenerate
/// simplices of the bar construction.
pub fn bar_cell_count(g: u64, n: usize) -> Rational {
    let mut acc = Rational::zero();
    let mut term = int(1);
    for k in 0..=n {
        if k % 2 == 0 {
            acc += &term;
        } else {
            acc -= &term;
        }
        term *= int(g as i64 - 1);
    }
    acc
}
