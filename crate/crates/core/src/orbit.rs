//! Enumeration of orbits `x₀·Γ` inside Euclidean balls, ball counts and
//! power-law fits.
//!
//! The search is breadth-first over reduced words, deduplicated by point.
//! A node is expanded only while its norm stays inside `slack·T` and its word
//! length stays below the cap. Completeness of that envelope is not assumed:
//! it is checked against [`enumerate_words`] per presentation.
//!
//! Arithmetic runs in `i64`, then `i128`, and is redone in `BigInt` if either
//! overflows, so results never depend on the fast path.

use std::collections::HashSet;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{spin_lift, validate_generator, Mat2, Mat3, Triple};
use crate::scalar::{Int, Real};

/// Generators (inverses appended) and a base point.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupPresentation {
    generators: Vec<Mat3<BigInt>>,
    inverse_of: Vec<usize>,
    base_point: Triple<BigInt>,
    label: String,
}

impl GroupPresentation {
    /// Validates `generators` and appends their inverses. Generators equal to
    /// their own inverse, or whose inverse is already listed, are paired
    /// instead of duplicated.
    pub fn new(
        generators: Vec<Mat3<BigInt>>,
        base_point: Triple<BigInt>,
        label: impl Into<String>,
    ) -> Result<Self> {
        for g in &generators {
            validate_generator(g)?;
        }
        if base_point.is_zero() {
            return Err(Error::InvalidBasePoint("base point is zero".into()));
        }
        if base_point.q_form() != BigInt::from(0) {
            return Err(Error::InvalidBasePoint(format!("{base_point} is off the cone")));
        }
        if !base_point.is_primitive() {
            return Err(Error::InvalidBasePoint(format!("{base_point} is not primitive")));
        }
        let mut gens: Vec<Mat3<BigInt>> = Vec::new();
        for g in generators {
            if !gens.contains(&g) && g != Mat3::identity() {
                gens.push(g);
            }
        }
        let mut inverse_of = vec![usize::MAX; gens.len()];
        let n = gens.len();
        for i in 0..n {
            if inverse_of[i] != usize::MAX {
                continue;
            }
            let inv = gens[i].inverse_soq();
            match gens.iter().position(|g| *g == inv) {
                Some(j) => {
                    inverse_of[i] = j;
                    inverse_of[j] = i;
                }
                None => {
                    gens.push(inv);
                    inverse_of.push(i);
                    inverse_of[i] = gens.len() - 1;
                }
            }
        }
        Ok(Self { generators: gens, inverse_of, base_point, label: label.into() })
    }

    /// Spin-lifts `SL₂(Z)` generators first.
    pub fn from_sl2(
        generators: &[Mat2<BigInt>],
        base_point: Triple<BigInt>,
        label: impl Into<String>,
    ) -> Result<Self> {
        let lifted = generators.iter().map(spin_lift).collect::<Result<Vec<_>>>()?;
        Self::new(lifted, base_point, label)
    }

    pub fn trivial(base_point: Triple<BigInt>) -> Result<Self> {
        Self::new(Vec::new(), base_point, "trivial")
    }

    /// Generators including the appended inverses.
    pub fn generators(&self) -> &[Mat3<BigInt>] {
        &self.generators
    }

    pub fn inverse_index(&self, i: usize) -> usize {
        self.inverse_of[i]
    }

    pub fn base_point(&self) -> &Triple<BigInt> {
        &self.base_point
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

/// Pruning controls for [`enumerate_orbit`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnumParams {
    pub radius: f64,
    #[serde(default = "default_slack")]
    pub slack: f64,
    #[serde(default = "default_word_length")]
    pub max_word_length: usize,
    #[serde(default = "default_budget")]
    pub node_budget: usize,
}

fn default_slack() -> f64 {
    2.0
}
fn default_word_length() -> usize {
    64
}
fn default_budget() -> usize {
    50_000_000
}

impl EnumParams {
    pub fn new(radius: f64) -> Self {
        Self {
            radius,
            slack: default_slack(),
            max_word_length: default_word_length(),
            node_budget: default_budget(),
        }
    }

    pub fn with_slack(mut self, slack: f64) -> Self {
        self.slack = slack;
        self
    }

    pub fn with_max_word_length(mut self, len: usize) -> Self {
        self.max_word_length = len;
        self
    }

    pub fn with_node_budget(mut self, budget: usize) -> Self {
        self.node_budget = budget;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0) || !self.radius.is_finite() {
            return Err(Error::InvalidRange(format!("radius {} must be finite and > 0", self.radius)));
        }
        if !(self.slack >= 1.0) {
            return Err(Error::InvalidRange(format!("slack {} must be ≥ 1", self.slack)));
        }
        if self.max_word_length == 0 {
            return Err(Error::InvalidRange("max_word_length must be positive".into()));
        }
        Ok(())
    }

    fn envelope_sq(&self) -> f64 {
        let e = self.slack * self.radius;
        e * e
    }
}

enum Search<T> {
    Done(T),
    Overflow,
}

/// Runs `f` in `i64`, `i128`, then `BigInt` until it completes without
/// overflow.
fn with_promotion<T>(
    g: &GroupPresentation,
    f64_: impl Fn(&[Mat3<i64>], &Triple<i64>) -> Result<Search<T>>,
    f128: impl Fn(&[Mat3<i128>], &Triple<i128>) -> Result<Search<T>>,
    fbig: impl Fn(&[Mat3<BigInt>], &Triple<BigInt>) -> Result<Search<T>>,
) -> Result<T> {
    fn convert<I: Int>(g: &GroupPresentation) -> Option<(Vec<Mat3<I>>, Triple<I>)> {
        let gens = g.generators.iter().map(Mat3::try_from_big).collect::<Option<Vec<_>>>()?;
        Some((gens, Triple::try_from_big(&g.base_point)?))
    }
    if let Some((gens, base)) = convert::<i64>(g) {
        if let Search::Done(v) = f64_(&gens, &base)? {
            return Ok(v);
        }
        log::debug!("i64 overflow in {}, promoting", g.label);
    }
    if let Some((gens, base)) = convert::<i128>(g) {
        if let Search::Done(v) = f128(&gens, &base)? {
            return Ok(v);
        }
        log::debug!("i128 overflow in {}, promoting", g.label);
    }
    match fbig(&g.generators, &g.base_point)? {
        Search::Done(v) => Ok(v),
        Search::Overflow => unreachable!("BigInt arithmetic cannot overflow"),
    }
}

fn norm_sq_f64<I: Int>(t: &Triple<I>) -> Option<f64> {
    t.checked_norm_sq().and_then(|n| n.to_f64())
}

/// Breadth-first search inside the envelope. Returns every visited point
/// (norm ≤ slack·T) in canonical order.
fn bfs<I: Int>(
    gens: &[Mat3<I>],
    inverse_of: &[usize],
    base: &Triple<I>,
    p: &EnumParams,
) -> Result<Search<Vec<(Triple<I>, f64)>>> {
    let envelope = p.envelope_sq();
    let Some(base_norm) = norm_sq_f64(base) else { return Ok(Search::Overflow) };
    if base_norm > envelope {
        return Ok(Search::Done(Vec::new()));
    }
    let mut visited: HashSet<Triple<I>> = HashSet::new();
    visited.insert(base.clone());
    let mut out = vec![(base.clone(), base_norm)];
    let mut frontier: Vec<(Triple<I>, Option<usize>)> = vec![(base.clone(), None)];
    for _depth in 0..p.max_word_length {
        if frontier.is_empty() {
            break;
        }
        let children: Option<Vec<Vec<(Triple<I>, usize, f64)>>> = frontier
            .par_iter()
            .map(|(pt, last)| {
                let mut kids = Vec::with_capacity(gens.len());
                for (gi, g) in gens.iter().enumerate() {
                    if last.is_some_and(|l| inverse_of[l] == gi) {
                        continue;
                    }
                    let child = pt.checked_act(g)?;
                    let n = norm_sq_f64(&child)?;
                    if n <= envelope {
                        kids.push((child, gi, n));
                    }
                }
                Some(kids)
            })
            .collect();
        let Some(children) = children else { return Ok(Search::Overflow) };
        let mut level: Vec<(Triple<I>, usize, f64)> = children.into_iter().flatten().collect();
        level.par_sort_unstable_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
        level.dedup_by(|a, b| a.0 == b.0);
        frontier = Vec::with_capacity(level.len());
        for (pt, gi, n) in level {
            if visited.insert(pt.clone()) {
                out.push((pt.clone(), n));
                frontier.push((pt, Some(gi)));
            }
        }
        if visited.len() > p.node_budget {
            return Err(Error::BudgetExceeded { budget: p.node_budget });
        }
    }
    out.par_sort_unstable_by(|a, b| a.0.cmp(&b.0));
    Ok(Search::Done(out))
}

fn lift_points<I: Int>(v: Vec<(Triple<I>, f64)>) -> Vec<(Triple<BigInt>, f64)> {
    v.into_iter().map(|(t, n)| (t.to_big(), n)).collect()
}

fn envelope_points(g: &GroupPresentation, p: &EnumParams) -> Result<Vec<(Triple<BigInt>, f64)>> {
    p.validate()?;
    let inv = &g.inverse_of;
    let mut v: Vec<(Triple<BigInt>, f64)> = with_promotion(
        g,
        |gens, base| Ok(match bfs::<i64>(gens, inv, base, p)? {
            Search::Done(v) => Search::Done(lift_points(v)),
            Search::Overflow => Search::Overflow,
        }),
        |gens, base| Ok(match bfs::<i128>(gens, inv, base, p)? {
            Search::Done(v) => Search::Done(lift_points(v)),
            Search::Overflow => Search::Overflow,
        }),
        |gens, base| bfs::<BigInt>(gens, inv, base, p),
    )?;
    v.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(v)
}

/// All orbit points with `∥x∥ < T` reachable inside the pruning envelope,
/// canonically sorted.
pub fn enumerate_orbit(g: &GroupPresentation, p: &EnumParams) -> Result<Vec<Triple<BigInt>>> {
    let r2 = p.radius * p.radius;
    Ok(envelope_points(g, p)?
        .into_iter()
        .filter(|(_, n)| *n < r2)
        .map(|(t, _)| t)
        .collect())
}

/// Every point `x₀·w` for reduced words `w` of length ≤ `max_len`, without
/// any norm pruning or point deduplication during the search.
pub fn enumerate_words(
    g: &GroupPresentation,
    max_len: usize,
    node_budget: usize,
) -> Result<Vec<Triple<BigInt>>> {
    fn dfs<I: Int>(
        gens: &[Mat3<I>],
        inverse_of: &[usize],
        pt: &Triple<I>,
        last: Option<usize>,
        remaining: usize,
        nodes: &mut usize,
        budget: usize,
        out: &mut HashSet<Triple<I>>,
    ) -> Result<bool> {
        *nodes += 1;
        if *nodes > budget {
            return Err(Error::BudgetExceeded { budget });
        }
        out.insert(pt.clone());
        if remaining == 0 {
            return Ok(true);
        }
        for (gi, m) in gens.iter().enumerate() {
            if last.is_some_and(|l| inverse_of[l] == gi) {
                continue;
            }
            let Some(child) = pt.checked_act(m) else { return Ok(false) };
            if !dfs(gens, inverse_of, &child, Some(gi), remaining - 1, nodes, budget, out)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
    fn run<I: Int>(
        gens: &[Mat3<I>],
        inverse_of: &[usize],
        base: &Triple<I>,
        max_len: usize,
        budget: usize,
    ) -> Result<Search<Vec<Triple<BigInt>>>> {
        let mut out = HashSet::new();
        let mut nodes = 0;
        if !dfs(gens, inverse_of, base, None, max_len, &mut nodes, budget, &mut out)? {
            return Ok(Search::Overflow);
        }
        let mut v: Vec<Triple<BigInt>> = out.iter().map(Triple::to_big).collect();
        v.sort();
        Ok(Search::Done(v))
    }
    let inv = &g.inverse_of;
    with_promotion(
        g,
        |gens, base| run(gens, inv, base, max_len, node_budget),
        |gens, base| run(gens, inv, base, max_len, node_budget),
        |gens, base| run(gens, inv, base, max_len, node_budget),
    )
}

/// One `(T, N(T))` sample.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountEntry {
    #[serde(rename = "T")]
    pub t: f64,
    #[serde(rename = "N")]
    pub n: u64,
}

/// `N(T)` at strictly increasing radii.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CountSeries {
    pub entries: Vec<CountEntry>,
}

impl CountSeries {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (f64, u64)>) -> Self {
        Self { entries: pairs.into_iter().map(|(t, n)| CountEntry { t, n }).collect() }
    }

    pub fn is_monotone(&self) -> bool {
        self.entries.windows(2).all(|w| w[0].t < w[1].t && w[0].n <= w[1].n)
    }

    /// Entries with `lo ≤ T ≤ hi`.
    pub fn window(&self, lo: f64, hi: f64) -> Self {
        Self { entries: self.entries.iter().copied().filter(|e| e.t >= lo && e.t <= hi).collect() }
    }
}

/// `N(T)` for every radius in `radii`, from one search at the largest
/// radius. `params.radius` is ignored.
pub fn count_ball(g: &GroupPresentation, radii: &[f64], params: &EnumParams) -> Result<CountSeries> {
    if radii.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidRange("radii must be strictly increasing".into()));
    }
    let Some(&t_max) = radii.last() else { return Ok(CountSeries::default()) };
    let p = EnumParams { radius: t_max, ..params.clone() };
    let mut norms: Vec<f64> = envelope_points(g, &p)?.into_iter().map(|(_, n)| n).collect();
    norms.sort_by(|a, b| a.total_cmp(b));
    Ok(CountSeries::from_pairs(radii.iter().map(|&t| {
        let r2 = t * t;
        (t, norms.partition_point(|&n| n < r2) as u64)
    })))
}

/// Least-squares power law `N ≈ c·T^δ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit<R> {
    pub delta_hat: R,
    pub c_hat: R,
    pub r_squared: R,
}

/// Ordinary least squares of `log N` on `log T`, over entries with `N ≥ 1`.
pub fn fit_exponent<R: Real>(s: &CountSeries) -> Result<PowerLawFit<R>> {
    let pts: Vec<(R, R)> = s
        .entries
        .iter()
        .filter(|e| e.n >= 1)
        .map(|e| (R::lit(e.t).ln(), R::lit(e.n as f64).ln()))
        .collect();
    if pts.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "need ≥ 3 radii with N ≥ 1, have {}",
            pts.len()
        )));
    }
    let (slope, intercept, r2) = linear_fit(&pts);
    Ok(PowerLawFit { delta_hat: slope, c_hat: intercept.exp(), r_squared: r2 })
}

/// Slope, intercept and r² of an OLS line. A constant response fits
/// perfectly (r² = 1).
pub(crate) fn linear_fit<R: Real>(pts: &[(R, R)]) -> (R, R, R) {
    let n = R::lit(pts.len() as f64);
    let mx = pts.iter().fold(R::zero(), |a, p| a + p.0) / n;
    let my = pts.iter().fold(R::zero(), |a, p| a + p.1) / n;
    let sxx = pts.iter().fold(R::zero(), |a, p| a + (p.0 - mx) * (p.0 - mx));
    let sxy = pts.iter().fold(R::zero(), |a, p| a + (p.0 - mx) * (p.1 - my));
    let syy = pts.iter().fold(R::zero(), |a, p| a + (p.1 - my) * (p.1 - my));
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == R::zero() {
        R::one()
    } else {
        let ss_res = pts.iter().fold(R::zero(), |a, p| {
            let e = p.1 - (intercept + slope * p.0);
            a + e * e
        });
        (R::one() - ss_res / syy).max(R::zero())
    };
    (slope, intercept, r2)
}
