//! Orbits modulo `q`, exact local densities and the sieve dimension.
//!
//! Every density is an exact rational `|O^F(q)| / |O(q)|`. For `q` sharing
//! primes with the denominator of `F` the orbit is taken at the level
//! `q · ∏_{p|q} p^{v_p(den)}`, which is the smallest modulus that determines
//! `F mod q`.
//!
//! Orbits modulo an odd prime `p` do not fill the cone. The spin image of
//! `SL₂(F_p)` splits the `p² − 1` nonzero cone points into two spinor classes
//! of size `(p² − 1)/2`, and any `Γ` inside the spin image of `SL₂(Z)` stays
//! in the class of `x₀`; for `p ≡ 1 (mod 8)` this holds for every
//! `Γ ≤ SO_Q(Z)`. Strong approximation is therefore checked against the
//! spinor class of `x₀`, brute-forced from
//! the `(u, v)` plane by [`spin_class_mod_p`].

use std::collections::{BTreeMap, HashSet, VecDeque};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{factor_small, is_squarefree, minus_one_is_square, primes_up_to};
use crate::error::{Error, Result};
use crate::lattice::{SievePolynomial, Triple};
use crate::orbit::{linear_fit, GroupPresentation};
use crate::scalar::Real;

/// A residue vector modulo `modulus`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ResidueTriple {
    pub x: u64,
    pub y: u64,
    pub z: u64,
    pub modulus: u64,
}

impl ResidueTriple {
    pub fn new(v: [u64; 3], modulus: u64) -> Self {
        Self { x: v[0] % modulus, y: v[1] % modulus, z: v[2] % modulus, modulus }
    }

    pub fn of(t: &Triple<BigInt>, modulus: u64) -> Self {
        Self::new(t.residues(modulus), modulus)
    }

    /// Componentwise reduction to a divisor of the modulus.
    pub fn reduce(&self, m: u64) -> Self {
        debug_assert_eq!(self.modulus % m, 0);
        Self::new([self.x, self.y, self.z], m)
    }

    pub fn coords(&self) -> [u64; 3] {
        [self.x, self.y, self.z]
    }
}

/// The orbit of `x₀` modulo `level`, optionally split by `F ≡ 0 (mod q)`.
#[derive(Clone, Debug, PartialEq)]
pub struct OrbitModQ {
    /// Sieve modulus `q`.
    pub modulus: u64,
    /// Modulus the points live in; equals `modulus` unless `F` has a
    /// denominator sharing primes with `q`.
    pub level: u64,
    /// Sorted points.
    pub points: Vec<ResidueTriple>,
    /// Sorted points where `F ≡ 0 (mod q)`; empty without a polynomial.
    pub zero_subset: Vec<ResidueTriple>,
    pub polynomial: Option<SievePolynomial>,
}

impl OrbitModQ {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn density(&self) -> BigRational {
        BigRational::new(
            BigInt::from(self.zero_subset.len()),
            BigInt::from(self.points.len()),
        )
    }
}

/// Smallest modulus determining `F mod q`.
pub fn density_level(f: SievePolynomial, q: u64) -> u64 {
    let den = f.denominator() as u64;
    factor_small(q).iter().fold(q, |acc, &(p, _)| {
        let mut d = den;
        let mut acc = acc;
        while d % p == 0 {
            d /= p;
            acc *= p;
        }
        acc
    })
}

type Gens = Vec<[[u64; 3]; 3]>;

fn generators_mod(g: &GroupPresentation, level: u64) -> Result<Gens> {
    g.generators()
        .iter()
        .map(|m| {
            let det = m.det();
            let d = crate::scalar::Int::rem_u64(&det, level);
            if num_integer::gcd(d, level) != 1 {
                return Err(Error::NonInvertibleGenerator { q: level });
            }
            Ok(m.residues(level))
        })
        .collect()
}

fn apply(m: &[[u64; 3]; 3], v: [u64; 3], level: u64) -> [u64; 3] {
    let l = level as u128;
    std::array::from_fn(|i| {
        let s = m[i][0] as u128 * v[0] as u128
            + m[i][1] as u128 * v[1] as u128
            + m[i][2] as u128 * v[2] as u128;
        (s % l) as u64
    })
}

/// Breadth-first closure of `x₀ mod level`, stopping early when `stop`
/// returns true for a visited point.
fn closure(
    g: &GroupPresentation,
    level: u64,
    mut stop: impl FnMut(&[u64; 3]) -> bool,
) -> Result<(Vec<[u64; 3]>, bool)> {
    let gens = generators_mod(g, level)?;
    let start = g.base_point().residues(level);
    let mut seen: HashSet<[u64; 3]> = HashSet::new();
    seen.insert(start);
    let mut order = vec![start];
    if stop(&start) {
        return Ok((order, true));
    }
    let mut queue = VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        for m in &gens {
            let w = apply(m, v, level);
            if seen.insert(w) {
                order.push(w);
                if stop(&w) {
                    return Ok((order, true));
                }
                queue.push_back(w);
            }
        }
    }
    Ok((order, false))
}

fn to_residues(v: Vec<[u64; 3]>, level: u64) -> Vec<ResidueTriple> {
    let mut out: Vec<ResidueTriple> = v.into_iter().map(|p| ResidueTriple::new(p, level)).collect();
    out.sort();
    out
}

/// Orbit of `x₀` modulo `q`.
pub fn orbit_mod_q(g: &GroupPresentation, q: u64) -> Result<OrbitModQ> {
    if q < 2 {
        return Err(Error::InvalidRange(format!("modulus {q} must be ≥ 2")));
    }
    let (pts, _) = closure(g, q, |_| false)?;
    Ok(OrbitModQ {
        modulus: q,
        level: q,
        points: to_residues(pts, q),
        zero_subset: Vec::new(),
        polynomial: None,
    })
}

fn numerator_mod(f: SievePolynomial, v: &[u64; 3], level: u64) -> u64 {
    let l = level as u128;
    let (x, y, z) = (v[0] as u128, v[1] as u128, v[2] as u128);
    (match f {
        SievePolynomial::Hypotenuse => z % l,
        SievePolynomial::Area => x * y % l,
        SievePolynomial::Coordinates => x * y % l * z % l,
    }) as u64
}

/// Orbit at the density level of `(F, q)` with its zero subset.
pub fn orbit_with_polynomial(g: &GroupPresentation, f: SievePolynomial, q: u64) -> Result<OrbitModQ> {
    if q < 2 {
        return Err(Error::InvalidRange(format!("modulus {q} must be ≥ 2")));
    }
    let level = density_level(f, q);
    let (pts, _) = closure(g, level, |_| false)?;
    let zeros: Vec<[u64; 3]> =
        pts.iter().copied().filter(|v| numerator_mod(f, v, level) == 0).collect();
    Ok(OrbitModQ {
        modulus: q,
        level,
        points: to_residues(pts, level),
        zero_subset: to_residues(zeros, level),
        polynomial: Some(f),
    })
}

/// All nonzero `(x, y, z) ∈ F_p³` with `x² + y² = z²`, by brute force.
pub fn cone_points_mod_p(p: u64) -> Vec<ResidueTriple> {
    let mut out = Vec::new();
    for x in 0..p {
        for y in 0..p {
            for z in 0..p {
                if (x, y, z) != (0, 0, 0) && (x * x + y * y) % p == z * z % p {
                    out.push(ResidueTriple::new([x, y, z], p));
                }
            }
        }
    }
    out
}

/// The spinor class of `x₀` on the cone modulo an odd prime `p`: the scalar
/// multiples `λ·(u² − v², 2uv, u² + v²)` with `λ` in the square class that
/// contains `x₀`. Brute force over the `(u, v)` plane.
pub fn spin_class_mod_p(p: u64, x0: &Triple<BigInt>) -> Vec<ResidueTriple> {
    let mut image = HashSet::new();
    for u in 0..p {
        for v in 0..p {
            if (u, v) == (0, 0) {
                continue;
            }
            let uu = u * u % p;
            let vv = v * v % p;
            image.insert([(uu + p - vv) % p, 2 * u * v % p, (uu + vv) % p]);
        }
    }
    let base = x0.residues(p);
    let scale = if image.contains(&base) {
        1
    } else {
        (2..p).find(|&c| (1..p).all(|t| t * t % p != c)).expect("odd prime has a non-square")
    };
    let mut out: Vec<ResidueTriple> = image
        .into_iter()
        .map(|v| ResidueTriple::new(v.map(|e| e * scale % p), p))
        .collect();
    out.sort();
    out
}

fn checked_odd_prime(p: u64) -> Result<()> {
    if p < 3 || p % 2 == 0 || !crate::arith::is_prime_small(p) {
        return Err(Error::InvalidRange(format!("{p} is not an odd prime")));
    }
    Ok(())
}

/// `|{cone points with F ≡ 0}| / |cone|` over `F_p³`, for odd `p` not
/// dividing the denominator of `F`.
pub fn cone_oracle_density(f: SievePolynomial, p: u64) -> Result<BigRational> {
    checked_odd_prime(p)?;
    if f.denominator() as u64 % p == 0 {
        return Err(Error::InvalidRange(format!("{p} divides the denominator of {f}")));
    }
    let cone = cone_points_mod_p(p);
    let zeros = cone.iter().filter(|r| numerator_mod(f, &r.coords(), p) == 0).count();
    Ok(BigRational::new(BigInt::from(zeros), BigInt::from(cone.len())))
}

/// Density of `F ≡ 0 (mod p)` over `(u, v)` pairs modulo `p^{1+v_p(den)}`
/// that are nonzero modulo `p`, using the factored forms
/// `F_H = u² + v²`, `F_A = (u+v)(u−v)uv/6`, `F_C = (u+v)(u−v)uv(u²+v²)/30`.
/// Valid for every odd prime, including those dividing the denominator.
pub fn uv_oracle_density(f: SievePolynomial, p: u64) -> Result<BigRational> {
    checked_odd_prime(p)?;
    // Denominators after pulling 2uv's factor 2 out: 1, 6, 30.
    let uv_den: u64 = match f {
        SievePolynomial::Hypotenuse => 1,
        SievePolynomial::Area => 6,
        SievePolynomial::Coordinates => 30,
    };
    let mut m = p;
    let mut d = uv_den;
    while d % p == 0 {
        d /= p;
        m *= p;
    }
    let (mut total, mut zeros) = (0u64, 0u64);
    for u in 0..m {
        for v in 0..m {
            if u % p == 0 && v % p == 0 {
                continue;
            }
            total += 1;
            let (a, b) = (u as u128, v as u128);
            let mm = m as u128;
            let sum_sq = (a * a + b * b) % mm;
            let quartic = (a + b) % mm * ((a + mm - b) % mm) % mm * a % mm * b % mm;
            let val = match f {
                SievePolynomial::Hypotenuse => sum_sq,
                SievePolynomial::Area => quartic,
                SievePolynomial::Coordinates => quartic * sum_sq % mm,
            };
            if val == 0 {
                zeros += 1;
            }
        }
    }
    Ok(BigRational::new(BigInt::from(zeros), BigInt::from(total)))
}

/// Closed forms for odd `p` not dividing the denominator (oracle-certified
/// by the test-suite): `F_H`: `2/(p+1)` if `p ≡ 1 (4)`, else 0; `F_A`:
/// `4/(p+1)`; `F_C`: `6/(p+1)` if `p ≡ 1 (4)`, else `4/(p+1)`.
pub fn closed_form_density(f: SievePolynomial, p: u64) -> Option<BigRational> {
    if p < 3 || p % 2 == 0 || f.denominator() as u64 % p == 0 {
        return None;
    }
    let split = minus_one_is_square(p);
    let num = match f {
        SievePolynomial::Hypotenuse => {
            if split {
                2
            } else {
                0
            }
        }
        SievePolynomial::Area => 4,
        SievePolynomial::Coordinates => {
            if split {
                6
            } else {
                4
            }
        }
    };
    Some(BigRational::new(BigInt::from(num), BigInt::from(p + 1)))
}

/// `g^F(q)` for square-free `q`.
pub fn local_density(g: &GroupPresentation, f: SievePolynomial, q: u64) -> Result<BigRational> {
    if q == 1 {
        return Ok(BigRational::one());
    }
    if !is_squarefree(q) {
        return Err(Error::InvalidRange(format!("{q} is not square-free")));
    }
    Ok(orbit_with_polynomial(g, f, q)?.density())
}

/// Exact check of `g(q₁q₂) = g(q₁)·g(q₂)`.
pub fn verify_multiplicativity(
    g: &GroupPresentation,
    f: SievePolynomial,
    q1: u64,
    q2: u64,
) -> Result<bool> {
    if num_integer::gcd(q1, q2) != 1 {
        return Err(Error::InvalidRange(format!("{q1} and {q2} are not coprime")));
    }
    let lhs = local_density(g, f, q1 * q2)?;
    let rhs = local_density(g, f, q1)? * local_density(g, f, q2)?;
    Ok(lhs == rhs)
}

/// Per-prime outcome of the strong-approximation check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrimeCheck {
    pub p: u64,
    pub orbit_size: usize,
    pub cone_size: usize,
    pub spin_class_size: usize,
    /// Orbit equals the spinor class of `x₀`.
    pub fills_spin_class: bool,
    /// Orbit equals every nonzero cone point.
    pub fills_cone: bool,
}

/// Odd primes up to `p_max` where the orbit modulo `p` is smaller than
/// strong approximation predicts. `p = 2` is always listed separately.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RamificationReport {
    pub p_max: u64,
    pub ramified: Vec<u64>,
    pub two_orbit_size: Option<usize>,
    pub checks: Vec<PrimeCheck>,
}

impl RamificationReport {
    pub fn is_ramified(&self, p: u64) -> bool {
        p == 2 || self.ramified.contains(&p)
    }
}

pub fn detect_ramified_primes(g: &GroupPresentation, p_max: u64) -> Result<RamificationReport> {
    if p_max < 2 {
        return Err(Error::InvalidRange(format!("p_max {p_max} must be ≥ 2")));
    }
    let mut checks = Vec::new();
    let mut ramified = Vec::new();
    for p in primes_up_to(p_max).into_iter().filter(|&p| p > 2) {
        let orbit = orbit_mod_q(g, p)?;
        let class = spin_class_mod_p(p, g.base_point());
        let cone = cone_points_mod_p(p);
        let check = PrimeCheck {
            p,
            orbit_size: orbit.len(),
            cone_size: cone.len(),
            spin_class_size: class.len(),
            fills_spin_class: orbit.points == class,
            fills_cone: orbit.points == cone,
        };
        if !check.fills_spin_class {
            ramified.push(p);
        }
        checks.push(check);
    }
    Ok(RamificationReport {
        p_max,
        ramified,
        two_orbit_size: Some(orbit_mod_q(g, 2)?.len()),
        checks,
    })
}

/// First `q ∈ [2, q_max]` for which every orbit point has `F ≡ 0 (mod q)`,
/// or `None` when the pair is strongly primitive up to `q_max`.
pub fn check_strong_primitivity(
    g: &GroupPresentation,
    f: SievePolynomial,
    q_max: u64,
) -> Result<Option<u64>> {
    if q_max < 2 {
        return Err(Error::InvalidRange(format!("q_max {q_max} must be ≥ 2")));
    }
    for q in 2..=q_max {
        let level = density_level(f, q);
        let (_, found) = closure(g, level, |v| numerator_mod(f, v, level) != 0)?;
        if !found {
            return Ok(Some(q));
        }
    }
    Ok(None)
}

/// Where a table entry came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Bfs,
    ConeFormula,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityEntry {
    pub value: BigRational,
    pub provenance: Provenance,
}

/// `g(p)` for every prime below a bound.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalDensityTable {
    pub polynomial: SievePolynomial,
    pub entries: BTreeMap<u64, DensityEntry>,
    pub ramified: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct JsonEntry {
    p: u64,
    num: i64,
    den: i64,
    provenance: Provenance,
}

#[derive(Serialize, Deserialize)]
struct JsonTable {
    polynomial: SievePolynomial,
    entries: Vec<JsonEntry>,
    ramified: Vec<u64>,
}

impl LocalDensityTable {
    /// BFS densities for primes `≤ bfs_max` (ramification checked there),
    /// closed forms for the remaining primes below `p_limit`.
    pub fn build(
        g: &GroupPresentation,
        f: SievePolynomial,
        bfs_max: u64,
        p_limit: u64,
    ) -> Result<Self> {
        let report = detect_ramified_primes(g, bfs_max.max(2))?;
        let mut entries = BTreeMap::new();
        for p in primes_up_to(p_limit.saturating_sub(1)) {
            let entry = if p <= bfs_max || closed_form_density(f, p).is_none() {
                DensityEntry { value: local_density(g, f, p)?, provenance: Provenance::Bfs }
            } else {
                DensityEntry {
                    value: closed_form_density(f, p).expect("checked above"),
                    provenance: Provenance::ConeFormula,
                }
            };
            entries.insert(p, entry);
        }
        let mut ramified = vec![2];
        ramified.extend(report.ramified);
        Ok(Self { polynomial: f, entries, ramified })
    }

    /// Closed forms only; primes with no closed form are omitted.
    pub fn closed_form(f: SievePolynomial, p_limit: u64) -> Self {
        let entries = primes_up_to(p_limit.saturating_sub(1))
            .into_iter()
            .filter_map(|p| {
                closed_form_density(f, p)
                    .map(|value| (p, DensityEntry { value, provenance: Provenance::ConeFormula }))
            })
            .collect();
        Self { polynomial: f, entries, ramified: Vec::new() }
    }

    pub fn to_json(&self) -> Result<String> {
        let entries = self
            .entries
            .iter()
            .map(|(&p, e)| {
                Ok(JsonEntry {
                    p,
                    num: e.value.numer().to_i64().ok_or(Error::Overflow)?,
                    den: e.value.denom().to_i64().ok_or(Error::Overflow)?,
                    provenance: e.provenance,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let doc = JsonTable { polynomial: self.polynomial, entries, ramified: self.ramified.clone() };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: JsonTable = serde_json::from_str(s)?;
        let entries = doc
            .entries
            .into_iter()
            .map(|e| {
                (
                    e.p,
                    DensityEntry {
                        value: BigRational::new(BigInt::from(e.num), BigInt::from(e.den)),
                        provenance: e.provenance,
                    },
                )
            })
            .collect();
        Ok(Self { polynomial: doc.polynomial, entries, ramified: doc.ramified })
    }
}

/// Slope of `log ∏_{p<z} (1 − g(p))⁻¹` against `log log z`, least squares
/// over 40 log-spaced `z` in `[√z_max, z_max]`.
pub fn sieve_dimension_fit<R: Real>(densities: &LocalDensityTable, z_max: u64) -> Result<R> {
    if z_max < 100 {
        return Err(Error::InsufficientData(format!("z_max {z_max} is below 100")));
    }
    let primes = primes_up_to(z_max - 1);
    let mut partial = Vec::with_capacity(primes.len());
    let mut acc = R::zero();
    for &p in &primes {
        let g = densities
            .entries
            .get(&p)
            .ok_or_else(|| Error::InsufficientData(format!("no density for p = {p}")))?;
        if g.value >= BigRational::one() || g.value < BigRational::zero() {
            return Err(Error::Domain(format!("g({p}) = {} is outside [0, 1)", g.value)));
        }
        let gv = R::lit(g.value.to_f64().expect("finite"));
        acc = acc - (R::one() - gv).ln();
        partial.push(acc);
    }
    let lo = (z_max as f64).sqrt().ln();
    let hi = (z_max as f64).ln();
    let n = 40;
    let pts: Vec<(R, R)> = (0..n)
        .map(|k| {
            let z = (lo + (hi - lo) * k as f64 / (n - 1) as f64).exp();
            let idx = primes.partition_point(|&p| (p as f64) < z);
            let y = if idx == 0 { R::zero() } else { partial[idx - 1] };
            (R::lit(z.ln().ln()), y)
        })
        .collect();
    Ok(linear_fit(&pts).0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn trivial() -> GroupPresentation {
        GroupPresentation::trivial(presets::base_345()).unwrap()
    }

    #[test]
    fn cone_counts() {
        assert_eq!(cone_points_mod_p(3).len(), 8);
        assert_eq!(cone_points_mod_p(5).len(), 24);
        for p in [3u64, 5, 7, 11, 13] {
            assert_eq!(cone_points_mod_p(p).len() as u64, p * p - 1);
            assert_eq!(spin_class_mod_p(p, &presets::base_345()).len() as u64, (p * p - 1) / 2);
        }
    }

    #[test]
    fn orbit_mod_two_and_trivial() {
        let full = presets::full_orbit().presentation;
        let o = orbit_mod_q(&full, 2).unwrap();
        assert!(o.points.contains(&ResidueTriple::new([1, 0, 1], 2)));
        let t = orbit_mod_q(&trivial(), 7).unwrap();
        assert_eq!(t.points, vec![ResidueTriple::new([3, 4, 5], 7)]);
        assert!(orbit_mod_q(&full, 1).is_err());
    }

    #[test]
    fn full_orbit_is_half_the_cone() {
        let full = presets::full_orbit().presentation;
        for p in [3u64, 5, 7, 13, 17] {
            let o = orbit_mod_q(&full, p).unwrap();
            assert_eq!(o.len() as u64, (p * p - 1) / 2, "p = {p}");
            assert_eq!(o.points, spin_class_mod_p(p, full.base_point()));
        }
    }

    #[test]
    fn density_examples() {
        let full = presets::full_orbit().presentation;
        use SievePolynomial::*;
        for p in [3u64, 7, 11, 19] {
            assert!(local_density(&full, Hypotenuse, p).unwrap().is_zero());
        }
        assert_eq!(local_density(&full, Hypotenuse, 13).unwrap(), rat(1, 7));
        assert_eq!(local_density(&full, Coordinates, 13).unwrap(), rat(3, 7));
        assert_eq!(cone_oracle_density(Hypotenuse, 13).unwrap(), rat(24, 168));
        assert_eq!(cone_oracle_density(Coordinates, 13).unwrap(), rat(72, 168));
        assert_eq!(local_density(&full, Area, 1).unwrap(), BigRational::one());
        assert!(local_density(&full, Area, 12).is_err());
    }

    #[test]
    fn level_accounts_for_denominator() {
        use SievePolynomial::*;
        assert_eq!(density_level(Hypotenuse, 15), 15);
        assert_eq!(density_level(Area, 3), 9);
        assert_eq!(density_level(Area, 2), 8);
        assert_eq!(density_level(Coordinates, 5), 25);
        assert_eq!(density_level(Coordinates, 7), 7);
        let full = presets::full_orbit().presentation;
        // xy/12 mod 3 is not decided by xy mod 3: every point has 3 | xy.
        let g3 = local_density(&full, Area, 3).unwrap();
        assert!(g3 < BigRational::one());
        assert_eq!(g3, uv_oracle_density(Area, 3).unwrap());
    }

    #[test]
    fn multiplicativity_examples() {
        let full = presets::full_orbit().presentation;
        assert!(verify_multiplicativity(&full, SievePolynomial::Area, 13, 17).unwrap());
        assert!(verify_multiplicativity(&full, SievePolynomial::Hypotenuse, 13, 29).unwrap());
        assert!(verify_multiplicativity(&full, SievePolynomial::Coordinates, 7, 1).unwrap());
        assert!(verify_multiplicativity(&full, SievePolynomial::Area, 3, 9).is_err());
    }

    #[test]
    fn crt_projection() {
        let full = presets::full_orbit().presentation;
        let (q1, q2) = (5u64, 7u64);
        let joint = orbit_mod_q(&full, q1 * q2).unwrap();
        let o1 = orbit_mod_q(&full, q1).unwrap();
        let o2 = orbit_mod_q(&full, q2).unwrap();
        assert_eq!(joint.len(), o1.len() * o2.len());
        let mut proj1: Vec<_> = joint.points.iter().map(|r| r.reduce(q1)).collect();
        proj1.sort();
        proj1.dedup();
        assert_eq!(proj1, o1.points);
        let pairs: HashSet<_> = joint.points.iter().map(|r| (r.reduce(q1), r.reduce(q2))).collect();
        assert_eq!(pairs.len(), joint.len());
    }

    #[test]
    fn ramification_examples() {
        let full = presets::full_orbit().presentation;
        let r = detect_ramified_primes(&full, 50).unwrap();
        assert!(r.ramified.is_empty(), "{:?}", r.ramified);
        assert!(r.checks.iter().all(|c| !c.fills_cone));
        assert!(r.is_ramified(2));
        let t = detect_ramified_primes(&trivial(), 30).unwrap();
        assert_eq!(t.ramified, vec![3, 5, 7, 11, 13, 17, 19, 23, 29]);
        let short = detect_ramified_primes(&trivial(), 12).unwrap();
        assert!(t.ramified.starts_with(&short.ramified));
    }

    #[test]
    fn strong_primitivity_examples() {
        let full = presets::full_orbit().presentation;
        let schottky = presets::schottky_demo().presentation;
        for g in [&full, &schottky, &trivial()] {
            assert_eq!(check_strong_primitivity(g, SievePolynomial::Area, 1000).unwrap(), None);
            assert_eq!(check_strong_primitivity(g, SievePolynomial::Coordinates, 1000).unwrap(), None);
        }
        assert_eq!(check_strong_primitivity(&trivial(), SievePolynomial::Hypotenuse, 100).unwrap(), Some(5));
        assert_eq!(check_strong_primitivity(&full, SievePolynomial::Hypotenuse, 200).unwrap(), None);
    }

    #[test]
    fn json_round_trip() {
        let full = presets::full_orbit().presentation;
        let t = LocalDensityTable::build(&full, SievePolynomial::Coordinates, 13, 60).unwrap();
        assert_eq!(t.entries[&13].provenance, Provenance::Bfs);
        assert_eq!(t.entries[&17].provenance, Provenance::ConeFormula);
        let json = t.to_json().unwrap();
        assert!(json.contains("\"cone-formula\""));
        assert_eq!(LocalDensityTable::from_json(&json).unwrap(), t);
    }

    #[test]
    fn fit_rejects_bad_tables() {
        let mut t = LocalDensityTable::closed_form(SievePolynomial::Hypotenuse, 1000);
        assert!(matches!(sieve_dimension_fit::<f64>(&t, 1000), Err(Error::InsufficientData(_))));
        t.entries.insert(2, DensityEntry { value: BigRational::one(), provenance: Provenance::Bfs });
        t.entries.insert(3, DensityEntry { value: BigRational::zero(), provenance: Provenance::Bfs });
        t.entries.insert(5, DensityEntry { value: rat(1, 3), provenance: Provenance::Bfs });
        assert!(matches!(sieve_dimension_fit::<f64>(&t, 1000), Err(Error::Domain(_))));
    }
}
