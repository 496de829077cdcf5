//! Prime-factor census of `F` over orbit points.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;
use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::primes_up_to;
use crate::error::{Error, Result};
use crate::lattice::{eval_f, SievePolynomial, Triple};
use crate::scalar::Real;

const TRIAL_LIMIT: u64 = 1_000_000;

/// Miller–Rabin with the first thirteen prime bases is exact below this.
const MR_CERTIFIED_BELOW: f64 = 3.317_044_064_679_887_4e24;
const MR_BASES: [u64; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

fn small_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| primes_up_to(TRIAL_LIMIT))
}

/// `n = sign · ∏ pᵉ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub n: BigInt,
    pub sign: i8,
    /// Ascending primes with exponents.
    pub factors: Vec<(BigInt, u32)>,
    /// Every prime was proven prime (false only past the deterministic
    /// Miller–Rabin range).
    pub certified: bool,
}

impl Factorization {
    /// `Ω(n)`, prime factors counted with multiplicity.
    pub fn omega(&self) -> u32 {
        self.factors.iter().map(|(_, e)| e).sum()
    }

    /// `ν(n)`, distinct prime factors.
    pub fn nu(&self) -> usize {
        self.factors.len()
    }

    pub fn product(&self) -> BigInt {
        let abs = self
            .factors
            .iter()
            .fold(BigInt::one(), |acc, (p, e)| acc * p.pow(*e));
        if self.sign < 0 {
            -abs
        } else {
            abs
        }
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic for every `u64`.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_BASES[..12] {
        if n % p == 0 {
            return n == p;
        }
    }
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'bases: for &a in &MR_BASES[..12] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// Miller–Rabin over the fixed bases; `(probably_prime, certified)`.
pub fn is_prime_big(n: &BigUint) -> (bool, bool) {
    if let Some(small) = n.to_u64() {
        return (is_prime_u64(small), true);
    }
    let one = BigUint::one();
    let n1 = n - &one;
    let s = n1.trailing_zeros().unwrap_or(0);
    let d = &n1 >> s;
    'bases: for &a in &MR_BASES {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x == one || x == n1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n1 {
                continue 'bases;
            }
        }
        return (false, true);
    }
    (true, n.to_f64().is_some_and(|f| f < MR_CERTIFIED_BELOW))
}

/// A non-trivial factor of an odd composite `n` (Brent's variant).
fn rho_u64(n: u64) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    for c in 1.. {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut g) = (2u64, 2u64, 1u64);
        let mut q = 1u64;
        let mut r = 1u64;
        let mut ys = y;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..(128.min(r - k)) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = q.gcd(&n);
                k += 128;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = x.abs_diff(ys).gcd(&n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
    }
    unreachable!()
}

fn rho_big(n: &BigUint) -> BigUint {
    if n.is_even() {
        return BigUint::from(2u8);
    }
    let mut c = BigUint::one();
    loop {
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut y = BigUint::from(2u8);
        let (mut x, mut ys) = (y.clone(), y.clone());
        let mut g = BigUint::one();
        let mut q = BigUint::one();
        let mut r = 1u64;
        while g.is_one() {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g.is_one() {
                ys = y.clone();
                for _ in 0..128.min(r - k) {
                    y = f(&y);
                    let diff = if x > y { &x - &y } else { &y - &x };
                    q = (q * diff) % n;
                }
                g = q.gcd(n);
                k += 128;
            }
            r *= 2;
        }
        if &g == n {
            loop {
                ys = f(&ys);
                let diff = if x > ys { &x - &ys } else { &ys - &x };
                g = diff.gcd(n);
                if !g.is_one() {
                    break;
                }
            }
        }
        if &g != n {
            return g;
        }
        c += 1u8;
    }
}

/// `(r, k)` with `r^k = n` and `k ≥ 2` maximal, if `n` is a perfect power.
fn perfect_power(n: &BigUint) -> Option<(BigUint, u32)> {
    let bits = n.bits() as u32;
    (2..=bits).rev().find_map(|k| {
        let r = n.nth_root(k);
        (r > BigUint::one() && r.pow(k) == *n).then_some((r, k))
    })
}

fn split_u64(n: u64, out: &mut Vec<BigUint>) {
    if n == 1 {
        return;
    }
    if is_prime_u64(n) {
        out.push(BigUint::from(n));
        return;
    }
    let d = rho_u64(n);
    split_u64(d, out);
    split_u64(n / d, out);
}

fn split_big(n: BigUint, out: &mut Vec<BigUint>, certified: &mut bool) {
    if n.is_one() {
        return;
    }
    if let Some(small) = n.to_u64() {
        split_u64(small, out);
        return;
    }
    let (prime, cert) = is_prime_big(&n);
    if prime {
        *certified &= cert;
        out.push(n);
        return;
    }
    if let Some((r, k)) = perfect_power(&n) {
        let mut root = Vec::new();
        split_big(r, &mut root, certified);
        for _ in 0..k {
            out.extend(root.iter().cloned());
        }
        return;
    }
    let d = rho_big(&n);
    let rest = &n / &d;
    split_big(d, out, certified);
    split_big(rest, out, certified);
}

/// Full factorisation: trial division to `10⁶`, then Pollard rho with
/// Miller–Rabin certification of the cofactors.
pub fn big_omega(n: &BigInt) -> Result<Factorization> {
    if n.is_zero() {
        return Err(Error::ZeroInput);
    }
    let sign = if n.sign() == Sign::Minus { -1 } else { 1 };
    let mut m = n.magnitude().clone();
    let mut primes: Vec<BigUint> = Vec::new();
    for &p in small_primes() {
        if let Some(small) = m.to_u64() {
            if p.saturating_mul(p) > small {
                break;
            }
            if small % p == 0 {
                let mut s = small;
                while s % p == 0 {
                    s /= p;
                    primes.push(BigUint::from(p));
                }
                m = BigUint::from(s);
            }
            continue;
        }
        if m.is_one() {
            break;
        }
        let pb = BigUint::from(p);
        while (&m % &pb).is_zero() {
            m /= &pb;
            primes.push(pb.clone());
        }
    }
    let mut certified = true;
    split_big(m, &mut primes, &mut certified);
    primes.sort();
    let mut factors: Vec<(BigInt, u32)> = Vec::new();
    for p in primes {
        let p = BigInt::from(p);
        match factors.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => factors.push((p, 1)),
        }
    }
    Ok(Factorization { n: n.clone(), sign, factors, certified })
}

/// One factored orbit point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CensusRecord {
    pub triple: Triple<BigInt>,
    pub polynomial: SievePolynomial,
    pub value: BigInt,
    /// `None` when `F(x) = 0`.
    pub omega: Option<u32>,
    /// Membership in `P(R)` for each requested `R`, in request order.
    pub in_pr: Vec<bool>,
}

impl CensusRecord {
    pub fn norm(&self) -> f64 {
        let t = &self.triple;
        let n2 = &t.x * &t.x + &t.y * &t.y + &t.z * &t.z;
        n2.to_f64().unwrap_or(f64::INFINITY).sqrt()
    }
}

/// Counts at one radius for one `R`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CensusSummary {
    pub radius: f64,
    #[serde(rename = "R")]
    pub r: u32,
    /// `Ω → count`, zeros excluded.
    pub histogram: BTreeMap<u32, u64>,
    pub in_pr: u64,
    pub total: u64,
    pub zero_flagged: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Census {
    pub polynomial: SievePolynomial,
    pub r_list: Vec<u32>,
    pub records: Vec<CensusRecord>,
}

impl Census {
    /// Summary for every record with `∥x∥ < radius`, one per `R`.
    pub fn summaries(&self, radius: f64) -> Vec<CensusSummary> {
        let inside: Vec<&CensusRecord> = self.records.iter().filter(|r| r.norm() < radius).collect();
        let mut histogram = BTreeMap::new();
        let mut zero_flagged = 0;
        for rec in &inside {
            match rec.omega {
                Some(w) => *histogram.entry(w).or_insert(0) += 1,
                None => zero_flagged += 1,
            }
        }
        self.r_list
            .iter()
            .enumerate()
            .map(|(k, &r)| CensusSummary {
                radius,
                r,
                histogram: histogram.clone(),
                in_pr: inside.iter().filter(|rec| rec.in_pr[k]).count() as u64,
                total: inside.len() as u64,
                zero_flagged,
            })
            .collect()
    }
}

/// Factors `F` at every point, in parallel, keeping the input order.
pub fn census(points: &[Triple<BigInt>], f: SievePolynomial, r_list: &[u32]) -> Result<Census> {
    let records = points
        .par_iter()
        .map(|t| {
            let value = eval_f(f, t)?;
            let omega = if value.is_zero() { None } else { Some(big_omega(&value)?.omega()) };
            let in_pr = r_list.iter().map(|&r| omega.is_some_and(|w| w <= r)).collect();
            Ok(CensusRecord { triple: t.clone(), polynomial: f, value, omega, in_pr })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Census { polynomial: f, r_list: r_list.to_vec(), records })
}

/// `(T, N_R(T) / (T^δ / (log T)^κ))` per summary.
pub fn density_curve<R: Real>(summaries: &[CensusSummary], delta_hat: R, kappa: R) -> Result<Vec<(R, R)>> {
    if summaries.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "need at least 3 radii, got {}",
            summaries.len()
        )));
    }
    summaries
        .iter()
        .map(|s| {
            let t = R::lit(s.radius);
            if !(t > R::one()) {
                return Err(Error::InvalidRange(format!("radius {} must exceed 1", s.radius)));
            }
            let scale = t.powf(delta_hat) / t.ln().powf(kappa);
            Ok((t, R::lit(s.in_pr as f64) / scale))
        })
        .collect()
}

/// Colour class of one record in the exported figure data.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    Le4,
    Eq5,
    Ge6,
    Prime,
    Composite,
    Zero,
}

impl Category {
    pub fn of(rec: &CensusRecord) -> Self {
        match (rec.polynomial, rec.omega) {
            (_, None) => Self::Zero,
            (SievePolynomial::Hypotenuse, Some(1)) => Self::Prime,
            (SievePolynomial::Hypotenuse, Some(_)) => Self::Composite,
            (_, Some(w)) if w <= 4 => Self::Le4,
            (_, Some(5)) => Self::Eq5,
            (_, Some(_)) => Self::Ge6,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Le4 => "le4",
            Self::Eq5 => "eq5",
            Self::Ge6 => "ge6",
            Self::Prime => "prime",
            Self::Composite => "composite",
            Self::Zero => "zero",
        }
    }

    fn colour(self) -> &'static str {
        match self {
            Self::Le4 | Self::Prime => "#c0392b",
            Self::Eq5 => "#2e86c1",
            Self::Ge6 | Self::Composite => "#aab7b8",
            Self::Zero => "#000000",
        }
    }
}

pub const CSV_SCHEMA: &str = "# thinsieve census v1: x,y,z,omega,category";

/// CSV of `x, y, z, omega, category`, preceded by a schema comment line.
/// `omega` is empty where `F = 0`.
pub fn export_figure(records: &[CensusRecord], path: &Path) -> Result<()> {
    let mut file = std::fs::File::create(path)?;
    writeln!(file, "{CSV_SCHEMA}")?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(["x", "y", "z", "omega", "category"])?;
    for rec in records {
        let t = &rec.triple;
        w.write_record([
            t.x.to_string(),
            t.y.to_string(),
            t.z.to_string(),
            rec.omega.map(|o| o.to_string()).unwrap_or_default(),
            Category::of(rec).as_str().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Rows of a file written by [`export_figure`].
pub fn read_figure(path: &Path) -> Result<Vec<(Triple<BigInt>, Option<u32>, String)>> {
    let text = std::fs::read_to_string(path)?;
    let body = text.strip_prefix(CSV_SCHEMA).ok_or_else(|| Error::Io("missing schema line".into()))?;
    let mut r = csv::Reader::from_reader(body.trim_start().as_bytes());
    let parse = |s: &str| s.parse::<BigInt>().map_err(|e| Error::Io(e.to_string()));
    r.records()
        .map(|row| {
            let row = row?;
            let t = Triple::new(parse(&row[0])?, parse(&row[1])?, parse(&row[2])?);
            let omega = if row[3].is_empty() {
                None
            } else {
                Some(row[3].parse().map_err(|_| Error::Io(format!("bad omega {:?}", &row[3])))?)
            };
            Ok((t, omega, row[4].to_string()))
        })
        .collect()
}

/// Scatter of `(x/z, y/z)` on the unit disc, one mark per record.
pub fn export_svg(records: &[CensusRecord], path: &Path) -> Result<()> {
    let size = 800.0;
    let half = size / 2.0;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#
    );
    let _ = writeln!(s, r#"<circle cx="{half}" cy="{half}" r="{half}" fill="none" stroke="black"/>"#);
    let plot = |c: Category| c != Category::Ge6 && c != Category::Composite;
    for pass in [false, true] {
        for rec in records {
            let cat = Category::of(rec);
            if plot(cat) != pass {
                continue;
            }
            let t = &rec.triple;
            let z = t.z.to_f64().unwrap_or(f64::INFINITY);
            let px = half + half * t.x.to_f64().unwrap_or(0.0) / z;
            let py = half - half * t.y.to_f64().unwrap_or(0.0) / z;
            let _ = writeln!(s, r#"<circle cx="{px:.2}" cy="{py:.2}" r="1.2" fill="{}"/>"#, cat.colour());
        }
    }
    s.push_str("</svg>\n");
    std::fs::write(path, s)?;
    Ok(())
}
