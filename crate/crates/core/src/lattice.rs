//! Exact integer arithmetic on the cone `x² + y² − z² = 0`.
//!
//! Matrices act on column vectors: `act(t, m) = m · t`. With that convention
//! the spin lift of `m ∈ SL₂(Z)` is compatible with the row action on the
//! `(u, v)` plane, `uv_param((u, v)·m) = spin_lift(m) · uv_param(u, v)`, and
//! the lift reverses products: `spin_lift(m₁m₂) = spin_lift(m₂)·spin_lift(m₁)`.
//! Hence `x ↦ spin_lift(γ)·x` is a right action of `SL₂(Z)`, which is what the
//! orbit notation `x₀·Γ` needs.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{ExactInt, Int};

/// An integer 3-vector `(x, y, z)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple<I> {
    pub x: I,
    pub y: I,
    pub z: I,
}

impl<I: Int> Triple<I> {
    pub fn new(x: I, y: I, z: I) -> Self {
        Self { x, y, z }
    }

    pub fn from_i64(x: i64, y: i64, z: i64) -> Self {
        Self::new(I::lit(x), I::lit(y), I::lit(z))
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero() && self.z.is_zero()
    }

    pub fn checked_q_form(&self) -> Option<I> {
        let xx = self.x.mul_c(&self.x)?;
        let yy = self.y.mul_c(&self.y)?;
        let zz = self.z.mul_c(&self.z)?;
        xx.add_c(&yy)?.sub_c(&zz)
    }

    /// Squared Euclidean norm `x² + y² + z²`.
    pub fn checked_norm_sq(&self) -> Option<I> {
        let xx = self.x.mul_c(&self.x)?;
        let yy = self.y.mul_c(&self.y)?;
        let zz = self.z.mul_c(&self.z)?;
        xx.add_c(&yy)?.add_c(&zz)
    }

    /// `m · self`, or `None` on machine overflow.
    pub fn checked_act(&self, m: &Mat3<I>) -> Option<Self> {
        let v = [&self.x, &self.y, &self.z];
        let row = |r: &[I; 3]| -> Option<I> {
            r[0].mul_c(v[0])?
                .add_c(&r[1].mul_c(v[1])?)?
                .add_c(&r[2].mul_c(v[2])?)
        };
        Some(Self::new(row(&m.m[0])?, row(&m.m[1])?, row(&m.m[2])?))
    }

    pub fn gcd(&self) -> I {
        self.x.gcd(&self.y).gcd(&self.z)
    }

    pub fn is_primitive(&self) -> bool {
        self.gcd().is_one()
    }

    pub fn to_big(&self) -> Triple<BigInt> {
        Triple::new(self.x.to_big(), self.y.to_big(), self.z.to_big())
    }

    pub fn try_from_big(t: &Triple<BigInt>) -> Option<Self> {
        Some(Self::new(I::from_big(&t.x)?, I::from_big(&t.y)?, I::from_big(&t.z)?))
    }

    pub fn residues(&self, q: u64) -> [u64; 3] {
        [self.x.rem_u64(q), self.y.rem_u64(q), self.z.rem_u64(q)]
    }
}

impl<I: ExactInt> Triple<I> {
    pub fn q_form(&self) -> I {
        self.checked_q_form().expect("exact arithmetic")
    }

    pub fn norm_sq(&self) -> I {
        self.checked_norm_sq().expect("exact arithmetic")
    }

    pub fn act(&self, m: &Mat3<I>) -> Self {
        self.checked_act(m).expect("exact arithmetic")
    }
}

impl<I: fmt::Display> fmt::Display for Triple<I> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

/// `Q(x, y, z) = x² + y² − z²`.
pub fn q_form(t: &Triple<BigInt>) -> BigInt {
    t.q_form()
}

/// The classical parametrization `(u² − v², 2uv, u² + v²)`.
pub fn uv_param<I: ExactInt>(u: &I, v: &I) -> Triple<I> {
    let uu = u.clone() * u.clone();
    let vv = v.clone() * v.clone();
    let two = I::lit(2);
    Triple::new(uu.clone() - vv.clone(), two * u.clone() * v.clone(), uu + vv)
}

/// A 2×2 integer matrix `(a b; c d)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mat2<I> {
    pub a: I,
    pub b: I,
    pub c: I,
    pub d: I,
}

impl<I: Int> Mat2<I> {
    pub fn new(a: I, b: I, c: I, d: I) -> Self {
        Self { a, b, c, d }
    }

    pub fn from_i64(a: i64, b: i64, c: i64, d: i64) -> Self {
        Self::new(I::lit(a), I::lit(b), I::lit(c), I::lit(d))
    }

    pub fn identity() -> Self {
        Self::from_i64(1, 0, 0, 1)
    }

    pub fn checked_det(&self) -> Option<I> {
        self.a.mul_c(&self.d)?.sub_c(&self.b.mul_c(&self.c)?)
    }

    pub fn checked_mul(&self, o: &Self) -> Option<Self> {
        let dot = |p: &I, q: &I, r: &I, s: &I| p.mul_c(q)?.add_c(&r.mul_c(s)?);
        Some(Self::new(
            dot(&self.a, &o.a, &self.b, &o.c)?,
            dot(&self.a, &o.b, &self.b, &o.d)?,
            dot(&self.c, &o.a, &self.d, &o.c)?,
            dot(&self.c, &o.b, &self.d, &o.d)?,
        ))
    }

    /// Inverse of a determinant-one matrix.
    pub fn inverse(&self) -> Self {
        Self::new(self.d.clone(), -self.b.clone(), -self.c.clone(), self.a.clone())
    }

    /// Row action on the `(u, v)` plane: `(u, v) ↦ (au + cv, bu + dv)`.
    pub fn act_row(&self, u: &I, v: &I) -> Option<(I, I)> {
        Some((
            self.a.mul_c(u)?.add_c(&self.c.mul_c(v)?)?,
            self.b.mul_c(u)?.add_c(&self.d.mul_c(v)?)?,
        ))
    }
}

/// A 3×3 integer matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mat3<I> {
    pub m: [[I; 3]; 3],
}

impl<I: Int> Mat3<I> {
    pub fn new(m: [[I; 3]; 3]) -> Self {
        Self { m }
    }

    pub fn from_i64(rows: [[i64; 3]; 3]) -> Self {
        Self::new(rows.map(|r| r.map(I::lit)))
    }

    pub fn identity() -> Self {
        Self::from_i64([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    }

    /// `diag(1, 1, −1)`, the Gram matrix of the form.
    pub fn form_matrix() -> Self {
        Self::from_i64([[1, 0, 0], [0, 1, 0], [0, 0, -1]])
    }

    pub fn transpose(&self) -> Self {
        let m = &self.m;
        Self::new(std::array::from_fn(|i| std::array::from_fn(|j| m[j][i].clone())))
    }

    pub fn checked_mul(&self, o: &Self) -> Option<Self> {
        let mut out = Self::identity();
        for i in 0..3 {
            for j in 0..3 {
                let mut acc = I::zero();
                for k in 0..3 {
                    acc = acc.add_c(&self.m[i][k].mul_c(&o.m[k][j])?)?;
                }
                out.m[i][j] = acc;
            }
        }
        Some(out)
    }

    pub fn checked_det(&self) -> Option<I> {
        let m = &self.m;
        let minor = |a: &I, b: &I, c: &I, d: &I| a.mul_c(d)?.sub_c(&b.mul_c(c)?);
        let t0 = m[0][0].mul_c(&minor(&m[1][1], &m[1][2], &m[2][1], &m[2][2])?)?;
        let t1 = m[0][1].mul_c(&minor(&m[1][0], &m[1][2], &m[2][0], &m[2][2])?)?;
        let t2 = m[0][2].mul_c(&minor(&m[1][0], &m[1][1], &m[2][0], &m[2][1])?)?;
        t0.sub_c(&t1)?.add_c(&t2)
    }

    /// Inverse of an element of `SO_Q`: `J·Mᵀ·J`.
    pub fn inverse_soq(&self) -> Self {
        let mut t = self.transpose();
        for i in 0..3 {
            for j in 0..3 {
                if (i == 2) != (j == 2) {
                    t.m[i][j] = -t.m[i][j].clone();
                }
            }
        }
        t
    }

    pub fn to_big(&self) -> Mat3<BigInt> {
        Mat3::new(self.m.clone().map(|r| r.map(|e| e.to_big())))
    }

    pub fn try_from_big(m: &Mat3<BigInt>) -> Option<Self> {
        let mut out = Self::identity();
        for i in 0..3 {
            for j in 0..3 {
                out.m[i][j] = I::from_big(&m.m[i][j])?;
            }
        }
        Some(out)
    }

    /// Entries reduced to `[0, q)`.
    pub fn residues(&self, q: u64) -> [[u64; 3]; 3] {
        std::array::from_fn(|i| std::array::from_fn(|j| self.m[i][j].rem_u64(q)))
    }
}

impl<I: ExactInt> Mat3<I> {
    pub fn mul(&self, o: &Self) -> Self {
        self.checked_mul(o).expect("exact arithmetic")
    }

    pub fn det(&self) -> I {
        self.checked_det().expect("exact arithmetic")
    }
}

/// Lifts `(a b; c d) ∈ SL₂(Z)` to `SO_Q(Z)`.
///
/// Every `/2` entry must be integral, which happens exactly when `a+b+c+d` is
/// even.
pub fn spin_lift<I: Int>(m: &Mat2<I>) -> Result<Mat3<I>> {
    let det = m.checked_det().ok_or(Error::Overflow)?;
    if !det.is_one() {
        return Err(Error::Det(det.to_string()));
    }
    let (a, b, c, d) = (&m.a, &m.b, &m.c, &m.d);
    let of = || Error::Overflow;
    let sq = |v: &I| v.mul_c(v).ok_or(Error::Overflow);
    let (aa, bb, cc, dd) = (sq(a)?, sq(b)?, sq(c)?, sq(d)?);
    let prod = |p: &I, q: &I| p.mul_c(q).ok_or(Error::Overflow);
    let (ac, bd, ab, cd, bc, ad) =
        (prod(a, c)?, prod(b, d)?, prod(a, b)?, prod(c, d)?, prod(b, c)?, prod(a, d)?);
    let two = I::lit(2);
    let half = |num: I, label: &str| -> Result<I> {
        let (q, r) = num.div_rem(&two);
        if r.is_zero() {
            Ok(q)
        } else {
            Err(Error::Parity(format!("{label} = {num}/2")))
        }
    };
    let s = |p: &I, q: &I, r: &I, t: &I, sgn: [bool; 3]| -> Result<I> {
        let mut acc = p.clone();
        for (v, plus) in [(q, sgn[0]), (r, sgn[1]), (t, sgn[2])] {
            acc = if plus { acc.add_c(v) } else { acc.sub_c(v) }.ok_or_else(of)?;
        }
        Ok(acc)
    };
    let e00 = half(s(&aa, &bb, &cc, &dd, [false, false, true])?, "(a²−b²−c²+d²)")?;
    let e02 = half(s(&aa, &bb, &cc, &dd, [false, true, false])?, "(a²−b²+c²−d²)")?;
    let e20 = half(s(&aa, &bb, &cc, &dd, [true, false, false])?, "(a²+b²−c²−d²)")?;
    let e22 = half(s(&aa, &bb, &cc, &dd, [true, true, true])?, "(a²+b²+c²+d²)")?;
    let e01 = ac.sub_c(&bd).ok_or_else(of)?;
    let e21 = ac.add_c(&bd).ok_or_else(of)?;
    let e10 = ab.sub_c(&cd).ok_or_else(of)?;
    let e12 = ab.add_c(&cd).ok_or_else(of)?;
    let e11 = bc.add_c(&ad).ok_or_else(of)?;
    Ok(Mat3::new([[e00, e01, e02], [e10, e11, e12], [e20, e21, e22]]))
}

/// `m · t`.
pub fn act(t: &Triple<BigInt>, m: &Mat3<BigInt>) -> Triple<BigInt> {
    t.act(m)
}

/// Checks `MᵀJM = J` and `det M = 1`.
pub fn validate_generator<I: Int>(m: &Mat3<I>) -> Result<()> {
    let j = Mat3::<I>::form_matrix();
    let gram = m
        .transpose()
        .checked_mul(&j)
        .and_then(|t| t.checked_mul(m))
        .ok_or(Error::Overflow)?;
    if gram != j {
        return Err(Error::InvalidGenerator(format!(
            "MᵀJM ≠ J (got {:?})",
            gram.m.iter().map(|r| r.iter().map(|e| e.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>()
        )));
    }
    let det = m.checked_det().ok_or(Error::Overflow)?;
    if !det.is_one() {
        return Err(Error::InvalidGenerator(format!("det = {det}, expected 1")));
    }
    Ok(())
}

/// The three sieve polynomials on the cone.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SievePolynomial {
    /// `F_H = z`.
    #[serde(rename = "FH")]
    Hypotenuse,
    /// `F_A = xy/12`.
    #[serde(rename = "FA")]
    Area,
    /// `F_C = xyz/60`.
    #[serde(rename = "FC")]
    Coordinates,
}

impl SievePolynomial {
    pub const ALL: [SievePolynomial; 3] = [Self::Hypotenuse, Self::Area, Self::Coordinates];

    pub fn denominator(self) -> u32 {
        match self {
            Self::Hypotenuse => 1,
            Self::Area => 12,
            Self::Coordinates => 60,
        }
    }

    /// Number of linear factors over `Z[i]` in the `(u, v)` coordinates.
    pub fn component_count(self) -> u32 {
        match self {
            Self::Hypotenuse => 1,
            Self::Area => 4,
            Self::Coordinates => 5,
        }
    }

    /// Sieve dimension.
    pub fn kappa(self) -> u32 {
        self.component_count()
    }

    pub fn tag(self) -> &'static str {
        match self {
            Self::Hypotenuse => "FH",
            Self::Area => "FA",
            Self::Coordinates => "FC",
        }
    }

    /// The numerator polynomial evaluated with checked arithmetic.
    pub fn checked_numerator<I: Int>(self, t: &Triple<I>) -> Option<I> {
        match self {
            Self::Hypotenuse => Some(t.z.clone()),
            Self::Area => t.x.mul_c(&t.y),
            Self::Coordinates => t.x.mul_c(&t.y)?.mul_c(&t.z),
        }
    }

    pub fn checked_eval<I: Int>(self, t: &Triple<I>) -> Result<I> {
        let num = self.checked_numerator(t).ok_or(Error::Overflow)?;
        let den = I::lit(self.denominator() as i64);
        let (q, r) = num.div_rem(&den);
        if r.is_zero() {
            Ok(q)
        } else {
            Err(Error::Divisibility {
                numerator: num.to_string(),
                denominator: self.denominator(),
            })
        }
    }
}

impl fmt::Display for SievePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for SievePolynomial {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fh" | "h" | "hypotenuse" => Ok(Self::Hypotenuse),
            "fa" | "a" | "area" => Ok(Self::Area),
            "fc" | "c" | "coordinates" | "product" => Ok(Self::Coordinates),
            _ => Err(Error::InvalidRange(format!("unknown polynomial {s:?}"))),
        }
    }
}

/// `z`, `xy/12` or `xyz/60`.
pub fn eval_f(f: SievePolynomial, t: &Triple<BigInt>) -> Result<BigInt> {
    f.checked_eval(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    type T = Triple<BigInt>;
    type M2 = Mat2<BigInt>;
    type M3 = Mat3<BigInt>;

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn q_form_examples() {
        assert_eq!(q_form(&T::from_i64(3, 4, 5)), big(0));
        assert_eq!(q_form(&T::from_i64(0, 0, 0)), big(0));
        assert_eq!(q_form(&T::from_i64(1, 1, 1)), big(1));
    }

    #[test]
    fn uv_param_examples() {
        assert_eq!(uv_param(&big(2), &big(1)), T::from_i64(3, 4, 5));
        assert_eq!(uv_param(&big(1), &big(0)), T::from_i64(1, 0, 1));
        assert_eq!(uv_param(&big(3), &big(2)), T::from_i64(5, 12, 13));
    }

    #[test]
    fn spin_lift_examples() {
        assert_eq!(spin_lift(&M2::identity()).unwrap(), M3::identity());
        assert_eq!(
            spin_lift(&M2::from_i64(1, 2, 0, 1)).unwrap(),
            M3::from_i64([[-1, -2, -2], [2, 1, 2], [2, 2, 3]])
        );
        assert!(matches!(spin_lift(&M2::from_i64(1, 1, 0, 1)), Err(Error::Parity(_))));
        assert!(matches!(spin_lift(&M2::from_i64(2, 0, 0, 2)), Err(Error::Det(_))));
        assert_eq!(spin_lift(&M2::from_i64(-1, 0, 0, -1)).unwrap(), M3::identity());
    }

    #[test]
    fn action_convention_matches_uv_side() {
        let g = M2::from_i64(1, 2, 0, 1);
        let (u, v) = g.act_row(&big(2), &big(1)).unwrap();
        assert_eq!((u.clone(), v.clone()), (big(2), big(5)));
        let lifted = spin_lift(&g).unwrap();
        assert_eq!(act(&T::from_i64(3, 4, 5), &lifted), uv_param(&u, &v));
        assert_eq!(uv_param(&u, &v), T::from_i64(-21, 20, 29));
        assert_eq!(act(&T::from_i64(3, 4, 5), &M3::identity()), T::from_i64(3, 4, 5));
    }

    #[test]
    fn eval_f_examples() {
        let t = T::from_i64(3, 4, 5);
        assert_eq!(eval_f(SievePolynomial::Area, &t).unwrap(), big(1));
        assert_eq!(eval_f(SievePolynomial::Coordinates, &t).unwrap(), big(1));
        assert_eq!(eval_f(SievePolynomial::Hypotenuse, &t).unwrap(), big(5));
        assert_eq!(eval_f(SievePolynomial::Area, &T::from_i64(5, 12, 13)).unwrap(), big(5));
        assert_eq!(eval_f(SievePolynomial::Area, &T::from_i64(1, 0, 1)).unwrap(), big(0));
        assert!(matches!(
            eval_f(SievePolynomial::Area, &T::from_i64(1, 1, 1)),
            Err(Error::Divisibility { .. })
        ));
    }

    #[test]
    fn polynomial_metadata() {
        for (f, d, k) in [
            (SievePolynomial::Hypotenuse, 1, 1),
            (SievePolynomial::Area, 12, 4),
            (SievePolynomial::Coordinates, 60, 5),
        ] {
            assert_eq!(f.denominator(), d);
            assert_eq!(f.component_count(), k);
            assert_eq!(f.tag().parse::<SievePolynomial>().unwrap(), f);
        }
    }

    #[test]
    fn validate_generator_examples() {
        assert!(validate_generator(&M3::identity()).is_ok());
        let err = validate_generator(&M3::form_matrix()).unwrap_err();
        assert!(err.to_string().contains("det"), "{err}");
        let bad = M3::from_i64([[1, 1, 0], [0, 1, 0], [0, 0, 1]]);
        assert!(validate_generator(&bad).unwrap_err().to_string().contains("MᵀJM"));
    }

    #[test]
    fn machine_overflow_is_reported() {
        let t = Triple::<i64>::from_i64(i64::MAX / 2, 3, 4);
        assert!(t.checked_q_form().is_none());
        let m = Mat2::<i64>::from_i64(i64::MAX / 4, 1, 1, i64::MAX / 4);
        assert_eq!(spin_lift(&m).unwrap_err(), Error::Overflow);
    }

    #[test]
    fn inverse_soq_is_inverse() {
        let g = spin_lift(&M2::from_i64(3, 4, 2, 3)).unwrap();
        assert_eq!(g.mul(&g.inverse_soq()), M3::identity());
    }

    /// Random `SL₂(Z)` elements with `a+b+c+d` even, built as short words in
    /// `S = (0 −1; 1 0)` and `T² = (1 2; 0 1)`.
    fn parity_valid() -> impl Strategy<Value = M2> {
        prop::collection::vec((0usize..3, 1u32..3), 0..6).prop_map(|word| {
            let gens = [
                M2::from_i64(0, -1, 1, 0),
                M2::from_i64(1, 2, 0, 1),
                M2::from_i64(1, -2, 0, 1),
            ];
            word.into_iter().fold(M2::identity(), |acc, (g, k)| {
                (0..k).fold(acc, |a, _| a.checked_mul(&gens[g]).unwrap())
            })
        })
    }

    proptest! {
        #[test]
        fn spin_lift_reverses_products(m1 in parity_valid(), m2 in parity_valid()) {
            let s1 = spin_lift(&m1).unwrap();
            let s2 = spin_lift(&m2).unwrap();
            let s12 = spin_lift(&m1.checked_mul(&m2).unwrap()).unwrap();
            prop_assert_eq!(s12, s2.mul(&s1));
        }

        #[test]
        fn spin_image_is_valid(m in parity_valid()) {
            prop_assert!(validate_generator(&spin_lift(&m).unwrap()).is_ok());
        }

        #[test]
        fn spin_lift_intertwines_uv_action(m in parity_valid(), u in -50i64..50, v in -50i64..50) {
            let (u2, v2) = m.act_row(&big(u), &big(v)).unwrap();
            prop_assert_eq!(
                act(&uv_param(&big(u), &big(v)), &spin_lift(&m).unwrap()),
                uv_param(&u2, &v2)
            );
        }

        #[test]
        fn uv_param_on_cone(u in -10_000i64..10_000, v in -10_000i64..10_000) {
            prop_assert_eq!(q_form(&uv_param(&big(u), &big(v))), big(0));
        }

        #[test]
        fn act_preserves_form(m in parity_valid(), x in -1000i64..1000, y in -1000i64..1000, z in -1000i64..1000) {
            let t = T::from_i64(x, y, z);
            prop_assert_eq!(q_form(&act(&t, &spin_lift(&m).unwrap())), q_form(&t));
        }

        #[test]
        fn factored_forms(u in 1i64..2000, v in 1i64..2000) {
            prop_assume!(num_integer::gcd(u, v) == 1 && (u + v) % 2 == 1);
            let (bu, bv) = (big(u), big(v));
            let t = uv_param(&bu, &bv);
            let area = eval_f(SievePolynomial::Area, &t).unwrap();
            let quartic = (&bu + &bv) * (&bu - &bv) * &bu * &bv;
            prop_assert_eq!(area * big(6), quartic.clone());
            let coords = eval_f(SievePolynomial::Coordinates, &t).unwrap();
            prop_assert_eq!(coords * big(30), quartic * (&bu * &bu + &bv * &bv));
        }

        #[test]
        fn machine_path_agrees_with_exact(m in parity_valid(), x in -1000i64..1000, y in -1000i64..1000, z in -1000i64..1000) {
            let g = spin_lift(&m).unwrap();
            let small = Mat3::<i64>::try_from_big(&g).unwrap();
            let t = Triple::<i64>::from_i64(x, y, z);
            let fast = t.checked_act(&small).unwrap();
            prop_assert_eq!(fast.to_big(), act(&t.to_big(), &g));
        }
    }
}
