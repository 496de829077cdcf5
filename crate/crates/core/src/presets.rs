//! Built-in group presentations.
//!
//! * `full-orbit`: the spin image of the theta group `⟨S, T²⟩ ≤ SL₂(Z)`
//!   (the matrices with `a+b+c+d` even). Its orbit through `(3, 4, 5)` is
//!   every primitive triple with `x` odd, `y` even and `z > 0`, i.e. every
//!   `uv_param(u, v)` with `u, v` coprime of opposite parity.
//! * `schottky-demo`: two hyperbolic elements of `SL₂(Z)` whose isometric
//!   circles are four pairwise disjoint discs, so the group is free and of
//!   infinite covolume.

use num_bigint::BigInt;

use crate::lattice::{Mat2, Triple};
use crate::orbit::{EnumParams, GroupPresentation};

/// A named presentation with the search settings used by the shipped runs.
#[derive(Clone, Debug)]
pub struct Preset {
    pub name: &'static str,
    pub presentation: GroupPresentation,
    /// Word-length cap that is certified complete for the shipped radii.
    pub max_word_length: usize,
}

impl Preset {
    pub fn params(&self, radius: f64) -> EnumParams {
        EnumParams::new(radius).with_max_word_length(self.max_word_length)
    }
}

pub const NAMES: [&str; 2] = ["full-orbit", "schottky-demo"];

pub fn by_name(name: &str) -> Option<Preset> {
    match name {
        "full-orbit" => Some(full_orbit()),
        "schottky-demo" => Some(schottky_demo()),
        _ => None,
    }
}

pub fn base_345() -> Triple<BigInt> {
    Triple::from_i64(3, 4, 5)
}

/// `S = (0 −1; 1 0)` and `T² = (1 2; 0 1)`.
pub fn full_orbit_sl2() -> Vec<Mat2<BigInt>> {
    vec![Mat2::from_i64(0, -1, 1, 0), Mat2::from_i64(1, 2, 0, 1)]
}

pub fn full_orbit() -> Preset {
    let presentation = GroupPresentation::from_sl2(&full_orbit_sl2(), base_345(), "full-orbit")
        .expect("built-in presentation is valid");
    // Reaching (1, 2k) from (1, 0) takes k applications of T², so the cap
    // has to grow like √T; 2¹⁶ covers every radius below 10¹⁰.
    Preset { name: "full-orbit", presentation, max_word_length: 1 << 16 }
}

/// Generators `A = (5 12; 2 5)` and `B = (3 2; 4 3)`.
///
/// Isometric circles of `A`: centres `±5/2`, radius `1/2`; of `B`: centres
/// `±3/4`, radius `1/4`. The four discs are disjoint.
pub fn schottky_sl2() -> Vec<Mat2<BigInt>> {
    vec![Mat2::from_i64(5, 12, 2, 5), Mat2::from_i64(3, 2, 4, 3)]
}

pub fn schottky_demo() -> Preset {
    let presentation = GroupPresentation::from_sl2(&schottky_sl2(), base_345(), "schottky-demo")
        .expect("built-in presentation is valid");
    Preset { name: "schottky-demo", presentation, max_word_length: 64 }
}

/// Independent listing of the `full-orbit` points with `∥x∥ < T`: every
/// `uv_param(u, v)` with `gcd(u, v) = 1`, `u + v` odd, taken once per `±(u, v)`.
/// On the cone `∥x∥² = 2z²`, so the bound is `2(u² + v²)² < T²`.
pub fn full_orbit_oracle(radius: f64) -> Vec<Triple<BigInt>> {
    let r2 = radius * radius;
    let m = (radius / 2f64.sqrt()).sqrt().ceil() as i64 + 1;
    let mut out = Vec::new();
    for u in 0..=m {
        for v in -m..=m {
            if (u == 0 && v <= 0) || (u + v) % 2 == 0 || num_integer::gcd(u, v) != 1 {
                continue;
            }
            let z = (u * u + v * v) as f64;
            if 2.0 * z * z < r2 {
                out.push(crate::lattice::uv_param(&BigInt::from(u), &BigInt::from(v)));
            }
        }
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbit::enumerate_orbit;

    #[test]
    fn presets_resolve() {
        for name in NAMES {
            assert_eq!(by_name(name).unwrap().name, name);
        }
        assert!(by_name("nope").is_none());
    }

    #[test]
    fn oracle_matches_small_radius() {
        let p = full_orbit();
        for t in [10.0, 60.0, 300.0] {
            assert_eq!(enumerate_orbit(&p.presentation, &p.params(t)).unwrap(), full_orbit_oracle(t));
        }
        assert!(full_orbit_oracle(10.0).contains(&base_345()));
    }
}
