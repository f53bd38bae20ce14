//! Deterministic point sets used by sweeps and verification checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::types::{Triangle, Vec2};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Folds a point of the unit square into barycentric coordinates.
fn fold(mut a: f64, mut b: f64) -> [f64; 3] {
    if a + b > 1.0 {
        a = 1.0 - a;
        b = 1.0 - b;
    }
    [1.0 - a - b, a, b]
}

/// `n` points of the additive recurrence with the plastic-number
/// generator, folded into the triangle.
pub fn quasi_random_in_triangle(tri: &Triangle, n: usize) -> Vec<Vec2> {
    // 1/g and 1/g² for the plastic number g
    const A1: f64 = 0.754_877_666_246_692_7;
    const A2: f64 = 0.569_840_290_998_053_3;
    (0..n)
        .map(|i| {
            let k = i as f64 + 1.0;
            let a = (0.5 + A1 * k).fract();
            let b = (0.5 + A2 * k).fract();
            tri.point(fold(a, b))
        })
        .collect()
}

pub fn random_in_triangle<R: Rng>(rng: &mut R, tri: &Triangle) -> Vec2 {
    let a: f64 = rng.random();
    let b: f64 = rng.random();
    tri.point(fold(a, b))
}

/// Random triangle with corners in `[-1, 2]²` and a bounded aspect ratio.
pub fn random_triangle<R: Rng>(rng: &mut R) -> Triangle {
    loop {
        let c: [f64; 6] = std::array::from_fn(|_| rng.random_range(-1.0..2.0));
        if let Ok(t) = Triangle::from_coords(c) {
            let d = t.diameter();
            if t.area() > 0.1 * d * d {
                return t;
            }
        }
    }
}

/// Uniform grid of barycentric points `(i, j, n - i - j) / n`.
pub fn triangle_grid(tri: &Triangle, n: usize) -> Vec<Vec2> {
    let n = n.max(1);
    let mut out = Vec::with_capacity((n + 1) * (n + 2) / 2);
    for j in 0..=n {
        for i in 0..=(n - j) {
            let b1 = i as f64 / n as f64;
            let b2 = j as f64 / n as f64;
            out.push(tri.point([1.0 - b1 - b2, b1, b2]));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quasi_random_points_are_inside() {
        let t = Triangle::from_coords([0.0, 0.0, 2.0, 0.5, -0.3, 1.2]).unwrap();
        for p in quasi_random_in_triangle(&t, 2000) {
            assert!(t.contains(&p, 1e-12));
        }
    }

    #[test]
    fn grid_size() {
        let t = Triangle::from_coords([0.0, 0.0, 1.0, 0.0, 0.0, 1.0]).unwrap();
        assert_eq!(triangle_grid(&t, 4).len(), 15);
    }
}
