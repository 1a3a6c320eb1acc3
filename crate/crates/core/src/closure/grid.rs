//! P-value grids for the checkers and the oracle.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::IntersectionFamily;

/// Full Cartesian products of boundary points are used up to this many vectors.
const FULL_PRODUCT_LIMIT: usize = 4096;

/// Random p-vectors mixing uniform draws with draws concentrated near zero.
pub fn mixed_pvectors(n: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (0..n).map(|_| mixed_draw(&mut rng)).collect())
        .collect()
}

fn mixed_draw(rng: &mut impl Rng) -> f64 {
    let u: f64 = rng.random();
    if rng.random_bool(0.5) {
        u
    } else {
        u.powi(4)
    }
}

/// Boundary points of `family` on a universe of size `n`: every critical
/// value together with its two floating-point neighbours, plus `0`, `0.5`
/// and `1`.
pub fn boundary_points<F>(family: &F, n: usize) -> Vec<f64>
where
    F: IntersectionFamily + ?Sized,
{
    let mut points = vec![0.0, 0.5, 1.0];
    for v in family.critical_values(n) {
        for x in [v.next_down(), v, v.next_up()] {
            if (0.0..=1.0).contains(&x) {
                points.push(x);
            }
        }
    }
    points.sort_by(f64::total_cmp);
    points.dedup();
    points
}

/// Adversarial grid: the full product of boundary points when it is small,
/// followed by `random` vectors whose coordinates are boundary points or
/// mixed random draws with equal probability.
pub fn boundary_grid<F>(family: &F, n: usize, random: usize, seed: u64) -> Vec<Vec<f64>>
where
    F: IntersectionFamily + ?Sized,
{
    let points = boundary_points(family, n);
    let mut grid = Vec::new();
    let product = u32::try_from(n)
        .ok()
        .and_then(|n| points.len().checked_pow(n))
        .filter(|&size| size <= FULL_PRODUCT_LIMIT);
    if let Some(size) = product {
        for mut code in 0..size {
            let mut p = Vec::with_capacity(n);
            for _ in 0..n {
                p.push(points[code % points.len()]);
                code /= points.len();
            }
            grid.push(p);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..random {
        let p = (0..n)
            .map(|_| {
                if rng.random_bool(0.5) {
                    points[rng.random_range(0..points.len())]
                } else {
                    mixed_draw(&mut rng)
                }
            })
            .collect();
        grid.push(p);
    }
    grid
}
