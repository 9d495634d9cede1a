//! Seeded sampling helpers shared by tests, scans and the CLI.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::normal_bundle::BaseDirection;
use crate::quat::Quat;

/// Deterministic generator for block `block` of a run seeded with `seed`.
/// Blocks are independent ChaCha streams, so results do not depend on how
/// blocks are distributed over workers.
pub fn block_rng(seed: u64, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    rng
}

pub fn gaussian_quat<R: Rng + ?Sized>(rng: &mut R) -> Quat {
    let mut g = || -> f64 { StandardNormal.sample(rng) };
    Quat::new(g(), g(), g(), g())
}

/// Uniform on `S^3`.
pub fn unit_quat<R: Rng + ?Sized>(rng: &mut R) -> Quat {
    loop {
        let q = gaussian_quat(rng);
        let n = q.norm();
        if n > 1e-6 {
            return q / n;
        }
    }
}

/// Uniform in the closed unit ball of `H`.
pub fn quat_in_ball<R: Rng + ?Sized>(rng: &mut R) -> Quat {
    let radius = rng.random::<f64>().powf(0.25);
    unit_quat(rng) * radius
}

/// Uniform in the box `[-scale, scale]^4`.
pub fn quat_in_box<R: Rng + ?Sized>(rng: &mut R, scale: f64) -> Quat {
    Quat::new(
        rng.random_range(-scale..=scale),
        rng.random_range(-scale..=scale),
        rng.random_range(-scale..=scale),
        rng.random_range(-scale..=scale),
    )
}

/// Uniform unit direction in `span{j, k}`.
pub fn base_direction<R: Rng + ?Sized>(rng: &mut R) -> BaseDirection {
    BaseDirection::from_angle(rng.random_range(0.0..std::f64::consts::TAU))
}

/// Uniform point of the circle `{e^{iθ}}`.
pub fn circle_element<R: Rng + ?Sized>(rng: &mut R) -> Quat {
    let theta: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    Quat::new(theta.cos(), theta.sin(), 0.0, 0.0)
}
