//! Random instance generators for the randomised checks.

use rand::Rng;

use crate::construct::MixtureMeasure;
use crate::duality::Density;
use crate::space::{FiniteProbSpace, Position};

/// Space with `1..=max_atoms` atoms; a third of them uniform.
pub fn space<R: Rng + ?Sized>(rng: &mut R, max_atoms: usize) -> FiniteProbSpace {
    let n = rng.gen_range(1..=max_atoms.max(1));
    space_with(rng, n)
}

pub fn space_with<R: Rng + ?Sized>(rng: &mut R, n: usize) -> FiniteProbSpace {
    if rng.gen_bool(1.0 / 3.0) {
        return FiniteProbSpace::uniform(n).expect("n ≥ 1");
    }
    let w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = w.iter().sum();
    FiniteProbSpace::new(w.into_iter().map(|v| v / total).collect()).expect("normalised weights")
}

/// Mix of continuous, integer-valued (ties) and constant positions.
pub fn position<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Position {
    let roll = rng.gen_range(0..20);
    let v: Vec<f64> = match roll {
        0 => vec![rng.gen_range(-5.0..5.0); n],
        1..=8 => (0..n).map(|_| rng.gen_range(-5i32..=5) as f64).collect(),
        _ => (0..n).map(|_| rng.gen_range(-10.0..10.0)).collect(),
    };
    Position::new(v).expect("finite")
}

/// Componentwise nonnegative position, with some exact zeros.
pub fn nonnegative<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Position {
    let v = (0..n)
        .map(|_| {
            if rng.gen_bool(0.3) {
                0.0
            } else {
                rng.gen_range(0.0..5.0)
            }
        })
        .collect();
    Position::new(v).expect("finite")
}

/// Random density, sometimes with zero entries.
pub fn density<R: Rng + ?Sized>(rng: &mut R, space: &FiniteProbSpace) -> Density {
    let n = space.len();
    let mut w: Vec<f64> = (0..n)
        .map(|_| {
            if rng.gen_bool(0.2) {
                0.0
            } else {
                rng.gen_range(0.0..3.0)
            }
        })
        .collect();
    if w.iter().all(|v| *v == 0.0) {
        w[rng.gen_range(0..n)] = 1.0;
    }
    let mean: f64 = space.probs().iter().zip(&w).map(|(p, v)| p * v).sum();
    Density::new(space, w.into_iter().map(|v| v / mean).collect()).expect("normalised density")
}

/// Level in (0, 1], occasionally exactly 1.
pub fn level<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    if rng.gen_bool(0.1) {
        1.0
    } else {
        1.0 - rng.gen_range(0.0..0.999)
    }
}

pub fn mixture<R: Rng + ?Sized>(rng: &mut R, max_levels: usize) -> MixtureMeasure {
    let k = rng.gen_range(1..=max_levels.max(1));
    let w: Vec<f64> = (0..k).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = w.iter().sum();
    let atoms = w.into_iter().map(|v| (level(rng), v / total)).collect();
    MixtureMeasure::new(atoms).expect("valid random mixture")
}
