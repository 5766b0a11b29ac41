#![allow(dead_code)]

use std::sync::Arc;

use inertial_mann::{Point, Space};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn uniform_point(space: &Arc<Space>, lo: f64, hi: f64, rng: &mut ChaCha8Rng) -> Point {
    Point::new(
        space,
        (0..space.dim()).map(|_| rng.gen_range(lo..hi)).collect(),
    )
    .unwrap()
}

/// Random smooth function on a grid: constant plus a few sine/cosine modes.
/// Large enough amplitudes that both branches of the set projections fire.
pub fn random_function(space: &Arc<Space>, rng: &mut ChaCha8Rng) -> Point {
    let c0 = rng.gen_range(-3.0..3.0);
    let modes: Vec<(f64, f64, f64)> = (1..=4)
        .map(|k| (k as f64, rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0)))
        .collect();
    Point::sample(space, |t| {
        c0 + modes
            .iter()
            .map(|(k, a, b)| a * (k * t).sin() + b * (k * t).cos())
            .sum::<f64>()
    })
    .unwrap()
}

/// Exhaustive active-set enumeration for `min ‖p − x‖` subject to
/// `⟨a_i, p⟩ ≤ b_i`, `i = 1, 2`, in plain Euclidean coordinates. Every KKT
/// candidate (no constraint, either one, both) is formed and the closest
/// feasible one is returned.
pub fn qp_oracle(a1: &[f64], b1: f64, a2: &[f64], b2: f64, x: &[f64]) -> Option<Vec<f64>> {
    let dot = |u: &[f64], v: &[f64]| u.iter().zip(v).map(|(p, q)| p * q).sum::<f64>();
    let along = |base: &[f64], dirs: &[(&[f64], f64)]| -> Vec<f64> {
        let mut out = base.to_vec();
        for (d, s) in dirs {
            for (o, v) in out.iter_mut().zip(d.iter()) {
                *o -= s * v;
            }
        }
        out
    };
    let mut candidates = vec![x.to_vec()];
    for (a, b) in [(a1, b1), (a2, b2)] {
        let aa = dot(a, a);
        if aa > 0.0 {
            candidates.push(along(x, &[(a, (dot(a, x) - b) / aa)]));
        }
    }
    let (g11, g12, g22) = (dot(a1, a1), dot(a1, a2), dot(a2, a2));
    let det = g11 * g22 - g12 * g12;
    if det.abs() > 1e-12 * g11 * g22 {
        let r1 = dot(a1, x) - b1;
        let r2 = dot(a2, x) - b2;
        let m1 = (g22 * r1 - g12 * r2) / det;
        let m2 = (g11 * r2 - g12 * r1) / det;
        candidates.push(along(x, &[(a1, m1), (a2, m2)]));
    }
    let feasible = |p: &[f64]| {
        let tol = 1e-9 * (1.0 + dot(p, p).sqrt());
        dot(a1, p) <= b1 + tol && dot(a2, p) <= b2 + tol
    };
    candidates
        .into_iter()
        .filter(|p| feasible(p))
        .min_by(|p, q| {
            let dp: f64 = p.iter().zip(x).map(|(u, v)| (u - v).powi(2)).sum();
            let dq: f64 = q.iter().zip(x).map(|(u, v)| (u - v).powi(2)).sum();
            dp.total_cmp(&dq)
        })
}
