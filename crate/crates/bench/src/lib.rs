//! Fixtures shared by the benchmarks.

use probsyl::{AtomId, Network, ProbInterval};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const STUDENTS: &str = include_str!("../../../fixtures/students.kb");

/// A consistent KB over `n` atoms: conditional frequencies in a random
/// population, each widened by up to `slack`, on a `density` share of arcs.
pub fn population_kb(n: usize, density: f64, slack: f64, seed: u64) -> Network {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rates: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..0.6)).collect();
    // atoms lean on their predecessor so the arcs carry information
    let people: Vec<Vec<bool>> = (0..2000)
        .map(|_| {
            let mut row = Vec::with_capacity(n);
            for k in 0..n {
                let p = match k.checked_sub(1).map(|j| row[j]) {
                    Some(true) => (rates[k] * 1.5).min(0.95),
                    _ => rates[k],
                };
                row.push(rng.gen_bool(p));
            }
            row
        })
        .collect();
    let mut net = Network::new();
    for k in 0..n {
        net.add_atom(&format!("a{k}")).unwrap();
    }
    for t in 0..n {
        for g in 0..n {
            if t == g || !rng.gen_bool(density) {
                continue;
            }
            let given = people.iter().filter(|p| p[g]).count();
            if given == 0 {
                continue;
            }
            let both = people.iter().filter(|p| p[g] && p[t]).count();
            let v = both as f64 / given as f64;
            let iv = ProbInterval::new(
                (v - rng.gen_range(0.0..slack)).max(0.0),
                (v + rng.gen_range(0.0..slack)).min(1.0),
            );
            net.constrain(AtomId(t), AtomId(g), iv.unwrap()).unwrap();
        }
    }
    net
}
