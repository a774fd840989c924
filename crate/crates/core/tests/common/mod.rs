#![allow(dead_code)]

use probsyl::{AtomId, Network, ProbInterval};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A distribution over the worlds of `n` atoms; atom `k` is bit `k`.
#[derive(Clone, Debug)]
pub struct Truth {
    pub n: usize,
    pub p: Vec<f64>,
}

impl Truth {
    pub fn random(rng: &mut ChaCha8Rng, n: usize) -> Self {
        let worlds = 1 << n;
        let mut p: Vec<f64> = (0..worlds)
            .map(|_| {
                if rng.gen_bool(0.3) {
                    0.0
                } else {
                    -rng.gen::<f64>().max(1e-12).ln()
                }
            })
            .collect();
        let total: f64 = p.iter().sum();
        if total == 0.0 {
            p[worlds - 1] = 1.0;
        }
        let total: f64 = p.iter().sum();
        p.iter_mut().for_each(|v| *v /= total);
        // keep every atom above 2% by mixing in the uniform distribution
        let mut truth = Self { n, p };
        while (0..n).any(|k| truth.mass(|w| w >> k & 1 == 1) < 0.02) {
            let u = 1.0 / worlds as f64;
            truth.p.iter_mut().for_each(|v| *v = 0.5 * *v + 0.5 * u);
        }
        truth
    }

    pub fn mass(&self, event: impl Fn(usize) -> bool) -> f64 {
        self.p
            .iter()
            .enumerate()
            .filter(|(w, _)| event(*w))
            .map(|(_, v)| v)
            .sum()
    }

    /// `P(t|g)` for atom indices.
    pub fn cond(&self, t: usize, g: usize) -> f64 {
        let both = self.mass(|w| w >> t & 1 == 1 && w >> g & 1 == 1);
        both / self.mass(|w| w >> g & 1 == 1)
    }
}

/// An interval around `v`: vacuous, exact or randomly widened.
pub fn widen(rng: &mut ChaCha8Rng, v: f64) -> ProbInterval {
    let roll: f64 = rng.gen();
    if roll < 0.2 {
        ProbInterval::vacuous()
    } else if roll < 0.4 {
        ProbInterval::new(v, v).unwrap()
    } else {
        let lo = (v - rng.gen_range(0.0..0.2)).max(0.0);
        let hi = (v + rng.gen_range(0.0..0.2)).min(1.0);
        ProbInterval::new(lo, hi).unwrap()
    }
}

/// Atoms `a0 … a{n-1}` in order.
pub fn atoms(n: usize) -> Network {
    let mut net = Network::new();
    for k in 0..n {
        net.add_atom(&format!("a{k}")).unwrap();
    }
    net
}

/// A KB true of `truth` constraining the listed arcs `(target, given)`.
pub fn kb_on_arcs(rng: &mut ChaCha8Rng, truth: &Truth, arcs: &[(usize, usize)]) -> Network {
    let mut net = atoms(truth.n);
    for &(t, g) in arcs {
        let iv = widen(rng, truth.cond(t, g));
        net.constrain(AtomId(t), AtomId(g), iv).unwrap();
    }
    net
}

/// A KB true of `truth` constraining every ordered pair with probability `density`.
pub fn random_kb(rng: &mut ChaCha8Rng, truth: &Truth, density: f64) -> Network {
    let arcs: Vec<(usize, usize)> = (0..truth.n)
        .flat_map(|t| (0..truth.n).map(move |g| (t, g)))
        .filter(|(t, g)| t != g)
        .collect();
    let chosen: Vec<(usize, usize)> = arcs.into_iter().filter(|_| rng.gen_bool(density)).collect();
    kb_on_arcs(rng, truth, &chosen)
}

/// Solves `max c·x` over `A x ≤ b`, `E x = f`, `x ≥ 0` by enumerating every
/// basic solution. `None` if infeasible. Only for a handful of variables.
pub fn vertex_max(c: &[f64], a: &[Vec<f64>], b: &[f64], e: &[Vec<f64>], f: &[f64]) -> Option<f64> {
    let n = c.len();
    // every constraint as a row with a flag for equality; x_j ≥ 0 as −x_j ≤ 0
    let mut rows: Vec<(Vec<f64>, f64, bool)> = Vec::new();
    for (r, &v) in e.iter().zip(f) {
        rows.push((r.clone(), v, true));
    }
    for (r, &v) in a.iter().zip(b) {
        rows.push((r.clone(), v, false));
    }
    for j in 0..n {
        let mut r = vec![0.0; n];
        r[j] = -1.0;
        rows.push((r, 0.0, false));
    }
    let n_eq = e.len();
    let optional: Vec<usize> = (n_eq..rows.len()).collect();
    let need = n.checked_sub(n_eq)?;
    let mut best: Option<f64> = None;
    for combo in combinations(&optional, need) {
        let mut active: Vec<usize> = (0..n_eq).collect();
        active.extend(combo);
        let m: Vec<Vec<f64>> = active.iter().map(|&i| rows[i].0.clone()).collect();
        let rhs: Vec<f64> = active.iter().map(|&i| rows[i].1).collect();
        let Some(x) = gauss(m, rhs) else { continue };
        let ok = rows.iter().all(|(r, v, eq)| {
            let lhs: f64 = r.iter().zip(&x).map(|(a, b)| a * b).sum();
            if *eq {
                (lhs - v).abs() <= 1e-9
            } else {
                lhs <= v + 1e-9
            }
        });
        if ok {
            let val: f64 = c.iter().zip(&x).map(|(a, b)| a * b).sum();
            best = Some(best.map_or(val, |b: f64| b.max(val)));
        }
    }
    best
}

fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if items.len() < k {
        return vec![];
    }
    let mut out = Vec::new();
    for (i, &first) in items.iter().enumerate() {
        for mut rest in combinations(&items[i + 1..], k - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Solves the square system `m x = rhs` by partial pivoting; `None` if singular.
fn gauss(mut m: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Option<Vec<f64>> {
    let n = rhs.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[piv][col].abs() < 1e-10 {
            return None;
        }
        m.swap(col, piv);
        rhs.swap(col, piv);
        for r in 0..n {
            if r != col {
                let f = m[r][col] / m[col][col];
                if f != 0.0 {
                    for k in col..n {
                        m[r][k] -= f * m[col][k];
                    }
                    rhs[r] -= f * rhs[col];
                }
            }
        }
    }
    Some((0..n).map(|i| rhs[i] / m[i][i]).collect())
}

/// The generalized Bayes candidate for every arc, with the arcs between
/// each pair removed before its longest paths are found.
pub fn bg_by_suppression(net: &Network) -> Vec<Vec<ProbInterval>> {
    let n = net.len();
    let weight = |i: usize, j: usize| {
        let num = net.bound(AtomId(i), AtomId(j)).lo();
        let den = net.bound(AtomId(j), AtomId(i)).hi();
        if num > 0.0 && den > 0.0 {
            num.ln() - den.ln()
        } else {
            f64::NEG_INFINITY
        }
    };
    // heaviest simple path by Bellman-Ford relaxation, skipping the pair
    let longest = |from: usize, to: usize, skip: (usize, usize)| {
        let mut d = vec![f64::NEG_INFINITY; n];
        d[from] = 0.0;
        for _ in 0..n {
            for i in 0..n {
                if d[i] == f64::NEG_INFINITY {
                    continue;
                }
                for j in 0..n {
                    if i == j || (i, j) == skip || (j, i) == skip {
                        continue;
                    }
                    let cand = d[i] + weight(i, j);
                    if cand > d[j] {
                        d[j] = cand;
                    }
                }
            }
        }
        d[to]
    };
    let mut out = vec![vec![ProbInterval::certain(); n]; n];
    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            let reverse = net.bound(AtomId(b), AtomId(a));
            let forward = longest(a, b, (a, b));
            let backward = longest(b, a, (a, b));
            let mut lo = if forward > f64::NEG_INFINITY {
                reverse.lo() * forward.exp()
            } else {
                0.0
            };
            let mut hi = if backward > f64::NEG_INFINITY {
                reverse.hi() * (-backward).exp()
            } else {
                1.0
            };
            let stored = net.bound(AtomId(a), AtomId(b));
            lo = lo.max(stored.lo());
            hi = hi.min(stored.hi()).min(1.0);
            out[a][b] = ProbInterval::new(lo.min(hi), hi).unwrap();
        }
    }
    out
}
