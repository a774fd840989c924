mod common;

use common::{atoms, bg_by_suppression, random_kb, rng, Truth};
use probsyl::rules::{bg_tighten, qs_sweep};
use probsyl::{exact_bounds, saturate, AtomId, Network, OracleOptions, ProbInterval, QueryExpr, SaturationOptions};
use rand::seq::SliceRandom;
use rand::Rng;

#[test]
fn all_pairs_paths_match_per_pair_suppression() {
    let mut rng = rng(7);
    for case in 0..60 {
        let n = 4 + case % 3;
        let truth = Truth::random(&mut rng, n);
        let mut net = random_kb(&mut rng, &truth, 0.6);
        // a QS sweep first gives BG a denser graph to work on
        qs_sweep(&mut net, 1e-9, 1).unwrap();
        let expected = bg_by_suppression(&net);
        bg_tighten(&mut net, 0.0, 1).unwrap();
        for a in 0..n {
            for b in 0..n {
                let got = net.bound(AtomId(a), AtomId(b));
                assert!(
                    got.distance(&expected[a][b]) <= 1e-12,
                    "case {case} arc ({a}|{b}): {got} vs {}",
                    expected[a][b]
                );
            }
        }
    }
}

fn permuted(net: &Network, order: &[usize]) -> Network {
    let mut out = Network::new();
    for &k in order {
        out.add_atom(net.name(AtomId(k))).unwrap();
    }
    for t in net.ids() {
        for g in net.ids() {
            if t != g {
                let (pt, pg) = (out.lookup(net.name(t)).unwrap(), out.lookup(net.name(g)).unwrap());
                out.constrain(pt, pg, net.bound(t, g)).unwrap();
            }
        }
    }
    out
}

#[test]
fn atom_order_does_not_change_the_fixpoint() {
    let mut rng = rng(11);
    let opts = SaturationOptions::default();
    for _ in 0..30 {
        let n = rng.gen_range(3..=5);
        let truth = Truth::random(&mut rng, n);
        let base = random_kb(&mut rng, &truth, 0.5);
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        let mut a = base.clone();
        let mut b = permuted(&base, &order);
        assert!(saturate(&mut a, &opts).is_saturated());
        assert!(saturate(&mut b, &opts).is_saturated());
        for t in a.ids() {
            for g in a.ids() {
                let (pt, pg) = (b.lookup(a.name(t)).unwrap(), b.lookup(a.name(g)).unwrap());
                let (x, y) = (a.bound(t, g), b.bound(pt, pg));
                assert!(x.distance(&y) <= 1e-6, "{x} vs {y}");
            }
        }
    }
}

#[test]
fn saturating_twice_changes_nothing() {
    let mut rng = rng(13);
    let opts = SaturationOptions::default();
    for _ in 0..30 {
        let n = rng.gen_range(3..=6);
        let truth = Truth::random(&mut rng, n);
        let mut net = random_kb(&mut rng, &truth, 0.5);
        assert!(saturate(&mut net, &opts).is_saturated());
        let again = saturate(&mut net, &opts);
        assert!(again.is_saturated());
        assert_eq!(again.changed_arcs, 0);
    }
}

#[test]
fn tighter_inputs_give_tighter_outputs() {
    let mut rng = rng(17);
    let opts = SaturationOptions::default();
    for _ in 0..30 {
        let n = rng.gen_range(3..=5);
        let truth = Truth::random(&mut rng, n);
        let loose = random_kb(&mut rng, &truth, 0.5);
        // shrink every interval halfway toward the true value
        let mut tight = loose.clone();
        for t in 0..n {
            for g in 0..n {
                if t != g {
                    let iv = loose.bound(AtomId(t), AtomId(g));
                    let v = truth.cond(t, g);
                    let shrunk = ProbInterval::new((iv.lo() + v) / 2.0, (iv.hi() + v) / 2.0).unwrap();
                    tight.constrain(AtomId(t), AtomId(g), shrunk).unwrap();
                }
            }
        }
        let mut loose = loose;
        assert!(saturate(&mut loose, &opts).is_saturated());
        assert!(saturate(&mut tight, &opts).is_saturated());
        for t in loose.ids() {
            for g in loose.ids() {
                assert!(loose.bound(t, g).contains_within(&tight.bound(t, g), 1e-9));
            }
        }
    }
}

#[test]
fn saturated_bounds_contain_the_generating_distribution() {
    let mut rng = rng(19);
    let opts = SaturationOptions::default();
    for _ in 0..50 {
        let n = rng.gen_range(3..=6);
        let truth = Truth::random(&mut rng, n);
        let mut net = random_kb(&mut rng, &truth, 0.7);
        assert!(saturate(&mut net, &opts).is_saturated());
        for t in 0..n {
            for g in 0..n {
                if t != g {
                    let iv = net.bound(AtomId(t), AtomId(g));
                    let v = truth.cond(t, g);
                    assert!(iv.lo() <= v + 1e-9 && v <= iv.hi() + 1e-9, "{iv} misses {v}");
                }
            }
        }
    }
}

#[test]
fn empty_kb_stays_vacuous() {
    let mut net = atoms(4);
    let report = saturate(&mut net, &SaturationOptions::default());
    assert!(report.is_saturated());
    assert_eq!(report.changed_arcs, 0);
    let exact = exact_bounds(
        &net,
        &QueryExpr::atomic(AtomId(0), AtomId(1)),
        &OracleOptions::default(),
    )
    .unwrap();
    assert!(exact.width() > 1.0 - 1e-6);
}
