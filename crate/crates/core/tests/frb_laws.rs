mod common;

use std::collections::BTreeSet;

use common::*;
use proptest::prelude::*;
use rand::Rng;
use regulus::frb::all_relations;
use regulus::frc::ty;
use regulus::{Context, FrcMorphism, Relation};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn composition_is_associative_and_unital(seed in any::<u64>()) {
        let mut r = rng(seed);
        let cs: Vec<Context> = (0..4).map(|_| random_context(&mut r, 4)).collect();
        let a = random_relation(&mut r, &cs[0..1], &cs[1]);
        let b = random_relation(&mut r, &cs[1..2], &cs[2]);
        let c = random_relation(&mut r, &cs[2..3], &cs[3]);
        let left = a.compose(&b).unwrap().compose(&c).unwrap();
        let right = a.compose(&b.compose(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
        prop_assert_eq!(Relation::identity(&cs[0]).compose(&a).unwrap(), a.clone());
        prop_assert_eq!(a.compose(&Relation::identity(&cs[1])).unwrap(), a);
    }

    #[test]
    fn composition_is_monotone(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (g, d, e) = (random_context(&mut r, 3), random_context(&mut r, 3), random_context(&mut r, 3));
        let n = ports_of(&[g.clone()], &d).len();
        let coarse = random_labels(&mut r, n, 2);
        // Refining the labels breaks wires, so `lower ≤ upper`.
        let fine: Vec<usize> = coarse.iter().map(|&l| 2 * l + r.gen_range(0..2)).collect();
        let dropped = random_extra(&mut r);
        let lower = relation_from_labels(&[g.clone()], &d, &coarse, universe());
        let upper = relation_from_labels(&[g.clone()], &d, &fine, dropped);
        prop_assert!(lower.leq(&upper).unwrap());
        let next = random_relation(&mut r, &[d.clone()], &e);
        prop_assert!(lower.compose(&next).unwrap().leq(&upper.compose(&next).unwrap()).unwrap());
        let prev = random_relation(&mut r, &[e.clone()], &g);
        prop_assert!(prev.compose(&lower).unwrap().leq(&prev.compose(&upper).unwrap()).unwrap());
    }

    #[test]
    fn tensor_interchange(seed in any::<u64>()) {
        let mut r = rng(seed);
        let cs: Vec<Context> = (0..6).map(|_| random_context(&mut r, 2)).collect();
        let w1 = random_relation(&mut r, &cs[0..1], &cs[1]);
        let w2 = random_relation(&mut r, &cs[2..3], &cs[3]);
        let w3 = random_relation(&mut r, &cs[1..2], &cs[4]);
        let w4 = random_relation(&mut r, &cs[3..4], &cs[5]);
        let lhs = w1.tensor(&w2).flatten_inner().compose(&w3.tensor(&w4).flatten_inner()).unwrap();
        let rhs = w1.compose(&w3).unwrap().tensor(&w2.compose(&w4).unwrap()).flatten_inner();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn braiding_is_involutive(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (a, b) = (random_context(&mut r, 3), random_context(&mut r, 3));
        let there = Relation::graph(&FrcMorphism::braiding(&a, &b));
        let back = Relation::graph(&FrcMorphism::braiding(&b, &a));
        prop_assert_eq!(there.compose(&back).unwrap(), Relation::identity(&a.oplus(&b)));
    }

    #[test]
    fn transpose_reverses_composition(seed in any::<u64>()) {
        let mut r = rng(seed);
        let cs: Vec<Context> = (0..3).map(|_| random_context(&mut r, 3)).collect();
        let a = random_relation(&mut r, &cs[0..1], &cs[1]);
        let b = random_relation(&mut r, &cs[1..2], &cs[2]);
        let lhs = a.compose(&b).unwrap().transpose().unwrap();
        let rhs = b.transpose().unwrap().compose(&a.transpose().unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(a.transpose().unwrap().transpose().unwrap(), a);
    }

    #[test]
    fn graph_is_functorial_and_left_adjoint(seed in any::<u64>()) {
        let mut r = rng(seed);
        let src = random_context(&mut r, 3);
        let f = random_morphism(&mut r, &src, 3);
        let g = random_morphism(&mut r, f.dst(), 3);
        let composite = Relation::graph(&f).compose(&Relation::graph(&g)).unwrap();
        prop_assert_eq!(composite, Relation::graph(&f.then(&g).unwrap()));
        prop_assert_eq!(Relation::graph(&f).transpose().unwrap(), Relation::cograph(&f));
        let unit = Relation::graph(&f).compose(&Relation::cograph(&f)).unwrap();
        prop_assert!(Relation::identity(f.src()).leq(&unit).unwrap());
        let counit = Relation::cograph(&f).compose(&Relation::graph(&f)).unwrap();
        prop_assert!(counit.leq(&Relation::identity(f.dst())).unwrap());
        prop_assert_eq!(Relation::graph(&f).as_graph(), Some(f));
    }

    #[test]
    fn span_decomposition_recomposes(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (a, b) = (random_context(&mut r, 4), random_context(&mut r, 4));
        let w = random_relation(&mut r, &[a.clone()], &b);
        let (g, f) = w.span_decompose();
        prop_assert_eq!(g.src().arity(), w.num_blocks());
        prop_assert_eq!(Relation::cograph(&g).compose(&Relation::graph(&f)).unwrap(), w);
    }

    #[test]
    fn substitution_agrees_with_tensor_then_compose(seed in any::<u64>()) {
        let mut r = rng(seed);
        let k = r.gen_range(1..4);
        let shells: Vec<Context> = (0..k).map(|_| random_context(&mut r, 2)).collect();
        let outer = random_context(&mut r, 3);
        let w = random_relation(&mut r, &shells, &outer);
        let slot = r.gen_range(0..k);
        let plug_inner: Vec<Context> = (0..r.gen_range(0..3)).map(|_| random_context(&mut r, 2)).collect();
        let plug = random_relation(&mut r, &plug_inner, &shells[slot]);
        let nested = w.substitute(slot, &plug).unwrap();

        let mut spread = Relation::new(vec![], Context::terminal(), &[], []).unwrap();
        for (i, c) in shells.iter().enumerate() {
            let piece = if i == slot { plug.clone() } else { Relation::identity(c) };
            spread = spread.tensor(&piece);
        }
        let flat = spread.compose(&w.flatten_inner()).unwrap();
        prop_assert_eq!(nested, flat);
    }
}

#[test]
fn leq_is_a_partial_order_on_small_hom_sets() {
    let universe: BTreeSet<_> = [ty("x"), ty("s")].into_iter().collect();
    let x = Context::new(vec![ty("x")], []);
    let xx = x.oplus(&x);
    let rels = all_relations(&[xx.clone()], &xx, &universe);
    // Bell(4) partitions, each with or without the floating `s`.
    assert_eq!(rels.len(), 15 * 2);
    for a in &rels {
        assert!(a.leq(a).unwrap());
        for b in &rels {
            let ab = a.leq(b).unwrap();
            if ab && b.leq(a).unwrap() {
                assert_eq!(a, b);
            }
            if !ab {
                continue;
            }
            for c in &rels {
                if b.leq(c).unwrap() {
                    assert!(a.leq(c).unwrap());
                }
            }
        }
    }
}
