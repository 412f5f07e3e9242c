//! Random generators shared by the property tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use regulus::frc::ty;
use regulus::{Context, FrcMorphism, Port, Relation, TypeSym};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn universe() -> Vec<TypeSym> {
    vec![ty("x"), ty("y"), ty("s")]
}

pub fn random_context(rng: &mut ChaCha8Rng, max_ports: usize) -> Context {
    let port_types = [ty("x"), ty("y")];
    let n = rng.gen_range(0..=max_ports);
    let ports: Vec<TypeSym> = (0..n).map(|_| port_types.choose(rng).unwrap().clone()).collect();
    let extra: Vec<TypeSym> = universe().into_iter().filter(|_| rng.gen_bool(0.25)).collect();
    Context::new(ports, extra)
}

pub fn ports_of(inner: &[Context], outer: &Context) -> Vec<(Port, TypeSym)> {
    let mut out = Vec::new();
    for (i, c) in inner.iter().enumerate() {
        for (j, t) in c.ports().iter().enumerate() {
            out.push((Port::inner(i, j), t.clone()));
        }
    }
    for (j, t) in outer.ports().iter().enumerate() {
        out.push((Port::outer(j), t.clone()));
    }
    out
}

/// Groups ports by `(type, label)` into blocks.
pub fn relation_from_labels(
    inner: &[Context],
    outer: &Context,
    labels: &[usize],
    extra: impl IntoIterator<Item = TypeSym>,
) -> Relation {
    let mut groups: BTreeMap<(TypeSym, usize), Vec<Port>> = BTreeMap::new();
    for ((port, t), &l) in ports_of(inner, outer).into_iter().zip(labels) {
        groups.entry((t, l)).or_default().push(port);
    }
    let blocks: Vec<Vec<Port>> = groups.into_values().collect();
    Relation::new(inner.to_vec(), outer.clone(), &blocks, extra).unwrap()
}

pub fn random_labels(rng: &mut ChaCha8Rng, n: usize, spread: usize) -> Vec<usize> {
    (0..n).map(|_| rng.gen_range(0..spread)).collect()
}

pub fn random_extra(rng: &mut ChaCha8Rng) -> Vec<TypeSym> {
    universe().into_iter().filter(|_| rng.gen_bool(0.2)).collect()
}

pub fn random_relation(rng: &mut ChaCha8Rng, inner: &[Context], outer: &Context) -> Relation {
    let n = ports_of(inner, outer).len();
    let labels = random_labels(rng, n, 3);
    let extra = random_extra(rng);
    relation_from_labels(inner, outer, &labels, extra)
}

/// A random morphism of contexts out of `src`.
pub fn random_morphism(rng: &mut ChaCha8Rng, src: &Context, max_ports: usize) -> FrcMorphism {
    let n = if src.arity() == 0 { 0 } else { rng.gen_range(0..=max_ports) };
    let assign: Vec<usize> = (0..n).map(|_| rng.gen_range(0..src.arity())).collect();
    let ports: Vec<TypeSym> = assign.iter().map(|&i| src.port(i).clone()).collect();
    let extra: Vec<TypeSym> = src.support().iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
    let dst = Context::new(ports, extra);
    FrcMorphism::new(src.clone(), dst, assign).unwrap()
}

use regulus::model::{pi_elements, Carriers, FiniteSetModel, Predicate};

pub fn random_carriers(rng: &mut ChaCha8Rng, max: usize) -> Carriers {
    let sizes: Vec<(TypeSym, usize)> = universe().into_iter().map(|t| (t, rng.gen_range(0..=max))).collect();
    Carriers::of_sizes(sizes.iter().map(|(t, n)| (t, *n)))
}

pub fn random_predicate(rng: &mut ChaCha8Rng, model: &FiniteSetModel, ctx: &Context) -> Predicate {
    let rows: Vec<Vec<u32>> = pi_elements(ctx, model.carriers())
        .unwrap()
        .into_iter()
        .filter(|_| rng.gen_bool(0.5))
        .collect();
    model.predicate(ctx, rows).unwrap()
}
