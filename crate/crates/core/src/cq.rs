//! Graphical terms as conjunctive queries.
//!
//! A term whose leaves are predicate names compiles to a regular formula
//! (existentials, conjunction, equality). Containment between two such terms
//! is decided by searching for a homomorphism between their canonical
//! structures.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::calculus::GraphicalTerm;
use crate::frc::{Context, TypeSym};
use crate::model::{pi_elements, Carriers, ModelError, Predicate};

/// A graphical term whose leaves are predicate names.
pub type NamedTerm = GraphicalTerm<String>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CqError {
    #[error("leaf {0} has no name")]
    UnnamedLeaf(usize),
    #[error("term has {found} leaf names for {expected} inner shells")]
    LeafCount { expected: usize, found: usize },
    #[error("predicate {name} is used on both {first} and {second}")]
    VocabularyMismatch {
        name: String,
        first: Context,
        second: Context,
    },
    #[error("terms have different outer shells {0} and {1}")]
    OuterMismatch(Context, Context),
    #[error("no interpretation given for predicate {0}")]
    MissingPredicate(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A formula of regular logic over named predicates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Formula {
    True,
    Atom { pred: String, args: Vec<String> },
    Eq(String, String),
    /// `∃x:s. true`.
    Inhabited(TypeSym),
    And(Vec<Formula>),
    Exists {
        var: String,
        ty: TypeSym,
        body: Box<Formula>,
    },
}

impl Formula {
    /// Truth under an assignment of atom indices to variables.
    pub fn holds(
        &self,
        env: &mut BTreeMap<String, u32>,
        carriers: &Carriers,
        interp: &BTreeMap<String, Predicate>,
    ) -> Result<bool, CqError> {
        Ok(match self {
            Formula::True => true,
            Formula::Atom { pred, args } => {
                let p = interp
                    .get(pred)
                    .ok_or_else(|| CqError::MissingPredicate(pred.clone()))?;
                let row: Vec<u32> = args.iter().map(|a| env[a]).collect();
                p.contains(&row)
            }
            Formula::Eq(a, b) => env[a] == env[b],
            Formula::Inhabited(s) => carriers.size(s)? > 0,
            Formula::And(parts) => {
                for part in parts {
                    if !part.holds(env, carriers, interp)? {
                        return Ok(false);
                    }
                }
                true
            }
            Formula::Exists { var, ty, body } => {
                let saved = env.get(var).copied();
                let mut found = false;
                for a in 0..carriers.size(ty)? as u32 {
                    env.insert(var.clone(), a);
                    if body.holds(env, carriers, interp)? {
                        found = true;
                        break;
                    }
                }
                match saved {
                    Some(v) => env.insert(var.clone(), v),
                    None => env.remove(var),
                };
                found
            }
        })
    }

    fn write_prec(&self, f: &mut fmt::Formatter<'_>, nested: bool) -> fmt::Result {
        match self {
            Formula::True => write!(f, "true"),
            Formula::Atom { pred, args } => write!(f, "{pred}({})", args.join(", ")),
            Formula::Eq(a, b) => write!(f, "{a} = {b}"),
            Formula::Inhabited(s) => write!(f, "inhabited({s})"),
            Formula::And(parts) if parts.is_empty() => write!(f, "true"),
            Formula::And(parts) => {
                if nested && parts.len() > 1 {
                    write!(f, "(")?;
                }
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        write!(f, " & ")?;
                    }
                    p.write_prec(f, true)?;
                }
                if nested && parts.len() > 1 {
                    write!(f, ")")?;
                }
                Ok(())
            }
            Formula::Exists { var, ty, body } => {
                write!(f, "exists {var}:{ty}. ")?;
                body.write_prec(f, false)
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_prec(f, false)
    }
}

/// A formula with its free variables, which correspond to the outer ports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Query {
    pub outer: Context,
    pub free: Vec<String>,
    pub body: Formula,
}

impl Query {
    /// The set of outer tuples satisfying the body, by direct enumeration.
    pub fn evaluate(
        &self,
        carriers: &Carriers,
        interp: &BTreeMap<String, Predicate>,
    ) -> Result<Predicate, CqError> {
        let mut rows = Vec::new();
        for t in pi_elements(&self.outer, carriers)? {
            let mut env = BTreeMap::new();
            let mut consistent = true;
            for (v, &a) in self.free.iter().zip(&t) {
                if let Some(&old) = env.get(v) {
                    consistent &= old == a;
                }
                env.insert(v.clone(), a);
            }
            if consistent && self.body.holds(&mut env, carriers, interp)? {
                rows.push(t);
            }
        }
        Ok(Predicate::new(self.outer.clone(), rows, carriers)?)
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (v, t)) in self.free.iter().zip(self.outer.ports()).enumerate() {
            write!(f, "{}{v}:{t}", if i > 0 { ", " } else { " " })?;
        }
        write!(f, " | {} }}", self.body)
    }
}

fn check_names(term: &NamedTerm) -> Result<(), CqError> {
    if term.leaves.len() != term.wiring.inner().len() {
        return Err(CqError::LeafCount {
            expected: term.wiring.inner().len(),
            found: term.leaves.len(),
        });
    }
    if let Some(i) = term.leaves.iter().position(String::is_empty) {
        return Err(CqError::UnnamedLeaf(i));
    }
    Ok(())
}

fn block_var(b: usize) -> String {
    format!("v{}", b + 1)
}

/// Support types of the wiring not carried by any block.
fn support_only(term: &NamedTerm) -> BTreeSet<TypeSym> {
    term.wiring.white_dot()
}

/// Compiles a named term to a formula.
///
/// Block `b` becomes variable `v<b>` (1-based). The first outer port in a
/// block uses the block variable; later outer ports in the same block get a
/// fresh `o<j>` and an equation. Blocks that miss the outer shell are
/// existentially bound, and each support type carried by no block becomes an
/// `inhabited` conjunct.
pub fn emit_formula(term: &NamedTerm) -> Result<Query, CqError> {
    check_names(term)?;
    let w = &term.wiring;
    let mut free = Vec::with_capacity(w.outer().arity());
    let mut seen = vec![false; w.num_blocks()];
    let mut equations = Vec::new();
    for (j, &b) in w.outer_assign().iter().enumerate() {
        if seen[b] {
            let v = format!("o{}", j + 1);
            equations.push(Formula::Eq(v.clone(), block_var(b)));
            free.push(v);
        } else {
            seen[b] = true;
            free.push(block_var(b));
        }
    }
    let mut conjuncts: Vec<Formula> = term
        .leaves
        .iter()
        .enumerate()
        .map(|(i, name)| Formula::Atom {
            pred: name.clone(),
            args: w.inner_assign(i).iter().map(|&b| block_var(b)).collect(),
        })
        .collect();
    conjuncts.extend(equations);
    conjuncts.extend(support_only(term).into_iter().map(Formula::Inhabited));
    let mut body = match conjuncts.len() {
        0 => Formula::True,
        1 => conjuncts.pop().unwrap(),
        _ => Formula::And(conjuncts),
    };
    for b in (0..w.num_blocks()).rev().filter(|&b| !seen[b]) {
        body = Formula::Exists {
            var: block_var(b),
            ty: w.block_types()[b].clone(),
            body: Box::new(body),
        };
    }
    Ok(Query {
        outer: w.outer().clone(),
        free,
        body,
    })
}

/// The frozen instance of a term: one element per block, one anonymous
/// element per support type carried by no block, one fact per leaf.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CanonicalStructure {
    /// Sort of each element; blocks come first, in normal-form order.
    pub sorts: Vec<TypeSym>,
    pub num_blocks: usize,
    pub facts: Vec<(String, Vec<usize>)>,
    pub distinguished: Vec<usize>,
}

impl CanonicalStructure {
    /// Variable-style name of an element: `v<b>` for blocks, `_<sort>` for
    /// anonymous elements.
    pub fn element_name(&self, e: usize) -> String {
        if e < self.num_blocks {
            block_var(e)
        } else {
            format!("_{}", self.sorts[e])
        }
    }
}

pub fn canonical_structure(term: &NamedTerm) -> Result<CanonicalStructure, CqError> {
    check_names(term)?;
    let w = &term.wiring;
    let mut sorts = w.block_types().to_vec();
    sorts.extend(support_only(term));
    let facts = term
        .leaves
        .iter()
        .enumerate()
        .map(|(i, name)| (name.clone(), w.inner_assign(i).to_vec()))
        .collect();
    Ok(CanonicalStructure {
        sorts,
        num_blocks: w.num_blocks(),
        facts,
        distinguished: w.outer_assign().to_vec(),
    })
}

/// The shell context each predicate name is used on, checking consistency.
pub fn vocabulary<'a>(terms: impl IntoIterator<Item = &'a NamedTerm>) -> Result<BTreeMap<String, Context>, CqError> {
    let mut vocab: BTreeMap<String, Context> = BTreeMap::new();
    for term in terms {
        check_names(term)?;
        for (name, shell) in term.leaves.iter().zip(term.wiring.inner()) {
            match vocab.get(name) {
                Some(prev) if prev != shell => {
                    return Err(CqError::VocabularyMismatch {
                        name: name.clone(),
                        first: prev.clone(),
                        second: shell.clone(),
                    })
                }
                Some(_) => {}
                None => {
                    vocab.insert(name.clone(), shell.clone());
                }
            }
        }
    }
    Ok(vocab)
}

/// A structure homomorphism from the canonical structure of the contained
/// term to that of the containing one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Homomorphism {
    pub map: Vec<usize>,
}

impl Homomorphism {
    pub fn render(&self, from: &CanonicalStructure, to: &CanonicalStructure) -> String {
        let parts: Vec<String> = self
            .map
            .iter()
            .enumerate()
            .map(|(e, &img)| format!("{} -> {}", from.element_name(e), to.element_name(img)))
            .collect();
        parts.join(", ")
    }
}

/// Decides `⟦t⟧ ⊢ ⟦t'⟧` in every model by searching for a homomorphism
/// `canonical(t') → canonical(t)` fixing the outer ports.
///
/// Elements of `t'` are assigned in index order and candidates tried in
/// index order, so the witness returned is the lexicographically least one.
pub fn contains(t: &NamedTerm, t_prime: &NamedTerm) -> Result<Option<Homomorphism>, CqError> {
    vocabulary([t, t_prime])?;
    if t.wiring.outer() != t_prime.wiring.outer() {
        return Err(CqError::OuterMismatch(
            t.wiring.outer().clone(),
            t_prime.wiring.outer().clone(),
        ));
    }
    let target = canonical_structure(t)?;
    let source = canonical_structure(t_prime)?;
    Ok(find_homomorphism(&source, &target).map(|map| Homomorphism { map }))
}

/// Backtracking search for a sort-, fact- and distinguished-tuple-preserving
/// map `source → target`.
pub fn find_homomorphism(source: &CanonicalStructure, target: &CanonicalStructure) -> Option<Vec<usize>> {
    let n = source.sorts.len();
    let mut candidates: Vec<Vec<usize>> = source
        .sorts
        .iter()
        .map(|s| (0..target.sorts.len()).filter(|&e| target.sorts[e] == *s).collect())
        .collect();
    for (&d_src, &d_tgt) in source.distinguished.iter().zip(&target.distinguished) {
        candidates[d_src].retain(|&e| e == d_tgt);
    }
    if candidates.iter().any(Vec::is_empty) {
        return None;
    }
    let mut target_facts: BTreeMap<&str, Vec<&[usize]>> = BTreeMap::new();
    for (name, args) in &target.facts {
        target_facts.entry(name.as_str()).or_default().push(args);
    }
    // a fact is checked once its last argument (in assignment order) is fixed
    let mut checks: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (k, (_, args)) in source.facts.iter().enumerate() {
        match args.iter().max() {
            Some(&last) => checks[last].push(k),
            None => {
                if !target_facts.contains_key(source.facts[k].0.as_str()) {
                    return None;
                }
            }
        }
    }
    let mut map = vec![usize::MAX; n];
    if search(0, source, &candidates, &checks, &target_facts, &mut map) {
        Some(map)
    } else {
        None
    }
}

fn search(
    e: usize,
    source: &CanonicalStructure,
    candidates: &[Vec<usize>],
    checks: &[Vec<usize>],
    target_facts: &BTreeMap<&str, Vec<&[usize]>>,
    map: &mut Vec<usize>,
) -> bool {
    if e == map.len() {
        return true;
    }
    for &c in &candidates[e] {
        map[e] = c;
        let ok = checks[e].iter().all(|&k| {
            let (name, args) = &source.facts[k];
            target_facts.get(name.as_str()).is_some_and(|facts| {
                facts
                    .iter()
                    .any(|f| f.iter().zip(args).all(|(&img, &a)| img == map[a]))
            })
        });
        if ok && search(e + 1, source, candidates, checks, target_facts, map) {
            return true;
        }
    }
    map[e] = usize::MAX;
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frb::{Port, Relation};
    use crate::frc::{ctx, ty};

    fn named(wiring: Relation, names: &[&str]) -> NamedTerm {
        GraphicalTerm::new(wiring, names.iter().map(|s| s.to_string()).collect()).unwrap()
    }

    #[test]
    fn closed_empty_term_is_true() {
        let t = named(Relation::identity(&Context::terminal()).substitute(0, &Relation::discard(&Context::terminal())).unwrap(), &[]);
        let q = emit_formula(&t).unwrap();
        assert_eq!(q.body, Formula::True);
        assert_eq!(q.to_string(), "{ | true }");
    }

    #[test]
    fn identity_term_formula_and_structure() {
        let g = ctx(&["x", "y"], &[]);
        let t = named(Relation::identity(&g), &["p"]);
        let q = emit_formula(&t).unwrap();
        assert_eq!(q.to_string(), "{ v1:x, v2:y | p(v1, v2) }");
        let c = canonical_structure(&t).unwrap();
        assert_eq!(c.sorts.len(), 2);
        assert_eq!(c.facts.len(), 1);
        assert_eq!(c.distinguished, vec![0, 1]);
    }

    #[test]
    fn support_only_annotation_becomes_inhabited() {
        let g = ctx(&["x"], &[]);
        let t = named(Relation::identity(&g).with_support([ty("s")]), &["p"]);
        let q = emit_formula(&t).unwrap();
        assert_eq!(q.body, Formula::And(vec![
            Formula::Atom { pred: "p".into(), args: vec!["v1".into()] },
            Formula::Inhabited(ty("s")),
        ]));
        assert_eq!(canonical_structure(&t).unwrap().sorts, vec![ty("x"), ty("s")]);
    }

    #[test]
    fn duplicate_outer_ports_get_equations() {
        let x = ctx(&["x"], &[]);
        let xx = ctx(&["x", "x"], &[]);
        let w = Relation::new(
            vec![x],
            xx,
            &[vec![Port::inner(0, 0), Port::outer(0), Port::outer(1)]],
            [],
        )
        .unwrap();
        let q = emit_formula(&named(w, &["p"])).unwrap();
        assert_eq!(q.to_string(), "{ v1:x, o2:x | p(v1) & o2 = v1 }");
    }

    #[test]
    fn self_containment_is_identity() {
        let g = ctx(&["x", "x"], &[]);
        let t = named(Relation::identity(&g), &["e"]);
        let h = contains(&t, &t).unwrap().unwrap();
        assert_eq!(h.map, vec![0, 1]);
    }

    #[test]
    fn joined_wire_is_contained_in_broken_wire() {
        let x = ctx(&["x"], &[]);
        let xx = ctx(&["x", "x"], &[]);
        let joined = Relation::new(
            vec![xx.clone()],
            x.clone(),
            &[vec![Port::inner(0, 0), Port::inner(0, 1), Port::outer(0)]],
            [],
        )
        .unwrap();
        let broken = Relation::new(
            vec![xx],
            x,
            &[vec![Port::inner(0, 0), Port::outer(0)], vec![Port::inner(0, 1)]],
            [],
        )
        .unwrap();
        let t = named(joined, &["e"]);
        let t2 = named(broken, &["e"]);
        assert!(contains(&t, &t2).unwrap().is_some());
        assert!(contains(&t2, &t).unwrap().is_none());
    }

    #[test]
    fn vocabulary_must_agree() {
        let t = named(Relation::identity(&ctx(&["x"], &[])), &["p"]);
        let t2 = named(Relation::identity(&ctx(&["y"], &[])), &["p"]);
        assert!(matches!(vocabulary([&t, &t2]), Err(CqError::VocabularyMismatch { .. })));
    }

    #[test]
    fn tensor_gives_disjoint_union() {
        let a = named(Relation::identity(&ctx(&["x"], &[])), &["p"]);
        let b = named(Relation::identity(&ctx(&["y", "y"], &[])), &["q"]);
        let ab = named(a.wiring.tensor(&b.wiring), &["p", "q"]);
        let ca = canonical_structure(&a).unwrap();
        let cb = canonical_structure(&b).unwrap();
        let cab = canonical_structure(&ab).unwrap();
        assert_eq!(cab.sorts.len(), ca.sorts.len() + cb.sorts.len());
        assert_eq!(cab.facts, vec![("p".to_string(), vec![0]), ("q".to_string(), vec![1, 2])]);
    }

    #[test]
    fn unnamed_leaf_is_rejected() {
        let t = named(Relation::identity(&ctx(&["x"], &[])), &[""]);
        assert_eq!(emit_formula(&t), Err(CqError::UnnamedLeaf(0)));
    }
}
