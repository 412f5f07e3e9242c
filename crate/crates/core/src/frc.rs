//! The free regular category on a set of type symbols.
//!
//! Objects are [`Context`]s: a list of typed ports together with a finite
//! support set containing every port type. A morphism `Γ → Γ'` is a function
//! from the ports of `Γ'` back to the ports of `Γ` that preserves types, with
//! the support of `Γ'` contained in the support of `Γ`. Finite limits and
//! image factorizations are computed directly on this combinatorial data.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::uf::{renumber_by_first_occurrence, DisjointSets};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrcError {
    #[error("invalid type name {0:?}: expected a nonempty string over [A-Za-z0-9_]")]
    InvalidTypeName(String),
    #[error("type mismatch at target port {port}: expected {expected}, found {found}")]
    TypeMismatch {
        port: usize,
        expected: TypeSym,
        found: TypeSym,
    },
    #[error("support violation: {missing} is in the target support but not the source support")]
    SupportViolation { missing: TypeSym },
    #[error("port index {index} out of range for a context with {len} ports")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("assignment has {found} entries, target context has {expected} ports")]
    ArityMismatch { expected: usize, found: usize },
    #[error("object mismatch: {0}")]
    ObjectMismatch(String),
}

/// A type symbol. Equality and order are by name.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct TypeSym(Arc<str>);

impl TypeSym {
    pub fn new(name: &str) -> Result<Self, FrcError> {
        if name.is_empty()
            || !name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '_')
        {
            return Err(FrcError::InvalidTypeName(name.to_string()));
        }
        Ok(TypeSym(Arc::from(name)))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl FromStr for TypeSym {
    type Err = FrcError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TypeSym::new(s)
    }
}

impl TryFrom<String> for TypeSym {
    type Error = FrcError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        TypeSym::new(&s)
    }
}

impl From<TypeSym> for String {
    fn from(t: TypeSym) -> String {
        t.0.to_string()
    }
}

impl fmt::Debug for TypeSym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for TypeSym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// An object `(n, S, τ)` of the free regular category.
///
/// The support is stored in full (including the port types); the part drawn
/// as a white dot is [`Context::white_dot`].
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Context {
    ports: Vec<TypeSym>,
    support: BTreeSet<TypeSym>,
}

impl Context {
    pub fn new(ports: Vec<TypeSym>, extra_support: impl IntoIterator<Item = TypeSym>) -> Self {
        let mut support: BTreeSet<TypeSym> = extra_support.into_iter().collect();
        support.extend(ports.iter().cloned());
        Context { ports, support }
    }

    /// The terminal context `0`: no ports, empty support.
    pub fn terminal() -> Self {
        Context::default()
    }

    /// The unary context `⟨t⟩`.
    pub fn unary(t: TypeSym) -> Self {
        Context::new(vec![t], [])
    }

    /// The support context `Supp(t)`: no ports, support `{t}`.
    pub fn support_of(t: TypeSym) -> Self {
        Context::new(vec![], [t])
    }

    pub fn arity(&self) -> usize {
        self.ports.len()
    }

    pub fn ports(&self) -> &[TypeSym] {
        &self.ports
    }

    pub fn port(&self, i: usize) -> &TypeSym {
        &self.ports[i]
    }

    pub fn support(&self) -> &BTreeSet<TypeSym> {
        &self.support
    }

    /// Support elements not carried by any port.
    pub fn white_dot(&self) -> BTreeSet<TypeSym> {
        let used: BTreeSet<&TypeSym> = self.ports.iter().collect();
        self.support
            .iter()
            .filter(|s| !used.contains(s))
            .cloned()
            .collect()
    }

    /// The product `Γ ⊕ Γ'`: ports concatenated, supports united.
    pub fn oplus(&self, other: &Context) -> Context {
        let mut ports = self.ports.clone();
        ports.extend(other.ports.iter().cloned());
        let support = self.support.union(&other.support).cloned().collect();
        Context { ports, support }
    }

    pub fn oplus_all<'a>(parts: impl IntoIterator<Item = &'a Context>) -> Context {
        parts
            .into_iter()
            .fold(Context::terminal(), |acc, c| acc.oplus(c))
    }

    /// Maps every type through `f`, as the induced functor between free regular categories does.
    pub fn map_types(&self, f: impl Fn(&TypeSym) -> TypeSym) -> Context {
        Context {
            ports: self.ports.iter().map(&f).collect(),
            support: self.support.iter().map(&f).collect(),
        }
    }
}

impl Default for Context {
    fn default() -> Self {
        Context {
            ports: Vec::new(),
            support: BTreeSet::new(),
        }
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, t) in self.ports.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{t}")?;
        }
        let extra = self.white_dot();
        if !extra.is_empty() {
            write!(f, " |")?;
            for (i, t) in extra.iter().enumerate() {
                write!(f, "{}{t}", if i > 0 { ", " } else { " " })?;
            }
        }
        write!(f, "]")
    }
}

impl fmt::Debug for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A morphism `src → dst`, stored contravariantly as `assign: ports(dst) → ports(src)`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FrcMorphism {
    src: Context,
    dst: Context,
    assign: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MorphismClass {
    Mono,
    RegEpi,
    Both,
    Neither,
}

impl MorphismClass {
    pub fn is_mono(self) -> bool {
        matches!(self, MorphismClass::Mono | MorphismClass::Both)
    }

    pub fn is_reg_epi(self) -> bool {
        matches!(self, MorphismClass::RegEpi | MorphismClass::Both)
    }
}

impl FrcMorphism {
    /// Validates an assignment (0-based port indices) into a morphism.
    pub fn new(src: Context, dst: Context, assign: Vec<usize>) -> Result<Self, FrcError> {
        if assign.len() != dst.arity() {
            return Err(FrcError::ArityMismatch {
                expected: dst.arity(),
                found: assign.len(),
            });
        }
        for (j, &i) in assign.iter().enumerate() {
            if i >= src.arity() {
                return Err(FrcError::IndexOutOfRange {
                    index: i,
                    len: src.arity(),
                });
            }
            if src.ports[i] != dst.ports[j] {
                return Err(FrcError::TypeMismatch {
                    port: j,
                    expected: dst.ports[j].clone(),
                    found: src.ports[i].clone(),
                });
            }
        }
        if let Some(missing) = dst.support.difference(&src.support).next() {
            return Err(FrcError::SupportViolation {
                missing: missing.clone(),
            });
        }
        Ok(FrcMorphism { src, dst, assign })
    }

    pub(crate) fn new_unchecked(src: Context, dst: Context, assign: Vec<usize>) -> Self {
        debug_assert!(FrcMorphism::new(src.clone(), dst.clone(), assign.clone()).is_ok());
        FrcMorphism { src, dst, assign }
    }

    pub fn src(&self) -> &Context {
        &self.src
    }

    pub fn dst(&self) -> &Context {
        &self.dst
    }

    pub fn assign(&self) -> &[usize] {
        &self.assign
    }

    pub fn identity(ctx: &Context) -> Self {
        FrcMorphism::new_unchecked(ctx.clone(), ctx.clone(), (0..ctx.arity()).collect())
    }

    /// The unique map `ε: Γ → 0`.
    pub fn to_terminal(ctx: &Context) -> Self {
        FrcMorphism::new_unchecked(ctx.clone(), Context::terminal(), vec![])
    }

    /// The diagonal `δ: Γ → Γ ⊕ Γ`.
    pub fn diagonal(ctx: &Context) -> Self {
        let n = ctx.arity();
        FrcMorphism::new_unchecked(ctx.clone(), ctx.oplus(ctx), (0..2 * n).map(|j| j % n).collect())
    }

    /// `π₁: Γ₁ ⊕ Γ₂ → Γ₁`.
    pub fn projection1(a: &Context, b: &Context) -> Self {
        FrcMorphism::new_unchecked(a.oplus(b), a.clone(), (0..a.arity()).collect())
    }

    /// `π₂: Γ₁ ⊕ Γ₂ → Γ₂`.
    pub fn projection2(a: &Context, b: &Context) -> Self {
        let n = a.arity();
        FrcMorphism::new_unchecked(a.oplus(b), b.clone(), (n..n + b.arity()).collect())
    }

    /// The symmetry `σ: Γ₁ ⊕ Γ₂ → Γ₂ ⊕ Γ₁`.
    pub fn braiding(a: &Context, b: &Context) -> Self {
        let (n, m) = (a.arity(), b.arity());
        let assign = (0..m).map(|j| n + j).chain(0..n).collect();
        FrcMorphism::new_unchecked(a.oplus(b), b.oplus(a), assign)
    }

    /// Diagrammatic composite `self ; g`.
    pub fn then(&self, g: &FrcMorphism) -> Result<FrcMorphism, FrcError> {
        if self.dst != g.src {
            return Err(FrcError::ObjectMismatch(format!(
                "cannot compose {} → {} with {} → {}",
                self.src, self.dst, g.src, g.dst
            )));
        }
        let assign = g.assign.iter().map(|&j| self.assign[j]).collect();
        Ok(FrcMorphism::new_unchecked(
            self.src.clone(),
            g.dst.clone(),
            assign,
        ))
    }

    /// Pairing `⟨f, g⟩: Δ → Γ₁ ⊕ Γ₂`.
    pub fn pair(f: &FrcMorphism, g: &FrcMorphism) -> Result<FrcMorphism, FrcError> {
        if f.src != g.src {
            return Err(FrcError::ObjectMismatch(format!(
                "pairing needs a common domain, got {} and {}",
                f.src, g.src
            )));
        }
        let mut assign = f.assign.clone();
        assign.extend(g.assign.iter().copied());
        Ok(FrcMorphism::new_unchecked(
            f.src.clone(),
            f.dst.oplus(&g.dst),
            assign,
        ))
    }

    /// `f ⊕ g: Γ₁ ⊕ Γ₂ → Γ₁' ⊕ Γ₂'`.
    pub fn tensor(f: &FrcMorphism, g: &FrcMorphism) -> FrcMorphism {
        let n = f.src.arity();
        let mut assign = f.assign.clone();
        assign.extend(g.assign.iter().map(|&i| n + i));
        FrcMorphism::new_unchecked(f.src.oplus(&g.src), f.dst.oplus(&g.dst), assign)
    }

    /// Monic iff the assignment is surjective; regular epic iff it is
    /// injective and the supports agree.
    pub fn class(&self) -> MorphismClass {
        let mut hit = vec![false; self.src.arity()];
        let mut injective = true;
        for &i in &self.assign {
            if hit[i] {
                injective = false;
            }
            hit[i] = true;
        }
        let mono = hit.iter().all(|&h| h);
        let reg_epi = injective && self.src.support == self.dst.support;
        match (mono, reg_epi) {
            (true, true) => MorphismClass::Both,
            (true, false) => MorphismClass::Mono,
            (false, true) => MorphismClass::RegEpi,
            (false, false) => MorphismClass::Neither,
        }
    }

    /// Factors `self` as a regular epi followed by a mono.
    ///
    /// The image keeps the source ports hit by the assignment, in source
    /// order, together with the full source support.
    pub fn image_factorize(&self) -> ImageFactorization {
        let mut hit = vec![false; self.src.arity()];
        for &i in &self.assign {
            hit[i] = true;
        }
        let range: Vec<usize> = (0..self.src.arity()).filter(|&i| hit[i]).collect();
        let mut position = vec![usize::MAX; self.src.arity()];
        for (k, &i) in range.iter().enumerate() {
            position[i] = k;
        }
        let image = Context {
            ports: range.iter().map(|&i| self.src.ports[i].clone()).collect(),
            support: self.src.support.clone(),
        };
        let epi = FrcMorphism::new_unchecked(self.src.clone(), image.clone(), range);
        let mono = FrcMorphism::new_unchecked(
            image.clone(),
            self.dst.clone(),
            self.assign.iter().map(|&i| position[i]).collect(),
        );
        ImageFactorization { image, epi, mono }
    }
}

impl fmt::Display for FrcMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {} : (", self.src, self.dst)?;
        for (k, i) in self.assign.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", i + 1)?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for FrcMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageFactorization {
    pub image: Context,
    pub epi: FrcMorphism,
    pub mono: FrcMorphism,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Product {
    pub apex: Context,
    pub pi1: FrcMorphism,
    pub pi2: FrcMorphism,
}

pub fn product(a: &Context, b: &Context) -> Product {
    Product {
        apex: a.oplus(b),
        pi1: FrcMorphism::projection1(a, b),
        pi2: FrcMorphism::projection2(a, b),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pullback {
    pub apex: Context,
    pub leg1: FrcMorphism,
    pub leg2: FrcMorphism,
}

/// Pullback of a cospan `Γ₁ → Γ ← Γ₂`, computed as a pushout of port sets.
///
/// Apex ports are the classes of `ports(Γ₁) ⊔ ports(Γ₂)` under
/// `f1(i) ~ f2(i)`, ordered by their least member (Γ₁ ports first).
pub fn pullback(f1: &FrcMorphism, f2: &FrcMorphism) -> Result<Pullback, FrcError> {
    if f1.dst != f2.dst {
        return Err(FrcError::ObjectMismatch(format!(
            "pullback needs a common codomain, got {} and {}",
            f1.dst, f2.dst
        )));
    }
    let n1 = f1.src.arity();
    let n2 = f2.src.arity();
    let mut ds = DisjointSets::new(n1 + n2);
    for (a, b) in f1.assign.iter().zip(&f2.assign) {
        ds.union(*a, n1 + *b);
    }
    let roots: Vec<usize> = (0..n1 + n2).map(|p| ds.find(p)).collect();
    let (class_of, n_classes) = renumber_by_first_occurrence(&roots);
    let mut ports: Vec<Option<TypeSym>> = vec![None; n_classes];
    for (p, &c) in class_of.iter().enumerate() {
        if ports[c].is_none() {
            let t = if p < n1 {
                &f1.src.ports[p]
            } else {
                &f2.src.ports[p - n1]
            };
            ports[c] = Some(t.clone());
        }
    }
    let apex = Context {
        ports: ports.into_iter().map(|t| t.expect("every class has a member")).collect(),
        support: f1.src.support.union(&f2.src.support).cloned().collect(),
    };
    let leg1 = FrcMorphism::new_unchecked(apex.clone(), f1.src.clone(), class_of[..n1].to_vec());
    let leg2 = FrcMorphism::new_unchecked(apex.clone(), f2.src.clone(), class_of[n1..].to_vec());
    Ok(Pullback { apex, leg1, leg2 })
}

/// Shorthand for building type symbols in tests and fixtures.
///
/// # Panics
/// Panics if `name` is not a valid type name.
pub fn ty(name: &str) -> TypeSym {
    TypeSym::new(name).expect("valid type name")
}

/// Builds a context from type names; panics on invalid names.
pub fn ctx(ports: &[&str], extra: &[&str]) -> Context {
    Context::new(
        ports.iter().map(|p| ty(p)).collect(),
        extra.iter().map(|p| ty(p)),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn context_support_contains_ports() {
        let g = ctx(&["y", "z", "y"], &["w", "x"]);
        assert_eq!(g.arity(), 3);
        let s: Vec<&str> = g.support().iter().map(|t| t.name()).collect();
        assert_eq!(s, ["w", "x", "y", "z"]);
        let wd: Vec<String> = g.white_dot().iter().map(|t| t.to_string()).collect();
        assert_eq!(wd, ["w", "x"]);
    }

    #[test]
    fn empty_and_unary_contexts() {
        assert_eq!(ctx(&[], &[]), Context::terminal());
        let u = ctx(&["x"], &[]);
        assert_eq!(u, Context::unary(ty("x")));
        assert_eq!(u.support().len(), 1);
    }

    #[test]
    fn type_names_are_validated() {
        assert!(TypeSym::new("").is_err());
        assert!(TypeSym::new("a-b").is_err());
        assert!(TypeSym::new("a_B9").is_ok());
    }

    #[test]
    fn diagonal_is_valid_and_mismatch_rejected() {
        let x = ctx(&["x"], &[]);
        let d = FrcMorphism::new(x.clone(), x.oplus(&x), vec![0, 0]).unwrap();
        assert_eq!(d, FrcMorphism::diagonal(&x));
        let y = ctx(&["y"], &[]);
        assert!(matches!(
            FrcMorphism::new(x, y, vec![0]),
            Err(FrcError::TypeMismatch { .. })
        ));
    }

    #[test]
    fn support_violation_and_range_errors() {
        let x = ctx(&["x"], &[]);
        assert!(matches!(
            FrcMorphism::new(Context::terminal(), Context::support_of(ty("x")), vec![]),
            Err(FrcError::SupportViolation { .. })
        ));
        assert!(matches!(
            FrcMorphism::new(x.clone(), x.clone(), vec![3]),
            Err(FrcError::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            FrcMorphism::new(x.clone(), x, vec![]),
            Err(FrcError::ArityMismatch { .. })
        ));
    }

    #[test]
    fn support_context_to_terminal_is_mono_only() {
        let m = FrcMorphism::new(Context::support_of(ty("x")), Context::terminal(), vec![]).unwrap();
        assert_eq!(m.class(), MorphismClass::Mono);
    }

    #[test]
    fn diagonal_then_projection_is_identity() {
        let x = ctx(&["x"], &[]);
        let d = FrcMorphism::diagonal(&x);
        let p = FrcMorphism::projection1(&x, &x);
        assert_eq!(d.then(&p).unwrap(), FrcMorphism::identity(&x));
        assert_eq!(d.then(&p).unwrap().assign(), &[0]);
    }

    #[test]
    fn composition_checks_objects() {
        let x = ctx(&["x"], &[]);
        let y = ctx(&["y"], &[]);
        let e = FrcMorphism::identity(&x).then(&FrcMorphism::identity(&y));
        assert!(matches!(e, Err(FrcError::ObjectMismatch(_))));
    }

    #[test]
    fn product_clauses() {
        let x = ctx(&["x"], &[]);
        let y = ctx(&["y"], &[]);
        let p = product(&x, &y);
        assert_eq!(p.apex, ctx(&["x", "y"], &[]));
        let g = ctx(&["y", "z"], &["w"]);
        assert_eq!(product(&g, &Context::terminal()).apex, g);
        let s = Context::support_of(ty("x"));
        assert_eq!(s.oplus(&s), s);
    }

    #[test]
    fn pullback_over_terminal_is_product() {
        let a = ctx(&["x", "y"], &[]);
        let b = ctx(&["x"], &["z"]);
        let pb = pullback(&FrcMorphism::to_terminal(&a), &FrcMorphism::to_terminal(&b)).unwrap();
        assert_eq!(pb.apex, a.oplus(&b));
        assert_eq!(pb.leg1, FrcMorphism::projection1(&a, &b));
        assert_eq!(pb.leg2, FrcMorphism::projection2(&a, &b));
    }

    #[test]
    fn pullback_of_identities() {
        let g = ctx(&["x", "y"], &["w"]);
        let id = FrcMorphism::identity(&g);
        let pb = pullback(&id, &id).unwrap();
        assert_eq!(pb.apex, g);
        assert_eq!(pb.leg1, id);
        assert_eq!(pb.leg2, id);
    }

    #[test]
    fn pullback_of_diagonal_against_itself() {
        let x = ctx(&["x"], &[]);
        let d = FrcMorphism::diagonal(&x);
        let pb = pullback(&d, &d).unwrap();
        assert_eq!(pb.apex.arity(), 1);
        assert_eq!(pb.leg1.assign(), &[0]);
        assert_eq!(pb.leg2.assign(), &[0]);
    }

    #[test]
    fn classification_examples() {
        let x = ctx(&["x"], &[]);
        assert_eq!(FrcMorphism::diagonal(&x).class(), MorphismClass::Mono);
        let to_supp = FrcMorphism::new(x.clone(), Context::support_of(ty("x")), vec![]).unwrap();
        assert_eq!(to_supp.class(), MorphismClass::RegEpi);
        assert_eq!(FrcMorphism::identity(&x).class(), MorphismClass::Both);
        assert_eq!(FrcMorphism::to_terminal(&x).class(), MorphismClass::Neither);
    }

    #[test]
    fn image_of_unique_map_is_support() {
        let x = ctx(&["x"], &[]);
        let fac = FrcMorphism::to_terminal(&x).image_factorize();
        assert_eq!(fac.image, Context::support_of(ty("x")));
        assert_eq!(fac.epi.class(), MorphismClass::RegEpi);
        assert_eq!(fac.mono.class(), MorphismClass::Mono);
    }

    #[test]
    fn image_range_computation() {
        let src = ctx(&["x", "x", "x"], &[]);
        let dst = ctx(&["x", "x"], &[]);
        let f = FrcMorphism::new(src, dst, vec![1, 1]).unwrap();
        let fac = f.image_factorize();
        assert_eq!(fac.image.arity(), 1);
        assert_eq!(fac.epi.then(&fac.mono).unwrap(), f);
    }

    #[test]
    fn image_of_reg_epi_is_isomorphic() {
        let src = ctx(&["x", "y"], &[]);
        let dst = ctx(&["y", "x"], &[]);
        let f = FrcMorphism::new(src, dst, vec![1, 0]).unwrap();
        let fac = f.image_factorize();
        assert_eq!(fac.epi, FrcMorphism::identity(f.src()));
        assert_eq!(fac.mono.class(), MorphismClass::Both);
    }

    #[test]
    fn display_is_one_based() {
        let x = ctx(&["x"], &[]);
        assert_eq!(FrcMorphism::diagonal(&x).to_string(), "[x] -> [x, x] : (1, 1)");
        assert_eq!(ctx(&["y"], &["w"]).to_string(), "[y | w]");
    }
}
