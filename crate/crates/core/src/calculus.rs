//! Regular calculi: ajax po-functors from relations to posets.
//!
//! A calculus assigns a poset of predicates to every context and lets every
//! relation act monotonically on them. Graphical terms are evaluated through
//! this action, and the reasoning rules for diagrams are exposed as
//! checkable [`RuleInstance`]s.

use std::fmt;

use thiserror::Error;

use crate::frb::{FrbError, Relation};
use crate::frc::{Context, FrcError, FrcMorphism, TypeSym};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CalcError {
    #[error("context mismatch: expected {expected}, found {found}")]
    ContextMismatch { expected: Context, found: Context },
    #[error("term has {found} leaves but its wiring has {expected} inner shells")]
    LeafCount { expected: usize, found: usize },
    #[error("rule does not apply: {0}")]
    RuleInapplicable(String),
    #[error("evaluation failed: {0}")]
    Evaluation(String),
    #[error("the poset of predicates in {0} is not enumerable")]
    NotEnumerable(Context),
    #[error(transparent)]
    Frb(#[from] FrbError),
    #[error(transparent)]
    Frc(#[from] FrcError),
}

pub(crate) fn expect_context(expected: &Context, found: &Context) -> Result<(), CalcError> {
    if expected == found {
        Ok(())
    } else {
        Err(CalcError::ContextMismatch {
            expected: expected.clone(),
            found: found.clone(),
        })
    }
}

/// An ajax po-functor `P` from relations to posets.
///
/// Implementors provide the action of relations, the k-ary laxator `ρ` and
/// its left adjoint `λ`, and the order on each `P(Γ)`. Top, meets and the
/// adjoint pair `f_! ⊣ f^*` are derived.
pub trait RegularCalculus {
    type Element: Clone + Eq + fmt::Debug;

    fn context_of(&self, x: &Self::Element) -> Context;

    /// `P(ω)(x)`; `x` must live in the domain `Γ₁ ⊕ … ⊕ Γ_k` of `ω`.
    fn apply(&self, rel: &Relation, x: &Self::Element) -> Result<Self::Element, CalcError>;

    /// The laxator `ρ: P(Γ₁) × … × P(Γ_k) → P(Γ₁ ⊕ … ⊕ Γ_k)`.
    fn rho(&self, xs: &[Self::Element]) -> Self::Element;

    /// The left adjoint of `ρ`, splitting `x` along `parts`.
    fn lambda(&self, x: &Self::Element, parts: &[Context]) -> Result<Vec<Self::Element>, CalcError>;

    /// The order `x ⊢ y` of `P(Γ)`. Comparing different contexts is an error.
    fn entails(&self, x: &Self::Element, y: &Self::Element) -> Result<bool, CalcError>;

    /// Every element of `P(Γ)`, for calculi whose posets are finite and enumerable.
    fn elements(&self, _ctx: &Context) -> Option<Vec<Self::Element>> {
        None
    }

    fn true_of(&self, ctx: &Context) -> Self::Element {
        let discard = Relation::cograph(&FrcMorphism::to_terminal(ctx));
        self.apply(&discard, &self.rho(&[]))
            .expect("discarding relation acts on the unit")
    }

    fn meet(&self, x: &Self::Element, y: &Self::Element) -> Result<Self::Element, CalcError> {
        let ctx = self.context_of(x);
        expect_context(&ctx, &self.context_of(y))?;
        let merge = Relation::cograph(&FrcMorphism::diagonal(&ctx));
        self.apply(&merge, &self.rho(&[x.clone(), y.clone()]))
    }

    /// `f_!(x)`, the action of the graph of `f`.
    fn lsh(&self, f: &FrcMorphism, x: &Self::Element) -> Result<Self::Element, CalcError> {
        self.apply(&Relation::graph(f), x)
    }

    /// `f^*(x)`, the action of the co-graph of `f`.
    fn ust(&self, f: &FrcMorphism, x: &Self::Element) -> Result<Self::Element, CalcError> {
        self.apply(&Relation::cograph(f), x)
    }

    fn equivalent(&self, x: &Self::Element, y: &Self::Element) -> Result<bool, CalcError> {
        Ok(self.entails(x, y)? && self.entails(y, x)?)
    }

    /// `⟦(θ₁,…,θ_k; ω)⟧ = P(ω)(ρ(θ₁,…,θ_k))`.
    fn eval_term(&self, term: &GraphicalTerm<Self::Element>) -> Result<Self::Element, CalcError> {
        for (shell, leaf) in term.wiring.inner().iter().zip(&term.leaves) {
            expect_context(shell, &self.context_of(leaf))?;
        }
        self.apply(&term.wiring, &self.rho(&term.leaves))
    }
}

/// Leaf predicates attached to the inner shells of a wiring diagram.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphicalTerm<E> {
    pub wiring: Relation,
    pub leaves: Vec<E>,
}

impl<E: Clone> GraphicalTerm<E> {
    pub fn new(wiring: Relation, leaves: Vec<E>) -> Result<Self, CalcError> {
        if wiring.inner().len() != leaves.len() {
            return Err(CalcError::LeafCount {
                expected: wiring.inner().len(),
                found: leaves.len(),
            });
        }
        Ok(GraphicalTerm { wiring, leaves })
    }

    /// The term `(θ; Γ)`: one leaf under the identity wiring.
    pub fn single(ctx: &Context, leaf: E) -> Self {
        GraphicalTerm {
            wiring: Relation::identity(ctx),
            leaves: vec![leaf],
        }
    }

    /// Replaces leaf `slot` by the leaves of `inner`, substituting wirings.
    pub fn nest(&self, slot: usize, inner: &GraphicalTerm<E>) -> Result<Self, CalcError> {
        let wiring = self.wiring.substitute(slot, &inner.wiring)?;
        let mut leaves = self.leaves[..slot].to_vec();
        leaves.extend(inner.leaves.iter().cloned());
        leaves.extend(self.leaves[slot + 1..].iter().cloned());
        Ok(GraphicalTerm { wiring, leaves })
    }

    fn with_leaf(&self, slot: usize, leaf: E) -> Self {
        let mut t = self.clone();
        t.leaves[slot] = leaf;
        t
    }
}

/// One instance of a reasoning rule for graphical terms. [`RuleInstance::check`]
/// evaluates both sides and reports whether the rule's conclusion holds.
#[derive(Debug, Clone)]
pub enum RuleInstance<E> {
    /// Leaf `slot` of `term` entails `weaker`; the term entails the term with
    /// that leaf replaced.
    Monotonicity {
        term: GraphicalTerm<E>,
        slot: usize,
        weaker: E,
    },
    /// `lower ≤ upper` as 2-cells; the leaves under `lower` entail the same
    /// leaves under `upper`.
    Breaking {
        leaves: Vec<E>,
        lower: Relation,
        upper: Relation,
    },
    /// Leaf `slot` of `term` is replaced by the value of `inner`; this equals
    /// the term obtained by substituting wirings.
    Nesting {
        term: GraphicalTerm<E>,
        slot: usize,
        inner: GraphicalTerm<E>,
    },
    /// `⟦(true_Γ; Γ)⟧ = ⟦(; ε_Γ)⟧`.
    TrueRemovable { context: Context },
    /// `⟦(θ₁ ∧ θ₂; Γ)⟧ = ⟦(θ₁, θ₂; δ_Γ)⟧`.
    MeetsMerge { left: E, right: E },
    /// `⟦(θ; Γ)⟧ ⊢ ⟦(; ε_Γ)⟧`.
    Discarding { leaf: E },
}

impl<E: Clone + Eq + fmt::Debug> RuleInstance<E> {
    pub fn check<P>(&self, calc: &P) -> Result<bool, CalcError>
    where
        P: RegularCalculus<Element = E> + ?Sized,
    {
        match self {
            RuleInstance::Monotonicity { term, slot, weaker } => {
                let leaf = term.leaves.get(*slot).ok_or_else(|| {
                    CalcError::RuleInapplicable(format!("term has no leaf {}", slot + 1))
                })?;
                if !calc.entails(leaf, weaker)? {
                    return Err(CalcError::RuleInapplicable(
                        "replacement leaf is not weaker".to_string(),
                    ));
                }
                let before = calc.eval_term(term)?;
                let after = calc.eval_term(&term.with_leaf(*slot, weaker.clone()))?;
                calc.entails(&before, &after)
            }
            RuleInstance::Breaking {
                leaves,
                lower,
                upper,
            } => {
                if !lower.leq(upper)? {
                    return Err(CalcError::RuleInapplicable(
                        "wirings are not related by a 2-cell".to_string(),
                    ));
                }
                let before = calc.eval_term(&GraphicalTerm::new(lower.clone(), leaves.clone())?)?;
                let after = calc.eval_term(&GraphicalTerm::new(upper.clone(), leaves.clone())?)?;
                calc.entails(&before, &after)
            }
            RuleInstance::Nesting { term, slot, inner } => {
                if *slot >= term.leaves.len() {
                    return Err(CalcError::RuleInapplicable(format!(
                        "term has no leaf {}",
                        slot + 1
                    )));
                }
                let value = calc.eval_term(inner)?;
                let nested = calc.eval_term(&term.with_leaf(*slot, value))?;
                let flat = calc.eval_term(&term.nest(*slot, inner)?)?;
                calc.equivalent(&nested, &flat)
            }
            RuleInstance::TrueRemovable { context } => {
                let lhs = calc.eval_term(&GraphicalTerm::single(context, calc.true_of(context)))?;
                let rhs = calc.eval_term(&GraphicalTerm::new(Relation::discard(context), vec![])?)?;
                calc.equivalent(&lhs, &rhs)
            }
            RuleInstance::MeetsMerge { left, right } => {
                let ctx = calc.context_of(left);
                let lhs = calc.eval_term(&GraphicalTerm::single(&ctx, calc.meet(left, right)?))?;
                let merge = Relation::cograph(&FrcMorphism::diagonal(&ctx))
                    .split_inner(&[ctx.clone(), ctx.clone()])?;
                let rhs = calc.eval_term(&GraphicalTerm::new(merge, vec![left.clone(), right.clone()])?)?;
                calc.equivalent(&lhs, &rhs)
            }
            RuleInstance::Discarding { leaf } => {
                let ctx = calc.context_of(leaf);
                let lhs = calc.eval_term(&GraphicalTerm::single(&ctx, leaf.clone()))?;
                let rhs = calc.eval_term(&GraphicalTerm::new(Relation::discard(&ctx), vec![])?)?;
                calc.entails(&lhs, &rhs)
            }
        }
    }
}

/// A strict morphism of regular calculi: a map of types together with a
/// monotone map on predicates, natural in relations and strictly monoidal.
pub trait CalcMorphism {
    type Source: RegularCalculus;
    type Target: RegularCalculus;

    fn source(&self) -> &Self::Source;
    fn target(&self) -> &Self::Target;
    fn map_type(&self, t: &TypeSym) -> TypeSym;
    fn map_element(
        &self,
        x: &<Self::Source as RegularCalculus>::Element,
    ) -> Result<<Self::Target as RegularCalculus>::Element, CalcError>;

    fn map_context(&self, ctx: &Context) -> Context {
        ctx.map_types(|t| self.map_type(t))
    }

    fn map_relation(&self, rel: &Relation) -> Relation {
        rel.map_types(|t| self.map_type(t))
    }

    /// The image term `(F♯θ₁,…,F♯θ_k; F(ω))`.
    #[allow(clippy::type_complexity)]
    fn apply_to_term(
        &self,
        term: &GraphicalTerm<<Self::Source as RegularCalculus>::Element>,
    ) -> Result<GraphicalTerm<<Self::Target as RegularCalculus>::Element>, CalcError> {
        let leaves = term
            .leaves
            .iter()
            .map(|x| self.map_element(x))
            .collect::<Result<Vec<_>, _>>()?;
        GraphicalTerm::new(self.map_relation(&term.wiring), leaves)
    }

    /// Whether `F♯(P(ω)(x)) = P'(F ω)(F♯ x)` on this instance.
    fn is_natural_at(
        &self,
        rel: &Relation,
        x: &<Self::Source as RegularCalculus>::Element,
    ) -> Result<bool, CalcError> {
        let there = self.map_element(&self.source().apply(rel, x)?)?;
        let back = self
            .target()
            .apply(&self.map_relation(rel), &self.map_element(x)?)?;
        Ok(there == back)
    }

    /// Whether `F♯` commutes with the laxator on this list of elements.
    fn is_monoidal_at(&self, xs: &[<Self::Source as RegularCalculus>::Element]) -> Result<bool, CalcError> {
        let there = self.map_element(&self.source().rho(xs))?;
        let mapped = xs
            .iter()
            .map(|x| self.map_element(x))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(there == self.target().rho(&mapped))
    }
}

/// The identity morphism on a calculus.
pub struct IdentityMorphism<'a, P>(pub &'a P);

impl<P: RegularCalculus> CalcMorphism for IdentityMorphism<'_, P> {
    type Source = P;
    type Target = P;

    fn source(&self) -> &P {
        self.0
    }

    fn target(&self) -> &P {
        self.0
    }

    fn map_type(&self, t: &TypeSym) -> TypeSym {
        t.clone()
    }

    fn map_element(&self, x: &P::Element) -> Result<P::Element, CalcError> {
        Ok(x.clone())
    }
}
