//! The syntactic category of a regular calculus.
//!
//! Objects are pairs `(Γ, φ)` with `φ ∈ P(Γ)`. A morphism `(Γ₁, φ₁) → (Γ₂, φ₂)`
//! is an element `θ ∈ P(Γ₁ ⊕ Γ₂)` that is an internal relation, and a
//! function when it is total and deterministic. Composition, identities,
//! limits and images are all computed by evaluating graphical terms.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::calculus::{CalcError, CalcMorphism, GraphicalTerm, RegularCalculus};
use crate::frb::Relation;
use crate::frc::{Context, FrcMorphism};
use crate::model::{FiniteSetModel, ModelError, Predicate};

/// Default bound on the number of candidates examined by enumerative checks.
pub const DEFAULT_MAX_ENUM: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SynError {
    #[error("not an internal relation between the given objects")]
    NotARelation,
    #[error("not an internal function: {0}")]
    NotAFunction(FunctionDefect),
    #[error("object mismatch: {0}")]
    ObjectMismatch(String),
    #[error("equivalent characterizations disagree: {0}")]
    CharacterizationDisagreement(String),
    #[error("enumeration of {0} candidates exceeds the budget of {1}")]
    BudgetExceeded(usize, usize),
    #[error("morphism of calculi does not preserve {0}")]
    InvalidMorphism(String),
    #[error(transparent)]
    Calc(#[from] CalcError),
}

impl From<crate::frc::FrcError> for SynError {
    fn from(e: crate::frc::FrcError) -> SynError {
        SynError::Calc(e.into())
    }
}

impl From<ModelError> for SynError {
    fn from(e: ModelError) -> SynError {
        SynError::Calc(e.into())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FunctionDefect {
    NotTotal,
    NotDeterministic,
    NeitherTotalNorDeterministic,
}

impl std::fmt::Display for FunctionDefect {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FunctionDefect::NotTotal => "not total",
            FunctionDefect::NotDeterministic => "not deterministic",
            FunctionDefect::NeitherTotalNorDeterministic => "neither total nor deterministic",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynObject<E> {
    pub context: Context,
    pub predicate: E,
}

impl<E> SynObject<E> {
    pub fn new(context: Context, predicate: E) -> Self {
        SynObject { context, predicate }
    }
}

/// An internal relation, flagged as certified once it has passed the
/// function checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynMorphism<E> {
    pub src: SynObject<E>,
    pub dst: SynObject<E>,
    pub theta: E,
    certified: bool,
}

impl<E> SynMorphism<E> {
    /// An internal relation that has not been checked to be a function.
    pub fn relation(src: SynObject<E>, dst: SynObject<E>, theta: E) -> Self {
        SynMorphism {
            src,
            dst,
            theta,
            certified: false,
        }
    }

    pub fn is_certified(&self) -> bool {
        self.certified
    }
}

/// Outcome of the function test: the right adjoint `θ†` or the reason for failure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FunctionCheck<E> {
    Yes { right_adjoint: E },
    No(FunctionDefect),
}

impl<E> FunctionCheck<E> {
    pub fn is_yes(&self) -> bool {
        matches!(self, FunctionCheck::Yes { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Classification {
    pub mono: bool,
    pub reg_epi: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynPullback<E> {
    pub apex: SynObject<E>,
    pub p1: SynMorphism<E>,
    pub p2: SynMorphism<E>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynEqualizer<E> {
    pub object: SynObject<E>,
    pub inclusion: SynMorphism<E>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynImage<E> {
    pub image: SynObject<E>,
    pub epi: SynMorphism<E>,
    pub mono: SynMorphism<E>,
}

/// Builds a wiring diagram from a wire label for each port, in global order.
fn wiring(inner: Vec<Context>, outer: Context, labels: &[usize]) -> Relation {
    Relation::from_labels(inner, outer, labels, []).expect("wires join equal types")
}

fn range(start: usize, len: usize) -> impl Iterator<Item = usize> {
    start..start + len
}

/// The syntactic category of a calculus, with an enumeration budget for
/// the checks that quantify over elements.
pub struct Syn<'a, P> {
    calc: &'a P,
    max_enum: usize,
}

impl<'a, P: RegularCalculus> Syn<'a, P> {
    pub fn new(calc: &'a P) -> Self {
        Syn {
            calc,
            max_enum: DEFAULT_MAX_ENUM,
        }
    }

    pub fn with_budget(calc: &'a P, max_enum: usize) -> Self {
        Syn { calc, max_enum }
    }

    pub fn calculus(&self) -> &'a P {
        self.calc
    }

    fn check_context(&self, expected: &Context, x: &P::Element) -> Result<(), SynError> {
        let found = self.calc.context_of(x);
        if &found != expected {
            return Err(CalcError::ContextMismatch {
                expected: expected.clone(),
                found,
            }
            .into());
        }
        Ok(())
    }

    fn enumerate(&self, ctx: &Context) -> Result<Vec<P::Element>, SynError> {
        let all = self
            .calc
            .elements(ctx)
            .ok_or_else(|| CalcError::NotEnumerable(ctx.clone()))?;
        if all.len() > self.max_enum {
            return Err(SynError::BudgetExceeded(all.len(), self.max_enum));
        }
        Ok(all)
    }

    fn equiv(&self, x: &P::Element, y: &P::Element) -> Result<bool, SynError> {
        Ok(self.calc.equivalent(x, y)?)
    }

    fn entails(&self, x: &P::Element, y: &P::Element) -> Result<bool, SynError> {
        Ok(self.calc.entails(x, y)?)
    }

    fn eval(&self, wiring: Relation, leaves: Vec<P::Element>) -> Result<P::Element, SynError> {
        Ok(self.calc.eval_term(&GraphicalTerm::new(wiring, leaves)?)?)
    }

    /// `id_φ = (δ_Γ)_!(φ)`.
    pub fn identity_element(&self, obj: &SynObject<P::Element>) -> Result<P::Element, SynError> {
        Ok(self
            .calc
            .lsh(&FrcMorphism::diagonal(&obj.context), &obj.predicate)?)
    }

    /// Relational composite of `θ₁ ∈ P(Γ₁ ⊕ Γ₂)` and `θ₂ ∈ P(Γ₂ ⊕ Γ₃)`:
    /// the two shells share their `Γ₂` wires, which are hidden.
    pub fn compose_elements(
        &self,
        g1: &Context,
        g2: &Context,
        g3: &Context,
        theta1: &P::Element,
        theta2: &P::Element,
    ) -> Result<P::Element, SynError> {
        let (n1, n2, n3) = (g1.arity(), g2.arity(), g3.arity());
        let mut labels: Vec<usize> = range(0, n1 + n2).collect();
        labels.extend(range(n1, n2 + n3));
        labels.extend(range(0, n1));
        labels.extend(range(n1 + n2, n3));
        let w = wiring(vec![g1.oplus(g2), g2.oplus(g3)], g1.oplus(g3), &labels);
        self.eval(w, vec![theta1.clone(), theta2.clone()])
    }

    /// `θ† = σ_!(θ) ∈ P(Γ₂ ⊕ Γ₁)`.
    pub fn transpose_element(&self, g1: &Context, g2: &Context, theta: &P::Element) -> Result<P::Element, SynError> {
        Ok(self.calc.lsh(&FrcMorphism::braiding(g1, g2), theta)?)
    }

    /// Whether `(π₁)_!θ ⊢ φ₁` and `(π₂)_!θ ⊢ φ₂`. The equivalent condition
    /// that restricting `θ` to `φ₁` and `φ₂` leaves it unchanged is checked
    /// as well, and a disagreement is reported as an error.
    pub fn is_internal_relation(
        &self,
        theta: &P::Element,
        a: &SynObject<P::Element>,
        b: &SynObject<P::Element>,
    ) -> Result<bool, SynError> {
        let (g1, g2) = (&a.context, &b.context);
        self.check_context(&g1.oplus(g2), theta)?;
        let left = self.calc.lsh(&FrcMorphism::projection1(g1, g2), theta)?;
        let right = self.calc.lsh(&FrcMorphism::projection2(g1, g2), theta)?;
        let by_projection = self.entails(&left, &a.predicate)? && self.entails(&right, &b.predicate)?;

        let (n1, n2) = (g1.arity(), g2.arity());
        let mut labels: Vec<usize> = range(0, n1).collect();
        labels.extend(range(0, n1 + n2));
        labels.extend(range(n1, n2));
        labels.extend(range(0, n1 + n2));
        let w = wiring(vec![g1.clone(), g1.oplus(g2), g2.clone()], g1.oplus(g2), &labels);
        let sandwiched = self.eval(w, vec![a.predicate.clone(), theta.clone(), b.predicate.clone()])?;
        let by_sandwich = self.equiv(&sandwiched, theta)?;
        if by_projection != by_sandwich {
            return Err(SynError::CharacterizationDisagreement(format!(
                "projection test says {by_projection}, restriction test says {by_sandwich}"
            )));
        }
        Ok(by_projection)
    }

    /// `φ₁ ⊢ (π₁)_!θ`.
    pub fn is_total(&self, theta: &P::Element, a: &SynObject<P::Element>, b: &SynObject<P::Element>) -> Result<bool, SynError> {
        let dom = self
            .calc
            .lsh(&FrcMorphism::projection1(&a.context, &b.context), theta)?;
        self.entails(&a.predicate, &dom)
    }

    /// Two copies of `θ` sharing their domain wires entail `θ` with its
    /// codomain wires doubled.
    pub fn is_deterministic(
        &self,
        theta: &P::Element,
        a: &SynObject<P::Element>,
        b: &SynObject<P::Element>,
    ) -> Result<bool, SynError> {
        let (g1, g2) = (&a.context, &b.context);
        let (n1, n2) = (g1.arity(), g2.arity());
        let mut labels: Vec<usize> = range(0, n1 + n2).collect();
        labels.extend(range(0, n1));
        labels.extend(range(n1 + n2, n2));
        labels.extend(range(0, n1 + 2 * n2));
        let outer = g1.oplus(g2).oplus(g2);
        let w = wiring(vec![g1.oplus(g2), g1.oplus(g2)], outer, &labels);
        let pair = self.eval(w, vec![theta.clone(), theta.clone()])?;
        let doubled = FrcMorphism::tensor(&FrcMorphism::identity(g1), &FrcMorphism::diagonal(g2));
        let split = self.calc.lsh(&doubled, theta)?;
        self.entails(&pair, &split)
    }

    /// Whether `id_φ₁ ⊢ θ ; ξ` and `ξ ; θ ⊢ id_φ₂`.
    fn is_adjoint_pair(
        &self,
        theta: &P::Element,
        xi: &P::Element,
        a: &SynObject<P::Element>,
        b: &SynObject<P::Element>,
    ) -> Result<bool, SynError> {
        let (g1, g2) = (&a.context, &b.context);
        let unit = self.compose_elements(g1, g2, g1, theta, xi)?;
        if !self.entails(&self.identity_element(a)?, &unit)? {
            return Ok(false);
        }
        let counit = self.compose_elements(g2, g1, g2, xi, theta)?;
        self.entails(&counit, &self.identity_element(b)?)
    }

    /// Whether `θ` is left adjoint to its own transpose.
    pub fn has_transpose_adjoint(
        &self,
        theta: &P::Element,
        a: &SynObject<P::Element>,
        b: &SynObject<P::Element>,
    ) -> Result<bool, SynError> {
        let dagger = self.transpose_element(&a.context, &b.context, theta)?;
        self.is_adjoint_pair(theta, &dagger, a, b)
    }

    /// Searches the internal relations `ξ: φ₂ → φ₁` for a right adjoint of `θ`.
    pub fn find_right_adjoint(
        &self,
        theta: &P::Element,
        a: &SynObject<P::Element>,
        b: &SynObject<P::Element>,
    ) -> Result<Option<P::Element>, SynError> {
        for xi in self.enumerate(&b.context.oplus(&a.context))? {
            if self.is_internal_relation(&xi, b, a)? && self.is_adjoint_pair(theta, &xi, a, b)? {
                return Ok(Some(xi));
            }
        }
        Ok(None)
    }

    /// Tests totality and determinism, and cross-checks against the
    /// adjunction `θ ⊣ θ†`.
    pub fn is_internal_function(
        &self,
        theta: &P::Element,
        a: &SynObject<P::Element>,
        b: &SynObject<P::Element>,
    ) -> Result<FunctionCheck<P::Element>, SynError> {
        if !self.is_internal_relation(theta, a, b)? {
            return Err(SynError::NotARelation);
        }
        let total = self.is_total(theta, a, b)?;
        let deterministic = self.is_deterministic(theta, a, b)?;
        let adjoint = self.has_transpose_adjoint(theta, a, b)?;
        if adjoint != (total && deterministic) {
            return Err(SynError::CharacterizationDisagreement(format!(
                "total={total}, deterministic={deterministic}, but adjunction test says {adjoint}"
            )));
        }
        Ok(match (total, deterministic) {
            (true, true) => FunctionCheck::Yes {
                right_adjoint: self.transpose_element(&a.context, &b.context, theta)?,
            },
            (false, true) => FunctionCheck::No(FunctionDefect::NotTotal),
            (true, false) => FunctionCheck::No(FunctionDefect::NotDeterministic),
            (false, false) => FunctionCheck::No(FunctionDefect::NeitherTotalNorDeterministic),
        })
    }

    pub fn certify(
        &self,
        theta: P::Element,
        a: &SynObject<P::Element>,
        b: &SynObject<P::Element>,
    ) -> Result<SynMorphism<P::Element>, SynError> {
        match self.is_internal_function(&theta, a, b)? {
            FunctionCheck::Yes { .. } => Ok(SynMorphism {
                src: a.clone(),
                dst: b.clone(),
                theta,
                certified: true,
            }),
            FunctionCheck::No(defect) => Err(SynError::NotAFunction(defect)),
        }
    }

    /// Re-runs the function checks on an already built morphism.
    pub fn recertify(&self, f: &SynMorphism<P::Element>) -> Result<SynMorphism<P::Element>, SynError> {
        self.certify(f.theta.clone(), &f.src, &f.dst)
    }

    fn require_certified(&self, f: &SynMorphism<P::Element>) -> Result<(), SynError> {
        if f.certified {
            Ok(())
        } else {
            self.recertify(f).map(|_| ())
        }
    }

    fn same_object(&self, a: &SynObject<P::Element>, b: &SynObject<P::Element>) -> Result<bool, SynError> {
        Ok(a.context == b.context && self.equiv(&a.predicate, &b.predicate)?)
    }

    /// Equality of morphisms up to equivalence of elements.
    pub fn same_morphism(&self, f: &SynMorphism<P::Element>, g: &SynMorphism<P::Element>) -> Result<bool, SynError> {
        Ok(self.same_object(&f.src, &g.src)?
            && self.same_object(&f.dst, &g.dst)?
            && self.equiv(&f.theta, &g.theta)?)
    }

    pub fn id(&self, a: &SynObject<P::Element>) -> Result<SynMorphism<P::Element>, SynError> {
        Ok(SynMorphism {
            src: a.clone(),
            dst: a.clone(),
            theta: self.identity_element(a)?,
            certified: true,
        })
    }

    /// Composite `f ; g`. Certification is kept when both are certified.
    pub fn compose(&self, f: &SynMorphism<P::Element>, g: &SynMorphism<P::Element>) -> Result<SynMorphism<P::Element>, SynError> {
        if !self.same_object(&f.dst, &g.src)? {
            return Err(SynError::ObjectMismatch(format!(
                "codomain {} does not match domain {}",
                f.dst.context, g.src.context
            )));
        }
        let theta = self.compose_elements(&f.src.context, &f.dst.context, &g.dst.context, &f.theta, &g.theta)?;
        Ok(SynMorphism {
            src: f.src.clone(),
            dst: g.dst.clone(),
            theta,
            certified: f.certified && g.certified,
        })
    }

    /// The terminal object `(0, true)`.
    pub fn terminal(&self) -> SynObject<P::Element> {
        SynObject::new(Context::terminal(), self.calc.true_of(&Context::terminal()))
    }

    /// The unique morphism `(Γ, φ) → (0, true)`, whose element is `φ` itself.
    pub fn bang(&self, a: &SynObject<P::Element>) -> Result<SynMorphism<P::Element>, SynError> {
        self.certify(a.predicate.clone(), a, &self.terminal())
    }

    /// Pullback of `f: A → C` and `g: B → C` with apex `(Γ_A ⊕ Γ_B, f ; g†)`.
    pub fn pullback(&self, f: &SynMorphism<P::Element>, g: &SynMorphism<P::Element>) -> Result<SynPullback<P::Element>, SynError> {
        self.require_certified(f)?;
        self.require_certified(g)?;
        if !self.same_object(&f.dst, &g.dst)? {
            return Err(SynError::ObjectMismatch("pullback needs a common codomain".to_string()));
        }
        let (g1, g2, g0) = (&f.src.context, &g.src.context, &f.dst.context);
        let g_dagger = self.transpose_element(g2, g0, &g.theta)?;
        let theta12 = self.compose_elements(g1, g0, g2, &f.theta, &g_dagger)?;
        let apex_ctx = g1.oplus(g2);
        let apex = SynObject::new(apex_ctx.clone(), theta12.clone());
        let id = FrcMorphism::identity(&apex_ctx);
        let to_first = FrcMorphism::pair(&id, &FrcMorphism::projection1(g1, g2))?;
        let to_second = FrcMorphism::pair(&id, &FrcMorphism::projection2(g1, g2))?;
        let p1 = self.certify(self.calc.lsh(&to_first, &theta12)?, &apex, &f.src)?;
        let p2 = self.certify(self.calc.lsh(&to_second, &theta12)?, &apex, &g.src)?;
        Ok(SynPullback { apex, p1, p2 })
    }

    /// The mediating map `⟨q₁, q₂⟩: X → apex`: both legs share their `X`
    /// wires, all wires exposed.
    pub fn pair(
        &self,
        pb: &SynPullback<P::Element>,
        q1: &SynMorphism<P::Element>,
        q2: &SynMorphism<P::Element>,
    ) -> Result<SynMorphism<P::Element>, SynError> {
        if !self.same_object(&q1.src, &q2.src)? {
            return Err(SynError::ObjectMismatch("pairing needs a common domain".to_string()));
        }
        let (gx, g1, g2) = (&q1.src.context, &q1.dst.context, &q2.dst.context);
        let (nx, n1, n2) = (gx.arity(), g1.arity(), g2.arity());
        let mut labels: Vec<usize> = range(0, nx + n1).collect();
        labels.extend(range(0, nx));
        labels.extend(range(nx + n1, n2));
        labels.extend(range(0, nx + n1 + n2));
        let w = wiring(vec![gx.oplus(g1), gx.oplus(g2)], gx.oplus(g1).oplus(g2), &labels);
        let theta = self.eval(w, vec![q1.theta.clone(), q2.theta.clone()])?;
        self.certify(theta, &q1.src, &pb.apex)
    }

    /// Equalizer of a parallel pair: the two elements share their domain
    /// wires (exposed) and their codomain wires (hidden).
    pub fn equalizer(&self, f: &SynMorphism<P::Element>, g: &SynMorphism<P::Element>) -> Result<SynEqualizer<P::Element>, SynError> {
        self.require_certified(f)?;
        self.require_certified(g)?;
        if !self.same_object(&f.src, &g.src)? || !self.same_object(&f.dst, &g.dst)? {
            return Err(SynError::ObjectMismatch("equalizer needs a parallel pair".to_string()));
        }
        let (g1, g2) = (&f.src.context, &f.dst.context);
        let (n1, n2) = (g1.arity(), g2.arity());
        let mut labels: Vec<usize> = range(0, n1 + n2).collect();
        labels.extend(range(0, n1 + n2));
        labels.extend(range(0, n1));
        let w = wiring(vec![g1.oplus(g2), g1.oplus(g2)], g1.clone(), &labels);
        let e = self.eval(w, vec![f.theta.clone(), g.theta.clone()])?;
        let object = SynObject::new(g1.clone(), e);
        let inclusion = self.certify(self.identity_element(&object)?, &object, &f.src)?;
        Ok(SynEqualizer { object, inclusion })
    }

    /// `im(θ) = ε^* ; θ`, which is `(π₂)_!θ`.
    pub fn image_element(&self, f: &SynMorphism<P::Element>) -> Result<P::Element, SynError> {
        let (g1, g2) = (&f.src.context, &f.dst.context);
        let discard = self.calc.true_of(g1);
        self.compose_elements(&Context::terminal(), g1, g2, &discard, &f.theta)
    }

    /// Mono iff `id_φ₁ = θ ; θ†`; regular epi iff `φ₂ = im θ`, with the
    /// conditions `φ₂ ⊢ im θ` and `id_φ₂ = θ† ; θ` required to agree.
    pub fn classify(&self, f: &SynMorphism<P::Element>) -> Result<Classification, SynError> {
        self.require_certified(f)?;
        let (g1, g2) = (&f.src.context, &f.dst.context);
        let dagger = self.transpose_element(g1, g2, &f.theta)?;
        let kernel = self.compose_elements(g1, g2, g1, &f.theta, &dagger)?;
        let mono = self.equiv(&self.identity_element(&f.src)?, &kernel)?;

        let image = self.image_element(f)?;
        let covers = self.entails(&f.dst.predicate, &image)?;
        let equal_image = self.equiv(&f.dst.predicate, &image)?;
        let cokernel = self.compose_elements(g2, g1, g2, &dagger, &f.theta)?;
        let identity_back = self.equiv(&self.identity_element(&f.dst)?, &cokernel)?;
        if covers != equal_image || equal_image != identity_back {
            return Err(SynError::CharacterizationDisagreement(format!(
                "regular epi conditions: covers={covers}, image equal={equal_image}, identity={identity_back}"
            )));
        }
        Ok(Classification {
            mono,
            reg_epi: equal_image,
        })
    }

    /// Factors `f` through its image `(Γ₂, im θ)`.
    pub fn image_factorize(&self, f: &SynMorphism<P::Element>) -> Result<SynImage<P::Element>, SynError> {
        self.require_certified(f)?;
        let image = SynObject::new(f.dst.context.clone(), self.image_element(f)?);
        let epi = self.certify(f.theta.clone(), &f.src, &image)?;
        let mono = self.certify(self.identity_element(&image)?, &image, &f.dst)?;
        Ok(SynImage { image, epi, mono })
    }

    /// The subobjects of `(Γ, s)`: every `t ⊢ s` with its representing mono
    /// `δ_!(t): (Γ, t) → (Γ, s)`.
    pub fn subobjects_of(&self, a: &SynObject<P::Element>) -> Result<Vec<SynMorphism<P::Element>>, SynError> {
        let mut out = Vec::new();
        for t in self.enumerate(&a.context)? {
            if self.entails(&t, &a.predicate)? {
                let sub = SynObject::new(a.context.clone(), t);
                out.push(self.certify(self.identity_element(&sub)?, &sub, a)?);
            }
        }
        Ok(out)
    }

    /// All internal relations `A → B`.
    pub fn relations_between(&self, a: &SynObject<P::Element>, b: &SynObject<P::Element>) -> Result<Vec<SynMorphism<P::Element>>, SynError> {
        let mut out = Vec::new();
        for theta in self.enumerate(&a.context.oplus(&b.context))? {
            if self.is_internal_relation(&theta, a, b)? {
                out.push(SynMorphism::relation(a.clone(), b.clone(), theta));
            }
        }
        Ok(out)
    }

    /// All certified functions `A → B`.
    pub fn functions_between(&self, a: &SynObject<P::Element>, b: &SynObject<P::Element>) -> Result<Vec<SynMorphism<P::Element>>, SynError> {
        let mut out = Vec::new();
        for r in self.relations_between(a, b)? {
            if self.is_internal_function(&r.theta, a, b)?.is_yes() {
                out.push(SynMorphism { certified: true, ..r });
            }
        }
        Ok(out)
    }

    /// Every certified function into the terminal object equals `bang(A)`.
    pub fn verify_terminal(&self, a: &SynObject<P::Element>) -> Result<bool, SynError> {
        let bang = self.bang(a)?;
        let all = self.functions_between(a, &self.terminal())?;
        Ok(all.len() == 1 && self.same_morphism(&all[0], &bang)?)
    }

    /// Checks the pullback square and its universal property against every
    /// cone with vertex among `probes`.
    pub fn verify_pullback(
        &self,
        f: &SynMorphism<P::Element>,
        g: &SynMorphism<P::Element>,
        pb: &SynPullback<P::Element>,
        probes: &[SynObject<P::Element>],
    ) -> Result<bool, SynError> {
        let left = self.compose(&pb.p1, f)?;
        let right = self.compose(&pb.p2, g)?;
        if !self.same_morphism(&left, &right)? {
            return Ok(false);
        }
        for x in probes {
            let to_a = self.functions_between(x, &f.src)?;
            let to_b = self.functions_between(x, &g.src)?;
            let to_apex = self.functions_between(x, &pb.apex)?;
            for q1 in &to_a {
                let q1f = self.compose(q1, f)?;
                for q2 in &to_b {
                    if !self.same_morphism(&q1f, &self.compose(q2, g)?)? {
                        continue;
                    }
                    let mut mediating = Vec::new();
                    for u in &to_apex {
                        if self.same_morphism(&self.compose(u, &pb.p1)?, q1)?
                            && self.same_morphism(&self.compose(u, &pb.p2)?, q2)?
                        {
                            mediating.push(u);
                        }
                    }
                    if mediating.len() != 1 {
                        return Ok(false);
                    }
                    let paired = self.pair(pb, q1, q2)?;
                    if !self.same_morphism(mediating[0], &paired)? {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    /// Checks that the equalizer inclusion equalizes the pair and that every
    /// equalizing map from a probe factors through it uniquely.
    pub fn verify_equalizer(
        &self,
        f: &SynMorphism<P::Element>,
        g: &SynMorphism<P::Element>,
        eq: &SynEqualizer<P::Element>,
        probes: &[SynObject<P::Element>],
    ) -> Result<bool, SynError> {
        if !self.same_morphism(&self.compose(&eq.inclusion, f)?, &self.compose(&eq.inclusion, g)?)? {
            return Ok(false);
        }
        for x in probes {
            let to_eq = self.functions_between(x, &eq.object)?;
            for h in self.functions_between(x, &f.src)? {
                if !self.same_morphism(&self.compose(&h, f)?, &self.compose(&h, g)?)? {
                    continue;
                }
                let mut count = 0;
                for u in &to_eq {
                    if self.same_morphism(&self.compose(u, &eq.inclusion)?, &h)? {
                        count += 1;
                    }
                }
                if count != 1 {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Concrete data of the finite-set model: objects are tuple sets and
/// certified morphisms are functions between them.
impl Syn<'_, FiniteSetModel> {
    /// The tuple set underlying an object.
    pub fn to_concrete_object(&self, a: &SynObject<Predicate>) -> Predicate {
        a.predicate.clone()
    }

    /// The function `φ₁ → φ₂` encoded by a certified morphism.
    pub fn to_concrete(&self, f: &SynMorphism<Predicate>) -> Result<BTreeMap<Vec<u32>, Vec<u32>>, SynError> {
        self.require_certified(f)?;
        let n1 = f.src.context.arity();
        let mut map = BTreeMap::new();
        for t in f.theta.tuples() {
            let (input, output) = t.split_at(n1);
            if map.insert(input.to_vec(), output.to_vec()).is_some() {
                return Err(SynError::NotAFunction(FunctionDefect::NotDeterministic));
            }
        }
        Ok(map)
    }

    /// The certified morphism whose element is the graph of `map`.
    pub fn from_concrete(
        &self,
        a: &SynObject<Predicate>,
        b: &SynObject<Predicate>,
        map: &BTreeMap<Vec<u32>, Vec<u32>>,
    ) -> Result<SynMorphism<Predicate>, SynError> {
        let rows = map.iter().map(|(i, o)| {
            let mut row = i.clone();
            row.extend_from_slice(o);
            row
        });
        let theta = self.calc.predicate(&a.context.oplus(&b.context), rows)?;
        self.certify(theta, a, b)
    }
}

/// The functor between syntactic categories induced by a morphism of calculi.
pub struct SynFunctor<'m, M> {
    morphism: &'m M,
}

impl<'m, M: CalcMorphism> SynFunctor<'m, M> {
    pub fn new(morphism: &'m M) -> Self {
        SynFunctor { morphism }
    }

    #[allow(clippy::type_complexity)]
    pub fn map_object(
        &self,
        a: &SynObject<<M::Source as RegularCalculus>::Element>,
    ) -> Result<SynObject<<M::Target as RegularCalculus>::Element>, SynError> {
        Ok(SynObject::new(
            self.morphism.map_context(&a.context),
            self.morphism.map_element(&a.predicate)?,
        ))
    }

    /// Maps a morphism and re-certifies it in the target; a morphism of
    /// calculi must send functions to functions.
    #[allow(clippy::type_complexity)]
    pub fn map_morphism(
        &self,
        f: &SynMorphism<<M::Source as RegularCalculus>::Element>,
    ) -> Result<SynMorphism<<M::Target as RegularCalculus>::Element>, SynError> {
        let src = self.map_object(&f.src)?;
        let dst = self.map_object(&f.dst)?;
        let theta = self.morphism.map_element(&f.theta)?;
        let target = Syn::new(self.morphism.target());
        if !f.certified {
            return if target.is_internal_relation(&theta, &src, &dst)? {
                Ok(SynMorphism::relation(src, dst, theta))
            } else {
                Err(SynError::InvalidMorphism("internal relations".to_string()))
            };
        }
        match target.certify(theta, &src, &dst) {
            Ok(m) => Ok(m),
            Err(SynError::NotAFunction(_)) | Err(SynError::NotARelation) => {
                Err(SynError::InvalidMorphism("internal functions".to_string()))
            }
            Err(e) => Err(e),
        }
    }
}
