//! The finite-set model: predicates are sets of tuples over type carriers,
//! and relations act by conjunctive-query evaluation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::calculus::{expect_context, CalcError, CalcMorphism, RegularCalculus};
use crate::frb::Relation;
use crate::frc::{Context, TypeSym};

/// Work size (input tuples times outer-only combinations) above which
/// evaluation is spread over the rayon pool.
const PARALLEL_THRESHOLD: usize = 1 << 14;

/// Largest `|Π[Γ]|` for which all predicates are enumerated.
pub const MAX_ENUMERABLE_TUPLES: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("no carrier declared for type {0}")]
    MissingType(TypeSym),
    #[error("atom {atom:?} is not in the carrier of {ty}")]
    UnknownAtom { ty: TypeSym, atom: String },
    #[error("tuple has {found} entries, context has {expected} ports")]
    TupleArity { expected: usize, found: usize },
    #[error("atom index {index} out of range for the carrier of {ty}")]
    IndexOutOfRange { ty: TypeSym, index: u32 },
    #[error("carrier map is not injective on {0}")]
    NotInjective(TypeSym),
    #[error(transparent)]
    Calc(#[from] CalcError),
}

impl From<ModelError> for CalcError {
    fn from(e: ModelError) -> CalcError {
        match e {
            ModelError::Calc(c) => c,
            other => CalcError::Evaluation(other.to_string()),
        }
    }
}

/// An opaque atom of a carrier.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Atom(Arc<str>);

impl Atom {
    pub fn new(name: &str) -> Atom {
        Atom(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

/// A finite set of atoms for each type. Atoms are kept sorted; predicates
/// refer to them by index.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Carriers {
    sets: BTreeMap<TypeSym, Vec<Atom>>,
}

impl Carriers {
    pub fn new() -> Carriers {
        Carriers::default()
    }

    pub fn with(mut self, ty: TypeSym, atoms: impl IntoIterator<Item = Atom>) -> Carriers {
        self.insert(ty, atoms);
        self
    }

    pub fn insert(&mut self, ty: TypeSym, atoms: impl IntoIterator<Item = Atom>) {
        let mut atoms: Vec<Atom> = atoms.into_iter().collect();
        atoms.sort();
        atoms.dedup();
        self.sets.insert(ty, atoms);
    }

    /// Carriers named `a0, a1, …` of the given sizes.
    pub fn of_sizes<'a>(sizes: impl IntoIterator<Item = (&'a TypeSym, usize)>) -> Carriers {
        let mut c = Carriers::new();
        for (t, n) in sizes {
            c.insert(
                t.clone(),
                (0..n).map(|i| Atom::new(&format!("{}{i}", t.name()))),
            );
        }
        c
    }

    pub fn types(&self) -> impl Iterator<Item = &TypeSym> {
        self.sets.keys()
    }

    pub fn atoms(&self, ty: &TypeSym) -> Result<&[Atom], ModelError> {
        self.sets
            .get(ty)
            .map(Vec::as_slice)
            .ok_or_else(|| ModelError::MissingType(ty.clone()))
    }

    pub fn size(&self, ty: &TypeSym) -> Result<usize, ModelError> {
        self.atoms(ty).map(<[Atom]>::len)
    }

    pub fn index_of(&self, ty: &TypeSym, atom: &str) -> Result<u32, ModelError> {
        let atoms = self.atoms(ty)?;
        atoms
            .binary_search_by(|a| a.name().cmp(atom))
            .map(|i| i as u32)
            .map_err(|_| ModelError::UnknownAtom {
                ty: ty.clone(),
                atom: atom.to_string(),
            })
    }

    /// Whether every type in `support` has a nonempty carrier.
    pub fn inhabited<'a>(&self, support: impl IntoIterator<Item = &'a TypeSym>) -> Result<bool, ModelError> {
        for s in support {
            if self.size(s)? == 0 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn port_sizes(&self, ctx: &Context) -> Result<Vec<u32>, ModelError> {
        ctx.ports().iter().map(|t| self.size(t).map(|n| n as u32)).collect()
    }
}

/// `|Π[Γ]|`: the product of the port carriers, or zero when a support type
/// has an empty carrier.
pub fn pi_card(ctx: &Context, carriers: &Carriers) -> Result<usize, ModelError> {
    if !carriers.inhabited(ctx.support())? {
        return Ok(0);
    }
    let mut n: usize = 1;
    for t in ctx.ports() {
        n = n.saturating_mul(carriers.size(t)?);
    }
    Ok(n)
}

/// The elements of `Π[Γ]` as atom-index tuples, in lexicographic order.
pub fn pi_elements(ctx: &Context, carriers: &Carriers) -> Result<Vec<Vec<u32>>, ModelError> {
    if !carriers.inhabited(ctx.support())? {
        return Ok(Vec::new());
    }
    let sizes = carriers.port_sizes(ctx)?;
    Ok(product_of_ranges(&sizes))
}

fn product_of_ranges(sizes: &[u32]) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::with_capacity(sizes.len())];
    for &n in sizes {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..n).map(move |a| {
                    let mut t = prefix.clone();
                    t.push(a);
                    t
                })
            })
            .collect();
    }
    out
}

/// A predicate: a set of tuples over the carriers of a context's ports.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Predicate {
    context: Context,
    tuples: BTreeSet<Vec<u32>>,
}

impl Predicate {
    /// Validates atom-index tuples against the carriers. When a support type
    /// has an empty carrier the result is empty.
    pub fn new(
        context: Context,
        tuples: impl IntoIterator<Item = Vec<u32>>,
        carriers: &Carriers,
    ) -> Result<Predicate, ModelError> {
        let sizes = carriers.port_sizes(&context)?;
        let mut set = BTreeSet::new();
        for t in tuples {
            if t.len() != sizes.len() {
                return Err(ModelError::TupleArity {
                    expected: sizes.len(),
                    found: t.len(),
                });
            }
            for (j, (&a, &n)) in t.iter().zip(&sizes).enumerate() {
                if a >= n {
                    return Err(ModelError::IndexOutOfRange {
                        ty: context.port(j).clone(),
                        index: a,
                    });
                }
            }
            set.insert(t);
        }
        if !carriers.inhabited(context.support())? {
            set.clear();
        }
        Ok(Predicate {
            context,
            tuples: set,
        })
    }

    /// Builds a predicate from tuples of atom names.
    pub fn from_atoms<S: AsRef<str>>(
        context: Context,
        tuples: &[Vec<S>],
        carriers: &Carriers,
    ) -> Result<Predicate, ModelError> {
        let mut indexed = Vec::with_capacity(tuples.len());
        for t in tuples {
            if t.len() != context.arity() {
                return Err(ModelError::TupleArity {
                    expected: context.arity(),
                    found: t.len(),
                });
            }
            let row = t
                .iter()
                .zip(context.ports())
                .map(|(a, ty)| carriers.index_of(ty, a.as_ref()))
                .collect::<Result<Vec<u32>, _>>()?;
            indexed.push(row);
        }
        Predicate::new(context, indexed, carriers)
    }

    pub fn empty(context: Context) -> Predicate {
        Predicate {
            context,
            tuples: BTreeSet::new(),
        }
    }

    pub fn full(context: Context, carriers: &Carriers) -> Result<Predicate, ModelError> {
        let tuples = pi_elements(&context, carriers)?;
        Ok(Predicate {
            context,
            tuples: tuples.into_iter().collect(),
        })
    }

    pub fn context(&self) -> &Context {
        &self.context
    }

    pub fn tuples(&self) -> &BTreeSet<Vec<u32>> {
        &self.tuples
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn contains(&self, t: &[u32]) -> bool {
        self.tuples.contains(t)
    }

    pub fn is_subset(&self, other: &Predicate) -> bool {
        self.tuples.is_subset(&other.tuples)
    }

    pub fn intersection(&self, other: &Predicate) -> Predicate {
        Predicate {
            context: self.context.clone(),
            tuples: self.tuples.intersection(&other.tuples).cloned().collect(),
        }
    }

    /// Atom names of each tuple.
    pub fn atom_tuples(&self, carriers: &Carriers) -> Result<Vec<Vec<Atom>>, ModelError> {
        self.tuples
            .iter()
            .map(|t| {
                t.iter()
                    .zip(self.context.ports())
                    .map(|(&a, ty)| Ok(carriers.atoms(ty)?[a as usize].clone()))
                    .collect()
            })
            .collect()
    }

    /// Renders as `{(a,b),(b,b)}`.
    pub fn render(&self, carriers: &Carriers) -> Result<String, ModelError> {
        let rows = self.atom_tuples(carriers)?;
        let parts: Vec<String> = rows
            .iter()
            .map(|r| {
                let atoms: Vec<&str> = r.iter().map(Atom::name).collect();
                format!("({})", atoms.join(","))
            })
            .collect();
        Ok(format!("{{{}}}", parts.join(",")))
    }
}

impl fmt::Debug for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {:?}", self.context, self.tuples)
    }
}

/// Evaluates a relation on a predicate over its domain.
///
/// Each input tuple fixes the blocks that touch an inner port; blocks that
/// only meet the outer shell range over their carriers. The result is empty
/// when some type in the support of the relation has an empty carrier.
pub fn apply_rel(rel: &Relation, x: &Predicate, carriers: &Carriers) -> Result<Predicate, ModelError> {
    expect_context(&rel.domain(), x.context())?;
    let outer = rel.outer().clone();
    if !carriers.inhabited(rel.support())? {
        return Ok(Predicate::empty(outer));
    }
    let inner_labels: Vec<usize> = (0..rel.inner().len())
        .flat_map(|i| rel.inner_assign(i).iter().copied())
        .collect();
    let mut fixed = vec![false; rel.num_blocks()];
    for &b in &inner_labels {
        fixed[b] = true;
    }
    let free: Vec<usize> = (0..rel.num_blocks()).filter(|&b| !fixed[b]).collect();
    let free_sizes = free
        .iter()
        .map(|&b| carriers.size(&rel.block_types()[b]).map(|n| n as u32))
        .collect::<Result<Vec<u32>, _>>()?;
    let free_values = product_of_ranges(&free_sizes);
    let outer_assign = rel.outer_assign();
    let n_blocks = rel.num_blocks();

    let eval = |t: &Vec<u32>, sink: &mut Vec<Vec<u32>>| {
        let mut value = vec![u32::MAX; n_blocks];
        for (&b, &a) in inner_labels.iter().zip(t) {
            if value[b] == u32::MAX {
                value[b] = a;
            } else if value[b] != a {
                return;
            }
        }
        for combo in &free_values {
            for (&b, &a) in free.iter().zip(combo) {
                value[b] = a;
            }
            sink.push(outer_assign.iter().map(|&b| value[b]).collect());
        }
    };

    let work = x.len().saturating_mul(free_values.len().max(1));
    let tuples: BTreeSet<Vec<u32>> = if work > PARALLEL_THRESHOLD {
        let inputs: Vec<&Vec<u32>> = x.tuples.iter().collect();
        inputs
            .par_iter()
            .map(|t| {
                let mut sink = Vec::new();
                eval(t, &mut sink);
                sink
            })
            .collect::<Vec<_>>()
            .into_iter()
            .flatten()
            .collect()
    } else {
        let mut sink = Vec::new();
        for t in &x.tuples {
            eval(t, &mut sink);
        }
        sink.into_iter().collect()
    };
    Ok(Predicate {
        context: outer,
        tuples,
    })
}

/// The regular calculus of predicates over fixed carriers.
#[derive(Debug, Clone)]
pub struct FiniteSetModel {
    carriers: Carriers,
}

impl FiniteSetModel {
    pub fn new(carriers: Carriers) -> FiniteSetModel {
        FiniteSetModel { carriers }
    }

    pub fn carriers(&self) -> &Carriers {
        &self.carriers
    }

    pub fn full(&self, ctx: &Context) -> Result<Predicate, ModelError> {
        Predicate::full(ctx.clone(), &self.carriers)
    }

    pub fn predicate(&self, ctx: &Context, tuples: impl IntoIterator<Item = Vec<u32>>) -> Result<Predicate, ModelError> {
        Predicate::new(ctx.clone(), tuples, &self.carriers)
    }
}

impl RegularCalculus for FiniteSetModel {
    type Element = Predicate;

    fn context_of(&self, x: &Predicate) -> Context {
        x.context.clone()
    }

    fn apply(&self, rel: &Relation, x: &Predicate) -> Result<Predicate, CalcError> {
        Ok(apply_rel(rel, x, &self.carriers)?)
    }

    fn rho(&self, xs: &[Predicate]) -> Predicate {
        let context = Context::oplus_all(xs.iter().map(|x| &x.context));
        let mut rows: Vec<Vec<u32>> = vec![Vec::new()];
        for x in xs {
            rows = rows
                .iter()
                .flat_map(|prefix| {
                    x.tuples.iter().map(move |t| {
                        let mut row = prefix.clone();
                        row.extend_from_slice(t);
                        row
                    })
                })
                .collect();
        }
        Predicate {
            context,
            tuples: rows.into_iter().collect(),
        }
    }

    fn lambda(&self, x: &Predicate, parts: &[Context]) -> Result<Vec<Predicate>, CalcError> {
        expect_context(&Context::oplus_all(parts), &x.context)?;
        let mut offset = 0;
        let mut out = Vec::with_capacity(parts.len());
        for part in parts {
            let range = offset..offset + part.arity();
            let tuples = x.tuples.iter().map(|t| t[range.clone()].to_vec()).collect();
            out.push(Predicate {
                context: part.clone(),
                tuples,
            });
            offset += part.arity();
        }
        Ok(out)
    }

    fn entails(&self, x: &Predicate, y: &Predicate) -> Result<bool, CalcError> {
        expect_context(&x.context, &y.context)?;
        Ok(x.is_subset(y))
    }

    fn elements(&self, ctx: &Context) -> Option<Vec<Predicate>> {
        let all = pi_elements(ctx, &self.carriers).ok()?;
        if all.len() > MAX_ENUMERABLE_TUPLES {
            return None;
        }
        let out = (0u32..(1 << all.len()))
            .map(|mask| Predicate {
                context: ctx.clone(),
                tuples: all
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, t)| t.clone())
                    .collect(),
            })
            .collect();
        Some(out)
    }

    fn true_of(&self, ctx: &Context) -> Predicate {
        self.full(ctx).unwrap_or_else(|_| Predicate::empty(ctx.clone()))
    }
}

/// A morphism between finite-set models induced by a map of types and an
/// injective map of atoms for each source type.
///
/// Bijective atom maps give strict morphisms of calculi. A proper inclusion
/// still preserves terms whose blocks all meet an inner shell, but not `true`.
pub struct CarrierMap<'a> {
    source: &'a FiniteSetModel,
    target: &'a FiniteSetModel,
    types: BTreeMap<TypeSym, TypeSym>,
    atoms: BTreeMap<TypeSym, Vec<u32>>,
}

impl<'a> CarrierMap<'a> {
    /// `types` sends each source type to a target type (unlisted types map to
    /// themselves); `atoms` sends each source atom to a target atom by name.
    pub fn new(
        source: &'a FiniteSetModel,
        target: &'a FiniteSetModel,
        types: BTreeMap<TypeSym, TypeSym>,
        atoms: impl Fn(&TypeSym, &Atom) -> Atom,
    ) -> Result<CarrierMap<'a>, ModelError> {
        let mut table = BTreeMap::new();
        for t in source.carriers.types() {
            let image_ty = types.get(t).cloned().unwrap_or_else(|| t.clone());
            let mut seen = BTreeSet::new();
            let mut row = Vec::new();
            for a in source.carriers.atoms(t)? {
                let b = atoms(t, a);
                let i = target.carriers.index_of(&image_ty, b.name())?;
                if !seen.insert(i) {
                    return Err(ModelError::NotInjective(t.clone()));
                }
                row.push(i);
            }
            table.insert(t.clone(), row);
        }
        Ok(CarrierMap {
            source,
            target,
            types,
            atoms: table,
        })
    }

    /// Maps types by name and atoms by name, for a target whose carriers
    /// contain the source carriers.
    pub fn inclusion(source: &'a FiniteSetModel, target: &'a FiniteSetModel) -> Result<CarrierMap<'a>, ModelError> {
        CarrierMap::new(source, target, BTreeMap::new(), |_, a| a.clone())
    }

    pub fn is_bijective(&self) -> bool {
        self.atoms.iter().all(|(t, row)| {
            self.target
                .carriers
                .size(&self.map_type(t))
                .map_or(false, |n| n == row.len())
        })
    }
}

impl CalcMorphism for CarrierMap<'_> {
    type Source = FiniteSetModel;
    type Target = FiniteSetModel;

    fn source(&self) -> &FiniteSetModel {
        self.source
    }

    fn target(&self) -> &FiniteSetModel {
        self.target
    }

    fn map_type(&self, t: &TypeSym) -> TypeSym {
        self.types.get(t).cloned().unwrap_or_else(|| t.clone())
    }

    fn map_element(&self, x: &Predicate) -> Result<Predicate, CalcError> {
        let context = self.map_context(&x.context);
        let rows: Vec<&Vec<u32>> = x
            .context
            .ports()
            .iter()
            .map(|t| {
                self.atoms
                    .get(t)
                    .ok_or_else(|| CalcError::from(ModelError::MissingType(t.clone())))
            })
            .collect::<Result<_, _>>()?;
        let tuples = x
            .tuples
            .iter()
            .map(|t| t.iter().zip(&rows).map(|(&a, row)| row[a as usize]).collect())
            .collect();
        Ok(Predicate { context, tuples })
    }
}
