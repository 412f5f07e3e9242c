//! Relations in the free regular category, drawn as wiring diagrams.
//!
//! A [`Relation`] has `k` inner shells and one outer shell. Its global ports
//! are partitioned into typed blocks (the black dots); a support set records
//! which types must be inhabited (types not carried by any block are drawn as
//! floating white dots). Relations are kept in a normal form, so structural
//! equality is equality of relations.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::frc::{Context, FrcError, FrcMorphism, TypeSym};
use crate::uf::{renumber_by_first_occurrence, DisjointSets};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Shell {
    Inner(usize),
    Outer,
}

/// A port on one of the shells of a diagram (0-based index).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Port {
    pub shell: Shell,
    pub index: usize,
}

impl Port {
    pub fn inner(shell: usize, index: usize) -> Port {
        Port {
            shell: Shell::Inner(shell),
            index,
        }
    }

    pub fn outer(index: usize) -> Port {
        Port {
            shell: Shell::Outer,
            index,
        }
    }
}

impl fmt::Display for Port {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.shell {
            Shell::Inner(i) => write!(f, "{}.{}", i + 1, self.index + 1),
            Shell::Outer => write!(f, "out.{}", self.index + 1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionDefect {
    #[error("port {port} appears in blocks {first} and {second}")]
    Duplicate {
        port: Port,
        first: usize,
        second: usize,
    },
    #[error("port {port} is not in any block")]
    Missing { port: Port },
    #[error("block {block} is empty")]
    EmptyBlock { block: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrbError {
    #[error("block {block} mixes types {first} and {second}")]
    IllTypedBlock {
        block: usize,
        first: TypeSym,
        second: TypeSym,
    },
    #[error("blocks do not partition the ports: {0}")]
    NotAPartition(PartitionDefect),
    #[error("unknown port {0}")]
    UnknownPort(Port),
    #[error("object mismatch: {0}")]
    ObjectMismatch(String),
    #[error("slot {slot} out of range for a diagram with {shells} inner shells")]
    SlotOutOfRange { slot: usize, shells: usize },
    #[error("expected a diagram with {expected} inner shells, found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Frc(#[from] FrcError),
}

/// A morphism of the free regular po-category, in normal form.
///
/// Blocks are numbered by first occurrence when the ports are read in global
/// order: inner shells by index, then the outer shell, each by port index.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Relation {
    inner: Vec<Context>,
    outer: Context,
    inner_assign: Vec<Vec<usize>>,
    outer_assign: Vec<usize>,
    block_types: Vec<TypeSym>,
    support: BTreeSet<TypeSym>,
}

impl Relation {
    /// Builds a relation from an explicit list of blocks.
    pub fn new(
        inner: Vec<Context>,
        outer: Context,
        blocks: &[Vec<Port>],
        extra_support: impl IntoIterator<Item = TypeSym>,
    ) -> Result<Relation, FrbError> {
        let offsets = shell_offsets(&inner, &outer);
        let total = *offsets.last().unwrap();
        let mut labels = vec![usize::MAX; total];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(FrbError::NotAPartition(PartitionDefect::EmptyBlock { block: b }));
            }
            for &port in block {
                let g = global_index(&inner, &outer, &offsets, port)
                    .ok_or(FrbError::UnknownPort(port))?;
                if labels[g] != usize::MAX {
                    return Err(FrbError::NotAPartition(PartitionDefect::Duplicate {
                        port,
                        first: labels[g],
                        second: b,
                    }));
                }
                labels[g] = b;
            }
        }
        if let Some(g) = labels.iter().position(|&l| l == usize::MAX) {
            return Err(FrbError::NotAPartition(PartitionDefect::Missing {
                port: port_at(&inner, &offsets, g),
            }));
        }
        Relation::from_labels(inner, outer, &labels, extra_support)
    }

    /// Builds a relation from a block label per global port.
    pub(crate) fn from_labels(
        inner: Vec<Context>,
        outer: Context,
        labels: &[usize],
        extra_support: impl IntoIterator<Item = TypeSym>,
    ) -> Result<Relation, FrbError> {
        let (ids, n_blocks) = renumber_by_first_occurrence(labels);
        let mut block_types: Vec<Option<TypeSym>> = vec![None; n_blocks];
        let mut original: Vec<usize> = vec![0; n_blocks];
        let mut g = 0;
        let mut inner_assign = Vec::with_capacity(inner.len());
        for shell in inner.iter().chain(std::iter::once(&outer)) {
            let mut assign = Vec::with_capacity(shell.arity());
            for t in shell.ports() {
                let b = ids[g];
                match &block_types[b] {
                    None => {
                        block_types[b] = Some(t.clone());
                        original[b] = labels[g];
                    }
                    Some(bt) if bt != t => {
                        return Err(FrbError::IllTypedBlock {
                            block: original[b],
                            first: bt.clone(),
                            second: t.clone(),
                        })
                    }
                    Some(_) => {}
                }
                assign.push(b);
                g += 1;
            }
            inner_assign.push(assign);
        }
        let outer_assign = inner_assign.pop().expect("outer shell present");
        let block_types: Vec<TypeSym> = block_types.into_iter().map(Option::unwrap).collect();
        let mut support: BTreeSet<TypeSym> = extra_support.into_iter().collect();
        for shell in inner.iter().chain(std::iter::once(&outer)) {
            support.extend(shell.support().iter().cloned());
        }
        support.extend(block_types.iter().cloned());
        Ok(Relation {
            inner,
            outer,
            inner_assign,
            outer_assign,
            block_types,
            support,
        })
    }

    pub fn inner(&self) -> &[Context] {
        &self.inner
    }

    pub fn outer(&self) -> &Context {
        &self.outer
    }

    /// The domain `Γ₁ ⊕ … ⊕ Γ_k`.
    pub fn domain(&self) -> Context {
        Context::oplus_all(&self.inner)
    }

    pub fn num_blocks(&self) -> usize {
        self.block_types.len()
    }

    pub fn block_types(&self) -> &[TypeSym] {
        &self.block_types
    }

    pub fn support(&self) -> &BTreeSet<TypeSym> {
        &self.support
    }

    /// Support elements not carried by any block.
    pub fn white_dot(&self) -> BTreeSet<TypeSym> {
        let used: BTreeSet<&TypeSym> = self.block_types.iter().collect();
        self.support
            .iter()
            .filter(|s| !used.contains(s))
            .cloned()
            .collect()
    }

    /// Block index of each port of inner shell `i`.
    pub fn inner_assign(&self, i: usize) -> &[usize] {
        &self.inner_assign[i]
    }

    /// Block index of each outer port.
    pub fn outer_assign(&self) -> &[usize] {
        &self.outer_assign
    }

    pub fn block_of(&self, port: Port) -> usize {
        match port.shell {
            Shell::Inner(i) => self.inner_assign[i][port.index],
            Shell::Outer => self.outer_assign[port.index],
        }
    }

    /// The blocks as sorted port lists, in normal-form order.
    pub fn blocks(&self) -> Vec<Vec<Port>> {
        let mut blocks = vec![Vec::new(); self.num_blocks()];
        for (i, assign) in self.inner_assign.iter().enumerate() {
            for (j, &b) in assign.iter().enumerate() {
                blocks[b].push(Port::inner(i, j));
            }
        }
        for (j, &b) in self.outer_assign.iter().enumerate() {
            blocks[b].push(Port::outer(j));
        }
        blocks
    }

    /// The apex context `Γ_ω`: one port per block, full support.
    pub fn apex(&self) -> Context {
        Context::new(self.block_types.clone(), self.support.iter().cloned())
    }

    fn labels(&self) -> Vec<usize> {
        let mut labels: Vec<usize> = self.inner_assign.iter().flatten().copied().collect();
        labels.extend(self.outer_assign.iter().copied());
        labels
    }

    pub fn identity(ctx: &Context) -> Relation {
        let n = ctx.arity();
        let labels: Vec<usize> = (0..n).chain(0..n).collect();
        Relation::from_labels(vec![ctx.clone()], ctx.clone(), &labels, [])
            .expect("identity is well typed")
    }

    /// The diagram with no inner shells in which every outer port is its own
    /// block; it evaluates to `true` on the outer context.
    pub fn discard(ctx: &Context) -> Relation {
        let labels: Vec<usize> = (0..ctx.arity()).collect();
        Relation::from_labels(vec![], ctx.clone(), &labels, [])
            .expect("discard is well typed")
    }

    /// The graph `⟨id, f⟩` of a morphism, as a relation `src ⇸ dst`.
    pub fn graph(f: &FrcMorphism) -> Relation {
        let n = f.src().arity();
        let labels: Vec<usize> = (0..n).chain(f.assign().iter().copied()).collect();
        Relation::from_labels(vec![f.src().clone()], f.dst().clone(), &labels, [])
            .expect("graph is well typed")
    }

    /// The co-graph `⟨f, id⟩`, as a relation `dst ⇸ src`.
    pub fn cograph(f: &FrcMorphism) -> Relation {
        let n = f.src().arity();
        let labels: Vec<usize> = f.assign().iter().copied().chain(0..n).collect();
        Relation::from_labels(vec![f.dst().clone()], f.src().clone(), &labels, f.src().support().iter().cloned())
            .expect("co-graph is well typed")
    }

    /// Diagrammatic composite `self ; next`. `next` must have exactly one
    /// inner shell, equal to the outer shell of `self`.
    pub fn compose(&self, next: &Relation) -> Result<Relation, FrbError> {
        if next.inner.len() != 1 {
            return Err(FrbError::ArityMismatch {
                expected: 1,
                found: next.inner.len(),
            });
        }
        if next.inner[0] != self.outer {
            return Err(FrbError::ObjectMismatch(format!(
                "cannot compose into {} with a diagram expecting {}",
                self.outer, next.inner[0]
            )));
        }
        let n1 = self.num_blocks();
        let mut ds = DisjointSets::new(n1 + next.num_blocks());
        for (a, b) in self.outer_assign.iter().zip(&next.inner_assign[0]) {
            ds.union(*a, n1 + *b);
        }
        let mut labels: Vec<usize> = Vec::new();
        for assign in &self.inner_assign {
            labels.extend(assign.iter().map(|&b| ds.find(b)));
        }
        labels.extend(next.outer_assign.iter().map(|&b| ds.find(n1 + b)));
        let support = self.support.union(&next.support).cloned();
        Relation::from_labels(self.inner.clone(), next.outer.clone(), &labels, support)
    }

    /// Plugs `plug` into inner shell `slot`; the result's inner shells are
    /// those of `self` with `slot` replaced by the shells of `plug`.
    pub fn substitute(&self, slot: usize, plug: &Relation) -> Result<Relation, FrbError> {
        if slot >= self.inner.len() {
            return Err(FrbError::SlotOutOfRange {
                slot,
                shells: self.inner.len(),
            });
        }
        if plug.outer != self.inner[slot] {
            return Err(FrbError::ObjectMismatch(format!(
                "slot {} expects {}, got a diagram into {}",
                slot + 1,
                self.inner[slot],
                plug.outer
            )));
        }
        let n = self.num_blocks();
        let mut ds = DisjointSets::new(n + plug.num_blocks());
        for (a, b) in self.inner_assign[slot].iter().zip(&plug.outer_assign) {
            ds.union(*a, n + *b);
        }
        let mut inner = Vec::new();
        let mut labels = Vec::new();
        for (i, shell) in self.inner.iter().enumerate() {
            if i == slot {
                for (p, pshell) in plug.inner.iter().enumerate() {
                    inner.push(pshell.clone());
                    labels.extend(plug.inner_assign[p].iter().map(|&b| ds.find(n + b)));
                }
            } else {
                inner.push(shell.clone());
                labels.extend(self.inner_assign[i].iter().map(|&b| ds.find(b)));
            }
        }
        labels.extend(self.outer_assign.iter().map(|&b| ds.find(b)));
        let support = self.support.union(&plug.support).cloned();
        Relation::from_labels(inner, self.outer.clone(), &labels, support)
    }

    /// Juxtaposition: inner shells concatenated, outer shells combined by `⊕`.
    pub fn tensor(&self, other: &Relation) -> Relation {
        let n = self.num_blocks();
        let mut inner = self.inner.clone();
        inner.extend(other.inner.iter().cloned());
        let mut labels: Vec<usize> = self.inner_assign.iter().flatten().copied().collect();
        labels.extend(other.inner_assign.iter().flatten().map(|&b| n + b));
        labels.extend(self.outer_assign.iter().copied());
        labels.extend(other.outer_assign.iter().map(|&b| n + b));
        let support = self.support.union(&other.support).cloned();
        Relation::from_labels(inner, self.outer.oplus(&other.outer), &labels, support)
            .expect("tensor of well-typed diagrams is well typed")
    }

    /// Swaps the roles of the single inner shell and the outer shell.
    pub fn transpose(&self) -> Result<Relation, FrbError> {
        if self.inner.len() != 1 {
            return Err(FrbError::ArityMismatch {
                expected: 1,
                found: self.inner.len(),
            });
        }
        let mut labels = self.outer_assign.clone();
        labels.extend(self.inner_assign[0].iter().copied());
        Relation::from_labels(
            vec![self.outer.clone()],
            self.inner[0].clone(),
            &labels,
            self.support.iter().cloned(),
        )
    }

    /// Merges all inner shells into one shell `Γ₁ ⊕ … ⊕ Γ_k`.
    pub fn flatten_inner(&self) -> Relation {
        let labels = self.labels();
        Relation::from_labels(
            vec![self.domain()],
            self.outer.clone(),
            &labels,
            self.support.iter().cloned(),
        )
        .expect("flattening preserves typing")
    }

    /// Splits the single inner shell into consecutive shells `parts`.
    pub fn split_inner(&self, parts: &[Context]) -> Result<Relation, FrbError> {
        if self.inner.len() != 1 {
            return Err(FrbError::ArityMismatch {
                expected: 1,
                found: self.inner.len(),
            });
        }
        let joined = Context::oplus_all(parts);
        if joined.ports() != self.inner[0].ports() || !joined.support().is_subset(self.inner[0].support()) {
            return Err(FrbError::ObjectMismatch(format!(
                "cannot split {} into {} shells",
                self.inner[0],
                parts.len()
            )));
        }
        Relation::from_labels(
            parts.to_vec(),
            self.outer.clone(),
            &self.labels(),
            self.support.iter().cloned(),
        )
    }

    /// Renames every type, as the induced functor between free regular categories does.
    pub fn map_types(&self, f: impl Fn(&TypeSym) -> TypeSym) -> Relation {
        Relation {
            inner: self.inner.iter().map(|c| c.map_types(&f)).collect(),
            outer: self.outer.map_types(&f),
            inner_assign: self.inner_assign.clone(),
            outer_assign: self.outer_assign.clone(),
            block_types: self.block_types.iter().map(&f).collect(),
            support: self.support.iter().map(&f).collect(),
        }
    }

    /// Returns the same diagram with the given extra support annotations.
    pub fn with_support(&self, extra: impl IntoIterator<Item = TypeSym>) -> Relation {
        let mut r = self.clone();
        r.support.extend(extra);
        r
    }

    fn same_shells(&self, other: &Relation) -> bool {
        self.inner == other.inner && self.outer == other.outer
    }

    /// The 2-cell order: `self ≤ other` iff every block of `other` lies inside
    /// a block of `self` and the support of `other` is contained in that of `self`.
    pub fn leq(&self, other: &Relation) -> Result<bool, FrbError> {
        if !self.same_shells(other) {
            return Err(FrbError::ObjectMismatch(
                "2-cells compare diagrams with equal shells".to_string(),
            ));
        }
        if !other.support.is_subset(&self.support) {
            return Ok(false);
        }
        let mut image = vec![usize::MAX; other.num_blocks()];
        for (finer, coarser) in other.labels().into_iter().zip(self.labels()) {
            if image[finer] == usize::MAX {
                image[finer] = coarser;
            } else if image[finer] != coarser {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Recovers `f` when this relation is the graph of a morphism.
    pub fn as_graph(&self) -> Option<FrcMorphism> {
        if self.inner.len() != 1 || self.support != *self.inner[0].support() {
            return None;
        }
        let mut inner_port = vec![usize::MAX; self.num_blocks()];
        for (j, &b) in self.inner_assign[0].iter().enumerate() {
            if inner_port[b] != usize::MAX {
                return None;
            }
            inner_port[b] = j;
        }
        if inner_port.contains(&usize::MAX) {
            return None;
        }
        let assign = self.outer_assign.iter().map(|&b| inner_port[b]).collect();
        FrcMorphism::new(self.inner[0].clone(), self.outer.clone(), assign).ok()
    }

    /// Writes a relation `Γ₁ ⇸ Γ₂` as a span `Γ₁ ← Γ_ω → Γ₂`.
    ///
    /// Diagrams with several inner shells are flattened first.
    pub fn span_decompose(&self) -> (FrcMorphism, FrcMorphism) {
        let apex = self.apex();
        let domain = self.domain();
        let to_domain: Vec<usize> = self.inner_assign.iter().flatten().copied().collect();
        let left = FrcMorphism::new(apex.clone(), domain, to_domain)
            .expect("shell ports map to their blocks");
        let right = FrcMorphism::new(apex, self.outer.clone(), self.outer_assign.clone())
            .expect("shell ports map to their blocks");
        (left, right)
    }
}

/// All relations with the given shells, with support drawn from `universe`
/// (which must contain every shell support).
///
/// Partitions are generated as restricted growth strings over the global
/// ports, so each normal form appears exactly once.
pub fn all_relations(inner: &[Context], outer: &Context, universe: &BTreeSet<TypeSym>) -> Vec<Relation> {
    let port_types: Vec<TypeSym> = inner
        .iter()
        .chain(std::iter::once(outer))
        .flat_map(|c| c.ports().iter().cloned())
        .collect();
    let mut base: BTreeSet<TypeSym> = BTreeSet::new();
    for c in inner.iter().chain(std::iter::once(outer)) {
        base.extend(c.support().iter().cloned());
    }
    let optional: Vec<TypeSym> = universe.difference(&base).cloned().collect();
    let mut partitions = Vec::new();
    let mut labels = Vec::with_capacity(port_types.len());
    let mut types = Vec::new();
    grow_partitions(&port_types, &mut labels, &mut types, &mut partitions);
    let mut out = Vec::new();
    for labels in &partitions {
        for mask in 0u32..(1 << optional.len()) {
            let extra = optional
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, t)| t.clone());
            out.push(
                Relation::from_labels(inner.to_vec(), outer.clone(), labels, extra)
                    .expect("enumerated partitions are typed"),
            );
        }
    }
    out.sort();
    out.dedup();
    out
}

fn grow_partitions(
    port_types: &[TypeSym],
    labels: &mut Vec<usize>,
    block_types: &mut Vec<TypeSym>,
    out: &mut Vec<Vec<usize>>,
) {
    let g = labels.len();
    if g == port_types.len() {
        out.push(labels.clone());
        return;
    }
    for b in 0..block_types.len() {
        if block_types[b] == port_types[g] {
            labels.push(b);
            grow_partitions(port_types, labels, block_types, out);
            labels.pop();
        }
    }
    labels.push(block_types.len());
    block_types.push(port_types[g].clone());
    grow_partitions(port_types, labels, block_types, out);
    block_types.pop();
    labels.pop();
}

fn shell_offsets(inner: &[Context], outer: &Context) -> Vec<usize> {
    let mut offsets = vec![0];
    for c in inner.iter().chain(std::iter::once(outer)) {
        offsets.push(offsets.last().unwrap() + c.arity());
    }
    offsets
}

fn global_index(inner: &[Context], outer: &Context, offsets: &[usize], port: Port) -> Option<usize> {
    let (shell, ctx) = match port.shell {
        Shell::Inner(i) => (i, inner.get(i)?),
        Shell::Outer => (inner.len(), outer),
    };
    (port.index < ctx.arity()).then(|| offsets[shell] + port.index)
}

fn port_at(inner: &[Context], offsets: &[usize], g: usize) -> Port {
    let shell = offsets.partition_point(|&o| o <= g) - 1;
    let index = g - offsets[shell];
    if shell == inner.len() {
        Port::outer(index)
    } else {
        Port::inner(shell, index)
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.inner.iter().enumerate() {
            write!(f, "{}{c}", if i > 0 { ", " } else { "" })?;
        }
        write!(f, " -> {} {{", self.outer)?;
        for (b, ports) in self.blocks().iter().enumerate() {
            write!(f, "{} {}:{} =", if b > 0 { ";" } else { "" }, b + 1, self.block_types[b])?;
            for p in ports {
                write!(f, " {p}")?;
            }
        }
        let wd = self.white_dot();
        if !wd.is_empty() {
            write!(f, "{} |", if self.num_blocks() > 0 { ";" } else { "" })?;
            for (i, t) in wd.iter().enumerate() {
                write!(f, "{}{t}", if i > 0 { ", " } else { " " })?;
            }
        }
        write!(f, " }}")
    }
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
