//! Name resolution: turns a parsed [`Program`] into contexts, relations,
//! models and terms.

use std::collections::BTreeMap;

use regulus::calculus::GraphicalTerm;
use regulus::cq::NamedTerm;
use regulus::model::{Atom, Carriers, FiniteSetModel, Predicate};
use regulus::{Context, FrbError, Port, Relation, TypeSym};

use crate::ast::*;
use crate::error::CliError;
use crate::parser::parse_syntax;

/// A finite-set model together with its named predicates.
#[derive(Debug, Clone)]
pub struct LoadedModel {
    pub model: FiniteSetModel,
    pub preds: BTreeMap<String, Predicate>,
}

#[derive(Debug, Clone)]
pub struct Workspace {
    pub program: Program,
    contexts: BTreeMap<String, Context>,
    relations: BTreeMap<String, Relation>,
    models: BTreeMap<String, LoadedModel>,
    terms: BTreeMap<String, NamedTerm>,
}

fn unresolved(what: &str, name: &str) -> CliError {
    CliError::Resolution(format!("unknown {what} `{name}`"))
}

fn insert_unique<V>(map: &mut BTreeMap<String, V>, kind: &str, name: &str, v: V) -> Result<(), CliError> {
    if map.insert(name.to_string(), v).is_some() {
        return Err(CliError::Resolution(format!("duplicate {kind} `{name}`")));
    }
    Ok(())
}

fn types(names: &[String]) -> Result<Vec<TypeSym>, CliError> {
    Ok(names.iter().map(|n| TypeSym::new(n)).collect::<Result<_, _>>()?)
}

/// Parses and resolves a program.
pub fn parse(src: &str) -> Result<Program, CliError> {
    Ok(Workspace::load(src)?.program)
}

impl Workspace {
    pub fn load(src: &str) -> Result<Workspace, CliError> {
        Workspace::new(parse_syntax(src)?)
    }

    pub fn new(program: Program) -> Result<Workspace, CliError> {
        let mut ws = Workspace {
            program: Program::default(),
            contexts: BTreeMap::new(),
            relations: BTreeMap::new(),
            models: BTreeMap::new(),
            terms: BTreeMap::new(),
        };
        for decl in &program.decls {
            match decl {
                Decl::Context(c) => {
                    if c.name == "out" {
                        return Err(CliError::Resolution("`out` is reserved and cannot name a context".into()));
                    }
                    let ctx = ws.literal(&c.value)?;
                    insert_unique(&mut ws.contexts, "context", &c.name, ctx)?;
                }
                Decl::Rel(r) => {
                    let rel = ws.build_relation(r)?;
                    insert_unique(&mut ws.relations, "rel", &r.name, rel)?;
                }
                Decl::Model(m) => {
                    let model = ws.build_model(m)?;
                    insert_unique(&mut ws.models, "model", &m.name, model)?;
                }
                Decl::Term(t) => {
                    let term = ws.build_term(t)?;
                    insert_unique(&mut ws.terms, "term", &t.name, term)?;
                }
            }
        }
        ws.program = program;
        Ok(ws)
    }

    fn literal(&self, lit: &ContextLit) -> Result<Context, CliError> {
        Ok(Context::new(types(&lit.ports)?, types(&lit.extra)?))
    }

    fn resolve_context(&self, r: &ContextRef) -> Result<Context, CliError> {
        match r {
            ContextRef::Named(n) => self.context(n),
            ContextRef::Literal(l) => self.literal(l),
        }
    }

    fn build_relation(&self, decl: &RelDecl) -> Result<Relation, CliError> {
        let inner = decl
            .inner
            .iter()
            .map(|r| self.resolve_context(r))
            .collect::<Result<Vec<_>, _>>()?;
        let outer = self.resolve_context(&decl.outer)?;
        let err = |msg: String| CliError::Resolution(format!("in rel {}: {msg}", decl.name));

        let mut seen_nodes = BTreeMap::new();
        let mut owner: BTreeMap<Port, usize> = BTreeMap::new();
        let mut blocks = Vec::with_capacity(decl.nodes.len());
        for (b, node) in decl.nodes.iter().enumerate() {
            if seen_nodes.insert(node.name.clone(), b).is_some() {
                return Err(err(format!("duplicate node `{}`", node.name)));
            }
            let node_ty = TypeSym::new(&node.ty)?;
            let mut block = Vec::with_capacity(node.ports.len());
            for pr in &node.ports {
                let (port, shell_ctx) = match &pr.shell {
                    ShellRef::Out => (Port::outer(pr.index - 1), &outer),
                    ShellRef::Position(k) => {
                        let ctx = inner
                            .get(k - 1)
                            .ok_or_else(|| err(format!("no inner shell at position {k}")))?;
                        (Port::inner(k - 1, pr.index - 1), ctx)
                    }
                    ShellRef::Named(name) => {
                        let matching: Vec<usize> = decl
                            .inner
                            .iter()
                            .enumerate()
                            .filter(|(_, r)| matches!(r, ContextRef::Named(n) if n == name))
                            .map(|(i, _)| i)
                            .collect();
                        match matching.as_slice() {
                            [i] => (Port::inner(*i, pr.index - 1), &inner[*i]),
                            [] => return Err(err(format!("no inner shell named `{name}`"))),
                            _ => {
                                return Err(err(format!(
                                    "shell name `{name}` is ambiguous; refer to it by position with `@k`"
                                )))
                            }
                        }
                    }
                };
                let found = shell_ctx
                    .ports()
                    .get(pr.index - 1)
                    .ok_or_else(|| err(format!("port {pr} does not exist")))?;
                if found != &node_ty {
                    return Err(CliError::IllTypedNode {
                        rel: decl.name.clone(),
                        node: node.name.clone(),
                        port: pr.to_string(),
                        expected: node_ty.to_string(),
                        found: found.to_string(),
                    });
                }
                if let Some(&first) = owner.get(&port) {
                    return Err(CliError::PortInTwoNodes {
                        rel: decl.name.clone(),
                        port: pr.to_string(),
                        first: decl.nodes[first].name.clone(),
                        second: node.name.clone(),
                    });
                }
                owner.insert(port, b);
                block.push(port);
            }
            blocks.push(block);
        }
        let extra = types(&decl.support)?;
        Relation::new(inner, outer, &blocks, extra).map_err(|e| match e {
            FrbError::NotAPartition(defect) => err(defect.to_string()),
            e => e.into(),
        })
    }

    fn build_model(&self, decl: &ModelDecl) -> Result<LoadedModel, CliError> {
        let mut carriers = Carriers::new();
        let mut declared = BTreeMap::new();
        for item in &decl.items {
            if let ModelItem::Type { name, atoms } = item {
                insert_unique(&mut declared, "type", name, ())?;
                let mut seen = std::collections::BTreeSet::new();
                for a in atoms {
                    if !seen.insert(a) {
                        return Err(CliError::Resolution(format!(
                            "in model {}: atom `{a}` listed twice in type {name}",
                            decl.name
                        )));
                    }
                }
                carriers.insert(TypeSym::new(name)?, atoms.iter().map(|a| Atom::new(a)));
            }
        }
        let model = FiniteSetModel::new(carriers);
        let mut preds = BTreeMap::new();
        for item in &decl.items {
            if let ModelItem::Pred { name, on, tuples } = item {
                let ctx = self.resolve_context(on)?;
                let p = Predicate::from_atoms(ctx, tuples, model.carriers())?;
                insert_unique(&mut preds, "pred", name, p)?;
            }
        }
        Ok(LoadedModel { model, preds })
    }

    fn build_term(&self, decl: &TermDecl) -> Result<NamedTerm, CliError> {
        let wiring = self.relation(&decl.rel)?.clone();
        let mut term = GraphicalTerm::new(wiring, decl.leaves.clone())?;
        // Nest from the last slot so earlier slot indices stay valid.
        for (slot, leaf) in decl.leaves.iter().enumerate().rev() {
            if let Some(inner) = self.terms.get(leaf) {
                term = term.nest(slot, inner)?;
            }
        }
        Ok(term)
    }

    pub fn context(&self, name: &str) -> Result<Context, CliError> {
        self.contexts.get(name).cloned().ok_or_else(|| unresolved("context", name))
    }

    pub fn relation(&self, name: &str) -> Result<&Relation, CliError> {
        self.relations.get(name).ok_or_else(|| unresolved("rel", name))
    }

    pub fn term(&self, name: &str) -> Result<&NamedTerm, CliError> {
        self.terms.get(name).ok_or_else(|| unresolved("term", name))
    }

    pub fn model(&self, name: &str) -> Result<&LoadedModel, CliError> {
        self.models.get(name).ok_or_else(|| unresolved("model", name))
    }

    pub fn has_relation(&self, name: &str) -> bool {
        self.relations.contains_key(name)
    }

    pub fn has_term(&self, name: &str) -> bool {
        self.terms.contains_key(name)
    }
}

impl LoadedModel {
    pub fn pred(&self, name: &str) -> Result<&Predicate, CliError> {
        self.preds.get(name).ok_or_else(|| unresolved("pred", name))
    }

    /// Replaces each leaf name by the predicate it names.
    pub fn instantiate(&self, term: &NamedTerm) -> Result<GraphicalTerm<Predicate>, CliError> {
        let leaves = term
            .leaves
            .iter()
            .map(|l| self.pred(l).cloned())
            .collect::<Result<Vec<_>, _>>()?;
        Ok(GraphicalTerm::new(term.wiring.clone(), leaves)?)
    }
}
