//! Surface syntax of `.rlog` programs and its canonical printer.
//!
//! Printing a parsed program and parsing the result gives back the same
//! [`Program`].

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Program {
    pub decls: Vec<Decl>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decl {
    Context(ContextDecl),
    Rel(RelDecl),
    Model(ModelDecl),
    Term(TermDecl),
}

/// `[t1, t2 | s1]`: port types, then extra support types.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ContextLit {
    pub ports: Vec<String>,
    pub extra: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ContextRef {
    Named(String),
    Literal(ContextLit),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContextDecl {
    pub name: String,
    pub value: ContextLit,
}

/// Which shell a port reference points into.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ShellRef {
    /// The unique inner shell whose context has this name.
    Named(String),
    /// The inner shell at a 1-based position.
    Position(usize),
    Out,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PortRef {
    pub shell: ShellRef,
    /// 1-based.
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeDecl {
    pub name: String,
    pub ty: String,
    pub ports: Vec<PortRef>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelDecl {
    pub name: String,
    pub inner: Vec<ContextRef>,
    pub outer: ContextRef,
    pub nodes: Vec<NodeDecl>,
    pub support: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelItem {
    Type { name: String, atoms: Vec<String> },
    Pred { name: String, on: ContextRef, tuples: Vec<Vec<String>> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelDecl {
    pub name: String,
    pub items: Vec<ModelItem>,
}

/// `term T = rel R with (L1, L2)`. A leaf names either an earlier term,
/// which is nested in place, or a predicate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermDecl {
    pub name: String,
    pub rel: String,
    pub leaves: Vec<String>,
}

pub(crate) fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

struct Atom<'a>(&'a str);

impl fmt::Display for Atom<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if is_ident(self.0) {
            return f.write_str(self.0);
        }
        f.write_str("\"")?;
        for c in self.0.chars() {
            match c {
                '"' => f.write_str("\\\"")?,
                '\\' => f.write_str("\\\\")?,
                '\n' => f.write_str("\\n")?,
                c => write!(f, "{c}")?,
            }
        }
        f.write_str("\"")
    }
}

fn join<T: fmt::Display>(f: &mut fmt::Formatter<'_>, items: impl IntoIterator<Item = T>) -> fmt::Result {
    for (i, x) in items.into_iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{x}")?;
    }
    Ok(())
}

impl fmt::Display for ContextLit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        join(f, &self.ports)?;
        if !self.extra.is_empty() {
            f.write_str(if self.ports.is_empty() { "| " } else { " | " })?;
            join(f, &self.extra)?;
        }
        f.write_str("]")
    }
}

impl fmt::Display for ContextRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ContextRef::Named(n) => f.write_str(n),
            ContextRef::Literal(l) => write!(f, "{l}"),
        }
    }
}

impl fmt::Display for PortRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.shell {
            ShellRef::Named(n) => write!(f, "{n}.{}", self.index),
            ShellRef::Position(k) => write!(f, "@{k}.{}", self.index),
            ShellRef::Out => write!(f, "out.{}", self.index),
        }
    }
}

impl fmt::Display for Decl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Decl::Context(c) => writeln!(f, "context {} = {}", c.name, c.value),
            Decl::Rel(r) => {
                write!(f, "rel {} : ", r.name)?;
                join(f, &r.inner)?;
                writeln!(f, "{}-> {} {{", if r.inner.is_empty() { "" } else { " " }, r.outer)?;
                for n in &r.nodes {
                    write!(f, "  node {} : {} = ", n.name, n.ty)?;
                    join(f, &n.ports)?;
                    writeln!(f, ";")?;
                }
                if !r.support.is_empty() {
                    f.write_str("  support { ")?;
                    join(f, &r.support)?;
                    writeln!(f, " }}")?;
                }
                writeln!(f, "}}")
            }
            Decl::Model(m) => {
                writeln!(f, "model {} {{", m.name)?;
                for item in &m.items {
                    match item {
                        ModelItem::Type { name, atoms } => {
                            write!(f, "  type {name} = {{ ")?;
                            join(f, atoms.iter().map(|a| Atom(a)))?;
                            writeln!(f, " }};")?;
                        }
                        ModelItem::Pred { name, on, tuples } => {
                            write!(f, "  pred {name} on {on} = {{ ")?;
                            for (i, t) in tuples.iter().enumerate() {
                                f.write_str(if i > 0 { ", (" } else { "(" })?;
                                join(f, t.iter().map(|a| Atom(a)))?;
                                f.write_str(")")?;
                            }
                            writeln!(f, " }};")?;
                        }
                    }
                }
                writeln!(f, "}}")
            }
            Decl::Term(t) => {
                write!(f, "term {} = rel {} with (", t.name, t.rel)?;
                join(f, &t.leaves)?;
                writeln!(f, ")")
            }
        }
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.decls.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}
