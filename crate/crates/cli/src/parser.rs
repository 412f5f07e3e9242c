//! Lexer and recursive-descent parser for `.rlog` programs.

use unicode_normalization::UnicodeNormalization;

use crate::ast::*;
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(usize),
    Str(String),
    Punct(&'static str),
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Int(n) => format!("number {n}"),
            Tok::Str(s) => format!("string {s:?}"),
            Tok::Punct(p) => format!("`{p}`"),
            Tok::Eof => "end of input".to_string(),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

const PUNCT: [&str; 14] = ["->", "[", "]", "{", "}", "(", ")", ",", ";", ":", "=", "|", ".", "@"];

fn syntax(line: usize, col: usize, message: impl Into<String>) -> CliError {
    CliError::Syntax {
        line,
        col,
        message: message.into(),
    }
}

fn lex(src: &str) -> Result<Vec<Spanned>, CliError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            col += i - start;
            out.push(Spanned {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                line: l0,
                col: c0,
            });
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            col += i - start;
            let text: String = chars[start..i].iter().collect();
            let n = text
                .parse()
                .map_err(|_| syntax(l0, c0, format!("number {text} is too large")))?;
            out.push(Spanned {
                tok: Tok::Int(n),
                line: l0,
                col: c0,
            });
            continue;
        }
        if c == '"' {
            i += 1;
            col += 1;
            let mut s = String::new();
            loop {
                let Some(&d) = chars.get(i) else {
                    return Err(syntax(l0, c0, "unterminated string"));
                };
                i += 1;
                col += 1;
                match d {
                    '"' => break,
                    '\n' => return Err(syntax(l0, c0, "unterminated string")),
                    '\\' => {
                        let e = chars.get(i).copied();
                        i += 1;
                        col += 1;
                        match e {
                            Some('"') => s.push('"'),
                            Some('\\') => s.push('\\'),
                            Some('n') => s.push('\n'),
                            _ => return Err(syntax(line, col - 2, "unknown escape in string")),
                        }
                    }
                    d => s.push(d),
                }
            }
            out.push(Spanned {
                tok: Tok::Str(s.nfc().collect()),
                line: l0,
                col: c0,
            });
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
        match PUNCT.iter().find(|p| rest.starts_with(**p)) {
            Some(p) => {
                i += p.len();
                col += p.len();
                out.push(Spanned {
                    tok: Tok::Punct(p),
                    line: l0,
                    col: c0,
                });
            }
            None => return Err(syntax(l0, c0, format!("unexpected character {c:?}"))),
        }
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn error(&self, message: impl Into<String>) -> CliError {
        let t = &self.toks[self.pos];
        syntax(t.line, t.col, message)
    }

    fn unexpected(&self, wanted: &str) -> CliError {
        self.error(format!("expected {wanted}, found {}", self.peek().describe()))
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if t != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn at(&self, p: &str) -> bool {
        matches!(self.peek(), Tok::Punct(q) if *q == p)
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn eat(&mut self, p: &str) -> bool {
        if self.at(p) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, p: &str) -> Result<(), CliError> {
        if self.eat(p) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{p}`")))
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), CliError> {
        if self.at_keyword(kw) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{kw}`")))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, CliError> {
        match self.peek() {
            Tok::Ident(s) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn int(&mut self, what: &str) -> Result<usize, CliError> {
        match self.peek() {
            Tok::Int(n) => {
                let n = *n;
                self.pos += 1;
                Ok(n)
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn atom(&mut self) -> Result<String, CliError> {
        match self.bump() {
            Tok::Ident(s) | Tok::Str(s) => Ok(s),
            Tok::Int(n) => Ok(n.to_string()),
            _ => {
                self.pos -= 1;
                Err(self.unexpected("an atom"))
            }
        }
    }

    /// Parses `item (, item)*` up to (not including) `close`, allowing an
    /// empty list.
    fn list<T>(&mut self, close: &str, mut item: impl FnMut(&mut Self) -> Result<T, CliError>) -> Result<Vec<T>, CliError> {
        let mut out = Vec::new();
        if self.at(close) {
            return Ok(out);
        }
        loop {
            out.push(item(self)?);
            if !self.eat(",") {
                return Ok(out);
            }
        }
    }

    fn context_lit(&mut self) -> Result<ContextLit, CliError> {
        self.expect("[")?;
        let mut lit = ContextLit::default();
        if !self.at("|") {
            lit.ports = self.list("]", |p| p.ident("a type name"))?;
        }
        if self.eat("|") {
            lit.extra = self.list("]", |p| p.ident("a type name"))?;
        }
        self.expect("]")?;
        Ok(lit)
    }

    fn context_ref(&mut self) -> Result<ContextRef, CliError> {
        if self.at("[") {
            Ok(ContextRef::Literal(self.context_lit()?))
        } else {
            Ok(ContextRef::Named(self.ident("a context name or `[`")?))
        }
    }

    fn port_ref(&mut self) -> Result<PortRef, CliError> {
        let shell = if self.eat("@") {
            let k = self.int("a shell position")?;
            if k == 0 {
                return Err(self.error("shell positions are 1-based"));
            }
            ShellRef::Position(k)
        } else {
            match self.ident("a port reference")?.as_str() {
                "out" => ShellRef::Out,
                name => ShellRef::Named(name.to_string()),
            }
        };
        self.expect(".")?;
        let index = self.int("a port index")?;
        if index == 0 {
            self.pos -= 1;
            return Err(self.error("port indices are 1-based"));
        }
        Ok(PortRef { shell, index })
    }

    fn rel(&mut self) -> Result<RelDecl, CliError> {
        let name = self.ident("a relation name")?;
        self.expect(":")?;
        let inner = if self.at("->") { Vec::new() } else { self.list("->", |p| p.context_ref())? };
        self.expect("->")?;
        let outer = self.context_ref()?;
        self.expect("{")?;
        let mut nodes = Vec::new();
        let mut support = Vec::new();
        loop {
            if self.eat("}") {
                break;
            }
            if self.at_keyword("node") {
                self.pos += 1;
                let name = self.ident("a node name")?;
                self.expect(":")?;
                let ty = self.ident("a type name")?;
                self.expect("=")?;
                let ports = self.list(";", |p| p.port_ref())?;
                if ports.is_empty() {
                    return Err(self.error(format!("node {name} has no ports")));
                }
                self.expect(";")?;
                nodes.push(NodeDecl { name, ty, ports });
            } else if self.at_keyword("support") {
                self.pos += 1;
                self.expect("{")?;
                support.extend(self.list("}", |p| p.ident("a type name"))?);
                self.expect("}")?;
                self.eat(";");
            } else {
                return Err(self.unexpected("`node`, `support` or `}`"));
            }
        }
        Ok(RelDecl {
            name,
            inner,
            outer,
            nodes,
            support,
        })
    }

    fn model(&mut self) -> Result<ModelDecl, CliError> {
        let name = self.ident("a model name")?;
        self.expect("{")?;
        let mut items = Vec::new();
        loop {
            if self.eat("}") {
                break;
            }
            if self.at_keyword("type") {
                self.pos += 1;
                let name = self.ident("a type name")?;
                self.expect("=")?;
                self.expect("{")?;
                let atoms = self.list("}", |p| p.atom())?;
                self.expect("}")?;
                self.expect(";")?;
                items.push(ModelItem::Type { name, atoms });
            } else if self.at_keyword("pred") {
                self.pos += 1;
                let name = self.ident("a predicate name")?;
                self.keyword("on")?;
                let on = self.context_ref()?;
                self.expect("=")?;
                self.expect("{")?;
                let tuples = self.list("}", |p| {
                    p.expect("(")?;
                    let t = p.list(")", |q| q.atom())?;
                    p.expect(")")?;
                    Ok(t)
                })?;
                self.expect("}")?;
                self.expect(";")?;
                items.push(ModelItem::Pred { name, on, tuples });
            } else {
                return Err(self.unexpected("`type`, `pred` or `}`"));
            }
        }
        Ok(ModelDecl { name, items })
    }

    fn term(&mut self) -> Result<TermDecl, CliError> {
        let name = self.ident("a term name")?;
        self.expect("=")?;
        self.keyword("rel")?;
        let rel = self.ident("a relation name")?;
        self.keyword("with")?;
        self.expect("(")?;
        let leaves = self.list(")", |p| p.ident("a leaf name"))?;
        self.expect(")")?;
        Ok(TermDecl { name, rel, leaves })
    }

    fn program(&mut self) -> Result<Program, CliError> {
        let mut decls = Vec::new();
        loop {
            let kw = match self.peek() {
                Tok::Eof => break,
                Tok::Ident(s) => s.clone(),
                _ => return Err(self.unexpected("a declaration")),
            };
            self.pos += 1;
            let decl = match kw.as_str() {
                "context" => {
                    let name = self.ident("a context name")?;
                    self.expect("=")?;
                    Decl::Context(ContextDecl {
                        name,
                        value: self.context_lit()?,
                    })
                }
                "rel" => Decl::Rel(self.rel()?),
                "model" => Decl::Model(self.model()?),
                "term" => Decl::Term(self.term()?),
                _ => {
                    self.pos -= 1;
                    return Err(self.unexpected("`context`, `rel`, `model` or `term`"));
                }
            };
            decls.push(decl);
        }
        Ok(Program { decls })
    }
}

/// Parses program text without resolving names.
pub fn parse_syntax(src: &str) -> Result<Program, CliError> {
    let mut p = Parser { toks: lex(src)?, pos: 0 };
    p.program()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_source_is_empty_program() {
        assert_eq!(parse_syntax("").unwrap(), Program::default());
        assert_eq!(parse_syntax("  // only a comment\n").unwrap(), Program::default());
    }

    #[test]
    fn context_literal_forms() {
        let p = parse_syntax("context A = [x, y | w]\ncontext B = [| v]\ncontext C = []").unwrap();
        let lits: Vec<_> = p
            .decls
            .iter()
            .map(|d| match d {
                Decl::Context(c) => c.value.clone(),
                _ => unreachable!(),
            })
            .collect();
        assert_eq!(lits[0].ports, ["x", "y"]);
        assert_eq!(lits[0].extra, ["w"]);
        assert!(lits[1].ports.is_empty());
        assert_eq!(lits[1].extra, ["v"]);
        assert_eq!(lits[2], ContextLit::default());
    }

    #[test]
    fn errors_carry_positions() {
        match parse_syntax("context A = [x,\n  ;]") {
            Err(CliError::Syntax { line, col, .. }) => assert_eq!((line, col), (2, 3)),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_syntax("rel R : -> [x] { node a : x = out.0; }"),
            Err(CliError::Syntax { line: 1, col: 35, .. })
        ));
    }

    #[test]
    fn quoted_atoms_are_nfc_normalized() {
        let p = parse_syntax("model M { type t = { \"e\u{301}\", b }; }").unwrap();
        let Decl::Model(m) = &p.decls[0] else { unreachable!() };
        assert_eq!(
            m.items[0],
            ModelItem::Type {
                name: "t".into(),
                atoms: vec!["\u{e9}".into(), "b".into()]
            }
        );
    }
}
