//! Command dispatch. Every verdict comes from a library call; this module
//! only looks up names and formats results.

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use regulus::calculus::RegularCalculus;
use regulus::cq::{self, canonical_structure};
use regulus::model::{FiniteSetModel, Predicate};
use regulus::syncat::{FunctionCheck, Syn, SynMorphism, SynObject, DEFAULT_MAX_ENUM};
use regulus::Relation;

use crate::dot::emit_dot;
use crate::error::CliError;
use crate::workspace::{LoadedModel, Workspace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Text,
    Dot,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "regulus", about = "Wiring diagrams, regular calculi and conjunctive queries")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Model used by `eval`, `entail` and the `syncat-*` commands.
    #[arg(long, global = true)]
    pub model: Option<String>,
    #[arg(long, value_enum, global = true, default_value = "text")]
    pub format: Format,
    /// Enumeration budget for universal-property checks.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_ENUM)]
    pub max_enum: usize,
}

/// Morphism arguments of the `syncat-*` commands are written
/// `THETA:SRC:DST`, three predicate or term names.
#[derive(Debug, Subcommand)]
pub enum Command {
    /// Composite of two relations.
    Compose { file: String, first: String, second: String },
    /// Plugs a relation into a 1-based inner shell of another.
    Substitute { file: String, outer: String, slot: usize, plug: String },
    /// Whether there is a 2-cell from the first relation to the second.
    Leq { file: String, lhs: String, rhs: String },
    /// Evaluates a term in a model.
    Eval { file: String, term: String },
    /// Whether the first term entails the second in a model.
    Entail { file: String, lhs: String, rhs: String },
    /// Whether the first term entails the second in every model.
    Contain { file: String, lhs: String, rhs: String },
    /// Prints the conjunctive query of a term.
    EmitFormula { file: String, term: String },
    /// Renders a relation or term in the dot language.
    EmitDot { file: String, name: String },
    /// Checks whether THETA:SRC:DST is an internal relation or function.
    SyncatCheck { file: String, morphism: String },
    /// Pullback of two functions with a common codomain.
    SyncatPullback { file: String, first: String, second: String },
    /// Image factorization of a function.
    SyncatImage { file: String, morphism: String },
}

impl Command {
    pub fn file(&self) -> &str {
        match self {
            Command::Compose { file, .. }
            | Command::Substitute { file, .. }
            | Command::Leq { file, .. }
            | Command::Eval { file, .. }
            | Command::Entail { file, .. }
            | Command::Contain { file, .. }
            | Command::EmitFormula { file, .. }
            | Command::EmitDot { file, .. }
            | Command::SyncatCheck { file, .. }
            | Command::SyncatPullback { file, .. }
            | Command::SyncatImage { file, .. } => file,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub text: String,
    pub code: u8,
}

impl Outcome {
    fn ok(text: String) -> Outcome {
        Outcome { text, code: 0 }
    }

    fn verdict(holds: bool, text: String) -> Outcome {
        Outcome {
            text,
            code: if holds { 0 } else { 1 },
        }
    }
}

fn relation_json(rel: &Relation) -> Value {
    let blocks: Vec<Value> = rel
        .blocks()
        .iter()
        .zip(rel.block_types())
        .map(|(ports, ty)| {
            json!({
                "type": ty.name(),
                "ports": ports.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({
        "normal_form": rel.to_string(),
        "blocks": blocks,
        "support": rel.support().iter().map(|t| t.name()).collect::<Vec<_>>(),
        "white_dot": rel.white_dot().iter().map(|t| t.name().to_string()).collect::<Vec<_>>(),
    })
}

fn render_json(v: Value) -> String {
    let mut s = serde_json::to_string_pretty(&v).expect("json values serialize");
    s.push('\n');
    s
}

fn no_dot(command: &str) -> CliError {
    CliError::Usage(format!("`{command}` has no dot output"))
}

fn show_relation(name: &str, rel: &Relation, format: Format) -> String {
    match format {
        Format::Text => format!("{rel}\n"),
        Format::Dot => emit_dot(name, rel, None),
        Format::Json => render_json(relation_json(rel)),
    }
}

fn show_verdict(holds: bool, detail: Option<String>, format: Format, command: &str) -> Result<Outcome, CliError> {
    let text = match format {
        Format::Text => match &detail {
            Some(d) => format!("{holds}\n{d}\n"),
            None => format!("{holds}\n"),
        },
        Format::Json => render_json(json!({ "holds": holds, "detail": detail })),
        Format::Dot => return Err(no_dot(command)),
    };
    Ok(Outcome::verdict(holds, text))
}

pub struct Runner<'a> {
    pub ws: &'a Workspace,
    pub model: Option<&'a str>,
    pub format: Format,
    pub max_enum: usize,
}

impl Runner<'_> {
    fn loaded_model(&self) -> Result<&LoadedModel, CliError> {
        let name = self
            .model
            .ok_or_else(|| CliError::Usage("this command needs --model NAME".into()))?;
        self.ws.model(name)
    }

    /// A predicate name from the model, or a term evaluated in it.
    fn element(&self, lm: &LoadedModel, name: &str) -> Result<Predicate, CliError> {
        if let Ok(p) = lm.pred(name) {
            return Ok(p.clone());
        }
        if self.ws.has_term(name) {
            let t = lm.instantiate(self.ws.term(name)?)?;
            return Ok(lm.model.eval_term(&t)?);
        }
        Err(CliError::Resolution(format!("unknown pred or term `{name}`")))
    }

    fn object(&self, lm: &LoadedModel, name: &str) -> Result<SynObject<Predicate>, CliError> {
        let p = self.element(lm, name)?;
        Ok(SynObject::new(p.context().clone(), p))
    }

    fn morphism_parts(
        &self,
        lm: &LoadedModel,
        spec: &str,
    ) -> Result<(Predicate, SynObject<Predicate>, SynObject<Predicate>), CliError> {
        let parts: Vec<&str> = spec.split(':').collect();
        let [theta, src, dst] = parts.as_slice() else {
            return Err(CliError::Usage(format!("morphism `{spec}` must be written THETA:SRC:DST")));
        };
        Ok((self.element(lm, theta)?, self.object(lm, src)?, self.object(lm, dst)?))
    }

    fn certified(&self, syn: &Syn<FiniteSetModel>, lm: &LoadedModel, spec: &str) -> Result<SynMorphism<Predicate>, CliError> {
        let (theta, a, b) = self.morphism_parts(lm, spec)?;
        Ok(syn.certify(theta, &a, &b)?)
    }

    fn render(&self, lm: &LoadedModel, p: &Predicate) -> Result<String, CliError> {
        Ok(p.render(lm.model.carriers())?)
    }

    pub fn run(&self, command: &Command) -> Result<Outcome, CliError> {
        let ws = self.ws;
        let format = self.format;
        match command {
            Command::Compose { first, second, .. } => {
                let rel = ws.relation(first)?.compose(ws.relation(second)?)?;
                Ok(Outcome::ok(show_relation(&format!("{first};{second}"), &rel, format)))
            }
            Command::Substitute { outer, slot, plug, .. } => {
                if *slot == 0 {
                    return Err(CliError::Usage("slots are 1-based".into()));
                }
                let rel = ws.relation(outer)?.substitute(slot - 1, ws.relation(plug)?)?;
                Ok(Outcome::ok(show_relation(outer, &rel, format)))
            }
            Command::Leq { lhs, rhs, .. } => {
                let holds = ws.relation(lhs)?.leq(ws.relation(rhs)?)?;
                show_verdict(holds, None, format, "leq")
            }
            Command::Eval { term, .. } => {
                let lm = self.loaded_model()?;
                let value = lm.model.eval_term(&lm.instantiate(ws.term(term)?)?)?;
                let rendered = self.render(lm, &value)?;
                match format {
                    Format::Text => Ok(Outcome::ok(format!("{rendered}\n"))),
                    Format::Json => Ok(Outcome::ok(render_json(json!({
                        "context": value.context().to_string(),
                        "tuples": value.atom_tuples(lm.model.carriers())?
                            .iter()
                            .map(|t| t.iter().map(|a| a.name().to_string()).collect::<Vec<_>>())
                            .collect::<Vec<_>>(),
                    })))),
                    Format::Dot => Err(no_dot("eval")),
                }
            }
            Command::Entail { lhs, rhs, .. } => {
                let lm = self.loaded_model()?;
                let l = lm.model.eval_term(&lm.instantiate(ws.term(lhs)?)?)?;
                let r = lm.model.eval_term(&lm.instantiate(ws.term(rhs)?)?)?;
                let holds = lm.model.entails(&l, &r)?;
                let detail = if holds {
                    None
                } else {
                    let missing = Predicate::new(
                        l.context().clone(),
                        l.tuples().difference(r.tuples()).take(1).cloned(),
                        lm.model.carriers(),
                    )?;
                    Some(format!("counterexample: {}", self.render(lm, &missing)?))
                };
                show_verdict(holds, detail, format, "entail")
            }
            Command::Contain { lhs, rhs, .. } => {
                let (t, t_prime) = (ws.term(lhs)?, ws.term(rhs)?);
                let witness = cq::contains(t, t_prime)?;
                let detail = match &witness {
                    Some(h) => Some(format!(
                        "witness: {}",
                        h.render(&canonical_structure(t_prime)?, &canonical_structure(t)?)
                    )),
                    None => None,
                };
                show_verdict(witness.is_some(), detail, format, "contain")
            }
            Command::EmitFormula { term, .. } => {
                let q = cq::emit_formula(ws.term(term)?)?;
                match format {
                    Format::Text => Ok(Outcome::ok(format!("{q}\n"))),
                    Format::Json => Ok(Outcome::ok(render_json(json!({ "query": q.to_string() })))),
                    Format::Dot => Err(no_dot("emit-formula")),
                }
            }
            Command::EmitDot { name, .. } => {
                let dot = if ws.has_term(name) {
                    let t = ws.term(name)?;
                    emit_dot(name, &t.wiring, Some(&t.leaves))
                } else {
                    emit_dot(name, ws.relation(name)?, None)
                };
                match format {
                    Format::Json => Ok(Outcome::ok(render_json(json!({ "dot": dot })))),
                    _ => Ok(Outcome::ok(dot)),
                }
            }
            Command::SyncatCheck { morphism, .. } => self.syncat_check(morphism),
            Command::SyncatPullback { first, second, .. } => self.syncat_pullback(first, second),
            Command::SyncatImage { morphism, .. } => self.syncat_image(morphism),
        }
    }

    fn syncat_check(&self, spec: &str) -> Result<Outcome, CliError> {
        let lm = self.loaded_model()?;
        let syn = Syn::with_budget(&lm.model, self.max_enum);
        let (theta, a, b) = self.morphism_parts(lm, spec)?;
        let mut report: Vec<(&str, Value)> = Vec::new();
        let relation = syn.is_internal_relation(&theta, &a, &b)?;
        report.push(("relation", json!(relation)));
        if relation {
            match syn.is_internal_function(&theta, &a, &b)? {
                FunctionCheck::Yes { .. } => {
                    report.push(("function", json!(true)));
                    let f = syn.certify(theta, &a, &b)?;
                    let c = syn.classify(&f)?;
                    report.push(("mono", json!(c.mono)));
                    report.push(("regular_epi", json!(c.reg_epi)));
                    report.push(("concrete", json!(self.concrete(&syn, lm, &f)?)));
                }
                FunctionCheck::No(defect) => {
                    report.push(("function", json!(false)));
                    report.push(("defect", json!(defect.to_string())));
                }
            }
        }
        self.report(report, "syncat-check")
    }

    fn concrete(&self, syn: &Syn<FiniteSetModel>, lm: &LoadedModel, f: &SynMorphism<Predicate>) -> Result<String, CliError> {
        let map = syn.to_concrete(f)?;
        let carriers = lm.model.carriers();
        let show = |ctx: &regulus::Context, t: &[u32]| -> Result<String, CliError> {
            let atoms = t
                .iter()
                .zip(ctx.ports())
                .map(|(&i, ty)| Ok(carriers.atoms(ty)?[i as usize].name().to_string()))
                .collect::<Result<Vec<_>, CliError>>()?;
            Ok(format!("({})", atoms.join(",")))
        };
        let mut parts = Vec::new();
        for (i, o) in &map {
            parts.push(format!("{} -> {}", show(&f.src.context, i)?, show(&f.dst.context, o)?));
        }
        Ok(format!("{{{}}}", parts.join(", ")))
    }

    fn syncat_pullback(&self, first: &str, second: &str) -> Result<Outcome, CliError> {
        let lm = self.loaded_model()?;
        let syn = Syn::with_budget(&lm.model, self.max_enum);
        let f = self.certified(&syn, lm, first)?;
        let g = self.certified(&syn, lm, second)?;
        let pb = syn.pullback(&f, &g)?;
        let mut probes = vec![syn.terminal()];
        for p in lm.preds.values() {
            probes.push(SynObject::new(p.context().clone(), p.clone()));
        }
        let universal = syn.verify_pullback(&f, &g, &pb, &probes)?;
        let report = vec![
            ("apex_context", json!(pb.apex.context.to_string())),
            ("apex", json!(self.render(lm, &pb.apex.predicate)?)),
            ("first_leg", json!(self.concrete(&syn, lm, &pb.p1)?)),
            ("second_leg", json!(self.concrete(&syn, lm, &pb.p2)?)),
            ("universal_property", json!(universal)),
            ("probes", json!(probes.len())),
        ];
        self.report(report, "syncat-pullback")
    }

    fn syncat_image(&self, spec: &str) -> Result<Outcome, CliError> {
        let lm = self.loaded_model()?;
        let syn = Syn::with_budget(&lm.model, self.max_enum);
        let f = self.certified(&syn, lm, spec)?;
        let im = syn.image_factorize(&f)?;
        let recomposed = syn.compose(&im.epi, &im.mono)?;
        let report = vec![
            ("image", json!(self.render(lm, &im.image.predicate)?)),
            ("epi", json!(self.concrete(&syn, lm, &im.epi)?)),
            ("mono", json!(self.concrete(&syn, lm, &im.mono)?)),
            ("recomposes", json!(syn.same_morphism(&recomposed, &f)?)),
        ];
        self.report(report, "syncat-image")
    }

    fn report(&self, fields: Vec<(&str, Value)>, command: &str) -> Result<Outcome, CliError> {
        match self.format {
            Format::Text => {
                let mut s = String::new();
                for (k, v) in &fields {
                    let k = k.replace('_', " ");
                    match v {
                        Value::String(t) => s.push_str(&format!("{k}: {t}\n")),
                        v => s.push_str(&format!("{k}: {v}\n")),
                    }
                }
                Ok(Outcome::ok(s))
            }
            Format::Json => {
                let map: serde_json::Map<String, Value> = fields.into_iter().map(|(k, v)| (k.to_string(), v)).collect();
                Ok(Outcome::ok(render_json(Value::Object(map))))
            }
            Format::Dot => Err(no_dot(command)),
        }
    }
}
