use regulus::calculus::CalcError;
use regulus::cq::CqError;
use regulus::model::ModelError;
use regulus::syncat::SynError;
use regulus::{FrbError, FrcError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("syntax error at {line}:{col}: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error("resolution error: {0}")]
    Resolution(String),
    #[error("in rel {rel}: node {node} has type {expected} but port {port} has type {found}")]
    IllTypedNode {
        rel: String,
        node: String,
        port: String,
        expected: String,
        found: String,
    },
    #[error("in rel {rel}: port {port} is listed in nodes {first} and {second}")]
    PortInTwoNodes {
        rel: String,
        port: String,
        first: String,
        second: String,
    },
    #[error("usage: {0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Frc(#[from] FrcError),
    #[error(transparent)]
    Frb(#[from] FrbError),
    #[error(transparent)]
    Calc(#[from] CalcError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Cq(#[from] CqError),
    #[error(transparent)]
    Syn(#[from] SynError),
}
