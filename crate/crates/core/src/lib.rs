//! Free regular categories, wiring diagrams of relations, and regular calculi
//! over finite sets.

mod uf;

pub mod calculus;
pub mod cq;
pub mod frb;
pub mod frc;
pub mod model;
pub mod syncat;

pub use frb::{FrbError, Port, Relation, Shell};
pub use frc::{Context, FrcError, FrcMorphism, MorphismClass, TypeSym};
pub use calculus::{CalcError, GraphicalTerm, RegularCalculus};
pub use model::{Atom, Carriers, FiniteSetModel, Predicate};
pub use syncat::{Syn, SynError, SynMorphism, SynObject};
