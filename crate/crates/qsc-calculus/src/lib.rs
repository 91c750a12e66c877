//! The symbolic resource calculus: expressions over exact-rational-plus-
//! entropic coefficients, the axiom catalog, and a proof checker that
//! replays derivations step by step.

pub mod atom;
pub mod axioms;
pub mod bindings;
pub mod builtins;
pub mod coeff;
pub mod context;
pub mod error;
pub mod eval;
pub mod expr;
pub mod grammar;
pub mod mutate;
pub mod proof;
pub mod rules;
pub mod symbol;

pub use atom::{AtomKind, EntropicAtom};
pub use axioms::{axiom_db, Axiom, AxiomDb};
pub use builtins::{builtin, builtin_derivations};
pub use coeff::{rat, rat_int, Coefficient, Rat};
pub use context::{ContextSet, NamedDecl};
pub use error::{CalcError, Result};
pub use eval::{evaluate, evaluate_ri, Bindings};
pub use expr::{
    expr_eq, expr_leq, normalize, Certainty, DecouplingFlag, IdentityBasis, Relation,
    ResourceExpr, ResourceInequality, Side,
};
pub use proof::{DerivationStep, Proof, ProofBuilder};
pub use rules::{apply_rule, Instantiation, RuleKind};
pub use symbol::ResourceSymbol;
