//! Modal interface automata with input refusals: a behavioral formalism
//! for input/output conformance testing that distinguishes mandatory from
//! allowed behavior and underspecified from explicitly forbidden inputs.
//!
//! The crate provides the automaton model and its validation
//! ([`model`]), modal refinement ([`refinement`]), conformance over
//! suspension traces ([`conformance`]), parallel composition with
//! multicast and hiding ([`compose`]), the quotient as its inverse
//! ([`quotient`]), conjunction ([`conjunction`]), brute-force oracles and
//! seeded generators ([`oracle`]), and a text format with DOT export
//! ([`iofmt`]).

pub mod compose;
pub mod conformance;
pub mod conjunction;
pub mod iofmt;
pub mod iso;
pub mod model;
pub mod oracle;
pub mod quotient;
pub mod refinement;

#[cfg(test)]
mod testutil;

pub use compose::{
    composable, hide, illegal_states, parallel_compose, parallel_product, ComposeError,
    ComposeMode, CompositionResult, PruneEvent, PruneReason,
};
pub use conformance::{
    build_unifying_spec, ioco_may, ioco_may_assuming_enabled, irioco, irioco_assuming_enabled,
    suspension_automaton, ConformanceVerdict, SuspensionAutomaton,
};
pub use conjunction::{
    conjoin, conjunctive_product, inconsistent_states, ConjunctionResult, InconsistencyRule,
};
pub use iofmt::{parse, parse_raw, serialize, to_dot, ParseError};
pub use iso::isomorphic;
pub use model::{
    validate, Gamma, InputEnabledness, IrMia, Label, Modality, Obs, OutSet, RawEdge, RawIrMia,
    RawLabel, RelationError, StateId, SuspensionTrace, ValidationReport, Violation,
};
pub use oracle::{
    enum_straces, irioco_bounded, random_irmia, random_refinement, random_relaxation,
    refines_bruteforce, EnablednessGoal, GenError, GeneratorConfig, OracleError,
};
pub use quotient::{
    impossible_states, pseudo_quotient, quotient, quotient_pair_check, ImpossibleRule,
    PairViolation, QuotientResult,
};
pub use refinement::{refines, RefinementCounterexample, RefinementVerdict};
