//! Exact fair division of indivisible items: fairness checkers, allocation
//! algorithms, MMS search, graph orientation deciders, hardness gadgets and
//! brute-force oracles.

pub mod allocators;
pub mod chores_orient;
pub mod dot;
pub mod efx_multigraph;
pub mod error;
pub mod fairness;
pub mod gadgets;
pub mod mms;
pub mod model;
pub mod oracle;
pub mod rational;
pub mod twosat;

pub use error::{Error, Result};
pub use fairness::{
    check, check_mms, check_pef, check_po, mms_threshold, Criterion, FairnessReport, MmsProfile,
    Witness,
};
pub use model::{
    agent_class, bundle_utility, graphical_to_instance, validate_instance, AgentClass, Allocation,
    Edge, Instance, InstanceKind, Multigraph, Orientation, Value,
};
pub use rational::{format_rational, parse_rational, Rational};
