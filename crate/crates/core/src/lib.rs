//! Variation-of-information distance between distributions on alphabets of
//! different sizes.
//!
//! For `phi` on `n` symbols and `psi` on `m` symbols the distance is
//!
//! ```text
//! d(phi, psi) = min over couplings theta of  2 H(theta) - H(phi) - H(psi)
//! ```
//!
//! which is the minimum over joint laws of `H(X | Y) + H(Y | X)`. The crate
//! provides exact solvers for small instances ([`exact_metric`],
//! [`closed_form_2x2`], [`exact_n_by_2`]), a best-fit upper bound that scales
//! to large ones ([`greedy_metric_bound`]), and entropy-maximizing reduction
//! of a distribution to fewer symbols ([`greedy_reduce`], [`exact_reduce`]).
//!
//! All information quantities are in nats.

pub mod binpack;
pub mod cli;
pub mod error;
pub mod greedy;
pub mod info;
pub mod prob;
pub mod reduction;
pub mod transport;

pub use binpack::{
    best_fit_overflow, best_fit_overstuff, exact_pack, mismatch, Mismatch, PackingInstance,
    PackingResult, Slot, DEFAULT_SIZE_CAP,
};
pub use error::{Error, Result};
pub use greedy::{
    greedy_metric_bound, greedy_metric_bound_with, greedy_rounds, GreedyMmiTrace, GreedyOptions,
    RoundRecord, RoundSolver,
};
pub use info::{
    conditional_entropy, conditional_from_joint, entropy, joint_entropy, joint_from_conditional,
    mutual_information, point_entropy, total_variation,
};
pub use prob::{ConditionalMatrix, Distribution, JointDistribution, LogBase, Matrix, Orientation};
pub use reduction::{
    aggregate, best_fit_bound_check, exact_reduce, greedy_reduce, is_aggregation, split_profile,
    Aggregation, BestFitBound, GreedyReduction, Reduction,
};
pub use transport::{
    closed_form_2x2, exact_metric, exact_n_by_2, f_u, spanning_tree_count, vertex_joints, Coupling,
    MetricResult,
};
