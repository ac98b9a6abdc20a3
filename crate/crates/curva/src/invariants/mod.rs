//! Valuations, value sets, fibers, conductors and determinacy.

pub mod determinacy;
pub mod implicit;
pub mod jets;
pub mod valuation;
pub mod valueset;

pub use determinacy::{determinacy_bounds, determinacy_definitional, puiseux_block_form};
pub use implicit::{implicitize, weierstrass, Implicit};
pub use jets::{exponent_ranks, pullback_element, DegreeReport, Element, Generator, JetSpace, JetSpec, Kind};
pub use valuation::{branch_semigroup, intersection_mult, kappa, valuation, BranchSemigroup};
pub use valueset::{
    check_module_law, check_semiring_laws, classify_maximal, fiber_nonempty, jacobian_value_set, value_membership,
    value_set, FiberWitness, Maximality, ValueSet,
};
