//! Normal forms under the block-preserving subgroup, homotheties and the
//! equivalence test.

pub mod equivalence;
pub mod homothety;
pub mod reduce;
pub mod subspace;

pub use equivalence::{equivalent, normal_form_of, permutations, verify_certificate, Certificate, EquivalenceVerdict};
pub use homothety::{a_normal_form, homothety_compatible, HomothetyVerdict};
pub use reduce::{coefficient, exp_field, g_normal_form, g_normal_form_with, parameter_vector, NormalFormResult, ParamEntry, ReduceOptions};
pub use subspace::{compute_lk, compute_lk_by_fibers, jet_dims, jet_subspace, nonempty_subsets, JetSubspace};
