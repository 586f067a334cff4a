//! The mixed-integer model: construction, LP text bridge, assignment checking and decoding.

mod check;
mod lp;
mod model;
mod solution;

pub use check::{
    check_assignment, encode_tree, tolerance, Assignment, CheckReport, Violation, ViolationKind,
};
pub use lp::{emit_lp, parse_lp, read_lp, write_lp};
pub use model::{
    a_name, b_name, build_model, c_name, d_name, e_name, ek_name, l_name, m_name, n_name,
    var_family, z_name, Constraint, ConstraintSense, Layout, ModelObjective, ModelSpec,
    QuadConstraint, Terms, VarKind, Variable, F1_NAME,
};
pub use solution::{extract_tree, load_solution, parse_solution};
