//! Formulas with generalised quantifiers, closure checks and counting-logic oracles.

pub mod corpus;
pub mod formula;
pub mod oracle;
pub mod unary;
pub mod wl;

pub use corpus::FormulaGenerator;
pub use formula::{eval_formula, preserves_validity, CompiledFormula, Formula, Interpretation};
pub use oracle::{
    bounded_domain, cardinality_quantifiers, check_closure, complement_query, is_complemented, negation_closure_lift, Closure, ClosureReport,
    OracleRegistry, QuantifierOracle,
};
pub use unary::{qtype_unary, u_type, unary_to_existential, UnaryTypeData};
pub use wl::counting_equiv_oracle;
