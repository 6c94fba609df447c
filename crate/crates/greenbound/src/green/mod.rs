//! Green functions: free-space kernel, closed-form oracles, corrector-split
//! columns and sampled tables.

pub mod fundamental;
pub mod numeric;
pub mod oracle;
pub mod table;

pub use fundamental::{fundamental_solution, FundamentalSolution};
pub use numeric::{
    corrector_tolerance, farthest_points, green_numeric, green_numeric_many, poisson_kernel, select_sources, EXCLUSION,
};
pub use oracle::{green_analytic, green_analytic_gradient, oracle_for, sphere_green_legendre, GreenOracle};
pub use table::{build_green_table, build_green_table_with, GreenTable, InvariantCheck, Provenance};
