//! Instance sources and result sinks: the MKP generator, MPS files, the
//! Netlib-style data transform and CSV records.

mod generator;
mod mps;
mod results;

pub use generator::{generate_mkp, MkpParams};
pub use mps::{parse_mps, parse_mps_with, write_mps, MpsError, MpsFormat, MpsModel};
pub use results::{
    format_float, read_results, write_results, write_results_csv, write_trace, ResultRecord, TraceRecord,
    RESULTS_HEADER, TRACE_HEADER,
};

use crate::lp_model::{LpInstance, RHS_PERTURBATION};

/// Upper-bound cap applied by [`netlib_modify`].
pub const NETLIB_UPPER_CAP: f64 = 100.0;

/// Makes an external LP usable by the online passes: `b_i ← max(b_i, 10⁻³)`
/// and `u_j ← min(u_j, 100)`. Rows are already in `≤` form after parsing.
pub fn netlib_modify(inst: &LpInstance) -> LpInstance {
    inst.perturb_small_rhs(RHS_PERTURBATION).cap_upper(NETLIB_UPPER_CAP)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn netlib_transform() {
        let inst = LpInstance::from_dense(
            &[vec![1.0, 2.0], vec![3.0, 0.0]],
            vec![0.0, 5.0],
            vec![1.0, 1.0],
            Some(vec![f64::INFINITY, 7.0]),
        )
        .unwrap();
        let out = netlib_modify(&inst);
        assert_eq!(out.rhs(), &[0.001, 5.0]);
        assert_eq!(out.upper(), &[100.0, 7.0]);
        assert_eq!(netlib_modify(&out), out);
    }
}
