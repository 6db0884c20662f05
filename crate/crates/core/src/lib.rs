//! Carry value transformation (CVT) and generalized XOR over digit vectors
//! in any base, with a CVT-XOR recurrence adder, a property laboratory for
//! the multi-number laws, and a cycle-accounted CAM adder-tree simulator.

pub mod adder;
pub mod camsim;
pub mod digitvec;
pub mod error;
pub mod proplab;
pub mod transforms;

pub use adder::{add_multi, add_pair_iterative, convergence_bound_check, BoundCheck, IterationTrace, MultiAddition};
pub use camsim::{build_tree, cam_step, simulate, AdderTree, CamState, CamUnit, SimulationReport};
pub use digitvec::{to_digits, valuation, Base, DigitVector, GeneralizedDigitVector};
pub use error::{Error, Result};
pub use proplab::{run_campaign, PropertyId, PropertyVerdict, TrialConfig, TrialInput, Trials};
pub use transforms::{
    corollary_predicates, cvt_multi, cvt_pair, ivt_apply, sum_identity_check, transform,
    xor_multi, xor_pair, CorollaryReport, RuleTable, SumIdentity, TransformResult,
};

pub use num_bigint::BigUint;

/// Naturals serialize as decimal strings so reports never lose precision.
pub(crate) mod serde_nat {
    use num_bigint::BigUint;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub mod vec {
        use num_bigint::BigUint;
        use serde::ser::{SerializeSeq, Serializer};

        pub fn serialize<S: Serializer>(v: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for x in v {
                seq.serialize_element(&x.to_string())?;
            }
            seq.end()
        }
    }
}
