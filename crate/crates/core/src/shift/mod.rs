//! Weighted backward shifts: weights induced by tower systems, product and
//! coordinate-norm criteria, and the example norms on finitely supported
//! sequences.

pub mod criteria;
pub mod examples;
pub mod norms;
pub mod weights;

pub use criteria::{
    bdp_exceptional_positions, classify_bilateral, classify_unilateral, product_criterion, shift_kitai, ProductReport, ShiftVerdicts,
    SPACE_ASSUMPTION,
};
pub use examples::{equicontinuity_probe, example_norm, ExampleNorm, ProbeReport, ProbeRow, SparseSeq};
pub use norms::{NormSeq, NormSource};
pub use weights::{weights_from_system, ShiftKind, WeightSeq, WeightSource, WeightTable};
