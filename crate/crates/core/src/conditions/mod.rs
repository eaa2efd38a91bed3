//! Witness search and horizon-bounded verdicts for the shift-like conditions.
//!
//! Limit conditions are only semi-decided: a checker compares exact defect data
//! up to a horizon `H` against a [`Schedule`]. "Fails" verdicts always carry an
//! unconditional certificate; failing data without one is reported as
//! inconclusive.
//!
//! For tower systems `f` is a bijection that maps levels onto levels, so
//! `f^{-1}(ℬ) = ℬ` holds structurally and is not checked.

pub mod certificate;
pub mod checks;
pub mod classify;
pub mod schedule;
pub mod verdict;
pub mod witness;

pub use certificate::{heaviest_cell, ksc_failure_certificate, CertificateStep, KitaiFailureCertificate};
pub use checks::{
    bdp_generator_certificate, check_hsc, check_ksc, check_msc, grc_witness, kitai_generator_check, single_witness,
    push_csv, window_max_density, Condition, ConditionReport, KitaiGeneratorReport, CSV_HEADER,
};
pub use classify::{classify, classify_with, closed_form, ClosedForm, ConditionSummary, DynamicsReport, Label, Property};
pub use schedule::{tail_window, Schedule};
pub use verdict::{record_lows, Basis, Verdict};
pub use witness::{evaluate_triple, optimal_witness, WitnessTriple, SPLIT_BITS};
