//! Cylinder probabilities of the equilibrium measure, weak-Gibbs defects,
//! the two-sided cylinder envelope, and the classifier.

mod classify;
mod cylinder;
mod defect;

pub use classify::{
    check_alphabets, classify, make_witnesses, ClassifyOptions, DefectPoint, GibbsReport, Verdict, Witness,
    WitnessDefect, WitnessFamily,
};
pub use cylinder::{cylinder_estimate, mme_oracle, perron_data, CylinderEstimate, PerronData, PositionRatio, Windowing};
pub use defect::{
    cylinder_correction, exact_pressure, k_envelope, weak_gibbs_defect, DefectOptions, DefectReport, DefectRow,
    DefectSource, Envelope,
};
