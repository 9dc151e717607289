//! Polya-Boltzmann samplers.

mod basic;
pub mod dist;
mod engine;
mod structure;

pub use basic::{draw_basic, draw_basic_pointed};
pub use engine::{
    sample_bounded, sample_boltzmann, sample_targeted, Sample, SampleOptions, Target, Targeted, COUNT_CHECK_LIMIT,
};
pub use structure::{
    compose_cycles, distribute_labels, distribute_labels_rooted, label_permutation, CollKind, CoreDraw,
    RootedCSymmetry, Structure, Symmetry,
};
