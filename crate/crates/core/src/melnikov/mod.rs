//! Perturbations, their reduction to integrals over the pendulum orbits,
//! the rewrite identities between those integrals and the canonical form.

pub mod basis;
pub mod canonical;
pub mod combination;
pub mod identities;
pub mod perturbation;
pub mod trig;

pub use basis::{BasisKind, BasisTerm};
pub use canonical::{fuzz_reduction, reduce_ladder, FuzzReport, reduce_to_canonical, CanonicalForm, CanonicalLadder};
pub use combination::{
    assemble_piecewise, assemble_smooth, series_of, Expansion, Family, FamilyParams, Ladder,
    MelnikovCombination, Parity, Term,
};
pub use identities::{rewrite_I, rewrite_J, LinearRelation, QuadResidual};
pub use perturbation::{
    CoefficientTable, NumericField, Perturbation, PerturbationDoc, PiecewisePerturbation,
    SmoothPerturbation, TrigBasis,
};
pub use trig::{cos_basis_to_cos_powers, even_part_to_cos_basis, CosBasisPoly, TrigPoly};

impl Perturbation {
    /// Symmetry-reduced combination of either family.
    pub fn assemble(&self) -> MelnikovCombination {
        match self {
            Perturbation::Smooth(p) => assemble_smooth(p),
            Perturbation::Piecewise(p) => assemble_piecewise(p),
        }
    }
}
