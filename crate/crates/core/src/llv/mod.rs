//! Cohomology rings, Lefschetz sl₂ triples and the Lie algebras they
//! generate; Fujiki constants, Hodge decompositions and the Deligne
//! generator of a period point.

mod closure;
mod hodge;
mod ops;
mod ring;

pub use closure::{lie_closure, lie_closure_exact, ClosureOptions, ExactClosure, LieClosure};
pub use hodge::{
    deligne_generator, fujiki_constant, fujiki_constant_with, h2_spectrum, hodge_decompose,
    plane_generators, DeligneGenerator, FujikiFit, HodgeDecomposition,
};
pub use ops::{
    grading_h, grading_h_exact, lefschetz_basis, lefschetz_e, lefschetz_e_exact, lefschetz_f,
    lefschetz_f_exact, lefschetz_generators, lefschetz_generators_exact, operator_norm,
    sl2_residuals, GradedOperator, RatOperator,
};
pub use ring::{CohomologyRing, LatticeBlock, LatticeBlockJson, RingJson};
