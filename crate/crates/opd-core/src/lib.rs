//! One-sided positive decompositions of bipartite quantum states.
//!
//! A bipartite density operator can be written as a conical combination
//! `rho_SE = sum_a w_a D_a (x) rho_a` with nonnegative weights, environmental
//! density operators `rho_a`, and general system operators `D_a` drawn from
//! the dual of a positive operator frame. Propagating each term through its
//! own completely positive trace-preserving map then fixes the reduced
//! dynamics of the open system even in the presence of initial correlations.
//!
//! The crate provides:
//!
//! - [`hs`]: dense complex operators, Hilbert-Schmidt geometry, tensor
//!   products, partial traces and the operator Schmidt decomposition;
//! - [`frames`]: the generalized-Pauli positive frame and the basis-induced
//!   family with their closed-form duals, frame maps, bounds and canonical
//!   duals;
//! - [`opd`]: decomposition, reconstruction, reduction to the minimal term
//!   count (the operator Schmidt rank) with a checkable certificate;
//! - [`dynamics`]: qubit Pauli-channel semigroups, term-wise propagation and
//!   the exact global-unitary cross-check;
//! - [`positivity`]: the geometry of initial states that stay positive under
//!   two-map semigroup propagation, with classification and
//!   ellipsoid-in-ball containment analysis;
//! - [`io`]: JSON/CSV formats and rate configs shared with the CLI and the
//!   Python bindings.

pub mod dynamics;
pub mod error;
pub mod frames;
pub mod hs;
pub mod io;
pub mod opd;
pub mod positivity;
pub mod random;

pub use error::{Error, Result};
pub use hs::{
    hs_inner, pauli_matrices, schmidt_decompose, tensor, BipartiteOperator, HsOperator,
    SchmidtDecomposition, C64, DEFAULT_TOL,
};

pub use frames::{
    basis_induced_family, canonical_labels, gellmann_basis, hermitian_basis, pauli_frame,
    verify_duality, FrameKind, FrameLabel, OperatorFrame,
};

pub use opd::{cost, decompose, reconstruct, reduce, reduced_state, Opd, OpdTerm, ReductionCertificate};

pub use dynamics::{
    channel_apply, evolve_opd, exact_reduced_evolution, microscopic_map, semigroup_compose_check,
    Evolved, MicroscopicModel, PauliChannel, PauliChannelFamily,
};

pub use positivity::{
    classify, ellipsoid_ball_containment, evolved_violation, in_initial_domain, opd_from_v,
    sample_domain, sphere_oracle_max, state_from_v, Containment, DomainSample, PositivityQuery,
    PositivityVerdict, TwoMapRates, VerdictKind,
};
