//! Exact-arithmetic engine for irregular conformal blocks of the Virasoro
//! algebra, with an application to series expansions of the Painlevé V and
//! IV tau functions.
//!
//! The crate is organized as:
//! - [`algebra`]: rationals, sparse multivariate Laurent polynomials,
//!   rational functions, and a fraction-free linear solver
//! - [`partitions`]: integer partition enumeration and hook-length helpers
//! - [`verma`]: rank-r Verma (Whittaker) modules with exact straightening,
//!   bilinear pairings against dual highest-weight vectors, Gram matrices
//! - [`fock`]: Heisenberg Fock spaces, the free-boson Virasoro action, and
//!   the Fock-backed pairing used as an independent oracle
//! - [`vo`]: the vertex-operator constructors (regular, rank 0 on rank r,
//!   rank r, and the weight-zero special case), relation and null-vector
//!   checkers
//! - [`series`]: exact series of the shape `t^A e^{E t^g} (c0 + c1/t + …)`
//! - [`blocks`]: conformal-block assembly, Kummer expansions, the AGT
//!   four-point series
//! - [`painleve`]: Hamiltonian ODE residuals for the tau-function expansions
//! - [`jsonio`]: canonical JSON forms and the on-disk coefficient cache

pub mod algebra;
pub mod blocks;
pub mod fock;
pub mod jsonio;
pub mod painleve;
pub mod partitions;
pub mod series;
pub mod verma;
pub mod vo;
