//! Discretizations of linear Cosserat (micropolar) elasticity on triangular
//! meshes, plus the manufactured-solution machinery used to verify them.
//!
//! Two methods are implemented side by side:
//!
//! * [`tpsa`] — a cell-centered finite volume scheme built on two-point flux
//!   approximations of the stress, couple-stress, and displacement fluxes,
//!   with cell unknowns (displacement, rotation stress, solid pressure);
//! * [`mfem`] — a lowest-order four-field mixed finite element method with
//!   normal-continuous stress and couple-stress fields and elementwise
//!   constant displacement and rotation multipliers.
//!
//! Both collapse to classical linearized elasticity when the internal length
//! vanishes, and both are exercised by the [`mms`] manufactured cases through
//! the [`harness`] convergence driver.

pub mod harness;
pub mod jet;
pub mod material;
pub mod mesh;
pub mod mfem;
pub mod mms;
pub mod solver;
pub mod tensor;
pub mod tpsa;
