//! Finite-dimensional Heisenberg-type groups `G = ℂᵏ × ℂᵈ`: group and algebra
//! arithmetic, polynomial calculus with left-invariant fields, the heat
//! semigroup on polynomials, the Taylor map into the non-commutative Fock
//! space, heat-kernel Monte Carlo and iterated Itô integrals.

pub mod algebra;
pub mod error;
pub mod fock;
pub mod geometry;
pub mod poly;
pub mod projections;
pub mod stochastic;

pub use algebra::{AlgebraElement, BasisIndex, GroupConfig, GroupElement};
pub use error::{Error, Result};
pub use poly::{Direction, Polynomial, Var};
