//! Automorphic vector fields on hyperbolic surfaces and the surgery calculus
//! that assembles them into flows on 3-manifolds.
//!
//! The numerical core ([`moebius`], [`autovec`], [`flowlab`]) is generic over
//! the scalar type through [`Scalar`]; the aliases below fix it to `f64`, which
//! is what the command-line front end uses. Index arithmetic in [`surgery`] is
//! exact (rational), and the homology side of [`heegaard`] is integral.

// `!(x > 0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// index loops read closer to the matrix formulas
#![allow(clippy::needless_range_loop)]

pub mod autovec;
pub mod commands;
pub mod config;
pub mod flowlab;
pub mod heegaard;
pub mod moebius;
pub mod portrait;
pub mod scalar;
pub mod surgery;

pub use num_complex::Complex;
pub use scalar::Scalar;

/// Double-precision complex number.
pub type C64 = Complex<f64>;

pub type Moebius = moebius::MoebiusMap<f64>;
pub type Ball = moebius::GroupBall<f64>;
pub type Theta = autovec::ThetaSeries<f64>;
pub type Automorphic = autovec::AutomorphicField<f64>;
pub type Planar = autovec::PlanarField<f64>;
pub type Orbit = flowlab::Trajectory<f64>;
pub type Zero = flowlab::ZeroRecord<f64>;
pub type Chart = flowlab::FlowBoxChart<f64>;
pub type BallExtension = heegaard::BallExtensionField<f64>;
