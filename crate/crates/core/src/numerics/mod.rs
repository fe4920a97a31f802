//! Small numerical building blocks: elliptic integrals, quadrature,
//! monotone interpolation and an embedded Runge-Kutta integrator.

pub mod elliptic;
pub mod interp;
pub mod ode;
pub mod quadrature;
