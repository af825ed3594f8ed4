//! Gravitational versus accelerational Dirac Hamiltonians for the neutron in
//! the Foldy-Wouthuysen representation, the spin-bearing acceleration
//! generator with its anomalous moment `μ_a`, numerical spin dynamics on a
//! one-dimensional grid, and the astrophysical length scales of the `μ_a` term.

pub mod astro;
pub mod boostgen;
pub mod hamiltonians;
pub mod numgrid;
pub mod opalg;
