//! Critical planar Voronoi percolation.
//!
//! * [`geometry`]: Poisson point sets, Delaunay/Voronoi tessellations, padding certificates.
//! * [`events`]: colored configurations, crossings, arm events, hat events, pivotality.
//! * [`dynamics`]: frozen, moving and mixed dynamics, α-stable movers, `X_R`, the metric `d`.
//! * [`spectral`]: truth tables, Walsh–Fourier spectra, quenched and annealed spectral samples.
//! * [`estimators`]: Monte Carlo drivers producing [`estimators::McEstimate`] values.

pub mod dynamics;
pub mod events;
pub mod geometry;
pub mod rng;
pub mod spectral;
pub mod estimators;
