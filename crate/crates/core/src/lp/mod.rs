//! Composition-operator orbits of simple functions, `L^p` norms and the
//! Fréchet metric of convergence in measure. Norms are reported as exact
//! `p`-th powers.

pub mod metric;
pub mod orbit;
pub mod simple;

pub use metric::{frechet, lp_norm_p, lp_norm_p_enclosure, measure_at_least, Frechet};
pub use orbit::{inverse_orbit_floor, InverseOrbitReport};
pub use simple::{apply_op, SimpleFunction, Term};
