//! Invariant constant-mean-curvature surfaces in H²×ℝ.
//!
//! The crate covers four layers:
//!
//! - [`geometry`]: the Poincaré disk model of H² with the distance fields
//!   (to a circle, a horocycle, a geodesic) whose level sets generate the
//!   rotational, parabolic and hyperbolic symmetry families.
//! - [`profiles`]: the one-dimensional profile functions of each family and
//!   their closed forms.
//! - [`surfaces`] and [`boundary`]: graphs built from those profiles, their
//!   symbolic geodesic boundaries in ∂(H²×ℝ), and a classifier for curves
//!   that can bound a properly embedded CMC-H surface.
//! - [`dirichlet`]: a finite-volume Newton solver for `Q_H(u) = 0` on a
//!   truncated geodesic disk, with data prescribed as offsets from the
//!   spherical cap, plus the sub/supersolution barriers used to pin it.
//!
//! [`cli`] and [`io`] wire everything to the `hcmc` binary.

pub mod boundary;
pub mod cli;
pub mod dirichlet;
pub mod error;
pub mod geometry;
pub mod io;
pub mod profiles;
pub mod quad;
pub mod surfaces;

pub use error::{Error, Result};

/// Tool version recorded in emitted data files.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
