//! Character sums, Fourier analysis, sphere counting and distance /
//! dot-product incidences over the rings `Z/p^l`, `p` an odd prime.
//!
//! Each quantity is computed two ways (a brute-force enumeration and an
//! analytic route through exponential sums or the Fourier transform) and the
//! analytic bounds on the error terms are exposed next to the values, so the
//! crate doubles as a verification harness.

pub mod charsum;
pub mod error;
pub mod fourier;
pub mod incidence;
pub mod points;
pub mod pool;
pub mod rng;
pub mod ring;
pub mod sharpness;
pub mod sphere;

pub use charsum::ComplexValue;
pub use error::{Error, Result};
pub use ring::{Modulus, RingElement, Valuation};
