//! Exact laws of the planar random flight: densities of the position and of
//! the distance `R(t)`, moments of `R(t)`, and Fisher information of a
//! single increment.

pub mod density;
pub mod fisher;
pub mod moments;

pub use density::{
    absolutely_continuous_mass, bessel_limit_density, planar_density_ac, radial_density_offset,
    radial_density_origin, DensityValue,
};
pub use fisher::{cramer_rao_bound, fisher_info, fisher_info_quadrature, Bias, FisherInfo};
pub use moments::{moment_closed_form_paper, moment_quadrature};

use crate::error::{Error, Result};
use crate::flight::FlightParams;

pub(crate) fn require_origin_centered(params: &FlightParams) -> Result<()> {
    let o = params.origin();
    if o.x == 0.0 && o.y == 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "this law assumes a flight started at (0, 0), got ({}, {})",
            o.x, o.y
        )))
    }
}
