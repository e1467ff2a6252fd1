//! Gaussian-assumed step with exact nonlinearity handling: moments by
//! quadrature, then moment matching.

use crate::models::StateSpaceModel;
use crate::oracle::{moments, QuadratureConfig};

use super::{FilterStepInput, GaussianBelief, Result};

/// The exact-moment Gaussian-assumed filter: mean and covariance are the
/// ratios of the step integrals, with no linearization anywhere.
pub fn oracle_step(
    model: &dyn StateSpaceModel,
    input: &FilterStepInput,
    quad: &QuadratureConfig,
) -> Result<GaussianBelief> {
    let step = input.to_step_data();
    let mom = moments(model, &step, quad)?;
    Ok(GaussianBelief::repaired(mom.mean(), mom.covariance())?.0)
}
