use crate::algebra::ExpSeries;
use crate::error::{Error, Result};

/// Finds `φ` with `∂_α φ = ω_α` for all `α`, with no constant of integration.
/// Fails when the 1-form is not closed.
pub fn integrate_gradient(omega: &[ExpSeries]) -> Result<ExpSeries> {
    let first = omega.first().ok_or_else(|| Error::Invalid("empty gradient".into()))?;
    let mut phi = first.zero_like();
    for (a, w) in omega.iter().enumerate() {
        let r = w - &phi.derivative(a)?;
        if !r.is_zero() {
            phi = &phi + &r.integrate(a)?;
        }
    }
    for (a, w) in omega.iter().enumerate() {
        if &phi.derivative(a)? != w {
            return Err(Error::Integrability(format!("component {} is not a gradient component", a + 1)));
        }
    }
    Ok(phi)
}
