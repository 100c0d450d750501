//! Independent gamma-ratio reference values the series evaluate to.
//! Denominator gammas go through the total reciprocal (a pole there makes
//! the whole ratio an exact zero); numerator poles surface as errors.

use crate::error::Result;
use crate::scalar::{gamma, recip_gamma, C};

/// B(x₁, x₂) = Γ(x₁)Γ(x₂)/Γ(x₁+x₂).
pub fn beta(x1: C, x2: C) -> Result<C> {
    cdi_lhs(x1, x2, C::new(0.0, 0.0))
}

/// Γ(x₁)Γ(x₂)/Γ(x₁+x₂+a).
pub fn cdi_lhs(x1: C, x2: C, a: C) -> Result<C> {
    Ok(gamma(x1)? * gamma(x2)? * recip_gamma(x1 + x2 + a)?)
}

/// Γ(x₁)Γ(x₂)Γ(s-x₁-x₂) / (Γ(t-x₁)Γ(t-x₂)Γ(u+x₁+x₂)).
pub fn clf_lhs(x1: C, x2: C, s: C, t: C, u: C) -> Result<C> {
    Ok(gamma(x1)?
        * gamma(x2)?
        * gamma(s - x1 - x2)?
        * recip_gamma(t - x1)?
        * recip_gamma(t - x2)?
        * recip_gamma(u + x1 + x2)?)
}

/// ∏_j Γ(x_j) / ∏_j Γ(u-x_j) over three variables.
pub fn tvd_lhs(x: [C; 3], u: C) -> Result<C> {
    let mut v = C::new(1.0, 0.0);
    for xj in x {
        v *= gamma(xj)?;
    }
    for xj in x {
        v *= recip_gamma(u - xj)?;
    }
    Ok(v)
}
