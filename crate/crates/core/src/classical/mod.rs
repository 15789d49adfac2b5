//! One-variable facts the cube inequalities reduce to: Chebyshev
//! polynomials, conformal maps of lens domains, closed-form bounds, and the
//! inequality for polynomials with a spectral gap at zero.

pub mod beckner;
pub mod bounds;
pub mod chebyshev;
pub mod erdelyi;
pub mod lens;
pub mod poly;

pub use beckner::{beckner_membership, moment_comp1_constant, MomentConstant};
pub use bounds::{bound_value, BoundId, BoundParams};
pub use chebyshev::{chebyshev_deriv_at_one, chebyshev_t, chebyshev_t_complex};
pub use erdelyi::{erdelyi_evaluate, ErdelyiEvaluation};
pub use lens::{theta_and_radius, theta_p, LensDomain, LensSide};
