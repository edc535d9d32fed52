//! Fourier-analytic layer on even axisymmetric functions.

mod spherical;
mod transform;

pub use spherical::{SphericalFunction, DEFAULT_DEGREE, DEFAULT_MAX_DEGREE};
pub use transform::{
    axisym_homogeneous_ft, ball_transform, frac_laplacian_section, frac_laplacian_spectral,
    lemma22_via_fracderiv, lemma22_via_sphere, multiplier, parseval_sphere_check, q3_special,
    Q3Result, Q3Sign, ODD_ORDER_WINDOW,
};
