//! The `C` parameter over `Q(i)`, standing in for the complex numbers.

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::field::Scalar;

/// `f(z) = -z/(2z+1)`; `None` at the pole `z = -1/2`.
pub fn mobius_f(z: &Scalar) -> Option<Scalar> {
    super::c_partner(z)
}

/// `|z + 1/2|² - 1/4` and `Im z`.
fn disk_offset(z: &Scalar) -> (BigRational, BigRational) {
    let g = z.as_gaussian().expect("a Q(i) element");
    let half = BigRational::new(1.into(), 2.into());
    let re = &g.re + &half;
    let quarter = &half * &half;
    (&re * &re + &g.im * &g.im - quarter, g.im.clone())
}

/// Membership in `𝒰`: the open disk `|z + 1/2| < 1/2` plus the part of its
/// boundary with `Im z ≥ 0`.
pub fn in_region_u(z: &Scalar) -> bool {
    let (d, im) = disk_offset(z);
    d.is_negative() || (d.is_zero() && !im.is_negative())
}

/// The member of `{z, f(z)}` lying in `𝒰`.
pub fn complex_canonical(z: &Scalar) -> Scalar {
    if in_region_u(z) {
        return z.clone();
    }
    mobius_f(z).expect("the pole lies in the region")
}
