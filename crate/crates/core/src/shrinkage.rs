//! Proximal shrinkage kernels used by the `d`-updates.
//!
//! All kernels return exactly zero at a zero input, where the `ρ/|ρ|` factor
//! of the closed forms is undefined and zero is the unique minimizer.

use crate::error::{check_positive, Error, Result};

/// Soft threshold `sign(ρ) max{|ρ| - a, 0}`, the proximal map of `a|·|`.
#[inline]
pub fn shrink_tv(rho: f64, a: f64) -> f64 {
    let mag = rho.abs() - a;
    if mag > 0.0 {
        mag.copysign(rho)
    } else {
        0.0
    }
}

/// Proximal map of `a (β|x| + |x|³/3)`.
///
/// Solves `β sign(x) + x|x| + (x - ρ)/a = 0`. Written as
/// `sign(ρ) 2q / (1 + √(1 + 4aq))` with `q = max{|ρ| - aβ, 0}`, which equals
/// `ρ/(2a|ρ|) (-1 + √(1 + 4aq))` without the cancellation for small `aq`.
#[inline]
pub fn shrink_spohn(rho: f64, a: f64, beta: f64) -> f64 {
    let q = rho.abs() - a * beta;
    if q > 0.0 {
        (2.0 * q / (1.0 + (1.0 + 4.0 * a * q).sqrt())).copysign(rho)
    } else {
        0.0
    }
}

/// Isotropic 2D shrinkage: vector soft threshold of `(s_x, s_y)` by
/// `1 / mu_cell`, where `mu_cell = μ h_x h_y`.
#[inline]
pub fn shrink_iso2d(s_x: f64, s_y: f64, mu_cell: f64) -> (f64, f64) {
    let s = s_x.hypot(s_y);
    let mag = s - 1.0 / mu_cell;
    if s > 0.0 && mag > 0.0 {
        let scale = mag / s;
        (s_x * scale, s_y * scale)
    } else {
        (0.0, 0.0)
    }
}

/// Frozen-coefficient 2D Spohn shrinkage.
///
/// Each component solves its own scalar equation in which the coupling
/// `|d_xy|` has been replaced by `|d_x| s / |s_x|` (resp. `y`):
/// `β sign(d) |s_c|/s + d|d| s/|s_c| + mu_cell (d - s_c) = 0`.
#[inline]
pub fn shrink_spohn2d(s_x: f64, s_y: f64, mu_cell: f64, beta: f64) -> (f64, f64) {
    let s = s_x.hypot(s_y);
    if s == 0.0 {
        return (0.0, 0.0);
    }
    (
        spohn2d_component(s_x, s, mu_cell, beta),
        spohn2d_component(s_y, s, mu_cell, beta),
    )
}

#[inline]
fn spohn2d_component(s_c: f64, s: f64, mu_cell: f64, beta: f64) -> f64 {
    let abs_c = s_c.abs();
    if abs_c == 0.0 {
        return 0.0;
    }
    // c = s / |s_c| >= 1 multiplies the cubic term and divides the facet term
    let c = s / abs_c;
    let q = abs_c - beta / (c * mu_cell);
    if q > 0.0 {
        (2.0 * q / (1.0 + (1.0 + 4.0 * c * q / mu_cell).sqrt())).copysign(s_c)
    } else {
        0.0
    }
}

/// Facet weight of the cubic Spohn energy `β|d| + |d|³/3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpohnParams {
    beta: f64,
}

impl SpohnParams {
    /// Only `p = 3` has closed-form shrinkage; other exponents are rejected.
    pub fn new(beta: f64, p: u32) -> Result<Self> {
        if p != 3 {
            return Err(Error::UnsupportedExponent(p));
        }
        check_positive("beta", beta)?;
        Ok(Self { beta })
    }

    pub fn cubic(beta: f64) -> Result<Self> {
        Self::new(beta, 3)
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn p(&self) -> u32 {
        3
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn spohn_residual(x: f64, rho: f64, a: f64, beta: f64) -> f64 {
        beta * x.signum() + x * x.abs() + (x - rho) / a
    }

    /// Left-hand side of the approximated x-equation for the 2D Spohn kernel.
    fn spohn2d_residual(d: f64, s_c: f64, s: f64, mu_cell: f64, beta: f64) -> f64 {
        beta * d.signum() * s_c.abs() / s + d * d.abs() * s / s_c.abs() + mu_cell * (d - s_c)
    }

    #[test]
    fn tv_examples() {
        assert_eq!(shrink_tv(5.0, 2.0), 3.0);
        assert_eq!(shrink_tv(-5.0, 2.0), -3.0);
        assert_eq!(shrink_tv(1.0, 2.0), 0.0);
        assert_eq!(shrink_tv(0.0, 2.0), 0.0);
    }

    #[test]
    fn spohn_examples() {
        let x = shrink_spohn(3.0, 1.0, 1.0);
        assert!((x - 1.0).abs() < 1e-15);
        assert!(spohn_residual(x, 3.0, 1.0, 1.0).abs() < 1e-12);
        assert_eq!(shrink_spohn(0.5, 1.0, 1.0), 0.0);
        let y = shrink_spohn(-3.0, 1.0, 1.0);
        assert!((y + 1.0).abs() < 1e-15);
        assert!(spohn_residual(y, -3.0, 1.0, 1.0).abs() < 1e-12);
        assert_eq!(shrink_spohn(0.0, 1.0, 1.0), 0.0);
    }

    #[test]
    fn iso2d_examples() {
        let (dx, dy) = shrink_iso2d(3.0, 4.0, 1.0);
        assert!((dx - 2.4).abs() < 1e-15 && (dy - 3.2).abs() < 1e-15);
        assert_eq!(shrink_iso2d(0.0, 0.0, 1.0), (0.0, 0.0));
        let (ex, ey) = shrink_iso2d(4.0, 3.0, 1.0);
        assert_eq!((ex, ey), (dy, dx));
        assert_eq!(shrink_iso2d(0.3, 0.4, 1.0), (0.0, 0.0));
    }

    #[test]
    fn spohn2d_examples() {
        let (dx, dy) = shrink_spohn2d(3.0, 4.0, 1.0, 1.0);
        assert!((dx - 0.936_931_2).abs() < 1e-6, "dx = {dx}");
        assert!(spohn2d_residual(dx, 3.0, 5.0, 1.0, 1.0).abs() < 1e-10);
        assert!(spohn2d_residual(dy, 4.0, 5.0, 1.0, 1.0).abs() < 1e-10);

        // dead zone: β|s_x|/(mu s) >= |s_x|
        let (zx, _) = shrink_spohn2d(0.3, 0.4, 1.0, 0.5);
        assert_eq!(zx, 0.0);

        let (a, b) = shrink_spohn2d(1.7, 1.7, 2.0, 0.3);
        assert_eq!(a, b);
        assert_eq!(shrink_spohn2d(0.0, 0.0, 1.0, 1.0), (0.0, 0.0));
        let (x0, y0) = shrink_spohn2d(0.0, 2.0, 3.0, 0.1);
        assert_eq!(x0, 0.0);
        assert!(y0 > 0.0);
    }

    #[test]
    fn only_cubic_spohn_is_accepted() {
        assert!(SpohnParams::new(0.5, 3).is_ok());
        assert_eq!(SpohnParams::new(0.5, 2), Err(Error::UnsupportedExponent(2)));
        assert!(SpohnParams::cubic(0.0).is_err());
    }

    proptest! {
        #[test]
        fn spohn_matches_literal_formula(rho in -50.0f64..50.0, a in 1e-3f64..10.0, beta in 1e-3f64..5.0) {
            let literal = if rho == 0.0 {
                0.0
            } else {
                rho / (2.0 * a * rho.abs())
                    * (-1.0 + (1.0 + 4.0 * a * (rho.abs() - a * beta).max(0.0)).sqrt())
            };
            let stable = shrink_spohn(rho, a, beta);
            prop_assert!((stable - literal).abs() <= 1e-10 * (1.0 + literal.abs()));
        }

        #[test]
        fn spohn_is_odd_and_monotone(rho in -20.0f64..20.0, step in 0.0f64..3.0, a in 1e-2f64..5.0, beta in 1e-2f64..3.0) {
            prop_assert_eq!(shrink_spohn(-rho, a, beta), -shrink_spohn(rho, a, beta));
            prop_assert!(shrink_spohn(rho + step, a, beta) >= shrink_spohn(rho, a, beta));
        }

        #[test]
        fn spohn_residual_vanishes(rho in -30.0f64..30.0, a in 1e-2f64..5.0, beta in 1e-2f64..3.0) {
            let x = shrink_spohn(rho, a, beta);
            if x != 0.0 {
                prop_assert!(spohn_residual(x, rho, a, beta).abs() <= 1e-12 * (1.0 + rho.abs() / a));
            } else {
                prop_assert!(rho.abs() <= a * beta);
            }
        }

        #[test]
        fn kernels_move_toward_zero(rho in -30.0f64..30.0, sy in -30.0f64..30.0, a in 1e-2f64..5.0, beta in 1e-2f64..3.0) {
            prop_assert!(shrink_tv(rho, a).abs() <= rho.abs());
            prop_assert!(shrink_spohn(rho, a, beta).abs() <= rho.abs());
            let (dx, dy) = shrink_iso2d(rho, sy, 1.0 / a);
            prop_assert!(dx.abs() <= rho.abs() && dy.abs() <= sy.abs());
            let (ex, ey) = shrink_spohn2d(rho, sy, 1.0 / a, beta);
            prop_assert!(ex.abs() <= rho.abs() && ey.abs() <= sy.abs());
        }

        #[test]
        fn iso2d_is_radial_soft_threshold(sx in -10.0f64..10.0, sy in -10.0f64..10.0, mu in 0.05f64..20.0) {
            let (dx, dy) = shrink_iso2d(sx, sy, mu);
            let radial = shrink_tv(sx.hypot(sy), 1.0 / mu);
            prop_assert!((dx.hypot(dy) - radial).abs() <= 1e-12 * (1.0 + radial));
        }

        #[test]
        fn spohn2d_residuals_vanish(sx in -10.0f64..10.0, sy in -10.0f64..10.0, mu in 0.05f64..20.0, beta in 1e-2f64..2.0) {
            let s = sx.hypot(sy);
            let (dx, dy) = shrink_spohn2d(sx, sy, mu, beta);
            for (d, sc) in [(dx, sx), (dy, sy)] {
                if d != 0.0 {
                    let scale = 1.0 + mu * sc.abs();
                    prop_assert!(spohn2d_residual(d, sc, s, mu, beta).abs() <= 1e-10 * scale);
                }
            }
        }
    }

    #[test]
    fn spohn_tends_to_pure_cubic_as_beta_vanishes() {
        let beta = 1e-12;
        for &(rho, a) in &[(3.0, 1.0), (-0.2, 4.0), (10.0, 0.01), (1e-3, 2.0)] {
            let x: f64 = shrink_spohn(rho, a, beta);
            assert!((x * x.abs() + (x - rho) / a).abs() < 1e-6);
        }
    }
}
