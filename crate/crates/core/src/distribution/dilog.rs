//! Real dilogarithm on `(−∞, 1]`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const PI2_6: f64 = PI * PI / 6.0;

fn series(z: f64) -> f64 {
    let mut term = z;
    let mut sum = 0.0f64;
    let mut k = 1.0f64;
    while term.abs() > 1e-18 * sum.abs().max(1e-300) {
        sum += term / (k * k);
        k += 1.0;
        term *= z;
        if k > 200.0 {
            break;
        }
    }
    sum
}

/// `Li₂(z) = Σ z^k/k²`, continued to `z < −1` by inversion.
pub fn dilog(z: f64) -> Result<f64> {
    if z.is_nan() || z > 1.0 {
        return Err(Error::OutsideRealBranch);
    }
    Ok(if z == 1.0 {
        PI2_6
    } else if z.abs() <= 0.5 {
        series(z)
    } else if z > 0.5 {
        PI2_6 - z.ln() * (-z).ln_1p() - series(1.0 - z)
    } else if z >= -1.0 {
        let w = z / (z - 1.0);
        -series(w) - 0.5 * (-z).ln_1p().powi(2)
    } else {
        let inner = dilog(1.0 / z)?;
        -inner - 0.5 * (-z).ln().powi(2) - PI2_6
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn special_values() {
        assert_eq!(dilog(1.0).unwrap(), PI2_6);
        assert_eq!(dilog(0.0).unwrap(), 0.0);
        assert!((dilog(-1.0).unwrap() + PI * PI / 12.0).abs() < 1e-15);
        let half = PI * PI / 12.0 - 0.5 * 2f64.ln().powi(2);
        assert!((dilog(0.5).unwrap() - half).abs() < 1e-15);
        assert!((dilog(2f64.sqrt() - 1.0).unwrap() - 0.467_533_997_023_004_6).abs() < 1e-15);
        assert_eq!(dilog(1.5), Err(Error::OutsideRealBranch));
        assert_eq!(dilog(f64::NAN), Err(Error::OutsideRealBranch));
    }

    #[test]
    fn continuous_across_switches() {
        for z in [0.5, -0.5, -1.0] {
            let l = dilog(z - 1e-12).unwrap();
            let r = dilog(z + 1e-12).unwrap();
            assert!((l - r).abs() < 1e-10, "{z}");
        }
        assert!(dilog(-1e6).unwrap() < dilog(-10.0).unwrap());
    }
}
