//! Product-of-bumps amplitudes: smooth, compactly supported test functions
//! that localize the zeta and oscillatory integrals near the origin.
//!
//! `phi(x) = scale * prod_i beta((x_i - center_i) / radius_i)` with
//! `beta(u) = exp(-1/(1-u^2))` on `|u| < 1` and 0 outside. Every factor is
//! even about its center, so the value at the origin is `scale * e^{-n}` for
//! centered bumps, and the support is the closed box with the given radii
//! around the centers.

use crate::Error;
use serde::{Deserialize, Serialize};

/// A separable bump amplitude.
#[derive(Debug, Clone, PartialEq)]
pub struct Amplitude {
    /// Per-axis support radii, all positive and finite.
    pub radii: Vec<f64>,
    /// Global scalar multiplier; 0 gives the zero amplitude.
    pub scale: f64,
    /// Per-axis bump centers.
    pub centers: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct AmplitudeFile {
    radii: Vec<f64>,
    scale: f64,
    #[serde(default)]
    centers: Option<Vec<f64>>,
}

/// The one-dimensional bump `exp(-1/(1-u^2))` extended by 0.
pub fn bump(u: f64) -> f64 {
    if u.abs() < 1.0 {
        (-1.0 / (1.0 - u * u)).exp()
    } else {
        0.0
    }
}

impl Amplitude {
    /// Validated constructor.
    pub fn new(radii: Vec<f64>, scale: f64, centers: Vec<f64>) -> Result<Amplitude, Error> {
        if radii.is_empty() {
            return Err(Error::Domain("amplitude needs at least one axis".into()));
        }
        if centers.len() != radii.len() {
            return Err(Error::Domain(format!(
                "amplitude has {} radii but {} centers",
                radii.len(),
                centers.len()
            )));
        }
        if radii.iter().any(|r| !r.is_finite() || *r <= 0.0) {
            return Err(Error::Domain("amplitude radii must be positive and finite".into()));
        }
        if !scale.is_finite() || centers.iter().any(|c| !c.is_finite()) {
            return Err(Error::Domain("amplitude scale and centers must be finite".into()));
        }
        Ok(Amplitude { radii, scale, centers })
    }

    /// The standard centered bump with radius 1 on every axis and scale 1.
    pub fn unit(n: usize) -> Amplitude {
        Amplitude {
            radii: vec![1.0; n],
            scale: 1.0,
            centers: vec![0.0; n],
        }
    }

    /// Ambient dimension.
    pub fn n(&self) -> usize {
        self.radii.len()
    }

    /// Pointwise value.
    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut v = self.scale;
        for ((&xi, &r), &c) in x.iter().zip(&self.radii).zip(&self.centers) {
            if v == 0.0 {
                return 0.0;
            }
            v *= bump((xi - c) / r);
        }
        v
    }

    /// Value at the origin, `scale * e^{-n}` when all centers are 0.
    pub fn at_origin(&self) -> f64 {
        let zeros = vec![0.0; self.n()];
        self.eval(&zeros)
    }

    /// The support box, per axis `[center - radius, center + radius]`.
    pub fn support(&self) -> Vec<(f64, f64)> {
        self.radii
            .iter()
            .zip(&self.centers)
            .map(|(&r, &c)| (c - r, c + r))
            .collect()
    }

    /// Proof that the amplitude vanishes identically on the box: some axis
    /// interval misses the open support interval of its bump factor, or the
    /// scale is 0. A `false` answer promises nothing.
    pub fn is_zero_on(&self, bx: &[(f64, f64)]) -> bool {
        if self.scale == 0.0 {
            return true;
        }
        bx.iter()
            .zip(&self.radii)
            .zip(&self.centers)
            .any(|((&(lo, hi), &r), &c)| hi <= c - r || lo >= c + r)
    }

    /// The reflected amplitude `x -> phi(signs * x)`: each bump factor is
    /// even, so only the centers move.
    pub fn reflect(&self, signs: &[i8]) -> Amplitude {
        Amplitude {
            radii: self.radii.clone(),
            scale: self.scale,
            centers: self
                .centers
                .iter()
                .zip(signs)
                .map(|(&c, &s)| if s < 0 { -c } else { c })
                .collect(),
        }
    }

    /// Serializes to the on-disk JSON form.
    pub fn to_json(&self) -> String {
        let file = AmplitudeFile {
            radii: self.radii.clone(),
            scale: self.scale,
            centers: Some(self.centers.clone()),
        };
        serde_json::to_string_pretty(&file).expect("amplitude serialization cannot fail")
    }

    /// Parses the on-disk JSON form; absent centers default to 0.
    pub fn from_json(text: &str) -> Result<Amplitude, Error> {
        let file: AmplitudeFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("amplitude JSON: {e}")))?;
        let centers = file
            .centers
            .unwrap_or_else(|| vec![0.0; file.radii.len()]);
        Amplitude::new(file.radii, file.scale, centers)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn the_origin_value_of_a_centered_bump_is_scale_times_e_minus_n() {
        for n in 1..=3 {
            let phi = Amplitude::unit(n);
            let expected = (-(n as f64)).exp();
            assert!((phi.at_origin() - expected).abs() < 1e-15);
        }
        let phi = Amplitude::new(vec![0.5, 2.0], 3.0, vec![0.0, 0.0]).unwrap();
        assert!((phi.at_origin() - 3.0 * (-2.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn values_vanish_outside_the_support_box() {
        let phi = Amplitude::new(vec![0.5, 1.0], 1.0, vec![0.25, 0.0]).unwrap();
        assert_eq!(phi.eval(&[0.76, 0.0]), 0.0);
        assert_eq!(phi.eval(&[-0.26, 0.0]), 0.0);
        assert_eq!(phi.eval(&[0.25, 1.0]), 0.0);
        assert!(phi.eval(&[0.25, 0.99]) > 0.0);
        assert_eq!(phi.support(), vec![(-0.25, 0.75), (-1.0, 1.0)]);
    }

    #[test]
    fn the_interval_test_certifies_vanishing_boxes() {
        let phi = Amplitude::unit(2);
        assert!(phi.is_zero_on(&[(1.0, 2.0), (0.0, 0.5)]));
        assert!(phi.is_zero_on(&[(0.0, 0.5), (-3.0, -1.0)]));
        assert!(!phi.is_zero_on(&[(0.5, 1.5), (0.0, 0.5)]));
        let zero = Amplitude::new(vec![1.0], 0.0, vec![0.0]).unwrap();
        assert!(zero.is_zero_on(&[(0.0, 0.1)]));
    }

    #[test]
    fn reflection_moves_the_centers_only() {
        let phi = Amplitude::new(vec![1.0, 2.0], 0.5, vec![0.25, -0.75]).unwrap();
        let r = phi.reflect(&[-1, 1]);
        assert_eq!(r.centers, vec![-0.25, -0.75]);
        for &(a, b) in &[(0.3, 0.4), (-0.5, 1.1), (0.0, 0.0)] {
            let lhs = phi.eval(&[-a, b]);
            let rhs = r.eval(&[a, b]);
            assert!((lhs - rhs).abs() <= 1e-15 * (1.0 + lhs.abs()));
        }
    }

    #[test]
    fn json_round_trips_and_rejects_bad_input() {
        let phi = Amplitude::new(vec![1.0, 0.5], 2.0, vec![0.0, 0.25]).unwrap();
        let text = phi.to_json();
        let back = Amplitude::from_json(&text).unwrap();
        assert_eq!(phi, back);
        let defaulted = Amplitude::from_json(r#"{"radii":[1.0,1.0],"scale":1.0}"#).unwrap();
        assert_eq!(defaulted.centers, vec![0.0, 0.0]);
        assert!(Amplitude::from_json(r#"{"radii":[0.0],"scale":1.0}"#).is_err());
        assert!(Amplitude::from_json(r#"{"radii":[1.0],"scale":1.0,"centers":[1,2]}"#).is_err());
        assert!(Amplitude::from_json("not json").is_err());
    }
}
