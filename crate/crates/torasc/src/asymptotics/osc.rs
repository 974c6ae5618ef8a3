//! Direct numerical evaluation of oscillatory integrals
//!
//! ```text
//! I(t) = integral of  e^{i t f(x)} phi(x) dx
//! ```
//!
//! used to validate the predicted decay rate and leading coefficient for
//! large `|t|`. Plain Gauss quadrature needs several nodes per oscillation,
//! which is hopeless once `t` is large, so the adaptive engine is driven
//! with a per-cell rule that switches regimes:
//!
//! * if the phase `t f` varies by at most one period across the cell
//!   (probed at the center and the face midpoints), the cell is quiet and a
//!   tensor Gauss rule is applied to `phi(x) e^{i t f(x)}` directly;
//! * otherwise the phase is linearized at the cell center,
//!   `f(x) ~ f(c) + <g, x - c>` with `g` from central differences, and the
//!   modulated integral is taken in closed form:
//!   `(integral of phi) * e^{i t f(c)} * prod_k sinc(t g_k w_k / 2)`,
//!   with the amplitude mass supplied by a Gauss rule on `phi` alone.
//!
//! Both rules improve under bisection, so the usual parent-versus-children
//! error estimate steers refinement, and cells are preferentially split
//! along the axis with the fastest phase variation. Negative `t` is handled
//! by conjugation, which makes `I(-t)` bitwise equal to the conjugate of
//! `I(t)`.
//!
//! [`fit_decay`] recovers the decay law from a ladder of samples: it
//! regresses `ln |I(t)| - eta * ln ln t` on `ln t` for each trial log power
//! `eta` and keeps the power with the smallest residual, yielding an
//! empirical exponent and log power to compare against the predicted
//! `|t|^{-1/d} (ln t)^{m-1}`.

use num_complex::Complex64;

use crate::asymptotics::amplitude::Amplitude;
use crate::asymptotics::quad::{integrate_rule, tensor_rule, QuadratureConfig};
use crate::funcspec::FunctionSpec;
use crate::Error;

/// One evaluation of the oscillatory integral at a real parameter.
#[derive(Debug, Clone)]
pub struct OscPoint {
    /// The parameter `t`.
    pub t: f64,
    /// The integral `I(t)`.
    pub value: Complex64,
    /// Quadrature error estimate.
    pub error: f64,
    /// Adaptive rule applications spent.
    pub rule_applications: usize,
}

/// Evaluates `I(t)` by adaptive quadrature with a per-cell regime switch.
pub fn numeric_osc(
    f: &FunctionSpec,
    phi: &Amplitude,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<OscPoint, Error> {
    if phi.n() != f.n {
        return Err(Error::Domain(format!(
            "amplitude has {} variables but the phase has {}",
            phi.n(),
            f.n
        )));
    }
    if !t.is_finite() {
        return Err(Error::Domain("oscillation parameter must be finite".into()));
    }
    if t < 0.0 {
        let flipped = numeric_osc(f, phi, -t, cfg)?;
        return Ok(OscPoint {
            t,
            value: flipped.value.conj(),
            error: flipped.error,
            rule_applications: flipped.rule_applications,
        });
    }

    let domain = phi.support();

    let rule = |bx: &[(f64, f64)]| -> Complex64 {
        let n = bx.len();
        let center: Vec<f64> = bx.iter().map(|&(lo, hi)| 0.5 * (lo + hi)).collect();
        let widths: Vec<f64> = bx.iter().map(|&(lo, hi)| hi - lo).collect();
        let fc = f.eval_unchecked(&center);
        let mut fmin = fc;
        let mut fmax = fc;
        let mut grad = vec![0.0f64; n];
        let mut probe = center.clone();
        for k in 0..n {
            probe[k] = center[k] - 0.5 * widths[k];
            let lo_val = f.eval_unchecked(&probe);
            probe[k] = center[k] + 0.5 * widths[k];
            let hi_val = f.eval_unchecked(&probe);
            probe[k] = center[k];
            fmin = fmin.min(lo_val.min(hi_val));
            fmax = fmax.max(lo_val.max(hi_val));
            grad[k] = (hi_val - lo_val) / widths[k];
        }
        if t * (fmax - fmin) <= std::f64::consts::TAU {
            tensor_rule(bx, &|x: &[f64]| {
                Complex64::from_polar(phi.eval(x), t * f.eval_unchecked(x))
            })
        } else {
            let mass: f64 = tensor_rule(bx, &|x: &[f64]| phi.eval(x));
            let mut modulation = 1.0f64;
            for k in 0..n {
                modulation *= sinc(0.5 * t * grad[k] * widths[k]);
            }
            Complex64::from_polar(1.0, t * fc) * mass * modulation
        }
    };

    let vanishes = |lo: &[f64], hi: &[f64]| -> bool {
        let xbox: Vec<(f64, f64)> = lo.iter().zip(hi).map(|(&a, &b)| (a, b)).collect();
        phi.is_zero_on(&xbox)
    };

    // Split along the axis with the fastest probed phase variation; the
    // extra unit keeps the hint meaningful in quiet cells, where it falls
    // back to the widest axis.
    let hint = |lo: &[f64], hi: &[f64]| -> usize {
        let n = lo.len();
        let center: Vec<f64> = lo.iter().zip(hi).map(|(&a, &b)| 0.5 * (a + b)).collect();
        let mut probe = center.clone();
        let mut pick = 0usize;
        let mut best = f64::NEG_INFINITY;
        for k in 0..n {
            let w = hi[k] - lo[k];
            probe[k] = lo[k];
            let lo_val = f.eval_unchecked(&probe);
            probe[k] = hi[k];
            let hi_val = f.eval_unchecked(&probe);
            probe[k] = center[k];
            let gk = (hi_val - lo_val) / w;
            let score = w * (t * gk.abs() + 1.0);
            if score > best {
                best = score;
                pick = k;
            }
        }
        pick
    };

    let out = integrate_rule(&domain, rule, vanishes, Some(&hint), cfg)?;
    Ok(OscPoint {
        t,
        value: out.value,
        error: out.error,
        rule_applications: out.rule_applications,
    })
}

/// Evaluates [`numeric_osc`] on a list of parameters, in order.
pub fn osc_samples(
    f: &FunctionSpec,
    phi: &Amplitude,
    ts: &[f64],
    cfg: &QuadratureConfig,
) -> Result<Vec<OscPoint>, Error> {
    let mut points = Vec::with_capacity(ts.len());
    for &t in ts {
        points.push(numeric_osc(f, phi, t, cfg)?);
    }
    Ok(points)
}

fn sinc(z: f64) -> f64 {
    if z.abs() < 1e-8 {
        1.0
    } else {
        z.sin() / z
    }
}

/// One trial decay law `|I(t)| ~ e^a t^beta (ln t)^eta` fit by least squares.
#[derive(Debug, Clone)]
pub struct EtaCandidate {
    /// The trial log power.
    pub eta: usize,
    /// Fitted power of `t`.
    pub beta: f64,
    /// Fitted intercept `a`.
    pub intercept: f64,
    /// Sum of squared residuals of the fit.
    pub ssr: f64,
}

/// The decay law selected by [`fit_decay`].
#[derive(Debug, Clone)]
pub struct DecayFit {
    /// Fitted power of `t` for the winning log power.
    pub beta: f64,
    /// Winning log power.
    pub eta: usize,
    /// Fitted intercept for the winning log power.
    pub intercept: f64,
    /// Residual of the winning fit.
    pub ssr: f64,
    /// All trial fits, one per log power from 0 to the requested maximum.
    pub candidates: Vec<EtaCandidate>,
}

/// Fits `ln |I(t)| = a + beta ln t + eta ln ln t` over a sample ladder,
/// trying each integer log power `eta` up to `max_eta` and keeping the one
/// with the smallest residual.
///
/// Requires at least three samples with `t > 1` and nonzero magnitude, at
/// three or more distinct parameters.
pub fn fit_decay(samples: &[OscPoint], max_eta: usize) -> Result<DecayFit, Error> {
    let mut xs = Vec::new();
    let mut mags = Vec::new();
    for p in samples {
        if p.t > 1.0 && p.value.norm() > 0.0 {
            xs.push(p.t.ln());
            mags.push(p.value.norm().ln());
        }
    }
    if xs.len() < 3 {
        return Err(Error::Domain(
            "decay fit needs at least three samples with t > 1 and nonzero magnitude".into(),
        ));
    }
    let spread = xs
        .iter()
        .map(|&x| (x - xs[0]).abs())
        .fold(0.0f64, f64::max);
    if spread < 1e-9 {
        return Err(Error::Domain(
            "decay fit needs samples at distinct parameters".into(),
        ));
    }

    let mut candidates = Vec::with_capacity(max_eta + 1);
    for eta in 0..=max_eta {
        // xs holds ln t, so ln ln t is the logarithm of the abscissa.
        let ys: Vec<f64> = mags
            .iter()
            .zip(&xs)
            .map(|(&m, &x)| m - eta as f64 * x.ln())
            .collect();
        let (beta, intercept, ssr) = linear_fit(&xs, &ys);
        candidates.push(EtaCandidate {
            eta,
            beta,
            intercept,
            ssr,
        });
    }
    let best = candidates
        .iter()
        .min_by(|a, b| a.ssr.total_cmp(&b.ssr))
        .expect("at least one trial log power")
        .clone();
    Ok(DecayFit {
        beta: best.beta,
        eta: best.eta,
        intercept: best.intercept,
        ssr: best.ssr,
        candidates,
    })
}

fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let xbar = xs.iter().sum::<f64>() / n;
    let ybar = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxy += (x - xbar) * (y - ybar);
        sxx += (x - xbar) * (x - xbar);
    }
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let ssr = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| {
            let r = y - intercept - slope * x;
            r * r
        })
        .sum();
    (slope, intercept, ssr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspec::parse_function;

    fn simpson(lo: f64, hi: f64, steps: usize, f: impl Fn(f64) -> f64) -> f64 {
        let h = (hi - lo) / steps as f64;
        let mut acc = f(lo) + f(hi);
        for i in 1..steps {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * f(lo + i as f64 * h);
        }
        acc * h / 3.0
    }

    fn bump(u: f64) -> f64 {
        if u.abs() < 1.0 {
            (-1.0 / (1.0 - u * u)).exp()
        } else {
            0.0
        }
    }

    #[test]
    fn at_t_zero_the_value_is_the_amplitude_mass() {
        let f = parse_function("x1^2 + x2^2", 2).unwrap();
        let phi = Amplitude::unit(2);
        let cfg = QuadratureConfig {
            tolerance: 1e-7,
            ..QuadratureConfig::default()
        };
        let p = numeric_osc(&f, &phi, 0.0, &cfg).unwrap();
        let one_axis = simpson(-1.0, 1.0, 2000, bump);
        assert_eq!(p.value.im, 0.0);
        assert!(
            (p.value.re - one_axis * one_axis).abs() < 1e-6,
            "got {}, want {}",
            p.value.re,
            one_axis * one_axis
        );
    }

    #[test]
    fn matches_stationary_phase_in_one_variable() {
        // For f = x^2 the large-t law is e^{i pi / 4} sqrt(pi / t) phi(0)
        // with phi(0) = e^{-1}, and the first correction is O(t^{-3/2}).
        let f = parse_function("x1^2", 1).unwrap();
        let phi = Amplitude::unit(1);
        let cfg = QuadratureConfig {
            tolerance: 1e-6,
            ..QuadratureConfig::default()
        };
        let t = 200.0;
        let p = numeric_osc(&f, &phi, t, &cfg).unwrap();
        let main = Complex64::from_polar(
            (std::f64::consts::PI / t).sqrt() * (-1.0f64).exp(),
            std::f64::consts::FRAC_PI_4,
        );
        let rel = (p.value - main).norm() / main.norm();
        assert!(rel < 0.01, "relative deviation {rel} at t = {t}");
    }

    #[test]
    fn negative_parameters_conjugate_exactly() {
        let f = parse_function("x1^2 + x1*x2", 2).unwrap();
        let phi = Amplitude::unit(2);
        let cfg = QuadratureConfig {
            tolerance: 1e-4,
            ..QuadratureConfig::default()
        };
        let fwd = numeric_osc(&f, &phi, 37.5, &cfg).unwrap();
        let bwd = numeric_osc(&f, &phi, -37.5, &cfg).unwrap();
        assert_eq!(bwd.value.re.to_bits(), fwd.value.re.to_bits());
        assert_eq!(bwd.value.im.to_bits(), (-fwd.value.im).to_bits());
        assert_eq!(bwd.rule_applications, fwd.rule_applications);
    }

    #[test]
    fn fit_recovers_a_synthetic_decay_law() {
        let mut samples = Vec::new();
        let mut t = 40.0f64;
        for _ in 0..8 {
            let mag = 3.0 * t.powf(-0.5) * t.ln();
            samples.push(OscPoint {
                t,
                value: Complex64::from_polar(mag, 0.3 * t),
                error: 0.0,
                rule_applications: 0,
            });
            t *= 2.0;
        }
        let fit = fit_decay(&samples, 2).unwrap();
        assert_eq!(fit.eta, 1);
        assert!((fit.beta + 0.5).abs() < 1e-9, "beta {}", fit.beta);
        assert!((fit.intercept - 3.0f64.ln()).abs() < 1e-9);
        assert_eq!(fit.candidates.len(), 3);
    }

    #[test]
    fn fit_rejects_thin_or_degenerate_ladders() {
        let mk = |t: f64| OscPoint {
            t,
            value: Complex64::new(1.0, 0.0),
            error: 0.0,
            rule_applications: 0,
        };
        assert!(matches!(fit_decay(&[], 1), Err(Error::Domain(_))));
        assert!(matches!(
            fit_decay(&[mk(10.0), mk(20.0)], 1),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            fit_decay(&[mk(10.0), mk(10.0), mk(10.0)], 1),
            Err(Error::Domain(_))
        ));
        // Samples at or below t = 1 are discarded before fitting.
        assert!(matches!(
            fit_decay(&[mk(0.5), mk(1.0), mk(10.0), mk(20.0)], 1),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn rejects_bad_parameters_and_arity() {
        let f = parse_function("x1^2", 1).unwrap();
        let wide = Amplitude::unit(2);
        let cfg = QuadratureConfig::default();
        assert!(matches!(
            numeric_osc(&f, &wide, 1.0, &cfg),
            Err(Error::Domain(_))
        ));
        let phi = Amplitude::unit(1);
        assert!(matches!(
            numeric_osc(&f, &phi, f64::INFINITY, &cfg),
            Err(Error::Domain(_))
        ));
    }
}
