//! Direct numerical evaluation of the two-sided zeta integrals
//!
//! ```text
//! Z_+(s) = integral over {f > 0} of  f(x)^s     phi(x) dx
//! Z_-(s) = integral over {f < 0} of  (-f(x))^s  phi(x) dx
//! ```
//!
//! for real `s` to the right of the leading candidate pole `-1/d`, where `d`
//! is the Newton distance of `f`. These are the quantities whose meromorphic
//! continuations the rest of the crate studies symbolically; evaluating them
//! at honest floating-point arguments gives an independent check on the
//! predicted pole location, order, and leading coefficients.
//!
//! Near the origin `|f|^s` blows up like a negative power when `s < 0`, so a
//! naive quadrature stalls. The integral is split into the `2^n` coordinate
//! octants and, on each, the substitution `x_k = u_k^{q_k}` is applied with
//! `q_k = ceil(1 / (1 + s * l_k))`, where `l_k` is the minimum of the `k`-th
//! coordinate over the Newton polyhedron. Along the `k`-th axis the integrand
//! is bounded below by a power no worse than `|x_k|^{s l_k}`, and the
//! substitution turns that worst case times the Jacobian `q_k u^{q_k - 1}`
//! into a bounded function, which the adaptive rule then handles.
//!
//! [`extrapolate_to_pole`] chains several evaluations near a candidate pole
//! into an estimate of the limit `lim (s + 1/d)^m Z(s)`: it evaluates
//! `h(eps) = eps^m Z(-1/d + eps)` on a short ladder of offsets and
//! extrapolates the smooth function `h` to `eps = 0` by polynomial
//! interpolation.

use num_rational::Rational64 as Rat;

use crate::asymptotics::amplitude::Amplitude;
use crate::asymptotics::quad::{integrate_with, QuadratureConfig};
use crate::funcspec::FunctionSpec;
use crate::geometry::{self, LatticeVector};
use crate::rat::rat_to_f64;
use crate::Error;

/// One evaluation of the two-sided zeta integrals at a real argument.
#[derive(Debug, Clone)]
pub struct ZetaPoint {
    /// The argument `s`.
    pub s: f64,
    /// `Z_+(s)`, the integral over the region where `f > 0`.
    pub plus: f64,
    /// `Z_-(s)`, the integral over the region where `f < 0`.
    pub minus: f64,
    /// Accumulated quadrature error estimate for `plus` and `minus` jointly.
    pub error: f64,
    /// Total adaptive rule applications spent across all octants.
    pub rule_applications: usize,
}

impl ZetaPoint {
    /// `Z_+(s) + Z_-(s)`, the integral of `|f|^s phi` over the support.
    pub fn total(&self) -> f64 {
        self.plus + self.minus
    }
}

/// Evaluates `Z_+(s)` and `Z_-(s)` by adaptive quadrature.
///
/// Requires `s > -1/d` when the Newton distance `d` of `f` is positive;
/// at or past that threshold the integral may diverge and the request is
/// rejected. Amplitudes and phases of mismatched arity are rejected.
pub fn numeric_zeta(
    f: &FunctionSpec,
    phi: &Amplitude,
    s: f64,
    cfg: &QuadratureConfig,
) -> Result<ZetaPoint, Error> {
    if phi.n() != f.n {
        return Err(Error::Domain(format!(
            "amplitude has {} variables but the phase has {}",
            phi.n(),
            f.n
        )));
    }
    if !s.is_finite() {
        return Err(Error::Domain("zeta argument must be finite".into()));
    }
    let support = f.support();
    let p = geometry::build_polyhedron(f.n, &support)?;
    let (d, _) = geometry::newton_distance(&p)?;
    let d = rat_to_f64(d);
    if d > 0.0 && s <= -1.0 / d + 1e-15 {
        return Err(Error::Domain(format!(
            "zeta argument {s} is at or past the leading candidate pole -1/d = {}",
            -1.0 / d
        )));
    }

    // Worst-case axis decay rates: l_k = min of coordinate k over the
    // Newton polyhedron, realized by the supporting value of the unit ray.
    let mut l_axis = vec![0i64; f.n];
    for (k, l) in l_axis.iter_mut().enumerate() {
        let mut e: LatticeVector = vec![0; f.n];
        e[k] = 1;
        let (lv, _) = geometry::l_value(&e, &p)?;
        *l = lv;
    }
    let q: Vec<i32> = l_axis
        .iter()
        .map(|&l| {
            let rate = 1.0 + s * l as f64;
            if rate >= 1.0 {
                1
            } else {
                (1.0 / rate).ceil().min(1_000_000.0) as i32
            }
        })
        .collect();

    let bx = phi.support();
    let mut plus = 0.0f64;
    let mut minus = 0.0f64;
    let mut error = 0.0f64;
    let mut rule_applications = 0usize;
    let octant_cfg = QuadratureConfig {
        tolerance: cfg.tolerance / (1u32 << f.n) as f64,
        budget: cfg.budget,
        threads: cfg.threads,
    };

    for code in 0..(1u32 << f.n) {
        let signs: Vec<f64> = (0..f.n)
            .map(|k| if (code >> k) & 1 == 0 { 1.0 } else { -1.0 })
            .collect();
        // Extent of this octant inside the amplitude support, per axis.
        let mut domain = Vec::with_capacity(f.n);
        let mut empty = false;
        for k in 0..f.n {
            let reach = if signs[k] > 0.0 { bx[k].1 } else { -bx[k].0 };
            if reach <= 0.0 {
                empty = true;
                break;
            }
            domain.push((0.0, reach.powf(1.0 / q[k] as f64)));
        }
        if empty {
            continue;
        }

        let integrand = |u: &[f64]| -> [f64; 2] {
            let mut x = vec![0.0f64; u.len()];
            let mut jac = 1.0f64;
            for k in 0..u.len() {
                x[k] = signs[k] * u[k].powi(q[k]);
                jac *= q[k] as f64 * u[k].powi(q[k] - 1);
            }
            let w = phi.eval(&x) * jac;
            if w == 0.0 {
                return [0.0, 0.0];
            }
            let v = f.eval_unchecked(&x);
            if v > 0.0 {
                [w * v.powf(s), 0.0]
            } else if v < 0.0 {
                [0.0, w * (-v).powf(s)]
            } else {
                [0.0, 0.0]
            }
        };
        let vanishes = |lo: &[f64], hi: &[f64]| -> bool {
            let mut xbox = Vec::with_capacity(lo.len());
            for k in 0..lo.len() {
                let a = signs[k] * lo[k].powi(q[k]);
                let b = signs[k] * hi[k].powi(q[k]);
                xbox.push((a.min(b), a.max(b)));
            }
            phi.is_zero_on(&xbox)
        };
        let out = integrate_with(&domain, integrand, vanishes, None, &octant_cfg)?;
        plus += out.value[0];
        minus += out.value[1];
        error += out.error;
        rule_applications += out.rule_applications;
    }

    Ok(ZetaPoint {
        s,
        plus,
        minus,
        error,
        rule_applications,
    })
}

/// Result of extrapolating `eps^m Z(pole + eps)` to `eps = 0`.
#[derive(Debug, Clone)]
pub struct PoleExtrapolation {
    /// The candidate pole approached from the right.
    pub pole: Rat,
    /// Assumed pole order `m`; the extrapolated quantity is
    /// `lim (s - pole)^m Z(s)`.
    pub order: usize,
    /// Offsets used, largest first.
    pub epsilons: Vec<f64>,
    /// The sampled values `eps^m Z_+(pole + eps)`.
    pub h_plus: Vec<f64>,
    /// The sampled values `eps^m Z_-(pole + eps)`.
    pub h_minus: Vec<f64>,
    /// Extrapolated limit of the positive part.
    pub c_plus: f64,
    /// Extrapolated limit of the negative part.
    pub c_minus: f64,
    /// Propagated quadrature error (interpolation error excluded).
    pub error: f64,
    /// Total rule applications across all evaluations.
    pub rule_applications: usize,
}

/// Default offset ladder for [`extrapolate_to_pole`].
pub const DEFAULT_EPSILONS: [f64; 3] = [0.05, 0.02, 0.01];

/// Estimates `lim (s - pole)^m Z_{+/-}(s)` as `s` decreases to `pole`.
///
/// Evaluates `h(eps) = eps^m Z(pole + eps)` at the given offsets and reads
/// off the value at `eps = 0` of the interpolating polynomial. Since `h` is
/// smooth up to and including `eps = 0` at a pole of order at most `m`, the
/// interpolation error scales like the product of the offsets. The
/// per-evaluation quadrature tolerance is derived from `cfg.tolerance` so
/// that the propagated error on the extrapolated value, which amplifies the
/// error at offset `eps_i` by `|w_i| eps_i^m`, stays at the requested level.
pub fn extrapolate_to_pole(
    f: &FunctionSpec,
    phi: &Amplitude,
    pole: Rat,
    order: usize,
    epsilons: &[f64],
    cfg: &QuadratureConfig,
) -> Result<PoleExtrapolation, Error> {
    if epsilons.is_empty() {
        return Err(Error::Domain("need at least one offset to extrapolate".into()));
    }
    if epsilons.iter().any(|&e| !(e > 0.0) || !e.is_finite()) {
        return Err(Error::Domain("pole offsets must be positive and finite".into()));
    }
    for w in epsilons.windows(2) {
        if w[1] >= w[0] {
            return Err(Error::Domain(
                "pole offsets must be strictly decreasing".into(),
            ));
        }
    }
    if order == 0 {
        return Err(Error::Domain("pole order must be at least 1".into()));
    }

    let weights = lagrange_weights_at_zero(epsilons);
    let pole_f = rat_to_f64(pole);
    let k = epsilons.len() as f64;

    let mut h_plus = Vec::with_capacity(epsilons.len());
    let mut h_minus = Vec::with_capacity(epsilons.len());
    let mut c_plus = 0.0f64;
    let mut c_minus = 0.0f64;
    let mut error = 0.0f64;
    let mut rule_applications = 0usize;
    for (i, &eps) in epsilons.iter().enumerate() {
        let amp = weights[i].abs() * eps.powi(order as i32);
        let point_cfg = QuadratureConfig {
            tolerance: (cfg.tolerance / (k * amp)).min(1e-2),
            budget: cfg.budget,
            threads: cfg.threads,
        };
        let z = numeric_zeta(f, phi, pole_f + eps, &point_cfg)?;
        let hp = eps.powi(order as i32) * z.plus;
        let hm = eps.powi(order as i32) * z.minus;
        c_plus += weights[i] * hp;
        c_minus += weights[i] * hm;
        error += amp * z.error;
        rule_applications += z.rule_applications;
        h_plus.push(hp);
        h_minus.push(hm);
    }

    Ok(PoleExtrapolation {
        pole,
        order,
        epsilons: epsilons.to_vec(),
        h_plus,
        h_minus,
        c_plus,
        c_minus,
        error,
        rule_applications,
    })
}

/// Weights `w_i` with `p(0) = sum w_i p(eps_i)` for every polynomial `p` of
/// degree below the number of nodes.
fn lagrange_weights_at_zero(nodes: &[f64]) -> Vec<f64> {
    let mut w = Vec::with_capacity(nodes.len());
    for (i, &xi) in nodes.iter().enumerate() {
        let mut num = 1.0f64;
        let mut den = 1.0f64;
        for (j, &xj) in nodes.iter().enumerate() {
            if j != i {
                num *= -xj;
                den *= xi - xj;
            }
        }
        w.push(num / den);
    }
    w
}

/// Evaluates [`numeric_zeta`] on a list of arguments, in order.
pub fn zeta_samples(
    f: &FunctionSpec,
    phi: &Amplitude,
    args: &[f64],
    cfg: &QuadratureConfig,
) -> Result<Vec<ZetaPoint>, Error> {
    let mut points = Vec::with_capacity(args.len());
    for &s in args {
        points.push(numeric_zeta(f, phi, s, cfg)?);
    }
    Ok(points)
}
