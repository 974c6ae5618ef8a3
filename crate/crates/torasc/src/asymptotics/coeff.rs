//! Leading coefficients of the zeta functions and of the oscillatory
//! integral attached to a phase.
//!
//! Writing `Z_pm(s)` for the integrals of `(f_pm)^s` against an amplitude,
//! both continue meromorphically with the leading pole at `-1/d` of order at
//! most the multiplicity `m`, and the limits
//!
//! `C_pm = lim (s + 1/d)^m Z_pm(s)`
//!
//! are computable from a single dominant resolution chart. Over each sign
//! chamber, the pole is produced by the `m` chart variables whose rays
//! realize `-1/d`; taking iterated residues in them leaves an explicit
//! integral in the remaining variables:
//!
//! `Ctilde_pm = L ∫ phi(pi(y0)) (f_sigma(y0))_pm^{-1/d} prod y_j^{M_j} dy`
//!
//! where `y0` has zeros in the residue slots, `L` is the product of `1/l`
//! over those slots, and `M_j = -l_j/d + <a^j> - 1`. Summing the value over
//! all `2^n` reflected copies of the phase and amplitude yields `C_pm`. When
//! every chart variable is a residue slot the integral degenerates to the
//! point evaluation `L phi(0) |f_sigma(0)|^{-1/d}`.
//!
//! The same `C_pm` drive the large-parameter oscillatory asymptotics: the
//! leading term of the integral of `phi e^{itf}` is
//!
//! `Gamma(1/d)/(m-1)! [e^{i pi/(2d)} C_+ + e^{-i pi/(2d)} C_-] t^{-1/d} (ln t)^{m-1}`.

use crate::asymptotics::amplitude::Amplitude;
use crate::asymptotics::quad::{integrate_with, QuadratureConfig};
use crate::funcspec::{self, FunctionSpec, Verdict};
use crate::geometry;
use crate::rat::{rat_to_f64, Rat};
use crate::toric::{self, Nondegeneracy, Resolution, ResolutionChart};
use crate::Error;
use num_complex::Complex64;
use num_traits::Signed;

/// Why the asymptotic theorems apply to this phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hypothesis {
    /// Newton distance exceeds 1; checked exactly.
    DistanceExceedsOne,
    /// The phase does not change sign near the origin; checked by sampling.
    SignDefinite { sign: i8 },
    /// The principal part never vanishes off the coordinate hyperplanes;
    /// checked by sampling.
    PrincipalPartNonvanishing,
}

/// Which integral representation of the coefficients to evaluate. Both give
/// the same value; having two independent routes makes for a strong
/// cross-check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CoeffFormula {
    /// Chart function route: `(f_sigma(y0))^{-1/d}` with weights `y^M`.
    #[default]
    Direct,
    /// Principal part route: `(f_tau(pi(y1)))^{-1/d}` with weights
    /// `y^{<a^j>-1}`, where `y1` puts ones in the residue slots.
    PrincipalPart,
}

/// Controls for the coefficient computation.
#[derive(Debug, Clone)]
pub struct CoeffRequest {
    pub quad: QuadratureConfig,
    /// Truncation bound for chart directions whose range cannot be pinned
    /// down by the amplitude support. Derived bounds take precedence.
    pub y_max: f64,
    pub formula: CoeffFormula,
    /// Index of the dominant cone to use; defaults to the first one.
    pub cone: Option<usize>,
    /// Box budget for the nondegeneracy verification.
    pub nondeg_budget: usize,
    /// Per-axis sample count for the hypothesis checks that cannot be
    /// decided exactly.
    pub grid: usize,
}

impl Default for CoeffRequest {
    fn default() -> Self {
        CoeffRequest {
            quad: QuadratureConfig::default(),
            y_max: 8.0,
            formula: CoeffFormula::default(),
            cone: None,
            nondeg_budget: 4000,
            grid: 6,
        }
    }
}

/// The contribution of one reflected copy of the phase.
#[derive(Debug, Clone)]
pub struct OctantCoeff {
    /// The reflection, one sign per axis.
    pub signs: Vec<i8>,
    pub c_plus: f64,
    pub c_minus: f64,
    /// Quadrature error bound; 0 on the closed-form path.
    pub error: f64,
}

/// Leading Laurent data of the zeta functions at `-1/d`.
#[derive(Debug, Clone)]
pub struct LeadingCoeffData {
    pub n: usize,
    pub d: Rat,
    pub beta_tilde: Rat,
    pub multiplicity: usize,
    /// Index of the dominant cone the charts were taken over.
    pub cone_index: usize,
    pub c_plus: f64,
    pub c_minus: f64,
    /// Total quadrature error bound across octants.
    pub error: f64,
    /// True when every octant hit the point-evaluation form, making the
    /// values exact up to rounding.
    pub exact: bool,
    pub octants: Vec<OctantCoeff>,
    pub hypothesis: Hypothesis,
    /// True when the hypothesis was decided exactly rather than sampled.
    pub hypothesis_certified: bool,
    /// `Verified` or `Unknown`; a refuted phase is declined outright. On
    /// `Unknown` the values are conditional on nondegeneracy.
    pub nondegeneracy: Nondegeneracy,
    /// True when some chart direction fell back to the `y_max` truncation,
    /// so the values carry an unquantified tail error.
    pub truncated: bool,
}

/// Leading term of `t -> integral of phi e^{itf}` as `t -> +infinity`:
/// `coefficient * t^exponent * (ln t)^log_power`.
#[derive(Debug, Clone)]
pub struct OscLeadingTerm {
    /// Always `-1/d`.
    pub exponent: Rat,
    /// Always `multiplicity - 1`.
    pub log_power: usize,
    pub coefficient: Complex64,
    /// Propagated bound on `|coefficient|` error.
    pub error: f64,
    pub data: LeadingCoeffData,
    /// Set when the only certified hypothesis is the principal-part one and
    /// `1/d` is an odd integer, where the two half-coefficients may cancel
    /// and the true decay can be faster than the stated power.
    pub caveat: Option<String>,
}

/// Computes `C_+` and `C_-` for `f` against the amplitude `phi`.
pub fn leading_zeta_coefficients(
    f: &FunctionSpec,
    phi: &Amplitude,
    req: &CoeffRequest,
) -> Result<LeadingCoeffData, Error> {
    if phi.n() != f.n {
        return Err(Error::Domain(format!(
            "amplitude dimension {} does not match phase dimension {}",
            phi.n(),
            f.n
        )));
    }
    require_admissible(f)?;
    let res = toric::resolve(f)?;
    let d = -res.annotations.beta_tilde.recip();
    let m = res.annotations.multiplicity;

    let nondeg = toric::nondegeneracy_check(f, req.nondeg_budget)?;
    if nondeg.overall == Nondegeneracy::Refuted {
        return Err(Error::Refusal(
            "the phase is degenerate: some face polynomial has a critical point off the \
             coordinate hyperplanes, and the leading-coefficient formulas do not apply"
                .into(),
        ));
    }
    let (hypothesis, hypothesis_certified) = certify_hypothesis(f, phi, d, &res, req)?;

    let cone_index = match req.cone {
        Some(i) => {
            if i >= res.fan.maximal.len() {
                return Err(Error::Domain(format!(
                    "cone index {i} out of range; the fan has {} maximal cones",
                    res.fan.maximal.len()
                )));
            }
            if !res.annotations.cones[i].in_sigma_star {
                return Err(Error::Domain(format!(
                    "cone {i} is not dominant; its residue set is smaller than the multiplicity"
                )));
            }
            i
        }
        None => res
            .annotations
            .cones
            .iter()
            .position(|c| c.in_sigma_star)
            .ok_or_else(|| {
                Error::Internal("no dominant cone; the annotation invariant failed".into())
            })?,
    };
    let cone = &res.fan.maximal[cone_index];
    let ann = &res.annotations.cones[cone_index];

    let mut octants = Vec::with_capacity(1 << f.n);
    let mut c_plus = 0.0;
    let mut c_minus = 0.0;
    let mut error = 0.0;
    let mut exact = true;
    let mut truncated = false;
    for code in 0..(1u32 << f.n) {
        let signs: Vec<i8> = (0..f.n)
            .map(|k| if code >> k & 1 == 0 { 1 } else { -1 })
            .collect();
        let f_theta = f.reflect(&signs)?;
        let phi_theta = phi.reflect(&signs);
        let chart = toric::build_chart_with(&f_theta, cone, &res.polyhedron)?;
        let cell = chart_coefficient(
            &chart,
            &ann.a_set,
            &f_theta,
            &phi_theta,
            d,
            m,
            &res,
            req,
        )?;
        c_plus += cell.c_plus;
        c_minus += cell.c_minus;
        error += cell.error;
        exact &= cell.exact;
        truncated |= cell.truncated;
        octants.push(OctantCoeff {
            signs,
            c_plus: cell.c_plus,
            c_minus: cell.c_minus,
            error: cell.error,
        });
    }

    Ok(LeadingCoeffData {
        n: f.n,
        d,
        beta_tilde: res.annotations.beta_tilde,
        multiplicity: m,
        cone_index,
        c_plus,
        c_minus,
        error,
        exact,
        octants,
        hypothesis,
        hypothesis_certified,
        nondegeneracy: nondeg.overall,
        truncated,
    })
}

/// Computes the leading oscillatory term.
pub fn osc_leading_term(
    f: &FunctionSpec,
    phi: &Amplitude,
    req: &CoeffRequest,
) -> Result<OscLeadingTerm, Error> {
    let data = leading_zeta_coefficients(f, phi, req)?;
    let inv_d = data.d.recip();
    let inv_d_f = rat_to_f64(inv_d);
    let m = data.multiplicity;
    let gamma_over_factorial = gamma_fn(inv_d_f) / factorial(m - 1);
    let half_angle = std::f64::consts::PI * inv_d_f / 2.0;
    let coefficient = gamma_over_factorial
        * (Complex64::from_polar(data.c_plus, half_angle)
            + Complex64::from_polar(data.c_minus, -half_angle));
    let error = gamma_over_factorial.abs() * data.error;
    let caveat = if data.hypothesis == Hypothesis::PrincipalPartNonvanishing
        && inv_d.is_integer()
        && inv_d.to_integer() % 2 == 1
    {
        Some(
            "1/d is an odd integer and only the principal-part hypothesis holds; the stated \
             term can cancel and the true decay may be faster"
                .to_string(),
        )
    } else {
        None
    };
    Ok(OscLeadingTerm {
        exponent: -inv_d,
        log_power: m - 1,
        coefficient,
        error,
        data,
        caveat,
    })
}

/// Gate shared by every asymptotic operation: the phase must certify as an
/// unrestricted class member so that its own support hull is the polyhedron
/// all chart data is derived from.
pub(crate) fn require_admissible(f: &FunctionSpec) -> Result<(), Error> {
    let membership = funcspec::check_membership(f, None)?;
    match membership.verdict {
        Verdict::EHat => Ok(()),
        Verdict::EHatP => Err(Error::Refusal(
            "the phase is certified only relative to a declared polyhedron, not its own \
             support hull; asymptotic data would describe the wrong polyhedron"
                .into(),
        )),
        Verdict::Rejected => Err(Error::Refusal(format!(
            "the phase is outside the admissible class: {}",
            membership.witness
        ))),
    }
}

struct CellCoeff {
    c_plus: f64,
    c_minus: f64,
    error: f64,
    exact: bool,
    truncated: bool,
}

/// One free chart direction of the coefficient integral, with its power-law
/// substitution `y = u^q` and the resulting pulled exponent.
struct FreeVar {
    /// 0-based chart variable index.
    j: usize,
    q: i32,
    /// Exponent of `u` after substitution; always nonnegative.
    pulled_exp: f64,
    /// Upper integration bound in `u`.
    u_max: f64,
}

#[allow(clippy::too_many_arguments)]
fn chart_coefficient(
    chart: &ResolutionChart,
    a_set: &[usize],
    f_theta: &FunctionSpec,
    phi_theta: &Amplitude,
    d: Rat,
    m: usize,
    res: &Resolution,
    req: &CoeffRequest,
) -> Result<CellCoeff, Error> {
    let n = chart.map.n;
    let inv_d = rat_to_f64(d.recip());
    let l_product: f64 = a_set
        .iter()
        .map(|&j| chart.l_vector[j - 1] as f64)
        .product();
    let scale = 1.0 / l_product;

    if m == n {
        let v0 = chart.f_sigma_at_0;
        let phi0 = phi_theta.eval(&vec![0.0; n]);
        let mag = scale * phi0 * v0.abs().powf(-inv_d);
        let (c_plus, c_minus) = if v0 > 0.0 { (mag, 0.0) } else { (0.0, mag) };
        return Ok(CellCoeff {
            c_plus,
            c_minus,
            error: 0.0,
            exact: true,
            truncated: false,
        });
    }

    let free: Vec<usize> = (1..=n).filter(|j| !a_set.contains(j)).map(|j| j - 1).collect();
    let mut truncated = false;
    let mut vars = Vec::with_capacity(free.len());
    for &j in &free {
        let l_j = chart.l_vector[j];
        let weight: i64 = chart.cone.skeleton[j].iter().sum();
        // The net small-y exponent is the same for both routes; deriving the
        // substitution from it keeps the integrand effectively smooth even
        // when the explicit weight and the power of the evaluated function
        // split it differently.
        let m_rat = Rat::from_integer(weight - 1) - Rat::from_integer(l_j) / d;
        let one_plus = m_rat + Rat::from_integer(1);
        if !one_plus.is_positive() {
            return Err(Error::Internal(format!(
                "free direction {j} has net exponent {m_rat} at or below -1; the \
                 dominance invariant failed"
            )));
        }
        let q = substitution_order(one_plus);
        let pulled = match req.formula {
            CoeffFormula::Direct => rat_to_f64(one_plus) * q as f64 - 1.0,
            CoeffFormula::PrincipalPart => (q as i64 * weight - 1) as f64,
        };
        let y_bound = match derived_bound(chart, j, phi_theta) {
            Some(b) => b,
            None => {
                truncated = true;
                req.y_max
            }
        };
        vars.push(FreeVar {
            j,
            q,
            pulled_exp: pulled,
            u_max: y_bound.powf(1.0 / q as f64),
        });
    }

    let f_tau = match req.formula {
        CoeffFormula::Direct => None,
        CoeffFormula::PrincipalPart => {
            let (tau, _) = geometry::principal_face_and_multiplicity(&res.polyhedron)?;
            Some(funcspec::gamma_part(f_theta, &tau, &res.polyhedron)?)
        }
    };

    let assemble = |u: &[f64], fill: f64| -> Vec<f64> {
        let mut y = vec![fill; n];
        for (v, &ui) in vars.iter().zip(u) {
            y[v.j] = ui.powi(v.q);
        }
        for &j in a_set {
            y[j - 1] = 0.0;
        }
        y
    };

    let integrand = |u: &[f64]| -> [f64; 2] {
        let y = assemble(u, 0.0);
        let x = chart.map.apply(&y);
        let p = phi_theta.eval(&x);
        if p == 0.0 {
            return [0.0, 0.0];
        }
        let g = match &f_tau {
            None => chart.f_sigma.eval(&y),
            Some(tau) => {
                let y1 = assemble(u, 1.0);
                let mut y_ones = y1;
                for &j in a_set {
                    y_ones[j - 1] = 1.0;
                }
                tau.eval_unchecked(&chart.map.apply(&y_ones))
            }
        };
        if g == 0.0 {
            return [0.0, 0.0];
        }
        let mut w = p * g.abs().powf(-inv_d);
        for (v, &ui) in vars.iter().zip(u) {
            w *= v.q as f64 * ui.powf(v.pulled_exp);
        }
        if g > 0.0 {
            [w, 0.0]
        } else {
            [0.0, w]
        }
    };

    let vanishes = |lo: &[f64], hi: &[f64]| -> bool {
        let y_lo = assemble(lo, 0.0);
        let y_hi = assemble(hi, 0.0);
        let x_lo = chart.map.apply(&y_lo);
        let x_hi = chart.map.apply(&y_hi);
        let bx: Vec<(f64, f64)> = x_lo.into_iter().zip(x_hi).collect();
        phi_theta.is_zero_on(&bx)
    };

    let domain: Vec<(f64, f64)> = vars.iter().map(|v| (0.0, v.u_max)).collect();
    let mut cfg = req.quad.clone();
    cfg.tolerance = req.quad.tolerance / (1u32 << n) as f64;
    let out = integrate_with(&domain, integrand, vanishes, None, &cfg)?;
    Ok(CellCoeff {
        c_plus: scale * out.value[0],
        c_minus: scale * out.value[1],
        error: scale * out.error,
        exact: false,
        truncated,
    })
}

/// Substitution order for a weight `y^{E}` with `1 + E` given: using the
/// denominator of `1 + E` makes the pulled exponent a nonnegative integer,
/// so the integrand is as smooth as the chart data allows; the ceiling rule
/// is the fallback when that denominator is impractically large.
fn substitution_order(one_plus: Rat) -> i32 {
    let denom = *one_plus.denom();
    if denom <= 8 {
        denom as i32
    } else {
        let q = one_plus.recip().ceil().to_integer();
        q.max(1) as i32
    }
}

/// Least upper bound for chart variable `j` outside of which the amplitude
/// pullback vanishes: a coordinate row that reads `x_k = y_j^e` alone (all
/// other chart variables absent) caps `y_j` by the support of the `x_k`
/// bump. Returns `None` when no row pins the variable down.
fn derived_bound(chart: &ResolutionChart, j: usize, phi: &Amplitude) -> Option<f64> {
    let n = chart.map.n;
    let mut best: Option<f64> = None;
    for k in 0..n {
        let row = &chart.map.matrix[k];
        if row[j] == 0 {
            continue;
        }
        let clean = (0..n).all(|i| i == j || row[i] == 0);
        if !clean {
            continue;
        }
        let x_cap = (phi.centers[k] - phi.radii[k])
            .abs()
            .max((phi.centers[k] + phi.radii[k]).abs());
        let bound = x_cap.powf(1.0 / row[j] as f64);
        best = Some(best.map_or(bound, |b: f64| b.min(bound)));
    }
    best
}

/// Finds a hypothesis under which the asymptotic theorems hold, cheapest
/// and strongest first. The distance test is exact; the other two sample.
fn certify_hypothesis(
    f: &FunctionSpec,
    phi: &Amplitude,
    d: Rat,
    res: &Resolution,
    req: &CoeffRequest,
) -> Result<(Hypothesis, bool), Error> {
    if d > Rat::from_integer(1) {
        return Ok((Hypothesis::DistanceExceedsOne, true));
    }
    let grid = req.grid.max(2);

    let support = phi.support();
    let mut values = Vec::new();
    let mut point = vec![0.0f64; f.n];
    let mut idx = vec![0usize; f.n];
    loop {
        for k in 0..f.n {
            let (lo, hi) = support[k];
            point[k] = lo + (hi - lo) * (idx[k] as f64 + 0.5) / grid as f64;
        }
        values.push(f.eval_unchecked(&point));
        if !advance(&mut idx, grid) {
            break;
        }
    }
    let tiny = 1e-12 * (1.0 + values.iter().fold(0.0f64, |a, v| a.max(v.abs())));
    let has_pos = values.iter().any(|&v| v > tiny);
    let has_neg = values.iter().any(|&v| v < -tiny);
    if !has_neg {
        return Ok((Hypothesis::SignDefinite { sign: 1 }, false));
    }
    if !has_pos {
        return Ok((Hypothesis::SignDefinite { sign: -1 }, false));
    }

    let (tau, _) = geometry::principal_face_and_multiplicity(&res.polyhedron)?;
    let f_tau = funcspec::gamma_part(f, &tau, &res.polyhedron)?;
    let mut nonvanishing = true;
    'octants: for code in 0..(1u32 << f.n) {
        let mut sign_seen = 0i8;
        let mut idx = vec![0usize; f.n];
        loop {
            for k in 0..f.n {
                let mag = (idx[k] as f64 + 0.5) / grid as f64;
                point[k] = if code >> k & 1 == 0 { mag } else { -mag };
            }
            let v = f_tau.eval_unchecked(&point);
            let s = if v > tiny {
                1
            } else if v < -tiny {
                -1
            } else {
                0
            };
            if s == 0 || (sign_seen != 0 && s != sign_seen) {
                nonvanishing = false;
                break 'octants;
            }
            sign_seen = s;
            if !advance(&mut idx, grid) {
                break;
            }
        }
    }
    if nonvanishing {
        return Ok((Hypothesis::PrincipalPartNonvanishing, false));
    }
    Err(Error::Refusal(
        "no supporting hypothesis could be certified: the Newton distance does not exceed 1, \
         the phase changes sign near the origin, and the principal part vanishes off the \
         coordinate hyperplanes"
            .into(),
    ))
}

fn advance(idx: &mut [usize], grid: usize) -> bool {
    for slot in idx.iter_mut() {
        *slot += 1;
        if *slot < grid {
            return true;
        }
        *slot = 0;
    }
    false
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Gamma function for positive real arguments, by the Lanczos approximation
/// with the reflection formula below 1/2. Absolute accuracy is close to
/// machine precision over the range used here.
pub fn gamma_fn(x: f64) -> f64 {
    const G: [f64; 9] = [
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ];
    if x < 0.5 {
        return std::f64::consts::PI / ((std::f64::consts::PI * x).sin() * gamma_fn(1.0 - x));
    }
    let z = x - 1.0;
    let mut acc = G[0];
    for (i, &g) in G.iter().enumerate().skip(1) {
        acc += g / (z + i as f64);
    }
    let t = z + 7.5;
    (2.0 * std::f64::consts::PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspec::parse_function;
    use crate::rat::rat;
    use std::f64::consts::PI;

    fn f_of(text: &str, n: usize) -> FunctionSpec {
        parse_function(text, n).unwrap()
    }

    fn tight() -> CoeffRequest {
        let mut req = CoeffRequest::default();
        req.quad.tolerance = 1e-8;
        req
    }

    /// Composite Simpson rule, used as an independent reference throughout.
    fn simpson(lo: f64, hi: f64, panels: usize, f: impl Fn(f64) -> f64) -> f64 {
        let h = (hi - lo) / panels as f64;
        let mut acc = f(lo) + f(hi);
        for i in 1..panels {
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
    fn gamma_matches_reference_values() {
        assert!((gamma_fn(0.5) - PI.sqrt()).abs() < 1e-12);
        assert!((gamma_fn(1.0) - 1.0).abs() < 1e-13);
        assert!((gamma_fn(6.0) - 120.0).abs() < 1e-10);
        assert!((gamma_fn(1.0 / 6.0) - 5.566316001780235).abs() < 1e-10);
        assert!((gamma_fn(2.5) - 1.329340388179137).abs() < 1e-12);
    }

    #[test]
    fn a_monomial_square_evaluates_in_closed_form() {
        let f = f_of("x1^2*x2^2", 2);
        let data =
            leading_zeta_coefficients(&f, &Amplitude::unit(2), &CoeffRequest::default()).unwrap();
        assert_eq!(data.d, rat(2, 1));
        assert_eq!(data.multiplicity, 2);
        assert!(data.exact);
        assert!(!data.truncated);
        assert_eq!(data.error, 0.0);
        let expected = (-2.0f64).exp();
        assert!((data.c_plus - expected).abs() < 1e-14);
        assert_eq!(data.c_minus, 0.0);
        assert_eq!(data.octants.len(), 4);
        for oct in &data.octants {
            assert!((oct.c_plus - expected / 4.0).abs() < 1e-15);
            assert_eq!(oct.c_minus, 0.0);
        }
        assert_eq!(data.hypothesis, Hypothesis::DistanceExceedsOne);
        assert!(data.hypothesis_certified);
    }

    #[test]
    fn a_negative_monomial_square_lands_in_the_minus_coefficient() {
        let f = f_of("x1^2*x2^2*(0 - 1)", 2);
        let data =
            leading_zeta_coefficients(&f, &Amplitude::unit(2), &CoeffRequest::default()).unwrap();
        let expected = (-2.0f64).exp();
        assert_eq!(data.c_plus, 0.0);
        assert!((data.c_minus - expected).abs() < 1e-14);
    }

    #[test]
    fn the_flat_plane_example_matches_an_independent_reference_integral() {
        let f = f_of("x1^8 + x1^7*x2 + x1^6*x2^2*(1 + flat(2,1))", 2);
        let data = leading_zeta_coefficients(&f, &Amplitude::unit(2), &tight()).unwrap();
        assert_eq!(data.d, rat(6, 1));
        assert_eq!(data.multiplicity, 1);
        assert!(!data.exact);
        assert!(!data.truncated);

        // One sign chamber contributes
        //   (1/6) int_0^1 phi(0, y) y^{-1/3} (1 + e^{-1/y^2})^{-1/6} dy,
        // integrated here under y = u^3 to clear the algebraic weight.
        let reference = simpson(0.0, 1.0, 4000, |u| {
            if u == 0.0 {
                return 0.0;
            }
            let y = u * u * u;
            let smooth = (1.0 + (-1.0 / (y * y)).exp()).powf(-1.0 / 6.0);
            0.5 * u * (-1.0f64).exp() * bump(y) * smooth
        });
        for oct in &data.octants {
            assert!(
                (oct.c_plus - reference).abs() < 2e-6,
                "octant {:?} gave {} vs reference {}",
                oct.signs,
                oct.c_plus,
                reference
            );
            assert!(oct.c_minus.abs() < 1e-12);
        }
        assert!((data.c_plus - 4.0 * reference).abs() < 5e-6);
        assert_eq!(data.c_minus, 0.0);
    }

    #[test]
    fn both_integral_routes_agree() {
        let f = f_of("x1^8 + x1^7*x2 + x1^6*x2^2*(1 + flat(2,1))", 2);
        let direct = leading_zeta_coefficients(&f, &Amplitude::unit(2), &tight()).unwrap();
        let mut req = tight();
        req.formula = CoeffFormula::PrincipalPart;
        let principal = leading_zeta_coefficients(&f, &Amplitude::unit(2), &req).unwrap();
        assert!(
            (direct.c_plus - principal.c_plus).abs() < 1e-6,
            "{} vs {}",
            direct.c_plus,
            principal.c_plus
        );
        assert!((direct.c_minus - principal.c_minus).abs() < 1e-6);
    }

    #[test]
    fn dominant_charts_give_chart_independent_values() {
        let f = f_of("x1^6 + x1^2*x2^2*(1 + flat(3,1)) + x2^6", 3);
        let base = leading_zeta_coefficients(&f, &Amplitude::unit(3), &tight()).unwrap();
        assert_eq!(base.d, rat(2, 1));
        assert_eq!(base.multiplicity, 2);
        assert!(!base.truncated);

        let res = toric::resolve(&f).unwrap();
        let dominant: Vec<usize> = res
            .annotations
            .cones
            .iter()
            .enumerate()
            .filter(|(_, c)| c.in_sigma_star)
            .map(|(i, _)| i)
            .collect();
        assert!(dominant.len() >= 2, "expected several dominant cones");
        let mut values = Vec::new();
        for &i in &dominant {
            let mut req = tight();
            req.cone = Some(i);
            let data = leading_zeta_coefficients(&f, &Amplitude::unit(3), &req).unwrap();
            values.push(data.c_plus);
        }
        for w in values.windows(2) {
            assert!((w[0] - w[1]).abs() < 1e-6, "{} vs {}", w[0], w[1]);
        }

        // Eight sign chambers, each (1/24) int_0^1 phi(0,0,y)(1+e^{-1/y^2})^{-1/2} dy.
        let reference = simpson(0.0, 1.0, 4000, |y| {
            if y == 0.0 {
                return 0.0;
            }
            let smooth = (1.0 + (-1.0 / (y * y)).exp()).powf(-0.5);
            (-2.0f64).exp() * bump(y) * smooth / 3.0
        });
        assert!(
            (base.c_plus - reference).abs() < 1e-5,
            "{} vs {}",
            base.c_plus,
            reference
        );
        assert_eq!(base.c_minus, 0.0);
    }

    #[test]
    fn coefficients_are_nonnegative_for_nonnegative_amplitudes() {
        for (text, n) in [
            ("x1^8 + x1^7*x2 + x1^6*x2^2*(1 + flat(2,1))", 2),
            ("x1^2*x2^2", 2),
            ("x1", 2),
        ] {
            let f = f_of(text, n);
            let data =
                leading_zeta_coefficients(&f, &Amplitude::unit(n), &CoeffRequest::default())
                    .unwrap();
            assert!(data.c_plus >= 0.0);
            assert!(data.c_minus >= 0.0);
        }
    }

    #[test]
    fn a_zero_amplitude_gives_zero_coefficients() {
        let f = f_of("x1^8 + x1^7*x2 + x1^6*x2^2*(1 + flat(2,1))", 2);
        let phi = Amplitude::new(vec![1.0, 1.0], 0.0, vec![0.0, 0.0]).unwrap();
        let data = leading_zeta_coefficients(&f, &phi, &CoeffRequest::default()).unwrap();
        assert_eq!(data.c_plus, 0.0);
        assert_eq!(data.c_minus, 0.0);
    }

    #[test]
    fn inadmissible_degenerate_and_unsupported_phases_are_declined() {
        let rejected = f_of("x1^2 + flat(2,1)", 2);
        assert!(matches!(
            leading_zeta_coefficients(&rejected, &Amplitude::unit(2), &CoeffRequest::default()),
            Err(Error::Refusal(_))
        ));

        let degenerate = f_of("x1^2 + 2*x1*x2 + x2^2", 2);
        assert!(matches!(
            leading_zeta_coefficients(&degenerate, &Amplitude::unit(2), &CoeffRequest::default()),
            Err(Error::Refusal(_))
        ));

        let unsupported = f_of("x1^2 - x2^2", 2);
        match leading_zeta_coefficients(&unsupported, &Amplitude::unit(2), &CoeffRequest::default())
        {
            Err(Error::Refusal(msg)) => assert!(msg.contains("hypothesis")),
            other => panic!("expected a hypothesis refusal, got {other:?}"),
        }

        let f = f_of("x1^2*x2^2", 2);
        assert!(matches!(
            leading_zeta_coefficients(&f, &Amplitude::unit(3), &CoeffRequest::default()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn sampled_hypotheses_are_reported_as_uncertified() {
        let sum_of_squares = f_of("x1^2 + x2^2", 2);
        let data = leading_zeta_coefficients(
            &sum_of_squares,
            &Amplitude::unit(2),
            &CoeffRequest::default(),
        )
        .unwrap();
        assert_eq!(data.d, rat(1, 1));
        assert_eq!(data.hypothesis, Hypothesis::SignDefinite { sign: 1 });
        assert!(!data.hypothesis_certified);

        let linear = f_of("x1", 2);
        let data = leading_zeta_coefficients(&linear, &Amplitude::unit(2), &CoeffRequest::default())
            .unwrap();
        assert_eq!(data.hypothesis, Hypothesis::PrincipalPartNonvanishing);
        assert!(!data.hypothesis_certified);
    }

    #[test]
    fn an_unpinned_chart_direction_falls_back_to_truncation() {
        let f = f_of("x1^4 + x2^4 + x3^4", 3);
        let data =
            leading_zeta_coefficients(&f, &Amplitude::unit(3), &CoeffRequest::default()).unwrap();
        assert_eq!(data.d, rat(4, 3));
        assert_eq!(data.multiplicity, 1);
        assert!(data.truncated);
        assert!(data.c_plus > 0.0);
        assert_eq!(data.c_minus, 0.0);
    }

    #[test]
    fn the_one_dimensional_square_reproduces_stationary_phase() {
        let f = f_of("x1^2", 1);
        let term = osc_leading_term(&f, &Amplitude::unit(1), &CoeffRequest::default()).unwrap();
        assert_eq!(term.exponent, rat(-1, 2));
        assert_eq!(term.log_power, 0);
        let expected = Complex64::from_polar(PI.sqrt() * (-1.0f64).exp(), PI / 4.0);
        assert!(
            (term.coefficient - expected).norm() < 1e-12,
            "{} vs {}",
            term.coefficient,
            expected
        );
        assert!(term.caveat.is_none());
    }

    #[test]
    fn the_flat_plane_example_oscillates_at_the_newton_rate() {
        let f = f_of("x1^8 + x1^7*x2 + x1^6*x2^2*(1 + flat(2,1))", 2);
        let term = osc_leading_term(&f, &Amplitude::unit(2), &tight()).unwrap();
        assert_eq!(term.exponent, rat(-1, 6));
        assert_eq!(term.log_power, 0);
        let magnitude = gamma_fn(1.0 / 6.0) * term.data.c_plus;
        assert!((term.coefficient.norm() - magnitude).abs() < 1e-10);
        let angle = PI / 12.0;
        assert!((term.coefficient.arg() - angle).abs() < 1e-10);
    }

    #[test]
    fn an_odd_reciprocal_distance_under_the_weakest_hypothesis_is_flagged() {
        let f = f_of("x1", 2);
        let term = osc_leading_term(&f, &Amplitude::unit(2), &CoeffRequest::default()).unwrap();
        assert_eq!(term.exponent, rat(-1, 1));
        assert!(term.caveat.is_some());
        assert!(
            term.coefficient.norm() < 1e-10,
            "the two half-coefficients cancel for an odd phase: {}",
            term.coefficient
        );
    }
}
