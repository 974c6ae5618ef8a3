//! Resolution charts over the maximal cones of a unimodular fan.
//!
//! A maximal unimodular cone with skeleton `a^1, ..., a^n` defines the
//! monomial substitution `x_k = prod_j y_j^{a^j_k}`. Pulling a phase
//! function back through it factors out the monomial `prod_j y_j^{l(a^j)}`
//! and leaves a chart function `f_sigma` that is nonzero at the chart
//! origin, which is what makes the asymptotic analysis local and explicit.
//! This module builds those charts, keeps `f_sigma` inside the input algebra
//! whenever the substitution permits, and provides the randomized identity
//! checks and the nondegeneracy decision procedure that certify a
//! resolution.

mod nondeg;
mod poly;

pub use nondeg::{
    nondegeneracy_check, FaceStatus, FaceVerdict, Nondegeneracy, NondegeneracyReport,
};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fan::{self, AnnotatedFan, Cone, Fan};
use crate::funcspec::{self, Expr, FunctionSpec};
use crate::geometry::{self, Face, LatticePolyhedron, LatticeVector, ValidPair};
use crate::rat::{big_pow, big_to_f64, det_int, BigRat};
use crate::Error;
use num_traits::{One, Zero};

/// The monomial substitution attached to a maximal unimodular cone: with
/// skeleton rays `a^1, ..., a^n` in the cone's canonical order, the map
/// sends `x_k` to `prod_j y_j^{matrix[k-1][j-1]}` where the matrix columns
/// are the rays, `matrix[k][j] = a^{j+1}_{k+1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialMap {
    /// Ambient dimension.
    pub n: usize,
    /// Row `k` holds the chart exponents of the image of `x_{k+1}`.
    pub matrix: Vec<Vec<u32>>,
}

impl MonomialMap {
    /// Builds the map of a maximal simplicial unimodular cone in the
    /// positive orthant. Anything else is rejected: charts only exist over
    /// the cones of a unimodular refinement of a normal fan.
    pub fn from_cone(cone: &Cone, n: usize) -> Result<MonomialMap, Error> {
        if cone.skeleton.len() != n || cone.dim() != n {
            return Err(Error::Domain(format!(
                "chart maps need a maximal simplicial cone: got {} rays of rank {} in dimension {n}",
                cone.skeleton.len(),
                cone.dim()
            )));
        }
        if cone.det_abs() != Some(1) {
            return Err(Error::Domain(format!(
                "cone {cone} is not unimodular; subdivide the fan first"
            )));
        }
        let mut matrix = vec![vec![0u32; n]; n];
        for (j, ray) in cone.skeleton.iter().enumerate() {
            for (k, &a) in ray.iter().enumerate() {
                matrix[k][j] = u32::try_from(a).map_err(|_| {
                    Error::Domain(format!(
                        "ray {ray:?} leaves the positive orthant; it cannot define a chart"
                    ))
                })?;
            }
        }
        Ok(MonomialMap { n, matrix })
    }

    /// Applies the substitution: `x_k = prod_j y_j^{m_kj}` with `0^0 = 1`.
    pub fn apply(&self, y: &[f64]) -> Vec<f64> {
        self.matrix
            .iter()
            .map(|row| {
                row.iter()
                    .zip(y)
                    .map(|(&e, &v)| if e == 0 { 1.0 } else { v.powi(e as i32) })
                    .product()
            })
            .collect()
    }

    /// Exact-rational version of [`MonomialMap::apply`].
    pub fn apply_exact(&self, y: &[BigRat]) -> Vec<BigRat> {
        self.matrix
            .iter()
            .map(|row| {
                let mut acc = BigRat::one();
                for (&e, v) in row.iter().zip(y) {
                    if e > 0 {
                        acc *= big_pow(v, e);
                    }
                }
                acc
            })
            .collect()
    }

    /// Exponents of the Jacobian monomial: the Jacobian determinant of the
    /// map is `sign * prod_j y_j^{<a^j> - 1}` with these exponents.
    pub fn jacobian_exponents(&self) -> Vec<u32> {
        (0..self.n)
            .map(|j| self.matrix.iter().map(|row| row[j]).sum::<u32>() - 1)
            .collect()
    }

    /// Sign of the Jacobian determinant, `+1` or `-1`.
    pub fn jacobian_sign(&self) -> i32 {
        let rows: Vec<Vec<i64>> = self
            .matrix
            .iter()
            .map(|row| row.iter().map(|&e| e as i64).collect())
            .collect();
        det_int(&rows).signum() as i32
    }

    /// Display such as `(y1*y2,y2)`.
    pub fn display(&self) -> String {
        let images: Vec<String> = self
            .matrix
            .iter()
            .map(|row| monomial_string(row, "y"))
            .collect();
        format!("({})", images.join(","))
    }
}

fn monomial_string(exponents: &[u32], var: &str) -> String {
    let mut parts = Vec::new();
    for (j, &e) in exponents.iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(format!("{var}{}", j + 1)),
            _ => parts.push(format!("{var}{}^{e}", j + 1)),
        }
    }
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join("*")
    }
}

/// One term of a chart function: `y^prefactor * psi(pi(y))` where `psi` is
/// the smooth factor of the source term at `source_exponent`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChartTerm {
    /// Chart-variable exponents `<a^j, p> - l(a^j)`, componentwise
    /// nonnegative.
    pub prefactor: Vec<u32>,
    /// The exponent `p` of the source term.
    pub source_exponent: LatticeVector,
    /// The source factor, still in the original variables.
    pub factor: Expr,
}

/// The resolved function on a chart, kept as a composition so it can be
/// evaluated even when the substitution leaves the input algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartFunction {
    pub map: MonomialMap,
    pub terms: Vec<ChartTerm>,
    /// In-class rewrite over the chart variables. Present whenever every
    /// factor composes with the monomial map inside the algebra, which
    /// requires each flat atom's variable to map to a power of a single
    /// chart variable.
    pub symbolic: Option<FunctionSpec>,
}

impl ChartFunction {
    /// Evaluates `f_sigma(y)`.
    pub fn eval(&self, y: &[f64]) -> f64 {
        let x = self.map.apply(y);
        let mut total = 0.0;
        for t in &self.terms {
            let mut mono = 1.0;
            for (&e, &v) in t.prefactor.iter().zip(y) {
                if e > 0 {
                    mono *= v.powi(e as i32);
                }
            }
            total += mono * t.factor.eval_f64(&x);
        }
        total
    }

    /// Exact evaluation; `None` when a factor takes an irrational value.
    pub fn eval_exact(&self, y: &[BigRat]) -> Option<BigRat> {
        let x = self.map.apply_exact(y);
        let mut total = BigRat::zero();
        for t in &self.terms {
            let mut mono = BigRat::one();
            for (&e, v) in t.prefactor.iter().zip(y) {
                if e > 0 {
                    mono *= big_pow(v, e);
                }
            }
            total += mono * t.factor.eval_exact(&x)?;
        }
        Some(total)
    }

    /// Canonical display: the in-class rewrite when available, otherwise the
    /// composition form `y1^2*[factor](pi(y)) + ...`.
    pub fn display(&self) -> String {
        if let Some(sym) = &self.symbolic {
            return sym.display_named("y");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|t| {
                let mono = monomial_string(&t.prefactor, "y");
                if t.factor.is_one() {
                    mono
                } else if mono == "1" {
                    format!("[{}](pi(y))", t.factor.display_named("x"))
                } else {
                    format!("{mono}*[{}](pi(y))", t.factor.display_named("x"))
                }
            })
            .collect();
        parts.join(" + ")
    }
}

/// Everything the asymptotic analysis needs from one maximal cone.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolutionChart {
    pub cone: Cone,
    pub map: MonomialMap,
    /// `l(a^j)` for each skeleton ray, in cone order.
    pub l_vector: Vec<i64>,
    /// Exponents of the Jacobian monomial.
    pub jacobian_exponents: Vec<u32>,
    /// Sign of the Jacobian determinant.
    pub jacobian_sign: i32,
    pub f_sigma: ChartFunction,
    /// `f_sigma(0)`, nonzero by construction.
    pub f_sigma_at_0: f64,
}

/// Builds the chart of `f` over `cone`, deriving the Newton polyhedron from
/// the support of `f`.
pub fn build_chart(f: &FunctionSpec, cone: &Cone) -> Result<ResolutionChart, Error> {
    let p = geometry::build_polyhedron(f.n, &f.support())?;
    build_chart_with(f, cone, &p)
}

/// [`build_chart`] with the Newton polyhedron already at hand.
pub fn build_chart_with(
    f: &FunctionSpec,
    cone: &Cone,
    p: &LatticePolyhedron,
) -> Result<ResolutionChart, Error> {
    p.require_nonempty("chart construction")?;
    let map = MonomialMap::from_cone(cone, f.n)?;
    let mut l_vector = Vec::with_capacity(f.n);
    for ray in &cone.skeleton {
        let (l, _) = geometry::l_value(ray, p)?;
        l_vector.push(l);
    }
    let mut terms = Vec::with_capacity(f.terms.len());
    let mut anchor: Option<&Expr> = None;
    for t in &f.terms {
        let mut prefactor = Vec::with_capacity(f.n);
        for (j, ray) in cone.skeleton.iter().enumerate() {
            let pairing: i128 = ray
                .iter()
                .zip(&t.exponent)
                .map(|(&a, &pk)| a as i128 * pk as i128)
                .sum();
            let e = pairing - l_vector[j] as i128;
            let e = u32::try_from(e).map_err(|_| {
                Error::Internal(format!(
                    "chart exponent {e} for term exponent {:?} on ray {ray:?} is not a \
                     nonnegative integer; the cone is not subordinate to the normal fan",
                    t.exponent
                ))
            })?;
            prefactor.push(e);
        }
        if prefactor.iter().all(|&e| e == 0) {
            anchor = Some(&t.factor);
        }
        terms.push(ChartTerm {
            prefactor,
            source_exponent: t.exponent.clone(),
            factor: t.factor.clone(),
        });
    }
    let Some(anchor) = anchor else {
        return Err(Error::Internal(format!(
            "no term of the input pairs to the minimum on every ray of {cone}; the cone \
             straddles normal-fan cones and defines no chart"
        )));
    };
    let zero = vec![BigRat::zero(); f.n];
    let f_sigma_at_0 = match anchor.eval_exact(&zero) {
        Some(v) => {
            if v.is_zero() {
                return Err(Error::Domain(
                    "the factor at the chart vertex vanishes at the origin, so the input \
                     certifies no chart data there"
                        .into(),
                ));
            }
            big_to_f64(&v)
        }
        None => {
            let v = anchor.eval_f64(&vec![0.0; f.n]);
            if v == 0.0 {
                return Err(Error::Domain(
                    "the factor at the chart vertex vanishes at the origin, so the input \
                     certifies no chart data there"
                        .into(),
                ));
            }
            v
        }
    };
    let symbolic = substitute_all(&terms, &map);
    Ok(ResolutionChart {
        cone: cone.clone(),
        jacobian_exponents: map.jacobian_exponents(),
        jacobian_sign: map.jacobian_sign(),
        f_sigma: ChartFunction {
            map: map.clone(),
            terms,
            symbolic,
        },
        map,
        l_vector,
        f_sigma_at_0,
    })
}

/// Rewrites every chart term over the chart variables, or returns `None` if
/// any factor fails to compose inside the algebra.
fn substitute_all(terms: &[ChartTerm], map: &MonomialMap) -> Option<FunctionSpec> {
    let mut out = std::collections::BTreeMap::new();
    for t in terms {
        let factor = t.factor.substitute_monomial(&map.matrix)?;
        let exponent: Vec<i64> = t.prefactor.iter().map(|&e| e as i64).collect();
        let clash = out.insert(exponent, factor);
        debug_assert!(
            clash.is_none(),
            "unimodularity makes chart exponents injective"
        );
    }
    Some(FunctionSpec::from_term_map(map.n, out))
}

/// A complete resolution bundle: the Newton polyhedron, the unimodular
/// refinement of its normal fan, the per-cone decay annotations, and one
/// chart per maximal cone (index-aligned with both fan and annotations).
#[derive(Debug, Clone)]
pub struct Resolution {
    pub polyhedron: LatticePolyhedron,
    pub fan: Fan,
    pub annotations: AnnotatedFan,
    pub charts: Vec<ResolutionChart>,
}

/// Runs the full pipeline on one phase: polyhedron, normal fan, unimodular
/// subdivision, annotations, charts.
pub fn resolve(f: &FunctionSpec) -> Result<Resolution, Error> {
    let p = geometry::build_polyhedron(f.n, &f.support())?;
    p.require_nonempty("toric resolution")?;
    let coarse = fan::normal_fan(&p)?;
    let fan = fan::unimodular_subdivision(&coarse)?;
    let annotations = fan::annotate_cones(&fan, &p)?;
    let mut charts = Vec::with_capacity(fan.maximal.len());
    for cone in &fan.maximal {
        charts.push(build_chart_with(f, cone, &p)?);
    }
    Ok(Resolution {
        polyhedron: p,
        fan,
        annotations,
        charts,
    })
}

/// Randomized check of the pullback identity on a face `gamma` of the
/// Newton polyhedron: with `I` the 1-based indices of the cone rays tight on
/// `gamma`, the gamma-part satisfies
/// `f_gamma(pi(y)) = prod_j y_j^{l_j} * f_sigma(T_I(y))`
/// where `T_I` zeroes the chart variables in `I`. Returns the largest
/// absolute residual over 100 seeded samples in `[-1, 1]^n`.
pub fn gamma_part_pullback_check(
    f: &FunctionSpec,
    gamma: &Face,
    cone: &Cone,
    i_set: &[usize],
) -> Result<f64, Error> {
    let p = geometry::build_polyhedron(f.n, &f.support())?;
    let chart = build_chart_with(f, cone, &p)?;
    let f_gamma = funcspec::gamma_part(f, gamma, &p)?;
    for &j in i_set {
        if j == 0 || j > f.n {
            return Err(Error::Domain(format!(
                "ray index {j} out of range 1..={}",
                f.n
            )));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x4c45_4d4d_4138);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let y: Vec<f64> = (0..f.n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let lhs = f_gamma.eval_unchecked(&chart.map.apply(&y));
        let mut zeroed = y.clone();
        for &j in i_set {
            zeroed[j - 1] = 0.0;
        }
        let mut mono = 1.0;
        for (&l, &v) in chart.l_vector.iter().zip(&y) {
            if l > 0 {
                mono *= v.powi(l as i32);
            }
        }
        let rhs = mono * chart.f_sigma.eval(&zeroed);
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(worst)
}

/// Randomized check of the scaling identity
/// `sum_k a_k x_k d/dx_k f_gamma = l * f_gamma`
/// for a gamma-part and a defining pair of its face. Returns the largest
/// relative residual over 100 seeded samples with coordinates in
/// `[-1.5, -0.2] union [0.2, 1.5]`.
pub fn euler_identity_check(f_gamma: &FunctionSpec, pair: &ValidPair) -> Result<f64, Error> {
    if pair.a.len() != f_gamma.n {
        return Err(Error::Domain(format!(
            "pair arity {} does not match dimension {}",
            pair.a.len(),
            f_gamma.n
        )));
    }
    let grads = f_gamma.gradient()?;
    let mut rng = ChaCha8Rng::seed_from_u64(0x4555_4c45_5239);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let x: Vec<f64> = (0..f_gamma.n)
            .map(|_| {
                let mag = rng.gen_range(0.2..=1.5);
                if rng.gen_bool(0.5) {
                    mag
                } else {
                    -mag
                }
            })
            .collect();
        let mut lhs = 0.0;
        for (k, g) in grads.iter().enumerate() {
            lhs += pair.a[k] as f64 * x[k] * g.eval_unchecked(&x);
        }
        let rhs = pair.l as f64 * f_gamma.eval_unchecked(&x);
        worst = worst.max((lhs - rhs).abs() / (1.0 + rhs.abs()));
    }
    Ok(worst)
}

/// Serializes one chart in the format emitted by the `resolve` subcommand.
pub fn chart_to_json(chart: &ResolutionChart) -> serde_json::Value {
    serde_json::json!({
        "cone": chart.cone.to_string(),
        "rays": chart.cone.skeleton,
        "map": chart.map.display(),
        "exponent_matrix": chart.map.matrix,
        "l_vector": chart.l_vector,
        "jacobian_exponents": chart.jacobian_exponents,
        "jacobian_sign": chart.jacobian_sign,
        "f_sigma": chart.f_sigma.display(),
        "f_sigma_in_class": chart.f_sigma.symbolic.is_some(),
        "f_sigma_at_0": chart.f_sigma_at_0,
    })
}

/// Serializes a nondegeneracy report in the format emitted by the `resolve`
/// and `verify` subcommands.
pub fn nondegeneracy_to_json(report: &NondegeneracyReport) -> serde_json::Value {
    let faces: Vec<serde_json::Value> = report
        .faces
        .iter()
        .map(|v| {
            let mut obj = serde_json::json!({
                "face": v.face,
                "dim": v.dim,
                "gamma_part": v.gamma_part,
            });
            let map = obj.as_object_mut().expect("object literal");
            match &v.status {
                FaceStatus::Verified => {
                    map.insert("status".into(), "verified".into());
                }
                FaceStatus::Refuted { witness, residual } => {
                    map.insert("status".into(), "refuted".into());
                    let coords: Vec<String> = witness.iter().map(BigRat::to_string).collect();
                    map.insert("witness".into(), coords.into());
                    map.insert(
                        "residual".into(),
                        serde_json::Number::from_f64(*residual)
                            .map_or(serde_json::Value::Null, serde_json::Value::Number),
                    );
                }
                FaceStatus::Unknown { reason } => {
                    map.insert("status".into(), "unknown".into());
                    map.insert("reason".into(), reason.clone().into());
                }
            }
            obj
        })
        .collect();
    let overall = match report.overall {
        Nondegeneracy::Verified => "verified",
        Nondegeneracy::Refuted => "refuted",
        Nondegeneracy::Unknown => "unknown",
    };
    serde_json::json!({ "overall": overall, "faces": faces })
}
