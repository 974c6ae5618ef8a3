//! Phase functions `f(x) = sum_p x^p psi_p(x)` with smooth factors, their
//! class-membership certificates, and gamma-parts.
//!
//! The representation is the user's: the tool never rewrites terms to
//! improve a verdict (absorbing a flat factor into a neighboring monomial
//! changes the certificate, and whether to do so is the user's call).

mod expr;
mod taylor;

pub use expr::{flat_eval, flatm_eval, parse_expr, Expr};

use crate::geometry::{self, Face, LatticePolyhedron, LatticeVector};
use crate::rat::BigRat;
use crate::Error;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// One term `x^p * factor`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    /// Monomial exponent `p`, componentwise nonnegative.
    pub exponent: LatticeVector,
    /// The smooth factor `psi_p`.
    pub factor: Expr,
}

/// A phase function as a finite sum of monomials times smooth factors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionSpec {
    /// Ambient dimension `n`.
    pub n: usize,
    /// Terms with pairwise distinct exponents, sorted lexicographically.
    pub terms: Vec<Term>,
}

/// Class-membership verdict for one representation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    /// Certified member of the unrestricted class: the hull of the term
    /// exponents equals the Taylor polyhedron and every hull-vertex factor
    /// is nonzero at the origin.
    EHat,
    /// Only the polyhedron-restricted class is certified, with the reported
    /// polyhedron.
    EHatP,
    /// This representation certifies nothing (a rewritten representation
    /// might; finding one is not attempted).
    Rejected,
}

/// Outcome of [`check_membership`].
#[derive(Debug, Clone)]
pub struct MembershipReport {
    /// Hull of the term exponents, `conv(union of p + R_+^n)`.
    pub hull: LatticePolyhedron,
    /// Newton polyhedron of the formal Taylor series.
    pub taylor_polyhedron: LatticePolyhedron,
    /// The verdict for this representation.
    pub verdict: Verdict,
    /// The certifying polyhedron for `EHat`/`EHatP` verdicts.
    pub certified: Option<LatticePolyhedron>,
    /// Human-readable explanation (why rejected, or why only `EHatP`).
    pub witness: String,
}

#[derive(Serialize, Deserialize)]
struct SpecFile {
    n: usize,
    terms: Vec<SpecTerm>,
}

#[derive(Serialize, Deserialize)]
struct SpecTerm {
    exponent: Vec<i64>,
    factor: String,
}

impl FunctionSpec {
    /// The zero function in `n` variables.
    pub fn zero(n: usize) -> Self {
        FunctionSpec { n, terms: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub(crate) fn from_term_map(n: usize, map: BTreeMap<Vec<i64>, Expr>) -> Self {
        let terms = map
            .into_iter()
            .filter(|(_, factor)| !factor.is_zero())
            .map(|(exponent, factor)| Term { exponent, factor })
            .collect();
        FunctionSpec { n, terms }
    }

    /// Exponent support `S` of the representation, sorted.
    pub fn support(&self) -> Vec<LatticeVector> {
        self.terms.iter().map(|t| t.exponent.clone()).collect()
    }

    /// Exponent support of the formal Taylor series at the origin: each term
    /// contributes its exponent plus the Taylor support of its factor. Flat
    /// components contribute nothing; a non-constant `exp` argument
    /// contributes only its constant term, which makes the result
    /// conservative for such factors.
    pub fn taylor_support(&self) -> Result<Vec<LatticeVector>, Error> {
        let mut out: BTreeSet<Vec<i64>> = BTreeSet::new();
        for t in &self.terms {
            for s in taylor::taylor_support_expr(&t.factor, self.n)? {
                out.insert(s.iter().zip(&t.exponent).map(|(a, b)| a + b).collect());
            }
        }
        Ok(out.into_iter().collect())
    }

    /// Floating-point evaluation of the full sum.
    pub fn evaluate(&self, x: &[f64]) -> Result<f64, Error> {
        if x.len() != self.n {
            return Err(Error::Domain(format!(
                "point arity {} does not match dimension {}",
                x.len(),
                self.n
            )));
        }
        if x.iter().any(|c| !c.is_finite()) {
            return Err(Error::Domain("evaluation point must be finite".into()));
        }
        Ok(self.eval_unchecked(x))
    }

    /// Evaluation without domain checks, for quadrature inner loops.
    pub fn eval_unchecked(&self, x: &[f64]) -> f64 {
        let mut total = 0.0;
        for t in &self.terms {
            let mut mono = 1.0;
            for (k, &e) in t.exponent.iter().enumerate() {
                if e > 0 {
                    mono *= x[k].powi(e as i32);
                }
            }
            total += mono * t.factor.eval_f64(x);
        }
        total
    }

    /// Exact rational evaluation; `None` when an `exp` or flat atom takes an
    /// irrational value at `x`.
    pub fn eval_exact(&self, x: &[BigRat]) -> Option<BigRat> {
        let mut total = BigRat::zero();
        for t in &self.terms {
            let mut mono = BigRat::from_integer(1.into());
            for (k, &e) in t.exponent.iter().enumerate() {
                if e > 0 {
                    mono *= crate::rat::big_pow(&x[k], e as u32);
                }
            }
            total += mono * t.factor.eval_exact(x)?;
        }
        Some(total)
    }

    /// Partial derivative as a new `FunctionSpec`:
    /// `d/dx_i (x^p psi) = p_i x^{p-e_i} psi + x^p d/dx_i psi`.
    pub fn differentiate(&self, i: usize) -> Result<FunctionSpec, Error> {
        if i < 1 || i > self.n {
            return Err(Error::Domain(format!(
                "derivative index {i} out of range 1..={}",
                self.n
            )));
        }
        let mut map: BTreeMap<Vec<i64>, Expr> = BTreeMap::new();
        for t in &self.terms {
            let p_i = t.exponent[i - 1];
            if p_i > 0 {
                let mut lowered = t.exponent.clone();
                lowered[i - 1] -= 1;
                let add = Expr::mul(Expr::num(p_i), t.factor.clone());
                merge_term(&mut map, lowered, add);
            }
            let dpsi = t.factor.diff(i);
            if !dpsi.is_zero() {
                merge_term(&mut map, t.exponent.clone(), dpsi);
            }
        }
        Ok(FunctionSpec::from_term_map(self.n, map))
    }

    /// All `n` partial derivatives.
    pub fn gradient(&self) -> Result<Vec<FunctionSpec>, Error> {
        (1..=self.n).map(|i| self.differentiate(i)).collect()
    }

    /// The reflected function `x -> f(signs * x)` with signs in `{-1, +1}`.
    /// The exponent support is unchanged (each monomial only picks up a
    /// sign), so the Newton polyhedron and its fan carry over verbatim.
    pub fn reflect(&self, signs: &[i8]) -> Result<FunctionSpec, Error> {
        if signs.len() != self.n {
            return Err(Error::Domain(format!(
                "sign vector arity {} does not match dimension {}",
                signs.len(),
                self.n
            )));
        }
        let mut map: BTreeMap<Vec<i64>, Expr> = BTreeMap::new();
        for t in &self.terms {
            let flips: i64 = t
                .exponent
                .iter()
                .zip(signs)
                .filter(|&(p, &s)| s < 0 && p % 2 == 1)
                .count() as i64;
            let mut factor = t.factor.reflect(signs);
            if flips % 2 == 1 {
                factor = Expr::mul(Expr::num(-1), factor);
            }
            merge_term(&mut map, t.exponent.clone(), factor);
        }
        Ok(FunctionSpec::from_term_map(self.n, map))
    }

    /// Canonical display string; parses back to the same `FunctionSpec`.
    pub fn display(&self) -> String {
        self.display_named("x")
    }

    /// Canonical display with a caller-chosen variable letter.
    pub fn display_named(&self, var: &str) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let parts: Vec<String> = self.terms.iter().map(|t| term_display(t, var)).collect();
        parts.join(" + ")
    }

    /// Serializes to the on-disk JSON form.
    pub fn to_json(&self) -> String {
        let file = SpecFile {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|t| SpecTerm {
                    exponent: t.exponent.clone(),
                    factor: t.factor.to_string(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("spec serialization cannot fail")
    }

    /// Parses the on-disk JSON form.
    pub fn from_json(text: &str) -> Result<FunctionSpec, Error> {
        let file: SpecFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("spec JSON: {e}")))?;
        if file.n == 0 {
            return Err(Error::Parse("dimension n must be positive".into()));
        }
        let mut map: BTreeMap<Vec<i64>, Expr> = BTreeMap::new();
        for t in &file.terms {
            if t.exponent.len() != file.n {
                return Err(Error::Parse(format!(
                    "exponent {:?} has arity {}, expected {}",
                    t.exponent,
                    t.exponent.len(),
                    file.n
                )));
            }
            if t.exponent.iter().any(|&e| e < 0) {
                return Err(Error::Parse(format!(
                    "exponent {:?} has a negative entry",
                    t.exponent
                )));
            }
            let factor = parse_expr(&t.factor, file.n)?;
            merge_term(&mut map, t.exponent.clone(), factor);
        }
        Ok(FunctionSpec::from_term_map(file.n, map))
    }
}

impl fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display())
    }
}

fn merge_term(map: &mut BTreeMap<Vec<i64>, Expr>, exponent: Vec<i64>, factor: Expr) {
    match map.remove(&exponent) {
        Some(existing) => {
            map.insert(exponent, Expr::add(existing, factor));
        }
        None => {
            map.insert(exponent, factor);
        }
    }
}

fn monomial_display(exponent: &[i64], var: &str) -> String {
    let parts: Vec<String> = exponent
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(k, &e)| {
            if e == 1 {
                format!("{var}{}", k + 1)
            } else {
                format!("{var}{}^{}", k + 1, e)
            }
        })
        .collect();
    parts.join("*")
}

fn term_display(t: &Term, var: &str) -> String {
    let mono = monomial_display(&t.exponent, var);
    // Constants are printed before the monomial; every other non-unit factor
    // goes after it, parenthesized unless it would survive re-splitting
    // (flat, flatm, and exp atoms are never absorbed into the exponent).
    let factor_part = if t.factor.is_one() {
        None
    } else {
        Some(match &t.factor {
            Expr::Const(_) | Expr::Flat { .. } | Expr::FlatM { .. } | Expr::Exp(_) => {
                t.factor.display_named(var)
            }
            other => format!("({})", other.display_named(var)),
        })
    };
    match (mono.is_empty(), factor_part) {
        (true, None) => "1".to_string(),
        (true, Some(f)) => f,
        (false, None) => mono,
        (false, Some(f)) => {
            if matches!(t.factor, Expr::Const(_)) {
                format!("{f}*{mono}")
            } else {
                format!("{mono}*{f}")
            }
        }
    }
}

/// Parses a function from the expression grammar, splitting each additive
/// unit into its bare monomial prefactor and the residual smooth factor.
pub fn parse_function(text: &str, n: usize) -> Result<FunctionSpec, Error> {
    if n == 0 {
        return Err(Error::Domain("dimension n must be positive".into()));
    }
    let units = expr::parse_units(text, n)?;
    let mut map: BTreeMap<Vec<i64>, Expr> = BTreeMap::new();
    for unit in units {
        let mut exponent = vec![0i64; n];
        for (var, pow) in unit.monomial {
            exponent[var - 1] += pow as i64;
        }
        let factor = if unit.negative {
            Expr::mul(Expr::num(-1), unit.factor)
        } else {
            unit.factor
        };
        merge_term(&mut map, exponent, factor);
    }
    Ok(FunctionSpec::from_term_map(n, map))
}

/// Checks which class this representation certifies. With `declared`
/// present, the `EHatP` verdict is judged against that polyhedron instead of
/// the hull of the term exponents.
pub fn check_membership(
    f: &FunctionSpec,
    declared: Option<&LatticePolyhedron>,
) -> Result<MembershipReport, Error> {
    let hull = geometry::build_polyhedron(f.n, &f.support())?;
    let taylor_polyhedron = geometry::build_polyhedron(f.n, &f.taylor_support()?)?;

    // The two conditions certifying the unrestricted class; a vanishing
    // vertex factor is the more specific witness, so test vertices first.
    let mut failure: Option<String> = None;
    for v in &hull.vertices {
        let term = f
            .terms
            .iter()
            .find(|t| &t.exponent == v)
            .ok_or_else(|| Error::Internal("hull vertex is not a term exponent".into()))?;
        if !taylor::constant_term_nonzero(&term.factor, f.n)? {
            failure = Some(format!(
                "the factor at vertex ({}) vanishes at the origin",
                join_coords(v)
            ));
            break;
        }
    }
    if failure.is_none() && hull != taylor_polyhedron {
        failure = Some(
            "the Taylor polyhedron differs from the hull of the term exponents".to_string(),
        );
    }

    if failure.is_none() {
        return Ok(MembershipReport {
            certified: Some(hull.clone()),
            hull,
            taylor_polyhedron,
            verdict: Verdict::EHat,
            witness: String::new(),
        });
    }
    let why_not_ehat = failure.expect("failure is set on this branch");

    // Fall back to the polyhedron-restricted class.
    let p = declared.unwrap_or(&hull);
    if p.dim_ambient != f.n {
        return Err(Error::Domain(
            "declared polyhedron has the wrong ambient dimension".into(),
        ));
    }
    let outside = f
        .terms
        .iter()
        .find(|t| !p.contains_int(&t.exponent))
        .map(|t| t.exponent.clone());
    let origin = vec![0i64; f.n];
    let vacuous = p.contains_int(&origin);

    let (verdict, certified, witness) = if let Some(q) = outside {
        (
            Verdict::Rejected,
            None,
            format!(
                "term exponent ({}) lies outside the declared polyhedron; {}",
                join_coords(&q),
                why_not_ehat
            ),
        )
    } else if vacuous {
        (
            Verdict::Rejected,
            None,
            format!(
                "{why_not_ehat}; the certifying polyhedron would be the whole positive \
                 orthant, which certifies nothing"
            ),
        )
    } else {
        (Verdict::EHatP, Some(p.clone()), why_not_ehat)
    };

    Ok(MembershipReport {
        hull,
        taylor_polyhedron,
        verdict,
        certified,
        witness,
    })
}

fn join_coords(v: &[i64]) -> String {
    v.iter()
        .map(i64::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

/// The gamma-part `f_gamma(x) = sum_{p in gamma} x^p psi_p(T_{W(gamma)} x)`,
/// where `T_W` substitutes 0 for the variables in `W(gamma)`.
pub fn gamma_part(
    f: &FunctionSpec,
    gamma: &Face,
    p: &LatticePolyhedron,
) -> Result<FunctionSpec, Error> {
    for t in &f.terms {
        if !p.contains_int(&t.exponent) {
            return Err(Error::Domain(format!(
                "term exponent ({}) lies outside the certifying polyhedron",
                join_coords(&t.exponent)
            )));
        }
    }
    let canonical = geometry::face_of_pair(p, &gamma.defining_pair)?;
    if canonical.vertices != gamma.vertices || canonical.v_set != gamma.v_set {
        return Err(Error::Domain(
            "the given face is not a face of the certifying polyhedron".into(),
        ));
    }
    let w: BTreeSet<usize> = gamma.w_set.iter().copied().collect();
    let pair = &gamma.defining_pair;
    let mut map: BTreeMap<Vec<i64>, Expr> = BTreeMap::new();
    for t in &f.terms {
        if pair.eval(&t.exponent) == pair.l {
            let factor = t.factor.set_zero(&w);
            merge_term(&mut map, t.exponent.clone(), factor);
        }
    }
    Ok(FunctionSpec::from_term_map(f.n, map))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_polyhedron, principal_face_and_multiplicity};

    fn octic_flat() -> FunctionSpec {
        parse_function("x1^8+x1^7*x2+x1^6*x2^2*(1+flat(2,1))", 2).unwrap()
    }

    #[test]
    fn parse_splits_monomial_prefactors() {
        let f = octic_flat();
        assert_eq!(
            f.support(),
            vec![vec![6, 2], vec![7, 1], vec![8, 0]]
        );
        let t62 = &f.terms[0];
        assert_eq!(t62.factor, parse_expr("1+flat(2,1)", 2).unwrap());
        assert_eq!(f.terms[2].factor, Expr::one());
    }

    #[test]
    fn zero_and_range_errors() {
        assert!(parse_function("0", 2).unwrap().is_zero());
        assert!(parse_function("x3", 2).is_err());
        assert!(parse_function("x1^2-x1^2", 2).unwrap().is_zero());
    }

    #[test]
    fn display_round_trips() {
        for text in [
            "x1^8+x1^7*x2+x1^6*x2^2*(1+flat(2,1))",
            "x1^2*x2^2+x1*x2*flatm(2,1,1)",
            "x1^2*x2^2*(1+flatm(2,1,2))",
            "x1^2-3*x2+1/2",
            "(x1+x2)^2",
            "x1^2*(x1+exp(x2))",
        ] {
            let f = parse_function(text, 2).unwrap();
            let printed = f.display();
            let again = parse_function(&printed, 2).unwrap();
            assert_eq!(f, again, "round trip failed: {text} -> {printed}");
        }
    }

    #[test]
    fn json_round_trips() {
        let f = octic_flat();
        let json = f.to_json();
        let again = FunctionSpec::from_json(&json).unwrap();
        assert_eq!(f, again);
    }

    #[test]
    fn evaluation_matches_hand_value() {
        let f = octic_flat();
        let v = f.evaluate(&[1.0, 1.0]).unwrap();
        let expected = 3.0 + (-1.0f64).exp();
        assert!((v - expected).abs() < 1e-14);
        assert!(f.evaluate(&[f64::NAN, 0.0]).is_err());
    }

    #[test]
    fn taylor_support_of_the_fixtures() {
        let f = octic_flat();
        assert_eq!(
            f.taylor_support().unwrap(),
            vec![vec![6, 2], vec![7, 1], vec![8, 0]]
        );
        let fk = parse_function("x1^2*x2^2+x1^3*flat(2,1)", 2).unwrap();
        assert_eq!(fk.taylor_support().unwrap(), vec![vec![2, 2]]);
    }

    #[test]
    fn membership_ladder() {
        // k = 0: the flat term sits at the origin exponent.
        let f0 = parse_function("x1^2*x2^2+flat(2,1)", 2).unwrap();
        let r0 = check_membership(&f0, None).unwrap();
        assert_eq!(r0.verdict, Verdict::Rejected);

        // k = 1: certifiable only over (1,1)+R_+^2.
        let f1 = parse_function("x1^2*x2^2+x1*x2*flatm(2,1,1)", 2).unwrap();
        let r1 = check_membership(&f1, None).unwrap();
        assert_eq!(r1.verdict, Verdict::EHatP);
        let p = r1.certified.unwrap();
        assert_eq!(p.vertices, vec![vec![1, 1]]);

        // k = 2 with the flat factor absorbed: full membership.
        let f2 = parse_function("x1^2*x2^2*(1+flatm(2,1,2))", 2).unwrap();
        let r2 = check_membership(&f2, None).unwrap();
        assert_eq!(r2.verdict, Verdict::EHat);

        // k = 3 likewise.
        let f3 = parse_function("x1^2*x2^2*(1+x1*flatm(2,1,2))", 2).unwrap();
        let r3 = check_membership(&f3, None).unwrap();
        assert_eq!(r3.verdict, Verdict::EHat);

        // The k = 2 form without absorption certifies only the restricted
        // class over (2,0)+R_+^2: its hull vertex carries a flat factor.
        let raw = parse_function("x1^2*x2^2+x1^2*flat(2,1)", 2).unwrap();
        let rr = check_membership(&raw, None).unwrap();
        assert_eq!(rr.verdict, Verdict::EHatP);
        assert!(rr.witness.contains("vertex (2,0)"));
        assert_eq!(rr.certified.unwrap().vertices, vec![vec![2, 0]]);
    }

    #[test]
    fn gamma_part_on_the_principal_face() {
        let f = octic_flat();
        let report = check_membership(&f, None).unwrap();
        assert_eq!(report.verdict, Verdict::EHat);
        let p = report.certified.unwrap();
        let (tau, m) = principal_face_and_multiplicity(&p).unwrap();
        assert_eq!(m, 1);
        let part = gamma_part(&f, &tau, &p).unwrap();
        assert_eq!(part.display(), "x1^6*x2^2*(1+flat(2,1))");
    }

    #[test]
    fn gamma_part_of_the_trivial_face_is_f() {
        let f = octic_flat();
        let p = build_polyhedron(2, &f.support()).unwrap();
        let faces = crate::geometry::enumerate_faces(&p).unwrap();
        let trivial = faces.iter().find(|g| g.dim == 2).unwrap();
        let part = gamma_part(&f, trivial, &p).unwrap();
        assert_eq!(part, f);
    }

    #[test]
    fn gamma_part_vanishing_off_support() {
        // Certified over the declared P = (1,1)+R_+^2, the face {(1,1)} meets
        // no term exponent of the k=2 representation.
        let f2 = parse_function("x1^2*x2^2*(1+flatm(2,1,2))", 2).unwrap();
        let p = build_polyhedron(2, &[vec![1, 1]]).unwrap();
        let faces = crate::geometry::enumerate_faces(&p).unwrap();
        let vertex_face = faces.iter().find(|g| g.dim == 0).unwrap();
        let part = gamma_part(&f2, vertex_face, &p).unwrap();
        assert!(part.is_zero());
    }

    #[test]
    fn differentiate_keeps_the_representation_form() {
        let f = parse_function("x1^2*x2^2*(1+flatm(2,1,2))", 2).unwrap();
        let d1 = f.differentiate(1).unwrap();
        // d/dx1 = 2 x1 x2^2 (1+flatm) : a single term at (1,2).
        assert_eq!(d1.support(), vec![vec![1, 2]]);
        let v = d1.evaluate(&[0.5, 0.25]).unwrap();
        let h = 1e-6;
        let fd = (f.evaluate(&[0.5 + h, 0.25]).unwrap() - f.evaluate(&[0.5 - h, 0.25]).unwrap())
            / (2.0 * h);
        assert!((v - fd).abs() < 1e-5 * (1.0 + v.abs()));
    }

    #[test]
    fn reflection_agrees_with_pointwise_composition() {
        let f = parse_function(
            "x1^3*x2 - x1*flatm(2,1,3) + x2^2*(1+flat(1,2)) + exp(x1+x2)",
            2,
        )
        .unwrap();
        for signs in [[1i8, 1], [-1, 1], [1, -1], [-1, -1]] {
            let g = f.reflect(&signs).unwrap();
            assert_eq!(g.support(), f.support());
            for &(a, b) in &[(0.7, 0.4), (-0.9, 1.1), (0.3, -0.5), (0.0, 0.8), (0.6, 0.0)] {
                let direct = f
                    .evaluate(&[f64::from(signs[0]) * a, f64::from(signs[1]) * b])
                    .unwrap();
                let reflected = g.evaluate(&[a, b]).unwrap();
                assert!(
                    (direct - reflected).abs() <= 1e-14 * (1.0 + direct.abs()),
                    "signs {signs:?} at ({a},{b}): {direct} vs {reflected}"
                );
            }
        }
    }

    #[test]
    fn reflecting_twice_is_the_identity() {
        let f = parse_function("x1^8+x1^7*x2+x1^6*x2^2*(1+flat(2,1))", 2).unwrap();
        let g = f.reflect(&[-1, -1]).unwrap().reflect(&[-1, -1]).unwrap();
        for &(a, b) in &[(0.3, 0.9), (-0.4, 0.2)] {
            let lhs = f.evaluate(&[a, b]).unwrap();
            let rhs = g.evaluate(&[a, b]).unwrap();
            assert!((lhs - rhs).abs() <= 1e-14 * (1.0 + lhs.abs()));
        }
        assert_eq!(g.support(), f.support());
    }
}
