//! The nondegeneracy verdict: whether any gamma-part of a compact face
//! vanishes together with its gradient off the coordinate planes.
//!
//! Compact-face gamma-parts are quasihomogeneous polynomials with strictly
//! positive weights, so their zero-with-vanishing-gradient sets are invariant
//! under the weighted scaling action. That reduces the search space: in one
//! or two effective variables the question becomes an exact common-real-root
//! test of a slice polynomial and its derivative (decided by Sturm
//! sequences); in three or more, a scaled solution can be normalized onto a
//! face of the unit cube, which a conservative interval branch-and-bound
//! sweeps within a box budget. Refutations always carry a rational witness
//! whose residual is re-verified by exact arithmetic; "unknown" is an honest
//! outcome, never a silent pass.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::poly::{self, Interval, SparsePoly, UniPoly};
use crate::funcspec::{self, FunctionSpec};
use crate::geometry;
use crate::rat::{big_to_f64, bigint, BigRat};
use crate::Error;

/// Decision for one compact face.
#[derive(Debug, Clone, PartialEq)]
pub enum FaceStatus {
    /// No point off the coordinate planes has the gamma-part and its whole
    /// gradient vanishing.
    Verified,
    /// A common zero exists; the witness is rational with exact residual at
    /// most `1e-10`.
    Refuted { witness: Vec<BigRat>, residual: f64 },
    /// The procedure could not decide within its budget.
    Unknown { reason: String },
}

/// Per-face record in a [`NondegeneracyReport`].
#[derive(Debug, Clone)]
pub struct FaceVerdict {
    /// Human-readable description of the face.
    pub face: String,
    /// Affine dimension of the face.
    pub dim: i32,
    /// Display form of the gamma-part that was tested.
    pub gamma_part: String,
    pub status: FaceStatus,
}

/// Aggregate verdict over all compact faces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Nondegeneracy {
    Verified,
    Refuted,
    Unknown,
}

#[derive(Debug, Clone)]
pub struct NondegeneracyReport {
    pub faces: Vec<FaceVerdict>,
    pub overall: Nondegeneracy,
}

/// Checks the gradient condition for every compact face of the Newton
/// polyhedron of `f`. The budget caps the total number of boxes the interval
/// fallback may process across all faces; the exact procedures ignore it.
pub fn nondegeneracy_check(
    f: &FunctionSpec,
    budget_boxes: usize,
) -> Result<NondegeneracyReport, Error> {
    let p = geometry::build_polyhedron(f.n, &f.support())?;
    p.require_nonempty("nondegeneracy check")?;
    let faces = geometry::enumerate_faces(&p)?;
    let mut verdicts = Vec::new();
    let mut budget = budget_boxes;
    for face in faces.iter().filter(|g| g.compact) {
        let f_gamma = funcspec::gamma_part(f, face, &p)?;
        let status = decide_face(&f_gamma, &mut budget);
        verdicts.push(FaceVerdict {
            face: face.describe(),
            dim: face.dim,
            gamma_part: f_gamma.display(),
            status,
        });
    }
    let mut overall = Nondegeneracy::Verified;
    for v in &verdicts {
        match v.status {
            FaceStatus::Refuted { .. } => {
                overall = Nondegeneracy::Refuted;
                break;
            }
            FaceStatus::Unknown { .. } => overall = Nondegeneracy::Unknown,
            FaceStatus::Verified => {}
        }
    }
    Ok(NondegeneracyReport {
        faces: verdicts,
        overall,
    })
}

fn decide_face(f_gamma: &FunctionSpec, budget: &mut usize) -> FaceStatus {
    if f_gamma.is_zero() {
        return FaceStatus::Unknown {
            reason: "the gamma-part vanishes identically".into(),
        };
    }
    let Some(full) = SparsePoly::from_gamma_part(f_gamma) else {
        return FaceStatus::Unknown {
            reason: "the gamma-part is not a polynomial with rational coefficients".into(),
        };
    };
    if full.terms.len() <= 1 {
        // A single term c x^p never vanishes off the coordinate planes.
        return FaceStatus::Verified;
    }
    let vars = full.effective_vars();
    let reduced = full.project(&vars);
    match vars.len() {
        1 => decide_univariate(&reduced, &vars, f_gamma),
        2 => decide_bivariate(&reduced, &vars, f_gamma),
        _ => decide_by_intervals(&reduced, &vars, f_gamma, budget),
    }
}

fn decide_univariate(reduced: &SparsePoly, vars: &[usize], f_gamma: &FunctionSpec) -> FaceStatus {
    let g = reduced
        .to_unipoly(0)
        .expect("projection produced one variable");
    let h = UniPoly::gcd(&g, &g.derivative());
    let assemble = |c: &BigRat| assemble_point(f_gamma.n, vars, std::slice::from_ref(c));
    try_refute(&h, f_gamma, assemble).unwrap_or(FaceStatus::Verified)
}

/// The two-variable decision. Every zero of the gradient off the coordinate
/// planes can be scaled (by quasihomogeneity, with strictly positive
/// weights) onto a slice `u = +-1`, where the Euler identity makes it a
/// common real root of the slice polynomial and its derivative.
fn decide_bivariate(reduced: &SparsePoly, vars: &[usize], f_gamma: &FunctionSpec) -> FaceStatus {
    for eps in [1i64, -1] {
        let sliced = reduced.substitute(0, &bigint(eps));
        let g = match sliced.to_unipoly(1) {
            Some(g) if !g.is_zero() => g,
            _ => {
                return FaceStatus::Unknown {
                    reason: "a coordinate slice degenerated unexpectedly".into(),
                }
            }
        };
        let h = UniPoly::gcd(&g, &g.derivative());
        let assemble =
            |c: &BigRat| assemble_point(f_gamma.n, vars, &[bigint(eps), c.clone()]);
        if let Some(status) = try_refute(&h, f_gamma, assemble) {
            return status;
        }
    }
    FaceStatus::Verified
}

/// Turns a polynomial whose nonzero real roots are exactly the candidate
/// witness coordinates into a refutation, or reports that none exist
/// (`None`) or that refinement stalled (`Some(Unknown)`).
fn try_refute(
    h: &UniPoly,
    f_gamma: &FunctionSpec,
    assemble: impl Fn(&BigRat) -> Vec<BigRat>,
) -> Option<FaceStatus> {
    let (stripped, _) = h.strip_zero_roots();
    if stripped.degree().unwrap_or(0) == 0 {
        return None;
    }
    let sf = stripped.square_free_part();
    if !poly::has_nonzero_real_root(&sf) {
        return None;
    }
    let grads = match f_gamma.gradient() {
        Ok(g) => g,
        Err(e) => {
            return Some(FaceStatus::Unknown {
                reason: format!("gradient computation failed: {e}"),
            })
        }
    };
    let Some((a, b)) = poly::isolate_nonzero_root(&sf) else {
        return Some(FaceStatus::Unknown {
            reason: "root isolation failed".into(),
        });
    };
    let threshold = residual_tolerance();
    let accept = |c: &BigRat| {
        let x = assemble(c);
        if x.iter().any(Zero::is_zero) {
            return false;
        }
        exact_residual(f_gamma, &grads, &x).is_some_and(|r| r <= threshold)
    };
    match poly::refine_root_witness(&sf, a, b, accept) {
        Some(coord) => {
            let witness = assemble(&coord);
            let residual = exact_residual(f_gamma, &grads, &witness)
                .expect("residual was computable during acceptance");
            Some(FaceStatus::Refuted {
                witness,
                residual: big_to_f64(&residual),
            })
        }
        None => Some(FaceStatus::Unknown {
            reason: "witness refinement did not reach the residual tolerance".into(),
        }),
    }
}

/// Interval branch-and-bound for three or more effective variables. A
/// common zero off the coordinate planes can be scaled onto a face of the
/// unit cube, so the search runs over the `2 n` faces. Boxes are discharged
/// when the polynomial or any partial is sign-definite on them; tiny
/// undischarged boxes are polished numerically and accepted only with an
/// exact rational certificate.
fn decide_by_intervals(
    reduced: &SparsePoly,
    vars: &[usize],
    f_gamma: &FunctionSpec,
    budget: &mut usize,
) -> FaceStatus {
    let g = reduced.strip_monomial_content();
    let grads = g.gradient();
    let np = g.n;
    let mut stuck = 0usize;
    for slice_var in 0..np {
        for sign in [1.0f64, -1.0] {
            let mut first = vec![Interval::new(-1.0, 1.0); np];
            first[slice_var] = Interval::point(sign);
            let mut stack = vec![first];
            while let Some(cell) = stack.pop() {
                if *budget == 0 {
                    return FaceStatus::Unknown {
                        reason: "interval branch-and-bound budget exhausted".into(),
                    };
                }
                *budget -= 1;
                if !g.eval_interval(&cell).contains_zero() {
                    continue;
                }
                if grads.iter().any(|d| !d.eval_interval(&cell).contains_zero()) {
                    continue;
                }
                let (split, width) = widest_coordinate(&cell, slice_var);
                if width < 1e-6 {
                    if let Some(status) = certify_candidate(&cell, vars, f_gamma, &g, &grads) {
                        return status;
                    }
                    stuck += 1;
                    continue;
                }
                let mid = cell[split].midpoint();
                let (lo, hi) = (cell[split].lo, cell[split].hi);
                let mut left = cell.clone();
                left[split] = Interval::new(lo, mid);
                let mut right = cell;
                right[split] = Interval::new(mid, hi);
                stack.push(left);
                stack.push(right);
            }
        }
    }
    if stuck == 0 {
        FaceStatus::Verified
    } else {
        FaceStatus::Unknown {
            reason: format!("{stuck} candidate boxes could not be excluded or certified"),
        }
    }
}

fn widest_coordinate(cell: &[Interval], pinned: usize) -> (usize, f64) {
    let mut best = (0, -1.0);
    for (k, iv) in cell.iter().enumerate() {
        if k == pinned {
            continue;
        }
        let w = iv.width();
        if w > best.1 {
            best = (k, w);
        }
    }
    best
}

/// Polishes a candidate box center with a damped Gauss-Newton iteration on
/// the system (g, grad g) and certifies the result exactly, if possible.
fn certify_candidate(
    cell: &[Interval],
    vars: &[usize],
    f_gamma: &FunctionSpec,
    g: &SparsePoly,
    grads: &[SparsePoly],
) -> Option<FaceStatus> {
    let np = g.n;
    let mut x: Vec<f64> = cell.iter().map(|iv| iv.midpoint()).collect();
    let mut system: Vec<&SparsePoly> = Vec::with_capacity(np + 1);
    system.push(g);
    system.extend(grads.iter());
    for _ in 0..60 {
        let r: Vec<f64> = system.iter().map(|p| p.eval_f64(&x)).collect();
        if r.iter().map(|v| v * v).sum::<f64>() < 1e-30 {
            break;
        }
        // Jacobian of the residual system in every coordinate; the pinned
        // coordinate participates too, which only helps convergence.
        let jac: Vec<Vec<f64>> = system
            .iter()
            .map(|p| (0..np).map(|j| p.derivative(j).eval_f64(&x)).collect())
            .collect();
        let step = gauss_newton_step(&jac, &r, np)?;
        for j in 0..np {
            x[j] -= step[j];
        }
        if step.iter().map(|v| v * v).sum::<f64>() < 1e-32 {
            break;
        }
    }
    let residual: f64 = system
        .iter()
        .map(|p| p.eval_f64(&x).abs())
        .fold(0.0, f64::max);
    if residual > 1e-13 || x.iter().any(|v| v.abs() < 1e-6) {
        return None;
    }
    let coords: Vec<BigRat> = x.iter().map(|&v| rationalize(v)).collect::<Option<_>>()?;
    let witness = assemble_point(f_gamma.n, vars, &coords);
    if witness.iter().any(Zero::is_zero) {
        return None;
    }
    let grads_spec = f_gamma.gradient().ok()?;
    let exact = exact_residual(f_gamma, &grads_spec, &witness)?;
    if exact <= residual_tolerance() {
        Some(FaceStatus::Refuted {
            residual: big_to_f64(&exact),
            witness,
        })
    } else {
        None
    }
}

/// One damped Gauss-Newton step: solves `(J^T J + lambda I) s = J^T r`.
fn gauss_newton_step(jac: &[Vec<f64>], r: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut a = vec![vec![0.0; n]; n];
    let mut b = vec![0.0; n];
    for (row, &ri) in jac.iter().zip(r) {
        for i in 0..n {
            b[i] += row[i] * ri;
            for j in 0..n {
                a[i][j] += row[i] * row[j];
            }
        }
    }
    let trace: f64 = (0..n).map(|i| a[i][i]).sum();
    let damping = 1e-12 * trace.max(1.0);
    for (i, row) in a.iter_mut().enumerate() {
        row[i] += damping;
    }
    solve_f64(a, b)
}

fn solve_f64(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| {
            a[i][col]
                .abs()
                .partial_cmp(&a[j][col].abs())
                .expect("finite entries")
        })?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let m = a[row][col] / a[col][col];
            let upper = a[col].clone();
            for (k, &u) in upper.iter().enumerate().skip(col) {
                a[row][k] -= m * u;
            }
            b[row] -= m * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for col in (0..n).rev() {
        let mut acc = b[col];
        for k in col + 1..n {
            acc -= a[col][k] * x[k];
        }
        x[col] = acc / a[col][col];
    }
    Some(x)
}

/// Simple rational approximation of a float via continued-fraction
/// convergents, stopping near double precision or a denominator of `1e12`.
fn rationalize(v: f64) -> Option<BigRat> {
    if !v.is_finite() {
        return None;
    }
    let target = v.abs();
    let neg = v < 0.0;
    let mut x = target;
    let (mut h0, mut k0) = (1i128, 0i128);
    let (mut h1, mut k1) = (x.floor() as i128, 1i128);
    let mut frac = x - x.floor();
    for _ in 0..40 {
        let approx = h1 as f64 / k1 as f64;
        if (approx - target).abs() <= 1e-13 * target.max(1.0) || frac.abs() < 1e-15 {
            break;
        }
        x = 1.0 / frac;
        let a = x.floor() as i128;
        frac = x - x.floor();
        let h2 = a.checked_mul(h1)?.checked_add(h0)?;
        let k2 = a.checked_mul(k1)?.checked_add(k0)?;
        (h0, k0, h1, k1) = (h1, k1, h2, k2);
        if k1 > 1_000_000_000_000 {
            break;
        }
    }
    let mut out = BigRat::new(BigInt::from(h1), BigInt::from(k1));
    if neg {
        out = -out;
    }
    Some(out)
}

/// Places the effective coordinates into a full-arity point, with every
/// absent coordinate set to one (any nonzero value works: the gamma-part
/// does not depend on them).
fn assemble_point(n: usize, vars: &[usize], coords: &[BigRat]) -> Vec<BigRat> {
    let mut out = vec![BigRat::one(); n];
    for (slot, &k) in vars.iter().enumerate() {
        out[k] = coords[slot].clone();
    }
    out
}

fn residual_tolerance() -> BigRat {
    BigRat::new(BigInt::from(1), BigInt::from(10u64.pow(10)))
}

/// `|f(x)| + sum_k |df/dx_k (x)|`, exactly; `None` when a factor takes an
/// irrational value (impossible for compact-face gamma-parts).
fn exact_residual(
    f: &FunctionSpec,
    grads: &[FunctionSpec],
    x: &[BigRat],
) -> Option<BigRat> {
    let mut total = f.eval_exact(x)?.abs();
    for g in grads {
        total += g.eval_exact(x)?.abs();
    }
    Some(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspec::parse_function;

    #[test]
    fn a_sum_of_squares_is_verified() {
        let f = parse_function("x1^2+x2^2", 2).unwrap();
        let report = nondegeneracy_check(&f, 10_000).unwrap();
        assert_eq!(report.overall, Nondegeneracy::Verified);
        assert!(report
            .faces
            .iter()
            .all(|v| v.status == FaceStatus::Verified));
    }

    #[test]
    fn a_perfect_square_is_refuted_on_the_diagonal() {
        let f = parse_function("x1^2-2*x1*x2+x2^2", 2).unwrap();
        let report = nondegeneracy_check(&f, 10_000).unwrap();
        assert_eq!(report.overall, Nondegeneracy::Refuted);
        let refuted: Vec<_> = report
            .faces
            .iter()
            .filter_map(|v| match &v.status {
                FaceStatus::Refuted { witness, residual } => Some((witness.clone(), *residual)),
                _ => None,
            })
            .collect();
        assert_eq!(refuted.len(), 1);
        let (witness, residual) = &refuted[0];
        assert_eq!(witness.as_slice(), &[bigint(1), bigint(1)]);
        assert_eq!(*residual, 0.0);
    }

    #[test]
    fn the_first_example_phase_is_nondegenerate() {
        let f = parse_function("x1^8+x1^7*x2+x1^6*x2^2*(1+flat(2,1))", 2).unwrap();
        let report = nondegeneracy_check(&f, 10_000).unwrap();
        assert_eq!(report.overall, Nondegeneracy::Verified);
        // Vertices (8,0) and (6,2), plus the edge joining them.
        assert_eq!(report.faces.len(), 3);
        let edge = report
            .faces
            .iter()
            .find(|v| v.dim == 1)
            .expect("the polyhedron has one compact edge");
        assert_eq!(edge.gamma_part, "x1^6*x2^2 + x1^7*x2 + x1^8");
        assert_eq!(edge.status, FaceStatus::Verified);
    }

    #[test]
    fn flat_factors_drop_out_of_edge_gamma_parts() {
        let f = parse_function(
            "x1^6+x1^4*x2^2*flat(3,1)+x1^2*x2^4*flat(3,2)+x2^6",
            3,
        )
        .unwrap();
        let report = nondegeneracy_check(&f, 10_000).unwrap();
        assert_eq!(report.overall, Nondegeneracy::Verified);
        let edge = report
            .faces
            .iter()
            .find(|v| v.dim == 1)
            .expect("one compact edge");
        assert_eq!(edge.gamma_part, "x2^6 + x1^6");
    }

    #[test]
    fn three_effective_variables_fall_back_to_intervals() {
        // x1^2 + x2^2 + x3^2 is quasihomogeneous and positive off 0.
        let f = parse_function("x1^2+x2^2+x3^2", 3).unwrap();
        let report = nondegeneracy_check(&f, 200_000).unwrap();
        assert_eq!(report.overall, Nondegeneracy::Verified);
    }

    #[test]
    fn an_exhausted_budget_reports_unknown() {
        let f = parse_function("x1^2+x2^2+x3^2", 3).unwrap();
        let report = nondegeneracy_check(&f, 3).unwrap();
        assert_eq!(report.overall, Nondegeneracy::Unknown);
        assert!(report.faces.iter().any(|v| matches!(
            &v.status,
            FaceStatus::Unknown { reason } if reason.contains("budget")
        )));
    }

    #[test]
    fn degenerate_three_variable_phases_are_refuted_with_certificates() {
        // (x1 - x2)^2 + (x1 - x3)^2 vanishes to second order on the diagonal.
        let f = parse_function("2*x1^2+x2^2+x3^2-2*x1*x2-2*x1*x3", 3).unwrap();
        let report = nondegeneracy_check(&f, 400_000).unwrap();
        assert_eq!(report.overall, Nondegeneracy::Refuted);
        let witness = report
            .faces
            .iter()
            .find_map(|v| match &v.status {
                FaceStatus::Refuted { witness, .. } => Some(witness.clone()),
                _ => None,
            })
            .expect("a refutation certificate");
        assert_eq!(witness.len(), 3);
        assert!(witness.windows(2).all(|w| w[0] == w[1]));
    }
}
