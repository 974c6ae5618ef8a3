//! Candidate poles of the local zeta functions attached to a phase.
//!
//! After the monomial change of variables over each chart, the zeta
//! integrand factors as a power `y_j^{l_j s + w_j - 1}` per chart variable
//! times a smooth nonvanishing part. Each ray with `l > 0` therefore
//! contributes the arithmetic progression `s = -(w + nu)/l`, `nu = 0, 1,
//! ...`, where `w` is the coordinate sum of the ray, and the smooth part
//! together with the cutoff contributes the negative integers. Everything
//! here is a candidate list with exact order bounds: actual poles form a
//! subset, but no pole can appear anywhere else, and the bound at the
//! leading candidate `-1/d` is attained for nondegenerate phases.

use crate::fan;
use crate::funcspec::{self, FunctionSpec, Verdict};
use crate::geometry::LatticeVector;
use crate::rat::{is_nonneg_integer, Rat};
use crate::toric;
use crate::Error;
use num_traits::Signed;
use std::collections::BTreeMap;

/// Where a candidate pole comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PoleSource {
    /// A ray of the resolved fan with positive minimal weight `l`.
    Ray {
        ray: LatticeVector,
        /// Minimal value of the ray on the polyhedron.
        l: i64,
        /// Index in the arithmetic progression of this ray.
        nu: i64,
        /// True when the ray supports a facet of the polyhedron. Rays
        /// inserted by the unimodular refinement are not intrinsic to the
        /// phase; their candidates depend on the chosen subdivision.
        facet_normal: bool,
    },
    /// A negative integer contributed by the smooth factors and the cutoff.
    Integer { nu: i64 },
}

/// One candidate pole with its exact order bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidatePole {
    pub value: Rat,
    /// Largest possible pole order at this value.
    pub order: usize,
    pub sources: Vec<PoleSource>,
}

/// The full candidate list for one phase, sorted by value descending, so
/// the pole that dominates the small-parameter asymptotics comes first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidatePoleSet {
    pub n: usize,
    /// Newton distance of the phase.
    pub d: Rat,
    /// Leading ray candidate `-1/d`; the first entry overall, except that an
    /// integer candidate can sit above it when `d < 1`.
    pub beta_tilde: Rat,
    /// Order bound attained at `beta_tilde` for nondegenerate phases.
    pub multiplicity: usize,
    /// Progression depth the list was enumerated to.
    pub nu_max: i64,
    pub poles: Vec<CandidatePole>,
}

/// Enumerates the candidate poles of the zeta functions of `f` down to
/// progression depth `nu_max`.
///
/// The phase must be a certified class member whose own support polyhedron
/// is its Newton polyhedron; anything weaker is declined because the chart
/// factorization below would not describe the function.
pub fn candidate_poles(f: &FunctionSpec, nu_max: i64) -> Result<CandidatePoleSet, Error> {
    if nu_max < 0 {
        return Err(Error::Domain("nu_max must be nonnegative".into()));
    }
    let membership = funcspec::check_membership(f, None)?;
    match membership.verdict {
        Verdict::EHat => {}
        Verdict::EHatP => {
            return Err(Error::Refusal(
                "the phase is certified only relative to a declared polyhedron, not its own \
                 support hull; pole data would describe the wrong polyhedron"
                    .into(),
            ));
        }
        Verdict::Rejected => {
            return Err(Error::Refusal(
                "the phase is outside the admissible class; its zeta poles are not governed \
                 by the support polyhedron"
                    .into(),
            ));
        }
    }
    let res = toric::resolve(f)?;
    let d = -res.annotations.beta_tilde.recip();
    if !d.is_positive() {
        return Err(Error::Refusal(
            "the phase does not vanish at the origin; there is no decay to measure".into(),
        ));
    }

    let facet_rays = fan::normal_fan(&res.polyhedron)?.rays();
    let mut candidates: BTreeMap<Rat, Vec<PoleSource>> = BTreeMap::new();
    for ray in res.fan.rays() {
        let (l, _) = crate::geometry::l_value(&ray, &res.polyhedron)?;
        if l <= 0 {
            continue;
        }
        let weight: i64 = ray.iter().sum();
        let facet_normal = facet_rays.contains(&ray);
        for nu in 0..=nu_max {
            let value = -Rat::new(weight + nu, l);
            candidates.entry(value).or_default().push(PoleSource::Ray {
                ray: ray.clone(),
                l,
                nu,
                facet_normal,
            });
        }
    }
    for nu in 0..=nu_max {
        let value = Rat::from_integer(-(1 + nu));
        candidates
            .entry(value)
            .or_default()
            .push(PoleSource::Integer { nu });
    }

    let poles: Vec<CandidatePole> = candidates
        .into_iter()
        .rev()
        .map(|(value, sources)| CandidatePole {
            order: order_bound(&res, value, f.n),
            value,
            sources,
        })
        .collect();

    Ok(CandidatePoleSet {
        n: f.n,
        d,
        beta_tilde: res.annotations.beta_tilde,
        multiplicity: res.annotations.multiplicity,
        nu_max,
        poles,
    })
}

/// Exact order bound at `value`: the largest number of chart variables of a
/// single cone whose power factor degenerates there, plus one cutoff order
/// when the value is a negative integer (capped at the ambient dimension).
fn order_bound(res: &toric::Resolution, value: Rat, n: usize) -> usize {
    let mut base = 0usize;
    for (cone, ann) in res.fan.maximal.iter().zip(&res.annotations.cones) {
        let mut card = 0usize;
        for (j, ray) in cone.skeleton.iter().enumerate() {
            let l = ann.l_values[j];
            if l == 0 {
                continue;
            }
            let weight: i64 = ray.iter().sum();
            let residue = -value * Rat::from_integer(l) - Rat::from_integer(weight);
            if is_nonneg_integer(residue) {
                card += 1;
            }
        }
        base = base.max(card);
    }
    if value.is_integer() {
        base.min(n - 1) + 1
    } else {
        base
    }
}
