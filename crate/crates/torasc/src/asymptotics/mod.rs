//! Quantitative conclusions drawn from a resolved phase
//!
//! The other modules answer structural questions: what the Newton polyhedron
//! looks like, which cones resolve it, whether the phase is admissible and
//! nondegenerate. This module turns that structure into numbers for the two
//! integral families attached to a phase `f` and a compactly supported
//! amplitude `phi`:
//!
//! * the local zeta functions `Z_{+/-}(s)`, integrals of `(+/- f)^s phi`
//!   over the regions where the sign matches, whose continuations are
//!   meromorphic with poles along arithmetic progressions read off the
//!   resolution ([`candidate_poles`]), with the leading pole at
//!   `-1/d` of order `m` and limits computable chart by chart
//!   ([`leading_zeta_coefficients`]);
//! * the oscillatory integrals `I(t)` of `e^{i t f} phi`, which decay like
//!   `|t|^{-1/d} (ln |t|)^{m-1}` with a leading coefficient assembled from
//!   the zeta limits ([`osc_leading_term`]).
//!
//! Everything symbolic is cross-checkable numerically: [`numeric_zeta`] and
//! [`numeric_osc`] evaluate the integrals directly by deterministic
//! adaptive quadrature ([`integrate`]), [`extrapolate_to_pole`] measures the
//! leading zeta limit from a ladder of honest evaluations, and [`fit_decay`]
//! recovers the empirical decay law from oscillatory samples. Amplitudes are
//! products of scaled bump functions ([`Amplitude`]), so supports are boxes
//! and every integral here is over a compact region.

mod amplitude;
mod coeff;
mod osc;
mod poles;
mod quad;
mod zeta;

pub use amplitude::{bump, Amplitude};
pub use coeff::{
    gamma_fn, leading_zeta_coefficients, osc_leading_term, CoeffFormula, CoeffRequest,
    Hypothesis, LeadingCoeffData, OctantCoeff, OscLeadingTerm,
};
pub use osc::{fit_decay, numeric_osc, osc_samples, DecayFit, EtaCandidate, OscPoint};
pub use poles::{candidate_poles, CandidatePole, CandidatePoleSet, PoleSource};
pub use quad::{
    integrate, integrate_with, QuadOutcome, QuadValue, QuadratureConfig,
};
pub use zeta::{
    extrapolate_to_pole, numeric_zeta, zeta_samples, PoleExtrapolation, ZetaPoint,
    DEFAULT_EPSILONS,
};
