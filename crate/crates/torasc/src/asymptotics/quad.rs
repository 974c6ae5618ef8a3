//! Deterministic adaptive tensor-product Gauss quadrature on boxes.
//!
//! The rule is the 4-point Gauss-Legendre rule on each axis (exact through
//! degree 7), tensored over the ambient dimension. Adaptivity is global:
//! every cell keeps a lookahead bisection of itself in each axis, the cell
//! error is the sum over axes of the difference between its own rule value
//! and the sum over the two halves, and the cell with the largest error is
//! refined first, split along its worst axis.
//!
//! Results are bit-for-bit reproducible, including under parallelism. The
//! root box is first cut into a fixed set of eight chunks (always the same
//! cuts, regardless of thread count), each chunk is refined by a strictly
//! sequential loop with a deterministic heap order, and the chunk totals are
//! added in chunk order at the end. Threads only change which chunks run
//! concurrently, never what any chunk computes.

use crate::Error;
use num_complex::Complex64;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// 4-point Gauss-Legendre abscissae on `[-1, 1]`.
const GAUSS_X: [f64; 4] = [
    -0.8611363115940526,
    -0.3399810435848563,
    0.3399810435848563,
    0.8611363115940526,
];

/// Matching weights; they sum to 2.
const GAUSS_W: [f64; 4] = [
    0.3478548451374538,
    0.6521451548625461,
    0.6521451548625461,
    0.3478548451374538,
];

/// Number of fixed top-level chunks; also the unit the budget is divided by.
const CHUNKS: usize = 8;

/// Mandatory bisections applied to each chunk before error estimates are
/// trusted: a single coarse parent-versus-children difference can cancel
/// accidentally and stop refinement on the very first test.
const MIN_DEPTH: usize = 2;

/// A cell narrower than this fraction of the root width on every axis is
/// frozen rather than split further.
const FROZEN_WIDTH: f64 = 1e-12;

/// Values that tensor Gauss quadrature can accumulate.
pub trait QuadValue: Copy + Send + Sync {
    fn zero() -> Self;
    fn add(self, other: Self) -> Self;
    fn sub(self, other: Self) -> Self;
    fn scale(self, w: f64) -> Self;
    /// Magnitude used for error estimates and convergence checks.
    fn norm(self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn add(self, other: Self) -> Self {
        self + other
    }
    fn sub(self, other: Self) -> Self {
        self - other
    }
    fn scale(self, w: f64) -> Self {
        self * w
    }
    fn norm(self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn add(self, other: Self) -> Self {
        self + other
    }
    fn sub(self, other: Self) -> Self {
        self - other
    }
    fn scale(self, w: f64) -> Self {
        self * w
    }
    fn norm(self) -> f64 {
        Complex64::norm(self)
    }
}

impl QuadValue for [f64; 2] {
    fn zero() -> Self {
        [0.0, 0.0]
    }
    fn add(self, other: Self) -> Self {
        [self[0] + other[0], self[1] + other[1]]
    }
    fn sub(self, other: Self) -> Self {
        [self[0] - other[0], self[1] - other[1]]
    }
    fn scale(self, w: f64) -> Self {
        [self[0] * w, self[1] * w]
    }
    fn norm(self) -> f64 {
        self[0].abs().max(self[1].abs())
    }
}

/// Controls for the adaptive loop.
#[derive(Debug, Clone)]
pub struct QuadratureConfig {
    /// Absolute error target for the whole integral.
    pub tolerance: f64,
    /// Cap on rule applications (one application = one tensor Gauss
    /// evaluation of a cell).
    pub budget: usize,
    /// Worker threads; 1 runs everything on the caller's thread. Any value
    /// produces identical results.
    pub threads: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            tolerance: 1e-6,
            budget: 400_000,
            threads: 1,
        }
    }
}

/// A converged integral together with its error estimate and cost.
#[derive(Debug, Clone, Copy)]
pub struct QuadOutcome<V> {
    pub value: V,
    /// Estimated absolute error, at most the requested tolerance.
    pub error: f64,
    /// Tensor rule applications spent.
    pub rule_applications: usize,
}

/// Integrates `f` over the box with the default refinement policy: no
/// vanishing certificate and bisection along the widest axis.
pub fn integrate<V, F>(
    domain: &[(f64, f64)],
    f: F,
    cfg: &QuadratureConfig,
) -> Result<QuadOutcome<V>, Error>
where
    V: QuadValue,
    F: Fn(&[f64]) -> V + Sync,
{
    integrate_with(domain, f, |_, _| false, None, cfg)
}

/// Integrates `f` over the box.
///
/// `vanishes(lo, hi)` may certify that the integrand is identically zero on
/// a cell; certified cells are dropped without any rule application, which
/// is how compactly supported amplitudes keep the refinement inside their
/// support. `split_hint(lo, hi)`, when given, picks the bisection axis for a
/// cell; the default is the axis of largest width relative to the root box.
pub fn integrate_with<V, F, Z>(
    domain: &[(f64, f64)],
    f: F,
    vanishes: Z,
    split_hint: Option<&(dyn Fn(&[f64], &[f64]) -> usize + Sync)>,
    cfg: &QuadratureConfig,
) -> Result<QuadOutcome<V>, Error>
where
    V: QuadValue,
    F: Fn(&[f64]) -> V + Sync,
    Z: Fn(&[f64], &[f64]) -> bool + Sync,
{
    integrate_rule(
        domain,
        |bx: &[(f64, f64)]| tensor_rule(bx, &f),
        vanishes,
        split_hint,
        cfg,
    )
}

/// The engine under [`integrate_with`], generalized over the per-cell rule:
/// `rule(bx)` must return an approximation of the integral over the cell
/// that improves under bisection. The oscillatory integrator plugs in a
/// rule that switches between plain Gauss and a linearized-phase form.
pub(crate) fn integrate_rule<V, R, Z>(
    domain: &[(f64, f64)],
    rule: R,
    vanishes: Z,
    split_hint: Option<&(dyn Fn(&[f64], &[f64]) -> usize + Sync)>,
    cfg: &QuadratureConfig,
) -> Result<QuadOutcome<V>, Error>
where
    V: QuadValue,
    R: Fn(&[(f64, f64)]) -> V + Sync,
    Z: Fn(&[f64], &[f64]) -> bool + Sync,
{
    let n = domain.len();
    if n == 0 {
        return Err(Error::Domain("cannot integrate over a 0-dimensional box".into()));
    }
    if domain.iter().any(|(lo, hi)| !lo.is_finite() || !hi.is_finite()) {
        return Err(Error::Domain("integration box must have finite bounds".into()));
    }
    if !(cfg.tolerance > 0.0) {
        return Err(Error::Domain("quadrature tolerance must be positive".into()));
    }
    if domain.iter().any(|(lo, hi)| hi <= lo) {
        return Ok(QuadOutcome {
            value: V::zero(),
            error: 0.0,
            rule_applications: 0,
        });
    }

    let root_width: Vec<f64> = domain.iter().map(|(lo, hi)| hi - lo).collect();
    let chunks = fixed_chunks(domain);
    let base = cfg.budget / CHUNKS;
    let extra = cfg.budget % CHUNKS;
    let worker = |(i, chunk): (usize, &Box_)| {
        let chunk_budget = base + usize::from(i < extra);
        let chunk_tol = cfg.tolerance / CHUNKS as f64;
        refine_chunk(
            chunk,
            &rule,
            &vanishes,
            split_hint,
            &root_width,
            chunk_tol,
            chunk_budget,
        )
    };

    let outcomes: Vec<ChunkOutcome<V>> = if cfg.threads > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build()
            .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
        pool.install(|| {
            use rayon::prelude::*;
            chunks.par_iter().enumerate().map(worker).collect()
        })
    } else {
        chunks.iter().enumerate().map(worker).collect()
    };

    let mut value = V::zero();
    let mut error = 0.0;
    let mut rule_applications = 0;
    let mut starved = false;
    for out in outcomes {
        value = value.add(out.value);
        error += out.error;
        rule_applications += out.rule_applications;
        starved |= out.starved;
    }
    if error > cfg.tolerance {
        let how = if starved { "budget exhausted" } else { "refinement stalled" };
        return Err(Error::Budget(format!(
            "{how} after {rule_applications} rule applications; achieved error {error:.3e} \
             exceeds tolerance {:.3e}",
            cfg.tolerance
        )));
    }
    Ok(QuadOutcome {
        value,
        error,
        rule_applications,
    })
}

type Box_ = Vec<(f64, f64)>;

/// Cuts the root box into exactly [`CHUNKS`] sub-boxes by repeatedly
/// bisecting the largest-volume chunk along its widest axis. The cuts depend
/// only on the box, so the decomposition is a fixed function of the input.
fn fixed_chunks(domain: &[(f64, f64)]) -> Vec<Box_> {
    let mut chunks: Vec<Box_> = vec![domain.to_vec()];
    while chunks.len() < CHUNKS {
        let mut pick = 0;
        let mut best = f64::NEG_INFINITY;
        for (i, c) in chunks.iter().enumerate() {
            let vol: f64 = c.iter().map(|(lo, hi)| hi - lo).product();
            if vol > best {
                best = vol;
                pick = i;
            }
        }
        let chunk = chunks.remove(pick);
        let axis = widest_axis(&chunk);
        let (lo, hi) = chunk[axis];
        let mid = 0.5 * (lo + hi);
        let mut left = chunk.clone();
        let mut right = chunk;
        left[axis].1 = mid;
        right[axis].0 = mid;
        chunks.push(left);
        chunks.push(right);
    }
    chunks
}

fn widest_axis(bx: &[(f64, f64)]) -> usize {
    let mut pick = 0;
    let mut best = f64::NEG_INFINITY;
    for (k, (lo, hi)) in bx.iter().enumerate() {
        let w = hi - lo;
        if w > best {
            best = w;
            pick = k;
        }
    }
    pick
}

struct ChunkOutcome<V> {
    value: V,
    error: f64,
    rule_applications: usize,
    /// True when the loop stopped because the budget ran out.
    starved: bool,
}

/// A heap entry: a leaf cell whose bisection has already been evaluated, so
/// its error and its children's values are known. The children carry their
/// own boxes, which is all later refinement needs.
struct Entry<V> {
    value: V,
    children: Option<(Box_, V, Box_, V, usize)>,
    err: f64,
    seq: u64,
}

struct Key {
    err: f64,
    seq: u64,
}

impl PartialEq for Key {
    fn eq(&self, other: &Self) -> bool {
        self.err.to_bits() == other.err.to_bits() && self.seq == other.seq
    }
}
impl Eq for Key {}
impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err
            .total_cmp(&other.err)
            .then_with(|| self.seq.cmp(&other.seq))
    }
}

struct HeapCell<V>(Key, Entry<V>);

impl<V> PartialEq for HeapCell<V> {
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}
impl<V> Eq for HeapCell<V> {}
impl<V> PartialOrd for HeapCell<V> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.0.cmp(&other.0))
    }
}
impl<V> Ord for HeapCell<V> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.cmp(&other.0)
    }
}

fn refine_chunk<V, R, Z>(
    chunk: &Box_,
    rule: &R,
    vanishes: &Z,
    split_hint: Option<&(dyn Fn(&[f64], &[f64]) -> usize + Sync)>,
    root_width: &[f64],
    tol: f64,
    budget: usize,
) -> ChunkOutcome<V>
where
    V: QuadValue,
    R: Fn(&[(f64, f64)]) -> V + Sync,
    Z: Fn(&[f64], &[f64]) -> bool + Sync,
{
    let mut apps = 0usize;
    let mut seq = 0u64;
    let mut heap: BinaryHeap<HeapCell<V>> = BinaryHeap::new();
    let mut value = V::zero();
    let mut heap_err = 0.0f64;
    let mut frozen_err = 0.0f64;
    let mut starved = false;

    // Cells still owed mandatory splits: a one-shot error estimate on a
    // coarse cell can cancel accidentally, so every cell is subdivided
    // MIN_DEPTH times before its estimate is allowed to stop refinement.
    let mut pending: Vec<(Box_, Option<V>, usize)> = Vec::new();

    let admit = |bx: Box_,
                     known: Option<V>,
                     forced: usize,
                     pending: &mut Vec<(Box_, Option<V>, usize)>,
                     apps: &mut usize,
                     seq: &mut u64,
                     heap: &mut BinaryHeap<HeapCell<V>>,
                     value: &mut V,
                     heap_err: &mut f64,
                     frozen_err: &mut f64| {
        let (lo, hi) = bounds(&bx);
        if vanishes(&lo, &hi) {
            return;
        }
        if forced > 0 {
            if let Some(axis) = pick_axis(&bx, root_width, split_hint) {
                let (lbx, rbx) = bisect(&bx, axis);
                pending.push((lbx, None, forced - 1));
                pending.push((rbx, None, forced - 1));
                return;
            }
        }
        let v = known.unwrap_or_else(|| {
            *apps += 1;
            rule(&bx)
        });
        *value = value.add(v);

        // Look ahead with one bisection in EVERY splittable axis. The error
        // charged to the cell is the sum of the per-axis differences: a
        // single-axis difference only sees the error component along that
        // axis and goes blind to the others, which on near-separable
        // integrands silently accepts cells that are still wrong.
        let mut total_diff = 0.0f64;
        let mut best: Option<(f64, usize, Box_, V, Box_, V)> = None;
        let hinted = split_hint.map(|hint| hint(&lo, &hi).min(bx.len() - 1));
        for axis in 0..bx.len() {
            if !axis_splittable(&bx, root_width, axis) {
                continue;
            }
            let (lbx, rbx) = bisect(&bx, axis);
            let (llo, lhi) = bounds(&lbx);
            let (rlo, rhi) = bounds(&rbx);
            let lv = if vanishes(&llo, &lhi) {
                V::zero()
            } else {
                *apps += 1;
                rule(&lbx)
            };
            let rv = if vanishes(&rlo, &rhi) {
                V::zero()
            } else {
                *apps += 1;
                rule(&rbx)
            };
            let diff = v.sub(lv.add(rv)).norm();
            total_diff += diff;
            let preferred = hinted == Some(axis);
            let better = match &best {
                None => true,
                Some((best_diff, best_axis, ..)) => {
                    let best_preferred = hinted == Some(*best_axis);
                    (preferred, diff) > (best_preferred, *best_diff)
                }
            };
            if better {
                best = Some((diff, axis, lbx, lv, rbx, rv));
            }
        }
        match best {
            None => {
                let e = cheap_roughness(v, &bx);
                *frozen_err += e;
            }
            Some((_, axis, lbx, lv, rbx, rv)) => {
                let err = total_diff;
                *heap_err += err;
                *seq += 1;
                heap.push(HeapCell(
                    Key { err, seq: *seq },
                    Entry {
                        value: v,
                        children: Some((lbx, lv, rbx, rv, axis)),
                        err,
                        seq: *seq,
                    },
                ));
            }
        }
    };

    pending.push((chunk.clone(), None, MIN_DEPTH));
    while let Some((bx, known, forced)) = pending.pop() {
        admit(
            bx,
            known,
            forced,
            &mut pending,
            &mut apps,
            &mut seq,
            &mut heap,
            &mut value,
            &mut heap_err,
            &mut frozen_err,
        );
    }

    // Reserve enough budget for one pop: two child admissions, each paying
    // for a lookahead pair in every axis.
    let pop_cost = 4 * chunk.len();
    while heap_err + frozen_err > tol {
        if apps + pop_cost > budget {
            starved = !heap.is_empty();
            break;
        }
        let top = match heap.pop() {
            Some(t) => t,
            None => break,
        };
        let entry = top.1;
        if entry.err == 0.0 {
            heap.push(HeapCell(
                Key {
                    err: entry.err,
                    seq: entry.seq,
                },
                entry,
            ));
            break;
        }
        let (lbx, lv, rbx, rv, _) = entry.children.expect("heap entries carry children");
        value = value.sub(entry.value);
        heap_err -= entry.err;
        admit(
            lbx,
            Some(lv),
            0,
            &mut pending,
            &mut apps,
            &mut seq,
            &mut heap,
            &mut value,
            &mut heap_err,
            &mut frozen_err,
        );
        admit(
            rbx,
            Some(rv),
            0,
            &mut pending,
            &mut apps,
            &mut seq,
            &mut heap,
            &mut value,
            &mut heap_err,
            &mut frozen_err,
        );
    }

    ChunkOutcome {
        value,
        error: heap_err + frozen_err,
        rule_applications: apps,
        starved,
    }
}

fn bounds(bx: &Box_) -> (Vec<f64>, Vec<f64>) {
    let lo: Vec<f64> = bx.iter().map(|&(a, _)| a).collect();
    let hi: Vec<f64> = bx.iter().map(|&(_, b)| b).collect();
    (lo, hi)
}

/// True when the axis is still wide enough to split and the midpoint is
/// representable strictly between the endpoints.
fn axis_splittable(bx: &Box_, root_width: &[f64], k: usize) -> bool {
    let w = bx[k].1 - bx[k].0;
    let mid = 0.5 * (bx[k].0 + bx[k].1);
    w > FROZEN_WIDTH * root_width[k] && mid > bx[k].0 && mid < bx[k].1
}

/// Chooses the bisection axis among the axes that are still wide enough to
/// split; `None` freezes the cell.
fn pick_axis(
    bx: &Box_,
    root_width: &[f64],
    split_hint: Option<&(dyn Fn(&[f64], &[f64]) -> usize + Sync)>,
) -> Option<usize> {
    if let Some(hint) = split_hint {
        let (lo, hi) = bounds(bx);
        let k = hint(&lo, &hi).min(bx.len() - 1);
        if axis_splittable(bx, root_width, k) {
            return Some(k);
        }
    }
    let mut pick = None;
    let mut best = f64::NEG_INFINITY;
    for k in 0..bx.len() {
        if !axis_splittable(bx, root_width, k) {
            continue;
        }
        let rel = (bx[k].1 - bx[k].0) / root_width[k];
        if rel > best {
            best = rel;
            pick = Some(k);
        }
    }
    pick
}

/// Residual error charged to a frozen cell. There is no refinement left to
/// compare against, so the rule value itself, which shrinks with the cell
/// volume, is used as a conservative bound.
fn cheap_roughness<V: QuadValue>(v: V, _bx: &Box_) -> f64 {
    v.norm()
}

fn bisect(bx: &Box_, axis: usize) -> (Box_, Box_) {
    let (lo, hi) = bx[axis];
    let mid = 0.5 * (lo + hi);
    let mut left = bx.clone();
    let mut right = bx.clone();
    left[axis].1 = mid;
    right[axis].0 = mid;
    (left, right)
}

/// One application of the tensor 4-point Gauss rule on a box.
pub(crate) fn tensor_rule<V, F>(bx: &[(f64, f64)], f: &F) -> V
where
    V: QuadValue,
    F: Fn(&[f64]) -> V,
{
    let n = bx.len();
    let mut point = vec![0.0f64; n];
    let mut idx = vec![0usize; n];
    let half: Vec<f64> = bx.iter().map(|&(lo, hi)| 0.5 * (hi - lo)).collect();
    let mid: Vec<f64> = bx.iter().map(|&(lo, hi)| 0.5 * (lo + hi)).collect();
    let mut acc = V::zero();
    loop {
        let mut w = 1.0f64;
        for k in 0..n {
            point[k] = mid[k] + half[k] * GAUSS_X[idx[k]];
            w *= half[k] * GAUSS_W[idx[k]];
        }
        acc = acc.add(f(&point).scale(w));
        let mut k = 0;
        loop {
            if k == n {
                return acc;
            }
            idx[k] += 1;
            if idx[k] < 4 {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn loose() -> QuadratureConfig {
        QuadratureConfig {
            tolerance: 1e-9,
            budget: 100_000,
            threads: 1,
        }
    }

    #[test]
    fn the_tensor_rule_is_exact_through_degree_seven() {
        let bx = vec![(0.0, 1.0), (0.0, 1.0)];
        let v: f64 = tensor_rule(&bx, &|x: &[f64]| x[0].powi(7) * x[1].powi(3) + x[0] * x[1]);
        assert!((v - (1.0 / 32.0 + 0.25)).abs() < 1e-15);
        let v8: f64 = tensor_rule(&vec![(0.0, 1.0)], &|x: &[f64]| x[0].powi(8));
        assert!((v8 - 1.0 / 9.0).abs() > 1e-9, "degree 8 should not be exact");
    }

    #[test]
    fn smooth_integrands_converge_to_reference_values() {
        let out = integrate(&[(0.0, 1.0)], |x: &[f64]| x[0].exp(), &loose()).unwrap();
        assert!((out.value - (1.0f64.exp() - 1.0)).abs() < 1e-9);
        assert!(out.error <= 1e-9);

        let out2 = integrate(
            &[(0.0, 1.0), (0.0, 2.0)],
            |x: &[f64]| (x[0] + x[1]).sin(),
            &loose(),
        )
        .unwrap();
        let exact = 2.0f64.sin() - 3.0f64.sin() + 1.0f64.sin();
        assert!((out2.value - exact).abs() < 1e-8);
    }

    #[test]
    fn an_algebraic_endpoint_singularity_is_refined_down() {
        let out = integrate(&[(0.0, 1.0)], |x: &[f64]| x[0].sqrt(), &loose()).unwrap();
        assert!((out.value - 2.0 / 3.0).abs() < 1e-8);
    }

    #[test]
    fn complex_values_integrate_componentwise() {
        let out = integrate(
            &[(0.0, 1.0)],
            |x: &[f64]| Complex64::new(0.0, x[0]).exp(),
            &loose(),
        )
        .unwrap();
        assert!((out.value.re - 1.0f64.sin()).abs() < 1e-10);
        assert!((out.value.im - (1.0 - 1.0f64.cos())).abs() < 1e-10);
    }

    #[test]
    fn pairs_integrate_both_components_at_once() {
        let out = integrate(&[(0.0, 1.0)], |x: &[f64]| [x[0], x[0] * x[0]], &loose()).unwrap();
        assert!((out.value[0] - 0.5).abs() < 1e-12);
        assert!((out.value[1] - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn the_vanishing_certificate_prunes_cells_without_changing_the_value() {
        let hat = |x: &[f64]| {
            if x[0].abs() < 1.0 {
                1.0 - x[0].abs()
            } else {
                0.0
            }
        };
        let plain = integrate(&[(-4.0, 4.0)], hat, &loose()).unwrap();
        let pruned = integrate_with(
            &[(-4.0, 4.0)],
            hat,
            |lo: &[f64], hi: &[f64]| lo[0] >= 1.0 || hi[0] <= -1.0,
            None,
            &loose(),
        )
        .unwrap();
        assert!((plain.value - 1.0).abs() < 1e-8);
        assert!((pruned.value - 1.0).abs() < 1e-8);
        assert!(pruned.rule_applications < plain.rule_applications);
    }

    #[test]
    fn an_exhausted_budget_reports_the_achieved_accuracy() {
        let cfg = QuadratureConfig {
            tolerance: 1e-14,
            budget: 40,
            threads: 1,
        };
        let err = integrate(&[(0.0, 1.0)], |x: &[f64]| x[0].sqrt(), &cfg).unwrap_err();
        match err {
            Error::Budget(msg) => {
                assert!(msg.contains("achieved error"), "message was {msg}");
            }
            other => panic!("expected a budget error, got {other}"),
        }
    }

    #[test]
    fn results_are_bit_identical_across_runs_and_thread_counts() {
        let f = |x: &[f64]| (x[0] * x[1]).cos() + x[0].sqrt();
        let domain = [(0.0, 1.5), (0.0, 1.0)];
        let a = integrate(&domain, f, &loose()).unwrap();
        let b = integrate(&domain, f, &loose()).unwrap();
        let mut threaded_cfg = loose();
        threaded_cfg.threads = 4;
        let c = integrate(&domain, f, &threaded_cfg).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.value.to_bits(), c.value.to_bits());
        assert_eq!(a.rule_applications, c.rule_applications);
    }

    #[test]
    fn degenerate_and_invalid_boxes_are_handled() {
        let zero = integrate(&[(1.0, 1.0)], |_: &[f64]| 1.0, &loose()).unwrap();
        assert_eq!(zero.value, 0.0);
        assert!(integrate(&[], |_: &[f64]| 1.0, &loose()).is_err());
        assert!(integrate(&[(0.0, f64::INFINITY)], |_: &[f64]| 1.0, &loose()).is_err());
    }
}
