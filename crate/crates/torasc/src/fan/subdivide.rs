//! Triangulation of polyhedral cones and stellar resolution of simplicial
//! fans to unimodular ones.

use std::collections::BTreeSet;

use num_traits::Signed;

use crate::geometry::{cone_coordinates, LatticeVector};
use crate::rat::{self, WideRat};
use crate::Error;

fn dot(a: &[i64], b: &[i64]) -> i128 {
    a.iter().zip(b).map(|(&x, &y)| x as i128 * y as i128).sum()
}

fn gcd_all(v: &[i64]) -> i64 {
    v.iter().fold(0i64, |g, &x| num_integer::gcd(g, x.abs()))
}

fn subsets_of_size(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for i in start..n {
            current.push(i);
            rec(i + 1, n, k, current, out);
            current.pop();
        }
    }
    rec(0, n, k, &mut current, &mut out);
    out
}

/// Facets of `cone(rays)` within its linear span. Each entry pairs a
/// primitive inward normal (lying in the span) with the sorted indices of the
/// rays on that facet. Works in any dimension; the cone need not be
/// full-dimensional or simplicial.
pub(crate) fn cone_facets(rays: &[LatticeVector]) -> Vec<(LatticeVector, Vec<usize>)> {
    let n = rays[0].len();
    let d = rat::rank_int(rays);
    let mut basis: Vec<usize> = Vec::new();
    for i in 0..rays.len() {
        let mut probe: Vec<LatticeVector> = basis.iter().map(|&b| rays[b].clone()).collect();
        probe.push(rays[i].clone());
        if rat::rank_int(&probe) > basis.len() {
            basis.push(i);
        }
    }
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut out: Vec<(LatticeVector, Vec<usize>)> = Vec::new();
    for subset in subsets_of_size(rays.len(), d - 1) {
        let picked: Vec<LatticeVector> = subset.iter().map(|&i| rays[i].clone()).collect();
        if rat::rank_int(&picked) + 1 != d {
            continue;
        }
        // A normal h = sum_j c_j rays[basis_j] in the span, orthogonal to the
        // picked rays: the c solve a (d-1) x d homogeneous system.
        let rows: Vec<Vec<WideRat>> = subset
            .iter()
            .map(|&s| {
                basis
                    .iter()
                    .map(|&b| WideRat::from_integer(dot(&rays[b], &rays[s])))
                    .collect()
            })
            .collect();
        let Some(c) = rat::kernel_vector(&rows, d) else {
            continue;
        };
        let denom_lcm = c
            .iter()
            .fold(1i128, |acc, r| num_integer::lcm(acc, *r.denom()));
        let mut h = vec![0i64; n];
        for (j, &b) in basis.iter().enumerate() {
            let scale = c[j] * WideRat::from_integer(denom_lcm);
            debug_assert!(scale.is_integer());
            let scale = i64::try_from(scale.to_integer()).expect("facet normal exceeds i64");
            for k in 0..n {
                h[k] += scale * rays[b][k];
            }
        }
        let g = gcd_all(&h);
        if g > 1 {
            for x in h.iter_mut() {
                *x /= g;
            }
        }
        let vals: Vec<i128> = rays.iter().map(|r| dot(&h, r)).collect();
        let pos = vals.iter().any(|&v| v > 0);
        let neg = vals.iter().any(|&v| v < 0);
        if pos && neg {
            continue;
        }
        if neg {
            for x in h.iter_mut() {
                *x = -*x;
            }
        }
        let facet: Vec<usize> = vals
            .iter()
            .enumerate()
            .filter(|&(_, &v)| v == 0)
            .map(|(i, _)| i)
            .collect();
        if seen.insert(facet.clone()) {
            out.push((h, facet));
        }
    }
    out.sort();
    out
}

/// Pulling triangulation of `cone(rays)` without new rays: recursively cone
/// the lex-smallest ray over the triangulated facets that do not contain it.
/// Pulling at the intrinsically smallest ray makes the simplices of adjacent
/// cones agree on shared faces.
pub(crate) fn triangulate(rays: &[LatticeVector]) -> Vec<Vec<LatticeVector>> {
    let d = rat::rank_int(rays);
    if rays.len() == d {
        let mut s = rays.to_vec();
        s.sort();
        return vec![s];
    }
    let v = rays.iter().min().expect("empty ray set").clone();
    let mut out: BTreeSet<Vec<LatticeVector>> = BTreeSet::new();
    for (_, facet) in cone_facets(rays) {
        let facet_rays: Vec<LatticeVector> = facet.iter().map(|&i| rays[i].clone()).collect();
        if facet_rays.contains(&v) {
            continue;
        }
        for mut simplex in triangulate(&facet_rays) {
            simplex.push(v.clone());
            simplex.sort();
            out.insert(simplex);
        }
    }
    out.into_iter().collect()
}

/// The nonzero lattice point of the half-open fundamental parallelepiped
/// `{sum lambda_i g_i : 0 <= lambda_i < 1}` that minimizes (coordinate sum,
/// lex order). Exists whenever `|det| > 1`; the minimizer is automatically
/// primitive, since an imprimitive point dominates its primitive multiple
/// coordinatewise.
pub(crate) fn parallelepiped_point(skeleton: &[LatticeVector]) -> Result<LatticeVector, Error> {
    let n = skeleton.len();
    let a: Vec<Vec<i64>> = (0..n)
        .map(|row| (0..n).map(|col| skeleton[col][row]).collect())
        .collect();
    let det = rat::det_int(&a);
    if det == 0 {
        return Err(Error::Internal(
            "parallelepiped of a singular skeleton".into(),
        ));
    }
    // Integer adjugate: adj * x = det * lambda, so the membership test
    // 0 <= lambda_i < 1 becomes a pure integer range check per coordinate.
    let mut adj: Vec<Vec<i128>> = vec![vec![0; n]; n];
    for j in 0..n {
        let mut e = vec![0i64; n];
        e[j] = 1;
        let col = rat::solve_int(&a, &e).expect("nonsingular by the determinant check");
        for (i, v) in col.iter().enumerate() {
            let scaled = *v * WideRat::from_integer(det);
            debug_assert!(scaled.is_integer());
            adj[i][j] = scaled.to_integer();
        }
    }
    let caps: Vec<i64> = (0..n)
        .map(|k| skeleton.iter().map(|g| g[k]).sum::<i64>() - 1)
        .collect();
    let total_cap: i64 = caps.iter().sum();
    // Enumerate points by increasing coordinate sum, lex ascending within a
    // sum, and return the first that lies in the parallelepiped.
    let mut x = vec![0i64; n];
    for target in 1..=total_cap {
        if let Some(found) = search_sum(&mut x, 0, target, &caps, &adj, det) {
            let g = gcd_all(&found);
            debug_assert_eq!(g, 1, "minimal parallelepiped point must be primitive");
            return Ok(found);
        }
    }
    Err(Error::Internal(
        "unimodular parallelepiped offered for subdivision".into(),
    ))
}

fn search_sum(
    x: &mut Vec<i64>,
    pos: usize,
    remaining: i64,
    caps: &[i64],
    adj: &[Vec<i128>],
    det: i128,
) -> Option<Vec<i64>> {
    let n = caps.len();
    if pos == n {
        if remaining != 0 {
            return None;
        }
        let inside = (0..n).all(|i| {
            let t: i128 = (0..n).map(|j| adj[i][j] * x[j] as i128).sum();
            if det > 0 {
                0 <= t && t < det
            } else {
                det < t && t <= 0
            }
        });
        return inside.then(|| x.clone());
    }
    let tail_cap: i64 = caps[pos + 1..].iter().sum();
    let lo = (remaining - tail_cap).max(0);
    let hi = remaining.min(caps[pos]);
    for v in lo..=hi {
        x[pos] = v;
        if let Some(found) = search_sum(x, pos + 1, remaining - v, caps, adj, det) {
            return Some(found);
        }
        x[pos] = 0;
    }
    None
}

/// One stellar subdivision of a set of full-dimensional simplicial cones at
/// the ray `w`: every cone containing `w` is replaced by the cones spanned by
/// `w` and its facets not containing `w`. Cones not containing `w` survive
/// unchanged, so the collection stays a fan.
pub(crate) fn star_subdivide(
    cones: &BTreeSet<Vec<LatticeVector>>,
    w: &[i64],
) -> BTreeSet<Vec<LatticeVector>> {
    let mut next = BTreeSet::new();
    for cone in cones {
        let lambda = cone_coordinates(cone, w).expect("fan cones are simplicial");
        if lambda.iter().any(|c| c.is_negative()) {
            next.insert(cone.clone());
            continue;
        }
        for (i, coeff) in lambda.iter().enumerate() {
            if coeff.is_positive() {
                let mut split = cone.clone();
                split[i] = w.to_vec();
                split.sort();
                next.insert(split);
            }
        }
    }
    next
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rays(v: &[&[i64]]) -> Vec<LatticeVector> {
        v.iter().map(|r| r.to_vec()).collect()
    }

    #[test]
    fn facets_of_a_planar_cone() {
        let r = rays(&[&[1, 0], &[1, 2], &[1, 1]]);
        let facets = cone_facets(&r);
        assert_eq!(facets.len(), 2);
        assert_eq!(facets[0], (vec![0, 1], vec![0]));
        assert_eq!(facets[1], (vec![2, -1], vec![1]));
    }

    #[test]
    fn facets_of_a_square_based_cone() {
        let r = rays(&[&[1, 0, 1], &[0, 1, 1], &[1, 1, 1], &[0, 0, 1]]);
        let facets = cone_facets(&r);
        assert_eq!(facets.len(), 4);
        for (_, f) in &facets {
            assert_eq!(f.len(), 2);
        }
    }

    #[test]
    fn triangulation_splits_the_square_cone_at_its_lex_smallest_ray() {
        let r = rays(&[&[1, 0, 1], &[0, 1, 1], &[1, 1, 1], &[0, 0, 1]]);
        let tri = triangulate(&r);
        assert_eq!(
            tri,
            vec![
                rays(&[&[0, 0, 1], &[0, 1, 1], &[1, 1, 1]]),
                rays(&[&[0, 0, 1], &[1, 0, 1], &[1, 1, 1]]),
            ]
        );
    }

    #[test]
    fn parallelepiped_point_of_the_half_quadrant() {
        let w = parallelepiped_point(&rays(&[&[1, 0], &[1, 2]])).unwrap();
        assert_eq!(w, vec![1, 1]);
    }

    #[test]
    fn parallelepiped_point_prefers_small_coordinate_sums() {
        let w = parallelepiped_point(&rays(&[&[1, 0], &[1, 5]])).unwrap();
        assert_eq!(w, vec![1, 1]);
    }
}
