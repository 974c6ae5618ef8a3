//! Double-description enumeration of the extreme rays of a pointed cone
//! `{y : <h_i, y> >= 0}` over exact integers.
//!
//! The implementation is the textbook incremental algorithm: start from a
//! simplicial subcone spanned by `dim` linearly independent constraints,
//! insert the remaining halfspaces one at a time, and combine adjacent
//! positive/negative ray pairs. Adjacency uses the combinatorial zero-set
//! test, which is exact for pointed cones. All ray arithmetic is in i128 with
//! gcd normalization, so desk-scale inputs never overflow.

use num_integer::Integer;

/// Reduces a ray to its primitive integer representative.
fn normalize(ray: &mut [i128]) {
    let mut g: i128 = 0;
    for &x in ray.iter() {
        g = g.gcd(&x);
    }
    if g > 1 {
        for x in ray.iter_mut() {
            *x /= g;
        }
    }
}

fn dot(a: &[i128], b: &[i128]) -> i128 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Greedily selects `dim` linearly independent constraint rows, preferring
/// earlier rows (callers order the seed constraints first).
fn independent_subset(constraints: &[Vec<i128>], dim: usize) -> Option<Vec<usize>> {
    let mut chosen: Vec<usize> = Vec::new();
    let mut basis: Vec<Vec<crate::rat::WideRat>> = Vec::new();
    for (idx, row) in constraints.iter().enumerate() {
        let mut candidate: Vec<Vec<crate::rat::WideRat>> = basis.clone();
        candidate.push(row.iter().map(|&x| crate::rat::WideRat::from_integer(x)).collect());
        if crate::rat::rank(&candidate) == candidate.len() {
            basis = candidate;
            chosen.push(idx);
            if chosen.len() == dim {
                return Some(chosen);
            }
        }
    }
    None
}

/// Extreme rays of the simplicial cone cut out by `dim` independent rows:
/// the columns of the inverse matrix, scaled to primitive integer vectors.
fn simplicial_rays(constraints: &[Vec<i128>], chosen: &[usize], dim: usize) -> Vec<Vec<i128>> {
    let a: Vec<Vec<crate::rat::WideRat>> = chosen
        .iter()
        .map(|&i| {
            constraints[i]
                .iter()
                .map(|&x| crate::rat::WideRat::from_integer(x))
                .collect()
        })
        .collect();
    let mut rays = Vec::with_capacity(dim);
    for j in 0..dim {
        let e: Vec<crate::rat::WideRat> = (0..dim)
            .map(|i| crate::rat::WideRat::from_integer(i128::from(i == j)))
            .collect();
        let col = crate::rat::solve(&a, &e).expect("chosen rows are independent");
        let lcm = col
            .iter()
            .fold(1i128, |acc, r| acc.lcm(r.denom()));
        let mut ray: Vec<i128> = col.iter().map(|r| r.numer() * (lcm / r.denom())).collect();
        normalize(&mut ray);
        rays.push(ray);
    }
    rays
}

/// Computes the extreme rays of `{y in R^dim : <h, y> >= 0 for all h}`.
///
/// Requires the constraints to have full rank `dim` (equivalently, the cone
/// is pointed); panics otherwise, since every caller in this crate
/// constructs pointed systems by design. Output rays are primitive,
/// deduplicated, and sorted lexicographically.
pub fn extreme_rays(dim: usize, constraints: &[Vec<i64>]) -> Vec<Vec<i64>> {
    assert!(dim >= 1, "dimension must be positive");
    let cons: Vec<Vec<i128>> = constraints
        .iter()
        .map(|row| {
            assert_eq!(row.len(), dim, "constraint arity mismatch");
            row.iter().map(|&x| x as i128).collect()
        })
        .collect();
    let chosen = independent_subset(&cons, dim)
        .expect("constraint matrix must have full rank (pointed cone)");
    let mut rays = simplicial_rays(&cons, &chosen, dim);
    let mut inserted: Vec<usize> = chosen.clone();

    for idx in 0..cons.len() {
        if inserted.contains(&idx) {
            continue;
        }
        let h = &cons[idx];
        let signs: Vec<i128> = rays.iter().map(|r| dot(h, r)).collect();
        if signs.iter().all(|&s| s >= 0) {
            inserted.push(idx);
            continue;
        }
        let tight_sets: Vec<Vec<usize>> = rays
            .iter()
            .map(|r| {
                inserted
                    .iter()
                    .copied()
                    .filter(|&c| dot(&cons[c], r) == 0)
                    .collect()
            })
            .collect();
        let adjacent = |p: usize, q: usize| -> bool {
            let common: Vec<usize> = tight_sets[p]
                .iter()
                .copied()
                .filter(|c| tight_sets[q].contains(c))
                .collect();
            rays.iter().enumerate().all(|(k, _)| {
                k == p || k == q || !common.iter().all(|&c| dot(&cons[c], &rays[k]) == 0)
            })
        };
        let mut next: Vec<Vec<i128>> = Vec::new();
        for (k, r) in rays.iter().enumerate() {
            if signs[k] >= 0 {
                next.push(r.clone());
            }
        }
        for p in 0..rays.len() {
            if signs[p] <= 0 {
                continue;
            }
            for q in 0..rays.len() {
                if signs[q] >= 0 || !adjacent(p, q) {
                    continue;
                }
                let mut w: Vec<i128> = (0..dim)
                    .map(|c| signs[p] * rays[q][c] - signs[q] * rays[p][c])
                    .collect();
                normalize(&mut w);
                if !next.contains(&w) {
                    next.push(w);
                }
            }
        }
        rays = next;
        inserted.push(idx);
    }

    let mut out: Vec<Vec<i64>> = rays
        .into_iter()
        .map(|r| {
            r.into_iter()
                .map(|x| i64::try_from(x).expect("ray coordinate exceeds i64"))
                .collect()
        })
        .collect();
    out.sort();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthant_from_its_own_facets() {
        let rays = extreme_rays(3, &[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        assert_eq!(rays, vec![vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]]);
    }

    #[test]
    fn redundant_halfspace_is_ignored() {
        let rays = extreme_rays(2, &[vec![1, 0], vec![0, 1], vec![1, 1]]);
        assert_eq!(rays, vec![vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn wedge_cone() {
        let rays = extreme_rays(2, &[vec![1, 0], vec![-1, 2]]);
        assert_eq!(rays, vec![vec![0, 1], vec![2, 1]]);
    }
}
