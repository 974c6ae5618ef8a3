//! Normal fans of Newton polyhedra, unimodular subdivision, and the
//! annotations that drive the asymptotic analysis.
//!
//! The normal fan of a Newton polyhedron has support equal to the closed
//! positive orthant, with one maximal cone per vertex, spanned by the normals
//! of the facets through that vertex. [`unimodular_subdivision`] refines it
//! into simplicial cones of determinant one, which is what the toric chart
//! construction consumes. [`annotate_cones`] computes, per maximal cone, the
//! data that locates the dominant charts: the values `l(a)` of the rays, the
//! index sets `B` and `A`, and whether the cone is dominant.

mod subdivide;

use std::collections::BTreeSet;
use std::fmt;

use crate::geometry::{self, Face, LatticePolyhedron, LatticeVector, ValidPair};
use crate::rat::{self, rat_string, Rat};
use crate::Error;

pub(crate) use subdivide::cone_facets;

/// A rational polyhedral cone, stored by its generating rays (primitive,
/// sorted lexicographically). Rays of cones in this crate always lie in the
/// closed positive orthant.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Cone {
    pub skeleton: Vec<LatticeVector>,
}

impl Cone {
    pub fn new(mut skeleton: Vec<LatticeVector>) -> Cone {
        skeleton.sort();
        skeleton.dedup();
        Cone { skeleton }
    }

    /// Dimension of the linear span of the skeleton.
    pub fn dim(&self) -> usize {
        rat::rank_int(&self.skeleton)
    }

    pub fn is_simplicial(&self) -> bool {
        self.skeleton.len() == self.dim()
    }

    /// `|det|` of the skeleton matrix; `None` unless the cone is simplicial
    /// and full-dimensional. A value of one means the rays are a lattice
    /// basis.
    pub fn det_abs(&self) -> Option<i128> {
        let n = self.skeleton.first().map_or(0, Vec::len);
        if self.skeleton.len() != n {
            return None;
        }
        Some(rat::det_int(&self.skeleton).abs())
    }

    /// Exact membership test. Simplicial full-dimensional cones are tested by
    /// solving for the barycentric coefficients; general cones fall back to
    /// their facet description within the span.
    pub fn contains(&self, x: &[i64]) -> bool {
        let n = x.len();
        if self.skeleton.len() == n && self.dim() == n {
            return geometry::in_simplicial_cone(&self.skeleton, x);
        }
        let mut with_x: Vec<LatticeVector> = self.skeleton.clone();
        with_x.push(x.to_vec());
        if rat::rank_int(&with_x) != self.dim() {
            return false;
        }
        cone_facets(&self.skeleton)
            .iter()
            .all(|(h, _)| h.iter().zip(x).map(|(&a, &b)| a as i128 * b as i128).sum::<i128>() >= 0)
    }
}

impl fmt::Display for Cone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cone{{")?;
        for (i, ray) in self.skeleton.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "({})", join_i64(ray))?;
        }
        write!(f, "}}")
    }
}

fn join_i64(v: &[i64]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// A fan in the positive orthant, stored by its maximal cones (sorted by
/// skeleton); lower-dimensional cones are their faces. For the fans built
/// here the union of the maximal cones is the whole closed positive orthant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fan {
    pub n: usize,
    pub maximal: Vec<Cone>,
}

impl Fan {
    /// The rays of the fan: every skeleton vector of every maximal cone,
    /// deduplicated and sorted.
    pub fn rays(&self) -> Vec<LatticeVector> {
        let set: BTreeSet<LatticeVector> = self
            .maximal
            .iter()
            .flat_map(|c| c.skeleton.iter().cloned())
            .collect();
        set.into_iter().collect()
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        self.maximal.iter().any(|c| c.contains(x))
    }

    pub fn is_unimodular(&self) -> bool {
        self.maximal.iter().all(|c| c.det_abs() == Some(1))
    }
}

/// The normal fan of a Newton polyhedron: one maximal cone per vertex,
/// spanned by the normals of the facets active there. Errors on the empty
/// polyhedron, whose normal fan is undefined.
pub fn normal_fan(p: &LatticePolyhedron) -> Result<Fan, Error> {
    p.require_nonempty("normal fan")?;
    let n = p.dim_ambient;
    let mut maximal: Vec<Cone> = Vec::new();
    for v in &p.vertices {
        let active: Vec<LatticeVector> = p
            .facets
            .iter()
            .filter(|pair| pair.eval(v) == pair.l)
            .map(|pair| pair.a.clone())
            .collect();
        maximal.push(Cone::new(active));
    }
    maximal.sort();
    maximal.dedup();
    debug_assert!(maximal.iter().all(|c| c.dim() == n));
    Ok(Fan { n, maximal })
}

/// Refines a fan into one whose maximal cones are all unimodular. Maximal
/// cones are first triangulated (pulling at lex-smallest rays, so shared
/// faces of adjacent cones are split consistently); then, while any cone has
/// determinant larger than one, the whole fan is stellarly subdivided at the
/// smallest nonzero lattice point of the fundamental parallelepiped of a
/// cone of largest determinant. Each step strictly shrinks the number of
/// cones attaining the largest determinant, so the loop terminates. The
/// result is deterministic: ties are broken by lex order throughout.
pub fn unimodular_subdivision(fan: &Fan) -> Result<Fan, Error> {
    let mut cones: BTreeSet<Vec<LatticeVector>> = BTreeSet::new();
    for cone in &fan.maximal {
        for simplex in subdivide::triangulate(&cone.skeleton) {
            cones.insert(simplex);
        }
    }
    const MAX_ROUNDS: usize = 100_000;
    for _ in 0..MAX_ROUNDS {
        let mut worst: Option<(i128, &Vec<LatticeVector>)> = None;
        for cone in &cones {
            let det = rat::det_int(cone).abs();
            if det > 1 && worst.is_none_or(|(d, _)| det > d) {
                worst = Some((det, cone));
            }
        }
        let Some((_, target)) = worst else {
            let maximal: Vec<Cone> = cones.into_iter().map(Cone::new).collect();
            return Ok(Fan { n: fan.n, maximal });
        };
        let w = subdivide::parallelepiped_point(target)?;
        cones = subdivide::star_subdivide(&cones, &w);
    }
    Err(Error::Internal(
        "stellar subdivision exceeded its round budget".into(),
    ))
}

/// Per-cone annotation: the values `l(a^j)` of the skeleton rays on the
/// polyhedron, the sets `B` (rays with nonzero `l`) and `A` (rays attaining
/// `beta_tilde`), and the dominance flag. Ray indices are 1-based, matching
/// the order of the cone's skeleton.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConeAnnotation {
    pub l_values: Vec<i64>,
    pub b_set: Vec<usize>,
    pub a_set: Vec<usize>,
    pub in_sigma_star: bool,
}

/// Fan-wide annotation data. `beta_tilde` is the largest value of
/// `-<a>/l(a)` over rays with nonzero `l`; it always equals `-1/d` for the
/// Newton distance `d`, and a cone is dominant exactly when its `A` set has
/// as many elements as the multiplicity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotatedFan {
    pub beta_tilde: Rat,
    pub multiplicity: usize,
    pub cones: Vec<ConeAnnotation>,
}

/// Annotates every maximal cone of `fan` against the polyhedron `p`. Errors
/// when every ray has `l = 0`, which happens exactly when the origin lies in
/// `p` and the decay-rate data is undefined.
pub fn annotate_cones(fan: &Fan, p: &LatticePolyhedron) -> Result<AnnotatedFan, Error> {
    let mut beta_tilde: Option<Rat> = None;
    for ray in fan.rays() {
        let (l, _) = geometry::l_value(&ray, p)?;
        if l != 0 {
            let weight: i64 = ray.iter().sum();
            let beta = -Rat::new(weight, l);
            if beta_tilde.is_none_or(|b| beta > b) {
                beta_tilde = Some(beta);
            }
        }
    }
    let Some(beta_tilde) = beta_tilde else {
        return Err(Error::Domain(
            "every ray has l = 0, so the origin lies in the polyhedron and no decay rate exists"
                .into(),
        ));
    };
    let (d, _) = geometry::newton_distance(p)?;
    if beta_tilde != -d.recip() {
        return Err(Error::Internal(format!(
            "beta-tilde {} does not match -1/d for d = {}",
            rat_string(beta_tilde),
            rat_string(d)
        )));
    }
    let (_, multiplicity) = geometry::principal_face_and_multiplicity(p)?;
    let mut cones = Vec::with_capacity(fan.maximal.len());
    for cone in &fan.maximal {
        let mut l_values = Vec::with_capacity(cone.skeleton.len());
        let mut b_set = Vec::new();
        let mut a_set = Vec::new();
        for (idx, ray) in cone.skeleton.iter().enumerate() {
            let (l, _) = geometry::l_value(ray, p)?;
            l_values.push(l);
            if l != 0 {
                b_set.push(idx + 1);
                let weight: i64 = ray.iter().sum();
                if -Rat::new(weight, l) == beta_tilde {
                    a_set.push(idx + 1);
                }
            }
        }
        let in_sigma_star = a_set.len() == multiplicity;
        cones.push(ConeAnnotation {
            l_values,
            b_set,
            a_set,
            in_sigma_star,
        });
    }
    Ok(AnnotatedFan {
        beta_tilde,
        multiplicity,
        cones,
    })
}

/// The face of `p` cut out by the rays of `cone` with 1-based indices in
/// `indices`: the intersection of the supporting hyperplanes `H(a^j, l(a^j))`
/// with `p`. The empty index set yields `p` itself (as a face). Requires the
/// cone to lie inside a single normal-fan cone of `p`, which holds for every
/// cone of a refinement of the normal fan; the sum of the pairs is then a
/// valid pair.
pub fn gamma_of(indices: &[usize], cone: &Cone, p: &LatticePolyhedron) -> Result<Face, Error> {
    let n = p.dim_ambient;
    let mut a = vec![0i64; n];
    let mut l = 0i64;
    let mut seen = BTreeSet::new();
    for &j in indices {
        if j == 0 || j > cone.skeleton.len() {
            return Err(Error::Domain(format!(
                "ray index {} out of range 1..={}",
                j,
                cone.skeleton.len()
            )));
        }
        if !seen.insert(j) {
            continue;
        }
        let ray = &cone.skeleton[j - 1];
        let (lj, _) = geometry::l_value(ray, p)?;
        for k in 0..n {
            a[k] += ray[k];
        }
        l += lj;
    }
    geometry::face_of_pair(p, &ValidPair { a, l })
}

/// The largest index set defining `gamma` within `cone`: the 1-based indices
/// of the skeleton rays whose supporting hyperplane contains the whole face.
pub fn i_of(gamma: &Face, cone: &Cone, p: &LatticePolyhedron) -> Result<Vec<usize>, Error> {
    let mut out = Vec::new();
    for (idx, ray) in cone.skeleton.iter().enumerate() {
        let (l, _) = geometry::l_value(ray, p)?;
        let tight = gamma.vertices.iter().all(|v| {
            ray.iter()
                .zip(v)
                .map(|(&a, &x)| a as i128 * x as i128)
                .sum::<i128>()
                == l as i128
        });
        let recession_ok = gamma.v_set.iter().all(|&k| ray[k - 1] == 0);
        if tight && recession_ok {
            out.push(idx + 1);
        }
    }
    Ok(out)
}

/// Serializes an annotated fan in the format emitted by the command-line
/// `fan` and `resolve` subcommands.
pub fn fan_to_json(fan: &Fan, ann: &AnnotatedFan) -> serde_json::Value {
    let cones: Vec<serde_json::Value> = fan
        .maximal
        .iter()
        .zip(&ann.cones)
        .map(|(cone, a)| {
            serde_json::json!({
                "skeleton": cone.skeleton,
                "l": a.l_values,
                "A": a.a_set,
                "in_sigma_star": a.in_sigma_star,
            })
        })
        .collect();
    serde_json::json!({
        "cones": cones,
        "beta_tilde": rat_string(ann.beta_tilde),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_polyhedron;

    fn pts(v: &[&[i64]]) -> Vec<LatticeVector> {
        v.iter().map(|p| p.to_vec()).collect()
    }

    fn skel(c: &Cone) -> Vec<Vec<i64>> {
        c.skeleton.clone()
    }

    #[test]
    fn normal_fan_of_a_two_vertex_polyhedron() {
        let p = build_polyhedron(2, &pts(&[&[8, 0], &[7, 1], &[6, 2]])).unwrap();
        let fan = normal_fan(&p).unwrap();
        assert_eq!(fan.maximal.len(), 2);
        assert_eq!(skel(&fan.maximal[0]), vec![vec![0, 1], vec![1, 1]]);
        assert_eq!(skel(&fan.maximal[1]), vec![vec![1, 0], vec![1, 1]]);
        assert!(fan.is_unimodular());
    }

    #[test]
    fn normal_fan_of_a_single_monomial_is_the_orthant() {
        let p = build_polyhedron(2, &pts(&[&[2, 2]])).unwrap();
        let fan = normal_fan(&p).unwrap();
        assert_eq!(fan.maximal.len(), 1);
        assert_eq!(skel(&fan.maximal[0]), vec![vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn subdivision_splits_the_half_quadrant_cone() {
        let fan = Fan {
            n: 2,
            maximal: vec![Cone::new(pts(&[&[1, 0], &[1, 2]]))],
        };
        let refined = unimodular_subdivision(&fan).unwrap();
        assert_eq!(
            refined.maximal,
            vec![
                Cone::new(pts(&[&[1, 0], &[1, 1]])),
                Cone::new(pts(&[&[1, 1], &[1, 2]])),
            ]
        );
    }

    #[test]
    fn subdivision_resolves_a_determinant_five_cone() {
        let fan = Fan {
            n: 2,
            maximal: vec![Cone::new(pts(&[&[1, 0], &[1, 5]]))],
        };
        let refined = unimodular_subdivision(&fan).unwrap();
        assert_eq!(refined.maximal.len(), 5);
        assert!(refined.is_unimodular());
        let rays = refined.rays();
        assert_eq!(
            rays,
            pts(&[&[1, 0], &[1, 1], &[1, 2], &[1, 3], &[1, 4], &[1, 5]])
        );
    }

    #[test]
    fn subdivision_covers_and_stays_inside_the_original_support() {
        let fan = Fan {
            n: 3,
            maximal: vec![Cone::new(pts(&[
                &[1, 0, 1],
                &[0, 1, 1],
                &[1, 1, 1],
                &[0, 0, 1],
            ]))],
        };
        let refined = unimodular_subdivision(&fan).unwrap();
        assert!(refined.is_unimodular());
        let original = &fan.maximal[0];
        for cone in &refined.maximal {
            for ray in &cone.skeleton {
                assert!(original.contains(ray));
            }
        }
        for x1 in 0..=3 {
            for x2 in 0..=3 {
                for x3 in 0..=3 {
                    let x = vec![x1, x2, x3];
                    assert_eq!(refined.contains(&x), original.contains(&x), "{x:?}");
                }
            }
        }
    }

    #[test]
    fn annotations_locate_the_dominant_cone() {
        let p = build_polyhedron(2, &pts(&[&[8, 0], &[7, 1], &[6, 2]])).unwrap();
        let fan = unimodular_subdivision(&normal_fan(&p).unwrap()).unwrap();
        let ann = annotate_cones(&fan, &p).unwrap();
        assert_eq!(ann.beta_tilde, Rat::new(-1, 6));
        assert_eq!(ann.multiplicity, 1);
        let skels: Vec<_> = fan.maximal.iter().map(skel).collect();
        assert_eq!(
            skels,
            vec![
                vec![vec![0, 1], vec![1, 1]],
                vec![vec![1, 0], vec![1, 1]],
            ]
        );
        assert_eq!(ann.cones[1].l_values, vec![6, 8]);
        assert_eq!(ann.cones[1].b_set, vec![1, 2]);
        assert_eq!(ann.cones[1].a_set, vec![1]);
        assert!(ann.cones[1].in_sigma_star);
        assert_eq!(ann.cones[0].l_values, vec![0, 8]);
        assert_eq!(ann.cones[0].a_set, Vec::<usize>::new());
        assert!(!ann.cones[0].in_sigma_star);
    }

    #[test]
    fn annotation_rejects_a_polyhedron_containing_the_origin() {
        let p = build_polyhedron(2, &pts(&[&[0, 0]])).unwrap();
        let fan = normal_fan(&p).unwrap();
        let err = annotate_cones(&fan, &p).unwrap_err();
        assert!(err.to_string().contains("origin"));
    }

    #[test]
    fn gamma_and_i_are_mutually_inverse_on_the_dominant_cone() {
        let p = build_polyhedron(2, &pts(&[&[8, 0], &[7, 1], &[6, 2]])).unwrap();
        let fan = unimodular_subdivision(&normal_fan(&p).unwrap()).unwrap();
        let sigma = &fan.maximal[1];
        assert_eq!(skel(sigma), vec![vec![1, 0], vec![1, 1]]);

        let gamma = gamma_of(&[1], sigma, &p).unwrap();
        assert_eq!(gamma.describe(), "{(6,a2); a2 >= 2}");
        assert_eq!(i_of(&gamma, sigma, &p).unwrap(), vec![1]);

        let vertex = gamma_of(&[1, 2], sigma, &p).unwrap();
        assert_eq!(vertex.vertices, pts(&[&[6, 2]]));
        assert_eq!(vertex.dim, 0);
        assert_eq!(i_of(&vertex, sigma, &p).unwrap(), vec![1, 2]);

        let whole = gamma_of(&[], sigma, &p).unwrap();
        assert_eq!(whole.dim, 2);
        assert_eq!(i_of(&whole, sigma, &p).unwrap(), Vec::<usize>::new());
    }

    #[test]
    fn fan_json_has_the_documented_shape() {
        let p = build_polyhedron(2, &pts(&[&[8, 0], &[7, 1], &[6, 2]])).unwrap();
        let fan = unimodular_subdivision(&normal_fan(&p).unwrap()).unwrap();
        let ann = annotate_cones(&fan, &p).unwrap();
        let json = fan_to_json(&fan, &ann);
        assert_eq!(json["beta_tilde"], "-1/6");
        assert_eq!(json["cones"][1]["skeleton"], serde_json::json!([[1, 0], [1, 1]]));
        assert_eq!(json["cones"][1]["l"], serde_json::json!([6, 8]));
        assert_eq!(json["cones"][1]["A"], serde_json::json!([1]));
        assert_eq!(json["cones"][1]["in_sigma_star"], serde_json::json!(true));
    }
}
