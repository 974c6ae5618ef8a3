//! Exact lattice geometry of Newton polyhedra.
//!
//! All polyhedra here live in the positive orthant and are invariant under
//! translation by it: `P + R_+^n = P`. They are built from a finite set of
//! lattice generators as `conv(union of p + R_+^n)` and carried around as an
//! irredundant facet list together with the vertex list. Faces, the Newton
//! distance `d`, the principal face, and the multiplicity `m` are all
//! computed exactly over rationals.

mod dd;

use crate::rat::{self, Rat, WideRat};
use crate::Error;
use num_traits::{Signed, Zero};
use std::collections::BTreeMap;

/// Integer lattice vector (exponents, fan rays, facet normals).
pub type LatticeVector = Vec<i64>;

/// A pair `(a, l)` with `a` componentwise nonnegative and `<a, x> >= l`
/// holding on the attached polyhedron.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ValidPair {
    /// Inner normal, componentwise nonnegative.
    pub a: LatticeVector,
    /// Exact bound: the minimum of `<a, .>` over the polyhedron.
    pub l: i64,
}

impl ValidPair {
    /// `<a, x>` for an integer point.
    pub fn eval(&self, x: &[i64]) -> i64 {
        self.a.iter().zip(x).map(|(a, x)| a * x).sum()
    }

    /// `<a, x>` for a rational point.
    pub fn eval_rat(&self, x: &[Rat]) -> Rat {
        self.a
            .iter()
            .zip(x)
            .map(|(&a, &x)| Rat::from_integer(a) * x)
            .sum()
    }

    /// Sum of the coordinates of `a`.
    pub fn weight(&self) -> i64 {
        self.a.iter().sum()
    }
}

/// An unbounded lattice polyhedron `P` in the positive orthant with
/// recession cone exactly `R_+^n`, stored as irredundant facets plus
/// vertices. The empty polyhedron is a first-class value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticePolyhedron {
    /// Ambient dimension `n`.
    pub dim_ambient: usize,
    /// Irredundant facet list, lexicographically ordered by `(a, l)`.
    pub facets: Vec<ValidPair>,
    /// Vertex list, lexicographically ordered.
    pub vertices: Vec<LatticeVector>,
    /// False only for the distinguished empty polyhedron.
    pub nonempty: bool,
}

/// A nonempty face of a `LatticePolyhedron`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Face {
    /// A valid pair whose equality set on `P` is exactly this face.
    pub defining_pair: ValidPair,
    /// Affine dimension; 0 for vertices, `n` for `P` itself.
    pub dim: i32,
    /// Axes along which the face recedes: `V = {k : a_k = 0}` for any
    /// defining pair (1-based indices).
    pub v_set: Vec<usize>,
    /// Complement of `v_set` in `{1..n}`.
    pub w_set: Vec<usize>,
    /// True exactly when `v_set` is empty.
    pub compact: bool,
    /// Lattice points of the face; populated only when compact.
    pub lattice_points: Vec<LatticeVector>,
    /// Vertices of the face (vertices of `P` lying on it).
    pub vertices: Vec<LatticeVector>,
    /// Indices into `P.facets` of all facets containing this face.
    pub active_facets: Vec<usize>,
}

impl Face {
    /// True when the integer point lies on this face.
    pub fn contains_lattice_point(&self, p: &LatticePolyhedron, x: &[i64]) -> bool {
        p.contains_int(x) && self.defining_pair.eval(x) == self.defining_pair.l
    }

    /// Human-readable description such as `{(6,a2); a2 >= 2}`.
    pub fn describe(&self) -> String {
        if self.dim == 0 {
            return format!("{{{}}}", fmt_point(&self.vertices[0]));
        }
        let n = self.defining_pair.a.len();
        let mut coords = Vec::with_capacity(n);
        let mut bounds = Vec::new();
        for k in 0..n {
            if self.v_set.contains(&(k + 1)) {
                coords.push(format!("a{}", k + 1));
                let min = self.vertices.iter().map(|v| v[k]).min().unwrap_or(0);
                bounds.push(format!("a{} >= {min}", k + 1));
            } else {
                let vals: Vec<i64> = self.vertices.iter().map(|v| v[k]).collect();
                if vals.windows(2).all(|w| w[0] == w[1]) {
                    coords.push(vals[0].to_string());
                } else {
                    coords.push(format!("a{}", k + 1));
                    bounds.push(format!(
                        "{} <= a{} <= {}",
                        vals.iter().min().unwrap(),
                        k + 1,
                        vals.iter().max().unwrap()
                    ));
                }
            }
        }
        if bounds.is_empty() {
            format!("{{({})}}", coords.join(","))
        } else {
            format!("{{({}); {}}}", coords.join(","), bounds.join(", "))
        }
    }
}

fn fmt_point(x: &[i64]) -> String {
    let inner: Vec<String> = x.iter().map(i64::to_string).collect();
    format!("({})", inner.join(","))
}

/// Newton distance data: `d`, the diagonal point `q* = (d,...,d)`, the
/// principal face, and the multiplicity `m = n - dim(principal face)`.
#[derive(Debug, Clone)]
pub struct NewtonData {
    /// Newton distance, exact.
    pub d: Rat,
    /// The diagonal boundary point `(d,...,d)`.
    pub q_star: Vec<Rat>,
    /// The unique face whose relative interior contains `q*`.
    pub principal_face: Face,
    /// Newton multiplicity `m`.
    pub multiplicity: usize,
}

impl LatticePolyhedron {
    /// The distinguished empty polyhedron.
    pub fn empty(n: usize) -> Self {
        LatticePolyhedron {
            dim_ambient: n,
            facets: Vec::new(),
            vertices: Vec::new(),
            nonempty: false,
        }
    }

    /// Exact membership test for a rational point.
    pub fn contains(&self, x: &[Rat]) -> bool {
        self.nonempty
            && x.iter().all(|c| !c.is_negative())
            && self
                .facets
                .iter()
                .all(|f| f.eval_rat(x) >= Rat::from_integer(f.l))
    }

    /// Exact membership test for an integer point.
    pub fn contains_int(&self, x: &[i64]) -> bool {
        self.nonempty
            && x.iter().all(|&c| c >= 0)
            && self.facets.iter().all(|f| f.eval(x) >= f.l)
    }

    pub fn require_nonempty(&self, what: &str) -> Result<(), Error> {
        if self.nonempty {
            Ok(())
        } else {
            Err(Error::EmptyPolyhedron(what.to_string()))
        }
    }
}

/// Builds `conv(union of p + R_+^n)` over the support points.
///
/// The empty support yields the distinguished empty polyhedron. Facets come
/// out irredundant with primitive normals, ordered lexicographically;
/// vertices are the support points whose active facet normals span.
pub fn build_polyhedron(n: usize, support: &[LatticeVector]) -> Result<LatticePolyhedron, Error> {
    if n == 0 {
        return Err(Error::Domain("ambient dimension must be positive".into()));
    }
    for p in support {
        if p.len() != n {
            return Err(Error::Domain(format!(
                "support point {} has arity {}, expected {n}",
                fmt_point(p),
                p.len()
            )));
        }
        if p.iter().any(|&c| c < 0) {
            return Err(Error::Domain(format!(
                "support point {} has a negative coordinate",
                fmt_point(p)
            )));
        }
    }
    if support.is_empty() {
        return Ok(LatticePolyhedron::empty(n));
    }
    let mut points: Vec<LatticeVector> = support.to_vec();
    points.sort();
    points.dedup();

    // Homogenize: the polyhedron is the slice t = 1 of the cone generated by
    // (e_k, 0) for the recession orthant (seeded first so the double
    // description starts from it) and (p, 1) per support point.
    let mut constraints: Vec<Vec<i64>> = Vec::with_capacity(n + points.len());
    for k in 0..n {
        let mut row = vec![0i64; n + 1];
        row[k] = 1;
        constraints.push(row);
    }
    for p in &points {
        let mut row: Vec<i64> = p.clone();
        row.push(1);
        constraints.push(row);
    }
    let dual_rays = dd::extreme_rays(n + 1, &constraints);

    let mut facets: Vec<ValidPair> = Vec::new();
    for ray in dual_rays {
        let (a, last) = ray.split_at(n);
        if a.iter().all(|&c| c == 0) {
            continue; // the slice hyperplane t >= 0, not a facet of P
        }
        facets.push(ValidPair {
            a: a.to_vec(),
            l: -last[0],
        });
    }
    facets.sort();

    let vertices: Vec<LatticeVector> = points
        .into_iter()
        .filter(|p| {
            let active: Vec<Vec<i64>> = facets
                .iter()
                .filter(|f| f.eval(p) == f.l)
                .map(|f| f.a.clone())
                .collect();
            rat::rank_int(&active) == n
        })
        .collect();

    Ok(LatticePolyhedron {
        dim_ambient: n,
        facets,
        vertices,
        nonempty: true,
    })
}

/// Canonical identity of a face: which vertices of `P` lie on it and along
/// which axes it recedes.
fn face_key(vertex_ids: &[usize], rays: &[bool]) -> (Vec<usize>, Vec<bool>) {
    (vertex_ids.to_vec(), rays.to_vec())
}

fn face_from_active(p: &LatticePolyhedron, active: &[usize]) -> Option<Face> {
    let n = p.dim_ambient;
    let vertex_ids: Vec<usize> = (0..p.vertices.len())
        .filter(|&vi| {
            active
                .iter()
                .all(|&j| p.facets[j].eval(&p.vertices[vi]) == p.facets[j].l)
        })
        .collect();
    if vertex_ids.is_empty() {
        return None;
    }
    // Close the active set: every facet containing all these vertices and
    // admitting the face's recession rays belongs to the face's facet set.
    let mut sum_a = vec![0i64; n];
    for &j in active {
        for k in 0..n {
            sum_a[k] += p.facets[j].a[k];
        }
    }
    let rays: Vec<bool> = (0..n).map(|k| sum_a[k] == 0).collect();
    let full_active: Vec<usize> = (0..p.facets.len())
        .filter(|&j| {
            vertex_ids
                .iter()
                .all(|&vi| p.facets[j].eval(&p.vertices[vi]) == p.facets[j].l)
                && (0..n).all(|k| !rays[k] || p.facets[j].a[k] == 0)
        })
        .collect();
    let mut pair_a = vec![0i64; n];
    let mut pair_l = 0i64;
    for &j in &full_active {
        for k in 0..n {
            pair_a[k] += p.facets[j].a[k];
        }
        pair_l += p.facets[j].l;
    }
    // Reduce the defining pair when a common factor divides both sides.
    let mut g = pair_l.unsigned_abs() as i64;
    for &c in &pair_a {
        g = num_integer::gcd(g, c);
    }
    if g > 1 {
        for c in pair_a.iter_mut() {
            *c /= g;
        }
        pair_l /= g;
    }

    let v_set: Vec<usize> = (1..=n).filter(|&k| rays[k - 1]).collect();
    let w_set: Vec<usize> = (1..=n).filter(|&k| !rays[k - 1]).collect();
    let compact = v_set.is_empty();

    let verts: Vec<LatticeVector> = vertex_ids.iter().map(|&vi| p.vertices[vi].clone()).collect();
    let mut span: Vec<Vec<i64>> = verts[1..]
        .iter()
        .map(|v| v.iter().zip(&verts[0]).map(|(a, b)| a - b).collect())
        .collect();
    for k in 0..n {
        if rays[k] {
            let mut e = vec![0i64; n];
            e[k] = 1;
            span.push(e);
        }
    }
    let dim = rat::rank_int(&span) as i32;

    let lattice_points = if compact {
        let mut lo = verts[0].clone();
        let mut hi = verts[0].clone();
        for v in &verts {
            for k in 0..n {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        let mut pts = Vec::new();
        let mut cursor = lo.clone();
        'outer: loop {
            if p.contains_int(&cursor)
                && full_active
                    .iter()
                    .all(|&j| p.facets[j].eval(&cursor) == p.facets[j].l)
            {
                pts.push(cursor.clone());
            }
            for k in 0..n {
                if cursor[k] < hi[k] {
                    cursor[k] += 1;
                    continue 'outer;
                }
                cursor[k] = lo[k];
            }
            break;
        }
        pts.sort();
        pts
    } else {
        Vec::new()
    };

    Some(Face {
        defining_pair: ValidPair { a: pair_a, l: pair_l },
        dim,
        v_set,
        w_set,
        compact,
        lattice_points,
        vertices: verts,
        active_facets: full_active,
    })
}

/// Enumerates all nonempty faces of `P`, including `P` itself and all
/// vertices, ordered by (dimension, defining pair).
pub fn enumerate_faces(p: &LatticePolyhedron) -> Result<Vec<Face>, Error> {
    p.require_nonempty("enumerate_faces")?;
    let nf = p.facets.len();
    assert!(
        nf <= 20,
        "face enumeration is exponential in the facet count; {nf} facets exceeds the desk-scale cap"
    );
    let mut seen: BTreeMap<(Vec<usize>, Vec<bool>), Face> = BTreeMap::new();
    for mask in 0..(1u64 << nf) {
        let active: Vec<usize> = (0..nf).filter(|&j| mask & (1 << j) != 0).collect();
        if let Some(face) = face_from_active(p, &active) {
            let vids: Vec<usize> = (0..p.vertices.len())
                .filter(|&vi| {
                    face.active_facets
                        .iter()
                        .all(|&j| p.facets[j].eval(&p.vertices[vi]) == p.facets[j].l)
                })
                .collect();
            let rays: Vec<bool> = (1..=p.dim_ambient)
                .map(|k| face.v_set.contains(&k))
                .collect();
            seen.entry(face_key(&vids, &rays)).or_insert(face);
        }
    }
    let mut faces: Vec<Face> = seen.into_values().collect();
    faces.sort_by(|a, b| {
        (a.dim, &a.defining_pair, &a.vertices).cmp(&(b.dim, &b.defining_pair, &b.vertices))
    });
    Ok(faces)
}

/// `l(a) = min{<a, x> : x in P}` together with the face attaining it.
pub fn l_value(a: &LatticeVector, p: &LatticePolyhedron) -> Result<(i64, Face), Error> {
    p.require_nonempty("l_value")?;
    if a.len() != p.dim_ambient {
        return Err(Error::Domain("functional arity mismatch".into()));
    }
    if a.iter().any(|&c| c < 0) {
        return Err(Error::Domain(
            "l_value requires a componentwise nonnegative functional".into(),
        ));
    }
    let l = p
        .vertices
        .iter()
        .map(|v| a.iter().zip(v).map(|(a, x)| a * x).sum::<i64>())
        .min()
        .expect("nonempty polyhedron has a vertex");
    let face = face_of_functional(p, a, l);
    Ok((l, face))
}

/// The face `{x in P : <a, x> = l}` for a valid pair of `P`.
fn face_of_functional(p: &LatticePolyhedron, a: &[i64], l: i64) -> Face {
    let tight_vertices: Vec<usize> = (0..p.vertices.len())
        .filter(|&vi| a.iter().zip(&p.vertices[vi]).map(|(a, x)| a * x).sum::<i64>() == l)
        .collect();
    // A facet contains the face exactly when it is tight on the face's
    // vertices and compatible with its recession directions {e_k : a_k = 0}.
    let active: Vec<usize> = (0..p.facets.len())
        .filter(|&j| {
            tight_vertices
                .iter()
                .all(|&vi| p.facets[j].eval(&p.vertices[vi]) == p.facets[j].l)
                && (0..p.dim_ambient).all(|k| a[k] != 0 || p.facets[j].a[k] == 0)
        })
        .collect();
    face_from_active(p, &active).expect("a valid pair always cuts a nonempty face")
}

/// The face cut out by a valid pair: `{x in P : <a, x> = l}`. Errors when
/// the pair is not valid for `P` or does not attain equality on it.
pub fn face_of_pair(p: &LatticePolyhedron, pair: &ValidPair) -> Result<Face, Error> {
    p.require_nonempty("face_of_pair")?;
    let (l, face) = l_value(&pair.a, p)?;
    if l != pair.l {
        return Err(Error::Domain(format!(
            "the pair does not define a face: minimum of the functional is {l}, not {}",
            pair.l
        )));
    }
    Ok(face)
}

/// Newton distance `d` and the diagonal point `q* = (d,...,d)`.
pub fn newton_distance(p: &LatticePolyhedron) -> Result<(Rat, Vec<Rat>), Error> {
    p.require_nonempty("newton_distance")?;
    let mut d = Rat::zero();
    for f in &p.facets {
        if f.l > 0 {
            let t = rat::rat(f.l, f.weight());
            if t > d {
                d = t;
            }
        }
    }
    let q_star = vec![d; p.dim_ambient];
    Ok((d, q_star))
}

/// The principal face (relative interior contains `q*`) and the Newton
/// multiplicity `m = n - dim`.
pub fn principal_face_and_multiplicity(p: &LatticePolyhedron) -> Result<(Face, usize), Error> {
    let (d, q_star) = newton_distance(p)?;
    let _ = d;
    let active: Vec<usize> = (0..p.facets.len())
        .filter(|&j| p.facets[j].eval_rat(&q_star) == Rat::from_integer(p.facets[j].l))
        .collect();
    let face = face_from_active(p, &active)
        .expect("the diagonal point lies on the boundary, so its minimal face exists");
    let m = p.dim_ambient - face.dim as usize;
    Ok((face, m))
}

/// Looks up the enumerated face identical to `face` (used to connect
/// functional-derived faces with the canonical enumeration).
pub fn canonical_face<'a>(faces: &'a [Face], face: &Face) -> Option<&'a Face> {
    faces
        .iter()
        .find(|f| f.vertices == face.vertices && f.v_set == face.v_set)
}

/// Solves `sum_i lambda_i g_i = target` with `lambda >= 0` where the `g_i`
/// are the columns of a square unimodular matrix; exact containment test for
/// simplicial cones.
pub fn in_simplicial_cone(skeleton: &[LatticeVector], target: &[i64]) -> bool {
    let n = target.len();
    if skeleton.len() != n {
        return false;
    }
    let a: Vec<Vec<i64>> = (0..n)
        .map(|row| (0..n).map(|col| skeleton[col][row]).collect())
        .collect();
    match rat::solve_int(&a, target) {
        Some(lambda) => lambda.iter().all(|c| !c.is_negative()),
        None => false,
    }
}

/// Rational barycentric solve for simplicial cones; `None` when the skeleton
/// is singular, `Some(lambda)` with exact coefficients otherwise.
pub fn cone_coordinates(skeleton: &[LatticeVector], target: &[i64]) -> Option<Vec<WideRat>> {
    let n = target.len();
    if skeleton.len() != n {
        return None;
    }
    let a: Vec<Vec<i64>> = (0..n)
        .map(|row| (0..n).map(|col| skeleton[col][row]).collect())
        .collect();
    rat::solve_int(&a, target)
}
