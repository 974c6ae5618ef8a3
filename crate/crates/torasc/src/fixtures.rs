//! Named example phases used by the test suite, the guide, and the CLI.
//!
//! Each fixture is a phase function with some distinctive behavior: a clean
//! polynomial, a flat perturbation that keeps admissibility, one that breaks
//! it, higher-dimensional phases with nontrivial principal faces. Keeping
//! them in one table lets tests, documentation, and command-line runs talk
//! about the same objects by name.

use crate::funcspec::{parse_function, FunctionSpec};
use crate::Error;

/// A named example phase.
#[derive(Debug, Clone, Copy)]
pub struct Fixture {
    /// Stable lookup name.
    pub name: &'static str,
    /// Number of variables.
    pub n: usize,
    /// Expression in the phase grammar.
    pub expr: &'static str,
    /// One-line description of why the fixture is interesting.
    pub blurb: &'static str,
}

/// The fixture table, in display order.
pub const FIXTURES: &[Fixture] = &[
    Fixture {
        name: "monomial-square",
        n: 2,
        expr: "x1^2*x2^2",
        blurb: "separable monomial; every quantity has a closed form",
    },
    Fixture {
        name: "product-flat-0",
        n: 2,
        expr: "x1^2*x2^2 + flat(2,1)",
        blurb: "flat term sits on a coordinate axis; not admissible",
    },
    Fixture {
        name: "product-flat-1",
        n: 2,
        expr: "x1^2*x2^2 + x1*flat(2,1)",
        blurb: "admissible for the shifted quadrant polyhedron but not for its own",
    },
    Fixture {
        name: "product-flat-2",
        n: 2,
        expr: "x1^2*x2^2 + x1^2*flat(2,1)",
        blurb: "first admissible member of the flat-perturbation family",
    },
    Fixture {
        name: "product-flat-3",
        n: 2,
        expr: "x1^2*x2^2 + x1^3*flat(2,1)",
        blurb: "flat term strictly above the polyhedron; face data matches the pure monomial",
    },
    Fixture {
        name: "octic-flat",
        n: 2,
        expr: "x1^8 + x1^7*x2 + x1^6*x2^2*(1 + flat(2,1))",
        blurb: "compact principal edge with a flat factor; distance 6, simple leading pole",
    },
    Fixture {
        name: "sextic-chain",
        n: 3,
        expr: "x1^6 + x1^4*x2^2*flat(3,1) + x1^2*x2^4*flat(3,2) + x2^6",
        blurb: "three-variable phase flat in the third variable along interior points",
    },
    Fixture {
        name: "sextic-pit",
        n: 3,
        expr: "x1^6 + x1^2*x2^2*(1 + flat(3,1)) + x2^6",
        blurb: "three-variable phase with a double leading pole and two dominant charts",
    },
    Fixture {
        name: "flat-well",
        n: 2,
        expr: "x1^2 + flat(2,1)",
        blurb: "flat term alone on an axis; rejected, but Taylor data still reportable",
    },
];

/// Looks up a fixture by name.
pub fn fixture(name: &str) -> Option<&'static Fixture> {
    FIXTURES.iter().find(|f| f.name == name)
}

/// Parses the named fixture into a phase function.
pub fn parse_fixture(name: &str) -> Result<FunctionSpec, Error> {
    let fx = fixture(name).ok_or_else(|| {
        let names: Vec<&str> = FIXTURES.iter().map(|f| f.name).collect();
        Error::Domain(format!(
            "unknown fixture {name:?}; available: {}",
            names.join(", ")
        ))
    })?;
    parse_function(fx.expr, fx.n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspec::{check_membership, Verdict};
    use crate::geometry::build_polyhedron;

    #[test]
    fn every_fixture_parses_at_its_declared_arity() {
        for fx in FIXTURES {
            let f = parse_fixture(fx.name).unwrap();
            assert_eq!(f.n, fx.n, "{}", fx.name);
        }
    }

    #[test]
    fn admissibility_splits_the_table_as_documented() {
        let admissible = [
            "monomial-square",
            "product-flat-2",
            "product-flat-3",
            "octic-flat",
            "sextic-chain",
            "sextic-pit",
        ];
        let rejected = ["product-flat-0", "product-flat-1", "flat-well"];
        for name in admissible {
            let f = parse_fixture(name).unwrap();
            let report = check_membership(&f, None).unwrap();
            assert_eq!(report.verdict, Verdict::EHat, "{name}");
        }
        for name in rejected {
            let f = parse_fixture(name).unwrap();
            let report = check_membership(&f, None).unwrap();
            assert_ne!(report.verdict, Verdict::EHat, "{name}");
        }
    }

    #[test]
    fn the_shifted_quadrant_admits_the_first_flat_perturbation() {
        // For the k = 1 member the polyhedron (1,1) + R_+^2 strictly
        // contains the Newton polyhedron, and every face part exists even
        // though the phase is not admissible for its own polyhedron.
        let f = parse_fixture("product-flat-1").unwrap();
        let own = check_membership(&f, None).unwrap();
        assert_ne!(own.verdict, Verdict::EHat);
        let p = build_polyhedron(2, &[vec![1, 1]]).unwrap();
        let shifted = check_membership(&f, Some(&p)).unwrap();
        assert_eq!(shifted.verdict, Verdict::EHatP);
    }

    #[test]
    fn unknown_names_list_the_table() {
        let err = parse_fixture("no-such-fixture").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("monomial-square"));
        assert!(msg.contains("flat-well"));
    }
}
