//! Formal Taylor support of smooth-factor expressions.
//!
//! An expression is expanded distributively into additive components of the
//! form `c * x^alpha * prod_t exp(g_t)`. Components containing a flat atom
//! have identically vanishing Taylor series and are dropped. Components are
//! then grouped by `(alpha, exp-argument multiset)`; within a group the
//! `exp` product is a common nonzero unit, so the group vanishes exactly
//! when its rational coefficient sum does. A non-constant `exp` argument
//! contributes only its constant term (a nonzero unit), which makes the
//! computed support conservative for such inputs; this is documented on
//! [`crate::funcspec::FunctionSpec::taylor_support`].

use super::expr::Expr;
use crate::rat::{big, BigRat};
use crate::Error;
use num_traits::{One, Zero};
use std::collections::BTreeMap;

/// Hard cap on the number of components an expansion may produce.
const EXPANSION_BUDGET: usize = 200_000;

#[derive(Debug, Clone)]
struct Component {
    coeff: BigRat,
    exponent: Vec<i64>,
    exp_keys: Vec<String>,
}

fn unit(n: usize) -> Component {
    Component {
        coeff: BigRat::one(),
        exponent: vec![0; n],
        exp_keys: Vec::new(),
    }
}

fn mul_components(a: &Component, b: &Component) -> Component {
    let mut exp_keys: Vec<String> = a
        .exp_keys
        .iter()
        .chain(b.exp_keys.iter())
        .cloned()
        .collect();
    exp_keys.sort();
    Component {
        coeff: &a.coeff * &b.coeff,
        exponent: a
            .exponent
            .iter()
            .zip(&b.exponent)
            .map(|(x, y)| x + y)
            .collect(),
        exp_keys,
    }
}

fn check_budget(len: usize) -> Result<(), Error> {
    if len > EXPANSION_BUDGET {
        Err(Error::Budget(format!(
            "expression expansion produced more than {EXPANSION_BUDGET} components"
        )))
    } else {
        Ok(())
    }
}

fn expand(e: &Expr, n: usize) -> Result<Vec<Component>, Error> {
    Ok(match e {
        Expr::Const(c) => {
            if c.is_zero() {
                Vec::new()
            } else {
                let mut u = unit(n);
                u.coeff = big(*c);
                vec![u]
            }
        }
        Expr::Var(i) => {
            let mut u = unit(n);
            u.exponent[i - 1] = 1;
            vec![u]
        }
        Expr::Add(a, b) => {
            let mut v = expand(a, n)?;
            v.extend(expand(b, n)?);
            check_budget(v.len())?;
            v
        }
        Expr::Sub(a, b) => {
            let mut v = expand(a, n)?;
            for mut c in expand(b, n)? {
                c.coeff = -c.coeff;
                v.push(c);
            }
            check_budget(v.len())?;
            v
        }
        Expr::Mul(a, b) => {
            let va = expand(a, n)?;
            let vb = expand(b, n)?;
            check_budget(va.len().saturating_mul(vb.len()))?;
            let mut v = Vec::with_capacity(va.len() * vb.len());
            for ca in &va {
                for cb in &vb {
                    v.push(mul_components(ca, cb));
                }
            }
            v
        }
        Expr::Pow(b, k) => {
            let vb = expand(b, n)?;
            let mut v = vec![unit(n)];
            for _ in 0..*k {
                check_budget(v.len().saturating_mul(vb.len()))?;
                let mut next = Vec::with_capacity(v.len() * vb.len());
                for ca in &v {
                    for cb in &vb {
                        next.push(mul_components(ca, cb));
                    }
                }
                v = group_components(next)
                    .into_iter()
                    .map(|((exponent, exp_keys), coeff)| Component {
                        coeff,
                        exponent,
                        exp_keys,
                    })
                    .collect();
            }
            v
        }
        Expr::Exp(g) => {
            let origin = vec![BigRat::zero(); n];
            let key = match g.eval_exact(&origin) {
                Some(c) if c.is_zero() => None,
                Some(c) => Some(format!("exp({c})")),
                None => Some(format!("exp[{g}]")),
            };
            let mut u = unit(n);
            if let Some(key) = key {
                u.exp_keys.push(key);
            }
            vec![u]
        }
        Expr::Flat { .. } | Expr::FlatM { .. } => Vec::new(),
    })
}

type GroupKey = (Vec<i64>, Vec<String>);

fn group_components(components: Vec<Component>) -> BTreeMap<GroupKey, BigRat> {
    let mut groups: BTreeMap<GroupKey, BigRat> = BTreeMap::new();
    for c in components {
        let entry = groups
            .entry((c.exponent, c.exp_keys))
            .or_insert_with(BigRat::zero);
        *entry += c.coeff;
    }
    groups.retain(|_, coeff| !coeff.is_zero());
    groups
}

/// Exponent support of the formal Taylor series of `e` at the origin,
/// sorted lexicographically.
pub(crate) fn taylor_support_expr(e: &Expr, n: usize) -> Result<Vec<Vec<i64>>, Error> {
    let groups = group_components(expand(e, n)?);
    let mut support: Vec<Vec<i64>> = groups.into_keys().map(|(exponent, _)| exponent).collect();
    support.sort();
    support.dedup();
    Ok(support)
}

/// Decides whether the Taylor constant term of `e` is nonzero, treating each
/// distinct `exp` unit group independently (exact for flat-plus-polynomial
/// factors; conservative across distinct `exp` units).
pub(crate) fn constant_term_nonzero(e: &Expr, n: usize) -> Result<bool, Error> {
    let groups = group_components(expand(e, n)?);
    Ok(groups
        .keys()
        .any(|(exponent, _)| exponent.iter().all(|&c| c == 0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspec::expr::parse_expr;

    fn support(text: &str, n: usize) -> Vec<Vec<i64>> {
        taylor_support_expr(&parse_expr(text, n).unwrap(), n).unwrap()
    }

    #[test]
    fn flat_components_contribute_nothing() {
        assert_eq!(support("1+flat(2,1)", 2), vec![vec![0, 0]]);
        assert_eq!(support("flat(1,1)*x2^5", 2), Vec::<Vec<i64>>::new());
        assert_eq!(
            support("x1^2+x2*flatm(2,1,1)", 2),
            vec![vec![2, 0]]
        );
    }

    #[test]
    fn exact_cancellation_within_groups() {
        assert_eq!(support("(x1+1)*(x1-1)+1", 2), vec![vec![2, 0]]);
        assert_eq!(support("2*exp(1)-2*exp(1)", 1), Vec::<Vec<i64>>::new());
        assert_eq!(support("(x1+x2)^2-x1^2-x2^2", 2), vec![vec![1, 1]]);
    }

    #[test]
    fn exp_contributes_its_constant_term() {
        assert_eq!(support("exp(x1)", 2), vec![vec![0, 0]]);
        assert_eq!(support("exp(3)*x1", 2), vec![vec![1, 0]]);
    }

    #[test]
    fn constant_term_detection() {
        let e = parse_expr("1+flat(2,1)", 2).unwrap();
        assert!(constant_term_nonzero(&e, 2).unwrap());
        let e = parse_expr("flat(2,1)", 2).unwrap();
        assert!(!constant_term_nonzero(&e, 2).unwrap());
        let e = parse_expr("x1+x2^2", 2).unwrap();
        assert!(!constant_term_nonzero(&e, 2).unwrap());
        let e = parse_expr("exp(2)", 2).unwrap();
        assert!(constant_term_nonzero(&e, 2).unwrap());
    }
}
