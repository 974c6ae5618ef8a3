//! Exact sparse polynomials over the rationals and the univariate real-root
//! machinery (Sturm chains, root isolation, simplest-rational witnesses)
//! behind the nondegeneracy decision procedures, plus the conservative
//! floating-point intervals used by the branch-and-bound fallback.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::funcspec::FunctionSpec;
use crate::rat::{big_pow, big_to_f64, BigRat};

/// A multivariate polynomial with exact rational coefficients, stored as a
/// map from exponent vectors to nonzero coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparsePoly {
    pub n: usize,
    pub terms: BTreeMap<Vec<u32>, BigRat>,
}

impl SparsePoly {
    /// Extracts the polynomial form of a gamma-part whose factors are
    /// variable-free (compact faces zero out every coordinate). `None` when
    /// a factor still references a variable or takes an irrational value.
    pub fn from_gamma_part(f: &FunctionSpec) -> Option<SparsePoly> {
        let zeros = vec![BigRat::zero(); f.n];
        let mut terms = BTreeMap::new();
        for t in &f.terms {
            let mut vars = std::collections::BTreeSet::new();
            t.factor.collect_vars(&mut vars);
            if !vars.is_empty() {
                return None;
            }
            let c = t.factor.eval_exact(&zeros)?;
            if c.is_zero() {
                continue;
            }
            let exponent: Vec<u32> = t
                .exponent
                .iter()
                .map(|&e| u32::try_from(e).ok())
                .collect::<Option<_>>()?;
            terms.insert(exponent, c);
        }
        Some(SparsePoly { n: f.n, terms })
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        let mut total = 0.0;
        for (p, c) in &self.terms {
            let mut mono = big_to_f64(c);
            for (k, &e) in p.iter().enumerate() {
                if e > 0 {
                    mono *= x[k].powi(e as i32);
                }
            }
            total += mono;
        }
        total
    }

    /// Conservative interval evaluation over an axis-aligned box.
    pub fn eval_interval(&self, x: &[Interval]) -> Interval {
        let mut total = Interval::point(0.0);
        for (p, c) in &self.terms {
            let mut mono = Interval::from_bigrat(c);
            for (k, &e) in p.iter().enumerate() {
                if e > 0 {
                    mono = mono.mul(x[k].powi(e));
                }
            }
            total = total.add(mono);
        }
        total
    }

    /// Partial derivative in the 0-based variable `k`.
    pub fn derivative(&self, k: usize) -> SparsePoly {
        let mut terms = BTreeMap::new();
        for (p, c) in &self.terms {
            if p[k] == 0 {
                continue;
            }
            let mut q = p.clone();
            q[k] -= 1;
            terms.insert(q, c * BigRat::from_integer(BigInt::from(p[k])));
        }
        SparsePoly { n: self.n, terms }
    }

    pub fn gradient(&self) -> Vec<SparsePoly> {
        (0..self.n).map(|k| self.derivative(k)).collect()
    }

    /// 0-based indices of the variables that actually occur.
    pub fn effective_vars(&self) -> Vec<usize> {
        (0..self.n)
            .filter(|&k| self.terms.keys().any(|p| p[k] > 0))
            .collect()
    }

    /// Reindexes the polynomial onto the given variables; every other
    /// variable must be absent.
    pub fn project(&self, vars: &[usize]) -> SparsePoly {
        let mut terms = BTreeMap::new();
        for (p, c) in &self.terms {
            let q: Vec<u32> = vars.iter().map(|&k| p[k]).collect();
            debug_assert_eq!(q.iter().sum::<u32>(), p.iter().sum::<u32>());
            terms.insert(q, c.clone());
        }
        SparsePoly {
            n: vars.len(),
            terms,
        }
    }

    /// Divides out the largest common monomial factor, which does not change
    /// zero sets away from the coordinate planes.
    pub fn strip_monomial_content(&self) -> SparsePoly {
        if self.terms.is_empty() {
            return self.clone();
        }
        let mut content = vec![u32::MAX; self.n];
        for p in self.terms.keys() {
            for k in 0..self.n {
                content[k] = content[k].min(p[k]);
            }
        }
        let terms = self
            .terms
            .iter()
            .map(|(p, c)| {
                let q: Vec<u32> = p.iter().zip(&content).map(|(&e, &m)| e - m).collect();
                (q, c.clone())
            })
            .collect();
        SparsePoly { n: self.n, terms }
    }

    /// Substitutes the constant `v` for variable `k`, keeping the arity.
    pub fn substitute(&self, k: usize, v: &BigRat) -> SparsePoly {
        let mut terms: BTreeMap<Vec<u32>, BigRat> = BTreeMap::new();
        for (p, c) in &self.terms {
            let mut q = p.clone();
            let e = q[k];
            q[k] = 0;
            let coeff = c * big_pow(v, e);
            let entry = terms.entry(q).or_insert_with(BigRat::zero);
            *entry += coeff;
        }
        terms.retain(|_, c| !c.is_zero());
        SparsePoly { n: self.n, terms }
    }

    /// Dense univariate coefficient vector when only variable `k` occurs.
    pub fn to_unipoly(&self, k: usize) -> Option<UniPoly> {
        let deg = self.terms.keys().map(|p| p[k]).max().unwrap_or(0) as usize;
        let mut coeffs = vec![BigRat::zero(); deg + 1];
        for (p, c) in &self.terms {
            for (j, &e) in p.iter().enumerate() {
                if j != k && e > 0 {
                    return None;
                }
            }
            coeffs[p[k] as usize] += c.clone();
        }
        Some(UniPoly::new(coeffs))
    }
}

// ---------------------------------------------------------------------------
// Univariate polynomials and Sturm machinery
// ---------------------------------------------------------------------------

/// Dense univariate polynomial, coefficients ascending, trailing zeros
/// trimmed (the zero polynomial has an empty coefficient list).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniPoly(pub Vec<BigRat>);

impl UniPoly {
    pub fn new(mut coeffs: Vec<BigRat>) -> UniPoly {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        UniPoly(coeffs)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn eval(&self, x: &BigRat) -> BigRat {
        let mut acc = BigRat::zero();
        for c in self.0.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> UniPoly {
        if self.0.len() <= 1 {
            return UniPoly(Vec::new());
        }
        let coeffs = self
            .0
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * BigRat::from_integer(BigInt::from(i)))
            .collect();
        UniPoly::new(coeffs)
    }

    /// Euclidean division; the divisor must be nonzero.
    pub fn div_rem(&self, d: &UniPoly) -> (UniPoly, UniPoly) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let dd = d.degree().expect("nonzero divisor");
        let lead = d.0[dd].clone();
        let mut rem = self.0.clone();
        let mut quo = vec![BigRat::zero(); self.0.len().saturating_sub(dd)];
        while rem.len() > dd {
            let k = rem.len() - 1;
            let c = rem[k].clone() / lead.clone();
            if !c.is_zero() {
                quo[k - dd] = c.clone();
                for i in 0..dd {
                    let adj = d.0[i].clone() * c.clone();
                    rem[k - dd + i] -= adj;
                }
            }
            rem.pop();
        }
        (UniPoly::new(quo), UniPoly::new(rem))
    }

    /// Monic greatest common divisor.
    pub fn gcd(a: &UniPoly, b: &UniPoly) -> UniPoly {
        let mut a = a.clone();
        let mut b = b.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn monic(&self) -> UniPoly {
        match self.0.last() {
            None => self.clone(),
            Some(lead) => {
                let inv = BigRat::one() / lead.clone();
                UniPoly(self.0.iter().map(|c| c * inv.clone()).collect())
            }
        }
    }

    /// Removes the root at zero: returns `(p / x^k, k)` with the quotient's
    /// constant term nonzero.
    pub fn strip_zero_roots(&self) -> (UniPoly, usize) {
        let k = self
            .0
            .iter()
            .position(|c| !c.is_zero())
            .unwrap_or(self.0.len());
        (UniPoly::new(self.0[k..].to_vec()), k)
    }

    /// The square-free part `p / gcd(p, p')`, with the same real roots, all
    /// simple.
    pub fn square_free_part(&self) -> UniPoly {
        if self.degree().unwrap_or(0) < 2 {
            return self.monic();
        }
        let g = UniPoly::gcd(self, &self.derivative());
        if g.degree() == Some(0) {
            return self.monic();
        }
        let (q, _) = self.div_rem(&g);
        q.monic()
    }

    /// Bound `B` such that every real root lies in `(-B, B)`.
    pub fn root_bound(&self) -> BigRat {
        let lead = self.0.last().expect("nonzero polynomial").clone();
        let mut max = BigRat::zero();
        for c in &self.0[..self.0.len() - 1] {
            let ratio = (c / &lead).abs();
            if ratio > max {
                max = ratio;
            }
        }
        max + BigRat::one() + BigRat::one()
    }
}

/// The canonical Sturm chain `p, p', -rem(...), ...`; its sign-variation
/// difference counts distinct real roots in a half-open interval.
pub fn sturm_chain(p: &UniPoly) -> Vec<UniPoly> {
    let mut chain = vec![p.clone()];
    if p.degree().unwrap_or(0) >= 1 {
        chain.push(p.derivative());
        loop {
            let k = chain.len();
            let (_, r) = chain[k - 2].div_rem(&chain[k - 1]);
            if r.is_zero() {
                break;
            }
            chain.push(UniPoly(r.0.iter().map(|c| -c).collect()));
        }
    }
    chain
}

fn sign_at(p: &UniPoly, x: &BigRat) -> i32 {
    let v = p.eval(x);
    if v.is_zero() {
        0
    } else if v.is_negative() {
        -1
    } else {
        1
    }
}

fn variations(signs: impl Iterator<Item = i32>) -> usize {
    let mut count = 0;
    let mut last = 0;
    for s in signs {
        if s == 0 {
            continue;
        }
        if last != 0 && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

/// Distinct real roots of the chain's polynomial in the interval `(a, b]`.
pub fn count_roots_between(chain: &[UniPoly], a: &BigRat, b: &BigRat) -> usize {
    let va = variations(chain.iter().map(|p| sign_at(p, a)));
    let vb = variations(chain.iter().map(|p| sign_at(p, b)));
    va.saturating_sub(vb)
}

/// Whether `p` has a real root different from zero.
pub fn has_nonzero_real_root(p: &UniPoly) -> bool {
    let (stripped, _) = p.strip_zero_roots();
    if stripped.degree().unwrap_or(0) == 0 {
        return false;
    }
    let chain = sturm_chain(&stripped);
    let bound = stripped.root_bound();
    count_roots_between(&chain, &(-bound.clone()), &bound) > 0
}

/// Isolates one nonzero real root of a square-free `p` with `p(0) != 0`:
/// returns `(a, b)` with `a < b`, exactly one root in the open interval, a
/// sign change across it, and zero never strictly inside (so every point
/// strictly between the endpoints is nonzero). `None` when no real root
/// exists.
pub fn isolate_nonzero_root(p: &UniPoly) -> Option<(BigRat, BigRat)> {
    debug_assert!(!p.eval(&BigRat::zero()).is_zero());
    let chain = sturm_chain(p);
    let bound = p.root_bound();
    let zero = BigRat::zero();
    let mut stack = Vec::new();
    if count_roots_between(&chain, &zero, &bound) > 0 {
        stack.push((zero.clone(), bound.clone()));
    }
    if count_roots_between(&chain, &(-bound.clone()), &zero) > 0 {
        stack.push((-bound.clone(), zero.clone()));
    }
    while let Some((a, b)) = stack.pop() {
        // The endpoints are never roots here: +-bound exceed every root, 0
        // is excluded by the precondition, and midpoints are tested below.
        // Splitting always happens at midpoints, so 0 stays an endpoint.
        let count = count_roots_between(&chain, &a, &b);
        if count == 0 {
            continue;
        }
        if count == 1 {
            return Some((a, b));
        }
        let two = BigRat::from_integer(BigInt::from(2));
        let mid = (a.clone() + b.clone()) / two.clone();
        if p.eval(&mid).is_zero() {
            // A root exactly at the midpoint: shrink a bracket around it
            // until it isolates that root alone, with nonvanishing endpoints
            // and zero at most on the boundary. Square-free polynomials have
            // finitely many roots, so the loop terminates.
            let mut radius = (b.clone() - a.clone()) / (two.clone() + two.clone());
            loop {
                let lo = mid.clone() - radius.clone();
                let hi = mid.clone() + radius.clone();
                if radius <= mid.abs()
                    && sign_at(p, &lo) != 0
                    && sign_at(p, &hi) != 0
                    && count_roots_between(&chain, &lo, &hi) == 1
                {
                    return Some((lo, hi));
                }
                radius /= two.clone();
            }
        }
        stack.push((a, mid.clone()));
        stack.push((mid, b));
    }
    None
}

/// The rational with the smallest denominator (and then smallest numerator)
/// strictly between `lo` and `hi`.
pub fn simplest_rational_between(lo: &BigRat, hi: &BigRat) -> BigRat {
    assert!(lo < hi, "empty interval");
    let zero = BigRat::zero();
    if *lo < zero && zero < *hi {
        return zero;
    }
    if *hi <= zero {
        return -simplest_positive(&-hi.clone(), Some(&-lo.clone()));
    }
    simplest_positive(lo, Some(hi))
}

/// Simplest rational in the open interval `(lo, hi)` with `0 <= lo`; `None`
/// as the upper bound means positive infinity.
fn simplest_positive(lo: &BigRat, hi: Option<&BigRat>) -> BigRat {
    let candidate = lo.floor() + BigRat::one();
    match hi {
        None => candidate,
        Some(hi) => {
            if candidate < *hi {
                return candidate;
            }
            let f = lo.floor();
            let new_lo = BigRat::one() / (hi - f.clone());
            let frac = lo - f.clone();
            if frac.is_zero() {
                f + BigRat::one() / simplest_positive(&new_lo, None)
            } else {
                let new_hi = BigRat::one() / frac;
                f + BigRat::one() / simplest_positive(&new_lo, Some(&new_hi))
            }
        }
    }
}

/// Walks the Stern-Brocot bisection of an isolating interval toward its
/// root, returning the first point the exact-arithmetic `accept` test
/// admits. The interval must carry a sign change of `p`.
pub fn refine_root_witness(
    p: &UniPoly,
    mut a: BigRat,
    mut b: BigRat,
    mut accept: impl FnMut(&BigRat) -> bool,
) -> Option<BigRat> {
    let mut sign_a = sign_at(p, &a);
    if sign_a == 0 {
        return accept(&a).then_some(a);
    }
    if sign_at(p, &b) == 0 {
        return accept(&b).then_some(b);
    }
    for _ in 0..20_000 {
        let c = simplest_rational_between(&a, &b);
        if accept(&c) {
            return Some(c);
        }
        let sc = sign_at(p, &c);
        if sc == 0 {
            // The exact root was rejected; nothing closer exists.
            return None;
        }
        if sc == sign_a {
            a = c;
        } else {
            b = c;
        }
        sign_a = sign_at(p, &a);
    }
    None
}

// ---------------------------------------------------------------------------
// Conservative floating-point intervals
// ---------------------------------------------------------------------------

fn next_up(v: f64) -> f64 {
    if v.is_nan() || v == f64::INFINITY {
        return v;
    }
    if v == 0.0 {
        return f64::from_bits(1);
    }
    if v > 0.0 {
        f64::from_bits(v.to_bits() + 1)
    } else {
        f64::from_bits(v.to_bits() - 1)
    }
}

fn next_down(v: f64) -> f64 {
    -next_up(-v)
}

/// A closed floating-point interval with outward rounding after every
/// operation, sound for verifying sign conditions of polynomials.
#[derive(Debug, Copy, Clone)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Interval {
        debug_assert!(lo <= hi);
        Interval { lo, hi }
    }

    pub fn point(v: f64) -> Interval {
        Interval { lo: v, hi: v }
    }

    pub fn from_bigrat(c: &BigRat) -> Interval {
        let v = big_to_f64(c);
        Interval {
            lo: next_down(v),
            hi: next_up(v),
        }
    }

    fn widened(self) -> Interval {
        Interval {
            lo: next_down(self.lo),
            hi: next_up(self.hi),
        }
    }

    pub fn add(self, o: Interval) -> Interval {
        Interval {
            lo: self.lo + o.lo,
            hi: self.hi + o.hi,
        }
        .widened()
    }

    pub fn mul(self, o: Interval) -> Interval {
        let products = [
            self.lo * o.lo,
            self.lo * o.hi,
            self.hi * o.lo,
            self.hi * o.hi,
        ];
        let lo = products.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = products.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Interval { lo, hi }.widened()
    }

    pub fn powi(self, k: u32) -> Interval {
        if k == 0 {
            return Interval::point(1.0);
        }
        let (plo, phi) = (self.lo.powi(k as i32), self.hi.powi(k as i32));
        let out = if k % 2 == 1 || self.lo >= 0.0 {
            Interval { lo: plo, hi: phi }
        } else if self.hi <= 0.0 {
            Interval { lo: phi, hi: plo }
        } else {
            Interval {
                lo: 0.0,
                hi: plo.max(phi),
            }
        };
        out.widened()
    }

    pub fn contains_zero(self) -> bool {
        self.lo <= 0.0 && self.hi >= 0.0
    }

    pub fn width(self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::bigint;

    fn upoly(coeffs: &[i64]) -> UniPoly {
        UniPoly::new(coeffs.iter().map(|&c| bigint(c)).collect())
    }

    fn brat(num: i64, den: i64) -> BigRat {
        BigRat::new(BigInt::from(num), BigInt::from(den))
    }

    #[test]
    fn division_recovers_quotient_and_remainder() {
        // x^3 - 2x + 1 = (x - 1)(x^2 + x - 1) + 0
        let p = upoly(&[1, -2, 0, 1]);
        let d = upoly(&[-1, 1]);
        let (q, r) = p.div_rem(&d);
        assert_eq!(q, upoly(&[-1, 1, 1]));
        assert!(r.is_zero());
    }

    #[test]
    fn gcd_detects_the_shared_root() {
        // gcd((x-1)^2(x+2), (x-1)(x-3)) = x - 1
        let a = upoly(&[2, -3, 0, 1]);
        let b = upoly(&[3, -4, 1]);
        assert_eq!(UniPoly::gcd(&a, &b), upoly(&[-1, 1]));
    }

    #[test]
    fn sturm_counts_the_roots_of_a_cubic() {
        // x^3 - 2x has roots -sqrt(2), 0, sqrt(2).
        let p = upoly(&[0, -2, 0, 1]);
        let chain = sturm_chain(&p);
        assert_eq!(count_roots_between(&chain, &bigint(-2), &bigint(2)), 3);
        assert_eq!(count_roots_between(&chain, &bigint(0), &bigint(2)), 1);
        assert!(has_nonzero_real_root(&p));
    }

    #[test]
    fn positive_definite_quadratics_have_no_real_roots() {
        // 1 + y + y^2 and 1 - y + y^2 stay positive.
        assert!(!has_nonzero_real_root(&upoly(&[1, 1, 1])));
        assert!(!has_nonzero_real_root(&upoly(&[1, -1, 1])));
    }

    #[test]
    fn zero_roots_are_stripped_before_deciding() {
        // y^2 (1 + y^4) has no nonzero real root.
        assert!(!has_nonzero_real_root(&upoly(&[0, 0, 1, 0, 0, 0, 1])));
    }

    #[test]
    fn isolation_brackets_a_simple_root() {
        // x^2 - 2: isolating one root and refining finds a point near it.
        let p = upoly(&[-2, 0, 1]);
        let (a, b) = isolate_nonzero_root(&p).unwrap();
        assert_eq!(count_roots_between(&sturm_chain(&p), &a, &b), 1);
        let threshold = brat(1, 1_000_000);
        let witness = refine_root_witness(&p, a, b, |c| p.eval(c).abs() < threshold).unwrap();
        let v = big_to_f64(&witness);
        assert!((v.abs() - std::f64::consts::SQRT_2).abs() < 1e-3);
    }

    #[test]
    fn simplest_rational_prefers_small_denominators() {
        assert_eq!(simplest_rational_between(&brat(1, 3), &brat(1, 2)), brat(2, 5));
        assert_eq!(simplest_rational_between(&brat(0, 1), &brat(2, 1)), brat(1, 1));
        assert_eq!(simplest_rational_between(&brat(-1, 2), &brat(1, 2)), brat(0, 1));
        assert_eq!(simplest_rational_between(&brat(-3, 4), &brat(-1, 4)), brat(-1, 2));
        assert_eq!(simplest_rational_between(&brat(5, 1), &brat(11, 2)), brat(16, 3));
    }

    #[test]
    fn exact_rational_roots_are_found_exactly() {
        // (x - 1)(x + 3): the Stern-Brocot walk lands on 1 exactly.
        let p = upoly(&[-3, 2, 1]);
        let (a, b) = isolate_nonzero_root(&p).unwrap();
        let witness = refine_root_witness(&p, a, b, |c| p.eval(c).is_zero()).unwrap();
        assert!(witness == bigint(1) || witness == bigint(-3));
    }

    #[test]
    fn sparse_polynomials_differentiate_and_project() {
        // f = x1^2 x3 - 2 x3^2 in three variables, x2 absent.
        let mut terms = BTreeMap::new();
        terms.insert(vec![2, 0, 1], bigint(1));
        terms.insert(vec![0, 0, 2], bigint(-2));
        let f = SparsePoly { n: 3, terms };
        assert_eq!(f.effective_vars(), vec![0, 2]);
        let d3 = f.derivative(2);
        assert_eq!(d3.eval_f64(&[1.0, 5.0, 1.0]), -3.0);
        let g = f.project(&[0, 2]);
        assert_eq!(g.n, 2);
        assert_eq!(g.eval_f64(&[2.0, 1.0]), 2.0);
    }

    #[test]
    fn monomial_content_strips_cleanly() {
        // x1^2 x2 + x1^3 x2^2 -> 1 + x1 x2
        let mut terms = BTreeMap::new();
        terms.insert(vec![2, 1], bigint(1));
        terms.insert(vec![3, 2], bigint(1));
        let f = SparsePoly { n: 2, terms };
        let g = f.strip_monomial_content();
        assert_eq!(g.terms.keys().cloned().collect::<Vec<_>>(), vec![vec![0, 0], vec![1, 1]]);
    }

    #[test]
    fn substitution_produces_the_slice_polynomial() {
        // f = x1^2 - 2 x1 x2 + x2^2 at x1 = 1 gives 1 - 2y + y^2.
        let mut terms = BTreeMap::new();
        terms.insert(vec![2, 0], bigint(1));
        terms.insert(vec![1, 1], bigint(-2));
        terms.insert(vec![0, 2], bigint(1));
        let f = SparsePoly { n: 2, terms };
        let g = f.substitute(0, &bigint(1));
        let u = g.to_unipoly(1).unwrap();
        assert_eq!(u, upoly(&[1, -2, 1]));
    }

    #[test]
    fn intervals_bound_polynomial_ranges() {
        // f = x^2 - x on [0, 1] has range [-1/4, 0].
        let mut terms = BTreeMap::new();
        terms.insert(vec![2], bigint(1));
        terms.insert(vec![1], bigint(-1));
        let f = SparsePoly { n: 1, terms };
        let hull = f.eval_interval(&[Interval::new(0.0, 1.0)]);
        assert!(hull.lo <= -0.25 && hull.hi >= 0.0);
        assert!(hull.contains_zero());
        // On [2, 3] the naive hull is [4, 9] + [-3, -2] = [1, 7]: wider than
        // the true range [2, 6] but still sign-definite.
        let tight = f.eval_interval(&[Interval::new(2.0, 3.0)]);
        assert!(!tight.contains_zero());
        assert!(tight.lo >= 0.9);
    }
}
