//! Exact rational scalars shared by the geometry, fan, and pole layers.

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational number with 64-bit numerator and denominator.
pub type Rat = Ratio<i64>;

/// Wide rational used for intermediate linear algebra.
pub type WideRat = Ratio<i128>;

/// Arbitrary-precision rational for exact expression evaluation (bisection
/// witnesses and high-degree polynomial values overflow fixed width fast).
pub type BigRat = Ratio<BigInt>;

/// Widens a machine rational to arbitrary precision.
pub fn big(r: Rat) -> BigRat {
    Ratio::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

/// Arbitrary-precision rational from an integer.
pub fn bigint(v: i64) -> BigRat {
    BigRat::from_integer(BigInt::from(v))
}

/// Converts an arbitrary-precision rational to the nearest f64.
pub fn big_to_f64(r: &BigRat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// `b^k` by repeated squaring.
pub fn big_pow(b: &BigRat, k: u32) -> BigRat {
    let mut result = BigRat::one();
    let mut base = b.clone();
    let mut k = k;
    while k > 0 {
        if k & 1 == 1 {
            result *= &base;
        }
        base = &base * &base;
        k >>= 1;
    }
    result
}

/// Builds a rational from a numerator/denominator pair.
pub fn rat(num: i64, den: i64) -> Rat {
    Ratio::new(num, den)
}

/// Formats a rational as `p` or `p/q` (reduced, q > 0).
pub fn rat_string(r: Rat) -> String {
    if r.denom() == &1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `p` or `p/q` with optional sign on the numerator.
pub fn parse_rat(text: &str) -> Option<Rat> {
    let text = text.trim();
    match text.split_once('/') {
        None => text.parse::<i64>().ok().map(Rat::from_integer),
        Some((num, den)) => {
            let num = num.trim().parse::<i64>().ok()?;
            let den = den.trim().parse::<i64>().ok()?;
            if den == 0 {
                None
            } else {
                Some(Ratio::new(num, den))
            }
        }
    }
}

/// Converts a rational to the nearest f64.
pub fn rat_to_f64(r: Rat) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// True when the rational is a nonnegative integer.
pub fn is_nonneg_integer(r: Rat) -> bool {
    r.denom() == &1 && !r.is_negative()
}

/// True when the rational is a positive integer.
pub fn is_positive_integer(r: Rat) -> bool {
    r.denom() == &1 && r.numer() > &0
}

/// Narrows a wide rational to `Rat` when it fits.
pub fn try_narrow(r: &WideRat) -> Option<Rat> {
    let num = i64::try_from(*r.numer()).ok()?;
    let den = i64::try_from(*r.denom()).ok()?;
    Some(Ratio::new(num, den))
}

/// Narrows a wide rational to `Rat`, panicking on overflow (desk-scale inputs
/// keep every intermediate far below 2^63).
pub fn narrow(r: WideRat) -> Rat {
    let num = i64::try_from(*r.numer()).expect("rational numerator exceeds i64");
    let den = i64::try_from(*r.denom()).expect("rational denominator exceeds i64");
    Ratio::new(num, den)
}

/// Exact rank of a rational matrix by Gaussian elimination.
pub fn rank(rows: &[Vec<WideRat>]) -> usize {
    let mut m: Vec<Vec<WideRat>> = rows.to_vec();
    let ncols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pivot) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pivot);
        let inv = m[rank][col];
        for r in 0..m.len() {
            if r != rank && !m[r][col].is_zero() {
                let factor = m[r][col] / inv;
                for c in col..ncols {
                    let sub = factor * m[rank][c];
                    m[r][c] -= sub;
                }
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

/// Exact rank of an integer matrix.
pub fn rank_int(rows: &[Vec<i64>]) -> usize {
    let wide: Vec<Vec<WideRat>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| WideRat::from_integer(x as i128)).collect())
        .collect();
    rank(&wide)
}

/// Exact determinant of a square integer matrix (Bareiss fraction-free
/// elimination over i128).
pub fn det_int(m: &[Vec<i64>]) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut a: Vec<Vec<i128>> = m
        .iter()
        .map(|row| row.iter().map(|&x| x as i128).collect())
        .collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            let Some(p) = (k + 1..n).find(|&r| a[r][k] != 0) else {
                return 0;
            };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
            a[i][k] = 0;
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

/// A nonzero kernel vector of the (not necessarily square) system given by
/// `rows`, or `None` when the kernel is trivial.
pub fn kernel_vector(rows: &[Vec<WideRat>], ncols: usize) -> Option<Vec<WideRat>> {
    let mut m: Vec<Vec<WideRat>> = rows.to_vec();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pivot) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pivot);
        let inv = m[rank][col];
        for c in col..ncols {
            m[rank][c] /= inv;
        }
        for r in 0..m.len() {
            if r != rank && !m[r][col].is_zero() {
                let factor = m[r][col];
                for c in col..ncols {
                    let sub = factor * m[rank][c];
                    m[r][c] -= sub;
                }
            }
        }
        pivots.push((rank, col));
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
    let free = (0..ncols).find(|c| !pivot_cols.contains(c))?;
    let mut v = vec![WideRat::from_integer(0); ncols];
    v[free] = WideRat::from_integer(1);
    for &(r, c) in &pivots {
        v[c] = -m[r][free];
    }
    Some(v)
}

/// Solves the square system `A x = b` exactly; `None` when singular.
pub fn solve(a: &[Vec<WideRat>], b: &[WideRat]) -> Option<Vec<WideRat>> {
    let n = a.len();
    let mut m: Vec<Vec<WideRat>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(*rhs);
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot);
        let inv = m[col][col];
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let factor = m[r][col] / inv;
                for c in col..=n {
                    let sub = factor * m[col][c];
                    m[r][c] -= sub;
                }
            }
        }
    }
    Some((0..n).map(|r| m[r][n] / m[r][r]).collect())
}

/// Solves `A x = b` for an integer square matrix, returning exact rationals.
pub fn solve_int(a: &[Vec<i64>], b: &[i64]) -> Option<Vec<WideRat>> {
    let aw: Vec<Vec<WideRat>> = a
        .iter()
        .map(|row| row.iter().map(|&x| WideRat::from_integer(x as i128)).collect())
        .collect();
    let bw: Vec<WideRat> = b.iter().map(|&x| WideRat::from_integer(x as i128)).collect();
    solve(&aw, &bw)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for text in ["3", "-4", "5/6", "-7/3", "0"] {
            let r = parse_rat(text).unwrap();
            assert_eq!(rat_string(r), text);
        }
        assert!(parse_rat("1/0").is_none());
        assert!(parse_rat("x").is_none());
    }

    #[test]
    fn rank_of_singular_matrix() {
        let rows = vec![vec![1, 2, 3], vec![2, 4, 6], vec![0, 1, 1]];
        assert_eq!(rank_int(&rows), 2);
    }

    #[test]
    fn solve_small_system() {
        let a = vec![vec![2, 1], vec![1, 3]];
        let x = solve_int(&a, &[5, 10]).unwrap();
        assert_eq!(x[0], WideRat::new(1, 1));
        assert_eq!(x[1], WideRat::new(3, 1));
    }
}
