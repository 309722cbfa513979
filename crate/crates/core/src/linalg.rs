//! Small exact linear solvers: over ℚ, over ℤ (column Hermite form), and over 𝔽_2.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Debug, PartialEq)]
pub enum Solution<T> {
    Unique(Vec<T>),
    /// Consistent, with a particular solution and the dimension of the kernel.
    Many(Vec<T>, usize),
    Inconsistent,
}

/// Solve `A x = b` over ℚ by Gauss–Jordan elimination.
pub fn solve_rational(a: &[Vec<BigRational>], b: &[BigRational], ncols: usize) -> Solution<BigRational> {
    let m = a.len();
    let mut rows: Vec<Vec<BigRational>> = a
        .iter()
        .zip(b)
        .map(|(r, v)| {
            let mut r = r.clone();
            r.push(v.clone());
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(pr) = (r..m).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, pr);
        let inv = BigRational::one() / rows[r][c].clone();
        for v in rows[r].iter_mut() {
            *v = &*v * &inv;
        }
        for i in 0..m {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for j in c..=ncols {
                    let t = &rows[r][j] * &f;
                    rows[i][j] = &rows[i][j] - t;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m {
            break;
        }
    }
    if rows[r..].iter().any(|row| !row[ncols].is_zero()) {
        return Solution::Inconsistent;
    }
    let mut x = vec![BigRational::zero(); ncols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = rows[i][ncols].clone();
    }
    if pivots.len() == ncols {
        Solution::Unique(x)
    } else {
        Solution::Many(x, ncols - pivots.len())
    }
}

pub fn solve_rational_int(a: &[Vec<i64>], b: &[i64], ncols: usize) -> Solution<BigRational> {
    let q = |v: i64| BigRational::from_integer(BigInt::from(v));
    let a: Vec<Vec<BigRational>> = a.iter().map(|r| r.iter().map(|&v| q(v)).collect()).collect();
    let b: Vec<BigRational> = b.iter().map(|&v| q(v)).collect();
    solve_rational(&a, &b, ncols)
}

/// Some integer solution of `A x = b`, via column operations bringing `A`
/// to echelon form `A U = H` with `U` unimodular.
pub fn solve_integer(a: &[Vec<i64>], b: &[i64], ncols: usize) -> Option<Vec<BigInt>> {
    let m = a.len();
    let mut h: Vec<Vec<BigInt>> = a.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect();
    let mut u: Vec<Vec<BigInt>> =
        (0..ncols).map(|i| (0..ncols).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect();
    let col_op = |h: &mut Vec<Vec<BigInt>>, u: &mut Vec<Vec<BigInt>>, c1: usize, c2: usize, f: &BigInt| {
        // column c1 -= f * column c2
        for row in h.iter_mut() {
            let t = &row[c2] * f;
            row[c1] -= t;
        }
        for row in u.iter_mut() {
            let t = &row[c2] * f;
            row[c1] -= t;
        }
    };
    let swap = |h: &mut Vec<Vec<BigInt>>, u: &mut Vec<Vec<BigInt>>, c1: usize, c2: usize| {
        for row in h.iter_mut() {
            row.swap(c1, c2);
        }
        for row in u.iter_mut() {
            row.swap(c1, c2);
        }
    };
    let mut pivot_rows = Vec::new();
    let mut col = 0;
    for r in 0..m {
        if col == ncols {
            break;
        }
        loop {
            let nz: Vec<usize> = (col..ncols).filter(|&c| !h[r][c].is_zero()).collect();
            if nz.is_empty() {
                break;
            }
            let best = *nz.iter().min_by_key(|&&c| h[r][c].abs()).unwrap();
            swap(&mut h, &mut u, col, best);
            let mut done = true;
            for c in col + 1..ncols {
                if !h[r][c].is_zero() {
                    let f = h[r][c].div_floor(&h[r][col]);
                    col_op(&mut h, &mut u, c, col, &f);
                    if !h[r][c].is_zero() {
                        done = false;
                    }
                }
            }
            if done {
                pivot_rows.push((r, col));
                col += 1;
                break;
            }
        }
    }
    // forward substitution on the echelon form
    let mut y = vec![BigInt::zero(); ncols];
    let mut next = 0;
    for r in 0..m {
        let mut acc = BigInt::from(b[r]);
        for c in 0..next {
            acc -= &h[r][c] * &y[c];
        }
        if next < pivot_rows.len() && pivot_rows[next].0 == r {
            let p = &h[r][next];
            let (qt, rem) = acc.div_rem(p);
            if !rem.is_zero() {
                return None;
            }
            y[next] = qt;
            next += 1;
        } else if !acc.is_zero() {
            return None;
        }
    }
    let x = (0..ncols).map(|i| (0..ncols).fold(BigInt::zero(), |s, j| s + &u[i][j] * &y[j])).collect();
    Some(x)
}

/// Solve `A x = b` over 𝔽_2.
pub fn solve_f2(a: &[Vec<u8>], b: &[u8], ncols: usize) -> Option<Vec<u8>> {
    let m = a.len();
    let mut rows: Vec<Vec<u8>> = a
        .iter()
        .zip(b)
        .map(|(r, &v)| {
            let mut r: Vec<u8> = r.iter().map(|x| x & 1).collect();
            r.push(v & 1);
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(pr) = (r..m).find(|&i| rows[i][c] == 1) else { continue };
        rows.swap(r, pr);
        for i in 0..m {
            if i != r && rows[i][c] == 1 {
                for j in c..=ncols {
                    rows[i][j] ^= rows[r][j];
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m {
            break;
        }
    }
    if rows[r..].iter().any(|row| row[ncols] == 1) {
        return None;
    }
    let mut x = vec![0u8; ncols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = rows[i][ncols];
    }
    Some(x)
}

/// Integer value of a rational, if it is one.
pub fn as_integer(x: &BigRational) -> Option<BigInt> {
    x.is_integer().then(|| x.to_integer())
}
