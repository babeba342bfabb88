//! Dense linear algebra over the prime field Z_p.
//!
//! Matrices are row lists of `u64` entries reduced mod `p`. The prime is
//! assumed to be below 2^32 so that products fit in `u64`.

pub fn inv(a: u64, p: u64) -> u64 {
    pow(a % p, p - 2, p)
}

pub fn pow(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

/// Reduces `a` in place to reduced row echelon form; returns the pivot columns.
pub fn rref(a: &mut Vec<Vec<u64>>, p: u64) -> Vec<usize> {
    let cols = a.first().map_or(0, Vec::len);
    for row in a.iter_mut() {
        for x in row.iter_mut() {
            *x %= p;
        }
    }
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        if row == a.len() {
            break;
        }
        let Some(pr) = (row..a.len()).find(|&r| a[r][col] != 0) else {
            continue;
        };
        a.swap(row, pr);
        let f = inv(a[row][col], p);
        for x in a[row].iter_mut() {
            *x = *x * f % p;
        }
        for r in 0..a.len() {
            let m = a[r][col];
            if r != row && m != 0 {
                for c in 0..cols {
                    a[r][c] = (a[r][c] + p - m * a[row][c] % p) % p;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    a.truncate(row);
    pivots
}

pub fn rank(rows: &[Vec<u64>], p: u64) -> usize {
    let mut a = rows.to_vec();
    rref(&mut a, p).len()
}

/// Basis of `{x : A x = 0}` for an `m x ncols` matrix `A`.
pub fn nullspace(rows: &[Vec<u64>], ncols: usize, p: u64) -> Vec<Vec<u64>> {
    let mut a = rows.to_vec();
    let pivots = rref(&mut a, p);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![0u64; ncols];
            v[f] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = (p - a[r][f]) % p;
            }
            v
        })
        .collect()
}

/// Basis of the intersection of the row spaces of `u` and `v` (same width).
pub fn intersection(u: &[Vec<u64>], v: &[Vec<u64>], width: usize, p: u64) -> Vec<Vec<u64>> {
    if u.is_empty() || v.is_empty() {
        return Vec::new();
    }
    // Left kernel of [U; V]: columns of the transpose are the stacked rows.
    let stacked: Vec<&Vec<u64>> = u.iter().chain(v.iter()).collect();
    let transposed: Vec<Vec<u64>> = (0..width)
        .map(|c| stacked.iter().map(|r| r[c] % p).collect())
        .collect();
    let mut out: Vec<Vec<u64>> = nullspace(&transposed, stacked.len(), p)
        .into_iter()
        .map(|coef| {
            let mut w = vec![0u64; width];
            for (i, row) in u.iter().enumerate() {
                for c in 0..width {
                    w[c] = (w[c] + coef[i] * (row[c] % p)) % p;
                }
            }
            w
        })
        .collect();
    rref(&mut out, p);
    out.retain(|r| r.iter().any(|&x| x != 0));
    out
}
