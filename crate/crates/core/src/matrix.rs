//! Exact integer and rational matrix primitives.
//!
//! Everything here works over arbitrary-precision integers (`BigInt`) or
//! rationals (`BigRational`); there is no floating point in this crate.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rat = BigRational;

/// Dense integer matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMat {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMat {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c));
        IntMat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows)
                .all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Multiply by a rational vector whose image must be integral; used to
    /// map solved coordinates back to lattice evaluations.
    pub fn mul_vec_rat(&self, v: &[Rat]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let s: Rat = self
                    .row(i)
                    .iter()
                    .zip(v)
                    .map(|(a, b)| Rat::from(a.clone()) * b)
                    .sum();
                assert!(s.is_integer());
                s.to_integer()
            })
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            let (x, y) = (self[(a, j)].clone(), self[(b, j)].clone());
            self[(a, j)] = y;
            self[(b, j)] = x;
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            let (x, y) = (self[(i, a)].clone(), self[(i, b)].clone());
            self[(i, a)] = y;
            self[(i, b)] = x;
        }
    }

    /// row[a] -= q * row[b]
    fn row_sub(&mut self, a: usize, b: usize, q: &BigInt) {
        for j in 0..self.cols {
            let t = &self[(b, j)] * q;
            self[(a, j)] -= t;
        }
    }

    /// col[a] -= q * col[b]
    fn col_sub(&mut self, a: usize, b: usize, q: &BigInt) {
        for i in 0..self.rows {
            let t = &self[(i, b)] * q;
            self[(i, a)] -= t;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let t = -self[(i, j)].clone();
            self[(i, j)] = t;
        }
    }

    fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let t = -self[(i, j)].clone();
            self[(i, j)] = t;
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMat {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

/// Determinant by fraction-free Bareiss elimination with row pivoting.
pub fn det_bareiss(m: &IntMat) -> BigInt {
    assert_eq!(m.rows, m.cols);
    let n = m.rows;
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.clone();
    let mut sign = 1i32;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[(k, k)].is_zero() {
            match (k + 1..n).find(|&r| !a[(r, k)].is_zero()) {
                Some(r) => {
                    a.swap_rows(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &a[(k, k)] * &a[(i, j)] - &a[(i, k)] * &a[(k, j)];
                let (q, r) = num.div_rem(&prev);
                debug_assert!(r.is_zero());
                a[(i, j)] = q;
            }
            a[(i, k)] = BigInt::zero();
        }
        prev = a[(k, k)].clone();
    }
    let d = a[(n - 1, n - 1)].clone();
    if sign < 0 {
        -d
    } else {
        d
    }
}

/// Leading principal minors det(A[..k, ..k]) for k = 1..=n, via Bareiss
/// without pivoting. Stops early at the first zero minor (the remaining
/// entries are returned as zero); callers deciding definiteness only need
/// the prefix up to the first zero.
pub fn leading_principal_minors(m: &IntMat) -> Vec<BigInt> {
    assert_eq!(m.rows, m.cols);
    let n = m.rows;
    let mut minors = vec![BigInt::zero(); n];
    if n == 0 {
        return minors;
    }
    let mut a = m.clone();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[(k, k)].is_zero() {
            // minor k+1 is zero; later minors are unreliable without
            // pivoting, which callers of this function never need.
            return minors;
        }
        minors[k] = a[(k, k)].clone();
        if k + 1 == n {
            break;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &a[(k, k)] * &a[(i, j)] - &a[(i, k)] * &a[(k, j)];
                let (q, r) = num.div_rem(&prev);
                debug_assert!(r.is_zero());
                a[(i, j)] = q;
            }
            a[(i, k)] = BigInt::zero();
        }
        prev = a[(k, k)].clone();
    }
    minors
}

/// Signature (n+, n-, n0) of a symmetric integer matrix, by exact rational
/// LDL^T elimination with symmetric pivoting. When every remaining diagonal
/// entry vanishes but the block is nonzero, a 2x2 off-diagonal pivot
/// contributes one positive and one negative inertia count.
pub fn ldlt_signature(m: &IntMat) -> (usize, usize, usize) {
    assert!(m.is_symmetric());
    let n = m.rows;
    let mut a: Vec<Vec<Rat>> = (0..n)
        .map(|i| (0..n).map(|j| Rat::from(m[(i, j)].clone())).collect())
        .collect();
    let mut active: Vec<usize> = (0..n).collect();
    let (mut pos, mut neg, mut zero) = (0usize, 0usize, 0usize);
    while !active.is_empty() {
        // prefer the largest-magnitude diagonal pivot among active rows
        let diag = active
            .iter()
            .copied()
            .filter(|&k| !a[k][k].is_zero())
            .max_by(|&x, &y| a[x][x].abs().cmp(&a[y][y].abs()));
        if let Some(k) = diag {
            if a[k][k].is_positive() {
                pos += 1;
            } else {
                neg += 1;
            }
            let rest: Vec<usize> = active.iter().copied().filter(|&i| i != k).collect();
            for &i in &rest {
                for &j in &rest {
                    let t = &a[i][k] * &a[k][j] / &a[k][k];
                    a[i][j] -= t;
                }
            }
            active = rest;
            continue;
        }
        // all active diagonals are zero; look for an off-diagonal entry
        let mut off = None;
        'scan: for (s, &i) in active.iter().enumerate() {
            for &j in &active[s + 1..] {
                if !a[i][j].is_zero() {
                    off = Some((i, j));
                    break 'scan;
                }
            }
        }
        match off {
            Some((pi, pj)) => {
                pos += 1;
                neg += 1;
                let piv = a[pi][pj].clone();
                let rest: Vec<usize> = active
                    .iter()
                    .copied()
                    .filter(|&i| i != pi && i != pj)
                    .collect();
                for &r in &rest {
                    for &s in &rest {
                        let t = (&a[r][pi] * &a[pj][s] + &a[r][pj] * &a[pi][s]) / &piv;
                        a[r][s] -= t;
                    }
                }
                active = rest;
            }
            None => {
                zero += active.len();
                break;
            }
        }
    }
    (pos, neg, zero)
}

/// Smith normal form D = U * A * V with unimodular transforms.
#[derive(Debug, Clone)]
pub struct Snf {
    /// Diagonal entries of D, nonnegative, each dividing the next; zeros
    /// (if any) come last.
    pub diag: Vec<BigInt>,
    pub u: IntMat,
    pub v: IntMat,
    pub rank: usize,
}

pub fn smith_normal_form(m: &IntMat) -> Snf {
    let (rows, cols) = (m.rows, m.cols);
    let mut a = m.clone();
    let mut u = IntMat::identity(rows);
    let mut v = IntMat::identity(cols);
    let bound = rows.min(cols);
    let mut t = 0;
    while t < bound {
        // smallest-magnitude nonzero pivot in the remaining block
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !a[(i, j)].is_zero()
                    && pivot
                        .map(|(pi, pj)| a[(i, j)].abs() < a[(pi, pj)].abs())
                        .unwrap_or(true)
                {
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        a.swap_rows(t, pi);
        u.swap_rows(t, pi);
        a.swap_cols(t, pj);
        v.swap_cols(t, pj);
        loop {
            let mut clean = true;
            for i in t + 1..rows {
                if a[(i, t)].is_zero() {
                    continue;
                }
                let q = div_round(&a[(i, t)], &a[(t, t)]);
                a.row_sub(i, t, &q);
                u.row_sub(i, t, &q);
                if !a[(i, t)].is_zero() {
                    a.swap_rows(t, i);
                    u.swap_rows(t, i);
                    clean = false;
                }
            }
            for j in t + 1..cols {
                if a[(t, j)].is_zero() {
                    continue;
                }
                let q = div_round(&a[(t, j)], &a[(t, t)]);
                a.col_sub(j, t, &q);
                v.col_sub(j, t, &q);
                if !a[(t, j)].is_zero() {
                    a.swap_cols(t, j);
                    v.swap_cols(t, j);
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // pivot must divide every entry of the trailing block
            let mut offender = None;
            'find: for i in t + 1..rows {
                for j in t + 1..cols {
                    if !a[(i, j)].mod_floor(&a[(t, t)]).is_zero() {
                        offender = Some(i);
                        break 'find;
                    }
                }
            }
            match offender {
                Some(i) => {
                    // fold the offending row into row t and restart
                    let one = BigInt::one();
                    a.row_sub(t, i, &-&one);
                    u.row_sub(t, i, &-&one);
                }
                None => break,
            }
        }
        t += 1;
    }
    let mut diag: Vec<BigInt> = (0..bound).map(|i| a[(i, i)].clone()).collect();
    for (i, d) in diag.iter_mut().enumerate() {
        if d.is_negative() {
            *d = -d.clone();
            a.negate_row(i);
            u.negate_row(i);
        }
    }
    let rank = diag.iter().take_while(|d| !d.is_zero()).count();
    Snf { diag, u, v, rank }
}

/// Round-to-nearest integer division, for size control during reductions.
fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_rem(b);
    if &r.abs() * 2 > b.abs() {
        if (r.is_negative()) == (b.is_negative()) {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}

/// Solve A x = b over the integers via Smith normal form; `None` when no
/// integral solution exists.
pub fn solve_integer(snf: &Snf, b: &[BigInt]) -> Option<Vec<BigInt>> {
    let y = snf.u.mul_vec(b);
    let mut w = vec![BigInt::zero(); snf.v.cols()];
    for (i, yi) in y.iter().enumerate() {
        if i < snf.diag.len() && !snf.diag[i].is_zero() {
            let (q, r) = yi.div_rem(&snf.diag[i]);
            if !r.is_zero() {
                return None;
            }
            w[i] = q;
        } else if !yi.is_zero() {
            return None;
        }
    }
    Some(snf.v.mul_vec(&w))
}

/// Solve A x = b exactly over the rationals (A square nonsingular).
/// Returns `None` when A is singular.
pub fn solve_rational(m: &IntMat, b: &[BigInt]) -> Option<Vec<Rat>> {
    assert_eq!(m.rows, m.cols);
    assert_eq!(b.len(), m.rows);
    let n = m.rows;
    let mut a: Vec<Vec<Rat>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| Rat::from(m[(i, j)].clone()))
                .chain(std::iter::once(Rat::from(b[i].clone())))
                .collect()
        })
        .collect();
    for k in 0..n {
        let piv = (k..n).find(|&r| !a[r][k].is_zero())?;
        a.swap(k, piv);
        for i in 0..n {
            if i == k || a[i][k].is_zero() {
                continue;
            }
            let f = &a[i][k] / &a[k][k];
            for j in k..=n {
                let t = &f * &a[k][j];
                a[i][j] -= t;
            }
        }
    }
    Some((0..n).map(|i| &a[i][n] / &a[i][i]).collect())
}

/// Column-style Hermite normal form of a nonsingular square matrix: returns
/// a lower-triangular basis H of the column lattice of A, with positive
/// diagonal and 0 <= H[i][j] < H[i][i] for j < i.
pub fn hnf_lower(m: &IntMat) -> IntMat {
    assert_eq!(m.rows, m.cols);
    let n = m.rows;
    let mut h = m.clone();
    for i in 0..n {
        let piv = (i..n)
            .find(|&c| !h[(i, c)].is_zero())
            .expect("hnf_lower requires a nonsingular matrix");
        h.swap_cols(i, piv);
        for c in i + 1..n {
            while !h[(i, c)].is_zero() {
                let q = h[(i, c)].div_floor(&h[(i, i)]);
                h.col_sub(c, i, &q);
                if !h[(i, c)].is_zero() {
                    h.swap_cols(i, c);
                }
            }
        }
        if h[(i, i)].is_negative() {
            h.negate_col(i);
        }
        for c in 0..i {
            let q = h[(i, c)].div_floor(&h[(i, i)]);
            if !q.is_zero() {
                h.col_sub(c, i, &q);
            }
        }
    }
    h
}

/// Canonical residue of z modulo the column lattice of a lower-triangular
/// HNF basis: the unique coset member with 0 <= r[i] < H[i][i].
pub fn hnf_residue(h: &IntMat, z: &[BigInt]) -> Vec<BigInt> {
    let n = h.rows();
    assert_eq!(z.len(), n);
    let mut r = z.to_vec();
    for i in 0..n {
        let q = r[i].div_floor(&h[(i, i)]);
        if q.is_zero() {
            continue;
        }
        for k in i..n {
            let t = &h[(k, i)] * &q;
            r[k] -= t;
        }
    }
    r
}

/// LDL^T decomposition of a positive definite symmetric matrix: returns
/// (L, D) with L unit lower triangular and D the positive pivot diagonal.
/// `None` when the matrix is not positive definite.
pub fn ldlt_posdef(m: &IntMat) -> Option<(Vec<Vec<Rat>>, Vec<Rat>)> {
    assert!(m.is_symmetric());
    let n = m.rows;
    let mut l = vec![vec![Rat::zero(); n]; n];
    let mut d = vec![Rat::zero(); n];
    for j in 0..n {
        let mut dj = Rat::from(m[(j, j)].clone());
        for k in 0..j {
            dj -= &l[j][k] * &l[j][k] * &d[k];
        }
        if !dj.is_positive() {
            return None;
        }
        d[j] = dj;
        l[j][j] = Rat::one();
        for i in j + 1..n {
            let mut s = Rat::from(m[(i, j)].clone());
            for k in 0..j {
                s -= &l[i][k] * &l[j][k] * &d[k];
            }
            l[i][j] = s / &d[j];
        }
    }
    Some((l, d))
}

/// Floor of the square root of a nonnegative rational: the largest
/// nonnegative integer s with s^2 <= x.
pub fn sqrt_floor_rat(x: &Rat) -> BigInt {
    assert!(!x.is_negative());
    let p = x.numer();
    let q = x.denom();
    let mut s = (p * q).sqrt() / q; // first guess, corrected exactly below
    while (&s + 1) * (&s + 1) * q <= *p {
        s += 1;
    }
    while !s.is_zero() && &s * &s * q > *p {
        s -= 1;
    }
    s
}
