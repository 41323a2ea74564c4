//! Dense arbitrary-precision matrices, Smith normal form, and sparse integer matrices.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<BigInt>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self[(r, c)].to_string()).collect();
            writeln!(f, "  [{}]", row.join(" "))?;
        }
        Ok(())
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = BigInt;
    fn index(&self, (r, c): (usize, usize)) -> &BigInt {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut BigInt {
        &mut self.data[r * self.cols + c]
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_i64(rows: usize, cols: usize, entries: &[i64]) -> Self {
        assert_eq!(entries.len(), rows * cols);
        Matrix { rows, cols, data: entries.iter().map(|x| BigInt::from(*x)).collect() }
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Self {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn column(&self, c: usize) -> Vec<BigInt> {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn row(&self, r: usize) -> Vec<BigInt> {
        self.data[r * self.cols..(r + 1) * self.cols].to_vec()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(r, k)];
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = &other[(k, c)];
                    if !b.is_zero() {
                        out[(r, c)] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|r| {
                let mut s = BigInt::zero();
                for c in 0..self.cols {
                    if !v[c].is_zero() && !self[(r, c)].is_zero() {
                        s += &self[(r, c)] * &v[c];
                    }
                }
                s
            })
            .collect()
    }

    pub fn scale(&self, k: i64) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * k).collect() }
    }

    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Matrix {
        let mut out = Matrix::zeros(rows.len(), cols.len());
        for (i, r) in rows.clone().enumerate() {
            for (j, c) in cols.clone().enumerate() {
                out[(i, j)] = self[(r, c)].clone();
            }
        }
        out
    }

    /// Determinant by fraction-free elimination (Bareiss).
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[(k, k)].is_zero() {
                let Some(p) = (k + 1..n).find(|&r| !a[(r, k)].is_zero()) else {
                    return BigInt::zero();
                };
                a.swap_rows(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)]) / &prev;
                    a[(i, j)] = v;
                }
            }
            prev = a[(k, k)].clone();
        }
        sign * a[(n - 1, n - 1)].clone()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + a, r * self.cols + b);
        }
    }

    /// row[dst] += k * row[src]
    fn add_row(&mut self, dst: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for c in 0..self.cols {
            let v = &self.data[src * self.cols + c];
            if !v.is_zero() {
                let add = k * v;
                self.data[dst * self.cols + c] += add;
            }
        }
    }

    /// col[dst] += k * col[src]
    fn add_col(&mut self, dst: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for r in 0..self.rows {
            let v = &self.data[r * self.cols + src];
            if !v.is_zero() {
                let add = k * v;
                self.data[r * self.cols + dst] += add;
            }
        }
    }

    fn negate_row(&mut self, r: usize) {
        for c in 0..self.cols {
            let v = std::mem::take(&mut self.data[r * self.cols + c]);
            self.data[r * self.cols + c] = -v;
        }
    }

    fn negate_col(&mut self, c: usize) {
        for r in 0..self.rows {
            let v = std::mem::take(&mut self.data[r * self.cols + c]);
            self.data[r * self.cols + c] = -v;
        }
    }
}

/// `D = U·A·V` with `U`, `V` unimodular and `d_1 | d_2 | …` on the diagonal.
#[derive(Clone, Debug)]
pub struct Snf {
    pub u: Matrix,
    pub u_inv: Matrix,
    pub v: Matrix,
    pub v_inv: Matrix,
    pub d: Matrix,
    /// Nonzero invariant factors, positive.
    pub factors: Vec<BigInt>,
}

impl Snf {
    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    /// Exact certificate: product identity, inverse pairs, diagonal shape and divisibility.
    pub fn verify(&self, a: &Matrix) -> bool {
        let prod = self.u.mul(a).mul(&self.v);
        if prod != self.d {
            return false;
        }
        if self.u.mul(&self.u_inv) != Matrix::identity(self.u.rows)
            || self.v.mul(&self.v_inv) != Matrix::identity(self.v.rows)
        {
            return false;
        }
        for r in 0..self.d.rows {
            for c in 0..self.d.cols {
                let want_zero = r != c || r >= self.factors.len();
                if want_zero != self.d[(r, c)].is_zero() {
                    return false;
                }
            }
        }
        self.factors.windows(2).all(|w| (&w[1] % &w[0]).is_zero()) && self.factors.iter().all(|f| f.is_positive())
    }
}

/// Smith normal form with deterministic pivoting: smallest nonzero magnitude,
/// ties broken by (row, column).
pub fn smith_normal_form(a: &Matrix) -> Snf {
    let (m, n) = (a.rows, a.cols);
    let mut d = a.clone();
    let mut u = Matrix::identity(m);
    let mut u_inv = Matrix::identity(m);
    let mut v = Matrix::identity(n);
    let mut v_inv = Matrix::identity(n);
    let mut factors = Vec::new();

    // row[dst] += k row[src] on D and U; inverse: col[src] -= k col[dst] on U⁻¹
    let row_add = |d: &mut Matrix, u: &mut Matrix, u_inv: &mut Matrix, dst: usize, src: usize, k: &BigInt| {
        d.add_row(dst, src, k);
        u.add_row(dst, src, k);
        u_inv.add_col(src, dst, &-k);
    };
    let col_add = |d: &mut Matrix, v: &mut Matrix, v_inv: &mut Matrix, dst: usize, src: usize, k: &BigInt| {
        d.add_col(dst, src, k);
        v.add_col(dst, src, k);
        v_inv.add_row(src, dst, &-k);
    };

    let mut t = 0;
    while t < m.min(n) {
        // pivot search
        let mut best: Option<(usize, usize)> = None;
        for r in t..m {
            for c in t..n {
                let x = &d[(r, c)];
                if x.is_zero() {
                    continue;
                }
                match best {
                    None => best = Some((r, c)),
                    Some((br, bc)) => {
                        if x.magnitude() < d[(br, bc)].magnitude() {
                            best = Some((r, c));
                        }
                    }
                }
            }
        }
        let Some((pr, pc)) = best else { break };
        d.swap_rows(t, pr);
        u.swap_rows(t, pr);
        u_inv.swap_cols(t, pr);
        d.swap_cols(t, pc);
        v.swap_cols(t, pc);
        v_inv.swap_rows(t, pc);
        loop {
            let mut changed = false;
            // clear column t
            for r in t + 1..m {
                if d[(r, t)].is_zero() {
                    continue;
                }
                let q = d[(r, t)].div_floor(&d[(t, t)]);
                row_add(&mut d, &mut u, &mut u_inv, r, t, &-q);
                if !d[(r, t)].is_zero() {
                    // remainder smaller than pivot: swap it in
                    d.swap_rows(t, r);
                    u.swap_rows(t, r);
                    u_inv.swap_cols(t, r);
                    changed = true;
                }
            }
            // clear row t
            for c in t + 1..n {
                if d[(t, c)].is_zero() {
                    continue;
                }
                let q = d[(t, c)].div_floor(&d[(t, t)]);
                col_add(&mut d, &mut v, &mut v_inv, c, t, &-q);
                if !d[(t, c)].is_zero() {
                    d.swap_cols(t, c);
                    v.swap_cols(t, c);
                    v_inv.swap_rows(t, c);
                    changed = true;
                }
            }
            if changed {
                continue;
            }
            // divisibility of the rest
            let mut fix = None;
            'outer: for r in t + 1..m {
                for c in t + 1..n {
                    if !(&d[(r, c)] % &d[(t, t)]).is_zero() {
                        fix = Some(r);
                        break 'outer;
                    }
                }
            }
            match fix {
                Some(r) => {
                    row_add(&mut d, &mut u, &mut u_inv, t, r, &BigInt::one());
                }
                None => break,
            }
        }
        if d[(t, t)].is_negative() {
            d.negate_row(t);
            u.negate_row(t);
            u_inv.negate_col(t);
        }
        factors.push(d[(t, t)].clone());
        t += 1;
    }
    Snf { u, u_inv, v, v_inv, d, factors }
}

/// Integer solution of `A x = b`, if any.
pub fn solve_dense(a: &Matrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    let snf = smith_normal_form(a);
    let ub = snf.u.mul_vec(b);
    let mut y = vec![BigInt::zero(); a.cols];
    for (i, ubi) in ub.iter().enumerate() {
        if i < snf.factors.len() {
            let (q, r) = ubi.div_rem(&snf.factors[i]);
            if !r.is_zero() {
                return None;
            }
            y[i] = q;
        } else if !ubi.is_zero() {
            return None;
        }
    }
    Some(snf.v.mul_vec(&y))
}

/// Column-sparse integer matrix.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SparseMatrix {
    pub rows: usize,
    pub cols: usize,
    pub columns: Vec<Vec<(usize, i64)>>,
}

impl SparseMatrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, cols, columns: vec![Vec::new(); cols] }
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut out = SparseMatrix::new(self.cols, self.rows);
        for (c, col) in self.columns.iter().enumerate() {
            for &(r, v) in col {
                out.columns[r].push((c, v));
            }
        }
        out
    }

    pub fn to_dense(&self) -> Matrix {
        let mut m = Matrix::zeros(self.rows, self.cols);
        for (c, col) in self.columns.iter().enumerate() {
            for &(r, v) in col {
                m[(r, c)] += v;
            }
        }
        m
    }

    pub fn mul_sparse_vec(&self, x: &[(usize, i64)]) -> Vec<(usize, i64)> {
        let mut acc: HashMap<usize, i64> = HashMap::new();
        for &(c, a) in x {
            for &(r, v) in &self.columns[c] {
                *acc.entry(r).or_insert(0) += a * v;
            }
        }
        let mut out: Vec<(usize, i64)> = acc.into_iter().filter(|(_, v)| *v != 0).collect();
        out.sort_unstable();
        out
    }

    pub fn mul(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.cols, other.rows);
        SparseMatrix {
            rows: self.rows,
            cols: other.cols,
            columns: other.columns.iter().map(|c| self.mul_sparse_vec(c)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(|c| c.iter().all(|(_, v)| *v == 0))
    }
}

/// Solve `A x = y` over the integers by Gauss-Jordan elimination on unit
/// pivots, falling back to Smith normal form on the block that has none.
pub fn solve_sparse(a: &SparseMatrix, y: &[(usize, i64)]) -> Result<Option<Vec<(usize, i64)>>> {
    // row-major working copy
    let mut rows: Vec<HashMap<usize, i64>> = vec![HashMap::new(); a.rows];
    let mut col_rows: Vec<std::collections::BTreeSet<usize>> = vec![Default::default(); a.cols];
    for (c, col) in a.columns.iter().enumerate() {
        for &(r, v) in col {
            if v != 0 {
                *rows[r].entry(c).or_insert(0) += v;
                col_rows[c].insert(r);
            }
        }
    }
    let mut rhs: Vec<i64> = vec![0; a.rows];
    for &(r, v) in y {
        rhs[r] += v;
    }
    let mut pivot_of_row: Vec<Option<usize>> = vec![None; a.rows];
    let mut pivoted_col = vec![false; a.cols];
    let mut progress = true;
    while progress {
        progress = false;
        for c in 0..a.cols {
            if pivoted_col[c] {
                continue;
            }
            // unit entry in an unpivoted row with fewest entries
            let mut best: Option<(usize, usize)> = None;
            for &r in &col_rows[c] {
                if pivot_of_row[r].is_some() {
                    continue;
                }
                let v = rows[r][&c];
                if v.abs() == 1 {
                    let len = rows[r].len();
                    if best.map(|(_, l)| len < l).unwrap_or(true) {
                        best = Some((r, len));
                    }
                }
            }
            let Some((r, _)) = best else { continue };
            let u = rows[r][&c];
            let prow: Vec<(usize, i64)> = rows[r].iter().map(|(k, v)| (*k, *v)).collect();
            let targets: Vec<usize> = col_rows[c].iter().copied().filter(|&x| x != r).collect();
            for t in targets {
                let f = rows[t][&c] * u; // rows[t] -= f * prow
                for &(k, v) in &prow {
                    let e = rows[t].entry(k).or_insert(0);
                    *e = e.checked_sub(f.checked_mul(v).ok_or(Error::Overflow)?).ok_or(Error::Overflow)?;
                    if *e == 0 {
                        rows[t].remove(&k);
                        col_rows[k].remove(&t);
                    } else {
                        col_rows[k].insert(t);
                    }
                }
                rhs[t] = rhs[t].checked_sub(f.checked_mul(rhs[r]).ok_or(Error::Overflow)?).ok_or(Error::Overflow)?;
            }
            pivot_of_row[r] = Some(c);
            pivoted_col[c] = true;
            progress = true;
        }
    }
    // leftover block
    let free_rows: Vec<usize> = (0..a.rows).filter(|&r| pivot_of_row[r].is_none()).collect();
    let free_cols: Vec<usize> = (0..a.cols).filter(|&c| !pivoted_col[c]).collect();
    let mut x: HashMap<usize, BigInt> = HashMap::new();
    let any_block = free_rows.iter().any(|&r| !rows[r].is_empty());
    if any_block {
        let col_pos: HashMap<usize, usize> = free_cols.iter().enumerate().map(|(i, c)| (*c, i)).collect();
        let mut m = Matrix::zeros(free_rows.len(), free_cols.len());
        let mut b = vec![BigInt::zero(); free_rows.len()];
        for (i, &r) in free_rows.iter().enumerate() {
            for (&c, &v) in &rows[r] {
                m[(i, col_pos[&c])] = BigInt::from(v);
            }
            b[i] = BigInt::from(rhs[r]);
        }
        let Some(sol) = solve_dense(&m, &b) else { return Ok(None) };
        for (i, v) in sol.into_iter().enumerate() {
            if !v.is_zero() {
                x.insert(free_cols[i], v);
            }
        }
    } else if free_rows.iter().any(|&r| rhs[r] != 0) {
        return Ok(None);
    }
    for r in 0..a.rows {
        let Some(c) = pivot_of_row[r] else { continue };
        let u = rows[r][&c];
        let mut s = BigInt::from(rhs[r]);
        for (&k, &v) in &rows[r] {
            if k != c {
                if let Some(xv) = x.get(&k) {
                    s -= xv * v;
                }
            }
        }
        let val = s * u;
        if !val.is_zero() {
            x.insert(c, val);
        }
    }
    let mut out = Vec::with_capacity(x.len());
    for (k, v) in x {
        out.push((k, v.to_i64().ok_or(Error::Overflow)?));
    }
    out.sort_unstable();
    Ok(Some(out))
}
