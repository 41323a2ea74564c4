//! Homology of a free chain complex in one degree.
//!
//! The complex around the degree is first shrunk by eliminating unit entries
//! of the incoming and outgoing boundary matrices (each elimination is a chain
//! homotopy equivalence whose projection and inclusion are recorded), and the
//! remaining small block is diagonalized with Smith normal form.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::matrix::{smith_normal_form, Matrix, SparseMatrix};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
enum Step {
    /// Generator `a` paired with a lower cell through the unit `u`; `row`
    /// holds the lower cell's row over the other surviving generators.
    Lower { a: usize, u: i64, row: Vec<(usize, i64)> },
    /// Generator `a` paired with an upper cell whose boundary was `col`.
    Upper { a: usize, u: i64, col: Vec<(usize, i64)> },
}

/// `H = ker(out) / im(inc)` for `inc: C_{k+1} → C_k`, `out: C_k → C_{k-1}`.
#[derive(Clone, Debug)]
pub struct Homology {
    pub rank_ambient: usize,
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
    /// Representative cycles in ambient coordinates: torsion generators first.
    pub basis: Vec<Vec<(usize, i64)>>,
    out: Arc<SparseMatrix>,
    steps: Vec<Step>,
    remaining: Vec<usize>,
    kernel_offset: usize,
    v_inv: Matrix,
    u2: Matrix,
    factors2: Vec<BigInt>,
}

impl Homology {
    pub fn compute(inc: &SparseMatrix, out: Arc<SparseMatrix>) -> Result<Self> {
        let n = out.cols;
        assert_eq!(inc.rows, n, "incoming matrix must land in the middle degree");
        let mut out_cols: Vec<HashMap<usize, i64>> = vec![HashMap::new(); n];
        let mut out_rows: Vec<HashMap<usize, i64>> = vec![HashMap::new(); out.rows];
        for (c, col) in out.columns.iter().enumerate() {
            for &(r, v) in col {
                if v != 0 {
                    *out_cols[c].entry(r).or_insert(0) += v;
                    *out_rows[r].entry(c).or_insert(0) += v;
                }
            }
        }
        let mut inc_cols: Vec<HashMap<usize, i64>> = vec![HashMap::new(); inc.cols];
        let mut inc_rows: Vec<HashMap<usize, i64>> = vec![HashMap::new(); n];
        for (c, col) in inc.columns.iter().enumerate() {
            for &(r, v) in col {
                if v != 0 {
                    *inc_cols[c].entry(r).or_insert(0) += v;
                    *inc_rows[r].entry(c).or_insert(0) += v;
                }
            }
        }
        let mut alive = vec![true; n];
        let mut steps = Vec::new();
        let mut overflow = false;

        'passes: loop {
            let mut progress = false;
            // Upper eliminations: unit entry inc[a, b].
            for b in 0..inc_cols.len() {
                if inc_cols[b].is_empty() {
                    continue;
                }
                let mut best: Option<(usize, usize)> = None;
                for (&a, &v) in &inc_cols[b] {
                    if v.abs() == 1 {
                        let key = (inc_rows[a].len(), a);
                        if best.map(|bk| key < bk).unwrap_or(true) {
                            best = Some(key);
                        }
                    }
                }
                let Some((_, a)) = best else { continue };
                let u = inc_cols[b][&a];
                let col_b: Vec<(usize, i64)> = sorted(&inc_cols[b]);
                let others: Vec<(usize, i64)> =
                    inc_rows[a].iter().filter(|(y, _)| **y != b).map(|(y, v)| (*y, *v)).collect();
                // precompute updates
                let mut updates: Vec<(usize, Vec<(usize, i64)>)> = Vec::with_capacity(others.len());
                for &(y, v) in &others {
                    let f = v * u;
                    let mut upd = Vec::with_capacity(col_b.len());
                    for &(r, w) in &col_b {
                        let cur = inc_cols[y].get(&r).copied().unwrap_or(0);
                        let Some(nv) = f.checked_mul(w).and_then(|p| cur.checked_sub(p)) else {
                            overflow = true;
                            break 'passes;
                        };
                        upd.push((r, nv));
                    }
                    updates.push((y, upd));
                }
                for (y, upd) in updates {
                    for (r, nv) in upd {
                        if nv == 0 {
                            inc_cols[y].remove(&r);
                            inc_rows[r].remove(&y);
                        } else {
                            inc_cols[y].insert(r, nv);
                            inc_rows[r].insert(y, nv);
                        }
                    }
                }
                // drop column b and row a
                for (r, _) in std::mem::take(&mut inc_cols[b]) {
                    inc_rows[r].remove(&b);
                }
                for (y, _) in std::mem::take(&mut inc_rows[a]) {
                    inc_cols[y].remove(&a);
                }
                for (c, _) in std::mem::take(&mut out_cols[a]) {
                    out_rows[c].remove(&a);
                }
                alive[a] = false;
                steps.push(Step::Upper { a, u, col: col_b });
                progress = true;
            }
            // Lower eliminations: unit entry out[c, a].
            for a in 0..n {
                if !alive[a] || out_cols[a].is_empty() {
                    continue;
                }
                let mut best: Option<(usize, usize)> = None;
                for (&c, &v) in &out_cols[a] {
                    if v.abs() == 1 {
                        let key = (out_rows[c].len(), c);
                        if best.map(|bk| key < bk).unwrap_or(true) {
                            best = Some(key);
                        }
                    }
                }
                let Some((_, c)) = best else { continue };
                let u = out_cols[a][&c];
                let col_a: Vec<(usize, i64)> = sorted(&out_cols[a]);
                let row: Vec<(usize, i64)> = {
                    let mut r: Vec<(usize, i64)> =
                        out_rows[c].iter().filter(|(y, _)| **y != a).map(|(y, v)| (*y, *v)).collect();
                    r.sort_unstable();
                    r
                };
                let mut updates: Vec<(usize, Vec<(usize, i64)>)> = Vec::with_capacity(row.len());
                for &(y, v) in &row {
                    let f = v * u;
                    let mut upd = Vec::with_capacity(col_a.len());
                    for &(r, w) in &col_a {
                        let cur = out_cols[y].get(&r).copied().unwrap_or(0);
                        let Some(nv) = f.checked_mul(w).and_then(|p| cur.checked_sub(p)) else {
                            overflow = true;
                            break 'passes;
                        };
                        upd.push((r, nv));
                    }
                    updates.push((y, upd));
                }
                for (y, upd) in updates {
                    for (r, nv) in upd {
                        if nv == 0 {
                            out_cols[y].remove(&r);
                            out_rows[r].remove(&y);
                        } else {
                            out_cols[y].insert(r, nv);
                            out_rows[r].insert(y, nv);
                        }
                    }
                }
                for (r, _) in std::mem::take(&mut out_cols[a]) {
                    out_rows[r].remove(&a);
                }
                for (y, _) in std::mem::take(&mut out_rows[c]) {
                    out_cols[y].remove(&c);
                }
                for (b, _) in std::mem::take(&mut inc_rows[a]) {
                    inc_cols[b].remove(&a);
                }
                alive[a] = false;
                steps.push(Step::Lower { a, u, row });
                progress = true;
            }
            if !progress {
                break;
            }
        }
        let _ = overflow; // the reduced complex is consistent either way

        let remaining: Vec<usize> = (0..n).filter(|&a| alive[a]).collect();
        let pos: HashMap<usize, usize> = remaining.iter().enumerate().map(|(i, a)| (*a, i)).collect();
        let m = remaining.len();
        let out_row_ids: Vec<usize> = {
            let mut v: Vec<usize> = (0..out_rows.len()).filter(|&c| !out_rows[c].is_empty()).collect();
            v.sort_unstable();
            v
        };
        let inc_col_ids: Vec<usize> = (0..inc_cols.len()).filter(|&b| !inc_cols[b].is_empty()).collect();
        let mut dout = Matrix::zeros(out_row_ids.len(), m);
        for (i, &c) in out_row_ids.iter().enumerate() {
            for (&a, &v) in &out_rows[c] {
                dout[(i, pos[&a])] = BigInt::from(v);
            }
        }
        let mut dinc = Matrix::zeros(m, inc_col_ids.len());
        for (j, &b) in inc_col_ids.iter().enumerate() {
            for (&a, &v) in &inc_cols[b] {
                dinc[(pos[&a], j)] = BigInt::from(v);
            }
        }
        let snf1 = smith_normal_form(&dout);
        let r = snf1.rank();
        let z = m - r;
        let coords = snf1.v_inv.mul(&dinc);
        for i in 0..r {
            for j in 0..coords.cols {
                debug_assert!(coords[(i, j)].is_zero(), "boundary of boundary is not zero");
            }
        }
        let bmat = coords.submatrix(r..m, 0..coords.cols);
        let snf2 = smith_normal_form(&bmat);
        let factors2 = snf2.factors.clone();
        let mut torsion = Vec::new();
        let mut gen_cols = Vec::new();
        for (j, f) in factors2.iter().enumerate() {
            if !f.is_one() {
                torsion.push(f.clone());
                gen_cols.push(j);
            }
        }
        gen_cols.extend(factors2.len()..z);
        let free_rank = z - factors2.len();
        let kernel = snf1.v.submatrix(0..m, r..m);
        let mut hom = Homology {
            rank_ambient: n,
            free_rank,
            torsion,
            basis: Vec::new(),
            out,
            steps,
            remaining,
            kernel_offset: r,
            v_inv: snf1.v_inv,
            u2: snf2.u,
            factors2,
        };
        let mut basis = Vec::with_capacity(gen_cols.len());
        for &j in &gen_cols {
            let zc = snf2.u_inv.column(j);
            let small = kernel.mul_vec(&zc);
            basis.push(hom.lift(&small)?);
        }
        hom.basis = basis;
        Ok(hom)
    }

    pub fn num_generators(&self) -> usize {
        self.basis.len()
    }

    /// Order of generator `j`; zero for free generators.
    pub fn order(&self, j: usize) -> BigInt {
        self.torsion.get(j).cloned().unwrap_or_else(BigInt::zero)
    }

    fn lift(&self, small: &[BigInt]) -> Result<Vec<(usize, i64)>> {
        let mut x: HashMap<usize, i64> = HashMap::new();
        for (i, v) in small.iter().enumerate() {
            if !v.is_zero() {
                x.insert(self.remaining[i], v.to_i64().ok_or(Error::Overflow)?);
            }
        }
        for step in self.steps.iter().rev() {
            if let Step::Lower { a, u, row } = step {
                let mut val: i64 = 0;
                for &(y, w) in row {
                    if let Some(&xy) = x.get(&y) {
                        val = val.checked_add(xy.checked_mul(w).ok_or(Error::Overflow)?).ok_or(Error::Overflow)?;
                    }
                }
                if val != 0 {
                    x.insert(*a, -val * u);
                }
            }
        }
        let mut out: Vec<(usize, i64)> = x.into_iter().filter(|(_, v)| *v != 0).collect();
        out.sort_unstable();
        Ok(out)
    }

    fn project(&self, x: &[(usize, i64)]) -> Result<Vec<BigInt>> {
        let mut cur: HashMap<usize, i64> = x.iter().copied().filter(|(_, v)| *v != 0).collect();
        for step in &self.steps {
            match step {
                Step::Lower { a, .. } => {
                    cur.remove(a);
                }
                Step::Upper { a, u, col } => {
                    if let Some(xa) = cur.get(a).copied() {
                        let t = xa * u;
                        for &(r, w) in col {
                            let e = cur.entry(r).or_insert(0);
                            *e = e.checked_sub(t.checked_mul(w).ok_or(Error::Overflow)?).ok_or(Error::Overflow)?;
                        }
                        debug_assert_eq!(cur.get(a).copied().unwrap_or(0), 0);
                        cur.remove(a);
                    }
                }
            }
        }
        Ok(self.remaining.iter().map(|a| BigInt::from(cur.get(a).copied().unwrap_or(0))).collect())
    }

    pub fn is_cycle(&self, x: &[(usize, i64)]) -> bool {
        self.out.mul_sparse_vec(x).is_empty()
    }

    /// Coordinates of the class of a cycle: torsion coordinates reduced mod
    /// their orders, then free coordinates.
    pub fn class_of(&self, x: &[(usize, i64)]) -> Result<Vec<BigInt>> {
        if !self.is_cycle(x) {
            return Err(Error::NotACycle(0));
        }
        let small = self.project(x)?;
        let w = self.v_inv.mul_vec(&small);
        let zc: Vec<BigInt> = w[self.kernel_offset..].to_vec();
        let y = self.u2.mul_vec(&zc);
        let mut out = Vec::with_capacity(self.basis.len());
        for (j, f) in self.factors2.iter().enumerate() {
            if !f.is_one() {
                out.push(y[j].mod_floor(f));
            }
        }
        out.extend(y[self.factors2.len()..].iter().cloned());
        Ok(out)
    }

    /// Reduce a coordinate vector: torsion entries mod their orders.
    pub fn normalize(&self, coords: &mut [BigInt]) {
        for (j, t) in self.torsion.iter().enumerate() {
            coords[j] = coords[j].mod_floor(t);
        }
    }

    pub fn is_boundary(&self, x: &[(usize, i64)]) -> Result<bool> {
        Ok(self.class_of(x)?.iter().all(|c| c.is_zero()))
    }
}

fn sorted(m: &HashMap<usize, i64>) -> Vec<(usize, i64)> {
    let mut v: Vec<(usize, i64)> = m.iter().map(|(k, v)| (*k, *v)).collect();
    v.sort_unstable();
    v
}

/// Sparse vector helpers in ambient coordinates.
pub fn add_scaled(acc: &mut BTreeMap<usize, i64>, x: &[(usize, i64)], k: i64) {
    for &(i, v) in x {
        let e = acc.entry(i).or_insert(0);
        *e += k * v;
        if *e == 0 {
            acc.remove(&i);
        }
    }
}

pub fn abs_big(x: &BigInt) -> BigInt {
    x.abs()
}
