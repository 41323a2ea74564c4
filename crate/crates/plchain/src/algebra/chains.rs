//! Integer chains and cochains on a complex, boundary matrices, cup and cap products.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::matrix::SparseMatrix;
use crate::complex::{Simplex, SimplicialComplex, Subcomplex};
use crate::error::{Error, Result};

/// Finitely supported integer chain; coefficients refer to the sorted vertex order.
#[derive(Clone, Debug)]
pub struct IntChain {
    pub complex: Arc<SimplicialComplex>,
    pub degree: usize,
    pub coeffs: BTreeMap<usize, i64>,
}

impl PartialEq for IntChain {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.complex, &other.complex)
            && (self.coeffs == other.coeffs)
            && (self.degree == other.degree || self.coeffs.is_empty())
    }
}

impl IntChain {
    pub fn zero(k: &Arc<SimplicialComplex>, degree: usize) -> Self {
        IntChain { complex: k.clone(), degree, coeffs: BTreeMap::new() }
    }

    /// Chain from (vertex sequence, coefficient) pairs; sequences carry their orientation.
    pub fn from_oriented(k: &Arc<SimplicialComplex>, degree: usize, terms: &[(Vec<u32>, i64)]) -> Result<Self> {
        let mut c = Self::zero(k, degree);
        for (seq, coef) in terms {
            if seq.len() != degree + 1 {
                return Err(Error::Dimension(format!("simplex {seq:?} is not of degree {degree}")));
            }
            let os = crate::complex::OrientedSimplex::from_sequence(seq)?;
            let i = k
                .index_of(&os.simplex)
                .ok_or_else(|| Error::Invalid(format!("simplex {seq:?} not in complex")))?;
            c.add_term(i, coef * os.sign as i64);
        }
        Ok(c)
    }

    pub fn from_simplices(k: &Arc<SimplicialComplex>, degree: usize, terms: &[(Simplex, i64)]) -> Result<Self> {
        let mut c = Self::zero(k, degree);
        for (s, coef) in terms {
            let i = k.index_of(s).ok_or_else(|| Error::Invalid(format!("simplex {s:?} not in complex")))?;
            if s.dim() != degree {
                return Err(Error::Dimension(format!("simplex {s:?} is not of degree {degree}")));
            }
            c.add_term(i, *coef);
        }
        Ok(c)
    }

    pub fn from_vec(k: &Arc<SimplicialComplex>, degree: usize, v: &[(usize, i64)]) -> Self {
        let mut c = Self::zero(k, degree);
        for &(i, x) in v {
            c.add_term(i, x);
        }
        c
    }

    pub fn add_term(&mut self, i: usize, x: i64) {
        if x == 0 {
            return;
        }
        let e = self.coeffs.entry(i).or_insert(0);
        *e += x;
        if *e == 0 {
            self.coeffs.remove(&i);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coefficient(&self, s: &Simplex) -> i64 {
        self.complex.index_of(s).and_then(|i| self.coeffs.get(&i).copied()).unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Simplex, i64)> + '_ {
        self.coeffs.iter().map(move |(i, v)| (&self.complex.simplices(self.degree)[*i], *v))
    }

    pub fn add(&self, other: &IntChain) -> IntChain {
        let mut out = self.clone();
        if out.coeffs.is_empty() {
            out.degree = other.degree;
        }
        for (&i, &v) in &other.coeffs {
            out.add_term(i, v);
        }
        out
    }

    pub fn scale(&self, k: i64) -> IntChain {
        let mut out = IntChain::zero(&self.complex, self.degree);
        for (&i, &v) in &self.coeffs {
            out.add_term(i, v * k);
        }
        out
    }

    pub fn sub(&self, other: &IntChain) -> IntChain {
        self.add(&other.scale(-1))
    }

    pub fn boundary(&self) -> IntChain {
        if self.degree == 0 {
            return IntChain::zero(&self.complex, 0);
        }
        let mut out = IntChain::zero(&self.complex, self.degree - 1);
        for (s, v) in self.terms() {
            for (j, f) in s.facets() {
                let fi = self.complex.index_of(&f).expect("face closed");
                out.add_term(fi, if j % 2 == 0 { v } else { -v });
            }
        }
        out
    }

    /// Drop every simplex lying in `b`.
    pub fn modulo(&self, b: &Subcomplex) -> IntChain {
        let mut out = self.clone();
        out.coeffs.retain(|i, _| !b.contains_key(self.degree, *i));
        out
    }

    /// Closure of the simplices with nonzero coefficient.
    pub fn support(&self) -> Subcomplex {
        Subcomplex::from_keys(&self.complex, self.coeffs.keys().map(|i| (self.degree, *i)))
    }

    pub fn to_vec(&self) -> Vec<(usize, i64)> {
        self.coeffs.iter().map(|(k, v)| (*k, *v)).collect()
    }
}

/// Finitely supported integer cochain.
#[derive(Clone, Debug)]
pub struct IntCochain {
    pub complex: Arc<SimplicialComplex>,
    pub degree: usize,
    pub values: BTreeMap<usize, i64>,
}

impl PartialEq for IntCochain {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.complex, &other.complex) && self.values == other.values
    }
}

impl IntCochain {
    pub fn zero(k: &Arc<SimplicialComplex>, degree: usize) -> Self {
        IntCochain { complex: k.clone(), degree, values: BTreeMap::new() }
    }

    pub fn from_vec(k: &Arc<SimplicialComplex>, degree: usize, v: &[(usize, i64)]) -> Self {
        let mut c = Self::zero(k, degree);
        for &(i, x) in v {
            c.set_add(i, x);
        }
        c
    }

    /// The 0-cochain that is 1 on every vertex.
    pub fn unit(k: &Arc<SimplicialComplex>) -> Self {
        let v: Vec<(usize, i64)> = (0..k.count(0)).map(|i| (i, 1)).collect();
        Self::from_vec(k, 0, &v)
    }

    pub fn set_add(&mut self, i: usize, x: i64) {
        if x == 0 {
            return;
        }
        let e = self.values.entry(i).or_insert(0);
        *e += x;
        if *e == 0 {
            self.values.remove(&i);
        }
    }

    pub fn value(&self, s: &Simplex) -> i64 {
        if s.dim() != self.degree {
            return 0;
        }
        self.complex.index_of(s).and_then(|i| self.values.get(&i).copied()).unwrap_or(0)
    }

    pub fn value_at(&self, i: usize) -> i64 {
        self.values.get(&i).copied().unwrap_or(0)
    }

    pub fn add(&self, other: &IntCochain) -> IntCochain {
        let mut out = self.clone();
        for (&i, &v) in &other.values {
            out.set_add(i, v);
        }
        out
    }

    pub fn scale(&self, k: i64) -> IntCochain {
        let mut out = IntCochain::zero(&self.complex, self.degree);
        for (&i, &v) in &self.values {
            out.set_add(i, v * k);
        }
        out
    }

    /// `(δα)(σ) = α(∂σ)`.
    pub fn coboundary(&self) -> IntCochain {
        let d = self.degree;
        let mut out = IntCochain::zero(&self.complex, d + 1);
        for (&i, &v) in &self.values {
            for &c in self.complex.cofacets(d, i) {
                let t = &self.complex.simplices(d + 1)[c];
                let s = &self.complex.simplices(d)[i];
                let j = t.vertices().iter().position(|x| !s.contains_vertex(*x)).unwrap();
                out.set_add(c, if j % 2 == 0 { v } else { -v });
            }
        }
        out
    }

    pub fn evaluate(&self, c: &IntChain) -> i64 {
        if c.degree != self.degree {
            return 0;
        }
        c.coeffs.iter().map(|(i, v)| v * self.value_at(*i)).sum()
    }

    pub fn to_vec(&self) -> Vec<(usize, i64)> {
        self.values.iter().map(|(k, v)| (*k, *v)).collect()
    }
}

/// Matrix of `∂_k` from k-simplices (columns) to (k-1)-simplices (rows).
pub fn boundary_matrix(k: &SimplicialComplex, d: usize) -> SparseMatrix {
    if d == 0 {
        return SparseMatrix::new(0, k.count(0));
    }
    let mut m = SparseMatrix::new(k.count(d - 1), k.count(d));
    for (c, s) in k.simplices(d).iter().enumerate() {
        for (j, f) in s.facets() {
            let r = k.index_of(&f).expect("face closed");
            m.columns[c].push((r, if j % 2 == 0 { 1 } else { -1 }));
        }
        m.columns[c].sort_unstable();
    }
    m
}

/// `(α⌣β)(v_0…v_{p+q}) = α(v_0…v_p)·β(v_p…v_{p+q})`.
pub fn cup_product(alpha: &IntCochain, beta: &IntCochain) -> IntCochain {
    assert!(Arc::ptr_eq(&alpha.complex, &beta.complex), "cochains on different complexes");
    let k = &alpha.complex;
    let (p, q) = (alpha.degree, beta.degree);
    let mut out = IntCochain::zero(k, p + q);
    if alpha.values.is_empty() || beta.values.is_empty() {
        return out;
    }
    for (i, s) in k.simplices(p + q).iter().enumerate() {
        let a = alpha.value(&s.front(p));
        if a == 0 {
            continue;
        }
        let b = beta.value(&s.back(q));
        out.set_add(i, a * b);
    }
    out
}

/// `α⌢(v_0…v_n) = α(v_{n-p}…v_n)·(v_0…v_{n-p})`, so that
/// `⟨α⌣β, ξ⟩ = ⟨α, β⌢ξ⟩`.
pub fn cap_product(alpha: &IntCochain, xi: &IntChain) -> Result<IntChain> {
    let (p, n) = (alpha.degree, xi.degree);
    if p > n {
        return Err(Error::Dimension(format!("cap of a {p}-cochain with an {n}-chain")));
    }
    let k = &xi.complex;
    let mut out = IntChain::zero(k, n - p);
    for (s, v) in xi.terms() {
        let a = alpha.value(&s.back(p));
        if a != 0 {
            let f = s.front(n - p);
            out.add_term(k.index_of(&f).expect("face closed"), a * v);
        }
    }
    Ok(out)
}
