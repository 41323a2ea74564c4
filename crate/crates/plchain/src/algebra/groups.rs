//! (Co)homology of pairs as explicit presentations, and integer matrices between them.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::chains::{IntChain, IntCochain};
use super::homology::Homology;
use super::matrix::{solve_dense, Matrix, SparseMatrix};
use crate::complex::{SimplicialComplex, Subcomplex};
use crate::error::{Error, Result};

/// The relative chain groups of `(A, B)`: simplices of `A` not in `B`.
#[derive(Debug)]
pub struct Pair {
    pub a: Subcomplex,
    pub b: Subcomplex,
    gens: Vec<Vec<usize>>,
    pos: Vec<HashMap<usize, usize>>,
}

impl Pair {
    pub fn new(a: &Subcomplex, b: &Subcomplex) -> Result<Arc<Pair>> {
        if !b.is_subset_of(a) {
            return Err(Error::Precondition("B is not contained in A".into()));
        }
        let k = a.complex();
        let mut gens = Vec::with_capacity(k.dim() + 1);
        let mut pos = Vec::with_capacity(k.dim() + 1);
        for d in 0..=k.dim() {
            let g: Vec<usize> = a.indices(d).filter(|&i| !b.contains_key(d, i)).collect();
            pos.push(g.iter().enumerate().map(|(j, i)| (*i, j)).collect());
            gens.push(g);
        }
        Ok(Arc::new(Pair { a: a.clone(), b: b.clone(), gens, pos }))
    }

    pub fn absolute(a: &Subcomplex) -> Result<Arc<Pair>> {
        Self::new(a, &Subcomplex::empty(a.complex()))
    }

    pub fn complex(&self) -> &Arc<SimplicialComplex> {
        self.a.complex()
    }

    pub fn generators(&self, d: usize) -> &[usize] {
        self.gens.get(d).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn rank(&self, d: usize) -> usize {
        self.generators(d).len()
    }

    /// Relative boundary `C_d(A,B) → C_{d-1}(A,B)`.
    pub fn boundary(&self, d: usize) -> SparseMatrix {
        let k = self.complex();
        if d == 0 || d > k.dim() {
            return SparseMatrix::new(if d == 0 { 0 } else { self.rank(d - 1) }, self.rank(d));
        }
        let mut m = SparseMatrix::new(self.rank(d - 1), self.rank(d));
        for (c, &i) in self.gens[d].iter().enumerate() {
            let s = &k.simplices(d)[i];
            for (j, f) in s.facets() {
                let fi = k.index_of(&f).expect("face closed");
                if let Some(&r) = self.pos[d - 1].get(&fi) {
                    m.columns[c].push((r, if j % 2 == 0 { 1 } else { -1 }));
                }
            }
            m.columns[c].sort_unstable();
        }
        m
    }

    /// Coordinates of a chain in `C_d(A,B)`: simplices of `B` are dropped,
    /// simplices outside `A` are an error.
    pub fn chain_coords(&self, c: &IntChain) -> Result<Vec<(usize, i64)>> {
        if !Arc::ptr_eq(&c.complex, self.complex()) {
            return Err(Error::Precondition("chain lives on another complex".into()));
        }
        let d = c.degree;
        let mut out = Vec::new();
        for (&i, &v) in &c.coeffs {
            if let Some(&j) = self.pos.get(d).and_then(|p| p.get(&i)) {
                out.push((j, v));
            } else if !self.b.contains_key(d, i) {
                let s = &self.complex().simplices(d)[i];
                return Err(Error::Precondition(format!("chain has simplex {s:?} outside the pair")));
            }
        }
        out.sort_unstable();
        Ok(out)
    }

    /// Coordinates of a cochain restricted to `A − B`.
    pub fn cochain_coords(&self, c: &IntCochain) -> Result<Vec<(usize, i64)>> {
        if !Arc::ptr_eq(&c.complex, self.complex()) {
            return Err(Error::Precondition("cochain lives on another complex".into()));
        }
        let d = c.degree;
        let mut out = Vec::new();
        for (&i, &v) in &c.values {
            if let Some(&j) = self.pos.get(d).and_then(|p| p.get(&i)) {
                out.push((j, v));
            }
        }
        out.sort_unstable();
        Ok(out)
    }

    pub fn chain_from_coords(&self, d: usize, v: &[(usize, i64)]) -> IntChain {
        let k = self.complex();
        let mut c = IntChain::zero(k, d);
        for &(j, x) in v {
            c.add_term(self.gens[d][j], x);
        }
        c
    }

    pub fn cochain_from_coords(&self, d: usize, v: &[(usize, i64)]) -> IntCochain {
        let k = self.complex();
        let mut c = IntCochain::zero(k, d);
        for &(j, x) in v {
            c.set_add(self.gens[d][j], x);
        }
        c
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Homology,
    Cohomology,
    Lattice,
}

/// A finitely generated abelian group presented as (co)homology, with explicit
/// representative (co)cycles. Generators are ordered torsion first.
pub struct GroupPresentation {
    pub degree: usize,
    pub kind: Kind,
    pub pair: Option<Arc<Pair>>,
    pub hom: Homology,
}

impl fmt::Debug for GroupPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}_{}: {}", self.kind, self.degree, self.describe())
    }
}

impl GroupPresentation {
    /// Same degree, kind and pair; presentations computed from identical data
    /// have identical bases.
    pub fn same_group(&self, other: &GroupPresentation) -> bool {
        if std::ptr::eq(self, other) {
            return true;
        }
        if self.degree != other.degree || self.kind != other.kind {
            return false;
        }
        match (&self.pair, &other.pair) {
            (Some(a), Some(b)) => Arc::ptr_eq(a, b) || (a.a == b.a && a.b == b.b),
            _ => false,
        }
    }

    pub fn free_rank(&self) -> usize {
        self.hom.free_rank
    }

    pub fn torsion(&self) -> &[BigInt] {
        &self.hom.torsion
    }

    pub fn num_generators(&self) -> usize {
        self.hom.num_generators()
    }

    pub fn is_zero(&self) -> bool {
        self.num_generators() == 0
    }

    /// `Z^r ⊕ Z/d_1 ⊕ …`, or `0`.
    pub fn describe(&self) -> String {
        let mut parts = Vec::new();
        match self.free_rank() {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        for t in self.torsion() {
            parts.push(format!("Z/{t}"));
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }

    fn pair(&self) -> Result<&Arc<Pair>> {
        self.pair.as_ref().ok_or_else(|| Error::Precondition("presentation has no simplicial pair".into()))
    }

    pub fn basis_chain(&self, j: usize) -> Result<IntChain> {
        Ok(self.pair()?.chain_from_coords(self.degree, &self.hom.basis[j]))
    }

    pub fn basis_cochain(&self, j: usize) -> Result<IntCochain> {
        Ok(self.pair()?.cochain_from_coords(self.degree, &self.hom.basis[j]))
    }

    pub fn class_of_chain(&self, c: &IntChain) -> Result<Vec<BigInt>> {
        if self.kind != Kind::Homology {
            return Err(Error::Precondition("not a homology presentation".into()));
        }
        if c.is_zero() {
            return Ok(vec![BigInt::zero(); self.num_generators()]);
        }
        if c.degree != self.degree {
            return Err(Error::Dimension(format!("chain of degree {} in H_{}", c.degree, self.degree)));
        }
        let v = self.pair()?.chain_coords(c)?;
        self.hom.class_of(&v).map_err(|_| Error::NotACycle(self.degree))
    }

    pub fn class_of_cochain(&self, c: &IntCochain) -> Result<Vec<BigInt>> {
        if self.kind != Kind::Cohomology {
            return Err(Error::Precondition("not a cohomology presentation".into()));
        }
        let v = self.pair()?.cochain_coords(c)?;
        self.hom.class_of(&v).map_err(|_| Error::NotACycle(self.degree))
    }

    /// A representative chain for given coordinates.
    pub fn chain_for(&self, coords: &[BigInt]) -> Result<IntChain> {
        let mut acc = IntChain::zero(self.pair()?.complex(), self.degree);
        for (j, c) in coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let k = c.to_i64().ok_or(Error::Overflow)?;
            acc = acc.add(&self.basis_chain(j)?.scale(k));
        }
        Ok(acc)
    }

    pub fn cochain_for(&self, coords: &[BigInt]) -> Result<IntCochain> {
        let mut acc = IntCochain::zero(self.pair()?.complex(), self.degree);
        for (j, c) in coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let k = c.to_i64().ok_or(Error::Overflow)?;
            acc = acc.add(&self.basis_cochain(j)?.scale(k));
        }
        Ok(acc)
    }

    /// Reduce torsion coordinates.
    pub fn normalize(&self, coords: &mut [BigInt]) {
        self.hom.normalize(coords)
    }

    pub fn unit(&self, j: usize) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); self.num_generators()];
        v[j] = BigInt::one();
        v
    }
}

/// `H_k(A, B; Z)`.
pub fn homology_of_pair(a: &Subcomplex, b: &Subcomplex, k: usize) -> Result<Arc<GroupPresentation>> {
    let pair = Pair::new(a, b)?;
    homology_of(&pair, k)
}

pub fn homology_of(pair: &Arc<Pair>, k: usize) -> Result<Arc<GroupPresentation>> {
    let out = Arc::new(pair.boundary(k));
    let inc = pair.boundary(k + 1);
    let inc = if inc.rows == pair.rank(k) { inc } else { SparseMatrix::new(pair.rank(k), 0) };
    let hom = Homology::compute(&inc, out)?;
    Ok(Arc::new(GroupPresentation { degree: k, kind: Kind::Homology, pair: Some(pair.clone()), hom }))
}

/// `H^k(A, B; Z)` with coboundary the transpose of the boundary.
pub fn cohomology_of_pair(a: &Subcomplex, b: &Subcomplex, k: usize) -> Result<Arc<GroupPresentation>> {
    let pair = Pair::new(a, b)?;
    cohomology_of(&pair, k)
}

pub fn cohomology_of(pair: &Arc<Pair>, k: usize) -> Result<Arc<GroupPresentation>> {
    let up = pair.boundary(k + 1);
    let out = if up.rows == pair.rank(k) { up.transpose() } else { SparseMatrix::new(0, pair.rank(k)) };
    let inc = if k == 0 { SparseMatrix::new(pair.rank(0), 0) } else { pair.boundary(k).transpose() };
    let hom = Homology::compute(&inc, Arc::new(out))?;
    Ok(Arc::new(GroupPresentation { degree: k, kind: Kind::Cohomology, pair: Some(pair.clone()), hom }))
}

/// Homology of an abstract free complex given by its two boundary matrices.
pub fn lattice_homology(inc: &SparseMatrix, out: SparseMatrix, degree: usize) -> Result<Arc<GroupPresentation>> {
    let hom = Homology::compute(inc, Arc::new(out))?;
    Ok(Arc::new(GroupPresentation { degree, kind: Kind::Lattice, pair: None, hom }))
}

/// Integer matrix between two presentations (rows: target generators).
#[derive(Clone)]
pub struct GroupMap {
    pub source: Arc<GroupPresentation>,
    pub target: Arc<GroupPresentation>,
    pub matrix: Matrix,
}

impl fmt::Debug for GroupMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupMap {:?} -> {:?} {:?}", self.source, self.target, self.matrix)
    }
}

impl GroupMap {
    /// Build from the images of the source generators.
    pub fn from_images<F>(source: &Arc<GroupPresentation>, target: &Arc<GroupPresentation>, mut image: F) -> Result<Self>
    where
        F: FnMut(usize) -> Result<Vec<BigInt>>,
    {
        let mut m = Matrix::zeros(target.num_generators(), source.num_generators());
        for j in 0..source.num_generators() {
            let col = image(j)?;
            for (i, v) in col.into_iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        Ok(GroupMap { source: source.clone(), target: target.clone(), matrix: m })
    }

    pub fn identity(g: &Arc<GroupPresentation>) -> Self {
        GroupMap { source: g.clone(), target: g.clone(), matrix: Matrix::identity(g.num_generators()) }
    }

    fn normalize_matrix(target: &GroupPresentation, m: &mut Matrix) {
        for (i, t) in target.torsion().iter().enumerate() {
            for c in 0..m.cols {
                let v = m[(i, c)].mod_floor(t);
                m[(i, c)] = v;
            }
        }
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &GroupMap) -> Result<GroupMap> {
        if !first.target.same_group(&self.source) {
            return Err(Error::Precondition("composing maps between different presentations".into()));
        }
        let mut m = self.matrix.mul(&first.matrix);
        Self::normalize_matrix(&self.target, &mut m);
        Ok(GroupMap { source: first.source.clone(), target: self.target.clone(), matrix: m })
    }

    pub fn apply(&self, x: &[BigInt]) -> Vec<BigInt> {
        let mut y = self.matrix.mul_vec(x);
        self.target.normalize(&mut y);
        y
    }

    pub fn scale(&self, k: i64) -> GroupMap {
        let mut m = self.matrix.scale(k);
        Self::normalize_matrix(&self.target, &mut m);
        GroupMap { source: self.source.clone(), target: self.target.clone(), matrix: m }
    }

    /// Same presentations and equal matrices after torsion reduction.
    pub fn same_as(&self, other: &GroupMap) -> bool {
        if !self.source.same_group(&other.source) || !self.target.same_group(&other.target) {
            return false;
        }
        let mut a = self.matrix.clone();
        let mut b = other.matrix.clone();
        Self::normalize_matrix(&self.target, &mut a);
        Self::normalize_matrix(&self.target, &mut b);
        a == b
    }

    pub fn is_zero(&self) -> bool {
        let mut a = self.matrix.clone();
        Self::normalize_matrix(&self.target, &mut a);
        a.is_zero()
    }

    /// Exact inverse; fails unless the map is bijective.
    pub fn inverse(&self) -> Result<GroupMap> {
        let s = &self.source;
        let t = &self.target;
        let (ns, nt) = (s.num_generators(), t.num_generators());
        let tors_t: Vec<BigInt> = t.torsion().to_vec();
        // [M | diag(torsion of target)] y = e_j
        let mut aug = Matrix::zeros(nt, ns + tors_t.len());
        for r in 0..nt {
            for c in 0..ns {
                aug[(r, c)] = self.matrix[(r, c)].clone();
            }
        }
        for (i, d) in tors_t.iter().enumerate() {
            aug[(i, ns + i)] = d.clone();
        }
        let mut inv = Matrix::zeros(ns, nt);
        for j in 0..nt {
            let e = t.unit(j);
            let Some(sol) = solve_dense(&aug, &e) else {
                return Err(Error::NotIsomorphism(format!("generator {j} of the target has no preimage")));
            };
            for i in 0..ns {
                inv[(i, j)] = sol[i].clone();
            }
        }
        let mut inv_map = GroupMap { source: t.clone(), target: s.clone(), matrix: inv };
        Self::normalize_matrix(s, &mut inv_map.matrix);
        let back = inv_map.after(self)?;
        if !back.same_as(&GroupMap::identity(s)) {
            return Err(Error::NotIsomorphism("map has a kernel".into()));
        }
        Ok(inv_map)
    }

    pub fn is_isomorphism(&self) -> bool {
        self.inverse().is_ok()
    }

    /// Entries as small integers (for reports and tests).
    pub fn to_i64(&self) -> Vec<Vec<i64>> {
        (0..self.matrix.rows)
            .map(|r| (0..self.matrix.cols).map(|c| self.matrix[(r, c)].to_i64().unwrap_or(i64::MAX)).collect())
            .collect()
    }

    pub fn determinant_abs(&self) -> BigInt {
        self.matrix.determinant().abs()
    }
}

/// Map of presentations induced by a chain map given on representatives.
pub fn induced_by_chain_map<F>(source: &Arc<GroupPresentation>, target: &Arc<GroupPresentation>, mut f: F) -> Result<GroupMap>
where
    F: FnMut(&IntChain) -> Result<IntChain>,
{
    GroupMap::from_images(source, target, |j| {
        let c = source.basis_chain(j)?;
        target.class_of_chain(&f(&c)?)
    })
}

/// Map of cohomology presentations induced by a cochain map given on representatives.
pub fn induced_by_cochain_map<F>(source: &Arc<GroupPresentation>, target: &Arc<GroupPresentation>, mut f: F) -> Result<GroupMap>
where
    F: FnMut(&IntCochain) -> Result<IntCochain>,
{
    GroupMap::from_images(source, target, |j| {
        let c = source.basis_cochain(j)?;
        target.class_of_cochain(&f(&c)?)
    })
}

/// Map induced by inclusion of pairs in one complex: pushforward on homology,
/// restriction on cohomology.
pub fn inclusion_map(source: &Arc<GroupPresentation>, target: &Arc<GroupPresentation>) -> Result<GroupMap> {
    match (source.kind, target.kind) {
        (Kind::Homology, Kind::Homology) => induced_by_chain_map(source, target, |c| Ok(c.clone())),
        (Kind::Cohomology, Kind::Cohomology) => induced_by_cochain_map(source, target, |c| Ok(c.clone())),
        _ => Err(Error::Precondition("inclusion between different kinds of presentation".into())),
    }
}

/// `∂_*: H_k(A,B) → H_{k-1}(B,C)`.
pub fn connecting_map(a: &Subcomplex, b: &Subcomplex, c: &Subcomplex, k: usize) -> Result<GroupMap> {
    if k == 0 {
        return Err(Error::Dimension("connecting map out of degree 0".into()));
    }
    let src = homology_of_pair(a, b, k)?;
    let tgt = homology_of_pair(b, c, k - 1)?;
    induced_by_chain_map(&src, &tgt, |z| Ok(z.boundary()))
}

/// `δ^*: H^k(B,C) → H^{k+1}(A,B)`.
pub fn coboundary_map(a: &Subcomplex, b: &Subcomplex, c: &Subcomplex, k: usize) -> Result<GroupMap> {
    let src = cohomology_of_pair(b, c, k)?;
    let tgt = cohomology_of_pair(a, b, k + 1)?;
    induced_by_cochain_map(&src, &tgt, |z| Ok(z.coboundary()))
}
