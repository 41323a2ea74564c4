//! Staircase triangulation of a product of two ordered complexes.
//!
//! A product vertex `(a, b)` is encoded as `rank(a) * |L_0| + rank(b)`, so the
//! sorted order of encoded ids is the lexicographic order of pairs. A vertex
//! list is a product simplex iff both coordinates are non-decreasing along it
//! and both projections are simplices of the factors.

use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, OnceLock};

use crate::complex::{Simplex, SimplicialComplex, Subcomplex, VertexId};

#[derive(Debug)]
pub struct ProductComplex {
    k: Arc<SimplicialComplex>,
    l: Arc<SimplicialComplex>,
    k_rank: HashMap<VertexId, u32>,
    l_rank: HashMap<VertexId, u32>,
    k_verts: Vec<VertexId>,
    l_verts: Vec<VertexId>,
    total: OnceLock<Arc<SimplicialComplex>>,
}

impl ProductComplex {
    pub fn new(k: &Arc<SimplicialComplex>, l: &Arc<SimplicialComplex>) -> Self {
        let k_verts: Vec<VertexId> = k.vertices().collect();
        let l_verts: Vec<VertexId> = l.vertices().collect();
        ProductComplex {
            k_rank: k_verts.iter().enumerate().map(|(i, v)| (*v, i as u32)).collect(),
            l_rank: l_verts.iter().enumerate().map(|(i, v)| (*v, i as u32)).collect(),
            k_verts,
            l_verts,
            k: k.clone(),
            l: l.clone(),
            total: OnceLock::new(),
        }
    }

    pub fn factors(&self) -> (&Arc<SimplicialComplex>, &Arc<SimplicialComplex>) {
        (&self.k, &self.l)
    }

    pub fn is_square(&self) -> bool {
        Arc::ptr_eq(&self.k, &self.l)
    }

    pub fn dim(&self) -> usize {
        self.k.dim() + self.l.dim()
    }

    pub fn encode(&self, a: VertexId, b: VertexId) -> VertexId {
        self.k_rank[&a] * self.l_verts.len() as u32 + self.l_rank[&b]
    }

    pub fn decode(&self, v: VertexId) -> (VertexId, VertexId) {
        let n = self.l_verts.len() as u32;
        (self.k_verts[(v / n) as usize], self.l_verts[(v % n) as usize])
    }

    /// The two projections of a product simplex.
    pub fn project(&self, s: &Simplex) -> (Simplex, Simplex) {
        let mut a: Vec<VertexId> = Vec::with_capacity(s.vertices().len());
        let mut b: Vec<VertexId> = Vec::with_capacity(s.vertices().len());
        for &v in s.vertices() {
            let (x, y) = self.decode(v);
            a.push(x);
            b.push(y);
        }
        a.sort_unstable();
        a.dedup();
        b.sort_unstable();
        b.dedup();
        (Simplex::from_sorted(&a), Simplex::from_sorted(&b))
    }

    pub fn is_simplex(&self, s: &Simplex) -> bool {
        let mut prev: Option<(u32, u32)> = None;
        for &v in s.vertices() {
            let n = self.l_verts.len() as u32;
            let (ra, rb) = (v / n, v % n);
            if ra as usize >= self.k_verts.len() {
                return false;
            }
            if let Some((pa, pb)) = prev {
                if ra < pa || rb < pb {
                    return false;
                }
            }
            prev = Some((ra, rb));
        }
        let (a, b) = self.project(s);
        self.k.contains(&a) && self.l.contains(&b)
    }

    /// Staircase simplices of `α × β` with their shuffle signs.
    ///
    /// Each monotone lattice path from `(α_0, β_0)` to `(α_p, β_q)` gives one
    /// simplex; its sign is the parity of (vertical step, later horizontal step) pairs.
    pub fn staircase(&self, alpha: &Simplex, beta: &Simplex) -> Vec<(Simplex, i8)> {
        let p = alpha.dim();
        let q = beta.dim();
        let mut out = Vec::new();
        let mut path: Vec<VertexId> = Vec::with_capacity(p + q + 1);
        self.paths(alpha, beta, 0, 0, 0, 0, &mut path, &mut out);
        debug_assert_eq!(out.len(), binomial(p + q, p));
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn paths(
        &self,
        alpha: &Simplex,
        beta: &Simplex,
        i: usize,
        j: usize,
        ups: usize,
        inversions: usize,
        path: &mut Vec<VertexId>,
        out: &mut Vec<(Simplex, i8)>,
    ) {
        path.push(self.encode(alpha.vertices()[i], beta.vertices()[j]));
        let p = alpha.dim();
        let q = beta.dim();
        if i == p && j == q {
            let sign = if inversions % 2 == 0 { 1 } else { -1 };
            out.push((Simplex::from_sorted(path), sign));
        } else {
            if i < p {
                self.paths(alpha, beta, i + 1, j, ups, inversions + ups, path, out);
            }
            if j < q {
                self.paths(alpha, beta, i, j + 1, ups + 1, inversions, path, out);
            }
        }
        path.pop();
    }

    /// Product simplices containing `s` as a codimension-one face.
    pub fn cofacets(&self, s: &Simplex) -> Vec<Simplex> {
        let (a, b) = self.project(s);
        let mut a_cand: BTreeSet<VertexId> = a.vertices().iter().copied().collect();
        if let Some(ai) = self.k.index_of(&a) {
            for &c in self.k.cofacets(a.dim(), ai) {
                a_cand.extend(self.k.simplices(a.dim() + 1)[c].vertices().iter().copied());
            }
        }
        let mut b_cand: BTreeSet<VertexId> = b.vertices().iter().copied().collect();
        if let Some(bi) = self.l.index_of(&b) {
            for &c in self.l.cofacets(b.dim(), bi) {
                b_cand.extend(self.l.simplices(b.dim() + 1)[c].vertices().iter().copied());
            }
        }
        let mut out = Vec::new();
        for &x in &a_cand {
            for &y in &b_cand {
                let v = self.encode(x, y);
                if s.contains_vertex(v) {
                    continue;
                }
                let mut verts: Vec<VertexId> = s.vertices().to_vec();
                let pos = verts.partition_point(|&w| w < v);
                verts.insert(pos, v);
                let t = Simplex::from_sorted(&verts);
                if self.is_simplex(&t) {
                    out.push(t);
                }
            }
        }
        out
    }

    /// Top-dimensional product simplices containing `s`.
    pub fn top_cofaces(&self, s: &Simplex) -> Vec<Simplex> {
        let mut layer: BTreeSet<Simplex> = BTreeSet::from([s.clone()]);
        let mut tops = BTreeSet::new();
        while !layer.is_empty() {
            let mut next = BTreeSet::new();
            for t in &layer {
                let c = self.cofacets(t);
                if c.is_empty() {
                    tops.insert(t.clone());
                }
                next.extend(c);
            }
            layer = next;
        }
        tops.into_iter().collect()
    }

    /// All simplices containing `s`, grouped by dimension (index 0 is `dim s`).
    pub fn star(&self, s: &Simplex) -> Vec<Vec<Simplex>> {
        let mut out = vec![vec![s.clone()]];
        loop {
            let mut next = BTreeSet::new();
            for t in out.last().unwrap() {
                next.extend(self.cofacets(t));
            }
            if next.is_empty() {
                break;
            }
            out.push(next.into_iter().collect());
        }
        out
    }

    /// Diagonal image of a simplex of `K` (requires `K = L`).
    pub fn diagonal(&self, s: &Simplex) -> Simplex {
        debug_assert!(self.is_square());
        let v: Vec<VertexId> = s.vertices().iter().map(|&x| self.encode(x, x)).collect();
        Simplex::from_sorted(&v)
    }

    /// Preimage under the diagonal: `Some(σ)` iff `s = Δ(σ)`.
    pub fn undiagonal(&self, s: &Simplex) -> Option<Simplex> {
        let mut v = Vec::with_capacity(s.vertices().len());
        for &w in s.vertices() {
            let (a, b) = self.decode(w);
            if a != b {
                return None;
            }
            v.push(a);
        }
        Some(Simplex::from_sorted(&v))
    }

    /// The full staircase complex, built on first use.
    pub fn total(&self) -> &Arc<SimplicialComplex> {
        self.total.get_or_init(|| {
            let kmax = maximal(&self.k);
            let lmax = maximal(&self.l);
            let mut tops = Vec::new();
            for a in &kmax {
                for b in &lmax {
                    tops.extend(self.staircase(a, b).into_iter().map(|(s, _)| s));
                }
            }
            let mut labels = HashMap::new();
            for &a in &self.k_verts {
                for &b in &self.l_verts {
                    labels.insert(self.encode(a, b), format!("({},{})", self.k.label(a), self.l.label(b)));
                }
            }
            Arc::new(SimplicialComplex::from_simplices(tops).expect("nonempty").with_labels(labels))
        })
    }

    /// `A × B` as a subcomplex of the total complex.
    pub fn product_subcomplex(&self, a: &Subcomplex, b: &Subcomplex) -> Subcomplex {
        let total = self.total().clone();
        Subcomplex::from_predicate(&total, |s| {
            let (x, y) = self.project(s);
            a.contains(&x) && b.contains(&y)
        })
    }

    /// The diagonal subcomplex of the total complex.
    pub fn diagonal_subcomplex(&self) -> Subcomplex {
        let total = self.total().clone();
        Subcomplex::from_predicate(&total, |s| self.undiagonal(s).is_some())
    }
}

fn maximal(k: &SimplicialComplex) -> Vec<Simplex> {
    let mut out = Vec::new();
    for d in 0..=k.dim() {
        for (i, s) in k.simplices(d).iter().enumerate() {
            if d == k.dim() || k.cofacets(d, i).is_empty() {
                out.push(s.clone());
            }
        }
    }
    out
}

pub fn binomial(n: usize, k: usize) -> usize {
    let mut r = 1usize;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}
