//! Finite abstract simplicial complexes, subdivisions, complements and orientation.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use smallvec::SmallVec;

use crate::error::{Error, Result};

pub type VertexId = u32;

/// Strictly increasing vertex list.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Simplex(SmallVec<[VertexId; 8]>);

impl Simplex {
    pub fn new(mut vertices: Vec<VertexId>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::Invalid("empty simplex".into()));
        }
        vertices.sort_unstable();
        for w in vertices.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicateVertex(w[0]));
            }
        }
        Ok(Simplex(SmallVec::from_vec(vertices)))
    }

    /// Caller guarantees the slice is strictly increasing and nonempty.
    pub fn from_sorted(vertices: &[VertexId]) -> Self {
        debug_assert!(!vertices.is_empty());
        debug_assert!(vertices.windows(2).all(|w| w[0] < w[1]));
        Simplex(SmallVec::from_slice(vertices))
    }

    pub fn vertex(v: VertexId) -> Self {
        Simplex(SmallVec::from_slice(&[v]))
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.0
    }

    /// Face opposite the `i`-th vertex. Panics on a vertex.
    pub fn face(&self, i: usize) -> Simplex {
        assert!(self.0.len() > 1, "a vertex has no codimension-one faces");
        let mut v = self.0.clone();
        v.remove(i);
        Simplex(v)
    }

    pub fn facets(&self) -> impl Iterator<Item = (usize, Simplex)> + '_ {
        let n = if self.0.len() > 1 { self.0.len() } else { 0 };
        (0..n).map(move |i| (i, self.face(i)))
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn is_face_of(&self, other: &Simplex) -> bool {
        self.0.iter().all(|v| other.contains_vertex(*v))
    }

    /// All nonempty faces, including the simplex itself.
    pub fn all_faces(&self) -> Vec<Simplex> {
        let n = self.0.len();
        let mut out = Vec::with_capacity((1usize << n) - 1);
        for mask in 1u32..(1u32 << n) {
            let v: SmallVec<[VertexId; 8]> = (0..n)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| self.0[i])
                .collect();
            out.push(Simplex(v));
        }
        out
    }

    /// Front face on the first `k + 1` vertices.
    pub fn front(&self, k: usize) -> Simplex {
        Simplex(SmallVec::from_slice(&self.0[..=k]))
    }

    /// Back face on the last `k + 1` vertices.
    pub fn back(&self, k: usize) -> Simplex {
        let n = self.0.len();
        Simplex(SmallVec::from_slice(&self.0[n - k - 1..]))
    }

    pub fn union(&self, other: &Simplex) -> Simplex {
        let mut v: Vec<VertexId> = self.0.iter().chain(other.0.iter()).copied().collect();
        v.sort_unstable();
        v.dedup();
        Simplex(SmallVec::from_vec(v))
    }

    pub fn intersection(&self, other: &Simplex) -> Option<Simplex> {
        let v: SmallVec<[VertexId; 8]> =
            self.0.iter().copied().filter(|x| other.contains_vertex(*x)).collect();
        if v.is_empty() {
            None
        } else {
            Some(Simplex(v))
        }
    }

    /// Position of `v` in the sorted vertex list.
    pub fn position(&self, v: VertexId) -> Option<usize> {
        self.0.binary_search(&v).ok()
    }
}

impl fmt::Debug for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0.as_slice())
    }
}

/// A simplex with an orientation sign relative to its sorted vertex order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OrientedSimplex {
    pub simplex: Simplex,
    pub sign: i8,
}

impl OrientedSimplex {
    /// Orientation of an arbitrary vertex sequence.
    pub fn from_sequence(seq: &[VertexId]) -> Result<Self> {
        let simplex = Simplex::new(seq.to_vec())?;
        Ok(OrientedSimplex { sign: permutation_sign(seq), simplex })
    }

    pub fn negate(&self) -> Self {
        OrientedSimplex { simplex: self.simplex.clone(), sign: -self.sign }
    }
}

/// Sign of the permutation sorting `seq` (entries distinct).
pub fn permutation_sign(seq: &[VertexId]) -> i8 {
    let mut inv = 0usize;
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            if seq[i] > seq[j] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Address of a simplex inside a complex: (dimension, index in enumeration).
pub type SimplexKey = (usize, usize);

#[derive(Debug)]
pub struct Lineage {
    pub parent: Arc<SimplicialComplex>,
    /// Carrier in the parent of each vertex of the child.
    pub vertex_carrier: HashMap<VertexId, SimplexKey>,
    /// Child vertex placed at the barycenter of each parent simplex.
    pub barycenter: Vec<Vec<VertexId>>,
}

#[derive(Debug)]
pub struct SimplicialComplex {
    by_dim: Vec<Vec<Simplex>>,
    index: Vec<HashMap<Simplex, usize>>,
    cofacets: Vec<Vec<Vec<usize>>>,
    lineage: Option<Lineage>,
    labels: Option<HashMap<VertexId, String>>,
}

impl SimplicialComplex {
    fn from_simplex_set(all: BTreeSet<Simplex>, lineage: Option<Lineage>) -> Self {
        let top = all.iter().map(|s| s.dim()).max().unwrap_or(0);
        let mut by_dim: Vec<Vec<Simplex>> = vec![Vec::new(); top + 1];
        for s in all {
            by_dim[s.dim()].push(s);
        }
        for layer in &mut by_dim {
            layer.sort();
        }
        let index: Vec<HashMap<Simplex, usize>> = by_dim
            .iter()
            .map(|l| l.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect())
            .collect();
        let mut cofacets: Vec<Vec<Vec<usize>>> =
            by_dim.iter().map(|l| vec![Vec::new(); l.len()]).collect();
        for d in 1..by_dim.len() {
            for (j, s) in by_dim[d].iter().enumerate() {
                for (_, f) in s.facets() {
                    let fi = index[d - 1][&f];
                    cofacets[d - 1][fi].push(j);
                }
            }
        }
        SimplicialComplex { by_dim, index, cofacets, lineage, labels: None }
    }

    /// Face closure of the given facets.
    pub fn build(facets: &[Vec<VertexId>]) -> Result<Self> {
        if facets.is_empty() {
            return Err(Error::Invalid("empty facet list".into()));
        }
        let mut all = BTreeSet::new();
        for f in facets {
            let s = Simplex::new(f.clone())?;
            for face in s.all_faces() {
                all.insert(face);
            }
        }
        Ok(Self::from_simplex_set(all, None))
    }

    pub fn from_simplices<I: IntoIterator<Item = Simplex>>(simplices: I) -> Result<Self> {
        let mut all = BTreeSet::new();
        for s in simplices {
            for face in s.all_faces() {
                all.insert(face);
            }
        }
        if all.is_empty() {
            return Err(Error::Invalid("empty facet list".into()));
        }
        Ok(Self::from_simplex_set(all, None))
    }

    pub fn with_labels(mut self, labels: HashMap<VertexId, String>) -> Self {
        self.labels = Some(labels);
        self
    }

    pub fn label(&self, v: VertexId) -> String {
        self.labels
            .as_ref()
            .and_then(|m| m.get(&v).cloned())
            .unwrap_or_else(|| v.to_string())
    }

    pub fn labels(&self) -> Option<&HashMap<VertexId, String>> {
        self.labels.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.by_dim.len() - 1
    }

    pub fn simplices(&self, d: usize) -> &[Simplex] {
        self.by_dim.get(d).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn count(&self, d: usize) -> usize {
        self.simplices(d).len()
    }

    pub fn total_count(&self) -> usize {
        self.by_dim.iter().map(|l| l.len()).sum()
    }

    pub fn simplex(&self, key: SimplexKey) -> &Simplex {
        &self.by_dim[key.0][key.1]
    }

    pub fn index_of(&self, s: &Simplex) -> Option<usize> {
        self.index.get(s.dim()).and_then(|m| m.get(s).copied())
    }

    pub fn key_of(&self, s: &Simplex) -> Option<SimplexKey> {
        self.index_of(s).map(|i| (s.dim(), i))
    }

    pub fn contains(&self, s: &Simplex) -> bool {
        self.index_of(s).is_some()
    }

    /// Indices of the (d+1)-simplices having the d-simplex `i` as a face.
    pub fn cofacets(&self, d: usize, i: usize) -> &[usize] {
        &self.cofacets[d][i]
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.by_dim[0].iter().map(|s| s.0[0])
    }

    pub fn max_vertex(&self) -> VertexId {
        self.by_dim[0].last().map(|s| s.0[0]).unwrap_or(0)
    }

    pub fn lineage(&self) -> Option<&Lineage> {
        self.lineage.as_ref()
    }

    /// Number of barycentric subdivisions separating this complex from its base.
    pub fn depth(&self) -> usize {
        match &self.lineage {
            None => 0,
            Some(l) => 1 + l.parent.depth(),
        }
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.by_dim
            .iter()
            .enumerate()
            .map(|(d, l)| if d % 2 == 0 { l.len() as i64 } else { -(l.len() as i64) })
            .sum()
    }

    /// Carrier in the parent of a simplex of a subdivided complex.
    pub fn carrier(&self, s: &Simplex) -> Option<SimplexKey> {
        let lin = self.lineage.as_ref()?;
        s.vertices().iter().map(|v| lin.vertex_carrier[v]).max_by_key(|k| k.0)
    }

    /// All simplices containing `s` (including `s`), grouped by dimension.
    pub fn star_of(&self, s: &Simplex) -> Vec<Vec<usize>> {
        let Some(i0) = self.index_of(s) else {
            return Vec::new();
        };
        let d0 = s.dim();
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); self.dim() + 1];
        out[d0].push(i0);
        for d in d0..self.dim() {
            let mut next: BTreeSet<usize> = BTreeSet::new();
            for &i in &out[d] {
                next.extend(self.cofacets[d][i].iter().copied());
            }
            out[d + 1] = next.into_iter().collect();
        }
        out
    }

    /// Top-dimensional simplices are exactly the maximal ones.
    pub fn is_pure(&self) -> bool {
        let n = self.dim();
        (0..n).all(|d| self.cofacets[d].iter().all(|c| !c.is_empty()))
    }
}

/// First barycentric subdivision with lineage.
///
/// Original vertices keep their ids; the barycenter of a simplex of dimension
/// at least one gets a fresh id, allocated in (dim, enumeration) order after
/// every original id.
pub fn barycentric_subdivision(k: &Arc<SimplicialComplex>) -> Arc<SimplicialComplex> {
    let mut next = k.max_vertex() + 1;
    let mut barycenter: Vec<Vec<VertexId>> = Vec::with_capacity(k.dim() + 1);
    let mut vertex_carrier = HashMap::new();
    for d in 0..=k.dim() {
        let mut layer = Vec::with_capacity(k.count(d));
        for (i, s) in k.simplices(d).iter().enumerate() {
            let id = if d == 0 {
                s.vertices()[0]
            } else {
                let id = next;
                next += 1;
                id
            };
            vertex_carrier.insert(id, (d, i));
            layer.push(id);
        }
        barycenter.push(layer);
    }
    let mut all: BTreeSet<Simplex> = BTreeSet::new();
    for d in 0..=k.dim() {
        for (i, s) in k.simplices(d).iter().enumerate() {
            // flags ending at s
            let mut stack: Vec<(Simplex, Vec<VertexId>)> = vec![(s.clone(), vec![barycenter[d][i]])];
            while let Some((cur, chain)) = stack.pop() {
                if cur.dim() == 0 {
                    let mut sorted = chain.clone();
                    sorted.sort_unstable();
                    all.extend(Simplex::from_sorted(&sorted).all_faces());
                    continue;
                }
                for (_, f) in cur.facets() {
                    let fi = k.index_of(&f).expect("face closed");
                    let mut c = chain.clone();
                    c.push(barycenter[f.dim()][fi]);
                    stack.push((f, c));
                }
            }
        }
    }
    let lineage = Lineage { parent: k.clone(), vertex_carrier, barycenter };
    let mut out = SimplicialComplex::from_simplex_set(all, Some(lineage));
    if let Some(l) = &k.labels {
        out.labels = Some(l.clone());
    }
    Arc::new(out)
}

/// The child simplex of `sd(K)` spanned by the barycenters of a flag of `K`.
pub fn flag_simplex(sd: &SimplicialComplex, flag: &[Simplex]) -> Simplex {
    let lin = sd.lineage().expect("subdivided complex");
    let mut v: Vec<VertexId> = flag
        .iter()
        .map(|s| {
            let i = lin.parent.index_of(s).expect("flag in parent");
            lin.barycenter[s.dim()][i]
        })
        .collect();
    v.sort_unstable();
    Simplex::from_sorted(&v)
}

/// Face-closed subset of a complex, stored as one membership mask per dimension.
#[derive(Clone)]
pub struct Subcomplex {
    complex: Arc<SimplicialComplex>,
    mask: Vec<Vec<bool>>,
}

impl fmt::Debug for Subcomplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let counts: Vec<usize> = self.mask.iter().map(|m| m.iter().filter(|b| **b).count()).collect();
        write!(f, "Subcomplex{counts:?}")
    }
}

impl PartialEq for Subcomplex {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.complex, &other.complex) && self.mask == other.mask
    }
}

impl Subcomplex {
    pub fn empty(k: &Arc<SimplicialComplex>) -> Self {
        let mask = (0..=k.dim()).map(|d| vec![false; k.count(d)]).collect();
        Subcomplex { complex: k.clone(), mask }
    }

    pub fn whole(k: &Arc<SimplicialComplex>) -> Self {
        let mask = (0..=k.dim()).map(|d| vec![true; k.count(d)]).collect();
        Subcomplex { complex: k.clone(), mask }
    }

    /// Closure of the given simplices.
    pub fn closure<'a, I: IntoIterator<Item = &'a Simplex>>(k: &Arc<SimplicialComplex>, simplices: I) -> Result<Self> {
        let mut out = Self::empty(k);
        for s in simplices {
            out.insert_closed(s)?;
        }
        Ok(out)
    }

    pub fn from_keys<I: IntoIterator<Item = SimplexKey>>(k: &Arc<SimplicialComplex>, keys: I) -> Self {
        let mut out = Self::empty(k);
        for key in keys {
            let s = k.simplex(key).clone();
            out.insert_closed(&s).expect("key from this complex");
        }
        out
    }

    /// Full subcomplex spanned by a vertex set.
    pub fn spanned_by(k: &Arc<SimplicialComplex>, vertices: &BTreeSet<VertexId>) -> Self {
        let mut out = Self::empty(k);
        for d in 0..=k.dim() {
            for (i, s) in k.simplices(d).iter().enumerate() {
                if s.vertices().iter().all(|v| vertices.contains(v)) {
                    out.mask[d][i] = true;
                }
            }
        }
        out
    }

    /// Subcomplex from a predicate that is already face closed.
    pub fn from_predicate<F: Fn(&Simplex) -> bool>(k: &Arc<SimplicialComplex>, f: F) -> Self {
        let mut out = Self::empty(k);
        for d in 0..=k.dim() {
            for (i, s) in k.simplices(d).iter().enumerate() {
                if f(s) {
                    out.mask[d][i] = true;
                }
            }
        }
        debug_assert!(out.is_face_closed());
        out
    }

    fn insert_closed(&mut self, s: &Simplex) -> Result<()> {
        let Some(i) = self.complex.index_of(s) else {
            return Err(Error::Invalid(format!("simplex {s:?} not in complex")));
        };
        if self.mask[s.dim()][i] {
            return Ok(());
        }
        for f in s.all_faces() {
            let j = self.complex.index_of(&f).expect("face closed");
            self.mask[f.dim()][j] = true;
        }
        Ok(())
    }

    pub fn complex(&self) -> &Arc<SimplicialComplex> {
        &self.complex
    }

    pub fn contains_key(&self, d: usize, i: usize) -> bool {
        self.mask.get(d).map(|m| m[i]).unwrap_or(false)
    }

    pub fn contains(&self, s: &Simplex) -> bool {
        self.complex.index_of(s).map(|i| self.mask[s.dim()][i]).unwrap_or(false)
    }

    pub fn is_empty(&self) -> bool {
        self.mask.iter().all(|m| m.iter().all(|b| !b))
    }

    /// Dimension, `None` when empty.
    pub fn dim(&self) -> Option<usize> {
        (0..self.mask.len()).rev().find(|&d| self.mask[d].iter().any(|b| *b))
    }

    pub fn indices(&self, d: usize) -> impl Iterator<Item = usize> + '_ {
        self.mask
            .get(d)
            .into_iter()
            .flat_map(|m| m.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| i))
    }

    pub fn simplices(&self, d: usize) -> impl Iterator<Item = &Simplex> + '_ {
        self.indices(d).map(move |i| &self.complex.simplices(d)[i])
    }

    pub fn count(&self, d: usize) -> usize {
        self.indices(d).count()
    }

    pub fn vertex_set(&self) -> BTreeSet<VertexId> {
        self.simplices(0).map(|s| s.vertices()[0]).collect()
    }

    pub fn union(&self, other: &Subcomplex) -> Subcomplex {
        assert!(Arc::ptr_eq(&self.complex, &other.complex), "subcomplexes of different complexes");
        let mask = self
            .mask
            .iter()
            .zip(&other.mask)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| *x || *y).collect())
            .collect();
        Subcomplex { complex: self.complex.clone(), mask }
    }

    pub fn intersection(&self, other: &Subcomplex) -> Subcomplex {
        assert!(Arc::ptr_eq(&self.complex, &other.complex), "subcomplexes of different complexes");
        let mask = self
            .mask
            .iter()
            .zip(&other.mask)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| *x && *y).collect())
            .collect();
        Subcomplex { complex: self.complex.clone(), mask }
    }

    pub fn is_subset_of(&self, other: &Subcomplex) -> bool {
        self.mask
            .iter()
            .zip(&other.mask)
            .all(|(a, b)| a.iter().zip(b).all(|(x, y)| !*x || *y))
    }

    pub fn is_face_closed(&self) -> bool {
        for d in 1..self.mask.len() {
            for i in self.indices(d) {
                let s = &self.complex.simplices(d)[i];
                if s.facets().any(|(_, f)| !self.contains(&f)) {
                    return false;
                }
            }
        }
        true
    }

    /// First simplex of the ambient complex whose vertices lie in the subcomplex
    /// but which is not itself a member.
    pub fn fullness_witness(&self) -> Option<Simplex> {
        let verts = self.vertex_set();
        for d in 1..=self.complex.dim() {
            for (i, s) in self.complex.simplices(d).iter().enumerate() {
                if !self.mask[d][i] && s.vertices().iter().all(|v| verts.contains(v)) {
                    return Some(s.clone());
                }
            }
        }
        None
    }

    pub fn is_full(&self) -> bool {
        self.fullness_witness().is_none()
    }

    /// Simplices of the ambient complex disjoint from this subcomplex.
    pub fn complement(&self) -> Subcomplex {
        let verts = self.vertex_set();
        Subcomplex::from_predicate(&self.complex, |s| s.vertices().iter().all(|v| !verts.contains(v)))
    }

    /// Closure of the simplices meeting this subcomplex.
    pub fn closed_star(&self) -> Subcomplex {
        let verts = self.vertex_set();
        let mut out = Subcomplex::empty(&self.complex);
        for d in 0..=self.complex.dim() {
            for s in self.complex.simplices(d) {
                if s.vertices().iter().any(|v| verts.contains(v)) {
                    out.insert_closed(s).expect("own simplex");
                }
            }
        }
        out
    }

    /// Image in the barycentric subdivision `sd` of this subcomplex's complex.
    pub fn subdivided(&self, sd: &Arc<SimplicialComplex>) -> Subcomplex {
        let lin = sd.lineage().expect("subdivided complex");
        assert!(Arc::ptr_eq(&lin.parent, &self.complex), "not the parent complex");
        Subcomplex::from_predicate(sd, |s| {
            let (d, i) = sd.carrier(s).expect("lineage");
            self.mask[d][i]
        })
    }

    /// Push through any number of subdivisions down the lineage chain.
    pub fn pushed_to(&self, target: &Arc<SimplicialComplex>) -> Result<Subcomplex> {
        if Arc::ptr_eq(&self.complex, target) {
            return Ok(self.clone());
        }
        let lin = target.lineage().ok_or(Error::NotInLineage)?;
        let mid = self.pushed_to(&lin.parent)?;
        Ok(mid.subdivided(target))
    }
}

/// Subdivide once if needed so that every given subcomplex becomes full.
pub fn make_full(k: &Arc<SimplicialComplex>, zs: &[Subcomplex]) -> (Arc<SimplicialComplex>, Vec<Subcomplex>) {
    if zs.iter().all(|z| z.is_full()) {
        return (k.clone(), zs.to_vec());
    }
    let sd = barycentric_subdivision(k);
    let out = zs.iter().map(|z| z.subdivided(&sd)).collect();
    (sd, out)
}

/// Complement `C_Z` in `K`, derived neighborhood `N_Z` of `Z` in `sd(K)` and its frontier.
///
/// `N_Z` is the closed star of `sd(Z)` in the first derived subdivision. For a
/// full `Z` this is already a regular neighborhood.
pub struct Neighborhoods {
    pub complement: Subcomplex,
    pub derived: Arc<SimplicialComplex>,
    pub neighborhood: Subcomplex,
    pub frontier: Subcomplex,
}

pub fn neighborhoods(k: &Arc<SimplicialComplex>, z: &Subcomplex) -> Result<Neighborhoods> {
    if let Some(w) = z.fullness_witness() {
        return Err(Error::NotFull(format!("{w:?}")));
    }
    let complement = z.complement();
    let derived = barycentric_subdivision(k);
    let zd = z.subdivided(&derived);
    let neighborhood = if z.is_empty() { Subcomplex::empty(&derived) } else { zd.closed_star() };
    let frontier = neighborhood.intersection(&zd.complement());
    Ok(Neighborhoods { complement, derived, neighborhood, frontier })
}

/// Orientation signs of the top simplices, relative to their sorted vertex order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Orientation {
    pub dim: usize,
    pub signs: Vec<i8>,
}

/// Coherently orient the `n`-simplices of `k`, ignoring `(n-1)`-faces in `singular`.
///
/// Only faces with exactly two cofaces impose constraints. On failure the
/// error carries a closed walk of top simplices along which the sign
/// constraints are inconsistent.
pub fn orient(k: &SimplicialComplex, n: usize, singular: Option<&Subcomplex>) -> Result<Orientation> {
    orient_components(k, n, singular).map(|(o, _)| o)
}

/// Like [`orient`], but each connected piece of the regular part takes the
/// sign of its hinted top simplex. Hints are `(index, sign)` relative to the
/// sorted vertex order; two disagreeing hints on one piece are an error.
pub fn orient_with_hints(k: &SimplicialComplex, n: usize, singular: Option<&Subcomplex>, hints: &[(usize, i8)]) -> Result<Orientation> {
    let (mut o, comp) = orient_components(k, n, singular)?;
    let mut flip: HashMap<usize, (i8, usize)> = HashMap::new();
    for &(t, h) in hints {
        let f = h * o.signs[t];
        match flip.get(&comp[t]) {
            Some(&(g, first)) if g != f => {
                return Err(Error::Invalid(format!(
                    "orientation hints on {:?} and {:?} disagree",
                    k.simplices(n)[first].vertices(),
                    k.simplices(n)[t].vertices()
                )))
            }
            Some(_) => {}
            None => {
                flip.insert(comp[t], (f, t));
            }
        }
    }
    for (t, s) in o.signs.iter_mut().enumerate() {
        if let Some(&(f, _)) = flip.get(&comp[t]) {
            *s *= f;
        }
    }
    Ok(o)
}

/// One `(index, sign)` per connected piece of the regular part: the first top
/// simplex of the piece. Feeding these to [`orient_with_hints`] reproduces `o`.
pub fn orientation_hints(k: &SimplicialComplex, singular: Option<&Subcomplex>, o: &Orientation) -> Result<Vec<(usize, i8)>> {
    let (_, comp) = orient_components(k, o.dim, singular)?;
    let mut seen = BTreeSet::new();
    Ok((0..comp.len()).filter(|t| seen.insert(comp[*t])).map(|t| (t, o.signs[t])).collect())
}

/// Orientation together with the connected piece of each top simplex.
fn orient_components(k: &SimplicialComplex, n: usize, singular: Option<&Subcomplex>) -> Result<(Orientation, Vec<usize>)> {
    let tops = k.count(n);
    let mut signs: Vec<i8> = vec![0; tops];
    let mut parent: Vec<usize> = vec![usize::MAX; tops];
    let mut comp: Vec<usize> = vec![usize::MAX; tops];
    if n == 0 {
        return Ok((Orientation { dim: 0, signs: vec![1; tops] }, (0..tops).collect()));
    }
    // adjacency: (neighbor, required relative sign)
    let mut adj: Vec<Vec<(usize, i8)>> = vec![Vec::new(); tops];
    for (fi, f) in k.simplices(n - 1).iter().enumerate() {
        if singular.map(|s| s.contains(f)).unwrap_or(false) {
            continue;
        }
        let co = k.cofacets(n - 1, fi);
        if co.len() != 2 {
            continue;
        }
        let inc = |t: usize| -> i8 {
            let s = &k.simplices(n)[t];
            let extra = s.vertices().iter().position(|v| !f.contains_vertex(*v)).unwrap();
            if extra % 2 == 0 {
                1
            } else {
                -1
            }
        };
        // o(a)·inc(a) = −o(b)·inc(b)
        let rel = -inc(co[0]) * inc(co[1]);
        adj[co[0]].push((co[1], rel));
        adj[co[1]].push((co[0], rel));
    }
    for start in 0..tops {
        if signs[start] != 0 {
            continue;
        }
        signs[start] = 1;
        comp[start] = start;
        let mut queue = VecDeque::from([start]);
        while let Some(a) = queue.pop_front() {
            for &(b, rel) in &adj[a] {
                let want = signs[a] * rel;
                if signs[b] == 0 {
                    signs[b] = want;
                    parent[b] = a;
                    comp[b] = start;
                    queue.push_back(b);
                } else if signs[b] != want {
                    let path_to_root = |mut x: usize| {
                        let mut p = vec![x];
                        while parent[x] != usize::MAX {
                            x = parent[x];
                            p.push(x);
                        }
                        p
                    };
                    let pa = path_to_root(a);
                    let pb = path_to_root(b);
                    let common: BTreeSet<usize> = pa.iter().copied().collect();
                    let meet = *pb.iter().find(|x| common.contains(x)).unwrap();
                    let mut cycle: Vec<usize> = pa.iter().copied().take_while(|&x| x != meet).collect();
                    cycle.push(meet);
                    let tail: Vec<usize> = pb.iter().copied().take_while(|&x| x != meet).collect();
                    cycle.extend(tail.into_iter().rev());
                    let witness = cycle.iter().map(|&t| k.simplices(n)[t].clone()).collect();
                    return Err(Error::NonOrientable(witness));
                }
            }
        }
    }
    Ok((Orientation { dim: n, signs }, comp))
}

/// Push an orientation of `parent` to its barycentric subdivision.
pub fn subdivide_orientation(sd: &SimplicialComplex, o: &Orientation) -> Orientation {
    let lin = sd.lineage().expect("subdivided complex");
    let n = o.dim;
    let signs = sd
        .simplices(n)
        .iter()
        .map(|s| {
            let (d, i) = sd.carrier(s).unwrap();
            debug_assert_eq!(d, n);
            o.signs[i] * subdivision_sign(&lin.parent, sd, s)
        })
        .collect();
    Orientation { dim: n, signs }
}

/// Coefficient of a top-dimensional flag simplex of `sd` in the subdivision of
/// its sorted-oriented carrier.
///
/// Follows the cone recursion `sd σ = Σ_j (−1)^j b_σ * sd(∂_j σ)` with the
/// barycenter sorted last among the flag vertices.
pub fn subdivision_sign(parent: &SimplicialComplex, sd: &SimplicialComplex, s: &Simplex) -> i8 {
    let lin = sd.lineage().unwrap();
    let flag: Vec<&Simplex> = s.vertices().iter().map(|v| parent.simplex(lin.vertex_carrier[v])).collect();
    flag_sign(&flag)
}

/// Sign of a full flag `τ_0 < τ_1 < … < τ_m` (dims 0..m) inside sd(τ_m).
pub fn flag_sign(flag: &[&Simplex]) -> i8 {
    partial_flag_sign(flag)
}

/// Sign contribution of consecutive flag steps `τ_0 < … < τ_m`, each adding one vertex.
pub fn partial_flag_sign(flag: &[&Simplex]) -> i8 {
    let mut sign = 1i8;
    for w in flag.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        debug_assert_eq!(lo.dim() + 1, hi.dim());
        let added = hi.vertices().iter().position(|v| !lo.contains_vertex(*v)).unwrap();
        if (added + hi.dim()) % 2 == 1 {
            sign = -sign;
        }
    }
    sign
}
