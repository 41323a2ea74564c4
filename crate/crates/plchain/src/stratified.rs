//! Filtered pseudomanifolds, strata, perversities, allowability and intersection homology.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::algebra::groups::lattice_homology;
use crate::algebra::matrix::{smith_normal_form, Matrix, SparseMatrix};
use crate::algebra::{GroupPresentation, IntChain};
use crate::complex::{
    barycentric_subdivision, orient, subdivide_orientation, Orientation, Simplex, SimplexKey, SimplicialComplex,
    Subcomplex,
};
use crate::error::{Error, Result};

/// Complex with skeleta `X^0 ⊂ … ⊂ X^{n-1} = Σ ⊂ X^n = X` and an orientation of the regular part.
#[derive(Clone, Debug)]
pub struct FilteredPseudomanifold {
    pub complex: Arc<SimplicialComplex>,
    pub n: usize,
    /// `skeleta[i] = X^i` for `i < n`.
    pub skeleta: Vec<Subcomplex>,
    pub sigma: Subcomplex,
    pub orientation: Option<Orientation>,
}

impl FilteredPseudomanifold {
    /// Skeleta may be given sparsely as `(i, X^i)`; missing levels are filled
    /// with the next lower given level (or ∅).
    pub fn new(complex: Arc<SimplicialComplex>, skeleta: &[(usize, Subcomplex)]) -> Result<Self> {
        let n = complex.dim();
        let mut levels: Vec<Option<Subcomplex>> = vec![None; n];
        for (i, s) in skeleta {
            if *i >= n {
                if *i == n {
                    continue;
                }
                return Err(Error::Invalid(format!("skeleton {i} exceeds dimension {n}")));
            }
            if !Arc::ptr_eq(s.complex(), &complex) {
                return Err(Error::Invalid("skeleton on another complex".into()));
            }
            levels[*i] = Some(s.clone());
        }
        let mut filled = Vec::with_capacity(n);
        let mut prev = Subcomplex::empty(&complex);
        for l in levels {
            let cur = l.unwrap_or_else(|| prev.clone());
            if !prev.is_subset_of(&cur) {
                return Err(Error::Invalid("skeleta are not nested".into()));
            }
            if let Some(d) = cur.dim() {
                if d > filled.len() {
                    return Err(Error::Invalid(format!("skeleton {} has dimension {d}", filled.len())));
                }
            }
            filled.push(cur.clone());
            prev = cur;
        }
        let sigma = filled.last().cloned().unwrap_or_else(|| Subcomplex::empty(&complex));
        let orientation = orient(&complex, n, Some(&sigma)).ok();
        Ok(FilteredPseudomanifold { complex, n, skeleta: filled, sigma, orientation })
    }

    /// Trivial filtration (a manifold).
    pub fn manifold(complex: Arc<SimplicialComplex>) -> Result<Self> {
        Self::new(complex, &[])
    }

    pub fn orientation(&self) -> Result<&Orientation> {
        self.orientation.as_ref().ok_or_else(|| {
            match orient(&self.complex, self.n, Some(&self.sigma)) {
                Err(e) => e,
                Ok(_) => Error::Precondition("missing orientation".into()),
            }
        })
    }

    /// Level `i` of the filtration, with `X^n = X` and `X^{-1} = ∅` conventions.
    pub fn skeleton(&self, i: isize) -> Subcomplex {
        if i < 0 {
            Subcomplex::empty(&self.complex)
        } else if i as usize >= self.n {
            Subcomplex::whole(&self.complex)
        } else {
            self.skeleta[i as usize].clone()
        }
    }

    /// The same filtered space on the barycentric subdivision.
    pub fn subdivided(&self) -> Result<FilteredPseudomanifold> {
        let sd = barycentric_subdivision(&self.complex);
        let sk: Vec<(usize, Subcomplex)> = self.skeleta.iter().enumerate().map(|(i, s)| (i, s.subdivided(&sd))).collect();
        let mut out = FilteredPseudomanifold::new(sd.clone(), &sk)?;
        if let Some(o) = &self.orientation {
            out.orientation = Some(subdivide_orientation(&sd, o));
        }
        Ok(out)
    }

    /// Sum of the oriented n-simplices not in Σ.
    pub fn fundamental_chain(&self) -> Result<IntChain> {
        let o = self.orientation()?;
        let mut c = IntChain::zero(&self.complex, self.n);
        for (i, s) in o.signs.iter().enumerate() {
            if !self.sigma.contains_key(self.n, i) {
                c.add_term(i, *s as i64);
            }
        }
        Ok(c)
    }

    /// Combinatorial necessary conditions for a pseudomanifold.
    pub fn validate(&self) -> ValidationReport {
        let k = &self.complex;
        let n = self.n;
        let mut violations = Vec::new();
        for d in 0..n {
            for (i, s) in k.simplices(d).iter().enumerate() {
                if k.cofacets(d, i).is_empty() {
                    violations.push(format!("{s:?} is not a face of an {n}-simplex"));
                }
            }
        }
        if n > 0 {
            for (i, s) in k.simplices(n - 1).iter().enumerate() {
                if self.sigma.contains_key(n - 1, i) {
                    continue;
                }
                let c = k.cofacets(n - 1, i).len();
                if c != 2 {
                    violations.push(format!("{s:?} lies in {c} top simplices"));
                }
            }
        }
        for (i, s) in self.skeleta.iter().enumerate() {
            if !s.is_face_closed() {
                violations.push(format!("skeleton {i} is not face closed"));
            }
            if i > 0 && !self.skeleta[i - 1].is_subset_of(s) {
                violations.push(format!("skeleton {} is not inside skeleton {i}", i - 1));
            }
        }
        if self.orientation.is_none() {
            violations.push("regular part is not orientable".into());
        }
        ValidationReport { violations }
    }

    /// Connected components of each `X_i = X^i − X^{i-1}`, as open simplices.
    pub fn strata(&self) -> Vec<Stratum> {
        let k = &self.complex;
        let mut out = Vec::new();
        for i in 0..=self.n {
            let upper = self.skeleton(i as isize);
            let lower = self.skeleton(i as isize - 1);
            let mut members: Vec<SimplexKey> = Vec::new();
            for d in 0..=k.dim() {
                members.extend(upper.indices(d).filter(|&j| !lower.contains_key(d, j)).map(|j| (d, j)));
            }
            if members.is_empty() {
                continue;
            }
            let pos: HashMap<SimplexKey, usize> = members.iter().enumerate().map(|(a, b)| (*b, a)).collect();
            let mut uf = UnionFind::new(members.len());
            for (a, &(d, j)) in members.iter().enumerate() {
                if d == 0 {
                    continue;
                }
                for (_, f) in k.simplices(d)[j].facets() {
                    let fk = (d - 1, k.index_of(&f).unwrap());
                    if let Some(&b) = pos.get(&fk) {
                        uf.union(a, b);
                    }
                }
            }
            let mut groups: BTreeMap<usize, Vec<SimplexKey>> = BTreeMap::new();
            for (a, key) in members.iter().enumerate() {
                groups.entry(uf.find(a)).or_default().push(*key);
            }
            let mut comps: Vec<Vec<SimplexKey>> = groups.into_values().collect();
            comps.sort();
            for simplices in comps {
                out.push(Stratum { index: i, codim: self.n - i, simplices });
            }
        }
        out
    }

    pub fn singular_strata(&self) -> Vec<Stratum> {
        self.strata().into_iter().filter(|s| s.codim > 0).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stratum {
    pub index: usize,
    pub codim: usize,
    pub simplices: Vec<SimplexKey>,
}

impl Stratum {
    pub fn contains(&self, key: SimplexKey) -> bool {
        self.simplices.binary_search(&key).is_ok()
    }
}

/// Integer value per singular stratum, in the order of [`FilteredPseudomanifold::singular_strata`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Perversity {
    pub name: String,
    pub values: Vec<i64>,
}

impl Perversity {
    pub fn constant(x: &FilteredPseudomanifold, k: i64) -> Self {
        let m = x.singular_strata().len();
        Perversity { name: format!("const:{k}"), values: vec![k; m] }
    }

    pub fn zero(x: &FilteredPseudomanifold) -> Self {
        let mut p = Self::constant(x, 0);
        p.name = "zero".into();
        p
    }

    /// `t̄(Z) = codim Z − 2`.
    pub fn top(x: &FilteredPseudomanifold) -> Self {
        let values = x.singular_strata().iter().map(|s| s.codim as i64 - 2).collect();
        Perversity { name: "top".into(), values }
    }

    pub fn lower_middle(x: &FilteredPseudomanifold) -> Self {
        let values = x.singular_strata().iter().map(|s| (s.codim as i64 - 2).div_euclid(2)).collect();
        Perversity { name: "lower-middle".into(), values }
    }

    pub fn upper_middle(x: &FilteredPseudomanifold) -> Self {
        let values = x.singular_strata().iter().map(|s| (s.codim as i64 - 1).div_euclid(2)).collect();
        Perversity { name: "upper-middle".into(), values }
    }

    /// `zero`, `top`, `lower-middle`, `upper-middle`, or `const:<k>`.
    pub fn named(x: &FilteredPseudomanifold, name: &str) -> Result<Self> {
        match name {
            "zero" | "0" => Ok(Self::zero(x)),
            "top" | "t" => Ok(Self::top(x)),
            "lower-middle" | "m" => Ok(Self::lower_middle(x)),
            "upper-middle" | "n" => Ok(Self::upper_middle(x)),
            other => match other.strip_prefix("const:").and_then(|v| v.parse::<i64>().ok()) {
                Some(k) => Ok(Self::constant(x, k)),
                None => Err(Error::Invalid(format!("unknown perversity {other}"))),
            },
        }
    }

    pub fn sum(&self, other: &Perversity) -> Perversity {
        Perversity {
            name: format!("{}+{}", self.name, other.name),
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn le(&self, other: &Perversity) -> bool {
        self.values.iter().zip(&other.values).all(|(a, b)| a <= b)
    }
}

/// Per-stratum allowability verdict for a chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StratumCheck {
    pub stratum: usize,
    pub budget: i64,
    /// `None` for an empty intersection.
    pub chain_dim: Option<usize>,
    pub boundary_budget: i64,
    pub boundary_dim: Option<usize>,
}

impl StratumCheck {
    pub fn ok(&self) -> bool {
        self.chain_dim.map(|d| d as i64 <= self.budget).unwrap_or(true)
            && self.boundary_dim.map(|d| d as i64 <= self.boundary_budget).unwrap_or(true)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AllowabilityReport {
    pub checks: Vec<StratumCheck>,
}

impl AllowabilityReport {
    pub fn allowable(&self) -> bool {
        self.checks.iter().all(|c| c.ok())
    }
}

/// Dimension of `|S| ∩ Z` where `S` is a closed subcomplex and `Z` a stratum.
pub fn dim_meet(support: &Subcomplex, stratum: &Stratum) -> Option<usize> {
    stratum
        .simplices
        .iter()
        .filter(|&&(d, i)| support.contains_key(d, i))
        .map(|&(d, _)| d)
        .max()
}

/// Both allowability conditions, with supports taken modulo Σ.
pub fn allowability_check(x: &FilteredPseudomanifold, xi: &IntChain, p: &Perversity) -> AllowabilityReport {
    let i = xi.degree as i64;
    let rel = xi.modulo(&x.sigma);
    let support = rel.support();
    let bd = rel.boundary().modulo(&x.sigma);
    let bsupport = bd.support();
    let checks = x
        .singular_strata()
        .iter()
        .enumerate()
        .map(|(s, z)| StratumCheck {
            stratum: s,
            budget: i - z.codim as i64 + p.values[s],
            chain_dim: dim_meet(&support, z),
            boundary_budget: i - 1 - z.codim as i64 + p.values[s],
            boundary_dim: if bd.is_zero() { None } else { dim_meet(&bsupport, z) },
        })
        .collect();
    AllowabilityReport { checks }
}

/// Is a single `d`-simplex allowable in degree `d`?
pub fn simplex_allowable(x: &FilteredPseudomanifold, strata: &[Stratum], p: &Perversity, s: &Simplex) -> bool {
    let k = &x.complex;
    let d = s.dim() as i64;
    let faces = s.all_faces();
    strata.iter().enumerate().all(|(j, z)| {
        let m = faces
            .iter()
            .filter(|f| z.contains((f.dim(), k.index_of(f).unwrap())))
            .map(|f| f.dim() as i64)
            .max();
        m.map(|m| m <= d - z.codim as i64 + p.values[j]).unwrap_or(true)
    })
}

/// Basis of the intersection chain lattice in one degree.
#[derive(Clone, Debug)]
pub struct ChainLattice {
    pub degree: usize,
    /// Allowable simplices not in Σ (indices into the complex).
    pub allowable: Vec<usize>,
    allow_pos: HashMap<usize, usize>,
    clean: Vec<usize>,
    dirty: Vec<usize>,
    dirty_v: Matrix,
    dirty_v_inv: Matrix,
    dirty_rank: usize,
    /// Basis vectors as chains (simplex index, coefficient).
    pub basis: Vec<Vec<(usize, i64)>>,
}

impl ChainLattice {
    fn build(x: &FilteredPseudomanifold, strata: &[Stratum], p: &Perversity, k: usize) -> Result<Self> {
        let cx = &x.complex;
        let allowable: Vec<usize> = (0..cx.count(k))
            .filter(|&i| !x.sigma.contains_key(k, i) && simplex_allowable(x, strata, p, &cx.simplices(k)[i]))
            .collect();
        let allow_pos: HashMap<usize, usize> = allowable.iter().enumerate().map(|(a, b)| (*b, a)).collect();
        // rows: non-allowable (k-1)-simplices outside Σ
        let bad_rows: HashMap<usize, usize> = if k == 0 {
            HashMap::new()
        } else {
            (0..cx.count(k - 1))
                .filter(|&i| !x.sigma.contains_key(k - 1, i) && !simplex_allowable(x, strata, p, &cx.simplices(k - 1)[i]))
                .enumerate()
                .map(|(r, i)| (i, r))
                .collect()
        };
        let mut clean = Vec::new();
        let mut dirty = Vec::new();
        let mut dirty_entries: Vec<Vec<(usize, i64)>> = Vec::new();
        for &i in &allowable {
            let s = &cx.simplices(k)[i];
            let mut entries = Vec::new();
            if k > 0 {
                for (j, f) in s.facets() {
                    let fi = cx.index_of(&f).unwrap();
                    if let Some(&r) = bad_rows.get(&fi) {
                        entries.push((r, if j % 2 == 0 { 1 } else { -1 }));
                    }
                }
            }
            if entries.is_empty() {
                clean.push(i);
            } else {
                dirty.push(i);
                dirty_entries.push(entries);
            }
        }
        let mut m = Matrix::zeros(bad_rows.len(), dirty.len());
        for (c, e) in dirty_entries.iter().enumerate() {
            for &(r, v) in e {
                m[(r, c)] += v;
            }
        }
        let snf = smith_normal_form(&m);
        let r = snf.rank();
        let mut basis: Vec<Vec<(usize, i64)>> = clean.iter().map(|&i| vec![(i, 1)]).collect();
        for c in r..dirty.len() {
            let mut v = Vec::new();
            for (row, &i) in dirty.iter().enumerate() {
                let x = &snf.v[(row, c)];
                if !x.is_zero() {
                    v.push((i, x.to_i64().ok_or(Error::Overflow)?));
                }
            }
            v.sort_unstable();
            basis.push(v);
        }
        Ok(ChainLattice {
            degree: k,
            allowable,
            allow_pos,
            clean,
            dirty,
            dirty_v: snf.v,
            dirty_v_inv: snf.v_inv,
            dirty_rank: r,
            basis,
        })
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Lattice coordinates of a chain (mod Σ), or `None` if it is not an intersection chain.
    pub fn coords(&self, x: &FilteredPseudomanifold, c: &IntChain) -> Option<Vec<(usize, i64)>> {
        let c = c.modulo(&x.sigma);
        let clean_pos: HashMap<usize, usize> = self.clean.iter().enumerate().map(|(a, b)| (*b, a)).collect();
        let dirty_pos: HashMap<usize, usize> = self.dirty.iter().enumerate().map(|(a, b)| (*b, a)).collect();
        let mut out = Vec::new();
        let mut dv = vec![BigInt::zero(); self.dirty.len()];
        for (&i, &v) in &c.coeffs {
            if !self.allow_pos.contains_key(&i) {
                return None;
            }
            if let Some(&p) = clean_pos.get(&i) {
                out.push((p, v));
            } else {
                dv[dirty_pos[&i]] = BigInt::from(v);
            }
        }
        let w = self.dirty_v_inv.mul_vec(&dv);
        if w[..self.dirty_rank].iter().any(|x| !x.is_zero()) {
            return None;
        }
        for (j, x) in w[self.dirty_rank..].iter().enumerate() {
            if !x.is_zero() {
                out.push((self.clean.len() + j, x.to_i64()?));
            }
        }
        let _ = &self.dirty_v;
        out.sort_unstable();
        Some(out)
    }

    pub fn chain(&self, x: &FilteredPseudomanifold, v: &[(usize, i64)]) -> IntChain {
        let mut c = IntChain::zero(&x.complex, self.degree);
        for &(j, a) in v {
            for &(i, b) in &self.basis[j] {
                c.add_term(i, a * b);
            }
        }
        c
    }
}

/// `I^p̄H_k(X)` together with the lattices needed to move between chains and classes.
pub struct IntersectionHomology {
    pub space: FilteredPseudomanifold,
    pub perversity: Perversity,
    pub group: Arc<GroupPresentation>,
    pub lattice: ChainLattice,
}

impl IntersectionHomology {
    pub fn basis_chain(&self, j: usize) -> IntChain {
        self.lattice.chain(&self.space, &self.group.hom.basis[j])
    }

    pub fn class_of(&self, c: &IntChain) -> Result<Vec<BigInt>> {
        let v = self
            .lattice
            .coords(&self.space, c)
            .ok_or_else(|| Error::NotAllowable(format!("degree {} chain is not in the lattice", c.degree)))?;
        self.group.hom.class_of(&v)
    }
}

/// Simplicial intersection homology of the given triangulation, as homology
/// of the allowable lattice inside `C_*(X, Σ)`.
pub fn intersection_homology(x: &FilteredPseudomanifold, p: &Perversity, k: usize) -> Result<IntersectionHomology> {
    let strata = x.singular_strata();
    let lat_k = ChainLattice::build(x, &strata, p, k)?;
    let out = if k == 0 {
        SparseMatrix::new(0, lat_k.rank())
    } else {
        let lat_lo = ChainLattice::build(x, &strata, p, k - 1)?;
        lattice_boundary(x, &lat_k, &lat_lo)?
    };
    let inc = if k < x.n {
        let lat_hi = ChainLattice::build(x, &strata, p, k + 1)?;
        lattice_boundary(x, &lat_hi, &lat_k)?
    } else {
        SparseMatrix::new(lat_k.rank(), 0)
    };
    let group = lattice_homology(&inc, out, k)?;
    Ok(IntersectionHomology { space: x.clone(), perversity: p.clone(), group, lattice: lat_k })
}

fn lattice_boundary(x: &FilteredPseudomanifold, hi: &ChainLattice, lo: &ChainLattice) -> Result<SparseMatrix> {
    let mut m = SparseMatrix::new(lo.rank(), hi.rank());
    for j in 0..hi.rank() {
        let c = hi.chain(x, &[(j, 1)]).boundary();
        let v = lo
            .coords(x, &c)
            .ok_or_else(|| Error::NotAllowable("boundary left the intersection chain lattice".into()))?;
        m.columns[j] = v;
    }
    Ok(m)
}
