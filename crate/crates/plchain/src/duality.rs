//! Fundamental classes over compact subcomplexes, the Dold duality map and the
//! Goresky–MacPherson duality map, realized as integer matrices between
//! (co)homology presentations.
//!
//! Open sets are presented by complement complexes in the first derived
//! subdivision `T1` of the working triangulation `T`; neighborhoods are closed
//! stars of subdivided subcomplexes in `T1`.

use std::sync::Arc;

use num_bigint::BigInt;

use crate::algebra::{
    cap_product, cohomology_of_pair, homology_of_pair, inclusion_map, induced_by_chain_map, induced_by_cochain_map,
    GroupMap, GroupPresentation, IntChain, IntCochain,
};
use crate::complex::{
    barycentric_subdivision, flag_simplex, make_full, partial_flag_sign, subdivide_orientation, OrientedSimplex, Orientation,
    Simplex, SimplicialComplex, Subcomplex, VertexId,
};
use crate::error::{Error, Result};
use crate::pl_chains::{pullback_cochain, subdivide_once};
use crate::stratified::FilteredPseudomanifold;

/// Working data for duality on `X` with singular set `S`.
pub struct DualityContext {
    pub t: Arc<SimplicialComplex>,
    pub n: usize,
    pub orientation: Orientation,
    pub s: Subcomplex,
    pub t1: Arc<SimplicialComplex>,
    pub orientation1: Orientation,
    pub s1: Subcomplex,
}

impl DualityContext {
    /// `orientation` must be coherent on the `n`-simplices outside `s`.
    pub fn new(t: Arc<SimplicialComplex>, orientation: Orientation, s: Subcomplex) -> Result<Self> {
        if !Arc::ptr_eq(s.complex(), &t) {
            return Err(Error::Precondition("S lives on another complex".into()));
        }
        let n = orientation.dim;
        let t1 = barycentric_subdivision(&t);
        let orientation1 = subdivide_orientation(&t1, &orientation);
        let s1 = s.subdivided(&t1);
        Ok(DualityContext { t, n, orientation, s, t1, orientation1, s1 })
    }

    /// Context for a filtered pseudomanifold with `S = X^{n-2}`.
    pub fn for_space(x: &FilteredPseudomanifold) -> Result<Self> {
        let o = x.orientation()?.clone();
        Self::new(x.complex.clone(), o, x.sigma.clone())
    }

    fn check(&self, z: &Subcomplex) -> Result<()> {
        if !Arc::ptr_eq(z.complex(), &self.t) {
            return Err(Error::Precondition("subcomplex lives on another complex".into()));
        }
        Ok(())
    }

    fn meets_s(&self, z: &Subcomplex) -> bool {
        let sv = self.s.vertex_set();
        z.vertex_set().iter().any(|v| sv.contains(v))
    }

    /// Coherent sum of the `n`-simplices of a subcomplex of `T1`.
    fn top_chain(&self, z: &Subcomplex) -> IntChain {
        let mut c = IntChain::zero(&self.t1, self.n);
        for i in z.indices(self.n) {
            c.add_term(i, self.orientation1.signs[i] as i64);
        }
        c
    }
}

/// Fundamental class of `M = X − S` over a compact `K ⊂ M`.
pub struct FundamentalClassOver {
    pub neighborhood: Subcomplex,
    pub frontier: Subcomplex,
    pub representative: IntChain,
    pub group: Arc<GroupPresentation>,
    pub class: Vec<BigInt>,
}

pub fn fundamental_class_over(ctx: &DualityContext, k: &Subcomplex) -> Result<FundamentalClassOver> {
    ctx.check(k)?;
    if ctx.meets_s(k) {
        return Err(Error::Precondition("K meets the singular set".into()));
    }
    let k1 = k.subdivided(&ctx.t1);
    let neighborhood = k1.closed_star();
    let frontier = neighborhood.intersection(&k1.complement());
    let representative = ctx.top_chain(&neighborhood);
    let group = homology_of_pair(&neighborhood, &frontier, ctx.n)?;
    let class = group.class_of_chain(&representative)?;
    Ok(FundamentalClassOver { neighborhood, frontier, representative, group, class })
}

/// Which composition a duality map realizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DualityKind {
    Dold,
    GoreskyMacPherson,
    Cellular,
}

/// A duality isomorphism as a matrix, with its provenance.
#[derive(Clone, Debug)]
pub struct DualityMap {
    pub map: GroupMap,
    pub kind: DualityKind,
    pub degree: usize,
    pub n: usize,
    /// The factor `(−1)^{in}` included in the matrix.
    pub sign: i64,
}

impl DualityMap {
    pub fn source(&self) -> &Arc<GroupPresentation> {
        &self.map.source
    }

    pub fn target(&self) -> &Arc<GroupPresentation> {
        &self.map.target
    }

    pub fn is_isomorphism(&self) -> bool {
        self.map.is_isomorphism()
    }
}

fn dold_sign(i: usize, n: usize) -> i64 {
    if (i * n) % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Dold's cap of an `i`-cochain with an `n`-chain is `(−1)^{in + i(i−1)/2}` times
/// [`cap_product`]. With it the unsigned composite commutes with `d^*` and `∂_*`
/// on the nose, and `1 ↦ Γ` in degree 0.
fn dold_cap_sign(i: usize, n: usize) -> i64 {
    if (i * n + i * i.saturating_sub(1) / 2) % 2 == 0 {
        1
    } else {
        -1
    }
}

/// `H_k(C_{A1 ∪ S1}, C_{B1 ∪ S1})` in `T1`: the model of `H_k(M − A, M − B)`.
pub fn open_pair_homology(ctx: &DualityContext, a: &Subcomplex, b: &Subcomplex, k: usize) -> Result<Arc<GroupPresentation>> {
    let a1 = a.subdivided(&ctx.t1).union(&ctx.s1);
    let b1 = b.subdivided(&ctx.t1).union(&ctx.s1);
    homology_of_pair(&a1.complement(), &b1.complement(), k)
}

/// Dold duality `H^i(K,L) → H_{n−i}(M − L, M − K)` for compact `L ⊂ K ⊂ M`.
///
/// `K` and `L` must be full in `T`, so that their closed stars in `T1` are
/// regular neighborhoods; see [`dold_duality_auto`] otherwise.
pub fn dold_duality(ctx: &DualityContext, k: &Subcomplex, l: &Subcomplex, i: usize) -> Result<DualityMap> {
    ctx.check(k)?;
    ctx.check(l)?;
    if !l.is_subset_of(k) {
        return Err(Error::Precondition("L is not contained in K".into()));
    }
    if ctx.meets_s(k) {
        return Err(Error::Precondition("K is not compact in X − S".into()));
    }
    require_full(&[k, l])?;
    let n = ctx.n;
    let source = cohomology_of_pair(k, l, i)?;
    if i > n {
        let target = homology_of_pair(&Subcomplex::empty(&ctx.t1), &Subcomplex::empty(&ctx.t1), 0)?;
        let map = GroupMap::from_images(&source, &target, |_| Ok(vec![]))?;
        return Ok(DualityMap { map, kind: DualityKind::Dold, degree: i, n, sign: 1 });
    }
    let target = open_pair_homology(ctx, l, k, n - i)?;

    let k1 = k.subdivided(&ctx.t1);
    let l1 = l.subdivided(&ctx.t1);
    let nk = k1.closed_star();
    let nl = if l.is_empty() { Subcomplex::empty(&ctx.t1) } else { l1.closed_star() };
    // H^i(N_K, N_L) ≅ H^i(K1, L1) ≅ H^i(K, L)
    let nbhd = cohomology_of_pair(&nk, &nl, i)?;
    let sub = cohomology_of_pair(&k1, &l1, i)?;
    let restrict = inclusion_map(&nbhd, &sub)?;
    let pull = induced_by_cochain_map(&sub, &source, |c| pullback_cochain(c, &ctx.t))?;
    let to_nbhd = pull.after(&restrict)?.inverse()?;

    // cap with the fundamental chain of N_K − L
    let y = nk.intersection(&l1.complement());
    let gamma = ctx.top_chain(&y);
    let sign = dold_sign(i, n);
    let factor = sign * dold_cap_sign(i, n);
    let cap = GroupMap::from_images(&nbhd, &target, |j| {
        let alpha: IntCochain = nbhd.basis_cochain(j)?;
        let c = cap_product(&alpha, &gamma)?;
        target.class_of_chain(&c.scale(factor))
    })?;
    let map = cap.after(&to_nbhd)?;
    Ok(DualityMap { map, kind: DualityKind::Dold, degree: i, n, sign })
}

/// As [`dold_duality`], on the context refined once when `K` or `L` is not full.
/// Returns the refined context when one was built.
pub fn dold_duality_auto(
    ctx: &DualityContext,
    k: &Subcomplex,
    l: &Subcomplex,
    i: usize,
) -> Result<(Option<DualityContext>, Subcomplex, Subcomplex, DualityMap)> {
    if k.is_full() && l.is_full() {
        return Ok((None, k.clone(), l.clone(), dold_duality(ctx, k, l, i)?));
    }
    let fine = DualityContext::new(ctx.t1.clone(), ctx.orientation1.clone(), ctx.s1.clone())?;
    let (k1, l1) = (k.subdivided(&ctx.t1), l.subdivided(&ctx.t1));
    let map = dold_duality(&fine, &k1, &l1, i)?;
    Ok((Some(fine), k1, l1, map))
}

pub fn require_full(zs: &[&Subcomplex]) -> Result<()> {
    for z in zs {
        if let Some(w) = z.fullness_witness() {
            return Err(Error::NotFull(format!("{w:?}")));
        }
    }
    Ok(())
}

fn gm_check(ctx: &DualityContext, k: &Subcomplex, l: &Subcomplex) -> Result<()> {
    ctx.check(k)?;
    ctx.check(l)?;
    if !ctx.s.is_subset_of(l) {
        return Err(Error::Precondition("S is not contained in L".into()));
    }
    if !l.is_subset_of(k) {
        return Err(Error::Precondition("L is not contained in K".into()));
    }
    require_full(&[k, l])
}

/// `H^i(X − L, X − K)` presented by `H^i(C_L, C_K)` in `T`.
pub fn gm_source(ctx: &DualityContext, k: &Subcomplex, l: &Subcomplex, i: usize) -> Result<Arc<GroupPresentation>> {
    ctx.check(k)?;
    cohomology_of_pair(&l.complement(), &k.complement(), i)
}

/// Goresky–MacPherson duality `H^i(X − L, X − K) → H_{n−i}(K, L)` for
/// `S ⊂ L ⊂ K` full in `T`.
///
/// Composed of Dold duality on the compact pair `(C_L, C_K)` of `M`, excision of
/// `S`, and the homotopy equivalence `(K, L) ≃ (X − C_K, X − C_L)` inverted.
pub fn gm_duality(ctx: &DualityContext, k: &Subcomplex, l: &Subcomplex, i: usize) -> Result<DualityMap> {
    gm_check(ctx, k, l)?;
    let n = ctx.n;
    let (ck, cl) = (k.complement(), l.complement());
    let dold = dold_duality(ctx, &cl, &ck, i)?;
    let source = dold.source().clone();
    let target = homology_of_pair(k, l, n.saturating_sub(i))?;
    if i > n {
        let map = GroupMap::from_images(&source, &target, |_| Ok(vec![]))?;
        return Ok(DualityMap { map, kind: DualityKind::GoreskyMacPherson, degree: i, n, sign: 1 });
    }
    let d = n - i;
    // excise S: H_d(C_{CK1 ∪ S1}, C_{CL1 ∪ S1}) → H_d(C_{CK1}, C_{CL1})
    let ck1 = ck.subdivided(&ctx.t1);
    let cl1 = cl.subdivided(&ctx.t1);
    let open = homology_of_pair(&ck1.complement(), &cl1.complement(), d)?;
    let excise = inclusion_map(dold.target(), &open)?;
    // (K1, L1) ⊂ (C_{CK1}, C_{CL1}) and sd: (K, L) → (K1, L1)
    let k1 = k.subdivided(&ctx.t1);
    let l1 = l.subdivided(&ctx.t1);
    let sub = homology_of_pair(&k1, &l1, d)?;
    let incl = inclusion_map(&sub, &open)?;
    let sd = induced_by_chain_map(&target, &sub, |c| subdivide_once(c, &ctx.t1))?;
    let back = incl.after(&sd)?.inverse()?;
    let map = back.after(&excise.after(&dold.map)?)?;
    Ok(DualityMap { map, kind: DualityKind::GoreskyMacPherson, degree: i, n, sign: dold.sign })
}

/// As [`gm_duality`], subdividing once first if `K` or `L` is not full.
/// Returns the context actually used.
pub fn gm_duality_auto(
    t: &Arc<SimplicialComplex>,
    orientation: &Orientation,
    s: &Subcomplex,
    k: &Subcomplex,
    l: &Subcomplex,
    i: usize,
) -> Result<(DualityContext, Subcomplex, Subcomplex, DualityMap)> {
    let (t2, zs) = make_full(t, &[s.clone(), k.clone(), l.clone()]);
    let o2 = if Arc::ptr_eq(&t2, t) { orientation.clone() } else { subdivide_orientation(&t2, orientation) };
    let ctx = DualityContext::new(t2, o2, zs[0].clone())?;
    let map = gm_duality(&ctx, &zs[1], &zs[2], i)?;
    Ok((ctx, zs[1].clone(), zs[2].clone(), map))
}

/// Ascending flags `σ = τ_0 < τ_1 < … < τ_m` inside `y` ending in an `n`-simplex,
/// with the sign orienting the dual block `D(σ)` so that `σ` followed by `D(σ)`
/// matches the ambient orientation.
pub fn dual_flags(t: &SimplicialComplex, y: &Subcomplex, n: usize, signs: &[i8], sigma: &Simplex) -> Vec<(Vec<Simplex>, i8)> {
    let mut out = Vec::new();
    let mut stack: Vec<Vec<Simplex>> = vec![vec![sigma.clone()]];
    while let Some(flag) = stack.pop() {
        let last = flag.last().unwrap();
        if last.dim() == n {
            let top = t.index_of(last).unwrap();
            let refs: Vec<&Simplex> = flag.iter().collect();
            out.push((flag.clone(), signs[top] * partial_flag_sign(&refs)));
            continue;
        }
        let Some(li) = t.index_of(last) else { continue };
        for &c in t.cofacets(last.dim(), li) {
            let up = &t.simplices(last.dim() + 1)[c];
            if y.contains(up) {
                let mut f = flag.clone();
                f.push(up.clone());
                stack.push(f);
            }
        }
    }
    out
}

/// Oriented dual block `D(σ)` as a chain of `T1`.
pub fn dual_block(ctx: &DualityContext, sigma: &Simplex) -> Result<IntChain> {
    if !ctx.t.contains(sigma) {
        return Err(Error::Invalid(format!("{sigma:?} not in complex")));
    }
    let whole = Subcomplex::whole(&ctx.t);
    let mut out = IntChain::zero(&ctx.t1, ctx.n - sigma.dim());
    for (flag, eps) in dual_flags(&ctx.t, &whole, ctx.n, &ctx.orientation.signs, sigma) {
        let s = flag_simplex(&ctx.t1, &flag);
        out.add_term(ctx.t1.index_of(&s).unwrap(), eps as i64);
    }
    Ok(out)
}

/// Duality `H^i(C_L, C_K) → H_{n−i}(K, L)` on a space `y ⊂ T` that is a union of
/// `n`-simplices, computed from dual blocks.
///
/// A cocycle `β` on `T` is lifted to `sd T` as `π^*β`, where `π` sends the
/// barycenter of `ρ` to a vertex of `ρ` outside `K` (else outside `L`); the
/// coefficient of `σ ∈ K − L` is `(−1)^{i(i−1)/2} β(π_# D(σ))`, the sign combining
/// `(−1)^{in}` with Dold's cap convention. No subdivision is
/// materialized. Complements are taken inside `y`; `K` and `L` must be full.
pub fn block_duality(
    t: &Arc<SimplicialComplex>,
    y: &Subcomplex,
    n: usize,
    signs: &[i8],
    k: &Subcomplex,
    l: &Subcomplex,
    i: usize,
) -> Result<GroupMap> {
    let cl = l.complement().intersection(y);
    let ck = k.complement().intersection(y);
    let source = cohomology_of_pair(&cl, &ck, i)?;
    let target = homology_of_pair(k, l, n.saturating_sub(i))?;
    if i > n {
        return GroupMap::from_images(&source, &target, |_| Ok(vec![]));
    }
    let d = n - i;
    let kv = k.vertex_set();
    let lv = l.vertex_set();
    let pi = |rho: &Simplex| -> VertexId {
        let vs = rho.vertices();
        vs.iter()
            .find(|v| !kv.contains(v))
            .or_else(|| vs.iter().find(|v| !lv.contains(v)))
            .copied()
            .unwrap_or(vs[0])
    };
    let mut blocks: Vec<(usize, Vec<(usize, i64)>)> = Vec::new();
    for (si, s) in t.simplices(d).iter().enumerate() {
        if !k.contains_key(d, si) || l.contains_key(d, si) {
            continue;
        }
        let mut acc: std::collections::BTreeMap<usize, i64> = Default::default();
        for (flag, eps) in dual_flags(t, y, n, signs, s) {
            let seq: Vec<VertexId> = flag.iter().map(pi).collect();
            let Ok(os) = OrientedSimplex::from_sequence(&seq) else { continue };
            let idx = t.index_of(&os.simplex).expect("face of the top simplex");
            *acc.entry(idx).or_insert(0) += eps as i64 * os.sign as i64;
        }
        acc.retain(|_, v| *v != 0);
        blocks.push((si, acc.into_iter().collect()));
    }
    let sign = dold_sign(i, n) * dold_cap_sign(i, n);
    GroupMap::from_images(&source, &target, |j| {
        let beta = source.basis_cochain(j)?;
        let mut c = IntChain::zero(t, d);
        for (si, block) in &blocks {
            let v: i64 = block.iter().map(|(idx, x)| x * beta.value_at(*idx)).sum();
            c.add_term(*si, sign * v);
        }
        target.class_of_chain(&c)
    })
}

/// Goresky–MacPherson duality through the dual-block decomposition. Agrees
/// with [`gm_duality`] as a matrix.
pub fn cellular_gm_duality(ctx: &DualityContext, k: &Subcomplex, l: &Subcomplex, i: usize) -> Result<DualityMap> {
    gm_check(ctx, k, l)?;
    let whole = Subcomplex::whole(&ctx.t);
    let map = block_duality(&ctx.t, &whole, ctx.n, &ctx.orientation.signs, k, l, i)?;
    Ok(DualityMap { map, kind: DualityKind::Cellular, degree: i, n: ctx.n, sign: dold_sign(i, ctx.n) })
}
