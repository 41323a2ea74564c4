//! Configurations and exact matrix identities for the duality maps.

use std::collections::BTreeSet;
use std::sync::Arc;

use plchain::algebra::{
    coboundary_map, cohomology_of_pair, connecting_map, inclusion_map, induced_by_chain_map, induced_by_cochain_map,
    IntChain, IntCochain,
};
use plchain::complex::{Orientation, Simplex, SimplicialComplex, Subcomplex, VertexId};
use plchain::duality::*;
use plchain::pl_chains::{pullback_cochain, subdivide_once};
use plchain::Result;
use rand::Rng;

use super::{rng, space};

/// One configuration of an identity, checked in every degree.
#[derive(Debug)]
pub struct Check {
    pub label: String,
    pub ok: bool,
    pub detail: String,
}

impl Check {
    fn from(label: String, r: Result<Vec<(usize, bool)>>) -> Check {
        match r {
            Ok(v) => {
                let bad: Vec<usize> = v.iter().filter(|(_, ok)| !ok).map(|(i, _)| *i).collect();
                let detail = if bad.is_empty() { format!("{} degrees", v.len()) } else { format!("fails in degrees {bad:?}") };
                Check { label, ok: bad.is_empty() && !v.is_empty(), detail }
            }
            Err(e) => Check { label, ok: false, detail: e.to_string() },
        }
    }
}

pub fn all_ok(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.ok)
}

pub fn span(k: &Arc<SimplicialComplex>, vs: &[VertexId]) -> Subcomplex {
    Subcomplex::spanned_by(k, &vs.iter().copied().collect())
}

pub fn context(name: &str) -> (Arc<SimplicialComplex>, Orientation, Subcomplex, DualityContext) {
    let x = space(name).pm;
    let ctx = DualityContext::for_space(&x).unwrap();
    (x.complex.clone(), x.orientation.clone().unwrap(), x.sigma.clone(), ctx)
}

/// The circle as a hexagon: original vertices 0, 1, 2 alternate with edge barycenters.
pub fn hexagon_context() -> (Arc<SimplicialComplex>, DualityContext) {
    let tri = space("sphere 1");
    let hex = plchain::complex::barycentric_subdivision(tri.complex());
    let o = plchain::complex::orient(&hex, 1, None).unwrap();
    let ctx = DualityContext::new(hex.clone(), o, Subcomplex::empty(&hex)).unwrap();
    (hex, ctx)
}

fn context_with(t: &Arc<SimplicialComplex>, o: &Orientation, s: Subcomplex) -> DualityContext {
    DualityContext::new(t.clone(), o.clone(), s).unwrap()
}

/// Compact nested pairs `(K, L) ⊂ (K′, L′)` avoiding `avoid`, spanned by random vertex sets.
fn compact_nest(k: &Arc<SimplicialComplex>, avoid: &BTreeSet<VertexId>, seed: u64) -> [Subcomplex; 4] {
    let mut r = rng(seed);
    let pool: Vec<VertexId> = k.vertices().filter(|v| !avoid.contains(v)).collect();
    let mut pick = |from: &[VertexId], p: f64| -> Vec<VertexId> { from.iter().copied().filter(|_| r.gen_bool(p)).collect() };
    let mut vk2 = pick(&pool, 0.6);
    if vk2.len() < 2 {
        vk2 = pool[..2].to_vec();
    }
    let vk = pick(&vk2, 0.7);
    let vl2 = pick(&vk2, 0.4);
    let vl: Vec<VertexId> = vl2.iter().copied().filter(|v| vk.contains(v)).collect();
    [span(k, &vk), span(k, &vl), span(k, &vk2), span(k, &vl2)]
}

fn compact_configs() -> Vec<(String, DualityContext, [Subcomplex; 4])> {
    let mut out = Vec::new();
    for seed in 0..4u64 {
        let (t, _, _, ctx) = context("torus2");
        let nest = compact_nest(&t, &BTreeSet::new(), seed);
        out.push((format!("torus2 seed {seed}"), ctx, nest));
    }
    let (t, _, _, ctx) = context("sphere 2");
    let nest = compact_nest(&t, &BTreeSet::new(), 7);
    out.push(("sphere 2".into(), ctx, nest));
    let (t, _, s, ctx) = context("suspension(torus2)");
    let nest = compact_nest(&t, &s.vertex_set(), 3);
    out.push(("suspension(torus2) equator".into(), ctx, nest));
    // an arc through 0 and 1 with its endpoints
    let (h, ctx) = hexagon_context();
    let b01 = h.lineage().unwrap().barycenter[1][0];
    let nest = [span(&h, &[0, b01]), span(&h, &[0]), span(&h, &[0, b01, 1]), span(&h, &[0, 1])];
    out.push(("hexagon arc".into(), ctx, nest));
    out
}

/// Full nested pairs `S ⊂ L ⊂ K`, `S ⊂ L′ ⊂ K′`, `(K, L) ⊂ (K′, L′)`, as spans of vertex sets.
fn full_configs() -> Vec<(String, DualityContext, [Subcomplex; 4])> {
    let mut out = Vec::new();
    let sets: [(&str, &[VertexId], &[VertexId], &[VertexId], &[VertexId]); 6] = [
        ("torus2", &[0, 1, 2], &[0], &[0, 1, 2, 3], &[0, 3]),
        ("torus2", &[0, 1, 2, 4], &[1, 2], &[0, 1, 2, 4, 5], &[1, 2, 5]),
        ("torus2", &[0, 1, 2, 3, 4, 5, 6], &[], &[0, 1, 2, 3, 4, 5, 6], &[6]),
        ("sphere 2", &[0, 1], &[0], &[0, 1, 2], &[0, 2]),
        ("suspension(torus2)", &[7, 8, 0, 1], &[7, 8], &[7, 8, 0, 1, 2], &[7, 8, 2]),
        ("suspension(torus2)", &[7, 8, 0, 1, 2, 3, 4, 5, 6], &[7, 8, 0], &[7, 8, 0, 1, 2, 3, 4, 5, 6], &[7, 8, 0, 3]),
    ];
    for (name, k, l, k2, l2) in sets {
        let (t, _, _, ctx) = context(name);
        let nest = [span(&t, k), span(&t, l), span(&t, k2), span(&t, l2)];
        out.push((format!("{name} K={k:?} L={l:?} K'={k2:?} L'={l2:?}"), ctx, nest));
    }
    let (h, ctx) = hexagon_context();
    let whole = Subcomplex::whole(&h);
    let nest = [whole.clone(), span(&h, &[0]), whole, span(&h, &[0, 1])];
    out.push(("hexagon K=X L=[0] L'=[0, 1]".into(), ctx, nest));
    out
}

/// `inclusion ∘ 𝔇 = 𝔇 ∘ restriction` for `(K, L) ⊂ (K′, L′)`.
pub fn dold_naturality() -> Vec<Check> {
    compact_configs()
        .into_iter()
        .map(|(label, ctx, [k, l, k2, l2])| {
            let r = (0..=ctx.n)
                .map(|i| {
                    let small = dold_duality(&ctx, &k, &l, i)?;
                    let big = dold_duality(&ctx, &k2, &l2, i)?;
                    let res = inclusion_map(big.source(), small.source())?;
                    let inc = inclusion_map(big.target(), small.target())?;
                    Ok((i, inc.after(&big.map)?.same_as(&small.map.after(&res)?)))
                })
                .collect();
            Check::from(label, r)
        })
        .collect()
}

/// `inclusion ∘ 𝒟 = 𝒟 ∘ restriction` for full `(K, L) ⊂ (K′, L′)` containing `S`.
pub fn gm_naturality() -> Vec<Check> {
    full_configs()
        .into_iter()
        .map(|(label, ctx, [k, l, k2, l2])| {
            let r = (0..=ctx.n)
                .map(|i| {
                    let small = gm_duality(&ctx, &k, &l, i)?;
                    let big = gm_duality(&ctx, &k2, &l2, i)?;
                    let res = inclusion_map(small.source(), big.source())?;
                    let inc = inclusion_map(small.target(), big.target())?;
                    Ok((i, inc.after(&small.map)?.same_as(&big.map.after(&res)?)))
                })
                .collect();
            Check::from(label, r)
        })
        .collect()
}

/// `𝔇_{K,L} ∘ δ = (−1)^n ∂ ∘ 𝔇_{L,J}` for compact `J ⊂ L ⊂ K`.
pub fn dold_boundary() -> Vec<Check> {
    compact_configs()
        .into_iter()
        .map(|(label, ctx, [_, j, k, l])| {
            // J = L ⊂ L′ ⊂ K′
            let n = ctx.n;
            let sign = if n % 2 == 0 { 1 } else { -1 };
            let open = |z: &Subcomplex| z.subdivided(&ctx.t1).union(&ctx.s1).complement();
            let r = (0..n)
                .map(|i| {
                    let delta = coboundary_map(&k, &l, &j, i)?;
                    let d_kl = dold_duality(&ctx, &k, &l, i + 1)?;
                    let d_lj = dold_duality(&ctx, &l, &j, i)?;
                    let bd = connecting_map(&open(&j), &open(&l), &open(&k), n - i)?;
                    Ok((i, d_kl.map.after(&delta)?.same_as(&bd.after(&d_lj.map)?.scale(sign))))
                })
                .collect();
            Check::from(label, r)
        })
        .collect()
}

/// `𝒟_{L,J} ∘ δ = (−1)^n ∂ ∘ 𝒟_{K,L}` for full `S ⊂ J ⊂ L ⊂ K`.
pub fn gm_boundary() -> Vec<Check> {
    full_configs()
        .into_iter()
        .map(|(label, ctx, [_, l, k2, l2])| {
            // J = L ⊂ L′ ⊂ K′
            let (k, l, j) = (k2, l2, l);
            let n = ctx.n;
            let sign = if n % 2 == 0 { 1 } else { -1 };
            let r = (0..n)
                .map(|i| {
                    let delta = coboundary_map(&j.complement(), &l.complement(), &k.complement(), i)?;
                    let d_kl = gm_duality(&ctx, &k, &l, i)?;
                    let d_lj = gm_duality(&ctx, &l, &j, i + 1)?;
                    let bd = connecting_map(&k, &l, &j, n - i)?;
                    Ok((i, d_lj.map.after(&delta)?.same_as(&bd.after(&d_kl.map)?.scale(sign))))
                })
                .collect();
            Check::from(label, r)
        })
        .collect()
}

/// `𝒟` computed with `S` and with a smaller `S′ ⊂ S` agree.
pub fn s_independence() -> Vec<Check> {
    let cases: [(&str, &[VertexId], &[VertexId], &[VertexId], &[VertexId]); 5] = [
        ("torus2", &[0], &[], &[0, 1, 2], &[0]),
        ("torus2", &[0, 1], &[0], &[0, 1, 2, 3], &[0, 1]),
        ("torus2", &[0, 1, 2], &[2], &[0, 1, 2, 3, 4, 5, 6], &[0, 1, 2]),
        ("sphere 2", &[0], &[], &[0, 1], &[0]),
        ("suspension(torus2)", &[7, 8, 0], &[7, 8], &[7, 8, 0, 1, 2], &[7, 8, 0]),
    ];
    cases
        .into_iter()
        .map(|(name, s, s2, k, l)| {
            let (t, o, _, _) = context(name);
            let big = context_with(&t, &o, span(&t, s));
            let small = context_with(&t, &o, span(&t, s2));
            let (k, l) = (span(&t, k), span(&t, l));
            let r = (0..=big.n)
                .map(|i| {
                    let a = gm_duality(&big, &k, &l, i)?;
                    let b = gm_duality(&small, &k, &l, i)?;
                    Ok((i, a.map.same_as(&b.map) && a.map.to_i64() == b.map.to_i64()))
                })
                .collect();
            Check::from(format!("{name} S={s:?} S'={s2:?}"), r)
        })
        .collect()
}

fn transport_sub(z: &Subcomplex, y: &Arc<SimplicialComplex>) -> Subcomplex {
    let k = z.complex();
    let all: Vec<&Simplex> = (0..=k.dim()).flat_map(|d| z.simplices(d)).collect();
    Subcomplex::closure(y, all).unwrap()
}

fn transport_chain(c: &IntChain, y: &Arc<SimplicialComplex>) -> Result<IntChain> {
    let terms: Vec<(Simplex, i64)> = c.terms().map(|(s, v)| (s.clone(), v)).collect();
    IntChain::from_simplices(y, c.degree, &terms)
}

fn transport_cochain(c: &IntCochain, y: &Arc<SimplicialComplex>) -> IntCochain {
    let k = &c.complex;
    let v: Vec<(usize, i64)> = c
        .to_vec()
        .into_iter()
        .map(|(i, x)| (y.index_of(&k.simplices(c.degree)[i]).unwrap(), x))
        .collect();
    IntCochain::from_vec(y, c.degree, &v)
}

/// Attaching `T` with `X ∩ T ⊂ S ⊂ L`: `incl ∘ 𝒟_X = 𝒟_Y ∘ (identification of sources)`.
pub fn expansion() -> Vec<Check> {
    type Case<'a> = (&'a str, &'a [VertexId], &'a [VertexId], &'a [VertexId], usize);
    let cases: [Case; 5] = [
        ("torus2", &[0], &[0, 1, 2], &[0], 1),
        ("torus2", &[0], &[0, 1, 2, 3], &[0, 3], 2),
        ("torus2", &[0, 1], &[0, 1, 2, 3, 4, 5, 6], &[0, 1, 4], 1),
        ("sphere 2", &[0], &[0, 1], &[0], 2),
        ("suspension(torus2)", &[7, 8], &[7, 8, 0, 1], &[7, 8], 1),
    ];
    cases
        .into_iter()
        .map(|(name, s, k, l, tdim)| {
            let label = format!("{name} S={s:?} K={k:?} L={l:?} T=Δ^{tdim}");
            Check::from(label, expansion_case(name, s, k, l, tdim))
        })
        .collect()
}

fn expansion_case(name: &str, s: &[VertexId], k: &[VertexId], l: &[VertexId], tdim: usize) -> Result<Vec<(usize, bool)>> {
    let (x, o, _, _) = context(name);
    let n = o.dim;
    let attach = s[0];
    let fresh = x.max_vertex() + 1;
    let mut tverts = vec![attach];
    tverts.extend((0..tdim as VertexId).map(|j| fresh + j));
    let mut facets: Vec<Vec<VertexId>> = x.simplices(n).iter().map(|f| f.vertices().to_vec()).collect();
    facets.push(tverts.clone());
    let y = Arc::new(SimplicialComplex::build(&facets)?);
    let signs = y
        .simplices(n)
        .iter()
        .map(|f| x.index_of(f).map(|i| o.signs[i]).unwrap_or(1))
        .collect();
    let oy = Orientation { dim: n, signs };
    let tsub = Subcomplex::closure(&y, [&Simplex::new(tverts)?])?;
    let (sx, kx, lx) = (span(&x, s), span(&x, k), span(&x, l));
    let ctx_x = context_with(&x, &o, sx.clone());
    let ctx_y = context_with(&y, &oy, transport_sub(&sx, &y).union(&tsub));
    let ky = transport_sub(&kx, &y).union(&tsub);
    let ly = transport_sub(&lx, &y).union(&tsub);
    (0..=n)
        .map(|i| {
            let dx = gm_duality(&ctx_x, &kx, &lx, i)?;
            let dy = gm_duality(&ctx_y, &ky, &ly, i)?;
            let top = induced_by_cochain_map(dx.source(), dy.source(), |c| Ok(transport_cochain(c, &y)))?;
            let bottom = induced_by_chain_map(dx.target(), dy.target(), |c| transport_chain(c, &y))?;
            Ok((i, top.is_isomorphism() && bottom.after(&dx.map)?.same_as(&dy.map.after(&top)?)))
        })
        .collect()
}

/// The cellular route through dual blocks equals the six-step composition.
pub fn route_equality() -> Vec<Check> {
    full_configs()
        .into_iter()
        .map(|(label, ctx, [k, l, _, _])| {
            let r = (0..=ctx.n)
                .map(|i| {
                    let a = gm_duality(&ctx, &k, &l, i)?;
                    let b = cellular_gm_duality(&ctx, &k, &l, i)?;
                    Ok((i, a.map.same_as(&b.map)))
                })
                .collect();
            Check::from(label, r)
        })
        .collect()
}

/// Every duality map produced over the configurations is invertible.
pub fn invertibility() -> Vec<Check> {
    let mut out: Vec<Check> = compact_configs()
        .into_iter()
        .map(|(label, ctx, [k, l, _, _])| {
            let r = (0..=ctx.n).map(|i| Ok((i, dold_duality(&ctx, &k, &l, i)?.is_isomorphism()))).collect();
            Check::from(format!("dold {label}"), r)
        })
        .collect();
    out.extend(full_configs().into_iter().map(|(label, ctx, [k, l, _, _])| {
        let r = (0..=ctx.n).map(|i| Ok((i, gm_duality(&ctx, &k, &l, i)?.is_isomorphism()))).collect();
        Check::from(format!("gm {label}"), r)
    }));
    out
}

/// `sd_* ∘ 𝔇_T ∘ P = 𝔇_{sd T}` where `P` pulls cochains back from the refinement.
pub fn triangulation_independence() -> Vec<Check> {
    let mut out = Vec::new();
    let gm_cases: [(&str, &[VertexId], &[VertexId]); 3] =
        [("torus2", &[0, 1, 2], &[0]), ("torus2", &[0, 1, 2, 3, 4], &[1, 4]), ("sphere 2", &[0, 1], &[1])];
    for (name, k, l) in gm_cases {
        let (t, _, _, ctx) = context(name);
        let (k, l) = (span(&t, k), span(&t, l));
        let r = refined_gm(&ctx, &k, &l);
        out.push(Check::from(format!("gm {name}"), r));
    }
    for (label, ctx, [k, l, _, _]) in compact_configs().into_iter().filter(|c| !c.0.starts_with("suspension")).take(3) {
        let r = refined_dold(&ctx, &k, &l);
        out.push(Check::from(format!("dold {label}"), r));
    }
    out
}

fn refined_context(ctx: &DualityContext) -> DualityContext {
    DualityContext::new(ctx.t1.clone(), ctx.orientation1.clone(), ctx.s1.clone()).unwrap()
}

fn refined_gm(ctx: &DualityContext, k: &Subcomplex, l: &Subcomplex) -> Result<Vec<(usize, bool)>> {
    let fine = refined_context(ctx);
    let (k1, l1) = (k.subdivided(&ctx.t1), l.subdivided(&ctx.t1));
    (0..=ctx.n)
        .map(|i| {
            let coarse = gm_duality(ctx, k, l, i)?;
            let refined = gm_duality(&fine, &k1, &l1, i)?;
            let (ck, cl) = (k.complement(), l.complement());
            let sd_open = cohomology_of_pair(&cl.subdivided(&ctx.t1), &ck.subdivided(&ctx.t1), i)?;
            let restrict = inclusion_map(refined.source(), &sd_open)?;
            let pull = induced_by_cochain_map(&sd_open, coarse.source(), |c| pullback_cochain(c, &ctx.t))?;
            let p = pull.after(&restrict)?;
            let sd = induced_by_chain_map(coarse.target(), refined.target(), |c| subdivide_once(c, &ctx.t1))?;
            Ok((i, sd.after(&coarse.map)?.after(&p)?.same_as(&refined.map)))
        })
        .collect()
}

fn refined_dold(ctx: &DualityContext, k: &Subcomplex, l: &Subcomplex) -> Result<Vec<(usize, bool)>> {
    let fine = refined_context(ctx);
    let (k1, l1) = (k.subdivided(&ctx.t1), l.subdivided(&ctx.t1));
    (0..=ctx.n)
        .map(|i| {
            let coarse = dold_duality(ctx, k, l, i)?;
            let refined = dold_duality(&fine, &k1, &l1, i)?;
            let p = induced_by_cochain_map(refined.source(), coarse.source(), |c| pullback_cochain(c, &ctx.t))?;
            let sd = induced_by_chain_map(coarse.target(), refined.target(), |c| subdivide_once(c, &fine.t1))?;
            Ok((i, sd.after(&coarse.map)?.after(&p)?.same_as(&refined.map)))
        })
        .collect()
}

/// `H^0(X − Σ)` and `H^0(X, Σ)` differ, so `Σ` cannot be excised from the open pair.
pub fn excision_counterexample() -> (String, String) {
    let (t, _, s, ctx) = context("suspension(torus2)");
    let open = cohomology_of_pair(&s.subdivided(&ctx.t1).complement(), &Subcomplex::empty(&ctx.t1), 0).unwrap();
    let rel = cohomology_of_pair(&Subcomplex::whole(&t), &s, 0).unwrap();
    (open.describe(), rel.describe())
}
