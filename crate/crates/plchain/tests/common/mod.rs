#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

pub mod duality_suite;
pub mod intersection_suite;

use plchain::algebra::{homology_of_pair, IntChain};
use plchain::complex::{Simplex, SimplicialComplex, Subcomplex, VertexId};
use plchain::corpus::{self, Space};
use plchain::stratified::FilteredPseudomanifold;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn space(name: &str) -> Space {
    corpus::generate(name).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// The same space on its first barycentric subdivision, with chains pushed along.
pub fn subdivided(sp: &Space) -> Space {
    let pm = sp.pm.subdivided().unwrap();
    let chains = sp
        .chains
        .iter()
        .map(|(n, c)| (n.clone(), plchain::pl_chains::subdivide_once(c, &pm.complex).unwrap()))
        .collect();
    Space { name: format!("sd {}", sp.name), pm, chains }
}

/// A chain on `count` random `d`-simplices with coefficients in `-3..=3` (zero dropped).
pub fn random_chain(k: &Arc<SimplicialComplex>, d: usize, count: usize, rng: &mut ChaCha8Rng) -> IntChain {
    let mut c = IntChain::zero(k, d);
    let m = k.count(d);
    if m == 0 {
        return c;
    }
    for _ in 0..count {
        let v = *[-3i64, -2, -1, 1, 2, 3].choose(rng).unwrap();
        c.add_term(rng.gen_range(0..m), v);
    }
    c
}

fn neighbors(k: &SimplicialComplex) -> BTreeMap<VertexId, Vec<VertexId>> {
    let mut out: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
    for e in k.simplices(1) {
        let v = e.vertices();
        out.entry(v[0]).or_default().push(v[1]);
        out.entry(v[1]).or_default().push(v[0]);
    }
    out
}

/// A random simple closed edge path, as a 1-cycle with unit coefficients.
pub fn random_loop(k: &Arc<SimplicialComplex>, rng: &mut ChaCha8Rng) -> IntChain {
    let nb = neighbors(k);
    let verts: Vec<VertexId> = nb.keys().copied().collect();
    loop {
        let mut path = vec![*verts.choose(rng).unwrap()];
        for _ in 0..4 * verts.len() {
            let cur = *path.last().unwrap();
            let prev = if path.len() > 1 { Some(path[path.len() - 2]) } else { None };
            let opts: Vec<VertexId> = nb[&cur].iter().copied().filter(|v| Some(*v) != prev).collect();
            let next = *opts.choose(rng).unwrap();
            if let Some(pos) = path.iter().position(|v| *v == next) {
                let cyc: Vec<VertexId> = path[pos..].to_vec();
                if cyc.len() < 3 {
                    break;
                }
                let terms: Vec<(Vec<VertexId>, i64)> =
                    (0..cyc.len()).map(|i| (vec![cyc[i], cyc[(i + 1) % cyc.len()]], 1)).collect();
                return IntChain::from_oriented(k, 1, &terms).unwrap();
            }
            path.push(next);
        }
    }
}

/// Pairs of edge-disjoint random loops.
pub fn transverse_loop_pairs(k: &Arc<SimplicialComplex>, count: usize, rng: &mut ChaCha8Rng) -> Vec<(IntChain, IntChain)> {
    let mut out = Vec::new();
    while out.len() < count {
        let a = random_loop(k, rng);
        let b = random_loop(k, rng);
        if a.terms().all(|(s, _)| b.coefficient(s) == 0) {
            out.push((a, b));
        }
    }
    out
}

/// Incoming and outgoing neighbor of `v` along a simple oriented loop.
fn through(c: &IntChain, v: VertexId) -> Option<(VertexId, VertexId)> {
    let (mut inn, mut out) = (None, None);
    for (s, x) in c.terms() {
        let vs = s.vertices();
        let (from, to) = if x > 0 { (vs[0], vs[1]) } else { (vs[1], vs[0]) };
        if to == v {
            inn = Some(from);
        }
        if from == v {
            out = Some(to);
        }
    }
    Some((inn?, out?))
}

/// Counterclockwise successor map on the link of `v`, read off the oriented triangles.
fn link_rotation(x: &FilteredPseudomanifold, v: VertexId) -> HashMap<VertexId, VertexId> {
    let o = x.orientation().unwrap();
    let mut next = HashMap::new();
    for (i, t) in x.complex.simplices(2).iter().enumerate() {
        let mut seq: Vec<VertexId> = t.vertices().to_vec();
        if o.signs[i] < 0 {
            seq.swap(0, 1);
        }
        if let Some(p) = seq.iter().position(|u| *u == v) {
            let a = seq[(p + 1) % 3];
            let b = seq[(p + 2) % 3];
            next.insert(a, b);
        }
    }
    next
}

/// Signed transverse intersection points of two edge-disjoint simple loops on
/// an oriented surface, as a 0-chain. At a common vertex `v`, `ξ` runs
/// `u → v → w` and `η` runs `p → v → q`; the sign is `+1` when `q` lies on the
/// counterclockwise arc from `w` to `u` and `p` on the other arc, `−1` in the
/// mirrored situation, and the point is a touching (weight 0) otherwise.
pub fn signed_count(x: &FilteredPseudomanifold, xi: &IntChain, eta: &IntChain) -> IntChain {
    let k = &x.complex;
    let mut out = IntChain::zero(k, 0);
    let vx: BTreeSet<VertexId> = xi.support().vertex_set().into_iter().collect();
    let vy: BTreeSet<VertexId> = eta.support().vertex_set().into_iter().collect();
    for &v in vx.intersection(&vy) {
        let (u, w) = through(xi, v).unwrap();
        let (p, q) = through(eta, v).unwrap();
        let next = link_rotation(x, v);
        let mut arc = BTreeSet::new();
        let mut cur = next[&w];
        while cur != u {
            arc.insert(cur);
            cur = next[&cur];
        }
        let sign = match (arc.contains(&q), arc.contains(&p)) {
            (true, false) => 1,
            (false, true) => -1,
            _ => 0,
        };
        if sign != 0 {
            out.add_term(k.index_of(&Simplex::vertex(v)).unwrap(), sign);
        }
    }
    out
}

pub fn betti(k: &Arc<SimplicialComplex>) -> Vec<usize> {
    let whole = Subcomplex::whole(k);
    let empty = Subcomplex::empty(k);
    (0..=k.dim()).map(|d| homology_of_pair(&whole, &empty, d).unwrap().free_rank()).collect()
}

/// Ranks of `I^p̄H_*` of the suspension of a closed `(n−1)`-manifold `L` whose
/// two suspension points carry perversity value `p`: cone formula on each
/// half, glued by Mayer–Vietoris.
pub fn suspension_ih_ranks(link_betti: &[usize], n: usize, p: i64) -> Vec<usize> {
    let cut = n as i64 - 1 - p;
    (0..=n)
        .map(|k| {
            let k = k as i64;
            let low = if k < cut { link_betti.get(k as usize).copied().unwrap_or(0) } else { 0 };
            let high = if k >= 1 && k - 1 >= cut { link_betti.get(k as usize - 1).copied().unwrap_or(0) } else { 0 };
            low + high
        })
        .collect()
}

/// Pairs of edge-disjoint random loops, most of them sharing a vertex.
pub fn meeting_loop_pairs(k: &Arc<SimplicialComplex>, count: usize, rng: &mut ChaCha8Rng) -> Vec<(IntChain, IntChain)> {
    let mut out = Vec::new();
    while out.len() < count {
        let (a, b) = transverse_loop_pairs(k, 1, rng).pop().unwrap();
        let meets = a.support().vertex_set().intersection(&b.support().vertex_set()).next().is_some();
        if meets || out.len() % 4 == 3 {
            out.push((a, b));
        }
    }
    out
}
