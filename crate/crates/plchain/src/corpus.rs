//! Named example spaces with canonical stratifications and standard chains.

use std::collections::HashMap;
use std::sync::Arc;

use crate::algebra::IntChain;
use crate::complex::{Orientation, Simplex, SimplicialComplex, Subcomplex, VertexId};
use crate::error::{Error, Result};
use crate::product::ProductComplex;
use crate::stratified::FilteredPseudomanifold;

/// A filtered space together with named chains on it.
#[derive(Clone, Debug)]
pub struct Space {
    pub name: String,
    pub pm: FilteredPseudomanifold,
    pub chains: Vec<(String, IntChain)>,
}

impl Space {
    pub fn chain(&self, name: &str) -> Option<&IntChain> {
        self.chains.iter().find(|(n, _)| n == name).map(|(_, c)| c)
    }

    pub fn complex(&self) -> &Arc<SimplicialComplex> {
        &self.pm.complex
    }
}

fn space_from_facets(name: &str, facets: &[Vec<VertexId>]) -> Result<(Arc<SimplicialComplex>, FilteredPseudomanifold)> {
    let k = Arc::new(SimplicialComplex::build(facets)?);
    let pm = FilteredPseudomanifold::manifold(k.clone())?;
    let _ = name;
    Ok((k, pm))
}

fn with_fundamental(mut space: Space) -> Space {
    if let Ok(g) = space.pm.fundamental_chain() {
        space.chains.insert(0, ("fundamental".into(), g));
    }
    space
}

/// `Δ^n`.
pub fn simplex(n: usize) -> Result<Space> {
    let facet: Vec<VertexId> = (0..=n as VertexId).collect();
    let (_, pm) = space_from_facets("simplex", &[facet])?;
    Ok(Space { name: format!("simplex {n}"), pm, chains: Vec::new() })
}

/// `∂Δ^{n+1}`.
pub fn sphere(n: usize) -> Result<Space> {
    let all: Vec<VertexId> = (0..=(n as VertexId + 1)).collect();
    let facets: Vec<Vec<VertexId>> = (0..all.len())
        .map(|i| all.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, v)| *v).collect())
        .collect();
    let (k, pm) = space_from_facets("sphere", &facets)?;
    let mut chains = Vec::new();
    if n == 2 {
        // any two triangles of the tetrahedron share an edge, so one loop only
        chains.push(("equator".into(), IntChain::from_oriented(&k, 1, &[(vec![0, 1], 1), (vec![1, 2], 1), (vec![2, 0], 1)])?));
    }
    Ok(with_fundamental(Space { name: format!("sphere {n}"), pm, chains }))
}

/// Boundary of an `m`-gon.
pub fn circle(m: usize) -> Result<Space> {
    if m < 3 {
        return Err(Error::Invalid("a polygon needs at least 3 vertices".into()));
    }
    let facets: Vec<Vec<VertexId>> = (0..m as VertexId).map(|i| vec![i, (i + 1) % m as VertexId]).collect();
    let (_, pm) = space_from_facets("circle", &facets)?;
    Ok(with_fundamental(Space { name: format!("circle {m}"), pm, chains: Vec::new() }))
}

/// Seven-vertex torus with triangles `{i, i+1, i+3}` and `{i, i+2, i+3}` mod 7.
pub fn torus2() -> Result<Space> {
    let mut facets = Vec::new();
    for i in 0..7u32 {
        facets.push(vec![i, (i + 1) % 7, (i + 3) % 7]);
        facets.push(vec![i, (i + 2) % 7, (i + 3) % 7]);
    }
    let (k, pm) = space_from_facets("torus2", &facets)?;
    let meridian = IntChain::from_oriented(&k, 1, &[(vec![0, 1], 1), (vec![1, 2], 1), (vec![2, 0], 1)])?;
    let longitude = IntChain::from_oriented(&k, 1, &[(vec![0, 3], 1), (vec![3, 6], 1), (vec![6, 0], 1)])?;
    let chains = vec![("meridian".into(), meridian), ("longitude".into(), longitude)];
    Ok(with_fundamental(Space { name: "torus2".into(), pm, chains }))
}

/// Six-vertex real projective plane.
pub fn projplane() -> Result<Space> {
    let facets: Vec<Vec<VertexId>> = vec![
        vec![0, 1, 2],
        vec![0, 2, 3],
        vec![0, 3, 4],
        vec![0, 4, 5],
        vec![0, 5, 1],
        vec![1, 2, 4],
        vec![2, 3, 5],
        vec![3, 4, 1],
        vec![4, 5, 2],
        vec![5, 1, 3],
    ];
    let (_, pm) = space_from_facets("projplane", &facets)?;
    Ok(Space { name: "projplane".into(), pm, chains: Vec::new() })
}

/// Sphere with two points identified: a square cylinder whose two boundary
/// squares are coned to one apex.
pub fn pinched_torus() -> Result<Space> {
    let a = |i: u32| i % 4;
    let b = |i: u32| 4 + i % 4;
    let p = 8u32;
    let mut facets = Vec::new();
    for i in 0..4u32 {
        facets.push(vec![a(i), a(i + 1), b(i)]);
        facets.push(vec![a(i + 1), b(i), b(i + 1)]);
        facets.push(vec![p, a(i), a(i + 1)]);
        facets.push(vec![p, b(i), b(i + 1)]);
    }
    let k = Arc::new(SimplicialComplex::build(&facets)?);
    let apex = Subcomplex::closure(&k, [&Simplex::vertex(p)])?;
    let pm = FilteredPseudomanifold::new(k.clone(), &[(0, apex)])?;
    // the pinched meridian runs from the apex down one side and back up the other
    let loop_chain = IntChain::from_oriented(&k, 1, &[(vec![8, 0], 1), (vec![0, 4], 1), (vec![4, 8], 1)])?;
    let belt = IntChain::from_oriented(&k, 1, &[(vec![0, 1], 1), (vec![1, 5], 1), (vec![5, 6], 1), (vec![6, 2], 1), (vec![2, 3], 1), (vec![3, 0], 1)]);
    let mut chains = vec![("pinch-loop".into(), loop_chain)];
    if let Ok(b) = belt {
        chains.push(("belt".into(), b));
    }
    Ok(with_fundamental(Space { name: "pinched-torus".into(), pm, chains }))
}

fn relabel(base: &SimplicialComplex) -> HashMap<VertexId, String> {
    base.vertices().map(|v| (v, base.label(v))).collect()
}

/// Suspension with apexes `N`, `S`; the filtration is suspended, with the apexes in `X^0`.
pub fn suspension(x: &Space) -> Result<Space> {
    let base = x.complex();
    let north = base.max_vertex() + 1;
    let south = north + 1;
    let mut facets = Vec::new();
    for s in maximal(base) {
        for apex in [north, south] {
            let mut f = s.vertices().to_vec();
            f.push(apex);
            facets.push(f);
        }
    }
    let mut labels = relabel(base);
    labels.insert(north, "N".into());
    labels.insert(south, "S".into());
    let k = Arc::new(SimplicialComplex::build(&facets)?.with_labels(labels));
    let suspend = |sub: &Subcomplex| -> Result<Subcomplex> {
        let mut gens: Vec<Simplex> = vec![Simplex::vertex(north), Simplex::vertex(south)];
        for d in 0..=base.dim() {
            for s in sub.simplices(d) {
                for apex in [north, south] {
                    gens.push(s.union(&Simplex::vertex(apex)));
                }
            }
        }
        Subcomplex::closure(&k, gens.iter())
    };
    let n = base.dim() + 1;
    let mut skeleta = Vec::new();
    skeleta.push((0, Subcomplex::closure(&k, [&Simplex::vertex(north), &Simplex::vertex(south)])?));
    for j in 1..n {
        skeleta.push((j, suspend(&x.pm.skeleton(j as isize - 1))?));
    }
    let pm = FilteredPseudomanifold::new(k.clone(), &skeleta)?;
    let mut chains = Vec::new();
    for (name, c) in &x.chains {
        if name == "fundamental" || !c.boundary().is_zero() {
            continue;
        }
        chains.push((format!("suspended-{name}"), suspend_chain(&k, c, north, south)?));
    }
    Ok(with_fundamental(Space { name: format!("suspension({})", x.name), pm, chains }))
}

/// `N * c − S * c` for a cycle `c`, with the apex written last.
pub fn suspend_chain(k: &Arc<SimplicialComplex>, c: &IntChain, north: VertexId, south: VertexId) -> Result<IntChain> {
    let mut out = IntChain::zero(k, c.degree + 1);
    for (s, v) in c.terms() {
        // apex ids exceed every base id, so appending keeps the sorted order
        for (apex, sign) in [(north, 1i64), (south, -1i64)] {
            let t = s.union(&Simplex::vertex(apex));
            out.add_term(k.index_of(&t).ok_or_else(|| Error::Invalid("suspension simplex".into()))?, sign * v);
        }
    }
    Ok(out)
}

/// Closed cone with apex `c`; the apex is the bottom stratum.
pub fn cone(x: &Space) -> Result<Space> {
    let base = x.complex();
    let apex = base.max_vertex() + 1;
    let facets: Vec<Vec<VertexId>> = maximal(base)
        .into_iter()
        .map(|s| {
            let mut f = s.vertices().to_vec();
            f.push(apex);
            f
        })
        .collect();
    let mut labels = relabel(base);
    labels.insert(apex, "c".into());
    let k = Arc::new(SimplicialComplex::build(&facets)?.with_labels(labels));
    let n = base.dim() + 1;
    let mut skeleta = vec![(0, Subcomplex::closure(&k, [&Simplex::vertex(apex)])?)];
    for j in 1..n {
        let sub = x.pm.skeleton(j as isize - 1);
        let mut gens = vec![Simplex::vertex(apex)];
        for d in 0..=base.dim() {
            for s in sub.simplices(d) {
                gens.push(s.union(&Simplex::vertex(apex)));
            }
        }
        skeleta.push((j, Subcomplex::closure(&k, gens.iter())?));
    }
    let pm = FilteredPseudomanifold::new(k, &skeleta)?;
    Ok(Space { name: format!("cone({})", x.name), pm, chains: Vec::new() })
}

/// Staircase product with the product filtration `∪_{i+j=k} X^i × Y^j`.
pub fn product(x: &Space, y: &Space) -> Result<Space> {
    let p = ProductComplex::new(x.complex(), y.complex());
    let k = p.total().clone();
    let n = x.pm.n + y.pm.n;
    let mut skeleta = Vec::new();
    for lvl in 0..n {
        let sub = Subcomplex::from_predicate(&k, |s| {
            let (a, b) = p.project(s);
            (0..=lvl).any(|i| {
                let j = lvl - i;
                x.pm.skeleton(i as isize).contains(&a) && y.pm.skeleton(j as isize).contains(&b)
            })
        });
        skeleta.push((lvl, sub));
    }
    let mut pm = FilteredPseudomanifold::new(k.clone(), &skeleta)?;
    if let (Some(ox), Some(oy)) = (&x.pm.orientation, &y.pm.orientation) {
        let mut signs = vec![0i8; k.count(n)];
        for (i, a) in x.complex().simplices(x.pm.n).iter().enumerate() {
            for (j, b) in y.complex().simplices(y.pm.n).iter().enumerate() {
                for (s, e) in p.staircase(a, b) {
                    signs[k.index_of(&s).unwrap()] = ox.signs[i] * oy.signs[j] * e;
                }
            }
        }
        if signs.iter().all(|s| *s != 0) {
            pm.orientation = Some(Orientation { dim: n, signs });
        }
    }
    Ok(with_fundamental(Space { name: format!("product({},{})", x.name, y.name), pm, chains: Vec::new() }))
}

fn maximal(k: &SimplicialComplex) -> Vec<Simplex> {
    let mut out = Vec::new();
    for d in 0..=k.dim() {
        for (i, s) in k.simplices(d).iter().enumerate() {
            if k.cofacets(d, i).is_empty() {
                out.push(s.clone());
            }
        }
    }
    out
}

/// Parse and build a corpus name such as `sphere 2` or `suspension(torus2)`.
pub fn generate(name: &str) -> Result<Space> {
    let name = name.trim();
    let inner = |prefix: &str| -> Option<&str> { name.strip_prefix(prefix).and_then(|r| r.strip_suffix(')')) };
    if let Some(arg) = inner("suspension(") {
        return suspension(&generate(arg)?);
    }
    if let Some(arg) = inner("cone(") {
        return cone(&generate(arg)?);
    }
    if let Some(args) = inner("product(") {
        let (a, b) = split_top_level(args).ok_or_else(|| Error::Invalid(format!("bad product arguments: {args}")))?;
        return product(&generate(a)?, &generate(b)?);
    }
    let mut parts = name.split_whitespace();
    let head = parts.next().unwrap_or("");
    let arg = parts.next().map(|a| a.parse::<usize>().map_err(|_| Error::Invalid(format!("bad size in {name}"))));
    match (head, arg) {
        ("simplex", Some(n)) => simplex(n?),
        ("sphere", Some(n)) => sphere(n?),
        ("circle", Some(n)) => circle(n?),
        ("torus2", None) => torus2(),
        ("projplane", None) => projplane(),
        ("pinched-torus", None) => pinched_torus(),
        _ => Err(Error::Invalid(format!("unknown corpus name: {name}"))),
    }
}

fn split_top_level(s: &str) -> Option<(&str, &str)> {
    let mut depth = 0i32;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => return Some((s[..i].trim(), s[i + 1..].trim())),
            _ => {}
        }
    }
    None
}
