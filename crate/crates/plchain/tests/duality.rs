mod common;

use common::duality_suite::{self as suite, Check};
use common::*;
use num_bigint::BigInt;
use plchain::algebra::{cohomology_of_pair, homology_of_pair};
use plchain::complex::{Simplex, Subcomplex};
use plchain::duality::*;
use plchain::pl_chains::subdivide_once;
use plchain::Error;

fn report(name: &str, checks: &[Check]) {
    for c in checks {
        assert!(c.ok, "{name}: {} ({})", c.label, c.detail);
    }
    assert!(checks.len() >= 5, "{name}: only {} configurations", checks.len());
}

fn one() -> Vec<BigInt> {
    vec![BigInt::from(1)]
}

#[test]
fn fundamental_class_of_the_tetrahedron_boundary() {
    let sp = space("sphere 2");
    let ctx = DualityContext::for_space(&sp.pm).unwrap();
    let whole = Subcomplex::whole(&ctx.t);
    let f = fundamental_class_over(&ctx, &whole).unwrap();
    assert!(f.frontier.is_empty());
    assert_eq!(f.group.describe(), "Z");
    let g = subdivide_once(sp.chain("fundamental").unwrap(), &ctx.t1).unwrap();
    assert_eq!(f.representative, g);
    assert_eq!(f.class.len(), 1);
    assert_eq!(f.class[0].magnitude(), &1u32.into());
}

#[test]
fn fundamental_class_over_a_vertex_generates() {
    let (t, _, _, ctx) = suite::context("torus2");
    let v = Subcomplex::closure(&t, [&Simplex::vertex(3)]).unwrap();
    let f = fundamental_class_over(&ctx, &v).unwrap();
    assert_eq!(f.group.describe(), "Z");
    assert!(f.representative.boundary().support().is_subset_of(&f.frontier));
    assert_eq!(f.class[0].magnitude(), &1u32.into());
}

#[test]
fn fundamental_class_restricts() {
    let (t, _, _, ctx) = suite::context("torus2");
    let big = Subcomplex::closure(&t, [&t.simplices(2)[0], &t.simplices(2)[5]]).unwrap();
    let small = Subcomplex::closure(&t, [&t.simplices(2)[0]]).unwrap();
    let whole = Subcomplex::whole(&ctx.t1);
    let h = |z: &Subcomplex| homology_of_pair(&whole, &z.subdivided(&ctx.t1).complement(), 2).unwrap();
    let (hb, hs) = (h(&big), h(&small));
    let gb = fundamental_class_over(&ctx, &big).unwrap();
    let gs = fundamental_class_over(&ctx, &small).unwrap();
    let vb = hb.class_of_chain(&gb.representative).unwrap();
    let vs = hs.class_of_chain(&gs.representative).unwrap();
    let inc = plchain::algebra::inclusion_map(&hb, &hs).unwrap();
    assert_eq!(inc.apply(&vb), vs);
}

#[test]
fn fundamental_class_over_the_singular_set_fails() {
    let (t, _, _, ctx) = suite::context("suspension(torus2)");
    let north = Subcomplex::closure(&t, [&Simplex::vertex(7)]).unwrap();
    assert!(matches!(fundamental_class_over(&ctx, &north), Err(Error::Precondition(_))));
    assert!(matches!(dold_duality(&ctx, &north, &Subcomplex::empty(&t), 0), Err(Error::Precondition(_))));
}

#[test]
fn dold_with_equal_pair_is_zero() {
    let (t, _, _, ctx) = suite::context("torus2");
    let k = Subcomplex::closure(&t, [&t.simplices(2)[2]]).unwrap();
    for i in 0..=2 {
        let d = dold_duality(&ctx, &k, &k, i).unwrap();
        assert!(d.source().is_zero() && d.target().is_zero());
    }
}

#[test]
fn dold_at_an_interior_vertex() {
    let disk = space("simplex 2");
    let t = plchain::complex::barycentric_subdivision(disk.complex());
    let o = plchain::complex::subdivide_orientation(&t, &plchain::complex::orient(disk.complex(), 2, None).unwrap());
    let bd = Subcomplex::from_predicate(disk.complex(), |s| s.dim() < 2).subdivided(&t);
    let ctx = DualityContext::new(t.clone(), o, bd).unwrap();
    let centre = t.lineage().unwrap().barycenter[2][0];
    let k = Subcomplex::closure(&t, [&Simplex::vertex(centre)]).unwrap();
    let d = dold_duality(&ctx, &k, &Subcomplex::empty(&t), 0).unwrap();
    assert_eq!(d.source().describe(), "Z");
    assert_eq!(d.target().describe(), "Z");
    assert_eq!(d.map.to_i64()[0][0].abs(), 1);
}

#[test]
fn dold_outside_the_range_is_zero() {
    let (t, _, _, ctx) = suite::context("torus2");
    let k = Subcomplex::closure(&t, [&t.simplices(2)[0]]).unwrap();
    let d = dold_duality(&ctx, &k, &Subcomplex::empty(&t), 3).unwrap();
    assert!(d.source().is_zero() && d.target().is_zero() && d.map.is_zero());
}

#[test]
fn gm_sends_one_to_the_fundamental_class() {
    let sp = space("sphere 2");
    let ctx = DualityContext::for_space(&sp.pm).unwrap();
    let whole = Subcomplex::whole(&ctx.t);
    let d = gm_duality(&ctx, &whole, &Subcomplex::empty(&ctx.t), 0).unwrap();
    let c = d.target().chain_for(&d.map.apply(&one())).unwrap();
    let g = sp.chain("fundamental").unwrap();
    assert!(c == *g || c == g.scale(-1));
}

#[test]
fn gm_on_the_hexagon_in_degree_one() {
    let sp = space("sphere 1");
    let hex = plchain::complex::barycentric_subdivision(sp.complex());
    assert_eq!(hex.count(1), 6);
    let o = plchain::complex::orient(&hex, 1, None).unwrap();
    let ctx = DualityContext::new(hex.clone(), o, Subcomplex::empty(&hex)).unwrap();
    let d = gm_duality(&ctx, &Subcomplex::whole(&hex), &Subcomplex::empty(&hex), 1).unwrap();
    assert_eq!(d.sign, -1);
    assert!(d.is_isomorphism());
    let c = d.target().chain_for(&d.map.apply(&one())).unwrap();
    assert_eq!(c.coeffs.values().sum::<i64>().abs(), 1);
}

#[test]
fn gm_on_the_suspended_torus_relative_to_the_cone_points() {
    let sp = space("suspension(torus2)");
    let ctx = DualityContext::for_space(&sp.pm).unwrap();
    let whole = Subcomplex::whole(&ctx.t);
    let d = gm_duality(&ctx, &whole, &sp.pm.sigma, 0).unwrap();
    assert_eq!(d.source().describe(), "Z");
    let c = d.target().chain_for(&d.map.apply(&one())).unwrap();
    let g = sp.chain("fundamental").unwrap();
    assert!(c == *g || c == g.scale(-1));
}

#[test]
fn gm_requires_singular_set_in_l_and_fullness() {
    let (t, _, s, ctx) = suite::context("suspension(torus2)");
    let whole = Subcomplex::whole(&t);
    assert!(matches!(gm_duality(&ctx, &whole, &Subcomplex::empty(&t), 0), Err(Error::Precondition(_))));
    let (t, _, _, ctx) = suite::context("sphere 1");
    let verts = Subcomplex::from_predicate(&t, |x| x.dim() == 0);
    assert!(matches!(gm_duality(&ctx, &Subcomplex::whole(&t), &verts, 0), Err(Error::NotFull(_))));
    let _ = s;
}

#[test]
fn gm_auto_subdivides_non_full_pairs() {
    let sp = space("sphere 1");
    let t = sp.complex().clone();
    let o = sp.pm.orientation.clone().unwrap();
    let verts = Subcomplex::from_predicate(&t, |x| x.dim() == 0);
    let (ctx, _, l, d) = gm_duality_auto(&t, &o, &Subcomplex::empty(&t), &Subcomplex::whole(&t), &verts, 0).unwrap();
    assert_eq!(ctx.t.depth(), 1);
    assert!(l.is_full());
    assert!(d.is_isomorphism());
    assert_eq!(d.target().describe(), "Z^3");
}

#[test]
fn dual_blocks_of_vertices_are_disks() {
    let (t, _, _, ctx) = suite::context("torus2");
    for v in t.vertices() {
        let b = dual_block(&ctx, &Simplex::vertex(v)).unwrap();
        assert_eq!(b.degree, 2);
        assert_eq!(b.coeffs.len(), 6 * 2);
        // the block boundary is the link circle in T1
        let bb = b.boundary();
        assert!(bb.boundary().is_zero());
        assert!(!bb.is_zero());
    }
}

#[test]
fn gm_excision_counterexample() {
    let (open, rel) = suite::excision_counterexample();
    assert_eq!(open, "Z");
    assert_eq!(rel, "0");
    // the corrected map is still an isomorphism on the same pair
    let sp = space("suspension(torus2)");
    let ctx = DualityContext::for_space(&sp.pm).unwrap();
    let d = gm_duality(&ctx, &Subcomplex::whole(&ctx.t), &sp.pm.sigma, 0).unwrap();
    assert!(d.is_isomorphism());
    let src = cohomology_of_pair(&sp.pm.sigma.complement(), &Subcomplex::empty(&ctx.t), 0).unwrap();
    assert!(src.same_group(d.source()));
}

#[test]
fn dold_naturality() {
    report("dold naturality", &suite::dold_naturality());
}

#[test]
fn gm_naturality() {
    report("gm naturality", &suite::gm_naturality());
}

#[test]
fn dold_boundary_sign() {
    report("dold boundary", &suite::dold_boundary());
}

#[test]
fn gm_boundary_sign() {
    report("gm boundary", &suite::gm_boundary());
}

#[test]
fn singular_set_independence() {
    report("S-independence", &suite::s_independence());
}

#[test]
fn expansion_of_the_singularity() {
    report("expansion", &suite::expansion());
}

#[test]
fn cellular_route_agrees() {
    report("route equality", &suite::route_equality());
}

#[test]
fn duality_maps_are_invertible() {
    report("invertibility", &suite::invertibility());
}

#[test]
fn triangulation_independence() {
    report("triangulation independence", &suite::triangulation_independence());
}

#[test]
fn dold_needs_full_pairs_and_refines_otherwise() {
    let (t, _, _, ctx) = suite::context("torus2");
    // two triangles whose far vertices are joined by an edge outside K
    let k = Subcomplex::closure(&t, [&Simplex::from_sorted(&[1, 5, 6]), &Simplex::from_sorted(&[3, 5, 6])]).unwrap();
    assert!(!k.is_full());
    let empty = Subcomplex::empty(&t);
    assert!(matches!(dold_duality(&ctx, &k, &empty, 1), Err(Error::NotFull(_))));
    for i in 0..=2 {
        let (fine, k1, _, d) = dold_duality_auto(&ctx, &k, &empty, i).unwrap();
        assert!(fine.is_some() && k1.is_full());
        assert!(d.is_isomorphism());
        assert_eq!(d.source().describe(), cohomology_of_pair(&k, &empty, i).unwrap().describe());
    }
}
