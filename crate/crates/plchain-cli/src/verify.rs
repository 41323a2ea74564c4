//! Invariant suites run by `plchain verify` against one space and its named chains.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use plchain::algebra::{cohomology_of_pair, homology_of_pair, IntChain};
use plchain::complex::{barycentric_subdivision, Subcomplex};
use plchain::corpus::Space;
use plchain::duality::{cellular_gm_duality, gm_duality_auto};
use plchain::intersection::{gm_cycle_product, mu, mu_refined, DiagonalContext, DomainElement};
use plchain::pl_chains::{subdivide_once, PLChain};
use plchain::stratified::{intersection_homology, Perversity};
use num_bigint::BigInt;
use plchain::Error;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::commands::Input;
use crate::report::Table;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// The inputs are outside the operation's domain (general position, fullness).
    Skip,
}

#[derive(Clone, Debug)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub status: Status,
    pub detail: String,
}

struct Ctx<'a> {
    input: &'a Input,
    /// Why the space is not a closed oriented pseudomanifold, if it is not.
    unclosed: Option<String>,
    seed: u64,
    diagonal: OnceLock<Result<DiagonalContext, String>>,
    refined: OnceLock<DiagonalContext>,
}

impl Ctx<'_> {
    fn space(&self) -> &Space {
        &self.input.space
    }

    fn diagonal(&self) -> Result<&DiagonalContext, String> {
        self.diagonal.get_or_init(|| DiagonalContext::new(&self.space().pm).map_err(|e| e.to_string())).as_ref().map_err(|e| e.clone())
    }

    /// `μ`, retried on the subdivision for surfaces and curves, where that stays small.
    fn mu(&self, e: &DomainElement) -> plchain::Result<PLChain> {
        let ctx = self.diagonal().map_err(Error::Precondition)?;
        if self.space().pm.n <= 2 {
            mu_refined(ctx, &self.refined, e)
        } else {
            mu(ctx, e).map(PLChain::new)
        }
    }

    /// Named chains that are cycles relative to `Σ`.
    fn cycles(&self) -> Vec<(&str, &IntChain)> {
        let sigma = &self.space().pm.sigma;
        self.space().chains.iter().filter(|(_, c)| c.boundary().modulo(sigma).is_zero()).map(|(n, c)| (n.as_str(), c)).collect()
    }
}

fn check(suite: &'static str, name: impl Into<String>, r: Result<(bool, String), Error>) -> Check {
    let (status, detail) = match r {
        Ok((true, d)) => (Status::Pass, d),
        Ok((false, d)) => (Status::Fail, d),
        Err(e @ (Error::GeneralPosition(_) | Error::NotFull(_))) => (Status::Skip, e.to_string()),
        Err(e) => (Status::Fail, e.to_string()),
    };
    Check { suite, name: name.into(), status, detail }
}

fn skip(suite: &'static str, name: impl Into<String>, why: &str) -> Check {
    Check { suite, name: name.into(), status: Status::Skip, detail: why.into() }
}

fn complex_core(c: &Ctx) -> Vec<Check> {
    let pm = &c.space().pm;
    let k = &pm.complex;
    let mut out = Vec::new();
    out.push(check(
        "complex_core",
        "∂∂ = 0 on every simplex",
        (|| {
            for d in 2..=k.dim() {
                for i in 0..k.count(d) {
                    if !IntChain::from_vec(k, d, &[(i, 1)]).boundary().boundary().is_zero() {
                        return Ok((false, format!("{:?}", k.simplices(d)[i])));
                    }
                }
            }
            Ok((true, String::new()))
        })(),
    ));
    let whole = Subcomplex::whole(k);
    let empty = Subcomplex::empty(k);
    let h: Result<Vec<_>, _> = (0..=k.dim()).map(|d| homology_of_pair(&whole, &empty, d)).collect();
    out.push(check(
        "complex_core",
        "Euler characteristic from homology",
        h.as_ref().map_err(clone_err).map(|h| {
            let chi: i64 = h.iter().enumerate().map(|(d, g)| if d % 2 == 0 { g.free_rank() as i64 } else { -(g.free_rank() as i64) }).sum();
            (chi == k.euler_characteristic(), format!("{chi} vs {}", k.euler_characteristic()))
        }),
    ));
    out.push(check(
        "complex_core",
        "homology unchanged by subdivision",
        (|| {
            let sd = barycentric_subdivision(k);
            let (w, e) = (Subcomplex::whole(&sd), Subcomplex::empty(&sd));
            let mut before = Vec::new();
            let mut after = Vec::new();
            for d in 0..=k.dim() {
                before.push(homology_of_pair(&whole, &empty, d)?.describe());
                after.push(homology_of_pair(&w, &e, d)?.describe());
            }
            Ok((before == after, format!("{before:?} vs {after:?}")))
        })(),
    ));
    out.push(match &c.unclosed {
        None => check("complex_core", "closed oriented pseudomanifold", Ok((true, String::new()))),
        Some(why) => skip("complex_core", "closed oriented pseudomanifold", why),
    });
    out
}

fn clone_err(e: &Error) -> Error {
    Error::Precondition(e.to_string())
}

fn chain_algebra(c: &Ctx) -> Vec<Check> {
    let pm = &c.space().pm;
    let k = &pm.complex;
    let whole = Subcomplex::whole(k);
    let empty = Subcomplex::empty(k);
    let mut out = vec![check(
        "chain_algebra",
        "universal coefficients",
        (|| {
            for d in 0..=k.dim() {
                let h = homology_of_pair(&whole, &empty, d)?;
                let co = cohomology_of_pair(&whole, &empty, d)?;
                let below = if d > 0 { homology_of_pair(&whole, &empty, d - 1)?.torsion().to_vec() } else { Vec::new() };
                if co.free_rank() != h.free_rank() || co.torsion() != below.as_slice() {
                    return Ok((false, format!("degree {d}: H^{d} = {} but H_{d} = {}", co.describe(), h.describe())));
                }
            }
            Ok((true, String::new()))
        })(),
    )];
    for (name, x) in c.cycles() {
        out.push(check(
            "chain_algebra",
            format!("class of `{name}` represented back"),
            (|| {
                let h = homology_of_pair(&whole, &pm.sigma, x.degree)?;
                let class = h.class_of_chain(&x.modulo(&pm.sigma))?;
                let back = h.class_of_chain(&h.chain_for(&class)?)?;
                Ok((back == class, format!("{} in {}", fmt_class(&class), h.describe())))
            })(),
        ));
    }
    out
}

fn fmt_class(c: &[BigInt]) -> String {
    let parts: Vec<String> = c.iter().map(|x| x.to_string()).collect();
    format!("[{}]", parts.join(","))
}

fn stratified(c: &Ctx) -> Vec<Check> {
    let pm = &c.space().pm;
    let k = &pm.complex;
    let mut out = Vec::new();
    let mut ps = vec![Perversity::zero(pm), Perversity::lower_middle(pm), Perversity::upper_middle(pm), Perversity::top(pm)];
    ps.extend(c.input.perversities.iter().cloned());
    if pm.sigma.is_empty() {
        let whole = Subcomplex::whole(k);
        let empty = Subcomplex::empty(k);
        for p in &ps {
            out.push(check(
                "stratified",
                format!("I^{}H = H without singular strata", p.name),
                (|| {
                    for d in 0..=pm.n {
                        let ih = intersection_homology(pm, p, d)?;
                        let h = homology_of_pair(&whole, &empty, d)?;
                        if ih.group.describe() != h.describe() {
                            return Ok((false, format!("degree {d}: {} vs {}", ih.group.describe(), h.describe())));
                        }
                    }
                    Ok((true, String::new()))
                })(),
            ));
        }
    }
    if let Some(why) = &c.unclosed {
        out.push(skip("stratified", "rational duality of intersection homology", why));
        return out;
    }
    let top = Perversity::top(pm);
    let mut seen = BTreeSet::new();
    for p in &ps {
        let q = Perversity { name: format!("t-{}", p.name), values: top.values.iter().zip(&p.values).map(|(t, v)| t - v).collect() };
        if !seen.insert(p.values.clone()) {
            continue;
        }
        out.push(check(
            "stratified",
            format!("rank I^{}H_k = rank I^(t−{})H_(n−k)", p.name, p.name),
            (|| {
                let mut ranks = Vec::new();
                for d in 0..=pm.n {
                    let a = intersection_homology(pm, p, d)?.group.free_rank();
                    let b = intersection_homology(pm, &q, pm.n - d)?.group.free_rank();
                    ranks.push((a, b));
                }
                Ok((ranks.iter().all(|(a, b)| a == b), format!("{ranks:?}")))
            })(),
        ));
    }
    out
}

fn pl_chains(c: &Ctx) -> Vec<Check> {
    let pm = &c.space().pm;
    let sd = barycentric_subdivision(&pm.complex);
    let mut out = Vec::new();
    for (name, x) in &c.space().chains {
        out.push(check(
            "pl_chains",
            format!("`{name}` equals its subdivision"),
            (|| {
                let y = subdivide_once(x, &sd)?;
                let same = PLChain::new(x.clone()).equals(&PLChain::new(y.clone()))?;
                let boundary = subdivide_once(&x.boundary(), &sd)? == y.boundary();
                Ok((same && boundary, format!("{} simplices become {}", x.coeffs.len(), y.coeffs.len())))
            })(),
        ));
    }
    if pm.orientation.is_some() {
        out.push(check(
            "pl_chains",
            "fundamental chain subdivides to the fundamental chain",
            (|| {
                let fine = pm.subdivided()?;
                let g = subdivide_once(&pm.fundamental_chain()?, &fine.complex)?;
                Ok((g == fine.fundamental_chain()?, String::new()))
            })(),
        ));
    }
    out
}

fn duality(c: &Ctx) -> Vec<Check> {
    let pm = &c.space().pm;
    if let Some(why) = &c.unclosed {
        return vec![skip("duality", "duality isomorphisms", why)];
    }
    let Ok(o) = pm.orientation() else { unreachable!("validated spaces are oriented") };
    let k = &pm.complex;
    let whole = Subcomplex::whole(k);
    (0..=pm.n)
        .map(|i| {
            check(
                "duality",
                format!("H^{i}(X − Σ) ≅ H_{}(X, Σ), both routes", pm.n - i),
                (|| {
                    let (ctx, kk, ll, map) = gm_duality_auto(k, o, &pm.sigma, &whole, &pm.sigma, i)?;
                    let cellular = cellular_gm_duality(&ctx, &kk, &ll, i)?;
                    let iso = map.is_isomorphism();
                    let same = cellular.map.same_as(&map.map);
                    Ok((iso && same, format!("{} → {}, isomorphism {iso}, routes agree {same}", map.source().describe(), map.target().describe())))
                })(),
            )
        })
        .collect()
}

/// Two random chains whose simplices share vertices.
fn nearby(k: &std::sync::Arc<plchain::complex::SimplicialComplex>, da: usize, db: usize, r: &mut ChaCha8Rng) -> (IntChain, IntChain) {
    let mut a = IntChain::zero(k, da);
    let mut b = IntChain::zero(k, db);
    let mut near = BTreeSet::new();
    for step in 0..3 {
        let (c, d) = if step % 2 == 0 { (&mut a, da) } else { (&mut b, db) };
        let cands: Vec<usize> =
            (0..k.count(d)).filter(|i| near.is_empty() || k.simplices(d)[*i].vertices().iter().any(|v| near.contains(v))).collect();
        let i = *cands.choose(r).unwrap();
        near.extend(k.simplices(d)[i].vertices().iter().copied());
        c.add_term(i, *[-2i64, -1, 1, 2].choose(r).unwrap());
    }
    (a, b)
}

fn intersection(c: &Ctx) -> Vec<Check> {
    const SUITE: &str = "intersection";
    let pm = &c.space().pm;
    let n = pm.n;
    if let Some(why) = &c.unclosed {
        return vec![skip(SUITE, "products", why)];
    }
    let ctx = match c.diagonal() {
        Ok(x) => x,
        Err(e) => return vec![Check { suite: SUITE, name: "diagonal context".into(), status: Status::Fail, detail: e }],
    };
    let k = &pm.complex;
    let sigma = &pm.sigma;
    let mut out = Vec::new();
    let mut r = ChaCha8Rng::seed_from_u64(c.seed);
    for t in 0..4 {
        let (da, db) = (t % (n + 1), (t / 2) % (n + 1));
        let (a, b) = nearby(k, da, db, &mut r);
        let e = DomainElement::tensor(&a, &b);
        out.push(check(
            SUITE,
            format!("cross product is a chain map (random {da}⊗{db})"),
            (|| Ok((e.epsilon(ctx)?.boundary() == e.boundary().epsilon(ctx)?, String::new())))(),
        ));
    }
    let sign = if n % 2 == 0 { 1 } else { -1 };
    for t in 0..3 {
        let (a, b) = nearby(k, n, n - (t % 2).min(n), &mut r);
        if a.degree + b.degree <= n {
            continue;
        }
        let e = DomainElement::tensor(&a, &b);
        out.push(check(
            SUITE,
            format!("∂μ = (−1)^n μ∂ (random {}⊗{})", a.degree, b.degree),
            (|| {
                let x = c.mu(&e)?;
                let y = c.mu(&e.boundary())?;
                let lhs = x.boundary();
                let lhs = PLChain::new(lhs.chain.modulo(&sigma.pushed_to(lhs.complex())?));
                let rhs = PLChain::new(y.chain.scale(sign).modulo(&sigma.pushed_to(y.complex())?));
                Ok((lhs.equals(&rhs)?, format!("{} terms", lhs.chain.coeffs.len())))
            })(),
        ));
    }
    let cycles = c.cycles();
    if let Some(g) = c.space().chain("fundamental") {
        for (name, x) in &cycles {
            out.push(check(
                SUITE,
                format!("μ(Γ ⊗ {name}) = {name}"),
                (|| {
                    let u = c.mu(&DomainElement::tensor(g, x))?;
                    let u = PLChain::new(u.chain.modulo(&sigma.pushed_to(u.complex())?));
                    Ok((u.equals(&PLChain::new(x.modulo(sigma)))?, String::new()))
                })(),
            ));
        }
    }
    for (i, (na, a)) in cycles.iter().enumerate() {
        for (nb, b) in cycles.iter().skip(i + 1) {
            if a.degree + b.degree < n {
                continue;
            }
            let s = if (a.degree * b.degree + n) % 2 == 0 { 1 } else { -1 };
            out.push(check(
                SUITE,
                format!("μ({na} ⊗ {nb}) = {s:+} μ({nb} ⊗ {na})"),
                (|| {
                    let ab = c.mu(&DomainElement::tensor(a, b))?;
                    let ba = c.mu(&DomainElement::tensor(b, a))?;
                    Ok((ab.equals(&PLChain::new(ba.chain.scale(s)))?, String::new()))
                })(),
            ));
            out.push(check(
                SUITE,
                format!("{na} ⋔ {nb} and μ have one class"),
                (|| {
                    let gm = gm_cycle_product(ctx, a, b)?;
                    let m = mu(ctx, &DomainElement::tensor(a, b))?;
                    let t1 = gm.complex.clone();
                    let s1 = sigma.subdivided(&t1);
                    let h = homology_of_pair(&Subcomplex::whole(&t1), &s1, gm.degree)?;
                    let cg = h.class_of_chain(&gm.modulo(&s1))?;
                    let cm = h.class_of_chain(&subdivide_once(&m, &t1)?.modulo(&s1))?;
                    Ok((cg == cm, format!("{} in {}", fmt_class(&cg), h.describe())))
                })(),
            ));
        }
    }
    out
}

type Suite = fn(&Ctx) -> Vec<Check>;

/// All suites, in a fixed order; returns the table and whether nothing failed.
pub fn run(input: &Input, seed: u64) -> (Table, bool) {
    let v = input.space.pm.validate();
    let unclosed = if v.passed() { None } else { Some(format!("not a closed oriented pseudomanifold: {}", v.violations.join("; "))) };
    let c = Ctx { input, unclosed, seed, diagonal: OnceLock::new(), refined: OnceLock::new() };
    let suites: [Suite; 6] = [complex_core, chain_algebra, stratified, pl_chains, duality, intersection];
    let checks: Vec<Check> = suites.par_iter().map(|s| s(&c)).collect::<Vec<_>>().into_iter().flatten().collect();
    let mut t = Table::new("verification").col("suite").col("check").col("status").col("detail");
    let mut counts = [0usize; 3];
    for ch in &checks {
        let (label, i) = match ch.status {
            Status::Pass => ("pass", 0),
            Status::Fail => ("FAIL", 1),
            Status::Skip => ("skip", 2),
        };
        counts[i] += 1;
        t.row(vec![ch.suite.into(), ch.name.clone(), label.into(), ch.detail.clone()]);
    }
    t.note(format!("{} passed, {} failed, {} outside the domain", counts[0], counts[1], counts[2]));
    (t, counts[1] == 0)
}
