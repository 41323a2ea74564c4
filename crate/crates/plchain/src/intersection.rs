//! Chain cross product, general-position checks, intersection coefficients,
//! the umkehr map `Δ_!`, the intersection products `μ`, and the comparison with
//! the duality-and-cup description of the intersection product on cycles.

use std::fmt;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;

use crate::algebra::{
    cup_product, homology_of_pair, induced_by_cochain_map, inclusion_map, IntChain, IntCochain,
};
use crate::complex::{Simplex, SimplicialComplex, Subcomplex};
use crate::duality::{block_duality, require_full};
use crate::error::{Error, Result};
use crate::pl_chains::{chain_from_class, subdivide_chain, subdivide_once, CycleMode, PLChain};
use crate::product::ProductComplex;
use crate::stratified::{allowability_check, AllowabilityReport, FilteredPseudomanifold, Perversity, Stratum};

/// `X`, its staircase square `X × X`, the product orientation and the diagonal.
pub struct DiagonalContext {
    pub x: FilteredPseudomanifold,
    pub product: ProductComplex,
    pub total: Arc<SimplicialComplex>,
    /// Orientation signs of the `2n`-simplices of `total`.
    pub signs: Vec<i8>,
    /// `(X × Σ) ∪ (Σ × X)`.
    pub sigma: Subcomplex,
    pub diagonal: Subcomplex,
    strata: Vec<Stratum>,
    stratum_of: Vec<Vec<usize>>,
    whole: OnceLock<Neighborhood>,
}

impl fmt::Debug for DiagonalContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DiagonalContext(n={}, product simplices={})", self.x.n, self.total.total_count())
    }
}

impl DiagonalContext {
    pub fn new(x: &FilteredPseudomanifold) -> Result<Self> {
        let o = x.orientation()?.clone();
        let k = &x.complex;
        let n = x.n;
        let product = ProductComplex::new(k, k);
        let total = product.total().clone();
        let mut signs = vec![0i8; total.count(2 * n)];
        for (ai, a) in k.simplices(n).iter().enumerate() {
            for (bi, b) in k.simplices(n).iter().enumerate() {
                for (s, e) in product.staircase(a, b) {
                    signs[total.index_of(&s).expect("staircase simplex")] = o.signs[ai] * o.signs[bi] * e;
                }
            }
        }
        let whole = Subcomplex::whole(k);
        let sigma = product.product_subcomplex(&x.sigma, &whole).union(&product.product_subcomplex(&whole, &x.sigma));
        let diagonal = product.diagonal_subcomplex();
        let strata = x.strata();
        let mut stratum_of: Vec<Vec<usize>> = (0..=k.dim()).map(|d| vec![usize::MAX; k.count(d)]).collect();
        for (j, z) in strata.iter().enumerate() {
            for &(d, i) in &z.simplices {
                stratum_of[d][i] = j;
            }
        }
        Ok(DiagonalContext { x: x.clone(), product, total, signs, sigma, diagonal, strata, stratum_of, whole: OnceLock::new() })
    }

    /// The same construction on the barycentric subdivision of `X`.
    pub fn subdivided(&self) -> Result<Self> {
        Self::new(&self.x.subdivided()?)
    }

    pub fn n(&self) -> usize {
        self.x.n
    }

    pub fn complex(&self) -> &Arc<SimplicialComplex> {
        &self.x.complex
    }

    pub fn strata(&self) -> &[Stratum] {
        &self.strata
    }

    /// `A′ = Δ^{-1}(A)`.
    pub fn pullback(&self, a: &Subcomplex) -> Subcomplex {
        Subcomplex::from_predicate(&self.x.complex, |s| a.contains(&self.product.diagonal(s)))
    }

    pub fn product_of(&self, a: &Subcomplex, b: &Subcomplex) -> Subcomplex {
        self.product.product_subcomplex(a, b)
    }

    fn stratum_of(&self, s: &Simplex) -> usize {
        let (d, i) = self.x.complex.key_of(s).expect("simplex of X");
        self.stratum_of[d][i]
    }

    /// Express a chain of `X`'s lineage on `X` itself.
    fn on_base(&self, c: &IntChain) -> Result<IntChain> {
        if Arc::ptr_eq(&c.complex, &self.x.complex) {
            return Ok(c.clone());
        }
        Ok(subdivide_chain(&PLChain::new(c.clone()), &self.x.complex)?.chain)
    }

    fn dim_outside_sigma(&self, a: &Subcomplex) -> Option<usize> {
        (0..=self.x.n).rev().find(|&d| a.indices(d).any(|i| !self.x.sigma.contains_key(d, i)))
    }
}

/// Eilenberg–Zilber cross product on the staircase triangulation.
pub fn cross_product(ctx: &DiagonalContext, zeta: &IntChain, eta: &IntChain) -> Result<IntChain> {
    let zeta = ctx.on_base(zeta)?;
    let eta = ctx.on_base(eta)?;
    let mut out = IntChain::zero(&ctx.total, zeta.degree + eta.degree);
    for (a, u) in zeta.terms() {
        for (b, v) in eta.terms() {
            for (s, e) in ctx.product.staircase(a, b) {
                out.add_term(ctx.total.index_of(&s).expect("staircase simplex"), u * v * e as i64);
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GpMode {
    /// `dim(|ξ|′ − Σ) ≤ i − n` and `dim(|∂ξ|′ − Σ) ≤ i − n − 1`.
    Delta,
    /// `dim(A ∩ Δ(Z)) ≤ dim(A ∩ (Z × Z)) − dim Z` for every stratum, for `|ξ|` and `|∂ξ|`.
    Stratified,
    /// `dim(|ξ| ∩ |η| ∩ Z) ≤ dim(|ξ| ∩ Z) + dim(|η| ∩ Z) − dim Z` for every stratum.
    Pair,
}

/// One inequality `actual ≤ budget`; an empty set (`None`) always passes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GpCheck {
    pub label: String,
    pub budget: i64,
    pub actual: Option<usize>,
}

impl GpCheck {
    pub fn ok(&self) -> bool {
        self.actual.map_or(true, |d| d as i64 <= self.budget)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneralPositionReport {
    pub mode: GpMode,
    pub checks: Vec<GpCheck>,
    pub verdict: bool,
}

impl GeneralPositionReport {
    fn new(mode: GpMode, checks: Vec<GpCheck>) -> Self {
        let verdict = checks.iter().all(|c| c.ok());
        GeneralPositionReport { mode, checks, verdict }
    }

    /// The failing inequalities, one per line.
    pub fn failures(&self) -> String {
        self.checks
            .iter()
            .filter(|c| !c.ok())
            .map(|c| format!("{}: dimension {} exceeds {}", c.label, c.actual.unwrap(), c.budget))
            .collect::<Vec<_>>()
            .join("; ")
    }
}

/// What a general-position check is applied to.
pub enum GpInput<'a> {
    Product(&'a IntChain),
    Pair(&'a IntChain, &'a IntChain),
}

pub fn general_position_check(ctx: &DiagonalContext, input: GpInput<'_>, mode: GpMode) -> Result<GeneralPositionReport> {
    match (input, mode) {
        (GpInput::Product(xi), GpMode::Delta) => Ok(delta_gp(ctx, xi)),
        (GpInput::Product(xi), GpMode::Stratified) => Ok(stratified_gp(ctx, xi)),
        (GpInput::Pair(a, b), GpMode::Pair) => pair_gp(ctx, a, b),
        _ => Err(Error::Precondition("input does not match the general-position mode".into())),
    }
}

/// Conditions for `ξ ∈ C^Δ`, with `ξ` taken relative to `Σ_{X×X}`.
pub fn delta_gp(ctx: &DiagonalContext, xi: &IntChain) -> GeneralPositionReport {
    let n = ctx.n() as i64;
    let i = xi.degree as i64;
    let rel = xi.modulo(&ctx.sigma);
    let bd = rel.boundary().modulo(&ctx.sigma);
    let a = ctx.pullback(&rel.support());
    let b = ctx.pullback(&bd.support());
    GeneralPositionReport::new(
        GpMode::Delta,
        vec![
            GpCheck { label: "|ξ|′ − Σ".into(), budget: i - n, actual: ctx.dim_outside_sigma(&a) },
            GpCheck { label: "|∂ξ|′ − Σ".into(), budget: i - n - 1, actual: ctx.dim_outside_sigma(&b) },
        ],
    )
}

fn stratified_checks(ctx: &DiagonalContext, a: &Subcomplex, what: &str, out: &mut Vec<GpCheck>) {
    let n = ctx.n();
    let strata = ctx.strata();
    let mut on_diag: Vec<Option<usize>> = vec![None; strata.len()];
    let mut in_square: Vec<Option<usize>> = vec![None; strata.len()];
    let total = &ctx.total;
    for d in 0..=total.dim() {
        for i in a.indices(d) {
            let s = &total.simplices(d)[i];
            let (p, q) = ctx.product.project(s);
            let (zp, zq) = (ctx.stratum_of(&p), ctx.stratum_of(&q));
            if zp != zq {
                continue;
            }
            in_square[zp] = in_square[zp].max(Some(d));
            if ctx.product.undiagonal(s).is_some() {
                on_diag[zp] = on_diag[zp].max(Some(d));
            }
        }
    }
    for (j, z) in strata.iter().enumerate() {
        let dim_z = (n - z.codim) as i64;
        let budget = in_square[j].map_or(-1, |d| d as i64 - dim_z);
        out.push(GpCheck { label: format!("{what} ∩ Δ(stratum {j})"), budget, actual: on_diag[j] });
    }
}

/// Stratified general position of `|ξ|` and `|∂ξ|`.
pub fn stratified_gp(ctx: &DiagonalContext, xi: &IntChain) -> GeneralPositionReport {
    let mut checks = Vec::new();
    stratified_checks(ctx, &xi.support(), "|ξ|", &mut checks);
    stratified_checks(ctx, &xi.boundary().support(), "|∂ξ|", &mut checks);
    GeneralPositionReport::new(GpMode::Stratified, checks)
}

/// Stratified general position of two chains on `X`.
pub fn pair_gp(ctx: &DiagonalContext, xi: &IntChain, eta: &IntChain) -> Result<GeneralPositionReport> {
    let xi = ctx.on_base(xi)?;
    let eta = ctx.on_base(eta)?;
    let (a, b) = (xi.support(), eta.support());
    let meet = a.intersection(&b);
    let n = ctx.n();
    let checks = ctx
        .strata()
        .iter()
        .enumerate()
        .map(|(j, z)| {
            let dz = |s: &Subcomplex| crate::stratified::dim_meet(s, z);
            let budget = match (dz(&a), dz(&b)) {
                (Some(p), Some(q)) => p as i64 + q as i64 - (n - z.codim) as i64,
                _ => -1,
            };
            GpCheck { label: format!("|ξ| ∩ |η| ∩ stratum {j}"), budget, actual: dz(&meet) }
        })
        .collect();
    Ok(GeneralPositionReport::new(GpMode::Pair, checks))
}

/// The sets attached to a compact neighborhood `Z` (a union of `n`-simplices).
pub struct Neighborhood {
    pub z: Subcomplex,
    /// Union of the `n`-simplices not in `Z`.
    pub d_z: Subcomplex,
    pub s_z: Subcomplex,
    /// `(Σ ∩ Z) ∪ S_Z`.
    pub j_z: Subcomplex,
    pub zz: Subcomplex,
    pub j_zz: Subcomplex,
    pub d_zz: Subcomplex,
}

pub fn neighborhood(ctx: &DiagonalContext, z: &Subcomplex) -> Result<Neighborhood> {
    let k = ctx.complex();
    let n = ctx.n();
    let tops: Vec<&Simplex> = z.simplices(n).collect();
    if Subcomplex::closure(k, tops.iter().copied())? != *z {
        return Err(Error::Precondition("Z is not a union of n-simplices".into()));
    }
    let outside: Vec<&Simplex> = k.simplices(n).iter().filter(|s| !z.contains(s)).collect();
    let d_z = Subcomplex::closure(k, outside)?;
    let s_z = z.intersection(&d_z);
    let j_z = ctx.x.sigma.intersection(z).union(&s_z);
    let whole = Subcomplex::whole(k);
    let zz = ctx.product_of(z, z);
    let j_zz = ctx.product_of(z, &j_z).union(&ctx.product_of(&j_z, z));
    let d_zz = ctx.product_of(&whole, &d_z).union(&ctx.product_of(&d_z, &whole));
    Ok(Neighborhood { z: z.clone(), d_z, s_z, j_z, zz, j_zz, d_zz })
}

/// Union of the `n`-simplices containing `σ`.
pub fn star_neighborhood(ctx: &DiagonalContext, sigma: &Simplex) -> Result<Subcomplex> {
    let k = ctx.complex();
    let tops: Vec<&Simplex> = k.simplices(ctx.n()).iter().filter(|t| sigma.is_face_of(t)).collect();
    Subcomplex::closure(k, tops)
}

/// Union of the `n`-simplices meeting `z`.
pub fn grow_neighborhood(ctx: &DiagonalContext, z: &Subcomplex) -> Result<Subcomplex> {
    let k = ctx.complex();
    let verts = z.vertex_set();
    let tops: Vec<&Simplex> =
        k.simplices(ctx.n()).iter().filter(|t| t.vertices().iter().any(|v| verts.contains(v))).collect();
    Subcomplex::closure(k, tops)
}

fn span(z: &Subcomplex) -> Subcomplex {
    Subcomplex::spanned_by(z.complex(), &z.vertex_set())
}

fn diagonal_pullback(ctx: &DiagonalContext, beta: &IntCochain) -> IntCochain {
    let k = ctx.complex();
    let d = beta.degree;
    let mut out = IntCochain::zero(k, d);
    if d > k.dim() {
        return out;
    }
    for (i, s) in k.simplices(d).iter().enumerate() {
        out.set_add(i, beta.value(&ctx.product.diagonal(s)));
    }
    out
}

/// Intersection coefficients of `ξ` for every `(i−n)`-simplex in `Z − J_Z`,
/// computed from the classes of `(A, B) ⊇ (|ξ|, |∂ξ|)` (default: the supports).
pub fn local_umkehr(
    ctx: &DiagonalContext,
    xi: &IntChain,
    nb: &Neighborhood,
    support: Option<(&Subcomplex, &Subcomplex)>,
) -> Result<IntChain> {
    let n = ctx.n();
    let i = xi.degree;
    if i < n {
        return Err(Error::Dimension(format!("degree {i} is below the dimension {n}")));
    }
    let xi = xi.modulo(&ctx.sigma);
    let gp = delta_gp(ctx, &xi);
    if !gp.verdict {
        return Err(Error::GeneralPosition(gp.failures()));
    }
    let (a, b) = match support {
        None => (xi.support(), xi.boundary().modulo(&ctx.sigma).support()),
        Some((a, b)) => {
            let (sa, sb) = (xi.support(), xi.boundary().modulo(&ctx.sigma).support());
            if !sa.is_subset_of(a) || !sb.is_subset_of(&b.union(&ctx.sigma)) || !b.is_subset_of(a) {
                return Err(Error::Precondition("(A, B) does not contain (|ξ|, |∂ξ|)".into()));
            }
            let over = |s: &Subcomplex, budget: i64| ctx.dim_outside_sigma(&ctx.pullback(s)).map_or(false, |d| d as i64 > budget);
            if over(a, i as i64 - n as i64) || over(b, i as i64 - n as i64 - 1) {
                return Err(Error::GeneralPosition("(A, B) is not in general position with Δ".into()));
            }
            (a.clone(), b.clone())
        }
    };
    let jd = nb.j_zz.union(&nb.d_zz);
    let big = homology_of_pair(&a.union(&jd), &b.union(&jd), i)?;
    let c1 = big.class_of_chain(&xi)?;
    let k = a.intersection(&nb.zz).union(&nb.j_zz);
    let l = b.intersection(&nb.zz).union(&nb.j_zz);
    let local = homology_of_pair(&k, &l, i)?;
    let excise = inclusion_map(&local, &big)?.inverse()?;
    let mut c2 = excise.apply(&c1);
    let (k, l) = if k.is_full() && l.is_full() {
        (k, l)
    } else {
        // Enlarge to full spans; allowed when the spans still meet Δ in the right dimensions.
        let (kf, lf) = (span(&k), span(&l));
        if !kf.is_subset_of(&nb.zz) {
            return Err(Error::NotFull("the full span of the support leaves the neighborhood".into()));
        }
        let over = |s: &Subcomplex, budget: i64| {
            let p = ctx.pullback(s);
            (0..=n).rev().find(|&d| p.indices(d).any(|j| !nb.j_z.contains_key(d, j))).map_or(false, |d| d as i64 > budget)
        };
        if over(&kf, i as i64 - n as i64) || over(&lf, i as i64 - n as i64 - 1) {
            return Err(Error::NotFull(format!("{:?}", k.fullness_witness().or_else(|| l.fullness_witness()))));
        }
        let spans = homology_of_pair(&kf, &lf, i)?;
        c2 = inclusion_map(&local, &spans)?.apply(&c2);
        (kf, lf)
    };
    require_full(&[&k, &l])?;
    let dual_zz = block_duality(&ctx.total, &nb.zz, 2 * n, &ctx.signs, &k, &l, 2 * n - i)?;
    let c3 = dual_zz.inverse()?.apply(&c2);
    let kp = ctx.pullback(&k);
    let lp = ctx.pullback(&l);
    require_full(&[&kp, &lp])?;
    let o = ctx.x.orientation()?;
    let dual_z = block_duality(ctx.complex(), &nb.z, n, &o.signs, &kp, &lp, 2 * n - i)?;
    let restrict = induced_by_cochain_map(&dual_zz.source, &dual_z.source, |beta| Ok(diagonal_pullback(ctx, beta)))?;
    let c5 = dual_z.apply(&restrict.apply(&c3));
    let chain = chain_from_class(&dual_z.target, &c5, CycleMode::AlphaBar)?.chain;
    Ok(chain.modulo(&nb.j_z))
}

/// The neighborhood `Z = X`, built once per context.
pub fn whole_neighborhood(ctx: &DiagonalContext) -> Result<&Neighborhood> {
    if let Some(nb) = ctx.whole.get() {
        return Ok(nb);
    }
    let nb = neighborhood(ctx, &Subcomplex::whole(ctx.complex()))?;
    Ok(ctx.whole.get_or_init(|| nb))
}

/// `Δ_!(ξ) = Σ I_σ(ξ) σ`, relative to `Σ`.
pub fn umkehr(ctx: &DiagonalContext, xi: &IntChain) -> Result<IntChain> {
    local_umkehr(ctx, xi, whole_neighborhood(ctx)?, None)
}

/// `I_σ(ξ)` computed with the neighborhood `Z` (default `X`).
pub fn intersection_coefficient(ctx: &DiagonalContext, xi: &IntChain, sigma: &Simplex, z: Option<&Subcomplex>) -> Result<i64> {
    let n = ctx.n();
    if xi.degree < n || sigma.dim() != xi.degree - n {
        return Err(Error::Dimension(format!("σ must have dimension {} − {n}", xi.degree)));
    }
    if ctx.x.sigma.contains(sigma) {
        return Err(Error::Precondition(format!("{sigma:?} lies in Σ")));
    }
    let local;
    let nb = match z {
        Some(z) => {
            local = neighborhood(ctx, z)?;
            &local
        }
        None => whole_neighborhood(ctx)?,
    };
    if !nb.z.contains(sigma) || nb.s_z.contains(sigma) {
        return Err(Error::Precondition("the interior of σ is not inside the interior of Z".into()));
    }
    let rel = xi.modulo(&ctx.sigma);
    if !ctx.pullback(&rel.support()).contains(sigma) {
        return Ok(0);
    }
    Ok(local_umkehr(ctx, xi, &nb, None)?.coefficient(sigma))
}

/// Formal sum of tensors `ζ ⊗ η` of chains on `X`.
pub struct DomainElement {
    pub terms: Vec<(IntChain, IntChain)>,
    image: OnceLock<IntChain>,
}

impl fmt::Debug for DomainElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DomainElement({} terms)", self.terms.len())
    }
}

impl DomainElement {
    pub fn new(terms: Vec<(IntChain, IntChain)>) -> Result<Self> {
        let mut degrees = terms.iter().map(|(a, b)| a.degree + b.degree);
        if let Some(d) = degrees.next() {
            if degrees.any(|e| e != d) {
                return Err(Error::Dimension("tensor terms of different degrees".into()));
            }
        }
        Ok(DomainElement { terms, image: OnceLock::new() })
    }

    pub fn tensor(a: &IntChain, b: &IntChain) -> Self {
        DomainElement { terms: vec![(a.clone(), b.clone())], image: OnceLock::new() }
    }

    pub fn degree(&self) -> usize {
        self.terms.first().map_or(0, |(a, b)| a.degree + b.degree)
    }

    /// `∂(ζ ⊗ η) = ∂ζ ⊗ η + (−1)^{|ζ|} ζ ⊗ ∂η`.
    pub fn boundary(&self) -> DomainElement {
        let mut terms = Vec::new();
        for (a, b) in &self.terms {
            if a.degree > 0 {
                terms.push((a.boundary(), b.clone()));
            }
            if b.degree > 0 {
                let s = if a.degree % 2 == 0 { 1 } else { -1 };
                terms.push((a.scale(s), b.boundary()));
            }
        }
        DomainElement { terms, image: OnceLock::new() }
    }

    /// `ε(e)`, cached on first use.
    pub fn epsilon(&self, ctx: &DiagonalContext) -> Result<IntChain> {
        if let Some(c) = self.image.get() {
            if Arc::ptr_eq(&c.complex, &ctx.total) {
                return Ok(c.clone());
            }
        }
        let mut out = IntChain::zero(&ctx.total, self.degree());
        for (a, b) in &self.terms {
            out = out.add(&cross_product(ctx, a, b)?);
        }
        let _ = self.image.set(out.clone());
        Ok(out)
    }

    /// Membership in the domain `𝔊`, recomputed from `ε(e)`.
    pub fn domain_report(&self, ctx: &DiagonalContext) -> Result<GeneralPositionReport> {
        Ok(delta_gp(ctx, &self.epsilon(ctx)?))
    }

    /// Membership in the stratified domain: `|ε(e)|` and `|ε(∂e)|` in stratified general position.
    pub fn stratified_report(&self, ctx: &DiagonalContext) -> Result<GeneralPositionReport> {
        let mut r = stratified_gp(ctx, &self.epsilon(ctx)?);
        let b = self.boundary();
        let rb = stratified_gp(ctx, &b.epsilon(ctx)?);
        r.checks.extend(rb.checks.into_iter().map(|mut c| {
            c.label = format!("ε(∂e): {}", c.label);
            c
        }));
        r.verdict = r.checks.iter().all(|c| c.ok());
        Ok(r)
    }

    /// The same element with its factors pushed to the complex of `ctx`.
    pub fn pushed(&self, ctx: &DiagonalContext) -> Result<DomainElement> {
        let terms = self
            .terms
            .iter()
            .map(|(a, b)| Ok((ctx.on_base(a)?, ctx.on_base(b)?)))
            .collect::<Result<Vec<_>>>()?;
        DomainElement::new(terms)
    }
}

/// `μ = Δ_! ∘ ε` on the domain `𝔊`.
pub fn mu(ctx: &DiagonalContext, e: &DomainElement) -> Result<IntChain> {
    let report = e.domain_report(ctx)?;
    if !report.verdict {
        return Err(Error::GeneralPosition(format!("not in the domain: {}", report.failures())));
    }
    umkehr(ctx, &e.epsilon(ctx)?)
}

/// Output of [`ih_product`]: the chain and its allowability certificate.
#[derive(Clone, Debug)]
pub struct IhProduct {
    pub chain: IntChain,
    pub perversity: Perversity,
    pub report: AllowabilityReport,
}

/// `μ` restricted to intersection chains with perversities `p̄₁`, `p̄₂`.
pub fn ih_product(ctx: &DiagonalContext, e: &DomainElement, p1: &Perversity, p2: &Perversity) -> Result<IhProduct> {
    for (a, b) in &e.terms {
        let (a, b) = (ctx.on_base(a)?, ctx.on_base(b)?);
        let ra = allowability_check(&ctx.x, &a, p1);
        if !ra.allowable() {
            return Err(Error::NotAllowable(format!("first factor is not {}-allowable: {:?}", p1.name, ra.checks)));
        }
        let rb = allowability_check(&ctx.x, &b, p2);
        if !rb.allowable() {
            return Err(Error::NotAllowable(format!("second factor is not {}-allowable: {:?}", p2.name, rb.checks)));
        }
    }
    let gp = e.stratified_report(ctx)?;
    if !gp.verdict {
        return Err(Error::GeneralPosition(gp.failures()));
    }
    let chain = mu(ctx, e)?;
    let perversity = p1.sum(p2);
    let report = allowability_check(&ctx.x, &chain, &perversity);
    if !report.allowable() {
        return Err(Error::NotAllowable(format!("product is not {}-allowable: {:?}", perversity.name, report.checks)));
    }
    Ok(IhProduct { chain, perversity, report })
}

fn koszul_sign(n: usize, i: usize) -> i64 {
    if (n + n * i) % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Product of two cycles through duality and cup product, computed on the
/// first derived subdivision: `H_i(|ξ| ∪ Σ, Σ) ⊗ H_j(|η| ∪ Σ, Σ) → (𝒟⊗𝒟)^{-1} → ⌣ → 𝒟`.
/// The result is a chain on `sd X`.
pub fn gm_cycle_product(ctx: &DiagonalContext, xi: &IntChain, eta: &IntChain) -> Result<IntChain> {
    let (xi, eta) = (ctx.on_base(xi)?, ctx.on_base(eta)?);
    let n = ctx.n();
    let (i, j) = (xi.degree, eta.degree);
    if i + j < n {
        return Err(Error::Dimension(format!("degrees {i} + {j} are below {n}")));
    }
    for c in [&xi, &eta] {
        if !c.boundary().modulo(&ctx.x.sigma).is_zero() {
            return Err(Error::NotACycle(c.degree));
        }
    }
    let gp = pair_gp(ctx, &xi, &eta)?;
    if !gp.verdict {
        return Err(Error::GeneralPosition(gp.failures()));
    }
    let x1 = ctx.x.subdivided()?;
    let t1 = x1.complex.clone();
    let o1 = x1.orientation()?.signs.clone();
    let whole = Subcomplex::whole(&t1);
    let s1 = x1.sigma.clone();
    let xi1 = subdivide_once(&xi, &t1)?;
    let eta1 = subdivide_once(&eta, &t1)?;
    let a = xi.support().subdivided(&t1);
    let b = eta.support().subdivided(&t1);
    let dual_of = |c: &IntChain, supp: &Subcomplex| -> Result<IntCochain> {
        let k = supp.union(&s1);
        let d = block_duality(&t1, &whole, n, &o1, &k, &s1, n - c.degree)?;
        let coords = d.inverse()?.apply(&d.target.class_of_chain(c)?);
        d.source.cochain_for(&coords)
    };
    let alpha = dual_of(&xi1, &a)?;
    let beta = dual_of(&eta1, &b)?;
    let cup = cup_product(&alpha, &beta).scale(koszul_sign(n, i));
    let k = a.intersection(&b).union(&s1);
    let d = block_duality(&t1, &whole, n, &o1, &k, &s1, 2 * n - i - j)?;
    let coords = d.apply(&d.source.class_of_cochain(&cup)?);
    Ok(chain_from_class(&d.target, &coords, CycleMode::AlphaBar)?.chain)
}

/// Both sides of the cup/intersection duality square for two cycles on a manifold.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CupDualityReport {
    /// `𝒟 ∘ ⌣ ∘ (𝒟⊗𝒟)^{-1} ∘ (𝔦 ⊗ 𝔦)`, as a class in `H_{i+j−n}(X)`.
    pub via_cup: Vec<BigInt>,
    /// `𝔦 ∘ ⋔`, as a class in `H_{i+j−n}(X)`.
    pub via_intersection: Vec<BigInt>,
    pub holds: bool,
}

pub fn cup_duality_check(ctx: &DiagonalContext, xi: &IntChain, eta: &IntChain) -> Result<CupDualityReport> {
    if !ctx.x.sigma.is_empty() {
        return Err(Error::Precondition("the space has a singular set".into()));
    }
    let product = gm_cycle_product(ctx, xi, eta)?;
    let (xi, eta) = (ctx.on_base(xi)?, ctx.on_base(eta)?);
    let n = ctx.n();
    let (i, j) = (xi.degree, eta.degree);
    let t1 = product.complex.clone();
    let o1 = crate::complex::subdivide_orientation(&t1, ctx.x.orientation()?);
    let whole = Subcomplex::whole(&t1);
    let empty = Subcomplex::empty(&t1);
    let inverse_dual = |c: &IntChain| -> Result<IntCochain> {
        let d = block_duality(&t1, &whole, n, &o1.signs, &whole, &empty, n - c.degree)?;
        let coords = d.inverse()?.apply(&d.target.class_of_chain(&subdivide_once(c, &t1)?)?);
        d.source.cochain_for(&coords)
    };
    let cup = cup_product(&inverse_dual(&xi)?, &inverse_dual(&eta)?).scale(koszul_sign(n, i));
    let d = block_duality(&t1, &whole, n, &o1.signs, &whole, &empty, 2 * n - i - j)?;
    let via_cup = d.apply(&d.source.class_of_cochain(&cup)?);
    let via_intersection = d.target.class_of_chain(&product)?;
    let holds = via_cup == via_intersection;
    Ok(CupDualityReport { via_cup, via_intersection, holds })
}

/// `μ`, retried once on the barycentric subdivision of `X` when a support
/// pair is not full. The refined context is built on first need and reused.
pub fn mu_refined(ctx: &DiagonalContext, refined: &OnceLock<DiagonalContext>, e: &DomainElement) -> Result<PLChain> {
    match mu(ctx, e) {
        Err(Error::NotFull(_)) => {
            let sd = match refined.get() {
                Some(c) => c,
                None => {
                    let c = ctx.subdivided()?;
                    refined.get_or_init(|| c)
                }
            };
            Ok(PLChain::new(mu(sd, &e.pushed(sd)?)?))
        }
        r => r.map(PLChain::new),
    }
}
