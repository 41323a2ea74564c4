//! PL chains as subdivision classes of simplicial chains, and the chain/class correspondences.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::algebra::{homology_of_pair, inclusion_map, GroupPresentation, IntChain, IntCochain};
use crate::complex::{flag_sign, Simplex, SimplicialComplex, Subcomplex};
use crate::error::{Error, Result};

/// A simplicial chain tagged with its triangulation in a lineage tree.
#[derive(Clone, Debug)]
pub struct PLChain {
    pub chain: IntChain,
}

impl PLChain {
    pub fn new(chain: IntChain) -> Self {
        PLChain { chain }
    }

    pub fn degree(&self) -> usize {
        self.chain.degree
    }

    pub fn complex(&self) -> &Arc<SimplicialComplex> {
        &self.chain.complex
    }

    pub fn support(&self) -> Subcomplex {
        self.chain.support()
    }

    pub fn boundary(&self) -> PLChain {
        PLChain::new(self.chain.boundary())
    }

    /// Equality after pushing both chains to the deeper triangulation.
    pub fn equals(&self, other: &PLChain) -> Result<bool> {
        let (a, b) = if self.complex().depth() >= other.complex().depth() {
            (self.clone(), subdivide_chain(other, self.complex())?)
        } else {
            (subdivide_chain(self, other.complex())?, other.clone())
        };
        Ok(a.chain == b.chain)
    }
}

/// One barycentric subdivision of a chain: each simplex becomes the signed sum
/// of the flag simplices it carries.
pub fn subdivide_once(c: &IntChain, sd: &Arc<SimplicialComplex>) -> Result<IntChain> {
    let lin = sd.lineage().ok_or(Error::NotInLineage)?;
    if !Arc::ptr_eq(&lin.parent, &c.complex) {
        return Err(Error::NotInLineage);
    }
    let mut out = IntChain::zero(sd, c.degree);
    for (s, v) in c.terms() {
        for (flag, sign) in full_flags(s) {
            let refs: Vec<&Simplex> = flag.iter().collect();
            let t = crate::complex::flag_simplex(sd, &flag);
            debug_assert_eq!(sign, flag_sign(&refs));
            out.add_term(sd.index_of(&t).expect("flag simplex"), v * sign as i64);
        }
    }
    Ok(out)
}

/// Full flags `v < … < σ` of a simplex with their subdivision signs.
pub fn full_flags(s: &Simplex) -> Vec<(Vec<Simplex>, i8)> {
    let mut out = Vec::new();
    let mut stack: Vec<Vec<Simplex>> = vec![vec![s.clone()]];
    while let Some(desc) = stack.pop() {
        let last = desc.last().unwrap();
        if last.dim() == 0 {
            let flag: Vec<Simplex> = desc.iter().rev().cloned().collect();
            let refs: Vec<&Simplex> = flag.iter().collect();
            let sign = flag_sign(&refs);
            out.push((flag, sign));
            continue;
        }
        for (_, f) in last.facets() {
            let mut d = desc.clone();
            d.push(f);
            stack.push(d);
        }
    }
    out.sort();
    out
}

/// Push a chain down the lineage to `target`.
pub fn subdivide_chain(xi: &PLChain, target: &Arc<SimplicialComplex>) -> Result<PLChain> {
    if Arc::ptr_eq(xi.complex(), target) {
        return Ok(xi.clone());
    }
    let lin = target.lineage().ok_or(Error::NotInLineage)?;
    let mid = subdivide_chain(xi, &lin.parent)?;
    Ok(PLChain::new(subdivide_once(&mid.chain, target)?))
}

/// `(sd^*α)(σ) = α(sd σ)`: pull a cochain on `sd(K)` back to `K`.
pub fn pullback_cochain(alpha: &IntCochain, parent: &Arc<SimplicialComplex>) -> Result<IntCochain> {
    let sd = &alpha.complex;
    let lin = sd.lineage().ok_or(Error::NotInLineage)?;
    if !Arc::ptr_eq(&lin.parent, parent) {
        return Err(Error::NotInLineage);
    }
    let d = alpha.degree;
    let mut out = IntCochain::zero(parent, d);
    for (i, s) in parent.simplices(d).iter().enumerate() {
        let mut acc = 0i64;
        for (flag, sign) in full_flags(s) {
            let t = crate::complex::flag_simplex(sd, &flag);
            acc += sign as i64 * alpha.value(&t);
        }
        out.set_add(i, acc);
    }
    Ok(out)
}

/// Which relative-cycle correspondence applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CycleMode {
    /// `dim A = p`, `dim B < p`.
    Alpha,
    /// `dim(A − B) = p`; simplices inside `B` are dropped.
    AlphaBar,
}

fn check_dims(pres: &GroupPresentation, mode: CycleMode) -> Result<()> {
    let pair = pres.pair.as_ref().ok_or_else(|| Error::Precondition("presentation has no pair".into()))?;
    let p = pres.degree;
    let k = pair.complex();
    for d in p + 1..=k.dim() {
        if pair.rank(d) > 0 {
            return Err(Error::Dimension(format!("A − B has a {d}-simplex but the degree is {p}")));
        }
    }
    if mode == CycleMode::Alpha {
        if let Some(d) = pair.a.dim() {
            if d > p {
                return Err(Error::Dimension(format!("dim A = {d} exceeds {p}")));
            }
        }
        if let Some(d) = pair.b.dim() {
            if d >= p {
                return Err(Error::Dimension(format!("dim B = {d} is not below {p}")));
            }
        }
    }
    Ok(())
}

/// The unique relative cycle realizing a class of `H_p(A,B)` when `A − B` has no
/// simplices above dimension `p`.
pub fn chain_from_class(pres: &GroupPresentation, coords: &[BigInt], mode: CycleMode) -> Result<PLChain> {
    check_dims(pres, mode)?;
    if pres.num_generators() == 0 {
        let pair = pres.pair.as_ref().unwrap();
        return Ok(PLChain::new(IntChain::zero(pair.complex(), pres.degree)));
    }
    Ok(PLChain::new(pres.chain_for(coords)?))
}

/// Class of a relative cycle.
pub fn class_of(pres: &GroupPresentation, xi: &PLChain) -> Result<Vec<BigInt>> {
    pres.class_of_chain(&xi.chain)
}

/// Coefficient of a `p`-simplex in a class of `H_p(A,B)`, read off from the
/// image in `H_p(A, A − int σ)`.
pub fn coefficient_at(pres: &Arc<GroupPresentation>, coords: &[BigInt], sigma: &Simplex) -> Result<i64> {
    let pair = pres.pair.as_ref().ok_or_else(|| Error::Precondition("presentation has no pair".into()))?;
    let k = pair.complex().clone();
    if pair.b.contains(sigma) {
        return Err(Error::Precondition(format!("{sigma:?} lies in B")));
    }
    if !pair.a.contains(sigma) {
        return Ok(0);
    }
    let a = &pair.a;
    let rest = Subcomplex::from_predicate(&k, |t| a.contains(t) && !sigma.is_face_of(t));
    let target = homology_of_pair(a, &rest, pres.degree)?;
    let map = inclusion_map(pres, &target)?;
    let image = map.apply(coords);
    let mut coef = 0i64;
    for (j, x) in image.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        let g = target.basis_chain(j)?;
        coef += x.to_i64().ok_or(Error::Overflow)? * g.coefficient(sigma);
    }
    Ok(coef)
}
