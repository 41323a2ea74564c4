//! The line-oriented space file format.
//!
//! ```text
//! # comment
//! vertices
//! a b c d
//! facets
//! a b c
//! skeleton 0
//! a
//! orientation
//! b a c
//! chain loop 1
//! 1 a b
//! -1 a c
//! perversity mine
//! 0 a
//! ```
//!
//! Section keywords are reserved and cannot be vertex labels. Orientation lines
//! are top simplices whose vertex order fixes the sign of their connected piece
//! of the regular part. Perversity lines give a value and a simplex lying in the
//! stratum it applies to.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use plchain::algebra::IntChain;
use plchain::complex::{orient_with_hints, orientation_hints, permutation_sign, Simplex, SimplicialComplex, Subcomplex};
use plchain::corpus::Space;
use plchain::stratified::{FilteredPseudomanifold, Perversity};
use thiserror::Error;

pub const KEYWORDS: [&str; 6] = ["vertices", "facets", "skeleton", "orientation", "chain", "perversity"];

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SpaceFile {
    pub vertices: Vec<String>,
    pub facets: Vec<Vec<String>>,
    pub skeleta: Vec<(usize, Vec<Vec<String>>)>,
    pub orientation: Vec<Vec<String>>,
    pub chains: Vec<ChainSpec>,
    pub perversities: Vec<PerversitySpec>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainSpec {
    pub name: String,
    pub degree: usize,
    pub terms: Vec<(i64, Vec<String>)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PerversitySpec {
    pub name: String,
    pub values: Vec<(i64, Vec<String>)>,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

/// A space file that parsed but does not describe a valid filtered space.
#[derive(Debug, Error)]
#[error("{line}:{col}: {section}: {source}")]
pub struct BuildError {
    pub line: usize,
    pub col: usize,
    pub section: String,
    #[source]
    pub source: plchain::Error,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    None,
    Vertices,
    Facets,
    Skeleton,
    Orientation,
    Chain,
    Perversity,
}

struct Token<'a> {
    text: &'a str,
    col: usize,
}

fn tokens(line: &str) -> Vec<Token<'_>> {
    let content = match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    };
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in content.char_indices().chain([(content.len(), ' ')]) {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push(Token { text: &content[s..i], col: content[..s].chars().count() + 1 });
                start = None;
            }
            _ => {}
        }
    }
    out
}

pub fn parse(text: &str) -> Result<SpaceFile, ParseError> {
    let mut f = SpaceFile::default();
    let mut section = Section::None;
    let mut declared: HashMap<String, (usize, usize)> = HashMap::new();
    for (ln, line) in text.lines().enumerate() {
        let line_no = ln + 1;
        let toks = tokens(line);
        let Some(head) = toks.first() else { continue };
        let err = |col: usize, message: String| ParseError { line: line_no, col, message };
        let int_arg = |i: usize, what: &str| -> Result<&Token<'_>, ParseError> {
            toks.get(i).ok_or_else(|| err(line.len() + 1, format!("missing {what}")))
        };
        if KEYWORDS.contains(&head.text) {
            let expect_args = |n: usize| -> Result<(), ParseError> {
                if let Some(t) = toks.get(n + 1) {
                    return Err(err(t.col, format!("unexpected `{}` after `{}`", t.text, head.text)));
                }
                Ok(())
            };
            section = match head.text {
                "vertices" => {
                    expect_args(0)?;
                    Section::Vertices
                }
                "facets" => {
                    expect_args(0)?;
                    Section::Facets
                }
                "orientation" => {
                    expect_args(0)?;
                    Section::Orientation
                }
                "skeleton" => {
                    expect_args(1)?;
                    let t = int_arg(1, "skeleton index")?;
                    let i = t.text.parse::<usize>().map_err(|_| err(t.col, format!("bad skeleton index `{}`", t.text)))?;
                    if f.skeleta.iter().any(|(j, _)| *j == i) {
                        return Err(err(t.col, format!("skeleton {i} given twice")));
                    }
                    f.skeleta.push((i, Vec::new()));
                    Section::Skeleton
                }
                "chain" => {
                    expect_args(2)?;
                    let name = int_arg(1, "chain name")?;
                    let deg = int_arg(2, "chain degree")?;
                    let degree = deg.text.parse::<usize>().map_err(|_| err(deg.col, format!("bad degree `{}`", deg.text)))?;
                    if f.chains.iter().any(|c| c.name == name.text) {
                        return Err(err(name.col, format!("chain `{}` given twice", name.text)));
                    }
                    f.chains.push(ChainSpec { name: name.text.into(), degree, terms: Vec::new() });
                    Section::Chain
                }
                _ => {
                    expect_args(1)?;
                    let name = int_arg(1, "perversity name")?;
                    if f.perversities.iter().any(|p| p.name == name.text) {
                        return Err(err(name.col, format!("perversity `{}` given twice", name.text)));
                    }
                    f.perversities.push(PerversitySpec { name: name.text.into(), values: Vec::new() });
                    Section::Perversity
                }
            };
            continue;
        }
        let simplex = |toks: &[Token<'_>]| -> Result<Vec<String>, ParseError> {
            let mut seen: Vec<&str> = Vec::new();
            for t in toks {
                if !declared.contains_key(t.text) {
                    return Err(err(t.col, format!("undeclared vertex `{}`", t.text)));
                }
                if seen.contains(&t.text) {
                    return Err(err(t.col, format!("vertex `{}` repeated in a simplex", t.text)));
                }
                seen.push(t.text);
            }
            Ok(toks.iter().map(|t| t.text.to_string()).collect())
        };
        let coefficient = |t: &Token<'_>| -> Result<i64, ParseError> {
            t.text.parse::<i64>().map_err(|_| err(t.col, format!("bad coefficient `{}`", t.text)))
        };
        match section {
            Section::None => return Err(err(head.col, format!("expected a section keyword, found `{}`", head.text))),
            Section::Vertices => {
                for t in &toks {
                    if let Some((l, c)) = declared.get(t.text) {
                        return Err(err(t.col, format!("vertex `{}` already declared at {l}:{c}", t.text)));
                    }
                    declared.insert(t.text.to_string(), (line_no, t.col));
                    f.vertices.push(t.text.to_string());
                }
            }
            Section::Facets => f.facets.push(simplex(&toks)?),
            Section::Skeleton => {
                let s = simplex(&toks)?;
                f.skeleta.last_mut().unwrap().1.push(s);
            }
            Section::Orientation => f.orientation.push(simplex(&toks)?),
            Section::Chain => {
                let c = coefficient(head)?;
                let s = simplex(&toks[1..])?;
                let spec = f.chains.last_mut().unwrap();
                if s.len() != spec.degree + 1 {
                    let col = toks.get(1).map(|t| t.col).unwrap_or(line.len() + 1);
                    return Err(err(col, format!("chain `{}` has degree {} but this simplex has {} vertices", spec.name, spec.degree, s.len())));
                }
                spec.terms.push((c, s));
            }
            Section::Perversity => {
                let v = coefficient(head)?;
                if toks.len() < 2 {
                    return Err(err(line.len() + 1, "missing simplex after the perversity value".into()));
                }
                let s = simplex(&toks[1..])?;
                f.perversities.last_mut().unwrap().values.push((v, s));
            }
        }
    }
    Ok(f)
}

fn push_simplices(out: &mut String, ss: &[Vec<String>]) {
    for s in ss {
        out.push_str(&s.join(" "));
        out.push('\n');
    }
}

/// The canonical text of `f`; `parse(&print(f)) == f`.
pub fn print(f: &SpaceFile) -> String {
    let mut out = String::new();
    if !f.vertices.is_empty() {
        out.push_str("vertices\n");
        out.push_str(&f.vertices.join(" "));
        out.push('\n');
    }
    if !f.facets.is_empty() {
        out.push_str("facets\n");
        push_simplices(&mut out, &f.facets);
    }
    for (i, ss) in &f.skeleta {
        let _ = writeln!(out, "skeleton {i}");
        push_simplices(&mut out, ss);
    }
    if !f.orientation.is_empty() {
        out.push_str("orientation\n");
        push_simplices(&mut out, &f.orientation);
    }
    for c in &f.chains {
        let _ = writeln!(out, "chain {} {}", c.name, c.degree);
        for (k, s) in &c.terms {
            let _ = writeln!(out, "{k} {}", s.join(" "));
        }
    }
    for p in &f.perversities {
        let _ = writeln!(out, "perversity {}", p.name);
        for (v, s) in &p.values {
            let _ = writeln!(out, "{v} {}", s.join(" "));
        }
    }
    out
}

/// Line and column of the header of a section, for build errors.
fn locate(text: &str, header: &[&str]) -> (usize, usize) {
    for (ln, line) in text.lines().enumerate() {
        let toks = tokens(line);
        if toks.len() >= header.len() && toks.iter().zip(header).all(|(t, h)| t.text == *h) {
            return (ln + 1, toks[0].col);
        }
    }
    (1, 1)
}

/// A space built from a file, with the perversities it defines.
pub struct Loaded {
    pub space: Space,
    pub perversities: Vec<Perversity>,
}

/// Parse and build; build errors are reported at the offending section header.
pub fn load(text: &str, name: &str) -> Result<Loaded, LoadError> {
    let f = parse(text)?;
    build(&f, name).map_err(|(header, source)| {
        let parts: Vec<&str> = header.split_whitespace().collect();
        let (line, col) = locate(text, &parts);
        LoadError::Build(BuildError { line, col, section: header, source })
    })
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Build(#[from] BuildError),
}

type Located<T> = Result<T, (String, plchain::Error)>;

fn at(h: &str) -> impl Fn(plchain::Error) -> (String, plchain::Error) + '_ {
    move |e| (h.to_string(), e)
}

/// Build the space; errors carry the header of the section at fault.
pub fn build(f: &SpaceFile, name: &str) -> Located<Loaded> {
    let ids: HashMap<&str, u32> = f.vertices.iter().enumerate().map(|(i, v)| (v.as_str(), i as u32)).collect();
    let seq = |s: &[String]| -> Vec<u32> { s.iter().map(|v| ids[v.as_str()]).collect() };
    if f.facets.is_empty() {
        return Err(("facets".into(), plchain::Error::Invalid("no facets".into())));
    }
    let facets: Vec<Vec<u32>> = f.facets.iter().map(|s| seq(s)).collect();
    let labels = f.vertices.iter().enumerate().map(|(i, v)| (i as u32, v.clone())).collect();
    let k = SimplicialComplex::build(&facets).map_err(at("facets"))?.with_labels(labels);
    if let Some(v) = f.vertices.iter().find(|v| !k.contains(&Simplex::vertex(ids[v.as_str()]))) {
        return Err(("facets".into(), plchain::Error::Invalid(format!("vertex {v} lies in no facet"))));
    }
    let k = Arc::new(k);
    let mut skeleta = Vec::new();
    for (i, ss) in &f.skeleta {
        let h = format!("skeleton {i}");
        let simplices: Vec<Simplex> = ss.iter().map(|s| Simplex::new(seq(s))).collect::<plchain::Result<_>>().map_err(at(&h))?;
        skeleta.push((*i, Subcomplex::closure(&k, &simplices).map_err(at(&h))?));
    }
    let mut pm = FilteredPseudomanifold::new(k.clone(), &skeleta).map_err(at("skeleton"))?;
    if !f.orientation.is_empty() {
        let n = pm.n;
        let mut hints = Vec::new();
        for s in &f.orientation {
            let vs = seq(s);
            let bad = |m: String| ("orientation".to_string(), plchain::Error::Invalid(m));
            if vs.len() != n + 1 {
                return Err(bad(format!("{} is not a top simplex", s.join(" "))));
            }
            let simplex = Simplex::new(vs.clone()).map_err(at("orientation"))?;
            let t = k.index_of(&simplex).filter(|_| simplex.dim() == n).ok_or_else(|| bad(format!("{} is not a simplex", s.join(" "))))?;
            hints.push((t, permutation_sign(&vs)));
        }
        pm.orientation = Some(orient_with_hints(&k, n, Some(&pm.sigma), &hints).map_err(at("orientation"))?);
    }
    let mut chains = Vec::new();
    for c in &f.chains {
        let h = format!("chain {}", c.name);
        let terms: Vec<(Vec<u32>, i64)> = c.terms.iter().map(|(x, s)| (seq(s), *x)).collect();
        chains.push((c.name.clone(), IntChain::from_oriented(&k, c.degree, &terms).map_err(at(&h))?));
    }
    if !chains.iter().any(|(n, _)| n == "fundamental") && pm.validate().passed() {
        if let Ok(g) = pm.fundamental_chain() {
            chains.insert(0, ("fundamental".into(), g));
        }
    }
    let strata = pm.singular_strata();
    let mut perversities = Vec::new();
    for p in &f.perversities {
        let h = format!("perversity {}", p.name);
        let bad = |m: String| (h.clone(), plchain::Error::Invalid(m));
        let mut values: Vec<Option<i64>> = vec![None; strata.len()];
        for (v, s) in &p.values {
            let simplex = Simplex::new(seq(s)).map_err(at(&h))?;
            let key = k.key_of(&simplex).ok_or_else(|| bad(format!("{} is not a simplex", s.join(" "))))?;
            let j = strata.iter().position(|z| z.contains(key)).ok_or_else(|| bad(format!("{} lies in no singular stratum", s.join(" "))))?;
            if values[j].is_some_and(|w| w != *v) {
                return Err(bad(format!("two values on the stratum of {}", s.join(" "))));
            }
            values[j] = Some(*v);
        }
        let values = values
            .into_iter()
            .enumerate()
            .map(|(j, v)| v.ok_or_else(|| bad(format!("no value on singular stratum {j}"))))
            .collect::<Result<_, _>>()?;
        perversities.push(Perversity { name: p.name.clone(), values });
    }
    Ok(Loaded { space: Space { name: name.into(), pm, chains }, perversities })
}

/// The file describing `space` (and extra perversities on it).
pub fn from_space(space: &Space, perversities: &[Perversity]) -> plchain::Result<SpaceFile> {
    let pm = &space.pm;
    let k = &pm.complex;
    let mut names: HashMap<u32, String> = k.vertices().map(|v| (v, k.label(v))).collect();
    let mut taken = std::collections::HashSet::new();
    let writable = names.values().all(|v| !KEYWORDS.contains(&v.as_str()) && !v.contains('#') && !v.chars().any(char::is_whitespace) && taken.insert(v.clone()));
    if !writable {
        names = k.vertices().map(|v| (v, format!("v{v}"))).collect();
    }
    let labelled = |_: &SimplicialComplex, vs: &[u32]| -> Vec<String> { vs.iter().map(|v| names[v].clone()).collect() };
    let vertices: Vec<String> = k.vertices().map(|v| names[&v].clone()).collect();
    let maximal = |sub: &Subcomplex| -> Vec<Vec<String>> {
        let mut out = Vec::new();
        for d in 0..=k.dim() {
            for s in sub.simplices(d) {
                let covered = d < k.dim() && sub.simplices(d + 1).any(|t| s.is_face_of(t));
                if !covered {
                    out.push(labelled(k, s.vertices()));
                }
            }
        }
        out
    };
    let facets = maximal(&Subcomplex::whole(k));
    let skeleta = pm.skeleta.iter().enumerate().filter(|(_, s)| !s.is_empty()).map(|(i, s)| (i, maximal(s))).collect();
    let orientation = match &pm.orientation {
        Some(o) if pm.n > 0 => orientation_hints(k, Some(&pm.sigma), o)?
            .into_iter()
            .map(|(t, sign)| {
                let mut vs = k.simplices(pm.n)[t].vertices().to_vec();
                if sign < 0 {
                    vs.swap(0, 1);
                }
                labelled(k, &vs)
            })
            .collect(),
        _ => Vec::new(),
    };
    let chains = space
        .chains
        .iter()
        .map(|(name, c)| ChainSpec { name: name.clone(), degree: c.degree, terms: c.terms().map(|(s, x)| (x, labelled(k, s.vertices()))).collect() })
        .collect();
    let strata = pm.singular_strata();
    let perversities = perversities
        .iter()
        .map(|p| PerversitySpec {
            name: p.name.clone(),
            values: strata.iter().zip(&p.values).map(|(z, v)| (*v, labelled(k, k.simplex(z.simplices[0]).vertices()))).collect(),
        })
        .collect();
    Ok(SpaceFile { vertices, facets, skeleta, orientation, chains, perversities })
}
