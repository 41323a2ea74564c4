//! The commands behind the `plchain` binary.

use std::sync::OnceLock;

use plchain::algebra::{homology_of_pair, GroupPresentation, IntChain};
use plchain::complex::{SimplicialComplex, Subcomplex};
use plchain::corpus::{self, Space};
use plchain::duality::{cellular_gm_duality, gm_duality_auto};
use plchain::intersection::{gm_cycle_product, ih_product, mu_refined, DiagonalContext, DomainElement};
use plchain::stratified::{intersection_homology, Perversity};
use rayon::prelude::*;
use thiserror::Error;

use crate::format::{self, LoadError};
use crate::report::{Report, Table};
use crate::verify;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Homology,
    Ih,
    Intersect,
    GmIntersect,
    Duality,
    Verify,
    /// Print the selected space in the file format.
    Emit,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Homology => "homology",
            Command::Ih => "ih",
            Command::Intersect => "intersect",
            Command::GmIntersect => "gm-intersect",
            Command::Duality => "duality",
            Command::Verify => "verify",
            Command::Emit => "emit",
        }
    }
}

#[derive(Clone, Debug)]
pub enum Source {
    File(std::path::PathBuf),
    Corpus(String),
}

#[derive(Clone, Debug)]
pub struct Request {
    pub command: Command,
    pub source: Source,
    pub perversities: Vec<String>,
    pub chains: Option<(String, String)>,
    pub seed: u64,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Load(#[from] LoadError),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Compute(#[from] plchain::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Compute(_) => 1,
            CliError::Load(_) | CliError::Usage(_) => 2,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// A command's report and whether everything it checked passed.
pub struct Outcome {
    pub report: Report,
    pub ok: bool,
    /// Raw text output in place of a report (the `emit` command).
    pub raw: Option<String>,
}

/// The selected space and the perversities its file defines.
pub struct Input {
    pub space: Space,
    pub perversities: Vec<Perversity>,
}

pub fn load(source: &Source) -> CliResult<Input> {
    match source {
        Source::Corpus(name) => {
            let space = corpus::generate(name).map_err(|e| CliError::Usage(format!("corpus `{name}`: {e}")))?;
            Ok(Input { space, perversities: Vec::new() })
        }
        Source::File(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            let name = path.display().to_string();
            let loaded = format::load(&text, &name).map_err(|e| match e {
                LoadError::Parse(p) => CliError::Usage(format!("{name}:{p}")),
                LoadError::Build(b) => CliError::Usage(format!("{name}:{b}")),
            })?;
            Ok(Input { space: loaded.space, perversities: loaded.perversities })
        }
    }
}

impl Input {
    pub fn perversity(&self, name: &str) -> CliResult<Perversity> {
        if let Some(p) = self.perversities.iter().find(|p| p.name == name) {
            return Ok(p.clone());
        }
        Perversity::named(&self.space.pm, name).map_err(|e| CliError::Usage(e.to_string()))
    }

    pub fn chain(&self, name: &str) -> CliResult<&IntChain> {
        self.space.chain(name).ok_or_else(|| {
            let known: Vec<&str> = self.space.chains.iter().map(|(n, _)| n.as_str()).collect();
            CliError::Usage(format!("no chain `{name}` on {}; known: {}", self.space.name, known.join(", ")))
        })
    }
}

pub fn run(req: &Request) -> CliResult<Outcome> {
    let input = load(&req.source)?;
    let mut report = Report::new(req.command.name(), &input.space.name);
    let mut ok = true;
    let mut raw = None;
    match req.command {
        Command::Homology => report.tables.push(homology(&input.space)?),
        Command::Ih => report.tables.extend(ih(&input, &req.perversities)?),
        Command::Intersect => report.tables.extend(intersect(&input, chains(req)?, &req.perversities)?),
        Command::GmIntersect => report.tables.extend(gm_intersect(&input, chains(req)?)?),
        Command::Duality => {
            let (table, all) = duality(&input.space)?;
            ok = all;
            report.tables.push(table);
        }
        Command::Verify => {
            let (table, passed) = verify::run(&input, req.seed);
            ok = passed;
            report.tables.push(table);
        }
        Command::Emit => {
            let f = format::from_space(&input.space, &input.perversities)?;
            raw = Some(format!("# {}\n{}", input.space.name, format::print(&f)));
        }
    }
    Ok(Outcome { report, ok, raw })
}

fn chains(req: &Request) -> CliResult<(&str, &str)> {
    req.chains.as_ref().map(|(a, b)| (a.as_str(), b.as_str())).ok_or_else(|| CliError::Usage(format!("{} needs two chain names", req.command.name())))
}

pub fn group_cells(g: &GroupPresentation) -> Vec<String> {
    let torsion: Vec<String> = g.torsion().iter().map(|t| t.to_string()).collect();
    vec![g.describe(), g.free_rank().to_string(), if torsion.is_empty() { "-".into() } else { torsion.join(",") }]
}

pub fn homology(space: &Space) -> CliResult<Table> {
    let k = space.complex();
    let (whole, empty) = (Subcomplex::whole(k), Subcomplex::empty(k));
    let groups: Vec<_> = (0..=k.dim()).into_par_iter().map(|d| homology_of_pair(&whole, &empty, d)).collect::<Result<_, _>>()?;
    let mut t = Table::new("homology").num("degree").col("group").num("rank").col("torsion");
    for (d, g) in groups.iter().enumerate() {
        let mut row = vec![d.to_string()];
        row.extend(group_cells(g));
        t.row(row);
    }
    t.note(format!("euler characteristic {}", k.euler_characteristic()));
    Ok(t)
}

fn ih(input: &Input, names: &[String]) -> CliResult<Vec<Table>> {
    let pm = &input.space.pm;
    let mut ps = Vec::new();
    if names.is_empty() {
        ps.extend([Perversity::zero(pm), Perversity::lower_middle(pm), Perversity::upper_middle(pm), Perversity::top(pm)]);
        ps.extend(input.perversities.iter().cloned());
    } else {
        for n in names {
            ps.push(input.perversity(n)?);
        }
    }
    let jobs: Vec<(usize, usize)> = (0..ps.len()).flat_map(|i| (0..=pm.n).map(move |k| (i, k))).collect();
    let groups: Vec<_> = jobs.par_iter().map(|&(i, k)| intersection_homology(pm, &ps[i], k)).collect::<Result<_, _>>()?;
    let mut t = Table::new("intersection homology").col("perversity").col("values").num("degree").col("group").num("rank").col("torsion");
    for (&(i, k), h) in jobs.iter().zip(&groups) {
        let values: Vec<String> = ps[i].values.iter().map(|v| v.to_string()).collect();
        let mut row = vec![ps[i].name.clone(), format!("[{}]", values.join(",")), k.to_string()];
        row.extend(group_cells(&h.group));
        t.row(row);
    }
    let strata = pm.singular_strata();
    t.note(format!("{} singular strata, codimensions {:?}", strata.len(), strata.iter().map(|s| s.codim).collect::<Vec<_>>()));
    Ok(vec![t])
}

/// Readable name of a vertex; barycenters are written `b(...)` over their carrier.
pub fn vertex_name(k: &SimplicialComplex, v: u32) -> String {
    match k.lineage() {
        Some(lin) => {
            let s = lin.parent.simplex(lin.vertex_carrier[&v]);
            if s.dim() == 0 {
                vertex_name(&lin.parent, s.vertices()[0])
            } else {
                let parts: Vec<String> = s.vertices().iter().map(|w| vertex_name(&lin.parent, *w)).collect();
                format!("b({})", parts.join(","))
            }
        }
        None => k.label(v),
    }
}

/// A chain as a table, with its class in `H(K, Σ)` when it is a relative cycle.
pub fn chain_table(title: &str, c: &IntChain, space: &Space) -> CliResult<Table> {
    let k = &c.complex;
    let level = k.depth() - space.complex().depth();
    let mut t = Table::new(title).num("coeff").col("simplex");
    for (s, x) in c.terms() {
        let names: Vec<String> = s.vertices().iter().map(|v| vertex_name(k, *v)).collect();
        t.row(vec![x.to_string(), names.join(" ")]);
    }
    let on = if level == 0 { "X".to_string() } else { format!("sd^{level} X") };
    t.note(format!("degree {} on {on}, {} simplices", c.degree, c.coeffs.len()));
    let sigma = space.pm.sigma.pushed_to(k)?;
    if c.boundary().modulo(&sigma).is_zero() {
        let h = homology_of_pair(&Subcomplex::whole(k), &sigma, c.degree)?;
        let class = h.class_of_chain(&c.modulo(&sigma))?;
        let rel = if sigma.is_empty() { String::new() } else { ", Σ".into() };
        let coords: Vec<String> = class.iter().map(|x| x.to_string()).collect();
        t.note(format!("class in H_{}({on}{rel}) = {}: [{}]", c.degree, h.describe(), coords.join(", ")));
    } else {
        t.note("not a cycle relative to Σ");
    }
    Ok(t)
}

fn intersect(input: &Input, (a, b): (&str, &str), perversities: &[String]) -> CliResult<Vec<Table>> {
    let space = &input.space;
    let (xa, xb) = (input.chain(a)?, input.chain(b)?);
    let ctx = DiagonalContext::new(&space.pm)?;
    let e = DomainElement::tensor(xa, xb);
    match perversities {
        [] => {
            let refined = OnceLock::new();
            let out = mu_refined(&ctx, &refined, &e)?;
            Ok(vec![chain_table(&format!("μ({a} ⊗ {b})"), &out.chain, space)?])
        }
        [p, q] => {
            let (p, q) = (input.perversity(p)?, input.perversity(q)?);
            let out = ih_product(&ctx, &e, &p, &q)?;
            let mut t = chain_table(&format!("μ({a} ⊗ {b}) for {} and {}", p.name, q.name), &out.chain, space)?;
            let values: Vec<String> = out.perversity.values.iter().map(|v| v.to_string()).collect();
            t.note(format!("allowable for {} = [{}]: {}", out.perversity.name, values.join(","), out.report.allowable()));
            Ok(vec![t])
        }
        _ => Err(CliError::Usage("intersect takes no perversity or exactly two".into())),
    }
}

fn gm_intersect(input: &Input, (a, b): (&str, &str)) -> CliResult<Vec<Table>> {
    let space = &input.space;
    let ctx = DiagonalContext::new(&space.pm)?;
    let out = gm_cycle_product(&ctx, input.chain(a)?, input.chain(b)?)?;
    Ok(vec![chain_table(&format!("{a} ⋔ {b}"), &out, space)?])
}

fn matrix_cell(m: &[Vec<i64>]) -> String {
    let rows: Vec<String> = m.iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")).collect();
    format!("[{}]", rows.join(";"))
}

fn duality(space: &Space) -> CliResult<(Table, bool)> {
    let pm = &space.pm;
    let k = &pm.complex;
    let o = pm.orientation()?.clone();
    let whole = Subcomplex::whole(k);
    let rows: Vec<CliResult<Vec<String>>> = (0..=pm.n)
        .into_par_iter()
        .map(|i| {
            let (ctx, kk, ll, map) = gm_duality_auto(k, &o, &pm.sigma, &whole, &pm.sigma, i)?;
            let cellular = cellular_gm_duality(&ctx, &kk, &ll, i)?;
            Ok(vec![
                i.to_string(),
                map.source().describe(),
                map.target().describe(),
                yes(map.is_isomorphism()),
                yes(cellular.map.same_as(&map.map)),
                matrix_cell(&map.map.to_i64()),
            ])
        })
        .collect();
    let mut t = Table::new("duality H^i(X − Σ) → H_{n−i}(X, Σ)")
        .num("i")
        .col("source")
        .col("target")
        .col("isomorphism")
        .col("cellular route agrees")
        .machine_col("matrix");
    let mut all = true;
    for r in rows {
        let r = r?;
        all &= r[3] == "yes" && r[4] == "yes";
        t.row(r);
    }
    Ok((t, all))
}

pub fn yes(b: bool) -> String {
    if b { "yes" } else { "no" }.into()
}
