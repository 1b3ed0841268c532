//! Subcommands of the `bcjump` binary. Every command builds a [`Report`]; the
//! human view is rendered from the same report.

use std::fmt;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Subcommand};

use bcjump::catalog::{self, classify, expected_dims, Subclass, Table};
use bcjump::cohomology::{self, l_cohomology, CohomologyGroup, CohomologyKind};
use bcjump::deformation::{
    extend_class, jump_scan, FamilySpec, Grid, KodairaSpencerClass, ObstructionContext, SourceKind,
};
use bcjump::exterior::{Bidegree, ConstForm};
use bcjump::report::Report;
use bcjump::scalars::{GaussianRational, ParseContext, Scalar};
use bcjump::structure::{parse_spec, ManifoldSpec, SpecFile};

/// A mismatch found by the program itself, as opposed to bad input.
#[derive(Debug)]
pub struct Breach(pub String);

impl fmt::Display for Breach {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Breach {}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Dimensions (and optionally representatives) of cohomology groups.
    Cohomology(CohomologyArgs),
    /// Recompute the reference tables at a subclass sample point.
    Tables(TablesArgs),
    /// First-order obstruction of one class along one direction.
    Obstruct(ObstructArgs),
    /// Scan bidegrees for first-order evidence of jumping.
    Jump(JumpArgs),
    /// Classify a deformation direction (t11 t12 t21 t22).
    Classify(ClassifyArgs),
}

#[derive(Args, Debug)]
pub struct TargetArgs {
    /// Builtin name (iwasawa, torusN, sample-<label>) or a path to a spec file.
    pub target: Option<String>,
    #[arg(long, conflicts_with_all = ["target", "spec"])]
    pub builtin: Option<String>,
    #[arg(long, conflicts_with = "target")]
    pub spec: Option<String>,
    /// Parameter values for family spec files, e.g. `t=1/2,u=i`.
    #[arg(long)]
    pub at: Option<String>,
}

#[derive(Args, Debug)]
pub struct CohomologyArgs {
    #[command(flatten)]
    pub target: TargetArgs,
    /// Comma-separated kinds: dr, dolbeault, antidolbeault, bc, a, l.
    #[arg(long, value_delimiter = ',', default_value = "dr,dolbeault,bc,a")]
    pub kind: Vec<String>,
    /// Every bidegree (the default).
    #[arg(long, conflicts_with_all = ["bidegree", "degree"])]
    pub all: bool,
    #[arg(long, num_args = 2, value_names = ["P", "Q"])]
    pub bidegree: Option<Vec<usize>>,
    /// Total degree for de Rham, position for the L-complex.
    #[arg(long)]
    pub degree: Option<usize>,
    /// L-complex shape.
    #[arg(long, num_args = 2, value_names = ["P", "Q"])]
    pub shape: Option<Vec<usize>>,
    /// List class representatives (single degree or bidegree only).
    #[arg(long)]
    pub representatives: bool,
}

#[derive(Args, Debug)]
pub struct TablesArgs {
    /// i, ii.a, ii.b, iii.a or iii.b.
    pub label: String,
}

#[derive(Args, Debug)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["bc", "aeppli", "bclass"])))]
pub struct ObstructArgs {
    #[command(flatten)]
    pub target: TargetArgs,
    /// Kodaira-Spencer direction, e.g. `t21=1,t22=i`.
    #[arg(long)]
    pub dir: String,
    #[arg(long, num_args = 2, value_names = ["P", "Q"])]
    pub bc: Option<Vec<usize>>,
    #[arg(long, num_args = 2, value_names = ["P", "Q"])]
    pub aeppli: Option<Vec<usize>>,
    #[arg(long, num_args = 3, value_names = ["P", "Q", "L"])]
    pub bclass: Option<Vec<usize>>,
    /// Form literal of a representative, or `#k` for the k-th basis class.
    #[arg(long)]
    pub class: String,
    /// Also try to extend the class to this order along the direction.
    #[arg(long)]
    pub order: Option<u32>,
}

#[derive(Args, Debug)]
pub struct JumpArgs {
    #[command(flatten)]
    pub target: TargetArgs,
    #[arg(long)]
    pub dir: String,
    /// Comma-separated invariants to scan: bc, a.
    #[arg(long, value_delimiter = ',', default_value = "bc,a")]
    pub grid: Vec<String>,
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    /// t11 t12 t21 t22 as scalar literals (put `--` before values like `-i`).
    #[arg(num_args = 4, value_names = ["T11", "T12", "T21", "T22"], allow_negative_numbers = true)]
    pub t: Vec<String>,
}

pub fn run(cmd: &Command, invocation: String) -> Result<Report> {
    let mut report = Report::new(invocation);
    match cmd {
        Command::Cohomology(a) => cohomology_cmd(a, &mut report)?,
        Command::Tables(a) => tables_cmd(a, &mut report)?,
        Command::Obstruct(a) => obstruct_cmd(a, &mut report)?,
        Command::Jump(a) => jump_cmd(a, &mut report)?,
        Command::Classify(a) => classify_cmd(a, &mut report)?,
    }
    Ok(report)
}

fn load(t: &TargetArgs) -> Result<ManifoldSpec<GaussianRational>> {
    let (path, name) = match (&t.spec, &t.builtin, &t.target) {
        (Some(p), _, _) => (Some(p.as_str()), None),
        (_, Some(b), _) => (None, Some(b.as_str())),
        (_, _, Some(x)) if x.contains('/') || x.ends_with(".spec") || Path::new(x).is_file() => (Some(x.as_str()), None),
        (_, _, Some(x)) => (None, Some(x.as_str())),
        _ => bail!("no structure given: pass a builtin name or --spec FILE"),
    };
    if let Some(name) = name {
        if t.at.is_some() {
            bail!("--at applies to family spec files only");
        }
        return Ok(catalog::builtin(name)?);
    }
    let path = path.unwrap();
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
    match parse_spec(&text).with_context(|| format!("in {path}"))? {
        SpecFile::Fixed(s) => {
            if t.at.is_some() {
                bail!("--at given but {path} has no parameters");
            }
            Ok(s)
        }
        SpecFile::Family(f) => {
            let ring = f.ring().expect("family specs carry a ring").clone();
            let mut values = vec![GaussianRational::zero(); ring.num_base()];
            for pair in t.at.as_deref().unwrap_or("").split(',').map(str::trim).filter(|p| !p.is_empty()) {
                let (k, v) = pair.split_once('=').ok_or_else(|| anyhow!("bad --at entry `{pair}`"))?;
                let i = ring
                    .base_names()
                    .iter()
                    .position(|n| n == k.trim())
                    .ok_or_else(|| anyhow!("unknown parameter `{}`", k.trim()))?;
                values[i] = v.trim().parse().map_err(|e| anyhow!("bad value for {k}: {e}"))?;
            }
            Ok(f.evaluate(&values)?)
        }
    }
}

fn bidegree_arg(v: &Option<Vec<usize>>) -> Option<Bidegree> {
    v.as_ref().map(|v| Bidegree::new(v[0], v[1]))
}

fn kind_of(s: &str) -> Result<CohomologyKind> {
    Ok(match s.trim() {
        "dr" => CohomologyKind::DeRham,
        "dolbeault" => CohomologyKind::Dolbeault,
        "antidolbeault" => CohomologyKind::AntiDolbeault,
        "bc" => CohomologyKind::BottChern,
        "a" | "aeppli" => CohomologyKind::Aeppli,
        "l" => CohomologyKind::LComplex,
        other => bail!("unknown kind `{other}` (expected dr, dolbeault, antidolbeault, bc, a or l)"),
    })
}

fn push_representatives(report: &mut Report, name: String, g: &CohomologyGroup) {
    let s = report.section(name);
    for (i, r) in g.representatives.iter().enumerate() {
        s.push(format!("{}", i + 1), r);
    }
}

fn cohomology_cmd(a: &CohomologyArgs, report: &mut Report) -> Result<()> {
    let spec = load(&a.target)?;
    let n = spec.dim();
    let single_bd = bidegree_arg(&a.bidegree);
    if a.representatives && single_bd.is_none() && a.degree.is_none() {
        bail!("--representatives needs --bidegree or --degree");
    }
    for k in &a.kind {
        let kind = kind_of(k)?;
        match kind {
            CohomologyKind::DeRham => {
                let degrees: Vec<usize> = match a.degree {
                    Some(d) => vec![d],
                    None => (0..=2 * n).collect(),
                };
                let mut groups = Vec::new();
                for d in degrees {
                    groups.push((d, cohomology::de_rham(&spec, d)?));
                }
                let s = report.section("dr");
                for (d, g) in &groups {
                    s.push(format!("b{d}"), g.dim);
                }
                if a.representatives {
                    push_representatives(report, format!("dr{} representatives", groups[0].0), &groups[0].1);
                }
            }
            CohomologyKind::LComplex => {
                let shape = bidegree_arg(&a.shape).ok_or_else(|| anyhow!("kind l needs --shape P Q"))?;
                let positions: Vec<usize> = match a.degree {
                    Some(d) => vec![d],
                    None => (0..=2 * n + 1).collect(),
                };
                let mut groups = Vec::new();
                for k in positions {
                    groups.push((k, l_cohomology(&spec, shape.p, shape.q, k)?));
                }
                let name = format!("l{shape}");
                let s = report.section(name.clone());
                for (k, g) in &groups {
                    s.push(format!("H{k}"), g.dim);
                }
                if a.representatives {
                    push_representatives(report, format!("{name} H{} representatives", groups[0].0), &groups[0].1);
                }
            }
            _ => {
                let bds: Vec<Bidegree> = match single_bd {
                    Some(b) => vec![b],
                    None => (0..=n).flat_map(|p| (0..=n).map(move |q| Bidegree::new(p, q))).collect(),
                };
                let mut groups = Vec::new();
                for b in bds {
                    groups.push((b, cohomology::group(&spec, kind, b)?));
                }
                let s = report.section(kind.short_name());
                for (b, g) in &groups {
                    s.push(b.to_string(), g.dim);
                }
                if a.representatives {
                    let (b, g) = &groups[0];
                    push_representatives(report, format!("{}{b} representatives", kind.short_name()), g);
                }
            }
        }
    }
    Ok(())
}

fn tables_cmd(a: &TablesArgs, report: &mut Report) -> Result<()> {
    let label: Subclass = a.label.parse()?;
    let spec = label.sample_point();
    let mut failures = 0;
    {
        let s = report.section("tables");
        s.push("label", label);
        s.push("direction", label.sample_direction().to_direction_string());
    }
    for table in Table::ALL {
        let got = table.compute(&spec)?;
        let want = expected_dims(label, table)?;
        let s = report.section(table.key());
        for ((col, g), w) in table.columns().iter().zip(&got).zip(&want) {
            let verdict = if g == w { "PASS" } else { "FAIL" };
            failures += (g != w) as usize;
            s.push(col, format!("computed {g} expected {w} {verdict}"));
        }
    }
    report.section("result").push("verdict", if failures == 0 { "PASS" } else { "FAIL" }).push("mismatches", failures);
    Ok(())
}

fn direction(s: &str, spec: &ManifoldSpec<GaussianRational>) -> Result<KodairaSpencerClass<GaussianRational>> {
    let k = KodairaSpencerClass::parse_direction(s, spec.dim())?;
    k.check_closed(spec)?;
    Ok(k)
}

fn obstruct_cmd(a: &ObstructArgs, report: &mut Report) -> Result<()> {
    let spec = load(&a.target)?;
    let n = spec.dim();
    let dir = direction(&a.dir, &spec)?;
    let source = if let Some(b) = bidegree_arg(&a.bc) {
        SourceKind::BottChern(b)
    } else if let Some(b) = bidegree_arg(&a.aeppli) {
        SourceKind::Aeppli(b)
    } else {
        let v = a.bclass.as_ref().expect("clap enforces one source");
        SourceKind::BClass { shape: Bidegree::new(v[0], v[1]), level: v[2] }
    };
    if source.shape().p > n + 1 || source.shape().q > n + 1 {
        bail!("source {source} out of range for dimension {n}");
    }
    let ctx = ObstructionContext::new(&spec, source)?;
    let theta = match a.class.trim().strip_prefix('#') {
        Some(k) => {
            let k: usize = k.parse().map_err(|_| anyhow!("unknown class selector `{}`", a.class))?;
            ctx.source_group
                .representatives
                .get(k.wrapping_sub(1))
                .cloned()
                .ok_or_else(|| anyhow!("unknown class selector `{}`: the group has dimension {}", a.class, ctx.source_group.dim))?
        }
        None => ConstForm::parse(&a.class, n, &ParseContext::default())
            .map_err(|e| anyhow!("unknown class selector `{}`: {e}", a.class))?,
    };
    let o = ctx.obstruction(&dir, &theta)?;
    let coords: Vec<String> = o.coordinates.iter().map(|c| c.to_string()).collect();
    report
        .section("obstruction")
        .push("source", source)
        .push("class", &theta)
        .push("direction", dir.to_direction_string())
        .push("u", &o.u)
        .push("v", &o.v)
        .push("total", o.form())
        .push("target", format!("position {} of L{}", ctx.position() + 1, source.shape()))
        .push("target_dim", ctx.target.dim)
        .push("coordinates", if coords.is_empty() { "-".to_string() } else { coords.join(" ") })
        .push("verdict", if o.vanishes { "vanishing" } else { "nonvanishing" });
    if let Some(order) = a.order {
        let family = FamilySpec::along_line(&spec, &dir, order.max(1))?;
        let ext = extend_class(&family, source, &theta, order)?;
        let s = report.section("extension");
        s.push("requested", ext.requested).push("achieved", ext.achieved);
        match (&ext.extended, &ext.obstruction) {
            (Some(f), _) => {
                s.push("verdict", "extends").push("extended", f);
            }
            (_, Some(ob)) => {
                s.push("verdict", "obstructed").push("obstruction", ob.form());
            }
            _ => {}
        }
    }
    Ok(())
}

fn jump_cmd(a: &JumpArgs, report: &mut Report) -> Result<()> {
    let spec = load(&a.target)?;
    let n = spec.dim();
    let dir = direction(&a.dir, &spec)?;
    let grids: Vec<Grid> = a
        .grid
        .iter()
        .map(|g| match g.trim() {
            "bc" => Ok(Grid::BottChern),
            "a" | "aeppli" => Ok(Grid::Aeppli),
            other => Err(anyhow!("unknown grid `{other}` (expected bc or a)")),
        })
        .collect::<Result<_>>()?;
    let bds: Vec<Bidegree> = (0..=n).flat_map(|p| (0..=n).map(move |q| Bidegree::new(p, q))).collect();
    let family = FamilySpec::along_direction(&spec, &dir)?;
    let scan = jump_scan(&family, &[GaussianRational::one()], &grids, &bds)?;
    {
        let s = report.section("jump");
        s.push("direction", dir.to_direction_string());
        for &g in &grids {
            let flagged: Vec<String> = scan.flagged(g).iter().map(|b| b.to_string()).collect();
            s.push(format!("flagged_{}", g.name()), if flagged.is_empty() { "none".to_string() } else { flagged.join(" ") });
        }
    }
    for &g in &grids {
        let s = report.section(format!("jump {}", g.name()));
        for e in scan.entries.iter().filter(|e| e.grid == g) {
            s.push(
                e.bidegree.to_string(),
                format!(
                    "{} central {} sample {} drop {} bound {}",
                    if e.jumps { "jumps" } else { "no-evidence" },
                    e.central_dim,
                    e.sample_dim,
                    e.observed_drop(),
                    e.rank_bound
                ),
            );
        }
    }
    for e in scan.entries.iter().filter(|e| e.jumps) {
        let s = report.section(format!("witnesses {} {}", e.grid.name(), e.bidegree));
        for (i, w) in e.witnesses.iter().enumerate() {
            s.push(format!("{}", i + 1), format!("{} | {} | {}", w.source, w.class, w.obstruction));
        }
    }
    let disagree: Vec<String> = scan
        .entries
        .iter()
        .filter(|e| e.jumps && e.observed_drop() <= 0)
        .map(|e| format!("{} {}", e.grid.name(), e.bidegree))
        .collect();
    if !disagree.is_empty() {
        return Err(Breach(format!("nonvanishing obstruction without a dimension drop at {}", disagree.join(", "))).into());
    }
    Ok(())
}

fn classify_cmd(a: &ClassifyArgs, report: &mut Report) -> Result<()> {
    let t: Vec<GaussianRational> = a
        .t
        .iter()
        .map(|s| s.parse::<GaussianRational>().map_err(|e| anyhow!("bad scalar `{s}`: {e}")))
        .collect::<Result<_>>()?;
    let t: [GaussianRational; 4] = t.try_into().map_err(|_| anyhow!("classify takes exactly four scalars"))?;
    let c = classify(t.clone());
    let [t11, t12, t21, t22] = t;
    let s = report.section("classification");
    s.push("t11", t11).push("t12", t12).push("t21", t21).push("t22", t22);
    s.push("D", &c.d).push("rank_s", c.rank_s).push("label", c.label);
    Ok(())
}

/// Human-readable rendering of a report. Sections whose keys are all
/// bidegrees with integer values are drawn as p×q grids.
pub fn render_human(r: &Report) -> String {
    let mut out = String::new();
    for s in &r.sections {
        out.push_str(&format!("{}\n", s.name));
        let grid: Option<Vec<(Bidegree, usize)>> = s
            .entries
            .iter()
            .map(|(k, v)| {
                let (p, q) = k.strip_prefix('(')?.strip_suffix(')')?.split_once(',')?;
                Some((Bidegree::new(p.parse().ok()?, q.parse().ok()?), v.parse().ok()?))
            })
            .collect();
        match grid {
            Some(cells) if cells.len() > 1 => {
                let pmax = cells.iter().map(|c| c.0.p).max().unwrap_or(0);
                let qmax = cells.iter().map(|c| c.0.q).max().unwrap_or(0);
                out.push_str("       ");
                for q in 0..=qmax {
                    out.push_str(&format!("{:>5}", format!("q={q}")));
                }
                out.push('\n');
                for p in 0..=pmax {
                    out.push_str(&format!("  p={p:<2} "));
                    for q in 0..=qmax {
                        let cell = cells.iter().find(|c| c.0 == Bidegree::new(p, q));
                        out.push_str(&format!("{:>5}", cell.map(|c| c.1.to_string()).unwrap_or_else(|| ".".into())));
                    }
                    out.push('\n');
                }
            }
            _ => {
                let w = s.entries.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
                for (k, v) in &s.entries {
                    out.push_str(&format!("  {k:<w$}  {v}\n"));
                }
            }
        }
        out.push('\n');
    }
    if let Some(ms) = r.elapsed_ms {
        out.push_str(&format!("elapsed {ms} ms\n"));
    }
    out
}
