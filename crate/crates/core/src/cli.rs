//! Command-line front end.
//!
//! Every verb prints one JSON document on stdout, or plain text with
//! `--pretty`. Exit codes: 0 success, 1 a verification failed (the report
//! carries the witness), 2 bad input (a JSON error on stderr, with
//! line/column when the input failed to parse).

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use crate::glue::{self, GlueError, GlueFile};
use crate::laurent::{LaurentError, LaurentPoly};
use crate::morphism::{self, Cm3Scope, MorphismError, MorphismFile, MorphismSpec, VerificationReport};
use crate::seed::{self, Seed, SeedError, SeedFile};
use crate::surface::{self, SurfaceError, Triangulation, TriangulationFile};

#[derive(Debug, Parser)]
#[command(name = "clusteralg", version, about = "Seeds, mutations and rooted cluster morphisms")]
pub struct Cli {
    /// Human-readable output instead of JSON.
    #[arg(long, global = true)]
    pub pretty: bool,
    /// Depth bound for every verification and exploration.
    #[arg(long, global = true, default_value_t = 3)]
    pub depth: usize,
    /// Also write the main result (a seed, morphism or triangulation) to this file.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct SeedArg {
    #[arg(long)]
    pub seed_file: PathBuf,
}

#[derive(Debug, Args)]
pub struct PolygonArg {
    /// Fan triangulation of the m-gon.
    #[arg(long, value_name = "M", conflicts_with = "triangulation_file")]
    pub fan: Option<u32>,
    #[arg(long)]
    pub triangulation_file: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ScopeArg {
    Exchanged,
    All,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mutate a seed along a sequence of variables.
    Mutate {
        #[command(flatten)]
        seed: SeedArg,
        /// Variable to mutate at (repeatable, applied in order).
        #[arg(long = "at", required = true)]
        at: Vec<String>,
    },
    /// Breadth-first exploration of the mutation class.
    Explore {
        #[command(flatten)]
        seed: SeedArg,
        #[arg(long, default_value_t = 10_000)]
        max_seeds: usize,
    },
    /// Cluster variables reachable within the depth bound.
    Variables {
        #[command(flatten)]
        seed: SeedArg,
        #[arg(long, default_value_t = 10_000)]
        max_seeds: usize,
    },
    /// Check CM3 along all biadmissible sequences, or replay one sequence.
    Verify {
        #[arg(long)]
        morphism_file: PathBuf,
        #[arg(long, value_enum, default_value = "exchanged")]
        scope: ScopeArg,
        /// Comma-separated sequence of source variables to replay.
        #[arg(long, value_delimiter = ',')]
        sequence: Option<Vec<String>>,
    },
    /// Compose morphisms: the first file is applied first.
    Compose {
        #[arg(long = "morphism-file", required = true, num_args = 1)]
        morphism_files: Vec<PathBuf>,
    },
    /// Amalgamated sum of two seeds along frozen subseeds.
    Glue {
        #[arg(long)]
        glue_file: PathBuf,
    },
    /// Cut a seed along a separating frozen subseed.
    Cut {
        #[command(flatten)]
        seed: SeedArg,
        /// Comma-separated frozen variables to cut along.
        #[arg(long, value_delimiter = ',', required = true)]
        delta: Vec<String>,
        /// Variables of the first piece (default: the first component).
        #[arg(long, value_delimiter = ',')]
        part: Option<Vec<String>>,
    },
    /// Specialise one variable to an integer.
    Specialise {
        #[command(flatten)]
        seed: SeedArg,
        #[arg(long)]
        at: String,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        value: String,
    },
    /// Restriction to a full subseed: other variables go to 1.
    Restrict {
        #[command(flatten)]
        seed: SeedArg,
        #[arg(long, value_delimiter = ',', required = true)]
        keep: Vec<String>,
    },
    /// Seed of a polygon triangulation.
    Polygon {
        #[command(flatten)]
        polygon: PolygonArg,
        /// Flip these arcs first, e.g. `--flip 1,3`.
        #[arg(long, value_name = "I,J")]
        flip: Vec<String>,
        #[arg(long)]
        export_dot: bool,
    },
    /// Check exchange relations against the Plücker relations.
    Plucker {
        #[command(flatten)]
        polygon: PolygonArg,
        /// Check every triangulation of the m-gon.
        #[arg(long, value_name = "M", conflicts_with_all = ["fan", "triangulation_file"])]
        all: Option<u32>,
    },
    /// DOT rendering of a seed's quiver.
    ExportDot {
        #[command(flatten)]
        seed: SeedArg,
    },
}

/// An input or I/O failure (exit code 2).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InputError {
    pub kind: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub column: Option<usize>,
}

impl InputError {
    fn new(kind: &str, message: impl ToString) -> InputError {
        InputError { kind: kind.into(), message: message.to_string(), file: None, line: None, column: None }
    }
}

macro_rules! input_error_from {
    ($($t:ty => $kind:expr),*) => {$(
        impl From<$t> for InputError {
            fn from(e: $t) -> InputError {
                let mut ie = InputError::new($kind, &e);
                if let Some(LaurentError::Parse { col, .. }) = laurent_cause(&e) {
                    ie.line = Some(1);
                    ie.column = Some(col);
                }
                ie
            }
        }
    )*};
}

input_error_from!(SeedError => "seed", MorphismError => "morphism", GlueError => "glue", SurfaceError => "surface");

trait LaurentCause {
    fn laurent(&self) -> Option<&LaurentError>;
}

impl LaurentCause for SeedError {
    fn laurent(&self) -> Option<&LaurentError> {
        match self {
            SeedError::Laurent(e) => Some(e),
            _ => None,
        }
    }
}

impl LaurentCause for MorphismError {
    fn laurent(&self) -> Option<&LaurentError> {
        match self {
            MorphismError::Laurent(e) => Some(e),
            MorphismError::Seed(e) => e.laurent(),
            _ => None,
        }
    }
}

impl LaurentCause for GlueError {
    fn laurent(&self) -> Option<&LaurentError> {
        None
    }
}

impl LaurentCause for SurfaceError {
    fn laurent(&self) -> Option<&LaurentError> {
        None
    }
}

fn laurent_cause<E: LaurentCause>(e: &E) -> Option<LaurentError> {
    e.laurent().cloned()
}

type CliResult<T> = std::result::Result<T, InputError>;

/// What a verb produced.
struct Outcome {
    json: Value,
    text: String,
    /// Written to `--out` if given.
    artifact: Option<Value>,
    failed: bool,
}

impl Outcome {
    fn ok(json: Value, text: String) -> Outcome {
        Outcome { json, text, artifact: None, failed: false }
    }

    fn with_artifact(mut self, a: impl Serialize) -> Outcome {
        self.artifact = Some(serde_json::to_value(a).expect("serialisable"));
        self
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        let mut ie = InputError::new("io", e);
        ie.file = Some(path.display().to_string());
        ie
    })?;
    serde_json::from_str(&text).map_err(|e| InputError {
        kind: "parse".into(),
        message: e.to_string(),
        file: Some(path.display().to_string()),
        line: Some(e.line()),
        column: Some(e.column()),
    })
}

fn load_seed(path: &Path) -> CliResult<Seed> {
    Ok(Seed::from_file(&read_json::<SeedFile>(path)?)?)
}

fn load_morphism(path: &Path) -> CliResult<MorphismSpec> {
    Ok(MorphismSpec::from_file(&read_json::<MorphismFile>(path)?)?)
}

fn load_triangulation(p: &PolygonArg) -> CliResult<Triangulation> {
    match (&p.fan, &p.triangulation_file) {
        (Some(m), None) => Ok(surface::fan_triangulation(*m)?),
        (None, Some(f)) => Ok(Triangulation::from_file(&read_json::<TriangulationFile>(f)?)?),
        _ => Err(InputError::new("usage", "give exactly one of --fan or --triangulation-file")),
    }
}

fn indices(s: &Seed, names: &[String]) -> CliResult<Vec<usize>> {
    names.iter().map(|n| s.index_of(n).map_err(InputError::from)).collect()
}

fn poly_json(s: &Seed) -> Vec<Value> {
    (0..s.len())
        .map(|i| {
            json!({
                "label": s.label(i),
                "value": s.expansion(i).to_fraction_string(),
                "exchangeable": s.is_exchangeable(i),
            })
        })
        .collect()
}

fn cluster_text(s: &Seed) -> String {
    let mut t = String::new();
    for i in 0..s.len() {
        let mark = if s.is_exchangeable(i) { "" } else { " (frozen)" };
        t.push_str(&format!("{} = {}{}\n", s.label(i), s.expansion(i).to_fraction_string(), mark));
    }
    t
}

fn matrix_text(rows: &[Vec<i64>]) -> String {
    rows.iter().map(|r| r.iter().map(|x| format!("{:>3}", x)).collect::<Vec<_>>().join(" ") + "\n").collect()
}

fn report_text(r: &VerificationReport) -> String {
    let mut t = format!(
        "{} to depth {} ({} sequences checked)\n",
        if r.verified() { "verified" } else { "FAILED" },
        r.depth,
        r.sequences_checked
    );
    if let Some(w) = &r.witness {
        t.push_str(&format!(
            "sequence [{}] -> [{}]\n  {}: f(source) = {}\n  {}: target    = {}\n",
            w.sequence.join(", "),
            w.image_sequence.join(", "),
            w.variable,
            w.source_value,
            w.variable,
            w.target_value
        ));
    }
    t
}

fn mutate(seed: &SeedArg, at: &[String]) -> CliResult<Outcome> {
    let s = load_seed(&seed.seed_file)?;
    let mut cur = s;
    for name in at {
        let k = cur.index_of(name)?;
        cur = cur.mutate(k)?;
    }
    let json = json!({
        "sequence": at,
        "cluster": poly_json(&cur),
        "matrix": cur.matrix().rows(),
    });
    let text = format!("after [{}]:\n{}{}", at.join(", "), cluster_text(&cur), matrix_text(&cur.matrix().rows()));
    Ok(Outcome::ok(json, text).with_artifact(cur.to_file()))
}

fn explore(cli: &Cli, seed: &SeedArg, max_seeds: usize) -> CliResult<Outcome> {
    let s = load_seed(&seed.seed_file)?;
    let class = seed::mutation_class(&s, cli.depth, max_seeds)?;
    let max_depth = class.depths.iter().max().copied().unwrap_or(0);
    let per_depth: Vec<usize> = (0..=max_depth).map(|d| class.depths.iter().filter(|&&x| x == d).count()).collect();
    let json = json!({
        "seeds": class.seeds.len(),
        "status": class.status,
        "per_depth": per_depth,
        "clusters": class.seeds.iter().map(|c| c.labels().to_vec()).collect::<Vec<_>>(),
    });
    let text = format!("{} seeds ({:?}); per depth {:?}\n", class.seeds.len(), class.status, per_depth);
    Ok(Outcome::ok(json, text))
}

fn variables(cli: &Cli, seed: &SeedArg, max_seeds: usize) -> CliResult<Outcome> {
    let s = load_seed(&seed.seed_file)?;
    let vs = seed::cluster_variables_bounded(&s, cli.depth, max_seeds)?;
    let vals: Vec<String> = vs.variables.iter().map(LaurentPoly::to_fraction_string).collect();
    let text = format!("{} variables ({:?})\n{}", vals.len(), vs.status, vals.iter().map(|v| format!("{}\n", v)).collect::<String>());
    Ok(Outcome::ok(json!({"count": vals.len(), "status": vs.status, "variables": vals}), text))
}

fn verify(cli: &Cli, file: &Path, scope: ScopeArg, sequence: &Option<Vec<String>>) -> CliResult<Outcome> {
    let f = load_morphism(file)?;
    let scope = match scope {
        ScopeArg::Exchanged => Cm3Scope::Exchanged,
        ScopeArg::All => Cm3Scope::All,
    };
    if let Some(seq) = sequence {
        let c = f.check_sequence(seq, scope)?;
        let failed = !c.mismatches.is_empty();
        let mut text = format!("sequence [{}] -> [{}]: {}\n", c.sequence.join(", "), c.image_sequence.join(", "), if failed { "MISMATCH" } else { "ok" });
        for w in &c.mismatches {
            text.push_str(&format!("  {}: f(source) = {}\n  {}: target    = {}\n", w.variable, w.source_value, w.variable, w.target_value));
        }
        let json = serde_json::to_value(&c).expect("serialisable");
        return Ok(Outcome { json, text, artifact: None, failed });
    }
    let r = f.verify_cm3_scoped(cli.depth, scope)?;
    Ok(Outcome { json: serde_json::to_value(&r).expect("serialisable"), text: report_text(&r), artifact: None, failed: !r.verified() })
}

fn compose(cli: &Cli, files: &[PathBuf]) -> CliResult<Outcome> {
    let mut ms = files.iter().map(|p| load_morphism(p));
    let mut acc = ms.next().ok_or_else(|| InputError::new("usage", "no morphism given"))??;
    for m in ms {
        acc = morphism::compose(&m?.rebase(acc.target())?, &acc)?;
    }
    let r = acc.verify_cm3(cli.depth)?;
    let file = acc.to_file();
    let json = json!({"morphism": file, "verification": r});
    let mut text = String::new();
    for (k, v) in &file.map {
        text.push_str(&format!("{} -> {}\n", k, v.as_str().map(str::to_string).unwrap_or_else(|| v.to_string())));
    }
    text.push_str(&report_text(&r));
    Ok(Outcome { json, text, artifact: Some(serde_json::to_value(&file).unwrap()), failed: !r.verified() })
}

fn glue_verb(file: &Path) -> CliResult<Outcome> {
    let spec = read_json::<GlueFile>(file)?.to_spec()?;
    let a = glue::amalgamate(&spec)?;
    let sf = a.seed.to_file();
    let text = format!("{}\n{}", sf.variables.join(" "), matrix_text(&sf.matrix));
    Ok(Outcome::ok(json!({"seed": sf}), text).with_artifact(&sf))
}

fn cut_verb(seed: &SeedArg, delta: &[String], part: &Option<Vec<String>>) -> CliResult<Outcome> {
    let s = load_seed(&seed.seed_file)?;
    let d = indices(&s, delta)?;
    let p = match part {
        Some(names) => glue::separating_partition_with(&s, &d, &indices(&s, names)?)?,
        None => glue::separating_partition(&s, &d)?,
    };
    let (a, b) = glue::cut(&p);
    let (fa, fb) = (a.to_file(), b.to_file());
    let text = format!(
        "first:  {}\n{}second: {}\n{}",
        fa.variables.join(" "),
        matrix_text(&fa.matrix),
        fb.variables.join(" "),
        matrix_text(&fb.matrix)
    );
    Ok(Outcome::ok(json!({"first": fa, "second": fb}), text))
}

fn specialise_verb(cli: &Cli, seed: &SeedArg, at: &str, value: &str) -> CliResult<Outcome> {
    let s = load_seed(&seed.seed_file)?;
    let x = s.index_of(at)?;
    let n: BigInt = value.parse().map_err(|_| InputError::new("usage", format!("`{}` is not an integer", value)))?;
    let (sigma, report) = morphism::specialisation(&s, x, n)?;
    let r = sigma.verify_cm3(cli.depth)?;
    let file = sigma.to_file();
    let mut text = format!("{} -> {}\n", report.variable, report.value);
    for f in &report.flags {
        text.push_str(&format!("  flagged: {}\n", serde_json::to_string(f).unwrap()));
    }
    text.push_str(&report_text(&r));
    let json = json!({"values": report, "morphism": file, "verification": r});
    Ok(Outcome { json, text, artifact: Some(serde_json::to_value(&file).unwrap()), failed: !r.verified() })
}

fn restrict_verb(cli: &Cli, seed: &SeedArg, keep: &[String]) -> CliResult<Outcome> {
    let s = load_seed(&seed.seed_file)?;
    let m = morphism::restriction(&s, &indices(&s, keep)?)?;
    let r = m.verify_cm3(cli.depth)?;
    let file = m.to_file();
    let text = format!("{}\n{}", file.target.variables.join(" "), report_text(&r));
    let json = json!({"morphism": file, "verification": r});
    Ok(Outcome { json, text, artifact: Some(serde_json::to_value(&file).unwrap()), failed: !r.verified() })
}

fn parse_arc(s: &str) -> CliResult<(u32, u32)> {
    let bad = || InputError::new("usage", format!("`{}` is not an arc `i,j`", s));
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

fn polygon_verb(p: &PolygonArg, flips: &[String], dot: bool) -> CliResult<Outcome> {
    let mut t = load_triangulation(p)?;
    for f in flips {
        t = t.flip(parse_arc(f)?)?;
    }
    let s = surface::polygon_seed(&t);
    let tf = t.to_file();
    if dot {
        let d = s.to_dot();
        return Ok(Outcome::ok(Value::String(d.clone()), d).with_artifact(&tf));
    }
    let sf = s.to_file();
    let text = format!("{}\n{}", sf.variables.join(" "), matrix_text(&sf.matrix));
    Ok(Outcome::ok(json!({"triangulation": tf, "seed": sf}), text).with_artifact(&tf))
}

fn plucker_verb(p: &PolygonArg, all: Option<u32>) -> CliResult<Outcome> {
    let ts = match all {
        Some(m) => surface::enumerate_triangulations(m)?,
        None => vec![load_triangulation(p)?],
    };
    let mut reports = Vec::new();
    let mut text = String::new();
    let mut failed = false;
    for t in &ts {
        let r = surface::plucker_check(t)?;
        failed |= !r.holds();
        let arcs: Vec<String> = t.internal_arcs().map(|a| format!("{}{}", a.0, a.1)).collect();
        text.push_str(&format!("[{}]\n", arcs.join(" ")));
        for l in &r.lines {
            text.push_str(&format!("  {} {}\n", if l.holds { "ok  " } else { "FAIL" }, l.relation));
        }
        reports.push(json!({"triangulation": t.to_file(), "report": r}));
    }
    let json = json!({"triangulations": ts.len(), "holds": !failed, "reports": reports});
    Ok(Outcome { json, text, artifact: None, failed })
}

fn dispatch(cli: &Cli) -> CliResult<Outcome> {
    match &cli.command {
        Command::Mutate { seed, at } => mutate(seed, at),
        Command::Explore { seed, max_seeds } => explore(cli, seed, *max_seeds),
        Command::Variables { seed, max_seeds } => variables(cli, seed, *max_seeds),
        Command::Verify { morphism_file, scope, sequence } => verify(cli, morphism_file, *scope, sequence),
        Command::Compose { morphism_files } => compose(cli, morphism_files),
        Command::Glue { glue_file } => glue_verb(glue_file),
        Command::Cut { seed, delta, part } => cut_verb(seed, delta, part),
        Command::Specialise { seed, at, value } => specialise_verb(cli, seed, at, value),
        Command::Restrict { seed, keep } => restrict_verb(cli, seed, keep),
        Command::Polygon { polygon, flip, export_dot } => polygon_verb(polygon, flip, *export_dot),
        Command::Plucker { polygon, all } => plucker_verb(polygon, *all),
        Command::ExportDot { seed } => {
            let d = load_seed(&seed.seed_file)?.to_dot();
            Ok(Outcome::ok(Value::String(d.clone()), d))
        }
    }
}

/// Runs one invocation and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let target: &mut dyn Write = if code == 0 { out } else { err };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let outcome = dispatch(&cli).and_then(|o| {
        if let (Some(path), Some(a)) = (&cli.out, &o.artifact) {
            std::fs::write(path, serde_json::to_string_pretty(a).unwrap() + "\n").map_err(|e| {
                let mut ie = InputError::new("io", e);
                ie.file = Some(path.display().to_string());
                ie
            })?;
        }
        Ok(o)
    });
    match outcome {
        Ok(o) => {
            let is_dot = matches!(o.json, Value::String(_));
            if cli.pretty || is_dot {
                let _ = write!(out, "{}", o.text);
            } else {
                let _ = writeln!(out, "{}", serde_json::to_string_pretty(&o.json).unwrap());
            }
            if o.failed {
                1
            } else {
                0
            }
        }
        Err(e) => {
            let _ = writeln!(err, "{}", serde_json::to_string(&json!({ "error": e })).unwrap());
            2
        }
    }
}
