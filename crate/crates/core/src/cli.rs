//! The `hml` command line.
//!
//! Exit codes: 0 for a positive result (true, valid, accepted, no
//! counterexample), 1 for a negative one, 2 for usage and input errors.
//! Results go to the output stream, diagnostics to the error stream. With
//! `--format json` every result is one JSON object per line; the records are
//! documented in the README.

use std::fmt::Display;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;
use serde_json::{json, Value as Json};

use crate::formula::Formula;
use crate::proof::{parse_prf, write_just, Checker, SchemeId, SystemId, Theory};
use crate::semantics::parse_mdl;
use crate::semantics::random::{random_assignment, rng, SizeBounds, DENSITY};
use crate::semantics::sweep::{soundness_sweep, SweepConfig, SweepTarget};
use crate::semantics::{Assignment, Model};
use crate::signature::{parse_sig, Signature, SymbolTable};
use crate::smc::{self, ConcreteConfig, Machine, Memory, RunError, SmcTheory};
use crate::sortcheck::sort_of;
use crate::syntax::{parse_formula, print_formula, Parser as FormulaParser};
use crate::translation::{correspondence_sides, default_pivot, export_fo, translate_at};

#[derive(Parser, Debug)]
#[command(name = "hml", about = "Many-sorted hybrid modal logic toolkit", disable_version_flag = true)]
struct Cli {
    /// Print the version and the figure-to-scheme table.
    #[arg(long)]
    version: bool,
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Load a signature, and optionally sort-check a formula or load a model.
    Check(CheckArgs),
    /// Evaluate a formula on a finite model.
    Mc(McArgs),
    /// Check a proof file.
    Prove(ProveArgs),
    /// Print the first-order standard translation of a formula.
    Translate(TranslateArgs),
    /// Compare a formula with its translation on random worlds and assignments.
    Correspond(CorrespondArgs),
    /// Search random models for counterexamples to axiom instances.
    Soundness(SoundnessArgs),
    /// The SMC machine.
    #[command(subcommand)]
    Smc(SmcCommand),
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[arg(long)]
    sig: PathBuf,
    #[arg(long)]
    formula: Option<String>,
    /// Expected sort of the formula.
    #[arg(long)]
    sort: Option<String>,
    #[arg(long)]
    model: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct McArgs {
    #[arg(long)]
    sig: PathBuf,
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    formula: String,
    /// Evaluate at this world only, under the model's assignment.
    #[arg(long, conflicts_with = "all_worlds")]
    world: Option<String>,
    /// Decide validity: every world, every assignment of free variables.
    #[arg(long)]
    all_worlds: bool,
}

#[derive(Args, Debug)]
struct ProveArgs {
    #[arg(long)]
    system: String,
    #[arg(long)]
    sig: PathBuf,
    /// `smc` is the only built-in theory.
    #[arg(long)]
    theory: Option<String>,
    /// Hypotheses, named h1, h2, ... in order.
    #[arg(long)]
    hyp: Vec<String>,
    #[arg(long)]
    proof: PathBuf,
}

#[derive(Args, Debug)]
struct TranslateArgs {
    #[arg(long)]
    sig: PathBuf,
    #[arg(long)]
    formula: String,
    #[arg(long)]
    pivot: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CorrespondArgs {
    #[arg(long)]
    sig: PathBuf,
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    formula: String,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct SoundnessArgs {
    /// Sweep every scheme of this system.
    #[arg(long, required_unless_present = "target")]
    system: Option<String>,
    /// Sweep these targets instead: scheme ids, NOM_Z, SYM, BRIDGE or BROKEN_AT_ELIM.
    #[arg(long)]
    target: Vec<String>,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Maximum worlds per sort.
    #[arg(long, default_value_t = 3)]
    size: usize,
    #[arg(long, default_value_t = DENSITY)]
    density: f64,
    /// Depth of the random formulas plugged into schemes.
    #[arg(long, default_value_t = 3)]
    depth: usize,
}

#[derive(Subcommand, Debug)]
enum SmcCommand {
    /// Run a program on the machine.
    Run(SmcRunArgs),
    /// Replay the P′ proof.
    Verify(SmcVerifyArgs),
    /// Print the SMC signature in .sig syntax.
    Sig,
}

#[derive(Args, Debug)]
struct SmcRunArgs {
    #[arg(long)]
    program: PathBuf,
    /// Initial memory, e.g. "i=3,j=4".
    #[arg(long, default_value = "")]
    mem: String,
    #[arg(long, default_value_t = smc::DEFAULT_FUEL)]
    fuel: u64,
}

#[derive(Args, Debug)]
struct SmcVerifyArgs {
    #[arg(long, required = true)]
    pprime: bool,
    /// Also write the replayed proof in .prf syntax.
    #[arg(long)]
    write: Option<PathBuf>,
}

/// An input or usage problem; exit code 2.
struct Fatal(String);

impl<E: Display> From<E> for Fatal {
    fn from(e: E) -> Self {
        Fatal(e.to_string())
    }
}

struct Out<'a> {
    w: &'a mut dyn Write,
    json: bool,
}

impl Out<'_> {
    fn record(&mut self, text: impl Display, value: Json) -> Result<(), Fatal> {
        if self.json {
            writeln!(self.w, "{value}")?;
        } else {
            writeln!(self.w, "{text}")?;
        }
        Ok(())
    }
}

/// Runs the command line in `args` (program name first) and returns the exit
/// code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand) {
                let _ = write!(out, "{text}");
                if e.kind() == ErrorKind::DisplayHelp { 0 } else { 2 }
            } else {
                let _ = write!(err, "{text}");
                2
            };
        }
    };
    let mut o = Out { w: out, json: cli.format == Format::Json };
    let result = match (cli.version, cli.command) {
        (true, _) => version(&mut o).map(|()| 0),
        (false, None) => Err(Fatal("no subcommand given; see `hml --help`".into())),
        (false, Some(cmd)) => dispatch(cmd, &mut o),
    };
    match result {
        Ok(code) => code,
        Err(Fatal(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}

fn dispatch(cmd: Command, o: &mut Out) -> Result<i32, Fatal> {
    match cmd {
        Command::Check(a) => check(a, o),
        Command::Mc(a) => mc(a, o),
        Command::Prove(a) => prove(a, o),
        Command::Translate(a) => translate(a, o),
        Command::Correspond(a) => correspond(a, o),
        Command::Soundness(a) => soundness(a, o),
        Command::Smc(SmcCommand::Run(a)) => smc_run(a, o),
        Command::Smc(SmcCommand::Verify(a)) => smc_verify(a, o),
        Command::Smc(SmcCommand::Sig) => {
            let (sig, tab) = smc::smc_signature();
            write!(o.w, "{}", crate::signature::write_sig(&sig, &tab))?;
            Ok(0)
        }
    }
}

fn version(o: &mut Out) -> Result<(), Fatal> {
    let base: Vec<SchemeId> = SystemId::K_SIGMA.schemes().to_vec();
    let rows: Vec<(usize, SystemId, Vec<&str>)> = SystemId::ALL
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let extra = s.schemes().iter().filter(|id| i == 0 || !base.contains(id)).map(|id| id.name()).collect();
            (i + 1, *s, extra)
        })
        .collect();
    if o.json {
        let table: Vec<Json> =
            rows.iter().map(|(fig, s, ids)| json!({"figure": fig, "system": s.name(), "schemes": ids})).collect();
        return o.record("", json!({"command": "version", "version": env!("CARGO_PKG_VERSION"), "figures": table}));
    }
    writeln!(o.w, "hml {}", env!("CARGO_PKG_VERSION"))?;
    writeln!(o.w, "figure  system       schemes")?;
    for (fig, s, ids) in rows {
        let ids = if fig == 1 { ids.join(" ") } else { format!("K_SIGMA schemes + {}", ids.join(" ")) };
        writeln!(o.w, "{fig:<7} {:<12} {ids}", s.name())?;
    }
    Ok(())
}

fn read(path: &Path) -> Result<String, Fatal> {
    std::fs::read_to_string(path).map_err(|e| Fatal(format!("cannot read {}: {e}", path.display())))
}

fn load_sig(path: &Path) -> Result<(Signature, SymbolTable), Fatal> {
    parse_sig(&read(path)?).map_err(|e| Fatal(format!("{}: {e}", path.display())))
}

fn load_model(sig: &Signature, tab: &SymbolTable, path: &Path) -> Result<(Model, Assignment), Fatal> {
    parse_mdl(sig, tab, &read(path)?).map_err(|e| Fatal(format!("{}: {e}", path.display())))
}

fn formula(sig: &Signature, tab: &SymbolTable, text: &str) -> Result<Formula, Fatal> {
    parse_formula(sig, tab, text).map_err(|e| Fatal(format!("formula: {e}")))
}

fn check(a: CheckArgs, o: &mut Out) -> Result<i32, Fatal> {
    let (sig, tab) = load_sig(&a.sig)?;
    let symbols = tab.iter().count();
    o.record(
        format!("signature: {} sorts, {} operators, {symbols} symbols", sig.sorts().len(), sig.ops().len()),
        json!({"command": "check", "kind": "signature", "sorts": sig.sorts().len(), "operators": sig.ops().len(), "symbols": symbols}),
    )?;
    if let Some(path) = &a.model {
        let (m, _) = load_model(&sig, &tab, path)?;
        let sizes: Vec<String> = m.sorts().map(|s| format!("{s}:{}", m.size(s))).collect();
        o.record(format!("model: {}", sizes.join(" ")), json!({"command": "check", "kind": "model", "worlds": sizes}))?;
    }
    let mut code = 0;
    if let Some(text) = &a.formula {
        let e = crate::sexp::parse_one(text).map_err(|e| Fatal(format!("formula: {e}")))?;
        let f = FormulaParser::new(&sig, &tab).formula(&e).map_err(|e| Fatal(format!("formula: {e}")))?;
        match sort_of(&sig, &tab, &f) {
            Ok(s) => {
                let matches = a.sort.as_deref().is_none_or(|want| want == s.name());
                if !matches {
                    code = 1;
                }
                let printed = print_formula(&f);
                o.record(
                    format!("{}: {printed} : {s}", if matches { "well-sorted" } else { "wrong sort" }),
                    json!({"command": "check", "kind": "formula", "well_sorted": true, "sort": s.name(), "expected": a.sort, "formula": printed}),
                )?;
            }
            Err(e) => {
                code = 1;
                o.record(
                    format!("ill-sorted: {e}"),
                    json!({"command": "check", "kind": "formula", "well_sorted": false, "error": e.to_string()}),
                )?;
            }
        }
    }
    Ok(code)
}

fn mc(a: McArgs, o: &mut Out) -> Result<i32, Fatal> {
    let (sig, tab) = load_sig(&a.sig)?;
    let (m, g) = load_model(&sig, &tab, &a.model)?;
    let f = formula(&sig, &tab, &a.formula)?;
    let sort = f.sort().clone();
    if a.all_worlds {
        let valid = m.valid(&f)?;
        o.record(
            format!("{}: {}", if valid { "valid" } else { "not valid" }, print_formula(&f)),
            json!({"command": "mc", "sort": sort.name(), "valid": valid}),
        )?;
        return Ok(if valid { 0 } else { 1 });
    }
    let worlds: Vec<usize> = match &a.world {
        Some(id) => vec![m.find_world(&sort, id).ok_or_else(|| Fatal(format!("no world '{id}' of sort {sort}")))?],
        None => (0..m.size(&sort)).collect(),
    };
    let mut all = true;
    for w in worlds {
        let holds = m.satisfies(&g, w, &f)?;
        all &= holds;
        let id = m.world_id(&sort, w).unwrap_or("?");
        o.record(format!("{id}: {holds}"), json!({"command": "mc", "world": id, "sort": sort.name(), "holds": holds}))?;
    }
    Ok(if all { 0 } else { 1 })
}

fn prove(a: ProveArgs, o: &mut Out) -> Result<i32, Fatal> {
    let system = SystemId::parse(&a.system).ok_or_else(|| Fatal(format!("unknown system '{}'", a.system)))?;
    let (sig, tab) = load_sig(&a.sig)?;
    let theory: Option<Box<dyn Theory>> = match a.theory.as_deref() {
        None => None,
        Some("smc") => Some(Box::new(SmcTheory::over(&sig, &tab).map_err(Fatal)?)),
        Some(other) => return Err(Fatal(format!("unknown theory '{other}'"))),
    };
    let hyps = a
        .hyp
        .iter()
        .enumerate()
        .map(|(i, h)| Ok((format!("h{}", i + 1), formula(&sig, &tab, h)?)))
        .collect::<Result<Vec<_>, Fatal>>()?;
    let proof = parse_prf(&sig, &tab, &read(&a.proof)?).map_err(|e| Fatal(format!("{}: {e}", a.proof.display())))?;
    let checker = Checker { sig: &sig, tab: &tab, system, theory: theory.as_deref(), hyps: &hyps };
    match checker.check(&proof) {
        Ok(c) => {
            let last = proof.last().map(|l| print_formula(&l.formula)).unwrap_or_default();
            let dependent = c.lines.last().is_some_and(|(_, d)| *d);
            o.record(
                format!("ok: {} lines in {system}; last line: {last}", proof.len()),
                json!({"command": "prove", "ok": true, "system": system.name(), "lines": proof.len(), "conclusion": last, "hyp_dependent": dependent}),
            )?;
            Ok(0)
        }
        Err(f) => {
            o.record(
                format!("fail: {f}"),
                json!({"command": "prove", "ok": false, "system": system.name(), "line": f.line, "reason": f.reason, "detail": f.detail}),
            )?;
            Ok(1)
        }
    }
}

fn translate(a: TranslateArgs, o: &mut Out) -> Result<i32, Fatal> {
    let (sig, tab) = load_sig(&a.sig)?;
    let f = formula(&sig, &tab, &a.formula)?;
    let pivot = a.pivot.unwrap_or_else(|| default_pivot(&f));
    let text = export_fo(&translate_at(&f, &pivot)?);
    if let Some(path) = &a.out {
        std::fs::write(path, format!("{text}\n")).map_err(|e| Fatal(format!("cannot write {}: {e}", path.display())))?;
        return Ok(0);
    }
    o.record(&text, json!({"command": "translate", "pivot": pivot, "sort": f.sort().name(), "fo": text}))?;
    Ok(0)
}

fn correspond(a: CorrespondArgs, o: &mut Out) -> Result<i32, Fatal> {
    let (sig, tab) = load_sig(&a.sig)?;
    let (m, _) = load_model(&sig, &tab, &a.model)?;
    let f = formula(&sig, &tab, &a.formula)?;
    let n = m.size(f.sort());
    if n == 0 {
        return Err(Fatal(format!("the model has no worlds of sort {}", f.sort())));
    }
    let mut r = rng(a.seed);
    let mut agree = 0;
    for trial in 0..a.trials {
        let w = r.gen_range(0..n);
        let g = random_assignment(&m, &tab, &mut r);
        let (modal, fo) = correspondence_sides(&m, &g, w, &f)?;
        if modal == fo {
            agree += 1;
            continue;
        }
        let id = m.world_id(f.sort(), w).unwrap_or("?");
        o.record(
            format!("trial {trial}: disagreement at {id}: modal {modal}, first-order {fo}"),
            json!({"command": "correspond", "trial": trial, "world": id, "modal": modal, "first_order": fo}),
        )?;
    }
    o.record(
        format!("{agree}/{} trials agree", a.trials),
        json!({"command": "correspond", "trials": a.trials, "agree": agree, "disagree": a.trials - agree}),
    )?;
    Ok(if agree == a.trials { 0 } else { 1 })
}

fn soundness(a: SoundnessArgs, o: &mut Out) -> Result<i32, Fatal> {
    let mut targets = Vec::new();
    let system = match &a.system {
        Some(name) => {
            let s = SystemId::parse(name).ok_or_else(|| Fatal(format!("unknown system '{name}'")))?;
            targets.extend(s.schemes().iter().map(|id| SweepTarget::Scheme(*id)));
            Some(s)
        }
        None => None,
    };
    for t in &a.target {
        targets.push(SweepTarget::parse(t).ok_or_else(|| Fatal(format!("unknown sweep target '{t}'")))?);
    }
    if !(0.0..=1.0).contains(&a.density) {
        return Err(Fatal("--density must lie in [0, 1]".into()));
    }
    let cfg = SweepConfig { trials: a.trials, seed: a.seed, bounds: SizeBounds::uniform(a.size), depth: a.depth, density: a.density };
    let mut found = 0;
    for t in targets {
        let rep = soundness_sweep(t, &cfg);
        found += rep.counterexamples.len();
        let first = rep.counterexamples.first();
        let text = format!(
            "{:<14} trials={} evaluations={} counterexamples={}{}",
            t.name(),
            rep.trials,
            rep.evaluations,
            rep.counterexamples.len(),
            first.map_or(String::new(), |c| format!(" first: trial {} {}", c.trial, print_formula(&c.instance)))
        );
        o.record(
            text,
            json!({
                "command": "soundness",
                "system": system.map(|s| s.name()),
                "target": t.name(),
                "trials": rep.trials,
                "seed": a.seed,
                "evaluations": rep.evaluations,
                "counterexamples": rep.counterexamples.len(),
                "first_counterexample": first.map(|c| json!({"trial": c.trial, "instance": print_formula(&c.instance), "world": c.world})),
            }),
        )?;
    }
    Ok(if found == 0 { 0 } else { 1 })
}

fn smc_run(a: SmcRunArgs, o: &mut Out) -> Result<i32, Fatal> {
    let text = read(&a.program)?;
    let stmt = smc::parse_program(&text).map_err(|e| Fatal(format!("{}: {e}", a.program.display())))?;
    let memory = Memory::parse(&a.mem).map_err(|e| Fatal(format!("--mem: {e}")))?;
    let mut m = Machine::new(ConcreteConfig::new(vec![], memory), smc::Ctrl::Stmt(stmt), a.fuel);
    match m.run() {
        Ok(()) => {
            let c = &m.config;
            let stack: Vec<String> = c.stack.iter().map(|v| v.to_string()).collect();
            let mem: serde_json::Map<String, Json> = c.memory.iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
            o.record(
                format!("{c}\nsteps: {}", m.steps()),
                json!({"command": "smc run", "ok": true, "stack": stack, "memory": mem, "steps": m.steps()}),
            )?;
            Ok(0)
        }
        Err(e) => {
            let kind = if matches!(e, RunError::OutOfFuel(_)) { "out_of_fuel" } else { "stuck" };
            o.record(format!("{kind}: {e}"), json!({"command": "smc run", "ok": false, "error": kind, "detail": e.to_string()}))?;
            Ok(1)
        }
    }
}

fn smc_verify(a: SmcVerifyArgs, o: &mut Out) -> Result<i32, Fatal> {
    let entry = smc::pprime_entry();
    if let Some(path) = &a.write {
        let text = crate::proof::write_prf(&entry.proof);
        std::fs::write(path, text).map_err(|e| Fatal(format!("cannot write {}: {e}", path.display())))?;
    }
    let result = entry.check();
    let failed_at = result.as_ref().err().map(|f| f.line);
    for line in &entry.proof {
        if failed_at.is_some_and(|n| line.index >= n) {
            break;
        }
        let just = write_just(&line.just);
        let short = just.split(" {").next().unwrap_or(&just);
        let note = line.note.as_deref().unwrap_or("");
        o.record(
            format!("{:>4} ok {note:<5} {short}", line.index),
            json!({"command": "smc verify", "line": line.index, "ok": true, "note": line.note, "just": short}),
        )?;
    }
    match result {
        Ok(_) => {
            let ok = entry.proof.last().is_some_and(|l| l.formula == entry.conclusion);
            o.record(
                format!("P′ {}: {} lines, conclusion {}", if ok { "accepted" } else { "rejected" }, entry.proof.len(), print_formula(&entry.conclusion)),
                json!({"command": "smc verify", "accepted": ok, "lines": entry.proof.len(), "conclusion": print_formula(&entry.conclusion)}),
            )?;
            Ok(if ok { 0 } else { 1 })
        }
        Err(f) => {
            o.record(
                format!("{:>4} FAIL {}: {}", f.line, f.reason, f.detail),
                json!({"command": "smc verify", "line": f.line, "ok": false, "reason": f.reason, "detail": f.detail}),
            )?;
            o.record("P′ rejected", json!({"command": "smc verify", "accepted": false, "lines": entry.proof.len()}))?;
            Ok(1)
        }
    }
}
