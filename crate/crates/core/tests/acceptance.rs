//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines always reach stdout. The
//! process fails if any criterion fails, except the literal form of
//! criterion 10, which is reported but known not to hold (see the README).

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::Rng;

use hml::context::Context;
use hml::formula::Formula;
use hml::proof::library::library;
use hml::proof::{Justification, SchemeId, SystemId, Theory};
use hml::semantics::random::{random_assignment, random_model_with, rng, Features, FormulaGen, SizeBounds, DENSITY};
use hml::semantics::sweep::{soundness_sweep, sweep_signature, SweepConfig, SweepTarget};
use hml::semantics::{generated_submodel, parse_mdl, Assignment, Model, World};
use hml::signature::{parse_sig, Sort};
use hml::smc::{
    concretize, decode_ctrl, parse_program, run_program, smc_run, ConcreteConfig, Encoder, Memory, SmcTheory, Value,
    DEFAULT_FUEL, DEFAULT_VARS, PGM,
};
use hml::syntax::{print_context, print_formula};
use hml::translation::{correspondence_sides, export_fo, global_sides, translate_at};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 10] = [
        ("axiom soundness sweep", c1_scheme_sweep),
        ("negative control", c2_negative_control),
        ("lemma replays", c3_lemma_replays),
        ("local correspondence", c4_local_correspondence),
        ("global correspondence", c5_global_correspondence),
        ("bit-exact translation", c6_bit_exact),
        ("SMC oracle on pgm", c7_pgm_oracle),
        ("P′ replay and mutations", c8_pprime),
        ("per-axiom SMC oracle", c9_axiom_oracle),
        ("context and generated submodel", c10_contexts),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = run();
        let tag = if v.pass { "PASS" } else { "FAIL" };
        println!("{tag} {:>2} {name}: {} [{:.2?}]", i + 1, v.detail, start.elapsed());
        if !v.pass {
            failed.push(i + 1);
        }
    }
    // the corrected form of 10 is required and enforced inside c10
    failed.retain(|&n| n != 10 || !LITERAL_10_EXPECTED_TO_FAIL);
    if !failed.is_empty() {
        eprintln!("acceptance: criteria {failed:?} failed");
        std::process::exit(1);
    }
}

fn all_schemes() -> Vec<SchemeId> {
    let mut ids: Vec<SchemeId> = Vec::new();
    for s in SystemId::ALL {
        for id in s.schemes() {
            if !ids.contains(id) {
                ids.push(*id);
            }
        }
    }
    ids
}

fn sweep(target: SweepTarget, trials: usize) -> (usize, u64) {
    let cfg = SweepConfig { trials, seed: 0, bounds: SizeBounds::uniform(4), depth: 3, density: DENSITY };
    let r = soundness_sweep(target, &cfg);
    (r.counterexamples.len(), r.evaluations)
}

fn c1_scheme_sweep() -> Verdict {
    let start = Instant::now();
    let mut dirty = Vec::new();
    let mut evaluations = 0;
    let ids = all_schemes();
    for id in &ids {
        let (n, e) = sweep(SweepTarget::Scheme(*id), 1000);
        evaluations += e;
        if n > 0 {
            dirty.push(format!("{}:{n}", id.name()));
        }
    }
    let took = start.elapsed();
    let fast = took < Duration::from_secs(120);
    verdict(
        dirty.is_empty() && fast,
        format!(
            "{} schemes x 1000 trials, {evaluations} evaluations, counterexamples {dirty:?}, {:.1}s (< 120s)",
            ids.len(),
            took.as_secs_f64()
        ),
    )
}

fn c2_negative_control() -> Verdict {
    let (n, _) = sweep(SweepTarget::BrokenAtElim, 1000);
    // two worlds, z names the one where p holds
    let (sig, tab) = parse_sig("sort s\nprop p : s\nnom z : s\n").unwrap();
    let (m, g) = parse_mdl(&sig, &tab, "world s w0\nworld s w1\nval p w1\nnomval z w1\n").unwrap();
    let f = hml::syntax::parse_formula(&sig, &tab, "(-> (@ z s p) p)").unwrap();
    let at_w0 = m.satisfies(&g, 0, &f).unwrap();
    let at_w1 = m.satisfies(&g, 1, &f).unwrap();
    verdict(
        n > 0 && !at_w0 && at_w1,
        format!("sweep found {n} counterexamples in 1000 trials; hand model: false at w0, true at w1 = {}", !at_w0 && at_w1),
    )
}

fn c3_lemma_replays() -> Verdict {
    let lib = library();
    let mut parts = Vec::new();
    let mut ok = true;
    for (name, target, paper_lines) in
        [("NOM_Z", SweepTarget::NomZ, Some(8)), ("BRIDGE", SweepTarget::Bridge, Some(10)), ("SYM", SweepTarget::Sym, None)]
    {
        let e = &lib[name];
        let accepted = e.check().is_ok() && e.proof.last().map(|l| &l.formula) == Some(&e.conclusion);
        let notes = e.proof.iter().filter(|l| l.note.is_some()).count();
        let notes_ok = paper_lines.is_none_or(|n| notes == n);
        let (cex, _) = sweep(target, 1000);
        ok &= accepted && notes_ok && cex == 0;
        parts.push(format!("{name}: accepted={accepted} numbered={notes} counterexamples={cex}"));
    }
    verdict(ok, parts.join("; "))
}

fn closed(f: Formula) -> Formula {
    f.free_state_vars().into_iter().fold(f, |acc, x| Formula::forall(x, acc))
}

fn c4_local_correspondence() -> Verdict {
    let (sig, tab) = sweep_signature();
    let gen = FormulaGen::new(&sig, &tab, Features::FULL);
    let bounds = SizeBounds::uniform(4);
    let mut r = rng(4);
    let start = Instant::now();
    let (mut agree, mut bad) = (0, Vec::new());
    for case in 0..10_000 {
        let m = random_model_with(&sig, &tab, &bounds, DENSITY, &mut r);
        let sort = sig.sorts().choose(&mut r).unwrap().clone();
        let f = gen.formula(&sort, 4, &mut r);
        let w = r.gen_range(0..m.size(&sort));
        let g = random_assignment(&m, &tab, &mut r);
        match correspondence_sides(&m, &g, w, &f) {
            Ok((a, b)) if a == b => agree += 1,
            other => bad.push(format!("case {case}: {} -> {other:?}", print_formula(&f))),
        }
    }
    let took = start.elapsed();
    verdict(
        bad.is_empty() && took < Duration::from_secs(60),
        format!("{agree}/10000 agree, {:.1}s (< 60s){}", took.as_secs_f64(), bad.first().map_or(String::new(), |b| format!("; {b}"))),
    )
}

fn c5_global_correspondence() -> Verdict {
    let (sig, tab) = sweep_signature();
    let gen = FormulaGen::new(&sig, &tab, Features::FULL);
    let bounds = SizeBounds::uniform(4);
    let mut r = rng(5);
    let (mut agree, mut valid, mut bad) = (0, 0, Vec::new());
    for case in 0..500 {
        let m = random_model_with(&sig, &tab, &bounds, DENSITY, &mut r);
        let sort = sig.sorts().choose(&mut r).unwrap().clone();
        let f = closed(gen.formula(&sort, 3, &mut r));
        match global_sides(&m, &f) {
            Ok((a, b)) if a == b => {
                agree += 1;
                valid += a as usize;
            }
            other => bad.push(format!("case {case}: {} -> {other:?}", print_formula(&f))),
        }
    }
    verdict(bad.is_empty(), format!("{agree}/500 agree ({valid} valid){}", bad.first().map_or(String::new(), |b| format!("; {b}"))))
}

fn c6_bit_exact() -> Verdict {
    let (sig, tab) = parse_sig("sort s\nnom j : s\n").unwrap();
    let f = hml::syntax::parse_formula(&sig, &tab, "(@ j s j)").unwrap();
    let text = export_fo(&translate_at(&f, "x").unwrap());
    verdict(text == "(= c_j c_j)", format!("exportFO(ST_x(@_j j)) = {text}"))
}

fn random_value(r: &mut impl Rng) -> Value {
    if r.gen_bool(0.7) {
        Value::Nat(r.gen_range(0..=31))
    } else {
        Value::Bool(r.gen())
    }
}

fn random_config(r: &mut impl Rng) -> ConcreteConfig {
    let stack = (0..r.gen_range(0..5)).map(|_| random_value(r)).collect();
    let mut memory = Memory::new();
    for x in DEFAULT_VARS {
        if r.gen_bool(0.5) {
            memory.set(x, r.gen_range(0..=31));
        }
    }
    ConcreteConfig::new(stack, memory)
}

fn c7_pgm_oracle() -> Verdict {
    let pgm = parse_program(PGM).unwrap();
    let mut r = rng(7);
    let (mut ok, mut slowest) = (0, Duration::ZERO);
    for _ in 0..100 {
        let start = random_config(&mut r);
        let t = Instant::now();
        let end = run_program(&pgm, start.clone(), DEFAULT_FUEL);
        slowest = slowest.max(t.elapsed());
        if let Ok(end) = end {
            ok += (end.memory.get("m") == 1 && end.stack == start.stack) as usize;
        }
    }
    verdict(
        ok == 100 && slowest < Duration::from_millis(1),
        format!("{ok}/100 runs end with m = 1 and the stack unchanged; slowest run {slowest:.2?} (< 1ms)"),
    )
}

/// A different justification for line `k` of `lines` that should not check.
fn mutate(lines: &[hml::proof::ProofLine], k: usize, hyps: &[(String, Formula)]) -> Justification {
    let line = &lines[k];
    let other_hyp = |name: &str| hyps.iter().map(|(n, _)| n.clone()).find(|n| n != name).unwrap();
    match &line.just {
        Justification::Hyp(h) => Justification::Hyp(other_hyp(h)),
        Justification::Axiom(_) | Justification::TheoryAxiom { .. } => {
            let h = hyps.iter().find(|(_, f)| *f != line.formula).unwrap();
            Justification::Hyp(h.0.clone())
        }
        Justification::Mp(i, j) => Justification::Mp(*j, *i),
        j => {
            // point the rule at the previous line instead of its premise
            let p = j.premises()[0];
            let q = if p > 1 { p - 1 } else { p + 1 };
            let mut j = j.clone();
            match &mut j {
                Justification::Ug { premise, .. }
                | Justification::Gen { premise, .. }
                | Justification::GenAt { premise, .. }
                | Justification::Broadcast { premise, .. }
                | Justification::Paste0 { premise, .. }
                | Justification::Paste1 { premise, .. } => *premise = q,
                _ => unreachable!(),
            }
            j
        }
    }
}

fn c8_pprime() -> Verdict {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = hml::cli::run(["hml", "smc", "verify", "--pprime"], &mut out, &mut err);
    let entry = hml::smc::pprime_entry();
    let accepted = code == 0 && entry.check().is_ok();
    let mut rejected_at_line = 0;
    let mut escapes = Vec::new();
    for k in 0..entry.proof.len() {
        let mut proof = entry.proof.clone();
        proof[k].just = mutate(&entry.proof, k, &entry.hyps);
        let mutant = hml::proof::library::LibraryEntry { proof, theory: Some(Box::new(SmcTheory::new())), ..hml::smc::pprime_entry() };
        match mutant.check() {
            Err(f) if f.line == entry.proof[k].index => rejected_at_line += 1,
            other => escapes.push(format!("line {}: {:?}", entry.proof[k].index, other.map(|_| "accepted"))),
        }
    }
    let n = entry.proof.len();
    verdict(
        accepted && escapes.is_empty(),
        format!(
            "smc verify --pprime exit {code}, {n} primitive lines; {rejected_at_line}/{n} single-line mutations rejected at that line{}",
            escapes.first().map_or(String::new(), |e| format!("; first escape {e}"))
        ),
    )
}

fn c9_axiom_oracle() -> Verdict {
    let th = SmcTheory::new();
    let (sig, _) = th.signature();
    let e = Encoder::new(&sig);
    let mut r = rng(9);
    let mut report = Vec::new();
    let mut all = true;
    for name in ["AINT", "AID", "APLUS", "ALEQ", "AASGN", "ASKIP", "A_TEST"] {
        let mut ok = 0;
        for _ in 0..50 {
            let base = random_config(&mut r);
            // vs and mem are either the abstract symbols or ground terms
            let vs = if r.gen() {
                Formula::prop("vs", Sort::new("ValStack"))
            } else {
                e.stack(&random_config(&mut r).stack).unwrap()
            };
            let mem = if r.gen() {
                Formula::prop("mem", Sort::new("Mem"))
            } else {
                e.memory(&random_config(&mut r).memory).unwrap()
            };
            let n = |r: &mut rand_chacha::ChaCha8Rng, hi: u64| e.numeral(r.gen_range(0..=hi)).unwrap();
            let x = e.var(DEFAULT_VARS.choose(&mut r).unwrap()).unwrap();
            let mut p: BTreeMap<String, Formula> = BTreeMap::new();
            let mut put = |k: &str, f: Formula| {
                p.insert(k.into(), f);
            };
            match name {
                "AINT" => {
                    put("n", n(&mut r, 31));
                    put("vs", vs);
                    put("mem", mem);
                }
                "AID" | "AASGN" => {
                    put("n", n(&mut r, 31));
                    put("x", x);
                    put("vs", vs);
                    put("mem", mem);
                }
                "APLUS" => {
                    put("n1", n(&mut r, 15));
                    put("n2", n(&mut r, 16));
                    put("vs", vs);
                    put("mem", mem);
                }
                "ALEQ" => {
                    put("n1", n(&mut r, 31));
                    put("n2", n(&mut r, 31));
                    put("vs", vs);
                    put("mem", mem);
                }
                "ASKIP" => put("gamma", e.app("config", vec![vs, mem])),
                _ => {
                    put("v", e.value(random_value(&mut r)).unwrap());
                    put("vs", vs);
                    put("mem", mem);
                }
            }
            let ax = th.axiom(name, &p).unwrap();
            let (pre, post) = ax.as_implies().unwrap();
            let (_, args) = post.as_box().unwrap();
            let outcome = (|| {
                let start = concretize(pre, &base).ok()?;
                let ctrl = decode_ctrl(args[0]).ok()?;
                let end = smc_run(start, &ctrl, DEFAULT_FUEL).ok()?;
                Some(end == concretize(args[1], &base).ok()?)
            })();
            ok += (outcome == Some(true)) as usize;
        }
        all &= ok == 50;
        report.push(format!("{name} {ok}/50"));
    }
    verdict(all, report.join(", "))
}

/// The literal claim: `η(φ)` at `w` iff `φ` holds somewhere in the submodel
/// generated by `{w}`. It fails (a context demands a specific path, the
/// generated submodel offers every reachable world), so this flag keeps it
/// out of the exit status; the corrected check below is enforced.
const LITERAL_10_EXPECTED_TO_FAIL: bool = true;

/// Worlds reachable from `w` along the hole's path with every filler
/// satisfied: `η(φ)` holds at `w` iff `φ` holds at one of them.
fn spine(m: &Model, eta: &Context, w: World) -> BTreeSet<World> {
    match eta {
        Context::Hole(_) => BTreeSet::from([w]),
        Context::Top(_) => BTreeSet::new(),
        Context::Op { op, args, .. } => {
            let h = args.iter().position(|a| a.hole_count() == 1).unwrap();
            let mut out = BTreeSet::new();
            for t in m.relation(op).unwrap().from(w) {
                if args.iter().zip(t).enumerate().all(|(i, (a, u))| i == h || filler_holds(m, a, *u)) {
                    out.extend(spine(m, &args[h], t[h]));
                }
            }
            out
        }
    }
}

fn filler_holds(m: &Model, c: &Context, w: World) -> bool {
    match c {
        Context::Hole(_) => unreachable!("fillers have no hole"),
        Context::Top(_) => true,
        Context::Op { op, args, .. } => {
            m.relation(op).unwrap().from(w).iter().any(|t| args.iter().zip(t).all(|(a, u)| filler_holds(m, a, *u)))
        }
    }
}

fn c10_contexts() -> Verdict {
    let (sig, tab) = sweep_signature();
    let gen = FormulaGen::new(&sig, &tab, Features::FULL);
    let bounds = SizeBounds::uniform(4);
    let mut r = rng(10);
    let (mut literal, mut corrected) = (0, 0);
    let mut first_miss: Option<String> = None;
    for _ in 0..500 {
        let m = random_model_with(&sig, &tab, &bounds, DENSITY, &mut r);
        let g: Assignment = random_assignment(&m, &tab, &mut r);
        let sort = sig.sorts().choose(&mut r).unwrap().clone();
        let eta = gen.nominal_context(&sort, 3, &mut r);
        let hole = eta.hole_sort().unwrap().clone();
        let phi = gen.formula(&hole, 3, &mut r);
        let w = r.gen_range(0..m.size(&sort));
        let diamond = m.satisfies(&g, w, &eta.apply(&phi).unwrap()).unwrap();
        let boxed = m.satisfies(&g, w, &eta.apply_dual(&phi).unwrap()).unwrap();
        let holds = |u: World| m.satisfies(&g, u, &phi).unwrap();

        let sub = generated_submodel(&m, &BTreeMap::from([(sort.clone(), BTreeSet::from([w]))]), &g);
        let reach: Vec<World> = sub.embed.get(&hole).map(|e| e.keys().copied().collect()).unwrap_or_default();
        let lit = diamond == reach.iter().any(|&u| holds(u)) && boxed == reach.iter().all(|&u| holds(u));
        literal += lit as usize;
        if !lit && first_miss.is_none() {
            first_miss = Some(format!("eta = {}, phi = {}", print_context(&eta), print_formula(&phi)));
        }

        let path = spine(&m, &eta, w);
        corrected += (diamond == path.iter().any(|&u| holds(u)) && boxed == path.iter().all(|&u| holds(u))) as usize;
    }
    let detail = format!(
        "literal (generated submodel) {literal}/500{}; corrected (hole path) {corrected}/500",
        first_miss.map_or(String::new(), |m| format!(", first miss: {m}"))
    );
    if corrected != 500 {
        eprintln!("criterion 10: the corrected check failed");
        std::process::exit(1);
    }
    verdict(literal == 500, detail)
}
