//! The command line, driven in-process through `hml::cli::run`.

use std::path::PathBuf;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name).display().to_string()
}

struct Run {
    code: i32,
    out: String,
    err: String,
}

fn hml(args: &[&str]) -> Run {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = hml::cli::run(std::iter::once("hml").chain(args.iter().copied()), &mut out, &mut err);
    Run { code, out: String::from_utf8(out).unwrap(), err: String::from_utf8(err).unwrap() }
}

#[test]
fn ref_instance_is_valid_on_the_demo_model() {
    let r = hml(&["mc", "--sig", &data("k.sig"), "--model", &data("m.mdl"), "--formula", "(@ j s j)", "--all-worlds"]);
    assert_eq!(r.code, 0, "{}{}", r.out, r.err);
    assert!(r.out.starts_with("valid"));
}

#[test]
fn mc_reports_each_world_and_fails_on_a_false_one() {
    let r = hml(&["mc", "--sig", &data("k.sig"), "--model", &data("m.mdl"), "--formula", "p"]);
    assert_eq!(r.code, 1);
    assert_eq!(r.out, "s0: false\ns1: true\n");
    let r = hml(&["mc", "--sig", &data("k.sig"), "--model", &data("m.mdl"), "--formula", "p", "--world", "s1"]);
    assert_eq!((r.code, r.out.as_str()), (0, "s1: true\n"));
    // x is assigned t2 in the model file, and q holds there
    let r = hml(&["mc", "--sig", &data("k.sig"), "--model", &data("m.mdl"), "--formula", "(@ x t q)", "--world", "t0"]);
    assert_eq!(r.code, 0, "{}", r.err);
    let r = hml(&["mc", "--sig", &data("k.sig"), "--model", &data("m.mdl"), "--formula", "(@ x t q)", "--all-worlds"]);
    assert_eq!(r.code, 1, "t0 falsifies q, so some assignment of x does too");
}

#[test]
fn library_proofs_replay_from_files() {
    for file in ["nomz.prf", "sym.prf", "bridge.prf"] {
        let r = hml(&["prove", "--system", "H_AT", "--sig", &data("k.sig"), "--proof", &data(file)]);
        assert_eq!(r.code, 0, "{file}: {}{}", r.out, r.err);
        assert!(r.out.starts_with("ok: "));
    }
    // Nom_z uses the @ axioms, which K_SIGMA lacks
    let r = hml(&["prove", "--system", "K_SIGMA", "--sig", &data("k.sig"), "--proof", &data("nomz.prf")]);
    assert_eq!(r.code, 1);
    assert!(r.out.starts_with("fail: line 1"), "{}", r.out);
}

#[test]
fn pprime_file_replays_under_the_smc_theory() {
    let hyps = hml::smc::pprime::pprime_hyps(&hml::smc::pprime::Parts::new());
    let printed: Vec<String> = hyps.iter().map(|(_, f)| hml::syntax::print_formula(f)).collect();
    let mut args = vec!["prove", "--system", "H_AT", "--theory", "smc"];
    let (sig, proof) = (data("smc.sig"), data("pprime.prf"));
    args.extend(["--sig", &sig, "--proof", &proof]);
    for h in &printed {
        args.extend(["--hyp", h.as_str()]);
    }
    let r = hml(&args);
    assert_eq!(r.code, 0, "{}{}", r.out, r.err);
    // without the theory the first theory axiom is rejected
    let r = hml(&args.iter().copied().filter(|a| *a != "--theory" && *a != "smc").collect::<Vec<_>>());
    assert_eq!(r.code, 1);
    assert!(r.out.contains("THEORY"), "{}", r.out);
}

#[test]
fn bit_exact_translation() {
    let r = hml(&["translate", "--sig", &data("k.sig"), "--formula", "(@ j t j)"]);
    assert_eq!((r.code, r.out.as_str()), (0, "(= c_j c_j)\n"), "{}", r.err);
    let dir = std::env::temp_dir().join(format!("hml-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("st.fo");
    let r = hml(&["translate", "--sig", &data("k.sig"), "--formula", "p", "--pivot", "w", "--out", out.to_str().unwrap()]);
    assert_eq!((r.code, r.out.as_str()), (0, ""));
    assert_eq!(std::fs::read_to_string(&out).unwrap(), "(pred P_p w)\n");
}

#[test]
fn correspondence_agrees() {
    let r = hml(&[
        "correspond", "--sig", &data("k.sig"), "--model", &data("m.mdl"),
        "--formula", "(forall x (-> (op f x) (@ x t (op f q))))", "--trials", "200", "--seed", "3",
    ]);
    assert_eq!(r.code, 0, "{}{}", r.out, r.err);
    assert_eq!(r.out, "200/200 trials agree\n");
}

#[test]
fn soundness_report_is_deterministic_and_clean() {
    let args = ["soundness", "--system", "H_AT_FORALL", "--trials", "1000", "--seed", "7"];
    let a = hml(&args);
    assert_eq!(a.code, 0, "{}", a.out);
    let schemes = hml::proof::SystemId::H_AT_FORALL.schemes();
    assert_eq!(a.out.lines().count(), schemes.len());
    assert!(a.out.lines().all(|l| l.contains("counterexamples=0")));
    assert_eq!(hml(&args).out, a.out);
    let b = hml(&["soundness", "--target", "BROKEN_AT_ELIM", "--trials", "1000"]);
    assert_eq!(b.code, 1);
}

#[test]
fn json_lines_are_self_contained_records() {
    let r = hml(&["--format", "json", "soundness", "--system", "K_SIGMA", "--trials", "20"]);
    for line in r.out.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["command"], "soundness");
        assert_eq!(v["counterexamples"], 0);
    }
    let r = hml(&["--format", "json", "smc", "verify", "--pprime"]);
    assert_eq!(r.code, 0);
    let last: serde_json::Value = serde_json::from_str(r.out.lines().last().unwrap()).unwrap();
    assert_eq!(last["accepted"], true);
    let r = hml(&["--format", "json", "--version"]);
    let v: serde_json::Value = serde_json::from_str(r.out.trim()).unwrap();
    assert_eq!(v["figures"].as_array().unwrap().len(), 4);
}

#[test]
fn smc_subcommands() {
    let r = hml(&["smc", "run", "--program", &data("pgm.imp"), "--mem", "m=7"]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert!(r.out.contains("memory: i1=1,i2=2,m=1"), "{}", r.out);
    let r = hml(&["smc", "run", "--program", &data("sum.imp"), "--mem", "n=9"]);
    assert!(r.out.contains("s=45"), "{}", r.out);
    let r = hml(&["smc", "run", "--program", &data("sum.imp"), "--mem", "n=9", "--fuel", "10"]);
    assert_eq!(r.code, 1);
    assert!(r.out.starts_with("out_of_fuel"));
    let r = hml(&["smc", "verify", "--pprime"]);
    assert_eq!(r.code, 0);
    assert!(r.out.lines().last().unwrap().starts_with("P′ accepted"));
    let r = hml(&["smc", "sig"]);
    assert_eq!(r.out, std::fs::read_to_string(data("smc.sig")).unwrap());
}

#[test]
fn check_reports_sorts_and_errors() {
    let r = hml(&["check", "--sig", &data("k.sig"), "--formula", "(op sigma p q)", "--sort", "s", "--model", &data("m.mdl")]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert!(r.out.contains("well-sorted: (op sigma p q) : s"), "{}", r.out);
    let r = hml(&["check", "--sig", &data("k.sig"), "--formula", "(op sigma q p)"]);
    assert_eq!(r.code, 1);
    let r = hml(&["check", "--sig", &data("k.sig"), "--formula", "(op sigma p"]);
    assert_eq!(r.code, 2);
}

#[test]
fn usage_and_io_errors_exit_two() {
    let r = hml(&["mc", "--sig", &data("k.sig")]);
    assert_eq!(r.code, 2);
    assert!(r.err.contains("Usage"), "{}", r.err);
    let r = hml(&["prove", "--system", "H_NOPE", "--sig", &data("k.sig"), "--proof", &data("nomz.prf")]);
    assert_eq!(r.code, 2);
    let r = hml(&["check", "--sig", "/nonexistent.sig"]);
    assert_eq!(r.code, 2);
    assert!(r.err.starts_with("error: cannot read"));
    assert!(r.out.is_empty());
}
