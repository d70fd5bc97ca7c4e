//! The files under `data/` that are generated from the library. Set
//! `HML_BLESS=1` to rewrite them after an intentional change.

use std::path::PathBuf;

use hml::proof::library::library;
use hml::proof::{parse_prf, write_prf};
use hml::signature::{parse_sig, write_sig};
use hml::smc::smc_signature;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn golden(name: &str, expected: &str) {
    let path = data(name);
    if std::env::var_os("HML_BLESS").is_some() {
        std::fs::write(&path, expected).unwrap();
        return;
    }
    let actual = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(actual, expected, "{name} is stale; rerun with HML_BLESS=1");
}

#[test]
fn generated_files_are_current() {
    let lib = library();
    for (file, entry) in [("nomz.prf", "NOM_Z"), ("sym.prf", "SYM"), ("bridge.prf", "BRIDGE"), ("pprime.prf", "P_PRIME")] {
        golden(file, &write_prf(&lib[entry].proof));
    }
    let (sig, tab) = smc_signature();
    golden("smc.sig", &write_sig(&sig, &tab));
}

#[test]
fn proof_files_parse_back_over_their_signatures() {
    let lib = library();
    let (k, ktab) = parse_sig(&std::fs::read_to_string(data("k.sig")).unwrap()).unwrap();
    for (file, entry) in [("nomz.prf", "NOM_Z"), ("sym.prf", "SYM"), ("bridge.prf", "BRIDGE")] {
        let text = std::fs::read_to_string(data(file)).unwrap();
        let e = &lib[entry];
        assert_eq!(parse_prf(&e.sig, &e.tab, &text).unwrap(), e.proof, "{file}");
        // k.sig extends the lemma signature, so the same file reads over it
        assert_eq!(parse_prf(&k, &ktab, &text).unwrap(), e.proof, "{file} over k.sig");
    }
    let text = std::fs::read_to_string(data("pprime.prf")).unwrap();
    let e = &lib["P_PRIME"];
    assert_eq!(parse_prf(&e.sig, &e.tab, &text).unwrap(), e.proof);
}
