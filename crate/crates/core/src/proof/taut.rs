//! Propositional tautology recognition by truth table.

use std::collections::BTreeMap;

use crate::formula::Formula;

pub const MAX_LETTERS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{0} propositional letters exceed the limit of {MAX_LETTERS}")]
pub struct TautError(pub usize);

/// Maximal non-Boolean subformulas, each abstracted to one letter. `⊤` is a
/// constant, not a letter.
pub fn letters(f: &Formula) -> Vec<&Formula> {
    fn go<'a>(f: &'a Formula, out: &mut BTreeMap<&'a Formula, ()>) {
        match f {
            Formula::Top(_) => {}
            Formula::Not(a) => go(a, out),
            Formula::Or(a, b) => {
                go(a, out);
                go(b, out);
            }
            _ => {
                out.insert(f, ());
            }
        }
    }
    let mut out = BTreeMap::new();
    go(f, &mut out);
    out.into_keys().collect()
}

/// Bit-parallel truth table: one bit per valuation of the letters.
pub fn is_tautology(f: &Formula) -> Result<bool, TautError> {
    let ls = letters(f);
    let k = ls.len();
    if k > MAX_LETTERS {
        return Err(TautError(k));
    }
    let rows = 1usize << k;
    let words = rows.div_ceil(64);
    let index: BTreeMap<&Formula, usize> = ls.iter().enumerate().map(|(i, l)| (*l, i)).collect();
    const PATTERNS: [u64; 6] = [
        0xAAAA_AAAA_AAAA_AAAA,
        0xCCCC_CCCC_CCCC_CCCC,
        0xF0F0_F0F0_F0F0_F0F0,
        0xFF00_FF00_FF00_FF00,
        0xFFFF_0000_FFFF_0000,
        0xFFFF_FFFF_0000_0000,
    ];
    let table: Vec<Vec<u64>> = (0..k)
        .map(|i| {
            (0..words)
                .map(|w| if i < 6 { PATTERNS[i] } else if (w >> (i - 6)) & 1 == 1 { u64::MAX } else { 0 })
                .collect()
        })
        .collect();
    let letter = |i: usize| table[i].clone();
    fn eval(f: &Formula, index: &BTreeMap<&Formula, usize>, letter: &dyn Fn(usize) -> Vec<u64>, words: usize) -> Vec<u64> {
        match f {
            Formula::Top(_) => vec![u64::MAX; words],
            Formula::Not(a) => eval(a, index, letter, words).into_iter().map(|x| !x).collect(),
            Formula::Or(a, b) => {
                let x = eval(a, index, letter, words);
                let y = eval(b, index, letter, words);
                x.into_iter().zip(y).map(|(p, q)| p | q).collect()
            }
            _ => letter(index[f]),
        }
    }
    let v = eval(f, &index, &letter, words);
    let full_last = if rows % 64 == 0 { u64::MAX } else { (1u64 << (rows % 64)) - 1 };
    Ok(v.iter().enumerate().all(|(i, w)| {
        let mask = if i + 1 == words { full_last } else { u64::MAX };
        w & mask == mask
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::{parse_sig, Signature, SymbolTable};
    use crate::syntax::parse_formula;

    fn setup() -> (Signature, SymbolTable) {
        parse_sig("sort s\nsort t\nop f : s -> s\nprop p : s\nprop q : s\nnom z : t\nnom y : t\n").unwrap()
    }

    fn taut(t: &str) -> bool {
        let (sig, tab) = setup();
        is_tautology(&parse_formula(&sig, &tab, t).unwrap()).unwrap()
    }

    #[test]
    fn excluded_middle() {
        assert!(taut("(or p (not p))"));
        assert!(!taut("(or p q)"));
    }

    #[test]
    fn abstracted_atoms() {
        assert!(taut("(-> (@ z s y) (@ z s y))"));
        assert!(taut("(-> (and (@ y s z) (@ z s y)) (@ z s y))"));
        assert!(!taut("(-> (@ z s y) (@ y s z))"));
        assert!(taut("(-> (op f p) (or (op f p) q))"));
        assert!(!taut("(-> (op f p) (op f (or p q)))"));
    }

    #[test]
    fn printed_sym_step_four_is_not_a_tautology() {
        assert!(!taut("(-> (-> (@ z s y) (@ z s y)) (@ z s y))"));
    }

    #[test]
    fn top_is_constant() {
        assert!(taut("true:s"));
        assert!(taut("(not false:s)"));
        assert!(!taut("false:s"));
    }

    #[test]
    fn many_letters() {
        // ten distinct letters p, f(p), f(f(p)), ...
        let (sig, tab) = setup();
        let mut fs = Vec::new();
        for i in 0..10 {
            let mut f = parse_formula(&sig, &tab, "p").unwrap();
            for _ in 0..i {
                f = Formula::app(sig.op("f").unwrap(), vec![f]);
            }
            fs.push(f);
        }
        let conj = Formula::and_all(fs.clone());
        assert!(is_tautology(&Formula::implies(conj.clone(), fs[7].clone())).unwrap());
        assert!(!is_tautology(&Formula::implies(fs[7].clone(), conj)).unwrap());
    }

    #[test]
    fn too_many_letters() {
        let (sig, tab) = setup();
        let mut f = parse_formula(&sig, &tab, "p").unwrap();
        let mut acc = f.clone();
        for _ in 0..21 {
            f = Formula::app(sig.op("f").unwrap(), vec![f]);
            acc = Formula::or(acc, f.clone());
        }
        assert_eq!(is_tautology(&acc), Err(TautError(22)));
    }
}
