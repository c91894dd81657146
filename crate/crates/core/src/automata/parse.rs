//! Line-based text format for automata.
//!
//! ```text
//! type: nfa | dfa | pdfa | transducer
//! alphabet: a b c            # order = linear order for lex
//! states: 5
//! initial: 0
//! finals: 1 3                # pdfa instead: colors: x=1,3 y=2
//! trans: 0 a 1               # transducer: trans: 0 a lrl 2
//! ```
//!
//! Unknown keys, out-of-range states and duplicate DFA transitions are
//! rejected. Transducers additionally use `output-alphabet:`; their output
//! words are tokenized greedily (longest match) against that alphabet.

use super::{Alphabet, Dfa, Nfa, PartitionedDfa, RationalTransducer, StateId, SymId};
use crate::error::{Error, Result};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone)]
pub enum ParsedAutomaton {
    Nfa(Nfa),
    Dfa(Dfa),
    Pdfa(PartitionedDfa),
    Transducer(RationalTransducer),
}

impl ParsedAutomaton {
    pub fn kind(&self) -> &'static str {
        match self {
            ParsedAutomaton::Nfa(_) => "nfa",
            ParsedAutomaton::Dfa(_) => "dfa",
            ParsedAutomaton::Pdfa(_) => "pdfa",
            ParsedAutomaton::Transducer(_) => "transducer",
        }
    }

    /// View as an NFA when the command accepts either presentation.
    pub fn as_nfa(&self) -> Result<Nfa> {
        match self {
            ParsedAutomaton::Nfa(a) => Ok(a.clone()),
            ParsedAutomaton::Dfa(d) => Ok(d.to_nfa()),
            _ => Err(Error::InvalidInput(format!("expected an nfa or dfa, got {}", self.kind()))),
        }
    }
}

fn err(line_no: usize, msg: impl Into<String>) -> Error {
    Error::Parse(format!("line {}: {}", line_no, msg.into()))
}

fn parse_state(tok: &str, states: usize, line_no: usize) -> Result<StateId> {
    let q: usize = tok
        .parse()
        .map_err(|_| err(line_no, format!("expected a state id, got `{tok}`")))?;
    if q >= states {
        return Err(err(line_no, format!("state {q} out of range (states: {states})")));
    }
    Ok(q)
}

fn check_user_alphabet(alphabet: &Alphabet, line_no: usize) -> Result<()> {
    if alphabet.symbols().any(|s| s == "$") {
        return Err(err(line_no, "`$` is reserved for internal use and not allowed in alphabets"));
    }
    Ok(())
}

/// Greedy longest-match tokenization of a concatenated output word.
fn tokenize_output(word: &str, alphabet: &Alphabet, line_no: usize) -> Result<Vec<SymId>> {
    let mut out = Vec::new();
    let mut rest = word;
    'outer: while !rest.is_empty() {
        let mut best: Option<(usize, SymId)> = None;
        for (i, sym) in alphabet.symbols().enumerate() {
            if rest.starts_with(sym) && best.map_or(true, |(len, _)| sym.len() > len) {
                best = Some((sym.len(), i));
            }
        }
        if let Some((len, id)) = best {
            out.push(id);
            rest = &rest[len..];
            continue 'outer;
        }
        return Err(err(line_no, format!("cannot tokenize output word `{word}` over the output alphabet")));
    }
    Ok(out)
}

pub fn parse_automaton(text: &str) -> Result<ParsedAutomaton> {
    let mut kind: Option<String> = None;
    let mut alphabet: Option<Alphabet> = None;
    let mut output_alphabet: Option<Alphabet> = None;
    let mut states: Option<usize> = None;
    let mut initial: Option<StateId> = None;
    let mut finals: Option<BTreeSet<StateId>> = None;
    let mut colors: Option<(Alphabet, BTreeMap<StateId, SymId>)> = None;
    let mut trans_lines: Vec<(usize, Vec<String>)> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once(':')
            .ok_or_else(|| err(line_no, format!("expected `key: value`, got `{line}`")))?;
        let key = key.trim();
        let value = value.trim();
        match key {
            "type" => {
                if kind.replace(value.to_string()).is_some() {
                    return Err(err(line_no, "duplicate `type`"));
                }
                if !matches!(value, "nfa" | "dfa" | "pdfa" | "transducer") {
                    return Err(err(line_no, format!("unknown automaton type `{value}`")));
                }
            }
            "alphabet" => {
                let a = Alphabet::new(value.split_whitespace())?;
                check_user_alphabet(&a, line_no)?;
                if alphabet.replace(a).is_some() {
                    return Err(err(line_no, "duplicate `alphabet`"));
                }
            }
            "output-alphabet" => {
                let a = Alphabet::new(value.split_whitespace())?;
                check_user_alphabet(&a, line_no)?;
                if output_alphabet.replace(a).is_some() {
                    return Err(err(line_no, "duplicate `output-alphabet`"));
                }
            }
            "states" => {
                let n: usize = value
                    .parse()
                    .map_err(|_| err(line_no, format!("expected a state count, got `{value}`")))?;
                if states.replace(n).is_some() {
                    return Err(err(line_no, "duplicate `states`"));
                }
            }
            "initial" => {
                let n = states.ok_or_else(|| err(line_no, "`initial` before `states`"))?;
                let q = parse_state(value, n, line_no)?;
                if initial.replace(q).is_some() {
                    return Err(err(line_no, "duplicate `initial`"));
                }
            }
            "finals" => {
                let n = states.ok_or_else(|| err(line_no, "`finals` before `states`"))?;
                let mut set = BTreeSet::new();
                for tok in value.split_whitespace() {
                    set.insert(parse_state(tok, n, line_no)?);
                }
                if finals.replace(set).is_some() {
                    return Err(err(line_no, "duplicate `finals`"));
                }
            }
            "colors" => {
                let n = states.ok_or_else(|| err(line_no, "`colors` before `states`"))?;
                let mut names: Vec<String> = Vec::new();
                let mut map: BTreeMap<StateId, SymId> = BTreeMap::new();
                for group in value.split_whitespace() {
                    let (name, list) = group
                        .split_once('=')
                        .ok_or_else(|| err(line_no, format!("expected `color=state,...`, got `{group}`")))?;
                    if name.is_empty() {
                        return Err(err(line_no, "empty color name"));
                    }
                    let id = match names.iter().position(|c| c == name) {
                        Some(id) => id,
                        None => {
                            names.push(name.to_string());
                            names.len() - 1
                        }
                    };
                    for tok in list.split(',').filter(|t| !t.is_empty()) {
                        let q = parse_state(tok, n, line_no)?;
                        if map.insert(q, id).is_some() {
                            return Err(err(line_no, format!("state {q} colored twice")));
                        }
                    }
                }
                let ca = Alphabet::new(names)?;
                check_user_alphabet(&ca, line_no)?;
                if colors.replace((ca, map)).is_some() {
                    return Err(err(line_no, "duplicate `colors`"));
                }
            }
            "trans" => {
                trans_lines.push((line_no, value.split_whitespace().map(str::to_string).collect()));
            }
            other => return Err(err(line_no, format!("unknown key `{other}`"))),
        }
    }

    let kind = kind.ok_or_else(|| Error::Parse("missing `type`".into()))?;
    let alphabet = alphabet.ok_or_else(|| Error::Parse("missing `alphabet`".into()))?;
    let states = states.ok_or_else(|| Error::Parse("missing `states`".into()))?;

    if kind == "transducer" {
        let out_alpha = output_alphabet.ok_or_else(|| Error::Parse("transducer requires `output-alphabet`".into()))?;
        let finals = finals.ok_or_else(|| Error::Parse("missing `finals`".into()))?;
        let mut transitions = Vec::new();
        for (line_no, toks) in trans_lines {
            if toks.len() != 4 {
                return Err(err(line_no, "transducer transition needs `src in out dst`"));
            }
            let p = parse_state(&toks[0], states, line_no)?;
            let a = alphabet
                .id_of(&toks[1])
                .ok_or_else(|| err(line_no, format!("unknown input symbol `{}`", toks[1])))?;
            let w = tokenize_output(&toks[2], &out_alpha, line_no)?;
            let q = parse_state(&toks[3], states, line_no)?;
            transitions.push((p, a, w, q));
        }
        let t = RationalTransducer::new(states, alphabet, out_alpha, transitions, initial, finals)?;
        return Ok(ParsedAutomaton::Transducer(t));
    }

    if output_alphabet.is_some() {
        return Err(Error::Parse("`output-alphabet` is only valid for transducers".into()));
    }

    let mut transitions = Vec::new();
    for (line_no, toks) in trans_lines {
        if toks.len() != 3 {
            return Err(err(line_no, "transition needs `src sym dst`"));
        }
        let p = parse_state(&toks[0], states, line_no)?;
        let a = alphabet
            .id_of(&toks[1])
            .ok_or_else(|| err(line_no, format!("unknown symbol `{}`", toks[1])))?;
        let q = parse_state(&toks[2], states, line_no)?;
        transitions.push((p, a, q));
    }

    match kind.as_str() {
        "nfa" => {
            if colors.is_some() {
                return Err(Error::Parse("`colors` is only valid for pdfa".into()));
            }
            let finals = finals.ok_or_else(|| Error::Parse("missing `finals`".into()))?;
            Ok(ParsedAutomaton::Nfa(Nfa::new(states, alphabet, transitions, initial, finals)?))
        }
        "dfa" => {
            if colors.is_some() {
                return Err(Error::Parse("`colors` is only valid for pdfa".into()));
            }
            let finals = finals.ok_or_else(|| Error::Parse("missing `finals`".into()))?;
            Ok(ParsedAutomaton::Dfa(Dfa::new(states, alphabet, transitions, initial, finals)?))
        }
        "pdfa" => {
            if finals.is_some() {
                return Err(Error::Parse("pdfa uses `colors`, not `finals`".into()));
            }
            let (color_alphabet, color_of) =
                colors.ok_or_else(|| Error::Parse("missing `colors`".into()))?;
            let finals: BTreeSet<StateId> = color_of.keys().copied().collect();
            let dfa = Dfa::new(states, alphabet, transitions, initial, finals)?;
            Ok(ParsedAutomaton::Pdfa(PartitionedDfa::new(dfa, color_alphabet, color_of)?))
        }
        _ => unreachable!(),
    }
}

pub fn write_automaton(a: &ParsedAutomaton) -> String {
    let mut s = String::new();
    match a {
        ParsedAutomaton::Nfa(n) => {
            s.push_str("type: nfa\n");
            s.push_str(&format!("alphabet: {}\n", n.alphabet));
            s.push_str(&format!("states: {}\n", n.state_count));
            if let Some(q0) = n.initial {
                s.push_str(&format!("initial: {q0}\n"));
            }
            let finals: Vec<String> = n.finals.iter().map(|q| q.to_string()).collect();
            s.push_str(&format!("finals: {}\n", finals.join(" ")));
            for &(p, a, q) in &n.transitions {
                s.push_str(&format!("trans: {p} {} {q}\n", n.alphabet.symbol(a)));
            }
        }
        ParsedAutomaton::Dfa(d) => {
            s.push_str("type: dfa\n");
            s.push_str(&format!("alphabet: {}\n", d.alphabet));
            s.push_str(&format!("states: {}\n", d.state_count));
            if let Some(q0) = d.initial {
                s.push_str(&format!("initial: {q0}\n"));
            }
            let finals: Vec<String> = d.finals.iter().map(|q| q.to_string()).collect();
            s.push_str(&format!("finals: {}\n", finals.join(" ")));
            for (p, a, q) in d.transition_triples() {
                s.push_str(&format!("trans: {p} {} {q}\n", d.alphabet.symbol(a)));
            }
        }
        ParsedAutomaton::Pdfa(pd) => {
            s.push_str("type: pdfa\n");
            s.push_str(&format!("alphabet: {}\n", pd.dfa.alphabet));
            s.push_str(&format!("states: {}\n", pd.dfa.state_count));
            if let Some(q0) = pd.dfa.initial {
                s.push_str(&format!("initial: {q0}\n"));
            }
            let mut groups: Vec<Vec<StateId>> = vec![Vec::new(); pd.colors.len()];
            for (&q, &c) in &pd.color_of {
                groups[c].push(q);
            }
            let mut parts = Vec::new();
            for (c, qs) in groups.iter().enumerate() {
                if qs.is_empty() {
                    continue;
                }
                let list: Vec<String> = qs.iter().map(|q| q.to_string()).collect();
                parts.push(format!("{}={}", pd.colors.symbol(c), list.join(",")));
            }
            s.push_str(&format!("colors: {}\n", parts.join(" ")));
            for (p, a, q) in pd.dfa.transition_triples() {
                s.push_str(&format!("trans: {p} {} {q}\n", pd.dfa.alphabet.symbol(a)));
            }
        }
        ParsedAutomaton::Transducer(t) => {
            s.push_str("type: transducer\n");
            s.push_str(&format!("alphabet: {}\n", t.input_alphabet));
            s.push_str(&format!("output-alphabet: {}\n", t.output_alphabet));
            s.push_str(&format!("states: {}\n", t.state_count));
            if let Some(q0) = t.initial {
                s.push_str(&format!("initial: {q0}\n"));
            }
            let finals: Vec<String> = t.finals.iter().map(|q| q.to_string()).collect();
            s.push_str(&format!("finals: {}\n", finals.join(" ")));
            for (p, a, w, q) in &t.transitions {
                let word: String = w.iter().map(|&b| t.output_alphabet.symbol(b)).collect();
                s.push_str(&format!("trans: {p} {} {word} {q}\n", t.input_alphabet.symbol(*a)));
            }
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_dfa_roundtrip() {
        let text = "type: dfa\nalphabet: a b\nstates: 2\ninitial: 0\nfinals: 1\ntrans: 0 a 1\ntrans: 1 b 0\n";
        let a = parse_automaton(text).unwrap();
        let out = write_automaton(&a);
        let b = parse_automaton(&out).unwrap();
        match (a, b) {
            (ParsedAutomaton::Dfa(x), ParsedAutomaton::Dfa(y)) => {
                assert_eq!(x.transition_triples(), y.transition_triples());
                assert_eq!(x.finals, y.finals);
            }
            _ => panic!("kind changed in roundtrip"),
        }
    }

    #[test]
    fn parse_rejects_unknown_key() {
        let text = "type: dfa\nalphabet: a\nstates: 1\nfinals: 0\nbogus: 1\n";
        assert!(parse_automaton(text).is_err());
    }

    #[test]
    fn parse_rejects_out_of_range() {
        let text = "type: dfa\nalphabet: a\nstates: 1\nfinals: 3\n";
        assert!(parse_automaton(text).is_err());
    }

    #[test]
    fn parse_rejects_duplicate_dfa_transition() {
        let text = "type: dfa\nalphabet: a\nstates: 2\nfinals: 1\ntrans: 0 a 1\ntrans: 0 a 0\n";
        assert!(parse_automaton(text).is_err());
    }

    #[test]
    fn parse_rejects_reserved_dollar() {
        let text = "type: dfa\nalphabet: $ a\nstates: 1\nfinals: 0\n";
        assert!(parse_automaton(text).is_err());
    }

    #[test]
    fn parse_pdfa_colors() {
        let text = "type: pdfa\nalphabet: a\nstates: 3\ninitial: 0\ncolors: x=1,2 y=0\ntrans: 0 a 1\ntrans: 1 a 2\n";
        let a = parse_automaton(text).unwrap();
        match a {
            ParsedAutomaton::Pdfa(p) => {
                assert_eq!(p.colors.symbol(0), "x");
                assert_eq!(p.colors.symbol(1), "y");
                assert_eq!(p.color_of[&0], 1);
                assert_eq!(p.color_of[&1], 0);
            }
            _ => panic!(),
        }
    }

    #[test]
    fn parse_transducer_output_word() {
        let text = "type: transducer\nalphabet: a\noutput-alphabet: l r\nstates: 1\ninitial: 0\nfinals: 0\ntrans: 0 a lrl 0\n";
        match parse_automaton(text).unwrap() {
            ParsedAutomaton::Transducer(t) => {
                assert_eq!(t.transitions[0].2, vec![0, 1, 0]);
            }
            _ => panic!(),
        }
    }
}
