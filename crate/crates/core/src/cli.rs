//! Command-line front end. Verdicts go to stdout as a single word
//! (`isomorphic` / `not-isomorphic`), diagnostics to stderr. Exit codes:
//! 0 isomorphic/success, 1 not isomorphic, 2 usage or input error,
//! 3 resource limit.

use crate::automata::{determinize, parse_automaton, write_automaton, Dfa, Nfa, ParsedAutomaton, PartitionedDfa};
use crate::error::{Error, Result};
use crate::isocore::{self, parse_circuit, SesIsoOptions};
use crate::slp::{self, Item, Slp};
use crate::treeiso;
use crate::words::{parse_ses, write_ses, Expr, Ses};
use clap::{Args, Parser, Subcommand};
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(name = "regiso", version, about = "Isomorphism of regular trees, linear orders and words")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CapArg {
    /// Cap on powerset/expansion sizes.
    #[arg(long, default_value_t = 65536)]
    cap: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Unordered tree isomorphism of (L; <=pref) for two automata.
    TreeIso {
        a: PathBuf,
        b: PathBuf,
        #[command(flatten)]
        cap: CapArg,
    },
    /// Canonical code of the finite tree of an acyclic automaton.
    TreeCanon {
        a: PathBuf,
        #[command(flatten)]
        cap: CapArg,
    },
    /// Straight-line program operations (concatenation-only SES files).
    #[command(subcommand)]
    Slp(SlpCommand),
    /// Translate a partitioned DFA into a succinct expression system.
    Heilbrunner {
        a: PathBuf,
        /// Output file for the expression system.
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Isomorphism of the regular words of two partitioned DFAs.
    WordIso { a: PathBuf, b: PathBuf },
    /// Isomorphism of the lexicographic orders of two automata.
    OrderIso {
        a: PathBuf,
        b: PathBuf,
        #[command(flatten)]
        cap: CapArg,
    },
    /// Isomorphism of the values of two variables of an expression system.
    SesIso {
        file: PathBuf,
        x: String,
        y: String,
        /// Dump every intermediate two-level system to stderr.
        #[arg(long)]
        trace: bool,
    },
    /// Ordered tree isomorphism for two automata.
    OtreeIso {
        a: PathBuf,
        b: PathBuf,
        /// Use the pairwise state search (inputs must be prefix-closed).
        #[arg(long)]
        prefix_closed: bool,
        #[command(flatten)]
        cap: CapArg,
    },
    /// Generators for the hardness-gadget corpus.
    #[command(subcommand)]
    Gadget(GadgetCommand),
    /// Run the acceptance suite.
    Selftest {
        /// Seed for the random corpora.
        #[arg(long, default_value_t = 12345)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum SlpCommand {
    /// Equality of the derived words.
    Eq { a: PathBuf, b: PathBuf },
    /// Length of the derived word.
    Len { a: PathBuf },
    /// Does the first word occur as a factor of the second?
    Factor { p: PathBuf, t: PathBuf },
}

#[derive(Subcommand)]
enum GadgetCommand {
    /// Two tree dags that are isomorphic iff the circuit evaluates true.
    CircuitTree {
        circuit: PathBuf,
        /// Output files (two).
        #[arg(short, long, num_args = 2)]
        output: Vec<PathBuf>,
    },
    /// Expression system whose start variable matches the reference
    /// variable iff the circuit evaluates true.
    CircuitSes {
        circuit: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Density gadget: the output order is the rational order iff the
    /// input NFA over {a, b} is universal.
    Eta {
        k: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Compose two formula trees under a gate and emit both images.
    BoolTree {
        u: PathBuf,
        v: PathBuf,
        #[arg(long, value_parser = ["and", "or"])]
        kind: String,
        #[arg(short, long, num_args = 2)]
        output: Vec<PathBuf>,
    },
}

pub fn run(argv: Vec<String>) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            // clap handles --help/--version with success exit codes
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("regiso: {e}");
            match e {
                Error::ResourceLimit(_) => 3,
                _ => 2,
            }
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))
}

fn load_automaton(path: &Path) -> Result<ParsedAutomaton> {
    parse_automaton(&read(path)?)
}

fn load_nfa(path: &Path) -> Result<Nfa> {
    load_automaton(path)?.as_nfa()
}

fn load_dfa_or_determinize(path: &Path, cap: usize) -> Result<Dfa> {
    match load_automaton(path)? {
        ParsedAutomaton::Dfa(d) => Ok(d),
        ParsedAutomaton::Nfa(n) => determinize(&n, cap),
        other => Err(Error::InvalidInput(format!(
            "{}: expected an nfa or dfa, got {}",
            path.display(),
            other.kind()
        ))),
    }
}

fn load_pdfa(path: &Path) -> Result<PartitionedDfa> {
    match load_automaton(path)? {
        ParsedAutomaton::Pdfa(p) => Ok(p),
        other => Err(Error::InvalidInput(format!(
            "{}: expected a pdfa, got {}",
            path.display(),
            other.kind()
        ))),
    }
}

fn load_slp(path: &Path) -> Result<Slp> {
    let ses = parse_ses(&read(path)?)?;
    ses_to_slp(&ses).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

/// A concatenation-only SES denotes an SLP.
fn ses_to_slp(ses: &Ses) -> Result<Slp> {
    fn items(e: &Expr, out: &mut Vec<Item>) -> Result<()> {
        match e {
            Expr::Symbol(s) => out.push(Item::Sym(*s)),
            Expr::Var(v) => out.push(Item::Var(*v)),
            Expr::Concat(ps) => {
                for p in ps {
                    items(p, out)?;
                }
            }
            _ => {
                return Err(Error::InvalidInput(
                    "an SLP file must use concatenation only (no powers or shuffles)".into(),
                ));
            }
        }
        Ok(())
    }
    let mut rules = Vec::with_capacity(ses.var_count());
    for e in &ses.rhs {
        let mut rule = Vec::new();
        items(e, &mut rule)?;
        rules.push(rule);
    }
    let root = ses.start.unwrap_or(0);
    Slp::from_rules(&rules, root)
}

fn verdict(iso: bool) -> i32 {
    if iso {
        println!("isomorphic");
        0
    } else {
        println!("not-isomorphic");
        1
    }
}

fn write_out(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text)
        .map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", path.display())))
}

fn dispatch(cmd: Command) -> Result<i32> {
    match cmd {
        Command::TreeIso { a, b, cap } => {
            let x = load_automaton(&a)?;
            let y = load_automaton(&b)?;
            let iso = match (x, y) {
                (ParsedAutomaton::Dfa(d1), ParsedAutomaton::Dfa(d2)) => treeiso::tree_iso_dfa(&d1, &d2)?,
                (x, y) => treeiso::tree_iso_nfa(&x.as_nfa()?, &y.as_nfa()?, cap.cap)?,
            };
            Ok(verdict(iso))
        }
        Command::TreeCanon { a, cap } => {
            let code = treeiso::finite_tree_canon(&load_nfa(&a)?, cap.cap)?;
            println!("{code}");
            Ok(0)
        }
        Command::Slp(sub) => match sub {
            SlpCommand::Eq { a, b } => {
                let x = load_slp(&a)?;
                let y = load_slp(&b)?;
                if slp::slp_eq(&x, &y) {
                    println!("equal");
                    Ok(0)
                } else {
                    println!("not-equal");
                    Ok(1)
                }
            }
            SlpCommand::Len { a } => {
                println!("{}", slp::slp_length(&load_slp(&a)?));
                Ok(0)
            }
            SlpCommand::Factor { p, t } => {
                let pp = load_slp(&p)?;
                let tt = load_slp(&t)?;
                if slp::slp_factor(&pp, &tt) {
                    println!("factor");
                    Ok(0)
                } else {
                    println!("not-factor");
                    Ok(1)
                }
            }
        },
        Command::Heilbrunner { a, output } => {
            let ses = crate::heilbrunner::heilbrunner_expression(&load_pdfa(&a)?)?;
            write_out(&output, &write_ses(&ses))?;
            eprintln!("wrote {}", output.display());
            Ok(0)
        }
        Command::WordIso { a, b } => {
            let iso = isocore::word_iso(&load_pdfa(&a)?, &load_pdfa(&b)?)?;
            Ok(verdict(iso))
        }
        Command::OrderIso { a, b, cap } => {
            let d1 = load_dfa_or_determinize(&a, cap.cap)?;
            let d2 = load_dfa_or_determinize(&b, cap.cap)?;
            Ok(verdict(isocore::order_iso(&d1, &d2)?))
        }
        Command::SesIso { file, x, y, trace } => {
            let ses = parse_ses(&read(&file)?)?;
            let vx = ses
                .var_id(&x)
                .ok_or_else(|| Error::InvalidInput(format!("unknown variable `{x}`")))?;
            let vy = ses
                .var_id(&y)
                .ok_or_else(|| Error::InvalidInput(format!("unknown variable `{y}`")))?;
            let opts = SesIsoOptions { trace, check_invariants: false };
            let (iso, _) = isocore::ses_iso_with(&ses, vx, vy, &opts)?;
            Ok(verdict(iso))
        }
        Command::OtreeIso { a, b, prefix_closed, cap } => {
            let d1 = load_dfa_or_determinize(&a, cap.cap)?;
            let d2 = load_dfa_or_determinize(&b, cap.cap)?;
            let iso = if prefix_closed {
                isocore::ordered_tree_iso_prefix_closed(&d1, &d2)?
            } else {
                isocore::ordered_tree_iso(&d1, &d2)?
            };
            Ok(verdict(iso))
        }
        Command::Gadget(sub) => match sub {
            GadgetCommand::CircuitTree { circuit, output } => {
                let c = parse_circuit(&read(&circuit)?)?;
                let (d1, d2) = crate::gadgets::circuit_to_tree_dags(&c)?;
                let [o1, o2]: [PathBuf; 2] = output
                    .try_into()
                    .map_err(|_| Error::InvalidInput("circuit-tree needs two output paths".into()))?;
                write_out(&o1, &write_automaton(&ParsedAutomaton::Dfa(d1)))?;
                write_out(&o2, &write_automaton(&ParsedAutomaton::Dfa(d2)))?;
                eprintln!("wrote {} and {}", o1.display(), o2.display());
                Ok(0)
            }
            GadgetCommand::CircuitSes { circuit, output } => {
                let c = parse_circuit(&read(&circuit)?)?;
                let (ses, test, good) = crate::gadgets::circuit_to_ses(&c)?;
                write_out(&output, &write_ses(&ses))?;
                eprintln!(
                    "wrote {}; compare `{}` against `{}`",
                    output.display(),
                    ses.var_names[test],
                    ses.var_names[good]
                );
                Ok(0)
            }
            GadgetCommand::Eta { k, output } => {
                let gadget = crate::gadgets::eta_universality_gadget(&load_nfa(&k)?)?;
                write_out(&output, &write_automaton(&ParsedAutomaton::Nfa(gadget)))?;
                eprintln!("wrote {}", output.display());
                Ok(0)
            }
            GadgetCommand::BoolTree { u, v, kind, output } => {
                let un = load_nfa(&u)?;
                let vn = load_nfa(&v)?;
                let (t1, t2) = crate::gadgets::boolean_tree_gadget(&un, &vn, kind == "and")?;
                let [o1, o2]: [PathBuf; 2] = output
                    .try_into()
                    .map_err(|_| Error::InvalidInput("bool-tree needs two output paths".into()))?;
                write_out(&o1, &write_automaton(&ParsedAutomaton::Nfa(t1)))?;
                write_out(&o2, &write_automaton(&ParsedAutomaton::Nfa(t2)))?;
                eprintln!("wrote {} and {}", o1.display(), o2.display());
                Ok(0)
            }
        },
        Command::Selftest { seed } => {
            if crate::accept::run_all(seed) {
                Ok(0)
            } else {
                Ok(1)
            }
        }
    }
}
