// SPDX-License-Identifier: Apache-2.0

//! Command-line front end. Results go to `out`, diagnostics to `err`.
//!
//! Exit status: 0 on success, 1 when a checked property fails, 2 on usage
//! or input errors.

pub mod document;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::automata::{format_word, parse_word, Letter, WeightedAutomaton};
use crate::cra::Cra;
use crate::error::{Error, Result};
use crate::normal_form::{decompose, to_linwa};
use crate::reductions::{
    cb_letter, chkcb_letter, doubling_machine, equivalence_pair, iterate_wa,
    semilinearity_instance, upper_boundedness_instance,
};
use crate::simulation::{
    build_n_ccra, build_z_ccra, build_z_ccra_with_output, pad_witness, verify_simulation,
};
use crate::vass::{counter_word, format_counter_word, Vass};

pub use document::{parse_machine, serialize_machine, Machine};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PROPERTY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "ccra",
    version,
    about = "Cost register automata, weighted automata and VASS toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a CRA or weighted automaton on a word.
    Eval { file: PathBuf, word: String },
    /// Check that every update of a CRA is copyless.
    CheckCopyless { file: PathBuf },
    /// Print the prefix/deterministic decomposition of a copyless CRA.
    Decompose { file: PathBuf },
    /// Convert a copyless CRA into a linearly ambiguous weighted automaton.
    ToLinwa {
        file: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Maximum number of accepting runs per word length.
    Ambiguity {
        file: PathBuf,
        #[arg(long)]
        max_len: usize,
    },
    /// Run a VASS on a word and print the configurations.
    VassRun { file: PathBuf, word: String },
    /// List the accepted words of a VASS up to a length.
    VassLang {
        file: PathBuf,
        #[arg(long)]
        max_len: usize,
    },
    /// Build a simulation CRA of a VASS.
    BuildSim {
        variant: SimVariant,
        file: PathBuf,
        /// Counter whose value the `z-out` variant reports.
        #[arg(long, default_value_t = 1)]
        counter: usize,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Print the unique even-output padding of an accepted word.
    PadWitness { file: PathBuf, word: String },
    /// Check both simulations against a VASS on all short words.
    VerifySim {
        file: PathBuf,
        #[arg(long)]
        max_len: usize,
    },
    /// Build a reduction instance.
    Reduce {
        reduction: Reduction,
        file: PathBuf,
        /// For `equiv`, the two machines go to `<stem>.left.json` and `<stem>.right.json`.
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Small demonstrations of individual gadgets.
    Demo {
        #[command(subcommand)]
        demo: Demo,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SimVariant {
    Z,
    ZOut,
    N,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Reduction {
    Equiv,
    Semilinear,
    Iterate,
}

#[derive(Debug, Subcommand)]
enum Demo {
    /// Repeatedly double a value with the climb-back gadget.
    Doubling {
        #[arg(long)]
        s: u64,
        #[arg(long)]
        rounds: usize,
    },
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn io(e: std::io::Error) -> Error {
    Error::Io(e.to_string())
}

fn load(path: &Path) -> Result<Machine> {
    let text =
        fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_machine(&text).map_err(|e| Error::Document(format!("{}: {e}", path.display())))
}

fn save(path: &Path, machine: &Machine) -> Result<()> {
    fs::write(path, serialize_machine(machine))
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn load_cra(path: &Path) -> Result<Cra> {
    match load(path)? {
        Machine::Cra(c) => Ok(c),
        other => Err(wrong_type(path, "cra", &other)),
    }
}

fn load_vass(path: &Path) -> Result<Vass> {
    match load(path)? {
        Machine::Vass(v) => Ok(v),
        other => Err(wrong_type(path, "vass", &other)),
    }
}

fn wrong_type(path: &Path, expected: &str, found: &Machine) -> Error {
    Error::Usage(format!(
        "{} describes a {}, expected a {expected}",
        path.display(),
        found.type_name()
    ))
}

/// Space-separated letters; an empty string or `ε` is the empty word.
fn word_arg(text: &str) -> Result<Vec<Letter>> {
    if text.trim() == "ε" {
        return Ok(Vec::new());
    }
    parse_word(text)
}

fn wa_of(machine: Machine, path: &Path) -> Result<WeightedAutomaton> {
    match machine {
        Machine::Wa(w) => Ok(w),
        Machine::Cra(c) => to_linwa(&c),
        other => Err(wrong_type(path, "wa or cra", &other)),
    }
}

fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Eval { file, word } => {
            let word = word_arg(&word)?;
            let value = match load(&file)? {
                Machine::Cra(c) => c.evaluate(&word)?,
                Machine::Wa(w) => w.evaluate(&word)?,
                other => return Err(wrong_type(&file, "cra or wa", &other)),
            };
            writeln!(out, "{value}").map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::CheckCopyless { file } => {
            let report = load_cra(&file)?.check_copyless();
            if report.is_copyless() {
                writeln!(out, "copyless").map_err(io)?;
                Ok(EXIT_OK)
            } else {
                writeln!(out, "not copyless").map_err(io)?;
                for v in &report.violations {
                    writeln!(out, "  {v}").map_err(io)?;
                }
                Ok(EXIT_PROPERTY)
            }
        }
        Command::Decompose { file } => {
            let d = decompose(&load_cra(&file)?)?;
            let prefix = d.prefix_dfa();
            writeln!(out, "prefix automaton: {} states", prefix.num_states()).map_err(io)?;
            for q in 0..prefix.num_states() {
                let jumps = d
                    .jump(q)
                    .iter()
                    .map(|(t, w)| format!("{}+{w}", d.det_wa().nfa().state_name(*t)))
                    .collect::<Vec<_>>();
                writeln!(out, "  {} -> [{}]", prefix.state_name(q), jumps.join(", "))
                    .map_err(io)?;
            }
            let det = d.det_wa().nfa();
            writeln!(
                out,
                "deterministic automaton: {} states, {} transitions",
                det.num_states(),
                det.transitions().len()
            )
            .map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::ToLinwa { file, out: path } => {
            let w = to_linwa(&load_cra(&file)?)?;
            save(&path, &Machine::Wa(w))?;
            Ok(EXIT_OK)
        }
        Command::Ambiguity { file, max_len } => {
            let w = wa_of(load(&file)?, &file)?;
            let w = if w.nfa().has_epsilon() {
                w.eliminate_epsilon()?
            } else {
                w
            };
            let profile = w
                .nfa()
                .ambiguity_profile(max_len)
                .map_err(|e| Error::Usage(e.to_string()))?;
            writeln!(out, "length\tmax accepting runs").map_err(io)?;
            for (len, runs) in profile {
                writeln!(out, "{len}\t{runs}").map_err(io)?;
            }
            Ok(EXIT_OK)
        }
        Command::VassRun { file, word } => {
            let v = load_vass(&file)?;
            let word = counter_word(&word_arg(&word)?)?;
            let mut cfg = v.initial_configuration();
            writeln!(out, "{}", show_config(&v, &cfg)).map_err(io)?;
            for (i, &letter) in word.iter().enumerate() {
                match v.step(&cfg, letter) {
                    crate::vass::Step::Moved(next) => {
                        cfg = next;
                        writeln!(out, "{letter}\t{}", show_config(&v, &cfg)).map_err(io)?;
                    }
                    crate::vass::Step::Blocked => {
                        writeln!(out, "blocked at letter {} ({letter})", i + 1).map_err(io)?;
                        return Ok(EXIT_OK);
                    }
                }
            }
            let verdict = if v.accepts(&word) {
                "accepted"
            } else {
                "rejected"
            };
            writeln!(out, "{verdict}").map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::VassLang { file, max_len } => {
            let v = load_vass(&file)?;
            let words = v
                .enumerate_language(max_len)
                .map_err(|e| Error::Usage(e.to_string()))?;
            for w in &words {
                writeln!(out, "{}", format_counter_word(w)).map_err(io)?;
            }
            writeln!(
                err,
                "{} accepted words of length at most {max_len}",
                words.len()
            )
            .map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::BuildSim {
            variant,
            file,
            counter,
            out: path,
        } => {
            let v = load_vass(&file)?;
            let machine = match variant {
                SimVariant::Z => build_z_ccra(&v)?.machine,
                SimVariant::ZOut => build_z_ccra_with_output(&v, counter)?.machine,
                SimVariant::N => build_n_ccra(&v)?.machine,
            };
            save(&path, &Machine::Cra(machine))?;
            Ok(EXIT_OK)
        }
        Command::PadWitness { file, word } => {
            let v = load_vass(&file)?;
            let word = counter_word(&word_arg(&word)?)?;
            let sim = build_n_ccra(&v)?;
            let witness = pad_witness(&sim, &v, &word)?;
            let value = sim.machine.evaluate(&crate::vass::to_letters(&witness))?;
            writeln!(out, "{}", format_counter_word(&witness)).map_err(io)?;
            writeln!(out, "output {value}").map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::VerifySim { file, max_len } => {
            let v = load_vass(&file)?;
            let report = verify_simulation(&v, max_len)?;
            writeln!(
                out,
                "checked {} words, {} accepted",
                report.words_checked,
                report.accepted.len()
            )
            .map_err(io)?;
            for (w, witness) in &report.witnesses {
                writeln!(
                    out,
                    "witness {} => {}",
                    format_counter_word(w),
                    format_counter_word(witness)
                )
                .map_err(io)?;
            }
            for c in &report.failures {
                writeln!(
                    out,
                    "counterexample [{}] {}: {}",
                    c.property,
                    format_counter_word(&c.word),
                    c.detail
                )
                .map_err(io)?;
            }
            if report.passed() {
                writeln!(out, "PASS").map_err(io)?;
                Ok(EXIT_OK)
            } else {
                writeln!(out, "FAIL").map_err(io)?;
                Ok(EXIT_PROPERTY)
            }
        }
        Command::Reduce {
            reduction,
            file,
            out: path,
        } => {
            match reduction {
                Reduction::Equiv => {
                    let pair = equivalence_pair(&load_vass(&file)?)?;
                    let (left, right) = (sibling(&path, "left"), sibling(&path, "right"));
                    save(&left, &Machine::Cra(pair.left))?;
                    save(&right, &Machine::Cra(pair.right))?;
                    writeln!(out, "{}\n{}", left.display(), right.display()).map_err(io)?;
                }
                Reduction::Semilinear => {
                    let c = semilinearity_instance(&load_vass(&file)?)?;
                    save(&path, &Machine::Cra(c))?;
                }
                Reduction::Iterate => {
                    let w = match load(&file)? {
                        Machine::Vass(v) => upper_boundedness_instance(&v)?,
                        other => iterate_wa(&wa_of(other, &file)?)?,
                    };
                    save(&path, &Machine::Wa(w))?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Demo {
            demo: Demo::Doubling { s, rounds },
        } => {
            let machine = doubling_machine(s)?;
            let mut word = Vec::new();
            let mut r = s;
            for round in 1..=rounds {
                let blocks = r / 2;
                word.extend(std::iter::repeat_n(cb_letter(), blocks as usize));
                word.push(chkcb_letter());
                let value = machine.evaluate(&word)?;
                writeln!(out, "round {round}: cb^{blocks} chkcb -> {value}").map_err(io)?;
                r = value
                    .to_i64()
                    .and_then(|v| u64::try_from(v).ok())
                    .ok_or_else(|| Error::Internal(format!("round {round} produced {value}")))?;
            }
            let mut wrong = vec![cb_letter(); (s / 2 + 1) as usize];
            wrong.push(chkcb_letter());
            writeln!(
                out,
                "miscounted block {} -> {}",
                format_word(&wrong),
                machine.evaluate(&wrong)?
            )
            .map_err(io)?;
            Ok(EXIT_OK)
        }
    }
}

fn show_config(v: &Vass, cfg: &crate::vass::Configuration) -> String {
    let counters = cfg
        .counters
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(", ");
    format!("{} ({counters})", v.dfa().state_name(cfg.state))
}

/// `dir/pair.json` with tag `left` becomes `dir/pair.left.json`.
fn sibling(path: &Path, tag: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".into());
    let ext = path
        .extension()
        .map(|e| e.to_string_lossy().into_owned())
        .unwrap_or_else(|| "json".into());
    path.with_file_name(format!("{stem}.{tag}.{ext}"))
}
