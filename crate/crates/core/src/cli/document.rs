// SPDX-License-Identifier: Apache-2.0

//! JSON interchange format for weighted automata, CRAs and VASS.
//!
//! `∞` is the string `"inf"`. Plain letters are strings and counter letters
//! are objects `{"op": "inc", "counter": 1}`, so a symbol that happens to be
//! spelled `inc1` stays a symbol.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::automata::{Letter, Nfa, StateId, Transition, WeightedAutomaton};
use crate::cra::Cra;
use crate::error::{Error, Result};
use crate::semiring::{SemiringKind, TropicalMatrix, TropicalValue};
use crate::vass::{basic_alphabet, CounterLetter, CounterOp, Vass};

/// Any machine a document can describe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Machine {
    Wa(WeightedAutomaton),
    Cra(Cra),
    Vass(Vass),
}

impl Machine {
    pub fn type_name(&self) -> &'static str {
        match self {
            Machine::Wa(_) => "wa",
            Machine::Cra(_) => "cra",
            Machine::Vass(_) => "vass",
        }
    }
}

impl From<WeightedAutomaton> for Machine {
    fn from(w: WeightedAutomaton) -> Self {
        Machine::Wa(w)
    }
}

impl From<Cra> for Machine {
    fn from(c: Cra) -> Self {
        Machine::Cra(c)
    }
}

impl From<Vass> for Machine {
    fn from(v: Vass) -> Self {
        Machine::Vass(v)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum ValueDoc {
    Int(i64),
    Text(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum LetterDoc {
    Sym(String),
    Counter(CounterDoc),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CounterDoc {
    op: String,
    counter: usize,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum Document {
    Wa(WaDoc),
    Cra(CraDoc),
    Vass(VassDoc),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WaDoc {
    semiring: String,
    states: Vec<String>,
    alphabet: Vec<LetterDoc>,
    initial: String,
    initial_weight: ValueDoc,
    transitions: Vec<WaTransitionDoc>,
    finals: Vec<WaFinalDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WaTransitionDoc {
    from: String,
    /// `null` is ε.
    letter: Option<LetterDoc>,
    to: String,
    weight: ValueDoc,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WaFinalDoc {
    state: String,
    weight: ValueDoc,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CraDoc {
    semiring: String,
    states: Vec<String>,
    alphabet: Vec<LetterDoc>,
    initial: String,
    registers: Vec<String>,
    initial_values: Vec<ValueDoc>,
    transitions: Vec<CraTransitionDoc>,
    outputs: Vec<CraOutputDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CraTransitionDoc {
    from: String,
    letter: LetterDoc,
    to: String,
    /// `(k+1) × (k+1)` rows; the last row and column belong to the constant register.
    update: Vec<Vec<ValueDoc>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CraOutputDoc {
    state: String,
    vector: Vec<ValueDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VassDoc {
    dimension: usize,
    states: Vec<String>,
    initial: String,
    target: String,
    /// Defaults to the basic letters, plus every `nchk` letter if any edge uses one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alphabet: Option<Vec<LetterDoc>>,
    transitions: Vec<VassTransitionDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VassTransitionDoc {
    from: String,
    letter: LetterDoc,
    to: String,
}

fn invalid(field: impl AsRef<str>, msg: impl std::fmt::Display) -> Error {
    Error::Document(format!("{}: {msg}", field.as_ref()))
}

/// Parses and validates a machine document.
pub fn parse_machine(text: &str) -> Result<Machine> {
    let doc: Document = serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))?;
    match doc {
        Document::Wa(d) => wa_from_doc(d).map(Machine::Wa),
        Document::Cra(d) => cra_from_doc(d).map(Machine::Cra),
        Document::Vass(d) => vass_from_doc(d).map(Machine::Vass),
    }
}

/// Pretty-printed JSON for `machine`; [`parse_machine`] inverts it exactly.
pub fn serialize_machine(machine: &Machine) -> String {
    let doc = match machine {
        Machine::Wa(w) => Document::Wa(wa_to_doc(w)),
        Machine::Cra(c) => Document::Cra(cra_to_doc(c)),
        Machine::Vass(v) => Document::Vass(vass_to_doc(v)),
    };
    let value = serde_json::to_value(&doc).expect("documents always serialize");
    let mut text = String::new();
    write_value(&mut text, &value, 0);
    text.push('\n');
    text
}

fn is_flat(v: &serde_json::Value) -> bool {
    use serde_json::Value;
    match v {
        Value::Array(items) => items.iter().all(|x| !x.is_array() && !x.is_object()),
        Value::Object(fields) => fields.values().all(|x| !x.is_array() && !x.is_object()),
        _ => true,
    }
}

/// Indented JSON that keeps scalar arrays (matrix rows, vectors) and
/// scalar-only objects (counter letters) on one line.
fn write_value(out: &mut String, v: &serde_json::Value, depth: usize) {
    use serde_json::Value;
    if is_flat(v) {
        match v {
            Value::Array(items) => {
                let items: Vec<String> = items.iter().map(Value::to_string).collect();
                out.push_str(&format!("[{}]", items.join(", ")));
            }
            Value::Object(fields) => {
                let fields: Vec<String> = fields
                    .iter()
                    .map(|(k, x)| format!("{}: {x}", Value::String(k.clone())))
                    .collect();
                out.push_str(&format!("{{{}}}", fields.join(", ")));
            }
            scalar => out.push_str(&scalar.to_string()),
        }
        return;
    }
    let pad = "  ".repeat(depth + 1);
    let (open, close, entries): (char, char, Vec<(Option<&String>, &Value)>) = match v {
        Value::Array(items) => ('[', ']', items.iter().map(|x| (None, x)).collect()),
        Value::Object(fields) => ('{', '}', fields.iter().map(|(k, x)| (Some(k), x)).collect()),
        _ => unreachable!("scalars are flat"),
    };
    out.push(open);
    for (i, (key, x)) in entries.iter().enumerate() {
        out.push_str(if i == 0 { "\n" } else { ",\n" });
        out.push_str(&pad);
        if let Some(k) = key {
            out.push_str(&Value::String((*k).clone()).to_string());
            out.push_str(": ");
        }
        write_value(out, x, depth + 1);
    }
    out.push('\n');
    out.push_str(&"  ".repeat(depth));
    out.push(close);
}

fn value_to_doc(v: &TropicalValue) -> ValueDoc {
    match v.to_i64() {
        Some(n) => ValueDoc::Int(n),
        None => ValueDoc::Text(v.to_string()),
    }
}

fn value_from_doc(v: &ValueDoc, kind: SemiringKind, field: &str) -> Result<TropicalValue> {
    let value = match v {
        ValueDoc::Int(n) => TropicalValue::finite(*n),
        ValueDoc::Text(s) => s
            .parse::<TropicalValue>()
            .map_err(|_| invalid(field, format!("`{s}` is neither an integer nor \"inf\"")))?,
    };
    if !kind.contains(&value) {
        return Err(invalid(
            field,
            format!("{value} does not belong to the {kind} semiring"),
        ));
    }
    Ok(value)
}

fn letter_to_doc(l: &Letter) -> LetterDoc {
    match l {
        Letter::Sym(s) => LetterDoc::Sym(s.clone()),
        Letter::Counter(c) => LetterDoc::Counter(CounterDoc {
            op: c.op.name().to_string(),
            counter: c.counter,
        }),
    }
}

fn letter_from_doc(l: &LetterDoc, field: &str) -> Result<Letter> {
    match l {
        LetterDoc::Sym(s) if s.is_empty() => Err(invalid(field, "empty letter")),
        LetterDoc::Sym(s) => Ok(Letter::Sym(s.clone())),
        LetterDoc::Counter(c) => {
            let op =
                c.op.parse::<CounterOp>()
                    .map_err(|_| invalid(field, format!("unknown counter operation `{}`", c.op)))?;
            if c.counter == 0 {
                return Err(invalid(field, "counters are numbered from 1"));
            }
            Ok(Letter::Counter(CounterLetter::new(op, c.counter)))
        }
    }
}

fn parse_kind(s: &str) -> Result<SemiringKind> {
    s.parse().map_err(|_| {
        invalid(
            "semiring",
            format!("expected \"nat\" or \"int\", found `{s}`"),
        )
    })
}

/// Resolves names and letters shared by all three document shapes.
struct Skeleton {
    states: Vec<String>,
    state_ids: HashMap<String, StateId>,
    alphabet: Vec<Letter>,
    letter_ids: HashMap<Letter, usize>,
}

impl Skeleton {
    fn new(states: Vec<String>, alphabet: Vec<Letter>) -> Result<Self> {
        if states.is_empty() {
            return Err(invalid("states", "at least one state is required"));
        }
        let mut state_ids = HashMap::new();
        for (i, name) in states.iter().enumerate() {
            if state_ids.insert(name.clone(), i).is_some() {
                return Err(invalid(
                    format!("states[{i}]"),
                    format!("duplicate state `{name}`"),
                ));
            }
        }
        let mut letter_ids = HashMap::new();
        for (i, letter) in alphabet.iter().enumerate() {
            if letter_ids.insert(letter.clone(), i).is_some() {
                return Err(invalid(
                    format!("alphabet[{i}]"),
                    format!("duplicate letter `{letter}`"),
                ));
            }
        }
        Ok(Skeleton {
            states,
            state_ids,
            alphabet,
            letter_ids,
        })
    }

    fn state(&self, name: &str, field: &str) -> Result<StateId> {
        self.state_ids
            .get(name)
            .copied()
            .ok_or_else(|| invalid(field, format!("undeclared state `{name}`")))
    }

    fn letter(&self, letter: &Letter, field: &str) -> Result<usize> {
        self.letter_ids
            .get(letter)
            .copied()
            .ok_or_else(|| invalid(field, format!("letter `{letter}` is not in the alphabet")))
    }

    fn nfa(
        self,
        transitions: Vec<Transition>,
        initial: StateId,
        finals: BTreeSet<StateId>,
    ) -> Result<Nfa> {
        Nfa::new(self.states, self.alphabet, transitions, initial, finals)
            .map_err(|e| invalid("transitions", e))
    }
}

fn letters_from_doc(letters: &[LetterDoc]) -> Result<Vec<Letter>> {
    letters
        .iter()
        .enumerate()
        .map(|(i, l)| letter_from_doc(l, &format!("alphabet[{i}]")))
        .collect()
}

fn wa_from_doc(d: WaDoc) -> Result<WeightedAutomaton> {
    let kind = parse_kind(&d.semiring)?;
    let sk = Skeleton::new(d.states, letters_from_doc(&d.alphabet)?)?;
    let initial = sk.state(&d.initial, "initial")?;
    let initial_weight = value_from_doc(&d.initial_weight, kind, "initial_weight")?;
    let mut transitions = Vec::with_capacity(d.transitions.len());
    let mut weights = Vec::with_capacity(d.transitions.len());
    for (i, t) in d.transitions.iter().enumerate() {
        let at = |f: &str| format!("transitions[{i}].{f}");
        let label = match &t.letter {
            None => None,
            Some(l) => Some(sk.letter(&letter_from_doc(l, &at("letter"))?, &at("letter"))?),
        };
        transitions.push(Transition {
            from: sk.state(&t.from, &at("from"))?,
            label,
            to: sk.state(&t.to, &at("to"))?,
        });
        weights.push(value_from_doc(&t.weight, kind, &at("weight"))?);
    }
    let mut finals = BTreeMap::new();
    for (i, f) in d.finals.iter().enumerate() {
        let state = sk.state(&f.state, &format!("finals[{i}].state"))?;
        let weight = value_from_doc(&f.weight, kind, &format!("finals[{i}].weight"))?;
        if finals.insert(state, weight).is_some() {
            return Err(invalid(
                format!("finals[{i}].state"),
                format!("state `{}` listed twice", f.state),
            ));
        }
    }
    let nfa = sk.nfa(transitions, initial, finals.keys().copied().collect())?;
    WeightedAutomaton::new(nfa, kind, initial_weight, weights, finals).map_err(|e| invalid("wa", e))
}

fn wa_to_doc(w: &WeightedAutomaton) -> WaDoc {
    let nfa = w.nfa();
    let name = |s: StateId| nfa.state_name(s).to_string();
    WaDoc {
        semiring: w.kind().to_string(),
        states: nfa.state_names().to_vec(),
        alphabet: nfa.alphabet().iter().map(letter_to_doc).collect(),
        initial: name(nfa.initial()),
        initial_weight: value_to_doc(w.initial_weight()),
        transitions: nfa
            .transitions()
            .iter()
            .zip(w.transition_weights())
            .map(|(t, weight)| WaTransitionDoc {
                from: name(t.from),
                letter: t.label.map(|l| letter_to_doc(nfa.letter(l))),
                to: name(t.to),
                weight: value_to_doc(weight),
            })
            .collect(),
        finals: w
            .final_weights()
            .iter()
            .map(|(&s, weight)| WaFinalDoc {
                state: name(s),
                weight: value_to_doc(weight),
            })
            .collect(),
    }
}

fn vector_from_doc(v: &[ValueDoc], kind: SemiringKind, field: &str) -> Result<Vec<TropicalValue>> {
    v.iter()
        .enumerate()
        .map(|(i, x)| value_from_doc(x, kind, &format!("{field}[{i}]")))
        .collect()
}

fn cra_from_doc(d: CraDoc) -> Result<Cra> {
    let kind = parse_kind(&d.semiring)?;
    let k = d.registers.len();
    let sk = Skeleton::new(d.states, letters_from_doc(&d.alphabet)?)?;
    let initial = sk.state(&d.initial, "initial")?;
    if d.initial_values.len() != k {
        return Err(invalid(
            "initial_values",
            format!(
                "{k} registers but {} initial values",
                d.initial_values.len()
            ),
        ));
    }
    let initial_values = vector_from_doc(&d.initial_values, kind, "initial_values")?;
    let mut transitions = Vec::with_capacity(d.transitions.len());
    let mut updates = Vec::with_capacity(d.transitions.len());
    for (i, t) in d.transitions.iter().enumerate() {
        let at = |f: &str| format!("transitions[{i}].{f}");
        let letter = letter_from_doc(&t.letter, &at("letter"))?;
        transitions.push(Transition {
            from: sk.state(&t.from, &at("from"))?,
            label: Some(sk.letter(&letter, &at("letter"))?),
            to: sk.state(&t.to, &at("to"))?,
        });
        if t.update.len() != k + 1 || t.update.iter().any(|row| row.len() != k + 1) {
            return Err(invalid(
                at("update"),
                format!("expected a {0}×{0} matrix", k + 1),
            ));
        }
        let rows = t
            .update
            .iter()
            .enumerate()
            .map(|(r, row)| vector_from_doc(row, kind, &format!("{}[{r}]", at("update"))))
            .collect::<Result<Vec<_>>>()?;
        updates.push(TropicalMatrix::from_rows(kind, rows).map_err(|e| invalid(at("update"), e))?);
    }
    let mut outputs = BTreeMap::new();
    for (i, o) in d.outputs.iter().enumerate() {
        let field = format!("outputs[{i}]");
        let state = sk.state(&o.state, &format!("{field}.state"))?;
        if o.vector.len() != k + 1 {
            return Err(invalid(
                format!("{field}.vector"),
                format!("expected {} entries", k + 1),
            ));
        }
        let nu = vector_from_doc(&o.vector, kind, &format!("{field}.vector"))?;
        if outputs.insert(state, nu).is_some() {
            return Err(invalid(
                format!("{field}.state"),
                format!("state `{}` listed twice", o.state),
            ));
        }
    }
    let dfa = sk.nfa(transitions, initial, outputs.keys().copied().collect())?;
    Cra::new(dfa, kind, d.registers, initial_values, updates, outputs)
        .map_err(|e| invalid("cra", e))
}

fn cra_to_doc(c: &Cra) -> CraDoc {
    let dfa = c.dfa();
    let name = |s: StateId| dfa.state_name(s).to_string();
    let vector = |v: &[TropicalValue]| v.iter().map(value_to_doc).collect::<Vec<_>>();
    CraDoc {
        semiring: c.kind().to_string(),
        states: dfa.state_names().to_vec(),
        alphabet: dfa.alphabet().iter().map(letter_to_doc).collect(),
        initial: name(dfa.initial()),
        registers: c.register_names().to_vec(),
        initial_values: vector(c.initial_values()),
        transitions: dfa
            .transitions()
            .iter()
            .zip(c.updates())
            .map(|(t, m)| CraTransitionDoc {
                from: name(t.from),
                letter: letter_to_doc(dfa.letter(t.label.expect("CRA automata have no ε"))),
                to: name(t.to),
                update: m.to_rows().iter().map(|row| vector(row)).collect(),
            })
            .collect(),
        outputs: c
            .outputs()
            .iter()
            .map(|(&s, nu)| CraOutputDoc {
                state: name(s),
                vector: vector(nu),
            })
            .collect(),
    }
}

fn default_vass_alphabet(dimension: usize, edges: &[Letter]) -> Vec<Letter> {
    let mut letters: Vec<Letter> = basic_alphabet(dimension)
        .into_iter()
        .map(Letter::from)
        .collect();
    let nonzero = edges
        .iter()
        .filter_map(Letter::as_counter)
        .any(|c| c.op == CounterOp::NChk);
    if nonzero {
        letters.extend((1..=dimension).map(|i| Letter::from(CounterLetter::nchk(i))));
    }
    letters
}

fn vass_from_doc(d: VassDoc) -> Result<Vass> {
    let edge_letters = d
        .transitions
        .iter()
        .enumerate()
        .map(|(i, t)| letter_from_doc(&t.letter, &format!("transitions[{i}].letter")))
        .collect::<Result<Vec<_>>>()?;
    let alphabet = match &d.alphabet {
        Some(a) => letters_from_doc(a)?,
        None => default_vass_alphabet(d.dimension, &edge_letters),
    };
    let sk = Skeleton::new(d.states, alphabet)?;
    let initial = sk.state(&d.initial, "initial")?;
    let target = sk.state(&d.target, "target")?;
    let mut transitions = Vec::with_capacity(d.transitions.len());
    for (i, (t, letter)) in d.transitions.iter().zip(&edge_letters).enumerate() {
        let at = |f: &str| format!("transitions[{i}].{f}");
        transitions.push(Transition {
            from: sk.state(&t.from, &at("from"))?,
            label: Some(sk.letter(letter, &at("letter"))?),
            to: sk.state(&t.to, &at("to"))?,
        });
    }
    // Acceptance is decided by `target` and the counters, not by final states.
    let dfa = sk.nfa(transitions, initial, BTreeSet::new())?;
    Vass::new(dfa, d.dimension, target).map_err(|e| invalid("vass", e))
}

fn vass_to_doc(v: &Vass) -> VassDoc {
    let dfa = v.dfa();
    let name = |s: StateId| dfa.state_name(s).to_string();
    let edge_letters: Vec<Letter> = dfa
        .transitions()
        .iter()
        .filter_map(|t| t.label.map(|l| dfa.letter(l).clone()))
        .collect();
    let alphabet = (dfa.alphabet()
        != default_vass_alphabet(v.dimension(), &edge_letters).as_slice())
    .then(|| dfa.alphabet().iter().map(letter_to_doc).collect());
    VassDoc {
        dimension: v.dimension(),
        states: dfa.state_names().to_vec(),
        initial: name(dfa.initial()),
        target: name(v.target()),
        alphabet,
        transitions: dfa
            .transitions()
            .iter()
            .map(|t| VassTransitionDoc {
                from: name(t.from),
                letter: letter_to_doc(dfa.letter(t.label.expect("VASS automata have no ε"))),
                to: name(t.to),
            })
            .collect(),
    }
}
