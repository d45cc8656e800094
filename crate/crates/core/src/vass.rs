// SPDX-License-Identifier: Apache-2.0

//! ℤ-VASS with zero-tests: deterministic automata over counter updates whose
//! `chk` transitions only fire when the tested counter is zero.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use crate::automata::{Letter, Nfa, NfaBuilder, StateId};
use crate::error::{Error, Exhausted, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CounterOp {
    Inc,
    Dec,
    /// Zero-test.
    Chk,
    /// Nonzero-test (counter-machine extension).
    NChk,
    /// Climb-back step of the ℕ-simulation.
    Cb,
    /// End of a climb-back block.
    ChkCb,
    /// Output-balancing letter of the ℕ-simulation.
    Z,
}

impl CounterOp {
    pub const ALL: [CounterOp; 7] = [
        CounterOp::Inc,
        CounterOp::Dec,
        CounterOp::Chk,
        CounterOp::NChk,
        CounterOp::Cb,
        CounterOp::ChkCb,
        CounterOp::Z,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CounterOp::Inc => "inc",
            CounterOp::Dec => "dec",
            CounterOp::Chk => "chk",
            CounterOp::NChk => "nchk",
            CounterOp::Cb => "cb",
            CounterOp::ChkCb => "chkcb",
            CounterOp::Z => "z",
        }
    }

    /// Letters of the basic update alphabet `C_k`.
    pub fn is_basic(self) -> bool {
        matches!(self, CounterOp::Inc | CounterOp::Dec | CounterOp::Chk)
    }
}

impl FromStr for CounterOp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CounterOp::ALL
            .into_iter()
            .find(|op| op.name() == s)
            .ok_or_else(|| Error::Usage(format!("unknown counter operation `{s}`")))
    }
}

/// A counter-machine letter such as `inc₁`. Counters are numbered from 1.
///
/// The derived order is the enumeration order `inc₁ < dec₁ < chk₁ < … < inc₂`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CounterLetter {
    pub counter: usize,
    pub op: CounterOp,
}

impl CounterLetter {
    pub fn new(op: CounterOp, counter: usize) -> Self {
        CounterLetter { counter, op }
    }

    pub fn inc(counter: usize) -> Self {
        Self::new(CounterOp::Inc, counter)
    }

    pub fn dec(counter: usize) -> Self {
        Self::new(CounterOp::Dec, counter)
    }

    pub fn chk(counter: usize) -> Self {
        Self::new(CounterOp::Chk, counter)
    }

    pub fn nchk(counter: usize) -> Self {
        Self::new(CounterOp::NChk, counter)
    }

    pub fn cb(counter: usize) -> Self {
        Self::new(CounterOp::Cb, counter)
    }

    pub fn chkcb(counter: usize) -> Self {
        Self::new(CounterOp::ChkCb, counter)
    }

    pub fn z(counter: usize) -> Self {
        Self::new(CounterOp::Z, counter)
    }

    /// 0-based index of the counter.
    pub fn index(self) -> usize {
        self.counter - 1
    }
}

impl fmt::Display for CounterLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.op.name(), self.counter)
    }
}

impl FromStr for CounterLetter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let split = s
            .find(|c: char| c.is_ascii_digit())
            .ok_or_else(|| Error::Usage(format!("`{s}` has no counter index")))?;
        let (op, digits) = s.split_at(split);
        let op: CounterOp = op.parse()?;
        let counter: usize = digits
            .parse()
            .map_err(|_| Error::Usage(format!("bad counter index in `{s}`")))?;
        if counter == 0 {
            return Err(Error::Usage("counters are numbered from 1".into()));
        }
        Ok(CounterLetter { counter, op })
    }
}

/// `C_k`, in enumeration order.
pub fn basic_alphabet(dimension: usize) -> Vec<CounterLetter> {
    (1..=dimension)
        .flat_map(|i| {
            [
                CounterLetter::inc(i),
                CounterLetter::dec(i),
                CounterLetter::chk(i),
            ]
        })
        .collect()
}

pub fn to_letters(word: &[CounterLetter]) -> Vec<Letter> {
    word.iter().copied().map(Letter::Counter).collect()
}

/// Fails on any letter that is not a counter letter.
pub fn counter_word(word: &[Letter]) -> Result<Vec<CounterLetter>> {
    word.iter()
        .map(|l| {
            l.as_counter()
                .ok_or_else(|| Error::Usage(format!("`{l}` is not a counter letter")))
        })
        .collect()
}

pub fn format_counter_word(word: &[CounterLetter]) -> String {
    crate::automata::format_word(&to_letters(word))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    pub state: StateId,
    pub counters: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Step {
    Moved(Configuration),
    Blocked,
}

/// A VASS of dimension `k` with zero-tests, and a designated target state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vass {
    dfa: Nfa,
    dimension: usize,
    target: StateId,
}

impl Vass {
    /// The automaton must be deterministic and read only `inc`, `dec`, `chk`
    /// and `nchk` letters on counters `1..=dimension`.
    pub fn new(dfa: Nfa, dimension: usize, target: StateId) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::Invalid("dimension must be at least 1".into()));
        }
        if !dfa.is_deterministic() {
            return Err(Error::Invalid(
                "VASS automaton must be deterministic".into(),
            ));
        }
        if target >= dfa.num_states() {
            return Err(Error::Invalid("target state out of range".into()));
        }
        for letter in dfa.alphabet() {
            let c = letter
                .as_counter()
                .ok_or_else(|| Error::Invalid(format!("`{letter}` is not a counter letter")))?;
            if c.counter > dimension {
                return Err(Error::Invalid(format!(
                    "letter `{c}` exceeds dimension {dimension}"
                )));
            }
            if !(c.op.is_basic() || c.op == CounterOp::NChk) {
                return Err(Error::Invalid(format!(
                    "letter `{c}` is not allowed in a VASS"
                )));
            }
        }
        Ok(Vass {
            dfa,
            dimension,
            target,
        })
    }

    pub fn dfa(&self) -> &Nfa {
        &self.dfa
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn target(&self) -> StateId {
        self.target
    }

    pub fn uses_nonzero_tests(&self) -> bool {
        self.dfa
            .alphabet()
            .iter()
            .any(|l| matches!(l.as_counter(), Some(c) if c.op == CounterOp::NChk))
    }

    /// Alphabet letters in enumeration order.
    pub fn letters(&self) -> Vec<CounterLetter> {
        let mut letters: Vec<CounterLetter> = self
            .dfa
            .alphabet()
            .iter()
            .filter_map(Letter::as_counter)
            .collect();
        letters.sort();
        letters
    }

    pub fn initial_configuration(&self) -> Configuration {
        Configuration {
            state: self.dfa.initial(),
            counters: vec![0; self.dimension],
        }
    }

    pub fn step(&self, cfg: &Configuration, letter: CounterLetter) -> Step {
        let Some(id) = self.dfa.letter_id(&Letter::Counter(letter)) else {
            return Step::Blocked;
        };
        let Some(next) = self.dfa.step(cfg.state, id) else {
            return Step::Blocked;
        };
        let i = letter.index();
        let mut counters = cfg.counters.clone();
        match letter.op {
            CounterOp::Inc => counters[i] += 1,
            CounterOp::Dec => counters[i] -= 1,
            CounterOp::Chk if counters[i] != 0 => return Step::Blocked,
            CounterOp::NChk if counters[i] == 0 => return Step::Blocked,
            CounterOp::Chk | CounterOp::NChk => {}
            CounterOp::Cb | CounterOp::ChkCb | CounterOp::Z => return Step::Blocked,
        }
        Step::Moved(Configuration {
            state: next,
            counters,
        })
    }

    /// Configurations visited from `(q₀, 0⃗)`; `None` if the run blocks.
    pub fn run(&self, word: &[CounterLetter]) -> Option<Vec<Configuration>> {
        let mut trace = vec![self.initial_configuration()];
        for &letter in word {
            let current = trace.last().expect("trace is never empty");
            match self.step(current, letter) {
                Step::Moved(next) => trace.push(next),
                Step::Blocked => return None,
            }
        }
        Some(trace)
    }

    /// Whether `word` belongs to the reachability language of the target.
    pub fn accepts(&self, word: &[CounterLetter]) -> bool {
        let mut cfg = self.initial_configuration();
        for &letter in word {
            match self.step(&cfg, letter) {
                Step::Moved(next) => cfg = next,
                Step::Blocked => return false,
            }
        }
        cfg.state == self.target
    }

    /// All accepted words of length at most `max_len`, in length-lexicographic
    /// order.
    pub fn enumerate_language(
        &self,
        max_len: usize,
    ) -> Result<Vec<Vec<CounterLetter>>, Exhausted<Vec<Vec<CounterLetter>>>> {
        self.enumerate_language_with_budget(max_len, crate::automata::DEFAULT_WORD_BUDGET)
    }

    pub fn enumerate_language_with_budget(
        &self,
        max_len: usize,
        budget: u64,
    ) -> Result<Vec<Vec<CounterLetter>>, Exhausted<Vec<Vec<CounterLetter>>>> {
        let letters = self.letters();
        let mut accepted = Vec::new();
        let mut layer = vec![(Vec::new(), self.initial_configuration())];
        let mut visited = 0u64;
        for len in 0..=max_len {
            for (word, cfg) in &layer {
                if cfg.state == self.target {
                    accepted.push(word.clone());
                }
            }
            if len == max_len {
                break;
            }
            let mut next = Vec::new();
            for (word, cfg) in &layer {
                for &letter in &letters {
                    if let Step::Moved(succ) = self.step(cfg, letter) {
                        visited += 1;
                        if visited > budget {
                            return Err(Exhausted {
                                partial: accepted,
                                budget,
                            });
                        }
                        let mut extended = word.clone();
                        extended.push(letter);
                        next.push((extended, succ));
                    }
                }
            }
            layer = next;
        }
        Ok(accepted)
    }

    /// A shortest accepted word of length at most `max_len`, found by
    /// breadth-first search over configurations.
    pub fn shortest_accepted_within(&self, max_len: usize) -> Option<Vec<CounterLetter>> {
        let letters = self.letters();
        let start = self.initial_configuration();
        let mut parent: HashMap<Configuration, Option<(Configuration, CounterLetter)>> =
            HashMap::new();
        parent.insert(start.clone(), None);
        let mut queue = VecDeque::from([(start, 0usize)]);
        while let Some((cfg, depth)) = queue.pop_front() {
            if cfg.state == self.target {
                let mut word = Vec::new();
                let mut cursor = cfg;
                while let Some(Some((prev, letter))) = parent.get(&cursor) {
                    word.push(*letter);
                    cursor = prev.clone();
                }
                word.reverse();
                return Some(word);
            }
            if depth == max_len {
                continue;
            }
            for &letter in &letters {
                if let Step::Moved(next) = self.step(&cfg, letter) {
                    if !parent.contains_key(&next) {
                        parent.insert(next.clone(), Some((cfg.clone(), letter)));
                        queue.push_back((next, depth + 1));
                    }
                }
            }
        }
        None
    }

    /// Checks `|L| ≤ 1` among words of length at most `max_len`. This is a
    /// bounded check only; it certifies nothing about longer words.
    pub fn language_size_at_most_one(
        &self,
        max_len: usize,
    ) -> Result<bool, Exhausted<Vec<Vec<CounterLetter>>>> {
        Ok(self.enumerate_language(max_len)?.len() <= 1)
    }
}

/// Builds a [`Vass`] over `C_k`, adding `nchk` letters only when used.
#[derive(Debug, Clone)]
pub struct VassBuilder {
    dimension: usize,
    nfa: NfaBuilder,
    states: Vec<StateId>,
    target: Option<StateId>,
    nonzero: bool,
    edges: Vec<(StateId, CounterLetter, StateId)>,
}

impl VassBuilder {
    pub fn new(dimension: usize) -> Self {
        VassBuilder {
            dimension,
            nfa: NfaBuilder::new(),
            states: Vec::new(),
            target: None,
            nonzero: false,
            edges: Vec::new(),
        }
    }

    /// The first state created is the initial one.
    pub fn state(&mut self, name: impl Into<String>) -> StateId {
        let id = self.nfa.state(name);
        if !self.states.contains(&id) {
            self.states.push(id);
        }
        id
    }

    pub fn edge(&mut self, from: StateId, letter: CounterLetter, to: StateId) -> &mut Self {
        self.nonzero |= letter.op == CounterOp::NChk;
        self.edges.push((from, letter, to));
        self
    }

    pub fn target(&mut self, state: StateId) -> &mut Self {
        self.target = Some(state);
        self
    }

    pub fn build(mut self) -> Result<Vass> {
        for c in basic_alphabet(self.dimension) {
            self.nfa.letter(Letter::Counter(c));
        }
        if self.nonzero {
            for i in 1..=self.dimension {
                self.nfa.letter(Letter::Counter(CounterLetter::nchk(i)));
            }
        }
        for &(from, letter, to) in &self.edges {
            self.nfa.transition(from, Some(Letter::Counter(letter)), to);
        }
        let initial = *self
            .states
            .first()
            .ok_or_else(|| Error::Invalid("VASS has no states".into()))?;
        self.nfa.set_initial(initial);
        let target = self
            .target
            .ok_or_else(|| Error::Invalid("VASS has no target state".into()))?;
        Vass::new(self.nfa.build()?, self.dimension, target)
    }
}

/// One replaced `nchk` edge: the fresh states of its gadget and the counter
/// it tests.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonzeroGadget {
    pub entry: StateId,
    pub exit: StateId,
    /// 1-based counter that was tested for nonzero.
    pub counter: usize,
    pub states: BTreeSet<StateId>,
}

/// Configurations just before entering and just after leaving one gadget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Traversal {
    pub gadget: usize,
    pub before: Configuration,
    pub after: Configuration,
}

/// Replaces every `nchk_i` edge by a zero-test-only gadget over one extra
/// counter `j = k + 1` shared by all gadgets:
/// `(dec_i·inc_j)⁺ · chk_i · (inc_i·dec_j)* · chk_j`.
pub fn eliminate_nonzero_tests(v: &Vass) -> Result<Vass> {
    eliminate_nonzero_tests_traced(v).map(|(vass, _)| vass)
}

pub fn eliminate_nonzero_tests_traced(v: &Vass) -> Result<(Vass, Vec<NonzeroGadget>)> {
    let k = v.dimension();
    let j = k + 1;
    let dfa = v.dfa();
    let mut b = VassBuilder::new(j);
    for name in dfa.state_names() {
        b.state(name.clone());
    }
    let mut gadgets = Vec::new();
    for t in dfa.transitions() {
        let label = t.label.expect("VASS automata are ε-free");
        let letter = dfa
            .letter(label)
            .as_counter()
            .expect("checked by Vass::new");
        if letter.op != CounterOp::NChk {
            b.edge(t.from, letter, t.to);
            continue;
        }
        let i = letter.counter;
        let clash = dfa.outgoing(t.from).iter().any(|&o| {
            dfa.transitions()[o]
                .label
                .and_then(|l| dfa.letter(l).as_counter())
                == Some(CounterLetter::dec(i))
        });
        if clash {
            return Err(Error::Nondeterministic(format!(
                "state `{}` has both dec{i} and nchk{i} transitions",
                dfa.state_name(t.from)
            )));
        }
        let tag = format!(
            "{}~nchk{i}~{}",
            dfa.state_name(t.from),
            dfa.state_name(t.to)
        );
        let after_dec = b.state(format!("{tag}/dec"));
        let transfer = b.state(format!("{tag}/transfer"));
        let transfer_mid = b.state(format!("{tag}/transfer-dec"));
        let restore = b.state(format!("{tag}/restore"));
        let restore_mid = b.state(format!("{tag}/restore-inc"));
        b.edge(t.from, CounterLetter::dec(i), after_dec)
            .edge(after_dec, CounterLetter::inc(j), transfer)
            .edge(transfer, CounterLetter::dec(i), transfer_mid)
            .edge(transfer_mid, CounterLetter::inc(j), transfer)
            .edge(transfer, CounterLetter::chk(i), restore)
            .edge(restore, CounterLetter::inc(i), restore_mid)
            .edge(restore_mid, CounterLetter::dec(j), restore)
            .edge(restore, CounterLetter::chk(j), t.to);
        gadgets.push(NonzeroGadget {
            entry: t.from,
            exit: t.to,
            counter: i,
            states: BTreeSet::from([after_dec, transfer, transfer_mid, restore, restore_mid]),
        });
    }
    b.target(v.target());
    let out = b.build()?;
    if !out.dfa().is_deterministic() {
        return Err(Error::Nondeterministic("gadget letters collide".into()));
    }
    Ok((out, gadgets))
}

/// Every gadget traversal along the run of `word` in the output of
/// [`eliminate_nonzero_tests_traced`]. `None` if the run blocks.
pub fn gadget_traversals(
    v: &Vass,
    gadgets: &[NonzeroGadget],
    word: &[CounterLetter],
) -> Option<Vec<Traversal>> {
    let trace = v.run(word)?;
    let owner = |state: StateId| gadgets.iter().position(|g| g.states.contains(&state));
    let mut out = Vec::new();
    let mut open: Option<(usize, Configuration)> = None;
    for pair in trace.windows(2) {
        let (prev, next) = (&pair[0], &pair[1]);
        match (owner(prev.state), owner(next.state)) {
            (None, Some(g)) => open = Some((g, prev.clone())),
            (Some(_), None) => {
                if let Some((g, before)) = open.take() {
                    out.push(Traversal {
                        gadget: g,
                        before,
                        after: next.clone(),
                    });
                }
            }
            _ => {}
        }
    }
    Some(out)
}
