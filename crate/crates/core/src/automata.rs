// SPDX-License-Identifier: Apache-2.0

//! Finite automata with optional ε-transitions, and weighted automata over a
//! tropical semiring.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Exhausted, Result};
use crate::semiring::{SemiringKind, TropicalValue};
use crate::vass::CounterLetter;

pub type StateId = usize;
pub type LetterId = usize;

/// Default number of words an exhaustive enumeration may visit.
pub const DEFAULT_WORD_BUDGET: u64 = 20_000_000;

/// A letter of an input alphabet.
///
/// Counter-machine letters are kept structured so that the simulation
/// constructions can inspect them; everything else is a plain symbol.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    Sym(String),
    Counter(CounterLetter),
}

impl Letter {
    pub fn sym(s: impl Into<String>) -> Self {
        Letter::Sym(s.into())
    }

    pub fn as_counter(&self) -> Option<CounterLetter> {
        match self {
            Letter::Counter(c) => Some(*c),
            Letter::Sym(_) => None,
        }
    }
}

impl From<CounterLetter> for Letter {
    fn from(c: CounterLetter) -> Self {
        Letter::Counter(c)
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Letter::Sym(s) => f.write_str(s),
            Letter::Counter(c) => write!(f, "{c}"),
        }
    }
}

impl FromStr for Letter {
    type Err = Error;

    /// `inc1`, `chkcb2`, … parse as counter letters; anything else is a symbol.
    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::Usage("empty letter".into()));
        }
        Ok(match s.parse::<CounterLetter>() {
            Ok(c) => Letter::Counter(c),
            Err(_) => Letter::Sym(s.to_string()),
        })
    }
}

/// Splits a whitespace-separated word into letters.
pub fn parse_word(text: &str) -> Result<Vec<Letter>> {
    text.split_whitespace().map(str::parse).collect()
}

pub fn format_word(word: &[Letter]) -> String {
    if word.is_empty() {
        return "ε".to_string();
    }
    word.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transition {
    pub from: StateId,
    /// `None` is ε.
    pub label: Option<LetterId>,
    pub to: StateId,
}

/// A nondeterministic finite automaton `(Q, A, δ, q₀, F)` with ε allowed in δ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nfa {
    states: Vec<String>,
    alphabet: Vec<Letter>,
    transitions: Vec<Transition>,
    initial: StateId,
    finals: BTreeSet<StateId>,
    letter_ids: HashMap<Letter, LetterId>,
    state_ids: HashMap<String, StateId>,
    outgoing: Vec<Vec<usize>>,
}

impl Nfa {
    pub fn new(
        states: Vec<String>,
        alphabet: Vec<Letter>,
        transitions: Vec<Transition>,
        initial: StateId,
        finals: BTreeSet<StateId>,
    ) -> Result<Self> {
        let n = states.len();
        if n == 0 {
            return Err(Error::Invalid("automaton has no states".into()));
        }
        let mut state_ids = HashMap::with_capacity(n);
        for (id, name) in states.iter().enumerate() {
            if state_ids.insert(name.clone(), id).is_some() {
                return Err(Error::Invalid(format!("duplicate state `{name}`")));
            }
        }
        let mut letter_ids = HashMap::with_capacity(alphabet.len());
        for (id, letter) in alphabet.iter().enumerate() {
            if letter_ids.insert(letter.clone(), id).is_some() {
                return Err(Error::Invalid(format!("duplicate letter `{letter}`")));
            }
        }
        if initial >= n {
            return Err(Error::Invalid(format!(
                "initial state {initial} out of range"
            )));
        }
        if let Some(bad) = finals.iter().find(|&&f| f >= n) {
            return Err(Error::Invalid(format!("final state {bad} out of range")));
        }
        let mut seen = BTreeSet::new();
        let mut outgoing = vec![Vec::new(); n];
        for (idx, t) in transitions.iter().enumerate() {
            if t.from >= n || t.to >= n {
                return Err(Error::Invalid(format!(
                    "transition {idx} uses an undeclared state"
                )));
            }
            if matches!(t.label, Some(l) if l >= alphabet.len()) {
                return Err(Error::Invalid(format!(
                    "transition {idx} uses a letter outside the alphabet"
                )));
            }
            if !seen.insert(*t) {
                return Err(Error::Invalid(format!(
                    "duplicate transition {} -{}-> {}",
                    states[t.from],
                    t.label
                        .map_or_else(|| "ε".to_string(), |l| alphabet[l].to_string()),
                    states[t.to]
                )));
            }
            outgoing[t.from].push(idx);
        }
        Ok(Nfa {
            states,
            alphabet,
            transitions,
            initial,
            finals,
            letter_ids,
            state_ids,
            outgoing,
        })
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn state_name(&self, id: StateId) -> &str {
        &self.states[id]
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.state_ids.get(name).copied()
    }

    pub fn alphabet(&self) -> &[Letter] {
        &self.alphabet
    }

    pub fn letter(&self, id: LetterId) -> &Letter {
        &self.alphabet[id]
    }

    pub fn letter_id(&self, letter: &Letter) -> Option<LetterId> {
        self.letter_ids.get(letter).copied()
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn finals(&self) -> &BTreeSet<StateId> {
        &self.finals
    }

    pub fn is_final(&self, state: StateId) -> bool {
        self.finals.contains(&state)
    }

    /// Indices (into [`Nfa::transitions`]) of the transitions leaving `state`.
    pub fn outgoing(&self, state: StateId) -> &[usize] {
        &self.outgoing[state]
    }

    pub fn has_epsilon(&self) -> bool {
        self.transitions.iter().any(|t| t.label.is_none())
    }

    /// No ε-transitions and at most one successor per (state, letter).
    pub fn is_deterministic(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.transitions
            .iter()
            .all(|t| t.label.is_some() && seen.insert((t.from, t.label)))
    }

    /// Index of the unique transition on `letter` from `state`, if any.
    pub fn step_index(&self, state: StateId, letter: LetterId) -> Option<usize> {
        self.outgoing[state]
            .iter()
            .copied()
            .find(|&i| self.transitions[i].label == Some(letter))
    }

    pub fn step(&self, state: StateId, letter: LetterId) -> Option<StateId> {
        self.step_index(state, letter)
            .map(|i| self.transitions[i].to)
    }

    pub fn encode_word(&self, word: &[Letter]) -> Result<Vec<LetterId>> {
        word.iter()
            .map(|l| {
                self.letter_id(l)
                    .ok_or_else(|| Error::UnknownLetter(l.to_string()))
            })
            .collect()
    }

    /// Same automaton with a different set of final states.
    pub fn with_finals(&self, finals: BTreeSet<StateId>) -> Result<Nfa> {
        Nfa::new(
            self.states.clone(),
            self.alphabet.clone(),
            self.transitions.clone(),
            self.initial,
            finals,
        )
    }

    /// Number of accepting runs labelled by `word`, by dynamic programming
    /// over per-state run counts.
    pub fn count_accepting_runs(&self, word: &[Letter]) -> Result<BigUint> {
        if self.has_epsilon() {
            return Err(Error::EpsilonPresent);
        }
        let mut counts = vec![BigUint::zero(); self.num_states()];
        counts[self.initial] = BigUint::one();
        for letter in word {
            let Some(id) = self.letter_id(letter) else {
                return Ok(BigUint::zero());
            };
            counts = self.advance_counts(&counts, id);
        }
        Ok(self.accepting_total(&counts))
    }

    fn advance_counts(&self, counts: &[BigUint], letter: LetterId) -> Vec<BigUint> {
        let mut next = vec![BigUint::zero(); counts.len()];
        for (state, count) in counts.iter().enumerate() {
            if count.is_zero() {
                continue;
            }
            for &i in &self.outgoing[state] {
                let t = &self.transitions[i];
                if t.label == Some(letter) {
                    next[t.to] += count;
                }
            }
        }
        next
    }

    fn accepting_total(&self, counts: &[BigUint]) -> BigUint {
        self.finals.iter().map(|&f| &counts[f]).sum()
    }

    /// For each length up to `max_len`, the largest number of accepting runs
    /// of any word of that length.
    pub fn ambiguity_profile(
        &self,
        max_len: usize,
    ) -> Result<Vec<(usize, BigUint)>, AmbiguityError> {
        self.ambiguity_profile_with_budget(max_len, DEFAULT_WORD_BUDGET)
    }

    pub fn ambiguity_profile_with_budget(
        &self,
        max_len: usize,
        budget: u64,
    ) -> Result<Vec<(usize, BigUint)>, AmbiguityError> {
        if self.has_epsilon() {
            return Err(AmbiguityError::Epsilon);
        }
        let mut maxima = vec![BigUint::zero(); max_len + 1];
        let mut visited = 0u64;
        let mut start = vec![BigUint::zero(); self.num_states()];
        start[self.initial] = BigUint::one();
        // Depth-first over words, carrying the run-count vector of the prefix.
        let mut stack = vec![(0usize, start)];
        while let Some((len, counts)) = stack.pop() {
            visited += 1;
            if visited > budget {
                // Maxima seen so far are lower bounds.
                return Err(AmbiguityError::Exhausted(Exhausted {
                    partial: maxima.into_iter().enumerate().collect(),
                    budget,
                }));
            }
            let total = self.accepting_total(&counts);
            if total > maxima[len] {
                maxima[len] = total;
            }
            if len == max_len {
                continue;
            }
            for letter in (0..self.alphabet.len()).rev() {
                stack.push((len + 1, self.advance_counts(&counts, letter)));
            }
        }
        Ok(maxima.into_iter().enumerate().collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AmbiguityError {
    #[error("automaton has epsilon transitions; eliminate them first")]
    Epsilon,
    #[error("{0}")]
    Exhausted(Exhausted<Vec<(usize, BigUint)>>),
}

/// Incremental construction of an [`Nfa`] from named states.
#[derive(Debug, Default, Clone)]
pub struct NfaBuilder {
    states: Vec<String>,
    state_ids: HashMap<String, StateId>,
    alphabet: Vec<Letter>,
    letter_ids: HashMap<Letter, LetterId>,
    transitions: Vec<Transition>,
    seen: BTreeSet<Transition>,
    initial: Option<StateId>,
    finals: BTreeSet<StateId>,
}

impl NfaBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the id of state `name`, creating it if needed.
    pub fn state(&mut self, name: impl Into<String>) -> StateId {
        let name = name.into();
        if let Some(&id) = self.state_ids.get(&name) {
            return id;
        }
        let id = self.states.len();
        self.states.push(name.clone());
        self.state_ids.insert(name, id);
        id
    }

    pub fn letter(&mut self, letter: Letter) -> LetterId {
        if let Some(&id) = self.letter_ids.get(&letter) {
            return id;
        }
        let id = self.alphabet.len();
        self.alphabet.push(letter.clone());
        self.letter_ids.insert(letter, id);
        id
    }

    /// Adds a transition; returns false if it was already present.
    pub fn transition(&mut self, from: StateId, label: Option<Letter>, to: StateId) -> bool {
        let label = label.map(|l| self.letter(l));
        let t = Transition { from, label, to };
        if self.seen.insert(t) {
            self.transitions.push(t);
            true
        } else {
            false
        }
    }

    pub fn set_initial(&mut self, state: StateId) {
        self.initial = Some(state);
    }

    pub fn add_final(&mut self, state: StateId) {
        self.finals.insert(state);
    }

    pub fn build(self) -> Result<Nfa> {
        let initial = self
            .initial
            .ok_or_else(|| Error::Invalid("no initial state".into()))?;
        Nfa::new(
            self.states,
            self.alphabet,
            self.transitions,
            initial,
            self.finals,
        )
    }
}

/// A weighted automaton `(A, λ, μ, ν)`: the value of a word is
/// `λ + min over accepting runs (Σ μ(t) + ν(last state))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedAutomaton {
    nfa: Nfa,
    kind: SemiringKind,
    initial_weight: TropicalValue,
    /// Parallel to `nfa.transitions()`.
    transition_weights: Vec<TropicalValue>,
    final_weights: BTreeMap<StateId, TropicalValue>,
}

impl WeightedAutomaton {
    pub fn new(
        nfa: Nfa,
        kind: SemiringKind,
        initial_weight: TropicalValue,
        transition_weights: Vec<TropicalValue>,
        final_weights: BTreeMap<StateId, TropicalValue>,
    ) -> Result<Self> {
        if transition_weights.len() != nfa.transitions().len() {
            return Err(Error::Invalid(format!(
                "{} transitions but {} weights",
                nfa.transitions().len(),
                transition_weights.len()
            )));
        }
        if !final_weights
            .keys()
            .copied()
            .eq(nfa.finals().iter().copied())
        {
            return Err(Error::Invalid(
                "final weights must be given for exactly the final states".into(),
            ));
        }
        kind.check(&initial_weight)?;
        for w in transition_weights.iter().chain(final_weights.values()) {
            kind.check(w)?;
        }
        Ok(WeightedAutomaton {
            nfa,
            kind,
            initial_weight,
            transition_weights,
            final_weights,
        })
    }

    pub fn nfa(&self) -> &Nfa {
        &self.nfa
    }

    pub fn kind(&self) -> SemiringKind {
        self.kind
    }

    pub fn initial_weight(&self) -> &TropicalValue {
        &self.initial_weight
    }

    pub fn transition_weight(&self, index: usize) -> &TropicalValue {
        &self.transition_weights[index]
    }

    pub fn transition_weights(&self) -> &[TropicalValue] {
        &self.transition_weights
    }

    pub fn final_weights(&self) -> &BTreeMap<StateId, TropicalValue> {
        &self.final_weights
    }

    pub fn final_weight(&self, state: StateId) -> Option<&TropicalValue> {
        self.final_weights.get(&state)
    }

    pub fn is_deterministic(&self) -> bool {
        self.nfa.is_deterministic()
    }

    /// The value of `word`; ∞ when no accepting run exists. ε-transitions
    /// are eliminated first when present.
    pub fn evaluate(&self, word: &[Letter]) -> Result<TropicalValue> {
        if self.nfa.has_epsilon() {
            return self.eliminate_epsilon()?.evaluate(word);
        }
        let mut ids = Vec::with_capacity(word.len());
        for letter in word {
            match self.nfa.letter_id(letter) {
                Some(id) => ids.push(id),
                None => return Ok(TropicalValue::INFINITY),
            }
        }
        Ok(self.evaluate_from(self.nfa.initial(), &ids, self.initial_weight.clone()))
    }

    /// Min-plus forward pass from `start`, which is entered with weight
    /// `entry`. Requires an ε-free automaton.
    pub(crate) fn evaluate_from(
        &self,
        start: StateId,
        word: &[LetterId],
        entry: TropicalValue,
    ) -> TropicalValue {
        let n = self.nfa.num_states();
        let mut current = vec![TropicalValue::INFINITY; n];
        current[start] = entry;
        for &letter in word {
            let mut next = vec![TropicalValue::INFINITY; n];
            let mut alive = false;
            for (state, weight) in current.iter().enumerate() {
                if weight.is_infinite() {
                    continue;
                }
                for &i in self.nfa.outgoing(state) {
                    let t = &self.nfa.transitions()[i];
                    if t.label == Some(letter) {
                        let candidate = weight + &self.transition_weights[i];
                        if candidate < next[t.to] {
                            next[t.to] = candidate;
                            alive = true;
                        }
                    }
                }
            }
            if !alive {
                return TropicalValue::INFINITY;
            }
            current = next;
        }
        self.final_weights
            .iter()
            .map(|(&f, nu)| &current[f] + nu)
            .min()
            .unwrap_or(TropicalValue::INFINITY)
    }

    /// An equivalent ε-free automaton. Each ε-path is folded into the letter
    /// transition that follows it, or into the final weight when it ends in
    /// a final state. States and letter transitions are kept as they are.
    pub fn eliminate_epsilon(&self) -> Result<WeightedAutomaton> {
        if !self.nfa.has_epsilon() {
            return Ok(self.clone());
        }
        let closures = self.epsilon_closures()?;

        let mut builder = WaBuilder::new(self.kind);
        for name in self.nfa.state_names() {
            builder.nfa.state(name.clone());
        }
        for letter in self.nfa.alphabet() {
            builder.nfa.letter(letter.clone());
        }
        builder.nfa.set_initial(self.nfa.initial());
        builder.initial_weight = self.initial_weight.clone();

        for (p, closure) in closures.iter().enumerate() {
            for (&q, reach) in closure {
                for &i in self.nfa.outgoing(q) {
                    let t = &self.nfa.transitions()[i];
                    if let Some(l) = t.label {
                        builder.transition(
                            p,
                            Some(self.nfa.letter(l).clone()),
                            t.to,
                            reach + &self.transition_weights[i],
                        );
                    }
                }
                if let Some(nu) = self.final_weights.get(&q) {
                    builder.final_state(p, reach + nu);
                }
            }
        }
        builder.build()
    }

    /// For every state, the minimal ε-path weight to each state reachable by
    /// ε-moves alone (including itself at weight 0).
    fn epsilon_closures(&self) -> Result<Vec<BTreeMap<StateId, TropicalValue>>> {
        let n = self.nfa.num_states();
        let order = self.epsilon_topological_order()?;
        let mut closures: Vec<BTreeMap<StateId, TropicalValue>> = vec![BTreeMap::new(); n];
        // Reverse topological order: successors are complete before their
        // predecessors.
        for &p in order.iter().rev() {
            let mut closure = BTreeMap::new();
            closure.insert(p, TropicalValue::ZERO);
            for &i in self.nfa.outgoing(p) {
                let t = &self.nfa.transitions()[i];
                if t.label.is_some() {
                    continue;
                }
                let w = &self.transition_weights[i];
                for (&q, d) in &closures[t.to] {
                    let candidate = w + d;
                    let slot = closure.entry(q).or_insert(TropicalValue::INFINITY);
                    if candidate < *slot {
                        *slot = candidate;
                    }
                }
            }
            closures[p] = closure;
        }
        Ok(closures)
    }

    fn epsilon_topological_order(&self) -> Result<Vec<StateId>> {
        let n = self.nfa.num_states();
        let mut indegree = vec![0usize; n];
        for t in self.nfa.transitions() {
            if t.label.is_none() {
                indegree[t.to] += 1;
            }
        }
        let mut ready: Vec<StateId> = (0..n).filter(|&s| indegree[s] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(s) = ready.pop() {
            order.push(s);
            for &i in self.nfa.outgoing(s) {
                let t = &self.nfa.transitions()[i];
                if t.label.is_none() {
                    indegree[t.to] -= 1;
                    if indegree[t.to] == 0 {
                        ready.push(t.to);
                    }
                }
            }
        }
        if order.len() < n {
            let stuck = (0..n).find(|&s| indegree[s] > 0).unwrap_or(0);
            return Err(Error::EpsilonCycle(self.nfa.state_name(stuck).to_string()));
        }
        Ok(order)
    }
}

/// Builds a [`WeightedAutomaton`]; parallel transitions are merged by
/// keeping the smaller weight, repeated final weights likewise.
#[derive(Debug, Clone)]
pub struct WaBuilder {
    pub nfa: NfaBuilder,
    kind: SemiringKind,
    pub initial_weight: TropicalValue,
    weights: HashMap<Transition, TropicalValue>,
    finals: BTreeMap<StateId, TropicalValue>,
}

impl WaBuilder {
    pub fn new(kind: SemiringKind) -> Self {
        WaBuilder {
            nfa: NfaBuilder::new(),
            kind,
            initial_weight: TropicalValue::ZERO,
            weights: HashMap::new(),
            finals: BTreeMap::new(),
        }
    }

    pub fn state(&mut self, name: impl Into<String>) -> StateId {
        self.nfa.state(name)
    }

    pub fn transition(
        &mut self,
        from: StateId,
        label: Option<Letter>,
        to: StateId,
        weight: TropicalValue,
    ) {
        let label_id = label.clone().map(|l| self.nfa.letter(l));
        self.nfa.transition(from, label, to);
        let slot = self
            .weights
            .entry(Transition {
                from,
                label: label_id,
                to,
            })
            .or_insert(TropicalValue::INFINITY);
        if weight < *slot {
            *slot = weight;
        }
    }

    pub fn final_state(&mut self, state: StateId, weight: TropicalValue) {
        self.nfa.add_final(state);
        let slot = self.finals.entry(state).or_insert(TropicalValue::INFINITY);
        if weight < *slot {
            *slot = weight;
        }
    }

    pub fn build(self) -> Result<WeightedAutomaton> {
        let nfa = self.nfa.build()?;
        let weights = nfa
            .transitions()
            .iter()
            .map(|t| self.weights[t].clone())
            .collect();
        WeightedAutomaton::new(nfa, self.kind, self.initial_weight, weights, self.finals)
    }
}
