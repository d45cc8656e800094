// SPDX-License-Identifier: Apache-2.0

//! Cost register automata with `min` and `+c` updates, in matrix form.
//!
//! A machine with `k` registers stores each transition's update as a
//! `(k+1)×(k+1)` matrix `μ`. Entry `(i, j)` is the offset with which register
//! `i` contributes to the new value of register `j`; row `k` holds the
//! constant terms. Index `k` is a virtual register pinned to 0, so column `k`
//! is always `(∞, …, ∞, 0)`.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use crate::automata::{Letter, LetterId, Nfa, NfaBuilder, StateId, Transition};
use crate::error::{Error, Result};
use crate::semiring::{dot, vec_mat_mul, SemiringKind, TropicalMatrix, TropicalValue};

pub type UpdateMatrix = TropicalMatrix;

/// One argument of a `min` in an update or output expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Term {
    /// `r_i + c`, with `i` 0-based.
    Reg(usize, i64),
    /// The constant `c`.
    Const(i64),
}

/// Builds an update matrix column by column, starting from the identity
/// update where every register keeps its value.
#[derive(Debug, Clone)]
pub struct UpdateBuilder {
    kind: SemiringKind,
    k: usize,
    rows: Vec<Vec<TropicalValue>>,
}

impl UpdateBuilder {
    pub fn identity(kind: SemiringKind, k: usize) -> Self {
        UpdateBuilder {
            kind,
            k,
            rows: TropicalMatrix::identity(kind, k + 1).to_rows(),
        }
    }

    /// `r_target ← min(terms)`; an empty list assigns ∞.
    pub fn assign(&mut self, target: usize, terms: &[Term]) -> &mut Self {
        assert!(target < self.k, "register {target} out of range");
        for row in &mut self.rows {
            row[target] = TropicalValue::INFINITY;
        }
        for term in terms {
            let (row, c) = match *term {
                Term::Reg(i, c) => {
                    assert!(i < self.k, "register {i} out of range");
                    (i, c)
                }
                Term::Const(c) => (self.k, c),
            };
            let slot = &mut self.rows[row][target];
            *slot = slot.min_with(&TropicalValue::finite(c));
        }
        self
    }

    /// `r_target ← r_target + c`.
    pub fn add(&mut self, target: usize, c: i64) -> &mut Self {
        self.assign(target, &[Term::Reg(target, c)])
    }

    /// `r_target ← c`.
    pub fn reset(&mut self, target: usize, c: i64) -> &mut Self {
        self.assign(target, &[Term::Const(c)])
    }

    pub fn entry(&mut self, row: usize, col: usize, value: TropicalValue) -> &mut Self {
        self.rows[row][col] = value;
        self
    }

    /// The matrix in the builder's semiring, or in `ℤ∞` when an entry falls
    /// outside it; [`Cra::new`] then rejects it.
    pub fn build(&self) -> UpdateMatrix {
        TropicalMatrix::from_rows(self.kind, self.rows.clone()).unwrap_or_else(|_| {
            TropicalMatrix::from_rows(SemiringKind::Int, self.rows.clone()).expect("square matrix")
        })
    }
}

/// Output column `ν(q)` of length `k + 1` for `min(terms)`.
pub fn output_vector(k: usize, terms: &[Term]) -> Vec<TropicalValue> {
    let mut out = vec![TropicalValue::INFINITY; k + 1];
    for term in terms {
        let (row, c) = match *term {
            Term::Reg(i, c) => (i, c),
            Term::Const(c) => (k, c),
        };
        out[row] = out[row].min_with(&TropicalValue::finite(c));
    }
    out
}

/// A row of an update matrix with more than one finite register entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CopylessViolation {
    pub state: String,
    pub letter: String,
    /// 0-based register whose value is copied.
    pub row: usize,
    /// 0-based registers it feeds.
    pub columns: Vec<usize>,
}

impl fmt::Display for CopylessViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let targets: Vec<String> = self.columns.iter().map(|c| format!("r{}", c + 1)).collect();
        write!(
            f,
            "on ({}, {}) register r{} feeds {}",
            self.state,
            self.letter,
            self.row + 1,
            targets.join(", ")
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CopylessReport {
    pub violations: Vec<CopylessViolation>,
}

impl CopylessReport {
    pub fn is_copyless(&self) -> bool {
        self.violations.is_empty()
    }
}

/// A register valuation at a DFA state. `registers` excludes the virtual one.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CraConfig {
    pub state: StateId,
    pub registers: Vec<TropicalValue>,
}

/// A cost register automaton `(A′, λ⃗, μ, ν)` over a deterministic automaton.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cra {
    dfa: Nfa,
    kind: SemiringKind,
    register_names: Vec<String>,
    initial: Vec<TropicalValue>,
    /// Parallel to `dfa.transitions()`.
    updates: Vec<UpdateMatrix>,
    outputs: BTreeMap<StateId, Vec<TropicalValue>>,
}

impl Cra {
    pub fn new(
        dfa: Nfa,
        kind: SemiringKind,
        register_names: Vec<String>,
        initial: Vec<TropicalValue>,
        updates: Vec<UpdateMatrix>,
        outputs: BTreeMap<StateId, Vec<TropicalValue>>,
    ) -> Result<Self> {
        let k = register_names.len();
        if !dfa.is_deterministic() {
            return Err(Error::Invalid("CRA automaton must be deterministic".into()));
        }
        let mut seen = HashSet::new();
        for name in &register_names {
            if !seen.insert(name) {
                return Err(Error::Invalid(format!("duplicate register `{name}`")));
            }
        }
        if initial.len() != k {
            return Err(Error::Dimension(format!(
                "{k} registers but {} initial values",
                initial.len()
            )));
        }
        for value in &initial {
            kind.check(value)?;
        }
        if updates.len() != dfa.transitions().len() {
            return Err(Error::Invalid(format!(
                "{} transitions but {} update matrices",
                dfa.transitions().len(),
                updates.len()
            )));
        }
        for (t, m) in dfa.transitions().iter().zip(&updates) {
            let at = || describe(&dfa, t);
            if m.rows() != k + 1 || m.cols() != k + 1 {
                return Err(Error::Dimension(format!(
                    "update on {} is {}×{}, expected {}×{}",
                    at(),
                    m.rows(),
                    m.cols(),
                    k + 1,
                    k + 1
                )));
            }
            for row in 0..=k {
                for col in 0..=k {
                    kind.check(m.get(row, col))?;
                }
            }
            for row in 0..=k {
                let expected = if row == k {
                    TropicalValue::ZERO
                } else {
                    TropicalValue::INFINITY
                };
                if *m.get(row, k) != expected {
                    return Err(Error::Invalid(format!(
                        "update on {} must keep the virtual register at 0",
                        at()
                    )));
                }
            }
        }
        if !outputs.keys().copied().eq(dfa.finals().iter().copied()) {
            return Err(Error::Invalid(
                "outputs must be given for exactly the final states".into(),
            ));
        }
        for nu in outputs.values() {
            if nu.len() != k + 1 {
                return Err(Error::Dimension(format!(
                    "output vector of length {}, expected {}",
                    nu.len(),
                    k + 1
                )));
            }
            for value in nu {
                kind.check(value)?;
            }
        }
        // Entries may have been built under the other kind; normalise.
        let updates = updates
            .into_iter()
            .map(|m| TropicalMatrix::from_rows(kind, m.to_rows()))
            .collect::<Result<_>>()?;
        Ok(Cra {
            dfa,
            kind,
            register_names,
            initial,
            updates,
            outputs,
        })
    }

    pub fn dfa(&self) -> &Nfa {
        &self.dfa
    }

    pub fn kind(&self) -> SemiringKind {
        self.kind
    }

    /// Number of real registers `k`.
    pub fn k(&self) -> usize {
        self.register_names.len()
    }

    pub fn register_names(&self) -> &[String] {
        &self.register_names
    }

    pub fn register_index(&self, name: &str) -> Option<usize> {
        self.register_names.iter().position(|n| n == name)
    }

    pub fn initial_values(&self) -> &[TropicalValue] {
        &self.initial
    }

    pub fn updates(&self) -> &[UpdateMatrix] {
        &self.updates
    }

    /// Update of the `index`-th transition of the DFA.
    pub fn update(&self, index: usize) -> &UpdateMatrix {
        &self.updates[index]
    }

    pub fn outputs(&self) -> &BTreeMap<StateId, Vec<TropicalValue>> {
        &self.outputs
    }

    /// Same machine with the output vectors replaced.
    pub fn with_outputs(&self, outputs: BTreeMap<StateId, Vec<TropicalValue>>) -> Result<Cra> {
        Cra::new(
            self.dfa.clone(),
            self.kind,
            self.register_names.clone(),
            self.initial.clone(),
            self.updates.clone(),
            outputs,
        )
    }

    fn encode(&self, word: &[Letter]) -> Result<Vec<LetterId>> {
        word.iter()
            .map(|l| {
                self.dfa
                    .letter_id(l)
                    .ok_or_else(|| Error::UnknownLetter(l.to_string()))
            })
            .collect()
    }

    /// `(λ⃗, 0) · μ(q₀, w₀) ⋯ μ(qₙ, wₙ) · ν(qₙ₊₁)`; ∞ if the DFA rejects.
    pub fn evaluate(&self, word: &[Letter]) -> Result<TropicalValue> {
        let ids = self.encode(word)?;
        let mut vector = self.initial.clone();
        vector.push(TropicalValue::ZERO);
        let mut state = self.dfa.initial();
        for id in ids {
            let Some(t) = self.dfa.step_index(state, id) else {
                return Ok(TropicalValue::INFINITY);
            };
            vector = vec_mat_mul(&vector, &self.updates[t])?;
            state = self.dfa.transitions()[t].to;
        }
        match self.outputs.get(&state) {
            Some(nu) => dot(&vector, nu),
            None => Ok(TropicalValue::INFINITY),
        }
    }

    /// Register-by-register semantics. Returns the output together with the
    /// final valuation, virtual register included; when the DFA rejects, the
    /// valuation is the one reached before blocking.
    pub fn evaluate_operational(
        &self,
        word: &[Letter],
    ) -> Result<(TropicalValue, Vec<TropicalValue>)> {
        let ids = self.encode(word)?;
        let k = self.k();
        let mut regs = self.initial.clone();
        regs.push(TropicalValue::ZERO);
        let mut state = self.dfa.initial();
        for id in ids {
            let Some(t) = self.dfa.step_index(state, id) else {
                return Ok((TropicalValue::INFINITY, regs));
            };
            let m = &self.updates[t];
            let next: Vec<TropicalValue> = (0..=k)
                .map(|i| {
                    let mut best = m.get(k, i).clone();
                    for (j, r) in regs.iter().take(k).enumerate() {
                        let term = r + m.get(j, i);
                        if term < best {
                            best = term;
                        }
                    }
                    best
                })
                .collect();
            self.audit(&next)?;
            regs = next;
            state = self.dfa.transitions()[t].to;
        }
        let out = match self.outputs.get(&state) {
            Some(nu) => {
                let mut best = TropicalValue::INFINITY;
                for (r, c) in regs.iter().zip(nu) {
                    let term = r + c;
                    if term < best {
                        best = term;
                    }
                }
                best
            }
            None => TropicalValue::INFINITY,
        };
        Ok((out, regs))
    }

    // Virtual register pinned to 0, and no escape from ℕ.
    fn audit(&self, regs: &[TropicalValue]) -> Result<()> {
        let k = self.k();
        if regs.len() == k + 1 && regs[k] != TropicalValue::ZERO {
            return Err(Error::Internal(format!(
                "virtual register drifted to {}",
                regs[k]
            )));
        }
        for (i, r) in regs.iter().enumerate() {
            if !self.kind.contains(r) {
                return Err(Error::Internal(format!(
                    "register {} left the {} semiring with value {r}",
                    i + 1,
                    self.kind
                )));
            }
        }
        Ok(())
    }

    pub fn initial_config(&self) -> CraConfig {
        CraConfig {
            state: self.dfa.initial(),
            registers: self.initial.clone(),
        }
    }

    /// One operational step; `None` if the DFA has no transition.
    pub fn step(&self, config: &CraConfig, letter: &Letter) -> Result<Option<CraConfig>> {
        let id = self
            .dfa
            .letter_id(letter)
            .ok_or_else(|| Error::UnknownLetter(letter.to_string()))?;
        Ok(self.step_id(config, id))
    }

    pub(crate) fn step_id(&self, config: &CraConfig, id: LetterId) -> Option<CraConfig> {
        let t = self.dfa.step_index(config.state, id)?;
        let k = self.k();
        let m = &self.updates[t];
        let registers = (0..k)
            .map(|i| {
                let mut best = m.get(k, i).clone();
                for (j, r) in config.registers.iter().enumerate() {
                    let entry = m.get(j, i);
                    if entry.is_infinite() || r.is_infinite() {
                        continue;
                    }
                    let term = r + entry;
                    if term < best {
                        best = term;
                    }
                }
                best
            })
            .collect();
        Some(CraConfig {
            state: self.dfa.transitions()[t].to,
            registers,
        })
    }

    /// Output at `config`; ∞ at non-final states.
    pub fn output(&self, config: &CraConfig) -> TropicalValue {
        let Some(nu) = self.outputs.get(&config.state) else {
            return TropicalValue::INFINITY;
        };
        let k = self.k();
        let mut best = nu[k].clone();
        for (r, c) in config.registers.iter().zip(nu) {
            let term = r + c;
            if term < best {
                best = term;
            }
        }
        best
    }

    /// Runs `word` from an arbitrary configuration and returns the output.
    pub fn evaluate_from(&self, config: &CraConfig, word: &[Letter]) -> Result<TropicalValue> {
        Ok(match self.run_from(config, word)? {
            Some(end) => self.output(&end),
            None => TropicalValue::INFINITY,
        })
    }

    /// Configuration reached from `config`; `None` if the DFA blocks.
    pub fn run_from(&self, config: &CraConfig, word: &[Letter]) -> Result<Option<CraConfig>> {
        let mut current = config.clone();
        for letter in word {
            match self.step(&current, letter)? {
                Some(next) => {
                    self.audit(&next.registers)?;
                    current = next;
                }
                None => return Ok(None),
            }
        }
        Ok(Some(current))
    }

    pub fn check_copyless(&self) -> CopylessReport {
        let k = self.k();
        let mut violations = Vec::new();
        for (t, m) in self.dfa.transitions().iter().zip(&self.updates) {
            for row in 0..k {
                let columns: Vec<usize> = (0..k).filter(|&c| m.get(row, c).is_finite()).collect();
                if columns.len() > 1 {
                    violations.push(CopylessViolation {
                        state: self.dfa.state_name(t.from).to_string(),
                        letter: t
                            .label
                            .map_or_else(|| "ε".to_string(), |l| self.dfa.letter(l).to_string()),
                        row,
                        columns,
                    });
                }
            }
        }
        CopylessReport { violations }
    }

    /// `Err(NotCopyless)` carrying the first violation.
    pub fn require_copyless(&self) -> Result<()> {
        match self.check_copyless().violations.into_iter().next() {
            Some(v) => Err(Error::NotCopyless(v)),
            None => Ok(()),
        }
    }
}

fn describe(dfa: &Nfa, t: &Transition) -> String {
    let letter = t
        .label
        .map_or_else(|| "ε".to_string(), |l| dfa.letter(l).to_string());
    format!("({}, {})", dfa.state_name(t.from), letter)
}

/// Incremental construction of a [`Cra`]. The first state created is initial;
/// registers start at 0 unless set otherwise.
#[derive(Debug, Clone)]
pub struct CraBuilder {
    nfa: NfaBuilder,
    kind: SemiringKind,
    register_names: Vec<String>,
    initial: Vec<TropicalValue>,
    initial_state: Option<StateId>,
    updates: Vec<UpdateMatrix>,
    outputs: BTreeMap<StateId, Vec<TropicalValue>>,
    duplicate: Option<String>,
}

impl CraBuilder {
    pub fn new<S: Into<String>>(
        kind: SemiringKind,
        registers: impl IntoIterator<Item = S>,
    ) -> Self {
        let register_names: Vec<String> = registers.into_iter().map(Into::into).collect();
        let k = register_names.len();
        CraBuilder {
            nfa: NfaBuilder::new(),
            kind,
            register_names,
            initial: vec![TropicalValue::ZERO; k],
            initial_state: None,
            updates: Vec::new(),
            outputs: BTreeMap::new(),
            duplicate: None,
        }
    }

    /// Registers named `r1 … rk`.
    pub fn with_k(kind: SemiringKind, k: usize) -> Self {
        Self::new(kind, (1..=k).map(|i| format!("r{i}")))
    }

    pub fn k(&self) -> usize {
        self.register_names.len()
    }

    pub fn kind(&self) -> SemiringKind {
        self.kind
    }

    pub fn state(&mut self, name: impl Into<String>) -> StateId {
        let id = self.nfa.state(name);
        self.initial_state.get_or_insert(id);
        id
    }

    pub fn set_initial_state(&mut self, state: StateId) -> &mut Self {
        self.initial_state = Some(state);
        self
    }

    pub fn initial_value(&mut self, register: usize, value: TropicalValue) -> &mut Self {
        self.initial[register] = value;
        self
    }

    /// Declares a letter even if no transition reads it.
    pub fn letter(&mut self, letter: Letter) -> &mut Self {
        self.nfa.letter(letter);
        self
    }

    /// A fresh identity update sized for this machine.
    pub fn update(&self) -> UpdateBuilder {
        UpdateBuilder::identity(self.kind, self.k())
    }

    pub fn transition(
        &mut self,
        from: StateId,
        letter: Letter,
        to: StateId,
        update: UpdateMatrix,
    ) -> &mut Self {
        let label = letter.to_string();
        if self.nfa.transition(from, Some(letter), to) {
            self.updates.push(update);
        } else {
            self.duplicate
                .get_or_insert(format!("duplicate transition on `{label}`"));
        }
        self
    }

    pub fn output(&mut self, state: StateId, nu: Vec<TropicalValue>) -> &mut Self {
        self.nfa.add_final(state);
        self.outputs.insert(state, nu);
        self
    }

    pub fn output_terms(&mut self, state: StateId, terms: &[Term]) -> &mut Self {
        let nu = output_vector(self.k(), terms);
        self.output(state, nu)
    }

    pub fn build(mut self) -> Result<Cra> {
        if let Some(message) = self.duplicate {
            return Err(Error::Invalid(message));
        }
        let initial = self
            .initial_state
            .ok_or_else(|| Error::Invalid("CRA has no states".into()))?;
        self.nfa.set_initial(initial);
        Cra::new(
            self.nfa.build()?,
            self.kind,
            self.register_names,
            self.initial,
            self.updates,
            self.outputs,
        )
    }
}

/// The two-state machine computing the length of the shortest nonempty block
/// of `a`'s closed by a `#`, over `{a, #}`.
pub fn intro_minblock_machine() -> Cra {
    let (r1, r2) = (0, 1);
    let mut b = CraBuilder::with_k(SemiringKind::Nat, 2);
    let p = b.state("p");
    let q = b.state("q");
    b.initial_value(r1, TropicalValue::ZERO)
        .initial_value(r2, TropicalValue::INFINITY);
    let hash = Letter::sym("#");
    let a = Letter::sym("a");
    let keep = b.update().build();
    let open = b.update().reset(r1, 1).build();
    let close = b
        .update()
        .reset(r1, 0)
        .assign(r2, &[Term::Reg(r1, 0), Term::Reg(r2, 0)])
        .build();
    let grow = b.update().add(r1, 1).build();
    b.transition(p, hash.clone(), p, keep)
        .transition(p, a.clone(), q, open)
        .transition(q, hash, p, close)
        .transition(q, a, q, grow)
        .output_terms(p, &[Term::Reg(r2, 0)]);
    b.build().expect("intro machine is well formed")
}
