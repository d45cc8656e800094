// SPDX-License-Identifier: Apache-2.0

//! Normal form of a copyless CRA: a DFA that tracks which registers the last
//! transition set from a constant, jumping nondeterministically into a
//! deterministic WA that follows one register value through its moves.
//!
//! Constants are kept as jump weights rather than normalised to resets to 0,
//! and a register or slot index equal to `k` denotes the virtual register,
//! whose run carries the constant part of the outputs.

use std::collections::{BTreeMap, HashMap};

use crate::automata::{Letter, Nfa, NfaBuilder, StateId, WaBuilder, WeightedAutomaton};
use crate::cra::Cra;
use crate::error::Result;
use crate::semiring::TropicalValue;

/// A prefix state: an original state and the registers freshly set by the
/// transition into it, with their entry constants.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrefixState {
    pub state: StateId,
    pub entries: Vec<(usize, TropicalValue)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    k: usize,
    prefix_dfa: Nfa,
    prefix_states: Vec<PrefixState>,
    det_wa: WeightedAutomaton,
    /// `(original state, register)` for each det WA state.
    det_states: Vec<(StateId, usize)>,
    /// `η`, indexed by prefix state: det WA states with entry weights.
    jump: Vec<Vec<(StateId, TropicalValue)>>,
}

impl Decomposition {
    pub fn prefix_dfa(&self) -> &Nfa {
        &self.prefix_dfa
    }

    pub fn prefix_states(&self) -> &[PrefixState] {
        &self.prefix_states
    }

    pub fn det_wa(&self) -> &WeightedAutomaton {
        &self.det_wa
    }

    pub fn det_states(&self) -> &[(StateId, usize)] {
        &self.det_states
    }

    pub fn jump(&self, prefix_state: StateId) -> &[(StateId, TropicalValue)] {
        &self.jump[prefix_state]
    }

    pub fn registers(&self) -> usize {
        self.k
    }

    /// `min { entry + 𝒲^q(v) | w = uv, (q, entry) ∈ η(q₀.u) }`, evaluated
    /// directly over all factorizations.
    pub fn recombine(&self, word: &[Letter]) -> TropicalValue {
        let mut ids = Vec::with_capacity(word.len());
        for letter in word {
            match (
                self.prefix_dfa.letter_id(letter),
                self.det_wa.nfa().letter_id(letter),
            ) {
                (Some(p), Some(d)) => ids.push((p, d)),
                _ => return TropicalValue::INFINITY,
            }
        }
        let det_ids: Vec<_> = ids.iter().map(|&(_, d)| d).collect();
        let mut best = TropicalValue::INFINITY;
        let mut state = self.prefix_dfa.initial();
        for split in 0..=ids.len() {
            for (q, entry) in &self.jump[state] {
                let value = self
                    .det_wa
                    .evaluate_from(*q, &det_ids[split..], entry.clone());
                best = best.min_with(&value);
            }
            if split == ids.len() {
                break;
            }
            match self.prefix_dfa.step(state, ids[split].0) {
                Some(next) => state = next,
                None => break,
            }
        }
        best
    }
}

fn slot_name(c: &Cra, slot: usize) -> String {
    if slot == c.k() {
        "const".to_string()
    } else {
        c.register_names()[slot].clone()
    }
}

/// Splits a copyless machine into prefix DFA, jumps and deterministic WA.
pub fn decompose(c: &Cra) -> Result<Decomposition> {
    c.require_copyless()?;
    let k = c.k();
    let dfa = c.dfa();
    let with_virtual = c.outputs().values().any(|nu| nu[k].is_finite());
    let slots = if with_virtual { k + 1 } else { k };

    // Deterministic WA over (state, slot).
    let mut wa = WaBuilder::new(c.kind());
    for letter in dfa.alphabet() {
        wa.nfa.letter(letter.clone());
    }
    let mut det_states = Vec::new();
    let mut det_id = HashMap::new();
    for q in 0..dfa.num_states() {
        for slot in 0..slots {
            let id = wa.state(format!("{}.{}", dfa.state_name(q), slot_name(c, slot)));
            det_states.push((q, slot));
            det_id.insert((q, slot), id);
        }
    }
    wa.nfa.set_initial(det_id[&(dfa.initial(), 0)]);
    for (index, t) in dfa.transitions().iter().enumerate() {
        let m = c.update(index);
        let letter = dfa
            .letter(t.label.expect("CRA automata are ε-free"))
            .clone();
        for x in 0..slots {
            let target = if x == k {
                Some(k)
            } else {
                (0..k).find(|&y| m.get(x, y).is_finite())
            };
            if let Some(y) = target {
                wa.transition(
                    det_id[&(t.from, x)],
                    Some(letter.clone()),
                    det_id[&(t.to, y)],
                    m.get(x, y).clone(),
                );
            }
        }
    }
    for (&q, nu) in c.outputs() {
        for (slot, weight) in nu.iter().enumerate().take(slots) {
            if weight.is_finite() {
                wa.final_state(det_id[&(q, slot)], weight.clone());
            }
        }
    }
    let det_wa = wa.build()?;

    // Prefix DFA over (state, entries).
    let mut initial_entries: Vec<(usize, TropicalValue)> = c
        .initial_values()
        .iter()
        .enumerate()
        .filter(|(_, v)| v.is_finite())
        .map(|(i, v)| (i, v.clone()))
        .collect();
    if with_virtual {
        initial_entries.push((k, TropicalValue::ZERO));
    }
    let start = PrefixState {
        state: dfa.initial(),
        entries: initial_entries,
    };
    let mut prefix = NfaBuilder::new();
    for letter in dfa.alphabet() {
        prefix.letter(letter.clone());
    }
    let mut prefix_states: Vec<PrefixState> = Vec::new();
    let mut prefix_id: BTreeMap<PrefixState, StateId> = BTreeMap::new();
    let intern = |p: PrefixState,
                  prefix: &mut NfaBuilder,
                  ids: &mut BTreeMap<PrefixState, StateId>,
                  states: &mut Vec<PrefixState>|
     -> StateId {
        if let Some(&id) = ids.get(&p) {
            return id;
        }
        let entries: Vec<String> = p
            .entries
            .iter()
            .map(|(i, v)| format!("{}={v}", slot_name(c, *i)))
            .collect();
        let id = prefix.state(format!(
            "{}|{{{}}}",
            dfa.state_name(p.state),
            entries.join(",")
        ));
        debug_assert_eq!(id, states.len());
        ids.insert(p.clone(), id);
        states.push(p);
        id
    };
    let start_id = intern(start, &mut prefix, &mut prefix_id, &mut prefix_states);
    prefix.set_initial(start_id);
    // States are numbered in discovery order, so a cursor replaces a queue.
    let mut from = 0;
    while from < prefix_states.len() {
        let state = prefix_states[from].state;
        for &index in dfa.outgoing(state) {
            let t = dfa.transitions()[index];
            let m = c.update(index);
            let entries = (0..k)
                .filter(|&j| m.get(k, j).is_finite())
                .map(|j| (j, m.get(k, j).clone()))
                .collect();
            let next = PrefixState {
                state: t.to,
                entries,
            };
            let to = intern(next, &mut prefix, &mut prefix_id, &mut prefix_states);
            let letter = dfa
                .letter(t.label.expect("CRA automata are ε-free"))
                .clone();
            prefix.transition(from, Some(letter), to);
        }
        from += 1;
    }
    let prefix_dfa = prefix.build()?;
    let jump = prefix_states
        .iter()
        .map(|p| {
            p.entries
                .iter()
                .map(|(slot, weight)| (det_id[&(p.state, *slot)], weight.clone()))
                .collect()
        })
        .collect();
    Ok(Decomposition {
        k,
        prefix_dfa,
        prefix_states,
        det_wa,
        det_states,
        jump,
    })
}

/// The decomposition as a single ε-free weighted automaton: prefix
/// transitions weigh 0 and jumps weigh their entry constant.
pub fn to_linwa(c: &Cra) -> Result<WeightedAutomaton> {
    let d = decompose(c)?;
    decomposition_to_wa(&d)?.eliminate_epsilon()
}

/// Like [`to_linwa`] but with the ε-jumps kept.
pub fn decomposition_to_wa(d: &Decomposition) -> Result<WeightedAutomaton> {
    let prefix = &d.prefix_dfa;
    let det = d.det_wa.nfa();
    let mut wa = WaBuilder::new(d.det_wa.kind());
    for letter in prefix.alphabet() {
        wa.nfa.letter(letter.clone());
    }
    let p_ids: Vec<StateId> = prefix
        .state_names()
        .iter()
        .map(|n| wa.state(format!("A:{n}")))
        .collect();
    let d_ids: Vec<StateId> = det
        .state_names()
        .iter()
        .map(|n| wa.state(format!("W:{n}")))
        .collect();
    wa.nfa.set_initial(p_ids[prefix.initial()]);
    for t in prefix.transitions() {
        let letter = t.label.map(|l| prefix.letter(l).clone());
        wa.transition(p_ids[t.from], letter, p_ids[t.to], TropicalValue::ZERO);
    }
    for (index, t) in det.transitions().iter().enumerate() {
        let letter = t.label.map(|l| det.letter(l).clone());
        wa.transition(
            d_ids[t.from],
            letter,
            d_ids[t.to],
            d.det_wa.transition_weight(index).clone(),
        );
    }
    for (&f, weight) in d.det_wa.final_weights() {
        wa.final_state(d_ids[f], weight.clone());
    }
    for (p, targets) in d.jump.iter().enumerate() {
        for (q, weight) in targets {
            wa.transition(p_ids[p], None, d_ids[*q], weight.clone());
        }
    }
    wa.build()
}
