// SPDX-License-Identifier: Apache-2.0

//! Independent oracles and seeded generators shared by the integration tests.
//!
//! The oracles work on plain `Option<i128>` values (`None` is ∞) and walk the
//! raw transition lists, so they share no evaluation code with the library.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ccra::automata::{Letter, Nfa, Transition, WeightedAutomaton};
use ccra::cra::Cra;
use ccra::semiring::{SemiringKind, TropicalMatrix, TropicalValue};
use ccra::vass::{CounterLetter, CounterOp, Vass, VassBuilder};

pub type Val = Option<i128>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn val(v: &TropicalValue) -> Val {
    if v.is_infinite() {
        None
    } else {
        Some(i128::from(v.to_i64().expect("test values fit in i64")))
    }
}

pub fn add(a: Val, b: Val) -> Val {
    Some(a? + b?)
}

pub fn min(a: Val, b: Val) -> Val {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(x), Some(y)) => Some(x.min(y)),
    }
}

/// All words of length at most `max_len`, shortest first.
pub fn all_words<T: Clone>(alphabet: &[T], max_len: usize) -> Vec<Vec<T>> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for a in alphabet {
                let mut x: Vec<T> = w.clone();
                x.push(a.clone());
                next.push(x);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

fn label_is(nfa: &Nfa, t: &Transition, letter: &Letter) -> bool {
    t.label.map(|l| nfa.letter(l) == letter).unwrap_or(false)
}

/// Minimum over explicitly enumerated accepting runs of an ε-free WA.
pub fn naive_wa_value(w: &WeightedAutomaton, word: &[Letter]) -> Val {
    let nfa = w.nfa();
    assert!(!nfa.has_epsilon(), "oracle needs an ε-free automaton");
    fn go(w: &WeightedAutomaton, state: usize, rest: &[Letter], acc: Val) -> Val {
        let nfa = w.nfa();
        acc?;
        let Some((head, tail)) = rest.split_first() else {
            return w.final_weight(state).and_then(|nu| add(acc, val(nu)));
        };
        let mut best = None;
        for (i, t) in nfa.transitions().iter().enumerate() {
            if t.from == state && label_is(nfa, t, head) {
                best = min(
                    best,
                    go(w, t.to, tail, add(acc, val(w.transition_weight(i)))),
                );
            }
        }
        best
    }
    go(w, nfa.initial(), word, val(w.initial_weight()))
}

/// Number of accepting runs, by explicit enumeration.
pub fn naive_run_count(nfa: &Nfa, word: &[Letter]) -> u64 {
    fn go(nfa: &Nfa, state: usize, rest: &[Letter]) -> u64 {
        let Some((head, tail)) = rest.split_first() else {
            return u64::from(nfa.is_final(state));
        };
        nfa.transitions()
            .iter()
            .filter(|t| t.from == state && label_is(nfa, t, head))
            .map(|t| go(nfa, t.to, tail))
            .sum()
    }
    go(nfa, nfa.initial(), word)
}

/// Register-by-register interpretation of a CRA: `r_j ← min_i (r_i + M[i][j])`
/// with the constant register fixed at 0.
pub fn naive_cra_value(c: &Cra, word: &[Letter]) -> Val {
    let dfa = c.dfa();
    let k = c.k();
    let mut regs: Vec<Val> = c.initial_values().iter().map(val).collect();
    regs.push(Some(0));
    let mut state = dfa.initial();
    for letter in word {
        let idx = dfa
            .transitions()
            .iter()
            .position(|t| t.from == state && label_is(dfa, t, letter))?;
        let m = c.update(idx);
        let next: Vec<Val> = (0..=k)
            .map(|j| (0..=k).fold(None, |acc, i| min(acc, add(regs[i], val(m.get(i, j))))))
            .collect();
        regs = next;
        state = dfa.transitions()[idx].to;
    }
    let nu = c.outputs().get(&state)?;
    (0..=k).fold(None, |acc, i| min(acc, add(regs[i], val(&nu[i]))))
}

/// Direct VASS semantics: `chk` needs 0, `nchk` needs nonzero, counters in ℤ.
pub fn naive_vass_accepts(v: &Vass, word: &[CounterLetter]) -> bool {
    let dfa = v.dfa();
    let mut counters = vec![0i64; v.dimension() + 1];
    let mut state = dfa.initial();
    for &letter in word {
        let Some(t) = dfa
            .transitions()
            .iter()
            .find(|t| t.from == state && label_is(dfa, t, &Letter::Counter(letter)))
        else {
            return false;
        };
        let c = &mut counters[letter.counter];
        match letter.op {
            CounterOp::Inc => *c += 1,
            CounterOp::Dec => *c -= 1,
            CounterOp::Chk if *c != 0 => return false,
            CounterOp::NChk if *c == 0 => return false,
            CounterOp::Chk | CounterOp::NChk => {}
            other => panic!("{other:?} is not a VASS operation"),
        }
        state = t.to;
    }
    state == v.target()
}

fn random_entry(rng: &mut ChaCha8Rng) -> TropicalValue {
    match rng.gen_range(0..4) {
        0 => TropicalValue::INFINITY,
        n => TropicalValue::finite(n - 1),
    }
}

fn random_dfa(
    rng: &mut ChaCha8Rng,
    states: usize,
    alphabet: &[Letter],
    density: f64,
) -> (Vec<String>, Vec<Transition>) {
    let names = (0..states).map(|i| format!("s{i}")).collect();
    let mut transitions = Vec::new();
    for from in 0..states {
        for label in 0..alphabet.len() {
            if rng.gen_bool(density) {
                transitions.push(Transition {
                    from,
                    label: Some(label),
                    to: rng.gen_range(0..states),
                });
            }
        }
    }
    (names, transitions)
}

/// A random ℕ-CRA over `{a, b}` with at most 3 states and 3 registers and
/// entries in `{∞, 0, 1, 2}`. With `copyless`, every register feeds at most
/// one register.
pub fn random_cra(rng: &mut ChaCha8Rng, copyless: bool) -> Cra {
    let alphabet = vec![Letter::sym("a"), Letter::sym("b")];
    let states = rng.gen_range(1..=3);
    let k = rng.gen_range(1..=3);
    let (names, transitions) = random_dfa(rng, states, &alphabet, 0.85);
    let kind = SemiringKind::Nat;
    let mut updates = Vec::new();
    for _ in &transitions {
        let mut rows = vec![vec![TropicalValue::INFINITY; k + 1]; k + 1];
        for row in rows.iter_mut().take(k) {
            if copyless {
                if rng.gen_bool(0.8) {
                    row[rng.gen_range(0..k)] = random_entry(rng);
                }
            } else {
                for entry in row.iter_mut().take(k) {
                    *entry = random_entry(rng);
                }
            }
        }
        for entry in rows[k].iter_mut().take(k) {
            *entry = random_entry(rng);
        }
        rows[k][k] = TropicalValue::ZERO;
        updates.push(TropicalMatrix::from_rows(kind, rows).unwrap());
    }
    let mut outputs = BTreeMap::new();
    for q in 0..states {
        if rng.gen_bool(0.7) {
            outputs.insert(q, (0..=k).map(|_| random_entry(rng)).collect());
        }
    }
    let finals: BTreeSet<usize> = outputs.keys().copied().collect();
    let dfa = Nfa::new(names, alphabet, transitions, 0, finals).unwrap();
    let registers = (1..=k).map(|i| format!("r{i}")).collect();
    let initial = (0..k).map(|_| random_entry(rng)).collect();
    Cra::new(dfa, kind, registers, initial, updates, outputs).unwrap()
}

/// A random ε-free WA over `{a, b}` with at most `max_states` states.
pub fn random_wa(rng: &mut ChaCha8Rng, max_states: usize, kind: SemiringKind) -> WeightedAutomaton {
    let alphabet = vec![Letter::sym("a"), Letter::sym("b")];
    let states = rng.gen_range(1..=max_states);
    let names: Vec<String> = (0..states).map(|i| format!("s{i}")).collect();
    let mut transitions = Vec::new();
    let mut weights = Vec::new();
    let weight = |rng: &mut ChaCha8Rng| match kind {
        SemiringKind::Nat => TropicalValue::finite(rng.gen_range(0..4)),
        SemiringKind::Int => TropicalValue::finite(rng.gen_range(-2..3)),
    };
    for from in 0..states {
        for label in 0..alphabet.len() {
            for to in 0..states {
                if rng.gen_bool(0.4) {
                    transitions.push(Transition {
                        from,
                        label: Some(label),
                        to,
                    });
                    weights.push(weight(rng));
                }
            }
        }
    }
    let mut finals = BTreeMap::new();
    for q in 0..states {
        if rng.gen_bool(0.6) {
            finals.insert(q, weight(rng));
        }
    }
    let dfa = Nfa::new(
        names,
        alphabet,
        transitions,
        0,
        finals.keys().copied().collect(),
    )
    .unwrap();
    WeightedAutomaton::new(dfa, kind, weight(rng), weights, finals).unwrap()
}

/// A random deterministic VASS with `states` states over `C_k`.
pub fn random_vass(rng: &mut ChaCha8Rng, states: usize, k: usize, density: f64) -> Vass {
    let mut b = VassBuilder::new(k);
    let ids: Vec<usize> = (0..states).map(|i| b.state(format!("v{i}"))).collect();
    for &from in &ids {
        for letter in ccra::vass::basic_alphabet(k) {
            if rng.gen_bool(density) {
                b.edge(from, letter, ids[rng.gen_range(0..states)]);
            }
        }
    }
    b.target(ids[rng.gen_range(0..states)]);
    b.build().unwrap()
}

fn hand_built(
    k: usize,
    states: &[&str],
    edges: &[(&str, CounterLetter, &str)],
    target: &str,
) -> Vass {
    let mut b = VassBuilder::new(k);
    for s in states {
        b.state(*s);
    }
    for &(from, letter, to) in edges {
        let (f, t) = (b.state(from), b.state(to));
        b.edge(f, letter, t);
    }
    let t = b.state(target);
    b.target(t);
    b.build().unwrap()
}

/// Twenty VASS with at most four states and dimension at most two: eight
/// written by hand, twelve drawn from a fixed seed.
pub fn vass_suite() -> Vec<(String, Vass)> {
    use CounterLetter as C;
    let mut suite = vec![
        (
            "line".to_string(),
            hand_built(
                1,
                &["q0", "q1", "q2", "q3"],
                &[
                    ("q0", C::inc(1), "q1"),
                    ("q1", C::dec(1), "q2"),
                    ("q2", C::chk(1), "q3"),
                ],
                "q3",
            ),
        ),
        (
            "unbalanced".to_string(),
            hand_built(
                1,
                &["q0", "q1", "q2"],
                &[("q0", C::inc(1), "q1"), ("q1", C::chk(1), "q2")],
                "q2",
            ),
        ),
        (
            "pump".to_string(),
            hand_built(
                1,
                &["q0", "q1", "q2"],
                &[
                    ("q0", C::inc(1), "q0"),
                    ("q0", C::dec(1), "q1"),
                    ("q1", C::dec(1), "q1"),
                    ("q1", C::chk(1), "q2"),
                ],
                "q2",
            ),
        ),
        (
            "free".to_string(),
            hand_built(
                1,
                &["q0"],
                &[
                    ("q0", C::inc(1), "q0"),
                    ("q0", C::dec(1), "q0"),
                    ("q0", C::chk(1), "q0"),
                ],
                "q0",
            ),
        ),
        (
            "only-zero".to_string(),
            hand_built(
                1,
                &["q0", "q1"],
                &[("q0", C::chk(1), "q1"), ("q1", C::inc(1), "q0")],
                "q1",
            ),
        ),
        (
            "transfer".to_string(),
            hand_built(
                2,
                &["q0", "q1", "q2", "q3"],
                &[
                    ("q0", C::inc(1), "q0"),
                    ("q0", C::chk(2), "q1"),
                    ("q1", C::dec(1), "q1"),
                    ("q1", C::inc(2), "q1"),
                    ("q1", C::chk(1), "q2"),
                    ("q2", C::dec(2), "q2"),
                    ("q2", C::chk(2), "q3"),
                ],
                "q3",
            ),
        ),
        (
            "negative".to_string(),
            hand_built(
                2,
                &["q0", "q1", "q2"],
                &[
                    ("q0", C::dec(1), "q0"),
                    ("q0", C::inc(2), "q1"),
                    ("q1", C::chk(1), "q2"),
                ],
                "q2",
            ),
        ),
        (
            "both-zero".to_string(),
            hand_built(
                2,
                &["q0", "q1", "q2"],
                &[
                    ("q0", C::inc(1), "q0"),
                    ("q0", C::inc(2), "q0"),
                    ("q0", C::dec(1), "q0"),
                    ("q0", C::dec(2), "q0"),
                    ("q0", C::chk(1), "q1"),
                    ("q1", C::chk(2), "q2"),
                ],
                "q2",
            ),
        ),
    ];
    let mut r = rng(0x5eed_0005);
    for n in 0..12 {
        let k = 1 + n % 2;
        let states = r.gen_range(2..=4);
        suite.push((format!("random-{n}"), random_vass(&mut r, states, k, 0.45)));
    }
    suite
}
