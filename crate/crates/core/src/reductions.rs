// SPDX-License-Identifier: Apache-2.0

//! Machines that turn a VASS into instances of equivalence, semilinearity
//! and upper-boundedness questions, plus the register-doubling gadget.

use crate::automata::{Letter, WaBuilder, WeightedAutomaton};
use crate::cra::{output_vector, Cra, CraBuilder, Term, UpdateMatrix};
use crate::error::{Error, Result};
use crate::normal_form::to_linwa;
use crate::semiring::{SemiringKind, TropicalMatrix, TropicalValue};
use crate::simulation::{build_n_ccra, build_z_ccra};
use crate::vass::Vass;

/// Two ℕ-CCRA that differ only in their outputs: `left` is the
/// ℕ-simulation and `right` drops `ravg` from its output. They agree on
/// every word iff the reachability language is empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalencePair {
    pub left: Cra,
    pub right: Cra,
}

pub fn equivalence_pair(v: &Vass) -> Result<EquivalencePair> {
    let sim = build_n_ccra(v)?;
    let layout = sim.layout;
    let terms: Vec<Term> = (1..=layout.dimension)
        .map(|i| Term::Reg(layout.rchk(i), 1))
        .collect();
    let nu = output_vector(sim.machine.k(), &terms);
    let outputs = sim
        .machine
        .outputs()
        .keys()
        .map(|&q| (q, nu.clone()))
        .collect();
    let right = sim.machine.with_outputs(outputs)?;
    Ok(EquivalencePair {
        left: sim.machine,
        right,
    })
}

pub fn cb_letter() -> Letter {
    Letter::sym("cb")
}

pub fn chkcb_letter() -> Letter {
    Letter::sym("chkcb")
}

pub fn ell_letter() -> Letter {
    Letter::sym("l")
}

/// Register indices of the doubling gadget inside some machine.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DoublingGadget {
    pub r: usize,
    pub r_prime: usize,
    pub rcb: usize,
    pub rdcb: usize,
}

impl DoublingGadget {
    /// `cb`: `r + 2`, `rcb + 4`, `rdcb + 8`.
    pub fn cb(&self, b: &CraBuilder) -> UpdateMatrix {
        b.update()
            .add(self.r, 2)
            .add(self.rcb, 4)
            .add(self.rdcb, 8)
            .build()
    }

    /// `chkcb`: `rcb ← 0`, `rdcb ← 0`, `r′ ← rdcb`,
    /// `r ← min{r, r′ + 1, rcb + 1}`.
    pub fn chkcb(&self, b: &CraBuilder) -> UpdateMatrix {
        b.update()
            .reset(self.rcb, 0)
            .reset(self.rdcb, 0)
            .assign(self.r_prime, &[Term::Reg(self.rdcb, 0)])
            .assign(
                self.r,
                &[
                    Term::Reg(self.r, 0),
                    Term::Reg(self.r_prime, 1),
                    Term::Reg(self.rcb, 1),
                ],
            )
            .build()
    }
}

/// The gadget alone over `{cb, chkcb}`, with `r = s` and `r′ = 2s`, accepting
/// `(cb*·chkcb)⁺` and outputting `r`. Reading `cb^{r/2}·chkcb` doubles `r`;
/// any other block count makes it odd for good.
pub fn doubling_machine(initial_s: u64) -> Result<Cra> {
    if initial_s == 0 || initial_s % 2 == 1 {
        return Err(Error::Usage(format!(
            "doubling needs an even positive start value, got {initial_s}"
        )));
    }
    let s = i64::try_from(initial_s)
        .map_err(|_| Error::Usage(format!("start value {initial_s} too large")))?;
    let g = DoublingGadget {
        r: 0,
        r_prime: 1,
        rcb: 2,
        rdcb: 3,
    };
    let mut b = CraBuilder::new(SemiringKind::Nat, ["r", "r'", "rcb", "rdcb"]);
    let start = b.state("start");
    let mid = b.state("mid");
    let done = b.state("done");
    b.initial_value(g.r, TropicalValue::finite(s))
        .initial_value(g.r_prime, TropicalValue::finite(2 * s));
    let (cb, chkcb) = (g.cb(&b), g.chkcb(&b));
    for from in [start, mid, done] {
        b.transition(from, cb_letter(), mid, cb.clone()).transition(
            from,
            chkcb_letter(),
            done,
            chkcb.clone(),
        );
    }
    b.output_terms(done, &[Term::Reg(g.r, 0)]);
    b.build()
}

/// Lifts an update of the simulation bank to the combined machine, copying
/// it onto the shadow bank with every offset doubled.
fn lift(m: &UpdateMatrix, n: usize, total: usize, kind: SemiringKind) -> Result<UpdateMatrix> {
    let mut rows = TropicalMatrix::identity(kind, total + 1).to_rows();
    let src = |i: usize| if i == n { total } else { i };
    for i in 0..=n {
        for j in 0..n {
            let entry = m.get(i, j);
            rows[src(i)][j] = entry.clone();
            let shadow_row = if i == n { total } else { n + i };
            rows[shadow_row][n + j] = entry + entry;
        }
    }
    TropicalMatrix::from_rows(kind, rows)
}

/// ℕ-CCRA whose image is the odd numbers if the reachability language of
/// `v` is empty, and the odd numbers together with `{2^i·s | i ≥ 0}` if it
/// is the single word on which the simulation outputs the even value `s`.
///
/// The caller must ensure the language has at most one word; this cannot be
/// checked.
pub fn semilinearity_instance(v: &Vass) -> Result<Cra> {
    let sim = build_n_ccra(v)?;
    let layout = sim.layout;
    let src = &sim.machine;
    let n = src.k();
    let mut names: Vec<String> = src.register_names().to_vec();
    names.extend(src.register_names().iter().map(|r| format!("{r}'")));
    names.extend(["r", "r'", "gcb", "gdcb", "rl"].map(String::from));
    let total = names.len();
    let g = DoublingGadget {
        r: 2 * n,
        r_prime: 2 * n + 1,
        rcb: 2 * n + 2,
        rdcb: 2 * n + 3,
    };
    let rl = 2 * n + 4;
    let kind = SemiringKind::Nat;
    let mut b = CraBuilder::new(kind, names);
    let dfa = src.dfa();
    for name in dfa.state_names() {
        b.state(name.clone());
    }
    b.set_initial_state(dfa.initial());
    for letter in dfa.alphabet() {
        b.letter(letter.clone());
    }
    for (index, t) in dfa.transitions().iter().enumerate() {
        let letter = dfa.letter(t.label.expect("ε-free")).clone();
        b.transition(
            t.from,
            letter,
            t.to,
            lift(src.update(index), n, total, kind)?,
        );
    }

    // Seed: r ← simulation output, r′ ← twice it, simulation banks cleared.
    let mut seed = b.update();
    let mut out_terms = vec![Term::Reg(layout.ravg(), 0)];
    let mut shadow_terms = vec![Term::Reg(n + layout.ravg(), 0)];
    for i in 1..=layout.dimension {
        out_terms.push(Term::Reg(layout.rchk(i), 1));
        shadow_terms.push(Term::Reg(n + layout.rchk(i), 2));
    }
    seed.assign(g.r, &out_terms)
        .assign(g.r_prime, &shadow_terms);
    for reg in 0..2 * n {
        seed.reset(reg, 0);
    }
    seed.reset(g.rcb, 0).reset(g.rdcb, 0);
    let seed = seed.build();
    let (cb, chkcb) = (g.cb(&b), g.chkcb(&b));
    let climbing = b.state("double");
    let doubled = b.state("doubled");
    for &f in dfa.finals() {
        b.transition(f, cb_letter(), climbing, seed.mat_mul(&cb)?)
            .transition(f, chkcb_letter(), doubled, seed.mat_mul(&chkcb)?)
            .output_terms(f, &out_terms);
    }
    for from in [climbing, doubled] {
        b.transition(from, cb_letter(), climbing, cb.clone())
            .transition(from, chkcb_letter(), doubled, chkcb.clone());
    }
    b.output_terms(doubled, &[Term::Reg(g.r, 0)]);

    // Odd numbers: ℓ^n outputs 2n + 1.
    let odd = b.state("odd");
    let step = b.update().add(rl, 2).build();
    b.transition(dfa.initial(), ell_letter(), odd, step.clone())
        .transition(odd, ell_letter(), odd, step)
        .output_terms(odd, &[Term::Reg(rl, 1)]);
    b.build()
}

/// Adds `c` to the initial weight.
pub fn offset_wa(w: &WeightedAutomaton, c: i64) -> Result<WeightedAutomaton> {
    let initial = w.initial_weight() + &TropicalValue::finite(c);
    WeightedAutomaton::new(
        w.nfa().clone(),
        w.kind(),
        initial,
        w.transition_weights().to_vec(),
        w.final_weights().clone(),
    )
}

pub fn hash_letter() -> Letter {
    Letter::sym("#")
}

/// Adds `#` transitions from every final state `q` back to the initial state,
/// weighted `ν(q) + λ`, so that `W′(w₁#⋯#wₙ) = Σ W(wᵢ)`.
pub fn iterate_wa(w: &WeightedAutomaton) -> Result<WeightedAutomaton> {
    let nfa = w.nfa();
    if nfa.letter_id(&hash_letter()).is_some() {
        return Err(Error::Usage("alphabet already contains `#`".into()));
    }
    let mut b = WaBuilder::new(w.kind());
    for letter in nfa.alphabet() {
        b.nfa.letter(letter.clone());
    }
    for name in nfa.state_names() {
        b.state(name.clone());
    }
    b.nfa.set_initial(nfa.initial());
    b.initial_weight = w.initial_weight().clone();
    for (index, t) in nfa.transitions().iter().enumerate() {
        let label = t.label.map(|l| nfa.letter(l).clone());
        b.transition(t.from, label, t.to, w.transition_weight(index).clone());
    }
    for (&q, nu) in w.final_weights() {
        b.final_state(q, nu.clone());
        b.transition(
            q,
            Some(hash_letter()),
            nfa.initial(),
            nu + w.initial_weight(),
        );
    }
    b.build()
}

/// The ℤ-simulation as a weighted automaton shifted by one and iterated:
/// bounded above iff the reachability language of `v` is empty.
pub fn upper_boundedness_instance(v: &Vass) -> Result<WeightedAutomaton> {
    let z = build_z_ccra(v)?;
    iterate_wa(&offset_wa(&to_linwa(&z.machine)?, 1)?)
}
