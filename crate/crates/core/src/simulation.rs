// SPDX-License-Identifier: Apache-2.0

//! CCRA that check runs of a ℤ-VASS with zero-tests.
//!
//! The ℤ-simulation keeps `c` and `-c` per counter and folds every zero-test
//! into a `min`, so its output is 0 on correct runs and negative otherwise.
//! The ℕ-simulation works with non-negative registers only; after each
//! zero-test it needs a climb-back block `cb_i^n · chkcb_i` to restore its
//! bookkeeping, and a final block of `z_i` letters to balance counters. A
//! word of `C_k` is a correct run iff exactly one such padding yields an
//! even output.

use std::collections::{BTreeMap, HashMap};

use crate::automata::{Letter, StateId};
use crate::cra::{Cra, CraBuilder, CraConfig, Term, UpdateMatrix};
use crate::error::{Error, Result};
use crate::semiring::{SemiringKind, TropicalValue};
use crate::vass::{CounterLetter, CounterOp, Vass};

fn require_basic(v: &Vass) -> Result<()> {
    if v.uses_nonzero_tests() {
        return Err(Error::Usage(
            "simulations need a VASS without nonzero-tests; eliminate them first".into(),
        ));
    }
    Ok(())
}

/// Register layout of a ℤ-simulation. Counters are 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZSimLayout {
    pub dimension: usize,
    /// Magnitude of one counter step in `rp`/`rn`.
    pub scale: i64,
    /// Present when the machine outputs a counter value.
    pub output: Option<ZOutput>,
}

/// Output-a-counter block: `rh` tracks half the scaled counter, and the
/// letter `z` is read after the run to expose it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZOutput {
    pub counter: usize,
    pub rh: usize,
    pub z: Letter,
}

impl ZSimLayout {
    pub fn rp(&self, i: usize) -> usize {
        3 * (i - 1)
    }

    pub fn rn(&self, i: usize) -> usize {
        3 * (i - 1) + 1
    }

    pub fn rchk(&self, i: usize) -> usize {
        3 * (i - 1) + 2
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZSim {
    pub machine: Cra,
    pub layout: ZSimLayout,
}

/// ℤ-CCRA over `C_k` with output `min_i rchk_i` at the target: 0 on words of
/// the reachability language, negative on other words the DFA accepts.
pub fn build_z_ccra(v: &Vass) -> Result<ZSim> {
    build_z(v, None)
}

/// ℤ-CCRA that outputs 4× the value of `counter` on correct runs: after the
/// run, reading `z^n` gives `min{r + 1, flag + 1, rh}`, which is even for
/// exactly one `n` iff the run was correct.
pub fn build_z_ccra_with_output(v: &Vass, counter: usize) -> Result<ZSim> {
    if counter == 0 || counter > v.dimension() {
        return Err(Error::Usage(format!(
            "counter {counter} out of range 1..={}",
            v.dimension()
        )));
    }
    build_z(v, Some(counter))
}

fn build_z(v: &Vass, output_counter: Option<usize>) -> Result<ZSim> {
    require_basic(v)?;
    let k = v.dimension();
    let scale = if output_counter.is_some() { 4 } else { 1 };
    let mut names = Vec::new();
    for i in 1..=k {
        names.extend([format!("rp{i}"), format!("rn{i}"), format!("rchk{i}")]);
    }
    let output = output_counter.map(|counter| {
        names.push("rh".to_string());
        ZOutput {
            counter,
            rh: 3 * k,
            z: Letter::sym("z"),
        }
    });
    let layout = ZSimLayout {
        dimension: k,
        scale,
        output,
    };
    let dfa = v.dfa();
    let mut b = CraBuilder::new(SemiringKind::Int, names);
    for name in dfa.state_names() {
        b.state(name.clone());
    }
    b.set_initial_state(dfa.initial());
    for letter in dfa.alphabet() {
        b.letter(letter.clone());
    }
    for t in dfa.transitions() {
        let letter = dfa
            .letter(t.label.expect("VASS automata are ε-free"))
            .clone();
        let c = letter
            .as_counter()
            .expect("VASS letters are counter letters");
        let i = c.counter;
        let mut u = b.update();
        let tracked = layout.output.as_ref().filter(|o| o.counter == i);
        match c.op {
            CounterOp::Inc => {
                u.add(layout.rp(i), scale).add(layout.rn(i), -scale);
                if let Some(o) = tracked {
                    u.add(o.rh, scale / 2);
                }
            }
            CounterOp::Dec => {
                u.add(layout.rp(i), -scale).add(layout.rn(i), scale);
                if let Some(o) = tracked {
                    u.add(o.rh, -scale / 2);
                }
            }
            CounterOp::Chk => {
                u.reset(layout.rp(i), 0).reset(layout.rn(i), 0).assign(
                    layout.rchk(i),
                    &[
                        Term::Reg(layout.rchk(i), 0),
                        Term::Reg(layout.rp(i), 0),
                        Term::Reg(layout.rn(i), 0),
                    ],
                );
                if let Some(o) = tracked {
                    u.reset(o.rh, 0);
                }
            }
            _ => unreachable!("checked by require_basic"),
        }
        b.transition(t.from, letter, t.to, u.build());
    }
    let target = v.target();
    match &layout.output {
        None => {
            let terms: Vec<Term> = (1..=k).map(|i| Term::Reg(layout.rchk(i), 0)).collect();
            b.output_terms(target, &terms);
        }
        Some(o) => {
            let zstate = b.state("z");
            let mut u = b.update();
            u.add(o.rh, 2);
            for i in 1..=k {
                u.add(layout.rchk(i), 4);
            }
            let bump = u.build();
            b.transition(target, o.z.clone(), zstate, bump.clone())
                .transition(zstate, o.z.clone(), zstate, bump);
            let mut terms = vec![Term::Reg(layout.rp(o.counter), 1), Term::Reg(o.rh, 0)];
            terms.extend((1..=k).map(|i| Term::Reg(layout.rchk(i), 1)));
            b.output_terms(target, &terms).output_terms(zstate, &terms);
        }
    }
    Ok(ZSim {
        machine: b.build()?,
        layout,
    })
}

/// Register layout of the ℕ-simulation: seven registers per counter at
/// `7·(i−1)`, then `ravg`. Counters are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NSimLayout {
    pub dimension: usize,
    /// The unit `e = 4k`, so that `e/2` and `e/(2k)` are even.
    pub e: i64,
}

/// The seven registers of one simulated counter, read from a valuation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CounterRegisters {
    pub rp: TropicalValue,
    pub rn: TropicalValue,
    pub rupd: TropicalValue,
    pub rhupd: TropicalValue,
    pub rchk: TropicalValue,
    pub rcb: TropicalValue,
    pub rdcb: TropicalValue,
}

impl CounterRegisters {
    fn twice(v: &TropicalValue) -> TropicalValue {
        v + v
    }

    /// `rp = rn = rchk = rhupd = rupd/2` and `rcb = rdcb = 0`.
    pub fn is_ready(&self) -> bool {
        self.rp == self.rn
            && self.rn == self.rchk
            && self.rchk == self.rhupd
            && Self::twice(&self.rhupd) == self.rupd
            && self.rcb == TropicalValue::ZERO
            && self.rdcb == TropicalValue::ZERO
    }

    /// `rp = rn = 0`, `rchk = rhupd = rupd/2` and `rcb = rdcb = 0`.
    pub fn is_to_climb(&self) -> bool {
        self.rp == TropicalValue::ZERO
            && self.rn == TropicalValue::ZERO
            && self.rchk == self.rhupd
            && Self::twice(&self.rhupd) == self.rupd
            && self.rcb == TropicalValue::ZERO
            && self.rdcb == TropicalValue::ZERO
    }

    /// `rchk < rhupd`.
    pub fn is_dead(&self) -> bool {
        self.rchk < self.rhupd
    }
}

impl NSimLayout {
    pub fn new(dimension: usize) -> Self {
        NSimLayout {
            dimension,
            e: 4 * dimension as i64,
        }
    }

    pub fn registers(&self) -> usize {
        7 * self.dimension + 1
    }

    fn base(&self, i: usize) -> usize {
        assert!(
            (1..=self.dimension).contains(&i),
            "counter {i} out of range"
        );
        7 * (i - 1)
    }

    pub fn rp(&self, i: usize) -> usize {
        self.base(i)
    }

    pub fn rn(&self, i: usize) -> usize {
        self.base(i) + 1
    }

    pub fn rupd(&self, i: usize) -> usize {
        self.base(i) + 2
    }

    pub fn rhupd(&self, i: usize) -> usize {
        self.base(i) + 3
    }

    pub fn rchk(&self, i: usize) -> usize {
        self.base(i) + 4
    }

    pub fn rcb(&self, i: usize) -> usize {
        self.base(i) + 5
    }

    pub fn rdcb(&self, i: usize) -> usize {
        self.base(i) + 6
    }

    pub fn ravg(&self) -> usize {
        7 * self.dimension
    }

    /// Increment of `ravg` whenever some `rhupd_i` grows by `e/2`.
    pub fn avg_step(&self) -> i64 {
        self.e / (2 * self.dimension as i64)
    }

    pub fn register_names(&self) -> Vec<String> {
        let mut names = Vec::with_capacity(self.registers());
        for i in 1..=self.dimension {
            for base in ["rp", "rn", "rupd", "rhupd", "rchk", "rcb", "rdcb"] {
                names.push(format!("{base}{i}"));
            }
        }
        names.push("ravg".to_string());
        names
    }

    pub fn counter(&self, registers: &[TropicalValue], i: usize) -> CounterRegisters {
        CounterRegisters {
            rp: registers[self.rp(i)].clone(),
            rn: registers[self.rn(i)].clone(),
            rupd: registers[self.rupd(i)].clone(),
            rhupd: registers[self.rhupd(i)].clone(),
            rchk: registers[self.rchk(i)].clone(),
            rcb: registers[self.rcb(i)].clone(),
            rdcb: registers[self.rdcb(i)].clone(),
        }
    }

    /// Writes one counter's registers into a valuation.
    pub fn set_counter(&self, registers: &mut [TropicalValue], i: usize, c: &CounterRegisters) {
        registers[self.rp(i)] = c.rp.clone();
        registers[self.rn(i)] = c.rn.clone();
        registers[self.rupd(i)] = c.rupd.clone();
        registers[self.rhupd(i)] = c.rhupd.clone();
        registers[self.rchk(i)] = c.rchk.clone();
        registers[self.rcb(i)] = c.rcb.clone();
        registers[self.rdcb(i)] = c.rdcb.clone();
    }

    /// A ready valuation of counter `i` with common value `s`.
    pub fn ready(&self, s: i64) -> CounterRegisters {
        let v = TropicalValue::finite(s);
        CounterRegisters {
            rp: v.clone(),
            rn: v.clone(),
            rupd: TropicalValue::finite(2 * s),
            rhupd: v.clone(),
            rchk: v,
            rcb: TropicalValue::ZERO,
            rdcb: TropicalValue::ZERO,
        }
    }

    /// A to-climb valuation of counter `i` with `rchk = s`.
    pub fn to_climb(&self, s: i64) -> CounterRegisters {
        CounterRegisters {
            rp: TropicalValue::ZERO,
            rn: TropicalValue::ZERO,
            ..self.ready(s)
        }
    }

    /// The update applied by one letter of `C′_k`.
    pub fn update(&self, b: &CraBuilder, letter: CounterLetter) -> UpdateMatrix {
        let e = self.e;
        let i = letter.counter;
        let mut u = b.update();
        match letter.op {
            CounterOp::Inc | CounterOp::Dec => {
                let side = if letter.op == CounterOp::Inc {
                    self.rp(i)
                } else {
                    self.rn(i)
                };
                u.add(side, e)
                    .add(self.rupd(i), e)
                    .add(self.rhupd(i), e / 2)
                    .add(self.rchk(i), e / 2)
                    .add(self.ravg(), self.avg_step());
            }
            CounterOp::Chk => {
                u.reset(self.rp(i), 0).reset(self.rn(i), 0).assign(
                    self.rchk(i),
                    &[
                        Term::Reg(self.rchk(i), 0),
                        Term::Reg(self.rp(i), 0),
                        Term::Reg(self.rn(i), 0),
                    ],
                );
            }
            CounterOp::Cb => {
                u.add(self.rp(i), e)
                    .add(self.rn(i), e)
                    .add(self.rhupd(i), e / 2)
                    .add(self.rchk(i), e / 2)
                    .add(self.rcb(i), e)
                    .add(self.rdcb(i), 2 * e)
                    .add(self.ravg(), self.avg_step());
            }
            CounterOp::ChkCb => {
                u.reset(self.rcb(i), 0)
                    .reset(self.rdcb(i), 0)
                    .assign(self.rupd(i), &[Term::Reg(self.rdcb(i), 0)])
                    .assign(
                        self.rchk(i),
                        &[
                            Term::Reg(self.rchk(i), 0),
                            Term::Reg(self.rcb(i), 0),
                            Term::Reg(self.rupd(i), 0),
                        ],
                    );
            }
            CounterOp::Z => {
                u.add(self.rchk(i), e / 2).add(self.ravg(), self.avg_step());
            }
            CounterOp::NChk => unreachable!("nonzero-tests are not simulated"),
        }
        u.build()
    }

    /// `min{ravg, rchk_1 + 1, …, rchk_k + 1}`.
    pub fn output_terms(&self) -> Vec<Term> {
        let mut terms = vec![Term::Reg(self.ravg(), 0)];
        terms.extend((1..=self.dimension).map(|i| Term::Reg(self.rchk(i), 1)));
        terms
    }
}

/// State roles in the ℕ-simulation's automaton.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NSimState {
    /// A state of the simulated VASS.
    Vass(StateId),
    /// Inside the climb-back block of counter `counter`, returning to `to`.
    Climb { to: StateId, counter: usize },
    /// Reading `z` letters: the last one read was `z_last`, and `skipped`
    /// records whether some smaller index was left out.
    Balance { last: usize, skipped: bool },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NSim {
    pub machine: Cra,
    pub layout: NSimLayout,
    /// Role of each state of `machine`.
    pub roles: Vec<NSimState>,
}

impl NSim {
    pub fn state_of(&self, role: NSimState) -> Option<StateId> {
        self.roles.iter().position(|r| *r == role)
    }
}

/// The ℕ-CCRA over `C′_k` for `v`: a word `w ∈ C_k*` is in the reachability
/// language iff exactly one padding of `w` has an even output.
pub fn build_n_ccra(v: &Vass) -> Result<NSim> {
    require_basic(v)?;
    let k = v.dimension();
    let layout = NSimLayout::new(k);
    let dfa = v.dfa();
    let mut b = CraBuilder::new(SemiringKind::Nat, layout.register_names());
    let mut roles = Vec::new();
    for name in dfa.state_names() {
        let id = b.state(name.clone());
        roles.push(NSimState::Vass(id));
    }
    b.set_initial_state(dfa.initial());
    for i in 1..=k {
        for op in [
            CounterOp::Inc,
            CounterOp::Dec,
            CounterOp::Chk,
            CounterOp::Cb,
            CounterOp::ChkCb,
            CounterOp::Z,
        ] {
            b.letter(Letter::Counter(CounterLetter::new(op, i)));
        }
    }
    let mut climb: BTreeMap<(StateId, usize), StateId> = BTreeMap::new();
    for t in dfa.transitions() {
        let letter = dfa
            .letter(t.label.expect("VASS automata are ε-free"))
            .clone();
        let c = letter
            .as_counter()
            .expect("VASS letters are counter letters");
        let update = layout.update(&b, c);
        if c.op != CounterOp::Chk {
            b.transition(t.from, letter, t.to, update);
            continue;
        }
        let i = c.counter;
        let back = match climb.get(&(t.to, i)) {
            Some(&s) => s,
            None => {
                let s = b.state(format!("{}~cb{i}", dfa.state_name(t.to)));
                roles.push(NSimState::Climb {
                    to: t.to,
                    counter: i,
                });
                climb.insert((t.to, i), s);
                let cb = layout.update(&b, CounterLetter::cb(i));
                let chkcb = layout.update(&b, CounterLetter::chkcb(i));
                b.transition(s, Letter::Counter(CounterLetter::cb(i)), s, cb)
                    .transition(s, Letter::Counter(CounterLetter::chkcb(i)), t.to, chkcb);
                s
            }
        };
        b.transition(t.from, letter, back, update);
    }

    // Balancing suffix: z_1* ⋯ z_k* with at least one index left out.
    let target = v.target();
    let terms = layout.output_terms();
    b.output_terms(target, &terms);
    let mut balance: HashMap<(usize, bool), StateId> = HashMap::new();
    let mut pending = vec![(target, 0usize, false)];
    while let Some((from, last, skipped)) = pending.pop() {
        for i in last.max(1)..=k {
            let next_skipped = skipped || i > last + 1;
            if i == k && !next_skipped {
                continue;
            }
            let to = if i == last {
                from
            } else if let Some(&s) = balance.get(&(i, next_skipped)) {
                s
            } else {
                let s = b.state(format!("z{i}{}", if next_skipped { "'" } else { "" }));
                roles.push(NSimState::Balance {
                    last: i,
                    skipped: next_skipped,
                });
                balance.insert((i, next_skipped), s);
                b.output_terms(s, &terms);
                pending.push((s, i, next_skipped));
                s
            };
            let z = CounterLetter::z(i);
            let update = layout.update(&b, z);
            b.transition(from, Letter::Counter(z), to, update);
        }
    }
    Ok(NSim {
        machine: b.build()?,
        layout,
        roles,
    })
}

/// Erases `cb`, `chkcb` and `z` letters.
pub fn erase_h(word: &[CounterLetter]) -> Vec<CounterLetter> {
    word.iter().copied().filter(|c| c.op.is_basic()).collect()
}

fn value_i64(v: &TropicalValue) -> Result<i64> {
    v.to_i64()
        .ok_or_else(|| Error::Internal(format!("register value {v} out of range")))
}

fn step_counter(
    sim: &NSim,
    config: &CraConfig,
    letter: CounterLetter,
) -> Result<Option<CraConfig>> {
    sim.machine.step(config, &Letter::Counter(letter))
}

/// The padding of an accepted word whose output is even.
pub fn pad_witness(sim: &NSim, v: &Vass, word: &[CounterLetter]) -> Result<Vec<CounterLetter>> {
    if !v.accepts(word) {
        return Err(Error::Usage(format!(
            "`{}` is not in the reachability language",
            crate::vass::format_counter_word(word)
        )));
    }
    let layout = &sim.layout;
    let e = layout.e;
    let blocked = || Error::Internal("simulation automaton blocked on an accepted word".into());
    let mut config = sim.machine.initial_config();
    let mut out = Vec::new();
    for &letter in word {
        config = step_counter(sim, &config, letter)?.ok_or_else(blocked)?;
        out.push(letter);
        if letter.op == CounterOp::Chk {
            let i = letter.counter;
            let s = value_i64(&config.registers[layout.rchk(i)])?;
            for _ in 0..(2 * s / e) {
                config = step_counter(sim, &config, CounterLetter::cb(i))?.ok_or_else(blocked)?;
                out.push(CounterLetter::cb(i));
            }
            config = step_counter(sim, &config, CounterLetter::chkcb(i))?.ok_or_else(blocked)?;
            out.push(CounterLetter::chkcb(i));
        }
    }
    let rchk: Vec<i64> = (1..=layout.dimension)
        .map(|i| value_i64(&config.registers[layout.rchk(i)]))
        .collect::<Result<_>>()?;
    let top = *rchk.iter().max().expect("dimension ≥ 1");
    let j = rchk.iter().position(|&r| r == top).expect("max exists") + 1;
    for i in (1..=layout.dimension).filter(|&i| i != j) {
        for _ in 0..((top - rchk[i - 1]) * 2 / e) {
            out.push(CounterLetter::z(i));
        }
    }
    Ok(out)
}

/// Largest climb-back block tried after a zero-test that leaves `rchk = s`.
pub fn cb_bound(layout: &NSimLayout, s: i64) -> i64 {
    2 * s / layout.e + 2
}

/// Largest count of each `z_i` tried after the run.
pub fn z_bound(layout: &NSimLayout, rchk: &[i64]) -> i64 {
    let hi = rchk.iter().max().copied().unwrap_or(0);
    let lo = rchk.iter().min().copied().unwrap_or(0);
    (hi - lo) * 2 / layout.e + 2
}

/// Every padding of `word` within [`cb_bound`] and [`z_bound`] that the
/// automaton accepts, with its output.
pub fn paddings(
    sim: &NSim,
    word: &[CounterLetter],
) -> Result<Vec<(Vec<CounterLetter>, TropicalValue)>> {
    let mut frontier = vec![(sim.machine.initial_config(), Vec::new())];
    for &letter in word {
        frontier = extend_paddings(sim, frontier, letter)?;
        if frontier.is_empty() {
            return Ok(Vec::new());
        }
    }
    let mut out = Vec::new();
    for (config, padded) in frontier {
        balance_suffixes(sim, &config, padded, &mut out)?;
    }
    Ok(out)
}

type Frontier = Vec<(CraConfig, Vec<CounterLetter>)>;

fn extend_paddings(sim: &NSim, frontier: Frontier, letter: CounterLetter) -> Result<Frontier> {
    let layout = &sim.layout;
    let mut next = Vec::new();
    for (config, padded) in frontier {
        let Some(after) = step_counter(sim, &config, letter)? else {
            continue;
        };
        let mut word = padded;
        word.push(letter);
        if letter.op != CounterOp::Chk {
            next.push((after, word));
            continue;
        }
        let i = letter.counter;
        let bound = cb_bound(layout, value_i64(&after.registers[layout.rchk(i)])?);
        let mut climbing = after;
        let mut climbed = word;
        for n in 0..=bound {
            if n > 0 {
                let Some(c) = step_counter(sim, &climbing, CounterLetter::cb(i))? else {
                    break;
                };
                climbing = c;
                climbed.push(CounterLetter::cb(i));
            }
            if let Some(done) = step_counter(sim, &climbing, CounterLetter::chkcb(i))? {
                let mut w = climbed.clone();
                w.push(CounterLetter::chkcb(i));
                next.push((done, w));
            }
        }
    }
    Ok(next)
}

fn balance_suffixes(
    sim: &NSim,
    config: &CraConfig,
    padded: Vec<CounterLetter>,
    out: &mut Vec<(Vec<CounterLetter>, TropicalValue)>,
) -> Result<()> {
    let layout = &sim.layout;
    let rchk: Vec<i64> = (1..=layout.dimension)
        .map(|i| value_i64(&config.registers[layout.rchk(i)]))
        .collect::<Result<_>>()?;
    let bound = z_bound(layout, &rchk) as usize;
    let mut stack = vec![(config.clone(), padded, 1usize, 0usize)];
    while let Some((config, word, last, run)) = stack.pop() {
        if sim.machine.dfa().is_final(config.state) {
            out.push((word.clone(), sim.machine.output(&config)));
        }
        for i in last..=layout.dimension {
            let run_len = if i == last { run } else { 0 };
            if run_len >= bound {
                continue;
            }
            if let Some(next) = step_counter(sim, &config, CounterLetter::z(i))? {
                let mut w = word.clone();
                w.push(CounterLetter::z(i));
                stack.push((next, w, i, run_len + 1));
            }
        }
    }
    Ok(())
}

/// Paddings of `word` with an even output.
pub fn even_witnesses(sim: &NSim, word: &[CounterLetter]) -> Result<Vec<Vec<CounterLetter>>> {
    Ok(paddings(sim, word)?
        .into_iter()
        .filter(|(_, out)| out.is_even() == Some(true))
        .map(|(w, _)| w)
        .collect())
}

/// A word on which a simulation disagrees with the VASS.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub property: &'static str,
    pub word: Vec<CounterLetter>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SimReport {
    pub words_checked: u64,
    pub accepted: Vec<Vec<CounterLetter>>,
    /// `(word, witness)` for every accepted word.
    pub witnesses: Vec<(Vec<CounterLetter>, Vec<CounterLetter>)>,
    pub failures: Vec<Counterexample>,
}

impl SimReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks both simulations against the VASS on every word of `C_k` up to
/// `max_len` that the VASS automaton can read:
/// the ℤ-simulation outputs at most 0, and 0 exactly on accepted words;
/// the ℕ-simulation has exactly one even padding on accepted words, equal
/// to [`pad_witness`], and none on the others.
pub fn verify_simulation(v: &Vass, max_len: usize) -> Result<SimReport> {
    let z = build_z_ccra(v)?;
    let n = build_n_ccra(v)?;
    for machine in [&z.machine, &n.machine] {
        machine.require_copyless()?;
    }
    let letters = v.letters();
    let mut report = SimReport::default();
    let mut stack: Vec<(Vec<CounterLetter>, CraConfig, Frontier)> = vec![(
        Vec::new(),
        z.machine.initial_config(),
        vec![(n.machine.initial_config(), Vec::new())],
    )];
    while let Some((word, zconfig, frontier)) = stack.pop() {
        report.words_checked += 1;
        let accepted = v.accepts(&word);
        let zout = z.machine.output(&zconfig);
        let fail = |property: &'static str, detail: String| Counterexample {
            property,
            word: word.clone(),
            detail,
        };
        if zout.is_finite() && zout > TropicalValue::ZERO {
            report
                .failures
                .push(fail("z-sim", format!("positive output {zout}")));
        }
        if (zout == TropicalValue::ZERO) != accepted {
            report.failures.push(fail(
                "z-sim",
                format!("output {zout} but accepted = {accepted}"),
            ));
        }
        let mut witnesses = Vec::new();
        for (config, padded) in &frontier {
            let mut outs = Vec::new();
            balance_suffixes(&n, config, padded.clone(), &mut outs)?;
            witnesses.extend(
                outs.into_iter()
                    .filter(|(_, o)| o.is_even() == Some(true))
                    .map(|(w, _)| w),
            );
        }
        if accepted {
            report.accepted.push(word.clone());
            let expected = pad_witness(&n, v, &word)?;
            if witnesses != [expected.clone()] {
                report.failures.push(fail(
                    "n-sim",
                    format!(
                        "expected the single even padding {}, found {}",
                        crate::vass::format_counter_word(&expected),
                        witnesses.len()
                    ),
                ));
            }
            if erase_h(&expected) != word {
                report
                    .failures
                    .push(fail("n-sim", "witness does not erase to the word".into()));
            }
            report.witnesses.push((word.clone(), expected));
        } else if !witnesses.is_empty() {
            report.failures.push(fail(
                "n-sim",
                format!(
                    "rejected word has even padding {}",
                    crate::vass::format_counter_word(&witnesses[0])
                ),
            ));
        }
        if word.len() == max_len {
            continue;
        }
        for &letter in letters.iter().rev() {
            let Some(znext) = z.machine.step(&zconfig, &Letter::Counter(letter))? else {
                continue;
            };
            let next = extend_paddings(&n, frontier.clone(), letter)?;
            let mut w = word.clone();
            w.push(letter);
            stack.push((w, znext, next));
        }
    }
    report
        .accepted
        .sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    report
        .witnesses
        .sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0)));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vass::VassBuilder;

    fn v(n: i64) -> TropicalValue {
        TropicalValue::finite(n)
    }

    fn line3() -> Vass {
        let mut b = VassBuilder::new(1);
        let q0 = b.state("q0");
        let q1 = b.state("q1");
        let q2 = b.state("q2");
        let q3 = b.state("q3");
        b.edge(q0, CounterLetter::inc(1), q1)
            .edge(q1, CounterLetter::dec(1), q2)
            .edge(q2, CounterLetter::chk(1), q3)
            .target(q3);
        b.build().unwrap()
    }

    fn inc_chk() -> Vass {
        let mut b = VassBuilder::new(1);
        let q0 = b.state("q0");
        let q1 = b.state("q1");
        let q2 = b.state("q2");
        b.edge(q0, CounterLetter::inc(1), q1)
            .edge(q1, CounterLetter::chk(1), q2)
            .target(q2);
        b.build().unwrap()
    }

    fn letters(w: &[CounterLetter]) -> Vec<Letter> {
        w.iter().copied().map(Letter::Counter).collect()
    }

    #[test]
    fn z_sim_values() {
        let z = build_z_ccra(&line3()).unwrap();
        assert!(z.machine.check_copyless().is_copyless());
        let w = [
            CounterLetter::inc(1),
            CounterLetter::dec(1),
            CounterLetter::chk(1),
        ];
        assert_eq!(z.machine.evaluate(&letters(&w)).unwrap(), v(0));
        let z = build_z_ccra(&inc_chk()).unwrap();
        let w = [CounterLetter::inc(1), CounterLetter::chk(1)];
        assert_eq!(z.machine.evaluate(&letters(&w)).unwrap(), v(-1));
        assert_eq!(
            z.machine
                .evaluate(&letters(&[CounterLetter::inc(1)]))
                .unwrap(),
            TropicalValue::INFINITY
        );
    }

    fn z_out_config(sim: &ZSim, s: i64, f: i64) -> CraConfig {
        let l = &sim.layout;
        let o = l.output.as_ref().unwrap();
        let mut regs = vec![TropicalValue::ZERO; sim.machine.k()];
        regs[l.rp(o.counter)] = v(s);
        regs[l.rchk(1)] = v(f);
        regs[o.rh] = v(s / 2);
        CraConfig {
            state: sim.machine.dfa().state_id("q3").unwrap(),
            registers: regs,
        }
    }

    #[test]
    fn z_out_curves() {
        let sim = build_z_ccra_with_output(&line3(), 1).unwrap();
        assert!(sim.machine.check_copyless().is_copyless());
        let z = sim.layout.output.as_ref().unwrap().z.clone();
        for (f, expected) in [(0, [1, 4, 5]), (-2, [-1, 3, 5])] {
            let start = z_out_config(&sim, 4, f);
            for (n, want) in expected.iter().enumerate() {
                let word = vec![z.clone(); n];
                assert_eq!(sim.machine.evaluate_from(&start, &word).unwrap(), v(*want));
            }
        }
    }

    #[test]
    fn z_out_reports_scaled_counter() {
        let mut b = VassBuilder::new(1);
        let q0 = b.state("q0");
        b.edge(q0, CounterLetter::inc(1), q0).target(q0);
        let vass = b.build().unwrap();
        let sim = build_z_ccra_with_output(&vass, 1).unwrap();
        let mut word = letters(&[CounterLetter::inc(1); 3]);
        let z = Letter::sym("z");
        let evens: Vec<(usize, TropicalValue)> = (0..8)
            .map(|n| {
                let out = sim.machine.evaluate(&word).unwrap();
                word.push(z.clone());
                (n, out)
            })
            .filter(|(_, out)| out.is_even() == Some(true))
            .collect();
        assert_eq!(evens, vec![(3, v(12))]);
    }

    #[test]
    fn n_sim_witness_for_line() {
        let vass = line3();
        let sim = build_n_ccra(&vass).unwrap();
        assert!(sim.machine.check_copyless().is_copyless());
        let w = [
            CounterLetter::inc(1),
            CounterLetter::dec(1),
            CounterLetter::chk(1),
        ];
        let witness = pad_witness(&sim, &vass, &w).unwrap();
        assert_eq!(
            witness,
            vec![
                CounterLetter::inc(1),
                CounterLetter::dec(1),
                CounterLetter::chk(1),
                CounterLetter::cb(1),
                CounterLetter::cb(1),
                CounterLetter::chkcb(1),
            ]
        );
        assert_eq!(sim.machine.evaluate(&letters(&witness)).unwrap(), v(8));
        assert_eq!(erase_h(&witness), w.to_vec());
        assert_eq!(even_witnesses(&sim, &w).unwrap(), vec![witness]);
    }

    #[test]
    fn n_sim_rejects_bad_zero_test() {
        let vass = inc_chk();
        let sim = build_n_ccra(&vass).unwrap();
        let w = [CounterLetter::inc(1), CounterLetter::chk(1)];
        let all = paddings(&sim, &w).unwrap();
        assert!(!all.is_empty());
        assert!(all.iter().all(|(_, out)| out.is_even() == Some(false)));
        assert!(pad_witness(&sim, &vass, &w).is_err());
    }

    #[test]
    fn erase_h_examples() {
        assert!(erase_h(&[]).is_empty());
        let w = [
            CounterLetter::inc(1),
            CounterLetter::cb(1),
            CounterLetter::cb(1),
            CounterLetter::chkcb(1),
            CounterLetter::z(1),
        ];
        assert_eq!(erase_h(&w), vec![CounterLetter::inc(1)]);
        assert_eq!(erase_h(&erase_h(&w)), erase_h(&w));
    }

    #[test]
    fn balance_shape_two_counters() {
        let mut b = VassBuilder::new(2);
        let q = b.state("q");
        b.edge(q, CounterLetter::inc(1), q).target(q);
        let vass = b.build().unwrap();
        let sim = build_n_ccra(&vass).unwrap();
        let run = |w: &[CounterLetter]| sim.machine.evaluate(&letters(w)).unwrap();
        // z_1 z_2 uses both indices and is rejected; each alone is fine.
        assert!(run(&[CounterLetter::z(1), CounterLetter::z(2)]).is_infinite());
        assert!(run(&[CounterLetter::z(2), CounterLetter::z(1)]).is_infinite());
        assert!(run(&[CounterLetter::z(1), CounterLetter::z(1)]).is_finite());
        assert!(run(&[CounterLetter::z(2)]).is_finite());
        // inc1: rchk = (4, 0) with e = 8, so one z_2 balances it.
        let w = [CounterLetter::inc(1)];
        let witness = pad_witness(&sim, &vass, &w).unwrap();
        assert_eq!(witness, vec![CounterLetter::inc(1), CounterLetter::z(2)]);
        assert_eq!(run(&witness), v(4));
        assert_eq!(even_witnesses(&sim, &w).unwrap().len(), 1);
    }

    #[test]
    fn verify_line_machine() {
        let report = verify_simulation(&line3(), 6).unwrap();
        assert!(report.passed(), "{:?}", report.failures);
        assert_eq!(report.accepted.len(), 1);
        let report = verify_simulation(&inc_chk(), 5).unwrap();
        assert!(report.passed(), "{:?}", report.failures);
        assert!(report.accepted.is_empty());
    }
}
