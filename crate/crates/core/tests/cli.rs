// SPDX-License-Identifier: Apache-2.0

use std::path::{Path, PathBuf};

use ccra::automata::parse_word;
use ccra::cli::{parse_machine, run_cli, Machine};
use ccra::vass::counter_word;

fn machine(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("machines")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run_cli(
        std::iter::once("ccra").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn load(path: &Path) -> Machine {
    parse_machine(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn eval_intro_machine() {
    let intro = machine("intro.json");
    assert_eq!(
        run(&["eval", &intro, "# a # a a #"]),
        (0, "1\n".into(), String::new())
    );
    assert_eq!(run(&["eval", &intro, "# a a #"]).1, "2\n");
    assert_eq!(run(&["eval", &intro, "a"]).1, "inf\n");
    assert_eq!(run(&["eval", &intro, ""]).1, "inf\n");
}

#[test]
fn usage_errors_exit_two() {
    let intro = machine("intro.json");
    assert_eq!(run(&[]).0, 2);
    assert_eq!(run(&["frobnicate"]).0, 2);
    assert_eq!(run(&["eval", &intro]).0, 2);
    let (code, out, err) = run(&["eval", &intro, "# b #"]);
    assert_eq!((code, out.as_str()), (2, ""));
    assert!(err.contains("`b`"), "{err}");
    assert_eq!(run(&["eval", "/nonexistent/machine.json", "a"]).0, 2);
    assert_eq!(run(&["vass-run", &intro, "inc1"]).0, 2);
    assert_eq!(run(&["demo", "doubling", "--s", "3", "--rounds", "2"]).0, 2);
    assert_eq!(run(&["--help"]).0, 0);
}

#[test]
fn copying_machine_fails_the_check() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("copy.json");
    let text = std::fs::read_to_string(machine("intro.json")).unwrap();
    // r1 feeds both registers on `p a q`.
    let copying = text.replacen(r#"["inf", "inf", "inf"],"#, r#"[0, 0, "inf"],"#, 1);
    std::fs::write(&path, copying).unwrap();
    let (code, out, _) = run(&["check-copyless", &path.to_string_lossy()]);
    assert_eq!(code, 1);
    assert!(out.starts_with("not copyless"), "{out}");
}

#[test]
fn to_linwa_preserves_values() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("intro.wa.json");
    let intro = machine("intro.json");
    assert_eq!(
        run(&["to-linwa", &intro, "-o", &out.to_string_lossy()]).0,
        0
    );
    assert!(matches!(load(&out), Machine::Wa(_)));
    for word in ["# a # a a #", "a a #", "# # a #", "a"] {
        assert_eq!(
            run(&["eval", &out.to_string_lossy(), word]).1,
            run(&["eval", &intro, word]).1,
            "{word}"
        );
    }
    let (code, report, _) = run(&["ambiguity", &out.to_string_lossy(), "--max-len", "4"]);
    assert_eq!(code, 0);
    assert_eq!(report.lines().count(), 6);
}

#[test]
fn simulations_from_the_command_line() {
    let dir = tempfile::tempdir().unwrap();
    let line = machine("line3.json");
    for variant in ["z", "z-out", "n"] {
        let out = dir.path().join(format!("{variant}.json"));
        assert_eq!(
            run(&["build-sim", variant, &line, "-o", &out.to_string_lossy()]).0,
            0
        );
        assert_eq!(run(&["check-copyless", &out.to_string_lossy()]).0, 0);
    }
    let n = dir.path().join("n.json");
    let (code, witness, _) = run(&["pad-witness", &line, "inc1 dec1 chk1"]);
    assert_eq!(code, 0);
    let padded = witness.lines().next().unwrap();
    assert_eq!(padded, "inc1 dec1 chk1 cb1 cb1 chkcb1");
    assert_eq!(run(&["eval", &n.to_string_lossy(), padded]).1, "8\n");
    assert_eq!(run(&["pad-witness", &line, "inc1 dec1"]).0, 2);
    let (code, report, _) = run(&["verify-sim", &line, "--max-len", "6"]);
    assert_eq!(code, 0);
    assert!(
        report.contains("witness inc1 dec1 chk1 => inc1 dec1 chk1 cb1 cb1 chkcb1"),
        "{report}"
    );
}

#[test]
fn vass_subcommands() {
    let lockstep = machine("lockstep2.json");
    let (code, trace, _) = run(&["vass-run", &lockstep, "inc1 inc2 dec1 dec2 chk1 chk2"]);
    assert_eq!(code, 0);
    assert!(trace.ends_with("accepted\n"), "{trace}");
    let (_, trace, _) = run(&["vass-run", &lockstep, "inc1 inc2 chk1"]);
    assert!(trace.contains("blocked at letter 3"), "{trace}");
    let (code, words, _) = run(&["vass-lang", &lockstep, "--max-len", "6"]);
    assert_eq!(code, 0);
    let Machine::Vass(v) = load(Path::new(&lockstep)) else {
        panic!()
    };
    let listed: Vec<_> = words
        .lines()
        .map(|w| counter_word(&parse_word(w).unwrap()).unwrap())
        .collect();
    assert_eq!(listed, v.enumerate_language(6).unwrap());
    // Nonzero-tests must be eliminated before simulating.
    assert_eq!(
        run(&["verify-sim", &machine("nonzero.json"), "--max-len", "3"]).0,
        2
    );
}

#[test]
fn reductions_write_machines() {
    let dir = tempfile::tempdir().unwrap();
    let line = machine("line3.json");
    let pair = dir.path().join("pair.json");
    assert_eq!(
        run(&["reduce", "equiv", &line, "-o", &pair.to_string_lossy()]).0,
        0
    );
    for side in ["pair.left.json", "pair.right.json"] {
        assert!(
            matches!(load(&dir.path().join(side)), Machine::Cra(_)),
            "{side}"
        );
    }
    let sl = dir.path().join("sl.json");
    assert_eq!(
        run(&["reduce", "semilinear", &line, "-o", &sl.to_string_lossy()]).0,
        0
    );
    assert_eq!(run(&["check-copyless", &sl.to_string_lossy()]).0, 0);
    let it = dir.path().join("it.json");
    assert_eq!(
        run(&[
            "reduce",
            "iterate",
            &machine("count_a.json"),
            "-o",
            &it.to_string_lossy()
        ])
        .0,
        0
    );
    assert_eq!(run(&["eval", &it.to_string_lossy(), "a b # a a"]).1, "3\n");
    let ub = dir.path().join("ub.json");
    assert_eq!(
        run(&["reduce", "iterate", &line, "-o", &ub.to_string_lossy()]).0,
        0
    );
    assert!(matches!(load(&ub), Machine::Wa(_)));
}

#[test]
fn doubling_demo() {
    let (code, out, _) = run(&["demo", "doubling", "--s", "2", "--rounds", "3"]);
    assert_eq!(code, 0);
    assert_eq!(
        out,
        "round 1: cb^1 chkcb -> 4\nround 2: cb^2 chkcb -> 8\nround 3: cb^4 chkcb -> 16\nmiscounted block cb cb chkcb -> 5\n"
    );
}
