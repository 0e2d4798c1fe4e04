use std::process::{Command, Output};

use gwsym::Rational;
use serde_json::Value;

fn gwsym(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gwsym")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn golden_brackets() {
    let o = gwsym(&["bracket", "--genus", "1", "--powers", "1"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "1/24\n");

    let o = gwsym(&["bracket", "--genus", "2", "--powers", "4", "--audit"]);
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("1/1152"));
    assert_eq!(text.matches(" 1/720 ").count(), 1);
    assert_eq!(text.matches(" -1/11520 ").count(), 6);
}

#[test]
fn hurwitz_counts() {
    let o = gwsym(&["hurwitz", "--degree", "3", "--classes", "3;2,1;2,1;2,1;2,1;2,1;2,1"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().next(), Some("all=486 transitive=486"));
}

#[test]
fn exit_codes() {
    assert_eq!(gwsym(&["bracket", "--genus", "1", "--powers", "1,0"]).status.code(), Some(2));
    assert_eq!(gwsym(&["bracket", "--genus", "1", "--powers", "x"]).status.code(), Some(2));
    assert_eq!(gwsym(&["bracket", "--genus", "1", "--powers", "1,1", "--poles", "3:2"]).status.code(), Some(2));
    assert_eq!(gwsym(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(gwsym(&["hurwitz", "--degree", "3", "--classes", "2;2"]).status.code(), Some(2));
    assert_eq!(gwsym(&["chartable", "--degree", "9"]).status.code(), Some(2));
    assert_eq!(gwsym(&["verify", "--max-genus", "1", "--max-points", "2"]).status.code(), Some(0));
}

#[test]
fn json_terms_resum_to_the_value() {
    for (g, powers) in [("1", "1,1"), ("1", "2,1,0"), ("2", "4")] {
        let o = gwsym(&["bracket", "--genus", g, "--powers", powers, "--audit", "--format", "json"]);
        assert!(o.status.success());
        let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(doc["schema"], "1");
        assert_eq!(doc["kind"], "bracket");
        let value: Rational = doc["value"].as_str().unwrap().parse().unwrap();
        let sum: Rational = doc["terms"]
            .as_array()
            .unwrap()
            .iter()
            .map(|t| t["contribution"].as_str().unwrap().parse::<Rational>().unwrap())
            .sum();
        assert_eq!(sum, value);
    }
}

#[test]
fn every_subcommand_emits_versioned_json() {
    let runs: [&[&str]; 6] = [
        &["bracket", "--genus", "1", "--powers", "1"],
        &["strata", "--genus", "1", "--powers", "1,1"],
        &["hurwitz", "--degree", "2", "--classes", "2;2"],
        &["chartable", "--degree", "4"],
        &["classalg", "--degree", "3"],
        &["verify", "--max-genus", "1", "--max-points", "1"],
    ];
    for args in runs {
        let mut a = args.to_vec();
        a.extend(["--format", "json"]);
        let o = gwsym(&a);
        assert!(o.status.success(), "{args:?}");
        let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(doc["schema"], "1", "{args:?}");
        assert_eq!(doc["kind"], args[0]);
    }
}

#[test]
fn output_is_independent_of_thread_count() {
    let args = ["bracket", "--genus", "1", "--powers", "1,1,1", "--audit", "--format", "csv"];
    let one = Command::new(env!("CARGO_BIN_EXE_gwsym")).args(args).env("GWSYM_THREADS", "1").output().unwrap();
    let four = Command::new(env!("CARGO_BIN_EXE_gwsym")).args(args).arg("--threads").arg("4").output().unwrap();
    assert!(one.status.success() && four.status.success());
    assert_eq!(one.stdout, four.stdout);
    assert!(stdout(&one).starts_with("key,edges,aut_count,prefactor,chi,contribution\n"));
}

#[test]
fn label_choice_and_pruning_flags() {
    let mut values = Vec::new();
    for extra in [&[][..], &["--poles", "1:1,2:1"], &["--poles", "2:2"], &["--no-prune"]] {
        let mut a = vec!["bracket", "--genus", "1", "--powers", "2,0"];
        a.extend_from_slice(extra);
        values.push(stdout(&gwsym(&a)));
    }
    assert!(values.iter().all(|v| v == "1/24\n"), "{values:?}");
}
