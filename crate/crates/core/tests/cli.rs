use std::process::{Command, Output};

use eulerlab_core::{Classification, Verdict};

fn eulerlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eulerlab"))
        .args(args)
        .env("EULERLAB_THREADS", "2")
        .output()
        .expect("run eulerlab")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn classify_json_round_trips() {
    let o = eulerlab(&["classify", "--product", "G(2)", "--sigma", "1,1", "--json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let c: Classification = serde_json::from_str(&text).unwrap();
    assert_eq!(c.verdict, Verdict::Qid);
    assert_eq!(c.sigma, [1.0, 1.0]);
    assert!(text.contains("\"negative_atoms\""));
    assert_eq!(serde_json::to_string_pretty(&c).unwrap() + "\n", text);
}

#[test]
fn witness_fields_survive_json() {
    let o = eulerlab(&["classify", "--product", "Gstar(3)", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let c: Classification = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(c.verdict, Verdict::Nd);
    let w = c.witness.unwrap();
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["witness"]["t"][0].as_f64().unwrap().to_bits(), w.t[0].to_bits());
    assert_eq!(v["witness"]["modulus"].as_f64().unwrap().to_bits(), w.modulus.to_bits());
}

#[test]
fn classify_human_id() {
    let o = eulerlab(&["classify", "--product", "F(2)*G(2)"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("verdict  ID"));
}

#[test]
fn inconclusive_exits_two() {
    let o = eulerlab(&[
        "classify",
        "--product",
        "factor(p=2,alpha=-1/1000000000,a=[1,0])",
        "--witness-budget",
        "100",
    ]);
    assert_eq!(o.status.code(), Some(2), "{}", stdout(&o));
    assert!(stdout(&o).contains("INCONCLUSIVE"));
}

#[test]
fn input_errors_exit_one() {
    let o = eulerlab(&["classify", "--product", "factor(p=2,alpha=2,a=[1,0])"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("alpha"));

    let o = eulerlab(&["eval", "--product", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("position 0"));

    let o = eulerlab(&["eval", "--product", "F(2)*"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("position 5"));

    let o = eulerlab(&["classify", "--product", "F(4)"]);
    assert_eq!(o.status.code(), Some(1));

    let o = eulerlab(&["classify", "--sigma", "1"]);
    assert_eq!(o.status.code(), Some(1));

    let o = eulerlab(&["classify", "--product", "Gsharp(2)", "--sigma", "1,0"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn empty_product_by_omission() {
    let o = eulerlab(&["eval", "--t", "3,4", "--csv"]);
    assert_eq!(o.status.code(), Some(0));
    let lines: Vec<_> = stdout(&o).lines().map(str::to_owned).collect();
    assert_eq!(lines[0], "value_re,value_im,normalized_re,normalized_im,modulus");
    assert!(lines[1].starts_with("1.0000000000000000e0,0.0000000000000000e0"));
}

#[test]
fn expand_emits_alternating_atoms() {
    let o = eulerlab(&["expand", "--product", "Gstar(2)", "--sigma", "1,1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("p,r,a1,a2,coeff_num,coeff_den,weight,x1,x2"));
    for (k, line) in lines.enumerate() {
        let cols: Vec<&str> = line.split(',').collect();
        let r: i32 = cols[1].parse().unwrap();
        assert_eq!(r, k as i32 + 1);
        let num: i64 = cols[4].parse().unwrap();
        let den: i64 = cols[5].parse().unwrap();
        assert_eq!((num, den), (if r % 2 == 0 { 1 } else { -1 }, r as i64));
        let w: f64 = cols[6].parse().unwrap();
        let want = num as f64 / den as f64 * 2f64.powi(-2 * r);
        assert!((w - want).abs() <= 1e-13 * want.abs());
    }
}

#[test]
fn witness_for_g_times_h() {
    let o = eulerlab(&["witness", "--product", "G(2)*H(3)", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["witness"]["modulus"].as_f64().unwrap() > 1.0);
}

#[test]
fn series_outputs() {
    let o = eulerlab(&["series", "--product", "H(2)", "--series-order", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("1,0,-1,1"));

    let o = eulerlab(&["series", "--product", "H(2)", "--distribution"]);
    assert_eq!(o.status.code(), Some(1));

    let o = eulerlab(&["series", "--product", "Gsharp(2)*F(3)"]);
    assert_eq!(o.status.code(), Some(1));

    let o = eulerlab(&["series", "--product", "Gsharp(2)", "--distribution", "--series-order", "8", "--csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("x1,x2,mass\n"));
    assert_eq!(text.lines().count(), 1 + 81);
}

#[test]
fn sample_is_seeded() {
    let args = ["sample", "--product", "F(2)", "-n", "50", "--seed", "3", "--csv"];
    let a = stdout(&eulerlab(&args));
    assert_eq!(a, stdout(&eulerlab(&args)));
    assert_eq!(a.lines().count(), 51);

    let o = eulerlab(&["sample", "--product", "Gstar(2)", "-n", "5"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn out_file_is_written() {
    let path = std::env::temp_dir().join(format!("eulerlab-out-{}.csv", std::process::id()));
    let o = eulerlab(&["expand", "--product", "F(3)", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert!(text.starts_with("p,r,a1,a2"));
}

#[test]
fn reproduce_small_table() {
    let o = eulerlab(&["reproduce", "--primes", "2,3", "--sigmas", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.ends_with(" PASS")).count(), 22);
    assert!(text.ends_with("PASS: 22/22 rows match the expected verdicts\n"));

    let o = eulerlab(&["reproduce", "--primes", "2"]);
    assert_eq!(o.status.code(), Some(1));
}
