use std::path::Path;
use std::process::{Command, Output};

use iwasawa_cli::fetch::{parse_payload, FetchError, Fetcher};
use serde_json::Value;

fn iwasawa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_iwasawa"))
        .args(args)
        .env_remove(iwasawa_cli::fetch::ENDPOINT_VAR)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> (Value, i32) {
    let mut all = args.to_vec();
    all.push("--json");
    let out = iwasawa(&all);
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{args:?}: {e}"));
    (v, out.status.code().unwrap())
}

fn sample(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../samples").join(name).to_string_lossy().into_owned()
}

#[test]
fn irregular_indices() {
    let (v, code) = json(&["irregular", "37"]);
    assert_eq!((v["result"]["irregular_indices"].clone(), code), (serde_json::json!([32]), 0));
    let (v, _) = json(&["irregular", "13"]);
    assert_eq!(v["result"]["irregular_indices"], serde_json::json!([]));
    let (v, code) = json(&["irregular", "2"]);
    assert_eq!((v["error"]["kind"].as_str(), code), (Some("usage"), 2));
}

#[test]
fn scan_small_bounds() {
    let (v, code) = json(&["scan", "--max", "10"]);
    assert_eq!((v["result"]["entries"].as_array().unwrap().len(), code), (0, 0));
    let (v, code) = json(&["scan", "--max", "200"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["lambda_at_least_2"], serde_json::json!([157]));
}

#[test]
fn kida_files() {
    let (v, code) = json(&["kida", "--input", &sample("tower_degree1.json")]);
    assert_eq!((v["result"]["lambda_l"].as_u64(), code), (Some(2), 0));
    // 9 (1 - 1 + 2) + 1 - (3 + 1)
    let (v, code) = json(&["kida", "--input", &sample("tower_degree9.json")]);
    assert_eq!((v["result"]["lambda_l"].as_u64(), code), (Some(15), 0));
}

#[test]
fn schema_violations_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(sample("tower_degree1.json")).unwrap();
    for (i, bad) in [text.replace("\"schema\": 1", "\"schema\": 7"), "{ not json".to_string()].iter().enumerate() {
        let path = dir.path().join(format!("bad{i}.json"));
        std::fs::write(&path, bad).unwrap();
        let (v, code) = json(&["kida", "--input", path.to_str().unwrap()]);
        assert_eq!((v["error"]["kind"].as_str(), code), (Some("schema"), 2));
    }
    let unasserted = dir.path().join("theta.json");
    std::fs::write(&unasserted, text.replace("\"theta_ok\": true", "\"theta_ok\": false")).unwrap();
    let (v, code) = json(&["kida", "--input", unasserted.to_str().unwrap()]);
    assert_eq!((v["ok"].as_bool(), code), (Some(false), 1));
}

#[test]
fn rank_modes() {
    let (v, code) = json(&["rank", "--cyclotomic", "157"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["verdict"]["rank"], 1);
    assert_eq!(v["result"]["verdict"]["pseudo_null"], false);
    let (v, _) = json(&["rank", "--lambda", "1", "--delta", "1", "--q-size", "0"]);
    assert_eq!((v["result"]["verdict"]["rank"].as_u64(), v["result"]["verdict"]["pseudo_null"].as_bool()), (Some(0), Some(true)));
    let (_, code) = json(&["rank", "--lambda", "0", "--delta", "1", "--q-size", "0"]);
    assert_eq!(code, 2);
    assert_eq!(iwasawa(&["rank"]).status.code(), Some(2));
}

#[test]
fn selmer_sample_and_fetch_errors() {
    let (v, code) = json(&["selmer", "--input", &sample("selmer.json")]);
    // corank 1 + |M_1| = 1 + 2 |M_2| = 2
    assert_eq!((v["result"]["verdict"]["rank"].as_u64(), code), (Some(4), 0));
    let empty = tempfile::tempdir().unwrap();
    let (v, code) = json(&["selmer", "--label", "11.a2", "--p", "3", "--cache-dir", empty.path().to_str().unwrap()]);
    assert_eq!((v["error"]["kind"].as_str(), code), (Some("fetch"), 3));
}

#[test]
fn cached_label_is_read_offline() {
    let dir = tempfile::tempdir().unwrap();
    let data = parse_payload("11.a2", r#"{"data": [{"prime": 11, "red": 1}]}"#).unwrap();
    let offline = Fetcher { network: false, cache_dir: Some(dir.path().to_path_buf()), endpoint: "http://127.0.0.1:9/{label}".into() };
    offline.store(&data).unwrap();
    assert_eq!(offline.fetch("11.a2").unwrap(), data);
    assert_eq!(offline.fetch("37.a1"), Err(FetchError::Disabled("37.a1".into())));

    let cache = dir.path().to_str().unwrap();
    let run = || json(&["selmer", "--label", "11.a2", "--p", "3", "--ramified", "11", "--corank", "0", "--cache-dir", cache]);
    let (a, code) = run();
    assert_eq!(code, 0);
    assert_eq!(a["result"]["verdict"]["terms"]["m1"], 1);
    assert_eq!(a["result"], run().0["result"]);

    std::fs::write(dir.path().join("bad.json"), "{}").unwrap();
    assert!(matches!(offline.fetch("bad"), Err(FetchError::Cache(_))));
}

#[test]
fn lab_and_growth_commands() {
    let (v, code) = json(&["lab", "fptrivial", "--trials", "200", "--p", "5"]);
    assert_eq!((v["result"]["report"]["failed"].as_u64(), code), (Some(0), 0));
    let (v, code) = json(&["lab", "mptrivial-remark"]);
    assert_eq!((v["result"]["remark"]["stabilized"].as_i64(), code), (Some(1), 0));
    let (v, code) = json(&["growth", "abelian", "--dim", "3", "--gens", "1,0,0;0,1,0", "--levels", "4"]);
    let fit = &v["result"]["growth"]["fit"];
    assert_eq!((fit["e"].as_u64(), fit["c_num"].as_u64(), fit["c_den"].as_u64(), code), (Some(2), Some(1), Some(1), 0));
    assert_eq!(iwasawa(&["growth", "abelian", "--gens", "1,x"]).status.code(), Some(2));
    let (v, code) = json(&["growth", "howson", "--input", &sample("howson_mixed.json")]);
    assert_eq!((v["result"]["modules"][0]["howson"]["r"].as_u64(), code), (Some(1), 0));
}

#[test]
fn output_is_deterministic_across_workers() {
    for args in [&["lab", "herbrand", "--trials", "150"][..], &["scan", "--max", "160"], &["growth", "howson"]] {
        let run = |w: &str| {
            let mut a = args.to_vec();
            a.extend(["--workers", w, "--json"]);
            iwasawa(&a).stdout
        };
        assert_eq!(run("1"), run("8"), "{args:?}");
    }
}
