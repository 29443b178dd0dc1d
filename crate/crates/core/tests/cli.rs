use std::io::Write;
use std::process::Command;

fn hilbert(args: &[&str]) -> (i32, Vec<serde_json::Value>) {
    let out = Command::new(env!("CARGO_BIN_EXE_hilbert")).args(args).output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    let recs = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    (out.status.code().unwrap(), recs)
}

fn config(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

#[test]
fn symbol_with_config_and_oracle() {
    let cfg = config("p = 3\nn = 1\nm = 5\n");
    let path = cfg.path().to_str().unwrap();
    let (code, recs) =
        hilbert(&["symbol", "--config", path, "--F1", "1 + T*pi", "--F2", "1 + 2*T^-1*pi", "--F3", "1 + pi + T*pi", "--oracle"]);
    assert_eq!(code, 0);
    let r = &recs[0];
    assert_eq!(r["record"], "symbol");
    assert_eq!(r["modulus"], 3);
    assert_eq!(r["oracle"]["exponent"], r["exponent"]);
    assert_eq!(r["oracle"]["agrees"], true);
}

#[test]
fn repeated_slot_gives_one() {
    let (code, recs) = hilbert(&["symbol", "--F1", "1 + T*pi", "--F2", "1 + T*pi", "--F3", "1 + T^-1*pi^2"]);
    assert_eq!(code, 0);
    assert_eq!(recs[0]["exponent"], 0);
    assert_eq!(recs[0]["value"], "1");
}

#[test]
fn suite_reports_are_reproducible() {
    let cfg = config("cases = 5\n");
    let path = cfg.path().to_str().unwrap();
    let a = hilbert(&["suite", "--config", path, "--name", "kummer", "--seed", "3"]);
    let b = hilbert(&["suite", "--config", path, "--name", "kummer", "--seed", "3"]);
    assert_eq!(a, b);
    assert_eq!(a.0, 0);
    let last = a.1.last().unwrap();
    assert_eq!(last["record"], "summary");
    assert_eq!(last["passed"], true);
}

#[test]
fn usage_and_config_errors() {
    let (code, recs) = hilbert(&["suite", "--name", "nope", "--seed", "1"]);
    assert_eq!(code, 2);
    assert_eq!(recs[0]["code"], "ConfigError");
    let cfg = config("p = 3\nunknown_key = 1\n");
    let (code, _) = hilbert(&["suite", "--config", cfg.path().to_str().unwrap(), "--name", "operators"]);
    assert_eq!(code, 2);
    let (code, _) = hilbert(&["symbol", "--F1", "1 + pi"]);
    assert_eq!(code, 2);
}
