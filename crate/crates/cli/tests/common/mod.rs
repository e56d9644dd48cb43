#![allow(dead_code)]

use std::path::PathBuf;

/// `(golden name, arguments after the binary name, expected exit code)`.
/// Arguments naming `*.json` files are resolved inside the corpus.
pub const CASES: &[(&str, &[&str], i32)] = &[
    ("wdvv-f0", &["verify", "wdvv", "f0.json"], 0),
    ("wdvv-sol1", &["verify", "wdvv", "sol1.json"], 0),
    ("wdvv-sol1b", &["verify", "wdvv", "sol1b.json"], 0),
    ("wdvv-sol2", &["verify", "wdvv", "sol2.json"], 0),
    ("wdvv-sol1-perturbed", &["verify", "wdvv", "sol1-perturbed.json"], 1),
    ("wdvv-sol1-cubic-perturbed", &["verify", "wdvv", "sol1-cubic-perturbed.json"], 1),
    ("wdvv-sol2-perturbed", &["verify", "wdvv", "sol2-perturbed.json"], 1),
    ("frobenius-sol1", &["verify", "frobenius", "sol1.json"], 0),
    ("frobenius-sol1-perturbed", &["verify", "frobenius", "sol1-perturbed.json"], 1),
    ("submanifold-sol1", &["verify", "submanifold", "sol1-reduced.json"], 0),
    ("submanifold-sol1-cm1", &["verify", "submanifold", "sol1-reduced-cm1.json"], 0),
    ("submanifold-sol2-cm1", &["verify", "submanifold", "sol2.json", "--c=-1"], 0),
    ("submanifold-sol1-perturbed", &["verify", "submanifold", "sol1-perturbed-reduced.json"], 1),
    ("lax-sol1", &["verify", "lax", "sol1-reduced.json"], 0),
    ("lax-sol1-perturbed", &["verify", "lax", "sol1-perturbed-reduced.json"], 1),
    ("hamop-sol1", &["verify", "hamop", "sol1-hamop.json"], 0),
    ("hamop-sol1-reduced", &["verify", "hamop", "sol1-reduced.json"], 0),
    ("hamop-broken", &["verify", "hamop", "sol1-hamop-broken.json"], 1),
    ("hamop-constant", &["verify", "hamop", "constant-hamop.json"], 0),
    ("pencil-sol1", &["verify", "pencil", "sol1-hamop.json"], 0),
    ("pencil-constant", &["verify", "pencil", "constant-hamop.json"], 0),
    ("locality-sol1-h1", &["verify", "locality", "sol1-reduced.json", "--h", "u1*u3 + 1/2*u2^2"], 0),
    ("involution-sol1", &["verify", "involution", "sol1.json"], 0),
    ("involution-sol2", &["verify", "involution", "sol2.json"], 0),
    ("involution-sol1-perturbed", &["verify", "involution", "sol1-perturbed.json"], 1),
    ("involution-sol1-reduced", &["verify", "involution", "sol1-reduced.json"], 0),
    ("potential-involution-f0", &["verify", "potential-involution", "f0.json"], 0),
    ("potential-involution-sol1", &["verify", "potential-involution", "sol1.json"], 1),
    ("hierarchy-sol1", &["hierarchy", "sol1-reduced.json", "--depth", "3"], 0),
    ("hierarchy-sol1-perturbed", &["hierarchy", "sol1-perturbed-reduced.json"], 1),
    ("realize-sol1", &["realize", "sol1-embedding.json"], 0),
    ("loop-sol1", &["loop-test", "sol1-embedding.json"], 0),
    ("loop-sol1-perturbed", &["loop-test", "sol1-perturbed-embedding.json"], 1),
    ("simulate-sol1-w2", &["simulate", "sol1-w2-sim.json", "--flow", "2"], 0),
    ("simulate-translation", &["simulate", "translation-sim.json"], 0),
];

/// `(arguments, fragment expected on standard error)`, all exiting with 2.
pub const INPUT_ERRORS: &[(&[&str], &str)] = &[
    (&["verify", "wdvv", "singular-eta.json"], "/eta"),
    (&["verify", "wdvv", "bad-variable.json"], "/phi: parse error at column 15"),
    (&["verify", "wdvv", "missing-phi.json"], "/phi: missing field"),
    (&["verify", "wdvv", "not-json.json"], "invalid JSON"),
    (&["verify", "wdvv", "no-such-file.json"], "cannot read"),
    (&["verify", "wdvv", "sol1-reduced.json"], "does not accept"),
    (&["simulate", "sol1.json"], "does not accept"),
    (&["simulate", "sol1-w2-sim.json", "--flow", "4"], "--flow"),
    (&["verify", "locality", "sol1-reduced.json", "--h", "u9"], "--h: parse error"),
    (&["verify", "submanifold", "sol1.json", "--c", "0"], "--c"),
    (&["frobnicate", "sol1.json"], "unrecognized subcommand"),
];

pub fn corpus() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

pub fn resolve(args: &[&str]) -> Vec<String> {
    let dir = corpus();
    let mut out = vec!["wdvv".to_string()];
    out.extend(args.iter().map(|a| {
        if a.ends_with(".json") {
            dir.join(a).display().to_string()
        } else {
            a.to_string()
        }
    }));
    out
}

/// Runs the CLI in-process and returns `(exit code, stdout, stderr)`.
pub fn run(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = wdvv_cli::run_cli(resolve(args), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

pub fn golden_path(name: &str) -> PathBuf {
    corpus().join("golden").join(format!("{name}.json"))
}

/// Fresh scratch directory under the system temporary directory.
pub fn scratch(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("wdvv-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
