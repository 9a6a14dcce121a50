#![allow(dead_code)]

use std::path::{Path, PathBuf};

use resonance_bvp::cli::{execute, Execution};

pub fn problems_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("problems")
}

pub fn problem(name: &str) -> PathBuf {
    problems_dir().join(name)
}

/// Runs the command line with `resbvp` prepended.
pub fn cli<S: AsRef<str>>(args: &[S]) -> Execution {
    let argv: Vec<String> = std::iter::once("resbvp".to_string())
        .chain(args.iter().map(|s| s.as_ref().to_string()))
        .collect();
    execute(argv)
}

/// Every shipped problem with the command it is meant for; `{out}` is
/// replaced by an output directory.
pub fn shipped_runs() -> Vec<(String, Vec<String>, i32)> {
    let p = |name: &str| problem(name).display().to_string();
    let runs: Vec<(&str, Vec<String>, i32)> = vec![
        ("fibonacci_periodic", vec!["solve-linear".into(), p("fibonacci_periodic.json")], 0),
        ("identity_resonant", vec!["solve-linear".into(), p("identity_resonant.json")], 0),
        ("inconsistent_multipoint", vec!["solve-linear".into(), p("inconsistent_multipoint.json")], 2),
        ("population_linear", vec!["solve-linear".into(), p("population_initial_mass.json")], 0),
        ("population_nonlinear", vec!["solve-nonlinear".into(), p("population_initial_mass.json")], 0),
        ("rotation_lv", vec!["solve-nonlinear".into(), p("rotation_lv.json")], 0),
        ("gate_fail", vec!["solve-nonlinear".into(), p("gate_fail.json")], 4),
        ("scalar_fold_nonlinear", vec!["solve-nonlinear".into(), p("scalar_fold.json")], 3),
        (
            "scalar_fold_sweep",
            vec![
                "sweep".into(),
                p("scalar_fold.json"),
                "--eps-min".into(),
                "0.005".into(),
                "--eps-max".into(),
                "0.055".into(),
                "--count".into(),
                "6".into(),
            ],
            0,
        ),
        ("fib_check", vec!["fib-check".into(), "--m-max".into(), "20".into()], 0),
    ];
    runs.into_iter().map(|(n, a, c)| (n.to_string(), a, c)).collect()
}

/// Runs one shipped example into `out`.
pub fn run_shipped(args: &[String], out: &Path) -> Execution {
    let mut argv = args.to_vec();
    argv.push("-o".into());
    argv.push(out.display().to_string());
    cli(&argv)
}

/// Sorted `(file name, bytes)` of every file in `dir`.
pub fn dir_contents(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .map(|rd| {
            rd.filter_map(|e| e.ok())
                .filter(|e| e.path().is_file())
                .map(|e| (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap()))
                .collect()
        })
        .unwrap_or_default();
    out.sort();
    out
}
