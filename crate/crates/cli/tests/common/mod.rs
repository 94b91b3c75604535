//! The fixed corpus of CLI invocations behind the golden files.

use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::io::Write;

pub struct Case {
    pub name: &'static str,
    pub args: &'static [&'static str],
    pub stdin: Option<&'static str>,
    pub max_n: Option<&'static str>,
    pub exit: i32,
}

const fn case(name: &'static str, args: &'static [&'static str], exit: i32) -> Case {
    Case { name, args, stdin: None, max_n: None, exit }
}

pub const CORPUS: &[Case] = &[
    case("trees_n2", &["trees", "--n", "2"], 0),
    case("trees_n3", &["trees", "--n", "3"], 0),
    case("chains_n3", &["chains", "--n", "3"], 0),
    case("chains_n4_max_dim_0", &["chains", "--n", "4", "--max-dim", "0"], 0),
    case("strata_n3", &["strata", "--n", "3"], 0),
    case("blowup_schedule_n3", &["blowup-schedule", "--n", "3"], 0),
    case("blowup_schedule_n4", &["blowup-schedule", "--n", "4"], 0),
    case("limit_escape", &["limit", "--family", "fixtures/family_escape.json"], 0),
    case("limit_two_scales", &["limit", "--family", "fixtures/family_two_scales.json"], 0),
    case("limit_collision", &["limit", "--family", "fixtures/family_collision.json"], 0),
    Case {
        name: "limit_stdin",
        args: &["limit", "--family", "-"],
        stdin: Some("fixtures/family_escape.json"),
        max_n: None,
        exit: 0,
    },
    case("limit_bad_rational", &["limit", "--family", "fixtures/family_bad_rational.json"], 1),
    case("point_validate_one_level", &["point-validate", "--point", "fixtures/point_one_level.json"], 0),
    case("point_validate_two_levels", &["point-validate", "--point", "fixtures/point_two_levels.json"], 0),
    case("point_validate_broken_cocycle", &["point-validate", "--point", "fixtures/point_broken_cocycle.json"], 1),
    case("point_validate_schema_error", &["point-validate", "--point", "fixtures/point_truncated.json"], 1),
    case("transition_contract_1", &["transition", "--point", "fixtures/point_two_levels.json", "--contract", "1"], 0),
    case("transition_contract_2", &["transition", "--point", "fixtures/point_two_levels.json", "--contract", "2"], 0),
    case("transition_contract_all", &["transition", "--point", "fixtures/point_two_levels.json", "--contract", "1,2"], 0),
    case("transition_outside_overlap", &["transition", "--point", "fixtures/point_limit.json", "--contract", "1"], 1),
    case("transition_bad_level", &["transition", "--point", "fixtures/point_two_levels.json", "--contract", "3"], 1),
    case("period_terminal_pair", &["period", "--point", "fixtures/point_two_levels.json", "--pair", "3,4"], 0),
    case("period_separated_pair", &["period", "--point", "fixtures/point_two_levels.json", "--pair", "4,1"], 0),
    case("period_infinite", &["period", "--point", "fixtures/point_limit.json", "--pair", "1,3"], 0),
    case("chow_n2_hilbert", &["chow", "--n", "2", "--hilbert"], 0),
    case("chow_n3_full", &["chow", "--n", "3", "--hilbert", "--relations"], 0),
    case("chow_n4_hilbert", &["chow", "--n", "4", "--hilbert"], 0),
    case("chow_n6_size_guard", &["chow", "--n", "6", "--hilbert"], 2),
    case("level_structures_two_cherries", &["level-structures", "--tree", "fixtures/tree_two_cherries.json"], 0),
    case("level_structures_cherry_and_leaf", &["level-structures", "--tree", "fixtures/tree_cherry_and_leaf.json"], 0),
    case("act_sigma", &["act", "--point", "fixtures/point_one_level.json", "--sigma", "2,1,3"], 0),
    case("act_translate", &["act", "--point", "fixtures/point_one_level.json", "--translate", "1,-1/2,3"], 0),
    case("act_translate_limit", &["act", "--point", "fixtures/point_limit.json", "--translate", "0,1,2,3"], 0),
    case("xi_limit_point", &["xi", "--point", "fixtures/point_limit.json"], 0),
    case("xi_collided", &["xi", "--point", "fixtures/point_collided.json"], 0),
    case("kappa_collided", &["kappa", "--point", "fixtures/point_collided.json", "--rho", "fixtures/rho_12_34.json"], 0),
    case("kappa_wrong_stratum", &["kappa", "--point", "fixtures/point_collided.json", "--rho", "fixtures/rho_1_23_4.json"], 1),
    case("usage_unknown_flag", &["trees", "--n", "2", "--bogus"], 64),
    case("usage_act_needs_an_action", &["act", "--point", "fixtures/point_one_level.json"], 64),
    Case {
        name: "size_guard_from_env",
        args: &["trees", "--n", "4"],
        stdin: None,
        max_n: Some("3"),
        exit: 2,
    },
];

pub fn tests_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests")
}

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Run {
    /// The byte form kept in a golden file.
    pub fn transcript(&self) -> String {
        format!("exit: {}\n--- stdout\n{}--- stderr\n{}", self.code, self.stdout, self.stderr)
    }
}

pub fn run(args: &[&str], stdin: Option<&str>, max_n: Option<&str>) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_multiscale"));
    cmd.args(args)
        .current_dir(tests_dir())
        .env_remove("MULTISCALE_MAX_N")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped());
    if let Some(m) = max_n {
        cmd.env("MULTISCALE_MAX_N", m);
    }
    let mut child = cmd.spawn().expect("the binary runs");
    {
        let mut pipe = child.stdin.take().expect("piped");
        if let Some(path) = stdin {
            let input = std::fs::read(tests_dir().join(path)).expect("stdin fixture");
            pipe.write_all(&input).expect("write stdin");
        }
    }
    let out = child.wait_with_output().expect("the binary finishes");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).expect("utf-8 stdout"),
        stderr: String::from_utf8(out.stderr).expect("utf-8 stderr"),
    }
}

pub fn run_case(c: &Case) -> Run {
    run(c.args, c.stdin, c.max_n)
}

pub fn golden_path(c: &Case) -> PathBuf {
    tests_dir().join("golden").join(format!("{}.txt", c.name))
}

/// Compares every case with its golden file, returning the mismatches.
/// With `UPDATE_GOLDEN=1` the files are rewritten instead.
pub fn check_corpus() -> Vec<String> {
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    let mut failures = Vec::new();
    for c in CORPUS {
        let first = run_case(c);
        let second = run_case(c);
        if first.transcript() != second.transcript() {
            failures.push(format!("{}: output differs between runs", c.name));
        }
        if first.code != c.exit {
            failures.push(format!("{}: exit {} instead of {}", c.name, first.code, c.exit));
        }
        let path = golden_path(c);
        if update {
            std::fs::write(&path, first.transcript()).expect("write golden");
            continue;
        }
        match std::fs::read_to_string(&path) {
            Ok(expected) if expected == first.transcript() => {}
            Ok(_) => failures.push(format!("{}: output differs from {}", c.name, path.display())),
            Err(_) => failures.push(format!("{}: missing {}", c.name, path.display())),
        }
    }
    failures
}
