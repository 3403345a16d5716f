//! Running an external ASP solver as a child process.

use std::io::{Read, Write};
use std::process::{Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use super::*;
use crate::asp::{emit_text, AspProgram};

/// How to invoke the solver.
///
/// `command` is a template split on whitespace; `{input}` is replaced by the
/// path of a file holding the program and `{models}` by the model cap
/// (0 for all). The program is also written to stdin.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub command: Option<String>,
    pub timeout: Duration,
    pub model_cap: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { command: None, timeout: Duration::from_secs(60), model_cap: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SolveOutcome {
    pub models: Vec<AnswerSet>,
    /// False when the search stopped early (model cap or UNKNOWN).
    pub complete: bool,
}

fn probe(cmd: &[&str]) -> bool {
    Command::new(cmd[0])
        .args(&cmd[1..])
        .stdin(Stdio::null())
        .stdout(Stdio::null())
        .stderr(Stdio::null())
        .status()
        .map(|s| s.success())
        .unwrap_or(false)
}

/// First working solver on this machine: `clingo`, then `python3 -m clingo`.
pub fn detect_solver() -> Option<String> {
    if let Ok(c) = std::env::var("ALMKIT_SOLVER_CMD") {
        if !c.trim().is_empty() {
            return Some(c);
        }
    }
    if probe(&["clingo", "--version"]) {
        return Some("clingo {input} -n {models}".into());
    }
    if probe(&["python3", "-m", "clingo", "--version"]) {
        return Some("python3 -m clingo {input} -n {models}".into());
    }
    None
}

pub fn solve_external(p: &AspProgram, cfg: &SolverConfig) -> Result<SolveOutcome, SolveError> {
    solve_external_text(&emit_text(p), cfg)
}

pub fn solve_external_text(program: &str, cfg: &SolverConfig) -> Result<SolveOutcome, SolveError> {
    let template = match &cfg.command {
        Some(c) => c.clone(),
        None => detect_solver().ok_or(SolveError::NoSolver)?,
    };
    if !template.contains("{input}") {
        return Err(SolveError::BadTemplate(template));
    }
    let mut file = tempfile::Builder::new().suffix(".lp").tempfile()?;
    file.write_all(program.as_bytes())?;
    file.flush()?;
    let path = file.path().to_string_lossy().into_owned();
    let argv: Vec<String> = template
        .split_whitespace()
        .map(|w| w.replace("{input}", &path).replace("{models}", &cfg.model_cap.to_string()))
        .collect();
    let mut child = Command::new(&argv[0])
        .args(&argv[1..])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|source| SolveError::Spawn { command: template.clone(), source })?;

    // A solver that reads the file may never drain stdin; ignore broken pipes.
    let mut stdin = child.stdin.take().expect("piped stdin");
    let text = program.to_string();
    let writer = thread::spawn(move || {
        let _ = stdin.write_all(text.as_bytes());
    });
    let mut stdout = child.stdout.take().expect("piped stdout");
    let mut stderr = child.stderr.take().expect("piped stderr");
    let out_reader = thread::spawn(move || {
        let mut s = String::new();
        let _ = stdout.read_to_string(&mut s);
        s
    });
    let err_reader = thread::spawn(move || {
        let mut s = String::new();
        let _ = stderr.read_to_string(&mut s);
        s
    });

    let start = Instant::now();
    let status = loop {
        if let Some(status) = child.try_wait()? {
            break status;
        }
        if start.elapsed() > cfg.timeout {
            let _ = child.kill();
            let _ = child.wait();
            return Err(SolveError::Timeout { secs: cfg.timeout.as_secs_f64() });
        }
        thread::sleep(Duration::from_millis(5));
    };
    let _ = writer.join();
    let out = out_reader.join().unwrap_or_default();
    let err = err_reader.join().unwrap_or_default();
    parse_output(&out).map_err(|e| match e {
        // clingo exits nonzero on success (10/20/30); only a missing verdict is fatal
        SolveError::Process { .. } => SolveError::Process { status: status.to_string(), stderr: err.trim().to_string() },
        other => other,
    })
}

fn parse_output(out: &str) -> Result<SolveOutcome, SolveError> {
    let mut models = Vec::new();
    let mut verdict = None;
    let mut lines = out.lines();
    while let Some(line) = lines.next() {
        let line = line.trim();
        if line.starts_with("Answer:") {
            let body = lines.next().unwrap_or("").trim();
            let mut atoms = Vec::new();
            for tok in split_atoms(body) {
                let a = GroundAtom::parse(&tok)
                    .ok_or_else(|| SolveError::Parse { line: body.to_string(), message: format!("bad atom `{}`", tok) })?;
                atoms.push(a);
            }
            models.push(AnswerSet::new(atoms));
        } else if line == "SATISFIABLE" || line == "UNSATISFIABLE" || line == "UNKNOWN" {
            verdict = Some(line.to_string());
        }
    }
    let Some(verdict) = verdict else {
        return Err(SolveError::Process { status: String::new(), stderr: String::new() });
    };
    let models_line = out.lines().find(|l| l.trim_start().starts_with("Models"));
    let exhausted = models_line.map_or(true, |l| !l.contains('+'));
    models.sort();
    models.dedup();
    Ok(SolveOutcome { models, complete: verdict != "UNKNOWN" && exhausted })
}

/// Split a model line on spaces outside parentheses and quotes.
fn split_atoms(line: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut depth = 0i32;
    let mut quoted = false;
    for c in line.chars() {
        match c {
            '"' => quoted = !quoted,
            '(' if !quoted => depth += 1,
            ')' if !quoted => depth -= 1,
            ' ' if !quoted && depth == 0 => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
                continue;
            }
            _ => {}
        }
        cur.push(c);
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_clingo_output() {
        let out = "clingo version 5.8.0\nReading from x.lp\nSolving...\nAnswer: 1\na p(1,x)\nAnswer: 2\nb\nSATISFIABLE\n\nModels       : 2\n";
        let o = parse_output(out).unwrap();
        assert_eq!(o.models.len(), 2);
        assert!(o.complete);
        assert_eq!(o.models[0].to_string(), "a p(1,x)");
        let o = parse_output("UNSATISFIABLE\nModels : 0\n").unwrap();
        assert!(o.models.is_empty() && o.complete);
        let o = parse_output("Answer: 1\na\nSATISFIABLE\nModels : 1+\n").unwrap();
        assert!(!o.complete);
        assert!(parse_output("error").is_err());
    }
}
