//! Black-box objective served by a child process.
//!
//! The command is started once through `sh -c`. For every evaluation one line
//! of space-separated spins (`1` or `-1`) is written to its stdin and one line
//! holding a number is read back from its stdout.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};

use crate::error::{CliError, Result};

pub struct SubprocessOracle {
    child: Child,
    stdin: ChildStdin,
    stdout: BufReader<ChildStdout>,
    line: String,
}

impl SubprocessOracle {
    pub fn spawn(command: &str) -> Result<Self> {
        let mut child = Command::new("sh")
            .arg("-c")
            .arg(command)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .spawn()
            .map_err(|e| CliError::Solver(format!("cannot start oracle {command:?}: {e}")))?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = BufReader::new(child.stdout.take().expect("piped stdout"));
        Ok(Self {
            child,
            stdin,
            stdout,
            line: String::new(),
        })
    }

    pub fn evaluate(&mut self, spins: &[i8]) -> std::result::Result<f64, String> {
        let msg: Vec<String> = spins.iter().map(|s| s.to_string()).collect();
        writeln!(self.stdin, "{}", msg.join(" "))
            .and_then(|_| self.stdin.flush())
            .map_err(|e| format!("write: {e}"))?;
        self.line.clear();
        let n = self
            .stdout
            .read_line(&mut self.line)
            .map_err(|e| format!("read: {e}"))?;
        if n == 0 {
            return Err("oracle closed its output".into());
        }
        let t = self.line.trim();
        t.parse::<f64>()
            .map_err(|_| format!("oracle replied {t:?}, expected a number"))
    }
}

impl Drop for SubprocessOracle {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}
