//! Stage-by-stage solver log. Lines are always collected; the CLI prints them
//! under `--trace`.

use alloc::string::String;
use alloc::vec::Vec;

#[derive(Clone, Debug, Default)]
pub struct Trace {
    lines: Vec<String>,
    clock: Option<fn() -> u64>,
    last: u64,
}

impl Trace {
    pub fn new() -> Self {
        Self::default()
    }

    /// `clock` returns microseconds from any fixed origin.
    pub fn with_clock(clock: fn() -> u64) -> Self {
        Trace { lines: Vec::new(), clock: Some(clock), last: clock() }
    }

    pub fn push(&mut self, line: String) {
        self.lines.push(line);
    }

    /// Records a finished stage with the time since the previous stage line.
    pub fn stage(&mut self, name: &str, detail: &str) {
        let mut s = String::from("stage ");
        s.push_str(name);
        if !detail.is_empty() {
            s.push(' ');
            s.push_str(detail);
        }
        if let Some(c) = self.clock {
            let now = c();
            s.push_str(&alloc::format!(" us={}", now.saturating_sub(self.last)));
            self.last = now;
        }
        self.lines.push(s);
    }

    pub fn lines(&self) -> &[String] {
        &self.lines
    }

    pub fn has_prefix(&self, prefix: &str) -> bool {
        self.lines.iter().any(|l| l.starts_with(prefix))
    }

    pub fn extend(&mut self, other: Trace) {
        self.lines.extend(other.lines);
    }
}
