use std::io::IsTerminal;

pub const RED: &str = "31";
pub const GREEN: &str = "32";
pub const YELLOW: &str = "33";

/// Wraps `s` in an ANSI colour when stderr is a terminal and NO_COLOR is unset.
pub fn paint(s: &str, code: &str) -> String {
    let off = std::env::var_os("NO_COLOR").is_some_and(|v| !v.is_empty());
    if off || !std::io::stderr().is_terminal() {
        s.to_string()
    } else {
        format!("\x1b[{code}m{s}\x1b[0m")
    }
}
