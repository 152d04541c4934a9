//! Engine log scanning.

use crate::diagnostic::{Diagnostic, DiagnosticKind};

/// Decodes a log file that may be UTF-8 or Latin-1.
pub fn decode_log(bytes: &[u8]) -> String {
    match std::str::from_utf8(bytes) {
        Ok(s) => s.to_owned(),
        Err(_) => bytes.iter().map(|&b| b as char).collect(),
    }
}

/// Leading number of `s`, e.g. `3.0` in `3.0pt too wide`.
fn leading_number(s: &str) -> Option<f64> {
    let end = s
        .find(|c: char| !(c.is_ascii_digit() || c == '.' || c == '-'))
        .unwrap_or(s.len());
    s[..end].parse().ok()
}

/// First line number mentioned as `at line N` or `at lines N--M`.
fn line_number(s: &str) -> Option<usize> {
    let rest = s.split_once("at lines ").or_else(|| s.split_once("at line "))?.1;
    let end = rest.find(|c: char| !c.is_ascii_digit()).unwrap_or(rest.len());
    rest[..end].parse().ok()
}

/// Extracts errors, box warnings and font problems in log order.
///
/// Errors (`! ` lines) carry the two following lines as context and the
/// source line from the `l.N` marker when one follows.
pub fn parse_log(text: &str) -> Vec<Diagnostic> {
    let lines: Vec<&str> = text.lines().collect();
    let mut out = Vec::new();
    for (i, line) in lines.iter().enumerate() {
        if let Some(msg) = line.strip_prefix("! ") {
            let mut d = Diagnostic::error(DiagnosticKind::TexError, msg.trim_end());
            d.context = lines[i + 1..].iter().take(2).map(|l| l.to_string()).collect();
            let marker = lines[i + 1..]
                .iter()
                .take(8)
                .take_while(|l| !l.starts_with("! "))
                .find_map(|l| {
                    let rest = l.strip_prefix("l.")?;
                    let end = rest.find(|c: char| !c.is_ascii_digit()).unwrap_or(rest.len());
                    rest[..end].parse().ok()
                });
            if let Some(n) = marker {
                d = d.with_line(n);
            }
            out.push(d);
        } else if let Some(rest) = line
            .strip_prefix("Overfull \\hbox (")
            .or_else(|| line.strip_prefix("Overfull \\vbox ("))
        {
            let mut d = Diagnostic::warning(DiagnosticKind::OverfullBox, line.trim_end());
            if let Some(v) = leading_number(rest) {
                d = d.with_magnitude(v);
            }
            if let Some(n) = line_number(line) {
                d = d.with_line(n);
            }
            out.push(d);
        } else if let Some(rest) = line
            .strip_prefix("Underfull \\hbox (badness ")
            .or_else(|| line.strip_prefix("Underfull \\vbox (badness "))
        {
            let mut d = Diagnostic::warning(DiagnosticKind::UnderfullBox, line.trim_end());
            if let Some(v) = leading_number(rest) {
                d = d.with_magnitude(v);
            }
            if let Some(n) = line_number(line) {
                d = d.with_line(n);
            }
            out.push(d);
        } else if line.starts_with("Missing character: There is no") {
            out.push(Diagnostic::warning(DiagnosticKind::MissingCharacter, line.trim_end()));
        } else if line.contains("Font Warning: Font shape")
            || line.starts_with("kpathsea: Running mktextfm")
            || line.contains("could not be found")
        {
            out.push(Diagnostic::warning(DiagnosticKind::MissingFont, line.trim_end()));
        }
    }
    out
}

/// Whether the log asks for another run.
pub fn wants_rerun(text: &str) -> bool {
    text.contains("Rerun to get")
        || text.contains("Label(s) may have changed")
        || text.contains("Please rerun")
        || text.contains("Rerun LaTeX")
}
