//! JSON-lines traces: one header line, then one line per round.

use std::io::{BufRead, Write};

use super::engine::{RoundRecord, Trace, TraceHeader};
use super::HarnessError;

pub fn write_trace<W: Write>(trace: &Trace, mut out: W) -> std::io::Result<()> {
    serde_json::to_writer(&mut out, &trace.header)?;
    out.write_all(b"\n")?;
    for rec in &trace.rounds {
        serde_json::to_writer(&mut out, rec)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

pub fn trace_to_string(trace: &Trace) -> String {
    let mut buf = Vec::new();
    write_trace(trace, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("JSON is UTF-8")
}

pub fn read_trace<R: BufRead>(input: R) -> Result<Trace, HarnessError> {
    let mut lines = input.lines().enumerate();
    let parse_err = |line: usize, message: String| HarnessError::TraceParse { line, message };
    let (_, first) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty trace".into()))?;
    let first = first.map_err(|e| parse_err(1, e.to_string()))?;
    let header: TraceHeader = serde_json::from_str(&first).map_err(|e| parse_err(1, e.to_string()))?;
    let mut rounds = Vec::new();
    for (i, line) in lines {
        let line = line.map_err(|e| parse_err(i + 1, e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: RoundRecord = serde_json::from_str(&line).map_err(|e| parse_err(i + 1, e.to_string()))?;
        if rec.round as usize != rounds.len() + 1 {
            return Err(parse_err(i + 1, format!("expected round {}, found {}", rounds.len() + 1, rec.round)));
        }
        rounds.push(rec);
    }
    if rounds.len() != header.horizon as usize {
        return Err(parse_err(
            rounds.len() + 2,
            format!("header announces {} rounds, found {}", header.horizon, rounds.len()),
        ));
    }
    Ok(Trace {
        header,
        rounds,
        approx_states: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::static_line;
    use crate::harness::{run, RunOptions};

    #[test]
    fn round_trip() {
        let s = static_line(4, 12).unwrap();
        let t = run(&s, &RunOptions::recorded()).unwrap();
        let text = trace_to_string(&t);
        assert_eq!(text.lines().count(), 13);
        let back = read_trace(text.as_bytes()).unwrap();
        assert_eq!(back.header, t.header);
        assert_eq!(back.rounds, t.rounds);
        assert_eq!(trace_to_string(&back), text);
    }

    #[test]
    fn truncated_trace_is_rejected() {
        let s = static_line(3, 5).unwrap();
        let text = trace_to_string(&run(&s, &RunOptions::default()).unwrap());
        let cut: String = text.lines().take(4).map(|l| format!("{l}\n")).collect();
        assert!(matches!(read_trace(cut.as_bytes()), Err(HarnessError::TraceParse { .. })));
        let garbled = text.replacen("\"round\":2", "\"round\":7", 1);
        assert!(read_trace(garbled.as_bytes()).is_err());
    }
}
