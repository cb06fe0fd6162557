//! CSV encoding of traces.
//!
//! ```text
//! step,a,b
//! 0,0,0
//! 1,1,0
//! ```
//!
//! The first line names the clocks; each following line is one step, its
//! index, and a `0`/`1` cell per clock. Lines end with `\n`.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use thiserror::Error;

use crate::clock::{Alphabet, ClockError, ClockId, TickSet, Trace};

#[derive(Debug, Error)]
pub enum TraceIoError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("malformed header: {msg} (line 1)")]
    Header { msg: String },
    #[error("cell must be 0 or 1 (line {line})")]
    Cell { line: usize },
    #[error("non-consecutive step index (line {line})")]
    Step { line: usize },
    #[error("row has {found} fields, header has {expected} (line {line})")]
    Ragged {
        line: usize,
        expected: usize,
        found: usize,
    },
}

/// Streams steps to a sink as they are produced.
pub struct TraceWriter<W: Write> {
    sink: W,
    clocks: usize,
    step: u64,
    line: Vec<u8>,
}

impl<W: Write> TraceWriter<W> {
    pub fn new(mut sink: W, alphabet: &Alphabet) -> io::Result<Self> {
        let mut header = String::from("step");
        for c in alphabet.iter() {
            header.push(',');
            header.push_str(c.as_str());
        }
        header.push('\n');
        sink.write_all(header.as_bytes())?;
        Ok(TraceWriter {
            sink,
            clocks: alphabet.len(),
            step: 0,
            line: Vec::with_capacity(2 * alphabet.len() + 8),
        })
    }

    pub fn write_step(&mut self, ticks: &TickSet) -> io::Result<()> {
        self.line.clear();
        write!(self.line, "{}", self.step)?;
        for c in 0..self.clocks {
            self.line.push(b',');
            self.line.push(if ticks.contains(c) { b'1' } else { b'0' });
        }
        self.line.push(b'\n');
        self.sink.write_all(&self.line)?;
        self.step += 1;
        Ok(())
    }

    pub fn steps_written(&self) -> u64 {
        self.step
    }

    /// Flushes and returns the sink.
    pub fn finish(mut self) -> io::Result<W> {
        self.sink.flush()?;
        Ok(self.sink)
    }
}

pub fn write_trace<W: Write>(trace: &Trace, sink: W) -> io::Result<W> {
    let mut w = TraceWriter::new(sink, trace.alphabet())?;
    for ticks in trace.steps() {
        w.write_step(&ticks)?;
    }
    w.finish()
}

pub fn write_trace_file(trace: &Trace, path: &Path) -> io::Result<()> {
    write_trace(trace, BufWriter::new(File::create(path)?))?;
    Ok(())
}

pub fn read_trace<R: BufRead>(source: R) -> Result<Trace, TraceIoError> {
    let mut lines = source.lines();
    let header = match lines.next() {
        Some(h) => h?,
        None => {
            return Err(TraceIoError::Header {
                msg: "empty input".into(),
            })
        }
    };
    let header = header.strip_suffix('\r').unwrap_or(&header);
    let mut fields = header.split(',');
    if fields.next() != Some("step") {
        return Err(TraceIoError::Header {
            msg: "first column must be `step`".into(),
        });
    }
    let clocks = fields
        .map(ClockId::new)
        .collect::<Result<Vec<_>, _>>()
        .and_then(Alphabet::new)
        .map_err(|e: ClockError| TraceIoError::Header { msg: e.to_string() })?;
    let width = clocks.len();
    let mut trace = Trace::with_alphabet(clocks);
    let mut ticks = TickSet::with_capacity(width);

    for (idx, row) in lines.enumerate() {
        let line = idx + 2;
        let row = row?;
        let row = row.strip_suffix('\r').unwrap_or(&row);
        let mut cells = row.split(',');
        let step = cells.next().unwrap_or_default();
        if step.parse::<usize>().ok() != Some(idx) || !step.bytes().all(|b| b.is_ascii_digit()) {
            return Err(TraceIoError::Step { line });
        }
        ticks.clear();
        let mut found = 0;
        for (c, cell) in cells.enumerate() {
            found += 1;
            if c >= width {
                continue;
            }
            match cell {
                "0" => {}
                "1" => ticks.insert(c),
                _ => return Err(TraceIoError::Cell { line }),
            }
        }
        if found != width {
            return Err(TraceIoError::Ragged {
                line,
                expected: width,
                found,
            });
        }
        trace
            .push_step(&ticks)
            .expect("indices are bounded by the header width");
    }
    Ok(trace)
}

pub fn read_trace_file(path: &Path) -> Result<Trace, TraceIoError> {
    read_trace(BufReader::new(File::open(path)?))
}
