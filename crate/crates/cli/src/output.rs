//! Versioned CSV report emission.

use std::io::Write;
use std::path::Path;

use crate::error::CliResult;

/// A CSV document: a `# mobinfer <kind> v1` line, a header and rows.
pub struct Report {
    buf: csv::Writer<Vec<u8>>,
}

impl Report {
    pub fn new(kind: &str, header: &[&str]) -> CliResult<Self> {
        let mut head = Vec::new();
        writeln!(head, "# mobinfer {kind} v1")?;
        let mut buf = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(head);
        buf.write_record(header)?;
        Ok(Self { buf })
    }

    pub fn row<I, T>(&mut self, fields: I) -> CliResult<()>
    where
        I: IntoIterator<Item = T>,
        T: AsRef<[u8]>,
    {
        self.buf.write_record(fields)?;
        Ok(())
    }

    pub fn into_bytes(self) -> CliResult<Vec<u8>> {
        self.buf.into_inner().map_err(|e| crate::error::CliError::Data(e.to_string()))
    }

    /// Write to `path`, or to `stdout` when no path is given.
    pub fn emit(self, path: Option<&Path>, stdout: &mut dyn Write) -> CliResult<()> {
        let bytes = self.into_bytes()?;
        match path {
            Some(p) => std::fs::write(p, bytes)?,
            None => stdout.write_all(&bytes)?,
        }
        Ok(())
    }
}

/// A metric value with six decimals, or `NA` when undefined.
pub fn metric(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |x| format!("{x:.6}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_and_rows() {
        let mut r = Report::new("labels", &["mid", "time", "label"]).unwrap();
        r.row(["a,b", "1", "S"]).unwrap();
        let text = String::from_utf8(r.into_bytes().unwrap()).unwrap();
        assert_eq!(text, "# mobinfer labels v1\nmid,time,label\n\"a,b\",1,S\n");
    }

    #[test]
    fn metric_format() {
        assert_eq!(metric(Some(0.8)), "0.800000");
        assert_eq!(metric(None), "NA");
    }
}
