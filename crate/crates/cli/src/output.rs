//! Artifact writers: CSV and JSON lines, floats at 17 significant digits.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::ser::{Formatter, Serializer};

/// `1.2345678901234567e-3` style: 17 significant digits.
pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

struct SigFormatter;

impl Formatter for SigFormatter {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{}", float(value))
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        write!(w, "{}", float(value as f64))
    }
}

/// One compact JSON line.
pub fn json_line<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    value.serialize(&mut Serializer::with_formatter(&mut buf, SigFormatter))?;
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

/// A file or stdout, remembering the path for error messages.
pub struct Sink {
    path: Option<PathBuf>,
    inner: Box<dyn Write>,
}

impl Sink {
    pub fn open(path: Option<&Path>) -> Result<Self> {
        let inner: Box<dyn Write> = match path {
            Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
            None => Box::new(BufWriter::new(io::stdout())),
        };
        Ok(Sink { path: path.map(Path::to_path_buf), inner })
    }

    fn name(&self) -> String {
        self.path.as_ref().map_or_else(|| "stdout".to_string(), |p| p.display().to_string())
    }

    pub fn line(&mut self, text: &str) -> Result<()> {
        writeln!(self.inner, "{text}").with_context(|| format!("writing {}", self.name()))
    }

    pub fn finish(mut self) -> Result<()> {
        self.inner.flush().with_context(|| format!("writing {}", self.name()))
    }
}
