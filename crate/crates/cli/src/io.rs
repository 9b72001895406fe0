use std::fs::File;
use std::io::{self, BufWriter, Read, Write};

use crate::exit::{Classify, CliResult};

/// Reads a file, or stdin for `-`.
pub fn read_input(path: &str) -> CliResult<String> {
    if path == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).input()?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(|e| anyhow::anyhow!("{path}: {e}")).input()
    }
}

/// A buffered file, or stdout for `-`.
pub enum Output {
    Stdout(io::Stdout),
    File(BufWriter<File>),
}

impl Output {
    pub fn open(path: &str) -> CliResult<Self> {
        if path == "-" {
            Ok(Output::Stdout(io::stdout()))
        } else {
            Ok(Output::File(BufWriter::new(File::create(path).map_err(|e| anyhow::anyhow!("{path}: {e}")).input()?)))
        }
    }
}

impl Write for Output {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        match self {
            Output::Stdout(s) => s.write(buf),
            Output::File(f) => f.write(buf),
        }
    }

    fn flush(&mut self) -> io::Result<()> {
        match self {
            Output::Stdout(s) => s.flush(),
            Output::File(f) => f.flush(),
        }
    }
}
