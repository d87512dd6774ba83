use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde_json::Value;

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Precision(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Precision(_) => 3,
            CliError::Runtime(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) | CliError::Precision(m) | CliError::Runtime(m) => f.write_str(m),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{:.16e}", x)
}

pub struct Table {
    pub name: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: Vec<&'static str>) -> Self {
        Table {
            name: name.to_string(),
            header,
            rows: Vec::new(),
        }
    }

    fn write_to<W: Write>(&self, w: W) -> CliResult<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(&self.header)?;
        for r in &self.rows {
            wr.write_record(r)?;
        }
        wr.flush()?;
        Ok(())
    }
}

/// What a command produced. The report, if any, is the main artifact.
pub struct Artifacts {
    pub name: String,
    pub report: Option<Value>,
    pub tables: Vec<Table>,
}

impl Artifacts {
    pub fn emit(&self, out: Option<&Path>) -> CliResult<()> {
        let Some(dir) = out else {
            let stdout = io::stdout();
            if let Some(r) = &self.report {
                let mut lock = stdout.lock();
                serde_json::to_writer_pretty(&mut lock, r).map_err(|e| CliError::Runtime(e.to_string()))?;
                writeln!(lock)?;
            } else if let Some(t) = self.tables.first() {
                t.write_to(stdout.lock())?;
            }
            return Ok(());
        };
        fs::create_dir_all(dir)?;
        if let Some(r) = &self.report {
            let path = dir.join(format!("{}.json", self.name));
            let text = serde_json::to_string_pretty(r).map_err(|e| CliError::Runtime(e.to_string()))?;
            fs::write(&path, text + "\n")?;
            eprintln!("wrote {}", path.display());
        }
        for t in &self.tables {
            let path = dir.join(format!("{}.csv", t.name));
            t.write_to(fs::File::create(&path)?)?;
            eprintln!("wrote {}", path.display());
        }
        Ok(())
    }
}
