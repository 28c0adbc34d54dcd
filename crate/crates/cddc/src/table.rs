//! CSV tables with fixed-precision numbers.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use cddc_core::spectra::{JointSpectrum, Spectrum1d};

use crate::error::{CliError, Result};

/// Significant digits of every number written to CSV.
pub const SIG_DIGITS: usize = 9;

/// Formats `x` with [`SIG_DIGITS`] significant digits, in positional
/// notation for moderate magnitudes and scientific notation otherwise.
/// Trailing zeros are dropped, so equal values always print identically.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", SIG_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if (-5..SIG_DIGITS as i32).contains(&exp) {
        let decimals = (SIG_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push_nums(&mut self, row: &[f64]) {
        self.rows.push(row.iter().map(|&v| fmt_num(v)).collect());
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn write_to(&self, w: impl Write) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.header)?;
        for r in &self.rows {
            out.write_record(r)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("CSV is UTF-8")
    }
}

/// Destination directory for output files.
#[derive(Debug, Clone)]
pub struct OutDir {
    dir: PathBuf,
}

impl OutDir {
    pub fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn write_table(&self, name: &str, table: &Table) -> Result<PathBuf> {
        let path = self.path(name);
        let file = fs::File::create(&path).map_err(|e| CliError::io(&path, e))?;
        table
            .write_to(std::io::BufWriter::new(file))
            .map_err(|e| match e.into_kind() {
                csv::ErrorKind::Io(io) => CliError::io(&path, io),
                other => CliError::parse(&path, format!("{other:?}")),
            })?;
        Ok(path)
    }

    pub fn write_text(&self, name: &str, text: &str) -> Result<PathBuf> {
        let path = self.path(name);
        fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }
}

/// `lambda_s_nm,lambda_i_nm,jsi`, signal outermost.
pub fn jsi_table(js: &JointSpectrum) -> Table {
    let g = js.grid();
    let mut t = Table::new(&["lambda_s_nm", "lambda_i_nm", "jsi"]);
    t.rows.reserve(g.len());
    let idler: Vec<String> = g.idler.values().map(fmt_num).collect();
    for (i, s) in g.signal.values().enumerate() {
        let s = fmt_num(s);
        for (j, li) in idler.iter().enumerate() {
            t.push(vec![s.clone(), li.clone(), fmt_num(js.jsi(i, j))]);
        }
    }
    t
}

/// `lambda_nm,intensity`.
pub fn marginal_table(m: &Spectrum1d) -> Table {
    let mut t = Table::new(&["lambda_nm", "intensity"]);
    for (l, v) in m.wavelengths_nm.iter().zip(&m.values) {
        t.push_nums(&[*l, *v]);
    }
    t
}
