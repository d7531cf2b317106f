//! Observed series with optional regressors, and its CSV form
//! (`t,x[,f0,f1,...]`, one row per time index, `#` comment lines for provenance).

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::Scalar;

/// Regressor matrix stored by column; column `k` holds `f_k(t/n)`, `t = 1..n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Regressors<T = f64> {
    columns: Vec<Vec<T>>,
}

impl<T: Scalar> Regressors<T> {
    pub fn new(columns: Vec<Vec<T>>) -> Result<Self> {
        let Some(first) = columns.first() else {
            return Err(Error::Dimension("regressor matrix has no columns".into()));
        };
        let n = first.len();
        if columns.iter().any(|c| c.len() != n) {
            return Err(Error::Dimension("regressor columns differ in length".into()));
        }
        if columns.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Invalid("non-finite regressor value".into()));
        }
        let p = columns.len();
        let mut gram = vec![T::zero(); p * p];
        for i in 0..p {
            for j in 0..=i {
                let s = columns[i]
                    .iter()
                    .zip(&columns[j])
                    .fold(T::zero(), |a, (&x, &y)| a + x * y);
                gram[i * p + j] = s;
                gram[j * p + i] = s;
            }
        }
        if linalg::cholesky(&gram, p).is_none() {
            return Err(Error::Invalid("regressor matrix is not of full column rank".into()));
        }
        Ok(Self { columns })
    }

    /// `f_k(t/n) = (t/n)^k` for `k = 0..=p`.
    pub fn polynomial(n: usize, p: usize) -> Result<Self> {
        let cols = (0..=p)
            .map(|k| {
                (1..=n)
                    .map(|t| T::lit(t as f64 / n as f64).powi(k as i32))
                    .collect()
            })
            .collect();
        Self::new(cols)
    }

    pub fn n(&self) -> usize {
        self.columns[0].len()
    }

    pub fn ncols(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, k: usize) -> &[T] {
        &self.columns[k]
    }

    pub fn columns(&self) -> &[Vec<T>] {
        &self.columns
    }

    /// `sum_k b_k f_k(t/n)` at 0-based row `i`.
    pub fn fitted(&self, b: &[T], i: usize) -> T {
        self.columns
            .iter()
            .zip(b)
            .fold(T::zero(), |acc, (col, &bk)| acc + bk * col[i])
    }
}

/// Noise that generated a simulated sample, `Z_start..Z_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratingNoise<T = f64> {
    pub start: i64,
    pub values: Vec<T>,
}

impl<T: Scalar> GeneratingNoise<T> {
    pub fn at(&self, t: i64) -> T {
        self.values[(t - self.start) as usize]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample<T = f64> {
    x: Vec<T>,
    regressors: Option<Regressors<T>>,
    noise: Option<GeneratingNoise<T>>,
    pub provenance: BTreeMap<String, String>,
}

impl<T: Scalar> Sample<T> {
    pub fn new(x: Vec<T>) -> Result<Self> {
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invalid("non-finite observation".into()));
        }
        Ok(Self {
            x,
            regressors: None,
            noise: None,
            provenance: BTreeMap::new(),
        })
    }

    pub fn with_regressors(mut self, regressors: Regressors<T>) -> Result<Self> {
        if regressors.n() != self.x.len() {
            return Err(Error::Dimension(format!(
                "regressors have {} rows, series has {}",
                regressors.n(),
                self.x.len()
            )));
        }
        self.regressors = Some(regressors);
        Ok(self)
    }

    pub fn with_noise(mut self, noise: GeneratingNoise<T>) -> Self {
        self.noise = Some(noise);
        self
    }

    pub fn with_provenance(mut self, key: &str, value: impl ToString) -> Self {
        self.provenance.insert(key.to_string(), value.to_string());
        self
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn x(&self) -> &[T] {
        &self.x
    }

    pub fn regressors(&self) -> Option<&Regressors<T>> {
        self.regressors.as_ref()
    }

    pub fn noise(&self) -> Option<&GeneratingNoise<T>> {
        self.noise.as_ref()
    }

    pub fn without_regressors(&self) -> Self {
        Self {
            regressors: None,
            ..self.clone()
        }
    }

    /// Multiplies observations (and any retained noise) by `lambda`.
    pub fn scaled(&self, lambda: T) -> Self {
        let mut out = self.clone();
        out.x.iter_mut().for_each(|v| *v = *v * lambda);
        if let Some(noise) = out.noise.as_mut() {
            noise.values.iter_mut().for_each(|v| *v = *v * lambda);
        }
        out
    }

    pub fn cast<U: Scalar>(&self) -> Sample<U> {
        let conv = |v: &[T]| v.iter().map(|a| U::lit(a.to_f64_lossy())).collect::<Vec<U>>();
        Sample {
            x: conv(&self.x),
            regressors: self.regressors.as_ref().map(|r| Regressors {
                columns: r.columns.iter().map(|c| conv(c)).collect(),
            }),
            noise: self.noise.as_ref().map(|z| GeneratingNoise {
                start: z.start,
                values: conv(&z.values),
            }),
            provenance: self.provenance.clone(),
        }
    }
}

impl Sample<f64> {
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        for (k, v) in &self.provenance {
            writeln!(w, "# {k}: {v}")?;
        }
        let p = self.regressors.as_ref().map_or(0, |r| r.ncols());
        let mut header = String::from("t,x");
        for k in 0..p {
            write!(header, ",f{k}").expect("write to string");
        }
        writeln!(w, "{header}")?;
        for (i, v) in self.x.iter().enumerate() {
            let mut row = format!("{},{}", i + 1, v);
            if let Some(r) = &self.regressors {
                for col in r.columns() {
                    write!(row, ",{}", col[i]).expect("write to string");
                }
            }
            writeln!(w, "{row}")?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut provenance = BTreeMap::new();
        let mut header: Option<Vec<String>> = None;
        let mut x = Vec::new();
        let mut cols: Vec<Vec<f64>> = Vec::new();
        for (lineno, line) in r.lines().enumerate() {
            let line = line?;
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                if let Some((k, v)) = comment.split_once(':') {
                    provenance.insert(k.trim().to_string(), v.trim().to_string());
                }
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            let Some(h) = &header else {
                if fields.len() < 2 || fields[0] != "t" || fields[1] != "x" {
                    return Err(Error::Parse(format!("expected header t,x[,f0,...], got {line}")));
                }
                for (k, f) in fields[2..].iter().enumerate() {
                    if *f != format!("f{k}") {
                        return Err(Error::Parse(format!("unexpected column {f}")));
                    }
                }
                cols = vec![Vec::new(); fields.len() - 2];
                header = Some(fields.iter().map(|s| s.to_string()).collect());
                continue;
            };
            if fields.len() != h.len() {
                return Err(Error::Parse(format!("line {}: wrong number of fields", lineno + 1)));
            }
            let parse = |s: &str| -> Result<f64> {
                s.parse::<f64>()
                    .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))
            };
            x.push(parse(fields[1])?);
            for (k, f) in fields[2..].iter().enumerate() {
                cols[k].push(parse(f)?);
            }
        }
        if header.is_none() {
            return Err(Error::Parse("empty sample file".into()));
        }
        let mut s = Sample::new(x)?;
        s.provenance = provenance;
        if !cols.is_empty() {
            s = s.with_regressors(Regressors::new(cols)?)?;
        }
        Ok(s)
    }
}
