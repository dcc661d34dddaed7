use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Annotations attached to an estimate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flag {
    /// Fewer than 5 replicas exceeded the level.
    LowPower,
    /// The error includes the propagated uncertainty of the estimated center.
    CenterBias,
    /// The error includes an estimate of the kernel taper bias.
    TaperBias,
    /// Hölder seminorms were restricted to power-of-two index gaps.
    DyadicPairs,
    /// `β` is not below the predicted Hölder exponent.
    BetaAboveDelta,
}

impl Flag {
    fn as_str(self) -> &'static str {
        match self {
            Flag::LowPower => "low_power",
            Flag::CenterBias => "center_bias",
            Flag::TaperBias => "taper_bias",
            Flag::DyadicPairs => "dyadic_pairs",
            Flag::BetaAboveDelta => "beta_above_delta",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        [
            Flag::LowPower,
            Flag::CenterBias,
            Flag::TaperBias,
            Flag::DyadicPairs,
            Flag::BetaAboveDelta,
        ]
        .into_iter()
        .find(|f| f.as_str() == s)
        .ok_or_else(|| Error::Config(format!("unknown flag '{s}'")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalRow {
    pub n: u64,
    pub statistic: String,
    /// Moment order, deviation level, quantile level or bandwidth.
    pub param: f64,
    pub estimate: f64,
    pub stderr: f64,
    pub replicas: usize,
    pub seed: u64,
    pub flags: Vec<Flag>,
}

impl EmpiricalRow {
    pub fn has(&self, flag: Flag) -> bool {
        self.flags.contains(&flag)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalResult {
    pub config_hash: String,
    pub rows: Vec<EmpiricalRow>,
}

const HEADER: [&str; 8] = ["n", "statistic", "p_or_x_or_beta", "estimate", "stderr", "replicas", "seed", "flags"];

fn num(s: &str) -> Result<f64> {
    s.parse().map_err(|_| Error::Config(format!("bad number '{s}' in CSV")))
}

impl EmpiricalResult {
    pub fn extend(&mut self, other: EmpiricalResult) {
        self.rows.extend(other.rows);
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(HEADER)?;
        for r in &self.rows {
            let flags: Vec<&str> = r.flags.iter().map(|f| f.as_str()).collect();
            out.write_record([
                r.n.to_string(),
                r.statistic.clone(),
                r.param.to_string(),
                r.estimate.to_string(),
                r.stderr.to_string(),
                r.replicas.to_string(),
                r.seed.to_string(),
                flags.join(";"),
            ])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("CSV output is UTF-8"))
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }

    /// Reads rows written by [`EmpiricalResult::write_csv`]; the config hash is
    /// not part of the CSV schema and comes back empty.
    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(r);
        if rdr.headers()?.iter().ne(HEADER) {
            return Err(Error::Config("unexpected CSV header".into()));
        }
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let field = |i: usize| rec.get(i).unwrap_or_default();
            rows.push(EmpiricalRow {
                n: num(field(0))? as u64,
                statistic: field(1).to_string(),
                param: num(field(2))?,
                estimate: num(field(3))?,
                stderr: num(field(4))?,
                replicas: num(field(5))? as usize,
                seed: field(6).parse().map_err(|_| Error::Config("bad seed in CSV".into()))?,
                flags: field(7)
                    .split(';')
                    .filter(|s| !s.is_empty())
                    .map(Flag::parse)
                    .collect::<Result<_>>()?,
            });
        }
        Ok(Self {
            config_hash: String::new(),
            rows,
        })
    }

    pub fn load_csv(path: &Path) -> Result<Self> {
        Self::read_csv(std::fs::File::open(path)?)
    }
}
