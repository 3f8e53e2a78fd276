//! Benchmark records and their CSV/JSON serialization.

use std::fmt;
use std::io::{Read, Write};

use anyhow::Result;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    Timeout,
    MemoryLimit,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Ok => "ok",
            Status::Timeout => "timeout",
            Status::MemoryLimit => "memory-limit",
        })
    }
}

/// One construction run. Counts are absent unless `status` is `ok`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkRecord {
    pub benchmark: String,
    pub n: usize,
    pub m: usize,
    pub strategy: String,
    /// Seconds.
    pub wall_time: f64,
    pub multiplications: Option<usize>,
    pub peak_nodes: Option<usize>,
    pub final_nodes: Option<usize>,
    pub unique_table_nodes_allocated: Option<u64>,
    pub status: Status,
}

pub fn write_csv<W: Write>(records: &[BenchmarkRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<BenchmarkRecord>> {
    let mut r = csv::Reader::from_reader(input);
    let records = r
        .deserialize()
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(records)
}

/// Fixed-width table for terminals.
pub fn write_table<W: Write>(records: &[BenchmarkRecord], mut out: W) -> Result<()> {
    let opt = |v: Option<String>| v.unwrap_or_else(|| "-".to_string());
    writeln!(
        out,
        "{:<10} {:>4} {:>8} {:<11} {:>10} {:>8} {:>10} {:>10} {:>12}  status",
        "benchmark", "n", "m", "strategy", "time[s]", "mults", "peak", "final", "allocated"
    )?;
    for r in records {
        writeln!(
            out,
            "{:<10} {:>4} {:>8} {:<11} {:>10.4} {:>8} {:>10} {:>10} {:>12}  {}",
            r.benchmark,
            r.n,
            r.m,
            r.strategy,
            r.wall_time,
            opt(r.multiplications.map(|v| v.to_string())),
            opt(r.peak_nodes.map(|v| v.to_string())),
            opt(r.final_nodes.map(|v| v.to_string())),
            opt(r.unique_table_nodes_allocated.map(|v| v.to_string())),
            r.status
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Vec<BenchmarkRecord> {
        vec![
            BenchmarkRecord {
                benchmark: "qft".into(),
                n: 3,
                m: 6,
                strategy: "pairwise".into(),
                wall_time: 0.000123456789,
                multiplications: Some(5),
                peak_nodes: Some(7),
                final_nodes: Some(7),
                unique_table_nodes_allocated: Some(40),
                status: Status::Ok,
            },
            BenchmarkRecord {
                benchmark: "grover".into(),
                n: 17,
                m: 9000,
                strategy: "sequential".into(),
                wall_time: 60.5,
                multiplications: None,
                peak_nodes: None,
                final_nodes: None,
                unique_table_nodes_allocated: None,
                status: Status::Timeout,
            },
        ]
    }

    #[test]
    fn csv_round_trip() {
        let mut buf = Vec::new();
        write_csv(&sample(), &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(
            "benchmark,n,m,strategy,wall_time,multiplications,peak_nodes,final_nodes,unique_table_nodes_allocated,status\n"
        ));
        assert!(text.contains(",memory-limit") || text.contains(",timeout"));
        assert_eq!(read_csv(buf.as_slice()).unwrap(), sample());
    }

    #[test]
    fn json_is_flat_snake_case() {
        let v = serde_json::to_value(&sample()[0]).unwrap();
        let obj = v.as_object().unwrap();
        assert_eq!(obj.len(), 10);
        assert_eq!(obj["status"], "ok");
        assert_eq!(obj["unique_table_nodes_allocated"], 40);
        let limit = serde_json::to_value(Status::MemoryLimit).unwrap();
        assert_eq!(limit, "memory-limit");
    }
}
