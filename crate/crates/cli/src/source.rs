//! Circuit sources: QASM files and generated benchmarks.

use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use qfb_core::generators::{grover, qft, random_circuit};
use qfb_core::qasm::parse_qasm;
use qfb_core::{Circuit, RepeatedCircuit};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Environment variable seeding `random:` sources that carry no seed.
pub const SEED_VAR: &str = "QFB_SEED";

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Source {
    Qft(usize),
    Grover {
        d: usize,
        marked: Option<String>,
    },
    Random {
        n: usize,
        m: usize,
        seed: Option<u64>,
    },
    File(PathBuf),
}

impl FromStr for Source {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Source> {
        let number = |field: &str, what: &str| -> Result<usize> {
            field
                .parse()
                .with_context(|| format!("invalid {what} '{field}' in source '{s}'"))
        };
        let mut parts = s.split(':');
        let head = parts.next().unwrap_or_default();
        let rest: Vec<&str> = parts.collect();
        match (head, rest.as_slice()) {
            ("qft", [n]) => Ok(Source::Qft(number(n, "qubit count")?)),
            ("grover", [d]) => Ok(Source::Grover {
                d: number(d, "data qubit count")?,
                marked: None,
            }),
            ("grover", [d, marked]) => Ok(Source::Grover {
                d: number(d, "data qubit count")?,
                marked: Some(marked.to_string()),
            }),
            ("random", [n, m]) => Ok(Source::Random {
                n: number(n, "qubit count")?,
                m: number(m, "gate count")?,
                seed: None,
            }),
            ("random", [n, m, seed]) => Ok(Source::Random {
                n: number(n, "qubit count")?,
                m: number(m, "gate count")?,
                seed: Some(number(seed, "seed")? as u64),
            }),
            ("qft" | "grover" | "random", _) => bail!(
                "malformed generator source '{s}' (expected qft:<n>, grover:<d>[:<marked>] or random:<n>:<m>[:<seed>])"
            ),
            _ => Ok(Source::File(PathBuf::from(s))),
        }
    }
}

/// Generator settings that are not part of the source string.
#[derive(Clone, Debug, Default)]
pub struct GenOptions {
    pub with_swaps: bool,
    pub iterations: Option<usize>,
    pub marked: Option<String>,
}

#[derive(Clone, Debug)]
pub enum Workload {
    Plain(Circuit),
    Repeated(RepeatedCircuit),
}

/// A loaded circuit together with the name used in benchmark records.
#[derive(Clone, Debug)]
pub struct Instance {
    pub benchmark: String,
    pub workload: Workload,
}

impl Instance {
    pub fn n(&self) -> usize {
        match &self.workload {
            Workload::Plain(c) => c.n(),
            Workload::Repeated(r) => r.n(),
        }
    }

    /// Gate count of the fully unrolled circuit.
    pub fn m(&self) -> usize {
        match &self.workload {
            Workload::Plain(c) => c.len(),
            Workload::Repeated(r) => r.gate_count(),
        }
    }

    pub fn unrolled(&self) -> Circuit {
        match &self.workload {
            Workload::Plain(c) => c.clone(),
            Workload::Repeated(r) => r.unroll(),
        }
    }
}

impl Source {
    pub fn load(&self, opts: &GenOptions) -> Result<Instance> {
        let (benchmark, workload) = match self {
            Source::Qft(n) => (
                "qft".to_string(),
                Workload::Plain(qft(*n, opts.with_swaps)?),
            ),
            Source::Grover { d, marked } => {
                let marked = match (marked, &opts.marked) {
                    (Some(a), Some(b)) if a != b => {
                        bail!("marked element given twice ('{a}' and '{b}')")
                    }
                    (Some(m), _) | (None, Some(m)) => m.clone(),
                    (None, None) => "0".repeat(*d),
                };
                let mut g = grover(*d, &marked)?;
                if let Some(k) = opts.iterations {
                    g = g.with_repetitions(k)?;
                }
                ("grover".to_string(), Workload::Repeated(g))
            }
            Source::Random { n, m, seed } => {
                let seed = match seed {
                    Some(s) => *s,
                    None => seed_from_env()?,
                };
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let c = random_circuit(*n, *m, &mut rng)?;
                ("random".to_string(), Workload::Plain(c))
            }
            Source::File(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("cannot read '{}'", path.display()))?;
                let c = parse_qasm(&text).with_context(|| format!("in '{}'", path.display()))?;
                let name = path
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| path.display().to_string());
                (name, Workload::Plain(c))
            }
        };
        Ok(Instance {
            benchmark,
            workload,
        })
    }
}

/// Seed from [`SEED_VAR`], or 0 when unset.
pub fn seed_from_env() -> Result<u64> {
    match std::env::var(SEED_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| anyhow!("{SEED_VAR} must be an unsigned integer, got '{v}'")),
        Err(_) => Ok(0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_generator_specs() {
        assert_eq!("qft:3".parse::<Source>().unwrap(), Source::Qft(3));
        assert_eq!(
            "grover:4:0110".parse::<Source>().unwrap(),
            Source::Grover {
                d: 4,
                marked: Some("0110".into())
            }
        );
        assert_eq!(
            "random:3:10:7".parse::<Source>().unwrap(),
            Source::Random {
                n: 3,
                m: 10,
                seed: Some(7)
            }
        );
        assert_eq!(
            "circ.qasm".parse::<Source>().unwrap(),
            Source::File(PathBuf::from("circ.qasm"))
        );
        assert!("qft:x".parse::<Source>().is_err());
        assert!("qft".parse::<Source>().is_err());
        assert!("grover:2:01:9".parse::<Source>().is_err());
    }

    #[test]
    fn grover_defaults_and_overrides() {
        let inst = Source::Grover { d: 3, marked: None }
            .load(&GenOptions::default())
            .unwrap();
        assert_eq!(inst.n(), 4);
        let Workload::Repeated(g) = &inst.workload else {
            panic!("grover must load as a repeated workload")
        };
        assert_eq!(g.repetitions, 2);

        let opts = GenOptions {
            iterations: Some(5),
            marked: Some("101".into()),
            ..Default::default()
        };
        let inst = Source::Grover { d: 3, marked: None }.load(&opts).unwrap();
        let Workload::Repeated(g) = &inst.workload else {
            panic!("grover must load as a repeated workload")
        };
        assert_eq!(g.repetitions, 5);
        assert_eq!(inst.m(), g.init.len() + 5 * g.iteration.len());

        let clash = Source::Grover {
            d: 3,
            marked: Some("111".into()),
        };
        assert!(clash.load(&opts).is_err());
    }

    #[test]
    fn seeded_random_sources_are_reproducible() {
        let src = Source::Random {
            n: 4,
            m: 12,
            seed: Some(3),
        };
        let a = src.load(&GenOptions::default()).unwrap().unrolled();
        let b = src.load(&GenOptions::default()).unwrap().unrolled();
        assert_eq!(a, b);
        assert_eq!(a.len(), 12);
    }
}
