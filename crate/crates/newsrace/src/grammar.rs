//! Textual grammars shared by the CLI and config files.
//!
//! Marginals: `exp:<rate>`, `det:<value>`, `unif:<lo>:<hi>`,
//! `pareto:<shape>:<scale>`. Couplings: `independent`, `comonotone`,
//! `countermonotone`. Degrees: `regular:<r>:<n>`, `iid:<pk-spec>:<n>`,
//! `pareto-degree:<tau>:<min>:<n>`, `file:<path>` (one integer per line).
//! Offspring laws reuse the degree families without the size field:
//! `regular:<r>`, `pk:<pk-spec>`, `pareto-degree:<tau>:<min>`.
//!
//! A `pk-spec` is a comma list of `degree@probability` atoms, e.g.
//! `2@0.5,4@0.5`.

use newsrace_core::degree::{DegreeDistribution, DegreeSequence};
use newsrace_core::rng::Stream;
use newsrace_core::traversal::{Coupling, Marginal};

use crate::HarnessError;

fn bad(spec: &str, what: &str) -> HarnessError {
    HarnessError::Config(format!("cannot parse {what} spec '{spec}'"))
}

fn parse_f64(token: &str, spec: &str, what: &str) -> Result<f64, HarnessError> {
    token.parse::<f64>().map_err(|_| bad(spec, what))
}

pub fn parse_marginal(spec: &str) -> Result<Marginal, HarnessError> {
    let parts: Vec<&str> = spec.split(':').collect();
    let wrap = |r: Result<Marginal, newsrace_core::traversal::ModelError>| {
        r.map_err(|e| HarnessError::Config(format!("invalid marginal '{spec}': {e}")))
    };
    match parts.as_slice() {
        ["exp", rate] => wrap(Marginal::exponential(parse_f64(rate, spec, "marginal")?)),
        ["det", value] => wrap(Marginal::deterministic(parse_f64(value, spec, "marginal")?)),
        ["unif", lo, hi] => wrap(Marginal::uniform(
            parse_f64(lo, spec, "marginal")?,
            parse_f64(hi, spec, "marginal")?,
        )),
        ["pareto", shape, scale] => wrap(Marginal::pareto(
            parse_f64(shape, spec, "marginal")?,
            parse_f64(scale, spec, "marginal")?,
        )),
        _ => Err(bad(spec, "marginal")),
    }
}

pub fn parse_coupling(spec: &str) -> Result<Coupling, HarnessError> {
    match spec {
        "independent" => Ok(Coupling::Independent),
        "comonotone" => Ok(Coupling::Comonotone),
        "countermonotone" => Ok(Coupling::Countermonotone),
        _ => Err(bad(spec, "coupling")),
    }
}

fn parse_pk(pk: &str, spec: &str) -> Result<Vec<(u32, f64)>, HarnessError> {
    let mut pairs = Vec::new();
    for atom in pk.split(',') {
        let (k, p) = atom.split_once('@').ok_or_else(|| bad(spec, "pk"))?;
        let k: u32 = k.parse().map_err(|_| bad(spec, "pk"))?;
        let p: f64 = p.parse().map_err(|_| bad(spec, "pk"))?;
        pairs.push((k, p));
    }
    Ok(pairs)
}

fn wrap_degree(
    spec: &str,
    r: Result<DegreeDistribution, newsrace_core::degree::DegreeError>,
) -> Result<DegreeDistribution, HarnessError> {
    r.map_err(|e| HarnessError::Config(format!("invalid degree spec '{spec}': {e}")))
}

/// A degree source for graph experiments: a way to materialize a degree
/// sequence of a requested size plus the declared limiting distribution
/// (when one exists).
#[derive(Debug, Clone)]
pub enum DegreeSpec {
    Regular { r: u32, n: usize },
    Iid { dist: DegreeDistribution, n: usize },
    ParetoDegree { dist: DegreeDistribution, n: usize },
    File { degrees: Vec<u32> },
}

impl DegreeSpec {
    /// Default size carried by the spec itself.
    pub fn default_n(&self) -> usize {
        match self {
            DegreeSpec::Regular { n, .. }
            | DegreeSpec::Iid { n, .. }
            | DegreeSpec::ParetoDegree { n, .. } => *n,
            DegreeSpec::File { degrees } => degrees.len(),
        }
    }

    /// The declared limiting distribution, when the family has one.
    pub fn declared(&self) -> Option<DegreeDistribution> {
        match self {
            DegreeSpec::Regular { r, .. } => DegreeDistribution::regular(*r).ok(),
            DegreeSpec::Iid { dist, .. } | DegreeSpec::ParetoDegree { dist, .. } => {
                Some(dist.clone())
            }
            DegreeSpec::File { .. } => None,
        }
    }

    /// Materializes a degree sequence with `n` entries (file-backed specs
    /// cannot be resized and reject any other `n`).
    pub fn realize(&self, n: usize, stream: &mut Stream) -> Result<DegreeSequence, HarnessError> {
        let raw: Vec<u32> = match self {
            DegreeSpec::Regular { r, .. } => vec![*r; n],
            DegreeSpec::Iid { dist, .. } | DegreeSpec::ParetoDegree { dist, .. } => {
                (0..n).map(|_| dist.sample(stream)).collect()
            }
            DegreeSpec::File { degrees } => {
                if n != degrees.len() {
                    return Err(HarnessError::Config(format!(
                        "file-backed degree sequence has {} entries, cannot resize to {n}",
                        degrees.len()
                    )));
                }
                degrees.clone()
            }
        };
        DegreeSequence::normalize(&raw)
            .map_err(|e| HarnessError::Config(format!("bad degree sequence: {e}")))
    }
}

pub fn parse_degree_spec(spec: &str) -> Result<DegreeSpec, HarnessError> {
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        ["regular", r, n] => {
            let r: u32 = r.parse().map_err(|_| bad(spec, "degree"))?;
            let n: usize = n.parse().map_err(|_| bad(spec, "degree"))?;
            if r == 0 || n == 0 {
                return Err(bad(spec, "degree"));
            }
            Ok(DegreeSpec::Regular { r, n })
        }
        ["iid", pk, n] => {
            let n: usize = n.parse().map_err(|_| bad(spec, "degree"))?;
            let dist = wrap_degree(spec, DegreeDistribution::finite(&parse_pk(pk, spec)?))?;
            Ok(DegreeSpec::Iid { dist, n })
        }
        ["pareto-degree", tau, min, n] => {
            let tau: f64 = tau.parse().map_err(|_| bad(spec, "degree"))?;
            let min: u32 = min.parse().map_err(|_| bad(spec, "degree"))?;
            let n: usize = n.parse().map_err(|_| bad(spec, "degree"))?;
            let dist = wrap_degree(spec, DegreeDistribution::pareto_tail(tau, min))?;
            Ok(DegreeSpec::ParetoDegree { dist, n })
        }
        ["file", path] => {
            let text = std::fs::read_to_string(path).map_err(HarnessError::Io)?;
            let mut degrees = Vec::new();
            for (i, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() {
                    continue;
                }
                let d: u32 = line.parse().map_err(|_| {
                    HarnessError::Config(format!("degree file {path} line {}: '{line}'", i + 1))
                })?;
                degrees.push(d);
            }
            if degrees.is_empty() {
                return Err(HarnessError::Config(format!("degree file {path} is empty")));
            }
            Ok(DegreeSpec::File { degrees })
        }
        _ => Err(bad(spec, "degree")),
    }
}

/// Offspring law for tree experiments: the degree grammar without a size.
pub fn parse_offspring_spec(spec: &str) -> Result<DegreeDistribution, HarnessError> {
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        ["regular", r] => {
            let r: u32 = r.parse().map_err(|_| bad(spec, "offspring"))?;
            wrap_degree(spec, DegreeDistribution::regular(r))
        }
        ["pk", pk] => wrap_degree(spec, DegreeDistribution::finite(&parse_pk(pk, spec)?)),
        ["pareto-degree", tau, min] => {
            let tau: f64 = tau.parse().map_err(|_| bad(spec, "offspring"))?;
            let min: u32 = min.parse().map_err(|_| bad(spec, "offspring"))?;
            wrap_degree(spec, DegreeDistribution::pareto_tail(tau, min))
        }
        _ => Err(bad(spec, "offspring")),
    }
}

/// Canonical text form of a marginal, matching the grammar.
pub fn marginal_spec(m: &Marginal) -> String {
    match *m {
        Marginal::Exponential { rate } => format!("exp:{rate}"),
        Marginal::Deterministic { value } => format!("det:{value}"),
        Marginal::Uniform { lo, hi } => format!("unif:{lo}:{hi}"),
        Marginal::Pareto { shape, scale } => format!("pareto:{shape}:{scale}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn marginal_round_trips() {
        for spec in ["exp:1", "det:2.5", "unif:0:1", "pareto:2.5:1"] {
            let m = parse_marginal(spec).unwrap();
            let again = parse_marginal(&marginal_spec(&m)).unwrap();
            assert_eq!(m, again);
        }
    }

    #[test]
    fn marginal_rejects_garbage() {
        for spec in ["exp", "exp:0", "exp:-1", "gauss:1", "unif:1:1", "unif:1", "pareto:2", ""] {
            assert!(parse_marginal(spec).is_err(), "accepted '{spec}'");
        }
    }

    #[test]
    fn coupling_keywords() {
        assert_eq!(parse_coupling("independent").unwrap(), Coupling::Independent);
        assert_eq!(parse_coupling("comonotone").unwrap(), Coupling::Comonotone);
        assert_eq!(
            parse_coupling("countermonotone").unwrap(),
            Coupling::Countermonotone
        );
        assert!(parse_coupling("Comonotone").is_err());
    }

    #[test]
    fn degree_specs() {
        let d = parse_degree_spec("regular:3:100").unwrap();
        assert_eq!(d.default_n(), 100);
        let mut s = Stream::from_seed(1);
        let seq = d.realize(100, &mut s).unwrap();
        assert!(seq.degrees().iter().all(|&x| x == 3));

        let d = parse_degree_spec("iid:2@0.5,4@0.5:50").unwrap();
        let seq = d.realize(50, &mut s).unwrap();
        assert!(seq.degrees().iter().all(|&x| x == 2 || x == 4 || x == 5));
        assert!((d.declared().unwrap().nu() - 7.0 / 3.0).abs() < 1e-12);

        let d = parse_degree_spec("pareto-degree:2.5:2:1000").unwrap();
        let seq = d.realize(1000, &mut s).unwrap();
        assert!(seq.degrees().iter().all(|&x| x >= 2));

        assert!(parse_degree_spec("regular:3").is_err());
        assert!(parse_degree_spec("iid:2@1.5:10").is_err());
        assert!(parse_degree_spec("file:/nonexistent/path").is_err());
    }

    #[test]
    fn degree_file_parsing() {
        let dir = std::env::temp_dir().join("newsrace-grammar-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("degrees.txt");
        std::fs::write(&path, "3\n2\n\n4\n").unwrap();
        let spec = format!("file:{}", path.display());
        let d = parse_degree_spec(&spec).unwrap();
        assert_eq!(d.default_n(), 3);
        let mut s = Stream::from_seed(1);
        let seq = d.realize(3, &mut s).unwrap();
        // Sum 9 is odd: the normalize fix bumps the last entry.
        assert_eq!(seq.degrees(), &[3, 2, 5]);
        assert!(d.realize(4, &mut s).is_err());
    }

    #[test]
    fn offspring_specs() {
        let d = parse_offspring_spec("regular:2").unwrap();
        assert_eq!(d.min_degree(), 2);
        let d = parse_offspring_spec("pk:1@0.25,3@0.75").unwrap();
        assert!((d.mean() - 2.5).abs() < 1e-12);
        assert!(parse_offspring_spec("regular:2:100").is_err());
    }
}
