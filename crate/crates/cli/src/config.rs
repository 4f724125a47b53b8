use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};
use sunstar::exchange::{series_from_orders, OperatorOrder};
use sunstar::{parse_rational, LieAlgebra, OperatorSeries, PoissonStructure, StarProduct};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum PoissonSpec {
    Constant { matrix: Vec<Vec<String>> },
    Lie { brackets: Vec<BracketSpec> },
}

/// `[e_i, e_j]` contains `c e_k`; indices are 1-based.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BracketSpec {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub c: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConfigFile {
    pub dim: usize,
    pub poisson: PoissonSpec,
    #[serde(default)]
    pub order: Option<usize>,
    #[serde(default)]
    pub degree: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Human,
    Json,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StarSelector {
    Moyal,
    Gutt,
    Twist(PathBuf),
}

impl StarSelector {
    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "moyal" => Ok(StarSelector::Moyal),
            "gutt" => Ok(StarSelector::Gutt),
            _ => match text.strip_prefix("twist:") {
                Some(path) if !path.is_empty() => Ok(StarSelector::Twist(PathBuf::from(path))),
                _ => bail!("unknown star selector `{text}` (expected moyal, gutt or twist:<file>)"),
            },
        }
    }
}

/// Everything a command needs: the validated algebra, the star-product and the ranges.
pub struct Session {
    pub dim: usize,
    pub poisson: PoissonStructure,
    pub algebra: Option<LieAlgebra>,
    pub star: StarProduct,
    pub order: usize,
    pub degree: usize,
    pub format: OutputFormat,
    pub seed: u64,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum TwistFile {
    Full { base: String, operator: Vec<OperatorOrder> },
    Bare(Vec<OperatorOrder>),
}

pub fn read_config(path: &Path) -> Result<ConfigFile> {
    let text = if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).context("reading config from stdin")?;
        s
    } else {
        fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?
    };
    serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
}

fn build_poisson(cfg: &ConfigFile) -> Result<(PoissonStructure, Option<LieAlgebra>)> {
    let n = cfg.dim;
    if n == 0 {
        bail!("dimension must be at least 1");
    }
    match &cfg.poisson {
        PoissonSpec::Constant { matrix } => {
            let rows = matrix
                .iter()
                .map(|row| row.iter().map(|c| parse_rational(c).map_err(anyhow::Error::from)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            Ok((PoissonStructure::constant(n, rows)?, None))
        }
        PoissonSpec::Lie { brackets } => {
            let mut list = Vec::new();
            for b in brackets {
                if b.i == 0 || b.j == 0 || b.k == 0 {
                    bail!("bracket indices are 1-based");
                }
                list.push((b.i - 1, b.j - 1, b.k - 1, parse_rational(&b.c)?));
            }
            let alg = LieAlgebra::from_brackets(n, &list)?;
            Ok((alg.poisson(), Some(alg)))
        }
    }
}

fn base_star(kind: &str, poisson: &PoissonStructure, algebra: &Option<LieAlgebra>) -> Result<StarProduct> {
    match kind {
        "moyal" => StarProduct::moyal(poisson.clone())
            .map_err(|e| anyhow!("the moyal selector needs a constant Poisson structure ({e})")),
        "gutt" => match algebra {
            Some(a) => Ok(StarProduct::gutt(a.clone())),
            None => bail!("the gutt selector needs a Lie algebra config (poisson type \"lie\")"),
        },
        other => bail!("unknown twist base `{other}`"),
    }
}

pub fn read_twist(path: &Path, dim: usize, default_base: &str) -> Result<(String, OperatorSeries)> {
    let text = fs::read_to_string(path).with_context(|| format!("reading twist file {}", path.display()))?;
    let parsed: TwistFile =
        serde_json::from_str(&text).with_context(|| format!("parsing twist file {}", path.display()))?;
    let (base, orders) = match parsed {
        TwistFile::Full { base, operator } => (base, operator),
        TwistFile::Bare(operator) => (default_base.to_string(), operator),
    };
    Ok((base, series_from_orders(dim, &orders, 0)?))
}

impl Session {
    pub fn new(
        cfg: &ConfigFile,
        star: Option<&str>,
        order: Option<usize>,
        degree: Option<usize>,
        format: OutputFormat,
        seed: u64,
    ) -> Result<Self> {
        let (poisson, algebra) = build_poisson(cfg)?;
        let order = order.or(cfg.order).unwrap_or(3);
        let degree = degree.or(cfg.degree).unwrap_or(4);
        if order == 0 {
            bail!("truncation order must be at least 1");
        }
        if degree == 0 {
            bail!("maximal degree must be at least 1");
        }
        let default_base = if algebra.is_some() { "gutt" } else { "moyal" };
        let selector = match star {
            Some(s) => StarSelector::parse(s)?,
            None if algebra.is_some() => StarSelector::Gutt,
            None => StarSelector::Moyal,
        };
        let star = match &selector {
            StarSelector::Moyal => base_star("moyal", &poisson, &algebra)?,
            StarSelector::Gutt => base_star("gutt", &poisson, &algebra)?,
            StarSelector::Twist(path) => {
                let (base, t) = read_twist(path, cfg.dim, default_base)?;
                StarProduct::twist(&base_star(&base, &poisson, &algebra)?, &t)?
            }
        };
        Ok(Session { dim: cfg.dim, poisson, algebra, star, order, degree, format, seed })
    }

    /// The configured algebra, or the abelian one for constant structures.
    pub fn algebra_or_abelian(&self) -> LieAlgebra {
        self.algebra.clone().unwrap_or_else(|| LieAlgebra::abelian(self.dim))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selector_parsing() {
        assert_eq!(StarSelector::parse("moyal").unwrap(), StarSelector::Moyal);
        assert_eq!(StarSelector::parse("twist:a.json").unwrap(), StarSelector::Twist("a.json".into()));
        assert!(StarSelector::parse("twist:").is_err());
        assert!(StarSelector::parse("kontsevich").is_err());
    }

    #[test]
    fn config_validation() {
        let cfg: ConfigFile = serde_json::from_str(
            r#"{"dim": 3, "poisson": {"type": "lie", "brackets": [{"i": 1, "j": 2, "k": 3, "c": "1"}]}}"#,
        )
        .unwrap();
        let s = Session::new(&cfg, None, None, None, OutputFormat::Human, 0).unwrap();
        assert_eq!((s.order, s.degree, s.star.describe()), (3, 4, "gutt".to_string()));
        assert!(Session::new(&cfg, Some("moyal"), None, None, OutputFormat::Human, 0).is_err());
        assert!(Session::new(&cfg, None, Some(0), None, OutputFormat::Human, 0).is_err());

        let bad: ConfigFile = serde_json::from_str(
            r#"{"dim": 2, "poisson": {"type": "constant", "matrix": [["0", "1"], ["1", "0"]]}}"#,
        )
        .unwrap();
        assert!(Session::new(&bad, None, None, None, OutputFormat::Human, 0).is_err());
    }
}
