//! Flat `key = value` experiment configuration.
//!
//! One assignment per line; `#` starts a comment. Unknown and repeated keys
//! are errors. `seed` is mandatory, every other key has a default taken from
//! the reference design (`n = 1000`, 2000 trials, `b ∈ {1, 10, 25, 100}`,
//! `α = 0.2`, `τ = 0.8`, `λ = 0.3`, `μ_A = 4`, `μ_N = 0`, `ρ = 0.8`).

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use onlinefwer::procedures::{GraphVariant, ProcedureSpec};
use onlinefwer::simulation::SimConfig;
use onlinefwer::{validate_gamma, GammaSequence, GraphWeights, ProcedureId};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub struct ConfigError {
    /// 1-based line of the offending assignment, if there is one.
    pub line: Option<usize>,
    pub message: String,
}

impl ConfigError {
    fn at(line: usize, message: impl Into<String>) -> Self {
        Self {
            line: Some(line),
            message: message.into(),
        }
    }

    fn global(message: impl Into<String>) -> Self {
        Self {
            line: None,
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

const KEYS: &[&str] = &[
    "procedures",
    "alpha",
    "gamma",
    "tau",
    "lambda",
    "batch_size",
    "n",
    "trials",
    "seed",
    "mu_A",
    "mu_N",
    "rho",
    "pi_A",
    "output",
    "graph_variant",
    "g",
];

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub procedures: Vec<ProcedureId>,
    pub alpha: f64,
    pub gamma: GammaSequence,
    pub tau: f64,
    pub lambda: f64,
    pub batch_sizes: Vec<usize>,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub mu_a: f64,
    pub mu_n: Vec<f64>,
    pub rho: f64,
    pub pi_a: Vec<f64>,
    pub output: Option<PathBuf>,
    pub graph_variant: GraphVariant,
    pub graph: GraphWeights,
}

/// One point of the scenario sweep.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub batch_size: usize,
    pub pi_a: f64,
    pub mu_n: f64,
    pub sim: SimConfig,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::global(format!("cannot read {}: {e}", path.display())))?;
        text.parse()
    }

    /// Procedures in the form the simulation driver takes.
    pub fn procedure_specs(&self) -> Vec<ProcedureSpec> {
        self.procedures
            .iter()
            .map(|&id| match id {
                ProcedureId::OnlineGraph => ProcedureSpec::OnlineGraph {
                    weights: self.graph.clone(),
                    variant: self.graph_variant,
                },
                other => ProcedureSpec::from_id(other),
            })
            .collect()
    }

    /// Every combination of batch size, `π_A` and `μ_N`, in that nesting
    /// order.
    pub fn scenarios(&self) -> Vec<Scenario> {
        let mut out = Vec::new();
        for &batch_size in &self.batch_sizes {
            for &pi_a in &self.pi_a {
                for &mu_n in &self.mu_n {
                    let sim = SimConfig {
                        n: self.n,
                        batch_size,
                        rho: self.rho,
                        pi_a,
                        mu_a: self.mu_a,
                        mu_n,
                        alpha: self.alpha,
                        trials: self.trials,
                        base_seed: self.seed,
                        gamma: self.gamma.clone(),
                        tau: self.tau,
                        lambda: self.lambda,
                    };
                    out.push(Scenario {
                        batch_size,
                        pi_a,
                        mu_n,
                        sim,
                    });
                }
            }
        }
        out
    }

    fn check(&self, lines: &BTreeMap<&'static str, usize>) -> Result<(), ConfigError> {
        let at = |key: &str, msg: String| match lines.get(key) {
            Some(&line) => ConfigError::at(line, msg),
            None => ConfigError::global(msg),
        };
        if !(self.tau > 0.0 && self.tau <= 1.0) {
            return Err(at("tau", "tau must lie in (0, 1]".into()));
        }
        let lambda_ok = self.lambda >= self.alpha * self.tau && self.lambda < self.tau;
        if !lambda_ok {
            let msg = format!(
                "lambda must lie in [alpha*tau, tau), got lambda = {} with alpha = {} and tau = {}",
                self.lambda, self.alpha, self.tau
            );
            return Err(at("lambda", msg));
        }
        if let Some(v) = validate_gamma(&self.gamma, self.n).violations().first() {
            return Err(at(
                "gamma",
                format!(
                    "gamma violates its contract at index {}: {}",
                    v.index, v.kind
                ),
            ));
        }
        for scenario in self.scenarios() {
            scenario.sim.validate().map_err(|e| {
                ConfigError::global(format!(
                    "scenario batch_size = {}, pi_A = {}, mu_N = {}: {e}",
                    scenario.batch_size, scenario.pi_a, scenario.mu_n
                ))
            })?;
            let settings = scenario
                .sim
                .settings()
                .map_err(|e| ConfigError::global(e.to_string()))?;
            for spec in self.procedure_specs() {
                spec.build(&settings)
                    .map_err(|e| at("procedures", format!("{}: {e}", spec.id())))?;
            }
        }
        Ok(())
    }
}

impl FromStr for ExperimentConfig {
    type Err = ConfigError;

    fn from_str(text: &str) -> Result<Self, ConfigError> {
        let mut seen: BTreeMap<&'static str, usize> = BTreeMap::new();
        let mut config = ExperimentConfig {
            procedures: vec![ProcedureId::Addis, ProcedureId::ClosedAddis],
            alpha: 0.2,
            gamma: GammaSequence::inverse_square(),
            tau: 0.8,
            lambda: 0.3,
            batch_sizes: vec![1, 10, 25, 100],
            n: 1000,
            trials: 2000,
            seed: 0,
            mu_a: 4.0,
            mu_n: vec![0.0],
            rho: 0.8,
            pi_a: vec![0.2, 0.5],
            output: None,
            graph_variant: GraphVariant::PaperLiteral,
            graph: GraphWeights::Zero,
        };

        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| {
                ConfigError::at(line, format!("expected `key = value`, found `{content}`"))
            })?;
            let (key, value) = (key.trim(), value.trim());
            let key = KEYS
                .iter()
                .copied()
                .find(|&known| known == key)
                .ok_or_else(|| ConfigError::at(line, format!("unknown key `{key}`")))?;
            if let Some(first) = seen.insert(key, line) {
                return Err(ConfigError::at(
                    line,
                    format!("duplicate key `{key}` (first set on line {first})"),
                ));
            }
            if value.is_empty() {
                return Err(ConfigError::at(line, format!("missing value for `{key}`")));
            }
            let err = |msg: String| ConfigError::at(line, format!("{key}: {msg}"));
            match key {
                "procedures" => config.procedures = parse_list(value).map_err(err)?,
                "alpha" => config.alpha = parse_one(value).map_err(err)?,
                "gamma" => config.gamma = parse_gamma(value).map_err(err)?,
                "tau" => config.tau = parse_one(value).map_err(err)?,
                "lambda" => config.lambda = parse_one(value).map_err(err)?,
                "batch_size" => config.batch_sizes = parse_list(value).map_err(err)?,
                "n" => config.n = parse_one(value).map_err(err)?,
                "trials" => config.trials = parse_one(value).map_err(err)?,
                "seed" => config.seed = parse_one(value).map_err(err)?,
                "mu_A" => config.mu_a = parse_one(value).map_err(err)?,
                "mu_N" => config.mu_n = parse_list(value).map_err(err)?,
                "rho" => config.rho = parse_one(value).map_err(err)?,
                "pi_A" => config.pi_a = parse_list(value).map_err(err)?,
                "output" => config.output = Some(PathBuf::from(value)),
                "graph_variant" => config.graph_variant = parse_variant(value).map_err(err)?,
                "g" => config.graph = parse_graph(value).map_err(err)?,
                _ => unreachable!("key list and match arms agree"),
            }
        }

        if !seen.contains_key("seed") {
            return Err(ConfigError::global("missing mandatory key `seed`"));
        }
        config.check(&seen)?;
        Ok(config)
    }
}

fn parse_one<T: FromStr>(value: &str) -> Result<T, String>
where
    T::Err: fmt::Display,
{
    value
        .parse()
        .map_err(|e| format!("cannot parse `{value}`: {e}"))
}

fn parse_list<T: FromStr>(value: &str) -> Result<Vec<T>, String>
where
    T::Err: fmt::Display,
{
    let items = value
        .split(',')
        .map(|item| parse_one(item.trim()))
        .collect::<Result<Vec<T>, String>>()?;
    if items.is_empty() {
        return Err("empty list".into());
    }
    Ok(items)
}

/// `inv-square` or `list:γ_1,γ_2,...` (zero after the list).
pub fn parse_gamma(value: &str) -> Result<GammaSequence, String> {
    if value == "inv-square" {
        return Ok(GammaSequence::inverse_square());
    }
    match value.strip_prefix("list:") {
        Some(list) => Ok(GammaSequence::from_list(parse_list(list)?)),
        None => Err(format!(
            "expected `inv-square` or `list:...`, found `{value}`"
        )),
    }
}

/// `zero`, `lag1:w` (`g_{j,j+1} = w`) or `triples:j,i,w;j,i,w;...`.
pub fn parse_graph(value: &str) -> Result<GraphWeights, String> {
    if value == "zero" {
        return Ok(GraphWeights::Zero);
    }
    if let Some(w) = value.strip_prefix("lag1:") {
        let w: f64 = parse_one(w.trim())?;
        if !(0.0..=1.0).contains(&w) {
            return Err(format!("lag1 weight must lie in [0, 1], got {w}"));
        }
        return Ok(GraphWeights::Lag1(w));
    }
    if let Some(list) = value.strip_prefix("triples:") {
        let mut triples = Vec::new();
        for entry in list.split(';').map(str::trim).filter(|e| !e.is_empty()) {
            let parts: Vec<&str> = entry.split(',').map(str::trim).collect();
            let [j, i, w] = parts[..] else {
                return Err(format!("expected `j,i,w`, found `{entry}`"));
            };
            triples.push((parse_one(j)?, parse_one(i)?, parse_one(w)?));
        }
        return GraphWeights::from_triples(triples).map_err(|e| e.to_string());
    }
    Err(format!(
        "expected `zero`, `lag1:w` or `triples:...`, found `{value}`"
    ))
}

pub fn parse_variant(value: &str) -> Result<GraphVariant, String> {
    match value {
        "paper-literal" => Ok(GraphVariant::PaperLiteral),
        "fallback-standard" => Ok(GraphVariant::FallbackStandard),
        _ => Err(format!(
            "expected `paper-literal` or `fallback-standard`, found `{value}`"
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<ExperimentConfig, ConfigError> {
        text.parse()
    }

    #[test]
    fn defaults_follow_the_reference_design() {
        let c = parse("seed = 3\n").unwrap();
        assert_eq!(c.batch_sizes, vec![1, 10, 25, 100]);
        assert_eq!((c.n, c.trials, c.seed), (1000, 2000, 3));
        assert_eq!(
            c.procedures,
            vec![ProcedureId::Addis, ProcedureId::ClosedAddis]
        );
        assert_eq!(c.scenarios().len(), 8);
    }

    #[test]
    fn comments_lists_and_specs() {
        let c = parse(
            "# desk scale\nseed = 1  # fixed\nn = 200\nbatch_size = 1, 10\npi_A = 0.2,0.5\nmu_N = 0,-2\n\
             procedures = alpha-spending, online-graph\ng = triples:1,2,0.5;2,3,1\ngraph_variant = fallback-standard\n\
             gamma = list:0.5,0.3,0.2\nn = 3\n",
        );
        let err = c.unwrap_err();
        assert_eq!(err.line, Some(11));
        assert!(err.message.contains("duplicate"));

        let c = parse(
            "seed = 1\nn = 200\nbatch_size = 1, 10\npi_A = 0.2,0.5\nmu_N = 0,-2\n\
             procedures = alpha-spending, online-graph\ng = lag1:1\ngraph_variant = fallback-standard\n",
        )
        .unwrap();
        assert_eq!(c.scenarios().len(), 8);
        assert_eq!(c.mu_n, vec![0.0, -2.0]);
        assert_eq!(c.graph_variant, GraphVariant::FallbackStandard);
        assert!(matches!(c.graph, GraphWeights::Lag1(w) if w == 1.0));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = parse("seed = 1\nbogus = 2\n").unwrap_err();
        assert_eq!(e.line, Some(2));
        assert!(e.message.contains("unknown key `bogus`"));

        let e = parse("seed = 1\nalpha = abc\n").unwrap_err();
        assert_eq!(e.line, Some(2));

        let e = parse("seed = 1\njust text\n").unwrap_err();
        assert_eq!(e.line, Some(2));

        let e = parse("seed = 1\ntau = 0.8\nlambda = 0.9\n").unwrap_err();
        assert_eq!(e.line, Some(3));
        assert!(e
            .to_string()
            .contains("lambda must lie in [alpha*tau, tau)"));
    }

    #[test]
    fn seed_is_mandatory() {
        let e = parse("n = 200\n").unwrap_err();
        assert_eq!(e.line, None);
        assert!(e.message.contains("seed"));
    }

    #[test]
    fn scenario_violations_are_config_errors() {
        let e = parse("seed = 1\nn = 205\n").unwrap_err();
        assert!(e.message.contains("multiple"));
        // closed procedures need a declared non-increasing gamma
        let e = parse("seed = 1\nn = 10\nbatch_size = 1\ngamma = list:0,1\nprocedures = closed-alpha-spending\n")
            .unwrap_err();
        assert_eq!(e.line, Some(5));
    }

    #[test]
    fn graph_specs() {
        assert!(parse_graph("triples:1,2,0.5;1,3,0.5").is_ok());
        assert!(parse_graph("triples:2,1,0.5").is_err());
        assert!(parse_graph("triples:1,2").is_err());
        assert!(parse_graph("lag1:1.5").is_err());
        assert!(parse_gamma("harmonic").is_err());
    }
}
