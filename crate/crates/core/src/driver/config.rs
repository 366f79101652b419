use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use num_bigint::BigInt;

use crate::smt::SolverCommand;

/// How many tests a run may execute.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaxTests {
    Count(u64),
    Exhaustive,
}

impl FromStr for MaxTests {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "exhaustive" {
            return Ok(MaxTests::Exhaustive);
        }
        s.parse()
            .map(MaxTests::Count)
            .map_err(|_| format!("expected a test count or `exhaustive`, got `{s}`"))
    }
}

impl fmt::Display for MaxTests {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MaxTests::Count(n) => write!(f, "{n}"),
            MaxTests::Exhaustive => write!(f, "exhaustive"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Config {
    pub depth: u32,
    /// Integers range over `[-n, n]`; defaults to the depth.
    pub int_bound: Option<BigInt>,
    pub max_tests: MaxTests,
    pub solver: SolverCommand,
    pub smt_timeout: Option<Duration>,
    /// Only enforced for external functions.
    pub fut_timeout: Option<Duration>,
    /// Wall-clock limit for the whole run.
    pub time_budget: Option<Duration>,
}

impl Config {
    pub fn new(depth: u32) -> Config {
        Config {
            depth,
            int_bound: None,
            max_tests: MaxTests::Exhaustive,
            solver: SolverCommand::from_env(),
            smt_timeout: None,
            fut_timeout: None,
            time_budget: None,
        }
    }

    pub fn with_bound(mut self, n: impl Into<BigInt>) -> Config {
        self.int_bound = Some(n.into());
        self
    }

    pub fn with_max_tests(mut self, m: MaxTests) -> Config {
        self.max_tests = m;
        self
    }

    pub fn bound(&self) -> BigInt {
        self.int_bound.clone().unwrap_or_else(|| BigInt::from(self.depth))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn max_tests_parsing() {
        assert_eq!("exhaustive".parse::<MaxTests>().unwrap(), MaxTests::Exhaustive);
        assert_eq!("25".parse::<MaxTests>().unwrap(), MaxTests::Count(25));
        assert!("-1".parse::<MaxTests>().is_err());
    }

    #[test]
    fn bound_defaults_to_depth() {
        assert_eq!(Config::new(3).bound(), BigInt::from(3));
        assert_eq!(Config::new(3).with_bound(7).bound(), BigInt::from(7));
    }
}
