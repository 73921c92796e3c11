use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::Args;
use netdoe::{augment_blocks, augment_crossover, augment_row_column, fixtures, parse_network_file, Network};

/// `RxC` / `SxP` layout dimensions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Grid {
    pub first: usize,
    pub second: usize,
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s
            .split_once(['x', 'X'])
            .ok_or_else(|| format!("expected AxB, got `{s}`"))?;
        let parse = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("`{t}` is not a count"));
        Ok(Grid {
            first: parse(a)?,
            second: parse(b)?,
        })
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.first, self.second)
    }
}

/// Where the network comes from; exactly one source flag is accepted.
#[derive(Args, Clone, Debug)]
pub struct SourceArgs {
    /// Network file: an edge list (`1-2, 2->3`) with an optional
    /// `n=<count> directed=<0|1>` header and `B<k>: class=.. fixed=.. units=..`
    /// block lines.
    #[arg(long, value_name = "PATH", group = "source")]
    pub network: Option<PathBuf>,

    /// Node count, for network files without a header.
    #[arg(long = "n", value_name = "COUNT", requires = "network")]
    pub n: Option<usize>,

    /// Treat a headerless network file as directed.
    #[arg(long, requires = "network")]
    pub directed: bool,

    /// Bundled reference network 1-6.
    #[arg(long, value_name = "K", group = "source")]
    pub example: Option<usize>,

    /// One-way blocked layout from comma-separated block sizes, e.g. `3,3,3`.
    #[arg(long, value_name = "S1,S2,..", value_delimiter = ',', group = "source")]
    pub blocks: Option<Vec<usize>>,

    /// Row-column layout with one unit per cell, e.g. `4x4`.
    #[arg(long = "row-column", value_name = "RxC", group = "source")]
    pub row_column: Option<Grid>,

    /// Crossover layout of subjects by periods with first-order carryover,
    /// e.g. `6x3`. Subjects are blocks.
    #[arg(long, value_name = "SxP", group = "source")]
    pub crossover: Option<Grid>,

    /// With `--crossover`, also block on periods.
    #[arg(long, requires = "crossover")]
    pub period_blocks: bool,
}

impl SourceArgs {
    /// Builds the network; layouts need `m` to number their block
    /// pseudo-treatments.
    pub fn load(&self, m: usize) -> Result<Network> {
        if let Some(path) = &self.network {
            let text =
                std::fs::read_to_string(path).with_context(|| format!("reading network file {}", path.display()))?;
            let directed = self.directed.then_some(true);
            return parse_network_file(&text, self.n, directed)
                .with_context(|| format!("parsing network file {}", path.display()));
        }
        if let Some(k) = self.example {
            if !(1..=fixtures::NETWORK_FIXTURES.len()).contains(&k) {
                bail!(InputError(format!("--example must be between 1 and 6, got {k}")));
            }
            return Ok(fixtures::example(k));
        }
        if let Some(sizes) = &self.blocks {
            return Ok(augment_blocks(sizes, m)?);
        }
        if let Some(g) = self.row_column {
            return Ok(augment_row_column(g.first, g.second, m)?);
        }
        if let Some(g) = self.crossover {
            return Ok(augment_crossover(g.first, g.second, m, self.period_blocks)?);
        }
        bail!(InputError(
            "a network source is required: --network, --example, --blocks, --row-column or --crossover".into()
        ))
    }
}

/// Bad command-line input that clap cannot catch.
#[derive(Debug)]
pub struct InputError(pub String);

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!("4x3".parse::<Grid>().unwrap(), Grid { first: 4, second: 3 });
        assert_eq!("2X5".parse::<Grid>().unwrap().to_string(), "2x5");
        assert!("4".parse::<Grid>().is_err());
        assert!("ax3".parse::<Grid>().is_err());
    }
}
