//! Re-runs the published comparison tables and prints them as CSV with
//! delta columns (ours minus published).

use std::io::Write;

use anyhow::Result;
use clap::{Args, ValueEnum};
use netdoe::{
    augment_blocks, augment_row_column, coordinate_descent, exhaustive_search, find_automorphisms, fixtures, Criterion,
    ModelSpec, Network, SearchConfig, SearchReport, Validity,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Table {
    /// Exhaustive search with and without automorphisms on the six
    /// reference networks.
    T1,
    /// Coordinate descent against exhaustive search.
    T2,
    /// Block, row-column layouts.
    T4,
}

#[derive(Args, Clone, Debug)]
pub struct ReproduceArgs {
    #[arg(value_enum)]
    pub table: Table,

    /// Include rows that take hours on one core (t4: 4x4 row-column, m=4).
    #[arg(long)]
    pub full: bool,

    /// Coordinate descent restarts (t2).
    #[arg(long, default_value_t = 100)]
    pub restarts: usize,

    /// Coordinate descent seed (t2).
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, value_enum, default_value_t = crate::ValidityArg::NetworkContrasts)]
    pub validity: crate::ValidityArg,

    /// Worker threads (default: all cores).
    #[arg(long)]
    pub workers: Option<usize>,
}

struct Published {
    id: &'static str,
    name: &'static str,
    m: usize,
    z: u64,
    without: u64,
    with: u64,
}

/// Treatment counts match the published evaluation counts.
const TABLE1: [Published; 6] = [
    Published {
        id: "1",
        name: "Small social network",
        m: 2,
        z: 8,
        without: 507,
        with: 236,
    },
    Published {
        id: "2",
        name: "Small social network",
        m: 2,
        z: 1,
        without: 511,
        with: 511,
    },
    Published {
        id: "3",
        name: "Larger social network",
        m: 2,
        z: 8,
        without: 524_287,
        with: 221_183,
    },
    Published {
        id: "4",
        name: "Block design with neighbour effects",
        m: 4,
        z: 384,
        without: 535_008,
        with: 18_766,
    },
    Published {
        id: "5",
        name: "Non-rectangular field trial",
        m: 3,
        z: 2,
        without: 2_368_741,
        with: 1_581_572,
    },
    Published {
        id: "6",
        name: "Crossover trial with dropouts",
        m: 3,
        z: 6,
        without: 2_262_800,
        with: 904_555,
    },
];

/// `(cd evaluations, es evaluations, efficiency)` per reference network.
const TABLE2: [(u64, u64, f64); 6] = [
    (77, 236, 1.0),
    (145, 511, 0.944),
    (127, 221_183, 0.989),
    (14, 18_766, 0.873),
    (82, 1_581_572, 0.931),
    (93, 90_455, 1.0),
];

enum Layout {
    Blocks(&'static [usize]),
    RowColumn(usize, usize),
}

struct BlockRow {
    published: Published,
    layout: Layout,
    slow: bool,
    note: &'static str,
}

const TABLE4: [BlockRow; 6] = [
    BlockRow {
        published: Published {
            id: "1",
            name: "3x3 Blocks",
            m: 3,
            z: 1296,
            without: 2925,
            with: 94,
        },
        layout: Layout::Blocks(&[3, 3, 3]),
        slow: false,
        note: "",
    },
    BlockRow {
        published: Published {
            id: "2i",
            name: "4x3 Blocks",
            m: 3,
            z: 82_944,
            without: 86_126,
            with: 379,
        },
        layout: Layout::Blocks(&[4, 4, 4]),
        slow: false,
        note: "run as 3 blocks of 4 units, the layout whose group has 82944 elements",
    },
    BlockRow {
        published: Published {
            id: "2ii",
            name: "4x3 Blocks",
            m: 4,
            z: 82_944,
            without: 605_960,
            with: 1808,
        },
        layout: Layout::Blocks(&[4, 4, 4]),
        slow: false,
        note: "run as 3 blocks of 4 units, the layout whose group has 82944 elements",
    },
    BlockRow {
        published: Published {
            id: "3",
            name: "3x3 Row Column",
            m: 3,
            z: 241,
            without: 72,
            with: 2807,
        },
        layout: Layout::RowColumn(3, 3),
        slow: false,
        note: "published row lists z and the two counts in permuted columns",
    },
    BlockRow {
        published: Published {
            id: "4i",
            name: "4x4 Row Column",
            m: 3,
            z: 1152,
            without: 7_123_656,
            with: 34_873,
        },
        layout: Layout::RowColumn(4, 4),
        slow: false,
        note: "",
    },
    BlockRow {
        published: Published {
            id: "4ii",
            name: "4x4 Row Column",
            m: 4,
            z: 1152,
            without: 170_863_644,
            with: 1_610_909,
        },
        layout: Layout::RowColumn(4, 4),
        slow: true,
        note: "",
    },
];

struct Runner {
    validity: Validity,
    workers: Option<usize>,
}

impl Runner {
    fn spec(&self, net: &Network, m: usize) -> Result<ModelSpec> {
        Ok(ModelSpec::new(net, m, Criterion::As)?.with_validity(self.validity))
    }

    fn config(&self, base: SearchConfig) -> SearchConfig {
        let mut config = base;
        config.workers = self.workers;
        config
    }

    fn exhaustive(&self, net: &Network, m: usize, autos: bool) -> Result<SearchReport> {
        let spec = self.spec(net, m)?;
        Ok(exhaustive_search(
            net,
            &spec,
            &self.config(SearchConfig::exhaustive().with_automorphisms(autos)),
        )?)
    }

    /// `[z, without, with]` and the two timings.
    fn comparison(&self, net: &Network, m: usize) -> Result<([u64; 3], [f64; 2])> {
        let z = find_automorphisms(net)?.size() as u64;
        let without = self.exhaustive(net, m, false)?;
        let with = self.exhaustive(net, m, true)?;
        Ok((
            [z, without.num_eval, with.num_eval],
            [without.wall_time, with.wall_time],
        ))
    }
}

fn delta(ours: u64, published: u64) -> String {
    (ours as i128 - published as i128).to_string()
}

fn comparison_record(net: &Network, p: &Published, ours: [u64; 3], times: [f64; 2]) -> Vec<String> {
    vec![
        p.id.to_string(),
        p.name.to_string(),
        net.design_count().to_string(),
        p.m.to_string(),
        ours[0].to_string(),
        p.z.to_string(),
        delta(ours[0], p.z),
        ours[1].to_string(),
        p.without.to_string(),
        delta(ours[1], p.without),
        ours[2].to_string(),
        p.with.to_string(),
        delta(ours[2], p.with),
        format!("{:.3}", times[0]),
        format!("{:.3}", times[1]),
    ]
}

const COMPARISON_HEADER: [&str; 15] = [
    "example",
    "name",
    "n",
    "m",
    "z",
    "published_z",
    "delta_z",
    "evals_without",
    "published_without",
    "delta_without",
    "evals_with",
    "published_with",
    "delta_with",
    "time_without",
    "time_with",
];

pub fn run(args: &ReproduceArgs, out: impl Write) -> Result<()> {
    let runner = Runner {
        validity: args.validity.into(),
        workers: args.workers,
    };
    let mut w = csv::Writer::from_writer(out);
    match args.table {
        Table::T1 => {
            w.write_record(COMPARISON_HEADER)?;
            for (k, p) in TABLE1.iter().enumerate() {
                let net = fixtures::example(k + 1);
                let (ours, times) = runner.comparison(&net, p.m)?;
                w.write_record(comparison_record(&net, p, ours, times))?;
                w.flush()?;
            }
        }
        Table::T4 => {
            let mut header = COMPARISON_HEADER.to_vec();
            header.push("note");
            w.write_record(header)?;
            for row in TABLE4.iter().filter(|r| args.full || !r.slow) {
                let p = &row.published;
                let net = match row.layout {
                    Layout::Blocks(sizes) => augment_blocks(sizes, p.m)?,
                    Layout::RowColumn(r, c) => augment_row_column(r, c, p.m)?,
                };
                let (ours, times) = runner.comparison(&net, p.m)?;
                let mut record = comparison_record(&net, p, ours, times);
                record.push(row.note.to_string());
                w.write_record(record)?;
                w.flush()?;
            }
        }
        Table::T2 => {
            w.write_record([
                "example",
                "name",
                "n",
                "m",
                "z",
                "evals_cd",
                "published_evals_cd",
                "evals_es",
                "published_evals_es",
                "efficiency",
                "published_efficiency",
                "delta_efficiency",
                "time_cd",
                "time_es",
            ])?;
            for (k, (p, &(published_cd, published_es, published_eff))) in TABLE1.iter().zip(TABLE2.iter()).enumerate() {
                let net = fixtures::example(k + 1);
                let spec = runner.spec(&net, p.m)?;
                let z = find_automorphisms(&net)?.size();
                let es = runner.exhaustive(&net, p.m, true)?;
                let cd_config = runner.config(SearchConfig::coordinate_descent(args.restarts, args.seed));
                let mut cd = coordinate_descent(&net, &spec, &cd_config)?;
                if let Some(optimum) = es.best_value {
                    cd = cd.with_reference(optimum);
                }
                let efficiency = cd.efficiency.unwrap_or(f64::NAN);
                w.write_record([
                    p.id.to_string(),
                    p.name.to_string(),
                    net.design_count().to_string(),
                    p.m.to_string(),
                    z.to_string(),
                    cd.num_eval.to_string(),
                    published_cd.to_string(),
                    es.num_eval.to_string(),
                    published_es.to_string(),
                    format!("{efficiency:.4}"),
                    published_eff.to_string(),
                    format!("{:.4}", efficiency - published_eff),
                    format!("{:.3}", cd.wall_time),
                    format!("{:.3}", es.wall_time),
                ])?;
                w.flush()?;
            }
        }
    }
    w.flush()?;
    Ok(())
}
