use std::path::Path;

use clap::Args;
use serde::{Deserialize, Serialize};

use hmhp::generator::{generate_cascades, generate_documents, random_follow_network, sample_model_parameters, GeneratorConfig, RateSpec};
use hmhp::io::{csv_float, write_csv};
use hmhp::model::{Hyperparameters, ObservationWindow};
use hmhp::sampler::SweepTiming;
use hmhp::{run_gibbs, Dataset, SamplerConfig};

use crate::config::{required, usage, CliError, Command, Common};

/// Branching ratio of the synthetic data: expected children per event.
const BRANCHING: f64 = 0.5;
const GENERATING_TOPICS: usize = 20;

#[derive(Args, Serialize, Deserialize, Default, Debug, Clone)]
pub struct BenchArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    /// Event counts [default: 10000,100000]
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    /// Topic counts [default: 25,50,100]
    #[arg(long, value_delimiter = ',')]
    pub topics: Option<Vec<usize>>,
    /// Timed sweeps per run [default: 1]
    #[arg(long)]
    pub sweeps: Option<usize>,
    /// [default: 1000]
    #[arg(long)]
    pub nodes: Option<usize>,
    /// Followees per node [default: 10]
    #[arg(long)]
    pub followees: Option<usize>,
    /// [default: 1000]
    #[arg(long)]
    pub vocab_size: Option<usize>,
    /// Window length in hours [default: 1000]
    #[arg(long)]
    pub window: Option<f64>,
}

impl Command for BenchArgs {
    const NAME: &'static str = "bench";

    fn common(&self) -> &Common {
        &self.common
    }

    fn common_mut(&mut self) -> &mut Common {
        &mut self.common
    }

    fn fill(&mut self) -> Result<(), CliError> {
        self.sizes.get_or_insert_with(|| vec![10_000, 100_000]);
        self.topics.get_or_insert_with(|| vec![25, 50, 100]);
        if *self.sweeps.get_or_insert(1) == 0 {
            return Err(usage("--sweeps must be at least 1"));
        }
        self.nodes.get_or_insert(1000);
        self.followees.get_or_insert(10);
        self.vocab_size.get_or_insert(1000);
        self.window.get_or_insert(1000.0);
        Ok(())
    }

    fn run(&self, out: &Path) -> Result<(), CliError> {
        let seed = required(&self.common.seed, "seed")?;
        let sweeps = required(&self.sweeps, "sweeps")?;
        let vocab = required(&self.vocab_size, "vocab-size")?;
        let head = "events,topics,sweeps,topic_secs,parent_secs,strength_secs,total_secs";
        let mut rows = Vec::new();
        for &size in &required(&self.sizes, "sizes")? {
            let data = synthetic(self, size, seed)?;
            log::info!("{} events on {} nodes", data.len(), data.network.node_count());
            for &k in &required(&self.topics, "topics")? {
                let mut cfg = SamplerConfig::new(Hyperparameters::defaults(k, vocab));
                cfg.iterations = sweeps;
                cfg.burn_in = 0;
                cfg.seed = seed;
                cfg.record_trace = false;
                cfg.check_counts = false;
                let result = run_gibbs(&data, &cfg)?;
                let n = result.timings.len() as f64;
                let mean = |f: fn(&SweepTiming) -> f64| csv_float(result.timings.iter().map(f).sum::<f64>() / n);
                let row = format!(
                    "{},{k},{sweeps},{},{},{},{}",
                    data.len(),
                    mean(|t| t.topic_secs),
                    mean(|t| t.parent_secs),
                    mean(|t| t.strength_secs),
                    mean(|t| t.total_secs)
                );
                log::info!("{row}");
                rows.push(row);
            }
        }
        write_csv(&out.join("bench.csv"), head, rows.iter().cloned())?;
        println!("{head}");
        for r in &rows {
            println!("{r}");
        }
        Ok(())
    }
}

/// Random follow network with uniform strengths; base rates sized so the
/// window holds a little more than `size` events, then capped at `size`.
fn synthetic(args: &BenchArgs, size: usize, seed: u64) -> Result<Dataset, CliError> {
    let nodes = required(&args.nodes, "nodes")?;
    let followees = required(&args.followees, "followees")?;
    let horizon = required(&args.window, "window")?;
    let network = random_follow_network(nodes, followees, seed)?;
    let w = BRANCHING / followees as f64;
    let mu = 1.1 * size as f64 * (1.0 - BRANCHING) / (nodes as f64 * horizon);
    let rates = RateSpec::per_edge(&network, vec![w; network.edge_count()], vec![mu; nodes]);
    let hyper = Hyperparameters::symmetric(GENERATING_TOPICS, required(&args.vocab_size, "vocab-size")?, 0.1, 0.1, 0.1);
    let params = sample_model_parameters(&network, &hyper, seed, Some(rates))?;
    let mut config = GeneratorConfig::new(seed, ObservationWindow::new(0.0, horizon)?);
    config.max_events = Some(size);
    let (cascades, _) = generate_cascades(&network, &params, &config)?;
    Ok(generate_documents(&cascades, &params, 7.0, seed)?)
}
