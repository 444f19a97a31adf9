use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};
use serde_json::json;

use hmhp::io::{read_events, read_graph, read_params, read_vocabulary, write_assignments, write_params, write_trace, write_w_groups};
use hmhp::model::{EdgeGrouping, Hyperparameters, ObservationWindow};
use hmhp::{run_gibbs, Dataset, SamplerConfig, SamplerMode};

use crate::config::{data, required, usage, CliError, Command, Common};

#[derive(Args, Serialize, Deserialize, Default, Debug, Clone)]
pub struct InferArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    /// Events, JSON Lines.
    #[arg(long)]
    pub events: Option<PathBuf>,
    /// Follow graph, one `u<TAB>v` edge per line.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// One word per line; line i is token id i.
    #[arg(long)]
    pub vocab: Option<PathBuf>,
    /// Vocabulary size when no --vocab is given [default: largest token id + 1]
    #[arg(long)]
    pub vocab_size: Option<usize>,
    /// full, diag or decoupled [default: full]
    #[arg(long)]
    pub mode: Option<SamplerMode>,
    /// Number of topics K [default: 10]
    #[arg(long)]
    pub topics: Option<usize>,
    /// Gibbs sweeps [default: 500]
    #[arg(long)]
    pub iters: Option<usize>,
    /// Sweeps before parent probabilities are averaged [default: iters / 2]
    #[arg(long)]
    pub burn_in: Option<usize>,
    /// Hours a parent may precede its child [default: 24]
    #[arg(long)]
    pub window_hours: Option<f64>,
    /// Most recent candidate parents considered per event [default: 100]
    #[arg(long)]
    pub max_candidates: Option<usize>,
    /// Hold base rates at the values in this params.json.
    #[arg(long)]
    pub fixed_mu: Option<PathBuf>,
    /// Strength sharing: degree or per-edge [default: degree]
    #[arg(long)]
    pub grouping: Option<EdgeGrouping>,
    /// Topic-word Dirichlet [default: 0.01]
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Topic-transition Dirichlet [default: 0.01]
    #[arg(long)]
    pub beta: Option<f64>,
    /// User-topic Dirichlet [default: 0.1]
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Gamma prior shape on strengths [default: 2]
    #[arg(long)]
    pub w_shape: Option<f64>,
    /// Gamma prior scale on strengths [default: 0.5]
    #[arg(long)]
    pub w_scale: Option<f64>,
    /// Ranked parents kept per event [default: 10]
    #[arg(long)]
    pub rank_depth: Option<usize>,
    /// Recount all tables after every sweep [default: false]
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub check_counts: Option<bool>,
    /// Joint log-likelihood per sweep in trace.csv [default: true]
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub trace: Option<bool>,
}

impl Command for InferArgs {
    const NAME: &'static str = "infer";

    fn common(&self) -> &Common {
        &self.common
    }

    fn common_mut(&mut self) -> &mut Common {
        &mut self.common
    }

    fn fill(&mut self) -> Result<(), CliError> {
        required(&self.events, "events")?;
        required(&self.graph, "graph")?;
        if self.vocab.is_some() && self.vocab_size.is_some() {
            return Err(usage("--vocab and --vocab-size are exclusive"));
        }
        self.mode.get_or_insert(SamplerMode::Full);
        self.topics.get_or_insert(10);
        let iters = *self.iters.get_or_insert(500);
        self.burn_in.get_or_insert(iters / 2);
        self.window_hours.get_or_insert(24.0);
        self.max_candidates.get_or_insert(100);
        self.grouping.get_or_insert(EdgeGrouping::Degree);
        self.alpha.get_or_insert(0.01);
        self.beta.get_or_insert(0.01);
        self.gamma.get_or_insert(0.1);
        self.w_shape.get_or_insert(2.0);
        self.w_scale.get_or_insert(0.5);
        self.rank_depth.get_or_insert(10);
        self.check_counts.get_or_insert(false);
        self.trace.get_or_insert(true);
        Ok(())
    }

    fn run(&self, out: &Path) -> Result<(), CliError> {
        let network = read_graph(&required(&self.graph, "graph")?)?;
        let vocabulary = self.vocab.as_deref().map(read_vocabulary).transpose()?;
        let dataset: Dataset = read_events(&required(&self.events, "events")?, &network, vocabulary.as_deref(), None::<ObservationWindow>)?;
        let vocab = match (&vocabulary, self.vocab_size) {
            (Some(v), _) => v.len(),
            (None, Some(n)) => n,
            (None, None) => dataset.max_token_bound().max(1),
        };
        let mut hyper = Hyperparameters::symmetric(
            required(&self.topics, "topics")?,
            vocab,
            required(&self.alpha, "alpha")?,
            required(&self.beta, "beta")?,
            required(&self.gamma, "gamma")?,
        );
        hyper.w_prior_shape = required(&self.w_shape, "w-shape")?;
        hyper.w_prior_scale = required(&self.w_scale, "w-scale")?;
        let mut cfg = SamplerConfig::new(hyper);
        cfg.mode = required(&self.mode, "mode")?;
        cfg.iterations = required(&self.iters, "iters")?;
        cfg.burn_in = required(&self.burn_in, "burn-in")?;
        cfg.candidate_window = required(&self.window_hours, "window-hours")?;
        cfg.max_candidates = required(&self.max_candidates, "max-candidates")?;
        cfg.seed = required(&self.common.seed, "seed")?;
        cfg.grouping = required(&self.grouping, "grouping")?;
        cfg.rank_depth = required(&self.rank_depth, "rank-depth")?;
        cfg.check_counts = self.check_counts == Some(true);
        cfg.record_trace = self.trace == Some(true);
        if let Some(path) = &self.fixed_mu {
            let (net, params) = read_params::<f64>(path)?;
            let mu = dataset
                .network
                .node_ids()
                .iter()
                .map(|&id| {
                    net.dense(id)
                        .map(|d| params.mu[d])
                        .ok_or_else(|| data(format!("{}: no base rate for node {id}", path.display())))
                })
                .collect::<Result<Vec<_>, _>>()?;
            cfg.fixed_mu = Some(mu);
        }
        cfg.validate()?;
        log::info!(
            "{} events, {} nodes, {} edges, K = {}, vocabulary {vocab}, mode {}",
            dataset.len(),
            network.node_count(),
            network.edge_count(),
            cfg.topics(),
            cfg.mode
        );
        let result = run_gibbs(&dataset, &cfg)?;
        if !result.timings.is_empty() {
            let n = result.timings.len() as f64;
            let mean = |f: fn(&hmhp::sampler::SweepTiming) -> f64| result.timings.iter().map(f).sum::<f64>() / n;
            log::info!(
                "mean sweep {:.4}s (topics {:.4}s, parents {:.4}s, strengths {:.4}s)",
                mean(|t| t.total_secs),
                mean(|t| t.topic_secs),
                mean(|t| t.parent_secs),
                mean(|t| t.strength_secs)
            );
        }
        write_assignments(&out.join("assignments.jsonl"), &dataset, &result)?;
        write_w_groups(&out.join("w_groups.csv"), &dataset, &result)?;
        write_params(&out.join("params.json"), &dataset.network, &result.params())?;
        write_trace(&out.join("trace.csv"), &result.trace)?;
        let summary = json!({
            "events": dataset.len(),
            "iterations": cfg.iterations,
            "final_joint_ll": result.trace.last().map(|r| r.joint_ll),
            "diffusion_events": result.parents.iter().filter(|p| !p.is_spontaneous()).count(),
        });
        println!("{summary}");
        Ok(())
    }
}
