use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};
use serde_json::json;

use hmhp::generator::{
    build_circular_network, build_semisynthetic, generate_cascades, generate_documents, one_hot_preferences,
    sample_model_parameters, GeneratorConfig, RateSpec, SemiSynthRecipe,
};
use hmhp::io::{read_events, read_graph, read_params, write_events, write_graph, write_params};
use hmhp::model::{EdgeGrouping, Hyperparameters, Network, ObservationWindow};

use crate::config::{required, usage, write_versioned, CliError, Command, Common};

#[derive(Args, Serialize, Deserialize, Default, Debug, Clone)]
pub struct GenerateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    /// Ring of N nodes, each with a self edge (W 0.3) and a successor edge (W 0.15).
    #[arg(long, value_name = "N")]
    pub circular: Option<usize>,
    /// Follow graph, one `u<TAB>v` edge per line (v follows u).
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Generating parameters with their network; sampled from the priors when absent.
    #[arg(long)]
    pub params: Option<PathBuf>,
    /// Unlabeled events to fit a semi-synthetic model to (needs --graph).
    #[arg(long)]
    pub source: Option<PathBuf>,
    /// Window length in hours [default: 1000]
    #[arg(long)]
    pub window: Option<f64>,
    /// Window start [default: 0]
    #[arg(long)]
    pub start: Option<f64>,
    /// Keep only the earliest events.
    #[arg(long)]
    pub max_events: Option<usize>,
    /// Number of topics K [default: 10]
    #[arg(long)]
    pub topics: Option<usize>,
    /// Vocabulary size [default: 500]
    #[arg(long)]
    pub vocab_size: Option<usize>,
    /// Topic-word Dirichlet [default: 0.1]
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Topic-transition Dirichlet [default: 0.01]
    #[arg(long)]
    pub beta: Option<f64>,
    /// User-topic Dirichlet [default: 0.1]
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Base rate per node, events per hour [default: 0.02 circular, 0.01 otherwise]
    #[arg(long)]
    pub mu: Option<f64>,
    /// One strength for every edge [default: ring weights, or 0.5 / out-degree]
    #[arg(long)]
    pub w: Option<f64>,
    /// Poisson mean of document length [default: 7]
    #[arg(long)]
    pub doc_length: Option<f64>,
    /// Expand cascade levels on all threads (same output).
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub parallel: Option<bool>,
    /// Semi-synthetic: hours within which the latest followee event is the parent [default: 24]
    #[arg(long)]
    pub parent_window: Option<f64>,
    /// Semi-synthetic: sweeps of the topic fit [default: 50]
    #[arg(long)]
    pub topic_sweeps: Option<usize>,
}

impl Command for GenerateArgs {
    const NAME: &'static str = "generate";

    fn common(&self) -> &Common {
        &self.common
    }

    fn common_mut(&mut self) -> &mut Common {
        &mut self.common
    }

    fn fill(&mut self) -> Result<(), CliError> {
        let sources = [self.circular.is_some(), self.graph.is_some() && self.source.is_none(), self.params.is_some()];
        if self.source.is_some() {
            if self.graph.is_none() || self.circular.is_some() || self.params.is_some() {
                return Err(usage("--source needs --graph and excludes --circular and --params"));
            }
        } else if sources.iter().filter(|&&s| s).count() != 1 {
            return Err(usage("give exactly one of --circular, --graph or --params"));
        }
        if self.params.is_some() && (self.mu.is_some() || self.w.is_some()) {
            return Err(usage("--mu and --w cannot override a --params file"));
        }
        self.window.get_or_insert(1000.0);
        self.start.get_or_insert(0.0);
        self.topics.get_or_insert(10);
        self.vocab_size.get_or_insert(500);
        self.alpha.get_or_insert(0.1);
        self.beta.get_or_insert(0.01);
        self.gamma.get_or_insert(0.1);
        self.doc_length.get_or_insert(7.0);
        self.parallel.get_or_insert(false);
        if self.source.is_some() {
            self.parent_window.get_or_insert(24.0);
            self.topic_sweeps.get_or_insert(50);
        }
        if self.circular.is_some() {
            self.mu.get_or_insert(0.02);
        }
        Ok(())
    }

    fn run(&self, out: &Path) -> Result<(), CliError> {
        let seed = required(&self.common.seed, "seed")?;
        let start = required(&self.start, "start")?;
        let window = ObservationWindow::new(start, start + required(&self.window, "window")?)?;
        let k = required(&self.topics, "topics")?;
        let vocab = required(&self.vocab_size, "vocab-size")?;
        let doc_length = required(&self.doc_length, "doc-length")?;
        let mut hyper = Hyperparameters::symmetric(
            k,
            vocab,
            required(&self.alpha, "alpha")?,
            required(&self.beta, "beta")?,
            required(&self.gamma, "gamma")?,
        );
        hyper.doc_length_rate = doc_length;

        if let Some(source) = &self.source {
            let network = read_graph(required(&self.graph, "graph")?.as_path())?;
            let real = read_events(source, &network, None, Some(window))?;
            let recipe = SemiSynthRecipe {
                source: real,
                topics: k,
                doc_length_rate: doc_length,
                parent_window: required(&self.parent_window, "parent-window")?,
                topic_sweeps: required(&self.topic_sweeps, "topic-sweeps")?,
                grouping: EdgeGrouping::Degree,
            };
            let (data, params, report) = build_semisynthetic(&recipe, seed, self.max_events)?;
            return finish(out, &data.network, &data, &params, &report);
        }

        let (network, params) = if let Some(path) = &self.params {
            read_params::<f64>(path)?
        } else {
            let (network, ring_w) = match self.circular {
                Some(n) => {
                    let (net, w) = build_circular_network::<f64>(n)?;
                    (net, Some(w))
                }
                None => (read_graph(required(&self.graph, "graph")?.as_path())?, None),
            };
            let mut rates = RateSpec::defaults(&network);
            if let Some(w) = ring_w {
                rates = RateSpec::per_edge(&network, w, rates.mu);
            }
            if let Some(w) = self.w {
                rates = RateSpec::per_edge(&network, vec![w; network.edge_count()], rates.mu);
            }
            if let Some(mu) = self.mu {
                rates.mu = vec![mu; network.node_count()];
            }
            let mut params = sample_model_parameters(&network, &hyper, seed, Some(rates))?;
            if self.circular.is_some() {
                params.phi = one_hot_preferences(network.node_count(), k);
            }
            (network, params)
        };
        let mut config = GeneratorConfig::new(seed, window);
        config.max_events = self.max_events;
        config.parallel = self.parallel == Some(true);
        let (cascades, report) = generate_cascades(&network, &params, &config)?;
        let data = generate_documents(&cascades, &params, doc_length, seed)?;
        finish(out, &network, &data, &params, &report)
    }
}

fn finish(
    out: &Path,
    network: &Network,
    data: &hmhp::Dataset,
    params: &hmhp::ModelParameters,
    report: &hmhp::generator::GenerationReport,
) -> Result<(), CliError> {
    for w in &report.warnings {
        log::warn!("{w}");
    }
    write_graph(&out.join("graph.tsv"), network)?;
    write_events(&out.join("events.jsonl"), data)?;
    write_params(&out.join("params.json"), network, params)?;
    write_versioned(&out.join("generation-report.json"), report)?;
    let summary = json!({
        "events": data.len(),
        "levels": report.level_counts.len(),
        "dropped": report.dropped_events,
        "warnings": report.warnings.len(),
    });
    println!("{summary}");
    Ok(())
}
