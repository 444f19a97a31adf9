use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};

use hmhp::evaluation::{
    assignment_accuracy, children_per_node, network_error, parent_metrics, strength_pairs, topic_pair_metrics,
    EvalReport,
};
use hmhp::io::{align_assignments, read_assignments, read_events, read_graph, read_params, read_vocabulary, write_csv};
use hmhp::model::{Network, ObservationWindow, Parent};
use hmhp::{Dataset, ModelParameters};

use crate::config::{data, required, usage, write_versioned, CliError, Command, Common};

#[derive(Args, Serialize, Deserialize, Default, Debug, Clone)]
pub struct EvalArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    /// Events with gold `topic` and `parent` fields.
    #[arg(long)]
    pub gold: Option<PathBuf>,
    /// Generating parameters; enables the strength error metrics.
    #[arg(long)]
    pub gold_params: Option<PathBuf>,
    /// Follow graph [default: the network in --gold-params, else in the prediction's params.json]
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Output directory of `infer` (assignments.jsonl, params.json).
    #[arg(long)]
    pub pred: Option<PathBuf>,
    #[arg(long)]
    pub vocab: Option<PathBuf>,
    /// Cutoffs for recall@k [default: 1,3,5,7]
    #[arg(long, value_delimiter = ',')]
    pub ks: Option<Vec<usize>>,
    /// Minimum children at the source node for an edge to count as active [default: 100]
    #[arg(long)]
    pub active_threshold: Option<u64>,
    /// Event pairs sampled for topic precision/recall [default: 10000]
    #[arg(long)]
    pub topic_pairs: Option<usize>,
}

impl Command for EvalArgs {
    const NAME: &'static str = "eval";

    fn common(&self) -> &Common {
        &self.common
    }

    fn common_mut(&mut self) -> &mut Common {
        &mut self.common
    }

    fn fill(&mut self) -> Result<(), CliError> {
        required(&self.gold, "gold")?;
        required(&self.pred, "pred")?;
        let ks = self.ks.get_or_insert_with(|| vec![1, 3, 5, 7]);
        if ks.is_empty() || ks.contains(&0) {
            return Err(usage("--ks needs positive cutoffs"));
        }
        self.active_threshold.get_or_insert(100);
        self.topic_pairs.get_or_insert(10_000);
        Ok(())
    }

    fn run(&self, out: &Path) -> Result<(), CliError> {
        let pred_dir = required(&self.pred, "pred")?;
        let pred_params_path = pred_dir.join("params.json");
        let gold_params = self.gold_params.as_deref().map(read_params::<f64>).transpose()?;
        let pred_params = if pred_params_path.exists() { Some(read_params::<f64>(&pred_params_path)?) } else { None };
        let network: Network = match (&self.graph, &gold_params, &pred_params) {
            (Some(g), _, _) => read_graph(g)?,
            (None, Some((net, _)), _) | (None, None, Some((net, _))) => net.clone(),
            (None, None, None) => return Err(usage("no network: give --graph or --gold-params")),
        };
        let vocabulary = self.vocab.as_deref().map(read_vocabulary).transpose()?;
        let gold_path = required(&self.gold, "gold")?;
        let gold: Dataset = read_events(&gold_path, &network, vocabulary.as_deref(), None::<ObservationWindow>)?;
        let assignments = read_assignments::<f64>(&pred_dir.join("assignments.jsonl"))?;
        let aligned = align_assignments(&gold, &assignments)?;

        let ranked: Vec<Vec<(Parent, f64)>> = aligned
            .iter()
            .map(|a| if a.ranked.is_empty() { vec![(a.parent, 1.0)] } else { a.ranked.clone() })
            .collect();
        let ks = required(&self.ks, "ks")?;
        let parents = parent_metrics(&gold, &ranked, &ks)?;
        let predicted: Vec<Parent> = aligned.iter().map(|a| a.parent).collect();
        let gold_topics = gold
            .events()
            .iter()
            .map(|e| e.topic.ok_or_else(|| data(format!("{}: event {} has no gold topic", gold_path.display(), e.id))))
            .collect::<Result<Vec<_>, _>>()?;
        let pred_topics: Vec<usize> = aligned.iter().map(|a| a.topic).collect();
        let topics = topic_pair_metrics(
            &gold_topics,
            &pred_topics,
            required(&self.topic_pairs, "topic-pairs")?,
            required(&self.common.seed, "seed")?,
        )?;

        let strengths = match (&gold_params, &pred_params) {
            (Some((gnet, g)), Some((pnet, p))) => {
                same_edges(&network, gnet, "--gold-params")?;
                same_edges(&network, pnet, &pred_params_path.display().to_string())?;
                Some(strength_error(&network, &gold, g, p, required(&self.active_threshold, "active-threshold")?)?)
            }
            _ => None,
        };
        let mut report = EvalReport::new(&parents, &topics, strengths.as_ref());
        report.assignment_accuracy = Some(assignment_accuracy(&gold, &predicted)?);

        write_versioned(&out.join("report.json"), &report)?;
        let (head, row) = report.csv();
        write_csv(&out.join("report.csv"), &head, [row.clone()])?;
        println!("{head}\n{row}");
        Ok(())
    }
}

fn same_edges(a: &Network, b: &Network, what: &str) -> Result<(), CliError> {
    if a.edge_ids().eq(b.edge_ids()) {
        Ok(())
    } else {
        Err(data(format!("{what}: network differs from the evaluation network")))
    }
}

fn strength_error(
    network: &Network,
    gold: &Dataset,
    gold_params: &ModelParameters,
    est: &ModelParameters,
    threshold: u64,
) -> Result<hmhp::evaluation::NetworkError, CliError> {
    let activity = children_per_node(gold)?;
    let pairs = strength_pairs(network, gold_params, est, &activity)?;
    Ok(network_error(&pairs, threshold)?)
}
