use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};
use serde_json::json;

use hmhp::io::{csv_float, read_params, read_vocabulary, write_csv};
use hmhp::topic_analysis::{asymmetric_pairs, gini, hits_scores, personalized_pagerank, top_words_per_topic, TopicGraph};

use crate::config::{data, required, usage, write_versioned, CliError, Command, Common};

#[derive(Args, Serialize, Deserialize, Default, Debug, Clone)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    /// params.json with the transition matrix and topic-word table.
    #[arg(long)]
    pub params: Option<PathBuf>,
    /// One word per line, for topic_words.txt.
    #[arg(long)]
    pub vocab: Option<PathBuf>,
    /// Keep transition weights above this for HITS [default: 0.1]
    #[arg(long)]
    pub threshold: Option<f64>,
    /// PageRank restart probability [default: 0.15]
    #[arg(long)]
    pub restart: Option<f64>,
    /// Topics removed before PageRank, e.g. generic ones.
    #[arg(long, value_delimiter = ',')]
    pub exclude: Option<Vec<usize>>,
    /// PageRank start topics [default: every topic not excluded]
    #[arg(long, value_delimiter = ',')]
    pub starts: Option<Vec<usize>>,
    /// Asymmetric pairs reported [default: 10]
    #[arg(long)]
    pub top_pairs: Option<usize>,
    /// Topics reported per PageRank start [default: 3]
    #[arg(long)]
    pub top_n: Option<usize>,
    /// Words per topic [default: 5]
    #[arg(long)]
    pub top_words: Option<usize>,
    /// HITS iteration cap [default: 10000]
    #[arg(long)]
    pub hits_iters: Option<usize>,
    /// HITS convergence tolerance [default: 1e-12]
    #[arg(long)]
    pub tol: Option<f64>,
}

impl Command for AnalyzeArgs {
    const NAME: &'static str = "analyze";

    fn common(&self) -> &Common {
        &self.common
    }

    fn common_mut(&mut self) -> &mut Common {
        &mut self.common
    }

    fn fill(&mut self) -> Result<(), CliError> {
        required(&self.params, "params")?;
        self.threshold.get_or_insert(0.1);
        let restart = *self.restart.get_or_insert(0.15);
        if !(restart > 0.0 && restart <= 1.0) {
            return Err(usage("--restart must be in (0, 1]"));
        }
        self.exclude.get_or_insert_with(Vec::new);
        self.top_pairs.get_or_insert(10);
        self.top_n.get_or_insert(3);
        self.top_words.get_or_insert(5);
        self.hits_iters.get_or_insert(10_000);
        self.tol.get_or_insert(1e-12);
        Ok(())
    }

    fn run(&self, out: &Path) -> Result<(), CliError> {
        let (_, params) = read_params::<f64>(&required(&self.params, "params")?)?;
        let k = params.topics();
        let excluded = required(&self.exclude, "exclude")?;
        if let Some(&bad) = excluded.iter().find(|&&t| t >= k) {
            return Err(data(format!("excluded topic {bad} outside [0, {k})")));
        }
        let trans = &params.trans;

        let pairs = asymmetric_pairs(trans, required(&self.top_pairs, "top-pairs")?);
        let rows = pairs.iter().map(|&(a, b, s)| format!("{a},{b},{}", csv_float(s)));
        write_csv(&out.join("asymmetric.csv"), "k,k_prime,score", rows)?;

        let graph = TopicGraph::from_transitions(trans, required(&self.threshold, "threshold")?, true)?;
        let hits = hits_scores(&graph, required(&self.hits_iters, "hits-iters")?, required(&self.tol, "tol")?);
        if hits.degenerate {
            log::warn!("no transition weight above the threshold; HITS scores are uniform");
        }
        let rows = (0..k).map(|t| format!("{t},{},{}", csv_float(hits.hubs[t]), csv_float(hits.authorities[t])));
        write_csv(&out.join("hits.csv"), "topic,hub,authority", rows)?;

        let starts = match &self.starts {
            Some(s) => s.clone(),
            None => (0..k).filter(|t| !excluded.contains(t)).collect(),
        };
        let restart = required(&self.restart, "restart")?;
        let top_n = required(&self.top_n, "top-n")?;
        for &s in &starts {
            let pr = personalized_pagerank(trans, s, restart, &excluded, top_n)?;
            let rows = pr.top.iter().enumerate().map(|(r, &(t, x))| format!("{},{t},{}", r + 1, csv_float(x)));
            write_csv(&out.join(format!("ppr_{s}.csv")), "rank,topic,score", rows)?;
        }

        let vocabulary = self.vocab.as_deref().map(read_vocabulary).transpose()?;
        let mut text = String::new();
        for (t, words) in top_words_per_topic(&params.zeta, required(&self.top_words, "top-words")?).iter().enumerate() {
            let names: Vec<String> = words
                .iter()
                .map(|&(w, _)| match &vocabulary {
                    Some(v) => v.get(w).cloned().unwrap_or_else(|| w.to_string()),
                    None => w.to_string(),
                })
                .collect();
            let _ = writeln!(text, "{t}\t{}", names.join(" "));
        }
        let path = out.join("topic_words.txt");
        fs::write(&path, text).map_err(|e| data(format!("{}: {e}", path.display())))?;

        let summary = json!({
            "topics": k,
            "hub_gini": gini(&hits.hubs),
            "authority_gini": gini(&hits.authorities),
            "hits_iterations": hits.iterations,
            "hits_converged": hits.converged,
            "hits_degenerate": hits.degenerate,
            "ppr_starts": starts,
        });
        write_versioned(&out.join("analysis.json"), &summary)?;
        println!("{summary}");
        Ok(())
    }
}
