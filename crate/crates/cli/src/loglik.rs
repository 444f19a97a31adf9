use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};

use hmhp::io::{csv_float, read_events, read_params, read_vocabulary, write_csv};
use hmhp::likelihood::{heldout_log_likelihood, HeldoutConfig, HeldoutParents};
use hmhp::model::ObservationWindow;
use hmhp::Dataset;

use crate::config::{required, CliError, Command, Common};

#[derive(Args, Serialize, Deserialize, Default, Debug, Clone)]
pub struct LoglikArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    /// Output directory of `infer`; its params.json is used.
    #[arg(long)]
    pub train_out: Option<PathBuf>,
    /// Held-out events on the training network.
    #[arg(long)]
    pub heldout: Option<PathBuf>,
    #[arg(long)]
    pub vocab: Option<PathBuf>,
    /// marginal or greedy [default: marginal]
    #[arg(long)]
    pub parents: Option<HeldoutParents>,
    /// Hours a parent may precede its child [default: 24]
    #[arg(long)]
    pub window_hours: Option<f64>,
    /// [default: 100]
    #[arg(long)]
    pub max_candidates: Option<usize>,
    /// Also write per_event.csv [default: false]
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub per_event: Option<bool>,
}

impl Command for LoglikArgs {
    const NAME: &'static str = "loglik";

    fn common(&self) -> &Common {
        &self.common
    }

    fn common_mut(&mut self) -> &mut Common {
        &mut self.common
    }

    fn fill(&mut self) -> Result<(), CliError> {
        required(&self.train_out, "train-out")?;
        required(&self.heldout, "heldout")?;
        self.parents.get_or_insert(HeldoutParents::Marginal);
        self.window_hours.get_or_insert(24.0);
        self.max_candidates.get_or_insert(100);
        self.per_event.get_or_insert(false);
        Ok(())
    }

    fn run(&self, out: &Path) -> Result<(), CliError> {
        let (network, params) = read_params::<f64>(&required(&self.train_out, "train-out")?.join("params.json"))?;
        let vocabulary = self.vocab.as_deref().map(read_vocabulary).transpose()?;
        let heldout: Dataset =
            read_events(&required(&self.heldout, "heldout")?, &network, vocabulary.as_deref(), None::<ObservationWindow>)?;
        let config = HeldoutConfig {
            candidate_window: required(&self.window_hours, "window-hours")?,
            max_candidates: required(&self.max_candidates, "max-candidates")?,
            parents: required(&self.parents, "parents")?,
            per_event: self.per_event == Some(true),
        };
        let report = heldout_log_likelihood(&params, &heldout, &config)?;
        let head = "content_ll,time_ll,total_ll";
        let row = [report.content_ll, report.time_ll, report.total_ll].map(csv_float).join(",");
        write_csv(&out.join("loglik.csv"), head, [row.clone()])?;
        if let Some(per_event) = &report.per_event {
            let rows = heldout
                .events()
                .iter()
                .zip(per_event)
                .map(|(e, &(c, t))| format!("{},{},{}", e.id, csv_float(c), csv_float(t)));
            write_csv(&out.join("per_event.csv"), "id,content_ll,time_ll", rows)?;
        }
        println!("{head}\n{row}");
        Ok(())
    }
}
