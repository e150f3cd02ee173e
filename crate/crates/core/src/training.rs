//! End-to-end network training: optional global search, then local refinement.

use std::fmt;

use crate::error::{Error, Result};
use crate::evaluation::{Classifier, Trainer};
use crate::local_search::{refine, LocalSearchConfig, Method, RefineResult};
use crate::mlp::{predict_label, Dataset, MlpTopology};
use crate::optimizer::{run_codel, Bounds, CodelConfig, CodelResult};
use crate::rng::{stream, substream};

/// A trained binary classifier.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedMlp {
    pub topology: MlpTopology,
    pub params: Vec<f64>,
}

impl TrainedMlp {
    pub fn output(&self, features: &[f64]) -> f64 {
        self.topology.forward(&self.params, features).expect("input width checked by caller")[0]
    }
}

impl Classifier for TrainedMlp {
    fn predict(&self, features: &[f64]) -> u8 {
        predict_label(self.output(features))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    pub model: TrainedMlp,
    /// Present when the starting weights came from the global search.
    pub codel: Option<CodelResult>,
    pub refine: RefineResult,
}

impl TrainOutcome {
    /// Objective evaluations spent by the global search (0 without it).
    pub fn nfe(&self) -> usize {
        self.codel.as_ref().map_or(0, |c| c.nfe)
    }
}

/// Trains `topology` on `data`.
///
/// With `codel`, the starting weights are the best solution of a global
/// search on training classification error; otherwise they are drawn
/// uniformly from `[lower, upper]` of `bounds_from`. The configured local
/// search refines them in both cases. `seed` overrides `codel.seed`.
pub fn train_network(
    data: &Dataset,
    topology: &MlpTopology,
    codel: Option<&CodelConfig>,
    bounds_from: &CodelConfig,
    local: &LocalSearchConfig,
    seed: u64,
) -> Result<TrainOutcome> {
    if topology.n_inputs() != data.n_features() {
        return Err(Error::InvalidInput(format!(
            "topology {topology} expects {} inputs but the data has {} features",
            topology.n_inputs(),
            data.n_features()
        )));
    }
    if topology.n_outputs() != 1 {
        return Err(Error::InvalidInput(format!("topology {topology} must have a single output")));
    }
    let dim = topology.param_count();
    let (start, codel_result) = match codel {
        Some(cfg) => {
            let cfg = CodelConfig { seed, ..cfg.clone() };
            let objective = |w: &[f64]| {
                topology.classification_error(w, data).expect("shapes checked above")
            };
            let result = run_codel(&objective, dim, &cfg)?;
            (result.best.params.clone(), Some(result))
        }
        None => {
            let bounds = Bounds::uniform(dim, bounds_from.lower, bounds_from.upper);
            (bounds.sample(&mut substream(seed, stream::INIT)), None)
        }
    };
    let refined = refine(&start, topology, data, local)?;
    Ok(TrainOutcome {
        model: TrainedMlp { topology: topology.clone(), params: refined.params.clone() },
        codel: codel_result,
        refine: refined,
    })
}

/// One of the twelve compared trainers: a local-search method, optionally
/// started from the global search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Variant {
    pub method: Method,
    pub boosted: bool,
}

impl Variant {
    /// Base then boosted variant for every method, in table order.
    pub fn all() -> Vec<Variant> {
        Method::ALL
            .iter()
            .flat_map(|&method| [Variant { method, boosted: false }, Variant { method, boosted: true }])
            .collect()
    }

    pub fn name(&self) -> String {
        if self.boosted {
            format!("CODEL-{}", self.method.name())
        } else {
            self.method.name().to_string()
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// [`Trainer`] for cross-validation; the input width follows the data.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpTrainer {
    pub hidden: Vec<usize>,
    pub boosted: bool,
    pub codel: CodelConfig,
    pub local: LocalSearchConfig,
}

impl MlpTrainer {
    pub fn for_variant(variant: Variant, hidden: &[usize], codel: &CodelConfig, local: &LocalSearchConfig) -> Self {
        Self {
            hidden: hidden.to_vec(),
            boosted: variant.boosted,
            codel: codel.clone(),
            local: LocalSearchConfig { method: variant.method, ..*local },
        }
    }
}

impl Trainer for MlpTrainer {
    type Model = TrainedMlp;

    fn fit(&self, train: &Dataset, seed: u64) -> Result<TrainedMlp> {
        let topology = MlpTopology::binary(train.n_features(), &self.hidden)?;
        let codel = self.boosted.then_some(&self.codel);
        Ok(train_network(train, &topology, codel, &self.codel, &self.local, seed)?.model)
    }
}
