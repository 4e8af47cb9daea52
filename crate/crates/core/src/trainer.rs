//! Bi-level training loop.
//!
//! Each training mini-batch does two things in order:
//!
//! 1. an Adam step on the network with the loss weighted by the current
//!    `(alpha, beta, delta)`, which are held constant;
//! 2. a plain gradient step on `(alpha, beta, delta)` using one random
//!    validation mini-batch, with the network held constant.
//!
//! Warmup epochs and baseline runs skip the weighting and the second step.
//! Batch order and validation sampling come from separate seeded streams so a
//! baseline and a weighted run with the same seed see the same batches.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::data::LabeledDataset;
use crate::lilaw::{grad_params, meta_update, sample_weight, weight_terms, LilawParams, SoftmaxRow, WeightTable};
use crate::metrics::{macro_ovr_auroc, top_k_accuracy};
use crate::nn::{adam_step, backward, forward, init_model, softmax_rows, Activation, AdamState, BaseLoss, MlpModel};
use crate::{Error, Result};

const ORDER_STREAM: u64 = 1;
const VAL_STREAM: u64 = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub lr_theta: f64,
    pub wd_theta: f64,
    pub hidden: Vec<usize>,
    pub activation: Activation,
    pub lilaw_enabled: bool,
    /// Initial values, learning rates, weight decays and term mask.
    pub lilaw: LilawParams,
    pub warmup_epochs: usize,
    pub base_loss: BaseLoss,
    /// Epochs without a validation top-1 improvement before stopping; 0 disables.
    pub early_stop_patience: usize,
    /// Clamped to the class count.
    pub top_k: usize,
    /// 1-based epochs after which per-sample weights are recorded. Epochs past
    /// an early stop collapse into one snapshot at the stopping epoch.
    pub snapshot_epochs: Vec<usize>,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 30,
            batch_size: 32,
            lr_theta: 1e-3,
            wd_theta: 0.0,
            hidden: vec![64, 64],
            activation: Activation::Relu,
            lilaw_enabled: true,
            lilaw: LilawParams::default(),
            warmup_epochs: 1,
            base_loss: BaseLoss::CrossEntropy,
            early_stop_patience: 10,
            top_k: 5,
            snapshot_epochs: Vec::new(),
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if self.epochs == 0 {
            return bad("epochs must be at least 1".into());
        }
        if self.batch_size == 0 {
            return bad("batch_size must be at least 1".into());
        }
        if self.warmup_epochs >= self.epochs {
            return bad(format!(
                "warmup_epochs ({}) must be below epochs ({})",
                self.warmup_epochs, self.epochs
            ));
        }
        if !(self.lr_theta > 0.0) || !(self.wd_theta >= 0.0) {
            return bad("lr_theta must be positive and wd_theta nonnegative".into());
        }
        if self.top_k == 0 {
            return bad("top_k must be at least 1".into());
        }
        if self.hidden.contains(&0) {
            return bad("hidden layer widths must be positive".into());
        }
        if let BaseLoss::Focal { gamma } = self.base_loss {
            if !(gamma >= 0.0) {
                return bad(format!("focal gamma must be nonnegative, got {gamma}"));
            }
        }
        let p = &self.lilaw;
        if p.values().iter().any(|v| !v.is_finite()) {
            return bad("alpha, beta, delta must be finite".into());
        }
        if p.alpha < 1.0 {
            return bad(format!("alpha must start at or above 1, got {}", p.alpha));
        }
        if p.lr.iter().chain(&p.wd).any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return bad("lilaw learning rates and weight decays must be finite and nonnegative".into());
        }
        if !p.mask.any() {
            return Err(Error::NoWeightTerms);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochRecord {
    /// 1-based.
    pub epoch: usize,
    /// Mean unweighted base loss over the epoch's training batches.
    pub train_loss: f64,
    pub val_loss: f64,
    pub val_top1: f64,
    pub test_top1: f64,
    pub test_topk: f64,
    pub test_auroc: f64,
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightSnapshot {
    pub epoch: usize,
    pub table: WeightTable,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunLog {
    pub records: Vec<EpochRecord>,
    pub snapshots: Vec<WeightSnapshot>,
    /// `(alpha, beta, delta)` before training and after every meta-update.
    pub trajectory: Vec<[f64; 3]>,
    pub meta_updates: usize,
    /// 1-based epoch whose model was returned.
    pub best_epoch: usize,
    pub final_params: LilawParams,
    /// Wall-clock time of each epoch's training batches (evaluation excluded).
    pub epoch_seconds: Vec<f64>,
}

impl RunLog {
    /// Deterministic content only: timing is dropped.
    pub fn without_timing(&self) -> RunLog {
        RunLog {
            epoch_seconds: Vec::new(),
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalReport {
    pub top1: f64,
    pub topk: f64,
    pub macro_auroc: f64,
    pub mean_loss: f64,
}

/// Top-1, top-k (percent), macro one-vs-rest AUROC and mean cross-entropy
/// against the observed labels, in one pass over `ds`.
pub fn evaluate(model: &MlpModel, ds: &LabeledDataset, k: usize) -> Result<EvalReport> {
    if ds.is_empty() {
        return Err(Error::Empty("evaluation dataset"));
    }
    let (logits, _) = forward(model, ds.features())?;
    let probs = softmax_rows(&logits)?;
    let labels = ds.observed_labels();
    let mean_loss = labels
        .iter()
        .enumerate()
        .map(|(i, &y)| BaseLoss::CrossEntropy.from_target_prob(probs.get(i, y)))
        .sum::<f64>()
        / ds.len() as f64;
    Ok(EvalReport {
        top1: top_k_accuracy(&logits, labels, 1)?,
        topk: top_k_accuracy(&logits, labels, k)?,
        macro_auroc: macro_ovr_auroc(&probs, labels)?,
        mean_loss,
    })
}

/// `(W_alpha, W_beta, W_delta, W)` for every sample of `ds` under the current
/// model and parameters.
pub fn snapshot_weights(model: &MlpModel, ds: &LabeledDataset, params: &LilawParams) -> Result<WeightTable> {
    if ds.is_empty() {
        return Ok(WeightTable::default());
    }
    let (logits, _) = forward(model, ds.features())?;
    let probs = softmax_rows(&logits)?;
    let rows = ds
        .observed_labels()
        .iter()
        .enumerate()
        .map(|(i, &y)| weight_terms(SoftmaxRow::from_softmax_unchecked(probs.row(i), y), params))
        .collect::<Result<Vec<_>>>()?;
    Ok(WeightTable { rows })
}

fn seeded_stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn check_datasets(config: &TrainConfig, train: &LabeledDataset, val: &LabeledDataset, test: &LabeledDataset) -> Result<()> {
    if train.is_empty() {
        return Err(Error::Empty("training set"));
    }
    if test.is_empty() {
        return Err(Error::Empty("test set"));
    }
    if config.lilaw_enabled && val.is_empty() {
        return Err(Error::Empty("validation set (required for meta-updates)"));
    }
    for (name, ds) in [("validation", val), ("test", test)] {
        if !ds.is_empty() && (ds.dim() != train.dim() || ds.class_count() != train.class_count()) {
            return Err(Error::Shape(format!(
                "{name} set is {}-dimensional with {} classes; training set is {}-dimensional with {}",
                ds.dim(),
                ds.class_count(),
                train.dim(),
                train.class_count()
            )));
        }
    }
    if train.class_count() < 2 {
        return Err(Error::InvalidArgument("training needs at least 2 classes".into()));
    }
    Ok(())
}

/// Runs the full loop and returns the best-validation model with its log.
pub fn train(
    config: &TrainConfig,
    train_ds: &LabeledDataset,
    val_ds: &LabeledDataset,
    test_ds: &LabeledDataset,
) -> Result<(MlpModel, RunLog)> {
    config.validate()?;
    check_datasets(config, train_ds, val_ds, test_ds)?;

    let classes = train_ds.class_count();
    let k = config.top_k.min(classes);
    let mut sizes = vec![train_ds.dim()];
    sizes.extend_from_slice(&config.hidden);
    sizes.push(classes);

    let mut model = init_model(config.seed, &sizes, config.activation)?;
    let mut adam = AdamState::new(&model);
    let mut order_rng = seeded_stream(config.seed, ORDER_STREAM);
    let mut val_rng = seeded_stream(config.seed, VAL_STREAM);

    let mut params = config.lilaw;
    let mut log = RunLog {
        records: Vec::new(),
        snapshots: Vec::new(),
        trajectory: vec![params.values()],
        meta_updates: 0,
        best_epoch: 0,
        final_params: params,
        epoch_seconds: Vec::new(),
    };
    let mut best: Option<(f64, MlpModel)> = None;
    let mut since_best = 0usize;
    let mut order: Vec<usize> = (0..train_ds.len()).collect();

    for epoch in 0..config.epochs {
        let weighted = config.lilaw_enabled && epoch >= config.warmup_epochs;
        order.shuffle(&mut order_rng);
        let started = Instant::now();
        let mut loss_sum = 0.0;

        for batch in order.chunks(config.batch_size) {
            let x = train_ds.features().select_rows(batch);
            let y: Vec<usize> = batch.iter().map(|&i| train_ds.observed_labels()[i]).collect();
            let (logits, cache) = forward(&model, &x)?;
            let probs = softmax_rows(&logits)?;

            let mut weights = vec![1.0; batch.len()];
            for (r, &label) in y.iter().enumerate() {
                let p = probs.row(r);
                loss_sum += config.base_loss.from_target_prob(p[label]);
                if weighted {
                    weights[r] = sample_weight(SoftmaxRow::from_softmax_unchecked(p, label), &params)?;
                }
            }
            let grads = backward(&model, &cache, &probs, &y, &weights, config.base_loss)?;
            adam_step(&mut model, &grads, &mut adam, config.lr_theta, config.wd_theta)?;

            if weighted {
                let picks: Vec<usize> = (0..config.batch_size)
                    .map(|_| val_rng.random_range(0..val_ds.len()))
                    .collect();
                let (val_logits, _) = forward(&model, &val_ds.features().select_rows(&picks))?;
                let val_probs = softmax_rows(&val_logits)?;
                let rows: Vec<SoftmaxRow> = picks
                    .iter()
                    .enumerate()
                    .map(|(r, &i)| SoftmaxRow::from_softmax_unchecked(val_probs.row(r), val_ds.observed_labels()[i]))
                    .collect();
                let meta_grads = grad_params(&rows, &params, config.base_loss)?;
                params = meta_update(&params, &meta_grads);
                log.meta_updates += 1;
                log.trajectory.push(params.values());
            }
        }
        log.epoch_seconds.push(started.elapsed().as_secs_f64());

        let (val_top1, val_loss) = if val_ds.is_empty() {
            (f64::NAN, f64::NAN)
        } else {
            let r = evaluate(&model, val_ds, k)?;
            (r.top1, r.mean_loss)
        };
        let test = evaluate(&model, test_ds, k)?;
        log.records.push(EpochRecord {
            epoch: epoch + 1,
            train_loss: loss_sum / train_ds.len() as f64,
            val_loss,
            val_top1,
            test_top1: test.top1,
            test_topk: test.topk,
            test_auroc: test.macro_auroc,
            alpha: params.alpha,
            beta: params.beta,
            delta: params.delta,
        });
        if config.snapshot_epochs.contains(&(epoch + 1)) {
            log.snapshots.push(WeightSnapshot {
                epoch: epoch + 1,
                table: snapshot_weights(&model, train_ds, &params)?,
            });
        }

        if val_top1.is_nan() {
            continue;
        }
        if best.as_ref().map_or(true, |(score, _)| val_top1 > *score) {
            best = Some((val_top1, model.clone()));
            log.best_epoch = epoch + 1;
            since_best = 0;
        } else {
            since_best += 1;
            if config.early_stop_patience > 0 && since_best >= config.early_stop_patience {
                // snapshots requested past the stopping epoch are taken now instead
                let stopped_at = epoch + 1;
                let pending = config.snapshot_epochs.iter().any(|&e| e > stopped_at);
                if pending && log.snapshots.last().map_or(true, |s| s.epoch != stopped_at) {
                    log.snapshots.push(WeightSnapshot {
                        epoch: stopped_at,
                        table: snapshot_weights(&model, train_ds, &params)?,
                    });
                }
                break;
            }
        }
    }

    log.final_params = params;
    match best {
        Some((_, best_model)) => Ok((best_model, log)),
        None => {
            log.best_epoch = log.records.len();
            Ok((model, log))
        }
    }
}
