//! Three-parameter adaptive sample weighting.
//!
//! For a sample whose softmax output gives probability `p` to its observed
//! label and `m` to the top class:
//!
//! ```text
//! W_alpha = sigmoid(alpha * p - m)
//! W_beta  = sigmoid(-(beta * p - m))
//! W_delta = exp(-(delta * p - m)^2 / 2)
//! W       = W_alpha + W_beta + W_delta
//! ```
//!
//! The weighted loss of the sample is `W * loss`. Each scalar only enters its
//! own term, so its gradient is the closed-form derivative of that term times
//! the (constant) base loss.

use crate::nn::BaseLoss;
use crate::{Error, Result};

const ROW_TOL: f64 = 1e-9;

#[inline]
pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// The two numbers the weights read from a softmax output: the probability
/// of the observed label and the largest probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SoftmaxRow {
    target: f64,
    max: f64,
}

impl SoftmaxRow {
    /// Validates a full probability vector and extracts the pair.
    pub fn from_probs(probs: &[f64], observed_label: usize) -> Result<Self> {
        let target = *probs.get(observed_label).ok_or(Error::LabelOutOfRange {
            label: observed_label,
            classes: probs.len(),
        })?;
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidArgument("probabilities must be finite and nonnegative".into()));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > ROW_TOL {
            return Err(Error::InvalidArgument(format!("probabilities sum to {sum}, not 1")));
        }
        let max = probs.iter().copied().fold(0.0, f64::max);
        Ok(Self { target, max })
    }

    /// Builds a row from `(p_label, p_max)` directly, checking that some
    /// probability vector could produce it.
    pub fn from_parts(target: f64, max: f64) -> Result<Self> {
        let valid = target.is_finite()
            && max.is_finite()
            && target >= 0.0
            && target <= max
            && max <= 1.0
            && (target == max || target + max <= 1.0 + ROW_TOL);
        if !valid {
            return Err(Error::InvalidArgument(format!(
                "({target}, {max}) is not a valid (label probability, max probability) pair"
            )));
        }
        Ok(Self { target, max })
    }

    /// Skips validation; callers guarantee the pair came from a softmax row.
    pub(crate) fn from_softmax_unchecked(probs: &[f64], observed_label: usize) -> Self {
        let max = probs.iter().copied().fold(0.0, f64::max);
        Self {
            target: probs[observed_label],
            max,
        }
    }

    #[inline]
    pub fn target(&self) -> f64 {
        self.target
    }

    #[inline]
    pub fn max(&self) -> f64 {
        self.max
    }
}

pub fn weight_alpha(row: SoftmaxRow, alpha: f64) -> f64 {
    sigmoid(alpha * row.target - row.max)
}

pub fn weight_beta(row: SoftmaxRow, beta: f64) -> f64 {
    sigmoid(-(beta * row.target - row.max))
}

pub fn weight_delta(row: SoftmaxRow, delta: f64) -> f64 {
    let gap = delta * row.target - row.max;
    (-gap * gap / 2.0).exp()
}

/// Which of the three terms take part in the weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TermMask {
    pub alpha: bool,
    pub beta: bool,
    pub delta: bool,
}

impl TermMask {
    pub const ALL: TermMask = TermMask {
        alpha: true,
        beta: true,
        delta: true,
    };

    pub fn any(&self) -> bool {
        self.alpha || self.beta || self.delta
    }

    /// Parses a subset such as `"ad"` or `"abd"`.
    pub fn from_letters(s: &str) -> Option<Self> {
        let mut mask = TermMask {
            alpha: false,
            beta: false,
            delta: false,
        };
        for ch in s.chars() {
            let slot = match ch {
                'a' => &mut mask.alpha,
                'b' => &mut mask.beta,
                'd' => &mut mask.delta,
                _ => return None,
            };
            if *slot {
                return None;
            }
            *slot = true;
        }
        Some(mask)
    }

    pub fn letters(&self) -> String {
        [(self.alpha, 'a'), (self.beta, 'b'), (self.delta, 'd')]
            .iter()
            .filter(|(on, _)| *on)
            .map(|(_, c)| *c)
            .collect()
    }
}

impl Default for TermMask {
    fn default() -> Self {
        Self::ALL
    }
}

/// The three learnable scalars and their descent hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LilawParams {
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
    pub lr: [f64; 3],
    pub wd: [f64; 3],
    pub mask: TermMask,
}

impl Default for LilawParams {
    /// `alpha, beta, delta = 10, 2, 6`, learning rates `0.005`, weight decays `1e-4`.
    fn default() -> Self {
        Self {
            alpha: 10.0,
            beta: 2.0,
            delta: 6.0,
            lr: [0.005; 3],
            wd: [1e-4; 3],
            mask: TermMask::ALL,
        }
    }
}

impl LilawParams {
    pub fn with_values(alpha: f64, beta: f64, delta: f64) -> Self {
        Self {
            alpha,
            beta,
            delta,
            ..Self::default()
        }
    }

    pub fn values(&self) -> [f64; 3] {
        [self.alpha, self.beta, self.delta]
    }
}

/// Batch-mean gradients of the weighted loss.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LilawGrads {
    pub d_alpha: f64,
    pub d_beta: f64,
    pub d_delta: f64,
}

/// All three components and the masked total for one sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightTerms {
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
    pub total: f64,
}

/// Components are always reported; `total` sums only the enabled ones.
pub fn weight_terms(row: SoftmaxRow, params: &LilawParams) -> Result<WeightTerms> {
    if !params.mask.any() {
        return Err(Error::NoWeightTerms);
    }
    let alpha = weight_alpha(row, params.alpha);
    let beta = weight_beta(row, params.beta);
    let delta = weight_delta(row, params.delta);
    let m = params.mask;
    let mut total = 0.0;
    if m.alpha {
        total += alpha;
    }
    if m.beta {
        total += beta;
    }
    if m.delta {
        total += delta;
    }
    Ok(WeightTerms {
        alpha,
        beta,
        delta,
        total,
    })
}

/// Columns of a [`WeightTable`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightColumn {
    Alpha,
    Beta,
    Delta,
    Total,
}

impl WeightColumn {
    pub const ALL: [WeightColumn; 4] = [
        WeightColumn::Alpha,
        WeightColumn::Beta,
        WeightColumn::Delta,
        WeightColumn::Total,
    ];

    pub fn name(self) -> &'static str {
        match self {
            WeightColumn::Alpha => "w_alpha",
            WeightColumn::Beta => "w_beta",
            WeightColumn::Delta => "w_delta",
            WeightColumn::Total => "w",
        }
    }

    fn pick(self, t: &WeightTerms) -> f64 {
        match self {
            WeightColumn::Alpha => t.alpha,
            WeightColumn::Beta => t.beta,
            WeightColumn::Delta => t.delta,
            WeightColumn::Total => t.total,
        }
    }
}

/// Per-sample weight terms, one row per sample.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct WeightTable {
    pub rows: Vec<WeightTerms>,
}

impl WeightTable {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column(&self, col: WeightColumn) -> Vec<f64> {
        self.rows.iter().map(|t| col.pick(t)).collect()
    }
}

/// Sum of the enabled weight terms.
pub fn sample_weight(row: SoftmaxRow, params: &LilawParams) -> Result<f64> {
    weight_terms(row, params).map(|t| t.total)
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedLoss {
    pub per_sample: Vec<f64>,
    pub mean: f64,
}

pub fn weighted_loss(rows: &[SoftmaxRow], params: &LilawParams, base_loss: BaseLoss) -> Result<WeightedLoss> {
    let losses: Vec<f64> = rows.iter().map(|r| base_loss.from_target_prob(r.target)).collect();
    weighted_loss_from_losses(rows, &losses, params)
}

/// Like [`weighted_loss`] with precomputed base losses.
pub fn weighted_loss_from_losses(rows: &[SoftmaxRow], losses: &[f64], params: &LilawParams) -> Result<WeightedLoss> {
    check_batch(rows, losses)?;
    let per_sample = rows
        .iter()
        .zip(losses)
        .map(|(&row, &loss)| sample_weight(row, params).map(|w| w * loss))
        .collect::<Result<Vec<_>>>()?;
    let mean = per_sample.iter().sum::<f64>() / per_sample.len() as f64;
    Ok(WeightedLoss { per_sample, mean })
}

pub fn grad_params(rows: &[SoftmaxRow], params: &LilawParams, base_loss: BaseLoss) -> Result<LilawGrads> {
    let losses: Vec<f64> = rows.iter().map(|r| base_loss.from_target_prob(r.target)).collect();
    grad_params_from_losses(rows, &losses, params)
}

/// Batch-mean closed-form gradients of the weighted loss.
///
/// Per sample, with `z = alpha*p - m`, `u = -(beta*p - m)`, `g = delta*p - m`:
///
/// ```text
/// dL/dalpha =  L * W_alpha^2 * p / exp(z)   =  L * p * sigmoid(z) * sigmoid(-z)
/// dL/dbeta  = -L * W_beta^2  * p / exp(u)   = -L * p * sigmoid(u) * sigmoid(-u)
/// dL/ddelta = -L * W_delta * g * p
/// ```
///
/// The right-hand forms are algebraically identical and do not overflow.
/// Disabled terms contribute a zero gradient.
pub fn grad_params_from_losses(rows: &[SoftmaxRow], losses: &[f64], params: &LilawParams) -> Result<LilawGrads> {
    check_batch(rows, losses)?;
    let mut acc = LilawGrads::default();
    for (&row, &loss) in rows.iter().zip(losses) {
        let p = row.target;
        if params.mask.alpha {
            let z = params.alpha * p - row.max;
            acc.d_alpha += loss * p * sigmoid(z) * sigmoid(-z);
        }
        if params.mask.beta {
            let u = -(params.beta * p - row.max);
            acc.d_beta -= loss * p * sigmoid(u) * sigmoid(-u);
        }
        if params.mask.delta {
            let g = params.delta * p - row.max;
            acc.d_delta -= loss * weight_delta(row, params.delta) * g * p;
        }
    }
    let n = rows.len() as f64;
    Ok(LilawGrads {
        d_alpha: acc.d_alpha / n,
        d_beta: acc.d_beta / n,
        d_delta: acc.d_delta / n,
    })
}

fn check_batch(rows: &[SoftmaxRow], losses: &[f64]) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::Empty("weighted-loss batch"));
    }
    if rows.len() != losses.len() {
        return Err(Error::Shape(format!("{} rows but {} losses", rows.len(), losses.len())));
    }
    Ok(())
}

/// One plain gradient-descent step with additive weight decay on every
/// enabled scalar, `x -= lr * (grad + wd * x)`, then `alpha = max(alpha, 1)`.
pub fn meta_update(params: &LilawParams, grads: &LilawGrads) -> LilawParams {
    let mut next = *params;
    let step = |x: f64, g: f64, i: usize| x - params.lr[i] * (g + params.wd[i] * x);
    if params.mask.alpha {
        next.alpha = step(params.alpha, grads.d_alpha, 0).max(1.0);
    }
    if params.mask.beta {
        next.beta = step(params.beta, grads.d_beta, 1);
    }
    if params.mask.delta {
        next.delta = step(params.delta, grads.d_delta, 2);
    }
    next
}
