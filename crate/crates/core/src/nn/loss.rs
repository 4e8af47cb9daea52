use crate::nn::Matrix;
use crate::{Error, Result};

/// Probabilities are clamped to this floor before taking a logarithm.
pub const PROB_FLOOR: f64 = 1e-12;

/// Numerically stable softmax (max-subtracted).
pub fn softmax(logits: &[f64]) -> Result<Vec<f64>> {
    if logits.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "softmax needs at least 2 logits, got {}",
            logits.len()
        )));
    }
    if logits.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("softmax logits"));
    }
    let mut out = logits.to_vec();
    softmax_in_place(&mut out);
    Ok(out)
}

pub(crate) fn softmax_in_place(row: &mut [f64]) {
    let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for v in row.iter_mut() {
        *v = (*v - max).exp();
        sum += *v;
    }
    for v in row.iter_mut() {
        *v /= sum;
    }
}

/// Row-wise softmax of a logit matrix.
pub fn softmax_rows(logits: &Matrix) -> Result<Matrix> {
    if logits.cols() < 2 {
        return Err(Error::InvalidArgument(format!(
            "softmax needs at least 2 columns, got {}",
            logits.cols()
        )));
    }
    if logits.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("softmax logits"));
    }
    let mut out = logits.clone();
    for r in 0..out.rows() {
        softmax_in_place(out.row_mut(r));
    }
    Ok(out)
}

fn target_prob(probs: &[f64], label: usize) -> Result<f64> {
    probs
        .get(label)
        .copied()
        .ok_or(Error::LabelOutOfRange {
            label,
            classes: probs.len(),
        })
}

/// `-ln(probs[label])`, with the probability floored at [`PROB_FLOOR`].
pub fn cross_entropy(probs: &[f64], label: usize) -> Result<f64> {
    Ok(BaseLoss::CrossEntropy.from_target_prob(target_prob(probs, label)?))
}

/// `-(1 - p)^gamma * ln(p)` where `p = probs[label]`.
pub fn focal_loss(probs: &[f64], label: usize, gamma: f64) -> Result<f64> {
    if !(gamma >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "focal gamma must be nonnegative, got {gamma}"
        )));
    }
    Ok(BaseLoss::Focal { gamma }.from_target_prob(target_prob(probs, label)?))
}

/// Per-sample base loss the weights multiply.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BaseLoss {
    CrossEntropy,
    Focal { gamma: f64 },
}

impl BaseLoss {
    /// Both losses depend on the softmax output only through the probability
    /// of the target class.
    pub fn from_target_prob(self, p: f64) -> f64 {
        let nll = -p.max(PROB_FLOOR).ln();
        match self {
            BaseLoss::CrossEntropy => nll,
            BaseLoss::Focal { gamma } if gamma == 0.0 => nll,
            BaseLoss::Focal { gamma } => (1.0 - p).max(0.0).powf(gamma) * nll,
        }
    }

    /// Writes `d loss / d logits` for one sample into `out`, given that
    /// sample's softmax output.
    pub(crate) fn logit_grad(self, probs: &[f64], label: usize, out: &mut [f64]) {
        // d loss/d z_j = g * (1[j == label] - p_j), with g = p * d loss/d p.
        let p = probs[label];
        let g = match self {
            BaseLoss::CrossEntropy => -1.0,
            BaseLoss::Focal { gamma } if gamma == 0.0 => -1.0,
            BaseLoss::Focal { gamma } => {
                let q = (1.0 - p).max(0.0);
                let log_term = if q == 0.0 {
                    0.0
                } else {
                    gamma * q.powf(gamma - 1.0) * p * p.max(PROB_FLOOR).ln()
                };
                log_term - q.powf(gamma)
            }
        };
        for (j, (o, &pj)) in out.iter_mut().zip(probs).enumerate() {
            let indicator = if j == label { 1.0 } else { 0.0 };
            *o = g * (indicator - pj);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn softmax_examples() {
        assert_eq!(softmax(&[0.0, 0.0]).unwrap(), vec![0.5, 0.5]);

        let p = softmax(&[19f64.ln(), 0.0]).unwrap();
        assert!((p[0] - 0.95).abs() < 1e-12 && (p[1] - 0.05).abs() < 1e-12);

        // 30-digit evaluation of exp(x_i) / sum exp(x_j).
        let expected = [0.829838127124189, 0.018564119419442974, 0.15159775345636806];
        let p = softmax(&[3.1, -0.7, 1.4]).unwrap();
        for (a, b) in p.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn softmax_rejects_bad_input() {
        assert!(softmax(&[1.0, f64::INFINITY]).is_err());
        assert!(softmax(&[f64::NAN, 0.0]).is_err());
        assert!(softmax(&[1.0]).is_err());
    }

    #[test]
    fn softmax_survives_huge_logits() {
        let p = softmax(&[1000.0, 0.0, -1000.0]).unwrap();
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(p[0] > 0.999);
    }

    #[test]
    fn cross_entropy_matches_reference_values() {
        let ce = |p: f64| cross_entropy(&[p, 1.0 - p], 0).unwrap();
        assert_eq!(format!("{:.3}", ce(0.95)), "0.051");
        assert_eq!(format!("{:.3}", ce(0.60)), "0.511");
        assert_eq!(ce(1.0), 0.0);
        assert!(cross_entropy(&[0.5, 0.5], 2).is_err());
        // floor keeps saturated outputs finite
        assert!((ce(0.0) - 1e12f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn focal_examples() {
        let probs = [0.6, 0.3, 0.1];
        assert_eq!(focal_loss(&probs, 0, 0.0).unwrap(), cross_entropy(&probs, 0).unwrap());
        assert_eq!(focal_loss(&[1.0, 0.0], 0, 3.0).unwrap(), 0.0);
        // 0.16 * ln(1/0.6), evaluated at 30 digits
        assert!((focal_loss(&probs, 0, 2.0).unwrap() - 0.08173209980255851).abs() < 1e-12);
        assert!(focal_loss(&probs, 0, -1.0).is_err());
        assert!(focal_loss(&probs, 5, 1.0).is_err());
    }

    #[test]
    fn logit_grad_matches_finite_differences() {
        let logits = [0.3, -1.2, 0.8, 0.1];
        for loss in [
            BaseLoss::CrossEntropy,
            BaseLoss::Focal { gamma: 0.5 },
            BaseLoss::Focal { gamma: 2.0 },
        ] {
            let probs = softmax(&logits).unwrap();
            let mut grad = vec![0.0; 4];
            loss.logit_grad(&probs, 2, &mut grad);
            for j in 0..4 {
                let h = 1e-6;
                let mut up = logits;
                let mut dn = logits;
                up[j] += h;
                dn[j] -= h;
                let f = |z: &[f64]| loss.from_target_prob(softmax(z).unwrap()[2]);
                let fd = (f(&up) - f(&dn)) / (2.0 * h);
                assert!((fd - grad[j]).abs() < 1e-8, "{loss:?} j={j}: {fd} vs {}", grad[j]);
            }
        }
    }
}
