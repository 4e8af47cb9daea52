use crate::nn::{softmax_rows, Matrix, PROB_FLOOR};
use crate::{Error, Result};

pub const T_MIN: f64 = 0.05;
pub const T_MAX: f64 = 20.0;
const T_TOL: f64 = 1e-4;

/// Post-hoc logit divisor. Applied at evaluation time only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Temperature(f64);

impl Temperature {
    pub fn new(t: f64) -> Result<Self> {
        if t > 0.0 && t.is_finite() {
            Ok(Self(t))
        } else {
            Err(Error::InvalidArgument(format!("temperature must be positive, got {t}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn apply(self, logits: &Matrix) -> Matrix {
        let mut out = logits.clone();
        out.as_mut_slice().iter_mut().for_each(|v| *v /= self.0);
        out
    }
}

/// Mean cross-entropy of `softmax(logits / t)` against `labels`.
pub fn mean_nll(logits: &Matrix, labels: &[usize], t: f64) -> Result<f64> {
    if logits.rows() == 0 {
        return Err(Error::Empty("calibration logits"));
    }
    if labels.len() != logits.rows() {
        return Err(Error::Shape(format!("{} rows but {} labels", logits.rows(), labels.len())));
    }
    let probs = softmax_rows(&Temperature::new(t)?.apply(logits))?;
    let mut total = 0.0;
    for (row, &y) in probs.iter_rows().zip(labels) {
        let p = *row.get(y).ok_or(Error::LabelOutOfRange {
            label: y,
            classes: row.len(),
        })?;
        total -= p.max(PROB_FLOOR).ln();
    }
    Ok(total / labels.len() as f64)
}

/// Golden-section search for the temperature minimising [`mean_nll`] on
/// `[T_MIN, T_MAX]`, stopping once the bracket is narrower than `1e-4`.
pub fn fit_temperature(logits: &Matrix, labels: &[usize]) -> Result<Temperature> {
    let invphi = (5f64.sqrt() - 1.0) / 2.0;
    let f = |t: f64| mean_nll(logits, labels, t);
    let (mut a, mut b) = (T_MIN, T_MAX);
    let mut c = b - invphi * (b - a);
    let mut d = a + invphi * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while b - a > T_TOL {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d)?;
        }
    }
    Temperature::new(((a + b) / 2.0).clamp(T_MIN, T_MAX))
}
