//! CSV artifacts.
//!
//! Floats are written with six significant digits in the style of C's `%g`,
//! so files are byte-stable across runs and easy to diff.

use std::fmt::Write as _;

use crate::lilaw::{WeightColumn, WeightTable};
use crate::metrics::MislabelScore;
use crate::trainer::RunLog;

pub const RUNLOG_HEADER: &str = "epoch,train_loss,val_loss,test_top1,test_topk,test_auroc,alpha,beta,delta";
pub const MISLABEL_HEADER: &str = "score_name,orientation,auroc,auprc";
pub const WEIGHTS_HEADER: &str = "index,w_alpha,w_beta,w_delta,w,clean_flag";

/// Six significant digits, trailing zeros trimmed, exponent form outside
/// `[1e-4, 1e6)`.
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..6).contains(&exp) {
        let fixed = format!("{:.*}", (5 - exp) as usize, x);
        trim_zeros(&fixed).to_owned()
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn runlog_csv(log: &RunLog) -> String {
    let mut out = String::from(RUNLOG_HEADER);
    out.push('\n');
    for r in &log.records {
        let cells = [
            r.train_loss,
            r.val_loss,
            r.test_top1,
            r.test_topk,
            r.test_auroc,
            r.alpha,
            r.beta,
            r.delta,
        ];
        write!(out, "{}", r.epoch).unwrap();
        for v in cells {
            write!(out, ",{}", fmt_float(v)).unwrap();
        }
        out.push('\n');
    }
    out
}

/// One row per sample. `flags` may be empty, in which case the flag column
/// is left blank.
pub fn weights_csv(table: &WeightTable, flags: &[bool]) -> String {
    let mut out = String::from(WEIGHTS_HEADER);
    out.push('\n');
    let cols: Vec<Vec<f64>> = WeightColumn::ALL.iter().map(|&c| table.column(c)).collect();
    for i in 0..table.len() {
        write!(out, "{i}").unwrap();
        for col in &cols {
            write!(out, ",{}", fmt_float(col[i])).unwrap();
        }
        match flags.get(i) {
            Some(&f) => writeln!(out, ",{}", u8::from(f)).unwrap(),
            None => out.push_str(",\n"),
        }
    }
    out
}

pub fn mislabel_csv(scores: &[MislabelScore]) -> String {
    let mut out = String::from(MISLABEL_HEADER);
    out.push('\n');
    for s in scores {
        writeln!(
            out,
            "{},{},{},{}",
            s.column.name(),
            s.orientation.name(),
            fmt_float(s.auroc),
            fmt_float(s.auprc)
        )
        .unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn six_significant_digits() {
        let cases = [
            (0.0, "0"),
            (1.0, "1"),
            (-2.5, "-2.5"),
            (0.0512932943875505, "0.0512933"),
            (9.999995, "10"),
            (99.99999, "100"),
            (123456.7, "123457"),
            (1234567.0, "1.23457e6"),
            (0.000012345678, "1.23457e-5"),
            (0.00012345678, "0.000123457"),
            (100.0, "100"),
            (f64::NAN, "NaN"),
        ];
        for (x, s) in cases {
            assert_eq!(fmt_float(x), s, "{x}");
        }
    }

    proptest! {
        #[test]
        fn formatted_floats_reparse_within_six_digits(x in -1e9f64..1e9) {
            let back: f64 = fmt_float(x).parse().unwrap();
            prop_assert!((back - x).abs() <= 5e-6 * x.abs() + 1e-300);
        }
    }
}
