//! Experiment configuration: a TOML document with one section per concern.
//!
//! Every problem found by [`diagnose`] carries the line of the offending key
//! when the key is present in the file.

use std::fmt;
use std::path::{Path, PathBuf};

use lilaw_core::lilaw::{LilawParams, TermMask};
use lilaw_core::nn::{Activation, BaseLoss};
use lilaw_core::noise::NoiseKind;
use lilaw_core::trainer::TrainConfig;
use serde::Deserialize;

pub const OUTPUT_DIR_ENV: &str = "LILAW_LAB_OUTPUT_DIR";

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    pub seeds: Vec<u64>,
    #[serde(default = "default_conditions")]
    pub conditions: Vec<String>,
    /// Defaults to one early epoch (about a fifth of the way in) and the last.
    #[serde(default)]
    pub snapshot_epochs: Option<Vec<usize>>,
    pub dataset: DatasetSection,
    #[serde(default)]
    pub split: SplitSection,
    #[serde(default)]
    pub noise: NoiseSection,
    #[serde(default)]
    pub train: TrainSection,
    #[serde(default)]
    pub lilaw: LilawSection,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("results")
}

fn default_conditions() -> Vec<String> {
    vec!["baseline".into(), "lilaw".into()]
}

/// `[dataset]` as written. Which keys are required depends on `kind`; see
/// [`DatasetSection::spec`].
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetSection {
    /// `blobs`, `idx` or `delim`.
    pub kind: String,
    pub classes: Option<usize>,
    pub per_class: Option<usize>,
    pub dim: Option<usize>,
    pub separation: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    /// Draw a fresh sample for every run seed (offset from `seed`).
    #[serde(default = "yes")]
    pub resample_per_seed: bool,
    pub train_images: Option<PathBuf>,
    pub train_labels: Option<PathBuf>,
    pub test_images: Option<PathBuf>,
    pub test_labels: Option<PathBuf>,
    pub train_path: Option<PathBuf>,
    pub test_path: Option<PathBuf>,
    pub label_column: Option<usize>,
    pub delimiter: Option<String>,
}

fn yes() -> bool {
    true
}

const BLOBS_KEYS: [&str; 6] = ["classes", "per_class", "dim", "separation", "seed", "resample_per_seed"];
const IDX_KEYS: [&str; 4] = ["train_images", "train_labels", "test_images", "test_labels"];
const DELIM_KEYS: [&str; 4] = ["train_path", "test_path", "label_column", "delimiter"];

/// A dataset section whose required keys are all present.
#[derive(Debug, Clone, PartialEq)]
pub enum DatasetSpec {
    Blobs {
        classes: usize,
        per_class: usize,
        dim: usize,
        separation: f64,
        seed: u64,
        resample_per_seed: bool,
    },
    Idx {
        train_images: PathBuf,
        train_labels: PathBuf,
        test: Option<(PathBuf, PathBuf)>,
    },
    Delim {
        train_path: PathBuf,
        test_path: Option<PathBuf>,
        label_column: usize,
        delimiter: char,
    },
}

impl DatasetSection {
    fn present_keys(&self) -> Vec<&'static str> {
        let flags = [
            ("classes", self.classes.is_some()),
            ("per_class", self.per_class.is_some()),
            ("dim", self.dim.is_some()),
            ("separation", self.separation.is_some()),
            ("train_images", self.train_images.is_some()),
            ("train_labels", self.train_labels.is_some()),
            ("test_images", self.test_images.is_some()),
            ("test_labels", self.test_labels.is_some()),
            ("train_path", self.train_path.is_some()),
            ("test_path", self.test_path.is_some()),
            ("label_column", self.label_column.is_some()),
            ("delimiter", self.delimiter.is_some()),
        ];
        flags.iter().filter(|f| f.1).map(|f| f.0).collect()
    }

    /// The typed view, or `None` when `kind` is unknown or a required key is
    /// missing. [`diagnose`] explains which.
    pub fn spec(&self) -> Option<DatasetSpec> {
        match self.kind.as_str() {
            "blobs" => Some(DatasetSpec::Blobs {
                classes: self.classes?,
                per_class: self.per_class?,
                dim: self.dim?,
                separation: self.separation?,
                seed: self.seed,
                resample_per_seed: self.resample_per_seed,
            }),
            "idx" => Some(DatasetSpec::Idx {
                train_images: self.train_images.clone()?,
                train_labels: self.train_labels.clone()?,
                test: match (&self.test_images, &self.test_labels) {
                    (Some(i), Some(l)) => Some((i.clone(), l.clone())),
                    (None, None) => None,
                    _ => return None,
                },
            }),
            "delim" => {
                let delimiter = self.delimiter.as_deref().unwrap_or(",");
                let mut chars = delimiter.chars();
                let c = chars.next().filter(|c| c.is_ascii() && chars.next().is_none())?;
                Some(DatasetSpec::Delim {
                    train_path: self.train_path.clone()?,
                    test_path: self.test_path.clone(),
                    label_column: self.label_column.unwrap_or(0),
                    delimiter: c,
                })
            }
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SplitSection {
    pub val_fraction: f64,
    /// Used only when no separate test data is given.
    pub test_fraction: f64,
}

impl Default for SplitSection {
    fn default() -> Self {
        Self {
            val_fraction: 0.15,
            test_fraction: 0.3,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseSection {
    pub kind: String,
    pub levels: Vec<f64>,
    /// Corrupt the training split.
    pub train: bool,
    /// Corrupt the validation split.
    pub val: bool,
}

impl Default for NoiseSection {
    fn default() -> Self {
        Self {
            kind: "uniform".into(),
            levels: vec![0.0],
            train: true,
            val: true,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainSection {
    pub epochs: usize,
    pub batch_size: usize,
    pub lr: f64,
    pub weight_decay: f64,
    pub hidden: Vec<usize>,
    pub activation: String,
    pub warmup_epochs: usize,
    pub loss: String,
    pub focal_gamma: f64,
    pub early_stop_patience: usize,
    pub top_k: usize,
}

impl Default for TrainSection {
    fn default() -> Self {
        let t = TrainConfig::default();
        Self {
            epochs: t.epochs,
            batch_size: t.batch_size,
            lr: t.lr_theta,
            weight_decay: t.wd_theta,
            hidden: t.hidden,
            activation: "relu".into(),
            warmup_epochs: t.warmup_epochs,
            loss: "cross_entropy".into(),
            focal_gamma: 2.0,
            early_stop_patience: t.early_stop_patience,
            top_k: t.top_k,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LilawSection {
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
    /// Learning rates for alpha, beta, delta.
    pub lr: [f64; 3],
    /// Weight decays for alpha, beta, delta.
    pub weight_decay: [f64; 3],
    /// Enabled terms for alpha, beta, delta.
    pub mask: [bool; 3],
}

impl Default for LilawSection {
    fn default() -> Self {
        let p = LilawParams::default();
        Self {
            alpha: p.alpha,
            beta: p.beta,
            delta: p.delta,
            lr: p.lr,
            weight_decay: p.wd,
            mask: [p.mask.alpha, p.mask.beta, p.mask.delta],
        }
    }
}

/// One training arm. `Lilaw(None)` uses the configured mask; `Lilaw(Some(m))`
/// is an ablation restricted to `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arm {
    Baseline,
    Lilaw(Option<TermMask>),
}

impl Arm {
    /// `baseline`, `lilaw`, or `lilaw-<letters>` with letters from `abd`.
    pub fn parse(name: &str) -> Result<Self, String> {
        match name {
            "baseline" => Ok(Arm::Baseline),
            "lilaw" => Ok(Arm::Lilaw(None)),
            _ => {
                let letters = name
                    .strip_prefix("lilaw-")
                    .ok_or_else(|| format!("unknown condition {name:?}; expected baseline, lilaw or lilaw-<terms>"))?;
                TermMask::from_letters(letters)
                    .map(|m| Arm::Lilaw(Some(m)))
                    .ok_or_else(|| format!("condition {name:?}: terms must be distinct letters from \"abd\""))
            }
        }
    }

    pub fn name(self) -> String {
        match self {
            Arm::Baseline => "baseline".into(),
            Arm::Lilaw(None) => "lilaw".into(),
            Arm::Lilaw(Some(m)) => format!("lilaw-{}", m.letters()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: Option<usize>,
    pub field: String,
    pub message: String,
}

impl Diagnostic {
    /// `path:line: field: message`, or without the line when it is unknown.
    pub fn render(&self, path: &Path) -> String {
        match self.line {
            Some(line) => format!("{}:{line}: {self}", path.display()),
            None => format!("{}: {self}", path.display()),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

/// A parsed config together with its source, for line lookups.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: ExperimentConfig,
    pub source: String,
    /// Directory relative paths are resolved against.
    pub base_dir: PathBuf,
}

/// Parses `text`. Syntax and type errors come back as a single diagnostic.
pub fn parse(text: &str, base_dir: &Path) -> Result<LoadedConfig, Diagnostic> {
    match toml::from_str::<ExperimentConfig>(text) {
        Ok(config) => Ok(LoadedConfig {
            config,
            source: text.to_owned(),
            base_dir: base_dir.to_path_buf(),
        }),
        Err(e) => {
            let line = e.span().map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1);
            Err(Diagnostic {
                line,
                field: "config".into(),
                message: e.message().trim().to_owned(),
            })
        }
    }
}

/// 1-based line of `key` inside `[section]` (or at top level when `section`
/// is `None`).
pub fn locate(source: &str, section: Option<&str>, key: &str) -> Option<usize> {
    let mut current: Option<String> = None;
    for (i, raw) in source.lines().enumerate() {
        let line = raw.trim();
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            current = Some(name.trim().to_owned());
            continue;
        }
        if current.as_deref() != section {
            continue;
        }
        if let Some((k, _)) = line.split_once('=') {
            if k.trim() == key {
                return Some(i + 1);
            }
        }
    }
    None
}

impl LoadedConfig {
    pub fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        }
    }

    /// `output_dir`, unless the environment overrides it.
    pub fn output_dir(&self) -> PathBuf {
        match std::env::var_os(OUTPUT_DIR_ENV) {
            Some(dir) if !dir.is_empty() => PathBuf::from(dir),
            _ => self.resolve(&self.config.output_dir),
        }
    }

    pub fn arms(&self) -> Vec<Arm> {
        self.config.conditions.iter().filter_map(|c| Arm::parse(c).ok()).collect()
    }

    pub fn noise_kind(&self) -> NoiseKind {
        self.config.noise.kind.parse().unwrap_or(NoiseKind::Uniform)
    }

    pub fn snapshot_epochs(&self) -> Vec<usize> {
        let epochs = self.config.train.epochs;
        match &self.config.snapshot_epochs {
            Some(list) => list.clone(),
            None => {
                let early = ((epochs as f64 * 0.2).round() as usize).max(1);
                let mut v = vec![early, epochs];
                v.dedup();
                v
            }
        }
    }

    pub fn train_config(&self, arm: Arm, seed: u64) -> TrainConfig {
        let t = &self.config.train;
        let l = &self.config.lilaw;
        let configured = TermMask {
            alpha: l.mask[0],
            beta: l.mask[1],
            delta: l.mask[2],
        };
        let (enabled, mask) = match arm {
            Arm::Baseline => (false, configured),
            Arm::Lilaw(None) => (true, configured),
            Arm::Lilaw(Some(m)) => (true, m),
        };
        TrainConfig {
            epochs: t.epochs,
            batch_size: t.batch_size,
            lr_theta: t.lr,
            wd_theta: t.weight_decay,
            hidden: t.hidden.clone(),
            activation: if t.activation == "tanh" { Activation::Tanh } else { Activation::Relu },
            lilaw_enabled: enabled,
            lilaw: LilawParams {
                alpha: l.alpha,
                beta: l.beta,
                delta: l.delta,
                lr: l.lr,
                wd: l.weight_decay,
                mask,
            },
            warmup_epochs: t.warmup_epochs,
            base_loss: if t.loss == "focal" {
                BaseLoss::Focal { gamma: t.focal_gamma }
            } else {
                BaseLoss::CrossEntropy
            },
            early_stop_patience: t.early_stop_patience,
            top_k: t.top_k,
            snapshot_epochs: if enabled { self.snapshot_epochs() } else { Vec::new() },
            seed,
        }
    }
}

struct Collector<'a> {
    source: &'a str,
    out: Vec<Diagnostic>,
}

impl Collector<'_> {
    fn push(&mut self, section: Option<&str>, key: &str, message: impl Into<String>) {
        let field = match section {
            Some(s) => format!("{s}.{key}"),
            None => key.to_owned(),
        };
        self.out.push(Diagnostic {
            line: locate(self.source, section, key),
            field,
            message: message.into(),
        });
    }

    fn fraction(&mut self, section: &str, key: &str, v: f64) {
        if !(v > 0.0 && v < 1.0) {
            self.push(Some(section), key, format!("must lie strictly between 0 and 1, got {v}"));
        }
    }

    fn file(&mut self, loaded: &LoadedConfig, key: &str, path: &Path) {
        let resolved = loaded.resolve(path);
        if !resolved.is_file() {
            self.push(Some("dataset"), key, format!("file {} does not exist", resolved.display()));
        }
    }
}

/// Every violation in the config. An empty list means `run` may proceed.
pub fn diagnose(loaded: &LoadedConfig) -> Vec<Diagnostic> {
    let c = &loaded.config;
    let mut d = Collector {
        source: &loaded.source,
        out: Vec::new(),
    };

    if c.seeds.is_empty() {
        d.push(None, "seeds", "at least one seed is required");
    }
    let mut seen = c.seeds.clone();
    seen.sort_unstable();
    if seen.windows(2).any(|w| w[0] == w[1]) {
        d.push(None, "seeds", "seeds must be distinct");
    }

    if c.conditions.is_empty() {
        d.push(None, "conditions", "at least one condition is required");
    }
    let mut names = Vec::new();
    for name in &c.conditions {
        match Arm::parse(name) {
            Ok(arm) => {
                if names.contains(&arm.name()) {
                    d.push(None, "conditions", format!("condition {name:?} is listed twice"));
                }
                names.push(arm.name());
            }
            Err(msg) => d.push(None, "conditions", msg),
        }
    }

    let epochs = c.train.epochs;
    if let Some(list) = &c.snapshot_epochs {
        for &e in list {
            if e == 0 || e > epochs {
                d.push(None, "snapshot_epochs", format!("epoch {e} is outside 1..={epochs}"));
            }
        }
    }

    let out = loaded.output_dir();
    if out.exists() {
        match std::fs::metadata(&out) {
            Ok(m) if !m.is_dir() => d.push(None, "output_dir", format!("{} is not a directory", out.display())),
            Ok(m) if m.permissions().readonly() => {
                d.push(None, "output_dir", format!("{} is not writable", out.display()))
            }
            Ok(_) => {}
            Err(e) => d.push(None, "output_dir", format!("{}: {e}", out.display())),
        }
    }

    let mut has_test_data = false;
    let mut has_geometry = false;
    let ds = &c.dataset;
    let (allowed, required): (&[&str], &[&str]) = match ds.kind.as_str() {
        "blobs" => (&BLOBS_KEYS, &["classes", "per_class", "dim", "separation"]),
        "idx" => (&IDX_KEYS, &["train_images", "train_labels"]),
        "delim" => (&DELIM_KEYS, &["train_path"]),
        other => {
            d.push(
                Some("dataset"),
                "kind",
                format!("unknown dataset kind {other:?}; expected blobs, idx or delim"),
            );
            (&[], &[])
        }
    };
    if !allowed.is_empty() {
        let present = ds.present_keys();
        for key in required.iter().filter(|k| !present.contains(k)) {
            d.push(Some("dataset"), "kind", format!("{} datasets need `{key}`", ds.kind));
        }
        for key in present.iter().filter(|k| !allowed.contains(k)) {
            d.push(Some("dataset"), key, format!("not used by {} datasets", ds.kind));
        }
    }
    match ds.kind.as_str() {
        "blobs" => {
            if let Some(classes) = ds.classes.filter(|&c| c < 2) {
                d.push(Some("dataset"), "classes", format!("need at least 2 classes, got {classes}"));
            }
            if ds.per_class == Some(0) {
                d.push(Some("dataset"), "per_class", "must be at least 1");
            }
            if ds.dim == Some(0) {
                d.push(Some("dataset"), "dim", "must be at least 1");
            }
            if let Some(sep) = ds.separation.filter(|s| !(s.is_finite() && *s >= 0.0)) {
                d.push(Some("dataset"), "separation", format!("must be finite and nonnegative, got {sep}"));
            }
        }
        "idx" => {
            has_geometry = true;
            for (key, path) in [
                ("train_images", &ds.train_images),
                ("train_labels", &ds.train_labels),
                ("test_images", &ds.test_images),
                ("test_labels", &ds.test_labels),
            ] {
                if let Some(p) = path {
                    d.file(loaded, key, p);
                }
            }
            match (&ds.test_images, &ds.test_labels) {
                (Some(_), Some(_)) => has_test_data = true,
                (None, None) => {}
                (Some(_), None) => d.push(Some("dataset"), "test_images", "test_labels must be given as well"),
                (None, Some(_)) => d.push(Some("dataset"), "test_labels", "test_images must be given as well"),
            }
        }
        "delim" => {
            for (key, path) in [("train_path", &ds.train_path), ("test_path", &ds.test_path)] {
                if let Some(p) = path {
                    d.file(loaded, key, p);
                }
            }
            has_test_data = ds.test_path.is_some();
            if let Some(delim) = &ds.delimiter {
                if delim.chars().count() != 1 || !delim.is_ascii() {
                    d.push(Some("dataset"), "delimiter", format!("must be a single ASCII character, got {delim:?}"));
                }
            }
        }
        _ => {}
    }

    d.fraction("split", "val_fraction", c.split.val_fraction);
    if !has_test_data {
        d.fraction("split", "test_fraction", c.split.test_fraction);
    }

    match c.noise.kind.parse::<NoiseKind>() {
        Ok(kind) => {
            let image = matches!(kind, NoiseKind::InputZoom | NoiseKind::InputCrop);
            if image && !has_geometry {
                d.push(Some("noise"), "kind", format!("{kind} noise needs image data (kind = \"idx\")"));
            }
        }
        Err(_) => {
            let known: Vec<&str> = NoiseKind::ALL.iter().map(|k| k.name()).collect();
            d.push(
                Some("noise"),
                "kind",
                format!("unknown noise kind {:?}; expected one of {}", c.noise.kind, known.join(", ")),
            );
        }
    }
    if c.noise.levels.is_empty() {
        d.push(Some("noise"), "levels", "at least one level is required");
    }
    for &level in &c.noise.levels {
        if !(0.0..=1.0).contains(&level) {
            d.push(Some("noise"), "levels", format!("level {level} is outside [0, 1]"));
        }
    }
    let mut levels = c.noise.levels.clone();
    levels.sort_by(f64::total_cmp);
    if levels.windows(2).any(|w| level_key(w[0]) == level_key(w[1])) {
        d.push(Some("noise"), "levels", "levels must be distinct at two decimals");
    }

    let t = &c.train;
    if t.epochs == 0 {
        d.push(Some("train"), "epochs", "must be at least 1");
    }
    if t.batch_size == 0 {
        d.push(Some("train"), "batch_size", "must be at least 1");
    }
    if t.warmup_epochs >= t.epochs.max(1) {
        d.push(
            Some("train"),
            "warmup_epochs",
            format!("must be below epochs ({}), got {}", t.epochs, t.warmup_epochs),
        );
    }
    if !(t.lr > 0.0 && t.lr.is_finite()) {
        d.push(Some("train"), "lr", format!("must be positive, got {}", t.lr));
    }
    if !(t.weight_decay >= 0.0 && t.weight_decay.is_finite()) {
        d.push(Some("train"), "weight_decay", format!("must be nonnegative, got {}", t.weight_decay));
    }
    if t.hidden.contains(&0) {
        d.push(Some("train"), "hidden", "layer widths must be positive");
    }
    if t.activation != "relu" && t.activation != "tanh" {
        d.push(Some("train"), "activation", format!("expected \"relu\" or \"tanh\", got {:?}", t.activation));
    }
    match t.loss.as_str() {
        "cross_entropy" => {}
        "focal" => {
            if !(t.focal_gamma >= 0.0 && t.focal_gamma.is_finite()) {
                d.push(Some("train"), "focal_gamma", format!("must be nonnegative, got {}", t.focal_gamma));
            }
        }
        other => d.push(
            Some("train"),
            "loss",
            format!("expected \"cross_entropy\" or \"focal\", got {other:?}"),
        ),
    }
    if t.top_k == 0 {
        d.push(Some("train"), "top_k", "must be at least 1");
    }

    let l = &c.lilaw;
    for (key, v) in [("alpha", l.alpha), ("beta", l.beta), ("delta", l.delta)] {
        if !v.is_finite() {
            d.push(Some("lilaw"), key, format!("must be finite, got {v}"));
        }
    }
    if l.alpha < 1.0 {
        d.push(Some("lilaw"), "alpha", format!("must be at least 1, got {}", l.alpha));
    }
    if l.lr.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
        d.push(Some("lilaw"), "lr", "learning rates must be finite and nonnegative");
    }
    if l.weight_decay.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
        d.push(Some("lilaw"), "weight_decay", "weight decays must be finite and nonnegative");
    }
    if !l.mask.iter().any(|&m| m) {
        d.push(Some("lilaw"), "mask", "at least one weight term must be enabled");
    }

    d.out
}

/// Noise levels are keyed by their two-decimal rendering in file names.
pub fn level_key(level: f64) -> String {
    format!("{level:.2}")
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "seeds = [1]\n[dataset]\nkind = \"blobs\"\nclasses = 3\nper_class = 20\ndim = 2\nseparation = 4.0\n";

    fn load(text: &str) -> LoadedConfig {
        parse(text, Path::new(".")).unwrap()
    }

    #[test]
    fn minimal_config_is_clean() {
        let loaded = load(MINIMAL);
        assert_eq!(diagnose(&loaded), vec![]);
        assert_eq!(loaded.arms(), vec![Arm::Baseline, Arm::Lilaw(None)]);
        assert_eq!(loaded.snapshot_epochs(), vec![6, 30]);
    }

    #[test]
    fn diagnostics_point_at_lines() {
        let text = format!("{MINIMAL}[split]\nval_fraction = 1.5\n[lilaw]\nmask = [false, false, false]\n");
        let diags = diagnose(&load(&text));
        assert_eq!(diags.len(), 2, "{diags:?}");
        assert_eq!(diags[0].field, "split.val_fraction");
        assert_eq!(diags[0].line, Some(9));
        assert_eq!(diags[1].field, "lilaw.mask");
        assert_eq!(diags[1].line, Some(11));
        assert!(diags[1].message.contains("at least one weight term"));
    }

    #[test]
    fn syntax_and_type_errors_are_line_anchored() {
        let err = parse("seeds = [1]\n[dataset]\nkind = \"blobs\"\nclasses = \"three\"\n", Path::new(".")).unwrap_err();
        assert_eq!(err.line, Some(4));
        let err = parse("seeds = [1]\nbogus = 2\n", Path::new(".")).unwrap_err();
        assert_eq!(err.line, Some(2));
    }

    #[test]
    fn arm_names_round_trip() {
        for name in ["baseline", "lilaw", "lilaw-a", "lilaw-bd", "lilaw-abd"] {
            assert_eq!(Arm::parse(name).unwrap().name(), name);
        }
        assert!(Arm::parse("lilaw-x").is_err());
        assert!(Arm::parse("other").is_err());
    }

    #[test]
    fn ablation_overrides_configured_mask() {
        let loaded = load(MINIMAL);
        let cfg = loaded.train_config(Arm::parse("lilaw-b").unwrap(), 3);
        assert!(cfg.lilaw_enabled);
        assert_eq!(cfg.lilaw.mask.letters(), "b");
        assert_eq!(cfg.seed, 3);
        assert!(!loaded.train_config(Arm::Baseline, 3).lilaw_enabled);
    }
}
