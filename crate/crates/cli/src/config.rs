//! Run configuration: defaults, figure presets, TOML files and flags, merged
//! in that order so that later layers win.

use std::path::{Path, PathBuf};

use dirac_warp::gauge::GaugePath;
use dirac_warp::modes::SpinStructure;
use dirac_warp::ode::IntegratorConfig;
use dirac_warp::warp::WarpProfile;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig5,
}

/// Fully resolved configuration. Everything except `out_dir` enters the
/// fingerprint written into every output file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub alpha: f64,
    pub length: f64,
    pub spin: SpinStructure,
    /// Constant gauge value `A`.
    pub gauge: f64,
    /// Built-in path name or knot-file path.
    pub path: Option<String>,
    pub delta: f64,
    /// Single mode; overrides the window when set.
    pub k: Option<f64>,
    pub k_min: f64,
    pub k_max: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub scan_points: usize,
    /// Nominal `Δs` of branch continuation.
    pub s_step: f64,
    /// Fixed spectral parameter of `wronskian` and `heun`.
    pub lambda: f64,
    pub scale: f64,
    pub exclude_touching: bool,
    pub integrator: IntegratorConfig,
    pub formats: Vec<Format>,
    #[serde(skip)]
    pub out_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            alpha: 1.0,
            length: 1.5,
            spin: SpinStructure::Periodic,
            gauge: 0.3,
            path: None,
            delta: 0.1,
            k: None,
            k_min: -3.0,
            k_max: 3.0,
            lambda_min: -10.0,
            lambda_max: 10.0,
            scan_points: 401,
            s_step: 0.01,
            lambda: 2.0,
            scale: 1e8,
            exclude_touching: false,
            integrator: IntegratorConfig::default(),
            formats: vec![Format::Csv, Format::Json, Format::Svg],
            out_dir: PathBuf::from("out"),
        }
    }
}

/// One configuration layer; unset fields leave the layer below untouched.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    pub preset: Option<Preset>,
    pub alpha: Option<f64>,
    pub length: Option<f64>,
    pub spin: Option<SpinStructure>,
    pub gauge: Option<f64>,
    pub path: Option<String>,
    pub delta: Option<f64>,
    pub k: Option<f64>,
    pub k_min: Option<f64>,
    pub k_max: Option<f64>,
    pub lambda_min: Option<f64>,
    pub lambda_max: Option<f64>,
    pub scan_points: Option<usize>,
    pub s_step: Option<f64>,
    pub lambda: Option<f64>,
    pub scale: Option<f64>,
    pub exclude_touching: Option<bool>,
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
    pub max_step: Option<f64>,
    pub grid_points: Option<usize>,
    pub formats: Option<Vec<Format>>,
    pub out_dir: Option<PathBuf>,
}

impl Overrides {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(vec![format!("config file: {e}")]))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(vec![format!("cannot read {}: {e}", path.display())]))?;
        Self::from_toml(&text)
    }
}

macro_rules! apply {
    ($cfg:ident, $o:ident; $($field:ident),*) => {
        $(if let Some(v) = $o.$field.clone() { $cfg.$field = v; })*
    };
}

impl RunConfig {
    pub fn preset(p: Preset) -> Self {
        let base = RunConfig::default();
        match p {
            Preset::Fig1 => RunConfig {
                k: Some(1.0),
                ..base
            },
            Preset::Fig2 | Preset::Fig3 | Preset::Fig4 => RunConfig {
                path: Some(
                    match p {
                        Preset::Fig2 => "example1",
                        Preset::Fig3 => "example2",
                        _ => "example3",
                    }
                    .into(),
                ),
                lambda_min: -4.0,
                lambda_max: 4.0,
                scan_points: 161,
                ..base
            },
            Preset::Fig5 => RunConfig {
                k: Some(1.0),
                lambda: 2.0,
                scale: 1e8,
                ..base
            },
        }
    }

    pub fn apply(&mut self, o: &Overrides) {
        apply!(self, o; alpha, length, spin, gauge, delta, lambda_min, lambda_max, scan_points,
            s_step, lambda, scale, exclude_touching, k_min, k_max, formats, out_dir);
        if o.path.is_some() {
            self.path = o.path.clone();
        }
        if o.k.is_some() {
            self.k = o.k;
        }
        let ic = &mut self.integrator;
        if let Some(v) = o.rel_tol {
            ic.rel_tol = v;
        }
        if let Some(v) = o.abs_tol {
            ic.abs_tol = v;
        }
        if let Some(v) = o.max_step {
            ic.max_step = v;
        }
        if let Some(v) = o.grid_points {
            ic.grid_points = v;
        }
    }

    /// Defaults, then the preset (flag preset wins over file preset), then
    /// the file, then the flags.
    pub fn resolve(file: Option<&Overrides>, flags: &Overrides) -> Self {
        let preset = flags.preset.or(file.and_then(|f| f.preset));
        let mut cfg = preset.map_or_else(RunConfig::default, RunConfig::preset);
        if let Some(f) = file {
            cfg.apply(f);
        }
        cfg.apply(flags);
        cfg
    }

    /// One message per violated precondition.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let Err(e) = WarpProfile::new(self.alpha, self.length) {
            out.push(e.to_string());
        }
        if !self.gauge.is_finite() {
            out.push(format!("gauge must be finite, got {}", self.gauge));
        }
        if !(self.delta.is_finite() && self.delta > 0.0) {
            out.push(format!("delta must be positive, got {}", self.delta));
        }
        if let Some(k) = self.k {
            if !self.spin.contains(k) {
                out.push(format!("k = {k} is not in the {:?} mode lattice", self.spin));
            }
        }
        if self.k_min.is_nan() || self.k_max.is_nan() || self.k_min > self.k_max {
            out.push(format!("k_min = {} exceeds k_max = {}", self.k_min, self.k_max));
        }
        if !(self.lambda_min.is_finite() && self.lambda_max.is_finite() && self.lambda_min < self.lambda_max) {
            out.push(format!(
                "lambda window [{}, {}] must be finite and nonempty",
                self.lambda_min, self.lambda_max
            ));
        }
        if self.scan_points < 2 {
            out.push(format!("scan_points must be at least 2, got {}", self.scan_points));
        }
        if !(self.s_step.is_finite() && self.s_step > 0.0) {
            out.push(format!("s_step must be positive, got {}", self.s_step));
        }
        if !self.lambda.is_finite() {
            out.push(format!("lambda must be finite, got {}", self.lambda));
        }
        if !(self.scale.is_finite() && self.scale > 0.0) {
            out.push(format!("scale must be positive, got {}", self.scale));
        }
        if let Some(p) = &self.path {
            if GaugePath::builtin(p).is_none() && !Path::new(p).exists() {
                out.push(format!("gauge path {p:?} is neither a built-in name nor a file"));
            }
        }
        out.extend(self.integrator.violations());
        out
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(CliError::Config(v))
        }
    }

    pub fn profile(&self) -> WarpProfile {
        WarpProfile::new(self.alpha, self.length).expect("validated geometry")
    }

    /// The configured gauge path; `example1` when none is set.
    pub fn gauge_path(&self) -> Result<GaugePath, CliError> {
        let name = self.path.as_deref().unwrap_or("example1");
        match GaugePath::builtin(name) {
            Some(p) => Ok(p),
            None => GaugePath::load(name).map_err(CliError::from),
        }
    }

    /// Single mode if set, else the lattice values in `[k_min, k_max]`.
    pub fn modes(&self) -> Vec<f64> {
        match self.k {
            Some(k) => vec![k],
            None => self.spin.modes_between(self.k_min, self.k_max),
        }
    }

    pub fn single_mode(&self) -> Result<f64, CliError> {
        self.k
            .ok_or_else(|| CliError::Config(vec!["this command needs a single mode; pass --k".into()]))
    }

    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layering_order() {
        let file = Overrides::from_toml("preset = \"fig1\"\nalpha = 2.0\nscan_points = 50\n").unwrap();
        let flags = Overrides {
            scan_points: Some(60),
            ..Default::default()
        };
        let cfg = RunConfig::resolve(Some(&file), &flags);
        assert_eq!(cfg.k, Some(1.0));
        assert_eq!(cfg.alpha, 2.0);
        assert_eq!(cfg.scan_points, 60);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(Overrides::from_toml("alhpa = 1.0").is_err());
    }

    #[test]
    fn every_violation_is_reported() {
        let cfg = RunConfig {
            alpha: -1.0,
            scan_points: 1,
            delta: 0.0,
            ..RunConfig::default()
        };
        assert_eq!(cfg.violations().len(), 3);
        assert!(RunConfig::default().validate().is_ok());
    }

    #[test]
    fn presets() {
        let f1 = RunConfig::preset(Preset::Fig1);
        assert_eq!((f1.alpha, f1.gauge, f1.k, f1.length), (1.0, 0.3, Some(1.0), 1.5));
        assert_eq!(RunConfig::preset(Preset::Fig4).path.as_deref(), Some("example3"));
        let f5 = RunConfig::preset(Preset::Fig5);
        assert_eq!((f5.lambda, f5.scale), (2.0, 1e8));
    }
}
