//! Run configuration: command-line flags layered over an optional JSON file
//! layered over defaults.

use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};

use jastrow1d::ci::{FockBasis, MAX_CI_ORBITALS};
use jastrow1d::interaction::{InteractionKind, DEFAULT_RANGE};
use jastrow1d::jastrow::{alpha_lower_bound, ALPHA_MARGIN, MAX_PARTICLES, MIN_QUAD_ORDER};
use jastrow1d::twobody::MAX_BASIS;
use jastrow1d::{Interaction, Statistics};

pub const DEFAULT_INTERACTION: InteractionKind = InteractionKind::Quasi1dCoulomb;
pub const DEFAULT_STRENGTH: f64 = 0.5;
pub const DEFAULT_PARTICLES: usize = 3;
pub const DEFAULT_STATISTICS: Statistics = Statistics::Bosons;
pub const DEFAULT_ORBITALS: usize = 15;
pub const DEFAULT_QUAD_ORDER: usize = 64;
pub const DEFAULT_ALPHA_MIN: f64 = 0.7;
pub const DEFAULT_ALPHA_MAX: f64 = 1.1;
pub const DEFAULT_ALPHA_STEPS: usize = 17;
pub const DEFAULT_EIGENVALUES: usize = 4;

/// Upper limit on the per-coordinate quadrature order.
pub const MAX_QUAD_ORDER: usize = 512;

/// Upper limit on the number of scan points.
pub const MAX_ALPHA_STEPS: usize = 10_001;

/// Flags shared by every subcommand. Each one may also come from the
/// config file under the same (long) name.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// none, contact, soft_coulomb, quasi1d_coulomb or gaussian
    #[arg(long)]
    pub interaction: Option<String>,
    /// Interaction strength
    #[arg(long, allow_negative_numbers = true)]
    pub g: Option<f64>,
    /// Interaction range (transverse oscillator length for quasi1d_coulomb)
    #[arg(long)]
    pub range_b: Option<f64>,
    #[arg(long)]
    pub particles: Option<usize>,
    /// bosons or fermions
    #[arg(long)]
    pub statistics: Option<String>,
    /// Oscillator orbitals in the two-body and CI bases
    #[arg(long)]
    pub orbitals: Option<usize>,
    /// Quadrature nodes per integration coordinate
    #[arg(long)]
    pub quad_order: Option<usize>,
    #[arg(long)]
    pub alpha_min: Option<f64>,
    #[arg(long)]
    pub alpha_max: Option<f64>,
    #[arg(long)]
    pub alpha_steps: Option<usize>,
    /// Number of CI eigenvalues to report
    #[arg(long)]
    pub eigenvalues: Option<usize>,
    /// JSON file with default values for any of these flags
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Write results here instead of standard output
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
    /// Print the resolved configuration as a config file and exit
    #[arg(long)]
    pub emit_config: bool,
}

/// The config-file schema: a flat object keyed by flag name.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ConfigFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interaction: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub range_b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub particles: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub statistics: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orbitals: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quad_order: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eigenvalues: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config file {}: {e}", path.display()))?;
        serde_json::from_str(&text)
            .map_err(|e| format!("invalid config file {}: {e}", path.display()))
    }

    /// `self` with every field that `flags` sets replaced.
    fn overlay(self, flags: &RunArgs) -> Self {
        Self {
            interaction: flags.interaction.clone().or(self.interaction),
            g: flags.g.or(self.g),
            range_b: flags.range_b.or(self.range_b),
            particles: flags.particles.or(self.particles),
            statistics: flags.statistics.clone().or(self.statistics),
            orbitals: flags.orbitals.or(self.orbitals),
            quad_order: flags.quad_order.or(self.quad_order),
            alpha_min: flags.alpha_min.or(self.alpha_min),
            alpha_max: flags.alpha_max.or(self.alpha_max),
            alpha_steps: flags.alpha_steps.or(self.alpha_steps),
            eigenvalues: flags.eigenvalues.or(self.eigenvalues),
            output: flags.output.clone().or(self.output),
        }
    }
}

/// Which pipeline a configuration is validated for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    TwoBody,
    Scan,
    Ci,
    Compare,
}

/// Fully resolved and validated settings for one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub interaction: Interaction,
    pub particles: usize,
    pub statistics: Statistics,
    pub orbitals: usize,
    pub quad_order: usize,
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub alpha_steps: usize,
    pub eigenvalues: usize,
    pub output: Option<PathBuf>,
}

impl RunConfig {
    /// Resolves flags over the optional config file over defaults.
    pub fn from_args(args: &RunArgs, mode: Mode) -> Result<Self, String> {
        let file = match &args.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        Self::resolve(file.overlay(args), mode)
    }

    pub fn resolve(values: ConfigFile, mode: Mode) -> Result<Self, String> {
        let kind: InteractionKind = match &values.interaction {
            Some(s) => s.parse().map_err(|e| format!("--interaction: {e}"))?,
            None => DEFAULT_INTERACTION,
        };
        let g = values.g.unwrap_or(if kind == InteractionKind::None {
            0.0
        } else {
            DEFAULT_STRENGTH
        });
        let b = values.range_b.unwrap_or(DEFAULT_RANGE);
        if !g.is_finite() {
            return Err(format!("--g must be finite, got {g}"));
        }
        if !(b.is_finite() && b > 0.0) {
            return Err(format!("--range-b must be positive, got {b}"));
        }
        let interaction = Interaction::new(kind, g, b).map_err(|e| e.to_string())?;

        let particles = values.particles.unwrap_or(DEFAULT_PARTICLES);
        if !(2..=MAX_PARTICLES).contains(&particles) {
            return Err(format!(
                "--particles must be in 2..={MAX_PARTICLES}, got {particles}"
            ));
        }
        let statistics: Statistics = match &values.statistics {
            Some(s) => s.parse().map_err(|e| format!("--statistics: {e}"))?,
            None => DEFAULT_STATISTICS,
        };

        let orbitals = values.orbitals.unwrap_or(DEFAULT_ORBITALS);
        let max_orbitals = match mode {
            Mode::TwoBody | Mode::Scan => MAX_BASIS,
            Mode::Ci | Mode::Compare => MAX_CI_ORBITALS,
        };
        if !(2..=max_orbitals).contains(&orbitals) {
            return Err(format!(
                "--orbitals must be in 2..={max_orbitals} for this command, got {orbitals}"
            ));
        }
        if statistics == Statistics::Fermions && orbitals < particles {
            return Err(format!(
                "--orbitals must be at least --particles ({particles}) for fermions, got {orbitals}"
            ));
        }

        let quad_order = values.quad_order.unwrap_or(DEFAULT_QUAD_ORDER);
        if !(MIN_QUAD_ORDER..=MAX_QUAD_ORDER).contains(&quad_order) {
            return Err(format!(
                "--quad-order must be in {MIN_QUAD_ORDER}..={MAX_QUAD_ORDER}, got {quad_order}"
            ));
        }

        let alpha_min = values.alpha_min.unwrap_or(DEFAULT_ALPHA_MIN);
        let alpha_max = values.alpha_max.unwrap_or(DEFAULT_ALPHA_MAX);
        let floor = alpha_lower_bound(particles) + ALPHA_MARGIN;
        if !(alpha_min.is_finite() && alpha_min >= floor) {
            return Err(format!(
                "--alpha-min must be at least {floor:.6} for {particles} particles \
                 (normalizability bound sqrt(1 - 2/N) plus {ALPHA_MARGIN}), got {alpha_min}"
            ));
        }
        if !(alpha_max.is_finite() && alpha_max > alpha_min) {
            return Err(format!(
                "--alpha-max must exceed --alpha-min ({alpha_min}), got {alpha_max}"
            ));
        }
        let alpha_steps = values.alpha_steps.unwrap_or(DEFAULT_ALPHA_STEPS);
        if !(3..=MAX_ALPHA_STEPS).contains(&alpha_steps) {
            return Err(format!(
                "--alpha-steps must be in 3..={MAX_ALPHA_STEPS}, got {alpha_steps}"
            ));
        }

        let eigenvalues = values.eigenvalues.unwrap_or(DEFAULT_EIGENVALUES);
        if matches!(mode, Mode::Ci | Mode::Compare) {
            let dimension = FockBasis::new(particles, orbitals, statistics)
                .map_err(|e| e.to_string())?
                .dimension();
            if !(2..=dimension).contains(&eigenvalues) {
                return Err(format!(
                    "--eigenvalues must be in 2..={dimension} (the CI dimension), got {eigenvalues}"
                ));
            }
        } else if eigenvalues < 2 {
            return Err(format!("--eigenvalues must be at least 2, got {eigenvalues}"));
        }

        Ok(Self {
            interaction,
            particles,
            statistics,
            orbitals,
            quad_order,
            alpha_min,
            alpha_max,
            alpha_steps,
            eigenvalues,
            output: values.output,
        })
    }

    /// The configuration as a complete config file.
    pub fn to_file(&self) -> ConfigFile {
        ConfigFile {
            interaction: Some(self.interaction.kind.name().to_string()),
            g: Some(self.interaction.strength),
            range_b: Some(self.interaction.range),
            particles: Some(self.particles),
            statistics: Some(self.statistics.name().to_string()),
            orbitals: Some(self.orbitals),
            quad_order: Some(self.quad_order),
            alpha_min: Some(self.alpha_min),
            alpha_max: Some(self.alpha_max),
            alpha_steps: Some(self.alpha_steps),
            eigenvalues: Some(self.eigenvalues),
            output: self.output.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flags() -> RunArgs {
        RunArgs::default()
    }

    #[test]
    fn defaults() {
        let c = RunConfig::from_args(&flags(), Mode::Compare).unwrap();
        assert_eq!(c.particles, 3);
        assert_eq!(c.orbitals, 15);
        assert_eq!(c.quad_order, 64);
        assert_eq!((c.alpha_min, c.alpha_max, c.alpha_steps), (0.7, 1.1, 17));
        assert_eq!(c.eigenvalues, 4);
        assert_eq!(c.interaction.range, 0.1);
    }

    #[test]
    fn interaction_flags() {
        let mut f = flags();
        f.interaction = Some("quasi1d_coulomb".into());
        f.g = Some(0.5);
        let c = RunConfig::from_args(&f, Mode::Scan).unwrap();
        assert_eq!(c.interaction, Interaction::quasi1d_coulomb(0.5, 0.1).unwrap());
        assert_eq!(c.particles, 3);
    }

    #[test]
    fn alpha_below_bound_rejected() {
        let mut f = flags();
        f.alpha_min = Some(0.3);
        f.particles = Some(3);
        let err = RunConfig::from_args(&f, Mode::Scan).unwrap_err();
        assert!(err.contains("--alpha-min"), "{err}");
        f.alpha_min = Some(3.0_f64.recip().sqrt() + 2e-3);
        assert!(RunConfig::from_args(&f, Mode::Scan).is_ok());
    }

    #[test]
    fn command_specific_orbital_limits() {
        let mut f = flags();
        f.orbitals = Some(40);
        assert!(RunConfig::from_args(&f, Mode::Scan).is_ok());
        assert!(RunConfig::from_args(&f, Mode::Ci).is_err());
    }

    #[test]
    fn eigenvalue_count_checked_against_dimension() {
        let mut f = flags();
        f.statistics = Some("fermions".into());
        f.orbitals = Some(4);
        f.eigenvalues = Some(5);
        let err = RunConfig::from_args(&f, Mode::Ci).unwrap_err();
        assert!(err.contains("2..=4"), "{err}");
    }

    #[test]
    fn unknown_file_keys_rejected() {
        let err = serde_json::from_str::<ConfigFile>(r#"{"orbitals": 12, "colour": 3}"#)
            .unwrap_err()
            .to_string();
        assert!(err.contains("colour"), "{err}");
    }

    #[test]
    fn flags_override_file() {
        let file: ConfigFile =
            serde_json::from_str(r#"{"orbitals": 12, "g": 2.0, "statistics": "fermions"}"#).unwrap();
        let mut f = flags();
        f.orbitals = Some(10);
        let c = RunConfig::resolve(file.overlay(&f), Mode::Ci).unwrap();
        assert_eq!(c.orbitals, 10);
        assert_eq!(c.interaction.strength, 2.0);
        assert_eq!(c.statistics, Statistics::Fermions);
    }

    #[test]
    fn file_round_trip() {
        let mut f = flags();
        f.interaction = Some("contact".into());
        f.g = Some(8.0);
        f.alpha_steps = Some(9);
        let c = RunConfig::from_args(&f, Mode::Compare).unwrap();
        let text = serde_json::to_string(&c.to_file()).unwrap();
        let back: ConfigFile = serde_json::from_str(&text).unwrap();
        assert_eq!(RunConfig::resolve(back, Mode::Compare).unwrap(), c);
    }
}
