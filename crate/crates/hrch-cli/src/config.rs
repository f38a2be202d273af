//! Flat key-value configuration files with dotted sections.
//!
//! ```text
//! # required simulation keys
//! alpha = 0.5
//! tau = 1.0
//! eps = 0.01            # alias of yosida.epsilon
//! L = 1.0
//! n = 32
//! dt = 1e-3
//! T = 0.5
//! potential = regular   # regular | logarithmic | double-obstacle
//! g = zero              # or forcing.term1.amplitude = ... etc.
//! phi0 = const 0.1      # or init.phi0.mode = coeffs, init.phi0.coeffs = ...
//! ```
//!
//! `M` defaults to `2n` (`4n` for the double obstacle), `picard` to 1,
//! `mu0`/`nu0` to zero. Every violated invariant reports the offending line
//! or field path.

use std::collections::BTreeMap;

use hrch_core::galerkin::{ForcingSpec, ForcingTerm, InitField, InitSpec, SimConfig};
use hrch_core::{Error, Result, SplitPotential, YosidaParams};

/// Parsed file: keys with the line they came from.
#[derive(Debug, Clone)]
pub struct RawConfig {
    entries: BTreeMap<String, (String, usize)>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw_line.find('#') {
                Some(pos) => &raw_line[..pos],
                None => raw_line,
            };
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let Some(eq) = line.find('=') else {
                return Err(Error::Config(format!(
                    "line {line_no}: expected `key = value`, got `{line}`"
                )));
            };
            let key = line[..eq].trim().to_string();
            let value = line[eq + 1..].trim().to_string();
            if key.is_empty() || value.is_empty() {
                return Err(Error::Config(format!(
                    "line {line_no}: empty key or value in `{line}`"
                )));
            }
            if entries.insert(key.clone(), (value, line_no)).is_some() {
                return Err(Error::Config(format!("line {line_no}: duplicate key `{key}`")));
            }
        }
        Ok(RawConfig { entries })
    }

    fn get(&self, key: &str) -> Option<&(String, usize)> {
        self.entries.get(key)
    }

    fn f64_at(&self, key: &str) -> Result<Option<f64>> {
        match self.get(key) {
            None => Ok(None),
            Some((v, line)) => v.parse::<f64>().map(Some).map_err(|_| {
                Error::Config(format!("line {line}: {key}: `{v}` is not a number"))
            }),
        }
    }

    fn require_f64(&self, key: &str) -> Result<f64> {
        self.f64_at(key)?
            .ok_or_else(|| Error::Config(format!("{key}: missing required key")))
    }

    fn usize_at(&self, key: &str) -> Result<Option<usize>> {
        match self.get(key) {
            None => Ok(None),
            Some((v, line)) => v.parse::<usize>().map(Some).map_err(|_| {
                Error::Config(format!("line {line}: {key}: `{v}` is not a nonnegative integer"))
            }),
        }
    }

    fn list_f64_at(&self, key: &str) -> Result<Option<Vec<f64>>> {
        match self.get(key) {
            None => Ok(None),
            Some((v, line)) => {
                let mut out = Vec::new();
                for item in v.split(',') {
                    let item = item.trim();
                    if item.is_empty() {
                        continue;
                    }
                    out.push(item.parse::<f64>().map_err(|_| {
                        Error::Config(format!("line {line}: {key}: `{item}` is not a number"))
                    })?);
                }
                if out.is_empty() {
                    return Err(Error::Config(format!("line {line}: {key}: empty list")));
                }
                Ok(Some(out))
            }
        }
    }

    fn list_usize_at(&self, key: &str) -> Result<Option<Vec<usize>>> {
        match self.list_f64_at(key)? {
            None => Ok(None),
            Some(v) => {
                let mut out = Vec::with_capacity(v.len());
                for x in v {
                    if x.fract() != 0.0 || x < 0.0 {
                        return Err(Error::Config(format!("{key}: `{x}` is not a mode count")));
                    }
                    out.push(x as usize);
                }
                Ok(Some(out))
            }
        }
    }
}

fn parse_potential(raw: &RawConfig) -> Result<SplitPotential> {
    let (kind, line) = match raw.get("potential.kind").or_else(|| raw.get("potential")) {
        Some((v, l)) => (v.as_str(), *l),
        None => return Err(Error::Config("potential: missing required key".into())),
    };
    match kind {
        "regular" => Ok(SplitPotential::regular()),
        "logarithmic" | "log" => {
            let c1 = raw.f64_at("potential.c1")?.unwrap_or(2.0);
            SplitPotential::logarithmic(c1)
        }
        "double-obstacle" | "obstacle" => {
            let c2 = raw.f64_at("potential.c2")?.unwrap_or(1.0);
            SplitPotential::double_obstacle(c2)
        }
        other => Err(Error::Config(format!(
            "line {line}: potential: unknown kind `{other}` (regular | logarithmic | double-obstacle)"
        ))),
    }
}

fn parse_forcing(raw: &RawConfig) -> Result<ForcingSpec> {
    if let Some((v, line)) = raw.get("g") {
        if v == "zero" {
            return Ok(ForcingSpec::zero());
        }
        return Err(Error::Config(format!(
            "line {line}: g: only `zero` is a shorthand; use forcing.termK.* keys otherwise"
        )));
    }
    let mut terms = Vec::new();
    for k in 1.. {
        let prefix = format!("forcing.term{k}");
        let amp_key = format!("{prefix}.amplitude");
        if raw.get(&amp_key).is_none() {
            break;
        }
        let amplitude = raw.require_f64(&amp_key)?;
        let mode = raw.usize_at(&format!("{prefix}.mode"))?.unwrap_or(0);
        let c0 = raw.f64_at(&format!("{prefix}.c0"))?.unwrap_or(1.0);
        let c1 = raw.f64_at(&format!("{prefix}.c1"))?.unwrap_or(0.0);
        terms.push(ForcingTerm { amplitude, mode, c0, c1 });
    }
    Ok(ForcingSpec::new(terms))
}

fn parse_init_field(raw: &RawConfig, name: &str) -> Result<InitField> {
    // shorthand: `phi0 = zero` / `phi0 = const 0.1`
    if let Some((v, line)) = raw.get(name) {
        if v == "zero" {
            return Ok(InitField::zero());
        }
        if let Some(rest) = v.strip_prefix("const ") {
            let c = rest.trim().parse::<f64>().map_err(|_| {
                Error::Config(format!("line {line}: {name}: `{rest}` is not a number"))
            })?;
            return Ok(InitField::Constant(c));
        }
        return Err(Error::Config(format!(
            "line {line}: {name}: expected `zero` or `const <value>`; use init.{name}.* for lists"
        )));
    }
    let mode_key = format!("init.{name}.mode");
    let Some((mode, line)) = raw.get(&mode_key) else {
        return Ok(InitField::zero());
    };
    match mode.as_str() {
        "zero" => Ok(InitField::zero()),
        "const" => {
            let v = raw.require_f64(&format!("init.{name}.value"))?;
            Ok(InitField::Constant(v))
        }
        "coeffs" => {
            let v = raw
                .list_f64_at(&format!("init.{name}.coeffs"))?
                .ok_or_else(|| Error::Config(format!("init.{name}.coeffs: missing list")))?;
            Ok(InitField::Coeffs(v))
        }
        "samples" => {
            let v = raw
                .list_f64_at(&format!("init.{name}.samples"))?
                .ok_or_else(|| Error::Config(format!("init.{name}.samples: missing list")))?;
            Ok(InitField::Samples(v))
        }
        other => Err(Error::Config(format!(
            "line {line}: {mode_key}: unknown mode `{other}` (zero | const | coeffs | samples)"
        ))),
    }
}

/// Experiment-specific keys, all optional with study defaults.
#[derive(Debug, Clone)]
pub struct ExperimentExtras {
    pub alphas: Vec<f64>,
    pub epsilons: Vec<f64>,
    pub ns: Vec<usize>,
    pub magnitudes: Vec<f64>,
    /// Which data components the continuous-dependence perturbation touches.
    pub targets: Vec<String>,
    /// Wavenumber/slot of the perturbation shape.
    pub perturb_mode: usize,
    pub yosida_samples: usize,
    pub yosida_range: (f64, f64),
    pub yosida_epsilons: Vec<f64>,
    pub zelik_m0: Vec<f64>,
}

/// A fully parsed configuration file.
#[derive(Debug, Clone)]
pub struct ParsedConfig {
    pub sim: SimConfig,
    pub extras: ExperimentExtras,
}

/// Parses and validates a config file; errors carry line numbers or field
/// paths.
pub fn parse_config(text: &str) -> Result<ParsedConfig> {
    let raw = RawConfig::parse(text)?;

    let alpha = raw.require_f64("alpha")?;
    let tau = raw.require_f64("tau")?;
    let potential = parse_potential(&raw)?;
    let eps = match raw.f64_at("eps")? {
        Some(e) => e,
        None => raw.require_f64("yosida.epsilon")?,
    };
    let mut yosida = YosidaParams::new(eps)?;
    if let Some(tol) = raw.f64_at("yosida.newton_tol")? {
        yosida = yosida.with_tolerance(tol)?;
    }
    if let Some(iters) = raw.usize_at("yosida.max_iters")? {
        yosida.newton_max_iters = iters as u32;
    }

    let length = raw.require_f64("L")?;
    let modes = raw
        .usize_at("n")?
        .ok_or_else(|| Error::Config("n: missing required key".into()))?;
    let quad_points = raw
        .usize_at("M")?
        .unwrap_or_else(|| SimConfig::default_quad_points(modes, potential.kind()));
    let dt = match raw.f64_at("dt")? {
        Some(v) => v,
        None => SimConfig::default_dt(alpha, tau),
    };
    let t_end = raw.require_f64("T")?;
    let picard_iters = raw
        .usize_at("picard")?
        .or(raw.usize_at("picard_iters")?)
        .unwrap_or(1) as u32;

    let sim = SimConfig {
        alpha,
        tau,
        yosida,
        length,
        modes,
        quad_points,
        dt,
        t_end,
        potential,
        forcing: parse_forcing(&raw)?,
        init: InitSpec {
            mu0: parse_init_field(&raw, "mu0")?,
            nu0: parse_init_field(&raw, "nu0")?,
            phi0: parse_init_field(&raw, "phi0")?,
        },
        picard_iters,
    };
    sim.validate()?;
    // surface inadmissible initial data now, with the field path
    let basis = sim.build_basis()?;
    hrch_core::galerkin::initial_state(&sim, &basis)?;

    let extras = ExperimentExtras {
        alphas: raw
            .list_f64_at("sweep.alphas")?
            .unwrap_or_else(|| vec![1.0, 0.25, 0.0625, 0.015625, 0.00390625]),
        epsilons: raw
            .list_f64_at("sweep.epsilons")?
            .unwrap_or_else(|| vec![0.1, 0.05, 0.025, 0.0125]),
        ns: raw.list_usize_at("refine.ns")?.unwrap_or_else(|| vec![8, 16, 32, 64]),
        magnitudes: raw
            .list_f64_at("contdep.magnitudes")?
            .unwrap_or_else(|| vec![1e-1, 1e-2, 1e-3, 1e-4]),
        targets: raw
            .get("contdep.targets")
            .map(|(v, _)| v.split(',').map(|s| s.trim().to_string()).collect())
            .unwrap_or_else(|| vec!["g".to_string()]),
        perturb_mode: raw.usize_at("contdep.mode")?.unwrap_or(1),
        yosida_samples: raw.usize_at("yosida_check.samples")?.unwrap_or(10_000),
        yosida_range: (
            raw.f64_at("yosida_check.lo")?.unwrap_or(-3.0),
            raw.f64_at("yosida_check.hi")?.unwrap_or(3.0),
        ),
        yosida_epsilons: raw
            .list_f64_at("yosida_check.epsilons")?
            .unwrap_or_else(|| vec![0.5, 0.1, 0.01]),
        zelik_m0: raw.list_f64_at("yosida_check.m0")?.unwrap_or_else(|| vec![0.0, 0.3, -0.3]),
    };

    Ok(ParsedConfig { sim, extras })
}

/// Builds the continuous-dependence perturbation from the extras.
pub fn build_perturbation(
    extras: &ExperimentExtras,
    sim: &SimConfig,
) -> Result<hrch_core::experiments::DataPerturbation> {
    let mut pert = hrch_core::experiments::DataPerturbation::default();
    let slot = extras.perturb_mode;
    if slot >= sim.modes {
        return Err(Error::Config(format!(
            "contdep.mode: slot {slot} outside the basis (n = {})",
            sim.modes
        )));
    }
    let mut shape = vec![0.0; sim.modes];
    shape[slot] = 1.0;
    for target in &extras.targets {
        match target.as_str() {
            "g" => {
                pert.forcing = Some(ForcingSpec::new(vec![ForcingTerm {
                    amplitude: 1.0,
                    mode: slot,
                    c0: 1.0,
                    c1: 0.0,
                }]));
            }
            "mu0" => pert.mu0 = Some(shape.clone()),
            "nu0" => pert.nu0 = Some(shape.clone()),
            "phi0" => pert.phi0 = Some(shape.clone()),
            other => {
                return Err(Error::Config(format!(
                    "contdep.targets: unknown component `{other}` (g | mu0 | nu0 | phi0)"
                )))
            }
        }
    }
    Ok(pert)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "\
alpha = 0.5
tau = 1
eps = 0.01
L = 1
n = 32
M = 64
dt = 1e-3
T = 0.5
potential = regular
g = zero
phi0 = const 0.1
";

    #[test]
    fn minimal_config_parses() {
        let parsed = parse_config(MINIMAL).unwrap();
        assert_eq!(parsed.sim.modes, 32);
        assert_eq!(parsed.sim.quad_points, 64);
        assert_eq!(parsed.sim.picard_iters, 1);
        assert_eq!(parsed.sim.init.phi0, InitField::Constant(0.1));
        assert!(parsed.sim.forcing.terms.is_empty());
    }

    #[test]
    fn alpha_zero_cites_constraint() {
        let text = MINIMAL.replace("alpha = 0.5", "alpha = 0");
        let err = parse_config(&text).unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("alpha must be in (0,1]"), "{msg}");
    }

    #[test]
    fn logarithmic_mean_outside_domain_rejected() {
        let text = MINIMAL
            .replace("potential = regular", "potential = logarithmic")
            .replace("phi0 = const 0.1", "phi0 = const 1.0");
        let err = parse_config(&text).unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("phi0"), "{msg}");
    }

    #[test]
    fn unparseable_lines_carry_line_numbers() {
        let err = parse_config("alpha 0.5\n").unwrap_err();
        assert!(format!("{err}").contains("line 1"));
        let err = parse_config("alpha = zero\n").unwrap_err();
        assert!(format!("{err}").contains("line 1"));
        let err = parse_config("alpha = 1\nalpha = 2\n").unwrap_err();
        assert!(format!("{err}").contains("duplicate"));
    }

    #[test]
    fn forcing_terms_and_defaults() {
        let text = MINIMAL.replace(
            "g = zero",
            "forcing.term1.amplitude = 0.5\nforcing.term1.mode = 1\nforcing.term2.amplitude = 0.25\nforcing.term2.c1 = 1.5",
        );
        let parsed = parse_config(&text).unwrap();
        assert_eq!(parsed.sim.forcing.terms.len(), 2);
        assert_eq!(parsed.sim.forcing.terms[0].mode, 1);
        assert_eq!(parsed.sim.forcing.terms[1].c1, 1.5);
        // M defaults to 4n for the double obstacle
        let text = MINIMAL
            .replace("potential = regular", "potential = double-obstacle")
            .replace("M = 64\n", "");
        let parsed = parse_config(&text).unwrap();
        assert_eq!(parsed.sim.quad_points, 128);
    }
}
