//! Build configuration: a flat `key = value` text format with `#` comments.

use crate::bump::BumpSpec;
use crate::denjoy::{twist_gate, FamilyKind, LengthFamily};
use crate::error::{Error, Result};
use crate::surgery::SeedOffsets;
use serde::{Deserialize, Serialize};

/// Every recognized key, in canonical order.
pub const CONFIG_KEYS: [&str; 12] =
    ["alpha", "family", "C", "delta", "N", "bump_p", "x0_fraction", "K_orbit", "dL", "dR", "fL", "rng_seed"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BuildConfig {
    pub alpha: f64,
    pub family: FamilyKind,
    #[serde(rename = "C")]
    pub offset: f64,
    pub delta: f64,
    #[serde(rename = "N")]
    pub table_radius: i64,
    pub bump_p: u32,
    pub x0_fraction: f64,
    #[serde(rename = "K_orbit")]
    pub orbit_radius: i64,
    #[serde(rename = "dL")]
    pub dl: f64,
    #[serde(rename = "dR")]
    pub dr: f64,
    #[serde(rename = "fL")]
    pub fl: f64,
    pub rng_seed: u64,
}

impl Default for BuildConfig {
    fn default() -> Self {
        let seeds = SeedOffsets::default();
        Self {
            alpha: (5f64.sqrt() - 1.0) / 2.0,
            family: FamilyKind::Quadratic,
            offset: 100.0,
            delta: 1.0,
            table_radius: 200_000,
            bump_p: 3,
            x0_fraction: 0.5,
            orbit_radius: 300,
            dl: seeds.dl,
            dr: seeds.dr,
            fl: seeds.fl,
            rng_seed: 1,
        }
    }
}

fn parse_value<T: std::str::FromStr>(key: &str, raw: &str) -> std::result::Result<T, String> {
    raw.parse().map_err(|_| format!("{key}: cannot parse {raw:?}"))
}

impl BuildConfig {
    /// Defaults overridden by the assignments in `text`; the result is validated.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut errs = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            match line.split_once('=') {
                Some((key, value)) => {
                    if let Err(e) = cfg.set(key.trim(), value.trim()) {
                        errs.push(format!("line {}: {e}", n + 1));
                    }
                }
                None => errs.push(format!("line {}: expected key = value, got {line:?}", n + 1)),
            }
        }
        if !errs.is_empty() {
            return Err(Error::Config(errs));
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Assigns one key without validating the whole configuration.
    pub fn set(&mut self, key: &str, raw: &str) -> std::result::Result<(), String> {
        match key {
            "alpha" => self.alpha = parse_value(key, raw)?,
            "family" => {
                self.family = match raw {
                    "quadratic" => FamilyKind::Quadratic,
                    "paper_log" => FamilyKind::PaperLog,
                    _ => return Err(format!("family: expected quadratic or paper_log, got {raw:?}")),
                }
            }
            "C" => self.offset = parse_value(key, raw)?,
            "delta" => self.delta = parse_value(key, raw)?,
            "N" => self.table_radius = parse_value(key, raw)?,
            "bump_p" => self.bump_p = parse_value(key, raw)?,
            "x0_fraction" => self.x0_fraction = parse_value(key, raw)?,
            "K_orbit" => self.orbit_radius = parse_value(key, raw)?,
            "dL" => self.dl = parse_value(key, raw)?,
            "dR" => self.dr = parse_value(key, raw)?,
            "fL" => self.fl = parse_value(key, raw)?,
            "rng_seed" => self.rng_seed = parse_value(key, raw)?,
            _ => return Err(format!("unknown key {key:?}")),
        }
        Ok(())
    }

    pub fn length_family(&self) -> LengthFamily {
        LengthFamily { kind: self.family, offset: self.offset, delta: self.delta }
    }

    pub fn seed_offsets(&self) -> SeedOffsets {
        SeedOffsets { dl: self.dl, dr: self.dr, fl: self.fl }
    }

    /// Checks every key and reports all violations at once.
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        if !(self.alpha.is_finite() && self.alpha > 0.0 && self.alpha < 1.0) {
            errs.push(format!("alpha = {} must lie in (0, 1)", self.alpha));
        }
        let family = self.length_family();
        let family_ok = match family.validate() {
            Ok(()) => true,
            Err(Error::Config(v)) => {
                errs.extend(v);
                false
            }
            Err(e) => {
                errs.push(e.to_string());
                false
            }
        };
        if self.table_radius < 8 {
            errs.push(format!("N = {} must be >= 8", self.table_radius));
        }
        let bump = BumpSpec::new(self.bump_p);
        if let Err(e) = &bump {
            errs.push(format!("bump_p: {e}"));
        }
        if let (true, Ok(bump)) = (family_ok && self.table_radius >= 8, &bump) {
            let (value, k, ratio) = twist_gate(&family, self.table_radius, bump.eta_max());
            if value >= 1.0 {
                errs.push(format!(
                    "C: twist gate max |l(k+1)/l(k) - 1| * eta_max = {value} >= 1 at k = {k} (ratio {ratio}, eta_max {})",
                    bump.eta_max()
                ));
            }
        }
        if !(self.x0_fraction > 0.0 && self.x0_fraction < 1.0) {
            errs.push(format!("x0_fraction = {} must lie in (0, 1)", self.x0_fraction));
        }
        if self.orbit_radius < 1 {
            errs.push(format!("K_orbit = {} must be >= 1", self.orbit_radius));
        } else if self.orbit_radius >= self.table_radius {
            errs.push(format!("K_orbit = {} must be < N = {}", self.orbit_radius, self.table_radius));
        }
        if !(self.dl.is_finite() && self.dl > 0.0) {
            errs.push(format!("dL = {} must be > 0", self.dl));
        }
        if !(self.dr.is_finite() && self.dr > 0.0) {
            errs.push(format!("dR = {} must be > 0", self.dr));
        }
        if self.dl == self.dr {
            errs.push("dL = dR: β₀^R ≠ β₀^L violated".to_string());
        }
        if !(self.fl > 0.0 && self.fl < 1.0) {
            errs.push(format!("fL = {} must lie in (0, 1)", self.fl));
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(errs))
        }
    }

    /// Canonical `key = value` text, parseable by [`parse`](Self::parse).
    pub fn to_text(&self) -> String {
        let family = self.family.name();
        format!(
            "alpha = {}\nfamily = {family}\nC = {}\ndelta = {}\nN = {}\nbump_p = {}\nx0_fraction = {}\nK_orbit = {}\ndL = {}\ndR = {}\nfL = {}\nrng_seed = {}\n",
            self.alpha,
            self.offset,
            self.delta,
            self.table_radius,
            self.bump_p,
            self.x0_fraction,
            self.orbit_radius,
            self.dl,
            self.dr,
            self.fl,
            self.rng_seed
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn messages(text: &str) -> Vec<String> {
        match BuildConfig::parse(text) {
            Err(Error::Config(v)) => v,
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn empty_text_gives_defaults() {
        let cfg = BuildConfig::parse("# nothing\n\n").unwrap();
        assert_eq!(cfg, BuildConfig::default());
        assert_eq!(cfg.orbit_radius, 300);
        assert_eq!(cfg.table_radius, 200_000);
    }

    #[test]
    fn text_round_trip() {
        let mut cfg = BuildConfig::default();
        cfg.set("N", "5000").unwrap();
        cfg.set("dR", "0.15").unwrap();
        assert_eq!(BuildConfig::parse(&cfg.to_text()).unwrap(), cfg);
    }

    #[test]
    fn equal_offsets_rejected() {
        let v = messages("dL = 0.1\ndR = 0.1 # same\n");
        assert!(v.iter().any(|m| m.contains("β₀^R ≠ β₀^L violated")), "{v:?}");
    }

    #[test]
    fn small_offset_fails_gate_with_values() {
        let v = messages("C = 1");
        assert!(v.iter().any(|m| m.contains("twist gate") && m.contains("k = ")), "{v:?}");
    }

    #[test]
    fn every_violation_is_listed() {
        let v = messages("alpha = 2\nfL = 1.5\nK_orbit = 0\nbump_p = 40\nwhat = 1\n");
        assert_eq!(v.len(), 1, "parse errors stop before validation: {v:?}");
        let v = messages("alpha = 2\nfL = 1.5\nK_orbit = 0\nbump_p = 40\n");
        for key in ["alpha", "fL", "K_orbit", "bump_p"] {
            assert!(v.iter().any(|m| m.starts_with(key)), "{key} missing from {v:?}");
        }
    }

    #[test]
    fn family_keyword() {
        let cfg = BuildConfig::parse("family = paper_log\nC = 50\nN = 1000").unwrap_or_else(|e| panic!("{e}"));
        assert_eq!(cfg.family, FamilyKind::PaperLog);
        assert!(BuildConfig::parse("family = cubic").is_err());
    }
}
