//! End-to-end construction from a [`BuildConfig`] and its JSON document.
//!
//! The document stores the gap table, the orbit and the slope sequence; surgery
//! profiles are derived data and are rebuilt from the slopes on load, so a
//! reloaded document re-serializes byte for byte.

use crate::base_map::{build_orbit, DenjoyMap, GapDynamics, OrbitTable};
use crate::bump::BumpSpec;
use crate::config::BuildConfig;
use crate::denjoy::{Gap, GapTable, LengthFamily};
use crate::error::{Error, Result};
use crate::surgery::{seed_slopes, GapSurgery, ModifiedMap, SeedOffsets, SlopeSeq};
use crate::twist::TwistSystem;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

pub const DOCUMENT_VERSION: u32 = 1;

/// Provenance block echoed into build documents and verification reports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub config: BuildConfig,
    pub tail_bound: f64,
    #[serde(rename = "K_orbit")]
    pub orbit_radius: i64,
    pub seed_offsets: SeedOffsets,
    /// Which gaps carry derivative surgery.
    pub surgered_gaps: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurgeryDocument {
    pub slopes: SlopeSeq,
    pub profiles: Vec<GapSurgery>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BuildDocument {
    pub version: u32,
    pub alpha: f64,
    pub family: LengthFamily,
    #[serde(rename = "N")]
    pub table_radius: i64,
    #[serde(rename = "a_C")]
    pub a_c: f64,
    pub tail_bound: f64,
    pub gaps: Vec<Gap>,
    pub orbit: OrbitTable,
    pub surgery: SurgeryDocument,
    pub manifest: Manifest,
}

impl BuildDocument {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("build documents contain only finite reals")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidBuild(e.to_string()))
    }
}

/// Everything built from one configuration.
#[derive(Debug)]
pub struct Construction {
    config: BuildConfig,
    orbit: OrbitTable,
    slopes: SlopeSeq,
    twist: TwistSystem,
}

impl Construction {
    pub fn build(config: &BuildConfig) -> Result<Self> {
        config.validate()?;
        let bump = BumpSpec::new(config.bump_p)?;
        let table = GapTable::build(config.alpha, config.length_family(), config.table_radius, &bump)?;
        let base = DenjoyMap::new(Arc::new(table), bump);
        let orbit = build_orbit(config.x0_fraction, config.orbit_radius, &base)?;
        let slopes = seed_slopes(&orbit, config.seed_offsets())?;
        Self::assemble(config.clone(), base, orbit, slopes)
    }

    fn assemble(config: BuildConfig, base: DenjoyMap, orbit: OrbitTable, slopes: SlopeSeq) -> Result<Self> {
        let h = ModifiedMap::build(base, &orbit, &slopes)?;
        Ok(Self { config, orbit, slopes, twist: TwistSystem::new(Arc::new(h)) })
    }

    /// Rebuilds from a stored document. Slopes are taken as stored, without
    /// re-running the recursion, so an edited document loads and can be verified.
    pub fn from_document(doc: &BuildDocument) -> Result<Self> {
        if doc.version != DOCUMENT_VERSION {
            return Err(Error::InvalidBuild(format!("unsupported document version {}", doc.version)));
        }
        let config = doc.manifest.config.clone();
        config.validate()?;
        let same = config.alpha == doc.alpha
            && config.length_family() == doc.family
            && config.table_radius == doc.table_radius
            && config.orbit_radius == doc.orbit.radius()
            && config.orbit_radius == doc.surgery.slopes.radius();
        if !same {
            return Err(Error::InvalidBuild("manifest config disagrees with stored data".into()));
        }
        let bump = BumpSpec::new(config.bump_p)?;
        let table =
            GapTable::from_parts(doc.alpha, doc.family, doc.table_radius, doc.a_c, doc.tail_bound, doc.gaps.clone())?;
        let base = DenjoyMap::new(Arc::new(table), bump);
        let orbit =
            OrbitTable::from_entries(doc.orbit.radius(), doc.orbit.x0_fraction(), doc.orbit.entries().to_vec())?;
        let s = &doc.surgery.slopes;
        let slopes = SlopeSeq::from_entries(s.radius(), s.m_tilde0(), *s.offsets(), s.entries().to_vec())?;
        Self::assemble(config, base, orbit, slopes)
    }

    /// Same table and orbit, different slopes.
    pub fn with_slopes(&self, slopes: SlopeSeq) -> Result<Self> {
        Self::assemble(self.config.clone(), self.g().clone(), self.orbit.clone(), slopes)
    }

    pub fn config(&self) -> &BuildConfig {
        &self.config
    }

    pub fn table(&self) -> &GapTable {
        self.g().table()
    }

    pub fn g(&self) -> &DenjoyMap {
        self.twist.g()
    }

    pub fn h(&self) -> &ModifiedMap {
        self.twist.h()
    }

    pub fn orbit(&self) -> &OrbitTable {
        &self.orbit
    }

    pub fn slopes(&self) -> &SlopeSeq {
        &self.slopes
    }

    pub fn twist(&self) -> &TwistSystem {
        &self.twist
    }

    pub fn manifest(&self) -> Manifest {
        Manifest {
            config: self.config.clone(),
            tail_bound: self.table().tail_bound(),
            orbit_radius: self.orbit.radius(),
            seed_offsets: *self.slopes.offsets(),
            surgered_gaps: format!("|k| <= {}; h = g on all other gaps", self.orbit.radius()),
        }
    }

    pub fn document(&self) -> BuildDocument {
        let table = self.table();
        BuildDocument {
            version: DOCUMENT_VERSION,
            alpha: table.alpha(),
            family: *table.family(),
            table_radius: table.radius(),
            a_c: table.a_c(),
            tail_bound: table.tail_bound(),
            gaps: table.gaps().to_vec(),
            orbit: self.orbit.clone(),
            surgery: SurgeryDocument { slopes: self.slopes.clone(), profiles: self.h().surgeries().to_vec() },
            manifest: self.manifest(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base_map::Side;

    fn small() -> BuildConfig {
        let mut cfg = BuildConfig::default();
        cfg.set("N", "2000").unwrap();
        cfg.set("K_orbit", "40").unwrap();
        cfg
    }

    #[test]
    fn document_round_trip_is_byte_identical() {
        let c = Construction::build(&small()).unwrap();
        let text = c.document().to_json();
        let doc = BuildDocument::from_json(&text).unwrap();
        let again = Construction::from_document(&doc).unwrap().document().to_json();
        assert_eq!(text, again);
    }

    #[test]
    fn mismatched_manifest_rejected() {
        let c = Construction::build(&small()).unwrap();
        let mut doc = c.document();
        doc.manifest.config.table_radius = 3000;
        assert!(matches!(Construction::from_document(&doc), Err(Error::InvalidBuild(_))));
    }

    #[test]
    fn edited_slopes_still_load() {
        let c = Construction::build(&small()).unwrap();
        let tampered = c.slopes().with_adjusted(0, Side::Right, 0.01);
        let t = c.with_slopes(tampered).unwrap();
        assert!(!t.slopes().violations(t.orbit()).is_empty());
    }
}
