//! Scenario files: TOML documents mirroring [`NetworkScenario`], with an
//! optional `[pso]` table.

use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::model::NetworkScenario;
use crate::optimizer::PsoConfig;

#[derive(Deserialize)]
struct PsoSection {
    pso: Option<PsoConfig>,
}

pub fn scenario_to_toml(s: &NetworkScenario, pso: Option<&PsoConfig>) -> Result<String> {
    let mut doc = toml::Table::try_from(s)?;
    if let Some(p) = pso {
        doc.insert("pso".into(), toml::Value::try_from(p)?);
    }
    Ok(toml::to_string(&doc)?)
}

pub fn scenario_from_toml(text: &str) -> Result<(NetworkScenario, Option<PsoConfig>)> {
    let scenario: NetworkScenario = toml::from_str(text)?;
    let section: PsoSection = toml::from_str(text)?;
    Ok((scenario, section.pso))
}

pub fn load_scenario(path: &Path) -> Result<(NetworkScenario, Option<PsoConfig>)> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    scenario_from_toml(&text)
}

pub fn save_scenario(path: &Path, s: &NetworkScenario, pso: Option<&PsoConfig>) -> Result<()> {
    std::fs::write(path, scenario_to_toml(s, pso)?).map_err(|e| Error::io(path, e))
}
