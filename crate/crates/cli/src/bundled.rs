//! Configs shipped inside the binary.

use anyhow::{anyhow, Result};

use crate::config::ExperimentConfig;

const CONFIGS: &[(&str, &str)] = &[
    ("ex41-positive", include_str!("../configs/ex41-positive.json")),
    (
        "ex42-mult-not-positive",
        include_str!("../configs/ex42-mult-not-positive.json"),
    ),
    ("ex43-general", include_str!("../configs/ex43-general.json")),
    ("hk-positive", include_str!("../configs/hk-positive.json")),
    ("prop64-avoid", include_str!("../configs/prop64-avoid.json")),
    ("fact61-cyclic", include_str!("../configs/fact61-cyclic.json")),
    ("fact62-kcut", include_str!("../configs/fact62-kcut.json")),
    ("thm72", include_str!("../configs/thm72.json")),
    ("thm73", include_str!("../configs/thm73.json")),
    ("cor74", include_str!("../configs/cor74.json")),
    ("order-matrix", include_str!("../configs/order-matrix.json")),
];

pub const NAMES: [&str; 11] = [
    "ex41-positive",
    "ex42-mult-not-positive",
    "ex43-general",
    "hk-positive",
    "prop64-avoid",
    "fact61-cyclic",
    "fact62-kcut",
    "thm72",
    "thm73",
    "cor74",
    "order-matrix",
];

pub fn load(name: &str) -> Result<ExperimentConfig> {
    let (_, text) = CONFIGS
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| anyhow!("no bundled config `{name}` (try `rankone list`)"))?;
    ExperimentConfig::parse(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_bundled_config_parses_and_is_named_after_its_file() {
        assert_eq!(CONFIGS.len(), NAMES.len());
        for (name, _) in CONFIGS {
            assert!(NAMES.contains(name));
            let config = load(name).unwrap();
            assert_eq!(&config.name, name);
            config.construction.build().unwrap();
        }
    }
}
