use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kernel::RuleId;

pub const DEFAULT_DEPTH_LIMIT: u32 = 20;
pub const DEFAULT_TIME_LIMIT_MS: u64 = 5000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleSetting {
    pub active: bool,
    pub priority: u32,
}

/// Which rules the prover may use, in what order, and for how long.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProverConfig {
    pub rules: BTreeMap<RuleId, RuleSetting>,
    pub depth_limit: u32,
    pub time_limit_ms: u64,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("unknown rule id \"{0}\"")]
    UnknownRule(String),
    #[error("priority of {0} must be at least 1")]
    Priority(RuleId),
    #[error("depth limit must be at least 1")]
    DepthLimit,
    #[error("time limit must be at least 1 ms")]
    TimeLimit,
    #[error("invalid config: {0}")]
    Malformed(String),
}

impl Default for ProverConfig {
    fn default() -> Self {
        let rules = RuleId::ALL
            .iter()
            .map(|&r| {
                let d = r.descriptor();
                (
                    r,
                    RuleSetting {
                        active: d.default_active,
                        priority: d.default_priority,
                    },
                )
            })
            .collect();
        Self {
            rules,
            depth_limit: DEFAULT_DEPTH_LIMIT,
            time_limit_ms: DEFAULT_TIME_LIMIT_MS,
        }
    }
}

impl ProverConfig {
    /// Catalog defaults with every rule switched on.
    pub fn all_active() -> Self {
        let mut config = Self::default();
        config.rules.values_mut().for_each(|s| s.active = true);
        config
    }

    pub fn setting(&self, rule: RuleId) -> RuleSetting {
        self.rules.get(&rule).copied().unwrap_or_else(|| {
            let d = rule.descriptor();
            RuleSetting {
                active: d.default_active,
                priority: d.default_priority,
            }
        })
    }

    pub fn is_active(&self, rule: RuleId) -> bool {
        self.setting(rule).active
    }

    pub fn priority(&self, rule: RuleId) -> u32 {
        self.setting(rule).priority
    }

    pub fn with_rule(mut self, rule: RuleId, active: bool) -> Self {
        self.rules
            .entry(rule)
            .or_insert_with(|| RuleSetting {
                active,
                priority: rule.descriptor().default_priority,
            })
            .active = active;
        self
    }

    pub fn with_priority(mut self, rule: RuleId, priority: u32) -> Self {
        let active = self.is_active(rule);
        self.rules.insert(rule, RuleSetting { active, priority });
        self
    }

    pub fn with_depth_limit(mut self, depth: u32) -> Self {
        self.depth_limit = depth;
        self
    }

    pub fn with_time_limit_ms(mut self, ms: u64) -> Self {
        self.time_limit_ms = ms;
        self
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if let Some((&rule, _)) = self.rules.iter().find(|(_, s)| s.priority == 0) {
            return Err(ConfigError::Priority(rule));
        }
        if self.depth_limit == 0 {
            return Err(ConfigError::DepthLimit);
        }
        if self.time_limit_ms == 0 {
            return Err(ConfigError::TimeLimit);
        }
        Ok(())
    }

    /// Parses the JSON config format. Omitted rules, and omitted fields of a
    /// listed rule, take catalog defaults; unknown rule ids are rejected.
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let raw: RawConfig =
            serde_json::from_str(text).map_err(|e| ConfigError::Malformed(e.to_string()))?;
        Self::from_raw(raw)
    }

    pub fn from_value(value: serde_json::Value) -> Result<Self, ConfigError> {
        let raw: RawConfig =
            serde_json::from_value(value).map_err(|e| ConfigError::Malformed(e.to_string()))?;
        Self::from_raw(raw)
    }

    fn from_raw(raw: RawConfig) -> Result<Self, ConfigError> {
        let mut config = ProverConfig::default();
        for (name, setting) in raw.rules {
            let rule: RuleId = name
                .parse()
                .map_err(|_| ConfigError::UnknownRule(name.clone()))?;
            let current = config.setting(rule);
            config.rules.insert(
                rule,
                RuleSetting {
                    active: setting.active.unwrap_or(current.active),
                    priority: setting.priority.unwrap_or(current.priority),
                },
            );
        }
        if let Some(d) = raw.depth_limit {
            config.depth_limit = d;
        }
        if let Some(t) = raw.time_limit_ms {
            config.time_limit_ms = t;
        }
        config.validate()?;
        Ok(config)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}

impl<'de> Deserialize<'de> for ProverConfig {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = RawConfig::deserialize(deserializer)?;
        ProverConfig::from_raw(raw).map_err(serde::de::Error::custom)
    }
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    rules: BTreeMap<String, RawSetting>,
    depth_limit: Option<u32>,
    time_limit_ms: Option<u64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSetting {
    active: Option<bool>,
    priority: Option<u32>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_follow_catalog() {
        let c = ProverConfig::default();
        assert_eq!(c.rules.len(), RuleId::ALL.len());
        assert!(!c.is_active(RuleId::ByContradiction));
        assert!(c.is_active(RuleId::ImplGoal));
        assert_eq!(c.depth_limit, 20);
        assert_eq!(c.time_limit_ms, 5000);
    }

    #[test]
    fn json_overrides() {
        let c = ProverConfig::from_json(
            r#"{"rules": {"ImplGoal": {"active": false, "priority": 3}, "ByContradiction": {"active": true}}, "depth_limit": 7}"#,
        )
        .unwrap();
        assert!(!c.is_active(RuleId::ImplGoal));
        assert_eq!(c.priority(RuleId::ImplGoal), 3);
        assert!(c.is_active(RuleId::ByContradiction));
        assert_eq!(c.priority(RuleId::ByContradiction), 15);
        assert_eq!(c.depth_limit, 7);
        assert_eq!(c.time_limit_ms, DEFAULT_TIME_LIMIT_MS);
        assert_eq!(
            ProverConfig::from_json("{}").unwrap(),
            ProverConfig::default()
        );
    }

    #[test]
    fn json_rejections() {
        assert_eq!(
            ProverConfig::from_json(r#"{"rules": {"NoSuchRule": {"active": true}}}"#),
            Err(ConfigError::UnknownRule("NoSuchRule".into()))
        );
        assert_eq!(
            ProverConfig::from_json(r#"{"rules": {"AndGoal": {"priority": 0}}}"#),
            Err(ConfigError::Priority(RuleId::AndGoal))
        );
        assert_eq!(
            ProverConfig::from_json(r#"{"depth_limit": 0}"#),
            Err(ConfigError::DepthLimit)
        );
        assert_eq!(
            ProverConfig::from_json(r#"{"time_limit_ms": 0}"#),
            Err(ConfigError::TimeLimit)
        );
        assert!(matches!(
            ProverConfig::from_json(r#"{"depth": 3}"#),
            Err(ConfigError::Malformed(_))
        ));
    }

    #[test]
    fn serialized_config_reloads() {
        let c = ProverConfig::default()
            .with_rule(RuleId::OrKB, false)
            .with_priority(RuleId::AndKB, 2);
        assert_eq!(ProverConfig::from_json(&c.to_json()).unwrap(), c);
    }
}
