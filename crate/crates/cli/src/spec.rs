use serde::{Deserialize, Serialize};

/// Canonical echo of a parsed command line. `--jobs` is not echoed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunSpec {
    pub subcommand: String,
    pub degree: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sequences: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distribution: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub side: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub escape: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub types: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<String>,
    pub format: String,
}

impl RunSpec {
    pub fn new(subcommand: &str, degree: u32, format: &str) -> Self {
        RunSpec {
            subcommand: subcommand.to_string(),
            degree,
            model: None,
            sequences: Vec::new(),
            distribution: None,
            matrix: None,
            side: None,
            period: None,
            k: None,
            seed: None,
            budget: None,
            escape: None,
            trials: None,
            types: None,
            tol: None,
            format: format.to_string(),
        }
    }

    /// Arguments that parse back to this spec.
    pub fn to_argv(&self) -> Vec<String> {
        let mut argv = vec!["rotorwalk".to_string(), self.subcommand.clone(), "--d".into(), self.degree.to_string()];
        let mut push = |flag: &str, value: String| {
            argv.push(format!("--{flag}"));
            argv.push(value);
        };
        if let Some(m) = &self.model {
            push("model", m.clone());
        }
        for s in &self.sequences {
            push("seq", s.clone());
        }
        let optional = [
            ("dist", self.distribution.clone()),
            ("matrix", self.matrix.clone()),
            ("side", self.side.clone()),
            ("L", self.period.map(|v| v.to_string())),
            ("k", self.k.map(|v| v.to_string())),
            ("seed", self.seed.map(|v| v.to_string())),
            ("budget", self.budget.map(|v| v.to_string())),
            ("escape", self.escape.map(|v| v.to_string())),
            ("trials", self.trials.map(|v| v.to_string())),
            ("types", self.types.map(|v| v.to_string())),
            ("tol", self.tol.clone()),
        ];
        for (flag, value) in optional {
            if let Some(v) = value {
                push(flag, v);
            }
        }
        push("format", self.format.clone());
        argv
    }

    /// Shell-quoted form of [`RunSpec::to_argv`].
    pub fn command_line(&self) -> String {
        self.to_argv()
            .iter()
            .map(|a| {
                if a.chars().all(|c| c.is_ascii_alphanumeric() || "-_/.=".contains(c)) {
                    a.clone()
                } else {
                    format!("'{a}'")
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}
