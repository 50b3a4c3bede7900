pub mod check;
pub mod locus;
pub mod stationary;
pub mod switching;
pub mod trajectory;

use serde_json::{json, Map, Value};

use crate::config::{FeedbackConfig, Scenario};

pub(crate) fn base_summary(subcommand: &str, sc: &Scenario) -> Map<String, Value> {
    let raw = sc.feedback.raw();
    let kind = match &sc.config.feedback {
        FeedbackConfig::Identity => "identity",
        FeedbackConfig::Beta(_) => "beta",
        FeedbackConfig::Raw { .. } => "raw",
        FeedbackConfig::Unitary(_) => "unitary",
    };
    let mut feedback = json!({ "kind": kind, "f1": raw.f1(), "f2": raw.f2(), "g": raw.g() });
    if let FeedbackConfig::Beta(b) = sc.config.feedback {
        feedback["beta"] = json!(b);
    }
    let mut m = Map::new();
    m.insert("subcommand".into(), json!(subcommand));
    m.insert(
        "params".into(),
        json!({ "gamma_down": sc.params.gamma_down(), "gamma_up": sc.params.gamma_up() }),
    );
    m.insert("feedback".into(), feedback);
    m
}
