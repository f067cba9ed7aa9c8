//! Named classifier implementations, selectable per stage from config.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::chat::{ChatClient, ChatContextExtractor, ChatEvidenceClassifier, ChatSettings};
use super::{Classifier, ContextExtractor, RevisionPipeline};
use crate::revision::{RevisionPurpose, RevisionQuality, RevisionType};
use crate::scoring::Scorer;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RegistryError {
    #[error("no {stage} classifier named {name:?} (known: {known})")]
    Unknown {
        stage: &'static str,
        name: String,
        known: String,
    },
    #[error("classifier {0:?} needs a chat endpoint; set DRAFTWISE_CHAT_URL")]
    NoChatEndpoint(String),
}

/// Stage-to-implementation choice, as written in the platform config.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClassifierSettings {
    pub content: String,
    pub evidence: String,
    pub context: String,
    pub success: String,
}

impl Default for ClassifierSettings {
    fn default() -> Self {
        Self {
            content: "baseline".into(),
            evidence: "baseline".into(),
            context: "baseline".into(),
            success: "baseline".into(),
        }
    }
}

/// Everything a factory may need to build its classifier.
pub struct BuildContext<'a> {
    pub scorer: &'a Scorer,
    pub chat: Option<&'a ChatClient>,
}

type Factory<T> = Arc<dyn Fn(&BuildContext<'_>) -> Result<T, RegistryError> + Send + Sync>;

#[derive(Clone)]
pub struct ClassifierRegistry {
    content: BTreeMap<String, Factory<Arc<dyn Classifier<RevisionType>>>>,
    evidence: BTreeMap<String, Factory<Arc<dyn Classifier<RevisionPurpose>>>>,
    context: BTreeMap<String, Factory<Arc<dyn ContextExtractor>>>,
    success: BTreeMap<String, Factory<Arc<dyn Classifier<RevisionQuality>>>>,
    chat: Option<ChatClient>,
}

fn lookup<'m, T>(
    map: &'m BTreeMap<String, Factory<T>>,
    stage: &'static str,
    name: &str,
) -> Result<&'m Factory<T>, RegistryError> {
    map.get(name).ok_or_else(|| RegistryError::Unknown {
        stage,
        name: name.to_string(),
        known: map.keys().cloned().collect::<Vec<_>>().join(", "),
    })
}

impl Default for ClassifierRegistry {
    fn default() -> Self {
        Self::with_builtins(ChatSettings::from_env().map(|s| ChatClient::from_settings(&s)))
    }
}

impl ClassifierRegistry {
    /// Baselines for every stage, plus `chat` for the evidence and context
    /// stages (usable only when `chat` is set).
    pub fn with_builtins(chat: Option<ChatClient>) -> Self {
        let mut r = Self {
            content: BTreeMap::new(),
            evidence: BTreeMap::new(),
            context: BTreeMap::new(),
            success: BTreeMap::new(),
            chat,
        };
        r.register_content("baseline", |_| Ok(Arc::new(super::BaselineContent)));
        r.register_evidence("baseline", |cx| Ok(Arc::new(super::BaselineEvidence::new(cx.scorer.clone()))));
        r.register_context("baseline", |_| Ok(Arc::new(super::BaselineContext)));
        r.register_success("baseline", |cx| Ok(Arc::new(super::BaselineSuccess::new(cx.scorer.clone()))));
        r.register_evidence("chat", |cx| {
            let client = cx.chat.ok_or_else(|| RegistryError::NoChatEndpoint("chat".into()))?;
            Ok(Arc::new(ChatEvidenceClassifier::new(client.clone())))
        });
        r.register_context("chat", |cx| {
            let client = cx.chat.ok_or_else(|| RegistryError::NoChatEndpoint("chat".into()))?;
            Ok(Arc::new(ChatContextExtractor::new(client.clone())))
        });
        r
    }

    pub fn register_content<F>(&mut self, name: &str, f: F)
    where
        F: Fn(&BuildContext<'_>) -> Result<Arc<dyn Classifier<RevisionType>>, RegistryError> + Send + Sync + 'static,
    {
        self.content.insert(name.to_string(), Arc::new(f));
    }

    pub fn register_evidence<F>(&mut self, name: &str, f: F)
    where
        F: Fn(&BuildContext<'_>) -> Result<Arc<dyn Classifier<RevisionPurpose>>, RegistryError> + Send + Sync + 'static,
    {
        self.evidence.insert(name.to_string(), Arc::new(f));
    }

    pub fn register_context<F>(&mut self, name: &str, f: F)
    where
        F: Fn(&BuildContext<'_>) -> Result<Arc<dyn ContextExtractor>, RegistryError> + Send + Sync + 'static,
    {
        self.context.insert(name.to_string(), Arc::new(f));
    }

    pub fn register_success<F>(&mut self, name: &str, f: F)
    where
        F: Fn(&BuildContext<'_>) -> Result<Arc<dyn Classifier<RevisionQuality>>, RegistryError> + Send + Sync + 'static,
    {
        self.success.insert(name.to_string(), Arc::new(f));
    }

    pub fn build(&self, settings: &ClassifierSettings, scorer: &Scorer) -> Result<RevisionPipeline, RegistryError> {
        let cx = BuildContext {
            scorer,
            chat: self.chat.as_ref(),
        };
        let content = lookup(&self.content, "content", &settings.content)?(&cx)?;
        let evidence = lookup(&self.evidence, "evidence", &settings.evidence)?(&cx)?;
        let context = lookup(&self.context, "context", &settings.context)?(&cx)?;
        let success = lookup(&self.success, "success", &settings.success)?(&cx)?;
        Ok(RevisionPipeline::baseline(scorer.clone())
            .with_content(content)
            .with_evidence(evidence)
            .with_context(context)
            .with_success(success))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::tests::toy_scorer;
    use crate::classify::Stage;

    #[test]
    fn default_settings_build_baselines() {
        let r = ClassifierRegistry::with_builtins(None);
        let p = r.build(&ClassifierSettings::default(), &toy_scorer()).unwrap();
        let names: Vec<_> = p.describe().into_iter().map(|(_, n)| n).collect();
        assert_eq!(names, vec!["baseline-content", "baseline-evidence", "baseline-context", "baseline-success"]);
        assert_eq!(p.describe()[1].0, Stage::Evidence);
    }

    #[test]
    fn unknown_and_unavailable() {
        let r = ClassifierRegistry::with_builtins(None);
        let bad = ClassifierSettings {
            success: "roberta".into(),
            ..Default::default()
        };
        assert!(matches!(r.build(&bad, &toy_scorer()), Err(RegistryError::Unknown { stage: "success", .. })));
        let chat = ClassifierSettings {
            evidence: "chat".into(),
            ..Default::default()
        };
        assert!(matches!(r.build(&chat, &toy_scorer()), Err(RegistryError::NoChatEndpoint(_))));
    }
}
