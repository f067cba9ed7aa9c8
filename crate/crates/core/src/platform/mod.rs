//! Classroom service: users and roles, assignments, the draft workflow and
//! its REST interface.

pub mod auth;
pub mod config;
pub mod http;
pub mod model;
pub mod service;
pub mod store;

use std::sync::Arc;
use std::time::Duration;

pub use config::{BootstrapAdmin, ConfigError, PlatformConfig};
pub use http::{router, AppState};
pub use model::{
    Assignment, Classroom, NewAssignment, NewClassroom, NewUser, Outcome, Role, SubmissionRecord, SubmissionStatus,
    User,
};
pub use service::{
    load_engines, Clock, EngineLoadError, ExportArchive, ExportDraft, FeedbackView, LoginResponse, Service,
    ServiceError, SteppingClock, SubmissionRow, Submitted, SystemClock,
};
pub use store::{SqliteStore, Store, StoreError, SubmissionFilter};

use crate::classify::registry::ClassifierRegistry;

/// Opens the store, loads every article and resumes interrupted drafts.
pub fn build(config: &PlatformConfig, clock: Arc<dyn Clock>) -> anyhow::Result<AppState> {
    config.validate()?;
    let store: Arc<dyn Store> = Arc::new(SqliteStore::open(&config.store_path)?);
    let registry = ClassifierRegistry::default();
    let engines = load_engines(
        &config.lexicon_dir,
        config.embeddings.as_deref(),
        &registry,
        &config.classifiers,
    )?;
    let signer = auth::TokenSigner::new(config.token_secret.as_bytes(), config.token_ttl_secs);
    let service = Service::new(store, engines, signer, clock, config.workers);
    if let Some(admin) = &config.bootstrap_admin {
        if let Some(user) = service.bootstrap_admin(&admin.username, &admin.password, &admin.display_name)? {
            tracing::info!(user = user.id, "created bootstrap admin");
        }
    }
    let resumed = service.recover()?;
    if resumed > 0 {
        tracing::info!(resumed, "resuming interrupted drafts");
    }
    Ok(AppState {
        service,
        submit_wait: Duration::from_millis(config.submit_wait_ms),
    })
}

pub async fn serve(config: PlatformConfig) -> anyhow::Result<()> {
    let state = build(&config, Arc::new(SystemClock))?;
    let addr = format!("{}:{}", config.bind, config.port);
    let listener = tokio::net::TcpListener::bind(&addr).await?;
    tracing::info!(%addr, "listening");
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
