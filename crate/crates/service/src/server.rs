//! Process lifecycle: bind, load banks in the background, serve until told
//! to stop.

use std::future::Future;
use std::path::Path;
use std::sync::{Arc, Mutex};

use axum::Router;
use imgany_core::load_bank;
use tokio::net::TcpListener;
use tokio::sync::oneshot;

use crate::app::{router, AppState, Banks};
use crate::config::ServiceConfig;
use crate::error::ServiceError;

/// Reads and cross-checks both banks.
pub fn load_banks(nouns: &Path, adjectives: &Path) -> Result<Banks, ServiceError> {
    let load = |p: &Path| load_bank(p).map_err(|source| ServiceError::Bank { path: p.to_path_buf(), source });
    Banks::new(load(nouns)?, load(adjectives)?)
}

/// Serves `app` until `shutdown` resolves, then lets in-flight requests
/// finish.
pub async fn serve(
    listener: TcpListener,
    app: Router,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> Result<(), ServiceError> {
    axum::serve(listener, app).with_graceful_shutdown(shutdown).await.map_err(ServiceError::Serve)
}

/// Binds `config.listen` and runs the service.
pub async fn run(
    config: ServiceConfig,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> Result<(), ServiceError> {
    config.validate()?;
    let listener = TcpListener::bind(&config.listen)
        .await
        .map_err(|source| ServiceError::Bind { addr: config.listen.clone(), source })?;
    run_on(listener, config, shutdown).await
}

/// Runs the service on an already bound listener. Requests are answered
/// (with 503) while the banks load; a load failure stops the server and is
/// returned.
pub async fn run_on(
    listener: TcpListener,
    config: ServiceConfig,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> Result<(), ServiceError> {
    config.validate()?;
    if let Ok(addr) = listener.local_addr() {
        tracing::info!(%addr, "listening");
    }
    let state = AppState::new(config.fusion.clone());
    let failure: Arc<Mutex<Option<ServiceError>>> = Arc::default();
    let (fail_tx, fail_rx) = oneshot::channel::<()>();

    let loader = {
        let state = state.clone();
        let failure = failure.clone();
        let (nouns, adjectives) = (config.nouns.clone(), config.adjectives.clone());
        tokio::spawn(async move {
            let loaded = tokio::task::spawn_blocking(move || load_banks(&nouns, &adjectives)).await;
            match loaded {
                Ok(Ok(banks)) => {
                    tracing::info!(
                        dim = banks.dim(),
                        nouns = banks.nouns().count(),
                        adjectives = banks.adjectives().count(),
                        "ready"
                    );
                    state.install(banks);
                }
                Ok(Err(e)) => {
                    tracing::error!(error = %e, "bank load failed");
                    *failure.lock().unwrap() = Some(e);
                    let _ = fail_tx.send(());
                }
                Err(e) => {
                    *failure.lock().unwrap() = Some(ServiceError::BankMismatch(format!("loader panicked: {e}")));
                    let _ = fail_tx.send(());
                }
            }
        })
    };

    let stop = async move {
        tokio::select! {
            _ = shutdown => tracing::info!("shutting down"),
            Ok(()) = fail_rx => {}
        }
    };
    let served = serve(listener, router(state), stop).await;
    loader.abort();
    if let Some(e) = failure.lock().unwrap().take() {
        return Err(e);
    }
    served
}
