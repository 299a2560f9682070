//! Command line and HTTP front end for a workspace document.

pub mod api;
pub mod args;
pub mod commands;
pub mod ops;

use std::path::{Path, PathBuf};

use nebfca::{Error, WorkspaceDocument};

/// Serve the API (and optionally static assets) until interrupted.
pub fn serve(doc: WorkspaceDocument, path: Option<PathBuf>, addr: &str, assets: Option<&Path>) -> nebfca::Result<()> {
    let runtime = tokio::runtime::Runtime::new().map_err(|e| Error::Workspace(e.to_string()))?;
    runtime.block_on(async move {
        let mut app = api::router(api::AppState::new(doc, path));
        if let Some(dir) = assets {
            app = app.fallback_service(tower_http::services::ServeDir::new(dir));
        }
        let listener = tokio::net::TcpListener::bind(addr)
            .await
            .map_err(|e| Error::Workspace(format!("cannot listen on {addr}: {e}")))?;
        eprintln!("listening on http://{}", listener.local_addr().map_err(|e| Error::Workspace(e.to_string()))?);
        axum::serve(listener, app)
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await
            .map_err(|e| Error::Workspace(e.to_string()))
    })
}
