//! HTTP JSON service. Handlers call the same verb functions as the CLI, so
//! response bodies match the files the CLI writes.

use axum::extract::rejection::QueryRejection;
use axum::extract::Query;
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use serde::Deserialize;

use crate::analysis::{AnalysisOptions, DEFAULT_DEGENERACY_TOL, DEFAULT_ZERO_THRESHOLD};
use crate::cli;
use crate::designs;
use crate::error::{Error, ErrorKind};
use crate::pca::Band;
use crate::tuning::DEFAULT_CROSSING_TOL;

impl IntoResponse for Error {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.kind.http_status()).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        (status, [(header::CONTENT_TYPE, "application/json")], self.to_json()).into_response()
    }
}

enum Body {
    Json(String),
    Csv(String),
}

impl IntoResponse for Body {
    fn into_response(self) -> Response {
        match self {
            Body::Json(s) => ([(header::CONTENT_TYPE, "application/json")], s).into_response(),
            Body::Csv(s) => ([(header::CONTENT_TYPE, "text/csv")], s).into_response(),
        }
    }
}

/// Runs a solve off the async workers.
async fn blocking<F>(f: F) -> Result<Body, Error>
where
    F: FnOnce() -> Result<Body, Error> + Send + 'static,
{
    tokio::task::spawn_blocking(f)
        .await
        .unwrap_or_else(|e| Err(Error::new(ErrorKind::Internal, format!("solver task failed: {e}"))))
}

fn query<T>(q: Result<Query<T>, QueryRejection>) -> Result<T, Error> {
    q.map(|Query(v)| v).map_err(|e| Error::schema(e.body_text()))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModesQuery {
    eta: Option<f64>,
    rel_tol: Option<f64>,
}

async fn modes(q: Result<Query<ModesQuery>, QueryRejection>, body: String) -> Result<Body, Error> {
    let q = query(q)?;
    let opts = AnalysisOptions {
        eta: q.eta.unwrap_or(DEFAULT_ZERO_THRESHOLD),
        rel_tol: q.rel_tol.unwrap_or(DEFAULT_DEGENERACY_TOL),
        ..AnalysisOptions::default()
    };
    blocking(move || cli::modes_report(&body, &opts).map(Body::Json)).await
}

/// `{"lattice": {...}, "spec": {...}}` → `{"csv": "...", "sidecar": {...}}`.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepRequest {
    lattice: serde_json::Value,
    spec: serde_json::Value,
    #[serde(default)]
    rel_tol: Option<f64>,
}

async fn sweep(body: String) -> Result<Body, Error> {
    blocking(move || {
        let req: SweepRequest = serde_json::from_str(&body)?;
        let (csv, sidecar) = cli::sweep_outputs(
            &req.lattice.to_string(),
            &req.spec.to_string(),
            None,
            req.rel_tol.unwrap_or(DEFAULT_CROSSING_TOL),
        )?;
        let sidecar: serde_json::Value = serde_json::from_str(&sidecar).expect("sidecar is JSON");
        Ok(Body::Json(serde_json::json!({ "csv": csv, "sidecar": sidecar }).to_string()))
    })
    .await
}

async fn cool(body: String) -> Result<Body, Error> {
    blocking(move || cli::cool_csv(&body).map(Body::Csv)).await
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpectrumQuery {
    band: Option<String>,
}

async fn pca_spectrum(q: Result<Query<SpectrumQuery>, QueryRejection>, body: String) -> Result<Body, Error> {
    let band: Band = query(q)?.band.as_deref().unwrap_or("2e9:4e9:201").parse()?;
    blocking(move || cli::pca_spectrum_csv(&body, &band).map(Body::Csv)).await
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FieldQuery {
    f_hz: Option<f64>,
}

async fn pca_field(q: Result<Query<FieldQuery>, QueryRejection>, body: String) -> Result<Body, Error> {
    let f = query(q)?.f_hz;
    blocking(move || cli::pca_field_json(&body, f).map(Body::Json)).await
}

async fn examples() -> Body {
    Body::Json(designs::catalogue_json())
}

pub fn router() -> Router {
    Router::new()
        .route("/healthz", get(|| async { "ok" }))
        .route("/api/examples", get(examples))
        .route("/api/modes", post(modes))
        .route("/api/sweep", post(sweep))
        .route("/api/cool", post(cool))
        .route("/api/pca/spectrum", post(pca_spectrum))
        .route("/api/pca/field", post(pca_field))
}

/// Serves on `0.0.0.0:port` until Ctrl-C.
pub async fn serve(port: u16) -> Result<(), Error> {
    let listener = tokio::net::TcpListener::bind(("0.0.0.0", port))
        .await
        .map_err(|e| Error::io(format!("cannot bind port {port}: {e}")))?;
    eprintln!("listening on {}", listener.local_addr().map_err(|e| Error::io(e.to_string()))?);
    axum::serve(listener, router())
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
        .map_err(|e| Error::io(format!("server failed: {e}")))
}
