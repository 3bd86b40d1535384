//! HTTP API over a dataset directory.
//!
//! | method | path           | body                                   |
//! |--------|----------------|----------------------------------------|
//! | POST   | `/answer`      | `{question, tableId, abduction?}`      |
//! | GET    | `/tables`      |                                        |
//! | GET    | `/tables/{id}` | id is the table path, e.g. `csv/a.csv` |
//! | POST   | `/eval`        | `{split, abduction?, limit?}`          |
//! | GET    | `/eval/{id}`   |                                        |
//! | GET    | `/health`      |                                        |
//!
//! Errors are `{"error": {"code", "message"}}` with a 4xx or 5xx status.

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;
use tabqa_core::engine::{Engine, EngineConfig, PreparedTable};
use tabqa_core::eval::{evaluate_with, load_dataset, EvalReport};
use tabqa_core::predictor::{AbductionMode, PredictorModel};
use tabqa_core::table::ComprehendedTable;

use crate::catalog::{Catalog, TableEntry};
use crate::payload::{AnswerPayload, SCHEMA_VERSION};

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError { status, code, message: message.into() }
    }

    fn bad_request(code: &'static str, message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, code, message)
    }

    fn not_found(code: &'static str, message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::NOT_FOUND, code, message)
    }

    fn internal(message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json!({ "error": { "code": self.code, "message": self.message } });
        (self.status, Json(body)).into_response()
    }
}

impl From<JsonRejection> for ApiError {
    fn from(r: JsonRejection) -> Self {
        ApiError::new(r.status(), "malformed_request", r.body_text())
    }
}

type ApiResult<T> = Result<T, ApiError>;

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum EvalJob {
    Running,
    Done { report: Box<EvalReport> },
    Failed { error: String },
}

pub struct AppState {
    catalog: Catalog,
    engines: HashMap<AbductionMode, Arc<Engine>>,
    default_mode: AbductionMode,
    tables: Mutex<HashMap<String, Arc<PreparedTable>>>,
    jobs: Mutex<HashMap<u64, EvalJob>>,
    next_job: AtomicU64,
}

impl AppState {
    /// One engine per abduction mode; `ml` is only available with a model.
    pub fn new(
        root: PathBuf,
        base: EngineConfig,
        model: Option<PredictorModel>,
        default_mode: AbductionMode,
    ) -> tabqa_core::Result<Self> {
        let mut engines = HashMap::new();
        for mode in [AbductionMode::Ml, AbductionMode::Baseline, AbductionMode::Off] {
            if mode == AbductionMode::Ml && model.is_none() {
                continue;
            }
            let config = EngineConfig { abduction: mode, model_path: None, ..base.clone() };
            engines.insert(mode, Arc::new(Engine::with_model(config, model.clone())?));
        }
        if !engines.contains_key(&default_mode) {
            return Err(tabqa_core::Error::ModelRequired);
        }
        let catalog = Catalog::scan(&root);
        log::info!("{} tables under {}", catalog.len(), root.display());
        Ok(AppState {
            catalog,
            engines,
            default_mode,
            tables: Mutex::new(HashMap::new()),
            jobs: Mutex::new(HashMap::new()),
            next_job: AtomicU64::new(1),
        })
    }

    fn engine(&self, mode: Option<AbductionMode>) -> ApiResult<Arc<Engine>> {
        let mode = mode.unwrap_or(self.default_mode);
        self.engines.get(&mode).cloned().ok_or_else(|| {
            ApiError::bad_request("model_required", format!("abduction mode {mode:?} needs a trained model"))
        })
    }

    fn table(&self, id: &str) -> ApiResult<Arc<PreparedTable>> {
        if let Some(t) = self.tables.lock().unwrap().get(id) {
            return Ok(t.clone());
        }
        let path = self.catalog.path(id).ok_or_else(|| ApiError::not_found("unknown_table", format!("no table {id:?}")))?;
        let engine = &self.engines[&self.default_mode];
        let t = Arc::new(engine.load_table(&path).map_err(|e| ApiError::internal(e.to_string()))?);
        self.tables.lock().unwrap().insert(id.to_string(), t.clone());
        Ok(t)
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/health", get(health))
        .route("/answer", post(answer))
        .route("/tables", get(list_tables))
        .route("/tables/{*id}", get(table_detail))
        .route("/eval", post(start_eval))
        .route("/eval/{id}", get(eval_status))
        .with_state(state)
}

async fn health() -> &'static str {
    "ok"
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnswerRequest {
    pub question: String,
    #[serde(rename = "tableId")]
    pub table_id: String,
    #[serde(default)]
    pub abduction: Option<AbductionMode>,
}

async fn answer(
    State(state): State<Arc<AppState>>,
    body: Result<Json<AnswerRequest>, JsonRejection>,
) -> ApiResult<Json<serde_json::Value>> {
    let Json(req) = body?;
    if req.question.trim().is_empty() {
        return Err(ApiError::bad_request("empty_question", "question is empty"));
    }
    let engine = state.engine(req.abduction)?;
    let mode = engine.config.abduction;
    tokio::task::spawn_blocking(move || {
        let table = state.table(&req.table_id)?;
        let r = engine.answer(&req.question, &table).map_err(|e| ApiError::bad_request("unanswerable", e.to_string()))?;
        serde_json::to_value(AnswerPayload::new(&req.table_id, mode, &r))
            .map(Json)
            .map_err(|e| ApiError::internal(e.to_string()))
    })
    .await
    .map_err(|e| ApiError::internal(e.to_string()))?
}

#[derive(Serialize)]
struct TableList<'a> {
    schema_version: u32,
    tables: Vec<&'a TableEntry>,
}

async fn list_tables(State(state): State<Arc<AppState>>) -> Json<serde_json::Value> {
    let list = TableList { schema_version: SCHEMA_VERSION, tables: state.catalog.entries().collect() };
    Json(serde_json::to_value(list).expect("serializable"))
}

#[derive(Serialize)]
struct TableDetail<'a> {
    schema_version: u32,
    id: &'a str,
    headings: &'a [String],
    table: &'a ComprehendedTable,
}

async fn table_detail(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Json<serde_json::Value>> {
    let entry = state.catalog.get(&id).ok_or_else(|| ApiError::not_found("unknown_table", format!("no table {id:?}")))?;
    let headings = entry.headings.clone();
    let t = tokio::task::spawn_blocking({
        let state = state.clone();
        let id = id.clone();
        move || state.table(&id)
    })
    .await
    .map_err(|e| ApiError::internal(e.to_string()))??;
    let detail = TableDetail { schema_version: SCHEMA_VERSION, id: &id, headings: &headings, table: &t.table };
    serde_json::to_value(detail).map(Json).map_err(|e| ApiError::internal(e.to_string()))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalRequest {
    pub split: String,
    #[serde(default)]
    pub abduction: Option<AbductionMode>,
    #[serde(default)]
    pub limit: Option<usize>,
}

async fn start_eval(
    State(state): State<Arc<AppState>>,
    body: Result<Json<EvalRequest>, JsonRejection>,
) -> ApiResult<(StatusCode, Json<serde_json::Value>)> {
    let Json(req) = body?;
    let engine = state.engine(req.abduction)?;
    let root = state.catalog.root().to_path_buf();
    let layout = tabqa_core::eval::DatasetLayout::for_root(&root).map_err(|e| ApiError::internal(e.to_string()))?;
    layout.split(&req.split).map_err(|e| ApiError::bad_request("unknown_split", e.to_string()))?;
    let id = state.next_job.fetch_add(1, Ordering::Relaxed);
    state.jobs.lock().unwrap().insert(id, EvalJob::Running);
    let jobs = state.clone();
    tokio::task::spawn_blocking(move || {
        let outcome = load_dataset(&root, &req.split).map(|mut examples| {
            examples.truncate(req.limit.unwrap_or(usize::MAX));
            evaluate_with(&engine, &examples, &root)
        });
        let job = match outcome {
            Ok(report) => EvalJob::Done { report: Box::new(report) },
            Err(e) => EvalJob::Failed { error: e.to_string() },
        };
        jobs.jobs.lock().unwrap().insert(id, job);
    });
    Ok((StatusCode::ACCEPTED, Json(json!({ "schema_version": SCHEMA_VERSION, "id": id }))))
}

async fn eval_status(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Json<serde_json::Value>> {
    let id: u64 = id.parse().map_err(|_| ApiError::bad_request("malformed_request", format!("bad job id {id:?}")))?;
    let jobs = state.jobs.lock().unwrap();
    let job = jobs.get(&id).ok_or_else(|| ApiError::not_found("unknown_job", format!("no evaluation {id}")))?;
    let mut body = serde_json::to_value(job).map_err(|e| ApiError::internal(e.to_string()))?;
    body["schema_version"] = json!(SCHEMA_VERSION);
    body["id"] = json!(id);
    Ok(Json(body))
}
