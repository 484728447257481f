//! HTTP adapter over the scoring library and a workspace.
//!
//! Handlers parse the request, call [`api`], and map library errors to status codes:
//! validation 400, unknown id 404, stale revision 409, criterion input or
//! aggregation failure 422.

pub mod api;

use std::net::SocketAddr;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, Path, Query, State};
use axum::http::{header, HeaderMap, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use glyph_mcda::invariance::{GlyphShape, ViewingGeometry};
use glyph_mcda::io::{parse_design, parse_sheet, serialize_design, serialize_sheet, Revision, Workspace};
use glyph_mcda::{CriterionId, Error, ErrorKind};
use serde::Deserialize;

use api::AggregatePolicy;

pub const ASSESSOR_HEADER: &str = "x-assessor";
const MAX_BODY: usize = 32 * 1024 * 1024;

type Shared = Arc<Workspace>;

/// A library error on its way to the client.
pub struct ApiError(pub Error);

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        ApiError(e)
    }
}

pub fn status_for(err: &Error) -> StatusCode {
    match err.kind() {
        ErrorKind::Validation => StatusCode::BAD_REQUEST,
        ErrorKind::NotFound => StatusCode::NOT_FOUND,
        ErrorKind::Conflict => StatusCode::CONFLICT,
        ErrorKind::CriterionInput | ErrorKind::Aggregation => StatusCode::UNPROCESSABLE_ENTITY,
        ErrorKind::Io if matches!(err, Error::Image(_)) => StatusCode::BAD_REQUEST,
        ErrorKind::Io => StatusCode::INTERNAL_SERVER_ERROR,
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = status_for(&self.0);
        if status.is_server_error() {
            tracing::error!(error = %self.0, "request failed");
        }
        let mut body = api::error_json(&self.0);
        body.push('\n');
        (status, json_headers(), body).into_response()
    }
}

type ApiResult = std::result::Result<Response, ApiError>;

fn json_headers() -> [(header::HeaderName, HeaderValue); 1] {
    [(header::CONTENT_TYPE, HeaderValue::from_static("application/json"))]
}

fn json(body: String) -> Response {
    (json_headers(), body).into_response()
}

fn with_etag(mut resp: Response, rev: &Revision) -> Response {
    if let Ok(v) = HeaderValue::from_str(&format!("\"{rev}\"")) {
        resp.headers_mut().insert(header::ETAG, v);
    }
    resp
}

fn bad_request(path: &str, message: impl Into<String>) -> ApiError {
    ApiError(Error::Schema {
        path: path.to_string(),
        message: message.into(),
    })
}

fn utf8(body: &Bytes) -> std::result::Result<&str, ApiError> {
    std::str::from_utf8(body).map_err(|e| bad_request(".", format!("body is not UTF-8: {e}")))
}

fn assessor(headers: &HeaderMap) -> std::result::Result<String, ApiError> {
    headers
        .get(ASSESSOR_HEADER)
        .and_then(|v| v.to_str().ok())
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(str::to_string)
        .ok_or_else(|| bad_request(ASSESSOR_HEADER, "mutating requests must name the assessor"))
}

fn if_match(headers: &HeaderMap) -> Option<Revision> {
    headers
        .get(header::IF_MATCH)
        .and_then(|v| v.to_str().ok())
        .filter(|v| v.trim() != "*")
        .map(Revision::parse)
}

/// Runs blocking library work off the async executor.
async fn blocking<T: Send + 'static>(
    f: impl FnOnce() -> glyph_mcda::Result<T> + Send + 'static,
) -> std::result::Result<T, ApiError> {
    tokio::task::spawn_blocking(f)
        .await
        .expect("library calls do not panic")
        .map_err(ApiError)
}

async fn get_design(State(ws): State<Shared>, Path(id): Path<String>) -> ApiResult {
    let (design, rev) = blocking(move || ws.get_design(&id)).await?;
    Ok(with_etag(json(serialize_design(&design)), &rev))
}

async fn put_design(State(ws): State<Shared>, Path(id): Path<String>, headers: HeaderMap, body: Bytes) -> ApiResult {
    let who = assessor(&headers)?;
    let design = parse_design(utf8(&body)?)?;
    if design.id != id {
        return Err(bad_request("id", format!("document id `{}` does not match path `{id}`", design.id)));
    }
    let expected = if_match(&headers);
    let rev = blocking(move || ws.put_design(&design, expected.as_ref())).await?;
    tracing::info!(design = %id, assessor = %who, revision = %rev, "design stored");
    Ok(with_etag(json(format!("{{\"revision\":\"{rev}\"}}\n")), &rev))
}

async fn get_sheet(State(ws): State<Shared>, Path((design, who)): Path<(String, String)>) -> ApiResult {
    let (sheet, rev) = blocking(move || ws.get_sheet(&design, &who)).await?;
    Ok(with_etag(json(serialize_sheet(&sheet)), &rev))
}

async fn put_sheet(
    State(ws): State<Shared>,
    Path((design, who)): Path<(String, String)>,
    headers: HeaderMap,
    body: Bytes,
) -> ApiResult {
    let editor = assessor(&headers)?;
    let sheet = parse_sheet(utf8(&body)?)?;
    if sheet.design_id != design {
        return Err(bad_request("design", format!("document design `{}` does not match path `{design}`", sheet.design_id)));
    }
    if sheet.assessor != who {
        return Err(bad_request("assessor", format!("document assessor `{}` does not match path `{who}`", sheet.assessor)));
    }
    let expected = if_match(&headers);
    let rev = blocking(move || ws.put_sheet(&sheet, expected.as_ref())).await?;
    tracing::info!(%design, assessor = %who, %editor, revision = %rev, "sheet stored");
    Ok(with_etag(json(format!("{{\"revision\":\"{rev}\"}}\n")), &rev))
}

fn policy_from(body: &Bytes) -> std::result::Result<AggregatePolicy, ApiError> {
    let text = utf8(body)?;
    if text.trim().is_empty() {
        return Ok(AggregatePolicy::Auto);
    }
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| bad_request(&e.path().to_string(), e.inner().to_string()))
}

async fn aggregate(State(ws): State<Shared>, Path(design): Path<String>, body: Bytes) -> ApiResult {
    let policy = policy_from(&body)?;
    let out = blocking(move || api::aggregate_json(&ws, &design, &policy)).await?;
    Ok(json(out))
}

#[derive(Deserialize)]
struct CompareQuery {
    ids: Option<String>,
}

async fn compare(State(ws): State<Shared>, Query(q): Query<CompareQuery>) -> ApiResult {
    let ids: Vec<String> = q.ids.unwrap_or_default().split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect();
    let out = blocking(move || api::compare_json(&ws, &ids)).await?;
    Ok(json(out))
}

#[derive(Deserialize)]
struct DeriveQuery {
    design: Option<String>,
}

async fn derive(
    State(ws): State<Shared>,
    Path(criterion): Path<String>,
    Query(q): Query<DeriveQuery>,
    body: Bytes,
) -> ApiResult {
    let criterion: CriterionId = criterion.parse()?;
    let inputs: serde_json::Value =
        serde_json::from_slice(&body).map_err(|e| bad_request(&format!("inputs.{criterion}"), e.to_string()))?;
    let out = blocking(move || api::derive_json(&ws, criterion, q.design.as_deref(), &inputs)).await?;
    Ok(json(out))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GeometryQuery {
    vf: Option<f64>,
    vd: Option<f64>,
    ppcm: Option<f64>,
    shape: Option<GlyphShape>,
}

async fn invariance_geometry(Query(q): Query<GeometryQuery>, body: Bytes) -> ApiResult {
    let d = ViewingGeometry::default();
    let geom = ViewingGeometry {
        vf_deg: q.vf.unwrap_or(d.vf_deg),
        vd_cm: q.vd.unwrap_or(d.vd_cm),
        shape: q.shape.unwrap_or(d.shape),
    };
    let ppcm = q.ppcm.unwrap_or(glyph_mcda::invariance::geometry::DEFAULT_PPCM);
    let out = blocking(move || api::geometry_json(&body, &geom, ppcm)).await?;
    Ok(json(out))
}

async fn invariance_colorimetry(body: Bytes) -> ApiResult {
    let out = blocking(move || api::colorimetry_json(&body)).await?;
    Ok(json(out))
}

async fn kop(Path(kind): Path<String>) -> ApiResult {
    Ok(json(api::kop_json(&kind)?))
}

pub fn router(ws: Arc<Workspace>) -> Router {
    Router::new()
        .route("/designs/{id}", get(get_design).put(put_design))
        .route("/sheets/{design}/{assessor}", get(get_sheet).put(put_sheet))
        .route("/aggregate/{design}", post(aggregate))
        .route("/compare", get(compare))
        .route("/derive/{criterion}", post(derive))
        .route("/invariance/geometry", post(invariance_geometry))
        .route("/invariance/colorimetry", post(invariance_colorimetry))
        .route("/kop/{channel_kind}", get(kop))
        .layer(DefaultBodyLimit::max(MAX_BODY))
        .with_state(ws)
}

/// Binds and serves until the process is stopped.
pub async fn serve(ws: Workspace, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!(addr = %listener.local_addr()?, root = %ws.root().display(), "serving");
    axum::serve(listener, router(Arc::new(ws))).await
}
