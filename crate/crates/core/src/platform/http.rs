//! JSON-over-HTTP routes.

use std::time::Duration;

use axum::extract::rejection::{JsonRejection, PathRejection, QueryRejection};
use axum::extract::{FromRequestParts, Path, Query, State};
use axum::http::request::Parts;
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{delete, get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::model::{NewAssignment, NewClassroom, NewUser, SubmissionStatus, User};
use super::service::{Service, ServiceError};
use super::store::SubmissionFilter;

#[derive(Clone)]
pub struct AppState {
    pub service: Service,
    pub submit_wait: Duration,
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
    detail: serde_json::Value,
}

impl ApiError {
    fn invalid(message: impl Into<String>) -> Self {
        Self {
            status: StatusCode::BAD_REQUEST,
            code: "invalid_request",
            message: message.into(),
            detail: serde_json::Value::Null,
        }
    }
}

impl From<ServiceError> for ApiError {
    fn from(e: ServiceError) -> Self {
        let status = match &e {
            ServiceError::Unauthenticated | ServiceError::BadCredentials => StatusCode::UNAUTHORIZED,
            ServiceError::Forbidden(_) => StatusCode::FORBIDDEN,
            ServiceError::NotFound(_) => StatusCode::NOT_FOUND,
            ServiceError::Invalid(_) => StatusCode::BAD_REQUEST,
            ServiceError::EmptyText => StatusCode::UNPROCESSABLE_ENTITY,
            ServiceError::DraftLimit(_) | ServiceError::DraftProcessing | ServiceError::Conflict(_) => {
                StatusCode::CONFLICT
            }
            ServiceError::Internal(_) => StatusCode::INTERNAL_SERVER_ERROR,
        };
        let detail = match &e {
            ServiceError::DraftLimit(max) => json!({ "max_drafts": max }),
            _ => serde_json::Value::Null,
        };
        if status == StatusCode::INTERNAL_SERVER_ERROR {
            tracing::error!(error = %e, "request failed");
        }
        Self {
            status,
            code: e.code(),
            message: e.to_string(),
            detail,
        }
    }
}

impl From<JsonRejection> for ApiError {
    fn from(r: JsonRejection) -> Self {
        Self::invalid(r.body_text())
    }
}

impl From<PathRejection> for ApiError {
    fn from(r: PathRejection) -> Self {
        Self::invalid(r.body_text())
    }
}

impl From<QueryRejection> for ApiError {
    fn from(r: QueryRejection) -> Self {
        Self::invalid(r.body_text())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = Json(json!({ "code": self.code, "message": self.message, "detail": self.detail }));
        (self.status, body).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

async fn blocking<T, F>(f: F) -> ApiResult<T>
where
    T: Send + 'static,
    F: FnOnce() -> Result<T, ServiceError> + Send + 'static,
{
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::from(ServiceError::Internal(e.to_string())))?
        .map_err(ApiError::from)
}

/// The authenticated caller, from `Authorization: Bearer <token>`.
pub struct Actor(pub User);

impl FromRequestParts<AppState> for Actor {
    type Rejection = ApiError;

    async fn from_request_parts(parts: &mut Parts, state: &AppState) -> Result<Self, Self::Rejection> {
        let token = parts
            .headers
            .get(header::AUTHORIZATION)
            .and_then(|v| v.to_str().ok())
            .and_then(|v| v.strip_prefix("Bearer "))
            .map(|t| t.trim().to_string())
            .ok_or(ServiceError::Unauthenticated)?;
        let svc = state.service.clone();
        blocking(move || svc.authenticate(&token)).await.map(Actor)
    }
}

#[derive(Deserialize)]
struct LoginRequest {
    username: String,
    password: String,
}

#[derive(Deserialize)]
struct DraftRequest {
    text: String,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct StudentQuery {
    student_id: Option<i64>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct SubmissionQuery {
    assignment_id: Option<i64>,
    draft_number: Option<u32>,
}

#[derive(Serialize)]
struct Health {
    status: &'static str,
    articles: Vec<String>,
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/health", get(health))
        .route("/auth/login", post(login))
        .route("/me", get(me))
        .route("/assignments", get(list_assignments).post(create_assignment))
        .route("/assignments/{id}/drafts", post(submit_draft).get(list_drafts))
        .route("/assignments/{id}/feedback", get(feedback))
        .route("/classrooms", get(list_classrooms).post(create_classroom))
        .route("/classrooms/{id}/submissions", get(classroom_submissions))
        .route("/classrooms/{id}/students", get(roster))
        .route("/users", get(list_users).post(create_user))
        .route("/users/{id}", delete(delete_user))
        .route("/export/{assignment_id}", get(export))
        .fallback(|| async {
            ApiError {
                status: StatusCode::NOT_FOUND,
                code: "not_found",
                message: "no such route".into(),
                detail: serde_json::Value::Null,
            }
        })
        .with_state(state)
}

async fn health(State(st): State<AppState>) -> Json<Health> {
    Json(Health {
        status: "ok",
        articles: st.service.articles().map(String::from).collect(),
    })
}

async fn login(State(st): State<AppState>, body: Result<Json<LoginRequest>, JsonRejection>) -> ApiResult<Response> {
    let Json(req) = body?;
    let svc = st.service.clone();
    let res = blocking(move || svc.login(&req.username, &req.password)).await?;
    Ok(Json(res).into_response())
}

async fn me(Actor(user): Actor) -> Json<User> {
    Json(user)
}

async fn list_assignments(State(st): State<AppState>, Actor(user): Actor) -> ApiResult<Response> {
    let svc = st.service.clone();
    Ok(Json(blocking(move || svc.list_assignments(&user)).await?).into_response())
}

async fn create_assignment(
    State(st): State<AppState>,
    Actor(user): Actor,
    body: Result<Json<NewAssignment>, JsonRejection>,
) -> ApiResult<Response> {
    let Json(new) = body?;
    let svc = st.service.clone();
    let a = blocking(move || svc.create_assignment(&user, &new)).await?;
    Ok((StatusCode::CREATED, Json(a)).into_response())
}

async fn submit_draft(
    State(st): State<AppState>,
    Actor(user): Actor,
    path: Result<Path<i64>, PathRejection>,
    body: Result<Json<DraftRequest>, JsonRejection>,
) -> ApiResult<Response> {
    let Path(id) = path?;
    let Json(req) = body?;
    let svc = st.service.clone();
    let submitted = blocking(move || svc.submit_draft(&user, id, &req.text)).await?;
    let record = match tokio::time::timeout(st.submit_wait, submitted.done).await {
        Ok(Ok(done)) => done,
        _ => submitted.record,
    };
    let status = match record.status {
        SubmissionStatus::Processing => StatusCode::ACCEPTED,
        _ => StatusCode::CREATED,
    };
    Ok((status, Json(record)).into_response())
}

async fn list_drafts(
    State(st): State<AppState>,
    Actor(user): Actor,
    path: Result<Path<i64>, PathRejection>,
    query: Result<Query<StudentQuery>, QueryRejection>,
) -> ApiResult<Response> {
    let (Path(id), Query(q)) = (path?, query?);
    let svc = st.service.clone();
    Ok(Json(blocking(move || svc.drafts(&user, id, q.student_id)).await?).into_response())
}

async fn feedback(
    State(st): State<AppState>,
    Actor(user): Actor,
    path: Result<Path<i64>, PathRejection>,
    query: Result<Query<StudentQuery>, QueryRejection>,
) -> ApiResult<Response> {
    let (Path(id), Query(q)) = (path?, query?);
    let svc = st.service.clone();
    Ok(Json(blocking(move || svc.feedback(&user, id, q.student_id)).await?).into_response())
}

async fn list_classrooms(State(st): State<AppState>, Actor(user): Actor) -> ApiResult<Response> {
    let svc = st.service.clone();
    Ok(Json(blocking(move || svc.list_classrooms(&user)).await?).into_response())
}

async fn create_classroom(
    State(st): State<AppState>,
    Actor(user): Actor,
    body: Result<Json<NewClassroom>, JsonRejection>,
) -> ApiResult<Response> {
    let Json(new) = body?;
    let svc = st.service.clone();
    let c = blocking(move || svc.create_classroom(&user, &new)).await?;
    Ok((StatusCode::CREATED, Json(c)).into_response())
}

async fn classroom_submissions(
    State(st): State<AppState>,
    Actor(user): Actor,
    path: Result<Path<i64>, PathRejection>,
    query: Result<Query<SubmissionQuery>, QueryRejection>,
) -> ApiResult<Response> {
    let (Path(id), Query(q)) = (path?, query?);
    let filter = SubmissionFilter {
        assignment_id: q.assignment_id,
        draft_number: q.draft_number,
    };
    let svc = st.service.clone();
    Ok(Json(blocking(move || svc.list_submissions(&user, id, filter)).await?).into_response())
}

async fn roster(
    State(st): State<AppState>,
    Actor(user): Actor,
    path: Result<Path<i64>, PathRejection>,
) -> ApiResult<Response> {
    let Path(id) = path?;
    let svc = st.service.clone();
    Ok(Json(blocking(move || svc.roster(&user, id)).await?).into_response())
}

async fn list_users(State(st): State<AppState>, Actor(user): Actor) -> ApiResult<Response> {
    let svc = st.service.clone();
    Ok(Json(blocking(move || svc.list_users(&user)).await?).into_response())
}

async fn create_user(
    State(st): State<AppState>,
    Actor(user): Actor,
    body: Result<Json<NewUser>, JsonRejection>,
) -> ApiResult<Response> {
    let Json(new) = body?;
    let svc = st.service.clone();
    let u = blocking(move || svc.create_user(&user, &new)).await?;
    Ok((StatusCode::CREATED, Json(u)).into_response())
}

async fn delete_user(
    State(st): State<AppState>,
    Actor(user): Actor,
    path: Result<Path<i64>, PathRejection>,
) -> ApiResult<Response> {
    let Path(id) = path?;
    let svc = st.service.clone();
    blocking(move || svc.delete_user(&user, id)).await?;
    Ok(StatusCode::NO_CONTENT.into_response())
}

async fn export(
    State(st): State<AppState>,
    Actor(user): Actor,
    path: Result<Path<i64>, PathRejection>,
) -> ApiResult<Response> {
    let Path(id) = path?;
    let svc = st.service.clone();
    Ok(Json(blocking(move || svc.export(&user, id)).await?).into_response())
}
