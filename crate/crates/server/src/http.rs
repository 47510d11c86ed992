//! Thin axum adapter around [`Service::dispatch`].

use std::sync::Arc;

use axum::body::{to_bytes, Body};
use axum::http::{header, HeaderValue, StatusCode};
use axum::Router;

use crate::service::{Method, Request, Service};

const MAX_BODY: usize = 1 << 20;

pub fn router(service: Arc<Service>) -> Router {
    Router::new().fallback(move |request: axum::extract::Request| {
        let service = Arc::clone(&service);
        async move { handle(&service, request).await }
    })
}

async fn handle(service: &Service, request: axum::extract::Request) -> axum::response::Response {
    let (parts, body) = request.into_parts();
    let Ok(body) = to_bytes(body, MAX_BODY).await else {
        return plain(StatusCode::BAD_REQUEST, "request body too large or unreadable\n");
    };
    let request = Request {
        method: Method::parse(parts.method.as_str()),
        path: parts.uri.path().to_owned(),
        query: parts
            .uri
            .query()
            .map(|q| form_urlencoded::parse(q.as_bytes()).into_owned().collect())
            .unwrap_or_default(),
        body: body.to_vec(),
    };
    let response = service.dispatch(&request);

    let mut out = axum::response::Response::new(Body::from(response.body));
    *out.status_mut() = StatusCode::from_u16(response.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
    let headers = out.headers_mut();
    if let Ok(v) = HeaderValue::from_str(&response.media_type) {
        headers.insert(header::CONTENT_TYPE, v);
    }
    for (name, value) in response.headers {
        if let Ok(v) = HeaderValue::from_str(&value) {
            headers.insert(name, v);
        }
    }
    out
}

fn plain(status: StatusCode, text: &'static str) -> axum::response::Response {
    let mut out = axum::response::Response::new(Body::from(text));
    *out.status_mut() = status;
    out
}

/// Serves until the listener fails.
pub async fn serve(listener: tokio::net::TcpListener, service: Arc<Service>) -> std::io::Result<()> {
    axum::serve(listener, router(service)).await
}
