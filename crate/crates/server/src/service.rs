//! The HTTP-agnostic controller: one pure `dispatch` call per request.

use std::sync::Arc;

use serde::Serialize;

use processkit_core::export::{self, ExportError, ExportKind};
use processkit_core::model::{ModelStore, StoreError};
use processkit_core::openapi::{generate_openapi, OpenApiDocument};
use processkit_core::projection::ProjectionError;
use processkit_core::tailoring::{ProfileStore, SavedProfile, TailoringError};
use processkit_core::{
    derive_route_table, parse_profile, render_xml, Metamodel, ModelSnapshot, Projector, RouteTable,
    TailoringProfile, VersionSelector,
};

pub const XML_MEDIA_TYPE: &str = "application/xml; charset=utf-8";
pub const JSON_MEDIA_TYPE: &str = "application/json";
pub const YAML_MEDIA_TYPE: &str = "application/yaml";
pub const ZIP_MEDIA_TYPE: &str = "application/zip";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Get,
    Post,
    Other,
}

impl Method {
    pub fn parse(method: &str) -> Self {
        match method {
            "GET" | "HEAD" => Method::Get,
            "POST" => Method::Post,
            _ => Method::Other,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Request {
    pub method: Method,
    /// Path without query string, e.g. `/api/discipline/d1`.
    pub path: String,
    /// Decoded query parameters in request order.
    pub query: Vec<(String, String)>,
    pub body: Vec<u8>,
}

impl Request {
    /// A GET for `target`, which may carry a query string.
    pub fn get(target: &str) -> Self {
        let (path, query) = target.split_once('?').unwrap_or((target, ""));
        Self {
            method: Method::Get,
            path: path.to_owned(),
            query: form_urlencoded::parse(query.as_bytes()).into_owned().collect(),
            body: Vec::new(),
        }
    }

    pub fn post(path: &str, body: impl Into<Vec<u8>>) -> Self {
        Self {
            method: Method::Post,
            path: path.to_owned(),
            query: Vec::new(),
            body: body.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Response {
    pub status: u16,
    pub media_type: String,
    pub headers: Vec<(&'static str, String)>,
    pub body: Vec<u8>,
}

impl Response {
    fn ok(media_type: impl Into<String>, body: impl Into<Vec<u8>>) -> Self {
        Self {
            status: 200,
            media_type: media_type.into(),
            headers: Vec::new(),
            body: body.into(),
        }
    }

    fn json(status: u16, value: &impl Serialize) -> Self {
        let mut body = serde_json::to_vec_pretty(value).expect("response values serialize");
        body.push(b'\n');
        Self {
            status,
            media_type: JSON_MEDIA_TYPE.into(),
            headers: Vec::new(),
            body,
        }
    }

    pub fn body_text(&self) -> &str {
        std::str::from_utf8(&self.body).unwrap_or("<binary>")
    }
}

/// Error body of every non-2xx response.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ApiError {
    pub status: u16,
    pub code: &'static str,
    pub message: String,
}

impl ApiError {
    fn new(status: u16, code: &'static str, message: impl Into<String>) -> Self {
        Self {
            status,
            code,
            message: message.into(),
        }
    }

    fn not_found(code: &'static str, message: impl Into<String>) -> Self {
        Self::new(404, code, message)
    }

    fn no_route(path: &str) -> Self {
        Self::not_found("unknown-route", format!("no resource at `{path}`"))
    }
}

impl From<ApiError> for Response {
    fn from(e: ApiError) -> Self {
        Response::json(e.status, &e)
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        match e {
            StoreError::UnknownVariant(_) => ApiError::not_found("unknown-variant", e.to_string()),
            StoreError::UnknownVersion { .. } => ApiError::not_found("unknown-version", e.to_string()),
            other => ApiError::new(500, "internal", other.to_string()),
        }
    }
}

impl From<TailoringError> for ApiError {
    fn from(e: TailoringError) -> Self {
        ApiError::new(400, "invalid-parameter", e.to_string())
    }
}

impl From<ProjectionError> for ApiError {
    fn from(e: ProjectionError) -> Self {
        let code = match e {
            ProjectionError::UnknownType(_) => "unknown-type",
            ProjectionError::UnknownId { .. } => "unknown-id",
            ProjectionError::Filtered { .. } => "filtered",
            ProjectionError::UnknownSegment { .. } => "unknown-route",
        };
        ApiError::not_found(code, e.to_string())
    }
}

type Clock = Box<dyn Fn() -> u64 + Send + Sync>;

/// The service half of the server: holds the metamodel, its derived routes,
/// the snapshot store and saved profiles. Requests never mutate snapshots.
pub struct Service {
    mm: Metamodel,
    routes: RouteTable,
    store: Arc<ModelStore>,
    profiles: ProfileStore,
    default_variant: String,
    clock: Clock,
}

#[derive(Debug, thiserror::Error)]
pub enum ServiceError {
    #[error(transparent)]
    Routes(#[from] processkit_core::routes::RouteError),
    #[error("default variant `{0}` has no snapshot")]
    MissingDefault(String),
}

impl Service {
    pub fn new(mm: Metamodel, store: Arc<ModelStore>, default_variant: impl Into<String>) -> Result<Self, ServiceError> {
        let default_variant = default_variant.into();
        if !store.has_variant(&default_variant) {
            return Err(ServiceError::MissingDefault(default_variant));
        }
        Ok(Self {
            routes: derive_route_table(&mm)?,
            mm,
            store,
            profiles: ProfileStore::new(),
            default_variant,
            clock: Box::new(export::timestamp_now),
        })
    }

    /// Replaces the manifest clock, e.g. to make exports reproducible.
    pub fn with_clock(mut self, clock: impl Fn() -> u64 + Send + Sync + 'static) -> Self {
        self.clock = Box::new(clock);
        self
    }

    pub fn metamodel(&self) -> &Metamodel {
        &self.mm
    }

    pub fn routes(&self) -> &RouteTable {
        &self.routes
    }

    pub fn store(&self) -> &ModelStore {
        &self.store
    }

    pub fn default_variant(&self) -> &str {
        &self.default_variant
    }

    /// The OpenAPI document; tailoring parameters come from the default
    /// variant's latest snapshot.
    pub fn openapi(&self) -> Result<OpenApiDocument, ApiError> {
        let snapshot = self.store.get_snapshot(&self.default_variant, &VersionSelector::Latest)?;
        Ok(generate_openapi(&self.mm, &self.routes, snapshot.characteristics()))
    }

    pub fn dispatch(&self, request: &Request) -> Response {
        self.try_dispatch(request).unwrap_or_else(Response::from)
    }

    fn try_dispatch(&self, request: &Request) -> Result<Response, ApiError> {
        let trimmed = request.path.trim_matches('/');
        let segments: Vec<&str> = if trimmed.is_empty() { Vec::new() } else { trimmed.split('/').collect() };
        match (request.method, segments.as_slice()) {
            (Method::Get, ["healthz"]) => Ok(Response::ok("text/plain; charset=utf-8", "ok\n")),
            (Method::Get, ["variants"]) => Ok(Response::json(200, &self.store.list_variants())),
            (Method::Get, ["openapi.json"]) => Ok(Response::ok(JSON_MEDIA_TYPE, self.openapi()?.to_json())),
            (Method::Get, ["openapi.yaml"]) => Ok(Response::ok(YAML_MEDIA_TYPE, self.openapi()?.to_yaml())),
            (Method::Get, ["api", rest @ ..]) => self.api(rest, &request.query, &request.path),
            (Method::Get, ["assets", rest @ ..]) => self.asset(rest, &request.path),
            (Method::Get, ["export", rest @ ..]) => self.export(rest, &request.query, &request.path),
            (Method::Get, ["profiles"]) => Ok(Response::json(200, &self.profiles.list())),
            (Method::Get, ["profiles", id]) => {
                let stored = self
                    .profiles
                    .get(id)
                    .map_err(|e| ApiError::not_found("unknown-profile", e.to_string()))?;
                Ok(Response::json(200, &stored))
            }
            (Method::Post, ["profiles"]) => self.save_profile(&request.body),
            _ => Err(ApiError::no_route(&request.path)),
        }
    }

    /// Splits an optional `{variant}/{version}` prefix off `rest`. The prefix
    /// is recognised only when its first segment names a stored variant.
    fn select<'r>(&self, rest: &'r [&'r str]) -> Result<(Arc<ModelSnapshot>, &'r [&'r str]), ApiError> {
        match rest {
            [variant, version, tail @ ..] if self.store.has_variant(variant) => {
                let selector: VersionSelector = version.parse().unwrap_or(VersionSelector::Latest);
                Ok((self.store.get_snapshot(variant, &selector)?, tail))
            }
            _ => Ok((
                self.store.get_snapshot(&self.default_variant, &VersionSelector::Latest)?,
                rest,
            )),
        }
    }

    fn api(&self, rest: &[&str], query: &[(String, String)], path: &str) -> Result<Response, ApiError> {
        let (snapshot, route_segments) = self.select(rest)?;
        let matched = self
            .routes
            .resolve(route_segments)
            .ok_or_else(|| ApiError::no_route(path))?;
        let profile = parse_profile(&snapshot, query.iter().map(|(k, v)| (k, v)))?;
        let doc = Projector::new(&self.mm, &snapshot, &profile).evaluate(&matched)?;
        Ok(Response::ok(XML_MEDIA_TYPE, render_xml(&doc)))
    }

    fn asset(&self, rest: &[&str], path: &str) -> Result<Response, ApiError> {
        let (snapshot, tail) = self.select(rest)?;
        let [id] = tail else {
            return Err(ApiError::no_route(path));
        };
        let asset = snapshot
            .get_binary(id)
            .map_err(|_| ApiError::not_found("unknown-asset", format!("no asset `{id}`")))?;
        Ok(Response::ok(asset.media_type.clone(), asset.bytes.clone()))
    }

    fn export(&self, rest: &[&str], query: &[(String, String)], path: &str) -> Result<Response, ApiError> {
        let (snapshot, tail) = self.select(rest)?;
        let [kind] = tail else {
            return Err(ApiError::no_route(path));
        };
        let kind: ExportKind = kind
            .parse()
            .map_err(|e: export::UnknownExportKind| ApiError::not_found("unknown-export", e.to_string()))?;
        let profile = parse_profile(&snapshot, query.iter().map(|(k, v)| (k, v)))?;
        let bytes = self.export_bytes(kind, &snapshot, &profile)?;
        let mut response = Response::ok(ZIP_MEDIA_TYPE, bytes);
        response.headers.push((
            "content-disposition",
            format!("attachment; filename=\"{}-{}-{kind}.zip\"", snapshot.variant(), snapshot.version()),
        ));
        Ok(response)
    }

    /// The archive for `kind`, exactly as the export route serves it.
    pub fn export_bytes(
        &self,
        kind: ExportKind,
        snapshot: &ModelSnapshot,
        profile: &TailoringProfile,
    ) -> Result<Vec<u8>, ApiError> {
        let bundle = export::generate(kind, snapshot, &self.mm, profile, (self.clock)()).map_err(|e| match e {
            ExportError::Unsupported { .. } => ApiError::new(409, "unsupported-export", e.to_string()),
        })?;
        Ok(bundle.to_zip())
    }

    fn save_profile(&self, body: &[u8]) -> Result<Response, ApiError> {
        let saved: SavedProfile = serde_json::from_slice(body)
            .map_err(|e| ApiError::new(400, "invalid-profile", format!("expected {{name, selections}}: {e}")))?;
        let snapshot = self.store.get_snapshot(&self.default_variant, &VersionSelector::Latest)?;
        let profile = saved.to_profile(&snapshot)?;
        let id = self.profiles.save(&saved.name, &profile);
        let stored = self.profiles.get(&id).expect("just saved");
        Ok(Response::json(201, &stored))
    }
}
