//! HTTP front end of the process API.
//!
//! [`Service::dispatch`] maps a plain request to a plain response and holds
//! every rule of the surface; [`http`] binds it to a socket.

mod config;
pub mod http;
mod service;

pub use config::{Config, ConfigError, ModelSource};
pub use service::{
    ApiError, Method, Request, Response, Service, ServiceError, JSON_MEDIA_TYPE, XML_MEDIA_TYPE, YAML_MEDIA_TYPE,
    ZIP_MEDIA_TYPE,
};
