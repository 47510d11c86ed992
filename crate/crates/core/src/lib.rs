//! Metamodel-driven process engine.
//!
//! A conceptual metamodel ([`metamodel`]) determines the browsable route
//! surface ([`routes`]). Process model instances are ingested into immutable
//! snapshots ([`model`]) and projected into XML responses ([`projection`],
//! [`response`]) under a per-request tailoring profile ([`tailoring`]). The
//! same inputs drive the OpenAPI description ([`openapi`]) and the generated
//! project artifacts ([`export`]).

pub mod export;
pub mod metamodel;
pub mod model;
pub mod openapi;
pub mod projection;
pub mod response;
pub mod routes;
pub mod tailoring;
mod xml;

#[cfg(test)]
mod testing;

pub use metamodel::{parse_metamodel, validate_conventions, Metamodel};
pub use model::{ingest_model, ModelSnapshot, ModelStore, VersionSelector};
pub use projection::{Access, ProjectionError, Projector};
pub use response::{render_xml, ResponseDoc};
pub use routes::{derive_route_table, RouteTable};
pub use tailoring::{parse_profile, TailoringProfile};
