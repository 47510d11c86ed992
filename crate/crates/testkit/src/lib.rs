//! Test support: a seeded generator of random process models and a
//! brute-force oracle that predicts every API answer for them.
//!
//! The kit shares no code with the engine. It emits models in the engine's
//! input formats and compares answers as parsed XML trees.

mod fixture;
mod gen;
mod model;
mod oracle;
mod tree;

pub use fixture::{fixture_a_dir, fixture_a_metamodel_path, fixture_a_model, fixture_a_model_path};
pub use gen::{generate, generate_with, profiles, GenConfig};
pub use model::{Assoc, Attr, Characteristic, Element, Kind, Link, Model, Type, Vis};
pub use oracle::{Expected, Profile};
pub use tree::Tree;
