//! Derivation of the browsable endpoint surface from a metamodel.

use std::collections::HashSet;

use serde::Serialize;

use crate::metamodel::{AssociationKind, Metamodel};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RouteKind {
    Collection,
    ById,
    Nested,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RouteSpec {
    /// Path template without leading slash, e.g. `api/discipline/{disciplineId}`.
    pub pattern: String,
    pub kind: RouteKind,
    pub source_type: String,
    pub target_type: String,
    /// Index into [`Metamodel::associations`] for nested routes.
    pub association: Option<usize>,
    /// Literal path segments after `api`; `None` marks the id placeholder.
    #[serde(skip)]
    segments: Vec<Option<String>>,
}

impl RouteSpec {
    /// Name of the id placeholder, if the route has one.
    pub fn id_param(&self) -> Option<String> {
        (self.kind != RouteKind::Collection).then(|| format!("{}Id", self.source_type.to_lowercase()))
    }

    /// Concrete path (without leading slash) for the given id.
    pub fn instantiate(&self, id: &str) -> String {
        let mut path = String::from("api");
        for seg in &self.segments {
            path.push('/');
            path.push_str(seg.as_deref().unwrap_or(id));
        }
        path
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum RouteError {
    #[error("route `{pattern}` would be derived twice")]
    Collision { pattern: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RouteTable {
    routes: Vec<RouteSpec>,
}

/// A request path resolved against a route table.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RouteMatch<'a> {
    pub route: &'a RouteSpec,
    pub id: Option<&'a str>,
}

impl RouteTable {
    pub fn routes(&self) -> &[RouteSpec] {
        &self.routes
    }

    pub fn len(&self) -> usize {
        self.routes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.routes.is_empty()
    }

    /// Matches path segments following `api/`.
    pub fn resolve<'a>(&'a self, segments: &[&'a str]) -> Option<RouteMatch<'a>> {
        self.routes.iter().find_map(|route| {
            if route.segments.len() != segments.len() {
                return None;
            }
            let mut id = None;
            for (expected, actual) in route.segments.iter().zip(segments) {
                match expected {
                    Some(lit) if lit == actual => {}
                    Some(_) => return None,
                    None if actual.is_empty() => return None,
                    None => id = Some(*actual),
                }
            }
            Some(RouteMatch { route, id })
        })
    }
}

/// Derives collection and by-id routes for every endpoint type and one nested
/// route per association whose source is an endpoint.
pub fn derive_route_table(mm: &Metamodel) -> Result<RouteTable, RouteError> {
    let mut routes = Vec::new();
    for ty in mm.types().filter(|t| t.is_endpoint) {
        let seg = ty.segment();
        routes.push(RouteSpec {
            pattern: format!("api/{seg}"),
            kind: RouteKind::Collection,
            source_type: ty.name.clone(),
            target_type: ty.name.clone(),
            association: None,
            segments: vec![Some(seg.clone())],
        });
        routes.push(RouteSpec {
            pattern: format!("api/{seg}/{{{}}}", ty.id_param()),
            kind: RouteKind::ById,
            source_type: ty.name.clone(),
            target_type: ty.name.clone(),
            association: None,
            segments: vec![Some(seg.clone()), None],
        });
        for (index, assoc) in mm
            .associations()
            .iter()
            .enumerate()
            .filter(|(_, a)| a.source == ty.name)
        {
            // Directed associations without a name violate conventions and get no route.
            if assoc.kind == AssociationKind::Directed && assoc.name.is_none() {
                continue;
            }
            let nested = assoc.segment();
            routes.push(RouteSpec {
                pattern: format!("api/{seg}/{{{}}}/{nested}", ty.id_param()),
                kind: RouteKind::Nested,
                source_type: ty.name.clone(),
                target_type: assoc.target.clone(),
                association: Some(index),
                segments: vec![Some(seg.clone()), None, Some(nested)],
            });
        }
    }

    let mut seen = HashSet::new();
    for route in &routes {
        // Compare with placeholders erased so `{aId}` vs `{AId}` still collide.
        let shape: Vec<Option<&str>> = route.segments.iter().map(|s| s.as_deref()).collect();
        if !seen.insert(shape) {
            return Err(RouteError::Collision {
                pattern: route.pattern.clone(),
            });
        }
    }
    Ok(RouteTable { routes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metamodel::parse_metamodel;

    const FIXTURE_A: &str = include_str!("../../../fixtures/fixture-a/fixture-a.mm");

    fn patterns(table: &RouteTable) -> Vec<&str> {
        table.routes().iter().map(|r| r.pattern.as_str()).collect()
    }

    #[test]
    fn fixture_a_routes() {
        let table = derive_route_table(&parse_metamodel(FIXTURE_A).unwrap()).unwrap();
        let p = patterns(&table);
        for expected in [
            "api/discipline",
            "api/discipline/{disciplineId}",
            "api/discipline/{disciplineId}/workproduct",
            "api/methodreference/{methodreferenceId}/bibitemref",
            "api/workproduct/{workproductId}/tools",
        ] {
            assert!(p.contains(&expected), "missing {expected}: {p:?}");
        }
        assert_eq!(table.len(), 2 * 5 + 3);
    }

    #[test]
    fn single_endpoint_has_two_routes() {
        let mm = parse_metamodel("types:\n  A [endpoint]:\n    id: string public\n    name: string public\n").unwrap();
        let table = derive_route_table(&mm).unwrap();
        assert_eq!(patterns(&table), ["api/a", "api/a/{aId}"]);
    }

    #[test]
    fn collision_is_an_error() {
        let mm = parse_metamodel(
            "types:\n  A [endpoint]:\n    id: string public\n  B [endpoint]:\n    id: string public\n\
             associations:\n  A composition(many) B\n  A aggregation(b, many) B\n",
        )
        .unwrap();
        assert_eq!(
            derive_route_table(&mm).unwrap_err(),
            RouteError::Collision {
                pattern: "api/a/{aId}/b".into()
            }
        );
    }

    #[test]
    fn resolve_paths() {
        let table = derive_route_table(&parse_metamodel(FIXTURE_A).unwrap()).unwrap();
        let m = table.resolve(&["discipline", "d1", "workproduct"]).unwrap();
        assert_eq!(m.route.kind, RouteKind::Nested);
        assert_eq!(m.id, Some("d1"));
        assert_eq!(m.route.target_type, "WorkProduct");
        assert_eq!(m.route.instantiate("d1"), "api/discipline/d1/workproduct");

        let m = table.resolve(&["discipline"]).unwrap();
        assert_eq!(m.route.kind, RouteKind::Collection);
        assert!(table.resolve(&["nosuchtype"]).is_none());
        assert!(table.resolve(&["discipline", ""]).is_none());
        assert!(table.resolve(&["discipline", "d1", "tools"]).is_none());
    }
}
