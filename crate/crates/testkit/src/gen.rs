//! Seeded random process models that satisfy the modelling conventions:
//! unique route segments and child tags, a composition forest, endpoints as
//! association sources, public `id` and `name` everywhere.

use std::collections::BTreeSet;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{Assoc, Attr, Characteristic, Element, Kind, Link, Model, Type, Vis};
use crate::oracle::Profile;

const TYPE_NAMES: &[&str] = &[
    "Activity", "Role", "Artifact", "Phase", "Milestone", "Task", "Guide", "Template", "Checklist",
    "Standard", "Topic", "Practice",
];
const ATTR_NAMES: &[&str] = &["summary", "effort", "notes", "purpose", "rank", "owner", "status", "description"];
const ASSOC_NAMES: &[&str] = &[
    "Uses", "Cites", "Needs", "Supports", "Inputs", "Outputs", "Guides", "Checks", "Follows", "Relates",
    "Informs", "Governs",
];
const CHARACTERISTICS: &[(&str, &str, &[&str])] = &[
    ("size", "Project size", &["small", "medium", "large"]),
    ("domain", "Application domain", &["web", "embedded"]),
    ("risk", "Risk level", &["low", "mid", "high"]),
];
const WORDS: &[&str] = &[
    "plan", "review", "risk", "test", "deliver", "Quality", "scope", "team", "budget", "ACME",
];

#[derive(Clone, Debug)]
pub struct GenConfig {
    pub max_types: usize,
    pub max_elements: usize,
    pub max_characteristics: usize,
}

impl Default for GenConfig {
    fn default() -> Self {
        Self {
            max_types: 8,
            max_elements: 50,
            max_characteristics: 3,
        }
    }
}

/// Model for `seed` under the default size limits.
pub fn generate(seed: u64) -> Model {
    generate_with(seed, &GenConfig::default())
}

pub fn generate_with(seed: u64, config: &GenConfig) -> Model {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let types = gen_types(&mut rng, config);
    let assocs = gen_assocs(&mut rng, &types);
    let characteristics = gen_characteristics(&mut rng, config);
    let elements = gen_elements(&mut rng, config, &types, &assocs, &characteristics);
    Model {
        name: format!("generated-{seed}"),
        variant: format!("line-{}", seed % 1000),
        version: format!("{}.{}", rng.random_range(1..4), rng.random_range(0..10)),
        types,
        assocs,
        characteristics,
        elements,
    }
}

fn gen_types(rng: &mut ChaCha8Rng, config: &GenConfig) -> Vec<Type> {
    let n = rng.random_range(1..=config.max_types.clamp(1, TYPE_NAMES.len()));
    let mut names: Vec<&str> = TYPE_NAMES.to_vec();
    names.shuffle(rng);
    names
        .into_iter()
        .take(n)
        .enumerate()
        .map(|(i, name)| {
            let mut attrs = vec![
                Attr { name: "id".into(), kind: Kind::String, vis: Vis::Public },
                Attr { name: "name".into(), kind: Kind::String, vis: Vis::Public },
            ];
            let extra = rng.random_range(0..=4);
            let mut pool: Vec<&str> = ATTR_NAMES.to_vec();
            pool.shuffle(rng);
            for attr in pool.into_iter().take(extra) {
                let kind = *[Kind::String, Kind::Integer, Kind::Html].choose(rng).unwrap();
                let vis = *[Vis::Public, Vis::Protected, Vis::Private].choose(rng).unwrap();
                attrs.push(Attr { name: attr.into(), kind, vis });
            }
            Type {
                name: name.into(),
                endpoint: i == 0 || rng.random_bool(0.8),
                work_product: rng.random_bool(0.35),
                plan: rng.random_bool(0.35),
                attrs,
            }
        })
        .collect()
}

fn gen_assocs(rng: &mut ChaCha8Rng, types: &[Type]) -> Vec<Assoc> {
    let mut names: Vec<&str> = ASSOC_NAMES.to_vec();
    names.shuffle(rng);
    let mut names = names.into_iter();
    let mut out = Vec::new();
    for (i, source) in types.iter().enumerate().filter(|(_, t)| t.endpoint) {
        // Composition and aggregation nodes are tagged with the target type,
        // so each target may appear in at most one of them per source.
        let mut tagged_targets = BTreeSet::new();
        for _ in 0..rng.random_range(0..=3) {
            let kind = *[Link::Composition, Link::Aggregation, Link::Directed].choose(rng).unwrap();
            let target = match kind {
                // Compositions point "forward" so the type graph stays acyclic.
                Link::Composition => {
                    let later: Vec<&Type> = types[i + 1..].iter().collect();
                    match later.choose(rng) {
                        Some(t) => *t,
                        None => continue,
                    }
                }
                _ => types.choose(rng).unwrap(),
            };
            if kind != Link::Directed && !tagged_targets.insert(target.name.clone()) {
                continue;
            }
            let name = match kind {
                Link::Composition => None,
                _ => match names.next() {
                    Some(n) => Some(n.to_owned()),
                    None => continue,
                },
            };
            out.push(Assoc {
                source: source.name.clone(),
                kind,
                name,
                many: rng.random_bool(0.7),
                target: target.name.clone(),
            });
        }
    }
    out
}

fn gen_characteristics(rng: &mut ChaCha8Rng, config: &GenConfig) -> Vec<Characteristic> {
    let n = rng.random_range(0..=config.max_characteristics.min(CHARACTERISTICS.len()));
    CHARACTERISTICS[..n]
        .iter()
        .map(|(key, label, values)| Characteristic {
            key: (*key).into(),
            label: (*label).into(),
            values: values.iter().map(|v| (*v).into()).collect(),
        })
        .collect()
}

fn gen_value(rng: &mut ChaCha8Rng, kind: Kind) -> String {
    let word = |rng: &mut ChaCha8Rng| *WORDS.choose(rng).unwrap();
    match kind {
        Kind::Integer => rng.random_range(-50..1000).to_string(),
        Kind::String => match rng.random_range(0..5) {
            0 => format!("{} & {} <{}> \"q\"", word(rng), word(rng), word(rng)),
            1 => format!("{} 'x' {}", word(rng), word(rng)),
            _ => format!("{} {}", word(rng), word(rng)),
        },
        Kind::Html => format!("<p>{} &amp; <b>{}</b></p>", word(rng), word(rng)),
    }
}

fn gen_elements(
    rng: &mut ChaCha8Rng,
    config: &GenConfig,
    types: &[Type],
    assocs: &[Assoc],
    characteristics: &[Characteristic],
) -> Vec<Element> {
    let n = rng.random_range(0..=config.max_elements);
    let mut elements: Vec<Element> = (0..n)
        .map(|k| {
            let ty = types.choose(rng).unwrap();
            let id = format!("e{k}");
            let mut values = Vec::new();
            for a in &ty.attrs {
                let value = match a.name.as_str() {
                    "id" => id.clone(),
                    "name" => format!("{} {k}", ty.name),
                    _ if a.vis != Vis::Public && rng.random_bool(0.25) => continue,
                    _ => gen_value(rng, a.kind),
                };
                values.push((a.name.clone(), value));
            }
            let mut condition = Vec::new();
            if rng.random_bool(0.3) {
                for c in characteristics {
                    if rng.random_bool(0.5) {
                        continue;
                    }
                    let accepted: Vec<String> = c
                        .values
                        .iter()
                        .filter(|_| rng.random_bool(0.5))
                        .cloned()
                        .collect();
                    if !accepted.is_empty() {
                        condition.push((c.key.clone(), accepted));
                    }
                }
            }
            Element {
                id,
                type_name: ty.name.clone(),
                values,
                links: Vec::new(),
                condition,
            }
        })
        .collect();

    let mut parented = BTreeSet::new();
    for k in 0..elements.len() {
        let source_type = elements[k].type_name.clone();
        for (i, a) in assocs.iter().enumerate().filter(|(_, a)| a.source == source_type) {
            let mut candidates: Vec<String> = elements
                .iter()
                .filter(|e| e.type_name == a.target && e.id != elements[k].id)
                .filter(|e| a.kind != Link::Composition || !parented.contains(&e.id))
                .map(|e| e.id.clone())
                .collect();
            candidates.shuffle(rng);
            let max = if a.many { 3 } else { 1 };
            let take = rng.random_range(0..=max.min(candidates.len()));
            let targets: Vec<String> = candidates.into_iter().take(take).collect();
            if a.kind == Link::Composition {
                parented.extend(targets.iter().cloned());
            }
            if !targets.is_empty() {
                elements[k].links.push((i, targets));
            }
        }
    }
    elements
}

/// `n` tailoring profiles for `model`; the first is always empty.
pub fn profiles(model: &Model, seed: u64, n: usize) -> Vec<Profile> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_7a11);
    let mut out = vec![Profile::new()];
    while out.len() < n {
        let mut p = Profile::new();
        for c in &model.characteristics {
            if rng.random_bool(0.7) {
                p.insert(c.key.clone(), c.values.choose(&mut rng).unwrap().clone());
            }
        }
        out.push(p);
    }
    out.truncate(n);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Link;

    #[test]
    fn deterministic() {
        assert_eq!(generate(7), generate(7));
        assert_eq!(generate(7).model_xml(), generate(7).model_xml());
    }

    #[test]
    fn respects_limits_and_forest() {
        for seed in 0..200 {
            let m = generate(seed);
            assert!(m.types.len() <= 8 && m.elements.len() <= 50 && m.characteristics.len() <= 3);
            let mut parents = std::collections::HashMap::new();
            for e in &m.elements {
                for (i, targets) in &e.links {
                    if m.assocs[*i].kind == Link::Composition {
                        for t in targets {
                            assert!(parents.insert(t.clone(), e.id.clone()).is_none(), "seed {seed}");
                        }
                    }
                }
            }
        }
    }
}
