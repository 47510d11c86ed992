use std::collections::BTreeSet;

use proptest::prelude::*;

use processkit_core::metamodel::AssociationKind;
use processkit_core::model::{serialize_model, NoAssets};
use processkit_core::projection::visible_attributes;
use processkit_core::tailoring::tailor;
use processkit_core::{
    derive_route_table, ingest_model, parse_metamodel, render_xml, Access, Metamodel, ModelSnapshot, Projector,
    TailoringProfile,
};
use processkit_testkit::{generate, profiles, Model, Tree};

fn load(model: &Model) -> (Metamodel, ModelSnapshot) {
    let mm = parse_metamodel(&model.metamodel_text()).unwrap();
    let snap = ingest_model(&mm, model.model_xml().as_bytes(), &model.variant, &model.version, &NoAssets).unwrap();
    (mm, snap)
}

/// Ids in every successful response for every request path.
fn response_ids(model: &Model, mm: &Metamodel, snap: &ModelSnapshot, profile: &TailoringProfile) -> Vec<BTreeSet<String>> {
    let routes = derive_route_table(mm).unwrap();
    let projector = Projector::new(mm, snap, profile);
    model
        .request_paths()
        .iter()
        .map(|path| {
            let segments: Vec<&str> = path.strip_prefix("api/").unwrap().split('/').collect();
            match routes.resolve(&segments).map(|m| projector.evaluate(&m)) {
                Some(Ok(doc)) => {
                    let tree = Tree::parse(std::str::from_utf8(&render_xml(&doc)).unwrap()).unwrap();
                    tree.ids().into_iter().map(str::to_owned).collect()
                }
                _ => BTreeSet::new(),
            }
        })
        .collect()
}

fn to_profile(p: &processkit_testkit::Profile) -> TailoringProfile {
    p.iter()
        .fold(TailoringProfile::empty(), |acc, (k, v)| acc.with(k.clone(), v.clone()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn tailoring_laws(seed in any::<u64>()) {
        let model = generate(seed);
        let (mm, snap) = load(&model);
        let empty = TailoringProfile::empty();
        let unfiltered = response_ids(&model, &mm, &snap, &empty);

        // The empty profile is the identity.
        prop_assert_eq!(tailor(&snap, &empty), snap.clone());

        for p in profiles(&model, seed, 5) {
            let profile = to_profile(&p);
            let once = tailor(&snap, &profile);
            prop_assert_eq!(tailor(&once, &profile), once.clone(), "idempotence");

            let filtered = response_ids(&model, &mm, &snap, &profile);
            for (f, u) in filtered.iter().zip(&unfiltered) {
                prop_assert!(f.is_subset(u), "subset");
            }

            // Adding one more selection never adds ids.
            for c in snap.characteristics() {
                if profile.selection(&c.key).is_some() {
                    continue;
                }
                for v in &c.values {
                    let narrower = profile.clone().with(c.key.clone(), v.clone());
                    let narrowed = response_ids(&model, &mm, &snap, &narrower);
                    for (n, f) in narrowed.iter().zip(&filtered) {
                        prop_assert!(n.is_subset(f), "monotonicity");
                    }
                }
            }
        }
    }

    #[test]
    fn visibility_is_monotone(seed in any::<u64>()) {
        let (mm, _) = load(&generate(seed));
        for ty in mm.types() {
            let names = |a: Access| visible_attributes(ty, a).iter().map(|a| a.name.clone()).collect::<BTreeSet<_>>();
            prop_assert!(names(Access::Collection).is_subset(&names(Access::EmbeddedAggregated)));
            prop_assert!(names(Access::EmbeddedAggregated).is_subset(&names(Access::ById)));
            prop_assert_eq!(names(Access::ById).len(), ty.attributes.len());
        }
    }

    #[test]
    fn route_count(seed in any::<u64>()) {
        let (mm, _) = load(&generate(seed));
        let routes = derive_route_table(&mm).unwrap();
        let endpoints = mm.types().filter(|t| t.is_endpoint).count();
        let nested = mm
            .associations()
            .iter()
            .filter(|a| a.kind != AssociationKind::Directed || a.name.is_some())
            .count();
        prop_assert_eq!(routes.len(), 2 * endpoints + nested);
        prop_assert_eq!(derive_route_table(&mm).unwrap(), routes);
    }

    #[test]
    fn serialize_round_trip(seed in any::<u64>()) {
        let model = generate(seed);
        let (mm, snap) = load(&model);
        let text = serialize_model(&snap);
        let again = ingest_model(&mm, text.as_bytes(), &model.variant, &model.version, &NoAssets).unwrap();
        prop_assert_eq!(again, snap);
    }

    #[test]
    fn references_resolve(seed in any::<u64>()) {
        let (_, snap) = load(&generate(seed));
        for e in snap.elements() {
            for id in e.children.values().chain(e.references.values()).flatten() {
                prop_assert!(snap.element(id).is_some());
            }
        }
    }
}
