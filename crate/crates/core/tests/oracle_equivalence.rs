use processkit_core::model::NoAssets;
use processkit_core::projection::ProjectionError;
use processkit_core::tailoring::TailoringProfile;
use processkit_core::{derive_route_table, ingest_model, parse_metamodel, render_xml, validate_conventions, Projector};
use processkit_testkit::{generate, profiles, Expected, Model, Profile, Tree};

fn to_profile(p: &Profile) -> TailoringProfile {
    p.iter()
        .fold(TailoringProfile::empty(), |acc, (k, v)| acc.with(k.clone(), v.clone()))
}

fn check_model(model: &Model, seed: u64, seen: &mut [usize; 4]) {
    let mm = parse_metamodel(&model.metamodel_text()).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
    let report = validate_conventions(&mm);
    assert!(report.is_clean(), "seed {seed}: {:?}", report.findings);
    let snapshot = ingest_model(&mm, model.model_xml().as_bytes(), &model.variant, &model.version, &NoAssets)
        .unwrap_or_else(|e| panic!("seed {seed}: {e}\n{}", model.model_xml()));
    let routes = derive_route_table(&mm).unwrap();

    for profile in profiles(model, seed, 3) {
        let tailoring = to_profile(&profile);
        let projector = Projector::new(&mm, &snapshot, &tailoring);
        for path in model.request_paths() {
            let segments: Vec<&str> = path.strip_prefix("api/").unwrap().split('/').collect();
            let expected = model.expect(&path, &profile);
            let Some(matched) = routes.resolve(&segments) else {
                assert_eq!(expected, Expected::NoRoute, "seed {seed} {path}");
                continue;
            };
            let actual = match projector.evaluate(&matched) {
                Ok(doc) => {
                    let xml = String::from_utf8(render_xml(&doc)).unwrap();
                    Expected::Ok(Tree::parse(&xml).unwrap())
                }
                Err(ProjectionError::UnknownId { .. }) => Expected::UnknownId,
                Err(ProjectionError::Filtered { .. }) => Expected::Filtered,
                Err(e) => panic!("seed {seed} {path}: unexpected {e}"),
            };
            seen[match &actual {
                Expected::Ok(_) => 0,
                Expected::UnknownId => 1,
                Expected::Filtered => 2,
                Expected::NoRoute => 3,
            }] += 1;
            assert_eq!(actual, expected, "seed {seed} {path} {profile:?}");
        }
    }
}

#[test]
fn random_models_match_the_oracle() {
    let mut seen = [0; 4];
    for seed in 0..40 {
        check_model(&generate(seed), seed, &mut seen);
    }
    // The sample must exercise successes, unknown ids and tailored-out ids.
    assert!(seen[0] > 100 && seen[1] > 10 && seen[2] > 10, "{seen:?}");
}

#[test]
fn fixture_matches_the_oracle() {
    let model = processkit_testkit::fixture_a_model();
    let mm = parse_metamodel(&std::fs::read_to_string(processkit_testkit::fixture_a_metamodel_path()).unwrap())
        .unwrap();
    let snapshot = ingest_model(
        &mm,
        &std::fs::read(processkit_testkit::fixture_a_model_path()).unwrap(),
        "bund",
        "2.4",
        &processkit_core::model::DirAssets(processkit_testkit::fixture_a_dir()),
    )
    .unwrap();
    let routes = derive_route_table(&mm).unwrap();
    for value in [None, Some("dev"), Some("maint")] {
        let profile: Profile = value
            .map(|v| [("projectType".to_owned(), v.to_owned())].into())
            .unwrap_or_default();
        let tailoring = to_profile(&profile);
        let projector = Projector::new(&mm, &snapshot, &tailoring);
        for path in model.request_paths() {
            let segments: Vec<&str> = path.strip_prefix("api/").unwrap().split('/').collect();
            let expected = model.expect(&path, &profile);
            let matched = routes.resolve(&segments).unwrap();
            let actual = match projector.evaluate(&matched) {
                Ok(doc) => Expected::Ok(Tree::parse(std::str::from_utf8(&render_xml(&doc)).unwrap()).unwrap()),
                Err(ProjectionError::UnknownId { .. }) => Expected::UnknownId,
                Err(ProjectionError::Filtered { .. }) => Expected::Filtered,
                Err(e) => panic!("{path}: {e}"),
            };
            assert_eq!(actual, expected, "{path} {profile:?}");
        }
    }
}
