//! Replays the checked-in fuzz seeds through the same entry points as the
//! fuzz targets.

use hpbem::surface::{PiecewisePlaneSurface, QuadMesh};
use hpbem_cli::ExperimentConfig;
use std::path::PathBuf;

fn seeds(target: &str) -> Vec<(String, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fuzz/corpus")
        .join(target);
    let mut out: Vec<(String, Vec<u8>)> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let p = e.unwrap().path();
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read(&p).unwrap(),
            )
        })
        .collect();
    out.sort();
    assert!(!out.is_empty());
    out
}

#[test]
fn surface_seeds() {
    let mut accepted = Vec::new();
    for (name, data) in seeds("parse_surface") {
        let Ok(text) = std::str::from_utf8(&data) else {
            continue;
        };
        if let Ok(s) = PiecewisePlaneSurface::parse(text) {
            let again = PiecewisePlaneSurface::parse(&s.to_text()).unwrap();
            assert_eq!(again.to_text(), s.to_text(), "{name}");
            QuadMesh::refine(&s, 1).unwrap();
            accepted.push(name);
        }
    }
    let want = [
        "cube.mesh",
        "folded.mesh",
        "l_shape.mesh",
        "screen.mesh",
        "two_patch_screen.mesh",
    ];
    assert_eq!(accepted, want);
}

#[test]
fn config_seeds() {
    let mut rejected = Vec::new();
    for (name, data) in seeds("experiment_config") {
        match ExperimentConfig::from_json(std::str::from_utf8(&data).unwrap()) {
            Ok(c) => c.validate().unwrap(),
            Err(_) => rejected.push(name),
        }
    }
    let want = [
        "conflicting_surface.json",
        "inapplicable_key.json",
        "invalid_range.json",
        "not_object.json",
    ];
    assert_eq!(rejected, want);
}
