#![no_main]

use hpbem::surface::{PiecewisePlaneSurface, QuadMesh};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(surface) = PiecewisePlaneSurface::parse(text) {
        // accepted surfaces must round-trip and refine
        let again = PiecewisePlaneSurface::parse(&surface.to_text()).expect("round trip");
        assert_eq!(again.to_text(), surface.to_text());
        if surface.patches().len() <= 16 {
            let _ = QuadMesh::refine(&surface, 1);
        }
    }
});
