use chevalley::coxeter::{build_root_system, enumerate_strata, CoxeterType};
use chevalley::invariants::{basic_invariants, load_basis_file, write_basis_file};
use chevalley::probe::{refine_value_interval, sample_fiber};
use chevalley::rng::{gaussian_vec, stream_rng};
use chevalley::Error;

fn ty(s: &str) -> CoxeterType {
    s.parse().unwrap()
}

#[test]
fn folding_preserves_the_chevalley_map() {
    for name in ["A3", "B3", "D4", "G2", "I2:7", "H3", "F4"] {
        let t = ty(name);
        let (b, rs) = (basic_invariants(t).unwrap(), build_root_system(t).unwrap());
        let mut rng = stream_rng(3, 0);
        for _ in 0..20 {
            let x = gaussian_vec(&mut rng, t.dim());
            let y = rs.fold_into_chamber(&x);
            assert!(rs.chamber_contains(&y, 1e-12), "{name}: {y:?}");
            let (px, py) = (b.numeric().eval(&x, t.dim()), b.numeric().eval(&y, t.dim()));
            for (u, v) in px.iter().zip(&py) {
                assert!((u - v).abs() <= 1e-9 * (1.0 + u.abs()), "{name}: {px:?} vs {py:?}");
            }
        }
    }
}

#[test]
fn irreducible_chamber_has_a_face_per_wall_subset() {
    for name in ["B3", "D5", "H3", "F4", "I2:9"] {
        let rs = build_root_system(ty(name)).unwrap();
        assert_eq!(enumerate_strata(&rs).len(), 1 << rs.rank(), "{name}");
    }
}

#[test]
fn b2_fiber_values_fill_the_interval() {
    let t = ty("B2");
    let (b, rs) = (basic_invariants(t).unwrap(), build_root_system(t).unwrap());
    let fs = sample_fiber(&b, &rs, 1, &[1.0], 400, 2).unwrap();
    let iv = refine_value_interval(&fs, &b, 4).unwrap();
    assert!(iv.lo.abs() < 1e-9 && (iv.hi - 0.25).abs() < 1e-9, "{iv:?}");
    assert!(iv.max_gap < 0.05);
}

#[test]
fn basis_file_detects_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("H3.json");
    let b = basic_invariants(ty("H3")).unwrap();
    write_basis_file(&path, &b).unwrap();
    assert_eq!(load_basis_file(&path, ty("H3")).unwrap().polys(), b.polys());
    assert!(matches!(load_basis_file(&path, ty("B3")), Err(Error::Integrity(_))));
    let text = std::fs::read_to_string(&path).unwrap();
    let tampered = text.replacen("\"a\":\"1/1\"", "\"a\":\"2/1\"", 1);
    assert_ne!(tampered, text);
    std::fs::write(&path, tampered).unwrap();
    assert!(matches!(load_basis_file(&path, ty("H3")), Err(Error::Integrity(_))));
}
