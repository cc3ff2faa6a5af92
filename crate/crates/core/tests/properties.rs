use nalgebra::Rotation3;
use proptest::prelude::*;

use polyreal::basic_region::{clip_surface, euler_basic_check, fundamental_region, lemma_multiplicity_check};
use polyreal::catalog;
use polyreal::combinatorics::{canonical_form, euler_check, incidence_structure};
use polyreal::geometry::{center_at_centroid, convex_hull, load_off, to_off, Point, Polyhedron};
use polyreal::realization::realization_report;
use polyreal::symmetry::{orbits, symmetry_group, symmetry_type_dimension, SYMMETRY_TOL};

fn point() -> impl Strategy<Value = Point> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64).prop_map(|(x, y, z)| Point::new(x, y, z))
}

fn hull() -> impl Strategy<Value = Polyhedron> {
    prop::collection::vec(point(), 8..24)
        .prop_filter_map("degenerate sample", |pts| convex_hull(&pts).ok().and_then(|p| center_at_centroid(&p).ok()))
}

fn relabeled(p: &Polyhedron, shift: usize) -> Polyhedron {
    let r = p.num_vertices();
    let perm: Vec<usize> = (0..r).map(|i| (2 * r - 1 - i + shift) % r).collect();
    let mut verts = vec![Point::zeros(); r];
    for (i, &to) in perm.iter().enumerate() {
        verts[to] = p.vertices()[i];
    }
    let faces = p.faces().iter().map(|f| f.iter().map(|&i| perm[i]).collect()).collect();
    Polyhedron::new(verts, faces).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_hulls_have_full_rank(p in hull()) {
        let inc = incidence_structure(&p).unwrap();
        prop_assert!(euler_check(&inc));
        prop_assert_eq!(inc.mu(), 2 * inc.num_edges());
        let r = realization_report(&p).unwrap();
        prop_assert!(r.full_rank);
        prop_assert_eq!(r.dim_mod_sim, inc.num_edges() as i64 - 1);
    }

    #[test]
    fn canonical_form_ignores_labels_and_rotation(p in hull(), a in -3.0..3.0f64, b in -1.5..1.5f64, shift in 0usize..50) {
        let code = canonical_form(&incidence_structure(&p).unwrap()).unwrap();
        let rot = Rotation3::from_euler_angles(a, b, 0.5 * a).into_inner();
        let moved = relabeled(&p.transformed(&rot, &Point::zeros()), shift);
        prop_assert_eq!(canonical_form(&incidence_structure(&moved).unwrap()).unwrap(), code);
    }

    #[test]
    fn off_round_trip(p in hull()) {
        let q = load_off(&to_off(&p)).unwrap();
        prop_assert_eq!(q.vertices(), p.vertices());
        prop_assert_eq!(q.num_faces(), p.num_faces());
    }

    #[test]
    fn symmetry_survives_rotation(pick in 0usize..6, a in -3.0..3.0f64, b in -1.5..1.5f64) {
        let p = match pick {
            0 => catalog::cube(),
            1 => catalog::tetrahedron(),
            2 => catalog::prism(5),
            3 => catalog::pyramid(3, 0.6),
            4 => catalog::antiprism(4),
            _ => catalog::rhombic_dodecahedron(),
        };
        let rot = Rotation3::from_euler_angles(a, b, -a).into_inner();
        let q = p.transformed(&rot, &Point::zeros());
        let (gp, gq) = (symmetry_group(&p, SYMMETRY_TOL).unwrap(), symmetry_group(&q, SYMMETRY_TOL).unwrap());
        prop_assert_eq!(gp.order(), gq.order());
        prop_assert_eq!(gp.classification(), gq.classification());
        prop_assert_eq!(orbits(&p, &gp).unwrap().epsilon, orbits(&q, &gq).unwrap().epsilon);
    }

    #[test]
    fn pyramid_and_prism_regions(q in 3usize..9, zeta in 0.2..5.0f64, prism in any::<bool>()) {
        let p = if prism { catalog::prism(q) } else { catalog::pyramid(q, zeta) };
        let g = symmetry_group(&p, SYMMETRY_TOL).unwrap();
        let b = clip_surface(&p, &fundamental_region(&g).unwrap()).unwrap();
        prop_assert!(euler_basic_check(&b));
        prop_assert!(lemma_multiplicity_check(&b).equality);
        prop_assert!((b.area * g.order() as f64 - p.surface_area()).abs() < 1e-9 * p.surface_area());
        let st = symmetry_type_dimension(&p, &g).unwrap();
        prop_assert!(st.theorem_holds);
        prop_assert_eq!(b.real_edges().count(), st.epsilon);
    }
}
