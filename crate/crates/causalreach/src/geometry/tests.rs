use rand::Rng;

use super::*;
use crate::registry;

fn entry(name: &str) -> SubSpaceTime {
    registry::get_structure(name).unwrap().structure
}

#[test]
fn classify_heisenberg_vectors() {
    let st = entry("heisenberg");
    let p = [0.0, 0.0, 0.0];
    let t = classify_vector(&st, &p, &[1.0, 0.0]).unwrap();
    assert_eq!(t.character, Character::Timelike);
    assert_eq!(t.orientation, Orientation::Future);

    let n = classify_vector(&st, &p, &[1.0, 1.0]).unwrap();
    assert_eq!(n.character, Character::Null);
    assert_eq!(n.orientation, Orientation::Future);

    let s = classify_vector(&st, &p, &[0.0, 1.0]).unwrap();
    assert_eq!(s.character, Character::Spacelike);
    assert_eq!(s.orientation, Orientation::Unoriented);
}

#[test]
fn zero_vector_is_spacelike_unoriented() {
    for name in registry::names() {
        let st = entry(name);
        let p = vec![0.1; st.dim()];
        let u = vec![0.0; st.rank()];
        let c = classify_vector(&st, &p, &u).unwrap();
        assert_eq!(c.character, Character::Spacelike, "{name}");
        assert_eq!(c.orientation, Orientation::Unoriented, "{name}");
    }
}

#[test]
fn classify_rejects_outside_domain() {
    let st = entry("heisenberg");
    let err = classify_vector(&st, &[5.0, 0.0, 0.0], &[1.0, 0.0]).unwrap_err();
    assert!(matches!(err, crate::Error::OutsideDomain { .. }));
}

#[test]
fn negation_flips_orientation() {
    let st = entry("varmetric");
    let mut rng = crate::rng::stream(11, 0);
    let mut p = vec![0.0; 3];
    for _ in 0..200 {
        st.domain().sample(&mut rng, &mut p);
        let u = [1.0 + rng.gen_range(0.0..1.0), rng.gen_range(-1.0..1.0)];
        let nu = [-u[0], -u[1]];
        let a = classify_vector(&st, &p, &u).unwrap();
        let b = classify_vector(&st, &p, &nu).unwrap();
        assert_eq!(a.character, b.character);
        let ok = matches!(
            (a.orientation, b.orientation),
            (Orientation::Unoriented, Orientation::Unoriented)
                | (Orientation::Future, Orientation::Past)
                | (Orientation::Past, Orientation::Future)
        );
        assert!(ok, "orientations {:?} {:?}", a.orientation, b.orientation);
    }
}

#[test]
fn orthonormal_frame_identity_cases() {
    for name in ["heisenberg", "minkowski2", "martinet"] {
        let st = entry(name);
        let p = vec![0.3; st.dim()];
        let f = orthonormal_frame(&st, &p).unwrap();
        let k = st.rank();
        for r in 0..k {
            for c in 0..k {
                let expect = if r == c { 1.0 } else { 0.0 };
                assert!(
                    (f.transform[(r, c)] - expect).abs() < 1e-12,
                    "{name}: transform not identity"
                );
            }
        }
    }
}

#[test]
fn orthonormal_frame_varmetric() {
    let st = entry("varmetric");
    let p = [0.0, 0.2, 0.0];
    let f = orthonormal_frame(&st, &p).unwrap();
    let k = 2;
    let mut g = vec![0.0; 4];
    st.geometry().metric(&p, &mut g);
    let gm = nalgebra::DMatrix::from_row_slice(k, k, &g);
    let res = f.transform.transpose() * gm * &f.transform;
    assert!((res[(0, 0)] + 1.0).abs() < 1e-12);
    assert!((res[(1, 1)] - 1.0).abs() < 1e-12);
    assert!(res[(0, 1)].abs() < 1e-12);
    assert!(res[(1, 0)].abs() < 1e-12);
}

#[test]
fn orthonormal_frame_is_future_directed() {
    let st = entry("varmetric");
    let mut rng = crate::rng::stream(3, 0);
    let mut p = vec![0.0; 3];
    let mut s = Scratch::for_st(&st);
    for _ in 0..100 {
        st.domain().sample(&mut rng, &mut p);
        let f = orthonormal_frame(&st, &p).unwrap();
        st.geometry().metric(&p, &mut s.metric);
        st.geometry().orientation(&p, &mut s.orient);
        let col0: Vec<f64> = (0..2).map(|r| f.transform[(r, 0)]).collect();
        let gct = metric_product(&s.metric, 2, &col0, &s.orient);
        assert!(gct < 0.0, "column 0 must be future directed");
    }
}

#[test]
fn martinet_double_bracket() {
    let st = entry("martinet");
    // (1/2) [X, [X, T]] at the origin spans the z direction.
    let x = BracketExpr::field(1);
    let t = BracketExpr::field(0);
    let inner = BracketExpr::bracket(x.clone(), t);
    let v = lie_bracket(&st, &x, &inner, &[0.0, 0.0, 0.0]).unwrap();
    assert!((0.5 * v[2] - 1.0).abs() < 1e-8, "got {v:?}");
    assert!(v[0].abs() < 1e-8 && v[1].abs() < 1e-8);
}

#[test]
fn heisenberg_bracket_analytic() {
    let st = entry("heisenberg");
    let v = lie_bracket(
        &st,
        &BracketExpr::field(0),
        &BracketExpr::field(1),
        &[0.7, -0.3, 0.1],
    )
    .unwrap();
    assert_eq!(v, vec![0.0, 0.0, -1.0]);
}

#[test]
fn bracket_antisymmetry_fd() {
    // A user-defined copy of the Heisenberg fields forces the
    // finite-difference code path.
    let st = user_heisenberg();
    let mut rng = crate::rng::stream(5, 0);
    let mut p = vec![0.0; 3];
    for _ in 0..20 {
        AxisBox::cube(3, 1.5).sample(&mut rng, &mut p);
        let ab = lie_bracket(&st, &BracketExpr::field(0), &BracketExpr::field(1), &p).unwrap();
        let ba = lie_bracket(&st, &BracketExpr::field(1), &BracketExpr::field(0), &p).unwrap();
        for i in 0..3 {
            assert!((ab[i] + ba[i]).abs() <= 1e-8);
        }
        assert!((ab[2] + 1.0).abs() < 1e-6, "fd bracket {ab:?}");
    }
}

#[test]
fn self_bracket_vanishes() {
    let st = entry("martinet");
    let v = lie_bracket(
        &st,
        &BracketExpr::field(1),
        &BracketExpr::field(1),
        &[0.5, 0.1, 0.0],
    )
    .unwrap();
    assert!(v.iter().all(|x| x.abs() < 1e-10));
}

#[test]
fn bracket_depth_limit() {
    let st = entry("martinet");
    let x = BracketExpr::field(1);
    let deep = BracketExpr::bracket(
        x.clone(),
        BracketExpr::bracket(x.clone(), BracketExpr::bracket(x.clone(), x.clone())),
    );
    let err = lie_bracket(&st, &x, &deep, &[0.0, 0.0, 0.0]).unwrap_err();
    assert!(matches!(err, crate::Error::BracketTooDeep));
}

#[test]
fn bracket_stencil_near_boundary() {
    let st = entry("martinet");
    let err = lie_bracket(
        &st,
        &BracketExpr::field(0),
        &BracketExpr::field(1),
        &[2.0, 0.0, 0.0],
    )
    .unwrap_err();
    assert!(matches!(err, crate::Error::StencilOutsideDomain { .. }));
}

#[test]
fn two_step_results() {
    let heis = entry("heisenberg");
    assert!(two_step_check(&heis, &[0.0, 0.0, 0.0]).unwrap());
    assert!(two_step_check(&heis, &[0.5, -0.5, 0.2]).unwrap());

    let mart = entry("martinet");
    assert!(!two_step_check(&mart, &[0.0, 0.4, 0.2]).unwrap());
    assert!(two_step_check(&mart, &[1.0, 0.0, 0.0]).unwrap());
}

#[test]
fn extend_metric_heisenberg() {
    let st = entry("heisenberg");
    let ext = extend_metric(&st, 1.0).unwrap();
    let p = [0.0, 0.0, 0.0];
    // d/dz is not horizontal at the origin: spacelike under the extension.
    let dz = [0.0, 0.0, 1.0];
    let v = ext.value(&p, &dz, &dz).unwrap();
    assert!((v - 1.0).abs() < 1e-10);
    // Restricted to the distribution the extension equals g.
    let x_amb = to_ambient(&st, &p, &[1.0, 0.0]).unwrap();
    let v = ext.value(&p, &x_amb, &x_amb).unwrap();
    assert!((v + 1.0).abs() < 1e-10);
    // Index 1 on the whole tangent space.
    let m = ext.eval(&p).unwrap();
    let eig = nalgebra::SymmetricEigen::new(m);
    let neg = eig.eigenvalues.iter().filter(|e| **e < 0.0).count();
    assert_eq!(neg, 1);
}

#[test]
fn extend_metric_full_rank_distribution() {
    let st = entry("minkowski2");
    for lambda in [0.5, 1.0, 10.0] {
        let ext = extend_metric(&st, lambda).unwrap();
        let m = ext.eval(&[0.3, -0.2]).unwrap();
        assert!((m[(0, 0)] + 1.0).abs() < 1e-10);
        assert!((m[(1, 1)] - 1.0).abs() < 1e-10);
        assert!(m[(0, 1)].abs() < 1e-10);
    }
}

#[test]
fn extend_metric_rejects_bad_lambda() {
    let st = entry("heisenberg");
    assert!(extend_metric(&st, 0.0).is_err());
    assert!(extend_metric(&st, -1.0).is_err());
}

#[test]
fn extension_preserves_horizontal_character() {
    let st = entry("varmetric");
    let mut rng = crate::rng::stream(17, 0);
    let mut p = vec![0.0; 3];
    for lambda in [0.5, 1.0, 10.0] {
        let ext = extend_metric(&st, lambda).unwrap();
        for _ in 0..40 {
            st.domain().sample(&mut rng, &mut p);
            let u = [1.0, rng.gen_range(-1.5..1.5)];
            let cls = classify_vector(&st, &p, &u).unwrap();
            let amb = to_ambient(&st, &p, &u).unwrap();
            let g_ext = ext.value(&p, &amb, &amb).unwrap();
            let mut s = Scratch::for_st(&st);
            st.geometry().metric(&p, &mut s.metric);
            let g_sub = metric_product(&s.metric, 2, &u, &u);
            assert!((g_ext - g_sub).abs() < 1e-9);
            match cls.character {
                Character::Timelike => assert!(g_ext < 0.0),
                Character::Spacelike => assert!(g_ext > 0.0),
                Character::Null => assert!(g_ext.abs() < 1e-6),
            }
        }
    }
}

#[test]
fn frame_coordinate_round_trip() {
    let st = entry("heisenberg");
    let p = [0.4, -0.7, 0.2];
    let u = [0.8, -1.3];
    let amb = to_ambient(&st, &p, &u).unwrap();
    let (back, defect) = to_frame_coords(&st, &p, &amb).unwrap();
    assert!(defect < 1e-12);
    assert!((back[0] - u[0]).abs() < 1e-12);
    assert!((back[1] - u[1]).abs() < 1e-12);
}

#[test]
fn user_manifold_loads_and_rejects() {
    let st = user_heisenberg();
    assert_eq!(st.dim(), 3);
    assert_eq!(st.rank(), 2);
    let c = classify_vector(&st, &[0.0; 3], &[1.0, 0.0]).unwrap();
    assert_eq!(c.character, Character::Timelike);

    // A positive-definite metric has no index-1 structure.
    let mut spec = user_heisenberg_spec();
    spec.metric[0][0] = userdef::Coef::Poly(userdef::Poly::constant(1.0, 3));
    let err = userdef::build(spec).unwrap_err();
    assert!(matches!(err, crate::Error::ManifoldDef(_)));
}

fn user_heisenberg_spec() -> userdef::ManifoldSpec {
    use userdef::{Coef, Poly, Term};
    let half_y = Poly {
        terms: vec![Term {
            coef: 0.5,
            powers: vec![0, 1, 0],
        }],
    };
    let minus_half_x = Poly {
        terms: vec![Term {
            coef: -0.5,
            powers: vec![1, 0, 0],
        }],
    };
    userdef::ManifoldSpec {
        name: "user_heisenberg".into(),
        dim: 3,
        rank: 2,
        domain: AxisBox::cube(3, 2.0),
        frame: vec![
            vec![Poly::constant(1.0, 3), Poly::constant(0.0, 3), half_y],
            vec![Poly::constant(0.0, 3), Poly::constant(1.0, 3), minus_half_x],
        ],
        metric: vec![
            vec![
                Coef::Poly(Poly::constant(-1.0, 3)),
                Coef::Poly(Poly::constant(0.0, 3)),
            ],
            vec![
                Coef::Poly(Poly::constant(0.0, 3)),
                Coef::Poly(Poly::constant(1.0, 3)),
            ],
        ],
        orientation: vec![
            Coef::Poly(Poly::constant(1.0, 3)),
            Coef::Poly(Poly::constant(0.0, 3)),
        ],
    }
}

fn user_heisenberg() -> SubSpaceTime {
    userdef::build(user_heisenberg_spec()).unwrap()
}
