use porous_channel::bvp::{solve_branch, solve_bvp, BranchSolveOptions};
use porous_channel::model::{uniform_mesh, BranchLabel, ProblemSpec, Profile};
use porous_channel::shooter::{solve_for_target, ShootOptions};

/// `f = a + (1 - a)(2 + 3y - y^3)/4`, worked out by hand from the linear
/// problem `f''' = K`.
fn stokes(a: f64, y: f64) -> [f64; 3] {
    let c = 0.25 * (1.0 - a);
    [
        a + c * (2.0 + 3.0 * y - y.powi(3)),
        c * (3.0 - 3.0 * y * y),
        -6.0 * c * y,
    ]
}

#[test]
fn collocation_matches_shooting_on_every_branch() {
    for r in [40.0, 100.0] {
        for label in [
            BranchLabel::TypeI,
            BranchLabel::TypeII,
            BranchLabel::TypeIII,
        ] {
            let spec = ProblemSpec::new(r, 0.8).unwrap();
            let c = solve_branch(spec, label, &BranchSolveOptions::default()).unwrap();
            let s = solve_for_target(0.8, r, label, &ShootOptions::default()).unwrap();
            assert_eq!(c.label(), label);
            assert_eq!(s.profile.label(), label);
            let d = c.max_f_distance(&s.profile);
            assert!(d < 1e-5, "R = {r}, {label}: {d:e}");
            let k_rel = (c.k() - s.profile.k()).abs() / c.k().abs();
            assert!(k_rel < 1e-6, "R = {r}, {label}: K differs by {k_rel:e}");
        }
    }
}

#[test]
fn vanishing_reynolds_gives_the_stokes_cubic() {
    for a in [0.2, 0.8] {
        let spec = ProblemSpec::new(1e-9, a).unwrap();
        let p = solve_branch(spec, BranchLabel::TypeI, &BranchSolveOptions::default()).unwrap();
        for i in 0..=40 {
            let y = -1.0 + i as f64 / 20.0;
            let v = p.eval(y);
            let e = stokes(a, y);
            for c in 0..3 {
                assert!(
                    (v[c] - e[c]).abs() < 1e-8,
                    "a = {a}, y = {y}, derivative {c}"
                );
            }
        }
        assert!((p.k() + 1.5 * (1.0 - a)).abs() < 1e-8);
    }
}

#[test]
fn uniform_injection_gives_the_constant_profile() {
    for r in [0.5, 7.0, 60.0] {
        let spec = ProblemSpec::new(r, 1.0).unwrap();
        let p = solve_branch(spec, BranchLabel::TypeI, &BranchSolveOptions::default()).unwrap();
        assert!(p.f().iter().all(|v| (v - 1.0).abs() < 1e-10));
        assert!(p.k().abs() < 1e-10);
        // the collocation solver itself keeps f = 1 from a perturbed start
        let mesh = uniform_mesh(40);
        let g = Profile::from_ode(
            spec,
            mesh.clone(),
            mesh.iter().map(|y| 1.0 + 0.01 * (1.0 - y * y)).collect(),
            mesh.iter().map(|y| -0.02 * y).collect(),
            vec![-0.02; mesh.len()],
            0.0,
            BranchLabel::TypeI,
        )
        .unwrap();
        let q = solve_bvp(spec, &g, 1e-10).unwrap();
        assert!(q.f().iter().all(|v| (v - 1.0).abs() < 1e-10), "R = {r}");
        assert!(q.k().abs() < 1e-10);
    }
}

#[test]
fn no_type_two_below_the_fold() {
    let spec = ProblemSpec::new(5.0, 0.8).unwrap();
    assert!(solve_branch(spec, BranchLabel::TypeII, &BranchSolveOptions::default()).is_err());
    assert!(solve_for_target(0.8, 5.0, BranchLabel::TypeII, &ShootOptions::default()).is_err());
}
