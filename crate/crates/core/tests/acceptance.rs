//! One PASS/FAIL line per acceptance criterion. The reference values are
//! typed in here from the published tables rather than shared with the
//! library. Always exits 0; the verdicts are the output.

use std::f64::consts::PI;
use std::time::Instant;

use porous_channel::asymptotics::{
    default_layer_length, estimate_beta, solve_layer, type_i_eval, type_ii_deltas,
    type_iii_composite, type_iii_layer,
};
use porous_channel::bvp::{
    count_solutions, discover_branches, find_fold, solve_branch, turning_points,
    BranchSolveOptions, DiscoverOptions,
};
use porous_channel::flowfield::{divergence_check, FlowGeometry};
use porous_channel::model::{BranchLabel, ProblemSpec, Profile};
use porous_channel::shooter::{integrate_g, scan, solve_for_target, ScanConfig, ShootOptions};
use porous_channel::terrill::{terrill_forward, terrill_inverse};

type Outcome = (bool, String);

fn solve(r: f64, a: f64, label: BranchLabel) -> Result<Profile, String> {
    let spec = ProblemSpec::new(r, a).map_err(|e| e.to_string())?;
    solve_branch(spec, label, &BranchSolveOptions::default()).map_err(|e| e.to_string())
}

fn criterion_1() -> Outcome {
    let branches = match discover_branches(0.8, (0.0, 130.0), &DiscoverOptions::default()) {
        Ok(b) => b,
        Err(e) => return (false, format!("continuation failed: {e}")),
    };
    let fold = branches.iter().find_map(|b| find_fold(b).ok());
    let Some(fold) = fold else {
        return (false, "no fold found".into());
    };
    let mut bad = vec![];
    for r in (1..=13).map(f64::from) {
        let n = count_solutions(&branches, r);
        if n != 1 {
            bad.push(format!("{n} solutions at R = {r}"));
        }
    }
    for r in (15..=130).step_by(5).map(f64::from) {
        let n = count_solutions(&branches, r);
        if n != 3 {
            bad.push(format!("{n} solutions at R = {r}"));
        }
    }
    let ok = (fold.r - 14.10).abs() <= 0.10 && bad.is_empty();
    let mut detail = format!("fold at R = {:.4}", fold.r);
    if !bad.is_empty() {
        detail += &format!("; {}", bad.join(", "));
    }
    (ok, detail)
}

const TYPE_I_Y: [f64; 11] = [-1.0, -0.8, -0.6, -0.4, -0.2, 0.0, 0.2, 0.4, 0.6, 0.8, 1.0];

fn criterion_2() -> Outcome {
    let numeric = [
        (
            100.0,
            [
                0.0, 0.1780, 0.1603, 0.1417, 0.1226, 0.1031, 0.0829, 0.0625, 0.0418, 0.0209, 0.0,
            ],
        ),
        (
            200.0,
            [
                0.0, 0.1771, 0.1593, 0.1409, 0.1219, 0.1023, 0.0824, 0.0621, 0.0416, 0.0208, 0.0,
            ],
        ),
        (
            300.0,
            [
                0.0, 0.1768, 0.1590, 0.1406, 0.1217, 0.1022, 0.0823, 0.0620, 0.0415, 0.0208, 0.0,
            ],
        ),
    ];
    let asymptotic = [
        (
            100.0,
            [
                0.0, 0.1781, 0.1603, 0.1417, 0.1226, 0.1030, 0.0829, 0.0625, 0.0418, 0.0209, 0.0,
            ],
        ),
        (
            200.0,
            [
                0.0, 0.1771, 0.1593, 0.1409, 0.1219, 0.1023, 0.0824, 0.0621, 0.0416, 0.0208, 0.0,
            ],
        ),
        (
            300.0,
            [
                0.0, 0.1768, 0.1590, 0.1406, 0.1217, 0.1022, 0.0823, 0.0620, 0.0415, 0.0208, 0.0,
            ],
        ),
    ];
    let tol = 5e-4;
    let mut misses = vec![];
    let (mut worst_num, mut worst_asym) = (0.0_f64, 0.0_f64);
    for (r, row) in numeric {
        match solve(r, 0.8, BranchLabel::TypeI) {
            Ok(p) => {
                for (y, v) in TYPE_I_Y.iter().zip(row) {
                    let e = (p.eval(*y)[1] - v).abs();
                    worst_num = worst_num.max(e);
                    if e > tol {
                        misses.push(format!("numeric R={r} y={y}: {e:.1e}"));
                    }
                }
            }
            Err(e) => misses.push(format!("numeric R={r}: {e}")),
        }
    }
    for (r, row) in asymptotic {
        for (y, v) in TYPE_I_Y.iter().zip(row) {
            match type_i_eval(*y, 0.8, 1.0 / r) {
                Ok((_, fp)) => {
                    let e = (fp - v).abs();
                    worst_asym = worst_asym.max(e);
                    if e > tol {
                        misses.push(format!("asymptotic R={r} y={y}: {e:.1e}"));
                    }
                }
                Err(e) => misses.push(format!("asymptotic R={r} y={y}: {e}")),
            }
        }
    }
    let mut detail = format!("max error numeric {worst_num:.1e}, asymptotic {worst_asym:.1e}");
    if !misses.is_empty() {
        detail += &format!("; out of tolerance: {}", misses.join(", "));
        detail += "; the first-order composite only meets f'(-1) = 0 to O(eps)";
    }
    (misses.is_empty(), detail)
}

fn criterion_3() -> Outcome {
    let rs = [100.0, 200.0, 400.0, 600.0, 800.0];
    let num_ref = [
        (-0.7449, 0.5457),
        (-0.8263, 0.6753),
        (-0.8914, 0.7868),
        (-0.9203, 0.8483),
        (-0.9363, 0.8783),
    ];
    let asym_ref = [
        (-0.7315, 0.4728),
        (-0.8227, 0.6519),
        (-0.8921, 0.7959),
        (-0.9202, 0.8434),
        (-0.9363, 0.8750),
    ];
    let tol = 2e-3;
    let mut misses = vec![];
    let mut gaps = vec![];
    for (k, &r) in rs.iter().enumerate() {
        let num = solve(r, 0.8, BranchLabel::TypeII)
            .and_then(|p| turning_points(&p).map_err(|e| e.to_string()));
        let asym = type_ii_deltas(0.8, 1.0 / r).map_err(|e| e.to_string());
        match &num {
            Ok(t) => {
                for (name, got, want) in [("y1", t.y1, num_ref[k].0), ("y2", t.y2, num_ref[k].1)] {
                    if (got - want).abs() > tol {
                        misses.push(format!("numeric {name} R={r}: {got:.4} vs {want:.4}"));
                    }
                }
            }
            Err(e) => misses.push(format!("numeric R={r}: {e}")),
        }
        match &asym {
            Ok(d) => {
                for (name, got, want) in
                    [("y1", d.y1(), asym_ref[k].0), ("y2", d.y2(), asym_ref[k].1)]
                {
                    if (got - want).abs() > tol {
                        misses.push(format!("asymptotic {name} R={r}: {got:.4} vs {want:.4}"));
                    }
                }
            }
            Err(e) => misses.push(format!("asymptotic R={r}: {e}")),
        }
        if let (Ok(t), Ok(d)) = (num, asym) {
            if r >= 200.0 {
                let g1 = ((t.y1 + 1.0) - (d.y1() + 1.0)).abs() / (t.y1 + 1.0);
                let g2 = ((1.0 - t.y2) - (1.0 - d.y2())).abs() / (1.0 - t.y2);
                gaps.push(g1.max(g2));
            }
        }
    }
    let monotone = gaps.len() == 4 && gaps.windows(2).all(|w| w[1] < w[0]);
    let gap_text: Vec<String> = gaps.iter().map(|g| format!("{g:.4}")).collect();
    let mut detail = format!(
        "relative gap R=200..800: {} ({})",
        gap_text.join(", "),
        if monotone {
            "decreasing"
        } else {
            "not decreasing"
        }
    );
    if !misses.is_empty() {
        detail += &format!("; out of tolerance: {}", misses.join(", "));
    }
    (misses.is_empty() && monotone, detail)
}

fn criterion_4() -> Outcome {
    let ys = [-1.0, -0.6, -0.4, -0.2, 0.0, 0.2, 0.4, 0.6, 0.8, 1.0];
    let cases = [
        (
            0.652,
            [
                0.6520, 0.3489, 0.4866, 0.6131, 0.7255, 0.8212, 0.8981, 0.9543, 0.9885, 1.0,
            ],
            [
                0.6520, 0.3462, 0.4838, 0.6103, 0.7228, 0.8187, 0.8959, 0.9526, 0.9875, 1.0,
            ],
        ),
        (
            0.748,
            [
                0.7480, 0.3590, 0.4948, 0.6194, 0.7301, 0.8242, 0.8998, 0.9550, 0.9887, 1.0,
            ],
            [
                0.7480, 0.3516, 0.4880, 0.6133, 0.7246, 0.8196, 0.8960, 0.9523, 0.9872, 1.0,
            ],
        ),
        (
            0.876,
            [
                0.8760, 0.3711, 0.5047, 0.6271, 0.7356, 0.8279, 0.9019, 0.9560, 0.9889, 1.0,
            ],
            [
                0.8760, 0.3586, 0.4933, 0.6169, 0.7267, 0.8204, 0.8960, 0.9518, 0.9867, 1.0,
            ],
        ),
    ];
    let (r, tol) = (800.0, 2e-3);
    let eps = 1.0 / r;
    let mut misses = vec![];
    let (mut worst_num, mut worst_asym) = (0.0_f64, 0.0_f64);
    for (a, num, asym) in cases {
        let p = match solve(r, a, BranchLabel::TypeIII) {
            Ok(p) => p,
            Err(e) => {
                misses.push(format!("a={a}: {e}"));
                continue;
            }
        };
        for (y, v) in ys.iter().zip(num) {
            let e = (p.eval(*y)[0] - v).abs();
            worst_num = worst_num.max(e);
            if e > tol {
                misses.push(format!("numeric a={a} y={y}: {e:.1e}"));
            }
        }
        let layer = estimate_beta(&p).map_err(|e| e.to_string()).and_then(|b| {
            solve_layer(b.beta, a, default_layer_length(Some(eps)))
                .map(|l| (b.beta, l))
                .map_err(|e| e.to_string())
        });
        let (beta, layer) = match layer {
            Ok(v) => v,
            Err(e) => {
                misses.push(format!("composite a={a}: {e}"));
                continue;
            }
        };
        for (y, v) in ys.iter().zip(asym) {
            match type_iii_composite(*y, a, eps, beta, &layer) {
                Ok((f, _)) => {
                    let e = (f - v).abs();
                    worst_asym = worst_asym.max(e);
                    if e > tol {
                        misses.push(format!("composite a={a} y={y}: {e:.1e}"));
                    }
                }
                Err(e) => misses.push(format!("composite a={a} y={y}: {e}")),
            }
        }
    }
    let mut detail = format!("max error numeric {worst_num:.1e}, composite {worst_asym:.1e}");
    if !misses.is_empty() {
        detail += &format!("; {}", misses.join(", "));
    }
    (misses.is_empty(), detail)
}

fn criterion_5() -> Outcome {
    let table = [
        (0.3, 0.0079),
        (0.4, 0.0264),
        (0.5, 0.0417),
        (0.6, 0.0551),
        (0.7, 0.0672),
        (0.8, 0.0783),
        (0.9, 0.0889),
    ];
    let mut got = vec![];
    let mut misses = vec![];
    let mut worst = 0.0_f64;
    for (a, beta) in table {
        match solve(1500.0, a, BranchLabel::TypeIII)
            .and_then(|p| estimate_beta(&p).map_err(|e| e.to_string()))
        {
            Ok(b) => {
                let e = (b.beta - beta).abs();
                worst = worst.max(e);
                if e > 3e-3 {
                    misses.push(format!("a={a}: {:.4} vs {beta}", b.beta));
                }
                got.push(b.beta);
            }
            Err(e) => misses.push(format!("a={a}: {e}")),
        }
    }
    let monotone = got.len() == 7 && got.windows(2).all(|w| w[1] > w[0]);
    let mut detail = format!(
        "max error {worst:.1e}, {}",
        if monotone {
            "increasing in a"
        } else {
            "not increasing in a"
        }
    );
    if !misses.is_empty() {
        detail += &format!("; {}", misses.join(", "));
    }
    (misses.is_empty() && monotone, detail)
}

fn criterion_6() -> Outcome {
    let mut worst = 0.0_f64;
    let mut misses = vec![];
    let mut n = 0;
    for r in [40.0, 100.0] {
        for label in [
            BranchLabel::TypeI,
            BranchLabel::TypeII,
            BranchLabel::TypeIII,
        ] {
            let c = solve(r, 0.8, label);
            let s = solve_for_target(0.8, r, label, &ShootOptions::default());
            match (c, s) {
                (Ok(c), Ok(s)) => {
                    let d = c.max_f_distance(&s.profile);
                    worst = worst.max(d);
                    n += 1;
                    if d > 1e-5 {
                        misses.push(format!("R={r} {label}: {d:.1e}"));
                    }
                }
                (Err(e), _) => misses.push(format!("R={r} {label} collocation: {e}")),
                (_, Err(e)) => misses.push(format!("R={r} {label} shooting: {e}")),
            }
        }
    }
    let mut detail = format!("{n} branch solutions, max |f_colloc - f_shoot| = {worst:.1e}");
    if !misses.is_empty() {
        detail += &format!("; {}", misses.join(", "));
    }
    (misses.is_empty(), detail)
}

fn criterion_7() -> Outcome {
    let mut stokes_err = 0.0_f64;
    let mut misses = vec![];
    for a in [0.1, 0.5, 0.8] {
        match solve(1e-9, a, BranchLabel::TypeI) {
            Ok(p) => {
                let c = 0.25 * (1.0 - a);
                for i in 0..=40 {
                    let y = -1.0 + f64::from(i) / 20.0;
                    let f = a + c * (2.0 + 3.0 * y - y.powi(3));
                    stokes_err = stokes_err.max((p.eval(y)[0] - f).abs());
                }
                stokes_err = stokes_err.max((p.k() + 1.5 * (1.0 - a)).abs());
            }
            Err(e) => misses.push(format!("a={a}: {e}")),
        }
    }
    let mut uniform_err = 0.0_f64;
    for r in [0.5, 10.0, 100.0, 500.0] {
        match solve(r, 1.0, BranchLabel::TypeI) {
            Ok(p) => {
                let e = p
                    .f()
                    .iter()
                    .fold(p.k().abs(), |m, f| m.max((f - 1.0).abs()));
                uniform_err = uniform_err.max(e);
            }
            Err(e) => misses.push(format!("a=1 R={r}: {e}")),
        }
    }
    let ok = misses.is_empty() && stokes_err <= 1e-8 && uniform_err <= 1e-10;
    let mut detail = format!("Stokes error {stokes_err:.1e}, a = 1 error {uniform_err:.1e}");
    if !misses.is_empty() {
        detail += &format!("; {}", misses.join(", "));
    }
    (ok, detail)
}

/// Fixed sample points in [0, 1) from a Weyl sequence.
fn weyl(n: usize, k: usize) -> f64 {
    let alpha = [
        0.754_877_666_246_692_8,
        0.569_840_290_998_053_2,
        0.430_159_709_001_946_8,
    ];
    (n as f64 * alpha[k % 3]).fract()
}

fn criterion_8() -> Outcome {
    let mut parts: Vec<(&str, bool, String)> = vec![];

    let mut k_worst = 0.0_f64;
    let mut profiles = vec![];
    for label in [
        BranchLabel::TypeI,
        BranchLabel::TypeII,
        BranchLabel::TypeIII,
    ] {
        if let Ok(p) = solve(100.0, 0.8, label) {
            k_worst = k_worst.max(p.k_residual() / p.k().abs().max(1.0));
            profiles.push(p);
        }
    }
    parts.push((
        "K constancy",
        profiles.len() == 3 && k_worst <= 1e-8,
        format!("{k_worst:.1e}"),
    ));

    let mut rt = 0.0_f64;
    let mut rt_ok = true;
    for p in &profiles {
        for b in [0.5, 2.0, 7.0] {
            let back = terrill_forward(p, b).and_then(|t| terrill_inverse(&t, b));
            match back {
                Ok((r, a, q)) => {
                    rt = rt
                        .max((r - p.reynolds()).abs() / p.reynolds())
                        .max((a - p.a()).abs());
                    for (i, y) in p.mesh().iter().enumerate() {
                        let v = q.eval(*y);
                        rt = rt
                            .max((v[0] - p.f()[i]).abs())
                            .max((v[1] - p.fp()[i]).abs())
                            .max((v[2] - p.fpp()[i]).abs());
                    }
                }
                Err(_) => rt_ok = false,
            }
        }
    }
    parts.push((
        "Terrill round trip",
        rt_ok && rt <= 1e-12,
        format!("{rt:.1e}"),
    ));

    let mut sc = 0.0_f64;
    let mut sc_ok = true;
    for n in 1..=24 {
        let (a0, b0) = (weyl(n, 0) - 0.5, weyl(n, 1) - 0.5);
        let lambda = 0.5 + 1.5 * weyl(n, 2);
        let xi = 3.0;
        let l3 = lambda.powi(3);
        let g = integrate_g(a0, b0, 1.0, xi, 1e-13);
        let h = integrate_g(l3 * a0, l3 * lambda * b0, lambda, xi / lambda, 1e-13);
        let (Ok(g), Ok(h)) = (g, h) else {
            sc_ok = false;
            continue;
        };
        for j in 0..=10 {
            let s = xi / lambda * f64::from(j) / 10.0;
            let (u, w) = (h.eval(s), g.eval(lambda * s));
            sc = sc
                .max((u.g - lambda * w.g).abs())
                .max((u.gp - lambda * lambda * w.gp).abs())
                .max((u.gpp - l3 * w.gpp).abs());
        }
    }
    parts.push(("lambda scaling", sc_ok && sc <= 1e-8, format!("{sc:.1e}")));

    let mut forbidden = 0;
    for (a_range, b_range) in [((0.05, 2.0), (0.05, 2.0)), ((-2.0, -0.05), (-2.0, -0.05))] {
        let cfg = ScanConfig {
            a_range,
            b_range,
            n_a: 10,
            n_b: 10,
            ..Default::default()
        };
        forbidden += scan(&cfg).iter().map(|r| r.admissible_roots).sum::<usize>();
    }
    parts.push((
        "quadrant scan",
        forbidden == 0,
        format!("{forbidden} admissible roots"),
    ));

    // the tabulated core value for a = 0.8 at the default truncation, and a
    // smaller one whose layer needs a longer domain to reach zero
    let layer = |beta: f64, length: f64| match type_iii_layer(beta, 0.8, length) {
        Ok(_) => (true, format!("beta = {beta}, L = {length}: holds")),
        Err(e) => (false, format!("beta = {beta}, L = {length}: {e}")),
    };
    let (ok_tab, msg_tab) = layer(0.0783, 100.0);
    let (ok_small, msg_small) = layer(0.04, 400.0);
    parts.push((
        "layer decay and convexity",
        ok_tab && ok_small,
        format!("{msg_tab}; {msg_small}"),
    ));

    let mut ratio = 0.0_f64;
    for a in [0.5, 0.6, 0.7, 0.8, 0.9, 0.95] {
        for r in [200.0, 800.0, 3000.0] {
            match type_ii_deltas(a, 1.0 / r) {
                Ok(d) => ratio = ratio.max((d.delta2 / d.delta1 - PI / (2.0 * a)).abs()),
                Err(_) => ratio = f64::INFINITY,
            }
        }
    }
    parts.push((
        "turning point ratio",
        ratio <= 1e-12,
        format!("{ratio:.1e}"),
    ));

    let geo = FlowGeometry::default();
    let mut div = 0.0_f64;
    for p in &profiles {
        div = div.max(divergence_check(p, &geo, 21).unwrap_or(f64::INFINITY));
    }
    parts.push((
        "continuity",
        profiles.len() == 3 && div <= 1e-6,
        format!("{div:.1e}"),
    ));

    let ok = parts.iter().all(|p| p.1);
    let detail = parts
        .iter()
        .map(|(name, pass, d)| format!("{name} {} ({d})", if *pass { "ok" } else { "FAILS" }))
        .collect::<Vec<_>>()
        .join("; ");
    (ok, detail)
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("fold location and solution counts", criterion_1),
        ("type I profiles", criterion_2),
        ("type II turning points", criterion_3),
        ("type III profiles", criterion_4),
        ("core values beta", criterion_5),
        ("collocation against shooting", criterion_6),
        ("analytic limits", criterion_7),
        ("invariant suites", criterion_8),
    ];
    let start = Instant::now();
    let mut passed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let (ok, detail) = f();
        passed += usize::from(ok);
        println!(
            "criterion {} {}: {name} [{:.1} s] {detail}",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64()
        );
    }
    println!(
        "{passed} of {} criteria passed in {:.1} s",
        criteria.len(),
        start.elapsed().as_secs_f64()
    );
}
