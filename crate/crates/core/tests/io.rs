use porous_channel::bvp::{solve_branch, BranchSolveOptions};
use porous_channel::io::{read_profile, write_profile, Format};
use porous_channel::model::{BranchLabel, ProblemSpec};

#[test]
fn profile_round_trip_is_exact() {
    let spec = ProblemSpec::new(100.0, 0.8).unwrap();
    let p = solve_branch(spec, BranchLabel::TypeII, &BranchSolveOptions::default()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    write_profile(&p, dir.path(), "p", Format::Csv).unwrap();
    let q = read_profile(&dir.path().join("p.csv"), &dir.path().join("p.json")).unwrap();
    assert_eq!(q.mesh(), p.mesh());
    assert_eq!(q.f(), p.f());
    assert_eq!(q.fp(), p.fp());
    assert_eq!(q.fpp(), p.fpp());
    assert_eq!(q.k(), p.k());
    assert_eq!(q.label(), p.label());
    assert_eq!(q.reynolds(), 100.0);

    write_profile(&p, dir.path(), "j", Format::Json).unwrap();
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("j.json")).unwrap()).unwrap();
    assert_eq!(v["label"], "TypeII");
    assert_eq!(v["nodes"].as_array().unwrap().len(), p.len());
}

#[test]
fn malformed_csv_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let meta = dir.path().join("m.json");
    std::fs::write(
        &meta,
        r#"{"R":1.0,"a":0.5,"K":0.0,"label":"TypeI","mesh_size":2}"#,
    )
    .unwrap();
    let csv = dir.path().join("m.csv");
    std::fs::write(&csv, "y,f\n-1,0.5\n").unwrap();
    assert!(read_profile(&csv, &meta).is_err());
    std::fs::write(&csv, "y,f,fp,fpp,fppp\n-1,0.5,0,x,0\n").unwrap();
    assert!(read_profile(&csv, &meta).is_err());
}
