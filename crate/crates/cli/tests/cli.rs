use std::path::Path;
use std::process::{Command, Output};

fn tancurve(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tancurve"))
        .args(args)
        .output()
        .expect("running tancurve")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write_scene(dir: &Path, text: &str) -> String {
    let path = dir.join("scene.toml");
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn column(csv: &str, name: &str) -> Vec<f64> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let i = header.iter().position(|h| *h == name).unwrap();
    lines.map(|l| l.split(',').nth(i).unwrap().parse().unwrap()).collect()
}

#[test]
fn forms_on_the_cone() {
    let o = tancurve(&["forms", "cone", "0", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert_eq!(column(&out, "E"), vec![1.0]);
    assert_eq!(column(&out, "F"), vec![0.0]);
    assert_eq!(column(&out, "G"), vec![2.0]);
    assert_eq!(column(&out, "Gamma1_12"), vec![1.0]);
}

#[test]
fn unknown_surface_is_a_load_error() {
    let o = tancurve(&["forms", "nope", "0", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("surface not found: nope"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(tancurve(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(tancurve(&["--config", "/nonexistent/scene.toml", "verify"]).status.code(), Some(1));
}

#[test]
fn offset_circle_trace_closes_at_constant_rho() {
    let o = tancurve(&["trace", "offset_circle"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let rho = column(&out, "rho");
    assert!(rho.len() > 100);
    for r in rho {
        assert!((r - 3.0).abs() < 1e-6, "rho = {r}");
    }
    for g in column(&out, "g") {
        assert!(g.abs() < 1e-9);
    }

    let o = tancurve(&["trace", "offset_circle", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["status"], "closed");
    let length = v["length"].as_f64().unwrap();
    let exact = 2.0 * std::f64::consts::PI * (3.0f64).sqrt() / 2.0;
    assert!((length - exact).abs() < 1e-6, "length {length}");
}

#[test]
fn sphere_about_the_origin_has_no_locus() {
    let o = tancurve(&["trace", "--surface", "unit_sphere", "--seed", "1,0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("no tangent-position locus"));
}

#[test]
fn paraboloid_vertex_is_singular() {
    let o = tancurve(&["trace", "--surface", "paraboloid", "--seed", "0.3,-0.2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("singular locus"), "{}", stderr(&o));
}

#[test]
fn builtin_verification_passes() {
    for target in ["gauss", "thm31", "thm32"] {
        let o = tancurve(&["verify", target]);
        assert_eq!(o.status.code(), Some(0), "{target}: {}", stdout(&o));
    }
    let o = tancurve(&["verify", "thm32"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let checks = v["checks"].as_array().unwrap();
    let status = |name: &str| {
        checks
            .iter()
            .find(|c| c["name"] == name)
            .unwrap_or_else(|| panic!("missing check {name}"))["status"]
            .as_str()
            .unwrap()
            .to_string()
    };
    assert_eq!(status("kappa_g_invariance/plane_cylinder/plane_circle"), "pass");
    assert_eq!(
        status("tangent_position_preserved/plane_cylinder/plane_circle"),
        "empirical: fails"
    );
    assert_eq!(status("rho_invariance/offset_turn/offset_circle"), "pass");
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["report-thm31", "catenoid_wave", "--samples", "7"][..],
        &["isometry", "catenoid_helicoid", "--samples", "5"][..],
    ] {
        let a = tancurve(args);
        let b = tancurve(args);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn out_directory_receives_reports_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("reports");
    let o = tancurve(&["trace", "offset_circle", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let svg = std::fs::read_to_string(out.join("trace_offset_circle.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(out.join("trace_offset_circle.csv").exists());
}

#[test]
fn config_errors_carry_file_and_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scene(
        dir.path(),
        "[surface.bad]\nexpr = \"(u, v, w)\"\nu = [0, 1]\nv = [0, 1]\n",
    );
    let o = tancurve(&["--config", &path, "verify"]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("scene.toml:"), "{err}");
    assert!(err.contains('w'), "{err}");
}

#[test]
fn failed_asserted_check_exits_three() {
    // a translation declared as rigid and origin fixing: metric matches, rho does not
    let dir = tempfile::tempdir().unwrap();
    let path = write_scene(
        dir.path(),
        r#"
[surface.low]
expr = "(u, v, 1)"
u = [-2.0, 2.0]
v = [-2.0, 2.0]

[surface.high]
expr = "(u, v, 3)"
u = [-2.0, 2.0]
v = [-2.0, 2.0]

[curve.circle]
surface = "low"
expr = "(cos(t), sin(t))"
t = [0.0, "2*pi"]

[pair.shift]
source = "low"
target = "high"
kind = "rigid-origin-fixing"
curves = ["circle"]
"#,
    );
    let o = tancurve(&["--config", &path, "verify", "thm32"]);
    assert_eq!(o.status.code(), Some(3), "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).contains("\"fail\""));
}
