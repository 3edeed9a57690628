use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use gridlink::boundaries::SweepAxis;
use gridlink::cli::library::CableLibrary;
use gridlink::{sensitivity_sweep, SystemParams};

const REFERENCE: &str = "v_ll_rms_kv = 10
s_actual_pu = 3
pf = 0.9
eta = 0.9934
n_ori = 9
cable_area_mm2 = 400
";

struct Run {
    dir: tempfile::TempDir,
    scenario: PathBuf,
}

impl Run {
    fn new(extra: &str) -> Self {
        let dir = tempfile::tempdir().unwrap();
        let scenario = dir.path().join("scenario.toml");
        std::fs::write(&scenario, format!("{REFERENCE}{extra}")).unwrap();
        Self { dir, scenario }
    }

    fn raw(text: &str) -> Self {
        let dir = tempfile::tempdir().unwrap();
        let scenario = dir.path().join("scenario.toml");
        std::fs::write(&scenario, text).unwrap();
        Self { dir, scenario }
    }

    fn exec(&self, args: &[&str]) -> Output {
        Command::new(env!("CARGO_BIN_EXE_gridlink"))
            .args(&args[..1])
            .arg("--scenario")
            .arg(&self.scenario)
            .args(&args[1..])
            .output()
            .unwrap()
    }

    fn csv(&self, args: &[&str]) -> String {
        let out = self.exec(args);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        String::from_utf8(out.stdout).unwrap()
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
}

/// Header and data rows, comment block dropped.
fn table(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let header = reader.headers().unwrap().iter().map(str::to_string).collect();
    let rows = reader
        .records()
        .map(|r| r.unwrap().iter().map(str::to_string).collect())
        .collect();
    (header, rows)
}

fn comments(text: &str) -> Vec<(String, String)> {
    text.lines()
        .filter_map(|l| l.strip_prefix("# "))
        .map(|l| {
            let (k, v) = l.split_once(" = ").unwrap();
            (k.to_string(), v.to_string())
        })
        .collect()
}

#[test]
fn configs_lists_the_nine_conductor_family() {
    let (header, rows) = table(&Run::new("").csv(&["configs"]));
    assert_eq!(header, ["config", "n_ac", "n_dc", "n_red", "s_max_ac_pu", "s_max_dc_pu", "preset_y"]);
    let counts: Vec<&[String]> = rows.iter().map(|r| &r[..4]).collect();
    assert_eq!(
        counts,
        [
            ["C0", "12", "0", "0"],
            ["C1", "0", "8", "1"],
            ["C2", "3", "6", "0"],
            ["C3", "6", "2", "1"],
        ]
    );
    assert_eq!(rows[0][6], "");
    assert_eq!(rows[2][6], "0.75");
}

#[test]
fn c1_intercept_in_loss_table() {
    let text = Run::new("").csv(&["losses", "--axis", "0:30:1", "--config", "C1"]);
    let (header, rows) = table(&text);
    assert_eq!(header[6], "normalized_loss");
    assert_eq!(rows.len(), 31);
    assert_eq!(rows[0][0], "0");
    assert_eq!(rows[0][6], "0.01188");
    assert_eq!(rows[0][3], "0");
}

#[test]
fn losses_cover_every_configuration() {
    let (_, rows) = table(&Run::new("").csv(&["losses", "--axis", "0,10"]));
    let configs: Vec<&str> = rows.iter().map(|r| r[1].as_str()).collect();
    assert_eq!(configs, ["C0", "C0", "C1", "C1", "C2", "C2", "C3", "C3"]);
    // C0 has no DC conductors, C1 no AC conductors.
    assert_eq!(rows[1][8], "");
    assert_eq!(rows[3][7], "");
    assert_eq!(rows[5][2], "0.75");
}

#[test]
fn absent_crossover_is_an_empty_cell() {
    let run = Run::new("");
    let text = Run::raw(&REFERENCE.replace("s_actual_pu = 3", "s_actual_pu = 1")).csv(&["crossover", "--y", "0"]);
    let (header, rows) = table(&text);
    assert_eq!(header[3], "l_cr_a_km");
    assert_eq!(rows[0][3], "");
    assert!(!rows[0][4].is_empty());

    let (_, rows) = table(&run.csv(&["crossover"]));
    let b: f64 = rows[0][4].parse().unwrap();
    assert!((b - 5.33).abs() < 0.01, "{b}");
}

#[test]
fn optimal_share_rows_stay_inside_limits() {
    let (header, rows) = table(&Run::new("").csv(&["optimal-y", "--axis", "0:20:5"]));
    assert_eq!(&header[..5], ["length_km", "config", "y_min", "y_max", "y_opt"]);
    for row in &rows {
        let v: Vec<f64> = [2, 3, 4].iter().map(|i| row[*i].parse().unwrap()).collect();
        assert!(v[0] <= v[2] && v[2] <= v[1], "{row:?}");
        let best: f64 = row[5].parse().unwrap();
        let preset: f64 = row[8].parse().unwrap();
        assert!(best <= preset * (1.0 + 1e-9));
    }
    let err = Run::new("").exec(&["optimal-y", "--config", "C1"]);
    assert_eq!(err.status.code(), Some(2));
}

#[test]
fn small_boundary_grid_shape() {
    let run = Run::new("demand_axis_pu = \"2,3\"\n");
    let text = run.csv(&["boundary", "--axis", "4,10"]);
    let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(body, ["s_actual_pu,4,10", "2,C0,C2", "3,C0,C2"]);
    assert!(text.contains("\r\n"));
}

#[test]
fn boundary_reruns_are_byte_identical() {
    let run = Run::new("length_axis_km = \"0:30:0.5\"\ndemand_axis_pu = \"0.25:4:0.25\"\n");
    let first = run.path("first.csv");
    let second = run.path("second.csv");
    for (out, workers) in [(&first, "1"), (&second, "3")] {
        let o = run.exec(&["boundary", "--out", out.to_str().unwrap(), "--workers", workers]);
        assert!(o.status.success());
        assert!(o.stdout.is_empty());
    }
    assert_eq!(std::fs::read(first).unwrap(), std::fs::read(second).unwrap());
}

#[test]
fn sweep_round_trips_to_nine_digits() {
    let run = Run::new("sweep_axis = \"eta\"\n");
    let text = run.csv(&["sweep"]);
    let (header, rows) = table(&text);
    assert_eq!(header, ["eta", "l_c2_min_km", "l_c2_max_km"]);

    let cable = CableLibrary::reference().get(400.0).unwrap();
    let template = SystemParams {
        v_ll_rms: 10.0,
        s_actual: 0.0,
        pf: 0.9,
        link_length: 10.0,
        eta: 0.9934,
        t_amb: 20.0,
        n_ori: 9,
    }
    .with_demand_pu(3.0, &cable);
    let etas: Vec<f64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    assert_eq!(etas.len(), 15);
    let direct = sensitivity_sweep(&SweepAxis::Eta(etas), &template, &cable).unwrap();
    for (i, row) in rows.iter().enumerate() {
        for (cell, value) in row[1..].iter().zip([direct.l_c2_min[i], direct.l_c2_max[i]]) {
            let parsed: f64 = cell.parse().unwrap();
            let value = value.unwrap();
            assert!((parsed - value).abs() <= 5e-9 * value.abs(), "{parsed} vs {value}");
        }
    }
}

#[test]
fn area_sweep_uses_the_library() {
    let (header, rows) = table(&Run::new("sweep_axis = \"area\"\n").csv(&["sweep"]));
    assert_eq!(header[0], "area_mm2");
    let areas: Vec<&str> = rows.iter().map(|r| r[0].as_str()).collect();
    assert_eq!(areas, ["150", "240", "300", "400", "500", "630"]);

    let (_, rows) = table(&Run::new("sweep_axis = \"voltage\"\n").csv(&["sweep", "--axis", "10,20"]));
    let lo: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert!((lo[1] / lo[0] - 2.0).abs() < 1e-6, "{lo:?}");
}

#[test]
fn header_echoes_every_input() {
    let text = Run::new("").csv(&["configs"]);
    let keys: Vec<String> = comments(&text).into_iter().map(|(k, _)| k).collect();
    for key in [
        "tool", "subcommand", "v_ll_rms_kv", "s_actual_mva", "s_actual_pu", "pf", "link_length_km",
        "eta", "t_amb_c", "n_ori", "cable_source", "cable_area_mm2", "cable_r90_ohm_per_km",
        "cable_alpha_per_k", "cable_i_rated_a", "cable_ac_dc_ratio", "y_preset_c2", "y_preset_c3",
        "length_axis_km", "demand_axis_pu", "sweep_axis", "sweep_values",
    ] {
        assert!(keys.iter().any(|k| k == key), "missing {key}");
    }
    assert!(text.starts_with("# tool = gridlink "));
}

#[test]
fn inline_cable_and_external_library() {
    let inline = "v_ll_rms_kv = 10\ns_actual_mva = 20\npf = 0.9\neta = 0.9934\nn_ori = 9\n\
        cable_area_mm2 = 400\ncable_r90_ohm_per_km = 0.0998\ncable_alpha_per_k = 0.00403\n\
        cable_i_rated_a = 460\ncable_ac_dc_ratio = 1.02\n";
    let run = Run::raw(inline);
    let echo = comments(&run.csv(&["crossover"]));
    assert!(echo.contains(&("cable_source".into(), "inline".into())));

    let run = Run::new("cable_library = \"cables.csv\"\n");
    std::fs::write(
        run.path("cables.csv"),
        "area_mm2,r90_ohm_per_km,alpha_per_k,i_rated_a,ac_dc_ratio\n400,0.1,0.004,450,1.02\n",
    )
    .unwrap();
    let echo = comments(&run.csv(&["configs"]));
    assert!(echo.contains(&("cable_i_rated_a".into(), "450".into())));
}

fn expect_failure(run: &Run, args: &[&str], code: i32, category: &str) -> String {
    let out = run.exec(args);
    assert_eq!(out.status.code(), Some(code), "{}", String::from_utf8_lossy(&out.stderr));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.starts_with(&format!("error[{category}]")), "{stderr}");
    assert!(out.stdout.is_empty());
    stderr
}

#[test]
fn validation_errors_exit_with_code_two() {
    let bad_pf = Run::raw(&REFERENCE.replace("pf = 0.9", "pf = 1.3"));
    let msg = expect_failure(&bad_pf, &["configs"], 2, "validation");
    assert!(msg.contains("line 3") && msg.contains("pf out of (0,1]"), "{msg}");

    let unknown = Run::new("speed = 3\n");
    expect_failure(&unknown, &["configs"], 2, "validation");

    let missing_area = Run::raw(&REFERENCE.replace("400", "185"));
    expect_failure(&missing_area, &["configs"], 2, "validation");

    expect_failure(&Run::new(""), &["losses", "--axis", "5:1:1"], 2, "validation");
    expect_failure(&Run::new(""), &["losses", "--config", "C7"], 2, "validation");
}

#[test]
fn infeasible_demand_exits_with_code_three() {
    let run = Run::raw(&REFERENCE.replace("s_actual_pu = 3", "s_actual_pu = 4.5"));
    expect_failure(&run, &["losses", "--config", "C0", "--axis", "10"], 3, "infeasible");
    expect_failure(&run, &["crossover"], 3, "infeasible");
}

#[test]
fn io_errors_exit_with_code_four() {
    let run = Run::new("");
    let gone = run.path("missing.toml");
    let out = Command::new(env!("CARGO_BIN_EXE_gridlink"))
        .args(["configs", "--scenario"])
        .arg(&gone)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
    let bad_out = Path::new("/nonexistent-dir/out.csv");
    expect_failure(&run, &["configs", "--out", bad_out.to_str().unwrap()], 4, "io");
}
