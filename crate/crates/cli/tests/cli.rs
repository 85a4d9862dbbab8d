use std::process::Command;

fn run(args: &[&str], window: Option<&str>) -> (i32, String) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_steenrod"));
    cmd.args(args).env_remove("STEENROD_WINDOW");
    if let Some(w) = window {
        cmd.env("STEENROD_WINDOW", w);
    }
    let out = cmd.output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

#[test]
fn basis_json() {
    let (code, out) = run(&["--format", "json", "basis", "--algebra", "real-motivic", "--t", "1", "--w", "0"], None);
    assert_eq!(code, 0);
    assert_eq!(out, "[\"tau0\",\"rho*xi1\"]\n");
}

#[test]
fn verify_exit_codes() {
    let (code, out) = run(&["verify", "hopf", "--algebra", "c2", "--t-max", "12"], None);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("PASS"));
    let (code, out) = run(&["verify", "psi", "--variant", "printed"], None);
    assert_eq!(code, 1);
    assert!(out.contains("FAIL"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["mul", "tau0", "tau0q"], None).0, 2);
    assert_eq!(run(&["basis", "--window", "3:1,0:0"], None).0, 2);
    assert_eq!(run(&["verify", "quotient", "--profile", "a9x"], None).0, 2);
    assert_eq!(run(&["fixture", "nope"], None).0, 2);
}

#[test]
fn window_from_the_environment() {
    let (code, out) = run(&["--format", "csv", "basis", "--algebra", "real-motivic"], Some("0:2,0:1"));
    assert_eq!(code, 0);
    assert_eq!(out, "t,w,dim\n0,0,1\n0,1,0\n1,0,2\n1,1,0\n2,0,4\n2,1,1\n");
    // An explicit flag wins.
    let (_, out) = run(&["--format", "csv", "basis", "--algebra", "real-motivic", "--window", "0:0,0:0"], Some("0:2,0:1"));
    assert_eq!(out, "t,w,dim\n0,0,1\n");
}

#[test]
fn classical_quotient_dims() {
    let (code, out) = run(&["--format", "csv", "export", "quotient-dims", "--algebra", "classical", "--window", "0:16,0:0"], None);
    assert_eq!(code, 0);
    let dims: Vec<&str> = out.lines().skip(1).map(|l| l.rsplit(',').next().unwrap()).collect();
    assert_eq!(dims.join(""), "10000000100010111");
}

#[test]
fn tor_csv_is_zero() {
    let (code, out) = run(&["--format", "csv", "export", "tor", "--window", "-3:3,-3:3"], None);
    assert_eq!(code, 0);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("s,t,w,dim"));
    assert_eq!(lines.clone().count(), 2 * 49);
    assert!(lines.all(|l| l.ends_with(",0")));
}

#[test]
fn psi_expr_and_json() {
    let (code, out) = run(&["psi", "--expr", "xb1^2"], None);
    assert_eq!(code, 0);
    // Psi is multiplicative, so this is the square of Psi(xb1).
    let (_, square) = run(&["mul", "rho*xi1 + tau0", "rho*xi1 + tau0"], None);
    assert_eq!(out, square);
    assert_eq!(out, "rho^2*xi1^2 + rho*xi1*tau0 + rho*tau1 + tau*xi1\n");
    let (_, out) = run(&["--format", "json", "psi", "1"], None);
    assert!(out.starts_with('{') && out.contains("\"text\":\"rho*xi1 + tau0\""), "{out}");
}
