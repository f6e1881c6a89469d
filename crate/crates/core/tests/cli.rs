//! Behavioral tests of the `barc` binary: golden outputs for the worked
//! two-bar example, exit codes, error reporting, and flag precedence.

use std::path::PathBuf;
use std::process::{Command, Output};

use barc::textio::parse_barcode;
use barc::RationalBarcode;

/// A scratch directory under the target tree, one per test.
struct Fixture {
    dir: PathBuf,
}

impl Fixture {
    fn new(name: &str) -> Self {
        let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
        let _ = std::fs::remove_dir_all(&dir);
        std::fs::create_dir_all(&dir).unwrap();
        Fixture { dir }
    }

    fn write(&self, name: &str, text: &str) -> String {
        let path = self.dir.join(name);
        std::fs::write(&path, text).unwrap();
        path.display().to_string()
    }
}

fn barc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_barc"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).unwrap()
}

fn stderr(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).unwrap()
}

fn code(output: &Output) -> i32 {
    output.status.code().unwrap()
}

const M_BC: &str = "m1: [2,4)\n";
const N_BC: &str = "n1: [0,4)\nn2: [1,3)\n";
const F_MOD: &str =
    "field: 2\n[source]\nm1: [2,4)\n[target]\nn1: [0,4)\nn2: [1,3)\n[matrix]\nn1 m1 1\nn2 m1 1\n";

#[test]
fn bottleneck_reports_exact_distance() {
    let fx = Fixture::new("cli-bottleneck");
    let m = fx.write("m.bc", M_BC);
    let n = fx.write("n.bc", N_BC);
    let out = barc(&["bottleneck", &m, &n]);
    assert_eq!(stdout(&out), "d_B = 2 (~2.00000) attained=true\n");
    assert_eq!(code(&out), 0);

    let same = barc(&["bottleneck", &n, &n]);
    assert_eq!(stdout(&same), "d_B = 0 (~0.00000) attained=true\n");
    assert_eq!(code(&same), 0);
}

#[test]
fn bottleneck_reports_infinite_distance() {
    let fx = Fixture::new("cli-bottleneck-inf");
    let inf = fx.write("inf.bc", "a: [0,inf)\n");
    let empty = fx.write("empty.bc", "");
    let out = barc(&["bottleneck", &inf, &empty, "--witness"]);
    assert_eq!(
        stdout(&out),
        "d_B = inf\nno witness: the infimum is not attained by any matching\n"
    );
    assert_eq!(code(&out), 0);
}

#[test]
fn bottleneck_witness_passes_its_own_check() {
    let fx = Fixture::new("cli-witness");
    let m = fx.write("m.bc", M_BC);
    let n = fx.write("n.bc", N_BC);
    let out = barc(&["bottleneck", &m, &n, "--witness"]);
    assert_eq!(
        stdout(&out),
        format!("d_B = 2 (~2.00000) attained=true\nsource: {m}\ntarget: {n}\nm1 -> n1\n")
    );
    assert_eq!(code(&out), 0);

    // The printed block after the distance line is itself a matching file;
    // it must verify as a δ-matching at the reported distance.
    let block = stdout(&out).splitn(2, '\n').nth(1).unwrap().to_string();
    let witness = fx.write("w.match", &block);
    let check = barc(&["check", "delta-matching", &witness, "--delta", "2"]);
    assert_eq!(stdout(&check), "pass\n");
    assert_eq!(code(&check), 0);
}

#[test]
fn interleaving_distance_agrees_with_bottleneck() {
    let fx = Fixture::new("cli-interleaving-distance");
    let m = fx.write("m.bc", M_BC);
    let n = fx.write("n.bc", N_BC);
    let out = barc(&["interleaving-distance", &m, &n, "--witness"]);
    let text = stdout(&out);
    assert!(
        text.starts_with("d_I = 2 (~2.00000) attained=true\n"),
        "{text}"
    );
    assert!(text.contains("# delta = 2\n"), "{text}");
    assert!(
        text.contains("# forward\n") && text.contains("# backward\n"),
        "{text}"
    );
    assert_eq!(code(&out), 0);
}

#[test]
fn induced_matching_worked_example_report() {
    let fx = Fixture::new("cli-induced");
    let f = fx.write("f.mod", F_MOD);
    let out = barc(&["induced-matching", &f, "--delta", "2"]);
    let expected = format!(
        "source: {f}#source\n\
         target: {f}#target\n\
         m1 -> n1\n\
         \n\
         ker f: threshold 0 (attained)\n\
         coker f: threshold 3 (attained)\n\
         \x20 i1: [0,3)\n\
         \x20 i2: [1,2)\n\
         ker X_f: threshold 0 (attained)\n\
         coker X_f: threshold 2 (attained)\n\
         \x20 n1: [0,2)\n\
         \x20 n2: [1,3)\n\
         \n\
         (i) at delta = 2: ker f 2-trivial: true; ker X_f 2-trivial: true; pass\n\
         (ii) at delta = 2: coker f 2-trivial: false; coker X_f 2-trivial: true; pass\n"
    );
    assert_eq!(stdout(&out), expected);
    assert_eq!(code(&out), 0);
}

#[test]
fn field_flag_overrides_file_header() {
    let fx = Fixture::new("cli-field");
    // The single matrix entry is 3, so the morphism vanishes exactly over F_3.
    let bare = fx.write(
        "bare.mod",
        "[source]\ni1: [0,2)\n[target]\ni1: [0,2)\n[matrix]\ni1 i1 3\n",
    );
    let headed = fx.write(
        "headed.mod",
        "field: 3\n[source]\ni1: [0,2)\n[target]\ni1: [0,2)\n[matrix]\ni1 i1 3\n",
    );

    // Default field is 2: the entry reduces to 1 and the bars match up.
    let default_run = barc(&["induced-matching", &bare]);
    assert!(stdout(&default_run).contains("i1 -> i1"));
    // The flag forces F_3, the header declares F_3: zero morphism either way.
    let flagged = barc(&["induced-matching", &bare, "--field", "3"]);
    assert!(!stdout(&flagged).contains("i1 -> i1"));
    let from_header = barc(&["induced-matching", &headed]);
    assert!(!stdout(&from_header).contains("i1 -> i1"));
    // The flag wins over the header.
    let overridden = barc(&["induced-matching", &headed, "--field", "5"]);
    assert!(stdout(&overridden).contains("i1 -> i1"));

    let bad = barc(&["induced-matching", &bare, "--field", "4"]);
    assert_eq!(code(&bad), 2);
    assert!(stderr(&bad).contains("4 is not prime"), "{}", stderr(&bad));
}

#[test]
fn kernel_and_cokernel_of_both_file_kinds() {
    let fx = Fixture::new("cli-kernels");
    let f = fx.write("f.mod", F_MOD);
    let coker = barc(&["cokernel", &f]);
    assert_eq!(stdout(&coker), "i1: [0,3)\ni2: [1,2)\n");
    assert_eq!(code(&coker), 0);
    let ker = barc(&["kernel", &f]);
    assert_eq!(stdout(&ker), "");
    assert_eq!(code(&ker), 0);

    fx.write("k.bc", "k1: [0,5)\n");
    fx.write("l.bc", "l1: [0,3)\n");
    let sigma = fx.write("sigma.match", "source: k.bc\ntarget: l.bc\nk1 -> l1\n");
    let ker_sigma = barc(&["kernel", &sigma]);
    assert_eq!(stdout(&ker_sigma), "k1: [3,5)\n");
    assert_eq!(code(&ker_sigma), 0);
}

#[test]
fn diagram_round_trip_preserves_the_barcode() {
    let fx = Fixture::new("cli-diagram");
    let n = fx.write("n.bc", N_BC);
    let to = barc(&["to-diagram", &n]);
    assert_eq!(code(&to), 0);
    let text = stdout(&to);
    assert!(text.starts_with("criticals: 0 1 3 4\n"), "{text}");

    let diag = fx.write("n.diag", &text);
    let from = barc(&["from-diagram", &diag]);
    assert_eq!(code(&from), 0);
    let back: RationalBarcode = parse_barcode(&stdout(&from)).unwrap();
    let original: RationalBarcode = parse_barcode(N_BC).unwrap();
    assert!(
        back.reindexes(&original),
        "round trip must reindex the barcode"
    );
}

#[test]
fn check_delta_matching_names_the_violated_condition() {
    let fx = Fixture::new("cli-check-delta");
    fx.write("c.bc", "c1: [0,4)\n");
    fx.write("d.bc", "d1: [0,3)\n");
    let sigma = fx.write("sigma.match", "source: c.bc\ntarget: d.bc\nc1 -> d1\n");

    let pass = barc(&["check", "delta-matching", &sigma, "--delta", "1"]);
    assert_eq!(stdout(&pass), "pass\n");
    assert_eq!(code(&pass), 0);

    let fail = barc(&["check", "delta-matching", &sigma, "--delta", "2/5"]);
    assert_eq!(
        stdout(&fail),
        "fail: condition (ii): pair `c1 -> d1`: [0,4) is not contained in the \
         2/5-thickening of [0,3)\n"
    );
    assert_eq!(code(&fail), 1);

    // An unmatched non-trivial interval trips condition (i) instead.
    fx.write("m.bc", M_BC);
    fx.write("n.bc", N_BC);
    let partial = fx.write("partial.match", "source: m.bc\ntarget: n.bc\nm1 -> n1\n");
    let unmatched = barc(&["check", "delta-matching", &partial, "--delta", "2/5"]);
    assert_eq!(
        stdout(&unmatched),
        "fail: condition (i): `n2` [1,3) is not 4/5-trivial but unmatched\n"
    );
    assert_eq!(code(&unmatched), 1);
}

#[test]
fn check_overlap_matching_outcomes() {
    let fx = Fixture::new("cli-check-overlap");
    fx.write("c.bc", "c1: [0,4)\n");
    fx.write("d.bc", "d1: [0,3)\n");
    let good = fx.write("good.match", "source: c.bc\ntarget: d.bc\nc1 -> d1\n");
    let pass = barc(&["check", "overlap-matching", &good]);
    assert_eq!(stdout(&pass), "pass\n");
    assert_eq!(code(&pass), 0);

    // [0,2) starts below [1,3), so the pair cannot overlap above.
    fx.write("e.bc", "e1: [0,2)\n");
    fx.write("g.bc", "g1: [1,3)\n");
    let bad = fx.write("bad.match", "source: e.bc\ntarget: g.bc\ne1 -> g1\n");
    let fail = barc(&["check", "overlap-matching", &bad]);
    assert!(
        stdout(&fail).starts_with("fail: not an overlap matching"),
        "{}",
        stdout(&fail)
    );
    assert_eq!(code(&fail), 1);
}

#[test]
fn check_interleaving_outcomes() {
    let fx = Fixture::new("cli-check-interleaving");
    fx.write("c.bc", "c1: [0,4)\n");
    fx.write("d.bc", "d1: [1,4)\n");
    let fwd = fx.write("fwd.match", "source: c.bc\ntarget: d.bc\nc1 -> d1\n");
    let bwd = fx.write("bwd.match", "source: d.bc\ntarget: c.bc\nd1 -> c1\n");

    let pass = barc(&["check", "interleaving", &fwd, &bwd, "--delta", "1"]);
    assert_eq!(stdout(&pass), "pass\n");
    assert_eq!(code(&pass), 0);

    let fail = barc(&["check", "interleaving", &fwd, &bwd, "--delta", "0"]);
    assert_eq!(
        stdout(&fail),
        "fail: f: not an overlap matching: [0,4) does not overlap [1,4) above \
         (pair c1 -> d1 after shifting by 0)\n"
    );
    assert_eq!(code(&fail), 1);

    // The two files must name the same pair of barcodes, up to swap.
    fx.write("other.bc", "d1: [0,3)\n");
    let stray = fx.write("stray.match", "source: d.bc\ntarget: other.bc\nd1 -> d1\n");
    let mismatch = barc(&["check", "interleaving", &fwd, &stray, "--delta", "1"]);
    assert_eq!(code(&mismatch), 2);
    assert!(
        stderr(&mismatch).contains("disagree about the barcodes"),
        "{}",
        stderr(&mismatch)
    );
}

#[test]
fn check_module_interleaving_outcomes() {
    let fx = Fixture::new("cli-check-module");
    // f: M -> N(1) and g: N -> M(1) for M = C^[0,4), N = C^[0,4).
    let f = fx.write(
        "f.mod",
        "field: 2\n[source]\nm1: [0,4)\n[target]\nn1: [-1,3)\n[matrix]\nn1 m1 1\n",
    );
    let g = fx.write(
        "g.mod",
        "field: 2\n[source]\nn1: [0,4)\n[target]\nm1: [-1,3)\n[matrix]\nm1 n1 1\n",
    );
    let pass = barc(&["check", "module-interleaving", &f, &g, "--delta", "1"]);
    assert_eq!(stdout(&pass), "pass\n");
    assert_eq!(code(&pass), 0);

    // Zero maps cannot interleave a module with a 2-step internal map.
    let fz = fx.write(
        "fz.mod",
        "field: 2\n[source]\nm1: [0,4)\n[target]\nn1: [-1,3)\n[matrix]\n",
    );
    let gz = fx.write(
        "gz.mod",
        "field: 2\n[source]\nn1: [0,4)\n[target]\nm1: [-1,3)\n[matrix]\n",
    );
    let fail = barc(&["check", "module-interleaving", &fz, &gz, "--delta", "1"]);
    assert_eq!(
        stdout(&fail),
        "fail: g_1 \u{2218} f_0 differs from the internal map M_0 -> M_2\n"
    );
    assert_eq!(code(&fail), 1);

    // Shapes that do not fit f: M -> N(δ), g: N -> M(δ) are input errors.
    let gbad = fx.write(
        "gbad.mod",
        "field: 2\n[source]\nn1: [0,3)\n[target]\nm1: [-1,3)\n[matrix]\nm1 n1 1\n",
    );
    let mismatch = barc(&["check", "module-interleaving", &f, &gbad, "--delta", "1"]);
    assert_eq!(code(&mismatch), 2);
    assert!(
        stderr(&mismatch).contains("expected f: M -> N(\u{3b4}) and g: N -> M(\u{3b4})"),
        "{}",
        stderr(&mismatch)
    );
}

#[test]
fn input_errors_name_the_file_and_line() {
    let fx = Fixture::new("cli-errors");
    let m = fx.write("m.bc", M_BC);
    let bad = fx.write("bad.bc", "a1: [0,1)\na2: [0,2)\na3: [5,3)\n");
    let out = barc(&["bottleneck", &bad, &m]);
    assert_eq!(code(&out), 2);
    assert_eq!(
        stderr(&out),
        format!("error: {bad}: line 3: invalid interval: empty: [5,3)\n")
    );

    let dup = fx.write("dup.bc", "a1: [0,1)\na1: [0,2)\n");
    let out = barc(&["bottleneck", &dup, &m]);
    assert_eq!(code(&out), 2);
    assert_eq!(
        stderr(&out),
        format!("error: {dup}: line 2: duplicate index `a1`\n")
    );

    let missing = fx.dir.join("nosuch.bc").display().to_string();
    let out = barc(&["bottleneck", &missing, &m]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).starts_with("error: "), "{}", stderr(&out));
}

#[test]
fn bad_delta_values_are_rejected() {
    let fx = Fixture::new("cli-bad-delta");
    fx.write("c.bc", "c1: [0,4)\n");
    fx.write("d.bc", "d1: [0,3)\n");
    let sigma = fx.write("sigma.match", "source: c.bc\ntarget: d.bc\nc1 -> d1\n");

    let negative = barc(&["check", "delta-matching", &sigma, "--delta=-1"]);
    assert_eq!(code(&negative), 2);
    assert!(
        stderr(&negative).contains("delta must be nonnegative"),
        "{}",
        stderr(&negative)
    );

    let garbage = barc(&["check", "delta-matching", &sigma, "--delta", "abc"]);
    assert_eq!(code(&garbage), 2);
}
