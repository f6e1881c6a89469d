//! Command-line front end: exact distances, induced matchings, kernels and
//! cokernels, diagram conversions, and structure checks on the text formats
//! of [`barc::textio`].
//!
//! Exit codes: 0 for success or a passing check, 1 for a failing check, 2
//! for unusable input (missing or unparsable files, bad flags).  Output is
//! byte-deterministic given identical inputs and flags.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_traits::Signed;

use barc::barcode::phi;
use barc::diagram::{functor_E, functor_F};
use barc::interleaving::{
    bottleneck_distance, from_delta_matching, interleaving_distance, is_delta_matching,
    shift_matching,
};
use barc::matching::Matching;
use barc::module::{
    cokernel_module, induced_matching, kernel_module, module_interleaving_violation,
};
use barc::overlap::OverlapMatching;
use barc::scalar::parse_scalar;
use barc::textio::{
    format_approx, format_threshold, parse_barcode, parse_diagram, parse_matching_file,
    parse_module_morphism, write_barcode, write_diagram, write_matching_file, MatchingFile,
};
use barc::{ExtReal, Rational, RationalBarcode, RationalDiagram, RationalMorphism};

#[derive(Parser)]
#[command(
    name = "barc",
    version,
    about = "Barcodes with overlap matchings: exact distances, induced matchings, and checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Prime modulus for module-morphism files; overrides `field:` headers.
    #[arg(long, global = true)]
    field: Option<u64>,
    /// Print a witness matching alongside computed distances.
    #[arg(long, global = true)]
    witness: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Exact bottleneck distance between two barcode files.
    Bottleneck { c: PathBuf, d: PathBuf },
    /// Exact interleaving distance between two barcode files.
    InterleavingDistance { c: PathBuf, d: PathBuf },
    /// Induced matching of a module-morphism file, with kernel and cokernel
    /// barcodes and their triviality thresholds.
    InducedMatching {
        f: PathBuf,
        /// Also report triviality of the kernels and cokernels at this value.
        #[arg(long, value_parser = parse_delta)]
        delta: Option<Rational>,
    },
    /// Kernel barcode of a matching file or a module-morphism file.
    Kernel { f: PathBuf },
    /// Cokernel barcode of a matching file or a module-morphism file.
    Cokernel { f: PathBuf },
    /// Convert a barcode file to a stratified-diagram file.
    ToDiagram { c: PathBuf },
    /// Convert a stratified-diagram file back to a barcode file.
    FromDiagram { d: PathBuf },
    /// Verify a structure; prints `pass` or `fail: <condition>`.
    #[command(subcommand)]
    Check(CheckKind),
}

#[derive(Subcommand)]
enum CheckKind {
    /// The pairs of a matching file form an overlap matching.
    OverlapMatching { m: PathBuf },
    /// The pairs of a matching file form a δ-matching.
    DeltaMatching {
        m: PathBuf,
        #[arg(long, value_parser = parse_delta)]
        delta: Rational,
    },
    /// Matching files for f: C ⇸ D(δ) and g: D ⇸ C(δ) form a δ-interleaving.
    Interleaving {
        f: PathBuf,
        g: PathBuf,
        #[arg(long, value_parser = parse_delta)]
        delta: Rational,
    },
    /// Module-morphism files for f: M → N(δ) and g: N → M(δ) form a
    /// δ-interleaving of persistence modules.
    ModuleInterleaving {
        f: PathBuf,
        g: PathBuf,
        #[arg(long, value_parser = parse_delta)]
        delta: Rational,
    },
}

fn parse_delta(text: &str) -> Result<Rational, String> {
    let q: Rational = parse_scalar(text)?;
    if q.is_negative() {
        return Err("delta must be nonnegative".into());
    }
    Ok(q)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> InputResult<ExitCode> {
    match &cli.command {
        Command::Bottleneck { c, d } => cmd_bottleneck(c, d, cli.witness),
        Command::InterleavingDistance { c, d } => cmd_interleaving_distance(c, d, cli.witness),
        Command::InducedMatching { f, delta } => cmd_induced_matching(f, delta.as_ref(), cli.field),
        Command::Kernel { f } => cmd_kernel_cokernel(f, cli.field, false),
        Command::Cokernel { f } => cmd_kernel_cokernel(f, cli.field, true),
        Command::ToDiagram { c } => cmd_to_diagram(c),
        Command::FromDiagram { d } => cmd_from_diagram(d),
        Command::Check(kind) => match kind {
            CheckKind::OverlapMatching { m } => check_overlap_matching(m),
            CheckKind::DeltaMatching { m, delta } => check_delta_matching(m, delta),
            CheckKind::Interleaving { f, g, delta } => check_interleaving(f, g, delta),
            CheckKind::ModuleInterleaving { f, g, delta } => {
                check_module_interleaving_files(f, g, delta, cli.field)
            }
        },
    }
}

/// Errors that make the input unusable; reported on stderr with exit code 2.
type InputResult<T> = Result<T, String>;

fn read_file(path: &Path) -> InputResult<String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn in_file<T>(path: &Path, outcome: barc::Result<T>) -> InputResult<T> {
    outcome.map_err(|e| format!("{}: {e}", path.display()))
}

fn load_barcode(path: &Path) -> InputResult<RationalBarcode> {
    in_file(path, parse_barcode(&read_file(path)?))
}

/// Loads a matching file together with the two barcodes its header names,
/// resolved relative to the matching file's directory.
fn load_matching_file(
    path: &Path,
) -> InputResult<(RationalBarcode, RationalBarcode, MatchingFile)> {
    let file = in_file(path, parse_matching_file(&read_file(path)?))?;
    let base = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let resolve = |named: &str| {
        let p = Path::new(named);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            base.join(p)
        }
    };
    let c = load_barcode(&resolve(&file.source))?;
    let d = load_barcode(&resolve(&file.target))?;
    Ok((c, d, file))
}

fn load_morphism(path: &Path, field: Option<u64>) -> InputResult<RationalMorphism> {
    let text = read_file(path)?;
    in_file(path, parse_module_morphism(&text, field))
}

fn is_morphism_file(text: &str) -> bool {
    text.lines().any(|line| line.trim() == "[source]")
}

fn distance_report(name: &str, value: &ExtReal<Rational>, attained: bool) -> String {
    match value {
        ExtReal::Finite(q) => {
            format!("{name} = {q} (~{}) attained={attained}\n", format_approx(q))
        }
        other => format!("{name} = {other}\n"),
    }
}

fn cmd_bottleneck(c_path: &Path, d_path: &Path, witness: bool) -> InputResult<ExitCode> {
    let c = load_barcode(c_path)?;
    let d = load_barcode(d_path)?;
    let result = bottleneck_distance(&c, &d);
    print!("{}", distance_report("d_B", &result.value, result.attained));
    if witness {
        match &result.witness {
            Some(sigma) => print!(
                "{}",
                write_matching_file(
                    &c_path.display().to_string(),
                    &d_path.display().to_string(),
                    sigma.pairs(),
                )
            ),
            None => println!("no witness: the infimum is not attained by any matching"),
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_interleaving_distance(c_path: &Path, d_path: &Path, witness: bool) -> InputResult<ExitCode> {
    let c = load_barcode(c_path)?;
    let d = load_barcode(d_path)?;
    let (result, pair) = interleaving_distance(&c, &d);
    print!("{}", distance_report("d_I", &result.value, result.attained));
    if witness {
        match &pair {
            Some(pair) => {
                println!("# delta = {}", pair.delta());
                println!("# forward");
                print!(
                    "{}",
                    write_matching_file(
                        &c_path.display().to_string(),
                        &d_path.display().to_string(),
                        pair.forward().pairs(),
                    )
                );
                println!("# backward");
                print!(
                    "{}",
                    write_matching_file(
                        &d_path.display().to_string(),
                        &c_path.display().to_string(),
                        pair.backward().pairs(),
                    )
                );
            }
            None => println!("no witness: the infimum is not attained by any interleaving"),
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_induced_matching(
    path: &Path,
    delta: Option<&Rational>,
    field: Option<u64>,
) -> InputResult<ExitCode> {
    let f = load_morphism(path, field)?;
    let x = induced_matching(&f);
    let label = path.display();
    print!(
        "{}",
        write_matching_file(
            &format!("{label}#source"),
            &format!("{label}#target"),
            x.pairs()
        )
    );
    let ker_f = kernel_module(&f).bars().clone();
    let coker_f = cokernel_module(&f).bars().clone();
    let (ker_x, _) = x.kernel();
    let (coker_x, _) = x.cokernel();
    println!();
    for (name, bars) in [
        ("ker f", &ker_f),
        ("coker f", &coker_f),
        ("ker X_f", &ker_x),
        ("coker X_f", &coker_x),
    ] {
        println!(
            "{name}: threshold {}",
            format_threshold(&bars.triviality_threshold())
        );
        for (index, interval) in bars.iter() {
            println!("  {index}: {interval}");
        }
    }
    let mut all_pass = true;
    if let Some(delta) = delta {
        println!();
        for (label, f_name, f_bars, x_name, x_bars) in [
            ("(i)", "ker f", &ker_f, "ker X_f", &ker_x),
            ("(ii)", "coker f", &coker_f, "coker X_f", &coker_x),
        ] {
            let f_trivial = f_bars.is_delta_trivial(delta);
            let x_trivial = x_bars.is_delta_trivial(delta);
            let pass = !f_trivial || x_trivial;
            all_pass &= pass;
            println!(
                "{label} at delta = {delta}: {f_name} {delta}-trivial: {f_trivial}; \
                 {x_name} {delta}-trivial: {x_trivial}; {}",
                if pass { "pass" } else { "fail" }
            );
        }
    }
    Ok(if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn cmd_kernel_cokernel(path: &Path, field: Option<u64>, cokernel: bool) -> InputResult<ExitCode> {
    let text = read_file(path)?;
    let bars = if is_morphism_file(&text) {
        let f: RationalMorphism = in_file(path, parse_module_morphism(&text, field))?;
        if cokernel {
            cokernel_module(&f).bars().clone()
        } else {
            kernel_module(&f).bars().clone()
        }
    } else {
        let (c, d, file) = load_matching_file(path)?;
        let sigma = in_file(path, OverlapMatching::new(c, d, file.pairs))?;
        if cokernel {
            sigma.cokernel().0
        } else {
            sigma.kernel().0
        }
    };
    print!("{}", write_barcode(&bars));
    Ok(ExitCode::SUCCESS)
}

fn cmd_to_diagram(path: &Path) -> InputResult<ExitCode> {
    let c = load_barcode(path)?;
    print!("{}", write_diagram(&functor_E(&c)));
    Ok(ExitCode::SUCCESS)
}

fn cmd_from_diagram(path: &Path) -> InputResult<ExitCode> {
    let d: RationalDiagram = in_file(path, parse_diagram(&read_file(path)?))?;
    print!("{}", write_barcode(&functor_F(&d)));
    Ok(ExitCode::SUCCESS)
}

fn report_check(outcome: Result<(), String>) -> ExitCode {
    match outcome {
        Ok(()) => {
            println!("pass");
            ExitCode::SUCCESS
        }
        Err(reason) => {
            println!("fail: {reason}");
            ExitCode::FAILURE
        }
    }
}

fn check_overlap_matching(path: &Path) -> InputResult<ExitCode> {
    let (c, d, file) = load_matching_file(path)?;
    Ok(report_check(
        OverlapMatching::new(c, d, file.pairs)
            .map(|_| ())
            .map_err(|e| e.to_string()),
    ))
}

/// The first violated δ-matching condition, if any: (i) every interval that
/// is not 2δ-trivial is matched; (ii) matched intervals lie in each other's
/// δ-thickenings.
fn delta_matching_violation(
    sigma: &Matching,
    c: &RationalBarcode,
    d: &RationalBarcode,
    delta: &Rational,
) -> Option<String> {
    let two = delta + delta;
    for (x, i) in c.iter() {
        if !i.is_delta_trivial(&two) && sigma.apply(x).is_none() {
            return Some(format!(
                "condition (i): `{x}` {i} is not {two}-trivial but unmatched"
            ));
        }
    }
    let image = sigma.image_set();
    for (y, j) in d.iter() {
        if !j.is_delta_trivial(&two) && !image.contains(y) {
            return Some(format!(
                "condition (i): `{y}` {j} is not {two}-trivial but unmatched"
            ));
        }
    }
    for (x, y) in sigma.pairs() {
        let i = c.get(x).expect("pair indices were validated");
        let j = d.get(y).expect("pair indices were validated");
        if !i.is_subset_of(&j.thicken(delta)) {
            return Some(format!(
                "condition (ii): pair `{x} -> {y}`: {i} is not contained in the \
                 {delta}-thickening of {j}"
            ));
        }
        if !j.is_subset_of(&i.thicken(delta)) {
            return Some(format!(
                "condition (ii): pair `{x} -> {y}`: {j} is not contained in the \
                 {delta}-thickening of {i}"
            ));
        }
    }
    None
}

fn check_delta_matching(path: &Path, delta: &Rational) -> InputResult<ExitCode> {
    let (c, d, file) = load_matching_file(path)?;
    let outcome = Matching::new(c.index_set(), d.index_set(), file.pairs)
        .map_err(|e| e.to_string())
        .and_then(|sigma| {
            let violation = delta_matching_violation(&sigma, &c, &d, delta);
            debug_assert_eq!(
                violation.is_none(),
                is_delta_matching(&sigma, &c, &d, delta)
            );
            violation.map_or(Ok(()), Err)
        });
    Ok(report_check(outcome))
}

fn same_pairs(a: &OverlapMatching<Rational>, b: &OverlapMatching<Rational>) -> bool {
    a.pairs().collect::<Vec<_>>() == b.pairs().collect::<Vec<_>>()
}

fn check_interleaving(f_path: &Path, g_path: &Path, delta: &Rational) -> InputResult<ExitCode> {
    let (c, d, f_file) = load_matching_file(f_path)?;
    let (d2, c2, g_file) = load_matching_file(g_path)?;
    if !d.same_presentation(&d2) || !c.same_presentation(&c2) {
        return Err(format!(
            "{} and {} disagree about the barcodes: expected f: C ⇸ D(δ) and g: D ⇸ C(δ)",
            f_path.display(),
            g_path.display(),
        ));
    }
    let outcome = (|| {
        let sigma_f = Matching::new(c.index_set(), d.index_set(), f_file.pairs)
            .map_err(|e| format!("f: {e}"))?;
        let sigma_g = Matching::new(d.index_set(), c.index_set(), g_file.pairs)
            .map_err(|e| format!("g: {e}"))?;
        let f = from_delta_matching(&sigma_f, &c, &d, delta).map_err(|e| format!("f: {e}"))?;
        let g = from_delta_matching(&sigma_g, &d, &c, delta).map_err(|e| format!("g: {e}"))?;
        let two = delta + delta;
        let through_d = shift_matching(&g, delta)
            .compose(&f)
            .map_err(|e| e.to_string())?;
        if !same_pairs(&through_d, &phi(&c, &two)) {
            return Err(format!(
                "g(δ) ⊛ f differs from the comparison morphism φ^C({two})"
            ));
        }
        let through_c = shift_matching(&f, delta)
            .compose(&g)
            .map_err(|e| e.to_string())?;
        if !same_pairs(&through_c, &phi(&d, &two)) {
            return Err(format!(
                "f(δ) ⊛ g differs from the comparison morphism φ^D({two})"
            ));
        }
        Ok(())
    })();
    Ok(report_check(outcome))
}

fn check_module_interleaving_files(
    f_path: &Path,
    g_path: &Path,
    delta: &Rational,
    field: Option<u64>,
) -> InputResult<ExitCode> {
    let f = load_morphism(f_path, field)?;
    let g = load_morphism(g_path, field)?;
    let m = f.source().clone();
    let n = g.source().clone();
    let violation =
        module_interleaving_violation(&m, &n, delta, &f, &g).map_err(|e| e.to_string())?;
    Ok(report_check(violation.map_or(Ok(()), Err)))
}
