//! Command line front end: parses fan/divisor/sheaf/flip JSON files,
//! dispatches to the engine and prints exact-rational results as text or
//! JSON.
//!
//! Exit codes: 0 success, 2 schema violation, 3 semantic violation,
//! 4 computation error.

use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use flipstab::family::{
    classify_flip_with_cap, log_preservation_check, log_witness_sheaf, small_eps_verdict_with_cap,
    AmpleRangeSup, FlipCase, LogPreservation, PolarisationFamily, Side,
};
use flipstab::fan::{analyze_fan, Cone, Fan};
use flipstab::flip::{build_flip, exceptional_data, validate_flipping_cone, FlipData};
use flipstab::intersection::{cartier_and_ample, IntersectionEngine, InvariantDivisor};
use flipstab::io::{self, ParseError};
use flipstab::rat::{format_rat, parse_rat, Rat};
use flipstab::stability::{
    polystable_decomposition_with_cap, stability_verdict_with_cap, Decomposition, StabilityStatus,
    StabilityVerdict, DEFAULT_CANDIDATE_CAP,
};
use flipstab::subspace::Subspace;
use flipstab::ToricSheaf;

const CAP_ENV: &str = "FLIPSTAB_CANDIDATE_CAP";

#[derive(Parser)]
#[command(
    name = "flipstab",
    about = "Exact toric flips, intersection numbers and slope stability",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    X,
    Xprime,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Side {
        match s {
            SideArg::X => Side::X,
            SideArg::Xprime => Side::XPrime,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Validate a fan and report simpliciality and completeness.
    Analyze {
        #[arg(long)]
        fan: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Intersection number of rank-many invariant divisors.
    Intersect {
        #[arg(long)]
        fan: String,
        /// One divisor file per factor, repeated.
        #[arg(long = "divisor", required = true)]
        divisors: Vec<String>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Degree of a divisor with respect to a polarisation.
    Degree {
        #[arg(long)]
        fan: String,
        #[arg(long)]
        divisor: String,
        #[arg(long)]
        polarisation: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Slope of a sheaf with respect to a polarisation.
    Slope {
        #[arg(long)]
        fan: String,
        #[arg(long)]
        sheaf: String,
        #[arg(long)]
        polarisation: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Stability verdict of a sheaf, with maximizers and a polystability
    /// decomposition attempt.
    Stability {
        #[arg(long)]
        fan: String,
        #[arg(long)]
        sheaf: String,
        #[arg(long)]
        polarisation: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Build both sides of a flip and report the structural data.
    FlipBuild {
        #[arg(long)]
        flip: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// First-order classification of stability across the flip.
    FlipClassify {
        #[arg(long)]
        flip: String,
        #[arg(long)]
        sheaf: String,
        #[arg(long)]
        polarisation: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Slope of a sheaf along the polarisation family, as a polynomial in
    /// eps (or evaluated at a point).
    EpsSlope {
        #[arg(long)]
        flip: String,
        #[arg(long)]
        sheaf: String,
        /// Base polarisation on the contracted variety.
        #[arg(long)]
        polarisation: String,
        #[arg(long, value_enum)]
        side: SideArg,
        /// Evaluate at a rational parameter instead of printing the
        /// polynomial.
        #[arg(long)]
        epsilon: Option<String>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Degree-proportionality test for the logarithmic subcategory.
    LogCheck {
        #[arg(long)]
        flip: String,
        /// Comma-separated ray indices of delta (may be empty).
        #[arg(long, default_value = "")]
        delta: String,
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        alpha_prime: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

struct Failure {
    code: u8,
    message: String,
}

type CliResult<T> = Result<T, Failure>;

fn schema_failure(msg: String) -> Failure {
    Failure {
        code: 2,
        message: msg,
    }
}

fn semantic_failure(msg: String) -> Failure {
    Failure {
        code: 3,
        message: msg,
    }
}

fn compute_failure(err: flipstab::Error) -> Failure {
    Failure {
        code: 4,
        message: err.to_string(),
    }
}

fn parse_failure(path: &str, err: ParseError) -> Failure {
    match err {
        ParseError::Schema(msg) => schema_failure(format!("{path}: {msg}")),
        ParseError::Semantic(e) => semantic_failure(format!("{path}: {e}")),
    }
}

fn read_file(path: &str) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| schema_failure(format!("cannot read {path}: {e}")))
}

fn load_fan(path: &str) -> CliResult<Fan> {
    let text = read_file(path)?;
    let fan = io::fan_from_json(&text).map_err(|e| parse_failure(path, e))?;
    let report = analyze_fan(&fan);
    if !report.is_valid {
        return Err(semantic_failure(format!(
            "{path}: invalid fan: {}",
            report.diagnostic.unwrap_or_default()
        )));
    }
    Ok(fan)
}

fn load_divisor(path: &str, fan: &Fan) -> CliResult<InvariantDivisor> {
    let text = read_file(path)?;
    io::divisor_from_json(&text, fan).map_err(|e| parse_failure(path, e))
}

fn load_sheaf(path: &str, fan: &Arc<Fan>) -> CliResult<ToricSheaf> {
    let text = read_file(path)?;
    io::sheaf_from_json(&text, fan).map_err(|e| parse_failure(path, e))
}

fn load_flip(path: &str) -> CliResult<FlipData> {
    let text = read_file(path)?;
    let (fan, cone_rays) = io::flip_from_json(&text).map_err(|e| parse_failure(path, e))?;
    let report = analyze_fan(&fan);
    if !report.is_valid {
        return Err(semantic_failure(format!(
            "{path}: invalid base fan: {}",
            report.diagnostic.unwrap_or_default()
        )));
    }
    let fc = validate_flipping_cone(&fan, &Cone::new(cone_rays))
        .map_err(|e| semantic_failure(format!("{path}: {e}")))?;
    build_flip(&fan, &fc).map_err(compute_failure)
}

fn candidate_cap() -> usize {
    std::env::var(CAP_ENV)
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_CANDIDATE_CAP)
}

fn subspace_json(s: &Subspace) -> serde_json::Value {
    json!(s
        .basis()
        .iter()
        .map(|row| row.iter().map(format_rat).collect::<Vec<_>>())
        .collect::<Vec<_>>())
}

fn subspace_text(s: &Subspace) -> String {
    let rows: Vec<String> = s
        .basis()
        .iter()
        .map(|row| {
            let cells: Vec<String> = row.iter().map(format_rat).collect();
            format!("({})", cells.join(", "))
        })
        .collect();
    format!("span{{{}}}", rows.join(", "))
}

fn status_str(s: StabilityStatus) -> &'static str {
    match s {
        StabilityStatus::Stable => "stable",
        StabilityStatus::StrictlySemistable => "strictly_semistable",
        StabilityStatus::Unstable => "unstable",
    }
}

fn verdict_json(v: &StabilityVerdict) -> serde_json::Value {
    json!({
        "status": status_str(v.status),
        "slope": format_rat(&v.slope),
        "witness": v.witness.as_ref().map(subspace_json),
        "maximizers": v.maximizers.iter().map(subspace_json).collect::<Vec<_>>(),
        "max_candidate_slope": v.max_candidate_slope.as_ref().map(format_rat),
    })
}

fn range_json(r: &AmpleRangeSup) -> serde_json::Value {
    match r {
        AmpleRangeSup::Bounded(b) => json!(format_rat(b)),
        AmpleRangeSup::Unbounded => json!("unbounded"),
    }
}

fn range_text(r: &AmpleRangeSup) -> String {
    match r {
        AmpleRangeSup::Bounded(b) => format_rat(b),
        AmpleRangeSup::Unbounded => "unbounded".into(),
    }
}

fn emit(format: Format, text: String, value: serde_json::Value) {
    match format {
        Format::Text => println!("{text}"),
        Format::Json => println!("{}", serde_json::to_string_pretty(&value).unwrap()),
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Analyze { fan, format } => {
            let text = read_file(&fan)?;
            let f = io::fan_from_json(&text).map_err(|e| parse_failure(&fan, e))?;
            let report = analyze_fan(&f);
            let text_out = format!(
                "valid: {}\nsimplicial: {}\ncomplete: {}\nrays: {}\nmaximal cones: {}{}",
                report.is_valid,
                report.is_simplicial,
                report.is_complete,
                report.ray_count,
                report.max_cone_count,
                report
                    .diagnostic
                    .as_ref()
                    .map(|d| format!("\ndiagnostic: {d}"))
                    .unwrap_or_default()
            );
            emit(
                format,
                text_out,
                json!({
                    "valid": report.is_valid,
                    "simplicial": report.is_simplicial,
                    "complete": report.is_complete,
                    "rays": report.ray_count,
                    "maximal_cones": report.max_cone_count,
                    "diagnostic": report.diagnostic,
                }),
            );
            Ok(())
        }
        Command::Intersect {
            fan,
            divisors,
            format,
        } => {
            let f = load_fan(&fan)?;
            let ds = divisors
                .iter()
                .map(|p| load_divisor(p, &f))
                .collect::<CliResult<Vec<_>>>()?;
            let mut engine = IntersectionEngine::new(&f).map_err(compute_failure)?;
            let value = engine.product(&ds).map_err(compute_failure)?;
            emit(
                format,
                format_rat(&value),
                json!({ "value": format_rat(&value) }),
            );
            Ok(())
        }
        Command::Degree {
            fan,
            divisor,
            polarisation,
            format,
        } => {
            let f = load_fan(&fan)?;
            let d = load_divisor(&divisor, &f)?;
            let l = load_divisor(&polarisation, &f)?;
            let mut engine = IntersectionEngine::new(&f).map_err(compute_failure)?;
            let value = engine.degree(&d, &l).map_err(compute_failure)?;
            emit(
                format,
                format_rat(&value),
                json!({ "value": format_rat(&value) }),
            );
            Ok(())
        }
        Command::Slope {
            fan,
            sheaf,
            polarisation,
            format,
        } => {
            let f = Arc::new(load_fan(&fan)?);
            let s = load_sheaf(&sheaf, &f)?;
            let l = load_divisor(&polarisation, &f)?;
            warn_if_not_ample(&f, &l)?;
            let value = flipstab::stability::slope(&s, &l).map_err(compute_failure)?;
            emit(
                format,
                format_rat(&value),
                json!({ "value": format_rat(&value) }),
            );
            Ok(())
        }
        Command::Stability {
            fan,
            sheaf,
            polarisation,
            format,
        } => {
            let f = Arc::new(load_fan(&fan)?);
            let s = load_sheaf(&sheaf, &f)?;
            let l = load_divisor(&polarisation, &f)?;
            warn_if_not_ample(&f, &l)?;
            let cap = candidate_cap();
            let v = stability_verdict_with_cap(&s, &l, cap).map_err(compute_failure)?;
            let decomposition =
                polystable_decomposition_with_cap(&s, &l, cap).map_err(compute_failure)?;
            let mut text_out = format!(
                "status: {}\nslope: {}",
                status_str(v.status),
                format_rat(&v.slope)
            );
            if let Some(w) = &v.witness {
                text_out.push_str(&format!("\nwitness: {}", subspace_text(w)));
            }
            if !v.maximizers.is_empty() {
                text_out.push_str("\nmaximizers:");
                for m in &v.maximizers {
                    text_out.push_str(&format!("\n  {}", subspace_text(m)));
                }
            }
            let poly_json = match &decomposition {
                Decomposition::Summands(parts) => {
                    text_out.push_str(&format!(
                        "\npolystable: yes ({} stable summand{})",
                        parts.len(),
                        if parts.len() == 1 { "" } else { "s" }
                    ));
                    json!({
                        "polystable": true,
                        "summand_ranks": parts.iter().map(|p| p.rank()).collect::<Vec<_>>(),
                    })
                }
                Decomposition::NotPolystable { .. } => {
                    text_out.push_str("\npolystable: no");
                    json!({ "polystable": false })
                }
            };
            emit(
                format,
                text_out,
                json!({ "verdict": verdict_json(&v), "decomposition": poly_json }),
            );
            Ok(())
        }
        Command::FlipBuild { flip, format } => {
            let fd = load_flip(&flip)?;
            let exc = exceptional_data(&fd).map_err(compute_failure)?;
            let fc = fd.flipping_cone();
            let cones = |f: &Fan| -> Vec<Vec<usize>> {
                f.max_cones()
                    .iter()
                    .map(|c| c.ray_indices().collect())
                    .collect()
            };
            let relation: Vec<String> = fc.relation().iter().map(|b| b.to_string()).collect();
            let text_out = format!(
                "flipping cone rays: {:?}\nwall relation: [{}]\nJ+: {:?}\nJ-: {:?}\nJ0: {:?}\n\
                 D+ rays: {:?}\nX maximal cones: {:?}\nX' maximal cones: {:?}\n\
                 dim exceptional in X: {}\ndim exceptional in X': {}\ndim contracted in base: {}\n\
                 fiber fan: rank {}, {} rays",
                fc.ray_indices(),
                relation.join(", "),
                fc.j_plus_rays(),
                fc.j_minus_rays(),
                fc.j_zero_rays(),
                fc.j_plus_rays(),
                cones(fd.x_fan()),
                cones(fd.xprime_fan()),
                exc.dim_exceptional_x,
                exc.dim_exceptional_xprime,
                exc.dim_contracted_base,
                exc.fiber_dim,
                exc.fiber_ray_count,
            );
            emit(
                format,
                text_out,
                json!({
                    "flipping_cone_rays": fc.ray_indices(),
                    "wall_relation": relation,
                    "j_plus": fc.j_plus_rays(),
                    "j_minus": fc.j_minus_rays(),
                    "j_zero": fc.j_zero_rays(),
                    "x_maximal_cones": cones(fd.x_fan()),
                    "xprime_maximal_cones": cones(fd.xprime_fan()),
                    "exceptional_dims": {
                        "x": exc.dim_exceptional_x,
                        "xprime": exc.dim_exceptional_xprime,
                        "base": exc.dim_contracted_base,
                    },
                    "fiber_fan": { "rank": exc.fiber_dim, "rays": exc.fiber_ray_count },
                }),
            );
            Ok(())
        }
        Command::FlipClassify {
            flip,
            sheaf,
            polarisation,
            format,
        } => {
            let fd = load_flip(&flip)?;
            let s = load_sheaf(&sheaf, fd.x_fan())?;
            let l0 = load_divisor(&polarisation, fd.base_fan())?;
            let report =
                classify_flip_with_cap(&fd, &l0, &s, candidate_cap()).map_err(compute_failure)?;
            let (case_str, sides) = match &report.case {
                FlipCase::BothStable => ("(i) stable on both sides", None),
                FlipCase::BothUnstable => ("(ii) unstable on both sides", None),
                FlipCase::StableOnXUnstableOnXPrime => ("(iii) stable on X, unstable on X'", None),
                FlipCase::UnstableOnXStableOnXPrime => ("(iv) unstable on X, stable on X'", None),
                FlipCase::FirstOrderInconclusive {
                    x_side,
                    xprime_side,
                } => (
                    "first-order inconclusive",
                    Some((x_side.clone(), xprime_side.clone())),
                ),
            };
            let mut text_out = format!(
                "pushforward: {} (slope {})\nfirst-order term of the sheaf: {}\ncase: {}",
                status_str(report.base_verdict.status),
                format_rat(&report.base_verdict.slope),
                format_rat(&report.first_order_sheaf),
                case_str,
            );
            for (f, q) in &report.first_order_candidates {
                text_out.push_str(&format!(
                    "\ncandidate {}: first-order term {}",
                    subspace_text(f),
                    format_rat(q)
                ));
            }
            if let Some((vx, vxp)) = &sides {
                text_out.push_str(&format!(
                    "\nsmall-eps on X: {} (threshold {})\nsmall-eps on X': {} (threshold {})",
                    status_str(vx.status),
                    range_text(&vx.threshold),
                    status_str(vxp.status),
                    range_text(&vxp.threshold),
                ));
            }
            emit(
                format,
                text_out,
                json!({
                    "pushforward": verdict_json(&report.base_verdict),
                    "first_order_sheaf": format_rat(&report.first_order_sheaf),
                    "first_order_candidates": report
                        .first_order_candidates
                        .iter()
                        .map(|(f, q)| json!({
                            "subspace": subspace_json(f),
                            "value": format_rat(q),
                        }))
                        .collect::<Vec<_>>(),
                    "case": case_str,
                    "small_eps": sides.as_ref().map(|(vx, vxp)| json!({
                        "x": { "status": status_str(vx.status), "threshold": range_json(&vx.threshold) },
                        "xprime": { "status": status_str(vxp.status), "threshold": range_json(&vxp.threshold) },
                    })),
                }),
            );
            Ok(())
        }
        Command::EpsSlope {
            flip,
            sheaf,
            polarisation,
            side,
            epsilon,
            format,
        } => {
            let fd = load_flip(&flip)?;
            let side: Side = side.into();
            let l0 = load_divisor(&polarisation, fd.base_fan())?;
            let pf = PolarisationFamily::new(&fd, &l0, side).map_err(compute_failure)?;
            let s = load_sheaf(&sheaf, pf.fan())?;
            let poly = pf.epsilon_slope(&s).map_err(compute_failure)?;
            let verdict =
                small_eps_verdict_with_cap(&pf, &s, candidate_cap()).map_err(compute_failure)?;
            match epsilon {
                Some(e) => {
                    let eps: Rat =
                        parse_rat(&e).map_err(|err| schema_failure(format!("--epsilon: {err}")))?;
                    let value = poly.eval(&eps);
                    emit(
                        format,
                        format_rat(&value),
                        json!({
                            "value": format_rat(&value),
                            "epsilon": format_rat(&eps),
                        }),
                    );
                }
                None => {
                    let coeffs: Vec<String> = poly.coeffs().iter().map(format_rat).collect();
                    let text_out = format!(
                        "{}\nsmall-eps verdict: {} (valid below {})",
                        poly.display(),
                        status_str(verdict.status),
                        range_text(&verdict.threshold),
                    );
                    emit(
                        format,
                        text_out,
                        json!({
                            "polynomial": poly.display(),
                            "coeffs": coeffs,
                            "small_eps_status": status_str(verdict.status),
                            "threshold": range_json(&verdict.threshold),
                        }),
                    );
                }
            }
            Ok(())
        }
        Command::LogCheck {
            flip,
            delta,
            alpha,
            alpha_prime,
            format,
        } => {
            let fd = load_flip(&flip)?;
            let delta: Vec<usize> = delta
                .split(',')
                .filter(|t| !t.trim().is_empty())
                .map(|t| {
                    t.trim()
                        .parse()
                        .map_err(|_| schema_failure(format!("--delta: bad index `{t}`")))
                })
                .collect::<CliResult<Vec<_>>>()?;
            if let Some(&bad) = delta.iter().find(|&&i| i >= fd.x_fan().ray_count()) {
                return Err(semantic_failure(format!(
                    "--delta: ray index {bad} out of range"
                )));
            }
            let a = load_divisor(&alpha, fd.x_fan())?;
            let ap = load_divisor(&alpha_prime, fd.xprime_fan())?;
            let outcome = log_preservation_check(&fd, &delta, &a, &ap).map_err(compute_failure)?;
            match outcome {
                LogPreservation::Preserves { ratio } => {
                    let text_out = match &ratio {
                        Some(c) => format!("preserves polystability, c = {}", format_rat(c)),
                        None => {
                            "preserves polystability (vacuous: delta covers all rays)".to_string()
                        }
                    };
                    emit(
                        format,
                        text_out,
                        json!({
                            "preserves": true,
                            "c": ratio.as_ref().map(format_rat),
                            "vacuous": ratio.is_none(),
                        }),
                    );
                }
                LogPreservation::Fails { witness } => {
                    let sheaf = log_witness_sheaf(&fd, &a, witness).map_err(compute_failure)?;
                    let text_out = format!(
                        "fails: degree ratios disagree at rays {} and {}\n\
                         witness sheaf: rank-one sum with twists at those rays (rank {})",
                        witness.0,
                        witness.1,
                        sheaf.rank()
                    );
                    emit(
                        format,
                        text_out,
                        json!({
                            "preserves": false,
                            "witness_rays": [witness.0, witness.1],
                            "witness_sheaf": serde_json::to_value(io::sheaf_to_json(&sheaf))
                                .unwrap(),
                        }),
                    );
                }
            }
            Ok(())
        }
    }
}

fn warn_if_not_ample(fan: &Fan, l: &InvariantDivisor) -> CliResult<()> {
    match cartier_and_ample(fan, l).map_err(compute_failure)? {
        r if r.is_ample() => Ok(()),
        _ => {
            eprintln!("warning: polarisation is not ample; values are exact but verdicts only carry their usual meaning for ample classes");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
