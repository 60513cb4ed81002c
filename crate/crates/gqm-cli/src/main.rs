//! `gqm`: mixed commutator lengths, restricted filling norms, stable-length
//! bounds, quasimorphism calculus, surfaces, and abelian comparisons, with
//! exact-rational certificates.
//!
//! Machine-readable JSON goes to stdout (or `--out`), a human summary to
//! stderr. Exit codes: 0 success, 2 usage/parse error, 3 resource limit,
//! 4 falsified certificate.

use clap::{Parser, Subcommand};
use gqm_core::chains::{
    self, fill_norm_lp, full_finite_support, integral_fill_norm, scl_upper_from_fill,
    support_in_ball, Chain1,
};
use gqm_core::commlength::{cl_mixed, cl_plain, compute_section_constants, ClKind, SearchConfig};
use gqm_core::jsonio::{
    self, chain2_to_json, dual_to_json, load_json, qm_from_json, rational_to_string, save_json,
    surface_from_json, surface_to_json, ContextJson, GroupSpecJson, QmJson, SectionEntryJson,
};
use gqm_core::qm::{ball_pairs, bavard_lower, defect_lower};
use gqm_core::{fixtures, surfaces, verify, Element, Error, FiniteTable, GroupContext, GroupSpec};
use num_traits::Signed;
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "gqm",
    version,
    about = "Mixed commutator lengths, filling norms, and stable-length bounds \
             with exact rational certificates"
)]
struct Cli {
    /// Group context: a JSON file or a builtin name
    /// (free2, free4, d4-rotation, s3-alternating, f2-swap, z2-star-z3)
    #[arg(long, global = true)]
    ctx: Option<String>,
    /// Write the JSON report here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Soft time budget; scales internal enumeration caps and is echoed
    /// in the report with an exceeded flag
    #[arg(long, global = true)]
    budget_ms: Option<u64>,
    /// Seed for randomized checks
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Accepted for interface stability; computations run single-threaded
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Commutator length of an element, mixed (default) or plain
    Cl {
        element: String,
        #[arg(long, default_value_t = 3)]
        max_factors: usize,
        #[arg(long, default_value_t = 2)]
        ball_radius: usize,
        /// Ordinary commutator length in G instead of the mixed length
        #[arg(long)]
        plain: bool,
    },
    /// Two-sided bounds on the stable mixed commutator length
    Scl {
        element: String,
        /// Powers n used for the cl(xⁿ)/n upper bound
        #[arg(long, value_delimiter = ',', default_values_t = vec![1u32, 2])]
        powers: Vec<u32>,
        #[arg(long, default_value_t = 3)]
        max_factors: usize,
        #[arg(long, default_value_t = 2)]
        ball_radius: usize,
        /// Quasimorphism JSON supplying the duality lower bound
        #[arg(long)]
        qm_file: Option<PathBuf>,
        /// Refine the upper bound with a filling-norm LP on this ball radius
        #[arg(long)]
        support_radius: Option<usize>,
    },
    /// Restricted filling norm of an element as an exact LP
    Fill {
        element: String,
        #[arg(long, default_value_t = 2)]
        support_radius: usize,
        /// Use every admissible pair of a finite group as support
        #[arg(long)]
        full_support: bool,
        /// Additional elements adjoined to the support vertex set
        #[arg(long)]
        extra: Vec<String>,
        /// Also compute the minimum over integer-coefficient chains
        #[arg(long)]
        integral: bool,
        #[arg(long, default_value_t = 100_000)]
        node_budget: usize,
    },
    /// Build or validate triangulated surfaces bounding an element
    #[command(subcommand)]
    Surface(SurfaceCmd),
    /// Evaluate, bound, extend, or dualize quasimorphisms
    #[command(subcommand)]
    Qm(QmCmd),
    /// Compare the two abelian sides of the free-product quotient
    FreeproductQuotient {
        /// JSON group spec (kind "finite") of the first factor
        #[arg(long)]
        a: PathBuf,
        /// JSON group spec (kind "finite") of the second factor
        #[arg(long)]
        b: PathBuf,
    },
    /// Section subgroup size M(s) and comparison constant C(s)
    SectionConstants {
        /// JSON list of {quotient, image} entries; defaults to the
        /// shortlex-least section
        #[arg(long)]
        section: Option<PathBuf>,
        #[arg(long, default_value_t = 1_000_000)]
        tuple_budget: usize,
    },
    /// Run the full verification suite on the shipped fixtures
    Verify,
}

#[derive(Subcommand)]
enum SurfaceCmd {
    /// Surface from a commutator decomposition found by search
    FromDecomp {
        element: String,
        #[arg(long, default_value_t = 3)]
        max_factors: usize,
        #[arg(long, default_value_t = 2)]
        ball_radius: usize,
    },
    /// Surface glued from an integral 2-chain (JSON list of chain terms)
    FromChain {
        element: String,
        #[arg(long)]
        chain: PathBuf,
    },
    /// Validate a surface JSON file against the context
    Validate {
        #[arg(long)]
        surface: PathBuf,
    },
}

#[derive(Subcommand)]
enum QmCmd {
    /// Evaluate a quasimorphism at an element
    Eval {
        #[arg(long)]
        qm: PathBuf,
        element: String,
    },
    /// Empirical defect lower bound over a ball, next to any declared bound
    Defect {
        #[arg(long)]
        qm: PathBuf,
        #[arg(long, default_value_t = 2)]
        radius: usize,
    },
    /// Build an extension (spec kind "extended") and check its restriction
    Extend {
        #[arg(long)]
        qm: PathBuf,
        #[arg(long, default_value_t = 2)]
        radius: usize,
    },
    /// Duality lower bound |f(x)| / (2·D) on the stable length
    Bavard {
        #[arg(long)]
        qm: PathBuf,
        element: String,
    },
}

fn main() {
    let cli = Cli::parse();
    let started = Instant::now();
    let code = match run(&cli, started) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    };
    std::process::exit(code);
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::ResourceLimit(_) | Error::InfiniteCosetSpace => 3,
        Error::BoundaryMismatch
        | Error::ProductMismatch
        | Error::NotTransversal
        | Error::NotClosed
        | Error::NonIntegral => 4,
        _ => 2,
    }
}

fn load_context(cli: &Cli) -> Result<GroupContext, Error> {
    let Some(name) = &cli.ctx else {
        return Err(Error::Parse("missing --ctx (file or builtin name)".into()));
    };
    if std::path::Path::new(name).is_file() {
        let j: ContextJson = load_json(std::path::Path::new(name))?;
        return j.to_context();
    }
    match name.as_str() {
        "free2" => GroupContext::trivial(fixtures::free2()),
        "free4" => GroupContext::trivial(fixtures::free4()),
        "d4-rotation" => fixtures::d4_rotation_context(),
        "s3-alternating" => fixtures::s3_alternating_context(),
        "f2-swap" => fixtures::f2_swap_context(),
        "z2-star-z3" => fixtures::z2_star_z3_context(),
        other => Err(Error::Parse(format!("unknown context {other:?}: not a file or builtin"))),
    }
}

fn element_cap(cli: &Cli) -> usize {
    match cli.budget_ms {
        // Rough translation of wall time into enumeration work.
        Some(ms) => (ms as usize).saturating_mul(2_000).clamp(1_000, gqm_core::DEFAULT_ELEMENT_CAP),
        None => gqm_core::DEFAULT_ELEMENT_CAP,
    }
}

fn search_config(cli: &Cli, ball_radius: usize, max_factors: usize) -> SearchConfig {
    SearchConfig { ball_radius, max_factors, element_cap: element_cap(cli), meet_in_middle: true }
}

/// FNV-1a over the canonical inputs JSON; a stable fingerprint for the
/// report, not a cryptographic digest.
fn digest(inputs: &Value) -> String {
    let bytes = serde_json::to_string(inputs).unwrap_or_default();
    let mut h: u64 = 0xcbf29ce484222325;
    for b in bytes.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    format!("{h:016x}")
}

fn emit(cli: &Cli, command: &str, inputs: Value, results: Value, certificates: Value, started: Instant, summary: &str) -> Result<(), Error> {
    let elapsed = started.elapsed().as_millis() as u64;
    let report = json!({
        "command": command,
        "inputs": inputs,
        "digest": digest(&json!({"command": command, "inputs": &inputs})),
        "results": results,
        "certificates": certificates,
        "timing_ms": elapsed,
        "budget": {
            "budget_ms": cli.budget_ms,
            "exceeded": cli.budget_ms.map_or(false, |b| elapsed > b),
        },
    });
    eprintln!("{summary}");
    match &cli.out {
        Some(path) => save_json(path, &report)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            serde_json::to_writer_pretty(&mut stdout, &report)
                .map_err(|e| Error::Parse(format!("cannot write report: {e}")))?;
            writeln!(stdout).ok();
        }
    }
    Ok(())
}

fn word_of(e: &Element, ctx: &GroupContext) -> String {
    e.word().display(ctx.group().gen_names())
}

fn witness_json(witness: &Option<Vec<(Element, Element)>>, ctx: &GroupContext) -> Value {
    match witness {
        None => Value::Null,
        Some(pairs) => Value::Array(
            pairs
                .iter()
                .map(|(g, h)| json!({"g": word_of(g, ctx), "h": word_of(h, ctx)}))
                .collect(),
        ),
    }
}

fn run(cli: &Cli, started: Instant) -> Result<i32, Error> {
    match &cli.command {
        Cmd::Cl { element, max_factors, ball_radius, plain } => {
            let ctx = load_context(cli)?;
            let x = ctx.group().parse(element)?;
            let cfg = search_config(cli, *ball_radius, *max_factors);
            let res = if *plain {
                cl_plain(ctx.group(), &x, &cfg)?
            } else {
                cl_mixed(&ctx, &x, &cfg)?
            };
            res.verify(&ctx, &x)?;
            let kind = match res.kind {
                ClKind::Exact => "exact",
                ClKind::UpperBound => "upper-bound",
                ClKind::NotFound => "not-found",
            };
            let name = if *plain { "cl" } else { "cl-mixed" };
            let inputs = json!({
                "ctx": cli.ctx, "element": element, "max_factors": max_factors,
                "ball_radius": ball_radius, "plain": plain,
            });
            let results = json!([{ "name": name, "kind": kind, "value": res.value }]);
            let certs = json!({"witness": witness_json(&res.witness, &ctx)});
            let summary = match res.value {
                Some(v) => format!("{name}({element}) = {v} ({kind})"),
                None => format!("{name}({element}): no decomposition within budget"),
            };
            emit(cli, "cl", inputs, results, certs, started, &summary)?;
            Ok(0)
        }
        Cmd::Scl { element, powers, max_factors, ball_radius, qm_file, support_radius } => {
            let ctx = load_context(cli)?;
            let x = ctx.group().parse(element)?;
            let cfg = search_config(cli, *ball_radius, *max_factors);
            let mut qm_cert = Value::Null;
            let qm_lower = match qm_file {
                None => None,
                Some(path) => {
                    let spec: QmJson = load_json(path)?;
                    let f = qm_from_json(&spec, &ctx)?;
                    let d = f.d_upper.clone().ok_or(Error::MissingDefectBound)?;
                    let fx = f.eval(&x)?;
                    let lower = bavard_lower(&d, &fx)?;
                    qm_cert = json!({
                        "name": f.name,
                        "value_at_x": rational_to_string(&fx),
                        "defect_upper": rational_to_string(&d),
                    });
                    Some(lower)
                }
            };
            let report = gqm_core::commlength::scl_mixed_report(&ctx, &x, &cfg, powers, qm_lower)?;
            let mut upper = report.upper.clone();
            let mut upper_src = if report.upper_exact_cl { "cl-exact" } else { "cl-search" };
            let mut lp_cert = Value::Null;
            if let Some(radius) = support_radius {
                let support = support_in_ball(&ctx, *radius, &[x.clone()], element_cap(cli))?;
                match scl_upper_from_fill(&ctx, &x, 1, &support) {
                    Ok(v) => {
                        lp_cert = json!({
                            "support_radius": radius,
                            "scl_upper": rational_to_string(&v),
                        });
                        if upper.as_ref().map_or(true, |u| v < *u) {
                            upper = Some(v);
                            upper_src = "filling-lp";
                        }
                    }
                    Err(Error::Infeasible) => {
                        lp_cert = json!({"support_radius": radius, "status": "infeasible"});
                    }
                    Err(e) => return Err(e),
                }
            }
            if let Some(u) = &upper {
                if report.lower > *u {
                    eprintln!("falsified: lower {} exceeds upper {}", report.lower, u);
                    return Ok(4);
                }
            }
            let inputs = json!({
                "ctx": cli.ctx, "element": element, "powers": powers,
                "max_factors": max_factors, "ball_radius": ball_radius,
                "qm_file": qm_file, "support_radius": support_radius,
            });
            let results = json!([
                {"name": "scl-lower", "kind": "lower-bound",
                 "value": rational_to_string(&report.lower)},
                {"name": "scl-upper", "kind": "upper-bound",
                 "value": upper.as_ref().map(rational_to_string),
                 "source": upper_src},
            ]);
            let power_json: Vec<Value> = report
                .power_results
                .iter()
                .map(|(n, r)| {
                    json!({"power": n, "cl": r.value, "witness": witness_json(&r.witness, &ctx)})
                })
                .collect();
            let certs = json!({"powers": power_json, "quasimorphism": qm_cert, "lp": lp_cert});
            let summary = format!(
                "scl({element}) in [{}, {}]",
                report.lower,
                upper.as_ref().map_or("?".to_string(), |u| u.to_string())
            );
            emit(cli, "scl", inputs, results, certs, started, &summary)?;
            Ok(0)
        }
        Cmd::Fill { element, support_radius, full_support, extra, integral, node_budget } => {
            let ctx = load_context(cli)?;
            let x = ctx.group().parse(element)?;
            let support = if *full_support {
                full_finite_support(&ctx)?
            } else {
                let mut extras = vec![x.clone()];
                for w in extra {
                    extras.push(ctx.group().parse(w)?);
                }
                support_in_ball(&ctx, *support_radius, &extras, element_cap(cli))?
            };
            let target = Chain1::single(x.clone());
            let fill = match fill_norm_lp(&ctx, &target, &support) {
                Ok(f) => f,
                Err(Error::Infeasible) => {
                    // Not an error: the element has no filling inside this
                    // support (for instance, it is not in [G,N]).
                    let inputs = json!({
                        "ctx": cli.ctx, "element": element,
                        "support_radius": support_radius, "full_support": full_support,
                        "extra": extra, "integral": integral,
                    });
                    let results = json!([{
                        "name": "fill-norm-restricted", "kind": "exact",
                        "value": Value::Null, "status": "infeasible",
                        "support_pairs": support.len(),
                    }]);
                    let summary =
                        format!("{element} has no filling within the given support");
                    emit(cli, "fill", inputs, results, Value::Null, started, &summary)?;
                    return Ok(0);
                }
                Err(e) => return Err(e),
            };
            let (feasible, dual_value) =
                chains::verify_dual_certificate(&ctx, &fill.dual, &support, &target)?;
            if !feasible || dual_value != fill.value {
                eprintln!("falsified: dual certificate does not reproduce the LP value");
                return Ok(4);
            }
            let mut results = vec![json!({
                "name": "fill-norm-restricted", "kind": "exact",
                "value": rational_to_string(&fill.value),
                "support_pairs": support.len(),
            })];
            let mut integral_cert = Value::Null;
            if *integral {
                match integral_fill_norm(&ctx, &x, &support, *node_budget) {
                    Ok((iv, iw)) => {
                        results.push(json!({
                            "name": "fill-norm-integral", "kind": "exact",
                            "value": iv.to_string(),
                        }));
                        integral_cert = Value::Array(
                            chain2_to_json(&iw, ctx.group())
                                .into_iter()
                                .map(|t| serde_json::to_value(t).unwrap())
                                .collect(),
                        );
                    }
                    // Rational fillings can exist where integral ones do not.
                    Err(Error::Infeasible) => {
                        results.push(json!({
                            "name": "fill-norm-integral", "kind": "exact",
                            "value": Value::Null, "status": "infeasible",
                        }));
                    }
                    Err(e) => return Err(e),
                }
            }
            let inputs = json!({
                "ctx": cli.ctx, "element": element, "support_radius": support_radius,
                "full_support": full_support, "extra": extra, "integral": integral,
            });
            let witness_json: Vec<Value> = chain2_to_json(&fill.witness, ctx.group())
                .into_iter()
                .map(|t| serde_json::to_value(t).unwrap())
                .collect();
            let dual_json: Vec<Value> = dual_to_json(&fill.dual, ctx.group())
                .into_iter()
                .map(|t| serde_json::to_value(t).unwrap())
                .collect();
            let certs = json!({
                "witness_chain": witness_json,
                "dual": dual_json,
                "integral_chain": integral_cert,
            });
            let summary = format!("restricted filling norm of {element}: {}", fill.value);
            emit(cli, "fill", inputs, results.into(), certs, started, &summary)?;
            Ok(0)
        }
        Cmd::Surface(sub) => run_surface(cli, sub, started),
        Cmd::Qm(sub) => run_qm(cli, sub, started),
        Cmd::FreeproductQuotient { a, b } => {
            let ta = finite_table(a)?;
            let tb = finite_table(b)?;
            let (agree, lhs, rhs) = gqm_core::abelian::check_freeindex(&ta, &tb)?;
            let inputs = json!({"a": a, "b": b});
            let results = json!([
                {"name": "tensor-side", "kind": "exact",
                 "invariant_factors": factors_json(&lhs)},
                {"name": "quotient-side", "kind": "exact",
                 "invariant_factors": factors_json(&rhs)},
                {"name": "verdict", "kind": "exact", "value": agree},
            ]);
            let summary = format!("tensor side {lhs}; quotient side {rhs}; agree: {agree}");
            emit(cli, "freeproduct-quotient", inputs, results, Value::Null, started, &summary)?;
            if agree {
                Ok(0)
            } else {
                Ok(4)
            }
        }
        Cmd::SectionConstants { section, tuple_budget } => {
            let ctx = load_context(cli)?;
            let table: BTreeMap<Element, Element> = match section {
                None => verify::shortlex_section(&ctx)?,
                Some(path) => {
                    let entries: Vec<SectionEntryJson> = load_json(path)?;
                    let mut out = BTreeMap::new();
                    for e in &entries {
                        out.insert(
                            ctx.quotient_group().parse(&e.quotient)?,
                            ctx.group().parse(&e.image)?,
                        );
                    }
                    out
                }
            };
            let data = compute_section_constants(&ctx, &table, *tuple_budget)?;
            let inputs = json!({"ctx": cli.ctx, "section": section, "tuple_budget": tuple_budget});
            let results = json!([
                {"name": "ms", "kind": "exact", "value": data.ms},
                {"name": "cs", "kind": "exact", "value": rational_to_string(&data.cs)},
                {"name": "generated_subgroup_order", "kind": "exact",
                 "value": data.generated_subgroup.len()},
            ]);
            let section_json: Vec<Value> = data
                .section
                .iter()
                .map(|(q, s)| {
                    json!({
                        "quotient": q.word().display(ctx.quotient_group().gen_names()),
                        "image": word_of(s, &ctx),
                    })
                })
                .collect();
            let certs = json!({"section": section_json});
            let summary = format!("M(s) = {}, C(s) = {}", data.ms, data.cs);
            emit(cli, "section-constants", inputs, results, certs, started, &summary)?;
            Ok(0)
        }
        Cmd::Verify => {
            let results = verify::run_all(cli.seed);
            let mut all_passed = true;
            for r in &results {
                let status = if r.passed { "PASS" } else { "FAIL" };
                all_passed &= r.passed;
                eprintln!(
                    "criterion {:>2}: {status} — {} — {} ({} ms)",
                    r.index, r.name, r.detail, r.millis
                );
            }
            let json_results: Vec<Value> = results
                .iter()
                .map(|r| {
                    json!({
                        "index": r.index, "name": r.name,
                        "kind": "exact", "value": r.passed, "detail": r.detail,
                    })
                })
                .collect();
            let inputs = json!({"seed": cli.seed});
            let summary = if all_passed {
                format!("all {} checks passed", results.len())
            } else {
                "verification FAILED".to_string()
            };
            emit(cli, "verify", inputs, json_results.into(), Value::Null, started, &summary)?;
            if all_passed {
                Ok(0)
            } else {
                Ok(4)
            }
        }
    }
}

fn finite_table(path: &PathBuf) -> Result<FiniteTable, Error> {
    let spec: GroupSpecJson = load_json(path)?;
    match spec.to_spec()? {
        GroupSpec::Finite(t) => Ok(t),
        _ => Err(Error::InvalidSpec("expected a finite multiplication-table spec".into())),
    }
}

fn factors_json(g: &gqm_core::abelian::FinAbGroup) -> Vec<String> {
    g.invariant_factors.iter().map(|d| d.to_string()).collect()
}

fn genus_str(r: &surfaces::SurfaceReport) -> String {
    r.genus.map_or("undefined".to_string(), |g| g.to_string())
}

fn surface_report_json(r: &surfaces::SurfaceReport) -> Value {
    json!({
        "connected": r.connected,
        "orientable": r.orientable,
        "gn_labelled": r.gn_labelled,
        "vertices": r.vertices,
        "edges": r.edge_count,
        "triangles": r.triangle_count,
        "boundary_edges": r.boundary_edge_count,
        "genus": r.genus,
    })
}

fn run_surface(cli: &Cli, sub: &SurfaceCmd, started: Instant) -> Result<i32, Error> {
    match sub {
        SurfaceCmd::FromDecomp { element, max_factors, ball_radius } => {
            let ctx = load_context(cli)?;
            let x = ctx.group().parse(element)?;
            let cfg = search_config(cli, *ball_radius, *max_factors);
            let cl = cl_mixed(&ctx, &x, &cfg)?;
            let Some(witness) = &cl.witness else {
                return Err(Error::ResourceLimit(
                    "no commutator decomposition within budget".into(),
                ));
            };
            let built = surfaces::build_from_decomposition(&ctx, witness, &x)?;
            let report = surfaces::validate(&built.surface, &ctx)?;
            let inputs = json!({
                "ctx": cli.ctx, "element": element,
                "max_factors": max_factors, "ball_radius": ball_radius,
            });
            let results = json!([
                {"name": "genus", "kind": "exact", "value": report.genus},
                {"name": "census", "kind": "exact", "value": surface_report_json(&report)},
            ]);
            let certs = json!({
                "surface": surface_to_json(&built.surface, ctx.group()),
                "decomposition": witness_json(&cl.witness, &ctx),
                "pruned_triangles": built.pruned_triangles,
            });
            let summary = format!(
                "surface with boundary {element}: genus {}, {} triangles",
                genus_str(&report), report.triangle_count
            );
            emit(cli, "surface from-decomp", inputs, results, certs, started, &summary)?;
            Ok(0)
        }
        SurfaceCmd::FromChain { element, chain } => {
            let ctx = load_context(cli)?;
            let x = ctx.group().parse(element)?;
            let terms: Vec<jsonio::ChainTermJson> = load_json(chain)?;
            let c = jsonio::chain2_from_json(&terms, ctx.group())?;
            let built = surfaces::build_from_chain(&ctx, &c, &x)?;
            let report = surfaces::validate(&built.surface, &ctx)?;
            let inputs = json!({"ctx": cli.ctx, "element": element, "chain": chain});
            let results = json!([
                {"name": "genus", "kind": "exact", "value": report.genus},
                {"name": "census", "kind": "exact", "value": surface_report_json(&report)},
            ]);
            let certs = json!({
                "surface": surface_to_json(&built.surface, ctx.group()),
                "pruned_triangles": built.pruned_triangles,
            });
            let summary = format!(
                "surface from chain: genus {}, {} triangles",
                genus_str(&report), report.triangle_count
            );
            emit(cli, "surface from-chain", inputs, results, certs, started, &summary)?;
            Ok(0)
        }
        SurfaceCmd::Validate { surface } => {
            let ctx = load_context(cli)?;
            let j: jsonio::SurfaceJson = load_json(surface)?;
            let s = surface_from_json(&j, ctx.group())?;
            let report = surfaces::validate(&s, &ctx)?;
            let inputs = json!({"ctx": cli.ctx, "surface": surface});
            let results = json!([
                {"name": "census", "kind": "exact", "value": surface_report_json(&report)},
            ]);
            let summary = format!(
                "valid surface: genus {}, connected {}, boundary edges {}",
                genus_str(&report), report.connected, report.boundary_edge_count
            );
            emit(cli, "surface validate", inputs, results, Value::Null, started, &summary)?;
            Ok(0)
        }
    }
}

fn run_qm(cli: &Cli, sub: &QmCmd, started: Instant) -> Result<i32, Error> {
    match sub {
        QmCmd::Eval { qm, element } => {
            let ctx = load_context(cli)?;
            let spec: QmJson = load_json(qm)?;
            let f = qm_from_json(&spec, &ctx)?;
            let x = ctx.group().parse(element)?;
            let v = f.eval(&x)?;
            let inputs = json!({"ctx": cli.ctx, "qm": qm, "element": element});
            let results = json!([
                {"name": "value", "kind": "exact", "value": rational_to_string(&v)},
            ]);
            let summary = format!("{}({element}) = {v}", f.name);
            emit(cli, "qm eval", inputs, results, Value::Null, started, &summary)?;
            Ok(0)
        }
        QmCmd::Defect { qm, radius } => {
            let ctx = load_context(cli)?;
            let spec: QmJson = load_json(qm)?;
            let f = qm_from_json(&spec, &ctx)?;
            let samples = ball_pairs(ctx.group(), *radius, element_cap(cli))?;
            let (lower, attainer) = defect_lower(&f, &samples)?;
            if let Some(d) = &f.d_upper {
                if lower > *d {
                    eprintln!("falsified: sampled defect {lower} exceeds declared bound {d}");
                    return Ok(4);
                }
            }
            let inputs = json!({"ctx": cli.ctx, "qm": qm, "radius": radius});
            let mut results = vec![json!({
                "name": "defect", "kind": "lower-bound",
                "value": rational_to_string(&lower), "samples": samples.len(),
                "attained_at": attainer
                    .as_ref()
                    .map(|(g1, g2)| json!([word_of(g1, &ctx), word_of(g2, &ctx)])),
            })];
            if let Some(d) = &f.d_upper {
                results.push(json!({
                    "name": "defect", "kind": "upper-bound",
                    "value": rational_to_string(d), "source": "declared",
                }));
            }
            let summary = match &f.d_upper {
                Some(d) => format!("D({}) in [{lower}, {d}]", f.name),
                None => format!("D({}) ≥ {lower}", f.name),
            };
            emit(cli, "qm defect", inputs, results.into(), Value::Null, started, &summary)?;
            Ok(0)
        }
        QmCmd::Extend { qm, radius } => {
            let ctx = load_context(cli)?;
            let spec: QmJson = load_json(qm)?;
            let QmJson::Extended { base, .. } = &spec else {
                return Err(Error::InvalidSpec("qm extend needs a spec of kind \"extended\"".into()));
            };
            let f = qm_from_json(&spec, &ctx)?;
            let base_f = qm_from_json(base, &ctx)?;
            // The extension must restrict to the base map on the normal
            // subgroup; check this on every kernel element of a ball.
            let mut checked = 0usize;
            for g in ctx.group().ball(*radius, element_cap(cli))? {
                if !ctx.in_normal_subgroup(&g)? {
                    continue;
                }
                if f.eval(&g)? != base_f.eval(&g)? {
                    eprintln!("falsified: extension differs from the base map at {g}");
                    return Ok(4);
                }
                checked += 1;
            }
            let inputs = json!({"ctx": cli.ctx, "qm": qm, "radius": radius});
            let mut results = vec![json!({
                "name": "restriction-exact", "kind": "exact",
                "value": true, "kernel_samples": checked,
            })];
            if let Some(d) = &f.d_upper {
                results.push(json!({
                    "name": "defect", "kind": "upper-bound",
                    "value": rational_to_string(d),
                }));
            }
            if let Some(d) = &f.dpp_upper {
                results.push(json!({
                    "name": "defect-on-kernel", "kind": "upper-bound",
                    "value": rational_to_string(d),
                }));
            }
            let summary =
                format!("extension {} restricts exactly on {checked} kernel elements", f.name);
            emit(cli, "qm extend", inputs, results.into(), Value::Null, started, &summary)?;
            Ok(0)
        }
        QmCmd::Bavard { qm, element } => {
            let ctx = load_context(cli)?;
            let spec: QmJson = load_json(qm)?;
            let f = qm_from_json(&spec, &ctx)?;
            let d = f.d_upper.clone().ok_or(Error::MissingDefectBound)?;
            let x = ctx.group().parse(element)?;
            let fx = f.eval(&x)?;
            let lower = bavard_lower(&d, &fx)?;
            let inputs = json!({"ctx": cli.ctx, "qm": qm, "element": element});
            let results = json!([
                {"name": "scl-lower", "kind": "lower-bound",
                 "value": rational_to_string(&lower)},
            ]);
            let certs = json!({
                "value_at_x": rational_to_string(&fx),
                "defect_upper": rational_to_string(&d),
                "abs_value": rational_to_string(&fx.abs()),
            });
            let summary = format!("scl({element}) ≥ {lower} via {}", f.name);
            emit(cli, "qm bavard", inputs, results, certs, started, &summary)?;
            Ok(0)
        }
    }
}
