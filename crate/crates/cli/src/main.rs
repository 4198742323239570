//! `kcomplete`: command-line front end for law discovery, construction and
//! certification. JSON goes to stdout (or `--out`), summaries to stderr.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use kcomplete_core::addlaws::{
    check_law, bundled_law, bundled_law_ids, validate_law, AdditionLaw, ScanMode,
};
use kcomplete_core::complete::{certify_k_complete, incompleteness_witness, Verdict};
use kcomplete_core::construct_ec::{build_k_complete_law, scan_small_q};
use kcomplete_core::genus2::{
    build_theta_classes, find_orbit4_point, scan_genus2_counterexamples, HyperellipticCurve,
};
use kcomplete_core::hyperplane::build_family;
use kcomplete_core::lawspace::{discover, discover_descended, random_law};
use kcomplete_core::models::{CurveModel, EdwardsCurve, HessianCurve, ModelKind, WeierstrassCurve};
use kcomplete_core::Field;

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser, Debug)]
#[command(
    name = "kcomplete",
    version,
    about = "Complete addition laws over small finite fields"
)]
struct Cli {
    /// Worker threads for scans; defaults to the number of cores.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Write the JSON result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct CurveArg {
    /// `weierstrass:p^k:a1,a2,a3,a4,a6`, `edwards:p^k:d` or `hessian:p^k:a,d`.
    #[arg(long)]
    curve: String,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a k-complete law for a Weierstrass curve from a Galois orbit.
    Construct(CurveArg),
    /// Validate laws against the group law and check k-completeness.
    Certify {
        #[command(flatten)]
        curve: CurveArg,
        /// A bundled law id or a path to a law JSON file; repeatable.
        #[arg(long, required = true)]
        law: Vec<String>,
    },
    /// Find a basis of the addition laws of a bidegree.
    DiscoverLaws {
        /// Model kind for a seeded random curve, used when `--curve` is absent.
        #[arg(long, default_value = "weierstrass")]
        model: String,
        #[arg(long)]
        curve: Option<String>,
        /// Field order for the random curve.
        #[arg(long, default_value_t = 1009)]
        q: u64,
        #[arg(long, default_value = "2,2", value_parser = parse_bidegree)]
        bidegree: (u8, u8),
    },
    /// Search extensions for a pair on which a law vanishes.
    Witness {
        #[command(flatten)]
        curve: CurveArg,
        /// A bundled law id or law JSON file; a seeded random law otherwise.
        #[arg(long)]
        law: Option<String>,
        #[arg(long, default_value = "2,2", value_parser = parse_bidegree)]
        bidegree: (u8, u8),
        /// Largest extension degree tried.
        #[arg(long, default_value_t = 6)]
        ext: u32,
    },
    /// List curves over F_q whose norm kernel from F_{q^3} is rational.
    ScanEcCounterexamples {
        #[arg(long)]
        q: u64,
    },
    /// Hyperplanes over the conjugates of a generator of F_{q^d}.
    Hyperplane {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        d: u32,
        #[arg(long)]
        r0: usize,
    },
    /// Orbit of four points and theta-translate intersections on a genus-2 curve.
    Genus2Pipeline {
        /// `hyper:p^k:c0,c1,..` for `y^2 = c0 + c1 x + ..`.
        #[arg(long)]
        curve: String,
    },
    /// List genus-2 curves over F_q without an orbit-4 point.
    ScanG2Counterexamples {
        #[arg(long)]
        q: u64,
    },
    /// Count points of a genus-2 curve over F_{q^e}.
    G2Count {
        #[arg(long)]
        curve: String,
        #[arg(long, default_value_t = 1)]
        ext: u32,
    },
    /// Run the bundled law tuples against the group law.
    ValidateLaws {
        /// Curves to test on; a default set otherwise.
        #[arg(long)]
        curve: Vec<String>,
    },
}

fn parse_bidegree(s: &str) -> Result<(u8, u8), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("bidegree `{s}` is not of the form m,n"))?;
    let a = a.trim().parse().map_err(|e| format!("{e}"))?;
    let b = b.trim().parse().map_err(|e| format!("{e}"))?;
    Ok((a, b))
}

/// A command result: JSON body, stderr summary and whether it is positive.
struct Outcome {
    body: Value,
    summary: String,
    positive: bool,
}

fn load_law(arg: &str, model: &CurveModel) -> anyhow::Result<AdditionLaw> {
    if bundled_law_ids().iter().any(|id| id == arg) {
        return Ok(bundled_law(arg, model)?);
    }
    let text = std::fs::read_to_string(arg)
        .with_context(|| format!("`{arg}` is neither a bundled law nor a readable file"))?;
    let v: Value = serde_json::from_str(&text).with_context(|| format!("parsing {arg}"))?;
    // accept a bare law or any object carrying one under "law"
    let v = v
        .get("result")
        .and_then(|r| r.get("law"))
        .or(v.get("law"))
        .unwrap_or(&v);
    let law = AdditionLaw::from_json(v)?;
    if law.model() != model {
        bail!("law in {arg} is on {}, not {model}", law.model());
    }
    Ok(law)
}

fn construct(seed: u64, curve: &str) -> anyhow::Result<Outcome> {
    let c = CurveModel::parse(curve)?;
    let built = build_k_complete_law(&c, seed)?;
    let ok = built.certificate.verdict == Verdict::KComplete;
    Ok(Outcome {
        summary: built.certificate.pretty(&c),
        body: built.to_json(),
        positive: ok,
    })
}

fn certify(curve: &str, law_args: &[String]) -> anyhow::Result<Outcome> {
    let c = CurveModel::parse(curve)?;
    let mut laws = Vec::new();
    let mut reports = Vec::new();
    let mut disagree = Vec::new();
    for arg in law_args {
        let mut law = load_law(arg, &c)?;
        let rep = check_law(&law, ScanMode::Exhaustive)?;
        reports.push(rep.to_json(c.field()));
        if rep.agrees() {
            validate_law(&mut law, ScanMode::Exhaustive)?;
            laws.push(law);
        } else {
            disagree.push(arg.clone());
        }
    }
    if !disagree.is_empty() {
        return Ok(Outcome {
            summary: format!(
                "{c}: laws disagree with the group law: {}\n",
                disagree.join(", ")
            ),
            body: json!({ "validation": reports, "certificate": Value::Null }),
            positive: false,
        });
    }
    let cert = certify_k_complete(&c, &laws)?;
    Ok(Outcome {
        summary: cert.pretty(&c),
        positive: cert.verdict == Verdict::KComplete,
        body: json!({ "validation": reports, "certificate": cert.to_json(&c) }),
    })
}

fn random_model(kind: ModelKind, q: u64, seed: u64) -> anyhow::Result<CurveModel> {
    let k = Field::of_order(q)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(CurveModel::random(kind, &k, &mut rng)?)
}

fn discover_laws(
    seed: u64,
    model: &str,
    curve: Option<&str>,
    q: u64,
    bidegree: (u8, u8),
) -> anyhow::Result<Outcome> {
    let c = match curve {
        Some(s) => CurveModel::parse(s)?,
        None => random_model(ModelKind::parse(model)?, q, seed)?,
    };
    let basis = discover_descended(&c, bidegree, seed)?;
    Ok(Outcome {
        summary: format!(
            "{c}: bidegree ({},{}) law space has dimension {}\n",
            bidegree.0,
            bidegree.1,
            basis.dim()
        ),
        body: basis.to_json(),
        positive: true,
    })
}

fn witness(
    seed: u64,
    curve: &str,
    law: Option<&str>,
    bidegree: (u8, u8),
    ext: u32,
) -> anyhow::Result<Outcome> {
    let c = CurveModel::parse(curve)?;
    let law = match law {
        Some(arg) => load_law(arg, &c)?,
        None => {
            let basis = if c.field().order() >= 500 {
                discover(&c, bidegree, None, seed)?
            } else {
                discover_descended(&c, bidegree, seed)?
            };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            random_law(&basis, &mut rng)?
        }
    };
    let search = incompleteness_witness(&law, ext)?;
    let summary = match &search.witness {
        Some(w) => {
            let k = w.model.field();
            format!(
                "{c}: `{}` vanishes at ({}), ({}) over {}\n",
                law.label(),
                w.p.format(k),
                w.q.format(k),
                k
            )
        }
        None => format!(
            "{c}: no exceptional pair up to degree {}\n",
            search.scanned.last().copied().unwrap_or(0)
        ),
    };
    Ok(Outcome {
        summary,
        positive: search.witness.is_some(),
        body: json!({
            "law": law.to_json(),
            "scanned_degrees": search.scanned,
            "stopped_at": search.stopped_at,
            "witness": search.witness.as_ref().map(|w| w.to_json()),
        }),
    })
}

fn scan_ec(q: u64) -> anyhow::Result<Outcome> {
    let scan = scan_small_q(q)?;
    Ok(Outcome {
        summary: format!(
            "q = {q}: {} of {} curves have a rational norm kernel\n",
            scan.counterexamples.len(),
            scan.curves_scanned
        ),
        body: scan.to_json(),
        positive: true,
    })
}

fn hyperplane(q: u64, d: u32, r0: usize) -> anyhow::Result<Outcome> {
    let fam = build_family(q, d, r0)?;
    let rep = fam.check_empty()?;
    Ok(Outcome {
        summary: format!(
            "q = {q}, d = {d}, r0 = {r0}: {} points scanned, {}\n",
            rep.points_scanned,
            if rep.empty() {
                "no rational zeros"
            } else {
                "rational zeros found"
            }
        ),
        body: fam.to_json(&rep),
        positive: rep.empty(),
    })
}

fn genus2_pipeline(curve: &str) -> anyhow::Result<Outcome> {
    let c = HyperellipticCurve::parse(curve)?;
    let Some(orbit) = find_orbit4_point(&c)? else {
        return Ok(Outcome {
            summary: format!("{c}: no orbit of four points\n"),
            body: json!({ "curve": c.to_string(), "orbit": Value::Null }),
            positive: false,
        });
    };
    let rep = build_theta_classes(&c, &orbit)?;
    Ok(Outcome {
        summary: format!(
            "{c}: {} ({} mode, four-fold intersection {})\n",
            if rep.passed() { "passed" } else { "failed" },
            rep.mode.name(),
            if rep.fourfold.is_empty() {
                "empty"
            } else {
                "nonempty"
            }
        ),
        positive: rep.passed(),
        body: rep.to_json(),
    })
}

fn scan_g2(q: u64) -> anyhow::Result<Outcome> {
    let scan = scan_genus2_counterexamples(q)?;
    Ok(Outcome {
        summary: format!(
            "q = {q}: {} of {} curves lack an orbit-4 point\n",
            scan.without_orbit.len(),
            scan.curves_scanned
        ),
        body: scan.to_json(),
        positive: true,
    })
}

fn g2_count(curve: &str, ext: u32) -> anyhow::Result<Outcome> {
    let c = HyperellipticCurve::parse(curve)?;
    let n = c.count_points(ext)?;
    Ok(Outcome {
        summary: format!("{c}: {n} points over the degree-{ext} extension\n"),
        body: json!({ "curve": c.to_string(), "extension_degree": ext, "points": n }),
        positive: true,
    })
}

fn default_validation_curves() -> anyhow::Result<Vec<CurveModel>> {
    let k13 = Field::of_order(13)?;
    let k7 = Field::of_order(7)?;
    Ok(vec![
        CurveModel::Edwards(EdwardsCurve::new(&k13, k13.from_int(2))?),
        CurveModel::Hessian(HessianCurve::new(&k7, k7.from_int(2), k7.from_int(1))?),
        CurveModel::Weierstrass(WeierstrassCurve::short(
            &k7,
            k7.from_int(1),
            k7.from_int(1),
        )?),
    ])
}

fn validate_bundled_laws(curves: &[String]) -> anyhow::Result<Outcome> {
    let models: Vec<CurveModel> = if curves.is_empty() {
        default_validation_curves()?
    } else {
        curves
            .iter()
            .map(|s| CurveModel::parse(s))
            .collect::<Result<_, _>>()?
    };
    let mut results = Vec::new();
    let mut summary = String::new();
    let mut all_agree = true;
    for c in &models {
        for id in kcomplete_core::addlaws::bundled_laws_for(c.kind()) {
            let law = match bundled_law(id, c) {
                Ok(l) => l,
                Err(e) => {
                    summary.push_str(&format!("{id} on {c}: skipped ({e})\n"));
                    continue;
                }
            };
            let rep = check_law(&law, ScanMode::Exhaustive)?;
            all_agree &= rep.agrees();
            summary.push_str(&format!(
                "{id} on {c}: {} ({} pairs, {} exceptional, {} disagreeing)\n",
                if rep.agrees() { "agrees" } else { "DISAGREES" },
                rep.pairs_scanned,
                rep.exceptional.len(),
                rep.disagreements
            ));
            results.push(json!({
                "law": id,
                "curve": c.to_string(),
                "report": rep.to_json(c.field()),
            }));
        }
    }
    Ok(Outcome {
        summary,
        body: json!({ "laws": results, "all_agree": all_agree }),
        positive: all_agree,
    })
}

/// The curve string and field descriptor recorded in the envelope.
fn subject(cmd: &Command) -> (Option<String>, Option<String>) {
    let from_curve = |s: &str| {
        let field = s.split(':').nth(1).and_then(|f| Field::parse(f).ok());
        (Some(s.to_string()), field.map(|f| f.descriptor()))
    };
    let from_q = |q: u64| (None, Field::of_order(q).ok().map(|f| f.descriptor()));
    match cmd {
        Command::Construct(c)
        | Command::Certify { curve: c, .. }
        | Command::Witness { curve: c, .. } => from_curve(&c.curve),
        Command::DiscoverLaws { curve: Some(c), .. } => from_curve(c),
        Command::DiscoverLaws { q, .. } => from_q(*q),
        Command::Genus2Pipeline { curve } | Command::G2Count { curve, .. } => from_curve(curve),
        Command::ScanEcCounterexamples { q }
        | Command::ScanG2Counterexamples { q }
        | Command::Hyperplane { q, .. } => from_q(*q),
        Command::ValidateLaws { .. } => (None, None),
    }
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Construct(_) => "construct",
        Command::Certify { .. } => "certify",
        Command::DiscoverLaws { .. } => "discover-laws",
        Command::Witness { .. } => "witness",
        Command::ScanEcCounterexamples { .. } => "scan-ec-counterexamples",
        Command::Hyperplane { .. } => "hyperplane",
        Command::Genus2Pipeline { .. } => "genus2-pipeline",
        Command::ScanG2Counterexamples { .. } => "scan-g2-counterexamples",
        Command::G2Count { .. } => "g2-count",
        Command::ValidateLaws { .. } => "validate-laws",
    }
}

fn run_command(cli: &Cli) -> anyhow::Result<Outcome> {
    let seed = cli.seed;
    match &cli.command {
        Command::Construct(c) => construct(seed, &c.curve),
        Command::Certify { curve, law } => certify(&curve.curve, law),
        Command::DiscoverLaws {
            model,
            curve,
            q,
            bidegree,
        } => discover_laws(seed, model, curve.as_deref(), *q, *bidegree),
        Command::Witness {
            curve,
            law,
            bidegree,
            ext,
        } => witness(seed, &curve.curve, law.as_deref(), *bidegree, *ext),
        Command::ScanEcCounterexamples { q } => scan_ec(*q),
        Command::Hyperplane { q, d, r0 } => hyperplane(*q, *d, *r0),
        Command::Genus2Pipeline { curve } => genus2_pipeline(curve),
        Command::ScanG2Counterexamples { q } => scan_g2(*q),
        Command::G2Count { curve, ext } => g2_count(curve, *ext),
        Command::ValidateLaws { curve } => validate_bundled_laws(curve),
    }
}

fn run(cli: &Cli) -> anyhow::Result<bool> {
    let out = run_command(cli)?;
    let (curve, field) = subject(&cli.command);
    let doc = json!({
        "tool": "kcomplete",
        "version": VERSION,
        "command": command_name(&cli.command),
        "seed": cli.seed,
        "curve": curve,
        "field": field,
        "positive": out.positive,
        "result": out.body,
    });
    let text = serde_json::to_string_pretty(&doc)? + "\n";
    match &cli.out {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?
        }
        None => print!("{text}"),
    }
    eprint!("{}", out.summary);
    Ok(out.positive)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {}", anyhow!(e));
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
