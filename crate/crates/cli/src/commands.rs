use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use causal_control::{
    causal_entropy_breakdown, conditional, conditional_entropy, entailed_joint, entropy, forward_sample,
    format_rational, has_total_effect, intervene, marginal, mutual_information, observational_protocol,
    parse_document, parse_rational, rank_features, uniform_protocol, CausalError, CausalOptions, CausalReport, Diagnostics,
    Distribution, FeatureRecord, InterventionProtocol, JointTable, ProtocolKind, Scm,
};
use serde_json::{json, Value};

use crate::render::{bits, decimal, distribution_json, distribution_rows, envelope, float12, table};
use crate::{CausalArgs, CliError, Context, DistArgs, Format, InfoArgs, Metric, Output, RankArgs, SampleArgs};

fn domain(e: impl std::fmt::Display) -> CliError {
    CliError::Domain(e.to_string())
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))
}

fn parse_error(path: &Path, diags: &Diagnostics) -> CliError {
    CliError::Parse(diags.iter().map(|d| format!("{}:{d}", path.display())).collect::<Vec<_>>().join("\n"))
}

/// Reads and parses a model file, then rejects structural violations.
fn load(path: &Path) -> Result<Scm, CliError> {
    let doc = parse_document(&read(path)?).map_err(|d| parse_error(path, &d))?;
    let violations = doc.violations();
    if !violations.is_empty() {
        let listed: Vec<String> = violations
            .iter()
            .map(|(p, v)| format!("{}:{}:{}: {v}", path.display(), p.line, p.column))
            .collect();
        return Err(CliError::Domain(listed.join("\n")));
    }
    Ok(doc.into_scm())
}

/// Parses `VAR=VAL`.
fn binding(text: &str) -> Result<(String, i64), CliError> {
    let (var, val) = text
        .split_once('=')
        .ok_or_else(|| CliError::Parse(format!("expected VAR=VAL, got `{text}`")))?;
    let val = val
        .trim()
        .parse()
        .map_err(|_| CliError::Parse(format!("`{}` is not an integer", val.trim())))?;
    Ok((var.trim().to_string(), val))
}

fn joint(ctx: &Context, scm: &Scm) -> Result<JointTable, CliError> {
    entailed_joint(scm, &ctx.budget).map_err(domain)
}

pub fn validate(ctx: &Context, file: &Path) -> Result<Output, CliError> {
    let doc = parse_document(&read(file)?).map_err(|d| parse_error(file, &d))?;
    let violations = doc.violations();
    let scm = doc.scm();
    let text = match ctx.format {
        Format::Json => {
            let listed: Vec<Value> = violations
                .iter()
                .map(|(p, v)| json!({"line": p.line, "column": p.column, "message": v.to_string()}))
                .collect();
            envelope(
                json!({"name": "validate", "file": file.display().to_string()}),
                json!({
                    "valid": violations.is_empty(),
                    "variables": scm.variables().len(),
                    "noises": scm.noises().len(),
                }),
                listed,
            )
        }
        Format::Table if violations.is_empty() => format!(
            "{}: valid ({} variables, {} noises)\n",
            file.display(),
            scm.variables().len(),
            scm.noises().len()
        ),
        Format::Table => violations
            .iter()
            .map(|(p, v)| format!("{}:{}:{}: {v}\n", file.display(), p.line, p.column))
            .collect(),
    };
    Ok(Output {
        text,
        exit: if violations.is_empty() { 0 } else { 1 },
    })
}

pub fn dist(ctx: &Context, args: &DistArgs) -> Result<Output, CliError> {
    let mut scm = load(&args.file)?;
    let interventions = args.interventions.iter().map(|s| binding(s)).collect::<Result<Vec<_>, _>>()?;
    let given = args.given.iter().map(|s| binding(s)).collect::<Result<Vec<_>, _>>()?;
    if let Some((var, _)) = interventions.iter().find(|(v, _)| given.iter().any(|(g, _)| g == v)) {
        return Err(CliError::Domain(format!("`{var}` is both intervened on and conditioned on")));
    }
    for (var, val) in &interventions {
        scm = intervene(&scm, var, *val).map_err(domain)?;
    }
    let joint = joint(ctx, &scm)?;
    let d = if given.is_empty() {
        marginal(&joint, &args.target).map_err(domain)?
    } else {
        let evidence: Vec<(&str, i64)> = given.iter().map(|(v, x)| (v.as_str(), *x)).collect();
        conditional(&joint, &args.target, &evidence).map_err(domain)?
    };

    let label = query_label(&args.target, &interventions, &given);
    let text = match ctx.format {
        Format::Json => envelope(
            json!({
                "name": "dist",
                "file": args.file.display().to_string(),
                "target": args.target,
                "do": pairs_json(&interventions),
                "given": pairs_json(&given),
            }),
            json!({"query": label, "distribution": distribution_json(&d)}),
            vec![],
        ),
        Format::Table => format!("{label}\n{}", table(&["value", "mass", "decimal"], &distribution_rows(&d))),
    };
    Ok(Output::ok(text))
}

fn pairs_json(pairs: &[(String, i64)]) -> Value {
    Value::Object(pairs.iter().map(|(k, v)| (k.clone(), json!(v))).collect())
}

fn query_label(target: &str, interventions: &[(String, i64)], given: &[(String, i64)]) -> String {
    let fmt = |pairs: &[(String, i64)]| pairs.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(", ");
    let mut label = format!("P({target}");
    if !given.is_empty() {
        label += &format!(" | {}", fmt(given));
    }
    label += ")";
    if !interventions.is_empty() {
        label += &format!(" under do({})", fmt(interventions));
    }
    label
}

pub fn info(ctx: &Context, args: &InfoArgs) -> Result<Output, CliError> {
    let scm = load(&args.file)?;
    let joint = joint(ctx, &scm)?;
    let t = &args.target;
    let (label, quantity, value) = match (&args.given, &args.mi) {
        (Some(x), _) => (
            format!("H({t} | {x})"),
            "conditional_entropy",
            conditional_entropy(&joint, t, x).map_err(domain)?,
        ),
        (None, Some(x)) => (
            format!("I({t} ; {x})"),
            "mutual_information",
            mutual_information(&joint, x, t).map_err(domain)?,
        ),
        (None, None) => (
            format!("H({t})"),
            "entropy",
            entropy(&marginal(&joint, t).map_err(domain)?),
        ),
    };
    let text = match ctx.format {
        Format::Json => envelope(
            json!({
                "name": "info",
                "file": args.file.display().to_string(),
                "target": t,
                "given": args.given,
                "mi": args.mi,
            }),
            json!({"quantity": quantity, "label": label, "bits": float12(value.0)}),
            vec![],
        ),
        Format::Table => format!("{label} = {} bit\n", bits(value.0)),
    };
    Ok(Output::ok(text))
}

/// Reads a protocol file of `value:mass` entries separated by newlines or
/// commas; `#` starts a comment.
fn protocol_file(scm: &Scm, var: &str, path: &Path) -> Result<InterventionProtocol, CliError> {
    let text = read(path)?;
    let mut support = Vec::new();
    let mut masses = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("");
        for entry in line.split(',').map(str::trim).filter(|e| !e.is_empty()) {
            let (v, m) = entry
                .split_once(':')
                .ok_or_else(|| CliError::Parse(format!("{}: expected value:mass, got `{entry}`", path.display())))?;
            let (v, m) = (v.trim(), m.trim());
            let v: i64 = v
                .parse()
                .map_err(|_| CliError::Parse(format!("{}: `{v}` is not an integer", path.display())))?;
            let m = parse_rational(m)
                .ok_or_else(|| CliError::Parse(format!("{}: `{m}` is not a rational", path.display())))?;
            support.push(v);
            masses.push(m);
        }
    }
    let d = Distribution::new(support, masses).map_err(|e| CliError::Domain(format!("{}: {e}", path.display())))?;
    InterventionProtocol::new(scm, var, d).map_err(domain)
}

fn protocol(ctx: &Context, scm: &Scm, var: &str, spec: &str) -> Result<InterventionProtocol, CliError> {
    match spec {
        "uniform" => uniform_protocol(scm, var).map_err(domain),
        "obs" | "observational" => observational_protocol(scm, var, &ctx.budget).map_err(domain),
        _ => match spec.strip_prefix('@') {
            Some(path) => protocol_file(scm, var, Path::new(path)),
            None => Err(CliError::Parse(format!(
                "unknown protocol `{spec}`: use uniform, obs or @file"
            ))),
        },
    }
}

pub fn causal(ctx: &Context, args: &CausalArgs) -> Result<Output, CliError> {
    let scm = load(&args.file)?;
    let protocol = protocol(ctx, &scm, &args.do_var, &args.protocol)?;
    let opts = CausalOptions {
        budget: ctx.budget,
        allow_nonintervenable: args.allow_nonintervenable,
        ..CausalOptions::default()
    };
    let breakdown = causal_entropy_breakdown(&scm, &args.target, &protocol, &opts).map_err(|e| match e {
        CausalError::NonIntervenable(v) => CliError::Domain(format!(
            "`{v}` is marked non-intervenable; pass --allow-nonintervenable to compute it anyway"
        )),
        other => domain(other),
    })?;
    let joint = joint(ctx, &scm)?;
    let h = entropy(&marginal(&joint, &args.target).map_err(domain)?).0;
    let hc = breakdown.causal_entropy.0;
    let ic = h - hc;
    let effect = has_total_effect(&scm, &args.do_var, &args.target, &ctx.budget).map_err(domain)?;
    let (t, x) = (&args.target, &args.do_var);

    let text = match ctx.format {
        Format::Json => {
            let per_value: Vec<Value> = breakdown
                .per_value
                .iter()
                .zip(protocol.distribution().masses())
                .map(|((v, d, e), w)| {
                    json!({
                        "value": v,
                        "protocol_mass": format_rational(w),
                        "distribution": distribution_json(d),
                        "entropy_bits": float12(e.0),
                    })
                })
                .collect();
            envelope(
                json!({
                    "name": "causal",
                    "file": args.file.display().to_string(),
                    "target": t,
                    "do_var": x,
                    "protocol": args.protocol,
                    "allow_nonintervenable": args.allow_nonintervenable,
                }),
                json!({
                    "protocol": distribution_json(protocol.distribution()),
                    "per_value": per_value,
                    "target_entropy_bits": float12(h),
                    "causal_entropy_bits": float12(hc),
                    "causal_information_gain_bits": float12(ic),
                    "has_total_effect": effect,
                }),
                vec![],
            )
        }
        Format::Table => {
            let rows: Vec<Vec<String>> = breakdown
                .per_value
                .iter()
                .zip(protocol.distribution().masses())
                .map(|((v, _, e), w)| vec![v.to_string(), format_rational(w), bits(e.0)])
                .collect();
            let header = format!("H({t} | do({x}=x))");
            let mut out = table(&["x", "protocol", header.as_str()], &rows);
            let summary = vec![
                vec![format!("H({t})"), bits(h), "bit".into()],
                vec![format!("Hc({t} | do({x} ~ {x}'))"), bits(hc), "bit".into()],
                vec![format!("Ic({t} | do({x} ~ {x}'))"), bits(ic), "bit".into()],
            ];
            out += "\n";
            out += &table(&["quantity", "value", "unit"], &summary);
            out += &format!("\ntotal effect of {x} on {t}: {}\n", if effect { "yes" } else { "no" });
            out
        }
    };
    Ok(Output::ok(text))
}

fn default_candidates(scm: &Scm, target: &str) -> Vec<String> {
    scm.variable_names()
        .filter(|v| *v != target && scm.is_intervenable(v))
        .map(str::to_string)
        .collect()
}

fn record_json(r: &FeatureRecord) -> Value {
    json!({
        "candidate": r.candidate,
        "causal_entropy_bits": float12(r.causal_entropy.0),
        "causal_information_gain_bits": float12(r.causal_information_gain.0),
        "mutual_information_bits": float12(r.mutual_information.0),
        "has_total_effect": r.has_total_effect,
        "protocol": distribution_json(r.protocol.distribution()),
    })
}

fn rank_rows(report: &CausalReport, order: &[&str]) -> Vec<Vec<String>> {
    order
        .iter()
        .enumerate()
        .map(|(i, name)| {
            let r = report.records.iter().find(|r| r.candidate == *name).expect("ranked candidate");
            vec![
                (i + 1).to_string(),
                r.candidate.clone(),
                bits(r.causal_information_gain.0),
                bits(r.causal_entropy.0),
                bits(r.mutual_information.0),
                if r.has_total_effect { "yes" } else { "no" }.to_string(),
            ]
        })
        .collect()
}

pub fn rank(ctx: &Context, args: &RankArgs) -> Result<Output, CliError> {
    let scm = load(&args.file)?;
    let candidates = match &args.candidates {
        Some(c) => c.iter().map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect(),
        None => default_candidates(&scm, &args.target),
    };
    let kind = match args.protocol.as_str() {
        "uniform" => ProtocolKind::Uniform,
        "obs" | "observational" => ProtocolKind::Observational,
        other => {
            return Err(CliError::Parse(format!(
                "unknown protocol `{other}` for rank: use uniform or obs"
            )))
        }
    };
    let opts = CausalOptions {
        budget: ctx.budget,
        ..CausalOptions::default()
    };
    let report = rank_features(&scm, &args.target, &candidates, &kind, &opts).map_err(domain)?;
    let cig = report.causal_order();
    let mi = report.mutual_information_order(&scm);

    let text = match ctx.format {
        Format::Json => {
            let mut results = json!({
                "target": args.target,
                "target_entropy_bits": float12(report.target_entropy.0),
                "records": report.records.iter().map(record_json).collect::<Vec<_>>(),
            });
            if args.metric != Metric::Mi {
                results["causal_information_gain_order"] = json!(cig);
            }
            if args.metric != Metric::Cig {
                results["mutual_information_order"] = json!(mi);
            }
            envelope(
                json!({
                    "name": "rank",
                    "file": args.file.display().to_string(),
                    "target": args.target,
                    "candidates": candidates,
                    "metric": format!("{:?}", args.metric).to_lowercase(),
                    "protocol": args.protocol,
                }),
                results,
                vec![],
            )
        }
        Format::Table => {
            let header = ["rank", "candidate", "Ic (bit)", "Hc (bit)", "MI (bit)", "effect"];
            let mut out = format!("target {}: H = {} bit\n", args.target, bits(report.target_entropy.0));
            if args.metric != Metric::Mi {
                out += "\nby causal information gain\n";
                out += &table(&header, &rank_rows(&report, &cig));
            }
            if args.metric != Metric::Cig {
                out += "\nby mutual information\n";
                out += &table(&header, &rank_rows(&report, &mi));
            }
            out
        }
    };
    Ok(Output::ok(text))
}

pub fn sample(ctx: &Context, args: &SampleArgs) -> Result<Output, CliError> {
    let scm = load(&args.file)?;
    let intervention = args.intervention.as_deref().map(binding).transpose()?;
    // Checks range and intervenability before sampling.
    let model = match &intervention {
        Some((var, val)) => intervene(&scm, var, *val).map_err(domain)?,
        None => scm.clone(),
    };
    let do_ = intervention.as_ref().map(|(v, x)| (v.as_str(), *x));
    let batch = forward_sample(&scm, args.n, args.seed, do_).map_err(domain)?;

    if let Some(path) = &args.csv {
        let file = fs::File::create(path).map_err(|e| CliError::Io(format!("cannot create {}: {e}", path.display())))?;
        let mut out = BufWriter::new(file);
        batch
            .write_csv(&mut out)
            .and_then(|_| out.flush())
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
        let text = match ctx.format {
            Format::Json => envelope(
                sample_echo(args),
                json!({"rows": args.n, "csv": path.display().to_string()}),
                vec![],
            ),
            Format::Table => format!("wrote {} rows to {}\n", args.n, path.display()),
        };
        return Ok(Output::ok(text));
    }

    let exact = entailed_joint(&model, &ctx.budget).ok();
    let mut rows = Vec::new();
    let mut per_var = serde_json::Map::new();
    for var in batch.variables() {
        let empirical = batch.empirical(var).map_err(domain)?;
        let exact_d = exact.as_ref().and_then(|j| marginal(j, var).ok());
        let mut entries = serde_json::Map::new();
        for (v, m) in empirical.iter() {
            let exact_m = exact_d.as_ref().map(|d| d.mass(v));
            rows.push(vec![
                var.clone(),
                v.to_string(),
                format!("{:.6}", decimal(m)),
                exact_m.as_ref().map_or("-".into(), |e| format!("{:.6}", decimal(e))),
            ]);
            entries.insert(
                v.to_string(),
                json!({
                    "empirical": format_rational(m),
                    "exact": exact_m.as_ref().map(format_rational),
                }),
            );
        }
        per_var.insert(var.clone(), Value::Object(entries));
    }
    let text = match ctx.format {
        Format::Json => envelope(sample_echo(args), json!({"rows": args.n, "marginals": per_var}), vec![]),
        Format::Table => format!(
            "{} rows, seed {}\n{}",
            args.n,
            args.seed,
            table(&["variable", "value", "empirical", "exact"], &rows)
        ),
    };
    Ok(Output::ok(text))
}

fn sample_echo(args: &SampleArgs) -> Value {
    json!({
        "name": "sample",
        "file": args.file.display().to_string(),
        "n": args.n,
        "seed": args.seed,
        "do": args.intervention,
        "csv": args.csv.as_ref().map(|p| p.display().to_string()),
    })
}
