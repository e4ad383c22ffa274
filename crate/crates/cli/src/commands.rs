use crate::args::*;
use crate::report::*;
use crate::CliError;
use fixpoint_cc::protocols::{
    quantization_slack, run_grid_protocol_on, verify_solution, BrouwerInstance, GridOutcome,
    PlayerInputs, ProblemKind, Transcript,
};
use fixpoint_cc::reductions::{
    comp_to_concat, comp_to_imitation_game, concat_to_mean, enumerate_approx_pure_nash,
    local_to_comp, mean_to_comp, ImitationGame, LocalFamily, ReductionRecord,
};
use fixpoint_cc::sperner::{
    brouwer_to_sperner, run_single_missing_color_protocol, run_surplus_protocol,
    run_three_player_protocol, surplus_bit_bound, validate_sperner, Cell, OnSegment,
    SpernerInstance, SpernerOutcome, SpernerRun,
};
use fixpoint_cc::{random_lipschitz, Evaluate, GridSpec, Map, NormKind, Point, DEFAULT_TOL};
use serde::Serialize;
use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

type CmdResult = Result<String, CliError>;

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

/// Any JSON document the tool reads.
#[allow(clippy::large_enum_variant)]
pub enum Document {
    Brouwer(BrouwerInstance),
    Sperner(SpernerInstance),
    Record(ReductionRecord),
    Game(ImitationGame),
}

pub fn load(path: &Path) -> Result<Document, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let has = |key: &str| value.get(key).is_some();
    let bad = |e: serde_json::Error| usage(format!("{}: {e}", path.display()));
    if has("classes") {
        serde_json::from_value(value)
            .map(Document::Sperner)
            .map_err(bad)
    } else if has("backmap") {
        serde_json::from_value(value)
            .map(Document::Record)
            .map_err(bad)
    } else if has("profiles") {
        serde_json::from_value(value)
            .map(Document::Game)
            .map_err(bad)
    } else if has("kind") {
        serde_json::from_value(value)
            .map(Document::Brouwer)
            .map_err(bad)
    } else {
        Err(usage(format!("{}: unrecognized document", path.display())))
    }
}

fn to_json<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents serialize");
    s.push('\n');
    s
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))
}

/// Writes to `out` if given, otherwise returns the text for standard output.
fn emit(out: Option<&Path>, text: String) -> CmdResult {
    match out {
        Some(p) => {
            write_file(p, &text)?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn parse_point(text: &str) -> Result<Point, CliError> {
    let coords: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| usage(format!("bad point {text:?}: {e}")))?;
    Point::new(coords).map_err(usage)
}

fn point_from(report: Option<&Path>, point: Option<&str>) -> Result<Point, CliError> {
    if let Some(p) = point {
        return parse_point(p);
    }
    let path = report.ok_or_else(|| usage("give --point or --report"))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    let rep: RunReport =
        serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    match rep.solution {
        Solution::Point { coords } => Point::new(coords).map_err(usage),
        _ => Err(usage("the report does not hold a point")),
    }
}

pub fn gen(cmd: &GenCommand) -> CmdResult {
    match cmd {
        GenCommand::Brouwer(a) => gen_brouwer(a),
        GenCommand::Sperner(a) => gen_sperner(a),
    }
}

fn gen_brouwer(a: &GenBrouwerArgs) -> CmdResult {
    let norm: NormKind = a.p.parse().map_err(usage)?;
    let lambda_b = a.lambda_b.unwrap_or(a.lambda);
    let (seed_a, seed_b) = (
        a.seed.wrapping_mul(2),
        a.seed.wrapping_mul(2).wrapping_add(1),
    );
    let random = |seed, i, o, l| -> Result<Map, CliError> {
        Ok(random_lipschitz(seed, i, o, l, norm, a.anchors)
            .map_err(usage)?
            .into())
    };
    let n = a.n;
    let inst = match a.kind {
        KindArg::Comp => {
            let m = a.m.unwrap_or(n);
            BrouwerInstance::from_maps(
                ProblemKind::Comp,
                norm,
                a.epsilon,
                (random(seed_a, n, m, a.lambda)?, a.lambda),
                (random(seed_b, m, n, lambda_b)?, lambda_b),
            )
        }
        KindArg::Concat => {
            if n % 2 != 0 {
                return Err(usage("concat instances need an even --n"));
            }
            BrouwerInstance::from_maps(
                ProblemKind::Concat,
                norm,
                a.epsilon,
                (random(seed_a, n, n / 2, a.lambda)?, a.lambda),
                (random(seed_b, n, n / 2, lambda_b)?, lambda_b),
            )
        }
        KindArg::Mean => BrouwerInstance::from_maps(
            ProblemKind::Mean,
            norm,
            a.epsilon,
            (random(seed_a, n, n, a.lambda)?, a.lambda),
            (random(seed_b, n, n, lambda_b)?, lambda_b),
        ),
        KindArg::Local => {
            let fam = LocalFamily::random(a.seed, a.big_n, n, a.r, a.regions, a.lambda, norm)
                .map_err(usage)?;
            let l = fam.public().lambda();
            BrouwerInstance::new(
                ProblemKind::Local,
                norm,
                a.epsilon,
                l,
                l,
                PlayerInputs::Local(fam),
            )
        }
    }
    .map_err(usage)?;
    emit(a.out.as_deref(), to_json(&inst))
}

fn gen_sperner(a: &GenSpernerArgs) -> CmdResult {
    let inst = match &a.from {
        Some(path) => {
            let Document::Brouwer(src) = load(path)? else {
                return Err(usage("--from needs a Brouwer instance"));
            };
            let (f_a, f_b) = match src.maps() {
                Some((f_a, f_b))
                    if src.kind == ProblemKind::Comp && f_a.in_dim() == 1 && f_a.out_dim() == 1 =>
                {
                    (f_a.clone(), f_b.clone())
                }
                _ => return Err(usage("--from needs a comp instance with n = m = 1")),
            };
            brouwer_to_sperner(&OnSegment(f_a), &OnSegment(f_b), 1, a.k)
                .map_err(usage)?
                .into_instance()
        }
        None => {
            let (d, t) = (
                a.d.expect("clap enforces --d"),
                a.t.expect("clap enforces --t"),
            );
            SpernerInstance::random(d, a.k, t, a.seed).map_err(usage)?
        }
    };
    emit(a.out.as_deref(), to_json(&inst))
}

fn summary(t: &Transcript, bound: Option<u64>) -> TranscriptSummary {
    TranscriptSummary {
        total_bits: t.total_bits(),
        rounds: t.rounds(),
        bound,
    }
}

pub fn solve(a: &SolveArgs, command: Vec<String>) -> CmdResult {
    let start = Instant::now();
    let doc = load(&a.instance)?;
    let (fingerprint, method, transcript, solution, verdict, full) = match &doc {
        Document::Brouwer(inst) => {
            let method = a.method.unwrap_or(Method::Grid);
            if method != Method::Grid {
                return Err(usage("Brouwer instances are solved with --method grid"));
            }
            let (t, s, v) = solve_grid(inst, a)?;
            (
                fingerprint(inst),
                "grid",
                Some(summary(&t, None)),
                s,
                v,
                Some(t),
            )
        }
        Document::Sperner(inst) => {
            let d = inst.triangulation().dim();
            let method = a.method.unwrap_or(if inst.split() == d {
                Method::Single
            } else {
                Method::Surplus
            });
            let (name, run) = match method {
                Method::Surplus => ("surplus", run_surplus_protocol(inst)),
                Method::Single => ("single", run_single_missing_color_protocol(inst)),
                Method::ThreePlayer => ("three_player", run_three_player_protocol(inst)),
                _ => {
                    return Err(usage(
                        "colorings are solved with surplus, single or three-player",
                    ))
                }
            };
            let run = run.map_err(usage)?;
            let bound = run.bit_bound(inst.triangulation());
            let (s, v) = judge_sperner(inst, &run);
            let t = run.transcript.clone();
            (
                fingerprint(inst),
                name,
                Some(summary(&t, bound)),
                s,
                v,
                Some(t),
            )
        }
        Document::Game(game) => {
            if a.method.is_some_and(|m| m != Method::Nash) {
                return Err(usage("games are solved with --method nash"));
            }
            let (s, v) = solve_nash(game, a.threshold);
            (fingerprint(game), "nash", None, s, v, None)
        }
        Document::Record(_) => return Err(usage("solve the record's target instance instead")),
    };
    if let (Some(path), Some(t)) = (&a.transcript, &full) {
        write_file(path, &to_json(t))?;
    }
    let ok = verdict.ok;
    let report = RunReport {
        format: fixpoint_cc::FORMAT_VERSION,
        command,
        fingerprint,
        method: method.to_string(),
        transcript,
        solution,
        verdict,
        wall_time_ms: a.timing.then(|| start.elapsed().as_secs_f64() * 1e3),
    };
    let text = to_json(&report);
    if ok {
        Ok(text)
    } else {
        Err(CliError::Failed {
            stdout: text,
            message: format!("protocol failed: {}", report.verdict.status),
        })
    }
}

fn solve_grid(
    inst: &BrouwerInstance,
    a: &SolveArgs,
) -> Result<(Transcript, Solution, OracleVerdict), CliError> {
    let spec = match a.alpha {
        Some(alpha) => GridSpec::new(inst.dim(), alpha),
        None => {
            let slack = quantization_slack(inst, a.bits).map_err(usage)?;
            GridSpec::fitting(
                inst.dim(),
                inst.combined_lambda(),
                inst.epsilon - 2.0 * slack,
            )
        }
    }
    .map_err(usage)?;
    let outcome = run_grid_protocol_on(inst, &spec, a.bits).map_err(usage)?;
    let t = outcome.transcript().clone();
    match outcome {
        GridOutcome::Accepted { point, .. } => {
            let v = verify_solution(inst, &point, inst.epsilon, DEFAULT_TOL).map_err(usage)?;
            let verdict = OracleVerdict {
                ok: v.ok,
                status: if v.ok {
                    "solution"
                } else {
                    "rejected by referee"
                }
                .into(),
                residual: Some(v.residual),
                epsilon: Some(v.epsilon),
            };
            let solution = Solution::Point {
                coords: point.into_coords(),
            };
            Ok((t, solution, verdict))
        }
        GridOutcome::NoGridPointAccepted { .. } => {
            let verdict = OracleVerdict {
                ok: false,
                status: "no grid point accepted".into(),
                residual: None,
                epsilon: Some(inst.epsilon),
            };
            Ok((t, Solution::None, verdict))
        }
    }
}

/// Referee check of a protocol's answer against the full coloring.
fn judge_sperner(inst: &SpernerInstance, run: &SpernerRun) -> (Solution, OracleVerdict) {
    let tri = inst.triangulation();
    let verdict = |ok: bool, status: &str| OracleVerdict {
        ok,
        status: status.into(),
        residual: None,
        epsilon: None,
    };
    match &run.outcome {
        SpernerOutcome::Panchromatic(cell) => {
            let vertices = tri.cell_vertex_ids(cell);
            let colors = vertices.iter().map(|&v| inst.color(v)).collect();
            let within = run
                .bit_bound(tri)
                .is_none_or(|b| run.transcript.total_bits() <= b);
            let v = if !inst.is_panchromatic(cell) {
                verdict(false, "not panchromatic")
            } else if !within {
                verdict(false, "over communication bound")
            } else {
                verdict(true, "panchromatic")
            };
            let solution = Solution::Cell {
                base: cell.base.clone(),
                perm: cell.perm.clone(),
                vertices,
                colors,
            };
            (solution, v)
        }
        SpernerOutcome::Violation(w) => {
            let v = match validate_sperner(inst) {
                Err(_) => verdict(true, "violation"),
                Ok(()) => verdict(false, "false violation"),
            };
            let solution = Solution::Violation {
                vertex: w.vertex,
                reason: w.reason.to_string(),
            };
            (solution, v)
        }
    }
}

fn solve_nash(game: &ImitationGame, threshold: f64) -> (Solution, OracleVerdict) {
    let found = enumerate_approx_pure_nash(game, threshold);
    // The referee recomputes each regret by scanning every deviation.
    let all_ok = found
        .iter()
        .all(|p| game.regret(p.x.coords(), p.y.coords()) <= threshold + DEFAULT_TOL);
    let ok = all_ok && !found.is_empty();
    let status = if !all_ok {
        "regret above threshold"
    } else if found.is_empty() {
        "no profile within threshold"
    } else {
        "nash"
    };
    let profiles = found
        .iter()
        .map(|p| ProfileSummary {
            index: p.index,
            x: p.x.coords().to_vec(),
            y: p.y.coords().to_vec(),
            regret: p.regret,
        })
        .collect();
    let solution = Solution::Profiles {
        count: found.len() as u64,
        profiles,
    };
    let verdict = OracleVerdict {
        ok,
        status: status.into(),
        residual: None,
        epsilon: Some(threshold),
    };
    (solution, verdict)
}

#[derive(Serialize)]
struct ReduceSummary {
    format: u32,
    steps: Vec<fixpoint_cc::ReductionKind>,
    epsilon_factor: f64,
    source_epsilon: f64,
    target_epsilon: f64,
}

pub fn reduce(a: &ReduceArgs) -> CmdResult {
    let (src, prior) = match load(&a.input)? {
        Document::Brouwer(i) => (i, None),
        Document::Record(r) => (r.target.clone(), Some(r)),
        _ => {
            return Err(usage(
                "reduce takes a Brouwer instance or a reduction record",
            ))
        }
    };
    let illegal = || {
        let to = clap::ValueEnum::to_possible_value(&a.to).expect("no skipped variants");
        usage(format!(
            "no reduction from {} to {}",
            src.kind,
            to.get_name()
        ))
    };
    let record = match (src.kind, a.to) {
        (ProblemKind::Concat, TargetArg::Mean) => concat_to_mean(&src),
        (ProblemKind::Mean, TargetArg::Comp) => mean_to_comp(&src),
        (ProblemKind::Local, TargetArg::Comp) => local_to_comp(&src),
        (ProblemKind::Comp, TargetArg::Concat) => {
            let (f_a, _) = src.maps().expect("comp instances carry maps");
            let (n, m) = (f_a.in_dim() as f64, f_a.out_dim() as f64);
            comp_to_concat(&src, a.c.unwrap_or((n / m).max(m / n)))
        }
        (ProblemKind::Comp, TargetArg::Nash) => {
            let game = comp_to_imitation_game(&src, a.alpha).map_err(usage)?;
            write_file(&a.out, &to_json(&game))?;
            return Ok(format!(
                "{{\"format\":1,\"profiles\":{}}}\n",
                game.profile_count()
            ));
        }
        _ => return Err(illegal()),
    }
    .map_err(usage)?;
    let record = match prior {
        Some(p) => p.chain(record).map_err(usage)?,
        None => record,
    };
    write_file(&a.out, &to_json(&record.target))?;
    if let Some(path) = &a.backmap {
        write_file(path, &to_json(&record))?;
    }
    Ok(to_json(&ReduceSummary {
        format: fixpoint_cc::FORMAT_VERSION,
        steps: record.steps.clone(),
        epsilon_factor: record.epsilon_map.factor,
        source_epsilon: record.source_epsilon(record.target.epsilon),
        target_epsilon: record.target.epsilon,
    }))
}

#[derive(Serialize)]
struct BackmapOutput {
    format: u32,
    point: Vec<f64>,
    target_residual: f64,
    source_epsilon: f64,
    verdict: fixpoint_cc::protocols::Verdict,
}

pub fn backmap(a: &BackmapArgs) -> CmdResult {
    let Document::Record(record) = load(&a.record)? else {
        return Err(usage("backmap needs a reduction record"));
    };
    let target_point = point_from(a.report.as_deref(), a.point.as_deref())?;
    let target_eps = a.epsilon.unwrap_or(record.target.epsilon);
    let point = record.back(&target_point).map_err(usage)?;
    let source_epsilon = record.source_epsilon(target_eps);
    let verdict =
        verify_solution(&record.source, &point, source_epsilon, DEFAULT_TOL).map_err(usage)?;
    let out = to_json(&BackmapOutput {
        format: fixpoint_cc::FORMAT_VERSION,
        point: point.into_coords(),
        target_residual: record.target.residual(target_point.coords()),
        source_epsilon,
        verdict,
    });
    if verdict.ok {
        Ok(out)
    } else {
        Err(CliError::Failed {
            stdout: out,
            message: "back-mapped point misses the source epsilon".into(),
        })
    }
}

#[derive(Serialize)]
struct ColoringCheck {
    format: u32,
    valid: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    violation: Option<fixpoint_cc::sperner::Violation>,
}

pub fn verify(a: &VerifyArgs) -> CmdResult {
    match load(&a.instance)? {
        Document::Brouwer(inst) => {
            let x = point_from(a.report.as_deref(), a.point.as_deref())?;
            let eps = a.epsilon.unwrap_or(inst.epsilon);
            let v = verify_solution(&inst, &x, eps, DEFAULT_TOL).map_err(usage)?;
            finish(v.ok, to_json(&v), "point is not a solution")
        }
        Document::Sperner(inst) => match &a.report {
            None => {
                let r = validate_sperner(&inst);
                let out = to_json(&ColoringCheck {
                    format: fixpoint_cc::FORMAT_VERSION,
                    valid: r.is_ok(),
                    violation: r.err(),
                });
                finish(r.is_ok(), out, "coloring is not a Sperner coloring")
            }
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
                let rep: RunReport = serde_json::from_str(&text).map_err(usage)?;
                let (ok, status) = match rep.solution {
                    Solution::Cell { base, perm, .. } => {
                        let cell = Cell { base, perm };
                        let ok =
                            inst.triangulation().is_valid(&cell) && inst.is_panchromatic(&cell);
                        (
                            ok,
                            if ok {
                                "panchromatic"
                            } else {
                                "not panchromatic"
                            },
                        )
                    }
                    Solution::Violation { .. } => {
                        let ok = validate_sperner(&inst).is_err();
                        (ok, if ok { "violation" } else { "false violation" })
                    }
                    _ => (false, "no cell in report"),
                };
                let out = format!("{{\"format\":1,\"ok\":{ok},\"status\":\"{status}\"}}\n");
                finish(ok, out, status)
            }
        },
        _ => Err(usage("verify takes a Brouwer instance or a coloring")),
    }
}

fn finish(ok: bool, out: String, message: &str) -> CmdResult {
    if ok {
        Ok(out)
    } else {
        Err(CliError::Failed {
            stdout: out,
            message: message.into(),
        })
    }
}

pub fn bench(cmd: &BenchCommand) -> CmdResult {
    match cmd {
        BenchCommand::Sperner(a) => bench_sperner(a),
        BenchCommand::Brouwer(a) => bench_brouwer(a),
    }
}

fn bench_sperner(a: &BenchSpernerArgs) -> CmdResult {
    if a.d < 2 {
        return Err(usage("the surplus protocol needs d >= 2"));
    }
    let mut out = String::from("k,n,cells,bits,bound,verdict\n");
    let mut failed = false;
    for &k in &a.ks {
        let mut max_bits = 0;
        let mut ok = true;
        let mut shape = None;
        for i in 0..a.instances {
            let inst =
                SpernerInstance::random(a.d, k, a.d - 1, a.seed.wrapping_add(i)).map_err(usage)?;
            let tri = *inst.triangulation();
            shape = Some(tri);
            let run = run_surplus_protocol(&inst).map_err(usage)?;
            let (_, v) = judge_sperner(&inst, &run);
            ok &= v.ok;
            max_bits = max_bits.max(run.transcript.total_bits());
        }
        let tri = shape.ok_or_else(|| usage("--instances must be positive"))?;
        let (n, cells) = (tri.vertex_count(), tri.cell_count());
        let bound = surplus_bit_bound(cells, n);
        failed |= !ok;
        let verdict = if ok { "ok" } else { "fail" };
        writeln!(out, "{k},{n},{cells},{max_bits},{bound},{verdict}").expect("string write");
    }
    finish(!failed, out, "some runs failed")
}

fn bench_brouwer(a: &BenchBrouwerArgs) -> CmdResult {
    let Document::Brouwer(inst) = load(&a.instance)? else {
        return Err(usage("bench brouwer needs a Brouwer instance"));
    };
    let mut out = String::from("k,n,cells,bits,bound,verdict\n");
    for &steps in &a.steps {
        let spec = GridSpec::with_steps(inst.dim(), steps).map_err(usage)?;
        let outcome = run_grid_protocol_on(&inst, &spec, a.bits).map_err(usage)?;
        let t = outcome.transcript();
        let n = spec.count().expect("checked by the protocol");
        let per = t.messages().first().map_or(0, |m| m.bits.len() as u64) + 1;
        let verdict = match outcome.point() {
            Some(p) => {
                let v = verify_solution(&inst, p, inst.epsilon, DEFAULT_TOL).map_err(usage)?;
                if v.ok {
                    "solution"
                } else {
                    "rejected"
                }
            }
            None => "no grid point accepted",
        };
        writeln!(
            out,
            "{steps},{n},{},{},{},{verdict}",
            outcome.candidates(),
            t.total_bits(),
            n * per
        )
        .expect("string write");
    }
    Ok(out)
}
