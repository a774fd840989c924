//! Text and line-delimited JSON reports for each command.

use anyhow::Context;
use probsyl::{
    check_consistency, exact_bounds, serialize_kb, AtomId, ConstraintId, Error, Inconsistency, Network, OracleOptions,
    ProbInterval, QueryExpr, SaturationOptions, Status, TraceStep, Verdict,
};
use serde_json::{json, Value};

use crate::{INCONSISTENT, OK, UNSOUND};

/// Slack allowed when checking that local bounds contain exact ones.
const CONTAIN_SLACK: f64 = 1e-7;

#[derive(Debug, Default)]
pub struct Report {
    json: bool,
    lines: Vec<String>,
    warnings: Vec<String>,
}

impl Report {
    fn new(json: bool) -> Self {
        Self {
            json,
            ..Default::default()
        }
    }

    fn line(&mut self, text: impl Into<String>, value: Value) {
        if self.json {
            self.lines.push(value.to_string());
        } else {
            self.lines.push(text.into());
        }
    }

    fn text(&mut self, text: impl Into<String>) {
        if !self.json {
            self.lines.push(text.into());
        }
    }

    pub fn render(&self) -> String {
        let mut out = self.lines.join("\n");
        if !out.is_empty() {
            out.push('\n');
        }
        out
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }
}

fn pair(iv: &ProbInterval) -> Value {
    json!([iv.lo(), iv.hi()])
}

fn names(net: &Network, ids: &[AtomId]) -> Vec<String> {
    ids.iter().map(|&a| net.name(a).to_string()).collect()
}

fn arc(net: &Network, (t, g): (AtomId, AtomId)) -> String {
    format!("P({}|{})", net.name(t), net.name(g))
}

fn describe(net: &Network, why: &Inconsistency) -> String {
    match why {
        Inconsistency::EmptyIntersection {
            rule,
            arc: a,
            stored,
            candidate,
            ..
        } => format!(
            "{rule} derived {candidate} for {}, disjoint from {stored}",
            arc(net, *a)
        ),
        Inconsistency::PositiveCircuit { circuit, excess } => format!(
            "circuit {} has log-weight {excess:.3e} > 0",
            names(net, circuit).join(" -> ")
        ),
    }
}

fn inconsistent(report: &mut Report, net: &Network, why: &Inconsistency) {
    let text = describe(net, why);
    report.line(
        format!("inconsistent: {text}"),
        json!({"type": "inconsistent", "reason": text}),
    );
}

fn step_line(report: &mut Report, names: &[String], step: &TraceStep, prefix: &str) {
    let name = |a: AtomId| names[a.0].as_str();
    let operands: Vec<&str> = step.operands.iter().map(|&a| name(a)).collect();
    let text = format!(
        "{prefix}{} {}: P({}|{}) {} -> {}",
        step.rule,
        operands.join(", "),
        name(step.arc.0),
        name(step.arc.1),
        step.before,
        step.after
    );
    report.line(
        text,
        json!({
            "type": "step",
            "rule": step.rule.to_string(),
            "operands": operands,
            "target": name(step.arc.0),
            "given": name(step.arc.1),
            "before": pair(&step.before),
            "after": pair(&step.after),
            "iteration": step.iteration,
        }),
    );
}

fn constraint(net: &Network, id: &ConstraintId) -> Value {
    match *id {
        ConstraintId::Upper { target, given } => json!({
            "kind": "upper", "target": net.name(target), "given": net.name(given),
            "bound": net.bound(target, given).hi(),
        }),
        ConstraintId::Lower { target, given } => json!({
            "kind": "lower", "target": net.name(target), "given": net.name(given),
            "bound": net.bound(target, given).lo(),
        }),
        ConstraintId::MassFloor(a) => json!({"kind": "mass_floor", "atom": net.name(a)}),
        ConstraintId::Normalization => json!({"kind": "normalization"}),
    }
}

fn certificate(report: &mut Report, net: &Network, ids: &[ConstraintId]) {
    report.line("inconsistent", json!({"type": "verdict", "verdict": "inconsistent"}));
    report.text("certificate:");
    for id in ids {
        report.line(
            format!("  {}", id.describe(net)),
            json!({"type": "certificate", "constraint": constraint(net, id)}),
        );
    }
}

fn oracle_note(report: &mut Report, net: &Network) {
    if !net.indeps().is_empty() {
        report
            .warnings
            .push("independence declarations are not encoded in the exact oracle".to_string());
    }
}

pub fn check(net: &Network, json: bool, opts: &OracleOptions) -> anyhow::Result<(Report, u8)> {
    let mut report = Report::new(json);
    oracle_note(&mut report, net);
    match check_consistency(net, opts)? {
        Verdict::Consistent { .. } => {
            report.line("consistent", json!({"type": "verdict", "verdict": "consistent"}));
            Ok((report, OK))
        }
        Verdict::Infeasible { certificate: ids } => {
            certificate(&mut report, net, &ids);
            Ok((report, INCONSISTENT))
        }
    }
}

pub fn saturate(mut net: Network, json: bool, trace: bool, opts: &SaturationOptions) -> (Report, u8) {
    let mut report = Report::new(json);
    let run = probsyl::saturate(&mut net, opts);
    if trace {
        let names: Vec<String> = net.atoms().iter().map(|a| a.name.clone()).collect();
        for step in run.trace.steps() {
            step_line(&mut report, &names, step, "# ");
        }
    }
    let status = match &run.status {
        Status::Saturated => "saturated",
        Status::MaxIterations => "max-iterations",
        Status::Inconsistent(why) => {
            inconsistent(&mut report, &net, why);
            return (report, INCONSISTENT);
        }
    };
    if run.status == Status::MaxIterations {
        report.warnings.push(format!(
            "stopped after {} iterations before reaching a fixpoint",
            run.iterations
        ));
    }
    report.line(
        format!(
            "# status {status}: {} iterations, {} arcs tightened",
            run.iterations, run.changed_arcs
        ),
        json!({
            "type": "status",
            "status": status,
            "iterations": run.iterations,
            "changed_arcs": run.changed_arcs,
            "wall_time_s": run.wall_time.as_secs_f64(),
        }),
    );
    if json {
        for t in net.base_atoms() {
            for g in net.base_atoms() {
                let iv = net.bound(t.id, g.id);
                if t.id != g.id && !iv.is_vacuous() {
                    report.line(
                        "",
                        json!({"type": "bound", "target": t.name, "given": g.name, "lo": iv.lo(), "hi": iv.hi()}),
                    );
                }
            }
        }
    } else {
        for line in serialize_kb(&net).lines() {
            report.text(line);
        }
    }
    (report, OK)
}

pub fn query(
    mut net: Network,
    text: &str,
    json: bool,
    trace: bool,
    opts: &SaturationOptions,
) -> anyhow::Result<(Report, u8)> {
    let mut report = Report::new(json);
    let q = QueryExpr::parse(&net, text)?;
    let run = probsyl::saturate(&mut net, opts);
    if let Status::Inconsistent(why) = &run.status {
        inconsistent(&mut report, &net, why);
        return Ok((report, INCONSISTENT));
    }
    let answer = match probsyl::query(&net, &q, opts) {
        Ok(answer) => answer,
        Err(Error::Inconsistent(why)) => {
            inconsistent(&mut report, &net, &why);
            return Ok((report, INCONSISTENT));
        }
        Err(other) => return Err(other).context("answering query"),
    };
    let shown = q.display(&net).to_string();
    report.line(
        format!("{shown} in {}", answer.interval),
        json!({"type": "query", "query": shown, "method": "local", "lo": answer.interval.lo(), "hi": answer.interval.hi()}),
    );
    if trace {
        for step in &answer.trace {
            step_line(&mut report, &answer.names, step, "  ");
        }
    }
    Ok((report, OK))
}

pub fn exact(net: &Network, text: &str, json: bool, opts: &OracleOptions) -> anyhow::Result<(Report, u8)> {
    let mut report = Report::new(json);
    oracle_note(&mut report, net);
    let q = QueryExpr::parse(net, text)?;
    let iv = match exact_bounds(net, &q, opts) {
        Ok(iv) => iv,
        Err(Error::InfeasibleKb(ids)) => {
            certificate(&mut report, net, &ids);
            return Ok((report, INCONSISTENT));
        }
        Err(other) => return Err(other).context("solving exact bounds"),
    };
    let shown = q.display(net).to_string();
    report.line(
        format!("{shown} in {iv}"),
        json!({"type": "query", "query": shown, "method": "exact", "lo": iv.lo(), "hi": iv.hi()}),
    );
    Ok((report, OK))
}

pub fn compare(
    net: Network,
    json: bool,
    sat: &SaturationOptions,
    opts: &OracleOptions,
) -> anyhow::Result<(Report, u8)> {
    let mut report = Report::new(json);
    oracle_note(&mut report, &net);
    if let Verdict::Infeasible { certificate: ids } = check_consistency(&net, opts)? {
        certificate(&mut report, &net, &ids);
        return Ok((report, INCONSISTENT));
    }
    let mut local = net.clone();
    let run = probsyl::saturate(&mut local, sat);
    if let Status::Inconsistent(why) = &run.status {
        inconsistent(&mut report, &local, why);
        return Ok((report, INCONSISTENT));
    }
    let base: Vec<AtomId> = net.base_atoms().map(|a| a.id).collect();
    let width = base.iter().map(|&a| net.name(a).len()).max().unwrap_or(0) * 2 + 4;
    let (mut failures, mut max_gap, mut pairs) = (0, 0.0_f64, 0);
    for &t in &base {
        for &g in &base {
            if t == g {
                continue;
            }
            pairs += 1;
            let exact = exact_bounds(&net, &QueryExpr::atomic(t, g), opts)?;
            let mine = local.bound(t, g);
            let gap = mine.width() - exact.width();
            max_gap = max_gap.max(gap);
            let name = arc(&net, (t, g));
            report.line(
                format!("{name:<width$} local {mine}  exact {exact}  gap {gap:.6}"),
                json!({
                    "type": "pair", "target": net.name(t), "given": net.name(g),
                    "local": pair(&mine), "exact": pair(&exact), "gap": gap,
                }),
            );
            if !mine.contains_within(&exact, CONTAIN_SLACK) {
                if net.indeps().is_empty() {
                    failures += 1;
                    report.line(
                        format!("FAILURE {name}: local {mine} does not contain exact {exact}"),
                        json!({"type": "failure", "target": net.name(t), "given": net.name(g)}),
                    );
                } else {
                    report.line(
                        format!("note {name}: local {mine} excludes part of exact {exact} by independence"),
                        json!({"type": "note", "target": net.name(t), "given": net.name(g)}),
                    );
                }
            }
        }
    }
    report.line(
        format!("{pairs} pairs, max gap {max_gap:.6}, {failures} failures"),
        json!({"type": "summary", "pairs": pairs, "max_gap": max_gap, "failures": failures}),
    );
    Ok((report, if failures > 0 { UNSOUND } else { OK }))
}
