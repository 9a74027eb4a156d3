//! Command implementations behind the `multiphase` binary.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use multiphase::bounds::iteration_bound;
use multiphase::llrf::{check_bmsllrf, llrf_to_mlrf, LlrfCheck};
use multiphase::loopmodel::{
    check_mlrf, check_nested, nested_conditions, parse_loop, parse_tuple, Domain, MlrfCheck, MlrfFailure,
    NestedCheck, RankTuple, SLCLoop, TupleKind,
};
use multiphase::numeric::parse_rational;
use multiphase::polyhedra::{HullMethod, HullOptions, Polyhedron};
use multiphase::simulator::{check_tuple_on_trace, run_loop, write_trace_csv, Outcome, TraceVerdict};
use multiphase::synthesis::{analysis_polyhedron, mlrf_to_nested, synth_mlrf, SynthesisStatus};
use multiphase::{Error, Rational};

pub mod report;

use report::{Report, Status};

/// Exit code for usage and input errors.
pub const EXIT_USAGE: i32 = 2;
/// Exit code for internal and certificate errors.
pub const EXIT_INTERNAL: i32 = 3;

/// A failed command with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Certificate(_) | Error::Internal(_) | Error::CutLimitExceeded { .. } => EXIT_INTERNAL,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

pub type CmdResult = Result<Output, Failure>;

/// A report and its plain-text rendering.
#[derive(Debug)]
pub struct Output {
    pub report: Report,
    pub text: String,
}

impl Output {
    pub fn exit_code(&self) -> i32 {
        self.report.status.exit_code()
    }

    pub fn render(&self, json: bool) -> String {
        if json {
            self.report.to_json()
        } else {
            self.text.clone()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckKind {
    Mlrf,
    Nested,
    Bms,
    WeakBms,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConvertTarget {
    Mlrf,
    Nested,
}

pub fn load_loop(path: &Path, domain: Option<Domain>) -> Result<SLCLoop, Failure> {
    let src = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let l = parse_loop(&src).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    Ok(match domain {
        Some(d) => l.with_domain(d),
        None => l,
    })
}

pub fn load_tuple(path: &Path, l: &SLCLoop, kind: TupleKind) -> Result<RankTuple, Failure> {
    let src = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    parse_tuple(&src, l.var_names(), kind).map_err(|e| usage(format!("{}: {e}", path.display())))
}

/// Parses `x=3,y=1/2`; every variable must be given exactly once.
pub fn parse_state(text: &str, l: &SLCLoop) -> Result<Vec<Rational>, Failure> {
    let mut values: Vec<Option<Rational>> = vec![None; l.n()];
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (name, value) = part
            .split_once('=')
            .ok_or_else(|| usage(format!("expected name=value, got `{part}`")))?;
        let i = l
            .var_names()
            .iter()
            .position(|v| v == name.trim())
            .ok_or_else(|| usage(format!("unknown variable `{}`", name.trim())))?;
        let v = parse_rational(value.trim()).ok_or_else(|| usage(format!("bad number `{}`", value.trim())))?;
        if values[i].replace(v).is_some() {
            return Err(usage(format!("`{}` given twice", name.trim())));
        }
    }
    values
        .into_iter()
        .zip(l.var_names())
        .map(|(v, name)| v.ok_or_else(|| usage(format!("no value for `{name}`"))))
        .collect()
}

fn hull_method_name(m: HullMethod) -> &'static str {
    match m {
        HullMethod::Cuts => "cuts",
        HullMethod::Enumeration => "enumeration",
    }
}

struct Analysis {
    q: Polyhedron,
    hull: Option<HullMethod>,
}

impl Analysis {
    fn new(l: &SLCLoop) -> Result<Self, Failure> {
        let (q, hull) = analysis_polyhedron(l, &HullOptions::default())?;
        Ok(Analysis { q, hull })
    }

    fn report(&self, status: Status, l: &SLCLoop) -> Report {
        let mut r = Report::new(status, l.domain().short_name(), self.hull.is_some());
        r.hull_method = self.hull.map(|m| hull_method_name(m).to_string());
        r
    }
}

fn show_tuple(t: &RankTuple, l: &SLCLoop) -> String {
    t.display_with(l.var_names()).to_string()
}

fn certificates(t: &RankTuple, l: &SLCLoop, certs: &[multiphase::polyhedra::FarkasCert]) -> Vec<report::Certificate> {
    let names = l.transition_names();
    nested_conditions(&t.components)
        .iter()
        .zip(certs)
        .map(|(g, c)| report::certificate(format!("{} >= 0", g.display_with(&names)), c))
        .collect()
}

pub fn synth(l: &SLCLoop, max_depth: usize, lrf_only: bool) -> CmdResult {
    let dmax = if lrf_only { 1 } else { max_depth };
    let r = synth_mlrf(l, dmax)?;
    let mut report = Report::new(Status::NotFound, l.domain().short_name(), r.hull_applied);
    report.hull_method = r.hull_method.map(|m| hull_method_name(m).to_string());
    let what = if lrf_only { "linear ranking function" } else { "multiphase ranking function" };
    let text = match &r.status {
        SynthesisStatus::Found {
            tuple,
            depth,
            certs,
            vacuous,
        } => {
            report.status = Status::Found;
            report.depth = Some(*depth);
            report.tuple = report::tuple(tuple, l.var_names());
            report.certificates = certificates(tuple, l, certs);
            let mut text = format!("found {what} of depth {depth}: {}\n", show_tuple(tuple, l));
            if *vacuous {
                text.push_str("the loop has no transitions\n");
            }
            text
        }
        SynthesisStatus::NotFoundUpToDepth(d) => format!("no {what} up to depth {d}\n"),
    };
    Ok(Output { report, text })
}

pub fn check(l: &SLCLoop, t: &RankTuple, kind: CheckKind) -> CmdResult {
    let a = Analysis::new(l)?;
    let names = l.transition_names();
    let mut report = a.report(Status::Valid, l);
    report.tuple = report::tuple(t, l.var_names());
    report.depth = Some(t.depth());
    let mut witness = None;
    let mut failure = None;
    match kind {
        CheckKind::Mlrf => {
            if let MlrfCheck::Invalid { witness: w, failure: f, .. } = check_mlrf(&a.q, t)? {
                witness = Some(w.values);
                failure = Some(match f {
                    MlrfFailure::Decrease(i) => format!("component {i} decreases by less than one"),
                    MlrfFailure::AllNegative => "every component is negative".into(),
                });
            }
        }
        CheckKind::Nested => match check_nested(&a.q, t)? {
            NestedCheck::Valid(certs) => report.certificates = certificates(t, l, &certs),
            NestedCheck::Invalid { condition, witness: w } => {
                witness = Some(w.values);
                failure = Some(report::nested_condition(condition));
            }
        },
        CheckKind::Bms | CheckKind::WeakBms => {
            if let LlrfCheck::Invalid(w) = check_bmsllrf(&a.q, t, kind == CheckKind::WeakBms)? {
                witness = Some(w.values);
                failure = Some("no component ranks the transition".into());
            }
        }
    }
    let mut text = String::new();
    match witness {
        None => writeln!(text, "valid: {}", show_tuple(t, l)).unwrap(),
        Some(w) => {
            report.status = Status::Invalid;
            writeln!(text, "invalid: {}", failure.as_deref().unwrap_or_default()).unwrap();
            let p = report::point(&names, &w);
            let shown: Vec<String> = p.iter().map(|(k, v)| format!("{k}={v}")).collect();
            writeln!(text, "witness: {}", shown.join(", ")).unwrap();
            report.witness = Some(p);
            report.failure = failure;
        }
    }
    Ok(Output { report, text })
}

pub fn bound(l: &SLCLoop, t: &RankTuple, x0: Option<&[Rational]>) -> CmdResult {
    let a = Analysis::new(l)?;
    let b = match iteration_bound(&a.q, t, x0) {
        Err(Error::InvalidTuple { kind }) => {
            let mut report = a.report(Status::Invalid, l);
            report.tuple = report::tuple(t, l.var_names());
            report.failure = Some(format!("not a {kind}"));
            return Ok(Output {
                report,
                text: format!("invalid: not a {kind}\n"),
            });
        }
        other => other?,
    };
    let mut report = a.report(Status::Valid, l);
    report.depth = Some(b.tuple.depth());
    report.tuple = report::tuple(&b.tuple, l.var_names());
    report.bound = Some(report::bound(&b));
    let mut text = String::new();
    writeln!(text, "tuple: {}", show_tuple(&b.tuple, l)).unwrap();
    for (k, w) in b.multipliers.iter().enumerate() {
        writeln!(text, "phase {}: mu = [{}]", k + 2, report::rats(&w.mus).join(", ")).unwrap();
    }
    writeln!(text, "c = [{}]", report::rats(&b.c).join(", ")).unwrap();
    writeln!(text, "d = [{}]", report::rats(&b.d).join(", ")).unwrap();
    writeln!(text, "coefficient: {}", b.coefficient).unwrap();
    writeln!(text, "M = {}", b.m_definition(l.var_names())).unwrap();
    if let (Some(m), Some(iterations)) = (&b.m, &b.iterations) {
        writeln!(text, "M = {m}, at most {iterations} iterations").unwrap();
    }
    Ok(Output { report, text })
}

pub fn hull(l: &SLCLoop) -> CmdResult {
    let out = l.transition_polyhedron().integer_hull_with(&HullOptions::default())?;
    let h = out.polyhedron.without_redundant()?;
    let names = l.transition_names();
    let mut report = Report::new(Status::Found, Domain::Integer.short_name(), true);
    report.hull_method = Some(hull_method_name(out.method).to_string());
    report.constraints = h.constraints().iter().map(|c| c.display_with(&names).to_string()).collect();
    let mut text = String::new();
    for c in &report.constraints {
        writeln!(text, "{c}").unwrap();
    }
    Ok(Output { report, text })
}

pub struct SimulateArgs<'a> {
    pub x0: &'a [Rational],
    pub max_steps: usize,
    pub tuple: Option<&'a RankTuple>,
    pub trace_out: Option<PathBuf>,
}

pub fn simulate(l: &SLCLoop, args: SimulateArgs<'_>) -> CmdResult {
    let trace = run_loop(l, args.x0, args.max_steps)?;
    let mut report = Report::new(Status::Valid, l.domain().short_name(), false);
    report.steps = Some(trace.steps as u64);
    report.outcome = Some(
        match trace.outcome {
            Outcome::Terminated => "terminated",
            Outcome::MaxStepsReached => "max-steps-reached",
        }
        .to_string(),
    );
    let mut text = match trace.outcome {
        Outcome::Terminated => format!("terminated after {} iterations\n", trace.steps),
        Outcome::MaxStepsReached => format!("stopped after {} iterations\n", trace.steps),
    };
    if let Some(t) = args.tuple {
        report.tuple = report::tuple(t, l.var_names());
        report.depth = Some(t.depth());
        let c = check_tuple_on_trace(t, &trace)?;
        match c.verdict {
            TraceVerdict::AllRanked => writeln!(text, "every iteration ranked by {}", show_tuple(t, l)).unwrap(),
            TraceVerdict::UnrankedAt(step) => {
                report.status = Status::Invalid;
                let values: Vec<Rational> = trace.states[step]
                    .iter()
                    .chain(trace.states[step + 1].iter())
                    .cloned()
                    .collect();
                report.witness = Some(report::point(&l.transition_names(), &values));
                report.failure = Some(format!("iteration {step} is not ranked"));
                writeln!(text, "iteration {step} is not ranked").unwrap();
            }
        }
    }
    if let Some(path) = args.trace_out {
        let file = fs::File::create(&path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        write_trace_csv(file, l.var_names(), &trace, args.tuple)?;
    }
    Ok(Output { report, text })
}

pub fn convert(l: &SLCLoop, t: &RankTuple, to: ConvertTarget, weak: bool) -> CmdResult {
    let a = Analysis::new(l)?;
    let result = match to {
        ConvertTarget::Mlrf => llrf_to_mlrf(&a.q, t, weak),
        ConvertTarget::Nested => mlrf_to_nested(&a.q, t),
    };
    let out = match result {
        Err(Error::InvalidTuple { kind }) => {
            let mut report = a.report(Status::Invalid, l);
            report.tuple = report::tuple(t, l.var_names());
            report.failure = Some(format!("not a {kind}"));
            return Ok(Output {
                report,
                text: format!("invalid: not a {kind}\n"),
            });
        }
        other => other?,
    };
    let mut report = a.report(Status::Found, l);
    report.depth = Some(out.depth());
    report.tuple = report::tuple(&out, l.var_names());
    if to == ConvertTarget::Nested {
        if let NestedCheck::Valid(certs) = check_nested(&a.q, &out)? {
            report.certificates = certificates(&out, l, &certs);
        }
    }
    let text = format!("{}\n{}", show_tuple(&out, l), out.to_source(l.var_names()));
    Ok(Output { report, text })
}
