//! Concrete execution of deterministic loops.

use std::io;

use crate::error::{Error, Result};
use crate::loopmodel::{mlrf_rank_index, RankTuple, SLCLoop};
use crate::numeric::{RatVec, Rational};

pub const DEFAULT_MAX_STEPS: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// The last state violates the guard.
    Terminated,
    MaxStepsReached,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trace {
    /// `x_0, x_1, …`; one more state than completed iterations.
    pub states: Vec<RatVec>,
    pub steps: usize,
    pub outcome: Outcome,
}

/// Iterates the update while the guard holds, up to `max_steps` iterations.
pub fn run_loop(l: &SLCLoop, x0: &[Rational], max_steps: usize) -> Result<Trace> {
    if x0.len() != l.n() {
        return Err(Error::DimensionMismatch {
            expected: l.n(),
            found: x0.len(),
        });
    }
    let update = l.deterministic_update()?;
    let mut states = vec![RatVec::new(x0.to_vec())];
    let mut steps = 0;
    loop {
        let x = states.last().expect("nonempty");
        if !l.guard_holds(x) {
            return Ok(Trace {
                states,
                steps,
                outcome: Outcome::Terminated,
            });
        }
        if steps == max_steps {
            return Ok(Trace {
                states,
                steps,
                outcome: Outcome::MaxStepsReached,
            });
        }
        let next = update
            .iter()
            .map(|e| e.eval(x))
            .collect::<Result<RatVec>>()?;
        states.push(next);
        steps += 1;
    }
}

/// Number of iterations from `x0`, without keeping the states.
pub fn count_steps(l: &SLCLoop, x0: &[Rational], max_steps: usize) -> Result<(usize, Outcome)> {
    if x0.len() != l.n() {
        return Err(Error::DimensionMismatch {
            expected: l.n(),
            found: x0.len(),
        });
    }
    let update = l.deterministic_update()?;
    let mut x = x0.to_vec();
    for steps in 0..=max_steps {
        if !l.guard_holds(&x) {
            return Ok((steps, Outcome::Terminated));
        }
        if steps == max_steps {
            break;
        }
        x = update.iter().map(|e| e.eval(&x)).collect::<Result<_>>()?;
    }
    Ok((max_steps, Outcome::MaxStepsReached))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceVerdict {
    AllRanked,
    /// The first iteration (0-based) whose transition no component ranks.
    UnrankedAt(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceCheck {
    pub verdict: TraceVerdict,
    /// `f_k(x_t)` for every state and component.
    pub values: Vec<Vec<Rational>>,
    /// The least ranking index (1-based) of every transition.
    pub rank_indices: Vec<Option<usize>>,
}

/// Evaluates the multiphase condition on each consecutive pair of states.
pub fn check_tuple_on_trace(tuple: &RankTuple, trace: &Trace) -> Result<TraceCheck> {
    if let Some(x) = trace.states.first() {
        tuple.check_dim(x.dim())?;
    }
    let values = trace
        .states
        .iter()
        .map(|x| tuple.components.iter().map(|f| f.eval(x)).collect())
        .collect::<Result<Vec<Vec<Rational>>>>()?;
    let rank_indices: Vec<Option<usize>> = trace
        .states
        .windows(2)
        .take(trace.steps)
        .map(|w| mlrf_rank_index(&tuple.components, &w[0], &w[1]))
        .collect();
    let verdict = match rank_indices.iter().position(Option::is_none) {
        Some(t) => TraceVerdict::UnrankedAt(t),
        None => TraceVerdict::AllRanked,
    };
    Ok(TraceCheck {
        verdict,
        values,
        rank_indices,
    })
}

/// CSV with a `step` column, one column per variable and, with a tuple, one
/// `f<k>` column per component.
pub fn write_trace_csv<W: io::Write>(
    out: W,
    var_names: &[String],
    trace: &Trace,
    tuple: Option<&RankTuple>,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let depth = tuple.map_or(0, RankTuple::depth);
    let mut header = vec!["step".to_string()];
    header.extend(var_names.iter().cloned());
    header.extend((1..=depth).map(|k| format!("f{k}")));
    w.write_record(&header).map_err(csv_err)?;
    for (t, x) in trace.states.iter().enumerate() {
        let mut row = vec![t.to_string()];
        row.extend(x.iter().map(Rational::to_string));
        if let Some(tuple) = tuple {
            for f in &tuple.components {
                row.push(f.eval(x)?.to_string());
            }
        }
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::loopmodel::{parse_tuple, TupleKind};
    use crate::numeric::int;

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn l6_from_one_three() {
        let l = fixtures::l6();
        let t = run_loop(&l, &ints(&[1, 3]), DEFAULT_MAX_STEPS).unwrap();
        let xs: Vec<Rational> = t.states.iter().map(|s| s[0].clone()).collect();
        assert_eq!(xs, ints(&[1, 4, 6, 7, 7, 6, 4, 1, -3]));
        assert_eq!(t.steps, 8);
        assert_eq!(t.outcome, Outcome::Terminated);
        assert_eq!(count_steps(&l, &ints(&[1, 3]), 100).unwrap(), (8, Outcome::Terminated));

        let tuple = parse_tuple("component y + 1\ncomponent x\n", l.var_names(), TupleKind::Mlrf)
            .unwrap();
        let c = check_tuple_on_trace(&tuple, &t).unwrap();
        assert_eq!(c.verdict, TraceVerdict::AllRanked);
        // y+1 ranks while y >= -1, then x takes over
        assert_eq!(
            c.rank_indices,
            vec![Some(1), Some(1), Some(1), Some(1), Some(1), Some(2), Some(2), Some(2)]
        );
    }

    #[test]
    fn guard_false_at_start() {
        let t = run_loop(&fixtures::l1(), &ints(&[0, 0, -1]), 10).unwrap();
        assert_eq!(t.steps, 0);
        assert_eq!(t.states.len(), 1);
    }

    #[test]
    fn l5_terminates() {
        let t = run_loop(&fixtures::l5(3), &ints(&[8, 1]), 1000).unwrap();
        assert_eq!(t.outcome, Outcome::Terminated);
        assert!(t.steps > 0);
        assert!(!fixtures::l5(3).guard_holds(t.states.last().unwrap()));
    }

    #[test]
    fn step_cap() {
        let l = crate::loopmodel::parse_loop("vars x\nupdate x' = x + 1").unwrap();
        let t = run_loop(&l, &ints(&[0]), 5).unwrap();
        assert_eq!(t.outcome, Outcome::MaxStepsReached);
        assert_eq!(t.steps, 5);
    }

    #[test]
    fn constant_negative_tuple() {
        let l = fixtures::l6();
        let t = run_loop(&l, &ints(&[1, 3]), 100).unwrap();
        let tuple = RankTuple::new(vec![crate::AffineFunc::from_ints(&[0, 0], -1)], TupleKind::Mlrf);
        assert_eq!(
            check_tuple_on_trace(&tuple, &t).unwrap().verdict,
            TraceVerdict::UnrankedAt(0)
        );
    }

    #[test]
    fn nondeterministic_rejected() {
        let l = crate::loopmodel::parse_loop("vars x\nguard x >= 0\nupdate x' <= x - 1").unwrap();
        assert!(matches!(run_loop(&l, &ints(&[3]), 10), Err(Error::Nondeterministic(_))));
        assert!(matches!(
            run_loop(&fixtures::l6(), &ints(&[3]), 10),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn csv_dump() {
        let l = fixtures::l6();
        let t = run_loop(&l, &ints(&[1, 1]), 100).unwrap();
        let tuple = parse_tuple("component y + 1\ncomponent x\n", l.var_names(), TupleKind::Mlrf)
            .unwrap();
        let mut buf = Vec::new();
        write_trace_csv(&mut buf, l.var_names(), &t, Some(&tuple)).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("step,x,y,f1,f2"));
        assert_eq!(lines.next(), Some("0,1,1,2,1"));
    }
}
