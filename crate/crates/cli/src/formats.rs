//! JSON instance and schedule files. Every rational is a string, either
//! `p/q` or a decimal; output always uses `p/q`.

use std::collections::HashMap;

use moldable_core::{Instance, Job, PlacedJob, Rat, Schedule};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{0}")]
    Value(String),
    #[error("schedule refers to job id {0}, which the instance does not have")]
    UnknownId(i64),
}

impl From<serde_json::Error> for FormatError {
    fn from(e: serde_json::Error) -> Self {
        FormatError::Json {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub m: usize,
    pub jobs: Vec<JobEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobEntry {
    pub id: i64,
    pub times: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleFile {
    pub makespan: String,
    pub lambda: String,
    pub accepted_d: String,
    pub placements: Vec<PlacementEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlacementEntry {
    pub job: i64,
    pub first_machine: usize,
    pub width: usize,
    pub start: String,
    pub duration: String,
}

fn parse_rat(text: &str, context: impl FnOnce() -> String) -> Result<Rat, FormatError> {
    text.parse()
        .map_err(|_| FormatError::Value(format!("{}: cannot read {text:?} as a rational", context())))
}

/// Parses an instance file. Monotony is not checked here.
pub fn parse_instance(text: &str) -> Result<Instance, FormatError> {
    let file: InstanceFile = serde_json::from_str(text)?;
    instance_from_file(&file)
}

pub fn instance_from_file(file: &InstanceFile) -> Result<Instance, FormatError> {
    let jobs = file
        .jobs
        .iter()
        .map(|entry| {
            let times = entry
                .times
                .iter()
                .enumerate()
                .map(|(k, t)| parse_rat(t, || format!("job {} time {}", entry.id, k + 1)))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Job::new(entry.id, times))
        })
        .collect::<Result<Vec<_>, FormatError>>()?;
    Ok(Instance::new(file.m, jobs))
}

pub fn instance_to_file(inst: &Instance) -> InstanceFile {
    InstanceFile {
        m: inst.m,
        jobs: inst
            .jobs
            .iter()
            .map(|j| JobEntry {
                id: j.id,
                times: j.times.iter().map(Rat::to_string).collect(),
            })
            .collect(),
    }
}

pub fn write_instance(inst: &Instance) -> String {
    let mut s = serde_json::to_string_pretty(&instance_to_file(inst)).expect("plain data serializes");
    s.push('\n');
    s
}

/// A schedule together with the search values that produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScheduleRecord {
    pub schedule: Schedule,
    pub lambda: Rat,
    pub accepted_d: Rat,
}

pub fn schedule_to_file(inst: &Instance, rec: &ScheduleRecord) -> ScheduleFile {
    ScheduleFile {
        makespan: rec.schedule.makespan.to_string(),
        lambda: rec.lambda.to_string(),
        accepted_d: rec.accepted_d.to_string(),
        placements: rec
            .schedule
            .placements
            .iter()
            .map(|p| PlacementEntry {
                job: inst.jobs[p.job].id,
                first_machine: p.first_machine,
                width: p.width,
                start: p.start.to_string(),
                duration: p.duration.to_string(),
            })
            .collect(),
    }
}

pub fn write_schedule(inst: &Instance, rec: &ScheduleRecord) -> String {
    let mut s = serde_json::to_string_pretty(&schedule_to_file(inst, rec)).expect("plain data serializes");
    s.push('\n');
    s
}

/// Reads a schedule file, mapping job ids to the instance's job order.
/// The declared makespan is kept as written so the verifier can compare.
pub fn parse_schedule(inst: &Instance, text: &str) -> Result<ScheduleRecord, FormatError> {
    let file: ScheduleFile = serde_json::from_str(text)?;
    schedule_from_file(inst, &file)
}

pub fn schedule_from_file(inst: &Instance, file: &ScheduleFile) -> Result<ScheduleRecord, FormatError> {
    let index: HashMap<i64, usize> = inst.jobs.iter().enumerate().map(|(i, j)| (j.id, i)).collect();
    let placements = file
        .placements
        .iter()
        .map(|p| {
            let job = *index.get(&p.job).ok_or(FormatError::UnknownId(p.job))?;
            Ok(PlacedJob {
                job,
                first_machine: p.first_machine,
                width: p.width,
                start: parse_rat(&p.start, || format!("start of job {}", p.job))?,
                duration: parse_rat(&p.duration, || format!("duration of job {}", p.job))?,
            })
        })
        .collect::<Result<Vec<_>, FormatError>>()?;
    let mut schedule = Schedule::new(placements);
    schedule.makespan = parse_rat(&file.makespan, || "makespan".into())?;
    Ok(ScheduleRecord {
        schedule,
        lambda: parse_rat(&file.lambda, || "lambda".into())?,
        accepted_d: parse_rat(&file.accepted_d, || "accepted_d".into())?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use moldable_core::rat;

    #[test]
    fn reads_decimals_and_fractions() {
        let inst = parse_instance(r#"{"m": 2, "jobs": [{"id": 7, "times": ["3", "1.5e0"]}, {"id": 9, "times": ["6/4", "3/4"]}]}"#)
            .unwrap();
        assert_eq!(inst.m, 2);
        assert_eq!(inst.jobs[0].times, vec![rat(3, 1), rat(3, 2)]);
        assert_eq!(inst.jobs[1].id, 9);
        assert_eq!(inst.jobs[1].times[0], rat(3, 2));
    }

    #[test]
    fn malformed_json_reports_position() {
        let err = parse_instance("{\n  \"m\": 2,\n  \"jobs\": [}\n").unwrap_err();
        match err {
            FormatError::Json { line, column, .. } => {
                assert_eq!(line, 3);
                assert!(column > 0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bad_rational_names_the_job() {
        let err = parse_instance(r#"{"m": 1, "jobs": [{"id": 4, "times": ["x"]}]}"#).unwrap_err();
        assert!(err.to_string().contains("job 4"));
    }

    #[test]
    fn unknown_fields_are_refused() {
        assert!(parse_instance(r#"{"m": 1, "jobs": [], "extra": 1}"#).is_err());
    }

    #[test]
    fn writer_uses_fractions() {
        let inst = Instance::new(1, vec![Job::new(1, vec![rat(6, 4)])]);
        assert!(write_instance(&inst).contains("\"3/2\""));
    }

    #[test]
    fn schedule_ids_must_exist() {
        let inst = Instance::new(1, vec![Job::new(1, vec![rat(1, 1)])]);
        let text = r#"{"makespan": "1/1", "lambda": "10/7", "accepted_d": "1/1",
            "placements": [{"job": 2, "first_machine": 0, "width": 1, "start": "0/1", "duration": "1/1"}]}"#;
        assert!(matches!(parse_schedule(&inst, text), Err(FormatError::UnknownId(2))));
    }
}
