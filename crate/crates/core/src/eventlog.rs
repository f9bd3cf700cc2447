//! Flat event logs: cases of ordered activity labels.
//!
//! Logs are read from delimiter-separated text with a header row. Each row is
//! one event; rows are grouped by case id, and cases keep the order in which
//! they first appear in the source. Timestamps, when present, only decide the
//! order of events within a case and are dropped afterwards.

use std::collections::{BTreeSet, HashMap};
use std::io::{Read, Write};

use chrono::{DateTime, NaiveDate, NaiveDateTime};

use crate::error::{Error, Result};

/// One process execution: a case id and its ordered activities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub case_id: String,
    pub events: Vec<String>,
}

impl Trace {
    pub fn new(case_id: impl Into<String>, events: Vec<String>) -> Self {
        Trace {
            case_id: case_id.into(),
            events,
        }
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Consecutive activity pairs.
    pub fn transitions(&self) -> impl Iterator<Item = (&str, &str)> {
        self.events
            .windows(2)
            .map(|w| (w[0].as_str(), w[1].as_str()))
    }
}

/// An immutable, validated event log.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventLog {
    traces: Vec<Trace>,
    alphabet: BTreeSet<String>,
    num_unique_transitions: usize,
    total_events: usize,
}

impl EventLog {
    /// Builds a log from traces, deriving the alphabet and counts.
    ///
    /// Fails on an empty trace list or on any trace without events.
    pub fn from_traces(traces: Vec<Trace>) -> Result<Self> {
        if traces.is_empty() {
            return Err(Error::EmptyLog);
        }
        let mut alphabet = BTreeSet::new();
        let mut pairs: BTreeSet<(&str, &str)> = BTreeSet::new();
        let mut total_events = 0;
        for trace in &traces {
            if trace.is_empty() {
                return Err(Error::EmptyTrace(trace.case_id.clone()));
            }
            total_events += trace.len();
            for event in &trace.events {
                if !alphabet.contains(event) {
                    alphabet.insert(event.clone());
                }
            }
            pairs.extend(trace.transitions());
        }
        let num_unique_transitions = pairs.len();
        Ok(EventLog {
            traces,
            alphabet,
            num_unique_transitions,
            total_events,
        })
    }

    /// Convenience constructor; case ids are the trace positions.
    pub fn from_sequences<S: AsRef<str>>(sequences: &[Vec<S>]) -> Result<Self> {
        let traces = sequences
            .iter()
            .enumerate()
            .map(|(i, seq)| {
                Trace::new(
                    format!("c{}", i + 1),
                    seq.iter().map(|s| s.as_ref().to_string()).collect(),
                )
            })
            .collect();
        Self::from_traces(traces)
    }

    pub fn traces(&self) -> &[Trace] {
        &self.traces
    }

    pub fn alphabet(&self) -> &BTreeSet<String> {
        &self.alphabet
    }

    pub fn num_traces(&self) -> usize {
        self.traces.len()
    }

    pub fn num_unique_activities(&self) -> usize {
        self.alphabet.len()
    }

    pub fn num_unique_transitions(&self) -> usize {
        self.num_unique_transitions
    }

    pub fn total_events(&self) -> usize {
        self.total_events
    }

    /// Writes the log as `case_id,activity` rows in trace order.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        out.write_record(["case_id", "activity"])?;
        for trace in &self.traces {
            for event in &trace.events {
                out.write_record([trace.case_id.as_str(), event.as_str()])?;
            }
        }
        out.flush()?;
        Ok(())
    }
}

/// How the timestamp column is treated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TimestampColumn {
    /// Sort by this column when the header has it, otherwise keep row order.
    IfPresent(String),
    /// The header must contain this column.
    Required(String),
    /// Keep row order.
    Ignore,
}

/// Column layout of a delimiter-separated log.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogFormat {
    pub case_column: String,
    pub activity_column: String,
    pub timestamp: TimestampColumn,
    pub delimiter: u8,
}

impl Default for LogFormat {
    fn default() -> Self {
        LogFormat {
            case_column: "case_id".into(),
            activity_column: "activity".into(),
            timestamp: TimestampColumn::IfPresent("timestamp".into()),
            delimiter: b',',
        }
    }
}

/// Parses a delimiter-separated log with a header row.
pub fn parse_log<R: Read>(source: R, format: &LogFormat) -> Result<EventLog> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(format.delimiter)
        .has_headers(true)
        .flexible(false)
        .from_reader(source);

    let headers = reader.headers()?.clone();
    if headers.is_empty() || (headers.len() == 1 && headers[0].trim().is_empty()) {
        return Err(Error::EmptyLog);
    }
    let column = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    };
    let case_idx = column(&format.case_column)?;
    let activity_idx = column(&format.activity_column)?;
    let time_idx = match &format.timestamp {
        TimestampColumn::Ignore => None,
        TimestampColumn::Required(name) => Some(column(name)?),
        TimestampColumn::IfPresent(name) => column(name).ok(),
    };

    let mut order: Vec<String> = Vec::new();
    let mut cases: HashMap<String, Vec<(Option<NaiveDateTime>, String)>> = HashMap::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let case_id = record[case_idx].trim();
        let activity = record[activity_idx].trim();
        if case_id.is_empty() {
            return Err(Error::Row {
                line,
                message: "empty case id".into(),
            });
        }
        if activity.is_empty() {
            return Err(Error::Row {
                line,
                message: "empty activity".into(),
            });
        }
        let stamp = match time_idx {
            Some(i) => Some(parse_timestamp(record[i].trim()).ok_or_else(|| Error::Row {
                line,
                message: format!("unparsable timestamp `{}`", record[i].trim()),
            })?),
            None => None,
        };
        let events = cases.entry(case_id.to_string()).or_insert_with(|| {
            order.push(case_id.to_string());
            Vec::new()
        });
        events.push((stamp, activity.to_string()));
    }
    if order.is_empty() {
        return Err(Error::EmptyLog);
    }

    let traces = order
        .into_iter()
        .map(|case_id| {
            let mut events = cases.remove(&case_id).unwrap_or_default();
            if time_idx.is_some() {
                // stable: equal timestamps keep row order
                events.sort_by_key(|(t, _)| *t);
            }
            Trace::new(case_id, events.into_iter().map(|(_, a)| a).collect())
        })
        .collect();
    EventLog::from_traces(traces)
}

/// Accepts RFC 3339 and the common ISO-8601 variants without offset.
fn parse_timestamp(raw: &str) -> Option<NaiveDateTime> {
    if let Ok(t) = DateTime::parse_from_rfc3339(raw) {
        return Some(t.naive_utc());
    }
    for pattern in [
        "%Y-%m-%dT%H:%M:%S%.f",
        "%Y-%m-%d %H:%M:%S%.f",
        "%Y-%m-%dT%H:%M",
    ] {
        if let Ok(t) = NaiveDateTime::parse_from_str(raw, pattern) {
            return Some(t);
        }
    }
    NaiveDate::parse_from_str(raw, "%Y-%m-%d")
        .ok()
        .and_then(|d| d.and_hms_opt(0, 0, 0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<EventLog> {
        parse_log(text.as_bytes(), &LogFormat::default())
    }

    #[test]
    fn groups_rows_by_case_in_first_seen_order() {
        let log = parse("case_id,activity\nc1,A\nc1,B\nc2,A\n").unwrap();
        assert_eq!(log.num_traces(), 2);
        assert_eq!(log.traces()[0].events, vec!["A", "B"]);
        assert_eq!(log.traces()[1].events, vec!["A"]);
        assert_eq!(log.alphabet().len(), 2);
        assert_eq!(log.total_events(), 3);
        assert_eq!(log.num_unique_transitions(), 1);
    }

    #[test]
    fn sorts_by_timestamp_and_keeps_row_order_on_ties() {
        let text = "case_id,activity,timestamp\n\
                    c1,C,2021-03-01T10:00:00\n\
                    c1,A,2021-03-01T08:00:00\n\
                    c1,B,2021-03-01T09:00:00\n\
                    c1,D,2021-03-01T09:00:00\n";
        let log = parse(text).unwrap();
        assert_eq!(log.traces()[0].events, vec!["A", "B", "D", "C"]);
    }

    #[test]
    fn timestamp_variants() {
        assert!(parse_timestamp("2021-03-01T10:00:00Z").is_some());
        assert!(parse_timestamp("2021-03-01T10:00:00+03:00").is_some());
        assert!(parse_timestamp("2021-03-01 10:00:00.250").is_some());
        assert!(parse_timestamp("2021-03-01").is_some());
        assert!(parse_timestamp("yesterday").is_none());
    }

    #[test]
    fn bad_timestamp_reports_line() {
        let text = "case_id,activity,timestamp\nc1,A,2021-03-01\nc1,B,not-a-date\n";
        match parse(text) {
            Err(Error::Row { line, message }) => {
                assert_eq!(line, 3);
                assert!(message.contains("not-a-date"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_column_is_named() {
        let err = parse("case,activity\nc1,A\n").unwrap_err();
        assert!(matches!(err, Error::MissingColumn(ref c) if c == "case_id"));

        let format = LogFormat {
            timestamp: TimestampColumn::Required("time".into()),
            ..LogFormat::default()
        };
        let err = parse_log("case_id,activity\nc1,A\n".as_bytes(), &format).unwrap_err();
        assert!(matches!(err, Error::MissingColumn(ref c) if c == "time"));
    }

    #[test]
    fn empty_sources() {
        assert!(matches!(parse(""), Err(Error::EmptyLog)));
        assert!(matches!(parse("case_id,activity\n"), Err(Error::EmptyLog)));
        assert!(matches!(
            EventLog::from_traces(Vec::new()),
            Err(Error::EmptyLog)
        ));
    }

    #[test]
    fn labels_are_trimmed_not_folded() {
        let log = parse(
            "case_id;activity\n c1 ; Triage \nc1;triage\n"
                .replace(';', ",")
                .as_str(),
        )
        .unwrap();
        assert_eq!(log.traces()[0].events, vec!["Triage", "triage"]);
    }

    #[test]
    fn custom_columns_and_delimiter() {
        let format = LogFormat {
            case_column: "patient".into(),
            activity_column: "event".into(),
            timestamp: TimestampColumn::Ignore,
            delimiter: b';',
        };
        let log = parse_log("event;patient\nX;p1\nY;p1\n".as_bytes(), &format).unwrap();
        assert_eq!(log.traces()[0].case_id, "p1");
        assert_eq!(log.traces()[0].events, vec!["X", "Y"]);
    }

    #[test]
    fn quoted_fields_survive_round_trip() {
        let log = EventLog::from_traces(vec![
            Trace::new("a,1", vec!["say \"hi\"".into(), "B".into()]),
            Trace::new("a2", vec!["B".into()]),
        ])
        .unwrap();
        let mut buf = Vec::new();
        log.write_csv(&mut buf).unwrap();
        assert_eq!(
            parse_log(buf.as_slice(), &LogFormat::default()).unwrap(),
            log
        );
    }
}
