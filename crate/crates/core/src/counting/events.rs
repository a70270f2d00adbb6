use std::io::{BufRead, Write};

use super::CountingError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Channel {
    S,
    I,
}

impl Channel {
    pub fn as_str(self) -> &'static str {
        match self {
            Channel::S => "S",
            Channel::I => "I",
        }
    }
}

impl std::str::FromStr for Channel {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "S" => Ok(Channel::S),
            "I" => Ok(Channel::I),
            _ => Err(format!("unknown channel {s:?}")),
        }
    }
}

/// One detected photon or background click.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionEvent {
    pub trial: u64,
    pub channel: Channel,
    /// ns relative to the pulse.
    pub time: f64,
}

/// Detections of one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial: u64,
    pub events: Vec<(Channel, f64)>,
}

/// Detections of `n_trials` trials, ordered by trial index. Trials without
/// detections have no entries.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EventStream {
    pub n_trials: u64,
    pub events: Vec<DetectionEvent>,
}

impl EventStream {
    pub fn new(n_trials: u64, events: Vec<DetectionEvent>) -> Result<Self, CountingError> {
        let mut last = 0;
        for e in &events {
            if !e.time.is_finite() {
                return Err(CountingError::NonFinite("event time"));
            }
            if e.trial >= n_trials || e.trial < last {
                return Err(CountingError::OutOfRange {
                    name: "event trial",
                    value: e.trial as f64,
                    range: "ascending, below n_trials",
                });
            }
            last = e.trial;
        }
        Ok(Self { n_trials, events })
    }

    pub fn from_records(n_trials: u64, records: &[TrialRecord]) -> Result<Self, CountingError> {
        let events = records
            .iter()
            .flat_map(|r| {
                r.events
                    .iter()
                    .map(move |&(channel, time)| DetectionEvent { trial: r.trial, channel, time })
            })
            .collect();
        Self::new(n_trials, events)
    }

    /// Event slices of the trials that have detections.
    pub fn by_trial(&self) -> impl Iterator<Item = &[DetectionEvent]> {
        self.events.chunk_by(|a, b| a.trial == b.trial)
    }

    pub fn records(&self) -> Vec<TrialRecord> {
        self.by_trial()
            .map(|evs| TrialRecord {
                trial: evs[0].trial,
                events: evs.iter().map(|e| (e.channel, e.time)).collect(),
            })
            .collect()
    }

    pub fn count(&self, channel: Channel) -> usize {
        self.events.iter().filter(|e| e.channel == channel).count()
    }
}

/// Writes `trial,channel,t_ns` rows after a `# n_trials,N` line.
pub fn write_events_csv<W: Write>(stream: &EventStream, mut out: W) -> std::io::Result<()> {
    writeln!(out, "# n_trials,{}", stream.n_trials)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["trial", "channel", "t_ns"])?;
    for e in &stream.events {
        w.write_record([e.trial.to_string(), e.channel.as_str().to_string(), e.time.to_string()])?;
    }
    w.flush()
}

/// Reads the format of [`write_events_csv`]. Other `#` lines are skipped;
/// without a trial-count line the count is one past the last trial seen.
pub fn read_events_csv<R: BufRead>(input: R) -> Result<EventStream, CountingError> {
    let mut n_trials = None;
    let mut events = Vec::new();
    let mut header_seen = false;
    for (idx, line) in input.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| CountingError::Io(e.to_string()))?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            if let Some(v) = rest.trim().strip_prefix("n_trials,") {
                n_trials = Some(v.trim().parse::<u64>().map_err(|e| CountingError::Parse {
                    line: line_no,
                    message: format!("n_trials: {e}"),
                })?);
            }
            continue;
        }
        if !header_seen {
            if line != "trial,channel,t_ns" {
                return Err(CountingError::Parse {
                    line: line_no,
                    message: format!("expected header trial,channel,t_ns, got {line:?}"),
                });
            }
            header_seen = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let parse_err = |message: String| CountingError::Parse { line: line_no, message };
        if fields.len() != 3 {
            return Err(parse_err(format!("expected 3 fields, got {}", fields.len())));
        }
        let trial = fields[0].trim().parse::<u64>().map_err(|e| parse_err(format!("trial: {e}")))?;
        let channel = fields[1].trim().parse::<Channel>().map_err(parse_err)?;
        let time = fields[2].trim().parse::<f64>().map_err(|e| parse_err(format!("t_ns: {e}")))?;
        events.push(DetectionEvent { trial, channel, time });
    }
    let n_trials = n_trials.unwrap_or_else(|| events.last().map_or(0, |e| e.trial + 1));
    EventStream::new(n_trials, events)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> EventStream {
        EventStream::new(
            5,
            vec![
                DetectionEvent { trial: 0, channel: Channel::S, time: 0.125 },
                DetectionEvent { trial: 0, channel: Channel::I, time: 1.0 / 3.0 },
                DetectionEvent { trial: 3, channel: Channel::I, time: -2.5e-7 },
            ],
        )
        .unwrap()
    }

    #[test]
    fn csv_roundtrip_is_exact() {
        let mut buf = Vec::new();
        write_events_csv(&sample(), &mut buf).unwrap();
        let back = read_events_csv(buf.as_slice()).unwrap();
        assert_eq!(back, sample());
    }

    #[test]
    fn records_group_by_trial() {
        let r = sample().records();
        assert_eq!(r.len(), 2);
        assert_eq!(r[0].events.len(), 2);
        assert_eq!(r[1].trial, 3);
        assert_eq!(EventStream::from_records(5, &r).unwrap(), sample());
    }

    #[test]
    fn rejects_unordered_or_bad_rows() {
        let bad = vec![
            DetectionEvent { trial: 2, channel: Channel::S, time: 0.0 },
            DetectionEvent { trial: 1, channel: Channel::S, time: 0.0 },
        ];
        assert!(EventStream::new(5, bad).is_err());
        assert!(read_events_csv("trial,channel,t_ns\n0,X,1.0\n".as_bytes()).is_err());
        assert!(read_events_csv("a,b\n".as_bytes()).is_err());
        let ok = read_events_csv("trial,channel,t_ns\n4,S,1.0\n".as_bytes()).unwrap();
        assert_eq!(ok.n_trials, 5);
    }
}
