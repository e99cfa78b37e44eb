//! Event CSV: `event_id,type,timestamp_s,team_id,player_id,receiver_id,x,y,outcome`.
//!
//! Empty `player_id`/`receiver_id` fields mean unknown. Timestamps must
//! not decrease.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::geom::Vec2;
use crate::phases::{EventKind, MatchEvent, Outcome};
use crate::state::PlayerId;

pub const EVENTS_HEADER: [&str; 9] = [
    "event_id",
    "type",
    "timestamp_s",
    "team_id",
    "player_id",
    "receiver_id",
    "x",
    "y",
    "outcome",
];

fn kind_from_str(s: &str) -> Option<EventKind> {
    Some(match s {
        "pass" => EventKind::Pass,
        "reception" => EventKind::Reception,
        "carry_or_dribble" => EventKind::CarryOrDribble,
        "shot" => EventKind::Shot,
        "set_piece" => EventKind::SetPiece,
        "other" => EventKind::Other,
        _ => return None,
    })
}

fn kind_to_str(kind: EventKind) -> &'static str {
    match kind {
        EventKind::Pass => "pass",
        EventKind::Reception => "reception",
        EventKind::CarryOrDribble => "carry_or_dribble",
        EventKind::Shot => "shot",
        EventKind::SetPiece => "set_piece",
        EventKind::Other => "other",
    }
}

fn outcome_from_str(s: &str) -> Option<Outcome> {
    Some(match s {
        "success" => Outcome::Success,
        "failure" => Outcome::Failure,
        "unknown" => Outcome::Unknown,
        _ => return None,
    })
}

fn outcome_to_str(outcome: Outcome) -> &'static str {
    match outcome {
        Outcome::Success => "success",
        Outcome::Failure => "failure",
        Outcome::Unknown => "unknown",
    }
}

pub fn read_events<R: Read>(reader: R) -> Result<Vec<MatchEvent>> {
    let mut csv_reader = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    {
        let headers = csv_reader.headers()?;
        let got: Vec<&str> = headers.iter().collect();
        if got != EVENTS_HEADER {
            return Err(Error::Parse {
                line: 1,
                message: format!("unexpected events header: {got:?}"),
            });
        }
    }
    let mut events = Vec::new();
    for (idx, row) in csv_reader.records().enumerate() {
        let line = idx + 2;
        let row = row?;
        let field = |i: usize| row.get(i).unwrap_or("").trim();
        let kind = kind_from_str(field(1)).ok_or_else(|| Error::Parse {
            line,
            message: format!("unknown event type {:?}", field(1)),
        })?;
        let timestamp_s: f64 = field(2).parse().map_err(|_| Error::Parse {
            line,
            message: format!("bad timestamp {:?}", field(2)),
        })?;
        let x: f64 = field(6).parse().map_err(|_| Error::Parse {
            line,
            message: format!("bad x {:?}", field(6)),
        })?;
        let y: f64 = field(7).parse().map_err(|_| Error::Parse {
            line,
            message: format!("bad y {:?}", field(7)),
        })?;
        let outcome = outcome_from_str(field(8)).ok_or_else(|| Error::Parse {
            line,
            message: format!("unknown outcome {:?}", field(8)),
        })?;
        let opt_id = |s: &str| {
            if s.is_empty() {
                None
            } else {
                Some(PlayerId::new(s))
            }
        };
        if let Some(last) = events.last() {
            let last: &MatchEvent = last;
            if timestamp_s < last.timestamp_s {
                return Err(Error::Parse {
                    line,
                    message: format!(
                        "event timestamps must not decrease: {} then {}",
                        last.timestamp_s, timestamp_s
                    ),
                });
            }
        }
        events.push(MatchEvent {
            event_id: field(0).to_string(),
            kind,
            timestamp_s,
            team_id: field(3).to_string(),
            player_id: opt_id(field(4)),
            receiver_id: opt_id(field(5)),
            location: Vec2::new(x, y),
            outcome,
        });
    }
    Ok(events)
}

pub fn write_events<W: Write>(events: &[MatchEvent], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(EVENTS_HEADER)?;
    for e in events {
        w.write_record([
            e.event_id.as_str(),
            kind_to_str(e.kind),
            &e.timestamp_s.to_string(),
            e.team_id.as_str(),
            e.player_id.as_ref().map(|p| p.as_str()).unwrap_or(""),
            e.receiver_id.as_ref().map(|p| p.as_str()).unwrap_or(""),
            &e.location.x.to_string(),
            &e.location.y.to_string(),
            outcome_to_str(e.outcome),
        ])?;
    }
    w.flush()?;
    Ok(())
}
