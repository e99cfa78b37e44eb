//! Synthetic data: seeded random frames for benchmarks and the invariant
//! runner, and a fully scripted mini-match fixture with known phase
//! structure for end-to-end tests.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::geom::Vec2;
use crate::io::{events::write_events, tracking::write_tracking};
use crate::io::tracking::{TrackingFrame, TrackingPlayer};
use crate::phases::{EventKind, MatchEvent, Outcome};
use crate::state::{Frame, PlayerId, PlayerState, Team};

/// Seeded 11v11 frames with smooth motion, for benchmarks and property
/// suites. Deterministic for a given `(n_frames, seed)`.
pub fn synthetic_frames(n_frames: usize, seed: u64) -> Vec<Frame> {
    let mut rng = StdRng::seed_from_u64(seed);
    let dt = 0.04;
    struct Body {
        id: PlayerId,
        team: Team,
        pos: Vec2,
        vel: Vec2,
        head: f64,
    }
    let mut bodies: Vec<Body> = Vec::with_capacity(22);
    for k in 0..22 {
        let team = if k < 11 { Team::Attacking } else { Team::Defending };
        let prefix = if k < 11 { "att" } else { "def" };
        let speed: f64 = rng.gen_range(0.0..8.0);
        let dir: f64 = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
        bodies.push(Body {
            id: PlayerId::new(format!("{prefix}_{:02}", k % 11 + 1)),
            team,
            pos: Vec2::new(rng.gen_range(-48.0..48.0), rng.gen_range(-30.0..30.0)),
            vel: Vec2::new(speed * dir.cos(), speed * dir.sin()),
            head: rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI),
        });
    }
    let mut ball = Vec2::new(rng.gen_range(-20.0..20.0), rng.gen_range(-15.0..15.0));
    let mut ball_vel = Vec2::new(rng.gen_range(-6.0..6.0), rng.gen_range(-6.0..6.0));

    let mut frames = Vec::with_capacity(n_frames);
    for i in 0..n_frames {
        let players = bodies
            .iter()
            .map(|b| {
                PlayerState::new(
                    b.id.clone(),
                    b.team,
                    b.pos,
                    b.vel,
                    b.head,
                    b.head + 0.1,
                    b.head,
                )
            })
            .collect();
        frames.push(Frame::new(i as u64, i as f64 * dt, ball, players));

        for b in bodies.iter_mut() {
            b.pos = b.pos + b.vel * dt;
            if b.pos.x.abs() > 50.0 {
                b.vel.x = -b.vel.x;
                b.pos.x = b.pos.x.clamp(-50.0, 50.0);
            }
            if b.pos.y.abs() > 32.0 {
                b.vel.y = -b.vel.y;
                b.pos.y = b.pos.y.clamp(-32.0, 32.0);
            }
            b.head += rng.gen_range(-0.15..0.15);
        }
        ball = ball + ball_vel * dt;
        if ball.x.abs() > 50.0 {
            ball_vel.x = -ball_vel.x;
            ball = Vec2::new(ball.x.clamp(-50.0, 50.0), ball.y);
        }
        if ball.y.abs() > 32.0 {
            ball_vel.y = -ball_vel.y;
            ball = Vec2::new(ball.x, ball.y.clamp(-32.0, 32.0));
        }
    }
    frames
}

/// What the scripted mini-match must produce end to end.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MiniMatchExpectations {
    pub passes: usize,
    pub set_pieces: usize,
    pub pair_count: usize,
    pub sample_count: usize,
    pub pair1_samples: usize,
    pub pair2_samples: usize,
    pub labeled_increase: usize,
    pub labeled_decrease: usize,
    pub excluded: usize,
    /// `(pass frame, reception frame, on-ball end frame)` per pair.
    pub pair1_frames: (u64, u64, u64),
    pub pair2_frames: (u64, u64, u64),
}

/// Scripted fixture: tracking and events ready to write to disk, plus
/// the exact phase structure they must yield.
#[derive(Clone, Debug)]
pub struct MiniMatch {
    pub tracking_jsonl: String,
    pub events_csv: String,
    pub expected: MiniMatchExpectations,
}

fn lerp(a: Vec2, b: Vec2, t: f64) -> Vec2 {
    a + (b - a) * t
}

/// Three passes, one set piece, one interception, 601 frames at 25 fps.
///
/// Pass 1 (a1 to a2 at t=12) opens an awaiting phase of 40 frames; a2
/// then dribbles 37 m from an empty flank into valuable space and
/// releases at t=19, a clear gain. Pass 2 (a2 to a3 at t=19) is a short
/// pass; a3 stands still and releases at t=23 with no change of
/// circumstance. Pass 3 (a3 to a4) is intercepted, so it opens nothing.
pub fn mini_match() -> MiniMatch {
    const LAST_FRAME: u64 = 600;
    let dt = 0.04;

    let a2_start = Vec2::new(-5.0, 25.0);
    let a2_end = Vec2::new(27.0, 5.0);
    let a3_pos = Vec2::new(31.0, 2.0);
    let a1_pos = Vec2::new(-20.0, 0.0);
    let a4_pos = Vec2::new(20.0, -5.0);
    let d4_pos = Vec2::new(40.0, -2.0);
    let intercept_pos = Vec2::new(17.0, -8.0);

    let a2_pos = |i: u64| -> Vec2 {
        if i < 340 {
            a2_start
        } else if i <= 475 {
            lerp(a2_start, a2_end, (i - 340) as f64 / 135.0)
        } else {
            a2_end
        }
    };
    let ball_pos = |i: u64| -> Vec2 {
        match i {
            0..=24 => Vec2::ZERO,
            25..=99 => lerp(Vec2::ZERO, a1_pos, (i - 25) as f64 / 75.0),
            100..=299 => a1_pos,
            300..=339 => lerp(a1_pos, a2_start, (i - 300) as f64 / 40.0),
            340..=475 => a2_pos(i),
            476..=509 => lerp(a2_end, a3_pos, (i - 475) as f64 / 35.0),
            510..=575 => a3_pos,
            576..=589 => lerp(a3_pos, intercept_pos, (i - 575) as f64 / 15.0),
            _ => intercept_pos,
        }
    };
    // Scanning script for the receiver of pass 1: two six-degree-per-
    // frame head turns (150 deg/s) during the awaiting phase, then the
    // dribble direction.
    let a2_head_deg = |i: u64| -> f64 {
        let dribble_dir = (-20.0f64).atan2(32.0).to_degrees();
        match i {
            0..=304 => 0.0,
            305..=310 => 6.0 * (i - 304) as f64,
            311..=314 => 36.0,
            315..=320 => 36.0 - 6.0 * (i - 314) as f64,
            321..=339 => 0.0,
            340..=475 => dribble_dir,
            _ => 10.0,
        }
    };

    let mut frames: Vec<TrackingFrame> = Vec::with_capacity(LAST_FRAME as usize + 1);
    for i in 0..=LAST_FRAME {
        let mut players = Vec::new();
        let mut push = |id: &str,
                        team: Team,
                        pos: Vec2,
                        head_deg: Option<f64>,
                        shoulder_deg: Option<f64>,
                        label: Option<&str>| {
            players.push(TrackingPlayer {
                player_id: PlayerId::new(id),
                team,
                position: pos,
                head_angle: head_deg.map(f64::to_radians),
                shoulder_angle: shoulder_deg.map(f64::to_radians),
                hip_angle: shoulder_deg.map(f64::to_radians),
                position_label: label.map(str::to_string),
            });
        };
        let a2_head = a2_head_deg(i);
        // A short gap in a2's head series exercises interpolation.
        let a2_head_opt = if (330..=333).contains(&i) { None } else { Some(a2_head) };
        let a3_shoulder = if (520..=521).contains(&i) { None } else { Some(30.0) };
        push("a1", Team::Attacking, a1_pos, Some(59.0), Some(59.0), None);
        push(
            "a2",
            Team::Attacking,
            a2_pos(i),
            a2_head_opt,
            Some(a2_head),
            Some("central_midfielder"),
        );
        push("a3", Team::Attacking, a3_pos, Some(30.0), a3_shoulder, Some("wide_forward"));
        push("a4", Team::Attacking, a4_pos, Some(180.0), Some(180.0), None);
        push("a5", Team::Attacking, Vec2::new(-2.0, 14.0), Some(0.0), Some(0.0), None);
        push("a6", Team::Attacking, Vec2::new(-18.0, 22.0), Some(20.0), Some(20.0), None);
        push("a7", Team::Attacking, Vec2::new(-30.0, -15.0), Some(45.0), Some(45.0), None);
        push("a8", Team::Attacking, Vec2::new(5.0, -20.0), Some(10.0), Some(10.0), None);
        push("d1", Team::Defending, Vec2::new(10.0, 8.0), Some(-90.0), Some(-90.0), None);
        push("d2", Team::Defending, Vec2::new(15.0, -10.0), Some(90.0), Some(90.0), None);
        push("d3", Team::Defending, Vec2::new(30.0, 0.0), Some(180.0), Some(180.0), None);
        push("d4", Team::Defending, d4_pos, Some(160.0), Some(160.0), None);
        push("d5", Team::Defending, Vec2::new(25.0, 12.0), Some(-150.0), Some(-150.0), None);
        push("d6", Team::Defending, Vec2::new(35.0, -12.0), Some(120.0), Some(120.0), None);
        push("d7", Team::Defending, Vec2::new(45.0, 8.0), Some(-170.0), Some(-170.0), None);
        push("d8", Team::Defending, Vec2::new(48.0, -6.0), Some(175.0), Some(175.0), None);
        frames.push(TrackingFrame {
            frame_id: i,
            timestamp_s: i as f64 * dt,
            ball: ball_pos(i),
            players,
        });
    }

    let ev = |id: &str,
              kind: EventKind,
              t: f64,
              player: Option<&str>,
              receiver: Option<&str>,
              loc: Vec2,
              outcome: Outcome| MatchEvent {
        event_id: id.to_string(),
        kind,
        timestamp_s: t,
        team_id: if matches!(player, Some(p) if p.starts_with('d')) {
            "away".into()
        } else {
            "home".into()
        },
        player_id: player.map(PlayerId::new),
        receiver_id: receiver.map(PlayerId::new),
        location: loc,
        outcome,
    };
    let events = vec![
        ev("ev01", EventKind::SetPiece, 1.0, Some("a1"), None, Vec2::ZERO, Outcome::Unknown),
        ev("ev02", EventKind::Pass, 12.0, Some("a1"), Some("a2"), a1_pos, Outcome::Success),
        ev("ev03", EventKind::Pass, 19.0, Some("a2"), Some("a3"), a2_end, Outcome::Success),
        ev("ev04", EventKind::Pass, 23.0, Some("a3"), Some("a4"), a3_pos, Outcome::Failure),
        ev("ev05", EventKind::Other, 23.6, Some("d2"), None, intercept_pos, Outcome::Unknown),
    ];

    let mut tracking_jsonl = Vec::new();
    write_tracking(&frames, &mut tracking_jsonl).expect("serialize fixture tracking");
    let mut events_csv = Vec::new();
    write_events(&events, &mut events_csv).expect("serialize fixture events");

    MiniMatch {
        tracking_jsonl: String::from_utf8(tracking_jsonl).unwrap(),
        events_csv: String::from_utf8(events_csv).unwrap(),
        expected: MiniMatchExpectations {
            passes: 3,
            set_pieces: 1,
            pair_count: 2,
            sample_count: 75,
            pair1_samples: 40,
            pair2_samples: 35,
            labeled_increase: 40,
            labeled_decrease: 0,
            excluded: 35,
            pair1_frames: (300, 340, 475),
            pair2_frames: (475, 510, 575),
        },
    }
}
