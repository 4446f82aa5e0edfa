//! Fixtures shared by the benchmarks.

use frameguard::protocol::{encode, Action, Frame, Message, RoundEnd};
use frameguard::score::RoundResult;

/// The two messages exchanged on every frame of a match.
pub fn per_frame_messages() -> [Message; 2] {
    [
        Message::Frame(Frame {
            round_id: 42,
            frame_id: 1234,
            hp_self: 184,
            hp_opp: 9,
            send_ts_us: 1_700_000_000_123,
        }),
        Message::Action(Action {
            frame_id: 1234,
            action_code: 1,
            reported_processing_us: 15_850,
        }),
    ]
}

/// A byte stream of `frames` FRAME/ACTION pairs followed by a ROUND_END.
pub fn wire_stream(frames: u32) -> Vec<u8> {
    let mut out = Vec::new();
    let [frame, action] = per_frame_messages();
    for _ in 0..frames {
        out.extend(encode(&frame).unwrap());
        out.extend(encode(&action).unwrap());
    }
    out.extend(
        encode(&Message::RoundEnd(RoundEnd {
            round_id: 42,
            hp_self: 184,
            hp_opp: 0,
            elapsed_frames: frames,
            frames_processed: frames,
            frames_skipped: 0,
        }))
        .unwrap(),
    );
    out
}

/// 96 rounds spanning wins, losses, ties and timeouts.
pub fn mixed_rounds() -> Vec<RoundResult> {
    (1..=96u32)
        .map(|i| {
            let hp_self = (i * 37) % 401;
            let hp_opp = (i * 53) % 401;
            let ko = hp_self == 0 || hp_opp == 0;
            let elapsed = if ko { (i * 97) % 3600 } else { 3600 };
            RoundResult {
                round_id: i,
                hp_self,
                hp_opp,
                elapsed_frames: elapsed,
                frames_sent: elapsed,
                frames_processed: elapsed,
                frames_skipped: 0,
                mean_overhead_us: None,
            }
        })
        .collect()
}
