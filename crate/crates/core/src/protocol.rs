//! Length-prefixed binary wire protocol between the match server and agents.
//!
//! Every message travels as a frame:
//!
//! ```text
//! +----------------+-----------+--------------------------+
//! | length: u32 BE | type: u8  | payload (length-1 bytes) |
//! +----------------+-----------+--------------------------+
//! ```
//!
//! Payload fields follow in declaration order. Integers are fixed-width
//! big-endian; strings are a one-byte length followed by UTF-8 bytes.
//!
//! | type | message     | payload                                                         |
//! |------|-------------|-----------------------------------------------------------------|
//! | 0x01 | HELLO       | name: str, role: u8, version: u8                                |
//! | 0x02 | HELLO_ACK   | accepted: u8, frame_period_us: u32                              |
//! | 0x03 | ROUND_START | round_id: u32, frames: u32, hp_total: u32                       |
//! | 0x04 | FRAME       | round_id: u32, frame_id: u32, hp_self: u32, hp_opp: u32, send_ts_us: u64 |
//! | 0x05 | ACTION      | frame_id: u32, action_code: u8, reported_processing_us: u32     |
//! | 0x06 | ROUND_END   | round_id, hp_self, hp_opp, elapsed_frames, frames_processed, frames_skipped: u32 |
//! | 0x07 | MATCH_END   | rounds: u32                                                     |

use thiserror::Error;

pub const PROTOCOL_VERSION: u8 = 1;
/// Upper bound on the declared frame length.
pub const MAX_FRAME_LEN: usize = 65536;
pub const MAX_NAME_LEN: usize = 64;
pub const DEFAULT_PORT: u16 = 31415;

const LEN_PREFIX: usize = 4;

pub const TYPE_HELLO: u8 = 0x01;
pub const TYPE_HELLO_ACK: u8 = 0x02;
pub const TYPE_ROUND_START: u8 = 0x03;
pub const TYPE_FRAME: u8 = 0x04;
pub const TYPE_ACTION: u8 = 0x05;
pub const TYPE_ROUND_END: u8 = 0x06;
pub const TYPE_MATCH_END: u8 = 0x07;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProtocolError {
    #[error("name is {len} bytes, limit is {MAX_NAME_LEN}")]
    NameTooLong { len: usize },
    #[error("unknown message type 0x{0:02X}")]
    UnknownType(u8),
    #[error("declared frame length {0} exceeds the {MAX_FRAME_LEN}-byte cap")]
    FrameTooLarge(usize),
    #[error("empty frame (length 0)")]
    EmptyFrame,
    #[error("{kind} payload is {actual} bytes, expected {expected}")]
    BadLength {
        kind: &'static str,
        expected: usize,
        actual: usize,
    },
    #[error("invalid {field} value {value}")]
    InvalidField { field: &'static str, value: u8 },
    #[error("name is not valid UTF-8")]
    InvalidUtf8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Role {
    Sandbox = 0,
    Player = 1,
}

impl TryFrom<u8> for Role {
    type Error = ProtocolError;

    fn try_from(value: u8) -> Result<Self, Self::Error> {
        match value {
            0 => Ok(Role::Sandbox),
            1 => Ok(Role::Player),
            _ => Err(ProtocolError::InvalidField {
                field: "role",
                value,
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hello {
    pub name: String,
    pub role: Role,
    pub version: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HelloAck {
    pub accepted: bool,
    pub frame_period_us: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoundStart {
    pub round_id: u32,
    pub frames: u32,
    pub hp_total: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Frame {
    pub round_id: u32,
    pub frame_id: u32,
    pub hp_self: u32,
    pub hp_opp: u32,
    /// Server monotonic timestamp; diagnostic only.
    pub send_ts_us: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Action {
    pub frame_id: u32,
    pub action_code: u8,
    pub reported_processing_us: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoundEnd {
    pub round_id: u32,
    pub hp_self: u32,
    pub hp_opp: u32,
    pub elapsed_frames: u32,
    pub frames_processed: u32,
    pub frames_skipped: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Message {
    Hello(Hello),
    HelloAck(HelloAck),
    RoundStart(RoundStart),
    Frame(Frame),
    Action(Action),
    RoundEnd(RoundEnd),
    MatchEnd { rounds: u32 },
}

impl Message {
    pub fn type_byte(&self) -> u8 {
        match self {
            Message::Hello(_) => TYPE_HELLO,
            Message::HelloAck(_) => TYPE_HELLO_ACK,
            Message::RoundStart(_) => TYPE_ROUND_START,
            Message::Frame(_) => TYPE_FRAME,
            Message::Action(_) => TYPE_ACTION,
            Message::RoundEnd(_) => TYPE_ROUND_END,
            Message::MatchEnd { .. } => TYPE_MATCH_END,
        }
    }
}

/// Encodes `msg` into a complete frame.
pub fn encode(msg: &Message) -> Result<Vec<u8>, ProtocolError> {
    let mut out = Vec::with_capacity(32);
    encode_into(msg, &mut out)?;
    Ok(out)
}

/// Appends the encoded frame for `msg` to `out`. On error `out` is unchanged.
pub fn encode_into(msg: &Message, out: &mut Vec<u8>) -> Result<(), ProtocolError> {
    if let Message::Hello(h) = msg {
        if h.name.len() > MAX_NAME_LEN {
            return Err(ProtocolError::NameTooLong { len: h.name.len() });
        }
    }

    let start = out.len();
    out.extend_from_slice(&[0; LEN_PREFIX]);
    out.push(msg.type_byte());
    match msg {
        Message::Hello(h) => {
            out.push(h.name.len() as u8);
            out.extend_from_slice(h.name.as_bytes());
            out.push(h.role as u8);
            out.push(h.version);
        }
        Message::HelloAck(a) => {
            out.push(u8::from(a.accepted));
            put_u32(out, a.frame_period_us);
        }
        Message::RoundStart(r) => {
            put_u32(out, r.round_id);
            put_u32(out, r.frames);
            put_u32(out, r.hp_total);
        }
        Message::Frame(f) => {
            put_u32(out, f.round_id);
            put_u32(out, f.frame_id);
            put_u32(out, f.hp_self);
            put_u32(out, f.hp_opp);
            out.extend_from_slice(&f.send_ts_us.to_be_bytes());
        }
        Message::Action(a) => {
            put_u32(out, a.frame_id);
            out.push(a.action_code);
            put_u32(out, a.reported_processing_us);
        }
        Message::RoundEnd(r) => {
            for v in [
                r.round_id,
                r.hp_self,
                r.hp_opp,
                r.elapsed_frames,
                r.frames_processed,
                r.frames_skipped,
            ] {
                put_u32(out, v);
            }
        }
        Message::MatchEnd { rounds } => put_u32(out, *rounds),
    }
    let len = (out.len() - start - LEN_PREFIX) as u32;
    out[start..start + LEN_PREFIX].copy_from_slice(&len.to_be_bytes());
    Ok(())
}

fn put_u32(out: &mut Vec<u8>, v: u32) {
    out.extend_from_slice(&v.to_be_bytes());
}

/// Decodes one frame from the front of `bytes`.
///
/// Returns `Ok(None)` when `bytes` holds only a prefix of a frame; nothing is
/// consumed in that case. On success returns the message and the number of
/// bytes it occupied (always `4 + length`).
pub fn decode(bytes: &[u8]) -> Result<Option<(Message, usize)>, ProtocolError> {
    if bytes.len() < LEN_PREFIX {
        return Ok(None);
    }
    let len = u32::from_be_bytes([bytes[0], bytes[1], bytes[2], bytes[3]]) as usize;
    if len > MAX_FRAME_LEN {
        return Err(ProtocolError::FrameTooLarge(len));
    }
    if len == 0 {
        return Err(ProtocolError::EmptyFrame);
    }
    // the type byte is checked as soon as it is visible
    if bytes.len() > LEN_PREFIX && !(TYPE_HELLO..=TYPE_MATCH_END).contains(&bytes[LEN_PREFIX]) {
        return Err(ProtocolError::UnknownType(bytes[LEN_PREFIX]));
    }
    if bytes.len() < LEN_PREFIX + len {
        return Ok(None);
    }
    let body = &bytes[LEN_PREFIX..LEN_PREFIX + len];
    let msg = decode_body(body[0], &body[1..])?;
    Ok(Some((msg, LEN_PREFIX + len)))
}

fn decode_body(kind: u8, payload: &[u8]) -> Result<Message, ProtocolError> {
    let fixed = |name: &'static str, expected: usize| {
        if payload.len() == expected {
            Ok(Reader(payload))
        } else {
            Err(ProtocolError::BadLength {
                kind: name,
                expected,
                actual: payload.len(),
            })
        }
    };

    let msg = match kind {
        TYPE_HELLO => {
            let Some((&name_len, rest)) = payload.split_first() else {
                return Err(ProtocolError::BadLength {
                    kind: "HELLO",
                    expected: 3,
                    actual: 0,
                });
            };
            let name_len = name_len as usize;
            if rest.len() != name_len + 2 {
                return Err(ProtocolError::BadLength {
                    kind: "HELLO",
                    expected: 1 + name_len + 2,
                    actual: payload.len(),
                });
            }
            if name_len > MAX_NAME_LEN {
                return Err(ProtocolError::NameTooLong { len: name_len });
            }
            let name = std::str::from_utf8(&rest[..name_len])
                .map_err(|_| ProtocolError::InvalidUtf8)?
                .to_owned();
            Message::Hello(Hello {
                name,
                role: Role::try_from(rest[name_len])?,
                version: rest[name_len + 1],
            })
        }
        TYPE_HELLO_ACK => {
            let mut r = fixed("HELLO_ACK", 5)?;
            let accepted = match r.u8() {
                0 => false,
                1 => true,
                value => {
                    return Err(ProtocolError::InvalidField {
                        field: "accepted",
                        value,
                    })
                }
            };
            Message::HelloAck(HelloAck {
                accepted,
                frame_period_us: r.u32(),
            })
        }
        TYPE_ROUND_START => {
            let mut r = fixed("ROUND_START", 12)?;
            Message::RoundStart(RoundStart {
                round_id: r.u32(),
                frames: r.u32(),
                hp_total: r.u32(),
            })
        }
        TYPE_FRAME => {
            let mut r = fixed("FRAME", 24)?;
            Message::Frame(Frame {
                round_id: r.u32(),
                frame_id: r.u32(),
                hp_self: r.u32(),
                hp_opp: r.u32(),
                send_ts_us: r.u64(),
            })
        }
        TYPE_ACTION => {
            let mut r = fixed("ACTION", 9)?;
            Message::Action(Action {
                frame_id: r.u32(),
                action_code: r.u8(),
                reported_processing_us: r.u32(),
            })
        }
        TYPE_ROUND_END => {
            let mut r = fixed("ROUND_END", 24)?;
            Message::RoundEnd(RoundEnd {
                round_id: r.u32(),
                hp_self: r.u32(),
                hp_opp: r.u32(),
                elapsed_frames: r.u32(),
                frames_processed: r.u32(),
                frames_skipped: r.u32(),
            })
        }
        TYPE_MATCH_END => {
            let mut r = fixed("MATCH_END", 4)?;
            Message::MatchEnd { rounds: r.u32() }
        }
        other => return Err(ProtocolError::UnknownType(other)),
    };
    Ok(msg)
}

/// Cursor over a payload whose length has already been checked.
struct Reader<'a>(&'a [u8]);

impl Reader<'_> {
    fn take<const N: usize>(&mut self) -> [u8; N] {
        let (head, rest) = self.0.split_at(N);
        self.0 = rest;
        head.try_into().expect("length checked")
    }

    fn u8(&mut self) -> u8 {
        self.take::<1>()[0]
    }

    fn u32(&mut self) -> u32 {
        u32::from_be_bytes(self.take())
    }

    fn u64(&mut self) -> u64 {
        u64::from_be_bytes(self.take())
    }
}

/// Accumulates stream bytes and yields complete messages.
#[derive(Debug, Default)]
pub struct FrameDecoder {
    buf: Vec<u8>,
}

impl FrameDecoder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn extend(&mut self, bytes: &[u8]) {
        self.buf.extend_from_slice(bytes);
    }

    /// Number of buffered bytes not yet decoded.
    pub fn buffered(&self) -> usize {
        self.buf.len()
    }

    /// Pops the next complete message, if one is buffered.
    pub fn next_message(&mut self) -> Result<Option<Message>, ProtocolError> {
        match decode(&self.buf)? {
            Some((msg, consumed)) => {
                self.buf.drain(..consumed);
                Ok(Some(msg))
            }
            None => Ok(None),
        }
    }
}

/// Blocking helpers over any byte stream.
pub mod io {
    use super::{encode, FrameDecoder, Message, ProtocolError};
    use std::io::{self, Read, Write};

    #[derive(Debug, thiserror::Error)]
    pub enum WireError {
        #[error("i/o: {0}")]
        Io(#[from] io::Error),
        #[error("protocol: {0}")]
        Protocol(#[from] ProtocolError),
        #[error("connection closed")]
        Closed,
    }

    pub fn write_message<W: Write>(w: &mut W, msg: &Message) -> Result<(), WireError> {
        let bytes = encode(msg)?;
        w.write_all(&bytes)?;
        Ok(())
    }

    /// Reads from `r` until one full message is available.
    pub fn read_message<R: Read>(
        r: &mut R,
        decoder: &mut FrameDecoder,
    ) -> Result<Message, WireError> {
        let mut chunk = [0u8; 512];
        loop {
            if let Some(msg) = decoder.next_message()? {
                return Ok(msg);
            }
            let n = match r.read(&mut chunk) {
                Ok(0) => return Err(WireError::Closed),
                Ok(n) => n,
                Err(e) if e.kind() == io::ErrorKind::Interrupted => continue,
                Err(e) => return Err(e.into()),
            };
            decoder.extend(&chunk[..n]);
        }
    }
}
