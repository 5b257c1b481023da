//! Message alphabet and the networks that carry it.

use std::fmt;

/// Wire codes follow the order of the message table; code 19 is never used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum MessageType {
    DtRd = 0,
    DtWr = 1,
    RspDtRd = 2,
    RspDtWr = 3,
    Rd = 4,
    Wr = 5,
    RspRd = 6,
    RspWr = 7,
    Clnup = 8,
    Clack = 9,
    BInv = 10,
    MInv = 11,
    MUp = 12,
    RspMUp = 13,
    Get = 14,
    Put = 15,
    RspGet = 16,
    RspPut = 17,
    /// Only the legacy protocol emits this.
    RspBInv = 18,
}

/// Size of the `type` field domain of every channel (codes 0..=19).
pub const TYPE_CODES: i32 = 20;

impl MessageType {
    pub const ALL: [MessageType; 19] = [
        MessageType::DtRd,
        MessageType::DtWr,
        MessageType::RspDtRd,
        MessageType::RspDtWr,
        MessageType::Rd,
        MessageType::Wr,
        MessageType::RspRd,
        MessageType::RspWr,
        MessageType::Clnup,
        MessageType::Clack,
        MessageType::BInv,
        MessageType::MInv,
        MessageType::MUp,
        MessageType::RspMUp,
        MessageType::Get,
        MessageType::Put,
        MessageType::RspGet,
        MessageType::RspPut,
        MessageType::RspBInv,
    ];

    pub fn code(self) -> i32 {
        self as i32
    }

    pub fn from_code(code: i32) -> Option<MessageType> {
        Self::ALL.get(usize::try_from(code).ok()?).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            MessageType::DtRd => "DT_RD",
            MessageType::DtWr => "DT_WR",
            MessageType::RspDtRd => "RSP_DT_RD",
            MessageType::RspDtWr => "RSP_DT_WR",
            MessageType::Rd => "RD",
            MessageType::Wr => "WR",
            MessageType::RspRd => "RSP_RD",
            MessageType::RspWr => "RSP_WR",
            MessageType::Clnup => "CLNUP",
            MessageType::Clack => "CLACK",
            MessageType::BInv => "B_INV",
            MessageType::MInv => "M_INV",
            MessageType::MUp => "M_UP",
            MessageType::RspMUp => "RSP_M_UP",
            MessageType::Get => "GET",
            MessageType::Put => "PUT",
            MessageType::RspGet => "RSP_GET",
            MessageType::RspPut => "RSP_PUT",
            MessageType::RspBInv => "RSP_B_INV",
        }
    }

    pub fn channel(self) -> Channel {
        use MessageType::*;
        match self {
            DtRd | DtWr => Channel::PL1DTREQ,
            RspDtRd | RspDtWr => Channel::L1PDTRSP,
            Rd | Wr => Channel::L1L2DTREQ,
            RspRd | RspWr => Channel::L2L1DTRSP,
            Clnup | RspMUp | RspBInv => Channel::L1L2CPRSP,
            Clack => Channel::L2L1CLACK,
            BInv | MInv | MUp => Channel::L2L1CPREQ,
            Get | Put => Channel::L2MEMDTREQ,
            RspGet | RspPut => Channel::MEML2DTRSP,
        }
    }
}

impl fmt::Display for MessageType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Which side of a channel a component sits on, for trace rendering.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endpoint {
    Processor,
    L1,
    L2,
    Memory,
}

#[allow(clippy::upper_case_acronyms)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Channel {
    PL1DTREQ,
    L1PDTRSP,
    L1L2DTREQ,
    L2L1DTRSP,
    L1L2CPRSP,
    L2L1CPREQ,
    L2L1CLACK,
    L2MEMDTREQ,
    MEML2DTRSP,
}

impl Channel {
    pub const ALL: [Channel; 9] = [
        Channel::PL1DTREQ,
        Channel::L1PDTRSP,
        Channel::L1L2DTREQ,
        Channel::L2L1DTRSP,
        Channel::L1L2CPRSP,
        Channel::L2L1CPREQ,
        Channel::L2L1CLACK,
        Channel::L2MEMDTREQ,
        Channel::MEML2DTRSP,
    ];

    /// Networks shared by every L1 and L2; the others are per-processor or memory-side.
    pub const SHARED_L1L2: [Channel; 5] =
        [Channel::L1L2DTREQ, Channel::L2L1DTRSP, Channel::L1L2CPRSP, Channel::L2L1CPREQ, Channel::L2L1CLACK];

    pub fn name(self) -> &'static str {
        match self {
            Channel::PL1DTREQ => "PL1DTREQ",
            Channel::L1PDTRSP => "L1PDTRSP",
            Channel::L1L2DTREQ => "L1L2DTREQ",
            Channel::L2L1DTRSP => "L2L1DTRSP",
            Channel::L1L2CPRSP => "L1L2CPRSP",
            Channel::L2L1CPREQ => "L2L1CPREQ",
            Channel::L2L1CLACK => "L2L1CLACK",
            Channel::L2MEMDTREQ => "L2MEMDTREQ",
            Channel::MEML2DTRSP => "MEML2DTRSP",
        }
    }

    /// Instance name of the channel inside its enclosing composite.
    pub fn instance(self) -> String {
        format!("chan_{}", self.name())
    }

    pub fn has_id(self) -> bool {
        Self::SHARED_L1L2.contains(&self)
    }

    /// Channels living inside each processor/L1 composite.
    pub fn is_local(self) -> bool {
        matches!(self, Channel::PL1DTREQ | Channel::L1PDTRSP)
    }

    pub fn endpoints(self) -> (Endpoint, Endpoint) {
        use Endpoint::*;
        match self {
            Channel::PL1DTREQ => (Processor, L1),
            Channel::L1PDTRSP => (L1, Processor),
            Channel::L1L2DTREQ | Channel::L1L2CPRSP => (L1, L2),
            Channel::L2L1DTRSP | Channel::L2L1CPREQ | Channel::L2L1CLACK => (L2, L1),
            Channel::L2MEMDTREQ => (L2, Memory),
            Channel::MEML2DTRSP => (Memory, L2),
        }
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `code<TAB>name<TAB>channel` rows for every message kind.
pub fn message_table_tsv() -> String {
    let mut out = String::from("code\tname\tchannel\n");
    for m in MessageType::ALL {
        out.push_str(&format!("{}\t{}\t{}\n", m.code(), m.name(), m.channel()));
    }
    out
}
