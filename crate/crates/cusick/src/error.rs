use num_bigint::BigUint;

/// Errors reported by the library.
///
/// Everything here is a domain violation (bad argument, exhausted search
/// bound, infeasible request) or an I/O failure while checkpointing. All
/// numeric routines are total on their documented domains.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot reverse the binary expansion of 0 (no leading one)")]
    ReverseOfZero,

    #[error("modulus 2^{m} does not exceed t = {t}; the carry correction needs u + t < 2^(m+1)")]
    ModulusTooSmall { m: u32, t: u64 },

    #[error("sample count {0} is not a power of two")]
    SampleCountNotPowerOfTwo(u64),

    #[error("block length m must be at least 1")]
    EmptyBlock,

    #[error("series order mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },

    #[error("series division by a series with zero constant term")]
    NonUnitDivisor,

    #[error("epsilon must be a rational in (0, ∞), got {0}")]
    BadEpsilon(String),

    #[error("no moment order K ≤ {kmax} satisfies the decay inequality; enlarge the ledger")]
    MomentOrderExhausted { kmax: u32 },

    #[error("ledger holds constants only up to k = {have}, need k = {need}")]
    LedgerTooSmall { have: u32, need: u32 },

    #[error(
        "sampling integers with at least {required_log2:.0} (log2) blocks of ones is infeasible: \
         such t would need more than 2^{required_log2:.0} bits; the practical cap is {cap} blocks"
    )]
    SamplingInfeasible { required_log2: f64, cap: u64 },

    #[error("scan width {bits} exceeds the supported maximum of {max} bits")]
    ScanTooWide { bits: u32, max: u32 },

    #[error("checkpoint file is incompatible: {0}")]
    CheckpointMismatch(String),

    #[error("invalid integer literal `{0}` (expected decimal, 0x…, or 0b…)")]
    BadIntegerLiteral(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn sampling_infeasible(required: &BigUint, cap: u64) -> Self {
        Error::SamplingInfeasible {
            required_log2: required.bits() as f64,
            cap,
        }
    }
}
