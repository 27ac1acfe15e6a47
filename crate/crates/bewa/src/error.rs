use thiserror::Error;

/// Engine-wide error type. Variants mirror the rejection conditions of the
/// individual subsystems; rejection of input *data* (e.g. an inadmissible
/// corpus entry) is reported as a value, not through this enum.
#[derive(Debug, Error, PartialEq)]
pub enum BewaError {
    // claim store
    #[error("author name is empty after trimming")]
    EmptyName,
    #[error("claim normalized form is empty")]
    EmptyClaim,
    #[error("version timestamp does not strictly increase")]
    NonMonotoneTimestamp,
    #[error("parent signature does not match the previous version")]
    BrokenParentLink,
    #[error("version number must increase by exactly one")]
    VersionGap,
    #[error("new version must declare its relation to the predecessor")]
    MissingRelation,
    #[error("a restating version must carry a byte-identical normalized form")]
    RestatementMismatch,
    #[error("temporal anchor end precedes start")]
    InvertedInterval,
    #[error("corpus file is malformed: {0}")]
    MalformedCorpus(String),

    // credibility
    #[error("weight vector components must be non-negative")]
    NegativeWeight,
    #[error("citation timestamp lies in the future")]
    FutureCitation,
    #[error("embedding dimensions differ")]
    DimensionMismatch,
    #[error("embedding vector is not unit-normalized")]
    NotNormalized,
    #[error("equivalence similarity does not exceed the threshold")]
    ThresholdViolation,
    #[error("domain affinity must lie in [0,1]")]
    AffinityOutOfRange,

    // belief kernel
    #[error("prior input outside [0,1]")]
    InputOutOfRange,
    #[error("evidence weight outside the open interval (0,1)")]
    DegenerateWeight,
    #[error("evidence sequence is not sorted by timestamp")]
    UnsortedEvidence,
    #[error("clock regression: now precedes the last reinforcement")]
    ClockRegression,
    #[error("decay rate must be positive")]
    ZeroRate,
    #[error("evidence weight does not exceed the reinforcement threshold")]
    BelowThreshold,
    #[error("fewer qualifying replications than required")]
    InsufficientReplications,
    #[error("replication domain incompatible with the claim domain")]
    DomainMismatch,
    #[error("claim is terminally discredited; no reset permitted")]
    TerminallyDiscredited,
    #[error("claim is not in probational status")]
    NotProbational,

    // belief graph
    #[error("unknown claim: {0}")]
    UnknownClaim(String),
    #[error("edge weight components must sum to 1")]
    BadWeights,
    #[error("edge would close a cycle in the foundational subgraph")]
    FoundationalCycle,
    #[error("cluster has no members")]
    EmptyCluster,
    #[error("cluster is not flagged for partitioning")]
    NotFlagged,
    #[error("neither claim in the conflict carries evidence mass")]
    NoEvidence,

    // utility
    #[error("domain contains no claims")]
    EmptyDomain,

    // ledger
    #[error("writer is not authorized for the claim's sovereign space")]
    UnauthorizedWriter,
    #[error("signature creation or verification failed")]
    SignatureFailure,
    #[error("cannot seal an epoch with no leaves")]
    EmptyEpoch,
    #[error("leaf is not a member of the epoch")]
    UnknownLeaf,
    #[error("no registered key for actor")]
    UnknownKey,
    #[error("audit range end precedes start")]
    InvertedRange,
    #[error("claim trace is superseded; appends must extend the successor")]
    SupersededTrace,
    #[error("ledger file is malformed: {0}")]
    MalformedLedger(String),

    // api
    #[error("query filter is invalid: {0}")]
    BadFilter(String),
    #[error("as-of timestamp lies in the future")]
    AsOfInFuture,
    #[error("failed to bind service address: {0}")]
    BindFailure(String),

    // simulation
    #[error("simulation config is invalid: {0}")]
    BadConfig(String),
    #[error("belief series is empty")]
    EmptySeries,
    #[error("no contradictions at the baseline epoch")]
    NoInitialContradictions,
    #[error("cohort is empty")]
    EmptyCohort,

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for BewaError {
    fn from(e: std::io::Error) -> Self {
        BewaError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, BewaError>;
