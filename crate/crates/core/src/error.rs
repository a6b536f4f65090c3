use num::BigUint;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("tuple enumeration would produce {product} tuples, above the cap of {cap}")]
    TupleCapExceeded { product: BigUint, cap: u64 },
    #[error("triple scan would examine {count} triples, above the cap of {cap}")]
    ScanCapExceeded { count: BigUint, cap: u64 },
    #[error("subset search would examine {count} subsets, above the guard of {guard}")]
    SearchGuardExceeded { count: BigUint, guard: u64 },
    #[error("search budget of {budget} nodes exhausted")]
    BudgetExhausted { budget: u64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("marginal violation at measure {measure}, slot {slot}: {detail}")]
    MarginalViolation {
        measure: usize,
        slot: usize,
        detail: String,
    },
    #[error("invalid combination measure: {0}")]
    InvalidCombination(String),
    #[error("invalid transport plan: {0}")]
    InvalidPlan(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("graph is not planar: {0}")]
    NonPlanar(String),
    #[error("invalid planar matching instance: {0}")]
    InvalidP3dm(String),
    #[error("layout failed: {0}")]
    LayoutFailed(String),
    #[error("invalid layout: {0}")]
    InvalidLayout(String),
    #[error("gadget construction failed on edge {element} -- triple {triple}: {detail}")]
    RoutingFailed {
        element: String,
        triple: usize,
        detail: String,
    },
    #[error("invalid gadget: {0}")]
    InvalidGadget(String),
    #[error("invalid cover: {0}")]
    InvalidCover(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
