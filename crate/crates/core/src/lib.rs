//! Semantic similarity metrics for sentence pairs, plus the order-based
//! machinery for comparing the metrics themselves against human judgment.
//!
//! The crate has three layers:
//!
//! * data: sentence-pair datasets with human annotations ([`corpus`]),
//!   word-vector tables and ingested contextual vectors ([`embeddings`]),
//!   and deterministic text preprocessing ([`textproc`]);
//! * scoring: thirteen similarity/distance metrics behind a polarity-aware
//!   registry ([`metrics`]), with an exact transportation-simplex solver
//!   ([`transport`]) underneath the word mover's distance;
//! * comparison: per-dataset summaries, metric-induced dataset orders, the
//!   random-pair floor check, correlation with human labels, variability,
//!   and order-agreement scores ([`analysis`]).
//!
//! Scores follow each metric's native convention (similarity grows with
//! closeness, distance shrinks); analysis normalizes polarity so that
//! "higher means more similar" holds uniformly. All randomized operations
//! are seeded and reproducible (see [`rng`]).

pub mod analysis;
pub mod corpus;
pub mod embeddings;
pub mod metrics;
pub mod rng;
pub mod textproc;
pub mod transport;

pub use analysis::{
    build_report, check_inequalities, induce_order, order_correlation, rank_coincidence, summarize,
    swap_count, variability, AnalysisError, ComparisonReport, DatasetSummary, InducedOrder,
    InequalityViolation, MetricReport,
};
pub use corpus::{
    aggregate_human, generate_random_pairs, load_pairs, load_study, sample_pairs, save_pairs,
    CorpusError, DatasetKind, PairDataset, PairFormat, SentencePair, Study, StudyManifest,
};
pub use embeddings::{
    cosine, euclidean, load_contextual, load_table, sentence_embed_minmaxmean,
    ContextualPairVectors, EmbeddingError, EmbeddingTable, SentenceVector,
};
pub use metrics::{
    compute_all, default_registry, descriptor, polarity_of, score_pair, MetricDescriptor,
    MetricError, MetricResources, PairScore, ParamValue, Polarity, ScoreGrid, ScoreOptions,
    METRIC_NAMES,
};
pub use textproc::{porter_stem, tokenize, NounLexicon, SynonymMap, TextError, TokenSequence};
pub use transport::{
    relaxed_lower_bound, solve_transport, TransportError, TransportPlan, TransportProblem,
};
