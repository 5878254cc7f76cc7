"""Summary-based inverted indexes and vector-space retrieval evaluation."""

from .analyzer import AnalyzerConfig, Document, Sentence, analyze, build_document, split_sentences
from .evaluation import (
    EvalReport,
    auto_qrels,
    average_precision,
    evaluate,
    hit_points,
    interpolate_11pt,
    mean_average_precision,
    r_precision,
    set_metrics,
)
from .index import InvertedIndex, IndexStats, build_index, index_stats, load_index, save_index, term_weight
from .lsa import LsaSpace, build_lsa_space, lsa_similarity, svd
from .retrieval import Query, RankedList, batch_search, make_query, query_vector, search
from .similarity import cosine, jaccard_overlap, sentence_vectors
from .summarizer import ExtractorConfig, Layer, Model, SummaryResult, extract, mls_similarity, summarize_corpus

__version__ = "0.1.0"
