"""lusokit: desk-scale tooling for Portuguese corpus pipelines.

Covers the procedural side of building Portuguese variant encoders:
web-crawl ingestion, TLD-based PTPT/PTBR separation, quality filtering
and deduplication, corpus statistics, subword tokenization with staged
truncation and dynamic padding, benchmark task preparation, evaluation
metrics, and resumable hyperparameter grid orchestration around an
external trainer command. No neural training happens here.
"""

__version__ = "0.1.0"

from lusokit.corpus_io import CorpusRecord, IngestReport, Source, read_records, write_records
from lusokit.variants import Variant, classify_variant, extract_tld

__all__ = [
    "__version__",
    "CorpusRecord",
    "IngestReport",
    "Source",
    "read_records",
    "write_records",
    "Variant",
    "classify_variant",
    "extract_tld",
]
