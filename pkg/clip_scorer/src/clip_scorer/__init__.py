from .backends import DEFAULT_MODEL, BackendError, ClipBackend, StubBackend, make_backend
from .scorer import ScoreRecord, ScorerError, iter_frames, load_captions, score_frames, write_records

__all__ = [
    "DEFAULT_MODEL", "BackendError", "ClipBackend", "StubBackend",
    "make_backend", "ScoreRecord", "ScorerError", "iter_frames",
    "load_captions", "score_frames", "write_records",
]

__version__ = "0.1.0"
