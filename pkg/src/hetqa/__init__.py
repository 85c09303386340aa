"""Question answering over a question-specific graph of KG facts and text triples."""

from hetqa.graph import ContextGraph, EdgeKind, NodeKind, Source
from hetqa.gst import SteinerTree, brute_force_gst, solve_topk
from hetqa.pipeline import PipelineConfig, QuestionRecord, load_resources, run_pipeline

__version__ = "0.1.0"

__all__ = [
    "ContextGraph",
    "EdgeKind",
    "NodeKind",
    "PipelineConfig",
    "QuestionRecord",
    "Source",
    "SteinerTree",
    "brute_force_gst",
    "load_resources",
    "run_pipeline",
    "solve_topk",
]
