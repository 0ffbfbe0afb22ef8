"""High-level namespace, mexformer"""

from . import dataset, evaluation, flow, inspection, io, model, numerics, preprocess, training
from .pipeline_config import PipelineConfig, load_pipeline_config
