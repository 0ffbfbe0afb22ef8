"""Frame encoder, temporal aggregation and classification head"""

from .aggregation import LSTMState, aggregate, lstm_step, mean_aggregate
from .attention import multi_head, self_attention
from .config import AggregatorKind, AttentionScale, EmbedConfig, EncoderConfig, InitScheme, ModelSpec
from .embedding import embed, patchify
from .encoder import encode_frame, encoder_layer
from .head import classify, cross_entropy
from .network import check_weights, expected_shapes, forward_sample, init_weights, predict, sample_loss
from .weights import ModelWeights, WeightScope
