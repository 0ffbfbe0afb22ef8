"""Dense optical flow, onset-anchored flow sequences, and flow colourisation"""

from .colorize import FlowInput, colorize_flow, flow_hsv, flows_to_model_input
from .estimation import LUMA_WEIGHTS, estimate_flow, to_grayscale, warp_image
from .flow_field import FlowField, FlowParams
from .long_term import long_term_flow, short_term_flow
