"""Utilities for reading and writing dataset, flow, and weight files"""

from .paths import (
    flow_file_path,
    flow_position_from_path,
    flow_visualization_file,
    frame_file,
    landmark_file,
    manifest_file,
    sample_output_directory,
)
