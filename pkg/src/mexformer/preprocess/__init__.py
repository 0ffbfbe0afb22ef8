"""Face alignment and cropping, temporal interpolation, frame selection, and the per-sample pipeline"""

from .alignment import (
    CropSpec,
    RigidTransform,
    align_rigid,
    center_crop,
    crop_and_resize,
    crop_square,
    warp_frame,
)
from .frame_selection import DEFAULT_FRAME_COUNT, resolve_apex, select_frames
from .interpolation import (
    InterpolationMode,
    InterpolationPlan,
    apply_interpolation_plan,
    build_interpolation_queue,
    interpolate_midpoint,
    interpolation_target,
)
from .landmarks import LANDMARK_COUNT, LandmarkSet, read_landmark_file, write_landmark_file
from .pipeline import (
    FlowMode,
    PreparedSample,
    PreprocessConfig,
    load_face_frames,
    prepare_record,
    preprocess_manifest,
    write_prepared_sample,
)
