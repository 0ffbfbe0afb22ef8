"""Sample manifests, synthetic datasets, and model-ready clips"""

from .clip_sample import ClipSample, load_flow_samples
from .manifest import Manifest, ManifestError, load_manifest, write_manifest
from .sample_record import DatasetName, SampleRecord
from .synth import SynthSpec, synth_generate
