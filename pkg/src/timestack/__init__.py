"""timestack: compress a video's motion into one color-coded image,
send it over a simulated noisy channel, and check that the motion
story survives.

The pipeline: render or load a short video, collapse it with
stack_video (time becomes hue), transmit the single image with the
motion-gated analog codec (or a baseline), then let the probe decode
hue back into time to answer direction/order questions.
"""

from .baselines import dct_analog_transmit, digital_transmit, hamming_decode, hamming_encode
from .channel import ChannelConfig, derive_seed, power_normalize, snr_to_noise_power, transmit
from .codec import (
    CodecParams,
    TrainConfig,
    TrainingDiverged,
    allocate_budgets,
    init_params,
    load_params,
    mast_decode,
    mast_encode,
    mast_transmit,
    save_params,
    train,
)
from .color import hue_rotate, rgb_to_yiq, yiq_to_rgb
from .imageio import read_float_dump, read_png, write_float_dump, write_png
from .metrics import BandwidthReport, bandwidth_report, bcr, masked_mse_split, mse, psnr
from .probe import ProbeAnswer, Trail, answer, decode_field, extract_trails, hue_to_time, score_answer
from .scenes import SceneObject, SceneSpec, SceneTruth, load_truth, random_spec, render, save_truth
from .stacking import StackParams, flop_estimate, stack_video
from .sweep import SweepConfig, build_input, run_sweep, write_csv

__version__ = "0.1.0"

__all__ = [
    "BandwidthReport",
    "ChannelConfig",
    "CodecParams",
    "ProbeAnswer",
    "SceneObject",
    "SceneSpec",
    "SceneTruth",
    "StackParams",
    "SweepConfig",
    "Trail",
    "TrainConfig",
    "TrainingDiverged",
    "allocate_budgets",
    "answer",
    "bandwidth_report",
    "bcr",
    "build_input",
    "dct_analog_transmit",
    "decode_field",
    "derive_seed",
    "digital_transmit",
    "extract_trails",
    "flop_estimate",
    "hamming_decode",
    "hamming_encode",
    "hue_rotate",
    "hue_to_time",
    "init_params",
    "load_params",
    "load_truth",
    "mast_decode",
    "mast_encode",
    "mast_transmit",
    "masked_mse_split",
    "mse",
    "power_normalize",
    "psnr",
    "random_spec",
    "read_float_dump",
    "read_png",
    "render",
    "rgb_to_yiq",
    "run_sweep",
    "save_params",
    "save_truth",
    "score_answer",
    "snr_to_noise_power",
    "stack_video",
    "train",
    "transmit",
    "write_csv",
    "write_float_dump",
    "write_png",
    "yiq_to_rgb",
]
