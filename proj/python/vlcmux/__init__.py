"""Python bindings for the vlcmux pixelated-shutter VLC simulator."""

import json
import os

from . import _vlcmux
from ._vlcmux import (
    ModemConfig,
    OpticalSetup,
    VlcmuxError,
    bit_error_rate,
    bundled_scenario_names,
    demodulate,
    estimate_latency,
    goodput,
    make_id,
    map_emitters_to_pixels,
    min_angle_deg,
    min_separation,
    modulate,
    packet_error_rate,
    packets_per_slot,
    received_snr_db,
    receive,
)

__all__ = [
    "ModemConfig",
    "OpticalSetup",
    "VlcmuxError",
    "bit_error_rate",
    "bits",
    "bundled_scenario",
    "bundled_scenario_names",
    "demodulate",
    "detect_packets",
    "estimate_latency",
    "frame",
    "goodput",
    "make_id",
    "map_emitters_to_pixels",
    "min_angle_deg",
    "min_separation",
    "modulate",
    "packet_error_rate",
    "packets_per_slot",
    "received_snr_db",
    "receive",
    "replay",
    "reproduce_table",
    "run_scenario",
]


def bits(value):
    """Accept "0101" strings or iterables of 0/1 and return a list of ints."""
    if isinstance(value, str):
        return [1 if c == "1" else 0 for c in value if c in "01"]
    return [int(b) for b in value]


def frame(payload, kind="BARKER13"):
    return _vlcmux.frame(bits(payload), kind)


def detect_packets(stream, kinds=("BARKER13", "BARKER11_PADDED"), threshold=11, synchronized=False):
    return _vlcmux.detect_packets(bits(stream), list(kinds), threshold, synchronized)


def bundled_scenario(name):
    return json.loads(_vlcmux.bundled_scenario_json(name))


def run_scenario(scenario):
    """Run a scenario given as a dict, a JSON path, or a bundled name."""
    base_dir = ""
    if isinstance(scenario, (str, os.PathLike)):
        if os.path.exists(scenario):
            base_dir = os.path.dirname(os.path.abspath(scenario))
            with open(scenario) as f:
                scenario = json.load(f)
        else:
            scenario = bundled_scenario(str(scenario))
    return json.loads(_vlcmux.run_scenario_json(json.dumps(scenario), base_dir))


def replay(trace):
    """Recompute link reports from a trace dict or a trace.json path."""
    if isinstance(trace, (str, os.PathLike)):
        with open(trace) as f:
            trace = json.load(f)
    return json.loads(_vlcmux.replay_json(json.dumps(trace)))


def reproduce_table(name):
    return json.loads(_vlcmux.reproduce_table_json(name))
