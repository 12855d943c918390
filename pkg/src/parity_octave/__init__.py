"""Exact base-octave analysis of the accelerated 3x+1 map."""

from .kernel import run_trajectory, step
from .octave import extract_state, from_base_octave, to_base_octave, v2
from .rules import next_base

__version__ = "0.1.0"
