"""pqr: a QR / peacocked-QR codec toolkit.

Generate standard QR symbols, damage them with a distracter pattern so that
scanners fail until one corner is occluded, scan both kinds back, and run
multi-code scene simulations of the one-from-many selection property.
"""

from .encoder import CapacityExceeded, EcLevel, SymbolSpec, generate, symbol_spec
from .gf256 import DecodeFailure
from .matrix import ModuleMatrix
from .peacock import InfeasibleError, PqrArtifact, peacock
from .scanner import ScanReport, scan
from .scene import Scene, render, run_selection_trials

__all__ = [
    "CapacityExceeded",
    "DecodeFailure",
    "EcLevel",
    "InfeasibleError",
    "ModuleMatrix",
    "PqrArtifact",
    "ScanReport",
    "Scene",
    "SymbolSpec",
    "generate",
    "peacock",
    "render",
    "run_selection_trials",
    "scan",
    "symbol_spec",
]
