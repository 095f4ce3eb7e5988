"""Deterministic CPU ink-and-wash renderer for triangle meshes.

Converts a mesh into a drawing-style image: calibrated contour lines over an
intensity-only Phong wash with soft PCF shadows, plus an image-metrics suite
that verifies the output against the calibrated style constants.
"""

from ._kernels import BACKEND, available_backends
from .geometry import Camera, DirectionalLight, Mesh, load_mesh
from .pipeline import RenderFrame, StyleParams, render_frame, validate_params

__all__ = [
    "BACKEND",
    "Camera",
    "DirectionalLight",
    "Mesh",
    "RenderFrame",
    "StyleParams",
    "available_backends",
    "load_mesh",
    "render_frame",
    "validate_params",
    "__version__",
]
__version__ = "0.1.0"
