"""detpipe: synthetic telemanipulation pipeline.

Renders a marker-rotation scene, corrupts it with controlled visual
anomalies, detects and excises the corrupted window, reconstructs the gap
(diffusion model, Fourier fill, or cubic spline), drives a simulated
tracking robot from the result, and scores everything.
"""

__version__ = "0.1.0"
