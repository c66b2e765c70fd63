"""Two-level atom coupled to the guided mode of a nanofiber Bragg-grating cavity."""

__version__ = "0.1.0"
