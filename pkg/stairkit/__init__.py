"""StairKit - stair detection postprocessing and verification toolkit"""

__version__ = "2.0.0"
