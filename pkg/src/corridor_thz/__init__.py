"""H-band corridor channel simulator (N-rays model) and sounding analytics."""

__version__ = "0.1.0"
