"""maskcert engine: masking, smoothing, certification, attacks and evaluation."""

__version__ = "0.1.0"
