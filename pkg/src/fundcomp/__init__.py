"""fundcomp: fundamental component enhancement via nonlinear activations."""

__version__ = "0.1.0"
