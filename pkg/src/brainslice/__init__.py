"""brainslice: GAN brain-slice synthesis, autoencoder denoising, and evaluation
tooling on a small self-contained numpy autodiff engine."""

from . import autodiff, baseline, dataflow, evaluate, layers, models, rating

__version__ = "0.1.0"

__all__ = ["autodiff", "layers", "models", "dataflow", "baseline", "evaluate",
           "rating", "__version__"]
