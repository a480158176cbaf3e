"""Zero-shot multimodal nudge recommendation over text embeddings."""

__version__ = "0.1.0"
