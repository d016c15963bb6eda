"""Embedding backends.

Every backend maps images and caption strings to unit-normalized vectors;
the scorer takes their cosine similarity. The stub backend is fully
deterministic and dependency-free so the pipeline can be exercised offline;
the clip backend loads the real vision-language model (default ViT-B/16).
"""

from __future__ import annotations

import hashlib
from typing import Protocol, Sequence

import numpy as np
from PIL import Image

DEFAULT_MODEL = "ViT-B/16"


class BackendError(Exception):
    pass


class EmbeddingBackend(Protocol):
    def embed_image(self, image: Image.Image) -> np.ndarray: ...

    def embed_texts(self, texts: Sequence[str]) -> np.ndarray: ...


def _unit(v: np.ndarray) -> np.ndarray:
    norm = np.linalg.norm(v, axis=-1, keepdims=True)
    norm[norm == 0] = 1.0
    return v / norm


class StubBackend:
    """Deterministic stand-in: images embed through coarse luminance
    statistics, texts through a hash-seeded random projection. Scores are
    stable across runs and platforms, and identical inputs embed
    identically."""

    DIM = 64
    THUMB = 8  # images are reduced to THUMB x THUMB grayscale

    def __init__(self, model: str = DEFAULT_MODEL):
        self.model = model

    def embed_image(self, image: Image.Image) -> np.ndarray:
        thumb = image.convert("L").resize((self.THUMB, self.THUMB))
        pixels = np.asarray(thumb, dtype=np.float64).reshape(-1) / 255.0
        seed = int.from_bytes(
            hashlib.sha256(f"image-basis:{self.model}".encode()).digest()[:8],
            "big")
        basis = np.random.default_rng(seed).standard_normal(
            (pixels.size, self.DIM))
        return _unit(pixels @ basis)

    def embed_texts(self, texts: Sequence[str]) -> np.ndarray:
        rows = []
        for text in texts:
            seed = int.from_bytes(
                hashlib.sha256(f"text:{self.model}:{text}".encode())
                .digest()[:8], "big")
            rows.append(np.random.default_rng(seed).standard_normal(self.DIM))
        return _unit(np.stack(rows))


class ClipBackend:
    """Real vision-language embeddings via the transformers CLIP family."""

    # public checkpoint ids for the short model names used in configs
    CHECKPOINTS = {
        "ViT-B/16": "openai/clip-vit-base-patch16",
        "ViT-B/32": "openai/clip-vit-base-patch32",
        "ViT-L/14": "openai/clip-vit-large-patch14",
    }

    def __init__(self, model: str = DEFAULT_MODEL):
        try:
            import torch  # noqa: F401
            from transformers import CLIPModel, CLIPProcessor
        except ImportError as exc:
            raise BackendError(
                "the clip backend needs torch and transformers installed "
                "(pip install 'clip-scorer[clip]'); use --backend stub for "
                "an offline run") from exc
        checkpoint = self.CHECKPOINTS.get(model, model)
        try:
            self._model = CLIPModel.from_pretrained(checkpoint)
            self._processor = CLIPProcessor.from_pretrained(checkpoint)
        except Exception as exc:
            raise BackendError(f"could not load model {model!r}: {exc}") from exc
        self._model.eval()

    def embed_image(self, image: Image.Image) -> np.ndarray:
        import torch

        inputs = self._processor(images=image, return_tensors="pt")
        with torch.no_grad():
            features = self._model.get_image_features(**inputs)
        return _unit(features[0].numpy().astype(np.float64))

    def embed_texts(self, texts: Sequence[str]) -> np.ndarray:
        import torch

        inputs = self._processor(text=list(texts), return_tensors="pt",
                                 padding=True)
        with torch.no_grad():
            features = self._model.get_text_features(**inputs)
        return _unit(features.numpy().astype(np.float64))


def make_backend(name: str, model: str = DEFAULT_MODEL) -> EmbeddingBackend:
    if name == "stub":
        return StubBackend(model)
    if name == "clip":
        return ClipBackend(model)
    raise BackendError(f"unknown backend {name!r} (expected 'stub' or 'clip')")
