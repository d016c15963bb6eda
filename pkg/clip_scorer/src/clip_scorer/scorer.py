"""Frame enumeration, caption handling, and score emission."""

from __future__ import annotations

import json
import os
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import IO, Dict, Iterator, List, Optional, Tuple

import numpy as np
from PIL import Image

from .backends import EmbeddingBackend

PROP_NAME = re.compile(r"^[a-z][a-z0-9_]*$")
IMAGE_EXTENSIONS = (".png", ".jpg", ".jpeg", ".bmp", ".gif", ".tif", ".tiff",
                    ".webp")


class ScorerError(Exception):
    pass


def load_captions(path: str) -> Dict[str, str]:
    """CaptionMap file: a flat JSON object, predicate name -> caption."""
    try:
        with open(path, encoding="utf-8") as handle:
            doc = json.load(handle)
    except (OSError, json.JSONDecodeError) as exc:
        raise ScorerError(f"cannot read captions file {path}: {exc}") from exc
    if not isinstance(doc, dict) or not doc:
        raise ScorerError("captions file must be a nonempty JSON object")
    for name, caption in doc.items():
        if not PROP_NAME.match(str(name)):
            raise ScorerError(f"invalid predicate name {name!r}")
        if not isinstance(caption, str) or not caption.strip():
            raise ScorerError(f"caption for {name!r} must be nonempty text")
    return {str(k): str(v) for k, v in doc.items()}


def iter_frames(path: str, stride: int = 1) -> Iterator[Tuple[int, Optional[Image.Image], str]]:
    """Yield (media_index, image_or_None, source_label) at the given stride.

    A frame that cannot be decoded yields image=None so the caller can warn
    and skip. Directories enumerate image files in name order; anything else
    is treated as a video and decoded with OpenCV.
    """
    if stride < 1:
        raise ScorerError(f"stride must be >= 1, got {stride}")
    if os.path.isdir(path):
        names = sorted(
            n for n in os.listdir(path)
            if n.lower().endswith(IMAGE_EXTENSIONS))
        if not names:
            raise ScorerError(f"no image files in directory {path}")
        for index, name in enumerate(names):
            if index % stride:
                continue
            full = os.path.join(path, name)
            try:
                with Image.open(full) as img:
                    yield index, img.convert("RGB"), name
            except Exception:
                yield index, None, name
    elif os.path.isfile(path):
        yield from _iter_video(path, stride)
    else:
        raise ScorerError(f"input {path} is not a directory or file")


def _iter_video(path: str, stride: int) -> Iterator[Tuple[int, Optional[Image.Image], str]]:
    try:
        import cv2
    except ImportError as exc:
        raise ScorerError(
            "video input needs opencv-python; pass an image directory "
            "instead") from exc
    capture = cv2.VideoCapture(path)
    if not capture.isOpened():
        raise ScorerError(f"cannot open video {path}")
    index = 0
    try:
        while True:
            ok, frame = capture.read()
            if not ok:
                break
            if index % stride == 0:
                image = Image.fromarray(cv2.cvtColor(frame, cv2.COLOR_BGR2RGB))
                yield index, image, f"frame@{index}"
            index += 1
    finally:
        capture.release()
    if index == 0:
        raise ScorerError(f"video {path} contains no frames")


@dataclass
class ScoreRecord:
    frame: int
    pred: str
    score: float

    def as_json(self) -> str:
        return json.dumps({"frame": self.frame, "pred": self.pred,
                           "score": self.score})


def score_frames(input_path: str, captions: Dict[str, str],
                 backend: EmbeddingBackend, stride: int = 1,
                 workers: int = 1,
                 warn: IO[str] = sys.stderr) -> List[ScoreRecord]:
    """Cosine similarity of every sampled frame against every caption.

    Output frames are renumbered 0..n-1 in media order (so the stream is
    directly consumable by a monitor), regardless of stride or skipped
    frames. Unreadable frames are skipped with a warning on `warn`.
    """
    names = sorted(captions)
    text_matrix = np.asarray(backend.embed_texts([captions[n] for n in names]))

    loaded: List[Tuple[int, Image.Image]] = []
    for media_index, image, label in iter_frames(input_path, stride):
        if image is None:
            warn.write(json.dumps({
                "warning": "unreadable frame skipped",
                "source": label, "media_index": media_index}) + "\n")
            continue
        loaded.append((media_index, image))
    if not loaded:
        raise ScorerError("no readable frames in input")

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            embeddings = list(pool.map(
                lambda item: backend.embed_image(item[1]), loaded))
    else:
        embeddings = [backend.embed_image(image) for _, image in loaded]

    records: List[ScoreRecord] = []
    for out_index, vector in enumerate(embeddings):
        sims = text_matrix @ np.asarray(vector)
        for name, sim in zip(names, sims):
            score = float(np.clip(sim, -1.0, 1.0))
            records.append(ScoreRecord(out_index, name, score))
    return records


def write_records(records: List[ScoreRecord], out: IO[str]) -> None:
    for record in records:
        out.write(record.as_json() + "\n")
