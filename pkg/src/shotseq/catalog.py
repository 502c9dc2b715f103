"""Shot catalog ingestion and validation.

The catalog is the immutable input to every optimization run: a list of
shots with optional shot-size / camera-motion labels and optional unit
semantic embeddings, plus an optional script embedding. Reference label
sequences (used for style learning) are parsed here too.

Catalog JSON schema::

    {"shots": [{"id": str, "shot_size": str?, "motion": str?,
                "description": str?, "embedding": [num]?, "duration_s": num?}],
     "script": {"text": str?, "embedding": [num]?}}

Reference files are either a JSON array of label strings / objects
(``{"shot_size": ..., "motion": ...}``) or plain text lines ``SIZE,MOTION``.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DuplicateShotIdError,
    EmbeddingDimMismatchError,
    EmptySequenceError,
    KExceedsNError,
    MalformedJsonError,
    MissingEmbeddingsError,
    NegativeDurationError,
    UnknownLabelError,
)


class ShotSize(enum.IntEnum):
    """Framing categories, indexed in score-matrix row/column order."""

    ELS = 0
    LS = 1
    MS = 2
    CU = 3
    ECU = 4


class MotionType(enum.IntEnum):
    """Dominant camera motion categories, indexed in score-matrix order."""

    STABLE = 0
    UP = 1
    DOWN = 2
    LEFT = 3
    RIGHT = 4
    OUT = 5
    IN = 6


SIZE_ALPHABET = tuple(m.name for m in ShotSize)
MOTION_ALPHABET = tuple(m.name for m in MotionType)

_UNIT_NORM_TOL = 1e-9


def parse_shot_size(label: str) -> ShotSize:
    try:
        return ShotSize[label]
    except KeyError:
        raise UnknownLabelError(f"unknown shot-size label {label!r}") from None


def parse_motion(label: str) -> MotionType:
    try:
        return MotionType[label]
    except KeyError:
        raise UnknownLabelError(f"unknown motion label {label!r}") from None


def _as_unit_embedding(values, context: str) -> np.ndarray:
    try:
        vec = np.asarray(values, dtype=np.float64)
    except (TypeError, ValueError):
        raise MalformedJsonError(f"{context}: embedding must be a list of numbers") from None
    if vec.ndim != 1 or vec.size == 0 or not np.all(np.isfinite(vec)):
        raise MalformedJsonError(f"{context}: embedding must be a non-empty finite vector")
    norm = float(np.linalg.norm(vec))
    if norm < 1e-12:
        raise MalformedJsonError(f"{context}: embedding has zero norm")
    vec = vec / norm
    vec.flags.writeable = False
    return vec


@dataclass(frozen=True, eq=False)
class Shot:
    """One catalog entry. Labels and embedding are optional; absent labels
    are legal and simply earn no syntax score downstream."""

    id: str
    shot_size: ShotSize | None = None
    motion: MotionType | None = None
    description: str | None = None
    embedding: np.ndarray | None = None
    duration_s: float | None = None


@dataclass(frozen=True, eq=False)
class ShotCatalog:
    """Immutable, index-addressable shot collection."""

    shots: tuple[Shot, ...]
    script_embedding: np.ndarray | None = None
    script_text: str | None = None
    index_of: dict[str, int] = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "index_of", {s.id: i for i, s in enumerate(self.shots)})

    def __len__(self) -> int:
        return len(self.shots)

    @property
    def embedding_dim(self) -> int | None:
        for shot in self.shots:
            if shot.embedding is not None:
                return shot.embedding.shape[0]
        if self.script_embedding is not None:
            return self.script_embedding.shape[0]
        return None

    def to_dict(self) -> dict:
        shots = []
        for s in self.shots:
            entry: dict = {"id": s.id}
            if s.shot_size is not None:
                entry["shot_size"] = s.shot_size.name
            if s.motion is not None:
                entry["motion"] = s.motion.name
            if s.description is not None:
                entry["description"] = s.description
            if s.embedding is not None:
                entry["embedding"] = s.embedding.tolist()
            if s.duration_s is not None:
                entry["duration_s"] = s.duration_s
            shots.append(entry)
        out: dict = {"shots": shots}
        script: dict = {}
        if self.script_text is not None:
            script["text"] = self.script_text
        if self.script_embedding is not None:
            script["embedding"] = self.script_embedding.tolist()
        if script:
            out["script"] = script
        return out


@dataclass(frozen=True)
class LabelSequence:
    """Ordered (shot_size, motion) label pairs, either side optional."""

    entries: tuple[tuple[ShotSize | None, MotionType | None], ...]

    def __len__(self) -> int:
        return len(self.entries)

    def sizes(self) -> tuple[ShotSize | None, ...]:
        return tuple(e[0] for e in self.entries)

    def motions(self) -> tuple[MotionType | None, ...]:
        return tuple(e[1] for e in self.entries)


def _decode_json(data: bytes | str):
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedJsonError(f"input is not UTF-8: {exc}") from None
    try:
        return json.loads(data)
    except json.JSONDecodeError as exc:
        raise MalformedJsonError(f"input is not valid JSON: {exc}") from None


def _parse_shot(entry, position: int) -> Shot:
    if not isinstance(entry, dict):
        raise MalformedJsonError(f"shots[{position}] must be an object")
    shot_id = entry.get("id")
    if not isinstance(shot_id, str) or not shot_id:
        raise MalformedJsonError(f"shots[{position}] needs a non-empty string id")
    context = f"shot {shot_id!r}"

    size = entry.get("shot_size")
    motion = entry.get("motion")
    if size is not None and not isinstance(size, str):
        raise MalformedJsonError(f"{context}: shot_size must be a string")
    if motion is not None and not isinstance(motion, str):
        raise MalformedJsonError(f"{context}: motion must be a string")

    description = entry.get("description")
    if description is not None and not isinstance(description, str):
        raise MalformedJsonError(f"{context}: description must be a string")

    duration = entry.get("duration_s")
    if duration is not None:
        if not isinstance(duration, (int, float)) or isinstance(duration, bool):
            raise MalformedJsonError(f"{context}: duration_s must be a number")
        duration = float(duration)
        if not np.isfinite(duration):
            raise MalformedJsonError(f"{context}: duration_s must be finite")
        if duration < 0:
            raise NegativeDurationError(f"{context}: duration_s is negative")

    embedding = entry.get("embedding")
    if embedding is not None:
        embedding = _as_unit_embedding(embedding, context)

    return Shot(
        id=shot_id,
        shot_size=parse_shot_size(size) if size is not None else None,
        motion=parse_motion(motion) if motion is not None else None,
        description=description,
        embedding=embedding,
        duration_s=duration,
    )


def parse_catalog(data: bytes | str) -> ShotCatalog:
    """Parse and validate catalog JSON.

    Embeddings are L2-normalized here, once, so every downstream cosine
    reduces to a dot product.
    """
    doc = _decode_json(data)
    if not isinstance(doc, dict) or not isinstance(doc.get("shots"), list):
        raise MalformedJsonError('catalog JSON must be an object with a "shots" array')
    raw_shots = doc["shots"]
    if not raw_shots:
        raise MalformedJsonError("catalog needs at least one shot")

    shots = []
    seen: set[str] = set()
    for pos, entry in enumerate(raw_shots):
        shot = _parse_shot(entry, pos)
        if shot.id in seen:
            raise DuplicateShotIdError(f"duplicate shot id {shot.id!r}")
        seen.add(shot.id)
        shots.append(shot)

    script_text = None
    script_embedding = None
    script = doc.get("script")
    if script is not None:
        if not isinstance(script, dict):
            raise MalformedJsonError('"script" must be an object')
        script_text = script.get("text")
        if script_text is not None and not isinstance(script_text, str):
            raise MalformedJsonError("script text must be a string")
        if script.get("embedding") is not None:
            script_embedding = _as_unit_embedding(script["embedding"], "script")

    dims = {s.embedding.shape[0] for s in shots if s.embedding is not None}
    if script_embedding is not None:
        dims.add(script_embedding.shape[0])
    if len(dims) > 1:
        raise EmbeddingDimMismatchError(f"embeddings have mixed dimensions {sorted(dims)}")

    return ShotCatalog(shots=tuple(shots), script_embedding=script_embedding, script_text=script_text)


def load_catalog(path) -> ShotCatalog:
    with open(path, "rb") as fh:
        return parse_catalog(fh.read())


def serialize_catalog(catalog: ShotCatalog) -> str:
    return json.dumps(catalog.to_dict(), indent=2) + "\n"


def _classify_label(token: str) -> tuple[ShotSize | None, MotionType | None]:
    if token in ShotSize.__members__:
        return ShotSize[token], None
    if token in MotionType.__members__:
        return None, MotionType[token]
    raise UnknownLabelError(f"unknown label {token!r}")


def _entry_from_object(obj) -> tuple[ShotSize | None, MotionType | None]:
    if isinstance(obj, str):
        return _classify_label(obj)
    if isinstance(obj, dict):
        size = obj.get("shot_size")
        motion = obj.get("motion")
        return (
            parse_shot_size(size) if size is not None else None,
            parse_motion(motion) if motion is not None else None,
        )
    raise MalformedJsonError(f"reference entries must be strings or objects, got {type(obj).__name__}")


def _entry_from_line(line: str) -> tuple[ShotSize | None, MotionType | None]:
    fields = [f.strip() for f in line.split(",")]
    if len(fields) == 1:
        return _classify_label(fields[0])
    if len(fields) == 2:
        size, motion = fields
        return (
            parse_shot_size(size) if size else None,
            parse_motion(motion) if motion else None,
        )
    raise UnknownLabelError(f"reference line has too many fields: {line!r}")


def parse_reference(data: bytes | str) -> LabelSequence:
    """Parse a reference label sequence (JSON array or SIZE,MOTION lines)."""
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedJsonError(f"input is not UTF-8: {exc}") from None
    text = data.strip()
    if not text:
        raise EmptySequenceError("reference contains no entries")

    entries: list[tuple[ShotSize | None, MotionType | None]] = []
    if text[0] in "[{":
        doc = _decode_json(text)
        if not isinstance(doc, list):
            raise MalformedJsonError("reference JSON must be an array")
        entries = [_entry_from_object(obj) for obj in doc]
    else:
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            entries.append(_entry_from_line(line))

    if not entries:
        raise EmptySequenceError("reference contains no entries")
    return LabelSequence(entries=tuple(entries))


def load_reference(path) -> LabelSequence:
    with open(path, "rb") as fh:
        return parse_reference(fh.read())


def validate_instance(catalog: ShotCatalog, k: int, spec) -> None:
    """Check that selecting/ordering k shots from the catalog is feasible.

    A positive semantic weight requires the script embedding and an
    embedding on every shot; missing syntax labels are always legal.
    """
    if k < 1:
        raise ValueError("k must be a positive integer")
    if k > len(catalog):
        raise KExceedsNError(f"cannot select k={k} from {len(catalog)} shots")
    if spec.gamma > 0:
        if spec.script_embedding is None:
            raise MissingEmbeddingsError("semantic weight > 0 requires a script embedding")
        missing = [s.id for s in catalog.shots if s.embedding is None]
        if missing:
            raise MissingEmbeddingsError(f"semantic weight > 0 but shots lack embeddings: {missing}")
        dim = spec.script_embedding.shape[0]
        bad = [s.id for s in catalog.shots if s.embedding.shape[0] != dim]
        if bad:
            raise EmbeddingDimMismatchError(f"shot embeddings do not match script dimension: {bad}")
