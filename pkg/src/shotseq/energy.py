"""Energy evaluation for candidate shot sequences.

A sequence of K distinct shots is scored by three components:

* shot-size syntax: sum of size-matrix scores over consecutive pairs,
* motion syntax: same with the motion matrix,
* semantic alignment: cosine between the (normalized) mean embedding of
  the selected shots and the script embedding.

Energies are negated scores (lower is better); the joint energy is the
weighted sum ``alpha * e_size + beta * e_motion + gamma * e_semantic``.
Transitions where either shot lacks the relevant label score 0, so
unlabeled shots stay selectable but are never syntax-rewarded.

The bilinear matrix form works on an N x K selection matrix (binary or
relaxed) and agrees exactly with the sequence form on binary encodings;
its analytic gradient drives the continuous relaxation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .catalog import LabelSequence, MOTION_ALPHABET, SIZE_ALPHABET, ShotCatalog
from .errors import (
    MissingEmbeddingsError,
    ShapeMismatchError,
    UnknownShotIdError,
    ZeroVectorError,
)
from .syntax import TransitionMatrix

_ZERO_NORM = 1e-12


@dataclass(frozen=True)
class Sequence:
    """An ordered selection of distinct shot ids."""

    shot_ids: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "shot_ids", tuple(self.shot_ids))
        if not self.shot_ids:
            raise ValueError("a sequence needs at least one shot")
        if len(set(self.shot_ids)) != len(self.shot_ids):
            raise ValueError(f"sequence repeats shot ids: {self.shot_ids}")

    def __len__(self) -> int:
        return len(self.shot_ids)


@dataclass(frozen=True, eq=False)
class EnergySpec:
    """Weights plus the matrices/embedding that define the joint energy."""

    alpha: float = 1.0
    beta: float = 0.0
    gamma: float = 0.0
    size_matrix: TransitionMatrix | None = None
    motion_matrix: TransitionMatrix | None = None
    script_embedding: np.ndarray | None = None

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma"):
            value = getattr(self, name)
            if not np.isfinite(value) or value < 0:
                raise ValueError(f"{name} must be a finite nonnegative weight")
        if self.alpha + self.beta + self.gamma <= 0:
            raise ValueError("at least one energy weight must be positive")
        if self.alpha > 0 and self.size_matrix is None:
            raise ValueError("alpha > 0 requires a size matrix")
        if self.beta > 0 and self.motion_matrix is None:
            raise ValueError("beta > 0 requires a motion matrix")
        if self.size_matrix is not None and self.size_matrix.alphabet != SIZE_ALPHABET:
            raise ValueError("size matrix must use the shot-size alphabet")
        if self.motion_matrix is not None and self.motion_matrix.alphabet != MOTION_ALPHABET:
            raise ValueError("motion matrix must use the motion alphabet")
        if self.gamma > 0 and self.script_embedding is None:
            raise ValueError("gamma > 0 requires a script embedding")
        if self.script_embedding is not None:
            vec = np.asarray(self.script_embedding, dtype=np.float64)
            if vec.ndim != 1 or abs(float(np.linalg.norm(vec)) - 1.0) > 1e-6:
                raise ValueError("script embedding must be a unit vector")
            vec = vec.copy()
            vec.flags.writeable = False
            object.__setattr__(self, "script_embedding", vec)


@dataclass(frozen=True)
class JointEnergy:
    total: float
    e_g: float
    e_m: float
    e_se: float


@dataclass(frozen=True, eq=False)
class SelectionMatrix:
    """N x K shot-to-position assignment, binary or continuously relaxed.

    The constructor checks only the entry domain; a hardened relaxation can
    legitimately violate the one-selection-per-shot constraint, which
    :meth:`satisfies_constraints` detects.
    """

    values: np.ndarray
    mode: str = "binary"

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2:
            raise ShapeMismatchError("selection matrix must be 2-D")
        if self.mode == "binary":
            if not np.all((values == 0.0) | (values == 1.0)):
                raise ValueError("binary selection entries must be 0 or 1")
        elif self.mode == "continuous":
            if not np.all(np.isfinite(values)) or values.min() < -1e-9 or values.max() > 1 + 1e-9:
                raise ValueError("continuous selection entries must lie in [0, 1]")
        else:
            raise ValueError(f"unknown selection mode {self.mode!r}")
        values = values.copy()
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def satisfies_constraints(self, tol: float = 1e-6) -> bool:
        """Each position selects exactly one shot; each shot at most once."""
        cols_ok = bool(np.all(np.abs(self.values.sum(axis=0) - 1.0) <= tol))
        rows_ok = bool(np.all(self.values.sum(axis=1) <= 1.0 + tol))
        return cols_ok and rows_ok


def resolve_sequence(seq: Sequence, catalog: ShotCatalog) -> np.ndarray:
    """Map shot ids to catalog indices."""
    try:
        return np.array([catalog.index_of[sid] for sid in seq.shot_ids], dtype=np.intp)
    except KeyError as exc:
        raise UnknownShotIdError(f"unknown shot id {exc.args[0]!r}") from None


def sequence_labels(seq: Sequence, catalog: ShotCatalog) -> LabelSequence:
    """The (size, motion) label pairs of a sequence, in order."""
    idx = resolve_sequence(seq, catalog)
    return LabelSequence(
        entries=tuple((catalog.shots[i].shot_size, catalog.shots[i].motion) for i in idx)
    )


def _transition_sum(indices: np.ndarray, catalog: ShotCatalog, matrix: TransitionMatrix, attr: str) -> float:
    total = 0.0
    for a, b in zip(indices[:-1], indices[1:]):
        la = getattr(catalog.shots[a], attr)
        lb = getattr(catalog.shots[b], attr)
        if la is None or lb is None:
            continue
        total += float(matrix.values[int(la), int(lb)])
    return total


def shot_size_score(seq: Sequence, catalog: ShotCatalog, g: TransitionMatrix) -> float:
    """Total shot-size syntax score over consecutive pairs."""
    return _transition_sum(resolve_sequence(seq, catalog), catalog, g, "shot_size")


def shot_size_energy(seq: Sequence, catalog: ShotCatalog, g: TransitionMatrix) -> float:
    return -shot_size_score(seq, catalog, g)


def motion_score(seq: Sequence, catalog: ShotCatalog, m: TransitionMatrix) -> float:
    return _transition_sum(resolve_sequence(seq, catalog), catalog, m, "motion")


def motion_energy(seq: Sequence, catalog: ShotCatalog, m: TransitionMatrix) -> float:
    return -motion_score(seq, catalog, m)


def semantic_cosine(seq: Sequence, catalog: ShotCatalog, script_embedding: np.ndarray) -> float:
    """Cosine between the normalized mean embedding of the selected shots
    and the script embedding."""
    idx = resolve_sequence(seq, catalog)
    embeddings = []
    for i in idx:
        emb = catalog.shots[i].embedding
        if emb is None:
            raise MissingEmbeddingsError(f"shot {catalog.shots[i].id!r} has no embedding")
        embeddings.append(emb)
    script = np.asarray(script_embedding, dtype=np.float64)
    if script.ndim != 1 or any(e.shape != script.shape for e in embeddings):
        raise ShapeMismatchError("shot embeddings and script embedding must share one dimension")
    mean = np.mean(embeddings, axis=0)
    norm = float(np.linalg.norm(mean))
    if norm < _ZERO_NORM:
        raise ZeroVectorError("mean shot embedding has zero norm")
    return float(np.dot(mean / norm, script))


def semantic_energy(seq: Sequence, catalog: ShotCatalog, script_embedding: np.ndarray) -> float:
    return -semantic_cosine(seq, catalog, script_embedding)


def joint_energy(seq: Sequence, catalog: ShotCatalog, spec: EnergySpec) -> JointEnergy:
    """Weighted joint energy; zero-weight components are reported as 0 and
    not computed."""
    e_g = shot_size_energy(seq, catalog, spec.size_matrix) if spec.alpha > 0 else 0.0
    e_m = motion_energy(seq, catalog, spec.motion_matrix) if spec.beta > 0 else 0.0
    e_se = semantic_energy(seq, catalog, spec.script_embedding) if spec.gamma > 0 else 0.0
    total = spec.alpha * e_g + spec.beta * e_m + spec.gamma * e_se
    return JointEnergy(total=total, e_g=e_g, e_m=e_m, e_se=e_se)


def _label_pair_scores(catalog: ShotCatalog, matrix: TransitionMatrix, attr: str) -> np.ndarray:
    """Shot-indexed N x N score lookup; rows/columns of unlabeled shots are 0."""
    n = len(catalog)
    idx = np.array(
        [int(getattr(s, attr)) if getattr(s, attr) is not None else -1 for s in catalog.shots],
        dtype=np.intp,
    )
    labeled = idx >= 0
    scores = np.zeros((n, n), dtype=np.float64)
    if labeled.any():
        sub = matrix.values[np.ix_(idx[labeled], idx[labeled])]
        scores[np.ix_(labeled, labeled)] = sub
    return scores


def shot_pair_scores(catalog: ShotCatalog, spec: EnergySpec) -> np.ndarray:
    """Weighted shot-to-shot transition scores ``alpha*G' + beta*M'``."""
    w = np.zeros((len(catalog), len(catalog)), dtype=np.float64)
    if spec.alpha > 0 and spec.size_matrix is not None:
        w += spec.alpha * _label_pair_scores(catalog, spec.size_matrix, "shot_size")
    if spec.beta > 0 and spec.motion_matrix is not None:
        w += spec.beta * _label_pair_scores(catalog, spec.motion_matrix, "motion")
    return w


def encode_sequence(seq: Sequence, catalog: ShotCatalog) -> SelectionMatrix:
    """Binary N x K selection matrix for a sequence."""
    idx = resolve_sequence(seq, catalog)
    x = np.zeros((len(catalog), len(idx)), dtype=np.float64)
    x[idx, np.arange(len(idx))] = 1.0
    return SelectionMatrix(values=x, mode="binary")


def _check_shape(x: SelectionMatrix, catalog: ShotCatalog) -> np.ndarray:
    values = x.values
    if values.shape[0] != len(catalog) or values.shape[1] < 1:
        raise ShapeMismatchError(
            f"selection matrix shape {values.shape} does not fit catalog of {len(catalog)} shots"
        )
    return values


def matrix_energy(x: SelectionMatrix, catalog: ShotCatalog, spec: EnergySpec) -> float:
    """Bilinear syntax energy of a (possibly relaxed) selection matrix."""
    values = _check_shape(x, catalog)
    w = shot_pair_scores(catalog, spec)
    return float(-np.einsum("ik,jk,ij->", values[:, :-1], values[:, 1:], w))


def matrix_energy_gradient(x: SelectionMatrix, catalog: ShotCatalog, spec: EnergySpec) -> np.ndarray:
    """Analytic gradient of :func:`matrix_energy` with respect to the entries."""
    values = _check_shape(x, catalog)
    w = shot_pair_scores(catalog, spec)
    grad = np.zeros_like(values)
    grad[:, :-1] -= w @ values[:, 1:]
    grad[:, 1:] -= w.T @ values[:, :-1]
    return grad


class EnergyModel:
    """Vectorized joint-energy evaluator over shot-index rows.

    Precomputes the weighted shot-pair score matrix once per instance so
    optimizers can score whole candidate batches with fancy indexing.
    """

    def __init__(self, catalog: ShotCatalog, spec: EnergySpec):
        self.catalog = catalog
        self.spec = spec
        self.n = len(catalog)
        self.pair = shot_pair_scores(catalog, spec)
        self.size_pair = (
            _label_pair_scores(catalog, spec.size_matrix, "shot_size")
            if spec.size_matrix is not None
            else None
        )
        self.motion_pair = (
            _label_pair_scores(catalog, spec.motion_matrix, "motion")
            if spec.motion_matrix is not None
            else None
        )
        self.gamma = spec.gamma
        self.script = spec.script_embedding
        self.embeddings = None
        if self.script is not None and all(s.embedding is not None for s in catalog.shots):
            self.embeddings = np.stack([s.embedding for s in catalog.shots])

    def energies(self, rows: np.ndarray) -> np.ndarray:
        """Joint energies of a (R, K) batch of index rows."""
        rows = np.atleast_2d(rows)
        e = -self.pair[rows[:, :-1], rows[:, 1:]].sum(axis=1)
        if self.gamma > 0:
            e = e - self.gamma * self._cosines(rows)
        return e

    def energy(self, row: np.ndarray) -> float:
        return float(self.energies(np.asarray(row, dtype=np.intp)[None, :])[0])

    def _cosines(self, rows: np.ndarray) -> np.ndarray:
        if self.embeddings is None:
            raise MissingEmbeddingsError("semantic term requires embeddings on every shot")
        means = self.embeddings[rows].mean(axis=1)
        norms = np.linalg.norm(means, axis=1)
        if np.any(norms < _ZERO_NORM):
            raise ZeroVectorError("mean shot embedding has zero norm")
        return (means / norms[:, None]) @ self.script

    def component_scores(self, row: np.ndarray) -> tuple[float, float, float]:
        """(size score, motion score, semantic cosine) of one index row.

        Components whose inputs are unavailable are reported as 0.
        """
        row = np.asarray(row, dtype=np.intp)
        size = (
            float(self.size_pair[row[:-1], row[1:]].sum()) if self.size_pair is not None else 0.0
        )
        motion = (
            float(self.motion_pair[row[:-1], row[1:]].sum())
            if self.motion_pair is not None
            else 0.0
        )
        cos = float(self._cosines(row[None, :])[0]) if self.embeddings is not None else 0.0
        return size, motion, cos

    def sequence(self, row: np.ndarray) -> Sequence:
        return Sequence(shot_ids=tuple(self.catalog.shots[int(i)].id for i in row))
