"""Transition-score matrices: built-in syntax tables, style learning, MSE.

A :class:`TransitionMatrix` holds a square score (or probability) matrix
over one label alphabet; entry ``[i][j]`` scores the transition from label
``i`` to label ``j`` between consecutive shots.

Style learning counts consecutive label pairs in a reference sequence and
normalizes the count matrix by the total number of observed transitions,
yielding a probability matrix whose entries sum to one. Pairs with an
absent label on either side carry no evidence and are skipped.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .catalog import MOTION_ALPHABET, SIZE_ALPHABET, LabelSequence
from .errors import AlphabetMismatchError, MalformedJsonError, NoTransitionsError


@dataclass(frozen=True, eq=False)
class TransitionMatrix:
    alphabet: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        a = len(self.alphabet)
        if values.shape != (a, a):
            raise ValueError(f"matrix shape {values.shape} does not match alphabet size {a}")
        if not np.all(np.isfinite(values)):
            raise ValueError("matrix entries must be finite")
        values = values.copy()
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    def __getitem__(self, pair) -> float:
        i, j = pair
        return float(self.values[int(i), int(j)])


# Shot-size transition scores, rows = previous shot, columns = next shot,
# in ELS, LS, MS, CU, ECU order.
_SIZE_SCORES = np.array(
    [
        [0.0, 0.5, 1.0, 0.0, 0.0],
        [0.5, 0.6, 1.0, 1.0, 0.0],
        [1.0, 1.0, 1.0, 1.0, 1.0],
        [0.0, 0.6, 0.8, 0.6, 1.0],
        [0.0, 0.0, 0.3, 1.0, 0.0],
    ]
)

# Camera-motion transition scores in STABLE, UP, DOWN, LEFT, RIGHT, OUT, IN order.
_MOTION_SCORES = np.array(
    [
        [1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0],
        [1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 1.0],
        [1.0, 0.0, 1.0, 0.0, 0.0, 1.0, 1.0],
        [1.0, 0.0, 0.0, 1.0, 0.0, 1.0, 1.0],
        [1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0],
        [1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0],
        [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0],
    ]
)


def builtin_shot_size_matrix() -> TransitionMatrix:
    """The built-in 5x5 shot-size syntax score table."""
    return TransitionMatrix(alphabet=SIZE_ALPHABET, values=_SIZE_SCORES)


def builtin_motion_matrix() -> TransitionMatrix:
    """The built-in 7x7 camera-motion syntax score table."""
    return TransitionMatrix(alphabet=MOTION_ALPHABET, values=_MOTION_SCORES)


def _labels_for(ref: LabelSequence, alphabet: str):
    if alphabet == "size":
        return ref.sizes(), SIZE_ALPHABET
    if alphabet == "motion":
        return ref.motions(), MOTION_ALPHABET
    raise ValueError(f"alphabet must be 'size' or 'motion', got {alphabet!r}")


def transition_counts(ref: LabelSequence, alphabet: str) -> np.ndarray:
    """Count consecutive label transitions; pairs with an absent label skip."""
    labels, names = _labels_for(ref, alphabet)
    counts = np.zeros((len(names), len(names)), dtype=np.float64)
    for prev, nxt in zip(labels[:-1], labels[1:]):
        if prev is None or nxt is None:
            continue
        counts[int(prev), int(nxt)] += 1.0
    return counts


def learn_transition_matrix(ref: LabelSequence, alphabet: str) -> TransitionMatrix:
    """Estimate a transition probability matrix from a reference sequence.

    The count matrix is normalized by the total number of observed
    transitions, so the entries of the result sum to one.
    """
    _, names = _labels_for(ref, alphabet)
    counts = transition_counts(ref, alphabet)
    total = counts.sum()
    if total == 0:
        raise NoTransitionsError(f"reference yields no {alphabet} transitions")
    return TransitionMatrix(alphabet=names, values=counts / total)


def sequence_style_matrix(seq_labels: LabelSequence, alphabet: str) -> TransitionMatrix:
    """Style matrix of an assembled output's labels (same estimator as
    :func:`learn_transition_matrix`; separate entry point for the objective
    style metric)."""
    return learn_transition_matrix(seq_labels, alphabet)


def matrix_mse(a: TransitionMatrix, b: TransitionMatrix) -> float:
    """Mean squared difference over all entries of two same-alphabet matrices."""
    if a.alphabet != b.alphabet:
        raise AlphabetMismatchError(f"alphabets differ: {a.alphabet} vs {b.alphabet}")
    diff = a.values - b.values
    return float(np.mean(diff * diff))


def matrix_to_json(matrix: TransitionMatrix) -> str:
    return json.dumps({"alphabet": list(matrix.alphabet), "rows": matrix.values.tolist()}, indent=2) + "\n"


def matrix_from_json(data: bytes | str) -> TransitionMatrix:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise MalformedJsonError(f"matrix file is not valid JSON: {exc}") from None
    if not isinstance(doc, dict) or "alphabet" not in doc or "rows" not in doc:
        raise MalformedJsonError('matrix JSON needs "alphabet" and "rows"')
    alphabet = tuple(doc["alphabet"])
    try:
        values = np.asarray(doc["rows"], dtype=np.float64)
    except (TypeError, ValueError):
        raise MalformedJsonError("matrix rows must be numeric") from None
    try:
        return TransitionMatrix(alphabet=alphabet, values=values)
    except ValueError as exc:
        raise MalformedJsonError(str(exc)) from None


def load_matrix(path) -> TransitionMatrix:
    with open(path, "rb") as fh:
        return matrix_from_json(fh.read())


def matrix_to_csv(matrix: TransitionMatrix) -> str:
    """CSV with a header row, suitable for heatmap plotting."""
    lines = ["label," + ",".join(matrix.alphabet)]
    for name, row in zip(matrix.alphabet, matrix.values):
        lines.append(name + "," + ",".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"
