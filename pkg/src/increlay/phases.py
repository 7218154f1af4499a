"""Expected number of transmission phases under BSC-corrupted feedback.

A block starts with the source transmission (phase 1). After every phase the
destination broadcasts a truthful ACK/NACK which all transmitters observe
through one binary symmetric channel with reliability ``p``; an observed NACK
hands the next phase to the next relay. With ``K`` relays at most ``K + 1``
phases are spent on one source message.

Three independent routes give the mean phase count ``E(N)``:

* :func:`expected_phases_one_relay` -- the one-relay closed form,
* :func:`build_phase_tree` / :func:`expected_phases_tree` -- explicit
  enumeration of every positive/negative block path,
* :func:`expected_phases_matrix` -- a phase-count vector applied to the
  per-level terminated masses obtained from the feedback matrix.

:func:`expected_phases` is the O(K) tail-sum recurrence used elsewhere in the
package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Literal, Sequence

import numpy as np

from .errors import ConsistencyError, DomainError

__all__ = [
    "DecodeProfile",
    "PhaseLeaf",
    "PhaseNode",
    "PhaseTree",
    "MAX_TREE_RELAYS",
    "ROUTE_TOL",
    "check_probability",
    "feedback_matrix",
    "hadamard",
    "expected_phases_one_relay",
    "phase_derivative_sign",
    "build_phase_tree",
    "expected_phases_tree",
    "expected_phases_matrix",
    "expected_phases",
    "expected_phases_gradient",
    "worthless_feedback_phases",
]

# Explicit trees hold ~3 * 2**K leaves.
MAX_TREE_RELAYS = 30
ROUTE_TOL = 1e-12


def check_probability(value, name="probability") -> float:
    """Return ``value`` as a float, raising DomainError unless it lies in [0, 1]."""
    try:
        x = float(value)
    except (TypeError, ValueError):
        raise DomainError(f"{name} must be a number, got {value!r}") from None
    if not 0.0 <= x <= 1.0:  # also rejects NaN
        raise DomainError(f"{name} must lie in [0, 1], got {value!r}")
    return x


@dataclass(frozen=True)
class DecodeProfile:
    """Per-level decode success probabilities ``[P_SD, P_R1D, ..., P_R(K-1)D]``.

    Entry ``k`` is the probability that the destination can decode once the
    transmission of level ``k + 1`` (the source for ``k = 0``, relay ``k``
    otherwise) has been combined with everything received before it.

    Monte Carlo estimates also carry their standard errors, the number of
    samples behind each entry and a low-confidence flag for entries backed
    by too few samples.
    """

    levels: tuple[float, ...]
    stderr: tuple[float, ...] | None = None
    counts: tuple[int, ...] | None = None
    low_confidence: tuple[bool, ...] | None = None

    def __post_init__(self):
        levels = tuple(check_probability(q, f"levels[{i}]") for i, q in enumerate(self.levels))
        if not levels:
            raise DomainError("a decode profile needs at least the P_SD entry")
        object.__setattr__(self, "levels", levels)
        for name in ("stderr", "counts", "low_confidence"):
            value = getattr(self, name)
            if value is None:
                continue
            value = tuple(value)
            if len(value) != len(levels):
                raise DomainError(f"{name} must have one entry per level")
            object.__setattr__(self, name, value)
        if self.stderr is not None and any(s < 0.0 for s in self.stderr):
            raise DomainError("standard errors must be non-negative")

    @classmethod
    def from_source_outage(cls, p_bar_sd, relay_levels: Sequence[float] = ()) -> "DecodeProfile":
        """Build a profile from ``P̄_SD`` and the relay-level success probabilities."""
        p_bar_sd = check_probability(p_bar_sd, "p_bar_sd")
        return cls((1.0 - p_bar_sd, *relay_levels))

    @property
    def p_sd(self) -> float:
        return self.levels[0]

    @property
    def p_bar_sd(self) -> float:
        return 1.0 - self.levels[0]

    def __len__(self):
        return len(self.levels)

    def usable(self, num_relays: int) -> np.ndarray:
        """The entries consumed by a depth-``num_relays`` tree."""
        if len(self.levels) < num_relays:
            raise DomainError(
                f"profile has {len(self.levels)} level(s) but {num_relays} relay(s) need {num_relays}"
            )
        return np.asarray(self.levels[:num_relays], dtype=float)


def _levels(profile, num_relays: int) -> np.ndarray:
    if not isinstance(profile, DecodeProfile):
        if np.isscalar(profile):
            profile = (profile,)
        profile = DecodeProfile(tuple(profile))
    return profile.usable(num_relays)


def _check_relays(num_relays, minimum=1) -> int:
    if isinstance(num_relays, bool) or int(num_relays) != num_relays:
        raise DomainError(f"number of relays must be an integer, got {num_relays!r}")
    k = int(num_relays)
    if k < minimum:
        raise DomainError(f"number of relays must be >= {minimum}, got {k}")
    return k


def feedback_matrix(p) -> np.ndarray:
    """The BSC transition matrix ``[[p, 1-p], [1-p, p]]``.

    Rows and columns are ordered (ACK, NACK).
    """
    p = check_probability(p, "p")
    return np.array([[p, 1.0 - p], [1.0 - p, p]])


def hadamard(a, b) -> np.ndarray:
    """Elementwise (Hadamard) product of two equally shaped arrays."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise DomainError(f"Hadamard product needs equal shapes, got {a.shape} and {b.shape}")
    return a * b


def expected_phases_one_relay(p_bar_sd, p) -> float:
    """Closed-form ``E(N)`` for one relay.

    Parameters
    ----------
    p_bar_sd : float
        Probability that the direct source-to-destination phase fails.
    p : float
        Feedback reliability, ``Pr(ACK|ACK) = Pr(NACK|NACK)``.

    Returns
    -------
    float
        ``(2 p_bar_sd - 1) p + 2 - p_bar_sd``, always within [1, 2].
    """
    q = check_probability(p_bar_sd, "p_bar_sd")
    p = check_probability(p, "p")
    # Same polynomial, written as a blend of the p=1 and p=0 values so both
    # endpoints come out exactly.
    return p * (1.0 + q) + (1.0 - p) * (2.0 - q)


def phase_derivative_sign(p_bar_sd) -> Literal["decreasing", "flat", "increasing"]:
    """Direction in which the one-relay ``E(N)`` moves as ``p`` grows."""
    q = check_probability(p_bar_sd, "p_bar_sd")
    slope = 2.0 * q - 1.0
    if slope < 0:
        return "decreasing"
    if slope > 0:
        return "increasing"
    return "flat"


@dataclass(frozen=True)
class PhaseLeaf:
    """A terminated path of the phase tree."""

    path: tuple[str, ...]
    probability: float
    multiplier: int
    level: int
    kind: str


@dataclass
class PhaseNode:
    """One node of the phase tree.

    Blocks (``terminal_multiplier is None``) have two children: the
    terminating branch and the extending branch. The extending branch of a
    block below the last level is itself a node whose children are the
    positive and negative blocks of the next level.
    """

    kind: str
    level: int
    path_probability: float
    terminal_multiplier: int | None = None
    path: tuple[str, ...] = ()
    children: list["PhaseNode"] = field(default_factory=list)


def _symbol(level_index: int, positive: bool) -> str:
    name = "P_SD" if level_index == 0 else f"P_R{level_index}D"
    return name if positive else "~" + name


@dataclass(frozen=True, eq=False)
class PhaseTree:
    """Binary tree of positive/negative blocks with explicit path masses.

    Blocks at level ``l`` are stored in arrays of length ``2**l``; the binary
    digits of an index (most significant first) spell the block kinds along
    the path, 0 for positive and 1 for negative. Because the kind of a block
    fixes which feedback outcome extends it, an index identifies a path
    uniquely.

    Attributes
    ----------
    terminal_mass : tuple of ndarray
        ``terminal_mass[l - 1][i]`` is the probability of the path that ends
        in block ``i`` of level ``l`` with the terminating feedback outcome.
        Its phase count is ``l``.
    overflow_mass : ndarray
        Paths that extend out of the last level; phase count ``K + 1``.
    """

    num_relays: int
    p: float
    levels: np.ndarray
    block_mass: tuple[np.ndarray, ...]
    terminal_mass: tuple[np.ndarray, ...]
    overflow_mass: np.ndarray

    def total_probability(self) -> float:
        parts = [*self.terminal_mass, self.overflow_mass]
        return math.fsum(math.fsum(a.tolist()) for a in parts)

    def leaf_count(self) -> int:
        return sum(a.size for a in self.terminal_mass) + self.overflow_mass.size

    def _path(self, level: int, index: int) -> list[str]:
        symbols = []
        for j in range(level):
            positive = not (index >> (level - 1 - j)) & 1
            symbols.append(_symbol(j, positive))
            if j < level - 1:
                symbols.append("1-p" if positive else "p")
        return symbols

    def leaves(self) -> Iterator[PhaseLeaf]:
        """Yield every terminated path (intended for small trees)."""
        p_term = {True: "p", False: "1-p"}
        p_ext = {True: "1-p", False: "p"}
        k = self.num_relays
        for level in range(1, k + 1):
            for i, mass in enumerate(self.terminal_mass[level - 1].tolist()):
                positive = not i & 1
                path = (*self._path(level, i), p_term[positive])
                yield PhaseLeaf(path, mass, level, level, "positive" if positive else "negative")
        for i, mass in enumerate(self.overflow_mass.tolist()):
            positive = not i & 1
            path = (*self._path(k, i), p_ext[positive])
            yield PhaseLeaf(path, mass, k + 1, k, "positive" if positive else "negative")

    def roots(self) -> list[PhaseNode]:
        """Materialise the two level-1 blocks as linked :class:`PhaseNode` objects."""
        return [self._node(1, 0), self._node(1, 1)]

    def _node(self, level: int, index: int) -> PhaseNode:
        positive = not index & 1
        kind = "positive" if positive else "negative"
        path = tuple(self._path(level, index))
        block = PhaseNode(kind, level, float(self.block_mass[level - 1][index]), None, path)
        term = PhaseNode(
            kind, level, float(self.terminal_mass[level - 1][index]), level,
            path + ("p" if positive else "1-p",),
        )
        ext_path = path + ("1-p" if positive else "p",)
        ext_mass = block.path_probability - term.path_probability
        if level == self.num_relays:
            ext = PhaseNode(kind, level, float(self.overflow_mass[index]), level + 1, ext_path)
        else:
            ext = PhaseNode(kind, level, ext_mass, None, ext_path)
            ext.children = [self._node(level + 1, 2 * index), self._node(level + 1, 2 * index + 1)]
        block.children = [term, ext]
        return block


def build_phase_tree(profile, p, num_relays) -> PhaseTree:
    """Enumerate every block path of a depth-``num_relays`` tree.

    Level ``l`` splits each incoming path into a positive block (mass
    ``q[l-1]``) and a negative block (mass ``1 - q[l-1]``). A positive block
    terminates with ``p`` (ACK read correctly) and extends with ``1 - p``; a
    negative block terminates with ``1 - p`` (NACK misread) and extends with
    ``p``. Extensions out of the last level terminate with ``K + 1`` phases.
    """
    k = _check_relays(num_relays)
    if k > MAX_TREE_RELAYS:
        raise DomainError(f"explicit trees are limited to {MAX_TREE_RELAYS} relays")
    p = check_probability(p, "p")
    q = _levels(profile, k)
    terminate = np.array([p, 1.0 - p])
    extend = np.array([1.0 - p, p])

    incoming = np.ones(1)
    blocks, terminal = [], []
    for level in range(k):
        block = np.kron(incoming, np.array([q[level], 1.0 - q[level]]))
        halves = block.reshape(-1, 2)
        blocks.append(block)
        terminal.append((halves * terminate).ravel())
        incoming = (halves * extend).ravel()
    return PhaseTree(k, p, q, tuple(blocks), tuple(terminal), incoming)


def expected_phases_tree(tree: PhaseTree) -> float:
    """Sum of path probability times phase count over all leaves."""
    total = tree.total_probability()
    if abs(total - 1.0) > ROUTE_TOL:
        raise ConsistencyError(f"leaf probabilities sum to {total!r}, not 1")
    k = tree.num_relays
    terms = [level * math.fsum(m.tolist()) for level, m in enumerate(tree.terminal_mass, start=1)]
    terms.append((k + 1) * math.fsum(tree.overflow_mass.tolist()))
    value = math.fsum(terms)
    if not 1.0 - ROUTE_TOL <= value <= k + 1 + ROUTE_TOL:
        raise ConsistencyError(f"E(N) = {value!r} outside [1, {k + 1}]")
    return value


def expected_phases_matrix(profile, p, num_relays) -> float:
    """``E(N)`` as a phase-count vector times per-level terminated masses.

    With ``S`` the 2 x K matrix whose columns are ``[q_l, 1 - q_l]`` and ``P``
    the feedback matrix, the rows of ``P S`` hold the probability of
    terminating and of extending at each level given that the level was
    reached. The reach probabilities are the running products of the
    extension row, and the terminated mass of each level is their Hadamard
    product with the termination row. One relay reduces to ``[1, 2] P S``.
    """
    k = _check_relays(num_relays)
    P = feedback_matrix(p)
    q = _levels(profile, k)
    S = np.vstack([q, 1.0 - q])
    if k == 1:
        return float(np.array([1.0, 2.0]) @ P @ S[:, 0])
    T = P @ S
    reach = np.concatenate(([1.0], np.cumprod(T[1])))
    mass = hadamard(reach, np.concatenate((T[0], [1.0])))
    counts = np.arange(1, k + 2, dtype=float)
    return float(counts @ mass)


def expected_phases(profile, p, num_relays) -> float:
    """``E(N)`` by the tail-sum recurrence ``1 + sum_l Pr(level l extends)``.

    Zero relays means plain direct transmission, one phase.
    """
    k = _check_relays(num_relays, minimum=0)
    p = check_probability(p, "p")
    if k == 0:
        return 1.0
    value = reach = 1.0
    for q in _levels(profile, k):
        reach *= q * (1.0 - p) + (1.0 - q) * p
        value += reach
    return value


def expected_phases_gradient(profile, p, num_relays) -> np.ndarray:
    """Partial derivatives of ``E(N)`` with respect to each profile entry."""
    k = _check_relays(num_relays)
    p = check_probability(p, "p")
    q = _levels(profile, k)
    e = q * (1.0 - p) + (1.0 - q) * p
    grad = np.empty(k)
    for j in range(k):
        prefix = float(np.prod(e[:j]))
        tail = 1.0 + float(np.sum(np.cumprod(e[j + 1:])))
        grad[j] = prefix * tail * (1.0 - 2.0 * p)
    return grad


def worthless_feedback_phases(num_relays) -> float:
    """``E(N)`` at ``p = 1/2``, which does not depend on the decode profile."""
    k = _check_relays(num_relays, minimum=0)
    return 2.0 - 2.0 ** (-k)
