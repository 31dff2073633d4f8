"""Orthogonal and biorthogonal signal sets, binary labelings and constrained subsets."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

__all__ = [
    "SignalSet",
    "Labeling",
    "ConstrainedSubset",
    "make_ppm",
    "make_bippm",
    "labeling_natural",
    "labeling_near_gray",
    "constrained_subset",
    "gray_violations",
    "format_labeled_set",
]


def _check_order(M) -> int:
    if isinstance(M, bool) or int(M) != M:
        raise ValueError(f"M must be an integer, got {M!r}")
    M = int(M)
    if M < 2 or M & (M - 1):
        raise ValueError(f"M must be a power of two >= 2, got {M}")
    return M


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SignalSet:
    """M real points of unit energy in ``dim`` dimensions.

    ``kind`` is ``"ppm"``, ``"bippm"`` or ``"subset"`` (a constrained
    sub-constellation, which keeps the parent's geometry but not its structure).
    """

    kind: str
    points: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "points", _frozen(self.points))
        if self.points.ndim != 2 or self.points.shape[0] == 0:
            raise ValueError("points must be a non-empty (M, D) array")

    @property
    def size(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def bits_per_symbol(self) -> int:
        return int(np.log2(self.size))

    @property
    def is_binary_valued(self) -> bool:
        """True when every entry is 0 or 1 (what an energy detector can separate)."""
        return bool(np.all((self.points == 0.0) | (self.points == 1.0)))

    def __repr__(self):
        return f"SignalSet(kind={self.kind!r}, M={self.size}, D={self.dim})"


def make_ppm(M) -> SignalSet:
    """M-PPM: the M unit vectors of R^M."""
    M = _check_order(M)
    return SignalSet("ppm", np.eye(M))


def make_bippm(M) -> SignalSet:
    """M-biPPM in the order e_1..e_D, -e_1..-e_D with D = M/2."""
    M = _check_order(M)
    eye = np.eye(M // 2)
    return SignalSet("bippm", np.vstack([eye, -eye]))


@dataclass(frozen=True, eq=False)
class Labeling:
    """Bijective map between signal indices and m-bit labels.

    ``label_of[i]`` is the label (as an integer, bit position 1 = MSB) of
    signal point ``i``; ``index_of`` is its inverse.
    """

    label_of: np.ndarray
    name: str = "custom"

    def __post_init__(self):
        labels = np.asarray(self.label_of, dtype=np.int64)
        M = labels.size
        _check_order(M)
        if labels.min() < 0 or labels.max() >= M or np.unique(labels).size != M:
            raise ValueError("labels must be a permutation of 0..M-1")
        labels = labels.copy()
        labels.setflags(write=False)
        inverse = np.empty(M, dtype=np.int64)
        inverse[labels] = np.arange(M)
        inverse.setflags(write=False)
        object.__setattr__(self, "label_of", labels)
        object.__setattr__(self, "index_of", inverse)

    @property
    def size(self) -> int:
        return self.label_of.size

    @property
    def bits_per_symbol(self) -> int:
        return int(np.log2(self.size))

    @property
    def bits(self) -> np.ndarray:
        """(M, m) array of label bits per signal index, most significant first."""
        m = self.bits_per_symbol
        shifts = np.arange(m - 1, -1, -1)
        return ((self.label_of[:, None] >> shifts) & 1).astype(np.int8)

    def label_string(self, index: int) -> str:
        return format(int(self.label_of[index]), f"0{self.bits_per_symbol}b")

    def label_strings(self) -> list[str]:
        return [self.label_string(i) for i in range(self.size)]

    def __repr__(self):
        return f"Labeling({self.name!r}, {self.label_strings()})"


def labeling_natural(signal_set: SignalSet) -> Labeling:
    """Position index in binary; for biPPM the MSB carries the sign (1 = negative)."""
    if signal_set.kind not in ("ppm", "bippm"):
        raise ValueError("natural labeling is defined for ppm and bippm sets")
    # constructor order already enumerates sign-major, position-minor
    return Labeling(np.arange(signal_set.size), name="natural")


def labeling_near_gray(signal_set: SignalSet) -> Labeling:
    """Near-Gray labeling of biPPM.

    ``e_i`` gets ``[0, binary(i-1)]`` and ``-e_i`` the bitwise complement of
    that label, so antipodal points always carry complementary labels. For
    M = 4 this is a Gray labeling.
    """
    if signal_set.kind != "bippm":
        raise ValueError("near-Gray labeling applies to bippm sets only "
                         "(every PPM labeling gives the same BICM capacity)")
    M = signal_set.size
    positive = np.arange(M // 2)
    return Labeling(np.concatenate([positive, (M - 1) ^ positive]), name="near-gray")


@dataclass(frozen=True, eq=False)
class ConstrainedSubset:
    """Signal points whose label has value ``bit_value`` at ``bit_position``."""

    parent: SignalSet
    bit_position: int
    bit_value: int
    member_indices: np.ndarray

    @property
    def points(self) -> np.ndarray:
        return self.parent.points[self.member_indices]

    def as_signal_set(self) -> SignalSet:
        return SignalSet("subset", self.points)


def constrained_subset(signal_set: SignalSet, labeling: Labeling, mu: int, b: int) -> ConstrainedSubset:
    m = labeling.bits_per_symbol
    if labeling.size != signal_set.size:
        raise ValueError("labeling size does not match the signal set")
    if not 1 <= mu <= m:
        raise ValueError(f"bit position must be in 1..{m}, got {mu}")
    if b not in (0, 1):
        raise ValueError(f"bit value must be 0 or 1, got {b}")
    members = np.flatnonzero(labeling.bits[:, mu - 1] == b)
    members.setflags(write=False)
    return ConstrainedSubset(signal_set, mu, b, members)


def gray_violations(signal_set: SignalSet, labeling: Labeling, tol: float = 1e-9):
    """Pairs at the minimum distance whose labels differ in two or more bits.

    An empty list means the labeling is Gray.
    """
    pts = signal_set.points
    d2 = np.sum((pts[:, None, :] - pts[None, :, :]) ** 2, axis=-1)
    np.fill_diagonal(d2, np.inf)
    dmin = d2.min()
    out = []
    for i, k in combinations(range(signal_set.size), 2):
        if abs(d2[i, k] - dmin) <= tol:
            hamming = bin(int(labeling.label_of[i] ^ labeling.label_of[k])).count("1")
            if hamming >= 2:
                out.append((i, k, hamming))
    return out


def format_labeled_set(signal_set: SignalSet, *labelings: Labeling) -> str:
    """Text table of index, signal vector and label strings."""
    header = ["i", "x"] + [lab.name for lab in labelings]
    rows = []
    for i, x in enumerate(signal_set.points):
        vec = "[" + " ".join(f"{int(v):2d}" for v in x) + "]"
        rows.append([str(i + 1), vec] + [lab.label_string(i) for lab in labelings])
    widths = [max(len(r[c]) for r in rows + [header]) for c in range(len(header))]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths))]
    lines.append("  ".join("-" * w for w in widths))
    lines += ["  ".join(c.ljust(w) for c, w in zip(r, widths)) for r in rows]
    return "\n".join(lines)
