"""Physically typed states over labelled composite systems.

Subsystems are identified by label. Reordering is always explicit
(:meth:`Ket.reorder`, :meth:`DensityOp.reorder`).
"""

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import ArgumentError, InvalidStateError, LayoutError, NormalizationError
from .tolerances import DEFAULT

__all__ = [
    "SystemLayout",
    "Ket",
    "DensityOp",
    "DescriptorSet",
    "purity",
    "is_pure",
    "prob",
    "support_basis",
    "span_projector",
    "described_by",
]


def _frozen(a):
    a = np.array(a, dtype=np.complex128, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class SystemLayout:
    """Ordered ``(label, dim)`` pairs of a composite system."""

    subsystems: tuple

    def __post_init__(self):
        subs = tuple((str(lbl), int(d)) for lbl, d in self.subsystems)
        if not subs:
            raise LayoutError("layout needs at least one subsystem")
        labels = [s[0] for s in subs]
        if len(set(labels)) != len(labels):
            raise LayoutError(f"duplicate subsystem labels in {labels}")
        if any(d < 1 for _, d in subs):
            raise LayoutError(f"subsystem dimensions must be positive: {subs}")
        object.__setattr__(self, "subsystems", subs)

    @classmethod
    def of(cls, *pairs):
        return cls(tuple(pairs))

    @property
    def labels(self):
        return tuple(s[0] for s in self.subsystems)

    @property
    def dims(self):
        return tuple(s[1] for s in self.subsystems)

    @property
    def total(self):
        return int(np.prod(self.dims))

    def index(self, label):
        try:
            return self.labels.index(label)
        except ValueError:
            raise LayoutError(f"unknown subsystem label {label!r}; layout has {self.labels}") from None

    def indices(self, labels):
        return [self.index(lbl) for lbl in labels]

    def select(self, labels):
        """Sub-layout with ``labels`` in this layout's order."""
        idx = sorted(self.indices(labels))
        return SystemLayout(tuple(self.subsystems[i] for i in idx))

    def complement(self, labels):
        drop = set(self.indices(labels))
        return tuple(lbl for i, lbl in enumerate(self.labels) if i not in drop)

    def __add__(self, other):
        return SystemLayout(self.subsystems + other.subsystems)

    def to_json(self):
        return [{"label": lbl, "dim": d} for lbl, d in self.subsystems]

    @classmethod
    def from_json(cls, items):
        return cls(tuple((it["label"], it["dim"]) for it in items))


def _check_layout(layout, size):
    if not isinstance(layout, SystemLayout):
        raise LayoutError("expected a SystemLayout")
    if layout.total != size:
        raise LayoutError(f"layout dimension {layout.total} does not match size {size}")


def _perm(layout, labels):
    if sorted(labels) != sorted(layout.labels):
        raise LayoutError(f"reorder labels {labels} are not a permutation of {layout.labels}")
    return layout.indices(labels)


@dataclass(frozen=True, eq=False)
class Ket:
    """Normalized state vector on a layout."""

    vec: np.ndarray
    layout: SystemLayout

    def __post_init__(self):
        v = linalg.as_vector(self.vec)
        _check_layout(self.layout, v.size)
        nrm = np.linalg.norm(v)
        if abs(nrm - 1.0) > DEFAULT.norm:
            raise NormalizationError(f"ket norm {nrm!r} differs from 1")
        object.__setattr__(self, "vec", _frozen(v))

    @classmethod
    def normalized(cls, vec, layout):
        v = linalg.as_vector(vec)
        nrm = np.linalg.norm(v)
        if nrm <= DEFAULT.norm:
            raise NormalizationError("cannot normalize a null vector")
        return cls(v / nrm, layout)

    @classmethod
    def basis(cls, layout, index):
        v = np.zeros(layout.total, dtype=np.complex128)
        v[index] = 1.0
        return cls(v, layout)

    @classmethod
    def on(cls, label, vec):
        """Ket on a single subsystem named ``label``."""
        v = linalg.as_vector(vec)
        return cls(v, SystemLayout.of((label, v.size)))

    @property
    def dim(self):
        return self.vec.size

    def inner(self, other):
        """``<self|other>``."""
        if self.layout != other.layout:
            raise LayoutError(f"layout mismatch {self.layout.labels} vs {other.layout.labels}")
        return complex(np.vdot(self.vec, other.vec))

    def tensor(self, other):
        return Ket(linalg.tensor_product(self.vec, other.vec), self.layout + other.layout)

    def projector(self):
        return DensityOp(np.outer(self.vec, self.vec.conj()), self.layout)

    def relabel(self, layout):
        return Ket(self.vec, layout)

    def reorder(self, labels):
        perm = _perm(self.layout, list(labels))
        v = self.vec.reshape(self.layout.dims).transpose(perm).reshape(-1)
        return Ket(v, SystemLayout(tuple(self.layout.subsystems[i] for i in perm)))

    def __repr__(self):
        return f"Ket({self.layout.labels}, {np.array2string(self.vec, precision=4)})"


@dataclass(frozen=True, eq=False)
class DensityOp:
    """Hermitian, unit-trace, positive semidefinite operator on a layout."""

    mat: np.ndarray
    layout: SystemLayout

    def __post_init__(self):
        m = linalg.as_matrix(self.mat, square=True)
        _check_layout(self.layout, m.shape[0])
        if linalg.hermiticity_defect(m) > DEFAULT.herm:
            raise InvalidStateError("density operator is not Hermitian")
        tr = np.trace(m)
        if abs(tr - 1.0) > DEFAULT.norm:
            raise InvalidStateError(f"density operator trace {tr!r} differs from 1")
        m = (m + m.conj().T) / 2
        if np.linalg.eigvalsh(m).min() < -DEFAULT.psd:
            raise InvalidStateError("density operator is not positive semidefinite")
        object.__setattr__(self, "mat", _frozen(m))

    @classmethod
    def _unchecked(cls, mat, layout):
        # negative tests only: skips every invariant
        obj = object.__new__(cls)
        object.__setattr__(obj, "mat", _frozen(mat))
        object.__setattr__(obj, "layout", layout)
        return obj

    @classmethod
    def maximally_mixed(cls, layout):
        return cls(np.eye(layout.total) / layout.total, layout)

    @classmethod
    def from_ensemble(cls, kets, weights):
        kets = list(kets)
        w = np.asarray(weights, dtype=float)
        m = sum(wi * np.outer(k.vec, k.vec.conj()) for wi, k in zip(w, kets))
        return cls(m, kets[0].layout)

    @property
    def dim(self):
        return self.mat.shape[0]

    def reduce(self, labels):
        """Partial trace keeping ``labels`` (result in layout order)."""
        if isinstance(labels, str):
            labels = [labels]
        keep = self.layout.indices(labels)
        mat = linalg.partial_trace(self.mat, self.layout.dims, keep)
        red = self.layout.select(labels)
        # renormalize away round-off so the result re-validates
        return DensityOp(mat / np.trace(mat).real, red)

    def reorder(self, labels):
        perm = _perm(self.layout, list(labels))
        n = len(perm)
        dims = self.layout.dims
        m = self.mat.reshape(dims + dims).transpose(perm + [p + n for p in perm])
        side = self.layout.total
        return DensityOp(m.reshape(side, side), SystemLayout(tuple(self.layout.subsystems[i] for i in perm)))

    def tensor(self, other):
        return DensityOp(linalg.tensor_product(self.mat, other.mat), self.layout + other.layout)

    def __repr__(self):
        return f"DensityOp({self.layout.labels}, dim={self.dim})"


def purity(rho):
    """``Tr rho^2``."""
    m = rho.mat
    return float(np.real(np.vdot(m, m)))


def is_pure(rho, tol=DEFAULT):
    return purity(rho) > 1.0 - tol.classify


def prob(rho, phi, tol=DEFAULT):
    """Probability ``Tr(rho |phi><phi|)`` of the value represented by ``phi``."""
    if rho.layout != phi.layout:
        raise LayoutError(f"layout mismatch {rho.layout.labels} vs {phi.layout.labels}")
    p = float(np.real(np.vdot(phi.vec, rho.mat @ phi.vec)))
    if -tol.norm <= p < 0.0:
        return 0.0
    if 1.0 < p <= 1.0 + tol.norm:
        return 1.0
    return p


def support_basis(rho, tol=DEFAULT):
    """Orthonormal eigenvectors with eigenvalue above ``tol.psd``.

    Ordered by decreasing eigenvalue.
    """
    w, v = linalg.eigh(rho.mat, tol)
    order = [k for k in np.argsort(-w, kind="stable") if w[k] > tol.psd]
    return [Ket(v[:, k], rho.layout) for k in order]


def span_projector(vectors, tol=DEFAULT):
    """Orthogonal projector onto the span of the given 1-d arrays."""
    mat = np.column_stack([np.asarray(v, dtype=np.complex128) for v in vectors])
    w, u = linalg.eigh(mat @ mat.conj().T, tol)
    u = u[:, w > tol.psd]
    return u @ u.conj().T


@dataclass(frozen=True, eq=False)
class DescriptorSet:
    """Pure-state descriptors of a state of one system.

    Attributes
    ----------
    descriptors : tuple of Ket
        All on the same layout; may be linearly dependent.
    amplitudes : ndarray or None
        Complex amplitudes ``mu_j``. Checked for unit norm only when the
        descriptors are orthonormal; otherwise normalization happens when a
        state is built from them.
    weights : ndarray or None
        Classical probabilities ``w_j`` (non-negative, summing to one).
    weight_matrix : ndarray or None
        Hermitian ``w[t, t']`` with ``rho = sum w[t, t'] |phi_t><phi_t'|``.
    """

    descriptors: tuple
    amplitudes: np.ndarray = None
    weights: np.ndarray = None
    weight_matrix: np.ndarray = None

    def __post_init__(self):
        descs = tuple(self.descriptors)
        if not descs:
            raise ArgumentError("descriptor set is empty")
        layout = descs[0].layout
        if any(d.layout != layout for d in descs):
            raise LayoutError("descriptors live on different layouts")
        object.__setattr__(self, "descriptors", descs)
        n = len(descs)
        tol = DEFAULT
        if self.amplitudes is not None:
            mu = linalg.as_vector(self.amplitudes)
            if mu.size != n:
                raise ArgumentError(f"{mu.size} amplitudes for {n} descriptors")
            if self.is_orthonormal() and abs(np.sum(np.abs(mu) ** 2) - 1.0) > tol.norm:
                raise NormalizationError("amplitudes of orthonormal descriptors must have unit norm")
            object.__setattr__(self, "amplitudes", _frozen(mu))
        if self.weights is not None:
            w = np.array(self.weights, dtype=float)
            if w.shape != (n,) or np.any(w < 0) or abs(w.sum() - 1.0) > tol.norm:
                raise ArgumentError("weights must be n non-negative numbers summing to 1")
            w.setflags(write=False)
            object.__setattr__(self, "weights", w)
        if self.weight_matrix is not None:
            wm = linalg.as_matrix(self.weight_matrix, square=True)
            if wm.shape[0] != n:
                raise ArgumentError(f"weight matrix side {wm.shape[0]} for {n} descriptors")
            if linalg.hermiticity_defect(wm) > tol.herm:
                raise ArgumentError("weight matrix is not Hermitian")
            total = np.sum(wm * self.gram().T)
            if abs(total - 1.0) > tol.norm:
                raise NormalizationError(f"weight matrix gives trace {total!r}, not 1")
            object.__setattr__(self, "weight_matrix", _frozen(wm))

    def __len__(self):
        return len(self.descriptors)

    @property
    def layout(self):
        return self.descriptors[0].layout

    def matrix(self):
        """Descriptors as the columns of a (dim, n) array."""
        return np.column_stack([d.vec for d in self.descriptors])

    def gram(self):
        return linalg.gram([d.vec for d in self.descriptors])

    def is_orthonormal(self, tol=DEFAULT):
        return bool(np.max(np.abs(self.gram() - np.eye(len(self)))) <= tol.classify)

    def rank(self, tol=DEFAULT):
        w = np.linalg.eigvalsh(self.gram())
        return int(np.count_nonzero(w > tol.psd))

    def is_independent(self, tol=DEFAULT):
        return self.rank(tol) == len(self)

    def independent_subset(self, tol=DEFAULT):
        """Indices of a maximal linearly independent subset (greedy, in order)."""
        chosen = []
        for j in range(len(self)):
            trial = chosen + [j]
            g = linalg.gram([self.descriptors[i].vec for i in trial])
            if np.linalg.eigvalsh(g).min() > tol.psd:
                chosen = trial
        return chosen

    def operator(self):
        """``sum_{t t'} w[t, t'] |phi_t><phi_t'|`` from the weight matrix."""
        if self.weight_matrix is None:
            raise ArgumentError("descriptor set has no weight matrix")
        phi = self.matrix()
        return DensityOp(phi @ self.weight_matrix @ phi.conj().T, self.layout)


def described_by(rho, d, tol=DEFAULT):
    """True iff the support of ``rho`` lies in the span of the descriptors."""
    if rho.layout != d.layout:
        raise LayoutError("state and descriptors live on different layouts")
    q = span_projector([k.vec for k in d.descriptors], tol)
    residual = 0.0
    for v in support_basis(rho, tol):
        residual = max(residual, float(np.linalg.norm(v.vec - q @ v.vec)))
    return residual <= tol.classify
