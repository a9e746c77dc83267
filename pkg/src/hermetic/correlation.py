"""Conditional states, hermeticity and (in)distinguishability predicates.

The indistinguishability test is the finite collinearity criterion on the
conditional environment states ``chi_j``; :func:`sampled_indistinguishability`
is an independent Monte-Carlo check that samples exterior values directly.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import (
    ArgumentError,
    DegenerateFormError,
    InconclusiveWarning,
    LayoutError,
    NormalizationError,
    NullDescriptorWarning,
    NullEventError,
)
from .states import Ket
from .tolerances import DEFAULT

__all__ = [
    "CorrelatedForm",
    "Classification",
    "conditional_state",
    "conditional_prob",
    "hermetic_residual",
    "is_hermetic",
    "chi_vectors",
    "indistinguishable",
    "sampled_indistinguishability",
    "fully_distinguishable",
    "classify",
    "classify_gram",
]

INDISTINGUISHABLE = "Indistinguishable"
FULLY_DISTINGUISHABLE = "FullyDistinguishable"
PARTITIONED = "Partitioned"
PARTIAL = "Partial"


@dataclass(frozen=True, eq=False)
class CorrelatedForm:
    """Joint pure state ``sum_t mu_t |phi_t>|lambda_t>``.

    ``descriptors`` live on the system S, ``env_vectors`` on the exterior M;
    both are unit kets. The joint state must be normalized.
    """

    descriptors: tuple
    env_vectors: tuple
    amplitudes: np.ndarray

    def __post_init__(self):
        phis, lams = tuple(self.descriptors), tuple(self.env_vectors)
        mu = linalg.as_vector(self.amplitudes)
        if not phis or len(phis) != len(lams) or len(phis) != mu.size:
            raise ArgumentError("correlated form needs equally many descriptors, env vectors and amplitudes")
        if any(p.layout != phis[0].layout for p in phis) or any(l.layout != lams[0].layout for l in lams):
            raise LayoutError("descriptors (or env vectors) live on different layouts")
        if set(phis[0].layout.labels) & set(lams[0].layout.labels):
            raise LayoutError("system and exterior share a label")
        object.__setattr__(self, "descriptors", phis)
        object.__setattr__(self, "env_vectors", lams)
        mu = mu.copy()
        mu.setflags(write=False)
        object.__setattr__(self, "amplitudes", mu)
        nrm2 = self.norm_squared()
        if abs(nrm2 - 1.0) > DEFAULT.norm:
            raise NormalizationError(f"joint state has squared norm {nrm2!r}")

    @staticmethod
    def _norm2(phis, lams, mu):
        gp = linalg.gram([p.vec for p in phis])
        gl = linalg.gram([l.vec for l in lams])
        # sum_{jk} mu_j mu_k^* <lambda_k|lambda_j> <phi_k|phi_j>
        return float(np.real(mu.conj() @ (gp * gl) @ mu))

    def norm_squared(self):
        return self._norm2(self.descriptors, self.env_vectors, self.amplitudes)

    @classmethod
    def normalized(cls, descriptors, env_vectors, amplitudes):
        """Build a form, rescaling the amplitudes so the joint state has unit norm."""
        mu = linalg.as_vector(amplitudes)
        nrm2 = cls._norm2(list(descriptors), list(env_vectors), mu)
        if nrm2 <= DEFAULT.norm:
            raise NormalizationError("correlated form has zero norm")
        return cls(tuple(descriptors), tuple(env_vectors), mu / np.sqrt(nrm2))

    def __len__(self):
        return len(self.descriptors)

    @property
    def system_layout(self):
        return self.descriptors[0].layout

    @property
    def env_layout(self):
        return self.env_vectors[0].layout

    def descriptor_gram(self):
        return linalg.gram([p.vec for p in self.descriptors])

    def env_gram(self):
        return linalg.gram([l.vec for l in self.env_vectors])

    def joint(self):
        """The joint ket on ``system_layout + env_layout``."""
        vec = sum(
            m * linalg.tensor_product(p.vec, l.vec)
            for m, p, l in zip(self.amplitudes, self.descriptors, self.env_vectors)
        )
        return Ket.normalized(vec, self.system_layout + self.env_layout)


def _split(psi, b_layout):
    """Reorder ``psi`` as (rest, conditioned) and return the amplitude matrix."""
    for lbl, dim in b_layout.subsystems:
        if psi.layout.dims[psi.layout.index(lbl)] != dim:
            raise LayoutError(f"subsystem {lbl!r} has a different dimension in the joint state")
    rest = psi.layout.complement(b_layout.labels)
    if not rest:
        raise LayoutError("conditioning on every subsystem leaves nothing")
    ordered = psi.reorder(list(rest) + list(b_layout.labels))
    a_layout = psi.layout.select(rest)
    return ordered.vec.reshape(a_layout.total, b_layout.total), a_layout


def conditional_state(psi, b, tol=DEFAULT):
    """State of the remaining subsystems given the value ``b`` of some others.

    ``b`` lives on a subset of ``psi``'s subsystems (matched by label).

    Raises
    ------
    NullEventError
        If the unnormalized conditional vector has norm ``<= tol.norm``.
    """
    mat, a_layout = _split(psi, b.layout)
    v = mat @ b.vec.conj()
    n_b = np.linalg.norm(v)
    if n_b <= tol.norm:
        raise NullEventError(f"conditioning event has vanishing amplitude ({n_b:.3e})")
    return Ket(v / n_b, a_layout)


def conditional_prob(psi, a, b, tol=DEFAULT):
    """``Prob(a | b) = |<a|Psi(b)>|^2``."""
    cond = conditional_state(psi, b, tol)
    if a.layout != cond.layout:
        raise LayoutError(f"value lives on {a.layout.labels}, conditional state on {cond.layout.labels}")
    return float(abs(np.vdot(a.vec, cond.vec)) ** 2)


def _as_density(state):
    return state.projector() if isinstance(state, Ket) else state


def hermetic_residual(rho_sm, system):
    """``max |rho_SM - rho_S (x) rho_M|`` with S the given labels."""
    rho_sm = _as_density(rho_sm)
    if isinstance(system, str):
        system = [system]
    system = list(system)
    rest = rho_sm.layout.complement(system)
    if not rest:
        return 0.0
    s_labels = list(rho_sm.layout.select(system).labels)
    ordered = rho_sm.reorder(s_labels + list(rest))
    rho_s = rho_sm.reduce(s_labels)
    rho_m = rho_sm.reduce(list(rest))
    prod = linalg.tensor_product(rho_s.mat, rho_m.mat)
    return float(np.max(np.abs(ordered.mat - prod)))


def is_hermetic(rho_sm, system, tol=DEFAULT):
    """True iff the joint state factorizes across ``system`` and the rest."""
    return hermetic_residual(rho_sm, system) <= tol.classify


def chi_vectors(form, tol=DEFAULT):
    """Normalized conditional exterior states ``chi_j`` for non-null ``j``.

    Returns ``(indices, chis)`` where ``chis`` has one row per kept index.
    """
    lam = np.vstack([l.vec for l in form.env_vectors])
    coeff = form.descriptor_gram() * form.amplitudes[None, :]
    raw = coeff @ lam
    norms = np.linalg.norm(raw, axis=1)
    keep = np.flatnonzero(norms > tol.norm)
    if keep.size == 0:
        raise DegenerateFormError("every conditional exterior state vanishes")
    if keep.size < len(form):
        warnings.warn(
            f"skipping {len(form) - keep.size} null descriptor(s)", NullDescriptorWarning, stacklevel=3
        )
    return keep, raw[keep] / norms[keep, None]


def indistinguishable(form, tol=DEFAULT):
    """Exact indistinguishability test: all ``chi_j`` pairwise collinear."""
    _, chis = chi_vectors(form, tol)
    overlaps = np.abs(chis.conj() @ chis.T)
    return bool(overlaps.min() >= 1.0 - tol.classify)


def sampled_indistinguishability(form, n_samples=200, seed=0, tol=DEFAULT):
    """Largest spread ``max |Prob(eta|phi_j) - Prob(eta|phi_k)|`` over random ``eta``.

    Each conditional probability is obtained by conditioning the joint ket
    on the descriptor, independently of :func:`chi_vectors`. Descriptors
    that are null events are skipped.
    """
    rng = np.random.default_rng(seed)
    psi = form.joint()
    conds = []
    for phi in form.descriptors:
        try:
            conds.append(conditional_state(psi, phi, tol).vec)
        except NullEventError:
            continue
    if not conds:
        raise DegenerateFormError("every descriptor is a null event")
    d = form.env_layout.total
    eta = rng.normal(size=(n_samples, d)) + 1j * rng.normal(size=(n_samples, d))
    eta /= np.linalg.norm(eta, axis=1, keepdims=True)
    probs = np.abs(eta.conj() @ np.array(conds).T) ** 2
    return float(np.max(probs.max(axis=1) - probs.min(axis=1)))


def fully_distinguishable(form, tol=DEFAULT):
    """Pointer basis realizing full distinguishability, or ``None``.

    Orthonormal exterior vectors are always a pointer basis. Otherwise the
    answer is ``None``; for linearly dependent descriptors that verdict is
    not conclusive and an :class:`InconclusiveWarning` is issued.
    """
    _ = chi_vectors(form, tol)
    g = form.env_gram()
    if np.max(np.abs(g - np.eye(len(form)))) <= tol.classify:
        return list(form.env_vectors)
    rank = int(np.count_nonzero(np.linalg.eigvalsh(form.descriptor_gram()) > tol.psd))
    if rank < len(form):
        warnings.warn(
            "linearly dependent descriptors with non-orthonormal exterior vectors: "
            "full distinguishability is undecided",
            InconclusiveWarning,
            stacklevel=2,
        )
    return None


@dataclass(frozen=True)
class Classification:
    """Distinguishability verdict; ``blocks`` holds 0-based index groups."""

    kind: str
    blocks: tuple = ()

    def to_json(self):
        return {"kind": self.kind, "blocks": [list(b) for b in self.blocks]}


def classify_gram(g, tol=DEFAULT):
    """Classify from the exterior Gram matrix alone."""
    g = linalg.as_matrix(g, square=True)
    n = g.shape[0]
    mod = np.abs(g)
    if mod.min() >= 1.0 - tol.classify:
        return Classification(INDISTINGUISHABLE, (tuple(range(n)),))
    if np.max(np.abs(g - np.eye(n))) <= tol.classify:
        return Classification(FULLY_DISTINGUISHABLE, tuple((j,) for j in range(n)))
    one = mod >= 1.0 - tol.classify
    zero = mod <= tol.classify
    if not np.all(one | zero):
        return Classification(PARTIAL)
    blocks, seen = [], set()
    for j in range(n):
        if j in seen:
            continue
        block = tuple(int(k) for k in np.flatnonzero(one[j]))
        if seen.intersection(block) or not np.all(one[np.ix_(block, block)]):
            return Classification(PARTIAL)
        seen.update(block)
        blocks.append(block)
    return Classification(PARTITIONED, tuple(blocks))


def classify(form, tol=DEFAULT):
    """Indistinguishable / FullyDistinguishable / Partitioned / Partial."""
    return classify_gram(form.env_gram(), tol)
