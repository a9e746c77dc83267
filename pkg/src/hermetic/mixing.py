"""Joint and reduced states for every mixing regime.

``mix_general`` is the workhorse: descriptors ``phi_s`` with amplitudes
``mu_s`` correlated with exterior states ``lambda_s`` whose overlaps are
given by a :class:`GramSpec`. The indistinguishable and distinguishable
regimes are its two extremes (all-ones and identity overlaps).
"""

from dataclasses import dataclass

import numpy as np

from . import linalg
from .correlation import Classification, CorrelatedForm, classify
from .errors import ArgumentError, LayoutError, NormalizationError, SpanError
from .states import DensityOp, DescriptorSet, Ket, SystemLayout, described_by
from .tolerances import DEFAULT

__all__ = [
    "GramSpec",
    "MixResult",
    "PhaseModel",
    "mix_general",
    "mix_with_environment",
    "mix_indistinguishable",
    "mix_distinguishable",
    "phase_average",
    "phase_average_monte_carlo",
    "purify",
    "steer_ensemble",
]


@dataclass(frozen=True, eq=False)
class GramSpec:
    """Unit-diagonal Hermitian PSD matrix of exterior overlaps ``<lambda_j|lambda_k>``."""

    overlaps: np.ndarray

    def __post_init__(self):
        g = linalg.validate_gram_spec(self.overlaps)
        g.setflags(write=False)
        object.__setattr__(self, "overlaps", g)

    @property
    def size(self):
        return self.overlaps.shape[0]

    @classmethod
    def identity(cls, n):
        return cls(np.eye(n))

    @classmethod
    def ones(cls, n):
        return cls(np.ones((n, n)))

    @classmethod
    def collinear(cls, phases):
        """Overlaps of ``exp(i theta_j) |Lambda>``."""
        z = np.exp(1j * np.asarray(phases, dtype=float))
        return cls(np.outer(z.conj(), z))

    @classmethod
    def pairwise(cls, overlap):
        """Two exterior states with ``<lambda_1|lambda_2> = overlap``."""
        return cls(np.array([[1.0, overlap], [np.conj(overlap), 1.0]]))

    @classmethod
    def from_vectors(cls, vectors):
        return cls(linalg.gram([getattr(v, "vec", v) for v in vectors]))


@dataclass(frozen=True, eq=False)
class MixResult:
    """Output of a mixing construction.

    ``form`` is the correlated form the joint state was built from, with
    renormalized amplitudes.
    """

    joint: Ket
    reduced: DensityOp
    classification: Classification
    env_vectors: tuple
    form: CorrelatedForm

    @property
    def amplitudes(self):
        return self.form.amplitudes


def _env_layout_label(system_layout, env_label):
    if env_label in system_layout.labels:
        raise LayoutError(f"environment label {env_label!r} clashes with the system layout")
    return env_label


def mix_with_environment(d, env_vectors, overlaps=None, tol=DEFAULT):
    """Correlate amplitudes-weighted descriptors with explicit exterior kets.

    The amplitudes are renormalized by the exact joint norm. ``overlaps``
    (defaults to the Gram matrix of ``env_vectors``) enters the closed-form
    reduced operator ``sum mu_s mu_s'^* <lambda_s'|lambda_s> |phi_s><phi_s'|``.
    """
    if d.amplitudes is None:
        raise ArgumentError("mixing needs descriptor amplitudes")
    env_vectors = tuple(env_vectors)
    if len(env_vectors) != len(d):
        raise ArgumentError(f"{len(env_vectors)} exterior states for {len(d)} descriptors")
    form = CorrelatedForm.normalized(d.descriptors, env_vectors, d.amplitudes)
    g = form.env_gram() if overlaps is None else np.asarray(overlaps)
    mu = form.amplitudes
    phi = d.matrix()
    # weights[s, s'] = mu_s mu_s'^* <lambda_s'|lambda_s> = mu_s mu_s'^* g[s', s]
    weights = np.outer(mu, mu.conj()) * g.T
    reduced = DensityOp(phi @ weights @ phi.conj().T, d.layout)
    return MixResult(
        joint=form.joint(),
        reduced=reduced,
        classification=classify(form, tol),
        env_vectors=env_vectors,
        form=form,
    )


def mix_general(d, g, env_label="E", tol=DEFAULT):
    """General partially distinguishable mixing.

    Parameters
    ----------
    d : DescriptorSet
        Descriptors with amplitudes.
    g : GramSpec
        Exterior overlaps; realized in the minimal dimension ``rank(g)``.
    env_label : str
        Label of the exterior subsystem in the joint layout.
    """
    if not isinstance(g, GramSpec):
        g = GramSpec(g)
    if g.size != len(d):
        raise ArgumentError(f"GramSpec of side {g.size} for {len(d)} descriptors")
    vecs = linalg.gram_realize(g.overlaps, tol=tol)
    layout = SystemLayout.of((_env_layout_label(d.layout, env_label), vecs[0].size))
    env = tuple(Ket(v, layout) for v in vecs)
    return mix_with_environment(d, env, overlaps=g.overlaps, tol=tol)


def mix_indistinguishable(d, env_label="E", tol=DEFAULT):
    """Indistinguishable mixing: collinear exterior, pure reduced state."""
    return mix_general(d, GramSpec.ones(len(d)), env_label, tol)


def mix_distinguishable(d, env_label="E", tol=DEFAULT):
    """Fully distinguishable mixing of ``d.weights``: ``sum w_j |phi_j><phi_j|``."""
    if d.weights is None:
        raise ArgumentError("distinguishable mixing needs descriptor weights")
    amps = DescriptorSet(d.descriptors, amplitudes=np.sqrt(d.weights))
    return mix_general(amps, GramSpec.identity(len(d)), env_label, tol)


@dataclass(frozen=True, eq=False)
class PhaseModel:
    """Statistics of the preparation phases ``theta_j`` (radians).

    ``kind`` is ``"fixed"`` (uses ``phases``), ``"uniform"`` (independent,
    uniform on the circle) or ``"gaussian"`` (jointly normal with
    ``covariance`` and optional ``mean``).
    """

    kind: str
    phases: np.ndarray = None
    covariance: np.ndarray = None
    mean: np.ndarray = None

    def __post_init__(self):
        if self.kind not in ("fixed", "uniform", "gaussian"):
            raise ArgumentError(f"unknown phase model {self.kind!r}")
        if self.kind == "fixed":
            if self.phases is None:
                raise ArgumentError("fixed phase model needs phases")
            object.__setattr__(self, "phases", np.asarray(self.phases, dtype=float))
        if self.kind == "gaussian":
            if self.covariance is None:
                raise ArgumentError("gaussian phase model needs a covariance")
            c = np.atleast_2d(np.asarray(self.covariance, dtype=float))
            if c.shape[0] != c.shape[1] or np.max(np.abs(c - c.T)) > DEFAULT.herm:
                raise ArgumentError("phase covariance must be a symmetric matrix")
            if np.linalg.eigvalsh(c).min() < -DEFAULT.psd:
                raise ArgumentError("phase covariance is not positive semidefinite")
            object.__setattr__(self, "covariance", c)
            mean = np.zeros(c.shape[0]) if self.mean is None else np.asarray(self.mean, dtype=float)
            object.__setattr__(self, "mean", mean)

    @classmethod
    def fixed(cls, phases):
        return cls("fixed", phases=phases)

    @classmethod
    def uniform(cls):
        return cls("uniform")

    @classmethod
    def gaussian(cls, covariance, mean=None):
        return cls("gaussian", covariance=covariance, mean=mean)

    def coherence(self, n):
        """Matrix ``E[exp(i (theta_j - theta_k))]``."""
        if self.kind == "uniform":
            return np.eye(n, dtype=np.complex128)
        if self.kind == "fixed":
            theta = self.phases
            if theta.size != n:
                raise ArgumentError(f"{theta.size} phases for {n} descriptors")
            z = np.exp(1j * theta)
            return np.outer(z, z.conj())
        c, m = self.covariance, self.mean
        if c.shape[0] != n:
            raise ArgumentError(f"covariance of side {c.shape[0]} for {n} descriptors")
        var = np.diag(c)[:, None] + np.diag(c)[None, :] - 2 * c
        return np.exp(1j * (m[:, None] - m[None, :]) - 0.5 * var)

    def sample(self, n, size, rng):
        if self.kind == "uniform":
            return rng.uniform(0.0, 2 * np.pi, size=(size, n))
        if self.kind == "fixed":
            return np.broadcast_to(self.phases, (size, n))
        return rng.multivariate_normal(self.mean, self.covariance, size=size, method="eigh")


def _phase_weighted(d, coh):
    mu = d.amplitudes
    phi = d.matrix()
    m = phi @ (np.outer(mu, mu.conj()) * coh) @ phi.conj().T
    tr = np.trace(m).real
    if tr <= DEFAULT.norm:
        raise NormalizationError("phase-averaged operator has zero trace")
    return DensityOp(m / tr, d.layout)


def phase_average(d, pm):
    """Phase-averaged state ``sum mu_j mu_k^* E[e^{i(theta_j - theta_k)}] |phi_j><phi_k|``.

    Renormalized to unit trace (relevant only for non-orthogonal descriptors).
    """
    if d.amplitudes is None:
        raise ArgumentError("phase averaging needs descriptor amplitudes")
    return _phase_weighted(d, pm.coherence(len(d)))


def phase_average_monte_carlo(d, pm, n_samples, seed, chunk=200_000):
    """Sample-mean estimate of :func:`phase_average`."""
    if d.amplitudes is None:
        raise ArgumentError("phase averaging needs descriptor amplitudes")
    rng = np.random.default_rng(seed)
    n = len(d)
    acc = np.zeros((n, n), dtype=np.complex128)
    done = 0
    while done < n_samples:
        size = min(chunk, n_samples - done)
        z = np.exp(1j * pm.sample(n, size, rng))
        acc += z.T @ z.conj()
        done += size
    return _phase_weighted(d, acc / n_samples)


def purify(rho, env_label="E", tol=DEFAULT):
    """Pure state on ``rho``'s layout plus an exterior of dimension ``rank(rho)``.

    The result is in Schmidt form ``sum_k sqrt(p_k) |e_k>|k>`` over the
    eigenpairs of ``rho`` with ``p_k > tol.psd``, by decreasing ``p_k``.
    """
    w, v = linalg.eigh(rho.mat, tol)
    order = [k for k in np.argsort(-w, kind="stable") if w[k] > tol.psd]
    r = len(order)
    env = SystemLayout.of((_env_layout_label(rho.layout, env_label), r))
    amp = np.sqrt(w[order])
    amp /= np.linalg.norm(amp)
    vec = np.zeros(rho.dim * r, dtype=np.complex128)
    for i, k in enumerate(order):
        basis = np.zeros(r)
        basis[i] = 1.0
        vec += amp[i] * linalg.tensor_product(v[:, k], basis)
    return Ket(vec, rho.layout + env)


def steer_ensemble(psi, d, tol=DEFAULT):
    """Rewrite a joint ket in correlated form over a maximal independent descriptor subset.

    Returns a :class:`CorrelatedForm` over the chosen descriptors with
    real non-negative amplitudes. Descriptors that carry no weight get a
    zero amplitude and the first exterior basis vector.

    Raises
    ------
    SpanError
        If the descriptors do not span the support of the reduced state.
    """
    s_labels = list(d.layout.labels)
    rest = psi.layout.complement(s_labels)
    if not rest:
        raise LayoutError("joint state has no exterior")
    ordered = psi.reorder(s_labels + list(rest))
    env_layout = ordered.layout.select(rest)
    rho_s = ordered.projector().reduce(s_labels)
    if rho_s.layout != d.layout:
        raise LayoutError("descriptor layout does not match the joint state")
    if not described_by(rho_s, d, tol):
        raise SpanError("descriptors do not span the support of the reduced state")
    chosen = d.independent_subset(tol)
    phi = np.column_stack([d.descriptors[i].vec for i in chosen])
    amp = ordered.vec.reshape(d.layout.total, env_layout.total)
    # phi @ coeff = amp; exact because the columns of amp lie in span(phi)
    coeff = np.linalg.solve(phi.conj().T @ phi, phi.conj().T @ amp)
    mus, lams = [], []
    for row in coeff:
        nrm = np.linalg.norm(row)
        if nrm > tol.norm:
            mus.append(nrm)
            lams.append(Ket(row / nrm, env_layout))
        else:
            mus.append(0.0)
            lams.append(Ket.basis(env_layout, 0))
    return CorrelatedForm.normalized(
        tuple(d.descriptors[i] for i in chosen), tuple(lams), np.array(mus, dtype=np.complex128)
    )
