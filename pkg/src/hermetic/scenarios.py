"""Which-path scenarios: N-slit screens, detector conditioning, environment
mixtures and the preparation estimator.

Slit passage states are the computational basis of a system labelled
``"S"``. The screen uses a far-field phase model
``<x|phi_j> = exp(i k d_j sin x) / sqrt(n)`` with ``d_j = j * slit_spacing``.
"""

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .correlation import conditional_state
from .errors import (
    ArgumentError,
    ImpossibleOutcomeError,
    LayoutError,
    MismatchedMarginalError,
    NullEventError,
)
from .mixing import GramSpec, mix_general, mix_with_environment
from .states import DensityOp, DescriptorSet, Ket, SystemLayout
from .tolerances import DEFAULT

__all__ = [
    "Screen",
    "SlitScenario",
    "ScreenPattern",
    "EstimatorState",
    "Trajectory",
    "slit_states",
    "build_slit_scenario",
    "screen_intensity",
    "visibility",
    "detection_probability",
    "condition_on",
    "double_slit_env_mixture",
    "coherence_term",
    "estimator_update",
    "simulate_preparation_run",
    "frequency_check",
]

SLIT_LABEL = "S"


@dataclass(frozen=True)
class Screen:
    """Far-field screen geometry; angles in radians.

    The defaults put both the central maximum and the first two-slit
    minimum exactly on grid points.
    """

    slit_spacing: float = 1.0
    wave_number: float = 2 * np.pi
    angle_range: tuple = (-np.pi / 2, np.pi / 2)
    samples: int = 24001

    def angles(self):
        lo, hi = self.angle_range
        return np.linspace(lo, hi, self.samples)


@dataclass(frozen=True, eq=False)
class SlitScenario:
    """N-slit preparation correlated with an exterior.

    Exactly one of ``gram`` and ``env_vectors`` is given.
    """

    n_slits: int
    amplitudes: np.ndarray
    gram: GramSpec = None
    env_vectors: tuple = None
    screen: Screen = field(default_factory=Screen)

    def __post_init__(self):
        if int(self.n_slits) < 2:
            raise ArgumentError("a slit scenario needs at least two slits")
        mu = np.asarray(self.amplitudes, dtype=np.complex128)
        if mu.shape != (self.n_slits,):
            raise ArgumentError(f"{mu.size} amplitudes for {self.n_slits} slits")
        object.__setattr__(self, "amplitudes", mu)
        if (self.gram is None) == (self.env_vectors is None):
            raise ArgumentError("give exactly one of gram and env_vectors")
        if self.gram is not None:
            g = self.gram if isinstance(self.gram, GramSpec) else GramSpec(self.gram)
            if g.size != self.n_slits:
                raise ArgumentError(f"GramSpec of side {g.size} for {self.n_slits} slits")
            object.__setattr__(self, "gram", g)
        else:
            env = tuple(self.env_vectors)
            if len(env) != self.n_slits:
                raise ArgumentError(f"{len(env)} exterior states for {self.n_slits} slits")
            object.__setattr__(self, "env_vectors", env)


@dataclass(frozen=True, eq=False)
class ScreenPattern:
    angles: np.ndarray
    intensities: np.ndarray

    def to_csv(self, stream=None):
        """Write ``angle,intensity`` rows (header included); returns the text if no stream."""
        out = io.StringIO() if stream is None else stream
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["angle", "intensity"])
        for a, i in zip(self.angles, self.intensities):
            writer.writerow([repr(float(a)), repr(float(i))])
        return out.getvalue() if stream is None else None


def slit_states(n):
    layout = SystemLayout.of((SLIT_LABEL, n))
    return tuple(Ket.basis(layout, j) for j in range(n))


def build_slit_scenario(s, tol=DEFAULT):
    """Mix the slit passage states with the scenario's exterior."""
    d = DescriptorSet(slit_states(s.n_slits), amplitudes=_unit_or_raw(s.amplitudes))
    if s.gram is not None:
        return mix_general(d, s.gram, tol=tol)
    return mix_with_environment(d, s.env_vectors, tol=tol)


def _unit_or_raw(mu):
    # orthonormal slit states: normalize here so DescriptorSet validation passes
    nrm = np.linalg.norm(mu)
    if nrm <= DEFAULT.norm:
        raise ArgumentError("slit amplitudes are all zero")
    return mu / nrm


def screen_intensity(reduced, screen=None, slits=None, tol=DEFAULT):
    """Screen pattern ``I(x) = <x|rho|x>`` of a slit-space density operator.

    ``slits`` restricts the pattern to a subset of slit indices (the state is
    projected onto them and renormalized); slit positions are unchanged.
    """
    screen = screen or Screen()
    rho = np.asarray(reduced.mat)
    n_all = rho.shape[0]
    idx = list(range(n_all)) if slits is None else sorted(set(int(j) for j in slits))
    if not idx or idx[0] < 0 or idx[-1] >= n_all:
        raise ArgumentError(f"invalid slit subset {slits}")
    sub = rho[np.ix_(idx, idx)]
    tr = np.trace(sub).real
    if tr <= tol.norm:
        raise ArgumentError("state has no weight on the selected slits")
    sub = sub / tr
    lo, hi = (float(a) for a in screen.angle_range)
    if screen.samples < 2 or not hi > lo:
        raise ArgumentError("degenerate screen grid")
    pos = np.asarray(idx, dtype=float) * screen.slit_spacing
    angles = screen.angles()
    s = np.sin(angles)
    fringes = abs(screen.wave_number) * (pos.max() - pos.min()) * (s.max() - s.min()) / (2 * np.pi)
    if screen.samples < 2 * fringes + 1:
        raise ArgumentError(f"degenerate screen grid: {screen.samples} samples for {fringes:.1f} fringes")
    amp = np.exp(1j * screen.wave_number * np.outer(s, pos)) / np.sqrt(len(idx))
    inten = np.real(np.einsum("xj,jk,xk->x", amp, sub, amp.conj()))
    inten = np.where(inten < 0.0, 0.0, inten)
    return ScreenPattern(angles, inten)


def visibility(p, tol=DEFAULT):
    """Fringe contrast ``(max - min) / (max + min)``; 0 for an empty pattern."""
    i = np.asarray(p.intensities)
    if i.size == 0:
        raise ArgumentError("empty screen pattern")
    hi, lo = float(i.max()), float(i.min())
    if hi + lo <= tol.norm:
        return 0.0
    return (hi - lo) / (hi + lo)


def detection_probability(joint, detector):
    """Probability that the exterior shows the value ``detector``."""
    rho = joint.projector().reduce(list(detector.layout.labels))
    if rho.layout != detector.layout:
        raise LayoutError("detector layout does not match the joint state")
    return float(np.real(np.vdot(detector.vec, rho.mat @ detector.vec)))


def condition_on(joint, detector, tol=DEFAULT):
    """Slit state selected by coincidence with the detector value."""
    if detection_probability(joint, detector) <= tol.norm:
        raise NullEventError("detector value has vanishing probability")
    return conditional_state(joint, detector, tol).projector()


def _weights2(w):
    w = np.asarray(w, dtype=float)
    if w.shape != (2,) or np.any(w < 0) or abs(w.sum() - 1.0) > DEFAULT.norm:
        raise ArgumentError("need two non-negative weights summing to 1")
    return w


def _m_labels(psi, m_label):
    labels = [m_label] if isinstance(m_label, str) else list(m_label)
    psi.layout.indices(labels)
    return labels


def double_slit_env_mixture(w, psi_me_1, psi_me_2, m_label="M", tol=DEFAULT):
    """Double slit whose passage is correlated with pure states of M (+) E.

    Returns ``(rho_SM, rho_S)`` for ``|Psi> = a_1|p_1>|Psi_1> + a_2|p_2>|Psi_2>``
    with ``a_j = sqrt(w_j)``.

    Raises
    ------
    MismatchedMarginalError
        If the two purifications reduce to different states of M.
    """
    w = _weights2(w)
    if psi_me_1.layout != psi_me_2.layout:
        raise LayoutError("the two environment states live on different layouts")
    if SLIT_LABEL in psi_me_1.layout.labels:
        raise LayoutError(f"label {SLIT_LABEL!r} is reserved for the slits")
    m = _m_labels(psi_me_1, m_label)
    rho_m1 = psi_me_1.projector().reduce(m)
    rho_m2 = psi_me_2.projector().reduce(m)
    if np.max(np.abs(rho_m1.mat - rho_m2.mat)) > tol.classify:
        raise MismatchedMarginalError("environment purifications have different marginals on M")
    p1, p2 = slit_states(2)
    a = np.sqrt(w)
    vec = a[0] * p1.tensor(psi_me_1).vec + a[1] * p2.tensor(psi_me_2).vec
    psi = Ket.normalized(vec, p1.layout + psi_me_1.layout)
    joint = psi.projector()
    return joint.reduce([SLIT_LABEL] + m), joint.reduce([SLIT_LABEL])


def coherence_term(w, psi_me_1, psi_me_2, m_label="M"):
    """Operator on S (+) M missing from the product-of-mixtures rule.

    ``a_1 a_2^* |p_1><p_2| (x) Tr_E |Psi_1><Psi_2| + h.c.``; returned as a
    plain matrix in the layout ``[S] + M``.
    """
    from .linalg import partial_trace, tensor_product

    w = _weights2(w)
    m = _m_labels(psi_me_1, m_label)
    layout = psi_me_1.layout
    keep = sorted(layout.indices(m))
    cross = partial_trace(np.outer(psi_me_1.vec, psi_me_2.vec.conj()), layout.dims, keep)
    a = np.sqrt(w)
    flip = np.array([[0.0, 1.0], [0.0, 0.0]])
    term = a[0] * a[1] * tensor_product(flip, cross)
    return term + term.conj().T


@dataclass(frozen=True, eq=False)
class EstimatorState:
    """Posterior over candidate pure preparations."""

    candidates: tuple
    posterior: np.ndarray

    def __post_init__(self):
        cands = tuple(self.candidates)
        p = np.array(self.posterior, dtype=float)
        if not cands or p.shape != (len(cands),):
            raise ArgumentError("posterior must have one entry per candidate")
        if np.any(p < 0) or abs(p.sum() - 1.0) > DEFAULT.norm:
            raise ArgumentError("posterior must be non-negative and sum to 1")
        if any(c.layout != cands[0].layout for c in cands):
            raise LayoutError("candidates live on different layouts")
        p.setflags(write=False)
        object.__setattr__(self, "candidates", cands)
        object.__setattr__(self, "posterior", p)

    def estimate(self):
        """Mixture-like estimator ``sum_j posterior_j |phi_j><phi_j|``."""
        return DensityOp.from_ensemble(self.candidates, self.posterior)


def _likelihoods(candidates, outcome):
    return np.array([abs(np.vdot(outcome.vec, c.vec)) ** 2 for c in candidates])


def estimator_update(e, outcome, tol=DEFAULT):
    """Bayesian update on a projective outcome ``|outcome><outcome|``."""
    if outcome.layout != e.candidates[0].layout:
        raise LayoutError("outcome and candidates live on different layouts")
    post = e.posterior * _likelihoods(e.candidates, outcome)
    total = post.sum()
    if total <= tol.norm:
        raise ImpossibleOutcomeError("outcome has zero likelihood under every weighted candidate")
    return EstimatorState(e.candidates, post / total)


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Result of :func:`simulate_preparation_run`.

    ``posteriors[n]`` is the posterior after ``n`` shots (row 0 is the
    prior). ``inconsistent[n]`` marks shots whose outcome had zero
    likelihood under the current posterior; those leave it unchanged.
    """

    mode: str
    posteriors: np.ndarray
    bases: np.ndarray
    outcomes: np.ndarray
    prepared: np.ndarray
    inconsistent: np.ndarray

    def to_csv(self, stream=None):
        out = io.StringIO() if stream is None else stream
        writer = csv.writer(out, lineterminator="\n")
        n = self.posteriors.shape[1]
        writer.writerow(["shot"] + [f"w{j + 1}" for j in range(n)])
        for shot, row in enumerate(self.posteriors):
            writer.writerow([shot] + [repr(float(x)) for x in row])
        return out.getvalue() if stream is None else None


def _check_design(design, layout, tol):
    bases = []
    for basis in design:
        basis = tuple(basis)
        if any(b.layout != layout for b in basis):
            raise LayoutError("measurement basis and candidates live on different layouts")
        mat = np.column_stack([b.vec for b in basis])
        if mat.shape[1] != layout.total or np.max(np.abs(mat.conj().T @ mat - np.eye(mat.shape[1]))) > tol.classify:
            raise ArgumentError("each measurement must be a complete orthonormal basis")
        bases.append(basis)
    if not bases:
        raise ArgumentError("measurement design is empty")
    return bases


def simulate_preparation_run(mode, candidates, weights, n_shots, design, seed, true_index=None, tol=DEFAULT):
    """Simulate repeated preparations and the posterior over candidates.

    Parameters
    ----------
    mode : {"A", "B"}
        ``"A"``: every shot draws a fresh candidate from ``weights`` (a true
        mixture). ``"B"``: one candidate is drawn (or ``true_index`` used)
        and held for every shot (a fixed but unknown pure preparation).
    design : sequence of bases
        Complete orthonormal bases, cycled shot by shot.
    seed : int
        Seed for :func:`numpy.random.default_rng`.
    """
    if mode not in ("A", "B"):
        raise ArgumentError(f"mode must be 'A' or 'B', not {mode!r}")
    state = EstimatorState(candidates, weights)
    cands = state.candidates
    w = state.posterior.copy()
    bases = _check_design(design, cands[0].layout, tol)
    rng = np.random.default_rng(seed)
    n = len(cands)
    fixed = None
    if mode == "B":
        fixed = int(true_index) if true_index is not None else int(rng.choice(n, p=w))
    cand_mat = np.column_stack([c.vec for c in cands])
    basis_probs = [np.abs(np.column_stack([b.vec for b in basis]).conj().T @ cand_mat) ** 2 for basis in bases]
    posts = np.empty((n_shots + 1, n))
    posts[0] = state.posterior
    which = np.empty(n_shots, dtype=int)
    outs = np.empty(n_shots, dtype=int)
    prepared = np.empty(n_shots, dtype=int)
    bad = np.zeros(n_shots, dtype=bool)
    cur = state.posterior.copy()
    for shot in range(n_shots):
        b = shot % len(bases)
        j = fixed if fixed is not None else int(rng.choice(n, p=w))
        probs = basis_probs[b][:, j]
        k = int(rng.choice(probs.size, p=probs / probs.sum()))
        upd = cur * basis_probs[b][k]
        total = upd.sum()
        if total <= tol.norm:
            bad[shot] = True
        else:
            cur = upd / total
        posts[shot + 1] = cur
        which[shot], outs[shot], prepared[shot] = b, k, j
    return Trajectory(mode, posts, which, outs, prepared, bad)


def frequency_check(traj, candidates, weights, design, n_sigma=3.0):
    """Compare outcome counts with ``Tr(rho P)`` for ``rho = sum w_j |phi_j><phi_j|``.

    Returns one dict per (basis, outcome) with the count, the number of
    shots in that basis, the expected probability, the z-score and whether
    it lies within ``n_sigma`` binomial standard deviations.
    """
    rho = DensityOp.from_ensemble(list(candidates), weights)
    rows = []
    for b, basis in enumerate(design):
        mask = traj.bases == b
        shots = int(mask.sum())
        for k, e in enumerate(basis):
            p = float(np.real(np.vdot(e.vec, rho.mat @ e.vec)))
            count = int(np.count_nonzero(traj.outcomes[mask] == k))
            sd = np.sqrt(shots * p * (1 - p))
            z = 0.0 if sd == 0 else (count - shots * p) / sd
            ok = abs(count - shots * p) <= n_sigma * sd + 1e-9
            rows.append({"basis": b, "outcome": k, "count": count, "shots": shots,
                         "expected": p, "z": float(z), "within": bool(ok)})
    return rows
