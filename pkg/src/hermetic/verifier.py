"""Randomized property suites for the hermeticity and distinguishability results.

Each property draws its own generator from ``(seed, property name, dim,
trial)`` so reports do not depend on execution order.
"""

import json
import zlib
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .correlation import (
    FULLY_DISTINGUISHABLE,
    INDISTINGUISHABLE,
    CorrelatedForm,
    chi_vectors,
    conditional_state,
    fully_distinguishable,
    hermetic_residual,
    indistinguishable,
    sampled_indistinguishability,
)
from .errors import ArgumentError
from .mixing import GramSpec, mix_general, purify, steer_ensemble
from .states import DensityOp, DescriptorSet, Ket, SystemLayout, is_pure, purity, support_basis
from .tolerances import DEFAULT, Tolerances

__all__ = [
    "SuiteConfig",
    "PropertyReport",
    "SuiteReport",
    "random_ket",
    "random_density",
    "random_unitary",
    "random_independent_kets",
    "run_property",
    "run_suite",
    "PROPERTIES",
]

MAX_CONDITION = 1e4
ETA_SAMPLES = 200
Q_SAMPLES = 50


def _rng(seed):
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def _gaussian(rng, *shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def random_ket(dim, seed, label="Q"):
    """Haar-random ket: normalized complex Gaussian vector."""
    if dim < 1:
        raise ArgumentError("dimension must be positive")
    v = _gaussian(_rng(seed), dim)
    return Ket.normalized(v, SystemLayout.of((label, dim)))


def random_density(dim, rank, seed, label="Q"):
    """Trace-induced random state: reduction of a Haar ket on ``dim x rank``."""
    if not 1 <= rank <= dim:
        raise ArgumentError(f"rank must lie in [1, {dim}], got {rank}")
    psi = _gaussian(_rng(seed), dim, rank)
    m = psi @ psi.conj().T
    return DensityOp(m / np.trace(m).real, SystemLayout.of((label, dim)))


def random_unitary(dim, seed):
    q, r = np.linalg.qr(_gaussian(_rng(seed), dim, dim))
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))


def random_independent_kets(n, dim, seed, label="S", max_condition=MAX_CONDITION):
    """``n <= dim`` linearly independent random kets, Gram condition number below ``max_condition``."""
    if n > dim:
        raise ArgumentError("cannot draw more independent kets than the dimension")
    rng = _rng(seed)
    layout = SystemLayout.of((label, dim))
    while True:
        kets = [Ket.normalized(_gaussian(rng, dim), layout) for _ in range(n)]
        if np.linalg.cond(linalg.gram([k.vec for k in kets])) < max_condition:
            return kets


@dataclass(frozen=True)
class SuiteConfig:
    seed: int = 0
    trials: int = 200
    dims: tuple = (2, 3, 4)
    tolerances: Tolerances = DEFAULT

    def __post_init__(self):
        if int(self.trials) < 1:
            raise ArgumentError("trials per property must be at least 1")
        dims = tuple(int(d) for d in self.dims)
        if not dims or min(dims) < 2:
            raise ArgumentError("dimension sweep needs entries >= 2")
        object.__setattr__(self, "dims", dims)


@dataclass
class PropertyReport:
    name: str
    anchor: str
    trials: int = 0
    failures: int = 0
    worst_residual: float = 0.0

    @property
    def passed(self):
        return self.failures == 0

    def to_json(self):
        return {
            "name": self.name,
            "anchor": self.anchor,
            "trials": self.trials,
            "failures": self.failures,
            "worst_residual": self.worst_residual,
            "passed": self.passed,
        }


@dataclass
class SuiteReport:
    config: SuiteConfig
    properties: list = field(default_factory=list)
    out_of_scope: list = field(default_factory=list)

    @property
    def passed(self):
        return all(p.passed for p in self.properties)

    @property
    def worst_residual(self):
        return max((p.worst_residual for p in self.properties), default=0.0)

    def to_json(self):
        cfg = self.config
        return {
            "kind": "verify_report",
            "seed": cfg.seed,
            "trials_per_property": cfg.trials,
            "dims": list(cfg.dims),
            "tolerances": cfg.tolerances.as_dict(),
            "properties": [p.to_json() for p in self.properties],
            "out_of_scope": list(self.out_of_scope),
            "worst_residual": self.worst_residual,
            "passed": self.passed,
        }

    def dumps(self):
        return json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n"


# -- instance builders -------------------------------------------------------

def _amplitudes(rng, n):
    mu = _gaussian(rng, n)
    return mu / np.linalg.norm(mu)


def _kets(rng, n, dim, label):
    layout = SystemLayout.of((label, dim))
    return [Ket.normalized(_gaussian(rng, dim), layout) for _ in range(n)]


def _collinear(rng, n, dim, label="M"):
    big = _gaussian(rng, dim)
    big /= np.linalg.norm(big)
    theta = rng.uniform(0, 2 * np.pi, n)
    layout = SystemLayout.of((label, dim))
    return [Ket(np.exp(1j * t) * big, layout) for t in theta]


def _orthonormal(rng, n, dim, label="M"):
    u = random_unitary(dim, rng)
    layout = SystemLayout.of((label, dim))
    return [Ket(u[:, j], layout) for j in range(n)]


def _definition4_residual(psi, descriptors, pointers, rng, tol):
    """max |Prob(q | b_k) - |<q|phi_k>|^2| over random values q of S."""
    worst = 0.0
    dim = descriptors[0].layout.total
    for phi, b in zip(descriptors, pointers):
        cond = conditional_state(psi, b, tol).vec
        q = _gaussian(rng, Q_SAMPLES, dim)
        q /= np.linalg.norm(q, axis=1, keepdims=True)
        diff = np.abs(q.conj() @ cond) ** 2 - np.abs(q.conj() @ phi.vec) ** 2
        worst = max(worst, float(np.max(np.abs(diff))))
    return worst


def _chi_defect(form, tol):
    _, chis = chi_vectors(form, tol)
    return max(0.0, 1.0 - float(np.abs(chis.conj() @ chis.T).min()))


def _agree(form, indist, rng, tol):
    """Exact chi-test and eta-sampled definition agree."""
    spread = sampled_indistinguishability(form, ETA_SAMPLES, rng, tol)
    return (spread < 10 * tol.classify) == indist, (spread if indist else 0.0)


# -- properties --------------------------------------------------------------
# each takes (rng, dim, tol) and returns (ok, residual)

def p_hermetic_iff_factorizes(rng, d, tol):
    rho = random_density(d, int(rng.integers(1, d + 1)), rng, "S")
    sigma = random_density(d, int(rng.integers(1, d + 1)), rng, "M")
    res = hermetic_residual(rho.tensor(sigma), "S")
    ent = Ket.normalized(_gaussian(rng, d * d), SystemLayout.of(("S", d), ("M", d)))
    return res <= tol.classify and hermetic_residual(ent, "S") > tol.classify, res


def p_pure_reduction_is_hermetic(rng, d, tol):
    psi_s = random_ket(d, rng, "S")
    phi_mr = Ket.normalized(_gaussian(rng, d * 2), SystemLayout.of(("M", d), ("R", 2)))
    rho_sm = psi_s.tensor(phi_mr).projector().reduce(["S", "M"])
    if not is_pure(rho_sm.reduce("S"), tol):
        return False, 1.0
    res = hermetic_residual(rho_sm, "S")
    return res <= tol.classify, res


def p_uncorrelated_part_of_pure_is_pure(rng, d, tol):
    layout = SystemLayout.of(("S", d), ("E", d))
    product = random_ket(d, rng, "S").tensor(random_ket(d, rng, "E"))
    entangled = Ket.normalized(_gaussian(rng, d * d), layout)
    worst, ok = 0.0, True
    for psi, expect_hermetic in ((product, True), (entangled, False)):
        rho_s = psi.projector().reduce("S")
        herm = hermetic_residual(psi, "S") <= tol.classify
        form = steer_ensemble(psi, DescriptorSet(tuple(support_basis(rho_s, tol))), tol)
        rebuild = float(np.max(np.abs(form.joint().reorder(psi.layout.labels).vec - psi.vec)))
        worst = max(worst, rebuild)
        ok &= herm == expect_hermetic and rebuild <= tol.classify
        if herm:
            worst = max(worst, abs(1.0 - purity(rho_s)))
            ok &= is_pure(rho_s, tol)
        else:
            # Prob(phi_k and lambda_k) - Prob(phi_k) Prob(lambda_k) = mu_k^2 (1 - mu_k^2)
            w = np.abs(form.amplitudes) ** 2
            ok &= np.count_nonzero(w > tol.psd) >= 2 and float(np.max(w * (1 - w))) > tol.classify
    return bool(ok), worst


def p_hermetic_implies_indistinguishable(rng, d, tol):
    psi_s = random_ket(d, rng, "S")
    rho_m = random_density(d, int(rng.integers(1, d + 1)), rng, "M")
    total = psi_s.tensor(purify(rho_m, "R", tol))
    res = hermetic_residual(total, "S")
    u = random_unitary(d, rng)
    basis = DescriptorSet(tuple(Ket(u[:, j], psi_s.layout) for j in range(d)))
    form = steer_ensemble(total, basis, tol)
    return res <= tol.classify and indistinguishable(form, tol), max(res, _chi_defect(form, tol))


def p_indistinguishable_disjoint_is_hermetic(rng, d, tol):
    u = random_unitary(d, rng)
    layout = SystemLayout.of(("S", d))
    phis = [Ket(u[:, j], layout) for j in range(d)]
    collinear = bool(rng.integers(2))
    lams = _collinear(rng, d, d) if collinear else _kets(rng, d, d, "M")
    form = CorrelatedForm.normalized(phis, lams, _amplitudes(rng, d))
    indist = indistinguishable(form, tol)
    res = hermetic_residual(form.joint(), "S")
    herm = res <= tol.classify
    return indist == herm == collinear, (res if collinear else 0.0)


def _random_gram_spec(rng, n, kind):
    if kind == 0:
        return GramSpec.collinear(rng.uniform(0, 2 * np.pi, n))
    if kind == 1:
        return GramSpec.identity(n)
    if kind == 2:
        v = _gaussian(rng, n, n)
        v /= np.linalg.norm(v, axis=1, keepdims=True)
        return GramSpec(linalg.gram(list(v)))
    labels = rng.integers(0, 2, n)
    return GramSpec((labels[:, None] == labels[None, :]).astype(float))


def p_no_hermetic_mixture_from_pure(rng, d, tol):
    n = int(rng.integers(2, d + 2))
    layout = SystemLayout.of(("S", d))
    d_set = DescriptorSet(tuple(_kets(rng, n, d, "S")), amplitudes=_gaussian(rng, n))
    r = mix_general(d_set, _random_gram_spec(rng, n, int(rng.integers(4))), tol=tol)
    closed = float(np.max(np.abs(r.joint.projector().reduce("S").mat - r.reduced.mat)))
    pure = is_pure(r.reduced, tol)
    res = hermetic_residual(r.joint, "S")
    ok = pure == (res <= tol.classify) and closed <= tol.classify and r.reduced.layout == layout
    return ok, max(closed, res if pure else 0.0)


def p_indistinguishable_descriptors_pure(rng, d, tol):
    n = int(rng.integers(2, d + 1))
    phis = random_independent_kets(n, d, rng)
    d_set = DescriptorSet(tuple(phis), amplitudes=_gaussian(rng, n))
    r = mix_general(d_set, GramSpec.collinear(rng.uniform(0, 2 * np.pi, n)), tol=tol)
    res = abs(1.0 - purity(r.reduced))
    ok = r.classification.kind == INDISTINGUISHABLE and indistinguishable(r.form, tol) and is_pure(r.reduced, tol)
    return ok, res


def p_distinguishable_descriptors_mixture(rng, d, tol):
    n = int(rng.integers(2, d + 1))
    phis = random_independent_kets(n, d, rng)
    d_set = DescriptorSet(tuple(phis), amplitudes=_gaussian(rng, n))
    r = mix_general(d_set, GramSpec.identity(n), tol=tol)
    w = np.abs(r.amplitudes) ** 2
    target = sum(wj * np.outer(p.vec, p.vec.conj()) for wj, p in zip(w, phis))
    res = float(np.max(np.abs(r.reduced.mat - target)))
    ok = (
        r.classification.kind == FULLY_DISTINGUISHABLE
        and fully_distinguishable(r.form, tol) is not None
        and res <= 1e-9
    )
    return ok, res


def p_collinear_implies_indistinguishable(rng, d, tol):
    n = int(rng.integers(2, d + 2))
    form = CorrelatedForm.normalized(_kets(rng, n, d, "S"), _collinear(rng, n, d), _gaussian(rng, n))
    indist = indistinguishable(form, tol)
    agree, spread = _agree(form, indist, rng, tol)
    return indist and agree, max(_chi_defect(form, tol), spread)


def p_independent_indistinguishable_collinear(rng, d, tol):
    n = int(rng.integers(2, d + 1))
    collinear = bool(rng.integers(2))
    lams = _collinear(rng, n, d) if collinear else _kets(rng, n, d, "M")
    form = CorrelatedForm.normalized(random_independent_kets(n, d, rng), lams, _gaussian(rng, n))
    indist = indistinguishable(form, tol)
    agree, spread = _agree(form, indist, rng, tol)
    res = max(_chi_defect(form, tol), spread) if collinear else 0.0
    return indist == collinear and agree, res


def p_pointer_basis_reconstruction(rng, d, tol):
    n = int(rng.integers(2, d + 2))
    phis = _kets(rng, n, d, "S")
    pointers = _orthonormal(rng, n, n)
    psi_amp = _amplitudes(rng, n)
    form = CorrelatedForm.normalized(phis, pointers, psi_amp)
    psi = form.joint()
    # rebuild sum_j N_j e^{i theta_j} |phi_j b_j> from conditional data only
    rebuilt = np.zeros_like(psi.vec)
    for phi, b in zip(phis, pointers):
        raw = psi.vec.reshape(d, n) @ b.vec.conj()
        n_j = np.linalg.norm(raw)
        phase = conditional_state(psi, b, tol).inner(phi).conjugate()
        rebuilt += n_j * phase * linalg.tensor_product(phi.vec, b.vec)
    res = float(np.max(np.abs(rebuilt - psi.vec)))
    res = max(res, _definition4_residual(psi, phis, pointers, rng, tol))
    ok = res <= 1e-9 and fully_distinguishable(form, tol) is not None
    return ok, res


def p_orthonormal_implies_distinguishable(rng, d, tol):
    n = int(rng.integers(2, d + 2))
    phis = _kets(rng, n, d, "S")
    form = CorrelatedForm.normalized(phis, _orthonormal(rng, n, n), _gaussian(rng, n))
    basis = fully_distinguishable(form, tol)
    if basis is None:
        return False, 0.0
    res = _definition4_residual(form.joint(), phis, basis, rng, tol)
    return res <= 1e-8, res


def p_independent_distinguishable_orthonormal(rng, d, tol):
    n = int(rng.integers(2, d + 1))
    ortho = bool(rng.integers(2))
    phis = random_independent_kets(n, d, rng)
    lams = _orthonormal(rng, n, d) if ortho else _kets(rng, n, d, "M")
    form = CorrelatedForm.normalized(phis, lams, _gaussian(rng, n))
    basis = fully_distinguishable(form, tol)
    # the exterior states are unique for independent descriptors: recover them
    steered = steer_ensemble(form.joint(), DescriptorSet(tuple(phis)), tol)
    recovered = np.abs(steered.env_gram())
    res = float(np.max(np.abs(recovered - np.abs(form.env_gram()))))
    off = float(np.max(recovered - np.eye(n)))
    if ortho:
        res = max(res, _definition4_residual(form.joint(), phis, basis or lams, rng, tol))
        return basis is not None and res <= 1e-8, res
    return basis is None and off > tol.classify and res <= 1e-8, res


PROPERTIES = (
    ("hermetic_iff_factorizes",
     "a system is hermetic iff the joint state factorizes", p_hermetic_iff_factorizes),
    ("pure_reduction_is_hermetic",
     "a system whose reduced state is pure is hermetic", p_pure_reduction_is_hermetic),
    ("uncorrelated_part_of_pure_is_pure",
     "an uncorrelated subsystem of a pure composite is pure", p_uncorrelated_part_of_pure_is_pure),
    ("hermetic_implies_indistinguishable",
     "all values of a hermetic system are indistinguishable", p_hermetic_implies_indistinguishable),
    ("indistinguishable_disjoint_is_hermetic",
     "indistinguishable complete disjoint values are hermetic", p_indistinguishable_disjoint_is_hermetic),
    ("no_hermetic_mixture_from_pure",
     "mixing pure preparations gives a pure state or a correlated mixture", p_no_hermetic_mixture_from_pure),
    ("indistinguishable_descriptors_pure",
     "a state described by indistinguishable descriptors is pure", p_indistinguishable_descriptors_pure),
    ("distinguishable_descriptors_mixture",
     "a state described by fully distinguishable descriptors is sum_j w_j P_j",
     p_distinguishable_descriptors_mixture),
    ("collinear_implies_indistinguishable",
     "collinear exterior states make the descriptors indistinguishable", p_collinear_implies_indistinguishable),
    ("independent_indistinguishable_collinear",
     "independent indistinguishable descriptors force collinear exterior states",
     p_independent_indistinguishable_collinear),
    ("pointer_basis_reconstruction",
     "full distinguishability yields sum_j N_j e^(i theta_j) |phi_j b_j> with orthonormal b_j",
     p_pointer_basis_reconstruction),
    ("orthonormal_implies_distinguishable",
     "orthonormal exterior states make the descriptors fully distinguishable",
     p_orthonormal_implies_distinguishable),
    ("independent_distinguishable_orthonormal",
     "independent fully distinguishable descriptors force orthonormal exterior states",
     p_independent_distinguishable_orthonormal),
)

OUT_OF_SCOPE = (
    {"name": "universe_purity_equivalence",
     "anchor": "purity of the state of the universe is equivalent to hermetic purity",
     "reason": "out of scope by design: no finite test exists"},
)


def _seed_for(seed, name, dim, trial):
    return np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, zlib.crc32(name.encode()), dim, trial])


def run_property(name, cfg):
    """Run one named property over the configured dimension sweep."""
    for pname, anchor, fn in PROPERTIES:
        if pname == name:
            break
    else:
        raise ArgumentError(f"unknown property {name!r}")
    rep = PropertyReport(pname, anchor)
    tol = cfg.tolerances
    for dim in cfg.dims:
        for trial in range(cfg.trials):
            rng = np.random.default_rng(_seed_for(cfg.seed, pname, dim, trial))
            try:
                ok, res = fn(rng, dim, tol)
            except Exception:  # noqa: BLE001 - a crashing trial is a failed trial
                ok, res = False, float("inf")
            rep.trials += 1
            rep.failures += int(not ok)
            if np.isfinite(res):
                rep.worst_residual = max(rep.worst_residual, float(res))
    return rep


def run_suite(cfg=None, names=None):
    """Run every property (or those in ``names``) and collect a report."""
    import warnings

    cfg = cfg or SuiteConfig()
    selected = [p[0] for p in PROPERTIES] if names is None else list(names)
    report = SuiteReport(cfg, out_of_scope=[dict(o) for o in OUT_OF_SCOPE])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for name in selected:
            report.properties.append(run_property(name, cfg))
    return report
