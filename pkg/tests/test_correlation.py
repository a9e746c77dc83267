import warnings

import numpy as np
import pytest

from hermetic.correlation import (
    FULLY_DISTINGUISHABLE,
    INDISTINGUISHABLE,
    PARTIAL,
    PARTITIONED,
    CorrelatedForm,
    chi_vectors,
    classify,
    classify_gram,
    conditional_prob,
    conditional_state,
    fully_distinguishable,
    hermetic_residual,
    indistinguishable,
    is_hermetic,
    sampled_indistinguishability,
)
from hermetic.errors import (
    DegenerateFormError,
    InconclusiveWarning,
    LayoutError,
    NormalizationError,
    NullDescriptorWarning,
    NullEventError,
)
from hermetic.linalg import schmidt
from hermetic.states import DensityOp, Ket, SystemLayout

from conftest import SQ2, basis, bell, crandn, ket


def three_slit_form(mu=(1, 1, 1)):
    s = [basis("S", 3, j) for j in range(3)]
    d0, d1 = basis("D", 2, 0), basis("D", 2, 1)
    return CorrelatedForm.normalized(s, [d1, d0, d0], np.asarray(mu, dtype=complex))


def test_form_normalization():
    s = [basis("S", 2, j) for j in range(2)]
    e = [basis("E", 2, j) for j in range(2)]
    with pytest.raises(NormalizationError):
        CorrelatedForm(s, e, np.array([1.0, 1.0]))
    f = CorrelatedForm.normalized(s, e, [1, 1])
    assert abs(f.norm_squared() - 1) < 1e-14
    with pytest.raises(LayoutError):
        CorrelatedForm.normalized(s, [basis("S", 2, 0)] * 2, [1, 1])


def test_conditional_state_bell():
    c = conditional_state(bell(), basis("B", 2, 0))
    assert np.allclose(c.vec, [1, 0])
    assert c.layout.labels == ("A",)


def test_conditional_state_product(rng):
    a = Ket.normalized(crandn(rng, 2), SystemLayout.of(("A", 2)))
    b = Ket.normalized(crandn(rng, 3), SystemLayout.of(("B", 3)))
    c = conditional_state(a.tensor(b), Ket.normalized(crandn(rng, 3), b.layout))
    assert abs(abs(np.vdot(c.vec, a.vec)) - 1) < 1e-12


def test_conditional_prob_projector_oracle(rng):
    lay = SystemLayout.of(("A", 2), ("B", 3))
    psi = Ket.normalized(crandn(rng, 6), lay)
    a = Ket.normalized(crandn(rng, 2), SystemLayout.of(("A", 2)))
    b = Ket.normalized(crandn(rng, 3), SystemLayout.of(("B", 3)))
    ab = a.tensor(b).vec
    joint = abs(np.vdot(ab, psi.vec)) ** 2
    rho_b = psi.projector().reduce("B").mat
    marg = np.real(np.vdot(b.vec, rho_b @ b.vec))
    assert abs(conditional_prob(psi, a, b) - joint / marg) < 1e-10


def test_conditional_prob_bell_and_null():
    assert abs(conditional_prob(bell(), basis("A", 2, 0), basis("B", 2, 0)) - 1) < 1e-15
    assert conditional_prob(bell(), basis("A", 2, 1), basis("B", 2, 0)) < 1e-30
    prod = basis("A", 2, 0).tensor(basis("B", 2, 0))
    with pytest.raises(NullEventError):
        conditional_state(prod, basis("B", 2, 1))


def test_conditional_prob_conditions_on_any_subset():
    lay = SystemLayout.of(("A", 2), ("B", 2), ("C", 2))
    psi = Ket.normalized(np.eye(8)[0] + np.eye(8)[7], lay)  # GHZ
    c = conditional_state(psi, basis("A", 2, 1))
    assert c.layout.labels == ("B", "C")
    assert np.allclose(c.vec, np.eye(4)[3])


def test_conditional_prob_schmidt_form(rng):
    psi = crandn(rng, 12)
    psi /= np.linalg.norm(psi)
    c, left, right = schmidt(psi, (3, 4))
    k = Ket(psi, SystemLayout.of(("A", 3), ("B", 4)))
    a = Ket.normalized(crandn(rng, 3), SystemLayout.of(("A", 3)))
    for j in range(c.size):
        beta = Ket(right[:, j], SystemLayout.of(("B", 4)))
        assert abs(conditional_prob(k, a, beta) - abs(np.vdot(a.vec, left[:, j])) ** 2) < 1e-12


def test_is_hermetic_examples(rng):
    r = DensityOp.from_ensemble([basis("S", 2, 0), ket("S", SQ2, SQ2)], [0.4, 0.6])
    s = DensityOp.maximally_mixed(SystemLayout.of(("M", 3)))
    assert is_hermetic(r.tensor(s), "S")
    assert not is_hermetic(bell().projector(), "A")
    assert hermetic_residual(bell(), ["A"]) == pytest.approx(0.5)
    # pure reduction: product of pure S with anything on M
    joint = ket("S", 0.6, 0.8).projector().tensor(s)
    assert is_hermetic(joint, "S")
    with pytest.raises(LayoutError):
        is_hermetic(joint, "X")


def test_indistinguishable_examples():
    s = [basis("S", 2, j) for j in range(2)]
    lam = np.array([0.6, 0.8j])
    lay = SystemLayout.of(("M", 2))
    collinear = [Ket(np.exp(1j * t) * lam, lay) for t in (0.0, 2.1)]
    assert indistinguishable(CorrelatedForm.normalized(s, collinear, [1, 1j]))
    ortho = [basis("M", 2, j) for j in range(2)]
    assert not indistinguishable(CorrelatedForm.normalized(s, ortho, [1, 1]))
    # product joint: a single effective exterior vector
    prod = CorrelatedForm.normalized([ket("S", SQ2, SQ2)], [basis("M", 2, 1)], [1])
    assert indistinguishable(prod)


def test_chi_vectors_skip_null_descriptors():
    s = [basis("S", 3, j) for j in range(3)]
    e = [basis("M", 3, j) for j in range(3)]
    f = CorrelatedForm.normalized(s, e, [1, 1, 0])
    with pytest.warns(NullDescriptorWarning):
        idx, chis = chi_vectors(f)
    assert list(idx) == [0, 1]
    assert chis.shape == (2, 3)


def test_sampled_agrees_with_exact(rng):
    s = [basis("S", 3, j) for j in range(3)]
    lay = SystemLayout.of(("M", 2))
    lam = Ket.normalized(crandn(rng, 2), lay)
    col = CorrelatedForm.normalized(s, [lam] * 3, crandn(rng, 3))
    assert indistinguishable(col)
    assert sampled_indistinguishability(col, 200, 1) < 1e-7
    gen = CorrelatedForm.normalized(s, [Ket.normalized(crandn(rng, 2), lay) for _ in range(3)], crandn(rng, 3))
    assert not indistinguishable(gen)
    assert sampled_indistinguishability(gen, 200, 1) > 1e-3


def test_fully_distinguishable_examples():
    s = [basis("S", 2, j) for j in range(2)]
    ortho = [basis("M", 2, j) for j in range(2)]
    f = CorrelatedForm.normalized(s, ortho, [0.6, 0.8])
    pointers = fully_distinguishable(f)
    assert pointers is not None and len(pointers) == 2
    for phi, b in zip(s, pointers):
        assert np.allclose(conditional_state(f.joint(), b).vec, phi.vec)
    col = CorrelatedForm.normalized(s, [ortho[0]] * 2, [1, 1])
    assert fully_distinguishable(col) is None
    assert fully_distinguishable(three_slit_form()) is None


def test_fully_distinguishable_dependent_is_inconclusive():
    s = [basis("S", 2, 0), basis("S", 2, 1), ket("S", SQ2, SQ2)]
    lay = SystemLayout.of(("M", 2))
    env = [basis("M", 2, 0), basis("M", 2, 1), ket("M", 0.6, 0.8)]
    f = CorrelatedForm.normalized(s, env, [1, 1, 1])
    with pytest.warns(InconclusiveWarning):
        assert fully_distinguishable(f) is None
    del lay


def test_classify_examples():
    assert classify_gram(np.ones((3, 3))).kind == INDISTINGUISHABLE
    c = classify_gram(np.eye(3))
    assert c.kind == FULLY_DISTINGUISHABLE and c.blocks == ((0,), (1,), (2,))
    c = classify(three_slit_form())
    assert c.kind == PARTITIONED and c.blocks == ((0,), (1, 2))
    assert c.to_json() == {"kind": PARTITIONED, "blocks": [[0], [1, 2]]}
    assert classify_gram(np.array([[1, 0.5], [0.5, 1]])).kind == PARTIAL


def test_classify_non_transitive_is_partial():
    # |G01| ~ 1, |G12| ~ 1 but |G02| = 0 violates transitivity
    g = np.array([[1, 1, 0], [1, 1, 1], [0, 1, 1]], dtype=float)
    assert classify_gram(g).kind == PARTIAL


def test_degenerate_form():
    s = [basis("S", 2, 0)]
    f = CorrelatedForm(tuple(s), (basis("M", 2, 0),), np.array([1.0]))
    object.__setattr__(f, "amplitudes", np.zeros(1, dtype=complex))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        with pytest.raises(DegenerateFormError):
            chi_vectors(f)
