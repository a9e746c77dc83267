"""Acceptance gate: one test per criterion, each recording a PASS/FAIL line."""

import json
import time
import warnings

import numpy as np
import pytest

from hermetic import cli, linalg
from hermetic.correlation import CorrelatedForm, indistinguishable, sampled_indistinguishability
from hermetic.mixing import GramSpec, PhaseModel, mix_distinguishable, mix_general, phase_average
from hermetic.mixing import phase_average_monte_carlo
from hermetic.scenarios import (
    SlitScenario,
    build_slit_scenario,
    coherence_term,
    condition_on,
    double_slit_env_mixture,
    frequency_check,
    screen_intensity,
    simulate_preparation_run,
    visibility,
)
from hermetic.states import DescriptorSet, Ket, SystemLayout, purity, support_basis
from hermetic.verifier import SuiteConfig, random_independent_kets, run_property

from conftest import ACCEPTANCE, SQ2, basis, crandn, ket


def record(num, ok, detail):
    ACCEPTANCE[num] = (bool(ok), detail)
    print(f"criterion {num}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


def test_criterion_01_kernels():
    t0 = time.perf_counter()
    psi = np.array([SQ2, 0, 0, SQ2])
    bell_err = float(np.max(np.abs(linalg.partial_trace(np.outer(psi, psi), (2, 2), [0]) - np.eye(2) / 2)))
    rng = np.random.default_rng(1)
    worst = 0.0
    for _ in range(500):
        da, db = (int(x) for x in rng.integers(1, 5, size=2))
        v = crandn(rng, da * db)
        v /= np.linalg.norm(v)
        c, left, right = linalg.schmidt(v, (da, db))
        rebuilt = sum(c[k] * np.kron(left[:, k], right[:, k]) for k in range(c.size))
        worst = max(worst, float(np.max(np.abs(rebuilt - v))))
    elapsed = time.perf_counter() - t0
    record(1, bell_err <= 1e-12 and worst < 1e-10 and elapsed < 5.0,
           f"bell={bell_err:.1e} schmidt_worst={worst:.1e} time={elapsed:.2f}s")


def test_criterion_02_closed_form_self_consistency():
    rng = np.random.default_rng(2)
    worst = 0.0
    for _ in range(500):
        ds, n, r = (int(x) for x in rng.integers(1, 5, size=3))
        lay = SystemLayout.of(("S", ds))
        descs = [Ket.normalized(crandn(rng, ds), lay) for _ in range(n)]
        mu = crandn(rng, n)
        v = crandn(rng, r, n)
        v /= np.linalg.norm(v, axis=0)
        res = mix_general(DescriptorSet(descs, amplitudes=mu / np.linalg.norm(mu)), GramSpec(v.conj().T @ v))
        j = res.joint.vec
        traced = linalg.partial_trace(np.outer(j, j.conj()), res.joint.layout.dims, [0])
        worst = max(worst, float(np.max(np.abs(res.reduced.mat - traced))))
    record(2, worst <= 1e-10, f"worst={worst:.1e} over 500 instances")


LEMMAS = (
    "collinear_implies_indistinguishable",
    "independent_indistinguishable_collinear",
    "pointer_basis_reconstruction",
    "orthonormal_implies_distinguishable",
    "independent_distinguishable_orthonormal",
)


def test_criterion_03_lemma_suite():
    cfg = SuiteConfig(seed=0, trials=200, dims=(2, 3, 4))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        reports = [run_property(name, cfg) for name in LEMMAS]
    # chi-test against 200-sample eta-sampling on random forms of every kind
    rng = np.random.default_rng(3)
    disagree = 0
    for d in (2, 3, 4):
        for trial in range(200):
            n = int(rng.integers(2, d + 1))
            m_lay = SystemLayout.of(("M", d))
            # well-conditioned descriptors, as in the verifier's generators
            phis = random_independent_kets(n, d, rng)
            if trial % 2:
                big = crandn(rng, d)
                lams = [Ket.normalized(np.exp(1j * t) * big, m_lay) for t in rng.uniform(0, 6.3, n)]
            else:
                lams = [Ket.normalized(crandn(rng, d), m_lay) for _ in range(n)]
            form = CorrelatedForm.normalized(phis, lams, crandn(rng, n))
            exact = indistinguishable(form)
            sampled = sampled_indistinguishability(form, 200, rng) < 10 * 1e-8
            disagree += exact != sampled
    failures = sum(r.failures for r in reports)
    worst = max(r.worst_residual for r in reports)
    detail = ", ".join(f"{r.name}={r.failures}/{r.trials}" for r in reports)
    record(3, failures == 0 and worst < 1e-8 and disagree == 0,
           f"failures {detail}; worst={worst:.1e}; chi/eta disagreements={disagree}/600")


def test_criterion_04_heuristic_endpoints():
    rng = np.random.default_rng(4)
    worst_pure, worst_mix = 0.0, 0.0
    for _ in range(200):
        d = int(rng.integers(2, 5))
        n = int(rng.integers(1, d + 1))
        lay = SystemLayout.of(("S", d))
        descs = [Ket.normalized(crandn(rng, d), lay) for _ in range(n)]
        mu = crandn(rng, n)
        red = mix_general(DescriptorSet(descs, amplitudes=mu / np.linalg.norm(mu)), GramSpec.ones(n)).reduced
        worst_pure = max(worst_pure, abs(purity(red) - 1))
        u, _ = np.linalg.qr(crandn(rng, d, d))
        w = rng.dirichlet(np.ones(n))
        ortho = DescriptorSet([Ket(u[:, j], lay) for j in range(n)], weights=w)
        red = mix_distinguishable(ortho).reduced
        expected = sum(w[j] * np.outer(u[:, j], u[:, j].conj()) for j in range(n))
        worst_mix = max(worst_mix, float(np.max(np.abs(red.mat - expected))))
    record(4, worst_pure <= 1e-8 and worst_mix <= 1e-10,
           f"all-ones purity defect={worst_pure:.1e}; identity mixture error={worst_mix:.1e}")


def test_criterion_05_visibility_law(tmp_path, capsys):
    errors = {}
    for g in (0.0, 0.25, 0.5, 0.75, 1.0):
        path = tmp_path / f"two_slit_{g}.json"
        path.write_text(json.dumps({"kind": "slits", "amplitudes": [1, 1], "gram": [[1, g], [g, 1]]}))
        code = cli.main(["slits", str(path)])
        out = json.loads(capsys.readouterr().out)
        errors[g] = abs(out["visibility"] - g) if code == 0 else float("inf")
    worst = max(errors.values())
    record(5, worst <= 1e-6, "errors " + " ".join(f"g={g}:{e:.1e}" for g, e in errors.items()))


def test_criterion_06_three_slit():
    mu = np.array([1, 1, 1]) / np.sqrt(3)
    d0, d1 = basis("D", 2, 0), basis("D", 2, 1)
    res = build_slit_scenario(SlitScenario(3, mu, env_vectors=(d1, d0, d0)))
    e = np.eye(3)
    coh = mu[1] * e[1] + mu[2] * e[2]
    block = abs(mu[0]) ** 2 * np.outer(e[0], e[0]) + np.outer(coh, coh.conj())
    block_err = float(np.max(np.abs(res.reduced.mat - block)))
    v = visibility(screen_intensity(condition_on(res.joint, d0), slits=[1, 2]))
    on_d1 = condition_on(res.joint, d1)
    sb = support_basis(on_d1)
    support_ok = len(sb) == 1 and abs(abs(sb[0].vec[0]) - 1) < 1e-12
    p1 = purity(on_d1)
    record(6, block_err <= 1e-10 and abs(v - 1) <= 1e-6 and abs(p1 - 1) <= 1e-10 and support_ok,
           f"block error={block_err:.1e}; d0 visibility={v:.9f}; d1 purity={p1:.12f} support_on_phi1={support_ok}")


def test_criterion_07_environment_mixture_contradiction():
    me = SystemLayout.of(("M", 2), ("E", 2))
    bell = Ket(np.array([SQ2, 0, 0, SQ2], dtype=complex), me)
    w = np.array([0.3, 0.7])
    a = np.sqrt(w)
    # collinear purifications (here identical)
    rho_sm, rho_s = double_slit_env_mixture(w, bell, bell)
    naive = np.kron(np.diag(w), rho_sm.reduce("M").mat)
    term = rho_sm.mat - naive
    cross = np.outer(bell.vec, bell.vec.conj()).reshape(2, 2, 2, 2).trace(axis1=1, axis2=3)
    expected = a[0] * a[1] * np.linalg.norm(cross, 2)
    got = np.linalg.norm(term, 2)
    term_ok = abs(got - expected) < 1e-12 and got > 0
    term_ok &= float(np.max(np.abs(term - coherence_term(w, bell, bell)))) < 1e-12
    pure_ok = abs(purity(rho_s) - 1) < 1e-10
    # orthogonal purifications with the same marginal on M
    minus = Ket(np.array([SQ2, 0, 0, -SQ2], dtype=complex), me)
    _, rho_s_orth = double_slit_env_mixture(w, bell, minus)
    orth_err = abs(purity(rho_s_orth) - np.sum(w ** 2))
    # partially overlapping pair: |rho_S off-diagonal| = sqrt(w1 w2) * 0.5
    phase = np.exp(1j * np.pi / 3)
    half = Ket(np.array([SQ2 * phase, 0, 0, SQ2 * np.conj(phase)]), me)
    _, rho_half = double_slit_env_mixture([0.5, 0.5], bell, half)
    half_err = abs(abs(rho_half.mat[0, 1]) - 0.25)
    record(7, term_ok and pure_ok and orth_err <= 1e-10 and half_err <= 1e-12,
           f"coherence norm={got:.6f} (expected {expected:.6f}); collinear purity={purity(rho_s):.12f}; "
           f"orthogonal purity error={orth_err:.1e}; overlap-0.5 error={half_err:.1e}")


def test_criterion_08_phase_averaging():
    pair = (basis("S", 2, 0), basis("S", 2, 1))
    w = np.array([0.3, 0.7])
    d = DescriptorSet(pair, amplitudes=np.sqrt(w))
    uniform_err = float(np.max(np.abs(phase_average(d, PhaseModel.uniform()).mat
                                      - mix_distinguishable(DescriptorSet(pair, weights=w)).reduced.mat)))
    eq = DescriptorSet(pair, amplitudes=[SQ2, SQ2])
    pm = PhaseModel.gaussian(np.diag([0.5, 0.5]))  # Var(theta_1 - theta_2) = 1
    mc = phase_average_monte_carlo(eq, pm, 1_000_000, seed=8).mat[0, 1]
    damping_mc = abs(mc) / 0.5
    exact = phase_average(eq, pm).mat[0, 1] / 0.5
    rel = abs(np.exp(-0.5) - damping_mc) / damping_mc
    record(8, uniform_err <= 1e-12 and rel <= 0.01 and abs(exact - np.exp(-0.5)) < 1e-12,
           f"uniform vs mixture={uniform_err:.1e}; MC damping={damping_mc:.5f} vs e^-1/2={np.exp(-0.5):.5f} "
           f"(rel {rel:.1e})")


def test_criterion_09_estimator():
    z = (basis("Q", 2, 0), basis("Q", 2, 1))
    x = (ket("Q", SQ2, SQ2), ket("Q", SQ2, -SQ2))
    cands = (basis("Q", 2, 0), ket("Q", SQ2, SQ2))
    hits = 0
    for seed in range(1000):
        tr = simulate_preparation_run("B", cands, [0.5, 0.5], 50, (z, x), seed, true_index=1)
        hits += bool(np.any(tr.posteriors.max(axis=1) > 0.99))
    w = [0.4, 0.6]
    tr = simulate_preparation_run("A", cands, w, 10_000, (z, x), seed=9)
    rows = frequency_check(tr, cands, w, (z, x), n_sigma=3)
    zmax = max(abs(r["z"]) for r in rows)
    record(9, hits >= 950 and all(r["within"] for r in rows),
           f"mode B converged in {hits}/1000 runs; mode A max |z|={zmax:.2f} over {len(rows)} outcomes")


@pytest.mark.slow
def test_criterion_10_full_verifier(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    t0 = time.perf_counter()
    code = cli.main(["verify", "--seed", "0", "--out", str(a)])
    elapsed = time.perf_counter() - t0
    code_b = cli.main(["verify", "--seed", "0", "--out", str(b)])
    same = a.read_bytes() == b.read_bytes()
    rep = json.loads(a.read_text())
    record(10, code == 0 and code_b == 0 and same and elapsed < 60,
           f"exit={code}; byte-identical={same}; runtime={elapsed:.1f}s; worst residual={rep['worst_residual']:.1e}")
