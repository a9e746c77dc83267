"""Compare the compiled and numpy kernel backends.

    python benchmarks/bench_kernels.py [--repeat N] [--json]

Times each kernel on both backends for a few problem sizes and checks that
their outputs agree.
"""

import argparse
import json
import timeit

import numpy as np

from hermetic import _kernels


def _crandn(rng, *shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def _density(rng, d):
    a = _crandn(rng, d, d)
    m = a @ a.conj().T
    return m / np.trace(m).real


def cases(rng):
    """Yield ``(kernel, size label, args)``."""
    for dims in ((2, 2), (4, 4), (2, 3, 4), (8, 8), (4, 4, 4)):
        rho = _density(rng, int(np.prod(dims)))
        yield "partial_trace", "x".join(map(str, dims)), (rho, dims, [0])
    for n in (2, 8, 32):
        yield "kron", f"{n}x{n}", (_crandn(rng, n, n), _crandn(rng, n, n))
    for n, d in ((4, 4), (16, 64), (64, 256)):
        yield "gram", f"{n} vecs dim {d}", (_crandn(rng, n, d),)
    for n, r in ((4, 2), (16, 8), (64, 64)):
        v = _crandn(rng, r, n)
        v /= np.linalg.norm(v, axis=0)
        yield "pivoted_cholesky", f"n={n} rank={r}", (v.conj().T @ v, 1e-9)


def _first(x):
    return x[0] if isinstance(x, tuple) else x


def run(repeat):
    backends = {"python": _kernels.load_backend("python")}
    try:
        backends["cython"] = _kernels.load_backend("cython")
    except ImportError:
        pass
    rows = []
    for kernel, label, args in cases(np.random.default_rng(0)):
        row = {"kernel": kernel, "size": label}
        outs = {}
        for name, mod in backends.items():
            fn = getattr(mod, kernel)
            outs[name] = _first(fn(*args))
            number = 50
            best = min(timeit.repeat(lambda: fn(*args), number=number, repeat=repeat)) / number
            row[name] = best
        if len(outs) == 2:
            a, b = outs["python"], outs["cython"]
            if kernel == "pivoted_cholesky":
                a, b = a @ a.conj().T, b @ b.conj().T
            row["max_diff"] = float(np.max(np.abs(a - b)))
            row["speedup"] = row["python"] / row["cython"]
        rows.append(row)
    return rows


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--json", action="store_true", help="print rows as JSON")
    args = p.parse_args(argv)
    rows = run(args.repeat)
    if args.json:
        print(json.dumps(rows, indent=2))
        return
    print(f"default backend: {_kernels.BACKEND}")
    print(f"{'kernel':<18}{'size':<20}{'python (us)':>12}{'cython (us)':>13}{'speedup':>9}{'max diff':>11}")
    for r in rows:
        cy = r.get("cython")
        print(f"{r['kernel']:<18}{r['size']:<20}{r['python'] * 1e6:>12.1f}"
              + (f"{cy * 1e6:>13.1f}{r['speedup']:>9.2f}{r['max_diff']:>11.1e}" if cy else f"{'-':>13}"))


if __name__ == "__main__":
    main()
