"""Compare the compiled and pure-Python kernel backends.

    python benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import timeit

import numpy as np

from qlr._kernels import apply_matrix, compiled_available, get_backend, strings_fidelity
from qlr.qsim.gates import CODE_OF, KIND_CODES, TWO_QUBIT_KINDS, gate_matrix


def random_strings(rng, s, g, nq):
    kinds = list(KIND_CODES)
    codes = np.array([[CODE_OF[kinds[i]] for i in rng.integers(len(kinds), size=g)] for _ in range(s)])
    targets = rng.integers(nq, size=(s, g))
    controls = np.full((s, g), -1)
    for a in range(s):
        for b in range(g):
            others = [q for q in range(nq) if q != targets[a, b]]
            if KIND_CODES[codes[a, b]] in TWO_QUBIT_KINDS or rng.random() < 0.4:
                controls[a, b] = rng.choice(others)
    return codes, targets, controls, rng.uniform(0, 2 * np.pi, size=(s, g))


def cases(rng):
    psi = (rng.normal(size=(1 << 7, 1)) + 0j).copy()
    h = gate_matrix("H")
    yield "apply_matrix 7q controlled H x200", lambda b: [
        apply_matrix(psi, h, [q % 7], [(q + 1) % 7], 7, backend=b) for q in range(200)]
    full = (rng.normal(size=(1 << 7, 1 << 7)) + 0j).copy()
    yield "apply_matrix 7q full unitary block x50", lambda b: [
        apply_matrix(full, h, [q % 7], [], 7, backend=b) for q in range(50)]
    strings = random_strings(rng, 250, 20, 2)
    target = np.eye(4, dtype=complex)
    yield "strings_fidelity 250 strings x 20 gates", lambda b: strings_fidelity(*strings, 2, target, backend=b)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = ["python"] + (["compiled"] if compiled_available() else [])
    rng = np.random.default_rng(0)
    print(f"{'case':42s}" + "".join(f"{b:>12s}" for b in backends) + ("     speedup" if len(backends) == 2 else ""))
    for name, fn in cases(rng):
        times = []
        for b in backends:
            impl = get_backend(b)
            times.append(min(timeit.repeat(lambda: fn(impl), number=1, repeat=args.repeat)))
        row = f"{name:42s}" + "".join(f"{t * 1e3:10.2f}ms" for t in times)
        if len(times) == 2:
            row += f"{times[0] / times[1]:11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
