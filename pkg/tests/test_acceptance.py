"""Acceptance suite: one test per criterion, fixed seeds, n <= 4, d <= 3.

Each test prints a single PASS/FAIL line (also echoed in the terminal summary).
"""
import dataclasses
import json
from pathlib import Path

import numpy as np

from statdisc.cli import main
from statdisc.disc import (eval_disc, eval_lift, make_disc, roots_of_unity, special_family,
                           verify_attachment, verify_lift_holomorphic, verify_pinning)
from statdisc.io import load, load_quadric
from statdisc.jets import (center_jacobian, jet1, jet1_numeric, jet_map_jacobian, necessity_check,
                           tortue_derivative)
from statdisc.minimality import (is_defective, is_minimal_at, is_stationary_minimal, openness_probe,
                                 orbit_basis)
from statdisc.pencil import (boundary_identity_error, factorize, quadratic_residual, real_b, solve_dX,
                             solve_quadratic, solve_X, stein_apply, stein_series, stein_solve)
from statdisc.quadric import find_levi_direction, is_D_nondegenerate, validate_quadric
from statdisc.sampling import admissible_a, dependent_quadric, random_hermitian, random_instance
from statdisc.scan import scan
from statdisc.tolerances import scale

from .conftest import ACCEPTANCE_LINES
from .oracles import scalar_contractive_root

ROOT = Path(__file__).resolve().parents[1]
SUITE = 100


def instances(seed, count=SUITE, **kw):
    rng = np.random.default_rng(seed)
    return [random_instance(rng, **kw) for _ in range(count)]


def record(k, title, checks):
    ok = all(v for v, _ in checks.values())
    detail = "; ".join(f"{name}={info}" for name, (_, info) in checks.items())
    line = f"criterion {k:2d} {'PASS' if ok else 'FAIL'}  {title}  [{detail}]"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def worst(values, limit):
    m = max(values)
    return m <= limit, f"{m:.2e}<= {limit:g}"


def test_criterion_01_quadratic_solver():
    res_ratio, norms, root_err = [], [], []
    suite = instances(101) + instances(103, ratio=0.24) + instances(102, n=1)
    for inst in suite:
        b = real_b(inst.a, inst.b0)
        X, _ = solve_quadratic(inst.q, inst.a, b)
        P, A = inst.q.combination(inst.a), inst.q.combination(b)
        r = np.linalg.norm(quadratic_residual(P, A, X))
        res_ratio.append(r / scale(P, A, X))
        norms.append(np.linalg.norm(X, 2))
        if inst.q.n == 1:
            root = scalar_contractive_root(P[0, 0], A[0, 0].real)
            root_err.append(abs(X[0, 0] - root))
    record(1, "matrix-equation solver", {
        "residual/scale": worst(res_ratio, 1e-12),
        "max||X||": (max(norms) < 1, f"{max(norms):.3f}"),
        "n=1 root error": worst(root_err, 1e-12),
        "n=1 cases": (len(root_err) >= SUITE, str(len(root_err))),
    })


def test_criterion_02_factorization():
    bnd, herm, inv = [], [], []
    for inst in instances(201) + instances(202, ratio=0.24):
        f = factorize(inst.q, inst.a, inst.b0)
        bnd.append(boundary_identity_error(f, 64) / scale(f.B, f.A_sum, f.P))
        herm.append(np.linalg.norm(f.B - f.B.conj().T) / scale(f.P, f.A_sum, f.X))
        sv = np.linalg.svd(f.B, compute_uv=False)
        inv.append(sv[-1] > 1e-10 * scale(f.B))
    record(2, "factorization", {
        "boundary/scale": worst(bnd, 1e-10),
        "B-hermitian/scale": worst(herm, 1e-12),
        "B invertible": (all(inv), f"{sum(inv)}/{len(inv)}"),
    })


def test_criterion_03_stein():
    rng = np.random.default_rng(301)
    inv_err, ser_err, herm_ok = [], [], []
    for _ in range(SUITE):
        n = int(rng.integers(1, 5))
        X = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        X *= rng.uniform(0.01, 0.9) / np.linalg.norm(X, 2)
        M = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        S = stein_solve(M, X)
        sc = scale(M, S)
        inv_err.append(np.max(np.abs(stein_apply(S, X) - M)) / sc)
        ser_err.append(np.max(np.abs(stein_series(M, X) - S)) / sc)
        H = random_hermitian(rng, n)
        for Min in (H, M):
            out = stein_solve(Min, X)
            h_in = np.max(np.abs(Min - Min.conj().T)) <= 1e-12 * scale(Min)
            h_out = np.max(np.abs(out - out.conj().T)) <= 1e-12 * scale(out)
            herm_ok.append(h_in == h_out)
    record(3, "Stein operator", {
        "psi(psi^-1)/scale": worst(inv_err, 1e-11),
        "series-vs-direct/scale": worst(ser_err, 1e-10),
        "hermitian iff": (all(herm_ok), f"{sum(herm_ok)}/{len(herm_ok)}"),
    })


def test_criterion_04_stationary_discs():
    att, hol, pin = [], [], []
    for inst in instances(401) + instances(403, ratio=0.24):
        disc = make_disc(inst.q, inst.a, inst.b0, inst.V)
        a = verify_attachment(disc, 256)
        h = verify_lift_holomorphic(disc, 512)
        p = verify_pinning(disc)
        att.append(a.residual / (a.threshold / 1e-10))
        hol.append(h.max_negative / h.max_coefficient)
        pin.append(p.residual / (p.threshold / 1e-12))
    fam = []
    z = roots_of_unity(64)
    zi = 0.7 * np.exp(1j * np.linspace(0, 2 * np.pi, 16, endpoint=False))
    for inst in instances(402, zero_a=True):
        disc = make_disc(inst.q, inst.a, inst.b0, inst.V)
        ref = special_family(inst.q, inst.b0, inst.V, z)
        got = (*eval_disc(disc, z), *eval_lift(disc, z))
        sc = scale(*ref)
        err = max(np.max(np.abs(g - r)) for g, r in zip(got, ref))
        ref_in = special_family(inst.q, inst.b0, inst.V, zi)
        h_in, g_in = eval_disc(disc, zi)
        err = max(err, np.max(np.abs(h_in - ref_in[0])), np.max(np.abs(g_in - ref_in[1])))
        fam.append(err / sc)
    record(4, "stationary discs", {
        "attachment/scale": worst(att, 1e-10),
        "negative-Fourier/rel": worst(hol, 1e-8),
        "pinning/scale": worst(pin, 1e-12),
        "special-family/scale": worst(fam, 1e-12),
    })


def test_criterion_05_derivatives():
    at_zero, fd_err, tortue_err = [], [], []
    for inst in instances(501, zero_a=True):
        A = inst.q.combination(inst.b0)
        for s in range(inst.q.d):
            ref = -np.linalg.solve(A, inst.q.A[s])
            at_zero.append(np.max(np.abs(solve_dX(inst.q, inst.a, inst.b0, s) - ref)) / scale(ref))
    rng = np.random.default_rng(502)
    for inst in instances(503):
        s = int(rng.integers(inst.q.d))
        e = np.zeros(inst.q.d)
        e[s] = 1
        h = 1e-5 * (1 + abs(inst.a[s].real))
        fd = (solve_X(inst.q, inst.a + h * e, inst.b0) - solve_X(inst.q, inst.a - h * e, inst.b0)) / (2 * h)
        dX = solve_dX(inst.q, inst.a, inst.b0, s)
        fd_err.append(np.max(np.abs(dX - fd)) / scale(dX))
    for inst in instances(504, count=50):
        s, j = int(rng.integers(inst.q.d)), int(rng.integers(inst.q.d))
        e = np.zeros(inst.q.d)
        e[s] = 1
        h = 1e-5 * (1 + abs(inst.a[s].real))

        def T(t):
            f = factorize(inst.q, inst.a + t * e, inst.b0, check=False)
            IX = np.eye(inst.q.n) - f.X
            return IX.conj().T @ f.K[j] @ IX

        an = tortue_derivative(inst.q, inst.a, inst.b0, s, j)
        tortue_err.append(np.max(np.abs(an - (T(h) - T(-h)) / (2 * h))) / scale(an))
    record(5, "derivative formulas", {
        "dX(a=0)/scale": worst(at_zero, 1e-12),
        "dX-vs-FD/scale": worst(fd_err, 1e-6),
        "tortue-vs-FD/scale": worst(tortue_err, 1e-6),
    })


def test_criterion_06_jets():
    rel, twice = [], []
    for inst in instances(601):
        disc = make_disc(inst.q, inst.a, inst.b0, inst.V)
        ex = np.concatenate(jet1(disc))
        nu = np.concatenate(jet1_numeric(disc))
        rel.append(np.max(np.abs(ex - nu)) / np.max(np.abs(ex)))
    for inst in instances(602, zero_a=True):
        J = jet_map_jacobian(inst.q, inst.a, inst.b0, inst.V).matrix
        D = is_D_nondegenerate(inst.q, inst.b0, inst.V).matrix
        twice.append(np.max(np.abs(J - 2 * D)) / scale(J, D))
    record(6, "jet formulas", {
        "jet1 rel error": worst(rel, 1e-6),
        "J=2D at a=0 /scale": worst(twice, 1e-10),
    })


def test_criterion_07_diffeomorphism_criteria():
    q = validate_quadric([np.eye(2), np.diag([1.0, -1.0])])
    curated = {}
    for name, f in (("jet", jet_map_jacobian), ("center", center_jacobian)):
        bad = f(q, [0, 0], [1, 0], [1, 0])
        good = f(q, [0, 0], [1, 0], [1, 1])
        curated[f"{name} degenerate"] = (bad.sigma_min <= 1e-8 and not bad.invertible,
                                        f"{bad.sigma_min:.1e}")
        curated[f"{name} generic"] = (good.sigma_min >= 1 and good.invertible, f"{good.sigma_min:.2f}")
    agree = []
    suite = instances(701, count=25) + instances(702, count=25, zero_a=True)
    for inst in suite:
        jan = jet_map_jacobian(inst.q, inst.a, inst.b0, inst.V)
        jfd = jet_map_jacobian(inst.q, inst.a, inst.b0, inst.V, method="fd")
        agree.append(jan.invertible == jfd.invertible)
        if not np.any(inst.a):
            can = center_jacobian(inst.q, inst.a, inst.b0, inst.V)
            cfd = center_jacobian(inst.q, inst.a, inst.b0, inst.V, method="fd")
            agree.append(can.invertible == cfd.invertible)
            sv = np.linalg.svd(cfd.realified, compute_uv=False)
            agree.append((sv[-1] > 1e-10 * scale(cfd.realified)) == can.invertible)
    curated["FD verdicts agree"] = (all(agree), f"{sum(agree)}/{len(agree)}")
    record(7, "diffeomorphism criteria", curated)


def test_criterion_08_necessity():
    checked = violations = 0
    for cfg in sorted((ROOT / "configs").glob("scan_*.json")):
        conf = load(cfg)
        q = load_quadric(cfg.parent / conf["input"])
        b0 = conf.get("b0") or find_levi_direction(q, 256, 0).b0
        res = scan(q, np.asarray(b0, dtype=float), conf["grid"])
        checked += res.summary["completed"]
        violations += res.summary["violations"]
    q = validate_quadric([np.eye(2), np.diag([1.0, -1.0])])
    res = scan(q, [1, 0], {"a": {"re": [-0.05, 0.05, 3], "im": [-0.05, 0.05, 3]},
                           "V": {"re": [-1, 1, 3], "im": [0, 1, 2]}, "a_max": 0.06})
    checked += res.summary["completed"]
    violations += res.summary["violations"]
    rng = np.random.default_rng(801)
    suite = instances(802)
    for _ in range(50):
        dq = dependent_quadric(rng, int(rng.integers(1, 5)))
        b0 = find_levi_direction(dq, 64, int(rng.integers(2**31))).b0
        V = rng.standard_normal(dq.n) + 1j * rng.standard_normal(dq.n)
        suite.append(type(suite[0])(dq, admissible_a(rng, dq, b0), b0, V))
    for inst in suite:
        checked += 1
        violations += not necessity_check(inst.q, inst.a, inst.b0, inst.V).consistent
    record(8, "necessity", {"violations": (violations == 0, f"{violations}/{checked}")})


def test_criterion_09_minimality():
    rng = np.random.default_rng(901)
    n_cases = n_min = 0
    suite = instances(902, count=150)
    for _ in range(50):
        dq = dependent_quadric(rng, int(rng.integers(1, 5)))
        b0 = find_levi_direction(dq, 64, int(rng.integers(2**31))).b0
        V = rng.standard_normal(dq.n) + 1j * rng.standard_normal(dq.n)
        suite.append(type(suite[0])(dq, admissible_a(rng, dq, b0), b0, V))
    nonzero_X = 0
    for inst in suite:
        X = factorize(inst.q, inst.a, inst.b0, check=False).X
        nonzero_X += bool(np.any(np.abs(X) > 1e-8))
        cert = is_stationary_minimal(inst.q, X, inst.V)  # raises on disagreement
        n_cases += 1
        n_min += cert.minimal

    scaling = []
    for inst in instances(903):
        b = real_b(inst.a, inst.b0)
        X, _ = solve_quadratic(inst.q, inst.a, b)
        for lam in (0.5, 2.0, -1.0):
            Y, _ = solve_quadratic(inst.q, lam * inst.a, lam * b)
            scaling.append(np.max(np.abs(X - Y)) / scale(X))
            assert is_minimal_at(inst.q, lam * inst.a, lam * b, inst.V).minimal == \
                is_minimal_at(inst.q, inst.a, b, inst.V).minimal

    orbit_ok = []
    for inst in instances(904):
        X = factorize(inst.q, inst.a, inst.b0, check=False).X
        orbit_ok.append(orbit_basis(X, inst.V).real_dimension
                        == orbit_basis(X, inst.V - X @ inst.V).real_dimension)

    dich, wit = [], []
    for inst in suite[140:]:
        disc = make_disc(inst.q, inst.a, inst.b0, inst.V)
        rep = is_defective(disc)
        h0, _ = eval_disc(disc, 0.0)
        dich.append(rep.defective == (not is_stationary_minimal(inst.q, disc.X, h0).minimal))
        if rep.defective:
            wit.append(max(rep.boundary_residual, rep.fourier_max) / (rep.threshold / 1e-9))

    frac = []
    for inst in instances(905, count=10):
        X = factorize(inst.q, inst.a, inst.b0, check=False).X
        if is_stationary_minimal(inst.q, X, inst.V).minimal:
            frac.append(openness_probe(inst.q, inst.a, inst.b0, inst.V, 1e-3, probes=20).fraction)

    record(9, "minimality machinery", {
        "rank=Gram": (n_cases >= 200 and 0 < n_min < n_cases and nonzero_X > 0,
                      f"{n_cases} cases, {n_min} minimal, {nonzero_X} with X!=0"),
        "scaling/scale": worst(scaling, 1e-12),
        "orbit dims": (all(orbit_ok), f"{sum(orbit_ok)}/{len(orbit_ok)}"),
        "defect dichotomy": (all(dich) and len(wit) > 0, f"{sum(dich)}/{len(dich)}, {len(wit)} defective"),
        "witness/scale": worst(wit, 1e-9),
        "openness fraction": (len(frac) > 0 and min(frac) == 1.0, f"{min(frac):.2f} over {len(frac)}"),
    })


def test_criterion_10_cli_determinism(tmp_path, capsys):
    configs = sorted((ROOT / "configs").glob("*.json"))
    same = []
    for cfg in configs:
        command = json.loads(cfg.read_text())["command"]
        outs = []
        for k in range(2):
            out = tmp_path / f"{cfg.stem}.{k}.json"
            code = main([command, "--config", str(cfg), "--output", str(out)])
            outs.append((code, out.read_bytes()))
        same.append(outs[0] == outs[1] and outs[0][0] == 0)
    quad = ROOT / "configs" / "quadrics"
    golden = [
        (["verify", "--config", str(ROOT / "configs" / "verify_scalar.json")], 0),
        (["verify", "--input", str(quad / "scalar.json"), "--a", "0.1", "--tol", "attachment=1e-40"], 1),
        (["solve-x", "--input", str(quad / "scalar.json"), "--a", "0.5", "--b0", "1"], 1),
        (["verify", "--input", str(quad / "split2.json"), "--V", "1,2,3"], 2),
        (["verify"], 2),
    ]
    codes = [main(argv) == want for argv, want in golden]
    capsys.readouterr()
    record(10, "CLI determinism", {
        "byte-identical configs": (all(same) and len(same) >= 10, f"{sum(same)}/{len(same)}"),
        "exit-code goldens": (all(codes), f"{sum(codes)}/{len(codes)}"),
    })
