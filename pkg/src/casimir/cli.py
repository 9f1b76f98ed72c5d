"""Command-line entry point: identity verification suites, energy sweeps
and the dissipative-cavity toy.

    casimir verify|plane|sphere|toy-dos [--config FILE] [--seed N]
            [--out PATH] [--format csv|json] [--trials N] [--lmax N]
            [--quad-order N]

Configuration comes from a single JSON file; command-line flags win over
file values. Exit codes: 0 success, 1 identity/agreement failure,
2 config error, 3 convergence failure. The environment variable
CASIMIR_THREADS caps worker parallelism across sweep points (0 = auto,
unset = sequential).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import blockmat, scattering, toy
from .core import C_LIGHT, HBAR, QuadratureSpec
from .errors import CasimirError, NotConverged, NotUnitary
from .materials import material_from_dict
from .plane import PlaneSystem, energy_per_area, ideal_energy_per_area
from .scattering import ScatteringMatrix
from .sphere import SphereSystem, sphere_energy

FMT = "%.17g"


def _load_config(path):
    if path is None:
        return {}
    with open(path) as fh:
        return json.load(fh)


def _quad_from(cfg, args):
    q = dict(cfg.get("quad", {}))
    if args.quad_order is not None:
        q["base_order"] = args.quad_order
    return QuadratureSpec(
        base_order=int(q.get("base_order", 64)),
        max_doublings=int(q.get("max_doublings", 6)),
        tol=float(q.get("tol", 1e-8)),
    )


def _sweep_from(cfg, default_min=1e-7, default_max=1e-6):
    sw = cfg.get("sweep", {})
    lmin = float(sw.get("L_min", default_min))
    lmax = float(sw.get("L_max", default_max))
    points = int(sw.get("points", 5))
    spacing = sw.get("spacing", "log")
    if lmin <= 0 or lmax <= lmin and points > 1:
        raise ValueError("sweep bounds must satisfy 0 < L_min < L_max")
    if points < 1:
        raise ValueError("sweep needs at least one point")
    if points == 1:
        return np.array([lmin])
    if spacing == "log":
        return np.geomspace(lmin, lmax, points)
    if spacing == "linear":
        return np.linspace(lmin, lmax, points)
    raise ValueError(f"unknown spacing {spacing!r}")


def _worker_count():
    raw = os.environ.get("CASIMIR_THREADS")
    if raw is None:
        return 1
    n = int(raw)
    return os.cpu_count() or 1 if n == 0 else max(1, n)


def _map_points(fn, points):
    workers = _worker_count()
    if workers <= 1:
        return [fn(p) for p in points]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, points))


def _emit(args, payload, columns, rows):
    """Write CSV or JSON output deterministically (17 significant digits)."""
    if args.format == "csv":
        lines = [",".join(columns)]
        for row in rows:
            lines.append(",".join(FMT % v if isinstance(v, float) else str(v) for v in row))
        text = "\n".join(lines) + "\n"
    else:
        payload = dict(payload)
        payload["rows"] = [
            {c: (FMT % v if isinstance(v, float) else v) for c, v in zip(columns, row)}
            for row in rows
        ]
        text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def _haar_scatterer(n_int, n_ext, seed):
    return ScatteringMatrix.from_full(blockmat.random_unitary(n_int + n_ext, seed), n_int)


def _identity_suite(trials, seed, corrupt=False):
    """Run every determinant/unitarity identity over random fixtures.

    Returns a list of (name, max_residual, threshold) entries; raises
    NotUnitary if a corrupted fixture slips in (negative control hook).
    """
    rng = np.random.default_rng(seed)
    seeds = rng.integers(0, 2**31 - 1, size=trials * 8)
    results = []

    def record(name, residuals, threshold):
        results.append((name, float(np.max(residuals)), threshold))

    res = []
    for k in range(trials):
        u = blockmat.random_unitary(2 + int(seeds[k] % 7), int(seeds[k]))
        res.append(blockmat.unitarity_defect(u))
    record("haar_unitarity", res, 1e-12)

    res = []
    for k in range(trials):
        n = 2 + int(seeds[k] % 15)
        u = blockmat.random_unitary(n, int(seeds[k + trials]))
        half = n // 2 or 1
        m = blockmat.Block2x2.split(u, half)
        ld = blockmat.logdet(u)
        via_a = blockmat.logdet(m.A) + blockmat.logdet(blockmat.schur_complement(m, "A"))
        via_d = blockmat.logdet(m.D) + blockmat.logdet(blockmat.schur_complement(m, "D"))
        res.append(abs(1 - np.exp(via_a - ld)))
        res.append(abs(1 - np.exp(via_d - ld)))
    record("schur_det_split", res, 1e-10)

    res = []
    for k in range(trials):
        n = 2 + int(seeds[k] % 15)
        u = blockmat.Block2x2.split(blockmat.random_unitary(2 * n, int(seeds[k + 2 * trials])), n)
        res.append(
            blockmat.matrix_det_lemma_residual(
                u.A, u.B, blockmat.random_unitary(n, int(seeds[k]) + 1), u.C
            )
        )
    record("matrix_det_lemma", res, 1e-10)

    res_det, res_off = [], []
    for k in range(trials):
        n = 2 + int(seeds[k] % 15)
        u = blockmat.random_unitary(n, int(seeds[k + 3 * trials]))
        if corrupt and k == trials // 2:
            u = u * 1.001  # deliberately broken fixture (test hook)
        rep = blockmat.unitary_block_relations(blockmat.Block2x2.split(u, n // 2 or 1))
        res_det.append(rep["det_ratio_residual"])
        res_off.append(rep["offdiag_residual"])
    record("unitary_block_det", res_det, 1e-10)
    record("unitary_block_offdiag", res_off, 1e-10)

    res_uni, res_det15, res_mod = [], [], []
    for k in range(trials):
        n_int = 1 + int(seeds[k] % 4)
        s1 = _haar_scatterer(n_int, 1 + int(seeds[k] % 4), int(seeds[k + 4 * trials]))
        s2 = _haar_scatterer(n_int, 1 + int(seeds[k + trials] % 4), int(seeds[k + 5 * trials]))
        out = scattering.star(s1, s2)
        res_uni.append(out.unitarity_defect())
        res_det15.append(scattering.det_composition_residual(s1, s2))
        res_mod.append(abs(abs(np.exp(blockmat.logdet(out.ee))) - 1))
    record("star_unitarity", res_uni, 1e-9)
    record("det_composition", res_det15, 1e-9)
    record("det_modulus", res_mod, 1e-10)

    res = []
    for k in range(trials):
        n_int = 1 + k % 4
        s1 = _haar_scatterer(n_int, 2, int(seeds[k + 6 * trials]))
        s2 = _haar_scatterer(n_int, 2, int(seeds[k + 7 * trials]))
        res.append(abs(scattering.alpha_phase(s1, s2) - (-1) ** n_int))
    record("alpha_sign", res, 1e-10)

    res_syl, res_series = [], []
    for k in range(trials):
        a = blockmat.random_contraction(4, int(seeds[k]))
        b = blockmat.random_contraction(4, int(seeds[k + trials]))
        rt = scattering.round_trip(a, b)
        res_syl.append(abs(1 - np.exp(blockmat.logdet(rt.D12) - blockmat.logdet(rt.D21))))
        series = scattering.round_trip_series(a, b, 80)
        res_series.append(float(np.max(np.abs(series - rt.D12))))
    record("sylvester", res_syl, 1e-10)
    record("round_trip_series", res_series, 1e-8)

    res = []
    for k in range(trials):
        n = 2
        s1 = ScatteringMatrix.from_full(
            blockmat.unitary_dilation(blockmat.random_contraction(2 * n, int(seeds[k]))), n
        )
        s2 = ScatteringMatrix.from_full(
            blockmat.unitary_dilation(blockmat.random_contraction(2 * n, int(seeds[k + trials]))), n
        )
        sl = scattering.translation_scatterer(blockmat.random_contraction(n, int(seeds[k + 2 * trials])))
        res.append(scattering.chain3_factorization_residual(s1, sl, s2))
    record("chain3_factorization", res, 1e-9)

    res_u, res_top = [], []
    for k in range(trials):
        kk = blockmat.random_contraction(3, int(seeds[k + 5 * trials]))
        u = blockmat.unitary_dilation(kk)
        res_u.append(blockmat.unitarity_defect(u))
        res_top.append(float(np.max(np.abs(u[:3, :3] - kk))))
    record("dilation_unitarity", res_u, 1e-10)
    record("dilation_topleft", res_top, 0.0)

    return results


def cmd_verify(args, cfg):
    trials = args.trials if args.trials is not None else int(cfg.get("trials", 50))
    seed = args.seed if args.seed is not None else int(cfg.get("seed", 42))
    try:
        results = _identity_suite(trials, seed, corrupt=args.corrupt)
    except NotUnitary as exc:
        print(f"FAIL NotUnitary: {exc}", file=sys.stderr)
        return 1
    columns = ["identity", "max_residual", "threshold", "status"]
    rows = []
    ok = True
    for name, residual, threshold in results:
        passed = residual <= threshold
        ok &= passed
        rows.append([name, residual, threshold, "PASS" if passed else "FAIL"])
        print(f"{name:24s} {residual:12.3e}  (< {threshold:.0e})  "
              f"{'PASS' if passed else 'FAIL'}")
    if args.out:
        _emit(args, {"config_echo": cfg, "warnings": []}, columns, rows)
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# plane / sphere sweeps
# ---------------------------------------------------------------------------

def cmd_plane(args, cfg):
    mat1 = material_from_dict(cfg.get("material1", "perfect_mirror"))
    mat2 = material_from_dict(cfg.get("material2", "perfect_mirror"))
    medium = material_from_dict(cfg.get("medium", "vacuum"))
    quad = _quad_from(cfg, args)
    lengths = _sweep_from(cfg)
    warnings = []
    failed = False

    def point(L):
        sys_ = PlaneSystem(mat1, mat2, medium, float(L))
        try:
            res = energy_per_area(sys_, quad)
            flag = ""
        except NotConverged as exc:
            res = exc.result
            flag = "not_converged"
        ideal = float(ideal_energy_per_area(L))
        return [float(L), res.value, res.value / ideal, res.error_estimate, flag]

    rows = _map_points(point, lengths)
    for row in rows:
        if row[-1]:
            failed = True
            warnings.append(f"L={row[0]:.3e}: {row[-1]}")
    columns = ["L", "energy_per_area", "ratio_to_ideal", "error_estimate", "flag"]
    _emit(args, {"config_echo": cfg, "warnings": warnings}, columns, rows)
    return 3 if failed else 0


def cmd_sphere(args, cfg):
    sph = cfg.get("sphere", {})
    mat1 = material_from_dict(cfg.get("material1", "perfect_mirror"))
    mat2 = material_from_dict(cfg.get("material2", "perfect_mirror"))
    r1 = float(sph.get("R1", 1e-7))
    r2 = float(sph.get("R2", 1e-7))
    lmax = args.lmax if args.lmax is not None else sph.get("lmax")
    quad = _quad_from(cfg, args)
    # default sweep must respect L > R1 + R2
    lengths = _sweep_from(cfg, default_min=4 * (r1 + r2), default_max=20 * (r1 + r2))
    warnings = []
    failed = False

    def point(L):
        sys_ = SphereSystem(
            R1=r1, R2=r2, L=float(L), mat1=mat1, mat2=mat2,
            lmax=int(lmax) if lmax is not None else None,
        )
        try:
            res = sphere_energy(sys_, quad)
            flag = ""
        except NotConverged as exc:
            res = exc.result
            flag = "not_converged"
        return [float(L), res.value, res.metadata.get("lmax", 0), res.error_estimate, flag]

    rows = _map_points(point, lengths)
    for row in rows:
        if row[-1]:
            failed = True
            warnings.append(f"L={row[0]:.3e}: {row[-1]}")
    columns = ["L", "energy", "lmax_used", "error_estimate", "flag"]
    _emit(args, {"config_echo": cfg, "warnings": warnings}, columns, rows)
    return 3 if failed else 0


# ---------------------------------------------------------------------------
# toy-dos
# ---------------------------------------------------------------------------

def cmd_toy_dos(args, cfg):
    tcfg = cfg.get("toy", {})
    L = float(tcfg.get("L", 1e-6))
    r = float(tcfg.get("r", 0.9))
    t = float(tcfg.get("t", 0.3))
    band = tcfg.get("band", [0.5, 8.0])
    scale = C_LIGHT / L
    res = toy.band_energies(L, r, t, (band[0] * scale, band[1] * scale))
    e_phase, e_dos = res["phase_route"], res["dos_route"]
    denom = max(abs(e_phase), abs(e_dos), 1e-300)
    rel = abs(e_phase - e_dos) / denom
    # absolute floor: quadrature noise far below hbar times the band width
    zero_floor = 1e-9 * HBAR * (band[1] - band[0]) * scale
    agree = rel < 1e-6 or max(abs(e_phase), abs(e_dos)) < zero_floor
    columns = ["omega", "dphi", "deta"]
    rows = [[w, p, d] for w, p, d in res["rows"]]
    payload = {
        "config_echo": cfg,
        "warnings": [],
        "summary": {
            "phase_route_energy": FMT % e_phase,
            "dos_route_energy": FMT % e_dos,
            "relative_difference": FMT % rel,
        },
    }
    _emit(args, payload, columns, rows)
    print(f"phase-route energy: {e_phase: .12e} J", file=sys.stderr)
    print(f"dos-route energy:   {e_dos: .12e} J", file=sys.stderr)
    print(f"relative difference: {rel:.3e}", file=sys.stderr)
    return 0 if agree else 1


def build_parser():
    parser = argparse.ArgumentParser(
        prog="casimir",
        description="Scattering-matrix Casimir energies with explicit dissipation channels.",
        epilog=(
            "CSV columns: verify(identity,max_residual,threshold,status) "
            "plane(L,energy_per_area,ratio_to_ideal,error_estimate,flag) "
            "sphere(L,energy,lmax_used,error_estimate,flag) "
            "toy-dos(omega,dphi,deta). Numbers carry 17 significant digits."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in (
        ("verify", cmd_verify),
        ("plane", cmd_plane),
        ("sphere", cmd_sphere),
        ("toy-dos", cmd_toy_dos),
    ):
        p = sub.add_parser(name)
        p.add_argument("--config", default=None, help="JSON config file")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", default=None, help="output path (default stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--trials", type=int, default=None)
        p.add_argument("--lmax", type=int, default=None)
        p.add_argument("--quad-order", type=int, default=None)
        if name == "verify":
            p.add_argument("--corrupt", action="store_true", help=argparse.SUPPRESS)
        p.set_defaults(func=fn)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _load_config(args.config)
        if not isinstance(cfg, dict):
            raise ValueError("config must be a JSON object")
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        return args.func(args, cfg)
    except (ValueError, KeyError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NotConverged as exc:
        print(f"convergence failure: {exc}", file=sys.stderr)
        return 3
    except CasimirError as exc:
        print(f"failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
