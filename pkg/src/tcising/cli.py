"""Reproducible experiment runner.

Subcommands
-----------
ground-scan   minimize the ground energy over charge sectors on a coupling grid
quench        unitary time evolution of a classical initial state
trajectories  Monte-Carlo unraveling with cavity/atom losses + post-selection
validate      quick oracle suite (basis counts, propagator, trajectries, rates)

Run configs are flat INI files (sections in square brackets, key = value);
energies in units of V, times in units of 1/V.  Unknown sections or keys are
rejected.  Every output CSV is paired with a JSON metadata record carrying
the resolved config, the package version, and the theory predictions for
the run, so a results directory is self-describing.

Exit codes: 0 ok, 2 config error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import configparser
import dataclasses
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .basis import charge_of, enumerate_band, enumerate_sector, full_space
from .errors import ConfigError, TCIsingError
from .dynamics import (
    evolve,
    first_order_jumps,
    ground_scan,
    lindblad_dense,
    trajectories,
)
from .measures import (
    ObservableSpec,
    charge as charge_expect,
    make_evaluator,
    observable_indices,
    photon_number,
    postselect,
    top_fock_population,
)
from .model import (
    BOUNDARY_PINNED,
    LossRates,
    ModelParams,
    build_hamiltonian,
    build_jump_operators,
)
from .runio import (
    fmt,
    write_meta,
    write_scan_csv,
    write_snapshots,
    write_timeseries,
)
from .states import (
    InitialStateSpec,
    classical_bits,
    count_domain_walls,
    make_state,
    string_to_bits,
)
from .theory import rates as theory_rates, two_level


# -- config schema -------------------------------------------------------------

_REQUIRED = object()


def _parse_float_list(text):
    return [float(x) for x in text.replace(",", " ").split()]


def _parse_int_list(text):
    return [int(x) for x in text.replace(",", " ").split()]


def _parse_grid(text):
    """Either an explicit list '0.5, 1.0, ...' or a range 'start:stop:count'."""
    if ":" in text:
        lo, hi, num = text.split(":")
        return list(np.linspace(float(lo), float(hi), int(num)))
    return _parse_float_list(text)


def _parse_pairs(text):
    """'1:4, 2:7' -> [(1, 4), (2, 7)]."""
    out = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        i, j = chunk.split(":")
        out.append((int(i), int(j)))
    return out


_SCHEMA = {
    "model": {
        "n": (int, _REQUIRED),
        "v": (float, 1.0),
        "delta": (float, 0.0),
        "h_z": (float, 0.0),
        "g": (float, 0.0),
        "lambda": (float, 0.0),
        "h_x": (float, 0.0),
        "range": (str, "nearest"),
        "boundary": (str, "none"),
        "n_max": (int, 0),
    },
    "initial": {
        "kind": (str, "afm"),
        "position": (int, None),
        "r0": (int, None),
        "n_ph0": (int, 0),
        "custom_bits": (str, None),
    },
    "losses": {
        "kappa": (float, 0.0),
        "gamma_at": (float, 0.0),
    },
    "schedule": {
        "t_max": (float, None),
        "n_save": (int, 101),
        "n_traj": (int, 500),
        "seed": (int, 1),
        "tol": (float, 1e-8),
        "n_snapshot_times": (int, 0),
        "snapshot_times": (_parse_float_list, None),
        "snapshots_per_trajectory": (int, 1),
    },
    "observables": {
        "kinds": (lambda s: [x.strip() for x in s.split(",") if x.strip()],
                  ["n_ph", "charge"]),
        "string_w": (_parse_pairs, []),
        "entropy_cuts": (_parse_int_list, []),
        "mutual_info_cuts": (_parse_int_list, []),
    },
    "sector": {
        "q": (str, "auto"),
        "band_floor": (str, "auto"),
    },
    "postselect": {
        "enabled": (lambda s: s.lower() in ("1", "true", "yes"), True),
        "max_dw": (str, "auto"),
    },
    "scan": {
        "h_z": (_parse_grid, None),
        "g_collective": (_parse_grid, None),
        "q_min": (int, 0),
        "q_max": (int, None),
    },
    "output": {
        "directory": (str, "runs"),
        "tag": (str, "run"),
    },
}


@dataclass
class RunConfig:
    model: ModelParams
    initial: InitialStateSpec
    losses: LossRates
    raw: dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.raw[key]


def parse_config(path) -> RunConfig:
    """Read and validate an INI run config; unknown keys are errors."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        found = parser.read(path)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from exc
    if not found:
        raise ConfigError(f"config file not found: {path}")
    raw: dict = {}
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown config section [{section}]")
        raw[section] = {}
        for key, text in parser[section].items():
            if key not in _SCHEMA[section]:
                raise ConfigError(f"unknown key '{key}' in section [{section}]")
            conv, _default = _SCHEMA[section][key]
            try:
                raw[section][key] = conv(text)
            except (ValueError, TypeError) as exc:
                raise ConfigError(
                    f"bad value for [{section}] {key} = {text!r}: {exc}"
                ) from exc
    # defaults
    for section, keys in _SCHEMA.items():
        raw.setdefault(section, {})
        for key, (_conv, default) in keys.items():
            if key not in raw[section]:
                if default is _REQUIRED:
                    raise ConfigError(f"missing required key [{section}] {key}")
                raw[section][key] = default

    m = raw["model"]
    try:
        model = ModelParams(
            N=m["n"], delta=m["delta"], h_z=m["h_z"], V=m["v"], g=m["g"],
            lam=m["lambda"], range=m["range"], boundary_field=m["boundary"],
            h_x=m["h_x"], n_max=m["n_max"],
        )
        ini = raw["initial"]
        custom = ini["custom_bits"]
        initial = InitialStateSpec(
            kind=ini["kind"], position=ini["position"], r0=ini["r0"],
            n_ph0=ini["n_ph0"],
            custom_bits=string_to_bits(custom) if custom is not None else None,
            h_z=model.h_z, pinned=model.boundary_field == BOUNDARY_PINNED,
        )
        losses = LossRates(kappa=raw["losses"]["kappa"],
                           gamma_at=raw["losses"]["gamma_at"])
    except (ValueError, TCIsingError) as exc:
        raise ConfigError(str(exc)) from exc
    return RunConfig(model=model, initial=initial, losses=losses, raw=raw)


def _observable_specs(cfg: RunConfig) -> list[ObservableSpec]:
    obs = cfg["observables"]
    specs = [ObservableSpec(kind) for kind in obs["kinds"]]
    specs += [ObservableSpec("string_w", pair) for pair in obs["string_w"]]
    if obs["entropy_cuts"]:
        specs.append(ObservableSpec("entropy_cut", tuple(obs["entropy_cuts"])))
    if obs["mutual_info_cuts"]:
        specs.append(ObservableSpec("mutual_info", tuple(obs["mutual_info_cuts"])))
    if not specs:
        raise ConfigError("no observables requested")
    return specs


def _label(spec: ObservableSpec) -> str:
    # cut-argument observables carry the cut in the CSV index column
    if spec.kind == "string_w":
        return f"string_w_{spec.args[0]}_{spec.args[1]}"
    return spec.kind


def _resolve_sector(cfg: RunConfig) -> int:
    q_text = cfg["sector"]["q"]
    if q_text != "auto":
        return int(q_text)
    bits = classical_bits(cfg.initial, cfg.model.N)
    return charge_of((cfg.initial.n_ph0, bits))


def _theory_block(p: ModelParams) -> dict:
    block = {
        "rates": {
            r.name: {"value": r.value, "validity": r.validity}
            for r in theory_rates(p)
        },
    }
    if p.g != 0.0:
        tl = two_level(p)
        block["two_level"] = {
            "matrix": tl.matrix,
            "omega_rabi": tl.omega_rabi,
            "amplitude_bound": tl.amplitude_bound,
            "n_odd": tl.n_odd,
            "detuning": tl.detuning,
        }
    return block


def _base_meta(cfg: RunConfig, basis, extra: dict) -> dict:
    meta = {
        "version": __version__,
        "config": cfg.raw,
        "basis": {
            "dim": basis.dim,
            "charges": list(basis.charges) if basis.charges else "full",
            "n_max": basis.n_max,
            "N": basis.N,
        },
        "theory": _theory_block(cfg.model),
    }
    meta.update(extra)
    return meta


def _time_grid(cfg: RunConfig):
    sched = cfg["schedule"]
    if sched["t_max"] is None:
        raise ConfigError("missing required key [schedule] t_max")
    return np.linspace(0.0, sched["t_max"], sched["n_save"])


# -- subcommands -----------------------------------------------------------------


def cmd_quench(cfg: RunConfig, out_dir: Path, tag: str) -> dict:
    p = cfg.model
    if cfg.losses.kappa != 0 or cfg.losses.gamma_at != 0:
        raise ConfigError("quench runs are lossless; use the trajectories command")
    if p.h_x != 0.0:
        basis = full_space(p.N, p.n_max)
    else:
        basis = enumerate_sector(p.N, _resolve_sector(cfg), p.n_max)
    H = build_hamiltonian(p, basis)
    psi0 = make_state(cfg.initial, basis)
    t_grid = _time_grid(cfg)
    states = evolve(H, psi0, t_grid, tol=cfg["schedule"]["tol"])

    pinned = p.boundary_field == BOUNDARY_PINNED
    specs = _observable_specs(cfg)
    rows = []
    top_fock = 0.0
    for st in states:
        top_fock = max(top_fock, top_fock_population(st))
        for spec in specs:
            vals = np.atleast_1d(make_evaluator(spec, pinned)(st))
            for idx, v in zip(observable_indices(spec, p.N, pinned), vals):
                rows.append((st.t, _label(spec), idx, v))
    csv_path = out_dir / f"{tag}_timeseries.csv"
    write_timeseries(csv_path, rows)
    meta = _base_meta(cfg, basis, {
        "command": "quench",
        "validity": {
            "overflow_count": H.overflow_count,
            "top_fock_population_max": top_fock,
            "norm_final": states[-1].norm(),
        },
        "outputs": {"timeseries": csv_path.name},
    })
    write_meta(out_dir / f"{tag}_meta.json", meta)
    return meta


def _auto_band_floor(q0: int, p: ModelParams, losses: LossRates, t_max: float) -> int:
    expected = (2 * losses.kappa + p.N * losses.gamma_at) * t_max * 2.0
    return max(0, q0 - math.ceil(expected))


def cmd_trajectories(cfg: RunConfig, out_dir: Path, tag: str,
                     n_threads: int = 1) -> dict:
    p = cfg.model
    sched = cfg["schedule"]
    t_grid = _time_grid(cfg)
    q0 = _resolve_sector(cfg)
    floor_text = cfg["sector"]["band_floor"]
    floor = (
        _auto_band_floor(q0, p, cfg.losses, float(t_grid[-1]))
        if floor_text == "auto" else int(floor_text)
    )
    basis = enumerate_band(p.N, floor, q0, p.n_max)
    H = build_hamiltonian(p, basis)
    jumps = build_jump_operators(p, cfg.losses, basis)
    psi0 = make_state(cfg.initial, basis)

    pinned = p.boundary_field == BOUNDARY_PINNED
    specs = _observable_specs(cfg)
    evals = {_label(s): make_evaluator(s, pinned) for s in specs}
    indices = {_label(s): observable_indices(s, p.N, pinned) for s in specs}

    snapshot_times = sched["snapshot_times"]
    if snapshot_times is None:
        k = sched["n_snapshot_times"]
        if k > 0:
            picks = np.unique(np.linspace(0, t_grid.size - 1, k).astype(int))
            snapshot_times = [float(t_grid[i]) for i in picks]
        else:
            snapshot_times = []

    ens = trajectories(
        H, jumps, psi0, t_grid, n_traj=sched["n_traj"], seed0=sched["seed"],
        observables=evals, snapshot_times=snapshot_times,
        snapshots_per_trajectory=sched["snapshots_per_trajectory"],
        n_threads=n_threads,
    )

    rows = []
    for label in evals:
        tr = ens.traces[label]
        for k, t in enumerate(ens.times):
            for i, idx in enumerate(indices[label]):
                rows.append((t, label, idx, tr.mean[k, i], tr.stderr[k, i]))
    rows.sort(key=lambda r: (r[0], r[1], str(r[2])))
    csv_path = out_dir / f"{tag}_timeseries.csv"
    write_timeseries(csv_path, rows, with_stderr=True)

    outputs = {"timeseries": csv_path.name}
    ps_summary = {}
    if snapshot_times:
        snap_path = out_dir / f"{tag}_snapshots.txt"
        write_snapshots(snap_path, ens.snapshots, p.N)
        outputs["snapshots"] = snap_path.name
        if cfg["postselect"]["enabled"]:
            max_dw_text = cfg["postselect"]["max_dw"]
            bits0 = classical_bits(cfg.initial, p.N)
            max_dw = (
                sum(count_domain_walls(bits0, p.N, pinned))
                if max_dw_text == "auto" else int(max_dw_text)
            )
            res = postselect(ens.snapshots, max_dw, p.N, pinned)
            ps_rows = []
            for k, t in enumerate(res.times):
                ps_rows.append((t, "acceptance_fraction", "", res.fraction[k],
                                np.sqrt(max(res.fraction[k] * (1 - res.fraction[k]), 0.0)
                                        / max(res.n_total[k], 1))))
                for i, b in enumerate(res.bonds):
                    ps_rows.append((t, "ps_dw_a", b, res.density_a[k, i],
                                    res.stderr_a[k, i]))
                    ps_rows.append((t, "ps_dw_b", b, res.density_b[k, i],
                                    res.stderr_b[k, i]))
            ps_path = out_dir / f"{tag}_postselect.csv"
            write_timeseries(ps_path, ps_rows, with_stderr=True)
            outputs["postselect"] = ps_path.name
            ps_summary = {
                "max_dw": max_dw,
                "accepted": res.n_accepted,
                "total": res.n_total,
                "empty_times": res.empty_times,
            }

    meta = _base_meta(cfg, basis, {
        "command": "trajectories",
        "n_traj": sched["n_traj"],
        "seed": sched["seed"],
        "band_floor": floor,
        "leaked_probability": ens.leaked_probability,
        "validity": {"overflow_count": H.overflow_count},
        "postselection": ps_summary,
        "outputs": outputs,
    })
    write_meta(out_dir / f"{tag}_meta.json", meta)
    return meta


def cmd_ground_scan(cfg: RunConfig, out_dir: Path, tag: str) -> dict:
    p = cfg.model
    scan = cfg["scan"]
    if scan["g_collective"] is None:
        raise ConfigError("missing required key [scan] g_collective")
    hz_values = scan["h_z"] if scan["h_z"] is not None else [p.h_z]
    q_max = scan["q_max"] if scan["q_max"] is not None else p.N + p.n_max
    q_range = range(scan["q_min"], q_max + 1)
    rows = []
    jumps_meta = {}
    for hz in hz_values:
        grid = [
            dataclasses.replace(p, h_z=hz, g=G / math.sqrt(p.N))
            for G in scan["g_collective"]
        ]
        points = ground_scan(grid, q_range)
        n_ph_line = [pt.n_ph for pt in points]
        q_line = [pt.q_star for pt in points]
        for G, pt in zip(scan["g_collective"], points):
            rows.append((hz, G, pt.params.g, pt.q_star, pt.energy, pt.n_ph))
        jumps_meta[fmt(hz)] = {
            "jump_indices": first_order_jumps(n_ph_line, labels=q_line),
            "g_collective": list(scan["g_collective"]),
            "q_ceiling_hit": max(q_line) == max(q_range),
        }
    csv_path = out_dir / f"{tag}_scan.csv"
    write_scan_csv(csv_path, rows)
    meta = {
        "version": __version__,
        "command": "ground-scan",
        "config": cfg.raw,
        "first_order_jumps": jumps_meta,
        "outputs": {"scan": csv_path.name},
    }
    write_meta(out_dir / f"{tag}_meta.json", meta)
    return meta


def cmd_validate() -> int:
    """Quick oracle suite; prints one pass/fail line per check."""
    import itertools

    failures = 0

    def report(name, ok, detail):
        nonlocal failures
        print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
        failures += 0 if ok else 1

    # sector combinatorics against exhaustive filtering
    worst = None
    for N, n_max in itertools.product(range(2, 7), range(0, 3)):
        for q in range(0, N + n_max + 1):
            dim = enumerate_sector(N, q, n_max).dim
            brute = sum(
                1 for n in range(n_max + 1) for s in range(1 << N)
                if n + bin(s).count("1") == q
            )
            if dim != brute:
                worst = (N, n_max, q, dim, brute)
    report("sector-counts", worst is None,
           "exhaustive agreement N<=6" if worst is None else f"mismatch {worst}")

    # Krylov propagator against the dense exponential
    import scipy.linalg as sla

    p = ModelParams(N=6, delta=0.8, h_z=0.2, V=1.0, g=0.2, n_max=2)
    basis = enumerate_sector(6, 3, 2)
    H = build_hamiltonian(p, basis)
    psi0 = make_state(InitialStateSpec("afm", h_z=0.2), basis)
    t = 7.0
    krylov = evolve(H, psi0, [0.0, t], tol=1e-10)[-1].amps
    exact = sla.expm(-1j * H.dense() * t) @ psi0.amps
    err = float(np.linalg.norm(krylov - exact))
    report("krylov-vs-dense", err < 1e-8, f"|diff| = {err:.2e}")

    # trajectory ensemble against the dense master equation
    p3 = ModelParams(N=3, delta=0.5, V=1.0, g=0.12, n_max=2)
    band = enumerate_band(3, 0, 2, 2)
    H3 = build_hamiltonian(p3, band)
    jumps = build_jump_operators(p3, LossRates(kappa=0.05, gamma_at=0.02), band)
    psi3 = make_state(InitialStateSpec("afm"), band)
    t_grid = np.linspace(0.0, 12.0, 5)
    ens = trajectories(
        H3, jumps, psi3, t_grid, n_traj=400, seed0=7,
        observables={"n_ph": lambda st: np.array([photon_number(st)])},
    )
    rhos = lindblad_dense(H3, jumps, psi3, t_grid)
    dev = 0.0
    for k, rho in enumerate(rhos):
        n_exact = float(np.dot(np.diag(rho).real, band.n_ph))
        se = max(float(ens.traces["n_ph"].stderr[k, 0]), 1e-12)
        dev = max(dev, abs(float(ens.traces["n_ph"].mean[k, 0]) - n_exact) / se)
    report("trajectories-vs-lindblad", dev < 8.0, f"max deviation {dev:.2f} sigma")

    # rate-formula identity and charge conservation
    pr = ModelParams(N=8, delta=0.9, V=1.0, g=0.11, n_max=1)
    table = {r.name: r.value for r in theory_rates(pr)}
    ok = abs(table["J_B"] / table["J_A"] - pr.delta / (pr.delta + 4 * pr.V)) < 1e-12
    report("rate-identity", ok, "J_B/J_A = delta/(delta+4V)")

    psi_c = make_state(InitialStateSpec("afm"), basis)
    out = evolve(H, psi_c, np.linspace(0.0, 30.0, 4), tol=1e-12)
    drift = max(abs(charge_expect(st) - 3.0) for st in out)
    report("charge-conservation", drift < 1e-8, f"max drift {drift:.2e}")

    return failures


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="tcising",
        description="Exact-diagonalization runner for the cavity-coupled chain",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("ground-scan", "quench", "trajectories"):
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True)
        sp.add_argument("--out", default=None)
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--threads", type=int, default=1)
        sp.add_argument("--tag", default=None)
    sub.add_parser("validate")

    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0

    if args.command == "validate":
        try:
            failures = cmd_validate()
        except TCIsingError as exc:
            print(f"[FAIL] validation aborted: {exc}", file=sys.stderr)
            return 3
        return 0 if failures == 0 else 3

    try:
        cfg = parse_config(args.config)
        if args.seed is not None:
            cfg.raw["schedule"]["seed"] = args.seed
        out_dir = Path(args.out or cfg["output"]["directory"])
        tag = args.tag or cfg["output"]["tag"]
        out_dir.mkdir(parents=True, exist_ok=True)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    try:
        if args.command == "quench":
            cmd_quench(cfg, out_dir, tag)
        elif args.command == "trajectories":
            cmd_trajectories(cfg, out_dir, tag, n_threads=args.threads)
        elif args.command == "ground-scan":
            cmd_ground_scan(cfg, out_dir, tag)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except TCIsingError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
