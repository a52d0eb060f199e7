"""Single-point evaluation and parameter sweeps.

Sweep output is deterministic: rows are emitted in row-major axis order
with round-trip float formatting, metadata excludes anything
machine- or schedule-dependent, and every point is evaluated in a
spawned single-threaded worker process regardless of the worker count,
so the same sweep produces byte-identical files with 1 or 8 workers.
Completed points are journaled as JSON lines next to the output file;
an interrupted sweep picks up where it left off with ``resume=True``.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, replace
from multiprocessing import get_context
from pathlib import Path

import numpy as np

from . import observables, phasespace, redfield
from .configfile import SweepSpec, config_from_dict, config_to_dict
from .model import ModelConfig

VERSION = "0.1.0"

ADAPTIVE_START = 20
ADAPTIVE_STEP = 10
ADAPTIVE_CAP = 80
ADAPTIVE_TAIL_TOL = 1e-6
ADAPTIVE_DRIFT_TOL = 0.01

_BASE_COLUMNS = ("status", "n_cut", "residual", "min_eig")
_GROUP_COLUMNS = {
    "transport": ("current_L", "current_R"),
    "thermo": (
        "occupation", "phonon_number",
        "heat_el_L", "heat_el_R", "heat_mec_L", "heat_mec_R",
        "heat_tot_L", "heat_tot_R",
        "power", "zeta", "first_law_residual",
    ),
    "phasespace": ("torotropy", "ergotropy", "alpha_c_re", "alpha_c_im", "barycenter_gap"),
    "mode": ("mode", "eta_converter", "eta_heater"),
}


def apply_axis(config: ModelConfig, name: str, value: float) -> ModelConfig:
    if name == "mu_tilde":
        return replace(config, system=replace(config.system, mu_tilde=value))
    if name == "lam":
        return replace(config, system=replace(config.system, lam=value))
    if name == "delta_mu":
        return config.with_bias(value)
    raise ValueError(f"unknown sweep axis {name!r}")


@dataclass
class PointResult:
    """Everything computed at one operating point, plus solve diagnostics."""

    status: str
    n_cut: int
    residual: float
    min_eig: float
    report: observables.ThermoReport | None = None
    torotropy: phasespace.TorotropyResult | None = None
    ergotropy: float | None = None
    polaron_state: redfield.BlockDensityMatrix | None = None
    lab_state: redfield.BlockDensityMatrix | None = None

    def row(self, outputs: tuple[str, ...]) -> dict:
        nan = float("nan")
        row = {
            "status": self.status,
            "n_cut": self.n_cut,
            "residual": self.residual,
            "min_eig": self.min_eig,
        }
        rep = self.report
        tq = self.torotropy
        if "transport" in outputs:
            row["current_L"] = rep.current_l if rep else nan
            row["current_R"] = rep.current_r if rep else nan
        if "thermo" in outputs:
            row["occupation"] = rep.occupation if rep else nan
            row["phonon_number"] = rep.phonon_number if rep else nan
            row["heat_el_L"] = rep.heat_el_l if rep else nan
            row["heat_el_R"] = rep.heat_el_r if rep else nan
            row["heat_mec_L"] = rep.heat_mec_l if rep else nan
            row["heat_mec_R"] = rep.heat_mec_r if rep else nan
            row["heat_tot_L"] = rep.heat_total_l if rep else nan
            row["heat_tot_R"] = rep.heat_total_r if rep else nan
            row["power"] = rep.power if rep else nan
            row["zeta"] = rep.zeta if rep else nan
            row["first_law_residual"] = rep.first_law_residual if rep else nan
        if "phasespace" in outputs:
            row["torotropy"] = tq.value if tq else nan
            row["ergotropy"] = self.ergotropy if self.ergotropy is not None else nan
            row["alpha_c_re"] = tq.barycenter.real if tq else nan
            row["alpha_c_im"] = tq.barycenter.imag if tq else nan
            row["barycenter_gap"] = abs(tq.barycenter - tq.anchor) if tq else nan
        if "mode" in outputs:
            row["mode"] = rep.mode if rep else ""
            row["eta_converter"] = rep.eta_converter if rep and rep.eta_converter is not None else nan
            row["eta_heater"] = rep.eta_heater if rep and rep.eta_heater is not None else nan
        return row


def _solve_point(config: ModelConfig, outputs: tuple[str, ...]) -> PointResult:
    lam = config.system.lam
    tensors_l = redfield.build_tensors(config, config.lead_L)
    tensors_r = redfield.build_tensors(config, config.lead_R)
    liou = redfield.assemble_liouvillian(config, (tensors_l, tensors_r))
    state, info = redfield.steady_state(liou, allow_degenerate=(lam == 0.0))

    lab = None if info.degenerate else redfield.to_lab_frame(state, tensors_l.displacement)

    tq_result = None
    ergo = None
    if "phasespace" in outputs and lab is not None:
        tq_result = phasespace.torotropy(lab, lam)
        rho_qmr, _ = phasespace.reduce_resonator(lab)
        ergo = phasespace.ergotropy(rho_qmr, config.system.omega)

    report = observables.build_report(
        config, state, lab, tensors_l, tensors_r,
        torotropy_value=tq_result.value if tq_result else None,
    )
    return PointResult(
        status="degenerate" if info.degenerate else "ok",
        n_cut=config.system.n_cut,
        residual=info.residual,
        min_eig=min(info.min_eig),
        report=report,
        torotropy=tq_result,
        ergotropy=ergo,
        polaron_state=state,
        lab_state=lab,
    )


def _phonon_tail(lab_state: redfield.BlockDensityMatrix) -> float:
    n = lab_state.n_cut
    top = max(1, math.ceil(0.1 * n))
    diag = np.diagonal(lab_state.rho0).real + np.diagonal(lab_state.rho1).real
    return float(diag[n - top :].sum())


def run_point(
    config: ModelConfig,
    outputs: tuple[str, ...] = ("transport", "thermo", "phasespace", "mode"),
    *,
    n_cut_policy: str = "fixed",
) -> PointResult:
    """Evaluate one operating point; exceptions become an error-status result.

    With ``n_cut_policy='adaptive'`` the truncation is raised from 20 in
    steps of 10 until the top-decile Fock population falls below 1e-6
    and the torotropy (when requested) moves by less than 1% between
    consecutive sizes, capping at 80.
    """
    try:
        if n_cut_policy == "fixed" or config.system.lam == 0.0:
            return _solve_point(config, outputs)
        result = None
        n = ADAPTIVE_START
        while True:
            cfg = replace(config, system=replace(config.system, n_cut=n))
            prev = result
            result = _solve_point(cfg, outputs)
            tail_ok = result.lab_state is not None and _phonon_tail(result.lab_state) < ADAPTIVE_TAIL_TOL
            drift_ok = True
            if "phasespace" in outputs and prev is not None and prev.torotropy and result.torotropy:
                a, b = prev.torotropy.value, result.torotropy.value
                drift_ok = abs(a - b) <= ADAPTIVE_DRIFT_TOL * max(abs(a), abs(b)) or max(abs(a), abs(b)) < 1e-9
            need_drift = "phasespace" in outputs
            if tail_ok and (not need_drift or (prev is not None and drift_ok)):
                return result
            if n >= ADAPTIVE_CAP:
                return replace(result, status="n_cut_cap")
            n += ADAPTIVE_STEP
    except Exception as exc:  # recorded per point, never fatal to a sweep
        return PointResult(
            status=f"error:{type(exc).__name__}",
            n_cut=config.system.n_cut,
            residual=float("nan"),
            min_eig=float("nan"),
        )


def sweep_columns(spec: SweepSpec) -> list[str]:
    cols = [spec.axis1.name]
    if spec.axis2 is not None:
        cols.append(spec.axis2.name)
    cols.extend(_BASE_COLUMNS)
    for group in _GROUP_COLUMNS:
        if group in spec.outputs:
            cols.extend(_GROUP_COLUMNS[group])
    return cols


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _metadata_lines(config: ModelConfig, spec: SweepSpec) -> list[str]:
    lines = [f"# qdmr sweep v{VERSION}"]
    for key, value in config_to_dict(config).items():
        lines.append(f"# config.{key} = {_format_cell(value)}")
    a1 = spec.axis1
    lines.append(f"# sweep.axis1 = {a1.name},{a1.start!r},{a1.stop!r},{a1.count}")
    if spec.axis2 is not None:
        a2 = spec.axis2
        lines.append(f"# sweep.axis2 = {a2.name},{a2.start!r},{a2.stop!r},{a2.count}")
    lines.append(f"# sweep.outputs = {','.join(spec.outputs)}")
    lines.append(f"# sweep.n_cut_policy = {spec.n_cut_policy}")
    return lines


def _sweep_signature(config: ModelConfig, spec: SweepSpec) -> str:
    text = "\n".join(_metadata_lines(config, spec))
    return hashlib.sha256(text.encode()).hexdigest()


def _point_assignments(spec: SweepSpec) -> list[tuple[int, dict[str, float]]]:
    v1 = spec.axis1.values()
    v2 = spec.axis2.values() if spec.axis2 is not None else [None]
    points = []
    for i, a in enumerate(v1):
        for j, b in enumerate(v2):
            assign = {spec.axis1.name: a}
            if spec.axis2 is not None:
                assign[spec.axis2.name] = b
            points.append((i * len(v2) + j, assign))
    return points


def _evaluate_task(args: tuple) -> tuple[int, dict]:
    index, config_data, assign, outputs, n_cut_policy = args
    try:
        config = config_from_dict(config_data)
        for name, value in assign.items():
            config = apply_axis(config, name, value)
        result = run_point(config, tuple(outputs), n_cut_policy=n_cut_policy)
    except Exception as exc:  # invalid point, recorded like a solver failure
        result = PointResult(
            status=f"error:{type(exc).__name__}",
            n_cut=int(config_data["system.n_cut"]),
            residual=float("nan"),
            min_eig=float("nan"),
        )
    row = dict(assign)
    row.update(result.row(tuple(outputs)))
    return index, row


@dataclass(frozen=True)
class SweepOutcome:
    path: Path
    n_points: int
    n_errors: int


def run_sweep(
    config: ModelConfig,
    spec: SweepSpec,
    out_path: str | Path,
    *,
    resume: bool = False,
    workers: int | None = None,
) -> SweepOutcome:
    out_path = Path(out_path)
    journal_path = out_path.with_name(out_path.name + ".journal")
    workers = spec.workers if workers is None else workers
    signature = _sweep_signature(config, spec)
    points = _point_assignments(spec)

    done: dict[int, dict] = {}
    if resume and journal_path.exists():
        with open(journal_path) as fh:
            first = fh.readline()
            if first and json.loads(first).get("signature") != signature:
                raise ValueError("journal does not match this sweep; remove it or drop --resume")
            for line in fh:
                if line.strip():
                    entry = json.loads(line)
                    done[entry["index"]] = entry["row"]

    pending = [(i, a) for i, a in points if i not in done]
    config_data = config_to_dict(config)
    tasks = [(i, config_data, a, list(spec.outputs), spec.n_cut_policy) for i, a in pending]

    mode = "a" if (resume and journal_path.exists()) else "w"
    with open(journal_path, mode) as journal:
        if mode == "w":
            journal.write(json.dumps({"signature": signature}) + "\n")
            journal.flush()
        if tasks:
            # identical spawned workers regardless of count: keeps the
            # arithmetic (and hence the output bytes) schedule-independent
            os.environ.setdefault("OMP_NUM_THREADS", "1")
            os.environ.setdefault("OPENBLAS_NUM_THREADS", "1")
            os.environ.setdefault("MKL_NUM_THREADS", "1")
            ctx = get_context("spawn")
            with ProcessPoolExecutor(max_workers=workers, mp_context=ctx) as pool:
                futures = [pool.submit(_evaluate_task, t) for t in tasks]
                for fut in as_completed(futures):
                    index, row = fut.result()
                    done[index] = row
                    journal.write(json.dumps({"index": index, "row": row}) + "\n")
                    journal.flush()

    columns = sweep_columns(spec)
    lines = _metadata_lines(config, spec)
    lines.append(",".join(columns))
    n_errors = 0
    for index, _ in points:
        row = done[index]
        if str(row.get("status", "")).startswith("error"):
            n_errors += 1
        lines.append(",".join(_format_cell(row.get(c)) for c in columns))
    out_path.write_text("\n".join(lines) + "\n")
    journal_path.unlink(missing_ok=True)
    return SweepOutcome(path=out_path, n_points=len(points), n_errors=n_errors)
