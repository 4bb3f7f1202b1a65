"""Named figure presets: fixed grids over the reference working point.

Each figure writes its data as CSV (the contract) plus a simple SVG
rendering.  Grids and axis ranges are fixed so reruns are bit-identical.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Callable

import numpy as np

from . import optimizer, svgplot, sweeps
from .params import Direction, SystemParams, reference_params


class UnknownFigure(KeyError):
    """Requested figure name is not one of the built-in presets."""


GRID_1D = 601
GRID_2D = 201

_G2_LABEL = "g2(0)"
_DC_LABEL = "delta_c / kappa"


def _fmt(x: float) -> str:
    if not math.isfinite(x):
        return ""
    return repr(float(x))


def _write(path: Path, text: str) -> str:
    path.write_text(text)
    return path.name


def _kv_block(items: list[tuple[str, object]]) -> str:
    lines = []
    for key, value in items:
        if isinstance(value, float):
            value = repr(value)
        lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"


def _table_csv(path: Path, header: list[str], columns: list[np.ndarray]) -> str:
    lines = [",".join(header)]
    for row in zip(*columns):
        lines.append(",".join(_fmt(v) for v in row))
    return _write(path, "\n".join(lines) + "\n")


def _direction_sweep(
    base: SystemParams,
    axis: sweeps.SweepAxis,
    *,
    overrides: dict[str, float] | None = None,
    directions: tuple[Direction, ...] = (Direction.FORWARD, Direction.BACKWARD),
    observable: str = "g2",
    optimal: bool = True,
    axis2: sweeps.SweepAxis | None = None,
    jobs: int | None = None,
) -> sweeps.SweepResult:
    spec = sweeps.SweepSpec(
        axis1=axis,
        axis2=axis2,
        overrides=overrides or {},
        directions=directions,
        observable=observable,
        optimal_j_theta=optimal,
    )
    return run_quiet(spec, base, jobs)


def run_quiet(spec, base, jobs):
    import warnings

    from .params import RegimeWarning

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RegimeWarning)
        return sweeps.run_sweep(spec, base, jobs=jobs)


def _line_figure(
    result: sweeps.SweepResult,
    out: Path,
    name: str,
    observable: str,
    ylabel: str,
) -> list[str]:
    files = sweeps.write_sweep_csv(result, out / f"{name}.csv")
    plot = svgplot.LinePlot(xlabel=_DC_LABEL, ylabel=ylabel, log_y=True, title=name)
    for direction in result.spec.directions:
        y = np.where(
            result.valid[direction], result.stats[direction][observable], np.nan
        )
        plot.add_line(result.values1, y, direction.value)
    files.append(_write(out / f"{name}.svg", plot.render()))
    return files


def _heatmap_figure(
    result: sweeps.SweepResult,
    out: Path,
    name: str,
    direction: Direction,
    xlabel: str,
    *,
    overlay: tuple[np.ndarray, np.ndarray] | None = None,
) -> list[str]:
    files = sweeps.write_sweep_csv(result, out / f"{name}.csv")
    z = np.where(result.valid[direction], result.observable_grid(direction), np.nan)
    heat = svgplot.Heatmap(
        x=result.values1,
        y=result.values2,
        z=z,
        xlabel=xlabel,
        ylabel=_DC_LABEL,
        title=name,
        log10_color=True,
        color_label=f"log10 {result.spec.observable}",
    )
    if overlay is not None:
        heat.add_line(*overlay)
    files.append(_write(out / f"{name}.svg", heat.render()))
    return files


def fig2a(out: Path, base: SystemParams, jobs: int | None) -> list[str]:
    res = _direction_sweep(
        base, sweeps.SweepAxis("delta_c", -4.0, 2.0, GRID_1D), jobs=jobs
    )
    return _line_figure(res, out, "fig2a", "g2", _G2_LABEL)


def fig2b(out: Path, base: SystemParams, jobs: int | None) -> list[str]:
    res = _direction_sweep(
        base,
        sweeps.SweepAxis("delta_c", -4.0, 2.0, GRID_1D),
        observable="n_paper",
        jobs=jobs,
    )
    return _line_figure(res, out, "fig2b", "n_paper", "n (leading order)")


def fig3a(out: Path, base: SystemParams, jobs: int | None) -> list[str]:
    res = _direction_sweep(
        base,
        sweeps.SweepAxis("delta_e", -3.0, 3.0, GRID_2D),
        axis2=sweeps.SweepAxis("delta_c", -4.0, 4.0, GRID_2D),
        directions=(Direction.FORWARD,),
        jobs=jobs,
    )
    d = Direction.FORWARD
    dc_opt = res.delta_c_opt[d][:, 0]
    dc_opt = np.where(res.valid[d].any(axis=1), dc_opt, np.nan)
    files = _heatmap_figure(
        res, out, "fig3a", d, "delta_e / kappa", overlay=(res.values1, dc_opt)
    )
    files.append(
        _table_csv(
            out / "fig3a_optimum.csv",
            ["delta_e", "J", "theta", "delta_c_opt"],
            [res.values1, res.j_used[d][:, 0], res.theta_used[d][:, 0], dc_opt],
        )
    )
    return files


def fig3b(out: Path, base: SystemParams, jobs: int | None) -> list[str]:
    res = _direction_sweep(
        base,
        sweeps.SweepAxis("delta_e", -3.0, 3.0, GRID_1D),
        directions=(Direction.FORWARD,),
        jobs=jobs,
    )
    d = Direction.FORWARD
    ok = res.valid[d]
    j = np.where(ok, res.j_used[d], np.nan)
    e_he = np.abs(j) * base.delta_p / base.g
    files = [
        _table_csv(
            out / "fig3b.csv",
            ["delta_e", "e_he", "J", "theta", "delta_c_opt"],
            [
                res.values1,
                e_he,
                j,
                np.where(ok, res.theta_used[d], np.nan),
                np.where(ok, res.delta_c_opt[d], np.nan),
            ],
        )
    ]
    plot = svgplot.LinePlot(
        xlabel="delta_e / kappa", ylabel="optimal e_he / kappa", title="fig3b"
    )
    plot.add_line(res.values1, e_he, "")
    files.append(_write(out / "fig3b.svg", plot.render()))
    return files


def _microwave_pair(
    base: SystemParams, observable: str, jobs: int | None
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """delta_c grid plus on/off curves at the microwave-on optimal (J, theta).

    The microwave-off system has no exact cancellation point, so both curves
    share the drive-on optimum; only e_eg changes.
    """
    point = optimizer.solve_optimal(base)
    axis = sweeps.SweepAxis("delta_c", -1.0, 2.0, GRID_1D)
    curves = []
    for e_eg in (base.e_eg, 0.0):
        res = _direction_sweep(
            base,
            axis,
            overrides={"J": point.J, "theta": point.theta, "e_eg": e_eg},
            directions=(Direction.FORWARD,),
            observable=observable,
            optimal=False,
            jobs=jobs,
        )
        d = Direction.FORWARD
        curves.append(
            np.where(res.valid[d], res.stats[d][observable], np.nan)
        )
        grid = res.values1
    return grid, curves[0], curves[1]


def _microwave_figure(
    out: Path, base: SystemParams, jobs: int | None, name: str, observable: str, ylabel: str
) -> list[str]:
    grid, on, off = _microwave_pair(base, observable, jobs)
    files = [
        _table_csv(
            out / f"{name}.csv",
            ["delta_c", f"{observable}_microwave_on", f"{observable}_microwave_off"],
            [grid, on, off],
        )
    ]
    plot = svgplot.LinePlot(xlabel=_DC_LABEL, ylabel=ylabel, log_y=True, title=name)
    plot.add_line(grid, on, "e_eg = %g" % base.e_eg)
    plot.add_line(grid, off, "e_eg = 0", dashed=True)
    files.append(_write(out / f"{name}.svg", plot.render()))
    return files


def fig3c(out: Path, base: SystemParams, jobs: int | None) -> list[str]:
    return _microwave_figure(out, base, jobs, "fig3c", "g2", _G2_LABEL)


def fig3d(out: Path, base: SystemParams, jobs: int | None) -> list[str]:
    return _microwave_figure(
        out, base, jobs, "fig3d", "n_paper", "n (leading order)"
    )


def fig5a(out: Path, base: SystemParams, jobs: int | None) -> list[str]:
    res = _direction_sweep(
        base,
        sweeps.SweepAxis("g", 2.0, 14.0, GRID_2D),
        axis2=sweeps.SweepAxis("delta_c", -4.0, 4.0, GRID_2D),
        directions=(Direction.FORWARD,),
        jobs=jobs,
    )
    d = Direction.FORWARD
    files = _heatmap_figure(res, out, "fig5a", d, "g / kappa")
    files.append(
        _table_csv(
            out / "fig5a_optimum.csv",
            ["g", "J", "theta", "delta_c_opt"],
            [
                res.values1,
                res.j_used[d][:, 0],
                res.theta_used[d][:, 0],
                res.delta_c_opt[d][:, 0],
            ],
        )
    )
    return files


def fig5b(out: Path, base: SystemParams, jobs: int | None) -> list[str]:
    res = _direction_sweep(
        base,
        sweeps.SweepAxis("delta_c", -4.0, 4.0, GRID_1D),
        overrides={"g": 6.7},
        jobs=jobs,
    )
    return _line_figure(res, out, "fig5b", "g2", _G2_LABEL)


def fig5c(out: Path, base: SystemParams, jobs: int | None) -> list[str]:
    res = _direction_sweep(
        base,
        sweeps.SweepAxis("kappa1", 0.02, 1.98, GRID_2D),
        axis2=sweeps.SweepAxis("delta_c", -4.0, 4.0, GRID_2D),
        overrides={"g": 6.7},
        directions=(Direction.FORWARD,),
        jobs=jobs,
    )
    return _heatmap_figure(res, out, "fig5c", Direction.FORWARD, "kappa1 / kappa")


def _j_theta_figure(
    out: Path, base: SystemParams, jobs: int | None, name: str, direction: Direction
) -> list[str]:
    res = _direction_sweep(
        base,
        sweeps.SweepAxis("J", -3.0, 3.0, GRID_2D),
        axis2=sweeps.SweepAxis("theta", -math.pi, math.pi, GRID_2D),
        overrides={"delta_c": 0.0},
        directions=(direction,),
        optimal=False,
        jobs=jobs,
    )
    files = sweeps.write_sweep_csv(res, out / f"{name}.csv")
    z = np.where(res.valid[direction], res.observable_grid(direction), np.nan)
    heat = svgplot.Heatmap(
        x=res.values1,
        y=res.values2,
        z=z,
        xlabel="J / kappa",
        ylabel="theta",
        title=name,
        log10_color=True,
        color_label="log10 g2",
    )
    files.append(_write(out / f"{name}.svg", heat.render()))
    return files


def fig6a(out: Path, base: SystemParams, jobs: int | None) -> list[str]:
    return _j_theta_figure(out, base, jobs, "fig6a", Direction.FORWARD)


def fig6b(out: Path, base: SystemParams, jobs: int | None) -> list[str]:
    return _j_theta_figure(out, base, jobs, "fig6b", Direction.BACKWARD)


def _nonreciprocal_figure(
    out: Path, base: SystemParams, jobs: int | None, name: str, target: float
) -> list[str]:
    j, theta, report = optimizer.nonreciprocal_point(base, target)
    res = _direction_sweep(
        base,
        sweeps.SweepAxis("delta_c", -4.0, 4.0, GRID_1D),
        overrides={"J": j, "theta": theta},
        optimal=False,
        jobs=jobs,
    )
    files = _line_figure(res, out, name, "g2", _G2_LABEL)
    files.append(
        _write(
            out / f"{name}_point.txt",
            _kv_block(
                [
                    ("J", j),
                    ("theta", theta),
                    ("delta_c", report.delta_c),
                    ("g2_forward", report.g2_forward),
                    ("g2_backward", report.g2_backward),
                    ("contrast", report.contrast),
                ]
            ),
        )
    )
    return files


def fig6c(out: Path, base: SystemParams, jobs: int | None) -> list[str]:
    return _nonreciprocal_figure(out, base, jobs, "fig6c", 0.0)


def fig6d(out: Path, base: SystemParams, jobs: int | None) -> list[str]:
    return _nonreciprocal_figure(out, base, jobs, "fig6d", 2.5)


_BUILDERS: dict[str, Callable[[Path, SystemParams, int | None], list[str]]] = {
    "fig2a": fig2a,
    "fig2b": fig2b,
    "fig3a": fig3a,
    "fig3b": fig3b,
    "fig3c": fig3c,
    "fig3d": fig3d,
    "fig5a": fig5a,
    "fig5b": fig5b,
    "fig5c": fig5c,
    "fig6a": fig6a,
    "fig6b": fig6b,
    "fig6c": fig6c,
    "fig6d": fig6d,
}

FIGURE_NAMES = tuple(_BUILDERS)


def figure(
    name: str,
    out_dir,
    *,
    base: SystemParams | None = None,
    jobs: int | None = None,
) -> list[str]:
    """Regenerate a named figure's data and rendering under ``out_dir``.

    Returns the written file names.  The parameter preset is the reference
    working point unless ``base`` overrides it.
    """
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise UnknownFigure(
            f"unknown figure {name!r}; choose from {', '.join(FIGURE_NAMES)}"
        ) from None
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if base is None:
        base = reference_params()
    return builder(out, base, jobs)


__all__ = ["FIGURE_NAMES", "UnknownFigure", "figure"]
