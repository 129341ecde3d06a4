"""
dirac-lap-bench - batch front-end for the free and perturbed Dirac operator checks

Subcommands:
1. clifford: Build and verify the Clifford generators for dimension n
2. lap-scan: Weighted resolvent norms over a (lambda, mu) grid
3. kato: Kato-ratio scan and the Kato-smoothness integral
4. check / commutator-check: Commutator and resolvent identities
5. section2-check: First-order operator L and the commutators X_m
6. gronwall: Closed-form Gronwall bound on forward-constructed instances
7. scatter: Smallness, sandwich identity and wave operators for H0 + V
8. op-norm: Norm of a composed operator string

Every run writes its tables (CSV) or reports (JSON) plus run.json, the
resolved configuration with toolkit name and version. Exit codes: 0 on
success, 1 on validation failure (no artifact), 2 on non-convergence
(artifacts written, flagged).

Environment:
- DIRAC_LAP_OUTPUT_DIR: default artifact directory (./runs)
- DIRAC_LAP_LOG_LEVEL: logging level (INFO)
- DIRAC_LAP_THREADS: default worker count (1)
"""
import os
import sys
import json
import time
import logging
import functools
from typing import Any, Optional

import click
import numpy as np
from click.core import ParameterSource
from pydantic import BaseModel

from clifford import build_clifford, verify_clifford
from commutators import IDENTITIES, check_AH0, check_BA, check_invariance, check_T_bounds, refine
from errors import ConvergenceError
from grid import GridSpec, gaussian_state, wavepacket_state
from helpers import (
    DEFAULT_MAX_ITER,
    DEFAULT_TOL,
    output_dir,
    parse_float_list,
    parse_range,
    toolkit_stamp,
    write_csv,
    write_json,
)
from lap import (
    DEFAULT_MUS,
    LAP_SCAN_HEADER,
    ResolventQuery,
    default_lambdas,
    gronwall_bound,
    kato_scan,
    kato_smooth_integral,
    kato_trial_family,
    lap_scan,
    synthetic_gronwall_instance,
)
from operators import (
    CutoffFunction,
    build_first_order,
    operator_norm,
    parse_operator_chain,
    section2_check,
    sinusoidal_coefficients,
)
from runner import default_threads
from scattering import (
    POTENTIAL_KINDS,
    build_potential,
    builtin_potential,
    load_potential_spec,
    sandwich_identity_check,
    smallness_check,
    wave_operator,
)

logger = logging.getLogger(__name__)

# ======================
# Run configuration
# ======================


class RunConfig(BaseModel):
    """Resolved configuration of one run, echoed to run.json"""
    subcommand: str
    grid: Optional[GridSpec] = None
    seed: int = 0
    tol: float = DEFAULT_TOL
    max_iter: int = DEFAULT_MAX_ITER
    threads: int = 1
    output: Optional[str] = None
    params: dict[str, Any] = {}


COMMON_KEYS = ("grid", "seed", "tol", "max_iter", "threads", "output")


def _floats(value) -> list[float]:
    """Float list from a flag string ('a:b:k' or '1,2,3') or a JSON list"""
    if isinstance(value, (list, tuple)):
        return [float(v) for v in value]
    return parse_range(value)


def _resolve(ctx: click.Context) -> RunConfig:
    """Merge --config file values under explicitly supplied flags"""
    params = dict(ctx.params)
    path = params.pop("config", None)
    if path:
        with open(path, "r", encoding="utf-8") as f:
            loaded = json.load(f)
        if "toolkit" in loaded and "config" in loaded:
            loaded = {**loaded["config"], **loaded["config"].get("params", {})}
            loaded.pop("params", None)
            loaded.pop("subcommand", None)
        for name, value in loaded.items():
            key = name.replace("-", "_")
            if key not in params:
                raise ValueError(f"Unknown config key for {ctx.command.name}: {name}")
            if ctx.get_parameter_source(key) == ParameterSource.DEFAULT:
                params[key] = value

    grid = params.pop("grid", None)
    if isinstance(grid, dict):
        grid = GridSpec(**grid)
    elif grid is not None:
        grid = GridSpec.parse(grid)
    common = {key: params.pop(key) for key in COMMON_KEYS if key in params and key != "grid"}
    if common.get("threads") is None:
        common["threads"] = default_threads()
    return RunConfig(subcommand=ctx.command.name, grid=grid, params=params, **common)


def _finish(config: RunConfig, files: list[str], flagged: bool = False):
    """Write run.json; exit 2 when a result is flagged"""
    directory = output_dir(config.output)
    payload = {**toolkit_stamp(), "config": config.model_dump(mode="json"), "artifacts": files, "flagged": flagged}
    write_json(os.path.join(directory, "run.json"), payload)
    if flagged:
        logger.warning(f"[Run] {config.subcommand} finished with flagged results")
        click.get_current_context().exit(2)


def _stamped(result: BaseModel, config: RunConfig) -> dict:
    return {**toolkit_stamp(), "grid": config.grid.model_dump() if config.grid else None,
            "seed": config.seed, "result": result.model_dump(mode="json")}


def guarded(func):
    """Map validation errors to exit 1 and failed inverses to exit 2"""
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        start_time = time.time()
        try:
            func(*args, **kwargs)
        except ConvergenceError as e:
            logger.error(f"[Run] {str(e)}")
            click.get_current_context().exit(2)
        except (ValueError, OSError) as e:
            logger.error(f"[Run] Validation failed: {str(e)}")
            raise click.ClickException(str(e))
        logger.info(f"[Run] Completed in {time.time() - start_time:.2f}s")
    return wrapper


def common_options(default_grid: str = "2,64,32"):
    def decorate(func):
        options = [
            click.option("--config", "config", type=click.Path(exists=True, dir_okay=False), default=None,
                         help="Flat JSON config; explicit flags override it"),
            click.option("--grid", default=default_grid, show_default=True, help="n,M,L"),
            click.option("--seed", default=0, show_default=True, type=int),
            click.option("--tol", default=DEFAULT_TOL, show_default=True, type=float),
            click.option("--max-iter", "max_iter", default=DEFAULT_MAX_ITER, show_default=True, type=int),
            click.option("--threads", default=None, type=int, help="Worker threads (DIRAC_LAP_THREADS)"),
            click.option("--output", default=None, help="Artifact directory (DIRAC_LAP_OUTPUT_DIR)"),
        ]
        for option in reversed(options):
            func = option(func)
        return func
    return decorate


def _cutoff(params: dict) -> CutoffFunction:
    return CutoffFunction(inner=params.get("cutoff_inner", 0.5), outer=params.get("cutoff_outer", 1.0))


# ======================
# Command group
# ======================

@click.group()
@click.option("--log-level", default=lambda: os.getenv("DIRAC_LAP_LOG_LEVEL", "INFO"), help="Logging level")
def cli(log_level):
    """Numerical checks for the free and perturbed massless Dirac operator"""
    logging.basicConfig(level=getattr(logging, str(log_level).upper(), logging.INFO))


@cli.command("clifford")
@click.option("--n", "n", default=3, show_default=True, type=int)
@click.option("--output", default=None)
@click.option("--config", "config", type=click.Path(exists=True, dir_okay=False), default=None)
@click.pass_context
@guarded
def clifford_command(ctx, n, output, config):
    config = _resolve(ctx)
    rep = build_clifford(config.params["n"])
    report = verify_clifford(rep)
    path = os.path.join(output_dir(config.output), "clifford.json")
    write_json(path, {**toolkit_stamp(), "representation": rep.to_dict(), "report": report.model_dump()})
    _finish(config, [path], flagged=not report.passed)


@cli.command("lap-scan")
@common_options()
@click.option("--lambda", "lambdas", default=None, help="a:b:k or a comma list (default: spectrum +- 2, 33 points)")
@click.option("--mu", "mus", default=",".join(str(mu) for mu in DEFAULT_MUS), show_default=True)
@click.option("--sign", default=1, type=click.Choice(["1", "-1"]), show_default=True)
@click.option("--mass", default=0.0, type=float, show_default=True)
@click.option("--mu-min-factor", "mu_min_factor", default=1.0, type=float, show_default=True)
@click.option("--force", is_flag=True, help="Allow mu below the box floor")
@click.option("--quiet", is_flag=True, help="Disable the progress bar")
@click.pass_context
@guarded
def lap_scan_command(ctx, **_):
    config = _resolve(ctx)
    p, grid = config.params, config.grid
    rep = build_clifford(grid.n)
    lambdas = default_lambdas(grid, mass=p["mass"]) if p["lambdas"] is None else _floats(p["lambdas"])
    result = lap_scan(
        rep, None, grid, lambdas, _floats(p["mus"]),
        sign=int(p["sign"]), mass=p["mass"], tol=config.tol, max_iter=config.max_iter, seed=config.seed,
        threads=config.threads, mu_min_factor=p["mu_min_factor"], force=p["force"],
        progress=not p["quiet"] and sys.stderr.isatty(),
    )
    directory = output_dir(config.output)
    csv_path = write_csv(os.path.join(directory, "lap_scan.csv"), LAP_SCAN_HEADER, result.csv_rows())
    json_path = write_json(os.path.join(directory, "lap_scan.json"), _stamped(result, config))
    _finish(config, [csv_path, json_path], flagged=not result.converged)


@cli.command("kato")
@common_options()
@click.option("--family-size", "family_size", default=50, show_default=True, type=int)
@click.option("--variant", default="kato", type=click.Choice(["kato", "bracket"]), show_default=True)
@click.option("--smooth/--no-smooth", default=False, help="Also compute the Kato-smoothness integral")
@click.option("--eps", "eps", default="0.5,0.1,0.02", show_default=True)
@click.option("--width", default=1.0, type=float, show_default=True, help="Gaussian width for the smoothness integral")
@click.pass_context
@guarded
def kato_command(ctx, **_):
    config = _resolve(ctx)
    p, grid = config.params, config.grid
    rep = build_clifford(grid.n)
    estimate = kato_scan(grid, kato_trial_family(grid, rep, count=p["family_size"], seed=config.seed), p["variant"])
    payload = {**toolkit_stamp(), "grid": grid.model_dump(), "estimate": estimate.model_dump(mode="json")}
    if p["smooth"]:
        f = gaussian_state(grid, rep, p["width"], seed=config.seed)
        payload["smoothness"] = kato_smooth_integral(rep, f, _floats(p["eps"])).model_dump()
    path = write_json(os.path.join(output_dir(config.output), "kato.json"), payload)
    _finish(config, [path])


def _packet_builder(rep, p0: float, width: float):
    """Wave packet with fixed momentum and width on any grid of the series"""
    def build(grid: GridSpec):
        momentum = [p0] + [0.0] * (grid.n - 1)
        return wavepacket_state(grid, rep, momentum, width)
    return build


def _check(ctx, **_):
    config = _resolve(ctx)
    p, grid = config.params, config.grid
    rep = build_clifford(grid.n)
    cutoff = _cutoff(p)
    identity = p["identity"]
    p0 = p["p0"] if p["p0"] is not None else grid.nyquist / 2
    width = p["width"] if p["width"] is not None else grid.L / np.sqrt(np.pi * grid.M)
    build_state = _packet_builder(rep, p0, width)
    label = f"wavepacket p0={p0:.4g} width={width:.4g}"
    query = ResolventQuery(lam=p["lam"], mu=p["mu"], eps=p["eps"], sign=int(p["sign"]))

    if identity == "AH0":
        report = refine(lambda g: check_AH0(rep, cutoff, build_state(g), label), grid, p["levels"])
    elif identity == "BA":
        report = refine(lambda g: check_BA(rep, cutoff, build_state(g), label), grid, p["levels"])
    elif identity == "Tbound":
        report = check_T_bounds(rep, cutoff, query, grid, trials=p["trials"], seed=config.seed)
    else:
        report = check_invariance(rep, cutoff, query, build_state(grid), label=label)

    path = write_json(os.path.join(output_dir(config.output), f"check_{identity}.json"), _stamped(report, config))
    _finish(config, [path])


def _register_check(name: str):
    # options attach to the callback, so one callback per command
    def command(ctx, **kwargs):
        _check(ctx, **kwargs)

    command.__name__ = name.replace("-", "_") + "_command"
    for option in reversed([
        click.option("--identity", required=True, type=click.Choice(IDENTITIES)),
        click.option("--p0", default=None, type=float, help="Packet momentum (default: half the grid radius)"),
        click.option("--width", default=None, type=float, help="Packet width (default: L/sqrt(pi M))"),
        click.option("--levels", default=2, show_default=True, type=int, help="Grids in the refinement series"),
        click.option("--lam", default=0.0, show_default=True, type=float),
        click.option("--mu", default=1.0, show_default=True, type=float),
        click.option("--eps", default=0.5, show_default=True, type=float),
        click.option("--sign", default="1", type=click.Choice(["1", "-1"]), show_default=True),
        click.option("--trials", default=20, show_default=True, type=int),
        click.option("--cutoff-inner", "cutoff_inner", default=0.5, show_default=True, type=float),
        click.option("--cutoff-outer", "cutoff_outer", default=1.0, show_default=True, type=float),
    ]):
        command = option(command)
    command = common_options()(command)
    cli.command(name)(click.pass_context(guarded(command)))


_register_check("check")
_register_check("commutator-check")


@cli.command("section2-check")
@common_options(default_grid="1,2048,128")
@click.option("--m", "ms", default="1,10,100,1000", show_default=True)
@click.option("--amplitude", default=0.5, show_default=True, type=float)
@click.option("--wavenumber", default=1, show_default=True, type=int)
@click.pass_context
@guarded
def section2_command(ctx, **_):
    """Closed-form commutator check for the one-dimensional periodic Dirac operator.

    The default grid is 1D (1,2048,128), unlike the n=2 default
    of the other commands.
    """
    config = _resolve(ctx)
    p, grid = config.params, config.grid
    rep = build_clifford(grid.n)
    op = build_first_order(grid, sinusoidal_coefficients(grid, rep, p["amplitude"], p["wavenumber"]))
    phi = gaussian_state(grid, rep, grid.L / 16, seed=config.seed)
    psi = gaussian_state(grid, rep, grid.L / 24, center=[grid.L / 16] + [0.0] * (grid.n - 1), seed=config.seed + 1)
    report = section2_check(op, _floats(p["ms"]), phi, psi, amplitude=p["amplitude"], wavenumber=p["wavenumber"],
                            tol=config.tol, max_iter=config.max_iter, seed=config.seed)
    path = write_json(os.path.join(output_dir(config.output), "section2.json"), _stamped(report, config))
    _finish(config, [path], flagged=not report.converged)


@cli.command("gronwall")
@click.option("--instances", default=100, show_default=True, type=int)
@click.option("--samples", default=2001, show_default=True, type=int)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--tol", default=DEFAULT_TOL, show_default=True, type=float)
@click.option("--output", default=None)
@click.option("--config", "config", type=click.Path(exists=True, dir_okay=False), default=None)
@click.pass_context
@guarded
def gronwall_command(ctx, **_):
    config = _resolve(ctx)
    p = config.params
    rows, failures = [], 0
    for k in range(p["instances"]):
        instance = synthetic_gronwall_instance(config.seed + k, samples=p["samples"])
        result = gronwall_bound(instance.omega, instance.theta, instance.phi, instance.psi, instance.lambdas,
                                f=instance.f, rtol=config.tol)
        holds = bool(result.hypothesis_holds and result.conclusion_holds)
        failures += not holds
        rows.append([config.seed + k, instance.omega, instance.theta, instance.scale,
                     result.max_hypothesis_violation, result.max_conclusion_violation, holds])
    directory = output_dir(config.output)
    header = ["seed", "omega", "theta", "scale", "hypothesis_violation", "conclusion_violation", "holds"]
    csv_path = write_csv(os.path.join(directory, "gronwall.csv"), header, rows)
    json_path = write_json(os.path.join(directory, "gronwall.json"),
                           {**toolkit_stamp(), "instances": len(rows), "failures": failures})
    if failures:
        logger.warning(f"[Run] Gronwall conclusion failed on {failures} instances")
    _finish(config, [csv_path, json_path], flagged=failures > 0)


@cli.command("scatter")
@common_options(default_grid="2,128,64")
@click.option("--pot", "pot", default="coulomb2", show_default=True,
              help=f"Potential JSON file or a built-in name ({', '.join(POTENTIAL_KINDS)})")
@click.option("--c", "c", default=0.05, show_default=True, type=float, help="Coupling for built-in potentials")
@click.option("--T", "times", default="2,4,8,16", show_default=True)
@click.option("--dt", default=0.01, show_default=True, type=float)
@click.option("--p0", default=2.0, show_default=True, type=float)
@click.option("--width", default=2.0, show_default=True, type=float)
@click.option("--direction", default="1", type=click.Choice(["1", "-1"]), show_default=True)
@click.option("--depth", default=30, show_default=True, type=int)
@click.option("--sample-lambda", "sample_lambdas", default="-2,0,2", show_default=True)
@click.option("--sample-mu", "sample_mus", default="1,0.5,0.25", show_default=True)
@click.pass_context
@guarded
def scatter_command(ctx, **_):
    config = _resolve(ctx)
    p, grid = config.params, config.grid
    rep = build_clifford(grid.n)
    if os.path.isfile(str(p["pot"])):
        spec = load_potential_spec(p["pot"])
    else:
        spec = builtin_potential(p["pot"], c=p["c"])
    pot = build_potential(spec, rep, grid)

    samples = [(lam, mu) for mu in _floats(p["sample_mus"]) for lam in _floats(p["sample_lambdas"])]
    small = smallness_check(rep, pot, samples, tol=config.tol, max_iter=config.max_iter, seed=config.seed,
                            threads=config.threads)
    psi = wavepacket_state(grid, rep, [p["p0"]] + [0.0] * (grid.n - 1), p["width"], band=1, seed=config.seed)
    _, report = wave_operator(rep, pot, psi, _floats(p["times"]), p["dt"], direction=int(p["direction"]),
                              threads=config.threads)
    report = report.model_copy(update={
        "smallness_sup": small.sup,
        "smallness_samples": [[s.lam, s.mu, float(s.sign), s.norm] for s in small.samples],
    })
    payload = {**toolkit_stamp(), "report": report.model_dump(mode="json"), "smallness": small.model_dump()}
    if small.verdict:
        sandwich = sandwich_identity_check(rep, pot, 0.0, 1.0, psi, depth=p["depth"], seed=config.seed)
        payload["sandwich"] = sandwich.model_dump()
    else:
        logger.warning(f"[Scatter] Smallness sup {small.sup:.4g} >= 1, sandwich identity skipped")
    path = write_json(os.path.join(output_dir(config.output), "scatter.json"), payload)
    _finish(config, [path], flagged=not (small.converged and report.valid))


@cli.command("op-norm")
@common_options()
@click.option("--op", "expr", required=True, help='Composition string, e.g. "W(-1)*G(0,1)*W(-1)"')
@click.pass_context
@guarded
def op_norm_command(ctx, **_):
    config = _resolve(ctx)
    grid = config.grid
    rep = build_clifford(grid.n)
    chain = parse_operator_chain(config.params["expr"], rep, CutoffFunction())
    result = operator_norm(chain, grid, rep.N, tol=config.tol, max_iter=config.max_iter, seed=config.seed)
    path = write_json(os.path.join(output_dir(config.output), "op_norm.json"),
                      {**toolkit_stamp(), "grid": grid.model_dump(), "op": chain.label,
                       "result": result.model_dump()})
    _finish(config, [path], flagged=not result.converged)


# ======================
# Entry point
# ======================

def main(argv=None) -> int:
    try:
        code = cli.main(args=argv, prog_name="dirac-lap", standalone_mode=False)
    except click.ClickException as e:
        e.show()
        return 1
    except click.Abort:
        return 1
    return code if isinstance(code, int) else 0


if __name__ == "__main__":
    sys.exit(main())
