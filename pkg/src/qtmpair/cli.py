"""Command-line interface: plot-ready spectrum tables, scalar extraction,
time traces, and Arrhenius dataset synthesis/fitting.

Exit codes: 0 on success, 2 for argument errors (usage text on stderr),
3 for domain errors such as a non-convergent fit (machine-readable JSON
diagnostic on stderr).  Output is byte-reproducible for identical inputs:
floats are printed as shortest round-trip decimals.
"""

import argparse
import json
import sys

import numpy as np

from .analysis import (
    EXTRACTION_NOTES,
    ground_splitting,
    kelvin_to_gigahertz,
    sweep_field,
    sweep_ratio,
    tunneling_from_splitting,
    zeeman_threshold,
)
from .jacobi import DiagonalizationError
from .model import (
    BASIS_LABELS,
    FieldVector,
    ModelParams,
    basis_state,
    build_hamiltonian,
    eigensystem,
    evolve,
    moment_expectation,
)
from .relaxation import (
    ArrheniusProcess,
    DegenerateParametersError,
    RelaxationModel,
    fit,
    load_dataset,
    model_lifetime,
    synthesize,
)
from .serialize import fmt

EXIT_OK = 0
EXIT_DOMAIN = 3   # argparse itself exits 2 on argument errors


class DomainError(RuntimeError):
    """Runtime failure reported as a JSON diagnostic with exit code 3."""

    def __init__(self, kind, message, **detail):
        super().__init__(message)
        self.kind = kind
        self.detail = detail

    def to_json(self):
        payload = {"error": self.kind, "message": str(self)}
        payload.update(self.detail)
        return json.dumps(payload, indent=2) + "\n"


def _add_model_flags(sub, with_mu_x=True):
    sub.add_argument("--u", type=float, required=True, help="doublet splitting U (kelvin)")
    sub.add_argument("--a", type=float, required=True, help="tunneling element A (kelvin, >= 0)")
    if with_mu_x:
        sub.add_argument(
            "--mu-x", type=float, default=None,
            help="pair moment along x (Bohr magnetons; defaults to --mu-y)",
        )
    sub.add_argument(
        "--mu-y", type=float, required=True, help="pair moment along y (Bohr magnetons)"
    )


def _add_output_flag(sub):
    sub.add_argument(
        "--output", metavar="PATH", default=None,
        help="output file (default: standard output)",
    )


def _model_params(args, parser):
    mu_x = getattr(args, "mu_x", None)
    if mu_x is None:
        mu_x = args.mu_y
    try:
        return ModelParams(u=args.u, a=args.a, mu_x=mu_x, mu_y=args.mu_y)
    except ValueError as err:
        parser.error(str(err))


def _field(args):
    return FieldVector(
        bx=getattr(args, "bx", 0.0), by=getattr(args, "by", 0.0), bz=getattr(args, "bz", 0.0)
    )


def build_parser():
    parser = argparse.ArgumentParser(
        prog="qtmpair",
        description=(
            "Four-state pseudospin toolkit for coupled anisotropic 4f ion pairs: "
            "tunneling spectra, field sweeps, parameter extraction and Arrhenius "
            "relaxation fits. Units: energies in kelvin (E/k_B), fields in tesla, "
            "moments in Bohr magnetons, times in nanoseconds/seconds."
        ),
    )
    commands = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    sub = commands.add_parser(
        "spectrum-ua",
        help="zero-field eigenvalues versus the ratio U/A (units of A)",
        description="Zero-field eigenvalue table versus U/A; eigenvalues in units of A.",
    )
    sub.add_argument("--min", type=float, required=True, help="first U/A ratio (dimensionless)")
    sub.add_argument("--max", type=float, required=True, help="last U/A ratio (dimensionless)")
    sub.add_argument("--points", type=int, required=True, help="number of scan points (>= 2)")
    sub.add_argument("--format", choices=("csv", "json"), default="csv", help="output format")
    _add_output_flag(sub)
    sub.set_defaults(handler=_cmd_spectrum_ua)

    sub = commands.add_parser(
        "spectrum-field",
        help="eigenvalues and ground moment versus a field along y",
        description=(
            "Eigenvalue/ground-moment table versus a magnetic field along y; the scan "
            "axis is By in units of the threshold field B_Zt = U/(2 mu_y), eigenvalues "
            "in kelvin, moments in Bohr magnetons."
        ),
    )
    _add_model_flags(sub)
    sub.add_argument(
        "--max", type=float, required=True,
        help="sweep end in units of B_Zt (dimensionless, > 0)",
    )
    sub.add_argument("--points", type=int, required=True, help="number of scan points (>= 2)")
    sub.add_argument("--format", choices=("csv", "json"), default="csv", help="output format")
    _add_output_flag(sub)
    sub.set_defaults(handler=_cmd_spectrum_field)

    sub = commands.add_parser(
        "eigen",
        help="one-shot eigensystem at given parameters and field",
        description="Eigenvalues (kelvin) and eigenvectors at one parameter/field point (JSON).",
    )
    _add_model_flags(sub)
    sub.add_argument("--bx", type=float, default=0.0, help="field along x (tesla)")
    sub.add_argument("--by", type=float, default=0.0, help="field along y (tesla)")
    sub.add_argument("--bz", type=float, default=0.0, help="field along z (tesla; has no effect)")
    _add_output_flag(sub)
    sub.set_defaults(handler=_cmd_eigen)

    sub = commands.add_parser(
        "extract",
        help="scalar report: splitting, tunneling element, frequency, threshold field",
        description=(
            "Scalar extraction report (JSON). Provide --delta directly and/or --u/--a "
            "to compute the splitting; --u/--mu-y enable the threshold field."
        ),
    )
    sub.add_argument("--delta", type=float, default=None, help="ground-state splitting (kelvin)")
    sub.add_argument("--u", type=float, default=None, help="doublet splitting U (kelvin)")
    sub.add_argument("--a", type=float, default=None, help="tunneling element A (kelvin)")
    sub.add_argument("--mu-y", type=float, default=None, help="pair moment along y (Bohr magnetons)")
    sub.add_argument(
        "--mode", choices=("paper", "exact", "both"), default="both",
        help="tunneling extraction rule: quarter rule ('paper'), closed-form inversion "
        "('exact'), or both",
    )
    _add_output_flag(sub)
    sub.set_defaults(handler=_cmd_extract)

    sub = commands.add_parser(
        "fit",
        help="fit parallel Arrhenius processes to a lifetime dataset",
        description=(
            "Fit N parallel Arrhenius channels to a T_K,tau_s dataset (CSV); report is "
            "JSON (prefactors in seconds, barriers in kelvin). Optionally write the "
            "fitted model curve sampled at the data temperatures plus a dense "
            "log-spaced grid."
        ),
    )
    sub.add_argument("--input", metavar="PATH", required=True, help="dataset CSV file")
    sub.add_argument("--processes", type=int, required=True, help="number of channels (1..4)")
    sub.add_argument("--format", choices=("json",), default="json", help="report format")
    sub.add_argument(
        "--curve-output", metavar="PATH", default=None,
        help="also write the model curve as CSV (T_K,tau_s) to this file",
    )
    sub.add_argument(
        "--grid-points", type=int, default=200,
        help="size of the dense log-spaced temperature grid for the curve",
    )
    _add_output_flag(sub)
    sub.set_defaults(handler=_cmd_fit)

    sub = commands.add_parser(
        "synth",
        help="generate a synthetic lifetime dataset from Arrhenius parameters",
        description=(
            "Synthesize a lifetime dataset on a log-spaced temperature grid with "
            "seeded lognormal scatter; output is dataset CSV (T_K,tau_s)."
        ),
    )
    sub.add_argument(
        "--process", nargs=2, type=float, action="append", required=True,
        metavar=("TAU0", "DELTA"),
        help="one channel: prefactor tau0 (seconds) and barrier delta (kelvin); repeatable",
    )
    sub.add_argument("--t-min", type=float, required=True, help="lowest temperature (kelvin)")
    sub.add_argument("--t-max", type=float, required=True, help="highest temperature (kelvin)")
    sub.add_argument("--points", type=int, required=True, help="number of temperatures (>= 1)")
    sub.add_argument(
        "--noise", type=float, default=0.0, help="ln-tau noise width (dimensionless, >= 0)"
    )
    sub.add_argument("--seed", type=int, default=0, help="random seed (integer)")
    _add_output_flag(sub)
    sub.set_defaults(handler=_cmd_synth)

    sub = commands.add_parser(
        "evolve",
        help="coherent time trace of basis-state populations and moment",
        description=(
            "Propagate a basis state coherently and tabulate populations and the "
            "magnetic moment; trace columns are t_ns,p1,p1bar,p2,p2bar,mx,my "
            "(times in nanoseconds, moments in Bohr magnetons)."
        ),
    )
    _add_model_flags(sub)
    sub.add_argument("--bx", type=float, default=0.0, help="field along x (tesla)")
    sub.add_argument("--by", type=float, default=0.0, help="field along y (tesla)")
    sub.add_argument("--bz", type=float, default=0.0, help="field along z (tesla; has no effect)")
    sub.add_argument(
        "--initial", choices=BASIS_LABELS, default="1", help="initial basis state"
    )
    sub.add_argument("--t-max", type=float, required=True, help="trace length (nanoseconds)")
    sub.add_argument("--points", type=int, required=True, help="number of samples (>= 2)")
    _add_output_flag(sub)
    sub.set_defaults(handler=_cmd_evolve)

    # each subcommand reports usage errors against its own parser
    for sub_parser in commands.choices.values():
        sub_parser.set_defaults(_parser=sub_parser)
    return parser


# ---------------------------------------------------------------- handlers

def _cmd_spectrum_ua(args, parser):
    if args.points < 2:
        parser.error("--points must be >= 2")
    if not args.min < args.max:
        parser.error("--min must be smaller than --max")
    table = sweep_ratio(args.min, args.max, args.points)
    return table.to_csv() if args.format == "csv" else table.to_json()


def _cmd_spectrum_field(args, parser):
    if args.points < 2:
        parser.error("--points must be >= 2")
    if args.max <= 0:
        parser.error("--max must be > 0 (units of B_Zt)")
    params = _model_params(args, parser)
    if params.u == 0.0:
        parser.error("--u must be nonzero: the field scale B_Zt = U/(2 mu_y) vanishes")
    table = sweep_field(params, args.max, args.points)
    return table.to_csv() if args.format == "csv" else table.to_json()


def _cmd_eigen(args, parser):
    params = _model_params(args, parser)
    es = eigensystem(build_hamiltonian(params, _field(args)))
    payload = {
        "values_K": es.values.tolist(),
        "vectors": [es.vectors[:, j].tolist() for j in range(4)],
        "basis": list(BASIS_LABELS),
        "convention": (
            "vectors[i] is the eigenvector of values_K[i] (ascending), amplitudes "
            "ordered as 'basis'; the largest-magnitude amplitude is made positive"
        ),
    }
    return json.dumps(payload, indent=2) + "\n"


def _cmd_extract(args, parser):
    delta = args.delta
    splitting_from_model = None
    if args.u is not None and args.a is not None:
        try:
            splitting_from_model = ground_splitting(
                ModelParams(u=args.u, a=args.a, mu_x=1.0, mu_y=1.0)
            )
        except ValueError as err:
            parser.error(str(err))
    if delta is None:
        delta = splitting_from_model
    if delta is None:
        parser.error("provide --delta, or both --u and --a to compute the splitting")
    if delta < 0:
        parser.error("--delta must be >= 0")
    if args.mode == "exact" and (args.u is None or args.u < 0):
        parser.error("--mode exact requires --u >= 0")

    report = {"splitting_K": delta}
    report["tunneling_paper_K"] = (
        tunneling_from_splitting(delta, mode="paper") if args.mode in ("paper", "both") else None
    )
    if args.mode in ("exact", "both") and args.u is not None and args.u >= 0:
        report["tunneling_exact_K"] = tunneling_from_splitting(delta, u=args.u, mode="exact")
    else:
        report["tunneling_exact_K"] = None
    report["frequency_GHz"] = kelvin_to_gigahertz(delta)
    if args.u is not None and args.mu_y is not None:
        if args.mu_y <= 0:
            parser.error("--mu-y must be > 0")
        report["zeeman_threshold_T"] = zeeman_threshold(
            ModelParams(u=args.u, a=0.0, mu_x=1.0, mu_y=args.mu_y)
        )
    else:
        report["zeeman_threshold_T"] = None
    report["notes"] = list(EXTRACTION_NOTES)
    return json.dumps(report, indent=2) + "\n"


def _cmd_fit(args, parser):
    if not 1 <= args.processes <= 4:
        parser.error("--processes must be in 1..4")
    try:
        data = load_dataset(args.input)
    except FileNotFoundError:
        parser.error(f"input file not found: {args.input}")
    except ValueError as err:
        raise DomainError("DatasetError", str(err), path=args.input) from err

    try:
        result = fit(data, args.processes)
    except DegenerateParametersError as err:
        raise DomainError(
            "DegenerateParameters", str(err), parameter_pair=list(err.parameter_pair)
        ) from err
    except ValueError as err:
        raise DomainError("FitError", str(err)) from err
    if not result.converged:
        raise DomainError(
            "FitNotConverged",
            f"fit did not converge within {result.iterations} iterations",
            iterations=result.iterations,
            residual_rms=result.residual_rms,
        )

    if args.curve_output is not None:
        temps = data.temperatures()
        grid = np.geomspace(temps.min(), temps.max(), max(args.grid_points, 2))
        sample = np.unique(np.concatenate([temps, grid]))
        taus = model_lifetime(result.model, sample)
        lines = ["T_K,tau_s"] + [f"{fmt(t)},{fmt(tau)}" for t, tau in zip(sample, taus)]
        _write_text(args.curve_output, "\n".join(lines) + "\n")
    return result.to_json()


def _cmd_synth(args, parser):
    if args.points < 1:
        parser.error("--points must be >= 1")
    if not 0 < args.t_min <= args.t_max:
        parser.error("need 0 < --t-min <= --t-max")
    if args.noise < 0:
        parser.error("--noise must be >= 0")
    if len(args.process) > 4:
        parser.error("at most 4 --process channels are supported")
    try:
        model = RelaxationModel(
            processes=tuple(ArrheniusProcess(tau0=p[0], delta=p[1]) for p in args.process)
        )
    except ValueError as err:
        parser.error(str(err))
    temps = np.geomspace(args.t_min, args.t_max, args.points)
    return synthesize(model, temps, noise_sigma=args.noise, seed=args.seed).to_csv()


def _cmd_evolve(args, parser):
    if args.points < 2:
        parser.error("--points must be >= 2")
    if args.t_max <= 0:
        parser.error("--t-max must be > 0 (nanoseconds)")
    params = _model_params(args, parser)
    hamiltonian = build_hamiltonian(params, _field(args))
    initial = basis_state(args.initial)
    lines = ["t_ns,p1,p1bar,p2,p2bar,mx,my"]
    for t in np.linspace(0.0, args.t_max, args.points):
        state = evolve(initial, hamiltonian, t)
        populations = np.abs(state) ** 2
        moment = moment_expectation(state, params)
        cells = [fmt(t)] + [fmt(p) for p in populations] + [fmt(moment.mx), fmt(moment.my)]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


# -------------------------------------------------------------------- main

def _write_text(path, text):
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write(text)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        output = args.handler(args, args._parser)
    except DomainError as err:
        sys.stderr.write(err.to_json())
        return EXIT_DOMAIN
    except DiagonalizationError as err:
        sys.stderr.write(
            DomainError(
                "DiagonalizationError", str(err), off_diagonal_norm=err.off_diagonal_norm
            ).to_json()
        )
        return EXIT_DOMAIN
    if args.output is not None:
        _write_text(args.output, output)
    else:
        sys.stdout.write(output)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
