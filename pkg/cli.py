"""Command-line entry point.

Every command prints one JSON object holding the computed result, the
normalised request it was computed from and the tolerance used. Feeding that
object back through ``--input`` recomputes the same result and re-emits the
same text. Domain errors print a JSON error object and exit 2; unknown
commands exit 64.
"""
from __future__ import annotations

import logging
from pathlib import Path
from typing import Callable

import click
import numpy as np

from models.abgroup import FinAbGroup, Subgroup, is_trivial_extension, oracle_verdict
from models.database import init_db
from models.errors import InvalidInputError, MerminError
from models.frel import build_sc_pair, frel_locality_check, phases_closed, rel_phases, verify_frel_laws
from models.lhv import lhv_exists, quantum_table
from models.phases import PhasePoint
from models.qss import (
    QssConfig,
    run_protocol,
    simulate_device_independent_attack,
    simulate_pre_phase_attack,
    withholding_leakage,
)
from models.qudit import (
    complementarity_report,
    distribution_csv_rows,
    fourier_basis,
    mermin_outcome_distribution,
    phased_basis,
    sample_outcomes,
    simplified_outcome_distribution,
)
from models.runs import record_run, save_pair_counts, save_qss_summary
from models.scenario import (
    MerminScenario,
    PhaseEquation,
    build_nonlocal_scenario,
    evaluate_newcond,
    pair_series,
    scan_newcond,
    validate_scenario,
)
from utils.constants import DEFAULT_TOLERANCE, PAIR_POLICIES, POSSIBILITY_THRESHOLD, QSS_MIN_ROUNDS
from utils.helpers import format_tuple, parse_elements, parse_factors
from utils.serialization import csv_text, dumps, gnuplot_script, load_json, request_of

logger = logging.getLogger(__name__)

EX_USAGE = 64
EX_DOMAIN = 2

Outcome = tuple[dict, str | None]

QSS_ATTACKS = ("none", "pre_phase_substitution", "post_phase_deterministic", "withholding")


class UnknownCommandError(click.UsageError):
    exit_code = EX_USAGE


class MerminGroup(click.Group):
    """Click group with the exit-code contract of the tool."""

    def resolve_command(self, ctx, args):
        try:
            return super().resolve_command(ctx, args)
        except click.UsageError as e:
            raise UnknownCommandError(e.message, ctx=ctx) from e

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except MerminError as e:
            error = e
        except ValueError as e:
            error = InvalidInputError(str(e))
        logger.debug("domain error: %s", error.message)
        click.echo(dumps(_jsonable(error.to_dict())))
        ctx.exit(EX_DOMAIN)


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    if isinstance(value, np.generic):
        return value.item()
    return str(value)


def common_options(fn: Callable) -> Callable:
    """Flags shared by every command."""
    fn = click.option("--record", is_flag=True, help="Append the run to the ledger database.")(fn)
    fn = click.option(
        "--input", "input_path", type=click.Path(dir_okay=False), default=None,
        help="Read the request from a JSON file (a previous output or a bare request).",
    )(fn)
    fn = click.option("--json/--csv", "as_json", default=True, help="Output format.")(fn)
    fn = click.option("--bound", type=int, default=None, help="Enumeration cap.")(fn)
    fn = click.option("--tol", type=float, default=DEFAULT_TOLERANCE, show_default=True, help="Numeric tolerance.")(fn)
    fn = click.option("--seed", type=int, default=0, show_default=True, help="Random seed.")(fn)
    return fn


def _execute(
    name: str,
    options: dict,
    compute: Callable[[dict], Outcome],
    *,
    seed: int,
    tol: float,
    bound: int | None,
    as_json: bool,
    input_path: str | None,
    record: bool,
    adapt_input: Callable[[dict], dict] = request_of,
) -> None:
    raw = {k: v for k, v in options.items() if v is not None}
    if input_path:
        raw.update(adapt_input(load_json(input_path)))
    request = {**raw, "seed": int(raw.get("seed", seed)), "tol": float(raw.get("tol", tol)), "bound": raw.get("bound", bound)}
    result, csv = compute(request)
    payload = _jsonable({**result, "command": name, "request": request, "tolerance": request["tol"]})
    if record:
        init_db()
        record_run(name, payload["request"], {k: v for k, v in payload.items() if k not in ("command", "request")})
    if as_json or csv is None:
        click.echo(dumps(payload))
    else:
        click.echo(csv)


def _phase(dim: int, text: str) -> PhasePoint:
    try:
        return PhasePoint.parse(dim, text)
    except (ValueError, ZeroDivisionError) as e:
        raise InvalidInputError(f"cannot parse phase {text!r}: {e}") from e


def _rows_option(dim: int | None, text: str | None) -> dict | None:
    """Rows as "a;b;c|d;e;f": rows split on '|', parties on ';', turns on ','."""
    if not text:
        return None
    if dim is None:
        raise InvalidInputError("--rows needs --D")
    rows = [[_phase(dim, cell) for cell in chunk.split(";")] for chunk in text.split("|") if chunk.strip()]
    return MerminScenario(dim, tuple(tuple(r) for r in rows)).to_dict()


def _scenario(request: dict) -> MerminScenario:
    data = request.get("scenario")
    if data is None:
        raise InvalidInputError("no scenario given: use --D with --rows, or --input")
    return MerminScenario.from_dict(data)


def _scenario_input(data: dict) -> dict:
    """Request from a previous output, a bare scenario object or a scenario-build result."""
    if data.get("command") == "scenario-build" or ("rows" in data and "request" not in data and "scenario" not in data):
        return {"scenario": {k: data[k] for k in ("D", "N", "rows") if k in data}}
    return request_of(data)


@click.group(cls=MerminGroup)
@click.option("--verbose", is_flag=True, help="Debug logging on stderr.")
def cli(verbose: bool):
    """Generalized Mermin non-locality toolkit."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )


# --- ext-check --------------------------------------------------------------


def _ext_check(request: dict) -> Outcome:
    group = FinAbGroup(tuple(request["group"]))
    subgroup = Subgroup.generated(group, request.get("subgroup", []))
    verdict = is_trivial_extension(group, subgroup, bound=request["bound"])
    result = verdict.to_dict()
    if request.get("oracle"):
        oracle = oracle_verdict(group, subgroup, bound=request["bound"])
        result["oracle_trivial"] = oracle.trivial
        result["oracle_agrees"] = oracle.trivial == verdict.trivial
    csv = csv_text(["group", "trivial", "witness"], [[str(group), verdict.trivial, result["witness"] or ""]])
    return result, csv


@cli.command("ext-check")
@click.option("--group", "group_text", default=None, help='Cyclic factors, e.g. "2,4".')
@click.option("--subgroup", "subgroup_text", default="", help='Generators, e.g. "1,0;0,2".')
@click.option("--oracle", is_flag=True, help="Cross-check with the exhaustive system search.")
@common_options
def ext_check(group_text, subgroup_text, oracle, **common):
    """Is G a trivial extension of H?"""
    options = {}
    if group_text is not None:
        group = FinAbGroup(tuple(parse_factors(group_text)))
        subgroup = Subgroup.generated(group, parse_elements(subgroup_text))
        options = {"group": list(group.factors), "subgroup": subgroup.to_dict()["generators"], "oracle": oracle}
    elif not common["input_path"]:
        raise click.UsageError("--group is required")
    _execute("ext-check", options, _ext_check, **common)


# --- scenarios --------------------------------------------------------------


def _scenario_build(request: dict) -> Outcome:
    witnesses = [PhaseEquation.from_dict(w) for w in request["witness"]]
    scenario = build_nonlocal_scenario(
        witnesses, layout=request.get("layout", "cyclic"), parties=request.get("parties"), bound=request["bound"]
    )
    result = {**scenario.to_dict(), "description": scenario.describe()}
    csv = csv_text(["row", "phases"], [[s, ";".join(str(p) for p in row)] for s, row in enumerate(scenario.rows)])
    return result, csv


@cli.command("scenario-build")
@click.option("--D", "dim", type=int, default=None, help="Qudit dimension.")
@click.option("--coeffs", default=None, help='Integer coefficients, e.g. "2" or "1,-1".')
@click.option("--phases", default=None, help='Witness phases separated by ";", turns by ",".')
@click.option("--rhs", default=None, help="Classical right-hand side phase.")
@click.option("--layout", type=click.Choice(["cyclic", "combinations"]), default="cyclic", show_default=True)
@click.option("--parties", type=int, default=None, help="Party count for the combinations layout.")
@common_options
def scenario_build(dim, coeffs, phases, rhs, layout, parties, **common):
    """Controls and variations realising a witness equation."""
    options = {}
    if dim is not None:
        if not (coeffs and phases and rhs):
            raise click.UsageError("--coeffs, --phases and --rhs are required with --D")
        eq = PhaseEquation(
            tuple(int(c) for c in coeffs.split(",")),
            tuple(_phase(dim, p) for p in phases.split(";")),
            _phase(dim, rhs),
        )
        options = {"witness": [eq.to_dict()], "layout": layout, "parties": parties}
    elif not common["input_path"]:
        raise click.UsageError("--D is required")
    _execute("scenario-build", options, _scenario_build, **common)


def _scenario_validate(request: dict) -> Outcome:
    report = validate_scenario(_scenario(request))
    csv = csv_text(["row", "classical_point"], list(enumerate(report.points)))
    return report.to_dict(), csv


@cli.command("scenario-validate")
@click.option("--D", "dim", type=int, default=None)
@click.option("--rows", default=None, help='Rows split on "|", parties on ";".')
@common_options
def scenario_validate(dim, rows, **common):
    """Check that every row sums to an X-classical point."""
    _execute(
        "scenario-validate", {"scenario": _rows_option(dim, rows)}, _scenario_validate, adapt_input=_scenario_input, **common
    )


def _simulate(request: dict) -> Outcome:
    scenario = _scenario(request)
    validate_scenario(scenario)
    pipeline = request.get("pipeline", "full")
    if pipeline not in ("full", "simplified"):
        raise InvalidInputError(f"unknown pipeline {pipeline!r}", pipelines=["full", "simplified"])
    rounds = int(request.get("rounds", 0))
    rng = np.random.default_rng(request["seed"])
    threshold = request["tol"]
    rows, csv_rows = [], []
    for s, row in enumerate(scenario.rows):
        if pipeline == "full":
            dist = mermin_outcome_distribution(scenario.dim, scenario.num_parties, row, bound=request["bound"])
        else:
            dist = simplified_outcome_distribution(scenario.dim, scenario.num_parties, row, bound=request["bound"])
        probs = distribution_csv_rows(dist, threshold)
        entry = {"row": s, "phases": [str(p) for p in row], "probs": dict(probs)}
        if rounds:
            samples = sample_outcomes(dist, rounds, rng)
            counts: dict[str, int] = {}
            for o in samples:
                key = format_tuple(int(v) for v in o)
                counts[key] = counts.get(key, 0) + 1
            entry["counts"] = dict(sorted(counts.items()))
        rows.append(entry)
        csv_rows += [[s, o, p] for o, p in probs]
    return {"rows": rows}, csv_text(["row", "outcome", "probability"], csv_rows)


@cli.command("simulate")
@click.option("--D", "dim", type=int, default=None)
@click.option("--rows", default=None, help='Rows split on "|", parties on ";".')
@click.option("--rounds", type=int, default=0, show_default=True, help="Also sample this many outcomes per row.")
@click.option("--pipeline", type=click.Choice(["full", "simplified"]), default="full", show_default=True)
@common_options
def simulate(dim, rows, rounds, pipeline, **common):
    """Outcome distributions of every measurement row."""
    options = {"scenario": _rows_option(dim, rows), "rounds": rounds, "pipeline": pipeline}
    _execute("simulate", options, _simulate, adapt_input=_scenario_input, **common)


def _lhv_check(request: dict) -> Outcome:
    scenario = _scenario(request)
    table = quantum_table(scenario, bound=request["bound"], threshold=max(request["tol"], POSSIBILITY_THRESHOLD))
    verdict = lhv_exists(table, request.get("mode", "possibilistic"), bound=request["bound"])
    result = {**verdict.to_dict(), "table": table.to_dict()}
    return result, csv_text(["lhv_exists", "mode"], [[verdict.exists, verdict.mode]])


@cli.command("lhv-check")
@click.option("--D", "dim", type=int, default=None)
@click.option("--rows", default=None, help='Rows split on "|", parties on ";".')
@click.option("--mode", type=click.Choice(["possibilistic", "parity"]), default="possibilistic", show_default=True)
@common_options
def lhv_check(dim, rows, mode, **common):
    """Does a local hidden variable model reproduce the quantum table?"""
    _execute(
        "lhv-check", {"scenario": _rows_option(dim, rows), "mode": mode}, _lhv_check, adapt_input=_scenario_input, **common
    )


# --- two-measurement scenarios ----------------------------------------------


def _newcond(request: dict) -> Outcome:
    dim, v, beta = int(request["D"]), int(request["V"]), int(request["beta"])
    if request.get("q"):
        found = scan_newcond(dim, v, beta, int(request["q"]), tol=request["tol"], bound=request["bound"])
        result = {"solutions": [str(b) for b in found], "count": len(found)}
        return result, csv_text(["b"], [[f'"{b}"'] for b in found])
    if request.get("b") is None:
        raise InvalidInputError("give a phase b or a grid size q")
    b = PhasePoint.from_json(dim, request["b"])
    outcome = evaluate_newcond(dim, v, beta, b, tol=request["tol"])
    result = outcome.to_dict()
    result["complementarity"] = complementarity_report(fourier_basis(dim), phased_basis(b), tol=request["tol"]).to_dict()
    return result, csv_text(["effective", "residual_abs"], [[outcome.effective, abs(outcome.residual)]])


@cli.command("newcond")
@click.option("--D", "dim", type=int, default=None)
@click.option("--V", "variations", type=int, default=None, help="Number of variations.")
@click.option("--beta", type=int, default=None, help="Parties measuring B per variation.")
@click.option("--b", "b_text", default=None, help='B phase in turns, e.g. "1/4" or "1/9,-1/9".')
@click.option("--q", type=int, default=None, help="Scan the 1/q grid instead of a single b.")
@common_options
def newcond(dim, variations, beta, b_text, q, **common):
    """Effectiveness of an (X, B) pair: sum_j e^{i c_j} = -1."""
    options = {}
    if dim is not None:
        if variations is None or beta is None:
            raise click.UsageError("--V and --beta are required")
        options = {
            "D": dim,
            "V": variations,
            "beta": beta,
            "b": None if b_text is None else _phase(dim, b_text).to_json(),
            "q": q,
        }
    elif not common["input_path"]:
        raise click.UsageError("--D is required")
    _execute("newcond", options, _newcond, **common)


def _pairs_count(request: dict) -> Outcome:
    series = pair_series(
        request["parties"], int(request["D"]), int(request["q"]), request.get("policy", "combinations"),
        tol=request["tol"], bound=request["bound"],
    )
    rows = [pc.csv_row().split(",") for pc in series]
    result = {"series": [pc.to_dict() for pc in series]}
    if request.get("plot_script"):
        script_path = Path(request["plot_script"])
        data_path = script_path.with_suffix(".csv")
        data_path.write_text(csv_text(["N", "D", "q", "policy", "count"], rows) + "\n", encoding="utf-8")
        script_path.write_text(
            gnuplot_script(data_path.name, f"effective pairs, D={request['D']}, q={request['q']}") + "\n",
            encoding="utf-8",
        )
        result["plot_files"] = [str(script_path), str(data_path)]
    return result, csv_text(["N", "D", "q", "policy", "count"], rows)


@cli.command("pairs-count")
@click.option("--D", "dim", type=int, default=None)
@click.option("--n-min", type=int, default=3, show_default=True)
@click.option("--n-max", type=int, default=None)
@click.option("--q", type=int, default=None, help="Grid denominator for b.")
@click.option("--policy", type=click.Choice(PAIR_POLICIES), default="combinations", show_default=True)
@click.option("--plot-script", type=click.Path(dir_okay=False), default=None, help="Write a gnuplot script and its CSV data.")
@common_options
def pairs_count(dim, n_min, n_max, q, policy, plot_script, **common):
    """Effective (X, B) pairs per party count."""
    options = {}
    if dim is not None:
        if q is None:
            raise click.UsageError("--q is required")
        top = n_min if n_max is None else n_max
        options = {"D": dim, "parties": list(range(n_min, top + 1)), "q": q, "policy": policy, "plot_script": plot_script}
    elif not common["input_path"]:
        raise click.UsageError("--D is required")

    def compute(request: dict) -> Outcome:
        result, csv = _pairs_count(request)
        if common["record"]:
            init_db()
            save_pair_counts(result["series"])
        return result, csv

    _execute("pairs-count", options, compute, **common)


# --- relations --------------------------------------------------------------


def _frel_verify(request: dict) -> Outcome:
    g = FinAbGroup(tuple(request["G"]))
    h = FinAbGroup(tuple(request["H"]))
    pair = build_sc_pair(g, h, bound=request["bound"])
    laws = verify_frel_laws(pair)
    phases = rel_phases(pair)
    verdict = frel_locality_check(g, h, bound=request["bound"])
    result = {
        "laws": laws.to_dict(),
        "phases": phases.to_dict(),
        "phases_closed": phases_closed(phases),
        "trivial": verdict.trivial,
        "witness": verdict.to_dict()["witness"],
    }
    csv = csv_text(["G", "H", "laws_ok", "trivial"], [[str(g), str(h), laws.all_ok, verdict.trivial]])
    return result, csv


@cli.command("frel-verify")
@click.option("--G", "g_text", default=None, help='Cyclic factors of G, e.g. "2,2".')
@click.option("--H", "h_text", default=None, help="Cyclic factors of H.")
@common_options
def frel_verify(g_text, h_text, **common):
    """Relational laws, phases and locality for the groupoid pair on G x H."""
    options = {}
    if g_text is not None and h_text is not None:
        options = {"G": parse_factors(g_text), "H": parse_factors(h_text)}
    elif not common["input_path"]:
        raise click.UsageError("--G and --H are required")
    _execute("frel-verify", options, _frel_verify, **common)


# --- secret sharing ---------------------------------------------------------


def _qss_run(request: dict) -> Outcome:
    cfg = QssConfig.from_dict({**request["config"], "seed": request["seed"]})
    attack = request.get("attack", "none")
    secret = int(request.get("secret", 0))
    bound = request["bound"]
    if attack == "none":
        run = run_protocol(cfg, secret, bound=bound)
        result = run.summary()
        if request.get("transcript"):
            Path(request["transcript"]).write_text(
                "".join(t.to_json() + "\n" for t in run.transcripts()), encoding="utf-8"
            )
        csv = csv_text(["rounds", "accuracy", "failure_rate", "tv_distance"], [run.csv_row().split(",")])
    elif attack == "pre_phase_substitution":
        target = request.get("target")
        report = simulate_pre_phase_attack(
            cfg, None if target is None else tuple(target), secret=secret, bound=bound
        )
        result = report.to_dict()
        csv = csv_text(["rounds", "failure_rate", "expected_failure"], [[report.rounds, report.failure_rate, report.expected_failure]])
    elif attack == "post_phase_deterministic":
        report = simulate_device_independent_attack(
            cfg, min_rounds=int(request.get("min_rounds", QSS_MIN_ROUNDS)), bound=bound
        )
        result = report.to_dict()
        csv = csv_text(["verdict", "tables_checked", "tables_detected"], [[report.verdict, report.tables_checked, report.tables_detected]])
    elif attack == "withholding":
        report = withholding_leakage(cfg, int(request.get("withheld", 1)), bound=bound)
        result = report.to_dict()
        csv = csv_text(["withheld", "mutual_information", "tv_distance"], [[report.withheld, report.mutual_information, report.tv_distance]])
    else:
        raise InvalidInputError(f"unknown attack {attack!r}", attacks=list(QSS_ATTACKS))
    return {**result, "attack": attack}, csv


@cli.command("qss-run")
@click.option("--players", type=int, default=None)
@click.option("--D", "dim", type=int, default=2, show_default=True)
@click.option("--alphabet", default="0;1/4", show_default=True, help='Phases every party may use, separated by ";".')
@click.option("--rounds", type=int, default=1000, show_default=True)
@click.option("--secret", type=int, default=0, show_default=True)
@click.option(
    "--attack",
    type=click.Choice(QSS_ATTACKS),
    default="none",
    show_default=True,
)
@click.option("--withheld", type=int, default=1, show_default=True, help="Silent player for the withholding attack.")
@click.option("--transcript", type=click.Path(dir_okay=False), default=None, help="Write JSON-lines round transcripts.")
@common_options
def qss_run(players, dim, alphabet, rounds, secret, attack, withheld, transcript, **common):
    """Monte Carlo run of the secret sharing protocol."""
    options = {}
    if players is not None:
        cfg = QssConfig.uniform(
            players, dim, [_phase(dim, p) for p in alphabet.split(";")], seed=common["seed"], rounds=rounds
        )
        options = {"config": cfg.to_dict(), "secret": secret, "attack": attack, "withheld": withheld, "transcript": transcript}
    elif not common["input_path"]:
        raise click.UsageError("--players is required")

    def compute(request: dict) -> Outcome:
        result, csv = _qss_run(request)
        if common["record"] and request.get("attack", "none") == "none":
            init_db()
            save_qss_summary(request["config"]["players"], request["config"]["D"], result)
        return result, csv

    _execute("qss-run", options, compute, **common)


if __name__ == "__main__":
    cli()
