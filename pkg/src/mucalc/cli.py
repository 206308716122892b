"""Command-line front end: a thin client of the verification service.

By default requests are served in-process through an ASGI transport, so no
server is needed; `--server URL` targets a running instance instead.  Exit
codes: 0 for positive verdicts, 1 for negative verdicts, 2 for usage or
resource errors.
"""

from __future__ import annotations

import json
import os
import sys
import tempfile
from pathlib import Path

import click
import httpx


class Client:
    def __init__(self, server: str | None):
        if server:
            self._client = httpx.Client(base_url=server, timeout=600.0)
        else:
            import warnings
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                from starlette.testclient import TestClient
            from .service.app import app
            self._client = TestClient(app)

    def post(self, endpoint: str, payload: dict) -> dict:
        resp = self._client.post(endpoint, json=payload)
        if resp.status_code != 200:
            try:
                detail = resp.json().get("detail", resp.text)
            except Exception:
                detail = resp.text
            click.echo(f"error: {detail}", err=True)
            sys.exit(2)
        return resp.json()


def _write(out_dir: str, name: str, content: str):
    path = Path(out_dir)
    path.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path, prefix=name + ".")
    with os.fdopen(fd, "w") as fh:
        fh.write(content)
    os.replace(tmp, path / name)
    click.echo(f"wrote {path / name}", err=True)


def _emit(ctx, data: dict, text: str):
    if ctx.obj["json"]:
        click.echo(json.dumps(data, indent=2, sort_keys=True))
    else:
        click.echo(text)


@click.group()
@click.option("--server", default=None, help="URL of a running service; "
              "default runs in-process.")
@click.option("--out", default=".", show_default=True,
              help="Directory for artifact files.")
@click.option("--json", "as_json", is_flag=True,
              help="Emit one structured JSON document on stdout.")
@click.pass_context
def main(ctx, server, out, as_json):
    """Modal mu-calculus verification toolkit."""
    ctx.ensure_object(dict)
    ctx.obj.update(client=Client(server), out=out, json=as_json)


@main.command()
@click.argument("formula")
@click.pass_context
def normalize(ctx, formula):
    """Well-named and cover-modality normal forms of FORMULA."""
    data = ctx.obj["client"].post("/normalize", {"formula": formula})
    _emit(ctx, data, f"well-named: {data['well_named']}\n"
                     f"cover form: {data['cover_form']}\n"
                     f"alternation depth: {data['alternation_depth']}")


@main.command()
@click.argument("model", type=click.Path(exists=True))
@click.argument("world")
@click.argument("formula")
@click.pass_context
def modelcheck(ctx, model, world, formula):
    """Does FORMULA hold at WORLD of the MODEL (JSON file)?"""
    payload = {"formula": formula, "world": world,
               "model": json.loads(Path(model).read_text())}
    data = ctx.obj["client"].post("/modelcheck", payload)
    _emit(ctx, data, f"{'true' if data['holds'] else 'false'} "
                     f"(denotation: {', '.join(data['denotation']) or 'empty'})")
    sys.exit(0 if data["holds"] else 1)


@main.command()
@click.argument("formula")
@click.pass_context
def sat(ctx, formula):
    """Decide satisfiability; SAT ships a model, UNSAT a refutation."""
    data = ctx.obj["client"].post("/sat", {"formula": formula})
    out = ctx.obj["out"]
    if data["verdict"] == "SAT":
        _write(out, "model.json", json.dumps(data["model"], indent=2))
        _emit(ctx, data, f"SAT (witness world {data['world']})")
        sys.exit(0)
    _write(out, "refutation.json", json.dumps(data["refutation"], indent=2))
    _write(out, "refutation.dot", data["refutation_dot"])
    _emit(ctx, data, "UNSAT (refutation written)")
    sys.exit(1)


@main.command()
@click.argument("formula")
@click.pass_context
def valid(ctx, formula):
    """Validity of FORMULA (unsatisfiability of its negation)."""
    data = ctx.obj["client"].post("/valid", {"formula": formula})
    if data["valid"]:
        _emit(ctx, data, "valid")
        sys.exit(0)
    _write(ctx.obj["out"], "countermodel.json",
           json.dumps(data["countermodel"], indent=2))
    _emit(ctx, data, f"not valid (countermodel at {data['counterworld']})")
    sys.exit(1)


@main.command()
@click.argument("formula")
@click.pass_context
def anf(ctx, formula):
    """Automaton normal form with its bisimulation certificate."""
    data = ctx.obj["client"].post("/anf", {"formula": formula})
    out = ctx.obj["out"]
    _write(out, "anf.txt", data["anf"] + "\n")
    _write(out, "anf_tableau.dot", data["rebuilt_dot"])
    certificate = {"anf": data["anf"], "relation": data["relation"],
                   "correspondence": data["correspondence"],
                   "base_tableau": data["base_tableau"],
                   "rebuilt_tableau": data["rebuilt_tableau"]}
    _write(out, "anf_certificate.json", json.dumps(certificate, indent=2))
    _emit(ctx, data, f"anf: {data['anf']}\n"
                     f"is_anf: {data['is_anf']}  "
                     f"bisimulation: {data['bisimulation_valid']}")
    sys.exit(0 if data["is_anf"] and data["bisimulation_valid"] else 1)


@main.command()
@click.argument("formula")
@click.option("--policy", default="default", show_default=True,
              type=click.Choice(["default", "narrow"]))
@click.pass_context
def tableau(ctx, formula, policy):
    """Back-edge tableau of FORMULA."""
    data = ctx.obj["client"].post("/tableau", {"formula": formula,
                                               "policy": policy})
    out = ctx.obj["out"]
    _write(out, "tableau.json", json.dumps(data["tableau"], indent=2))
    _write(out, "tableau.dot", data["dot"])
    _emit(ctx, data, f"{data['nodes']} nodes")


@main.command()
@click.argument("left")
@click.argument("right")
@click.pass_context
def bisim(ctx, left, right):
    """Search for a tableau bisimulation between two formulas' tableaux."""
    data = ctx.obj["client"].post("/bisim", {"left": left, "right": right})
    if data["holds"]:
        _emit(ctx, data, f"bisimilar ({len(data['pairs'])} pairs)")
        sys.exit(0)
    _emit(ctx, data, f"not bisimilar: {data['reason']}")
    sys.exit(1)


@main.command()
@click.argument("left")
@click.argument("right")
@click.pass_context
def consequence(ctx, left, right):
    """Construct a consequence relation from LEFT's tableau to RIGHT's
    narrow tableau."""
    data = ctx.obj["client"].post("/consequence", {"left": left, "right": right})
    if data["holds"]:
        _emit(ctx, data, f"consequence holds ({len(data['pairs'])} pairs)")
        sys.exit(0)
    _emit(ctx, data, f"no consequence: {data['reason']}")
    sys.exit(1)


@main.command(name="claim-g")
@click.argument("formula")
@click.option("--variable", "-x", default="x", show_default=True)
@click.pass_context
def claim_g(ctx, formula, variable):
    """Certificate chain for the fixpoint-unfolding consequence."""
    data = ctx.obj["client"].post("/claim-g", {"formula": formula,
                                               "variable": variable})
    cert = {"alpha_hat": data["alpha_hat"], "phi_hat": data["phi_hat"],
            "pairs": data["pairs"], "links": data["links"],
            "left_tableau": data["left_tableau"],
            "right_tableau": data["right_tableau"]}
    _write(ctx.obj["out"], "claim_g_certificate.json",
           json.dumps(cert, indent=2))
    _emit(ctx, data, f"phi_hat: {data['phi_hat']}\n"
                     f"certificate valid ({len(data['pairs'])} pairs, "
                     f"{len(data['links'])} links)")
    sys.exit(0 if data["valid"] else 1)


@main.command()
@click.argument("formula")
@click.pass_context
def refute(ctx, formula):
    """Extract and validate a refutation (succeeds when FORMULA is UNSAT)."""
    data = ctx.obj["client"].post("/refute", {"formula": formula})
    if data["verdict"] != "UNSAT":
        _emit(ctx, data, "formula is satisfiable; nothing to refute")
        sys.exit(1)
    out = ctx.obj["out"]
    _write(out, "refutation.json", json.dumps(data["refutation"], indent=2))
    _write(out, "refutation.dot", data["dot"])
    _emit(ctx, data, f"UNSAT; refutation valid={data['valid']} "
                     f"thin={data['thin']}")
    sys.exit(0 if data["valid"] else 1)


@main.command(name="thin-check")
@click.argument("refutation", type=click.Path(exists=True))
@click.pass_context
def thin_check(ctx, refutation):
    """Validate a refutation JSON file and report thinness."""
    payload = {"refutation": json.loads(Path(refutation).read_text())}
    data = ctx.obj["client"].post("/thin-check", payload)
    if not data["valid"]:
        _emit(ctx, data, f"invalid refutation: {data['condition']}")
        sys.exit(1)
    _write(ctx.obj["out"], "thinness_report.json",
           json.dumps(data["report"], indent=2))
    _emit(ctx, data, f"valid refutation; thin={data['thin']}")
    sys.exit(0 if data["thin"] else 1)


@main.command()
@click.argument("proof", type=click.Path(exists=True))
@click.pass_context
def proofcheck(ctx, proof):
    """Check a Koz proof object (.json document or compact text form)."""
    text = Path(proof).read_text()
    payload: dict = {}
    try:
        payload["proof"] = json.loads(text)
    except json.JSONDecodeError:
        payload["text"] = text
    data = ctx.obj["client"].post("/proofcheck", payload)
    if data["ok"]:
        _emit(ctx, data, f"proof accepted: {data['conclusion']}")
        sys.exit(0)
    _emit(ctx, data, f"proof rejected: {data['reason']}")
    sys.exit(1)


if __name__ == "__main__":
    main()
