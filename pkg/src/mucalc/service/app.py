"""FastAPI service exposing the verification pipeline.

Every endpoint is a pure request/response wrapper over the core package; the
CLI is a thin client of this service (in-process by default).
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import anf as anf_mod
from .. import koz
from .. import refutation as refut
from .. import relations as rel_mod
from ..formula import (BindingInfo, ParseError, negate, normalize, parse,
                       pretty, to_dict, to_source, to_well_named)
from ..kripke import KripkeModel, UnboundVariableError, build_evaluation_game, denote, model_check
from ..omega.automaton import ResourceBudgetError
from ..omega.trace_automaton import trace_detector
from ..tableau import (TableauBudgetError, build_narrow_tableau, build_tableau,
                       decide_sat)
from ..tableau.graph import RegularTableau
from . import models as M

app = FastAPI(title="mucalc", description="modal mu-calculus verification service")


def _fail(status: int, exc: Exception):
    raise HTTPException(status_code=status, detail=f"{type(exc).__name__}: {exc}")


def _guard(fn):
    try:
        return fn()
    except (ParseError, ValueError, KeyError, UnboundVariableError) as exc:
        _fail(422, exc)
    except (TableauBudgetError, ResourceBudgetError, RecursionError) as exc:
        _fail(507, exc)


@app.get("/health")
def health() -> dict:
    return {"status": "ok"}


@app.post("/normalize", response_model=M.NormalizeResponse)
def normalize_endpoint(req: M.FormulaRequest):
    def run():
        f = parse(req.formula)
        wn = to_well_named(f)
        cf = normalize(f)
        return M.NormalizeResponse(
            input=req.formula,
            well_named=to_source(wn),
            cover_form=to_source(cf),
            alternation_depth=BindingInfo(wn).alternation_depth(),
            ast=to_dict(cf))
    return _guard(run)


@app.post("/modelcheck", response_model=M.ModelCheckResponse)
def modelcheck_endpoint(req: M.ModelCheckRequest):
    def run():
        f = to_well_named(parse(req.formula))
        model = KripkeModel.from_dict(req.model)
        if req.world not in model.worlds:
            raise KeyError(f"{req.world!r} is not a world of the model")
        game = build_evaluation_game(f, model, req.world)
        return M.ModelCheckResponse(
            holds=model_check(f, model, req.world),
            denotation=sorted(denote(f, model)),
            game_positions=len(game.positions))
    return _guard(run)


@app.post("/sat", response_model=M.SatResponse)
def sat_endpoint(req: M.SatRequest):
    def run():
        result = decide_sat(parse(req.formula))
        out = M.SatResponse(
            verdict=result.verdict,
            formula=to_source(result.formula),
            tableau_nodes=len(result.tableau.nodes),
            tableau_dot=result.tableau.to_dot())
        if result.verdict == "SAT":
            out.model = result.model.to_dict()
            out.world = result.world
        else:
            out.refutation = result.refutation.to_dict()
            out.refutation_dot = result.refutation.to_dot()
        return out
    return _guard(run)


@app.post("/valid", response_model=M.ValidResponse)
def valid_endpoint(req: M.FormulaRequest):
    def run():
        f = parse(req.formula)
        result = decide_sat(negate(f))
        out = M.ValidResponse(valid=result.verdict == "UNSAT",
                              formula=to_source(f))
        if result.verdict == "SAT":
            out.countermodel = result.model.to_dict()
            out.counterworld = result.world
        return out
    return _guard(run)


@app.post("/anf", response_model=M.AnfResponse)
def anf_endpoint(req: M.AnfRequest):
    def run():
        a = normalize(parse(req.formula))
        res = anf_mod.build_anf(a)
        relation = rel_mod.NodeRelation(res.base, res.rebuilt, res.relation,
                                        "bisimulation")
        report = rel_mod.check_bisimulation(res.base, res.rebuilt, relation)
        cor = [{"formula": to_source(k), "label": [to_source(g) for g in v]}
               for k, v in sorted(res.f_map.items(), key=lambda kv: kv[0].key)]
        return M.AnfResponse(
            input=to_source(a),
            anf=to_source(res.formula),
            is_anf=anf_mod.is_anf(res.formula),
            bisimulation_valid=report.ok,
            relation=sorted(map(list, res.relation)),
            correspondence=cor,
            base_tableau=res.base.to_dict(),
            rebuilt_tableau=res.rebuilt.to_dict(),
            rebuilt_dot=res.rebuilt.to_dot())
    return _guard(run)


@app.post("/tableau", response_model=M.TableauResponse)
def tableau_endpoint(req: M.TableauRequest):
    def run():
        f = normalize(parse(req.formula))
        if req.policy not in ("default", "narrow"):
            raise ValueError(f"unknown policy {req.policy!r}")
        t = build_tableau(f, policy=req.policy)
        t.annotate_stats(trace_detector(f))
        return M.TableauResponse(formula=to_source(f), nodes=len(t.nodes),
                                 tableau=t.to_dict(), dot=t.to_dot())
    return _guard(run)


@app.post("/bisim", response_model=M.RelationResponse)
def bisim_endpoint(req: M.RelationRequest):
    def run():
        f = normalize(parse(req.left))
        g = normalize(parse(req.right))
        tf, tg = build_tableau(f, share=False), build_tableau(g, share=False)
        found = rel_mod.find_bisimulation(tf, tg, node_cap=req.node_cap)
        if found is None:
            return M.RelationResponse(holds=False, kind="bisimulation",
                                      reason="no relation survives the checks",
                                      left_tableau=tf.to_dict(),
                                      right_tableau=tg.to_dict())
        return M.RelationResponse(holds=True, kind="bisimulation",
                                  pairs=sorted(map(list, found.pairs)),
                                  left_tableau=tf.to_dict(),
                                  right_tableau=tg.to_dict())
    return _guard(run)


@app.post("/consequence", response_model=M.RelationResponse)
def consequence_endpoint(req: M.RelationRequest):
    def run():
        f = normalize(parse(req.left))
        g = normalize(parse(req.right))
        tf = build_tableau(f, share=False)
        tg = build_narrow_tableau(g, share=False)
        found = rel_mod.find_consequence(tf, tg)
        if found is None:
            return M.RelationResponse(holds=False, kind="consequence",
                                      reason="search found no relation")
        report = rel_mod.check_consequence(tf, tg, found)
        return M.RelationResponse(
            holds=report.ok, kind="consequence",
            pairs=sorted(map(list, found.pairs)),
            reason="" if report.ok else report.condition)
    return _guard(run)


@app.post("/claim-g", response_model=M.ClaimGResponse)
def claim_g_endpoint(req: M.ClaimGRequest):
    def run():
        ah = normalize(parse(req.formula))
        try:
            res = rel_mod.claim_g_certificate(ah, req.variable)
        except rel_mod.ClaimGError as exc:
            raise ValueError(str(exc))
        return M.ClaimGResponse(
            alpha_hat=to_source(ah),
            phi_hat=to_source(res.phi_hat),
            valid=True,
            pairs=sorted(map(list, res.relation.pairs)),
            links=[{"name": name, "pairs": len(z.pairs)} for name, z in res.links],
            left_tableau=res.left_tableau.to_dict(),
            right_tableau=res.right_tableau.to_dict())
    return _guard(run)


@app.post("/refute", response_model=M.RefuteResponse)
def refute_endpoint(req: M.RefuteRequest):
    def run():
        result = decide_sat(parse(req.formula))
        out = M.RefuteResponse(verdict=result.verdict,
                               formula=to_source(result.formula))
        if result.verdict == "UNSAT":
            report = refut.validate_refutation(result.refutation)
            thin = refut.check_thin(result.refutation)
            out.refutation = result.refutation.to_dict()
            out.valid = report.ok
            out.thin = thin.thin
            out.dot = result.refutation.to_dot()
        return out
    return _guard(run)


@app.post("/thin-check", response_model=M.ThinCheckResponse)
def thin_check_endpoint(req: M.ThinCheckRequest):
    def run():
        r = RegularTableau.from_dict(req.refutation)
        report = refut.validate_refutation(r)
        if not report.ok:
            return M.ThinCheckResponse(valid=False, condition=report.condition)
        thin = refut.check_thin(r)
        return M.ThinCheckResponse(valid=True, thin=thin.thin,
                                   report=thin.to_dict())
    return _guard(run)


@app.post("/proofcheck", response_model=M.ProofCheckResponse)
def proofcheck_endpoint(req: M.ProofCheckRequest):
    def run():
        if req.proof is not None:
            step = koz.ProofStep.from_dict(req.proof)
        elif req.text is not None:
            step = koz.parse_proof(req.text)
        else:
            raise ValueError("provide either a proof document or its text form")
        result = koz.check_proof(step)
        return M.ProofCheckResponse(ok=result.ok, reason=result.reason,
                                    conclusion=koz.seq_str(step.conclusion))
    return _guard(run)
