"""Staged batch runs: generate, rotate, count, lift-check, classify, audit, bound.

Artifacts are built in memory and written only after every requested
stage has succeeded, so a failed run leaves no partial output.
"""

from __future__ import annotations

import hashlib
import json
import platform
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Dict

from . import __version__
from .bounds import BoundParams, Observation, compare_report
from .config import RunConfig
from .exact import (
    Collection,
    GeometryError,
    RationalRotation,
    RotationSearchError,
    apply_rotation,
    find_generic_rotation,
)
from .fileformat import CollectionFormatError, dumps_collection, parse_collection
from .generators import GeneratorSpec
from .incidence import ChainInconsistency, algebraic_chain, chain_text, classify_incidences, report_text
from .lift import check_lifting
from .nondegeneracy import ConditionIViolation, audit, verdict_text
from .partition import heuristic_partition
from .polyalg import PolynomialError, parse_poly, to_text
from .tangency import common_point_triples, count_pairs_hashed, graph_to_csv

EXIT_OK, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2


class PipelineError(Exception):
    def __init__(self, stage: str, kind: str, message: str, exit_code: int):
        super().__init__(message)
        self.stage = stage
        self.kind = kind
        self.exit_code = exit_code

    def record(self) -> dict:
        return {"error": self.kind, "stage": self.stage, "message": str(self), "exit_code": self.exit_code}


@dataclass
class RunResult:
    artifacts: Dict[str, str]
    collection: Collection
    rotated: Collection


def build_collection(config: RunConfig, base: Path = Path(".")) -> Collection:
    if config.generator is not None:
        g = config.generator
        spec = GeneratorSpec(g.kind, g.count, g.m, g.n, config.seed, g.coord_bound, config.mode)
        return spec.build()
    path = Path(config.input)
    if not path.is_absolute():
        path = base / path
    c = parse_collection(path)
    if config.mode and config.mode != c.mode:
        c = Collection(c.spheres, c.dimension, config.mode)
    return c


def choose_rotation(config: RunConfig, collection: Collection) -> RationalRotation:
    rot = config.rotation
    if rot.policy == "identity":
        return RationalRotation.identity(collection.dimension)
    if rot.policy == "explicit":
        return RationalRotation(tuple(tuple(Fraction(v) for v in row) for row in rot.matrix))
    return find_generic_rotation(collection)


@contextmanager
def stage_errors(name: str):
    """Map library exceptions raised inside a stage to pipeline errors."""
    try:
        yield
    except PipelineError:
        raise
    except ConditionIViolation as exc:
        raise PipelineError(name, "condition_i_violated", str(exc), EXIT_INPUT) from exc
    except ChainInconsistency as exc:
        raise PipelineError(name, "internal_inconsistency", str(exc), EXIT_INTERNAL) from exc
    except RotationSearchError as exc:
        raise PipelineError(name, "rotation_search_exhausted", str(exc), EXIT_INPUT) from exc
    except (CollectionFormatError, GeometryError, PolynomialError, ValueError, OSError) as exc:
        raise PipelineError(name, "input_error", str(exc), EXIT_INPUT) from exc


def run_pipeline(config: RunConfig, base: Path = Path("."), threads: int = 1) -> RunResult:
    artifacts: Dict[str, str] = {}
    with stage_errors("generate"):
        collection = build_collection(config, base)
    artifacts["collection.jsonl"] = dumps_collection(collection)

    with stage_errors("rotate"):
        rotation = choose_rotation(config, collection)
        rotated = apply_rotation(collection, rotation)
    artifacts["rotation.json"] = json.dumps(
        {"matrix": [[str(v) for v in row] for row in rotation.matrix],
         "skew": [str(v) for v in rotation.skew]},
        indent=2,
    ) + "\n"
    artifacts["rotated_collection.jsonl"] = dumps_collection(rotated)

    stages = set(config.stages)
    graph = None
    condition_i = None
    if stages & {"count", "bound"}:
        with stage_errors("count"):
            graph = count_pairs_hashed(collection, workers=threads)
            condition_i = not common_point_triples(graph)
        if "count" in stages:
            artifacts["graph.csv"] = graph_to_csv(graph, collection.dimension)

    if "lift_check" in stages:
        with stage_errors("lift_check"):
            check = check_lifting(rotated)
        if not check.passed:
            raise PipelineError("lift_check", "internal_inconsistency", check.to_text(), EXIT_INTERNAL)
        artifacts["lift_check.txt"] = check.to_text()

    if "classify" in stages:
        with stage_errors("classify"):
            part = config.partition
            if part.source == "file":
                ppath = Path(part.path)
                if not ppath.is_absolute():
                    ppath = base / ppath
                poly = parse_poly(ppath.read_text(), collection.dimension)
            else:
                poly = heuristic_partition(rotated, part.degree)
            report = classify_incidences(rotated, poly)
            chain = algebraic_chain(rotated, poly) if not poly.is_zero() else None
        if report.total != 2 * sum(1 for _ in count_pairs_hashed(rotated).edges):
            raise PipelineError("classify", "internal_inconsistency", "I1+I3+I4 != I", EXIT_INTERNAL)
        artifacts["partition.txt"] = to_text(poly) + "\n"
        artifacts["incidences.txt"] = report_text(report)
        if chain is not None:
            artifacts["chain.txt"] = chain_text(chain)

    verdict = None
    if "audit" in stages:
        a = config.audit
        with stage_errors("audit"):
            verdict = audit(collection, a.b, a.d, require_condition_i=a.require_condition_i)
        artifacts["audit.txt"] = verdict_text(verdict)

    if "bound" in stages:
        with stage_errors("bound"):
            bc = config.bound
            params = BoundParams(collection.dimension, Fraction(bc.epsilon), Fraction(bc.c1), Fraction(bc.c2))
            n_count = len(collection)
            b = bc.b if bc.b is not None else (config.audit.b if config.audit else n_count)
            b = min(max(b, 1), n_count)
            label = config.generator.kind if config.generator else Path(config.input).stem
            obs = Observation(label, b, n_count, graph.ordered_count, condition_i)
            rep = compare_report([obs], params)
        artifacts["bounds.csv"] = rep.to_csv()
        artifacts["bounds.txt"] = rep.table()
        artifacts["plot_data.csv"] = rep.plot_data()
        if rep.inconsistent:
            raise PipelineError("bound", "internal_inconsistency", "observed count exceeds bound", EXIT_INTERNAL)

    manifest = {
        "config": config.model_dump(mode="json"),
        "versions": {"sphere_tangency": __version__, "python": platform.python_version()},
        "artifacts": {
            name: hashlib.sha256(text.encode()).hexdigest() for name, text in sorted(artifacts.items())
        },
    }
    artifacts["manifest.json"] = json.dumps(manifest, indent=2, sort_keys=True) + "\n"
    return RunResult(artifacts, collection, rotated)


def write_artifacts(artifacts: Dict[str, str], out_dir) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, text in sorted(artifacts.items()):
        (out / name).write_text(text)
