"""Command-line interface.

Subcommands:
  classify   full pipeline on an admissible-data document
  normalize  equivariant Poincare-Dulac normal form of a germ document
  koenigs    fiberwise linearization of a family (z, alpha*w*(1+eps))
  graph      check | contract | shape on a dual-graph document
  hj         expand m q | fold b1 b2 ...
  orbifold   classify | cover | degree on an orbifold document
  verify     run the verification suite; exit 0 iff everything passes
"""

from __future__ import annotations

import argparse
import json
import sys

from . import verify as verify_suite
from .classify import AdmissibleDataDocument, build_report, classify_singularity
from .dual_graph import (
    CyclicQuotientData,
    DualGraphDocument,
    GraphShape,
    hj_expand,
    hj_fold,
    intersection_matrix,
    is_negative_definite,
    minimal_negative_model,
    shape,
)
from .errors import CassisError
from .jets import DiagonalGroup, Jet, check_commutes, compose
from .normal_forms import koenigs, poincare_dulac
from .orbifold import (
    OrbibundleData,
    OrbifoldSurface,
    canonical_cover_degree,
    classify_orbifold,
    euler_characteristic,
    is_contractible,
    orbidegree,
    smooth_cover_data,
)
from .scalars import EXACT, FLOAT

DEFAULT_ORDER = 12


def _load_json(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _emit(payload: dict, output: str | None) -> None:
    text = json.dumps(payload, indent=2)
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _parse_germ_document(obj: dict, mode: str):
    jet = Jet.from_json_dict(obj["jet"], mode)
    group = (
        DiagonalGroup.from_json_dict(obj["group"])
        if "group" in obj and obj["group"]
        else DiagonalGroup(1, tuple(0 for _ in range(jet.dim)))
    )
    k_twist = int(obj.get("k_twist", 1))
    return jet, group, k_twist


def _cmd_classify(args) -> int:
    doc = AdmissibleDataDocument.from_json_dict(_load_json(args.input), args.mode)
    classification = classify_singularity(doc, order=args.order)
    _emit(build_report(classification), args.output)
    return 0


def _cmd_normalize(args) -> int:
    jet, group, k_twist = _parse_germ_document(_load_json(args.input), args.mode)
    result = poincare_dulac(jet, group, k_twist, min(args.order, jet.order))
    payload = {
        "normal_form": result.normal_form.to_json_dict(),
        "conjugacy": result.conjugacy.to_json_dict(),
        "residual_norm": result.residual_norm,
        "group_residual_norm": result.group_residual_norm,
        "k_twist": result.k_twist,
        "path": result.path,
    }
    if result.resonance_report is not None:
        rep = result.resonance_report
        payload["resonances"] = {
            "order": rep.order,
            "resonant": [{"exponents": list(n), "coordinate": k} for n, k in rep.resonant],
            "all_clear": rep.all_clear,
            "no_resonance_beyond": rep.no_resonance_beyond,
            "exhaustive": rep.exhaustive,
        }
    _emit(payload, args.output)
    return 0


def _cmd_koenigs(args) -> int:
    obj = _load_json(args.input)
    jet, group, _ = _parse_germ_document(obj, args.mode)
    order = min(args.order, jet.order)
    eta = koenigs(jet, order)
    alpha = jet.coords[1][(0, 1)]
    scaled = Jet(
        2, order, (eta.coords[0], {n: alpha * c for n, c in eta.coords[1].items()}), eta.mode
    )
    residual = (compose(eta, jet.truncated(order), order) - scaled).max_abs_coefficient()
    payload = {
        "eta": eta.to_json_dict(),
        "conjugacy_residual": residual,
    }
    if group.order > 1:
        payload["group_residual"] = check_commutes(eta, group, 1).max_abs_coefficient()
    _emit(payload, args.output)
    return 0


def _cmd_graph(args) -> int:
    graph = DualGraphDocument.from_json_dict(_load_json(args.input))
    if args.action == "check":
        connected = graph.is_connected()
        payload = {
            "connected": connected,
            "snc": graph.is_snc(),
            "negative_definite": (
                is_negative_definite(intersection_matrix(graph)) if connected and not graph.has_loops() else False
            ),
        }
        if connected:
            result = shape(graph)
            payload["shape"] = result.shape.value
            if result.center is not None:
                payload["center"] = result.center
        _emit(payload, args.output)
        return 0
    if args.action == "contract":
        model = minimal_negative_model(graph)
        _emit(model.to_json_dict(), args.output)
        return 0
    if args.action == "shape":
        result = shape(graph)
        payload = {"shape": result.shape.value}
        if result.center is not None:
            payload["center"] = result.center
        _emit(payload, args.output)
        return 0
    raise ValueError(f"unknown graph action {args.action}")


def _cmd_hj(args) -> int:
    if args.action == "expand":
        if len(args.values) != 2:
            raise ValueError("hj expand needs exactly two integers: m q")
        m, q = args.values
        data = CyclicQuotientData(m, q % m if m > 1 else 0)
        _emit({"m": data.m, "q": data.q, "chain": hj_expand(data)}, args.output)
        return 0
    if args.action == "fold":
        data = hj_fold(args.values)
        _emit({"m": data.m, "q": data.q, "chain": list(args.values)}, args.output)
        return 0
    raise ValueError(f"unknown hj action {args.action}")


def _cmd_orbifold(args) -> int:
    obj = _load_json(args.input)
    surface = OrbifoldSurface.from_json_dict(obj)
    if args.action == "classify":
        payload = {
            "type": classify_orbifold(surface).value,
            "euler_characteristic": str(euler_characteristic(surface)),
        }
        _emit(payload, args.output)
        return 0
    if args.action == "cover":
        degree = args.degree if args.degree else canonical_cover_degree(surface)
        data = smooth_cover_data(surface, degree)
        _emit(
            {
                "degree": data.degree,
                "covered_genus": data.covered_genus,
                "covered_euler": str(data.euler),
            },
            args.output,
        )
        return 0
    if args.action == "degree":
        bundle = OrbibundleData.from_json_dict(obj)
        _emit(
            {
                "orbidegree": str(orbidegree(bundle)),
                "contractible": is_contractible(bundle),
            },
            args.output,
        )
        return 0
    raise ValueError(f"unknown orbifold action {args.action}")


def _cmd_verify(args) -> int:
    return verify_suite.main()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cassis",
        description="classification toolkit for contracting automorphisms of "
        "normal surface singularities",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, with_mode=True):
        p.add_argument("--input", required=True, help="input JSON document")
        p.add_argument("--output", help="write the JSON result here instead of stdout")
        p.add_argument("--order", type=int, default=DEFAULT_ORDER, help="truncation order")
        if with_mode:
            p.add_argument("--mode", choices=[EXACT, FLOAT], default=EXACT)

    p = sub.add_parser("classify", help="classify an admissible-data document")
    add_common(p)
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("normalize", help="equivariant Poincare-Dulac normal form")
    add_common(p)
    p.set_defaults(func=_cmd_normalize)

    p = sub.add_parser("koenigs", help="fiberwise linearization of (z, alpha w (1+eps))")
    add_common(p)
    p.set_defaults(func=_cmd_koenigs)

    p = sub.add_parser("graph", help="dual-graph utilities")
    p.add_argument("action", choices=["check", "contract", "shape"])
    p.add_argument("--input", required=True)
    p.add_argument("--output")
    p.set_defaults(func=_cmd_graph)

    p = sub.add_parser("hj", help="Hirzebruch-Jung continued fractions")
    p.add_argument("action", choices=["expand", "fold"])
    p.add_argument("values", type=int, nargs="+")
    p.add_argument("--output")
    p.set_defaults(func=_cmd_hj)

    p = sub.add_parser("orbifold", help="orbifold surface utilities")
    p.add_argument("action", choices=["classify", "cover", "degree"])
    p.add_argument("--input", required=True)
    p.add_argument("--degree", type=int, help="cover degree (default: canonical)")
    p.add_argument("--output")
    p.set_defaults(func=_cmd_orbifold)

    p = sub.add_parser("verify", help="run the verification suite")
    p.set_defaults(func=_cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CassisError as exc:
        print(f"error: {exc}", file=sys.stderr)
        certificate = getattr(exc, "certificate", None)
        if certificate is not None:
            print(
                f"cycle certificate: {certificate.corner_count} corners, "
                f"telescoping product {certificate.telescoping_product} "
                f"(exponent scale {certificate.exponent_scale})",
                file=sys.stderr,
            )
        return 2
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
