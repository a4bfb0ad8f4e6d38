"""Command-line client: ``gq classify | synthesize | verify | invariants``.

The commands are thin wrappers around the HTTP service.  By default the
service runs in process; ``--server URL`` sends the same requests to a
running instance instead.

Run configurations come from a JSON file (``--config``) and inline flags; a
flag overrides the file value it names.  Exit codes: 0 success, 1 a
verification criterion failed, 2 parse error or unknown suite, 3 degenerate
input, 4 quadrature failure, 70 unexpected server error.
"""
from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path

import pydantic

from . import __version__
from .app import EXIT_CRITERION, EXIT_OK, EXIT_PARSE, field_in
from .io import field_to_csv, field_to_json
from .schemas import CoFormIn, FieldOut, RunConfig

EXIT_INTERNAL = 70


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _client(server: str | None):
    if server:
        import httpx

        return httpx.Client(base_url=server, timeout=None)
    with warnings.catch_warnings():
        # the test client's transport deprecation notice is not actionable here
        warnings.simplefilter("ignore")
        from fastapi.testclient import TestClient

    from .service import api

    return TestClient(api, raise_server_exceptions=False)


def _post(server: str | None, path: str, body: dict | None = None, params: dict | None = None) -> dict:
    with _client(server) as client:
        resp = client.post(path, json=body, params=params)
    try:
        data = resp.json()
    except ValueError:
        raise CliError(EXIT_INTERNAL, f"server answered {resp.status_code} without a JSON body") from None
    if resp.status_code >= 400:
        if isinstance(data, dict) and "exit_code" in data:
            raise CliError(int(data["exit_code"]), f"{data['error']}: {data['detail']}")
        raise CliError(EXIT_INTERNAL, f"server answered {resp.status_code}: {data}")
    return data


def _read_json(source: str | None, inline: str | None) -> object:
    try:
        if inline is not None:
            return json.loads(inline)
        if source is None or source == "-":
            return json.loads(sys.stdin.read())
        return json.loads(Path(source).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(EXIT_PARSE, f"cannot read JSON input: {exc}") from None


def _validate(model, data):
    try:
        return model.model_validate(data)
    except pydantic.ValidationError as exc:
        raise CliError(EXIT_PARSE, f"invalid input: {exc}") from None


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


# inline flag -> (section, key, converter)
_OVERRIDES = {
    "family": ("particle", "family", str),
    "m": ("particle", "m", float),
    "eta": ("particle", "eta", int),
    "chi": ("particle", "chi", int),
    "T": ("particle", "T", int),
    "ell": ("particle", "ell", int),
    "center": ("profile", "center", list),
    "radius": ("profile", "radius", float),
    "origin": ("grid", "origin", list),
    "extent": ("grid", "extent", list),
    "samples": ("grid", "samples", list),
    "order": ("quadrature", "order", int),
    "fiber_order": ("quadrature", "fiber_order", int),
}


def build_config(args: argparse.Namespace) -> RunConfig:
    data = _read_json(args.config, None) if args.config else {}
    if not isinstance(data, dict):
        raise CliError(EXIT_PARSE, "a run configuration must be a JSON object")
    for flag, (section, key, conv) in _OVERRIDES.items():
        value = getattr(args, flag, None)
        if value is not None:
            data.setdefault(section, {})[key] = conv(value)
    if args.seed is not None:
        data["seed"] = args.seed
    return _validate(RunConfig, data)


def cmd_classify(args) -> int:
    form = _validate(CoFormIn, _read_json(args.input, args.json))
    _emit(json.dumps(_post(args.server, "/classify", form.model_dump()), indent=2), args.out)
    return EXIT_OK


def cmd_invariants(args) -> int:
    form = _validate(CoFormIn, _read_json(args.input, args.json))
    _emit(json.dumps(_post(args.server, "/invariants", form.model_dump()), indent=2), args.out)
    return EXIT_OK


def cmd_synthesize(args) -> int:
    cfg = build_config(args)
    wf = field_in(FieldOut.model_validate(_post(args.server, "/synthesize", cfg.model_dump(exclude_unset=True))))
    fmt = args.format or ("json" if args.out and args.out.endswith(".json") else "csv")
    _emit(field_to_json(wf) if fmt == "json" else field_to_csv(wf), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    report = _post(args.server, f"/verify/{args.suite}", params={"seed": args.seed or 0})
    _emit(json.dumps(report, indent=2), args.out)
    for c in report["checks"]:
        mark = "ok  " if c["passed"] else "FAIL"
        print(f"{mark} {c['name']}: {c['value']:.3e} (tol {c['tolerance']:.0e})", file=sys.stderr)
    return EXIT_OK if report["passed"] else EXIT_CRITERION


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gq", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--server", help="base URL of a running service (default: in process)")
    sub = p.add_subparsers(dest="command", required=True)

    for name, fn, text in (("classify", cmd_classify, "orbit type, canonical representative, quantizability"),
                           ("invariants", cmd_invariants, "|P|, |W| and the dynamical variables")):
        q = sub.add_parser(name, help=text)
        q.add_argument("input", nargs="?", help="JSON file with {\"a\": ..., \"k\": ...} ('-' or omitted: stdin)")
        q.add_argument("--json", help="the form as an inline JSON string")
        q.add_argument("--out", help="write the result here instead of stdout")
        q.set_defaults(func=fn)

    q = sub.add_parser("synthesize", help="sample a wave field on a spacetime grid")
    q.add_argument("--config", help="run configuration JSON file")
    q.add_argument("--family", choices=["kg", "dirac", "weyl", "penrose", "photon"])
    q.add_argument("--m", type=float)
    q.add_argument("--eta", type=int)
    q.add_argument("--chi", type=int)
    q.add_argument("--T", type=int)
    q.add_argument("--ell", type=int)
    q.add_argument("--center", type=float, nargs=3)
    q.add_argument("--radius", type=float)
    q.add_argument("--origin", type=float, nargs=4)
    q.add_argument("--extent", type=float, nargs=4)
    q.add_argument("--samples", type=int, nargs=4)
    q.add_argument("--order", type=int)
    q.add_argument("--fiber-order", dest="fiber_order", type=int)
    q.add_argument("--seed", type=int)
    q.add_argument("--out", help="output file (default stdout)")
    q.add_argument("--format", choices=["csv", "json"], help="default: from the file suffix, else csv")
    q.set_defaults(func=cmd_synthesize)

    q = sub.add_parser("verify", help="run a named verification suite")
    q.add_argument("suite")
    q.add_argument("--seed", type=int)
    q.add_argument("--out", help="write the JSON report here instead of stdout")
    q.set_defaults(func=cmd_verify)
    return p


def main(argv: list[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"gq: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
