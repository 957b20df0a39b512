"""Text formats for graphs, masks, certificates and process traces."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .geom import Metric
from .graph import CycleCertificate, GeometricGraph, Graph, SubgraphMask


class ParseError(ValueError):
    def __init__(self, path, lineno: int, msg: str):
        super().__init__(f"{path}:{lineno}: {msg}")
        self.lineno = lineno


def write_graph(g: GeometricGraph, path) -> None:
    with open(path, "w") as fh:
        fh.write(f"{g.d} {g.n} {g.r!r} {g.metric.value}\n")
        for p in g.points:
            fh.write(" ".join(repr(float(x)) for x in p) + "\n")
        for u, v in g.graph.edges.tolist():
            fh.write(f"{u} {v}\n")


def read_graph(path) -> GeometricGraph:
    lines = Path(path).read_text().splitlines()
    if not lines:
        raise ParseError(path, 1, "empty file")
    head = lines[0].split()
    if len(head) != 4:
        raise ParseError(path, 1, "header must be 'd n r metric'")
    try:
        d, n, r = int(head[0]), int(head[1]), float(head[2])
        metric = Metric(head[3])
    except ValueError as exc:
        raise ParseError(path, 1, f"bad header: {exc}") from None
    if len(lines) < 1 + n:
        raise ParseError(path, len(lines), f"expected {n} coordinate lines")
    pts = np.empty((n, d))
    for i in range(n):
        parts = lines[1 + i].split()
        try:
            if len(parts) != d:
                raise ValueError(f"expected {d} coordinates")
            pts[i] = [float(x) for x in parts]
        except ValueError as exc:
            raise ParseError(path, 2 + i, str(exc)) from None
        if np.any(pts[i] < 0) or np.any(pts[i] > 1):
            raise ParseError(path, 2 + i, "coordinate outside [0,1]")
    edges = []
    for j, line in enumerate(lines[1 + n:], start=2 + n):
        if not line.strip():
            continue
        parts = line.split()
        try:
            u, v = int(parts[0]), int(parts[1])
            if len(parts) != 2 or not (0 <= u < v < n):
                raise ValueError
        except (ValueError, IndexError):
            raise ParseError(path, j, "edge line must be 'u v' with 0 <= u < v < n") from None
        edges.append((u, v))
    return GeometricGraph(pts, r, metric, Graph(n, edges))


def write_mask(mask: SubgraphMask, base_path, path) -> None:
    with open(path, "w") as fh:
        fh.write(f"base {Path(base_path)}\n")
        for u, v in mask.graph.edges[mask.keep].tolist():
            fh.write(f"{u} {v}\n")


def read_mask(path, base: GeometricGraph | None = None) -> SubgraphMask:
    lines = Path(path).read_text().splitlines()
    if not lines or not lines[0].startswith("base "):
        raise ParseError(path, 1, "mask file must start with 'base <path>'")
    if base is None:
        base = read_graph(lines[0][5:].strip())
    pairs = []
    for j, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            u, v = (int(x) for x in line.split())
        except ValueError:
            raise ParseError(path, j, "edge line must be 'u v'") from None
        pairs.append((u, v))
    keep = np.zeros(base.graph.m, bool)
    if pairs:
        ids = base.graph.edge_ids(pairs)
        if np.any(ids < 0):
            bad = int(np.nonzero(ids < 0)[0][0])
            raise ParseError(path, bad + 2, "kept edge not in base graph")
        keep[ids] = True
    return SubgraphMask(base, keep)


def format_certificate(cert: CycleCertificate) -> str:
    out = [f"kind {cert.kind}"]
    for k, v in sorted(cert.params.items()):
        out.append(f"param {k}={v}")
    if cert.through is not None:
        out.append(f"through {cert.through}")
    out.append("vertices " + " ".join(str(int(v)) for v in cert.vertices))
    for k, v in cert.audits.items():
        if isinstance(v, (bool, np.bool_)):
            out.append(f"audit {k} {'pass' if v else 'fail'}")
        else:
            out.append(f"info {k}={v}")
    return "\n".join(out) + "\n"


def write_certificate(cert: CycleCertificate, path) -> None:
    Path(path).write_text(format_certificate(cert))


def read_certificate(path) -> CycleCertificate:
    kind, through, verts, params, audits = "cycle", None, None, {}, {}
    for j, line in enumerate(Path(path).read_text().splitlines(), start=1):
        if not line.strip():
            continue
        key, _, rest = line.partition(" ")
        try:
            if key == "kind":
                kind = rest.strip()
            elif key == "param":
                k, _, v = rest.partition("=")
                params[k] = v
            elif key == "through":
                through = int(rest)
            elif key == "vertices":
                verts = tuple(int(x) for x in rest.split())
            elif key == "audit":
                name, flag = rest.rsplit(" ", 1)
                if flag not in ("pass", "fail"):
                    raise ValueError(f"audit flag must be pass or fail, got {flag!r}")
                audits[name] = flag == "pass"
            elif key == "info":
                k, _, v = rest.partition("=")
                audits[k] = v
            else:
                raise ValueError(f"unknown record {key!r}")
        except ValueError as exc:
            raise ParseError(path, j, str(exc)) from None
    if verts is None:
        raise ParseError(path, 1, "no 'vertices' record")
    return CycleCertificate(verts, through, kind, params, audits)


def write_trace(trace, path) -> None:
    with open(path, "w") as fh:
        for i, ((u, v), dist) in enumerate(zip(trace.edges.tolist(), trace.dists.tolist()), start=1):
            fh.write(f"{i} {u} {v} {dist!r}\n")
