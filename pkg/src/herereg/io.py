"""Text formats: correspondence files, ground-truth sidecars, pose output."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .core import ConsensusSet, CorrespondenceSet, RigidTransform


class ParseError(ValueError):
    def __init__(self, path, lineno: int, msg: str):
        super().__init__(f"{path}:{lineno}: {msg}")
        self.lineno = lineno


def _rows(path, width: int, what: str) -> np.ndarray:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            s = line.strip()
            if not s or s.startswith("#"):
                continue
            tok = s.split()
            if len(tok) != width:
                raise ParseError(path, lineno, f"expected {width} numbers ({what}), got {len(tok)}")
            try:
                rows.append([float(v) for v in tok])
            except ValueError as exc:
                raise ParseError(path, lineno, str(exc)) from None
    return np.asarray(rows, dtype=np.float64).reshape(-1, width)


def read_correspondences(path) -> CorrespondenceSet:
    """``x1 x2 x3 y1 y2 y3`` per line; ``#`` lines and blank lines skipped."""
    a = _rows(path, 6, "x1 x2 x3 y1 y2 y3")
    return CorrespondenceSet(a[:, :3], a[:, 3:])


def read_points(path) -> np.ndarray:
    """Three numbers per line, same conventions as the correspondence file."""
    return _rows(path, 3, "x1 x2 x3")


def write_correspondences(path, cset: CorrespondenceSet, header: str | None = None) -> None:
    lines = [f"# {header}"] if header else []
    for x, y in zip(cset.x, cset.y):
        lines.append(" ".join(f"{v:.17g}" for v in (*x, *y)))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _pose_fields(T: RigidTransform) -> dict:
    return {"rotation": T.R.reshape(-1).tolist(), "translation": T.t.tolist()}


def write_ground_truth(path, T: RigidTransform, mask) -> None:
    doc = _pose_fields(T)
    doc["inlier_mask"] = [int(b) for b in np.asarray(mask, dtype=bool)]
    Path(path).write_text(json.dumps(doc, indent=1) + "\n", encoding="utf-8")


def read_ground_truth(path) -> tuple[RigidTransform, np.ndarray]:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    T = RigidTransform(np.reshape(doc["rotation"], (3, 3)), np.asarray(doc["translation"]))
    return T, np.asarray(doc["inlier_mask"], dtype=bool)


def pose_document(T: RigidTransform, cons: ConsensusSet, extra: dict | None = None) -> dict:
    doc = _pose_fields(T)
    doc["transform"] = T.matrix().tolist()
    doc["consensus"] = cons.indices.tolist()
    if extra:
        doc.update(extra)
    return doc


def write_pose(path, T: RigidTransform, cons: ConsensusSet, extra: dict | None = None) -> None:
    Path(path).write_text(json.dumps(pose_document(T, cons, extra), indent=1) + "\n",
                          encoding="utf-8")
