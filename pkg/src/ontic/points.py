"""Ontic points, singly and in vectorized batches.

An ontic point carries a projective state, an optional auxiliary coordinate
``p`` in [0, 1], and a tag path recording which component of a convex
combination it belongs to (outermost index first).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ontic.qstate import ProjState


@dataclass(frozen=True, eq=False)
class OnticPoint:
    state: ProjState
    p: float | None = None
    tag: tuple[int, ...] = ()

    def __post_init__(self):
        if self.p is not None and not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p = {self.p} outside [0, 1]")
        object.__setattr__(self, "tag", tuple(int(t) for t in self.tag))

    @property
    def d(self) -> int:
        return self.state.d

    def untagged(self) -> "OnticPoint":
        return OnticPoint(self.state, self.p, self.tag[1:])


@dataclass(eq=False)
class OnticBatch:
    """``n`` ontic points stored column-wise.

    ``p`` is ``None`` for ontic spaces without the auxiliary coordinate;
    ``tags`` has shape ``(n, depth)``.
    """

    states: np.ndarray
    p: np.ndarray | None = None
    tags: np.ndarray = field(default=None)

    def __post_init__(self):
        self.states = np.atleast_2d(np.asarray(self.states, dtype=complex))
        n = self.states.shape[0]
        if self.p is not None:
            self.p = np.asarray(self.p, dtype=float).reshape(n)
        if self.tags is None:
            self.tags = np.zeros((n, 0), dtype=np.int64)
        else:
            self.tags = np.asarray(self.tags, dtype=np.int64).reshape(n, -1)

    def __len__(self) -> int:
        return self.states.shape[0]

    @property
    def d(self) -> int:
        return self.states.shape[1]

    def subset(self, idx) -> "OnticBatch":
        return OnticBatch(
            self.states[idx],
            None if self.p is None else self.p[idx],
            self.tags[idx],
        )

    def drop_tag(self) -> "OnticBatch":
        return OnticBatch(self.states, self.p, self.tags[:, 1:])

    def point(self, i: int) -> OnticPoint:
        return OnticPoint(
            ProjState.from_vector(self.states[i]),
            None if self.p is None else float(self.p[i]),
            tuple(self.tags[i]),
        )

    @classmethod
    def from_points(cls, points: Sequence[OnticPoint]) -> "OnticBatch":
        if not points:
            raise ValueError("no points")
        depth = {len(q.tag) for q in points}
        if len(depth) != 1:
            raise ValueError("points have tag paths of different depth")
        has_p = {q.p is not None for q in points}
        if len(has_p) != 1:
            raise ValueError("mixing points with and without p")
        return cls(
            np.array([q.state.amplitudes for q in points]),
            np.array([q.p for q in points], dtype=float) if has_p.pop() else None,
            np.array([q.tag for q in points], dtype=np.int64).reshape(len(points), -1),
        )

    @classmethod
    def concat(cls, batches: Sequence["OnticBatch"]) -> "OnticBatch":
        has_p = batches[0].p is not None
        return cls(
            np.vstack([b.states for b in batches]),
            np.concatenate([b.p for b in batches]) if has_p else None,
            np.vstack([b.tags for b in batches]),
        )
