"""Marching cubes connectivity: 256-case triangle table over cube edges.

Cube corners (classic layout, bit i of the case index set when corner i is
inside, i.e. value < 0):

    0:(0,0,0) 1:(1,0,0) 2:(1,1,0) 3:(0,1,0)
    4:(0,0,1) 5:(1,0,1) 6:(1,1,1) 7:(0,1,1)

Edges 0..11: 01 12 23 30 45 56 67 74 04 15 26 37.

The table is generated at import time by marching squares on each cube
face: crossed face edges are paired into directed segments (inside region
kept to the left as seen from outside the cube, ambiguous faces resolved
by isolating inside corners), the segments chain into closed loops, and
each loop is fan-triangulated. Pairing depends only on a face's own corner
signs, so adjacent cells always agree on their shared face and the global
mesh is crack-free with consistent winding.
"""

from __future__ import annotations

import numpy as np

CORNERS = np.array(
    [
        [0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0],
        [0, 0, 1], [1, 0, 1], [1, 1, 1], [0, 1, 1],
    ],
    dtype=np.int64,
)

EDGES = (
    (0, 1), (1, 2), (2, 3), (3, 0),
    (4, 5), (5, 6), (6, 7), (7, 4),
    (0, 4), (1, 5), (2, 6), (3, 7),
)

# corner cycles counter-clockwise as seen from outside the cube
_FACES = (
    (0, 3, 2, 1),  # z = 0
    (4, 5, 6, 7),  # z = 1
    (0, 1, 5, 4),  # y = 0
    (3, 7, 6, 2),  # y = 1
    (0, 4, 7, 3),  # x = 0
    (1, 2, 6, 5),  # x = 1
)

_EDGE_INDEX = {}
for _e, (_a, _b) in enumerate(EDGES):
    _EDGE_INDEX[(_a, _b)] = _e
    _EDGE_INDEX[(_b, _a)] = _e


def _face_segments(inside, cyc):
    """Directed isoline segments (exit edge -> entry edge) on one face."""
    s = [inside[c] for c in cyc]
    cube_edge = [_EDGE_INDEX[(cyc[i], cyc[(i + 1) % 4])] for i in range(4)]
    exits = [i for i in range(4) if s[i] and not s[(i + 1) % 4]]
    entries = [i for i in range(4) if not s[i] and s[(i + 1) % 4]]
    if not exits:
        return []
    if len(exits) == 1:
        return [(cube_edge[exits[0]], cube_edge[entries[0]])]
    # ambiguous face: isolate each inside corner p between entry p-1 and exit p
    return [
        (cube_edge[p], cube_edge[(p - 1) % 4])
        for p in range(4)
        if s[p]
    ]


def _triangulate_case(case):
    inside = [(case >> i) & 1 == 1 for i in range(8)]
    nxt = {}
    for cyc in _FACES:
        for a, b in _face_segments(inside, cyc):
            nxt[a] = b
    tris = []
    remaining = set(nxt)
    while remaining:
        start = min(remaining)
        loop = [start]
        remaining.discard(start)
        cur = nxt[start]
        while cur != start:
            loop.append(cur)
            remaining.discard(cur)
            cur = nxt[cur]
        for i in range(1, len(loop) - 1):
            # reversed fan: outward-facing winding for negative-inside fields
            tris.append((loop[0], loop[i + 1], loop[i]))
    return tuple(tris)


TRI_TABLE = tuple(_triangulate_case(case) for case in range(256))

# bit e set when edge e is crossed (endpoint signs differ)
EDGE_TABLE = tuple(
    sum(
        1 << e
        for e, (a, b) in enumerate(EDGES)
        if ((case >> a) & 1) != ((case >> b) & 1)
    )
    for case in range(256)
)
