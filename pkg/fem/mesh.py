"""
사면체 메쉬 자료구조 (TetMesh)
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Union

import numpy as np

from cdt.mesh import MeshError, TriMesh

# 양의 부피 사면체의 바깥 방향 면 (꼭짓점 로컬 인덱스)
OUTWARD_FACES = ((1, 2, 3), (0, 3, 2), (0, 1, 3), (0, 2, 1))


@dataclass(frozen=True, eq=False)
class TetMesh:
    """양의 부피 사면체로 구성된 면-대-면 적합(conforming) 메쉬입니다."""
    vertices: np.ndarray
    tetrahedra: np.ndarray

    def __post_init__(self):
        vertices = np.ascontiguousarray(self.vertices, dtype=float)
        tets = np.ascontiguousarray(self.tetrahedra, dtype=np.int64).reshape(-1, 4)
        vertices.setflags(write=False)
        tets.setflags(write=False)
        object.__setattr__(self, 'vertices', vertices)
        object.__setattr__(self, 'tetrahedra', tets)

    @property
    def cells(self) -> np.ndarray:
        return self.tetrahedra

    @property
    def dim(self) -> int:
        return 3

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_tetrahedra(self) -> int:
        return len(self.tetrahedra)

    @cached_property
    def signed_volumes(self) -> np.ndarray:
        p = self.vertices[self.tetrahedra]
        a = p[:, 0]
        return np.einsum('ij,ij->i', p[:, 1] - a, np.cross(p[:, 2] - a, p[:, 3] - a)) / 6.0

    @property
    def volume(self) -> float:
        return float(self.signed_volumes.sum())

    @cached_property
    def boundary_faces(self) -> np.ndarray:
        """한 사면체에만 속하는 면 (바깥 방향), (k, 3) 배열."""
        faces = np.concatenate([self.tetrahedra[:, list(f)] for f in OUTWARD_FACES])
        keys = np.sort(faces, axis=1)
        _, inverse, counts = np.unique(keys, axis=0, return_inverse=True, return_counts=True)
        result = faces[counts[inverse.ravel()] == 1]
        result.setflags(write=False)
        return result

    def boundary_vertices(self) -> np.ndarray:
        return np.unique(self.boundary_faces.ravel())

    def validate(self) -> None:
        """부피 양수, 면 공유(최대 2개), 경계면이 닫힌 곡면인지 검사합니다."""
        if np.any(self.signed_volumes <= 0.0):
            raise MeshError(f"음수 또는 0 부피 사면체가 {int(np.sum(self.signed_volumes <= 0.0))}개 있습니다.")
        faces = np.sort(np.concatenate([self.tetrahedra[:, list(f)] for f in OUTWARD_FACES]), axis=1)
        _, counts = np.unique(faces, axis=0, return_counts=True)
        if np.any(counts > 2):
            raise MeshError("세 개 이상의 사면체가 공유하는 면이 있습니다 (비적합 메쉬).")
        directed = {}
        for a, b, c in self.boundary_faces.tolist():
            for u, v in ((a, b), (b, c), (c, a)):
                directed[(u, v)] = directed.get((u, v), 0) + 1
        for (u, v), count in directed.items():
            if count != 1 or directed.get((v, u), 0) != 1:
                raise MeshError(f"경계면이 닫힌 곡면이 아닙니다 (변 {u}-{v}).")


Mesh = Union[TriMesh, TetMesh]
